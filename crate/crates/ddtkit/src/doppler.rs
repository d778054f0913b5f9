//! Doppler laws: the frequency-shift function of delay.

use serde::{Deserialize, Serialize};

use crate::error::{DdtError, Result};
use crate::grid::TimeGrid;

/// The Doppler function of delay. `Constant` gives every delay the same
/// shift (trivial Doppler spread); `LinearRate` is the rate * tau law of the
/// linear-rate transform kernel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DopplerLaw {
    Constant { omega0: f64 },
    LinearRate { rate: f64 },
    /// Values on a grid, linearly interpolated, zero outside.
    Tabulated { grid: TimeGrid, omegas: Vec<f64> },
}

impl DopplerLaw {
    pub fn tabulated(grid: TimeGrid, omegas: Vec<f64>) -> Result<Self> {
        if omegas.len() != grid.count() {
            return Err(DdtError::invalid("tabulated law length must match its grid"));
        }
        Ok(DopplerLaw::Tabulated { grid, omegas })
    }

    /// Evaluate the law at delay `tau`.
    pub fn eval(&self, tau: f64) -> f64 {
        match self {
            DopplerLaw::Constant { omega0 } => *omega0,
            DopplerLaw::LinearRate { rate } => rate * tau,
            DopplerLaw::Tabulated { grid, omegas } => {
                let x = (tau - grid.start()) / grid.step();
                let k = x.round();
                if (x - k).abs() <= 1e-9 {
                    if k < 0.0 || k as usize >= grid.count() {
                        return 0.0;
                    }
                    return omegas[k as usize];
                }
                if x < 0.0 || x > (grid.count() - 1) as f64 {
                    return 0.0;
                }
                let i = x.floor() as usize;
                let f = x - i as f64;
                omegas[i] * (1.0 - f) + omegas[i + 1] * f
            }
        }
    }
}

/// Free-function form of [`DopplerLaw::eval`].
pub fn eval_doppler(law: &DopplerLaw, tau: f64) -> f64 {
    law.eval(tau)
}
