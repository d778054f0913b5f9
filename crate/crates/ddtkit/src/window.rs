//! Window functions, evaluable at arbitrary real arguments.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{DdtError, Result};
use crate::grid::TimeGrid;

/// A window g(t). Closed-form windows are evaluated everywhere without
/// truncation; tabulated windows interpolate linearly and are zero outside
/// their grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WindowSpec {
    /// g(t) = e^{-a t^2}, a > 0.
    Gaussian { a: f64 },
    /// g(t) = 1 on [-halfwidth, halfwidth], 0 outside.
    Rectangular { halfwidth: f64 },
    /// Samples on a grid, linearly interpolated, zero outside.
    Tabulated { grid: TimeGrid, re: Vec<f64>, im: Vec<f64> },
}

impl WindowSpec {
    pub fn gaussian(a: f64) -> Result<Self> {
        if !(a > 0.0) || !a.is_finite() {
            return Err(DdtError::invalid(format!("gaussian scale must be positive, got {a}")));
        }
        Ok(WindowSpec::Gaussian { a })
    }

    pub fn rectangular(halfwidth: f64) -> Result<Self> {
        if !(halfwidth > 0.0) || !halfwidth.is_finite() {
            return Err(DdtError::invalid("rectangular halfwidth must be positive"));
        }
        Ok(WindowSpec::Rectangular { halfwidth })
    }

    pub fn tabulated(grid: TimeGrid, re: Vec<f64>, im: Vec<f64>) -> Result<Self> {
        if re.len() != grid.count() || im.len() != grid.count() {
            return Err(DdtError::invalid("tabulated window length must match its grid"));
        }
        Ok(WindowSpec::Tabulated { grid, re, im })
    }

    /// Evaluate g(t). Total function: every real argument has a value.
    pub fn eval(&self, t: f64) -> Complex64 {
        match self {
            WindowSpec::Gaussian { a } => Complex64::new((-a * t * t).exp(), 0.0),
            WindowSpec::Rectangular { halfwidth } => {
                if t.abs() <= *halfwidth {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::ZERO
                }
            }
            WindowSpec::Tabulated { grid, re, im } => {
                let x = (t - grid.start()) / grid.step();
                let k = x.round();
                // exact at lattice points
                if (x - k).abs() <= 1e-9 {
                    if k < 0.0 || k as usize >= grid.count() {
                        return Complex64::ZERO;
                    }
                    let i = k as usize;
                    return Complex64::new(re[i], im[i]);
                }
                if x < 0.0 || x > (grid.count() - 1) as f64 {
                    return Complex64::ZERO;
                }
                let i = x.floor() as usize;
                let f = x - i as f64;
                let lo = Complex64::new(re[i], im[i]);
                let hi = Complex64::new(re[i + 1], im[i + 1]);
                lo * (1.0 - f) + hi * f
            }
        }
    }
}

/// Free-function form of [`WindowSpec::eval`].
pub fn eval_window(w: &WindowSpec, t: f64) -> Complex64 {
    w.eval(t)
}
