//! The delay Doppler transform, the STFT baseline, and identity diagnostics.
//!
//! Every continuous integral is realized as a Riemann sum over the input
//! signal's grid with weight `step`. The bilinear kernel e^{-j W tau t} is not
//! shift invariant in tau, so the reference evaluation is the direct sum per
//! output cell; rows are computed independently, in a fixed per-cell order, so
//! results are bitwise identical regardless of parallelism.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::doppler::DopplerLaw;
use crate::error::{DdtError, Result};
use crate::grid::TimeGrid;
use crate::signal::ComplexSignal;
use crate::window::WindowSpec;

/// Which transform a [`TFMap`] holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MapKind {
    Ddt,
    Stft,
}

/// A complex matrix over a (t, Omega) product grid, row-major in t.
///
/// For a DDT map the Omega axis carries rate units (rad/s^2); for an STFT map
/// it carries rad/s. Both axes reuse the [`TimeGrid`] lattice representation.
#[derive(Debug, Clone, PartialEq)]
pub struct TFMap {
    t_axis: TimeGrid,
    omega_axis: TimeGrid,
    values: Vec<Complex64>,
    kind: MapKind,
}

impl TFMap {
    pub fn new(t_axis: TimeGrid, omega_axis: TimeGrid, values: Vec<Complex64>, kind: MapKind) -> Result<Self> {
        if values.len() != t_axis.count() * omega_axis.count() {
            return Err(DdtError::invalid("map value count does not match axes"));
        }
        if values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(DdtError::invalid("map entries must be finite"));
        }
        Ok(TFMap { t_axis, omega_axis, values, kind })
    }

    pub fn t_axis(&self) -> &TimeGrid {
        &self.t_axis
    }

    pub fn omega_axis(&self) -> &TimeGrid {
        &self.omega_axis
    }

    pub fn kind(&self) -> MapKind {
        self.kind
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Entry at t row `m`, Omega column `k`.
    pub fn at(&self, m: usize, k: usize) -> Complex64 {
        self.values[m * self.omega_axis.count() + k]
    }

    /// Row `m` (all Omega columns at one t).
    pub fn row(&self, m: usize) -> &[Complex64] {
        let w = self.omega_axis.count();
        &self.values[m * w..(m + 1) * w]
    }

    /// One Omega column as an owned signal on the t axis.
    pub fn column(&self, k: usize) -> ComplexSignal {
        let samples = (0..self.t_axis.count()).map(|m| self.at(m, k)).collect();
        ComplexSignal::new(self.t_axis, samples).expect("finite by construction")
    }

    pub fn peak_abs(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    fn frobenius(&self) -> f64 {
        self.values.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

fn check_nonempty(s: &ComplexSignal) -> Result<()> {
    if s.is_empty() {
        Err(DdtError::invalid("signal must be nonempty"))
    } else {
        Ok(())
    }
}

/// General-law DDT evaluated on an output time grid:
/// out[m] = step * sum_n s[n] g(t_m - tau_n) e^{-j W(tau_n) t_m}.
pub fn ddt_general(
    s: &ComplexSignal,
    g: &WindowSpec,
    law: &DopplerLaw,
    out: &TimeGrid,
) -> Result<ComplexSignal> {
    check_nonempty(s)?;
    let dt = s.grid().step();
    let taus: Vec<f64> = s.grid().points().collect();
    let omegas: Vec<f64> = taus.iter().map(|&tau| law.eval(tau)).collect();
    let samples: Vec<Complex64> = (0..out.count())
        .into_par_iter()
        .map(|m| {
            let t = out.point(m);
            let mut acc = Complex64::ZERO;
            for (n, &z) in s.samples().iter().enumerate() {
                let w = g.eval(t - taus[n]);
                let phase = Complex64::from_polar(1.0, -omegas[n] * t);
                acc += z * w * phase;
            }
            acc * dt
        })
        .collect();
    ComplexSignal::new(*out, samples)
}

/// Linear-rate DDT over a full (t, Omega) grid:
/// values[m,k] = step * sum_n s[n] g(t_m - tau_n) e^{-j W_k tau_n t_m}.
pub fn ddt_map(
    s: &ComplexSignal,
    g: &WindowSpec,
    omega_axis: &TimeGrid,
    t_axis: &TimeGrid,
) -> Result<TFMap> {
    check_nonempty(s)?;
    let dt = s.grid().step();
    let taus: Vec<f64> = s.grid().points().collect();
    let rates: Vec<f64> = omega_axis.points().collect();
    let width = omega_axis.count();
    let mut values = vec![Complex64::ZERO; t_axis.count() * width];
    values
        .par_chunks_mut(width)
        .enumerate()
        .for_each(|(m, row)| {
            let t = t_axis.point(m);
            let win: Vec<Complex64> = taus.iter().map(|&tau| g.eval(t - tau)).collect();
            for (k, cell) in row.iter_mut().enumerate() {
                let rate = rates[k];
                let mut acc = Complex64::ZERO;
                for (n, &z) in s.samples().iter().enumerate() {
                    let phase = Complex64::from_polar(1.0, -rate * taus[n] * t);
                    acc += z * win[n] * phase;
                }
                *cell = acc * dt;
            }
        });
    TFMap::new(*t_axis, *omega_axis, values, MapKind::Ddt)
}

/// Short-time Fourier transform over the same product grid:
/// values[m,k] = step * sum_n s[n] g(tau_n - t_m) e^{-j W_k tau_n}.
pub fn stft_map(
    s: &ComplexSignal,
    g: &WindowSpec,
    omega_axis: &TimeGrid,
    t_axis: &TimeGrid,
) -> Result<TFMap> {
    check_nonempty(s)?;
    let dt = s.grid().step();
    let taus: Vec<f64> = s.grid().points().collect();
    let freqs: Vec<f64> = omega_axis.points().collect();
    let width = omega_axis.count();
    let mut values = vec![Complex64::ZERO; t_axis.count() * width];
    values
        .par_chunks_mut(width)
        .enumerate()
        .for_each(|(m, row)| {
            let t = t_axis.point(m);
            let win: Vec<Complex64> = taus.iter().map(|&tau| g.eval(tau - t)).collect();
            for (k, cell) in row.iter_mut().enumerate() {
                let omega = freqs[k];
                let mut acc = Complex64::ZERO;
                for (n, &z) in s.samples().iter().enumerate() {
                    let phase = Complex64::from_polar(1.0, -omega * taus[n]);
                    acc += z * win[n] * phase;
                }
                *cell = acc * dt;
            }
        });
    TFMap::new(*t_axis, *omega_axis, values, MapKind::Stft)
}

/// Windowed convolution: out[m] = step * sum_n s[n] g(t_m - tau_n).
pub fn convolve(s: &ComplexSignal, g: &WindowSpec, out: &TimeGrid) -> Result<ComplexSignal> {
    check_nonempty(s)?;
    let dt = s.grid().step();
    let taus: Vec<f64> = s.grid().points().collect();
    let samples: Vec<Complex64> = (0..out.count())
        .into_par_iter()
        .map(|m| {
            let t = out.point(m);
            let mut acc = Complex64::ZERO;
            for (n, &z) in s.samples().iter().enumerate() {
                acc += z * g.eval(t - taus[n]);
            }
            acc * dt
        })
        .collect();
    ComplexSignal::new(*out, samples)
}

/// Constant-law DDT in factored form: a unimodular phase times the
/// convolution. The trivial-Doppler-spread case.
pub fn ddt_constant(
    s: &ComplexSignal,
    g: &WindowSpec,
    omega0: f64,
    out: &TimeGrid,
) -> Result<ComplexSignal> {
    let conv = convolve(s, g, out)?;
    Ok(conv.map_with_time(|t, z| Complex64::from_polar(1.0, -omega0 * t) * z))
}

/// Time-shift identity diagnostic. Computes both sides of
/// DDT_{s(t-t0)}(t, W) = DDT_{s(t) e^{-j W t0 t}}(t - t0, W) e^{-j W t0 t}
/// with t0 = k0 * step, and returns the max absolute difference.
pub fn verify_shift_identity(
    s: &ComplexSignal,
    k0: i64,
    omega: f64,
    g: &WindowSpec,
    out: &TimeGrid,
) -> Result<f64> {
    if !out.is_commensurate(s.grid()) {
        return Err(DdtError::invalid("output grid must be commensurate with the signal grid"));
    }
    let t0 = k0 as f64 * s.grid().step();
    let law = DopplerLaw::LinearRate { rate: omega };

    let shifted = s.shifted_by(k0);
    let lhs = ddt_general(&shifted, g, &law, out)?;

    let modulated = s.map_with_time(|tau, z| z * Complex64::from_polar(1.0, -omega * t0 * tau));
    let inner = ddt_general(&modulated, g, &law, &out.shifted_by(-k0))?;
    let mut max_err = 0.0f64;
    for m in 0..out.count() {
        let t = out.point(m);
        let rhs = inner.samples()[m] * Complex64::from_polar(1.0, -omega * t0 * t);
        max_err = max_err.max((lhs.samples()[m] - rhs).norm());
    }
    Ok(max_err)
}

/// Normalized Frobenius distance between the magnitude maps:
/// || |a| - |b| ||_F / max(|| |a| ||_F, || |b| ||_F). Zero for identical maps,
/// one when either map is zero and the other is not.
pub fn map_distance(a: &TFMap, b: &TFMap) -> Result<f64> {
    if a.t_axis != b.t_axis || a.omega_axis != b.omega_axis {
        return Err(DdtError::invalid("maps must share identical axes"));
    }
    let denom = a.frobenius().max(b.frobenius());
    if denom == 0.0 {
        return Ok(0.0);
    }
    let num = a
        .values
        .iter()
        .zip(&b.values)
        .map(|(x, y)| {
            let d = x.norm() - y.norm();
            d * d
        })
        .sum::<f64>()
        .sqrt();
    Ok(num / denom)
}
