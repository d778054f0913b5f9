//! Inverse DDT at Omega = 0 by Tikhonov-regularized deconvolution.
//!
//! The zero-rate slice of the transform is the windowed convolution of the
//! signal, so recovery is a 1-D deconvolution by the sampled window. It is
//! carried out in the discrete frequency domain on a zero-padded circular
//! grid: S(w) = D(w) conj(G(w)) / (|G(w)|^2 + lambda) with
//! lambda = lambda_rel * max |G(w)|^2.

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{DdtError, Result};
use crate::signal::ComplexSignal;
use crate::window::WindowSpec;

/// Deconvolution controls.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeconvOptions {
    /// Tikhonov level relative to the peak spectral energy of the window.
    pub lambda_rel: f64,
    /// Zero-padding multiple used to suppress circular wrap-around.
    pub pad_factor: usize,
}

impl Default for DeconvOptions {
    fn default() -> Self {
        DeconvOptions { lambda_rel: 1e-10, pad_factor: 2 }
    }
}

impl DeconvOptions {
    fn validate(&self) -> Result<()> {
        if !(self.lambda_rel >= 0.0) {
            return Err(DdtError::invalid("lambda_rel must be >= 0"));
        }
        if self.pad_factor < 1 {
            return Err(DdtError::invalid("pad_factor must be >= 1"));
        }
        Ok(())
    }
}

/// Recover s from d0 = convolve(s, g) on d0's grid.
pub fn inverse_ddt(d0: &ComplexSignal, g: &WindowSpec, opts: &DeconvOptions) -> Result<ComplexSignal> {
    opts.validate()?;
    if d0.is_empty() {
        return Err(DdtError::invalid("signal must be nonempty"));
    }
    let n = d0.len();
    let len = n * opts.pad_factor;
    let dt = d0.grid().step();

    // Sampled convolution kernel h[k] = step * g(k * step) for |k| < n,
    // folded onto the circular grid.
    let mut kernel = vec![Complex64::ZERO; len];
    for k in -(n as i64 - 1)..=(n as i64 - 1) {
        let idx = k.rem_euclid(len as i64) as usize;
        kernel[idx] += g.eval(k as f64 * dt) * dt;
    }

    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(len);
    let ifft = planner.plan_fft_inverse(len);

    let mut spectrum_g = kernel;
    fft.process(&mut spectrum_g);

    let peak_energy = spectrum_g.iter().map(|z| z.norm_sqr()).fold(0.0, f64::max);
    if peak_energy == 0.0 {
        return Err(DdtError::DegenerateWindow(
            "window is numerically zero on the signal span".into(),
        ));
    }
    let lambda = opts.lambda_rel * peak_energy;

    let mut spectrum_d = vec![Complex64::ZERO; len];
    spectrum_d[..n].copy_from_slice(d0.samples());
    fft.process(&mut spectrum_d);

    for (d, gg) in spectrum_d.iter_mut().zip(&spectrum_g) {
        let denom = gg.norm_sqr() + lambda;
        if denom == 0.0 {
            *d = Complex64::ZERO;
        } else {
            *d = *d * gg.conj() / denom;
        }
    }
    ifft.process(&mut spectrum_d);
    let scale = 1.0 / len as f64;
    let samples: Vec<Complex64> = spectrum_d[..n].iter().map(|z| z * scale).collect();
    ComplexSignal::new(*d0.grid(), samples)
}
