//! Complex signals on uniform grids and the synthesis expressions that
//! generate the test waveforms.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{DdtError, Result};
use crate::grid::{TimeGrid, LATTICE_REL_TOL};

/// Complex samples on a [`TimeGrid`]. The signal is exactly zero outside its
/// grid for all quadrature purposes.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSignal {
    grid: TimeGrid,
    samples: Vec<Complex64>,
}

impl ComplexSignal {
    pub fn new(grid: TimeGrid, samples: Vec<Complex64>) -> Result<Self> {
        if samples.len() != grid.count() {
            return Err(DdtError::invalid(format!(
                "sample count {} does not match grid count {}",
                samples.len(),
                grid.count()
            )));
        }
        if samples.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(DdtError::invalid("signal samples must be finite"));
        }
        Ok(ComplexSignal { grid, samples })
    }

    pub fn zeros(grid: TimeGrid) -> Self {
        let n = grid.count();
        ComplexSignal { grid, samples: vec![Complex64::ZERO; n] }
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Value at a lattice-aligned time, zero outside the grid. `t` must sit on
    /// the signal's lattice; off-lattice lookups are a caller bug, so this
    /// rounds to the nearest lattice point.
    pub fn value_at_lattice(&self, t: f64) -> Complex64 {
        let (k, _) = self.grid.offset_of(t);
        if k < 0 || k as usize >= self.grid.count() {
            Complex64::ZERO
        } else {
            self.samples[k as usize]
        }
    }

    /// The same samples translated by `k0` lattice steps: represents
    /// s(t - k0 * step) exactly.
    pub fn shifted_by(&self, k0: i64) -> ComplexSignal {
        ComplexSignal { grid: self.grid.shifted_by(k0), samples: self.samples.clone() }
    }

    /// Pointwise product with a unimodular or arbitrary sample-wise factor.
    pub fn map_with_time<F>(&self, f: F) -> ComplexSignal
    where
        F: Fn(f64, Complex64) -> Complex64,
    {
        let samples = self
            .grid
            .points()
            .zip(&self.samples)
            .map(|(t, &z)| f(t, z))
            .collect();
        ComplexSignal { grid: self.grid, samples }
    }

    pub fn peak_abs(&self) -> f64 {
        self.samples.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn norm_l2(&self) -> f64 {
        self.samples.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// A closed-form description of a signal to synthesize on a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignalExpr {
    /// e^{j alpha t^2}
    LinearChirp { alpha: f64 },
    /// e^{j beta t^3}
    CubicChirp { beta: f64 },
    /// e^{j omega t}
    Tone { omega: f64 },
    /// e^{-a t^2}
    GaussianPulse { a: f64 },
    /// One sample of value 1/step at the grid point nearest `at`; the
    /// amplitude makes the Riemann-sum sifting action grid-independent.
    UnitImpulse { at: f64 },
    Sum(Vec<SignalExpr>),
    FromFile { path: PathBuf },
}

/// Evaluate `expr` at every grid point.
pub fn synthesize(expr: &SignalExpr, grid: &TimeGrid) -> Result<ComplexSignal> {
    match expr {
        SignalExpr::LinearChirp { alpha } => Ok(from_fn(grid, |t| {
            Complex64::from_polar(1.0, alpha * t * t)
        })),
        SignalExpr::CubicChirp { beta } => Ok(from_fn(grid, |t| {
            Complex64::from_polar(1.0, beta * t * t * t)
        })),
        SignalExpr::Tone { omega } => Ok(from_fn(grid, |t| Complex64::from_polar(1.0, omega * t))),
        SignalExpr::GaussianPulse { a } => {
            if !(*a > 0.0) {
                return Err(DdtError::invalid("gaussian pulse scale must be positive"));
            }
            Ok(from_fn(grid, |t| Complex64::new((-a * t * t).exp(), 0.0)))
        }
        SignalExpr::UnitImpulse { at } => {
            let mut s = ComplexSignal::zeros(*grid);
            let idx = grid.nearest_index(*at);
            s.samples[idx] = Complex64::new(1.0 / grid.step(), 0.0);
            Ok(s)
        }
        SignalExpr::Sum(parts) => {
            let mut acc = ComplexSignal::zeros(*grid);
            for part in parts {
                let p = synthesize(part, grid)?;
                for (a, b) in acc.samples.iter_mut().zip(&p.samples) {
                    *a += b;
                }
            }
            Ok(acc)
        }
        SignalExpr::FromFile { path } => {
            let s = read_signal_csv(path)?;
            if !grids_match(s.grid(), grid) {
                return Err(DdtError::format(format!(
                    "signal file {} does not match the requested grid",
                    path.display()
                )));
            }
            Ok(s)
        }
    }
}

fn grids_match(a: &TimeGrid, b: &TimeGrid) -> bool {
    a.count() == b.count()
        && (a.step() - b.step()).abs() <= LATTICE_REL_TOL * a.step()
        && (a.start() - b.start()).abs() <= LATTICE_REL_TOL * a.step()
}

fn from_fn<F: Fn(f64) -> Complex64>(grid: &TimeGrid, f: F) -> ComplexSignal {
    let samples = grid.points().map(f).collect();
    ComplexSignal { grid: *grid, samples }
}

/// Read a signal from CSV with header `t,re,im`. The time column must be
/// strictly increasing and equispaced to relative tolerance 1e-9 of the step.
pub fn read_signal_csv(path: &Path) -> Result<ComplexSignal> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| DdtError::format("empty signal file"))?;
    if header.trim() != "t,re,im" {
        return Err(DdtError::format(format!("expected header 't,re,im', got '{header}'")));
    }
    let mut ts = Vec::new();
    let mut samples = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split(',');
        let parse = |f: Option<&str>| -> Result<f64> {
            f.ok_or_else(|| DdtError::format(format!("line {}: missing field", lineno + 2)))?
                .trim()
                .parse::<f64>()
                .map_err(|e| DdtError::format(format!("line {}: {e}", lineno + 2)))
        };
        ts.push(parse(fields.next())?);
        let re = parse(fields.next())?;
        let im = parse(fields.next())?;
        samples.push(Complex64::new(re, im));
    }
    if ts.is_empty() {
        return Err(DdtError::format("signal file has no samples"));
    }
    let grid = if ts.len() == 1 {
        TimeGrid::new(ts[0], 1.0, 1)?
    } else {
        let step = (ts[ts.len() - 1] - ts[0]) / (ts.len() - 1) as f64;
        if !(step > 0.0) {
            return Err(DdtError::format("time column must be strictly increasing"));
        }
        for (i, &t) in ts.iter().enumerate() {
            let expected = ts[0] + i as f64 * step;
            if (t - expected).abs() > LATTICE_REL_TOL * step {
                return Err(DdtError::format(format!(
                    "time column is not equispaced at row {} (got {t}, expected {expected})",
                    i + 2
                )));
            }
        }
        TimeGrid::new(ts[0], step, ts.len())?
    };
    ComplexSignal::new(grid, samples)
}

/// Write a signal as `t,re,im` CSV, 17 significant digits per value.
pub fn write_signal_csv(signal: &ComplexSignal, path: &Path) -> Result<()> {
    let mut out = Vec::with_capacity(signal.len() * 48 + 8);
    out.extend_from_slice(b"t,re,im\n");
    for (t, z) in signal.grid().points().zip(signal.samples()) {
        writeln!(
            out,
            "{},{},{}",
            crate::export::fmt_g17(t),
            crate::export::fmt_g17(z.re),
            crate::export::fmt_g17(z.im)
        )?;
    }
    fs::write(path, out)?;
    Ok(())
}
