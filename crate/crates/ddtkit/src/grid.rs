//! Uniform sampling lattices.
//!
//! A [`TimeGrid`] is the single lattice abstraction used everywhere: signal
//! sample times, transform output times, and frequency(-rate) axes all share
//! the start/step/count representation, even though the units differ.

use serde::{Deserialize, Serialize};

use crate::error::{DdtError, Result};

/// Relative tolerance for deciding whether a real value sits on a lattice.
pub const LATTICE_REL_TOL: f64 = 1e-9;

/// A uniform lattice: sample `m` is `start + m * step` for `0 <= m < count`.
///
/// ```
/// use ddtkit::TimeGrid;
/// let g = TimeGrid::new(-10.0, 20.0 / 512.0, 512).unwrap();
/// assert_eq!(g.point(0), -10.0);
/// assert_eq!(g.count(), 512);
/// assert!(g.point(511) < 10.0);
/// ```
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    start: f64,
    step: f64,
    count: usize,
}

impl TimeGrid {
    pub fn new(start: f64, step: f64, count: usize) -> Result<Self> {
        if !(step > 0.0) || !step.is_finite() {
            return Err(DdtError::invalid(format!("grid step must be positive, got {step}")));
        }
        if !start.is_finite() {
            return Err(DdtError::invalid("grid start must be finite"));
        }
        if count < 1 {
            return Err(DdtError::invalid("grid count must be at least 1"));
        }
        Ok(TimeGrid { start, step, count })
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn count(&self) -> usize {
        self.count
    }

    /// Lattice point `m`.
    pub fn point(&self, m: usize) -> f64 {
        self.start + m as f64 * self.step
    }

    /// Last lattice point.
    pub fn last(&self) -> f64 {
        self.point(self.count - 1)
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.count).map(move |m| self.point(m))
    }

    /// Index of the lattice point nearest to `t`, clamped to the grid.
    pub fn nearest_index(&self, t: f64) -> usize {
        let raw = ((t - self.start) / self.step).round();
        if raw <= 0.0 {
            0
        } else if raw as usize >= self.count {
            self.count - 1
        } else {
            raw as usize
        }
    }

    /// Signed lattice offset of `t` from `start`, with the residual expressed
    /// in units of `step`.
    pub fn offset_of(&self, t: f64) -> (i64, f64) {
        let x = (t - self.start) / self.step;
        let k = x.round();
        (k as i64, x - k)
    }

    /// Index of `t` if it lies on the lattice (within [`LATTICE_REL_TOL`] of a
    /// point) and inside the grid; `None` otherwise.
    pub fn lattice_index(&self, t: f64) -> Option<usize> {
        let (k, residual) = self.offset_of(t);
        if residual.abs() > LATTICE_REL_TOL {
            return None;
        }
        if k < 0 || k as usize >= self.count {
            return None;
        }
        Some(k as usize)
    }

    /// Two grids are commensurate when their steps are equal and their starts
    /// differ by an integer multiple of the step.
    pub fn is_commensurate(&self, other: &TimeGrid) -> bool {
        let step_rel = (self.step - other.step).abs() / self.step;
        if step_rel > LATTICE_REL_TOL {
            return false;
        }
        let offset = (other.start - self.start) / self.step;
        (offset - offset.round()).abs() <= LATTICE_REL_TOL
    }

    /// The same lattice translated by `k` steps.
    pub fn shifted_by(&self, k: i64) -> TimeGrid {
        TimeGrid {
            start: self.start + k as f64 * self.step,
            step: self.step,
            count: self.count,
        }
    }
}

/// Convenience constructor mirroring the library's grid vocabulary.
pub fn make_grid(start: f64, step: f64, count: usize) -> Result<TimeGrid> {
    TimeGrid::new(start, step, count)
}
