use crate::error::{Error, Result};

/// Uniformly spaced samples `min + i*step` for `i in 0..n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformGrid {
    min: f64,
    max: f64,
    n: usize,
}

/// Grid in the Lagrangian label variable.
pub type XiGrid = UniformGrid;
/// Grid in physical space.
pub type XGrid = UniformGrid;

impl UniformGrid {
    pub fn new(min: f64, max: f64, n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidGrid(format!("need at least 3 samples, got {n}")));
        }
        if !(min.is_finite() && max.is_finite()) || max <= min {
            return Err(Error::InvalidGrid(format!("bad bounds [{min}, {max}]")));
        }
        Ok(Self { min, max, n })
    }

    /// Grid with the given left end and spacing.
    pub fn with_step(min: f64, step: f64, n: usize) -> Result<Self> {
        if !(step > 0.0) {
            return Err(Error::InvalidGrid(format!("spacing must be positive, got {step}")));
        }
        Self::new(min, min + step * (n as f64 - 1.0), n)
    }

    pub fn min(&self) -> f64 {
        self.min
    }

    pub fn max(&self) -> f64 {
        self.max
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn step(&self) -> f64 {
        (self.max - self.min) / (self.n - 1) as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        if i + 1 == self.n {
            self.max
        } else {
            self.min + i as f64 * self.step()
        }
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.point(i)).collect()
    }

    /// Same interval with every cell halved (`2n - 1` samples).
    pub fn refined(&self) -> Self {
        Self { n: 2 * self.n - 1, ..*self }
    }

    /// Cell index `j` and local coordinate `t in [0, 1]` such that
    /// `s = point(j) + t*step`. `None` outside the grid.
    pub fn locate(&self, s: f64) -> Option<(usize, f64)> {
        if !(s >= self.min && s <= self.max) {
            return None;
        }
        let h = self.step();
        let raw = (s - self.min) / h;
        let j = (raw.floor() as usize).min(self.n - 2);
        Some((j, raw - j as f64))
    }

    pub fn same_as(&self, other: &Self) -> bool {
        self == other
    }
}
