use crate::error::{Error, Result};
use crate::grid::XGrid;
use crate::quad::trapz;

/// A point mass of the energy measure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub location: f64,
    pub mass: f64,
}

/// Energy measure: absolutely continuous density sampled on an x-grid plus
/// finitely many atoms.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyMeasure {
    pub xgrid: XGrid,
    pub density: Vec<f64>,
    pub atoms: Vec<Atom>,
}

impl EnergyMeasure {
    pub fn zero(xgrid: XGrid) -> Self {
        Self { xgrid, density: vec![0.0; xgrid.len()], atoms: Vec::new() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.density.len() != self.xgrid.len() {
            return Err(Error::InvalidMeasure("density length differs from grid".into()));
        }
        if let Some(i) = self.density.iter().position(|d| !(d.is_finite() && *d >= 0.0)) {
            return Err(Error::InvalidMeasure(format!("density[{i}] = {} is not a nonnegative number", self.density[i])));
        }
        for a in &self.atoms {
            if !(a.mass > 0.0 && a.mass.is_finite() && a.location.is_finite()) {
                return Err(Error::InvalidMeasure(format!("bad atom {a:?}")));
            }
        }
        Ok(())
    }

    pub fn atom_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.mass).sum()
    }

    /// `μ(ℝ)`: trapezoid mass of the density plus the atoms.
    pub fn total_mass(&self) -> f64 {
        trapz(&self.density, self.xgrid.step()) + self.atom_mass()
    }
}

/// Eulerian solution samples `(u, γ, γ_x)` with the energy measure.
#[derive(Debug, Clone, PartialEq)]
pub struct EulerianTriple {
    pub xgrid: XGrid,
    pub u: Vec<f64>,
    pub gamma: Vec<f64>,
    pub gamma_x: Vec<f64>,
    pub mu: EnergyMeasure,
}

impl EulerianTriple {
    pub fn zero(xgrid: XGrid) -> Self {
        let z = vec![0.0; xgrid.len()];
        Self { xgrid, u: z.clone(), gamma: z.clone(), gamma_x: z, mu: EnergyMeasure::zero(xgrid) }
    }

    pub fn validate(&self) -> Result<()> {
        let m = self.xgrid.len();
        for (name, f) in [("u", &self.u), ("gamma", &self.gamma), ("gamma_x", &self.gamma_x)] {
            if f.len() != m {
                return Err(Error::InvalidState(format!("{name} length differs from grid")));
            }
            if f.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidState(format!("{name} has non-finite samples")));
            }
        }
        if self.mu.xgrid != self.xgrid {
            return Err(Error::GridMismatch);
        }
        self.mu.validate()
    }
}
