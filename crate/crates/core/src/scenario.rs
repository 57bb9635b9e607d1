//! Standard initial data.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::eulerian::{Atom, EnergyMeasure, EulerianTriple};
use crate::grid::{XGrid, XiGrid};
use crate::profile::{AnalyticProfile, EulerianProfile, Field};

/// Left end of the default label grid.
pub const DEFAULT_XI_MIN: f64 = -40.0;
/// Right end of the default label grid before adding `μ(ℝ) + margin`.
pub const DEFAULT_XI_RIGHT: f64 = 40.0;
pub const DEFAULT_MARGIN: f64 = 5.0;
pub const DEFAULT_N: usize = 4096;
pub const DEFAULT_DT: f64 = 1e-3;

/// Tail length beyond which exponentially decaying data is cut off.
const TAIL: f64 = 60.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scenario {
    Zero,
    /// `u = c e^{-|x - x0|}`, `γ = 0`.
    Peakon { c: f64, x0: f64 },
    /// `u = c (e^{-|x + a|} - e^{-|x - a|})`, `γ = 0`.
    PeakonAntipeakon { c: f64, a: f64 },
    /// `u = amp_u g(x)`, `γ = amp_gamma g(x)` with `g = exp(-((x - center)/width)^2)`.
    Gaussian { amp_u: f64, amp_gamma: f64, width: f64, center: f64 },
    /// Zero fields, a single atom.
    Atom { mass: f64, location: f64 },
}

fn sgn(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

fn zero_field() -> Field {
    Arc::new(|_| 0.0)
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Scenario::Zero => true,
            Scenario::Peakon { c, x0 } => c.is_finite() && x0.is_finite(),
            Scenario::PeakonAntipeakon { c, a } => c.is_finite() && a.is_finite() && a >= 0.0,
            Scenario::Gaussian { amp_u, amp_gamma, width, center } => {
                amp_u.is_finite() && amp_gamma.is_finite() && width > 0.0 && center.is_finite()
            }
            Scenario::Atom { mass, location } => mass > 0.0 && location.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Domain(format!("invalid scenario parameters {self:?}")))
        }
    }

    /// Analytic profile of the initial data.
    pub fn profile(&self) -> Result<AnalyticProfile> {
        self.validate()?;
        match *self {
            Scenario::Zero => {
                AnalyticProfile::new(zero_field(), zero_field(), zero_field(), zero_field(), (-1.0, 1.0), &[], vec![])
            }
            Scenario::Peakon { c, x0 } => AnalyticProfile::new(
                Arc::new(move |x| c * (-(x - x0).abs()).exp()),
                Arc::new(move |x| -c * sgn(x - x0) * (-(x - x0).abs()).exp()),
                zero_field(),
                zero_field(),
                (x0 - TAIL, x0 + TAIL),
                &[x0],
                vec![],
            ),
            Scenario::PeakonAntipeakon { c, a } => AnalyticProfile::new(
                Arc::new(move |x| c * ((-(x + a).abs()).exp() - (-(x - a).abs()).exp())),
                Arc::new(move |x| {
                    c * (-sgn(x + a) * (-(x + a).abs()).exp() + sgn(x - a) * (-(x - a).abs()).exp())
                }),
                zero_field(),
                zero_field(),
                (-a - TAIL, a + TAIL),
                &[-a, a],
                vec![],
            ),
            Scenario::Gaussian { amp_u, amp_gamma, width, center } => {
                let g = move |x: f64| (-((x - center) / width).powi(2)).exp();
                let dg = move |x: f64| -2.0 * (x - center) / (width * width) * g(x);
                AnalyticProfile::new(
                    Arc::new(move |x| amp_u * g(x)),
                    Arc::new(move |x| amp_u * dg(x)),
                    Arc::new(move |x| amp_gamma * g(x)),
                    Arc::new(move |x| amp_gamma * dg(x)),
                    (center - 12.0 * width, center + 12.0 * width),
                    &[],
                    vec![],
                )
            }
            Scenario::Atom { mass, location } => AnalyticProfile::new(
                zero_field(),
                zero_field(),
                zero_field(),
                zero_field(),
                (location - 1.0, location + 1.0),
                &[],
                vec![Atom { location, mass }],
            ),
        }
    }

    /// The profile with `ε·x·e^{−x²}` added to `u`; used for stability
    /// experiments.
    pub fn perturbed(&self, eps: f64) -> Result<AnalyticProfile> {
        let base = Arc::new(self.profile()?);
        let (lo, hi) = base.extent();
        let (lo, hi) = (lo.min(-12.0), hi.max(12.0));
        let bump = move |x: f64| x * (-x * x).exp();
        let dbump = move |x: f64| (1.0 - 2.0 * x * x) * (-x * x).exp();
        let (b, bx, g, gx) = (base.clone(), base.clone(), base.clone(), base.clone());
        AnalyticProfile::new(
            Arc::new(move |x| b.u(x) + eps * bump(x)),
            Arc::new(move |x| bx.u_x(x) + eps * dbump(x)),
            Arc::new(move |x| g.gamma(x)),
            Arc::new(move |x| gx.gamma_x(x)),
            (lo, hi),
            base.kinks(),
            base.atoms().to_vec(),
        )
    }

    /// Labels at which the initial Lagrangian data has a kink.
    pub fn kink_labels(&self) -> Result<Vec<f64>> {
        let p = self.profile()?;
        Ok(p.kinks().iter().map(|&k| k + p.cumulative(k)).collect())
    }

    /// `μ(ℝ)` of the initial data.
    pub fn total_energy(&self) -> Result<f64> {
        Ok(self.profile()?.total_mass())
    }

    /// Samples of the initial data on `xgrid`; the density is the exact
    /// pointwise energy density.
    pub fn eulerian(&self, xgrid: XGrid) -> Result<EulerianTriple> {
        let p = self.profile()?;
        let xs = xgrid.points();
        let map = |f: &dyn Fn(f64) -> f64| xs.iter().map(|&x| f(x)).collect::<Vec<_>>();
        let atoms = p.atoms().to_vec();
        Ok(EulerianTriple {
            xgrid,
            u: map(&|x| p.u(x)),
            gamma: map(&|x| p.gamma(x)),
            gamma_x: map(&|x| p.gamma_x(x)),
            mu: EnergyMeasure { xgrid, density: map(&|x| p.density(x)), atoms },
        })
    }

    /// Label grid `[-40, 40 + μ(ℝ) + 5]` with `n` samples, nudged by
    /// [`Self::align_grid`].
    pub fn default_xi_grid(&self, n: usize) -> Result<XiGrid> {
        let g = XiGrid::new(DEFAULT_XI_MIN, DEFAULT_XI_RIGHT + self.total_energy()? + DEFAULT_MARGIN, n)?;
        self.align_grid(g)
    }

    /// Moves the grid so that every kink label falls on a cell midpoint,
    /// keeping `n`. With one kink the grid is shifted left by less than one
    /// cell; with two the spacing is also adjusted (by at most half a cell
    /// over the distance between the kinks).
    pub fn align_grid(&self, g: XiGrid) -> Result<XiGrid> {
        let kinks = self.kink_labels()?;
        let n = g.len();
        let mut h = g.step();
        if let [a, b] = kinks[..] {
            let cells = ((b - a) / h).round().max(1.0);
            h = (b - a) / cells;
        }
        let Some(&k) = kinks.first() else {
            return Ok(g);
        };
        let r = ((k - g.min()) / h - 0.5).rem_euclid(1.0);
        let shift = if r == 0.0 { 0.0 } else { (1.0 - r) * h };
        XiGrid::with_step(g.min() - shift, h, n)
    }
}

/// Default output grid `[-20, 20]` with 2001 samples.
pub fn default_x_grid() -> XGrid {
    XGrid::new(-20.0, 20.0, 2001).expect("valid constant grid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn peakon_energy_is_two_c_squared() {
        for c in [0.5, 1.0, 2.0] {
            let e = Scenario::Peakon { c, x0: 0.3 }.total_energy().unwrap();
            assert!((e - 2.0 * c * c).abs() < 1e-12, "{e}");
        }
    }

    #[test]
    fn peakon_antipeakon_symmetry() {
        let xg = XGrid::new(-10.0, 10.0, 401).unwrap();
        let e = Scenario::PeakonAntipeakon { c: 1.0, a: 2.0 }.eulerian(xg).unwrap();
        let m = e.u.len();
        for i in 0..m {
            assert!((e.u[i] + e.u[m - 1 - i]).abs() < 1e-14);
            assert!((e.mu.density[i] - e.mu.density[m - 1 - i]).abs() < 1e-14);
        }
        // closed form 4c^2 (1 - e^{-2a}) for the pair
        let tot = Scenario::PeakonAntipeakon { c: 1.0, a: 2.0 }.total_energy().unwrap();
        assert!((tot - 4.0 * (1.0 - (-4.0f64).exp())).abs() < 1e-12);
    }

    #[test]
    fn gaussian_energy_matches_closed_form() {
        let (a, b, w) = (0.8, 0.3, 1.5);
        let e = Scenario::Gaussian { amp_u: a, amp_gamma: b, width: w, center: 1.0 }.total_energy().unwrap();
        // ∫ g^2 = w sqrt(π/2), ∫ g'^2 = sqrt(π/2) / w
        let s = (std::f64::consts::PI / 2.0).sqrt();
        let expect = (a * a + b * b) * (w * s + s / w);
        assert!((e - expect).abs() < 1e-12, "{e} vs {expect}");
    }

    #[test]
    fn zero_scenario_is_zero() {
        let e = Scenario::Zero.eulerian(default_x_grid()).unwrap();
        assert!(e.u.iter().chain(&e.mu.density).all(|&v| v == 0.0));
        assert_eq!(e.mu.total_mass(), 0.0);
    }

    #[test]
    fn default_grids_put_kinks_mid_cell() {
        for sc in [Scenario::Peakon { c: 1.0, x0: 0.0 }, Scenario::PeakonAntipeakon { c: 1.0, a: 2.0 }] {
            let g = sc.default_xi_grid(4096).unwrap();
            assert!(g.min() <= DEFAULT_XI_MIN);
            for k in sc.kink_labels().unwrap() {
                let p = (k - g.min()) / g.step();
                assert!((p.fract() - 0.5).abs() < 1e-6, "{p}");
            }
        }
    }

    #[test]
    fn peakon_kink_label() {
        let k = Scenario::Peakon { c: 1.0, x0: 0.0 }.kink_labels().unwrap();
        assert!((k[0] - 1.0).abs() < 1e-12);
    }
}
