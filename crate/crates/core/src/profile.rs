//! Initial data as functions of x, the input of the Eulerian-to-Lagrangian map.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::eulerian::{Atom, EulerianTriple};

/// Eulerian data `(u, γ, μ)` that can be evaluated anywhere.
pub trait EulerianProfile {
    fn u(&self, x: f64) -> f64;
    fn u_x(&self, x: f64) -> f64;
    fn gamma(&self, x: f64) -> f64;
    fn gamma_x(&self, x: f64) -> f64;
    /// Density of the absolutely continuous part of μ.
    fn density(&self, x: f64) -> f64;
    /// `μ((-∞, x))`; an atom sitting at `x` is not included.
    fn cumulative(&self, x: f64) -> f64;
    fn atoms(&self) -> &[Atom];
    fn total_mass(&self) -> f64;
}

pub type Field = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

// 5-point Gauss–Legendre on [-1, 1].
const GL_X: [f64; 5] = [
    0.0,
    -0.538_469_310_105_683_1,
    0.538_469_310_105_683_1,
    -0.906_179_845_938_664,
    0.906_179_845_938_664,
];
const GL_W: [f64; 5] = [
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_5,
    0.478_628_670_499_366_5,
    0.236_926_885_056_189_1,
    0.236_926_885_056_189_1,
];

fn gauss5(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let (c, r) = (0.5 * (a + b), 0.5 * (b - a));
    r * GL_X.iter().zip(GL_W).map(|(x, w)| w * f(c + r * x)).sum::<f64>()
}

/// Profile given by closed-form fields. The energy density is
/// `u² + u_x² + γ² + γ_x²`, integrated by Gauss–Legendre panels that never
/// straddle a declared kink. Outside `extent` the density is taken as zero.
#[derive(Clone)]
pub struct AnalyticProfile {
    u: Field,
    u_x: Field,
    gamma: Field,
    gamma_x: Field,
    atoms: Vec<Atom>,
    lo: f64,
    hi: f64,
    edges: Vec<f64>,
    cum: Vec<f64>,
    kinks: Vec<f64>,
}

impl std::fmt::Debug for AnalyticProfile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("AnalyticProfile")
            .field("extent", &(self.lo, self.hi))
            .field("kinks", &self.kinks)
            .field("atoms", &self.atoms)
            .finish()
    }
}

const PANEL: f64 = 0.02;

impl AnalyticProfile {
    pub fn new(
        u: Field,
        u_x: Field,
        gamma: Field,
        gamma_x: Field,
        extent: (f64, f64),
        kinks: &[f64],
        mut atoms: Vec<Atom>,
    ) -> Result<Self> {
        let (lo, hi) = extent;
        if !(lo < hi) {
            return Err(Error::InvalidMeasure(format!("empty extent [{lo}, {hi}]")));
        }
        if let Some(a) = atoms.iter().find(|a| !(a.mass > 0.0 && a.location.is_finite())) {
            return Err(Error::InvalidMeasure(format!("bad atom {a:?}")));
        }
        atoms.sort_by(|a, b| a.location.total_cmp(&b.location));
        let mut breaks: Vec<f64> = kinks.iter().copied().filter(|k| *k > lo && *k < hi).collect();
        breaks.push(lo);
        breaks.push(hi);
        breaks.sort_by(f64::total_cmp);
        breaks.dedup();
        let mut edges = vec![lo];
        for w in breaks.windows(2) {
            let k = ((w[1] - w[0]) / PANEL).ceil().max(1.0) as usize;
            for i in 1..=k {
                edges.push(if i == k { w[1] } else { w[0] + (w[1] - w[0]) * i as f64 / k as f64 });
            }
        }
        let mut p = Self {
            u,
            u_x,
            gamma,
            gamma_x,
            atoms,
            lo,
            hi,
            edges: Vec::new(),
            cum: Vec::new(),
            kinks: kinks.to_vec(),
        };
        let mut cum = vec![0.0];
        for w in edges.windows(2) {
            let seg = gauss5(|x| p.density_raw(x), w[0], w[1]);
            if !(seg >= 0.0) {
                return Err(Error::InvalidMeasure("energy density is negative or not finite".into()));
            }
            cum.push(cum.last().unwrap() + seg);
        }
        p.edges = edges;
        p.cum = cum;
        Ok(p)
    }

    fn density_raw(&self, x: f64) -> f64 {
        let (u, ux, g, gx) = ((self.u)(x), (self.u_x)(x), (self.gamma)(x), (self.gamma_x)(x));
        u * u + ux * ux + g * g + gx * gx
    }

    fn ac_cumulative(&self, x: f64) -> f64 {
        if x <= self.lo {
            return 0.0;
        }
        if x >= self.hi {
            return *self.cum.last().unwrap();
        }
        let j = self.edges.partition_point(|&e| e <= x).saturating_sub(1);
        self.cum[j] + gauss5(|s| self.density_raw(s), self.edges[j], x)
    }

    pub fn kinks(&self) -> &[f64] {
        &self.kinks
    }

    pub fn extent(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }
}

impl EulerianProfile for AnalyticProfile {
    fn u(&self, x: f64) -> f64 {
        (self.u)(x)
    }
    fn u_x(&self, x: f64) -> f64 {
        (self.u_x)(x)
    }
    fn gamma(&self, x: f64) -> f64 {
        (self.gamma)(x)
    }
    fn gamma_x(&self, x: f64) -> f64 {
        (self.gamma_x)(x)
    }
    fn density(&self, x: f64) -> f64 {
        if x < self.lo || x > self.hi {
            0.0
        } else {
            self.density_raw(x)
        }
    }
    fn cumulative(&self, x: f64) -> f64 {
        let atoms: f64 = self.atoms.iter().filter(|a| a.location < x).map(|a| a.mass).sum();
        self.ac_cumulative(x) + atoms
    }
    fn atoms(&self) -> &[Atom] {
        &self.atoms
    }
    fn total_mass(&self) -> f64 {
        self.cum.last().unwrap() + self.atoms.iter().map(|a| a.mass).sum::<f64>()
    }
}

/// Profile read off grid samples: fields and density are piecewise linear,
/// `u_x` is the slope of the linear interpolant of `u` (averaged at nodes).
#[derive(Debug, Clone)]
pub struct SampledProfile {
    xs: Vec<f64>,
    u: Vec<f64>,
    u_x: Vec<f64>,
    gamma: Vec<f64>,
    gamma_x: Vec<f64>,
    density: Vec<f64>,
    cum: Vec<f64>,
    atoms: Vec<Atom>,
}

impl SampledProfile {
    pub fn new(e: &EulerianTriple) -> Result<Self> {
        e.validate()?;
        let xs = e.xgrid.points();
        let s = e.xgrid.step();
        let m = xs.len();
        let slope: Vec<f64> = e.u.windows(2).map(|w| (w[1] - w[0]) / s).collect();
        let mut u_x = vec![0.0; m];
        u_x[0] = slope[0];
        u_x[m - 1] = slope[m - 2];
        for i in 1..m - 1 {
            u_x[i] = 0.5 * (slope[i - 1] + slope[i]);
        }
        let density = e.mu.density.clone();
        let cum = crate::quad::cumtrapz(&density, s);
        let mut atoms = e.mu.atoms.clone();
        atoms.sort_by(|a, b| a.location.total_cmp(&b.location));
        Ok(Self { xs, u: e.u.clone(), u_x, gamma: e.gamma.clone(), gamma_x: e.gamma_x.clone(), density, cum, atoms })
    }

    fn lin(&self, v: &[f64], x: f64) -> f64 {
        crate::interp::linear(&self.xs, v, x, 0.0)
    }

    pub fn x_range(&self) -> (f64, f64) {
        (self.xs[0], *self.xs.last().unwrap())
    }
}

impl EulerianProfile for SampledProfile {
    fn u(&self, x: f64) -> f64 {
        self.lin(&self.u, x)
    }
    fn u_x(&self, x: f64) -> f64 {
        let m = self.xs.len();
        if x < self.xs[0] || x > self.xs[m - 1] {
            return 0.0;
        }
        let j = crate::interp::locate_sorted(&self.xs, x);
        let t = (x - self.xs[j]) / (self.xs[j + 1] - self.xs[j]);
        // interior of a cell: exact slope of the interpolant
        if t > 0.0 && t < 1.0 {
            (self.u[j + 1] - self.u[j]) / (self.xs[j + 1] - self.xs[j])
        } else {
            self.lin(&self.u_x, x)
        }
    }
    fn gamma(&self, x: f64) -> f64 {
        self.lin(&self.gamma, x)
    }
    fn gamma_x(&self, x: f64) -> f64 {
        self.lin(&self.gamma_x, x)
    }
    fn density(&self, x: f64) -> f64 {
        self.lin(&self.density, x)
    }
    fn cumulative(&self, x: f64) -> f64 {
        let m = self.xs.len();
        let ac = if x <= self.xs[0] {
            0.0
        } else if x >= self.xs[m - 1] {
            self.cum[m - 1]
        } else {
            let j = crate::interp::locate_sorted(&self.xs, x);
            let d0 = self.density[j];
            let d1 = self.lin(&self.density, x);
            self.cum[j] + 0.5 * (x - self.xs[j]) * (d0 + d1)
        };
        ac + self.atoms.iter().filter(|a| a.location < x).map(|a| a.mass).sum::<f64>()
    }
    fn atoms(&self) -> &[Atom] {
        &self.atoms
    }
    fn total_mass(&self) -> f64 {
        self.cum[self.xs.len() - 1] + self.atoms.iter().map(|a| a.mass).sum::<f64>()
    }
}
