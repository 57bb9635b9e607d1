use crate::error::{Error, Result};
use crate::grid::XiGrid;
use crate::interp::{fd_slopes, hermite, hermite_slope, limit_monotone};
use crate::state::LagrangianState;
use crate::transform::FLAT_THRESHOLD;

/// Sampled increasing homeomorphism `f` of the label line.
///
/// Values and slopes at the grid nodes define a monotone cubic Hermite
/// interpolant; beyond the grid, `f - Id` is continued as a constant.
#[derive(Debug, Clone, PartialEq)]
pub struct Relabeling {
    grid: XiGrid,
    f: Vec<f64>,
    df: Vec<f64>,
}

/// Node-snapping tolerance in units of the grid spacing.
const SNAP: f64 = 1e-12;

impl Relabeling {
    pub fn identity(grid: XiGrid) -> Self {
        Self { grid, f: grid.points(), df: vec![1.0; grid.len()] }
    }

    /// Values and slopes supplied directly.
    pub fn from_parts(grid: XiGrid, f: Vec<f64>, mut df: Vec<f64>) -> Result<Self> {
        if f.len() != grid.len() || df.len() != grid.len() {
            return Err(Error::InvalidRelabeling("sample count differs from grid".into()));
        }
        if f.iter().chain(&df).any(|v| !v.is_finite()) {
            return Err(Error::InvalidRelabeling("non-finite samples".into()));
        }
        if let Some(i) = f.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::InvalidRelabeling(format!("not strictly increasing at index {i}")));
        }
        limit_monotone(&f, &mut df, grid.step());
        Ok(Self { grid, f, df })
    }

    /// Samples only; slopes by fourth-order differences.
    pub fn from_samples(grid: XiGrid, f: Vec<f64>) -> Result<Self> {
        let df = fd_slopes(&f, grid.step());
        Self::from_parts(grid, f, df)
    }

    /// Samples a closed-form map and its derivative.
    pub fn from_fn(grid: XiGrid, f: impl Fn(f64) -> f64, df: impl Fn(f64) -> f64) -> Result<Self> {
        let xs = grid.points();
        Self::from_parts(grid, xs.iter().map(|&s| f(s)).collect(), xs.iter().map(|&s| df(s)).collect())
    }

    pub fn grid(&self) -> XiGrid {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.f
    }

    pub fn slopes(&self) -> &[f64] {
        &self.df
    }

    fn cell(&self, s: f64) -> Option<(usize, f64)> {
        self.grid.locate(s)
    }

    pub fn eval(&self, s: f64) -> f64 {
        let n = self.f.len();
        match self.cell(s) {
            Some((j, t)) => hermite(self.f[j], self.f[j + 1], self.df[j], self.df[j + 1], self.grid.step(), t),
            None if s < self.grid.min() => s + (self.f[0] - self.grid.min()),
            None => s + (self.f[n - 1] - self.grid.max()),
        }
    }

    pub fn slope(&self, s: f64) -> f64 {
        match self.cell(s) {
            Some((j, t)) => {
                hermite_slope(self.f[j], self.f[j + 1], self.df[j], self.df[j + 1], self.grid.step(), t)
            }
            None => 1.0,
        }
    }

    /// Solves `f(s) = target`.
    pub fn inverse_at(&self, target: f64) -> f64 {
        let n = self.f.len();
        if target < self.f[0] {
            return target - (self.f[0] - self.grid.min());
        }
        if target > self.f[n - 1] {
            return target - (self.f[n - 1] - self.grid.max());
        }
        let j = self.f.partition_point(|&v| v <= target).saturating_sub(1).min(n - 2);
        if self.f[j] == target {
            return self.grid.point(j);
        }
        if self.f[j + 1] == target {
            return self.grid.point(j + 1);
        }
        let h = self.grid.step();
        let (f0, f1, d0, d1) = (self.f[j], self.f[j + 1], self.df[j], self.df[j + 1]);
        let (mut a, mut b) = (0.0, 1.0);
        let mut t = (target - f0) / (f1 - f0);
        for _ in 0..100 {
            let v = hermite(f0, f1, d0, d1, h, t) - target;
            if v == 0.0 {
                break;
            }
            if v < 0.0 {
                a = t;
            } else {
                b = t;
            }
            let dv = hermite_slope(f0, f1, d0, d1, h, t) * h;
            let mut next = if dv > 0.0 { t - v / dv } else { f64::NAN };
            if !(next > a && next < b) {
                next = 0.5 * (a + b);
            }
            if (next - t).abs() <= 1e-16 || b - a <= 1e-16 {
                t = next;
                break;
            }
            t = next;
        }
        self.grid.point(j) + t * h
    }

    /// `f^{-1}` sampled on the same grid.
    pub fn invert(&self) -> Result<Relabeling> {
        let xs = self.grid.points();
        let g: Vec<f64> = xs.iter().map(|&s| self.inverse_at(s)).collect();
        let mut dg: Vec<f64> = g.iter().map(|&s| 1.0 / self.slope(s)).collect();
        if dg.iter().any(|v| !v.is_finite()) {
            let fd = fd_slopes(&g, self.grid.step());
            for (d, f) in dg.iter_mut().zip(fd) {
                if !d.is_finite() {
                    *d = f;
                }
            }
        }
        Self::from_parts(self.grid, g, dg)
    }

    /// `self ∘ g`.
    pub fn compose(&self, g: &Relabeling) -> Result<Relabeling> {
        if self.grid != g.grid {
            return Err(Error::GridMismatch);
        }
        let v = g.f.iter().map(|&s| self.eval(s)).collect();
        let d = g.f.iter().zip(&g.df).map(|(&s, &dg)| self.slope(s) * dg).collect();
        Self::from_parts(self.grid, v, d)
    }

    /// `‖f - Id‖_{W^{1,∞}} + ‖f^{-1} - Id‖_{W^{1,∞}}` over the samples; the
    /// smallest α with `f ∈ G_α` on the grid.
    pub fn alpha_bound(&self) -> Result<f64> {
        let w1 = |r: &Relabeling| {
            let xs = r.grid.points();
            let a = r.f.iter().zip(&xs).fold(0.0_f64, |m, (f, x)| m.max((f - x).abs()));
            let b = r.df.iter().fold(0.0_f64, |m, d| m.max((d - 1.0).abs()));
            a + b
        };
        Ok(w1(self) + w1(&self.invert()?))
    }
}

/// Snaps `(j, t)` to a node when `t` is within rounding of 0 or 1.
fn snap(j: usize, t: f64) -> (usize, f64) {
    if t < SNAP {
        (j, 0.0)
    } else if t > 1.0 - SNAP {
        (j + 1, 0.0)
    } else {
        (j, t)
    }
}

/// `X • f`: fields composed with `f`, derivative fields multiplied by `f_ξ`.
///
/// `y, U, Γ, H` are interpolated with their evolved derivatives as Hermite
/// slopes; `R`, `nu` and `beta` with fourth-order difference slopes. Between
/// nodes `kappa = R nu` and, where `nu > 0`,
/// `delta = nu (U² + Γ² + R²) + beta²/nu`, so the invariant-set identities
/// hold at every sample.
/// Beyond the grid `zeta` and `H` are continued as constants, `U, Γ, R` as zero.
pub fn apply_relabel(x: &LagrangianState, f: &Relabeling) -> Result<LagrangianState> {
    if x.grid != f.grid {
        return Err(Error::GridMismatch);
    }
    x.validate()?;
    let grid = x.grid;
    let n = grid.len();
    let h = grid.step();
    let y = x.y();
    let d_r = fd_slopes(&x.r, h);
    let d_nu = fd_slopes(&x.nu, h);
    let d_beta = fd_slopes(&x.beta, h);
        let d_delta = fd_slopes(&x.delta, h);
    let mut out = LagrangianState::zeros(grid);
    for i in 0..n {
        let s = f.f[i];
        let fs = f.df[i];
        let xi = grid.point(i);
        let Some((j0, t0)) = grid.locate(s) else {
            let end = if s < grid.min() { 0 } else { n - 1 };
            let (zeta_end, h_end) = (x.zeta[end], x.h[end]);
            out.zeta[i] = s + zeta_end - xi;
            out.h[i] = h_end;
            out.nu[i] = fs;
            continue;
        };
        let (j, t) = snap(j0, t0);
        if t == 0.0 {
            out.zeta[i] = y[j] - xi;
            out.u[i] = x.u[j];
            out.gamma[i] = x.gamma[j];
            out.r[i] = x.r[j];
            out.h[i] = x.h[j];
            out.nu[i] = x.nu[j] * fs;
            out.beta[i] = x.beta[j] * fs;
            out.kappa[i] = x.kappa[j] * fs;
            out.delta[i] = x.delta[j] * fs;
        } else {
            let hm = |v: &[f64], d: &[f64]| hermite(v[j], v[j + 1], d[j], d[j + 1], h, t);
            out.zeta[i] = hm(&y, &x.nu) - xi;
            out.u[i] = hm(&x.u, &x.beta);
            out.gamma[i] = hm(&x.gamma, &x.kappa);
            out.h[i] = hm(&x.h, &x.delta);
            out.r[i] = hm(&x.r, &d_r);
            let nu = (hm(&x.nu, &d_nu) * fs).max(0.0);
            let (u, g, r) = (out.u[i], out.gamma[i], out.r[i]);
            out.nu[i] = nu;
            out.beta[i] = hm(&x.beta, &d_beta) * fs;
            // kappa and delta follow from the other fields wherever nu > 0
            out.kappa[i] = r * nu;
            out.delta[i] = if nu > FLAT_THRESHOLD {
                nu * (u * u + g * g + r * r) + out.beta[i] * out.beta[i] / nu
            } else {
                hm(&x.delta, &d_delta) * fs
            };
        }
        out.nu[i] = out.nu[i].max(0.0);
        out.delta[i] = out.delta[i].max(0.0);
    }
    Ok(out)
}

/// `Π(X) = X • (y + H)^{-1}`, the representative with `y + H = Id`.
pub fn project_pi(x: &LagrangianState) -> Result<LagrangianState> {
    x.validate()?;
    let y = x.y();
    let g: Vec<f64> = y.iter().zip(&x.h).map(|(a, b)| a + b).collect();
    if let Some(i) = g.windows(2).position(|w| w[1] <= w[0]) {
        return Err(Error::InvalidState(format!("y + H is not strictly increasing at index {i}")));
    }
    let dg: Vec<f64> = x.nu.iter().zip(&x.delta).map(|(a, b)| a + b).collect();
    let g = Relabeling::from_parts(x.grid, g, dg).map_err(|e| Error::InvalidState(e.to_string()))?;
    apply_relabel(x, &g.invert()?)
}
