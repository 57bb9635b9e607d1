use crate::error::{Error, Result};
use crate::grid::XiGrid;
use crate::quad::{l2, linf, trapz};

/// Solver state in Lagrangian variables.
///
/// `zeta = y - xi`, `u = u(y)`, `gamma = γ(y)`, `r = γ_x(y)`, `h` is the
/// cumulative energy. The derivative fields `nu = y_ξ`, `beta = U_ξ`,
/// `kappa = Γ_ξ` and `delta = H_ξ` are evolved independently of the primary
/// arrays and are never recomputed by differencing them.
#[derive(Debug, Clone, PartialEq)]
pub struct LagrangianState {
    pub grid: XiGrid,
    pub zeta: Vec<f64>,
    pub u: Vec<f64>,
    pub gamma: Vec<f64>,
    pub r: Vec<f64>,
    pub h: Vec<f64>,
    pub nu: Vec<f64>,
    pub beta: Vec<f64>,
    pub kappa: Vec<f64>,
    pub delta: Vec<f64>,
}

/// Residuals of the invariant-set conditions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GReport {
    pub min_nu: f64,
    pub min_delta: f64,
    /// `max |R nu - kappa|`
    pub res_218: f64,
    /// `max |nu delta - nu^2 (U^2 + Γ^2 + R^2) - beta^2|`
    pub res_219: f64,
    pub tol: f64,
}

impl GReport {
    pub fn positivity_ok(&self) -> bool {
        self.min_nu >= -self.tol && self.min_delta >= -self.tol
    }

    pub fn res_218_ok(&self) -> bool {
        self.res_218 <= self.tol
    }

    pub fn res_219_ok(&self) -> bool {
        self.res_219 <= self.tol
    }

    pub fn passes(&self) -> bool {
        self.positivity_ok() && self.res_218_ok() && self.res_219_ok()
    }
}

impl LagrangianState {
    /// The zero state: `y = xi`, everything else vanishing.
    pub fn zeros(grid: XiGrid) -> Self {
        let n = grid.len();
        let z = vec![0.0; n];
        Self {
            grid,
            zeta: z.clone(),
            u: z.clone(),
            gamma: z.clone(),
            r: z.clone(),
            h: z.clone(),
            nu: vec![1.0; n],
            beta: z.clone(),
            kappa: z.clone(),
            delta: z,
        }
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn fields(&self) -> [&Vec<f64>; 9] {
        [
            &self.zeta, &self.u, &self.gamma, &self.r, &self.h, &self.nu, &self.beta, &self.kappa,
            &self.delta,
        ]
    }

    pub fn fields_mut(&mut self) -> [&mut Vec<f64>; 9] {
        [
            &mut self.zeta,
            &mut self.u,
            &mut self.gamma,
            &mut self.r,
            &mut self.h,
            &mut self.nu,
            &mut self.beta,
            &mut self.kappa,
            &mut self.delta,
        ]
    }

    pub const FIELD_NAMES: [&'static str; 9] =
        ["zeta", "U", "Gamma", "R", "H", "nu", "beta", "kappa", "delta"];

    /// Checks array lengths and finiteness.
    pub fn validate(&self) -> Result<()> {
        let n = self.grid.len();
        for (name, f) in Self::FIELD_NAMES.iter().zip(self.fields()) {
            if f.len() != n {
                return Err(Error::InvalidState(format!("{name} has {} samples, grid has {n}", f.len())));
            }
            if let Some(i) = f.iter().position(|v| !v.is_finite()) {
                return Err(Error::InvalidState(format!("{name}[{i}] is not finite")));
            }
        }
        Ok(())
    }

    /// Characteristics `y = xi + zeta`.
    pub fn y(&self) -> Vec<f64> {
        let (a, h, n) = (self.grid.min(), self.grid.step(), self.len());
        let mut y: Vec<f64> = self.zeta.iter().enumerate().map(|(i, z)| a + i as f64 * h + z).collect();
        if let Some(last) = y.last_mut() {
            *last = self.grid.max() + self.zeta[n - 1];
        }
        y
    }

    pub fn y_at(&self, i: usize) -> f64 {
        self.grid.point(i) + self.zeta[i]
    }

    /// `H` at the right end of the grid.
    pub fn total_energy(&self) -> f64 {
        self.h[self.len() - 1]
    }

    pub fn max_abs_u(&self) -> f64 {
        linf(&self.u)
    }

    /// The E-norm. `H^1` parts use the stored derivative fields; the
    /// `zeta` derivative is `nu - 1`.
    pub fn e_norm(&self) -> Result<f64> {
        self.validate()?;
        let s = self.grid.step();
        let alpha: Vec<f64> = self.nu.iter().map(|v| v - 1.0).collect();
        let h1 = |a: &[f64], da: &[f64]| (l2(a, s).powi(2) + l2(da, s).powi(2)).sqrt();
        Ok(linf(&self.zeta)
            + l2(&alpha, s)
            + h1(&self.u, &self.beta)
            + h1(&self.gamma, &self.kappa)
            + linf(&self.r)
            + l2(&self.r, s)
            + linf(&self.h)
            + l2(&self.delta, s))
    }

    /// `‖self - other‖_E`.
    pub fn e_distance(&self, other: &Self) -> Result<f64> {
        self.sub(other)?.e_norm()
    }

    /// Residuals of the invariant-set conditions, judged at `tol`.
    pub fn check_g_membership(&self, tol: f64) -> GReport {
        let mut rep = GReport {
            min_nu: f64::INFINITY,
            min_delta: f64::INFINITY,
            res_218: 0.0,
            res_219: 0.0,
            tol,
        };
        for i in 0..self.len() {
            let (nu, d, r) = (self.nu[i], self.delta[i], self.r[i]);
            let (u, g, b) = (self.u[i], self.gamma[i], self.beta[i]);
            rep.min_nu = rep.min_nu.min(nu);
            rep.min_delta = rep.min_delta.min(d);
            rep.res_218 = rep.res_218.max((r * nu - self.kappa[i]).abs());
            let r219 = nu * d - nu * nu * (u * u + g * g + r * r) - b * b;
            rep.res_219 = rep.res_219.max(r219.abs());
        }
        rep
    }

    /// Trapezoid integral of `delta` plus `H` at the left end; equals
    /// [`Self::total_energy`] up to quadrature error.
    pub fn integrated_energy(&self) -> f64 {
        trapz(&self.delta, self.grid.step()) + self.h[0]
    }

    fn combine(&self, other: &Self, a: f64, b: f64) -> Result<Self> {
        if !self.grid.same_as(&other.grid) {
            return Err(Error::GridMismatch);
        }
        let mut out = self.clone();
        for (k, (dst, src)) in out.fields_mut().into_iter().zip(other.fields()).enumerate() {
            // nu enters the linear structure through zeta_xi = nu - 1.
            let shift = if k == 5 { 1.0 } else { 0.0 };
            for (d, s) in dst.iter_mut().zip(src.iter()) {
                *d = shift + a * (*d - shift) + b * (s - shift);
            }
        }
        Ok(out)
    }

    /// Componentwise sum in the linear structure of `E` (`nu - 1` adds).
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.combine(other, 1.0, 1.0)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.combine(other, 1.0, -1.0)
    }

    /// `(1 - s) self + s other`.
    pub fn lerp(&self, other: &Self, s: f64) -> Result<Self> {
        self.combine(other, 1.0 - s, s)
    }

    pub fn scale(&self, c: f64) -> Self {
        self.combine(self, c, 0.0).expect("same grid")
    }
}
