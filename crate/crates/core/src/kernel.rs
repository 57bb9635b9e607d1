//! The nonlocal terms `P_k`, `Q_k`: convolutions with `e^{-|y(ξ) - y(η)|}` in
//! Lagrangian variables.
//!
//! Every integral is split at `ξ` and each side uses the trapezoid rule cell by
//! cell, with the kernel evaluated at both cell ends (its one-sided limit at
//! `η = ξ`). The fast path evaluates this with one left-to-right and one
//! right-to-left recurrence whose factors `e^{-(y_i - y_{i-1})}` lie in
//! `[0, 1]`; the direct path sums the same weights explicitly.

use crate::error::{Error, Result};
use crate::quad::l2;
use crate::state::LagrangianState;

#[derive(Debug, Clone, PartialEq)]
pub struct KernelBundle {
    pub p1: Vec<f64>,
    pub p2: Vec<f64>,
    pub p3: Vec<f64>,
    pub q1: Vec<f64>,
    pub q2: Vec<f64>,
    pub q3: Vec<f64>,
}

impl KernelBundle {
    pub fn zeros(n: usize) -> Self {
        let z = vec![0.0; n];
        Self { p1: z.clone(), p2: z.clone(), p3: z.clone(), q1: z.clone(), q2: z.clone(), q3: z }
    }

    pub fn fields(&self) -> [&Vec<f64>; 6] {
        [&self.p1, &self.p2, &self.p3, &self.q1, &self.q2, &self.q3]
    }

    /// Largest relative sup-norm difference over the six fields.
    pub fn max_rel_diff(&self, other: &Self) -> f64 {
        self.fields()
            .iter()
            .zip(other.fields())
            .map(|(a, b)| {
                let scale = crate::quad::linf(b).max(f64::MIN_POSITIVE);
                crate::quad::linf_diff(a, b) / scale
            })
            .fold(0.0, f64::max)
    }
}

/// `f1 = U² nu - 2R² nu + delta`, `f2 = R beta`, `f3 = Γ beta`.
pub fn assemble_densities(x: &LagrangianState) -> [Vec<f64>; 3] {
    let n = x.len();
    let mut f1 = vec![0.0; n];
    let mut f2 = vec![0.0; n];
    let mut f3 = vec![0.0; n];
    for i in 0..n {
        let (u, r, nu) = (x.u[i], x.r[i], x.nu[i]);
        f1[i] = u * u * nu - 2.0 * r * r * nu + x.delta[i];
        f2[i] = r * x.beta[i];
        f3[i] = x.gamma[i] * x.beta[i];
    }
    [f1, f2, f3]
}

/// Tolerated backwards step of `y` before it counts as a monotonicity error.
pub const MONOTONE_TOL: f64 = 1e-6;

/// Increments `y_i - y_{i-1}` (entry 0 is zero), clamped at zero.
fn increments(y: &[f64]) -> Result<Vec<f64>> {
    let mut d = vec![0.0; y.len()];
    for i in 1..y.len() {
        let dy = y[i] - y[i - 1];
        if dy < -MONOTONE_TOL || !dy.is_finite() {
            return Err(Error::NonMonotone { index: i, drop: -dy });
        }
        d[i] = dy.max(0.0);
    }
    Ok(d)
}

/// Left and right partial integrals `A`, `B` for each density.
fn sweeps<const K: usize>(decay: &[f64], f: [&[f64]; K], step: f64) -> ([Vec<f64>; K], [Vec<f64>; K]) {
    let n = decay.len();
    let hh = 0.5 * step;
    let mut a: [Vec<f64>; K] = std::array::from_fn(|_| vec![0.0; n]);
    let mut b: [Vec<f64>; K] = std::array::from_fn(|_| vec![0.0; n]);
    for i in 1..n {
        let e = decay[i];
        for k in 0..K {
            a[k][i] = e * (a[k][i - 1] + hh * f[k][i - 1]) + hh * f[k][i];
        }
    }
    for i in (0..n - 1).rev() {
        let e = decay[i + 1];
        for k in 0..K {
            b[k][i] = e * (b[k][i + 1] + hh * f[k][i + 1]) + hh * f[k][i];
        }
    }
    (a, b)
}

/// `coeff ∫ K(ξ, η) f(η) dη` with `K = e^{-|y(ξ) - y(η)|}` (unsigned) or
/// `-sgn(ξ - η) e^{-|y(ξ) - y(η)|}` (signed), by the two-pass recurrence.
pub fn convolve_exp(y: &[f64], f: &[f64], step: f64, coeff: f64, signed: bool) -> Result<Vec<f64>> {
    let d = increments(y)?;
    let decay: Vec<f64> = d.iter().map(|v| (-v).exp()).collect();
    let ([a], [b]) = sweeps(&decay, [f], step);
    Ok(combine(&a, &b, coeff, signed))
}

fn combine(a: &[f64], b: &[f64], coeff: f64, signed: bool) -> Vec<f64> {
    a.iter()
        .zip(b)
        .map(|(l, r)| if signed { coeff * (r - l) } else { coeff * (l + r) })
        .collect()
}

/// Same quadrature as [`convolve_exp`], summed explicitly in `O(n²)`.
pub fn convolve_exp_direct(y: &[f64], f: &[f64], step: f64, coeff: f64, signed: bool) -> Result<Vec<f64>> {
    increments(y)?;
    let n = y.len();
    let hh = 0.5 * step;
    let mut out = vec![0.0; n];
    for i in 0..n {
        let mut left = 0.0;
        let mut right = 0.0;
        for k in 0..n {
            let w = (-(y[i] - y[k]).abs()).exp() * f[k];
            if k <= i && i > 0 {
                left += if k == 0 || k == i { hh * w } else { step * w };
            }
            if k >= i && i < n - 1 {
                right += if k == i || k == n - 1 { hh * w } else { step * w };
            }
        }
        out[i] = if signed { coeff * (right - left) } else { coeff * (left + right) };
    }
    Ok(out)
}

/// All six nonlocal fields with shared decay factors.
pub fn compute_pq(x: &LagrangianState) -> Result<KernelBundle> {
    let decay: Vec<f64> = increments(&x.y())?.iter().map(|v| (-v).exp()).collect();
    let [f1, f2, f3] = assemble_densities(x);
    let ([a1, a2, a3], [b1, b2, b3]) = sweeps(&decay, [&f1, &f2, &f3], x.grid.step());
    Ok(KernelBundle {
        p1: combine(&a1, &b1, 0.25, false),
        q1: combine(&a1, &b1, 0.25, true),
        p2: combine(&a2, &b2, 0.5, false),
        q2: combine(&a2, &b2, 0.5, true),
        p3: combine(&a3, &b3, 0.5, false),
        q3: combine(&a3, &b3, 0.5, true),
    })
}

/// Reference `O(n²)` evaluation of [`compute_pq`].
pub fn compute_pq_direct(x: &LagrangianState) -> Result<KernelBundle> {
    let y = x.y();
    let s = x.grid.step();
    let [f1, f2, f3] = assemble_densities(x);
    Ok(KernelBundle {
        p1: convolve_exp_direct(&y, &f1, s, 0.25, false)?,
        q1: convolve_exp_direct(&y, &f1, s, 0.25, true)?,
        p2: convolve_exp_direct(&y, &f2, s, 0.5, false)?,
        q2: convolve_exp_direct(&y, &f2, s, 0.5, true)?,
        p3: convolve_exp_direct(&y, &f3, s, 0.5, false)?,
        q3: convolve_exp_direct(&y, &f3, s, 0.5, true)?,
    })
}

/// Residuals of `P_{k,ξ} = Q_k nu` and `Q_{k,ξ} = -c_k f_k + P_k nu`
/// (`c_1 = 1/2`, `c_2 = c_3 = 1`) with centered differences at interior nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityResiduals {
    /// Sup norm over interior nodes, for `P1, P2, P3`.
    pub p_max: [f64; 3],
    pub q_max: [f64; 3],
    /// Discrete L² norm over interior nodes.
    pub p_l2: [f64; 3],
    pub q_l2: [f64; 3],
}

impl IdentityResiduals {
    pub fn max(&self) -> f64 {
        self.p_max.iter().chain(&self.q_max).fold(0.0, |m, v| m.max(*v))
    }

    pub fn max_l2(&self) -> f64 {
        self.p_l2.iter().chain(&self.q_l2).fold(0.0, |m, v| m.max(*v))
    }
}

pub fn check_derivative_identities(x: &LagrangianState, b: &KernelBundle) -> IdentityResiduals {
    let n = x.len();
    let s = x.grid.step();
    let f = assemble_densities(x);
    let ps = [&b.p1, &b.p2, &b.p3];
    let qs = [&b.q1, &b.q2, &b.q3];
    let c = [0.5, 1.0, 1.0];
    let mut out = IdentityResiduals { p_max: [0.0; 3], q_max: [0.0; 3], p_l2: [0.0; 3], q_l2: [0.0; 3] };
    for k in 0..3 {
        let mut rp = vec![0.0; n - 2];
        let mut rq = vec![0.0; n - 2];
        for i in 1..n - 1 {
            let dp = (ps[k][i + 1] - ps[k][i - 1]) / (2.0 * s);
            let dq = (qs[k][i + 1] - qs[k][i - 1]) / (2.0 * s);
            rp[i - 1] = dp - qs[k][i] * x.nu[i];
            rq[i - 1] = dq - (-c[k] * f[k][i] + ps[k][i] * x.nu[i]);
        }
        out.p_max[k] = crate::quad::linf(&rp);
        out.q_max[k] = crate::quad::linf(&rq);
        out.p_l2[k] = l2(&rp, s);
        out.q_l2[k] = l2(&rq, s);
    }
    out
}

/// `R(X) = e^ζ ((U² - 2R²) nu + delta)`.
pub fn lagrangian_source(x: &LagrangianState) -> Vec<f64> {
    (0..x.len())
        .map(|i| x.zeta[i].exp() * ((x.u[i].powi(2) - 2.0 * x.r[i].powi(2)) * x.nu[i] + x.delta[i]))
        .collect()
}

/// `C(M) = (1 + 7M + 12M² + 3M³) e^M`, the Lipschitz constant of
/// [`lagrangian_source`] on the ball of radius `M`.
pub fn source_lipschitz_constant(m: f64) -> f64 {
    (1.0 + 7.0 * m + 12.0 * m * m + 3.0 * m * m * m) * m.exp()
}
