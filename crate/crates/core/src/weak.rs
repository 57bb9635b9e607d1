//! Weak-form diagnostics on the Eulerian side of a computed solution.

use crate::error::{Error, Result};
use crate::evolution::Trajectory;
use crate::grid::XGrid;
use crate::interp::{hermite, linear, locate_sorted};
use crate::kernel::{assemble_densities, compute_pq};
use crate::quad::{simpson_or_trapz, trapz};
use crate::state::LagrangianState;

/// `φ(t, x) = exp(−((t−t0)/σ_t)² − ((x−x0)/σ_x)²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianBump {
    pub t0: f64,
    pub x0: f64,
    pub sigma_t: f64,
    pub sigma_x: f64,
}

impl GaussianBump {
    pub fn value(&self, t: f64, x: f64) -> f64 {
        let a = (t - self.t0) / self.sigma_t;
        let b = (x - self.x0) / self.sigma_x;
        (-a * a - b * b).exp()
    }

    pub fn d_t(&self, t: f64, x: f64) -> f64 {
        -2.0 * (t - self.t0) / (self.sigma_t * self.sigma_t) * self.value(t, x)
    }

    pub fn d_x(&self, t: f64, x: f64) -> f64 {
        -2.0 * (x - self.x0) / (self.sigma_x * self.sigma_x) * self.value(t, x)
    }
}

/// Below this value the bump counts as vanished.
pub const SUPPORT_TOL: f64 = 1e-10;

/// `u` on the x-grid, linear in `y` between nodes and zero outside.
pub fn velocity_on(x: &LagrangianState, xgrid: XGrid) -> Vec<f64> {
    let y = x.y();
    xgrid.points().iter().map(|&s| linear(&y, &x.u, s, 0.0)).collect()
}

/// Samples a field on the x-grid: cubic Hermite in `y` with the given
/// `y`-slopes, continued beyond the outermost characteristics by
/// `left·e^{x−y_0}` and `right·e^{y_{n−1}−x}`.
fn hermite_in_y(y: &[f64], v: &[f64], dv: &[f64], tails: (f64, f64), xgrid: XGrid) -> Vec<f64> {
    let n = y.len();
    xgrid
        .points()
        .iter()
        .map(|&s| {
            if s <= y[0] {
                return tails.0 * (s - y[0]).exp();
            }
            if s >= y[n - 1] {
                return tails.1 * (y[n - 1] - s).exp();
            }
            let j = locate_sorted(y, s);
            let w = y[j + 1] - y[j];
            if w <= 0.0 {
                return v[j + 1];
            }
            hermite(v[j], v[j + 1], dv[j], dv[j + 1], w, (s - y[j]) / w)
        })
        .collect()
}

/// `P_1` on the x-grid, Hermite in `y` with slopes `Q_1 = ∂_x P_1`.
pub fn p1_on(x: &LagrangianState, p1: &[f64], q1: &[f64], xgrid: XGrid) -> Vec<f64> {
    let n = p1.len();
    hermite_in_y(&x.y(), p1, q1, (p1[0], p1[n - 1]), xgrid)
}

/// `|∫∫ (−u φ_t − (½u² + P_1) φ_x) dx dt − ∫ u_0 φ(0, ·) dx|` over the
/// outputs of `traj`, with `u` and `P_1` reconstructed on `xgrid`.
///
/// Time integration is Simpson's rule on uniformly spaced outputs and the
/// trapezoid rule otherwise. `φ` has to vanish (below [`SUPPORT_TOL`]) at the
/// final time and at both ends of `xgrid`.
pub fn weak_residual(traj: &Trajectory, xgrid: XGrid, phi: &GaussianBump) -> Result<f64> {
    let times = &traj.times;
    let (&t_first, &t_last) = match (times.first(), times.last()) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(Error::Domain("empty trajectory".into())),
    };
    if t_first != 0.0 {
        return Err(Error::Domain("trajectory must start at t = 0".into()));
    }
    let edge = [xgrid.min(), xgrid.max()]
        .iter()
        .flat_map(|&xv| times.iter().map(move |&t| phi.value(t, xv)))
        .fold(0.0_f64, f64::max);
    let top = xgrid.points().iter().map(|&xv| phi.value(t_last, xv)).fold(0.0_f64, f64::max);
    if edge > SUPPORT_TOL || top > SUPPORT_TOL {
        return Err(Error::Domain(format!(
            "test function not supported inside the window: {edge:.2e} on the x-edges, {top:.2e} at t = {t_last}"
        )));
    }
    let xs = xgrid.points();
    let dx = xgrid.step();
    let mut inner = Vec::with_capacity(times.len());
    let mut initial = 0.0;
    for (k, (&t, x)) in times.iter().zip(&traj.states).enumerate() {
        let b = compute_pq(x)?;
        let u = velocity_on(x, xgrid);
        let p1 = p1_on(x, &b.p1, &b.q1, xgrid);
        let vals: Vec<f64> = xs
            .iter()
            .enumerate()
            .map(|(i, &xv)| u[i] * phi.d_t(t, xv) + (0.5 * u[i] * u[i] + p1[i]) * phi.d_x(t, xv))
            .collect();
        inner.push(trapz(&vals, dx));
        if k == 0 {
            let v0: Vec<f64> = xs.iter().zip(&u).map(|(&xv, &uv)| uv * phi.value(0.0, xv)).collect();
            initial = trapz(&v0, dx);
        }
    }
    let uniform = times.len() > 2 && {
        let h = times[1] - times[0];
        times.windows(2).all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h)
    };
    let space_time = if uniform {
        simpson_or_trapz(&inner, times[1] - times[0])
    } else {
        times.windows(2).zip(inner.windows(2)).map(|(t, v)| 0.5 * (t[1] - t[0]) * (v[0] + v[1])).sum()
    };
    Ok((space_time + initial).abs())
}

/// L² norm over the interior x-samples of
/// `P_1 − ∂_x Q_1 − (u² + ½u_x² + ½γ² − ½γ_x²)`.
///
/// `Q_1` is sampled on the x-grid by Hermite interpolation in `y` with slopes
/// `P_1 − ½f_1/ν` and differentiated by centered differences. Only meaningful
/// without breaking, where `ν > 0`.
pub fn helmholtz_residual(x: &LagrangianState, xgrid: XGrid) -> Result<f64> {
    if let Some(i) = x.nu.iter().position(|&v| v <= 0.0) {
        return Err(Error::Domain(format!("nu vanishes at index {i}")));
    }
    let b = compute_pq(x)?;
    let n = x.len();
    let y = x.y();
    let [f1, _, _] = assemble_densities(x);
    let dq1: Vec<f64> = (0..n).map(|i| b.p1[i] - 0.5 * f1[i] / x.nu[i]).collect();
    let p1 = p1_on(x, &b.p1, &b.q1, xgrid);
    let q1 = hermite_in_y(&y, &b.q1, &dq1, (b.p1[0], -b.p1[n - 1]), xgrid);
    let ux: Vec<f64> = x.beta.iter().zip(&x.nu).map(|(b, n)| b / n).collect();
    let dx = xgrid.step();
    let xs = xgrid.points();
    let res: Vec<f64> = (1..xs.len() - 1)
        .map(|i| {
            let s = xs[i];
            let u = linear(&y, &x.u, s, 0.0);
            let g = linear(&y, &x.gamma, s, 0.0);
            let gx = linear(&y, &x.r, s, 0.0);
            let uxv = linear(&y, &ux, s, 0.0);
            let dq = (q1[i + 1] - q1[i - 1]) / (2.0 * dx);
            p1[i] - dq - (u * u + 0.5 * uxv * uxv + 0.5 * g * g - 0.5 * gx * gx)
        })
        .collect();
    Ok(crate::quad::l2(&res, dx))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolution::{evolve, EvolveOptions};
    use crate::grid::XiGrid;
    use crate::scenario::Scenario;
    use crate::transform::to_lagrangian;

    #[test]
    fn zero_data_has_zero_residual() {
        let x = LagrangianState::zeros(XiGrid::new(-20.0, 20.0, 201).unwrap());
        let tr = evolve(&x, &EvolveOptions::new(1.0, 0.05, 2)).unwrap();
        let phi = GaussianBump { t0: 0.5, x0: 0.0, sigma_t: 0.08, sigma_x: 1.0 };
        let r = weak_residual(&tr, XGrid::new(-10.0, 10.0, 201).unwrap(), &phi).unwrap();
        assert_eq!(r, 0.0);
    }

    #[test]
    fn support_violation_rejected() {
        let x = LagrangianState::zeros(XiGrid::new(-20.0, 20.0, 201).unwrap());
        let tr = evolve(&x, &EvolveOptions::new(1.0, 0.05, 2)).unwrap();
        let phi = GaussianBump { t0: 0.9, x0: 0.0, sigma_t: 0.5, sigma_x: 1.0 };
        assert!(matches!(
            weak_residual(&tr, XGrid::new(-10.0, 10.0, 201).unwrap(), &phi),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn helmholtz_identity_converges() {
        let sc = Scenario::Gaussian { amp_u: 0.6, amp_gamma: 0.4, width: 1.0, center: 0.0 };
        let p = sc.profile().unwrap();
        let mut errs = Vec::new();
        for n in [1201, 2401] {
            let x = to_lagrangian(&p, XiGrid::new(-20.0, 25.0, n).unwrap()).unwrap();
            errs.push(helmholtz_residual(&x, XGrid::new(-6.0, 6.0, (n - 1) / 4 + 1).unwrap()).unwrap());
        }
        let order = (errs[0] / errs[1]).log2();
        assert!(order > 1.8, "{errs:?}");
    }
}
