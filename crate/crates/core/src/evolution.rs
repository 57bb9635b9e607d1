//! Time integration of the Lagrangian system.

use crate::error::{Error, Result};
use crate::eulerian::EulerianTriple;
use crate::grid::{XGrid, XiGrid};
use crate::kernel::{compute_pq, KernelBundle};
use crate::profile::EulerianProfile;
use crate::state::LagrangianState;
use crate::transform::{to_eulerian, to_lagrangian, FLAT_THRESHOLD};

/// Flagged runs within this many labels of an earlier one, flagged no longer
/// than [`EVENT_TIME_GAP`] ago, extend that breaking event.
pub const EVENT_LABEL_GAP: usize = 2;
pub const EVENT_TIME_GAP: f64 = 0.5;

/// Time derivative of every field; the returned state holds rates, not values.
pub fn rhs(x: &LagrangianState) -> Result<LagrangianState> {
    let b = compute_pq(x)?;
    Ok(rhs_with(x, &b))
}

/// Right-hand side given precomputed nonlocal terms.
pub fn rhs_with(x: &LagrangianState, b: &KernelBundle) -> LagrangianState {
    let n = x.len();
    let mut d = LagrangianState::zeros(x.grid);
    for i in 0..n {
        let (u, g, r) = (x.u[i], x.gamma[i], x.r[i]);
        let (nu, beta, kappa, delta) = (x.nu[i], x.beta[i], x.kappa[i], x.delta[i]);
        let (p1, p2, p3) = (b.p1[i], b.p2[i], b.p3[i]);
        let (q1, q2, q3) = (b.q1[i], b.q2[i], b.q3[i]);
        d.zeta[i] = u;
        d.u[i] = -q1;
        d.gamma[i] = -q2 - p3;
        d.r[i] = -p2 - q3;
        d.h[i] = u * u * u - 2.0 * p1 * u - 2.0 * p2 * g - 2.0 * q3 * g;
        d.nu[i] = beta;
        d.beta[i] = 0.5 * (u * u - 2.0 * r * r - 2.0 * p1) * nu + 0.5 * delta;
        d.kappa[i] = -(p2 + q3) * nu + r * beta;
        d.delta[i] = (3.0 * u * u - 2.0 * p1 + 2.0 * g * g) * beta
            - (2.0 * u * q1 + 2.0 * q2 * g + 2.0 * p3 * g) * nu
            - (2.0 * p2 + 2.0 * q3) * kappa;
    }
    d
}

fn axpy(base: &LagrangianState, a: f64, k: &LagrangianState) -> LagrangianState {
    let mut out = base.clone();
    for (dst, src) in out.fields_mut().into_iter().zip(k.fields()) {
        for (d, s) in dst.iter_mut().zip(src.iter()) {
            *d += a * s;
        }
    }
    out
}

/// One classical RK4 step; also returns the rate at the start of the step.
fn rk4(x: &LagrangianState, dt: f64) -> Result<(LagrangianState, LagrangianState)> {
    let k1 = rhs(x)?;
    let k2 = rhs(&axpy(x, 0.5 * dt, &k1))?;
    let k3 = rhs(&axpy(x, 0.5 * dt, &k2))?;
    let k4 = rhs(&axpy(x, dt, &k3))?;
    let mut out = x.clone();
    let c = dt / 6.0;
    let ks = [k1.fields(), k2.fields(), k3.fields(), k4.fields()];
    for (f, dst) in out.fields_mut().into_iter().enumerate() {
        let (a, b, cc, d) = (ks[0][f], ks[1][f], ks[2][f], ks[3][f]);
        for i in 0..dst.len() {
            dst[i] += c * (a[i] + 2.0 * b[i] + 2.0 * cc[i] + d[i]);
        }
    }
    Ok((out, k1))
}

fn all_finite(x: &LagrangianState) -> bool {
    x.fields().iter().all(|f| f.iter().all(|v| v.is_finite()))
}

/// Classical fourth-order Runge–Kutta step of length `dt`.
pub fn step_rk4(x: &LagrangianState, dt: f64) -> Result<LagrangianState> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::Domain(format!("time step must be positive, got {dt}")));
    }
    let (out, _) = rk4(x, dt)?;
    if !all_finite(&out) {
        return Err(Error::BlowUp { time: dt, snapshot: Box::new(x.clone()) });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolveOptions {
    pub t_end: f64,
    pub dt: f64,
    /// Record a snapshot every this many steps (the final time is always
    /// recorded).
    pub output_every: usize,
    /// Also record the state at each detected breaking time.
    pub snapshot_at_breaking: bool,
    /// Constraint residual above which a warning is recorded.
    pub warn_tol: f64,
}

impl EvolveOptions {
    pub fn new(t_end: f64, dt: f64, output_every: usize) -> Self {
        Self { t_end, dt, output_every, snapshot_at_breaking: true, warn_tol: 1e-4 }
    }
}

/// Diagnostics recorded with each snapshot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diagnostics {
    pub t: f64,
    pub total_energy: f64,
    pub min_nu: f64,
    pub res_218: f64,
    pub res_219: f64,
    /// A breaking event happened since the previous snapshot, or the state
    /// has collapsed nodes.
    pub breaking: bool,
}

/// Labels whose `nu` reached the flat threshold, grouped over neighbouring
/// labels and nearby times. `time` is the first crossing in the group.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BreakingEvent {
    pub time: f64,
    pub xi_start: f64,
    pub xi_end: f64,
    pub min_nu: f64,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<LagrangianState>,
    pub diagnostics: Vec<Diagnostics>,
    pub events: Vec<BreakingEvent>,
    pub warnings: Vec<String>,
}

impl Trajectory {
    pub fn last(&self) -> &LagrangianState {
        self.states.last().expect("trajectory is never empty")
    }
}

/// Minimum over `[0, dt]` of the cubic Hermite interpolant with end values
/// `p0, p1` and end slopes `m0, m1`, as `(value, fraction of dt)`.
fn hermite_min(p0: f64, p1: f64, m0: f64, m1: f64, dt: f64) -> (f64, f64) {
    // derivative in s ∈ [0,1]: a s² + b s + c
    let (w0, w1) = (m0 * dt, m1 * dt);
    let a = 6.0 * p0 - 6.0 * p1 + 3.0 * w0 + 3.0 * w1;
    let b = -6.0 * p0 + 6.0 * p1 - 4.0 * w0 - 2.0 * w1;
    let c = w0;
    let mut best = if p0 <= p1 { (p0, 0.0) } else { (p1, 1.0) };
    let mut consider = |s: f64| {
        if s > 0.0 && s < 1.0 {
            let v = crate::interp::hermite(p0, p1, m0, m1, dt, s);
            if v < best.0 {
                best = (v, s);
            }
        }
    };
    if a.abs() < 1e-300 {
        if b != 0.0 {
            consider(-c / b);
        }
    } else {
        let disc = b * b - 4.0 * a * c;
        if disc >= 0.0 {
            let sq = disc.sqrt();
            consider((-b - sq) / (2.0 * a));
            consider((-b + sq) / (2.0 * a));
        }
    }
    best
}

fn record(x: &LagrangianState, t: f64, breaking: bool) -> Diagnostics {
    let g = x.check_g_membership(1.0);
    Diagnostics {
        t,
        total_energy: x.total_energy(),
        min_nu: g.min_nu,
        res_218: g.res_218,
        res_219: g.res_219,
        breaking: breaking || g.min_nu < FLAT_THRESHOLD,
    }
}

/// Fixed-step RK4 march from `x0` to `opts.t_end`.
///
/// After each step `nu` values in `[-1e-12, 0)` are set to zero. Labels whose
/// `nu` falls below the flat threshold, at a step end or at the minimum of the
/// cubic Hermite interpolant of `(nu, beta)` across the step, are logged as
/// breaking events.
pub fn evolve(x0: &LagrangianState, opts: &EvolveOptions) -> Result<Trajectory> {
    let EvolveOptions { t_end, dt, .. } = *opts;
    if !(dt > 0.0 && dt.is_finite()) || !(t_end >= 0.0 && t_end.is_finite()) {
        return Err(Error::Domain(format!("need dt > 0 and t_end >= 0, got dt={dt}, t_end={t_end}")));
    }
    let every = opts.output_every.max(1);
    x0.validate()?;
    let g0 = x0.check_g_membership(1e-8);
    if !g0.passes() {
        return Err(Error::InvalidState(format!(
            "initial state violates the invariant-set conditions: {g0:?}"
        )));
    }
    let full = (t_end / dt + 1e-9).floor() as usize;
    let rest = t_end - full as f64 * dt;
    let n_steps = if rest > 1e-9 * dt { full + 1 } else { full };

    let grid = x0.grid;
    let n = grid.len();
    let mut traj = Trajectory {
        times: vec![0.0],
        states: vec![x0.clone()],
        diagnostics: vec![record(x0, 0.0, false)],
        events: Vec::new(),
        warnings: Vec::new(),
    };
    let mut x = x0.clone();
    let mut last_flag: Vec<Option<usize>> = vec![None; n];
    let mut owner = vec![0usize; n];
    let gap_steps = (EVENT_TIME_GAP / dt).ceil().max(1.0) as usize;
    let mut pending_break = false;
    let mut warned = false;
    for k in 0..n_steps {
        let t0 = k as f64 * dt;
        let (t1, h) = if k + 1 == n_steps && rest > 1e-9 * dt && full < n_steps {
            (t_end, t_end - t0)
        } else {
            ((k + 1) as f64 * dt, dt)
        };
        let (mut next, _) = rk4(&x, h)?;
        if !all_finite(&next) {
            return Err(Error::BlowUp { time: t1, snapshot: Box::new(x) });
        }
        for v in next.nu.iter_mut() {
            if *v < 0.0 && *v >= -1e-12 {
                *v = 0.0;
            }
        }

        // breaking detection
        let mut flagged = vec![false; n];
        let mut when = vec![0.0; n];
        let mut value = vec![f64::INFINITY; n];
        for i in 0..n {
            let (p0, p1, m0, m1) = (x.nu[i], next.nu[i], x.beta[i], next.beta[i]);
            let (v, s) = if m0 < 0.0 && m1 > 0.0 { hermite_min(p0, p1, m0, m1, h) } else { (p1, 1.0) };
            if v < FLAT_THRESHOLD {
                flagged[i] = true;
                when[i] = t0 + s * h;
                value[i] = v;
            }
        }
        let mut break_times = Vec::new();
        let mut i = 0;
        while i < n {
            if !flagged[i] {
                i += 1;
                continue;
            }
            let start = i;
            while i + 1 < n && flagged[i + 1] {
                i += 1;
            }
            let end = i;
            i += 1;
            let jmin = (start..=end).min_by(|&a, &b| value[a].total_cmp(&value[b])).unwrap();
            let near = start.saturating_sub(EVENT_LABEL_GAP)..=(end + EVENT_LABEL_GAP).min(n - 1);
            let recent = near.clone().find(|&j| last_flag[j].is_some_and(|s| s + gap_steps >= k));
            let idx = match recent.map(|j| owner[j]) {
                Some(e) => {
                    let ev = &mut traj.events[e];
                    ev.xi_start = ev.xi_start.min(grid.point(start));
                    ev.xi_end = ev.xi_end.max(grid.point(end));
                    ev.min_nu = ev.min_nu.min(value[jmin]);
                    e
                }
                None => {
                    traj.events.push(BreakingEvent {
                        time: when[jmin],
                        xi_start: grid.point(start),
                        xi_end: grid.point(end),
                        min_nu: value[jmin],
                    });
                    break_times.push(when[jmin]);
                    traj.events.len() - 1
                }
            };
            for j in start..=end {
                last_flag[j] = Some(k);
                owner[j] = idx;
            }
            pending_break = true;
        }

        if opts.snapshot_at_breaking {
            if let Some(&tb) = break_times.iter().min_by(|a, b| a.total_cmp(b)) {
                if tb > t0 && tb < t1 - 1e-14 {
                    let (mut xb, _) = rk4(&x, tb - t0)?;
                    for v in xb.nu.iter_mut() {
                        if *v < 0.0 && *v >= -1e-12 {
                            *v = 0.0;
                        }
                    }
                    traj.diagnostics.push(record(&xb, tb, true));
                    traj.times.push(tb);
                    traj.states.push(xb);
                    pending_break = false;
                }
            }
        }

        x = next;
        if (k + 1) % every == 0 || k + 1 == n_steps {
            let d = record(&x, t1, pending_break);
            pending_break = false;
            if !warned && (d.res_218 > opts.warn_tol || d.res_219 > opts.warn_tol) {
                traj.warnings.push(format!(
                    "constraint residuals {:.3e}, {:.3e} exceed {:.1e} at t = {t1}",
                    d.res_218, d.res_219, opts.warn_tol
                ));
                warned = true;
            }
            traj.diagnostics.push(d);
            traj.times.push(t1);
            traj.states.push(x.clone());
        }
    }
    Ok(traj)
}

/// Lagrangian trajectory together with its Eulerian images.
#[derive(Debug, Clone)]
pub struct Solution {
    pub trajectory: Trajectory,
    pub eulerian: Vec<EulerianTriple>,
}

impl Solution {
    /// `μ(ℝ)` of each Eulerian snapshot.
    pub fn energy_history(&self) -> Vec<f64> {
        self.eulerian.iter().map(|e| e.mu.total_mass()).collect()
    }
}

/// Solves the Cauchy problem: Eulerian data to Lagrangian variables, RK4 in
/// time, and back to Eulerian variables at every snapshot.
///
/// The Eulerian image does not depend on the representative of a relabeling
/// class, so snapshots are mapped back directly without projecting first.
pub fn solve_cauchy(
    e0: &dyn EulerianProfile,
    xi_grid: XiGrid,
    xgrid: XGrid,
    opts: &EvolveOptions,
) -> Result<Solution> {
    let x0 = to_lagrangian(e0, xi_grid)?;
    let trajectory = evolve(&x0, opts)?;
    let eulerian = trajectory.states.iter().map(|x| to_eulerian(x, xgrid)).collect();
    Ok(Solution { trajectory, eulerian })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_state_is_stationary() {
        let g = XiGrid::new(-5.0, 5.0, 41).unwrap();
        let x = LagrangianState::zeros(g);
        assert_eq!(rhs(&x).unwrap(), {
            let mut z = LagrangianState::zeros(g);
            z.nu.iter_mut().for_each(|v| *v = 0.0);
            z
        });
        assert_eq!(step_rk4(&x, 0.1).unwrap(), x);
        let tr = evolve(&x, &EvolveOptions::new(1.0, 0.1, 5)).unwrap();
        assert!(tr.states.iter().all(|s| *s == x));
        assert_eq!(tr.times.len(), 3);
        assert!(tr.events.is_empty());
    }

    #[test]
    fn hermite_min_of_parabola() {
        // nu(t) = (t - 0.3)^2 on [0, 1]
        let (v, s) = hermite_min(0.09, 0.49, -0.6, 1.4, 1.0);
        assert!(v.abs() < 1e-15);
        assert!((s - 0.3).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_step() {
        let x = LagrangianState::zeros(XiGrid::new(-1.0, 1.0, 5).unwrap());
        assert!(step_rk4(&x, 0.0).is_err());
        assert!(step_rk4(&x, f64::NAN).is_err());
    }

    #[test]
    fn odd_total_time_gets_a_short_last_step() {
        let x = LagrangianState::zeros(XiGrid::new(-1.0, 1.0, 5).unwrap());
        let tr = evolve(&x, &EvolveOptions::new(0.25, 0.1, 1)).unwrap();
        assert_eq!(tr.times.len(), 4);
        assert!((tr.times[3] - 0.25).abs() < 1e-15);
    }
}
