//! Computable upper bounds for the relabeling-invariant distances.
//!
//! `J(X_α, X_β) = inf_{f,g} ‖X_α•f − X_β‖_E + ‖X_α − X_β•g‖_E` is bounded
//! from above by evaluating the objective on a finite list of relabeling
//! pairs. The identity pair always belongs to the list, so every bound is at
//! most `2‖X_α − X_β‖_E`. Nothing here claims to compute the infimum.

use crate::error::{Error, Result};
use crate::eulerian::EulerianTriple;
use crate::evolution::{evolve, EvolveOptions};
use crate::grid::XiGrid;
use crate::profile::EulerianProfile;
use crate::state::LagrangianState;
use crate::transform::{apply_relabel, project_pi, to_lagrangian, to_lagrangian_triple, Relabeling};

/// Which candidate produced a bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CandidateId {
    /// `f = g = Id`.
    Identity,
    /// `f` solving `(y_α + H_α)∘f = y_β + H_β`, `g = f^{-1}`.
    Canonical,
    /// Index into the caller's candidate list.
    User(usize),
    /// A chain of the given number of links through projected convex
    /// combinations.
    Chain(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceReport {
    /// Upper bound on the distance.
    pub value: f64,
    pub candidate: CandidateId,
    /// `‖X_α − X_β‖_E`.
    pub e_distance: f64,
}

/// `‖X_α•f − X_β‖_E + ‖X_α − X_β•g‖_E`.
pub fn j_objective(
    xa: &LagrangianState,
    xb: &LagrangianState,
    f: &Relabeling,
    g: &Relabeling,
) -> Result<f64> {
    Ok(apply_relabel(xa, f)?.e_distance(xb)? + xa.e_distance(&apply_relabel(xb, g)?)?)
}

/// The pair `(f, f^{-1})` with `(y_α + H_α)∘f = y_β + H_β`, or `None` when
/// either `y + H` fails to be strictly increasing on the samples.
pub fn canonical_pair(xa: &LagrangianState, xb: &LagrangianState) -> Option<(Relabeling, Relabeling)> {
    let g_of = |x: &LagrangianState| {
        let v: Vec<f64> = x.y().iter().zip(&x.h).map(|(a, b)| a + b).collect();
        let d: Vec<f64> = x.nu.iter().zip(&x.delta).map(|(a, b)| a + b).collect();
        Relabeling::from_parts(x.grid, v, d).ok()
    };
    let (ga, gb) = (g_of(xa)?, g_of(xb)?);
    let f = ga.invert().ok()?.compose(&gb).ok()?;
    let finv = f.invert().ok()?;
    Some((f, finv))
}

/// Minimum of the objective over the identity pair, the canonical pair and
/// `candidates`.
pub fn j_upper(
    xa: &LagrangianState,
    xb: &LagrangianState,
    candidates: &[(Relabeling, Relabeling)],
) -> Result<DistanceReport> {
    if !xa.grid.same_as(&xb.grid) {
        return Err(Error::GridMismatch);
    }
    let e = xa.e_distance(xb)?;
    let mut best = DistanceReport { value: 2.0 * e, candidate: CandidateId::Identity, e_distance: e };
    if e == 0.0 {
        return Ok(best);
    }
    let mut consider = |v: f64, id: CandidateId| {
        if v < best.value {
            best.value = v;
            best.candidate = id;
        }
    };
    if let Some((f, g)) = canonical_pair(xa, xb) {
        consider(j_objective(xa, xb, &f, &g)?, CandidateId::Canonical);
    }
    for (k, (f, g)) in candidates.iter().enumerate() {
        consider(j_objective(xa, xb, f, g)?, CandidateId::User(k));
    }
    Ok(best)
}

/// Upper bound on `d^M`. Chains longer than one link pass through
/// `Π((1−s)X_α + sX_β)` at `s = k/chain_length`; intermediate states that
/// leave the invariant set or exceed energy `M` disqualify the chain.
pub fn dm_upper(xa: &LagrangianState, xb: &LagrangianState, m: f64, chain_length: usize) -> Result<DistanceReport> {
    for x in [xa, xb] {
        let h = x.h.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
        if h > m {
            return Err(Error::Domain(format!("energy {h} exceeds M = {m}")));
        }
    }
    let mut best = j_upper(xa, xb, &[])?;
    if chain_length <= 1 || best.value == 0.0 {
        return Ok(best);
    }
    let mut nodes = vec![xa.clone()];
    for k in 1..chain_length {
        let s = k as f64 / chain_length as f64;
        let Ok(mid) = xa.lerp(xb, s).and_then(|c| project_pi(&c)) else {
            return Ok(best);
        };
        let hmax = mid.h.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
        if !mid.check_g_membership(1e-6).passes() || hmax > m {
            return Ok(best);
        }
        nodes.push(mid);
    }
    nodes.push(xb.clone());
    let mut total = 0.0;
    for w in nodes.windows(2) {
        total += j_upper(&w[0], &w[1], &[])?.value;
        if total >= best.value {
            return Ok(best);
        }
    }
    best.value = total;
    best.candidate = CandidateId::Chain(chain_length);
    Ok(best)
}

/// `d^M` bound between the Lagrangian images of two Eulerian triples.
pub fn dd_upper(e1: &EulerianTriple, e2: &EulerianTriple, grid: XiGrid, m: f64) -> Result<DistanceReport> {
    dm_upper(&to_lagrangian_triple(e1, grid)?, &to_lagrangian_triple(e2, grid)?, m, 1)
}

/// As [`dd_upper`] for data given as profiles.
pub fn dd_upper_profiles(
    p1: &dyn EulerianProfile,
    p2: &dyn EulerianProfile,
    grid: XiGrid,
    m: f64,
) -> Result<DistanceReport> {
    dm_upper(&to_lagrangian(p1, grid)?, &to_lagrangian(p2, grid)?, m, 1)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LipschitzRow {
    pub t: f64,
    pub distance: f64,
    /// `distance / initial distance`; `None` when the initial distance is 0.
    pub ratio: Option<f64>,
}

/// Evolves both initial states to each time in `times` (increasing, first
/// entry may be 0) and bounds their distance there with [`j_upper`].
///
/// Distances are taken between the Lagrangian solutions themselves; mapping
/// to Eulerian variables and back would only add resampling error to a
/// quantity that is invariant under relabeling.
pub fn lipschitz_experiment_states(
    x1: &LagrangianState,
    x2: &LagrangianState,
    times: &[f64],
    dt: f64,
    m: f64,
) -> Result<Vec<LipschitzRow>> {
    if times.windows(2).any(|w| w[1] <= w[0]) || times.first().is_some_and(|&t| t < 0.0) {
        return Err(Error::Domain("times must be nonnegative and increasing".into()));
    }
    for x in [x1, x2] {
        if x.total_energy() > m {
            return Err(Error::Domain(format!("energy {} exceeds M = {m}", x.total_energy())));
        }
    }
    let d0 = j_upper(x1, x2, &[])?.value;
    let (mut a, mut b) = (x1.clone(), x2.clone());
    let mut now = 0.0;
    let mut rows = Vec::with_capacity(times.len());
    for &t in times {
        if t > now {
            let opts = EvolveOptions { snapshot_at_breaking: false, ..EvolveOptions::new(t - now, dt, usize::MAX) };
            a = evolve(&a, &opts)?.last().clone();
            b = evolve(&b, &opts)?.last().clone();
            now = t;
        }
        let d = if d0 == 0.0 { 0.0 } else { j_upper(&a, &b, &[])?.value };
        rows.push(LipschitzRow { t, distance: d, ratio: (d0 > 0.0).then(|| d / d0) });
    }
    Ok(rows)
}

/// [`lipschitz_experiment_states`] for Eulerian initial data.
pub fn lipschitz_experiment(
    p1: &dyn EulerianProfile,
    p2: &dyn EulerianProfile,
    grid: XiGrid,
    times: &[f64],
    dt: f64,
    m: f64,
) -> Result<Vec<LipschitzRow>> {
    lipschitz_experiment_states(&to_lagrangian(p1, grid)?, &to_lagrangian(p2, grid)?, times, dt, m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::Scenario;

    fn gaussian(amp: f64) -> LagrangianState {
        let sc = Scenario::Gaussian { amp_u: amp, amp_gamma: 0.3, width: 1.0, center: 0.0 };
        let g = XiGrid::new(-15.0, 20.0, 701).unwrap();
        to_lagrangian(&sc.profile().unwrap(), g).unwrap()
    }

    #[test]
    fn self_distance_is_zero() {
        let x = gaussian(0.5);
        let r = j_upper(&x, &x, &[]).unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(dm_upper(&x, &x, 10.0, 3).unwrap().value, 0.0);
    }

    #[test]
    fn bounded_by_twice_e_distance() {
        let (a, b) = (gaussian(0.5), gaussian(0.6));
        let r = j_upper(&a, &b, &[]).unwrap();
        assert!(r.value <= 2.0 * r.e_distance + 1e-12);
        let c = dm_upper(&a, &b, 10.0, 3).unwrap();
        assert!(c.value <= r.value);
    }

    #[test]
    fn identity_only_candidate_is_twice_e_distance() {
        let (a, b) = (gaussian(0.5), gaussian(0.6));
        let e = a.e_distance(&b).unwrap();
        let id = Relabeling::identity(a.grid);
        assert_eq!(j_objective(&a, &b, &id, &id).unwrap(), 2.0 * e);
    }

    #[test]
    fn energy_above_m_rejected() {
        let x = gaussian(0.5);
        assert!(matches!(dm_upper(&x, &x, 1e-3, 1), Err(Error::Domain(_))));
    }

    #[test]
    fn grid_mismatch_rejected() {
        let a = gaussian(0.5);
        let b = LagrangianState::zeros(XiGrid::new(-15.0, 20.0, 801).unwrap());
        assert!(matches!(j_upper(&a, &b, &[]), Err(Error::GridMismatch)));
    }

    #[test]
    fn identical_data_gives_zero_rows() {
        let x = gaussian(0.4);
        let rows = lipschitz_experiment_states(&x, &x, &[0.0, 0.05], 1e-2, 10.0).unwrap();
        assert!(rows.iter().all(|r| r.distance == 0.0 && r.ratio.is_none()));
    }
}
