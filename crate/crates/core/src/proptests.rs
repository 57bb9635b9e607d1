//! Property tests of the public operations on randomly drawn data.

use crate::kernel::{convolve_exp, convolve_exp_direct};
use crate::*;
use proptest::prelude::*;

fn gaussian_state(amp_u: f64, amp_gamma: f64, width: f64, center: f64, n: usize) -> LagrangianState {
    let sc = Scenario::Gaussian { amp_u, amp_gamma, width, center };
    to_lagrangian(&sc.profile().unwrap(), sc.default_xi_grid(n).unwrap()).unwrap()
}

fn params() -> impl Strategy<Value = (f64, f64, f64, f64)> {
    (-1.0..1.0f64, -0.6..0.6f64, 0.6..1.6f64, -2.0..2.0f64)
}

fn smooth_relabeling(g: XiGrid, a: f64, c: f64) -> Relabeling {
    Relabeling::from_fn(g, |s| s + a * (s - c).tanh(), |s| 1.0 + a / (s - c).cosh().powi(2)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn e_norm_is_a_norm((a, b, w, c) in params(), (a2, b2, w2, c2) in params(), k in -3.0..3.0f64) {
        let x = gaussian_state(a, b, w, c, 257);
        let y = LagrangianState { grid: x.grid, ..gaussian_state(a2, b2, w2, c2, 257) };
        let zero = LagrangianState::zeros(x.grid);
        let (nx, ny) = (x.e_norm().unwrap(), y.e_norm().unwrap());
        prop_assert!(x.add(&y).unwrap().e_norm().unwrap() <= nx + ny + 1e-12);
        let scaled = x.scale(k).e_norm().unwrap();
        prop_assert!((scaled - k.abs() * nx).abs() <= 1e-12 * (1.0 + nx));
        prop_assert_eq!(zero.e_norm().unwrap(), 0.0);
        let d = x.e_distance(&y).unwrap();
        prop_assert!((d - y.e_distance(&x).unwrap()).abs() <= 1e-12 * (1.0 + d));
    }

    #[test]
    fn recurrence_matches_direct_sum(
        steps in prop::collection::vec(0.0..0.3f64, 40..120),
        f in prop::collection::vec(-2.0..2.0f64, 120),
        signed in any::<bool>(),
    ) {
        let mut y = vec![-3.0];
        for s in &steps {
            let last = *y.last().unwrap();
            y.push(last + s);
        }
        let f = &f[..y.len()];
        let fast = convolve_exp(&y, f, 0.05, 0.5, signed).unwrap();
        let slow = convolve_exp_direct(&y, f, 0.05, 0.5, signed).unwrap();
        let scale = slow.iter().fold(1e-300_f64, |m, v| m.max(v.abs()));
        for (p, q) in fast.iter().zip(&slow) {
            prop_assert!((p - q).abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn signed_kernel_bounded_by_unsigned(
        steps in prop::collection::vec(0.0..0.3f64, 60),
        f in prop::collection::vec(0.0..2.0f64, 61),
    ) {
        let mut y = vec![0.0];
        for s in &steps {
            let last = *y.last().unwrap();
            y.push(last + s);
        }
        let p = convolve_exp(&y, &f, 0.1, 0.25, false).unwrap();
        let q = convolve_exp(&y, &f, 0.1, 0.25, true).unwrap();
        for (pv, qv) in p.iter().zip(&q) {
            prop_assert!(qv.abs() <= pv + 1e-14);
        }
    }

    #[test]
    fn kernels_invariant_under_translation((a, b, w, c) in params(), shift in -5.0..5.0f64) {
        let x = gaussian_state(a, b, w, c, 257);
        let mut moved = x.clone();
        moved.zeta.iter_mut().for_each(|z| *z += shift);
        let (p, q) = (compute_pq(&x).unwrap(), compute_pq(&moved).unwrap());
        prop_assert!(p.max_rel_diff(&q) <= 1e-10);
    }

    #[test]
    fn lagrangian_data_lies_in_the_invariant_set((a, b, w, c) in params()) {
        let x = gaussian_state(a, b, w, c, 513);
        prop_assert!(x.check_g_membership(1e-10).passes());
        let y = x.y();
        for (i, (yv, h)) in y.iter().zip(&x.h).enumerate() {
            prop_assert!((yv + h - x.grid.point(i)).abs() <= 1e-9);
        }
    }

    #[test]
    fn relabeling_keeps_invariant_set((a, b, w, c) in params(), s in 0.05..0.45f64, at in -2.0..2.0f64) {
        let x = gaussian_state(a, b, w, c, 1025);
        let f = smooth_relabeling(x.grid, s, at);
        let xf = apply_relabel(&x, &f).unwrap();
        prop_assert!(xf.check_g_membership(1e-8).passes());
        prop_assert!((xf.total_energy() - x.total_energy()).abs() <= 1e-9);
    }

    #[test]
    fn relabeling_is_a_group_action((a, b, w, c) in params(), s in 0.05..0.4f64, t in 0.05..0.4f64) {
        let x = gaussian_state(a, b, w, c, 4097);
        let f = smooth_relabeling(x.grid, s, 0.5);
        let g = smooth_relabeling(x.grid, t, -0.5);
        let stepwise = apply_relabel(&apply_relabel(&x, &f).unwrap(), &g).unwrap();
        let at_once = apply_relabel(&x, &f.compose(&g).unwrap()).unwrap();
        prop_assert!(stepwise.e_distance(&at_once).unwrap() <= 1e-5);
    }

    #[test]
    fn projection_is_idempotent((a, b, w, c) in params(), s in 0.05..0.4f64) {
        // interpolation error only; it shrinks at third order or better
        let x = gaussian_state(a, b, w, c, 4097);
        let moved = apply_relabel(&x, &smooth_relabeling(x.grid, s, 0.3)).unwrap();
        let once = project_pi(&moved).unwrap();
        let twice = project_pi(&once).unwrap();
        prop_assert!(once.e_distance(&twice).unwrap() <= 1e-5);
        prop_assert!(once.e_distance(&x).unwrap() <= 1e-5);
    }

    #[test]
    fn pushforward_preserves_mass((a, b, w, c) in params()) {
        let x = gaussian_state(a, b, w, c, 513);
        let wide = XGrid::new(-60.0, 60.0, 1201).unwrap();
        let e = to_eulerian(&x, wide);
        prop_assert!((e.mu.total_mass() - x.total_energy()).abs() <= 1e-8);
        prop_assert!(e.mu.density.iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn atom_measure_round_trip(mass in 0.5..3.0f64, at in -2.0..2.0f64) {
        let sc = Scenario::Atom { mass, location: at };
        let g = sc.default_xi_grid(801).unwrap();
        let x = to_lagrangian(&sc.profile().unwrap(), g).unwrap();
        for i in 0..g.len() {
            let xi = g.point(i);
            prop_assert!((x.h[i] - (xi - at).clamp(0.0, mass)).abs() <= 1e-9);
        }
        let e = to_eulerian(&x, XGrid::new(-10.0, 10.0, 401).unwrap());
        prop_assert_eq!(e.mu.atoms.len(), 1);
        // the plateau is resolved to whole cells
        prop_assert!((e.mu.atoms[0].mass - mass).abs() <= 2.0 * g.step());
        prop_assert!((e.mu.total_mass() - mass).abs() <= 1e-9);
    }
}
