//! Fixtures shared by the benchmarks.

use m2ch_core::{to_lagrangian, LagrangianState, Scenario};

/// Smooth Gaussian data on the default label grid with `n` samples.
pub fn gaussian_state(n: usize) -> LagrangianState {
    let s = Scenario::Gaussian { amp_u: 1.0, amp_gamma: 0.5, width: 1.0, center: 0.0 };
    to_lagrangian(&s.profile().expect("valid scenario"), s.default_xi_grid(n).expect("valid grid"))
        .expect("valid data")
}

/// Peakon-antipeakon data with `n` samples.
pub fn collision_state(n: usize) -> LagrangianState {
    let s = Scenario::PeakonAntipeakon { c: 1.0, a: 2.0 };
    to_lagrangian(&s.profile().expect("valid scenario"), s.default_xi_grid(n).expect("valid grid"))
        .expect("valid data")
}
