use crate::eulerian::{Atom, EnergyMeasure, EulerianTriple};
use crate::grid::XGrid;
use crate::interp::locate_sorted;
use crate::state::LagrangianState;

/// Nodes with `nu` at or below this value are treated as collapsed.
pub const FLAT_THRESHOLD: f64 = 1e-8;

/// Eulerian samples of a Lagrangian state.
///
/// `u, γ, γ_x` are linear interpolants of `U, Γ, R` over `y` (zero outside
/// the range of `y`). The energy measure is the pushforward of `dH` under `y`:
/// every maximal run of at least two collapsed nodes becomes an atom carrying
/// the increment of `H` over the run, and every other cell spreads its
/// increment of `H` uniformly over `[y_i, y_{i+1}]` into bins centred on the
/// x-samples. Mass falling outside the x-grid is dropped.
///
/// Discretization error can make `H` dip or overshoot slightly near a
/// collision. The increments are taken from `H` clamped to `[H_0, H_{n-1}]`
/// and then replaced by the monotone envelope
/// `½(max_{j≤i} H_j + min_{j≥i} H_j)`. This leaves a nondecreasing `H`
/// untouched and keeps the total `H_{n-1} - H_0`.
pub fn to_eulerian(x: &LagrangianState, xgrid: XGrid) -> EulerianTriple {
    let n = x.len();
    let y = x.y();
    let xs = xgrid.points();
    let m = xs.len();
    let interp = |v: &[f64], xv: f64| -> f64 {
        if xv < y[0] || xv > y[n - 1] {
            return 0.0;
        }
        let j = locate_sorted(&y, xv);
        let w = y[j + 1] - y[j];
        if w <= 0.0 {
            return v[j + 1];
        }
        let t = (xv - y[j]) / w;
        v[j] + t * (v[j + 1] - v[j])
    };
    let u: Vec<f64> = xs.iter().map(|&xv| interp(&x.u, xv)).collect();
    let gamma: Vec<f64> = xs.iter().map(|&xv| interp(&x.gamma, xv)).collect();
    let gamma_x: Vec<f64> = xs.iter().map(|&xv| interp(&x.r, xv)).collect();

    let h = monotone_envelope(&x.h);
    let flat: Vec<bool> = x.nu.iter().map(|&v| v <= FLAT_THRESHOLD).collect();
    let mut in_atom = vec![false; n.saturating_sub(1)];
    let mut atoms = Vec::new();
    let mut i = 0;
    while i < n {
        if !flat[i] {
            i += 1;
            continue;
        }
        let start = i;
        while i + 1 < n && flat[i + 1] {
            i += 1;
        }
        let end = i;
        if end > start {
            let mass = h[end] - h[start];
            let loc = y[start..=end].iter().sum::<f64>() / (end - start + 1) as f64;
            in_atom[start..end].iter_mut().for_each(|c| *c = true);
            if mass > 0.0 && loc >= xgrid.min() && loc <= xgrid.max() {
                atoms.push(Atom { location: loc, mass });
            }
        }
        i += 1;
    }

    let dx = xgrid.step();
    let lo = xgrid.min() - 0.5 * dx;
    let mut bins = vec![0.0; m];
    let mut deposit = |a: f64, b: f64, mass: f64| {
        if mass <= 0.0 {
            return;
        }
        if b <= a {
            let k = ((a - lo) / dx).floor();
            if k >= 0.0 && (k as usize) < m && a >= xgrid.min() && a <= xgrid.max() {
                bins[k as usize] += mass;
            }
            return;
        }
        let a_c = a.max(xgrid.min());
        let b_c = b.min(xgrid.max());
        if b_c <= a_c {
            return;
        }
        let rate = mass / (b - a);
        let mut k = (((a_c - lo) / dx).floor() as usize).min(m - 1);
        loop {
            let bin_lo = (lo + k as f64 * dx).max(xgrid.min());
            let bin_hi = (lo + (k + 1) as f64 * dx).min(xgrid.max());
            let overlap = b_c.min(bin_hi) - a_c.max(bin_lo);
            if overlap > 0.0 {
                bins[k] += rate * overlap;
            }
            if bin_hi >= b_c || k + 1 == m {
                break;
            }
            k += 1;
        }
    };
    for j in 0..n - 1 {
        if !in_atom[j] {
            deposit(y[j], y[j + 1], h[j + 1] - h[j]);
        }
    }
    let density: Vec<f64> = bins
        .iter()
        .enumerate()
        .map(|(k, b)| {
            let w = if k == 0 || k + 1 == m { 0.5 * dx } else { dx };
            b / w
        })
        .collect();
    EulerianTriple { xgrid, u, gamma, gamma_x, mu: EnergyMeasure { xgrid, density, atoms } }
}

fn monotone_envelope(h: &[f64]) -> Vec<f64> {
    let (a, b) = (h[0], h[h.len() - 1]);
    let mut lo: Vec<f64> = h.iter().map(|&v| if a <= b { v.clamp(a, b) } else { v }).collect();
    for i in (0..h.len().saturating_sub(1)).rev() {
        lo[i] = lo[i].min(lo[i + 1]);
    }
    let mut hi = f64::NEG_INFINITY;
    h.iter()
        .zip(lo)
        .map(|(&v, l)| {
            let v = if a <= b { v.clamp(a, b) } else { v };
            hi = hi.max(v);
            0.5 * (hi + l)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::XiGrid;

    #[test]
    fn zero_state_maps_to_zero() {
        let x = LagrangianState::zeros(XiGrid::new(-5.0, 5.0, 51).unwrap());
        let e = to_eulerian(&x, XGrid::new(-4.0, 4.0, 41).unwrap());
        assert!(e.u.iter().chain(&e.gamma).chain(&e.mu.density).all(|&v| v == 0.0));
        assert!(e.mu.atoms.is_empty());
    }

    #[test]
    fn envelope_fixes_dips_only() {
        let h = [0.0, 1.0, 0.9, 2.0, 3.0, 3.0];
        let e = monotone_envelope(&h);
        assert_eq!(e, vec![0.0, 0.95, 0.95, 2.0, 3.0, 3.0]);
        let up = [0.0, 0.5, 0.5, 2.0];
        assert_eq!(monotone_envelope(&up), up.to_vec());
        let over = [0.0, -0.2, 1.3, 1.0];
        assert_eq!(monotone_envelope(&over), vec![0.0, 0.0, 1.0, 1.0]);
    }

    #[test]
    fn plateau_becomes_atom() {
        // y flat at 0.25 for xi in [0, 1], carrying mass 1 through delta = 1
        let g = XiGrid::new(-3.0, 4.0, 71).unwrap();
        let mut x = LagrangianState::zeros(g);
        for i in 0..g.len() {
            let xi = g.point(i);
            let (y, h) = if xi <= 0.0 {
                (xi + 0.25, 0.0)
            } else if xi <= 1.0 {
                (0.25, xi)
            } else {
                (xi - 0.75, 1.0)
            };
            x.zeta[i] = y - xi;
            x.h[i] = h;
            if xi > 0.0 && xi < 1.0 || (xi - 1.0).abs() < 1e-12 || xi.abs() < 1e-12 {
                x.nu[i] = 0.0;
                x.delta[i] = 1.0;
            }
        }
        let e = to_eulerian(&x, XGrid::new(-2.0, 2.0, 81).unwrap());
        assert_eq!(e.mu.atoms.len(), 1);
        let a = e.mu.atoms[0];
        let oracle = crate::quad::trapz(&x.delta[30..=40], g.step());
        assert!((a.mass - oracle).abs() < 1e-8, "{} vs {oracle}", a.mass);
        assert!((a.location - 0.25).abs() < 1e-12);
        assert!((e.mu.total_mass() - 1.0).abs() < 1e-12);
    }
}
