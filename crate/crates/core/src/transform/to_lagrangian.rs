use crate::error::{Error, Result};
use crate::eulerian::EulerianTriple;
use crate::grid::XiGrid;
use crate::profile::{EulerianProfile, SampledProfile};
use crate::state::LagrangianState;

const PLATEAU_TOL: f64 = 1e-10;
const TAIL_TOL: f64 = 1e-12;

/// Lagrangian representative in the section `y + H = ξ` of the Eulerian data.
///
/// `y(ξ) = sup{y : μ((-∞, y)) + y < ξ}` is found by bisection to full
/// precision. Labels falling
/// strictly inside the interval swallowed by an atom get `nu = 0`,
/// `delta = 1`. Elsewhere `nu = 1/(1 + g(y))` with `g` the energy density and
/// `delta = nu (U² + Γ² + R² + u_x²)`, so that the pointwise constraints hold
/// to rounding.
pub fn to_lagrangian(p: &dyn EulerianProfile, grid: XiGrid) -> Result<LagrangianState> {
    let n = grid.len();
    let total = p.total_mass();
    if !(total.is_finite() && total >= 0.0) {
        return Err(Error::InvalidMeasure(format!("total mass {total} is not a nonnegative number")));
    }
    let phi = |y: f64| p.cumulative(y) + y;
    let mut x = LagrangianState::zeros(grid);
    let mut prev_y = f64::NEG_INFINITY;
    for i in 0..n {
        let xi = grid.point(i);
        let (mut lo, mut hi) = (xi - total - 1.0, xi);
        if phi(lo) >= xi {
            return Err(Error::InvalidMeasure("cumulative energy is not monotone".into()));
        }
        // bisect down to adjacent floats, then keep the end nearer the root
        loop {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if phi(mid) < xi {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let mut y = if phi(hi) - xi <= xi - phi(lo) { hi } else { lo };
        let plateau = p.atoms().iter().find(|a| {
            let start = phi(a.location);
            (y - a.location).abs() < PLATEAU_TOL
                && xi > start + TAIL_TOL
                && xi < start + a.mass - TAIL_TOL
        });
        if y < prev_y {
            if prev_y - y > 1e-9 {
                return Err(Error::InvalidMeasure(format!("characteristics decrease at index {i}")));
            }
            y = prev_y;
        }
        prev_y = y;
        let (u, g, r) = (p.u(y), p.gamma(y), p.gamma_x(y));
        x.zeta[i] = y - xi;
        x.h[i] = xi - y;
        x.u[i] = u;
        x.gamma[i] = g;
        x.r[i] = r;
        if let Some(a) = plateau {
            x.zeta[i] = a.location - xi;
            x.h[i] = xi - a.location;
            x.nu[i] = 0.0;
            x.beta[i] = 0.0;
            x.kappa[i] = 0.0;
            x.delta[i] = 1.0;
        } else {
            let ux = p.u_x(y);
            let nu = 1.0 / (1.0 + p.density(y));
            x.nu[i] = nu;
            x.beta[i] = ux * nu;
            x.kappa[i] = r * nu;
            x.delta[i] = nu * (u * u + g * g + r * r + ux * ux);
        }
    }
    let slack = TAIL_TOL * total.max(1.0);
    let y0 = x.y_at(0);
    let yn = x.y_at(n - 1);
    if p.cumulative(y0) > slack || total - p.cumulative(yn) - atoms_at(p, yn) > slack {
        return Err(Error::Domain(format!(
            "label grid [{}, {}] does not cover the support of the energy (mass {total:.6e})",
            grid.min(),
            grid.max()
        )));
    }
    Ok(x)
}

fn atoms_at(p: &dyn EulerianProfile, y: f64) -> f64 {
    p.atoms().iter().filter(|a| a.location == y).map(|a| a.mass).sum()
}

/// [`to_lagrangian`] for sampled data, interpolated linearly between samples.
pub fn to_lagrangian_triple(e: &EulerianTriple, grid: XiGrid) -> Result<LagrangianState> {
    let p = SampledProfile::new(e)?;
    let (a, b) = p.x_range();
    if grid.min() > a || grid.max() < b + p.total_mass() {
        return Err(Error::Domain(format!(
            "label grid [{}, {}] must contain [{a}, {}]",
            grid.min(),
            grid.max(),
            b + p.total_mass()
        )));
    }
    to_lagrangian(&p, grid)
}
