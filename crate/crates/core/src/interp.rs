//! Cubic Hermite and linear interpolation helpers.

/// Cubic Hermite on a cell of width `w`, local coordinate `t in [0,1]`.
#[inline]
pub fn hermite(f0: f64, f1: f64, d0: f64, d1: f64, w: f64, t: f64) -> f64 {
    let t2 = t * t;
    let t3 = t2 * t;
    let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    let h10 = t3 - 2.0 * t2 + t;
    let h01 = -2.0 * t3 + 3.0 * t2;
    let h11 = t3 - t2;
    h00 * f0 + h10 * w * d0 + h01 * f1 + h11 * w * d1
}

/// Derivative (with respect to the physical variable) of [`hermite`].
#[inline]
pub fn hermite_slope(f0: f64, f1: f64, d0: f64, d1: f64, w: f64, t: f64) -> f64 {
    let t2 = t * t;
    let g00 = 6.0 * t2 - 6.0 * t;
    let g10 = 3.0 * t2 - 4.0 * t + 1.0;
    let g01 = -6.0 * t2 + 6.0 * t;
    let g11 = 3.0 * t2 - 2.0 * t;
    (g00 * f0 + g01 * f1) / w + g10 * d0 + g11 * d1
}

/// Fourth-order finite-difference slopes on a uniform grid.
pub fn fd_slopes(v: &[f64], step: f64) -> Vec<f64> {
    let n = v.len();
    let mut d = vec![0.0; n];
    if n < 5 {
        for i in 0..n {
            let (a, b) = (i.saturating_sub(1), (i + 1).min(n - 1));
            d[i] = (v[b] - v[a]) / ((b - a) as f64 * step);
        }
        return d;
    }
    let c = 1.0 / (12.0 * step);
    d[0] = c * (-25.0 * v[0] + 48.0 * v[1] - 36.0 * v[2] + 16.0 * v[3] - 3.0 * v[4]);
    d[1] = c * (-3.0 * v[0] - 10.0 * v[1] + 18.0 * v[2] - 6.0 * v[3] + v[4]);
    for i in 2..n - 2 {
        d[i] = c * (v[i - 2] - 8.0 * v[i - 1] + 8.0 * v[i + 1] - v[i + 2]);
    }
    d[n - 2] = -c * (-3.0 * v[n - 1] - 10.0 * v[n - 2] + 18.0 * v[n - 3] - 6.0 * v[n - 4] + v[n - 5]);
    d[n - 1] = -c * (-25.0 * v[n - 1] + 48.0 * v[n - 2] - 36.0 * v[n - 3] + 16.0 * v[n - 4] - 3.0 * v[n - 5]);
    d
}

/// Second-order centered differences (one-sided at the ends).
pub fn centered_diff(v: &[f64], step: f64) -> Vec<f64> {
    let n = v.len();
    let mut d = vec![0.0; n];
    for i in 1..n - 1 {
        d[i] = (v[i + 1] - v[i - 1]) / (2.0 * step);
    }
    d[0] = (v[1] - v[0]) / step;
    d[n - 1] = (v[n - 1] - v[n - 2]) / step;
    d
}

/// Largest `j` with `xs[j] <= x`, clamped to `0..=len-2`. `xs` must be
/// nondecreasing.
pub fn locate_sorted(xs: &[f64], x: f64) -> usize {
    let n = xs.len();
    let p = xs.partition_point(|&v| v <= x);
    p.saturating_sub(1).min(n - 2)
}

/// Piecewise-linear interpolation over nondecreasing abscissae. Returns
/// `outside` beyond the data range.
pub fn linear(xs: &[f64], ys: &[f64], x: f64, outside: f64) -> f64 {
    let n = xs.len();
    if n == 0 || x < xs[0] || x > xs[n - 1] {
        return outside;
    }
    let j = locate_sorted(xs, x);
    let w = xs[j + 1] - xs[j];
    if w <= 0.0 {
        return ys[j + 1];
    }
    let t = (x - xs[j]) / w;
    ys[j] + t * (ys[j + 1] - ys[j])
}

/// Limits Hermite slopes so that monotone data gives a monotone interpolant
/// (Fritsch–Carlson). Only cells that would violate monotonicity are touched.
pub fn limit_monotone(v: &[f64], d: &mut [f64], step: f64) {
    for j in 0..v.len() - 1 {
        let secant = (v[j + 1] - v[j]) / step;
        if secant <= 0.0 {
            d[j] = 0.0;
            d[j + 1] = 0.0;
            continue;
        }
        let a = d[j] / secant;
        let b = d[j + 1] / secant;
        let r2 = a * a + b * b;
        if a < 0.0 || b < 0.0 || r2 > 9.0 {
            let tau = if r2 > 9.0 { 3.0 / r2.sqrt() } else { 1.0 };
            d[j] = tau * a.max(0.0) * secant;
            d[j + 1] = tau * b.max(0.0) * secant;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermite_reproduces_cubics() {
        let f = |x: f64| x * x * x - 2.0 * x + 1.0;
        let df = |x: f64| 3.0 * x * x - 2.0;
        let (a, b) = (0.3, 0.8);
        for k in 0..=10 {
            let t = k as f64 / 10.0;
            let x = a + t * (b - a);
            let v = hermite(f(a), f(b), df(a), df(b), b - a, t);
            assert!((v - f(x)).abs() < 1e-14);
            let s = hermite_slope(f(a), f(b), df(a), df(b), b - a, t);
            assert!((s - df(x)).abs() < 1e-13);
        }
    }

    #[test]
    fn fd_slopes_are_exact_for_quartics() {
        let h = 0.1;
        let v: Vec<f64> = (0..12).map(|i| (i as f64 * h).powi(4)).collect();
        let d = fd_slopes(&v, h);
        for (i, di) in d.iter().enumerate() {
            let x = i as f64 * h;
            assert!((di - 4.0 * x.powi(3)).abs() < 1e-10, "{i}");
        }
    }

    #[test]
    fn linear_interp_and_outside() {
        let xs = [0.0, 1.0, 1.0, 3.0];
        let ys = [0.0, 1.0, 1.0, 5.0];
        assert_eq!(linear(&xs, &ys, 2.0, 0.0), 3.0);
        assert_eq!(linear(&xs, &ys, 4.0, -1.0), -1.0);
        assert_eq!(linear(&xs, &ys, 0.5, 0.0), 0.5);
    }
}
