//! Trapezoid quadrature and discrete norms on uniform samples.

pub fn trapz(values: &[f64], step: f64) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let inner: f64 = values[1..n - 1].iter().sum();
    step * (inner + 0.5 * (values[0] + values[n - 1]))
}

/// Cumulative trapezoid integral, starting from zero.
pub fn cumtrapz(values: &[f64], step: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(values.len());
    let mut acc = 0.0;
    out.push(0.0);
    for w in values.windows(2) {
        acc += 0.5 * step * (w[0] + w[1]);
        out.push(acc);
    }
    out.truncate(values.len());
    out
}

pub fn l2(values: &[f64], step: f64) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let sq = |v: f64| v * v;
    let inner: f64 = values[1..n - 1].iter().map(|&v| sq(v)).sum();
    (step * (inner + 0.5 * (sq(values[0]) + sq(values[n - 1])))).sqrt()
}

pub fn linf(values: &[f64]) -> f64 {
    values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
}

/// Sup norm of `a - b`.
pub fn linf_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()))
}

/// Simpson's rule when the sample count is odd, trapezoid otherwise.
pub fn simpson_or_trapz(values: &[f64], step: f64) -> f64 {
    let n = values.len();
    if n < 3 || n % 2 == 0 {
        return trapz(values, step);
    }
    let mut s = values[0] + values[n - 1];
    for (i, v) in values.iter().enumerate().take(n - 1).skip(1) {
        s += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
    }
    s * step / 3.0
}
