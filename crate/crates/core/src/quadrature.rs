//! Quadrature rules on the uniform unit-interval grid `t_k = k/N`.

use num_complex::Complex64;

/// Composite Simpson rule over `values.len() - 1` panels of width `h`.
/// The panel count must be even.
pub fn simpson(values: &[Complex64], h: f64) -> Complex64 {
    let n = values.len() - 1;
    debug_assert!(n >= 2 && n.is_multiple_of(2), "simpson needs an even panel count");
    let mut odd = Complex64::new(0.0, 0.0);
    let mut even = Complex64::new(0.0, 0.0);
    for (k, v) in values.iter().enumerate().take(n).skip(1) {
        if k % 2 == 1 {
            odd += v;
        } else {
            even += v;
        }
    }
    (values[0] + values[n] + odd * 4.0 + even * 2.0) * (h / 3.0)
}

/// Composite trapezoid rule over the whole array.
pub fn trapezoid(values: &[Complex64], h: f64) -> Complex64 {
    let n = values.len() - 1;
    let inner: Complex64 = values[1..n].iter().sum();
    (inner + (values[0] + values[n]) * 0.5) * h
}

/// Running trapezoid integral: `out[k]` integrates from node 0 to node `k`.
pub fn cumulative_trapezoid(values: &[Complex64], h: f64) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(values.len());
    let mut acc = Complex64::new(0.0, 0.0);
    out.push(acc);
    for w in values.windows(2) {
        acc += (w[0] + w[1]) * (0.5 * h);
        out.push(acc);
    }
    out
}
