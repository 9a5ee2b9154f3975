//! The unit-ball averaging operator `A`.

use num_complex::Complex64;

use crate::continuous::ContinuousEigenpair;
use crate::edge_function::{phi1, SampledEdgeFunction};
use crate::network::Network;
use crate::quadrature::cumulative_trapezoid;

/// `AF(xy, t) = (1/m0(x)) sum_u c(xu) int_0^{1-t} F(xu, s) ds
///            + (1/m0(y)) sum_v c(yv) int_0^t F(yv, s) ds`,
/// with running trapezoid integrals on the sample grid.
pub fn apply_averaging<'a>(net: &'a Network, f: &SampledEdgeFunction<'a>) -> SampledEdgeFunction<'a> {
    let n = f.grid_size();
    let h = f.step();
    // ball[x][k] = (1/m0(x)) sum_u c(xu) int_0^{t_k} F(xu, s) ds
    let mut ball = vec![vec![Complex64::new(0.0, 0.0); n + 1]; net.num_vertices()];
    for (x, acc) in ball.iter_mut().enumerate() {
        let inv = 1.0 / net.measure(x);
        for &(_, e) in net.neighbors(x) {
            let w = net.edge(e).c * inv;
            let prefix = cumulative_trapezoid(&f.directed(net.leaving(x, e)), h);
            for (a, p) in acc.iter_mut().zip(prefix) {
                *a += p * w;
            }
        }
    }
    let values = net
        .edges()
        .iter()
        .map(|e| (0..=n).map(|k| ball[e.u][n - k] + ball[e.v][k]).collect())
        .collect();
    SampledEdgeFunction::from_values(net, n, values).expect("same shape as input")
}

/// Eigenvalue of `A` on an eigenfunction of `L`: `Phi(sqrt(lambda))`.
pub fn averaging_eigen_action(pair: &ContinuousEigenpair<'_>) -> f64 {
    phi1(pair.lambda.sqrt())
}
