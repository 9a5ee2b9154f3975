//! The transition operator `P` on `l2(X0, m0)` and its eigendecomposition.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::network::Network;

/// Eigenvalues closer than this are treated as one degenerate cluster.
pub const CLUSTER_GAP: f64 = 1e-9;

const EIGEN_MAX_ITER: usize = 10_000;

/// A function on the vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexFunction<'a> {
    net: &'a Network,
    values: Vec<Complex64>,
}

impl<'a> VertexFunction<'a> {
    pub fn new(net: &'a Network, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != net.num_vertices() {
            return Err(Error::Mismatch(format!(
                "{} values for {} vertices",
                values.len(),
                net.num_vertices()
            )));
        }
        if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::Domain("non-finite vertex value".into()));
        }
        Ok(VertexFunction { net, values })
    }

    pub fn from_real(net: &'a Network, values: &[f64]) -> Result<Self> {
        Self::new(net, values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn constant(net: &'a Network, c: Complex64) -> Self {
        VertexFunction {
            net,
            values: vec![c; net.num_vertices()],
        }
    }

    pub fn network(&self) -> &'a Network {
        self.net
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn get(&self, x: usize) -> Complex64 {
        self.values[x]
    }

    /// `sum_x m0(x) conj(f(x)) g(x)`.
    pub fn inner_product(&self, other: &Self) -> Complex64 {
        self.values
            .iter()
            .zip(&other.values)
            .zip(self.net.measures())
            .map(|((f, g), m)| f.conj() * g * m)
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.inner_product(self).re.max(0.0).sqrt()
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        VertexFunction {
            net: self.net,
            values: self.values.iter().map(|v| v * s).collect(),
        }
    }

    /// `a * self + b * other`.
    pub fn combine(&self, a: Complex64, other: &Self, b: Complex64) -> Self {
        VertexFunction {
            net: self.net,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(x, y)| a * x + b * y)
                .collect(),
        }
    }
}

/// `(P h)(x) = (1 / m0(x)) sum_{y ~ x} c(xy) h(y)`.
pub fn apply_transition<'a>(net: &'a Network, h: &VertexFunction<'_>) -> VertexFunction<'a> {
    let values = (0..net.num_vertices())
        .map(|x| {
            let sum: Complex64 = net
                .neighbors(x)
                .iter()
                .map(|&(y, e)| h.get(y) * net.edge(e).c)
                .sum();
            sum / net.measure(x)
        })
        .collect();
    VertexFunction { net, values }
}

/// Dense transition matrix, row `x` holding `c(xy) / m0(x)`.
pub fn transition_matrix(net: &Network) -> DMatrix<f64> {
    let n = net.num_vertices();
    let mut p = DMatrix::zeros(n, n);
    for e in net.edges() {
        p[(e.u, e.v)] = e.c / net.measure(e.u);
        p[(e.v, e.u)] = e.c / net.measure(e.v);
    }
    p
}

#[derive(Debug, Clone)]
pub struct DiscreteEigenpair<'a> {
    pub value: f64,
    /// Unit norm in `l2(m0)`.
    pub vector: VertexFunction<'a>,
}

/// All eigenpairs of `P`, sorted by value descending.
///
/// Solves the symmetric problem `D^{-1/2} C D^{-1/2}` and maps vectors back by
/// `D^{-1/2}`, which makes them orthonormal in `l2(m0)`. Within a cluster of
/// (numerically) equal eigenvalues the basis is rebuilt from the projections of
/// the vertex indicators, so the result does not depend on the solver's choice
/// of basis.
pub fn discrete_spectrum(net: &Network) -> Result<Vec<DiscreteEigenpair<'_>>> {
    let n = net.num_vertices();
    let inv_sqrt: Vec<f64> = net.measures().iter().map(|m| 1.0 / m.sqrt()).collect();
    let mut sym = DMatrix::zeros(n, n);
    for e in net.edges() {
        let w = e.c * inv_sqrt[e.u] * inv_sqrt[e.v];
        sym[(e.u, e.v)] = w;
        sym[(e.v, e.u)] = w;
    }
    let eig = SymmetricEigen::try_new(sym, f64::EPSILON, EIGEN_MAX_ITER)
        .ok_or(Error::NoConvergence(EIGEN_MAX_ITER))?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));

    let mut pairs = Vec::with_capacity(n);
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && eig.eigenvalues[order[end - 1]] - eig.eigenvalues[order[end]] <= CLUSTER_GAP {
            end += 1;
        }
        let cluster = &order[start..end];
        let mean = cluster.iter().map(|&i| eig.eigenvalues[i]).sum::<f64>() / cluster.len() as f64;
        let value = mean.clamp(-1.0, 1.0);

        let basis: Vec<DVector<f64>> = cluster
            .iter()
            .map(|&i| eig.eigenvectors.column(i).into_owned())
            .collect();
        let mut vectors = canonical_basis(&basis, n);
        vectors.sort_by_key(|v| v.iamax());
        for v in vectors {
            let mut values: Vec<f64> = (0..n).map(|x| v[x] * inv_sqrt[x]).collect();
            normalize_sign(&mut values);
            pairs.push(DiscreteEigenpair {
                value,
                vector: VertexFunction::from_real(net, &values)?,
            });
        }
        start = end;
    }
    Ok(pairs)
}

/// Orthonormal basis of `span(basis)` obtained by Gram-Schmidt on the
/// projections of `e_0, e_1, ...` onto that span.
pub(crate) fn canonical_basis(basis: &[DVector<f64>], dim: usize) -> Vec<DVector<f64>> {
    let k = basis.len();
    if k <= 1 {
        return basis.to_vec();
    }
    let mut out: Vec<DVector<f64>> = Vec::with_capacity(k);
    for i in 0..dim {
        if out.len() == k {
            break;
        }
        let mut v = DVector::zeros(dim);
        for q in basis {
            v.axpy(q[i], q, 1.0);
        }
        for _ in 0..2 {
            for q in &out {
                let d = q.dot(&v);
                v.axpy(-d, q, 1.0);
            }
        }
        let norm = v.norm();
        if norm > 1e-6 {
            out.push(v / norm);
        }
    }
    out
}

/// Scales so the first entry that is not negligible is positive.
pub(crate) fn normalize_sign(values: &mut [f64]) {
    let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if let Some(first) = values.iter().find(|v| v.abs() > 1e-12 * scale) {
        if *first < 0.0 {
            values.iter_mut().for_each(|v| *v = -*v);
        }
    }
}
