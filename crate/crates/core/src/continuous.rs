//! Spectrum and eigenfunctions of the Kirchhoff Laplacian `L`, assembled from
//! the spectrum of `P`.
//!
//! Away from the Dirichlet values `(pi n)^2` every eigenvalue of `L` in the
//! band `J_n` is `kappa(t, n)` for an eigenvalue `t` of `P` in `I_n`, with
//! eigenfunctions obtained by lifting vertex eigenvectors edge by edge
//! (`gamma_lift`). At `(pi n)^2` the kernel splits into a vertex part (sign
//! vectors `h(x) = (-1)^n h(y)` carried by `cos(pi n t)`) and a flow part
//! (edge coefficients with vanishing weighted divergence carried by
//! `sin(pi n t)`); both are computed as nullspaces.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::discrete::{
    canonical_basis, discrete_spectrum, normalize_sign, DiscreteEigenpair, VertexFunction,
};
use crate::edge_function::{phi1, TrigEdgeFunction};
use crate::error::{Error, Result};
use crate::network::{DirEdge, Network};

/// P-values within this distance of +-1 are treated as exactly +-1, and
/// band eigenvalues within this distance of `(pi n)^2` are rejected.
pub const BOUNDARY_TOL: f64 = 1e-9;

/// Relative singular-value threshold for nullspace rank decisions.
pub const NULLSPACE_TOL: f64 = 1e-10;

/// The `n`-th band: `J = [0, pi^2)`, `I = (-1, 1]` for `n = 0`;
/// `J = (pi^2 n^2, pi^2 (n+1)^2)`, `I = (-1, 1)` otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpectralBand {
    pub n: usize,
}

impl SpectralBand {
    pub fn new(n: usize) -> Self {
        SpectralBand { n }
    }

    /// Endpoints of `J`; the lower one is included only for `n = 0`.
    pub fn lambda_range(&self) -> (f64, f64) {
        let n = self.n as f64;
        ((PI * n).powi(2), (PI * (n + 1.0)).powi(2))
    }

    /// Membership of a P-value in `I`.
    pub fn contains(&self, t: f64) -> bool {
        t > -1.0 && (t < 1.0 || (self.n == 0 && t == 1.0))
    }

    pub fn kappa(&self, t: f64) -> Result<f64> {
        kappa(t, self.n)
    }
}

/// Inverse of `lambda -> cos(sqrt(lambda))` on band `n`:
/// `(pi n + arccos t)^2` for even `n`, `(pi (n+1) - arccos t)^2` for odd `n`.
pub fn kappa(t: f64, n: usize) -> Result<f64> {
    if !(-1.0..=1.0).contains(&t) {
        return Err(Error::Domain(format!("kappa needs t in [-1, 1], got {t}")));
    }
    let n = n as f64;
    let theta = t.acos();
    Ok(if (n as usize).is_multiple_of(2) {
        (PI * n + theta).powi(2)
    } else {
        (PI * (n + 1.0) - theta).powi(2)
    })
}

/// Distance from `lambda` to the nearest Dirichlet value `(pi n)^2`, `n >= 1`.
pub fn dirichlet_distance(lambda: f64) -> f64 {
    let n = (lambda.max(0.0).sqrt() / PI).round().max(1.0);
    (lambda - (PI * n).powi(2)).abs()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EigenKind {
    Band(usize),
    DirichletVertex(usize),
    DirichletFlow(usize),
}

impl EigenKind {
    pub fn label(&self) -> &'static str {
        match self {
            EigenKind::Band(_) => "band",
            EigenKind::DirichletVertex(_) => "dirichlet_vertex",
            EigenKind::DirichletFlow(_) => "dirichlet_flow",
        }
    }

    pub fn n(&self) -> usize {
        match *self {
            EigenKind::Band(n) | EigenKind::DirichletVertex(n) | EigenKind::DirichletFlow(n) => n,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ContinuousEigenpair<'a> {
    pub lambda: f64,
    /// Unit norm in `L2(X1, m1)`.
    pub eigenfunction: TrigEdgeFunction<'a>,
    pub kind: EigenKind,
    /// Position within its band or Dirichlet kernel.
    pub index: usize,
    /// Eigenvalue of `P` the pair was lifted from (band pairs only).
    pub source_p_value: Option<f64>,
    /// Unit `l2(m0)` vertex eigenvector the pair was lifted from.
    pub source_vector: Option<VertexFunction<'a>>,
}

/// Lifts a vertex function to the edgewise solution of `-F'' = lambda F`
/// with vertex values `h`: `b(x) = h(x)`,
/// `a(xy) = (h(y) - h(x) cos sqrt(lambda)) / Phi(sqrt(lambda))`.
pub fn gamma_lift<'a>(net: &'a Network, lambda: f64, h: &VertexFunction<'_>) -> Result<TrigEdgeFunction<'a>> {
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(Error::Domain(format!(
            "lambda = {lambda} must be finite and >= 0"
        )));
    }
    if lambda > 1.0 && dirichlet_distance(lambda) <= BOUNDARY_TOL {
        return Err(Error::DirichletValue(lambda));
    }
    let z = lambda.sqrt();
    let (cos, phi) = (z.cos(), phi1(z));
    let a = net
        .directed_edges()
        .map(|d| {
            let (x, y) = net.endpoints(d);
            (h.get(y) - h.get(x) * cos) / phi
        })
        .collect();
    TrigEdgeFunction::new(net, lambda, h.values().to_vec(), a)
}

/// Band pairs plus the P-values that were set aside.
#[derive(Debug, Clone)]
pub struct BandAssembly<'a> {
    pub n: usize,
    pub pairs: Vec<ContinuousEigenpair<'a>>,
    pub diagnostics: Vec<String>,
}

/// Eigenpairs of `L` in band `n`, one per eigenvalue of `P` in `I_n`
/// (with multiplicity).
pub fn band_eigenpairs(net: &Network, n: usize) -> Result<BandAssembly<'_>> {
    let spectrum = discrete_spectrum(net)?;
    band_eigenpairs_from(net, &spectrum, n)
}

/// As [`band_eigenpairs`], reusing an already computed spectrum of `P`.
pub fn band_eigenpairs_from<'a>(
    net: &'a Network,
    spectrum: &[DiscreteEigenpair<'a>],
    n: usize,
) -> Result<BandAssembly<'a>> {
    let band = SpectralBand::new(n);
    let (lo, hi) = band.lambda_range();
    let mut pairs = Vec::new();
    let mut diagnostics = Vec::new();
    for p in spectrum {
        let t = snap_p_value(p.value);
        if n == 0 && (t - p.value).abs() > 1e-12 {
            diagnostics.push(format!(
                "band {n}: P-value {:.12e} within {BOUNDARY_TOL:e} of {t} treated as {t}",
                p.value
            ));
        }
        if !band.contains(t) {
            continue;
        }
        let lambda = band.kappa(t)?;
        let near_lo = n > 0 && (lambda - lo).abs() <= BOUNDARY_TOL;
        if near_lo || (hi - lambda).abs() <= BOUNDARY_TOL {
            diagnostics.push(format!(
                "band {n}: lambda {lambda:.12e} from P-value {t:.12e} lies on a Dirichlet value; rejected"
            ));
            continue;
        }
        let lifted = gamma_lift(net, lambda, &p.vector)?.scaled(Complex64::new(2f64.sqrt(), 0.0));
        let norm = lifted.norm();
        let index = pairs.len();
        pairs.push(ContinuousEigenpair {
            lambda,
            eigenfunction: lifted.scaled(Complex64::new(1.0 / norm, 0.0)),
            kind: EigenKind::Band(n),
            index,
            source_p_value: Some(t),
            source_vector: Some(p.vector.clone()),
        });
    }
    Ok(BandAssembly {
        n,
        pairs,
        diagnostics,
    })
}

fn snap_p_value(t: f64) -> f64 {
    if (t - 1.0).abs() <= BOUNDARY_TOL {
        1.0
    } else if (t + 1.0).abs() <= BOUNDARY_TOL {
        -1.0
    } else {
        t
    }
}

/// Basis of `ker(L - (pi n)^2)` with computed and structurally predicted
/// dimensions.
#[derive(Debug, Clone)]
pub struct DirichletKernel<'a> {
    pub n: usize,
    pub dim_vertex: usize,
    pub dim_flow: usize,
    /// 1 if `n` is even or the network is bipartite.
    pub predicted_vertex: usize,
    /// Cycle rank for even `n`; `|E| - |V| + [bipartite]` for odd `n`.
    pub predicted_flow: usize,
    pub basis: Vec<ContinuousEigenpair<'a>>,
}

impl DirichletKernel<'_> {
    pub fn dim(&self) -> usize {
        self.dim_vertex + self.dim_flow
    }

    pub fn matches_prediction(&self) -> bool {
        self.dim_vertex == self.predicted_vertex && self.dim_flow == self.predicted_flow
    }
}

pub fn dirichlet_kernel(net: &Network, n: usize) -> Result<DirichletKernel<'_>> {
    if n == 0 {
        return Err(Error::Domain("Dirichlet kernels are indexed by n >= 1".into()));
    }
    let lambda = (PI * n as f64).powi(2);
    let nv = net.num_vertices();
    let ne = net.num_edges();
    let even = n.is_multiple_of(2);
    let structure = net.structure_report();
    let mut basis = Vec::new();

    // vertex part: h(u) = (-1)^n h(v) on every edge
    let parity = if even { 1.0 } else { -1.0 };
    let mut sign_system = DMatrix::zeros(ne, nv);
    for (i, e) in net.edges().iter().enumerate() {
        sign_system[(i, e.u)] = 1.0;
        sign_system[(i, e.v)] = -parity;
    }
    let vertex_null = canonical_basis(&nullspace(&sign_system), nv);
    for v in &vertex_null {
        let mut h: Vec<f64> = v.iter().copied().collect();
        normalize_sign(&mut h);
        let f = TrigEdgeFunction::new(
            net,
            lambda,
            h.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
            vec![Complex64::new(0.0, 0.0); 2 * ne],
        )?;
        let norm = f.norm();
        let index = basis.len();
        basis.push(ContinuousEigenpair {
            lambda,
            eigenfunction: f.scaled(Complex64::new(1.0 / norm, 0.0)),
            kind: EigenKind::DirichletVertex(n),
            index,
            source_p_value: None,
            source_vector: None,
        });
    }
    let dim_vertex = basis.len();

    // flow part: a(yx) = (-1)^{n+1} a(xy), sum_y c(xy) a(xy) = 0
    let reverse = -parity;
    let mut flow_system = DMatrix::zeros(nv, ne);
    for (i, e) in net.edges().iter().enumerate() {
        flow_system[(e.u, i)] += e.c;
        flow_system[(e.v, i)] += e.c * reverse;
    }
    let weights: Vec<f64> = net.edges().iter().map(|e| e.c).collect();
    let flows = weighted_orthonormalize(canonical_basis(&nullspace(&flow_system), ne), &weights);
    let scale = PI * n as f64;
    for (j, flow) in flows.iter().enumerate() {
        let mut coeff: Vec<f64> = flow.iter().copied().collect();
        normalize_sign(&mut coeff);
        let mut a = vec![Complex64::new(0.0, 0.0); 2 * ne];
        for (e, &val) in coeff.iter().enumerate() {
            a[net.dir_index(DirEdge {
                edge: e,
                forward: true,
            })] = Complex64::new(scale * val, 0.0);
            a[net.dir_index(DirEdge {
                edge: e,
                forward: false,
            })] = Complex64::new(scale * reverse * val, 0.0);
        }
        let f = TrigEdgeFunction::new(net, lambda, vec![Complex64::new(0.0, 0.0); nv], a)?;
        let norm = f.norm();
        basis.push(ContinuousEigenpair {
            lambda,
            eigenfunction: f.scaled(Complex64::new(1.0 / norm, 0.0)),
            kind: EigenKind::DirichletFlow(n),
            index: j,
            source_p_value: None,
            source_vector: None,
        });
    }

    let predicted_vertex = usize::from(even || structure.bipartite);
    let predicted_flow = if even {
        structure.cycle_rank
    } else {
        ne + usize::from(structure.bipartite) - nv
    };
    Ok(DirichletKernel {
        n,
        dim_vertex,
        dim_flow: flows.len(),
        predicted_vertex,
        predicted_flow,
        basis,
    })
}

/// Right nullspace of `mat`: right singular vectors whose singular value is
/// at most `NULLSPACE_TOL` times the largest.
pub fn nullspace(mat: &DMatrix<f64>) -> Vec<DVector<f64>> {
    let (rows, cols) = mat.shape();
    let square = if rows < cols {
        let mut padded = DMatrix::zeros(cols, cols);
        padded.view_mut((0, 0), (rows, cols)).copy_from(mat);
        padded
    } else {
        mat.clone()
    };
    let svd = square.svd(false, true);
    let v_t = svd.v_t.expect("requested right singular vectors");
    let smax = svd.singular_values.max();
    svd.singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s <= NULLSPACE_TOL * smax || smax == 0.0)
        .map(|(i, _)| v_t.row(i).transpose())
        .collect()
}

/// Gram-Schmidt in the inner product `sum_i w_i u_i v_i`.
fn weighted_orthonormalize(vectors: Vec<DVector<f64>>, weights: &[f64]) -> Vec<DVector<f64>> {
    let dot = |a: &DVector<f64>, b: &DVector<f64>| -> f64 {
        a.iter()
            .zip(b.iter())
            .zip(weights)
            .map(|((x, y), w)| x * y * w)
            .sum()
    };
    let mut out: Vec<DVector<f64>> = Vec::with_capacity(vectors.len());
    for mut v in vectors {
        for _ in 0..2 {
            for q in &out {
                let d = dot(q, &v);
                v.axpy(-d, q, 1.0);
            }
        }
        let norm = dot(&v, &v).sqrt();
        if norm > 1e-12 {
            out.push(v / norm);
        }
    }
    out
}

/// Structural predicates of the network alongside the computed kernel data.
#[derive(Debug, Clone, PartialEq)]
pub struct Predicates {
    pub bipartite: bool,
    pub is_tree: bool,
    pub cycle_rank: usize,
    /// Exactly one cycle, of odd length.
    pub single_odd_cycle: bool,
    /// Every computed Dirichlet dimension agrees with its structural
    /// prediction.
    pub dimensions_match_structure: bool,
    /// `ker(L - (pi n)^2) = {0}` for all `n = 1..=n_max` (computed).
    pub all_dirichlet_kernels_trivial: bool,
    /// `0` is an eigenvalue of `A` within the computed range.
    pub zero_in_point_spectrum_of_a: bool,
}

#[derive(Debug, Clone)]
pub struct SpectrumReport<'a> {
    pub n_max: usize,
    pub p_spectrum: Vec<DiscreteEigenpair<'a>>,
    pub bands: Vec<BandAssembly<'a>>,
    pub dirichlet: Vec<DirichletKernel<'a>>,
    pub predicates: Predicates,
}

impl<'a> SpectrumReport<'a> {
    /// All eigenpairs sorted by `lambda` (bands before Dirichlet pairs on ties).
    pub fn pairs(&self) -> Vec<&ContinuousEigenpair<'a>> {
        let mut all: Vec<&ContinuousEigenpair<'a>> = self
            .bands
            .iter()
            .flat_map(|b| b.pairs.iter())
            .chain(self.dirichlet.iter().flat_map(|d| d.basis.iter()))
            .collect();
        all.sort_by(|p, q| p.lambda.total_cmp(&q.lambda));
        all
    }

    pub fn lambdas(&self) -> Vec<f64> {
        self.pairs().iter().map(|p| p.lambda).collect()
    }

    /// Band `n` pairs followed by the Dirichlet pairs at `(pi n)^2`.
    pub fn group(&self, n: usize) -> Vec<&ContinuousEigenpair<'a>> {
        let mut out: Vec<_> = self
            .dirichlet
            .iter()
            .filter(|d| d.n == n)
            .flat_map(|d| d.basis.iter())
            .collect();
        out.extend(
            self.bands
                .iter()
                .filter(|b| b.n == n)
                .flat_map(|b| b.pairs.iter()),
        );
        out.sort_by(|p, q| p.lambda.total_cmp(&q.lambda));
        out
    }

    pub fn diagnostics(&self) -> Vec<&str> {
        self.bands
            .iter()
            .flat_map(|b| b.diagnostics.iter().map(String::as_str))
            .collect()
    }
}

/// Band pairs for `n = 0..=n_max` and Dirichlet kernels for `n = 1..=n_max`.
pub fn spectrum_report(net: &Network, n_max: usize) -> Result<SpectrumReport<'_>> {
    let p_spectrum = discrete_spectrum(net)?;
    let bands = (0..=n_max)
        .map(|n| band_eigenpairs_from(net, &p_spectrum, n))
        .collect::<Result<Vec<_>>>()?;
    let dirichlet = (1..=n_max)
        .map(|n| dirichlet_kernel(net, n))
        .collect::<Result<Vec<_>>>()?;
    let s = net.structure_report();
    let predicates = Predicates {
        bipartite: s.bipartite,
        is_tree: s.is_tree,
        cycle_rank: s.cycle_rank,
        single_odd_cycle: s.cycle_rank == 1 && !s.bipartite,
        dimensions_match_structure: dirichlet.iter().all(DirichletKernel::matches_prediction),
        all_dirichlet_kernels_trivial: dirichlet.iter().all(|d| d.dim() == 0),
        zero_in_point_spectrum_of_a: dirichlet.iter().any(|d| d.dim() > 0),
    };
    Ok(SpectrumReport {
        n_max,
        p_spectrum,
        bands,
        dirichlet,
        predicates,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::edge_function::phi;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn single_edge() -> Network {
        Network::from_edges(&[("x", "y", 1.0)]).unwrap()
    }

    fn triangle() -> Network {
        Network::from_edges(&[("x", "y", 1.0), ("y", "z", 1.0), ("x", "z", 1.0)]).unwrap()
    }

    fn path() -> Network {
        Network::from_edges(&[("x", "y", 1.0), ("y", "z", 1.0)]).unwrap()
    }

    /// Root of `cos(sqrt(lambda)) = t` in `(lo, hi)` by bisection.
    fn bisect(t: f64, mut lo: f64, mut hi: f64) -> f64 {
        let g = |l: f64| l.sqrt().cos() - t;
        let sign_lo = g(lo).signum();
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if g(mid).signum() == sign_lo {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn kappa_values() {
        assert_eq!(kappa(1.0, 0).unwrap(), 0.0);
        assert!((kappa(0.0, 0).unwrap() - (PI / 2.0).powi(2)).abs() < 1e-15);
        let oracle = bisect(-0.5, PI * PI, 4.0 * PI * PI);
        let k = kappa(-0.5, 1).unwrap();
        assert!((k - oracle).abs() < 1e-10);
        assert!((k - (4.0 * PI / 3.0).powi(2)).abs() < 1e-12);
        assert!(kappa(1.5, 0).is_err());
    }

    #[test]
    fn kappa_inverts_cosine_on_each_band() {
        for n in 0..5 {
            let band = SpectralBand::new(n);
            let (lo, hi) = band.lambda_range();
            for i in 1..100 {
                let t = -1.0 + 2.0 * i as f64 / 100.0;
                let lambda = band.kappa(t).unwrap();
                assert!((lambda.sqrt().cos() - t).abs() < 1e-12);
                assert!(lambda > lo && lambda < hi);
            }
        }
    }

    #[test]
    fn gamma_lift_of_constant_is_constant() {
        let net = triangle();
        let one = VertexFunction::constant(&net, c(1.0));
        let f = gamma_lift(&net, 0.0, &one).unwrap();
        assert!(f.a().iter().all(|a| a.norm() == 0.0));
    }

    #[test]
    fn gamma_lift_linear_interpolation() {
        let net = single_edge();
        let h = VertexFunction::from_real(&net, &[1.0, 0.0]).unwrap();
        let f = gamma_lift(&net, 0.0, &h).unwrap();
        let d = DirEdge {
            edge: 0,
            forward: true,
        };
        for t in [0.0, 0.3, 1.0] {
            assert!((f.eval(d, t) - c(1.0 - t)).norm() < 1e-15);
        }
    }

    #[test]
    fn gamma_lift_matches_interpolation_form() {
        let net = triangle();
        let h = VertexFunction::from_real(&net, &[0.3, -1.2, 0.8]).unwrap();
        let lambda: f64 = 5.7;
        let z = lambda.sqrt();
        let f = gamma_lift(&net, lambda, &h).unwrap();
        for d in net.directed_edges() {
            let (x, y) = net.endpoints(d);
            for t in [0.0, 0.25, 0.6, 1.0] {
                let direct = (h.get(x) * phi(z, 1.0 - t) + h.get(y) * phi(z, t)) / phi1(z);
                assert!((f.eval(d, t) - direct).norm() < 1e-12);
            }
        }
        assert!(f.orientation_defect(50) < 1e-10);
    }

    #[test]
    fn gamma_lift_rejects_dirichlet_values() {
        let net = triangle();
        let one = VertexFunction::constant(&net, c(1.0));
        assert!(matches!(
            gamma_lift(&net, 4.0 * PI * PI, &one),
            Err(Error::DirichletValue(_))
        ));
    }

    #[test]
    fn triangle_lift_satisfies_kirchhoff() {
        let net = triangle();
        let spec = discrete_spectrum(&net).unwrap();
        let lambda = (2.0 * PI / 3.0).powi(2);
        for p in spec.iter().filter(|p| (p.value + 0.5).abs() < 1e-12) {
            let f = gamma_lift(&net, lambda, &p.vector).unwrap();
            // symbolic derivative at each vertex: -b(x) z sin(0) + a(xy) cos(0) = a(xy)
            for x in 0..3 {
                let k: Complex64 = net
                    .neighbors(x)
                    .iter()
                    .map(|&(_, e)| f.derivative(net.leaving(x, e), 0.0) * net.edge(e).c)
                    .sum();
                assert!(k.norm() <= 1e-10);
            }
            for r in f.vertex_residuals() {
                assert!(r.continuity_spread <= 1e-10 && r.kirchhoff.norm() <= 1e-10);
            }
        }
    }

    #[test]
    fn single_edge_bands() {
        let net = single_edge();
        let b0 = band_eigenpairs(&net, 0).unwrap();
        assert_eq!(b0.pairs.len(), 1);
        assert_eq!(b0.pairs[0].lambda, 0.0);
        for n in 1..4 {
            assert!(band_eigenpairs(&net, n).unwrap().pairs.is_empty());
        }
    }

    #[test]
    fn triangle_bands() {
        let net = triangle();
        let b0: Vec<f64> = band_eigenpairs(&net, 0)
            .unwrap()
            .pairs
            .iter()
            .map(|p| p.lambda)
            .collect();
        let expected = [0.0, (2.0 * PI / 3.0).powi(2), (2.0 * PI / 3.0).powi(2)];
        assert_eq!(b0.len(), 3);
        for (l, e) in b0.iter().zip(expected) {
            assert!((l - e).abs() < 1e-10);
        }
        let b1: Vec<f64> = band_eigenpairs(&net, 1)
            .unwrap()
            .pairs
            .iter()
            .map(|p| p.lambda)
            .collect();
        assert_eq!(b1.len(), 2);
        for l in b1 {
            assert!((l - (4.0 * PI / 3.0).powi(2)).abs() < 1e-10);
        }
    }

    #[test]
    fn band_pairs_are_normalized_eigenfunctions() {
        let net = Network::from_edges(&[("a", "b", 0.5), ("b", "c", 2.0), ("c", "a", 1.0), ("c", "d", 1.5)])
            .unwrap();
        for n in 0..3 {
            for p in band_eigenpairs(&net, n).unwrap().pairs {
                assert!((p.eigenfunction.norm() - 1.0).abs() < 1e-8);
                for r in p.eigenfunction.vertex_residuals() {
                    assert!(r.continuity_spread <= 1e-10);
                    assert!(r.kirchhoff.norm() <= 1e-10);
                }
                assert!((p.lambda.sqrt().cos() - p.source_p_value.unwrap()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn single_edge_dirichlet_is_cosine() {
        let net = single_edge();
        let k = dirichlet_kernel(&net, 1).unwrap();
        assert_eq!((k.dim_vertex, k.dim_flow), (1, 0));
        assert!(k.matches_prediction());
        let f = &k.basis[0].eigenfunction;
        let d = DirEdge {
            edge: 0,
            forward: true,
        };
        for t in [0.0, 0.2, 0.5, 0.9] {
            assert!((f.eval(d, t) - c(2f64.sqrt() * (PI * t).cos())).norm() < 1e-12);
        }
    }

    #[test]
    fn triangle_dirichlet_kernels() {
        let net = triangle();
        let k1 = dirichlet_kernel(&net, 1).unwrap();
        assert_eq!(k1.dim(), 0);
        // explicit solve: a1 + a2 = a2 + a3 = a1 + a3 = 0 forces a = 0
        let m = DMatrix::from_row_slice(3, 3, &[1.0, 1.0, 0.0, 0.0, 1.0, 1.0, 1.0, 0.0, 1.0]);
        assert!(nullspace(&m).is_empty());

        let k2 = dirichlet_kernel(&net, 2).unwrap();
        assert_eq!((k2.dim_vertex, k2.dim_flow), (1, 1));
        assert!(k2.matches_prediction());
        // the flow basis element circulates around the cycle: sin(2 pi t) shape
        let flow = &k2.basis[1];
        assert_eq!(flow.kind, EigenKind::DirichletFlow(2));
        for r in flow.eigenfunction.vertex_residuals() {
            assert!(r.continuity_spread < 1e-12 && r.kirchhoff.norm() < 1e-12);
        }
        let ip = k2.basis[0]
            .eigenfunction
            .inner_product(&flow.eigenfunction)
            .unwrap();
        assert!(ip.norm() < 1e-12);
    }

    #[test]
    fn spectrum_reports() {
        let net = single_edge();
        let report = spectrum_report(&net, 3).unwrap();
        let lambdas = report.lambdas();
        assert_eq!(lambdas.len(), 4);
        for (l, n) in lambdas.iter().zip(0..4) {
            assert!((l - (PI * n as f64).powi(2)).abs() < 1e-10);
        }

        let tri = triangle();
        let report = spectrum_report(&tri, 2).unwrap();
        let l = report.lambdas();
        let expected = [
            0.0,
            (2.0 * PI / 3.0).powi(2),
            (2.0 * PI / 3.0).powi(2),
            (4.0 * PI / 3.0).powi(2),
            (4.0 * PI / 3.0).powi(2),
            4.0 * PI * PI,
            4.0 * PI * PI,
            (8.0 * PI / 3.0).powi(2),
            (8.0 * PI / 3.0).powi(2),
        ];
        assert_eq!(l.len(), expected.len());
        for (a, b) in l.iter().zip(expected) {
            assert!((a - b).abs() < 1e-10);
        }
        assert_eq!(report.dirichlet[0].dim(), 0);

        let p = path();
        let report = spectrum_report(&p, 1).unwrap();
        let b0: Vec<f64> = report.bands[0].pairs.iter().map(|p| p.lambda).collect();
        assert_eq!(b0.len(), 2);
        assert!((b0[1] - (PI / 2.0).powi(2)).abs() < 1e-10);
        assert_eq!(report.bands[1].pairs.len(), 1);
        assert!((report.bands[1].pairs[0].lambda - (1.5 * PI).powi(2)).abs() < 1e-10);
        let k1 = &report.dirichlet[0];
        assert_eq!((k1.dim_vertex, k1.dim_flow), (1, 0));
        assert!(report.predicates.dimensions_match_structure);
        assert!(report.predicates.zero_in_point_spectrum_of_a);
    }
}
