//! Functions on the metric graph: per-edge uniform samples and closed-form
//! trigonometric edge functions, the weighted L2 inner product, and vertex
//! boundary-condition residuals.

use std::io::Write;
use std::ptr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::network::{DirEdge, Network};
use crate::quadrature::simpson;

pub const DEFAULT_GRID: usize = 256;

/// `Phi(z, t) = sin(z t) / z`, extended by `t` at `z = 0`.
pub fn phi(z: f64, t: f64) -> f64 {
    if z == 0.0 {
        t
    } else {
        (z * t).sin() / z
    }
}

/// `Phi(z) = Phi(z, 1)`.
pub fn phi1(z: f64) -> f64 {
    phi(z, 1.0)
}

pub(crate) fn check_grid(n: usize) -> Result<()> {
    if n < 2 || !n.is_multiple_of(2) {
        Err(Error::InvalidGrid(n))
    } else {
        Ok(())
    }
}

/// Per-vertex boundary-condition defects.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VertexResidual {
    /// Largest deviation of an incident edge trace from their mean.
    pub continuity_spread: f64,
    /// `sum_y c(xy) F'(xy, 0+)`.
    pub kirchhoff: Complex64,
}

/// A function sampled at `t_k = k/N`, `k = 0..=N`, on every edge in its
/// canonical orientation. The reversed orientation is the index reflection
/// `k -> N - k`.
#[derive(Debug, Clone)]
pub struct SampledEdgeFunction<'a> {
    net: &'a Network,
    n: usize,
    values: Vec<Vec<Complex64>>,
}

impl<'a> SampledEdgeFunction<'a> {
    pub fn from_values(net: &'a Network, n: usize, values: Vec<Vec<Complex64>>) -> Result<Self> {
        check_grid(n)?;
        if values.len() != net.num_edges() {
            return Err(Error::Mismatch(format!(
                "{} edge arrays for {} edges",
                values.len(),
                net.num_edges()
            )));
        }
        if let Some(bad) = values.iter().position(|v| v.len() != n + 1) {
            return Err(Error::Mismatch(format!(
                "edge {bad} has {} samples, expected {}",
                values[bad].len(),
                n + 1
            )));
        }
        if values
            .iter()
            .flatten()
            .any(|v| !(v.re.is_finite() && v.im.is_finite()))
        {
            return Err(Error::Domain("non-finite sample".into()));
        }
        Ok(SampledEdgeFunction { net, n, values })
    }

    /// Samples `f(edge, t)` on each canonical edge.
    pub fn from_fn(net: &'a Network, n: usize, mut f: impl FnMut(usize, f64) -> Complex64) -> Result<Self> {
        check_grid(n)?;
        let h = 1.0 / n as f64;
        let values = (0..net.num_edges())
            .map(|e| (0..=n).map(|k| f(e, k as f64 * h)).collect())
            .collect();
        Self::from_values(net, n, values)
    }

    pub fn constant(net: &'a Network, n: usize, c: Complex64) -> Result<Self> {
        Self::from_fn(net, n, |_, _| c)
    }

    pub fn zeros(net: &'a Network, n: usize) -> Result<Self> {
        Self::constant(net, n, Complex64::new(0.0, 0.0))
    }

    pub fn network(&self) -> &'a Network {
        self.net
    }

    pub fn grid_size(&self) -> usize {
        self.n
    }

    pub fn step(&self) -> f64 {
        1.0 / self.n as f64
    }

    /// Samples of a canonical edge.
    pub fn edge(&self, e: usize) -> &[Complex64] {
        &self.values[e]
    }

    pub fn values(&self) -> &[Vec<Complex64>] {
        &self.values
    }

    /// `F(d, t_k)` for a directed edge.
    pub fn at(&self, d: DirEdge, k: usize) -> Complex64 {
        if d.forward {
            self.values[d.edge][k]
        } else {
            self.values[d.edge][self.n - k]
        }
    }

    /// Samples along a directed edge.
    pub fn directed(&self, d: DirEdge) -> Vec<Complex64> {
        (0..=self.n).map(|k| self.at(d, k)).collect()
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if !ptr::eq(self.net, other.net) && self.net != other.net {
            return Err(Error::Mismatch("functions live on different networks".into()));
        }
        if self.n != other.n {
            return Err(Error::Mismatch(format!("grid sizes {} and {}", self.n, other.n)));
        }
        Ok(())
    }

    /// `sum_e c(e) * integral conj(F_e) G_e`, Simpson per edge, edges summed
    /// in storage order.
    pub fn inner_product(&self, other: &Self) -> Result<Complex64> {
        self.check_compatible(other)?;
        let h = self.step();
        let mut buf = vec![Complex64::new(0.0, 0.0); self.n + 1];
        let mut acc = Complex64::new(0.0, 0.0);
        for (e, edge) in self.net.edges().iter().enumerate() {
            for (b, (f, g)) in buf.iter_mut().zip(self.values[e].iter().zip(&other.values[e])) {
                *b = f.conj() * g;
            }
            acc += simpson(&buf, h) * edge.c;
        }
        Ok(acc)
    }

    pub fn norm(&self) -> f64 {
        self.inner_product(self)
            .expect("self-compatible")
            .re
            .max(0.0)
            .sqrt()
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        self.map(|v| v * s)
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        SampledEdgeFunction {
            net: self.net,
            n: self.n,
            values: self
                .values
                .iter()
                .map(|edge| edge.iter().map(|&v| f(v)).collect())
                .collect(),
        }
    }

    /// `a * self + b * other`.
    pub fn combine(&self, a: Complex64, other: &Self, b: Complex64) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(SampledEdgeFunction {
            net: self.net,
            n: self.n,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(f, g)| f.iter().zip(g).map(|(&x, &y)| a * x + b * y).collect())
                .collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.combine(Complex64::new(1.0, 0.0), other, Complex64::new(-1.0, 0.0))
    }

    /// Largest sample modulus.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().flatten().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Continuity spread and one-sided (3-point, O(h^2)) Kirchhoff sum at each
    /// vertex.
    pub fn vertex_residuals(&self) -> Vec<VertexResidual> {
        let h = self.step();
        (0..self.net.num_vertices())
            .map(|x| {
                let incident = self.net.neighbors(x);
                let traces: Vec<Complex64> = incident
                    .iter()
                    .map(|&(_, e)| self.at(self.net.leaving(x, e), 0))
                    .collect();
                let mean = traces.iter().sum::<Complex64>() / traces.len() as f64;
                let continuity_spread = traces.iter().map(|v| (v - mean).norm()).fold(0.0, f64::max);
                let kirchhoff = incident
                    .iter()
                    .map(|&(_, e)| {
                        let d = self.net.leaving(x, e);
                        let deriv = (self.at(d, 0) * -3.0 + self.at(d, 1) * 4.0 - self.at(d, 2)) / (2.0 * h);
                        deriv * self.net.edge(e).c
                    })
                    .sum();
                VertexResidual {
                    continuity_spread,
                    kirchhoff,
                }
            })
            .collect()
    }

    /// CSV with columns `edge_u,edge_v,k,t,re,im`, canonical orientation,
    /// `k` ascending.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "edge_u,edge_v,k,t,re,im")?;
        self.write_rows(&mut w, None)
    }

    pub(crate) fn write_rows<W: Write>(&self, w: &mut W, prefix: Option<&str>) -> std::io::Result<()> {
        let h = self.step();
        for (e, edge) in self.net.edges().iter().enumerate() {
            let (u, v) = (self.net.vertex_id(edge.u), self.net.vertex_id(edge.v));
            for (k, val) in self.values[e].iter().enumerate() {
                if let Some(p) = prefix {
                    write!(w, "{p},")?;
                }
                writeln!(
                    w,
                    "{u},{v},{k},{:.12e},{:.12e},{:.12e}",
                    k as f64 * h,
                    val.re,
                    val.im
                )?;
            }
        }
        Ok(())
    }
}

/// `b(x) cos(sqrt(lambda) t) + a(xy) Phi(sqrt(lambda), t)` on every directed
/// edge `xy`, with `b` indexed by vertex and `a` by directed edge
/// (see [`Network::dir_index`]).
#[derive(Debug, Clone)]
pub struct TrigEdgeFunction<'a> {
    net: &'a Network,
    lambda: f64,
    b: Vec<Complex64>,
    a: Vec<Complex64>,
}

impl<'a> TrigEdgeFunction<'a> {
    pub fn new(net: &'a Network, lambda: f64, b: Vec<Complex64>, a: Vec<Complex64>) -> Result<Self> {
        if !(lambda.is_finite() && lambda >= 0.0) {
            return Err(Error::Domain(format!(
                "lambda = {lambda} must be finite and >= 0"
            )));
        }
        if b.len() != net.num_vertices() || a.len() != 2 * net.num_edges() {
            return Err(Error::Mismatch(format!(
                "coefficient lengths b={} a={} for |V|={} |E|={}",
                b.len(),
                a.len(),
                net.num_vertices(),
                net.num_edges()
            )));
        }
        Ok(TrigEdgeFunction { net, lambda, b, a })
    }

    pub fn network(&self) -> &'a Network {
        self.net
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn frequency(&self) -> f64 {
        self.lambda.sqrt()
    }

    pub fn b(&self) -> &[Complex64] {
        &self.b
    }

    pub fn a(&self) -> &[Complex64] {
        &self.a
    }

    pub fn a_dir(&self, d: DirEdge) -> Complex64 {
        self.a[self.net.dir_index(d)]
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        TrigEdgeFunction {
            net: self.net,
            lambda: self.lambda,
            b: self.b.iter().map(|v| v * s).collect(),
            a: self.a.iter().map(|v| v * s).collect(),
        }
    }

    /// Value at `t` along directed edge `d`; `t` may lie outside `[0, 1]`,
    /// which gives the trigonometric continuation.
    pub fn eval(&self, d: DirEdge, t: f64) -> Complex64 {
        let z = self.frequency();
        let (x, _) = self.net.endpoints(d);
        self.b[x] * (z * t).cos() + self.a_dir(d) * phi(z, t)
    }

    pub fn derivative(&self, d: DirEdge, t: f64) -> Complex64 {
        let z = self.frequency();
        let (x, _) = self.net.endpoints(d);
        self.b[x] * (-z * (z * t).sin()) + self.a_dir(d) * (z * t).cos()
    }

    pub fn second_derivative(&self, d: DirEdge, t: f64) -> Complex64 {
        let z = self.frequency();
        let (x, _) = self.net.endpoints(d);
        self.b[x] * (-z * z * (z * t).cos()) + self.a_dir(d) * (-z * (z * t).sin())
    }

    /// Pointwise samples on each canonical edge.
    pub fn sample(&self, n: usize) -> Result<SampledEdgeFunction<'a>> {
        SampledEdgeFunction::from_fn(self.net, n, |e, t| {
            self.eval(
                DirEdge {
                    edge: e,
                    forward: true,
                },
                t,
            )
        })
    }

    /// Largest mismatch between the two orientations of each edge, evaluated
    /// on `samples + 1` equispaced points, relative to the largest value seen.
    pub fn orientation_defect(&self, samples: usize) -> f64 {
        let mut worst: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for e in 0..self.net.num_edges() {
            let fwd = DirEdge {
                edge: e,
                forward: true,
            };
            for k in 0..=samples {
                let t = k as f64 / samples as f64;
                let p = self.eval(fwd, t);
                let q = self.eval(fwd.reversed(), 1.0 - t);
                worst = worst.max((p - q).norm());
                scale = scale.max(p.norm()).max(q.norm());
            }
        }
        if scale > 0.0 {
            worst / scale
        } else {
            worst
        }
    }

    /// Vertex traces are taken from each edge's canonical representation;
    /// the Kirchhoff sum uses the stored outgoing coefficients `a(xy)`,
    /// which equal `F'(xy, 0+)`.
    pub fn vertex_residuals(&self) -> Vec<VertexResidual> {
        (0..self.net.num_vertices())
            .map(|x| {
                let incident = self.net.neighbors(x);
                let traces: Vec<Complex64> = incident
                    .iter()
                    .map(|&(_, e)| {
                        let fwd = DirEdge {
                            edge: e,
                            forward: true,
                        };
                        if self.net.edge(e).u == x {
                            self.eval(fwd, 0.0)
                        } else {
                            self.eval(fwd, 1.0)
                        }
                    })
                    .collect();
                let mean = traces.iter().sum::<Complex64>() / traces.len() as f64;
                let continuity_spread = traces.iter().map(|v| (v - mean).norm()).fold(0.0, f64::max);
                let kirchhoff = incident
                    .iter()
                    .map(|&(_, e)| self.a_dir(self.net.leaving(x, e)) * self.net.edge(e).c)
                    .sum();
                VertexResidual {
                    continuity_spread,
                    kirchhoff,
                }
            })
            .collect()
    }

    /// Exact L2 inner product when both functions share `lambda`; otherwise
    /// Simpson on a 512-panel grid.
    pub fn inner_product(&self, other: &Self) -> Result<Complex64> {
        if !ptr::eq(self.net, other.net) && self.net != other.net {
            return Err(Error::Mismatch("functions live on different networks".into()));
        }
        if self.lambda != other.lambda {
            return self.sample(512)?.inner_product(&other.sample(512)?);
        }
        let (icc, ics, iss) = trig_gram(self.frequency());
        let mut acc = Complex64::new(0.0, 0.0);
        for (e, edge) in self.net.edges().iter().enumerate() {
            let d = DirEdge {
                edge: e,
                forward: true,
            };
            let (b1, a1) = (self.b[edge.u].conj(), self.a_dir(d).conj());
            let (b2, a2) = (other.b[edge.u], other.a_dir(d));
            acc += (b1 * b2 * icc + (b1 * a2 + a1 * b2) * ics + a1 * a2 * iss) * edge.c;
        }
        Ok(acc)
    }

    pub fn norm(&self) -> f64 {
        self.inner_product(self)
            .expect("self-compatible")
            .re
            .max(0.0)
            .sqrt()
    }
}

/// Integrals over `[0, 1]` of `cos^2(zt)`, `cos(zt) Phi(z,t)` and `Phi(z,t)^2`.
fn trig_gram(z: f64) -> (f64, f64, f64) {
    if z == 0.0 {
        return (1.0, 0.5, 1.0 / 3.0);
    }
    let s = z.sin();
    let s2 = (2.0 * z).sin();
    let icc = 0.5 + s2 / (4.0 * z);
    let ics = s * s / (2.0 * z * z);
    let iss = if z < 1e-2 {
        let z2 = z * z;
        1.0 / 3.0 - z2 / 15.0 + 2.0 * z2 * z2 / 315.0
    } else {
        (0.5 - s2 / (4.0 * z)) / (z * z)
    };
    (icc, ics, iss)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn single_edge() -> Network {
        Network::from_edges(&[("x", "y", 1.0)]).unwrap()
    }

    fn triangle() -> Network {
        Network::from_edges(&[("x", "y", 1.0), ("y", "z", 1.0), ("x", "z", 1.0)]).unwrap()
    }

    #[test]
    fn phi_values() {
        assert_eq!(phi(0.0, 0.7), 0.7);
        assert!(phi(PI, 1.0).abs() < 1e-15);
        assert!((phi1(PI / 2.0) - 2.0 / PI).abs() < 1e-15);
        assert_eq!(phi1(0.0), 1.0);
    }

    #[test]
    fn constant_inner_products() {
        let net = single_edge();
        let one = SampledEdgeFunction::constant(&net, 16, c(1.0)).unwrap();
        assert!((one.inner_product(&one).unwrap() - c(1.0)).norm() < 1e-14);

        let tri = triangle();
        let one = SampledEdgeFunction::constant(&tri, 16, c(1.0)).unwrap();
        assert!((one.inner_product(&one).unwrap() - c(3.0)).norm() < 1e-14);
    }

    #[test]
    fn cosine_orthogonal_to_constant() {
        let net = single_edge();
        let f = SampledEdgeFunction::from_fn(&net, 256, |_, t| c((PI * t).cos())).unwrap();
        let one = SampledEdgeFunction::constant(&net, 256, c(1.0)).unwrap();
        assert!(f.inner_product(&one).unwrap().norm() <= 1e-6);
    }

    #[test]
    fn inner_product_is_conjugate_linear_in_first_argument() {
        let net = single_edge();
        let one = SampledEdgeFunction::constant(&net, 4, c(1.0)).unwrap();
        let i_one = one.scaled(Complex64::new(0.0, 1.0));
        let ip = i_one.inner_product(&one).unwrap();
        assert!((ip - Complex64::new(0.0, -1.0)).norm() < 1e-15);
    }

    #[test]
    fn mismatched_grids_rejected() {
        let net = single_edge();
        let f = SampledEdgeFunction::constant(&net, 4, c(1.0)).unwrap();
        let g = SampledEdgeFunction::constant(&net, 8, c(1.0)).unwrap();
        assert!(matches!(f.inner_product(&g), Err(Error::Mismatch(_))));

        let other = triangle();
        let h = SampledEdgeFunction::constant(&other, 4, c(1.0)).unwrap();
        assert!(f.inner_product(&h).is_err());

        assert!(matches!(
            SampledEdgeFunction::constant(&net, 5, c(1.0)),
            Err(Error::InvalidGrid(5))
        ));
    }

    #[test]
    fn reversed_view_is_reflection() {
        let net = single_edge();
        let f = SampledEdgeFunction::from_fn(&net, 8, |_, t| c(t * t)).unwrap();
        let fwd = DirEdge {
            edge: 0,
            forward: true,
        };
        for k in 0..=8 {
            assert_eq!(f.at(fwd.reversed(), k), f.at(fwd, 8 - k));
        }
    }

    #[test]
    fn sample_trig_basic_cases() {
        let net = single_edge();
        let one = TrigEdgeFunction::new(&net, 0.0, vec![c(1.0); 2], vec![c(0.0); 2]).unwrap();
        let s = one.sample(8).unwrap();
        assert!(s.values().iter().flatten().all(|v| *v == c(1.0)));

        let cosine = TrigEdgeFunction::new(&net, PI * PI, vec![c(1.0), c(-1.0)], vec![c(0.0); 2]).unwrap();
        let s = cosine.sample(16).unwrap();
        for (k, v) in s.edge(0).iter().enumerate() {
            let t = k as f64 / 16.0;
            assert!((v - c((PI * t).cos())).norm() < 1e-14);
        }
        assert!(cosine.orientation_defect(64) < 1e-12);
    }

    #[test]
    fn constant_has_no_vertex_defect() {
        let net = triangle();
        let s = SampledEdgeFunction::constant(&net, 8, c(1.0)).unwrap();
        for r in s.vertex_residuals() {
            assert_eq!(r.continuity_spread, 0.0);
            assert_eq!(r.kirchhoff, c(0.0));
        }
    }

    #[test]
    fn sampled_cosine_kirchhoff_is_second_order() {
        let net = single_edge();
        let f = SampledEdgeFunction::from_fn(&net, 256, |_, t| c((PI * t).cos())).unwrap();
        let r = f.vertex_residuals();
        assert!(r[0].kirchhoff.norm() <= 1e-3);
        // f'''(0) = 0 here, so the leading stencil error is pi^4 h^3 / 4
        let h: f64 = 1.0 / 256.0;
        let lead = PI.powi(4) * h.powi(3) / 4.0;
        assert!((r[0].kirchhoff.norm() - lead).abs() < 1e-2 * lead);
    }

    #[test]
    fn discontinuity_is_measured() {
        let net = Network::from_edges(&[("x", "y", 1.0), ("x", "z", 1.0)]).unwrap();
        let f = SampledEdgeFunction::from_fn(&net, 4, |e, _| c(e as f64)).unwrap();
        let r = f.vertex_residuals();
        assert!((r[0].continuity_spread - 0.5).abs() < 1e-15);
    }

    #[test]
    fn closed_form_norm_matches_simpson() {
        let tri = triangle();
        for lambda in [0.0, 1e-6, 2.3, 40.0] {
            let f = TrigEdgeFunction::new(
                &tri,
                lambda,
                vec![c(1.0), Complex64::new(0.5, -0.2), c(-0.3)],
                (0..6).map(|i| Complex64::new(0.1 * i as f64, 0.3)).collect(),
            )
            .unwrap();
            let exact = f.inner_product(&f).unwrap();
            let quad = f
                .sample(1024)
                .unwrap()
                .inner_product(&f.sample(1024).unwrap())
                .unwrap();
            assert!((exact - quad).norm() < 1e-9 * exact.norm(), "lambda={lambda}");
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let net = single_edge();
        let f = TrigEdgeFunction::new(&net, 7.0, vec![c(0.4), c(1.0)], vec![c(0.9), c(-0.2)]).unwrap();
        let d = DirEdge {
            edge: 0,
            forward: true,
        };
        let h = 1e-4;
        for t in [0.1, 0.5, 0.9] {
            let fd = (f.eval(d, t + h) - f.eval(d, t - h)) / (2.0 * h);
            assert!((fd - f.derivative(d, t)).norm() < 1e-6);
            let fd2 = (f.eval(d, t + h) - f.eval(d, t) * 2.0 + f.eval(d, t - h)) / (h * h);
            assert!((fd2 - f.second_derivative(d, t)).norm() < 1e-5);
        }
    }

    #[test]
    fn csv_layout() {
        let net = single_edge();
        let f = SampledEdgeFunction::constant(&net, 2, Complex64::new(1.0, -2.0)).unwrap();
        let mut out = Vec::new();
        f.write_csv(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "edge_u,edge_v,k,t,re,im");
        assert_eq!(lines.len(), 4);
        assert_eq!(
            lines[2],
            "x,y,1,5.000000000000e-1,1.000000000000e0,-2.000000000000e0"
        );
    }
}
