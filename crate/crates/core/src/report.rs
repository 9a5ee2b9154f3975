//! JSON documents written by the command-line tool.
//!
//! Every float is printed as `%.12e` and every object keeps its declaration
//! order, so equal inputs give byte-identical output.

use std::io;

use num_complex::Complex64;
use serde::ser::{SerializeMap, Serializer};
use serde::Serialize;

use crate::continuous::{ContinuousEigenpair, SpectrumReport};
use crate::error::Result;
use crate::network::{DirEdge, Network};

/// Compact JSON with fixed-precision scientific floats; non-finite values
/// become `null`.
#[derive(Debug, Clone, Copy, Default)]
pub struct SciFormatter;

impl serde_json::ser::Formatter for SciFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            write!(writer, "{value:.12e}")
        } else {
            writer.write_all(b"null")
        }
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, SciFormatter);
    value.serialize(&mut ser)?;
    out.push(b'\n');
    Ok(String::from_utf8(out).expect("serde_json writes UTF-8"))
}

/// Object whose keys keep insertion order.
#[derive(Debug, Clone, Default)]
pub struct Ordered<V>(pub Vec<(String, V)>);

impl<V: Serialize> Serialize for Ordered<V> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

#[derive(Debug, Serialize)]
pub struct StructureJson {
    pub vertices: Vec<String>,
    pub vertex_measures: Ordered<f64>,
    pub alpha: Ordered<f64>,
    pub total_measure: f64,
    pub bipartite: bool,
    pub coloring: Option<Ordered<u8>>,
    pub is_tree: bool,
    pub cycle_rank: usize,
    pub num_edges: usize,
}

pub fn structure_json(net: &Network) -> StructureJson {
    let s = net.structure_report();
    let keyed = |vals: &[f64]| Ordered(net.vertices().iter().cloned().zip(vals.iter().copied()).collect());
    StructureJson {
        vertices: net.vertices().to_vec(),
        vertex_measures: keyed(&s.vertex_measures),
        alpha: keyed(&s.alpha),
        total_measure: s.total_measure,
        bipartite: s.bipartite,
        coloring: s
            .coloring
            .map(|c| Ordered(net.vertices().iter().cloned().zip(c).collect())),
        is_tree: s.is_tree,
        cycle_rank: s.cycle_rank,
        num_edges: net.num_edges(),
    }
}

#[derive(Debug, Serialize)]
pub struct PairJson {
    pub kind: &'static str,
    pub index: usize,
    pub lambda: f64,
    pub source_p_value: Option<f64>,
    /// Vertex values `b(x)` as `[re, im]`.
    pub b: Ordered<[f64; 2]>,
    /// Coefficients `a(xy)` of `Phi(sqrt(lambda), t)` keyed `"x->y"`.
    pub a: Ordered<[f64; 2]>,
}

fn pair_json(net: &Network, p: &ContinuousEigenpair<'_>) -> PairJson {
    let f = &p.eigenfunction;
    let b = net
        .vertices()
        .iter()
        .cloned()
        .zip(f.b().iter().map(|&z| pair(z)))
        .collect();
    let a = (0..net.num_edges())
        .flat_map(|e| [true, false].map(|forward| DirEdge { edge: e, forward }))
        .map(|d| {
            let (x, y) = net.endpoints(d);
            (
                format!("{}->{}", net.vertex_id(x), net.vertex_id(y)),
                pair(f.a_dir(d)),
            )
        })
        .collect();
    PairJson {
        kind: p.kind.label(),
        index: p.index,
        lambda: p.lambda,
        source_p_value: p.source_p_value,
        b: Ordered(b),
        a: Ordered(a),
    }
}

#[derive(Debug, Serialize)]
pub struct PValueJson {
    pub value: f64,
    pub vector: Ordered<f64>,
}

#[derive(Debug, Serialize)]
pub struct BandJson {
    pub n: usize,
    pub lambda_range: [f64; 2],
    pub pairs: Vec<PairJson>,
    pub diagnostics: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct DirichletJson {
    pub n: usize,
    pub lambda: f64,
    pub dim_vertex: usize,
    pub dim_flow: usize,
    pub predicted_vertex: usize,
    pub predicted_flow: usize,
    pub basis: Vec<PairJson>,
}

#[derive(Debug, Serialize)]
pub struct PredicatesJson {
    pub bipartite: bool,
    pub is_tree: bool,
    pub cycle_rank: usize,
    pub single_odd_cycle: bool,
    pub dimensions_match_structure: bool,
    pub all_dirichlet_kernels_trivial: bool,
    pub zero_in_point_spectrum_of_a: bool,
}

#[derive(Debug, Serialize)]
pub struct SpectrumJson {
    pub n_max: usize,
    pub p_spectrum: Vec<PValueJson>,
    pub bands: Vec<BandJson>,
    pub dirichlet: Vec<DirichletJson>,
    /// All eigenvalues of `L` found, ascending with multiplicity.
    pub lambdas: Vec<f64>,
    pub predicates: PredicatesJson,
}

pub fn spectrum_json(net: &Network, report: &SpectrumReport<'_>) -> SpectrumJson {
    let p_spectrum = report
        .p_spectrum
        .iter()
        .map(|p| PValueJson {
            value: p.value,
            vector: Ordered(
                net.vertices()
                    .iter()
                    .cloned()
                    .zip(p.vector.values().iter().map(|z| z.re))
                    .collect(),
            ),
        })
        .collect();
    let bands = report
        .bands
        .iter()
        .map(|b| {
            let (lo, hi) = crate::continuous::SpectralBand::new(b.n).lambda_range();
            BandJson {
                n: b.n,
                lambda_range: [lo, hi],
                pairs: b.pairs.iter().map(|p| pair_json(net, p)).collect(),
                diagnostics: b.diagnostics.clone(),
            }
        })
        .collect();
    let dirichlet = report
        .dirichlet
        .iter()
        .map(|d| DirichletJson {
            n: d.n,
            lambda: (std::f64::consts::PI * d.n as f64).powi(2),
            dim_vertex: d.dim_vertex,
            dim_flow: d.dim_flow,
            predicted_vertex: d.predicted_vertex,
            predicted_flow: d.predicted_flow,
            basis: d.basis.iter().map(|p| pair_json(net, p)).collect(),
        })
        .collect();
    let p = &report.predicates;
    SpectrumJson {
        n_max: report.n_max,
        p_spectrum,
        bands,
        dirichlet,
        lambdas: report.lambdas(),
        predicates: PredicatesJson {
            bipartite: p.bipartite,
            is_tree: p.is_tree,
            cycle_rank: p.cycle_rank,
            single_odd_cycle: p.single_odd_cycle,
            dimensions_match_structure: p.dimensions_match_structure,
            all_dirichlet_kernels_trivial: p.all_dirichlet_kernels_trivial,
            zero_in_point_spectrum_of_a: p.zero_in_point_spectrum_of_a,
        },
    }
}
