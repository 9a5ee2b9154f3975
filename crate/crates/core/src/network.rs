//! Finite weighted networks: vertices, conductance-weighted edges, the vertex
//! measure and a few structural predicates.
//!
//! Every edge is stored once, oriented from the lexicographically smaller
//! vertex id to the larger one. A point of the metric graph is addressed as
//! `(edge, t)` with `t` measured from the canonical start; the opposite
//! orientation is the reflection `t -> 1 - t`.

use std::collections::{HashMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An undirected edge in canonical orientation `u < v` (by vertex id).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub c: f64,
}

/// An edge traversed in a given direction. `forward` means `u -> v` in the
/// canonical orientation of the underlying edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DirEdge {
    pub edge: usize,
    pub forward: bool,
}

impl DirEdge {
    pub fn reversed(self) -> Self {
        DirEdge {
            edge: self.edge,
            forward: !self.forward,
        }
    }
}

/// Finite connected network with positive conductances.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    vertices: Vec<String>,
    index: HashMap<String, usize>,
    edges: Vec<Edge>,
    adjacency: Vec<Vec<(usize, usize)>>,
    measure: Vec<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NetworkFile {
    vertices: Vec<String>,
    edges: Vec<EdgeRecord>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeRecord {
    u: String,
    v: String,
    c: f64,
}

impl Network {
    /// Builds and validates a network from vertex ids (in order) and
    /// `(u, v, conductance)` triples.
    pub fn new<S: AsRef<str>>(vertices: &[S], edges: &[(S, S, f64)]) -> Result<Self> {
        let mut index = HashMap::with_capacity(vertices.len());
        let mut names = Vec::with_capacity(vertices.len());
        for (i, v) in vertices.iter().enumerate() {
            let v = v.as_ref();
            if v.is_empty() {
                return Err(Error::Schema("empty vertex id".into()));
            }
            if index.insert(v.to_string(), i).is_some() {
                return Err(Error::DuplicateVertex(v.to_string()));
            }
            names.push(v.to_string());
        }
        if edges.is_empty() {
            return Err(Error::Empty);
        }

        let mut seen = HashSet::new();
        let mut stored = Vec::with_capacity(edges.len());
        for (a, b, c) in edges {
            let (a, b, c) = (a.as_ref(), b.as_ref(), *c);
            let ia = *index.get(a).ok_or_else(|| Error::UnknownVertex(a.to_string()))?;
            let ib = *index.get(b).ok_or_else(|| Error::UnknownVertex(b.to_string()))?;
            if ia == ib {
                return Err(Error::LoopEdge(a.to_string()));
            }
            if !(c.is_finite() && c > 0.0) {
                return Err(Error::NonpositiveConductance {
                    u: a.to_string(),
                    v: b.to_string(),
                    c,
                });
            }
            let (u, v) = if names[ia] < names[ib] { (ia, ib) } else { (ib, ia) };
            if !seen.insert((u, v)) {
                return Err(Error::DuplicateEdge(names[u].clone(), names[v].clone()));
            }
            stored.push(Edge { u, v, c });
        }

        let mut adjacency = vec![Vec::new(); names.len()];
        let mut measure = vec![0.0; names.len()];
        for (e, edge) in stored.iter().enumerate() {
            adjacency[edge.u].push((edge.v, e));
            adjacency[edge.v].push((edge.u, e));
            measure[edge.u] += edge.c;
            measure[edge.v] += edge.c;
        }

        let net = Network {
            vertices: names,
            index,
            edges: stored,
            adjacency,
            measure,
        };
        net.check_connected()?;
        Ok(net)
    }

    /// Builds a network whose vertices are listed in order of first appearance.
    pub fn from_edges(edges: &[(&str, &str, f64)]) -> Result<Self> {
        let mut vertices: Vec<&str> = Vec::new();
        for (a, b, _) in edges {
            for x in [a, b] {
                if !vertices.contains(x) {
                    vertices.push(x);
                }
            }
        }
        Network::new(&vertices, edges)
    }

    /// Parses the JSON network document
    /// `{"vertices": [...], "edges": [{"u": .., "v": .., "c": ..}, ...]}`.
    pub fn parse(text: &str) -> Result<Self> {
        let file: NetworkFile = serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
        let edges: Vec<(&str, &str, f64)> = file
            .edges
            .iter()
            .map(|e| (e.u.as_str(), e.v.as_str(), e.c))
            .collect();
        let vertices: Vec<&str> = file.vertices.iter().map(String::as_str).collect();
        Network::new(&vertices, &edges)
    }

    pub fn to_json(&self) -> String {
        let file = NetworkFile {
            vertices: self.vertices.clone(),
            edges: self
                .edges
                .iter()
                .map(|e| EdgeRecord {
                    u: self.vertices[e.u].clone(),
                    v: self.vertices[e.v].clone(),
                    c: e.c,
                })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("network serializes")
    }

    fn check_connected(&self) -> Result<()> {
        let n = self.vertices.len();
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        while let Some(x) = queue.pop_front() {
            for &(y, _) in &self.adjacency[x] {
                if !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
        match seen.iter().position(|s| !s) {
            Some(i) => Err(Error::Disconnected(
                self.vertices[i].clone(),
                self.vertices[0].clone(),
            )),
            None => Ok(()),
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn vertex_id(&self, x: usize) -> &str {
        &self.vertices[x]
    }

    pub fn vertex_index(&self, id: &str) -> Result<usize> {
        self.index
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownVertex(id.to_string()))
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> &Edge {
        &self.edges[e]
    }

    /// `(neighbor, edge index)` pairs incident to `x`.
    pub fn neighbors(&self, x: usize) -> &[(usize, usize)] {
        &self.adjacency[x]
    }

    /// m0(x): sum of conductances at `x`.
    pub fn measure(&self, x: usize) -> f64 {
        self.measure[x]
    }

    pub fn measures(&self) -> &[f64] {
        &self.measure
    }

    /// Vertex measure looked up by id.
    pub fn vertex_measure(&self, id: &str) -> Result<f64> {
        Ok(self.measure[self.vertex_index(id)?])
    }

    /// Tail and head of a directed edge.
    pub fn endpoints(&self, d: DirEdge) -> (usize, usize) {
        let e = &self.edges[d.edge];
        if d.forward {
            (e.u, e.v)
        } else {
            (e.v, e.u)
        }
    }

    /// The directed edge leaving `x` along `edge`.
    pub fn leaving(&self, x: usize, edge: usize) -> DirEdge {
        DirEdge {
            edge,
            forward: self.edges[edge].u == x,
        }
    }

    /// Directed edges in a fixed order: every edge forward, then every edge
    /// reversed. Index of `d` is `d.edge + |E| * (!d.forward)`.
    pub fn directed_edges(&self) -> impl Iterator<Item = DirEdge> + '_ {
        let m = self.edges.len();
        (0..2 * m).map(move |i| DirEdge {
            edge: i % m,
            forward: i < m,
        })
    }

    pub fn dir_index(&self, d: DirEdge) -> usize {
        d.edge + if d.forward { 0 } else { self.edges.len() }
    }

    pub fn structure_report(&self) -> StructureReport {
        let n = self.num_vertices();
        let alpha = (0..n)
            .map(|x| {
                self.adjacency[x]
                    .iter()
                    .map(|&(_, e)| self.edges[e].c.sqrt())
                    .sum()
            })
            .collect();
        let coloring = self.two_coloring();
        let cycle_rank = self.num_edges() + 1 - n;
        StructureReport {
            vertex_measures: self.measure.clone(),
            alpha,
            total_measure: self.measure.iter().sum(),
            bipartite: coloring.is_some(),
            coloring,
            is_tree: cycle_rank == 0,
            cycle_rank,
        }
    }

    /// Breadth-first 2-coloring from vertex 0; `None` if some edge joins two
    /// vertices of the same color.
    fn two_coloring(&self) -> Option<Vec<u8>> {
        let mut color: Vec<Option<u8>> = vec![None; self.num_vertices()];
        color[0] = Some(0);
        let mut queue = VecDeque::from([0]);
        while let Some(x) = queue.pop_front() {
            let cx = color[x].unwrap();
            for &(y, _) in &self.adjacency[x] {
                match color[y] {
                    None => {
                        color[y] = Some(1 - cx);
                        queue.push_back(y);
                    }
                    Some(cy) if cy == cx => return None,
                    Some(_) => {}
                }
            }
        }
        Some(color.into_iter().map(Option::unwrap).collect())
    }
}

/// Measures and structural predicates of a network.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureReport {
    pub vertex_measures: Vec<f64>,
    /// Sum of square roots of incident conductances.
    pub alpha: Vec<f64>,
    pub total_measure: f64,
    pub bipartite: bool,
    /// Colors 0/1 per vertex when bipartite.
    pub coloring: Option<Vec<u8>>,
    pub is_tree: bool,
    /// |E| - |V| + 1
    pub cycle_rank: usize,
}
