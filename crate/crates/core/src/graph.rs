//! The molecular graph and its directed double.
//!
//! Vertices keep the order in which they were supplied; that order fixes the
//! left-lexicographic basis of `ℂ[X₁]` once and for all.

use std::collections::{BTreeSet, HashMap};
use std::ops::Range;

use crate::error::GraphError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    /// Endpoint indices into [`MolecularGraph::vertices`], as supplied.
    pub ends: [usize; 2],
    /// Number of repeat units.
    pub length: u32,
}

/// A connected, finite, simple graph with positive integer edge lengths.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MolecularGraph {
    vertices: Vec<String>,
    edges: Vec<Edge>,
}

/// Checks every structural invariant and reports the first violation.
pub fn validate_graph(vertices: &[String], edges: &[(String, String, i64)]) -> Result<(), GraphError> {
    MolecularGraph::new(vertices.to_vec(), edges.to_vec()).map(|_| ())
}

impl MolecularGraph {
    pub fn new(vertices: Vec<String>, edges: Vec<(String, String, i64)>) -> Result<Self, GraphError> {
        let mut index = HashMap::with_capacity(vertices.len());
        for (i, v) in vertices.iter().enumerate() {
            if index.insert(v.clone(), i).is_some() {
                return Err(GraphError::DuplicateVertex(v.clone()));
            }
        }
        let mut seen = BTreeSet::new();
        let mut out = Vec::with_capacity(edges.len());
        for (a, b, len) in edges {
            let ia = *index.get(&a).ok_or_else(|| GraphError::UnknownVertex(a.clone()))?;
            let ib = *index.get(&b).ok_or_else(|| GraphError::UnknownVertex(b.clone()))?;
            if ia == ib {
                return Err(GraphError::SelfLoop(a));
            }
            if len < 1 || len > u32::MAX as i64 {
                return Err(GraphError::NonPositiveLength(a, b, len));
            }
            if !seen.insert((ia.min(ib), ia.max(ib))) {
                return Err(GraphError::DuplicateEdge(a, b));
            }
            out.push(Edge {
                ends: [ia, ib],
                length: len as u32,
            });
        }
        if out.is_empty() {
            return Err(GraphError::Empty);
        }
        let g = MolecularGraph {
            vertices,
            edges: out,
        };
        let comps = g.components();
        if comps.len() > 1 {
            let named = comps
                .into_iter()
                .map(|c| c.into_iter().map(|i| g.vertices[i].clone()).collect())
                .collect();
            return Err(GraphError::Disconnected(named));
        }
        Ok(g)
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn vertex_index(&self, name: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v == name)
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e.ends.contains(&v)).count()
    }

    /// `Σ_{edges} L`.
    pub fn total_length(&self) -> u64 {
        self.edges.iter().map(|e| e.length as u64).sum()
    }

    /// Copy with every length multiplied by `t`.
    pub fn scaled(&self, t: u32) -> MolecularGraph {
        let mut g = self.clone();
        for e in &mut g.edges {
            e.length *= t;
        }
        g
    }

    fn components(&self) -> Vec<Vec<usize>> {
        let n = self.vertices.len();
        let mut adj = vec![Vec::new(); n];
        for e in &self.edges {
            adj[e.ends[0]].push(e.ends[1]);
            adj[e.ends[1]].push(e.ends[0]);
        }
        let mut comp = vec![usize::MAX; n];
        let mut out = Vec::new();
        for s in 0..n {
            if comp[s] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut members = vec![s];
            comp[s] = id;
            let mut stack = vec![s];
            while let Some(v) = stack.pop() {
                for &w in &adj[v] {
                    if comp[w] == usize::MAX {
                        comp[w] = id;
                        members.push(w);
                        stack.push(w);
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DirectedEdge {
    pub tail: usize,
    pub head: usize,
    /// Index of the underlying undirected edge.
    pub edge: usize,
    pub length: u32,
}

/// The directed double `X` of a molecular graph, in left-lex order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DoubleGraph {
    graph: MolecularGraph,
    directed: Vec<DirectedEdge>,
    tail_blocks: Vec<Range<usize>>,
    reversal: Vec<usize>,
}

pub fn build_double(g: &MolecularGraph) -> DoubleGraph {
    DoubleGraph::new(g.clone())
}

impl DoubleGraph {
    pub fn new(graph: MolecularGraph) -> Self {
        let mut directed: Vec<DirectedEdge> = graph
            .edges
            .iter()
            .enumerate()
            .flat_map(|(i, e)| {
                let [a, b] = e.ends;
                [
                    DirectedEdge { tail: a, head: b, edge: i, length: e.length },
                    DirectedEdge { tail: b, head: a, edge: i, length: e.length },
                ]
            })
            .collect();
        directed.sort_by_key(|d| (d.tail, d.head));

        let nv = graph.vertices.len();
        let mut tail_blocks = vec![0..0; nv];
        let mut start = 0;
        for v in 0..nv {
            let end = start + directed[start..].iter().take_while(|d| d.tail == v).count();
            tail_blocks[v] = start..end;
            start = end;
        }

        let pos: HashMap<(usize, usize), usize> =
            directed.iter().enumerate().map(|(i, d)| ((d.tail, d.head), i)).collect();
        let reversal = directed.iter().map(|d| pos[&(d.head, d.tail)]).collect();

        DoubleGraph {
            graph,
            directed,
            tail_blocks,
            reversal,
        }
    }

    pub fn graph(&self) -> &MolecularGraph {
        &self.graph
    }

    /// `n = |X₁| = 2 |Y₁|`.
    pub fn dim(&self) -> usize {
        self.directed.len()
    }

    pub fn directed_edges(&self) -> &[DirectedEdge] {
        &self.directed
    }

    /// Contiguous index range of directed edges with tail `v`.
    pub fn tail_block(&self, v: usize) -> Range<usize> {
        self.tail_blocks[v].clone()
    }

    pub fn reversal(&self, i: usize) -> usize {
        self.reversal[i]
    }

    pub fn lengths(&self) -> impl Iterator<Item = u32> + '_ {
        self.directed.iter().map(|d| d.length)
    }

    /// `Σ_{ab ∈ X₁} L_{ab}`.
    pub fn total_directed_length(&self) -> u64 {
        self.lengths().map(u64::from).sum()
    }

    /// Position of directed edge `i` within its tail block, i.e. its channel
    /// index in `ℂ[Y₁ᵃ]` for `a = tail(i)`.
    pub fn channel(&self, i: usize) -> usize {
        i - self.tail_blocks[self.directed[i].tail].start
    }

    /// Directed edge `tail → head`, if present.
    pub fn find(&self, tail: usize, head: usize) -> Option<usize> {
        self.tail_blocks[tail].clone().find(|&i| self.directed[i].head == head)
    }

    pub fn label(&self, i: usize) -> String {
        let d = &self.directed[i];
        format!("{}{}", self.graph.vertices[d.tail], self.graph.vertices[d.head])
    }
}
