#![allow(dead_code)]

use std::collections::HashMap;

use exciton_core::{CMatrix, DoubleGraph, GraphLoop, MolecularGraph, PhaseConstant, ScatteringFamily};
use num_complex::Complex64;

pub fn scalar(v: f64) -> ScatteringFamily {
    ScatteringFamily::constant_involution(CMatrix::from_element(1, 1, Complex64::new(v, 0.0))).unwrap()
}

pub fn graph(vertices: &[&str], edges: &[(&str, &str, i64)]) -> MolecularGraph {
    MolecularGraph::new(
        vertices.iter().map(|v| v.to_string()).collect(),
        edges.iter().map(|&(a, b, l)| (a.to_string(), b.to_string(), l)).collect(),
    )
    .unwrap()
}

pub fn assemble(g: MolecularGraph, families: Vec<(&str, ScatteringFamily)>) -> GraphLoop {
    let fams: HashMap<String, ScatteringFamily> = families.into_iter().map(|(v, f)| (v.to_string(), f)).collect();
    GraphLoop::new(DoubleGraph::new(g), &fams).unwrap()
}

/// Two vertices, one edge of length 3, both ends `[-1]`.
pub fn path() -> GraphLoop {
    assemble(graph(&["a", "b"], &[("a", "b", 3)]), vec![("a", scalar(-1.0)), ("b", scalar(-1.0))])
}

/// Kirchhoff center with leaves of lengths 1, 2, 3.
pub fn star_with(leaf: [ScatteringFamily; 3]) -> GraphLoop {
    let g = graph(&["c", "x", "y", "z"], &[("c", "x", 1), ("c", "y", 2), ("c", "z", 3)]);
    let [x, y, z] = leaf;
    assemble(g, vec![("c", ScatteringFamily::kirchhoff(3)), ("x", x), ("y", y), ("z", z)])
}

pub fn star() -> GraphLoop {
    star_with([scalar(1.0), scalar(1.0), scalar(1.0)])
}

/// Star whose first leaf scatters with phase `sin k`.
pub fn long_arm() -> GraphLoop {
    star_with([
        ScatteringFamily::scalar_phase(0, PhaseConstant::Zero, vec![1.0]),
        scalar(1.0),
        scalar(1.0),
    ])
}
