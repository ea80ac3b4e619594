use std::collections::HashMap;
use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use exciton_core::oracle::{dense_scan_crossings, random_instance, InstanceLimits};
use exciton_core::spectral::{trace_eigenphases, winding_number};
use exciton_core::{
    index_report, CMatrix, DoubleGraph, GraphLoop, MolecularGraph, ReportOptions, ScatteringFamily, Tolerances,
};

fn star() -> GraphLoop {
    let g = MolecularGraph::new(
        ["c", "x", "y", "z"].map(String::from).to_vec(),
        vec![
            ("c".into(), "x".into(), 1),
            ("c".into(), "y".into(), 2),
            ("c".into(), "z".into(), 3),
        ],
    )
    .expect("valid star");
    let leaf = ScatteringFamily::constant_involution(CMatrix::identity(1, 1)).expect("[1] is an involution");
    let mut fams: HashMap<String, ScatteringFamily> = HashMap::new();
    fams.insert("c".into(), ScatteringFamily::kirchhoff(3));
    for v in ["x", "y", "z"] {
        fams.insert(v.into(), leaf.clone());
    }
    GraphLoop::new(DoubleGraph::new(g), &fams).expect("star assembles")
}

fn random(seed: u64, limits: &InstanceLimits) -> GraphLoop {
    let (g, fams) = random_instance(seed, limits);
    GraphLoop::new(DoubleGraph::new(g), &fams).expect("generated instance assembles")
}

fn bench_pipeline(c: &mut Criterion) {
    let tol = Tolerances::default();
    let opts = ReportOptions::default();
    let star = star();
    let rand = random(7, &InstanceLimits::default());
    let small = random(20_000, &InstanceLimits::small());

    c.bench_function("winding/star", |b| b.iter(|| winding_number(black_box(&star), &tol)));
    c.bench_function("winding/random", |b| b.iter(|| winding_number(black_box(&rand), &tol)));
    c.bench_function("trace/star", |b| b.iter(|| trace_eigenphases(black_box(&star), 128, &tol)));
    c.bench_function("trace/random", |b| b.iter(|| trace_eigenphases(black_box(&rand), 128, &tol)));
    c.bench_function("index_report/star", |b| b.iter(|| index_report(black_box(&star), &opts)));
    c.bench_function("index_report/random", |b| b.iter(|| index_report(black_box(&rand), &opts)));

    let mut slow = c.benchmark_group("oracle");
    slow.sample_size(10);
    slow.bench_function("dense_scan/small", |b| b.iter(|| dense_scan_crossings(black_box(&small), 100_000)));
    slow.finish();
}

criterion_group!(benches, bench_pipeline);
criterion_main!(benches);
