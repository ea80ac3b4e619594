//! The subcommands. Failures carry their exit code.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use exciton_core::oracle::{crossings_agree, dense_scan_crossings, random_instance, InstanceLimits};
use exciton_core::spectral::{long_arm_sweep, trace_eigenphases};
use exciton_core::{index_report, DoubleGraph, Error, GraphLoop, Instance, ReportOptions, UnitaryLoop};

use crate::failure::Failure;
use crate::threads::parallel_map;

const KRAMERS_SAMPLES: usize = 64;
const ORACLE_GRID: usize = 100_000;
const ORACLE_K_TOL: f64 = 1e-6;
const ORACLE_INSTANCES: usize = 25;

fn load(path: &Path) -> Result<Instance, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::io(path, e))?;
    Ok(Instance::from_json(&text)?)
}

fn graph_loop(inst: &Instance) -> Result<GraphLoop, Failure> {
    inst.graph_loop().map_err(|e| Error::from(e).into())
}

fn options(inst: &Instance, band: bool) -> ReportOptions {
    ReportOptions {
        tolerances: inst.tolerances,
        band,
        ..ReportOptions::default()
    }
}

/// Writes `bytes` to `out`, or to stdout when no path is given.
fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<(), Failure> {
    match out {
        Some(p) => fs::write(p, bytes).map_err(|e| Failure::io(p, e)),
        None => {
            let mut stdout = io::stdout().lock();
            stdout
                .write_all(bytes)
                .and_then(|()| stdout.flush())
                .map_err(|e| Failure::io(Path::new("<stdout>"), e))
        }
    }
}

pub fn validate(path: &Path) -> Result<String, Failure> {
    let inst = load(path)?;
    let lp = graph_loop(&inst)?;
    let g = &inst.graph;
    let mut windings = Vec::with_capacity(g.vertices().len());
    for v in g.vertices() {
        let f = &inst.families[v];
        f.check_kramers(KRAMERS_SAMPLES)
            .map_err(|e| Error::Instance(format!("scattering.{v}: {e}")))?;
        windings.push(f.winding().to_string());
    }
    Ok(format!(
        "n={}, sum_L={}, windings=[{}]",
        lp.dim(),
        2 * g.total_length(),
        windings.join(",")
    ))
}

pub fn report(path: &Path, json: Option<&Path>, band: bool) -> Result<(), Failure> {
    let inst = load(path)?;
    let lp = graph_loop(&inst)?;
    let r = index_report(&lp, &options(&inst, band))?;
    for n in &r.notes {
        eprintln!("note: {n}");
    }
    for w in &r.warnings {
        eprintln!("warning: {w}");
    }
    let mut text = serde_json::to_string_pretty(&r).map_err(|e| Failure::internal(e.to_string()))?;
    text.push('\n');
    emit(json, text.as_bytes())?;
    if !r.theorem_a_ok {
        return Err(Failure::internal(format!(
            "index theorem check failed: alpha = {}, q = {}",
            r.alpha, r.q
        )));
    }
    Ok(())
}

pub fn trace(path: &Path, csv: Option<&Path>) -> Result<(), Failure> {
    let inst = load(path)?;
    let lp = graph_loop(&inst)?;
    let opts = options(&inst, false);
    let tr = trace_eigenphases(&lp, opts.initial_grid, &opts.tolerances)?;
    let mut buf = Vec::new();
    tr.write_csv(&mut buf).map_err(|e| Failure::internal(e.to_string()))?;
    emit(csv, &buf)
}

pub fn parse_scales(text: &str) -> Result<Vec<u32>, Failure> {
    let text = text.trim();
    if text.is_empty() {
        return Err(Failure::usage("--scales needs at least one positive integer"));
    }
    text.split(',')
        .map(|s| match s.trim().parse::<u32>() {
            Ok(t) if t >= 1 => Ok(t),
            _ => Err(Failure::usage(format!("--scales: `{}` is not a positive integer", s.trim()))),
        })
        .collect()
}

pub fn sweep(path: &Path, scales: &str, csv_out: Option<&Path>) -> Result<(), Failure> {
    let scales = parse_scales(scales)?;
    let inst = load(path)?;
    let lp = graph_loop(&inst)?;
    let rows = long_arm_sweep(&lp, &scales, &options(&inst, false))?;
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in &rows {
        w.serialize(row).map_err(|e| Failure::internal(e.to_string()))?;
    }
    let buf = w.into_inner().map_err(|e| Failure::internal(e.to_string()))?;
    emit(csv_out, &buf)
}

fn loop_for(seed: u64, limits: &InstanceLimits) -> Result<GraphLoop, Error> {
    let (g, families) = random_instance(seed, limits);
    Ok(GraphLoop::new(DoubleGraph::new(g), &families)?)
}

fn theorem_a_case(seed: u64) -> Result<(), String> {
    let lp = loop_for(seed, &InstanceLimits::default()).map_err(|e| e.to_string())?;
    let r = index_report(&lp, &ReportOptions::default()).map_err(|e| e.to_string())?;
    match (r.theorem_a_ok, r.bound_ok) {
        (true, true) => Ok(()),
        (false, _) => Err(format!("alpha = {} but q = {}", r.alpha, r.q)),
        (true, false) => Err(format!("m = {} below lower bound {:?}", r.m, r.lower_bound)),
    }
}

fn oracle_case(seed: u64) -> Result<(), String> {
    let lp = loop_for(seed, &InstanceLimits::small()).map_err(|e| e.to_string())?;
    let ours = index_report(&lp, &ReportOptions::default()).map_err(|e| e.to_string())?;
    let theirs = dense_scan_crossings(&lp, ORACLE_GRID).map_err(|e| format!("oracle: {e}"))?;
    if crossings_agree(&ours.crossings, &theirs, ORACLE_K_TOL) {
        Ok(())
    } else {
        Err(format!(
            "{} crossings from the pipeline, {} from the dense scan",
            ours.crossings.len(),
            theirs.len()
        ))
    }
}

fn run_suite(name: &str, seeds: &[u64], threads: usize, case: fn(u64) -> Result<(), String>) -> bool {
    let results = parallel_map(seeds, threads, |&s| case(s));
    let mut passed = 0;
    for (seed, r) in seeds.iter().zip(&results) {
        match r {
            Ok(()) => passed += 1,
            Err(e) => eprintln!("{name}: seed {seed}: {e}"),
        }
    }
    println!("{name}: {passed}/{} passed", seeds.len());
    passed == seeds.len()
}

pub fn selftest(seed: u64, count: usize, threads: usize) -> Result<(), Failure> {
    if count == 0 {
        return Err(Failure::usage("--count must be at least 1"));
    }
    let seeds: Vec<u64> = (0..count as u64).map(|i| seed.wrapping_add(i)).collect();
    let theorem = run_suite("index theorem", &seeds, threads, theorem_a_case);
    let oracle_seeds = &seeds[..count.min(ORACLE_INSTANCES)];
    let oracle = run_suite("oracle equivalence", oracle_seeds, threads, oracle_case);
    if theorem && oracle {
        Ok(())
    } else {
        Err(Failure::internal("selftest failed"))
    }
}
