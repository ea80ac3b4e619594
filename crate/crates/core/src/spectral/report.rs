//! The full index pipeline and the long-arm sweep.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use super::crossings::{local_index_at, locate_crossings, Crossing};
use super::trace::trace_eigenphases;
use super::winding::winding_number;
use crate::error::SpectralError;
use crate::linalg::{eigenphases, max_norm, CMatrix};
use crate::tolerance::Tolerances;
use crate::unitary_loop::{GraphLoop, UnitaryLoop};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReportOptions {
    pub tolerances: Tolerances,
    /// Coarse trace grid before refinement; at least 64.
    pub initial_grid: usize,
    /// Fail with `ParityViolation` instead of withholding `N`.
    pub band: bool,
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions {
            tolerances: Tolerances::default(),
            initial_grid: 128,
            band: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndexReport {
    /// Global index: winding number of `det U`.
    pub alpha: i64,
    /// In increasing `k`.
    pub crossings: Vec<Crossing>,
    /// `Σ ι_p`.
    pub q: i64,
    /// `Σ m_p`.
    pub m: i64,
    pub d0_plus: i64,
    pub d0_minus: i64,
    pub dpi_plus: i64,
    pub dpi_minus: i64,
    pub d0: i64,
    pub dpi: i64,
    /// Band count `(m + d0 + dpi) / 2`; graph-backed Kramers loops only.
    #[serde(rename = "N", skip_serializing_if = "Option::is_none")]
    pub n_band: Option<i64>,
    /// `Σ_{ab} L_{ab} + Σ_a w(Γᵃ)`; graph-backed loops only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lower_bound: Option<i64>,
    pub theorem_a_ok: bool,
    /// `m ≥ lower_bound`; vacuously true without a lower bound.
    pub bound_ok: bool,
    /// Basis order of the vertices, for graph-backed loops.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vertex_order: Option<Vec<String>>,
    /// Conditions that withheld or qualify a field.
    #[serde(skip)]
    pub warnings: Vec<String>,
    /// Informational log lines, such as whether `U(π)² = I` holds.
    #[serde(skip)]
    pub notes: Vec<String>,
}

fn count_near(phases: &[f64], target: Complex64, eps: f64) -> i64 {
    phases
        .iter()
        .filter(|&&t| (Complex64::cis(t) - target).norm() < eps)
        .count() as i64
}

/// Runs the whole pipeline: winding, trace, crossings, local indices and the
/// band-count bookkeeping.
pub fn index_report<L: UnitaryLoop + ?Sized>(
    lp: &L,
    opts: &ReportOptions,
) -> Result<IndexReport, SpectralError> {
    let tol = &opts.tolerances;
    let alpha = winding_number(lp, tol)?;
    let trace = trace_eigenphases(lp, opts.initial_grid, tol)?;
    let mut crossings = locate_crossings(&trace, lp, tol)?;

    let positions: Vec<f64> = crossings.iter().map(|c| c.k_star).collect();
    for (i, c) in crossings.iter_mut().enumerate() {
        let others: Vec<f64> = positions
            .iter()
            .enumerate()
            .filter(|&(o, _)| o != i)
            .map(|(_, &k)| k)
            .collect();
        let li = local_index_at(lp, c.k_star, c.multiplicity, &others, tol)?;
        c.iota_minus = li.iota_minus;
        c.iota_plus = li.iota_plus;
        c.iota = li.iota;
        c.arc_half_angle = li.arc_half_angle;
        c.delta = li.delta;
    }

    let q: i64 = crossings.iter().map(|c| c.iota).sum();
    let m: i64 = crossings.iter().map(|c| c.multiplicity as i64).sum();

    let one = Complex64::new(1.0, 0.0);
    let at0 = eigenphases(&lp.eval(0.0))?;
    let atpi = eigenphases(&lp.eval(PI))?;
    let d0_plus = count_near(&at0, one, tol.cluster_eps);
    let d0_minus = count_near(&at0, -one, tol.cluster_eps);
    let dpi_plus = count_near(&atpi, one, tol.cluster_eps);
    let dpi_minus = count_near(&atpi, -one, tol.cluster_eps);
    let d0 = d0_plus - d0_minus;
    let dpi = dpi_plus - dpi_minus;

    let mut warnings = Vec::new();
    let graph = lp.as_graph();
    let lower_bound = graph.map(GraphLoop::lower_bound);
    let kramers = graph.is_some_and(|g| g.families().iter().all(|f| f.check_kramers(64).is_ok()));

    let parity_sum = m + d0 + dpi;
    let n_band = if !kramers {
        warnings.push("band count N withheld: loop is not a graph-backed Kramers loop".to_string());
        None
    } else if parity_sum % 2 != 0 {
        if opts.band {
            return Err(SpectralError::ParityViolation(parity_sum));
        }
        warnings.push(format!("band count N withheld: m + d0 + dpi = {parity_sum} is odd"));
        None
    } else {
        Some(parity_sum / 2)
    };

    let mut notes = Vec::new();
    if graph.is_some() {
        let u = lp.eval(PI);
        let n = u.nrows();
        let defect = max_norm(&(&u * &u - CMatrix::identity(n, n)));
        let holds = if defect < 1e-8 { "holds" } else { "does not hold" };
        notes.push(format!("U(pi)^2 = I {holds} (defect {defect:.3e})"));
    }

    Ok(IndexReport {
        alpha,
        crossings,
        q,
        m,
        d0_plus,
        d0_minus,
        dpi_plus,
        dpi_minus,
        d0,
        dpi,
        n_band,
        lower_bound,
        theorem_a_ok: alpha == q,
        bound_ok: lower_bound.is_none_or(|lb| m >= lb),
        vertex_order: graph.map(|g| g.double().graph().vertices().to_vec()),
        warnings,
        notes,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SweepRow {
    pub t: u32,
    pub alpha: i64,
    pub q: i64,
    pub m: i64,
    /// `m - alpha`.
    pub gap: i64,
}

/// Index data for the molecule with all lengths scaled by each `t`.
pub fn long_arm_sweep(
    base: &GraphLoop,
    scales: &[u32],
    opts: &ReportOptions,
) -> Result<Vec<SweepRow>, SpectralError> {
    scales
        .iter()
        .map(|&t| {
            let r = index_report(&base.scaled(t), opts)?;
            Ok(SweepRow {
                t,
                alpha: r.alpha,
                q: r.q,
                m: r.m,
                gap: r.m - r.alpha,
            })
        })
        .collect()
}
