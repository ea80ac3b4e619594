//! Continuous eigenphase branches around the circle.
//!
//! Consecutive samples are matched by the assignment that minimizes the total
//! circular displacement. For points on a circle that optimum is always a
//! cyclic shift of the sorted order, so the search is over `n` shifts rather
//! than `n!` permutations. A step is accepted when every branch moves less
//! than the step cap, no inequivalent shift comes within the assignment
//! margin and the matrix itself moved less than the chord of the step cap;
//! otherwise the interval is bisected.

use std::f64::consts::TAU;
use std::io::Write;

use crate::error::SpectralError;
use crate::linalg::{circular_diff, circular_dist, eigenphases, recenter, wrap_phase, CMatrix};
use crate::tolerance::Tolerances;
use crate::unitary_loop::UnitaryLoop;

/// Unwrapped eigenphase branches sampled on `[0, 2π]`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenphaseTrace {
    /// Strictly increasing; first sample `0`, last sample `2π`.
    pub grid: Vec<f64>,
    /// `branches[j][i]` is branch `j` at `grid[i]`, unwrapped.
    pub branches: Vec<Vec<f64>>,
}

impl EigenphaseTrace {
    pub fn dim(&self) -> usize {
        self.branches.len()
    }

    pub fn samples(&self) -> usize {
        self.grid.len()
    }

    /// All branch values at sample `i`.
    pub fn column(&self, i: usize) -> Vec<f64> {
        self.branches.iter().map(|b| b[i]).collect()
    }

    /// `θ_j(2π) - θ_j(0)` for each branch.
    pub fn increments(&self) -> Vec<f64> {
        self.branches
            .iter()
            .map(|b| b[b.len() - 1] - b[0])
            .collect()
    }

    /// Sum of all branch increments divided by `2π`.
    pub fn total_turns(&self) -> f64 {
        self.increments().iter().sum::<f64>() / TAU
    }

    pub fn max_step(&self) -> f64 {
        self.branches
            .iter()
            .flat_map(|b| b.windows(2).map(|w| (w[1] - w[0]).abs()))
            .fold(0.0, f64::max)
    }

    /// CSV with header `k,branch_id,theta_unwrapped`, one row per sample and branch.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "k,branch_id,theta_unwrapped")?;
        for (i, k) in self.grid.iter().enumerate() {
            for (j, b) in self.branches.iter().enumerate() {
                writeln!(w, "{k:.17e},{j},{:.17e}", b[i])?;
            }
        }
        Ok(())
    }
}

/// Outcome of matching one sample to the next.
#[derive(Debug, Clone)]
pub(crate) struct Step {
    pub values: Vec<f64>,
    pub max_step: f64,
    pub ambiguous: bool,
}

const SAME_VALUE: f64 = 1e-9;
const DECISIVE_RATIO: f64 = 100.0;

/// Continues unwrapped branch values `prev` onto the eigenphases `curr`
/// (ascending, in `[0, 2π)`).
pub(crate) fn continue_branches(prev: &[f64], curr: &[f64], margin: f64) -> Step {
    let n = prev.len();
    debug_assert_eq!(n, curr.len());
    if n == 0 {
        return Step {
            values: Vec::new(),
            max_step: 0.0,
            ambiguous: false,
        };
    }
    let wrapped: Vec<f64> = prev.iter().map(|&t| wrap_phase(t)).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| wrapped[a].total_cmp(&wrapped[b]));

    let cost = |s: usize| -> f64 {
        order
            .iter()
            .enumerate()
            .map(|(i, &j)| circular_dist(curr[(i + s) % n], wrapped[j]))
            .sum()
    };
    let costs: Vec<f64> = (0..n).map(cost).collect();
    let least = costs.iter().copied().fold(f64::INFINITY, f64::min);
    // Branches moving the same way past each other tie in L1; the squared
    // cost then picks the labelling that keeps their order.
    let squared = |s: usize| -> f64 {
        order
            .iter()
            .enumerate()
            .map(|(i, &j)| circular_dist(curr[(i + s) % n], wrapped[j]).powi(2))
            .sum()
    };
    let best = (0..n)
        .filter(|&s| costs[s] - least <= SAME_VALUE)
        .min_by(|&a, &b| squared(a).total_cmp(&squared(b)))
        .unwrap_or(0);

    let apply = |s: usize| -> Vec<f64> {
        let mut out = vec![0.0; n];
        for (i, &j) in order.iter().enumerate() {
            out[j] = prev[j] + circular_diff(curr[(i + s) % n], wrapped[j]);
        }
        out
    };
    let values = apply(best);
    let max_step = values
        .iter()
        .zip(prev)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);

    // Runner-up shifts only matter when they change the multiset of
    // continued values; relabelings within a cluster do not. Once the best
    // step is far below the margin, an excess many times larger is decisive
    // even if it is under the margin: this happens when a sample lands just
    // beside a crossing of two eigenphases.
    let tie = margin.min(DECISIVE_RATIO * costs[best]);
    let sorted = |mut v: Vec<f64>| {
        v.sort_by(f64::total_cmp);
        v
    };
    let reference = sorted(values.clone());
    let ambiguous = (0..n).filter(|&s| s != best).any(|s| {
        costs[s] - costs[best] < tie && {
            let alt = sorted(apply(s));
            alt.iter()
                .zip(&reference)
                .any(|(a, b)| (a - b).abs() > SAME_VALUE)
        }
    });

    Step {
        values,
        max_step,
        ambiguous,
    }
}

/// Samples the loop, refining until every step is small and unambiguous.
pub fn trace_eigenphases<L: UnitaryLoop + ?Sized>(
    lp: &L,
    initial_grid: usize,
    tol: &Tolerances,
) -> Result<EigenphaseTrace, SpectralError> {
    if initial_grid < 64 {
        return Err(SpectralError::GridTooSmall(initial_grid));
    }
    let n = lp.dim();
    let coarse: Vec<f64> = (0..=initial_grid)
        .map(|i| TAU * i as f64 / initial_grid as f64)
        .collect();

    let mut left = Sample::at(lp, 0.0)?;
    let mut grid = vec![0.0];
    let mut columns = vec![left.phases.clone()];
    let mut current = left.phases.clone();

    for w in coarse.windows(2) {
        let right = Sample::at(lp, w[1])?;
        advance(lp, tol, &left, &current, &right, 0, &mut grid, &mut columns)?;
        current = columns.last().cloned().unwrap_or_default();
        left = right;
    }

    let mut branches = vec![Vec::with_capacity(grid.len()); n];
    for col in &columns {
        for (j, &v) in col.iter().enumerate() {
            branches[j].push(v);
        }
    }
    Ok(EigenphaseTrace { grid, branches })
}

struct Sample {
    k: f64,
    u: CMatrix,
    phases: Vec<f64>,
}

impl Sample {
    fn at<L: UnitaryLoop + ?Sized>(lp: &L, k: f64) -> Result<Self, SpectralError> {
        let u = lp.eval(k);
        let phases = eigenphases(&u)?;
        Ok(Sample { k, u, phases })
    }
}

/// For unitaries the optimal matching distance between spectra is at most
/// `‖U - V‖₂ ≤ ‖U - V‖_F`, so a Frobenius change below the chord of the step
/// cap rules out matches that alias by a whole spacing.
fn chord(angle: f64) -> f64 {
    2.0 * (0.5 * angle).sin()
}

#[allow(clippy::too_many_arguments)]
fn advance<L: UnitaryLoop + ?Sized>(
    lp: &L,
    tol: &Tolerances,
    left: &Sample,
    vals_l: &[f64],
    right: &Sample,
    depth: u32,
    grid: &mut Vec<f64>,
    columns: &mut Vec<Vec<f64>>,
) -> Result<(), SpectralError> {
    let moved = (&right.u - &left.u).norm();
    if moved < chord(tol.branch_step_cap) {
        let step = continue_branches(vals_l, &right.phases, tol.assignment_margin);
        if step.max_step < tol.branch_step_cap && !step.ambiguous {
            grid.push(right.k);
            columns.push(step.values);
            return Ok(());
        }
    }
    if depth >= tol.max_bisections {
        return Err(SpectralError::RefinementLimit(left.k));
    }
    let mid = Sample::at(lp, 0.5 * (left.k + right.k))?;
    advance(lp, tol, left, vals_l, &mid, depth + 1, grid, columns)?;
    let vals_m = columns.last().cloned().unwrap_or_default();
    advance(lp, tol, &mid, &vals_m, right, depth + 1, grid, columns)
}

const FLAT_LEVEL: f64 = 1e-9;
const FLAT_WIDTH: f64 = 1e-4;

/// A branch pinned at `+1` over a visible interval means a continuum of solutions.
pub(crate) fn check_discreteness(trace: &EigenphaseTrace) -> Result<(), SpectralError> {
    for b in &trace.branches {
        let mut run_start: Option<usize> = None;
        for (i, &v) in b.iter().enumerate() {
            if recenter(v).abs() < FLAT_LEVEL {
                let s = *run_start.get_or_insert(i);
                if trace.grid[i] - trace.grid[s] > FLAT_WIDTH {
                    return Err(SpectralError::DiscretenessViolated(trace.grid[s]));
                }
            } else {
                run_start = None;
            }
        }
    }
    Ok(())
}
