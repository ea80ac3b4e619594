//! Solution points of `U(k) ψ = ψ`: location, multiplicity and local index.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, TAU};

use num_complex::Complex64;
use serde::{Serialize, Serializer};

use super::trace::{check_discreteness, continue_branches, EigenphaseTrace};
use crate::error::SpectralError;
use crate::linalg::{eigenphases, recenter, wrap_phase};
use crate::tolerance::Tolerances;
use crate::unitary_loop::UnitaryLoop;

fn complex_pair<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
    [z.re, z.im].serialize(s)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Crossing {
    /// In `[0, 2π)`.
    pub k_star: f64,
    #[serde(serialize_with = "complex_pair")]
    pub z_star: Complex64,
    /// Dimension of the `+1` eigenspace of `U(k_star)`.
    pub multiplicity: usize,
    pub iota_minus: usize,
    pub iota_plus: usize,
    pub iota: i64,
    /// Half-angle `η` of the arc `J` around `+1`.
    pub arc_half_angle: f64,
    /// One-sided window `δ` used for `ι±`.
    pub delta: f64,
}

impl Crossing {
    fn located(k_star: f64, multiplicity: usize) -> Self {
        Crossing {
            k_star,
            z_star: Complex64::cis(k_star),
            multiplicity,
            iota_minus: 0,
            iota_plus: 0,
            iota: 0,
            arc_half_angle: 0.0,
            delta: 0.0,
        }
    }
}

fn unit_count(phases: &[f64], eps: f64) -> usize {
    phases
        .iter()
        .filter(|&&t| (Complex64::cis(t) - 1.0).norm() < eps)
        .count()
}

/// Number of eigenvalues of `U(k_star)` within `cluster_eps` of `+1`.
pub fn multiplicity_at<L: UnitaryLoop + ?Sized>(
    lp: &L,
    k_star: f64,
    tol: &Tolerances,
) -> Result<usize, SpectralError> {
    let m = unit_count(&eigenphases(&lp.eval(k_star))?, tol.cluster_eps);
    if m == 0 {
        Err(SpectralError::NotACrossing(k_star))
    } else {
        Ok(m)
    }
}

/// Branch values at `k`, continued from `reference`.
fn continued<L: UnitaryLoop + ?Sized>(
    lp: &L,
    reference: &[f64],
    k: f64,
    tol: &Tolerances,
) -> Result<Vec<f64>, SpectralError> {
    let phases = eigenphases(&lp.eval(k))?;
    Ok(continue_branches(reference, &phases, tol.assignment_margin).values)
}

/// Bisects the point where branch `j` passes `level` inside `[kl, kr]`.
#[allow(clippy::too_many_arguments)]
fn bisect_level<L: UnitaryLoop + ?Sized>(
    lp: &L,
    tol: &Tolerances,
    kl: f64,
    vals_l: &[f64],
    kr: f64,
    j: usize,
    level: f64,
) -> Result<f64, SpectralError> {
    let below_at_left = vals_l[j] <= level;
    let (mut lo, mut hi) = (kl, kr);
    let mut vals_lo = vals_l.to_vec();
    while hi - lo > tol.bisection_k_tol {
        let mid = 0.5 * (lo + hi);
        let vals_m = continued(lp, &vals_lo, mid, tol)?;
        if (vals_m[j] <= level) == below_at_left {
            lo = mid;
            vals_lo = vals_m;
        } else {
            hi = mid;
        }
    }
    let k = 0.5 * (lo + hi);
    if unit_count(&eigenphases(&lp.eval(k))?, tol.cluster_eps) > 0 {
        return Ok(k);
    }
    // Where several branches meet on the level the labels inside the
    // interval are arbitrary; the level count is not.
    let start = levels_below(vals_l, level);
    if levels_below(&continued(lp, vals_l, kr, tol)?, level) == start {
        return Ok(k);
    }
    bisect_count(lp, tol, (kl, vals_l.to_vec()), kr, level)
}

/// Signed count of levels `level + 2πr` below the branch values. Equals the
/// unwrapped `arg det` minus a function of the spectrum, so it does not
/// depend on how branches are labelled where they meet.
fn levels_below(vals: &[f64], level: f64) -> i64 {
    vals.iter().map(|&v| ((v - level) / TAU).floor() as i64).sum()
}

/// Bisects from `(ka, vals_a)` towards `kb` for the first change in the
/// value of [`levels_below`].
fn bisect_count<L: UnitaryLoop + ?Sized>(
    lp: &L,
    tol: &Tolerances,
    (mut a, mut vals_a): (f64, Vec<f64>),
    mut b: f64,
    level: f64,
) -> Result<f64, SpectralError> {
    let start = levels_below(&vals_a, level);
    while (b - a).abs() > tol.bisection_k_tol {
        let mid = 0.5 * (a + b);
        let vals_m = continued(lp, &vals_a, mid, tol)?;
        if levels_below(&vals_m, level) == start {
            a = mid;
            vals_a = vals_m;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

/// Distance from a level below which a sample is itself a crossing.
const ON_LEVEL: f64 = 1e-12;

/// Relative offset from an on-level sample at which its interval is probed.
const NEAR_SAMPLE: f64 = 1e-6;

/// A passage of `level` between `far` and a sample `k_on` that itself sits on
/// the level. Labels next to `k_on` may be arbitrary (a cluster can sit
/// there), so the search follows [`levels_below`].
fn hidden_passage<L: UnitaryLoop + ?Sized>(
    lp: &L,
    tol: &Tolerances,
    (k_far, vals_far): (f64, Vec<f64>),
    k_on: f64,
    level: f64,
) -> Result<Option<f64>, SpectralError> {
    let near = k_on + NEAR_SAMPLE * (k_far - k_on);
    let start = levels_below(&vals_far, level);
    if levels_below(&continued(lp, &vals_far, near, tol)?, level) == start {
        return Ok(None);
    }
    bisect_count(lp, tol, (k_far, vals_far), near, level).map(Some)
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Local search for a branch that approaches `level` between samples without
/// a visible sign change: either a tangential touch or a pair of nearby
/// crossings. Pushes the located points onto `out`.
#[allow(clippy::too_many_arguments)]
fn probe_touch<L: UnitaryLoop + ?Sized>(
    lp: &L,
    tol: &Tolerances,
    (ka, vals_a): (f64, &[f64]),
    (kc, vals_c): (f64, &[f64]),
    kb: f64,
    j: usize,
    level: f64,
    out: &mut Vec<f64>,
) -> Result<(), SpectralError> {
    let side = (vals_c[j] - level).signum();
    let eval = |k: f64| -> Result<(f64, Vec<f64>), SpectralError> {
        let reference = if k <= kc { vals_a } else { vals_c };
        let v = continued(lp, reference, k, tol)?;
        Ok((side * (v[j] - level), v))
    };

    let (mut a, mut b) = (ka, kb);
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = eval(x1)?.0;
    let mut f2 = eval(x2)?.0;
    while b - a > tol.bisection_k_tol {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = eval(x1)?.0;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = eval(x2)?.0;
        }
    }
    let kmin = 0.5 * (a + b);
    let (fmin, vals_min) = eval(kmin)?;
    if fmin <= 0.0 {
        // Dipped through the level: two transversal crossings.
        out.push(bisect_level(lp, tol, ka, vals_a, kmin, j, level)?);
        out.push(bisect_level(lp, tol, kmin, &vals_min, kb, j, level)?);
    } else if fmin < tol.cluster_eps {
        // A minimum on the bracket's edge is not a touch; the neighbouring
        // sample's probe or a level passage owns it.
        let margin = 2.0 * tol.bisection_k_tol;
        if kmin - ka > margin && kb - kmin > margin {
            out.push(kmin);
        }
    }
    Ok(())
}

/// Locates every `k ∈ [0, 2π)` where `U(k)` has eigenvalue `+1`, with
/// multiplicities. Indices are left at zero; see [`local_index_at`].
pub fn locate_crossings<L: UnitaryLoop + ?Sized>(
    trace: &EigenphaseTrace,
    lp: &L,
    tol: &Tolerances,
) -> Result<Vec<Crossing>, SpectralError> {
    check_discreteness(trace)?;
    let grid = &trace.grid;
    let last = grid.len() - 1;
    let mut candidates = Vec::new();

    // Level passages: 2πr ∈ [min, max) across a grid interval. A branch that
    // lands on a level at a sample is taken as is, since rounding can put it
    // on either side of the half-open test.
    for (j, b) in trace.branches.iter().enumerate() {
        for i in 0..last {
            if recenter(b[i]).abs() <= ON_LEVEL {
                candidates.push(grid[i]);
            }
        }
        for i in 0..last {
            let on = |v: f64| recenter(v).abs() <= ON_LEVEL;
            match (on(b[i]), on(b[i + 1])) {
                (false, false) => {
                    let (lo, hi) = (b[i].min(b[i + 1]), b[i].max(b[i + 1]));
                    let level = (lo / TAU).ceil() * TAU;
                    if lo <= level && level < hi {
                        let vals_l = trace.column(i);
                        candidates.push(bisect_level(lp, tol, grid[i], &vals_l, grid[i + 1], j, level)?);
                    }
                }
                // One end sits on a level: look just inside that end for a
                // passage hidden between the samples.
                (false, true) => {
                    let level = b[i + 1] - recenter(b[i + 1]);
                    let far = (grid[i], trace.column(i));
                    candidates.extend(hidden_passage(lp, tol, far, grid[i + 1], level)?);
                }
                (true, false) => {
                    let level = b[i] - recenter(b[i]);
                    let far = (grid[i + 1], trace.column(i + 1));
                    candidates.extend(hidden_passage(lp, tol, far, grid[i], level)?);
                }
                (true, true) => {}
            }
        }
    }

    // Turning points near the level. Sample `last` (k = 2π) stands in for
    // k = 0 so that both neighbours share its labels; the right neighbour is
    // reached by relabelling the first interval.
    let wrap_labels = relabel_across_period(&trace.column(last), &trace.column(0));
    for (j, b) in trace.branches.iter().enumerate() {
        for i in 1..=last {
            let level = b[i] - recenter(b[i]);
            let u = b[i] - level;
            if u.abs() >= FRAC_PI_4 {
                continue;
            }
            let left = b[i - 1] - level;
            let (right, k_right) = if i < last {
                (b[i + 1] - level, grid[i + 1])
            } else {
                let jj = wrap_labels[j];
                let shifted = trace.branches[jj][1] - trace.branches[jj][0];
                (u + shifted, grid[1] + TAU)
            };
            if u.abs() <= ON_LEVEL {
                // Already a candidate from the on-level rule.
                continue;
            }
            let same_side = left.signum() == u.signum() && right.signum() == u.signum();
            if !same_side {
                continue;
            }
            let local_min = u.abs() <= left.abs() && u.abs() <= right.abs();
            if u.abs() < tol.touch_probe || local_min {
                let vals_a = trace.column(i - 1);
                let vals_c = trace.column(i);
                probe_touch(
                    lp,
                    tol,
                    (grid[i - 1], &vals_a),
                    (grid[i], &vals_c),
                    k_right,
                    j,
                    b[i] - recenter(b[i]),
                    &mut candidates,
                )?;
            }
        }
    }

    let merged = merge_circular(candidates, tol.merge_radius);
    let mut merged: Vec<f64> = merge_flat(lp, merged, tol)?
        .into_iter()
        .map(|k| if TAU - k <= tol.merge_radius { 0.0 } else { k })
        .collect();
    merged.sort_by(f64::total_cmp);
    merged
        .into_iter()
        .map(|k| multiplicity_at(lp, k, tol).map(|m| Crossing::located(k, m)))
        .collect()
}

/// Joins neighbouring points when `+1` stays in the spectrum between them,
/// as happens across the flat bottom of a tangential touch.
fn merge_flat<L: UnitaryLoop + ?Sized>(
    lp: &L,
    ks: Vec<f64>,
    tol: &Tolerances,
) -> Result<Vec<f64>, SpectralError> {
    if ks.len() < 2 {
        return Ok(ks);
    }
    let joined = |a: f64, b: f64| -> Result<bool, SpectralError> {
        let gap = (b - a).rem_euclid(TAU);
        if gap >= tol.delta_cap {
            return Ok(false);
        }
        for s in 1..8 {
            let k = a + gap * s as f64 / 8.0;
            if unit_count(&eigenphases(&lp.eval(k))?, tol.cluster_eps) == 0 {
                return Ok(false);
            }
        }
        Ok(true)
    };
    let n = ks.len();
    let links: Vec<bool> = (0..n)
        .map(|i| joined(ks[i], ks[(i + 1) % n]))
        .collect::<Result<_, _>>()?;
    let Some(start) = links.iter().position(|&l| !l) else {
        // Every neighbour pair linked: +1 never leaves the spectrum.
        return Err(SpectralError::DiscretenessViolated(ks[0]));
    };
    let mut out = Vec::new();
    let mut group: Vec<f64> = Vec::new();
    for step in 1..=n {
        let i = (start + step) % n;
        let k = if group.first().is_some_and(|&g| ks[i] < g) { ks[i] + TAU } else { ks[i] };
        group.push(k);
        if !links[i] {
            out.push(wrap_phase(group.iter().sum::<f64>() / group.len() as f64));
            group.clear();
        }
    }
    out.sort_by(f64::total_cmp);
    Ok(out)
}

/// For each branch label at `k = 2π`, the label at `k = 0` with the same phase.
fn relabel_across_period(end: &[f64], start: &[f64]) -> Vec<usize> {
    let mut used = vec![false; start.len()];
    end.iter()
        .map(|&e| {
            let (best, _) = start
                .iter()
                .enumerate()
                .filter(|(s, _)| !used[*s])
                .map(|(s, &v)| (s, recenter(e - v).abs()))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .unwrap_or((0, 0.0));
            used[best] = true;
            best
        })
        .collect()
}

/// Sorts points of the circle into `[0, 2π)` and merges clusters closer than `radius`.
pub(crate) fn merge_circular(points: Vec<f64>, radius: f64) -> Vec<f64> {
    let mut ks: Vec<f64> = points.into_iter().map(wrap_phase).collect();
    if ks.is_empty() {
        return ks;
    }
    ks.sort_by(f64::total_cmp);
    let mut clusters: Vec<Vec<f64>> = vec![vec![ks[0]]];
    for &k in &ks[1..] {
        let cur = clusters.last_mut().unwrap();
        if k - cur[cur.len() - 1] <= radius {
            cur.push(k);
        } else {
            clusters.push(vec![k]);
        }
    }
    if clusters.len() > 1 {
        let first = clusters[0][0];
        let tail = *clusters.last().unwrap().last().unwrap();
        if first + TAU - tail <= radius {
            let wrapped = clusters.pop().unwrap();
            clusters[0].extend(wrapped.into_iter().map(|k| k - TAU));
        }
    } else if ks[ks.len() - 1] - ks[0] > TAU - radius {
        // Single cluster that straddles 0.
        clusters[0] = ks.iter().map(|&k| if k > TAU / 2.0 { k - TAU } else { k }).collect();
    }
    let mut out: Vec<f64> = clusters
        .into_iter()
        .map(|c| wrap_phase(c.iter().sum::<f64>() / c.len() as f64))
        .collect();
    out.sort_by(f64::total_cmp);
    out
}

/// One-sided counts of eigenvalues in the arc `J` with positive imaginary part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalIndex {
    pub iota_minus: usize,
    pub iota_plus: usize,
    pub iota: i64,
    pub arc_half_angle: f64,
    pub delta: f64,
}

const SIDE_SAMPLES: usize = 8;
const MAX_DELTA_HALVINGS: u32 = 20;

/// Local intersection index at a located crossing.
///
/// `others` are the remaining crossing positions; they bound the window `δ`.
pub fn local_index_at<L: UnitaryLoop + ?Sized>(
    lp: &L,
    k_star: f64,
    multiplicity: usize,
    others: &[f64],
    tol: &Tolerances,
) -> Result<LocalIndex, SpectralError> {
    let centered: Vec<f64> = eigenphases(&lp.eval(k_star))?
        .into_iter()
        .map(recenter)
        .collect();
    let gap = centered
        .iter()
        .map(|t| t.abs())
        .filter(|&t| t >= tol.cluster_eps)
        .fold(f64::INFINITY, f64::min);
    let eta = if gap.is_finite() { gap / 2.0 } else { FRAC_PI_2 };

    let nearest = others
        .iter()
        .map(|&o| recenter(o - k_star).abs())
        .filter(|&d| d > 0.0)
        .fold(f64::INFINITY, f64::min);
    let mut delta = (nearest / 2.0).min(tol.delta_cap);

    let counts = |k: f64| -> Result<(usize, usize), SpectralError> {
        let ph = eigenphases(&lp.eval(k))?;
        let mut in_arc = 0;
        let mut upper = 0;
        for t in ph.into_iter().map(recenter) {
            if t.abs() < eta {
                in_arc += 1;
                if t > 0.0 {
                    upper += 1;
                }
            }
        }
        Ok((in_arc, upper))
    };

    for _ in 0..=MAX_DELTA_HALVINGS {
        if let Some((minus, plus)) = stable_side_counts(&counts, k_star, delta, multiplicity)? {
            return Ok(LocalIndex {
                iota_minus: minus,
                iota_plus: plus,
                iota: plus as i64 - minus as i64,
                arc_half_angle: eta,
                delta,
            });
        }
        delta /= 2.0;
    }
    Err(SpectralError::IndexUnstable(k_star))
}

/// Counts at `k* ∓ δ/2`, provided the arc holds exactly `m` eigenvalues and
/// the upper count is constant on each punctured side.
fn stable_side_counts(
    counts: &impl Fn(f64) -> Result<(usize, usize), SpectralError>,
    k_star: f64,
    delta: f64,
    m: usize,
) -> Result<Option<(usize, usize)>, SpectralError> {
    let mut sides = [0usize; 2];
    for (s, sign) in [-1.0, 1.0].into_iter().enumerate() {
        let mut seen: Option<usize> = None;
        for q in 1..=SIDE_SAMPLES {
            let k = k_star + sign * delta * q as f64 / SIDE_SAMPLES as f64;
            let (in_arc, upper) = counts(k)?;
            if in_arc != m || seen.is_some_and(|u| u != upper) {
                return Ok(None);
            }
            seen = Some(upper);
        }
        let (in_arc, upper) = counts(k_star + sign * delta / 2.0)?;
        if in_arc != m || Some(upper) != seen {
            return Ok(None);
        }
        sides[s] = upper;
    }
    Ok(Some((sides[0], sides[1])))
}
