//! Independent verifiers and instance generators.
//!
//! Nothing here reuses the eigensolver, traces or refinement code of
//! [`crate::spectral`]. The dense scan measures the distance of the spectrum
//! from `+1` through the singular values of `U(k) - I` (for a normal matrix
//! these are exactly `|λ_j - 1|`), and the diagonal model is solved in
//! closed form.

use std::collections::HashMap;
use std::f64::consts::{PI, TAU};

use nalgebra::SVD;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::OracleError;
use crate::graph::{DoubleGraph, MolecularGraph};
use crate::linalg::{circular_dist, CMatrix};
use crate::spectral::Crossing;
use crate::scattering::{ChannelPhase, PhaseConstant, ScatteringFamily};
use crate::unitary_loop::{DiagonalModelLoop, UnitaryLoop};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OracleSource {
    DenseScan,
    ClosedForm,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleCrossing {
    pub k_star: f64,
    pub multiplicity: usize,
    /// Known only for closed-form predictions.
    pub iota: Option<i64>,
    pub source: OracleSource,
}

const BRACKET_LEVEL: f64 = 1e-3;
const KEEP_LEVEL: f64 = 1e-8;
const K_TOL: f64 = 1e-10;
const GOLDEN: f64 = 0.618_033_988_749_894_9;

fn distances_from_one<L: UnitaryLoop + ?Sized>(lp: &L, k: f64) -> Vec<f64> {
    let u = lp.eval(k);
    let n = u.nrows();
    let shifted = u - CMatrix::identity(n, n);
    SVD::try_new(shifted, false, false, f64::EPSILON, 0)
        .map(|s| s.singular_values.iter().copied().collect())
        .unwrap_or_else(|| vec![f64::NAN; n])
}

fn min_distance<L: UnitaryLoop + ?Sized>(lp: &L, k: f64) -> f64 {
    distances_from_one(lp, k)
        .into_iter()
        .fold(f64::INFINITY, f64::min)
}

/// Brute-force crossing search on a uniform grid.
pub fn dense_scan_crossings<L: UnitaryLoop + ?Sized>(
    lp: &L,
    grid_size: usize,
) -> Result<Vec<OracleCrossing>, OracleError> {
    if grid_size < 10_000 {
        return Err(OracleError::GridTooSmall(grid_size));
    }
    let h = TAU / grid_size as f64;
    let sigma: Vec<f64> = (0..grid_size).map(|i| min_distance(lp, i as f64 * h)).collect();

    let mut kept: Vec<(usize, OracleCrossing)> = Vec::new();
    for i in 0..grid_size {
        let prev = sigma[(i + grid_size - 1) % grid_size];
        let next = sigma[(i + 1) % grid_size];
        let s = sigma[i];
        if !(s < BRACKET_LEVEL && s <= prev && s < next) {
            continue;
        }
        let (mut a, mut b) = ((i as f64 - 1.0) * h, (i as f64 + 1.0) * h);
        let mut x1 = b - GOLDEN * (b - a);
        let mut x2 = a + GOLDEN * (b - a);
        let mut f1 = min_distance(lp, x1);
        let mut f2 = min_distance(lp, x2);
        while b - a > K_TOL {
            if f1 < f2 {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - GOLDEN * (b - a);
                f1 = min_distance(lp, x1);
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + GOLDEN * (b - a);
                f2 = min_distance(lp, x2);
            }
        }
        // The grid point itself may beat the refined interior point.
        let mut k = 0.5 * (a + b);
        if s < min_distance(lp, k) {
            k = i as f64 * h;
        }
        let dist = distances_from_one(lp, k);
        let multiplicity = dist.iter().filter(|&&d| d < KEEP_LEVEL).count();
        if multiplicity == 0 {
            continue;
        }
        kept.push((
            i,
            OracleCrossing {
                k_star: if TAU - k.rem_euclid(TAU) < K_TOL { 0.0 } else { k.rem_euclid(TAU) },
                multiplicity,
                iota: None,
                source: OracleSource::DenseScan,
            },
        ));
    }

    for w in 0..kept.len() {
        let (i, _) = kept[w];
        let (j, _) = kept[(w + 1) % kept.len()];
        if kept.len() > 1 && (j + grid_size - i) % grid_size == 1 {
            return Err(OracleError::GridTooCoarse(i as f64 * h));
        }
    }
    let mut out: Vec<OracleCrossing> = kept.into_iter().map(|(_, c)| c).collect();
    out.sort_by(|a, b| a.k_star.total_cmp(&b.k_star));
    Ok(out)
}

/// Exact crossings of a diagonal model with linear phases `n_j k + c_j`.
///
/// Each branch with `n_j ≠ 0` meets `+1` at `|n_j|` equally spaced points and
/// contributes `sign(n_j)` to the local index there.
pub fn diagonal_model_predict(lp: &DiagonalModelLoop) -> Result<Vec<OracleCrossing>, OracleError> {
    let mut hits: Vec<(f64, i64)> = Vec::new();
    for (j, p) in lp.phases.iter().enumerate() {
        if !p.is_linear() {
            return Err(OracleError::UnsupportedPhase(j));
        }
        let n = p.slope;
        if n == 0 {
            let c = p.offset.rem_euclid(TAU);
            if c < 1e-12 || TAU - c < 1e-12 {
                return Err(OracleError::Continuum(j));
            }
            continue;
        }
        // n k + c ≡ 0  ⇔  |n| k ≡ -sign(n) c  (mod 2π)
        let target = (-(n.signum() as f64) * p.offset).rem_euclid(TAU);
        let target = if TAU - target < 1e-12 { 0.0 } else { target };
        let abs = n.unsigned_abs() as f64;
        for s in 0..n.unsigned_abs() {
            hits.push(((target + TAU * s as f64) / abs, n.signum()));
        }
    }
    hits.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut out: Vec<OracleCrossing> = Vec::new();
    for (k, sign) in hits {
        match out.last_mut() {
            Some(last) if (k - last.k_star).abs() < 1e-12 => {
                last.multiplicity += 1;
                *last.iota.as_mut().expect("closed form carries iota") += sign;
            }
            _ => out.push(OracleCrossing {
                k_star: k,
                multiplicity: 1,
                iota: Some(sign),
                source: OracleSource::ClosedForm,
            }),
        }
    }
    Ok(out)
}

/// True when both lists name the same crossings: equal counts, and each of
/// `ours` has exactly one oracle crossing within `k_tol` (circularly) with the
/// same multiplicity.
pub fn crossings_agree(ours: &[Crossing], theirs: &[OracleCrossing], k_tol: f64) -> bool {
    ours.len() == theirs.len()
        && ours.iter().all(|a| {
            theirs
                .iter()
                .filter(|b| circular_dist(a.k_star, b.k_star) < k_tol)
                .map(|b| b.multiplicity)
                .eq([a.multiplicity])
        })
}

/// Bounds for [`random_instance`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InstanceLimits {
    /// At most 6.
    pub max_vertices: usize,
    pub max_edges: usize,
    /// At most 4.
    pub max_length: u32,
    /// `|n_j|` bound, at most 2.
    pub max_slope: i32,
    /// Number of sine harmonics `M`, at most 2.
    pub max_harmonics: usize,
    /// `|s_{j,m}|` bound, at most 1.
    pub max_sine: f64,
    /// Probability of adding each non-tree edge.
    pub extra_edge_prob: f64,
}

impl Default for InstanceLimits {
    fn default() -> Self {
        InstanceLimits {
            max_vertices: 6,
            max_edges: 15,
            max_length: 4,
            max_slope: 2,
            max_harmonics: 2,
            max_sine: 1.0,
            extra_edge_prob: 0.25,
        }
    }
}

impl InstanceLimits {
    /// Instances whose loop dimension `n = 2|Y₁|` stays at most 10.
    pub fn small() -> Self {
        InstanceLimits {
            max_edges: 5,
            ..Self::default()
        }
    }
}

/// Haar-like unitary from the QR factor of a complex Gaussian matrix.
pub fn random_unitary(rng: &mut impl Rng, d: usize) -> CMatrix {
    let g = CMatrix::from_fn(d, d, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    g.qr().q()
}

/// Seeded random molecule with valid Kramers families.
pub fn random_instance(seed: u64, limits: &InstanceLimits) -> (MolecularGraph, HashMap<String, ScatteringFamily>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nv = rng.random_range(2..=limits.max_vertices.max(2));
    let names: Vec<String> = (0..nv).map(|i| format!("v{i}")).collect();

    let mut pairs: Vec<(usize, usize)> = (1..nv).map(|i| (rng.random_range(0..i), i)).collect();
    for i in 0..nv {
        for j in i + 1..nv {
            if pairs.len() >= limits.max_edges {
                break;
            }
            if !pairs.iter().any(|&(a, b)| (a.min(b), a.max(b)) == (i, j))
                && rng.random_bool(limits.extra_edge_prob)
            {
                pairs.push((i, j));
            }
        }
    }
    let edges: Vec<(String, String, i64)> = pairs
        .iter()
        .map(|&(a, b)| {
            let len = rng.random_range(1..=limits.max_length) as i64;
            (names[a].clone(), names[b].clone(), len)
        })
        .collect();
    let graph = MolecularGraph::new(names.clone(), edges).expect("generated graph is valid");

    let double = DoubleGraph::new(graph.clone());
    let mut families = HashMap::with_capacity(nv);
    for (v, name) in names.iter().enumerate() {
        let lengths: Vec<f64> = double.tail_block(v).map(|i| double.directed_edges()[i].length as f64).collect();
        // A block e^{ikL̂ₐ}Γᵃ(k) that is k-independent, or that keeps +1 in its
        // spectrum, yields a continuum of solutions.
        let family = loop {
            let f = random_family(&mut rng, lengths.len(), limits);
            if !block_is_degenerate(&f, &lengths) {
                break f;
            }
        };
        families.insert(name.clone(), family);
    }
    (graph, families)
}

fn block_is_degenerate(f: &ScatteringFamily, lengths: &[f64]) -> bool {
    let block = |k: f64| crate::linalg::phase_diagonal(lengths.iter().map(|l| l * k)) * f.eval(k);
    let first = block(0.0);
    let probes = [0.7, 1.9, 4.1];
    let constant = probes
        .into_iter()
        .all(|k| crate::linalg::max_norm(&(block(k) - &first)) < 1e-12);
    let pinned = probes.into_iter().all(|k| {
        let b = block(k);
        let d = b.nrows();
        (b - CMatrix::identity(d, d)).singular_values().min() < 1e-9
    });
    constant || pinned
}

fn random_family(rng: &mut impl Rng, d: usize, limits: &InstanceLimits) -> ScatteringFamily {
    let basis = random_unitary(rng, d);
    if rng.random_bool(0.5) {
        let signs: Vec<f64> = (0..d).map(|_| if rng.random_bool(0.5) { 0.0 } else { PI }).collect();
        let c = crate::linalg::phase_diagonal(signs);
        let m = &basis * c * basis.adjoint();
        let herm = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
        ScatteringFamily::constant_involution(herm).expect("V diag(±1) V* is a Hermitian unitary")
    } else {
        let phases = (0..d)
            .map(|_| {
                let slope = rng.random_range(-limits.max_slope..=limits.max_slope);
                let constant = if rng.random_bool(0.5) {
                    PhaseConstant::Zero
                } else {
                    PhaseConstant::Pi
                };
                let harmonics = rng.random_range(0..=limits.max_harmonics);
                let sines = (0..harmonics)
                    .map(|_| rng.random_range(-limits.max_sine..=limits.max_sine))
                    .collect();
                ChannelPhase {
                    slope,
                    constant,
                    sines,
                }
            })
            .collect();
        ScatteringFamily::conjugated_phase(basis, phases).expect("QR factor is unitary")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::Instance;
    use crate::unitary_loop::TrigPhase;

    #[test]
    fn monomial_prediction() {
        let p = diagonal_model_predict(&DiagonalModelLoop::monomials(&[2, 3])).unwrap();
        let got: Vec<(f64, usize, i64)> = p.iter().map(|c| (c.k_star, c.multiplicity, c.iota.unwrap())).collect();
        let want = [(0.0, 2, 2), (2.0 * PI / 3.0, 1, 1), (PI, 1, 1), (4.0 * PI / 3.0, 1, 1)];
        assert_eq!(got.len(), 4);
        for (g, w) in got.iter().zip(want) {
            assert!((g.0 - w.0).abs() < 1e-12);
            assert_eq!((g.1, g.2), (w.1, w.2));
        }
    }

    #[test]
    fn decreasing_and_cancelling_predictions() {
        let p = diagonal_model_predict(&DiagonalModelLoop::monomials(&[-1])).unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!((p[0].k_star, p[0].iota), (0.0, Some(-1)));
        let p = diagonal_model_predict(&DiagonalModelLoop::monomials(&[1, -1])).unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!((p[0].multiplicity, p[0].iota), (2, Some(0)));
    }

    #[test]
    fn nonlinear_phase_unsupported() {
        let lp = DiagonalModelLoop::new(vec![TrigPhase {
            slope: 1,
            offset: 0.0,
            cos: vec![],
            sin: vec![0.5],
        }]);
        assert_eq!(diagonal_model_predict(&lp), Err(OracleError::UnsupportedPhase(0)));
    }

    #[test]
    fn dense_scan_monomials() {
        let c = dense_scan_crossings(&DiagonalModelLoop::monomials(&[2, 3]), 10_000).unwrap();
        let want = [(0.0, 2), (2.0 * PI / 3.0, 1), (PI, 1), (4.0 * PI / 3.0, 1)];
        assert_eq!(c.len(), 4, "{c:?}");
        for (g, (k, m)) in c.iter().zip(want) {
            assert!((g.k_star - k).abs() < 1e-8, "{} {k}", g.k_star);
            assert_eq!(g.multiplicity, m);
        }
    }

    #[test]
    fn dense_scan_without_crossings() {
        let lp = DiagonalModelLoop::new(vec![TrigPhase::linear(0, PI / 2.0), TrigPhase::linear(0, -PI / 2.0)]);
        assert!(dense_scan_crossings(&lp, 10_000).unwrap().is_empty());
        assert_eq!(dense_scan_crossings(&lp, 100), Err(OracleError::GridTooSmall(100)));
    }

    #[test]
    fn random_instances_are_reproducible_and_valid() {
        let a = random_instance(0, &InstanceLimits::default());
        let b = random_instance(0, &InstanceLimits::default());
        let ja = Instance::new(a.0, a.1).to_json();
        let jb = Instance::new(b.0, b.1).to_json();
        assert_eq!(ja, jb);
        for seed in 0..200 {
            let (g, fams) = random_instance(seed, &InstanceLimits::small());
            assert!(2 * g.edges().len() <= 10);
            for f in fams.values() {
                f.check_kramers(16).unwrap();
            }
        }
    }
}
