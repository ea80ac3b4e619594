mod common;

use std::collections::HashMap;
use std::f64::consts::{PI, TAU};

use exciton_core::linalg::{eigenphases, max_norm, phase_diagonal, recenter, unitarity_defect, wrap_phase};
use exciton_core::oracle::{diagonal_model_predict, random_instance, random_unitary, InstanceLimits};
use exciton_core::spectral::{trace_eigenphases, winding_number};
use exciton_core::unitary_loop::ConjugatedLoop;
use exciton_core::{
    index_report, ChannelPhase, DiagonalModelLoop, DoubleGraph, FamilyLoop, GraphLoop, Instance, PhaseConstant,
    ReportOptions, ScatteringFamily, Tolerances, TrigPhase, UnitaryLoop,
};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn instance_loop(seed: u64, limits: &InstanceLimits) -> GraphLoop {
    let (g, fams) = random_instance(seed, limits);
    GraphLoop::new(DoubleGraph::new(g), &fams).unwrap()
}

fn channel() -> impl Strategy<Value = ChannelPhase> {
    (-3i32..=3, any::<bool>(), prop::collection::vec(-1.0f64..1.0, 0..=2)).prop_map(|(slope, pi, sines)| {
        ChannelPhase {
            slope,
            constant: if pi { PhaseConstant::Pi } else { PhaseConstant::Zero },
            sines,
        }
    })
}

fn family() -> impl Strategy<Value = ScatteringFamily> {
    (1usize..=4, any::<u64>(), any::<bool>()).prop_flat_map(|(d, seed, constant)| {
        prop::collection::vec(channel(), d).prop_map(move |phases| {
            let v = random_unitary(&mut ChaCha8Rng::seed_from_u64(seed), d);
            if constant {
                let signs = phases.iter().map(|p| p.constant.value());
                let m = &v * phase_diagonal(signs) * v.adjoint();
                let h = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
                ScatteringFamily::constant_involution(h).unwrap()
            } else {
                ScatteringFamily::conjugated_phase(v, phases).unwrap()
            }
        })
    })
}

fn central_difference<L: UnitaryLoop>(lp: &L, k: f64) -> exciton_core::CMatrix {
    let h = 1e-6;
    (lp.eval(k + h) - lp.eval(k - h)) / Complex64::new(2.0 * h, 0.0)
}

fn sorted_phases(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

/// Distance between two eigenphase multisets on the circle, matched in
/// sorted order after the best cyclic shift.
fn multiset_gap(a: &[f64], b: &[f64]) -> f64 {
    let a = sorted_phases(a.iter().map(|&t| wrap_phase(t)).collect());
    let b = sorted_phases(b.iter().map(|&t| wrap_phase(t)).collect());
    let n = a.len();
    (0..n)
        .map(|s| {
            (0..n)
                .map(|i| recenter(a[i] - b[(i + s) % n]).abs())
                .fold(0.0, f64::max)
        })
        .fold(f64::INFINITY, f64::min)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn family_is_unitary_periodic_and_kramers(f in family(), k in -10.0f64..10.0) {
        let g = f.eval(k);
        prop_assert!(unitarity_defect(&g) < 1e-10);
        prop_assert!(max_norm(&(f.eval(k + TAU) - &g)) < 1e-10);
        prop_assert!(max_norm(&(f.eval(-k) - g.adjoint())) < 1e-10);
        prop_assert!(f.check_kramers(16).is_ok());
    }

    #[test]
    fn family_derivative_matches_differences(f in family(), k in 0.0f64..TAU) {
        let lp = FamilyLoop(f.clone());
        prop_assert!(max_norm(&(f.derivative(k) - central_difference(&lp, k))) < 1e-7);
    }

    #[test]
    fn family_winding_matches_numeric_winding(f in family()) {
        let numeric = winding_number(&FamilyLoop(f.clone()), &Tolerances::default()).unwrap();
        prop_assert_eq!(f.winding(), numeric);
    }

    #[test]
    fn constant_families_square_to_identity(f in family()) {
        if f.is_constant() {
            for k in [0.0, PI] {
                let g = f.eval(k);
                let d = g.nrows();
                prop_assert!(max_norm(&(&g * &g - exciton_core::CMatrix::identity(d, d))) < 1e-10);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn graph_loop_contracts(seed in 0u64..1_000_000, k in 0.0f64..TAU) {
        let lp = instance_loop(seed, &InstanceLimits::default());
        let u = lp.eval(k);
        prop_assert!(unitarity_defect(&u) < 1e-10);
        prop_assert!(max_norm(&(lp.eval(k + TAU) - &u)) < 1e-10);
        let d = lp.derivative(k).unwrap();
        prop_assert!(max_norm(&(d - central_difference(&lp, k))) < 1e-7);

        // det U(k) = e^{ik ΣL} det Γ₀(k)
        let sum_l = lp.double().total_directed_length() as f64;
        let det = u.determinant();
        let factored = Complex64::cis(k * sum_l) * lp.gamma0(k).determinant();
        prop_assert!((det - factored).norm() < 1e-9);

        // Kramers: spectrum at -k is the negated spectrum at k.
        let here = eigenphases(&u).unwrap();
        let there: Vec<f64> = eigenphases(&lp.eval(-k)).unwrap().into_iter().map(|t| -t).collect();
        prop_assert!(multiset_gap(&here, &there) < 1e-8);
    }

    #[test]
    fn constant_scattering_flow_is_diagonal(seed in 0u64..1_000_000, k in 0.0f64..TAU) {
        let lp = instance_loop(seed, &InstanceLimits::default());
        if lp.all_constant() {
            let lengths: Vec<Complex64> = lp.double().lengths().map(|l| Complex64::new(0.0, l as f64)).collect();
            let ilu = exciton_core::CMatrix::from_diagonal(&nalgebra::DVector::from_vec(lengths)) * lp.eval(k);
            prop_assert!(max_norm(&(lp.derivative(k).unwrap() - ilu)) < 1e-12);
        }
    }

    #[test]
    fn instances_round_trip_through_json(seed in 0u64..1_000_000) {
        let (g, fams) = random_instance(seed, &InstanceLimits::default());
        let inst = Instance::new(g, fams);
        let text = inst.to_json();
        let again = Instance::from_json(&text).unwrap();
        prop_assert_eq!(&inst, &again);
        prop_assert_eq!(text, again.to_json());
    }

    #[test]
    fn double_graph_is_consistent(seed in 0u64..1_000_000) {
        let (g, _) = random_instance(seed, &InstanceLimits::default());
        let x = DoubleGraph::new(g.clone());
        prop_assert_eq!(x.dim(), 2 * g.edges().len());
        prop_assert_eq!(x.total_directed_length(), 2 * g.total_length());
        let edges = x.directed_edges();
        for i in 0..x.dim() {
            let r = x.reversal(i);
            prop_assert_ne!(r, i);
            prop_assert_eq!(x.reversal(r), i);
            prop_assert_eq!(edges[r].tail, edges[i].head);
            prop_assert_eq!(edges[r].length, edges[i].length);
        }
        prop_assert!(edges.windows(2).all(|w| (w[0].tail, w[0].head) < (w[1].tail, w[1].head)));
        prop_assert_eq!(&x, &DoubleGraph::new(g));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn report_invariants_on_random_instances(seed in 0u64..1_000_000) {
        let lp = instance_loop(seed, &InstanceLimits::default());
        let r = index_report(&lp, &ReportOptions::default()).unwrap();
        prop_assert!(r.theorem_a_ok);
        prop_assert!(r.bound_ok);
        prop_assert!(r.m >= r.q);
        prop_assert!(r.crossings.windows(2).all(|w| w[0].k_star < w[1].k_star));
        for c in &r.crossings {
            prop_assert!(c.multiplicity >= 1);
            prop_assert!((0.0..TAU).contains(&c.k_star));
            prop_assert!(c.iota_minus <= c.multiplicity && c.iota_plus <= c.multiplicity);
            prop_assert_eq!(c.iota, c.iota_plus as i64 - c.iota_minus as i64);
        }
        if lp.all_constant() {
            prop_assert!(r.crossings.iter().all(|c| c.iota == c.multiplicity as i64));
            prop_assert_eq!(r.m, r.alpha);
        }
        // Parity law for Kramers graph loops: m + d0 + dπ ≡ Σ_a w(Γᵃ) (mod 2).
        prop_assert_eq!((r.m + r.d0 + r.dpi).rem_euclid(2), lp.total_family_winding().rem_euclid(2));
        prop_assert_eq!(r.n_band.is_some(), lp.total_family_winding() % 2 == 0);
    }

    #[test]
    fn trace_matches_spectrum_and_winding(seed in 0u64..1_000_000) {
        let lp = instance_loop(seed, &InstanceLimits::default());
        let tol = Tolerances::default();
        let tr = trace_eigenphases(&lp, 64, &tol).unwrap();
        prop_assert!(tr.max_step() < tol.branch_step_cap);
        prop_assert!(tr.grid.windows(2).all(|w| w[0] < w[1]));
        for i in (0..tr.samples()).step_by(7) {
            let spectrum = eigenphases(&lp.eval(tr.grid[i])).unwrap();
            prop_assert!(multiset_gap(&tr.column(i), &spectrum) < 1e-9);
        }
        let alpha = winding_number(&lp, &tol).unwrap() as f64;
        prop_assert!((tr.total_turns() - alpha).abs() < 1e-9);
    }

    #[test]
    fn conjugation_leaves_report_unchanged(slopes in prop::collection::vec(-3i64..=3, 1..=4), seed in any::<u64>()) {
        let offsets: Vec<f64> = slopes.iter().enumerate().map(|(j, _)| 0.3 + 1.1 * j as f64).collect();
        let phases: Vec<TrigPhase> = slopes.iter().zip(&offsets).map(|(&n, &c)| TrigPhase::linear(n, c)).collect();
        let plain = DiagonalModelLoop::new(phases);
        let v = random_unitary(&mut ChaCha8Rng::seed_from_u64(seed), slopes.len());
        let conj = ConjugatedLoop { inner: plain.clone(), basis: v };
        let a = index_report(&plain, &ReportOptions::default()).unwrap();
        let b = index_report(&conj, &ReportOptions::default()).unwrap();
        prop_assert_eq!((a.alpha, a.q, a.m, a.d0, a.dpi), (b.alpha, b.q, b.m, b.d0, b.dpi));
        prop_assert_eq!(a.crossings.len(), b.crossings.len());
        for (x, y) in a.crossings.iter().zip(&b.crossings) {
            prop_assert!((x.k_star - y.k_star).abs() < 1e-8);
            prop_assert_eq!((x.multiplicity, x.iota), (y.multiplicity, y.iota));
        }
    }

    #[test]
    fn linear_diagonal_models_match_closed_form(
        branches in prop::collection::vec((-3i64..=3, prop_oneof![Just(0.0), Just(PI), 0.1f64..6.0]), 1..=4)
    ) {
        prop_assume!(branches.iter().all(|&(n, c)| n != 0 || c != 0.0));
        let lp = DiagonalModelLoop::new(branches.iter().map(|&(n, c)| TrigPhase::linear(n, c)).collect());
        let exact = diagonal_model_predict(&lp).unwrap();
        let alpha = winding_number(&lp, &Tolerances::default()).unwrap();
        prop_assert_eq!(exact.iter().map(|c| c.iota.unwrap()).sum::<i64>(), alpha);

        let r = index_report(&lp, &ReportOptions::default()).unwrap();
        prop_assert_eq!(r.crossings.len(), exact.len());
        for (x, y) in r.crossings.iter().zip(&exact) {
            let gap = recenter(x.k_star - y.k_star).abs();
            prop_assert!(gap < 1e-8, "{} vs {}", x.k_star, y.k_star);
            prop_assert_eq!((x.multiplicity, x.iota), (y.multiplicity, y.iota.unwrap()));
        }
    }
}

#[test]
fn random_instances_are_deterministic_and_valid() {
    for seed in 0..1000 {
        let (g, fams): (_, HashMap<String, ScatteringFamily>) = random_instance(seed, &InstanceLimits::default());
        assert!(g.vertices().len() <= 6);
        assert!(g.edges().iter().all(|e| (1..=4).contains(&e.length)));
        for (v, f) in &fams {
            f.check_kramers(16).unwrap();
            assert_eq!(f.channels(), g.degree(g.vertex_index(v).unwrap()));
        }
    }
    let json = |seed| {
        let (g, fams) = random_instance(seed, &InstanceLimits::default());
        Instance::new(g, fams).to_json()
    };
    assert_eq!(json(7), json(7));
}

#[test]
fn parity_law_counterexample() {
    // One edge of length 1 with Γᵃ = e^{ik}, Γᵇ = [1]: U = diag(e^{2ik}, e^{ik}).
    let g = common::graph(&["a", "b"], &[("a", "b", 1)]);
    let lp = common::assemble(
        g,
        vec![
            ("a", ScatteringFamily::scalar_phase(1, PhaseConstant::Zero, vec![])),
            ("b", common::scalar(1.0)),
        ],
    );
    let r = index_report(&lp, &ReportOptions::default()).unwrap();
    assert_eq!((r.m, r.d0, r.dpi), (3, 2, 0));
    assert_eq!(r.n_band, None);
    let banded = ReportOptions {
        band: true,
        ..ReportOptions::default()
    };
    assert_eq!(
        index_report(&lp, &banded).unwrap_err(),
        exciton_core::SpectralError::ParityViolation(5)
    );
}
