//! Degree of `det ∘ U : S¹ → U(1)` by adaptive phase integration.

use std::f64::consts::TAU;

use crate::error::SpectralError;
use crate::linalg::circular_diff;
use crate::tolerance::Tolerances;
use crate::unitary_loop::UnitaryLoop;

const INITIAL_INTERVALS: usize = 64;

/// Simpson estimate of a step may differ from the sampled one by at most this
/// before the step is split.
const SIMPSON_SLACK: f64 = 0.1;

#[derive(Clone, Copy)]
struct DetPoint {
    k: f64,
    arg: f64,
    /// `d arg det U / dk = Im tr(U* U')`, when the loop has a derivative.
    rate: Option<f64>,
}

fn det_point<L: UnitaryLoop + ?Sized>(lp: &L, k: f64) -> DetPoint {
    let u = lp.eval(k);
    let rate = lp.derivative(k).map(|du| (u.adjoint() * du).trace().im);
    DetPoint {
        k,
        arg: u.determinant().arg(),
        rate,
    }
}

/// Winding number of `k ↦ det U(k)` over one period.
pub fn winding_number<L: UnitaryLoop + ?Sized>(lp: &L, tol: &Tolerances) -> Result<i64, SpectralError> {
    let turns = winding_turns(lp, tol)?;
    let alpha = turns.round();
    let residual = (turns - alpha).abs();
    if !(residual < tol.winding_residual_cap) {
        return Err(SpectralError::WindingResidual(residual));
    }
    Ok(alpha as i64)
}

/// Accumulated `Δ arg det / 2π`, before rounding.
pub fn winding_turns<L: UnitaryLoop + ?Sized>(lp: &L, tol: &Tolerances) -> Result<f64, SpectralError> {
    let mut total = 0.0;
    let mut left = det_point(lp, 0.0);
    for i in 1..=INITIAL_INTERVALS {
        let right = det_point(lp, TAU * i as f64 / INITIAL_INTERVALS as f64);
        total += integrate(lp, tol, left, right, 0)?;
        left = right;
    }
    Ok(total / TAU)
}

fn integrate<L: UnitaryLoop + ?Sized>(
    lp: &L,
    tol: &Tolerances,
    l: DetPoint,
    r: DetPoint,
    depth: u32,
) -> Result<f64, SpectralError> {
    let step = circular_diff(r.arg, l.arg);
    let m = det_point(lp, 0.5 * (l.k + r.k));
    // A step aliased by a full turn disagrees with its two halves or, when
    // the rate is known, with the Simpson integral of the rate.
    let halves = circular_diff(m.arg, l.arg) + circular_diff(r.arg, m.arg);
    let simpson_ok = match (l.rate, m.rate, r.rate) {
        (Some(a), Some(b), Some(c)) => (step - (r.k - l.k) * (a + 4.0 * b + c) / 6.0).abs() < SIMPSON_SLACK,
        _ => true,
    };
    if step.abs() < tol.det_step_cap && (halves - step).abs() < 1e-9 && simpson_ok {
        return Ok(step);
    }
    if depth >= tol.max_bisections {
        return Err(SpectralError::RefinementLimit(l.k));
    }
    Ok(integrate(lp, tol, l, m, depth + 1)? + integrate(lp, tol, m, r, depth + 1)?)
}
