//! Vertex scattering families `k ↦ Γᵃ(k)`.
//!
//! Two closed forms are supported, both unitary for every `k` by
//! construction and both Kramers-symmetric (`Γ(-k) = Γ(k)*`):
//!
//! * a constant Hermitian unitary `C`;
//! * `V · diag(e^{iφ_j(k)}) · V*` with `φ_j(k) = n_j k + c_j + Σ_m s_{j,m} sin(mk)`
//!   and `c_j ∈ {0, π}`.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::FamilyError;
use crate::linalg::{max_norm, phase_diagonal, unitarity_defect, CMatrix};

const INPUT_TOL: f64 = 1e-12;
const RUNTIME_TOL: f64 = 1e-10;

/// The constant term of a channel phase; only `0` and `π` keep Kramers exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PhaseConstant {
    #[serde(rename = "0")]
    Zero,
    #[serde(rename = "pi")]
    Pi,
}

impl PhaseConstant {
    pub fn value(self) -> f64 {
        match self {
            PhaseConstant::Zero => 0.0,
            PhaseConstant::Pi => PI,
        }
    }

    pub fn parse(s: &str) -> Result<Self, FamilyError> {
        match s {
            "0" => Ok(PhaseConstant::Zero),
            "pi" => Ok(PhaseConstant::Pi),
            other => Err(FamilyError::BadPhaseConstant(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelPhase {
    pub slope: i32,
    pub constant: PhaseConstant,
    /// `s_{j,m}` for `m = 1..=M`.
    pub sines: Vec<f64>,
}

impl ChannelPhase {
    pub fn linear(slope: i32, constant: PhaseConstant) -> Self {
        ChannelPhase {
            slope,
            constant,
            sines: Vec::new(),
        }
    }

    pub fn value(&self, k: f64) -> f64 {
        let osc: f64 = self
            .sines
            .iter()
            .enumerate()
            .map(|(m, s)| s * ((m as f64 + 1.0) * k).sin())
            .sum();
        self.slope as f64 * k + self.constant.value() + osc
    }

    pub fn derivative(&self, k: f64) -> f64 {
        let osc: f64 = self
            .sines
            .iter()
            .enumerate()
            .map(|(m, s)| {
                let m = m as f64 + 1.0;
                m * s * (m * k).cos()
            })
            .sum();
        self.slope as f64 + osc
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScatteringFamily {
    ConstantInvolution { matrix: CMatrix },
    ConjugatedPhase { basis: CMatrix, phases: Vec<ChannelPhase> },
}

impl ScatteringFamily {
    /// Constant Hermitian unitary; rejected unless `C C* = I` and `C = C*`.
    pub fn constant_involution(matrix: CMatrix) -> Result<Self, FamilyError> {
        let d = matrix.nrows();
        if d == 0 || matrix.ncols() != d {
            return Err(FamilyError::Shape { expected: d.max(1) });
        }
        if matrix.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(FamilyError::NonFinite);
        }
        let u = unitarity_defect(&matrix);
        if u > INPUT_TOL {
            return Err(FamilyError::NotUnitary(u));
        }
        let h = max_norm(&(&matrix - matrix.adjoint()));
        if h > INPUT_TOL {
            return Err(FamilyError::NotHermitian(h));
        }
        Ok(ScatteringFamily::ConstantInvolution { matrix })
    }

    pub fn conjugated_phase(basis: CMatrix, phases: Vec<ChannelPhase>) -> Result<Self, FamilyError> {
        let d = basis.nrows();
        if d == 0 || basis.ncols() != d {
            return Err(FamilyError::Shape { expected: d.max(1) });
        }
        if phases.len() != d {
            return Err(FamilyError::ChannelCount {
                expected: d,
                got: phases.len(),
            });
        }
        if basis.iter().any(|z| !z.re.is_finite() || !z.im.is_finite())
            || phases.iter().flat_map(|p| &p.sines).any(|s| !s.is_finite())
        {
            return Err(FamilyError::NonFinite);
        }
        let u = unitarity_defect(&basis);
        if u > INPUT_TOL {
            return Err(FamilyError::NotUnitary(u));
        }
        Ok(ScatteringFamily::ConjugatedPhase { basis, phases })
    }

    /// Scalar family `e^{i(n k + c)}`.
    pub fn scalar_phase(slope: i32, constant: PhaseConstant, sines: Vec<f64>) -> Self {
        ScatteringFamily::ConjugatedPhase {
            basis: CMatrix::identity(1, 1),
            phases: vec![ChannelPhase {
                slope,
                constant,
                sines,
            }],
        }
    }

    /// Kirchhoff vertex `(2/d) J - I`.
    pub fn kirchhoff(d: usize) -> Self {
        let off = Complex64::new(2.0 / d as f64, 0.0);
        let mut m = CMatrix::from_element(d, d, off);
        for i in 0..d {
            m[(i, i)] -= Complex64::new(1.0, 0.0);
        }
        ScatteringFamily::ConstantInvolution { matrix: m }
    }

    /// Channel count `d`.
    pub fn channels(&self) -> usize {
        match self {
            ScatteringFamily::ConstantInvolution { matrix } => matrix.nrows(),
            ScatteringFamily::ConjugatedPhase { basis, .. } => basis.nrows(),
        }
    }

    pub fn is_constant(&self) -> bool {
        match self {
            ScatteringFamily::ConstantInvolution { .. } => true,
            ScatteringFamily::ConjugatedPhase { phases, .. } => phases
                .iter()
                .all(|p| p.slope == 0 && p.sines.iter().all(|&s| s == 0.0)),
        }
    }

    /// `Γᵃ(k)`.
    pub fn eval(&self, k: f64) -> CMatrix {
        match self {
            ScatteringFamily::ConstantInvolution { matrix } => matrix.clone(),
            ScatteringFamily::ConjugatedPhase { basis, phases } => {
                let d = phase_diagonal(phases.iter().map(|p| p.value(k)));
                basis * d * basis.adjoint()
            }
        }
    }

    /// `dΓᵃ/dk` in closed form.
    pub fn derivative(&self, k: f64) -> CMatrix {
        match self {
            ScatteringFamily::ConstantInvolution { matrix } => {
                CMatrix::zeros(matrix.nrows(), matrix.ncols())
            }
            ScatteringFamily::ConjugatedPhase { basis, phases } => {
                let diag: Vec<Complex64> = phases
                    .iter()
                    .map(|p| Complex64::i() * p.derivative(k) * Complex64::cis(p.value(k)))
                    .collect();
                let d = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag));
                basis * d * basis.adjoint()
            }
        }
    }

    /// Degree of `det ∘ Γᵃ : S¹ → U(1)`.
    pub fn winding(&self) -> i64 {
        match self {
            ScatteringFamily::ConstantInvolution { .. } => 0,
            ScatteringFamily::ConjugatedPhase { phases, .. } => {
                phases.iter().map(|p| p.slope as i64).sum()
            }
        }
    }

    /// Samples `‖Γ(-k) - Γ(k)*‖` on a uniform grid of `[0, 2π)`.
    pub fn check_kramers(&self, samples: usize) -> Result<(), FamilyError> {
        if samples < 8 {
            return Err(FamilyError::TooFewSamples(samples));
        }
        for i in 0..samples {
            let k = TAU * i as f64 / samples as f64;
            let norm = max_norm(&(self.eval(-k) - self.eval(k).adjoint()));
            if !(norm <= RUNTIME_TOL) {
                return Err(FamilyError::KramersViolation { k, norm });
            }
        }
        Ok(())
    }
}

pub fn eval_family(f: &ScatteringFamily, k: f64) -> CMatrix {
    f.eval(k)
}

pub fn family_derivative(f: &ScatteringFamily, k: f64) -> CMatrix {
    f.derivative(k)
}

pub fn family_winding(f: &ScatteringFamily) -> i64 {
    f.winding()
}

pub fn check_kramers(f: &ScatteringFamily, samples: usize) -> Result<(), FamilyError> {
    f.check_kramers(samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_PI_2;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn constant_minus_one() {
        let f = ScatteringFamily::constant_involution(CMatrix::from_element(1, 1, c(-1.0))).unwrap();
        for k in [0.0, 1.3, -7.0] {
            assert_eq!(f.eval(k)[(0, 0)], c(-1.0));
        }
    }

    #[test]
    fn scalar_phase_quarter_turn() {
        let f = ScatteringFamily::scalar_phase(1, PhaseConstant::Zero, vec![]);
        let z = f.eval(FRAC_PI_2)[(0, 0)];
        assert_abs_diff_eq!(z.re, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(z.im, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn kirchhoff_entries_and_involution() {
        let f = ScatteringFamily::kirchhoff(3);
        let m = f.eval(0.7);
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { -1.0 / 3.0 } else { 2.0 / 3.0 };
                assert_abs_diff_eq!(m[(i, j)].re, want, epsilon = 1e-15);
            }
        }
        // Direct multiplication: C² = I.
        let sq = &m * &m;
        assert!(max_norm(&(sq - CMatrix::identity(3, 3))) < 1e-15);
        assert!(ScatteringFamily::constant_involution(m).is_ok());
    }

    #[test]
    fn derivative_closed_forms() {
        let f = ScatteringFamily::kirchhoff(3);
        assert_eq!(max_norm(&f.derivative(0.4)), 0.0);
        let f = ScatteringFamily::scalar_phase(2, PhaseConstant::Zero, vec![]);
        let d = f.derivative(0.0)[(0, 0)];
        assert_abs_diff_eq!(d.re, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(d.im, 2.0, epsilon = 1e-15);
    }

    #[test]
    fn sine_derivative_matches_finite_difference() {
        let f = ScatteringFamily::scalar_phase(0, PhaseConstant::Zero, vec![1.0]);
        let h = 1e-6;
        let fd = (f.eval(h) - f.eval(-h)) / c(2.0 * h);
        let d = f.derivative(0.0);
        assert!(max_norm(&(fd - &d)) < 1e-8);
        assert_abs_diff_eq!(d[(0, 0)].im, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn windings() {
        let f = ScatteringFamily::kirchhoff(2);
        assert_eq!(f.winding(), 0);
        let two = ScatteringFamily::conjugated_phase(
            CMatrix::identity(2, 2),
            vec![
                ChannelPhase::linear(1, PhaseConstant::Zero),
                ChannelPhase::linear(-2, PhaseConstant::Pi),
            ],
        )
        .unwrap();
        assert_eq!(two.winding(), -1);
    }

    #[test]
    fn bad_phase_constant_rejected() {
        assert_eq!(
            PhaseConstant::parse("pi/2"),
            Err(FamilyError::BadPhaseConstant("pi/2".into()))
        );
    }

    #[test]
    fn non_hermitian_constant_rejected() {
        let m = CMatrix::from_element(1, 1, Complex64::i());
        assert!(matches!(
            ScatteringFamily::constant_involution(m),
            Err(FamilyError::NotHermitian(_))
        ));
    }

    #[test]
    fn kramers_holds_structurally() {
        let f = ScatteringFamily::scalar_phase(3, PhaseConstant::Pi, vec![0.5, -0.2]);
        assert!(f.check_kramers(64).is_ok());
        assert!(ScatteringFamily::kirchhoff(4).check_kramers(8).is_ok());
        assert_eq!(f.check_kramers(4), Err(FamilyError::TooFewSamples(4)));
    }

    #[test]
    fn kramers_violation_detected() {
        // Bypass the constructor to emulate a corrupted family.
        let f = ScatteringFamily::ConstantInvolution {
            matrix: CMatrix::from_element(1, 1, Complex64::i()),
        };
        assert!(matches!(f.check_kramers(8), Err(FamilyError::KramersViolation { .. })));
    }
}
