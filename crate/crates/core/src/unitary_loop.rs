//! Loops `k ↦ U(k) ∈ U(n)` and the assembled exciton-scattering loop
//! `Γ(k) = e^{ikL̂} · Γ₀(k)`.

use std::collections::HashMap;

use num_complex::Complex64;

use crate::error::LoopError;
use crate::graph::DoubleGraph;
use crate::linalg::{phase_diagonal, CMatrix};
use crate::scattering::ScatteringFamily;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    GraphBacked,
    DiagonalModel,
    SingleFamily,
}

/// A real-analytic, `2π`-periodic unitary loop.
pub trait UnitaryLoop: Sync {
    fn dim(&self) -> usize;

    fn eval(&self, k: f64) -> CMatrix;

    /// Closed-form `dU/dk`, when available.
    fn derivative(&self, _k: f64) -> Option<CMatrix> {
        None
    }

    fn provenance(&self) -> Provenance;

    /// The underlying graph loop, for loops built from a molecule.
    fn as_graph(&self) -> Option<&GraphLoop> {
        None
    }
}

pub fn eval_loop<L: UnitaryLoop + ?Sized>(lp: &L, k: f64) -> CMatrix {
    lp.eval(k)
}

/// `Γ(k) = e^{ikL̂} · Γ₀(k)` on `ℂ[X₁]`.
#[derive(Debug, Clone)]
pub struct GraphLoop {
    double: DoubleGraph,
    /// Indexed by vertex position.
    families: Vec<ScatteringFamily>,
}

pub fn assemble_graph_loop(
    double: &DoubleGraph,
    families: &HashMap<String, ScatteringFamily>,
) -> Result<GraphLoop, LoopError> {
    GraphLoop::new(double.clone(), families)
}

impl GraphLoop {
    pub fn new(double: DoubleGraph, families: &HashMap<String, ScatteringFamily>) -> Result<Self, LoopError> {
        let g = double.graph();
        let mut ordered = Vec::with_capacity(g.vertices().len());
        for (v, name) in g.vertices().iter().enumerate() {
            let f = families
                .get(name)
                .ok_or_else(|| LoopError::MissingFamily(name.clone()))?;
            let expected = double.tail_block(v).len();
            if f.channels() != expected {
                return Err(LoopError::DegreeMismatch {
                    vertex: name.clone(),
                    expected,
                    got: f.channels(),
                });
            }
            ordered.push(f.clone());
        }
        Ok(GraphLoop {
            double,
            families: ordered,
        })
    }

    pub fn double(&self) -> &DoubleGraph {
        &self.double
    }

    /// Families in vertex order.
    pub fn families(&self) -> &[ScatteringFamily] {
        &self.families
    }

    /// Same molecule with every length multiplied by `t`.
    pub fn scaled(&self, t: u32) -> GraphLoop {
        GraphLoop {
            double: DoubleGraph::new(self.double.graph().scaled(t)),
            families: self.families.clone(),
        }
    }

    /// `Σ_a w(Γᵃ)`.
    pub fn total_family_winding(&self) -> i64 {
        self.families.iter().map(ScatteringFamily::winding).sum()
    }

    /// `Σ_{ab} L_{ab} + Σ_a w(Γᵃ)`.
    pub fn lower_bound(&self) -> i64 {
        self.double.total_directed_length() as i64 + self.total_family_winding()
    }

    pub fn all_constant(&self) -> bool {
        self.families.iter().all(ScatteringFamily::is_constant)
    }

    /// Block-diagonal `Γ₀(k)` in the tail-grouped left-lex basis.
    pub fn gamma0(&self, k: f64) -> CMatrix {
        self.block_sum(|f| f.eval(k))
    }

    pub fn gamma0_derivative(&self, k: f64) -> CMatrix {
        self.block_sum(|f| f.derivative(k))
    }

    fn block_sum(&self, block: impl Fn(&ScatteringFamily) -> CMatrix) -> CMatrix {
        let n = self.double.dim();
        let mut m = CMatrix::zeros(n, n);
        for (v, f) in self.families.iter().enumerate() {
            let r = self.double.tail_block(v);
            m.view_mut((r.start, r.start), (r.len(), r.len()))
                .copy_from(&block(f));
        }
        m
    }

    fn propagation(&self, k: f64) -> Vec<Complex64> {
        self.double
            .lengths()
            .map(|l| Complex64::cis(k * l as f64))
            .collect()
    }

    /// Residuals of the two exciton-scattering equations for amplitudes `psi`.
    ///
    /// `r₁ = max_{ab} |ψ_{ba} - e^{ikL_{ab}} ψ_{ab}|` (propagation along an arm),
    /// `r₂ = max_{ab} |ψ_{ba} - Σ_c Γᵃ_{{a,b},{a,c}}(k) ψ_{ac}|` (scattering at `a`).
    pub fn es_residual(&self, k: f64, psi: &[Complex64]) -> Result<(f64, f64), LoopError> {
        let n = self.double.dim();
        if psi.len() != n {
            return Err(LoopError::DimensionMismatch {
                expected: n,
                got: psi.len(),
            });
        }
        let blocks: Vec<CMatrix> = self.families.iter().map(|f| f.eval(k)).collect();
        let mut r1: f64 = 0.0;
        let mut r2: f64 = 0.0;
        for (ab, d) in self.double.directed_edges().iter().enumerate() {
            let ba = self.double.reversal(ab);
            let prop = Complex64::cis(k * d.length as f64);
            r1 = r1.max((psi[ba] - prop * psi[ab]).norm());

            let a = d.tail;
            let block = &blocks[a];
            let row = self.double.channel(ab);
            let scattered: Complex64 = self
                .double
                .tail_block(a)
                .map(|ac| block[(row, self.double.channel(ac))] * psi[ac])
                .sum();
            r2 = r2.max((psi[ba] - scattered).norm());
        }
        Ok((r1, r2))
    }
}

impl UnitaryLoop for GraphLoop {
    fn dim(&self) -> usize {
        self.double.dim()
    }

    fn eval(&self, k: f64) -> CMatrix {
        let mut m = self.gamma0(k);
        for (i, p) in self.propagation(k).into_iter().enumerate() {
            for z in m.row_mut(i).iter_mut() {
                *z *= p;
            }
        }
        m
    }

    /// `iL̂ e^{ikL̂} Γ₀(k) + e^{ikL̂} Γ₀'(k)`.
    fn derivative(&self, k: f64) -> Option<CMatrix> {
        let g0 = self.gamma0(k);
        let mut d = self.gamma0_derivative(k);
        let lengths: Vec<f64> = self.double.lengths().map(f64::from).collect();
        for (i, p) in self.propagation(k).into_iter().enumerate() {
            let lift = Complex64::i() * lengths[i] * p;
            for j in 0..d.ncols() {
                d[(i, j)] = lift * g0[(i, j)] + p * d[(i, j)];
            }
        }
        Some(d)
    }

    fn provenance(&self) -> Provenance {
        Provenance::GraphBacked
    }

    fn as_graph(&self) -> Option<&GraphLoop> {
        Some(self)
    }
}

/// Trigonometric phase `n k + c + Σ_m (a_m cos mk + b_m sin mk)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrigPhase {
    pub slope: i64,
    pub offset: f64,
    pub cos: Vec<f64>,
    pub sin: Vec<f64>,
}

impl TrigPhase {
    pub fn linear(slope: i64, offset: f64) -> Self {
        TrigPhase {
            slope,
            offset,
            ..Default::default()
        }
    }

    pub fn is_linear(&self) -> bool {
        self.cos.iter().chain(&self.sin).all(|&c| c == 0.0)
    }

    pub fn value(&self, k: f64) -> f64 {
        let mut v = self.slope as f64 * k + self.offset;
        for (m, a) in self.cos.iter().enumerate() {
            v += a * ((m as f64 + 1.0) * k).cos();
        }
        for (m, b) in self.sin.iter().enumerate() {
            v += b * ((m as f64 + 1.0) * k).sin();
        }
        v
    }

    pub fn derivative(&self, k: f64) -> f64 {
        let mut v = self.slope as f64;
        for (m, a) in self.cos.iter().enumerate() {
            let m = m as f64 + 1.0;
            v -= m * a * (m * k).sin();
        }
        for (m, b) in self.sin.iter().enumerate() {
            let m = m as f64 + 1.0;
            v += m * b * (m * k).cos();
        }
        v
    }
}

/// `V · diag(e^{iθ_j(k)}) · V*` with closed-form phases. No Kramers requirement.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalModelLoop {
    pub phases: Vec<TrigPhase>,
    pub basis: Option<CMatrix>,
}

impl DiagonalModelLoop {
    pub fn new(phases: Vec<TrigPhase>) -> Self {
        DiagonalModelLoop { phases, basis: None }
    }

    /// `diag(z^{n_1}, …, z^{n_d})`.
    pub fn monomials(slopes: &[i64]) -> Self {
        Self::new(slopes.iter().map(|&n| TrigPhase::linear(n, 0.0)).collect())
    }

    pub fn with_basis(mut self, basis: CMatrix) -> Self {
        self.basis = Some(basis);
        self
    }

    fn conjugate(&self, d: CMatrix) -> CMatrix {
        match &self.basis {
            Some(v) => v * d * v.adjoint(),
            None => d,
        }
    }
}

impl UnitaryLoop for DiagonalModelLoop {
    fn dim(&self) -> usize {
        self.phases.len()
    }

    fn eval(&self, k: f64) -> CMatrix {
        self.conjugate(phase_diagonal(self.phases.iter().map(|p| p.value(k))))
    }

    fn derivative(&self, k: f64) -> Option<CMatrix> {
        let diag: Vec<Complex64> = self
            .phases
            .iter()
            .map(|p| Complex64::i() * p.derivative(k) * Complex64::cis(p.value(k)))
            .collect();
        Some(self.conjugate(CMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag))))
    }

    fn provenance(&self) -> Provenance {
        Provenance::DiagonalModel
    }
}

/// A single scattering family viewed as a loop.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilyLoop(pub ScatteringFamily);

impl UnitaryLoop for FamilyLoop {
    fn dim(&self) -> usize {
        self.0.channels()
    }

    fn eval(&self, k: f64) -> CMatrix {
        self.0.eval(k)
    }

    fn derivative(&self, k: f64) -> Option<CMatrix> {
        Some(self.0.derivative(k))
    }

    fn provenance(&self) -> Provenance {
        Provenance::SingleFamily
    }
}

/// `V · U(k) · V*` for a constant unitary `V`.
#[derive(Debug, Clone)]
pub struct ConjugatedLoop<L> {
    pub inner: L,
    pub basis: CMatrix,
}

impl<L: UnitaryLoop> UnitaryLoop for ConjugatedLoop<L> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn eval(&self, k: f64) -> CMatrix {
        &self.basis * self.inner.eval(k) * self.basis.adjoint()
    }

    fn derivative(&self, k: f64) -> Option<CMatrix> {
        self.inner
            .derivative(k)
            .map(|d| &self.basis * d * self.basis.adjoint())
    }

    fn provenance(&self) -> Provenance {
        self.inner.provenance()
    }
}
