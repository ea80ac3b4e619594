//! Counting excitons of branched molecules through the spectral flow of the
//! exciton-scattering loop `Γ(k) = e^{ikL̂} Γ₀(k)`.
//!
//! The crate is organized bottom-up:
//!
//! * [`graph`]: the molecular graph and its directed double;
//! * [`scattering`]: vertex scattering families;
//! * [`unitary_loop`]: loop assembly and the [`UnitaryLoop`] abstraction;
//! * [`spectral`]: crossings, local indices, winding number, index report;
//! * [`oracle`]: brute-force and closed-form cross-checks, random instances;
//! * [`instance`]: the JSON instance format.

pub mod error;
pub mod graph;
pub mod instance;
pub mod linalg;
pub mod oracle;
pub mod scattering;
pub mod spectral;
pub mod tolerance;
pub mod unitary_loop;

pub use error::{Error, FamilyError, GraphError, LoopError, OracleError, SpectralError};
pub use graph::{build_double, validate_graph, DoubleGraph, MolecularGraph};
pub use instance::Instance;
pub use linalg::CMatrix;
pub use scattering::{ChannelPhase, PhaseConstant, ScatteringFamily};
pub use spectral::{index_report, Crossing, EigenphaseTrace, IndexReport, ReportOptions, SweepRow};
pub use tolerance::Tolerances;
pub use unitary_loop::{DiagonalModelLoop, FamilyLoop, GraphLoop, Provenance, TrigPhase, UnitaryLoop};
