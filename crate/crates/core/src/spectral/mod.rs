//! Spectral flow of a unitary loop: eigenphase tracking, crossings, local
//! indices, determinant winding and the assembled index report.

mod crossings;
mod report;
mod trace;
mod winding;

pub use crossings::{local_index_at, locate_crossings, multiplicity_at, Crossing, LocalIndex};
pub use report::{index_report, long_arm_sweep, IndexReport, ReportOptions, SweepRow};
pub use trace::{trace_eigenphases, EigenphaseTrace};
pub use winding::{winding_number, winding_turns};

pub use crate::linalg::{unitary_eigenphases, Eigenphases};
