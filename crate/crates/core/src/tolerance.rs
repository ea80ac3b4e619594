//! Numeric witnesses for the exact statements the pipeline checks.
//!
//! Every threshold used by [`crate::spectral`] lives here so that a run is
//! fully described by its instance plus this ledger. Instance files may
//! override any subset of the fields.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Eigenvalues with `|λ - 1| < cluster_eps` count toward a multiplicity.
    pub cluster_eps: f64,
    /// Width of the final bisection bracket around a crossing.
    pub bisection_k_tol: f64,
    /// Largest allowed per-branch phase step between consecutive trace samples.
    pub branch_step_cap: f64,
    /// Largest allowed step of `arg det U` in the winding integration.
    pub det_step_cap: f64,
    /// Crossings closer than this in `k` are the same crossing.
    pub merge_radius: f64,
    /// Upper bound for the one-sided window used by the local index.
    pub delta_cap: f64,
    /// Largest accepted distance of `total / 2π` from an integer.
    pub winding_residual_cap: f64,
    /// Required cost gap between a trace assignment and any inequivalent runner-up.
    pub assignment_margin: f64,
    /// Grid-point phases below this trigger a local search for a tangential touch.
    pub touch_probe: f64,
    /// Maximum number of halvings of one trace or winding interval.
    pub max_bisections: u32,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            cluster_eps: 1e-8,
            bisection_k_tol: 1e-10,
            branch_step_cap: std::f64::consts::FRAC_PI_4,
            det_step_cap: std::f64::consts::FRAC_PI_2,
            merge_radius: 1e-8,
            delta_cap: 1e-3,
            winding_residual_cap: 1e-6,
            assignment_margin: 1e-6,
            touch_probe: 1e-6,
            max_bisections: 40,
        }
    }
}
