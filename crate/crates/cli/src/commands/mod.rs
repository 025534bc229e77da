//! Subcommand bodies. Each one turns a parsed config into a `Report`.

use serde_json::{json, Value};
use tdpf::bounds::{corollary_bound, instantaneous_bound};
use tdpf::fit::fit_order_windowed;
use tdpf::{Family, Hamiltonian, Result, StagePlan};

pub mod bound_check;
pub mod floquet_check;
pub mod huyghebaert_check;
pub mod mpf_scan;
pub mod nonunitary_check;
pub mod order_scan;
pub mod resource_table;

pub const OK: &str = "ok";
pub const VIOLATION: &str = "VIOLATION";

/// Measured errors carry the oracle's own error, so comparisons allow this many oracle tolerances.
pub const SLACK_TOLS: f64 = 10.0;

pub fn family_name(f: Family) -> &'static str {
    match f {
        Family::ExactSegment => "exact-segment",
        Family::Instantaneous => "instantaneous",
    }
}

/// The family's own commutator bound: the corollary bound, or its instantaneous counterpart.
pub fn family_bound(plan: &StagePlan, h: &Hamiltonian, t: f64, extra: &[f64]) -> Result<(f64, &'static str)> {
    Ok(match plan.family {
        Family::ExactSegment => (corollary_bound(plan, h, t, extra)?.value, "corollary"),
        Family::Instantaneous => (instantaneous_bound(plan, h, t)?.value, "instantaneous"),
    })
}

/// Windowed log-log fit as JSON; a fit that cannot be made is reported, not raised.
pub fn fit_json(ts: &[f64], errors: &[f64], tol: f64, expected: f64) -> Value {
    match fit_order_windowed(ts, errors, tol) {
        Ok(w) => json!({
            "expected": expected,
            "slope": w.fit.slope,
            "intercept": w.fit.intercept,
            "residual": w.fit.residual,
            "points_used": w.used.len(),
        }),
        Err(e) => json!({ "expected": expected, "slope": null, "fit_error": e.to_string() }),
    }
}
