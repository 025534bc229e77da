use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;
use tdpf::bounds::huyghebaert_bound;
use tdpf::product_formula::error_scan;
use tdpf::{suzuki_plan, Family, Result};

use super::{OK, SLACK_TOLS, VIOLATION};
use crate::config::HuyghebaertConfig;
use crate::output::{to_csv, Report};

#[derive(Serialize)]
struct Row {
    t: f64,
    error: f64,
    bound: f64,
    status: &'static str,
}

/// First-order exact-segment error against the double-integral commutator bound (Γ = 2).
pub fn run(cfg: &HuyghebaertConfig, tol: f64) -> Result<Report> {
    let h = cfg.model.build()?;
    let ts = cfg.times.values()?;
    let plan = suzuki_plan(1, h.gamma(), Family::ExactSegment)?;
    let errors = error_scan(&plan, &h, &ts, tol)?;
    let bounds = ts.par_iter().map(|&t| huyghebaert_bound(&h, t)).collect::<Result<Vec<_>>>()?;
    let slack = SLACK_TOLS * tol;
    let rows: Vec<Row> = ts
        .iter()
        .zip(&errors)
        .zip(&bounds)
        .map(|((&t, &error), &bound)| Row { t, error, bound, status: if error <= bound + slack { OK } else { VIOLATION } })
        .collect();
    let violations = rows.iter().filter(|r| r.status == VIOLATION).count();
    Ok(Report {
        csv_name: "huyghebaert_check.csv",
        csv: to_csv(&rows)?,
        summary: json!({ "rows": rows.len(), "violations": violations, "slack": slack }),
        violations,
    })
}
