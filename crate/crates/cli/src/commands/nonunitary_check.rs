use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;
use tdpf::bounds::{nonunitary_bound, nonunitary_factor};
use tdpf::product_formula::error_scan;
use tdpf::{suzuki_plan, Family, Result};

use super::{OK, SLACK_TOLS, VIOLATION};
use crate::config::NonunitaryConfig;
use crate::output::{to_csv, Report};

#[derive(Serialize)]
struct Row {
    p: usize,
    t: f64,
    error: f64,
    bound: f64,
    factor: f64,
    status: &'static str,
}

/// PF error for a possibly non-Hermitian generator against the amplified commutator bound.
pub fn run(cfg: &NonunitaryConfig, tol: f64) -> Result<Report> {
    let h = cfg.model.build()?;
    let ts = cfg.times.values()?;
    let slack = SLACK_TOLS * tol;
    let mut rows = Vec::new();
    for &p in &cfg.orders {
        let plan = suzuki_plan(p, h.gamma(), Family::ExactSegment)?;
        let v = plan.layers() as f64;
        let errors = error_scan(&plan, &h, &ts, tol)?;
        let cells = ts
            .par_iter()
            .map(|&t| Ok((nonunitary_bound(&plan, &h, t)?.value, nonunitary_factor(&h, t, v)?)))
            .collect::<Result<Vec<_>>>()?;
        for ((&t, &error), &(bound, factor)) in ts.iter().zip(&errors).zip(&cells) {
            let status = if error <= bound + slack { OK } else { VIOLATION };
            rows.push(Row { p, t, error, bound, factor, status });
        }
    }
    let violations = rows.iter().filter(|r| r.status == VIOLATION).count();
    Ok(Report {
        csv_name: "nonunitary_check.csv",
        csv: to_csv(&rows)?,
        summary: json!({
            "rows": rows.len(),
            "violations": violations,
            "hermitian": h.is_hermitian(),
            "slack": slack,
        }),
        violations,
    })
}
