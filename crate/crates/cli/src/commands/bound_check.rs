use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;
use tdpf::bounds::{tight_bound, TIGHT_ORDER_CAP};
use tdpf::product_formula::error_scan;
use tdpf::{suzuki_plan, Family, Result};

use super::{family_bound, family_name, OK, SLACK_TOLS, VIOLATION};
use crate::config::BoundCheckConfig;
use crate::output::{to_csv, Report};

#[derive(Serialize)]
struct Row {
    family: &'static str,
    p: usize,
    t: f64,
    error: f64,
    tight: Option<f64>,
    bound: f64,
    bound_kind: &'static str,
    status: &'static str,
}

/// error ≤ tight ≤ corollary for exact-segment plans with p ≤ 2, error ≤ bound otherwise.
pub fn run(cfg: &BoundCheckConfig, tol: f64) -> Result<Report> {
    let h = cfg.model.build()?;
    let ts = cfg.times.values()?;
    let slack = SLACK_TOLS * tol;
    let mut rows = Vec::new();
    for &family in &cfg.families {
        for &p in &cfg.orders {
            let plan = suzuki_plan(p, h.gamma(), family)?;
            let errors = error_scan(&plan, &h, &ts, tol)?;
            let with_tight = family == Family::ExactSegment && p <= TIGHT_ORDER_CAP;
            let cells = ts
                .par_iter()
                .map(|&t| {
                    let tight = if with_tight { Some(tight_bound(&plan, &h, t)?) } else { None };
                    let extra: Vec<f64> = tight.iter().map(|r| r.tau_argmax).collect();
                    let (bound, kind) = family_bound(&plan, &h, t, &extra)?;
                    Ok((tight.map(|r| r.value), bound, kind))
                })
                .collect::<Result<Vec<_>>>()?;
            for ((&t, &error), &(tight, bound, bound_kind)) in ts.iter().zip(&errors).zip(&cells) {
                let mut ok = error <= bound + slack;
                if let Some(tb) = tight {
                    ok &= error <= tb + slack && tb <= bound * (1.0 + 1e-12);
                }
                let status = if ok { OK } else { VIOLATION };
                rows.push(Row { family: family_name(family), p, t, error, tight, bound, bound_kind, status });
            }
        }
    }
    let violations = rows.iter().filter(|r| r.status == VIOLATION).count();
    let worst = rows.iter().map(|r| if r.bound > 0.0 { r.error / r.bound } else { 0.0 }).fold(0.0, f64::max);
    Ok(Report {
        csv_name: "bound_check.csv",
        csv: to_csv(&rows)?,
        summary: json!({
            "rows": rows.len(),
            "violations": violations,
            "max_error_over_bound": worst,
            "slack": slack,
        }),
        violations,
    })
}
