use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;
use tdpf::product_formula::error_scan;
use tdpf::{suzuki_plan, Result};

use super::{family_bound, family_name, fit_json};
use crate::config::OrderScanConfig;
use crate::output::{to_csv, Report};

#[derive(Serialize)]
struct Row {
    family: &'static str,
    p: usize,
    t: f64,
    error: f64,
    bound: f64,
    bound_kind: &'static str,
}

pub fn run(cfg: &OrderScanConfig, tol: f64) -> Result<Report> {
    let h = cfg.model.build()?;
    let ts = cfg.times.values()?;
    let mut rows = Vec::new();
    let mut fits = Vec::new();
    for &family in &cfg.families {
        for &p in &cfg.orders {
            let plan = suzuki_plan(p, h.gamma(), family)?;
            let errors = error_scan(&plan, &h, &ts, tol)?;
            let bounds = ts.par_iter().map(|&t| family_bound(&plan, &h, t, &[])).collect::<Result<Vec<_>>>()?;
            for ((&t, &error), &(bound, bound_kind)) in ts.iter().zip(&errors).zip(&bounds) {
                rows.push(Row { family: family_name(family), p, t, error, bound, bound_kind });
            }
            let mut fit = fit_json(&ts, &errors, tol, (p + 1) as f64);
            fit["family"] = json!(family_name(family));
            fit["p"] = json!(p);
            fits.push(fit);
        }
    }
    Ok(Report {
        csv_name: "order_scan.csv",
        csv: to_csv(&rows)?,
        summary: json!({ "rows": rows.len(), "fits": fits }),
        violations: 0,
    })
}
