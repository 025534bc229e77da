use rayon::prelude::*;
use serde_json::json;
use tdpf::resources::{
    analytic_alpha, calibrate_analytic, gate_count_with_alpha, measured_alpha, mpf_resources, n_exponent, table_form,
};
use tdpf::{BoundSource, Error, Hamiltonian, ResourceRow, Result};

use crate::config::ResourceConfig;
use crate::output::{to_csv, Report};

/// PF (and optionally MPF) resource counts over a size sweep, with fitted N-exponents.
pub fn run(cfg: &ResourceConfig) -> Result<Report> {
    if cfg.models.is_empty() || cfg.eps.is_empty() {
        return Err(Error::Schema("models and eps must be non-empty".into()));
    }
    let hs = cfg.models.iter().map(|m| m.build()).collect::<Result<Vec<Hamiltonian>>>()?;
    let class = hs[0].meta.class;
    if hs.iter().any(|h| h.meta.class != class) {
        return Err(Error::Schema("models: every entry must share one model class".into()));
    }
    let ns: Vec<usize> = hs
        .iter()
        .map(|h| h.n_qubits().ok_or_else(|| Error::Schema("models: qubit count required".into())))
        .collect::<Result<_>>()?;
    let source: BoundSource = cfg.bound.into();
    let calibration = match source {
        BoundSource::MeasuredAlpha => 1.0,
        BoundSource::AnalyticScaling => calibrate_analytic(&hs[0], cfg.p, cfg.t)?,
    };
    let alphas = hs
        .par_iter()
        .map(|h| match source {
            BoundSource::MeasuredAlpha => measured_alpha(h, cfg.p, cfg.t),
            BoundSource::AnalyticScaling => Ok(calibration * analytic_alpha(h, cfg.p, cfg.t)?),
        })
        .collect::<Result<Vec<f64>>>()?;
    let mut rows = Vec::new();
    let mut exponents = Vec::new();
    for &eps in &cfg.eps {
        let mut gates = Vec::new();
        for (h, &alpha) in hs.iter().zip(&alphas) {
            let res = gate_count_with_alpha(h, cfg.t, eps, cfg.p, alpha, source)?;
            gates.push(res.gates as f64);
            rows.push(ResourceRow::pf(h, cfg.t, eps, &res));
        }
        exponents.push(json!({ "eps": eps, "gates": n_exponent(&ns, &gates) }));
    }
    if cfg.mpf {
        let cells: Vec<(usize, f64)> = (0..hs.len()).flat_map(|i| cfg.eps.iter().map(move |&e| (i, e))).collect();
        let mpf = cells
            .par_iter()
            .map(|&(i, eps)| Ok(ResourceRow::mpf(&hs[i], cfg.t, eps, &mpf_resources(&hs[i], cfg.t, eps)?)))
            .collect::<Result<Vec<_>>>()?;
        rows.extend(mpf);
    }
    Ok(Report {
        csv_name: "resource_table.csv",
        csv: to_csv(&rows)?,
        summary: json!({
            "N": ns,
            "p": cfg.p,
            "t": cfg.t,
            "bound_kind": source.label(),
            "calibration": calibration,
            "alpha": alphas,
            "alpha_exponent": n_exponent(&ns, &alphas),
            "gate_exponents": exponents,
            "table_form": table_form(class, hs[0].meta.nu, false)?,
            "mpf_table_form": if cfg.mpf { Some(table_form(class, hs[0].meta.nu, true)?) } else { None },
        }),
        violations: 0,
    })
}
