use serde_json::json;
use tdpf::floquet::{floquet_sweep, natural_omega, FloquetRow};
use tdpf::{Error, Result};

use crate::config::FloquetConfig;
use crate::output::{to_csv, Report};

/// Deviations below this are roundoff; steps between two such values do not count against monotonicity.
pub const NOISE_FLOOR: f64 = 1e-12;

type Column = (&'static str, fn(&FloquetRow) -> f64);

const COLUMNS: [Column; 6] = [
    ("evolution_dev", |r| r.evolution_dev),
    ("pf_dev", |r| r.pf_dev),
    ("suzuki_dev", |r| r.suzuki_dev),
    ("error_identity_dev", |r| r.error_identity_dev),
    ("symmetry_dev", |r| r.symmetry_dev),
    ("instantaneous_dev", |r| r.instantaneous_dev),
];

/// Reconstruction deviations of the lifted operators over a sweep of ancilla truncations.
pub fn run(cfg: &FloquetConfig, tol: f64) -> Result<Report> {
    if cfg.ls.is_empty() || cfg.ls.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Schema("L: need a non-empty increasing list".into()));
    }
    let h = cfg.model.build()?;
    let omega = natural_omega(&h)?;
    let rows = floquet_sweep(&h, &cfg.ls, cfg.t, cfg.m_max, tol)?;
    let mut columns = serde_json::Map::new();
    for (name, get) in COLUMNS {
        let vals: Vec<f64> = rows.iter().map(get).collect();
        columns.insert(
            name.into(),
            json!({
                "final": vals.last(),
                "strictly_decreasing": vals.windows(2).all(|w| w[1] < w[0]),
                "decreasing_to_floor": vals.windows(2).all(|w| w[1] < w[0] || w.iter().all(|&v| v <= NOISE_FLOOR)),
            }),
        );
    }
    let last = rows.last().expect("non-empty sweep");
    Ok(Report {
        csv_name: "floquet_check.csv",
        csv: to_csv(&rows)?,
        summary: json!({
            "omega": omega,
            "t": cfg.t,
            "m_max": cfg.m_max,
            "L": cfg.ls,
            "final_L_keep": last.l_keep,
            "final_worst": last.worst(),
            "noise_floor": NOISE_FLOOR,
            "columns": columns,
        }),
        violations: 0,
    })
}
