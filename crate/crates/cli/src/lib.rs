//! Batch driver: one subcommand per experiment, JSON config in, CSV + summary + manifest out.

use std::path::{Path, PathBuf};

use tdpf::oracle::DEFAULT_TOL;
use tdpf::{Error, Result};

pub mod commands;
pub mod config;
pub mod output;

use config::parse;
use output::{Provenance, Report};

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const VIOLATION: i32 = 1;
    pub const SCHEMA: i32 = 2;
    pub const CONVERGENCE: i32 = 3;
    pub const OUT_OF_REGIME: i32 = 4;
}

pub const WORKERS_ENV: &str = "TDPF_WORKERS";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Experiment {
    OrderScan,
    BoundCheck,
    HuyghebaertCheck,
    FloquetCheck,
    MpfScan,
    ResourceTable,
    NonunitaryCheck,
}

impl Experiment {
    pub const ALL: [Experiment; 7] = [
        Experiment::OrderScan,
        Experiment::BoundCheck,
        Experiment::HuyghebaertCheck,
        Experiment::FloquetCheck,
        Experiment::MpfScan,
        Experiment::ResourceTable,
        Experiment::NonunitaryCheck,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::OrderScan => "order-scan",
            Experiment::BoundCheck => "bound-check",
            Experiment::HuyghebaertCheck => "huyghebaert-check",
            Experiment::FloquetCheck => "floquet-check",
            Experiment::MpfScan => "mpf-scan",
            Experiment::ResourceTable => "resource-table",
            Experiment::NonunitaryCheck => "nonunitary-check",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|e| e.name() == s)
    }
}

#[derive(Clone, Debug)]
pub struct Options {
    pub config: PathBuf,
    pub out: PathBuf,
    /// None uses rayon's default.
    pub workers: Option<usize>,
    /// Overrides the config's `oracle_tol`.
    pub oracle_tol: Option<f64>,
}

#[derive(Debug)]
pub struct Outcome {
    pub violations: usize,
    pub files: Vec<PathBuf>,
    pub summary: serde_json::Value,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.violations > 0 {
            exit::VIOLATION
        } else {
            exit::OK
        }
    }
}

pub fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::Convergence { .. } | Error::Window(_) => exit::CONVERGENCE,
        Error::OutOfRegime(_) => exit::OUT_OF_REGIME,
        _ => exit::SCHEMA,
    }
}

/// Runs one experiment and writes its result files under `opts.out`.
pub fn run(exp: Experiment, opts: &Options) -> Result<Outcome> {
    let bytes = std::fs::read(&opts.config)
        .map_err(|e| Error::Schema(format!("{}: {e}", opts.config.display())))?;
    let text = std::str::from_utf8(&bytes).map_err(|e| Error::Schema(format!("config is not UTF-8: {e}")))?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(w) = opts.workers {
        if w == 0 {
            return Err(Error::Schema("workers must be at least 1".into()));
        }
        pool = pool.num_threads(w);
    }
    let pool = pool.build().map_err(|e| Error::invalid(format!("worker pool: {e}")))?;
    let (report, tol) = pool.install(|| dispatch(exp, text, opts.oracle_tol))?;
    let prov = Provenance { subcommand: exp.name(), config_bytes: &bytes, oracle_tol: tol };
    let files = output::write(&opts.out, &report, &prov)?;
    Ok(Outcome { violations: report.violations, files, summary: report.summary })
}

fn dispatch(exp: Experiment, text: &str, tol_override: Option<f64>) -> Result<(Report, f64)> {
    let pick = |cfg_tol: Option<f64>| -> Result<f64> {
        let tol = tol_override.or(cfg_tol).unwrap_or(DEFAULT_TOL);
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(Error::Schema(format!("oracle_tol must be positive, got {tol}")));
        }
        Ok(tol)
    };
    match exp {
        Experiment::OrderScan => {
            let c: config::OrderScanConfig = parse(text)?;
            let tol = pick(c.oracle_tol)?;
            Ok((commands::order_scan::run(&c, tol)?, tol))
        }
        Experiment::BoundCheck => {
            let c: config::BoundCheckConfig = parse(text)?;
            let tol = pick(c.oracle_tol)?;
            Ok((commands::bound_check::run(&c, tol)?, tol))
        }
        Experiment::HuyghebaertCheck => {
            let c: config::HuyghebaertConfig = parse(text)?;
            let tol = pick(c.oracle_tol)?;
            Ok((commands::huyghebaert_check::run(&c, tol)?, tol))
        }
        Experiment::FloquetCheck => {
            let c: config::FloquetConfig = parse(text)?;
            let tol = pick(c.oracle_tol)?;
            Ok((commands::floquet_check::run(&c, tol)?, tol))
        }
        Experiment::MpfScan => {
            let c: config::MpfScanConfig = parse(text)?;
            let tol = pick(c.oracle_tol)?;
            Ok((commands::mpf_scan::run(&c, tol)?, tol))
        }
        Experiment::ResourceTable => {
            let c: config::ResourceConfig = parse(text)?;
            let tol = pick(c.oracle_tol)?;
            Ok((commands::resource_table::run(&c)?, tol))
        }
        Experiment::NonunitaryCheck => {
            let c: config::NonunitaryConfig = parse(text)?;
            let tol = pick(c.oracle_tol)?;
            Ok((commands::nonunitary_check::run(&c, tol)?, tol))
        }
    }
}

/// Output directory for `config` inside `root`, named after the config's file stem.
pub fn out_dir_for(root: &Path, config: &Path) -> PathBuf {
    root.join(config.file_stem().unwrap_or_default())
}
