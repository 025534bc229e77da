//! Per-subcommand config schemas. Every config embeds a model descriptor.

use serde::Deserialize;
use tdpf::hamiltonian::ingest::ModelDescriptor;
use tdpf::{Error, Family, Result};

/// Either an explicit list of times or a log-spaced grid.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum TimeGrid {
    List(Vec<f64>),
    Log { min: f64, max: f64, points: usize },
}

impl TimeGrid {
    pub fn values(&self) -> Result<Vec<f64>> {
        let ts = match *self {
            TimeGrid::List(ref v) => v.clone(),
            TimeGrid::Log { min, max, points } => {
                if points == 0 || !(min > 0.0 && max >= min) {
                    return Err(Error::Schema("times: need 0 < min ≤ max and points ≥ 1".into()));
                }
                if points == 1 {
                    vec![min]
                } else {
                    let ratio = max / min;
                    (0..points).map(|k| min * ratio.powf(k as f64 / (points - 1) as f64)).collect()
                }
            }
        };
        if ts.is_empty() || ts.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
            return Err(Error::Schema("times: need at least one finite positive time".into()));
        }
        Ok(ts)
    }
}

fn default_families() -> Vec<Family> {
    vec![Family::ExactSegment]
}

fn default_base_order() -> usize {
    2
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrderScanConfig {
    pub model: ModelDescriptor,
    pub orders: Vec<usize>,
    #[serde(default = "default_families")]
    pub families: Vec<Family>,
    pub times: TimeGrid,
    #[serde(default)]
    pub oracle_tol: Option<f64>,
}

/// Same shape as the order scan; bounds are evaluated at every grid point.
pub type BoundCheckConfig = OrderScanConfig;

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HuyghebaertConfig {
    pub model: ModelDescriptor,
    pub times: TimeGrid,
    #[serde(default)]
    pub oracle_tol: Option<f64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FloquetConfig {
    pub model: ModelDescriptor,
    pub t: f64,
    #[serde(rename = "L")]
    pub ls: Vec<usize>,
    /// Fourier modes kept per term.
    pub m_max: usize,
    #[serde(default)]
    pub oracle_tol: Option<f64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MpfScanConfig {
    pub model: ModelDescriptor,
    #[serde(rename = "J")]
    pub js: Vec<usize>,
    #[serde(default = "default_base_order")]
    pub base_order: usize,
    pub times: TimeGrid,
    #[serde(default)]
    pub oracle_tol: Option<f64>,
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum BoundSourceName {
    MeasuredAlpha,
    AnalyticScaling,
}

impl From<BoundSourceName> for tdpf::BoundSource {
    fn from(b: BoundSourceName) -> Self {
        match b {
            BoundSourceName::MeasuredAlpha => tdpf::BoundSource::MeasuredAlpha,
            BoundSourceName::AnalyticScaling => tdpf::BoundSource::AnalyticScaling,
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResourceConfig {
    /// One descriptor per system size of the sweep.
    pub models: Vec<ModelDescriptor>,
    pub t: f64,
    pub eps: Vec<f64>,
    pub p: usize,
    pub bound: BoundSourceName,
    /// Also estimate MPF queries for every (model, ε).
    #[serde(default)]
    pub mpf: bool,
    #[serde(default)]
    pub oracle_tol: Option<f64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NonunitaryConfig {
    pub model: ModelDescriptor,
    pub orders: Vec<usize>,
    pub times: TimeGrid,
    #[serde(default)]
    pub oracle_tol: Option<f64>,
}

/// Parses a config, turning serde failures into schema errors with line and column.
pub fn parse<T: serde::de::DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))
}
