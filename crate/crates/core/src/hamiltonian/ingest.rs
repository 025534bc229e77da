//! JSON model descriptors.

use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Pauli, C64};
use crate::pauli::PauliSum;
use crate::time_functions::{CurveShape, ScalarCurve};

use super::{
    build_long_range, build_nn_chain, Channel, Field, Hamiltonian, LongRangeSpec, ModelClass, ModelMeta, Operator,
    OperatorCurve,
};

pub const DEFAULT_BUDGET: usize = 6;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDescriptor {
    pub model: ModelClass,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu: Option<f64>,
    #[serde(default = "default_budget")]
    pub derivative_budget: usize,
    /// Complex prefactor [re, im] applied to every term.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bond: Option<Vec<(Pauli, Pauli, f64)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub couplings: Option<Vec<CurveShape>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coupling: Option<CurveShape>,
    #[serde(default)]
    pub periodic: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<FieldEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub channels: Vec<ChannelEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub fields: Vec<FieldEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub terms: Vec<TermEntry>,
}

fn default_budget() -> usize {
    DEFAULT_BUDGET
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldEntry {
    pub pauli: Pauli,
    pub curve: CurveShape,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelEntry {
    pub sigma: (Pauli, Pauli),
    pub curve: CurveShape,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SummandEntry {
    pub paulis: Vec<(usize, Pauli)>,
    #[serde(default = "unit")]
    pub coeff: f64,
    pub curve: CurveShape,
}

fn unit() -> f64 {
    1.0
}

/// One term H_γ. Either a single string (`paulis` + `curve`) or a list of `summands`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermEntry {
    pub gamma: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub paulis: Option<Vec<(usize, Pauli)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coeff: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub curve: Option<CurveShape>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub summands: Vec<SummandEntry>,
}

fn schema(field: &str, msg: impl std::fmt::Display) -> Error {
    Error::Schema(format!("{field}: {msg}"))
}

fn curve(field: &str, shape: &CurveShape, budget: usize) -> Result<ScalarCurve> {
    ScalarCurve::new(shape.clone(), budget).map_err(|e| schema(field, e))
}

pub fn ingest_model(path: &Path) -> Result<Hamiltonian> {
    let text = std::fs::read_to_string(path)?;
    model_from_str(&text).map_err(|e| match e {
        Error::Schema(m) => Error::Schema(format!("{}: {m}", path.display())),
        other => other,
    })
}

pub fn model_from_str(text: &str) -> Result<Hamiltonian> {
    let d: ModelDescriptor = serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
    d.build()
}

pub fn model_from_value(v: &serde_json::Value) -> Result<Hamiltonian> {
    let d = ModelDescriptor::deserialize(v).map_err(|e| Error::Schema(e.to_string()))?;
    d.build()
}

impl ModelDescriptor {
    pub fn build(&self) -> Result<Hamiltonian> {
        let b = self.derivative_budget;
        let h = match self.model {
            ModelClass::NnChain => self.build_chain(b)?,
            ModelClass::LongRange => self.build_long_range(b)?,
            ModelClass::Custom => self.build_custom(b)?,
        };
        Ok(match self.scale {
            Some([re, im]) => h.scaled(C64::new(re, im)),
            None => h,
        })
    }

    fn forbid(&self, class: &str, present: &[(&str, bool)]) -> Result<()> {
        for (name, set) in present {
            if *set {
                return Err(schema(name, format!("not allowed for model \"{class}\"")));
            }
        }
        Ok(())
    }

    fn build_chain(&self, b: usize) -> Result<Hamiltonian> {
        self.forbid("nn-chain", &[("channels", !self.channels.is_empty()), ("terms", !self.terms.is_empty())])?;
        let n = self.n;
        let n_bonds = if self.periodic && n > 2 { n } else { n.saturating_sub(1) };
        let couplings = match (&self.couplings, &self.coupling) {
            (Some(_), Some(_)) => return Err(schema("coupling", "give either \"coupling\" or \"couplings\"")),
            (Some(list), None) => list
                .iter()
                .enumerate()
                .map(|(i, s)| curve(&format!("couplings[{i}]"), s, b))
                .collect::<Result<Vec<_>>>()?,
            (None, Some(s)) => vec![curve("coupling", s, b)?; n_bonds],
            (None, None) => vec![ScalarCurve::constant(1.0, b); n_bonds],
        };
        if couplings.len() != n_bonds {
            return Err(schema("couplings", format!("expected {n_bonds} entries, got {}", couplings.len())));
        }
        let bond = self.bond.clone().unwrap_or_else(|| vec![(Pauli::X, Pauli::X, 1.0)]);
        let field = match &self.field {
            Some(f) => Some(Field { pauli: f.pauli, curve: curve("field.curve", &f.curve, b)? }),
            None => None,
        };
        build_nn_chain(n, &bond, &couplings, self.periodic, field.as_ref(), b)
    }

    fn build_long_range(&self, b: usize) -> Result<Hamiltonian> {
        self.forbid("long-range", &[("terms", !self.terms.is_empty()), ("bond", self.bond.is_some())])?;
        let nu = self.nu.ok_or_else(|| schema("nu", "required for long-range models"))?;
        let channels = self
            .channels
            .iter()
            .enumerate()
            .map(|(i, c)| Ok(Channel { sigma: c.sigma, curve: curve(&format!("channels[{i}].curve"), &c.curve, b)? }))
            .collect::<Result<_>>()?;
        let fields = self
            .fields
            .iter()
            .enumerate()
            .map(|(i, f)| Ok(Field { pauli: f.pauli, curve: curve(&format!("fields[{i}].curve"), &f.curve, b)? }))
            .collect::<Result<_>>()?;
        build_long_range(&LongRangeSpec { n: self.n, nu, channels, fields }, b)
    }

    fn build_custom(&self, b: usize) -> Result<Hamiltonian> {
        let n = self.n;
        if n == 0 || n > super::MAX_QUBITS {
            return Err(schema("N", format!("must be in 1..={}", super::MAX_QUBITS)));
        }
        if self.terms.is_empty() {
            return Err(schema("terms", "at least one term is required"));
        }
        let mut labels = BTreeSet::new();
        for (i, t) in self.terms.iter().enumerate() {
            if !labels.insert(t.gamma) {
                return Err(schema(&format!("terms[{i}].gamma"), format!("duplicate label {}", t.gamma)));
            }
        }
        let gamma = self.terms.len();
        if labels.iter().copied().ne(1..=gamma) {
            return Err(schema("terms", format!("gamma labels must be exactly 1..={gamma}")));
        }
        let mut entries: Vec<&TermEntry> = self.terms.iter().collect();
        entries.sort_by_key(|t| t.gamma);
        let mut terms = Vec::with_capacity(gamma);
        let mut gates = 0;
        for t in entries {
            let field = format!("terms[gamma={}]", t.gamma);
            let mut items: Vec<SummandEntry> = t.summands.clone();
            match (&t.paulis, &t.curve) {
                (Some(p), Some(c)) => {
                    items.push(SummandEntry { paulis: p.clone(), coeff: t.coeff.unwrap_or(1.0), curve: c.clone() })
                }
                (None, None) if !items.is_empty() => {}
                _ => return Err(schema(&field, "needs \"paulis\" and \"curve\", or \"summands\"")),
            }
            let mut term = OperatorCurve::new(1 << n, b);
            for (k, s) in items.iter().enumerate() {
                let op = PauliSum::from_string(&s.paulis, n, C64::new(s.coeff, 0.0))
                    .map_err(|e| schema(&format!("{field}.paulis[{k}]"), e))?;
                term.push(Operator::Pauli(op), curve(&format!("{field}.curve"), &s.curve, b)?)?;
                gates += 1;
            }
            terms.push(term);
        }
        let mut meta = ModelMeta::custom(gates);
        meta.n_qubits = Some(n);
        Hamiltonian::new(terms, meta)
    }
}
