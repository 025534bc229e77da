//! Trotter-step selection and gate/query counts.
//!
//! One exponential of a two-qubit or one-qubit term counts as one gate.

use serde::{Deserialize, Serialize};

use crate::bounds::{self, maximize, DEFAULT_GRID};
use crate::error::{Error, Result};
use crate::fit;
use crate::hamiltonian::{Hamiltonian, ModelClass};
use crate::mpf::{MpfPlan, MAX_J};
use crate::product_formula::{suzuki_plan, Family};

pub const MAX_STEPS: u64 = 1 << 40;

fn check_eps(eps: f64, t: f64) -> Result<()> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::invalid(format!("target error must be positive, got {eps}")));
    }
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::invalid(format!("time must be non-negative, got {t}")));
    }
    Ok(())
}

/// Smallest r ≥ 1 with r·c·(t/r)^{p+1} ≤ ε.
pub fn steps_for_power_law(c: f64, p: usize, t: f64, eps: f64) -> Result<u64> {
    check_eps(eps, t)?;
    if p == 0 || !(c >= 0.0) {
        return Err(Error::invalid("power law needs p ≥ 1 and c ≥ 0"));
    }
    let total = |r: u64| r as f64 * c * (t / r as f64).powi(p as i32 + 1);
    if total(1) <= eps {
        return Ok(1);
    }
    let guess = (c * t.powi(p as i32 + 1) / eps).powf(1.0 / p as f64).ceil();
    if !(guess < MAX_STEPS as f64) {
        return Err(Error::BudgetExceeded { requested: guess as usize, budget: MAX_STEPS as usize });
    }
    let mut r = (guess as u64).max(1);
    while r > 1 && total(r - 1) <= eps {
        r -= 1;
    }
    while total(r) > eps {
        r += 1;
    }
    Ok(r)
}

/// Smallest r ≥ 1 with r·bound(t/r) ≤ ε for a bound non-decreasing in its argument.
/// Out-of-regime evaluations count as failures.
pub fn choose_trotter_steps(bound: impl Fn(f64) -> Result<f64>, t: f64, eps: f64) -> Result<u64> {
    check_eps(eps, t)?;
    let ok = |r: u64| -> Result<bool> {
        match bound(t / r as f64) {
            Ok(b) => Ok(r as f64 * b <= eps),
            Err(Error::OutOfRegime(_)) => Ok(false),
            Err(e) => Err(e),
        }
    };
    if ok(1)? {
        return Ok(1);
    }
    let mut hi = 2;
    while !ok(hi)? {
        hi *= 2;
        if hi > MAX_STEPS {
            return Err(Error::BudgetExceeded { requested: hi as usize, budget: MAX_STEPS as usize });
        }
    }
    let mut lo = hi / 2;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if ok(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundSource {
    /// Corollary bound with α_com evaluated on the model.
    MeasuredAlpha,
    /// Σ_q Γ^q |||H|||₁^{p-q} ‖H‖₁ times a calibration constant.
    AnalyticScaling,
}

impl BoundSource {
    pub fn label(self) -> &'static str {
        match self {
            BoundSource::MeasuredAlpha => "measured-alpha",
            BoundSource::AnalyticScaling => "analytic-scaling",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PfResources {
    pub p: usize,
    pub r: u64,
    pub gates: u64,
    pub gates_per_step: u64,
    /// c in the per-step bound c·(t/r)^{p+1}
    pub prefactor: f64,
    pub bound_kind: String,
}

/// max_τ Σ_{q=0}^p Γ^q |||H(τ)|||₁^{p-q} ‖H(τ)‖₁ over [0, t].
pub fn analytic_alpha(h: &Hamiltonian, p: usize, t: f64) -> Result<f64> {
    let gamma = h.gamma() as f64;
    let f = |tau: f64| -> Result<f64> {
        let (one, induced) = h.induced_norms(tau)?;
        Ok((0..=p).map(|q| gamma.powi(q as i32) * induced.powi((p - q) as i32) * one).sum())
    };
    Ok(maximize(f, 0.0, t, DEFAULT_GRID)?.value)
}

/// Ratio of the measured max α_com^{p+1} to the analytic form, used to fix the analytic constant.
pub fn calibrate_analytic(h: &Hamiltonian, p: usize, t: f64) -> Result<f64> {
    let measured = measured_alpha(h, p, t)?;
    let analytic = analytic_alpha(h, p, t)?;
    if analytic == 0.0 {
        return Err(Error::invalid("analytic scaling vanishes; cannot calibrate"));
    }
    Ok(measured / analytic)
}

/// max over [0, t] of α_com^{p+1}, the input of the measured-α bound.
pub fn measured_alpha(h: &Hamiltonian, p: usize, t: f64) -> Result<f64> {
    Ok(maximize(|tau| bounds::alpha_com(h, p + 1, tau), 0.0, t, DEFAULT_GRID)?.value)
}

/// r and gate count for simulating [0, t] within ε with the p-th order exact-segment formula.
/// `calibration` is only used by the analytic source.
pub fn gate_count_pf(
    h: &Hamiltonian,
    t: f64,
    eps: f64,
    p: usize,
    source: BoundSource,
    calibration: f64,
) -> Result<PfResources> {
    let alpha = match source {
        BoundSource::MeasuredAlpha => measured_alpha(h, p, t)?,
        BoundSource::AnalyticScaling => calibration * analytic_alpha(h, p, t)?,
    };
    gate_count_with_alpha(h, t, eps, p, alpha, source)
}

/// As `gate_count_pf` with max_τ α_com^{p+1} (or its analytic stand-in) already known.
pub fn gate_count_with_alpha(
    h: &Hamiltonian,
    t: f64,
    eps: f64,
    p: usize,
    alpha: f64,
    source: BoundSource,
) -> Result<PfResources> {
    check_eps(eps, t)?;
    if h.meta.class == ModelClass::Custom {
        return Err(Error::invalid("gate counts need an nn-chain or long-range model"));
    }
    let plan = suzuki_plan(p, h.gamma(), Family::ExactSegment)?;
    let v = plan.layers() as f64;
    let prefactor = 3.0 * v.powi(p as i32 + 1) * alpha;
    let r = steps_for_power_law(prefactor, p, t, eps)?;
    let gates_per_step = (h.meta.gates_per_layer * plan.layers()) as u64;
    Ok(PfResources {
        p,
        r,
        gates: r.saturating_mul(gates_per_step),
        gates_per_step,
        prefactor,
        bound_kind: source.label().to_string(),
    })
}

/// Fitted exponent of log(value) against log(N).
pub fn n_exponent(ns: &[usize], values: &[f64]) -> f64 {
    let xs: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
    fit::fit_power_law(&xs, values).slope
}

/// Asymptotic gate count of the PF (or MPF) row for a model class in one dimension.
pub fn table_form(class: ModelClass, nu: Option<f64>, mpf: bool) -> Result<String> {
    let s = match (class, nu, mpf) {
        (ModelClass::NnChain, _, false) => "N t (N t/ε)^{1/p}".to_string(),
        (ModelClass::NnChain, _, true) => "Ñ^{1+1/(p+1)} t".to_string(),
        (ModelClass::LongRange, Some(nu), false) if nu < 1.0 => {
            format!("N^{{{}}} t (N^{{{}}} t/ε)^{{1/p}}", 3.0 - nu, 2.0 - nu)
        }
        (ModelClass::LongRange, Some(nu), true) if nu < 1.0 => format!("Ñ^{{{}+1/(p+1)}} t", 3.0 - nu),
        (ModelClass::LongRange, Some(_), false) => "Ñ^2 t (N t/ε)^{1/p}".to_string(),
        (ModelClass::LongRange, Some(_), true) => "Ñ^{2+1/(p+1)} t".to_string(),
        (ModelClass::LongRange, None, _) => return Err(Error::invalid("long-range model without ν")),
        (ModelClass::Custom, _, _) => return Err(Error::invalid("no asymptotic form for custom models")),
    };
    Ok(s)
}

#[derive(Clone, Debug, Serialize)]
pub struct MpfResources {
    #[serde(rename = "J")]
    pub j: usize,
    pub r: u64,
    pub queries: u64,
    pub ancillas: usize,
    pub c_norm: f64,
    pub k_norm: f64,
    /// sup of α_com over [0, t] used for every step
    pub alpha: f64,
}

fn j_for(alpha_t: f64, eps: f64) -> usize {
    let x = 0.5 * (alpha_t / eps).ln();
    if x.is_finite() && x > 1.0 {
        x.ceil() as usize
    } else {
        1
    }
}

/// Depth of the exact nested-commutator sum inside the MPF α bound; deeper levels use norms.
pub const MPF_EXACT_DEPTH: usize = 4;

/// sup over τ ∈ [0, t] of an upper bound on (α_com^q)^{1/q}.
pub fn mpf_alpha_bound(h: &Hamiltonian, t: f64, q: usize) -> Result<f64> {
    let m = maximize(|tau| bounds::alpha_com_upper(h, q, tau, MPF_EXACT_DEPTH), 0.0, t, DEFAULT_GRID)?;
    Ok(m.value.powf(1.0 / q as f64))
}

/// J = ⌈½ ln(α_com t/ε)⌉ with α_com taken at that J, then the smallest r with
/// r·√2e²‖c‖₁(√2 α t/r)^{2J+1} ≤ ε and α t/r < 1/2.
pub fn mpf_resources(h: &Hamiltonian, t: f64, eps: f64) -> Result<MpfResources> {
    check_eps(eps, t)?;
    // running sup over q = 3, 5, .., 2J+1
    let mut alpha = 0.0f64;
    let mut covered = 0;
    let mut extend = |j: usize, alpha: &mut f64| -> Result<()> {
        for m in covered + 1..=j {
            *alpha = alpha.max(mpf_alpha_bound(h, t, 2 * m + 1)?);
        }
        covered = covered.max(j);
        Ok(())
    };
    let mut j = 1;
    extend(j, &mut alpha)?;
    for _ in 0..MAX_J {
        let next = j_for(alpha * t, eps).max(j);
        if next > MAX_J {
            return Err(Error::OutOfRegime(format!("target needs J = {next} > {MAX_J}")));
        }
        if next == j {
            break;
        }
        j = next;
        extend(j, &mut alpha)?;
    }
    let plan = MpfPlan::sequential(j, 2)?;
    let step = |tau: f64| -> Result<f64> {
        if alpha * tau >= 0.5 {
            return Err(Error::OutOfRegime("α_com·t ≥ 1/2".into()));
        }
        Ok(bounds::mpf_bound_value(alpha * tau, j, plan.c_norm))
    };
    let r = choose_trotter_steps(step, t, eps)?;
    let queries = (r as f64 * plan.c_norm * plan.k_norm).ceil() as u64;
    let ancillas = (j as f64).log2().ceil() as usize;
    Ok(MpfResources { j, r, queries, ancillas, c_norm: plan.c_norm, k_norm: plan.k_norm, alpha })
}

/// One line of the resource table. PF rows leave the MPF columns empty and vice versa.
#[derive(Clone, Debug, Serialize)]
pub struct ResourceRow {
    pub model: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub t: f64,
    pub eps: f64,
    pub p: usize,
    pub r: u64,
    pub gates: Option<u64>,
    #[serde(rename = "J")]
    pub j: Option<usize>,
    pub queries: Option<u64>,
    pub ancillas: Option<usize>,
    pub bound_kind: String,
}

pub fn model_label(h: &Hamiltonian) -> String {
    match (h.meta.class, h.meta.nu) {
        (ModelClass::NnChain, _) => "nn-chain".into(),
        (ModelClass::LongRange, Some(nu)) => format!("long-range(nu={nu})"),
        (ModelClass::LongRange, None) => "long-range".into(),
        (ModelClass::Custom, _) => "custom".into(),
    }
}

impl ResourceRow {
    pub fn pf(h: &Hamiltonian, t: f64, eps: f64, res: &PfResources) -> Self {
        ResourceRow {
            model: model_label(h),
            n: h.n_qubits().unwrap_or(0),
            t,
            eps,
            p: res.p,
            r: res.r,
            gates: Some(res.gates),
            j: None,
            queries: None,
            ancillas: None,
            bound_kind: res.bound_kind.clone(),
        }
    }

    pub fn mpf(h: &Hamiltonian, t: f64, eps: f64, res: &MpfResources) -> Self {
        ResourceRow {
            model: model_label(h),
            n: h.n_qubits().unwrap_or(0),
            t,
            eps,
            p: 2 * res.j,
            r: res.r,
            gates: None,
            j: Some(res.j),
            queries: Some(res.queries),
            ancillas: Some(res.ancillas),
            bound_kind: "mpf".into(),
        }
    }
}
