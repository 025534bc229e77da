//! Commutator-scaling error bounds.
//!
//! All nested sums are evaluated on derivative jets: a jet at τ holds F, F', ..., F^{(m)}.
//! An operator ad_{H_γ} + c·d/dτ maps a jet of length m+1 to one of length m by the Leibniz rule.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hamiltonian::{Hamiltonian, OperatorCurve};
use crate::linalg::{self, OperatorMatrix, C64, ZERO};
use crate::pauli::PauliSum;
use crate::product_formula::{Family, StagePlan};
use crate::quad;

/// Above this dimension Pauli-representable models use the sparse algebra.
const DENSE_LIMIT: usize = 64;

pub(crate) trait Element: Clone + Send + Sync {
    fn is_zero(&self) -> bool;
    fn axpy(&mut self, c: C64, x: &Self);
    fn comm(a: &Self, b: &Self) -> Self;
    fn opnorm(&self) -> f64;
    fn zero_like(&self) -> Self;
}

impl Element for OperatorMatrix {
    fn is_zero(&self) -> bool {
        self.iter().all(|z| *z == ZERO)
    }
    fn axpy(&mut self, c: C64, x: &Self) {
        self.zip_apply(x, |a, b| *a += b * c);
    }
    fn comm(a: &Self, b: &Self) -> Self {
        linalg::comm(a, b)
    }
    fn opnorm(&self) -> f64 {
        linalg::norm(self)
    }
    fn zero_like(&self) -> Self {
        linalg::zeros(self.nrows())
    }
}

impl Element for PauliSum {
    fn is_zero(&self) -> bool {
        self.is_empty()
    }
    fn axpy(&mut self, c: C64, x: &Self) {
        self.add_scaled(x, c);
    }
    fn comm(a: &Self, b: &Self) -> Self {
        a.commutator(b)
    }
    fn opnorm(&self) -> f64 {
        self.norm()
    }
    fn zero_like(&self) -> Self {
        PauliSum::zero(self.n_qubits())
    }
}

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Jet of ad_A F = [A, F] by Leibniz; length is the shorter of the two.
fn jet_ad<E: Element>(a: &[E], f: &[E]) -> Vec<E> {
    let m = a.len().min(f.len());
    (0..m)
        .map(|s| {
            let mut g = f[0].zero_like();
            for r in 0..=s {
                if a[r].is_zero() || f[s - r].is_zero() {
                    continue;
                }
                g.axpy(C64::new(binom(s, r), 0.0), &E::comm(&a[r], &f[s - r]));
            }
            g
        })
        .collect()
}

/// ad_{H_γ} + dt·d/dτ, weighted.
#[derive(Clone, Copy, Debug)]
struct JetOp {
    gamma: Option<usize>,
    dt: C64,
    weight: f64,
}

fn apply<E: Element>(op: &JetOp, f: &[E], terms: &[Vec<E>]) -> Vec<E> {
    let m = f.len() - 1;
    let mut g: Vec<E> = match op.gamma {
        Some(gm) => {
            let mut v = jet_ad(&terms[gm], &f[..m]);
            v.truncate(m);
            v
        }
        None => (0..m).map(|_| f[0].zero_like()).collect(),
    };
    if op.dt != ZERO {
        for s in 0..m {
            if !f[s + 1].is_zero() {
                g[s].axpy(op.dt, &f[s + 1]);
            }
        }
    }
    g
}

fn walk<E: Element>(f: Vec<E>, depth: usize, ops: &[JetOp], terms: &[Vec<E>], weight: f64) -> f64 {
    if f.iter().all(|x| x.is_zero()) || weight == 0.0 {
        return 0.0;
    }
    if depth == 0 {
        return weight * f[0].opnorm();
    }
    ops.iter()
        .map(|op| walk(apply(op, &f, terms), depth - 1, ops, terms, weight * op.weight))
        .sum()
}

/// Σ_starts w_s Σ_{op sequences of length depth} Π weights · ‖ops H_s‖.
fn nested_sum<E: Element>(terms: &[Vec<E>], starts: &[(usize, f64)], ops: &[JetOp], depth: usize) -> f64 {
    let tasks: Vec<(usize, f64, Option<usize>)> = starts
        .iter()
        .flat_map(|&(g, w)| {
            if depth == 0 {
                vec![(g, w, None)]
            } else {
                (0..ops.len()).map(move |o| (g, w, Some(o))).collect()
            }
        })
        .collect();
    let parts: Vec<f64> = tasks
        .par_iter()
        .map(|&(g, w, first)| {
            let f: Vec<E> = terms[g][..=depth].to_vec();
            match first {
                None => walk(f, 0, ops, terms, w),
                Some(o) => {
                    let op = &ops[o];
                    walk(apply(op, &f, terms), depth - 1, ops, terms, w * op.weight)
                }
            }
        })
        .collect();
    parts.iter().sum()
}

/// Upper bound on Σ over op sequences of length `depth` of ‖ops F‖ from the norms of F's jet,
/// with ‖[A, B]‖ ≤ 2‖A‖‖B‖ applied entrywise to the Leibniz expansion.
fn norm_tail(mut n: Vec<f64>, depth: usize, ops: &[JetOp], term_norms: &[Vec<f64>]) -> f64 {
    for _ in 0..depth {
        let m = n.len() - 1;
        let mut next = vec![0.0; m];
        for op in ops {
            for (s, out) in next.iter_mut().enumerate() {
                let mut v = 0.0;
                if let Some(g) = op.gamma {
                    for r in 0..=s {
                        v += binom(s, r) * 2.0 * term_norms[g][r] * n[s - r];
                    }
                }
                v += op.dt.norm() * n[s + 1];
                *out += op.weight * v;
            }
        }
        n = next;
    }
    n[0]
}

fn walk_hybrid<E: Element>(
    f: Vec<E>,
    depth: usize,
    exact_left: usize,
    ops: &[JetOp],
    terms: &[Vec<E>],
    term_norms: &[Vec<f64>],
    weight: f64,
) -> f64 {
    if f.iter().all(|x| x.is_zero()) || weight == 0.0 {
        return 0.0;
    }
    if depth == 0 || exact_left == 0 {
        let n = f.iter().map(|x| x.opnorm()).collect();
        return weight * norm_tail(n, depth, ops, term_norms);
    }
    ops.iter()
        .map(|op| walk_hybrid(apply(op, &f, terms), depth - 1, exact_left - 1, ops, terms, term_norms, weight * op.weight))
        .sum()
}

fn hybrid_sum<E: Element>(terms: &[Vec<E>], starts: &[(usize, f64)], ops: &[JetOp], depth: usize, exact: usize) -> f64 {
    let term_norms: Vec<Vec<f64>> = terms.iter().map(|j| j.iter().map(|x| x.opnorm()).collect()).collect();
    let parts: Vec<f64> = starts
        .par_iter()
        .map(|&(g, w)| walk_hybrid(terms[g][..=depth].to_vec(), depth, exact, ops, terms, &term_norms, w))
        .collect();
    parts.iter().sum()
}

fn dense_jets(h: &Hamiltonian, tau: f64, depth: usize) -> Vec<Vec<OperatorMatrix>> {
    h.terms().iter().map(|t| (0..=depth).map(|q| t.eval_unchecked(tau, q)).collect()).collect()
}

fn pauli_jets(h: &Hamiltonian, tau: f64, depth: usize) -> Option<Vec<Vec<PauliSum>>> {
    let n = h.n_qubits()?;
    h.terms().iter().map(|t| (0..=depth).map(|q| t.eval_pauli(tau, q, n)).collect()).collect()
}

fn check_budget(h: &Hamiltonian, depth: usize) -> Result<()> {
    if depth > h.budget() {
        Err(Error::BudgetExceeded { requested: depth, budget: h.budget() })
    } else {
        Ok(())
    }
}

fn evaluate(h: &Hamiltonian, tau: f64, starts: &[(usize, f64)], ops: &[JetOp], depth: usize) -> Result<f64> {
    check_budget(h, depth)?;
    if h.dim() > DENSE_LIMIT && h.is_pauli() {
        if let Some(jets) = pauli_jets(h, tau, depth) {
            return Ok(nested_sum(&jets, starts, ops, depth));
        }
    }
    Ok(nested_sum(&dense_jets(h, tau, depth), starts, ops, depth))
}

fn com_ops(gamma: usize, dt: f64) -> Vec<JetOp> {
    let mut ops: Vec<JetOp> = (0..gamma).map(|g| JetOp { gamma: Some(g), dt: ZERO, weight: 1.0 }).collect();
    ops.push(JetOp { gamma: None, dt: C64::new(dt, 0.0), weight: 1.0 });
    ops
}

/// α_com^{order}(τ): sum over (γ_1..γ_{order-1}) ∈ {1..Γ+1} and γ_order ∈ {1..Γ} of
/// ‖D_{γ_1}···D_{γ_{order-1}} H_{γ_order}(τ)‖ with D_{Γ+1} = 2Γ d/dτ.
pub fn alpha_com(h: &Hamiltonian, order: usize, tau: f64) -> Result<f64> {
    commutator_factor(h, order, tau, 2.0 * h.gamma() as f64)
}

/// Same with D_{Γ+1} = d/dτ.
pub fn bar_alpha_com(h: &Hamiltonian, order: usize, tau: f64) -> Result<f64> {
    commutator_factor(h, order, tau, 1.0)
}

fn commutator_factor(h: &Hamiltonian, order: usize, tau: f64, dt: f64) -> Result<f64> {
    if order == 0 {
        return Err(Error::invalid("commutator order must be at least 1"));
    }
    let starts: Vec<(usize, f64)> = (0..h.gamma()).map(|g| (g, 1.0)).collect();
    evaluate(h, tau, &starts, &com_ops(h.gamma(), dt), order - 1)
}

/// Upper bound on α_com^{order}(τ): exact nested sum for the first `exact_depth` operators, then
/// the norm recursion. Equals `alpha_com` when exact_depth ≥ order - 1.
pub fn alpha_com_upper(h: &Hamiltonian, order: usize, tau: f64, exact_depth: usize) -> Result<f64> {
    if order == 0 {
        return Err(Error::invalid("commutator order must be at least 1"));
    }
    let depth = order - 1;
    if exact_depth >= depth {
        return alpha_com(h, order, tau);
    }
    check_budget(h, depth)?;
    let starts: Vec<(usize, f64)> = (0..h.gamma()).map(|g| (g, 1.0)).collect();
    let ops = com_ops(h.gamma(), 2.0 * h.gamma() as f64);
    if h.dim() > DENSE_LIMIT && h.is_pauli() {
        if let Some(jets) = pauli_jets(h, tau, depth) {
            return Ok(hybrid_sum(&jets, &starts, &ops, depth, exact_depth));
        }
    }
    Ok(hybrid_sum(&dense_jets(h, tau, depth), &starts, &ops, depth, exact_depth))
}

/// Nested commutators ad_{H_{γ_1}}···ad_{H_{γ_p}} H_{γ_{p+1}} of the frozen terms, enumerated
/// sequence by sequence with no jets involved. Reference for the static reduction.
pub fn static_nested_sum(h: &Hamiltonian, order: usize, tau: f64) -> Result<f64> {
    let mats: Vec<OperatorMatrix> = h.terms().iter().map(|t| t.eval_unchecked(tau, 0)).collect();
    let g = mats.len();
    let mut total = 0.0;
    let count = g.pow(order as u32);
    for idx in 0..count {
        let mut digits = idx;
        let mut m = mats[digits % g].clone();
        digits /= g;
        for _ in 1..order {
            m = linalg::comm(&mats[digits % g], &m);
            digits /= g;
        }
        total += linalg::norm(&m);
    }
    Ok(total)
}

/// Value-carrying jet of an operator curve at a fixed τ.
#[derive(Clone, Debug)]
pub struct GradedOperatorCurve {
    tau: f64,
    derivs: Vec<OperatorMatrix>,
}

impl GradedOperatorCurve {
    pub fn at(curve: &OperatorCurve, tau: f64, budget: usize) -> Result<Self> {
        curve.check_budget(budget)?;
        Ok(GradedOperatorCurve { tau, derivs: (0..=budget).map(|q| curve.eval_unchecked(tau, q)).collect() })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn budget(&self) -> usize {
        self.derivs.len() - 1
    }

    pub fn value(&self, q: usize) -> Result<&OperatorMatrix> {
        self.derivs.get(q).ok_or(Error::BudgetExceeded { requested: q, budget: self.budget() })
    }

    /// [A, self], keeping the smaller budget.
    pub fn apply_ad(&self, a: &GradedOperatorCurve) -> Result<Self> {
        if a.derivs[0].nrows() != self.derivs[0].nrows() {
            return Err(Error::DimensionMismatch(a.derivs[0].nrows(), self.derivs[0].nrows()));
        }
        Ok(GradedOperatorCurve { tau: self.tau, derivs: jet_ad(&a.derivs, &self.derivs) })
    }

    /// c · d/dτ self; uses up one derivative order.
    pub fn apply_dt(&self, c: C64) -> Result<Self> {
        if self.derivs.len() < 2 {
            return Err(Error::BudgetExceeded { requested: 1, budget: 0 });
        }
        Ok(GradedOperatorCurve { tau: self.tau, derivs: self.derivs[1..].iter().map(|m| m * c).collect() })
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct GridMax {
    pub value: f64,
    pub argmax: f64,
    pub grid_size: usize,
}

pub const DEFAULT_GRID: usize = 65;

/// Max of f on [a, b]: uniform grid, then golden-section refinement around the best grid point.
/// A lower bound on the true supremum.
pub fn maximize(f: impl Fn(f64) -> Result<f64> + Sync, a: f64, b: f64, grid: usize) -> Result<GridMax> {
    let grid = grid.max(2);
    let xs: Vec<f64> = (0..grid).map(|i| a + (b - a) * i as f64 / (grid - 1) as f64).collect();
    let vals = xs.par_iter().map(|&x| f(x)).collect::<Result<Vec<f64>>>()?;
    let (mut best, mut arg) = (vals[0], xs[0]);
    let mut ib = 0;
    for (i, (&x, &v)) in xs.iter().zip(&vals).enumerate() {
        if v > best {
            best = v;
            arg = x;
            ib = i;
        }
    }
    if b > a {
        let (mut lo, mut hi) = (xs[ib.saturating_sub(1)], xs[(ib + 1).min(grid - 1)]);
        let r = 0.5 * (5f64.sqrt() - 1.0);
        let mut x1 = hi - r * (hi - lo);
        let mut x2 = lo + r * (hi - lo);
        let (mut f1, mut f2) = (f(x1)?, f(x2)?);
        for _ in 0..40 {
            if f1 >= f2 {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - r * (hi - lo);
                f1 = f(x1)?;
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + r * (hi - lo);
                f2 = f(x2)?;
            }
            if hi - lo <= 1e-12 * (b - a) {
                break;
            }
        }
        for (x, v) in [(x1, f1), (x2, f2)] {
            if v > best {
                best = v;
                arg = x;
            }
        }
    }
    Ok(GridMax { value: best, argmax: arg, grid_size: grid })
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    pub bound_kind: String,
    pub p: usize,
    pub t: f64,
    pub value: f64,
    pub tau_argmax: f64,
    pub term_count: u64,
    pub grid_size: usize,
}

fn report(kind: &str, p: usize, t: f64, value: f64, m: &GridMax, term_count: u64) -> BoundReport {
    BoundReport {
        bound_kind: kind.into(),
        p,
        t,
        value,
        tau_argmax: m.argmax,
        term_count,
        grid_size: m.grid_size,
    }
}

fn com_term_count(gamma: usize, p: usize) -> u64 {
    (gamma as u64 + 1).pow(p as u32) * gamma as u64
}

/// 3 V^{p+1} max_τ α_com^{p+1}(τ) t^{p+1}. Extra points (e.g. another bound's argmax) join the max.
pub fn corollary_bound(plan: &StagePlan, h: &Hamiltonian, t: f64, extra: &[f64]) -> Result<BoundReport> {
    let p = plan.order;
    let m = max_with(|tau| alpha_com(h, p + 1, tau), t, extra)?;
    let v = plan.layers() as f64;
    let value = 3.0 * v.powi(p as i32 + 1) * m.value * t.powi(p as i32 + 1);
    Ok(report("corollary", p, t, value, &m, com_term_count(h.gamma(), p)))
}

/// 2 V^{p+1} max_τ ᾱ_com^{p+1}(τ) t^{p+1} for the instantaneous family.
pub fn instantaneous_bound(plan: &StagePlan, h: &Hamiltonian, t: f64) -> Result<BoundReport> {
    if plan.family != Family::Instantaneous {
        return Err(Error::invalid("plan is not in the instantaneous family"));
    }
    let p = plan.order;
    let m = max_with(|tau| bar_alpha_com(h, p + 1, tau), t, &[])?;
    let v = plan.layers() as f64;
    let value = 2.0 * v.powi(p as i32 + 1) * m.value * t.powi(p as i32 + 1);
    Ok(report("instantaneous", p, t, value, &m, com_term_count(h.gamma(), p)))
}

fn max_with(f: impl Fn(f64) -> Result<f64> + Sync, t: f64, extra: &[f64]) -> Result<GridMax> {
    let mut m = maximize(&f, 0.0, t, DEFAULT_GRID)?;
    for &x in extra {
        let v = f(x)?;
        if v > m.value {
            m.value = v;
            m.argmax = x;
        }
    }
    Ok(m)
}

pub const TIGHT_ORDER_CAP: usize = 2;

/// 3 t^{p+1} max_τ Σ_k Σ_{k'_1..k'_p} ‖Π |α̃_{k'}| D_{k'}(τ) H_{γ_k}(τ)‖.
///
/// D_{k'} for odd k' = 2k-1 is ad_{H_{γ_k}} + i d/dτ with weight |α_k|; for even k' = 2k it is
/// i d/dτ with weight |β_{k+1} - β_k - α_k|. Summands depend on k' only through the operator, so the
/// sum is regrouped by operator with accumulated weights.
pub fn tight_bound(plan: &StagePlan, h: &Hamiltonian, t: f64) -> Result<BoundReport> {
    let p = plan.order;
    if p > TIGHT_ORDER_CAP {
        return Err(Error::UnsupportedOrder { p, cap: TIGHT_ORDER_CAP });
    }
    if plan.family != Family::ExactSegment {
        return Err(Error::invalid("the tight bound applies to exact-segment plans"));
    }
    if plan.gamma != h.gamma() {
        return Err(Error::invalid("plan and Hamiltonian disagree on Γ"));
    }
    let (starts, ops) = tight_weights(plan);
    let m = max_with(|tau| evaluate(h, tau, &starts, &ops, p), t, &[])?;
    let value = 3.0 * t.powi(p as i32 + 1) * m.value;
    let k = plan.k() as u64;
    Ok(report("tight", p, t, value, &m, k * (2 * k - 1).pow(p as u32)))
}

fn tight_weights(plan: &StagePlan) -> (Vec<(usize, f64)>, Vec<JetOp>) {
    let g = plan.gamma;
    let mut count = vec![0.0; g];
    let mut w = vec![0.0; g];
    for s in &plan.stages {
        count[s.gamma] += 1.0;
        w[s.gamma] += s.alpha.abs();
    }
    let gaps: f64 =
        plan.stages.windows(2).map(|s| (s[1].beta - s[0].beta - s[0].alpha).abs()).sum();
    let i = C64::new(0.0, 1.0);
    let mut ops: Vec<JetOp> = (0..g).map(|gm| JetOp { gamma: Some(gm), dt: i, weight: w[gm] }).collect();
    ops.push(JetOp { gamma: None, dt: i, weight: gaps });
    let starts = (0..g).map(|gm| (gm, count[gm])).collect();
    (starts, ops)
}

/// ∫₀ᵗ dt₁ ∫₀^{t₁} dt₂ ‖[H₁(t₁), H₂(t₂)]‖ for Γ = 2 (H₁ at the later time).
pub fn huyghebaert_bound(h: &Hamiltonian, t: f64) -> Result<f64> {
    if h.gamma() != 2 {
        return Err(Error::invalid(format!("first-order bound needs Γ = 2, got {}", h.gamma())));
    }
    let (h1, h2) = (h.term(0), h.term(1));
    let failed = std::sync::atomic::AtomicBool::new(false);
    let inner = |t1: f64| {
        let a = h1.eval_unchecked(t1, 0);
        let r = quad::integrate(|t2| linalg::norm(&linalg::comm(&a, &h2.eval_unchecked(t2, 0))), 0.0, t1, 1e-11, 1e-12);
        if !r.converged {
            failed.store(true, std::sync::atomic::Ordering::Relaxed);
        }
        r.value
    };
    let outer = quad::integrate(inner, 0.0, t, 1e-9, 1e-12);
    if !outer.converged || failed.into_inner() {
        return Err(Error::Convergence { what: "first-order double integral".into(), disagreement: outer.error });
    }
    Ok(outer.value)
}

/// Im A = (A - A†) / 2i
pub fn imaginary_part(a: &OperatorMatrix) -> OperatorMatrix {
    (a - a.adjoint()) * C64::new(0.0, -0.5)
}

/// 3 V^{p+1} max α_com^{p+1} t^{p+1} · exp(4V ∫₀ᵗ Σ_γ ‖Im H_γ‖).
pub fn nonunitary_bound(plan: &StagePlan, h: &Hamiltonian, t: f64) -> Result<BoundReport> {
    let p = plan.order;
    let v = plan.layers() as f64;
    let m = max_with(|tau| alpha_com(h, p + 1, tau), t, &[])?;
    let amp = nonunitary_factor(h, t, v)?;
    let value = 3.0 * v.powi(p as i32 + 1) * m.value * t.powi(p as i32 + 1) * amp;
    Ok(report("nonunitary", p, t, value, &m, com_term_count(h.gamma(), p)))
}

/// exp(4V ∫₀ᵗ Σ_γ ‖Im H_γ(τ)‖ dτ)
pub fn nonunitary_factor(h: &Hamiltonian, t: f64, v: f64) -> Result<f64> {
    if h.is_hermitian() {
        return Ok(1.0);
    }
    let integrand =
        |tau: f64| h.terms().iter().map(|term| linalg::norm(&imaginary_part(&term.eval_unchecked(tau, 0)))).sum::<f64>();
    let r = quad::integrate(integrand, 0.0, t, 1e-10, 1e-12);
    if !r.converged {
        return Err(Error::Convergence { what: "imaginary-part integral".into(), disagreement: r.error });
    }
    Ok((4.0 * v * r.value).exp())
}

/// √2 e² ‖c‖₁ (√2 α t)^{2J+1}
pub fn mpf_bound_value(alpha_t: f64, j: usize, c_norm: f64) -> f64 {
    let s2 = std::f64::consts::SQRT_2;
    s2 * std::f64::consts::E.powi(2) * c_norm * (s2 * alpha_t).powi(2 * j as i32 + 1)
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct MpfAlpha {
    /// sup over τ ∈ [0,t] and odd q ≤ 2J+1 of (α_com^q)^{1/q}
    pub local: f64,
    pub local_argmax: f64,
    /// Same supremum over one full period of the periodic (or periodically extended) model.
    pub global: f64,
}

/// α_com(t) for the MPF bound with both the local and the full-period supremum.
pub fn mpf_alpha(h: &Hamiltonian, t: f64, j: usize) -> Result<MpfAlpha> {
    mpf_alpha_with(h, t, j, usize::MAX)
}

/// As `mpf_alpha`, with α_com^q replaced by `alpha_com_upper(.., exact_depth)`.
pub fn mpf_alpha_with(h: &Hamiltonian, t: f64, j: usize, exact_depth: usize) -> Result<MpfAlpha> {
    let qs: Vec<usize> = (1..=j).map(|m| 2 * m + 1).collect();
    let sup = |hh: &Hamiltonian, a: f64, b: f64| -> Result<(f64, f64)> {
        let mut best = (0.0f64, a);
        for &q in &qs {
            let m = maximize(|tau| alpha_com_upper(hh, q, tau, exact_depth), a, b, DEFAULT_GRID)?;
            let v = m.value.powf(1.0 / q as f64);
            if v > best.0 {
                best = (v, m.argmax);
            }
        }
        Ok(best)
    };
    let (local, local_argmax) = sup(h, 0.0, t)?;
    let global = match h.periodicity() {
        crate::Periodicity::Constant => local,
        crate::Periodicity::Period(period) => sup(h, 0.0, period)?.0,
        crate::Periodicity::Aperiodic => {
            let ext = h.extrapolate_periodic(t, (2 * j).saturating_sub(2))?;
            sup(&ext, 0.0, 2.0 * t)?.0
        }
    };
    Ok(MpfAlpha { local, local_argmax, global: global.max(local) })
}

/// √2 e² ‖c‖₁ (√2 α_com(t) t)^{2J+1}; refuses when α_com(t)·t ≥ 1/2.
pub fn mpf_bound(h: &Hamiltonian, t: f64, j: usize, c_norm: f64) -> Result<(f64, MpfAlpha)> {
    let a = mpf_alpha(h, t, j)?;
    if a.local * t >= 0.5 {
        return Err(Error::OutOfRegime(format!("α_com(t)·t = {:.3} ≥ 1/2", a.local * t)));
    }
    Ok((mpf_bound_value(a.local * t, j, c_norm), a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models;
    use crate::product_formula::{measure_error, suzuki_plan};
    use crate::time_functions::ScalarCurve;

    const TOL: f64 = 1e-13;

    #[test]
    fn hybrid_alpha_is_an_upper_bound() {
        let h = models::driven_chain(3, 8).unwrap();
        for q in [3, 5, 6] {
            let exact = alpha_com(&h, q, 0.4).unwrap();
            assert_eq!(alpha_com_upper(&h, q, 0.4, q).unwrap(), exact);
            let mut last = f64::INFINITY;
            for d in 0..q - 1 {
                let u = alpha_com_upper(&h, q, 0.4, d).unwrap();
                assert!(u >= exact * (1.0 - 1e-12) && u <= last * (1.0 + 1e-12), "q={q} d={d}");
                last = u;
            }
        }
    }

    #[test]
    fn commuting_terms_vanish() {
        let h = models::commuting_static(3, 6).unwrap();
        for order in 1..=4 {
            if order > 1 {
                assert_eq!(alpha_com(&h, order, 0.3).unwrap(), 0.0);
            }
        }
        let plan = suzuki_plan(1, 3, Family::ExactSegment).unwrap();
        assert_eq!(tight_bound(&plan, &h, 0.5).unwrap().value, 0.0);
        assert_eq!(corollary_bound(&plan, &h, 0.5, &[]).unwrap().value, 0.0);
    }

    #[test]
    fn static_two_terms_first_order() {
        let h = models::static_xz(0.7, 1.3, 4).unwrap();
        let c = linalg::comm(&h.term(0).eval(0.0, 0).unwrap(), &h.term(1).eval(0.0, 0).unwrap());
        let expected = 2.0 * linalg::norm(&c);
        assert!((alpha_com(&h, 2, 0.0).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn single_qubit_hand_enumeration() {
        let f = ScalarCurve::trig(0.9, 1.7, 0.2, 4);
        let g = ScalarCurve::trig(-0.6, 0.8, 1.1, 4);
        let h = models::single_qubit(f.clone(), g.clone(), 4).unwrap();
        let tau = 0.37;
        let (fv, gv) = (f.value(tau), g.value(tau));
        let (fd, gd) = (f.eval(tau, 1).unwrap(), g.eval(tau, 1).unwrap());
        let a = 4.0 * (fv * gv).abs() + 4.0 * (fd.abs() + gd.abs());
        let b = 4.0 * (fv * gv).abs() + (fd.abs() + gd.abs());
        assert!((alpha_com(&h, 2, tau).unwrap() - a).abs() < 1e-12);
        assert!((bar_alpha_com(&h, 2, tau).unwrap() - b).abs() < 1e-12);
    }

    #[test]
    fn static_reduction_matches_direct_enumeration() {
        for gamma in [2, 3] {
            let h = if gamma == 2 { models::static_xz(0.7, 1.3, 4).unwrap() } else { three_static() };
            for order in 1..=4 {
                let a = alpha_com(&h, order, 0.0).unwrap();
                let b = static_nested_sum(&h, order, 0.0).unwrap();
                assert!((a - b).abs() <= 1e-10 * (1.0 + b), "Γ={gamma} order={order}: {a} vs {b}");
                assert_eq!(bar_alpha_com(&h, order, 0.0).unwrap(), a);
            }
        }
    }

    fn three_static() -> Hamiltonian {
        use crate::hamiltonian::ingest::model_from_str;
        model_from_str(
            r#"{"model":"custom","N":2,"derivative_budget":4,"terms":[
              {"gamma":1,"paulis":[[0,"X"],[1,"X"]],"curve":{"kind":"constant","value":0.8}},
              {"gamma":2,"paulis":[[0,"Z"]],"curve":{"kind":"constant","value":1.1}},
              {"gamma":3,"paulis":[[1,"Y"]],"curve":{"kind":"constant","value":-0.5}}]}"#,
        )
        .unwrap()
    }

    #[test]
    fn jet_leibniz_matches_finite_differences() {
        let h = models::driven_chain(2, 6).unwrap();
        let (a, b) = (h.term(0), h.term(1));
        let tau = 0.41;
        let ja = GradedOperatorCurve::at(a, tau, 3).unwrap();
        let jb = GradedOperatorCurve::at(b, tau, 3).unwrap();
        let c = jb.apply_ad(&ja).unwrap();
        let eps = 1e-4;
        let at = |s: f64| linalg::comm(&a.eval(s, 0).unwrap(), &b.eval(s, 0).unwrap());
        let fd = (at(tau + eps) - at(tau - eps)) / C64::new(2.0 * eps, 0.0);
        let rel = linalg::norm(&(c.value(1).unwrap() - &fd)) / linalg::norm(&fd);
        assert!(rel < 1e-6, "{rel}");
        let d = c.apply_dt(C64::new(1.0, 0.0)).unwrap();
        assert_eq!(d.budget(), 2);
        assert_eq!(d.value(0).unwrap(), c.value(1).unwrap());
    }

    #[test]
    fn pauli_and_dense_agree() {
        let h = models::driven_chain(3, 6).unwrap();
        let jets_d = dense_jets(&h, 0.3, 2);
        let jets_p = pauli_jets(&h, 0.3, 2).unwrap();
        let starts: Vec<(usize, f64)> = vec![(0, 1.0), (1, 1.0)];
        let ops = com_ops(2, 4.0);
        let a = nested_sum(&jets_d, &starts, &ops, 2);
        let b = nested_sum(&jets_p, &starts, &ops, 2);
        assert!((a - b).abs() < 1e-10 * a);
    }

    #[test]
    fn static_xz_first_order_closed_form() {
        let (a, b) = (0.7, 1.3);
        let h = models::static_xz(a, b, 4).unwrap();
        for t in [0.1, 0.5, 1.0] {
            assert!((huyghebaert_bound(&h, t).unwrap() - a * b * t * t).abs() < 1e-8);
        }
    }

    #[test]
    fn bounds_hold_on_driven_model() {
        let h = models::driven_chain(2, 6).unwrap();
        for p in [1usize, 2] {
            let plan = suzuki_plan(p, 2, Family::ExactSegment).unwrap();
            for t in [0.01, 0.05] {
                let e = measure_error(&plan, &h, t, TOL).unwrap();
                let tight = tight_bound(&plan, &h, t).unwrap();
                let cor = corollary_bound(&plan, &h, t, &[tight.tau_argmax]).unwrap();
                assert!(e <= tight.value, "p={p} t={t}: {e} > {}", tight.value);
                assert!(tight.value <= cor.value, "p={p} t={t}: {} > {}", tight.value, cor.value);
            }
        }
        let plan = suzuki_plan(1, 2, Family::ExactSegment).unwrap();
        let e = measure_error(&plan, &h, 0.1, TOL).unwrap();
        assert!(e <= huyghebaert_bound(&h, 0.1).unwrap());
    }

    #[test]
    fn tight_term_count() {
        let plan = suzuki_plan(1, 2, Family::ExactSegment).unwrap();
        let h = models::static_xz(1.0, 1.0, 4).unwrap();
        assert_eq!(tight_bound(&plan, &h, 0.1).unwrap().term_count, 6);
        let p4 = suzuki_plan(4, 2, Family::ExactSegment).unwrap();
        assert!(matches!(tight_bound(&p4, &h, 0.1), Err(Error::UnsupportedOrder { .. })));
    }

    #[test]
    fn doubling_time_scales_static_bound() {
        let h = models::static_xz(0.7, 1.3, 4).unwrap();
        let plan = suzuki_plan(2, 2, Family::ExactSegment).unwrap();
        let a = corollary_bound(&plan, &h, 0.1, &[]).unwrap().value;
        let b = corollary_bound(&plan, &h, 0.2, &[]).unwrap().value;
        assert!((b / a - 8.0).abs() < 1e-10);
    }

    #[test]
    fn nonunitary_factor_examples() {
        let h = models::driven_chain(2, 4).unwrap();
        assert_eq!(nonunitary_factor(&h, 0.5, 1.0).unwrap(), 1.0);
        let x = crate::hamiltonian::ingest::model_from_str(
            r#"{"model":"custom","N":1,"scale":[0.0,-1.0],
                "terms":[{"gamma":1,"paulis":[[0,"X"]],"curve":{"kind":"constant","value":1.0}}]}"#,
        )
        .unwrap();
        let t = 0.3;
        assert!((nonunitary_factor(&x, t, 1.0).unwrap() - (4.0 * t).exp()).abs() < 1e-12);
    }

    #[test]
    fn mpf_bound_arithmetic() {
        let v = mpf_bound_value(0.1, 2, 5.0 / 3.0);
        assert!((v - 9.852_074_798_574e-4).abs() < 1e-15, "{v}");
        let h = models::commuting_static(2, 6).unwrap();
        assert_eq!(mpf_bound(&h, 0.5, 2, 5.0 / 3.0).unwrap().0, 0.0);
    }

    #[test]
    fn maximize_finds_interior_peak() {
        let m = maximize(|x| Ok(-(x - 0.3137).powi(2)), 0.0, 1.0, 65).unwrap();
        assert!((m.argmax - 0.3137).abs() < 1e-6);
    }
}
