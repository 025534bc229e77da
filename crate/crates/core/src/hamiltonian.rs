//! Hamiltonians H(t) = Σ_γ H_γ(t), each term a sum of fixed operators times scalar curves.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::linalg::{self, OperatorMatrix, Pauli, C64, ONE, ZERO};
use crate::pauli::PauliSum;
use crate::time_functions::{Periodicity, ScalarCurve};

pub mod ingest;
pub mod models;

/// Fixed operator factor of a summand.
#[derive(Clone, Debug)]
pub enum Operator {
    Dense(OperatorMatrix),
    Pauli(PauliSum),
}

impl Operator {
    pub fn dim(&self) -> usize {
        match self {
            Operator::Dense(m) => m.nrows(),
            Operator::Pauli(p) => p.dim(),
        }
    }

    pub fn to_dense(&self) -> OperatorMatrix {
        match self {
            Operator::Dense(m) => m.clone(),
            Operator::Pauli(p) => p.to_dense(),
        }
    }

    pub fn scaled(&self, c: C64) -> Operator {
        match self {
            Operator::Dense(m) => Operator::Dense(m * c),
            Operator::Pauli(p) => Operator::Pauli(p.scaled(c)),
        }
    }

    fn is_zero(&self) -> bool {
        match self {
            Operator::Dense(m) => m.iter().all(|z| *z == ZERO),
            Operator::Pauli(p) => p.is_empty(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Summand {
    pub op: Operator,
    pub curve: ScalarCurve,
    dense: OnceLock<OperatorMatrix>,
}

impl Summand {
    pub fn new(op: Operator, curve: ScalarCurve) -> Self {
        Summand { op, curve, dense: OnceLock::new() }
    }

    pub fn dense(&self) -> &OperatorMatrix {
        self.dense.get_or_init(|| self.op.to_dense())
    }
}

/// Σ_j A_j f_j(τ), queryable at derivative orders up to `budget`.
#[derive(Clone, Debug)]
pub struct OperatorCurve {
    dim: usize,
    budget: usize,
    summands: Vec<Summand>,
}

impl OperatorCurve {
    pub fn new(dim: usize, budget: usize) -> Self {
        OperatorCurve { dim, budget, summands: Vec::new() }
    }

    pub fn from_summands(dim: usize, budget: usize, items: Vec<(Operator, ScalarCurve)>) -> Result<Self> {
        let mut c = OperatorCurve::new(dim, budget);
        for (op, curve) in items {
            c.push(op, curve)?;
        }
        Ok(c)
    }

    pub fn push(&mut self, op: Operator, curve: ScalarCurve) -> Result<()> {
        if op.dim() != self.dim {
            return Err(Error::DimensionMismatch(self.dim, op.dim()));
        }
        if curve.budget < self.budget {
            return Err(Error::invalid(format!(
                "summand curve budget {} below term budget {}",
                curve.budget, self.budget
            )));
        }
        if !op.is_zero() && !curve.is_zero() {
            self.summands.push(Summand::new(op, curve));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    pub fn summands(&self) -> &[Summand] {
        &self.summands
    }

    pub fn is_zero(&self) -> bool {
        self.summands.is_empty()
    }

    pub fn is_pauli(&self) -> bool {
        self.summands.iter().all(|s| matches!(s.op, Operator::Pauli(_)))
    }

    pub fn is_static(&self) -> bool {
        self.summands.iter().all(|s| s.curve.is_constant())
    }

    /// Σ_j A_j f_j^{(q)}(τ)
    pub fn eval(&self, tau: f64, q: usize) -> Result<OperatorMatrix> {
        self.check_budget(q)?;
        Ok(self.eval_unchecked(tau, q))
    }

    pub(crate) fn check_budget(&self, q: usize) -> Result<()> {
        if q > self.budget {
            Err(Error::BudgetExceeded { requested: q, budget: self.budget })
        } else {
            Ok(())
        }
    }

    pub(crate) fn eval_unchecked(&self, tau: f64, q: usize) -> OperatorMatrix {
        let mut m = linalg::zeros(self.dim);
        for s in &self.summands {
            let f = s.curve.shape.eval(tau, q);
            if f != 0.0 {
                m.zip_apply(s.dense(), |a, b| *a += b * f);
            }
        }
        m
    }

    /// Pauli form of the q-th derivative; None if any summand is dense.
    pub(crate) fn eval_pauli(&self, tau: f64, q: usize, n: usize) -> Option<PauliSum> {
        let mut acc = PauliSum::zero(n);
        for s in &self.summands {
            let Operator::Pauli(p) = &s.op else { return None };
            let f = s.curve.shape.eval(tau, q);
            if f != 0.0 {
                acc.add_scaled(p, C64::new(f, 0.0));
            }
        }
        Some(acc)
    }

    /// True when every pair of summand operators commutes, so the term is exponentiable at once
    /// and its time ordering is trivial.
    pub fn summands_commute(&self) -> bool {
        let s = &self.summands;
        for i in 0..s.len() {
            for j in i + 1..s.len() {
                let ok = match (&s[i].op, &s[j].op) {
                    (Operator::Pauli(a), Operator::Pauli(b)) => a.commutes_with(b),
                    _ => {
                        let c = linalg::comm(s[i].dense(), s[j].dense());
                        c.iter().all(|z| z.norm() <= 1e-14)
                    }
                };
                if !ok {
                    return false;
                }
            }
        }
        true
    }

    pub fn shifted(&self, t0: f64) -> Self {
        self.map_curves(|c| Ok(c.shifted(t0))).expect("shift cannot fail")
    }

    pub fn scaled(&self, c: C64) -> Self {
        let summands = self.summands.iter().map(|s| Summand::new(s.op.scaled(c), s.curve.clone())).collect();
        OperatorCurve { dim: self.dim, budget: self.budget, summands }
    }

    pub fn extrapolate_periodic(&self, t: f64, p: usize) -> Result<Self> {
        if p + 2 > self.budget {
            return Err(Error::BudgetExceeded { requested: p + 2, budget: self.budget });
        }
        let mut out = self.map_curves(|c| c.extrapolate_periodic(t, p))?;
        out.budget = p + 2;
        Ok(out)
    }

    fn map_curves(&self, f: impl Fn(&ScalarCurve) -> Result<ScalarCurve>) -> Result<Self> {
        let summands = self
            .summands
            .iter()
            .map(|s| Ok(Summand { op: s.op.clone(), curve: f(&s.curve)?, dense: s.dense.clone() }))
            .collect::<Result<_>>()?;
        Ok(OperatorCurve { dim: self.dim, budget: self.budget, summands })
    }

    pub fn periodicity(&self) -> Periodicity {
        combine_periods(self.summands.iter().map(|s| s.curve.periodicity()))
    }
}

pub(crate) fn combine_periods(it: impl Iterator<Item = Periodicity>) -> Periodicity {
    let mut acc = Periodicity::Constant;
    for p in it {
        acc = match (acc, p) {
            (a, Periodicity::Constant) => a,
            (Periodicity::Constant, b) => b,
            (Periodicity::Period(a), Periodicity::Period(b)) if (a - b).abs() <= 1e-12 * a.abs() => {
                Periodicity::Period(a)
            }
            _ => Periodicity::Aperiodic,
        };
    }
    acc
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelClass {
    NnChain,
    LongRange,
    Custom,
}

/// Coupling channel h_ij^{σσ'}(τ) = f(τ) / |i-j|^ν.
#[derive(Clone, Debug)]
pub struct Channel {
    pub sigma: (Pauli, Pauli),
    pub curve: ScalarCurve,
}

/// Uniform field Σ_i f(τ) σ_i.
#[derive(Clone, Debug)]
pub struct Field {
    pub pauli: Pauli,
    pub curve: ScalarCurve,
}

/// 2-local power-law model on a 1-D chain.
#[derive(Clone, Debug)]
pub struct LongRangeSpec {
    pub n: usize,
    pub nu: f64,
    pub channels: Vec<Channel>,
    pub fields: Vec<Field>,
}

#[derive(Clone, Debug)]
pub struct ModelMeta {
    pub class: ModelClass,
    pub n_qubits: Option<usize>,
    pub nu: Option<f64>,
    pub periodic: bool,
    pub long_range: Option<LongRangeSpec>,
    /// Exponentials per PF layer, counting every two-qubit and one-qubit factor as one gate.
    pub gates_per_layer: usize,
}

impl ModelMeta {
    pub fn custom(gates_per_layer: usize) -> Self {
        ModelMeta {
            class: ModelClass::Custom,
            n_qubits: None,
            nu: None,
            periodic: false,
            long_range: None,
            gates_per_layer,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Hamiltonian {
    terms: Vec<OperatorCurve>,
    dim: usize,
    hermitian: bool,
    pub meta: ModelMeta,
}

impl Hamiltonian {
    pub fn new(terms: Vec<OperatorCurve>, meta: ModelMeta) -> Result<Self> {
        let Some(first) = terms.first() else {
            return Err(Error::invalid("a Hamiltonian needs at least one term"));
        };
        let dim = first.dim();
        if let Some(t) = terms.iter().find(|t| t.dim() != dim) {
            return Err(Error::DimensionMismatch(dim, t.dim()));
        }
        let hermitian = terms.iter().all(|t| {
            t.summands().iter().all(|s| match &s.op {
                Operator::Pauli(p) => p.is_hermitian(),
                Operator::Dense(m) => linalg::hermiticity_defect(m) <= 1e-12,
            })
        });
        Ok(Hamiltonian { terms, dim, hermitian, meta })
    }

    pub fn gamma(&self) -> usize {
        self.terms.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_qubits(&self) -> Option<usize> {
        self.meta.n_qubits
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn terms(&self) -> &[OperatorCurve] {
        &self.terms
    }

    /// Term γ, zero-based.
    pub fn term(&self, gamma: usize) -> &OperatorCurve {
        &self.terms[gamma]
    }

    pub fn budget(&self) -> usize {
        self.terms.iter().map(|t| t.budget()).min().unwrap_or(0)
    }

    pub fn is_pauli(&self) -> bool {
        self.meta.n_qubits.is_some() && self.terms.iter().all(|t| t.is_pauli())
    }

    /// Σ_γ H_γ^{(q)}(τ)
    pub fn total(&self, tau: f64, q: usize) -> Result<OperatorMatrix> {
        let mut m = linalg::zeros(self.dim);
        for t in &self.terms {
            m += t.eval(tau, q)?;
        }
        Ok(m)
    }

    /// A single-term curve holding every summand of every term.
    pub fn total_curve(&self) -> OperatorCurve {
        let mut c = OperatorCurve::new(self.dim, self.budget());
        for t in &self.terms {
            c.summands.extend(t.summands.iter().cloned());
        }
        c
    }

    /// τ ↦ H(τ + t0)
    pub fn shifted(&self, t0: f64) -> Self {
        self.map_terms(|t| Ok(t.shifted(t0))).expect("shift cannot fail")
    }

    pub fn scaled(&self, c: C64) -> Self {
        let mut h = self.map_terms(|t| Ok(t.scaled(c))).expect("scaling cannot fail");
        h.hermitian = self.hermitian && c.im == 0.0;
        h
    }

    pub fn extrapolate_periodic(&self, t: f64, p: usize) -> Result<Self> {
        self.map_terms(|term| term.extrapolate_periodic(t, p))
    }

    fn map_terms(&self, f: impl Fn(&OperatorCurve) -> Result<OperatorCurve>) -> Result<Self> {
        let terms = self.terms.iter().map(f).collect::<Result<_>>()?;
        Ok(Hamiltonian { terms, dim: self.dim, hermitian: self.hermitian, meta: self.meta.clone() })
    }

    pub fn periodicity(&self) -> Periodicity {
        combine_periods(self.terms.iter().map(|t| t.periodicity()))
    }

    /// (‖H‖₁, |||H|||₁) at τ. Long-range models use their pair coefficients, other Pauli models
    /// sum string coefficients.
    pub fn induced_norms(&self, tau: f64) -> Result<(f64, f64)> {
        if let Some(spec) = &self.meta.long_range {
            return Ok(spec.induced_norms(tau));
        }
        let n = self.n_qubits().filter(|_| self.is_pauli());
        let Some(n) = n else {
            return Err(Error::invalid("induced norms need a Pauli model"));
        };
        let mut acc = PauliSum::zero(n);
        for t in &self.terms {
            acc.add_scaled(&t.eval_pauli(tau, 0, n).expect("Pauli term"), C64::new(1.0, 0.0));
        }
        Ok(acc.induced_norms())
    }
}

/// Maximum number of qubits the builders accept.
pub const MAX_QUBITS: usize = 20;

fn check_n(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::invalid(format!("chain needs N >= 2, got {n}")));
    }
    if n > MAX_QUBITS {
        return Err(Error::DimensionCap { dim: n, cap: MAX_QUBITS });
    }
    Ok(())
}

/// Nearest-neighbour chain: bond i couples sites i and i+1 (mod N when periodic) with
/// operator Σ w σ⊗σ' scaled by `couplings[i]`. Odd bonds (1-based) form H_1, even bonds H_2.
/// An optional uniform field goes into H_2.
pub fn build_nn_chain(
    n: usize,
    bond: &[(Pauli, Pauli, f64)],
    couplings: &[ScalarCurve],
    periodic: bool,
    field: Option<&Field>,
    budget: usize,
) -> Result<Hamiltonian> {
    check_n(n)?;
    if periodic && n % 2 == 1 {
        return Err(Error::invalid("periodic chains need even N for the odd/even split"));
    }
    let n_bonds = if periodic && n > 2 { n } else { n - 1 };
    if couplings.len() != n_bonds {
        return Err(Error::invalid(format!("expected {n_bonds} coupling curves, got {}", couplings.len())));
    }
    let dim = 1usize << n;
    let mut terms = vec![OperatorCurve::new(dim, budget), OperatorCurve::new(dim, budget)];
    for (i, curve) in couplings.iter().enumerate() {
        let (a, b) = (i, (i + 1) % n);
        let mut op = PauliSum::zero(n);
        for &(s, s2, w) in bond {
            op.add_scaled(&PauliSum::from_string(&[(a, s), (b, s2)], n, ONE)?, C64::new(w, 0.0));
        }
        terms[i % 2].push(Operator::Pauli(op), curve.clone())?;
    }
    let mut gates = n_bonds;
    if let Some(f) = field {
        let mut op = PauliSum::zero(n);
        for i in 0..n {
            op.add_scaled(&PauliSum::from_string(&[(i, f.pauli)], n, ONE)?, ONE);
        }
        terms[1].push(Operator::Pauli(op), f.curve.clone())?;
        gates += n;
    }
    let meta = ModelMeta {
        class: ModelClass::NnChain,
        n_qubits: Some(n),
        nu: None,
        periodic,
        long_range: None,
        gates_per_layer: gates,
    };
    Hamiltonian::new(terms, meta)
}

/// Divide-and-conquer stage of the pair (i, j), i < j, on a chain padded to `2^stages` sites:
/// the first stage γ' (1-based) at which i and j sit in sibling blocks (2μ-1, 2μ).
pub fn pair_stage(i: usize, j: usize, stages: usize) -> usize {
    let diff = i ^ j;
    stages - (usize::BITS - 1 - diff.leading_zeros()) as usize
}

pub fn long_range_stages(n: usize) -> usize {
    n.next_power_of_two().trailing_zeros() as usize
}

impl LongRangeSpec {
    fn coefficient(&self, i: usize, j: usize) -> f64 {
        let d = (j as f64 - i as f64).abs();
        d.powf(-self.nu)
    }

    pub fn induced_norms(&self, tau: f64) -> (f64, f64) {
        let ch: f64 = self.channels.iter().map(|c| c.curve.value(tau).abs()).sum();
        let fs: f64 = self.fields.iter().map(|f| f.curve.value(tau).abs()).sum();
        let mut one = 0.0;
        let mut row_max = 0.0f64;
        for i in 0..self.n {
            let mut row = 0.0;
            for j in 0..self.n {
                if j != i {
                    let h = ch * self.coefficient(i, j);
                    row += h;
                    if j > i {
                        one += h;
                    }
                }
            }
            row_max = row_max.max(row);
        }
        one += self.n as f64 * fs;
        (one, row_max.max(fs))
    }
}

/// Γ = 9·⌈log₂N⌉ + 1 terms ordered by stage, then (σ, σ') in XYZ×XYZ order, then the field term.
pub fn build_long_range(spec: &LongRangeSpec, budget: usize) -> Result<Hamiltonian> {
    let n = spec.n;
    check_n(n)?;
    if !spec.nu.is_finite() || spec.nu < 0.0 {
        return Err(Error::invalid("decay exponent must be finite and nonnegative"));
    }
    let dim = 1usize << n;
    let stages = long_range_stages(n);
    let mut terms = Vec::with_capacity(9 * stages + 1);
    let mut gates = 0;
    for stage in 1..=stages {
        for s in Pauli::XYZ {
            for s2 in Pauli::XYZ {
                let mut term = OperatorCurve::new(dim, budget);
                for ch in spec.channels.iter().filter(|c| c.sigma == (s, s2)) {
                    let mut op = PauliSum::zero(n);
                    for i in 0..n {
                        for j in i + 1..n {
                            if pair_stage(i, j, stages) == stage {
                                let w = C64::new(spec.coefficient(i, j), 0.0);
                                op.add_scaled(&PauliSum::from_string(&[(i, s), (j, s2)], n, ONE)?, w);
                                gates += 1;
                            }
                        }
                    }
                    term.push(Operator::Pauli(op), ch.curve.clone())?;
                }
                terms.push(term);
            }
        }
    }
    let mut last = OperatorCurve::new(dim, budget);
    for f in &spec.fields {
        let mut op = PauliSum::zero(n);
        for i in 0..n {
            op.add_scaled(&PauliSum::from_string(&[(i, f.pauli)], n, ONE)?, ONE);
        }
        last.push(Operator::Pauli(op), f.curve.clone())?;
        gates += n;
    }
    terms.push(last);
    let meta = ModelMeta {
        class: ModelClass::LongRange,
        n_qubits: Some(n),
        nu: Some(spec.nu),
        periodic: false,
        long_range: Some(spec.clone()),
        gates_per_layer: gates,
    };
    Hamiltonian::new(terms, meta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::embed_pauli_string;

    fn xx() -> Vec<(Pauli, Pauli, f64)> {
        vec![(Pauli::X, Pauli::X, 1.0)]
    }

    fn consts(k: usize, v: f64) -> Vec<ScalarCurve> {
        vec![ScalarCurve::constant(v, 4); k]
    }

    #[test]
    fn nn_chain_odd_even_split() {
        let h = build_nn_chain(4, &xx(), &consts(3, 1.0), false, None, 4).unwrap();
        assert_eq!(h.gamma(), 2);
        let b = |i: usize| embed_pauli_string(&[(i, Pauli::X), (i + 1, Pauli::X)], 4).unwrap();
        let h1 = h.term(0).eval(0.0, 0).unwrap();
        let h2 = h.term(1).eval(0.0, 0).unwrap();
        assert!((h1 - (b(0) + b(2))).norm() < 1e-15);
        assert!((h2.clone() - b(1)).norm() < 1e-15);
        let total = h.total(0.0, 0).unwrap();
        assert!((total - (b(0) + b(1) + b(2))).norm() < 1e-15);
        assert!(h.is_hermitian());
    }

    #[test]
    fn nn_chain_two_sites_has_zero_second_term() {
        let h = build_nn_chain(2, &xx(), &consts(1, 1.0), false, None, 4).unwrap();
        assert!(h.term(1).is_zero());
        assert_eq!(h.term(1).eval(0.3, 0).unwrap(), linalg::zeros(4));
    }

    #[test]
    fn nn_chain_rejects_bad_sizes() {
        assert!(build_nn_chain(1, &xx(), &[], false, None, 4).is_err());
        assert!(matches!(
            build_nn_chain(40, &xx(), &consts(39, 1.0), false, None, 4),
            Err(Error::DimensionCap { .. })
        ));
    }

    #[test]
    fn derivative_is_linear_in_summands() {
        let c = ScalarCurve::trig(0.7, 1.3, 0.2, 4);
        let x = Operator::Dense(Pauli::X.matrix());
        let z = Operator::Dense(Pauli::Z.matrix());
        let joined = OperatorCurve::from_summands(2, 4, vec![(x.clone(), c.clone()), (z.clone(), c.clone())]).unwrap();
        let merged = Operator::Dense(Pauli::X.matrix() + Pauli::Z.matrix());
        let single = OperatorCurve::from_summands(2, 4, vec![(merged, c)]).unwrap();
        for q in 0..=4 {
            let d = joined.eval(0.4, q).unwrap() - single.eval(0.4, q).unwrap();
            assert!(d.norm() < 1e-14);
        }
        assert!(matches!(joined.eval(0.4, 5), Err(Error::BudgetExceeded { .. })));
    }

    fn unit_spec(n: usize, nu: f64) -> LongRangeSpec {
        LongRangeSpec {
            n,
            nu,
            channels: vec![Channel { sigma: (Pauli::X, Pauli::X), curve: ScalarCurve::constant(1.0, 4) }],
            fields: vec![],
        }
    }

    #[test]
    fn long_range_term_count() {
        let h = build_long_range(&unit_spec(4, 1.0), 4).unwrap();
        assert_eq!(h.gamma(), 19);
        let h = build_long_range(&unit_spec(5, 1.0), 4).unwrap();
        assert_eq!(h.gamma(), 28);
    }

    #[test]
    fn stage_one_pairs_two_blocks_of_two() {
        // stage 1 at N=4: blocks {0,1} and {2,3}
        for (i, j) in [(0, 2), (0, 3), (1, 2), (1, 3)] {
            assert_eq!(pair_stage(i, j, 2), 1);
        }
        assert_eq!(pair_stage(0, 1, 2), 2);
        assert_eq!(pair_stage(2, 3, 2), 2);
    }

    #[test]
    fn pairs_partition_exactly_once() {
        let n = 8;
        let stages = long_range_stages(n);
        let mut seen = vec![vec![0usize; n]; n];
        for stage in 1..=stages {
            let blocks = 1 << stage;
            let size = n / blocks;
            for mu in 0..blocks / 2 {
                let left = 2 * mu * size..(2 * mu + 1) * size;
                let right = (2 * mu + 1) * size..(2 * mu + 2) * size;
                for i in left.clone() {
                    for j in right.clone() {
                        assert_eq!(pair_stage(i, j, stages), stage);
                        seen[i][j] += 1;
                    }
                }
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                assert_eq!(seen[i][j], 1);
            }
        }
    }

    #[test]
    fn long_range_terms_commute_internally() {
        let spec = LongRangeSpec {
            n: 8,
            nu: 1.5,
            channels: Pauli::XYZ
                .iter()
                .flat_map(|&a| Pauli::XYZ.iter().map(move |&b| (a, b)))
                .map(|sigma| Channel { sigma, curve: ScalarCurve::trig(1.0, 1.0, 0.0, 4) })
                .collect(),
            fields: vec![Field { pauli: Pauli::Z, curve: ScalarCurve::constant(0.5, 4) }],
        };
        let h = build_long_range(&spec, 4).unwrap();
        for term in h.terms() {
            for s in term.summands() {
                let Operator::Pauli(p) = &s.op else { panic!() };
                for (a, b) in p.strings().iter().zip(p.strings().iter().skip(1)) {
                    assert!(a.commutes_with(b));
                }
                for a in p.strings() {
                    assert!(a.commutes_with(p));
                }
            }
        }
    }

    #[test]
    fn induced_norm_examples() {
        let zero = LongRangeSpec {
            n: 4,
            nu: 1.0,
            channels: vec![Channel { sigma: (Pauli::X, Pauli::X), curve: ScalarCurve::constant(0.0, 2) }],
            fields: vec![],
        };
        assert_eq!(zero.induced_norms(0.0), (0.0, 0.0));
        let mut two = unit_spec(2, 1.0);
        two.channels[0].curve = ScalarCurve::constant(0.5, 2);
        assert_eq!(two.induced_norms(0.0), (0.5, 0.5));
        let four = unit_spec(4, 0.0);
        assert_eq!(four.induced_norms(0.0), (6.0, 3.0));
    }

    #[test]
    fn induced_norm_bounded_for_fast_decay() {
        let pts: Vec<(f64, f64)> = [4usize, 8, 16, 32]
            .iter()
            .map(|&n| ((n as f64).ln(), unit_spec(n, 3.0).induced_norms(0.0).1.ln()))
            .collect();
        let slope = crate::fit::least_squares(&pts).slope;
        assert!(slope <= 0.1, "slope {slope}");
    }

    #[test]
    fn hermitian_at_random_times() {
        let h = models::driven_chain(4, 4).unwrap();
        assert!(h.is_hermitian());
        let mut x = 0.123f64;
        for _ in 0..50 {
            x = (x * 9.7 + 0.31).fract();
            for term in h.terms() {
                let m = term.eval(x, 0).unwrap();
                assert!((&m - m.adjoint()).norm() <= 1e-12);
            }
        }
    }
}
