//! Truncated Floquet-Hilbert space: ancilla index l ∈ [-L, L] tensored with the base space.
//!
//! Lifted index of (l, i) is (l + L)·d + i. The shift Add_m = Σ_l |l+m⟩⟨l| drops entries that
//! leave the window.

use std::f64::consts::PI;

use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hamiltonian::{Hamiltonian, OperatorCurve};
use crate::linalg::{self, OperatorMatrix, C64};
use crate::oracle;
use crate::product_formula::{evaluate_pf, suzuki_plan, Family, StagePlan};
use crate::time_functions::Periodicity;

pub const SAMPLES: usize = 1 << 12;
const PERIODIC_TOL: f64 = 1e-8;

/// Fourier modes H_m, m = -M..=M, of one term with H(τ) = Σ_m H_m e^{-imωτ}.
#[derive(Clone, Debug)]
pub struct FourierTerm {
    pub modes: Vec<OperatorMatrix>,
    /// max(‖H_M‖, ‖H_{-M}‖)
    pub tail: f64,
}

impl FourierTerm {
    pub fn m_max(&self) -> usize {
        self.modes.len() / 2
    }

    pub fn mode(&self, m: i64) -> Option<&OperatorMatrix> {
        let idx = m + self.m_max() as i64;
        (0..self.modes.len() as i64).contains(&idx).then(|| &self.modes[idx as usize])
    }

    pub fn eval(&self, omega: f64, tau: f64) -> OperatorMatrix {
        let m_max = self.m_max() as i64;
        let mut out = linalg::zeros(self.modes[0].nrows());
        for (k, h) in self.modes.iter().enumerate() {
            let m = k as i64 - m_max;
            out += h * C64::from_polar(1.0, -(m as f64) * omega * tau);
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct FourierHamiltonian {
    pub omega: f64,
    pub m_max: usize,
    pub terms: Vec<FourierTerm>,
}

impl FourierHamiltonian {
    pub fn from_hamiltonian(h: &Hamiltonian, omega: f64, m_max: usize) -> Result<Self> {
        let terms = h.terms().iter().map(|t| fourier_decompose(t, omega, m_max)).collect::<Result<_>>()?;
        Ok(FourierHamiltonian { omega, m_max, terms })
    }

    pub fn gamma(&self) -> usize {
        self.terms.len()
    }

    pub fn dim(&self) -> usize {
        self.terms[0].modes[0].nrows()
    }

    pub fn tail(&self) -> f64 {
        self.terms.iter().map(|t| t.tail).fold(0.0, f64::max)
    }

    /// max_m ‖H_{γ,-m} - H_{γm}†‖
    pub fn hermitian_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for t in &self.terms {
            for m in 0..=self.m_max as i64 {
                let d = t.mode(-m).unwrap() - t.mode(m).unwrap().adjoint();
                worst = worst.max(d.norm());
            }
        }
        worst
    }
}

/// Angular frequency implied by the Hamiltonian's common period.
pub fn natural_omega(h: &Hamiltonian) -> Result<f64> {
    match h.periodicity() {
        Periodicity::Period(p) => Ok(2.0 * PI / p),
        Periodicity::Constant => Err(Error::invalid("static Hamiltonian has no natural frequency")),
        Periodicity::Aperiodic => {
            Err(Error::invalid("Hamiltonian is not periodic; extrapolate it to a periodic one first"))
        }
    }
}

/// Trapezoidal Fourier coefficients H_m = (1/T) ∫_0^T H(τ) e^{imωτ} dτ over `SAMPLES` points.
pub fn fourier_decompose(term: &OperatorCurve, omega: f64, m_max: usize) -> Result<FourierTerm> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::invalid(format!("frequency must be positive, got {omega}")));
    }
    if 2 * m_max >= SAMPLES {
        return Err(Error::invalid(format!("mode cutoff {m_max} exceeds the sample grid")));
    }
    let period = 2.0 * PI / omega;
    let start = term.eval_unchecked(0.0, 0);
    let end = term.eval_unchecked(period, 0);
    let mismatch = (&start - &end).norm();
    if mismatch > PERIODIC_TOL {
        return Err(Error::invalid(format!(
            "term is not {period}-periodic: endpoint mismatch {mismatch:e}"
        )));
    }
    let d = term.dim();
    let samples: Vec<OperatorMatrix> = (0..SAMPLES)
        .into_par_iter()
        .map(|s| term.eval_unchecked(period * s as f64 / SAMPLES as f64, 0))
        .collect();
    // e^{imωτ_s} = e^{2πi ms/S}: the unnormalized inverse transform
    let fft = FftPlanner::<f64>::new().plan_fft_inverse(SAMPLES);
    let mut modes = vec![linalg::zeros(d); 2 * m_max + 1];
    let mut buf = vec![C64::new(0.0, 0.0); SAMPLES];
    for i in 0..d {
        for j in 0..d {
            for (b, s) in buf.iter_mut().zip(&samples) {
                *b = s[(i, j)];
            }
            fft.process(&mut buf);
            for (k, mode) in modes.iter_mut().enumerate() {
                let m = k as i64 - m_max as i64;
                mode[(i, j)] = buf[m.rem_euclid(SAMPLES as i64) as usize] / SAMPLES as f64;
            }
        }
    }
    // FFT roundoff would otherwise leave spurious bands
    let scale = samples.iter().flat_map(|s| s.iter().map(|z| z.norm())).fold(0.0, f64::max);
    let floor = 64.0 * f64::EPSILON * scale;
    for mode in &mut modes {
        mode.apply(|z| {
            if z.norm() < floor {
                *z = C64::new(0.0, 0.0)
            }
        });
    }
    let tail = modes[0].norm().max(modes[2 * m_max].norm());
    Ok(FourierTerm { modes, tail })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FloquetSpace {
    #[serde(rename = "L")]
    pub l: usize,
    #[serde(rename = "L_keep")]
    pub l_keep: usize,
    pub d: usize,
}

impl FloquetSpace {
    pub fn new(l: usize, l_keep: usize, d: usize) -> Result<Self> {
        if l_keep > l {
            return Err(Error::invalid(format!("L_keep = {l_keep} exceeds L = {l}")));
        }
        if d == 0 {
            return Err(Error::invalid("base dimension must be positive"));
        }
        Ok(FloquetSpace { l, l_keep, d })
    }

    /// L_keep = L/2
    pub fn with_default_keep(l: usize, d: usize) -> Result<Self> {
        FloquetSpace::new(l, l / 2, d)
    }

    pub fn dim(&self) -> usize {
        (2 * self.l + 1) * self.d
    }

    fn offset(&self, l: i64) -> usize {
        debug_assert!(l.unsigned_abs() as usize <= self.l);
        (l + self.l as i64) as usize * self.d
    }

    /// Block ⟨l|op|l'⟩.
    pub fn block(&self, op: &OperatorMatrix, l: i64, lp: i64) -> OperatorMatrix {
        op.view((self.offset(l), self.offset(lp)), (self.d, self.d)).into_owned()
    }

    fn indices(&self) -> impl Iterator<Item = i64> {
        let l = self.l as i64;
        -l..=l
    }

    /// Diagonal of H_LP: lω on block l.
    pub fn lp_diagonal(&self, omega: f64) -> Vec<f64> {
        self.indices().flat_map(|l| std::iter::repeat(l as f64 * omega).take(self.d)).collect()
    }
}

#[derive(Clone, Debug)]
pub struct FloquetOperators {
    pub space: FloquetSpace,
    pub omega: f64,
    pub h_f: OperatorMatrix,
    pub h_f_gamma: Vec<OperatorMatrix>,
    pub h_add: Vec<OperatorMatrix>,
    pub h_lp: OperatorMatrix,
    lp_diag: Vec<f64>,
}

impl FloquetOperators {
    /// exp(-i s H_LP), exact on the diagonal.
    pub fn lp_exp(&self, s: f64) -> OperatorMatrix {
        diag_phase(&self.lp_diag, -s)
    }

    pub fn evolution(&self, t: f64) -> OperatorMatrix {
        lifted_exp(&self.h_f, t)
    }
}

fn diag_phase(diag: &[f64], s: f64) -> OperatorMatrix {
    let v: Vec<C64> = diag.iter().map(|&x| C64::from_polar(1.0, s * x)).collect();
    OperatorMatrix::from_diagonal(&nalgebra::DVector::from_vec(v))
}

/// exp(-i s A)
fn lifted_exp(a: &OperatorMatrix, s: f64) -> OperatorMatrix {
    if s == 0.0 {
        return linalg::identity(a.nrows());
    }
    linalg::expm(&(a * C64::new(0.0, -s)))
}

/// H^Add_γ = Σ_m Add_m ⊗ H_{γm}
fn add_operator(term: &FourierTerm, space: &FloquetSpace) -> OperatorMatrix {
    let mut out = linalg::zeros(space.dim());
    let big = space.l as i64;
    let m_max = term.m_max() as i64;
    for m in -m_max..=m_max {
        let hm = term.mode(m).unwrap();
        if hm.iter().all(|z| *z == C64::new(0.0, 0.0)) {
            continue;
        }
        for l in space.indices() {
            let to = l + m;
            if to.abs() > big {
                continue;
            }
            let (r, c) = (space.offset(to), space.offset(l));
            out.view_mut((r, c), (space.d, space.d)).copy_from(hm);
        }
    }
    out
}

pub fn build_floquet_operators(fh: &FourierHamiltonian, space: FloquetSpace) -> Result<FloquetOperators> {
    if fh.m_max > 2 * space.l {
        return Err(Error::invalid(format!("mode cutoff M = {} exceeds 2L = {}", fh.m_max, 2 * space.l)));
    }
    if fh.dim() != space.d {
        return Err(Error::DimensionMismatch(fh.dim(), space.d));
    }
    let lp_diag = space.lp_diagonal(fh.omega);
    let h_lp = OperatorMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        lp_diag.len(),
        lp_diag.iter().map(|&x| C64::new(x, 0.0)),
    ));
    let h_add: Vec<OperatorMatrix> = fh.terms.par_iter().map(|t| add_operator(t, &space)).collect();
    let h_f_gamma: Vec<OperatorMatrix> = h_add.iter().map(|a| a - &h_lp).collect();
    let mut h_f = -&h_lp;
    for a in &h_add {
        h_f += a;
    }
    Ok(FloquetOperators { space, omega: fh.omega, h_f, h_f_gamma, h_add, h_lp, lp_diag })
}

fn check_plan(plan: &StagePlan, ops: &FloquetOperators, family: Family) -> Result<()> {
    if plan.family != family {
        return Err(Error::invalid(format!("expected a {family:?} plan, got {:?}", plan.family)));
    }
    if plan.gamma != ops.h_add.len() {
        return Err(Error::DimensionMismatch(plan.gamma, ops.h_add.len()));
    }
    Ok(())
}

/// T^F(t) = e^{-iH^F_{γ_K}α_K t} Π←_{k<K} (e^{-iH_LP(β_k+α_k-β_{k+1})t} e^{-iH^F_{γ_k}α_k t})
pub fn build_tf(plan: &StagePlan, ops: &FloquetOperators, t: f64) -> Result<OperatorMatrix> {
    check_plan(plan, ops, Family::ExactSegment)?;
    let st = &plan.stages;
    let lp_time: f64 = st.windows(2).map(|w| w[0].beta + w[0].alpha - w[1].beta).sum();
    let expected = plan.gamma as f64 - 1.0;
    if (lp_time - expected).abs() > 1e-14 * plan.k() as f64 {
        return Err(Error::invalid(format!("total H_LP time {lp_time} differs from Γ-1 = {expected}")));
    }
    let mut out = linalg::identity(ops.space.dim());
    for (k, s) in st.iter().enumerate() {
        out = lifted_exp(&ops.h_f_gamma[s.gamma], s.alpha * t) * out;
        if let Some(next) = st.get(k + 1) {
            let dt = s.beta + s.alpha - next.beta;
            if dt != 0.0 {
                out = ops.lp_exp(dt * t) * out;
            }
        }
    }
    Ok(out)
}

/// T̄^F(t) = e^{iH_LP(1-β_K)t} Π←_k (e^{-iH^Add_{γ_k}α_k t} e^{iH_LP(β_k-β_{k-1})t}), β_0 = 0.
pub fn build_tf_instantaneous(plan: &StagePlan, ops: &FloquetOperators, t: f64) -> Result<OperatorMatrix> {
    check_plan(plan, ops, Family::Instantaneous)?;
    let mut out = linalg::identity(ops.space.dim());
    let mut prev = 0.0;
    for s in &plan.stages {
        if s.beta != prev {
            out = ops.lp_exp(-(s.beta - prev) * t) * out;
        }
        out = lifted_exp(&ops.h_add[s.gamma], s.alpha * t) * out;
        prev = s.beta;
    }
    if prev != 1.0 {
        out = ops.lp_exp(-(1.0 - prev) * t) * out;
    }
    Ok(out)
}

/// Time-independent Suzuki formula of H^F = H^F_1 + H_LP + H^F_2 + ... + H_LP + H^F_Γ.
pub fn lifted_suzuki(p: usize, ops: &FloquetOperators, t: f64) -> Result<OperatorMatrix> {
    let gamma = ops.h_f_gamma.len();
    let parts = 2 * gamma - 1;
    let plan = suzuki_plan(p, parts, Family::ExactSegment)?;
    let mut out = linalg::identity(ops.space.dim());
    for s in &plan.stages {
        let f = if s.gamma % 2 == 0 {
            lifted_exp(&ops.h_f_gamma[s.gamma / 2], s.alpha * t)
        } else {
            ops.lp_exp(s.alpha * t)
        };
        out = f * out;
    }
    Ok(out)
}

/// Σ_{|l| ≤ L_keep} e^{-ilωt} ⟨l|op|0⟩
pub fn reconstruct(op: &OperatorMatrix, space: &FloquetSpace, omega: f64, t: f64) -> OperatorMatrix {
    let keep = space.l_keep as i64;
    let mut out = linalg::zeros(space.d);
    for l in -keep..=keep {
        out += space.block(op, l, 0) * C64::from_polar(1.0, -(l as f64) * omega * t);
    }
    out
}

/// max ‖⟨l|op|l'⟩ - e^{il''ωt}⟨l-l''|op|l'-l''⟩‖ over interior indices.
pub fn check_translation_symmetry(op: &OperatorMatrix, space: &FloquetSpace, omega: f64, t: f64) -> f64 {
    let keep = space.l_keep as i64;
    let inside = |x: i64| x.abs() <= keep;
    let mut triples = Vec::new();
    for l in -keep..=keep {
        for lp in -keep..=keep {
            for s in -keep..=keep {
                if s != 0 && inside(l - s) && inside(lp - s) {
                    triples.push((l, lp, s));
                }
            }
        }
    }
    triples
        .par_iter()
        .map(|&(l, lp, s)| {
            let a = space.block(op, l, lp);
            let b = space.block(op, l - s, lp - s) * C64::from_polar(1.0, s as f64 * omega * t);
            linalg::norm(&(a - b))
        })
        .reduce(|| 0.0, f64::max)
}

/// max(‖⟨l|op|0⟩‖, ‖⟨-l|op|0⟩‖) for l = 0..=L_keep.
pub fn amplitude_profile(op: &OperatorMatrix, space: &FloquetSpace) -> Vec<f64> {
    (0..=space.l_keep as i64)
        .map(|l| linalg::norm(&space.block(op, l, 0)).max(linalg::norm(&space.block(op, -l, 0))))
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct FloquetRow {
    #[serde(rename = "L")]
    pub l: usize,
    #[serde(rename = "L_keep")]
    pub l_keep: usize,
    /// reconstruct(e^{-iH^F t}) vs U(t,0)
    pub evolution_dev: f64,
    /// reconstruct(T^F) vs S(t,0), max over p ∈ {1,2}
    pub pf_dev: f64,
    /// reconstruct(lifted Suzuki) vs S_p(t,0), max over p ∈ {1,2}
    pub suzuki_dev: f64,
    /// reconstruct(e^{-iH^F t} - T^F) vs U - S
    pub error_identity_dev: f64,
    /// translation symmetry of e^{-iH^F t} and T^F
    pub symmetry_dev: f64,
    /// reconstruct(T̄^F) vs instantaneous S̄(t,0), max over p ∈ {1,2}
    pub instantaneous_dev: f64,
}

impl FloquetRow {
    pub fn worst(&self) -> f64 {
        [
            self.evolution_dev,
            self.pf_dev,
            self.suzuki_dev,
            self.error_identity_dev,
            self.symmetry_dev,
            self.instantaneous_dev,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

pub const SWEEP_ORDERS: [usize; 2] = [1, 2];

/// One row per L, L_keep = L/2. Reference propagators come from the time-domain code.
pub fn floquet_sweep(h: &Hamiltonian, ls: &[usize], t: f64, m_max: usize, tol: f64) -> Result<Vec<FloquetRow>> {
    let omega = natural_omega(h)?;
    let fh = FourierHamiltonian::from_hamiltonian(h, omega, m_max)?;
    let u = oracle::evolve_hamiltonian(h, 0.0, t, tol)?;
    let mut refs = Vec::new();
    for p in SWEEP_ORDERS {
        let exact = suzuki_plan(p, h.gamma(), Family::ExactSegment)?;
        let inst = suzuki_plan(p, h.gamma(), Family::Instantaneous)?;
        let s = evaluate_pf(&exact, h, t, 0.0, tol)?;
        let sbar = evaluate_pf(&inst, h, t, 0.0, tol)?;
        refs.push((p, exact, inst, s, sbar));
    }
    ls.par_iter()
        .map(|&l| {
            let space = FloquetSpace::with_default_keep(l, h.dim())?;
            let mut fh_l = fh.clone();
            if fh_l.m_max > 2 * l {
                fh_l = truncate_modes(&fh, 2 * l);
            }
            let ops = build_floquet_operators(&fh_l, space)?;
            let uf = ops.evolution(t);
            let rec = |op: &OperatorMatrix| reconstruct(op, &space, omega, t);
            let evolution_dev = linalg::norm(&(rec(&uf) - &u));
            let mut symmetry_dev = check_translation_symmetry(&uf, &space, omega, t);
            let (mut pf_dev, mut suzuki_dev, mut error_identity_dev, mut instantaneous_dev) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
            for (p, exact, inst, s, sbar) in &refs {
                let tf = build_tf(exact, &ops, t)?;
                pf_dev = pf_dev.max(linalg::norm(&(rec(&tf) - s)));
                suzuki_dev = suzuki_dev.max(linalg::norm(&(rec(&lifted_suzuki(*p, &ops, t)?) - s)));
                let lhs = rec(&(&uf - &tf));
                error_identity_dev = error_identity_dev.max(linalg::norm(&(lhs - (&u - s))));
                symmetry_dev = symmetry_dev.max(check_translation_symmetry(&tf, &space, omega, t));
                let tbar = build_tf_instantaneous(inst, &ops, t)?;
                instantaneous_dev = instantaneous_dev.max(linalg::norm(&(rec(&tbar) - sbar)));
            }
            Ok(FloquetRow {
                l,
                l_keep: space.l_keep,
                evolution_dev,
                pf_dev,
                suzuki_dev,
                error_identity_dev,
                symmetry_dev,
                instantaneous_dev,
            })
        })
        .collect()
}

fn truncate_modes(fh: &FourierHamiltonian, m_max: usize) -> FourierHamiltonian {
    let cut = fh.m_max - m_max;
    let terms = fh
        .terms
        .iter()
        .map(|t| {
            let modes = t.modes[cut..t.modes.len() - cut].to_vec();
            let tail = modes[0].norm().max(modes[modes.len() - 1].norm());
            FourierTerm { modes, tail }
        })
        .collect();
    FourierHamiltonian { omega: fh.omega, m_max, terms }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Pauli;
    use crate::models;

    const TOL: f64 = 1e-13;

    #[test]
    fn constant_and_cosine_modes() {
        let h = models::cosine_drive(1, 2.0, 4).unwrap();
        let fh = FourierHamiltonian::from_hamiltonian(&h, 2.0, 3).unwrap();
        let c = &fh.terms[0];
        assert!((c.mode(0).unwrap() - Pauli::Z.matrix() * C64::new(0.6, 0.0)).norm() < 1e-12);
        for m in [-3, -2, -1, 1, 2, 3] {
            assert!(c.mode(m).unwrap().norm() <= 1e-12);
        }
        let d = &fh.terms[1];
        for m in [-1, 1] {
            assert!((d.mode(m).unwrap() - Pauli::X.matrix() * C64::new(0.4, 0.0)).norm() < 1e-12);
        }
        for m in [-3, -2, 0, 2, 3] {
            assert!(d.mode(m).unwrap().norm() <= 1e-12);
        }
        assert!(fh.hermitian_defect() <= 1e-12);
        for tau in [0.0, 0.7, 2.9] {
            assert!((d.eval(2.0, tau) - h.term(1).eval(tau, 0).unwrap()).norm() < 1e-12);
        }
    }

    #[test]
    fn aperiodic_input_is_rejected() {
        let h = models::cosine_drive(1, 2.0, 4).unwrap();
        assert!(fourier_decompose(h.term(1), 1.7, 2).is_err());
    }

    #[test]
    fn decomposition_identity_and_bands() {
        let h = models::cosine_drive(2, 2.0, 4).unwrap();
        let fh = FourierHamiltonian::from_hamiltonian(&h, 2.0, 1).unwrap();
        let space = FloquetSpace::with_default_keep(8, 4).unwrap();
        let ops = build_floquet_operators(&fh, space).unwrap();
        assert_eq!(ops.h_f.nrows(), 17 * 4);
        let mut sum = &ops.h_lp * C64::new(fh.gamma() as f64 - 1.0, 0.0);
        for g in &ops.h_f_gamma {
            sum += g;
        }
        assert_eq!((&ops.h_f - sum).norm(), 0.0);
        let drive = &ops.h_add[1];
        for l in -8i64..=8 {
            for lp in -8i64..=8 {
                let nonzero = space.block(drive, l, lp).norm() > 0.0;
                assert_eq!(nonzero, (l - lp).abs() == 1, "block ({l},{lp})");
            }
        }
        let small = FloquetSpace::with_default_keep(1, 4).unwrap();
        let fh3 = FourierHamiltonian::from_hamiltonian(&h, 2.0, 3).unwrap();
        assert!(build_floquet_operators(&fh3, small).is_err());
    }

    #[test]
    fn static_hamiltonian_is_block_diagonal() {
        let h = models::static_xz(0.7, 1.1, 2).unwrap();
        let omega = 1.5;
        let fh = FourierHamiltonian::from_hamiltonian(&h, omega, 2).unwrap();
        let space = FloquetSpace::with_default_keep(4, 2).unwrap();
        let ops = build_floquet_operators(&fh, space).unwrap();
        let t = 0.9;
        let uf = ops.evolution(t);
        let exact = linalg::exp_hermitian(&h.total(0.0, 0).unwrap(), t);
        assert!(linalg::norm(&(reconstruct(&uf, &space, omega, t) - &exact)) < 1e-12);
        assert!(check_translation_symmetry(&uf, &space, omega, t) < 1e-12);
        // H^F carries -H_LP, so the symmetric propagator is e^{+iH_LP t}
        assert!(check_translation_symmetry(&ops.lp_exp(-t), &space, omega, t) <= 1e-15);
        let plan = suzuki_plan(1, 2, Family::ExactSegment).unwrap();
        let tf = build_tf(&plan, &ops, t).unwrap();
        for l in -2i64..=2 {
            let b = space.block(&tf, l, 0);
            if l != 0 {
                assert!(b.norm() < 1e-13);
            }
        }
        let s = evaluate_pf(&plan, &h, t, 0.0, TOL).unwrap();
        assert!(linalg::norm(&(reconstruct(&tf, &space, omega, t) - s)) < 1e-12);
    }

    #[test]
    fn second_order_plan_matches_palindrome() {
        let h = models::cosine_drive(1, 2.0, 4).unwrap();
        let fh = FourierHamiltonian::from_hamiltonian(&h, 2.0, 1).unwrap();
        let ops = build_floquet_operators(&fh, FloquetSpace::with_default_keep(6, 2).unwrap()).unwrap();
        let t = 0.4;
        for p in [1, 2] {
            let plan = suzuki_plan(p, 2, Family::ExactSegment).unwrap();
            let a = build_tf(&plan, &ops, t).unwrap();
            let b = lifted_suzuki(p, &ops, t).unwrap();
            assert!(linalg::norm(&(a - b)) <= 1e-12, "p={p}");
        }
        let inst = suzuki_plan(2, 2, Family::Instantaneous).unwrap();
        assert!(build_tf(&inst, &ops, t).is_err());
    }

    #[test]
    fn truncation_sweep_converges() {
        let h = models::cosine_drive(1, 2.0, 4).unwrap();
        let rows = floquet_sweep(&h, &[4, 8, 16], 0.5, 2, 1e-13).unwrap();
        assert!(rows[2].worst() <= 1e-6, "{rows:?}");
        assert!(rows[0].worst() > rows[2].worst());
        let profile = {
            let fh = FourierHamiltonian::from_hamiltonian(&h, 2.0, 2).unwrap();
            let space = FloquetSpace::with_default_keep(16, 2).unwrap();
            let ops = build_floquet_operators(&fh, space).unwrap();
            amplitude_profile(&ops.evolution(0.5), &space)
        };
        assert!(profile[2..].windows(2).all(|w| w[1] <= w[0]), "{profile:?}");
    }
}
