//! Stage plans for Lie–Suzuki–Trotter formulas and their evaluation.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit::{self, LineFit};
use crate::hamiltonian::Hamiltonian;
use crate::linalg::{self, OperatorMatrix, C64};
use crate::oracle;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// Factors are exact evolutions of single terms over time segments.
    ExactSegment,
    /// Factors are exponentials of single terms frozen at one instant.
    Instantaneous,
}

/// Stage k applies the γ-th term (zero-based) for duration α·Δ starting at β·Δ.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Stage {
    pub gamma: usize,
    pub alpha: f64,
    pub beta: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StagePlan {
    /// In application order: stage 0 acts first.
    pub stages: Vec<Stage>,
    pub order: usize,
    pub gamma: usize,
    pub family: Family,
}

/// a_q = (4 - 4^{1/(2q-1)})^{-1}
pub fn suzuki_a(q: usize) -> f64 {
    1.0 / (4.0 - 4f64.powf(1.0 / (2 * q - 1) as f64))
}

/// b_q = 4 a_q - 1
pub fn suzuki_b(q: usize) -> f64 {
    4.0 * suzuki_a(q) - 1.0
}

const CLAMP: f64 = 1e-14;

impl StagePlan {
    pub fn k(&self) -> usize {
        self.stages.len()
    }

    /// Layers V = K / Γ.
    pub fn layers(&self) -> usize {
        self.stages.len() / self.gamma
    }

    /// Σ_{k: γ_k = γ} α_k for each γ.
    pub fn alpha_sums(&self) -> Vec<f64> {
        let mut s = vec![0.0; self.gamma];
        for st in &self.stages {
            s[st.gamma] += st.alpha;
        }
        s
    }

    /// Reversed stage list with each segment inverted.
    pub fn reversed(&self) -> StagePlan {
        let stages = self
            .stages
            .iter()
            .rev()
            .map(|s| match self.family {
                Family::ExactSegment => Stage { gamma: s.gamma, alpha: -s.alpha, beta: s.beta + s.alpha },
                Family::Instantaneous => Stage { gamma: s.gamma, alpha: -s.alpha, beta: s.beta },
            })
            .collect();
        StagePlan { stages, ..self.clone() }
    }

    fn validate(&self) -> Result<()> {
        if self.gamma == 0 || self.stages.len() % self.gamma != 0 {
            return Err(Error::invalid("stage count must be a multiple of Γ"));
        }
        for (g, s) in self.alpha_sums().iter().enumerate() {
            if (s - 1.0).abs() > 1e-12 {
                return Err(Error::invalid(format!("α sum for term {} is {s}", g + 1)));
            }
        }
        if self.family == Family::ExactSegment {
            let first = self.stages[0];
            let last = self.stages[self.stages.len() - 1];
            if first.beta != 0.0 || (last.beta + last.alpha - 1.0).abs() > CLAMP {
                return Err(Error::invalid("segments must start at 0 and end at 1"));
            }
            for s in &self.stages {
                for x in [s.beta, s.beta + s.alpha] {
                    if !(-CLAMP..=1.0 + CLAMP).contains(&x) {
                        return Err(Error::invalid(format!("segment boundary {x} outside [0,1]")));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Order-p Lie–Suzuki–Trotter plan (p = 1 or even).
pub fn suzuki_plan(p: usize, gamma: usize, family: Family) -> Result<StagePlan> {
    if p == 0 || (p > 1 && p % 2 == 1) {
        return Err(Error::invalid(format!("order must be 1 or even, got {p}")));
    }
    if gamma == 0 {
        return Err(Error::invalid("Γ must be positive"));
    }
    let mut stages = Vec::new();
    build(p, gamma, family, 0.0, 1.0, &mut stages);
    for s in &mut stages {
        s.beta = clamp_unit(s.beta);
        if family == Family::ExactSegment {
            s.alpha = clamp_unit(s.beta + s.alpha) - s.beta;
        }
    }
    let plan = StagePlan { stages, order: p, gamma, family };
    plan.validate()?;
    Ok(plan)
}

fn clamp_unit(x: f64) -> f64 {
    if x.abs() <= CLAMP {
        0.0
    } else if (x - 1.0).abs() <= CLAMP {
        1.0
    } else {
        x
    }
}

/// Appends the stages of S_p on the signed window [start, start + len].
fn build(p: usize, gamma: usize, family: Family, start: f64, len: f64, out: &mut Vec<Stage>) {
    match p {
        1 => {
            let beta = match family {
                Family::ExactSegment => start,
                Family::Instantaneous => start + len,
            };
            out.extend((0..gamma).map(|g| Stage { gamma: g, alpha: len, beta }));
        }
        2 => {
            let half = 0.5 * len;
            let (b1, b2) = match family {
                Family::ExactSegment => (start, start + half),
                Family::Instantaneous => (start + half, start + half),
            };
            out.extend((0..gamma).map(|g| Stage { gamma: g, alpha: half, beta: b1 }));
            out.extend((0..gamma).rev().map(|g| Stage { gamma: g, alpha: half, beta: b2 }));
        }
        _ => {
            let a = suzuki_a(p / 2);
            let bounds = [0.0, a, 2.0 * a, 1.0 - 2.0 * a, 1.0 - a, 1.0];
            for w in bounds.windows(2) {
                build(p - 2, gamma, family, start + w[0] * len, (w[1] - w[0]) * len, out);
            }
        }
    }
}

/// Π←_k M_k where M_k is the stage-k factor on [t0, t].
pub fn evaluate_pf(plan: &StagePlan, h: &Hamiltonian, t: f64, t0: f64, tol: f64) -> Result<OperatorMatrix> {
    if plan.gamma != h.gamma() {
        return Err(Error::invalid(format!("plan has Γ={} but the Hamiltonian has Γ={}", plan.gamma, h.gamma())));
    }
    let d = t - t0;
    let mut s = linalg::identity(h.dim());
    for st in &plan.stages {
        let term = h.term(st.gamma);
        if term.is_zero() || st.alpha == 0.0 {
            continue;
        }
        let m = match plan.family {
            Family::ExactSegment => {
                let a = t0 + st.beta * d;
                oracle::evolve(term, a, a + st.alpha * d, tol)?
            }
            Family::Instantaneous => {
                let g = term.eval_unchecked(t0 + st.beta * d, 0);
                linalg::expm(&(g * C64::new(0.0, -st.alpha * d)))
            }
        };
        s = m * s;
    }
    Ok(s)
}

/// Π←_{j<r} S((j+1)t/r, jt/r)
pub fn trotterize(plan: &StagePlan, h: &Hamiltonian, t: f64, r: usize, tol: f64) -> Result<OperatorMatrix> {
    if r == 0 {
        return Err(Error::invalid("r must be at least 1"));
    }
    let mut u = linalg::identity(h.dim());
    for j in 0..r {
        let a = j as f64 * t / r as f64;
        let b = (j + 1) as f64 * t / r as f64;
        u = evaluate_pf(plan, h, b, a, tol)? * u;
    }
    Ok(u)
}

/// ‖U(t,0) - S(t,0)‖
pub fn measure_error(plan: &StagePlan, h: &Hamiltonian, t: f64, tol: f64) -> Result<f64> {
    let u = oracle::evolve_hamiltonian(h, 0.0, t, tol)?;
    let s = evaluate_pf(plan, h, t, 0.0, tol)?;
    Ok(linalg::norm(&(u - s)))
}

/// Errors over a grid, in grid order.
pub fn error_scan(plan: &StagePlan, h: &Hamiltonian, ts: &[f64], tol: f64) -> Result<Vec<f64>> {
    ts.par_iter().map(|&t| measure_error(plan, h, t, tol)).collect()
}

pub fn fit_order(ts: &[f64], errors: &[f64], tol: f64) -> Result<LineFit> {
    fit::fit_order(ts, errors, tol)
}
