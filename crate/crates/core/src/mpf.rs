//! Multi-product formulas N(t) = Σ_j c_j S_p(t/k_j)^{k_j}.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::Hamiltonian;
use crate::linalg::{self, OperatorMatrix, C64};
use crate::oracle;
use crate::product_formula::{suzuki_plan, trotterize, Family};

pub const MAX_J: usize = 8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MpfPlan {
    #[serde(rename = "J")]
    pub j: usize,
    pub k: Vec<usize>,
    pub c: Vec<f64>,
    pub p: usize,
    pub c_norm: f64,
    pub k_norm: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KStrategy {
    Sequential,
    /// Sequential k, with the conditioning numbers surfaced on the plan.
    ReportConditioning,
}

/// Solves Σ_j c_j k_j^{-2m} = δ_{m0}, m = 0..J-1, by Gaussian elimination with partial pivoting.
pub fn solve_coefficients(k: &[usize]) -> Result<Vec<f64>> {
    let j = k.len();
    if j == 0 || j > MAX_J {
        return Err(Error::invalid(format!("need 1..={MAX_J} refinements, got {j}")));
    }
    if k.iter().any(|&x| x == 0) {
        return Err(Error::invalid("refinements must be positive"));
    }
    let mut sorted = k.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::invalid("refinements must be distinct"));
    }
    let mut a: Vec<Vec<f64>> =
        (0..j).map(|m| k.iter().map(|&kj| (kj as f64).powi(-2 * m as i32)).collect()).collect();
    let mut b = vec![0.0; j];
    b[0] = 1.0;
    for col in 0..j {
        let piv = (col..j).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs())).unwrap();
        if a[piv][col] == 0.0 {
            return Err(Error::invalid("singular refinement system"));
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..j {
            let f = a[row][col] / a[col][col];
            for c in col..j {
                a[row][c] -= f * a[col][c];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; j];
    for row in (0..j).rev() {
        let s: f64 = (row + 1..j).map(|c| a[row][c] * x[c]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Ok(x)
}

/// max_m |Σ_j c_j k_j^{-2m} - δ_{m0}|
pub fn moment_residual(k: &[usize], c: &[f64]) -> f64 {
    (0..k.len())
        .map(|m| {
            let s: f64 = k.iter().zip(c).map(|(&kj, &cj)| cj * (kj as f64).powi(-2 * m as i32)).sum();
            (s - if m == 0 { 1.0 } else { 0.0 }).abs()
        })
        .fold(0.0, f64::max)
}

pub fn choose_k(j: usize, _strategy: KStrategy) -> Result<Vec<usize>> {
    if j == 0 {
        return Err(Error::invalid("J must be at least 1"));
    }
    Ok((1..=j).collect())
}

impl MpfPlan {
    pub fn new(k: Vec<usize>, p: usize) -> Result<Self> {
        if p == 0 || p % 2 == 1 {
            return Err(Error::invalid(format!("MPF base order must be even, got {p}")));
        }
        let c = solve_coefficients(&k)?;
        let c_norm = c.iter().map(|x| x.abs()).sum();
        let k_norm = k.iter().sum::<usize>() as f64;
        Ok(MpfPlan { j: k.len(), k, c, p, c_norm, k_norm })
    }

    pub fn sequential(j: usize, p: usize) -> Result<Self> {
        MpfPlan::new(choose_k(j, KStrategy::Sequential)?, p)
    }
}

/// Σ_j c_j Π←_{r<k_j} S_p((r+1)t/k_j, rt/k_j)
pub fn evaluate_mpf(plan: &MpfPlan, h: &Hamiltonian, t: f64, tol: f64) -> Result<OperatorMatrix> {
    let base = suzuki_plan(plan.p, h.gamma(), Family::ExactSegment)?;
    let parts = plan
        .k
        .par_iter()
        .map(|&kj| trotterize(&base, h, t, kj, tol))
        .collect::<Result<Vec<_>>>()?;
    let mut n = linalg::zeros(h.dim());
    for (m, &c) in parts.iter().zip(&plan.c) {
        n += m * C64::new(c, 0.0);
    }
    Ok(n)
}

pub fn measure_mpf_error(plan: &MpfPlan, h: &Hamiltonian, t: f64, tol: f64) -> Result<f64> {
    let u = oracle::evolve_hamiltonian(h, 0.0, t, tol)?;
    Ok(linalg::norm(&(u - evaluate_mpf(plan, h, t, tol)?)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models;
    use crate::product_formula::evaluate_pf;

    const TOL: f64 = 1e-13;

    #[test]
    fn small_systems() {
        assert_eq!(solve_coefficients(&[1]).unwrap(), vec![1.0]);
        let c = solve_coefficients(&[1, 2]).unwrap();
        assert!((c[0] + 1.0 / 3.0).abs() < 1e-14 && (c[1] - 4.0 / 3.0).abs() < 1e-14);
        assert!(moment_residual(&[1, 2, 3], &solve_coefficients(&[1, 2, 3]).unwrap()) <= 1e-12);
        assert!(solve_coefficients(&[2, 2]).is_err());
    }

    #[test]
    fn residuals_up_to_cap() {
        for j in 1..=MAX_J {
            let plan = MpfPlan::sequential(j, 2).unwrap();
            assert!(moment_residual(&plan.k, &plan.c) <= 1e-12, "J={j}");
            assert!(plan.c_norm.is_finite());
        }
        let p2 = MpfPlan::sequential(2, 2).unwrap();
        assert_eq!(p2.k_norm, 3.0);
        assert!((p2.c_norm - 5.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn single_refinement_is_the_base_formula() {
        let h = models::driven_chain(2, 6).unwrap();
        let plan = MpfPlan::sequential(1, 2).unwrap();
        let base = suzuki_plan(2, 2, Family::ExactSegment).unwrap();
        let a = evaluate_mpf(&plan, &h, 0.2, TOL).unwrap();
        let b = evaluate_pf(&base, &h, 0.2, 0.0, TOL).unwrap();
        assert!(linalg::norm(&(a - b)) <= 1e-15);
    }

    #[test]
    fn commuting_terms_are_exact() {
        let h = models::commuting_pair(6).unwrap();
        let plan = MpfPlan::sequential(3, 2).unwrap();
        let bound: f64 = plan.c.iter().zip(&plan.k).map(|(c, &k)| c.abs() * k as f64).sum::<f64>() * 10.0 * TOL;
        assert!(measure_mpf_error(&plan, &h, 0.6, TOL).unwrap() <= bound);
    }

    #[test]
    fn extrapolation_helps_and_stays_near_unitary() {
        let h = models::driven_chain(2, 6).unwrap();
        let t = 0.05;
        let e1 = measure_mpf_error(&MpfPlan::sequential(1, 2).unwrap(), &h, t, TOL).unwrap();
        let p2 = MpfPlan::sequential(2, 2).unwrap();
        let e2 = measure_mpf_error(&p2, &h, t, TOL).unwrap();
        assert!(e2 < e1);
        let n = evaluate_mpf(&p2, &h, t, TOL).unwrap();
        let d = linalg::norm(&(n.adjoint() * &n - linalg::identity(4)));
        assert!(d <= 2.0 * e2 + e2 * e2 + 1e-12);
        assert_eq!(measure_mpf_error(&p2, &h, 0.0, TOL).unwrap(), 0.0);
    }
}
