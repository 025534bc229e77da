//! Dense complex matrices: products, commutators, Pauli embedding, exponentials, norms.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type OperatorMatrix = DMatrix<C64>;

pub const DEFAULT_DIM_CAP: usize = 1 << 12;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const XYZ: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

    pub fn matrix(self) -> OperatorMatrix {
        let m = |a: [C64; 4]| OperatorMatrix::from_row_slice(2, 2, &a);
        match self {
            Pauli::I => m([ONE, ZERO, ZERO, ONE]),
            Pauli::X => m([ZERO, ONE, ONE, ZERO]),
            Pauli::Y => m([ZERO, -I, I, ZERO]),
            Pauli::Z => m([ONE, ZERO, ZERO, -ONE]),
        }
    }

    /// (x, z) bits in the X^x Z^z convention; Y carries an extra factor i.
    pub(crate) fn xz(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Pauli::I => "I",
            Pauli::X => "X",
            Pauli::Y => "Y",
            Pauli::Z => "Z",
        };
        f.write_str(s)
    }
}

impl FromStr for Pauli {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "I" => Ok(Pauli::I),
            "X" => Ok(Pauli::X),
            "Y" => Ok(Pauli::Y),
            "Z" => Ok(Pauli::Z),
            other => Err(Error::invalid(format!("unknown pauli label {other:?}"))),
        }
    }
}

pub fn identity(dim: usize) -> OperatorMatrix {
    OperatorMatrix::identity(dim, dim)
}

pub fn zeros(dim: usize) -> OperatorMatrix {
    OperatorMatrix::zeros(dim, dim)
}

fn check_finite(a: &OperatorMatrix) -> Result<()> {
    if a.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::invalid("matrix has non-finite entries"))
    }
}

fn check_square(a: &OperatorMatrix) -> Result<()> {
    if a.nrows() == a.ncols() {
        Ok(())
    } else {
        Err(Error::DimensionMismatch(a.nrows(), a.ncols()))
    }
}

/// Site `s` of an `n`-qubit register maps to bit `n-1-s`, so site 0 is the leftmost tensor factor.
pub fn embed_pauli_string(sites: &[(usize, Pauli)], n: usize) -> Result<OperatorMatrix> {
    embed_pauli_string_capped(sites, n, DEFAULT_DIM_CAP)
}

pub fn embed_pauli_string_capped(
    sites: &[(usize, Pauli)],
    n: usize,
    cap: usize,
) -> Result<OperatorMatrix> {
    if n >= usize::BITS as usize - 1 || (1usize << n) > cap {
        return Err(Error::DimensionCap { dim: 1usize.checked_shl(n as u32).unwrap_or(usize::MAX), cap });
    }
    let mut seen = vec![false; n];
    let (mut xmask, mut zmask, mut ny) = (0usize, 0usize, 0u32);
    for &(s, p) in sites {
        if s >= n {
            return Err(Error::invalid(format!("site {s} out of range for N={n}")));
        }
        if seen[s] {
            return Err(Error::invalid(format!("duplicate site {s}")));
        }
        seen[s] = true;
        let bit = 1usize << (n - 1 - s);
        let (x, z) = p.xz();
        if x {
            xmask |= bit;
        }
        if z {
            zmask |= bit;
        }
        if p == Pauli::Y {
            ny += 1;
        }
    }
    let dim = 1usize << n;
    let phase = I.powu(ny);
    let mut m = zeros(dim);
    // X^x Z^z |j> = (-1)^{|z & j|} |j ^ x>
    for j in 0..dim {
        let sign = if (zmask & j).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
        m[(j ^ xmask, j)] = phase * sign;
    }
    Ok(m)
}

pub fn kron(a: &OperatorMatrix, b: &OperatorMatrix) -> OperatorMatrix {
    a.kronecker(b)
}

pub fn commutator(a: &OperatorMatrix, b: &OperatorMatrix) -> Result<OperatorMatrix> {
    check_square(a)?;
    check_square(b)?;
    if a.nrows() != b.nrows() {
        return Err(Error::DimensionMismatch(a.nrows(), b.nrows()));
    }
    Ok(comm(a, b))
}

pub(crate) fn comm(a: &OperatorMatrix, b: &OperatorMatrix) -> OperatorMatrix {
    a * b - b * a
}

fn max_abs(a: &OperatorMatrix) -> f64 {
    a.iter().fold(0.0f64, |m, z| m.max(z.norm()))
}

/// Largest |a_ij - conj(a_ji)| relative to the largest entry.
pub fn hermiticity_defect(a: &OperatorMatrix) -> f64 {
    let n = a.nrows();
    let scale = max_abs(a).max(f64::MIN_POSITIVE);
    let mut d = 0.0f64;
    for i in 0..n {
        for j in i..n {
            d = d.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    d / scale
}

fn anti_hermiticity_defect(a: &OperatorMatrix) -> f64 {
    let n = a.nrows();
    let scale = max_abs(a).max(f64::MIN_POSITIVE);
    let mut d = 0.0f64;
    for i in 0..n {
        for j in i..n {
            d = d.max((a[(i, j)] + a[(j, i)].conj()).norm());
        }
    }
    d / scale
}

const STRUCTURE_TOL: f64 = 1e-13;

pub fn is_hermitian(a: &OperatorMatrix) -> bool {
    a.nrows() == a.ncols() && hermiticity_defect(a) <= STRUCTURE_TOL
}

fn symmetrize(a: &OperatorMatrix) -> OperatorMatrix {
    (a + a.adjoint()) * C64::new(0.5, 0.0)
}

/// Largest singular value.
pub fn spectral_norm(a: &OperatorMatrix) -> Result<f64> {
    check_finite(a)?;
    Ok(norm(a))
}

pub(crate) fn norm(a: &OperatorMatrix) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    if max_abs(a) == 0.0 {
        return 0.0;
    }
    if a.nrows() > LANCZOS_DIM {
        return lanczos_norm(a);
    }
    if a.nrows() == a.ncols() {
        if hermiticity_defect(a) <= STRUCTURE_TOL {
            return max_abs_eigenvalue(&symmetrize(a));
        }
        if anti_hermiticity_defect(a) <= STRUCTURE_TOL {
            let h = a * I;
            return max_abs_eigenvalue(&symmetrize(&h));
        }
    }
    let g = a.adjoint() * a;
    max_abs_eigenvalue(&symmetrize(&g)).sqrt()
}

/// Dense norms above this dimension go through Lanczos on matrix-vector products.
const LANCZOS_DIM: usize = 64;

fn lanczos_norm(a: &OperatorMatrix) -> f64 {
    let dim = a.ncols();
    let mv = |m: &OperatorMatrix, v: &[C64], out: &mut [C64]| {
        for (j, vj) in v.iter().enumerate() {
            if *vj == ZERO {
                continue;
            }
            for (o, x) in out.iter_mut().zip(m.column(j).iter()) {
                *o += x * vj;
            }
        }
    };
    if a.nrows() == dim && hermiticity_defect(a) <= STRUCTURE_TOL {
        let (lo, hi) = lanczos_extremes(dim, |v, out| mv(a, v, out));
        return lo.abs().max(hi.abs());
    }
    if a.nrows() == dim && anti_hermiticity_defect(a) <= STRUCTURE_TOL {
        let h = a * I;
        let (lo, hi) = lanczos_extremes(dim, |v, out| mv(&h, v, out));
        return lo.abs().max(hi.abs());
    }
    let adj = a.adjoint();
    let mut w = vec![ZERO; a.nrows()];
    lanczos_extremes(dim, |v, out| {
        w.iter_mut().for_each(|x| *x = ZERO);
        mv(a, v, &mut w);
        mv(&adj, &w, out);
    })
    .1
    .max(0.0)
    .sqrt()
}

fn max_abs_eigenvalue(h: &OperatorMatrix) -> f64 {
    h.clone()
        .symmetric_eigenvalues()
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()))
}

/// Eigendecomposition of a Hermitian matrix, reusable for exp(-i s H) at many s.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: nalgebra::DVector<f64>,
    pub vectors: OperatorMatrix,
}

impl HermitianEigen {
    pub fn new(h: &OperatorMatrix) -> Self {
        let e = symmetrize(h).symmetric_eigen();
        HermitianEigen { values: e.eigenvalues, vectors: e.eigenvectors }
    }

    /// exp(-i s H)
    pub fn exp_i(&self, s: f64) -> OperatorMatrix {
        self.apply_diag(|l| C64::from_polar(1.0, -l * s))
    }

    /// exp(s H)
    pub fn exp_real(&self, s: f64) -> OperatorMatrix {
        self.apply_diag(|l| C64::new((l * s).exp(), 0.0))
    }

    fn apply_diag(&self, f: impl Fn(f64) -> C64) -> OperatorMatrix {
        let mut scaled = self.vectors.clone();
        for (j, &l) in self.values.iter().enumerate() {
            let d = f(l);
            for i in 0..scaled.nrows() {
                scaled[(i, j)] *= d;
            }
        }
        scaled * self.vectors.adjoint()
    }
}

/// exp(-i s H) for Hermitian H.
pub fn exp_hermitian(h: &OperatorMatrix, s: f64) -> OperatorMatrix {
    HermitianEigen::new(h).exp_i(s)
}

/// e^A. Small arguments and non-normal inputs use scaling and squaring with a degree-13 Pade
/// approximant; larger Hermitian and skew-Hermitian inputs go through an eigendecomposition.
pub fn matrix_exp(a: &OperatorMatrix) -> Result<OperatorMatrix> {
    check_square(a)?;
    check_finite(a)?;
    Ok(expm(a))
}

pub(crate) fn expm(a: &OperatorMatrix) -> OperatorMatrix {
    let n = a.nrows();
    if n == 0 {
        return a.clone();
    }
    if max_abs(a) == 0.0 {
        return identity(n);
    }
    // near the identity Pade keeps the absolute error at rounding level; the eigenbasis does not
    if one_norm(a) <= 1.0 {
        return expm_pade(a);
    }
    if anti_hermiticity_defect(a) <= STRUCTURE_TOL {
        // a = -i h with h = i a
        return exp_hermitian(&(a * I), 1.0);
    }
    if hermiticity_defect(a) <= STRUCTURE_TOL {
        return HermitianEigen::new(a).exp_real(1.0);
    }
    expm_pade(a)
}

fn one_norm(a: &OperatorMatrix) -> f64 {
    (0..a.ncols())
        .map(|j| a.column(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA13: f64 = 5.371920351148152;

fn expm_pade(a: &OperatorMatrix) -> OperatorMatrix {
    let n = a.nrows();
    let nrm = one_norm(a);
    let s = if nrm > THETA13 { (nrm / THETA13).log2().ceil() as i32 } else { 0 };
    let a = a * C64::new(0.5f64.powi(s), 0.0);
    let b = |k: usize| C64::new(PADE13[k], 0.0);
    let id = identity(n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let u_inner = &a6 * (&a6 * b(13) + &a4 * b(11) + &a2 * b(9))
        + &a6 * b(7)
        + &a4 * b(5)
        + &a2 * b(3)
        + &id * b(1);
    let u = &a * u_inner;
    let v = &a6 * (&a6 * b(12) + &a4 * b(10) + &a2 * b(8))
        + &a6 * b(6)
        + &a4 * b(4)
        + &a2 * b(2)
        + &id * b(0);
    let p = &v + &u;
    let q = &v - &u;
    let mut r = q.lu().solve(&p).unwrap_or_else(|| {
        // singular denominators do not occur after scaling; fall back to a Taylor sum
        taylor_exp(&a, 40)
    });
    for _ in 0..s {
        r = &r * &r;
    }
    r
}

/// Plain Taylor partial sum; used as a test oracle and a last-resort fallback.
pub fn taylor_exp(a: &OperatorMatrix, order: usize) -> OperatorMatrix {
    let n = a.nrows();
    let mut sum = identity(n);
    let mut term = identity(n);
    for k in 1..=order {
        term = &term * a * C64::new(1.0 / k as f64, 0.0);
        sum += &term;
    }
    sum
}

/// Extreme eigenvalues of a Hermitian operator given by its action, by Lanczos with
/// full reorthogonalization. `apply` must add A·v into a zeroed `out`.
pub(crate) fn lanczos_extremes(dim: usize, mut apply: impl FnMut(&[C64], &mut [C64])) -> (f64, f64) {
    let max_iter = dim.min(300);
    let mut seed = 0x9E37_79B9_7F4A_7C15u64;
    let mut rnd = || {
        seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((seed >> 11) as f64 / (1u64 << 53) as f64) - 0.5
    };
    let mut q: Vec<C64> = (0..dim).map(|_| C64::new(rnd(), rnd())).collect();
    normalize(&mut q);
    let mut basis: Vec<Vec<C64>> = Vec::with_capacity(max_iter);
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut prev = (f64::NAN, f64::NAN);
    let mut stable = 0;
    let mut w = vec![ZERO; dim];
    for it in 0..max_iter {
        w.iter_mut().for_each(|x| *x = ZERO);
        apply(&q, &mut w);
        let a = dot(&q, &w).re;
        alphas.push(a);
        basis.push(q.clone());
        // full reorthogonalization, twice for stability
        for _ in 0..2 {
            for b in &basis {
                let c = dot(b, &w);
                for (wi, bi) in w.iter_mut().zip(b) {
                    *wi -= c * bi;
                }
            }
        }
        let beta = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        // the Ritz check costs O(m³), so it runs every few steps
        let last = it + 1 == max_iter;
        if beta > 0.0 && !last && it % 4 != 3 {
            betas.push(beta);
            q = w.iter().map(|z| z / beta).collect();
            continue;
        }
        let ext = tridiagonal_extremes(&alphas, &betas);
        let scale = ext.0.abs().max(ext.1.abs()).max(f64::MIN_POSITIVE);
        if beta <= 1e-13 * scale || last {
            return ext;
        }
        let change = (ext.0 - prev.0).abs().max((ext.1 - prev.1).abs());
        if change <= 1e-14 * scale {
            stable += 1;
            if stable >= 2 {
                return ext;
            }
        } else {
            stable = 0;
        }
        prev = ext;
        betas.push(beta);
        q = w.iter().map(|z| z / beta).collect();
    }
    prev
}

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn normalize(v: &mut [C64]) {
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|z| *z /= n);
}

fn tridiagonal_extremes(alphas: &[f64], betas: &[f64]) -> (f64, f64) {
    let m = alphas.len();
    let t = DMatrix::<f64>::from_fn(m, m, |i, j| {
        if i == j {
            alphas[i]
        } else if i + 1 == j || j + 1 == i {
            betas[i.min(j)]
        } else {
            0.0
        }
    });
    let ev: nalgebra::DVector<f64> = t.symmetric_eigenvalues();
    let lo = ev.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = ev.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    (lo, hi)
}
