//! Sparse Pauli-sum algebra. Used for nested commutators when dense matrices get too large.

use std::collections::BTreeMap;


use crate::error::{Error, Result};
use crate::linalg::{self, lanczos_extremes, OperatorMatrix, Pauli, C64, I, ONE, ZERO};

/// Σ c · X^x Z^z with bit `n-1-s` of the masks addressing site `s`.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliSum {
    n: usize,
    terms: BTreeMap<(u64, u64), C64>,
}

const DENSE_QUBITS: usize = 6;

#[inline]
fn parity(m: u64) -> bool {
    m.count_ones() % 2 == 1
}

impl PauliSum {
    pub fn zero(n: usize) -> Self {
        PauliSum { n, terms: BTreeMap::new() }
    }

    pub fn from_string(sites: &[(usize, Pauli)], n: usize, coeff: C64) -> Result<Self> {
        if n > 62 {
            return Err(Error::invalid(format!("N={n} too large for a Pauli mask")));
        }
        let mut seen = 0u64;
        let (mut x, mut z) = (0u64, 0u64);
        let mut phase = ONE;
        for &(s, p) in sites {
            if s >= n {
                return Err(Error::invalid(format!("site {s} out of range for N={n}")));
            }
            let bit = 1u64 << (n - 1 - s);
            if seen & bit != 0 {
                return Err(Error::invalid(format!("duplicate site {s}")));
            }
            seen |= bit;
            let (px, pz) = p.xz();
            if px {
                x |= bit;
            }
            if pz {
                z |= bit;
            }
            if p == Pauli::Y {
                phase *= I;
            }
        }
        let mut s = PauliSum::zero(n);
        s.insert(x, z, coeff * phase);
        Ok(s)
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1usize << self.n
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    fn insert(&mut self, x: u64, z: u64, c: C64) {
        if c == ZERO {
            return;
        }
        let e = self.terms.entry((x, z)).or_insert(ZERO);
        *e += c;
        if *e == ZERO {
            self.terms.remove(&(x, z));
        }
    }

    pub fn add_scaled(&mut self, other: &PauliSum, c: C64) {
        debug_assert_eq!(self.n, other.n);
        if c == ZERO {
            return;
        }
        for (&(x, z), &v) in &other.terms {
            self.insert(x, z, v * c);
        }
    }

    pub fn scaled(&self, c: C64) -> PauliSum {
        let mut out = PauliSum::zero(self.n);
        out.add_scaled(self, c);
        out
    }

    pub fn mul(&self, other: &PauliSum) -> PauliSum {
        let mut out = PauliSum::zero(self.n);
        for (&(x1, z1), &c1) in &self.terms {
            for (&(x2, z2), &c2) in &other.terms {
                let sign = if parity(z1 & x2) { -1.0 } else { 1.0 };
                out.insert(x1 ^ x2, z1 ^ z2, c1 * c2 * sign);
            }
        }
        out
    }

    pub fn commutator(&self, other: &PauliSum) -> PauliSum {
        let mut out = PauliSum::zero(self.n);
        for (&(x1, z1), &c1) in &self.terms {
            for (&(x2, z2), &c2) in &other.terms {
                let a = parity(z1 & x2);
                let b = parity(z2 & x1);
                if a != b {
                    // (-1)^a - (-1)^b = ±2
                    let sign = if a { -2.0 } else { 2.0 };
                    out.insert(x1 ^ x2, z1 ^ z2, c1 * c2 * sign);
                }
            }
        }
        out
    }

    pub fn commutes_with(&self, other: &PauliSum) -> bool {
        self.commutator(other).is_empty()
    }

    pub fn adjoint(&self) -> PauliSum {
        // (X^x Z^z)† = Z^z X^x = (-1)^{|x&z|} X^x Z^z
        let mut out = PauliSum::zero(self.n);
        for (&(x, z), &c) in &self.terms {
            let sign = if parity(x & z) { -1.0 } else { 1.0 };
            out.insert(x, z, c.conj() * sign);
        }
        out
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian_defect(false) <= 1e-13
    }

    /// (Σ|c|, max_site Σ_{strings on site}|c|), identity excluded.
    pub fn induced_norms(&self) -> (f64, f64) {
        let mut total = 0.0;
        let mut per_site = vec![0.0; self.n];
        for (&(x, z), &c) in &self.terms {
            let support = x | z;
            if support == 0 {
                continue;
            }
            total += c.norm();
            for (s, acc) in per_site.iter_mut().enumerate() {
                if support >> (self.n - 1 - s) & 1 == 1 {
                    *acc += c.norm();
                }
            }
        }
        (total, per_site.into_iter().fold(0.0, f64::max))
    }

    /// Each string as its own single-term sum.
    pub fn strings(&self) -> Vec<PauliSum> {
        self.terms
            .iter()
            .map(|(&k, &c)| PauliSum { n: self.n, terms: BTreeMap::from([(k, c)]) })
            .collect()
    }

    fn hermitian_defect(&self, anti: bool) -> f64 {
        let scale = self.terms.values().fold(0.0f64, |m, c| m.max(c.norm())).max(f64::MIN_POSITIVE);
        let mut d = 0.0f64;
        for (&(x, z), &c) in &self.terms {
            let sign = if parity(x & z) { -1.0 } else { 1.0 };
            let adj = c.conj() * sign;
            let diff = if anti { c + adj } else { c - adj };
            d = d.max(diff.norm());
        }
        d / scale
    }

    pub fn to_dense(&self) -> OperatorMatrix {
        let dim = self.dim();
        let mut m = linalg::zeros(dim);
        for (&(x, z), &c) in &self.terms {
            for j in 0..dim {
                let sign = if parity(z & j as u64) { -1.0 } else { 1.0 };
                m[((j as u64 ^ x) as usize, j)] += c * sign;
            }
        }
        m
    }

    /// Operator norm. Dense up to `DENSE_QUBITS` qubits, sparse Lanczos beyond.
    pub fn norm(&self) -> f64 {
        if self.is_empty() {
            return 0.0;
        }
        if self.n <= DENSE_QUBITS {
            return linalg::norm(&self.to_dense());
        }
        if self.hermitian_defect(false) <= 1e-13 {
            return SparseOp::new(self).hermitian_extreme_abs();
        }
        if self.hermitian_defect(true) <= 1e-13 {
            return SparseOp::new(&self.scaled(I)).hermitian_extreme_abs();
        }
        let a = SparseOp::new(self);
        let adj = SparseOp::new(&self.adjoint());
        let dim = self.dim();
        let mut w = vec![ZERO; dim];
        lanczos_extremes(dim, |v, out| {
            w.iter_mut().for_each(|x| *x = ZERO);
            a.apply(v, &mut w);
            adj.apply(&w, out);
        })
        .1
        .max(0.0)
        .sqrt()
    }
}

/// Pauli sum grouped by X mask: out[j ^ x] += d_x[j] v[j].
struct SparseOp {
    blocks: Vec<(usize, Vec<C64>)>,
    dim: usize,
}

impl SparseOp {
    fn new(p: &PauliSum) -> Self {
        let dim = p.dim();
        let mut by_x: BTreeMap<u64, Vec<C64>> = BTreeMap::new();
        for (&(x, z), &c) in &p.terms {
            let d = by_x.entry(x).or_insert_with(|| vec![ZERO; dim]);
            for (j, dj) in d.iter_mut().enumerate() {
                if parity(z & j as u64) {
                    *dj -= c;
                } else {
                    *dj += c;
                }
            }
        }
        SparseOp { blocks: by_x.into_iter().map(|(x, d)| (x as usize, d)).collect(), dim }
    }

    fn apply(&self, v: &[C64], out: &mut [C64]) {
        for (x, d) in &self.blocks {
            for j in 0..self.dim {
                out[j ^ x] += d[j] * v[j];
            }
        }
    }

    fn hermitian_extreme_abs(&self) -> f64 {
        let (lo, hi) = lanczos_extremes(self.dim, |v, out| self.apply(v, out));
        lo.abs().max(hi.abs())
    }
}
