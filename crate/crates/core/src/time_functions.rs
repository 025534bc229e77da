//! Scalar time dependence with analytic derivatives, the bump function, and the
//! periodic extension used to feed non-periodic drives into the Floquet picture.

use std::f64::consts::FRAC_PI_2;
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Piece {
    pub start: f64,
    pub curve: CurveShape,
}
/// Curve kinds. The two `serde(skip)` variants are built internally and never appear in model files.
/// Curve kinds. Only the first five appear in model files; the last two are built internally.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CurveShape {
    Constant {
        value: f64,
    },
    /// Σ coeffs[k] τ^k
    Polynomial {
        coeffs: Vec<f64>,
    },
    /// amp · cos(ωτ + phase)
    Trig {
        amp: f64,
        omega: f64,
        #[serde(default)]
        phase: f64,
    },
    /// amp · e^{rate τ} · cos(ωτ + phase)
    ExpEnvelope {
        amp: f64,
        rate: f64,
        #[serde(default)]
        omega: f64,
        #[serde(default)]
        phase: f64,
    },
    /// Each piece is active from its start until the next start; the first piece also covers τ below it.
    Piecewise {
        pieces: Vec<Piece>,
    },
    /// Pointwise sum of curves.
    Sum {
        terms: Vec<CurveShape>,
    },
    #[serde(skip)]
    Shifted { base: Box<CurveShape>, shift: f64 },
    #[serde(skip)]
    Extension(Box<Extension>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Extension {
    base: CurveShape,
    window_end: f64,
    /// f^{(k)}(t), k = 0..=p+2
    at_end: Vec<f64>,
    /// f^{(k)}(0), k = 0..=p+2
    at_start: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Periodicity {
    Constant,
    Period(f64),
    Aperiodic,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScalarCurve {
    pub shape: CurveShape,
    pub budget: usize,
}

impl ScalarCurve {
    pub fn new(shape: CurveShape, budget: usize) -> Result<Self> {
        shape.validate()?;
        Ok(ScalarCurve { shape, budget })
    }

    pub fn constant(value: f64, budget: usize) -> Self {
        ScalarCurve { shape: CurveShape::Constant { value }, budget }
    }

    pub fn trig(amp: f64, omega: f64, phase: f64, budget: usize) -> Self {
        ScalarCurve { shape: CurveShape::Trig { amp, omega, phase }, budget }
    }

    /// offset + amp · cos(ωτ + phase)
    pub fn offset_trig(offset: f64, amp: f64, omega: f64, phase: f64, budget: usize) -> Self {
        let shape = CurveShape::Sum {
            terms: vec![CurveShape::Constant { value: offset }, CurveShape::Trig { amp, omega, phase }],
        };
        ScalarCurve { shape, budget }
    }

    pub fn eval(&self, tau: f64, q: usize) -> Result<f64> {
        if q > self.budget {
            return Err(Error::BudgetExceeded { requested: q, budget: self.budget });
        }
        Ok(self.shape.eval(tau, q))
    }

    pub fn value(&self, tau: f64) -> f64 {
        self.shape.eval(tau, 0)
    }

    pub fn shifted(&self, shift: f64) -> Self {
        if shift == 0.0 {
            return self.clone();
        }
        ScalarCurve { shape: CurveShape::Shifted { base: Box::new(self.shape.clone()), shift }, budget: self.budget }
    }

    pub fn is_constant(&self) -> bool {
        self.shape.periodicity() == Periodicity::Constant
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.shape, CurveShape::Constant { value } if value == 0.0)
    }

    pub fn periodicity(&self) -> Periodicity {
        self.shape.periodicity()
    }

    /// ∫_a^b f
    pub fn integral(&self, a: f64, b: f64) -> quad::QuadResult {
        match &self.shape {
            CurveShape::Constant { value } => {
                quad::QuadResult { value: value * (b - a), error: 0.0, converged: true }
            }
            _ => quad::integrate(|s| self.shape.eval(s, 0), a, b, 1e-15, 1e-15),
        }
    }

    /// Periodic C^{p+2} extension with period 2t: equal to the curve on [0,t], zero on [4t/3, 5t/3].
    pub fn extrapolate_periodic(&self, t: f64, p: usize) -> Result<Self> {
        if p + 2 > self.budget {
            return Err(Error::BudgetExceeded { requested: p + 2, budget: self.budget });
        }
        if !(t > 0.0) {
            return Err(Error::invalid("extension window end must be positive"));
        }
        let at_end = (0..=p + 2).map(|k| self.shape.eval(t, k)).collect();
        let at_start = (0..=p + 2).map(|k| self.shape.eval(0.0, k)).collect();
        let ext = Extension { base: self.shape.clone(), window_end: t, at_end, at_start };
        Ok(ScalarCurve { shape: CurveShape::Extension(Box::new(ext)), budget: p + 2 })
    }
}

fn falling(k: usize, q: usize) -> f64 {
    (0..q).map(|i| (k - i) as f64).product()
}

impl CurveShape {
    fn validate(&self) -> Result<()> {
        let finite = |x: f64, what: &str| {
            if x.is_finite() {
                Ok(())
            } else {
                Err(Error::invalid(format!("non-finite curve parameter {what}")))
            }
        };
        match self {
            CurveShape::Constant { value } => finite(*value, "value"),
            CurveShape::Polynomial { coeffs } => coeffs.iter().try_for_each(|c| finite(*c, "coeffs")),
            CurveShape::Trig { amp, omega, phase } => {
                finite(*amp, "amp")?;
                finite(*omega, "omega")?;
                finite(*phase, "phase")
            }
            CurveShape::ExpEnvelope { amp, rate, omega, phase } => {
                finite(*amp, "amp")?;
                finite(*rate, "rate")?;
                finite(*omega, "omega")?;
                finite(*phase, "phase")
            }
            CurveShape::Piecewise { pieces } => {
                if pieces.is_empty() {
                    return Err(Error::invalid("piecewise curve needs at least one piece"));
                }
                for w in pieces.windows(2) {
                    if !(w[1].start > w[0].start) {
                        return Err(Error::invalid("piecewise starts must increase"));
                    }
                    let s = w[1].start;
                    let (l, r) = (w[0].curve.eval(s, 0), w[1].curve.eval(s, 0));
                    if (l - r).abs() > 1e-9 * (1.0 + l.abs()) {
                        return Err(Error::invalid(format!("piecewise curve is discontinuous at {s}")));
                    }
                }
                pieces.iter().try_for_each(|p| p.curve.validate())
            }
            CurveShape::Sum { terms } => terms.iter().try_for_each(|c| c.validate()),
            CurveShape::Shifted { base, .. } => base.validate(),
            CurveShape::Extension(e) => e.base.validate(),
        }
    }

    pub fn eval(&self, tau: f64, q: usize) -> f64 {
        match self {
            CurveShape::Constant { value } => {
                if q == 0 {
                    *value
                } else {
                    0.0
                }
            }
            CurveShape::Polynomial { coeffs } => {
                let mut acc = 0.0;
                for k in (q..coeffs.len()).rev() {
                    acc = acc * tau + coeffs[k] * falling(k, q);
                }
                acc
            }
            CurveShape::Trig { amp, omega, phase } => {
                amp * omega.powi(q as i32) * (omega * tau + phase + q as f64 * FRAC_PI_2).cos()
            }
            CurveShape::ExpEnvelope { amp, rate, omega, phase } => {
                let s = Complex64::new(*rate, *omega);
                let z = Complex64::from_polar(*amp, *phase) * s.powu(q as u32) * (s * tau).exp();
                z.re
            }
            CurveShape::Piecewise { pieces } => {
                let idx = pieces.iter().rposition(|p| p.start <= tau).unwrap_or(0);
                pieces[idx].curve.eval(tau, q)
            }
            CurveShape::Sum { terms } => terms.iter().map(|c| c.eval(tau, q)).sum(),
            CurveShape::Shifted { base, shift } => base.eval(tau + shift, q),
            CurveShape::Extension(e) => e.eval(tau, q),
        }
    }

    fn periodicity(&self) -> Periodicity {
        match self {
            CurveShape::Constant { .. } => Periodicity::Constant,
            CurveShape::Polynomial { coeffs } => {
                if coeffs.iter().skip(1).all(|c| *c == 0.0) {
                    Periodicity::Constant
                } else {
                    Periodicity::Aperiodic
                }
            }
            CurveShape::Trig { amp, omega, .. } => {
                if *amp == 0.0 || *omega == 0.0 {
                    Periodicity::Constant
                } else {
                    Periodicity::Period(2.0 * std::f64::consts::PI / omega.abs())
                }
            }
            CurveShape::ExpEnvelope { amp, rate, omega, phase } => {
                if *rate == 0.0 {
                    CurveShape::Trig { amp: *amp, omega: *omega, phase: *phase }.periodicity()
                } else if *amp == 0.0 {
                    Periodicity::Constant
                } else {
                    Periodicity::Aperiodic
                }
            }
            CurveShape::Piecewise { pieces } => {
                if pieces.len() == 1 {
                    pieces[0].curve.periodicity()
                } else {
                    Periodicity::Aperiodic
                }
            }
            CurveShape::Sum { terms } => {
                let mut acc = Periodicity::Constant;
                for c in terms {
                    acc = match (acc, c.periodicity()) {
                        (a, Periodicity::Constant) => a,
                        (Periodicity::Constant, b) => b,
                        (Periodicity::Period(a), Periodicity::Period(b)) if (a - b).abs() <= 1e-12 * a => {
                            Periodicity::Period(a)
                        }
                        _ => Periodicity::Aperiodic,
                    };
                }
                acc
            }
            CurveShape::Shifted { base, .. } => base.periodicity(),
            CurveShape::Extension(e) => Periodicity::Period(2.0 * e.window_end),
        }
    }
}

/// Σ_{k≥r} a_k (τ-c)^{k-r}/(k-r)!
fn taylor_derivative(a: &[f64], center: f64, tau: f64, r: usize) -> f64 {
    let d = tau - center;
    let mut sum = 0.0;
    let mut pow = 1.0;
    for (j, k) in (r..a.len()).enumerate() {
        if j > 0 {
            pow *= d / j as f64;
        }
        sum += a[k] * pow;
    }
    sum
}

fn binom(n: usize, k: usize) -> f64 {
    let mut b = 1.0;
    for i in 0..k {
        b = b * (n - i) as f64 / (i + 1) as f64;
    }
    b
}

impl Extension {
    fn eval(&self, tau: f64, q: usize) -> f64 {
        let t = self.window_end;
        let period = 2.0 * t;
        let s = tau - period * (tau / period).floor();
        if s <= t {
            return self.base.eval(s, q);
        }
        if s < 4.0 * t / 3.0 {
            // P_t(τ) · c(7 − 6τ/t)
            let u = 7.0 - 6.0 * s / t;
            return (0..=q)
                .map(|r| {
                    binom(q, r)
                        * taylor_derivative(&self.at_end, t, s, r)
                        * (-6.0 / t).powi((q - r) as i32)
                        * bump_derivative(u, q - r)
                })
                .sum();
        }
        if s <= 5.0 * t / 3.0 {
            return 0.0;
        }
        // P_0(τ) · c(6τ/t − 11), Taylor-centred at 2t so that it joins H(0) one period later
        let u = 6.0 * s / t - 11.0;
        (0..=q)
            .map(|r| {
                binom(q, r)
                    * taylor_derivative(&self.at_start, period, s, r)
                    * (6.0 / t).powi((q - r) as i32)
                    * bump_derivative(u, q - r)
            })
            .sum()
    }
}

/// b(s)b(1−s) = exp(−1/s − 1/(1−s)) on (0,1), zero outside.
fn bump_density(s: f64) -> f64 {
    if s <= 0.0 || s >= 1.0 {
        0.0
    } else {
        (-1.0 / s - 1.0 / (1.0 - s)).exp()
    }
}

/// Derivatives g^{(0..=n)} of the bump density, via g' = φ' g and the Leibniz rule.
fn bump_density_derivatives(s: f64, n: usize) -> Vec<f64> {
    let mut g = vec![0.0; n + 1];
    let g0 = bump_density(s);
    if g0 == 0.0 {
        return g;
    }
    g[0] = g0;
    // φ^{(k)}(s) = −(−1)^k k! s^{−k−1} − k! (1−s)^{−k−1}
    let phi: Vec<f64> = (0..=n)
        .map(|k| {
            let kf: f64 = (1..=k).map(|i| i as f64).product();
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            -sign * kf * s.powi(-(k as i32) - 1) - kf * (1.0 - s).powi(-(k as i32) - 1)
        })
        .collect();
    for m in 1..=n {
        let mut acc = 0.0;
        for k in 0..m {
            acc += binom(m - 1, k) * phi[k + 1] * g[m - 1 - k];
        }
        g[m] = acc;
    }
    g
}

fn bump_norm() -> f64 {
    static Z: OnceLock<f64> = OnceLock::new();
    *Z.get_or_init(|| {
        let half = quad::integrate(bump_density, 0.0, 0.5, 1e-18, 1e-15).value;
        2.0 * half
    })
}

/// c(τ) = ∫₀^τ b(s)b(1−s)ds / ∫₀¹ b(s)b(1−s)ds
pub fn bump_c(tau: f64) -> f64 {
    if tau <= 0.0 {
        return 0.0;
    }
    if tau >= 1.0 {
        return 1.0;
    }
    if tau > 0.5 {
        return 1.0 - bump_c(1.0 - tau);
    }
    quad::integrate(bump_density, 0.0, tau, 1e-18, 1e-15).value / bump_norm()
}

/// q-th derivative of c at τ.
pub fn bump_derivative(tau: f64, q: usize) -> f64 {
    if q == 0 {
        return bump_c(tau);
    }
    if tau <= 0.0 || tau >= 1.0 {
        return 0.0;
    }
    bump_density_derivatives(tau, q - 1)[q - 1] / bump_norm()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_examples() {
        let c = ScalarCurve::constant(3.0, 2);
        assert_eq!(c.eval(0.4, 1).unwrap(), 0.0);
        let cosw = ScalarCurve::trig(1.0, 2.0, 0.0, 4);
        assert!((cosw.eval(0.0, 2).unwrap() + 4.0).abs() < 1e-14);
        let cube = ScalarCurve::new(CurveShape::Polynomial { coeffs: vec![0.0, 0.0, 0.0, 1.0] }, 4).unwrap();
        assert!((cube.eval(2.0, 3).unwrap() - 6.0).abs() < 1e-14);
        assert!((cube.eval(2.0, 1).unwrap() - 12.0).abs() < 1e-14);
        assert!(matches!(cube.eval(2.0, 5), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn exp_envelope_derivative() {
        let c = ScalarCurve::new(CurveShape::ExpEnvelope { amp: 1.5, rate: -0.3, omega: 2.0, phase: 0.1 }, 3).unwrap();
        let tau = 0.7;
        let h = 1e-5;
        let fd = (c.value(tau + h) - c.value(tau - h)) / (2.0 * h);
        assert!((fd - c.eval(tau, 1).unwrap()).abs() < 1e-8);
    }

    #[test]
    fn piecewise_validation() {
        let ok = CurveShape::Piecewise {
            pieces: vec![
                Piece { start: 0.0, curve: CurveShape::Constant { value: 1.0 } },
                Piece { start: 1.0, curve: CurveShape::Polynomial { coeffs: vec![0.0, 1.0] } },
            ],
        };
        let c = ScalarCurve::new(ok, 2).unwrap();
        assert_eq!(c.value(0.5), 1.0);
        assert_eq!(c.value(2.0), 2.0);
        let bad = CurveShape::Piecewise {
            pieces: vec![
                Piece { start: 0.0, curve: CurveShape::Constant { value: 1.0 } },
                Piece { start: 1.0, curve: CurveShape::Constant { value: 3.0 } },
            ],
        };
        assert!(ScalarCurve::new(bad, 2).is_err());
    }

    #[test]
    fn bump_values() {
        assert_eq!(bump_c(0.0), 0.0);
        assert_eq!(bump_c(1.0), 1.0);
        assert!((bump_c(0.5) - 0.5).abs() < 1e-12);
        let mut prev = 0.0;
        for i in 0..=1000 {
            let v = bump_c(i as f64 / 1000.0);
            assert!(v >= prev - 1e-15);
            prev = v;
        }
    }

    #[test]
    fn bump_derivatives_match_differences() {
        for &s in &[0.2, 0.45, 0.8] {
            for q in 1..5 {
                let h = 1e-5;
                let fd = (bump_derivative(s + h, q - 1) - bump_derivative(s - h, q - 1)) / (2.0 * h);
                let an = bump_derivative(s, q);
                assert!((fd - an).abs() <= 1e-6 * (1.0 + an.abs()), "s={s} q={q}: {fd} vs {an}");
            }
        }
    }

    #[test]
    fn taylor_derivative_direct() {
        // a = (1, 2, 6) → P(τ) = 1 + 2d + 3d², P' = 2 + 6d, P'' = 6
        let a = [1.0, 2.0, 6.0];
        assert!((taylor_derivative(&a, 1.0, 1.5, 0) - (1.0 + 1.0 + 0.75)).abs() < 1e-15);
        assert!((taylor_derivative(&a, 1.0, 1.5, 1) - 5.0).abs() < 1e-15);
        assert!((taylor_derivative(&a, 1.0, 1.5, 2) - 6.0).abs() < 1e-15);
    }

    #[test]
    fn extension_properties() {
        let f = ScalarCurve::new(CurveShape::ExpEnvelope { amp: 0.8, rate: 0.4, omega: 1.3, phase: 0.2 }, 6).unwrap();
        let t = 0.9;
        let p = 2;
        let e = f.extrapolate_periodic(t, p).unwrap();
        for i in 0..=20 {
            let s = t * i as f64 / 20.0;
            assert!((e.value(s) - f.value(s)).abs() < 1e-14);
            assert!((e.value(s + 2.0 * t) - e.value(s)).abs() < 1e-12);
        }
        assert_eq!(e.value(1.5 * t), 0.0);
        assert_eq!(e.value(4.0 * t / 3.0 + 1e-9), 0.0);
        // seam continuity of derivatives up to p+2
        for &seam in &[t, 4.0 * t / 3.0, 5.0 * t / 3.0, 2.0 * t] {
            for q in 0..=p + 2 {
                let h = 1e-7;
                let l = e.eval(seam - h, q).unwrap();
                let r = e.eval(seam + h, q).unwrap();
                assert!((l - r).abs() < 1e-5 * (1.0 + l.abs()), "seam {seam} q {q}: {l} vs {r}");
            }
        }
        assert!(e.eval(0.3, p + 3).is_err());
        assert!(f.clone().extrapolate_periodic(t, 5).is_err());
    }
}
