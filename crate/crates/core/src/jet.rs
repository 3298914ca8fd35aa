//! Truncated power-series (jet) arithmetic.
//!
//! A [`Jet`] of order `K` stores the Taylor coefficients `c[k] = f^(k)(x0)/k!`
//! of a function expanded at a point. Propagating jets through arithmetic
//! gives derivatives of composite expressions that are exact up to floating
//! point rounding — there is no truncation error, unlike finite differences.
//! Classification of fixed points rests on sign tests of second and third
//! derivatives, which is why jets are used everywhere in this crate.

// convolution recurrences read clearest with explicit indices
#![allow(clippy::needless_range_loop)]

use crate::error::{DomainError, Result};

/// Taylor coefficients of a function at an expansion point.
///
/// `coeffs[k]` is the k-th Taylor coefficient, i.e. `f^(k)(x0) / k!`.
/// Order-0 jets degenerate to plain real arithmetic.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    coeffs: Vec<f64>,
}

fn factorial(k: usize) -> f64 {
    (1..=k).fold(1.0, |acc, i| acc * i as f64)
}

impl Jet {
    /// Jet of the constant function with value `v`.
    pub fn constant(v: f64, order: usize) -> Jet {
        let mut coeffs = vec![0.0; order + 1];
        coeffs[0] = v;
        Jet { coeffs }
    }

    /// Jet of the identity seeded at `v`: coefficients `(v, 1, 0, ...)`.
    pub fn variable(v: f64, order: usize) -> Jet {
        let mut coeffs = vec![0.0; order + 1];
        coeffs[0] = v;
        if order >= 1 {
            coeffs[1] = 1.0;
        }
        Jet { coeffs }
    }

    /// Jet with explicit coefficients. `coeffs` must be nonempty.
    pub fn from_coeffs(coeffs: Vec<f64>) -> Jet {
        assert!(!coeffs.is_empty(), "a jet needs at least the value slot");
        Jet { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Function value (the order-0 coefficient).
    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    /// k-th Taylor coefficient `f^(k)/k!`.
    pub fn coeff(&self, k: usize) -> f64 {
        self.coeffs[k]
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// k-th derivative value `f^(k)(x0)`, i.e. `coeff(k) * k!`.
    pub fn derivative(&self, k: usize) -> f64 {
        self.coeffs[k] * factorial(k)
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }

    /// True when all derivative slots vanish exactly (a constant jet).
    pub fn is_constant(&self) -> bool {
        self.coeffs[1..].iter().all(|&c| c == 0.0)
    }

    pub fn add(&self, other: &Jet) -> Jet {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Jet) -> Jet {
        self.zip(other, |a, b| a - b)
    }

    pub fn neg(&self) -> Jet {
        Jet {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    fn zip(&self, other: &Jet, f: impl Fn(f64, f64) -> f64) -> Jet {
        debug_assert_eq!(self.order(), other.order());
        Jet {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    /// Cauchy product truncated at the jet order.
    pub fn mul(&self, other: &Jet) -> Jet {
        debug_assert_eq!(self.order(), other.order());
        let n = self.coeffs.len();
        let mut out = vec![0.0; n];
        for (k, slot) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for j in 0..=k {
                acc += self.coeffs[j] * other.coeffs[k - j];
            }
            *slot = acc;
        }
        Jet { coeffs: out }
    }

    pub fn div(&self, other: &Jet) -> Result<Jet> {
        debug_assert_eq!(self.order(), other.order());
        let b0 = other.coeffs[0];
        if b0 == 0.0 {
            return Err(DomainError::DivisionByZero.into());
        }
        let n = self.coeffs.len();
        let mut out = vec![0.0; n];
        for k in 0..n {
            let mut acc = self.coeffs[k];
            for j in 1..=k {
                acc -= other.coeffs[j] * out[k - j];
            }
            out[k] = acc / b0;
        }
        Ok(Jet { coeffs: out })
    }

    pub fn exp(&self) -> Jet {
        let n = self.coeffs.len();
        let mut out = vec![0.0; n];
        out[0] = self.coeffs[0].exp();
        for k in 1..n {
            let mut acc = 0.0;
            for j in 1..=k {
                acc += j as f64 * self.coeffs[j] * out[k - j];
            }
            out[k] = acc / k as f64;
        }
        Jet { coeffs: out }
    }

    pub fn log(&self) -> Result<Jet> {
        let a0 = self.coeffs[0];
        if a0 <= 0.0 {
            return Err(DomainError::LogNonpositive.into());
        }
        let n = self.coeffs.len();
        let mut out = vec![0.0; n];
        out[0] = a0.ln();
        for k in 1..n {
            let mut acc = 0.0;
            for j in 1..k {
                acc += j as f64 * out[j] * self.coeffs[k - j];
            }
            out[k] = (self.coeffs[k] - acc / k as f64) / a0;
        }
        Ok(Jet { coeffs: out })
    }

    /// Sine and cosine share one recurrence, so they are computed together.
    pub fn sin_cos(&self) -> (Jet, Jet) {
        let n = self.coeffs.len();
        let mut s = vec![0.0; n];
        let mut c = vec![0.0; n];
        s[0] = self.coeffs[0].sin();
        c[0] = self.coeffs[0].cos();
        for k in 1..n {
            let mut sa = 0.0;
            let mut ca = 0.0;
            for j in 1..=k {
                sa += j as f64 * self.coeffs[j] * c[k - j];
                ca += j as f64 * self.coeffs[j] * s[k - j];
            }
            s[k] = sa / k as f64;
            c[k] = -ca / k as f64;
        }
        (Jet { coeffs: s }, Jet { coeffs: c })
    }

    pub fn sqrt(&self) -> Result<Jet> {
        let a0 = self.coeffs[0];
        if a0 < 0.0 {
            return Err(DomainError::SqrtNegative.into());
        }
        if a0 == 0.0 {
            if self.order() == 0 {
                return Ok(Jet::constant(0.0, 0));
            }
            return Err(DomainError::SqrtDerivativeAtZero.into());
        }
        let n = self.coeffs.len();
        let mut out = vec![0.0; n];
        out[0] = a0.sqrt();
        for k in 1..n {
            let mut acc = self.coeffs[k];
            for j in 1..k {
                acc -= out[j] * out[k - j];
            }
            out[k] = acc / (2.0 * out[0]);
        }
        Ok(Jet { coeffs: out })
    }

    /// |a|. Differentiable only away from a zero of the value.
    pub fn abs(&self) -> Result<Jet> {
        let a0 = self.coeffs[0];
        if a0 > 0.0 {
            Ok(self.clone())
        } else if a0 < 0.0 {
            Ok(self.neg())
        } else if self.order() == 0 {
            Ok(Jet::constant(0.0, 0))
        } else {
            Err(DomainError::AbsDerivativeAtZero.into())
        }
    }

    /// Integer power by sequential multiplication; valid for any base,
    /// including a zero value slot.
    pub fn powi(&self, n: i64) -> Result<Jet> {
        if n == 0 {
            return Ok(Jet::constant(1.0, self.order()));
        }
        let m = n.unsigned_abs();
        let mut acc = self.clone();
        for _ in 1..m {
            acc = acc.mul(self);
        }
        if n < 0 {
            Jet::constant(1.0, self.order()).div(&acc)
        } else {
            Ok(acc)
        }
    }

    /// Real constant power `a^c` via the standard recurrence
    /// `k a0 b_k = sum_{j=1..k} (c j - (k - j)) a_j b_{k-j}`.
    /// Requires a positive value slot (principal real branch).
    pub fn pow_const(&self, c: f64) -> Result<Jet> {
        let a0 = self.coeffs[0];
        if a0 < 0.0 {
            return Err(DomainError::PowBranch.into());
        }
        if a0 == 0.0 {
            if self.order() == 0 && c > 0.0 {
                return Ok(Jet::constant(0.0, 0));
            }
            return Err(DomainError::PowBranch.into());
        }
        let n = self.coeffs.len();
        let mut out = vec![0.0; n];
        out[0] = a0.powf(c);
        for k in 1..n {
            let mut acc = 0.0;
            for j in 1..=k {
                acc += (c * j as f64 - (k - j) as f64) * self.coeffs[j] * out[k - j];
            }
            out[k] = acc / (k as f64 * a0);
        }
        Ok(Jet { coeffs: out })
    }

    /// Fully general power `a^b` as `exp(b * log a)`. Requires `a > 0`.
    pub fn pow_jet(&self, exponent: &Jet) -> Result<Jet> {
        if self.coeffs[0] <= 0.0 {
            return Err(DomainError::PowBranch.into());
        }
        Ok(exponent.mul(&self.log()?).exp())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn var(v: f64, order: usize) -> Jet {
        Jet::variable(v, order)
    }

    #[test]
    fn order_zero_is_plain_arithmetic() {
        let a = Jet::constant(3.0, 0);
        let b = Jet::constant(4.0, 0);
        assert_eq!(a.mul(&b).value(), 12.0);
        assert_eq!(a.add(&b).value(), 7.0);
        assert_eq!(a.div(&b).unwrap().value(), 3.0 / 4.0);
        assert_eq!(a.exp().value(), 3.0f64.exp());
    }

    #[test]
    fn polynomial_derivatives_are_exact() {
        // p(x) = x^3 at x = 2: p = 8, p' = 12, p'' = 12, p''' = 6
        let x = var(2.0, 3);
        let p = x.powi(3).unwrap();
        assert_eq!(p.derivative(0), 8.0);
        assert_eq!(p.derivative(1), 12.0);
        assert_eq!(p.derivative(2), 12.0);
        assert_eq!(p.derivative(3), 6.0);
    }

    #[test]
    fn exp_jet_matches_closed_form() {
        // d^k/dx^k exp(x) = exp(x)
        let x = var(0.7, 5);
        let e = x.exp();
        for k in 0..=5 {
            let rel = (e.derivative(k) - 0.7f64.exp()).abs() / 0.7f64.exp();
            assert!(rel < 1e-14, "order {k}: rel {rel}");
        }
    }

    #[test]
    fn log_and_div_recurrences() {
        // log(x) at 2: derivatives 1/2, -1/4, 2/8
        let l = var(2.0, 3).log().unwrap();
        assert!((l.derivative(1) - 0.5).abs() < 1e-15);
        assert!((l.derivative(2) + 0.25).abs() < 1e-15);
        assert!((l.derivative(3) - 0.25).abs() < 1e-15);
        // 1/x at 4: -1/16, 2/64
        let r = Jet::constant(1.0, 2).div(&var(4.0, 2)).unwrap();
        assert!((r.derivative(1) + 1.0 / 16.0).abs() < 1e-16);
        assert!((r.derivative(2) - 2.0 / 64.0).abs() < 1e-16);
    }

    #[test]
    fn sin_cos_derivative_cycle() {
        let x = var(1.1, 4);
        let (s, c) = x.sin_cos();
        assert!((s.derivative(1) - 1.1f64.cos()).abs() < 1e-15);
        assert!((s.derivative(2) + 1.1f64.sin()).abs() < 1e-15);
        assert!((c.derivative(1) + 1.1f64.sin()).abs() < 1e-15);
        assert!((c.derivative(3) - 1.1f64.sin()).abs() < 1e-14);
    }

    #[test]
    fn sqrt_matches_half_power() {
        let x = var(3.0, 4);
        let a = x.sqrt().unwrap();
        let b = x.pow_const(0.5).unwrap();
        for k in 0..=4 {
            let rel = (a.coeff(k) - b.coeff(k)).abs() / a.coeff(k).abs().max(1e-300);
            assert!(rel < 1e-13, "order {k}");
        }
    }

    #[test]
    fn pow_const_non_integer() {
        // x^2.5 at 4: value 32, f' = 2.5*4^1.5 = 20, f'' = 3.75*4^0.5 = 7.5
        let p = var(4.0, 2).pow_const(2.5).unwrap();
        assert!((p.value() - 32.0).abs() < 1e-13);
        assert!((p.derivative(1) - 20.0).abs() < 1e-13);
        assert!((p.derivative(2) - 7.5).abs() < 1e-13);
    }

    #[test]
    fn powi_at_zero_base() {
        let p = var(0.0, 2).powi(2).unwrap();
        assert_eq!(p.value(), 0.0);
        assert_eq!(p.derivative(1), 0.0);
        assert_eq!(p.derivative(2), 2.0);
    }

    #[test]
    fn domain_errors() {
        assert!(var(-1.0, 1).log().is_err());
        assert!(var(-1.0, 1).sqrt().is_err());
        assert!(var(0.0, 1).sqrt().is_err());
        assert!(var(0.0, 1).abs().is_err());
        assert!(var(0.0, 0).abs().is_ok());
        assert!(var(1.0, 1).div(&Jet::constant(0.0, 1)).is_err());
        assert!(var(-2.0, 1).pow_const(0.5).is_err());
    }

    #[test]
    fn abs_copies_sign_branch() {
        let a = var(-2.0, 2).abs().unwrap();
        assert_eq!(a.value(), 2.0);
        assert_eq!(a.derivative(1), -1.0);
    }
}
