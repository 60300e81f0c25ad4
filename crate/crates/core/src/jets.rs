//! Truncated power series ("jets") in the counting field.
//!
//! A jet of order K stores `c_0 … c_K` for `Σ c_k λ^k`. Arithmetic keeps the
//! order fixed and never reads beyond index K, so evaluating any smooth
//! expression on the seed `λ` yields its Taylor coefficients exactly up to
//! rounding. The n-th derivative at the expansion point is `n! c_n`.

use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::{Error, Result};

/// Default truncation order for cumulant extraction.
pub const DEFAULT_ORDER: usize = 12;

#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    coeffs: Vec<f64>,
}

impl Jet {
    pub fn constant(value: f64, order: usize) -> Jet {
        let mut coeffs = vec![0.0; order + 1];
        coeffs[0] = value;
        Jet { coeffs }
    }

    /// The independent variable expanded around `at`: `at + 1·λ`.
    pub fn variable(at: f64, order: usize) -> Jet {
        let mut jet = Jet::constant(at, order);
        if order > 0 {
            jet.coeffs[1] = 1.0;
        }
        jet
    }

    pub fn from_coeffs(coeffs: Vec<f64>) -> Result<Jet> {
        if coeffs.is_empty() {
            return Err(Error::Domain("a jet needs at least one coefficient".into()));
        }
        Ok(Jet { coeffs })
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> f64 {
        self.coeffs[k]
    }

    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    /// `d^n/dλ^n` at the expansion point.
    pub fn derivative(&self, n: usize) -> f64 {
        self.coeffs[n] * factorial(n)
    }

    /// All derivatives `1..=K`.
    pub fn derivatives(&self) -> Vec<f64> {
        (1..=self.order()).map(|n| self.derivative(n)).collect()
    }

    fn check(&self, other: &Jet) -> Result<()> {
        if self.order() == other.order() {
            Ok(())
        } else {
            Err(Error::OrderMismatch {
                left: self.order(),
                right: other.order(),
            })
        }
    }

    pub fn checked_add(&self, other: &Jet) -> Result<Jet> {
        self.check(other)?;
        Ok(self.zip_with(other, |a, b| a + b))
    }

    pub fn checked_sub(&self, other: &Jet) -> Result<Jet> {
        self.check(other)?;
        Ok(self.zip_with(other, |a, b| a - b))
    }

    pub fn checked_mul(&self, other: &Jet) -> Result<Jet> {
        self.check(other)?;
        let k = self.order();
        let coeffs = (0..=k)
            .map(|n| (0..=n).map(|i| self.coeffs[i] * other.coeffs[n - i]).sum())
            .collect();
        Ok(Jet { coeffs })
    }

    pub fn checked_div(&self, other: &Jet) -> Result<Jet> {
        self.check(other)?;
        let b0 = other.coeffs[0];
        if b0 == 0.0 || !b0.is_finite() {
            return Err(Error::Domain(format!(
                "jet division by a series with constant term {b0}"
            )));
        }
        let mut q = vec![0.0; self.coeffs.len()];
        for n in 0..q.len() {
            let acc: f64 = (1..=n).map(|k| other.coeffs[k] * q[n - k]).sum();
            q[n] = (self.coeffs[n] - acc) / b0;
        }
        Ok(Jet { coeffs: q })
    }

    pub fn scale(&self, factor: f64) -> Jet {
        Jet {
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
        }
    }

    pub fn add_scalar(&self, value: f64) -> Jet {
        let mut out = self.clone();
        out.coeffs[0] += value;
        out
    }

    /// `b_0 = e^{a_0}`, `b_n = (1/n) Σ_{k=1..n} k a_k b_{n-k}`.
    pub fn exp(&self) -> Jet {
        let mut b = vec![0.0; self.coeffs.len()];
        b[0] = self.coeffs[0].exp();
        for n in 1..b.len() {
            let acc: f64 = (1..=n).map(|k| k as f64 * self.coeffs[k] * b[n - k]).sum();
            b[n] = acc / n as f64;
        }
        Jet { coeffs: b }
    }

    /// `e^a - 1`, with the constant term computed without cancellation.
    pub fn exp_m1(&self) -> Jet {
        let mut out = self.exp();
        out.coeffs[0] = self.coeffs[0].exp_m1();
        out
    }

    /// Square root; needs a positive constant term.
    pub fn sqrt(&self) -> Result<Jet> {
        let a0 = self.coeffs[0];
        if a0.is_nan() || a0 <= 0.0 {
            return Err(Error::Domain(format!(
                "jet square root needs a positive constant term, got {a0}"
            )));
        }
        Ok(self.sqrt_unchecked())
    }

    fn sqrt_unchecked(&self) -> Jet {
        let mut b = vec![0.0; self.coeffs.len()];
        b[0] = self.coeffs[0].sqrt();
        for n in 1..b.len() {
            let acc: f64 = (1..n).map(|k| b[k] * b[n - k]).sum();
            b[n] = (self.coeffs[n] - acc) / (2.0 * b[0]);
        }
        Jet { coeffs: b }
    }

    fn zip_with(&self, other: &Jet, f: impl Fn(f64, f64) -> f64) -> Jet {
        Jet {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }
}

pub(crate) fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

// The operator impls assume matching orders and panic otherwise; the
// `checked_*` methods are the fallible surface.
macro_rules! binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait<&Jet> for &Jet {
            type Output = Jet;
            fn $method(self, rhs: &Jet) -> Jet {
                self.$checked(rhs)
                    .expect(concat!("Jet::", stringify!($method)))
            }
        }
        impl $trait<Jet> for Jet {
            type Output = Jet;
            fn $method(self, rhs: Jet) -> Jet {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Jet> for Jet {
            type Output = Jet;
            fn $method(self, rhs: &Jet) -> Jet {
                (&self).$method(rhs)
            }
        }
    };
}

binop!(Add, add, checked_add);
binop!(Sub, sub, checked_sub);
binop!(Mul, mul, checked_mul);
binop!(Div, div, checked_div);

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, rhs: f64) -> Jet {
        self.scale(rhs)
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(self, rhs: f64) -> Jet {
        self.add_scalar(rhs)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

/// A value the counting field can take: a plain number or a jet.
///
/// `sqrt_positive` may assume `value() > 0`; callers check first.
pub trait CountingField:
    Clone
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Mul<f64, Output = Self>
    + Add<f64, Output = Self>
{
    fn value(&self) -> f64;
    fn exp(&self) -> Self;
    fn exp_m1(&self) -> Self;
    fn sqrt_positive(&self) -> Self;
}

impl CountingField for f64 {
    fn value(&self) -> f64 {
        *self
    }
    fn exp(&self) -> f64 {
        f64::exp(*self)
    }
    fn exp_m1(&self) -> f64 {
        f64::exp_m1(*self)
    }
    fn sqrt_positive(&self) -> f64 {
        f64::sqrt(*self)
    }
}

impl CountingField for Jet {
    fn value(&self) -> f64 {
        self.coeffs[0]
    }
    fn exp(&self) -> Jet {
        Jet::exp(self)
    }
    fn exp_m1(&self) -> Jet {
        Jet::exp_m1(self)
    }
    fn sqrt_positive(&self) -> Jet {
        self.sqrt_unchecked()
    }
}
