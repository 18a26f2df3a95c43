//! Truncated power series in `z` over an exact coefficient ring.
//!
//! A series of order `K` stores the coefficients of `z^0 .. z^K`. The same
//! container is used with plain rational coefficients and with
//! rational-function coefficients (series whose coefficients still carry
//! `eps`), so the operations are written against the small [`Coeff`] trait.

use crate::error::{Error, Result};
use crate::ratfun::RatFun;
use crate::rational::Rational;

/// Exact coefficient ring: enough structure for series arithmetic,
/// differentiation, and reciprocal computation.
pub trait Coeff: Clone + PartialEq + std::fmt::Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_int(n: i64) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Exact division; `None` when the divisor is zero (or not invertible).
    fn div(&self, other: &Self) -> Option<Self>;
    fn is_zero(&self) -> bool;
}

impl Coeff for Rational {
    fn zero() -> Self {
        Rational::zero()
    }

    fn one() -> Self {
        Rational::one()
    }

    fn from_int(n: i64) -> Self {
        Rational::from_int(n)
    }

    fn add(&self, other: &Self) -> Self {
        self + other
    }

    fn sub(&self, other: &Self) -> Self {
        self - other
    }

    fn mul(&self, other: &Self) -> Self {
        self * other
    }

    fn neg(&self) -> Self {
        -self
    }

    fn div(&self, other: &Self) -> Option<Self> {
        if other.is_zero() {
            None
        } else {
            Some(self / other)
        }
    }

    fn is_zero(&self) -> bool {
        Rational::is_zero(self)
    }
}

impl Coeff for RatFun {
    fn zero() -> Self {
        RatFun::zero()
    }

    fn one() -> Self {
        RatFun::one()
    }

    fn from_int(n: i64) -> Self {
        RatFun::from_int(n)
    }

    fn add(&self, other: &Self) -> Self {
        RatFun::add(self, other)
    }

    fn sub(&self, other: &Self) -> Self {
        RatFun::sub(self, other)
    }

    fn mul(&self, other: &Self) -> Self {
        RatFun::mul(self, other)
    }

    fn neg(&self) -> Self {
        RatFun::neg(self)
    }

    fn div(&self, other: &Self) -> Option<Self> {
        RatFun::div(self, other).ok()
    }

    fn is_zero(&self) -> bool {
        RatFun::is_zero(self)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series<C> {
    /// Index k is the coefficient of z^k; the length is order + 1.
    coeffs: Vec<C>,
}

/// Series with plain rational coefficients.
pub type QSeries = Series<Rational>;
/// Series whose coefficients are rational functions of `eps` (and possibly `z`
/// as a formal coefficient variable, though in practice only `eps` appears).
pub type RSeries = Series<RatFun>;

impl<C: Coeff> Series<C> {
    pub fn from_coeffs(coeffs: Vec<C>) -> Self {
        assert!(!coeffs.is_empty(), "a series stores at least order 0");
        Series { coeffs }
    }

    pub fn zero(order: usize) -> Self {
        Series {
            coeffs: vec![C::zero(); order + 1],
        }
    }

    pub fn one(order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = C::one();
        s
    }

    /// The monomial z^k (zero if k exceeds the order).
    pub fn monomial(k: usize, order: usize) -> Self {
        let mut s = Self::zero(order);
        if k <= order {
            s.coeffs[k] = C::one();
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> C {
        self.coeffs.get(k).cloned().unwrap_or_else(C::zero)
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn set_coeff(&mut self, k: usize, c: C) {
        assert!(k < self.coeffs.len());
        self.coeffs[k] = c;
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(C::is_zero)
    }

    pub fn truncate(&self, order: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.truncate(order + 1);
        while coeffs.len() < order + 1 {
            coeffs.push(C::zero());
        }
        Series { coeffs }
    }

    pub fn add(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        let coeffs = (0..=order)
            .map(|k| self.coeffs[k].add(&other.coeffs[k]))
            .collect();
        Series { coeffs }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        let coeffs = (0..=order)
            .map(|k| self.coeffs[k].sub(&other.coeffs[k]))
            .collect();
        Series { coeffs }
    }

    pub fn neg(&self) -> Self {
        Series {
            coeffs: self.coeffs.iter().map(C::neg).collect(),
        }
    }

    pub fn scale(&self, k: &C) -> Self {
        Series {
            coeffs: self.coeffs.iter().map(|c| c.mul(k)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        let mut coeffs = vec![C::zero(); order + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(order + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(order + 1 - i) {
                if b.is_zero() {
                    continue;
                }
                coeffs[i + j] = coeffs[i + j].add(&a.mul(b));
            }
        }
        Series { coeffs }
    }

    /// d/dz; the result is reliable one order lower.
    pub fn derivative(&self) -> Self {
        if self.order() == 0 {
            return Series::zero(0);
        }
        let coeffs = (1..=self.order())
            .map(|k| self.coeffs[k].mul(&C::from_int(k as i64)))
            .collect();
        Series { coeffs }
    }

    /// The Euler operator z d/dz: multiplies the k-th coefficient by k.
    pub fn theta(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| c.mul(&C::from_int(k as i64)))
            .collect();
        Series { coeffs }
    }

    /// Multiply by z^k, truncating at the current order.
    pub fn shift_up(&self, k: usize) -> Self {
        let mut coeffs = vec![C::zero(); self.coeffs.len()];
        for (i, c) in self.coeffs.iter().enumerate() {
            if i + k < coeffs.len() {
                coeffs[i + k] = c.clone();
            }
        }
        Series { coeffs }
    }

    /// Multiplicative inverse; requires an invertible constant term.
    pub fn invert(&self) -> Result<Self> {
        let c0 = &self.coeffs[0];
        if c0.is_zero() {
            return Err(Error::SeriesNotInvertible);
        }
        let inv0 = C::one().div(c0).ok_or(Error::SeriesNotInvertible)?;
        let n = self.coeffs.len();
        let mut out = vec![C::zero(); n];
        out[0] = inv0.clone();
        for k in 1..n {
            // c0 * out[k] = -(sum_{j=1..k} self[j] * out[k-j])
            let mut acc = C::zero();
            for j in 1..=k {
                if self.coeffs[j].is_zero() {
                    continue;
                }
                acc = acc.add(&self.coeffs[j].mul(&out[k - j]));
            }
            out[k] = acc.neg().mul(&inv0);
        }
        Ok(Series { coeffs: out })
    }

    /// Map coefficients into another ring.
    pub fn map<D: Coeff>(&self, f: impl Fn(&C) -> D) -> Series<D> {
        Series {
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }
}
