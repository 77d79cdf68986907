//! Truncated Laurent series in a single formal variable `t`.
//!
//! A [`Laurent`] stores finitely many coefficients starting at `t^val` and
//! an explicit trust order: the series is known through `t^order`
//! inclusive, everything above is `O(t^{order+1})`. Every operation
//! propagates the trust order by the usual min-rule and never extends it.
//!
//! This is the arithmetic engine behind [`crate::puiseux::PuiseuxSeries`]
//! (with `t = s^{-1/p}`) and [`crate::puiseux::LaurentU`] (with `t = u`).

use crate::{Error, Result, C64};
use std::f64::consts::PI;

#[derive(Clone, Debug, PartialEq)]
pub struct Laurent {
    val: i64,
    coeffs: Vec<C64>,
    order: i64,
}

impl Laurent {
    /// Builds a series from coefficients of `t^val, t^{val+1}, ...`,
    /// dropping anything beyond `order` and normalizing leading zeros.
    pub fn new(val: i64, mut coeffs: Vec<C64>, order: i64) -> Self {
        let keep = (order - val + 1).max(0) as usize;
        coeffs.truncate(keep);
        while coeffs.last().is_some_and(|c| *c == C64::new(0.0, 0.0)) {
            coeffs.pop();
        }
        let lead = coeffs.iter().position(|c| *c != C64::new(0.0, 0.0));
        match lead {
            None => Self::zero(order),
            Some(k) => {
                coeffs.drain(..k);
                Self {
                    val: val + k as i64,
                    coeffs,
                    order,
                }
            }
        }
    }

    /// `O(t^{order+1})`.
    pub fn zero(order: i64) -> Self {
        Self {
            val: order + 1,
            coeffs: Vec::new(),
            order,
        }
    }

    pub fn one(order: i64) -> Self {
        Self::monomial(C64::new(1.0, 0.0), 0, order)
    }

    pub fn constant(c: C64, order: i64) -> Self {
        Self::monomial(c, 0, order)
    }

    pub fn monomial(c: C64, k: i64, order: i64) -> Self {
        if k > order {
            return Self::zero(order);
        }
        Self::new(k, vec![c], order)
    }

    pub fn val(&self) -> i64 {
        self.val
    }

    pub fn order(&self) -> i64 {
        self.order
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient of `t^k` (zero outside the stored range).
    pub fn coeff(&self, k: i64) -> C64 {
        if k < self.val {
            return C64::new(0.0, 0.0);
        }
        self.coeffs
            .get((k - self.val) as usize)
            .copied()
            .unwrap_or(C64::new(0.0, 0.0))
    }

    pub fn lead(&self) -> Option<C64> {
        self.coeffs.first().copied()
    }

    /// Highest stored exponent, if any.
    pub fn degree(&self) -> Option<i64> {
        if self.is_zero() {
            None
        } else {
            Some(self.val + self.coeffs.len() as i64 - 1)
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Iterator over `(exponent, coefficient)` of stored terms.
    pub fn terms(&self) -> impl Iterator<Item = (i64, C64)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(k, c)| (self.val + k as i64, *c))
    }

    /// First exponent whose coefficient exceeds `tol` in modulus.
    pub fn valuation_tol(&self, tol: f64) -> Option<i64> {
        self.terms().find(|(_, c)| c.norm() > tol).map(|(k, _)| k)
    }

    /// Drops leading coefficients of modulus at most `tol`.
    pub fn strip_leading(&self, tol: f64) -> Self {
        match self.valuation_tol(tol) {
            Some(v) if v > self.val => {
                let skip = (v - self.val) as usize;
                Self::new(v, self.coeffs[skip..].to_vec(), self.order)
            }
            Some(_) => self.clone(),
            None => Self::zero(self.order),
        }
    }

    /// Lowers the trust order.
    pub fn truncate(&self, order: i64) -> Self {
        if order >= self.order {
            return self.clone();
        }
        Self::new(self.val, self.coeffs.clone(), order)
    }

    /// Multiplication by `t^k`.
    pub fn mul_monomial(&self, k: i64) -> Self {
        Self {
            val: self.val + k,
            coeffs: self.coeffs.clone(),
            order: self.order + k,
        }
    }

    pub fn scale(&self, c: C64) -> Self {
        Self::new(
            self.val,
            self.coeffs.iter().map(|x| x * c).collect(),
            self.order,
        )
    }

    pub fn neg(&self) -> Self {
        self.scale(C64::new(-1.0, 0.0))
    }

    pub fn add(&self, other: &Self) -> Self {
        let order = self.order.min(other.order);
        let lo = self.val.min(other.val);
        if lo > order {
            return Self::zero(order);
        }
        let coeffs = (lo..=order)
            .map(|k| self.coeff(k) + other.coeff(k))
            .collect();
        Self::new(lo, coeffs, order)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let order = (self.order + other.val).min(other.order + self.val);
        if self.is_zero() || other.is_zero() {
            return Self::zero(order);
        }
        let val = self.val + other.val;
        if val > order {
            return Self::zero(order);
        }
        let n = (order - val + 1) as usize;
        let mut out = vec![C64::new(0.0, 0.0); n];
        for (i, a) in self.coeffs.iter().enumerate().take(n) {
            for (j, b) in other.coeffs.iter().enumerate().take(n - i) {
                out[i + j] += a * b;
            }
        }
        Self::new(val, out, order)
    }

    /// Multiplicative inverse; relative precision is preserved.
    pub fn inv(&self) -> Result<Self> {
        let a0 = self.lead().ok_or(Error::ZeroLeadingCoefficient)?;
        let prec = self.order - self.val;
        let val = -self.val;
        let n = (prec + 1).max(0) as usize;
        let mut b = vec![C64::new(0.0, 0.0); n];
        if n > 0 {
            b[0] = a0.inv();
        }
        for m in 1..n {
            let mut acc = C64::new(0.0, 0.0);
            for k in 1..=m {
                acc += self.coeffs.get(k).copied().unwrap_or_default() * b[m - k];
            }
            b[m] = -acc * b[0];
        }
        Ok(Self::new(val, b, val + prec))
    }

    /// `exp` of a series without pole part.
    pub fn exp(&self) -> Result<Self> {
        if self.is_zero() {
            return Ok(Self::one(self.order));
        }
        if self.val < 0 {
            return Err(Error::PoleInExponential(self.val));
        }
        let order = self.order;
        if order < 0 {
            return Ok(Self::zero(order));
        }
        let c0 = self.coeff(0);
        let n = (order + 1) as usize;
        let mut g = vec![C64::new(0.0, 0.0); n];
        g[0] = C64::new(1.0, 0.0);
        for m in 1..n {
            let mut acc = C64::new(0.0, 0.0);
            for k in 1..=m {
                acc += self.coeff(k as i64) * (k as f64) * g[m - k];
            }
            g[m] = acc / (m as f64);
        }
        let e0 = c0.exp();
        Ok(Self::new(0, g.into_iter().map(|x| x * e0).collect(), order))
    }

    /// Logarithm of a unit (valuation 0). A negative real leading coefficient
    /// requires `branch` to be given; the constant term is
    /// `ln|a0| + i(arg a0 + 2π·branch)`.
    pub fn log(&self, branch: Option<i64>) -> Result<Self> {
        let a0 = self.lead().ok_or(Error::ZeroLeadingCoefficient)?;
        if self.val != 0 {
            return Err(Error::NonUnitLogarithm(self.val));
        }
        if a0.im == 0.0 && a0.re < 0.0 && branch.is_none() {
            return Err(Error::BranchAmbiguity);
        }
        let k = branch.unwrap_or(0) as f64;
        let l0 = C64::new(a0.norm().ln(), a0.arg() + 2.0 * PI * k);
        let n = (self.order + 1).max(0) as usize;
        let mut l = vec![C64::new(0.0, 0.0); n];
        if n > 0 {
            l[0] = l0;
        }
        for m in 1..n {
            let mut acc = C64::new(0.0, 0.0);
            for k in 1..m {
                acc += l[k] * (k as f64) * self.coeff((m - k) as i64);
            }
            l[m] = (self.coeff(m as i64) - acc / (m as f64)) / a0;
        }
        Ok(Self::new(0, l, self.order))
    }

    /// `a^alpha` for a unit `a` (principal branch for the leading
    /// coefficient), by the J.C.P. Miller recurrence.
    pub fn pow_unit(&self, alpha: C64) -> Result<Self> {
        let a0 = self.lead().ok_or(Error::ZeroLeadingCoefficient)?;
        if self.val != 0 {
            return Err(Error::NonUnitLogarithm(self.val));
        }
        let n = (self.order + 1).max(0) as usize;
        let mut g = vec![C64::new(0.0, 0.0); n];
        if n > 0 {
            g[0] = if a0 == C64::new(1.0, 0.0) {
                a0
            } else {
                a0.powc(alpha)
            };
        }
        for m in 1..n {
            let mut acc = C64::new(0.0, 0.0);
            for k in 1..=m {
                let f = (alpha + 1.0) * (k as f64) - (m as f64);
                acc += f * self.coeff(k as i64) * g[m - k];
            }
            g[m] = acc / (a0 * m as f64);
        }
        Ok(Self::new(0, g, self.order))
    }

    /// Partial sum at `t = t0` and the modulus of the last included term.
    pub fn eval(&self, t0: C64) -> (C64, f64) {
        let mut sum = C64::new(0.0, 0.0);
        let mut last = 0.0;
        for (k, c) in self.terms() {
            let term = c * t0.powi(k as i32);
            sum += term;
            last = term.norm();
        }
        (sum, last)
    }
}

/// Generalized binomial coefficients `binom(alpha, n)` for `n = 0..len`.
pub fn binomials(alpha: f64, len: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(len);
    let mut b = 1.0;
    for n in 0..len {
        if n > 0 {
            b *= (alpha - (n as f64 - 1.0)) / n as f64;
        }
        out.push(b);
    }
    out
}
