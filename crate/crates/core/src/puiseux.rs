//! Puiseux series in `s^{-1/p}` and Laurent series in `u = exp(2πis)`.
//!
//! Index `k` of a [`PuiseuxSeries`] is the coefficient of `s^{-k/p}`, so the
//! underlying [`Laurent`] variable is `t = s^{-1/p}`. The shift `s ↦ s+1`
//! acts by `t ↦ t(1 + t^p)^{-1/p}`.

use crate::matrix::{Mat, SeriesField};
use crate::series::{binomials, Laurent};
use crate::{CMatrix, Error, Result, C64};
use std::f64::consts::PI;

fn check_finite(coeffs: &[C64]) -> Result<()> {
    if coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidInput("non-finite coefficient".into()))
    }
}

pub(crate) fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub(crate) fn lcm(a: u32, b: u32) -> u32 {
    (a as u64 / gcd(a as u64, b as u64) * b as u64) as u32
}

#[derive(Clone, Debug, PartialEq)]
pub struct PuiseuxSeries {
    p: u32,
    inner: Laurent,
}

impl PuiseuxSeries {
    /// Series `Σ coeffs[k] s^{-(v+k)/p}` trusted through `s^{-order/p}`.
    pub fn new(p: u32, v: i64, coeffs: Vec<C64>, order: i64) -> Result<Self> {
        if p == 0 {
            return Err(Error::InvalidInput(
                "ramification index must be >= 1".into(),
            ));
        }
        check_finite(&coeffs)?;
        if v + coeffs.len() as i64 - 1 > order {
            return Err(Error::InvalidInput(format!(
                "coefficients extend past trusted order {order}"
            )));
        }
        Ok(Self::from_laurent(p, Laurent::new(v, coeffs, order)))
    }

    pub fn from_laurent(p: u32, inner: Laurent) -> Self {
        assert!(p >= 1);
        Self { p, inner }
    }

    /// Real-coefficient convenience constructor.
    pub fn from_real(p: u32, v: i64, coeffs: &[f64], order: i64) -> Self {
        let c = coeffs.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::from_laurent(p, Laurent::new(v, c, order))
    }

    pub fn zero(p: u32, order: i64) -> Self {
        Self::from_laurent(p, Laurent::zero(order))
    }

    pub fn one(p: u32, order: i64) -> Self {
        Self::from_laurent(p, Laurent::one(order))
    }

    pub fn constant(p: u32, c: C64, order: i64) -> Self {
        Self::from_laurent(p, Laurent::constant(c, order))
    }

    /// `c·s^{-k/p}`.
    pub fn monomial(p: u32, c: C64, k: i64, order: i64) -> Self {
        Self::from_laurent(p, Laurent::monomial(c, k, order))
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn val(&self) -> i64 {
        self.inner.val()
    }

    pub fn order(&self) -> i64 {
        self.inner.order()
    }

    pub fn coeffs(&self) -> &[C64] {
        self.inner.coeffs()
    }

    pub fn coeff(&self, k: i64) -> C64 {
        self.inner.coeff(k)
    }

    pub fn inner(&self) -> &Laurent {
        &self.inner
    }

    pub fn is_zero(&self) -> bool {
        self.inner.is_zero()
    }

    pub fn lead(&self) -> Option<C64> {
        self.inner.lead()
    }

    pub fn max_abs(&self) -> f64 {
        self.inner.max_abs()
    }

    pub fn valuation_tol(&self, tol: f64) -> Option<i64> {
        self.inner.valuation_tol(tol)
    }

    pub fn truncate(&self, order: i64) -> Self {
        Self::from_laurent(self.p, self.inner.truncate(order))
    }

    /// Multiplication by `s^{-k/p}`.
    pub fn mul_monomial(&self, k: i64) -> Self {
        Self::from_laurent(self.p, self.inner.mul_monomial(k))
    }

    pub fn scale(&self, c: C64) -> Self {
        Self::from_laurent(self.p, self.inner.scale(c))
    }

    /// Re-expresses the series over `s^{-1/(p·m)}`.
    pub fn lift(&self, m: u32) -> Self {
        if m == 1 {
            return self.clone();
        }
        let m64 = m as i64;
        let order = (self.order() + 1) * m64 - 1;
        if self.is_zero() {
            return Self::zero(self.p * m, order);
        }
        let mut coeffs = vec![C64::new(0.0, 0.0); (self.coeffs().len() - 1) * m as usize + 1];
        for (k, c) in self.coeffs().iter().enumerate() {
            coeffs[k * m as usize] = *c;
        }
        Self::from_laurent(self.p * m, Laurent::new(self.val() * m64, coeffs, order))
    }

    pub fn lift_to(&self, p: u32) -> Self {
        assert!(p % self.p == 0, "cannot lift p={} to {}", self.p, p);
        self.lift(p / self.p)
    }

    fn aligned(&self, other: &Self) -> (Self, Self) {
        if self.p == other.p {
            return (self.clone(), other.clone());
        }
        let l = lcm(self.p, other.p);
        (self.lift_to(l), other.lift_to(l))
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.p == other.p {
            return Self::from_laurent(self.p, self.inner.add(&other.inner));
        }
        let (a, b) = self.aligned(other);
        a.add(&b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Self::from_laurent(self.p, self.inner.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.p == other.p {
            return Self::from_laurent(self.p, self.inner.mul(&other.inner));
        }
        let (a, b) = self.aligned(other);
        a.mul(&b)
    }

    pub fn inv(&self) -> Result<Self> {
        Ok(Self::from_laurent(self.p, self.inner.inv()?))
    }

    pub fn exp(&self) -> Result<Self> {
        Ok(Self::from_laurent(self.p, self.inner.exp()?))
    }

    /// Logarithm of a unit. `branch` adds `2πi·branch` to the constant term
    /// and is mandatory when the leading coefficient is a negative real.
    pub fn log(&self, branch: Option<i64>) -> Result<Self> {
        Ok(Self::from_laurent(self.p, self.inner.log(branch)?))
    }

    /// `self^alpha` for a unit with the principal power of its constant term.
    pub fn pow_unit(&self, alpha: C64) -> Result<Self> {
        Ok(Self::from_laurent(self.p, self.inner.pow_unit(alpha)?))
    }

    fn substitute(&self, sign: f64) -> Self {
        let order = self.order();
        let p = self.p as i64;
        let mut out = vec![C64::new(0.0, 0.0); (order - self.val() + 1).max(0) as usize];
        for (k, c) in self.inner.terms() {
            let count = ((order - k) / p + 1) as usize;
            let b = binomials(-(k as f64) / p as f64, count);
            for (n, bn) in b.iter().enumerate() {
                let sgn = if sign < 0.0 && n % 2 == 1 { -1.0 } else { 1.0 };
                out[(k - self.val()) as usize + n * p as usize] += c * (bn * sgn);
            }
        }
        Self::from_laurent(self.p, Laurent::new(self.val(), out, order))
    }

    /// `f(s) ↦ f(s+1)`.
    pub fn shift(&self) -> Self {
        self.substitute(1.0)
    }

    /// `f(s) ↦ f(s-1)`.
    pub fn unshift(&self) -> Self {
        self.substitute(-1.0)
    }

    /// Partial sum at `s0` with `arg s0` taken as the principal argument plus
    /// `2π·branch`. Returns the value and the modulus of the last included
    /// term.
    pub fn eval(&self, s0: C64, branch: i64) -> (C64, f64) {
        self.inner.eval(root_inv(s0, self.p, branch))
    }

    /// Lowest index whose coefficient is non-negligible relative to the
    /// largest coefficient, or `None` for numerically zero series.
    pub fn valuation_rel(&self, rel: f64) -> Option<i64> {
        self.valuation_tol(rel * self.max_abs())
    }
}

/// `s0^{-1/p}` on the requested sheet.
pub fn root_inv(s0: C64, p: u32, branch: i64) -> C64 {
    let arg = s0.arg() + 2.0 * PI * branch as f64;
    let z = C64::new(s0.norm().ln(), arg) / -(p as f64);
    z.exp()
}

/// `f^G = exp(G log f)` as a matrix of series, for `f` with constant term 1.
///
/// When `G = γI + N` with `N` nilpotent the result is `f^γ` (Miller
/// recurrence) times the finite sum `Σ N^k (log f)^k / k!`.
pub fn ps_matrix_pow(g: &CMatrix, f: &PuiseuxSeries) -> Result<Mat<PuiseuxSeries>> {
    if f.val() != 0 || (f.coeff(0) - C64::new(1.0, 0.0)).norm() > 1e-14 {
        return Err(Error::NotUnipotent);
    }
    let r = g.nrows();
    if g.ncols() != r {
        return Err(Error::ShapeMismatch("G must be square".into()));
    }
    let order = f.order();
    let p = f.p();
    let log_f = f.log(None)?;
    let scale = g.iter().map(|x| x.norm()).fold(0.0, f64::max).max(1.0);
    let gamma = g.trace() / r as f64;
    let nil = g - CMatrix::identity(r, r) * gamma;
    let nil_pow_r = (0..r).fold(CMatrix::identity(r, r), |acc, _| &acc * &nil);
    let nilpotent = nil_pow_r
        .iter()
        .all(|x| x.norm() <= 1e-12 * scale.powi(r as i32));

    let (prefactor, base, kmax) = if nilpotent {
        (f.pow_unit(gamma)?, nil, r.saturating_sub(1))
    } else {
        (
            PuiseuxSeries::one(p, order),
            g.clone(),
            order.max(0) as usize,
        )
    };

    let zero = PuiseuxSeries::zero(p, order);
    let mut out = Mat::from_fn(r, r, |i, j| {
        if i == j {
            PuiseuxSeries::one(p, order)
        } else {
            zero.clone()
        }
    });
    let mut lpow = PuiseuxSeries::one(p, order);
    let mut gpow = CMatrix::identity(r, r);
    let mut fact = 1.0;
    for k in 1..=kmax {
        lpow = lpow.mul(&log_f);
        if lpow.is_zero() {
            break;
        }
        gpow = &gpow * &base;
        fact *= k as f64;
        for i in 0..r {
            for j in 0..r {
                let c = gpow[(i, j)] / fact;
                if c != C64::new(0.0, 0.0) {
                    let e = out.get(i, j).add(&lpow.scale(c));
                    out.set(i, j, e);
                }
            }
        }
    }
    Ok(out.map(|e| e.mul(&prefactor)))
}

impl SeriesField for PuiseuxSeries {
    fn add(&self, o: &Self) -> Self {
        PuiseuxSeries::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        PuiseuxSeries::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        PuiseuxSeries::mul(self, o)
    }
    fn neg(&self) -> Self {
        PuiseuxSeries::neg(self)
    }
    fn inv(&self) -> Result<Self> {
        PuiseuxSeries::inv(self)
    }
    fn zero_like(&self) -> Self {
        PuiseuxSeries::zero(self.p, self.order())
    }
    fn one_like(&self) -> Self {
        PuiseuxSeries::one(self.p, self.order())
    }
    fn is_zero(&self) -> bool {
        PuiseuxSeries::is_zero(self)
    }
    fn valuation_tol(&self, tol: f64) -> Option<i64> {
        PuiseuxSeries::valuation_tol(self, tol)
    }
    fn strip_leading(&self, tol: f64) -> Self {
        Self::from_laurent(self.p, self.inner.strip_leading(tol))
    }
    fn max_abs(&self) -> f64 {
        PuiseuxSeries::max_abs(self)
    }
    fn order(&self) -> i64 {
        PuiseuxSeries::order(self)
    }
}

/// Truncated Laurent series in `u = exp(2πis)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LaurentU(pub Laurent);

impl LaurentU {
    pub fn new(v: i64, coeffs: Vec<C64>, order: i64) -> Result<Self> {
        check_finite(&coeffs)?;
        if !coeffs.is_empty() && v + coeffs.len() as i64 - 1 > order {
            return Err(Error::InvalidInput(format!(
                "coefficients extend past trusted order {order}"
            )));
        }
        Ok(Self(Laurent::new(v, coeffs, order)))
    }

    pub fn from_real(v: i64, coeffs: &[f64], order: i64) -> Self {
        Self(Laurent::new(
            v,
            coeffs.iter().map(|&x| C64::new(x, 0.0)).collect(),
            order,
        ))
    }

    pub fn zero(order: i64) -> Self {
        Self(Laurent::zero(order))
    }

    pub fn one(order: i64) -> Self {
        Self(Laurent::one(order))
    }

    pub fn monomial(c: C64, n: i64, order: i64) -> Self {
        Self(Laurent::monomial(c, n, order))
    }

    pub fn val(&self) -> i64 {
        self.0.val()
    }

    pub fn order(&self) -> i64 {
        self.0.order()
    }

    pub fn coeffs(&self) -> &[C64] {
        self.0.coeffs()
    }

    pub fn coeff(&self, n: i64) -> C64 {
        self.0.coeff(n)
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, C64)> + '_ {
        self.0.terms()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn degree(&self) -> Option<i64> {
        self.0.degree()
    }

    /// Value at `u`.
    pub fn eval(&self, u: C64) -> C64 {
        self.0.eval(u).0
    }

    /// Value at `u = exp(2πis)`.
    pub fn eval_at_s(&self, s: C64) -> C64 {
        self.eval((C64::new(0.0, 2.0 * PI) * s).exp())
    }
}

impl SeriesField for LaurentU {
    fn add(&self, o: &Self) -> Self {
        Self(self.0.add(&o.0))
    }
    fn sub(&self, o: &Self) -> Self {
        Self(self.0.sub(&o.0))
    }
    fn mul(&self, o: &Self) -> Self {
        Self(self.0.mul(&o.0))
    }
    fn neg(&self) -> Self {
        Self(self.0.neg())
    }
    fn inv(&self) -> Result<Self> {
        Ok(Self(self.0.inv()?))
    }
    fn zero_like(&self) -> Self {
        Self::zero(self.order())
    }
    fn one_like(&self) -> Self {
        Self::one(self.order())
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
    fn valuation_tol(&self, tol: f64) -> Option<i64> {
        self.0.valuation_tol(tol)
    }
    fn strip_leading(&self, tol: f64) -> Self {
        Self(self.0.strip_leading(tol))
    }
    fn max_abs(&self) -> f64 {
        self.0.max_abs()
    }
    fn order(&self) -> i64 {
        self.0.order()
    }
}
