//! Numerical solution operators for `A(s)Λ(s+1) − Λ(s) = f(s)`.
//!
//! Two constructions are provided: the telescoping series
//! `Λ = −f(s) − Σ_n A(s)⋯A(s+n) f(s+n+1)` and the contour integral
//! `Λ = −f(s) + Y(s) ∫_{C(s)} Y(ζ)^{-1} f(ζ) / (1 − e^{2πi(s−ζ)}) dζ`
//! along a polyline from an anchor to `s + 1/2` followed by the upward
//! vertical ray.

use crate::diffmod::{DifferenceModule, GradedBlock};
use crate::matrix::lstsq;
use crate::quadrature::integrate;
use crate::{CMatrix, CVector, Error, Result, C64};
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use std::fmt;
use std::sync::Arc;

pub type MatrixFn = Arc<dyn Fn(C64) -> CMatrix + Send + Sync>;
pub type VectorFn = Arc<dyn Fn(C64) -> CVector + Send + Sync>;

const I: C64 = C64 { re: 0.0, im: 1.0 };

fn log_branch(s: C64, branch: i64) -> C64 {
    C64::new(s.norm().ln(), s.arg() + TAU * branch as f64)
}

fn mat_pow_log(g: &CMatrix, log: C64) -> CMatrix {
    (g * log).exp()
}

#[derive(Clone)]
pub struct NumericModule {
    rank: usize,
    eval_a: MatrixFn,
    block: Option<GradedBlock>,
    branch: i64,
}

impl fmt::Debug for NumericModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NumericModule")
            .field("rank", &self.rank)
            .field("block", &self.block)
            .field("branch", &self.branch)
            .finish()
    }
}

impl NumericModule {
    pub fn new(rank: usize, eval_a: MatrixFn) -> Self {
        Self {
            rank,
            eval_a,
            block: None,
            branch: 0,
        }
    }

    /// Constant coefficient matrix.
    pub fn constant(a: CMatrix) -> Self {
        let rank = a.nrows();
        Self::new(rank, Arc::new(move |_| a.clone()))
    }

    /// `A(s) = exp(𝔞(s+1) − 𝔞(s)) (1 + s^{-1})^G`, whose fundamental solution
    /// is `Y(s) = exp(−𝔞(s)) s^{-G}`.
    pub fn from_block(block: GradedBlock, branch: i64) -> Self {
        let b = block.clone();
        let eval_a: MatrixFn = Arc::new(move |s: C64| {
            let da = b.exponent.eval(s + 1.0, branch) - b.exponent.eval(s, branch);
            let l = (C64::new(1.0, 0.0) + s.inv()).ln();
            mat_pow_log(&b.g, l) * da.exp()
        });
        Self {
            rank: block.size(),
            eval_a,
            block: Some(block),
            branch,
        }
    }

    /// Numeric evaluation of a truncated module through its Puiseux series.
    pub fn from_module(m: &DifferenceModule, branch: i64) -> Self {
        let m = m.clone();
        Self::new(m.rank(), Arc::new(move |s| m.eval(s, branch)))
    }

    pub fn with_block(mut self, block: GradedBlock, branch: i64) -> Result<Self> {
        if block.size() != self.rank {
            return Err(Error::ShapeMismatch(
                "block size differs from module rank".into(),
            ));
        }
        self.block = Some(block);
        self.branch = branch;
        Ok(self)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn block(&self) -> Option<&GradedBlock> {
        self.block.as_ref()
    }

    pub fn a(&self, s: C64) -> CMatrix {
        (self.eval_a)(s)
    }

    pub fn fundamental(&self) -> Option<FundamentalSolution> {
        self.block.clone().map(|block| FundamentalSolution {
            block,
            branch: self.branch,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FundamentalSolution {
    pub block: GradedBlock,
    pub branch: i64,
}

impl FundamentalSolution {
    /// `Y(s) = exp(−𝔞(s)) s^{-G}`.
    pub fn eval(&self, s: C64) -> CMatrix {
        let e = (-self.block.exponent.eval(s, self.branch)).exp();
        mat_pow_log(&self.block.g, -log_branch(s, self.branch)) * e
    }

    /// `Y(s) Y(ζ)^{-1}`, formed without evaluating either factor alone.
    pub fn ratio(&self, s: C64, zeta: C64) -> CMatrix {
        let a = &self.block.exponent;
        let e = (a.eval(zeta, self.branch) - a.eval(s, self.branch)).exp();
        let l = log_branch(zeta, self.branch) - log_branch(s, self.branch);
        mat_pow_log(&self.block.g, l) * e
    }

    /// `‖A(s)Y(s+1) − Y(s)‖ / ‖Y(s)‖`.
    pub fn relation_residual(&self, m: &NumericModule, s: C64) -> f64 {
        let y = self.eval(s);
        (m.a(s) * self.eval(s + 1.0) - &y).norm() / y.norm()
    }
}

fn check_vector(v: &CVector, rank: usize, s: C64) -> Result<()> {
    if v.len() != rank {
        return Err(Error::ShapeMismatch(format!(
            "rhs has length {}, module rank is {rank}",
            v.len()
        )));
    }
    if v.iter().any(|x| !x.re.is_finite() || !x.im.is_finite()) {
        return Err(Error::EvaluationFailure(s));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct SeriesResult {
    pub value: CVector,
    pub terms: usize,
    /// `‖A(s0)Λ(s0+1) − Λ(s0) − f(s0)‖`.
    pub residual: f64,
}

const DIVERGENCE_RUN: usize = 50;

fn series_value(
    m: &NumericModule,
    f: &dyn Fn(C64) -> CVector,
    s: C64,
    tol: f64,
    max_terms: usize,
) -> Result<(CVector, usize)> {
    let f0 = f(s);
    check_vector(&f0, m.rank, s)?;
    let mut acc = -f0;
    let mut prod = CMatrix::identity(m.rank, m.rank);
    let mut prev = f64::INFINITY;
    let mut prev_ratio = f64::INFINITY;
    let mut run = 0;
    for n in 0..max_terms {
        let sn = s + n as f64;
        prod *= m.a(sn);
        let fn1 = f(sn + 1.0);
        check_vector(&fn1, m.rank, sn + 1.0)?;
        let term = &prod * fn1;
        let norm = term.norm();
        if !norm.is_finite() {
            return Err(Error::Divergent(n));
        }
        acc -= term;
        let scale = acc.norm().max(1.0);
        let ratio = if prev > 0.0 { norm / prev } else { 0.0 };
        let rho = ratio.max(prev_ratio.min(1.0));
        let tail = if rho < 1.0 {
            norm * rho / (1.0 - rho)
        } else {
            f64::INFINITY
        };
        if norm == 0.0 || (norm <= tol * scale && tail <= tol * scale) {
            return Ok((acc, n + 1));
        }
        if norm >= prev {
            run += 1;
            if run >= DIVERGENCE_RUN {
                return Err(Error::Divergent(n));
            }
        } else {
            run = 0;
        }
        prev_ratio = ratio;
        prev = norm;
    }
    Err(Error::MaxTermsExceeded(max_terms))
}

/// Telescoping-series solution at `s0`, with the defining relation checked
/// against a second evaluation at `s0 + 1`.
pub fn lambda_series(
    m: &NumericModule,
    f: &dyn Fn(C64) -> CVector,
    s0: C64,
    tol: f64,
    max_terms: usize,
) -> Result<SeriesResult> {
    let (value, terms) = series_value(m, f, s0, tol, max_terms)?;
    let (next, _) = series_value(m, f, s0 + 1.0, tol, max_terms)?;
    let residual = (m.a(s0) * next - &value - f(s0)).norm();
    Ok(SeriesResult {
        value,
        terms,
        residual,
    })
}

/// Integration contour: the polyline from `anchor` through `waypoints` to
/// `s + 1/2`, then the ray `s + 1/2 + iy`, `y ≥ 0`, truncated adaptively
/// starting at height `t_init`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Path {
    pub anchor: C64,
    #[serde(default)]
    pub waypoints: Vec<C64>,
    pub t_init: f64,
}

pub const POLE_GUARD: f64 = 0.25;
const RAY_DOUBLINGS: u32 = 14;

fn segment_pole_distance(a: C64, b: C64) -> f64 {
    let d = b - a;
    let lo = a.re.min(b.re).floor() as i64 - 1;
    let hi = a.re.max(b.re).ceil() as i64 + 1;
    (lo..=hi)
        .map(|k| {
            let p = C64::new(k as f64, 0.0);
            let t = if d.norm_sqr() > 0.0 {
                (((p - a) * d.conj()).re / d.norm_sqr()).clamp(0.0, 1.0)
            } else {
                0.0
            };
            (a + d * t - p).norm()
        })
        .fold(f64::INFINITY, f64::min)
}

impl Path {
    pub fn new(anchor: C64) -> Self {
        Self {
            anchor,
            waypoints: Vec::new(),
            t_init: 4.0,
        }
    }

    /// Anchor one unit below `s0 + 1/2`.
    pub fn below(s0: C64) -> Self {
        Self::new(s0 + C64::new(0.5, -1.0))
    }

    pub fn via(mut self, waypoints: Vec<C64>) -> Self {
        self.waypoints = waypoints;
        self
    }

    /// Vertices of the finite part for the target `s + 1/2`.
    pub fn vertices(&self, s: C64) -> Vec<C64> {
        let mut v = vec![self.anchor];
        v.extend(&self.waypoints);
        v.push(s + 0.5);
        v
    }

    /// Smallest distance from the path to the kernel poles `s + ℤ`.
    pub fn min_pole_distance(&self, s: C64) -> f64 {
        self.vertices(s)
            .windows(2)
            .map(|w| segment_pole_distance(w[0] - s, w[1] - s))
            .fold(0.5, f64::min)
    }
}

/// `1 / (1 − e^{2πi(s−ζ)})`, evaluated without overflow.
pub fn kernel(s: C64, zeta: C64) -> C64 {
    let w = TAU * I * (s - zeta);
    if w.re > 0.0 {
        let e = (-w).exp();
        -e / (1.0 - e)
    } else {
        1.0 / (1.0 - w.exp())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IntegralResult {
    pub value: CVector,
    /// Quadrature error estimate plus the ray tail estimate.
    pub error: f64,
    pub t_max: f64,
    pub twist: i64,
    /// `‖A(s0)Λ(s0+1) − Λ(s0) − f(s0)‖`.
    pub residual: f64,
    /// `residual / ‖f(s0)‖`.
    pub relative_residual: f64,
}

struct Integrand<'a> {
    y: FundamentalSolution,
    f: &'a dyn Fn(C64) -> CVector,
    s: C64,
    twist: i64,
}

impl Integrand<'_> {
    fn at(&self, zeta: C64) -> CVector {
        let tw = (TAU * I * self.twist as f64 * (zeta - self.s)).exp();
        self.y.ratio(self.s, zeta) * (self.f)(zeta) * (kernel(self.s, zeta) * tw)
    }
}

fn tail_estimate(g: &dyn Fn(f64) -> CVector, t: f64) -> f64 {
    let tip = g(t).norm();
    if tip == 0.0 {
        return 0.0;
    }
    let half = g(t / 2.0).norm();
    let kappa = (half / tip).ln() / (t / 2.0);
    if kappa > 0.0 && kappa.is_finite() {
        tip / kappa
    } else {
        f64::INFINITY
    }
}

fn integral_value(
    m: &NumericModule,
    f: &dyn Fn(C64) -> CVector,
    s: C64,
    path: &Path,
    tol: f64,
    twist: i64,
) -> Result<(CVector, f64, f64)> {
    let y = m
        .fundamental()
        .ok_or_else(|| Error::InvalidInput("integral mode needs a graded block".into()))?;
    let dist = path.min_pole_distance(s);
    if dist < POLE_GUARD {
        return Err(Error::KernelPoleProximity(dist));
    }
    let f0 = f(s);
    check_vector(&f0, m.rank, s)?;
    let ig = Integrand { y, f, s, twist };
    let target = s + 0.5;
    let ray = |t: f64| ig.at(target + I * t) * I;
    let verts = path.vertices(s);
    let mut total = CVector::zeros(m.rank);
    let mut error = 0.0;
    let pieces = (verts.len() - 1) as f64;
    for w in verts.windows(2) {
        let (a, dz) = (w[0], w[1] - w[0]);
        let seg = |t: f64| ig.at(a + dz * t) * dz;
        let r = integrate(&seg, 0.0, 1.0, tol / (2.0 * pieces))?;
        total += r.value;
        error += r.error;
    }
    let mut lo = 0.0;
    let mut hi = path.t_init;
    let mut budget = tol / 4.0;
    loop {
        let piece = integrate(&ray, lo, hi, budget)?;
        total += piece.value;
        error += piece.error;
        budget /= 2.0;
        let tail = tail_estimate(&ray, hi);
        if tail <= tol / 4.0 {
            error += tail;
            break;
        }
        if hi >= path.t_init * f64::powi(2.0, RAY_DOUBLINGS as i32) {
            return Err(Error::RayTruncationTooLow(tail));
        }
        lo = hi;
        hi *= 2.0;
    }
    if total.iter().any(|x| !x.re.is_finite() || !x.im.is_finite()) {
        return Err(Error::QuadratureFailure);
    }
    Ok((total - f0, error, hi))
}

/// Smallest `n ∈ [0, max_n]` for which `Y(ζ)^{-1} u^n f(ζ)` decays along the
/// ray above `s0 + 1/2`, judged from samples at heights 8, 16, 32.
pub fn default_twist(
    m: &NumericModule,
    f: &dyn Fn(C64) -> CVector,
    s0: C64,
    max_n: i64,
) -> Result<i64> {
    let y = m
        .fundamental()
        .ok_or_else(|| Error::InvalidInput("integral mode needs a graded block".into()))?;
    let heights = [8.0, 16.0, 32.0];
    let mut logs = Vec::with_capacity(heights.len());
    for h in heights {
        let z = s0 + C64::new(0.5, h);
        let v = (y.ratio(s0, z) * f(z)).norm().ln();
        if v.is_nan() || v == f64::INFINITY {
            return Err(Error::EvaluationFailure(z));
        }
        logs.push(v);
    }
    if logs.iter().all(|v| *v == f64::NEG_INFINITY) {
        return Ok(0);
    }
    for n in 0..=max_n {
        let tw: Vec<f64> = logs
            .iter()
            .zip(heights)
            .map(|(v, h)| v - TAU * n as f64 * h)
            .collect();
        let decays = tw
            .windows(2)
            .zip(heights.windows(2))
            .all(|(v, h)| (v[1] - v[0]) / (h[1] - h[0]) < -1e-2);
        if decays {
            return Ok(n);
        }
    }
    Err(Error::DecayProbeFailed(max_n))
}

/// Contour-integral solution at `s0`. With `twist = None` the pre-twist
/// `u^n` is chosen by [`default_twist`]; the result is divided by `u(s0)^n`
/// so it solves the equation for `f` itself.
pub fn lambda_integral(
    m: &NumericModule,
    f: &dyn Fn(C64) -> CVector,
    s0: C64,
    path: &Path,
    tol: f64,
    twist: Option<i64>,
) -> Result<IntegralResult> {
    let twist = match twist {
        Some(n) => n,
        None => default_twist(m, f, s0, 16)?,
    };
    let (value, error, t_max) = integral_value(m, f, s0, path, tol, twist)?;
    let (next, _, _) = integral_value(m, f, s0 + 1.0, path, tol, twist)?;
    let f0 = f(s0);
    let residual = (m.a(s0) * next - &value - &f0).norm();
    let fnorm = f0.norm();
    Ok(IntegralResult {
        value,
        error,
        t_max,
        twist,
        residual,
        relative_residual: if fnorm > 0.0 {
            residual / fnorm
        } else {
            residual
        },
    })
}

/// Propagates `Λ(s0)` to `s0 + k` through the difference relation; returns
/// the values at `s0, s0 ± 1, …, s0 + k`.
pub fn lambda_continue(
    m: &NumericModule,
    f: &dyn Fn(C64) -> CVector,
    s0: C64,
    value: &CVector,
    k: i64,
) -> Result<Vec<(C64, CVector)>> {
    let mut out = vec![(s0, value.clone())];
    let mut s = s0;
    let mut v = value.clone();
    for _ in 0..k.unsigned_abs() {
        if k > 0 {
            let rhs = &v + f(s);
            v = m.a(s).lu().solve(&rhs).ok_or(Error::NonInvertible)?;
            s += 1.0;
        } else {
            s -= 1.0;
            v = m.a(s) * &v - f(s);
        }
        out.push((s, v.clone()));
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Upper,
    Lower,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Growth {
    Decaying,
    Moderate,
    Growing,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UModerateReport {
    pub strip: (f64, f64),
    pub n: i64,
    pub side: Side,
    /// `(|Im s|, max over Re s of log|u^{±N} h|)`; `None` marks overflow.
    pub samples: Vec<(f64, Option<f64>)>,
    /// Exponential rate in `|Im s|`, `None` when a sample overflowed.
    pub rate: Option<f64>,
    pub verdict: Growth,
}

pub const PROBE_BASE: f64 = 20.0;
const RATE_TOL: f64 = 1e-2;

/// Coefficient `b` of the least-squares fit `v ≈ a + b·y + c·ln y`, so that
/// power-law factors do not register as exponential growth.
fn exponential_rate(pts: &[(f64, f64)]) -> f64 {
    let x = CMatrix::from_fn(pts.len(), 3, |i, j| {
        C64::from(match j {
            0 => 1.0,
            1 => pts[i].0,
            _ => pts[i].0.ln(),
        })
    });
    let v = CVector::from_iterator(pts.len(), pts.iter().map(|p| C64::from(p.1)));
    lstsq(&x, &v, 1e-14, 0.0).0[1].re
}

/// Growth probe of `u^N h` on the upper strip (or `u^{-N} h` on the lower
/// strip) over `Re s ∈ strip`. Takes `log h` so that values beyond the
/// floating-point range stay representable.
pub fn check_u_moderate(
    log_h: &dyn Fn(C64) -> C64,
    strip: (f64, f64),
    n: i64,
    side: Side,
) -> Result<UModerateReport> {
    let sign = match side {
        Side::Upper => 1.0,
        Side::Lower => -1.0,
    };
    let mut samples = Vec::with_capacity(4);
    let mut overflow = false;
    for k in 0..4 {
        let y = PROBE_BASE * f64::powi(2.0, k);
        let mut best = f64::NEG_INFINITY;
        for j in 0..=4 {
            let x = strip.0 + (strip.1 - strip.0) * j as f64 / 4.0;
            let s = C64::new(x, sign * y);
            let v = log_h(s).re;
            if v.is_nan() {
                return Err(Error::EvaluationFailure(s));
            }
            best = best.max(v);
        }
        let v = best - TAU * n as f64 * y;
        if v == f64::INFINITY || v.is_nan() {
            overflow = true;
            samples.push((y, None));
        } else {
            samples.push((y, Some(v)));
        }
    }
    let rate = if overflow {
        None
    } else {
        let pts: Vec<(f64, f64)> = samples.iter().map(|(y, v)| (*y, v.unwrap())).collect();
        if pts.iter().any(|(_, v)| *v == f64::NEG_INFINITY) {
            Some(f64::NEG_INFINITY)
        } else {
            Some(exponential_rate(&pts))
        }
    };
    let verdict = match rate {
        None => Growth::Growing,
        Some(r) if r < -RATE_TOL => Growth::Decaying,
        Some(r) if r > RATE_TOL => Growth::Growing,
        Some(_) => Growth::Moderate,
    };
    Ok(UModerateReport {
        strip,
        n,
        side,
        samples,
        rate: rate.filter(|r| r.is_finite()),
        verdict,
    })
}
