//! The wild exponent lattice.
//!
//! An [`Exponent`] is `𝔞 = q·s·log(s^{1/p}) + Σ_{j=1}^{p} c_j s^{j/p}`,
//! kept in canonical form (minimal `p`). Dominance at a direction is decided
//! by the lexicographic growth signature of `Re 𝔞(R e^{iθ})` in the scales
//! `R log R`, `R`, `R^{(p-1)/p}`, ..., `R^{1/p}`.

use crate::puiseux::{gcd, lcm, PuiseuxSeries};
use crate::series::{binomials, Laurent};
use crate::{Error, Result, C64};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::f64::consts::{PI, TAU};

const ZERO: C64 = C64::new(0.0, 0.0);

#[derive(Clone, Debug, PartialEq)]
pub struct Exponent {
    p: u32,
    q: i64,
    c: Vec<C64>,
}

impl Exponent {
    /// `c[j-1]` is the coefficient of `s^{j/p}`; the result is canonicalized.
    pub fn new(p: u32, q: i64, c: Vec<C64>) -> Result<Self> {
        if p == 0 {
            return Err(Error::InvalidInput(
                "ramification index must be >= 1".into(),
            ));
        }
        if c.len() != p as usize {
            return Err(Error::InvalidInput(format!(
                "exponent with p = {p} needs {p} coefficients, got {}",
                c.len()
            )));
        }
        if c.iter().any(|x| !x.re.is_finite() || !x.im.is_finite()) {
            return Err(Error::InvalidInput("non-finite coefficient".into()));
        }
        Ok(Self::canonical(p, q, c))
    }

    fn canonical(p: u32, q: i64, c: Vec<C64>) -> Self {
        let mut g = gcd(p as u64, q.unsigned_abs());
        for (idx, cj) in c.iter().enumerate() {
            if *cj != ZERO {
                g = gcd(g, (idx + 1) as u64);
            }
        }
        let m = g.max(1) as usize;
        if m == 1 {
            return Self { p, q, c };
        }
        let c = (1..=p as usize / m).map(|j| c[j * m - 1]).collect();
        Self {
            p: p / m as u32,
            q: q / m as i64,
            c,
        }
    }

    pub fn zero() -> Self {
        Self {
            p: 1,
            q: 0,
            c: vec![ZERO],
        }
    }

    /// `q·s·log s + c·s`.
    pub fn unramified(q: i64, c: C64) -> Self {
        Self::canonical(1, q, vec![c])
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn q(&self) -> i64 {
        self.q
    }

    pub fn c(&self) -> &[C64] {
        &self.c
    }

    /// Coefficient of `s^{j/p}` (1-based).
    pub fn c_j(&self, j: usize) -> C64 {
        self.c[j - 1]
    }

    /// The coefficient of `s`.
    pub fn c_p(&self) -> C64 {
        self.c[self.p as usize - 1]
    }

    /// `λ = q/p`, the coefficient of `s log s`.
    pub fn lambda(&self) -> f64 {
        self.q as f64 / self.p as f64
    }

    pub fn is_zero(&self) -> bool {
        self.q == 0 && self.c.iter().all(|x| *x == ZERO)
    }

    /// `(q, c)` re-expressed over ramification `p` (a multiple of `self.p`).
    pub fn components(&self, p: u32) -> (i64, Vec<C64>) {
        assert!(p % self.p == 0, "cannot lift p={} to {}", self.p, p);
        let m = (p / self.p) as usize;
        let mut c = vec![ZERO; p as usize];
        for (idx, cj) in self.c.iter().enumerate() {
            c[(idx + 1) * m - 1] = *cj;
        }
        (self.q * m as i64, c)
    }

    fn combine(&self, other: &Self, sign: f64) -> Self {
        let p = lcm(self.p, other.p);
        let (q1, c1) = self.components(p);
        let (q2, c2) = other.components(p);
        let c = c1.iter().zip(&c2).map(|(a, b)| a + b * sign).collect();
        Self::canonical(p, q1 + (sign as i64) * q2, c)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, 1.0)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, -1.0)
    }

    /// Adds `2πi·n·s`.
    pub fn shift_2pin(&self, n: i64) -> Self {
        let mut c = self.c.clone();
        let last = c.len() - 1;
        c[last] += C64::new(0.0, TAU * n as f64);
        Self::canonical(self.p, self.q, c)
    }

    /// `𝔞(s)` with `log s = ln|s| + i(arg s + 2π·branch)`.
    pub fn eval(&self, s: C64, branch: i64) -> C64 {
        let log_s = C64::new(s.norm().ln(), s.arg() + TAU * branch as f64);
        let mut v = s * log_s * self.lambda();
        for (idx, cj) in self.c.iter().enumerate() {
            if *cj != ZERO {
                v += cj * (log_s * ((idx + 1) as f64 / self.p as f64)).exp();
            }
        }
        v
    }

    fn scale(&self) -> f64 {
        self.c
            .iter()
            .map(|x| x.norm())
            .fold(self.lambda().abs() * PI, f64::max)
            .max(1.0)
    }

    /// Growth signature of `Re 𝔞` at direction `theta`, using the principal
    /// argument `φ ∈ (−π, π]`.
    pub fn signature(&self, theta: f64) -> GrowthSignature {
        let phi = principal_angle(theta);
        let lam = self.lambda();
        let p = self.p as f64;
        let mut terms = Vec::with_capacity(self.p as usize + 1);
        terms.push((Scale::SLog, lam * phi.cos()));
        terms.push((
            Scale::Linear,
            -lam * phi * phi.sin() + (self.c_p() * C64::from_polar(1.0, phi)).re,
        ));
        for j in (1..self.p as usize).rev() {
            let w = C64::from_polar(1.0, j as f64 * phi / p);
            terms.push((Scale::Frac(j as u32, self.p), (self.c[j - 1] * w).re));
        }
        GrowthSignature {
            terms,
            zero_tol: 1e-12 * self.scale(),
        }
    }
}

/// A scale `|s| log|s|`, `|s|` or `|s|^{j/p}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scale {
    SLog,
    Linear,
    Frac(u32, u32),
}

impl std::fmt::Display for Scale {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Scale::SLog => write!(f, "slog"),
            Scale::Linear => write!(f, "linear"),
            Scale::Frac(j, p) => write!(f, "frac_{j}/{p}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GrowthSignature {
    pub terms: Vec<(Scale, f64)>,
    /// Coefficients at most this large in modulus count as zero.
    pub zero_tol: f64,
}

impl GrowthSignature {
    /// Sign of the first coefficient above the zero tolerance.
    pub fn leading_sign(&self) -> Ordering {
        for (_, x) in &self.terms {
            if x.abs() > self.zero_tol {
                return if *x < 0.0 {
                    Ordering::Less
                } else {
                    Ordering::Greater
                };
            }
        }
        Ordering::Equal
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "LT")]
    Lt,
    #[serde(rename = "LE_EQ_GE")]
    LeEqGe,
    #[serde(rename = "GT")]
    Gt,
    #[serde(rename = "EQUAL")]
    Equal,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Verdict::Lt => "LT",
            Verdict::LeEqGe => "LE_EQ_GE",
            Verdict::Gt => "GT",
            Verdict::Equal => "EQUAL",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

/// Reduces an angle to `[0, 2π)`.
pub fn reduce_angle(theta: f64) -> f64 {
    let r = theta.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Reduces an angle to `(−π, π]`.
pub fn principal_angle(theta: f64) -> f64 {
    let r = reduce_angle(theta);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

/// Dominance of `a` against `b` at direction `theta`: `Lt` means
/// `exp(a − b)` decays rapidly there.
pub fn dominance_at(a: &Exponent, b: &Exponent, theta: f64) -> Verdict {
    let d = a.sub(b);
    if d.is_zero() {
        return Verdict::Equal;
    }
    match d.signature(theta).leading_sign() {
        Ordering::Less => Verdict::Lt,
        Ordering::Greater => Verdict::Gt,
        Ordering::Equal => Verdict::LeEqGe,
    }
}

/// Directions in `[0, 2π)` where the verdict of `(a, b)` changes, sorted.
pub fn stokes_directions(a: &Exponent, b: &Exponent) -> Result<Vec<f64>> {
    let d = a.sub(b);
    if d.is_zero() {
        return Err(Error::IdenticalExponents);
    }
    let mut dirs = Vec::new();
    if d.q() != 0 {
        dirs.push(PI / 2.0);
        dirs.push(3.0 * PI / 2.0);
    } else {
        let p = d.p() as f64;
        let j0 = (1..=d.p() as usize)
            .rev()
            .find(|&j| d.c_j(j) != ZERO)
            .expect("nonzero exponent has a nonzero coefficient");
        let c = d.c_j(j0);
        let w = j0 as f64 / p;
        // Re(c e^{i w φ}) = 0  ⇔  φ = (π/2 + kπ − arg c) / w
        let kmax = (w + 2.0).ceil() as i64 + 1;
        for k in -kmax..=kmax {
            let phi = (PI / 2.0 + k as f64 * PI - c.arg()) / w;
            if phi > -PI && phi < PI {
                dirs.push(reduce_angle(phi));
            }
        }
        let delta = 1e-9;
        if dominance_at(a, b, PI - delta) != dominance_at(a, b, -PI + delta) {
            dirs.push(PI);
        }
    }
    dirs.sort_by(|x, y| x.total_cmp(y));
    dirs.dedup_by(|x, y| (*x - *y).abs() < 1e-12);
    Ok(dirs)
}

/// `exp(𝔞(s+1) − 𝔞(s))` as a series in `s^{-1/p}` trusted through
/// `s^{-order/p}`.
pub fn exp_cocycle(a: &Exponent, order: i64) -> Result<PuiseuxSeries> {
    let p = a.p() as i64;
    let lam = a.lambda();
    let inner_order = order + a.q();
    if inner_order < 0 {
        return Ok(PuiseuxSeries::zero(a.p(), order));
    }
    let mut v = vec![ZERO; inner_order as usize + 1];
    // λ[(s+1)log(s+1) − s log s − log s − 1]
    if a.q() != 0 {
        let mut n = 1;
        while n * p <= inner_order {
            let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
            v[(n * p) as usize] += C64::new(lam * sign / (n * (n + 1)) as f64, 0.0);
            n += 1;
        }
    }
    // c_j[(s+1)^{j/p} − s^{j/p}] without the constant c_p
    for j in 1..p {
        let cj = a.c_j(j as usize);
        if cj == ZERO {
            continue;
        }
        let count = ((inner_order + j) / p + 1) as usize;
        let b = binomials(j as f64 / p as f64, count);
        for (n, bn) in b.iter().enumerate().skip(1) {
            let idx = n as i64 * p - j;
            if idx <= inner_order {
                v[idx as usize] += cj * *bn;
            }
        }
    }
    let unit = Laurent::new(0, v, inner_order).exp()?;
    let lead = (C64::new(lam, 0.0) + a.c_p()).exp();
    let series = unit.scale(lead).mul_monomial(-a.q());
    Ok(PuiseuxSeries::from_laurent(a.p(), series))
}

fn tol_cmp(x: f64, y: f64) -> Ordering {
    if (x - y).abs() <= 1e-12 * x.abs().max(y.abs()).max(1.0) {
        Ordering::Equal
    } else if x < y {
        Ordering::Less
    } else {
        Ordering::Greater
    }
}

fn common_p(list: &[&Exponent]) -> u32 {
    list.iter().fold(1, |acc, e| lcm(acc, e.p()))
}

/// `Less` when `a` must come before `b` in the given parity ordering.
fn precedence(a: &Exponent, b: &Exponent, parity: Parity) -> Ordering {
    let p = common_p(&[a, b]);
    let (qa, ca) = a.components(p);
    let (qb, cb) = b.components(p);
    let pu = p as usize;
    match parity {
        Parity::Even => {
            let ord = qb.cmp(&qa);
            if ord != Ordering::Equal {
                return ord;
            }
            for mu in (1..=pu).rev() {
                let ord = tol_cmp(cb[mu - 1].re, ca[mu - 1].re);
                if ord != Ordering::Equal {
                    return ord;
                }
            }
            Ordering::Equal
        }
        Parity::Odd => {
            let ord = qa.cmp(&qb);
            if ord != Ordering::Equal {
                return ord;
            }
            let ord = tol_cmp(ca[pu - 1].re, cb[pu - 1].re);
            if ord != Ordering::Equal {
                return ord;
            }
            for mu in (1..pu).rev() {
                let rot = C64::from_polar(1.0, mu as f64 * PI / (2.0 * p as f64));
                let ord = tol_cmp((rot * cb[mu - 1]).re, (rot * ca[mu - 1]).re);
                if ord != Ordering::Equal {
                    return ord;
                }
            }
            Ordering::Equal
        }
    }
}

/// Stable ordering permutation: `perm[k]` is the input index placed at `k`.
pub fn order_exponents(list: &[Exponent], parity: Parity) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..list.len()).collect();
    for i in 1..perm.len() {
        let mut k = i;
        while k > 0 && precedence(&list[perm[k]], &list[perm[k - 1]], parity) == Ordering::Less {
            perm.swap(k, k - 1);
            k -= 1;
        }
    }
    perm
}

/// Whether `list` is already ordered for `parity`.
pub fn is_ordered(list: &[Exponent], parity: Parity) -> bool {
    list.windows(2)
        .all(|w| precedence(&w[0], &w[1], parity) != Ordering::Greater)
}

fn half_shift_if_integral(a: f64) -> f64 {
    if (a - a.round()).abs() < 1e-12 {
        a.round() - 0.5
    } else {
        a
    }
}

/// Threshold `A` splitting `h(u) = h_+ + h_-` at `n > A` / `n ≤ A`.
///
/// For odd parity the admissibility condition `n ≥ A_odd` is inclusive;
/// the returned value is shifted by `1/2` when `A_odd` is an integer so that
/// the strict cut `n > A` selects the same powers.
pub fn split_threshold(ai: &Exponent, aj: &Exponent, parity: Parity) -> Result<f64> {
    if ai.sub(aj).is_zero() {
        return Err(Error::IdenticalExponents);
    }
    let p = common_p(&[ai, aj]);
    let (qi, ci) = ai.components(p);
    let (qj, cj) = aj.components(p);
    let cpi = ci[p as usize - 1];
    let cpj = cj[p as usize - 1];
    match parity {
        Parity::Even => {
            if precedence(ai, aj, Parity::Even) == Ordering::Greater {
                return Err(Error::UnsortedExponents);
            }
            let im = (cpj - cpi).im / TAU;
            if qi != qj {
                Ok((qi - qj) as f64 / (4.0 * p as f64) + im)
            } else if tol_cmp(cpi.re, cpj.re) != Ordering::Equal {
                Ok(im)
            } else {
                Ok(half_shift_if_integral(im))
            }
        }
        Parity::Odd => {
            let a_odd = (aj.lambda() - ai.lambda()) / 4.0 + (cpi - cpj).im / TAU;
            Ok(half_shift_if_integral(a_odd))
        }
    }
}

/// Inclusive odd-parity bound `n ≥ A_odd`.
pub fn odd_bound(ai: &Exponent, aj: &Exponent) -> f64 {
    let p = common_p(&[ai, aj]);
    let cpi = ai.components(p).1[p as usize - 1];
    let cpj = aj.components(p).1[p as usize - 1];
    (aj.lambda() - ai.lambda()) / 4.0 + (cpi - cpj).im / TAU
}
