//! Adaptive composite Gauss–Legendre quadrature for vector-valued
//! integrands on real intervals.

use crate::{CVector, Error, Result};
use std::f64::consts::PI;
use std::sync::OnceLock;

/// Nodes and weights on `[-1, 1]`, computed by Newton iteration on `P_n`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

struct Rule {
    x: Vec<f64>,
    w: Vec<f64>,
}

fn rules() -> &'static (Rule, Rule) {
    static R: OnceLock<(Rule, Rule)> = OnceLock::new();
    R.get_or_init(|| {
        let (x8, w8) = gauss_legendre(8);
        let (x16, w16) = gauss_legendre(16);
        (Rule { x: x8, w: w8 }, Rule { x: x16, w: w16 })
    })
}

fn apply(rule: &Rule, f: &dyn Fn(f64) -> CVector, a: f64, b: f64) -> CVector {
    let h = 0.5 * (b - a);
    let m = 0.5 * (a + b);
    let mut acc: Option<CVector> = None;
    for (x, w) in rule.x.iter().zip(&rule.w) {
        let v = f(m + h * x) * crate::C64::new(w * h, 0.0);
        acc = Some(match acc {
            Some(s) => s + v,
            None => v,
        });
    }
    acc.expect("non-empty rule")
}

#[derive(Clone, Debug, PartialEq)]
pub struct Integral {
    pub value: CVector,
    pub error: f64,
    pub panels: usize,
}

const MAX_DEPTH: u32 = 40;
const ROUNDING_FLOOR: f64 = 64.0 * f64::EPSILON;

/// Integrates `f` over `[a, b]` to absolute tolerance `tol`, bisecting any
/// panel whose 16- and 8-point results disagree by more than its share of
/// `tol / 4`. Panels whose disagreement is at rounding level relative to
/// their own value are accepted regardless of `tol`.
pub fn integrate(f: &dyn Fn(f64) -> CVector, a: f64, b: f64, tol: f64) -> Result<Integral> {
    let (r8, r16) = rules();
    let mut stack = vec![(a, b, tol / 4.0, 0u32)];
    let mut value: Option<CVector> = None;
    let mut error = 0.0;
    let mut panels = 0;
    while let Some((lo, hi, t, depth)) = stack.pop() {
        let hi_res = apply(r16, f, lo, hi);
        let lo_res = apply(r8, f, lo, hi);
        let diff = (&hi_res - &lo_res).norm();
        if !diff.is_finite() {
            return Err(Error::QuadratureFailure);
        }
        let floor = ROUNDING_FLOOR * hi_res.norm();
        if diff <= t.max(floor) {
            error += diff;
            panels += 1;
            value = Some(match value {
                Some(v) => v + hi_res,
                None => hi_res,
            });
        } else if depth >= MAX_DEPTH {
            return Err(Error::QuadratureFailure);
        } else {
            let mid = 0.5 * (lo + hi);
            stack.push((mid, hi, t / 2.0, depth + 1));
            stack.push((lo, mid, t / 2.0, depth + 1));
        }
    }
    Ok(Integral {
        value: value.expect("at least one panel"),
        error,
        panels,
    })
}
