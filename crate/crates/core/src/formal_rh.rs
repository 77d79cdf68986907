//! Formal conjugation `B(s) F(s+1) = F(s) A(s+1)` and residual checks.
//!
//! `F` is sought as `s^{-m/p}(F₀ + F₁ s^{-1/p} + …)` with `F₀ = I`. Writing
//! the residual coefficient at `s^{-(v₀+m+w)/p}` as `R_w`, the contribution
//! of `F_{k}` to `R_w` is a linear operator depending on `d = w − k` and on
//! `k`. Because the leading part of the operator is typically singular
//! (equal leading coefficients of `A` and `B`), `F_k` is determined by a
//! window of equations `R_k..R_{k+δ}` solved jointly with the next `δ`
//! coefficients; only `F_k` is kept.

use crate::diffmod::DifferenceModule;
use crate::matrix::{lstsq, Mat};
use crate::puiseux::{lcm, PuiseuxSeries};
use crate::series::binomials;
use crate::{CMatrix, Error, Result, C64};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::f64::consts::FRAC_PI_2;

/// A valuation, or `Infinite` for a series that vanishes within its trusted
/// order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    pub fn exceeds(&self, n: i64) -> bool {
        match self {
            Valuation::Finite(v) => *v > n,
            Valuation::Infinite => true,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ConjugationProblem {
    pub a: DifferenceModule,
    pub b: DifferenceModule,
    /// `m` in `F = s^{-m/p}(F₀ + …)`.
    pub lead: i64,
    pub order: i64,
}

fn block_index(offsets: &[usize], sizes: &[usize], i: usize) -> usize {
    (0..offsets.len())
        .find(|&k| i >= offsets[k] && i < offsets[k] + sizes[k])
        .expect("index inside graded layout")
}

fn exponents_equal(a: &crate::exponents::Exponent, b: &crate::exponents::Exponent) -> bool {
    let d = a.sub(b);
    d.q() == 0 && d.c().iter().all(|x| x.norm() <= 1e-12)
}

/// Allowed entries of `F`; off-diagonal blocks between distinct exponents
/// are excluded when both modules carry graded data.
fn entry_mask(a: &DifferenceModule, b: &DifferenceModule) -> Result<Vec<(usize, usize)>> {
    let r = a.rank();
    let all: Vec<(usize, usize)> = (0..r).flat_map(|i| (0..r).map(move |j| (i, j))).collect();
    let (ma, mb) = match (a.meta(), b.meta()) {
        (Some(x), Some(y)) => (x, y),
        _ => return Ok(all),
    };
    // multisets of (exponent, size) must agree
    let mut pool: Vec<_> = ma
        .blocks
        .iter()
        .map(|x| (x.exponent.clone(), x.size()))
        .collect();
    for blk in &mb.blocks {
        let pos = pool
            .iter()
            .position(|(e, n)| *n == blk.size() && exponents_equal(e, &blk.exponent))
            .ok_or(Error::ExponentMismatch)?;
        pool.swap_remove(pos);
    }
    let sizes_a: Vec<usize> = ma.blocks.iter().map(|x| x.size()).collect();
    let sizes_b: Vec<usize> = mb.blocks.iter().map(|x| x.size()).collect();
    let (oa, ob) = (ma.offsets(), mb.offsets());
    Ok(all
        .into_iter()
        .filter(|&(i, j)| {
            let bi = block_index(&ob, &sizes_b, i);
            let aj = block_index(&oa, &sizes_a, j);
            exponents_equal(&mb.blocks[bi].exponent, &ma.blocks[aj].exponent)
        })
        .collect())
}

/// Coefficients of `R(s) = B(s−1)F(s) − F(s−1)A(s)`, the conjugation
/// equation moved to `s − 1`. The unshift has positive binomial weights, so
/// no cancelling re-expansion of `A(s+1)` is needed.
struct Operator<'a> {
    r: usize,
    p: i64,
    m: i64,
    left: &'a [CMatrix],
    right: &'a [CMatrix],
    vars: &'a [(usize, usize)],
    bins: HashMap<i64, Vec<f64>>,
}

impl Operator<'_> {
    /// Coefficient of `s^{-n}` in `(1 − s^{-1})^{-(m+kp)/p}`.
    fn binom(&mut self, kp: i64, n: usize) -> f64 {
        let len = self.right.len() / self.p as usize + 2;
        let (p, m) = (self.p, self.m);
        let b = self
            .bins
            .entry(kp)
            .or_insert_with(|| binomials(-((m + kp) as f64) / p as f64, len))[n];
        if n % 2 == 1 {
            -b
        } else {
            b
        }
    }

    /// Size of the individual products in [`Self::apply`] before they cancel.
    fn apply_size(&mut self, d: usize, kp: i64, x: &CMatrix) -> f64 {
        let xn = x.norm();
        let mut size = xn * self.left[d].norm();
        let mut n = 0;
        while n * self.p as usize <= d {
            size += xn * self.binom(kp, n).abs() * self.right[d - n * self.p as usize].norm();
            n += 1;
        }
        size
    }

    /// Contribution of `F_{kp} = x` to `R_{kp+d}`.
    fn apply(&mut self, d: usize, kp: i64, x: &CMatrix) -> CMatrix {
        let mut y = &self.left[d] * x;
        let mut n = 0;
        while n * self.p as usize <= d {
            let b = self.binom(kp, n);
            if b != 0.0 {
                y -= x * &self.right[d - n * self.p as usize] * C64::new(b, 0.0);
            }
            n += 1;
        }
        y
    }

    fn matrix(&mut self, d: usize, kp: i64) -> DMatrix<C64> {
        let r = self.r;
        let mut out = DMatrix::zeros(r * r, self.vars.len());
        for (col, &(a, b)) in self.vars.to_vec().iter().enumerate() {
            let mut e = CMatrix::zeros(r, r);
            e[(a, b)] = C64::new(1.0, 0.0);
            let y = self.apply(d, kp, &e);
            for i in 0..r {
                for j in 0..r {
                    out[(i * r + j, col)] = y[(i, j)];
                }
            }
        }
        out
    }

    fn unpack(&self, v: &[C64]) -> CMatrix {
        let mut x = CMatrix::zeros(self.r, self.r);
        for (val, &(a, b)) in v.iter().zip(self.vars) {
            x[(a, b)] = *val;
        }
        x
    }
}

/// Minimum-norm least-squares solution and whether it is consistent.
///
/// `cancelled` is the size of the known terms before they were summed into
/// `rhs`, and `data` the size of the coefficients `L` was assembled from, so
/// that rounding noise in a vanishing right-hand side or operator is not
/// mistaken for inconsistency or for a genuine direction.
fn min_norm_solve(
    l: &DMatrix<C64>,
    rhs: &DVector<C64>,
    cancelled: f64,
    data: f64,
) -> (DVector<C64>, bool) {
    let (x, sv) = lstsq(l, rhs, 1e-10, 1e-10 * data);
    let smax = sv.first().copied().unwrap_or(0.0);
    let res = (l * &x - rhs).norm();
    let scale = rhs.norm() + smax * x.norm() + cancelled;
    (x, res <= 1e-9 * scale + 64.0 * f64::EPSILON * data)
}

fn coefficient_matrices(m: &Mat<PuiseuxSeries>, v0: i64, count: usize) -> Vec<CMatrix> {
    (0..count)
        .map(|i| CMatrix::from_fn(m.rows(), m.cols(), |a, b| m.get(a, b).coeff(v0 + i as i64)))
        .collect()
}

/// Solves the conjugation equation through `s^{-(m+N)/p}`.
pub fn solve_conjugation(prob: &ConjugationProblem) -> Result<Mat<PuiseuxSeries>> {
    let r = prob.a.rank();
    if prob.b.rank() != r {
        return Err(Error::ShapeMismatch(format!(
            "A has rank {r}, B has rank {}",
            prob.b.rank()
        )));
    }
    if prob.order < 0 {
        return Err(Error::InvalidInput("order must be non-negative".into()));
    }
    let p = lcm(prob.a.p(), prob.b.p());
    let a = prob.a.lift_to(p);
    let b = prob.b.lift_to(p);
    let vars = entry_mask(&a, &b)?;

    let bm = b.matrix().map(|e| e.unshift());
    let sa = a.matrix();
    // size of the leading coefficients; later ones may grow factorially
    let lowest = bm
        .iter()
        .chain(sa.iter())
        .filter_map(|e| e.valuation_tol(0.0))
        .min()
        .ok_or(Error::ZeroInput)?;
    let scale = bm
        .iter()
        .chain(sa.iter())
        .flat_map(|e| (lowest..lowest + 2 * p as i64).map(|k| e.coeff(k).norm()))
        .fold(0.0, f64::max);
    let tol = 1e-14 * scale;
    let vals: Vec<i64> = bm
        .iter()
        .chain(sa.iter())
        .filter_map(|e| e.valuation_tol(tol))
        .collect();
    let v0 = *vals.iter().min().ok_or(Error::ZeroInput)?;
    let diag_max = (0..r)
        .flat_map(|i| [bm.get(i, i), sa.get(i, i)])
        .filter_map(|e| e.valuation_tol(tol))
        .max()
        .unwrap_or(v0);
    let delta = (p as i64 + diag_max - v0) as usize;
    let n = prob.order as usize;
    let k_max = n + delta;
    let available = bm.min_order().min(sa.min_order());
    if v0 + k_max as i64 > available {
        return Err(Error::InsufficientOrder {
            needed: v0 + k_max as i64,
            available,
        });
    }
    let bc = coefficient_matrices(&bm, v0, k_max + 1);
    let ac = coefficient_matrices(sa, v0, k_max + 1);
    let mut op = Operator {
        r,
        p: p as i64,
        m: prob.lead,
        left: &bc,
        right: &ac,
        vars: &vars,
        bins: HashMap::new(),
    };
    let nv = vars.len();
    let rr = r * r;
    let data = (0..=delta)
        .map(|d| bc[d].norm() + ac[d].norm())
        .fold(0.0, f64::max);
    let mut fixed: Vec<CMatrix> = vec![CMatrix::identity(r, r)];

    for k in 0..=n {
        // unknowns F_first..F_{k+δ}; at k = 0 the first coefficient is fixed
        let first = if k == 0 { 1 } else { k };
        let count = k + delta + 1 - first;
        let mut l = DMatrix::<C64>::zeros((delta + 1) * rr, count * nv);
        let mut rhs = DVector::<C64>::zeros((delta + 1) * rr);
        let mut cancelled = 0.0;
        for (row, w) in (k..=k + delta).enumerate() {
            for kp in first..=w {
                let blk = op.matrix(w - kp, kp as i64);
                l.view_mut((row * rr, (kp - first) * nv), (rr, nv))
                    .copy_from(&blk);
            }
            let mut known = CMatrix::zeros(r, r);
            for (kp, f) in fixed.iter().enumerate().take(first) {
                cancelled += op.apply_size(w - kp, kp as i64, f);
                known += op.apply(w - kp, kp as i64, f);
            }
            for i in 0..r {
                for j in 0..r {
                    rhs[row * rr + i * r + j] = -known[(i, j)];
                }
            }
        }
        let (x, ok) = min_norm_solve(&l, &rhs, cancelled, data);
        if !ok {
            return Err(if k == 0 {
                Error::NormalizationFailed
            } else {
                Error::ResonantOrder(k)
            });
        }
        if k > 0 {
            let fk = op.unpack(&x.as_slice()[..nv]);
            fixed.push(fk);
        }
    }

    let m = prob.lead;
    Ok(Mat::from_fn(r, r, |i, j| {
        let coeffs = fixed.iter().map(|f| f[(i, j)]).collect();
        PuiseuxSeries::from_laurent(p, crate::series::Laurent::new(m, coeffs, m + n as i64))
    }))
}

/// Valuation of `B·F(s+1) − F·A(s+1)`; coefficients below `1e-9` times the
/// size of the two products count as zero.
pub fn residual(
    f: &Mat<PuiseuxSeries>,
    a: &DifferenceModule,
    b: &DifferenceModule,
) -> Result<Valuation> {
    let p = f.iter().fold(lcm(a.p(), b.p()), |acc, e| lcm(acc, e.p()));
    let f = f.map(|e| e.lift_to(p));
    let a = a.lift_to(p);
    let b = b.lift_to(p);
    let lhs = b.matrix().mul(&f.map(|e| e.shift()))?;
    let rhs = f.mul(&a.matrix().map(|e| e.shift()))?;
    let res = lhs.sub(&rhs)?;
    // coefficientwise size of the products before cancellation
    let fa = f.map(absolute);
    let size = b
        .matrix()
        .map(absolute)
        .mul(&fa.map(shift_majorant))?
        .add(&fa.mul(&a.matrix().map(|e| shift_majorant(&absolute(e))))?)?;
    let mut val = None::<i64>;
    for (e, w) in res.iter().zip(size.iter()) {
        let first = (e.val()..e.order()).find(|&k| {
            e.coeff(k).norm() > 1e-9 * w.coeff(k).norm() + 64.0 * f64::EPSILON * w.max_abs()
        });
        if let Some(k) = first {
            val = Some(val.map_or(k, |v| v.min(k)));
        }
    }
    Ok(val.map_or(Valuation::Infinite, Valuation::Finite))
}

fn absolute(e: &PuiseuxSeries) -> PuiseuxSeries {
    let cs = e.coeffs().iter().map(|c| C64::new(c.norm(), 0.0)).collect();
    PuiseuxSeries::new(e.p(), e.val(), cs, e.order()).expect("same layout")
}

/// `shift` with every binomial weight replaced by its absolute value.
fn shift_majorant(e: &PuiseuxSeries) -> PuiseuxSeries {
    let p = e.p() as i64;
    let (v, order) = (e.val(), e.order());
    let len = (order - v).max(0) as usize;
    let mut cs = vec![C64::new(0.0, 0.0); len];
    for (i, c) in e.coeffs().iter().enumerate() {
        let k = v + i as i64;
        if k >= order || c.norm() == 0.0 {
            continue;
        }
        let nmax = ((order - k + p - 1) / p) as usize;
        for (n, b) in binomials(-(k as f64) / p as f64, nmax).iter().enumerate() {
            let at = k + n as i64 * p;
            if at < order {
                cs[(at - v) as usize] += c * b.abs();
            }
        }
    }
    PuiseuxSeries::new(e.p(), v, cs, order).expect("same layout")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LiftReport {
    /// `max ‖F(s+1) − B(s)^{-1} F(s) A(s+1)‖` over the grid.
    pub functional_residual: f64,
    /// `max ‖F(s) − F̂^{[N]}(s)‖·|s|^{N/p}` over the grid.
    pub bound_constant: f64,
    /// `(|s|, ‖F(s) − F̂^{[N]}(s)‖·|s|^{N/p})` per grid point.
    pub samples: Vec<(f64, f64)>,
}

fn max_entry(m: &CMatrix) -> f64 {
    m.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

/// Whether `s` lies in `Q(v, k) = {v + r e^{iϑ} : kπ/2 < ϑ < (k+1)π/2}`.
pub fn in_quadrant(s: C64, v: C64, k: i64) -> bool {
    let d = s - v;
    if d.norm() == 0.0 {
        return false;
    }
    let lo = k as f64 * FRAC_PI_2;
    let rel = (d.arg() - lo).rem_euclid(std::f64::consts::TAU);
    rel > 0.0 && rel < FRAC_PI_2
}

/// Numerical check of a candidate lift `F` sampled on a quadrant grid.
#[allow(clippy::too_many_arguments)]
pub fn numeric_lift_check(
    f: &dyn Fn(C64) -> CMatrix,
    grid: &[C64],
    quadrant: (C64, i64),
    a: &DifferenceModule,
    b: &DifferenceModule,
    fhat: &Mat<PuiseuxSeries>,
    n: i64,
    branch: i64,
) -> Result<LiftReport> {
    for &s in grid {
        if s.norm() < 10.0 || !in_quadrant(s, quadrant.0, quadrant.1) {
            return Err(Error::GridOutsideQuadrant(s));
        }
    }
    let p = fhat.iter().fold(1, |acc, e| lcm(acc, e.p()));
    let partial = fhat.map(|e| e.truncate(n));
    let mut functional = 0.0f64;
    let mut samples = Vec::with_capacity(grid.len());
    for &s in grid {
        let fs = f(s);
        let fs1 = f(s + 1.0);
        let binv = b
            .eval(s, branch)
            .try_inverse()
            .ok_or(Error::NonInvertible)?;
        let a1 = a.eval(s + 1.0, branch);
        functional = functional.max(max_entry(&(fs1 - binv * &fs * a1)));
        let fh = CMatrix::from_fn(fs.nrows(), fs.ncols(), |i, j| {
            partial.get(i, j).eval(s, branch).0
        });
        let c = max_entry(&(fs - fh)) * s.norm().powf(n as f64 / p as f64);
        samples.push((s.norm(), c));
    }
    let bound_constant = samples.iter().map(|x| x.1).fold(0.0, f64::max);
    Ok(LiftReport {
        functional_residual: functional,
        bound_constant,
        samples,
    })
}

impl Valuation {
    pub fn as_option(&self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(*v),
            Valuation::Infinite => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffmod::{mk_elementary, GradedBlock};
    use crate::exponents::Exponent;

    const ZERO: C64 = C64::new(0.0, 0.0);

    fn r(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn scalar(v: i64, c: &[f64], order: i64) -> DifferenceModule {
        DifferenceModule::new(Mat::from_fn(1, 1, |_, _| {
            PuiseuxSeries::from_real(1, v, c, order)
        }))
        .unwrap()
    }

    fn assert_identity(f: &Mat<PuiseuxSeries>, order: i64) {
        for i in 0..f.rows() {
            for j in 0..f.cols() {
                for k in 0..=order {
                    let want = if k == 0 && i == j { 1.0 } else { 0.0 };
                    assert!((f.get(i, j).coeff(k) - r(want)).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn identity_conjugation_constant_module() {
        let a = mk_elementary(
            &GradedBlock::scalar(Exponent::unramified(0, r(0.7)), r(0.0)),
            30,
        )
        .unwrap();
        let f = solve_conjugation(&ConjugationProblem {
            a: a.clone(),
            b: a.clone(),
            lead: 0,
            order: 12,
        })
        .unwrap();
        assert_identity(&f, 12);
        assert_eq!(residual(&f, &a, &a).unwrap(), Valuation::Infinite);
    }

    #[test]
    fn identity_conjugation_shifted_module() {
        let a = mk_elementary(
            &GradedBlock::scalar(Exponent::unramified(-1, r(1.0)), r(0.5)),
            30,
        )
        .unwrap();
        let b = DifferenceModule::new(a.matrix().map(|e| e.shift())).unwrap();
        let f = solve_conjugation(&ConjugationProblem {
            a: a.clone(),
            b: b.clone(),
            lead: 0,
            order: 12,
        })
        .unwrap();
        assert_identity(&f, 12);
        assert_eq!(residual(&f, &a, &b).unwrap(), Valuation::Infinite);
    }

    #[test]
    fn s_plus_one() {
        let a = scalar(0, &[1.0, 1.0], 30);
        let b = scalar(0, &[1.0], 30);
        let f = solve_conjugation(&ConjugationProblem {
            a: a.clone(),
            b: b.clone(),
            lead: -1,
            order: 20,
        })
        .unwrap();
        let e = f.get(0, 0);
        assert_eq!(e.val(), -1);
        assert!((e.coeff(-1) - r(1.0)).norm() < 1e-12);
        assert!((e.coeff(0) - r(1.0)).norm() < 1e-12);
        for k in 1..=e.order() {
            assert!(e.coeff(k).norm() < 1e-12);
        }
        assert!(residual(&f, &a, &b).unwrap().exceeds(20));
    }

    #[test]
    fn s_plus_one_squared() {
        let a = scalar(0, &[1.0, 2.0, 1.0], 30);
        let b = scalar(0, &[1.0], 30);
        let f = solve_conjugation(&ConjugationProblem {
            a,
            b,
            lead: -2,
            order: 20,
        })
        .unwrap();
        let e = f.get(0, 0);
        for (k, w) in [(-2, 1.0), (-1, 2.0), (0, 1.0)] {
            assert!((e.coeff(k) - r(w)).norm() < 1e-11);
        }
        for k in 1..=e.order() {
            assert!(e.coeff(k).norm() < 1e-11);
        }
    }

    #[test]
    fn residual_of_wrong_gauge() {
        let a = scalar(0, &[1.0, 1.0], 10);
        let b = scalar(0, &[1.0], 10);
        let id = Mat::from_fn(1, 1, |_, _| PuiseuxSeries::one(1, 10));
        assert_eq!(residual(&id, &a, &b).unwrap(), Valuation::Finite(1));
    }

    #[test]
    fn normalization_failure() {
        let a = scalar(0, &[2.0], 20);
        let b = scalar(0, &[1.0], 20);
        let err = solve_conjugation(&ConjugationProblem {
            a,
            b,
            lead: 0,
            order: 4,
        });
        assert_eq!(err, Err(Error::NormalizationFailed));
    }

    #[test]
    fn leading_mismatch_fails_normalization() {
        let a = scalar(0, &[1.0], 20);
        let b = scalar(0, &[1.0, 1.0], 20);
        let err = solve_conjugation(&ConjugationProblem {
            a,
            b,
            lead: 0,
            order: 4,
        });
        assert_eq!(err, Err(Error::NormalizationFailed));
    }

    #[test]
    fn resonance_is_reported() {
        // γ = (0, 1) with a coupling s^{-2} in the (2,1) slot: needs log s
        let e = |v, c: &[f64]| PuiseuxSeries::from_real(1, v, c, 20);
        let b = Mat::from_rows(vec![
            vec![e(0, &[1.0]), e(0, &[])],
            vec![e(0, &[]), e(0, &[1.0, 1.0])],
        ])
        .unwrap();
        let a = Mat::from_rows(vec![
            vec![e(0, &[1.0]), e(0, &[])],
            vec![e(2, &[1.0]), e(0, &[1.0, 1.0])],
        ])
        .unwrap();
        let err = solve_conjugation(&ConjugationProblem {
            a: DifferenceModule::new(a).unwrap(),
            b: DifferenceModule::new(b).unwrap(),
            lead: 0,
            order: 6,
        });
        assert_eq!(err, Err(Error::ResonantOrder(1)));
    }

    #[test]
    fn insufficient_order() {
        let a = scalar(0, &[1.0, 1.0], 5);
        let b = scalar(0, &[1.0], 5);
        let err = solve_conjugation(&ConjugationProblem {
            a,
            b,
            lead: -1,
            order: 10,
        });
        assert!(matches!(err, Err(Error::InsufficientOrder { .. })));
    }

    #[test]
    fn quadrant_membership() {
        assert!(in_quadrant(C64::new(20.0, 5.0), ZERO, 0));
        assert!(!in_quadrant(C64::new(-20.0, 5.0), ZERO, 0));
        assert!(in_quadrant(C64::new(-20.0, 5.0), ZERO, 1));
        assert!(in_quadrant(C64::new(-20.0, -5.0), ZERO, -2));
    }

    #[test]
    fn lift_check_exact_and_perturbed() {
        let a = scalar(0, &[1.0, 1.0], 30);
        let b = scalar(0, &[1.0], 30);
        let fhat = Mat::from_fn(1, 1, |_, _| {
            PuiseuxSeries::from_real(1, -1, &[1.0, 1.0], 20)
        });
        let grid: Vec<C64> = (1..=8)
            .map(|k| C64::from_polar(10.0 * k as f64, 0.6))
            .collect();
        let exact = |s: C64| CMatrix::from_element(1, 1, s + 1.0);
        let rep = numeric_lift_check(&exact, &grid, (ZERO, 0), &a, &b, &fhat, 1, 0).unwrap();
        assert!(rep.functional_residual < 1e-10);
        assert!(rep.bound_constant < 1e-10);
        let bumped = |s: C64| CMatrix::from_element(1, 1, s + 1.0 + 1e-3 * (s.im).sin());
        let rep = numeric_lift_check(&bumped, &grid, (ZERO, 0), &a, &b, &fhat, 1, 0).unwrap();
        assert!(rep.functional_residual > 1e-5 && rep.functional_residual < 1e-2);
        let bad = [C64::new(-20.0, 1.0)];
        assert!(matches!(
            numeric_lift_check(
                &exact,
                &[C64::new(2.0, 1.0)],
                (ZERO, 0),
                &a,
                &b,
                &fhat,
                1,
                0
            ),
            Err(Error::GridOutsideQuadrant(_))
        ));
        assert!(matches!(
            numeric_lift_check(&exact, &bad, (ZERO, 0), &a, &b, &fhat, 10, 0),
            Err(Error::GridOutsideQuadrant(_))
        ));
    }

    #[test]
    fn lift_check_bound_decreases_for_own_expansion() {
        // only the expansion bound matters here
        let b = scalar(0, &[1.0], 30);
        let a = scalar(0, &[1.0], 30);
        let fhat = Mat::from_fn(1, 1, |_, _| {
            PuiseuxSeries::from_real(1, 0, &[1.0, 1.0], 30)
                .inv()
                .unwrap()
        });
        let grid: Vec<C64> = [20.0, 40.0, 80.0, 160.0]
            .iter()
            .map(|&r| C64::from_polar(r, 0.4))
            .collect();
        let f = |s: C64| CMatrix::from_element(1, 1, s / (s + 1.0));
        let rep = numeric_lift_check(&f, &grid, (ZERO, 0), &a, &b, &fhat, 4, 0).unwrap();
        assert!(rep.bound_constant.is_finite());
        for w in rep.samples.windows(2) {
            assert!(w[1].1 < w[0].1);
        }
    }
}
