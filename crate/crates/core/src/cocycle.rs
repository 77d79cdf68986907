//! Stokes cocycles at the level of `T(u)` blocks.
//!
//! A block `(i,j)` stands for `exp(𝔞_j − 𝔞_i) s^{-A_i} T_ij(u) s^{A_j}`; the
//! prefactors cancel in products, so cocycles multiply as plain block
//! matrices over truncated Laurent series in `u`.

use crate::exponents::{
    dominance_at, is_ordered, reduce_angle, split_threshold, Exponent, Parity, Verdict,
};
use crate::matrix::{Mat, SeriesField};
use crate::puiseux::{lcm, LaurentU};
use crate::series::Laurent;
use crate::{CMatrix, Error, Result, C64};
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

#[derive(Clone, Debug, PartialEq)]
pub struct BlockCocycle {
    sizes: Vec<usize>,
    exponents: Vec<Exponent>,
    gmats: Vec<CMatrix>,
    arc: (f64, f64),
    matrix: Mat<LaurentU>,
}

impl BlockCocycle {
    pub fn new(
        sizes: Vec<usize>,
        exponents: Vec<Exponent>,
        gmats: Vec<CMatrix>,
        arc: (f64, f64),
        matrix: Mat<LaurentU>,
    ) -> Result<Self> {
        let total: usize = sizes.iter().sum();
        if sizes.len() != exponents.len() || sizes.contains(&0) {
            return Err(Error::ShapeMismatch(
                "one positive block size per exponent required".into(),
            ));
        }
        if !gmats.is_empty()
            && (gmats.len() != sizes.len()
                || gmats
                    .iter()
                    .zip(&sizes)
                    .any(|(g, &n)| g.nrows() != n || g.ncols() != n))
        {
            return Err(Error::ShapeMismatch(
                "G matrices must match block sizes".into(),
            ));
        }
        if matrix.rows() != total || matrix.cols() != total {
            return Err(Error::ShapeMismatch(format!(
                "block sizes sum to {total}, matrix is {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let width = arc_width(arc);
        if !(width > 0.0) {
            return Err(Error::EmptyArc);
        }
        Ok(Self {
            sizes,
            exponents,
            gmats,
            arc,
            matrix,
        })
    }

    /// Identity cocycle with scalar blocks.
    pub fn identity(exponents: Vec<Exponent>, arc: (f64, f64), order: i64) -> Result<Self> {
        let m = exponents.len();
        let proto = LaurentU::zero(order);
        Self::new(
            vec![1; m],
            exponents,
            Vec::new(),
            arc,
            Mat::identity(m, &proto),
        )
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn exponents(&self) -> &[Exponent] {
        &self.exponents
    }

    pub fn gmats(&self) -> &[CMatrix] {
        &self.gmats
    }

    pub fn arc(&self) -> (f64, f64) {
        self.arc
    }

    pub fn matrix(&self) -> &Mat<LaurentU> {
        &self.matrix
    }

    pub fn order(&self) -> i64 {
        self.matrix.min_order()
    }

    pub fn nblocks(&self) -> usize {
        self.sizes.len()
    }

    pub fn offsets(&self) -> Vec<usize> {
        self.sizes
            .iter()
            .scan(0, |acc, &n| {
                let o = *acc;
                *acc += n;
                Some(o)
            })
            .collect()
    }

    pub fn block(&self, i: usize, j: usize) -> Mat<LaurentU> {
        let off = self.offsets();
        self.matrix
            .block(off[i], off[j], self.sizes[i], self.sizes[j])
    }

    fn with_matrix(&self, matrix: Mat<LaurentU>) -> Self {
        Self {
            matrix,
            ..self.clone()
        }
    }

    fn same_metadata(&self, o: &Self) -> bool {
        self.sizes == o.sizes
            && self.exponents.len() == o.exponents.len()
            && self
                .exponents
                .iter()
                .zip(&o.exponents)
                .all(|(a, b)| a.sub(b).is_zero())
    }

    fn block_is_zero(&self, i: usize, j: usize) -> bool {
        self.block(i, j).iter().all(|e| e.is_zero())
    }

    fn block_is_identity(&self, i: usize) -> bool {
        let b = self.block(i, i);
        (0..b.rows()).all(|r| {
            (0..b.cols()).all(|c| {
                let e = b.get(r, c);
                let want = if r == c { 1.0 } else { 0.0 };
                e.terms().all(|(n, x)| {
                    let w = if n == 0 { want } else { 0.0 };
                    (x - C64::new(w, 0.0)).norm() <= 1e-12
                }) && (want == 0.0 || !e.is_zero())
            })
        })
    }

    /// Upper block triangular with identity diagonal blocks.
    pub fn is_unitriangular(&self) -> bool {
        let m = self.nblocks();
        (0..m).all(|i| self.block_is_identity(i) && (0..i).all(|j| self.block_is_zero(i, j)))
    }

    /// Maximum coefficient modulus of `self − other`, ignoring terms beyond
    /// either trusted order. Returns `None` if the shapes differ.
    pub fn distance(&self, other: &Self) -> Option<f64> {
        let d = self.matrix.sub(&other.matrix).ok()?;
        Some(d.iter().map(|e| e.max_abs()).fold(0.0, f64::max))
    }
}

fn arc_width(arc: (f64, f64)) -> f64 {
    let w = arc.1 - arc.0;
    if w > 0.0 {
        w.min(TAU)
    } else {
        reduce_angle(w)
    }
}

/// Midpoint of the arc running counter-clockwise from `arc.0` to `arc.1`.
pub fn arc_midpoint(arc: (f64, f64)) -> f64 {
    reduce_angle(arc.0 + arc_width(arc) / 2.0)
}

/// `h = h_+ + h_-` with `h_+ = Σ_{n>A} h_n u^n` and `h_- = Σ_{n≤A} h_n u^n`.
/// `A = −∞` puts everything into `h_+`.
pub fn split(h: &LaurentU, a: f64) -> (LaurentU, LaurentU) {
    let order = h.order();
    if a == f64::NEG_INFINITY {
        return (h.clone(), LaurentU::zero(order));
    }
    let mut plus = vec![C64::new(0.0, 0.0); h.coeffs().len()];
    let mut minus = plus.clone();
    for (k, (n, c)) in h.terms().enumerate() {
        if n as f64 > a {
            plus[k] = c;
        } else {
            minus[k] = c;
        }
    }
    (
        LaurentU(Laurent::new(h.val(), plus, order)),
        LaurentU(Laurent::new(h.val(), minus, order)),
    )
}

fn check_truncation(tau: &BlockCocycle) -> Result<()> {
    let off = tau.offsets();
    let m = tau.nblocks();
    for i in 0..m {
        for j in 0..m {
            for r in 0..tau.sizes[i] {
                for c in 0..tau.sizes[j] {
                    let e = tau.matrix.get(off[i] + r, off[j] + c);
                    let scale = e.max_abs();
                    if e.coeff(e.order()).norm() > 1e-14 * scale && !e.is_zero() {
                        return Err(Error::TruncationTooLow(i, j));
                    }
                }
            }
        }
    }
    Ok(())
}

fn max_abs(m: &Mat<LaurentU>) -> f64 {
    m.iter().map(|e| e.max_abs()).fold(0.0, f64::max)
}

fn block_mul(a: &Mat<LaurentU>, b: &Mat<LaurentU>) -> Mat<LaurentU> {
    a.mul(b).expect("conforming block shapes")
}

/// `τ = τ_+^{-1} τ_-` for an upper unitriangular cocycle whose exponents are
/// in even order.
pub fn factor_even(tau: &BlockCocycle) -> Result<(BlockCocycle, BlockCocycle)> {
    if !is_ordered(&tau.exponents, Parity::Even) {
        return Err(Error::UnsortedExponents);
    }
    if !tau.is_unitriangular() {
        return Err(Error::NotUnitriangular);
    }
    check_truncation(tau)?;
    let m = tau.nblocks();
    let off = tau.offsets();
    let order = tau.order();
    let proto = LaurentU::zero(order);
    let n = tau.matrix.rows();
    // P = τ_+^{-1}, M = τ_-
    let mut p = Mat::identity(n, &proto);
    let mut mm = Mat::identity(n, &proto);
    for d in 1..m {
        for i in 0..m - d {
            let j = i + d;
            let (ri, rj) = (tau.sizes[i], tau.sizes[j]);
            let mut lhs = tau.block(i, j);
            for k in i + 1..j {
                let pik = p.block(off[i], off[k], ri, tau.sizes[k]);
                let mkj = mm.block(off[k], off[j], tau.sizes[k], rj);
                lhs = lhs.sub(&block_mul(&pik, &mkj))?;
            }
            if lhs.iter().all(|e| e.is_zero()) {
                continue;
            }
            let a = split_threshold(&tau.exponents[i], &tau.exponents[j], Parity::Even)?;
            let mut pb = lhs.clone();
            let mut mb = lhs.clone();
            for r in 0..ri {
                for c in 0..rj {
                    let (hp, hm) = split(lhs.get(r, c), a);
                    pb.set(r, c, hp);
                    mb.set(r, c, hm);
                }
            }
            p.set_block(off[i], off[j], &pb);
            mm.set_block(off[i], off[j], &mb);
        }
    }
    let tau_plus = p.neumann_inv()?;
    Ok((tau.with_matrix(tau_plus), tau.with_matrix(mm)))
}

/// `T = T_R T_L^{-1}` with `T_R` lower block triangular and `T_L` upper
/// unitriangular (block Crout factorization).
pub fn factor_odd(t: &BlockCocycle) -> Result<(BlockCocycle, BlockCocycle)> {
    if !is_ordered(&t.exponents, Parity::Odd) {
        return Err(Error::UnsortedExponents);
    }
    check_truncation(t)?;
    let m = t.nblocks();
    let off = t.offsets();
    let sz = &t.sizes;
    let order = t.order();
    let proto = LaurentU::zero(order);
    let n = t.matrix.rows();
    let mut l = Mat::zeros(n, n, &proto);
    let mut u = Mat::identity(n, &proto);
    for k in 0..m {
        for i in k..m {
            let mut acc = t.block(i, k);
            let mut size = max_abs(&acc);
            for q in 0..k {
                let liq = l.block(off[i], off[q], sz[i], sz[q]);
                let uqk = u.block(off[q], off[k], sz[q], sz[k]);
                let prod = block_mul(&liq, &uqk);
                size = size.max(max_abs(&prod));
                acc = acc.sub(&prod)?;
            }
            // cancelled low powers would otherwise lead the pivot inverse
            let acc = acc.map(|e| e.strip_leading(1e-12 * size));
            l.set_block(off[i], off[k], &acc);
        }
        let lkk = l.block(off[k], off[k], sz[k], sz[k]);
        let lkk_inv = lkk.inv().map_err(|_| Error::SingularPrincipalMinor(k))?;
        for j in k + 1..m {
            let mut acc = t.block(k, j);
            for q in 0..k {
                let lkq = l.block(off[k], off[q], sz[k], sz[q]);
                let uqj = u.block(off[q], off[j], sz[q], sz[j]);
                acc = acc.sub(&block_mul(&lkq, &uqj))?;
            }
            u.set_block(off[k], off[j], &block_mul(&lkk_inv, &acc));
        }
    }
    let t_l = u.neumann_inv()?;
    Ok((t.with_matrix(l), t.with_matrix(t_l)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub i: usize,
    pub j: usize,
    pub n: i64,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub parity: Parity,
    pub admissible: bool,
    pub violations: Vec<Violation>,
}

/// Inclusive odd-case admissibility of `u^n` in block `(i, j)`.
fn odd_admissible(ai: &Exponent, aj: &Exponent, n: i64) -> bool {
    let bound = crate::exponents::odd_bound(ai, aj);
    let nf = n as f64;
    if (nf - bound).abs() > 1e-12 * bound.abs().max(1.0) {
        return nf > bound;
    }
    // equality: decided by the highest fractional term with a nonzero
    // rotated real part
    let p = lcm(ai.p(), aj.p());
    let (_, ci) = ai.components(p);
    let (_, cj) = aj.components(p);
    for mu in (1..p as usize).rev() {
        let rot = C64::from_polar(1.0, mu as f64 * PI / (2.0 * p as f64));
        let w = (rot * (cj[mu - 1] - ci[mu - 1])).re;
        if w.abs() > 1e-12 {
            return w < 0.0;
        }
    }
    true
}

/// Checks every monomial of every block against the admissibility
/// conditions for the given parity.
pub fn validate_cocycle(tau: &BlockCocycle, parity: Parity) -> ValidationReport {
    let m = tau.nblocks();
    let mid = arc_midpoint(tau.arc);
    let mut violations = Vec::new();
    for i in 0..m {
        for j in 0..m {
            let blk = tau.block(i, j);
            for r in 0..blk.rows() {
                for c in 0..blk.cols() {
                    let e = blk.get(r, c);
                    let scale = e.max_abs().max(1.0);
                    for (n, x) in e.terms() {
                        let diag_one = i == j && r == c && n == 0;
                        let x = if diag_one { x - 1.0 } else { x };
                        if x.norm() <= 1e-12 * scale {
                            continue;
                        }
                        let bad = match parity {
                            Parity::Odd => {
                                (!odd_admissible(&tau.exponents[i], &tau.exponents[j], n))
                                    .then(|| "below the odd-case bound".to_string())
                            }
                            Parity::Even => {
                                if i > j {
                                    Some("nonzero block below the diagonal".to_string())
                                } else if i == j {
                                    Some("diagonal block differs from the identity".to_string())
                                } else {
                                    let d = tau.exponents[j].sub(&tau.exponents[i]).shift_2pin(n);
                                    (dominance_at(&d, &Exponent::zero(), mid) != Verdict::Lt)
                                        .then(|| format!("not decaying at θ = {mid:.6}"))
                                }
                            }
                        };
                        if let Some(reason) = bad {
                            violations.push(Violation { i, j, n, reason });
                        }
                    }
                }
            }
        }
    }
    ValidationReport {
        parity,
        admissible: violations.is_empty(),
        violations,
    }
}

/// Block inverse; unitriangular cocycles use the finite Neumann sum.
pub fn cocycle_invert(tau: &BlockCocycle) -> Result<BlockCocycle> {
    let inv = if tau.is_unitriangular() {
        tau.matrix.neumann_inv()?
    } else {
        tau.matrix.inv()?
    };
    Ok(tau.with_matrix(inv))
}

pub fn cocycle_mul(a: &BlockCocycle, b: &BlockCocycle) -> Result<BlockCocycle> {
    if !a.same_metadata(b) {
        return Err(Error::MetadataMismatch);
    }
    Ok(a.with_matrix(a.matrix.mul(&b.matrix)?))
}
