//! Difference modules over `ℂ((s^{-1/p}))`.
//!
//! A module of rank `r` is given by its representation matrix `A(s)`; a
//! section with coordinates `g` is mapped to `A(s) g(s+1)`. Graded models
//! are direct sums of elementary blocks `exp(𝔞(s+1) − 𝔞(s))·(1+s^{-1})^G`.

use crate::exponents::{exp_cocycle, Exponent};
use crate::matrix::Mat;
use crate::puiseux::{lcm, ps_matrix_pow, PuiseuxSeries};
use crate::series::binomials;
use crate::{CMatrix, Error, Result, C64};

#[derive(Clone, Debug, PartialEq)]
pub struct GradedBlock {
    pub exponent: Exponent,
    pub g: CMatrix,
}

impl GradedBlock {
    pub fn new(exponent: Exponent, g: CMatrix) -> Result<Self> {
        if g.nrows() != g.ncols() || g.nrows() == 0 {
            return Err(Error::ShapeMismatch(
                "G must be square and non-empty".into(),
            ));
        }
        Ok(Self { exponent, g })
    }

    pub fn scalar(exponent: Exponent, gamma: C64) -> Self {
        Self {
            exponent,
            g: CMatrix::from_element(1, 1, gamma),
        }
    }

    pub fn size(&self) -> usize {
        self.g.nrows()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GradedModule {
    pub blocks: Vec<GradedBlock>,
}

impl GradedModule {
    pub fn rank(&self) -> usize {
        self.blocks.iter().map(|b| b.size()).sum()
    }

    pub fn p(&self) -> u32 {
        self.blocks
            .iter()
            .fold(1, |acc, b| lcm(acc, b.exponent.p()))
    }

    /// No `s log s` term in any exponent.
    pub fn is_mild(&self) -> bool {
        self.blocks.iter().all(|b| b.exponent.q() == 0)
    }

    /// Row offsets of the blocks.
    pub fn offsets(&self) -> Vec<usize> {
        let mut acc = 0;
        self.blocks
            .iter()
            .map(|b| {
                let o = acc;
                acc += b.size();
                o
            })
            .collect()
    }

    /// The induced module, with all matrices trusted through `order`.
    pub fn to_module(&self, order: i64) -> Result<DifferenceModule> {
        let p = self.p();
        let mut out: Option<DifferenceModule> = None;
        for b in &self.blocks {
            let m = mk_elementary_p(b, p, order)?;
            out = Some(match out {
                None => m,
                Some(acc) => direct_sum(&acc, &m)?,
            });
        }
        out.ok_or_else(|| Error::InvalidInput("graded module without blocks".into()))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DifferenceModule {
    p: u32,
    matrix: Mat<PuiseuxSeries>,
    meta: Option<GradedModule>,
}

impl DifferenceModule {
    /// Checks squareness and invertibility; entries are lifted to a common
    /// ramification.
    pub fn new(matrix: Mat<PuiseuxSeries>) -> Result<Self> {
        if !matrix.is_square() || matrix.rows() == 0 {
            return Err(Error::ShapeMismatch("module matrix must be square".into()));
        }
        let p = matrix.iter().fold(1, |acc, e| lcm(acc, e.p()));
        let matrix = matrix.map(|e| e.lift_to(p));
        matrix.inv()?;
        Ok(Self {
            p,
            matrix,
            meta: None,
        })
    }

    pub fn with_meta(mut self, meta: GradedModule) -> Result<Self> {
        if meta.rank() != self.rank() {
            return Err(Error::ShapeMismatch(format!(
                "graded data of rank {} for a module of rank {}",
                meta.rank(),
                self.rank()
            )));
        }
        self.meta = Some(meta);
        Ok(self)
    }

    pub fn rank(&self) -> usize {
        self.matrix.rows()
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn matrix(&self) -> &Mat<PuiseuxSeries> {
        &self.matrix
    }

    pub fn meta(&self) -> Option<&GradedModule> {
        self.meta.as_ref()
    }

    pub fn order(&self) -> i64 {
        self.matrix.min_order()
    }

    pub fn lift_to(&self, p: u32) -> Self {
        Self {
            p,
            matrix: self.matrix.map(|e| e.lift_to(p)),
            meta: self.meta.clone(),
        }
    }

    /// `A(s0)` by partial sums.
    pub fn eval(&self, s0: C64, branch: i64) -> CMatrix {
        let r = self.rank();
        CMatrix::from_fn(r, r, |i, j| self.matrix.get(i, j).eval(s0, branch).0)
    }
}

fn aligned(m1: &DifferenceModule, m2: &DifferenceModule) -> (DifferenceModule, DifferenceModule) {
    let p = lcm(m1.p, m2.p);
    (m1.lift_to(p), m2.lift_to(p))
}

fn mk_elementary_p(b: &GradedBlock, p: u32, order: i64) -> Result<DifferenceModule> {
    let a = b.exponent.p();
    let m = p / a;
    let lifted_order = (order + 1).div_euclid(m as i64).max(0) + 1;
    // compute at the block's own ramification with enough room, then lift
    let base = elementary_matrix(b, lifted_order)?;
    let matrix = base.map(|e| e.lift_to(p).truncate(order));
    DifferenceModule::new(matrix)?.with_meta(GradedModule {
        blocks: vec![b.clone()],
    })
}

fn elementary_matrix(b: &GradedBlock, order: i64) -> Result<Mat<PuiseuxSeries>> {
    let p = b.exponent.p();
    let q = b.exponent.q();
    let e = exp_cocycle(&b.exponent, order)?;
    let pow_order = order + q.max(0);
    let f = PuiseuxSeries::from_real(p, 0, &[1.0], pow_order).add(&PuiseuxSeries::monomial(
        p,
        C64::new(1.0, 0.0),
        p as i64,
        pow_order,
    ));
    let pw = ps_matrix_pow(&b.g, &f)?;
    Ok(pw.map(|x| x.mul(&e).truncate(order)))
}

/// The elementary module `exp(φ_p(𝔞) − 𝔞)·(1+s^{-1})^G`.
pub fn mk_elementary(b: &GradedBlock, order: i64) -> Result<DifferenceModule> {
    mk_elementary_p(b, b.exponent.p(), order)
}

pub fn direct_sum(m1: &DifferenceModule, m2: &DifferenceModule) -> Result<DifferenceModule> {
    let (a, b) = aligned(m1, m2);
    let matrix = a.matrix.block_diag(&b.matrix);
    let meta = match (&a.meta, &b.meta) {
        (Some(x), Some(y)) => Some(GradedModule {
            blocks: x.blocks.iter().chain(&y.blocks).cloned().collect(),
        }),
        _ => None,
    };
    Ok(DifferenceModule {
        p: a.p,
        matrix,
        meta,
    })
}

fn kron_c(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

fn graded_kron(m1: &GradedModule, m2: &GradedModule, dualize_first: bool) -> Option<GradedModule> {
    // Kronecker indexing keeps blocks contiguous only when the second factor
    // has a single block.
    if m2.blocks.len() != 1 {
        return None;
    }
    let b2 = &m2.blocks[0];
    let blocks = m1
        .blocks
        .iter()
        .map(|b1| {
            let (e1, g1) = if dualize_first {
                (Exponent::zero().sub(&b1.exponent), -b1.g.transpose())
            } else {
                (b1.exponent.clone(), b1.g.clone())
            };
            let n1 = g1.nrows();
            let n2 = b2.size();
            let g =
                kron_c(&g1, &CMatrix::identity(n2, n2)) + kron_c(&CMatrix::identity(n1, n1), &b2.g);
            GradedBlock {
                exponent: e1.add(&b2.exponent),
                g,
            }
        })
        .collect();
    Some(GradedModule { blocks })
}

/// `A₁ ⊗ A₂`.
pub fn tensor(m1: &DifferenceModule, m2: &DifferenceModule) -> Result<DifferenceModule> {
    let (a, b) = aligned(m1, m2);
    let matrix = a.matrix.kron(&b.matrix);
    let meta = match (&a.meta, &b.meta) {
        (Some(x), Some(y)) => graded_kron(x, y, false),
        _ => None,
    };
    Ok(DifferenceModule {
        p: a.p,
        matrix,
        meta,
    })
}

/// Matrix of `X ↦ A₂ X A₁^{-1}` on column-major `vec(X)`, i.e.
/// `A₁^{-T} ⊗ A₂`.
pub fn hom(m1: &DifferenceModule, m2: &DifferenceModule) -> Result<DifferenceModule> {
    let (a, b) = aligned(m1, m2);
    let inv_t = a.matrix.inv()?.transpose();
    let matrix = inv_t.kron(&b.matrix);
    let meta = match (&a.meta, &b.meta) {
        (Some(x), Some(y)) => graded_kron(x, y, true),
        _ => None,
    };
    Ok(DifferenceModule {
        p: a.p,
        matrix,
        meta,
    })
}

/// `A^{-T}`.
pub fn dual(m: &DifferenceModule) -> Result<DifferenceModule> {
    let matrix = m.matrix.inv()?.transpose();
    let meta = m.meta.as_ref().map(|g| GradedModule {
        blocks: g
            .blocks
            .iter()
            .map(|b| GradedBlock {
                exponent: Exponent::zero().sub(&b.exponent),
                g: -b.g.transpose(),
            })
            .collect(),
    });
    Ok(DifferenceModule {
        p: m.p,
        matrix,
        meta,
    })
}

/// The rank-one module with matrix `[1]`, trusted through `order`.
pub fn trivial(p: u32, order: i64) -> DifferenceModule {
    DifferenceModule {
        p,
        matrix: Mat::from_fn(1, 1, |_, _| PuiseuxSeries::one(p, order)),
        meta: Some(GradedModule {
            blocks: vec![GradedBlock::scalar(Exponent::zero(), C64::new(0.0, 0.0))],
        }),
    }
}

/// Classification of an unramified rank-one module `g = α s^{-m}(1 + g₁s^{-1} + …)`.
///
/// Returns `𝔞 = −m·s·log s + (Log α + 2πi·branch + m)·s` and `γ = g₁ + m/2`.
pub fn rank1_classify(g: &PuiseuxSeries, branch: i64) -> Result<(Exponent, C64)> {
    if g.p() != 1 {
        return Err(Error::RamifiedInput(g.p()));
    }
    let alpha = g.lead().ok_or(Error::ZeroInput)?;
    let m = g.val();
    if g.order() < m + 1 {
        return Err(Error::InsufficientOrder {
            needed: m + 1,
            available: g.order(),
        });
    }
    let q = -m;
    let log_alpha = C64::new(
        alpha.norm().ln(),
        alpha.arg() + std::f64::consts::TAU * branch as f64,
    );
    let c = log_alpha - q as f64;
    let g1 = g.coeff(m + 1) / alpha;
    let gamma = g1 - q as f64 / 2.0;
    Ok((Exponent::unramified(q, c), gamma))
}

/// The unit `g / (exp(𝔞(s+1) − 𝔞(s))(1+s^{-1})^γ)`, which is `1 + O(s^{-2})`
/// for the output of [`rank1_classify`].
pub fn rank1_unit(g: &PuiseuxSeries, a: &Exponent, gamma: C64) -> Result<PuiseuxSeries> {
    let b = GradedBlock::scalar(a.clone(), gamma);
    let order = g.order() - g.val();
    let e = elementary_matrix(&b, g.order().max(order))?;
    let unit = g.mul(&e.get(0, 0).inv()?);
    Ok(unit.truncate(order))
}

/// Gauge `f` with `f(s+1)/f(s) = unit` and `f(∞) = 1`.
pub fn coboundary_complete(unit: &PuiseuxSeries, order: i64) -> Result<PuiseuxSeries> {
    let p = unit.p() as i64;
    let scale = unit.max_abs().max(1.0);
    if unit.val() != 0 || (unit.coeff(0) - C64::new(1.0, 0.0)).norm() > 1e-12 * scale {
        return Err(Error::NotUnipotent);
    }
    for k in 1..=p {
        let v = unit.coeff(k);
        if v.norm() > 1e-12 * scale {
            return Err(Error::Obstructed {
                index: k,
                p: unit.p(),
                value: v,
            });
        }
    }
    let out_order = order.min(unit.order() - p);
    if out_order < 0 {
        return Err(Error::InsufficientOrder {
            needed: p,
            available: unit.order(),
        });
    }
    let n = out_order as usize;
    // binom(−k/p, d/p) for every k ≤ n and multiple d of p
    let bins: Vec<Vec<f64>> = (0..=n)
        .map(|k| binomials(-(k as f64) / p as f64, (n + p as usize) / p as usize + 2))
        .collect();
    let b = |k: usize, d: usize| -> f64 {
        if d % p as usize == 0 {
            bins[k][d / p as usize]
        } else {
            0.0
        }
    };
    let mut f = vec![C64::new(0.0, 0.0); n + 1];
    f[0] = C64::new(1.0, 0.0);
    for m in 1..=n {
        let mut acc = C64::new(0.0, 0.0);
        for (k, fk) in f.iter().enumerate().take(m) {
            let d = m + p as usize - k;
            acc += fk * (b(k, d) - unit.coeff(d as i64));
        }
        f[m] = acc * (p as f64 / m as f64);
    }
    PuiseuxSeries::new(unit.p(), 0, f, out_order)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn close(a: C64, b: C64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn trivial_elementary() {
        let m = mk_elementary(&GradedBlock::scalar(Exponent::zero(), r(0.0)), 8).unwrap();
        assert_eq!(m.matrix().get(0, 0), &PuiseuxSeries::one(1, 8));
    }

    #[test]
    fn regular_elementary() {
        let m = mk_elementary(&GradedBlock::scalar(Exponent::zero(), r(1.0)), 8).unwrap();
        assert_eq!(
            m.matrix().get(0, 0),
            &PuiseuxSeries::from_real(1, 0, &[1.0, 1.0], 8)
        );
    }

    #[test]
    fn gamma_elementary() {
        let a = Exponent::unramified(-1, r(1.0));
        let m = mk_elementary(&GradedBlock::scalar(a, r(0.5)), 10).unwrap();
        let e = m.matrix().get(0, 0);
        assert_eq!(e.val(), 1);
        assert!(close(e.coeff(1), r(1.0), 1e-14));
        assert!(close(e.coeff(2), r(0.0), 1e-14));
        assert_eq!(e.order(), 10);
    }

    #[test]
    fn positive_q_elementary_keeps_order() {
        let a = Exponent::unramified(2, r(0.3));
        let m = mk_elementary(&GradedBlock::scalar(a, r(0.0)), 10).unwrap();
        assert_eq!(m.order(), 10);
    }

    #[test]
    fn ramified_elementary_matches_evaluation() {
        let a = Exponent::new(2, 1, vec![C64::new(0.5, 0.2), r(-0.4)]).unwrap();
        let b = GradedBlock::scalar(a.clone(), r(0.25));
        let m = mk_elementary(&b, 40).unwrap();
        let s = C64::new(80.0, 30.0);
        let want = (a.eval(s + 1.0, 0) - a.eval(s, 0)).exp() * (s.inv() + 1.0).powf(0.25);
        assert!(close(m.eval(s, 0)[(0, 0)], want, 1e-10 * want.norm()));
    }

    #[test]
    fn tensor_unit_and_scalar_product() {
        let g1 = PuiseuxSeries::from_real(1, 0, &[2.0, 1.0], 8);
        let g2 = PuiseuxSeries::from_real(1, -1, &[1.0, 0.0, 3.0], 8);
        let m1 = DifferenceModule::new(Mat::from_fn(1, 1, |_, _| g1.clone())).unwrap();
        let m2 = DifferenceModule::new(Mat::from_fn(1, 1, |_, _| g2.clone())).unwrap();
        let t = tensor(&m1, &m2).unwrap();
        assert_eq!(t.matrix().get(0, 0), &g1.mul(&g2));
        let u = tensor(&trivial(1, 8), &m1).unwrap();
        assert_eq!(u.matrix().get(0, 0), &g1);
    }

    #[test]
    fn hom_of_module_with_itself_fixes_identity() {
        let e = |v, c: &[f64]| PuiseuxSeries::from_real(1, v, c, 10);
        let a = Mat::from_rows(vec![
            vec![e(0, &[1.0, 2.0]), e(1, &[1.0])],
            vec![e(0, &[0.5]), e(0, &[3.0, 0.0, 1.0])],
        ])
        .unwrap();
        let m = DifferenceModule::new(a).unwrap();
        let h = hom(&m, &m).unwrap();
        // vec(I) in column-major order
        let id = [1.0, 0.0, 0.0, 1.0];
        for (i, _) in id.iter().enumerate() {
            let mut acc = PuiseuxSeries::zero(1, 10);
            for (j, x) in id.iter().enumerate() {
                acc = acc.add(&h.matrix().get(i, j).scale(r(*x)));
            }
            let want = PuiseuxSeries::from_real(1, 0, &[id[i]], 10);
            let diff = acc.sub(&want);
            assert!(diff.max_abs() < 1e-12, "row {i}: {diff:?}");
        }
    }

    #[test]
    fn hom_equals_dual_tensor() {
        let e = |v, c: &[f64]| PuiseuxSeries::from_real(1, v, c, 10);
        let a = Mat::from_rows(vec![
            vec![e(0, &[1.0, 2.0]), e(1, &[1.0])],
            vec![e(0, &[0.5]), e(0, &[3.0, 0.0, 1.0])],
        ])
        .unwrap();
        let b = Mat::from_rows(vec![vec![e(-1, &[2.0, 1.0])]]).unwrap();
        let m1 = DifferenceModule::new(a).unwrap();
        let m2 = DifferenceModule::new(b).unwrap();
        let h = hom(&m1, &m2).unwrap();
        let t = tensor(&dual(&m1).unwrap(), &m2).unwrap();
        assert_eq!(h.matrix(), t.matrix());
    }

    #[test]
    fn direct_sum_is_block_diagonal() {
        let m1 = mk_elementary(&GradedBlock::scalar(Exponent::zero(), r(1.0)), 6).unwrap();
        let m2 = mk_elementary(
            &GradedBlock::scalar(Exponent::unramified(1, r(0.0)), r(0.0)),
            6,
        )
        .unwrap();
        let s = direct_sum(&m1, &m2).unwrap();
        assert_eq!(s.rank(), 2);
        assert!(s.matrix().get(0, 1).is_zero());
        assert_eq!(s.meta().unwrap().blocks.len(), 2);
        assert!(!s.meta().unwrap().is_mild());
    }

    #[test]
    fn classify_examples() {
        let (a, g) = rank1_classify(&PuiseuxSeries::one(1, 6), 0).unwrap();
        assert!(a.is_zero());
        assert_eq!(g, r(0.0));
        let (a, g) = rank1_classify(&PuiseuxSeries::from_real(1, 0, &[1.0, 1.0], 6), 0).unwrap();
        assert!(a.is_zero());
        assert_eq!(g, r(1.0));
        let (a, g) = rank1_classify(&PuiseuxSeries::from_real(1, 1, &[1.0], 6), 0).unwrap();
        assert_eq!((a.q(), a.c_p(), g), (-1, r(1.0), r(0.5)));
    }

    #[test]
    fn classify_errors() {
        assert_eq!(
            rank1_classify(&PuiseuxSeries::zero(1, 4), 0),
            Err(Error::ZeroInput)
        );
        assert_eq!(
            rank1_classify(&PuiseuxSeries::one(2, 4), 0),
            Err(Error::RamifiedInput(2))
        );
    }

    #[test]
    fn classify_branch_shifts_c() {
        let g = PuiseuxSeries::from_real(1, 0, &[2.0], 6);
        let (a, _) = rank1_classify(&g, 1).unwrap();
        assert!(close(
            a.c_p(),
            C64::new(2f64.ln(), std::f64::consts::TAU),
            1e-15
        ));
    }

    #[test]
    fn coboundary_examples() {
        let f = coboundary_complete(&PuiseuxSeries::one(1, 8), 8).unwrap();
        assert_eq!(f, PuiseuxSeries::one(1, 7));
        let unit = PuiseuxSeries::from_real(1, 0, &[1.0, 0.0, 1.0], 12);
        let f = coboundary_complete(&unit, 12).unwrap();
        assert_eq!(f.coeff(1), r(-1.0));
        let res = f
            .shift()
            .mul(&f.inv().unwrap())
            .sub(&unit.truncate(f.order()));
        assert!(res.max_abs() < 1e-12);
        let bad = PuiseuxSeries::from_real(1, 0, &[1.0, 1.0], 6);
        assert!(matches!(
            coboundary_complete(&bad, 6),
            Err(Error::Obstructed { index: 1, .. })
        ));
    }

    #[test]
    fn coboundary_ramified() {
        // f = 1 + 0.3 s^{-1/3}  ⇒  unit = f(s+1)/f(s)
        let f = PuiseuxSeries::from_real(3, 0, &[1.0, 0.3], 30);
        let unit = f.shift().mul(&f.inv().unwrap());
        let g = coboundary_complete(&unit, 30).unwrap();
        assert!(g.sub(&f.truncate(g.order())).max_abs() < 1e-12);
    }

    #[test]
    fn gamma_unit_gauge() {
        let g = PuiseuxSeries::from_real(1, 1, &[1.0], 12);
        let (a, gamma) = rank1_classify(&g, 0).unwrap();
        let unit = rank1_unit(&g, &a, gamma).unwrap();
        assert!(close(unit.coeff(1), r(0.0), 1e-14));
        assert!(close(unit.coeff(2), r(1.0 / 12.0), 1e-14));
        let f = coboundary_complete(&unit, 10).unwrap();
        assert!(close(f.coeff(1), r(-1.0 / 12.0), 1e-14));
    }
}
