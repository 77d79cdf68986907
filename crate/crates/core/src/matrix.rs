//! Dense matrices over truncated series fields.

use crate::{CMatrix, CVector, Error, Result, C64};
use std::fmt::Debug;

/// Arithmetic needed from a matrix entry type.
pub trait SeriesField: Clone + Debug {
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn inv(&self) -> Result<Self>;
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn valuation_tol(&self, tol: f64) -> Option<i64>;
    /// Drops leading coefficients of modulus at most `tol`.
    fn strip_leading(&self, tol: f64) -> Self;
    fn max_abs(&self) -> f64;
    fn order(&self) -> i64;
}

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Clone> Mat<T> {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        if rows.iter().any(|x| x.len() != c) {
            return Err(Error::ShapeMismatch("ragged rows".into()));
        }
        Ok(Self {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn iter(&self) -> impl Iterator<Item = &T> {
        self.data.iter()
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        self.data
            .chunks(self.cols.max(1))
            .map(|r| r.to_vec())
            .collect()
    }

    pub fn map<U: Clone>(&self, f: impl Fn(&T) -> U) -> Mat<U> {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn block(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> Self {
        Self::from_fn(nr, nc, |i, j| self.get(r0 + i, c0 + j).clone())
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, b: &Self) {
        for i in 0..b.rows {
            for j in 0..b.cols {
                self.set(r0 + i, c0 + j, b.get(i, j).clone());
            }
        }
    }
}

impl<T: SeriesField> Mat<T> {
    pub fn identity(n: usize, proto: &T) -> Self {
        Self::from_fn(n, n, |i, j| {
            if i == j {
                proto.one_like()
            } else {
                proto.zero_like()
            }
        })
    }

    pub fn zeros(rows: usize, cols: usize, proto: &T) -> Self {
        Self::from_fn(rows, cols, |_, _| proto.zero_like())
    }

    fn check_same(&self, o: &Self) -> Result<()> {
        if self.rows != o.rows || self.cols != o.cols {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, o.rows, o.cols
            )));
        }
        Ok(())
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.check_same(o)?;
        Ok(Self::from_fn(self.rows, self.cols, |i, j| {
            self.get(i, j).add(o.get(i, j))
        }))
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.check_same(o)?;
        Ok(Self::from_fn(self.rows, self.cols, |i, j| {
            self.get(i, j).sub(o.get(i, j))
        }))
    }

    pub fn neg(&self) -> Self {
        self.map(|x| x.neg())
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        if self.cols != o.rows {
            return Err(Error::ShapeMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, o.rows, o.cols
            )));
        }
        Ok(Self::from_fn(self.rows, o.cols, |i, j| {
            let mut acc = self.get(i, 0).mul(o.get(0, j));
            for k in 1..self.cols {
                acc = acc.add(&self.get(i, k).mul(o.get(k, j)));
            }
            acc
        }))
    }

    /// Scales every entry by a series.
    pub fn scale(&self, c: &T) -> Self {
        self.map(|x| x.mul(c))
    }

    /// Kronecker product `self ⊗ o`.
    pub fn kron(&self, o: &Self) -> Self {
        Self::from_fn(self.rows * o.rows, self.cols * o.cols, |i, j| {
            self.get(i / o.rows, j / o.cols)
                .mul(o.get(i % o.rows, j % o.cols))
        })
    }

    /// Block diagonal `diag(self, o)`.
    pub fn block_diag(&self, o: &Self) -> Self {
        let proto = self
            .data
            .first()
            .or(o.data.first())
            .expect("empty matrices");
        let mut m = Self::zeros(self.rows + o.rows, self.cols + o.cols, proto);
        m.set_block(0, 0, self);
        m.set_block(self.rows, self.cols, o);
        m
    }

    /// Smallest entry valuation, ignoring coefficients at most `rel` times the
    /// largest coefficient in the matrix.
    pub fn valuation_rel(&self, rel: f64) -> Option<i64> {
        let scale = self.data.iter().map(|x| x.max_abs()).fold(0.0, f64::max);
        let tol = rel * scale;
        self.data.iter().filter_map(|x| x.valuation_tol(tol)).min()
    }

    pub fn min_order(&self) -> i64 {
        self.data
            .iter()
            .map(|x| x.order())
            .min()
            .unwrap_or(i64::MAX)
    }

    /// Gauss–Jordan inverse with the pivot of lowest valuation in each column.
    pub fn inv(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::ShapeMismatch("inverse of non-square matrix".into()));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(self.clone());
        }
        let scale = self.data.iter().map(|x| x.max_abs()).fold(0.0, f64::max);
        let tol = 1e-12 * scale.max(1e-300);
        let mut a = self.clone();
        let mut inv = Self::identity(n, &self.data[0]);
        for col in 0..n {
            let pivot = (col..n)
                .filter_map(|r| a.get(r, col).valuation_tol(tol).map(|v| (v, r)))
                .min_by_key(|&(v, r)| (v, r))
                .map(|(_, r)| r)
                .ok_or(Error::NonInvertible)?;
            if pivot != col {
                for j in 0..n {
                    a.data.swap(pivot * n + j, col * n + j);
                    inv.data.swap(pivot * n + j, col * n + j);
                }
            }
            let pinv = a.get(col, col).inv().map_err(|_| Error::NonInvertible)?;
            for j in 0..n {
                let x = a.get(col, j).mul(&pinv);
                a.set(col, j, x);
                let y = inv.get(col, j).mul(&pinv);
                inv.set(col, j, y);
            }
            for r in 0..n {
                if r == col || a.get(r, col).is_zero() {
                    continue;
                }
                let factor = a.get(r, col).clone();
                for j in 0..n {
                    let x = a.get(r, j).sub(&factor.mul(a.get(col, j)));
                    a.set(r, j, x);
                    let y = inv.get(r, j).sub(&factor.mul(inv.get(col, j)));
                    inv.set(r, j, y);
                }
            }
        }
        Ok(inv)
    }

    /// Inverse of `I + N` with `N` nilpotent, as the finite sum `Σ (−N)^k`.
    pub fn neumann_inv(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::ShapeMismatch("inverse of non-square matrix".into()));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(self.clone());
        }
        let id = Self::identity(n, &self.data[0]);
        let minus_n = id.sub(self)?;
        let mut term = id.clone();
        let mut acc = id;
        for _ in 1..n {
            term = term.mul(&minus_n)?;
            acc = acc.add(&term)?;
        }
        Ok(acc)
    }
}

impl Mat<C64> {
    pub fn to_nalgebra(&self) -> crate::CMatrix {
        crate::CMatrix::from_fn(self.rows, self.cols, |i, j| *self.get(i, j))
    }
}

/// Minimum-norm least-squares solution of `l x = rhs`. Singular values below
/// `max(rcond·σ_max, floor)` are treated as zero. Returns the solution and
/// the singular values of `l` in decreasing order.
pub fn lstsq(l: &CMatrix, rhs: &CVector, rcond: f64, floor: f64) -> (CVector, Vec<f64>) {
    let (m, n) = l.shape();
    let fl = faer::Mat::<C64>::from_fn(m, n, |i, j| l[(i, j)]);
    let svd = match fl.thin_svd() {
        Ok(svd) => svd,
        Err(_) => return (CVector::zeros(n), vec![f64::NAN; m.min(n)]),
    };
    let (u, v) = (svd.U(), svd.V());
    let sv: Vec<f64> = svd.S().column_vector().iter().map(|x| x.re).collect();
    let cutoff = (rcond * sv.first().copied().unwrap_or(0.0)).max(floor);
    let mut x = CVector::zeros(n);
    for (k, &s) in sv.iter().enumerate() {
        if s <= cutoff || s == 0.0 {
            continue;
        }
        let mut c = C64::new(0.0, 0.0);
        for i in 0..m {
            c += u[(i, k)].conj() * rhs[i];
        }
        c /= s;
        for j in 0..n {
            x[j] += v[(j, k)] * c;
        }
    }
    (x, sv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::puiseux::PuiseuxSeries;

    fn ps(v: i64, c: &[f64]) -> PuiseuxSeries {
        PuiseuxSeries::from_real(1, v, c, 12)
    }

    #[test]
    fn inverse_round_trip() {
        let m = Mat::from_rows(vec![
            vec![ps(1, &[1.0]), ps(0, &[1.0, 2.0])],
            vec![ps(0, &[2.0]), ps(0, &[0.0, 0.0, 1.0])],
        ])
        .unwrap();
        let prod = m.mul(&m.inv().unwrap()).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let want = if i == j { 1.0 } else { 0.0 };
                let e = prod.get(i, j);
                assert!((e.coeff(0).re - want).abs() < 1e-12);
                for k in 1..=e.order() {
                    assert!(e.coeff(k).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn singular_matrix_is_rejected() {
        let m = Mat::from_rows(vec![
            vec![ps(0, &[1.0]), ps(0, &[1.0])],
            vec![ps(0, &[1.0]), ps(0, &[1.0])],
        ])
        .unwrap();
        assert_eq!(m.inv(), Err(Error::NonInvertible));
    }

    #[test]
    fn neumann_of_strictly_upper() {
        let one = ps(0, &[1.0]);
        let z = ps(0, &[]);
        let e = ps(0, &[2.0]);
        let m = Mat::from_rows(vec![
            vec![one.clone(), e.clone(), z.clone()],
            vec![z.clone(), one.clone(), e.clone()],
            vec![z.clone(), z.clone(), one.clone()],
        ])
        .unwrap();
        let inv = m.neumann_inv().unwrap();
        assert_eq!(inv.get(0, 1).coeff(0).re, -2.0);
        assert_eq!(inv.get(0, 2).coeff(0).re, 4.0);
        assert_eq!(inv.get(1, 0), &z);
    }

    #[test]
    fn kron_shapes_and_entries() {
        let a = Mat::from_rows(vec![vec![ps(0, &[2.0]), ps(0, &[3.0])]]).unwrap();
        let b = Mat::from_rows(vec![vec![ps(0, &[5.0])], vec![ps(0, &[7.0])]]).unwrap();
        let k = a.kron(&b);
        assert_eq!((k.rows(), k.cols()), (2, 2));
        assert_eq!(k.get(1, 1).coeff(0).re, 21.0);
    }
}
