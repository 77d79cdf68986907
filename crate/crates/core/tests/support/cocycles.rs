//! Random ordered exponent lists and Stokes cocycles with known structure.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use wildstokes::cocycle::BlockCocycle;
use wildstokes::exponents::{order_exponents, Exponent, Parity};
use wildstokes::matrix::{Mat, SeriesField};
use wildstokes::puiseux::LaurentU;
use wildstokes::C64;

pub const ORDER: i64 = 32;

pub fn random_exponent(rng: &mut ChaCha8Rng) -> Exponent {
    let p = rng.gen_range(1..=3u32);
    let q = rng.gen_range(-4..=4);
    let cs = (0..p)
        .map(|_| C64::from_polar(rng.gen_range(0.0..3.0), rng.gen_range(-PI..PI)))
        .collect();
    Exponent::new(p, q, cs).unwrap()
}

/// 1..=4 pairwise distinct exponents in the given order.
pub fn ordered_exponents(rng: &mut ChaCha8Rng, parity: Parity) -> Vec<Exponent> {
    loop {
        let m = rng.gen_range(1..=4);
        let list: Vec<Exponent> = (0..m).map(|_| random_exponent(rng)).collect();
        let distinct = (0..m).all(|i| (0..i).all(|j| !list[i].sub(&list[j]).is_zero()));
        if distinct {
            return order_exponents(&list, parity)
                .into_iter()
                .map(|k| list[k].clone())
                .collect();
        }
    }
}

pub fn laurent_poly(rng: &mut ChaCha8Rng, lo: i64, hi: i64) -> LaurentU {
    let v = rng.gen_range(lo..=hi);
    let len = rng.gen_range(1..=(hi - v + 1) as usize);
    let cs = (0..len)
        .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    LaurentU::new(v, cs, ORDER).unwrap()
}

pub fn offsets(sizes: &[usize]) -> Vec<usize> {
    sizes
        .iter()
        .scan(0, |acc, &n| {
            let o = *acc;
            *acc += n;
            Some(o)
        })
        .collect()
}

pub fn block_of(off: &[usize], sizes: &[usize], r: usize) -> usize {
    (0..sizes.len()).rev().find(|&k| r >= off[k]).unwrap()
}

pub fn random_even(rng: &mut ChaCha8Rng) -> BlockCocycle {
    let exps = ordered_exponents(rng, Parity::Even);
    let sizes: Vec<usize> = exps.iter().map(|_| rng.gen_range(1..=2)).collect();
    let off = offsets(&sizes);
    let n: usize = sizes.iter().sum();
    let m = Mat::from_fn(n, n, |r, col| {
        let (bi, bj) = (block_of(&off, &sizes, r), block_of(&off, &sizes, col));
        if r == col {
            LaurentU::one(ORDER)
        } else if bi < bj {
            laurent_poly(rng, -5, 5)
        } else {
            LaurentU::zero(ORDER)
        }
    });
    BlockCocycle::new(sizes, exps, Vec::new(), (-0.5, 0.5), m).unwrap()
}

/// `T = T_R U` with `T_R` lower block triangular (diagonal blocks `I + O(u)`)
/// and `U` upper unitriangular, both with Laurent polynomial entries.
pub fn random_odd(rng: &mut ChaCha8Rng) -> (BlockCocycle, Mat<LaurentU>, Mat<LaurentU>) {
    let exps = ordered_exponents(rng, Parity::Odd);
    let sizes: Vec<usize> = exps.iter().map(|_| rng.gen_range(1..=2)).collect();
    let off = offsets(&sizes);
    let n: usize = sizes.iter().sum();
    let mut blocks = |lower: bool| {
        Mat::from_fn(n, n, |r, col| {
            let (bi, bj) = (block_of(&off, &sizes, r), block_of(&off, &sizes, col));
            if bi == bj {
                let one = LaurentU::one(ORDER);
                match (lower, r == col) {
                    (true, true) => laurent_poly(rng, 1, 5).add(&one),
                    (true, false) => laurent_poly(rng, 1, 5),
                    (false, true) => one,
                    (false, false) => LaurentU::zero(ORDER),
                }
            } else if (bi > bj) == lower {
                laurent_poly(rng, -5, 5)
            } else {
                LaurentU::zero(ORDER)
            }
        })
    };
    let tr = blocks(true);
    let u = blocks(false);
    let t = tr.mul(&u).unwrap();
    let tau = BlockCocycle::new(sizes, exps, Vec::new(), (1.0, 2.0), t).unwrap();
    (tau, tr, u)
}

pub fn mat_distance(a: &Mat<LaurentU>, b: &Mat<LaurentU>) -> f64 {
    a.sub(b)
        .unwrap()
        .iter()
        .map(|e| e.max_abs())
        .fold(0.0, f64::max)
}
