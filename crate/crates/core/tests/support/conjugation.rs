//! Random conjugation problems with a known gauge.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use wildstokes::diffmod::{DifferenceModule, GradedBlock, GradedModule};
use wildstokes::exponents::Exponent;
use wildstokes::formal_rh::ConjugationProblem;
use wildstokes::matrix::Mat;
use wildstokes::puiseux::PuiseuxSeries;
use wildstokes::C64;

pub struct Problem {
    pub prob: ConjugationProblem,
    pub f_true: Mat<PuiseuxSeries>,
    pub classes: Vec<usize>,
}

/// `B` graded with 1..=4 scalar blocks drawn from three exponents, `F_true =
/// I + Σ_{1≤k≤n} F_k s^{-k}` block diagonal by exponent with entries of
/// `F_k` uniform in the box of half-width `decay^k / r`, and
/// `A(s) = F(s−1)^{-1} B(s−1) F(s)`.
pub fn problem(rng: &mut ChaCha8Rng, n: i64, decay: f64) -> Problem {
    let pool = [
        Exponent::zero(),
        Exponent::unramified(0, C64::new(1.0, 0.0)),
        Exponent::unramified(-1, C64::new(1.0, 0.0)),
    ];
    let r = rng.gen_range(1..=4usize);
    let classes: Vec<usize> = (0..r).map(|_| rng.gen_range(0..pool.len())).collect();
    let blocks = classes
        .iter()
        .map(|&k| {
            let g = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            GradedBlock::scalar(pool[k].clone(), g)
        })
        .collect();
    let graded = GradedModule { blocks };
    let b = graded.to_module(n + 24).unwrap();
    let exact = n + 40;
    let f_true = Mat::from_fn(r, r, |i, j| {
        if classes[i] != classes[j] {
            return PuiseuxSeries::zero(1, exact);
        }
        let mut cs: Vec<C64> = (0..=n)
            .map(|k| {
                C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * decay.powi(k as i32)
                    / r as f64
            })
            .collect();
        cs[0] = C64::new(if i == j { 1.0 } else { 0.0 }, 0.0);
        PuiseuxSeries::new(1, 0, cs, exact).unwrap()
    });
    let back = f_true.map(|e| e.unshift());
    let a = back
        .inv()
        .unwrap()
        .mul(&b.matrix().map(|e| e.unshift()))
        .unwrap()
        .mul(&f_true)
        .unwrap();
    let a = DifferenceModule::new(a).unwrap().with_meta(graded).unwrap();
    Problem {
        prob: ConjugationProblem {
            a,
            b,
            lead: 0,
            order: n,
        },
        f_true,
        classes,
    }
}

/// Largest coefficient error of `f` against `f_true` through order `n`.
pub fn coefficient_error(f: &Mat<PuiseuxSeries>, f_true: &Mat<PuiseuxSeries>, n: i64) -> f64 {
    let mut err = 0.0f64;
    for (x, y) in f.iter().zip(f_true.iter()) {
        for k in 0..=n {
            err = err.max((x.coeff(k) - y.coeff(k)).norm());
        }
    }
    err
}
