use proptest::prelude::*;
use wildstokes::diffmod::{
    dual, hom, mk_elementary, rank1_classify, tensor, trivial, DifferenceModule, GradedBlock,
};
use wildstokes::exponents::Exponent;
use wildstokes::matrix::Mat;
use wildstokes::puiseux::PuiseuxSeries;
use wildstokes::{CMatrix, C64};

const ORDER: i64 = 10;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// `A(s) = I + E₀ + s^{-1}A₁ + s^{-2}A₂` with `‖E₀‖` small, so `A₀` is
/// invertible.
fn module(rank: usize) -> impl Strategy<Value = DifferenceModule> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), rank * rank * 3).prop_map(move |v| {
        let m = Mat::from_fn(rank, rank, |i, j| {
            let k = 3 * (i * rank + j);
            let mut cs: Vec<C64> = (0..3).map(|t| c(v[k + t].0, v[k + t].1)).collect();
            cs[0] *= 0.2;
            if i == j {
                cs[0] += 1.0;
            }
            PuiseuxSeries::new(1, 0, cs, ORDER).unwrap()
        });
        DifferenceModule::new(m).unwrap()
    })
}

fn max_diff(a: &Mat<PuiseuxSeries>, b: &Mat<PuiseuxSeries>) -> f64 {
    a.sub(b)
        .unwrap()
        .iter()
        .map(|e| e.max_abs())
        .fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn classify_inverts_elementary(q in -3i64..=3, cr in -2.0..2.0f64, ci in -3.0..3.0f64,
                                   gr in -2.0..2.0f64, gi in -2.0..2.0f64) {
        let a = Exponent::unramified(q, c(cr, ci));
        let gamma = c(gr, gi);
        let m = mk_elementary(&GradedBlock::scalar(a.clone(), gamma), 12).unwrap();
        let (b, g) = rank1_classify(m.matrix().get(0, 0), 0).unwrap();
        prop_assert_eq!(b.q(), q);
        prop_assert!((b.c_p() - a.c_p()).norm() < 1e-12, "{:?} vs {:?}", b, a);
        prop_assert!((g - gamma).norm() < 1e-12);
    }

    #[test]
    fn hom_is_dual_tensor((m1, m2) in (1usize..=2, 1usize..=2).prop_flat_map(|(r1, r2)| (module(r1), module(r2)))) {
        let h = hom(&m1, &m2).unwrap();
        let t = tensor(&dual(&m1).unwrap(), &m2).unwrap();
        prop_assert!(max_diff(h.matrix(), t.matrix()) < 1e-10);
        let d = hom(&m1, &trivial(1, ORDER)).unwrap();
        prop_assert!(max_diff(d.matrix(), dual(&m1).unwrap().matrix()) < 1e-10);
        for m in [&h, &t, &d] {
            prop_assert!(m.matrix().inv().is_ok());
        }
    }

    #[test]
    fn identity_section_is_invariant(m in (1usize..=3).prop_flat_map(module)) {
        let r = m.rank();
        let h = hom(&m, &m).unwrap();
        let one = PuiseuxSeries::one(1, ORDER);
        let vec_id = Mat::from_fn(r * r, 1, |k, _| {
            if k % (r + 1) == 0 { one.clone() } else { PuiseuxSeries::zero(1, ORDER) }
        });
        let image = h.matrix().mul(&vec_id).unwrap();
        prop_assert!(max_diff(&image, &vec_id) < 1e-10);
    }

    #[test]
    fn tensor_unit(m in (1usize..=3).prop_flat_map(module)) {
        let t = tensor(&trivial(1, ORDER), &m).unwrap();
        prop_assert!(max_diff(t.matrix(), m.matrix()) < 1e-15);
    }
}

#[test]
fn rank_one_tensor_multiplies() {
    let g1 = PuiseuxSeries::from_real(1, 0, &[2.0, 1.0], ORDER);
    let g2 = PuiseuxSeries::from_real(1, -1, &[1.0, 0.0, 3.0], ORDER);
    let one =
        |g: &PuiseuxSeries| DifferenceModule::new(Mat::from_fn(1, 1, |_, _| g.clone())).unwrap();
    let t = tensor(&one(&g1), &one(&g2)).unwrap();
    assert!(t.matrix().get(0, 0).sub(&g1.mul(&g2)).max_abs() < 1e-15);
}

#[test]
fn elementary_examples() {
    let triv = mk_elementary(&GradedBlock::scalar(Exponent::zero(), c(0.0, 0.0)), 8).unwrap();
    assert!(
        triv.matrix()
            .get(0, 0)
            .sub(&PuiseuxSeries::one(1, 8))
            .max_abs()
            < 1e-15
    );
    let reg = mk_elementary(&GradedBlock::scalar(Exponent::zero(), c(1.0, 0.0)), 8).unwrap();
    let want = PuiseuxSeries::from_real(1, 0, &[1.0, 1.0], 8);
    assert!(reg.matrix().get(0, 0).sub(&want).max_abs() < 1e-15);
    let gamma = GradedBlock::new(
        Exponent::unramified(-1, c(1.0, 0.0)),
        CMatrix::from_element(1, 1, c(0.5, 0.0)),
    )
    .unwrap();
    let g = mk_elementary(&gamma, 8).unwrap();
    let e = g.matrix().get(0, 0);
    assert_eq!(e.val(), 1);
    assert!((e.coeff(1) - c(1.0, 0.0)).norm() < 1e-14);
    assert!(e.coeff(2).norm() < 1e-14);
    assert!(e.coeff(3).norm() > 1e-3);
}
