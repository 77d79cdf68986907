//! The Gamma-function module `Γ(s+1) = sΓ(s)` as an end-to-end benchmark:
//! complex Gamma evaluation, Stirling fit, reflection identity, graded model
//! and Stokes transition data.

use crate::cocycle::{validate_cocycle, BlockCocycle, ValidationReport};
use crate::diffmod::{coboundary_complete, rank1_classify, rank1_unit};
use crate::exponents::{odd_bound, Exponent, Parity};
use crate::lambda::{check_u_moderate, Growth, Side, UModerateReport};
use crate::matrix::{lstsq, Mat};
use crate::puiseux::{LaurentU, PuiseuxSeries};
use crate::{Error, Result, C64};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

const LANCZOS_G: f64 = 607.0 / 128.0;
const LANCZOS: [f64; 15] = [
    0.999_999_999_999_997_1,
    57.156_235_665_862_92,
    -59.597_960_355_475_49,
    14.136_097_974_741_746,
    -0.491_913_816_097_620_2,
    0.339_946_499_848_118_9e-4,
    0.465_236_289_270_485_76e-4,
    -0.983_744_753_048_795_6e-4,
    0.158_088_703_224_912_5e-3,
    -0.210_264_441_724_104_9e-3,
    0.217_439_618_115_212_64e-3,
    -0.164_318_106_536_763_9e-3,
    0.844_182_239_838_527_4e-4,
    -0.261_908_384_015_814_1e-4,
    0.368_991_826_595_316_2e-5,
];

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;
const I: C64 = C64 { re: 0.0, im: 1.0 };

fn pole_index(s: C64) -> Option<i64> {
    (s.im == 0.0 && s.re <= 0.0 && s.re.fract() == 0.0).then(|| s.re as i64)
}

/// `log(1 + w)` accurate for small `|w|`.
fn ln_1p(w: C64) -> C64 {
    if w.norm() > 0.1 {
        return (1.0 + w).ln();
    }
    let y = w / (2.0 + w);
    let y2 = y * y;
    let mut term = y;
    let mut acc = y;
    for k in 1..60 {
        term *= y2;
        let next = term / (2 * k + 1) as f64;
        acc += next;
        if next.norm() < 1e-18 * acc.norm() {
            break;
        }
    }
    acc * 2.0
}

/// Lanczos sum and `ln Γ(s) − ln(√(2π) e^{-s} s^{s−1/2})` for `Re s ≥ 1/2`.
fn lanczos_stirling_ratio(s: C64) -> C64 {
    let z = s - 1.0;
    let mut x = C64::new(LANCZOS[0], 0.0);
    for (k, c) in LANCZOS.iter().enumerate().skip(1) {
        x += c / (z + k as f64);
    }
    let w = (LANCZOS_G - 0.5) / s;
    (s - 0.5) * ln_1p(w) - (LANCZOS_G - 0.5) + x.ln()
}

fn stirling_log(s: C64) -> C64 {
    HALF_LN_2PI + (s - 0.5) * s.ln() - s
}

/// Principal branch of `ln Γ(s)`, continued to `Re s < 1/2` with the
/// recursion `ln Γ(s) = ln Γ(s+n) − Σ ln(s+k)`.
pub fn ln_gamma(s: C64) -> Result<C64> {
    if let Some(n) = pole_index(s) {
        return Err(Error::PoleAt(n));
    }
    if !(s.re.is_finite() && s.im.is_finite()) {
        return Err(Error::InvalidInput(format!("non-finite argument {s}")));
    }
    let shift = if s.re < 0.5 {
        (0.5 - s.re).ceil() as usize
    } else {
        0
    };
    let mut acc = C64::new(0.0, 0.0);
    for k in 0..shift {
        acc += (s + k as f64).ln();
    }
    let t = s + shift as f64;
    Ok(stirling_log(t) + lanczos_stirling_ratio(t) - acc)
}

pub fn gamma_eval(s: C64) -> Result<C64> {
    Ok(ln_gamma(s)?.exp())
}

/// `Γ(s) / (√(2π) e^{-s} s^{s−1/2})` for `Re s ≥ 1/2`.
pub fn stirling_ratio(s: C64) -> Result<C64> {
    if s.re < 0.5 {
        return Ok((ln_gamma(s)? - stirling_log(s)).exp());
    }
    Ok(lanczos_stirling_ratio(s).exp())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StirlingFit {
    pub ray_angle: f64,
    pub window: (f64, f64),
    pub a: Vec<C64>,
    pub condition: f64,
}

pub const FIT_SAMPLES: usize = 64;
pub const MAX_CONDITION: f64 = 1e12;

/// Least-squares fit of `Γ(s)/(√(2π)e^{-s}s^{s−1/2}) ≈ Σ_{k≤orders} a_k s^{-k}`
/// on `|s| ∈ window` along the ray `arg s = ray_angle`.
pub fn stirling_fit_window(
    ray_angle: f64,
    orders: usize,
    window: (f64, f64),
) -> Result<StirlingFit> {
    if ray_angle.abs() >= PI - 0.2 {
        return Err(Error::InvalidInput(format!(
            "ray angle {ray_angle} outside |arg s| < π − 0.2"
        )));
    }
    if !(window.0 > 0.0 && window.1 > window.0) {
        return Err(Error::InvalidInput("empty radius window".into()));
    }
    let dir = C64::from_polar(1.0, ray_angle);
    let ratio = (window.1 / window.0).powf(1.0 / (FIT_SAMPLES - 1) as f64);
    let pts: Vec<C64> = (0..FIT_SAMPLES)
        .map(|k| dir * window.0 * ratio.powi(k as i32))
        .collect();
    // columns (r0/s)^k keep the design matrix scaled
    let r0 = window.0;
    let x = DMatrix::from_fn(FIT_SAMPLES, orders + 1, |i, k| (r0 / pts[i]).powi(k as i32));
    let mut y = DVector::zeros(FIT_SAMPLES);
    for (i, s) in pts.iter().enumerate() {
        y[i] = stirling_ratio(*s)?;
    }
    let (sol, sv) = lstsq(&x, &y, 0.0, 0.0);
    let smax = sv.first().copied().unwrap_or(0.0);
    let smin = sv.last().copied().unwrap_or(0.0);
    let condition = if smin > 0.0 {
        smax / smin
    } else {
        f64::INFINITY
    };
    if condition > MAX_CONDITION {
        return Err(Error::IllConditionedFit(condition));
    }
    let a = (0..=orders).map(|k| sol[k] * r0.powi(k as i32)).collect();
    Ok(StirlingFit {
        ray_angle,
        window,
        a,
        condition,
    })
}

pub fn stirling_fit(ray_angle: f64, orders: usize) -> Result<StirlingFit> {
    stirling_fit_window(ray_angle, orders, (50.0, 400.0))
}

/// `(1−u)Γ(s) + 2πi e^{πis}/Γ(1−s)`, scaled by `1 + |Γ(s)|`.
pub fn reflection_residual(s: C64) -> Result<f64> {
    let g = gamma_eval(s)?;
    let g1 = gamma_eval(1.0 - s)?;
    let u = (TAU * I * s).exp();
    let lhs = (1.0 - u) * g;
    let rhs = -TAU * I * (PI * I * s).exp() / g1;
    Ok((lhs - rhs).norm() / (1.0 + g.norm()))
}

/// Maximum of [`reflection_residual`] over `samples`.
pub fn reflection_check(samples: &[C64]) -> Result<f64> {
    samples
        .iter()
        .map(|s| reflection_residual(*s))
        .try_fold(0.0_f64, |m, r| r.map(|r| m.max(r)))
}

/// Seeded points of the upper half disc `|s| ≤ radius`, `Im s > 0`.
pub fn reflection_samples(seed: u64, count: usize, radius: f64) -> Vec<C64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let r = radius * rng.gen::<f64>().sqrt();
            let th = PI * rng.gen_range(0.01..0.99);
            C64::from_polar(r.max(1e-3), th)
        })
        .collect()
}

/// The Gamma exponent `𝔞 = −s log s + s`.
pub fn gamma_exponent() -> Exponent {
    Exponent::unramified(-1, C64::new(1.0, 0.0))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RayRatio {
    pub angle: f64,
    pub s: C64,
    /// `|Γ(s)| / |e^{-s} s^{s−1/2}|`.
    pub raw: f64,
    /// The same ratio after the formal gauge `f` with `f(s+1)/f(s)` equal to
    /// the rank-one unit.
    pub gauged: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GradedReport {
    pub q: i64,
    pub p: u32,
    pub c: C64,
    pub gamma: C64,
    pub classification_ok: bool,
    pub wild: bool,
    pub radius: f64,
    pub ratios: Vec<RayRatio>,
    pub sqrt_2pi: f64,
    pub max_gauged_error: f64,
}

pub const GRADED_RADIUS: f64 = 300.0;
const GAUGE_ORDER: i64 = 16;

/// Classifies `g = s^{-1}` and compares `|Γ|` with the graded model on rays.
pub fn gamma_graded_model() -> Result<GradedReport> {
    let g = PuiseuxSeries::monomial(1, C64::new(1.0, 0.0), 1, GAUGE_ORDER + 2);
    let (a, gamma) = rank1_classify(&g, 0)?;
    let unit = rank1_unit(&g, &a, gamma)?;
    let gauge = coboundary_complete(&unit, GAUGE_ORDER)?;
    let c = a.c_p();
    let classification_ok = a.p() == 1
        && a.q() == -1
        && (c - C64::new(1.0, 0.0)).norm() < 1e-14
        && (gamma - C64::new(0.5, 0.0)).norm() < 1e-14;
    let sqrt_2pi = TAU.sqrt();
    let mut ratios = Vec::new();
    let mut max_err: f64 = 0.0;
    for angle in [0.0, PI / 4.0, PI / 2.0, -PI / 2.0, 3.0 * PI / 4.0] {
        let s = C64::from_polar(GRADED_RADIUS, angle);
        // log|e^{-𝔞} s^{-γ}| with 𝔞 = −s log s + s, γ = 1/2
        let model = -a.eval(s, 0) - gamma * s.ln();
        let lg = ln_gamma(s)?;
        let raw = (lg.re - model.re).exp();
        let (f, _) = gauge.eval(s, 0);
        let gauged = raw * f.norm();
        max_err = max_err.max((gauged - sqrt_2pi).abs());
        ratios.push(RayRatio {
            angle,
            s,
            raw,
            gauged,
        });
    }
    Ok(GradedReport {
        q: a.q(),
        p: a.p(),
        c,
        gamma,
        classification_ok,
        wild: a.q() != 0,
        radius: GRADED_RADIUS,
        ratios,
        sqrt_2pi,
        max_gauged_error: max_err,
    })
}

/// `log((1−u)Γ(s))`, switching to `log(−2πi) + πis − log Γ(1−s)` in the
/// lower half plane where `u` overflows.
pub fn ln_one_minus_u_gamma(s: C64) -> Result<C64> {
    if s.im >= 0.0 {
        let u = (TAU * I * s).exp();
        Ok((1.0 - u).ln() + ln_gamma(s)?)
    } else {
        Ok((-TAU * I).ln() + PI * I * s - ln_gamma(1.0 - s)?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeEntry {
    pub label: String,
    pub expected: Growth,
    pub report: UModerateReport,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CocycleReport {
    pub arc: (f64, f64),
    /// Odd-case bound for the pair `(𝔞_Γ, 𝔞_Γ)`.
    pub threshold: f64,
    pub transition: Vec<(i64, C64)>,
    pub validation: ValidationReport,
    pub probes: Vec<ProbeEntry>,
    pub consistent: bool,
}

pub const PROBE_STRIP: (f64, f64) = (1.0, 2.0);

/// Transition `1 − u` on the upper overlap arc, validated as a cocycle, and
/// growth probes of `Γ` and `(1−u)Γ` on vertical strips.
pub fn gamma_cocycle_check() -> Result<CocycleReport> {
    let a = gamma_exponent();
    let arc = (0.0, PI);
    let t = LaurentU::from_real(0, &[1.0, -1.0], 16);
    let transition: Vec<(i64, C64)> = t.terms().filter(|(_, c)| c.norm() > 0.0).collect();
    let tau = BlockCocycle::new(
        vec![1],
        vec![a.clone()],
        Vec::new(),
        arc,
        Mat::from_rows(vec![vec![t]])?,
    )?;
    let validation = validate_cocycle(&tau, Parity::Odd);
    let threshold = odd_bound(&a, &a);
    let lg = |s: C64| ln_gamma(s).unwrap_or(C64::new(f64::NAN, 0.0));
    let lug = |s: C64| ln_one_minus_u_gamma(s).unwrap_or(C64::new(f64::NAN, 0.0));
    let specs: [(&str, &dyn Fn(C64) -> C64, i64, Side, Growth); 4] = [
        ("gamma upper N=0", &lg, 0, Side::Upper, Growth::Decaying),
        (
            "(1-u)gamma upper N=0",
            &lug,
            0,
            Side::Upper,
            Growth::Decaying,
        ),
        (
            "(1-u)gamma lower N=1",
            &lug,
            1,
            Side::Lower,
            Growth::Decaying,
        ),
        (
            "(1-u)gamma lower N=0",
            &lug,
            0,
            Side::Lower,
            Growth::Growing,
        ),
    ];
    let mut probes = Vec::new();
    for (label, h, n, side, expected) in specs {
        let report = check_u_moderate(h, PROBE_STRIP, n, side)?;
        probes.push(ProbeEntry {
            label: label.to_string(),
            expected,
            ok: report.verdict == expected,
            report,
        });
    }
    let consistent = validation.admissible && probes.iter().all(|p| p.ok);
    Ok(CocycleReport {
        arc,
        threshold,
        transition,
        validation,
        probes,
        consistent,
    })
}
