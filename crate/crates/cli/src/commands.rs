//! Subcommand implementations. Each returns a results object and a
//! residuals object; `dispatch` wraps them into a report.

use crate::report::{emit, to_value, CommandEcho, Report, Timing, SCHEMA};
use crate::rhs::RhsSpec;
use crate::sweep;
use crate::{
    parse, CliError, CliResult, Command, Config, ExponentCmd, GammaArgs, LambdaArgs, LambdaMode,
    ModuleOp, ParityArg, SeriesArgs, SeriesOp, SweepArgs,
};
use serde::de::DeserializeOwned;
use serde_json::{json, Map, Value};
use std::time::Instant;
use wildstokes::cocycle::{
    cocycle_invert, cocycle_mul, factor_even, factor_odd, split, validate_cocycle,
};
use wildstokes::diffmod::{self, DifferenceModule};
use wildstokes::exponents::{self, Exponent, Parity};
use wildstokes::formal_rh::{residual, solve_conjugation, ConjugationProblem, Valuation};
use wildstokes::json::{CocycleJson, Cx, ExponentJson, LaurentUJson, ModuleJson, SeriesJson};
use wildstokes::lambda::{lambda_integral, lambda_series, NumericModule, Path};
use wildstokes::puiseux::PuiseuxSeries;
use wildstokes::{gamma, C64};

enum Output {
    Json { results: Value, residuals: Value },
    Csv(String),
}

fn json(results: Value, residuals: Value) -> CliResult<Output> {
    Ok(Output::Json { results, residuals })
}

/// Reads JSON from a file, from standard input (`-`), or inline when the
/// argument itself starts with `{` or `[`.
pub(crate) fn read_json<T: DeserializeOwned>(arg: &str) -> CliResult<T> {
    let trimmed = arg.trim_start();
    let text = if trimmed.starts_with('{') || trimmed.starts_with('[') {
        arg.to_owned()
    } else if arg == "-" {
        std::io::read_to_string(std::io::stdin())
            .map_err(|e| CliError::Input(format!("cannot read standard input: {e}")))?
    } else {
        std::fs::read_to_string(arg)
            .map_err(|e| CliError::Input(format!("cannot read {arg}: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{arg}: {e}")))
}

fn series_arg(arg: &str) -> CliResult<PuiseuxSeries> {
    Ok(read_json::<SeriesJson>(arg)?.to_series()?)
}

fn exponent_arg(arg: &str) -> CliResult<Exponent> {
    Ok(read_json::<ExponentJson>(arg)?.to_exponent()?)
}

fn module_arg(arg: &str, order: i64) -> CliResult<DifferenceModule> {
    Ok(read_json::<ModuleJson>(arg)?.to_module(order)?)
}

fn complex_arg(flag: &str, text: &str) -> CliResult<C64> {
    parse::complex(text).map_err(|e| CliError::Usage(format!("--{flag}: {e}")))
}

fn required<'a>(flag: &str, v: &'a Option<String>) -> CliResult<&'a str> {
    v.as_deref()
        .ok_or_else(|| CliError::Usage(format!("this operation needs --{flag}")))
}

/// Finite values as numbers, infinities as `"inf"` / `"-inf"`.
fn real_or_inf(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else if x > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}

fn valuation_value(v: Valuation) -> Value {
    match v {
        Valuation::Finite(n) => json!(n),
        Valuation::Infinite => json!("inf"),
    }
}

fn series_json(x: &PuiseuxSeries) -> CliResult<Value> {
    to_value(&SeriesJson::from(x))
}

pub(crate) fn dispatch(cmd: &Command, cfg: &Config, args: Vec<String>) -> CliResult<()> {
    let start = Instant::now();
    let (name, out) = match cmd {
        Command::Series(a) => ("series", series(a, cfg)?),
        Command::Exponent(e) => ("exponent", exponent(e)?),
        Command::ClassifyRank1 { series } => ("classify-rank1", classify(series, cfg)?),
        Command::Module { op, a, b } => ("module", module(*op, a, b, cfg)?),
        Command::Conjugate {
            module,
            graded,
            order,
            lead,
        } => ("conjugate", conjugate(module, graded, *order, *lead, cfg)?),
        Command::Split {
            laurent,
            ai,
            aj,
            parity,
        } => ("split", split_cmd(laurent, ai, aj, *parity)?),
        Command::FactorCocycle { cocycle, parity } => {
            ("factor-cocycle", factor(cocycle, *parity, cfg)?)
        }
        Command::Lambda(a) => ("lambda", lambda(a, cfg)?),
        Command::GammaCheck(a) => ("gamma-check", gamma_check(a, cfg)?),
        Command::Sweep(a) => ("sweep", sweep_cmd(a)?),
    };
    match out {
        Output::Csv(text) => emit(&cfg.output, &text),
        Output::Json { results, residuals } => {
            let report = Report {
                schema: SCHEMA,
                command: CommandEcho {
                    name: name.into(),
                    args,
                },
                config: cfg.clone(),
                results,
                residuals,
                timing: Timing {
                    elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
                },
            };
            emit(&cfg.output, &report.to_json()?)
        }
    }
}

fn series(a: &SeriesArgs, cfg: &Config) -> CliResult<Output> {
    let x = series_arg(&a.a)?;
    let other = || -> CliResult<PuiseuxSeries> { series_arg(required("b", &a.b)?) };
    let mut residuals = Map::new();
    let result = match a.op {
        SeriesOp::Add => x.add(&other()?),
        SeriesOp::Sub => x.sub(&other()?),
        SeriesOp::Mul => x.mul(&other()?),
        SeriesOp::Inv => {
            let r = x.inv()?;
            let p = x.mul(&r).sub(&PuiseuxSeries::one(x.p(), r.order()));
            residuals.insert("product_minus_one".into(), json!(p.max_abs()));
            r
        }
        SeriesOp::Exp => x.exp()?,
        SeriesOp::Log => {
            let r = x.log(a.log_branch)?;
            let back = r.exp()?.sub(&x);
            residuals.insert("exp_log_minus_input".into(), json!(back.max_abs()));
            r
        }
        SeriesOp::Pow => {
            let alpha = complex_arg("power", required("power", &a.power)?)?;
            x.pow_unit(alpha)?
        }
        SeriesOp::Shift => {
            let r = x.shift();
            residuals.insert(
                "unshift_minus_input".into(),
                json!(r.unshift().sub(&x).max_abs()),
            );
            r
        }
        SeriesOp::Unshift => {
            let r = x.unshift();
            residuals.insert(
                "shift_minus_input".into(),
                json!(r.shift().sub(&x).max_abs()),
            );
            r
        }
        SeriesOp::Eval => {
            let s0 = complex_arg("at", required("at", &a.at)?)?;
            let (v, err) = x.eval(s0, cfg.branch_offset);
            return json(
                json!({ "at": Cx(s0), "value": Cx(v), "tail_estimate": err }),
                json!({}),
            );
        }
    };
    json(
        json!({ "series": series_json(&result)? }),
        Value::Object(residuals),
    )
}

fn exponent(cmd: &ExponentCmd) -> CliResult<Output> {
    match cmd {
        ExponentCmd::Compare { a, b, theta } => {
            let (a, b) = (exponent_arg(a)?, exponent_arg(b)?);
            let verdict = exponents::dominance_at(&a, &b, *theta);
            let sig = a.sub(&b).signature(*theta);
            let terms: Vec<Value> = sig
                .terms
                .iter()
                .map(|(s, v)| json!({ "scale": s.to_string(), "value": v }))
                .collect();
            json(
                json!({ "theta": theta, "verdict": verdict, "signature": terms }),
                json!({}),
            )
        }
        ExponentCmd::Stokes { a, b } => {
            let dirs = exponents::stokes_directions(&exponent_arg(a)?, &exponent_arg(b)?)?;
            json(json!({ "stokes_directions": dirs }), json!({}))
        }
        ExponentCmd::Order { list, parity } => {
            let list: Vec<ExponentJson> = read_json(list)?;
            let list = list
                .iter()
                .map(|e| e.to_exponent())
                .collect::<Result<Vec<_>, _>>()?;
            let parity = Parity::from(*parity);
            let perm = exponents::order_exponents(&list, parity);
            let sorted: Vec<ExponentJson> = perm.iter().map(|&i| (&list[i]).into()).collect();
            json(
                json!({
                    "permutation": perm,
                    "ordered": sorted,
                    "already_ordered": exponents::is_ordered(&list, parity),
                }),
                json!({}),
            )
        }
    }
}

fn classify(arg: &str, cfg: &Config) -> CliResult<Output> {
    let g = series_arg(arg)?;
    let (a, gamma) = diffmod::rank1_classify(&g, cfg.branch_offset)?;
    let unit = diffmod::rank1_unit(&g, &a, gamma)?;
    let unit_defect = unit
        .sub(&PuiseuxSeries::one(unit.p(), unit.order()))
        .valuation_rel(1e-12);
    json(
        json!({
            "exponent": ExponentJson::from(&a),
            "gamma": Cx(gamma),
            "wild": a.q() != 0,
            "unit": series_json(&unit)?,
        }),
        json!({ "unit_minus_one_valuation": unit_defect.map_or(json!("inf"), |v| json!(v)) }),
    )
}

fn module(op: ModuleOp, a: &str, b: &Option<String>, cfg: &Config) -> CliResult<Output> {
    let ma = module_arg(a, cfg.trunc_order)?;
    let other =
        || -> CliResult<DifferenceModule> { module_arg(required("b", b)?, cfg.trunc_order) };
    let m = match op {
        ModuleOp::Tensor => diffmod::tensor(&ma, &other()?)?,
        ModuleOp::Hom => diffmod::hom(&ma, &other()?)?,
        ModuleOp::Sum => diffmod::direct_sum(&ma, &other()?)?,
        ModuleOp::Dual => diffmod::dual(&ma)?,
    };
    json(
        json!({ "module": ModuleJson::from(&m), "rank": m.rank(), "p": m.p() }),
        json!({}),
    )
}

fn conjugate(a: &str, b: &str, order: i64, lead: i64, cfg: &Config) -> CliResult<Output> {
    if order < 1 {
        return Err(CliError::Usage(format!(
            "--order must be positive, got {order}"
        )));
    }
    let expand = cfg.trunc_order.max(order);
    let prob = ConjugationProblem {
        a: module_arg(a, expand)?,
        b: module_arg(b, expand)?,
        lead,
        order,
    };
    let f = solve_conjugation(&prob)?;
    let val = residual(&f, &prob.a, &prob.b)?;
    let rows: Vec<Vec<SeriesJson>> = f
        .to_rows()
        .iter()
        .map(|r| r.iter().map(SeriesJson::from).collect())
        .collect();
    json(
        json!({ "F": rows, "order": order, "lead": lead }),
        json!({
            "residual_valuation": valuation_value(val),
            "beyond_order": val.exceeds(order),
        }),
    )
}

fn split_cmd(h: &str, ai: &str, aj: &str, parity: ParityArg) -> CliResult<Output> {
    let h = read_json::<LaurentUJson>(h)?.to_laurent()?;
    let (ai, aj) = (exponent_arg(ai)?, exponent_arg(aj)?);
    let a = exponents::split_threshold(&ai, &aj, parity.into())?;
    let (plus, minus) = split(&h, a);
    let lo = h.val().min(plus.val()).min(minus.val());
    let hi = h.order();
    let defect = (lo..hi)
        .map(|n| (plus.coeff(n) + minus.coeff(n) - h.coeff(n)).norm())
        .fold(0.0, f64::max);
    json(
        json!({
            "threshold": real_or_inf(a),
            "h_plus": LaurentUJson::from(&plus),
            "h_minus": LaurentUJson::from(&minus),
        }),
        json!({ "sum_minus_input": defect }),
    )
}

fn factor(arg: &str, parity: ParityArg, cfg: &Config) -> CliResult<Output> {
    let tau = read_json::<CocycleJson>(arg)?.to_cocycle(cfg.trunc_order)?;
    let parity = Parity::from(parity);
    let validation = validate_cocycle(&tau, parity);
    let (names, first, second, back) = match parity {
        Parity::Even => {
            let (plus, minus) = factor_even(&tau)?;
            let back = cocycle_mul(&cocycle_invert(&plus)?, &minus)?;
            (["tau_plus", "tau_minus"], plus, minus, back)
        }
        Parity::Odd => {
            let (r, l) = factor_odd(&tau)?;
            let back = cocycle_mul(&r, &cocycle_invert(&l)?)?;
            (["T_R", "T_L"], r, l, back)
        }
    };
    let distance = back.distance(&tau);
    let mut factors = Map::new();
    factors.insert(names[0].into(), to_value(&CocycleJson::from(&first))?);
    factors.insert(names[1].into(), to_value(&CocycleJson::from(&second))?);
    json(
        json!({ "parity": parity, "factors": factors, "validation": validation }),
        json!({ "roundtrip_distance": distance }),
    )
}

fn numeric_module(arg: &str, cfg: &Config) -> CliResult<NumericModule> {
    let spec: ModuleJson = read_json(arg)?;
    let graded = spec.graded_module()?;
    let single = graded
        .as_ref()
        .filter(|g| g.blocks.len() == 1)
        .map(|g| g.blocks[0].clone());
    match (&spec.matrix, single) {
        (None, Some(block)) => Ok(NumericModule::from_block(block, cfg.branch_offset)),
        (_, block) => {
            let m = spec.to_module(cfg.trunc_order)?;
            let nm = NumericModule::from_module(&m, cfg.branch_offset);
            match block {
                Some(b) => Ok(nm.with_block(b, cfg.branch_offset)?),
                None => Ok(nm),
            }
        }
    }
}

fn lambda(a: &LambdaArgs, cfg: &Config) -> CliResult<Output> {
    let m = numeric_module(&a.module, cfg)?;
    let f = RhsSpec::parse(&a.rhs)?.build(&m, cfg.branch_offset)?;
    let s0 = complex_arg("at", &a.at)?;
    let value = |v: &wildstokes::CVector| v.iter().map(|c| Cx(*c)).collect::<Vec<_>>();
    match a.mode {
        LambdaMode::Series => {
            let r = lambda_series(&m, f.as_ref(), s0, cfg.tol, a.max_terms)?;
            let fnorm = f(s0).norm();
            json(
                json!({ "mode": "series", "at": Cx(s0), "value": value(&r.value), "terms": r.terms }),
                json!({
                    "relation": r.residual,
                    "relative_relation": if fnorm > 0.0 { r.residual / fnorm } else { r.residual },
                }),
            )
        }
        LambdaMode::Integral => {
            let path = match &a.anchor {
                Some(t) => Path::new(complex_arg("anchor", t)?),
                None => Path::below(s0),
            };
            let r = lambda_integral(&m, f.as_ref(), s0, &path, cfg.tol, a.twist)?;
            json(
                json!({
                    "mode": "integral",
                    "at": Cx(s0),
                    "value": value(&r.value),
                    "anchor": Cx(path.anchor),
                    "twist": r.twist,
                    "t_max": r.t_max,
                    "error_estimate": r.error,
                }),
                json!({ "relation": r.residual, "relative_relation": r.relative_residual }),
            )
        }
    }
}

pub const STIRLING_A0_TOL: f64 = 1e-8;
pub const STIRLING_A1_TOL: f64 = 1e-6;
pub const REFLECTION_TOL: f64 = 1e-9;
pub const REFLECTION_RADIUS: f64 = 10.0;

fn gamma_check(a: &GammaArgs, cfg: &Config) -> CliResult<Output> {
    let any = a.stirling || a.reflection || a.graded || a.cocycle;
    let all = a.all || !any;
    let mut results = Map::new();
    let mut residuals = Map::new();
    if all || a.stirling {
        let fit = gamma::stirling_fit(a.ray_angle, a.orders)?;
        if fit.a.len() < 2 {
            return Err(CliError::Usage("--orders must be at least 1".into()));
        }
        let e0 = (fit.a[0] - 1.0).norm();
        let e1 = (fit.a[1] - 1.0 / 12.0).norm();
        let wide = gamma::stirling_fit_window(a.ray_angle, a.orders, (100.0, 800.0))?;
        let spread = (wide.a[1] - fit.a[1]).norm();
        results.insert(
            "stirling".into(),
            json!({
                "a": fit.a.iter().map(|c| Cx(*c)).collect::<Vec<_>>(),
                "tol_met": e0 <= STIRLING_A0_TOL && e1 <= STIRLING_A1_TOL,
                "ray_angle": fit.ray_angle,
                "windows": [fit.window, wide.window],
                "condition": fit.condition,
            }),
        );
        residuals.insert("stirling_a0_error".into(), json!(e0));
        residuals.insert("stirling_a1_error".into(), json!(e1));
        residuals.insert("stirling_a1_window_spread".into(), json!(spread));
    }
    if all || a.reflection {
        let samples = gamma::reflection_samples(cfg.seed, a.samples, REFLECTION_RADIUS);
        let max = gamma::reflection_check(&samples)?;
        results.insert(
            "reflection".into(),
            json!({
                "max_residual": max,
                "tol_met": max < REFLECTION_TOL,
                "seed": cfg.seed,
                "count": samples.len(),
                "radius": REFLECTION_RADIUS,
            }),
        );
        residuals.insert("reflection_max".into(), json!(max));
    }
    if all || a.graded {
        let g = gamma::gamma_graded_model()?;
        residuals.insert("graded_max_gauged_error".into(), json!(g.max_gauged_error));
        results.insert("graded".into(), to_value(&g)?);
    }
    if all || a.cocycle {
        let c = gamma::gamma_cocycle_check()?;
        results.insert("cocycle".into(), to_value(&c)?);
    }
    json(Value::Object(results), Value::Object(residuals))
}

fn sweep_cmd(a: &SweepArgs) -> CliResult<Output> {
    let (x, y) = (exponent_arg(&a.a)?, exponent_arg(&a.b)?);
    let grid = sweep::grid(a.from, a.to, a.points)?;
    Ok(Output::Csv(sweep::sweep(&x, &y, &grid)?.to_csv()?))
}
