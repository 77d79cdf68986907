//! Resolved run configuration.

use crate::{CliError, CliResult, CommonArgs};
use serde::Serialize;

pub const DEFAULT_TRUNC_ORDER: i64 = 32;
pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_SEED: u64 = 42;
pub const MIN_TRUNC_ORDER: i64 = 4;
pub const MAX_TOL: f64 = 1e-2;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Config {
    pub trunc_order: i64,
    pub tol: f64,
    pub seed: u64,
    pub branch_offset: i64,
    pub output: String,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            trunc_order: DEFAULT_TRUNC_ORDER,
            tol: DEFAULT_TOL,
            seed: DEFAULT_SEED,
            branch_offset: 0,
            output: "-".into(),
        }
    }
}

impl Config {
    /// Flags win over the environment value, which wins over the defaults.
    pub fn resolve(args: &CommonArgs, env_trunc: Option<&str>) -> CliResult<Self> {
        let mut cfg = Config::default();
        if let Some(v) = env_trunc {
            cfg.trunc_order = v.trim().parse().map_err(|_| {
                CliError::Usage(format!("WILDSTOKES_TRUNC_ORDER is not an integer: {v:?}"))
            })?;
        }
        if let Some(n) = args.trunc_order {
            cfg.trunc_order = n;
        }
        if let Some(t) = args.tol {
            cfg.tol = t;
        }
        if let Some(s) = args.seed {
            cfg.seed = s;
        }
        if let Some(b) = args.branch_offset {
            cfg.branch_offset = b;
        }
        if let Some(o) = &args.out {
            cfg.output = o.clone();
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> CliResult<()> {
        if self.trunc_order < MIN_TRUNC_ORDER {
            return Err(CliError::Usage(format!(
                "trunc_order must be at least {MIN_TRUNC_ORDER}, got {}",
                self.trunc_order
            )));
        }
        if !(self.tol > 0.0 && self.tol <= MAX_TOL) {
            return Err(CliError::Usage(format!(
                "tol must lie in (0, {MAX_TOL:e}], got {:e}",
                self.tol
            )));
        }
        Ok(())
    }
}
