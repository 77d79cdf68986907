//! Right-hand sides for the `lambda` command: built-in families or a JSON
//! file.

use crate::{CliError, CliResult};
use serde::{Deserialize, Serialize};
use std::sync::Arc;
use wildstokes::json::{Cx, SeriesJson};
use wildstokes::lambda::{NumericModule, VectorFn};
use wildstokes::{CVector, C64};

/// JSON description of `f`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum RhsSpec {
    /// `f(s) = value`.
    Constant { value: Vec<Cx> },
    /// `f(s) = Y(s) e_column · base^{-s}`, with `Y` the fundamental solution
    /// of the module's graded block.
    FundamentalDecay {
        #[serde(default = "default_base")]
        base: f64,
        #[serde(default)]
        column: usize,
    },
    /// `f(s)` given componentwise by truncated Puiseux series.
    Series { entries: Vec<SeriesJson> },
}

fn default_base() -> f64 {
    2.0
}

impl RhsSpec {
    /// `zero`, `one` and `fundamental-decay` name built-in families; anything
    /// else is read as a JSON file.
    pub fn parse(arg: &str) -> CliResult<Self> {
        match arg {
            "zero" => Ok(RhsSpec::Constant { value: vec![] }),
            "one" => Ok(RhsSpec::Constant {
                value: vec![Cx(C64::new(1.0, 0.0))],
            }),
            "fundamental-decay" => Ok(RhsSpec::FundamentalDecay {
                base: default_base(),
                column: 0,
            }),
            path => crate::commands::read_json(path),
        }
    }

    /// Builds `f` for a module of the given rank. A constant of length 0 or 1
    /// is broadcast to every component.
    pub fn build(&self, m: &NumericModule, branch: i64) -> CliResult<VectorFn> {
        let r = m.rank();
        match self {
            RhsSpec::Constant { value } => {
                let v = match value.len() {
                    0 => CVector::zeros(r),
                    1 => CVector::from_element(r, value[0].0),
                    n if n == r => CVector::from_iterator(r, value.iter().map(|c| c.0)),
                    n => {
                        return Err(CliError::Input(format!(
                            "rhs has {n} components, module rank is {r}"
                        )))
                    }
                };
                Ok(Arc::new(move |_| v.clone()))
            }
            RhsSpec::FundamentalDecay { base, column } => {
                if !(base.is_finite() && *base > 1.0) {
                    return Err(CliError::Input(format!(
                        "decay base must exceed 1, got {base}"
                    )));
                }
                if *column >= r {
                    return Err(CliError::Input(format!(
                        "column {column} out of range for rank {r}"
                    )));
                }
                let y = m.fundamental().ok_or_else(|| {
                    CliError::Input("fundamental-decay needs a module with one graded block".into())
                })?;
                let (lb, col) = (base.ln(), *column);
                Ok(Arc::new(move |z: C64| {
                    y.eval(z).column(col).into_owned() * (-z * lb).exp()
                }))
            }
            RhsSpec::Series { entries } => {
                if entries.len() != r {
                    return Err(CliError::Input(format!(
                        "rhs has {} components, module rank is {r}",
                        entries.len()
                    )));
                }
                let series = entries
                    .iter()
                    .map(|e| e.to_series())
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(Arc::new(move |z: C64| {
                    CVector::from_iterator(r, series.iter().map(|x| x.eval(z, branch).0))
                }))
            }
        }
    }
}
