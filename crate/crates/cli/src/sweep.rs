//! Dominance tables over a grid of directions, as CSV for plotting.

use crate::{CliError, CliResult};
use wildstokes::exponents::{dominance_at, stokes_directions, Exponent, Verdict};
use wildstokes::Error;

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub theta: f64,
    pub verdict: Verdict,
    pub signature: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Sweep {
    pub columns: Vec<String>,
    pub rows: Vec<SweepRow>,
    pub stokes_directions: Vec<f64>,
}

/// `points` directions `from + k (to − from) / points`, `k = 0..points`.
pub fn grid(from: f64, to: f64, points: usize) -> CliResult<Vec<f64>> {
    if points == 0 || !from.is_finite() || !to.is_finite() || to <= from {
        return Err(CliError::Input(format!(
            "invalid direction grid: {points} points on [{from}, {to})"
        )));
    }
    let h = (to - from) / points as f64;
    Ok((0..points).map(|k| from + h * k as f64).collect())
}

pub fn sweep(a: &Exponent, b: &Exponent, thetas: &[f64]) -> CliResult<Sweep> {
    let d = a.sub(b);
    let columns = d
        .signature(0.0)
        .terms
        .iter()
        .map(|(s, _)| s.to_string())
        .collect();
    let rows = thetas
        .iter()
        .map(|&theta| SweepRow {
            theta,
            verdict: dominance_at(a, b, theta),
            signature: d.signature(theta).terms.iter().map(|t| t.1).collect(),
        })
        .collect();
    let stokes_directions = match stokes_directions(a, b) {
        Ok(v) => v,
        Err(Error::IdenticalExponents) => vec![],
        Err(e) => return Err(e.into()),
    };
    Ok(Sweep {
        columns,
        rows,
        stokes_directions,
    })
}

impl Sweep {
    /// Header `theta,verdict,<scales…>`, one row per direction, then one
    /// `# stokes_direction=θ` line per Stokes direction.
    pub fn to_csv(&self) -> CliResult<String> {
        let err = |e: csv::Error| CliError::Input(format!("csv: {e}"));
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["theta".to_string(), "verdict".to_string()];
        header.extend(self.columns.iter().cloned());
        w.write_record(&header).map_err(err)?;
        for r in &self.rows {
            let mut rec = vec![format!("{:.17e}", r.theta), r.verdict.to_string()];
            rec.extend(r.signature.iter().map(|x| format!("{x:.17e}")));
            w.write_record(&rec).map_err(err)?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| CliError::Input(format!("csv: {e}")))?;
        let mut out = String::from_utf8(bytes).expect("csv output is UTF-8");
        for t in &self.stokes_directions {
            out.push_str(&format!("# stokes_direction={t:.17e}\n"));
        }
        Ok(out)
    }

    /// Directions `θ_k` whose verdict differs from that of `θ_{k−1}`
    /// (cyclically).
    pub fn flips(&self) -> Vec<f64> {
        let n = self.rows.len();
        (0..n)
            .filter(|&k| self.rows[k].verdict != self.rows[(k + n - 1) % n].verdict)
            .map(|k| self.rows[k].theta)
            .collect()
    }
}
