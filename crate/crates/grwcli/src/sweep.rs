//! Parameter sweeps over a warped scenario.
//!
//! Cells are the Cartesian product of the `[sweep.grid]` values (keys in sorted
//! order, first key outermost) with `x1` innermost. Each row holds the grid
//! parameters, `x1`, `trT`, `delta1F_over_4F`, then `L_<id>` and `res_<id>` for
//! every requested condition.

use grw_core::conditionlab::fit_all;
use grw_core::Fit;
use rayon::prelude::*;

use crate::config::{warped_point, ManifoldSpec, ScenarioConfig};
use crate::report::{Num, Verdict};
use crate::CliError;

#[derive(Clone, Debug)]
pub struct SweepTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    /// Per-row verdicts in row order.
    pub verdicts: Vec<Verdict>,
}

impl SweepTable {
    pub fn verdict(&self) -> Verdict {
        Verdict::combine(self.verdicts.iter().copied())
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let csv_err = |e: csv::Error| CliError::Compute(e.to_string());
        w.write_record(&self.header).map_err(csv_err)?;
        for r in &self.rows {
            w.write_record(r.iter().map(|&x| Num(x).text())).map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Compute(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn to_json(&self) -> Result<String, CliError> {
        #[derive(serde::Serialize)]
        struct Doc<'a> {
            header: &'a [String],
            rows: Vec<Vec<Num>>,
            verdict: Verdict,
        }
        let doc = Doc {
            header: &self.header,
            rows: self.rows.iter().map(|r| r.iter().map(|&x| Num(x)).collect()).collect(),
            verdict: self.verdict(),
        };
        let mut s = serde_json::to_string_pretty(&doc).map_err(|e| CliError::Compute(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }

    pub fn to_table(&self) -> String {
        let width = 12;
        let mut out = String::new();
        for h in &self.header {
            out.push_str(&format!("{h:>width$} "));
        }
        out.push('\n');
        for r in &self.rows {
            for x in r {
                out.push_str(&format!("{:>width$} ", format!("{x:.6}")));
            }
            out.push('\n');
        }
        out
    }
}

/// Runs the sweep described by `cfg.sweep`.
pub fn run_sweep(cfg: &ScenarioConfig, seed: u64, tol: Option<f64>) -> Result<SweepTable, CliError> {
    let ManifoldSpec::Warped { epsilon, warping, x1, fiber } = &cfg.manifold else {
        return Err(CliError::Config("sweep needs a warped manifold".into()));
    };
    let spec = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| CliError::Config("sweep needs a [sweep] section".into()))?;
    let xs = spec.x1.as_ref().unwrap_or(x1);
    let keys: Vec<&String> = spec.grid.keys().collect();
    let cells: usize = xs.len() * spec.grid.values().map(Vec::len).product::<usize>();
    if cells == 0 {
        return Err(CliError::Config("sweep grid has no points".into()));
    }
    // validate parameter names before doing any work
    for k in &keys {
        warping.with_param(k, 0.0)?;
    }
    let ids = cfg.condition_ids()?;
    let ctx = cfg.fit_context(tol)?;
    let fib = fiber.build(seed)?;

    let mut header: Vec<String> = keys.iter().map(|k| k.to_string()).collect();
    header.extend(["x1", "trT", "delta1F_over_4F"].map(String::from));
    for id in &ids {
        header.push(format!("L_{id}"));
        header.push(format!("res_{id}"));
    }

    let rows: Vec<(Vec<f64>, Verdict)> = (0..cells)
        .into_par_iter()
        .map(|cell| {
            let mut rest = cell;
            let xi = rest % xs.len();
            rest /= xs.len();
            let mut params = vec![0.0; keys.len()];
            for (slot, k) in keys.iter().enumerate().rev() {
                let vals = &spec.grid[*k];
                params[slot] = vals[rest % vals.len()];
                rest /= vals.len();
            }
            let mut w = warping.clone();
            for (k, &v) in keys.iter().zip(&params) {
                w = w.with_param(k, v)?;
            }
            let p = warped_point(*epsilon, &w, xs[xi], &fib)?;
            let fits: Vec<Fit> = fit_all(&p.snapshot, &ids, &ctx)
                .map_err(|e| CliError::Compute(format!("{}: {e}", p.label)))?;
            let mut row = params;
            row.extend(p.scalars.iter().map(|s| s.1));
            for f in &fits {
                row.push(f.coefficient().unwrap_or(f64::NAN));
                row.push(f.residual);
            }
            let verdict = Verdict::combine(fits.iter().map(|f| crate::report::FitDto::from(f).verdict()));
            Ok((row, verdict))
        })
        .collect::<Result<_, CliError>>()?;
    let (rows, verdicts) = rows.into_iter().unzip();
    Ok(SweepTable { header, rows, verdicts })
}
