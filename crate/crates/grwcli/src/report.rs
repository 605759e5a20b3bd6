//! Report documents: JSON payload, CSV rows and the aligned text table.

use std::fmt::Write as _;

use grw_core::conditionlab::{FitStatus, QuasiEinsteinResult, SetMembership};
use grw_core::Fit;
use serde::ser::{Serialize, SerializeMap, Serializer};
use serde_json::value::RawValue;

/// A float written with 17 significant digits; non-finite values become `null`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Num(pub f64);

impl Num {
    pub fn text(self) -> String {
        if self.0.is_finite() {
            format!("{:.16e}", self.0)
        } else {
            format!("{}", self.0)
        }
    }
}

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return s.serialize_none();
        }
        let raw = RawValue::from_string(self.text()).map_err(serde::ser::Error::custom)?;
        raw.serialize(s)
    }
}

fn nums(v: &[f64]) -> Vec<Num> {
    v.iter().copied().map(Num).collect()
}

/// Ordered `name → number` pairs serialized as a JSON object.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct NamedNums(pub Vec<(String, f64)>);

impl Serialize for NamedNums {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            m.serialize_entry(k, &Num(*v))?;
        }
        m.end()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    PassWithVacuous,
    Fail,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::PassWithVacuous => "pass-with-vacuous",
            Verdict::Fail => "fail",
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Fail => 2,
            _ => 0,
        }
    }

    /// Worst of the inputs; an empty set passes.
    pub fn combine(items: impl IntoIterator<Item = Verdict>) -> Verdict {
        items.into_iter().max().unwrap_or(Verdict::Pass)
    }
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct SetsDto {
    pub in_ur: bool,
    pub in_us: bool,
    pub in_uc: bool,
    pub in_u: bool,
    pub in_curly_u: bool,
    pub in_u1: bool,
    pub dev_r: Num,
    pub dev_s: Num,
    pub dev_c: Num,
    pub dev_q: Num,
    pub min_ricci_rank: usize,
}

impl From<&SetMembership<f64>> for SetsDto {
    fn from(m: &SetMembership<f64>) -> Self {
        Self {
            in_ur: m.in_ur,
            in_us: m.in_us,
            in_uc: m.in_uc,
            in_u: m.in_u,
            in_curly_u: m.in_curly_u,
            in_u1: m.in_u1,
            dev_r: Num(m.dev_r),
            dev_s: Num(m.dev_s),
            dev_c: Num(m.dev_c),
            dev_q: Num(m.dev_q),
            min_ricci_rank: m.min_ricci_rank,
        }
    }
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct QuasiDto {
    pub is_einstein: bool,
    pub is_quasi_einstein: bool,
    pub alpha: Option<Num>,
    pub einstein_deviation: Num,
    pub roots: Vec<Num>,
    pub multiplicities: Vec<usize>,
    pub ranks: Vec<usize>,
    pub complex_roots: Vec<[Num; 2]>,
}

impl From<&QuasiEinsteinResult<f64>> for QuasiDto {
    fn from(q: &QuasiEinsteinResult<f64>) -> Self {
        Self {
            is_einstein: q.is_einstein,
            is_quasi_einstein: q.is_quasi_einstein,
            alpha: q.alpha.map(Num),
            einstein_deviation: Num(q.einstein_deviation),
            roots: nums(&q.roots),
            multiplicities: q.multiplicities.clone(),
            ranks: q.ranks.clone(),
            complex_roots: q.complex_roots.iter().map(|&(a, b)| [Num(a), Num(b)]).collect(),
        }
    }
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct FitDto {
    pub condition: &'static str,
    pub status: &'static str,
    pub holds: bool,
    pub residual: Num,
    pub tolerance: Num,
    pub coefficients: Vec<Num>,
    pub lhs_norm: Num,
    pub basis_norms: Vec<Num>,
    pub extras: NamedNums,
}

impl FitDto {
    pub fn vacuous(&self) -> bool {
        self.status != FitStatus::Fitted.as_str()
    }

    pub fn verdict(&self) -> Verdict {
        if self.vacuous() {
            Verdict::PassWithVacuous
        } else if self.holds {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

impl From<&Fit> for FitDto {
    fn from(f: &Fit) -> Self {
        Self {
            condition: f.condition.as_str(),
            status: f.status.as_str(),
            holds: f.holds,
            residual: Num(f.residual),
            tolerance: Num(f.tolerance),
            coefficients: nums(&f.coefficients),
            lhs_norm: Num(f.lhs_norm),
            basis_norms: nums(&f.basis_norms),
            extras: NamedNums(f.extras.iter().map(|(k, v)| (k.to_string(), *v)).collect()),
        }
    }
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct PointReport {
    pub index: usize,
    pub label: String,
    pub dim: usize,
    /// Point-level scalars such as `x1`, `trT`.
    pub scalars: NamedNums,
    pub sets: SetsDto,
    pub quasi: QuasiDto,
    pub fits: Vec<FitDto>,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct Check {
    pub label: String,
    pub expected: Option<Num>,
    pub observed: Option<Num>,
    pub tolerance: Num,
    pub passed: bool,
    pub vacuous: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Check {
    /// `|observed − expected| ≤ tol`.
    pub fn close(label: impl Into<String>, expected: f64, observed: f64, tol: f64) -> Self {
        Self {
            label: label.into(),
            expected: Some(Num(expected)),
            observed: Some(Num(observed)),
            tolerance: Num(tol),
            passed: (observed - expected).abs() <= tol,
            vacuous: false,
            note: None,
        }
    }

    /// `observed ≤ tol` for a residual.
    pub fn at_most(label: impl Into<String>, observed: f64, tol: f64) -> Self {
        Self {
            label: label.into(),
            expected: None,
            observed: Some(Num(observed)),
            tolerance: Num(tol),
            passed: observed <= tol,
            vacuous: false,
            note: None,
        }
    }

    pub fn flag(label: impl Into<String>, ok: bool) -> Self {
        Self {
            label: label.into(),
            expected: Some(Num(1.0)),
            observed: Some(Num(if ok { 1.0 } else { 0.0 })),
            tolerance: Num(0.0),
            passed: ok,
            vacuous: false,
            note: None,
        }
    }

    /// A check whose premise does not hold at the point; never fails.
    pub fn vacuous(label: impl Into<String>, expected: Option<f64>, note: impl Into<String>) -> Self {
        Self {
            label: label.into(),
            expected: expected.map(Num),
            observed: None,
            tolerance: Num(0.0),
            passed: true,
            vacuous: true,
            note: Some(note.into()),
        }
    }

    pub fn failed(label: impl Into<String>, note: impl Into<String>) -> Self {
        Self {
            label: label.into(),
            expected: None,
            observed: None,
            tolerance: Num(0.0),
            passed: false,
            vacuous: false,
            note: Some(note.into()),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn verdict(&self) -> Verdict {
        match (self.passed, self.vacuous) {
            (false, _) => Verdict::Fail,
            (true, true) => Verdict::PassWithVacuous,
            (true, false) => Verdict::Pass,
        }
    }
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct SuiteReport {
    pub name: &'static str,
    pub description: &'static str,
    pub checks: Vec<Check>,
    pub verdict: Verdict,
}

impl SuiteReport {
    pub fn new(name: &'static str, description: &'static str, checks: Vec<Check>) -> Self {
        let verdict = Verdict::combine(checks.iter().map(Check::verdict));
        Self {
            name,
            description,
            checks,
            verdict,
        }
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub seed: u64,
    /// Source text of the scenario config, or the suite selection.
    pub config: String,
    pub points: Vec<PointReport>,
    pub suites: Vec<SuiteReport>,
    pub verdict: Verdict,
}

impl Report {
    pub fn new(command: &'static str, seed: u64, config: String) -> Self {
        Self {
            tool: "grw",
            version: env!("CARGO_PKG_VERSION"),
            command,
            seed,
            config,
            points: Vec::new(),
            suites: Vec::new(),
            verdict: Verdict::Pass,
        }
    }

    pub fn finish(mut self) -> Self {
        self.verdict = Verdict::combine(
            self.points
                .iter()
                .map(|p| p.verdict)
                .chain(self.suites.iter().map(|s| s.verdict)),
        );
        self
    }

    pub fn to_json(&self) -> serde_json::Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn to_csv(&self) -> Result<String, csv::Error> {
        let mut w = csv::Writer::from_writer(Vec::new());
        if self.suites.is_empty() {
            w.write_record(["point", "label", "condition", "status", "holds", "residual", "coefficients"])?;
            for p in &self.points {
                for f in &p.fits {
                    let coeffs: Vec<String> = f.coefficients.iter().map(|c| c.text()).collect();
                    w.write_record([
                        p.index.to_string(),
                        p.label.clone(),
                        f.condition.to_string(),
                        f.status.to_string(),
                        f.holds.to_string(),
                        f.residual.text(),
                        coeffs.join(";"),
                    ])?;
                }
            }
        } else {
            w.write_record(["suite", "check", "expected", "observed", "tolerance", "passed", "vacuous"])?;
            for s in &self.suites {
                for c in &s.checks {
                    w.write_record([
                        s.name.to_string(),
                        c.label.clone(),
                        c.expected.map(Num::text).unwrap_or_default(),
                        c.observed.map(Num::text).unwrap_or_default(),
                        c.tolerance.text(),
                        c.passed.to_string(),
                        c.vacuous.to_string(),
                    ])?;
                }
            }
        }
        let bytes = w.into_inner().map_err(|e| e.into_error())?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn to_table(&self) -> String {
        let mut rows: Vec<Vec<String>> = Vec::new();
        if !self.points.is_empty() {
            rows.push(["point", "label", "condition", "status", "coefficients", "residual", "holds"].map(String::from).to_vec());
            for p in &self.points {
                for f in &p.fits {
                    let coeffs: Vec<String> = f.coefficients.iter().map(|c| short(c.0)).collect();
                    rows.push(vec![
                        p.index.to_string(),
                        p.label.clone(),
                        f.condition.to_string(),
                        f.status.to_string(),
                        coeffs.join(", "),
                        short(f.residual.0),
                        f.holds.to_string(),
                    ]);
                }
            }
        }
        let mut out = align(&rows);
        if !self.suites.is_empty() {
            let mut rows = vec![["suite", "check", "expected", "observed", "tol", "result"].map(String::from).to_vec()];
            for s in &self.suites {
                for c in &s.checks {
                    let result = match (c.passed, c.vacuous) {
                        (_, true) => "vacuous",
                        (true, false) => "ok",
                        (false, false) => "FAIL",
                    };
                    rows.push(vec![
                        s.name.to_string(),
                        c.label.clone(),
                        c.expected.map(|x| short(x.0)).unwrap_or_else(|| "-".into()),
                        c.observed.map(|x| short(x.0)).unwrap_or_else(|| "-".into()),
                        short(c.tolerance.0),
                        result.to_string(),
                    ]);
                }
            }
            out.push_str(&align(&rows));
            for s in &self.suites {
                let _ = writeln!(out, "suite {:<18} {}", s.name, s.verdict.as_str());
            }
        }
        let _ = writeln!(out, "verdict: {}", self.verdict.as_str());
        out
    }
}

fn short(x: f64) -> String {
    format!("{x:.6e}")
}

fn align(rows: &[Vec<String>]) -> String {
    let Some(first) = rows.first() else {
        return String::new();
    };
    let widths: Vec<usize> = (0..first.len())
        .map(|c| rows.iter().map(|r| r[c].chars().count()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for r in rows {
        let line: Vec<String> = r
            .iter()
            .zip(&widths)
            .map(|(cell, &w)| format!("{cell:<w$}"))
            .collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_use_seventeen_digits() {
        let s = serde_json::to_string(&vec![Num(1.0 / 3.0), Num(-2.5e-12), Num(f64::NAN)]).unwrap();
        assert_eq!(s, "[3.3333333333333331e-1,-2.4999999999999998e-12,null]");
        let back: Vec<Option<f64>> = serde_json::from_str(&s).unwrap();
        assert_eq!(back[0], Some(1.0 / 3.0));
    }

    #[test]
    fn verdict_is_monotone() {
        use Verdict::*;
        assert_eq!(Verdict::combine([Pass, PassWithVacuous]), PassWithVacuous);
        assert_eq!(Verdict::combine([Pass, Fail, PassWithVacuous]), Fail);
        assert_eq!(Verdict::combine([]), Pass);
        assert_eq!(Fail.exit_code(), 2);
        assert_eq!(PassWithVacuous.exit_code(), 0);
    }

    #[test]
    fn vacuous_check_never_fails() {
        let c = Check::vacuous("L", Some(0.5), "outside U");
        assert_eq!(c.verdict(), Verdict::PassWithVacuous);
        assert_eq!(Check::close("x", 1.0, 1.5, 0.1).verdict(), Verdict::Fail);
        assert!(Check::at_most("r", 1e-12, 1e-10).passed);
        assert!(!Check::at_most("r", f64::NAN, 1e-10).passed);
    }

    #[test]
    fn table_is_aligned() {
        let t = align(&[vec!["a".into(), "bb".into()], vec!["ccc".into(), "d".into()]]);
        assert_eq!(t, "a    bb\nccc  d\n");
    }
}
