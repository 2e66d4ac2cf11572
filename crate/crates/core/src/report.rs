//! Check outcomes, JSON reports and CSV time series.
//!
//! Timing is carried alongside each outcome but never serialized, so JSON
//! output is byte-identical across runs with the same inputs.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;
use std::time::Duration;

use serde::Serialize;

use crate::Result;

#[derive(Clone, Debug, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    /// Human-readable summary; on failure it carries the offending residual.
    pub detail: String,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl CheckOutcome {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        CheckOutcome { name: name.into(), passed, detail: detail.into(), elapsed: Duration::ZERO }
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Report {
    pub command: String,
    pub seed: u64,
    pub n: usize,
    pub k: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scenario: Option<String>,
    /// Exact inputs, rationals rendered as `p/q`.
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub inputs: BTreeMap<String, String>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub metrics: BTreeMap<String, f64>,
    pub checks: Vec<CheckOutcome>,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// One line per check with timings, then a totals line.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
        for c in &self.checks {
            let tag = if c.passed { "PASS" } else { "FAIL" };
            let time = if c.elapsed.is_zero() { String::new() } else { format!("{:.3} s", c.elapsed.as_secs_f64()) };
            let _ = writeln!(out, "{tag}  {:<width$}  {time:>9}  {}", c.name, c.detail);
        }
        let failed = self.checks.iter().filter(|c| !c.passed).count();
        let _ = writeln!(
            out,
            "{} checks, {} failed, {:.3} s total (seed {})",
            self.checks.len(),
            failed,
            self.elapsed.as_secs_f64(),
            self.seed
        );
        out
    }
}

/// Numeric time series with a header row.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    /// Writes UTF-8 CSV; floats use the shortest decimal that round-trips.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        let io = |e: csv::Error| crate::Error::Io(e.into());
        wr.write_record(&self.header).map_err(io)?;
        for row in &self.rows {
            wr.write_record(row.iter().map(|x| format!("{x}"))).map_err(io)?;
        }
        wr.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv is utf-8")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_omits_timing() {
        let mut r = Report { command: "verify".into(), seed: 7, n: 1, k: 1, ..Default::default() };
        let mut c = CheckOutcome::new("a", true, "ok");
        c.elapsed = Duration::from_millis(1234);
        r.checks.push(c);
        r.elapsed = Duration::from_secs(3);
        let j = r.to_json();
        assert!(!j.contains("elapsed") && !j.contains("1234"));
        let back: serde_json::Value = serde_json::from_str(&j).unwrap();
        assert_eq!(back["checks"][0]["passed"], true);
        assert!(r.summary().contains("PASS"));
    }

    #[test]
    fn csv_floats_round_trip() {
        let t = Table { header: vec!["t".into(), "J^0".into()], rows: vec![vec![0.1, 1.0 / 3.0], vec![1e-20, -2.5]] };
        let s = t.to_csv_string();
        let mut lines = s.lines();
        assert_eq!(lines.next(), Some("t,J^0"));
        let row: Vec<f64> = lines.next().unwrap().split(',').map(|x| x.parse().unwrap()).collect();
        assert_eq!(row, vec![0.1, 1.0 / 3.0]);
        assert_eq!(lines.next(), Some("0.00000000000000000001,-2.5"));
    }

    #[test]
    fn failure_flips_report() {
        let mut r = Report::default();
        r.checks.push(CheckOutcome::new("a", true, ""));
        assert!(r.passed());
        r.checks.push(CheckOutcome::new("b", false, "residual x1"));
        assert!(!r.passed());
    }
}
