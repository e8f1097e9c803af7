//! Check reports: one line per check with its measured value, threshold and
//! status, as tab-separated text or JSON.

use std::collections::BTreeMap;
use std::time::Duration;

use clap::ValueEnum;
use serde::Serialize;

use crate::failure::Failure;

/// How a measured value is held against its threshold.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Bound {
    AtMost,
    AtLeast,
    Above,
}

impl Bound {
    fn holds(self, measured: f64, threshold: f64) -> bool {
        match self {
            Bound::AtMost => measured <= threshold,
            Bound::AtLeast => measured >= threshold,
            Bound::Above => measured > threshold,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            Bound::AtMost => "<=",
            Bound::AtLeast => ">=",
            Bound::Above => ">",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub bound: Bound,
    pub threshold: f64,
    pub pass: bool,
    pub detail: String,
    pub seconds: f64,
}

impl Check {
    /// A NaN measurement never passes.
    pub fn new(name: &str, measured: f64, bound: Bound, threshold: f64, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            measured,
            bound,
            threshold,
            pass: !measured.is_nan() && bound.holds(measured, threshold),
            detail: detail.into(),
            seconds: 0.0,
        }
    }

    /// A check that could not be measured at all.
    pub fn broken(name: &str, bound: Bound, threshold: f64, why: impl Into<String>) -> Self {
        Check::new(name, f64::NAN, bound, threshold, why)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Text,
    Json,
}

#[derive(Debug, Default, Serialize)]
pub struct Report {
    pub context: BTreeMap<String, String>,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn push_timed(&mut self, mut checks: Vec<Check>, elapsed: Duration) {
        let share = elapsed.as_secs_f64() / checks.len().max(1) as f64;
        for c in &mut checks {
            c.seconds = share;
        }
        self.checks.extend(checks);
    }

    pub fn failed(&self) -> Vec<String> {
        self.checks.iter().filter(|c| !c.pass).map(|c| c.name.clone()).collect()
    }

    pub fn render(&self, format: ReportFormat) -> String {
        match format {
            ReportFormat::Json => serde_json::to_string_pretty(self).expect("report serializes") + "\n",
            ReportFormat::Text => {
                let mut s = String::new();
                for (k, v) in &self.context {
                    s += &format!("# {k}={v}\n");
                }
                s += "check\tmeasured\tthreshold\tstatus\tseconds\tdetail\n";
                for c in &self.checks {
                    s += &format!(
                        "{}\t{:.3e}\t{} {:e}\t{}\t{:.3}\t{}\n",
                        c.name,
                        c.measured,
                        c.bound.symbol(),
                        c.threshold,
                        if c.pass { "PASS" } else { "FAIL" },
                        c.seconds,
                        c.detail
                    );
                }
                let failed = self.failed();
                s += &format!("# {} checks, {} failed\n", self.checks.len(), failed.len());
                s
            }
        }
    }

    /// Print and turn failures into exit status 1.
    pub fn finish(self, format: ReportFormat) -> Result<(), Failure> {
        print!("{}", self.render(format));
        let failed = self.failed();
        if failed.is_empty() {
            Ok(())
        } else {
            Err(Failure::Verification(failed))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bounds() {
        assert!(Check::new("a", 1e-12, Bound::AtMost, 1e-10, "").pass);
        assert!(!Check::new("a", 1e-9, Bound::AtMost, 1e-10, "").pass);
        assert!(Check::new("a", 0.995, Bound::AtLeast, 0.99, "").pass);
        assert!(!Check::new("a", 1.0, Bound::Above, 1.0, "").pass);
        assert!(!Check::broken("a", Bound::AtMost, 1.0, "unreadable").pass);
    }

    #[test]
    fn text_report_names_failures() {
        let mut r = Report::default();
        r.push_timed(
            vec![Check::new("good", 0.0, Bound::AtMost, 1.0, ""), Check::new("bad", 2.0, Bound::AtMost, 1.0, "")],
            Duration::from_millis(10),
        );
        let text = r.render(ReportFormat::Text);
        assert!(text.contains("good\t0.000e0\t<= 1e0\tPASS"));
        assert!(text.contains("bad\t2.000e0\t<= 1e0\tFAIL"));
        assert_eq!(r.failed(), vec!["bad".to_string()]);
        let json: serde_json::Value = serde_json::from_str(&r.render(ReportFormat::Json)).unwrap();
        assert_eq!(json["checks"][1]["pass"], false);
    }
}
