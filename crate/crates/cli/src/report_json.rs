//! Report JSON schema.
//!
//! A flat object: every statistic as `{value, stderr, defined}`, every
//! verdict as `{violated, significance_sigmas}`, plus provenance. Undefined
//! or non-finite numbers are written as `null`.

use std::fs;
use std::path::Path;

use clickstat::criteria::{CriteriaReport, Estimate, Verdict, VerdictState};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{CliError, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatisticJson {
    pub value: Option<f64>,
    pub stderr: Option<f64>,
    pub defined: bool,
    #[serde(default)]
    pub drop_fraction: f64,
}

impl StatisticJson {
    pub fn relative_error(&self) -> Option<f64> {
        match (self.value, self.stderr) {
            (Some(v), Some(s)) if v != 0.0 => Some(s / v.abs()),
            _ => None,
        }
    }
}

impl From<&Estimate> for StatisticJson {
    fn from(e: &Estimate) -> Self {
        StatisticJson {
            value: finite(e.value),
            stderr: finite(e.stderr),
            defined: e.defined(),
            drop_fraction: e.drop_fraction,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictJson {
    /// `null` when the test could not be evaluated.
    pub violated: Option<bool>,
    pub significance_sigmas: Option<f64>,
}

impl From<&Verdict> for VerdictJson {
    fn from(v: &Verdict) -> Self {
        VerdictJson {
            violated: match v.state {
                VerdictState::Violated => Some(true),
                VerdictState::NotViolated => Some(false),
                VerdictState::Undetermined => None,
            },
            significance_sigmas: finite(v.significance_sigmas),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionJson {
    pub condition: usize,
    pub probability: f64,
    pub shots: Option<u64>,
    pub min_eigenvalue: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub schema_version: u32,
    pub label: String,
    pub summed_click_mean: StatisticJson,
    pub q_a: StatisticJson,
    pub q_b: StatisticJson,
    pub kappa: StatisticJson,
    pub kappa_cl_max: StatisticJson,
    pub kappa_excess: StatisticJson,
    pub gamma: StatisticJson,
    pub gamma_cl_max: StatisticJson,
    pub gamma_excess: StatisticJson,
    pub frak_n: StatisticJson,
    pub kappa_test: VerdictJson,
    pub pearson_test: VerdictJson,
    pub higher_order_test: VerdictJson,
    pub threshold: f64,
    pub moments_out_of_range: bool,
    pub conditions: Vec<ConditionJson>,
    pub bins_a: usize,
    pub bins_b: usize,
    pub shots: Option<u64>,
    pub replicates: usize,
    pub seed: Option<u64>,
    /// Free-form description of how the data were produced and analyzed.
    pub parameters: Value,
}

impl ReportFile {
    pub fn new(label: impl Into<String>, report: &CriteriaReport, parameters: Value) -> Self {
        ReportFile {
            schema_version: SCHEMA_VERSION,
            label: label.into(),
            summed_click_mean: (&report.summed_click_mean).into(),
            q_a: (&report.q_a).into(),
            q_b: (&report.q_b).into(),
            kappa: (&report.kappa).into(),
            kappa_cl_max: (&report.kappa_cl_max).into(),
            kappa_excess: (&report.kappa_excess).into(),
            gamma: (&report.gamma).into(),
            gamma_cl_max: (&report.gamma_cl_max).into(),
            gamma_excess: (&report.gamma_excess).into(),
            frak_n: (&report.frak_n).into(),
            kappa_test: (&report.kappa_test).into(),
            pearson_test: (&report.pearson_test).into(),
            higher_order_test: (&report.higher_order_test).into(),
            threshold: report.threshold,
            moments_out_of_range: report.moments_out_of_range,
            conditions: report
                .conditions
                .iter()
                .map(|c| ConditionJson {
                    condition: c.condition,
                    probability: c.probability,
                    shots: c.shots,
                    min_eigenvalue: c.min_eigenvalue,
                })
                .collect(),
            bins_a: report.metadata.bins_a,
            bins_b: report.metadata.bins_b,
            shots: report.metadata.shots,
            replicates: report.metadata.replicates,
            seed: report.metadata.seed,
            parameters,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Parses a report, checking the schema version before the rest.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: Value =
            serde_json::from_str(text).map_err(|e| CliError::Data(format!("invalid JSON: {e}")))?;
        match raw.get("schema_version").and_then(Value::as_u64) {
            Some(v) if v == u64::from(SCHEMA_VERSION) => {}
            Some(v) => {
                return Err(CliError::Data(format!(
                    "schema version mismatch: expected {SCHEMA_VERSION}, found {v}"
                )))
            }
            None => return Err(CliError::Data("missing schema_version".into())),
        }
        serde_json::from_value(raw).map_err(|e| CliError::Data(format!("malformed report: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_json(&text).map_err(|e| match e {
            CliError::Data(msg) => CliError::Data(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json() + "\n").map_err(|e| CliError::io(path, e))
    }

    /// `criterion,value,bound,stderr` rows: each statistic next to the
    /// classical bound it is compared against.
    pub fn plot_rows(&self) -> Vec<PlotRow> {
        let row = |criterion: &'static str, s: &StatisticJson, bound: Option<f64>| PlotRow {
            criterion,
            value: s.value,
            bound,
            stderr: s.stderr,
        };
        vec![
            row("q_a", &self.q_a, Some(0.0)),
            row("q_b", &self.q_b, Some(0.0)),
            row("kappa", &self.kappa, self.kappa_cl_max.value),
            row("gamma", &self.gamma, self.gamma_cl_max.value),
            row(
                "neg_gamma",
                &self.gamma,
                self.gamma_cl_max.value.map(|g| -g),
            ),
            row("frak_n", &self.frak_n, Some(0.0)),
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlotRow {
    pub criterion: &'static str,
    pub value: Option<f64>,
    pub bound: Option<f64>,
    pub stderr: Option<f64>,
}

pub fn plot_csv(rows: &[PlotRow]) -> String {
    let cell = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    let mut out = String::from("criterion,value,bound,stderr\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            r.criterion,
            cell(r.value),
            cell(r.bound),
            cell(r.stderr)
        ));
    }
    out
}

fn finite(v: Option<f64>) -> Option<f64> {
    v.filter(|x| x.is_finite())
}

#[cfg(test)]
mod tests {
    use super::*;
    use clickstat::criteria::evaluate_all;
    use clickstat::JointClickDistribution;

    fn sample_report() -> ReportFile {
        let mut p = vec![0.0; 81];
        p[1] = 0.5;
        p[9] = 0.5;
        let jcd = JointClickDistribution::new(8, 8, p).unwrap();
        ReportFile::new(
            "ideal sp",
            &evaluate_all(&jcd, None, 3.0),
            serde_json::json!({"k": 1}),
        )
    }

    #[test]
    fn json_round_trip() {
        let r = sample_report();
        let back = ReportFile::from_json(&r.to_json()).unwrap();
        assert_eq!(r, back);
        assert_eq!(back.kappa_test.violated, Some(true));
        assert_eq!(back.pearson_test.violated, Some(false));
    }

    #[test]
    fn schema_mismatch_is_rejected() {
        let mut v: Value = serde_json::from_str(&sample_report().to_json()).unwrap();
        v["schema_version"] = Value::from(2);
        let err = ReportFile::from_json(&v.to_string()).unwrap_err();
        assert!(err.to_string().contains("schema version mismatch"));
        v.as_object_mut().unwrap().remove("schema_version");
        assert!(ReportFile::from_json(&v.to_string()).is_err());
    }

    #[test]
    fn plot_rows_pair_values_with_bounds() {
        let r = sample_report();
        let csv = plot_csv(&r.plot_rows());
        assert!(csv.starts_with("criterion,value,bound,stderr\n"));
        assert!(csv.contains("\nkappa,1,-0.75,0\n"));
        assert_eq!(csv.lines().count(), 7);
    }
}
