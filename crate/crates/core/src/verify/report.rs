//! Structured check results and the JSON report document.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::manifold::ManifoldSummary;
use crate::spectral::SpectrumResult;

/// Ids of every check, in report order.
pub const CHECK_IDS: [&str; 13] = [
    "LEMMA", "T2.1", "T2.2", "T2.3", "T3", "T4.1", "T4.2", "T5", "COR", "T6", "S3-CONF", "S3-PROJ", "EQ41",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Skipped,
    Fail,
    Error,
}

impl Status {
    /// Pass iff every condition holds.
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    /// Status of several checks reported as one: errors dominate failures,
    /// failures dominate passes, and all-skipped stays skipped.
    pub fn combine(statuses: impl IntoIterator<Item = Status>) -> Status {
        let mut out = None;
        for s in statuses {
            out = Some(match (out, s) {
                (None, s) => s,
                (Some(Status::Skipped), s) | (Some(s), Status::Skipped) => s,
                (Some(a), b) => a.max(b),
            });
        }
        out.unwrap_or(Status::Skipped)
    }
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Skipped => "skipped",
            Status::Fail => "fail",
            Status::Error => "error",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremReport {
    pub id: String,
    pub status: Status,
    pub measured: Map<String, Value>,
    pub tolerance: Map<String, Value>,
    pub notes: Vec<String>,
    /// names of the manifolds the check ran on
    pub manifolds: Vec<String>,
}

impl TheoremReport {
    pub fn new(id: &str, manifold: &str) -> Self {
        Self {
            id: id.to_string(),
            status: Status::Skipped,
            measured: Map::new(),
            tolerance: Map::new(),
            notes: Vec::new(),
            manifolds: if manifold.is_empty() { Vec::new() } else { vec![manifold.to_string()] },
        }
    }

    pub fn measure(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.measured.insert(key.to_string(), value.into());
        self
    }

    pub fn tol(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.tolerance.insert(key.to_string(), value.into());
        self
    }

    pub fn note(&mut self, text: impl Into<String>) -> &mut Self {
        self.notes.push(text.into());
        self
    }

    pub fn skipped(mut self, why: impl Into<String>) -> Self {
        self.status = Status::Skipped;
        self.notes.push(why.into());
        self
    }

    pub fn errored(mut self, why: impl std::fmt::Display) -> Self {
        self.status = Status::Error;
        self.notes.push(why.to_string());
        self
    }

    pub fn with_status(mut self, ok: bool) -> Self {
        self.status = Status::from_bool(ok);
        self
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    /// Folds per-manifold reports with the same id into one entry whose
    /// measurements are keyed by manifold name.
    pub fn merge(id: &str, parts: Vec<TheoremReport>) -> TheoremReport {
        let mut out = TheoremReport::new(id, "");
        out.status = Status::combine(parts.iter().map(|p| p.status));
        for p in parts {
            let key = if p.manifolds.is_empty() { "analytic".to_string() } else { p.manifolds.join(",") };
            let status = p.status;
            let mut measured = p.measured;
            measured.insert("status".into(), Value::String(status.to_string()));
            out.measured.insert(key.clone(), Value::Object(measured));
            if !p.tolerance.is_empty() {
                out.tolerance.insert(key.clone(), Value::Object(p.tolerance));
            }
            out.notes.extend(p.notes.into_iter().map(|n| format!("{key}: {n}")));
            out.manifolds.extend(p.manifolds);
        }
        out
    }
}

/// Eigenvalues and residuals of one solved spectrum, as stored in reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSummary {
    pub manifold: String,
    pub operator: String,
    pub eigenvalues: Vec<f64>,
    pub residuals: Vec<f64>,
    pub clusters: Vec<usize>,
    pub shift: f64,
    pub iterations: usize,
}

impl SpectrumSummary {
    pub fn new(manifold: &str, spec: &SpectrumResult) -> Self {
        Self {
            manifold: manifold.to_string(),
            operator: spec.label.clone(),
            eigenvalues: spec.eigenvalues(),
            residuals: spec.pairs.iter().map(|p| p.residual).collect(),
            clusters: spec.cluster_sizes(),
            shift: spec.shift,
            iterations: spec.iterations,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub config: Value,
    pub manifolds: Vec<ManifoldSummary>,
    pub spectra: Vec<SpectrumSummary>,
    pub checks: Vec<TheoremReport>,
}

impl ReportDocument {
    pub fn overall(&self) -> Status {
        Status::combine(self.checks.iter().map(|c| c.status))
    }

    /// One line per check: `ID status`.
    pub fn summary_text(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            s.push_str(&format!("{:<8} {}\n", c.id, c.status));
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_combination() {
        use Status::*;
        assert_eq!(Status::combine([]), Skipped);
        assert_eq!(Status::combine([Skipped, Skipped]), Skipped);
        assert_eq!(Status::combine([Skipped, Pass]), Pass);
        assert_eq!(Status::combine([Pass, Fail, Skipped]), Fail);
        assert_eq!(Status::combine([Fail, Error]), Error);
    }

    #[test]
    fn merge_keys_by_manifold() {
        let mut a = TheoremReport::new("T3", "torus");
        a.measure("lambda1", 0.0).tol("lambda1", 0.05);
        let a = a.with_status(true);
        let b = TheoremReport::new("T3", "sphere").skipped("hypothesis");
        let m = TheoremReport::merge("T3", vec![a, b]);
        assert_eq!(m.status, Status::Pass);
        assert!(m.measured.contains_key("torus"));
        assert_eq!(m.notes, vec!["sphere: hypothesis".to_string()]);
        assert_eq!(m.manifolds.len(), 2);
    }
}
