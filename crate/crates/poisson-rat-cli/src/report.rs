//! Machine-readable run reports.
//!
//! Reports are plain JSON with a fixed field order; two runs with the same
//! configuration produce byte-identical output apart from the `wall_time`
//! and `version` fields. Files are written atomically (temp file + rename).

use serde::Serialize;
use std::io;
use std::path::Path;

/// Outcome of a single check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    /// The check could not be evaluated (quadrature failure, pole hit, ...).
    Error,
}

/// One measured quantity against its threshold.
#[derive(Debug, Clone, Serialize)]
pub struct CheckRecord {
    pub check_name: String,
    pub status: CheckStatus,
    /// Measured value; absent when the check errored out.
    pub measured: Option<f64>,
    pub tolerance: f64,
}

impl CheckRecord {
    /// Pass/fail record for a "measured must stay below tolerance" check.
    pub fn bounded(name: impl Into<String>, measured: f64, tolerance: f64) -> Self {
        Self {
            check_name: name.into(),
            status: if measured <= tolerance {
                CheckStatus::Pass
            } else {
                CheckStatus::Fail
            },
            measured: Some(measured),
            tolerance,
        }
    }

    /// Pass/fail record for a "measured must exceed threshold" check.
    pub fn exceeds(name: impl Into<String>, measured: f64, threshold: f64) -> Self {
        Self {
            check_name: name.into(),
            status: if measured > threshold {
                CheckStatus::Pass
            } else {
                CheckStatus::Fail
            },
            measured: Some(measured),
            tolerance: threshold,
        }
    }

    pub fn error(name: impl Into<String>, tolerance: f64) -> Self {
        Self {
            check_name: name.into(),
            status: CheckStatus::Error,
            measured: None,
            tolerance,
        }
    }
}

/// Full report of a command run.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema: u32,
    pub version: String,
    pub command: String,
    pub config: serde_json::Value,
    pub checks: Vec<CheckRecord>,
    /// `fail` iff any record fails; `error` iff any record errored.
    pub status: CheckStatus,
    pub wall_time: f64,
}

impl Report {
    pub fn new(command: &str, config: serde_json::Value, checks: Vec<CheckRecord>, wall_time: f64) -> Self {
        let status = if checks.iter().any(|c| c.status == CheckStatus::Error) {
            CheckStatus::Error
        } else if checks.iter().any(|c| c.status == CheckStatus::Fail) {
            CheckStatus::Fail
        } else {
            CheckStatus::Pass
        };
        Self {
            schema: crate::config::SCHEMA_VERSION,
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            config,
            checks,
            status,
            wall_time,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }

    /// Writes the report to `path` via a temporary file in the same
    /// directory followed by a rename.
    pub fn write_atomic(&self, path: &Path) -> io::Result<()> {
        let mut tmp = path.as_os_str().to_owned();
        tmp.push(".tmp");
        let tmp = std::path::PathBuf::from(tmp);
        std::fs::write(&tmp, self.to_json())?;
        std::fs::rename(&tmp, path)
    }

    /// Process exit code mandated by the report status.
    pub fn exit_code(&self) -> u8 {
        match self.status {
            CheckStatus::Pass => 0,
            CheckStatus::Fail => 1,
            CheckStatus::Error => 3,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_aggregation() {
        let pass = CheckRecord::bounded("a", 1e-12, 1e-7);
        let fail = CheckRecord::bounded("b", 1.0, 1e-7);
        let err = CheckRecord::error("c", 1e-7);

        let r = Report::new("verify", serde_json::json!({}), vec![pass.clone()], 0.1);
        assert_eq!(r.status, CheckStatus::Pass);
        assert_eq!(r.exit_code(), 0);

        let r = Report::new("verify", serde_json::json!({}), vec![pass.clone(), fail], 0.1);
        assert_eq!(r.status, CheckStatus::Fail);
        assert_eq!(r.exit_code(), 1);

        let r = Report::new("verify", serde_json::json!({}), vec![pass, err], 0.1);
        assert_eq!(r.status, CheckStatus::Error);
        assert_eq!(r.exit_code(), 3);
    }

    #[test]
    fn exceeds_semantics() {
        assert_eq!(
            CheckRecord::exceeds("x", 0.5, 1e-3).status,
            CheckStatus::Pass
        );
        assert_eq!(
            CheckRecord::exceeds("x", 1e-9, 1e-3).status,
            CheckStatus::Fail
        );
    }

    #[test]
    fn atomic_write_creates_file() {
        let dir = std::env::temp_dir().join("poisson-rat-report-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("report.json");
        let r = Report::new("verify", serde_json::json!({"N": 2}), vec![], 0.0);
        r.write_atomic(&path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.contains("\"schema\": 1"));
        std::fs::remove_dir_all(&dir).ok();
    }
}
