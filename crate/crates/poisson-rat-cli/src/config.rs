//! Run configuration: flag parsing helpers and the optional JSON config file.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Report schema version.
pub const SCHEMA_VERSION: u32 = 1;

/// Which bracket family a verify run exercises.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Hierarchy {
    /// Contour-integral bracket and its closed forms.
    Contour,
    /// Pure closed-form ansatz for `f = z^n`.
    Ansatz,
    /// Derivative hierarchy `p^n w'(p) w(q) - q^n w'(q) w(p)`.
    Deriv,
}

/// Fields accepted in a `--config` JSON file; command-line flags override
/// any value set here.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub hierarchy: Option<Hierarchy>,
    pub f_degree: Option<usize>,
    /// Polynomial weight as `[re, im]` coefficient pairs (ascending powers);
    /// mutually exclusive with `f_degree`.
    pub f_coeffs: Option<Vec<[f64; 2]>>,
    pub n: Option<u32>,
    #[serde(rename = "N")]
    pub degree: Option<usize>,
    pub seeds: Option<Vec<u64>>,
    pub tol: Option<f64>,
    pub json: Option<String>,
}

/// Fully resolved configuration of one verify run, echoed into the report.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub hierarchy: Hierarchy,
    pub f_degree: Option<usize>,
    pub f_coeffs: Option<Vec<[f64; 2]>>,
    pub n: Option<u32>,
    #[serde(rename = "N")]
    pub degree: usize,
    pub seeds: Vec<u64>,
    pub tol: Option<f64>,
}

impl RunConfig {
    /// Flag consistency: contour/ansatz need a weight, deriv needs `n`, and
    /// the run needs at least one seed and a positive degree.
    pub fn validate(&self) -> Result<(), String> {
        if self.degree == 0 {
            return Err("N must be at least 1".into());
        }
        if self.seeds.is_empty() {
            return Err("at least one seed is required".into());
        }
        if let Some(t) = self.tol {
            if !t.is_finite() || t <= 0.0 {
                return Err("tol must be positive".into());
            }
        }
        if self.f_degree.is_some() && self.f_coeffs.is_some() {
            return Err("f-degree and f-coeffs are mutually exclusive".into());
        }
        match self.hierarchy {
            Hierarchy::Contour | Hierarchy::Ansatz => {
                if self.n.is_some() {
                    return Err("--n applies only to the deriv hierarchy".into());
                }
                if self.f_degree.is_none() && self.f_coeffs.is_none() {
                    return Err("contour and ansatz runs need --f-degree".into());
                }
            }
            Hierarchy::Deriv => {
                if self.f_degree.is_some() || self.f_coeffs.is_some() {
                    return Err("--f-degree applies only to contour/ansatz runs".into());
                }
                if self.n.is_none() {
                    return Err("deriv runs need --n".into());
                }
            }
        }
        Ok(())
    }
}

/// Parses the `re,im` syntax of the point flags.
pub fn parse_complex_pair(text: &str) -> Result<Complex64, String> {
    let mut parts = text.splitn(2, ',');
    let re = parts
        .next()
        .ok_or_else(|| "empty complex literal".to_string())?
        .trim();
    let im = parts
        .next()
        .ok_or_else(|| format!("expected re,im in {text:?}"))?
        .trim();
    let re: f64 = re
        .parse()
        .map_err(|e| format!("bad real part {re:?}: {e}"))?;
    let im: f64 = im
        .parse()
        .map_err(|e| format!("bad imaginary part {im:?}: {e}"))?;
    if !re.is_finite() || !im.is_finite() {
        return Err(format!("non-finite complex literal {text:?}"));
    }
    Ok(Complex64::new(re, im))
}

/// Parses the comma-separated seed list.
pub fn parse_seed_list(text: &str) -> Result<Vec<u64>, String> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<u64>()
                .map_err(|e| format!("bad seed {s:?}: {e}"))
        })
        .collect()
}

/// Loads and deserializes a config file.
pub fn load_file_config(path: &std::path::Path) -> Result<FileConfig, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("bad config {}: {e}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_pair_syntax() {
        assert_eq!(
            parse_complex_pair("1.5,-2").unwrap(),
            Complex64::new(1.5, -2.0)
        );
        assert_eq!(
            parse_complex_pair(" 0 , 3.25 ").unwrap(),
            Complex64::new(0.0, 3.25)
        );
        assert!(parse_complex_pair("1.5").is_err());
        assert!(parse_complex_pair("a,b").is_err());
        assert!(parse_complex_pair("inf,0").is_err());
        assert!(parse_complex_pair("NaN,0").is_err());
    }

    #[test]
    fn seed_list_syntax() {
        assert_eq!(parse_seed_list("1,2,3").unwrap(), vec![1, 2, 3]);
        assert_eq!(parse_seed_list("7").unwrap(), vec![7]);
        assert!(parse_seed_list("1,,2").is_err());
        assert!(parse_seed_list("-1").is_err());
    }

    #[test]
    fn config_validation() {
        let mut cfg = RunConfig {
            hierarchy: Hierarchy::Contour,
            f_degree: Some(0),
            f_coeffs: None,
            n: None,
            degree: 2,
            seeds: vec![1],
            tol: None,
        };
        assert!(cfg.validate().is_ok());
        cfg.degree = 0;
        assert!(cfg.validate().is_err());
        cfg.degree = 2;
        cfg.n = Some(1);
        assert!(cfg.validate().is_err());
        cfg.n = None;
        cfg.f_degree = None;
        assert!(cfg.validate().is_err());

        let deriv = RunConfig {
            hierarchy: Hierarchy::Deriv,
            f_degree: None,
            f_coeffs: None,
            n: Some(3),
            degree: 2,
            seeds: vec![1, 2],
            tol: Some(1e-8),
        };
        assert!(deriv.validate().is_ok());
    }
}
