//! Optional JSON run configuration. Command-line flags override it.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::table::Format;

/// A list of values: an explicit array, or a string `a:b:n` (n evenly spaced
/// points, ends included) or `v1,v2,...`. The empty string is the empty list.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Samples {
    List(Vec<f64>),
    Spec(String),
}

impl Samples {
    pub fn values(&self) -> Result<Vec<f64>, String> {
        match self {
            Samples::List(v) => Ok(v.clone()),
            Samples::Spec(s) => parse_samples(s),
        }
    }
}

pub fn parse_samples(s: &str) -> Result<Vec<f64>, String> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    let num = |p: &str| p.trim().parse::<f64>().map_err(|e| format!("bad number '{p}': {e}"));
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [a, b, n] => {
            let (a, b) = (num(a)?, num(b)?);
            let n: usize = n.trim().parse().map_err(|e| format!("bad count '{n}': {e}"))?;
            Ok(match n {
                0 => Vec::new(),
                1 => vec![a],
                _ => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
            })
        }
        [_] => s.split(',').map(num).collect(),
        _ => Err(format!("expected a:b:n or a comma list, got '{s}'")),
    }
}

pub fn parse_range(s: &str) -> Result<(f64, f64), String> {
    let v: Vec<&str> = s.split(':').collect();
    match v.as_slice() {
        [a, b] => {
            let a = a.trim().parse::<f64>().map_err(|e| e.to_string())?;
            let b = b.trim().parse::<f64>().map_err(|e| e.to_string())?;
            Ok((a, b))
        }
        _ => Err(format!("expected lo:hi, got '{s}'")),
    }
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub model: Option<String>,
    pub coeffs: Option<Vec<f64>>,
    pub omega0: Option<f64>,
    pub n: Option<i32>,
    pub method: Option<String>,
    pub methods: Option<Vec<String>>,
    pub x: Option<Samples>,
    pub t: Option<Samples>,
    pub xi: Option<Samples>,
    pub rel_tol: Option<f64>,
    pub abs_tol: Option<f64>,
    pub contour: Option<String>,
    pub nx: Option<usize>,
    pub dt: Option<f64>,
    pub x_max: Option<f64>,
    pub bc: Option<String>,
    pub omega_range: Option<(f64, f64)>,
    pub xi_range: Option<(f64, f64)>,
    pub resolution: Option<usize>,
    pub curve_samples: Option<usize>,
    pub harmonics: Option<Vec<(i32, f64, f64)>>,
    pub slope: Option<f64>,
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
    }
}
