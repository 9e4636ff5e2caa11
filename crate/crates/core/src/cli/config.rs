//! Problem configuration for `solve`, parsed from flags or a JSON file.

use std::str::FromStr;

use clap::ValueEnum;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::heine::SolverOptions;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Model {
    Xxz,
    Xxx,
    HeineOde,
}

impl Model {
    pub fn name(self) -> &'static str {
        match self {
            Model::Xxz => "xxz",
            Model::Xxx => "xxx",
            Model::HeineOde => "heine-ode",
        }
    }
}

impl FromStr for Model {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        <Self as ValueEnum>::from_str(s, true)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// Everything `solve` needs. Complex values serialise as `[re, im]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: Model,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<C64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<C64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spins: Option<Vec<C64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<Vec<C64>>,
    #[serde(default, rename = "L", skip_serializing_if = "Option::is_none")]
    pub l: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spin: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pi: Option<Vec<C64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<Vec<C64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default)]
    pub solver: SolverOptions,
    #[serde(default)]
    pub format: Format,
}

impl RunConfig {
    pub fn empty(model: Model) -> Self {
        Self {
            model,
            eta: None,
            q: None,
            spins: None,
            a: None,
            l: None,
            spin: None,
            pi: None,
            phi: None,
            n: None,
            solver: SolverOptions::default(),
            format: Format::Json,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialises")
    }

    pub fn from_json(text: &str) -> Result<Self, String> {
        serde_json::from_str(text).map_err(|e| format!("bad config: {e}"))
    }
}

/// `re` or `re:im`.
pub fn parse_complex(s: &str) -> Result<C64, String> {
    let s = s.trim();
    let parse = |t: &str| {
        t.trim()
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| format!("not a finite number: {t:?}"))
    };
    match s.split_once(':') {
        Some((re, im)) => Ok(C64::new(parse(re)?, parse(im)?)),
        None => Ok(C64::new(parse(s)?, 0.0)),
    }
}

/// Comma-separated [`parse_complex`] values; empty input gives an empty list.
pub fn parse_list(s: &str) -> Result<Vec<C64>, String> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(parse_complex).collect()
}

pub fn parse_reals(s: &str) -> Result<Vec<f64>, String> {
    parse_list(s)?
        .into_iter()
        .map(|v| {
            if v.im == 0.0 {
                Ok(v.re)
            } else {
                Err(format!("expected a real value, got {v}"))
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_forms() {
        assert_eq!(parse_complex("-0.5").unwrap(), C64::new(-0.5, 0.0));
        assert_eq!(parse_complex("1:-2").unwrap(), C64::new(1.0, -2.0));
        assert!(parse_complex("nan").is_err());
        assert!(parse_complex("x").is_err());
        assert_eq!(parse_list("").unwrap(), Vec::<C64>::new());
        assert_eq!(parse_list("1,2:3").unwrap().len(), 2);
    }
}
