//! Line-oriented `key = value` scenario documents.
//!
//! ```text
//! # binary exposure, alcohol-like
//! name = alcohol
//! p_w = 0.5
//! p_x = 0.5, 0.5
//! alpha.x = 0, 1
//! alpha.w = 0
//! beta.x = 0, 1
//! beta.v = 1
//! beta.w = 1
//! gamma.f = 4
//! gamma.v = 3
//! gamma.w = 1
//! sweep.alpha.x[1] = linspace(0, 3, 61)
//! output.precision = 4
//! ```
//!
//! Per-level vectors list every level including the reference, whose entry
//! must be 0. Interaction terms, `nu` and the intercepts `alpha.0`,
//! `beta.0` and `gamma.0` are optional; missing intercepts are calibrated.
//! `sweep.<path>` lines declare axes in file order; sweeps recalibrate all
//! intercepts at every grid point.

use std::collections::BTreeMap;
use std::fmt;

use selbias_core::sweep::linspace;
use selbias_core::{Axis, ParamPath, StructuralParams, SweepSpec};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: duplicate key `{key}`")]
    DuplicateKey { line: usize, key: String },
    #[error("line {line}: `{key}`: {message}")]
    BadValue {
        line: usize,
        key: String,
        message: String,
    },
    #[error("missing required key `{0}`")]
    MissingKey(String),
    #[error("invalid scenario: {0}")]
    Invalid(String),
}

type Result<T> = std::result::Result<T, ScenarioError>;

/// Effect measures the `effects` report can be restricted to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Measure {
    CorXr,
    CorXf,
    OrXrA1,
    CrrXr,
    CrrXf,
}

impl Measure {
    pub const ALL: [Measure; 5] = [
        Measure::CorXr,
        Measure::CorXf,
        Measure::OrXrA1,
        Measure::CrrXr,
        Measure::CrrXf,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Measure::CorXr => "cor_xr",
            Measure::CorXf => "cor_xf",
            Measure::OrXrA1 => "or_xr_a1",
            Measure::CrrXr => "crr_xr",
            Measure::CrrXf => "crr_xf",
        }
    }

    fn parse(s: &str) -> Option<Measure> {
        Measure::ALL.into_iter().find(|m| m.name() == s)
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A parsed scenario document.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioFile {
    pub name: String,
    /// Model with intercepts at 0; see [`ScenarioFile::model`].
    pub params: StructuralParams,
    pub alpha_0: Option<f64>,
    pub beta_0: Option<f64>,
    pub gamma_0: Option<f64>,
    pub axes: Vec<Axis>,
    pub precision: Option<usize>,
    pub measures: Option<Vec<Measure>>,
}

const SCALARS: [&str; 15] = [
    "p_w", "nu", "alpha.0", "alpha.w", "beta.0", "beta.v", "beta.w", "beta.vw", "gamma.0",
    "gamma.f", "gamma.v", "gamma.w", "gamma.fv", "gamma.fw", "gamma.vw",
];
const VECTORS: [&str; 6] = ["p_x", "alpha.x", "alpha.xw", "beta.x", "beta.xv", "beta.xw"];
const REQUIRED: [&str; 10] = [
    "p_w", "p_x", "alpha.x", "alpha.w", "beta.x", "beta.v", "beta.w", "gamma.f", "gamma.v",
    "gamma.w",
];

struct Entry {
    line: usize,
    value: String,
}

fn parse_real(line: usize, key: &str, text: &str) -> Result<f64> {
    let text = text.trim();
    match text.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(ScenarioError::BadValue {
            line,
            key: key.to_string(),
            message: format!("`{text}` is not a finite decimal number"),
        }),
    }
}

fn parse_list(line: usize, key: &str, text: &str) -> Result<Vec<f64>> {
    text.split(',').map(|t| parse_real(line, key, t)).collect()
}

/// `v1, v2, ...` or `linspace(start, end, count)`.
fn parse_axis_values(line: usize, key: &str, text: &str) -> Result<Vec<f64>> {
    let text = text.trim();
    let Some(inner) = text
        .strip_prefix("linspace(")
        .and_then(|t| t.strip_suffix(')'))
    else {
        return parse_list(line, key, text);
    };
    let parts: Vec<&str> = inner.split(',').map(str::trim).collect();
    let bad = |message: &str| ScenarioError::BadValue {
        line,
        key: key.to_string(),
        message: message.to_string(),
    };
    let [start, end, count] = parts[..] else {
        return Err(bad("linspace takes (start, end, count)"));
    };
    let count: usize = count
        .parse()
        .ok()
        .filter(|&c| c >= 1)
        .ok_or_else(|| bad("linspace count must be a positive integer"))?;
    Ok(linspace(
        parse_real(line, key, start)?,
        parse_real(line, key, end)?,
        count,
    ))
}

impl ScenarioFile {
    pub fn parse(text: &str) -> Result<ScenarioFile> {
        let mut entries: BTreeMap<String, Entry> = BTreeMap::new();
        let mut axes = Vec::new();

        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(ScenarioError::Syntax {
                    line,
                    message: format!("expected `key = value`, got `{content}`"),
                });
            };
            let (key, value) = (key.trim(), value.trim());

            if let Some(path) = key.strip_prefix("sweep.") {
                let path: ParamPath = path.parse().map_err(|_| ScenarioError::UnknownKey {
                    line,
                    key: key.to_string(),
                })?;
                if axes.iter().any(|a: &Axis| a.path == path) {
                    return Err(ScenarioError::DuplicateKey {
                        line,
                        key: key.to_string(),
                    });
                }
                axes.push(Axis::new(path, parse_axis_values(line, key, value)?));
                continue;
            }

            let known = key == "name"
                || key == "output.precision"
                || key == "output.measures"
                || SCALARS.contains(&key)
                || VECTORS.contains(&key);
            if !known {
                return Err(ScenarioError::UnknownKey {
                    line,
                    key: key.to_string(),
                });
            }
            if entries.contains_key(key) {
                return Err(ScenarioError::DuplicateKey {
                    line,
                    key: key.to_string(),
                });
            }
            entries.insert(
                key.to_string(),
                Entry {
                    line,
                    value: value.to_string(),
                },
            );
        }

        if let Some(missing) = REQUIRED.iter().find(|k| !entries.contains_key(**k)) {
            return Err(ScenarioError::MissingKey(missing.to_string()));
        }

        let scalar = |key: &str| -> Result<Option<f64>> {
            entries
                .get(key)
                .map(|e| parse_real(e.line, key, &e.value))
                .transpose()
        };
        let p_x = {
            let e = &entries["p_x"];
            parse_list(e.line, "p_x", &e.value)?
        };
        let n = p_x.len();
        let vector = |key: &str| -> Result<Vec<f64>> {
            let Some(e) = entries.get(key) else {
                return Ok(vec![0.0; n]);
            };
            let v = parse_list(e.line, key, &e.value)?;
            if v.len() != n {
                return Err(ScenarioError::BadValue {
                    line: e.line,
                    key: key.to_string(),
                    message: format!(
                        "expected {n} entries (one per level of p_x), got {}",
                        v.len()
                    ),
                });
            }
            Ok(v)
        };
        let or_zero = |key: &str| scalar(key).map(|v| v.unwrap_or(0.0));

        let mut params = StructuralParams::uniform(n.max(1));
        params.p_x = p_x;
        params.p_w = or_zero("p_w")?;
        params.nu = scalar("nu")?.unwrap_or(selbias_core::scm::DEFAULT_NU);
        params.alpha.x = vector("alpha.x")?;
        params.alpha.w = or_zero("alpha.w")?;
        params.alpha.xw = vector("alpha.xw")?;
        params.beta.x = vector("beta.x")?;
        params.beta.v = or_zero("beta.v")?;
        params.beta.w = or_zero("beta.w")?;
        params.beta.xv = vector("beta.xv")?;
        params.beta.xw = vector("beta.xw")?;
        params.beta.vw = or_zero("beta.vw")?;
        params.gamma.f = or_zero("gamma.f")?;
        params.gamma.v = or_zero("gamma.v")?;
        params.gamma.w = or_zero("gamma.w")?;
        params.gamma.fv = or_zero("gamma.fv")?;
        params.gamma.fw = or_zero("gamma.fw")?;
        params.gamma.vw = or_zero("gamma.vw")?;
        params
            .validate()
            .map_err(|e| ScenarioError::Invalid(e.to_string()))?;

        let precision = entries
            .get("output.precision")
            .map(|e| {
                e.value
                    .parse::<usize>()
                    .map_err(|_| ScenarioError::BadValue {
                        line: e.line,
                        key: "output.precision".into(),
                        message: format!("`{}` is not a non-negative integer", e.value),
                    })
            })
            .transpose()?;
        let measures = entries
            .get("output.measures")
            .map(|e| {
                e.value
                    .split(',')
                    .map(|m| {
                        Measure::parse(m.trim()).ok_or_else(|| ScenarioError::BadValue {
                            line: e.line,
                            key: "output.measures".into(),
                            message: format!("unknown measure `{}`", m.trim()),
                        })
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .transpose()?;

        Ok(ScenarioFile {
            name: entries
                .get("name")
                .map(|e| e.value.clone())
                .unwrap_or_else(|| "scenario".to_string()),
            params,
            alpha_0: scalar("alpha.0")?,
            beta_0: scalar("beta.0")?,
            gamma_0: scalar("gamma.0")?,
            axes,
            precision,
            measures,
        })
    }

    /// Calibrated model, with any explicitly given intercept taking
    /// precedence over the calibrated one.
    pub fn model(&self) -> selbias_core::Result<StructuralParams> {
        let mut p = self.params.calibrate()?;
        if let Some(v) = self.alpha_0 {
            p.alpha.intercept = v;
        }
        if let Some(v) = self.beta_0 {
            p.beta.intercept = v;
        }
        if let Some(v) = self.gamma_0 {
            p.gamma.intercept = v;
        }
        Ok(p)
    }

    /// The declared axes as a single-block sweep, if any were given.
    pub fn sweep_spec(&self) -> Option<SweepSpec> {
        (!self.axes.is_empty()).then(|| SweepSpec {
            name: self.name.clone(),
            base: self.params.clone(),
            blocks: vec![self.axes.clone()],
        })
    }
}
