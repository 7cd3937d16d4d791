//! The five subcommands. Each writes data to `out` and diagnostics to `err`.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use selbias_core::exact::Prevalences;
use selbias_core::sweep::binary_defaults;
use selbias_core::{
    build_joint, compare, effects, preset, relative_risk_exact, relative_risk_paper, run, sample,
    JointTable, StructuralParams, SweepSpec, PRESET_NAMES,
};

use crate::output::{format_fixed, format_sig, write_csv};
use crate::scenario::{Measure, ScenarioFile};
use crate::CliError;

pub const DEFAULT_PRECISION: usize = 6;
pub const DEFAULT_SAMPLES: u64 = 1_000_000;
pub const DEFAULT_SEED: u64 = 42;

/// Where a command's model comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    Scenario(PathBuf),
    Preset(String),
    /// Binary defaults at `alpha.x[1] = 1`, `gamma.v = 3`, `alpha.w = 0`.
    Default,
}

impl Source {
    pub fn from_flags(scenario: Option<PathBuf>, preset: Option<String>) -> Result<Self, CliError> {
        match (scenario, preset) {
            (Some(_), Some(_)) => Err(CliError::Usage(
                "--scenario and --preset are mutually exclusive".into(),
            )),
            (Some(path), None) => Ok(Source::Scenario(path)),
            (None, Some(name)) => Ok(Source::Preset(name)),
            (None, None) => Ok(Source::Default),
        }
    }
}

/// A resolved model plus the options a scenario file may carry.
pub struct Loaded {
    pub name: String,
    pub params: StructuralParams,
    pub sweep: Option<SweepSpec>,
    pub precision: Option<usize>,
    pub measures: Option<Vec<Measure>>,
}

pub fn read_scenario(path: &Path) -> Result<ScenarioFile, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    ScenarioFile::parse(&text).map_err(|e| CliError::Scenario {
        path: path.display().to_string(),
        source: e,
    })
}

pub fn load(source: &Source) -> Result<Loaded, CliError> {
    match source {
        Source::Scenario(path) => {
            let file = read_scenario(path)?;
            Ok(Loaded {
                name: file.name.clone(),
                params: file.model()?,
                sweep: file.sweep_spec(),
                precision: file.precision,
                measures: file.measures.clone(),
            })
        }
        Source::Preset(name) => {
            let spec = preset(name)?;
            Ok(Loaded {
                name: spec.name.clone(),
                params: spec.base.calibrate()?,
                sweep: Some(spec),
                precision: None,
                measures: None,
            })
        }
        Source::Default => Ok(Loaded {
            name: "default".into(),
            params: binary_defaults(1.0, 3.0, 0.0).calibrate()?,
            sweep: None,
            precision: None,
            measures: None,
        }),
    }
}

fn write_prevalences(
    out: &mut dyn Write,
    prev: &Prevalences,
    precision: usize,
) -> std::io::Result<()> {
    writeln!(
        out,
        "prevalence: P(V=1) = {}  P(F=1) = {}  P(A=1) = {}",
        format_fixed(prev.v, precision),
        format_fixed(prev.f, precision),
        format_fixed(prev.a, precision)
    )
}

pub fn effects_cmd(
    source: &Source,
    precision: Option<usize>,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let model = load(source)?;
    let p = &model.params;
    let prec = precision.or(model.precision).unwrap_or(DEFAULT_PRECISION);
    let measures = model
        .measures
        .clone()
        .unwrap_or_else(|| Measure::ALL.to_vec());
    let estimates = effects(p)?;
    let prevalences = build_joint(p)?.prevalences();
    let fx = |x: f64| format_fixed(x, prec);

    let mut text = Vec::new();
    let o = &mut text;
    writeln!(o, "scenario: {}", model.name)?;
    writeln!(
        o,
        "intercepts: alpha.0 = {}  beta.0 = {}  gamma.0 = {}",
        format_sig(p.alpha.intercept, 10),
        format_sig(p.beta.intercept, 10),
        format_sig(p.gamma.intercept, 10)
    )?;
    write_prevalences(o, &prevalences, prec)?;
    for e in &estimates.strata {
        writeln!(o)?;
        writeln!(o, "level {} vs 0, w = {}", e.level, u8::from(e.w))?;
        for m in &measures {
            let (value, log) = match m {
                Measure::CorXr => (e.cor_xr(), e.log_cor_xr),
                Measure::CorXf => (e.cor_xf(), e.log_cor_xf),
                Measure::OrXrA1 => (e.or_xr_a1(), e.log_or_xr_a1),
                Measure::CrrXr => (e.crr_xr(), e.log_crr_xr),
                Measure::CrrXf => (e.crr_xf(), e.log_crr_xf),
            };
            writeln!(o, "  {:<9} = {}  log = {}", m.name(), fx(value), fx(log))?;
        }
        for f in [true, false] {
            let paper = relative_risk_paper(p, e.level, 0, f, e.w);
            let exact = relative_risk_exact(p, e.level, 0, f, e.w)?;
            writeln!(
                o,
                "  rr_paper(f={}) = {}  rr_exact(f={}) = {}",
                u8::from(f),
                fx(paper),
                u8::from(f),
                fx(exact)
            )?;
        }
        if e.sign_reversal() {
            writeln!(
                o,
                "  SIGN-REVERSAL: log cor_xr = {}, log or_xr_a1 = {}",
                fx(e.log_cor_xr),
                fx(e.log_or_xr_a1)
            )?;
        }
    }
    out.write_all(&text)?;
    Ok(())
}

pub fn sweep_cmd(source: &Source, out_path: &str, out: &mut dyn Write) -> Result<usize, CliError> {
    let spec = match source {
        Source::Default => {
            return Err(CliError::Usage("sweep needs --preset or --scenario".into()));
        }
        _ => load(source)?
            .sweep
            .ok_or_else(|| CliError::Usage("the scenario declares no sweep.<path> axes".into()))?,
    };
    let rows = run(&spec)?;
    let csv = write_csv(&rows);
    if out_path == "-" {
        out.write_all(csv.as_bytes())?;
    } else {
        fs::write(out_path, csv).map_err(|source| CliError::Io {
            path: out_path.to_string(),
            source,
        })?;
    }
    Ok(rows.len())
}

pub fn validate_cmd(
    source: &Source,
    against: Option<&Path>,
    n: u64,
    seed: u64,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    if n == 0 {
        return Err(CliError::Usage("--n must be positive".into()));
    }
    let model = load(source)?;
    let table_params = match against {
        Some(path) => read_scenario(path)?.model()?,
        None => model.params.clone(),
    };
    if table_params.n_levels() != model.params.n_levels() {
        return Err(CliError::Usage(format!(
            "--against has {} exposure levels, the sampled model has {}",
            table_params.n_levels(),
            model.params.n_levels()
        )));
    }
    let batch = sample(&model.params, n, seed, None)?;
    let table = JointTable::build(&table_params)?;
    let report = compare(&batch, &table)?;

    writeln!(out, "scenario: {}", model.name)?;
    writeln!(out, "rng: {}", report.rng)?;
    writeln!(out, "n = {}  seed = {}", report.n, report.seed)?;
    writeln!(out, "cells = {}", report.cells.len())?;
    writeln!(out, "max |z| = {}", format_fixed(report.max_abs_z(), 4))?;
    let flagged: Vec<_> = report.flagged().collect();
    for c in &flagged {
        writeln!(
            out,
            "FLAG {}  expected = {}  observed = {}  z = {}",
            c.assignment,
            format_sig(c.expected * n as f64, 10),
            c.observed,
            format_fixed(c.z, 3)
        )?;
    }
    if flagged.is_empty() {
        writeln!(out, "result: pass")?;
        Ok(())
    } else {
        writeln!(out, "result: fail")?;
        Err(CliError::ValidationFailed(flagged.len()))
    }
}

/// Largest tolerated deviation of the achieved `P(V=1)` from one half
/// before a warning is printed.
pub const SPEED_PREVALENCE_WARN: f64 = 0.05;

fn ladder(values: &[f64]) -> String {
    values[1..]
        .iter()
        .map(|&v| format_sig(v, 10))
        .collect::<Vec<_>>()
        .join(", ")
}

pub fn calibrate_cmd(
    source: &Source,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<(), CliError> {
    let model = load(source)?;
    let p = &model.params;
    let prev = build_joint(p)?.prevalences();
    let sig = |x: f64| format_sig(x, 10);
    writeln!(out, "scenario: {}", model.name)?;
    writeln!(out, "alpha.0 = {}", sig(p.alpha.intercept))?;
    writeln!(out, "beta.0 = {}", sig(p.beta.intercept))?;
    writeln!(out, "gamma.0 = {}", sig(p.gamma.intercept))?;
    writeln!(out, "alpha.x[1..] = {}", ladder(&p.alpha.x))?;
    writeln!(out, "beta.x[1..] = {}", ladder(&p.beta.x))?;
    writeln!(out, "P(V=1) = {}", sig(prev.v))?;
    writeln!(out, "P(F=1) = {}", sig(prev.f))?;
    writeln!(out, "P(A=1) = {}", sig(prev.a))?;
    if (prev.v - 0.5).abs() > SPEED_PREVALENCE_WARN {
        writeln!(
            err,
            "warning: P(V=1) = {} deviates from 0.5 by more than {}",
            sig(prev.v),
            SPEED_PREVALENCE_WARN
        )?;
    }
    Ok(())
}

pub fn presets_cmd(out: &mut dyn Write) -> Result<(), CliError> {
    for name in PRESET_NAMES {
        writeln!(out, "{name}")?;
    }
    Ok(())
}
