//! Declarative parameter grids and the flat records they produce.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::exact::{
    build_joint, relative_risk_paper, stratum_effects, Prevalences, StratumEffects,
};
use crate::scm::StructuralParams;

/// A settable coefficient or prevalence of [`StructuralParams`].
///
/// Textual form mirrors the scenario keys: `alpha.x[1]`, `gamma.v`, `p_w`.
/// `alpha.x[*]` and `beta.x[*]` scale every level of the base vector by the
/// axis value, which is how a fixed coefficient ladder is swept.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamPath {
    PW,
    Nu,
    AlphaX(usize),
    AlphaXScale,
    AlphaW,
    AlphaXW(usize),
    BetaX(usize),
    BetaXScale,
    BetaV,
    BetaW,
    BetaXV(usize),
    BetaXW(usize),
    BetaVW,
    GammaF,
    GammaV,
    GammaW,
    GammaFV,
    GammaFW,
    GammaVW,
}

impl ParamPath {
    fn level(&self) -> Option<usize> {
        match *self {
            ParamPath::AlphaX(j)
            | ParamPath::AlphaXW(j)
            | ParamPath::BetaX(j)
            | ParamPath::BetaXV(j)
            | ParamPath::BetaXW(j) => Some(j),
            _ => None,
        }
    }

    /// Checks that the path addresses an existing, non-reference entry.
    pub fn check(&self, params: &StructuralParams) -> Result<()> {
        match self.level() {
            Some(j) if j == 0 || j >= params.n_levels() => Err(Error::InvalidSweep(format!(
                "{self} does not address a non-reference level of a {}-level model",
                params.n_levels()
            ))),
            _ => Ok(()),
        }
    }

    /// Writes `value` into `params`. The path must have passed [`Self::check`].
    pub fn apply(&self, params: &mut StructuralParams, value: f64) {
        use ParamPath::*;
        match *self {
            PW => params.p_w = value,
            Nu => params.nu = value,
            AlphaX(j) => params.alpha.x[j] = value,
            AlphaXScale => params.alpha.x.iter_mut().for_each(|c| *c *= value),
            AlphaW => params.alpha.w = value,
            AlphaXW(j) => params.alpha.xw[j] = value,
            BetaX(j) => params.beta.x[j] = value,
            BetaXScale => params.beta.x.iter_mut().for_each(|c| *c *= value),
            BetaV => params.beta.v = value,
            BetaW => params.beta.w = value,
            BetaXV(j) => params.beta.xv[j] = value,
            BetaXW(j) => params.beta.xw[j] = value,
            BetaVW => params.beta.vw = value,
            GammaF => params.gamma.f = value,
            GammaV => params.gamma.v = value,
            GammaW => params.gamma.w = value,
            GammaFV => params.gamma.fv = value,
            GammaFW => params.gamma.fw = value,
            GammaVW => params.gamma.vw = value,
        }
    }
}

impl fmt::Display for ParamPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use ParamPath::*;
        match *self {
            PW => write!(f, "p_w"),
            Nu => write!(f, "nu"),
            AlphaX(j) => write!(f, "alpha.x[{j}]"),
            AlphaXScale => write!(f, "alpha.x[*]"),
            AlphaW => write!(f, "alpha.w"),
            AlphaXW(j) => write!(f, "alpha.xw[{j}]"),
            BetaX(j) => write!(f, "beta.x[{j}]"),
            BetaXScale => write!(f, "beta.x[*]"),
            BetaV => write!(f, "beta.v"),
            BetaW => write!(f, "beta.w"),
            BetaXV(j) => write!(f, "beta.xv[{j}]"),
            BetaXW(j) => write!(f, "beta.xw[{j}]"),
            BetaVW => write!(f, "beta.vw"),
            GammaF => write!(f, "gamma.f"),
            GammaV => write!(f, "gamma.v"),
            GammaW => write!(f, "gamma.w"),
            GammaFV => write!(f, "gamma.fv"),
            GammaFW => write!(f, "gamma.fw"),
            GammaVW => write!(f, "gamma.vw"),
        }
    }
}

impl FromStr for ParamPath {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        use ParamPath::*;
        let bad = || Error::InvalidSweep(format!("unknown parameter path `{s}`"));
        let (name, index) = match s.split_once('[') {
            Some((name, rest)) => {
                let idx = rest.strip_suffix(']').ok_or_else(bad)?;
                (name, Some(idx))
            }
            None => (s, None),
        };
        let level = || -> Result<usize> { index.ok_or_else(bad)?.parse().map_err(|_| bad()) };
        let path = match (name, index) {
            ("alpha.x", Some("*")) => AlphaXScale,
            ("beta.x", Some("*")) => BetaXScale,
            ("alpha.x", Some(_)) => AlphaX(level()?),
            ("alpha.xw", Some(_)) => AlphaXW(level()?),
            ("beta.x", Some(_)) => BetaX(level()?),
            ("beta.xv", Some(_)) => BetaXV(level()?),
            ("beta.xw", Some(_)) => BetaXW(level()?),
            (_, Some(_)) => return Err(bad()),
            ("p_w", None) => PW,
            ("nu", None) => Nu,
            ("alpha.w", None) => AlphaW,
            ("beta.v", None) => BetaV,
            ("beta.w", None) => BetaW,
            ("beta.vw", None) => BetaVW,
            ("gamma.f", None) => GammaF,
            ("gamma.v", None) => GammaV,
            ("gamma.w", None) => GammaW,
            ("gamma.fv", None) => GammaFV,
            ("gamma.fw", None) => GammaFW,
            ("gamma.vw", None) => GammaVW,
            _ => return Err(bad()),
        };
        Ok(path)
    }
}

/// `count` evenly spaced values from `start` to `end` inclusive, computed as
/// `(start (n-1-i) + end i) / (n-1)` so integer endpoints give correctly
/// rounded grid points.
pub fn linspace(start: f64, end: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let last = (count - 1) as f64;
            (0..count)
                .map(|i| (start * (last - i as f64) + end * i as f64) / last)
                .collect()
        }
    }
}

/// One swept parameter with its values.
#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub path: ParamPath,
    pub values: Vec<f64>,
}

impl Axis {
    pub fn new(path: ParamPath, values: impl Into<Vec<f64>>) -> Self {
        Axis {
            path,
            values: values.into(),
        }
    }

    pub fn linspace(path: ParamPath, start: f64, end: f64, count: usize) -> Self {
        Axis {
            path,
            values: linspace(start, end, count),
        }
    }
}

/// A parameter grid: the union over `blocks` of the Cartesian product of
/// each block's axes, applied on top of `base`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub name: String,
    pub base: StructuralParams,
    pub blocks: Vec<Vec<Axis>>,
}

/// One grid point: the axis settings and the resulting calibrated model.
#[derive(Debug, Clone, PartialEq)]
pub struct GridPoint {
    pub settings: Vec<(ParamPath, f64)>,
    pub params: StructuralParams,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        self.base.validate()?;
        if self.blocks.is_empty() || self.blocks.iter().any(|b| b.is_empty()) {
            return Err(Error::InvalidSweep(
                "a sweep needs at least one axis".into(),
            ));
        }
        for axis in self.blocks.iter().flatten() {
            axis.path.check(&self.base)?;
            if axis.values.is_empty() {
                return Err(Error::InvalidSweep(format!(
                    "axis {} has no values",
                    axis.path
                )));
            }
            if let Some(v) = axis.values.iter().find(|v| !v.is_finite()) {
                return Err(Error::InvalidSweep(format!(
                    "axis {} has value {v}",
                    axis.path
                )));
            }
        }
        Ok(())
    }

    /// Every grid point in output order: blocks in order, and within a
    /// block lexicographic in axis declaration order (first axis slowest).
    pub fn points(&self) -> Result<Vec<GridPoint>> {
        self.validate()?;
        let mut out = Vec::new();
        for block in &self.blocks {
            let mut index = vec![0usize; block.len()];
            'grid: loop {
                let settings: Vec<_> = block
                    .iter()
                    .zip(&index)
                    .map(|(axis, &i)| (axis.path, axis.values[i]))
                    .collect();
                let mut params = self.base.clone();
                for &(path, value) in &settings {
                    path.apply(&mut params, value);
                }
                let params = params.calibrate().map_err(|e| {
                    Error::InvalidSweep(format!("grid point {settings:?} is invalid: {e}"))
                })?;
                out.push(GridPoint { settings, params });

                for k in (0..block.len()).rev() {
                    index[k] += 1;
                    if index[k] < block[k].values.len() {
                        continue 'grid;
                    }
                    index[k] = 0;
                }
                break;
            }
        }
        Ok(out)
    }
}

/// One record per grid point, exposure level and stratum.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub scenario: String,
    pub settings: Vec<(ParamPath, f64)>,
    pub level: usize,
    pub w: bool,
    /// Coefficients of this level at this grid point.
    pub alpha_x: f64,
    pub gamma_v: f64,
    pub alpha_w: f64,
    pub alpha_xw: f64,
    pub beta_xv: f64,
    /// `None` marks a degenerate stratum.
    pub effects: Option<StratumEffects>,
    pub degenerate: Option<String>,
    pub rr_paper_f1: f64,
    pub prevalences: Prevalences,
}

impl SweepRow {
    /// Value of a swept parameter at this row's grid point.
    pub fn setting(&self, path: ParamPath) -> Option<f64> {
        self.settings
            .iter()
            .find(|(p, _)| *p == path)
            .map(|(_, v)| *v)
    }
}

fn rows_for_point(name: &str, point: &GridPoint) -> Result<Vec<SweepRow>> {
    let p = &point.params;
    let prevalences = build_joint(p)?.prevalences();
    let mut rows = Vec::with_capacity(2 * (p.n_levels() - 1));
    for level in 1..p.n_levels() {
        for w in [false, true] {
            let (effects, degenerate) = match stratum_effects(p, level, w) {
                Ok(e) => (Some(e), None),
                Err(e @ (Error::DegenerateStratum(_) | Error::OddsUndefined(_))) => {
                    (None, Some(e.to_string()))
                }
                Err(e) => return Err(e),
            };
            rows.push(SweepRow {
                scenario: name.to_string(),
                settings: point.settings.clone(),
                level,
                w,
                alpha_x: p.alpha.x[level],
                gamma_v: p.gamma.v,
                alpha_w: p.alpha.w,
                alpha_xw: p.alpha.xw[level],
                beta_xv: p.beta.xv[level],
                effects,
                degenerate,
                rr_paper_f1: relative_risk_paper(p, level, 0, true, w),
                prevalences,
            });
        }
    }
    Ok(rows)
}

/// Evaluates every grid point. Degenerate strata produce marker rows
/// instead of aborting the grid.
pub fn run(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::new();
    for point in spec.points()? {
        rows.extend(rows_for_point(&spec.name, &point)?);
    }
    Ok(rows)
}

/// Names accepted by [`preset`].
pub const PRESET_NAMES: [&str; 9] = [
    "fig2", "fig3", "fig4", "fig5", "fig6_app", "fig7_app", "table1", "table3", "app3_bac",
];

/// Points per panel along the exposure-on-speed axis.
pub const ALPHA_X_POINTS: usize = 61;

/// Speed-to-severity strengths, one panel row each.
pub const GAMMA_V_PANELS: [f64; 3] = [0.0, 1.5, 3.0];

/// Binary model with the fixed defaults shared by every binary exhibit:
/// `beta.v = beta.x = beta.w = gamma.w = 1`, `gamma.f = 4`, no interactions,
/// `p_x = p_w = 0.5`, `nu = 13`. Intercepts are left for calibration.
pub fn binary_defaults(alpha_x: f64, gamma_v: f64, alpha_w: f64) -> StructuralParams {
    let mut p = StructuralParams::uniform(2);
    p.alpha.x[1] = alpha_x;
    p.alpha.w = alpha_w;
    p.beta.x[1] = 1.0;
    p.beta.v = 1.0;
    p.beta.w = 1.0;
    p.gamma.f = 4.0;
    p.gamma.v = gamma_v;
    p.gamma.w = 1.0;
    p
}

/// Five-level exposure (blood alcohol concentration classes) with the
/// speed ladder `1, 0.8, 0.25, 0.2` (times `alpha_x[1]`) and fault ladder
/// `1, 2.5, 3.5, 3.4`. No confounding and no interactions.
pub fn blood_alcohol_defaults() -> StructuralParams {
    let mut p = StructuralParams::uniform(5);
    p.p_x = vec![0.2; 5];
    p.alpha.x = vec![0.0, 1.0, 0.8, 0.25, 0.2];
    p.beta.x = vec![0.0, 1.0, 2.5, 3.5, 3.4];
    p.beta.v = 1.0;
    p.gamma.f = 4.0;
    p.gamma.v = 3.0;
    p
}

fn figure(name: &str, base: StructuralParams, panel: Axis, negative: bool) -> SweepSpec {
    let (start, end) = if negative { (-3.0, 0.0) } else { (0.0, 3.0) };
    SweepSpec {
        name: name.to_string(),
        base,
        blocks: vec![vec![
            Axis::new(ParamPath::GammaV, GAMMA_V_PANELS),
            panel,
            Axis::linspace(ParamPath::AlphaX(1), start, end, ALPHA_X_POINTS),
        ]],
    }
}

pub fn preset(name: &str) -> Result<SweepSpec> {
    use ParamPath::*;
    let alpha_w = || Axis::new(AlphaW, [0.0, 1.0, 2.0, 3.0]);
    let alcohol_xw = || Axis::new(AlphaXW(1), [0.0, 1.0, 2.0, 3.0]);
    let cannabis_xw = || Axis::new(AlphaXW(1), [-1.0, 0.0, 1.0, 2.0]);
    let beta_xv = || Axis::new(BetaXV(1), [0.0, 1.0, 2.0, 3.0]);

    let spec = match name {
        "fig2" => figure(name, binary_defaults(1.0, 3.0, 0.0), alpha_w(), false),
        "fig3" => figure(name, binary_defaults(-1.0, 3.0, 0.0), alpha_w(), true),
        "fig4" => figure(name, binary_defaults(1.0, 3.0, 2.0), alcohol_xw(), false),
        "fig5" => figure(name, binary_defaults(-1.0, 3.0, 2.0), cannabis_xw(), true),
        "fig6_app" => figure(name, binary_defaults(1.0, 3.0, 2.0), beta_xv(), false),
        "fig7_app" => figure(name, binary_defaults(-1.0, 3.0, 2.0), beta_xv(), true),
        "table1" => SweepSpec {
            name: name.to_string(),
            base: binary_defaults(1.0, 3.0, 2.0),
            blocks: vec![vec![alpha_w()], vec![alcohol_xw()], vec![beta_xv()]],
        },
        "table3" => SweepSpec {
            name: name.to_string(),
            base: binary_defaults(-1.0, 3.0, 2.0),
            blocks: vec![vec![cannabis_xw()], vec![beta_xv()]],
        },
        "app3_bac" => SweepSpec {
            name: name.to_string(),
            base: blood_alcohol_defaults(),
            blocks: vec![vec![
                Axis::new(GammaV, GAMMA_V_PANELS),
                Axis::linspace(AlphaXScale, 0.0, 3.0, ALPHA_X_POINTS),
            ]],
        },
        _ => return Err(Error::UnknownPreset(name.to_string())),
    };
    Ok(spec)
}
