//! Exact enumeration of the joint distribution and the closed-form causal,
//! selection-conditioned and relative-risk quantities.

use crate::error::{Error, Result};
use crate::scm::{cell_count, NodeAssignment, StructuralParams};

/// Conditioning events lighter than this are treated as impossible.
pub const MIN_CONDITIONING_MASS: f64 = 1e-300;

fn bern(p: f64, outcome: bool) -> f64 {
    if outcome {
        p
    } else {
        1.0 - p
    }
}

fn require_mass(mass: f64, what: impl FnOnce() -> String) -> Result<f64> {
    if mass.is_finite() && mass >= MIN_CONDITIONING_MASS {
        Ok(mass)
    } else {
        Err(Error::DegenerateStratum(format!(
            "{} has mass {mass:e}",
            what()
        )))
    }
}

/// Natural log of `p / (1 - p)`.
pub fn log_odds(p: f64) -> Result<f64> {
    if p > 0.0 && p < 1.0 {
        Ok(p.ln() - (-p).ln_1p())
    } else {
        Err(Error::OddsUndefined(p))
    }
}

/// Marginal prevalences of speed, fault and severe accident.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prevalences {
    pub v: f64,
    pub f: f64,
    pub a: f64,
}

/// Exact probability of every joint assignment of `(W, X, V, F, A)`.
#[derive(Debug, Clone)]
pub struct JointTable {
    params: StructuralParams,
    intervention: Option<usize>,
    cells: Vec<(NodeAssignment, f64)>,
}

impl JointTable {
    /// Observational joint distribution factorized along the graph.
    pub fn build(params: &StructuralParams) -> Result<Self> {
        Self::assemble(params, None)
    }

    /// Joint distribution under `do(X = level)`: the exposure equation is
    /// replaced by a point mass, every other factor is kept.
    pub fn intervened(params: &StructuralParams, level: usize) -> Result<Self> {
        params.check_level(level)?;
        Self::assemble(params, Some(level))
    }

    fn assemble(params: &StructuralParams, intervention: Option<usize>) -> Result<Self> {
        params.validate()?;
        let n = params.n_levels();
        let mut cells = Vec::with_capacity(cell_count(n));
        for a in NodeAssignment::all(n) {
            let p_x = match intervention {
                Some(level) if level == a.x => 1.0,
                Some(_) => 0.0,
                None => params.p_x[a.x],
            };
            let p = params.p_w_of(a.w)
                * p_x
                * bern(params.p_v(a.x, a.w), a.v)
                * bern(params.p_f(a.x, a.v, a.w), a.f)
                * bern(params.p_a(a.f, a.v, a.w), a.a);
            cells.push((a, p));
        }
        Ok(JointTable {
            params: params.clone(),
            intervention,
            cells,
        })
    }

    pub fn params(&self) -> &StructuralParams {
        &self.params
    }

    pub fn intervention(&self) -> Option<usize> {
        self.intervention
    }

    pub fn n_levels(&self) -> usize {
        self.params.n_levels()
    }

    pub fn cells(&self) -> &[(NodeAssignment, f64)] {
        &self.cells
    }

    pub fn cell(&self, assignment: &NodeAssignment) -> f64 {
        self.cells[assignment.index(self.n_levels())].1
    }

    /// Total mass of the assignments satisfying `event`.
    pub fn probability(&self, event: impl Fn(&NodeAssignment) -> bool) -> f64 {
        self.cells
            .iter()
            .filter(|(a, _)| event(a))
            .map(|(_, p)| p)
            .sum()
    }

    /// `P(event | given)`.
    pub fn conditional(
        &self,
        event: impl Fn(&NodeAssignment) -> bool,
        given: impl Fn(&NodeAssignment) -> bool,
    ) -> Result<f64> {
        let denom = require_mass(self.probability(&given), || "conditioning event".into())?;
        Ok(self.probability(|a| given(a) && event(a)) / denom)
    }

    pub fn prevalences(&self) -> Prevalences {
        Prevalences {
            v: self.probability(|a| a.v),
            f: self.probability(|a| a.f),
            a: self.probability(|a| a.a),
        }
    }

    /// `P(A=1 | X=x1, F=f, W=w) / P(A=1 | X=x0, F=f, W=w)` by direct
    /// conditioning on the table.
    pub fn relative_risk(&self, x1: usize, x0: usize, f: bool, w: bool) -> Result<f64> {
        let severe = |x: usize| -> Result<f64> {
            let given = |c: &NodeAssignment| c.x == x && c.f == f && c.w == w;
            let denom = require_mass(self.probability(given), || {
                format!("X={x}, F={}, W={}", u8::from(f), u8::from(w))
            })?;
            Ok(self.probability(|c| given(c) && c.a) / denom)
        };
        let num = severe(x1)?;
        let den = require_mass(severe(x0)?, || "P(A=1 | reference level)".into())?;
        Ok(num / den)
    }
}

/// Builds the observational joint table.
pub fn build_joint(params: &StructuralParams) -> Result<JointTable> {
    JointTable::build(params)
}

/// `P(R_x = 1 | W = w)`, the counterfactual probability of responsibility
/// for a severe accident had the exposure been set to level `x`.
pub fn cf_prob_r(params: &StructuralParams, x: usize, w: bool) -> f64 {
    let p_v = params.p_v(x, w);
    params.p_a(true, true, w) * params.p_f(x, true, w) * p_v
        + params.p_a(true, false, w) * params.p_f(x, false, w) * (1.0 - p_v)
}

/// `P(F_x = 1 | W = w)`.
pub fn cf_prob_f(params: &StructuralParams, x: usize, w: bool) -> f64 {
    let p_v = params.p_v(x, w);
    params.p_f(x, true, w) * p_v + params.p_f(x, false, w) * (1.0 - p_v)
}

/// `P(R = 1 | X = x, W = w, A = 1)`, the quantity estimable from a
/// responsibility dataset (equal to `P(F = 1 | X = x, W = w, A = 1)`).
pub fn prob_r_given_a1(params: &StructuralParams, x: usize, w: bool) -> Result<f64> {
    let p_v = params.p_v(x, w);
    let responsible = cf_prob_r(params, x, w);
    let not_responsible = params.p_a(false, true, w) * (1.0 - params.p_f(x, true, w)) * p_v
        + params.p_a(false, false, w) * (1.0 - params.p_f(x, false, w)) * (1.0 - p_v);
    let severe = responsible + not_responsible;
    require_mass(severe * params.p_x[x] * params.p_w_of(w), || {
        format!("X={x}, W={}, A=1", u8::from(w))
    })?;
    Ok(responsible / severe)
}

/// `P(A = 1 | F = f, X = x, W = w)` in closed form, mixing speed over
/// `P(V | X, F, W)`.
pub fn prob_a_given_fault(params: &StructuralParams, x: usize, f: bool, w: bool) -> Result<f64> {
    let p_v = params.p_v(x, w);
    let fast = bern(params.p_f(x, true, w), f) * p_v;
    let slow = bern(params.p_f(x, false, w), f) * (1.0 - p_v);
    require_mass((fast + slow) * params.p_x[x] * params.p_w_of(w), || {
        format!("X={x}, F={}, W={}", u8::from(f), u8::from(w))
    })?;
    Ok((params.p_a(f, true, w) * fast + params.p_a(f, false, w) * slow) / (fast + slow))
}

/// Relative risk of a severe accident across exposure levels, using the
/// approximation printed with the published tables:
/// `p_A(f,1,w) p_V(x,w) + p_A(f,0,w) (1 - p_V(x,w))` at `x1` over `x0`.
/// Speed is weighted by `P(V | X, W)` rather than `P(V | X, F, W)`.
pub fn relative_risk_paper(
    params: &StructuralParams,
    x1: usize,
    x0: usize,
    f: bool,
    w: bool,
) -> f64 {
    let severe = |x: usize| {
        let p_v = params.p_v(x, w);
        params.p_a(f, true, w) * p_v + params.p_a(f, false, w) * (1.0 - p_v)
    };
    severe(x1) / severe(x0)
}

/// Exact `P(A=1 | X=x1, F=f, W=w) / P(A=1 | X=x0, F=f, W=w)` from the
/// joint table.
pub fn relative_risk_exact(
    params: &StructuralParams,
    x1: usize,
    x0: usize,
    f: bool,
    w: bool,
) -> Result<f64> {
    params.check_level(x1)?;
    params.check_level(x0)?;
    build_joint(params)?.relative_risk(x1, x0, f, w)
}

/// Effect measures for one exposure level against the reference, within
/// one stratum of the confounder. Stored on the log scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StratumEffects {
    pub level: usize,
    pub w: bool,
    pub log_cor_xr: f64,
    pub log_cor_xf: f64,
    pub log_or_xr_a1: f64,
    pub log_crr_xr: f64,
    pub log_crr_xf: f64,
}

impl StratumEffects {
    /// Causal odds ratio of the exposure on responsibility.
    pub fn cor_xr(&self) -> f64 {
        self.log_cor_xr.exp()
    }

    /// Causal odds ratio of the exposure on driving fault.
    pub fn cor_xf(&self) -> f64 {
        self.log_cor_xf.exp()
    }

    /// Odds ratio estimable among severe-accident drivers only.
    pub fn or_xr_a1(&self) -> f64 {
        self.log_or_xr_a1.exp()
    }

    pub fn crr_xr(&self) -> f64 {
        self.log_crr_xr.exp()
    }

    pub fn crr_xf(&self) -> f64 {
        self.log_crr_xf.exp()
    }

    /// `|log COR(X,R) - log OR(X,R | A=1)|`.
    pub fn bias_gap(&self) -> f64 {
        (self.log_cor_xr - self.log_or_xr_a1).abs()
    }

    /// The selection-conditioned odds ratio points the other way from the
    /// causal one.
    pub fn sign_reversal(&self) -> bool {
        self.log_cor_xr * self.log_or_xr_a1 < 0.0
    }
}

/// Effects of level `j` versus level 0 within stratum `w`.
pub fn stratum_effects(params: &StructuralParams, j: usize, w: bool) -> Result<StratumEffects> {
    params.check_level(j)?;
    let r1 = cf_prob_r(params, j, w);
    let r0 = cf_prob_r(params, 0, w);
    let f1 = cf_prob_f(params, j, w);
    let f0 = cf_prob_f(params, 0, w);
    let s1 = prob_r_given_a1(params, j, w)?;
    let s0 = prob_r_given_a1(params, 0, w)?;
    let log_ratio = |a: f64, b: f64| -> Result<f64> {
        if a > 0.0 && b > 0.0 {
            Ok(a.ln() - b.ln())
        } else {
            Err(Error::OddsUndefined(if a > 0.0 { b } else { a }))
        }
    };
    Ok(StratumEffects {
        level: j,
        w,
        log_cor_xr: log_odds(r1)? - log_odds(r0)?,
        log_cor_xf: log_odds(f1)? - log_odds(f0)?,
        log_or_xr_a1: log_odds(s1)? - log_odds(s0)?,
        log_crr_xr: log_ratio(r1, r0)?,
        log_crr_xf: log_ratio(f1, f0)?,
    })
}

/// All stratum effects, ordered by level and then `w = 0` before `w = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectEstimates {
    pub strata: Vec<StratumEffects>,
}

impl EffectEstimates {
    pub fn get(&self, level: usize, w: bool) -> Option<&StratumEffects> {
        self.strata.iter().find(|s| s.level == level && s.w == w)
    }
}

pub fn effects(params: &StructuralParams) -> Result<EffectEstimates> {
    params.validate()?;
    let mut strata = Vec::with_capacity(2 * (params.n_levels() - 1));
    for j in 1..params.n_levels() {
        for w in [false, true] {
            strata.push(stratum_effects(params, j, w)?);
        }
    }
    Ok(EffectEstimates { strata })
}
