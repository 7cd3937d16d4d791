//! Exact computation of causal and selection-conditioned effect measures in
//! a logistic structural causal model of severe road accidents.
//!
//! Responsibility analyses estimate `OR(X, R | W=w, A=1)` among drivers
//! involved in a severe accident. When the exposure `X` affects speed `V`
//! and speed affects severity `A`, this differs from the causal odds ratio
//! `COR(X, R | W=w)`. This crate enumerates the model exactly to measure
//! the gap.
//!
//! - [`scm`]: parameters, structural equations, intercept calibration
//! - [`exact`]: joint table, counterfactuals, odds ratios, relative risks
//! - [`oracle`]: seeded forward sampler for validation
//! - [`sweep`]: parameter grids and presets

pub mod error;
pub mod exact;
pub mod oracle;
pub mod scm;
pub mod sweep;

pub use error::{Error, Result};
pub use exact::{
    build_joint, cf_prob_f, cf_prob_r, effects, prob_a_given_fault, prob_r_given_a1,
    relative_risk_exact, relative_risk_paper, stratum_effects, EffectEstimates, JointTable,
    Prevalences, StratumEffects,
};
pub use oracle::{compare, sample, ComparisonReport, SampleBatch};
pub use scm::{logistic, Intercepts, NodeAssignment, StructuralParams};
pub use sweep::{preset, run, Axis, ParamPath, SweepRow, SweepSpec, PRESET_NAMES};
