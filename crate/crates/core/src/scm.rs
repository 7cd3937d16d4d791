//! Model parameterization, logistic structural equations and intercept
//! calibration.
//!
//! The causal graph is
//!
//! ```text
//! W -> X, W -> V, W -> F, W -> A
//! X -> V, X -> F
//! V -> F, V -> A
//! F -> A
//! R = F * A
//! ```
//!
//! `W` is a binary confounder, `X` an exposure with `n_levels` categories
//! (level 0 is the reference), `V` high speed, `F` driving fault and `A` a
//! severe accident. Selection into a responsibility dataset is conditioning
//! on `A = 1`.

use crate::error::{Error, Result};

/// Tolerance on `sum(p_x) == 1`.
pub const PREVALENCE_SUM_TOL: f64 = 1e-12;

/// Default calibration constant controlling the rarity of `F` and `A`.
pub const DEFAULT_NU: f64 = 13.0;

/// Logistic function `1 / (1 + exp(-z))`, evaluated without overflow.
pub fn logistic(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

#[inline]
fn ind(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

/// Coefficients of `P(V=1 | X=x, W=w)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpeedEquation {
    pub intercept: f64,
    /// Per-level main effect, `x[0] == 0`.
    pub x: Vec<f64>,
    pub w: f64,
    /// Per-level exposure-by-confounder interaction, `xw[0] == 0`.
    pub xw: Vec<f64>,
}

/// Coefficients of `P(F=1 | X=x, V=v, W=w)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FaultEquation {
    pub intercept: f64,
    pub x: Vec<f64>,
    pub v: f64,
    pub w: f64,
    pub xv: Vec<f64>,
    pub xw: Vec<f64>,
    pub vw: f64,
}

/// Coefficients of `P(A=1 | F=f, V=v, W=w)`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SeverityEquation {
    pub intercept: f64,
    pub f: f64,
    pub v: f64,
    pub w: f64,
    pub fv: f64,
    pub fw: f64,
    pub vw: f64,
}

/// Full parameterization of the structural model.
#[derive(Debug, Clone, PartialEq)]
pub struct StructuralParams {
    /// `P(W = 1)`.
    pub p_w: f64,
    /// `P(X = x_j)`, independent of `W`.
    pub p_x: Vec<f64>,
    pub alpha: SpeedEquation,
    pub beta: FaultEquation,
    pub gamma: SeverityEquation,
    pub nu: f64,
}

/// The three intercepts filled by [`StructuralParams::calibrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Intercepts {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl StructuralParams {
    /// All coefficients zero, uniform exposure levels, `p_w = 0.5`, `nu = 13`.
    pub fn uniform(n_levels: usize) -> Self {
        let zeros = vec![0.0; n_levels];
        StructuralParams {
            p_w: 0.5,
            p_x: vec![1.0 / n_levels as f64; n_levels],
            alpha: SpeedEquation {
                intercept: 0.0,
                x: zeros.clone(),
                w: 0.0,
                xw: zeros.clone(),
            },
            beta: FaultEquation {
                intercept: 0.0,
                x: zeros.clone(),
                v: 0.0,
                w: 0.0,
                xv: zeros.clone(),
                xw: zeros,
                vw: 0.0,
            },
            gamma: SeverityEquation::default(),
            nu: DEFAULT_NU,
        }
    }

    pub fn n_levels(&self) -> usize {
        self.p_x.len()
    }

    /// Checks every structural invariant: prevalences in range and summing
    /// to one, vector lengths consistent, reference coefficients zero and
    /// all values finite.
    pub fn validate(&self) -> Result<()> {
        let n = self.n_levels();
        if n < 2 {
            return Err(Error::InvalidParams(format!(
                "need at least 2 exposure levels, got {n}"
            )));
        }
        if !(0.0..=1.0).contains(&self.p_w) {
            return Err(Error::InvalidParams(format!(
                "p_w = {} outside [0, 1]",
                self.p_w
            )));
        }
        if let Some(p) = self.p_x.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::InvalidParams(format!(
                "p_x entry {p} outside [0, 1]"
            )));
        }
        let total: f64 = self.p_x.iter().sum();
        if (total - 1.0).abs() > PREVALENCE_SUM_TOL {
            return Err(Error::InvalidParams(format!(
                "p_x sums to {total}, expected 1"
            )));
        }

        let vectors: [(&str, &[f64]); 6] = [
            ("alpha.x", &self.alpha.x),
            ("alpha.xw", &self.alpha.xw),
            ("beta.x", &self.beta.x),
            ("beta.xv", &self.beta.xv),
            ("beta.xw", &self.beta.xw),
            ("p_x", &self.p_x),
        ];
        for (name, values) in vectors {
            if values.len() != n {
                return Err(Error::InvalidParams(format!(
                    "{name} has {} entries, expected {n}",
                    values.len()
                )));
            }
            if name != "p_x" && values[0] != 0.0 {
                return Err(Error::InvalidParams(format!(
                    "{name}[0] must be 0 for the reference level, got {}",
                    values[0]
                )));
            }
        }

        let scalars = [
            self.p_w,
            self.nu,
            self.alpha.intercept,
            self.alpha.w,
            self.beta.intercept,
            self.beta.v,
            self.beta.w,
            self.beta.vw,
            self.gamma.intercept,
            self.gamma.f,
            self.gamma.v,
            self.gamma.w,
            self.gamma.fv,
            self.gamma.fw,
            self.gamma.vw,
        ];
        let all_finite = scalars
            .iter()
            .chain(vectors.iter().flat_map(|(_, v)| v.iter()))
            .all(|v| v.is_finite());
        if !all_finite {
            return Err(Error::InvalidParams("non-finite coefficient".into()));
        }
        Ok(())
    }

    pub(crate) fn check_level(&self, level: usize) -> Result<()> {
        if level < self.n_levels() {
            Ok(())
        } else {
            Err(Error::LevelOutOfRange {
                level,
                n_levels: self.n_levels(),
            })
        }
    }

    /// `P(V=1 | X=x, W=w)`.
    ///
    /// Panics if `x` is not a valid level.
    pub fn p_v(&self, x: usize, w: bool) -> f64 {
        let a = &self.alpha;
        let w = ind(w);
        logistic(a.intercept + a.x[x] + a.w * w + a.xw[x] * w)
    }

    /// `P(F=1 | X=x, V=v, W=w)`.
    pub fn p_f(&self, x: usize, v: bool, w: bool) -> f64 {
        let b = &self.beta;
        let (v, w) = (ind(v), ind(w));
        logistic(
            b.intercept + b.x[x] + b.v * v + b.w * w + b.xv[x] * v + b.xw[x] * w + b.vw * v * w,
        )
    }

    /// `P(A=1 | F=f, V=v, W=w)`.
    pub fn p_a(&self, f: bool, v: bool, w: bool) -> f64 {
        let g = &self.gamma;
        let (f, v, w) = (ind(f), ind(v), ind(w));
        logistic(
            g.intercept + g.f * f + g.v * v + g.w * w + g.fv * f * v + g.fw * f * w + g.vw * v * w,
        )
    }

    /// `P(W = w)`.
    pub fn p_w_of(&self, w: bool) -> f64 {
        if w {
            self.p_w
        } else {
            1.0 - self.p_w
        }
    }

    /// Intercepts that center each linear predictor over a balanced design:
    /// every binary covariate at 1/2 and every exposure level at
    /// `1 / n_levels`. `nu` pushes the fault and severity logits down to
    /// make `F` and `A` rare; it enters the fault intercept with weight
    /// `1 / n_levels` and the severity intercept with weight 1/2.
    ///
    /// For two levels this is
    ///
    /// ```text
    /// alpha_0 = -(alpha_x + alpha_w + alpha_xw / 2) / 2
    /// beta_0  = -(beta_x + beta_v + beta_w + (beta_xv + beta_xw + beta_vw) / 2 + nu) / 2
    /// gamma_0 = -(gamma_f + gamma_v + gamma_w + (gamma_fv + gamma_fw + gamma_vw) / 2 + nu) / 2
    /// ```
    pub fn intercepts(&self) -> Intercepts {
        let n = self.n_levels() as f64;
        let mean = |v: &[f64]| v.iter().sum::<f64>() / n;
        let a = &self.alpha;
        let b = &self.beta;
        let g = &self.gamma;

        let alpha = -(mean(&a.x) + 0.5 * a.w + 0.5 * mean(&a.xw));
        let beta = -(mean(&b.x)
            + 0.5 * (b.v + b.w)
            + 0.5 * (mean(&b.xv) + mean(&b.xw))
            + 0.25 * b.vw
            + self.nu / n);
        let gamma = -0.5 * (g.f + g.v + g.w + 0.5 * (g.fv + g.fw + g.vw) + self.nu);
        Intercepts { alpha, beta, gamma }
    }

    /// Returns a copy with the three intercepts replaced by [`Self::intercepts`].
    /// Any intercept already present is ignored.
    pub fn calibrate(&self) -> Result<StructuralParams> {
        self.validate()?;
        let Intercepts { alpha, beta, gamma } = self.intercepts();
        let mut out = self.clone();
        out.alpha.intercept = alpha;
        out.beta.intercept = beta;
        out.gamma.intercept = gamma;
        Ok(out)
    }
}

/// One joint configuration of the model's nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeAssignment {
    pub w: bool,
    pub x: usize,
    pub v: bool,
    pub f: bool,
    pub a: bool,
}

impl NodeAssignment {
    /// Responsibility for a severe accident: `R = F * A`.
    pub fn r(&self) -> bool {
        self.f && self.a
    }

    /// Dense index in `0 .. cell_count(n_levels)`; `a` varies fastest,
    /// then `f`, `v`, `x`, `w`.
    pub fn index(&self, n_levels: usize) -> usize {
        let mut i = usize::from(self.w) * n_levels + self.x;
        i = i * 2 + usize::from(self.v);
        i = i * 2 + usize::from(self.f);
        i * 2 + usize::from(self.a)
    }

    /// Inverse of [`Self::index`].
    pub fn from_index(index: usize, n_levels: usize) -> Self {
        let a = index & 1 == 1;
        let f = (index >> 1) & 1 == 1;
        let v = (index >> 2) & 1 == 1;
        let rest = index >> 3;
        NodeAssignment {
            w: rest / n_levels == 1,
            x: rest % n_levels,
            v,
            f,
            a,
        }
    }

    /// Every assignment in index order.
    pub fn all(n_levels: usize) -> impl Iterator<Item = NodeAssignment> {
        (0..cell_count(n_levels)).map(move |i| NodeAssignment::from_index(i, n_levels))
    }
}

impl std::fmt::Display for NodeAssignment {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "w={} x={} v={} f={} a={}",
            u8::from(self.w),
            self.x,
            u8::from(self.v),
            u8::from(self.f),
            u8::from(self.a)
        )
    }
}

/// Number of joint cells over `(W, X, V, F, A)`.
pub fn cell_count(n_levels: usize) -> usize {
    2 * n_levels * 8
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binary() -> StructuralParams {
        StructuralParams::uniform(2)
    }

    #[test]
    fn logistic_values() {
        assert_eq!(logistic(0.0), 0.5);
        assert!((logistic(-2.5) - 0.07585818002124355).abs() < 1e-15);
        for z in [-30.0, -7.25, -1.0, 0.3, 4.0, 29.9] {
            assert!((logistic(z) + logistic(-z) - 1.0).abs() <= 1e-15);
        }
        assert!(logistic(-800.0) >= 0.0);
        assert!(logistic(800.0) <= 1.0);
    }

    #[test]
    fn speed_equation() {
        let mut p = binary();
        assert_eq!(p.p_v(1, true), 0.5);
        p.alpha.intercept = -0.5;
        p.alpha.x[1] = 1.0;
        assert!((p.p_v(1, false) - 0.6224593312018546).abs() < 1e-15);

        let without = p.p_v(1, false);
        p.alpha.xw[1] = 2.5;
        assert_eq!(p.p_v(1, false), without);
    }

    #[test]
    fn fault_equation() {
        let mut p = binary();
        assert_eq!(p.p_f(1, true, true), 0.5);
        p.beta.intercept = -6.5;
        assert!((p.p_f(0, false, false) - 1.5011822567369917e-3).abs() < 1e-16);

        let reference = p.p_f(0, true, true);
        p.beta.x[1] = 3.0;
        p.beta.xv[1] = -2.0;
        p.beta.xw[1] = 1.0;
        assert_eq!(p.p_f(0, true, true), reference);
    }

    #[test]
    fn severity_equation() {
        let mut p = binary();
        assert_eq!(p.p_a(true, true, true), 0.5);
        p.gamma.f = 4.0;
        p.gamma.v = 3.0;
        p.gamma.w = 1.0;
        let p = p.calibrate().unwrap();
        assert_eq!(p.gamma.intercept, -10.5);
        assert!((p.p_a(true, true, true) - logistic(-2.5)).abs() < 1e-15);
        assert_eq!(p.p_a(false, false, false), logistic(-10.5));
    }

    #[test]
    fn calibrate_binary() {
        let mut p = binary();
        p.alpha.x[1] = 1.0;
        let c = p.calibrate().unwrap();
        assert_eq!(c.alpha.intercept, -0.5);

        let mut p = binary();
        p.alpha.w = 3.0;
        assert_eq!(p.calibrate().unwrap().alpha.intercept, -1.5);

        let mut p = binary();
        p.beta.x[1] = 1.0;
        p.beta.v = 1.0;
        p.beta.w = 1.0;
        assert_eq!(p.calibrate().unwrap().beta.intercept, -8.0);
    }

    #[test]
    fn calibrate_matches_printed_five_level_display() {
        let mut p = StructuralParams::uniform(5);
        p.alpha.x = vec![0.0, 1.0, 0.8, 0.25, 0.2];
        p.alpha.w = 0.4;
        p.beta.x = vec![0.0, 1.0, 2.5, 3.5, 3.4];
        p.beta.v = 1.0;
        p.beta.w = 0.7;
        p.beta.vw = 0.3;
        p.gamma.f = 4.0;
        p.gamma.v = 3.0;
        let c = p.calibrate().unwrap();

        let sum_a: f64 = p.alpha.x.iter().sum();
        let sum_b: f64 = p.beta.x.iter().sum();
        let alpha0 = -(sum_a + 2.5 * p.alpha.w) / 5.0;
        let beta0 = -(sum_b + 2.5 * (p.beta.v + p.beta.w) + 1.25 * p.beta.vw + p.nu) / 5.0;
        assert!((c.alpha.intercept - alpha0).abs() < 1e-14);
        assert!((c.beta.intercept - beta0).abs() < 1e-14);
        assert_eq!(c.gamma.intercept, -0.5 * (4.0 + 3.0 + p.nu));
    }

    #[test]
    fn validation_rejects_bad_params() {
        let mut p = binary();
        p.p_x = vec![0.6, 0.6];
        assert!(matches!(p.validate(), Err(Error::InvalidParams(_))));

        let mut p = binary();
        p.alpha.x[0] = 0.1;
        assert!(p.validate().is_err());

        let mut p = binary();
        p.gamma.v = f64::NAN;
        assert!(p.validate().is_err());

        let mut p = binary();
        p.beta.xv.push(0.0);
        assert!(p.validate().is_err());

        let mut p = binary();
        p.p_w = 1.5;
        assert!(p.validate().is_err());

        assert!(StructuralParams::uniform(1).validate().is_err());
        assert!(StructuralParams::uniform(5).validate().is_ok());
    }

    #[test]
    fn assignment_index_round_trips() {
        for n in [2, 3, 5] {
            for (i, a) in NodeAssignment::all(n).enumerate() {
                assert_eq!(a.index(n), i);
                assert!(a.x < n);
            }
            assert_eq!(NodeAssignment::all(n).count(), cell_count(n));
        }
        let a = NodeAssignment {
            w: true,
            x: 1,
            v: false,
            f: true,
            a: true,
        };
        assert!(a.r());
        assert!(!NodeAssignment { a: false, ..a }.r());
        assert!(!NodeAssignment { f: false, ..a }.r());
    }
}
