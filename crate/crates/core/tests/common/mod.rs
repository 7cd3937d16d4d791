//! Independent brute-force oracle and random model strategies.
#![allow(dead_code)]

use proptest::prelude::*;
use selbias_core::StructuralParams;

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

fn b(x: bool) -> f64 {
    x as u8 as f64
}

/// Enumerates `(v, f, a)` under `do(X = x)` within `W = w` straight from the
/// coefficient fields and returns `(P(F_x = 1 | w), P(R_x = 1 | w))`.
pub fn intervened_fault_and_responsibility(p: &StructuralParams, x: usize, w: bool) -> (f64, f64) {
    let (mut fault, mut resp) = (0.0, 0.0);
    for v in [false, true] {
        let pv =
            sigmoid(p.alpha.intercept + p.alpha.x[x] + p.alpha.w * b(w) + p.alpha.xw[x] * b(w));
        let pv = if v { pv } else { 1.0 - pv };
        for f in [false, true] {
            let pf = sigmoid(
                p.beta.intercept
                    + p.beta.x[x]
                    + p.beta.v * b(v)
                    + p.beta.w * b(w)
                    + p.beta.xv[x] * b(v)
                    + p.beta.xw[x] * b(w)
                    + p.beta.vw * b(v) * b(w),
            );
            let pf = if f { pf } else { 1.0 - pf };
            for a in [false, true] {
                let g = &p.gamma;
                let pa = sigmoid(
                    g.intercept
                        + g.f * b(f)
                        + g.v * b(v)
                        + g.w * b(w)
                        + g.fv * b(f) * b(v)
                        + g.fw * b(f) * b(w)
                        + g.vw * b(v) * b(w),
                );
                let pa = if a { pa } else { 1.0 - pa };
                let mass = pv * pf * pa;
                if f {
                    fault += mass;
                }
                if f && a {
                    resp += mass;
                }
            }
        }
    }
    (fault, resp)
}

fn coef() -> impl Strategy<Value = f64> {
    -3.0..3.0f64
}

fn level_vec(n: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(coef(), n - 1).prop_map(|mut v| {
        v.insert(0, 0.0);
        v
    })
}

/// Calibrated random model with 2 to 5 exposure levels.
pub fn any_params() -> impl Strategy<Value = StructuralParams> {
    (2usize..=5)
        .prop_flat_map(|n| {
            (
                0.05..0.95f64,
                proptest::collection::vec(0.1..1.0f64, n),
                [
                    level_vec(n),
                    level_vec(n),
                    level_vec(n),
                    level_vec(n),
                    level_vec(n),
                ],
                proptest::array::uniform10(coef()),
                5.0..15.0f64,
            )
        })
        .prop_map(|(p_w, raw_px, [ax, axw, bx, bxv, bxw], s, nu)| {
            let n = raw_px.len();
            let total: f64 = raw_px.iter().sum();
            let mut p = StructuralParams::uniform(n);
            p.p_w = p_w;
            p.p_x = raw_px.iter().map(|q| q / total).collect();
            let drift: f64 = 1.0 - p.p_x.iter().sum::<f64>();
            p.p_x[0] += drift;
            p.alpha.x = ax;
            p.alpha.xw = axw;
            p.alpha.w = s[0];
            p.beta.x = bx;
            p.beta.xv = bxv;
            p.beta.xw = bxw;
            p.beta.v = s[1];
            p.beta.w = s[2];
            p.beta.vw = s[3];
            p.gamma.f = s[4];
            p.gamma.v = s[5];
            p.gamma.w = s[6];
            p.gamma.fv = s[7];
            p.gamma.fw = s[8];
            p.gamma.vw = s[9];
            p.nu = nu;
            p.calibrate().expect("strategy builds valid params")
        })
}

/// Random model with no speed-to-severity pathway.
pub fn no_speed_severity() -> impl Strategy<Value = StructuralParams> {
    any_params().prop_map(|mut p| {
        p.gamma.v = 0.0;
        p.gamma.fv = 0.0;
        p.gamma.vw = 0.0;
        p.calibrate().unwrap()
    })
}

/// Random model where the exposure has no descendants.
pub fn disconnected_exposure() -> impl Strategy<Value = StructuralParams> {
    any_params().prop_map(|mut p| {
        let n = p.n_levels();
        p.alpha.x = vec![0.0; n];
        p.alpha.xw = vec![0.0; n];
        p.beta.x = vec![0.0; n];
        p.beta.xv = vec![0.0; n];
        p.beta.xw = vec![0.0; n];
        p.calibrate().unwrap()
    })
}
