//! Number formatting and the sweep CSV writer.

use std::fmt::Write as _;

use selbias_core::SweepRow;

pub const CSV_HEADER: &str = "scenario,level,w,alpha_X,gamma_V,alpha_W,alpha_XW,beta_XV,\
log_cor_xr,log_cor_xf,log_or_xr_a1,rr_paper_f1,p_V,p_F,p_A,flag";

/// Significant digits of every CSV number.
pub const CSV_DIGITS: usize = 10;

/// `x` rounded to `digits` significant digits, trailing zeros removed.
/// Plain decimal notation for magnitudes in `[1e-5, 1e10)`, otherwise
/// `<mantissa>e<exponent>`. Zero (of either sign) prints as `0`.
pub fn format_sig(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent in `{:e}` output");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..10).contains(&exp) {
        return format!("{}e{exp}", trim_zeros(mantissa));
    }
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Fixed-point with `precision` decimals, never printing a negative zero.
pub fn format_fixed(x: f64, precision: usize) -> String {
    let s = format!("{x:.precision$}");
    match s.strip_prefix('-') {
        Some(rest) if rest.bytes().all(|b| b == b'0' || b == b'.') => rest.to_string(),
        _ => s,
    }
}

pub fn row_flag(row: &SweepRow) -> &'static str {
    match &row.effects {
        None => "degenerate",
        Some(e) if e.sign_reversal() => "sign_reversal",
        Some(_) => "ok",
    }
}

/// Renders rows as CSV with a header line and `\n` line endings.
pub fn write_csv(rows: &[SweepRow]) -> String {
    let num = |x: f64| format_sig(x, CSV_DIGITS);
    let mut out = String::with_capacity(160 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for row in rows {
        let logs = match &row.effects {
            Some(e) => [e.log_cor_xr, e.log_cor_xf, e.log_or_xr_a1].map(num),
            None => Default::default(),
        };
        let fields = [
            row.scenario.clone(),
            row.level.to_string(),
            u8::from(row.w).to_string(),
            num(row.alpha_x),
            num(row.gamma_v),
            num(row.alpha_w),
            num(row.alpha_xw),
            num(row.beta_xv),
            logs[0].clone(),
            logs[1].clone(),
            logs[2].clone(),
            num(row.rr_paper_f1),
            num(row.prevalences.v),
            num(row.prevalences.f),
            num(row.prevalences.a),
            row_flag(row).to_string(),
        ];
        let _ = writeln!(out, "{}", fields.join(","));
    }
    out
}
