//! printf-style number formatting for the CSV and Matrix Market outputs.

fn split_exp(s: &str) -> (&str, i32) {
    let (m, e) = s.split_once('e').expect("exponent in {:e} output");
    (m, e.parse().expect("integer exponent"))
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn exp_suffix(e: i32) -> String {
    format!("e{}{:02}", if e < 0 { '-' } else { '+' }, e.abs())
}

fn non_finite(v: f64) -> Option<String> {
    if v.is_nan() {
        Some("nan".into())
    } else if v.is_infinite() {
        Some(if v > 0.0 { "inf" } else { "-inf" }.into())
    } else {
        None
    }
}

/// C `%.{prec}g`.
pub fn fmt_g(v: f64, prec: usize) -> String {
    if let Some(s) = non_finite(v) {
        return s;
    }
    let p = prec.max(1);
    if v == 0.0 {
        return if v.is_sign_negative() { "-0" } else { "0" }.into();
    }
    let s = format!("{:.*e}", p - 1, v);
    let (mant, exp) = split_exp(&s);
    if exp < -4 || exp >= p as i32 {
        format!("{}{}", trim_zeros(mant), exp_suffix(exp))
    } else {
        let fixed = format!("{:.*}", (p as i32 - 1 - exp) as usize, v);
        trim_zeros(&fixed).to_string()
    }
}

/// C `%.{prec}e`.
pub fn fmt_e(v: f64, prec: usize) -> String {
    if let Some(s) = non_finite(v) {
        return s;
    }
    let s = format!("{:.*e}", prec, v);
    let (mant, exp) = split_exp(&s);
    format!("{mant}{}", exp_suffix(exp))
}
