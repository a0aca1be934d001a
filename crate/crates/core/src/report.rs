//! CSV output helpers.

use std::fmt::Write as _;

/// Formats `x` with 12 significant digits, dropping trailing zeros.
pub fn fmt_sig(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return "0".into();
    }
    let exp = x.abs().log10().floor() as i32;
    if !(-5..15).contains(&exp) {
        return format!("{x:.11e}");
    }
    let decimals = (11 - exp).max(0) as usize;
    let s = format!("{x:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// Renders a header line plus rows as CSV text with a trailing newline.
pub fn csv_text<I>(header: &str, rows: I) -> String
where
    I: IntoIterator<Item = String>,
{
    let mut out = String::new();
    writeln!(out, "{header}").expect("writing to a String");
    for row in rows {
        writeln!(out, "{row}").expect("writing to a String");
    }
    out
}
