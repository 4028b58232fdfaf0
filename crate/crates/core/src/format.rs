//! Fixed significant-digit number formatting for tables and reports.

/// Significant digits used by every numeric output.
pub const OUTPUT_DIGITS: usize = 12;

/// Formats `x` with exactly `digits` significant digits, in plain decimal
/// notation when the exponent lies in `[-6, 15)` and scientific otherwise.
pub fn fmt_sig(x: f64, digits: usize) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let digits = digits.max(1);
    if x == 0.0 {
        return if digits == 1 {
            "0".into()
        } else {
            format!("0.{}", "0".repeat(digits - 1))
        };
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-6..15).contains(&exp) {
        return format!("{mantissa}e{exp}");
    }
    let (sign, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => ("-", m),
        None => ("", mantissa),
    };
    let raw: String = mantissa.chars().filter(|c| *c != '.').collect();
    let body = if exp < 0 {
        format!("0.{}{}", "0".repeat((-exp - 1) as usize), raw)
    } else {
        let point = exp as usize + 1;
        if point >= raw.len() {
            format!("{}{}", raw, "0".repeat(point - raw.len()))
        } else {
            format!("{}.{}", &raw[..point], &raw[point..])
        }
    };
    format!("{sign}{body}")
}

pub fn fmt_out(x: f64) -> String {
    fmt_sig(x, OUTPUT_DIGITS)
}

/// `x` rounded to `digits` significant digits.
pub fn round_sig(x: f64, digits: usize) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", digits.max(1) - 1, x)
        .parse()
        .expect("round trip of formatted float")
}
