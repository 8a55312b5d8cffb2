//! `%.12g`-style float rendering for byte-stable CSV output.

/// Significant digits used in every CSV field.
pub const DIGITS: usize = 12;

/// Shortest `%.{digits}g` rendering: fixed notation for exponents in
/// `[-4, digits)`, scientific otherwise, trailing zeros removed.
pub fn sig(x: f64, digits: usize) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.into();
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mant, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim(mant), exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp) as usize;
        trim(&format!("{x:.decimals$}")).to_string()
    }
}

pub fn g12(x: f64) -> String {
    sig(x, DIGITS)
}

fn trim(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_printf_g() {
        assert_eq!(g12(0.0), "0");
        assert_eq!(g12(1.0), "1");
        assert_eq!(g12(-2.5), "-2.5");
        assert_eq!(g12(0.1), "0.1");
        assert_eq!(g12(1.0 / 3.0), "0.333333333333");
        assert_eq!(g12(2.0 / 3.0 * 1e-5), "6.66666666667e-06");
        assert_eq!(g12(1e-4), "0.0001");
        assert_eq!(g12(123456789012.0), "123456789012");
        assert_eq!(g12(1234567890123.0), "1.23456789012e+12");
        assert_eq!(g12(1e100), "1e+100");
        assert_eq!(g12(0.467355827), "0.467355827");
        assert_eq!(g12(f64::INFINITY), "inf");
    }

    #[test]
    fn rounding_carries_into_exponent() {
        assert_eq!(g12(9.9999999999996), "10");
        assert_eq!(g12(99999.99999999999), "100000");
    }
}
