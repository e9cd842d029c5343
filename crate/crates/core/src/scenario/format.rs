/// `%.9g`-style rendering: nine significant digits, trailing zeros stripped,
/// scientific notation outside `1e-4 <= |x| < 1e9`.
pub fn format_g(x: f64) -> String {
    if x.is_nan() {
        return "NaN".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0" } else { "0" }.to_string();
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..9).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        strip_zeros(&format!("{x:.decimals$}"))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", strip_zeros(mantissa), exp.abs())
    }
}

fn strip_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::format_g;

    #[test]
    fn matches_printf_g() {
        let cases = [
            (1.0, "1"),
            (0.5, "0.5"),
            (-2.25, "-2.25"),
            (123456789.0, "123456789"),
            (1234567890.0, "1.23456789e+09"),
            (0.0001, "0.0001"),
            (0.00001, "1e-05"),
            (1.0 / 3.0, "0.333333333"),
            (2.0 / 3.0 * 1e-12, "6.66666667e-13"),
            (4.36e-15, "4.36e-15"),
            (99999.99999, "100000"),
            (99999.9999, "99999.9999"),
            (9.999999999e8, "1e+09"),
            (0.0, "0"),
            (1e100, "1e+100"),
        ];
        for (x, want) in cases {
            assert_eq!(format_g(x), want, "{x:e}");
        }
    }

    #[test]
    fn nine_digits_round_trip() {
        for x in [
            std::f64::consts::PI,
            6.02214076e23,
            1.602e-19,
            0.1 + 0.2,
            750.123456789,
        ] {
            let y: f64 = format_g(x).parse().unwrap();
            assert!(((y - x) / x).abs() < 1e-8);
            assert_eq!(format_g(y), format_g(x));
        }
    }
}
