//! Number formatting for output files.

/// Shortest decimal string that parses back to exactly `v`.
///
/// Plain notation is used for magnitudes in `[1e-5, 1e16)`, scientific
/// notation otherwise, so very large or small values stay compact.
pub fn num(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || (1e-5..1e16).contains(&a) || !v.is_finite() {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips() {
        for v in [
            0.0,
            1.0,
            -2.5,
            0.1,
            1.0 / 3.0,
            1e-7,
            6.02e23,
            f64::MIN_POSITIVE,
            5e-324,
            f64::MAX,
            -1e-300,
        ] {
            let s = num(v);
            assert_eq!(s.parse::<f64>().unwrap(), v, "{s}");
        }
        assert_eq!(num(0.5), "0.5");
        assert_eq!(num(1.0), "1");
        assert_eq!(num(1e-7), "1e-7");
        assert_eq!(num(0.36787944117144233), "0.36787944117144233");
    }
}
