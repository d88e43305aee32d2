//! Unit conversion and fixed-precision number formatting for exports.

/// Multiply nats by this to get bits.
pub const BITS: f64 = std::f64::consts::LOG2_E;

#[inline]
pub fn to_bits(nats: f64) -> f64 {
    nats * BITS
}

#[inline]
pub fn from_bits(bits: f64) -> f64 {
    bits / BITS
}

/// Six decimals; exact ties round half to even, and negative zero prints as zero.
pub fn fixed6(x: f64) -> String {
    let s = format!("{x:.6}");
    if s.starts_with('-') && s[1..].bytes().all(|b| b == b'0' || b == b'.') {
        s[1..].to_string()
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_decimals() {
        assert_eq!(fixed6(2.0 / 3.0), "0.666667");
        assert_eq!(fixed6(1.0), "1.000000");
        assert_eq!(fixed6(-1e-9), "0.000000");
        assert_eq!(fixed6(-0.5), "-0.500000");
        // 0.0000125 is not exactly representable; the exact tie 0.5 is.
        assert_eq!(format!("{:.0}", 0.5), "0");
        assert_eq!(format!("{:.0}", 1.5), "2");
    }

    #[test]
    fn bit_conversion() {
        assert!((to_bits(std::f64::consts::LN_2) - 1.0).abs() < 1e-15);
        assert!((from_bits(1.0) - std::f64::consts::LN_2).abs() < 1e-15);
    }
}
