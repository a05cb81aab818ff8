//! Thin wrappers so the rest of the crate reads like ordinary float code
//! without `std`.

#[inline]
pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}

#[inline]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

#[inline]
pub fn powi(x: f64, n: u32) -> f64 {
    libm::pow(x, f64::from(n))
}

#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub fn floor(x: f64) -> f64 {
    libm::floor(x)
}

#[inline]
pub fn round(x: f64) -> f64 {
    libm::round(x)
}

/// Ceiling that ignores floating-point noise just above an integer.
#[inline]
pub fn ceil_tolerant(x: f64) -> f64 {
    let r = libm::round(x);
    if (x - r).abs() <= 1e-9 * r.abs().max(1.0) {
        r
    } else {
        libm::ceil(x)
    }
}

/// Number of bits needed to address `m` positions.
#[inline]
pub fn address_bits(m: u64) -> u32 {
    if m <= 1 {
        0
    } else {
        64 - (m - 1).leading_zeros()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn address_bits_matches_ceil_log2() {
        assert_eq!(address_bits(2), 1);
        assert_eq!(address_bits(3), 2);
        assert_eq!(address_bits(32768), 15);
        assert_eq!(address_bits(32769), 16);
        assert_eq!(address_bits(1 << 17), 17);
        assert_eq!(address_bits(1 << 38), 38);
    }

    #[test]
    fn tolerant_ceil() {
        assert_eq!(ceil_tolerant(16_384.000_000_000_1), 16384.0);
        assert_eq!(ceil_tolerant(16383.28), 16384.0);
        assert_eq!(ceil_tolerant(119.6), 120.0);
    }
}
