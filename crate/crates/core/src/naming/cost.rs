//! Bits a name costs on the wire under each naming scheme.

use crate::math::floor;

/// Average English word length used for the hierarchical baseline.
pub const MEAN_WORD_LENGTH: f64 = 4.5;
/// Bits per character of a plain-text name.
pub const BITS_PER_CHAR: f64 = 8.0;

#[derive(Debug, Clone, PartialEq)]
pub enum NamingScheme<'a> {
    /// Plain-text name of `chars` characters at `bits_per_char` each.
    /// Separators are not counted.
    Hierarchical { chars: f64, bits_per_char: f64 },
    /// `k` hashes of the whole name, `b` bits each.
    Standard { k: u32, b: u32 },
    /// `k_i` hashes per level, `b_ind[x]` bits each at level `x`.
    Iterated { k_i: u32, b_ind: &'a [u32] },
}

pub fn naming_bits(scheme: &NamingScheme<'_>) -> f64 {
    match *scheme {
        NamingScheme::Hierarchical {
            chars,
            bits_per_char,
        } => chars * bits_per_char,
        NamingScheme::Standard { k, b } => f64::from(k) * f64::from(b),
        NamingScheme::Iterated { k_i, b_ind } => {
            b_ind.iter().map(|&b| f64::from(k_i) * f64::from(b)).sum()
        }
    }
}

/// Largest `k` with `k * b <= c * b_c`.
pub fn max_standard_hashes(chars: f64, bits_per_char: f64, b: u32) -> u32 {
    floor(chars * bits_per_char / f64::from(b)) as u32
}

/// Largest `k_i` with `k_i * d * b_ind <= c * b_c`, for equal-width levels.
pub fn max_iterated_hashes(chars: f64, bits_per_char: f64, d: usize, b_ind: u32) -> u32 {
    floor(chars * bits_per_char / (d as f64 * f64::from(b_ind))) as u32
}
