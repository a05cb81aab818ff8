//! Memory presets and the three filter schemes compared throughout.

use std::fmt;
use std::str::FromStr;

use ifibf_core::filter::{design_standard, StandardBloomParams};
use ifibf_core::naming::{BITS_PER_CHAR, MEAN_WORD_LENGTH};

use crate::{Error, Result};

/// Levels of a hierarchical name in the comparison.
pub const HIERARCHICAL_LEVELS: usize = 4;

/// Bits of a plain-text four-level name: 4 x 4.5 chars x 8 bits.
pub fn hierarchical_name_bits() -> f64 {
    HIERARCHICAL_LEVELS as f64 * MEAN_WORD_LENGTH * BITS_PER_CHAR
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Preset {
    I,
    II,
    III,
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "I" | "1" => Ok(Preset::I),
            "II" | "2" => Ok(Preset::II),
            "III" | "3" => Ok(Preset::III),
            _ => Err(Error::Config(format!("unknown case {s:?}; expected I, II or III"))),
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Preset::I => "I",
            Preset::II => "II",
            Preset::III => "III",
        })
    }
}

/// Total memory `m` in bits, position width `b` and zero fraction `p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Case {
    pub label: &'static str,
    pub m: u64,
    pub b: u32,
    pub p: f64,
}

impl Case {
    pub fn preset(p: Preset) -> Self {
        let (label, log_m) = match p {
            Preset::I => ("I", 17),
            Preset::II => ("II", 32),
            Preset::III => ("III", 38),
        };
        Case {
            label,
            m: 1 << log_m,
            b: log_m,
            p: 0.5,
        }
    }

    /// Explicit memory; `b` defaults to the address width of `m`.
    pub fn custom(m: u64, b: Option<u32>, p: f64) -> Result<Self> {
        if m < 2 {
            return Err(Error::Config("m must be at least 2 bits".into()));
        }
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::Config("p must lie in (0, 1)".into()));
        }
        Ok(Case {
            label: "custom",
            m,
            b: b.unwrap_or(64 - (m - 1).leading_zeros()),
            p,
        })
    }

    pub fn standard(&self, k: u32) -> Result<StandardBloomParams> {
        Ok(design_standard(self.m, self.p, k)?)
    }

    /// Entries of a plain-text table of the same memory.
    pub fn hierarchical_capacity(&self) -> f64 {
        self.m as f64 / hierarchical_name_bits()
    }
}

/// A filter layout: `d` levels with `k_i` hashes each.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Scheme {
    pub d: usize,
    pub k_i: u32,
}

impl Scheme {
    pub fn new(d: usize, k_i: u32) -> Self {
        Scheme { d, k_i }
    }

    pub fn name(&self) -> String {
        if self.d == 1 {
            "SBF".to_owned()
        } else {
            format!("{}IBF", self.d)
        }
    }

    pub fn k_total(&self) -> u32 {
        self.k_i * self.d as u32
    }

    /// Position width of one level: `b - log2(d)`, rounding up for a
    /// non-power-of-two split.
    pub fn b_ind(&self, case: &Case) -> u32 {
        let shrink = usize::BITS - (self.d - 1).leading_zeros();
        case.b.saturating_sub(shrink)
    }

    /// The layouts with four hashes in total (f = 0.0625 at p = 0.5).
    pub fn four_hash_family() -> [Scheme; 3] {
        [Scheme::new(1, 4), Scheme::new(2, 2), Scheme::new(4, 1)]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets() {
        let c = Case::preset(Preset::I);
        assert_eq!((c.m, c.b, c.p), (131_072, 17, 0.5));
        assert_eq!(Case::preset(Preset::III).m, 1 << 38);
        assert_eq!("ii".parse::<Preset>().unwrap(), Preset::II);
        assert!("IV".parse::<Preset>().is_err());
        assert_eq!(Case::custom(1000, None, 0.5).unwrap().b, 10);
        assert_eq!(Case::custom(1024, None, 0.5).unwrap().b, 10);
    }

    #[test]
    fn position_widths() {
        let c = Case::preset(Preset::I);
        let widths: Vec<u32> = Scheme::four_hash_family().iter().map(|s| s.b_ind(&c)).collect();
        assert_eq!(widths, [17, 16, 15]);
        assert_eq!(Scheme::new(4, 1).name(), "4IBF");
        assert_eq!(hierarchical_name_bits(), 144.0);
    }
}
