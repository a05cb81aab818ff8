use alloc::vec::Vec;

use crate::math::{ceil_tolerant, exp, floor, ln, powf, powi, round};
use crate::{Error, FilterGeometry, Result};

/// Parameters of a standard Bloom filter designed for a fixed `p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StandardBloomParams {
    /// Bit positions.
    pub m: u64,
    /// Design capacity, rounded down to whole elements.
    pub n: u64,
    /// Hash functions.
    pub k: u32,
    /// Probability that a bit is still zero after `capacity` inserts.
    pub p: f64,
    /// False-positive probability at design load.
    pub f: f64,
    /// Unrounded capacity `-m ln(p) / k`; `p = exp(-k * capacity / m)` holds exactly for it.
    pub capacity: f64,
}

impl StandardBloomParams {
    pub fn bits_per_position(&self) -> u32 {
        crate::math::address_bits(self.m)
    }
}

/// Designs a standard Bloom filter of `m` bits and `k` hashes that keeps a
/// fraction `p` of bits at zero when full.
pub fn design_standard(m: u64, p: f64, k: u32) -> Result<StandardBloomParams> {
    if m == 0 {
        return Err(Error::invalid("m", "must be at least one bit"));
    }
    check_probability("p", p)?;
    if k == 0 {
        return Err(Error::invalid("k", "must be at least one hash"));
    }
    let capacity = -(m as f64) * ln(p) / f64::from(k);
    Ok(StandardBloomParams {
        m,
        n: floor(capacity) as u64,
        k,
        p,
        f: powi(1.0 - p, k),
        capacity,
    })
}

fn check_probability(name: &'static str, p: f64) -> Result<()> {
    if p.is_finite() && p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::invalid(name, alloc::format!("{p} is outside (0, 1)")))
    }
}

/// Design of one level of an iterated filter.
///
/// `n_ind` is the element count the level was dimensioned for and `n_prime`
/// the count actually expected once repeated fields are removed. `f_ind` is
/// always evaluated at `n_prime`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelDesign {
    /// Zero-based level index.
    pub level: usize,
    pub n_ind: f64,
    pub n_prime: f64,
    pub p_ind: f64,
    pub k_ind: u32,
    pub m_ind: u64,
    pub f_ind: f64,
}

impl LevelDesign {
    pub fn new(level: usize, n_ind: f64, n_prime: f64, k_ind: u32, m_ind: u64) -> Result<Self> {
        if m_ind == 0 {
            return Err(Error::invalid("m_ind", "must be at least one bit"));
        }
        if k_ind == 0 {
            return Err(Error::invalid("k_ind", "must be at least one hash"));
        }
        if !(n_ind >= 0.0 && n_prime >= 0.0) {
            return Err(Error::invalid("n", "element counts must be non-negative"));
        }
        if n_prime > n_ind {
            return Err(Error::invalid("n_prime", "exceeds n_ind"));
        }
        let m = m_ind as f64;
        let k = f64::from(k_ind);
        Ok(LevelDesign {
            level,
            n_ind,
            n_prime,
            p_ind: exp(-k * n_ind / m),
            k_ind,
            m_ind,
            f_ind: fpr(m, k, n_prime),
        })
    }

    /// Same design with a fraction `repetition` of the elements repeated, so
    /// only `(1 - repetition) * n_ind` distinct elements reach this level.
    pub fn with_repetition(&self, repetition: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&repetition) {
            return Err(Error::invalid("repetition", "must lie in [0, 1]"));
        }
        Self::new(
            self.level,
            self.n_ind,
            (1.0 - repetition) * self.n_ind,
            self.k_ind,
            self.m_ind,
        )
    }

    pub fn with_distinct(&self, n_prime: f64) -> Result<Self> {
        Self::new(self.level, self.n_ind, n_prime, self.k_ind, self.m_ind)
    }

    /// Bits needed to address one of `m_ind` positions.
    pub fn address_bits(&self) -> u32 {
        crate::math::address_bits(self.m_ind)
    }
}

fn fpr(m: f64, k: f64, n: f64) -> f64 {
    powf(1.0 - exp(-k * n / m), k)
}

/// Anything with an analytic false-positive rate as a function of load.
pub trait FprModel {
    /// `(1 - exp(-k n / m))^k` evaluated at `n_actual` inserted elements.
    fn effective_fpr(&self, n_actual: f64) -> f64;
}

impl FprModel for StandardBloomParams {
    fn effective_fpr(&self, n_actual: f64) -> f64 {
        fpr(self.m as f64, f64::from(self.k), n_actual.max(0.0))
    }
}

impl FprModel for LevelDesign {
    fn effective_fpr(&self, n_actual: f64) -> f64 {
        fpr(self.m_ind as f64, f64::from(self.k_ind), n_actual.max(0.0))
    }
}

pub fn effective_fpr<M: FprModel + ?Sized>(model: &M, n_actual: f64) -> f64 {
    model.effective_fpr(n_actual)
}

/// Overall false-positive rate of a stack: product of the per-level `f_ind`.
pub fn overall_fpr(levels: &[LevelDesign]) -> f64 {
    levels.iter().map(|l| l.f_ind).product()
}

/// Splits a standard design into `d` equal levels.
pub fn split_to_iterated(
    std: &StandardBloomParams,
    d: usize,
) -> Result<(FilterGeometry, Vec<LevelDesign>)> {
    if d == 0 {
        return Err(Error::invalid("d", "must be at least one level"));
    }
    let d32 = u32::try_from(d).map_err(|_| Error::invalid("d", "too many levels"))?;
    if !std.k.is_multiple_of(d32) {
        return Err(Error::NonIntegerHashCount { k: std.k, d });
    }
    if std.m < d as u64 {
        return Err(Error::invalid("m", "fewer bits than levels"));
    }
    let m_ind = std.m / d as u64;
    let k_i = std.k / d32;
    let geometry = FilterGeometry::with_default_seeds(alloc::vec![m_ind; d], k_i)?;
    let levels = (0..d)
        .map(|x| {
            let mut level = LevelDesign::new(x, std.capacity, std.capacity, k_i, m_ind)?;
            // The split holds p fixed; report it rather than the value implied
            // by the rounded m_ind.
            level.p_ind = std.p;
            level.f_ind = powi(1.0 - std.p, k_i);
            Ok(level)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((geometry, levels))
}

/// Strategy I: shrink the level to `m * n' / n` bits, keeping `k` and `p`,
/// so the false-positive rate at `n'` matches the original at `n`.
pub fn strategy_one_shrink(level: &LevelDesign) -> Result<LevelDesign> {
    if level.n_ind <= 0.0 {
        return Err(Error::UndefinedRatio("n_ind is zero"));
    }
    if level.n_prime == level.n_ind {
        return LevelDesign::new(level.level, level.n_prime, level.n_prime, level.k_ind, level.m_ind);
    }
    let m = ceil_tolerant(level.m_ind as f64 * level.n_prime / level.n_ind).max(1.0) as u64;
    LevelDesign::new(level.level, level.n_prime, level.n_prime, level.k_ind, m)
}

/// Result of Strategy II, keeping both the whole-hash design and the ideal one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rehashed {
    /// Design with `k'` rounded to the nearest whole hash (at least one).
    /// Its `f_ind` is evaluated at `n'` with the rounded hash count.
    pub design: LevelDesign,
    /// `-(m / n') ln p` before rounding.
    pub ideal_k: f64,
    /// `(1 - p)^ideal_k`.
    pub ideal_f: f64,
    /// `(1 - p)^k'` for the rounded `k'`.
    pub rounded_f: f64,
}

/// Strategy II: keep `m`, raise the hash count to `-(m / n') ln p` so that
/// the level reaches the same `p` with fewer distinct elements.
pub fn strategy_two_rehash(level: &LevelDesign) -> Result<Rehashed> {
    if level.n_prime <= 0.0 {
        return Err(Error::UndefinedRatio("n_prime is zero"));
    }
    let p = level.p_ind;
    check_probability("p_ind", p)?;
    let ideal_k = -(level.m_ind as f64) / level.n_prime * ln(p);
    let k = round(ideal_k).max(1.0);
    if k > f64::from(u32::MAX) {
        return Err(Error::invalid("k", "rehash count overflows"));
    }
    let k = k as u32;
    let design = LevelDesign::new(level.level, level.n_prime, level.n_prime, k, level.m_ind)?;
    Ok(Rehashed {
        design,
        ideal_k,
        ideal_f: powf(1.0 - p, ideal_k),
        rounded_f: powi(1.0 - p, k),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const CASE_I_M: u64 = 1 << 17;

    #[test]
    fn case_one_capacity_and_fpr() {
        let std = design_standard(CASE_I_M, 0.5, 4).unwrap();
        assert_eq!(std.n, 22713);
        assert_eq!(std.f, 0.0625);
        assert!((exp(-4.0 * std.capacity / CASE_I_M as f64) - 0.5).abs() < 1e-12);
        assert_eq!(design_standard(CASE_I_M, 0.5, 1).unwrap().f, 0.5);
    }

    #[test]
    fn case_three_capacity_is_evaluated_analytically() {
        let std = design_standard(1 << 38, 0.5, 4).unwrap();
        let expected = 4.7634e10;
        assert!((std.capacity - expected).abs() / expected < 1e-4, "{}", std.capacity);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(design_standard(0, 0.5, 4), Err(Error::InvalidParameter { .. })));
        assert!(design_standard(10, 0.0, 4).is_err());
        assert!(design_standard(10, 1.0, 4).is_err());
        assert!(design_standard(10, f64::NAN, 4).is_err());
        assert!(design_standard(10, 0.5, 0).is_err());
    }

    #[test]
    fn split_keeps_overall_fpr() {
        let std = design_standard(CASE_I_M, 0.5, 4).unwrap();
        let (geo, levels) = split_to_iterated(&std, 4).unwrap();
        assert_eq!(geo.depth(), 4);
        assert_eq!(geo.hashes(), 1);
        assert!(levels.iter().all(|l| l.m_ind == 32768 && l.k_ind == 1));
        assert!((overall_fpr(&levels) - 0.0625).abs() < 1e-12);

        let (_, two) = split_to_iterated(&std, 2).unwrap();
        assert_eq!(two[0].k_ind, 2);
        assert!((two[0].f_ind - 0.25).abs() < 1e-12);
        assert!((overall_fpr(&two) - 0.0625).abs() < 1e-12);

        let (geo1, one) = split_to_iterated(&std, 1).unwrap();
        assert_eq!(geo1.level_size(0), CASE_I_M);
        assert_eq!(one[0].k_ind, 4);
        assert_eq!(one[0].f_ind, std.f);
    }

    #[test]
    fn split_requires_divisible_hash_count() {
        let std = design_standard(CASE_I_M, 0.5, 4).unwrap();
        assert_eq!(
            split_to_iterated(&std, 3).unwrap_err(),
            Error::NonIntegerHashCount { k: 4, d: 3 }
        );
    }

    #[test]
    fn effective_fpr_of_standard_with_repetitions() {
        let std = design_standard(CASE_I_M, 0.5, 4).unwrap();
        let f = effective_fpr(&std, 0.95 * std.n as f64);
        assert!((f - 0.0541).abs() < 5e-4, "{f}");
        assert_eq!(effective_fpr(&std, 0.0), 0.0);
    }

    #[test]
    fn effective_fpr_four_levels_table_profile() {
        let std = design_standard(CASE_I_M, 0.5, 4).unwrap();
        let (_, levels) = split_to_iterated(&std, 4).unwrap();
        let reps = [0.50, 0.25, 0.10, 0.05];
        let expected = [0.2929, 0.4054, 0.4641, 0.4824];
        let repeated: Vec<_> = levels
            .iter()
            .zip(reps)
            .map(|(l, r)| l.with_repetition(r).unwrap())
            .collect();
        for (l, e) in repeated.iter().zip(expected) {
            assert!((l.f_ind - e).abs() < 5e-4, "{} vs {e}", l.f_ind);
        }
        assert!((overall_fpr(&repeated) - 0.0266).abs() < 5e-4);
    }

    #[test]
    fn shrink_case_one_level() {
        let level = LevelDesign::new(0, 22713.0, 11356.0, 1, 32768).unwrap();
        let shrunk = strategy_one_shrink(&level).unwrap();
        assert!((shrunk.m_ind as i64 - 16384).abs() <= 1, "{}", shrunk.m_ind);
        assert_eq!(shrunk.k_ind, 1);

        let same = LevelDesign::new(0, 22713.0, 22713.0, 1, 32768).unwrap();
        assert_eq!(strategy_one_shrink(&same).unwrap().m_ind, 32768);

        let empty = LevelDesign::new(0, 0.0, 0.0, 1, 32768).unwrap();
        assert!(matches!(strategy_one_shrink(&empty), Err(Error::UndefinedRatio(_))));
    }

    #[test]
    fn rehash_case_one_level() {
        let level = LevelDesign::new(0, 22713.0, 11356.0, 1, 32768).unwrap();
        let mut level = level;
        level.p_ind = 0.5;
        let r = strategy_two_rehash(&level).unwrap();
        assert_eq!(r.design.k_ind, 2);
        assert_eq!(r.design.m_ind, 32768);
        assert_eq!(r.rounded_f, 0.25);

        let none = LevelDesign::new(0, 100.0, 0.0, 1, 1000).unwrap();
        assert!(strategy_two_rehash(&none).is_err());
    }

    #[test]
    fn rehash_without_repetition_is_identity() {
        let std = design_standard(CASE_I_M, 0.5, 4).unwrap();
        let (_, levels) = split_to_iterated(&std, 2).unwrap();
        let r = strategy_two_rehash(&levels[0]).unwrap();
        assert_eq!(r.design.k_ind, 2);
        assert!((r.rounded_f - levels[0].f_ind).abs() < 1e-12);
    }

    #[test]
    fn rehash_four_levels_halved_load() {
        let std = design_standard(CASE_I_M, 0.5, 4).unwrap();
        let (_, levels) = split_to_iterated(&std, 4).unwrap();
        let rehashed: Vec<_> = levels
            .iter()
            .map(|l| strategy_two_rehash(&l.with_distinct(l.n_ind / 2.0).unwrap()).unwrap())
            .collect();
        assert!(rehashed.iter().all(|r| r.design.k_ind == 2));
        let overall: f64 = rehashed.iter().map(|r| r.design.f_ind).product();
        assert!((overall - 0.5f64.powi(8)).abs() < 1e-12, "{overall}");
    }

    #[test]
    fn level_design_rejects_inconsistent_counts() {
        assert!(LevelDesign::new(0, 10.0, 11.0, 1, 100).is_err());
        assert!(LevelDesign::new(0, -1.0, -1.0, 1, 100).is_err());
        assert!(LevelDesign::new(0, 10.0, 10.0, 0, 100).is_err());
    }
}
