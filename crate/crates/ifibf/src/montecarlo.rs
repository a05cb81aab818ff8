//! Empirical false-positive rates of filled filters.

use ifibf_core::naming::ChainState;
use ifibf_core::{FilterGeometry, IteratedBloomFilter};
use rand::Rng;

use crate::{Error, Result};

/// `hits` successes out of `trials`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Proportion {
    pub hits: u64,
    pub trials: u64,
}

impl Proportion {
    pub fn rate(&self) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            self.hits as f64 / self.trials as f64
        }
    }

    /// Binomial standard deviation of the rate if the true value is `p`.
    pub fn sigma_at(&self, p: f64) -> f64 {
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }

    /// Wilson score interval at normal quantile `z`.
    pub fn wilson(&self, z: f64) -> (f64, f64) {
        if self.trials == 0 {
            return (0.0, 1.0);
        }
        let n = self.trials as f64;
        let p = self.rate();
        let z2 = z * z;
        let centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
        let half = z / (1.0 + z2 / n) * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
        ((centre - half).max(0.0), (centre + half).min(1.0))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevelRates {
    /// Fresh elements found at each level on their own.
    pub levels: Vec<Proportion>,
    /// Fresh names found at every level.
    pub overall: Proportion,
    /// Set bits per level after filling.
    pub ones: Vec<u64>,
}

fn level_positions(state: &ChainState, m: u64) -> Vec<u64> {
    state.digests().iter().map(|d| d % m).collect()
}

/// Fills a filter with a name tree holding `distinct[x]` different prefixes
/// at level `x`, then queries `trials` fresh names.
///
/// Prefix `j` at level `x` hangs under prefix `j mod distinct[x - 1]`, so the
/// counts must be non-decreasing.
pub fn level_rates<R: Rng>(geometry: &FilterGeometry, distinct: &[u64], trials: u64, rng: &mut R) -> Result<LevelRates> {
    let d = geometry.depth();
    if distinct.len() != d {
        return Err(Error::Config(format!("{} level counts for {d} levels", distinct.len())));
    }
    if distinct[0] == 0 || distinct.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Config("level counts must be positive and non-decreasing".into()));
    }
    let seeds = geometry.seeds();
    let mut filter = IteratedBloomFilter::new(geometry.clone());
    let mut parents: Vec<ChainState> = Vec::new();
    for (x, &count) in distinct.iter().enumerate() {
        let m = geometry.level_size(x);
        let mut states = Vec::with_capacity(count as usize);
        for j in 0..count {
            let field = format!("{x}.{j}");
            let state = if x == 0 {
                ChainState::start(seeds, &field)
            } else {
                let mut s = parents[(j % parents.len() as u64) as usize].clone();
                s.absorb(&field);
                s
            };
            filter.insert_level(x, &level_positions(&state, m))?;
            states.push(state);
        }
        parents = states;
    }

    let mut levels = vec![Proportion { hits: 0, trials }; d];
    let mut overall = Proportion { hits: 0, trials };
    for _ in 0..trials {
        let mut all = true;
        let mut state: Option<ChainState> = None;
        for (x, level) in levels.iter_mut().enumerate() {
            let field: String = std::iter::once('q')
                .chain((0..12).map(|_| rng.random_range(b'a'..=b'z') as char))
                .collect();
            let s = match state.as_mut() {
                None => state.insert(ChainState::start(seeds, &field)),
                Some(s) => {
                    s.absorb(&field);
                    s
                }
            };
            if filter.level_contains(x, &level_positions(s, geometry.level_size(x)))? {
                level.hits += 1;
            } else {
                all = false;
            }
        }
        overall.hits += u64::from(all);
    }
    Ok(LevelRates {
        levels,
        overall,
        ones: (0..d).map(|x| filter.ones(x)).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn wilson_interval_contains_the_rate() {
        let p = Proportion { hits: 30, trials: 100 };
        let (lo, hi) = p.wilson(1.96);
        assert!(lo < 0.3 && 0.3 < hi);
        assert!((lo - 0.2189).abs() < 1e-3 && (hi - 0.3958).abs() < 1e-3);
        assert_eq!(Proportion::default().wilson(1.96), (0.0, 1.0));
    }

    #[test]
    fn empty_levels_never_match() {
        let g = FilterGeometry::uniform(2, 1 << 10, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let r = level_rates(&g, &[1, 1], 1000, &mut rng).unwrap();
        assert!(r.levels[0].hits < 10);
        assert_eq!(r.ones, [1, 1]);
        assert!(level_rates(&g, &[2, 1], 10, &mut rng).is_err());
        assert!(level_rates(&g, &[1], 10, &mut rng).is_err());
    }

    #[test]
    fn nested_counts_fill_each_level() {
        let g = FilterGeometry::uniform(3, 1 << 20, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let r = level_rates(&g, &[10, 40, 40], 10, &mut rng).unwrap();
        assert_eq!(r.ones, [10, 40, 40]);
    }
}
