//! Per-level element counts from observed request streams.
//!
//! Each structure key (a whole name, or a name prefix at a given level) gets a
//! conjugate Gaussian posterior over its per-epoch count, assuming a known
//! likelihood variance:
//!
//! ```text
//! var_n = (n / sigma2 + 1 / var_0)^-1
//! mu_n  = var_n * (mu_0 / var_0 + n * xbar / sigma2)
//! ```
//!
//! Two ways of turning those into per-level counts are provided.
//! [`Method::WholeName`] estimates every full name and then adds the
//! distributions of all names sharing a prefix at each level, so variances
//! add up. [`Method::PerField`] estimates every `(level, prefix)` key
//! directly from its own observations.
//!
//! A level total is `sum(mu) + z * sqrt(sum(var))` over the keys at that level,
//! clamped at zero.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::filter::LevelDesign;
use crate::math::{ceil_tolerant, ln, sqrt};
use crate::{Error, HierarchicalName, Result};

/// Normal posterior over a per-epoch count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianPosterior {
    pub mu_n: f64,
    pub var_n: f64,
    pub prior_mu: f64,
    pub prior_var: f64,
    /// Likelihood variance of the most recent update.
    pub likelihood_var: Option<f64>,
    /// Observations absorbed so far.
    pub obs_count: u64,
}

impl GaussianPosterior {
    pub fn prior(mu_0: f64, var_0: f64) -> Result<Self> {
        if !(var_0 > 0.0 && var_0.is_finite()) {
            return Err(Error::invalid("var_0", "prior variance must be positive"));
        }
        Ok(GaussianPosterior {
            mu_n: mu_0,
            var_n: var_0,
            prior_mu: mu_0,
            prior_var: var_0,
            likelihood_var: None,
            obs_count: 0,
        })
    }

    /// Standard deviation of the posterior.
    pub fn sigma(&self) -> f64 {
        sqrt(self.var_n)
    }

    pub fn update(&self, xbar: f64, n: u64, sigma2: f64) -> Result<Self> {
        posterior_update(self, xbar, n, sigma2)
    }
}

/// Absorbs `n` observations with mean `xbar` and known variance `sigma2`,
/// treating `prior`'s current state as the prior.
pub fn posterior_update(
    prior: &GaussianPosterior,
    xbar: f64,
    n: u64,
    sigma2: f64,
) -> Result<GaussianPosterior> {
    if sigma2.is_nan() || sigma2 <= 0.0 {
        return Err(Error::invalid("sigma2", "likelihood variance must be positive"));
    }
    if prior.var_n.is_nan() || prior.var_n <= 0.0 {
        return Err(Error::invalid("var_0", "prior variance must be positive"));
    }
    if n == 0 {
        return Ok(*prior);
    }
    let n_f = n as f64;
    let var_n = 1.0 / (n_f / sigma2 + 1.0 / prior.var_n);
    let mu_n = var_n * (prior.mu_n / prior.var_n + n_f * xbar / sigma2);
    Ok(GaussianPosterior {
        mu_n,
        var_n,
        prior_mu: prior.prior_mu,
        prior_var: prior.prior_var,
        likelihood_var: Some(sigma2),
        obs_count: prior.obs_count + n,
    })
}

/// Which estimation method produced a result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Method {
    /// Method I: whole names, summed per prefix afterwards.
    WholeName,
    /// Method II: every level prefix estimated on its own.
    PerField,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::WholeName => "I",
            Method::PerField => "II",
        })
    }
}

/// Normal coverage levels and their one-sided multipliers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coverage {
    P68,
    P90,
    P95,
    P99,
}

impl Coverage {
    pub fn z(self) -> f64 {
        match self {
            Coverage::P68 => 1.0,
            Coverage::P90 => 1.65,
            Coverage::P95 => 1.96,
            Coverage::P99 => 2.58,
        }
    }
}

/// A whole name or a name prefix. Its level is its field count.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StructureKey {
    fields: Vec<String>,
}

impl StructureKey {
    /// Key for `name`, folding fields beyond `max_depth` into the last one the
    /// same way the iterated hash chain does.
    pub fn from_name(name: &HierarchicalName, max_depth: Option<usize>) -> Self {
        let fields = name.fields();
        match max_depth {
            Some(d) if d >= 1 && fields.len() > d => {
                let mut folded: Vec<String> = fields[..d - 1].to_vec();
                folded.push(fields[d - 1..].join("/"));
                StructureKey { fields: folded }
            }
            _ => StructureKey {
                fields: fields.to_vec(),
            },
        }
    }

    pub fn fields(&self) -> &[String] {
        &self.fields
    }

    /// One-based level of the key.
    pub fn level(&self) -> usize {
        self.fields.len()
    }

    pub fn prefix(&self, len: usize) -> StructureKey {
        StructureKey {
            fields: self.fields[..len].to_vec(),
        }
    }
}

impl fmt::Display for StructureKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.fields.join("/"))
    }
}

/// Occurrence counts of structure keys in one epoch.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Observation {
    pub epoch: usize,
    pub counts: BTreeMap<StructureKey, u64>,
}

impl Observation {
    /// Whole-name counts, the input of Method I.
    pub fn whole_names(epoch: usize, names: &[HierarchicalName], max_depth: Option<usize>) -> Self {
        let mut counts = BTreeMap::new();
        for name in names {
            *counts.entry(StructureKey::from_name(name, max_depth)).or_insert(0) += 1;
        }
        Observation { epoch, counts }
    }

    /// Per-level prefix counts, the input of Method II.
    pub fn per_field(epoch: usize, names: &[HierarchicalName], max_depth: Option<usize>) -> Self {
        let mut counts = BTreeMap::new();
        for name in names {
            let key = StructureKey::from_name(name, max_depth);
            for len in 1..=key.level() {
                *counts.entry(key.prefix(len)).or_insert(0) += 1;
            }
        }
        Observation { epoch, counts }
    }
}

/// How an epoch's occurrence count becomes a sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CountMode {
    /// 1 if the key occurred in the epoch. Filters store set membership, so
    /// this is what sizes them.
    #[default]
    Distinct,
    /// Raw occurrence count.
    Volume,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorConfig {
    pub prior_mu: f64,
    pub prior_var: f64,
    /// Lower bound on the per-key likelihood variance.
    pub variance_floor: f64,
    pub count_mode: CountMode,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        EstimatorConfig {
            prior_mu: 0.0,
            prior_var: 1e6,
            variance_floor: 1.0,
            count_mode: CountMode::Distinct,
        }
    }
}

/// Aggregated normal estimate for one key at one level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KeyEstimate {
    pub mu: f64,
    pub var: f64,
}

/// Estimated element count of one filter level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelEstimate {
    /// One-based level.
    pub level: usize,
    pub method: Method,
    /// Sum of key means.
    pub mu: f64,
    /// Sum of key variances.
    pub var: f64,
    pub z: f64,
    /// `max(0, mu + z * sqrt(var))`.
    pub n_expected: f64,
}

impl LevelEstimate {
    pub fn new(level: usize, method: Method, mu: f64, var: f64, z: f64) -> Self {
        LevelEstimate {
            level,
            method,
            mu,
            var,
            z,
            n_expected: (mu + z * sqrt(var.max(0.0))).max(0.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Estimates {
    pub method: Method,
    /// Posterior of every observed key.
    pub posteriors: BTreeMap<StructureKey, GaussianPosterior>,
    /// Per-prefix estimates used for the level totals. For Method I these are
    /// sums over the whole names sharing the prefix.
    pub keys: BTreeMap<StructureKey, KeyEstimate>,
    /// Level totals, level 1 first.
    pub levels: Vec<LevelEstimate>,
}

fn posteriors(
    stream: &[Observation],
    cfg: &EstimatorConfig,
) -> Result<BTreeMap<StructureKey, GaussianPosterior>> {
    if stream.is_empty() {
        return Err(Error::NoData);
    }
    let prior = GaussianPosterior::prior(cfg.prior_mu, cfg.prior_var)?;
    let mut series: BTreeMap<&StructureKey, Vec<f64>> = BTreeMap::new();
    let epochs = stream.len();
    for (e, obs) in stream.iter().enumerate() {
        for (key, &count) in &obs.counts {
            let sample = match cfg.count_mode {
                CountMode::Distinct => f64::from(u8::from(count > 0)),
                CountMode::Volume => count as f64,
            };
            series.entry(key).or_insert_with(|| alloc::vec![0.0; epochs])[e] += sample;
        }
    }
    let mut out = BTreeMap::new();
    for (key, xs) in series {
        if cfg.count_mode == CountMode::Distinct {
            debug_assert!(xs.iter().all(|&x| x <= 1.0), "one observation per epoch");
        }
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = if xs.len() > 1 {
            xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        let sigma2 = var.max(cfg.variance_floor);
        out.insert(key.clone(), prior.update(mean, xs.len() as u64, sigma2)?);
    }
    Ok(out)
}

fn level_totals(keys: &BTreeMap<StructureKey, KeyEstimate>, method: Method, z: f64) -> Vec<LevelEstimate> {
    let depth = keys.keys().map(StructureKey::level).max().unwrap_or(0);
    (1..=depth)
        .map(|level| {
            let (mu, var) = keys
                .iter()
                .filter(|(k, _)| k.level() == level)
                .fold((0.0, 0.0), |(m, v), (_, e)| (m + e.mu, v + e.var));
            LevelEstimate::new(level, method, mu, var, z)
        })
        .collect()
}

/// Method I over whole-name observations (see [`Observation::whole_names`]).
pub fn estimate_method_one(stream: &[Observation], z: f64, cfg: &EstimatorConfig) -> Result<Estimates> {
    let posteriors = posteriors(stream, cfg)?;
    let mut keys: BTreeMap<StructureKey, KeyEstimate> = BTreeMap::new();
    for (name, post) in &posteriors {
        for len in 1..=name.level() {
            let e = keys.entry(name.prefix(len)).or_insert(KeyEstimate { mu: 0.0, var: 0.0 });
            e.mu += post.mu_n;
            e.var += post.var_n;
        }
    }
    let levels = level_totals(&keys, Method::WholeName, z);
    Ok(Estimates {
        method: Method::WholeName,
        posteriors,
        keys,
        levels,
    })
}

/// Method II over per-field observations (see [`Observation::per_field`]).
pub fn estimate_method_two(stream: &[Observation], z: f64, cfg: &EstimatorConfig) -> Result<Estimates> {
    let posteriors = posteriors(stream, cfg)?;
    let keys = posteriors
        .iter()
        .map(|(k, p)| {
            (
                k.clone(),
                KeyEstimate {
                    mu: p.mu_n,
                    var: p.var_n,
                },
            )
        })
        .collect();
    let levels = level_totals(&keys, Method::PerField, z);
    Ok(Estimates {
        method: Method::PerField,
        posteriors,
        keys,
        levels,
    })
}

/// Collects request epochs and produces either estimate at the end.
#[derive(Debug, Clone, Default)]
pub struct StreamEstimator {
    config: EstimatorConfig,
    max_depth: Option<usize>,
    whole: Vec<Observation>,
    per_field: Vec<Observation>,
}

impl StreamEstimator {
    pub fn new(config: EstimatorConfig, max_depth: Option<usize>) -> Self {
        StreamEstimator {
            config,
            max_depth,
            whole: Vec::new(),
            per_field: Vec::new(),
        }
    }

    pub fn push_epoch(&mut self, names: &[HierarchicalName]) {
        let epoch = self.whole.len();
        self.whole
            .push(Observation::whole_names(epoch, names, self.max_depth));
        self.per_field
            .push(Observation::per_field(epoch, names, self.max_depth));
    }

    pub fn epochs(&self) -> usize {
        self.whole.len()
    }

    pub fn finalize(&self, method: Method, z: f64) -> Result<Estimates> {
        match method {
            Method::WholeName => estimate_method_one(&self.whole, z, &self.config),
            Method::PerField => estimate_method_two(&self.per_field, z, &self.config),
        }
    }
}

/// How many hashes a sized level gets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HashBudget {
    Fixed(u32),
    /// Fewest hashes with `(1 - p)^k <= f`.
    TargetFpr(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SizedLevel {
    pub design: LevelDesign,
    /// The estimate was zero; the level got the minimal two-bit filter.
    pub empty_estimate: bool,
}

impl SizedLevel {
    pub fn address_bits(&self) -> u32 {
        self.design.address_bits()
    }
}

/// Dimensions one level per estimate: `m_ind = ceil(k * ceil(n_expected) / -ln p)`.
pub fn size_filter(estimates: &[LevelEstimate], p_target: f64, budget: HashBudget) -> Result<Vec<SizedLevel>> {
    if !(p_target > 0.0 && p_target < 1.0) {
        return Err(Error::invalid("p", "must lie in (0, 1)"));
    }
    if estimates.is_empty() {
        return Err(Error::NoData);
    }
    let k = match budget {
        HashBudget::Fixed(0) => return Err(Error::invalid("k", "at least one hash")),
        HashBudget::Fixed(k) => k,
        HashBudget::TargetFpr(f) => {
            if !(f > 0.0 && f < 1.0) {
                return Err(Error::invalid("f", "must lie in (0, 1)"));
            }
            ceil_tolerant(ln(f) / ln(1.0 - p_target)).max(1.0) as u32
        }
    };
    estimates
        .iter()
        .enumerate()
        .map(|(x, e)| {
            let n = ceil_tolerant(e.n_expected);
            if n <= 0.0 {
                return Ok(SizedLevel {
                    design: LevelDesign::new(x, 0.0, 0.0, k, 2)?,
                    empty_estimate: true,
                });
            }
            let m = ceil_tolerant(f64::from(k) * n / -ln(p_target)).max(2.0) as u64;
            Ok(SizedLevel {
                design: LevelDesign::new(x, n, n, k, m)?,
                empty_estimate: false,
            })
        })
        .collect()
}
