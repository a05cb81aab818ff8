//! Closed-form tables for filter design, naming cost and capacity, with an
//! optional Monte-Carlo overlay for the false-positive tables.

use ifibf_core::estimation::{size_filter, HashBudget, LevelEstimate, Method, StreamEstimator, EstimatorConfig};
use ifibf_core::filter::{split_to_iterated, strategy_one_shrink, strategy_two_rehash, LevelDesign};
use ifibf_core::naming::{
    max_iterated_hashes, max_standard_hashes, naming_bits, NamingScheme, BITS_PER_CHAR, MEAN_WORD_LENGTH,
};
use ifibf_core::{FilterGeometry, HierarchicalName};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cases::{hierarchical_name_bits, Case, Scheme, HIERARCHICAL_LEVELS};
use crate::montecarlo::{level_rates, Proportion};
use crate::report::{Cell, Table};
use crate::{Error, Result};

/// Per-level repetition fractions of one column of the repetition table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RepetitionExample {
    pub label: &'static str,
    pub sbf: [f64; 1],
    pub two: [f64; 2],
    pub four: [f64; 4],
}

impl RepetitionExample {
    pub fn profile(&self, d: usize) -> Option<&[f64]> {
        match d {
            1 => Some(&self.sbf),
            2 => Some(&self.two),
            4 => Some(&self.four),
            _ => None,
        }
    }
}

pub const REPETITION_EXAMPLES: [RepetitionExample; 3] = [
    RepetitionExample {
        label: "I",
        sbf: [0.05],
        two: [0.20, 0.05],
        four: [0.50, 0.25, 0.10, 0.05],
    },
    RepetitionExample {
        label: "II",
        sbf: [0.15],
        two: [0.35, 0.15],
        four: [0.60, 0.35, 0.20, 0.15],
    },
    RepetitionExample {
        label: "III",
        sbf: [0.50],
        two: [0.50, 0.50],
        four: [0.50; 4],
    },
];

/// Monte-Carlo settings. Levels wider than `max_level_bits` are simulated
/// at that width with the load scaled by the same factor, which keeps the
/// fill ratio and so the expected rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MonteCarlo {
    pub trials: u64,
    pub seed: u64,
    pub max_level_bits: u64,
}

impl MonteCarlo {
    pub fn new(trials: u64, seed: u64) -> Self {
        MonteCarlo {
            trials,
            seed,
            max_level_bits: 1 << 20,
        }
    }

    fn scale(&self, m_ind: u64) -> (u64, f64) {
        if m_ind <= self.max_level_bits {
            (m_ind, 1.0)
        } else {
            (self.max_level_bits, self.max_level_bits as f64 / m_ind as f64)
        }
    }
}

const MC_COLUMNS: [&str; 4] = ["mc_f", "mc_lo", "mc_hi", "mc_m_ind"];

fn mc_cells(p: Proportion, m_ind: u64) -> Vec<Cell> {
    let (lo, hi) = p.wilson(1.96);
    vec![p.rate().into(), lo.into(), hi.into(), m_ind.into()]
}

/// Runs one filled filter and returns per-level and overall proportions.
fn simulate_levels(
    mc: &MonteCarlo,
    rng: &mut ChaCha8Rng,
    levels: &[LevelDesign],
) -> Result<(Vec<Proportion>, Proportion, u64)> {
    let (m_sim, factor) = mc.scale(levels[0].m_ind);
    let k = levels[0].k_ind;
    let geometry = FilterGeometry::with_default_seeds(vec![m_sim; levels.len()], k)?;
    let distinct: Vec<u64> = levels
        .iter()
        .map(|l| ((l.n_prime * factor).round() as u64).max(1))
        .collect();
    let r = level_rates(&geometry, &distinct, mc.trials, rng)?;
    Ok((r.levels, r.overall, m_sim))
}

/// Overall and per-level false-positive rates of SBF, 2IBF and 4IBF under
/// each repetition example, for `k_total` hashes in total.
pub fn table3(case: &Case, k_total: u32, mc: Option<&MonteCarlo>) -> Result<Table> {
    let mut t = Table::new(&["example", "scheme", "level", "repetition", "n_distinct", "f"]);
    if mc.is_some() {
        t.header.extend(MC_COLUMNS.iter().map(|c| (*c).to_owned()));
    }
    let std = case.standard(k_total)?;
    let mut rng = mc.map(|m| ChaCha8Rng::seed_from_u64(m.seed));
    for ex in &REPETITION_EXAMPLES {
        for d in [1usize, 2, 4] {
            if !k_total.is_multiple_of(d as u32) {
                continue;
            }
            let scheme = Scheme::new(d, k_total / d as u32);
            let (_, split) = split_to_iterated(&std, d)?;
            let profile = ex.profile(d).expect("profiles exist for 1, 2 and 4 levels");
            let levels: Vec<LevelDesign> = split
                .iter()
                .zip(profile)
                .map(|(l, &r)| l.with_repetition(r))
                .collect::<ifibf_core::Result<_>>()?;
            let sim = match (mc, rng.as_mut()) {
                (Some(mc), Some(rng)) => Some(simulate_levels(mc, rng, &levels)?),
                _ => None,
            };
            let overall: f64 = levels.iter().map(|l| l.f_ind).product();
            let mut row: Vec<Cell> = vec![ex.label.into(), scheme.name().into(), "all".into(), Cell::Empty, Cell::Empty, overall.into()];
            if let Some((_, all, m)) = &sim {
                row.extend(mc_cells(*all, *m));
            }
            t.push(row);
            for (x, l) in levels.iter().enumerate() {
                let mut row: Vec<Cell> = vec![
                    ex.label.into(),
                    scheme.name().into(),
                    (x + 1).into(),
                    profile[x].into(),
                    l.n_prime.into(),
                    l.f_ind.into(),
                ];
                if let Some((per_level, _, m)) = &sim {
                    row.extend(mc_cells(per_level[x], *m));
                }
                t.push(row);
            }
        }
    }
    Ok(t)
}

fn schemes(k_max: u32) -> impl Iterator<Item = Scheme> {
    [1usize, 2, 4]
        .into_iter()
        .flat_map(move |d| (1..=k_max).map(move |k| Scheme::new(d, k)))
}

fn hierarchical_chars() -> f64 {
    HIERARCHICAL_LEVELS as f64 * MEAN_WORD_LENGTH
}

/// Largest per-level hash count whose names are no longer than plain text.
pub fn max_hashes_within_text(case: &Case, d: usize) -> u32 {
    let scheme = Scheme::new(d, 1);
    if d == 1 {
        max_standard_hashes(hierarchical_chars(), BITS_PER_CHAR, case.b)
    } else {
        max_iterated_hashes(hierarchical_chars(), BITS_PER_CHAR, d, scheme.b_ind(case))
    }
}

/// Name size per scheme against the plain-text baseline.
pub fn naming_bits_table(case: &Case, k_max: u32) -> Table {
    let mut t = Table::new(&[
        "scheme",
        "d",
        "k_ind",
        "k_total",
        "b_ind",
        "naming_bits",
        "hierarchical_bits",
        "max_k_ind",
        "within_hierarchical",
    ]);
    let hier = hierarchical_name_bits();
    for s in schemes(k_max) {
        let b_ind = s.b_ind(case);
        let widths = vec![b_ind; s.d];
        let bits = if s.d == 1 {
            naming_bits(&NamingScheme::Standard { k: s.k_i, b: case.b })
        } else {
            naming_bits(&NamingScheme::Iterated {
                k_i: s.k_i,
                b_ind: &widths,
            })
        };
        t.push(vec![
            s.name().into(),
            s.d.into(),
            s.k_i.into(),
            s.k_total().into(),
            b_ind.into(),
            bits.into(),
            hier.into(),
            max_hashes_within_text(case, s.d).into(),
            (bits <= hier).into(),
        ]);
    }
    t
}

/// Elements admitted per scheme at the case's `p`, against plain text.
pub fn capacity_table(case: &Case, k_max: u32) -> Result<Table> {
    let mut t = Table::new(&["scheme", "d", "k_ind", "k_total", "m", "n", "capacity", "hierarchical_n"]);
    let hier = (case.m as f64 / hierarchical_name_bits()).floor() as u64;
    for s in schemes(k_max) {
        let std = case.standard(s.k_total())?;
        t.push(vec![
            s.name().into(),
            s.d.into(),
            s.k_i.into(),
            s.k_total().into(),
            case.m.into(),
            std.n.into(),
            std.capacity.into(),
            hier.into(),
        ]);
    }
    Ok(t)
}

/// False-positive rate at design load per scheme.
pub fn fpr_table(case: &Case, k_max: u32, mc: Option<&MonteCarlo>) -> Result<Table> {
    let mut t = Table::new(&["scheme", "d", "k_ind", "k_total", "f"]);
    if mc.is_some() {
        t.header.extend(MC_COLUMNS.iter().map(|c| (*c).to_owned()));
    }
    let mut rng = mc.map(|m| ChaCha8Rng::seed_from_u64(m.seed));
    for s in schemes(k_max) {
        let std = case.standard(s.k_total())?;
        let (_, levels) = split_to_iterated(&std, s.d)?;
        let f: f64 = levels.iter().map(|l| l.f_ind).product();
        let mut row: Vec<Cell> = vec![s.name().into(), s.d.into(), s.k_i.into(), s.k_total().into(), f.into()];
        if let (Some(mc), Some(rng)) = (mc, rng.as_mut()) {
            let (_, all, m) = simulate_levels(mc, rng, &levels)?;
            row.extend(mc_cells(all, m));
        }
        t.push(row);
    }
    Ok(t)
}

/// Capacity per table when the case's memory is split over 1..=`max_fibs`
/// interface tables, for the four-hash schemes.
pub fn multi_fib_table(case: &Case, max_fibs: u32) -> Result<Table> {
    if max_fibs == 0 {
        return Err(Error::Config("at least one table is needed".into()));
    }
    let mut t = Table::new(&[
        "fibs",
        "scheme",
        "d",
        "k_ind",
        "m_per_fib",
        "capacity_per_fib",
        "n_per_fib",
        "hierarchical_per_fib",
        "exceeds_hierarchical",
    ]);
    for fibs in 1..=max_fibs {
        for s in Scheme::four_hash_family() {
            let m = case.m as f64 / f64::from(fibs);
            let capacity = case.standard(s.k_total())?.capacity / f64::from(fibs);
            let hier = m / hierarchical_name_bits();
            t.push(vec![
                fibs.into(),
                s.name().into(),
                s.d.into(),
                s.k_i.into(),
                m.into(),
                capacity.into(),
                (capacity.floor() as u64).into(),
                hier.into(),
                (capacity > hier).into(),
            ]);
        }
    }
    Ok(t)
}

/// Target rates of the single-table memory series; the first is the
/// four-hash design at p = 0.5.
pub const SERIES_FPRS: [f64; 3] = [0.0625, 0.1, 0.01];

/// Memory per element for a single table at each target rate. The hash count
/// is left fractional, so every Bloom layout shares one value.
pub fn fpr_series_table(case: &Case) -> Table {
    let mut t = Table::new(&[
        "f",
        "label",
        "k",
        "m",
        "capacity",
        "bits_per_element",
        "hierarchical_capacity",
        "hierarchical_bits_per_element",
    ]);
    for (i, &f) in SERIES_FPRS.iter().enumerate() {
        let k = f.ln() / (1.0 - case.p).ln();
        let capacity = -(case.m as f64) * case.p.ln() / k;
        t.push(vec![
            f.into(),
            if i == 0 { "bounded" } else { "free" }.into(),
            k.into(),
            case.m.into(),
            capacity.into(),
            (case.m as f64 / capacity).into(),
            case.hierarchical_capacity().into(),
            hierarchical_name_bits().into(),
        ]);
    }
    t
}

/// How the per-level designs react to repetitions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strategy {
    /// Keep the split design and evaluate it at the reduced load.
    #[default]
    Keep,
    /// Strategy I: shrink each level to keep its rate.
    Shrink,
    /// Strategy II: keep the memory and add hashes.
    Rehash,
}

/// Splits a standard design into `d` levels, applies per-level repetitions
/// and a strategy, and lists the result with an overall row.
pub fn design_table(case: &Case, k_total: u32, d: usize, repetitions: &[f64], strategy: Strategy) -> Result<Table> {
    if repetitions.len() != d && repetitions.len() > 1 {
        return Err(Error::Config(format!("{} repetition values for {d} levels", repetitions.len())));
    }
    let std = case.standard(k_total)?;
    let (_, split) = split_to_iterated(&std, d)?;
    let mut t = Table::new(&["level", "m_ind", "k_ind", "ideal_k", "b_ind", "n_ind", "n_distinct", "p_ind", "f_ind"]);
    let (mut m_sum, mut f_all) = (0u64, 1.0);
    for (x, level) in split.iter().enumerate() {
        let r = match repetitions {
            [] => 0.0,
            [r] => *r,
            rs => rs[x],
        };
        let reduced = level.with_repetition(r)?;
        let (design, ideal_k, f) = match strategy {
            Strategy::Keep => (reduced, None, reduced.f_ind),
            Strategy::Shrink => {
                let s = strategy_one_shrink(&reduced)?;
                (s, None, s.f_ind)
            }
            Strategy::Rehash => {
                let s = strategy_two_rehash(&reduced)?;
                (s.design, Some(s.ideal_k), s.ideal_f)
            }
        };
        m_sum += design.m_ind;
        f_all *= f;
        t.push(vec![
            (x + 1).into(),
            design.m_ind.into(),
            design.k_ind.into(),
            ideal_k.into(),
            design.address_bits().into(),
            design.n_ind.into(),
            design.n_prime.into(),
            design.p_ind.into(),
            f.into(),
        ]);
    }
    t.push(vec![
        "all".into(),
        m_sum.into(),
        Cell::Empty,
        Cell::Empty,
        Cell::Empty,
        std.capacity.into(),
        Cell::Empty,
        std.p.into(),
        f_all.into(),
    ]);
    Ok(t)
}

/// Which estimators to run over a stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MethodChoice {
    WholeName,
    PerField,
    #[default]
    Both,
}

impl MethodChoice {
    fn methods(self) -> &'static [Method] {
        match self {
            MethodChoice::WholeName => &[Method::WholeName],
            MethodChoice::PerField => &[Method::PerField],
            MethodChoice::Both => &[Method::WholeName, Method::PerField],
        }
    }
}

/// Per-level estimates of a request stream.
pub fn estimate(
    epochs: &[Vec<HierarchicalName>],
    methods: MethodChoice,
    z: f64,
    config: EstimatorConfig,
    max_depth: Option<usize>,
) -> Result<Vec<LevelEstimate>> {
    let mut est = StreamEstimator::new(config, max_depth);
    for e in epochs {
        est.push_epoch(e);
    }
    let mut out = Vec::new();
    for &m in methods.methods() {
        out.extend(est.finalize(m, z)?.levels);
    }
    Ok(out)
}

pub fn estimate_table(levels: &[LevelEstimate]) -> Table {
    let mut t = Table::new(&["level", "method", "mu", "sigma2", "z", "n_expected"]);
    for l in levels {
        t.push(vec![
            l.level.into(),
            l.method.to_string().into(),
            l.mu.into(),
            l.var.into(),
            l.z.into(),
            l.n_expected.into(),
        ]);
    }
    t
}

/// Filter dimensions per method from the estimates.
pub fn sizing_table(levels: &[LevelEstimate], p: f64, budget: HashBudget) -> Result<Table> {
    let mut t = Table::new(&["level", "method", "n_expected", "k_ind", "m_ind", "b_ind", "f_ind", "empty_estimate"]);
    for method in [Method::WholeName, Method::PerField] {
        let mine: Vec<LevelEstimate> = levels.iter().filter(|l| l.method == method).copied().collect();
        if mine.is_empty() {
            continue;
        }
        for (e, s) in mine.iter().zip(size_filter(&mine, p, budget)?) {
            t.push(vec![
                e.level.into(),
                method.to_string().into(),
                s.design.n_ind.into(),
                s.design.k_ind.into(),
                s.design.m_ind.into(),
                s.address_bits().into(),
                s.design.f_ind.into(),
                s.empty_estimate.into(),
            ]);
        }
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cases::Preset;

    fn float(t: &Table, row: usize, col: &str) -> f64 {
        match t.get(row, col) {
            Some(Cell::Float(v)) => *v,
            Some(Cell::Int(v)) => *v as f64,
            other => panic!("{col} at {row}: {other:?}"),
        }
    }

    fn case_one() -> Case {
        Case::preset(Preset::I)
    }

    #[test]
    fn table3_layout() {
        let t = table3(&case_one(), 4, None).unwrap();
        // per example: SBF 2 rows, 2IBF 3, 4IBF 5
        assert_eq!(t.rows.len(), 3 * 10);
        assert_eq!(t.get(0, "level"), Some(&Cell::Text("all".into())));
        assert!((float(&t, 0, "f") - 0.0541).abs() < 5e-4);
        assert!((float(&t, 5, "f") - 0.0266).abs() < 5e-4);
        assert!((float(&t, 6, "f") - 0.2929).abs() < 5e-4);
    }

    #[test]
    fn no_repetitions_give_the_design_rate() {
        for d in [1, 2, 4] {
            let t = design_table(&case_one(), 4, d, &[], Strategy::Keep).unwrap();
            assert!((float(&t, d, "f_ind") - 0.0625).abs() < 1e-12);
        }
    }

    #[test]
    fn rehash_of_half_load_reaches_two_to_the_minus_eight() {
        let t = design_table(&case_one(), 4, 4, &[0.5], Strategy::Rehash).unwrap();
        assert!((float(&t, 4, "f_ind") - 0.00390625).abs() < 1e-12);
        assert_eq!(float(&t, 0, "k_ind"), 2.0);
        assert_eq!(float(&t, 4, "m_ind"), 131_072.0);
    }

    #[test]
    fn shrink_saves_memory() {
        let t = design_table(&case_one(), 4, 2, &[0.2, 0.05], Strategy::Shrink).unwrap();
        assert!(float(&t, 2, "m_ind") < 131_072.0);
        assert!((float(&t, 2, "f_ind") - 0.0625).abs() < 1e-3);
        assert!(design_table(&case_one(), 4, 2, &[0.2, 0.05, 0.1], Strategy::Keep).is_err());
    }

    #[test]
    fn case_one_naming_bounds() {
        let c = case_one();
        assert_eq!(max_hashes_within_text(&c, 1), 8);
        assert_eq!(max_hashes_within_text(&c, 2), 4);
        assert_eq!(max_hashes_within_text(&c, 4), 2);
        let t = naming_bits_table(&c, 10);
        let bits: Vec<f64> = [3usize, 11, 20].iter().map(|&r| float(&t, r, "naming_bits")).collect();
        assert_eq!(bits, [68.0, 64.0, 60.0]);
    }

    #[test]
    fn multi_fib_halves() {
        let c = case_one();
        let t = multi_fib_table(&c, 10).unwrap();
        assert_eq!(t.rows.len(), 30);
        assert_eq!(float(&t, 3, "capacity_per_fib") * 2.0, float(&t, 0, "capacity_per_fib"));
        assert!(t.rows.iter().all(|r| r[8] == Cell::Text("true".into())));
        assert!(multi_fib_table(&c, 0).is_err());
    }

    #[test]
    fn series_first_row_is_the_four_hash_design() {
        let t = fpr_series_table(&case_one());
        assert!((float(&t, 0, "k") - 4.0).abs() < 1e-12);
        assert!((float(&t, 0, "capacity") - 131_072.0 * 2f64.ln() / 4.0).abs() < 1e-6);
        assert!(float(&t, 2, "capacity") < float(&t, 1, "capacity"));
    }

    #[test]
    fn estimate_rows() {
        let epochs: Vec<Vec<HierarchicalName>> = vec![
            vec!["a/b".parse().unwrap(), "a/c".parse().unwrap()],
            vec!["a/b".parse().unwrap()],
        ];
        let est = estimate(&epochs, MethodChoice::Both, 1.96, EstimatorConfig::default(), None).unwrap();
        assert_eq!(est.len(), 4);
        let t = estimate_table(&est);
        assert_eq!(t.header, ["level", "method", "mu", "sigma2", "z", "n_expected"]);
        let s = sizing_table(&est, 0.5, HashBudget::Fixed(1)).unwrap();
        assert_eq!(s.rows.len(), 4);
    }
}
