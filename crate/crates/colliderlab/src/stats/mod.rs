//! Estimators and tests shared by the quantum and classical ensembles.
//!
//! Everything operates on the sixteen-cell `(a, b, A, B)` frequency table or
//! on finite-domain datasets. Pure functions over immutable tables.

use std::collections::BTreeMap;

use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};

use crate::bellcore::{BellIndex, Ensemble, PairConditional};
use crate::error::{Error, Result};
use crate::scm::Dataset;

/// Default significance level for pass/fail tests.
pub const DEFAULT_ALPHA: f64 = 0.001;

fn chi_square_sf(statistic: f64, df: usize) -> f64 {
    if df == 0 {
        return 1.0;
    }
    let dist = ChiSquared::new(df as f64).expect("positive degrees of freedom");
    1.0 - dist.cdf(statistic)
}

fn normal_sf_two_sided(z: f64) -> f64 {
    let dist = Normal::new(0.0, 1.0).expect("unit normal");
    2.0 * (1.0 - dist.cdf(z.abs()))
}

/// Counts over the sixteen `(a, b, A, B)` combinations.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct FreqTable16 {
    counts: [[[[u64; 2]; 2]; 2]; 2],
    total: u64,
}

impl FreqTable16 {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&mut self, a: u8, b: u8, outcome_a: u8, outcome_b: u8) {
        self.counts[usize::from(a & 1)][usize::from(b & 1)][usize::from(outcome_a & 1)]
            [usize::from(outcome_b & 1)] += 1;
        self.total += 1;
    }

    pub fn from_ensemble(ensemble: &Ensemble) -> Result<Self> {
        if ensemble.is_empty() {
            return Err(Error::EmptyEnsemble);
        }
        let mut table = Self::new();
        for run in ensemble.runs() {
            table.record(run.setting_a, run.setting_b, run.outcome_a, run.outcome_b);
        }
        Ok(table)
    }

    /// Tabulates a dataset carrying binary columns named `a`, `b`, `A`, `B`.
    pub fn from_dataset(dataset: &Dataset) -> Result<Self> {
        let cols: Vec<usize> = ["a", "b", "A", "B"]
            .iter()
            .map(|name| dataset.column_index(name))
            .collect::<Result<_>>()?;
        if dataset.is_empty() {
            return Err(Error::EmptyEnsemble);
        }
        let mut table = Self::new();
        for row in dataset.rows() {
            let v: Vec<usize> = cols.iter().map(|&c| row.values[c]).collect();
            if v.iter().any(|&x| x > 1) {
                return Err(Error::ValueOutOfDomain {
                    variable: "a/b/A/B".into(),
                    value: *v.iter().max().unwrap(),
                });
            }
            table.record(v[0] as u8, v[1] as u8, v[2] as u8, v[3] as u8);
        }
        Ok(table)
    }

    pub fn count(&self, a: u8, b: u8, outcome_a: u8, outcome_b: u8) -> u64 {
        self.counts[usize::from(a & 1)][usize::from(b & 1)][usize::from(outcome_a & 1)]
            [usize::from(outcome_b & 1)]
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn stratum_total(&self, a: u8, b: u8) -> u64 {
        let s = &self.counts[usize::from(a & 1)][usize::from(b & 1)];
        s[0][0] + s[0][1] + s[1][0] + s[1][1]
    }

    /// Cell-wise sum; tabulation is a pure fold, so merging two tables
    /// equals tabulating the concatenated runs.
    #[must_use]
    pub fn merge(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for a in 0..2 {
            for b in 0..2 {
                for x in 0..2 {
                    for y in 0..2 {
                        out.counts[a][b][x][y] += other.counts[a][b][x][y];
                    }
                }
            }
        }
        out.total += other.total;
        out
    }
}

/// Exact cell probabilities over the sixteen combinations (settings included).
#[derive(Debug, Clone, PartialEq)]
pub struct ProbTable16 {
    p: [[[[f64; 2]; 2]; 2]; 2],
}

impl ProbTable16 {
    /// Builds from raw cell probabilities; must sum to 1 within 1e-9.
    pub fn new(p: [[[[f64; 2]; 2]; 2]; 2]) -> Result<Self> {
        let total: f64 = Self { p }.cells().map(|(.., v)| v).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidTarget(total));
        }
        Ok(Self { p })
    }

    /// Joint table for uniformly sampled settings and the given wing-outcome
    /// conditionals.
    pub fn from_conditionals(cond: &PairConditional) -> Self {
        let mut p = [[[[0.0; 2]; 2]; 2]; 2];
        for a in 0..2 {
            for b in 0..2 {
                for x in 0..2 {
                    for y in 0..2 {
                        p[a][b][x][y] = 0.25 * cond[a][b][x][y];
                    }
                }
            }
        }
        Self { p }
    }

    pub fn uniform() -> Self {
        Self {
            p: [[[[1.0 / 16.0; 2]; 2]; 2]; 2],
        }
    }

    pub fn cell(&self, a: usize, b: usize, x: usize, y: usize) -> f64 {
        self.p[a][b][x][y]
    }

    fn cells(&self) -> impl Iterator<Item = (usize, usize, usize, usize, f64)> + '_ {
        (0..16).map(move |i| {
            let (a, b, x, y) = (i >> 3 & 1, i >> 2 & 1, i >> 1 & 1, i & 1);
            (a, b, x, y, self.p[a][b][x][y])
        })
    }

    fn stratum(&self, a: usize, b: usize) -> f64 {
        let s = &self.p[a][b];
        s[0][0] + s[0][1] + s[1][0] + s[1][1]
    }
}

/// Point estimate with its standard error.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub se: f64,
}

/// Correlator `E(a, b) = P(A = B | a, b) - P(A != B | a, b)`.
pub fn correlator(table: &FreqTable16, a: u8, b: u8) -> Result<Estimate> {
    let n = table.stratum_total(a, b);
    if n == 0 {
        return Err(Error::EmptyStratum { a, b });
    }
    let same = table.count(a, b, 0, 0) + table.count(a, b, 1, 1);
    let value = (2.0 * same as f64 - n as f64) / n as f64;
    let se = ((1.0 - value * value).max(0.0) / n as f64).sqrt();
    debug_assert!(value.abs() <= 1.0);
    Ok(Estimate { value, se })
}

/// Correlator on an exact probability table.
pub fn correlator_exact(p: &ProbTable16, a: usize, b: usize) -> f64 {
    let s = p.stratum(a, b);
    (p.cell(a, b, 0, 0) + p.cell(a, b, 1, 1) - p.cell(a, b, 0, 1) - p.cell(a, b, 1, 0)) / s
}

/// Signs applied to `(E(0,0), E(0,1), E(1,0), E(1,1))` when forming the
/// CHSH combination.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SignConvention(pub [i8; 4]);

impl SignConvention {
    pub fn sign(&self, a: usize, b: usize) -> f64 {
        f64::from(self.0[a * 2 + b])
    }

    /// All combinations with an odd number of minus signs; these are the
    /// sign patterns with local-hidden-variable bound 2.
    pub fn all_odd() -> Vec<SignConvention> {
        (0..16u8)
            .filter(|bits| bits.count_ones() % 2 == 1)
            .map(|bits| {
                SignConvention([0, 1, 2, 3].map(|i| if bits >> i & 1 == 1 { -1 } else { 1 }))
            })
            .collect()
    }
}

/// Per-Bell-index sign convention maximizing the CHSH value at the canonical
/// settings. Derived once by exhaustive search over the odd sign patterns on
/// exact probabilities; the derivation is re-run in tests.
pub fn sign_convention(m: BellIndex) -> SignConvention {
    const TABLE: [[i8; 4]; 4] = [
        [1, -1, 1, 1],
        [1, -1, -1, -1],
        [-1, 1, 1, 1],
        [-1, 1, -1, -1],
    ];
    SignConvention(TABLE[m.index()])
}

/// CHSH combination of the four correlators, with propagated standard error.
pub fn chsh(table: &FreqTable16, convention: SignConvention) -> Result<Estimate> {
    let mut value = 0.0;
    let mut var = 0.0;
    for a in 0..2 {
        for b in 0..2 {
            let e = correlator(table, a as u8, b as u8)?;
            value += convention.sign(a, b) * e.value;
            var += e.se * e.se;
        }
    }
    debug_assert!(value.abs() <= 4.0);
    Ok(Estimate {
        value,
        se: var.sqrt(),
    })
}

/// CHSH value on an exact probability table.
pub fn chsh_exact(p: &ProbTable16, convention: SignConvention) -> f64 {
    (0..2)
        .flat_map(|a| (0..2).map(move |b| (a, b)))
        .map(|(a, b)| convention.sign(a, b) * correlator_exact(p, a, b))
        .sum()
}

/// Largest |CHSH| reachable by deterministic local strategies `A = f(a)`,
/// `B = g(b)`: the local-hidden-variable bound for the convention.
pub fn lhv_max_chsh(convention: SignConvention) -> f64 {
    let mut best = 0.0f64;
    for f in 0..4u8 {
        for g in 0..4u8 {
            let mut s = 0.0;
            for a in 0..2 {
                for b in 0..2 {
                    let out_a = i32::from(f >> a & 1);
                    let out_b = i32::from(g >> b & 1);
                    let e = f64::from(1 - 2 * ((out_a + out_b) % 2));
                    s += convention.sign(a, b) * e;
                }
            }
            best = best.max(s.abs());
        }
    }
    best
}

/// Outcome of a named hypothesis test; `pass` means the null hypothesis is
/// retained at the chosen level.
#[derive(Debug, Clone, Serialize)]
pub struct TestOutcome {
    pub name: String,
    pub statistic: f64,
    pub p_value: f64,
    pub pass: bool,
}

/// Pearson goodness of fit of `table` against `target`, conditioned per
/// settings stratum (the settings marginal itself is not tested).
///
/// A cell with zero expected count but nonzero observed count fails
/// automatically.
pub fn chi_square_match(
    table: &FreqTable16,
    target: &ProbTable16,
    alpha: f64,
) -> Result<TestOutcome> {
    if table.total() == 0 {
        return Err(Error::EmptyEnsemble);
    }
    let mut statistic = 0.0;
    let mut df = 0usize;
    for a in 0..2 {
        for b in 0..2 {
            let n = table.stratum_total(a as u8, b as u8) as f64;
            let stratum_p = target.stratum(a, b);
            if n == 0.0 {
                continue;
            }
            if stratum_p <= 0.0 {
                return Ok(TestOutcome {
                    name: "chi_square_match".into(),
                    statistic: f64::INFINITY,
                    p_value: 0.0,
                    pass: false,
                });
            }
            let mut live_cells = 0usize;
            for x in 0..2 {
                for y in 0..2 {
                    let observed = table.count(a as u8, b as u8, x as u8, y as u8) as f64;
                    let expected = n * target.cell(a, b, x, y) / stratum_p;
                    if expected <= 0.0 {
                        if observed > 0.0 {
                            return Ok(TestOutcome {
                                name: "chi_square_match".into(),
                                statistic: f64::INFINITY,
                                p_value: 0.0,
                                pass: false,
                            });
                        }
                        continue;
                    }
                    live_cells += 1;
                    statistic += (observed - expected).powi(2) / expected;
                }
            }
            df += live_cells.saturating_sub(1);
        }
    }
    let p_value = chi_square_sf(statistic, df);
    Ok(TestOutcome {
        name: "chi_square_match".into(),
        statistic,
        p_value,
        pass: p_value >= alpha,
    })
}

/// Two-sample chi-square test of homogeneity across the two tables,
/// conditioned per settings stratum.
pub fn chi_square_homogeneity(
    left: &FreqTable16,
    right: &FreqTable16,
    alpha: f64,
) -> Result<TestOutcome> {
    if left.total() == 0 || right.total() == 0 {
        return Err(Error::EmptyEnsemble);
    }
    let mut statistic = 0.0;
    let mut df = 0usize;
    for a in 0..2u8 {
        for b in 0..2u8 {
            let n1 = left.stratum_total(a, b) as f64;
            let n2 = right.stratum_total(a, b) as f64;
            if n1 == 0.0 || n2 == 0.0 {
                continue;
            }
            let mut live_cells = 0usize;
            for x in 0..2u8 {
                for y in 0..2u8 {
                    let o1 = left.count(a, b, x, y) as f64;
                    let o2 = right.count(a, b, x, y) as f64;
                    let pooled = (o1 + o2) / (n1 + n2);
                    if pooled <= 0.0 {
                        continue;
                    }
                    live_cells += 1;
                    let (e1, e2) = (n1 * pooled, n2 * pooled);
                    statistic += (o1 - e1).powi(2) / e1 + (o2 - e2).powi(2) / e2;
                }
            }
            df += live_cells.saturating_sub(1);
        }
    }
    let p_value = chi_square_sf(statistic, df);
    Ok(TestOutcome {
        name: "chi_square_homogeneity".into(),
        statistic,
        p_value,
        pass: p_value >= alpha,
    })
}

/// Chi-square independence test between two finite-domain dataset columns,
/// optionally conditioned on `given = (variable, value)`.
pub fn independence_test(
    dataset: &Dataset,
    x: &str,
    y: &str,
    given: Option<(&str, usize)>,
    alpha: f64,
) -> Result<TestOutcome> {
    let xi = dataset.column_index(x)?;
    let yi = dataset.column_index(y)?;
    let filter = given
        .map(|(name, value)| dataset.column_index(name).map(|idx| (idx, value)))
        .transpose()?;
    let (x_card, y_card) = (dataset.cardinality(xi), dataset.cardinality(yi));
    let mut counts = vec![vec![0u64; y_card]; x_card];
    let mut n = 0u64;
    for row in dataset.rows() {
        if let Some((idx, value)) = filter {
            if row.values[idx] != value {
                continue;
            }
        }
        counts[row.values[xi]][row.values[yi]] += 1;
        n += 1;
    }
    if n == 0 {
        return Err(Error::EmptySelection);
    }
    let row_totals: Vec<u64> = counts.iter().map(|r| r.iter().sum()).collect();
    let col_totals: Vec<u64> =
        (0..y_card).map(|c| counts.iter().map(|r| r[c]).sum()).collect();
    let mut statistic = 0.0;
    for (r, row) in counts.iter().enumerate() {
        for (c, &observed) in row.iter().enumerate() {
            let expected = row_totals[r] as f64 * col_totals[c] as f64 / n as f64;
            if expected > 0.0 {
                statistic += (observed as f64 - expected).powi(2) / expected;
            }
        }
    }
    let live_rows = row_totals.iter().filter(|&&t| t > 0).count();
    let live_cols = col_totals.iter().filter(|&&t| t > 0).count();
    let df = live_rows.saturating_sub(1) * live_cols.saturating_sub(1);
    let p_value = chi_square_sf(statistic, df);
    Ok(TestOutcome {
        name: format!("independence({x}, {y})"),
        statistic,
        p_value,
        pass: p_value >= alpha,
    })
}

/// Two-proportion z-test for `k1/n1` versus `k2/n2`.
pub fn two_proportion_test(k1: u64, n1: u64, k2: u64, n2: u64, alpha: f64) -> TestOutcome {
    let (p1, p2) = (k1 as f64 / n1 as f64, k2 as f64 / n2 as f64);
    let pooled = (k1 + k2) as f64 / (n1 + n2) as f64;
    let se = (pooled * (1.0 - pooled) * (1.0 / n1 as f64 + 1.0 / n2 as f64)).sqrt();
    let z = if se > 0.0 { (p1 - p2) / se } else { 0.0 };
    let p_value = normal_sf_two_sided(z);
    TestOutcome {
        name: "two_proportion".into(),
        statistic: z,
        p_value,
        pass: p_value >= alpha,
    }
}

/// Largest wing-marginal deviation across the other wing's settings, as
/// `(max |z|, max |delta p|)`.
pub fn no_signalling_deviation(table: &FreqTable16) -> (f64, f64) {
    let mut max_z = 0.0f64;
    let mut max_dev = 0.0f64;
    let mut compare = |k1: u64, n1: u64, k2: u64, n2: u64| {
        if n1 == 0 || n2 == 0 {
            return;
        }
        let outcome = two_proportion_test(k1, n1, k2, n2, DEFAULT_ALPHA);
        max_z = max_z.max(outcome.statistic.abs());
        max_dev = max_dev.max((k1 as f64 / n1 as f64 - k2 as f64 / n2 as f64).abs());
    };
    for s in 0..2u8 {
        // Alice's marginal at setting s across Bob's settings.
        let ones = |b: u8| table.count(s, b, 1, 0) + table.count(s, b, 1, 1);
        compare(ones(0), table.stratum_total(s, 0), ones(1), table.stratum_total(s, 1));
        // Bob's marginal at setting s across Alice's settings.
        let ones = |a: u8| table.count(a, s, 0, 1) + table.count(a, s, 1, 1);
        compare(ones(0), table.stratum_total(0, s), ones(1), table.stratum_total(1, s));
    }
    (max_z, max_dev)
}

/// Summary statistics for one ensemble's sixteen-cell table.
#[derive(Debug, Clone, Serialize, Default)]
pub struct StatReport {
    pub chsh: Option<Estimate>,
    pub correlators: Option<[[Estimate; 2]; 2]>,
    pub no_signalling_max_dev: Option<f64>,
    pub tests: Vec<TestOutcome>,
    pub probes: BTreeMap<String, f64>,
}

impl StatReport {
    pub fn for_table(table: &FreqTable16, convention: SignConvention) -> Result<Self> {
        let correlators = [
            [correlator(table, 0, 0)?, correlator(table, 0, 1)?],
            [correlator(table, 1, 0)?, correlator(table, 1, 1)?],
        ];
        let (max_z, _) = no_signalling_deviation(table);
        Ok(StatReport {
            chsh: Some(chsh(table, convention)?),
            correlators: Some(correlators),
            no_signalling_max_dev: Some(max_z),
            tests: Vec::new(),
            probes: BTreeMap::new(),
        })
    }
}

#[cfg(test)]
mod tests;
