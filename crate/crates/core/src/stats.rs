//! Confidence intervals and the small set of hypothesis tests used by the
//! harnesses. Distribution functions come from `statrs`.

use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF, Discrete, DiscreteCDF, Normal, Poisson};

/// Two-sided 99% standard normal quantile.
pub const Z_99: f64 = 2.5758293035489004;

/// Default significance level of every report.
pub const DEFAULT_ALPHA: f64 = 0.01;

/// Minimum expected count per category before pooling.
pub const MIN_EXPECTED: f64 = 5.0;

/// Two-sided standard normal quantile for level `1 - alpha`.
pub fn z_for_alpha(alpha: f64) -> f64 {
    let normal = Normal::new(0.0, 1.0).expect("standard normal");
    normal.inverse_cdf(1.0 - alpha / 2.0)
}

/// Wilson score interval for `successes` out of `n`.
pub fn wilson(successes: u64, n: u64, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n_f = n as f64;
    let p = successes as f64 / n_f;
    let z2 = z * z;
    let denom = 1.0 + z2 / n_f;
    let center = (p + z2 / (2.0 * n_f)) / denom;
    let half = z * (p * (1.0 - p) / n_f + z2 / (4.0 * n_f * n_f)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Upper tail of the standard normal.
pub fn normal_sf(x: f64) -> f64 {
    Normal::new(0.0, 1.0).expect("standard normal").sf(x)
}

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    Normal::new(0.0, 1.0).expect("standard normal").cdf(x)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TestResult {
    pub statistic: f64,
    pub df: usize,
    pub p_value: f64,
}

impl TestResult {
    /// Degenerate outcome: nothing to distinguish.
    pub fn trivial() -> Self {
        TestResult {
            statistic: 0.0,
            df: 0,
            p_value: 1.0,
        }
    }

    pub fn passes(&self, alpha: f64) -> bool {
        self.p_value > alpha
    }
}

fn chi2_sf(statistic: f64, df: usize) -> f64 {
    if df == 0 {
        return 1.0;
    }
    ChiSquared::new(df as f64)
        .expect("positive df")
        .sf(statistic)
}

/// Two-sided pooled two-proportion z-test.
pub fn two_proportion(x1: u64, n1: u64, x2: u64, n2: u64) -> TestResult {
    if n1 == 0 || n2 == 0 {
        return TestResult::trivial();
    }
    let (n1f, n2f) = (n1 as f64, n2 as f64);
    let pooled = (x1 + x2) as f64 / (n1f + n2f);
    let var = pooled * (1.0 - pooled) * (1.0 / n1f + 1.0 / n2f);
    if var <= 0.0 {
        // both samples all-hit or all-miss
        return TestResult::trivial();
    }
    let z = (x1 as f64 / n1f - x2 as f64 / n2f) / var.sqrt();
    TestResult {
        statistic: z,
        df: 1,
        p_value: (2.0 * normal_sf(z.abs())).min(1.0),
    }
}

/// Pearson statistic of an `r x c` table, after merging trailing rows and
/// columns whose smallest expected count is below [`MIN_EXPECTED`]. Rows
/// and columns are assumed ordered (e.g. by count value), so merging the
/// tail amounts to capping.
fn pooled_table(mut table: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    fn expected_min_row(t: &[Vec<f64>], i: usize) -> f64 {
        let total: f64 = t.iter().flatten().sum();
        let row: f64 = t[i].iter().sum();
        (0..t[0].len())
            .map(|j| row * t.iter().map(|r| r[j]).sum::<f64>() / total)
            .fold(f64::INFINITY, f64::min)
    }
    let transpose = |t: &Vec<Vec<f64>>| -> Vec<Vec<f64>> {
        (0..t[0].len())
            .map(|j| t.iter().map(|r| r[j]).collect())
            .collect()
    };
    // drop empty rows/columns first
    table.retain(|r| r.iter().sum::<f64>() > 0.0);
    if table.is_empty() {
        return table;
    }
    let mut t = transpose(&table);
    t.retain(|c| c.iter().sum::<f64>() > 0.0);
    table = transpose(&t);
    for _ in 0..2 {
        while table.len() > 1 && expected_min_row(&table, table.len() - 1) < MIN_EXPECTED {
            let last = table.pop().expect("nonempty");
            let prev = table.last_mut().expect("at least one row");
            for (p, l) in prev.iter_mut().zip(last) {
                *p += l;
            }
        }
        table = transpose(&table);
    }
    table
}

fn pearson(table: &[Vec<f64>]) -> TestResult {
    if table.len() < 2 || table[0].len() < 2 {
        return TestResult::trivial();
    }
    let total: f64 = table.iter().flatten().sum();
    let rows: Vec<f64> = table.iter().map(|r| r.iter().sum()).collect();
    let cols: Vec<f64> = (0..table[0].len())
        .map(|j| table.iter().map(|r| r[j]).sum())
        .collect();
    let mut stat = 0.0;
    for (i, r) in table.iter().enumerate() {
        for (j, &obs) in r.iter().enumerate() {
            let exp = rows[i] * cols[j] / total;
            if exp > 0.0 {
                stat += (obs - exp).powi(2) / exp;
            }
        }
    }
    let df = (table.len() - 1) * (table[0].len() - 1);
    TestResult {
        statistic: stat,
        df,
        p_value: chi2_sf(stat, df),
    }
}

/// Chi-square test of independence on an `r x c` contingency table with
/// ordered categories; sparse trailing categories are pooled.
pub fn chi2_independence(table: &[Vec<u64>]) -> TestResult {
    if table.is_empty() || table[0].is_empty() {
        return TestResult::trivial();
    }
    let t: Vec<Vec<f64>> = table
        .iter()
        .map(|r| r.iter().map(|&x| x as f64).collect())
        .collect();
    pearson(&pooled_table(t))
}

/// Chi-square homogeneity test of two category-count vectors (same
/// category order). Sparse categories are pooled into one bin, which is
/// merged into the smallest remaining bin if still sparse. Symmetric in its
/// arguments.
pub fn chi2_homogeneity(counts1: &[u64], counts2: &[u64]) -> TestResult {
    assert_eq!(counts1.len(), counts2.len(), "category vectors must align");
    let n1: u64 = counts1.iter().sum();
    let n2: u64 = counts2.iter().sum();
    if n1 == 0 || n2 == 0 {
        return TestResult::trivial();
    }
    let total = (n1 + n2) as f64;
    let share = n1.min(n2) as f64 / total;
    let mut kept: Vec<[f64; 2]> = Vec::new();
    let mut pooled = [0.0, 0.0];
    for (&a, &b) in counts1.iter().zip(counts2) {
        let col = (a + b) as f64;
        if col == 0.0 {
            continue;
        }
        if col * share < MIN_EXPECTED {
            pooled[0] += a as f64;
            pooled[1] += b as f64;
        } else {
            kept.push([a as f64, b as f64]);
        }
    }
    if pooled[0] + pooled[1] > 0.0 {
        if (pooled[0] + pooled[1]) * share < MIN_EXPECTED && !kept.is_empty() {
            let smallest = (0..kept.len())
                .min_by(|&i, &j| (kept[i][0] + kept[i][1]).total_cmp(&(kept[j][0] + kept[j][1])))
                .expect("nonempty");
            kept[smallest][0] += pooled[0];
            kept[smallest][1] += pooled[1];
        } else {
            kept.push(pooled);
        }
    }
    let table: Vec<Vec<f64>> = vec![
        kept.iter().map(|c| c[0]).collect(),
        kept.iter().map(|c| c[1]).collect(),
    ];
    pearson(&table)
}

/// Goodness of fit of observed counts to Poisson(`mean`). Values are binned
/// as `0, 1, .., k-1, >= k` with `k` chosen so every bin has expected count
/// at least [`MIN_EXPECTED`]; one degree of freedom is charged for the
/// estimated mean.
pub fn poisson_gof(samples: &[u64], mean: f64) -> TestResult {
    let n = samples.len() as f64;
    if samples.is_empty() {
        return TestResult::trivial();
    }
    if mean <= 0.0 {
        let ok = samples.iter().all(|&x| x == 0);
        return TestResult {
            statistic: if ok { 0.0 } else { f64::INFINITY },
            df: 0,
            p_value: if ok { 1.0 } else { 0.0 },
        };
    }
    let law = Poisson::new(mean).expect("positive mean");
    // bins 0..k-1 individually, tail bin >= k
    let mut k = 0u64;
    while n * law.pmf(k) >= MIN_EXPECTED && n * law.sf(k) >= MIN_EXPECTED {
        k += 1;
    }
    if k == 0 {
        return TestResult::trivial();
    }
    let mut observed = vec![0.0; k as usize + 1];
    for &x in samples {
        observed[x.min(k) as usize] += 1.0;
    }
    let mut expected: Vec<f64> = (0..k).map(|j| n * law.pmf(j)).collect();
    expected.push(n * law.sf(k - 1));
    let stat: f64 = observed
        .iter()
        .zip(&expected)
        .map(|(o, e)| (o - e).powi(2) / e)
        .sum();
    let df = (observed.len()).saturating_sub(2);
    TestResult {
        statistic: stat,
        df,
        p_value: chi2_sf(stat, df),
    }
}

/// Per-test level for `tests` simultaneous tests at family level `alpha`.
pub fn bonferroni(alpha: f64, tests: usize) -> f64 {
    alpha / tests.max(1) as f64
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct MeanVar {
    pub mean: f64,
    pub variance: f64,
}

/// Sample mean and unbiased variance.
pub fn mean_var(samples: &[u64]) -> MeanVar {
    let n = samples.len() as f64;
    if samples.is_empty() {
        return MeanVar::default();
    }
    let mean = samples.iter().map(|&x| x as f64).sum::<f64>() / n;
    let variance = if samples.len() > 1 {
        samples
            .iter()
            .map(|&x| (x as f64 - mean).powi(2))
            .sum::<f64>()
            / (n - 1.0)
    } else {
        0.0
    };
    MeanVar { mean, variance }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn z99_matches_quantile() {
        assert!((z_for_alpha(0.01) - Z_99).abs() < 1e-9);
    }

    #[test]
    fn wilson_reference_values() {
        // closed-form check against the score-interval formula at p = 0.5
        let (lo, hi) = wilson(50, 100, 1.959963984540054);
        assert!((lo - 0.4038315).abs() < 1e-6, "{lo}");
        assert!((hi - 0.5961685).abs() < 1e-6, "{hi}");
        let (lo, hi) = wilson(0, 10, Z_99);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.0 && hi < 0.5);
    }

    #[test]
    fn identical_samples_give_p_one() {
        let a = [40, 30, 20, 10, 3, 1];
        let r = chi2_homogeneity(&a, &a);
        assert!((r.p_value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn homogeneity_is_symmetric() {
        let a = [400, 300, 200, 100, 3, 1, 0];
        let b = [380, 330, 190, 90, 7, 0, 2];
        let ab = chi2_homogeneity(&a, &b);
        let ba = chi2_homogeneity(&b, &a);
        assert!((ab.statistic - ba.statistic).abs() < 1e-9);
        assert_eq!(ab.df, ba.df);
    }

    #[test]
    fn two_proportion_detects_difference() {
        assert!(two_proportion(500, 1000, 600, 1000).p_value < 1e-4);
        assert!(two_proportion(500, 1000, 505, 1000).p_value > 0.5);
        assert_eq!(two_proportion(0, 10, 0, 10).p_value, 1.0);
    }

    #[test]
    fn independence_on_product_table() {
        let t = vec![vec![100, 200, 100], vec![50, 100, 50]];
        let r = chi2_independence(&t);
        assert!(r.statistic.abs() < 1e-9);
        let dep = vec![vec![200, 10], vec![10, 200]];
        assert!(chi2_independence(&dep).p_value < 1e-10);
    }

    #[test]
    fn poisson_gof_exact_frequencies() {
        // counts laid out at their expected frequencies fit perfectly
        let law = Poisson::new(1.0).unwrap();
        let mut samples = Vec::new();
        for k in 0..8u64 {
            let c = (10_000.0 * law.pmf(k)).round() as usize;
            samples.extend(std::iter::repeat_n(k, c));
        }
        let r = poisson_gof(&samples, 1.0);
        assert!(r.p_value > 0.99, "{r:?}");
        assert!(poisson_gof(&samples, 2.0).p_value < 1e-10);
        assert_eq!(poisson_gof(&[0, 0, 0], 0.0).p_value, 1.0);
    }

    #[test]
    fn moments() {
        let mv = mean_var(&[1, 2, 3, 4]);
        assert_eq!(mv.mean, 2.5);
        assert!((mv.variance - 5.0 / 3.0).abs() < 1e-12);
    }
}
