//! Law comparisons between constructive models, intensity recovery from
//! hitting probabilities, the independent-increments characterization of
//! Poisson processes, and the sigma-finite decomposition over a finite
//! pool of cells.
//!
//! Every report uses one significance level and Bonferroni-corrects it over
//! the tests it contains; a report passes when no test rejects.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hitting::HittingEstimate;
use crate::models::{
    analytic_hitting, detector_threshold, hits_with_positive_probability, prob_infinite_count,
    sample_replicate, tail_bound, CrSetModel,
};
use crate::rng::derive_seed;
use crate::setalg::{IntervalSet, RealSet, Region};
use crate::stats::{
    bonferroni, chi2_homogeneity, chi2_independence, poisson_gof, two_proportion, TestResult, Z_99,
};

/// Per-replicate counts `N_{A_1}, .., N_{A_k}` of one model run.
#[derive(Clone, Debug, Serialize)]
pub struct CountSamples {
    pub labels: Vec<String>,
    pub seed: u64,
    pub depth: u64,
    /// `counts[i][j]` is `N_{A_j}` in replicate `i`.
    pub counts: Vec<Vec<u64>>,
}

impl CountSamples {
    pub fn n_samples(&self) -> u64 {
        self.counts.len() as u64
    }

    pub fn column(&self, j: usize) -> Vec<u64> {
        self.counts.iter().map(|row| row[j]).collect()
    }

    /// Replicates with `N_{A_j} > 0`.
    pub fn hits(&self, j: usize) -> u64 {
        self.counts.iter().filter(|row| row[j] > 0).count() as u64
    }
}

/// Draws `n_samples` replicates and records the count in every set.
/// Replicates run in parallel and are stored in replicate order.
pub fn sample_counts<A: Region + fmt::Display + Sync>(
    model: &CrSetModel,
    sets: &[A],
    n_samples: u64,
    depth: u64,
    seed: u64,
) -> Result<CountSamples> {
    if n_samples == 0 {
        return Err(Error::field("n", "need at least one sample"));
    }
    if depth == 0 {
        return Err(Error::field("depth", "must be at least 1"));
    }
    model.validate()?;
    let counts = (0..n_samples as usize)
        .into_par_iter()
        .map(|i| {
            let r = sample_replicate(model, depth, seed, i as u64);
            sets.iter().map(|a| r.count_in(a)).collect()
        })
        .collect();
    Ok(CountSamples {
        labels: sets.iter().map(|a| a.to_string()).collect(),
        seed,
        depth,
        counts,
    })
}

/// Sets and count cap of a finite-dimensional comparison.
#[derive(Clone, Debug, Serialize)]
pub struct FidiSpec {
    pub sets: Vec<IntervalSet>,
    /// Counts `>= cap` are pooled into one category.
    pub cap: u64,
}

impl FidiSpec {
    pub fn new(sets: Vec<IntervalSet>, cap: u64) -> Result<Self> {
        if sets.is_empty() {
            return Err(Error::field("sets", "need at least one set"));
        }
        if cap == 0 {
            return Err(Error::field("cap", "must be at least 1"));
        }
        Ok(FidiSpec { sets, cap })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FidiReport {
    pub categories: usize,
    pub test: TestResult,
    pub alpha: f64,
    pub pass: bool,
}

fn joint_key(row: &[u64], cap: u64) -> Vec<u64> {
    row.iter().map(|&c| c.min(cap)).collect()
}

/// Chi-square homogeneity test of the joint capped count vectors of two
/// sample arrays over the same sets.
pub fn fidi_compare(
    s1: &CountSamples,
    s2: &CountSamples,
    cap: u64,
    alpha: f64,
) -> Result<FidiReport> {
    if s1.labels.len() != s2.labels.len() {
        return Err(Error::field(
            "sets",
            "both samples must count the same sets",
        ));
    }
    let mut table: BTreeMap<Vec<u64>, [u64; 2]> = BTreeMap::new();
    for row in &s1.counts {
        table.entry(joint_key(row, cap)).or_default()[0] += 1;
    }
    for row in &s2.counts {
        table.entry(joint_key(row, cap)).or_default()[1] += 1;
    }
    let c1: Vec<u64> = table.values().map(|c| c[0]).collect();
    let c2: Vec<u64> = table.values().map(|c| c[1]).collect();
    let test = chi2_homogeneity(&c1, &c2);
    Ok(FidiReport {
        categories: table.len(),
        test,
        alpha,
        pass: test.passes(alpha),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct RingRow {
    pub set: String,
    pub first: HittingEstimate,
    pub second: HittingEstimate,
    pub test: TestResult,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct RingReport {
    pub rows: Vec<RingRow>,
    pub alpha: f64,
    pub per_test_alpha: f64,
    pub pass: bool,
}

fn estimate_from(
    model: &CrSetModel,
    s: &CountSamples,
    j: usize,
    a: &impl Region,
) -> HittingEstimate {
    HittingEstimate::from_counts(
        s.labels[j].clone(),
        s.hits(j),
        s.n_samples(),
        s.depth,
        Some(analytic_hitting(model, a)),
        tail_bound(model, a, s.depth),
    )
}

/// Per-set two-proportion comparison of hitting frequencies, computed from
/// count samples of both models over the same sets.
fn compare_hitting<A: Region>(
    models: (&CrSetModel, &CrSetModel),
    samples: (&CountSamples, &CountSamples),
    sets: &[A],
    per_test_alpha: f64,
) -> Vec<RingRow> {
    sets.iter()
        .enumerate()
        .map(|(j, a)| {
            let first = estimate_from(models.0, samples.0, j, a);
            let second = estimate_from(models.1, samples.1, j, a);
            let test = two_proportion(first.hits, first.n_samples, second.hits, second.n_samples);
            RingRow {
                set: samples.0.labels[j].clone(),
                pass: test.passes(per_test_alpha),
                first,
                second,
                test,
            }
        })
        .collect()
}

/// Seeds of the two runs in a comparison: independent streams.
fn run_seeds(seed: u64) -> (u64, u64) {
    (derive_seed(seed, 1), derive_seed(seed, 2))
}

/// Hitting-frequency agreement of two models on ring sets.
pub fn hitting_compare_on_ring(
    m1: &CrSetModel,
    m2: &CrSetModel,
    ring_sets: &[IntervalSet],
    n_samples: u64,
    depth: u64,
    seed: u64,
    alpha: f64,
) -> Result<RingReport> {
    let (s1, s2) = run_seeds(seed);
    let c1 = sample_counts(m1, ring_sets, n_samples, depth, s1)?;
    let c2 = sample_counts(m2, ring_sets, n_samples, depth, s2)?;
    let per_test_alpha = bonferroni(alpha, ring_sets.len());
    let rows = compare_hitting((m1, m2), (&c1, &c2), ring_sets, per_test_alpha);
    Ok(RingReport {
        pass: rows.iter().all(|r| r.pass),
        rows,
        alpha,
        per_test_alpha,
    })
}

/// Ring agreement and fidi agreement of one seeded run of two models, with
/// one Bonferroni correction over all tests.
#[derive(Clone, Debug, Serialize)]
pub struct UniquenessReport {
    pub ring: RingReport,
    pub fidi: FidiReport,
    pub pass: bool,
}

#[allow(clippy::too_many_arguments)]
pub fn uniqueness_check(
    m1: &CrSetModel,
    m2: &CrSetModel,
    ring_sets: &[IntervalSet],
    fidi: &FidiSpec,
    n_samples: u64,
    depth: u64,
    seed: u64,
    alpha: f64,
) -> Result<UniquenessReport> {
    let (s1, s2) = run_seeds(seed);
    let mut sets = ring_sets.to_vec();
    sets.extend(fidi.sets.iter().cloned());
    let c1 = sample_counts(m1, &sets, n_samples, depth, s1)?;
    let c2 = sample_counts(m2, &sets, n_samples, depth, s2)?;
    let per_test_alpha = bonferroni(alpha, ring_sets.len() + 1);
    let rows = compare_hitting((m1, m2), (&c1, &c2), ring_sets, per_test_alpha);
    let k = ring_sets.len();
    let project = |c: &CountSamples| CountSamples {
        labels: c.labels[k..].to_vec(),
        seed: c.seed,
        depth: c.depth,
        counts: c.counts.iter().map(|r| r[k..].to_vec()).collect(),
    };
    let fidi = fidi_compare(&project(&c1), &project(&c2), fidi.cap, per_test_alpha)?;
    let ring = RingReport {
        pass: rows.iter().all(|r| r.pass),
        rows,
        alpha,
        per_test_alpha,
    };
    Ok(UniquenessReport {
        pass: ring.pass && fidi.pass,
        ring,
        fidi,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct NullTransferRow {
    pub set: String,
    pub first_positive: bool,
    pub second_positive: bool,
    pub first_hits: u64,
    pub second_hits: u64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClosedSetReport {
    pub closed: Vec<RingRow>,
    pub null_transfer: Vec<NullTransferRow>,
    pub chains: Vec<Vec<RingRow>>,
    pub fidi: FidiReport,
    pub tests: usize,
    pub per_test_alpha: f64,
    pub pass: bool,
}

/// Compares two models on closed sets, checks that null sets of one are
/// null for the other on the probe family, compares along decreasing open
/// chains, and finally compares finite-dimensional distributions.
#[allow(clippy::too_many_arguments)]
pub fn closed_set_compare(
    m1: &CrSetModel,
    m2: &CrSetModel,
    closed_sets: &[RealSet],
    null_probes: &[RealSet],
    gdelta_chains: &[Vec<RealSet>],
    fidi: &FidiSpec,
    n_samples: u64,
    depth: u64,
    seed: u64,
    alpha: f64,
) -> Result<ClosedSetReport> {
    for (i, c) in gdelta_chains.iter().enumerate() {
        if c.windows(2).any(|w| !w[1].is_subset(&w[0])) {
            return Err(Error::field(format!("chains[{i}]"), "must be decreasing"));
        }
    }
    let mut sets: Vec<RealSet> = closed_sets.to_vec();
    sets.extend(null_probes.iter().cloned());
    for c in gdelta_chains {
        sets.extend(c.iter().cloned());
    }
    let n_fixed = sets.len();
    sets.extend(fidi.sets.iter().map(RealSet::from));
    let (s1, s2) = run_seeds(seed);
    let c1 = sample_counts(m1, &sets, n_samples, depth, s1)?;
    let c2 = sample_counts(m2, &sets, n_samples, depth, s2)?;

    let chain_sets: usize = gdelta_chains.iter().map(Vec::len).sum();
    let tests = closed_sets.len() + chain_sets + 1;
    let per_test_alpha = bonferroni(alpha, tests);
    let rows = compare_hitting((m1, m2), (&c1, &c2), &sets[..n_fixed], per_test_alpha);
    let mut rows = rows.into_iter();
    let closed: Vec<RingRow> = rows.by_ref().take(closed_sets.len()).collect();
    let _probes: Vec<RingRow> = rows.by_ref().take(null_probes.len()).collect();
    let chains: Vec<Vec<RingRow>> = gdelta_chains
        .iter()
        .map(|c| rows.by_ref().take(c.len()).collect())
        .collect();

    let offset = closed_sets.len();
    let null_transfer: Vec<NullTransferRow> = null_probes
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let first_positive = hits_with_positive_probability(m1, a);
            let second_positive = hits_with_positive_probability(m2, a);
            let (h1, h2) = (c1.hits(offset + i), c2.hits(offset + i));
            // a null set must never be hit; the closed forms must agree
            let pass = first_positive == second_positive
                && (first_positive || h1 == 0)
                && (second_positive || h2 == 0);
            NullTransferRow {
                set: a.to_string(),
                first_positive,
                second_positive,
                first_hits: h1,
                second_hits: h2,
                pass,
            }
        })
        .collect();

    let project = |c: &CountSamples| CountSamples {
        labels: c.labels[n_fixed..].to_vec(),
        seed: c.seed,
        depth: c.depth,
        counts: c.counts.iter().map(|r| r[n_fixed..].to_vec()).collect(),
    };
    let fidi = fidi_compare(&project(&c1), &project(&c2), fidi.cap, per_test_alpha)?;
    let pass = closed.iter().all(|r| r.pass)
        && null_transfer.iter().all(|r| r.pass)
        && chains.iter().flatten().all(|r| r.pass)
        && fidi.pass;
    Ok(ClosedSetReport {
        closed,
        null_transfer,
        chains,
        fidi,
        tests,
        per_test_alpha,
        pass,
    })
}

/// `μ̂(A) = -log(1 - T(A))`.
pub fn recover_mass(t: f64) -> f64 {
    if t >= 1.0 {
        f64::INFINITY
    } else {
        -(-t).ln_1p()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RecoveredMass {
    pub set: String,
    pub t: f64,
    pub mass: f64,
    /// Delta-method variance of `mass` from the binomial estimate of `T`.
    pub variance: f64,
    pub infinite: bool,
}

impl RecoveredMass {
    pub fn from_estimate(e: &HittingEstimate) -> Self {
        let p = e.p_hat;
        let mass = recover_mass(p);
        let variance = if p < 1.0 {
            p / (e.n_samples as f64 * (1.0 - p))
        } else {
            f64::INFINITY
        };
        RecoveredMass {
            set: e.set.clone(),
            t: p,
            mass,
            variance,
            infinite: mass.is_infinite(),
        }
    }

    /// From an exact `T(A)`: no sampling variance.
    pub fn exact(set: impl Into<String>, t: f64) -> Self {
        let mass = recover_mass(t);
        RecoveredMass {
            set: set.into(),
            t,
            mass,
            variance: 0.0,
            infinite: mass.is_infinite(),
        }
    }
}

/// Recovers `μ̂` on each set from its hitting estimate.
pub fn recover_intensity(estimates: &[HittingEstimate]) -> Vec<RecoveredMass> {
    estimates.iter().map(RecoveredMass::from_estimate).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct AdditivityRow {
    pub a: RecoveredMass,
    pub b: RecoveredMass,
    pub union: RecoveredMass,
    /// `μ̂(A) + μ̂(B) - μ̂(A ∪ B)`.
    pub defect: f64,
    /// `z · sqrt(var A + var B + var A∪B)`.
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct AdditivityReport {
    pub rows: Vec<AdditivityRow>,
    pub pass: bool,
}

/// Checks `μ̂(A) + μ̂(B) = μ̂(A ∪ B)` on disjoint pairs, all sets estimated
/// from one batch of replicates. Covariances are dropped from the
/// propagated variance, which overstates it (the union's estimate is
/// positively correlated with both parts).
pub fn additivity_check(
    model: &CrSetModel,
    pairs: &[(IntervalSet, IntervalSet)],
    n_samples: u64,
    depth: u64,
    seed: u64,
) -> Result<AdditivityReport> {
    let mut sets = Vec::with_capacity(3 * pairs.len());
    for (i, (a, b)) in pairs.iter().enumerate() {
        if !a.is_disjoint(b) {
            return Err(Error::field(
                format!("pairs[{i}]"),
                format!("{a} and {b} overlap"),
            ));
        }
        sets.extend([a.clone(), b.clone(), a.union(b)]);
    }
    let est = crate::hitting::estimate_hitting_all(model, &sets, n_samples, depth, seed)?;
    let rows: Vec<AdditivityRow> = est
        .chunks(3)
        .map(|c| {
            let [a, b, u] = [0, 1, 2].map(|i| RecoveredMass::from_estimate(&c[i]));
            let defect = a.mass + b.mass - u.mass;
            let tolerance = Z_99 * (a.variance + b.variance + u.variance).sqrt();
            let pass = if a.infinite || b.infinite || u.infinite {
                u.infinite == (a.infinite || b.infinite)
            } else {
                defect.abs() <= tolerance
            };
            AdditivityRow {
                a,
                b,
                union: u,
                defect,
                tolerance,
                pass,
            }
        })
        .collect();
    Ok(AdditivityReport {
        pass: rows.iter().all(|r| r.pass),
        rows,
    })
}

/// Sibling dyadic cells of `[0, 1)` in index order: `(left, right)` with
/// their union the parent cell.
pub fn dyadic_sibling_pairs(count: usize) -> Vec<(IntervalSet, IntervalSet)> {
    let mut out = Vec::with_capacity(count);
    let mut depth = 1u32;
    while out.len() < count {
        let cells = 1u64 << depth;
        let w = 1.0 / cells as f64;
        for k in (0..cells).step_by(2) {
            if out.len() == count {
                break;
            }
            let x = k as f64 * w;
            out.push((
                IntervalSet::interval(x, x + w).expect("dyadic cell"),
                IntervalSet::interval(x + w, x + 2.0 * w).expect("dyadic cell"),
            ));
        }
        depth += 1;
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct GofRow {
    pub set: String,
    pub mean: f64,
    pub test: TestResult,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct PairRow {
    pub first: String,
    pub second: String,
    pub test: TestResult,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct IncrementsReport {
    pub independence: Vec<PairRow>,
    pub goodness_of_fit: Vec<GofRow>,
    pub per_test_alpha: f64,
    pub pass: bool,
}

/// Largest count kept as its own category in independence tables.
const TABLE_CAP: u64 = 30;

fn contingency(x: &[u64], y: &[u64]) -> Vec<Vec<u64>> {
    let rx = x.iter().copied().max().unwrap_or(0).min(TABLE_CAP) as usize + 1;
    let ry = y.iter().copied().max().unwrap_or(0).min(TABLE_CAP) as usize + 1;
    let mut t = vec![vec![0u64; ry]; rx];
    for (&a, &b) in x.iter().zip(y) {
        t[a.min(TABLE_CAP) as usize][b.min(TABLE_CAP) as usize] += 1;
    }
    t
}

/// Independence of counts on every pair of the (disjoint) sets, and a
/// Poisson fit per set with mean `-log(1 - p̂)` recovered from the hitting
/// frequency. Both kinds must pass.
pub fn independent_increments_poisson_check(
    samples: &CountSamples,
    alpha: f64,
) -> IncrementsReport {
    let k = samples.labels.len();
    let columns: Vec<Vec<u64>> = (0..k).map(|j| samples.column(j)).collect();
    let tests = k * (k - 1) / 2 + k;
    let per_test_alpha = bonferroni(alpha, tests);
    let mut independence = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            let test = chi2_independence(&contingency(&columns[i], &columns[j]));
            independence.push(PairRow {
                first: samples.labels[i].clone(),
                second: samples.labels[j].clone(),
                test,
                pass: test.passes(per_test_alpha),
            });
        }
    }
    let n = samples.n_samples() as f64;
    let goodness_of_fit = (0..k)
        .map(|j| {
            let mean = recover_mass(samples.hits(j) as f64 / n);
            let test = if mean.is_finite() {
                poisson_gof(&columns[j], mean)
            } else {
                // every replicate hit: no finite Poisson mean fits
                TestResult {
                    statistic: f64::INFINITY,
                    df: 0,
                    p_value: 0.0,
                }
            };
            GofRow {
                set: samples.labels[j].clone(),
                mean,
                test,
                pass: test.passes(per_test_alpha),
            }
        })
        .collect::<Vec<_>>();
    let pass = independence.iter().all(|r| r.pass) && goodness_of_fit.iter().all(|r| r.pass);
    IncrementsReport {
        independence,
        goodness_of_fit,
        per_test_alpha,
        pass,
    }
}

/// Samples the model on pairwise disjoint sets and runs
/// [`independent_increments_poisson_check`].
pub fn increments_check(
    model: &CrSetModel,
    sets: &[IntervalSet],
    n_samples: u64,
    depth: u64,
    seed: u64,
    alpha: f64,
) -> Result<IncrementsReport> {
    for (i, a) in sets.iter().enumerate() {
        if sets[i + 1..].iter().any(|b| !a.is_disjoint(b)) {
            return Err(Error::field("sets", format!("{a} overlaps a later set")));
        }
    }
    let samples = sample_counts(model, sets, n_samples, depth, seed)?;
    Ok(independent_increments_poisson_check(&samples, alpha))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CellClass {
    /// Never hit.
    Null,
    /// Hit with positive probability, finitely many points almost surely.
    SigmaFinite,
    /// Infinitely many points with positive probability.
    InfiniteMass,
}

/// How cells are classified.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Classifier {
    /// Closed-form hitting positivity and `P(N = ∞)`.
    Analytic,
    /// Sample-based: a cell is hit if some replicate hits it, and
    /// "infinite" if some replicate puts at least `c_N` points in it at
    /// depth `N`. Misclassifies heavy finite cells as infinite and rarely
    /// hit cells as null.
    Detector {
        n_samples: u64,
        depth: u64,
        seed: u64,
    },
}

#[derive(Clone, Debug, Serialize)]
pub struct CellReport {
    pub cell: IntervalSet,
    pub class: CellClass,
    pub hit_probability: Option<f64>,
    pub prob_infinite: Option<f64>,
    /// Sample-based evidence when the detector is used.
    pub hits: Option<u64>,
    pub detector_hits: Option<u64>,
    pub in_f: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct DecompositionReport {
    pub classifier: Classifier,
    pub threshold: Option<u64>,
    pub cells: Vec<CellReport>,
    /// The sigma-finite part: null cells and the greedily collected
    /// sigma-finite cells.
    pub f: IntervalSet,
    /// Every residual cell is either null or has `P(N = ∞) > 0`.
    pub residual_dichotomy: bool,
}

impl DecompositionReport {
    pub fn sigma_finite_cells(&self) -> Vec<&IntervalSet> {
        self.cells
            .iter()
            .filter(|c| c.class == CellClass::SigmaFinite)
            .map(|c| &c.cell)
            .collect()
    }
}

/// Splits the window covered by `cells` into a sigma-finite part `F` and a
/// residual. Cells are visited in order and a sigma-finite cell joins `F`
/// if it is disjoint from what `F` already holds (greedy maximal disjoint
/// family on the finite pool); null cells join as well.
pub fn decompose(
    model: &CrSetModel,
    cells: &[IntervalSet],
    classifier: Classifier,
) -> Result<DecompositionReport> {
    for (i, a) in cells.iter().enumerate() {
        if a.is_empty() {
            return Err(Error::field(format!("cells[{i}]"), "cell is empty"));
        }
        if cells[i + 1..].iter().any(|b| !a.is_disjoint(b)) {
            return Err(Error::field(
                format!("cells[{i}]"),
                "cells must be pairwise disjoint",
            ));
        }
    }
    let mut reports = Vec::with_capacity(cells.len());
    let mut threshold = None;
    match classifier {
        Classifier::Analytic => {
            for cell in cells {
                let positive = hits_with_positive_probability(model, cell);
                let p_inf = prob_infinite_count(model, cell);
                let class = if !positive {
                    CellClass::Null
                } else if p_inf > 0.0 {
                    CellClass::InfiniteMass
                } else {
                    CellClass::SigmaFinite
                };
                reports.push(CellReport {
                    cell: cell.clone(),
                    class,
                    hit_probability: Some(analytic_hitting(model, cell)),
                    prob_infinite: Some(p_inf),
                    hits: None,
                    detector_hits: None,
                    in_f: false,
                });
            }
        }
        Classifier::Detector {
            n_samples,
            depth,
            seed,
        } => {
            let c = detector_threshold(depth);
            threshold = Some(c);
            let samples = sample_counts(model, cells, n_samples, depth, seed)?;
            for (j, cell) in cells.iter().enumerate() {
                let col = samples.column(j);
                let hits = col.iter().filter(|&&x| x > 0).count() as u64;
                let flagged = col.iter().filter(|&&x| x >= c).count() as u64;
                let class = if hits == 0 {
                    CellClass::Null
                } else if flagged > 0 {
                    CellClass::InfiniteMass
                } else {
                    CellClass::SigmaFinite
                };
                reports.push(CellReport {
                    cell: cell.clone(),
                    class,
                    hit_probability: None,
                    prob_infinite: None,
                    hits: Some(hits),
                    detector_hits: Some(flagged),
                    in_f: false,
                });
            }
        }
    }
    let mut f = IntervalSet::empty();
    for r in &mut reports {
        if r.class != CellClass::InfiniteMass && f.is_disjoint(&r.cell) {
            f = f.union(&r.cell);
            r.in_f = true;
        }
    }
    let residual_dichotomy = reports
        .iter()
        .filter(|r| !r.in_f)
        .all(|r| matches!(r.class, CellClass::Null | CellClass::InfiniteMass));
    Ok(DecompositionReport {
        classifier,
        threshold,
        cells: reports,
        f,
        residual_dichotomy,
    })
}

/// Where two decompositions of the same window disagree, and whether every
/// disagreement lies in cells classified null by one of them.
#[derive(Clone, Debug, Serialize)]
pub struct RefinementCheck {
    pub difference: IntervalSet,
    pub only_null_cells: bool,
}

pub fn compare_decompositions(
    coarse: &DecompositionReport,
    fine: &DecompositionReport,
) -> RefinementCheck {
    let difference = coarse
        .f
        .difference(&fine.f)
        .union(&fine.f.difference(&coarse.f));
    let null_cover = coarse
        .cells
        .iter()
        .chain(&fine.cells)
        .filter(|c| c.class == CellClass::Null)
        .fold(IntervalSet::empty(), |acc, c| acc.union(&c.cell));
    RefinementCheck {
        only_null_cells: difference.is_subset(&null_cover),
        difference,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::builtin_model;
    use crate::setalg::{dyadic_ring_sets, grid};

    fn iv(a: f64, b: f64) -> IntervalSet {
        IntervalSet::interval(a, b).unwrap()
    }

    #[test]
    fn identical_samples_give_p_one() {
        let m = builtin_model("lebesgue01").unwrap();
        let s = sample_counts(&m, &[iv(0.0, 0.5), iv(0.5, 1.0)], 2000, 1, 3).unwrap();
        let r = fidi_compare(&s, &s, 5, 0.01).unwrap();
        assert_eq!(r.test.statistic, 0.0);
        assert_eq!(r.test.p_value, 1.0);
        assert!(r.pass);
    }

    #[test]
    fn fidi_is_symmetric() {
        let m1 = builtin_model("lebesgue01").unwrap();
        let m2 = builtin_model("lebesgue01-split").unwrap();
        let sets = [iv(0.0, 0.3), iv(0.3, 0.8)];
        let a = sample_counts(&m1, &sets, 3000, 40, 1).unwrap();
        let b = sample_counts(&m2, &sets, 3000, 40, 2).unwrap();
        let x = fidi_compare(&a, &b, 4, 0.01).unwrap();
        let y = fidi_compare(&b, &a, 4, 0.01).unwrap();
        assert_eq!(x.test, y.test);
    }

    #[test]
    fn fidi_detects_different_means() {
        let m1 = CrSetModel::poisson(iv(0.0, 1.0), 1.0).unwrap();
        let m2 = CrSetModel::poisson(iv(0.0, 1.0), 2.0).unwrap();
        let sets = [iv(0.0, 1.0)];
        let a = sample_counts(&m1, &sets, 100_000, 1, 5).unwrap();
        let b = sample_counts(&m2, &sets, 100_000, 1, 6).unwrap();
        let r = fidi_compare(&a, &b, 10, 0.01).unwrap();
        assert!(!r.pass);
        assert!(r.test.p_value < 1e-100);
    }

    #[test]
    fn counts_are_replicate_ordered() {
        let m = builtin_model("lebesgue01").unwrap();
        let sets = [iv(0.0, 1.0)];
        let s = sample_counts(&m, &sets, 50, 1, 8).unwrap();
        for (i, row) in s.counts.iter().enumerate() {
            assert_eq!(row[0], sample_replicate(&m, 1, 8, i as u64).len() as u64);
        }
    }

    #[test]
    fn same_model_agrees_on_ring() {
        let m = builtin_model("lebesgue01").unwrap();
        let r = hitting_compare_on_ring(&m, &m, &dyadic_ring_sets(10), 5000, 1, 2, 0.01).unwrap();
        assert!(r.pass);
    }

    #[test]
    fn ring_must_generate() {
        // equal on [0,1), different on [1,2)
        let m1 = CrSetModel::poisson(iv(0.0, 2.0), 1.0).unwrap();
        let m2 = CrSetModel::poisson(iv(0.0, 1.0), 1.0)
            .unwrap()
            .superpose(CrSetModel::poisson(iv(1.0, 2.0), 2.0).unwrap());
        let inside = dyadic_ring_sets(14);
        let r = hitting_compare_on_ring(&m1, &m2, &inside, 20_000, 1, 4, 0.01).unwrap();
        assert!(r.pass);
        let outside = FidiSpec::new(vec![iv(1.0, 1.5), iv(1.5, 2.0)], 6).unwrap();
        let u = uniqueness_check(&m1, &m2, &inside, &outside, 20_000, 1, 4, 0.01).unwrap();
        assert!(u.ring.pass);
        assert!(!u.fidi.pass);
    }

    #[test]
    fn closed_set_comparison_of_two_constructions() {
        let m1 = CrSetModel::example1();
        let m2 = CrSetModel::example1_annuli();
        let closed = vec![
            RealSet::closed([(0.2, 0.5)]).unwrap(),
            RealSet::closed([(-0.6, -0.1), (0.1, 0.15)]).unwrap(),
        ];
        let probes = vec![
            RealSet::closed([(1.5, 2.0)]).unwrap(),
            RealSet::point(0.0).unwrap(),
            RealSet::closed([(0.4, 0.6)]).unwrap(),
        ];
        let chains = vec![vec![
            RealSet::open([(0.1, 0.6)]).unwrap(),
            RealSet::open([(0.15, 0.55)]).unwrap(),
            RealSet::open([(0.19, 0.51)]).unwrap(),
        ]];
        let fidi = FidiSpec::new(vec![iv(0.1, 0.3), iv(0.3, 1.0)], 6).unwrap();
        let r = closed_set_compare(
            &m1, &m2, &closed, &probes, &chains, &fidi, 20_000, 100, 9, 0.01,
        )
        .unwrap();
        assert!(r.pass, "{r:?}");
        assert!(!r.null_transfer[0].first_positive);
        assert_eq!(r.null_transfer[1].first_hits, 0);
    }

    #[test]
    fn recovered_mass_dichotomy() {
        assert_eq!(recover_mass(0.0), 0.0);
        assert_eq!(recover_mass(1.0), f64::INFINITY);
        let a = RecoveredMass::exact("A", 1.0 - (-0.5f64).exp());
        let b = RecoveredMass::exact("B", 1.0 - (-0.5f64).exp());
        let u = RecoveredMass::exact("A∪B", 1.0 - (-1.0f64).exp());
        assert!((a.mass + b.mass - 1.0).abs() < 1e-15);
        assert!((u.mass - 1.0).abs() < 1e-15);
        assert!(RecoveredMass::exact("S", 1.0).infinite);
    }

    #[test]
    fn sibling_pairs_cover_parents() {
        let p = dyadic_sibling_pairs(20);
        assert_eq!(p.len(), 20);
        assert_eq!(p[0], (iv(0.0, 0.5), iv(0.5, 1.0)));
        assert_eq!(p[1], (iv(0.0, 0.25), iv(0.25, 0.5)));
        assert_eq!(
            p[19],
            (iv(8.0 / 32.0, 9.0 / 32.0), iv(9.0 / 32.0, 10.0 / 32.0))
        );
        for (a, b) in &p {
            assert!(a.is_disjoint(b));
        }
    }

    #[test]
    fn additivity_on_poisson() {
        let m = builtin_model("lebesgue01").unwrap();
        let r = additivity_check(&m, &dyadic_sibling_pairs(8), 20_000, 1, 3).unwrap();
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn increments_separate_poisson_from_binomial() {
        let halves = [iv(0.0, 0.5), iv(0.5, 1.0)];
        let p = builtin_model("lebesgue01").unwrap();
        assert!(
            increments_check(&p, &halves, 20_000, 1, 1, 0.01)
                .unwrap()
                .pass
        );
        let b = builtin_model("binomial01").unwrap();
        let r = increments_check(&b, &halves, 20_000, 1, 1, 0.01).unwrap();
        assert!(!r.pass);
        assert!(!r.independence[0].pass);
    }

    #[test]
    fn empty_model_passes_degenerately() {
        let e = builtin_model("empty").unwrap();
        let r = increments_check(&e, &[iv(0.0, 0.5), iv(0.5, 1.0)], 1000, 1, 1, 0.01).unwrap();
        assert!(r.pass);
        assert!(r.goodness_of_fit.iter().all(|g| g.mean == 0.0));
    }

    #[test]
    fn overlapping_sets_rejected() {
        let p = builtin_model("lebesgue01").unwrap();
        assert!(increments_check(&p, &[iv(0.0, 0.6), iv(0.5, 1.0)], 10, 1, 1, 0.01).is_err());
        assert!(decompose(&p, &[iv(0.0, 0.6), iv(0.5, 1.0)], Classifier::Analytic).is_err());
    }

    #[test]
    fn poisson_window_is_all_sigma_finite() {
        let p = builtin_model("lebesgue01").unwrap();
        let r = decompose(&p, &grid(0.0, 1.0, 10), Classifier::Analytic).unwrap();
        assert_eq!(r.f, iv(0.0, 1.0));
        assert!(r.residual_dichotomy);
    }

    #[test]
    fn shifted_accumulation_has_no_sigma_finite_cells() {
        let m = CrSetModel::example2();
        let r = decompose(&m, &grid(-3.0, 3.0, 12), Classifier::Analytic).unwrap();
        assert!(r.sigma_finite_cells().is_empty());
        assert!(r.f.is_empty());
        assert!(r.cells.iter().all(|c| c.class == CellClass::InfiniteMass));
    }

    #[test]
    fn mixture_decomposition_is_stable_under_refinement() {
        let m = builtin_model("mixture").unwrap();
        let coarse = decompose(&m, &grid(0.0, 3.0, 6), Classifier::Analytic).unwrap();
        let fine = decompose(&m, &grid(0.0, 3.0, 12), Classifier::Analytic).unwrap();
        assert_eq!(coarse.f, iv(0.0, 2.0));
        let c = compare_decompositions(&coarse, &fine);
        assert!(c.only_null_cells);
        assert!(c.difference.is_empty());
    }

    #[test]
    fn detector_classifies_mixture() {
        let m = builtin_model("mixture").unwrap();
        let cells = grid(0.0, 3.0, 3);
        let r = decompose(
            &m,
            &cells,
            Classifier::Detector {
                n_samples: 2000,
                depth: 2000,
                seed: 3,
            },
        )
        .unwrap();
        let classes: Vec<CellClass> = r.cells.iter().map(|c| c.class).collect();
        assert_eq!(
            classes,
            [
                CellClass::SigmaFinite,
                CellClass::Null,
                CellClass::InfiniteMass
            ]
        );
        assert_eq!(r.threshold, Some(7));
    }
}
