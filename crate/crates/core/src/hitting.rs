//! Hitting functions `T(A) = P(π ∩ A ≠ ∅)`.
//!
//! Two backends: Monte Carlo estimates over seeded replicates of a
//! constructive model (with the model's truncation bound attached), and an
//! exact evaluator over small discrete spaces that enumerates outcomes.
//! On top of them sit the axiom checks, the continuity probes, the
//! avoidance-function check for Poisson models and the inner/outer
//! approximation identities.

use std::collections::BTreeSet;
use std::fmt;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::models::{analytic_hitting, sample_replicate, tail_bound, CrSetModel, TailBound};
use crate::rng::substream;
use crate::setalg::{DiscreteSet, IntervalSet, RealSet, Region};
use crate::stats::{wilson, Z_99};

/// Tolerance for outcome probabilities summing to one.
pub const PROBABILITY_SUM_TOLERANCE: f64 = 1e-12;

/// A Monte Carlo estimate of `T(A)` with a 99% Wilson interval.
#[derive(Clone, Debug, Serialize)]
pub struct HittingEstimate {
    pub set: String,
    pub hits: u64,
    pub n_samples: u64,
    pub depth: u64,
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub ci_halfwidth: f64,
    /// Closed-form `T(A)` of the untruncated model, if known.
    pub analytic: Option<f64>,
    /// Bound on the hitting probability lost by truncating at `depth`.
    pub tail_bound: TailBound,
    /// The truncation bound is below the CI half-width.
    pub decided: bool,
}

impl HittingEstimate {
    pub fn from_counts(
        set: String,
        hits: u64,
        n_samples: u64,
        depth: u64,
        analytic: Option<f64>,
        tail_bound: TailBound,
    ) -> Self {
        let (ci_low, ci_high) = wilson(hits, n_samples, Z_99);
        let ci_halfwidth = 0.5 * (ci_high - ci_low);
        let decided = tail_bound.probability().is_some_and(|t| t < ci_halfwidth);
        HittingEstimate {
            set,
            hits,
            n_samples,
            depth,
            p_hat: hits as f64 / n_samples as f64,
            ci_low,
            ci_high,
            ci_halfwidth,
            analytic,
            tail_bound,
            decided,
        }
    }

    /// Whether the untruncated value `t` is consistent with this estimate.
    ///
    /// The truncated process hits less often, so the estimate targets some
    /// `T_N ∈ [t - tail, t]`; `t` must lie in `[ci_low, ci_high + tail]`.
    /// An unknown tail only allows the lower side to be checked.
    pub fn consistent_with(&self, t: f64) -> bool {
        let slack = self.tail_bound.probability().unwrap_or(1.0);
        t >= self.ci_low && t <= self.ci_high + slack
    }

    /// Agreement with the closed form, if one is attached.
    pub fn verdict(&self) -> Option<bool> {
        self.analytic.map(|t| self.consistent_with(t))
    }
}

/// Counts of replicates hitting each set, all sets sharing the same
/// replicates. Parallel over replicates; counts are sums, so the result
/// does not depend on scheduling.
pub fn hit_counts<A: Region + Sync>(
    model: &CrSetModel,
    sets: &[A],
    n_samples: u64,
    depth: u64,
    seed: u64,
) -> Vec<u64> {
    let k = sets.len();
    (0..n_samples)
        .into_par_iter()
        .fold(
            || vec![0u64; k],
            |mut acc, i| {
                let r = sample_replicate(model, depth, seed, i);
                for (c, a) in acc.iter_mut().zip(sets) {
                    *c += u64::from(r.hits(a));
                }
                acc
            },
        )
        .reduce(
            || vec![0u64; k],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        )
}

fn check_samples(n_samples: u64) -> Result<()> {
    if n_samples == 0 {
        return Err(Error::field("n", "need at least one sample"));
    }
    Ok(())
}

/// Estimates `T(A)` for every set from one shared batch of replicates.
pub fn estimate_hitting_all<A: Region + fmt::Display + Sync>(
    model: &CrSetModel,
    sets: &[A],
    n_samples: u64,
    depth: u64,
    seed: u64,
) -> Result<Vec<HittingEstimate>> {
    check_samples(n_samples)?;
    if depth == 0 {
        return Err(Error::field("depth", "must be at least 1"));
    }
    model.validate()?;
    let counts = hit_counts(model, sets, n_samples, depth, seed);
    Ok(sets
        .iter()
        .zip(counts)
        .map(|(a, hits)| {
            HittingEstimate::from_counts(
                a.to_string(),
                hits,
                n_samples,
                depth,
                Some(analytic_hitting(model, a)),
                tail_bound(model, a, depth),
            )
        })
        .collect())
}

/// Frequency of `{realization ∩ A ≠ ∅}` over `n_samples` replicates.
pub fn estimate_hitting<A: Region + fmt::Display + Sync>(
    model: &CrSetModel,
    a: &A,
    n_samples: u64,
    depth: u64,
    seed: u64,
) -> Result<HittingEstimate> {
    let mut v = estimate_hitting_all(model, std::slice::from_ref(a), n_samples, depth, seed)?;
    Ok(v.pop().expect("one set in, one estimate out"))
}

/// Exact hitting function of a random subset of `{0, .., m-1}`, given by
/// its full outcome distribution.
#[derive(Clone, Debug)]
pub struct ExactHitting {
    m: usize,
    /// `probs[mask]` is the probability of the outcome `mask`.
    probs: Vec<f64>,
}

impl ExactHitting {
    /// From an explicit outcome distribution; repeated outcomes add up.
    pub fn new(m: usize, outcomes: impl IntoIterator<Item = (DiscreteSet, f64)>) -> Result<Self> {
        DiscreteSet::empty(m)?;
        let mut probs = vec![0.0; 1 << m];
        for (set, p) in outcomes {
            if set.universe_size() != m {
                return Err(Error::field(
                    "outcomes",
                    format!(
                        "outcome {set:?} lives on {} points, expected {m}",
                        set.universe_size()
                    ),
                ));
            }
            if !(p.is_finite() && p >= 0.0) {
                return Err(Error::field(
                    "outcomes",
                    format!("probability {p} is not in [0, 1]"),
                ));
            }
            probs[set.mask() as usize] += p;
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > PROBABILITY_SUM_TOLERANCE {
            return Err(Error::field(
                "outcomes",
                format!("probabilities sum to {total}, not 1"),
            ));
        }
        Ok(ExactHitting { m, probs })
    }

    /// Each point included independently with its own probability.
    pub fn independent(p: &[f64]) -> Result<Self> {
        let m = p.len();
        DiscreteSet::empty(m)?;
        if let Some(bad) = p.iter().find(|q| !(0.0..=1.0).contains(*q)) {
            return Err(Error::field(
                "p",
                format!("inclusion probability {bad} is not in [0, 1]"),
            ));
        }
        let probs = (0..1usize << m)
            .map(|mask| {
                p.iter()
                    .enumerate()
                    .map(|(i, q)| if mask >> i & 1 == 1 { *q } else { 1.0 - q })
                    .product()
            })
            .collect();
        Ok(ExactHitting { m, probs })
    }

    /// Poisson process with atom weights `w`, read as a simple set: point
    /// `i` is present with probability `1 - e^{-w_i}`.
    pub fn poisson_weights(w: &[f64]) -> Result<Self> {
        if let Some(bad) = w.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
            return Err(Error::field(
                "weights",
                format!("weight {bad} must be finite and >= 0"),
            ));
        }
        let p: Vec<f64> = w.iter().map(|x| -(-x).exp_m1()).collect();
        Self::independent(&p)
    }

    pub fn universe_size(&self) -> usize {
        self.m
    }

    pub fn probability_of(&self, outcome: &DiscreteSet) -> f64 {
        self.probs[outcome.mask() as usize]
    }

    /// `T(A) = Σ_{M ∩ A ≠ ∅} P(M)`, summed in outcome order.
    pub fn evaluate(&self, a: &DiscreteSet) -> f64 {
        let mask = a.mask() as usize;
        self.probs
            .iter()
            .enumerate()
            .filter(|&(m, _)| m & mask != 0)
            .map(|(_, p)| p)
            .sum()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> DiscreteSet {
        let mut u = rng.random::<f64>();
        let mut last = 0;
        for (mask, &p) in self.probs.iter().enumerate() {
            if p > 0.0 {
                last = mask;
                if u < p {
                    break;
                }
                u -= p;
            }
        }
        DiscreteSet::from_mask(self.m, last as u16).expect("mask within universe")
    }

    /// Monte Carlo estimate of `T(A)`; the exact value is attached.
    pub fn estimate(&self, a: &DiscreteSet, n_samples: u64, seed: u64) -> Result<HittingEstimate> {
        check_samples(n_samples)?;
        let hits = (0..n_samples)
            .into_par_iter()
            .filter(|&i| !self.sample(&mut substream(seed, i)).intersect(a).is_empty())
            .count() as u64;
        Ok(HittingEstimate::from_counts(
            format!("{a:?}"),
            hits,
            n_samples,
            1,
            Some(self.evaluate(a)),
            TailBound::zero(),
        ))
    }
}

/// The lattice operations the axiom checks need.
pub trait SetLattice: Clone + fmt::Debug {
    fn empty_like(&self) -> Self;
    fn is_empty(&self) -> bool;
    fn is_subset(&self, other: &Self) -> bool;
    fn union(&self, other: &Self) -> Self;
}

impl SetLattice for DiscreteSet {
    fn empty_like(&self) -> Self {
        DiscreteSet::empty(self.universe_size()).expect("same universe")
    }
    fn is_empty(&self) -> bool {
        DiscreteSet::is_empty(self)
    }
    fn is_subset(&self, other: &Self) -> bool {
        DiscreteSet::is_subset(self, other)
    }
    fn union(&self, other: &Self) -> Self {
        DiscreteSet::union(self, other)
    }
}

impl SetLattice for IntervalSet {
    fn empty_like(&self) -> Self {
        IntervalSet::empty()
    }
    fn is_empty(&self) -> bool {
        IntervalSet::is_empty(self)
    }
    fn is_subset(&self, other: &Self) -> bool {
        IntervalSet::is_subset(self, other)
    }
    fn union(&self, other: &Self) -> Self {
        IntervalSet::union(self, other)
    }
}

/// A value of `T` with its uncertainty half-width (0 for exact values).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Evaluated {
    pub value: f64,
    pub slack: f64,
}

impl Evaluated {
    pub fn exact(value: f64) -> Self {
        Evaluated { value, slack: 0.0 }
    }
}

impl From<&HittingEstimate> for Evaluated {
    fn from(e: &HittingEstimate) -> Self {
        Evaluated {
            value: e.p_hat,
            slack: e.ci_halfwidth,
        }
    }
}

/// An increasing chain `A_1 ⊆ A_2 ⊆ ...` with its union.
#[derive(Clone, Debug)]
pub struct Chain<S> {
    pub sets: Vec<S>,
    pub limit: S,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct AxiomReport {
    pub empty_value: f64,
    pub empty_ok: bool,
    pub nested_pairs: usize,
    pub monotone_violations: Vec<String>,
    pub covers: usize,
    pub subadditivity_violations: Vec<String>,
    pub chains: usize,
    pub continuity_violations: Vec<String>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.empty_ok
            && self.monotone_violations.is_empty()
            && self.subadditivity_violations.is_empty()
            && self.continuity_violations.is_empty()
    }
}

/// Rounding allowance for comparing `T(A)` against the float sum
/// `T(B) + T(C)`; the other checks compare single evaluations exactly.
const SUM_ROUNDING: f64 = 4.0 * f64::EPSILON;

/// Checks `T(∅) = 0`, monotonicity on nested pairs, finite subadditivity on
/// covers `A ⊆ B ∪ C`, and continuity from below along `chains`. Each
/// comparison allows the summed slacks of the values involved.
pub fn check_axioms<S: SetLattice>(
    t: impl Fn(&S) -> Evaluated,
    sets: &[S],
    chains: &[Chain<S>],
) -> AxiomReport {
    let mut report = AxiomReport::default();
    let vals: Vec<Evaluated> = sets.iter().map(&t).collect();
    if let Some(first) = sets.first().or(chains.first().map(|c| &c.limit)) {
        let e = t(&first.empty_like());
        report.empty_value = e.value;
        report.empty_ok = e.value.abs() <= e.slack;
    } else {
        report.empty_ok = true;
    }
    for (i, a) in sets.iter().enumerate() {
        for (j, b) in sets.iter().enumerate() {
            if i == j || !a.is_subset(b) {
                continue;
            }
            report.nested_pairs += 1;
            if vals[i].value > vals[j].value + vals[i].slack + vals[j].slack {
                report.monotone_violations.push(format!(
                    "T({a:?}) = {} > T({b:?}) = {}",
                    vals[i].value, vals[j].value
                ));
            }
        }
    }
    for (i, a) in sets.iter().enumerate() {
        for (j, b) in sets.iter().enumerate() {
            for (k, c) in sets.iter().enumerate().skip(j) {
                if !a.is_subset(&b.union(c)) {
                    continue;
                }
                report.covers += 1;
                let rhs = vals[j].value + vals[k].value;
                let slack = vals[i].slack + vals[j].slack + vals[k].slack + SUM_ROUNDING * rhs;
                if vals[i].value > rhs + slack {
                    report.subadditivity_violations.push(format!(
                        "T({a:?}) = {} > T({b:?}) + T({c:?}) = {rhs}",
                        vals[i].value
                    ));
                }
            }
        }
    }
    for (n, chain) in chains.iter().enumerate() {
        report.chains += 1;
        if chain.sets.windows(2).any(|w| !w[0].is_subset(&w[1]))
            || chain.sets.iter().any(|s| !s.is_subset(&chain.limit))
        {
            report
                .continuity_violations
                .push(format!("chain {n} is not increasing towards its limit"));
            continue;
        }
        let lim = t(&chain.limit);
        let cv: Vec<Evaluated> = chain.sets.iter().map(&t).collect();
        for w in cv.windows(2) {
            if w[0].value > w[1].value + w[0].slack + w[1].slack {
                report
                    .continuity_violations
                    .push(format!("chain {n}: values decrease along the chain"));
            }
        }
        if let Some(last) = cv.last() {
            if (lim.value - last.value).abs() > lim.slack + last.slack {
                report.continuity_violations.push(format!(
                    "chain {n}: T(limit) = {} but chain ends at {}",
                    lim.value, last.value
                ));
            }
        }
    }
    report
}

/// Outcome of evaluating `T` along a decreasing chain.
#[derive(Clone, Debug, Serialize)]
pub struct ContinuityReport {
    pub terms: Vec<HittingEstimate>,
    pub limit: HittingEstimate,
    /// The chain is decreasing and contains its stated limit.
    pub chain_valid: bool,
    /// Chain terms whose 99% CI misses the closed form. Each term is an
    /// independent-level check, so a long chain expects about 1% of these.
    pub disagreements: usize,
    /// The limit agrees with its closed form and the last term is within
    /// the combined CI of the limit's estimate.
    pub converges: bool,
    /// Every closed-form `T(A_n)` equals 1 while `T(limit) < 1`: the
    /// values can never approach the limit, so `T` is not continuous from
    /// above along this chain.
    pub discontinuity_witness: bool,
}

/// Evaluates `T` along a decreasing chain and at its intersection.
pub fn continuity_from_above_probe(
    model: &CrSetModel,
    chain: &[RealSet],
    limit: &RealSet,
    n_samples: u64,
    depth: u64,
    seed: u64,
) -> Result<ContinuityReport> {
    if chain.is_empty() {
        return Err(Error::field("chain", "needs at least one set"));
    }
    let chain_valid =
        chain.windows(2).all(|w| w[1].is_subset(&w[0])) && chain.iter().all(|a| limit.is_subset(a));
    let mut all: Vec<RealSet> = chain.to_vec();
    all.push(limit.clone());
    let mut terms = estimate_hitting_all(model, &all, n_samples, depth, seed)?;
    let limit_est = terms.pop().expect("limit estimate");
    let last = terms.last().expect("nonempty chain");
    let disagreements = terms.iter().filter(|e| e.verdict() == Some(false)).count();
    let agrees = limit_est.verdict().unwrap_or(true);
    let close = (last.p_hat - limit_est.p_hat).abs() <= last.ci_halfwidth + limit_est.ci_halfwidth;
    let t_limit = analytic_hitting(model, limit);
    let discontinuity_witness = terms.iter().all(|e| e.analytic == Some(1.0)) && t_limit < 1.0;
    Ok(ContinuityReport {
        converges: agrees && close,
        disagreements,
        terms,
        limit: limit_est,
        chain_valid,
        discontinuity_witness,
    })
}

/// `[0, 2^-k)` for `k = 0..=max_k`.
pub fn dyadic_shrinking_chain(max_k: u32) -> Vec<RealSet> {
    (0..=max_k)
        .map(|k| {
            RealSet::from(IntervalSet::interval(0.0, 0.5f64.powi(k as i32)).expect("nonempty"))
        })
        .collect()
}

/// `(0, 1/n)` for `n = 1..=count`.
pub fn open_shrinking_chain(count: u64) -> Vec<RealSet> {
    (1..=count)
        .map(|n| RealSet::open([(0.0, 1.0 / n as f64)]).expect("nonempty"))
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct RenyiRow {
    pub estimate: HittingEstimate,
    pub intensity: f64,
    pub expected: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct RenyiReport {
    pub rows: Vec<RenyiRow>,
    pub all_pass: bool,
}

/// Checks `T(A) = 1 - e^{-μ(A)}` on each set against the estimate, allowing
/// the CI and the truncation bound.
pub fn renyi_verify<A: Region + fmt::Display + Sync>(
    model: &CrSetModel,
    sets: &[A],
    n_samples: u64,
    depth: u64,
    seed: u64,
) -> Result<RenyiReport> {
    if !model.is_poisson() {
        return Err(Error::Precondition(format!(
            "model '{}' is not Poisson-type; the avoidance formula does not apply",
            model.name.as_deref().unwrap_or("inline")
        )));
    }
    let estimates = estimate_hitting_all(model, sets, n_samples, depth, seed)?;
    let mut rows = Vec::with_capacity(sets.len());
    for (a, estimate) in sets.iter().zip(estimates) {
        let intensity = model.intensity(&a.to_real_set())?;
        let expected = -(-intensity).exp_m1();
        let pass = estimate.consistent_with(expected);
        rows.push(RenyiRow {
            estimate,
            intensity,
            expected,
            pass,
        });
    }
    let all_pass = rows.iter().all(|r| r.pass);
    Ok(RenyiReport { rows, all_pass })
}

#[derive(Clone, Debug, Serialize)]
pub struct DepthSweep {
    pub depths: Vec<u64>,
    pub p_hat: Vec<f64>,
    pub analytic: f64,
    pub monotone: bool,
}

/// `p̂(A)` at increasing depths on the same replicates. Replicates share
/// their stream prefix across depths, so for unshifted models deeper
/// truncations contain shallower ones and the sweep is monotone.
pub fn renyi_depth_sweep<A: Region + fmt::Display + Sync>(
    model: &CrSetModel,
    a: &A,
    depths: &[u64],
    n_samples: u64,
    seed: u64,
) -> Result<DepthSweep> {
    let mut p_hat = Vec::with_capacity(depths.len());
    for &d in depths {
        p_hat.push(estimate_hitting(model, a, n_samples, d, seed)?.p_hat);
    }
    let monotone = p_hat.windows(2).all(|w| w[0] <= w[1]);
    Ok(DepthSweep {
        depths: depths.to_vec(),
        p_hat,
        analytic: analytic_hitting(model, a),
        monotone,
    })
}

/// Closure of `seed` under a binary operation.
fn close_under(
    m: usize,
    seed: impl IntoIterator<Item = u16>,
    op: impl Fn(u16, u16) -> u16,
) -> Vec<u16> {
    let mut set: BTreeSet<u16> = seed.into_iter().collect();
    let mut frontier: Vec<u16> = set.iter().copied().collect();
    while let Some(x) = frontier.pop() {
        let current: Vec<u16> = set.iter().copied().collect();
        for y in current {
            let z = op(x, y);
            if set.insert(z) {
                frontier.push(z);
            }
        }
    }
    debug_assert!(set.iter().all(|&x| u32::from(x) < 1u32 << m));
    set.into_iter().collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct SandwichRow {
    pub set: DiscreteSet,
    pub t: f64,
    pub sup_inner: f64,
    pub inf_outer: f64,
    pub equal: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SandwichReport {
    pub intersection_stable: bool,
    pub contains_empty: bool,
    /// Every set of the family is a union of inner sets.
    pub inner_covers: bool,
    pub inner_size: usize,
    pub outer_size: usize,
    pub rows: Vec<SandwichRow>,
    pub failures: usize,
}

impl SandwichReport {
    pub fn preconditions_hold(&self) -> bool {
        self.intersection_stable && self.contains_empty && self.inner_covers
    }
}

/// For every `A ⊆ S`: `sup{T(F) : F inner, F ⊆ A}` and
/// `inf{T(G) : G outer, A ⊆ G}`, compared to `T(A)` with zero tolerance.
/// Inner sets are the nonempty intersections of complements of family
/// sets; outer sets are the nonempty unions of family sets.
pub fn inner_outer_sandwich(t: &ExactHitting, family: &[DiscreteSet]) -> Result<SandwichReport> {
    let m = t.universe_size();
    if family.is_empty() {
        return Err(Error::field("family", "must be nonempty"));
    }
    if let Some(bad) = family.iter().find(|e| e.universe_size() != m) {
        return Err(Error::field(
            "family",
            format!("{bad:?} does not live on {m} points"),
        ));
    }
    let full = ((1u32 << m) - 1) as u16;
    let masks: BTreeSet<u16> = family.iter().map(|e| e.mask()).collect();
    let intersection_stable = masks
        .iter()
        .all(|&a| masks.iter().all(|&b| masks.contains(&(a & b))));
    let contains_empty = masks.contains(&0);
    let inner = close_under(m, masks.iter().map(|&e| !e & full), |a, b| a & b);
    let outer = close_under(m, masks.iter().copied(), |a, b| a | b);
    let inner_covers = masks.iter().all(|&e| {
        let below = inner
            .iter()
            .filter(|&&f| f & !e == 0)
            .fold(0u16, |acc, &f| acc | f);
        below == e && (e != 0 || inner.contains(&0))
    });
    let value = |mask: u16| t.evaluate(&DiscreteSet::from_mask(m, mask).expect("within universe"));
    let inner_vals: Vec<(u16, f64)> = inner.iter().map(|&f| (f, value(f))).collect();
    let outer_vals: Vec<(u16, f64)> = outer.iter().map(|&g| (g, value(g))).collect();
    let mut rows = Vec::with_capacity(1 << m);
    for mask in 0..=full {
        let ta = value(mask);
        let sup_inner = inner_vals
            .iter()
            .filter(|(f, _)| f & !mask == 0)
            .map(|&(_, v)| v)
            .fold(0.0, f64::max);
        let inf_outer = outer_vals
            .iter()
            .filter(|(g, _)| mask & !g == 0)
            .map(|&(_, v)| v)
            .fold(1.0, f64::min);
        rows.push(SandwichRow {
            set: DiscreteSet::from_mask(m, mask)?,
            t: ta,
            sup_inner,
            inf_outer,
            equal: sup_inner == ta && inf_outer == ta,
        });
        if mask == full {
            break;
        }
    }
    let failures = rows.iter().filter(|r| !r.equal).count();
    Ok(SandwichReport {
        intersection_stable,
        contains_empty,
        inner_covers,
        inner_size: inner.len(),
        outer_size: outer.len(),
        rows,
        failures,
    })
}

/// The discrete intervals `{i, .., j}` of `{0, .., m-1}` together with `∅`.
pub fn interval_semiring(m: usize) -> Result<Vec<DiscreteSet>> {
    let mut out = vec![DiscreteSet::empty(m)?];
    for i in 0..m {
        for j in i..m {
            out.push(DiscreteSet::from_points(m, i..=j)?);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct SupReport {
    pub target: f64,
    pub values: Vec<f64>,
    pub monotone: bool,
    /// `T(A) - max_k T(F_k)`.
    pub gap: f64,
}

impl SupReport {
    pub fn converged(&self, tol: f64) -> bool {
        self.monotone && self.gap.abs() <= tol
    }
}

/// Evaluates `T` in closed form along an increasing exhaustion of `a` by
/// closed sets and reports how close the supremum comes to `T(a)`.
pub fn constructive_sup_representation(
    model: &CrSetModel,
    a: &RealSet,
    exhaustion: &[RealSet],
) -> Result<SupReport> {
    if let Some(bad) = exhaustion.iter().find(|f| !f.is_subset(a)) {
        return Err(Error::field(
            "exhaustion",
            format!("{bad} is not contained in {a}"),
        ));
    }
    let target = analytic_hitting(model, a);
    let values: Vec<f64> = exhaustion
        .iter()
        .map(|f| analytic_hitting(model, f))
        .collect();
    let monotone = values.windows(2).all(|w| w[0] <= w[1]);
    let sup = values.iter().copied().fold(0.0, f64::max);
    Ok(SupReport {
        target,
        values,
        monotone,
        gap: target - sup,
    })
}

/// `[1/k, 1 - 1/k]` for `k = 3, 10, 100, ..., 10^max_pow`.
pub fn unit_interval_exhaustion(max_pow: u32) -> Vec<RealSet> {
    std::iter::once(3.0)
        .chain((1..=max_pow).map(|p| 10f64.powi(p as i32)))
        .map(|k| RealSet::closed([(1.0 / k, 1.0 - 1.0 / k)]).expect("nonempty"))
        .collect()
}

/// `[10^-k, hi]` for `k = k0..=k1`.
pub fn shrinking_gap_exhaustion(hi: f64, k0: u32, k1: u32) -> Vec<RealSet> {
    (k0..=k1)
        .map(|k| RealSet::closed([(10f64.powi(-(k as i32)), hi)]).expect("nonempty"))
        .collect()
}
