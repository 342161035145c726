//! Closed-form hitting probabilities, infinite-count probabilities and
//! truncation bounds.
//!
//! For an unshifted part the components are independent, so the miss
//! probability of a set is the product of the component miss
//! probabilities. A shifted part is integrated over the shift law; the
//! integrand is evaluated in closed form and the integral by composite
//! Gauss-Legendre quadrature split at the set's endpoints.

use serde::{Serialize, Serializer};

use crate::models::{CrSetModel, ModelPart, Shift, Tail};
use crate::setalg::{IntervalSet, RealSet, Region};
use crate::stats::normal_cdf;

/// Bound on `P(components beyond the truncation depth hit A)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TailBound {
    Exact(f64),
    /// The bounding series diverges: the truncation never converges on
    /// this set.
    Infinite,
    /// No closed form available for this model.
    Unknown,
}

impl TailBound {
    pub fn zero() -> Self {
        TailBound::Exact(0.0)
    }

    pub fn plus(self, other: TailBound) -> TailBound {
        match (self, other) {
            (TailBound::Infinite, _) | (_, TailBound::Infinite) => TailBound::Infinite,
            (TailBound::Unknown, _) | (_, TailBound::Unknown) => TailBound::Unknown,
            (TailBound::Exact(a), TailBound::Exact(b)) => TailBound::Exact(a + b),
        }
    }

    /// Usable probability bound: capped at 1, `None` when unknown.
    pub fn probability(&self) -> Option<f64> {
        match self {
            TailBound::Exact(v) => Some(v.min(1.0)),
            TailBound::Infinite => Some(1.0),
            TailBound::Unknown => None,
        }
    }

    pub fn label(&self) -> String {
        match self {
            TailBound::Exact(v) => format!("{v:e}"),
            TailBound::Infinite => "infinite".into(),
            TailBound::Unknown => "unknown".into(),
        }
    }
}

impl Serialize for TailBound {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            TailBound::Exact(v) => s.serialize_f64(*v),
            TailBound::Infinite => s.serialize_str("infinite"),
            TailBound::Unknown => s.serialize_str("unknown"),
        }
    }
}

/// `P(part misses a | shift = z)`.
fn part_miss_given_shift(part: &ModelPart, a: &RealSet, z: f64) -> f64 {
    let b = part.visible(a).shifted(-z);
    if b.is_empty() {
        return 1.0;
    }
    let explicit: f64 = part
        .components
        .iter()
        .map(|c| c.miss_probability(&b))
        .product();
    let tail = part
        .tail
        .as_ref()
        .map_or(1.0, |t| (-t.measure_from(&b, 1)).exp());
    explicit * tail
}

const GL5_NODES: [f64; 5] = [
    0.0,
    -0.538_469_310_105_683_1,
    0.538_469_310_105_683_1,
    -0.906_179_845_938_664,
    0.906_179_845_938_664,
];
const GL5_WEIGHTS: [f64; 5] = [
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_5,
    0.478_628_670_499_366_5,
    0.236_926_885_056_189_1,
    0.236_926_885_056_189_1,
];

/// Shift range covering all but ~1e-19 of the standard normal mass.
const SHIFT_RANGE: f64 = 9.0;
/// Largest quadrature panel width.
const PANEL: f64 = 0.01;

fn std_normal_density(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// `∫ f(z) φ(z) dz` over the shift range, with panels split at `breaks`.
fn integrate_over_shift(f: impl Fn(f64) -> f64, breaks: &[f64]) -> f64 {
    let mut points: Vec<f64> = breaks
        .iter()
        .copied()
        .filter(|b| b.abs() < SHIFT_RANGE)
        .chain([-SHIFT_RANGE, SHIFT_RANGE])
        .collect();
    points.sort_by(f64::total_cmp);
    points.dedup();
    let mut total = 0.0;
    for w in points.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let panels = ((hi - lo) / PANEL).ceil().max(1.0) as usize;
        let h = (hi - lo) / panels as f64;
        for p in 0..panels {
            let mid = lo + (p as f64 + 0.5) * h;
            for (x, wt) in GL5_NODES.iter().zip(GL5_WEIGHTS) {
                let z = mid + 0.5 * h * x;
                total += 0.5 * h * wt * f(z) * std_normal_density(z);
            }
        }
    }
    total
}

fn shift_breaks(part: &ModelPart, a: &RealSet) -> Vec<f64> {
    let b = part.visible(a);
    let mut breaks: Vec<f64> = b.spans().iter().flat_map(|s| [s.lo, s.hi]).collect();
    // component supports shift the kinks of the integrand as well
    for c in &part.components {
        if let crate::models::FiniteIntensity::Uniform { support, .. } = &c.intensity {
            for &(lo, hi) in support.components() {
                for s in b.spans() {
                    breaks.extend([s.lo - lo, s.lo - hi, s.hi - lo, s.hi - hi]);
                }
            }
        }
    }
    breaks
}

/// `P(part hits a)`.
pub fn part_hitting(part: &ModelPart, a: &RealSet) -> f64 {
    match part.shift {
        None => 1.0 - part_miss_given_shift(part, a, 0.0),
        Some(Shift::StdNormal) => {
            if part.visible(a).is_empty() {
                return 0.0;
            }
            let t = integrate_over_shift(
                |z| 1.0 - part_miss_given_shift(part, a, z),
                &shift_breaks(part, a),
            );
            t.clamp(0.0, 1.0)
        }
    }
}

/// `T(A) = P(τ ∩ A != ∅)` for the whole model.
pub fn analytic_hitting(model: &CrSetModel, a: &impl Region) -> f64 {
    let a = a.to_real_set();
    let miss: f64 = model
        .parts
        .iter()
        .map(|p| 1.0 - part_hitting(p, &a))
        .product();
    (1.0 - miss).clamp(0.0, 1.0)
}

/// Whether `T(A) > 0`, decided exactly: every intensity has a density, so a
/// part can hit `A` iff its (shifted) intensity charges `A` for a set of
/// shifts of positive probability.
pub fn hits_with_positive_probability(model: &CrSetModel, a: &impl Region) -> bool {
    let a = a.to_real_set();
    model.parts.iter().any(|p| {
        let b = p.visible(&a);
        match p.shift {
            None => p.mass(&b) > 0.0,
            // standard normal shifts have full support; the slice and
            // annuli tails charge every neighbourhood of 0, and bounded
            // supports are reached by some shift
            Some(_) => {
                b.lebesgue() > 0.0
                    && (p.tail.is_some() || p.components.iter().any(|c| c.intensity.total() > 0.0))
            }
        }
    })
}

/// `P(N_A = ∞)` for one part.
fn part_prob_infinite(part: &ModelPart, a: &RealSet) -> f64 {
    let Some(tail) = &part.tail else {
        return 0.0;
    };
    let b = part.visible(a);
    match part.shift {
        // independent Poisson components with divergent total mass put
        // infinitely many points in b almost surely
        None => {
            if tail.measure_from(&b, 1).is_infinite() {
                1.0
            } else {
                0.0
            }
        }
        Some(Shift::StdNormal) => tail
            .divergent_shifts(&b)
            .iter()
            .map(|&(lo, hi)| normal_cdf(hi) - normal_cdf(lo))
            .sum::<f64>()
            .min(1.0),
    }
}

/// `P(N_A(τ) = ∞)`.
pub fn prob_infinite_count(model: &CrSetModel, a: &impl Region) -> f64 {
    let a = a.to_real_set();
    let finite: f64 = model
        .parts
        .iter()
        .map(|p| 1.0 - part_prob_infinite(p, &a))
        .product();
    (1.0 - finite).clamp(0.0, 1.0)
}

/// `P(N_A(τ) = ∞)` for the randomly shifted accumulation-point process:
/// the standard normal mass of the closure of `A`.
pub fn prob_infinite_count_example2(a: &IntervalSet) -> f64 {
    prob_infinite_count(&CrSetModel::example2(), a)
}

/// Most tail terms summed one by one before switching to the series bound.
const TAIL_TERMS: u64 = 1_000_000;

/// `Σ_{j >= start} (1 - exp(-μ_j(b)))`, exact up to [`TAIL_TERMS`] terms and
/// bounded by `Σ μ_j(b)` beyond.
fn tail_hitting_sum(tail: &Tail, b: &RealSet, start: u64) -> TailBound {
    let start = start.max(1);
    if tail.measure_from(b, start).is_infinite() {
        return TailBound::Infinite;
    }
    let mut sum = 0.0;
    for j in start..start + TAIL_TERMS {
        let m = tail.component(j).measure(b);
        sum += -(-m).exp_m1();
        if tail.exhausted_after(b, j) {
            return TailBound::Exact(sum);
        }
        let rest = tail.measure_from(b, j + 1);
        if rest < 1e-17 {
            return TailBound::Exact(sum + rest);
        }
    }
    TailBound::Exact(sum + tail.measure_from(b, start + TAIL_TERMS))
}

/// Bound on the hitting probability of the components beyond `depth` of a
/// single part.
pub fn part_tail_bound(part: &ModelPart, a: &RealSet, depth: u64) -> TailBound {
    if !part.truncated_at(depth) {
        return TailBound::zero();
    }
    if part.shift.is_some() {
        return TailBound::Unknown;
    }
    let b = part.visible(a);
    let explicit = part.components.len() as u64;
    let mut bound: f64 = part
        .components
        .iter()
        .skip(depth as usize)
        .map(|c| 1.0 - c.miss_probability(&b))
        .sum();
    let Some(tail) = &part.tail else {
        return TailBound::Exact(bound);
    };
    let start = depth.saturating_sub(explicit) + 1;
    match tail_hitting_sum(tail, &b, start) {
        TailBound::Exact(v) => {
            bound += v;
            TailBound::Exact(bound)
        }
        other => other,
    }
}

/// `tail(A) = Σ_{k > depth} (1 - e^{-μ_k(A)})` summed over parts.
pub fn tail_bound(model: &CrSetModel, a: &impl Region, depth: u64) -> TailBound {
    let a = a.to_real_set();
    model
        .parts
        .iter()
        .map(|p| part_tail_bound(p, &a, depth))
        .fold(TailBound::zero(), TailBound::plus)
}

/// Count threshold `c_N = max(1, floor(ln N))` of the infinite-count
/// detector at depth `N`.
pub fn detector_threshold(depth: u64) -> u64 {
    ((depth.max(1) as f64).ln().floor() as u64).max(1)
}

/// Flags a truncated count as "infinite" when it reaches `c_N`.
pub fn infinite_count_detector(count: u64, depth: u64) -> bool {
    count >= detector_threshold(depth)
}

impl CrSetModel {
    pub fn hitting(&self, a: &impl Region) -> f64 {
        analytic_hitting(self, a)
    }

    pub fn tail_bound(&self, a: &impl Region, depth: u64) -> TailBound {
        tail_bound(self, a, depth)
    }

    pub fn prob_infinite(&self, a: &impl Region) -> f64 {
        prob_infinite_count(self, a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::substream;
    use rand::Rng;
    use rand_distr::StandardNormal;

    fn iv(a: f64, b: f64) -> IntervalSet {
        IntervalSet::interval(a, b).unwrap()
    }

    #[test]
    fn poisson_hitting_formula() {
        let m = CrSetModel::poisson(iv(0.0, 1.0), 1.0).unwrap();
        assert!((analytic_hitting(&m, &iv(0.0, 0.5)) - (1.0 - (-0.5f64).exp())).abs() < 1e-15);
        assert_eq!(analytic_hitting(&m, &IntervalSet::empty()), 0.0);
        assert_eq!(analytic_hitting(&m, &iv(2.0, 3.0)), 0.0);
    }

    #[test]
    fn example1_hitting_is_one_near_origin() {
        let m = CrSetModel::example1();
        let a = RealSet::open([(0.0, 0.01)]).unwrap();
        assert_eq!(analytic_hitting(&m, &a), 1.0);
        assert_eq!(prob_infinite_count(&m, &a), 1.0);
        let far = iv(0.5, 1.0);
        assert!((analytic_hitting(&m, &far) - (1.0 - (-0.5f64).exp())).abs() < 1e-15);
        assert_eq!(prob_infinite_count(&m, &far), 0.0);
    }

    #[test]
    fn example2_infinite_probabilities() {
        let p = prob_infinite_count_example2(&iv(0.0, 1.0));
        assert!((p - 0.341_344_746_068_542_9).abs() < 1e-10, "{p}");
        assert_eq!(prob_infinite_count_example2(&IntervalSet::empty()), 0.0);
        let wide = prob_infinite_count_example2(&iv(-10.0, 10.0));
        assert!((wide - 1.0).abs() < 1e-15);
        // adjacent components merge in the closure: no double counting
        let split = IntervalSet::new([(0.0, 0.5), (0.5, 1.0)]).unwrap();
        assert!((prob_infinite_count_example2(&split) - p).abs() < 1e-15);
    }

    #[test]
    fn example2_hitting_matches_monte_carlo_over_shift() {
        // independent oracle: average the unshifted conditional hitting
        // probability over sampled shifts
        let part = &CrSetModel::example2().parts[0];
        let a = RealSet::from(iv(1.0, 1.5));
        let quad = part_hitting(part, &a);
        let mut rng = substream(77, 0);
        let n = 200_000;
        let mc: f64 = (0..n)
            .map(|_| {
                let z: f64 = rng.sample(StandardNormal);
                1.0 - (-Tail::Example1.measure_from(&a.shifted(-z), 1)).exp()
            })
            .sum::<f64>()
            / n as f64;
        assert!((quad - mc).abs() < 4e-3, "{quad} vs {mc}");
        assert!(quad > prob_infinite_count_example2(&iv(1.0, 1.5)));
    }

    #[test]
    fn example1_tail_bounds() {
        let m = CrSetModel::example1();
        assert_eq!(tail_bound(&m, &iv(0.5, 1.0), 2), TailBound::Exact(0.0));
        assert_eq!(
            tail_bound(&m, &RealSet::open([(0.0, 0.01)]).unwrap(), 100),
            TailBound::Infinite
        );
        // oracle: direct sum of the remaining slice terms
        let a = iv(0.05, 0.3);
        let direct: f64 = (11..=20)
            .map(|n| {
                let h = 1.0 / n as f64;
                1.0 - (-(0.3f64.min(h) - 0.05).max(0.0)).exp()
            })
            .sum();
        match tail_bound(&m, &a, 10) {
            TailBound::Exact(v) => assert!((v - direct).abs() < 1e-14, "{v} vs {direct}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn single_component_has_no_tail() {
        let m = CrSetModel::poisson(iv(0.0, 1.0), 1.0).unwrap();
        assert_eq!(tail_bound(&m, &iv(0.0, 1.0), 1), TailBound::Exact(0.0));
        assert_eq!(
            tail_bound(&CrSetModel::example2(), &iv(0.0, 1.0), 10),
            TailBound::Unknown
        );
    }

    #[test]
    fn binomial_miss_probability() {
        let m = crate::models::builtin_model("binomial01").unwrap();
        assert!((analytic_hitting(&m, &iv(0.0, 0.25)) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn detector_threshold_values() {
        assert_eq!(detector_threshold(2000), 7);
        assert_eq!(detector_threshold(1), 1);
        assert!(infinite_count_detector(7, 2000));
        assert!(!infinite_count_detector(6, 2000));
    }

    #[test]
    fn positivity_of_hitting() {
        let mix = crate::models::builtin_model("mixture").unwrap();
        assert!(hits_with_positive_probability(&mix, &iv(0.0, 0.05)));
        assert!(!hits_with_positive_probability(&mix, &iv(1.0, 2.0)));
        assert!(hits_with_positive_probability(&mix, &iv(2.5, 2.55)));
    }
}
