//! Finite intensity measures and the closed-form series of the
//! accumulation-point model `μ(A) = Σ_n λ(A ∩ (-1/n, 1/n))`.
//!
//! Masses are plain `f64`; an infinite mass is `f64::INFINITY`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::setalg::{IntervalSet, RealSet, Span};

/// A finite, Lebesgue-absolutely-continuous intensity measure.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FiniteIntensity {
    /// `rate · λ` restricted to `support`.
    Uniform { support: IntervalSet, rate: f64 },
    /// `λ(· ∩ (-1/n, 1/n))`.
    LebesgueSlice { n: u64 },
}

impl FiniteIntensity {
    pub fn uniform(support: IntervalSet, rate: f64) -> Result<Self> {
        if !(rate.is_finite() && rate >= 0.0) {
            return Err(Error::field(
                "rate",
                format!("must be finite and >= 0, got {rate}"),
            ));
        }
        Ok(FiniteIntensity::Uniform { support, rate })
    }

    /// Lebesgue measure on `support`.
    pub fn lebesgue(support: IntervalSet) -> Self {
        FiniteIntensity::Uniform { support, rate: 1.0 }
    }

    pub fn slice(n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::field("n", "slice index starts at 1"));
        }
        Ok(FiniteIntensity::LebesgueSlice { n })
    }

    pub fn total(&self) -> f64 {
        match self {
            FiniteIntensity::Uniform { support, rate } => rate * support.lebesgue(),
            FiniteIntensity::LebesgueSlice { n } => 2.0 / *n as f64,
        }
    }

    /// `μ(A)`.
    pub fn measure(&self, a: &RealSet) -> f64 {
        match self {
            FiniteIntensity::Uniform { support, rate } => {
                if *rate == 0.0 {
                    return 0.0;
                }
                let len: f64 = a
                    .spans()
                    .iter()
                    .map(|s| {
                        support
                            .components()
                            .iter()
                            .map(|&(lo, hi)| s.overlap_length(lo, hi))
                            .sum::<f64>()
                    })
                    .sum();
                rate * len
            }
            FiniteIntensity::LebesgueSlice { n } => {
                let h = 1.0 / *n as f64;
                a.spans().iter().map(|s| s.overlap_length(-h, h)).sum()
            }
        }
    }

    /// One point from `μ / μ(S)`. Requires a positive total.
    pub fn sample_point<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            FiniteIntensity::Uniform { support, .. } => {
                let total = support.lebesgue();
                let mut target = rng.random::<f64>() * total;
                let comps = support.components();
                for &(lo, hi) in comps {
                    let len = hi - lo;
                    if target < len {
                        return uniform_in(rng, lo, hi);
                    }
                    target -= len;
                }
                let &(lo, hi) = comps.last().expect("positive total has a component");
                uniform_in(rng, lo, hi)
            }
            FiniteIntensity::LebesgueSlice { n } => {
                let h = 1.0 / *n as f64;
                loop {
                    let x = uniform_in(rng, -h, h);
                    // the support is open
                    if x != -h {
                        return x;
                    }
                }
            }
        }
    }
}

/// Uniform draw from `[lo, hi)`.
fn uniform_in<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    loop {
        let x = lo + (hi - lo) * rng.random::<f64>();
        if x < hi {
            return x;
        }
    }
}

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Exact head length before switching to the asymptotic expansion.
const HARMONIC_EXACT_TERMS: f64 = 1000.0;

/// `H(m)` for large `m` by its asymptotic expansion.
fn harmonic_asymptotic(m: f64) -> f64 {
    let m2 = m * m;
    m.ln() + EULER_GAMMA + 1.0 / (2.0 * m) - 1.0 / (12.0 * m2) + 1.0 / (120.0 * m2 * m2)
}

/// `Σ_{n=a}^{b} 1/n` for `1 <= a`, empty when `b < a`.
pub fn harmonic_range(a: f64, b: f64) -> f64 {
    if b < a {
        return 0.0;
    }
    let head_end = b.min(a + HARMONIC_EXACT_TERMS - 1.0);
    let mut sum = 0.0;
    let mut n = head_end;
    // small terms first for accuracy
    while n >= a {
        sum += 1.0 / n;
        n -= 1.0;
    }
    if b > head_end {
        sum += harmonic_asymptotic(b) - harmonic_asymptotic(head_end);
    }
    sum
}

/// Largest integer `n >= 0` with `n * x <= 1` (`x > 0`).
fn count_le_reciprocal(x: f64) -> f64 {
    let mut n = (1.0 / x).floor();
    if n < 9.0e15 {
        while (n + 1.0) * x <= 1.0 {
            n += 1.0;
        }
        while n > 0.0 && n * x > 1.0 {
            n -= 1.0;
        }
    }
    n
}

/// Largest integer `n >= 0` with `n * x < 1` (`x > 0`).
fn count_lt_reciprocal(x: f64) -> f64 {
    let mut n = (1.0 / x).ceil();
    if n < 9.0e15 {
        while n > 0.0 && n * x >= 1.0 {
            n -= 1.0;
        }
        while (n + 1.0) * x < 1.0 {
            n += 1.0;
        }
    }
    n
}

/// `Σ_{n >= start} max(0, min(hi, 1/n) - lo)` for `0 < lo < hi`.
fn slice_series_positive(lo: f64, hi: f64, start: f64) -> f64 {
    // n <= n1: the slice covers [lo, hi); n1 < n <= n2: partial overlap
    let n1 = count_le_reciprocal(hi);
    let n2 = count_lt_reciprocal(lo);
    let full = (n1 - start + 1.0).max(0.0) * (hi - lo);
    let a = start.max(n1 + 1.0);
    let partial = if n2 >= a {
        harmonic_range(a, n2) - lo * (n2 - a + 1.0)
    } else {
        0.0
    };
    full + partial.max(0.0)
}

/// Whether a span of positive length touches the origin, making the slice
/// series diverge.
pub fn touches_origin(span: &Span) -> bool {
    span.length() > 0.0 && span.lo <= 0.0 && span.hi >= 0.0
}

/// `Σ_{n >= start} λ(A ∩ (-1/n, 1/n))`, infinite iff a span of `A` with
/// positive length touches 0.
pub fn slice_series(a: &RealSet, start: u64) -> f64 {
    let start = start.max(1) as f64;
    let mut total = 0.0;
    for s in a.spans() {
        if s.length() == 0.0 {
            continue;
        }
        if touches_origin(s) {
            return f64::INFINITY;
        }
        total += if s.lo > 0.0 {
            slice_series_positive(s.lo, s.hi, start)
        } else {
            slice_series_positive(-s.hi, -s.lo, start)
        };
    }
    total
}

/// Intensity of the accumulation-point model,
/// `μ(A) = Σ_{n>=1} λ(A ∩ (-1/n, 1/n))`.
pub fn example1_intensity(a: &IntervalSet) -> f64 {
    slice_series(&RealSet::from(a), 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::substream;

    /// Direct term-by-term summation.
    fn brute_series(lo: f64, hi: f64, start: u64, terms: u64) -> f64 {
        (start..start + terms)
            .map(|n| {
                let h = 1.0 / n as f64;
                (hi.min(h) - lo.max(-h)).max(0.0)
            })
            .sum()
    }

    #[test]
    fn example_values() {
        let a = IntervalSet::interval(0.5, 1.0).unwrap();
        assert!((example1_intensity(&a) - 0.5).abs() < 1e-15);
        assert_eq!(
            example1_intensity(&IntervalSet::interval(0.0, 0.01).unwrap()),
            f64::INFINITY
        );
        assert_eq!(example1_intensity(&IntervalSet::empty()), 0.0);
        let neg = IntervalSet::interval(-0.01, 0.0).unwrap();
        assert_eq!(example1_intensity(&neg), f64::INFINITY);
    }

    #[test]
    fn closed_form_matches_direct_sum() {
        for &(lo, hi) in &[
            (0.3, 0.7),
            (0.01, 0.02),
            (0.1, 3.0),
            (0.25, 0.5),
            (0.001, 0.0013),
        ] {
            for start in [1u64, 2, 5, 40] {
                let exact = slice_series(&RealSet::closed([(lo, hi)]).unwrap(), start);
                let brute = brute_series(lo, hi, start, 200_000);
                assert!(
                    (exact - brute).abs() < 1e-9,
                    "[{lo},{hi}) start {start}: {exact} vs {brute}"
                );
                let mirrored = slice_series(&RealSet::closed([(-hi, -lo)]).unwrap(), start);
                assert!((mirrored - exact).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn asymptotic_branch_agrees_with_loop() {
        let direct: f64 = (1..=200_000u64).rev().map(|n| 1.0 / n as f64).sum();
        assert!((harmonic_range(1.0, 200_000.0) - direct).abs() < 1e-11);
        let direct: f64 = (37..=5_000u64).rev().map(|n| 1.0 / n as f64).sum();
        assert!((harmonic_range(37.0, 5_000.0) - direct).abs() < 1e-12);
        assert_eq!(harmonic_range(5.0, 4.0), 0.0);
    }

    #[test]
    fn small_distance_grows_like_log() {
        // μ([d, 2d)) ≈ ln 2 ... stays bounded while μ([d, 1)) grows like ln(1/d)
        let m1 = slice_series(&RealSet::closed([(1e-6, 1.0)]).unwrap(), 1);
        let m2 = slice_series(&RealSet::closed([(1e-9, 1.0)]).unwrap(), 1);
        assert!(m2 - m1 > 6.0 && m2 - m1 < 7.5, "{m1} {m2}");
    }

    #[test]
    fn uniform_measure_and_sampling() {
        let support = IntervalSet::new([(0.0, 1.0), (2.0, 2.5)]).unwrap();
        let mu = FiniteIntensity::uniform(support.clone(), 2.0).unwrap();
        assert!((mu.total() - 3.0).abs() < 1e-15);
        let a = RealSet::closed([(0.5, 2.25)]).unwrap();
        assert!((mu.measure(&a) - 2.0 * 0.75).abs() < 1e-15);
        let mut rng = substream(1, 0);
        for _ in 0..1000 {
            assert!(support.contains(mu.sample_point(&mut rng)));
        }
        let slice = FiniteIntensity::slice(4).unwrap();
        assert!((slice.total() - 0.5).abs() < 1e-15);
        for _ in 0..1000 {
            assert!(slice.sample_point(&mut rng).abs() < 0.25);
        }
        assert!(FiniteIntensity::uniform(support, -1.0).is_err());
    }
}
