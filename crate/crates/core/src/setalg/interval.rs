//! Finite unions of half-open real intervals `[a, b)`.
//!
//! The representation is kept normalized: components sorted by left
//! endpoint, each with `a < b`, and consecutive components separated by a
//! strictly positive gap. Two components whose gap is exactly zero are
//! merged; no epsilon merging is ever applied, so identities on dyadic
//! endpoints hold bit-for-bit.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite union of half-open intervals `[a, b)` on the real line.
///
/// Serializes as a JSON array of `[a, b]` pairs, each read as `[a, b)`.
#[derive(Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<[f64; 2]>", into = "Vec<[f64; 2]>")]
pub struct IntervalSet {
    components: Vec<(f64, f64)>,
}

impl IntervalSet {
    pub fn empty() -> Self {
        IntervalSet::default()
    }

    /// The single interval `[a, b)`; empty when `a >= b`.
    pub fn interval(a: f64, b: f64) -> Result<Self> {
        Self::new([(a, b)])
    }

    /// Builds a normalized set from arbitrary (possibly overlapping,
    /// unsorted, or empty) `[a, b)` pairs.
    pub fn new(pairs: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        let mut components = Vec::new();
        for (a, b) in pairs {
            if !a.is_finite() || !b.is_finite() {
                return Err(Error::InvalidInterval(format!(
                    "endpoints must be finite, got [{a}, {b})"
                )));
            }
            if a < b {
                components.push((a, b));
            }
        }
        components.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap_or(Ordering::Equal));
        Ok(IntervalSet {
            components: merge_sorted(components),
        })
    }

    pub fn components(&self) -> &[(f64, f64)] {
        &self.components
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn contains(&self, x: f64) -> bool {
        // first component whose right endpoint exceeds x
        let i = self.components.partition_point(|&(_, b)| b <= x);
        self.components.get(i).is_some_and(|&(a, _)| a <= x)
    }

    /// Sum of component lengths.
    pub fn lebesgue(&self) -> f64 {
        self.components.iter().map(|&(a, b)| b - a).sum()
    }

    /// Smallest interval `[lo, hi)` containing the set.
    pub fn hull(&self) -> Option<(f64, f64)> {
        Some((self.components.first()?.0, self.components.last()?.1))
    }

    pub fn union(&self, other: &IntervalSet) -> IntervalSet {
        let mut all = Vec::with_capacity(self.components.len() + other.components.len());
        let (mut i, mut j) = (0, 0);
        while i < self.components.len() || j < other.components.len() {
            let take_left = match (self.components.get(i), other.components.get(j)) {
                (Some(x), Some(y)) => x.0 <= y.0,
                (Some(_), None) => true,
                _ => false,
            };
            if take_left {
                all.push(self.components[i]);
                i += 1;
            } else {
                all.push(other.components[j]);
                j += 1;
            }
        }
        IntervalSet {
            components: merge_sorted(all),
        }
    }

    pub fn intersect(&self, other: &IntervalSet) -> IntervalSet {
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.components.len() && j < other.components.len() {
            let (a1, b1) = self.components[i];
            let (a2, b2) = other.components[j];
            let lo = a1.max(a2);
            let hi = b1.min(b2);
            if lo < hi {
                out.push((lo, hi));
            }
            if b1 < b2 {
                i += 1;
            } else {
                j += 1;
            }
        }
        // pieces of normalized inputs never abut each other
        IntervalSet { components: out }
    }

    /// `self \ other`.
    pub fn difference(&self, other: &IntervalSet) -> IntervalSet {
        let mut out = Vec::new();
        let mut j = 0;
        for &(a, b) in &self.components {
            let mut lo = a;
            while j < other.components.len() && other.components[j].1 <= lo {
                j += 1;
            }
            let mut k = j;
            while lo < b {
                match other.components.get(k) {
                    Some(&(c, d)) if c < b => {
                        if c > lo {
                            out.push((lo, c));
                        }
                        lo = lo.max(d);
                        k += 1;
                    }
                    _ => {
                        out.push((lo, b));
                        break;
                    }
                }
            }
        }
        IntervalSet { components: out }
    }

    /// `window \ self`.
    pub fn complement_within(&self, window: &IntervalSet) -> IntervalSet {
        window.difference(self)
    }

    pub fn is_subset(&self, other: &IntervalSet) -> bool {
        self.difference(other).is_empty()
    }

    pub fn is_disjoint(&self, other: &IntervalSet) -> bool {
        self.intersect(other).is_empty()
    }

    /// One single-interval set per component.
    pub fn split_components(&self) -> Vec<IntervalSet> {
        self.components
            .iter()
            .map(|&c| IntervalSet {
                components: vec![c],
            })
            .collect()
    }

    /// Set translated by `shift`.
    pub fn shifted(&self, shift: f64) -> IntervalSet {
        IntervalSet::new(self.components.iter().map(|&(a, b)| (a + shift, b + shift)))
            .unwrap_or_default()
    }

    /// Bit-exact key usable for hashing and ordering cells.
    pub fn key(&self) -> Vec<(u64, u64)> {
        self.components
            .iter()
            .map(|&(a, b)| (a.to_bits(), b.to_bits()))
            .collect()
    }
}

fn merge_sorted(sorted: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(sorted.len());
    for (a, b) in sorted {
        match out.last_mut() {
            // overlap, or a zero gap: [x, a) and [a, y) are the same set as [x, y)
            Some(last) if a <= last.1 => last.1 = last.1.max(b),
            _ => out.push((a, b)),
        }
    }
    out
}

impl fmt::Debug for IntervalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for IntervalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.components.is_empty() {
            return write!(f, "∅");
        }
        for (i, (a, b)) in self.components.iter().enumerate() {
            if i > 0 {
                write!(f, "∪")?;
            }
            write!(f, "[{a},{b})")?;
        }
        Ok(())
    }
}

impl TryFrom<Vec<[f64; 2]>> for IntervalSet {
    type Error = Error;

    fn try_from(pairs: Vec<[f64; 2]>) -> Result<Self> {
        for [a, b] in &pairs {
            if a > b {
                return Err(Error::InvalidInterval(format!(
                    "left endpoint exceeds right endpoint in [{a}, {b}]"
                )));
            }
        }
        IntervalSet::new(pairs.into_iter().map(|[a, b]| (a, b)))
    }
}

impl From<IntervalSet> for Vec<[f64; 2]> {
    fn from(set: IntervalSet) -> Self {
        set.components.into_iter().map(|(a, b)| [a, b]).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(pairs: &[(f64, f64)]) -> IntervalSet {
        IntervalSet::new(pairs.iter().copied()).unwrap()
    }

    #[test]
    fn union_merges_overlap() {
        assert_eq!(
            set(&[(0.0, 1.0)]).union(&set(&[(0.5, 2.0)])),
            set(&[(0.0, 2.0)])
        );
        assert_eq!(
            IntervalSet::empty().union(&set(&[(3.0, 4.0)])),
            set(&[(3.0, 4.0)])
        );
    }

    #[test]
    fn half_open_intersection_is_empty() {
        assert!(set(&[(0.0, 1.0)]).intersect(&set(&[(1.0, 2.0)])).is_empty());
    }

    #[test]
    fn abutting_components_merge() {
        let s = set(&[(0.0, 1.0), (1.0, 2.0)]);
        assert_eq!(s.components(), &[(0.0, 2.0)]);
    }

    #[test]
    fn lebesgue_sums_lengths() {
        assert_eq!(set(&[(0.0, 1.0), (2.0, 2.5)]).lebesgue(), 1.5);
        assert_eq!(IntervalSet::empty().lebesgue(), 0.0);
        assert_eq!(set(&[(-1.0, 1.0)]).lebesgue(), 2.0);
    }

    #[test]
    fn difference_and_complement() {
        let a = set(&[(0.0, 4.0)]);
        let b = set(&[(1.0, 2.0), (3.0, 5.0)]);
        assert_eq!(a.difference(&b), set(&[(0.0, 1.0), (2.0, 3.0)]));
        assert_eq!(b.complement_within(&a), set(&[(0.0, 1.0), (2.0, 3.0)]));
        assert!(a.difference(&a).is_empty());
    }

    #[test]
    fn contains_respects_half_open() {
        let s = set(&[(0.0, 1.0), (2.0, 3.0)]);
        assert!(s.contains(0.0));
        assert!(!s.contains(1.0));
        assert!(s.contains(2.5));
        assert!(!s.contains(3.0));
        assert!(!s.contains(-0.1));
    }

    #[test]
    fn json_roundtrip_and_rejects_reversed() {
        let s = set(&[(0.0, 0.5), (0.75, 1.0)]);
        let js = serde_json::to_string(&s).unwrap();
        assert_eq!(js, "[[0.0,0.5],[0.75,1.0]]");
        let back: IntervalSet = serde_json::from_str(&js).unwrap();
        assert_eq!(back, s);
        assert!(serde_json::from_str::<IntervalSet>("[[1.0,0.0]]").is_err());
    }

    #[test]
    fn non_finite_endpoints_rejected() {
        assert!(IntervalSet::interval(0.0, f64::INFINITY).is_err());
        assert!(IntervalSet::interval(f64::NAN, 1.0).is_err());
    }
}
