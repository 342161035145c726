//! Real-line regions with explicit endpoint closedness.
//!
//! The half-open ring cannot hold closed sets such as `[a, b]` or `{0}`, nor
//! open sets such as `(0, 1)`. Those are needed as test sets for closed-set
//! and G-delta comparisons, so [`RealSet`] stores each span with its own
//! endpoint flags. Only the operations the analytic and sampling layers need
//! are provided (membership, length, intersection, closure, translation);
//! the full ring algebra stays with [`IntervalSet`].

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::setalg::IntervalSet;

/// One connected piece of a [`RealSet`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Span {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Span {
    pub fn half_open(lo: f64, hi: f64) -> Span {
        Span {
            lo,
            hi,
            lo_closed: true,
            hi_closed: false,
        }
    }

    pub fn closed(lo: f64, hi: f64) -> Span {
        Span {
            lo,
            hi,
            lo_closed: true,
            hi_closed: true,
        }
    }

    pub fn open(lo: f64, hi: f64) -> Span {
        Span {
            lo,
            hi,
            lo_closed: false,
            hi_closed: false,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.lo > self.hi || (self.lo == self.hi && !(self.lo_closed && self.hi_closed))
    }

    pub fn contains(&self, x: f64) -> bool {
        let above = if self.lo_closed {
            x >= self.lo
        } else {
            x > self.lo
        };
        let below = if self.hi_closed {
            x <= self.hi
        } else {
            x < self.hi
        };
        above && below
    }

    pub fn length(&self) -> f64 {
        (self.hi - self.lo).max(0.0)
    }

    pub fn intersect(&self, other: &Span) -> Span {
        let (lo, lo_closed) = match self.lo.partial_cmp(&other.lo) {
            Some(std::cmp::Ordering::Greater) => (self.lo, self.lo_closed),
            Some(std::cmp::Ordering::Less) => (other.lo, other.lo_closed),
            _ => (self.lo, self.lo_closed && other.lo_closed),
        };
        let (hi, hi_closed) = match self.hi.partial_cmp(&other.hi) {
            Some(std::cmp::Ordering::Less) => (self.hi, self.hi_closed),
            Some(std::cmp::Ordering::Greater) => (other.hi, other.hi_closed),
            _ => (self.hi, self.hi_closed && other.hi_closed),
        };
        Span {
            lo,
            hi,
            lo_closed,
            hi_closed,
        }
    }

    /// Length of the overlap with the open interval `(lo, hi)`.
    pub fn overlap_length(&self, lo: f64, hi: f64) -> f64 {
        (self.hi.min(hi) - self.lo.max(lo)).max(0.0)
    }
}

/// A finite union of pairwise disjoint spans, sorted by left endpoint.
#[derive(Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RealSet {
    spans: Vec<Span>,
}

impl RealSet {
    pub fn empty() -> Self {
        RealSet::default()
    }

    /// Builds a set from spans that must be pairwise disjoint. Empty spans
    /// are dropped.
    pub fn from_spans(spans: impl IntoIterator<Item = Span>) -> Result<Self> {
        let mut spans: Vec<Span> = spans.into_iter().filter(|s| !s.is_empty()).collect();
        for s in &spans {
            if !s.lo.is_finite() || !s.hi.is_finite() {
                return Err(Error::InvalidInterval(format!(
                    "span endpoints must be finite, got ({}, {})",
                    s.lo, s.hi
                )));
            }
        }
        spans.sort_by(|a, b| a.lo.total_cmp(&b.lo).then(b.lo_closed.cmp(&a.lo_closed)));
        for w in spans.windows(2) {
            if !w[0].intersect(&w[1]).is_empty() {
                return Err(Error::InvalidInterval(format!(
                    "spans overlap: {:?} and {:?}",
                    w[0], w[1]
                )));
            }
        }
        Ok(RealSet { spans })
    }

    /// Union of closed intervals `[a, b]`; overlapping inputs are merged.
    pub fn closed(pairs: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        let mut pairs: Vec<(f64, f64)> = pairs.into_iter().filter(|(a, b)| a <= b).collect();
        pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
        let mut merged: Vec<(f64, f64)> = Vec::new();
        for (a, b) in pairs {
            match merged.last_mut() {
                Some(last) if a <= last.1 => last.1 = last.1.max(b),
                _ => merged.push((a, b)),
            }
        }
        Self::from_spans(merged.into_iter().map(|(a, b)| Span::closed(a, b)))
    }

    /// Union of open intervals `(a, b)`; overlapping inputs are merged.
    pub fn open(pairs: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        let mut pairs: Vec<(f64, f64)> = pairs.into_iter().filter(|(a, b)| a < b).collect();
        pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
        let mut merged: Vec<(f64, f64)> = Vec::new();
        for (a, b) in pairs {
            match merged.last_mut() {
                Some(last) if a < last.1 => last.1 = last.1.max(b),
                _ => merged.push((a, b)),
            }
        }
        Self::from_spans(merged.into_iter().map(|(a, b)| Span::open(a, b)))
    }

    pub fn point(x: f64) -> Result<Self> {
        Self::from_spans([Span::closed(x, x)])
    }

    pub fn spans(&self) -> &[Span] {
        &self.spans
    }

    pub fn is_empty(&self) -> bool {
        self.spans.is_empty()
    }

    pub fn contains(&self, x: f64) -> bool {
        let i = self.spans.partition_point(|s| s.hi < x);
        self.spans[i..].iter().take(2).any(|s| s.contains(x))
    }

    pub fn lebesgue(&self) -> f64 {
        self.spans.iter().map(Span::length).sum()
    }

    pub fn intersect(&self, other: &RealSet) -> RealSet {
        let mut spans = Vec::new();
        for a in &self.spans {
            for b in &other.spans {
                let s = a.intersect(b);
                if !s.is_empty() {
                    spans.push(s);
                }
            }
        }
        spans.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        RealSet { spans }
    }

    /// Conservative inclusion test: every span of `self` must lie inside a
    /// single span of `other`. Exact unless `other` has touching spans.
    pub fn is_subset(&self, other: &RealSet) -> bool {
        self.spans
            .iter()
            .all(|a| other.spans.iter().any(|b| a.intersect(b) == *a))
    }

    pub fn shifted(&self, shift: f64) -> RealSet {
        RealSet {
            spans: self
                .spans
                .iter()
                .map(|s| Span {
                    lo: s.lo + shift,
                    hi: s.hi + shift,
                    ..*s
                })
                .collect(),
        }
    }

    /// Closure as merged closed intervals `[a, b]` (degenerate points kept).
    pub fn closure(&self) -> Vec<(f64, f64)> {
        let mut out: Vec<(f64, f64)> = Vec::new();
        for s in &self.spans {
            match out.last_mut() {
                Some(last) if s.lo <= last.1 => last.1 = last.1.max(s.hi),
                _ => out.push((s.lo, s.hi)),
            }
        }
        out
    }
}

impl From<&IntervalSet> for RealSet {
    fn from(set: &IntervalSet) -> Self {
        RealSet {
            spans: set
                .components()
                .iter()
                .map(|&(a, b)| Span::half_open(a, b))
                .collect(),
        }
    }
}

impl From<IntervalSet> for RealSet {
    fn from(set: IntervalSet) -> Self {
        RealSet::from(&set)
    }
}

impl fmt::Debug for RealSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for RealSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.spans.is_empty() {
            return write!(f, "∅");
        }
        for (i, s) in self.spans.iter().enumerate() {
            if i > 0 {
                write!(f, "∪")?;
            }
            let l = if s.lo_closed { '[' } else { '(' };
            let r = if s.hi_closed { ']' } else { ')' };
            write!(f, "{l}{},{}{r}", s.lo, s.hi)?;
        }
        Ok(())
    }
}

/// Anything that can be viewed as a real-line region.
pub trait Region {
    fn to_real_set(&self) -> RealSet;
    fn contains_point(&self, x: f64) -> bool;
}

impl Region for RealSet {
    fn to_real_set(&self) -> RealSet {
        self.clone()
    }

    fn contains_point(&self, x: f64) -> bool {
        self.contains(x)
    }
}

impl Region for IntervalSet {
    fn to_real_set(&self) -> RealSet {
        RealSet::from(self)
    }

    fn contains_point(&self, x: f64) -> bool {
        self.contains(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closedness_controls_membership() {
        let c = RealSet::closed([(0.0, 1.0)]).unwrap();
        let o = RealSet::open([(0.0, 1.0)]).unwrap();
        assert!(c.contains(0.0) && c.contains(1.0));
        assert!(!o.contains(0.0) && !o.contains(1.0));
        assert!(o.contains(0.5));
        assert!(RealSet::point(0.0).unwrap().contains(0.0));
    }

    #[test]
    fn point_has_zero_length() {
        let p = RealSet::point(2.0).unwrap();
        assert_eq!(p.lebesgue(), 0.0);
        assert!(!p.is_empty());
    }

    #[test]
    fn closure_merges_touching_spans() {
        let s = RealSet::from_spans([Span::half_open(0.0, 1.0), Span::open(1.0, 2.0)]).unwrap();
        assert_eq!(s.closure(), vec![(0.0, 2.0)]);
        assert!(!s.contains(1.0));
    }

    #[test]
    fn overlapping_spans_rejected() {
        assert!(RealSet::from_spans([Span::closed(0.0, 1.0), Span::closed(1.0, 2.0)]).is_err());
        assert!(RealSet::from_spans([Span::half_open(0.0, 1.0), Span::closed(1.0, 2.0)]).is_ok());
    }

    #[test]
    fn intersection_keeps_flags() {
        let a = RealSet::closed([(0.0, 1.0)]).unwrap();
        let b = RealSet::open([(0.5, 2.0)]).unwrap();
        let c = a.intersect(&b);
        assert_eq!(
            c.spans(),
            &[Span {
                lo: 0.5,
                hi: 1.0,
                lo_closed: false,
                hi_closed: true
            }]
        );
    }
}
