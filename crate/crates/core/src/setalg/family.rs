//! Countable point-separating families `E_1, E_2, ...` over each backend.
//!
//! Families are enumerated in *rounds*: round `r` is a contiguous block of
//! indices whose sets are pairwise disjoint. The dyadic family uses one
//! round per dyadic depth; the singleton family uses one index per round.
//! Both the canonical-point descent and the dissecting systems consume
//! families round by round, so the enumeration order fixed here determines
//! which point gets selected.

use std::fmt::Debug;
use std::ops::RangeInclusive;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::setalg::{DiscreteSet, IntervalSet};

/// Set algebra needed to build dissecting systems over a backend.
pub trait MeasurableSet: Clone + PartialEq + Debug {
    type Point: Copy + PartialEq + PartialOrd + Debug;

    fn is_empty(&self) -> bool;
    fn contains(&self, p: Self::Point) -> bool;
    fn intersect(&self, other: &Self) -> Self;
    /// `self \ other` as pairwise disjoint semiring pieces.
    fn difference_pieces(&self, other: &Self) -> Vec<Self>;
    /// `self` as pairwise disjoint semiring pieces.
    fn pieces(&self) -> Vec<Self>;
}

impl MeasurableSet for IntervalSet {
    type Point = f64;

    fn is_empty(&self) -> bool {
        IntervalSet::is_empty(self)
    }

    fn contains(&self, p: f64) -> bool {
        IntervalSet::contains(self, p)
    }

    fn intersect(&self, other: &Self) -> Self {
        IntervalSet::intersect(self, other)
    }

    fn difference_pieces(&self, other: &Self) -> Vec<Self> {
        self.difference(other).split_components()
    }

    fn pieces(&self) -> Vec<Self> {
        self.split_components()
    }
}

impl MeasurableSet for DiscreteSet {
    type Point = usize;

    fn is_empty(&self) -> bool {
        DiscreteSet::is_empty(self)
    }

    fn contains(&self, p: usize) -> bool {
        DiscreteSet::contains(self, p)
    }

    fn intersect(&self, other: &Self) -> Self {
        DiscreteSet::intersect(self, other)
    }

    fn difference_pieces(&self, other: &Self) -> Vec<Self> {
        let d = self.difference(other);
        if d.is_empty() {
            Vec::new()
        } else {
            vec![d]
        }
    }

    fn pieces(&self) -> Vec<Self> {
        if self.is_empty() {
            Vec::new()
        } else {
            vec![*self]
        }
    }
}

/// A countable family of sets separating the points of its backend.
pub trait SeparatingFamily {
    type Set: MeasurableSet;

    /// `E_index`, with indices starting at 1.
    fn set(&self, index: u128) -> Self::Set;

    /// Indices belonging to round `r` (`r >= 1`).
    fn round(&self, r: u32) -> RangeInclusive<u128>;

    /// Index of the set in round `r` containing `p`, if any. Sets within a
    /// round are disjoint, so there is at most one.
    fn round_index_of(&self, r: u32, p: <Self::Set as MeasurableSet>::Point) -> Option<u128>;

    fn contains(&self, index: u128, p: <Self::Set as MeasurableSet>::Point) -> bool {
        let r = self.round_of(index);
        self.round_index_of(r, p) == Some(index)
    }

    /// Round containing `index`.
    fn round_of(&self, index: u128) -> u32;

    /// Sets of round `r` that meet `cell`, with their indices. The default
    /// scans the whole round.
    fn round_sets_meeting(&self, r: u32, cell: &Self::Set) -> Vec<(u128, Self::Set)> {
        self.round(r)
            .map(|n| (n, self.set(n)))
            .filter(|(_, e)| !e.intersect(cell).is_empty())
            .collect()
    }

    /// Least index separating `x` and `y`, if one exists within `max_rounds`.
    fn separating_index(
        &self,
        x: <Self::Set as MeasurableSet>::Point,
        y: <Self::Set as MeasurableSet>::Point,
        max_rounds: u32,
    ) -> Option<u128> {
        if x == y {
            return None;
        }
        (1..=max_rounds).find_map(|r| {
            let (ix, iy) = (self.round_index_of(r, x), self.round_index_of(r, y));
            match (ix, iy) {
                (Some(a), Some(b)) if a != b => Some(a.min(b)),
                (Some(a), None) | (None, Some(a)) => Some(a),
                _ => None,
            }
        })
    }
}

/// Breadth-first dyadic subdivision of a window.
///
/// Depth `d` contributes the `2^d` cells `[lo + k w 2^-d, lo + (k+1) w 2^-d)`
/// (intersected with the window), in increasing `k`. For the window
/// `[0, 1)` this gives `E_1 = [0, 0.5)`, `E_2 = [0.5, 1)`, `E_3 = [0, 0.25)`.
///
/// Membership is decided on the scaled coordinate `t = (x - lo) / w` by
/// `floor(t 2^d)`, which is exact for every depth. The interval returned by
/// [`SeparatingFamily::set`] agrees with it whenever the window has dyadic
/// endpoints and the depth is at most 52.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DyadicFamily {
    window: IntervalSet,
    lo: f64,
    width: f64,
}

/// Largest dyadic depth the family indexes (indices stay below `2^65`).
pub const MAX_DYADIC_DEPTH: u32 = 64;

impl DyadicFamily {
    pub fn new(window: IntervalSet) -> Result<Self> {
        let (lo, hi) = window
            .hull()
            .ok_or_else(|| Error::Precondition("dyadic family needs a nonempty window".into()))?;
        Ok(DyadicFamily {
            window,
            lo,
            width: hi - lo,
        })
    }

    pub fn window(&self) -> &IntervalSet {
        &self.window
    }

    /// Decodes a 1-based index into `(depth, k)`.
    pub fn depth_and_cell(index: u128) -> (u32, u128) {
        assert!(index >= 1, "family indices start at 1");
        // depth d covers indices 2^d - 1 ..= 2^(d+1) - 2
        let d = 127 - (index + 1).leading_zeros();
        (d, index + 1 - (1u128 << d))
    }

    pub fn index_of(depth: u32, cell: u128) -> u128 {
        (1u128 << depth) - 1 + cell
    }

    /// Cell coordinate of `x` at `depth`, or `None` outside the window.
    pub fn cell_at(&self, depth: u32, x: f64) -> Option<u128> {
        if !self.window.contains(x) {
            return None;
        }
        let t = ((x - self.lo) / self.width).clamp(0.0, 1.0);
        let scaled = (t * (2f64).powi(depth as i32)).floor() as u128;
        Some(scaled.min((1u128 << depth) - 1))
    }

    fn cell_interval(&self, depth: u32, k: u128) -> (f64, f64) {
        let step = (2f64).powi(-(depth as i32));
        let a = self.lo + self.width * (k as f64 * step);
        let b = self.lo + self.width * ((k + 1) as f64 * step);
        (a, b)
    }

    /// Depth at which two window points are guaranteed to be separated:
    /// once the cell width `w 2^-d` is at most their distance.
    pub fn separation_depth_bound(&self, x: f64, y: f64) -> u32 {
        let dist = (x - y).abs();
        if dist == 0.0 {
            return u32::MAX;
        }
        ((self.width / dist).log2().ceil().max(1.0)) as u32
    }
}

impl SeparatingFamily for DyadicFamily {
    type Set = IntervalSet;

    fn set(&self, index: u128) -> IntervalSet {
        let (d, k) = Self::depth_and_cell(index);
        let (a, b) = self.cell_interval(d, k);
        IntervalSet::interval(a, b)
            .map(|c| c.intersect(&self.window))
            .unwrap_or_default()
    }

    fn round(&self, r: u32) -> RangeInclusive<u128> {
        Self::index_of(r, 0)..=Self::index_of(r, (1u128 << r) - 1)
    }

    fn round_index_of(&self, r: u32, p: f64) -> Option<u128> {
        self.cell_at(r, p).map(|k| Self::index_of(r, k))
    }

    fn round_of(&self, index: u128) -> u32 {
        Self::depth_and_cell(index).0
    }

    fn round_sets_meeting(&self, r: u32, cell: &IntervalSet) -> Vec<(u128, IntervalSet)> {
        let Some((a, b)) = cell.hull() else {
            return Vec::new();
        };
        let hi = self.lo + self.width;
        if b <= self.lo || a >= hi {
            return Vec::new();
        }
        let scale = (2f64).powi(r as i32);
        // cells meeting [a, b) lie between the cells of a and of b (exclusive end)
        let t_lo = ((a.max(self.lo) - self.lo) / self.width).clamp(0.0, 1.0);
        // one cell of slack on each side absorbs rounding; the filter below is exact
        let k_lo = ((t_lo * scale).floor() as u128)
            .min((1u128 << r) - 1)
            .saturating_sub(1);
        let t_hi = ((b.min(hi) - self.lo) / self.width).clamp(0.0, 1.0);
        let k_hi = ((t_hi * scale).ceil() as u128 + 1).min(1u128 << r);
        (k_lo..k_hi)
            .map(|k| {
                let n = Self::index_of(r, k);
                (n, self.set(n))
            })
            .filter(|(_, e)| !e.intersect(cell).is_empty())
            .collect()
    }
}

/// `E_n = {n - 1}` for `n <= m`, then `E_n = ∅`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SingletonFamily {
    m: usize,
}

impl SingletonFamily {
    pub fn new(m: usize) -> Result<Self> {
        DiscreteSet::empty(m)?;
        Ok(SingletonFamily { m })
    }

    pub fn universe_size(&self) -> usize {
        self.m
    }
}

impl SeparatingFamily for SingletonFamily {
    type Set = DiscreteSet;

    fn set(&self, index: u128) -> DiscreteSet {
        let empty = DiscreteSet::empty(self.m).expect("validated universe");
        match usize::try_from(index) {
            Ok(n) if (1..=self.m).contains(&n) => {
                DiscreteSet::singleton(self.m, n - 1).expect("index within universe")
            }
            _ => empty,
        }
    }

    fn round(&self, r: u32) -> RangeInclusive<u128> {
        let n = u128::from(r);
        n..=n
    }

    fn round_index_of(&self, r: u32, p: usize) -> Option<u128> {
        (p < self.m && r as usize == p + 1).then_some(u128::from(r))
    }

    fn round_of(&self, index: u128) -> u32 {
        index as u32
    }
}

/// `dyadic_family(window)`.
pub fn dyadic_family(window: IntervalSet) -> Result<DyadicFamily> {
    DyadicFamily::new(window)
}

/// `singleton_family(m)`.
pub fn singleton_family(m: usize) -> Result<SingletonFamily> {
    SingletonFamily::new(m)
}
