//! Dissecting systems, Leadbetter counting, the binary Z-tree and the
//! canonical selection/enumeration of finite point sets.
//!
//! Everything here is driven by a [`SeparatingFamily`]. The selected point
//! depends on the family's enumeration order: a different separating family
//! may select a different point of the same set.

use std::fmt::Debug;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::setalg::{MeasurableSet, SeparatingFamily, MAX_DYADIC_DEPTH};

/// Point type of a family's sets.
pub type PointOf<F> = <<F as SeparatingFamily>::Set as MeasurableSet>::Point;

/// Most rounds any descent or dissection will run.
pub const MAX_ROUNDS: u32 = MAX_DYADIC_DEPTH;

/// A finite set of points. Duplicates are dropped on construction and the
/// stored order is irrelevant to every operation in this module.
#[derive(Clone, Debug, Serialize)]
pub struct FinitePointSet<P> {
    points: Vec<P>,
}

impl<P: Copy + PartialEq> FinitePointSet<P> {
    pub fn new(points: impl IntoIterator<Item = P>) -> Self {
        let mut out: Vec<P> = Vec::new();
        for p in points {
            if !out.contains(&p) {
                out.push(p);
            }
        }
        FinitePointSet { points: out }
    }

    pub fn empty() -> Self {
        FinitePointSet { points: Vec::new() }
    }

    pub fn points(&self) -> &[P] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, p: P) -> bool {
        self.points.contains(&p)
    }

    /// Inserts `p`; returns false if it was already present.
    pub fn insert(&mut self, p: P) -> bool {
        if self.contains(p) {
            false
        } else {
            self.points.push(p);
            true
        }
    }

    pub fn without(&self, p: P) -> Self {
        FinitePointSet {
            points: self.points.iter().copied().filter(|&q| q != p).collect(),
        }
    }

    /// Points lying in `set`.
    pub fn restrict<S: MeasurableSet<Point = P>>(&self, set: &S) -> Self {
        FinitePointSet {
            points: self
                .points
                .iter()
                .copied()
                .filter(|&q| set.contains(q))
                .collect(),
        }
    }

    /// Number of points in `set`, i.e. `N_A(M)`.
    pub fn count_in<S: MeasurableSet<Point = P>>(&self, set: &S) -> usize {
        self.points.iter().filter(|&&q| set.contains(q)).count()
    }

    pub fn hits<S: MeasurableSet<Point = P>>(&self, set: &S) -> bool {
        self.points.iter().any(|&q| set.contains(q))
    }
}

impl<P: Copy + PartialEq> PartialEq for FinitePointSet<P> {
    fn eq(&self, other: &Self) -> bool {
        self.len() == other.len() && self.points.iter().all(|&p| other.contains(p))
    }
}

impl<P: Copy + PartialEq> FromIterator<P> for FinitePointSet<P> {
    fn from_iter<I: IntoIterator<Item = P>>(iter: I) -> Self {
        FinitePointSet::new(iter)
    }
}

// ---------------------------------------------------------------------------
// dissecting systems

/// Nested partitions of `root`: level 0 is `root` split into its pieces,
/// and level `n` splits every level-`(n-1)` cell by the sets of round `n` of
/// the family (one piece per meeting set, then the pieces of the remainder).
#[derive(Clone, Debug)]
pub struct DissectingSystem<F: SeparatingFamily> {
    root: F::Set,
    family: F,
}

impl<F: SeparatingFamily + Clone> DissectingSystem<F> {
    pub fn new(root: F::Set, family: &F) -> Self {
        DissectingSystem {
            root,
            family: family.clone(),
        }
    }
}

impl<F: SeparatingFamily> DissectingSystem<F> {
    pub fn root(&self) -> &F::Set {
        &self.root
    }

    fn split(&self, cell: &F::Set, round: u32) -> Vec<F::Set> {
        let meeting = self.family.round_sets_meeting(round, cell);
        let mut out = Vec::new();
        let mut rest = vec![cell.clone()];
        for (_, e) in &meeting {
            out.extend(cell.intersect(e).pieces());
            rest = rest
                .iter()
                .flat_map(|piece| piece.difference_pieces(e))
                .collect();
        }
        out.extend(rest);
        out
    }

    /// Cells of level `depth`.
    pub fn level(&self, depth: u32) -> Vec<F::Set> {
        let mut cells = self.root.pieces();
        for round in 1..=depth.min(MAX_ROUNDS) {
            cells = cells.iter().flat_map(|c| self.split(c, round)).collect();
        }
        cells
    }

    /// The level-`depth` cell containing `p`, found by following `p` down
    /// the tree without materializing the other cells.
    pub fn cell_of(&self, p: PointOf<F>, depth: u32) -> Option<F::Set> {
        let mut cell = self.root.pieces().into_iter().find(|c| c.contains(p))?;
        for round in 1..=depth.min(MAX_ROUNDS) {
            cell = self
                .split(&cell, round)
                .into_iter()
                .find(|c| c.contains(p))?;
        }
        Some(cell)
    }
}

/// Level `depth` of the dissecting system of `a` built from `family`.
pub fn dissect<F: SeparatingFamily + Clone>(a: &F::Set, family: &F, depth: u32) -> Vec<F::Set> {
    DissectingSystem::new(a.clone(), family).level(depth)
}

/// Number of level-`depth` cells of the dissection of `a` hit by `m`. It is
/// nondecreasing in `depth` and reaches `|M ∩ A|` once the cells separate
/// the points of `M ∩ A`.
pub fn leadbetter_count<F: SeparatingFamily + Clone>(
    m: &FinitePointSet<PointOf<F>>,
    a: &F::Set,
    family: &F,
    depth: u32,
) -> usize {
    let system = DissectingSystem::new(a.clone(), family);
    let mut occupied: Vec<F::Set> = Vec::new();
    for &p in m.points() {
        if let Some(cell) = system.cell_of(p, depth) {
            if !occupied.contains(&cell) {
                occupied.push(cell);
            }
        }
    }
    occupied.len()
}

// ---------------------------------------------------------------------------
// Z-tree and canonical selection

/// Binary nested partition of `root` with `Z_{1,1} = E_1`, `Z_{1,2} = E_1^c`,
/// `Z_{n,2k-1} = Z_{n-1,k} ∩ E_n` and `Z_{n,2k} = Z_{n-1,k} \ E_n`.
///
/// Cells are kept as lists of disjoint pieces; empty cells stay in place so
/// that indices match the recursion above.
#[derive(Clone, Debug)]
pub struct ZTree<F: SeparatingFamily> {
    root: F::Set,
    family: F,
}

/// Largest level [`ZTree::level`] will materialize (`2^20` cells).
pub const MAX_ZTREE_LEVEL: u32 = 20;

impl<F: SeparatingFamily + Clone> ZTree<F> {
    pub fn new(root: F::Set, family: &F) -> Self {
        ZTree {
            root,
            family: family.clone(),
        }
    }
}

impl<F: SeparatingFamily> ZTree<F> {
    /// The `2^n` cells of level `n`, in index order.
    pub fn level(&self, n: u32) -> Result<Vec<Vec<F::Set>>> {
        if n > MAX_ZTREE_LEVEL {
            return Err(Error::Precondition(format!(
                "Z-tree level {n} exceeds the materialization cap {MAX_ZTREE_LEVEL}"
            )));
        }
        let mut cells = vec![self.root.pieces()];
        for index in 1..=u128::from(n) {
            let e = self.family.set(index);
            cells = cells
                .iter()
                .flat_map(|cell| {
                    let inside: Vec<F::Set> = cell
                        .iter()
                        .flat_map(|piece| piece.intersect(&e).pieces())
                        .collect();
                    let outside: Vec<F::Set> = cell
                        .iter()
                        .flat_map(|piece| piece.difference_pieces(&e))
                        .collect();
                    [inside, outside]
                })
                .collect();
        }
        Ok(cells)
    }

    /// Index-by-index descent over `E_1, .., E_max_index`: keep the part of
    /// `M` inside `E_n` whenever it is nonempty. Equivalent to following the
    /// least-index cell meeting `M`, and intended as a reference for small
    /// families.
    pub fn descend_by_index(
        &self,
        m: &FinitePointSet<PointOf<F>>,
        max_index: u128,
    ) -> Result<PointOf<F>> {
        let mut current: Vec<PointOf<F>> = m.points().to_vec();
        if current.is_empty() {
            return Err(Error::EmptySet);
        }
        let mut n = 1u128;
        while current.len() > 1 {
            if n > max_index {
                return Err(Error::NotSeparated {
                    rounds: self.family.round_of(max_index),
                });
            }
            let e = self.family.set(n);
            let inside: Vec<_> = current.iter().copied().filter(|&p| e.contains(p)).collect();
            if !inside.is_empty() {
                current = inside;
            }
            n += 1;
        }
        Ok(current[0])
    }
}

/// The point of `M` isolated by always following the least-index Z-tree
/// cell that meets `M`.
///
/// Within a round the family's sets are disjoint, so the index-by-index
/// descent collapses to one step per round: keep the points lying in the
/// least-index set of the round that contains any of them.
pub fn canonical_point<F: SeparatingFamily>(
    m: &FinitePointSet<PointOf<F>>,
    family: &F,
) -> Result<PointOf<F>> {
    let mut current: Vec<PointOf<F>> = m.points().to_vec();
    if current.is_empty() {
        return Err(Error::EmptySet);
    }
    let mut round = 1;
    while current.len() > 1 {
        if round > MAX_ROUNDS {
            return Err(Error::NotSeparated { rounds: MAX_ROUNDS });
        }
        let indices: Vec<Option<u128>> = current
            .iter()
            .map(|&p| family.round_index_of(round, p))
            .collect();
        if let Some(least) = indices.iter().flatten().min().copied() {
            current = current
                .iter()
                .zip(&indices)
                .filter(|(_, &i)| i == Some(least))
                .map(|(&p, _)| p)
                .collect();
        }
        round += 1;
    }
    Ok(current[0])
}

/// `y` for the empty set, the canonical point otherwise.
pub fn select_with_fallback<F: SeparatingFamily>(
    m: &FinitePointSet<PointOf<F>>,
    y: PointOf<F>,
    family: &F,
) -> Result<PointOf<F>> {
    if m.is_empty() {
        Ok(y)
    } else {
        canonical_point(m, family)
    }
}

/// The sequence `X_1, X_2, ..`: the points of `M` in selection order, then
/// `X_1` forever (or `y` forever when `M` is empty).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Enumeration<P> {
    order: Vec<P>,
    fill: P,
}

impl<P: Copy> Enumeration<P> {
    /// `X_n` for `n >= 1`.
    pub fn term(&self, n: usize) -> P {
        assert!(n >= 1, "enumeration terms start at 1");
        self.order.get(n - 1).copied().unwrap_or(self.fill)
    }

    pub fn first(&self, count: usize) -> Vec<P> {
        (1..=count).map(|n| self.term(n)).collect()
    }

    /// The selection order of the points of `M`.
    pub fn distinct_prefix(&self) -> &[P] {
        &self.order
    }

    pub fn iter(&self) -> impl Iterator<Item = P> + '_ {
        (1..).map(|n| self.term(n))
    }
}

pub fn enumerate_finite<F: SeparatingFamily>(
    m: &FinitePointSet<PointOf<F>>,
    y: PointOf<F>,
    family: &F,
) -> Result<Enumeration<PointOf<F>>> {
    let mut rest = m.clone();
    let mut order = Vec::with_capacity(m.len());
    while !rest.is_empty() {
        let x = canonical_point(&rest, family)?;
        order.push(x);
        rest = rest.without(x);
    }
    let fill = order.first().copied().unwrap_or(y);
    Ok(Enumeration { order, fill })
}

/// Doubly indexed enumeration `X_{n,k}` of a union of finite components.
/// Empty components are filled with the selector of the first nonempty
/// component, so every term lies in the union whenever it is nonempty.
#[derive(Clone, Debug, Serialize)]
pub struct ConstructiveEnumeration<P> {
    components: Vec<Enumeration<P>>,
    empty: Vec<bool>,
    global: P,
}

/// `(n, k)`, both 1-based, for the 1-based position `i` of the Cantor
/// pairing `(1,1), (2,1), (1,2), (3,1), (2,2), (1,3), ..`.
pub fn cantor_unpair(i: u64) -> (u64, u64) {
    assert!(i >= 1, "pairing positions start at 1");
    let t = i - 1;
    let mut w = (((8.0 * t as f64 + 1.0).sqrt() - 1.0) / 2.0) as u64;
    while w * (w + 1) / 2 > t {
        w -= 1;
    }
    while (w + 1) * (w + 2) / 2 <= t {
        w += 1;
    }
    let b = t - w * (w + 1) / 2;
    (w - b + 1, b + 1)
}

impl<P: Copy> ConstructiveEnumeration<P> {
    pub fn components(&self) -> usize {
        self.components.len()
    }

    /// The global selector: canonical point of the first nonempty
    /// component, or the fallback when all are empty.
    pub fn global(&self) -> P {
        self.global
    }

    /// `X_{n,k}`, both indices 1-based. Indices past the sampled components
    /// behave like empty components.
    pub fn term(&self, n: usize, k: usize) -> P {
        match self.components.get(n - 1) {
            Some(e) if !self.empty[n - 1] => e.term(k),
            _ => self.global,
        }
    }

    /// Term `i` of the flattened sequence over the Cantor pairing.
    pub fn flat(&self, i: u64) -> P {
        let (n, k) = cantor_unpair(i);
        self.term(n as usize, k as usize)
    }

    pub fn flat_first(&self, count: u64) -> Vec<P> {
        (1..=count).map(|i| self.flat(i)).collect()
    }
}

pub fn enumerate_constructive<F: SeparatingFamily>(
    components: &[FinitePointSet<PointOf<F>>],
    y: PointOf<F>,
    family: &F,
) -> Result<ConstructiveEnumeration<PointOf<F>>> {
    let global = match components.iter().find(|c| !c.is_empty()) {
        Some(c) => canonical_point(c, family)?,
        None => y,
    };
    let enumerations = components
        .iter()
        .map(|c| enumerate_finite(c, global, family))
        .collect::<Result<Vec<_>>>()?;
    Ok(ConstructiveEnumeration {
        components: enumerations,
        empty: components.iter().map(FinitePointSet::is_empty).collect(),
        global,
    })
}
