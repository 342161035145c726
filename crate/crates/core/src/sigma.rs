//! Exact sigma-fields over the configuration space of a finite state space.
//!
//! For `S = {0, .., m-1}` every configuration is a subset of `S`, so the
//! configuration universe is `2^S`, encoded as masks `0..2^m`. A sigma-field
//! generated by finitely many maps is determined by the partition of the
//! universe into the fibers of those maps (its atoms); a set of
//! configurations belongs to the field iff it is a union of atoms. The
//! counting field of a test family uses the maps `M -> |M ∩ A|`, the
//! hit-or-miss field the indicators `M -> 1{M ∩ A != ∅}`.
//!
//! On a finite space every "countable union" is a finite one; the checks
//! below are the finite-space forms of the generator statements.

use std::collections::{BTreeSet, HashMap};

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rng::{substream, StreamRng};
use crate::setalg::DiscreteSet;

/// Largest state space for which the full configuration universe is built.
pub const MAX_UNIVERSE_POINTS: usize = 12;

/// All `2^m` configurations of `{0, .., m-1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ConfigUniverse {
    m: usize,
}

impl ConfigUniverse {
    pub fn new(m: usize) -> Result<Self> {
        if m == 0 || m > MAX_UNIVERSE_POINTS {
            return Err(Error::InvalidUniverse(m));
        }
        Ok(ConfigUniverse { m })
    }

    pub fn points(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        1 << self.m
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn configurations(&self) -> impl Iterator<Item = u16> {
        0..(1u32 << self.m) as u16
    }

    fn check(&self, set: &DiscreteSet) -> Result<()> {
        if set.universe_size() != self.m {
            return Err(Error::Precondition(format!(
                "set {set:?} lives on a universe of size {}, expected {}",
                set.universe_size(),
                self.m
            )));
        }
        Ok(())
    }
}

/// A sigma-field on the configuration universe, stored by its atoms.
///
/// `atom_id[c]` is the atom of configuration `c`; atoms are numbered in
/// order of first appearance, so two partitions are equal iff their
/// `atom_id` vectors are equal.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FieldPartition {
    atom_id: Vec<u32>,
    atoms: u32,
}

impl FieldPartition {
    /// The trivial field `{∅, 2^S}`.
    pub fn trivial(universe: &ConfigUniverse) -> Self {
        FieldPartition {
            atom_id: vec![0; universe.len()],
            atoms: 1,
        }
    }

    pub fn atom_count(&self) -> usize {
        self.atoms as usize
    }

    pub fn atom_of(&self, config: u16) -> u32 {
        self.atom_id[config as usize]
    }

    /// Atoms as sorted configuration lists.
    pub fn atoms(&self) -> Vec<Vec<u16>> {
        let mut out = vec![Vec::new(); self.atoms as usize];
        for (c, &a) in self.atom_id.iter().enumerate() {
            out[a as usize].push(c as u16);
        }
        out
    }

    /// Splits every atom by the value of `key`.
    fn refine_by(&mut self, key: impl Fn(u16) -> u32) {
        let mut relabel: HashMap<(u32, u32), u32> = HashMap::new();
        for c in 0..self.atom_id.len() {
            let k = (self.atom_id[c], key(c as u16));
            let next = relabel.len() as u32;
            self.atom_id[c] = *relabel.entry(k).or_insert(next);
        }
        self.atoms = relabel.len() as u32;
    }

    /// Whether the configuration set given by `member` is in the field,
    /// i.e. constant on every atom.
    pub fn contains_event(&self, member: impl Fn(u16) -> bool) -> bool {
        let mut seen: Vec<Option<bool>> = vec![None; self.atoms as usize];
        for (c, &a) in self.atom_id.iter().enumerate() {
            let v = member(c as u16);
            match seen[a as usize] {
                None => seen[a as usize] = Some(v),
                Some(prev) if prev != v => return false,
                _ => {}
            }
        }
        true
    }

    /// True when every atom of `self` lies inside an atom of `coarser`,
    /// i.e. the field `coarser` is contained in `self`.
    pub fn refines(&self, coarser: &FieldPartition) -> bool {
        let mut image: Vec<Option<u32>> = vec![None; self.atoms as usize];
        for (c, &a) in self.atom_id.iter().enumerate() {
            let b = coarser.atom_id[c];
            match image[a as usize] {
                None => image[a as usize] = Some(b),
                Some(prev) if prev != b => return false,
                _ => {}
            }
        }
        true
    }
}

/// Counting field: fibers of `M -> (|M ∩ A|)_{A ∈ tests}`.
pub fn counting_field(universe: &ConfigUniverse, tests: &[DiscreteSet]) -> Result<FieldPartition> {
    let mut field = FieldPartition::trivial(universe);
    for a in tests {
        universe.check(a)?;
        let mask = a.mask();
        field.refine_by(|c| (c & mask).count_ones());
    }
    Ok(field)
}

/// Hit-or-miss field: fibers of `M -> (1{M ∩ A != ∅})_{A ∈ tests}`.
pub fn hitormiss_field(universe: &ConfigUniverse, tests: &[DiscreteSet]) -> Result<FieldPartition> {
    let mut field = FieldPartition::trivial(universe);
    for a in tests {
        universe.check(a)?;
        let mask = a.mask();
        field.refine_by(|c| u32::from(c & mask != 0));
    }
    Ok(field)
}

/// Whether the family distinguishes every pair of distinct points.
pub fn separates_points(m: usize, family: &[DiscreteSet]) -> bool {
    (0..m).all(|x| (x + 1..m).all(|y| family.iter().any(|a| a.contains(x) != a.contains(y))))
}

/// Whether `target` is a disjoint union of members of `family`.
pub fn is_disjoint_union_of(target: u16, family: &[u16]) -> bool {
    fn cover(target: u16, family: &[u16], memo: &mut HashMap<u16, bool>) -> bool {
        if target == 0 {
            return true;
        }
        if let Some(&v) = memo.get(&target) {
            return v;
        }
        let low = target & target.wrapping_neg();
        let ok = family
            .iter()
            .filter(|&&f| f & low != 0 && f & !target == 0)
            .any(|&f| cover(target & !f, family, memo));
        memo.insert(target, ok);
        ok
    }
    cover(target, family, &mut HashMap::new())
}

/// Whether `target` equals the union of the family members it contains.
pub fn is_union_of(target: u16, family: &[u16]) -> bool {
    let inner = family
        .iter()
        .filter(|&&f| f & !target == 0)
        .fold(0u16, |acc, &f| acc | f);
    inner == target
}

/// Result of checking the semiring and separation hypotheses.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SemiringCheck {
    pub intersection_closed: bool,
    pub differences_decompose: bool,
    pub separating: bool,
}

impl SemiringCheck {
    pub fn holds(&self) -> bool {
        self.intersection_closed && self.differences_decompose && self.separating
    }
}

/// Checks that `tests` is a semiring (the empty set is always admitted as
/// the empty union) containing a point-separating subfamily.
pub fn check_semiring(m: usize, tests: &[DiscreteSet]) -> SemiringCheck {
    let masks: Vec<u16> = tests.iter().map(DiscreteSet::mask).collect();
    let present: BTreeSet<u16> = masks.iter().copied().collect();
    let nonempty: Vec<u16> = present.iter().copied().filter(|&x| x != 0).collect();
    let mut intersection_closed = true;
    let mut differences_decompose = true;
    for &a in &nonempty {
        for &b in &nonempty {
            let i = a & b;
            if i != 0 && !present.contains(&i) {
                intersection_closed = false;
            }
            if differences_decompose && !is_disjoint_union_of(a & !b, &nonempty) {
                differences_decompose = false;
            }
        }
    }
    SemiringCheck {
        intersection_closed,
        differences_decompose,
        separating: separates_points(m, tests),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SelfDissectingReport {
    pub precondition: SemiringCheck,
    pub fields_equal: bool,
    pub hit_atoms: usize,
    pub count_atoms: usize,
}

impl SelfDissectingReport {
    /// Hypotheses hold but the two fields differ.
    pub fn prediction_violated(&self) -> bool {
        self.precondition.holds() && !self.fields_equal
    }
}

/// Compares the hit-or-miss and counting fields of a test family. For a
/// separating semiring the two coincide.
pub fn check_selfdissecting_equality(
    universe: &ConfigUniverse,
    semiring_tests: &[DiscreteSet],
) -> Result<SelfDissectingReport> {
    let hit = hitormiss_field(universe, semiring_tests)?;
    let count = counting_field(universe, semiring_tests)?;
    Ok(SelfDissectingReport {
        precondition: check_semiring(universe.points(), semiring_tests),
        fields_equal: hit == count,
        hit_atoms: hit.atom_count(),
        count_atoms: count.atom_count(),
    })
}

/// Returns `(membership, is_union)`: whether `{M : M ∩ A != ∅}` lies in the
/// hit-or-miss field of `tests`, and whether `A` is a union of test sets.
/// The two always agree.
pub fn hit_membership_iff_union(
    universe: &ConfigUniverse,
    a: &DiscreteSet,
    tests: &[DiscreteSet],
) -> Result<(bool, bool)> {
    universe.check(a)?;
    let field = hitormiss_field(universe, tests)?;
    let mask = a.mask();
    let membership = field.contains_event(|c| c & mask != 0);
    let masks: Vec<u16> = tests.iter().map(DiscreteSet::mask).collect();
    Ok((membership, is_union_of(mask, &masks)))
}

/// All finite intersections `E*_1 ∩ .. ∩ E*_k` with each `E*_i` a test set
/// or its complement (a test may appear with both signs, so `∅` is
/// included). The empty intersection contributes `S` itself.
pub fn star_semiring_closure(m: usize, tests: &[DiscreteSet]) -> Result<Vec<DiscreteSet>> {
    if m == 0 || m > MAX_UNIVERSE_POINTS {
        return Err(Error::InvalidUniverse(m));
    }
    let full = DiscreteSet::full(m)?;
    let mut family: BTreeSet<u16> = BTreeSet::from([full.mask()]);
    for t in tests {
        if t.universe_size() != m {
            return Err(Error::Precondition(format!(
                "test {t:?} not on universe {m}"
            )));
        }
        let (e, ec) = (t.mask(), t.complement().mask());
        let next: Vec<u16> = family.iter().flat_map(|&x| [x & e, x & ec]).collect();
        family.extend(next);
    }
    if !tests.is_empty() {
        // E ∩ E^c
        family.insert(0);
    }
    family
        .into_iter()
        .map(|mask| DiscreteSet::from_mask(m, mask))
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct StarUnionReport {
    /// `C(T) ⊆ C(E)`.
    pub inclusion_holds: bool,
    pub t_separating: bool,
    /// Every `A ∈ T` is a union of `E*`-sets.
    pub all_unions: bool,
}

impl StarUnionReport {
    pub fn prediction_violated(&self) -> bool {
        self.inclusion_holds && self.t_separating && !self.all_unions
    }
}

/// Union representation check: if the counting field of `t_family` is
/// contained in that of `e_family` and `t_family` separates points, then
/// each of its sets is a union of intersections of `e_family` sets and
/// complements.
pub fn check_star_union_representation(
    universe: &ConfigUniverse,
    t_family: &[DiscreteSet],
    e_family: &[DiscreteSet],
) -> Result<StarUnionReport> {
    let ct = counting_field(universe, t_family)?;
    let ce = counting_field(universe, e_family)?;
    let star: Vec<u16> = star_semiring_closure(universe.points(), e_family)?
        .iter()
        .map(DiscreteSet::mask)
        .collect();
    Ok(StarUnionReport {
        inclusion_holds: ce.refines(&ct),
        t_separating: separates_points(universe.points(), t_family),
        all_unions: t_family.iter().all(|a| is_union_of(a.mask(), &star)),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct GeneratorReport {
    pub intersection_stable: bool,
    pub covers: bool,
    /// `σ(gens) = P(S)`, i.e. the generators separate points.
    pub generates: bool,
    /// Counting field of `gens` equals the counting field of `P(S)`.
    pub counting_equal: bool,
}

impl GeneratorReport {
    pub fn prediction_violated(&self) -> bool {
        self.intersection_stable && self.covers && self.generates && !self.counting_equal
    }
}

/// Whether the counts on an intersection-stable generator determine the
/// configuration. Intersections equal to `∅` are admitted.
pub fn check_intersection_stable_generator(
    universe: &ConfigUniverse,
    gens: &[DiscreteSet],
) -> Result<GeneratorReport> {
    let m = universe.points();
    let present: BTreeSet<u16> = gens.iter().map(DiscreteSet::mask).collect();
    let intersection_stable = present.iter().all(|&a| {
        present
            .iter()
            .all(|&b| a & b == 0 || present.contains(&(a & b)))
    });
    let covered = present.iter().fold(0u16, |acc, &a| acc | a);
    let full = DiscreteSet::full(m)?.mask();
    let all = DiscreteSet::all_subsets(m)?;
    Ok(GeneratorReport {
        intersection_stable,
        covers: covered == full,
        generates: separates_points(m, gens),
        counting_equal: counting_field(universe, gens)? == counting_field(universe, &all)?,
    })
}

// ---------------------------------------------------------------------------
// randomized and exhaustive sweeps

/// One failing or illustrative instance in a sweep report.
#[derive(Clone, Debug, Serialize)]
pub struct AtomsExample {
    pub check: String,
    pub m: usize,
    pub tests: Vec<Vec<usize>>,
    pub hit_atoms: Vec<Vec<u16>>,
    pub count_atoms: Vec<Vec<u16>>,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct SweepCounts {
    pub instances: u64,
    pub failures: u64,
    /// Instances whose hypotheses did not hold (no prediction made).
    pub skipped: u64,
}

impl SweepCounts {
    fn record(&mut self, applicable: bool, failed: bool) {
        self.instances += 1;
        if !applicable {
            self.skipped += 1;
        } else if failed {
            self.failures += 1;
        }
    }

    fn merge(&mut self, other: &SweepCounts) {
        self.instances += other.instances;
        self.failures += other.failures;
        self.skipped += other.skipped;
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct SigmaCheckReport {
    pub instances: u64,
    pub failures: u64,
    pub self_dissecting: SweepCounts,
    pub hit_union: SweepCounts,
    pub star_union: SweepCounts,
    pub generator: SweepCounts,
    pub atoms_examples: Vec<AtomsExample>,
}

impl SigmaCheckReport {
    fn finish(&mut self) {
        let mut total = SweepCounts::default();
        for c in [
            &self.self_dissecting,
            &self.hit_union,
            &self.star_union,
            &self.generator,
        ] {
            total.merge(c);
        }
        self.instances = total.instances;
        self.failures = total.failures;
    }

    pub fn merge(&mut self, other: SigmaCheckReport) {
        self.self_dissecting.merge(&other.self_dissecting);
        self.hit_union.merge(&other.hit_union);
        self.star_union.merge(&other.star_union);
        self.generator.merge(&other.generator);
        self.atoms_examples.extend(other.atoms_examples);
        self.finish();
    }
}

fn example(check: &str, universe: &ConfigUniverse, tests: &[DiscreteSet]) -> Result<AtomsExample> {
    Ok(AtomsExample {
        check: check.to_string(),
        m: universe.points(),
        tests: tests.iter().map(|t| t.points().collect()).collect(),
        hit_atoms: hitormiss_field(universe, tests)?.atoms(),
        count_atoms: counting_field(universe, tests)?.atoms(),
    })
}

fn random_subset(rng: &mut StreamRng, m: usize) -> u16 {
    rng.random_range(0..(1u32 << m)) as u16
}

/// Cells of a random nested sequence of partitions ending in singletons,
/// plus `∅`: a separating semiring.
fn random_tree_semiring(rng: &mut StreamRng, m: usize) -> Vec<u16> {
    fn split(cell: Vec<usize>, rng: &mut StreamRng, out: &mut Vec<u16>) {
        out.push(cell.iter().fold(0u16, |acc, &p| acc | 1 << p));
        if cell.len() == 1 {
            return;
        }
        let parts = rng.random_range(2..=cell.len().min(3));
        let mut cuts: Vec<usize> = (1..cell.len()).collect();
        cuts.shuffle(rng);
        let mut cuts: Vec<usize> = cuts.into_iter().take(parts - 1).collect();
        cuts.sort_unstable();
        let mut start = 0;
        for c in cuts.into_iter().chain(std::iter::once(cell.len())) {
            split(cell[start..c].to_vec(), rng, out);
            start = c;
        }
    }
    let mut points: Vec<usize> = (0..m).collect();
    points.shuffle(rng);
    let mut out = vec![0];
    split(points, rng, &mut out);
    out
}

/// Sets `{σ(i), .., σ(j)}` for a random order `σ`, plus `∅`.
fn random_interval_semiring(rng: &mut StreamRng, m: usize) -> Vec<u16> {
    let mut order: Vec<usize> = (0..m).collect();
    order.shuffle(rng);
    let mut out = vec![0];
    for i in 0..m {
        for j in i..m {
            out.push(order[i..=j].iter().fold(0u16, |acc, &p| acc | 1 << p));
        }
    }
    out
}

/// Star closure of a random separating family.
fn random_star_semiring(rng: &mut StreamRng, m: usize) -> Vec<u16> {
    let mut family: Vec<u16> = Vec::new();
    let sets = |f: &[u16]| -> Vec<DiscreteSet> {
        f.iter()
            .map(|&x| DiscreteSet::from_mask(m, x).expect("mask within universe"))
            .collect()
    };
    while !separates_points(m, &sets(&family)) {
        family.push(random_subset(rng, m));
    }
    let mut closure: Vec<u16> = star_semiring_closure(m, &sets(&family))
        .expect("valid universe")
        .iter()
        .map(DiscreteSet::mask)
        .collect();
    closure.push(0);
    closure.sort_unstable();
    closure.dedup();
    closure
}

fn to_sets(m: usize, masks: &[u16]) -> Vec<DiscreteSet> {
    masks
        .iter()
        .map(|&x| DiscreteSet::from_mask(m, x).expect("mask within universe"))
        .collect()
}

/// Randomized checks of all four generator statements on universes of
/// size `m`. Trial `i` draws from substream `i` of `seed`.
pub fn randomized_checks(m: usize, trials: u64, seed: u64) -> Result<SigmaCheckReport> {
    let universe = ConfigUniverse::new(m)?;
    let mut report = SigmaCheckReport::default();
    for trial in 0..trials {
        let mut rng = substream(seed, trial);

        let semiring = match trial % 3 {
            0 => random_tree_semiring(&mut rng, m),
            1 => random_interval_semiring(&mut rng, m),
            _ => random_star_semiring(&mut rng, m),
        };
        let semiring = to_sets(m, &semiring);
        let sd = check_selfdissecting_equality(&universe, &semiring)?;
        report
            .self_dissecting
            .record(sd.precondition.holds(), sd.prediction_violated());
        if sd.prediction_violated() || (trial == 0 && report.atoms_examples.is_empty()) {
            report
                .atoms_examples
                .push(example("self_dissecting", &universe, &semiring)?);
        }

        let k = rng.random_range(1..=2 * m);
        let tests: Vec<u16> = (0..k).map(|_| random_subset(&mut rng, m)).collect();
        let tests = to_sets(m, &tests);
        // bias toward unions of tests half of the time
        let a_mask = if rng.random_bool(0.5) {
            tests
                .iter()
                .filter(|_| rng.random_bool(0.5))
                .fold(0u16, |acc, t| acc | t.mask())
        } else {
            random_subset(&mut rng, m)
        };
        let a = DiscreteSet::from_mask(m, a_mask)?;
        let (membership, is_union) = hit_membership_iff_union(&universe, &a, &tests)?;
        report.hit_union.record(true, membership != is_union);
        if membership != is_union {
            report
                .atoms_examples
                .push(example("hit_union", &universe, &tests)?);
        }

        // T: singletons plus a few random sets; E: random sets, enriched
        // with singletons half of the time so the inclusion often holds
        let mut t_family: Vec<u16> = (0..m).map(|p| 1u16 << p).collect();
        t_family.extend((0..rng.random_range(0..=m)).map(|_| random_subset(&mut rng, m)));
        let mut e_family: Vec<u16> = (0..rng.random_range(1..=2 * m))
            .map(|_| random_subset(&mut rng, m))
            .collect();
        if rng.random_bool(0.5) {
            e_family.extend((0..m).filter(|_| rng.random_bool(0.7)).map(|p| 1u16 << p));
        }
        let star = check_star_union_representation(
            &universe,
            &to_sets(m, &t_family),
            &to_sets(m, &e_family),
        )?;
        report.star_union.record(
            star.inclusion_holds && star.t_separating,
            star.prediction_violated(),
        );

        let mut gens: Vec<u16> = random_tree_semiring(&mut rng, m);
        gens.retain(|&g| g != 0 && rng.random_bool(0.8));
        gens.push(DiscreteSet::full(m)?.mask());
        let gen = check_intersection_stable_generator(&universe, &to_sets(m, &gens))?;
        report.generator.record(
            gen.intersection_stable && gen.covers && gen.generates,
            gen.prediction_violated(),
        );
    }
    report.finish();
    Ok(report)
}

/// Exhaustive sweep over every test family on a universe of size `m`
/// (`m <= 4`, i.e. at most 65536 families): the hit-or-miss/counting
/// equality for every separating semiring, and the membership/union
/// equivalence for every pair `(A, family)`.
pub fn exhaustive_checks(m: usize) -> Result<SigmaCheckReport> {
    if m == 0 || m > 4 {
        return Err(Error::Precondition(format!(
            "exhaustive sweep supports 1 <= m <= 4, got {m}"
        )));
    }
    let universe = ConfigUniverse::new(m)?;
    let subsets = DiscreteSet::all_subsets(m)?;
    let configs = universe.len();
    let mut report = SigmaCheckReport::default();
    for family_bits in 0u64..(1u64 << subsets.len()) {
        let family: Vec<DiscreteSet> = subsets
            .iter()
            .enumerate()
            .filter(|(i, _)| family_bits >> i & 1 == 1)
            .map(|(_, s)| *s)
            .collect();
        let masks: Vec<u16> = family.iter().map(DiscreteSet::mask).collect();

        let hit = hitormiss_field(&universe, &family)?;
        for a in 0..configs as u16 {
            let membership = hit.contains_event(|c| c & a != 0);
            let is_union = is_union_of(a, &masks);
            report.hit_union.record(true, membership != is_union);
        }

        let pre = check_semiring(m, &family);
        if pre.holds() {
            let equal = hit == counting_field(&universe, &family)?;
            report.self_dissecting.record(true, !equal);
            if !equal {
                report
                    .atoms_examples
                    .push(example("self_dissecting", &universe, &family)?);
            }
        }
    }
    report.finish();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sets(m: usize, members: &[&[usize]]) -> Vec<DiscreteSet> {
        members
            .iter()
            .map(|pts| DiscreteSet::from_points(m, pts.iter().copied()).unwrap())
            .collect()
    }

    #[test]
    fn counting_field_single_point_test() {
        // S = {0,1}, tests = {{0}}: atoms {∅,{1}} and {{0},{0,1}}
        let u = ConfigUniverse::new(2).unwrap();
        let f = counting_field(&u, &sets(2, &[&[0]])).unwrap();
        assert_eq!(f.atoms(), vec![vec![0b00, 0b10], vec![0b01, 0b11]]);
    }

    #[test]
    fn singleton_counts_give_full_field() {
        let u = ConfigUniverse::new(3).unwrap();
        let f = counting_field(&u, &sets(3, &[&[0], &[1], &[2]])).unwrap();
        assert_eq!(f.atom_count(), 8);
        let h = hitormiss_field(&u, &sets(3, &[&[0], &[1], &[2]])).unwrap();
        assert_eq!(h, f);
    }

    #[test]
    fn empty_tests_give_trivial_field() {
        let u = ConfigUniverse::new(3).unwrap();
        let e = sets(3, &[&[]]);
        assert_eq!(counting_field(&u, &e).unwrap().atom_count(), 1);
        assert_eq!(hitormiss_field(&u, &e).unwrap().atom_count(), 1);
    }

    #[test]
    fn hitormiss_field_whole_space_test() {
        // S = {0,1}, tests = {{0,1}}: atoms {∅} and {{0},{1},{0,1}}
        let u = ConfigUniverse::new(2).unwrap();
        let h = hitormiss_field(&u, &sets(2, &[&[0, 1]])).unwrap();
        assert_eq!(h.atoms(), vec![vec![0b00], vec![0b01, 0b10, 0b11]]);
    }

    #[test]
    fn self_dissecting_singletons() {
        let u = ConfigUniverse::new(3).unwrap();
        let r = check_selfdissecting_equality(&u, &sets(3, &[&[], &[0], &[1], &[2]])).unwrap();
        assert!(r.precondition.holds());
        assert!(r.fields_equal);
        assert_eq!(r.count_atoms, 8);
    }

    #[test]
    fn non_separating_family_flags_precondition() {
        // the two fields differ here: counts split {0},{1} from {0,1}
        let u = ConfigUniverse::new(2).unwrap();
        let r = check_selfdissecting_equality(&u, &sets(2, &[&[0, 1]])).unwrap();
        assert!(!r.precondition.separating);
        assert!(!r.fields_equal);
        assert_eq!((r.hit_atoms, r.count_atoms), (2, 3));
        assert!(!r.prediction_violated());
    }

    #[test]
    fn membership_union_examples() {
        let u = ConfigUniverse::new(2).unwrap();
        let tests = sets(2, &[&[0, 1]]);
        let a0 = DiscreteSet::from_points(2, [0]).unwrap();
        assert_eq!(
            hit_membership_iff_union(&u, &a0, &tests).unwrap(),
            (false, false)
        );
        let a01 = DiscreteSet::from_points(2, [0, 1]).unwrap();
        assert_eq!(
            hit_membership_iff_union(&u, &a01, &tests).unwrap(),
            (true, true)
        );
    }

    #[test]
    fn star_closure_examples() {
        let star = star_semiring_closure(2, &sets(2, &[&[0]])).unwrap();
        let masks: BTreeSet<u16> = star.iter().map(DiscreteSet::mask).collect();
        for want in [0b01, 0b10, 0b00, 0b11] {
            assert!(masks.contains(&want));
        }
        let star = star_semiring_closure(3, &sets(3, &[&[]])).unwrap();
        let masks: Vec<u16> = star.iter().map(DiscreteSet::mask).collect();
        assert_eq!(masks, vec![0, 0b111]);
    }

    #[test]
    fn star_closure_is_semiring() {
        let star = star_semiring_closure(4, &sets(4, &[&[0, 1], &[1, 2]])).unwrap();
        let check = check_semiring(4, &star);
        assert!(check.intersection_closed && check.differences_decompose);
    }

    #[test]
    fn generator_examples() {
        let u3 = ConfigUniverse::new(3).unwrap();
        let g = check_intersection_stable_generator(&u3, &sets(3, &[&[0], &[1], &[2], &[0, 1, 2]]))
            .unwrap();
        assert!(g.intersection_stable && g.covers && g.generates && g.counting_equal);

        let u2 = ConfigUniverse::new(2).unwrap();
        let g = check_intersection_stable_generator(&u2, &sets(2, &[&[0, 1]])).unwrap();
        assert!(!g.generates && !g.counting_equal && !g.prediction_violated());

        let all = DiscreteSet::all_subsets(3).unwrap();
        assert!(
            check_intersection_stable_generator(&u3, &all)
                .unwrap()
                .counting_equal
        );
    }

    #[test]
    fn hit_field_never_finer_than_counting_field() {
        let u = ConfigUniverse::new(4).unwrap();
        let mut rng = substream(11, 0);
        for _ in 0..200 {
            let k = rng.random_range(1..6);
            let tests: Vec<u16> = (0..k).map(|_| random_subset(&mut rng, 4)).collect();
            let tests = to_sets(4, &tests);
            let h = hitormiss_field(&u, &tests).unwrap();
            let c = counting_field(&u, &tests).unwrap();
            assert!(c.refines(&h));
            // adding a test never coarsens
            let mut more = tests.clone();
            more.push(DiscreteSet::from_mask(4, random_subset(&mut rng, 4)).unwrap());
            assert!(counting_field(&u, &more).unwrap().refines(&c));
        }
    }

    #[test]
    fn random_semirings_satisfy_hypotheses() {
        let mut rng = substream(3, 0);
        for m in 1..=6 {
            for _ in 0..20 {
                for family in [
                    random_tree_semiring(&mut rng, m),
                    random_interval_semiring(&mut rng, m),
                    random_star_semiring(&mut rng, m),
                ] {
                    assert!(
                        check_semiring(m, &to_sets(m, &family)).holds(),
                        "{family:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn disjoint_union_search() {
        assert!(is_disjoint_union_of(0b111, &[0b001, 0b110]));
        assert!(!is_disjoint_union_of(0b111, &[0b011, 0b110]));
        assert!(is_disjoint_union_of(0, &[]));
    }

    #[test]
    fn universe_cap() {
        assert!(ConfigUniverse::new(13).is_err());
        assert!(ConfigUniverse::new(0).is_err());
    }
}
