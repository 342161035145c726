//! State-space backends: the half-open interval ring on the real line,
//! bitmask sets on small discrete spaces, and separating families over both.

mod discrete;
mod family;
mod interval;
mod region;

pub use discrete::{DiscreteSet, MAX_DISCRETE_POINTS};
pub use family::{
    dyadic_family, singleton_family, DyadicFamily, MeasurableSet, SeparatingFamily,
    SingletonFamily, MAX_DYADIC_DEPTH,
};
pub use interval::IntervalSet;
pub use region::{RealSet, Region, Span};

/// The first `count` sets of the dyadic family on `[0, 1)`.
pub fn dyadic_ring_sets(count: usize) -> Vec<IntervalSet> {
    let family = DyadicFamily::new(IntervalSet::interval(0.0, 1.0).expect("unit interval"))
        .expect("nonempty window");
    (1..=count as u128).map(|n| family.set(n)).collect()
}

/// Splits `[lo, hi)` into `cells` equal half-open cells.
pub fn grid(lo: f64, hi: f64, cells: usize) -> Vec<IntervalSet> {
    let width = hi - lo;
    (0..cells)
        .map(|i| {
            let a = lo + width * i as f64 / cells as f64;
            let b = lo + width * (i + 1) as f64 / cells as f64;
            IntervalSet::interval(a, b).expect("finite grid endpoints")
        })
        .collect()
}
