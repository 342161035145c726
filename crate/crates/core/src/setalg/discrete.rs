use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported discrete universe; keeps `2^S` within 65536 configurations.
pub const MAX_DISCRETE_POINTS: usize = 16;

/// A subset of the finite space `{0, .., m-1}` stored as a bitmask.
///
/// Serializes as `{"m": int, "mask": int}`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawDiscrete")]
pub struct DiscreteSet {
    m: u8,
    mask: u16,
}

#[derive(Deserialize)]
struct RawDiscrete {
    m: usize,
    mask: u64,
}

impl TryFrom<RawDiscrete> for DiscreteSet {
    type Error = Error;

    fn try_from(raw: RawDiscrete) -> Result<Self> {
        let mask = u16::try_from(raw.mask)
            .map_err(|_| Error::field("mask", format!("mask {} exceeds 16 bits", raw.mask)))?;
        DiscreteSet::from_mask(raw.m, mask)
    }
}

impl DiscreteSet {
    pub fn from_mask(m: usize, mask: u16) -> Result<Self> {
        check_universe(m)?;
        if u32::from(mask) >= 1u32 << m {
            return Err(Error::field(
                "mask",
                format!("mask {mask} uses bits beyond universe size {m}"),
            ));
        }
        Ok(DiscreteSet { m: m as u8, mask })
    }

    pub fn empty(m: usize) -> Result<Self> {
        Self::from_mask(m, 0)
    }

    pub fn full(m: usize) -> Result<Self> {
        check_universe(m)?;
        Ok(DiscreteSet {
            m: m as u8,
            mask: full_mask(m),
        })
    }

    pub fn from_points(m: usize, points: impl IntoIterator<Item = usize>) -> Result<Self> {
        check_universe(m)?;
        let mut mask = 0u16;
        for p in points {
            if p >= m {
                return Err(Error::PointOutsideUniverse { point: p, m });
            }
            mask |= 1 << p;
        }
        Ok(DiscreteSet { m: m as u8, mask })
    }

    pub fn singleton(m: usize, point: usize) -> Result<Self> {
        Self::from_points(m, [point])
    }

    pub fn universe_size(&self) -> usize {
        self.m as usize
    }

    pub fn mask(&self) -> u16 {
        self.mask
    }

    pub fn is_empty(&self) -> bool {
        self.mask == 0
    }

    pub fn len(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn contains(&self, point: usize) -> bool {
        point < self.m as usize && self.mask & (1 << point) != 0
    }

    pub fn union(&self, other: &DiscreteSet) -> DiscreteSet {
        debug_assert_eq!(self.m, other.m);
        DiscreteSet {
            m: self.m,
            mask: self.mask | other.mask,
        }
    }

    pub fn intersect(&self, other: &DiscreteSet) -> DiscreteSet {
        debug_assert_eq!(self.m, other.m);
        DiscreteSet {
            m: self.m,
            mask: self.mask & other.mask,
        }
    }

    pub fn difference(&self, other: &DiscreteSet) -> DiscreteSet {
        debug_assert_eq!(self.m, other.m);
        DiscreteSet {
            m: self.m,
            mask: self.mask & !other.mask,
        }
    }

    pub fn complement(&self) -> DiscreteSet {
        DiscreteSet {
            m: self.m,
            mask: !self.mask & full_mask(self.m as usize),
        }
    }

    pub fn is_subset(&self, other: &DiscreteSet) -> bool {
        self.mask & !other.mask == 0
    }

    pub fn points(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.m as usize).filter(|&p| self.contains(p))
    }

    /// All `2^m` subsets of the universe, in mask order.
    pub fn all_subsets(m: usize) -> Result<Vec<DiscreteSet>> {
        check_universe(m)?;
        Ok((0..=full_mask(m))
            .map(|mask| DiscreteSet { m: m as u8, mask })
            .collect())
    }
}

pub(crate) fn full_mask(m: usize) -> u16 {
    if m >= 16 {
        u16::MAX
    } else {
        (1u16 << m) - 1
    }
}

fn check_universe(m: usize) -> Result<()> {
    if m == 0 || m > MAX_DISCRETE_POINTS {
        Err(Error::InvalidUniverse(m))
    } else {
        Ok(())
    }
}

impl fmt::Debug for DiscreteSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, p) in self.points().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "}}/{}", self.m)
    }
}
