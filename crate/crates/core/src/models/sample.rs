//! Seeded samplers for finite components and truncated constructive models.

use std::collections::HashSet;

use rand::Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::models::{CrSetModel, FiniteIntensity, ModelPart, SamplerKind, Shift};
use crate::partition::FinitePointSet;
use crate::rng::{substream, StreamRng};
use crate::setalg::Region;

/// Sampled components of one part, before shifting and windowing.
#[derive(Clone, Debug, Serialize)]
pub struct PartRealization {
    pub components: Vec<FinitePointSet<f64>>,
    pub shift: Option<f64>,
}

/// A truncation of a constructive model: components `1..=depth` of every
/// part, reproducible from `(model, seed, replicate, depth)`.
#[derive(Clone, Debug, Serialize)]
pub struct Realization {
    pub seed: u64,
    pub replicate: u64,
    pub depth: u64,
    pub parts: Vec<PartRealization>,
    /// Final points (shifted, windowed), sorted and distinct.
    points: Vec<f64>,
}

impl Realization {
    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn point_set(&self) -> FinitePointSet<f64> {
        FinitePointSet::new(self.points.iter().copied())
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `N_A` of the truncation.
    pub fn count_in(&self, a: &impl Region) -> u64 {
        self.points.iter().filter(|&&x| a.contains_point(x)).count() as u64
    }

    pub fn hits(&self, a: &impl Region) -> bool {
        self.points.iter().any(|&x| a.contains_point(x))
    }

    /// Shift of the first shifted part, if any.
    pub fn shift(&self) -> Option<f64> {
        self.parts.iter().find_map(|p| p.shift)
    }
}

/// Number of points of a Poisson variable with the given mean.
fn poisson_count<R: Rng + ?Sized>(rng: &mut R, mean: f64) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    let law = Poisson::new(mean).expect("finite positive mean");
    law.sample(rng) as u64
}

/// Draws the points of one component, rejecting exact duplicates of points
/// already present in `seen`.
fn sample_component<R: Rng + ?Sized>(
    rng: &mut R,
    intensity: &FiniteIntensity,
    sampler: &SamplerKind,
    seen: &mut HashSet<u64>,
) -> FinitePointSet<f64> {
    let total = intensity.total();
    let count = match sampler {
        SamplerKind::Poisson => poisson_count(rng, total),
        SamplerKind::Binomial { k } if total > 0.0 => *k,
        SamplerKind::Binomial { .. } => 0,
    };
    let mut points = Vec::with_capacity(count as usize);
    for _ in 0..count {
        loop {
            let x = intensity.sample_point(rng);
            // zero is stored once: -0.0 and 0.0 are the same point
            let x = if x == 0.0 { 0.0 } else { x };
            if seen.insert(x.to_bits()) {
                points.push(x);
                break;
            }
        }
    }
    FinitePointSet::new(points)
}

fn sample_part(part: &ModelPart, depth: u64, rng: &mut StreamRng) -> PartRealization {
    let mut seen = HashSet::new();
    let components = (1..=part.sampled_components(depth))
        .map(|k| {
            let c = part.component(k).expect("k within sampled range");
            sample_component(rng, &c.intensity, &c.sampler, &mut seen)
        })
        .collect();
    let shift = part.shift.map(|s| match s {
        Shift::StdNormal => rng.sample::<f64, _>(StandardNormal),
    });
    PartRealization { components, shift }
}

fn finish(
    model: &CrSetModel,
    seed: u64,
    replicate: u64,
    depth: u64,
    parts: Vec<PartRealization>,
) -> Realization {
    let mut points = Vec::new();
    for (part, real) in model.parts.iter().zip(&parts) {
        let z = real.shift.unwrap_or(0.0);
        for c in &real.components {
            for &x in c.points() {
                let y = x + z;
                if part.window.as_ref().is_none_or(|w| w.contains(y)) {
                    points.push(y);
                }
            }
        }
    }
    points.sort_by(f64::total_cmp);
    points.dedup();
    Realization {
        seed,
        replicate,
        depth,
        parts,
        points,
    }
}

/// Replicate `replicate` of the run seeded with `seed`: substream
/// `replicate` of `seed`, components `1..=depth` of every part.
pub fn sample_replicate(model: &CrSetModel, depth: u64, seed: u64, replicate: u64) -> Realization {
    let mut rng = substream(seed, replicate);
    let parts = model
        .parts
        .iter()
        .map(|p| sample_part(p, depth, &mut rng))
        .collect();
    finish(model, seed, replicate, depth, parts)
}

/// Samples components `1..=depth` independently (replicate 0 of `seed`).
pub fn sample_constructive(model: &CrSetModel, depth: u64, seed: u64) -> Result<Realization> {
    if depth == 0 {
        return Err(Error::field("depth", "must be at least 1"));
    }
    model.validate()?;
    Ok(sample_replicate(model, depth, seed, 0))
}

/// Poisson process with finite intensity `mu`: `K ~ Poisson(μ(S))`, then `K`
/// i.i.d. points from `μ / μ(S)`.
pub fn sample_finite_poisson(mu: &FiniteIntensity, seed: u64) -> FinitePointSet<f64> {
    let mut rng = substream(seed, 0);
    sample_component(&mut rng, mu, &SamplerKind::Poisson, &mut HashSet::new())
}

/// The accumulation-point process to depth `depth`, shifted by an
/// independent standard normal variable.
pub fn sample_example2(depth: u64, seed: u64) -> Result<Realization> {
    sample_constructive(&CrSetModel::example2(), depth, seed)
}
