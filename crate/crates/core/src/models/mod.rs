//! Intensity measures and constructive countable-random-set models.
//!
//! A [`CrSetModel`] is a superposition of independent [`ModelPart`]s. Each
//! part is a sequence of finite components (explicit ones followed by an
//! optional closed-form [`Tail`]), optionally shifted by an independent
//! standard normal variable and optionally restricted to a window. The
//! accumulation-point process is a part with the slice tail; its randomly
//! shifted version is the same part with a shift.

mod analytic;
mod intensity;
mod sample;
mod spec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::setalg::{IntervalSet, RealSet};

pub use analytic::{
    analytic_hitting, detector_threshold, hits_with_positive_probability, infinite_count_detector,
    part_hitting, prob_infinite_count, prob_infinite_count_example2, tail_bound, TailBound,
};
pub use intensity::{example1_intensity, harmonic_range, slice_series, FiniteIntensity};
pub use sample::{
    sample_constructive, sample_example2, sample_finite_poisson, sample_replicate, PartRealization,
    Realization,
};
pub use spec::{builtin_model, builtin_names, parse_model};

/// How a component turns its intensity into points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SamplerKind {
    /// Poisson count, then i.i.d. locations.
    Poisson,
    /// Exactly `k` i.i.d. locations from the normalized intensity.
    Binomial { k: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Component {
    pub intensity: FiniteIntensity,
    pub sampler: SamplerKind,
}

impl Component {
    pub fn poisson(intensity: FiniteIntensity) -> Self {
        Component {
            intensity,
            sampler: SamplerKind::Poisson,
        }
    }

    /// Probability that the component has no point in `a`.
    pub fn miss_probability(&self, a: &RealSet) -> f64 {
        let m = self.intensity.measure(a);
        match self.sampler {
            SamplerKind::Poisson => (-m).exp(),
            SamplerKind::Binomial { k } => {
                let total = self.intensity.total();
                if total == 0.0 {
                    1.0
                } else {
                    (1.0 - (m / total).min(1.0)).powi(k.min(i32::MAX as u64) as i32)
                }
            }
        }
    }
}

/// Closed-form infinite continuation of a component sequence. Tail
/// components are indexed from 1 and are all Poisson.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Tail {
    /// Component `j` is `λ(· ∩ (-1/j, 1/j))`.
    Example1,
    /// Component `j` is `j · λ` on `{1/(j+1) <= |x| < 1/j}`; same total
    /// intensity as [`Tail::Example1`], split into disjoint annuli.
    Example1Annuli,
    /// Component `j` is `rate · ratio^(j-1) · λ` on `support`.
    Geometric {
        support: IntervalSet,
        rate: f64,
        ratio: f64,
    },
}

impl Tail {
    pub fn component(&self, j: u64) -> FiniteIntensity {
        match self {
            Tail::Example1 => FiniteIntensity::LebesgueSlice { n: j },
            Tail::Example1Annuli => {
                let (outer, inner) = (1.0 / j as f64, 1.0 / (j + 1) as f64);
                let support = IntervalSet::new([(-outer, -inner), (inner, outer)])
                    .expect("annulus endpoints are finite");
                FiniteIntensity::Uniform {
                    support,
                    rate: j as f64,
                }
            }
            Tail::Geometric {
                support,
                rate,
                ratio,
            } => FiniteIntensity::Uniform {
                support: support.clone(),
                rate: rate * ratio.powi((j - 1).min(i32::MAX as u64) as i32),
            },
        }
    }

    /// `Σ_{j >= start} μ_j(a)`, possibly infinite.
    pub fn measure_from(&self, a: &RealSet, start: u64) -> f64 {
        let start = start.max(1);
        match self {
            Tail::Example1 => slice_series(a, start),
            Tail::Example1Annuli => {
                // components j >= start cover |x| < 1/start, where the annulus
                // density j equals the slice count #{n : |x| < 1/n}
                let h = 1.0 / start as f64;
                let core = RealSet::open([(-h, h)]).expect("finite window");
                slice_series(&a.intersect(&core), 1)
            }
            Tail::Geometric {
                support,
                rate,
                ratio,
            } => {
                let base = FiniteIntensity::Uniform {
                    support: support.clone(),
                    rate: *rate,
                }
                .measure(a);
                if base == 0.0 {
                    0.0
                } else {
                    base * ratio.powi((start - 1).min(i32::MAX as u64) as i32) / (1.0 - ratio)
                }
            }
        }
    }

    /// Shifts `z` for which `Σ_j μ_j(a - z) = ∞`, as closed intervals.
    pub fn divergent_shifts(&self, a: &RealSet) -> Vec<(f64, f64)> {
        match self {
            Tail::Example1 | Tail::Example1Annuli => {
                // the series diverges iff a positive-length piece of a - z
                // touches 0, i.e. z lies in the closure of that piece
                let pieces: Vec<(f64, f64)> = a
                    .spans()
                    .iter()
                    .filter(|s| s.length() > 0.0)
                    .map(|s| (s.lo, s.hi))
                    .collect();
                RealSet::closed(pieces).expect("finite endpoints").closure()
            }
            Tail::Geometric { .. } => Vec::new(),
        }
    }

    /// Whether every term beyond `j` vanishes on `a` (used to stop loops).
    fn exhausted_after(&self, a: &RealSet, j: u64) -> bool {
        match self {
            Tail::Example1 | Tail::Example1Annuli => {
                let h = 1.0 / (j + 1) as f64;
                let core = RealSet::open([(-h, h)]).expect("finite window");
                a.intersect(&core).lebesgue() == 0.0
            }
            Tail::Geometric { .. } => false,
        }
    }
}

/// Law of the random shift applied to a whole part.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Shift {
    StdNormal,
}

/// One independent constituent of a model.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ModelPart {
    pub components: Vec<Component>,
    pub tail: Option<Tail>,
    pub shift: Option<Shift>,
    /// Points outside the window are discarded after shifting.
    pub window: Option<IntervalSet>,
}

impl ModelPart {
    /// Component `k` (1-based): explicit components first, then the tail.
    pub fn component(&self, k: u64) -> Option<Component> {
        let explicit = self.components.len() as u64;
        if k <= explicit {
            Some(self.components[(k - 1) as usize].clone())
        } else {
            self.tail
                .as_ref()
                .map(|t| Component::poisson(t.component(k - explicit)))
        }
    }

    /// Number of components sampled at `depth`.
    pub fn sampled_components(&self, depth: u64) -> u64 {
        if self.tail.is_some() {
            depth
        } else {
            depth.min(self.components.len() as u64)
        }
    }

    /// Whether components beyond `depth` exist.
    pub fn truncated_at(&self, depth: u64) -> bool {
        self.tail.is_some() || (self.components.len() as u64) > depth
    }

    /// `a` restricted to the window.
    pub fn visible(&self, a: &RealSet) -> RealSet {
        match &self.window {
            Some(w) => a.intersect(&RealSet::from(w)),
            None => a.clone(),
        }
    }

    /// Total unshifted intensity of `a` (windowed), summed over all
    /// components including the tail.
    pub fn mass(&self, a: &RealSet) -> f64 {
        let b = self.visible(a);
        let explicit: f64 = self
            .components
            .iter()
            .map(|c| match c.sampler {
                SamplerKind::Poisson => c.intensity.measure(&b),
                SamplerKind::Binomial { k } => {
                    let total = c.intensity.total();
                    if total == 0.0 {
                        0.0
                    } else {
                        k as f64 * c.intensity.measure(&b) / total
                    }
                }
            })
            .sum();
        let tail = self.tail.as_ref().map_or(0.0, |t| t.measure_from(&b, 1));
        explicit + tail
    }

    pub fn is_poisson(&self) -> bool {
        self.shift.is_none()
            && self
                .components
                .iter()
                .all(|c| c.sampler == SamplerKind::Poisson)
    }
}

/// A constructive countable random set: independent superposition of parts.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CrSetModel {
    pub name: Option<String>,
    pub parts: Vec<ModelPart>,
}

impl CrSetModel {
    pub fn from_part(part: ModelPart) -> Self {
        CrSetModel {
            name: None,
            parts: vec![part],
        }
    }

    pub fn named(mut self, name: &str) -> Self {
        self.name = Some(name.to_string());
        self
    }

    /// Poisson process with finite intensity `rate · λ` on `support`.
    pub fn poisson(support: IntervalSet, rate: f64) -> Result<Self> {
        Ok(CrSetModel::from_part(ModelPart {
            components: vec![Component::poisson(FiniteIntensity::uniform(support, rate)?)],
            ..ModelPart::default()
        }))
    }

    /// The accumulation-point process at 0, built from slices.
    pub fn example1() -> Self {
        CrSetModel::from_part(ModelPart {
            tail: Some(Tail::Example1),
            ..ModelPart::default()
        })
    }

    /// The same process built from disjoint annuli.
    pub fn example1_annuli() -> Self {
        CrSetModel::from_part(ModelPart {
            tail: Some(Tail::Example1Annuli),
            ..ModelPart::default()
        })
    }

    /// The accumulation-point process shifted by an independent standard
    /// normal variable.
    pub fn example2() -> Self {
        CrSetModel::from_part(ModelPart {
            tail: Some(Tail::Example1),
            shift: Some(Shift::StdNormal),
            ..ModelPart::default()
        })
    }

    /// Superposition of two models.
    pub fn superpose(mut self, other: CrSetModel) -> Self {
        self.parts.extend(other.parts);
        self
    }

    /// Restricts every part to `window`.
    pub fn windowed(mut self, window: &IntervalSet) -> Self {
        for part in &mut self.parts {
            part.window = Some(match &part.window {
                Some(w) => w.intersect(window),
                None => window.clone(),
            });
        }
        self
    }

    /// Whether the model is a Poisson process with evaluable intensity.
    pub fn is_poisson(&self) -> bool {
        self.parts.iter().all(ModelPart::is_poisson)
    }

    /// Intensity `μ(A)` of a Poisson-type model.
    pub fn intensity(&self, a: &RealSet) -> Result<f64> {
        if !self.is_poisson() {
            return Err(Error::Precondition(
                "intensity is only defined here for unshifted Poisson-type models".into(),
            ));
        }
        Ok(self.parts.iter().map(|p| p.mass(a)).sum())
    }

    pub fn has_shift(&self) -> bool {
        self.parts.iter().any(|p| p.shift.is_some())
    }

    pub fn validate(&self) -> Result<()> {
        for (i, part) in self.parts.iter().enumerate() {
            if let Some(Tail::Geometric { rate, ratio, .. }) = &part.tail {
                if !(rate.is_finite() && *rate >= 0.0) {
                    return Err(Error::field(
                        format!("parts[{i}].tail.rate"),
                        "must be >= 0",
                    ));
                }
                if !(0.0..1.0).contains(ratio) {
                    return Err(Error::field(
                        format!("parts[{i}].tail.ratio"),
                        "must lie in [0, 1)",
                    ));
                }
            }
            for (j, c) in part.components.iter().enumerate() {
                if let FiniteIntensity::Uniform { rate, .. } = c.intensity {
                    if !(rate.is_finite() && rate >= 0.0) {
                        return Err(Error::field(
                            format!("parts[{i}].components[{j}].rate"),
                            "must be finite and >= 0",
                        ));
                    }
                }
            }
        }
        Ok(())
    }
}
