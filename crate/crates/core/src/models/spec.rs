//! JSON model specifications and built-in models.
//!
//! ```json
//! {"components": [{"kind": "lebesgue", "window": [0, 1)}],
//!  "shift": "std-normal" | null,
//!  "tail": "example1" | "example1-annuli" | {"kind": "geometric", ...} | null,
//!  "restrict": [a, b] | null,
//!  "parts": [ ...nested specs... ]}
//! ```
//!
//! Windows are `[a, b]` pairs read as `[a, b)`, or lists of such pairs.
//! Components default to the Poisson sampler; `"sampler": "binomial"` with
//! `"k"` draws exactly `k` points.

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::models::{Component, CrSetModel, FiniteIntensity, ModelPart, SamplerKind, Shift, Tail};
use crate::setalg::IntervalSet;

#[derive(Deserialize)]
#[serde(untagged)]
enum RawSet {
    Pair([f64; 2]),
    Pairs(Vec<[f64; 2]>),
}

impl RawSet {
    fn build(&self, field: &str) -> Result<IntervalSet> {
        let pairs: Vec<(f64, f64)> = match self {
            RawSet::Pair([a, b]) => vec![(*a, *b)],
            RawSet::Pairs(v) => v.iter().map(|[a, b]| (*a, *b)).collect(),
        };
        for &(a, b) in &pairs {
            if !(a.is_finite() && b.is_finite() && a < b) {
                return Err(Error::field(
                    field,
                    format!("need finite a < b, got [{a}, {b}]"),
                ));
            }
        }
        IntervalSet::new(pairs).map_err(|e| Error::field(field, e.to_string()))
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawComponent {
    kind: String,
    window: Option<RawSet>,
    rate: Option<f64>,
    n: Option<u64>,
    sampler: Option<String>,
    k: Option<u64>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawTail {
    Name(String),
    Geometric(RawGeometric),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGeometric {
    kind: String,
    window: RawSet,
    rate: f64,
    ratio: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    name: Option<String>,
    #[serde(default)]
    components: Vec<RawComponent>,
    shift: Option<String>,
    tail: Option<RawTail>,
    restrict: Option<RawSet>,
    parts: Option<Vec<RawModel>>,
}

fn build_component(raw: &RawComponent, path: &str) -> Result<Component> {
    let intensity = match raw.kind.as_str() {
        "lebesgue" | "uniform" => {
            let window = raw
                .window
                .as_ref()
                .ok_or_else(|| Error::field(format!("{path}.window"), "required"))?
                .build(&format!("{path}.window"))?;
            let rate = raw.rate.unwrap_or(1.0);
            FiniteIntensity::uniform(window, rate)
                .map_err(|_| Error::field(format!("{path}.rate"), "must be finite and >= 0"))?
        }
        "slice" => {
            let n = raw
                .n
                .ok_or_else(|| Error::field(format!("{path}.n"), "required"))?;
            FiniteIntensity::slice(n)
                .map_err(|_| Error::field(format!("{path}.n"), "must be >= 1"))?
        }
        other => {
            return Err(Error::field(
                format!("{path}.kind"),
                format!("unknown kind `{other}` (expected lebesgue or slice)"),
            ))
        }
    };
    let sampler = match raw.sampler.as_deref() {
        None | Some("poisson") => SamplerKind::Poisson,
        Some("binomial") => SamplerKind::Binomial {
            k: raw
                .k
                .ok_or_else(|| Error::field(format!("{path}.k"), "required for binomial"))?,
        },
        Some(other) => {
            return Err(Error::field(
                format!("{path}.sampler"),
                format!("unknown sampler `{other}`"),
            ))
        }
    };
    Ok(Component { intensity, sampler })
}

fn build_tail(raw: &RawTail, path: &str) -> Result<Tail> {
    match raw {
        RawTail::Name(name) => match name.as_str() {
            "example1" => Ok(Tail::Example1),
            "example1-annuli" => Ok(Tail::Example1Annuli),
            other => Err(Error::field(path, format!("unknown tail `{other}`"))),
        },
        RawTail::Geometric(g) => {
            if g.kind != "geometric" {
                return Err(Error::field(
                    format!("{path}.kind"),
                    format!("unknown tail kind `{}`", g.kind),
                ));
            }
            if !(g.rate.is_finite() && g.rate >= 0.0) {
                return Err(Error::field(
                    format!("{path}.rate"),
                    "must be finite and >= 0",
                ));
            }
            if !(0.0..1.0).contains(&g.ratio) {
                return Err(Error::field(format!("{path}.ratio"), "must lie in [0, 1)"));
            }
            Ok(Tail::Geometric {
                support: g.window.build(&format!("{path}.window"))?,
                rate: g.rate,
                ratio: g.ratio,
            })
        }
    }
}

fn build_part(raw: &RawModel, path: &str) -> Result<ModelPart> {
    let components = raw
        .components
        .iter()
        .enumerate()
        .map(|(i, c)| build_component(c, &format!("{path}components[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    let shift = match raw.shift.as_deref() {
        None => None,
        Some("std-normal") => Some(Shift::StdNormal),
        Some(other) => {
            return Err(Error::field(
                format!("{path}shift"),
                format!("unknown shift `{other}` (expected std-normal)"),
            ))
        }
    };
    let tail = raw
        .tail
        .as_ref()
        .map(|t| build_tail(t, &format!("{path}tail")))
        .transpose()?;
    let window = raw
        .restrict
        .as_ref()
        .map(|w| w.build(&format!("{path}restrict")))
        .transpose()?;
    Ok(ModelPart {
        components,
        tail,
        shift,
        window,
    })
}

fn build_model(raw: &RawModel) -> Result<CrSetModel> {
    let mut parts = Vec::new();
    let top_has_content = !raw.components.is_empty() || raw.tail.is_some();
    if top_has_content || raw.parts.is_none() {
        parts.push(build_part(raw, "")?);
    } else if raw.shift.is_some() {
        return Err(Error::field("shift", "set the shift on individual parts"));
    }
    for (i, p) in raw.parts.iter().flatten().enumerate() {
        if p.parts.is_some() {
            return Err(Error::field(
                format!("parts[{i}].parts"),
                "parts do not nest",
            ));
        }
        let mut part = build_part(p, &format!("parts[{i}]."))?;
        if let Some(outer) = &raw.restrict {
            let outer = outer.build("restrict")?;
            part.window = Some(match part.window {
                Some(w) => w.intersect(&outer),
                None => outer,
            });
        }
        parts.push(part);
    }
    Ok(CrSetModel {
        name: raw.name.clone(),
        parts,
    })
}

/// Parses and validates a JSON model spec. Errors name the offending field.
pub fn parse_model(json: &str) -> Result<CrSetModel> {
    let raw: RawModel = serde_json::from_str(json)?;
    let model = build_model(&raw)?;
    model.validate()?;
    Ok(model)
}

const BUILTINS: &[(&str, &str)] = &[
    (
        "lebesgue01",
        "Poisson process with Lebesgue intensity on [0, 1)",
    ),
    (
        "lebesgue01-split",
        "the same law as lebesgue01: Lebesgue on [0, 0.5) plus a geometric tail on [0.5, 1)",
    ),
    ("binomial01", "one uniform point on [0, 1)"),
    (
        "example1",
        "accumulation point at 0: slices λ(· ∩ (-1/n, 1/n))",
    ),
    ("example1-annuli", "the same process from disjoint annuli"),
    (
        "example2",
        "example1 shifted by an independent standard normal",
    ),
    ("mixture", "lebesgue01 plus example2 restricted to [2, 3)"),
    ("empty", "no points"),
];

/// Names and descriptions of the built-in models.
pub fn builtin_names() -> Vec<(&'static str, &'static str)> {
    BUILTINS.to_vec()
}

fn unit() -> IntervalSet {
    IntervalSet::interval(0.0, 1.0).expect("unit interval")
}

pub fn builtin_model(name: &str) -> Result<CrSetModel> {
    let model = match name {
        "lebesgue01" => CrSetModel::poisson(unit(), 1.0)?,
        "lebesgue01-split" => CrSetModel::from_part(ModelPart {
            components: vec![Component::poisson(FiniteIntensity::lebesgue(
                IntervalSet::interval(0.0, 0.5)?,
            ))],
            tail: Some(Tail::Geometric {
                support: IntervalSet::interval(0.5, 1.0)?,
                rate: 0.5,
                ratio: 0.5,
            }),
            ..ModelPart::default()
        }),
        "binomial01" => CrSetModel::from_part(ModelPart {
            components: vec![Component {
                intensity: FiniteIntensity::lebesgue(unit()),
                sampler: SamplerKind::Binomial { k: 1 },
            }],
            ..ModelPart::default()
        }),
        "example1" => CrSetModel::example1(),
        "example1-annuli" => CrSetModel::example1_annuli(),
        "example2" => CrSetModel::example2(),
        "mixture" => CrSetModel::poisson(unit(), 1.0)?
            .superpose(CrSetModel::example2().windowed(&IntervalSet::interval(2.0, 3.0)?)),
        "empty" => CrSetModel::default(),
        other => {
            let known: Vec<&str> = BUILTINS.iter().map(|(n, _)| *n).collect();
            return Err(Error::field(
                "model",
                format!("unknown model `{other}` (built-ins: {})", known.join(", ")),
            ));
        }
    };
    Ok(model.named(name))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::setalg::RealSet;

    #[test]
    fn parses_spec_format() {
        let m = parse_model(
            r#"{"components":[{"kind":"lebesgue","window":[0,1)}],"shift":null,"tail":null}"#
                .replace(")", "]")
                .as_str(),
        )
        .unwrap();
        assert_eq!(m, CrSetModel::poisson(unit(), 1.0).unwrap());

        let e2 =
            parse_model(r#"{"components":[],"shift":"std-normal","tail":"example1"}"#).unwrap();
        assert_eq!(e2.parts, CrSetModel::example2().parts);
    }

    #[test]
    fn parses_parts_and_restrict() {
        let m = parse_model(
            r#"{"parts":[
                {"components":[{"kind":"lebesgue","window":[0,1]}]},
                {"tail":"example1","shift":"std-normal","restrict":[2,3]}
            ]}"#,
        )
        .unwrap();
        assert_eq!(m.parts, builtin_model("mixture").unwrap().parts);
    }

    #[test]
    fn errors_name_the_field() {
        let cases = [
            (
                r#"{"components":[{"kind":"lebesgue"}]}"#,
                "components[0].window",
            ),
            (
                r#"{"components":[{"kind":"lebesgue","window":[1,0]}]}"#,
                "components[0].window",
            ),
            (
                r#"{"components":[{"kind":"blob","window":[0,1]}]}"#,
                "components[0].kind",
            ),
            (r#"{"shift":"cauchy"}"#, "shift"),
            (r#"{"tail":"example9"}"#, "tail"),
            (
                r#"{"tail":{"kind":"geometric","window":[0,1],"rate":1,"ratio":1.5}}"#,
                "tail.ratio",
            ),
            (
                r#"{"components":[{"kind":"lebesgue","window":[0,1],"rate":-2}]}"#,
                "components[0].rate",
            ),
        ];
        for (json, field) in cases {
            let err = parse_model(json).unwrap_err().to_string();
            assert!(err.contains(field), "{json}: {err}");
        }
        assert!(parse_model("{not json").is_err());
        let unknown = parse_model(r#"{"componets":[]}"#).unwrap_err().to_string();
        assert!(unknown.contains("componets"), "{unknown}");
    }

    #[test]
    fn builtins_resolve() {
        for (name, _) in builtin_names() {
            let m = builtin_model(name).unwrap();
            assert_eq!(m.name.as_deref(), Some(name));
        }
        assert!(builtin_model("nope")
            .unwrap_err()
            .to_string()
            .contains("model"));
    }

    #[test]
    fn split_model_has_lebesgue_intensity() {
        let split = builtin_model("lebesgue01-split").unwrap();
        for &(a, b) in &[(0.0, 1.0), (0.1, 0.7), (0.5, 0.75), (0.9, 2.0)] {
            let set = RealSet::closed([(a, b)]).unwrap();
            let want = (b.min(1.0) - a.max(0.0)).max(0.0);
            assert!((split.intensity(&set).unwrap() - want).abs() < 1e-15);
        }
    }
}
