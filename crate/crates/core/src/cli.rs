//! Command-line front end: seeded experiments with JSON (or CSV) reports.
//!
//! Exit codes: 0 when every check in the report passes, 1 when a check
//! fails, 2 on configuration errors (the diagnostic names the field).

use std::ffi::OsString;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::hitting::{estimate_hitting_all, renyi_verify, HittingEstimate};
use crate::laws::{
    additivity_check, closed_set_compare, compare_decompositions, decompose, dyadic_sibling_pairs,
    fidi_compare, hitting_compare_on_ring, increments_check, sample_counts, Classifier, FidiSpec,
};
use crate::models::{builtin_model, parse_model, sample_constructive, CrSetModel};
use crate::partition::{enumerate_finite, FinitePointSet};
use crate::rng::derive_seed;
use crate::setalg::{
    dyadic_family, dyadic_ring_sets, grid, singleton_family, IntervalSet, RealSet,
};
use crate::sigma::{exhaustive_checks, randomized_checks};
use crate::stats::DEFAULT_ALPHA;

pub const TOOL: &str = "crset";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser, Debug)]
#[command(
    name = "crset",
    version,
    about = "Countable random sets: sampling, hitting functions and law checks"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct GlobalArgs {
    /// Built-in model name, path to a JSON spec, or inline JSON.
    #[arg(long, global = true, default_value = "lebesgue01")]
    pub model: String,
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Number of replicates.
    #[arg(long = "n", global = true, default_value_t = 10_000)]
    pub n: u64,
    /// Truncation depth (number of components sampled).
    #[arg(long, global = true, default_value_t = 64)]
    pub depth: u64,
    #[arg(long, global = true, default_value_t = DEFAULT_ALPHA)]
    pub alpha: f64,
    #[arg(long, global = true, value_enum, default_value_t = OutFormat::Json)]
    pub out: OutFormat,
    /// Omit wall-clock time so identical configs give identical bytes.
    #[arg(long, global = true)]
    pub canonical: bool,
    /// Worker threads; 0 uses all cores.
    #[arg(long, global = true, default_value_t = 0)]
    #[serde(skip)]
    pub threads: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutFormat {
    Json,
    Csv,
}

#[derive(Subcommand, Debug, Clone, Serialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Command {
    /// Brute-force the field-generation identities on finite configuration spaces.
    SigmaCheck {
        #[arg(long, default_value_t = 4)]
        m: usize,
        #[arg(long, default_value_t = 100)]
        trials: u64,
        /// Also sweep every family for m <= 4.
        #[arg(long)]
        exhaustive: bool,
    },
    /// Canonical enumeration of a finite point set.
    Enumerate {
        /// Comma-separated points.
        #[arg(long)]
        points: String,
        /// `dyadic:a,b` (reals in [a,b)) or `singleton:m` (integers 0..m).
        #[arg(long, default_value = "dyadic:0,1")]
        family: String,
        /// Number of terms to print.
        #[arg(long, default_value_t = 10)]
        terms: usize,
    },
    /// One realization of the model.
    Sample,
    /// Hitting-probability estimates.
    Hitting {
        /// `dyadic:K`, `grid:lo,hi,cells`, or JSON `[[[a,b],..],..]`.
        #[arg(long)]
        sets: String,
    },
    /// Checks T(A) = 1 - exp(-mu(A)) on Poisson-type models.
    Renyi {
        #[arg(long, default_value = "dyadic:20")]
        sets: String,
    },
    /// Law comparisons and decompositions.
    Laws {
        #[command(subcommand)]
        check: LawsCommand,
    },
}

#[derive(Subcommand, Debug, Clone, Serialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum LawsCommand {
    /// Joint count distributions of two models.
    Fidi {
        #[arg(long)]
        other: String,
        #[arg(long, default_value = "grid:0,1,2")]
        sets: String,
        #[arg(long, default_value_t = 6)]
        cap: u64,
    },
    /// Hitting frequencies of two models on ring sets.
    Ring {
        #[arg(long)]
        other: String,
        #[arg(long, default_value = "dyadic:14")]
        sets: String,
    },
    /// Closed-set, null-transfer, G-delta chain and fidi agreement.
    Closed {
        #[arg(long)]
        other: String,
        /// JSON list of closed sets, each a list of `[a,b]`.
        #[arg(long)]
        closed: String,
        /// JSON list of closed probe sets for the null-transfer check.
        #[arg(long, default_value = "[]")]
        probes: String,
        /// JSON list of chains, each a list of open sets.
        #[arg(long, default_value = "[]")]
        chains: String,
        #[arg(long, default_value = "grid:0,1,2")]
        fidi: String,
        #[arg(long, default_value_t = 6)]
        cap: u64,
    },
    /// Additivity of -log(1 - T) on sibling dyadic pairs.
    Recover {
        #[arg(long, default_value_t = 20)]
        pairs: usize,
    },
    /// Independent increments and Poisson fit on disjoint sets.
    Incr {
        #[arg(long, default_value = "grid:0,1,2")]
        sets: String,
    },
    /// Sigma-finite decomposition over a grid of cells.
    Decompose {
        #[arg(long, default_value = "grid:0,3,60")]
        cells: String,
        /// Rerun on a second grid and compare.
        #[arg(long)]
        refine: Option<String>,
        #[arg(long, value_enum, default_value_t = ClassifierKind::Analytic)]
        classifier: ClassifierKind,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassifierKind {
    Analytic,
    Detector,
}

/// Exit status and captured output of one invocation.
#[derive(Debug)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn config_error(msg: String) -> Self {
        Outcome {
            code: 2,
            stdout: String::new(),
            stderr: msg,
        }
    }
}

/// Resolves `--model`: a built-in name, a path to a JSON file, or inline
/// JSON.
pub fn load_model(spec: &str) -> Result<CrSetModel> {
    let named = |e: Error| match e {
        Error::Json(e) => Error::field("model", e.to_string()),
        other => other,
    };
    let trimmed = spec.trim_start();
    if trimmed.starts_with('{') {
        return parse_model(spec).map_err(named);
    }
    if let Ok(model) = builtin_model(spec) {
        return Ok(model);
    }
    let path = std::path::Path::new(spec);
    if path.exists() {
        return parse_model(&std::fs::read_to_string(path)?).map_err(named);
    }
    builtin_model(spec)
}

fn parse_numbers(field: &str, s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse::<f64>()
                .map_err(|_| Error::field(field, format!("`{x}` is not a number")))
        })
        .collect()
}

/// `dyadic:K`, `grid:lo,hi,cells`, or a JSON list of half-open sets.
pub fn parse_sets(field: &str, spec: &str) -> Result<Vec<IntervalSet>> {
    if let Some(k) = spec.strip_prefix("dyadic:") {
        let k: usize = k
            .trim()
            .parse()
            .map_err(|_| Error::field(field, format!("`{k}` is not a count")))?;
        return Ok(dyadic_ring_sets(k));
    }
    if let Some(g) = spec.strip_prefix("grid:") {
        let v = parse_numbers(field, g)?;
        let [lo, hi, cells] = v[..] else {
            return Err(Error::field(field, "grid needs lo,hi,cells"));
        };
        if lo.is_nan() || hi.is_nan() || lo >= hi || cells < 1.0 || cells.fract() != 0.0 {
            return Err(Error::field(
                field,
                "grid needs lo < hi and a positive integer cell count",
            ));
        }
        return Ok(grid(lo, hi, cells as usize));
    }
    let raw: Vec<Vec<[f64; 2]>> = serde_json::from_str(spec).map_err(|e| {
        Error::field(
            field,
            format!("expected dyadic:K, grid:lo,hi,cells or JSON sets: {e}"),
        )
    })?;
    raw.into_iter()
        .enumerate()
        .map(|(i, s)| {
            IntervalSet::try_from(s)
                .map_err(|e| Error::field(format!("{field}[{i}]"), e.to_string()))
        })
        .collect()
}

fn parse_real_sets(field: &str, spec: &str, closed: bool) -> Result<Vec<RealSet>> {
    let raw: Vec<Vec<(f64, f64)>> = serde_json::from_str(spec)
        .map_err(|e| Error::field(field, format!("expected JSON sets: {e}")))?;
    raw.into_iter()
        .enumerate()
        .map(|(i, s)| {
            let r = if closed {
                RealSet::closed(s)
            } else {
                RealSet::open(s)
            };
            r.map_err(|e| Error::field(format!("{field}[{i}]"), e.to_string()))
        })
        .collect()
}

fn parse_chains(field: &str, spec: &str) -> Result<Vec<Vec<RealSet>>> {
    let raw: Vec<Vec<Vec<(f64, f64)>>> = serde_json::from_str(spec)
        .map_err(|e| Error::field(field, format!("expected JSON chains: {e}")))?;
    raw.into_iter()
        .enumerate()
        .map(|(i, chain)| {
            chain
                .into_iter()
                .map(|s| {
                    RealSet::open(s)
                        .map_err(|e| Error::field(format!("{field}[{i}]"), e.to_string()))
                })
                .collect()
        })
        .collect()
}

/// A report body and whether all of its checks passed.
struct Body {
    pass: bool,
    result: Value,
    csv: Option<String>,
}

fn to_value(v: impl Serialize) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

fn hitting_csv(rows: &[(&HittingEstimate, bool)]) -> String {
    let mut out = String::from("set,p_hat,ci,analytic,tail_bound,verdict\n");
    for (e, pass) in rows {
        let analytic = e.analytic.map(|a| a.to_string()).unwrap_or_default();
        out.push_str(&format!(
            "\"{}\",{},{},{},{},{}\n",
            e.set.replace('"', "\"\""),
            e.p_hat,
            e.ci_halfwidth,
            analytic,
            e.tail_bound.label(),
            if *pass { "pass" } else { "fail" }
        ));
    }
    out
}

fn run_command(g: &GlobalArgs, command: &Command) -> Result<Body> {
    match command {
        Command::SigmaCheck {
            m,
            trials,
            exhaustive,
        } => {
            let mut report = randomized_checks(*m, *trials, g.seed)?;
            if *exhaustive {
                for k in 1..=(*m).min(4) {
                    report.merge(exhaustive_checks(k)?);
                }
            }
            Ok(Body {
                pass: report.failures == 0,
                result: to_value(&report),
                csv: None,
            })
        }
        Command::Enumerate {
            points,
            family,
            terms,
        } => {
            let (kind, arg) = family
                .split_once(':')
                .ok_or_else(|| Error::field("family", "expected dyadic:a,b or singleton:m"))?;
            let result = match kind {
                "dyadic" => {
                    let v = parse_numbers("family", arg)?;
                    let [a, b] = v[..] else {
                        return Err(Error::field("family", "dyadic needs a,b"));
                    };
                    let fam = dyadic_family(IntervalSet::interval(a, b)?)?;
                    let pts = FinitePointSet::new(parse_numbers("points", points)?);
                    let e = enumerate_finite(&pts, a, &fam)?;
                    json!({"distinct": e.distinct_prefix(), "terms": e.first(*terms)})
                }
                "singleton" => {
                    let m: usize = arg
                        .trim()
                        .parse()
                        .map_err(|_| Error::field("family", "singleton needs a universe size"))?;
                    let fam = singleton_family(m)?;
                    let pts: Vec<usize> = parse_numbers("points", points)?
                        .into_iter()
                        .map(|x| {
                            if x.fract() == 0.0 && x >= 0.0 && (x as usize) < m {
                                Ok(x as usize)
                            } else {
                                Err(Error::field(
                                    "points",
                                    format!("{x} is not a point of 0..{m}"),
                                ))
                            }
                        })
                        .collect::<Result<_>>()?;
                    let e = enumerate_finite(&FinitePointSet::new(pts), 0, &fam)?;
                    json!({"distinct": e.distinct_prefix(), "terms": e.first(*terms)})
                }
                other => return Err(Error::field("family", format!("unknown family `{other}`"))),
            };
            Ok(Body {
                pass: true,
                result,
                csv: None,
            })
        }
        Command::Sample => {
            let model = load_model(&g.model)?;
            let r = sample_constructive(&model, g.depth, g.seed)?;
            Ok(Body {
                pass: true,
                result: json!({"points": r.points(), "shift": r.shift(), "count": r.len()}),
                csv: None,
            })
        }
        Command::Hitting { sets } => {
            let model = load_model(&g.model)?;
            let sets = parse_sets("sets", sets)?;
            let est = estimate_hitting_all(&model, &sets, g.n, g.depth, g.seed)?;
            let verdicts: Vec<bool> = est.iter().map(|e| e.verdict().unwrap_or(true)).collect();
            let csv = hitting_csv(&est.iter().zip(verdicts.iter().copied()).collect::<Vec<_>>());
            Ok(Body {
                pass: verdicts.iter().all(|&v| v),
                result: json!({"estimates": est}),
                csv: Some(csv),
            })
        }
        Command::Renyi { sets } => {
            let model = load_model(&g.model)?;
            let sets = parse_sets("sets", sets)?;
            let r = renyi_verify(&model, &sets, g.n, g.depth, g.seed)?;
            let csv = hitting_csv(
                &r.rows
                    .iter()
                    .map(|x| (&x.estimate, x.pass))
                    .collect::<Vec<_>>(),
            );
            Ok(Body {
                pass: r.all_pass,
                result: to_value(&r),
                csv: Some(csv),
            })
        }
        Command::Laws { check } => run_laws(g, check),
    }
}

fn run_laws(g: &GlobalArgs, check: &LawsCommand) -> Result<Body> {
    let model = load_model(&g.model)?;
    let (pass, result) = match check {
        LawsCommand::Fidi { other, sets, cap } => {
            let other = load_model(other)?;
            let spec = FidiSpec::new(parse_sets("sets", sets)?, *cap)?;
            let a = sample_counts(&model, &spec.sets, g.n, g.depth, derive_seed(g.seed, 1))?;
            let b = sample_counts(&other, &spec.sets, g.n, g.depth, derive_seed(g.seed, 2))?;
            let r = fidi_compare(&a, &b, spec.cap, g.alpha)?;
            (r.pass, to_value(&r))
        }
        LawsCommand::Ring { other, sets } => {
            let other = load_model(other)?;
            let sets = parse_sets("sets", sets)?;
            let r = hitting_compare_on_ring(&model, &other, &sets, g.n, g.depth, g.seed, g.alpha)?;
            (r.pass, to_value(&r))
        }
        LawsCommand::Closed {
            other,
            closed,
            probes,
            chains,
            fidi,
            cap,
        } => {
            let other = load_model(other)?;
            let closed = parse_real_sets("closed", closed, true)?;
            let probes = parse_real_sets("probes", probes, true)?;
            let chains = parse_chains("chains", chains)?;
            let spec = FidiSpec::new(parse_sets("fidi", fidi)?, *cap)?;
            let r = closed_set_compare(
                &model, &other, &closed, &probes, &chains, &spec, g.n, g.depth, g.seed, g.alpha,
            )?;
            (r.pass, to_value(&r))
        }
        LawsCommand::Recover { pairs } => {
            let r = additivity_check(&model, &dyadic_sibling_pairs(*pairs), g.n, g.depth, g.seed)?;
            (r.pass, to_value(&r))
        }
        LawsCommand::Incr { sets } => {
            let sets = parse_sets("sets", sets)?;
            let r = increments_check(&model, &sets, g.n, g.depth, g.seed, g.alpha)?;
            (r.pass, to_value(&r))
        }
        LawsCommand::Decompose {
            cells,
            refine,
            classifier,
        } => {
            let classifier = match classifier {
                ClassifierKind::Analytic => Classifier::Analytic,
                ClassifierKind::Detector => Classifier::Detector {
                    n_samples: g.n,
                    depth: g.depth,
                    seed: g.seed,
                },
            };
            let r = decompose(&model, &parse_sets("cells", cells)?, classifier)?;
            match refine {
                Some(fine) => {
                    let f = decompose(&model, &parse_sets("refine", fine)?, classifier)?;
                    let check = compare_decompositions(&r, &f);
                    let pass =
                        r.residual_dichotomy && f.residual_dichotomy && check.only_null_cells;
                    (pass, json!({"coarse": r, "fine": f, "refinement": check}))
                }
                None => (r.residual_dichotomy, to_value(&r)),
            }
        }
    };
    Ok(Body {
        pass,
        result,
        csv: None,
    })
}

/// Parses arguments and runs one command, capturing its output.
pub fn run_from<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            } else {
                Outcome::config_error(text)
            };
        }
    };
    run(&cli)
}

pub fn run(cli: &Cli) -> Outcome {
    let g = &cli.global;
    if !(g.alpha > 0.0 && g.alpha < 1.0) {
        return Outcome::config_error(format!(
            "error: invalid field `alpha`: must lie in (0, 1), got {}\n",
            g.alpha
        ));
    }
    if g.out == OutFormat::Csv
        && !matches!(cli.command, Command::Hitting { .. } | Command::Renyi { .. })
    {
        return Outcome::config_error(
            "error: invalid field `out`: csv is only available for hitting and renyi\n".into(),
        );
    }
    let start = Instant::now();
    let body = if g.threads > 0 {
        match rayon::ThreadPoolBuilder::new()
            .num_threads(g.threads)
            .build()
        {
            Ok(pool) => pool.install(|| run_command(g, &cli.command)),
            Err(e) => {
                return Outcome::config_error(format!("error: invalid field `threads`: {e}\n"))
            }
        }
    } else {
        run_command(g, &cli.command)
    };
    let body = match body {
        Ok(b) => b,
        Err(e) => return Outcome::config_error(format!("error: {e}\n")),
    };
    let code = if body.pass { 0 } else { 1 };
    if g.out == OutFormat::Csv {
        return Outcome {
            code,
            stdout: body.csv.unwrap_or_default(),
            stderr: String::new(),
        };
    }
    let mut report = json!({
        "tool": TOOL,
        "version": VERSION,
        "command": cli.command,
        "config": g,
        "seed": g.seed,
        "pass": body.pass,
        "result": body.result,
    });
    if !g.canonical {
        report["wall_clock_seconds"] = json!(start.elapsed().as_secs_f64());
    }
    let mut stdout = serde_json::to_string_pretty(&report).expect("reports serialize");
    stdout.push('\n');
    Outcome {
        code,
        stdout,
        stderr: String::new(),
    }
}
