use std::process::ExitCode;

use wagerlab::criteria::{
    default_band, stabilization_check, verdict, Criterion, CriterionError, Outcome,
};
use wagerlab::io::{family_hash, parse_sequence, parse_trace, write_trace, RunMeta, TraceMeta};
use wagerlab::strategies::{
    builtin_catalog, make, parse_strategy_file, render_strategy_file, StrategyDescriptor,
    StrategyError, SCHEMA,
};
use wagerlab::transforms::{estimate_level, TransformError, TransformKind};
use wagerlab::{
    evaluate as run_trace, BankruptcyPolicy, CriterionConfig, History, Rational, Statistic,
};

use crate::{read, write, CliError, EvaluateArgs, TransformArgs, VerifyArgs};

/// The entry of a strategy file selected by `--index`, or its only entry.
fn pick(
    descriptors: Vec<StrategyDescriptor>,
    index: Option<usize>,
) -> Result<StrategyDescriptor, CliError> {
    let n = descriptors.len();
    match index {
        Some(i) => descriptors
            .into_iter()
            .nth(i)
            .ok_or_else(|| CliError::config("--index", format!("file has {n} strategies"))),
        None if n == 1 => Ok(descriptors.into_iter().next().expect("one entry")),
        None if n == 0 => Err(CliError::config(
            "--strategy",
            "file has no [[strategy]] entries",
        )),
        None => Err(CliError::config(
            "--index",
            format!("file has {n} strategies; choose one"),
        )),
    }
}

fn load_one(
    path: &std::path::Path,
    field: &'static str,
    index: Option<usize>,
) -> Result<(String, StrategyDescriptor), CliError> {
    let text = read(path, field)?;
    let descriptors = parse_strategy_file(&text).map_err(|e| CliError::config(field, e))?;
    let d = pick(descriptors, index)?;
    make(&d).map_err(|e| CliError::config(field, e))?;
    Ok((text, d))
}

fn load_sequence(path: &std::path::Path) -> Result<(History, Option<RunMeta>), CliError> {
    parse_sequence(&read(path, "--sequence")?).map_err(|e| CliError::config("--sequence", e))
}

pub fn evaluate(args: &EvaluateArgs) -> Result<(), CliError> {
    let (text, d) = load_one(&args.strategy, "--strategy", args.index)?;
    let spec = make(&d).expect("validated on load");
    let (bits, meta) = load_sequence(&args.sequence)?;
    let horizon = args.horizon.unwrap_or(bits.len());
    if horizon > bits.len() {
        return Err(CliError::config(
            "--horizon",
            format!("{horizon} exceeds the {} bits of the sequence", bits.len()),
        ));
    }
    // traces of a constructed sequence share its run metadata
    let run = meta.unwrap_or_else(|| RunMeta {
        seed: None,
        rng: None,
        family_hash: family_hash(text.as_bytes()),
    });
    let trace = run_trace(&spec, &bits, horizon, BankruptcyPolicy::default())?;
    let csv = write_trace(
        &trace,
        &TraceMeta {
            run,
            strategy: spec.label().to_string(),
            initial: spec.initial().clone(),
        },
    );
    match &args.out {
        Some(path) => write(path, &csv),
        None => {
            print!("{csv}");
            Ok(())
        }
    }
}

fn rational_param(key: &str, value: &str) -> Result<Rational, CliError> {
    value
        .parse()
        .map_err(|e| CliError::config("--params", format!("{key}: {e}")))
}

pub fn transform(args: &TransformArgs) -> Result<(), CliError> {
    let (_, source) = load_one(&args.source, "--source", args.index)?;
    let which = args.which;
    let mut d = StrategyDescriptor::transform(which, source.clone());
    for p in &args.params {
        let (key, value) = p
            .split_once('=')
            .ok_or_else(|| CliError::config("--params", format!("`{p}` is not key=value")))?;
        match (which, key) {
            (TransformKind::Osc2Cons, "a") => d.a = Some(rational_param(key, value)?),
            (TransformKind::Osc2Cons, "b") => d.b = Some(rational_param(key, value)?),
            (TransformKind::V2Unit, "level") => d.level = Some(rational_param(key, value)?),
            (TransformKind::V2Unit, "t0") => {
                d.t0 = Some(
                    value
                        .parse()
                        .map_err(|e| CliError::config("--params", format!("t0: {e}")))?,
                )
            }
            _ => {
                return Err(CliError::config(
                    "--params",
                    format!("`{key}` is not a parameter of {}", which.name()),
                ))
            }
        }
    }
    match (&args.sequence, which) {
        (Some(path), TransformKind::V2Unit) if d.level.is_none() => {
            let (bits, _) = load_sequence(path)?;
            let spec = make(&source).expect("validated on load");
            let trace = run_trace(&spec, &bits, bits.len(), BankruptcyPolicy::default())?;
            let (level, t0) = estimate_level(&trace.capitals())
                .ok_or_else(|| CliError::config("--sequence", "sequence is empty"))?;
            eprintln!("estimated level {level}, t0 {t0}");
            d.level = Some(level);
            d.t0.get_or_insert(t0);
        }
        (Some(_), _) => {
            return Err(CliError::config(
                "--sequence",
                "only used to estimate a v2unit level that --params leaves out",
            ))
        }
        (None, _) => {}
    }
    make(&d).map_err(|e| match e {
        StrategyError::Transform(TransformError::BandInvalid { .. })
        | StrategyError::BadDescriptor { .. } => CliError::config("--params", e),
        e => CliError::config("--source", e),
    })?;
    write(&args.out, &render_strategy_file(&[d]))
}

fn criterion_error(e: CriterionError) -> CliError {
    let field = match &e {
        CriterionError::BandInvalid { .. } => "--band",
        CriterionError::InvalidConfig {
            field: "threshold", ..
        } => "--threshold",
        CriterionError::InvalidConfig {
            field: "crossings", ..
        } => "--crossings",
        CriterionError::InvalidConfig {
            field: "window", ..
        } => "--window",
        _ => "--criterion",
    };
    CliError::config(field, e)
}

pub fn verify(args: &VerifyArgs) -> Result<ExitCode, CliError> {
    let (meta, trace) =
        parse_trace(&read(&args.trace, "--trace")?).map_err(|e| CliError::config("--trace", e))?;
    let cfg = match args.criterion {
        Criterion::Gains | Criterion::Consumption => {
            if args.band.is_some() {
                return Err(CliError::config("--band", "only used by oscillation"));
            }
            let g = args.threshold.clone().ok_or_else(|| {
                CliError::config("--threshold", "required for gains and consumption")
            })?;
            if args.criterion == Criterion::Gains {
                CriterionConfig::gains(g)
            } else {
                CriterionConfig::consumption(g)
            }
        }
        Criterion::Oscillation => {
            if args.threshold.is_some() {
                return Err(CliError::config(
                    "--threshold",
                    "not used by oscillation; give --band",
                ));
            }
            let (a, b) = match &args.band {
                Some(band) => (band[0].clone(), band[1].clone()),
                None => {
                    let (a, b) = default_band(&trace.cover_capitals()).ok_or_else(|| {
                        CliError::config(
                            "--band",
                            "cover capital is constant over the first half of the trace",
                        )
                    })?;
                    println!("band ({a}, {b}) from the first half of the trace");
                    (a, b)
                }
            };
            CriterionConfig::oscillation(a, b, args.crossings)
        }
    };
    let v = verdict(&trace, &cfg).map_err(criterion_error)?;
    println!("{}: {v}", meta.strategy);
    if let Some(window) = args.window {
        let statistic = match args.criterion {
            Criterion::Consumption => Statistic::AccumulatedConsumption,
            _ => Statistic::FlooredCapital,
        };
        let s = stabilization_check(&trace, window, statistic).map_err(criterion_error)?;
        println!("{statistic:?} over the last {window} steps: {s}");
    }
    Ok(match v.outcome {
        Outcome::AchievedAt(_) => ExitCode::SUCCESS,
        Outcome::Bankrupt(_) => ExitCode::from(4),
        Outcome::Inconclusive | Outcome::StableInWindow => ExitCode::from(3),
    })
}

pub fn list_strategies() {
    print!("{SCHEMA}");
    println!();
    println!("# builtin catalog");
    print!("{}", render_strategy_file(&builtin_catalog()));
}
