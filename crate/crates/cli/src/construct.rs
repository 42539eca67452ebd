use std::fs::{self, File};
use std::io::{self, BufWriter};
use std::path::{Path, PathBuf};

use wagerlab::adversary::{
    asserts_from_env, casino_demo, diagonalize_consumption_vs_oscillation,
    diagonalize_gain_vs_consumption, diagonalize_r_vs_v_gains, diagonalize_v_vs_z_gains,
    hero_descriptor, AdversaryError, RealVsVParams, Theorem, DEFAULT_PATIENCE,
};
use wagerlab::io::{family_hash, write_sequence, RunMeta, TraceMeta, TraceWriter};
use wagerlab::strategies::{load_strategies, make, render_strategy_file, StrategyDescriptor};
use wagerlab::sweep::{map_seeds, Mode};
use wagerlab::{evaluate_streaming, rng, BankruptcyPolicy, Bit, Rational, SupermartingaleSpec};

use crate::{read, write, CliError, ConstructArgs};

struct Outputs {
    sequence: PathBuf,
    traces: PathBuf,
    log: Option<PathBuf>,
}

pub fn run(args: &ConstructArgs, verbose: bool) -> Result<(), CliError> {
    check_flags(args)?;
    let text = read(&args.family, "--family")?;
    let family = load_strategies(&text).map_err(|e| CliError::config("--family", e))?;
    let hash = family_hash(text.as_bytes());

    let Some(seeds) = &args.seeds else {
        let sequence = args
            .out
            .clone()
            .expect("clap requires --out without --seeds");
        let traces = args
            .trace_dir
            .clone()
            .unwrap_or_else(|| match sequence.parent() {
                Some(p) if !p.as_os_str().is_empty() => p.to_owned(),
                _ => PathBuf::from("."),
            });
        let outputs = Outputs {
            sequence,
            traces,
            log: args.log.clone(),
        };
        let summary = run_one(
            args,
            &family,
            &hash,
            args.seed.unwrap_or(0),
            &outputs,
            verbose,
        )?;
        println!("{summary}");
        return Ok(());
    };

    let root = args
        .trace_dir
        .as_ref()
        .expect("clap requires --trace-dir with --seeds");
    let summaries = map_seeds(seeds.clone(), Mode::default(), |seed| {
        let dir = root.join(format!("seed-{seed}"));
        let outputs = Outputs {
            sequence: dir.join("sequence.txt"),
            log: Some(dir.join("log.csv")),
            traces: dir,
        };
        run_one(args, &family, &hash, seed, &outputs, verbose)
    });
    for s in summaries {
        println!("{}", s?);
    }
    Ok(())
}

fn check_flags(args: &ConstructArgs) -> Result<(), CliError> {
    let t = args.theorem;
    let only = |field: &'static str, present: bool, allowed: &[Theorem]| {
        if present && !allowed.contains(&t) {
            let names: Vec<&str> = allowed.iter().map(|a| a.name()).collect();
            return Err(CliError::config(
                field,
                format!("only used by {}, not {t}", names.join(" and ")),
            ));
        }
        Ok(())
    };
    only("--seed", args.seed.is_some(), &[Theorem::RealVsV])?;
    only("--seeds", args.seeds.is_some(), &[Theorem::RealVsV])?;
    only("--L", args.level.is_some(), &[Theorem::RealVsV])?;
    only(
        "--c0",
        args.c0.is_some(),
        &[Theorem::RealVsV, Theorem::Casino],
    )?;
    only("--patience", args.patience.is_some(), &[Theorem::Casino])?;
    if args.level.as_ref().is_some_and(|l| !l.is_positive()) {
        return Err(CliError::config("--L", "must be positive"));
    }
    if args.c0.as_ref().is_some_and(|c| !c.is_positive()) {
        return Err(CliError::config("--c0", "must be positive"));
    }
    if args.patience == Some(0) {
        return Err(CliError::config("--patience", "must be at least 1"));
    }
    Ok(())
}

/// Family problems are configuration errors; certificate failures are not.
fn adversary_error(e: AdversaryError) -> CliError {
    match e {
        AdversaryError::FamilyNotInteger { .. }
        | AdversaryError::FamilyNotV { .. }
        | AdversaryError::NegativeInitial { .. }
        | AdversaryError::Member { .. } => CliError::config("--family", e),
        e => CliError::Adversary(e),
    }
}

fn run_one(
    args: &ConstructArgs,
    family: &[SupermartingaleSpec],
    hash: &str,
    seed: u64,
    out: &Outputs,
    verbose: bool,
) -> Result<String, CliError> {
    let certify = asserts_from_env();
    let defaults = RealVsVParams::default();
    let params = RealVsVParams {
        level: args.level.clone().unwrap_or(defaults.level),
        c0: args.c0.clone().unwrap_or(defaults.c0),
        seed,
    };
    let h = args.horizon;
    let (construction, hero) = match args.theorem {
        Theorem::Casino => {
            let initial = args.c0.clone().unwrap_or_else(|| Rational::new(7, 3));
            let d = StrategyDescriptor::casino_fractional(initial).labeled("hero");
            let hero = make(&d).map_err(|e| CliError::config("--c0", e))?;
            let patience = args.patience.unwrap_or(DEFAULT_PATIENCE);
            (casino_demo(&hero, family, h, patience, certify), d)
        }
        t => {
            let d = hero_descriptor(t, &params).expect("every other construction names its hero");
            let c = match t {
                Theorem::GainVsConsumption => diagonalize_gain_vs_consumption(family, h, certify),
                Theorem::ConsumptionVsOscillation => {
                    diagonalize_consumption_vs_oscillation(family, h, certify)
                }
                Theorem::RealVsV => diagonalize_r_vs_v_gains(family, h, &params, certify),
                Theorem::VVsInteger => diagonalize_v_vs_z_gains(family, h, certify),
                Theorem::Casino => unreachable!(),
            };
            (c, d)
        }
    };
    let construction = construction.map_err(adversary_error)?;

    let run = if args.theorem == Theorem::RealVsV {
        RunMeta {
            seed: Some(seed),
            rng: Some(rng::ALGORITHM.to_string()),
            family_hash: hash.to_string(),
        }
    } else {
        RunMeta {
            seed: None,
            rng: None,
            family_hash: hash.to_string(),
        }
    };

    fs::create_dir_all(&out.traces).map_err(|source| CliError::Io {
        path: out.traces.clone(),
        source,
    })?;
    let mut wrote = Vec::new();
    write(&out.sequence, &write_sequence(&construction.bits, &run))?;
    wrote.push(out.sequence.clone());

    let hero_file = out.traces.join("hero.strategy.toml");
    write(&hero_file, &render_strategy_file(&[hero]))?;
    wrote.push(hero_file);

    let path = out.traces.join("hero.csv");
    let summary = write_trace(&path, &construction.hero, &construction.bits, &run)?;
    wrote.push(path);
    for (i, member) in construction.members.iter().enumerate() {
        let path = out.traces.join(format!("member-{}.csv", i + 1));
        write_trace(&path, member, &construction.bits, &run)?;
        wrote.push(path);
    }
    if let Some(log) = &out.log {
        write(log, &construction.log_csv())?;
        wrote.push(log.clone());
    }
    if verbose {
        for p in &wrote {
            eprintln!("wrote {}", p.display());
        }
    }

    let seed_note = match run.seed {
        Some(s) => format!(" seed {s}"),
        None => String::new(),
    };
    Ok(format!(
        "{}{seed_note}: {h} bits, hero floor {} (max {}), {}, {} members traced{}",
        args.theorem,
        summary.last_floor,
        summary.max_floor,
        match summary.bankrupt {
            Some(n) => format!("bankrupt at step {n}"),
            None => "never bankrupt".to_string(),
        },
        construction.members.len(),
        if construction.certified {
            ", certified"
        } else {
            ""
        },
    ))
}

struct TraceSummary {
    last_floor: Rational,
    max_floor: Rational,
    bankrupt: Option<usize>,
}

fn write_trace(
    path: &Path,
    spec: &SupermartingaleSpec,
    bits: &[Bit],
    run: &RunMeta,
) -> Result<TraceSummary, CliError> {
    let io_err = |source: io::Error| CliError::Io {
        path: path.to_owned(),
        source,
    };
    let meta = TraceMeta {
        run: run.clone(),
        strategy: spec.label().to_string(),
        initial: spec.initial().clone(),
    };
    let file = File::create(path).map_err(io_err)?;
    let mut w = TraceWriter::new(BufWriter::new(file), &meta).map_err(io_err)?;
    let mut summary = TraceSummary {
        last_floor: spec.initial().floor(),
        max_floor: spec.initial().floor(),
        bankrupt: None,
    };
    let mut failed = None;
    let (head, _) =
        evaluate_streaming(spec, bits, bits.len(), BankruptcyPolicy::default(), |row| {
            if failed.is_none() {
                failed = w.row(row).err();
            }
            summary.last_floor = row.capital.floor();
            if summary.last_floor > summary.max_floor {
                summary.max_floor = summary.last_floor.clone();
            }
            if row.bankrupt && summary.bankrupt.is_none() {
                summary.bankrupt = Some(row.n);
            }
        })?;
    if head.initial_bankrupt {
        summary.bankrupt = Some(0);
    }
    if let Some(e) = failed {
        return Err(io_err(e));
    }
    w.finish().map_err(io_err)?;
    Ok(summary)
}
