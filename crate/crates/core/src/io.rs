//! Text formats: sequence files, trace CSVs and their metadata header.
//!
//! A sequence file holds `#` comment lines followed by one line of `+`/`-`
//! characters (`1`/`0` accepted). A trace CSV starts with a single metadata
//! comment
//!
//! ```text
//! # wagerlab v0.1.0, seed=-, family-hash=3f1a…, strategy=hero, initial=2
//! ```
//!
//! followed by the header row and one row per step. Rationals are written
//! as `p/q`, or `p` when `q = 1`.

use std::fmt::Write as _;
use std::io::{self, Write};

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::history::{Bit, History};
use crate::martingale::{is_bankrupt, Trace, TraceRow};
use crate::rational::Rational;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const TRACE_COLUMNS: &str = "n,bit,capital,wager,consumption,accumulated_consumption,bankrupt";

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("missing field `{0}` in metadata header")]
    MissingField(&'static str),
    #[error(transparent)]
    Io(#[from] io::Error),
}

fn parse_error(line: usize, reason: impl Into<String>) -> FormatError {
    FormatError::Parse {
        line,
        reason: reason.into(),
    }
}

/// Run metadata shared by the sequence file and every trace of a run.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RunMeta {
    pub seed: Option<u64>,
    /// Name of the generator behind `seed`.
    pub rng: Option<String>,
    pub family_hash: String,
}

impl RunMeta {
    fn fields(&self) -> String {
        let mut s = format!(
            "seed={}",
            self.seed.map_or("-".to_string(), |v| v.to_string())
        );
        if let Some(rng) = &self.rng {
            let _ = write!(s, ", rng={rng}");
        }
        let _ = write!(s, ", family-hash={}", self.family_hash);
        s
    }
}

/// First 16 hex digits of the SHA-256 of a family file.
pub fn family_hash(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .take(8)
        .fold(String::new(), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
}

/// Metadata line of one trace.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceMeta {
    pub run: RunMeta,
    pub strategy: String,
    pub initial: Rational,
}

impl TraceMeta {
    pub fn header_line(&self) -> String {
        format!(
            "# wagerlab v{VERSION}, {}, strategy={}, initial={}",
            self.run.fields(),
            self.strategy,
            self.initial
        )
    }
}

/// Parse `key=value` pairs from a `# wagerlab v…` comment.
fn parse_fields(line: &str, lineno: usize) -> Result<Vec<(String, String)>, FormatError> {
    let body = line
        .strip_prefix("# wagerlab v")
        .ok_or_else(|| parse_error(lineno, "expected `# wagerlab v…` metadata"))?;
    let mut parts = body.split(", ");
    parts.next();
    parts
        .map(|p| {
            p.split_once('=')
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .ok_or_else(|| parse_error(lineno, format!("malformed metadata field `{p}`")))
        })
        .collect()
}

fn run_meta_from(fields: &[(String, String)], lineno: usize) -> Result<RunMeta, FormatError> {
    let get = |k: &str| {
        fields
            .iter()
            .find(|(key, _)| key == k)
            .map(|(_, v)| v.as_str())
    };
    let seed = match get("seed") {
        None => return Err(FormatError::MissingField("seed")),
        Some("-") => None,
        Some(v) => Some(
            v.parse()
                .map_err(|_| parse_error(lineno, format!("bad seed `{v}`")))?,
        ),
    };
    Ok(RunMeta {
        seed,
        rng: get("rng").map(str::to_string),
        family_hash: get("family-hash")
            .ok_or(FormatError::MissingField("family-hash"))?
            .to_string(),
    })
}

pub fn write_sequence(bits: &[Bit], meta: &RunMeta) -> String {
    format!(
        "# wagerlab v{VERSION}, {}\n{}\n",
        meta.fields(),
        History::from(bits.to_vec())
    )
}

/// Bits of a sequence file, plus its metadata if it carries a header.
pub fn parse_sequence(text: &str) -> Result<(History, Option<RunMeta>), FormatError> {
    let mut meta = None;
    let mut bits = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.starts_with("# wagerlab v") {
            meta = Some(run_meta_from(&parse_fields(line, i + 1)?, i + 1)?);
        } else if line.is_empty() || line.starts_with('#') {
            continue;
        } else {
            for (col, ch) in line.chars().enumerate() {
                let bit = Bit::from_char(ch).ok_or_else(|| {
                    parse_error(
                        i + 1,
                        format!("unexpected character `{ch}` at column {}", col + 1),
                    )
                })?;
                bits.push(bit);
            }
        }
    }
    Ok((History::from_bits(bits), meta))
}

/// Streams trace rows as CSV.
pub struct TraceWriter<W: Write> {
    out: W,
}

impl<W: Write> TraceWriter<W> {
    pub fn new(mut out: W, meta: &TraceMeta) -> io::Result<Self> {
        writeln!(out, "{}", meta.header_line())?;
        writeln!(out, "{TRACE_COLUMNS}")?;
        Ok(TraceWriter { out })
    }

    pub fn row(&mut self, r: &TraceRow) -> io::Result<()> {
        writeln!(
            self.out,
            "{},{},{},{},{},{},{}",
            r.n, r.bit, r.capital, r.wager, r.consumption, r.accumulated_consumption, r.bankrupt
        )
    }

    pub fn finish(mut self) -> io::Result<W> {
        self.out.flush()?;
        Ok(self.out)
    }
}

pub fn write_trace(trace: &Trace, meta: &TraceMeta) -> String {
    let mut w = TraceWriter::new(Vec::new(), meta).expect("writing to memory");
    for r in &trace.rows {
        w.row(r).expect("writing to memory");
    }
    String::from_utf8(w.finish().expect("writing to memory")).expect("trace CSV is ASCII")
}

fn field<T: std::str::FromStr>(
    raw: Option<&str>,
    name: &str,
    line: usize,
) -> Result<T, FormatError> {
    let raw = raw.ok_or_else(|| parse_error(line, format!("missing column `{name}`")))?;
    raw.parse()
        .map_err(|_| parse_error(line, format!("bad {name} `{raw}`")))
}

/// Read a trace CSV back. Bankruptcy at the empty history is recovered
/// from the first row's decision.
pub fn parse_trace(text: &str) -> Result<(TraceMeta, Trace), FormatError> {
    let mut lines = text.lines().enumerate();
    let (_, first) = lines.next().ok_or_else(|| parse_error(1, "empty trace"))?;
    let fields = parse_fields(first, 1)?;
    let get = |k: &str| {
        fields
            .iter()
            .find(|(key, _)| key == k)
            .map(|(_, v)| v.clone())
    };
    let meta = TraceMeta {
        run: run_meta_from(&fields, 1)?,
        strategy: get("strategy").ok_or(FormatError::MissingField("strategy"))?,
        initial: get("initial")
            .ok_or(FormatError::MissingField("initial"))?
            .parse()
            .map_err(|_| parse_error(1, "bad initial capital"))?,
    };
    match lines.next() {
        Some((_, cols)) if cols.trim() == TRACE_COLUMNS => {}
        _ => return Err(parse_error(2, format!("expected header `{TRACE_COLUMNS}`"))),
    }
    let mut rows = Vec::new();
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let lineno = i + 1;
        let mut cells = line.split(',');
        let n: usize = field(cells.next(), "n", lineno)?;
        let bit_raw: String = field(cells.next(), "bit", lineno)?;
        let mut chars = bit_raw.chars();
        let bit = match (chars.next().and_then(Bit::from_char), chars.next()) {
            (Some(b), None) => b,
            _ => return Err(parse_error(lineno, format!("bad bit `{bit_raw}`"))),
        };
        rows.push(TraceRow {
            n,
            bit,
            capital: field(cells.next(), "capital", lineno)?,
            wager: field(cells.next(), "wager", lineno)?,
            consumption: field(cells.next(), "consumption", lineno)?,
            accumulated_consumption: field(cells.next(), "accumulated_consumption", lineno)?,
            bankrupt: field(cells.next(), "bankrupt", lineno)?,
        });
        if cells.next().is_some() {
            return Err(parse_error(lineno, "too many columns"));
        }
        if n != rows.len() {
            return Err(parse_error(
                lineno,
                format!("row numbered {n}, expected {}", rows.len()),
            ));
        }
    }
    let initial_bankrupt = rows
        .first()
        .is_some_and(|r| is_bankrupt(&meta.initial, &r.wager, &r.consumption));
    let trace = Trace {
        spec_label: meta.strategy.clone(),
        initial: meta.initial.clone(),
        initial_bankrupt,
        horizon: rows.len(),
        rows,
        truncated: false,
    };
    Ok((meta, trace))
}
