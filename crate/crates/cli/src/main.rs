//! `ambigen`: count, rank, sample and estimate slices of formal languages;
//! derandomized pseudo-boolean search; permanents.

mod commands;

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use ambigen::{Error, Rat};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;

#[derive(Parser, Debug)]
#[command(
    name = "ambigen",
    version,
    about = "Exact and randomized counting, ranking and sampling for formal languages"
)]
struct Cli {
    #[command(subcommand)]
    family: Family,
    #[command(flatten)]
    config: Config,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
enum Family {
    /// Deterministic finite automata.
    Dfa(Target),
    /// Nondeterministic automata of bounded ambiguity.
    Nfa(Target),
    /// Context-free grammars.
    Cfg(Target),
    /// Pushdown automata.
    Pda(Target),
    /// Trace languages of a DFA with `indep` pairs.
    Trace(Target),
    /// Pseudo-boolean problems and permanents.
    Pb(Target),
}

#[derive(Args, Debug, Clone, Copy, PartialEq, Eq)]
struct Target {
    #[arg(value_enum)]
    action: Action,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Action {
    Count,
    Sample,
    Rank,
    Unrank,
    Estimate,
    Exact,
    Derand,
    Search,
    Perm,
    Grammar,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    JsonLines,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    /// Circuit file with an optional `goal` line.
    Circuit,
    /// `n m` header and one clause of signed literals per line.
    Sat,
    /// `n m` header and one edge `u v` per line.
    Cut,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Probability(pub Rat);

impl FromStr for Probability {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let r = match s.split_once('/') {
            Some((a, b)) => {
                let a: BigInt = a.trim().parse().map_err(|_| format!("bad numerator in `{s}`"))?;
                let b: BigInt = b.trim().parse().map_err(|_| format!("bad denominator in `{s}`"))?;
                if b == BigInt::from(0) {
                    return Err("zero denominator".into());
                }
                Rat::new(a, b)
            }
            None => {
                let (int, frac) = s.split_once('.').unwrap_or((s, ""));
                let digits: BigInt = format!("{int}{frac}")
                    .parse()
                    .map_err(|_| format!("bad number `{s}`"))?;
                Rat::new(digits, BigInt::from(10).pow(frac.len() as u32))
            }
        };
        if r <= Rat::from_integer(0.into()) || r >= Rat::from_integer(1.into()) {
            return Err(format!("`{s}` must lie strictly between 0 and 1"));
        }
        Ok(Probability(r))
    }
}

#[derive(Args, Debug, Clone)]
pub struct Config {
    /// Input file (automaton, grammar, PDA, circuit, instance or matrix).
    #[arg(short = 'a', long = "file", global = true, short_aliases = ['g', 'm', 'p', 'f'],
          aliases = ["automaton", "grammar", "pda", "problem", "matrix"])]
    pub file: Option<PathBuf>,
    /// Slice length.
    #[arg(short = 'n', long = "size", global = true)]
    pub size: Option<usize>,
    /// A word (letters, or space-separated names).
    #[arg(short = 'w', long, global = true, allow_hyphen_values = true)]
    pub word: Option<String>,
    /// A 1-based rank.
    #[arg(short = 'k', long, global = true)]
    pub rank: Option<String>,
    /// Ambiguity bound `c0,c1,...` meaning `c0 + c1 n + ...` (default 1; for
    /// traces, the exact maximum at `-n`).
    #[arg(long, global = true)]
    pub bound: Option<String>,
    /// Permanent method: coefficient, fraction or bruteforce.
    #[arg(long, global = true, default_value = "coefficient")]
    pub method: String,
    /// Input kind for `pb derand` and `pb search`.
    #[arg(long, global = true, value_enum, default_value = "circuit")]
    pub kind: Kind,
    /// Local-search radius after `derand` (0 skips local search).
    #[arg(long, global = true, default_value_t = 0)]
    pub radius: usize,
    /// Step limit when enumerating PDA computations.
    #[arg(long, global = true, default_value_t = 64)]
    pub max_steps: usize,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Failure probability target.
    #[arg(long, global = true, default_value = "1/4")]
    pub delta: Probability,
    /// Relative error for estimators and random search.
    #[arg(long, global = true, default_value = "1/4")]
    pub epsilon: Probability,
    /// Override the computed number of trials.
    #[arg(long, global = true)]
    pub trials: Option<u64>,
    /// Size ceiling for exact counting and Kronecker lifts.
    #[arg(long, global = true, default_value_t = 1 << 20)]
    pub ceiling: u64,
    #[arg(long, global = true, value_enum, default_value = "text")]
    pub format: Format,
    /// Also run a brute-force check and report the comparison.
    #[arg(long, global = true)]
    pub oracle: bool,
    /// Independent runs with seeds `seed, seed + 1, ...`.
    #[arg(long, global = true, default_value_t = 1)]
    pub repeat: u64,
}

/// One result line.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Record {
    /// `None` is the failure outcome.
    pub value: Option<String>,
    pub trials: u64,
    pub bits: u64,
    pub seed: u64,
    pub oracle: Option<Oracle>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Oracle {
    pub ok: bool,
    pub expected: String,
}

impl Record {
    fn render(&self, format: Format) -> String {
        match format {
            Format::Text => {
                let mut out = String::new();
                match &self.value {
                    Some(v) => writeln!(out, "{v}").unwrap(),
                    None => writeln!(out, "FAIL (⊥)").unwrap(),
                }
                writeln!(out, "# trials {} bits {} seed {}", self.trials, self.bits, self.seed).unwrap();
                if let Some(o) = &self.oracle {
                    let verdict = if o.ok { "ok" } else { "MISMATCH" };
                    writeln!(out, "# oracle {verdict}: {}", o.expected).unwrap();
                }
                out
            }
            Format::JsonLines => {
                let mut obj = serde_json::json!({
                    "value": self.value,
                    "trials": self.trials,
                    "bits": self.bits,
                    "seed": self.seed,
                });
                if let Some(o) = &self.oracle {
                    obj["oracle"] = serde_json::json!({"ok": o.ok, "expected": o.expected});
                }
                format!("{obj}\n")
            }
        }
    }
}

/// Problem with the command line or the input, reported with exit code 1.
#[derive(Debug)]
pub struct Failure(pub String);

impl Failure {
    pub fn from_lib(path: Option<&PathBuf>, e: Error) -> Self {
        match (e, path) {
            (Error::Parse { line, msg }, Some(p)) if line > 0 => Failure(format!("{}:{line}: {msg}", p.display())),
            (Error::Parse { msg, .. }, Some(p)) => Failure(format!("{}: {msg}", p.display())),
            (e, _) => Failure(e.to_string()),
        }
    }
}

fn run(cli: &Cli) -> Result<Vec<Record>, Failure> {
    let (family, action) = match cli.family {
        Family::Dfa(t) => ("dfa", t.action),
        Family::Nfa(t) => ("nfa", t.action),
        Family::Cfg(t) => ("cfg", t.action),
        Family::Pda(t) => ("pda", t.action),
        Family::Trace(t) => ("trace", t.action),
        Family::Pb(t) => ("pb", t.action),
    };
    let cfg = &cli.config;
    if cfg.repeat == 0 {
        return Err(Failure("--repeat must be at least 1".into()));
    }
    let text = match &cfg.file {
        Some(p) => std::fs::read_to_string(p).map_err(|e| Failure(format!("{}: {e}", p.display())))?,
        None => return Err(Failure("an input file is required (-a/-g/-m/-p FILE)".into())),
    };
    let job = commands::prepare(family, action, &text, cfg)?;
    let seeds: Vec<u64> = (0..cfg.repeat).map(|i| cfg.seed.wrapping_add(i)).collect();
    if seeds.len() == 1 {
        return Ok(vec![job.run(seeds[0])?]);
    }
    let workers = std::thread::available_parallelism()
        .map_or(1, |n| n.get())
        .min(seeds.len());
    let chunk = seeds.len().div_ceil(workers);
    let job = &job;
    let parts: Vec<Result<Vec<Record>, Failure>> = std::thread::scope(|s| {
        let handles: Vec<_> = seeds
            .chunks(chunk)
            .map(|part| s.spawn(move || part.iter().map(|&seed| job.run(seed)).collect()))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("worker panicked"))
            .collect()
    });
    let mut out = Vec::with_capacity(seeds.len());
    for p in parts {
        out.extend(p?);
    }
    Ok(out)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(records) => {
            let mut stdout = std::io::stdout().lock();
            let mut failed = false;
            for r in &records {
                failed |= r.value.is_none();
                let _ = stdout.write_all(r.render(cli.config.format).as_bytes());
            }
            if records.iter().any(|r| r.oracle.as_ref().is_some_and(|o| !o.ok)) {
                eprintln!("error: oracle mismatch");
                return ExitCode::from(1);
            }
            if failed {
                if cli.config.format == Format::JsonLines {
                    eprintln!("FAIL (⊥)");
                }
                return ExitCode::from(2);
            }
            ExitCode::SUCCESS
        }
        Err(Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn probabilities() {
        assert_eq!("1/4".parse::<Probability>().unwrap().0, Rat::new(1.into(), 4.into()));
        assert_eq!("0.25".parse::<Probability>().unwrap().0, Rat::new(1.into(), 4.into()));
        assert!("1".parse::<Probability>().is_err());
        assert!("0".parse::<Probability>().is_err());
        assert!("1/0".parse::<Probability>().is_err());
    }

    #[test]
    fn render_formats() {
        let r = Record {
            value: Some("5".into()),
            trials: 0,
            bits: 0,
            seed: 3,
            oracle: None,
        };
        assert_eq!(r.render(Format::Text), "5\n# trials 0 bits 0 seed 3\n");
        assert_eq!(
            r.render(Format::JsonLines),
            "{\"bits\":0,\"seed\":3,\"trials\":0,\"value\":\"5\"}\n"
        );
        let fail = Record { value: None, ..r };
        assert!(fail.render(Format::Text).starts_with("FAIL (⊥)\n"));
        assert!(fail.render(Format::JsonLines).contains("\"value\":null"));
    }
}
