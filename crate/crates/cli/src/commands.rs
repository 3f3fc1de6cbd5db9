use std::fmt::Display;

use ambigen::alphabet::Alphabet;
use ambigen::cfl::{
    earley_count, rank_tree, unrank_tree, CflDescription, CnfGrammar, PolyBound, SplitSearch, TreeCensus,
};
use ambigen::framework::{estimate_census_with, exact_count_with, sample_described_with};
use ambigen::numutil::trials_for;
use ambigen::pdagram::{pda_description, Pda};
use ambigen::pseudobool::{
    bits, brute_expectation, brute_optimum, brute_permanent, derandomize, eg_solve, parse_max_cut, parse_max_sat,
    permanent, random_search, random_search_n, Matrix01, PbProblem, PermMethod,
};
use ambigen::rankauto::{brute_rank_slice, rank_sampler, Nfa};
use ambigen::regular::{Dfa, DfaWords};
use ambigen::traces::{count_representatives, normal_form, Trace, TraceDescription};
use ambigen::{CoinSource, Description, Error, Nat, Rat, SampleReport, Word};
use num_traits::Zero;

use crate::{Action, Config, Failure, Kind, Oracle, Record};

/// Largest slice `|Σ|^n` the brute-force oracles will enumerate.
const ORACLE_LIMIT: u64 = 1 << 20;

type RunFn<'a> = Box<dyn Fn(u64) -> Result<Record, Failure> + Send + Sync + 'a>;

/// A parsed command, runnable once per seed.
pub struct Job<'a>(RunFn<'a>);

impl Job<'_> {
    pub fn run(&self, seed: u64) -> Result<Record, Failure> {
        (self.0)(seed)
    }
}

fn lib(e: Error) -> Failure {
    Failure(e.to_string())
}

fn need_n(cfg: &Config) -> Result<usize, Failure> {
    cfg.size.ok_or_else(|| Failure("this command needs -n SIZE".into()))
}

fn need_word(cfg: &Config, alphabet: &Alphabet) -> Result<Word, Failure> {
    let w = cfg
        .word
        .as_deref()
        .ok_or_else(|| Failure("this command needs -w WORD".into()))?;
    alphabet.parse_word(w).map_err(lib)
}

fn need_rank(cfg: &Config) -> Result<Nat, Failure> {
    let k = cfg
        .rank
        .as_deref()
        .ok_or_else(|| Failure("this command needs -k RANK".into()))?;
    k.trim().parse().map_err(|_| Failure(format!("bad rank `{k}`")))
}

fn bound(cfg: &Config) -> Result<PolyBound, Failure> {
    match &cfg.bound {
        Some(b) => PolyBound::parse(b).map_err(lib),
        None => Ok(PolyBound::constant(1)),
    }
}

fn unsupported(family: &str, action: Action) -> Failure {
    let name = format!("{action:?}").to_lowercase();
    Failure(format!("`{family} {name}` is not a supported command"))
}

fn slice_guard(alphabet: &Alphabet, n: usize) -> Result<(), Failure> {
    let size = (alphabet.len() as u64).checked_pow(n as u32);
    match size {
        Some(s) if s <= ORACLE_LIMIT => Ok(()),
        _ => Err(Failure(format!(
            "--oracle: the slice {}^{n} is too large for brute force",
            alphabet.len()
        ))),
    }
}

/// A deterministic result: no coins used.
fn fixed(value: impl Display, seed: u64) -> Record {
    Record {
        value: Some(value.to_string()),
        seed,
        ..Record::default()
    }
}

fn from_report<T>(rep: SampleReport<T>, seed: u64, show: impl Fn(&T) -> String) -> Record {
    Record {
        value: rep.value.as_ref().map(show),
        trials: rep.trials_used,
        bits: rep.bits_used,
        seed,
        oracle: None,
    }
}

fn check(ok: bool, expected: impl Display) -> Option<Oracle> {
    Some(Oracle {
        ok,
        expected: expected.to_string(),
    })
}

/// Oracle for a sampled or computed value that must equal `expected`.
fn equal_oracle(rec: &mut Record, expected: impl Display) {
    let expected = expected.to_string();
    if let Some(v) = &rec.value {
        rec.oracle = check(*v == expected, expected);
    }
}

/// Oracle on a sampled member: `ok` when the draw failed or `member` holds.
fn member_oracle(rec: &mut Record, member: bool) {
    if rec.value.is_some() {
        rec.oracle = check(member, if member { "member" } else { "not a member" });
    }
}

/// Count of distinct targets by enumeration, for estimate/exact oracles.
fn brute_census(words: Vec<Word>, keep: impl Fn(&Word) -> Result<bool, Error>) -> Result<Nat, Failure> {
    let mut c = Nat::zero();
    for w in words {
        if keep(&w).map_err(lib)? {
            c += 1u32;
        }
    }
    Ok(c)
}

fn lex_le(a: &[usize], b: &[usize]) -> bool {
    (a.len(), a) <= (b.len(), b)
}

pub fn prepare<'a>(family: &str, action: Action, text: &str, cfg: &'a Config) -> Result<Job<'a>, Failure> {
    let path = cfg.file.as_ref();
    let parse_err = |e| Failure::from_lib(path, e);
    match family {
        "dfa" => dfa(Dfa::parse(text).map_err(parse_err)?, action, cfg),
        "nfa" => nfa(Nfa::parse(text).map_err(parse_err)?, action, cfg),
        "cfg" => grammar(CnfGrammar::parse(text).map_err(parse_err)?, action, cfg),
        "pda" => pda(Pda::parse(text).map_err(parse_err)?, action, cfg),
        "trace" => trace(Dfa::parse(text).map_err(parse_err)?, action, cfg),
        "pb" => match action {
            Action::Perm => perm(Matrix01::parse(text).map_err(parse_err)?, cfg),
            Action::Derand | Action::Search => {
                let p = match cfg.kind {
                    Kind::Circuit => PbProblem::parse(text),
                    Kind::Sat => parse_max_sat(text),
                    Kind::Cut => parse_max_cut(text),
                }
                .map_err(parse_err)?;
                pb(p, action, cfg)
            }
            _ => Err(unsupported(family, action)),
        },
        _ => unreachable!("clap restricts the family"),
    }
}

fn dfa<'a>(a: Dfa, action: Action, cfg: &'a Config) -> Result<Job<'a>, Failure> {
    let oracle = cfg.oracle;
    let sigma = a.alphabet().clone();
    let run: RunFn<'a> = match action {
        Action::Count => {
            let n = need_n(cfg)?;
            if oracle {
                slice_guard(&sigma, n)?;
            }
            Box::new(move |seed| {
                let mut rec = fixed(a.count(n), seed);
                if oracle {
                    equal_oracle(&mut rec, a.slice_members(n).len());
                }
                Ok(rec)
            })
        }
        Action::Sample => {
            let n = need_n(cfg)?;
            let t = match cfg.trials {
                Some(t) => t,
                None => trials_for(&cfg.delta.0).map_err(lib)?,
            };
            Box::new(move |seed| {
                let mut src = CoinSource::from_seed(seed);
                let rep = a.sample(n, t, &mut src).map_err(lib)?;
                let member = rep.value.as_ref().is_some_and(|w| a.accepts(w));
                let mut rec = from_report(rep, seed, |w| sigma.format_word(w));
                if oracle {
                    member_oracle(&mut rec, member);
                }
                Ok(rec)
            })
        }
        Action::Rank => {
            let w = need_word(cfg, &sigma)?;
            if oracle {
                slice_guard(&sigma, w.len())?;
            }
            Box::new(move |seed| {
                let mut rec = fixed(a.rank(&w), seed);
                if oracle {
                    let brute = (0..=w.len())
                        .flat_map(|l| a.slice_members(l))
                        .filter(|y| lex_le(y, &w))
                        .count();
                    equal_oracle(&mut rec, brute);
                }
                Ok(rec)
            })
        }
        Action::Unrank => {
            let k = need_rank(cfg)?;
            let n = cfg.size;
            Box::new(move |seed| {
                let w = match n {
                    Some(n) => a.unrank_slice_with(&a.census(n), n, &k),
                    None => a.unrank(&k),
                }
                .map_err(lib)?;
                let mut rec = fixed(sigma.format_word(&w), seed);
                if oracle {
                    let back = match n {
                        Some(_) => a.slice_rank(&w),
                        None => a.rank(&w),
                    };
                    rec.oracle = check(a.accepts(&w) && back == k, format!("rank {back}"));
                }
                Ok(rec)
            })
        }
        Action::Estimate | Action::Exact => {
            let n = need_n(cfg)?;
            if oracle {
                slice_guard(&sigma, n)?;
            }
            let t = trials_for(&cfg.delta.0).map_err(lib)?;
            Box::new(move |seed| {
                let desc = DfaWords { dfa: &a, t };
                let mut src = CoinSource::from_seed(seed);
                let mut rec = estimate_or_exact(&desc, action, n, cfg, &mut src)?;
                if oracle {
                    let brute = brute_census(sigma.words(n), |w| Ok(a.accepts(w)))?;
                    tolerance_oracle(&mut rec, action, &brute, cfg);
                }
                Ok(rec)
            })
        }
        _ => return Err(unsupported("dfa", action)),
    };
    Ok(Job(run))
}

fn estimate_or_exact<D: Description>(
    desc: &D,
    action: Action,
    n: usize,
    cfg: &Config,
    src: &mut CoinSource,
) -> Result<Record, Failure> {
    let seed = src.seed().unwrap_or(0);
    if action == Action::Estimate {
        let rep = estimate_census_with(desc, n, &cfg.epsilon.0, src, cfg.trials).map_err(lib)?;
        Ok(from_report(rep, seed, |r| r.to_string()))
    } else {
        let rep = exact_count_with(desc, n, src, &Nat::from(cfg.ceiling), cfg.trials).map_err(lib)?;
        Ok(from_report(rep, seed, |c| c.to_string()))
    }
}

/// Exact counts must match; estimates must lie within the relative error.
fn tolerance_oracle(rec: &mut Record, action: Action, truth: &Nat, cfg: &Config) {
    let Some(v) = &rec.value else { return };
    let ok = if action == Action::Exact {
        *v == truth.to_string()
    } else {
        let est: Rat = v.parse().expect("rational rendering");
        let t = Rat::from_integer(truth.clone().into());
        let eps = &cfg.epsilon.0;
        est >= &t * (Rat::from_integer(1.into()) - eps) && est <= &t * (Rat::from_integer(1.into()) + eps)
    };
    let expected = if action == Action::Exact {
        truth.to_string()
    } else {
        format!("{truth} within epsilon {}", cfg.epsilon.0)
    };
    rec.oracle = check(ok, expected);
}

fn nfa<'a>(a: Nfa, action: Action, cfg: &'a Config) -> Result<Job<'a>, Failure> {
    let oracle = cfg.oracle;
    let sigma = a.alphabet().clone();
    let ceiling = usize::try_from(cfg.ceiling).unwrap_or(usize::MAX);
    let run: RunFn<'a> = match action {
        Action::Count => {
            let n = need_n(cfg)?;
            if oracle {
                slice_guard(&sigma, n)?;
            }
            Box::new(move |seed| {
                let c = a.slice_ranker(n, ceiling).and_then(|r| r.census()).map_err(lib)?;
                let mut rec = fixed(c, seed);
                if oracle {
                    equal_oracle(
                        &mut rec,
                        sigma.words(n).iter().filter(|w| !a.path_count(w).is_zero()).count(),
                    );
                }
                Ok(rec)
            })
        }
        Action::Rank => {
            let w = need_word(cfg, &sigma)?;
            if oracle {
                slice_guard(&sigma, w.len())?;
            }
            Box::new(move |seed| {
                let r = a.rank_slice(&w, ceiling).map_err(lib)?;
                let mut rec = fixed(r, seed);
                if oracle {
                    equal_oracle(&mut rec, brute_rank_slice(&a, &w));
                }
                Ok(rec)
            })
        }
        Action::Unrank => {
            let n = need_n(cfg)?;
            let k = need_rank(cfg)?;
            Box::new(move |seed| {
                let w = a.slice_ranker(n, ceiling).and_then(|r| r.unrank(&k)).map_err(lib)?;
                let mut rec = fixed(sigma.format_word(&w), seed);
                if oracle {
                    let back = brute_rank_slice(&a, &w);
                    rec.oracle = check(!a.path_count(&w).is_zero() && back == k, format!("rank {back}"));
                }
                Ok(rec)
            })
        }
        Action::Sample => {
            let n = need_n(cfg)?;
            Box::new(move |seed| {
                let ranker = a.slice_ranker(n, ceiling).map_err(lib)?;
                let census = ranker.census().map_err(lib)?;
                let mut src = CoinSource::from_seed(seed);
                let rep =
                    rank_sampler(|w| ranker.rank(w), &census, n, sigma.len(), &cfg.delta.0, &mut src).map_err(lib)?;
                let member = rep.value.as_ref().is_some_and(|w| !a.path_count(w).is_zero());
                let mut rec = from_report(rep, seed, |w| sigma.format_word(w));
                if oracle {
                    member_oracle(&mut rec, member);
                }
                Ok(rec)
            })
        }
        _ => return Err(unsupported("nfa", action)),
    };
    Ok(Job(run))
}

fn grammar<'a>(g: CnfGrammar, action: Action, cfg: &'a Config) -> Result<Job<'a>, Failure> {
    let oracle = cfg.oracle;
    let sigma = g.terminals().clone();
    let run: RunFn<'a> = match action {
        Action::Grammar => Box::new(move |seed| Ok(fixed(g.to_string().trim_end(), seed))),
        Action::Count if cfg.word.is_some() => {
            let w = need_word(cfg, &sigma)?;
            Box::new(move |seed| {
                let mut rec = fixed(earley_count(&g, &w), seed);
                if oracle {
                    let brute = g.to_grammar().leftmost_derivations(&w).map_err(lib)?;
                    equal_oracle(&mut rec, brute);
                }
                Ok(rec)
            })
        }
        Action::Count => {
            let n = need_n(cfg)?;
            if oracle {
                slice_guard(&sigma, n)?;
            }
            Box::new(move |seed| {
                let census = TreeCensus::<Nat>::new(&g, n);
                let mut rec = fixed(census.get(g.start(), n), seed);
                if oracle {
                    let total: Nat = sigma.words(n).iter().map(|x| earley_count(&g, x)).sum();
                    equal_oracle(&mut rec, total);
                }
                Ok(rec)
            })
        }
        Action::Unrank => {
            let n = need_n(cfg)?;
            let k = need_rank(cfg)?;
            Box::new(move |seed| {
                let census = TreeCensus::<Nat>::new(&g, n);
                let t = unrank_tree(&g, &census, g.start(), n, &k, SplitSearch::default()).map_err(lib)?;
                let mut rec = fixed(t.format(&g), seed);
                if oracle {
                    let back = rank_tree(&g, &census, &t);
                    rec.oracle = check(t.is_valid(&g) && back == k, format!("rank {back}"));
                }
                Ok(rec)
            })
        }
        Action::Sample | Action::Estimate | Action::Exact => {
            let n = need_n(cfg)?;
            if oracle && action != Action::Sample {
                slice_guard(&sigma, n)?;
            }
            let desc = CflDescription::new(g, bound(cfg)?);
            Box::new(move |seed| {
                let g = desc.grammar();
                let mut src = CoinSource::from_seed(seed);
                if action == Action::Sample {
                    let rep = sample_described_with(&desc, n, &mut src, cfg.trials).map_err(lib)?;
                    let member = rep.value.as_ref().is_some_and(|w| !earley_count(g, w).is_zero());
                    let mut rec = from_report(rep, seed, |w| sigma.format_word(w));
                    if oracle {
                        member_oracle(&mut rec, member);
                    }
                    return Ok(rec);
                }
                let mut rec = estimate_or_exact(&desc, action, n, cfg, &mut src)?;
                if oracle {
                    let brute = brute_census(sigma.words(n), |w| Ok(!earley_count(g, w).is_zero()))?;
                    tolerance_oracle(&mut rec, action, &brute, cfg);
                }
                Ok(rec)
            })
        }
        _ => return Err(unsupported("cfg", action)),
    };
    Ok(Job(run))
}

fn pda<'a>(m: Pda, action: Action, cfg: &'a Config) -> Result<Job<'a>, Failure> {
    let oracle = cfg.oracle;
    let steps = cfg.max_steps;
    let sigma = m.input().clone();
    let run: RunFn<'a> = match action {
        Action::Count if cfg.word.is_some() => {
            let w = need_word(cfg, &sigma)?;
            Box::new(move |seed| {
                let c = m.count_computations(&w, steps).map_err(lib)?;
                let mut rec = fixed(&c, seed);
                if oracle {
                    // Derivations of the slice grammar never exceed computations.
                    let d = if w.is_empty() {
                        Nat::zero()
                    } else {
                        let (sg, _) = pda_description(&m, w.len(), PolyBound::constant(1)).map_err(lib)?;
                        earley_count(&sg.cnf, &w)
                    };
                    rec.oracle = check(d <= c && d.is_zero() == c.is_zero(), format!("derivations {d}"));
                }
                Ok(rec)
            })
        }
        Action::Count => {
            let n = need_n(cfg)?;
            slice_guard(&sigma, n)?;
            Box::new(move |seed| {
                let mut members = 0u64;
                for w in sigma.words(n) {
                    if m.accepts(&w, steps).map_err(lib)? {
                        members += 1;
                    }
                }
                let mut rec = fixed(members, seed);
                if oracle {
                    let (sg, _) = pda_description(&m, n, PolyBound::constant(1)).map_err(lib)?;
                    let derived = sigma
                        .words(n)
                        .iter()
                        .filter(|w| !earley_count(&sg.cnf, w).is_zero())
                        .count();
                    equal_oracle(&mut rec, derived);
                }
                Ok(rec)
            })
        }
        Action::Grammar => {
            let n = need_n(cfg)?;
            if oracle {
                slice_guard(&sigma, n)?;
            }
            Box::new(move |seed| {
                let (sg, _) = pda_description(&m, n, PolyBound::constant(1)).map_err(lib)?;
                let mut rec = fixed(format!("# {}\n{}", sg.stats, sg.cnf.to_string().trim_end()), seed);
                if oracle {
                    let mut diff = 0usize;
                    for w in sigma.words(n) {
                        let derived = !earley_count(&sg.cnf, &w).is_zero();
                        if derived != m.accepts(&w, steps).map_err(lib)? {
                            diff += 1;
                        }
                    }
                    rec.oracle = check(diff == 0, format!("{diff} words where grammar and automaton disagree"));
                }
                Ok(rec)
            })
        }
        Action::Sample | Action::Estimate | Action::Exact => {
            let n = need_n(cfg)?;
            if oracle && action != Action::Sample {
                slice_guard(&sigma, n)?;
            }
            let (_, desc) = pda_description(&m, n, bound(cfg)?).map_err(lib)?;
            Box::new(move |seed| {
                let mut src = CoinSource::from_seed(seed);
                if action == Action::Sample {
                    let rep = sample_described_with(&desc, n, &mut src, cfg.trials).map_err(lib)?;
                    let member = match &rep.value {
                        Some(w) => m.accepts(w, steps).map_err(lib)?,
                        None => false,
                    };
                    let mut rec = from_report(rep, seed, |w| sigma.format_word(w));
                    if oracle {
                        member_oracle(&mut rec, member);
                    }
                    return Ok(rec);
                }
                let mut rec = estimate_or_exact(&desc, action, n, cfg, &mut src)?;
                if oracle {
                    let brute = brute_census(sigma.words(n), |w| m.accepts(w, steps))?;
                    tolerance_oracle(&mut rec, action, &brute, cfg);
                }
                Ok(rec)
            })
        }
        _ => return Err(unsupported("pda", action)),
    };
    Ok(Job(run))
}

fn trace<'a>(a: Dfa, action: Action, cfg: &'a Config) -> Result<Job<'a>, Failure> {
    let oracle = cfg.oracle;
    let sigma = a.alphabet().clone();
    let desc = TraceDescription::from_dfa(a, PolyBound::constant(1)).map_err(lib)?;
    let run: RunFn<'a> = match action {
        Action::Count if cfg.word.is_some() => {
            let w = need_word(cfg, &sigma)?;
            Box::new(move |seed| {
                let c = count_representatives(desc.dfa(), &w, desc.indep()).map_err(lib)?;
                let mut rec = fixed(c, seed);
                if oracle {
                    let nf = normal_form(&w, desc.indep());
                    let brute = desc
                        .dfa()
                        .slice_members(w.len())
                        .iter()
                        .filter(|y| normal_form(y, desc.indep()) == nf)
                        .count();
                    equal_oracle(&mut rec, brute);
                }
                Ok(rec)
            })
        }
        Action::Count => {
            let n = need_n(cfg)?;
            slice_guard(&sigma, n)?;
            Box::new(move |seed| {
                let traces = desc.traces(n);
                let mut rec = fixed(traces.len(), seed);
                if oracle {
                    // The traces partition the slice.
                    let mut total = Nat::zero();
                    for t in &traces {
                        total += count_representatives(desc.dfa(), t.rep(), desc.indep()).map_err(lib)?;
                    }
                    let members = desc.dfa().count(n);
                    rec.oracle = check(total == members, format!("representatives sum to {total} of {members}"));
                }
                Ok(rec)
            })
        }
        Action::Sample | Action::Estimate | Action::Exact => {
            let n = need_n(cfg)?;
            let b = match &cfg.bound {
                Some(_) => bound(cfg)?,
                None => {
                    slice_guard(&sigma, n)?;
                    let d = desc.max_ambiguity(n).map_err(lib)?;
                    PolyBound::constant(
                        u64::try_from(d)
                            .map_err(|_| Failure("ambiguity too large".into()))?
                            .max(1),
                    )
                }
            };
            if oracle {
                slice_guard(&sigma, n)?;
            }
            let desc = TraceDescription::new(desc.dfa().clone(), desc.indep().clone(), b).map_err(lib)?;
            Box::new(move |seed| {
                let mut src = CoinSource::from_seed(seed);
                if action == Action::Sample {
                    let rep = sample_described_with(&desc, n, &mut src, cfg.trials).map_err(lib)?;
                    let member = match &rep.value {
                        Some(t) => !count_representatives(desc.dfa(), t.rep(), desc.indep())
                            .map_err(lib)?
                            .is_zero(),
                        None => false,
                    };
                    let mut rec = from_report(rep, seed, |t: &Trace| sigma.format_word(t.rep()));
                    if oracle {
                        member_oracle(&mut rec, member);
                    }
                    return Ok(rec);
                }
                let mut rec = estimate_or_exact(&desc, action, n, cfg, &mut src)?;
                if oracle {
                    let truth = Nat::from(desc.traces(n).len());
                    tolerance_oracle(&mut rec, action, &truth, cfg);
                }
                Ok(rec)
            })
        }
        _ => return Err(unsupported("trace", action)),
    };
    Ok(Job(run))
}

fn perm<'a>(a: Matrix01, cfg: &'a Config) -> Result<Job<'a>, Failure> {
    let method: PermMethod = cfg.method.parse().map_err(lib)?;
    let oracle = cfg.oracle;
    Ok(Job(Box::new(move |seed| {
        let p = permanent(&a, method).map_err(lib)?;
        let mut rec = fixed(p, seed);
        if oracle {
            equal_oracle(&mut rec, brute_permanent(&a));
        }
        Ok(rec)
    })))
}

fn pb<'a>(p: PbProblem, action: Action, cfg: &'a Config) -> Result<Job<'a>, Failure> {
    let oracle = cfg.oracle;
    let goal = p.goal();
    let run: RunFn<'a> = match action {
        Action::Derand => Box::new(move |seed| {
            let (x, v) = if cfg.radius > 0 {
                let eg = eg_solve(&p, cfg.radius).map_err(lib)?;
                (eg.result.assignment, eg.result.value)
            } else {
                let x = derandomize(&p);
                let v = p.value(&x);
                (x, v)
            };
            let mut rec = fixed(format!("{} {v}", bits(&x)), seed);
            if oracle {
                let e = brute_expectation(&p, &[]).map_err(lib)?;
                let got = Rat::from_integer(v.clone());
                rec.oracle = check(!goal.better(&e, &got), format!("expectation {e}"));
            }
            Ok(rec)
        }),
        Action::Search => Box::new(move |seed| {
            let mut src = CoinSource::from_seed(seed);
            let rep = match cfg.trials {
                Some(t) => random_search_n(&p, t, &mut src),
                None => random_search(&p, &cfg.epsilon.0, &cfg.delta.0, &mut src),
            }
            .map_err(lib)?;
            let mut rec = Record {
                value: Some(format!("{} {}", bits(&rep.assignment), rep.value)),
                trials: rep.draws,
                bits: src.bits_consumed(),
                seed,
                oracle: None,
            };
            if oracle {
                let (best, v) = brute_optimum(&p).map_err(lib)?;
                // A draw can never beat the optimum.
                let ok = !goal.better(&rep.value, &v);
                rec.oracle = check(ok, format!("optimum {} {v}", bits(&best)));
            }
            Ok(rec)
        }),
        _ => return Err(unsupported("pb", action)),
    };
    Ok(Job(run))
}
