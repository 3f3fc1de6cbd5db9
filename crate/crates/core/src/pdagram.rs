//! Pushdown automata and their per-length grammars.
//!
//! For a fixed input length `n`, nonterminals are triples `(C1, C2, kind)`
//! of surface configurations (state, stack top, input position) and the
//! kind of computation joining them at equal stack height:
//!
//! * `s`: a single move that leaves the stack alone,
//! * `b`: a push, a computation above that height, then a pop,
//! * `z`: two or more steps touching the base height in between, split at
//!   the first return as `(C1, D, s|b) (D, C2, any)`.
//!
//! Every computation falls in exactly one kind, so leftmost derivations of
//! the raw grammar correspond one to one with computations.

use std::collections::HashMap;
use std::fmt;

use num_traits::Zero;

use crate::alphabet::Alphabet;
use crate::cfl::{CflDescription, CnfGrammar, EpsilonPolicy, GSym, Grammar, PolyBound, Rule};
use crate::framework::{estimate_census, sample_described};
use crate::text::{check_unique, lines, lookup};
use crate::{CoinSource, Error, Nat, Rat, Result, SampleReport, Symbol, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Move {
    /// Reads `sym` (or nothing) with `top` on the stack, stack unchanged.
    Consume {
        from: usize,
        sym: Option<Symbol>,
        top: usize,
        to: usize,
    },
    Push {
        from: usize,
        top: usize,
        push: usize,
        to: usize,
    },
    /// Pops `top`.
    Pop { from: usize, top: usize, to: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pda {
    states: Vec<String>,
    input: Alphabet,
    stack: Vec<String>,
    init: usize,
    start: usize,
    finals: Vec<bool>,
    moves: Vec<Move>,
}

impl Pda {
    pub fn new(
        states: Vec<String>,
        input: Alphabet,
        stack: Vec<String>,
        init: usize,
        start: usize,
        finals: &[usize],
        moves: Vec<Move>,
    ) -> Result<Self> {
        let (nq, ng) = (states.len(), stack.len());
        if init >= ng || start >= nq {
            return Err(Error::invalid("initial stack symbol or start state out of range"));
        }
        let ok = moves.iter().all(|m| match *m {
            Move::Consume { from, sym, top, to } => {
                from < nq && to < nq && top < ng && sym.is_none_or(|s| s < input.len())
            }
            Move::Push { from, top, push, to } => from < nq && to < nq && top < ng && push < ng,
            Move::Pop { from, top, to } => from < nq && to < nq && top < ng,
        });
        if !ok {
            return Err(Error::invalid("move out of range"));
        }
        let mut fin = vec![false; nq];
        for &f in finals {
            *fin.get_mut(f)
                .ok_or_else(|| Error::invalid("final state out of range"))? = true;
        }
        Ok(Pda {
            states,
            input,
            stack,
            init,
            start,
            finals: fin,
            moves,
        })
    }

    /// `state q0 q1 ...` (the first is the start unless `start q` is
    /// given), `input a b`, `stack Z A`, `init Z`, `final q ...`, and moves
    /// `consume q σ top q'` (σ may be `ε`), `push q top γ q'`, `pop q top q'`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut states: Option<Vec<String>> = None;
        let mut input = None;
        let mut stack: Option<Vec<String>> = None;
        let mut init = None;
        let mut start = None;
        let mut finals = Vec::new();
        let mut pending = Vec::new();
        for line in lines(text) {
            match line.key() {
                "state" | "states" => {
                    let names: Vec<String> = line.args().iter().map(|s| s.to_string()).collect();
                    check_unique(&names, "state", line.no)?;
                    states = Some(names);
                }
                "input" => {
                    input = Some(Alphabet::new(line.args().iter().copied()).map_err(|e| line.err(e.to_string()))?)
                }
                "stack" => {
                    let names: Vec<String> = line.args().iter().map(|s| s.to_string()).collect();
                    check_unique(&names, "stack symbol", line.no)?;
                    stack = Some(names);
                }
                "init" => {
                    line.expect_args(1)?;
                    init = Some((line.no, line.words[1].to_string()));
                }
                "start" => {
                    line.expect_args(1)?;
                    start = Some((line.no, line.words[1].to_string()));
                }
                "final" | "finals" => {
                    finals.extend(line.args().iter().map(|s| (line.no, s.to_string())));
                }
                "consume" | "push" => {
                    line.expect_args(4)?;
                    pending.push((line.no, line.words.iter().map(|s| s.to_string()).collect::<Vec<_>>()));
                }
                "pop" => {
                    line.expect_args(3)?;
                    pending.push((line.no, line.words.iter().map(|s| s.to_string()).collect()));
                }
                other => return Err(line.err(format!("unknown directive `{other}`"))),
            }
        }
        let states = states.ok_or_else(|| Error::parse(0, "missing `state`"))?;
        let input: Alphabet = input.ok_or_else(|| Error::parse(0, "missing `input`"))?;
        let stack = stack.ok_or_else(|| Error::parse(0, "missing `stack`"))?;
        let init = match init {
            Some((no, z)) => lookup(&stack, &z, "stack symbol", no)?,
            None => 0,
        };
        let start = match start {
            Some((no, q)) => lookup(&states, &q, "state", no)?,
            None => 0,
        };
        let finals = finals
            .iter()
            .map(|(no, q)| lookup(&states, q, "state", *no))
            .collect::<Result<Vec<_>>>()?;
        let mut moves = Vec::new();
        for (no, w) in pending {
            let st = |s: &str| lookup(&states, s, "state", no);
            let sk = |s: &str| lookup(&stack, s, "stack symbol", no);
            let mv = match w[0].as_str() {
                "consume" => {
                    let sym = if w[2] == "ε" {
                        None
                    } else {
                        Some(
                            input
                                .symbol(&w[2])
                                .ok_or_else(|| Error::parse(no, format!("unknown input symbol `{}`", w[2])))?,
                        )
                    };
                    Move::Consume {
                        from: st(&w[1])?,
                        sym,
                        top: sk(&w[3])?,
                        to: st(&w[4])?,
                    }
                }
                "push" => Move::Push {
                    from: st(&w[1])?,
                    top: sk(&w[2])?,
                    push: sk(&w[3])?,
                    to: st(&w[4])?,
                },
                _ => Move::Pop {
                    from: st(&w[1])?,
                    top: sk(&w[2])?,
                    to: st(&w[3])?,
                },
            };
            moves.push(mv);
        }
        Pda::new(states, input, stack, init, start, &finals, moves)
    }

    pub fn input(&self) -> &Alphabet {
        &self.input
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn stack_symbols(&self) -> &[String] {
        &self.stack
    }

    pub fn moves(&self) -> &[Move] {
        &self.moves
    }

    /// Accepting computations on `x`: runs from the start state with only
    /// the initial symbol on the stack, never popping it, ending after the
    /// whole input in a final state with the stack back to that symbol.
    /// Runs longer than `max_steps` raise `SizeGuard`.
    pub fn count_computations(&self, x: &[Symbol], max_steps: usize) -> Result<Nat> {
        let mut count = Nat::zero();
        let mut todo = vec![(self.start, vec![self.init], 0usize, 0usize)];
        while let Some((q, stack, pos, steps)) = todo.pop() {
            if pos == x.len() && self.finals[q] && stack.len() == 1 {
                count += 1u32;
            }
            let top = *stack.last().expect("base symbol stays");
            for m in &self.moves {
                let next = match *m {
                    Move::Consume { from, sym, top: t, to } if from == q && t == top => match sym {
                        None => Some((to, stack.clone(), pos)),
                        Some(a) if x.get(pos) == Some(&a) => Some((to, stack.clone(), pos + 1)),
                        Some(_) => None,
                    },
                    Move::Push { from, top: t, push, to } if from == q && t == top => {
                        let mut s = stack.clone();
                        s.push(push);
                        Some((to, s, pos))
                    }
                    Move::Pop { from, top: t, to } if from == q && t == top && stack.len() > 1 => {
                        let mut s = stack.clone();
                        s.pop();
                        Some((to, s, pos))
                    }
                    _ => None,
                };
                if let Some((to, s, p)) = next {
                    if steps + 1 > max_steps {
                        return Err(Error::SizeGuard(format!("computation longer than {max_steps} steps")));
                    }
                    todo.push((to, s, p, steps + 1));
                }
            }
        }
        Ok(count)
    }

    pub fn accepts(&self, x: &[Symbol], max_steps: usize) -> Result<bool> {
        Ok(!self.count_computations(x, max_steps)?.is_zero())
    }

    /// Checks `#computations(x) <= D(n)` for every word up to `max_n`.
    pub fn validate_ambiguity(&self, max_n: usize, bound: &PolyBound, max_steps: usize) -> Result<()> {
        for n in 1..=max_n {
            let d = bound.eval(n);
            for x in self.input.words(n) {
                let c = self.count_computations(&x, max_steps)?;
                if c > Nat::from(d) {
                    return Err(Error::AmbiguityExceeded {
                        found: c,
                        bound: d,
                        size: n,
                    });
                }
            }
        }
        Ok(())
    }
}

/// State, stack top and 1-based input position.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SurfaceConfig {
    pub state: usize,
    pub top: usize,
    pub pos: usize,
}

/// `Q x Gamma x {1..n+1}`.
pub fn surface_configs(m: &Pda, n: usize) -> Vec<SurfaceConfig> {
    let mut out = Vec::with_capacity(m.states.len() * m.stack.len() * (n + 1));
    for state in 0..m.states.len() {
        for top in 0..m.stack.len() {
            for pos in 1..=n + 1 {
                out.push(SurfaceConfig { state, top, pos });
            }
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Kind {
    Single,
    Bracket,
    Split,
}

const KINDS: [Kind; 3] = [Kind::Single, Kind::Bracket, Kind::Split];

impl Kind {
    fn tag(self) -> char {
        match self {
            Kind::Single => 's',
            Kind::Bracket => 'b',
            Kind::Split => 'z',
        }
    }
}

/// Sizes of the grammar along the pipeline.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GrammarStats {
    pub raw_vars: usize,
    pub raw_rules: usize,
    pub trimmed_vars: usize,
    pub trimmed_rules: usize,
    pub cnf_vars: usize,
    pub cnf_rules: usize,
}

impl fmt::Display for GrammarStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "raw {}/{} trimmed {}/{} cnf {}/{} (variables/rules)",
            self.raw_vars, self.raw_rules, self.trimmed_vars, self.trimmed_rules, self.cnf_vars, self.cnf_rules
        )
    }
}

pub struct SliceGrammar {
    pub n: usize,
    /// Every nonterminal of the construction.
    pub raw: Grammar,
    /// Useful nonterminals only.
    pub trimmed: Grammar,
    /// `trimmed` in Chomsky normal form, e-rules dropped.
    pub cnf: CnfGrammar,
    pub stats: GrammarStats,
}

struct Builder<'a> {
    m: &'a Pda,
    n: usize,
    names: Vec<String>,
    index: HashMap<(SurfaceConfig, SurfaceConfig, Kind), usize>,
    rules: Vec<Rule>,
}

impl Builder<'_> {
    fn var(&mut self, c1: SurfaceConfig, c2: SurfaceConfig, k: Kind) -> usize {
        if let Some(&v) = self.index.get(&(c1, c2, k)) {
            return v;
        }
        let (m, n) = (self.m, self.n);
        let _ = n;
        let name = format!(
            "[{},{},{};{},{},{};{}]",
            m.states[c1.state],
            m.stack[c1.top],
            c1.pos,
            m.states[c2.state],
            m.stack[c2.top],
            c2.pos,
            k.tag()
        );
        self.names.push(name);
        let v = self.names.len() - 1;
        self.index.insert((c1, c2, k), v);
        v
    }

    fn rule(&mut self, lhs: usize, rhs: Vec<GSym>) {
        self.rules.push(Rule { lhs, rhs });
    }
}

/// The grammar `G_n(M)`: its length-`n` words are exactly the accepted
/// words of length `n`.
pub fn build_slice_grammar(m: &Pda, n: usize) -> Result<SliceGrammar> {
    if n == 0 {
        return Err(Error::invalid("slice grammars start at length 1"));
    }
    let mut b = Builder {
        m,
        n,
        names: vec!["S".to_string()],
        index: HashMap::new(),
        rules: Vec::new(),
    };
    let (nq, ng) = (m.states.len(), m.stack.len());
    let cfg = |state, top, pos| SurfaceConfig { state, top, pos };
    // every pair at equal stack top with non-decreasing position
    for top in 0..ng {
        for q1 in 0..nq {
            for j1 in 1..=n + 1 {
                for q2 in 0..nq {
                    for j2 in j1..=n + 1 {
                        for k in KINDS {
                            b.var(cfg(q1, top, j1), cfg(q2, top, j2), k);
                        }
                    }
                }
            }
        }
    }
    // (1) single moves
    for mv in &m.moves {
        if let Move::Consume { from, sym, top, to } = *mv {
            let step = usize::from(sym.is_some());
            for j in 1..=n + 1 - step {
                let v = b.var(cfg(from, top, j), cfg(to, top, j + step), Kind::Single);
                b.rule(v, sym.map(GSym::Term).into_iter().collect());
            }
        }
    }
    // (2) split at the first return to the base height
    for top in 0..ng {
        for q1 in 0..nq {
            for q2 in 0..nq {
                for qd in 0..nq {
                    for j1 in 1..=n + 1 {
                        for jd in j1..=n + 1 {
                            for j2 in jd..=n + 1 {
                                let (c1, d, c2) = (cfg(q1, top, j1), cfg(qd, top, jd), cfg(q2, top, j2));
                                let lhs = b.var(c1, c2, Kind::Split);
                                for first in [Kind::Single, Kind::Bracket] {
                                    for second in KINDS {
                                        let x = b.var(c1, d, first);
                                        let y = b.var(d, c2, second);
                                        b.rule(lhs, vec![GSym::Var(x), GSym::Var(y)]);
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    // (3) push ... pop of the same symbol
    for push in &m.moves {
        let Move::Push {
            from: q1,
            top: t1,
            push: g,
            to: p1,
        } = *push
        else {
            continue;
        };
        for pop in &m.moves {
            let Move::Pop {
                from: p2,
                top: g2,
                to: q2,
            } = *pop
            else {
                continue;
            };
            if g2 != g {
                continue;
            }
            for j1 in 1..=n + 1 {
                for j2 in j1..=n + 1 {
                    let (c1, c2) = (cfg(q1, t1, j1), cfg(q2, t1, j2));
                    let (d1, d2) = (cfg(p1, g, j1), cfg(p2, g, j2));
                    let lhs = b.var(c1, c2, Kind::Bracket);
                    for k in KINDS {
                        let inner = b.var(d1, d2, k);
                        b.rule(lhs, vec![GSym::Var(inner)]);
                    }
                    if d1 == d2 {
                        b.rule(lhs, Vec::new());
                    }
                }
            }
        }
    }
    let c_in = cfg(m.start, m.init, 1);
    for f in (0..nq).filter(|&q| m.finals[q]) {
        for k in KINDS {
            let v = b.var(c_in, cfg(f, m.init, n + 1), k);
            b.rule(0, vec![GSym::Var(v)]);
        }
    }
    let raw = Grammar::new(b.names, m.input.clone(), 0, b.rules)?;
    let trimmed = raw.trim();
    let cnf = trimmed.to_cnf(EpsilonPolicy::Drop)?;
    let stats = GrammarStats {
        raw_vars: raw.vars().len(),
        raw_rules: raw.rules().len(),
        trimmed_vars: trimmed.vars().len(),
        trimmed_rules: trimmed.rules().len(),
        cnf_vars: cnf.vars().len(),
        cnf_rules: cnf.rule_count(),
    };
    Ok(SliceGrammar {
        n,
        raw,
        trimmed,
        cnf,
        stats,
    })
}

/// The length-`n` slice of `L(M)` as a derivation-tree description.
pub fn pda_description(m: &Pda, n: usize, bound: PolyBound) -> Result<(SliceGrammar, CflDescription)> {
    let g = build_slice_grammar(m, n)?;
    let desc = CflDescription::new(g.cnf.clone(), bound);
    Ok((g, desc))
}

pub fn pda_sampler(m: &Pda, n: usize, bound: PolyBound, src: &mut CoinSource) -> Result<SampleReport<Word>> {
    let (_, desc) = pda_description(m, n, bound)?;
    sample_described(&desc, n, src)
}

pub fn pda_census_estimate(
    m: &Pda,
    n: usize,
    bound: PolyBound,
    epsilon: &Rat,
    src: &mut CoinSource,
) -> Result<SampleReport<Rat>> {
    let (_, desc) = pda_description(m, n, bound)?;
    estimate_census(&desc, n, epsilon, src)
}
