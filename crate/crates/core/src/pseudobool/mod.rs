//! Pseudo-boolean optimization over `{0,1}^n` with objectives given as
//! arithmetic circuits.
//!
//! For a multilinear objective `G` the conditional expectation of `G`
//! under uniform completions of a prefix `b_1..b_k` is just
//! `G(b_1, .., b_k, 1/2, .., 1/2)`; the derandomizer fixes one bit at a
//! time on that basis and local search finishes the job.

mod circuit;
mod perm;

use std::str::FromStr;

use num_traits::{One, Zero};

pub use circuit::{msf_coefficient, Circuit, CircuitBuilder, Monomial, Node, Polynomial};
pub use perm::{
    brute_permanent, fraction_parts, msf_perm_circuit, perm_circuit, permanent, Matrix01, PermMethod, PERM_MAX_N,
};

use crate::numutil::{ceil_log2, check_probability};
use crate::text::lines;
use crate::{CoinSource, Error, Int, Rat, Result};

/// Largest `n` for exhaustive checks.
pub const BRUTE_MAX_N: usize = 20;
/// Largest neighborhood enumerated by local search.
pub const MAX_NEIGHBORHOOD: usize = 1 << 22;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Goal {
    Max,
    Min,
}

impl Goal {
    /// Is `a` strictly better than `b`?
    pub fn better<T: PartialOrd>(self, a: &T, b: &T) -> bool {
        match self {
            Goal::Max => a > b,
            Goal::Min => a < b,
        }
    }
}

impl FromStr for Goal {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "max" => Ok(Goal::Max),
            "min" => Ok(Goal::Min),
            other => Err(Error::invalid(format!("goal must be max or min, got `{other}`"))),
        }
    }
}

pub type Assignment = Vec<bool>;

/// An objective on `{0,1}^n`. The circuit is expected to be multilinear;
/// see [`spot_check_multilinear`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PbProblem {
    objective: Circuit,
    goal: Goal,
}

impl PbProblem {
    pub fn new(objective: Circuit, goal: Goal) -> Self {
        PbProblem { objective, goal }
    }

    /// The circuit format plus an optional `goal max|min` line.
    pub fn parse(text: &str) -> Result<Self> {
        let mut goal = Goal::Max;
        let mut rest = String::with_capacity(text.len());
        let goal_lines: Vec<usize> = lines(text).filter(|l| l.key() == "goal").map(|l| l.no).collect();
        for (i, raw) in text.lines().enumerate() {
            if goal_lines.contains(&(i + 1)) {
                let words: Vec<&str> = raw.split('#').next().unwrap_or("").split_whitespace().collect();
                if words.len() != 2 {
                    return Err(Error::parse(i + 1, "expected `goal max` or `goal min`"));
                }
                goal = words[1]
                    .parse()
                    .map_err(|e: Error| Error::parse(i + 1, e.to_string()))?;
            } else {
                rest.push_str(raw);
            }
            rest.push('\n');
        }
        Ok(PbProblem::new(Circuit::parse(&rest)?, goal))
    }

    pub fn vars(&self) -> usize {
        self.objective.inputs()
    }

    pub fn objective(&self) -> &Circuit {
        &self.objective
    }

    pub fn goal(&self) -> Goal {
        self.goal
    }

    pub fn value(&self, x: &[bool]) -> Int {
        let point: Vec<Int> = x.iter().map(|&b| Int::from(b as u8)).collect();
        self.objective.eval(&point)
    }
}

/// `E[g | b_1..b_k] = G(b_1, .., b_k, 1/2, .., 1/2)`.
pub fn cond_expectation(p: &PbProblem, prefix: &[bool]) -> Rat {
    assert!(prefix.len() <= p.vars(), "prefix longer than the variable count");
    let half = Rat::new(Int::one(), Int::from(2));
    let point: Vec<Rat> = prefix
        .iter()
        .map(|&b| if b { Rat::one() } else { Rat::zero() })
        .chain(std::iter::repeat_n(half, p.vars() - prefix.len()))
        .collect();
    p.objective.eval(&point)
}

fn all_assignments(n: usize) -> Result<impl Iterator<Item = Assignment>> {
    if n > BRUTE_MAX_N {
        return Err(Error::SizeGuard(format!("{n} variables above {BRUTE_MAX_N}")));
    }
    Ok((0u64..1 << n).map(move |code| (0..n).map(|i| code >> i & 1 == 1).collect()))
}

/// The average of `g` over all completions of `prefix`.
pub fn brute_expectation(p: &PbProblem, prefix: &[bool]) -> Result<Rat> {
    let rest = p.vars() - prefix.len();
    let mut total = Int::zero();
    for tail in all_assignments(rest)? {
        let x: Assignment = prefix.iter().copied().chain(tail).collect();
        total += p.value(&x);
    }
    Ok(Rat::new(total, Int::one() << rest))
}

/// A best assignment (least in the counting order among ties) and its value.
pub fn brute_optimum(p: &PbProblem) -> Result<(Assignment, Int)> {
    let mut best: Option<(Assignment, Int)> = None;
    for x in all_assignments(p.vars())? {
        let v = p.value(&x);
        if best.as_ref().is_none_or(|(_, b)| p.goal.better(&v, b)) {
            best = Some((x, v));
        }
    }
    Ok(best.expect("at least the empty assignment"))
}

/// Compares [`cond_expectation`] with [`brute_expectation`] at `probes`
/// random prefixes. Objectives that are not multilinear are caught with
/// good probability but not certainly.
pub fn spot_check_multilinear(p: &PbProblem, probes: usize, src: &mut CoinSource) -> Result<()> {
    let n = p.vars();
    if n > 12 {
        return Err(Error::SizeGuard(format!("spot check limited to 12 variables, got {n}")));
    }
    for _ in 0..probes {
        let k = (src.draw_u64(4) as usize) % (n + 1);
        let prefix: Assignment = (0..k).map(|_| src.next_bit()).collect();
        let fast = cond_expectation(p, &prefix);
        let slow = brute_expectation(p, &prefix)?;
        if fast != slow {
            return Err(Error::invalid(format!(
                "objective is not multilinear: prefix {} gives {fast} against {slow}",
                bits(&prefix)
            )));
        }
    }
    Ok(())
}

pub fn bits(x: &[bool]) -> String {
    x.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

/// Fixes `x_1, x_2, ..` in turn to the value with the better conditional
/// expectation, preferring 0 on ties.
pub fn derandomize(p: &PbProblem) -> Assignment {
    let mut x = Vec::with_capacity(p.vars());
    for _ in 0..p.vars() {
        x.push(false);
        let zero = cond_expectation(p, &x);
        x.pop();
        x.push(true);
        let one = cond_expectation(p, &x);
        x.pop();
        x.push(p.goal.better(&one, &zero));
    }
    x
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchReport {
    pub assignment: Assignment,
    pub value: Int,
    pub draws: u64,
}

/// `N = ceil(log2(1/delta) / (2 epsilon^2))`, with `ceil(log2)` in place of
/// `log2`.
pub fn random_search_draws(epsilon: &Rat, delta: &Rat) -> Result<u64> {
    check_probability(delta, "delta")?;
    check_probability(epsilon, "epsilon")?;
    let l = Rat::from_integer(ceil_log2(&delta.recip()).into());
    let n = (l / (Rat::from_integer(Int::from(2)) * epsilon * epsilon))
        .ceil()
        .to_integer();
    u64::try_from(n).map_err(|_| Error::SizeGuard("draw count overflows".into()))
}

/// Best of `N` uniform assignments, `N` from [`random_search_draws`].
pub fn random_search(p: &PbProblem, epsilon: &Rat, delta: &Rat, src: &mut CoinSource) -> Result<SearchReport> {
    let draws = random_search_draws(epsilon, delta)?;
    random_search_n(p, draws.max(1), src)
}

/// Best of `draws` uniform assignments; the first of equal values wins.
pub fn random_search_n(p: &PbProblem, draws: u64, src: &mut CoinSource) -> Result<SearchReport> {
    if draws == 0 {
        return Err(Error::invalid("random search needs at least one draw"));
    }
    let mut best: Option<(Assignment, Int)> = None;
    for _ in 0..draws {
        let x: Assignment = (0..p.vars()).map(|_| src.next_bit()).collect();
        let v = p.value(&x);
        if best.as_ref().is_none_or(|(_, b)| p.goal.better(&v, b)) {
            best = Some((x, v));
        }
    }
    let (assignment, value) = best.expect("draws >= 1");
    Ok(SearchReport {
        assignment,
        value,
        draws,
    })
}

/// Nonempty subsets of `0..n` of size at most `h`, in lexicographic order
/// of their sorted index lists.
pub fn flip_sets(n: usize, h: usize) -> Result<Vec<Vec<usize>>> {
    fn go(n: usize, h: usize, from: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) -> Result<()> {
        for i in from..n {
            cur.push(i);
            out.push(cur.clone());
            if out.len() > MAX_NEIGHBORHOOD {
                return Err(Error::SizeGuard(format!("neighborhood above {MAX_NEIGHBORHOOD}")));
            }
            if cur.len() < h {
                go(n, h, i + 1, cur, out)?;
            }
            cur.pop();
        }
        Ok(())
    }
    let mut out = Vec::new();
    go(n, h, 0, &mut Vec::new(), &mut out)?;
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalSearchReport {
    pub assignment: Assignment,
    pub value: Int,
    /// Objective after each accepted move, starting with the start value.
    pub trajectory: Vec<Int>,
}

/// First-improvement local search over the Hamming ball of radius `h`.
pub fn local_search(p: &PbProblem, h: usize, start: &[bool]) -> Result<LocalSearchReport> {
    if h == 0 {
        return Err(Error::invalid("the neighborhood radius must be at least 1"));
    }
    if start.len() != p.vars() {
        return Err(Error::invalid(format!(
            "start has {} bits for {} variables",
            start.len(),
            p.vars()
        )));
    }
    let sets = flip_sets(p.vars(), h)?;
    let mut x = start.to_vec();
    let mut v = p.value(&x);
    let mut trajectory = vec![v.clone()];
    'climb: loop {
        for set in &sets {
            let mut y = x.clone();
            for &i in set {
                y[i] = !y[i];
            }
            let w = p.value(&y);
            if p.goal.better(&w, &v) {
                x = y;
                v = w;
                trajectory.push(v.clone());
                continue 'climb;
            }
        }
        break;
    }
    Ok(LocalSearchReport {
        assignment: x,
        value: v,
        trajectory,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EgReport {
    pub expectation: Rat,
    pub derandomized: Assignment,
    pub derandomized_value: Int,
    pub result: LocalSearchReport,
}

/// Derandomized start followed by local search.
pub fn eg_solve(p: &PbProblem, h: usize) -> Result<EgReport> {
    let derandomized = derandomize(p);
    let derandomized_value = p.value(&derandomized);
    let result = local_search(p, h, &derandomized)?;
    Ok(EgReport {
        expectation: cond_expectation(p, &[]),
        derandomized,
        derandomized_value,
        result,
    })
}

/// Number of satisfied clauses: `sum_j 1 - prod_{l in C_j} (1 - l)`.
/// Literals are signed 1-based variable indices; repeated literals are
/// merged and a clause with `x` and `-x` contributes the constant 1, which
/// keeps the circuit multilinear.
pub fn max_sat(n: usize, clauses: &[Vec<i64>]) -> Result<PbProblem> {
    let mut b = CircuitBuilder::new(n);
    let mut terms = Vec::new();
    for (j, clause) in clauses.iter().enumerate() {
        if clause.is_empty() {
            return Err(Error::invalid(format!("clause {} is empty", j + 1)));
        }
        let mut lits = clause.clone();
        lits.sort_unstable();
        lits.dedup();
        for &l in &lits {
            if l == 0 || l.unsigned_abs() as usize > n {
                return Err(Error::invalid(format!("literal {l} outside 1..={n}")));
            }
        }
        if lits.iter().any(|l| lits.contains(&-l)) {
            terms.push(b.constant(1));
            continue;
        }
        let falsified = lits
            .iter()
            .map(|&l| {
                let x = b.input(l.unsigned_abs() as usize - 1);
                if l > 0 {
                    b.one_minus(x)
                } else {
                    x
                }
            })
            .collect();
        let all_false = b.mul(falsified);
        terms.push(b.one_minus(all_false));
    }
    let out = b.add(terms);
    Ok(PbProblem::new(b.finish(out), Goal::Max))
}

/// Cut size: `sum_{uv} x_u + x_v - 2 x_u x_v`, vertices 0-based.
pub fn max_cut(n: usize, edges: &[(usize, usize)]) -> Result<PbProblem> {
    let mut b = CircuitBuilder::new(n);
    let mut terms = Vec::new();
    for &(u, v) in edges {
        if u >= n || v >= n || u == v {
            return Err(Error::invalid(format!("edge ({u}, {v}) is a loop or out of range")));
        }
        let (xu, xv) = (b.input(u), b.input(v));
        let prod = b.mul(vec![xu, xv]);
        let minus = b.neg(prod);
        terms.extend([xu, xv, minus, minus]);
    }
    let out = b.add(terms);
    Ok(PbProblem::new(b.finish(out), Goal::Max))
}

/// Header `n m`, then `m` clauses, one per line, as signed 1-based
/// literals.
pub fn parse_max_sat(text: &str) -> Result<PbProblem> {
    let (n, rows) = parse_rows(text, "clause")?;
    let clauses = rows
        .iter()
        .map(|(no, words)| {
            words
                .iter()
                .map(|w| {
                    w.parse::<i64>()
                        .map_err(|_| Error::parse(*no, format!("bad literal `{w}`")))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    for ((no, _), c) in rows.iter().zip(&clauses) {
        max_sat(n, std::slice::from_ref(c)).map_err(|e| Error::parse(*no, e.to_string()))?;
    }
    max_sat(n, &clauses)
}

/// Header `n m`, then `m` lines `u v` with 1-based vertices.
pub fn parse_max_cut(text: &str) -> Result<PbProblem> {
    let (n, rows) = parse_rows(text, "edge")?;
    let mut edges = Vec::new();
    for (no, words) in &rows {
        if words.len() != 2 {
            return Err(Error::parse(*no, "an edge is `u v`"));
        }
        let vertex = |w: &str| -> Result<usize> {
            match w.parse::<usize>() {
                Ok(k) if (1..=n).contains(&k) => Ok(k - 1),
                _ => Err(Error::parse(*no, format!("vertex `{w}` outside 1..={n}"))),
            }
        };
        let (u, v) = (vertex(&words[0])?, vertex(&words[1])?);
        if u == v {
            return Err(Error::parse(*no, "loops are not allowed"));
        }
        edges.push((u, v));
    }
    max_cut(n, &edges)
}

type Rows = Vec<(usize, Vec<String>)>;

fn parse_rows(text: &str, what: &str) -> Result<(usize, Rows)> {
    let mut it = lines(text);
    let head = it.next().ok_or_else(|| Error::parse(1, "missing `n m` header"))?;
    if head.words.len() != 2 {
        return Err(head.err("header must be `n m`"));
    }
    let n: usize = head.parse_at(0, "variable count")?;
    let m: usize = head.parse_at(1, &format!("{what} count"))?;
    let rows: Rows = it
        .map(|l| (l.no, l.words.iter().map(|w| w.to_string()).collect()))
        .collect();
    if rows.len() != m {
        return Err(Error::parse(
            head.no,
            format!("header announces {m} {what}s, found {}", rows.len()),
        ));
    }
    Ok((n, rows))
}
