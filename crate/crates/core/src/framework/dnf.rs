use std::fmt;

use num_traits::{One, Zero};

use super::Description;
use crate::numutil::{gen_uniform, rat};
use crate::text::lines;
use crate::{CoinSource, Error, Nat, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Literal {
    /// 0-based variable index.
    pub var: usize,
    pub positive: bool,
}

impl Literal {
    pub fn holds(&self, assignment: &[bool]) -> bool {
        assignment[self.var] == self.positive
    }
}

/// A formula in disjunctive normal form over `vars` variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DnfFormula {
    vars: usize,
    clauses: Vec<Vec<Literal>>,
}

impl DnfFormula {
    /// Clauses are given as signed 1-based variable indices.
    pub fn new(vars: usize, clauses: &[Vec<i64>]) -> Result<Self> {
        let mut out = Vec::with_capacity(clauses.len());
        for (j, clause) in clauses.iter().enumerate() {
            out.push(Self::clause(vars, clause).map_err(|e| Error::invalid(format!("clause {}: {e}", j + 1)))?);
        }
        Ok(DnfFormula { vars, clauses: out })
    }

    fn clause(vars: usize, lits: &[i64]) -> std::result::Result<Vec<Literal>, String> {
        if lits.is_empty() {
            return Err("empty clause".into());
        }
        let mut clause: Vec<Literal> = Vec::new();
        for &l in lits {
            let var = l.unsigned_abs() as usize;
            if l == 0 || var > vars {
                return Err(format!("literal {l} out of range 1..{vars}"));
            }
            let lit = Literal {
                var: var - 1,
                positive: l > 0,
            };
            if clause.iter().any(|c| c.var == lit.var && c.positive != lit.positive) {
                return Err(format!("variable {var} occurs with both signs"));
            }
            if !clause.contains(&lit) {
                clause.push(lit);
            }
        }
        clause.sort();
        Ok(clause)
    }

    /// Text format: a header `n m`, then `m` lines of signed variable indices.
    pub fn parse(text: &str) -> Result<Self> {
        let mut it = lines(text);
        let head = it.next().ok_or_else(|| Error::parse(1, "missing `n m` header"))?;
        head.expect_args(1).map_err(|_| head.err("header must be `n m`"))?;
        let vars: usize = head.parse_at(0, "variable count")?;
        let m: usize = head.parse_at(1, "clause count")?;
        let mut clauses = Vec::new();
        for line in it {
            let lits = (0..line.words.len())
                .map(|i| line.parse_at::<i64>(i, "literal"))
                .collect::<Result<Vec<_>>>()?;
            clauses.push(Self::clause(vars, &lits).map_err(|e| line.err(e))?);
        }
        if clauses.len() != m {
            return Err(Error::parse(
                head.no,
                format!("header announces {m} clauses, found {}", clauses.len()),
            ));
        }
        Ok(DnfFormula { vars, clauses })
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn clauses(&self) -> &[Vec<Literal>] {
        &self.clauses
    }

    pub fn satisfies(&self, clause: usize, assignment: &[bool]) -> bool {
        self.clauses[clause].iter().all(|l| l.holds(assignment))
    }

    pub fn eval(&self, assignment: &[bool]) -> bool {
        (0..self.clauses.len()).any(|j| self.satisfies(j, assignment))
    }

    /// Number of assignments satisfying clause `j`.
    pub fn clause_weight(&self, j: usize) -> Nat {
        Nat::one() << (self.vars - self.clauses[j].len())
    }
}

impl fmt::Display for DnfFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {}", self.vars, self.clauses.len())?;
        for c in &self.clauses {
            let lits: Vec<String> = c
                .iter()
                .map(|l| {
                    let v = l.var as i64 + 1;
                    (if l.positive { v } else { -v }).to_string()
                })
                .collect();
            writeln!(f, "{}", lits.join(" "))?;
        }
        Ok(())
    }
}

/// Satisfying assignments described by (clause, assignment satisfying it)
/// pairs; `d(t)` is the number of clauses `t` satisfies.
#[derive(Clone, Debug)]
pub struct DnfDescription {
    formula: DnfFormula,
}

impl DnfDescription {
    pub fn new(formula: DnfFormula) -> Result<Self> {
        if formula.clauses.is_empty() {
            return Err(Error::EmptyLanguage);
        }
        Ok(DnfDescription { formula })
    }

    pub fn formula(&self) -> &DnfFormula {
        &self.formula
    }

    fn census(&self) -> Nat {
        (0..self.formula.clauses.len())
            .map(|j| self.formula.clause_weight(j))
            .sum()
    }
}

impl Description for DnfDescription {
    type Source = (usize, Vec<bool>);
    type Target = Vec<bool>;

    fn sample_source(&self, n: usize, src: &mut CoinSource) -> Result<Option<Self::Source>> {
        if n != self.formula.vars {
            return Err(Error::EmptySlice(n));
        }
        let Some(mut r) = gen_uniform(src, &self.census(), &rat(1, 4))? else {
            return Ok(None);
        };
        let mut j = 0;
        loop {
            let w = self.formula.clause_weight(j);
            if r <= w {
                break;
            }
            r -= w;
            j += 1;
        }
        let mut assignment = vec![false; n];
        let mut fixed = vec![false; n];
        for l in &self.formula.clauses[j] {
            assignment[l.var] = l.positive;
            fixed[l.var] = true;
        }
        for v in 0..n {
            if !fixed[v] {
                assignment[v] = src.next_bit();
            }
        }
        Ok(Some((j, assignment)))
    }

    fn project(&self, t: &Self::Source) -> Vec<bool> {
        t.1.clone()
    }

    fn ambiguity(&self, s: &Vec<bool>) -> Result<Nat> {
        if s.len() != self.formula.vars {
            return Err(Error::invalid("assignment length differs from the variable count"));
        }
        let d = (0..self.formula.clauses.len())
            .filter(|&j| self.formula.satisfies(j, s))
            .count();
        Ok(Nat::from(d))
    }

    fn bound(&self, _n: usize) -> u64 {
        self.formula.clauses.len() as u64
    }

    fn source_census(&self, n: usize) -> Option<Nat> {
        Some(if n == self.formula.vars {
            self.census()
        } else {
            Nat::zero()
        })
    }

    fn enumerate_source(&self, n: usize) -> Option<Vec<Self::Source>> {
        if n != self.formula.vars {
            return Some(Vec::new());
        }
        if n > 20 {
            return None;
        }
        let mut out = Vec::new();
        for mask in 0u32..(1 << n) {
            let a: Vec<bool> = (0..n).map(|v| mask >> v & 1 == 1).collect();
            for j in 0..self.formula.clauses.len() {
                if self.formula.satisfies(j, &a) {
                    out.push((j, a.clone()));
                }
            }
        }
        Some(out)
    }
}
