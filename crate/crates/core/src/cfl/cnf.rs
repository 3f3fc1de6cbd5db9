use std::fmt;

use super::grammar::{GSym, Grammar, Rule};
use crate::alphabet::Alphabet;
use crate::{Error, Result, Symbol};

/// Grammar in Chomsky normal form. Variables are ordered by index and
/// terminals by the alphabet; each `P_A` and `P1_A` is kept sorted, which
/// fixes the order the samplers use.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CnfGrammar {
    vars: Vec<String>,
    terminals: Alphabet,
    start: usize,
    binary: Vec<Vec<(usize, usize)>>,
    unary: Vec<Vec<Symbol>>,
}

impl CnfGrammar {
    pub fn new(
        vars: Vec<String>,
        terminals: Alphabet,
        start: usize,
        binary: &[(usize, usize, usize)],
        unary: &[(usize, Symbol)],
    ) -> Result<Self> {
        let n = vars.len();
        if start >= n {
            return Err(Error::invalid("start variable out of range"));
        }
        let mut bin = vec![Vec::new(); n];
        for &(a, b, c) in binary {
            if a >= n || b >= n || c >= n {
                return Err(Error::invalid("binary rule out of range"));
            }
            bin[a].push((b, c));
        }
        let mut un = vec![Vec::new(); n];
        for &(a, s) in unary {
            if a >= n || s >= terminals.len() {
                return Err(Error::invalid("terminal rule out of range"));
            }
            un[a].push(s);
        }
        for list in &mut bin {
            list.sort_unstable();
            list.dedup();
        }
        for list in &mut un {
            list.sort_unstable();
            list.dedup();
        }
        Ok(CnfGrammar {
            vars,
            terminals,
            start,
            binary: bin,
            unary: un,
        })
    }

    /// The general grammar format; anything not already in CNF is converted
    /// (and a grammar deriving the empty word is rejected).
    pub fn parse(text: &str) -> Result<Self> {
        Grammar::parse(text)?.to_cnf(super::EpsilonPolicy::Reject)
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn var_name(&self, a: usize) -> &str {
        &self.vars[a]
    }

    pub fn terminals(&self) -> &Alphabet {
        &self.terminals
    }

    pub fn start(&self) -> usize {
        self.start
    }

    /// `P_A`: the pairs `(B, C)` of rules `A -> B C`.
    pub fn binary(&self, a: usize) -> &[(usize, usize)] {
        &self.binary[a]
    }

    /// `P1_A`: the terminals `x` of rules `A -> x`.
    pub fn unary(&self, a: usize) -> &[Symbol] {
        &self.unary[a]
    }

    pub fn rule_count(&self) -> usize {
        self.binary.iter().map(Vec::len).sum::<usize>() + self.unary.iter().map(Vec::len).sum::<usize>()
    }

    pub fn to_grammar(&self) -> Grammar {
        let mut rules = Vec::new();
        for a in 0..self.vars.len() {
            for &(b, c) in &self.binary[a] {
                rules.push(Rule {
                    lhs: a,
                    rhs: vec![GSym::Var(b), GSym::Var(c)],
                });
            }
            for &s in &self.unary[a] {
                rules.push(Rule {
                    lhs: a,
                    rhs: vec![GSym::Term(s)],
                });
            }
        }
        Grammar::new(self.vars.clone(), self.terminals.clone(), self.start, rules).expect("a CNF grammar is a grammar")
    }

    /// Variables deriving no terminal word.
    pub fn unproductive(&self) -> Vec<usize> {
        let yields = self.to_grammar().min_yield();
        (0..self.vars.len()).filter(|&a| yields[a].is_none()).collect()
    }
}

impl fmt::Display for CnfGrammar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_grammar())
    }
}
