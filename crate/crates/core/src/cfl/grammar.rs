//! General context-free grammars and the conversion to Chomsky normal form.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::Zero;

use super::CnfGrammar;
use crate::alphabet::Alphabet;
use crate::text::{check_unique, lines, lookup};
use crate::{Error, Nat, Result, Symbol};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GSym {
    Var(usize),
    Term(Symbol),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Rule {
    pub lhs: usize,
    pub rhs: Vec<GSym>,
}

/// What `to_cnf` does when the empty word is in the language.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EpsilonPolicy {
    Reject,
    /// Convert `L \ {e}` instead.
    Drop,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Grammar {
    vars: Vec<String>,
    terminals: Alphabet,
    start: usize,
    rules: Vec<Rule>,
}

impl Grammar {
    pub fn new(vars: Vec<String>, terminals: Alphabet, start: usize, rules: Vec<Rule>) -> Result<Self> {
        check_unique(&vars, "variable", 0).map_err(|_| Error::invalid("duplicate variable"))?;
        if let Some(v) = vars.iter().find(|v| terminals.symbol(v).is_some()) {
            return Err(Error::invalid(format!("`{v}` is both a variable and a terminal")));
        }
        if start >= vars.len() {
            return Err(Error::invalid("start variable out of range"));
        }
        for r in &rules {
            let ok = r.lhs < vars.len()
                && r.rhs.iter().all(|s| match *s {
                    GSym::Var(v) => v < vars.len(),
                    GSym::Term(a) => a < terminals.len(),
                });
            if !ok {
                return Err(Error::invalid("rule refers to an unknown symbol"));
            }
        }
        Ok(Grammar {
            vars,
            terminals,
            start,
            rules,
        })
    }

    /// `var S A B`, `term a b`, `start S` and rules `A -> B C | a | ε`
    /// (an empty right side is also `ε`). Tokens are whitespace separated.
    pub fn parse(text: &str) -> Result<Self> {
        let mut vars: Option<Vec<String>> = None;
        let mut terms: Option<Alphabet> = None;
        let mut start = None;
        let mut pending = Vec::new();
        for line in lines(text) {
            if line.words.get(1) == Some(&"->") {
                pending.push((line.no, line.words.clone()));
                continue;
            }
            match line.key() {
                "var" => {
                    let names: Vec<String> = line.args().iter().map(|s| s.to_string()).collect();
                    if names.is_empty() {
                        return Err(line.err("no variables"));
                    }
                    check_unique(&names, "variable", line.no)?;
                    vars = Some(names);
                }
                "term" => {
                    terms = Some(Alphabet::new(line.args().iter().copied()).map_err(|e| line.err(e.to_string()))?);
                }
                "start" => {
                    line.expect_args(1)?;
                    start = Some((line.no, line.words[1].to_string()));
                }
                other => return Err(line.err(format!("unknown directive `{other}`"))),
            }
        }
        let vars = vars.ok_or_else(|| Error::parse(0, "missing `var`"))?;
        let terms = terms.ok_or_else(|| Error::parse(0, "missing `term`"))?;
        if let Some(v) = vars.iter().find(|v| terms.symbol(v).is_some()) {
            return Err(Error::parse(0, format!("`{v}` is both a variable and a terminal")));
        }
        let start = match start {
            Some((no, name)) => lookup(&vars, &name, "variable", no)?,
            None => 0,
        };
        let mut rules = Vec::new();
        for (no, words) in pending {
            let lhs = lookup(&vars, words[0], "variable", no)?;
            for alt in words[2..].split(|w| *w == "|") {
                let mut rhs = Vec::new();
                for &tok in alt {
                    if tok == "ε" {
                        if alt.len() != 1 {
                            return Err(Error::parse(no, "`ε` must stand alone"));
                        }
                        continue;
                    }
                    if let Some(v) = vars.iter().position(|v| v == tok) {
                        rhs.push(GSym::Var(v));
                    } else if let Some(a) = terms.symbol(tok) {
                        rhs.push(GSym::Term(a));
                    } else {
                        return Err(Error::parse(no, format!("unknown symbol `{tok}`")));
                    }
                }
                rules.push(Rule { lhs, rhs });
            }
        }
        Grammar::new(vars, terms, start, rules)
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn terminals(&self) -> &Alphabet {
        &self.terminals
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn nullable(&self) -> Vec<bool> {
        let mut null = vec![false; self.vars.len()];
        let mut changed = true;
        while changed {
            changed = false;
            for r in &self.rules {
                if !null[r.lhs] && r.rhs.iter().all(|s| matches!(*s, GSym::Var(v) if null[v])) {
                    null[r.lhs] = true;
                    changed = true;
                }
            }
        }
        null
    }

    /// Length of the shortest terminal word each variable derives, `None`
    /// when it derives none.
    pub fn min_yield(&self) -> Vec<Option<usize>> {
        let mut best: Vec<Option<usize>> = vec![None; self.vars.len()];
        let mut changed = true;
        while changed {
            changed = false;
            for r in &self.rules {
                let len = r.rhs.iter().try_fold(0usize, |acc, s| match *s {
                    GSym::Term(_) => Some(acc + 1),
                    GSym::Var(v) => best[v].map(|l| acc + l),
                });
                if let Some(l) = len {
                    if best[r.lhs].is_none_or(|b| l < b) {
                        best[r.lhs] = Some(l);
                        changed = true;
                    }
                }
            }
        }
        best
    }

    fn reachable(&self, productive: &[bool]) -> Vec<bool> {
        let mut seen = vec![false; self.vars.len()];
        let mut stack = vec![self.start];
        seen[self.start] = true;
        while let Some(a) = stack.pop() {
            for r in self.rules.iter().filter(|r| r.lhs == a) {
                if !rule_productive(r, productive) {
                    continue;
                }
                for s in &r.rhs {
                    if let GSym::Var(v) = *s {
                        if !seen[v] {
                            seen[v] = true;
                            stack.push(v);
                        }
                    }
                }
            }
        }
        seen
    }

    /// Variables that occur in some derivation of a terminal word.
    pub fn useful(&self) -> Vec<bool> {
        let productive: Vec<bool> = self.min_yield().iter().map(Option::is_some).collect();
        let reach = self.reachable(&productive);
        productive.iter().zip(reach).map(|(p, r)| *p && r).collect()
    }

    /// The grammar restricted to useful variables (the start variable is
    /// always kept), variables renumbered in their original order.
    pub fn trim(&self) -> Grammar {
        let useful = self.useful();
        let keep: Vec<usize> = (0..self.vars.len()).filter(|&v| useful[v] || v == self.start).collect();
        let remap: BTreeMap<usize, usize> = keep.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let rules = self
            .rules
            .iter()
            .filter(|r| {
                useful[r.lhs]
                    && r.rhs.iter().all(|s| match *s {
                        GSym::Var(v) => useful[v],
                        GSym::Term(_) => true,
                    })
            })
            .map(|r| Rule {
                lhs: remap[&r.lhs],
                rhs: r
                    .rhs
                    .iter()
                    .map(|s| match *s {
                        GSym::Var(v) => GSym::Var(remap[&v]),
                        t => t,
                    })
                    .collect(),
            })
            .collect();
        Grammar {
            vars: keep.iter().map(|&v| self.vars[v].clone()).collect(),
            terminals: self.terminals.clone(),
            start: remap[&self.start],
            rules,
        }
    }

    /// A variable `A` with `A =>+ A` among the useful ones, which makes the
    /// number of derivations of some word infinite.
    pub fn derivation_cycle(&self) -> Option<usize> {
        let null = self.nullable();
        let useful = self.useful();
        let n = self.vars.len();
        let mut edges = vec![BTreeSet::new(); n];
        for r in &self.rules {
            if !useful[r.lhs] || !r.rhs.iter().all(|s| matches!(*s, GSym::Var(v) if useful[v])) {
                continue;
            }
            for (i, s) in r.rhs.iter().enumerate() {
                let GSym::Var(b) = *s else { continue };
                let others_null = r
                    .rhs
                    .iter()
                    .enumerate()
                    .all(|(j, t)| j == i || matches!(*t, GSym::Var(v) if null[v]));
                if others_null {
                    edges[r.lhs].insert(b);
                }
            }
        }
        (0..n).find(|&a| {
            let mut seen = vec![false; n];
            let mut stack: Vec<usize> = edges[a].iter().copied().collect();
            while let Some(b) = stack.pop() {
                if b == a {
                    return true;
                }
                if !std::mem::replace(&mut seen[b], true) {
                    stack.extend(edges[b].iter().copied());
                }
            }
            false
        })
    }

    /// Number of leftmost derivations `S =>* x`, by direct enumeration of
    /// sentential forms. Exponential; meant as a test oracle.
    pub fn leftmost_derivations(&self, x: &[Symbol]) -> Result<Nat> {
        if let Some(a) = self.derivation_cycle() {
            return Err(Error::InfiniteAmbiguity(format!(
                "variable `{}` derives itself",
                self.vars[a]
            )));
        }
        let min = self.min_yield();
        let by_lhs = self.rules_by_lhs();
        // forms are kept reversed so the leftmost symbol is at the end
        let mut count = Nat::zero();
        let mut stack = vec![(vec![GSym::Var(self.start)], 0usize)];
        while let Some((mut form, mut pos)) = stack.pop() {
            while let Some(&GSym::Term(a)) = form.last() {
                if x.get(pos) != Some(&a) {
                    break;
                }
                form.pop();
                pos += 1;
            }
            match form.last() {
                None => {
                    if pos == x.len() {
                        count += 1u32;
                    }
                }
                Some(GSym::Term(_)) => {}
                Some(&GSym::Var(a)) => {
                    form.pop();
                    for rhs in &by_lhs[a] {
                        let mut next = form.clone();
                        next.extend(rhs.iter().rev());
                        let need = next.iter().try_fold(0usize, |acc, s| match *s {
                            GSym::Term(_) => Some(acc + 1),
                            GSym::Var(v) => min[v].map(|l| acc + l),
                        });
                        if need.is_some_and(|l| l <= x.len() - pos) {
                            stack.push((next, pos));
                        }
                    }
                }
            }
        }
        Ok(count)
    }

    fn rules_by_lhs(&self) -> Vec<Vec<Vec<GSym>>> {
        let mut by = vec![Vec::new(); self.vars.len()];
        for r in &self.rules {
            by[r.lhs].push(r.rhs.clone());
        }
        by
    }

    pub fn generates(&self, x: &[Symbol]) -> Result<bool> {
        Ok(!self.leftmost_derivations(x)?.is_zero())
    }

    /// Chomsky normal form for `L(G)` (or `L(G) \ {e}` under
    /// [`EpsilonPolicy::Drop`]): e-rule removal, unit-rule removal, useless
    /// variable removal, then terminal lifting and binarisation.
    pub fn to_cnf(&self, policy: EpsilonPolicy) -> Result<CnfGrammar> {
        let null = self.nullable();
        if null[self.start] && policy == EpsilonPolicy::Reject {
            return Err(Error::EpsilonInLanguage);
        }
        // e-removal: every way of dropping nullable occurrences
        let mut rules: BTreeSet<Rule> = BTreeSet::new();
        for r in &self.rules {
            let mut variants: Vec<Vec<GSym>> = vec![Vec::new()];
            for s in &r.rhs {
                let droppable = matches!(*s, GSym::Var(v) if null[v]);
                let mut next = Vec::with_capacity(variants.len() * 2);
                for v in variants {
                    if droppable {
                        next.push(v.clone());
                    }
                    let mut with = v;
                    with.push(*s);
                    next.push(with);
                }
                variants = next;
            }
            for rhs in variants.into_iter().filter(|v| !v.is_empty()) {
                rules.insert(Rule { lhs: r.lhs, rhs });
            }
        }
        // unit removal
        let n = self.vars.len();
        let mut unit = vec![BTreeSet::new(); n];
        for (a, set) in unit.iter_mut().enumerate() {
            set.insert(a);
        }
        let mut changed = true;
        while changed {
            changed = false;
            for r in &rules {
                if let [GSym::Var(b)] = r.rhs[..] {
                    for set in unit.iter_mut() {
                        if set.contains(&r.lhs) && !set.contains(&b) {
                            set.insert(b);
                            changed = true;
                        }
                    }
                }
            }
        }
        let mut flat = BTreeSet::new();
        for (a, reach) in unit.iter().enumerate() {
            for r in rules.iter().filter(|r| reach.contains(&r.lhs)) {
                if !matches!(r.rhs[..], [GSym::Var(_)]) {
                    flat.insert(Rule {
                        lhs: a,
                        rhs: r.rhs.clone(),
                    });
                }
            }
        }
        let stage = Grammar {
            vars: self.vars.clone(),
            terminals: self.terminals.clone(),
            start: self.start,
            rules: flat.into_iter().collect(),
        };
        // useless removal, keeping the start variable
        let useful = stage.useful();
        let mut keep: Vec<usize> = (0..n).filter(|&v| useful[v] || v == stage.start).collect();
        keep.sort_unstable();
        let remap: BTreeMap<usize, usize> = keep.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut names: Vec<String> = keep.iter().map(|&v| self.vars[v].clone()).collect();
        let mut out_rules = Vec::new();
        for r in &stage.rules {
            let all_useful = useful[r.lhs]
                && r.rhs
                    .iter()
                    .all(|s| matches!(*s, GSym::Term(_)) || matches!(*s, GSym::Var(v) if useful[v]));
            if !all_useful {
                continue;
            }
            let rhs = r
                .rhs
                .iter()
                .map(|s| match *s {
                    GSym::Var(v) => GSym::Var(remap[&v]),
                    t => t,
                })
                .collect();
            out_rules.push(Rule {
                lhs: remap[&r.lhs],
                rhs,
            });
        }
        // terminal lifting
        let mut lifted: BTreeMap<Symbol, usize> = BTreeMap::new();
        let mut binary = Vec::new();
        let mut unary = Vec::new();
        let mut long = Vec::new();
        for r in out_rules {
            match r.rhs[..] {
                [GSym::Term(a)] => unary.push((r.lhs, a)),
                _ => {
                    let rhs: Vec<usize> = r
                        .rhs
                        .iter()
                        .map(|s| match *s {
                            GSym::Var(v) => v,
                            GSym::Term(a) => *lifted.entry(a).or_insert_with(|| {
                                let base = format!("T_{}", self.terminals.name(a));
                                names.push(fresh(&names, &base));
                                names.len() - 1
                            }),
                        })
                        .collect();
                    long.push((r.lhs, rhs));
                }
            }
        }
        for (&a, &v) in &lifted {
            unary.push((v, a));
        }
        // binarisation
        for (lhs, rhs) in long {
            let mut head = lhs;
            let k = rhs.len();
            for (i, &x) in rhs[..k - 2].iter().enumerate() {
                let base = format!("{}_{}", names[lhs], i + 1);
                names.push(fresh(&names, &base));
                let next = names.len() - 1;
                binary.push((head, x, next));
                head = next;
            }
            binary.push((head, rhs[k - 2], rhs[k - 1]));
        }
        CnfGrammar::new(names, self.terminals.clone(), remap[&self.start], &binary, &unary)
    }
}

fn rule_productive(r: &Rule, productive: &[bool]) -> bool {
    r.rhs.iter().all(|s| match *s {
        GSym::Var(v) => productive[v],
        GSym::Term(_) => true,
    })
}

fn fresh(names: &[String], base: &str) -> String {
    if !names.iter().any(|n| n == base) {
        return base.to_string();
    }
    (1..)
        .map(|i| format!("{base}'{i}"))
        .find(|c| !names.contains(c))
        .expect("unbounded supply")
}

impl fmt::Display for Grammar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "var {}", self.vars.join(" "))?;
        writeln!(f, "term {}", self.terminals.names().join(" "))?;
        writeln!(f, "start {}", self.vars[self.start])?;
        for r in &self.rules {
            let rhs: Vec<&str> = r
                .rhs
                .iter()
                .map(|s| match *s {
                    GSym::Var(v) => self.vars[v].as_str(),
                    GSym::Term(a) => self.terminals.name(a),
                })
                .collect();
            let rhs = if rhs.is_empty() {
                "ε".to_string()
            } else {
                rhs.join(" ")
            };
            writeln!(f, "{} -> {}", self.vars[r.lhs], rhs)?;
        }
        Ok(())
    }
}

/// `1` on every word of `xs` with a derivation, for quick language checks.
#[cfg(test)]
pub(crate) fn indicator(g: &Grammar, xs: &[Vec<Symbol>]) -> Result<Vec<bool>> {
    xs.iter().map(|x| g.generates(x)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn anbn() -> Grammar {
        Grammar::parse("var S\nterm a b\nstart S\nS -> a S b | a b\n").unwrap()
    }

    #[test]
    fn forced_shape_for_two_terminals() {
        let g = Grammar::parse("var S\nterm a b\nS -> a b\n").unwrap();
        let c = g.to_cnf(EpsilonPolicy::Reject).unwrap();
        assert_eq!(c.vars().len(), 3);
        let s = c.start();
        assert_eq!(c.binary(s).len(), 1);
        let (x, y) = c.binary(s)[0];
        assert_eq!(c.unary(x), &[0]);
        assert_eq!(c.unary(y), &[1]);
    }

    #[test]
    fn language_preserved() {
        let g = anbn();
        let c = g.to_cnf(EpsilonPolicy::Reject).unwrap();
        let back = c.to_grammar();
        for n in 1..=8 {
            let xs = g.terminals().words(n);
            assert_eq!(indicator(&g, &xs).unwrap(), indicator(&back, &xs).unwrap(), "n={n}");
        }
    }

    #[test]
    fn epsilon_policies() {
        let g = Grammar::parse("var S\nterm a\nS -> a S | ε\n").unwrap();
        assert_eq!(g.to_cnf(EpsilonPolicy::Reject).unwrap_err(), Error::EpsilonInLanguage);
        let c = g.to_cnf(EpsilonPolicy::Drop).unwrap().to_grammar();
        for n in 1..=5 {
            assert!(c.generates(&vec![0; n]).unwrap());
        }
    }

    #[test]
    fn unit_and_useless_rules() {
        let text = "var S A B U\nterm a b\nS -> A | B\nA -> a A | a\nB -> b\nU -> U a\n";
        let g = Grammar::parse(text).unwrap();
        assert!(!g.useful()[3]);
        let c = g.to_cnf(EpsilonPolicy::Reject).unwrap();
        assert!(!c.vars().iter().any(|v| v == "U"));
        let back = c.to_grammar();
        for n in 1..=5 {
            let xs = g.terminals().words(n);
            assert_eq!(indicator(&g, &xs).unwrap(), indicator(&back, &xs).unwrap());
        }
    }

    #[test]
    fn leftmost_counts() {
        let g = Grammar::parse("var S\nterm a\nS -> S S | a\n").unwrap();
        let counts: Vec<Nat> = (1..=5).map(|n| g.leftmost_derivations(&vec![0; n]).unwrap()).collect();
        assert_eq!(counts, [1u32, 1, 2, 5, 14].map(Nat::from));
    }

    #[test]
    fn unit_cycle_is_infinite() {
        let g = Grammar::parse("var S A\nterm a\nS -> A | a\nA -> S\n").unwrap();
        assert!(matches!(g.leftmost_derivations(&[0]), Err(Error::InfiniteAmbiguity(_))));
    }

    #[test]
    fn parse_errors_carry_lines() {
        let err = Grammar::parse("var S\nterm a\nS -> b\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
        assert!(Grammar::parse("var S a\nterm a\n").is_err());
    }
}
