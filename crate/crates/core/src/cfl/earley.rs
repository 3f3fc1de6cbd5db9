//! Earley parsing with weights counting derivation trees.

use std::collections::{BTreeSet, HashMap};

use num_traits::Zero;

use super::CnfGrammar;
use crate::{Nat, Symbol};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Rhs {
    Bin(usize, usize),
    Term(Symbol),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Item {
    rule: usize,
    dot: u8,
}

/// A weighted state `[A -> alpha . beta, t]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct State {
    pub item: Item,
    pub weight: Nat,
    pub marked: bool,
}

#[derive(Clone, Debug, Default)]
struct Cell {
    states: Vec<State>,
    index: HashMap<Item, usize>,
}

impl Cell {
    fn get_mut(&mut self, item: Item) -> Option<&mut State> {
        self.index.get(&item).map(|&i| &mut self.states[i])
    }
}

/// The table `S_{i,j}` after a run, for inspection.
pub struct EarleyTable {
    rules: Vec<(usize, Rhs)>,
    cells: Vec<Vec<Cell>>,
    start: usize,
    n: usize,
}

impl EarleyTable {
    /// Number of states in `S_{i,j}`.
    pub fn cell_len(&self, i: usize, j: usize) -> usize {
        self.cells[i][j].states.len()
    }

    /// Every cell holds at most one state per dotted production.
    pub fn one_state_per_item(&self) -> bool {
        self.cells.iter().flatten().all(|c| {
            let items: BTreeSet<Item> = c.states.iter().map(|s| s.item).collect();
            items.len() == c.states.len()
        })
    }

    pub fn all_marked_below_diagonal(&self) -> bool {
        (0..=self.n).all(|j| (0..j).all(|i| self.cells[i][j].states.iter().all(|s| s.marked)))
    }

    /// `sum t` over the completed start rules in `S_{0,n}`.
    pub fn count(&self) -> Nat {
        self.cells[0][self.n]
            .states
            .iter()
            .filter(|s| {
                let (lhs, rhs) = self.rules[s.item.rule];
                lhs == self.start && s.item.dot as usize == rhs_len(rhs)
            })
            .map(|s| s.weight.clone())
            .sum()
    }
}

fn rhs_len(r: Rhs) -> usize {
    match r {
        Rhs::Bin(..) => 2,
        Rhs::Term(_) => 1,
    }
}

struct Run {
    rules: Vec<(usize, Rhs)>,
    by_lhs: Vec<Vec<usize>>,
    cells: Vec<Vec<Cell>>,
    /// `waiting[b][i]`: the `k` with a state `[A -> alpha . B beta]` in
    /// `S_{k,i}` (the sets `L_{B,i}`).
    waiting: Vec<Vec<BTreeSet<usize>>>,
}

impl Run {
    fn next_var(&self, item: Item) -> Option<usize> {
        match (self.rules[item.rule].1, item.dot) {
            (Rhs::Bin(b, _), 0) => Some(b),
            (Rhs::Bin(_, c), 1) => Some(c),
            _ => None,
        }
    }

    fn add(&mut self, i: usize, j: usize, item: Item, weight: Nat) {
        if let Some(b) = self.next_var(item) {
            self.waiting[b][j].insert(i);
        }
        let cell = &mut self.cells[i][j];
        cell.index.insert(item, cell.states.len());
        cell.states.push(State {
            item,
            weight,
            marked: false,
        });
    }

    /// Adds `[B -> . gamma, 1]` to `S_{j,j}` for each rule of `B` not yet
    /// present.
    fn predict(&mut self, j: usize, b: usize) {
        for &rule in &self.by_lhs[b].clone() {
            let item = Item { rule, dot: 0 };
            if !self.cells[j][j].index.contains_key(&item) {
                self.add(j, j, item, Nat::from(1u32));
            }
        }
    }

    fn close_diagonal(&mut self, j: usize) {
        let mut idx = 0;
        while idx < self.cells[j][j].states.len() {
            let st = &mut self.cells[j][j].states[idx];
            idx += 1;
            if st.marked {
                continue;
            }
            st.marked = true;
            let item = st.item;
            if let Some(b) = self.next_var(item) {
                self.predict(j, b);
            }
        }
    }
}

/// Earley table of `x` under `g`. Runs in `O(n^3)` state operations in
/// general and in quadratic time for bounded ambiguity.
pub fn earley_table(g: &CnfGrammar, x: &[Symbol]) -> EarleyTable {
    let n = x.len();
    let mut rules = Vec::new();
    let mut by_lhs = vec![Vec::new(); g.vars().len()];
    for (a, mine) in by_lhs.iter_mut().enumerate() {
        for &(b, c) in g.binary(a) {
            mine.push(rules.len());
            rules.push((a, Rhs::Bin(b, c)));
        }
        for &s in g.unary(a) {
            mine.push(rules.len());
            rules.push((a, Rhs::Term(s)));
        }
    }
    let mut run = Run {
        rules,
        by_lhs,
        cells: vec![vec![Cell::default(); n + 1]; n + 1],
        waiting: vec![vec![BTreeSet::new(); n + 1]; g.vars().len()],
    };
    run.predict(0, g.start());
    run.close_diagonal(0);
    for j in 1..=n {
        // Scanner
        for i in (0..j).rev() {
            let scan: Vec<(Item, Nat)> = run.cells[i][j - 1]
                .states
                .iter_mut()
                .filter(|s| s.item.dot == 0)
                .filter_map(|s| match run_rhs(&run.rules, s.item) {
                    Rhs::Term(a) => {
                        s.marked = true;
                        (a == x[j - 1]).then(|| (s.item, s.weight.clone()))
                    }
                    Rhs::Bin(..) => None,
                })
                .collect();
            for (item, w) in scan {
                run.add(
                    i,
                    j,
                    Item {
                        rule: item.rule,
                        dot: 1,
                    },
                    w,
                );
            }
        }
        // Completer: S_{i,j} only receives completed states from larger i
        for i in (0..j).rev() {
            let mut idx = 0;
            while idx < run.cells[i][j].states.len() {
                let st = &mut run.cells[i][j].states[idx];
                idx += 1;
                if !run_complete(&run.rules, st.item) || st.marked {
                    continue;
                }
                st.marked = true;
                let (b, t) = (run.rules[st.item.rule].0, st.weight.clone());
                let ks: Vec<usize> = run.waiting[b][i].iter().copied().collect();
                for k in ks {
                    let waiting: Vec<(Item, Nat)> = run.cells[k][i]
                        .states
                        .iter()
                        .filter(|s| run.next_var(s.item) == Some(b))
                        .map(|s| (s.item, s.weight.clone()))
                        .collect();
                    for (item, u) in waiting {
                        let next = Item {
                            rule: item.rule,
                            dot: item.dot + 1,
                        };
                        let add = &t * &u;
                        match run.cells[k][j].get_mut(next) {
                            Some(s) => s.weight += add,
                            None => run.add(k, j, next, add),
                        }
                    }
                }
            }
        }
        // Predictor
        for i in 0..j {
            let mut idx = 0;
            while idx < run.cells[i][j].states.len() {
                let item = run.cells[i][j].states[idx].item;
                idx += 1;
                if let Some(b) = run.next_var(item) {
                    run.cells[i][j].states[idx - 1].marked = true;
                    run.predict(j, b);
                }
            }
        }
        run.close_diagonal(j);
    }
    EarleyTable {
        rules: run.rules,
        cells: run.cells,
        start: g.start(),
        n,
    }
}

fn run_rhs(rules: &[(usize, Rhs)], item: Item) -> Rhs {
    rules[item.rule].1
}

fn run_complete(rules: &[(usize, Rhs)], item: Item) -> bool {
    item.dot as usize == rhs_len(rules[item.rule].1)
}

/// `d_G(x)`, the number of derivation trees of `x`; zero for non-members
/// and for the empty word.
pub fn earley_count(g: &CnfGrammar, x: &[Symbol]) -> Nat {
    if x.is_empty() {
        return Nat::zero();
    }
    earley_table(g, x).count()
}
