//! Arithmetic circuits with constants in {-1, 0, 1}.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::text::lines;
use crate::{Error, Field, Int, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Node {
    /// `x_{k+1}`.
    Input(usize),
    Const(i8),
    Add(Vec<usize>),
    Mul(Vec<usize>),
}

/// Nodes are stored in topological order; the last one is the output and
/// every other node feeds some later node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Circuit {
    inputs: usize,
    nodes: Vec<Node>,
}

impl Circuit {
    pub fn new(inputs: usize, nodes: Vec<Node>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::invalid("a circuit needs an output node"));
        }
        let mut used = vec![false; nodes.len()];
        for (i, node) in nodes.iter().enumerate() {
            match node {
                Node::Input(k) if *k >= inputs => {
                    return Err(Error::invalid(format!("input x{} beyond {inputs} variables", k + 1)))
                }
                Node::Const(v) if !(-1..=1).contains(v) => {
                    return Err(Error::invalid(format!("constant {v} outside {{-1, 0, 1}}")))
                }
                Node::Add(xs) | Node::Mul(xs) => {
                    if xs.is_empty() {
                        return Err(Error::invalid(format!("node {i} has no operands")));
                    }
                    for &x in xs {
                        if x >= i {
                            return Err(Error::invalid(format!("node {i} reads later node {x}")));
                        }
                        used[x] = true;
                    }
                }
                _ => {}
            }
        }
        if let Some(i) = used[..nodes.len() - 1].iter().position(|u| !u) {
            return Err(Error::invalid(format!("node {i} is a second sink")));
        }
        Ok(Circuit { inputs, nodes })
    }

    /// One node per line, `id kind args`: `in k` (1-based), `const v`,
    /// `add id ...`, `mul id ...`, and a final `out id`. An optional
    /// `vars n` line fixes the variable count (default: largest `k`).
    pub fn parse(text: &str) -> Result<Self> {
        let mut ids: HashMap<String, usize> = HashMap::new();
        let mut nodes = Vec::new();
        let mut vars = None;
        let mut out = None;
        let mut max_k = 0;
        for line in lines(text) {
            if out.is_some() {
                return Err(line.err("nothing may follow `out`"));
            }
            match line.key() {
                "vars" => {
                    line.expect_args(1)?;
                    vars = Some(line.parse_at::<usize>(1, "variable count")?);
                    continue;
                }
                "out" => {
                    line.expect_args(1)?;
                    let id = line.words[1];
                    out = Some((
                        line.no,
                        *ids.get(id).ok_or_else(|| line.err(format!("unknown node `{id}`")))?,
                    ));
                    continue;
                }
                _ => {}
            }
            if line.words.len() < 2 {
                return Err(line.err("expected `id kind args`"));
            }
            let id = line.words[0].to_string();
            if ids.contains_key(&id) {
                return Err(line.err(format!("duplicate node `{id}`")));
            }
            let node = match line.words[1] {
                "in" => {
                    if line.words.len() != 3 {
                        return Err(line.err("`in` takes one variable index"));
                    }
                    let k: usize = line.parse_at(2, "variable index")?;
                    if k == 0 {
                        return Err(line.err("variables are numbered from 1"));
                    }
                    max_k = max_k.max(k);
                    Node::Input(k - 1)
                }
                "const" => {
                    if line.words.len() != 3 {
                        return Err(line.err("`const` takes one value"));
                    }
                    let v: i8 = line.parse_at(2, "constant")?;
                    if !(-1..=1).contains(&v) {
                        return Err(line.err("constants are -1, 0 or 1"));
                    }
                    Node::Const(v)
                }
                kind @ ("add" | "mul") => {
                    let xs = line.words[2..]
                        .iter()
                        .map(|a| {
                            ids.get(*a)
                                .copied()
                                .ok_or_else(|| line.err(format!("unknown node `{a}`")))
                        })
                        .collect::<Result<Vec<_>>>()?;
                    if xs.is_empty() {
                        return Err(line.err(format!("`{kind}` needs operands")));
                    }
                    if kind == "add" {
                        Node::Add(xs)
                    } else {
                        Node::Mul(xs)
                    }
                }
                other => return Err(line.err(format!("unknown node kind `{other}`"))),
            };
            ids.insert(id, nodes.len());
            nodes.push(node);
        }
        let (no, out) = out.ok_or_else(|| Error::parse(0, "missing `out`"))?;
        if out + 1 != nodes.len() {
            return Err(Error::parse(no, "the output must be the last node"));
        }
        let inputs = match vars {
            Some(n) if n < max_k => return Err(Error::parse(0, format!("`vars {n}` but x{max_k} is used"))),
            Some(n) => n,
            None => max_k,
        };
        Circuit::new(inputs, nodes).map_err(|e| Error::parse(no, e.to_string()))
    }

    pub fn inputs(&self) -> usize {
        self.inputs
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn output(&self) -> usize {
        self.nodes.len() - 1
    }

    /// `C(c)`, the node count.
    pub fn size(&self) -> usize {
        self.nodes.len()
    }

    /// `D(c)`, the longest path ending in the output.
    pub fn depth(&self) -> usize {
        let mut d = vec![0usize; self.nodes.len()];
        for (i, node) in self.nodes.iter().enumerate() {
            if let Node::Add(xs) | Node::Mul(xs) = node {
                d[i] = 1 + xs.iter().map(|&x| d[x]).max().unwrap_or(0);
            }
        }
        d[self.output()]
    }

    /// Value at `point`, in topological order.
    pub fn eval<F: Field>(&self, point: &[F]) -> F {
        assert_eq!(point.len(), self.inputs, "point has the wrong dimension");
        let mut val: Vec<F> = Vec::with_capacity(self.nodes.len());
        for node in &self.nodes {
            let v = match node {
                Node::Input(k) => point[*k].clone(),
                Node::Const(c) => constant(*c),
                Node::Add(xs) => xs.iter().fold(F::zero(), |acc, &x| acc + val[x].clone()),
                Node::Mul(xs) => xs.iter().fold(F::one(), |acc, &x| acc * val[x].clone()),
            };
            val.push(v);
        }
        val.pop().expect("nonempty")
    }

    /// The polynomial of the output node, by explicit expansion. With
    /// `square_free` every `x^k` is folded to `x` along the way, which
    /// yields `msf` of the polynomial.
    pub fn expand(&self, square_free: bool, max_terms: usize) -> Result<Polynomial> {
        let n = self.inputs;
        let mut val: Vec<Polynomial> = Vec::with_capacity(self.nodes.len());
        for node in &self.nodes {
            let p = match node {
                Node::Input(k) => Polynomial::var(n, *k),
                Node::Const(c) => Polynomial::constant(n, Int::from(*c)),
                Node::Add(xs) => xs.iter().fold(Polynomial::zero(n), |acc, &x| acc.add(&val[x])),
                Node::Mul(xs) => {
                    let mut acc = Polynomial::constant(n, Int::one());
                    for &x in xs {
                        acc = acc.mul(&val[x]);
                        if square_free {
                            acc = acc.msf();
                        }
                        if acc.terms.len() > max_terms {
                            return Err(Error::SizeGuard(format!("expansion beyond {max_terms} monomials")));
                        }
                    }
                    acc
                }
            };
            val.push(p);
        }
        Ok(val.pop().expect("nonempty"))
    }
}

fn constant<F: Field>(c: i8) -> F {
    match c {
        -1 => -F::one(),
        0 => F::zero(),
        _ => F::one(),
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "vars {}", self.inputs)?;
        for (i, node) in self.nodes.iter().enumerate() {
            let args = |xs: &[usize]| xs.iter().map(|x| format!("g{x}")).collect::<Vec<_>>().join(" ");
            match node {
                Node::Input(k) => writeln!(f, "g{i} in {}", k + 1)?,
                Node::Const(c) => writeln!(f, "g{i} const {c}")?,
                Node::Add(xs) => writeln!(f, "g{i} add {}", args(xs))?,
                Node::Mul(xs) => writeln!(f, "g{i} mul {}", args(xs))?,
            }
        }
        write!(f, "out g{}", self.output())
    }
}

/// Assembles circuits; [`finish`](Self::finish) drops nodes the output
/// does not read and collapses trivial operators.
#[derive(Clone, Debug)]
pub struct CircuitBuilder {
    inputs: usize,
    nodes: Vec<Node>,
    memo: HashMap<Node, usize>,
}

impl CircuitBuilder {
    pub fn new(inputs: usize) -> Self {
        CircuitBuilder {
            inputs,
            nodes: Vec::new(),
            memo: HashMap::new(),
        }
    }

    fn push(&mut self, node: Node) -> usize {
        if let Some(&i) = self.memo.get(&node) {
            return i;
        }
        self.nodes.push(node.clone());
        self.memo.insert(node, self.nodes.len() - 1);
        self.nodes.len() - 1
    }

    /// `x_{k+1}`.
    pub fn input(&mut self, k: usize) -> usize {
        assert!(k < self.inputs, "input out of range");
        self.push(Node::Input(k))
    }

    pub fn constant(&mut self, v: i8) -> usize {
        assert!((-1..=1).contains(&v), "constant out of range");
        self.push(Node::Const(v))
    }

    pub fn add(&mut self, xs: Vec<usize>) -> usize {
        match xs.len() {
            0 => self.constant(0),
            1 => xs[0],
            _ => self.push(Node::Add(xs)),
        }
    }

    pub fn mul(&mut self, xs: Vec<usize>) -> usize {
        match xs.len() {
            0 => self.constant(1),
            1 => xs[0],
            _ => self.push(Node::Mul(xs)),
        }
    }

    pub fn neg(&mut self, x: usize) -> usize {
        let m = self.constant(-1);
        self.mul(vec![m, x])
    }

    /// `1 - x`.
    pub fn one_minus(&mut self, x: usize) -> usize {
        let one = self.constant(1);
        let minus = self.neg(x);
        self.add(vec![one, minus])
    }

    /// An integer constant, by binary expansion over `1 + 1`.
    pub fn int(&mut self, k: &Int) -> usize {
        if k.is_zero() {
            return self.constant(0);
        }
        let one = self.constant(1);
        let two = self.add(vec![one, one]);
        let mut power = one;
        let mut terms = Vec::new();
        let m = k.magnitude();
        for bit in 0..m.bits() {
            if bit > 0 {
                power = self.mul(vec![power, two]);
            }
            if m.bit(bit) {
                terms.push(power);
            }
        }
        let v = self.add(terms);
        if k.is_negative() {
            self.neg(v)
        } else {
            v
        }
    }

    pub fn finish(self, out: usize) -> Circuit {
        let mut keep = vec![false; out + 1];
        keep[out] = true;
        for i in (0..=out).rev() {
            if keep[i] {
                if let Node::Add(xs) | Node::Mul(xs) = &self.nodes[i] {
                    for &x in xs {
                        keep[x] = true;
                    }
                }
            }
        }
        let mut map = vec![usize::MAX; out + 1];
        let mut nodes = Vec::new();
        for i in 0..=out {
            if !keep[i] {
                continue;
            }
            let node = match &self.nodes[i] {
                Node::Add(xs) => Node::Add(xs.iter().map(|&x| map[x]).collect()),
                Node::Mul(xs) => Node::Mul(xs.iter().map(|&x| map[x]).collect()),
                other => other.clone(),
            };
            map[i] = nodes.len();
            nodes.push(node);
        }
        Circuit::new(self.inputs, nodes).expect("builder output is well formed")
    }
}

/// Exponent vector of a monomial over `x_1..x_n`.
pub type Monomial = Vec<u32>;

/// A polynomial in `Z[x_1..x_n]` as a map from monomials to nonzero
/// coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polynomial {
    n: usize,
    terms: BTreeMap<Monomial, Int>,
}

impl Polynomial {
    pub fn zero(n: usize) -> Self {
        Polynomial {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(n: usize, c: Int) -> Self {
        let mut p = Polynomial::zero(n);
        if !c.is_zero() {
            p.terms.insert(vec![0; n], c);
        }
        p
    }

    pub fn var(n: usize, k: usize) -> Self {
        let mut m = vec![0; n];
        m[k] = 1;
        Polynomial {
            n,
            terms: BTreeMap::from([(m, Int::one())]),
        }
    }

    pub fn vars(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, Int> {
        &self.terms
    }

    /// `[m]p`.
    pub fn coeff(&self, m: &[u32]) -> Int {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.accumulate(m.clone(), c.clone());
        }
        out
    }

    fn accumulate(&mut self, m: Monomial, c: Int) {
        let slot = self.terms.entry(m.clone()).or_default();
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Polynomial::zero(self.n);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let m = m1.iter().zip(m2).map(|(a, b)| a + b).collect();
                out.accumulate(m, c1 * c2);
            }
        }
        out
    }

    /// Every `x_i^k`, `k > 0`, replaced by `x_i`.
    pub fn msf(&self) -> Self {
        let mut out = Polynomial::zero(self.n);
        for (m, c) in &self.terms {
            out.accumulate(m.iter().map(|&e| e.min(1)).collect(), c.clone());
        }
        out
    }

    pub fn is_square_free(&self) -> bool {
        self.terms.keys().all(|m| m.iter().all(|&e| e <= 1))
    }

    pub fn eval<F: Field>(&self, point: &[F]) -> F {
        self.terms.iter().fold(F::zero(), |acc, (m, c)| {
            let mut t = int_to_field::<F>(c);
            for (x, &e) in point.iter().zip(m) {
                for _ in 0..e {
                    t = t * x.clone();
                }
            }
            acc + t
        })
    }

    /// A sum-of-products circuit for this polynomial.
    pub fn to_circuit(&self) -> Circuit {
        let mut b = CircuitBuilder::new(self.n);
        let mut sum = Vec::new();
        for (m, c) in &self.terms {
            let mut factors = vec![];
            if !c.is_one() {
                factors.push(b.int(c));
            }
            for (k, &e) in m.iter().enumerate() {
                for _ in 0..e {
                    factors.push(b.input(k));
                }
            }
            sum.push(b.mul(factors));
        }
        let out = b.add(sum);
        b.finish(out)
    }
}

fn int_to_field<F: Field>(c: &Int) -> F {
    let two = F::one() + F::one();
    let mut acc = F::zero();
    let m = c.magnitude();
    for bit in (0..m.bits()).rev() {
        acc = acc * two.clone();
        if m.bit(bit) {
            acc = acc + F::one();
        }
    }
    if c.is_negative() {
        -acc
    } else {
        acc
    }
}

/// `[m]c` for a circuit whose polynomial is square-free: substitute
/// `x_i -> lambda_i z` and read `[z^d]` off truncated univariate
/// arithmetic. Zero when `m` is not square-free.
pub fn msf_coefficient(c: &Circuit, m: &[u32]) -> Int {
    assert_eq!(m.len(), c.inputs(), "monomial has the wrong dimension");
    if m.iter().any(|&e| e > 1) {
        return Int::zero();
    }
    let d = m.iter().sum::<u32>() as usize;
    let mut val: Vec<Vec<Int>> = Vec::with_capacity(c.size());
    for node in c.nodes() {
        let p = match node {
            Node::Input(k) => {
                let mut p = vec![Int::zero(); d + 1];
                if m[*k] == 1 {
                    p[1] = Int::one();
                }
                p
            }
            Node::Const(v) => {
                let mut p = vec![Int::zero(); d + 1];
                p[0] = Int::from(*v);
                p
            }
            Node::Add(xs) => {
                let mut p = vec![Int::zero(); d + 1];
                for &x in xs {
                    for (a, b) in p.iter_mut().zip(&val[x]) {
                        *a += b;
                    }
                }
                p
            }
            Node::Mul(xs) => {
                let mut p = vec![Int::zero(); d + 1];
                p[0] = Int::one();
                for &x in xs {
                    let q = &val[x];
                    let mut r = vec![Int::zero(); d + 1];
                    for (i, a) in p.iter().enumerate().filter(|(_, a)| !a.is_zero()) {
                        for (j, b) in q[..=d - i].iter().enumerate() {
                            r[i + j] += a * b;
                        }
                    }
                    p = r;
                }
                p
            }
        };
        val.push(p);
    }
    val.pop().expect("nonempty").swap_remove(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numutil::rat;
    use crate::Rat;

    /// `(x1 + x2) * x1`.
    fn sample() -> Circuit {
        Circuit::parse("a in 1\nb in 2\ns add a b\np mul s a\nout p\n").unwrap()
    }

    fn rats(xs: &[i64]) -> Vec<Rat> {
        xs.iter().map(|&x| rat(x, 1)).collect()
    }

    #[test]
    fn evaluation() {
        let one = Circuit::parse("c const 1\nout c\n").unwrap();
        assert_eq!(one.eval::<Rat>(&[]), rat(1, 1));
        assert_eq!(sample().eval(&rats(&[1, 1])), rat(2, 1));
        assert_eq!(sample().size(), 4);
        assert_eq!(sample().depth(), 2);
    }

    #[test]
    fn parse_errors() {
        assert!(Circuit::parse("a in 1\nb in 2\nout a\n").is_err());
        assert!(matches!(
            Circuit::parse("a const 2\nout a\n"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            Circuit::parse("a in 1\nb add a c\nout b\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(Circuit::parse("a in 1\n").is_err());
    }

    #[test]
    fn display_roundtrip() {
        let c = sample();
        assert_eq!(Circuit::parse(&c.to_string()).unwrap(), c);
    }

    #[test]
    fn coefficient_examples() {
        // x1 x2 + x2 x3
        let c = Circuit::parse("a in 1\nb in 2\nc in 3\np mul a b\nq mul b c\ns add p q\nout s\n").unwrap();
        assert_eq!(msf_coefficient(&c, &[1, 1, 0]), Int::one());
        assert_eq!(msf_coefficient(&c, &[2, 0, 0]), Int::zero());
        assert_eq!(msf_coefficient(&c, &[1, 0, 1]), Int::zero());
        // msf((x1 + x2)(x1 + x3)) = x1 + x1 x3 + x1 x2 + x2 x3
        let d = Circuit::parse("a in 1\nb in 2\nc in 3\ns add a b\nt add a c\np mul s t\nout p\n").unwrap();
        let p = d.expand(true, 1000).unwrap();
        assert_eq!(p.terms().len(), 4);
        let e = p.to_circuit();
        assert_eq!(msf_coefficient(&e, &[0, 1, 1]), Int::one());
        assert_eq!(msf_coefficient(&e, &[1, 0, 0]), Int::one());
    }

    #[test]
    fn integer_constants() {
        for k in [-9i64, -1, 0, 1, 2, 7, 64, 1000] {
            let mut b = CircuitBuilder::new(0);
            let v = b.int(&Int::from(k));
            let c = b.finish(v);
            assert_eq!(c.eval::<Rat>(&[]), rat(k, 1));
        }
    }

    #[test]
    fn expansion_matches_evaluation() {
        let c = sample();
        let p = c.expand(false, 100).unwrap();
        assert_eq!(p.coeff(&[2, 0]), Int::one());
        assert_eq!(p.coeff(&[1, 1]), Int::one());
        for x in -2..3 {
            for y in -2..3 {
                assert_eq!(p.eval(&rats(&[x, y])), c.eval(&rats(&[x, y])));
            }
        }
        assert!(!p.is_square_free());
        assert!(p.msf().is_square_free());
    }
}
