//! Decorated planar trivalent trees, the welding bracket, AS/IHX relators,
//! the map η into `D_k(H)`, its image lattice, and the decomposition of
//! `y`-decorated trees into brackets of tripods.
//!
//! A tree is stored in planted form: a root leaf and the rooted binary
//! tree hanging from it. At an internal vertex with parent `P` and
//! children `(L, R)` the cyclic order is `(P, L, R)`. The canonical
//! planted form is the smallest over all choices of root leaf.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde_json::Value;
use thiserror::Error;

use crate::deriv::{derivation_bracket, dk_basis, pairing, DerivError, DerivationElement};
use crate::lie::{bracketing_tensor, Bracketing, LieElement};
use crate::par;
use crate::word::Generator;
use crate::zlinalg::{lattice_quotient_in, LinalgError, SparseVec};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TreeError {
    #[error("malformed tree: {0}")]
    Parse(String),
    #[error("a decorated tree needs at least 3 leaves")]
    TooFewLeaves,
    #[error("degree too small: tripods are the base case")]
    DegreeTooSmall,
    #[error("no fresh index: every y-index up to genus {0} is used")]
    NoFreshIndex(usize),
    #[error("decoration not Lagrangian: {0} appears")]
    NotLagrangian(Generator),
    #[error("symbol {0} outside genus {1}")]
    GenusTooSmall(Generator, usize),
    #[error("bracket identity failed: {0}")]
    Identity(String),
    #[error(transparent)]
    Deriv(#[from] DerivError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// A rooted planar binary tree with decorated leaves.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RootedTree {
    Leaf(Generator),
    Node(Box<RootedTree>, Box<RootedTree>),
}

impl RootedTree {
    pub fn node(l: RootedTree, r: RootedTree) -> Self {
        RootedTree::Node(Box::new(l), Box::new(r))
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            RootedTree::Leaf(_) => 1,
            RootedTree::Node(l, r) => l.leaf_count() + r.leaf_count(),
        }
    }

    pub fn leaves(&self) -> Vec<Generator> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves(&self, out: &mut Vec<Generator>) {
        match self {
            RootedTree::Leaf(g) => out.push(*g),
            RootedTree::Node(l, r) => {
                l.collect_leaves(out);
                r.collect_leaves(out);
            }
        }
    }

    pub fn to_bracketing(&self) -> Bracketing {
        match self {
            RootedTree::Leaf(g) => Bracketing::Letter(*g),
            RootedTree::Node(l, r) => Bracketing::Bracket(Box::new(l.to_bracketing()), Box::new(r.to_bracketing())),
        }
    }

    /// The iterated bracket `[left, right]` as a Lie element.
    pub fn lie_element(&self, genus: usize) -> LieElement {
        let t = bracketing_tensor(genus, &self.to_bracketing());
        if t.is_zero() {
            return LieElement::zero(genus, self.leaf_count());
        }
        LieElement::from_tensor(&t).expect("brackets are Lie elements")
    }
}

impl fmt::Display for RootedTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RootedTree::Leaf(g) => write!(f, "{g}"),
            RootedTree::Node(l, r) => write!(f, "({l},{r})"),
        }
    }
}

#[derive(Clone, Copy, Debug)]
enum GNode {
    Leaf { sym: Generator, nbr: usize },
    Inner { nbrs: [usize; 3] },
}

/// Unrooted form: leaves and internal vertices with cyclically ordered
/// neighbours.
#[derive(Clone, Debug)]
struct Graph {
    nodes: Vec<GNode>,
}

const UNSET: usize = usize::MAX;

impl Graph {
    fn add_rooted(&mut self, t: &RootedTree, parent: usize) -> usize {
        match t {
            RootedTree::Leaf(sym) => {
                self.nodes.push(GNode::Leaf { sym: *sym, nbr: parent });
                self.nodes.len() - 1
            }
            RootedTree::Node(l, r) => {
                let idx = self.nodes.len();
                self.nodes.push(GNode::Inner { nbrs: [parent, UNSET, UNSET] });
                let li = self.add_rooted(l, idx);
                let ri = self.add_rooted(r, idx);
                self.nodes[idx] = GNode::Inner { nbrs: [parent, li, ri] };
                idx
            }
        }
    }

    /// The tree obtained by joining the roots of `a` and `b` by an edge.
    fn from_edge(a: &RootedTree, b: &RootedTree) -> Graph {
        let mut g = Graph { nodes: Vec::new() };
        let ai = g.add_rooted(a, UNSET);
        let bi = g.add_rooted(b, ai);
        match &mut g.nodes[ai] {
            GNode::Leaf { nbr, .. } => *nbr = bi,
            GNode::Inner { nbrs } => nbrs[0] = bi,
        }
        g
    }

    fn leaf_ids(&self) -> Vec<usize> {
        (0..self.nodes.len()).filter(|&i| matches!(self.nodes[i], GNode::Leaf { .. })).collect()
    }

    fn inner_ids(&self) -> Vec<usize> {
        (0..self.nodes.len()).filter(|&i| matches!(self.nodes[i], GNode::Inner { .. })).collect()
    }

    /// Neighbours of an inner vertex rotated to start at `from`.
    fn rotated(&self, v: usize, from: usize) -> (usize, usize) {
        let GNode::Inner { nbrs } = self.nodes[v] else { unreachable!() };
        let p = nbrs.iter().position(|&n| n == from).expect("not adjacent");
        (nbrs[(p + 1) % 3], nbrs[(p + 2) % 3])
    }

    /// The subtree at `v` seen from its neighbour `from`.
    fn rooted_from(&self, v: usize, from: usize) -> RootedTree {
        match self.nodes[v] {
            GNode::Leaf { sym, .. } => RootedTree::Leaf(sym),
            GNode::Inner { .. } => {
                let (l, r) = self.rotated(v, from);
                RootedTree::node(self.rooted_from(l, v), self.rooted_from(r, v))
            }
        }
    }

    /// `(decoration, hanging tree)` for each leaf, in node order.
    fn rootings(&self) -> Vec<(Generator, RootedTree)> {
        self.leaf_ids()
            .into_iter()
            .map(|i| {
                let GNode::Leaf { sym, nbr } = self.nodes[i] else { unreachable!() };
                (sym, self.rooted_from(nbr, i))
            })
            .collect()
    }

    fn canonical(&self) -> DecoratedTree {
        let (root, body) = self.rootings().into_iter().min().unwrap();
        DecoratedTree { root, body }
    }

    fn flipped(&self, v: usize) -> Graph {
        let mut g = self.clone();
        if let GNode::Inner { nbrs } = &mut g.nodes[v] {
            nbrs.swap(1, 2);
        }
        g
    }

    /// Packed tensor expansion of the bracket hanging at `v` from `from`:
    /// 5 bits per symbol, `(code + 1)` each.
    fn packed_tensor(&self, v: usize, from: usize) -> Vec<(u64, i64)> {
        match self.nodes[v] {
            GNode::Leaf { sym, .. } => vec![(sym.code() as u64 + 1, 1)],
            GNode::Inner { .. } => {
                let (l, r) = self.rotated(v, from);
                let (tl, nl) = (self.packed_tensor(l, v), self.leaf_count_from(l, v));
                let (tr, nr) = (self.packed_tensor(r, v), self.leaf_count_from(r, v));
                let mut out = Vec::with_capacity(2 * tl.len() * tr.len());
                for (a, ca) in &tl {
                    for (b, cb) in &tr {
                        out.push(((a << (5 * nr)) | b, ca * cb));
                        out.push(((b << (5 * nl)) | a, -ca * cb));
                    }
                }
                out
            }
        }
    }

    fn leaf_count_from(&self, v: usize, from: usize) -> usize {
        match self.nodes[v] {
            GNode::Leaf { .. } => 1,
            GNode::Inner { .. } => {
                let (l, r) = self.rotated(v, from);
                self.leaf_count_from(l, v) + self.leaf_count_from(r, v)
            }
        }
    }

    /// η in the packed tensor encoding `a ⊗ λ ↦ a λ`, unmerged.
    fn packed_eta(&self, scale: i64, out: &mut Vec<(u64, i64)>) {
        let n = self.leaf_ids().len();
        for i in self.leaf_ids() {
            let GNode::Leaf { sym, nbr } = self.nodes[i] else { unreachable!() };
            let head = (sym.code() as u64 + 1) << (5 * (n - 1));
            for (w, c) in self.packed_tensor(nbr, i) {
                out.push((head | w, scale * c));
            }
        }
    }
}

fn packed_vanishes(mut terms: Vec<(u64, i64)>) -> bool {
    terms.sort_unstable_by_key(|t| t.0);
    let mut i = 0;
    while i < terms.len() {
        let mut s = 0i64;
        let k = terms[i].0;
        while i < terms.len() && terms[i].0 == k {
            s += terms[i].1;
            i += 1;
        }
        if s != 0 {
            return false;
        }
    }
    true
}

/// A decorated planar binary tree with at least three leaves, in
/// canonical planted form.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DecoratedTree {
    root: Generator,
    body: RootedTree,
}

impl DecoratedTree {
    /// The tree with root leaf `root` attached to the root of `body`.
    pub fn planted(root: Generator, body: RootedTree) -> Result<Self, TreeError> {
        Self::edge(&RootedTree::Leaf(root), &body)
    }

    /// The tree obtained by joining the roots of `a` and `b` with an edge.
    pub fn edge(a: &RootedTree, b: &RootedTree) -> Result<Self, TreeError> {
        if a.leaf_count() + b.leaf_count() < 3 {
            return Err(TreeError::TooFewLeaves);
        }
        Ok(Graph::from_edge(a, b).canonical())
    }

    /// The tree with one internal vertex whose cyclic order is `(a, b, c)`.
    pub fn tripod(a: Generator, b: Generator, c: Generator) -> Self {
        Self::planted(a, RootedTree::node(RootedTree::Leaf(b), RootedTree::Leaf(c))).unwrap()
    }

    fn graph(&self) -> Graph {
        Graph::from_edge(&RootedTree::Leaf(self.root), &self.body)
    }

    pub fn root(&self) -> Generator {
        self.root
    }

    pub fn body(&self) -> &RootedTree {
        &self.body
    }

    pub fn leaf_count(&self) -> usize {
        1 + self.body.leaf_count()
    }

    pub fn degree(&self) -> usize {
        self.leaf_count() - 2
    }

    /// Decorations in planar order starting from the root leaf.
    pub fn leaves(&self) -> Vec<Generator> {
        let mut out = vec![self.root];
        out.extend(self.body.leaves());
        out
    }

    pub fn max_index(&self) -> usize {
        self.leaves().iter().map(|g| g.index()).max().unwrap()
    }

    pub fn is_lagrangian(&self) -> bool {
        self.leaves().iter().all(|g| g.is_y())
    }

    /// `(a_i, tree hanging from leaf i)` for every leaf.
    pub fn rootings(&self) -> Vec<(Generator, RootedTree)> {
        self.graph().rootings()
    }

    /// Trees obtained by reversing the cyclic order at one internal vertex.
    pub fn flips(&self) -> Vec<DecoratedTree> {
        let g = self.graph();
        g.inner_ids().into_iter().map(|v| g.flipped(v).canonical()).collect()
    }

    /// `Σ_i a_i ⊗ λ_i` where `λ_i` is the bracket of the tree rooted at
    /// leaf `i`.
    pub fn eta(&self, genus: usize) -> Result<DerivationElement, TreeError> {
        if let Some(&g) = self.leaves().iter().find(|g| g.index() > genus) {
            return Err(TreeError::GenusTooSmall(g, genus));
        }
        let mut out = DerivationElement::zero(genus, self.degree());
        for (a, t) in self.rootings() {
            out.add_scaled(&DerivationElement::term(a, &t.lie_element(genus)), &BigInt::one());
        }
        Ok(out)
    }

    /// Parses the nested-parenthesis form. A pair `(A,B)` at top level
    /// joins `A` and `B` by an edge; a triple `(A,B,C)` is the vertex with
    /// cyclic order `(A, B, C)`.
    pub fn parse(s: &str) -> Result<Self, TreeError> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let (parts, rest) = parse_group(&s)?;
        if !rest.is_empty() {
            return Err(TreeError::Parse(format!("trailing input {rest:?}")));
        }
        match parts {
            Parsed::Group(items) if items.len() == 2 => {
                DecoratedTree::edge(&items[0].to_rooted()?, &items[1].to_rooted()?)
            }
            Parsed::Group(items) if items.len() == 3 => {
                let body = RootedTree::node(items[1].to_rooted()?, items[2].to_rooted()?);
                DecoratedTree::edge(&items[0].to_rooted()?, &body)
            }
            _ => Err(TreeError::Parse(s)),
        }
    }

    pub fn to_json(&self) -> Value {
        Value::String(self.to_string())
    }
}

impl fmt::Display for DecoratedTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.body {
            RootedTree::Node(l, r) => write!(f, "({},{l},{r})", self.root),
            RootedTree::Leaf(_) => unreachable!("at least three leaves"),
        }
    }
}

enum Parsed {
    Sym(Generator),
    Group(Vec<Parsed>),
}

impl Parsed {
    fn to_rooted(&self) -> Result<RootedTree, TreeError> {
        match self {
            Parsed::Sym(g) => Ok(RootedTree::Leaf(*g)),
            Parsed::Group(items) if items.len() == 2 => Ok(RootedTree::node(items[0].to_rooted()?, items[1].to_rooted()?)),
            Parsed::Group(items) => Err(TreeError::Parse(format!("inner vertex with {} children", items.len()))),
        }
    }
}

fn parse_group(s: &str) -> Result<(Parsed, &str), TreeError> {
    if let Some(mut rest) = s.strip_prefix('(') {
        let mut items = Vec::new();
        loop {
            let (item, r) = parse_group(rest)?;
            items.push(item);
            if let Some(r) = r.strip_prefix(',') {
                rest = r;
            } else if let Some(r) = r.strip_prefix(')') {
                return Ok((Parsed::Group(items), r));
            } else {
                return Err(TreeError::Parse(format!("expected ',' or ')' at {r:?}")));
            }
        }
    }
    let end = s.find([',', ')', '(']).unwrap_or(s.len());
    let sym: Generator = s[..end].parse().map_err(|_| TreeError::Parse(format!("bad symbol {:?}", &s[..end])))?;
    Ok((Parsed::Sym(sym), &s[end..]))
}

/// An integer combination of decorated trees of one degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeSum {
    degree: usize,
    terms: BTreeMap<DecoratedTree, BigInt>,
}

impl TreeSum {
    pub fn zero(degree: usize) -> Self {
        TreeSum { degree, terms: BTreeMap::new() }
    }

    pub fn single(t: DecoratedTree) -> Self {
        let mut s = TreeSum::zero(t.degree());
        s.add_term(t, BigInt::one());
        s
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn terms(&self) -> &BTreeMap<DecoratedTree, BigInt> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, t: DecoratedTree, c: BigInt) {
        assert_eq!(t.degree(), self.degree, "degree mismatch");
        let e = self.terms.entry(t.clone()).or_insert_with(BigInt::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&t);
        }
    }

    pub fn eta(&self, genus: usize) -> Result<DerivationElement, TreeError> {
        let mut out = DerivationElement::zero(genus, self.degree);
        for (t, c) in &self.terms {
            out.add_scaled(&t.eta(genus)?, c);
        }
        Ok(out)
    }
}

impl fmt::Display for TreeSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(t, c)| format!("{c}*{t}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// `[T1, T2] = Σ_{i,j} ⟨a_i, b_j⟩ T1 *_{ij} T2`, welding the trees along
/// the stripped leaves `i` and `j`.
pub fn tree_bracket(t1: &DecoratedTree, t2: &DecoratedTree) -> TreeSum {
    let mut out = TreeSum::zero(t1.degree() + t2.degree());
    let r2 = t2.rootings();
    for (a, b1) in t1.rootings() {
        for (b, b2) in &r2 {
            let p = pairing(a, *b);
            if p != 0 {
                out.add_term(DecoratedTree::edge(&b1, b2).unwrap(), BigInt::from(p));
            }
        }
    }
    out
}

/// All decorated rooted trees with `n` leaves over `genus` (every planar
/// shape and decoration), memoized by leaf count.
fn all_bodies(genus: usize, n: usize, memo: &mut HashMap<usize, Arc<Vec<RootedTree>>>) -> Arc<Vec<RootedTree>> {
    if let Some(v) = memo.get(&n) {
        return v.clone();
    }
    let out = if n == 1 {
        Generator::all(genus).map(RootedTree::Leaf).collect()
    } else {
        let mut out = Vec::new();
        for l in 1..n {
            let left = all_bodies(genus, l, memo);
            let right = all_bodies(genus, n - l, memo);
            for a in left.iter() {
                for b in right.iter() {
                    out.push(RootedTree::node(a.clone(), b.clone()));
                }
            }
        }
        out
    };
    let out = Arc::new(out);
    memo.insert(n, out.clone());
    out
}

/// Rooted trees with `n` leaves normalized under child swaps
/// (`left ≤ right` at every vertex).
fn commutative_bodies(genus: usize, n: usize, memo: &mut HashMap<usize, Arc<Vec<RootedTree>>>) -> Arc<Vec<RootedTree>> {
    if let Some(v) = memo.get(&n) {
        return v.clone();
    }
    let out = if n == 1 {
        Generator::all(genus).map(RootedTree::Leaf).collect()
    } else {
        let mut out = Vec::new();
        for l in 1..=n / 2 {
            let left = commutative_bodies(genus, l, memo);
            let right = commutative_bodies(genus, n - l, memo);
            for a in left.iter() {
                for b in right.iter() {
                    if l < n - l || a <= b {
                        out.push(RootedTree::node(a.clone(), b.clone()));
                    }
                }
            }
        }
        out
    };
    let out = Arc::new(out);
    memo.insert(n, out.clone());
    out
}

/// A random rooted tree with `n` leaves decorated from `symbols`.
pub fn random_rooted<R: rand::Rng + ?Sized>(rng: &mut R, symbols: &[Generator], n: usize) -> RootedTree {
    if n == 1 {
        return RootedTree::Leaf(symbols[rng.gen_range(0..symbols.len())]);
    }
    let l = rng.gen_range(1..n);
    RootedTree::node(random_rooted(rng, symbols, l), random_rooted(rng, symbols, n - l))
}

/// A random decorated tree of the given degree.
pub fn random_tree<R: rand::Rng + ?Sized>(rng: &mut R, symbols: &[Generator], degree: usize) -> DecoratedTree {
    let root = symbols[rng.gen_range(0..symbols.len())];
    DecoratedTree::planted(root, random_rooted(rng, symbols, degree + 1)).unwrap()
}

/// Every decorated tree of degree `k` over `genus`, in canonical form
/// and sorted.
pub fn enumerate_trees(genus: usize, k: usize) -> Vec<DecoratedTree> {
    let bodies = all_bodies(genus, k + 1, &mut HashMap::new());
    let mut out: Vec<DecoratedTree> = Generator::all(genus)
        .flat_map(|root| {
            let bodies = bodies.clone();
            par::map(&bodies, move |b| {
                if b.leaves().iter().any(|&s| s < root) {
                    return None;
                }
                let t = DecoratedTree { root, body: b.clone() };
                (t.graph().canonical() == t).then_some(t)
            })
            .into_iter()
            .flatten()
        })
        .collect();
    out.sort();
    out
}

/// Counts of relators checked and any that η failed to kill.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RelatorReport {
    pub trees: usize,
    pub as_relators: usize,
    pub ihx_relators: usize,
    pub failures: Vec<String>,
}

impl RelatorReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

fn as_relator_graphs(g: &Graph) -> Vec<[Graph; 2]> {
    g.inner_ids().into_iter().map(|v| [g.clone(), g.flipped(v)]).collect()
}

/// For an internal edge `u–v` with cyclic orders `u: (v, a, b)` and
/// `v: (u, c, d)`, the Jacobi form of IHX:
/// `(D, ((A,B),C)) + (D, ((B,C),A)) + (D, ((C,A),B))`.
fn ihx_relator_trees(g: &Graph) -> Vec<[(RootedTree, RootedTree); 3]> {
    let mut out = Vec::new();
    for u in g.inner_ids() {
        let GNode::Inner { nbrs } = g.nodes[u] else { unreachable!() };
        for &v in &nbrs {
            if v < u || !matches!(g.nodes[v], GNode::Inner { .. }) {
                continue;
            }
            let (a, b) = g.rotated(u, v);
            let (c, d) = g.rotated(v, u);
            let (ta, tb) = (g.rooted_from(a, u), g.rooted_from(b, u));
            let (tc, td) = (g.rooted_from(c, v), g.rooted_from(d, v));
            let n = RootedTree::node;
            out.push([
                (td.clone(), n(n(ta.clone(), tb.clone()), tc.clone())),
                (td.clone(), n(n(tb.clone(), tc.clone()), ta.clone())),
                (td, n(n(tc, ta), tb)),
            ]);
        }
    }
    out
}

/// AS relators `T + T′` (`T′` reverses one vertex) over all trees of
/// degree `k`.
pub fn as_relators(genus: usize, k: usize) -> Vec<TreeSum> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for t in enumerate_trees(genus, k) {
        for [a, b] in as_relator_graphs(&t.graph()) {
            let mut s = TreeSum::zero(k);
            s.add_term(a.canonical(), BigInt::one());
            s.add_term(b.canonical(), BigInt::one());
            let key = s.to_string();
            if seen.insert(key) {
                out.push(s);
            }
        }
    }
    out
}

/// IHX relators over every internal edge of every tree of degree `k`.
pub fn ihx_relators(genus: usize, k: usize) -> Vec<TreeSum> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for t in enumerate_trees(genus, k) {
        for terms in ihx_relator_trees(&t.graph()) {
            let mut s = TreeSum::zero(k);
            for (a, b) in &terms {
                s.add_term(DecoratedTree::edge(a, b).unwrap(), BigInt::one());
            }
            let key = s.to_string();
            if seen.insert(key) {
                out.push(s);
            }
        }
    }
    out
}

/// Checks that η kills every AS and IHX relator of degree `k` over
/// `genus`, using packed machine-integer tensors.
pub fn check_relators(genus: usize, k: usize) -> RelatorReport {
    assert!(5 * (k + 2) <= 64 && 2 * genus <= 31, "packed encoding out of range");
    let trees = enumerate_trees(genus, k);
    let per_tree = par::map(&trees, |t| {
        let g = t.graph();
        let mut failures = Vec::new();
        let as_rel = as_relator_graphs(&g);
        for [a, b] in &as_rel {
            let mut terms = Vec::new();
            a.packed_eta(1, &mut terms);
            b.packed_eta(1, &mut terms);
            if !packed_vanishes(terms) {
                failures.push(format!("AS {} + {}", a.canonical(), b.canonical()));
            }
        }
        let ihx = ihx_relator_trees(&g);
        for rel in &ihx {
            let mut terms = Vec::new();
            for (a, b) in rel {
                Graph::from_edge(a, b).packed_eta(1, &mut terms);
            }
            if !packed_vanishes(terms) {
                failures.push(format!("IHX at {t}"));
            }
        }
        (as_rel.len(), ihx.len(), failures)
    });
    let mut report = RelatorReport { trees: trees.len(), ..Default::default() };
    for (a, i, f) in per_tree {
        report.as_relators += a;
        report.ihx_relators += i;
        report.failures.extend(f);
    }
    report
}

/// Elementary divisors of `D_k(H_g) / Im η` with the generating trees
/// counted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ImageLattice {
    pub genus: usize,
    pub degree: usize,
    pub dk_rank: usize,
    pub trees: usize,
    pub divisors: Vec<BigInt>,
}

impl ImageLattice {
    pub fn all_one(&self) -> bool {
        self.divisors.iter().all(|d| d.is_one())
    }

    /// Every divisor is a positive power of 2 or 1.
    pub fn powers_of_two(&self) -> bool {
        self.divisors.iter().all(|d| {
            let d: &BigInt = d;
            d > &BigInt::zero() && (d & (d - BigInt::one())).is_zero()
        })
    }

    pub fn to_json(&self) -> Value {
        serde_json::json!({
            "g": self.genus,
            "k": self.degree,
            "dk_rank": self.dk_rank,
            "trees": self.trees,
            "divisors": crate::json::ints_to_json(&self.divisors),
        })
    }
}

/// The sublattice `Im η ⊆ D_k(H_g)` and its elementary divisors.
///
/// Generators are `η` of planted trees whose bodies are normalized under
/// vertex flips; a flip only changes the sign of `η`, so these span the
/// full image.
pub fn image_lattice(genus: usize, k: usize) -> Result<ImageLattice, TreeError> {
    let dk = dk_basis(genus, k);
    let bodies = commutative_bodies(genus, k + 1, &mut HashMap::new());
    let planted: Vec<(Generator, &RootedTree)> = Generator::all(genus)
        .flat_map(|r| bodies.iter().map(move |b| (r, b)))
        .collect();
    let vectors = par::map(&planted, |(r, b)| {
        let t = DecoratedTree::planted(*r, (*b).clone()).unwrap();
        dk.coords.encode(&t.eta(genus).unwrap()).normalized_sign()
    });
    let mut seen = HashSet::new();
    let mut unique: Vec<SparseVec> = Vec::new();
    for v in vectors {
        if !v.is_zero() && seen.insert(v.clone()) {
            unique.push(v);
        }
    }
    let divisors = lattice_quotient_in(dk.lattice(), &unique)?;
    Ok(ImageLattice { genus, degree: k, dk_rank: dk.rank(), trees: planted.len(), divisors })
}

/// One step of the decomposition: `η(T) = sign · [η(T″), η(T′)]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub tripod: DecoratedTree,
    pub rest: DecoratedTree,
    pub sign: i32,
}

fn first_cherry(t: &RootedTree) -> Option<(Generator, Generator)> {
    match t {
        RootedTree::Leaf(_) => None,
        RootedTree::Node(l, r) => match (l.as_ref(), r.as_ref()) {
            (RootedTree::Leaf(a), RootedTree::Leaf(b)) => Some((*a, *b)),
            _ => first_cherry(l).or_else(|| first_cherry(r)),
        },
    }
}

/// Replaces the first cherry (in depth-first order) by a leaf.
fn replace_first_cherry(t: &RootedTree, leaf: Generator) -> (RootedTree, bool) {
    match t {
        RootedTree::Leaf(_) => (t.clone(), false),
        RootedTree::Node(l, r) => {
            if matches!((l.as_ref(), r.as_ref()), (RootedTree::Leaf(_), RootedTree::Leaf(_))) {
                return (RootedTree::Leaf(leaf), true);
            }
            let (nl, done) = replace_first_cherry(l, leaf);
            if done {
                return (RootedTree::node(nl, (**r).clone()), true);
            }
            let (nr, done) = replace_first_cherry(r, leaf);
            (RootedTree::node((**l).clone(), nr), done)
        }
    }
}

fn sign_of(lhs: &DerivationElement, target: &DerivationElement) -> Option<i32> {
    if lhs == target {
        Some(1)
    } else if lhs.neg() == *target {
        Some(-1)
    } else {
        None
    }
}

/// Splits a `y`-decorated tree of degree ≥ 2 as a bracket of the tripod
/// `(x_t, y_r, y_s)` with a tree of one lower degree, where `(y_r, y_s)`
/// is the first cherry and `t` the smallest fresh index. The sign is
/// found by evaluating both sides.
pub fn decompose(t: &DecoratedTree, genus: usize) -> Result<Decomposition, TreeError> {
    if let Some(&g) = t.leaves().iter().find(|g| g.is_x()) {
        return Err(TreeError::NotLagrangian(g));
    }
    if t.degree() < 2 {
        return Err(TreeError::DegreeTooSmall);
    }
    let (r, s) = first_cherry(&t.body).expect("a rooted tree with two or more leaves has a cherry");
    let mut others = t.leaves();
    for g in [r, s] {
        let pos = others.iter().position(|&x| x == g).unwrap();
        others.remove(pos);
    }
    let fresh = (1..=genus)
        .find(|&i| !others.contains(&Generator::y(i)))
        .ok_or(TreeError::NoFreshIndex(genus))?;
    let (body, _) = replace_first_cherry(&t.body, Generator::y(fresh));
    let rest = DecoratedTree::planted(t.root, body)?;
    let tripod = DecoratedTree::tripod(Generator::x(fresh), r, s);
    let lhs = derivation_bracket(&tripod.eta(genus)?, &rest.eta(genus)?)?;
    let target = t.eta(genus)?;
    let sign = sign_of(&lhs, &target).ok_or_else(|| TreeError::Identity(format!("[{tripod}, {rest}] vs {t}")))?;
    Ok(Decomposition { tripod, rest, sign })
}

/// A bracket expression whose leaves are tripods.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BracketExpr {
    Tripod(DecoratedTree),
    Bracket(Box<BracketExpr>, Box<BracketExpr>),
}

impl BracketExpr {
    pub fn eval(&self, genus: usize) -> Result<DerivationElement, TreeError> {
        match self {
            BracketExpr::Tripod(t) => t.eta(genus),
            BracketExpr::Bracket(a, b) => Ok(derivation_bracket(&a.eval(genus)?, &b.eval(genus)?)?),
        }
    }

    pub fn tripods(&self) -> Vec<&DecoratedTree> {
        match self {
            BracketExpr::Tripod(t) => vec![t],
            BracketExpr::Bracket(a, b) => {
                let mut v = a.tripods();
                v.extend(b.tripods());
                v
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            BracketExpr::Tripod(_) => 0,
            BracketExpr::Bracket(a, b) => 1 + a.depth().max(b.depth()),
        }
    }
}

impl fmt::Display for BracketExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BracketExpr::Tripod(t) => write!(f, "{t}"),
            BracketExpr::Bracket(a, b) => write!(f, "[{a}, {b}]"),
        }
    }
}

/// `η(T) = sign · eval(expr)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FullDecomposition {
    pub expr: BracketExpr,
    pub sign: i32,
}

/// Iterates [`decompose`] down to tripods, giving a right-nested bracket
/// expression.
pub fn full_decompose(t: &DecoratedTree, genus: usize) -> Result<FullDecomposition, TreeError> {
    let step = decompose(t, genus)?;
    let (inner, inner_sign) = if step.rest.degree() == 1 {
        (BracketExpr::Tripod(step.rest.clone()), 1)
    } else {
        let d = full_decompose(&step.rest, genus)?;
        (d.expr, d.sign)
    };
    let expr = BracketExpr::Bracket(Box::new(BracketExpr::Tripod(step.tripod)), Box::new(inner));
    Ok(FullDecomposition { expr, sign: step.sign * inner_sign })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deriv::{bracket_map, wedge3_to_d1, Wedge3Element};

    fn x(i: usize) -> Generator {
        Generator::x(i)
    }
    fn y(i: usize) -> Generator {
        Generator::y(i)
    }

    #[test]
    fn tripod_eta() {
        let t = DecoratedTree::tripod(x(1), y(1), x(2));
        let w = wedge3_to_d1(&Wedge3Element::basis(2, x(1), y(1), x(2)));
        assert_eq!(t.eta(2).unwrap(), w);
    }

    #[test]
    fn parse_and_display() {
        let t = DecoratedTree::parse("((y1,y2),(y1,y2))").unwrap();
        assert_eq!(t.degree(), 2);
        assert_eq!(DecoratedTree::parse(&t.to_string()).unwrap(), t);
        let tri = DecoratedTree::parse("(y1,y2,y3)").unwrap();
        assert_eq!(tri, DecoratedTree::tripod(y(1), y(2), y(3)));
        // cyclic rotations are the same planar tree
        assert_eq!(tri, DecoratedTree::tripod(y(2), y(3), y(1)));
        assert_ne!(tri, DecoratedTree::tripod(y(1), y(3), y(2)));
        assert!(DecoratedTree::parse("(y1,y2)").is_err());
        assert!(DecoratedTree::parse("((y1,y2,y3),y1)").is_err());
        assert!(DecoratedTree::parse("(y1,z2,y3)").is_err());
    }

    #[test]
    fn as_on_tripod() {
        let a = DecoratedTree::tripod(x(1), y(1), x(2));
        let b = DecoratedTree::tripod(x(1), x(2), y(1));
        assert!(a.eta(2).unwrap().add(&b.eta(2).unwrap()).is_zero());
        assert_eq!(a.flips(), vec![b]);
    }

    #[test]
    fn eta_lands_in_kernel() {
        let t = DecoratedTree::parse("((y1,x2),(x1,y2))").unwrap();
        assert!(bracket_map(&t.eta(2).unwrap()).is_zero());
    }

    #[test]
    fn bracket_of_y_trees_vanishes() {
        let a = DecoratedTree::tripod(y(1), y(2), y(3));
        assert!(tree_bracket(&a, &a).is_zero());
    }

    #[test]
    fn single_weld() {
        let a = DecoratedTree::tripod(x(1), y(2), y(3));
        let b = DecoratedTree::tripod(y(1), y(2), y(3));
        let s = tree_bracket(&a, &b);
        assert_eq!(s.terms().len(), 1);
        assert_eq!(s.terms().values().next(), Some(&BigInt::one()));
        let lhs = s.eta(3).unwrap();
        let rhs = derivation_bracket(&a.eta(3).unwrap(), &b.eta(3).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn tree_counts() {
        // one planar tripod per cyclic class of decorations: (n^3 + 2n) / 3
        assert_eq!(enumerate_trees(1, 1).len(), 4);
        assert_eq!(enumerate_trees(2, 1).len(), 24);
        assert!(ihx_relators(1, 1).is_empty());
        assert!(!as_relators(1, 1).is_empty());
    }

    #[test]
    fn packed_eta_matches() {
        for t in enumerate_trees(2, 2).iter().step_by(37) {
            let mut terms = Vec::new();
            t.graph().packed_eta(1, &mut terms);
            let mut neg = t.eta(2).unwrap().neg().to_tensor_terms();
            terms.append(&mut neg);
            assert!(packed_vanishes(terms), "{t}");
        }
    }

    impl DerivationElement {
        fn to_tensor_terms(&self) -> Vec<(u64, i64)> {
            use num_traits::ToPrimitive;
            let mut out = Vec::new();
            for ((a, w), c) in self.coeffs() {
                for (u, e) in crate::lie::lyndon_expansion(w).iter() {
                    let mut key = a.code() as u64 + 1;
                    for g in u {
                        key = (key << 5) | (g.code() as u64 + 1);
                    }
                    out.push((key, c.to_i64().unwrap() * e));
                }
            }
            out
        }
    }

    #[test]
    fn relators_small() {
        let r = check_relators(2, 2);
        assert!(r.ok(), "{:?}", r.failures);
        assert!(r.ihx_relators > 0);
    }

    #[test]
    fn figure_example() {
        let t = DecoratedTree::parse("((y1,y2),(y1,y2))").unwrap();
        let d = decompose(&t, 3).unwrap();
        assert_eq!(d.rest, DecoratedTree::tripod(y(3), y(1), y(2)));
        assert_eq!(d.tripod, DecoratedTree::tripod(y(1), y(2), x(3)));
        assert_eq!(decompose(&DecoratedTree::tripod(y(1), y(2), y(3)), 4), Err(TreeError::DegreeTooSmall));
        assert_eq!(decompose(&t, 2), Err(TreeError::NoFreshIndex(2)));
    }
}
