//! `(r, k, d)`-graphs: complete graphs on `{1..k}` whose edges carry a level
//! `xi in [-1, r]` and a twist `eta in [0, d-1]`, plus the properness rules,
//! edge generation, trees and brute-force enumeration.
//!
//! Only `eta(a, b)` for `a < b` is stored; `eta(b, a) = -eta(a, b) mod d`.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use thiserror::Error;

use crate::recur::{self, falling_twist_count, Partition, RecurError};

/// Hard ceiling on the number of candidate labelings any enumeration may scan.
pub const ENUMERATION_CAP: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("invalid graph: {0}")]
    Invalid(String),
    #[error("graph is not complete")]
    NotComplete,
    #[error("graph is not strict (no edge has xi = r)")]
    NotStrict,
    #[error("partition property fails: {0}")]
    Partition(String),
    #[error("generation step rejected: {0}")]
    StepRejected(String),
    #[error("enumeration would scan {candidates} candidates, cap is {ENUMERATION_CAP}")]
    Cap { candidates: u128 },
    #[error("partition has {t} blocks but d = {d}")]
    BlockCount { t: usize, d: u32 },
    #[error("cannot parse graph: {0}")]
    Parse(String),
    #[error(transparent)]
    Recur(#[from] RecurError),
}

/// Label of an edge `a-b`, oriented from the smaller vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeLabel {
    pub xi: i32,
    /// `eta(a, b)` for `a < b`.
    pub eta: u32,
}

impl EdgeLabel {
    pub const fn new(xi: i32, eta: u32) -> Self {
        EdgeLabel { xi, eta }
    }

    pub const EQUAL: EdgeLabel = EdgeLabel { xi: -1, eta: 0 };
}

/// Every admissible edge label in `(xi, eta)` ascending order.
pub fn label_space(r: i32, d: u32) -> Vec<EdgeLabel> {
    let mut out = vec![EdgeLabel::EQUAL];
    for xi in 0..=r {
        for eta in 1..d {
            out.push(EdgeLabel::new(xi, eta));
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IterGraph {
    k: usize,
    r: i32,
    d: u32,
    /// Indexed by [`pair_index`]; `None` means no edge.
    edges: Vec<Option<EdgeLabel>>,
}

/// Position of the pair `a < b` (1-based vertices) in lexicographic order.
fn pair_index(k: usize, a: usize, b: usize) -> usize {
    debug_assert!(1 <= a && a < b && b <= k);
    // pairs (i, j) with i < a come first: sum_{i=1}^{a-1} (k - i)
    (a - 1) * k - (a - 1) * a / 2 + (b - a - 1)
}

/// All pairs `(a, b)` with `1 <= a < b <= k`, lexicographically.
pub fn pairs(k: usize) -> impl Iterator<Item = (usize, usize)> {
    (1..=k).flat_map(move |a| (a + 1..=k).map(move |b| (a, b)))
}

impl IterGraph {
    /// Graph on `k` vertices with no edges.
    pub fn empty(k: usize, r: i32, d: u32) -> Self {
        IterGraph { k, r, d, edges: vec![None; k * k.saturating_sub(1) / 2] }
    }

    /// Complete graph from labels given in lexicographic pair order.
    pub fn complete(k: usize, r: i32, d: u32, labels: &[EdgeLabel]) -> Self {
        assert_eq!(labels.len(), k * k.saturating_sub(1) / 2);
        IterGraph { k, r, d, edges: labels.iter().copied().map(Some).collect() }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn r(&self) -> i32 {
        self.r
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    /// Set edge `a-b` with `eta(a, b) = eta`; either orientation is accepted.
    pub fn set_edge(&mut self, a: usize, b: usize, xi: i32, eta: u32) -> &mut Self {
        assert!(a != b && a >= 1 && b >= 1 && a <= self.k && b <= self.k, "bad vertex pair {a}-{b}");
        let (lo, hi, eta_lo) = if a < b { (a, b, eta) } else { (b, a, (self.d - eta % self.d) % self.d) };
        self.edges[pair_index(self.k, lo, hi)] = Some(EdgeLabel::new(xi, eta_lo));
        self
    }

    pub fn with_edge(mut self, a: usize, b: usize, xi: i32, eta: u32) -> Self {
        self.set_edge(a, b, xi, eta);
        self
    }

    pub fn remove_edge(&mut self, a: usize, b: usize) {
        let (lo, hi) = (a.min(b), a.max(b));
        self.edges[pair_index(self.k, lo, hi)] = None;
    }

    fn stored(&self, a: usize, b: usize) -> Option<EdgeLabel> {
        if a == b {
            return None;
        }
        let (lo, hi) = (a.min(b), a.max(b));
        self.edges[pair_index(self.k, lo, hi)]
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.stored(a, b).is_some()
    }

    /// `(xi(a, b), eta(a, b))` in the given orientation.
    pub fn label(&self, a: usize, b: usize) -> Option<(i32, u32)> {
        self.stored(a, b).map(|l| {
            if a < b {
                (l.xi, l.eta)
            } else {
                (l.xi, (self.d - l.eta % self.d) % self.d)
            }
        })
    }

    pub fn xi(&self, a: usize, b: usize) -> Option<i32> {
        self.stored(a, b).map(|l| l.xi)
    }

    pub fn eta(&self, a: usize, b: usize) -> Option<u32> {
        self.label(a, b).map(|(_, e)| e)
    }

    /// Present edges `(a, b, label)` with `a < b`, lexicographically.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, EdgeLabel)> + '_ {
        pairs(self.k).zip(self.edges.iter()).filter_map(|((a, b), l)| l.map(|l| (a, b, l)))
    }

    pub fn edge_count(&self) -> usize {
        self.edges.iter().filter(|e| e.is_some()).count()
    }

    pub fn is_complete(&self) -> bool {
        self.edges.iter().all(Option::is_some)
    }

    pub fn is_strict(&self) -> bool {
        self.edges().any(|(_, _, l)| l.xi == self.r)
    }

    pub fn is_subgraph_of(&self, other: &IterGraph) -> bool {
        self.k == other.k
            && self.d == other.d
            && self.edges.iter().zip(&other.edges).all(|(mine, theirs)| mine.is_none() || mine == theirs)
    }

    /// Every subgraph obtained by deleting a subset of edges (2^|E| of them).
    pub fn edge_subgraphs(&self) -> Vec<IterGraph> {
        let present: Vec<(usize, usize)> = self.edges().map(|(a, b, _)| (a, b)).collect();
        (0u64..1 << present.len())
            .map(|mask| {
                let mut g = self.clone();
                for (i, &(a, b)) in present.iter().enumerate() {
                    if mask >> i & 1 == 0 {
                        g.remove_edge(a, b);
                    }
                }
                g
            })
            .collect()
    }

    pub fn canonical_text(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for IterGraph {
    /// `k r d; a-b:xi,eta; ...` with pairs in lexicographic order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.k, self.r, self.d)?;
        for (a, b, l) in self.edges() {
            write!(f, "; {a}-{b}:{},{}", l.xi, l.eta)?;
        }
        Ok(())
    }
}

impl FromStr for IterGraph {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = |m: &str| GraphError::Parse(format!("{m} in {s:?}"));
        let mut parts = s.split(';').map(str::trim).filter(|p| !p.is_empty());
        let header = parts.next().ok_or_else(|| bad("empty input"))?;
        let nums: Vec<&str> = header.split_whitespace().collect();
        if nums.len() != 3 {
            return Err(bad("header must be `k r d`"));
        }
        let k: usize = nums[0].parse().map_err(|_| bad("bad k"))?;
        let r: i32 = nums[1].parse().map_err(|_| bad("bad r"))?;
        let d: u32 = nums[2].parse().map_err(|_| bad("bad d"))?;
        if d < 2 {
            return Err(bad("d must be at least 2"));
        }
        let mut g = IterGraph::empty(k, r, d);
        for edge in parts {
            let (pair, lab) = edge.split_once(':').ok_or_else(|| bad("edge needs `a-b:xi,eta`"))?;
            let (a, b) = pair.split_once('-').ok_or_else(|| bad("edge needs `a-b`"))?;
            let (xi, eta) = lab.split_once(',').ok_or_else(|| bad("label needs `xi,eta`"))?;
            let a: usize = a.trim().parse().map_err(|_| bad("bad vertex"))?;
            let b: usize = b.trim().parse().map_err(|_| bad("bad vertex"))?;
            let xi: i32 = xi.trim().parse().map_err(|_| bad("bad xi"))?;
            let eta: u32 = eta.trim().parse().map_err(|_| bad("bad eta"))?;
            if a >= b || b > k || a == 0 {
                return Err(bad("pairs must satisfy 1 <= a < b <= k"));
            }
            if g.has_edge(a, b) {
                return Err(bad("duplicate edge"));
            }
            g.set_edge(a, b, xi, eta);
        }
        Ok(g)
    }
}

/// Checks the labeling rules; reports the first violation.
pub fn validate_graph(g: &IterGraph) -> Result<(), GraphError> {
    if g.d < 2 {
        return Err(GraphError::Invalid(format!("d = {} < 2", g.d)));
    }
    if g.r < -1 {
        return Err(GraphError::Invalid(format!("r = {} < -1", g.r)));
    }
    for (a, b, l) in g.edges() {
        if l.xi < -1 || l.xi > g.r {
            return Err(GraphError::Invalid(format!("edge {a}-{b}: xi = {} outside [-1, {}]", l.xi, g.r)));
        }
        if l.eta >= g.d {
            return Err(GraphError::Invalid(format!("edge {a}-{b}: eta = {} outside [0, {}]", l.eta, g.d - 1)));
        }
        if l.xi == -1 && l.eta != 0 {
            return Err(GraphError::Invalid(format!("edge {a}-{b}: xi = -1 requires eta = 0")));
        }
        if l.xi >= 0 && l.eta == 0 {
            return Err(GraphError::Invalid(format!("edge {a}-{b}: xi >= 0 requires eta in [1, d-1]")));
        }
    }
    Ok(())
}

/// The four triangle rules for the ordered triple `(a, b, c)`; vacuous unless
/// all three edges exist.
fn triple_is_proper(g: &IterGraph, a: usize, b: usize, c: usize) -> bool {
    let (Some((xab, eab)), Some((xbc, ebc)), Some((xac, eac))) = (g.label(a, b), g.label(b, c), g.label(a, c))
    else {
        return true;
    };
    let d = g.d;
    if xab == -1 && xbc == -1 && xac != -1 {
        return false;
    }
    if xab < xbc && !(xac == xbc && eac == ebc) {
        return false;
    }
    if xab >= 0 && xab == xbc {
        if eab + ebc != d {
            if !(xac == xab && eac == (eab + ebc) % d) {
                return false;
            }
        } else if xac >= xab {
            return false;
        }
    }
    true
}

/// Ordered triples of distinct vertices, lexicographically.
fn ordered_triples(k: usize) -> impl Iterator<Item = (usize, usize, usize)> {
    (1..=k).flat_map(move |a| {
        (1..=k).flat_map(move |b| (1..=k).map(move |c| (a, b, c)))
    })
    .filter(|&(a, b, c)| a != b && b != c && a != c)
}

/// Properness, checked over all ordered triples.
pub fn is_proper(g: &IterGraph) -> bool {
    ordered_triples(g.k).all(|(a, b, c)| triple_is_proper(g, a, b, c))
}

/// Blocks of a complete proper strict graph: within-block edges have
/// `xi < r`, cross-block edges `xi = r`. Recomputed from every seed vertex.
pub fn extract_partition(g: &IterGraph) -> Result<Partition, GraphError> {
    if !g.is_complete() {
        return Err(GraphError::NotComplete);
    }
    if g.r < 0 || !g.is_strict() {
        return Err(GraphError::NotStrict);
    }
    let from_seed = |seed: usize| -> Partition {
        let mut blocks: Vec<Vec<usize>> = vec![Vec::new(); g.d as usize];
        for v in 1..=g.k {
            if v == seed {
                blocks[0].push(v);
                continue;
            }
            let (xi, eta) = g.label(seed, v).unwrap();
            if xi < g.r {
                blocks[0].push(v);
            } else {
                blocks[eta as usize].push(v);
            }
        }
        Partition::canonical(blocks)
    };
    let partition = from_seed(1);
    for seed in 2..=g.k {
        if from_seed(seed) != partition {
            return Err(GraphError::Partition(format!("seed {seed} yields a different partition")));
        }
    }
    let t = partition.t();
    if t < 2 || t > g.d as usize {
        return Err(GraphError::Partition(format!("t = {t} outside [2, {}]", g.d)));
    }
    let block_of = |v: usize| partition.blocks.iter().position(|b| b.contains(&v)).unwrap();
    for (a, b, l) in g.edges() {
        let same = block_of(a) == block_of(b);
        if same && l.xi >= g.r {
            return Err(GraphError::Partition(format!("edge {a}-{b} inside a block has xi = r")));
        }
        if !same && l.xi != g.r {
            return Err(GraphError::Partition(format!("edge {a}-{b} across blocks has xi < r")));
        }
    }
    Ok(partition)
}

/// Add edge `a-c` from edges `a-b`, `b-c` by the three generation rules.
/// Rejected when no rule applies or the result is not proper.
pub fn generate_step(g0: &IterGraph, a: usize, b: usize, c: usize) -> Result<IterGraph, GraphError> {
    if a == b || b == c || a == c {
        return Err(GraphError::StepRejected("vertices must be distinct".into()));
    }
    let (Some((xab, eab)), Some((xbc, ebc))) = (g0.label(a, b), g0.label(b, c)) else {
        return Err(GraphError::StepRejected(format!("edges {a}-{b} and {b}-{c} must exist")));
    };
    if g0.has_edge(a, c) {
        return Err(GraphError::StepRejected(format!("edge {a}-{c} already present")));
    }
    let d = g0.d;
    let (xi, eta) = if xab == -1 && xbc == -1 {
        (-1, 0)
    } else if xab >= 0 && xab == xbc && eab + ebc != d {
        (xab, (eab + ebc) % d)
    } else if xab < xbc {
        (xbc, ebc)
    } else {
        return Err(GraphError::StepRejected(format!("no rule applies to {a}-{b}-{c}")));
    };
    let g = g0.clone().with_edge(a, c, xi, eta);
    if !is_proper(&g) {
        return Err(GraphError::StepRejected(format!("adding {a}-{c} breaks properness")));
    }
    Ok(g)
}

/// Order in which candidate triples are tried during saturation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TripleOrder {
    Lexicographic,
    Reverse,
}

/// Apply [`generate_step`] until nothing more can be added.
pub fn maximal_extension(g0: &IterGraph) -> IterGraph {
    maximal_extension_with(g0, TripleOrder::Lexicographic)
}

pub fn maximal_extension_with(g0: &IterGraph, order: TripleOrder) -> IterGraph {
    let mut triples: Vec<_> = ordered_triples(g0.k).collect();
    if order == TripleOrder::Reverse {
        triples.reverse();
    }
    let mut g = g0.clone();
    loop {
        let mut grew = false;
        for &(a, b, c) in &triples {
            if g.has_edge(a, b) && g.has_edge(b, c) && !g.has_edge(a, c) {
                if let Ok(next) = generate_step(&g, a, b, c) {
                    g = next;
                    grew = true;
                }
            }
        }
        if !grew {
            return g;
        }
    }
}

/// A simple path `a_0, ..., a_s` through distinct vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainPath(pub Vec<usize>);

impl ChainPath {
    pub fn is_valid_in(&self, g: &IterGraph) -> bool {
        let v = &self.0;
        let mut seen = vec![false; g.k + 1];
        v.iter().all(|&x| x >= 1 && x <= g.k && !std::mem::replace(&mut seen[x], true))
            && v.windows(2).all(|w| g.has_edge(w[0], w[1]))
    }
}

/// Unimodal `xi` along the path with no two adjacent equalities, and no
/// cancelling twists where two consecutive non-negative levels agree.
pub fn is_potentially_complete(g: &IterGraph, path: &ChainPath) -> bool {
    if !path.is_valid_in(g) {
        return false;
    }
    let steps: Vec<(i32, u32)> = path.0.windows(2).map(|w| g.label(w[0], w[1]).unwrap()).collect();
    let xs: Vec<i32> = steps.iter().map(|s| s.0).collect();
    // unimodal: once it strictly decreases it never strictly increases
    let mut descending = false;
    for w in xs.windows(2) {
        if w[1] < w[0] {
            descending = true;
        } else if w[1] > w[0] && descending {
            return false;
        }
    }
    if xs.windows(3).any(|w| w[0] == w[1] && w[1] == w[2]) {
        return false;
    }
    steps.windows(2).all(|w| {
        let ((x1, e1), (x2, e2)) = (w[0], w[1]);
        !(x1 == x2 && x1 >= 0 && (e1 + e2) % g.d == 0)
    })
}

/// The unique path between `from` and `to` in an acyclic graph.
fn tree_path(g: &IterGraph, from: usize, to: usize) -> Option<ChainPath> {
    let mut parent = vec![0usize; g.k + 1];
    let mut seen = vec![false; g.k + 1];
    let mut queue = VecDeque::from([from]);
    seen[from] = true;
    while let Some(x) = queue.pop_front() {
        if x == to {
            let mut path = vec![to];
            let mut y = to;
            while y != from {
                y = parent[y];
                path.push(y);
            }
            path.reverse();
            return Some(ChainPath(path));
        }
        for y in 1..=g.k {
            if !seen[y] && g.has_edge(x, y) {
                seen[y] = true;
                parent[y] = x;
                queue.push_back(y);
            }
        }
    }
    None
}

/// Spanning, acyclic, and every connecting path potentially complete.
pub fn is_tree(g: &IterGraph) -> bool {
    if validate_graph(g).is_err() {
        return false;
    }
    if g.k == 0 {
        return g.edge_count() == 0;
    }
    // connected with k - 1 edges <=> spanning tree
    if g.edge_count() != g.k - 1 {
        return false;
    }
    pairs(g.k).all(|(a, b)| tree_path(g, a, b).is_some_and(|p| is_potentially_complete(g, &p)))
}

fn check_cap(candidates: u128) -> Result<(), GraphError> {
    if candidates > ENUMERATION_CAP as u128 {
        Err(GraphError::Cap { candidates })
    } else {
        Ok(())
    }
}

/// Every complete proper `(r, k, d)`-graph, in lexicographic label order.
pub fn enumerate_complete_proper(r: i32, k: usize, d: u32) -> Result<Vec<IterGraph>, GraphError> {
    if d < 2 || r < -1 {
        return Err(GraphError::Invalid(format!("need d >= 2 and r >= -1, got d = {d}, r = {r}")));
    }
    let space = label_space(r, d);
    let num_edges = k * k.saturating_sub(1) / 2;
    check_cap((space.len() as u128).saturating_pow(num_edges as u32))?;

    // triples (a, b, c) of unordered vertices, indexed by their largest pair
    // index so each is checked exactly once, when its last edge is set
    let all_pairs: Vec<(usize, usize)> = pairs(k).collect();
    let mut closing: Vec<Vec<(usize, usize, usize)>> = vec![Vec::new(); num_edges];
    for a in 1..=k {
        for b in a + 1..=k {
            for c in b + 1..=k {
                closing[pair_index(k, b, c)].push((a, b, c));
            }
        }
    }

    let mut out = Vec::new();
    let mut g = IterGraph::empty(k, r, d);
    fn go(
        idx: usize,
        g: &mut IterGraph,
        space: &[EdgeLabel],
        all_pairs: &[(usize, usize)],
        closing: &[Vec<(usize, usize, usize)>],
        out: &mut Vec<IterGraph>,
    ) {
        if idx == all_pairs.len() {
            out.push(g.clone());
            return;
        }
        for &label in space {
            g.edges[idx] = Some(label);
            let ok = closing[idx].iter().all(|&(a, b, c)| {
                [(a, b, c), (a, c, b), (b, a, c), (b, c, a), (c, a, b), (c, b, a)]
                    .into_iter()
                    .all(|(x, y, z)| triple_is_proper(g, x, y, z))
            });
            if ok {
                go(idx + 1, g, space, all_pairs, closing, out);
            }
        }
        g.edges[idx] = None;
    }
    go(0, &mut g, &space, &all_pairs, &closing, &mut out);
    Ok(out)
}

/// Edge sets of spanning trees on `{1..k}` (as lists of pairs).
fn spanning_tree_shapes(k: usize) -> Vec<Vec<(usize, usize)>> {
    if k <= 1 {
        return vec![Vec::new()];
    }
    let all: Vec<(usize, usize)> = pairs(k).collect();
    let mut out = Vec::new();
    let mut chosen = Vec::new();
    fn go(
        start: usize,
        need: usize,
        k: usize,
        all: &[(usize, usize)],
        chosen: &mut Vec<(usize, usize)>,
        out: &mut Vec<Vec<(usize, usize)>>,
    ) {
        if need == 0 {
            // k - 1 edges form a tree iff they connect everything
            let mut root: Vec<usize> = (0..=k).collect();
            fn find(root: &mut [usize], x: usize) -> usize {
                if root[x] != x {
                    let top = find(root, root[x]);
                    root[x] = top;
                }
                root[x]
            }
            let mut merged = 0;
            for &(a, b) in chosen.iter() {
                let (ra, rb) = (find(&mut root, a), find(&mut root, b));
                if ra != rb {
                    root[ra] = rb;
                    merged += 1;
                }
            }
            if merged == k - 1 {
                out.push(chosen.clone());
            }
            return;
        }
        for i in start..all.len() {
            if all.len() - i < need {
                break;
            }
            chosen.push(all[i]);
            go(i + 1, need - 1, k, all, chosen, out);
            chosen.pop();
        }
    }
    go(0, k - 1, k, &all, &mut chosen, &mut out);
    out
}

/// Every labeled `(r, k, d)`-tree.
pub fn enumerate_trees(r: i32, k: usize, d: u32) -> Result<Vec<IterGraph>, GraphError> {
    if d < 2 || r < -1 {
        return Err(GraphError::Invalid(format!("need d >= 2 and r >= -1, got d = {d}, r = {r}")));
    }
    let space = label_space(r, d);
    let shapes = spanning_tree_shapes(k);
    let per_shape = (space.len() as u128).saturating_pow(k.saturating_sub(1) as u32);
    check_cap(per_shape.saturating_mul(shapes.len() as u128))?;
    let mut out = Vec::new();
    for shape in &shapes {
        for mut code in 0..per_shape as usize {
            let mut t = IterGraph::empty(k, r, d);
            // last edge varies fastest
            for &(a, b) in shape.iter().rev() {
                let l = space[code % space.len()];
                code /= space.len();
                t.set_edge(a, b, l.xi, l.eta);
            }
            if is_tree(&t) {
                out.push(t);
            }
        }
    }
    out.sort();
    Ok(out)
}

/// `(d-1)!/(d-t)! * prod_i U(r-1, |A_i|)`: complete proper strict graphs
/// whose top-level partition is `blocks`.
pub fn count_partition_graphs(blocks: &Partition, r: i32, d: u32) -> Result<BigUint, GraphError> {
    let t = blocks.t();
    if t == 0 || t > d as usize {
        return Err(GraphError::BlockCount { t, d });
    }
    if r < 0 {
        return Err(RecurError::LevelTooSmall(r).into());
    }
    let prev = recur::e_coeffs::<num_rational::BigRational>(d, r - 1)?;
    let mut acc = falling_twist_count(d, t);
    for b in &blocks.blocks {
        acc *= prev.u(b.len() as u32)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(text: &str) -> IterGraph {
        text.parse().unwrap()
    }

    #[test]
    fn pair_indexing_is_lexicographic() {
        for k in 2..7 {
            for (i, (a, b)) in pairs(k).enumerate() {
                assert_eq!(pair_index(k, a, b), i);
            }
        }
    }

    #[test]
    fn canonical_text_round_trip() {
        let graph = IterGraph::empty(3, 0, 2).with_edge(2, 3, 0, 1).with_edge(1, 2, 0, 1).with_edge(3, 1, -1, 0);
        assert_eq!(graph.to_string(), "3 0 2; 1-2:0,1; 1-3:-1,0; 2-3:0,1");
        assert_eq!(g(&graph.to_string()), graph);
        assert_eq!(g("1 -1 2").to_string(), "1 -1 2");
        assert!("3 0".parse::<IterGraph>().is_err());
        assert!("2 0 2; 2-1:0,1".parse::<IterGraph>().is_err());
        assert!("2 0 2; 1-2:0,1; 1-2:0,1".parse::<IterGraph>().is_err());
    }

    #[test]
    fn antisymmetric_twists() {
        let graph = IterGraph::empty(2, 1, 3).with_edge(2, 1, 1, 1);
        assert_eq!(graph.label(2, 1), Some((1, 1)));
        assert_eq!(graph.label(1, 2), Some((1, 2)));
    }

    #[test]
    fn validation_examples() {
        assert!(validate_graph(&g("2 0 2; 1-2:-1,0")).is_ok());
        assert!(validate_graph(&g("2 0 2; 1-2:0,0")).is_err());
        assert!(validate_graph(&g("2 1 3; 1-2:1,1")).is_ok());
        assert!(validate_graph(&g("2 1 3; 1-2:-1,2")).is_err());
        assert!(validate_graph(&g("2 1 3; 1-2:2,1")).is_err());
        assert!(validate_graph(&g("2 1 3; 1-2:0,3")).is_err());
    }

    #[test]
    fn properness_examples() {
        assert!(is_proper(&g("3 0 2; 1-2:0,1; 1-3:-1,0; 2-3:0,1")));
        assert!(!is_proper(&g("3 0 2; 1-2:0,1; 1-3:0,1; 2-3:0,1")));
        assert!(is_proper(&g("2 1 2; 1-2:1,1")));
        assert!(is_proper(&g("1 0 2")));
        // rule 1: two equalities force a third
        assert!(!is_proper(&g("3 0 2; 1-2:-1,0; 1-3:0,1; 2-3:-1,0")));
    }

    #[test]
    fn partition_examples() {
        let p = extract_partition(&g("2 1 2; 1-2:1,1")).unwrap();
        assert_eq!(p.blocks, vec![vec![1], vec![2]]);
        let p = extract_partition(&g("3 0 2; 1-2:0,1; 1-3:-1,0; 2-3:0,1")).unwrap();
        assert_eq!(p.blocks, vec![vec![1, 3], vec![2]]);
        assert_eq!(extract_partition(&g("2 1 2; 1-2:0,1")), Err(GraphError::NotStrict));
        assert_eq!(extract_partition(&g("3 1 2; 1-2:1,1")), Err(GraphError::NotComplete));
    }

    #[test]
    fn generation_examples() {
        let g0 = g("3 1 3; 1-2:-1,0; 2-3:-1,0");
        assert_eq!(generate_step(&g0, 1, 2, 3).unwrap().label(1, 3), Some((-1, 0)));
        let g0 = g("3 1 3; 1-2:0,1; 2-3:0,1");
        assert_eq!(generate_step(&g0, 1, 2, 3).unwrap().label(1, 3), Some((0, 2)));
        let g0 = g("3 1 3; 1-2:-1,0; 2-3:1,2");
        assert_eq!(generate_step(&g0, 1, 2, 3).unwrap().label(1, 3), Some((1, 2)));
        // cancelling twists at d = 2: nothing applies
        let g0 = g("3 0 2; 1-2:0,1; 2-3:0,1");
        assert!(generate_step(&g0, 1, 2, 3).is_err());
        // decreasing pair handled from the other end
        let g0 = g("3 1 3; 1-2:1,1; 2-3:-1,0");
        assert!(generate_step(&g0, 1, 2, 3).is_err());
        assert_eq!(generate_step(&g0, 3, 2, 1).unwrap().label(3, 1), Some((1, 2)));
    }

    #[test]
    fn extension_examples() {
        let ext = maximal_extension(&g("3 0 2; 1-2:-1,0; 2-3:-1,0"));
        assert_eq!(ext, g("3 0 2; 1-2:-1,0; 1-3:-1,0; 2-3:-1,0"));
        let stuck = g("3 0 2; 1-2:0,1; 2-3:0,1");
        assert_eq!(maximal_extension(&stuck), stuck);
        let full = g("3 0 2; 1-2:0,1; 1-3:-1,0; 2-3:0,1");
        assert_eq!(maximal_extension(&full), full);
    }

    #[test]
    fn chain_examples() {
        let host = g("4 1 2; 1-2:0,1; 2-3:1,1; 3-4:0,1");
        assert!(is_potentially_complete(&host, &ChainPath(vec![1, 2])));
        assert!(is_potentially_complete(&host, &ChainPath(vec![1, 2, 3, 4])));
        let host = g("4 1 2; 1-2:1,1; 2-3:0,1; 3-4:1,1");
        assert!(!is_potentially_complete(&host, &ChainPath(vec![1, 2, 3, 4])));
        // equal levels with cancelling twists
        let host = g("3 1 3; 1-2:0,1; 2-3:0,2");
        assert!(!is_potentially_complete(&host, &ChainPath(vec![1, 2, 3])));
        let host = g("3 1 3; 1-2:0,1; 2-3:0,1");
        assert!(is_potentially_complete(&host, &ChainPath(vec![1, 2, 3])));
        // three equal levels in a row
        let host = g("4 1 5; 1-2:0,1; 2-3:0,1; 3-4:0,1");
        assert!(!is_potentially_complete(&host, &ChainPath(vec![1, 2, 3, 4])));
        assert!(!is_potentially_complete(&host, &ChainPath(vec![1, 3])));
    }

    #[test]
    fn tree_examples() {
        assert!(is_tree(&g("2 0 2; 1-2:0,1")));
        assert!(is_tree(&g("3 0 2; 1-2:-1,0; 1-3:-1,0")));
        assert!(!is_tree(&g("3 0 2; 1-2:-1,0; 1-3:-1,0; 2-3:-1,0")));
        assert!(!is_tree(&g("3 0 2; 1-2:-1,0")));
        assert!(is_tree(&g("1 0 2")));
    }

    #[test]
    fn enumeration_examples() {
        for d in 2..4 {
            for k in 0..5 {
                assert_eq!(enumerate_complete_proper(-1, k, d).unwrap().len(), 1);
            }
        }
        let graphs = enumerate_complete_proper(1, 2, 2).unwrap();
        let texts: Vec<String> = graphs.iter().map(|x| x.to_string()).collect();
        assert_eq!(texts, vec!["2 1 2; 1-2:-1,0", "2 1 2; 1-2:0,1", "2 1 2; 1-2:1,1"]);
        assert_eq!(enumerate_complete_proper(0, 3, 2).unwrap().len(), 4);
        assert!(matches!(enumerate_complete_proper(3, 6, 4), Err(GraphError::Cap { .. })));
    }

    #[test]
    fn enumeration_matches_naive_filter() {
        // unpruned odometer over every labeling as an independent oracle
        for (r, k, d) in [(0, 3, 2), (1, 3, 2), (1, 3, 3), (0, 4, 2), (1, 4, 2)] {
            let space = label_space(r, d);
            let m = k * (k - 1) / 2;
            let mut naive = Vec::new();
            let total = space.len().pow(m as u32);
            for mut code in 0..total {
                let mut labels = vec![EdgeLabel::EQUAL; m];
                for slot in labels.iter_mut().rev() {
                    *slot = space[code % space.len()];
                    code /= space.len();
                }
                let graph = IterGraph::complete(k, r, d, &labels);
                if is_proper(&graph) {
                    naive.push(graph);
                }
            }
            assert_eq!(enumerate_complete_proper(r, k, d).unwrap(), naive, "r={r} k={k} d={d}");
        }
    }

    #[test]
    fn tree_enumeration_examples() {
        assert_eq!(enumerate_trees(2, 1, 3).unwrap(), vec![IterGraph::empty(1, 2, 3)]);
        for (r, d) in [(0, 2), (1, 2), (1, 3)] {
            assert_eq!(enumerate_trees(r, 2, d).unwrap(), enumerate_complete_proper(r, 2, d).unwrap());
        }
        let trees = enumerate_trees(1, 3, 2).unwrap();
        assert!(!trees.is_empty());
        assert!(trees.iter().all(|t| t.edge_count() == 2));
    }

    #[test]
    fn partition_count_examples() {
        let two = Partition::canonical(vec![vec![1], vec![2]]);
        assert_eq!(count_partition_graphs(&two, 1, 2).unwrap(), BigUint::from(1u8));
        let three = Partition::canonical(vec![vec![1], vec![2], vec![3]]);
        assert_eq!(count_partition_graphs(&three, 0, 3).unwrap(), BigUint::from(2u8));
        assert_eq!(count_partition_graphs(&three, 0, 2), Err(GraphError::BlockCount { t: 3, d: 2 }));
    }

    #[test]
    fn strict_graphs_partition_cleanly() {
        for (r, k, d) in [(0, 4, 2), (1, 4, 2), (1, 4, 3), (2, 3, 3), (0, 4, 4)] {
            for graph in enumerate_complete_proper(r, k, d).unwrap() {
                if graph.is_strict() {
                    let p = extract_partition(&graph).unwrap();
                    assert!(p.t() >= 2 && p.t() <= d as usize);
                    assert_eq!(p.k(), k);
                } else {
                    assert_eq!(extract_partition(&graph), Err(GraphError::NotStrict));
                }
            }
        }
    }
}
