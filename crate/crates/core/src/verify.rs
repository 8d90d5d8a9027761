//! Certificate checking and small-scale exact oracles.
//!
//! Nothing here calls into the constructor; trees are checked with their own
//! traversal against the adjacency of [`AugmentedCube`].

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::construct::{SteinerTree, TreeFamily};
use crate::paths::{disjoint_paths, PathOutcome, PathSystem};
use crate::topology::{AugmentedCube, Edge, Vertex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ViolationKind {
    NonEdge,
    Cycle,
    Disconnected,
    TerminalDegree,
    SharedVertex,
    SharedEdge,
    WrongTerminals,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Violation {
    pub kind: ViolationKind,
    pub trees: Vec<usize>,
    pub vertices: Vec<Vertex>,
    pub edges: Vec<Edge>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerificationReport {
    pub accepted: bool,
    pub violations: Vec<Violation>,
}

impl VerificationReport {
    fn from_violations(violations: Vec<Violation>) -> Self {
        VerificationReport { accepted: violations.is_empty(), violations }
    }

    pub fn has(&self, kind: ViolationKind) -> bool {
        self.violations.iter().any(|v| v.kind == kind)
    }
}

fn violation(kind: ViolationKind, trees: Vec<usize>, vertices: Vec<Vertex>, edges: Vec<Edge>) -> Violation {
    Violation { kind, trees, vertices, edges }
}

struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu { parent: (0..n).collect() }
    }

    fn find(&mut self, mut a: usize) -> usize {
        while self.parent[a] != a {
            self.parent[a] = self.parent[self.parent[a]];
            a = self.parent[a];
        }
        a
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra] = rb;
        true
    }
}

fn terminals_ok(cube: &AugmentedCube, terminals: &[Vertex; 3]) -> bool {
    let distinct: BTreeSet<Vertex> = terminals.iter().copied().collect();
    distinct.len() == 3 && terminals.iter().all(|&t| cube.check(t).is_ok())
}

fn check_tree(cube: &AugmentedCube, idx: usize, tree: &SteinerTree, out: &mut Vec<Violation>) {
    if !terminals_ok(cube, &tree.terminals) {
        out.push(violation(ViolationKind::WrongTerminals, vec![idx], tree.terminals.to_vec(), vec![]));
    }

    for &e in &tree.edges {
        let (a, b) = e.endpoints();
        if !cube.is_adjacent(a, b).unwrap_or(false) {
            out.push(violation(ViolationKind::NonEdge, vec![idx], vec![], vec![e]));
        }
    }

    let mut ids: HashMap<Vertex, usize> = HashMap::new();
    let mut order: Vec<Vertex> = Vec::new();
    for v in tree.terminals.iter().copied().chain(tree.edges.iter().flat_map(|e| {
        let (a, b) = e.endpoints();
        [a, b]
    })) {
        ids.entry(v).or_insert_with(|| {
            order.push(v);
            order.len() - 1
        });
    }

    let mut dsu = Dsu::new(order.len());
    let mut seen_edges = HashSet::new();
    for &e in &tree.edges {
        let (a, b) = e.endpoints();
        if !seen_edges.insert(e) || !dsu.union(ids[&a], ids[&b]) {
            out.push(violation(ViolationKind::Cycle, vec![idx], vec![], vec![e]));
        }
    }

    let root = dsu.find(0);
    let stray: Vec<Vertex> = order.iter().copied().filter(|v| dsu.find(ids[v]) != root).collect();
    if !stray.is_empty() {
        out.push(violation(ViolationKind::Disconnected, vec![idx], stray, vec![]));
    }

    for &t in &tree.terminals {
        let degree = seen_edges.iter().filter(|e| e.contains(t)).count();
        if degree != 1 {
            out.push(violation(ViolationKind::TerminalDegree, vec![idx], vec![t], vec![]));
        }
    }
}

/// Checks one pendant Steiner tree: real edges, acyclic, connected, every
/// terminal present as a leaf.
pub fn verify_tree(cube: &AugmentedCube, tree: &SteinerTree) -> VerificationReport {
    let mut out = Vec::new();
    check_tree(cube, 0, tree, &mut out);
    VerificationReport::from_violations(out)
}

/// Checks every tree and pairwise internal disjointness: no shared edge and
/// no shared vertex outside the terminal set.
pub fn verify_family(cube: &AugmentedCube, family: &TreeFamily) -> VerificationReport {
    let mut out = Vec::new();
    if family.dim != cube.dim() || !terminals_ok(cube, &family.terminals) {
        out.push(violation(ViolationKind::WrongTerminals, vec![], family.terminals.to_vec(), vec![]));
    }
    let terminals: BTreeSet<Vertex> = family.terminals.iter().copied().collect();

    let mut edge_owner: HashMap<Edge, usize> = HashMap::new();
    let mut vertex_owner: HashMap<Vertex, usize> = HashMap::new();
    let mut shared_edges: BTreeMap<(usize, usize), Vec<Edge>> = BTreeMap::new();
    let mut shared_vertices: BTreeMap<(usize, usize), Vec<Vertex>> = BTreeMap::new();

    for (i, tree) in family.trees.iter().enumerate() {
        let tree_terms: BTreeSet<Vertex> = tree.terminals.iter().copied().collect();
        if tree_terms != terminals {
            out.push(violation(ViolationKind::WrongTerminals, vec![i], tree.terminals.to_vec(), vec![]));
        }
        check_tree(cube, i, tree, &mut out);

        let edges: BTreeSet<Edge> = tree.edges.iter().copied().collect();
        let inner: BTreeSet<Vertex> = edges
            .iter()
            .flat_map(|e| {
                let (a, b) = e.endpoints();
                [a, b]
            })
            .filter(|v| !terminals.contains(v))
            .collect();
        for e in edges {
            match edge_owner.get(&e) {
                Some(&j) => shared_edges.entry((j, i)).or_default().push(e),
                None => {
                    edge_owner.insert(e, i);
                }
            }
        }
        for v in inner {
            match vertex_owner.get(&v) {
                Some(&j) => shared_vertices.entry((j, i)).or_default().push(v),
                None => {
                    vertex_owner.insert(v, i);
                }
            }
        }
    }

    for ((a, b), vs) in shared_vertices {
        out.push(violation(ViolationKind::SharedVertex, vec![a, b], vs, vec![]));
    }
    for ((a, b), es) in shared_edges {
        out.push(violation(ViolationKind::SharedEdge, vec![a, b], vec![], es));
    }
    VerificationReport::from_violations(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PathSystemError {
    #[error("path {0} does not run from source to sink")]
    Endpoints(usize),
    #[error("path {0} uses non-edge {1:?}")]
    NonEdge(usize, Edge),
    #[error("path {0} repeats vertex {1}")]
    Repeat(usize, Vertex),
    #[error("paths {0} and {1} share interior vertex {2}")]
    SharedInterior(usize, usize, Vertex),
    #[error("edge {0:?} used twice")]
    SharedEdge(Edge),
}

/// Validates a Menger certificate: endpoints, adjacency, simplicity, and
/// pairwise internal disjointness.
pub fn check_path_system(cube: &AugmentedCube, ps: &PathSystem) -> Result<(), PathSystemError> {
    let mut interior_owner: HashMap<Vertex, usize> = HashMap::new();
    let mut edges = HashSet::new();
    for (i, p) in ps.paths.iter().enumerate() {
        let vs = &p.vertices;
        if vs.len() < 2 || vs[0] != ps.source || vs[vs.len() - 1] != ps.sink {
            return Err(PathSystemError::Endpoints(i));
        }
        let mut seen = HashSet::new();
        for &w in vs {
            if !seen.insert(w) {
                return Err(PathSystemError::Repeat(i, w));
            }
        }
        for pair in vs.windows(2) {
            let e = Edge::new(pair[0], pair[1]);
            if !cube.is_adjacent(pair[0], pair[1]).unwrap_or(false) {
                return Err(PathSystemError::NonEdge(i, e));
            }
            if !edges.insert(e) {
                return Err(PathSystemError::SharedEdge(e));
            }
        }
        for &w in &vs[1..vs.len() - 1] {
            if let Some(j) = interior_owner.insert(w, i) {
                return Err(PathSystemError::SharedInterior(j, i, w));
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("budget must be positive")]
    ZeroBudget,
    #[error("need at least two distinct terminals of the cube's dimension")]
    BadTerminals,
    #[error("the exact oracle handles at most 64 vertices (AQ_{0} has more)")]
    TooLarge(u32),
}

/// Result of the packing oracle. `exact` is false when the budget ran out;
/// then `lower..=upper` brackets the true value.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OracleResult {
    pub lower: usize,
    pub upper: usize,
    pub exact: bool,
    pub nodes: u64,
    /// Edge sets of a largest family found.
    pub witness: Vec<Vec<Edge>>,
}

/// Maximum number of internally disjoint pendant `S`-Steiner trees.
///
/// Two pendant trees with at least three terminals never use a terminal
/// to terminal edge, so a tree is determined up to disjointness by its set
/// `U` of non-terminal vertices: `U` must induce a connected subgraph and
/// touch every terminal. Inclusion-minimal such sets are enumerated by
/// size (connected sets are grown one vertex at a time and never extended
/// past validity), then packed exactly by branch and bound. Budget counts
/// generated sets plus packing nodes.
pub fn oracle_tau(cube: &AugmentedCube, terminals: &[Vertex], budget: u64) -> Result<OracleResult, OracleError> {
    if budget == 0 {
        return Err(OracleError::ZeroBudget);
    }
    let distinct: BTreeSet<Vertex> = terminals.iter().copied().collect();
    if distinct.len() < 2 || distinct.len() != terminals.len() || terminals.iter().any(|&t| cube.check(t).is_err()) {
        return Err(OracleError::BadTerminals);
    }
    if cube.dim() > 6 {
        return Err(OracleError::TooLarge(cube.dim()));
    }

    let count = cube.vertex_count() as usize;
    let nbr: Vec<u64> = cube
        .vertices()
        .map(|v| cube.neighbors(v).unwrap().iter().fold(0u64, |m, w| m | 1 << w.bits()))
        .collect();
    let term_mask = terminals.iter().fold(0u64, |m, t| m | 1 << t.bits());
    let all = if count == 64 { u64::MAX } else { (1u64 << count) - 1 };
    let free = all & !term_mask;
    let touch: Vec<u64> = terminals.iter().map(|t| nbr[t.bits() as usize] & free).collect();
    let direct = usize::from(terminals.len() == 2 && nbr[terminals[0].bits() as usize] >> terminals[1].bits() & 1 == 1);

    let valid = |u: u64| u != 0 && touch.iter().all(|&t| t & u != 0) && connected(u, &nbr);

    let mut nodes = 0u64;
    let mut exhaustive = true;
    let mut candidates: Vec<u64> = Vec::new();
    let mut level: Vec<u64> = bits(free).map(|b| 1u64 << b).collect();
    'grow: while !level.is_empty() {
        let mut next: BTreeSet<u64> = BTreeSet::new();
        for &u in &level {
            nodes += 1;
            if nodes > budget {
                exhaustive = false;
                break 'grow;
            }
            if valid(u) {
                if bits(u).all(|b| !valid(u & !(1 << b))) {
                    candidates.push(u);
                }
                continue;
            }
            let frontier = bits(u).fold(0u64, |m, b| m | nbr[b]) & free & !u;
            next.extend(bits(frontier).map(|b| u | 1 << b));
        }
        level = next.into_iter().collect();
    }

    let upper0 = touch.iter().map(|t| t.count_ones() as usize).min().unwrap_or(0) + direct;
    let mut by_vertex: Vec<Vec<u64>> = vec![Vec::new(); count];
    for &c in &candidates {
        for b in bits(c) {
            by_vertex[b].push(c);
        }
    }
    let mut packer = Packer {
        touch: &touch,
        by_vertex: &by_vertex,
        best: Vec::new(),
        chosen: Vec::new(),
        limit: upper0 - direct,
        nodes,
        budget,
        out_of_budget: false,
    };
    packer.search(!free & all);
    let nodes = packer.nodes;
    let exact = exhaustive && !packer.out_of_budget;
    let best = packer.best.clone();

    let mut witness: Vec<Vec<Edge>> = Vec::new();
    if direct == 1 {
        witness.push(vec![Edge::new(terminals[0], terminals[1])]);
    }
    for u in best {
        witness.push(tree_on(cube, terminals, u, &nbr));
    }
    let lower = witness.len();
    Ok(OracleResult { lower, upper: if exact { lower } else { upper0.max(lower) }, exact, nodes, witness })
}

fn bits(mut m: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let b = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(b)
        }
    })
}

fn connected(u: u64, nbr: &[u64]) -> bool {
    if u == 0 {
        return false;
    }
    let mut reach = u & u.wrapping_neg();
    loop {
        let grown = bits(reach).fold(reach, |m, b| m | (nbr[b] & u));
        if grown == reach {
            return reach == u;
        }
        reach = grown;
    }
}

/// BFS spanning tree of `G[U]` plus one pendant edge per terminal.
fn tree_on(cube: &AugmentedCube, terminals: &[Vertex], u: u64, nbr: &[u64]) -> Vec<Edge> {
    let v = |b: usize| cube.vertex(b as u64).unwrap();
    let root = u.trailing_zeros() as usize;
    let mut seen = 1u64 << root;
    let mut queue = std::collections::VecDeque::from([root]);
    let mut edges = Vec::new();
    while let Some(a) = queue.pop_front() {
        for b in bits(nbr[a] & u & !seen) {
            seen |= 1 << b;
            edges.push(Edge::new(v(a), v(b)));
            queue.push_back(b);
        }
    }
    for &t in terminals {
        let a = (nbr[t.bits() as usize] & u).trailing_zeros() as usize;
        edges.push(Edge::new(t, v(a)));
    }
    edges.sort();
    edges
}

struct Packer<'a> {
    touch: &'a [u64],
    by_vertex: &'a [Vec<u64>],
    best: Vec<u64>,
    chosen: Vec<u64>,
    limit: usize,
    nodes: u64,
    budget: u64,
    out_of_budget: bool,
}

impl Packer<'_> {
    /// `blocked` holds terminals, vertices in chosen sets, and vertices
    /// decided to stay unused.
    fn search(&mut self, blocked: u64) {
        if self.out_of_budget || self.best.len() == self.limit {
            return;
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            self.out_of_budget = true;
            return;
        }
        if self.chosen.len() > self.best.len() {
            self.best = self.chosen.clone();
        }
        let (room, t) = self
            .touch
            .iter()
            .enumerate()
            .map(|(i, &m)| ((m & !blocked).count_ones() as usize, i))
            .min()
            .expect("at least two terminals");
        if self.chosen.len() + room <= self.best.len() {
            return;
        }
        let a = (self.touch[t] & !blocked).trailing_zeros() as usize;
        for &c in &self.by_vertex[a] {
            if c & blocked == 0 {
                self.chosen.push(c);
                self.search(blocked | c);
                self.chosen.pop();
                if self.out_of_budget || self.best.len() == self.limit {
                    return;
                }
            }
        }
        self.search(blocked | 1 << a);
    }
}

/// Largest `m` not excluded by the degree bound `tau_k(G) >= m => delta >= k + m - 1`.
pub fn hager_upper_bound(cube: &AugmentedCube, k: u32) -> u32 {
    assert!(k >= 2, "pendant tree-connectivity needs k >= 2");
    (cube.degree() + 1).saturating_sub(k)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConnectivityReport {
    pub value: usize,
    pub exact: bool,
    pub pairs_checked: usize,
    /// `"all-pairs"` or `"from-origin"` (exact by vertex transitivity).
    pub method: &'static str,
}

/// Vertex connectivity as the minimum, over vertex pairs, of the number of
/// internally disjoint paths. Every pair is tried up to n = 5; beyond that
/// only pairs containing the origin, which is exact because translations
/// act transitively on the vertices.
pub fn connectivity(cube: &AugmentedCube) -> ConnectivityReport {
    let k = cube.degree() as usize;
    let local = |a: Vertex, b: Vertex| match disjoint_paths(cube, a, b, k).expect("valid endpoints") {
        PathOutcome::Paths(ps) => ps.len(),
        PathOutcome::Cut(cut) => cut.size(),
    };
    let vs: Vec<Vertex> = cube.vertices().collect();
    let (pairs, method): (Vec<(Vertex, Vertex)>, _) = if cube.dim() <= 5 {
        let all = vs.iter().enumerate().flat_map(|(i, &a)| vs[i + 1..].iter().map(move |&b| (a, b)));
        (all.collect(), "all-pairs")
    } else {
        (vs[1..].iter().map(|&b| (vs[0], b)).collect(), "from-origin")
    };
    let value = pairs.iter().map(|&(a, b)| local(a, b)).min().unwrap_or(0);
    ConnectivityReport { value, exact: true, pairs_checked: pairs.len(), method }
}
