//! Internally disjoint path systems, connector trees and Hamiltonian paths
//! inside views of AQ_n.
//!
//! `disjoint_paths` is a unit-vertex-capacity max flow (vertex splitting,
//! shortest augmenting paths, neighbours scanned in ascending label order).
//! By Menger's theorem it either returns `k` internally disjoint paths or a
//! vertex cut of size `< k` that separates the endpoints.

use std::collections::{HashMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::topology::{AugmentedCube, Edge, GraphView, Vertex};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PathError {
    #[error("endpoints coincide ({0})")]
    SameEndpoints(Vertex),
    #[error("path count must be at least 1")]
    ZeroPaths,
    #[error("vertex {0} is outside the view")]
    OutsideView(Vertex),
    #[error("{0} is not an endpoint of the path system")]
    NotAnEndpoint(Vertex),
    #[error("path index {index} out of range (system has {len} paths)")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("pin unsatisfiable: {0}")]
    Pin(String),
    #[error("vertex map undefined at {0}")]
    MapUndefined(Vertex),
    #[error("vertex map breaks adjacency between {0} and {1}")]
    MapNotAdjacencyPreserving(Vertex, Vertex),
    #[error("view is disconnected")]
    DisconnectedView,
    #[error("search budget of {0} nodes exhausted")]
    BudgetExhausted(u64),
}

pub type Result<T, E = PathError> = std::result::Result<T, E>;

/// A simple path, listed from one end to the other.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Path {
    pub vertices: Vec<Vertex>,
}

impl Path {
    pub fn new(vertices: Vec<Vertex>) -> Path {
        assert!(!vertices.is_empty(), "a path has at least one vertex");
        Path { vertices }
    }

    pub fn first(&self) -> Vertex {
        self.vertices[0]
    }

    pub fn last(&self) -> Vertex {
        *self.vertices.last().expect("non-empty path")
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.vertices.windows(2).map(|w| Edge::new(w[0], w[1]))
    }

    pub fn interior(&self) -> &[Vertex] {
        if self.vertices.len() <= 2 {
            &[]
        } else {
            &self.vertices[1..self.vertices.len() - 1]
        }
    }
}

/// `k` paths from `source` to `sink` that pairwise meet only at the ends.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathSystem {
    pub source: Vertex,
    pub sink: Vertex,
    pub paths: Vec<Path>,
}

impl PathSystem {
    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    /// The vertex next to `endpoint` on path `i`.
    pub fn neighbor_along(&self, endpoint: Vertex, i: usize) -> Result<Vertex> {
        let path = self
            .paths
            .get(i)
            .ok_or(PathError::IndexOutOfRange { index: i, len: self.paths.len() })?;
        if endpoint == self.source {
            Ok(path.vertices[1])
        } else if endpoint == self.sink {
            Ok(path.vertices[path.vertices.len() - 2])
        } else {
            Err(PathError::NotAnEndpoint(endpoint))
        }
    }

    /// Neighbours of `endpoint` along every path, in path order.
    pub fn endpoint_neighbors(&self, endpoint: Vertex) -> Result<Vec<Vertex>> {
        (0..self.paths.len()).map(|i| self.neighbor_along(endpoint, i)).collect()
    }
}

/// A vertex cut of size `< k` (plus the direct edge, when the endpoints are
/// adjacent) certifying that `k` disjoint paths do not exist.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinCut {
    pub source: Vertex,
    pub sink: Vertex,
    pub vertices: Vec<Vertex>,
    pub direct_edge: bool,
}

impl MinCut {
    pub fn size(&self) -> usize {
        self.vertices.len() + usize::from(self.direct_edge)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PathOutcome {
    Paths(PathSystem),
    Cut(MinCut),
}

impl PathOutcome {
    pub fn into_paths(self) -> Option<PathSystem> {
        match self {
            PathOutcome::Paths(ps) => Some(ps),
            PathOutcome::Cut(_) => None,
        }
    }
}

const INF: u32 = u32::MAX / 2;

struct Arc {
    to: usize,
    cap: u32,
    orig: u32,
}

struct FlowNet {
    arcs: Vec<Arc>,
    out: Vec<Vec<usize>>,
}

impl FlowNet {
    fn new(nodes: usize) -> Self {
        FlowNet { arcs: Vec::new(), out: vec![Vec::new(); nodes] }
    }

    fn add(&mut self, from: usize, to: usize, cap: u32) {
        self.out[from].push(self.arcs.len());
        self.arcs.push(Arc { to, cap, orig: cap });
        self.out[to].push(self.arcs.len());
        self.arcs.push(Arc { to: from, cap: 0, orig: 0 });
    }

    /// One shortest augmenting path of one unit. Returns false when none exists.
    fn augment(&mut self, s: usize, t: usize) -> bool {
        let mut pred: Vec<Option<usize>> = vec![None; self.out.len()];
        let mut seen = vec![false; self.out.len()];
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(a) = queue.pop_front() {
            if a == t {
                break;
            }
            for &id in &self.out[a] {
                let arc = &self.arcs[id];
                if arc.cap > 0 && !seen[arc.to] {
                    seen[arc.to] = true;
                    pred[arc.to] = Some(id);
                    queue.push_back(arc.to);
                }
            }
        }
        if !seen[t] {
            return false;
        }
        let mut node = t;
        while node != s {
            let id = pred[node].expect("predecessor on augmenting path");
            self.arcs[id].cap -= 1;
            self.arcs[id ^ 1].cap += 1;
            node = self.arcs[id ^ 1].to;
        }
        true
    }

    fn reachable(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.out.len()];
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(a) = queue.pop_front() {
            for &id in &self.out[a] {
                let arc = &self.arcs[id];
                if arc.cap > 0 && !seen[arc.to] {
                    seen[arc.to] = true;
                    queue.push_back(arc.to);
                }
            }
        }
        seen
    }

    fn flow(&self, id: usize) -> u32 {
        self.arcs[id].orig.saturating_sub(self.arcs[id].cap)
    }
}

/// `k` internally disjoint `u`-`v` paths inside `view`, or a cut proving
/// that fewer exist. Deterministic for fixed inputs.
pub fn disjoint_paths<G: GraphView + ?Sized>(view: &G, u: Vertex, v: Vertex, k: usize) -> Result<PathOutcome> {
    if k == 0 {
        return Err(PathError::ZeroPaths);
    }
    for w in [u, v] {
        if !view.contains(w) {
            return Err(PathError::OutsideView(w));
        }
    }
    if u == v {
        return Err(PathError::SameEndpoints(u));
    }

    let verts = view.vertices();
    let index: HashMap<Vertex, usize> = verts.iter().enumerate().map(|(i, &w)| (w, i)).collect();
    let (iu, iv) = (index[&u], index[&v]);
    let inn = |i: usize| 2 * i;
    let out = |i: usize| 2 * i + 1;

    let mut net = FlowNet::new(2 * verts.len());
    for (i, &w) in verts.iter().enumerate() {
        let cap = if i == iu || i == iv { INF } else { 1 };
        net.add(inn(i), out(i), cap);
        // Only vertices (and a direct u-v edge) may appear in a minimum cut.
        for x in view.neighbors(w) {
            let j = index[&x];
            let cap = if i == iu && j == iv { 1 } else { INF };
            net.add(out(i), inn(j), cap);
        }
    }

    let (s, t) = (out(iu), inn(iv));
    let mut value = 0;
    while value < k && net.augment(s, t) {
        value += 1;
    }

    if value < k {
        let seen = net.reachable(s);
        let vertices: Vec<Vertex> = (0..verts.len())
            .filter(|&i| i != iu && i != iv && seen[inn(i)] && !seen[out(i)])
            .map(|i| verts[i])
            .collect();
        let direct_edge = view.neighbors(u).contains(&v);
        let cut = MinCut { source: u, sink: v, vertices, direct_edge };
        debug_assert_eq!(cut.size(), value);
        return Ok(PathOutcome::Cut(cut));
    }

    let mut paths = Vec::with_capacity(k);
    for &first in &net.out[s] {
        if net.arcs[first].orig == 0 || net.flow(first) == 0 {
            continue;
        }
        let mut walk = vec![u];
        let mut node = net.arcs[first].to;
        loop {
            let i = node / 2;
            walk.push(verts[i]);
            if i == iv {
                break;
            }
            let next = net.out[out(i)]
                .iter()
                .copied()
                .find(|&id| net.arcs[id].orig > 0 && net.flow(id) > 0)
                .expect("flow conservation at an internal vertex");
            node = net.arcs[next].to;
        }
        paths.push(Path::new(walk));
    }
    paths.sort_by_key(|p| p.vertices[1]);
    debug_assert_eq!(paths.len(), k);
    Ok(PathOutcome::Paths(PathSystem { source: u, sink: v, paths }))
}

/// Permutes the paths so that each pin `(i, w)` puts the path whose
/// `endpoint`-neighbour is `w` at index `i`. Unpinned paths keep their
/// relative order.
pub fn reorder_paths(ps: &PathSystem, endpoint: Vertex, pins: &[(usize, Vertex)]) -> Result<PathSystem> {
    let neighbors = ps.endpoint_neighbors(endpoint)?;
    let mut slot: Vec<Option<usize>> = vec![None; ps.len()];
    let mut taken = vec![false; ps.len()];
    for &(index, want) in pins {
        if index >= ps.len() {
            return Err(PathError::IndexOutOfRange { index, len: ps.len() });
        }
        let src = neighbors
            .iter()
            .position(|&w| w == want)
            .ok_or_else(|| PathError::Pin(format!("no path leaves {endpoint} through {want}")))?;
        match slot[index] {
            Some(prev) if prev == src => continue,
            Some(_) => return Err(PathError::Pin(format!("index {index} pinned twice"))),
            None => {}
        }
        if taken[src] {
            return Err(PathError::Pin(format!("{want} pinned to two indices")));
        }
        slot[index] = Some(src);
        taken[src] = true;
    }
    let mut rest = (0..ps.len()).filter(|&j| !taken[j]);
    let order: Vec<usize> = slot
        .into_iter()
        .map(|s| s.unwrap_or_else(|| rest.next().expect("as many free paths as free slots")))
        .collect();
    Ok(PathSystem {
        source: ps.source,
        sink: ps.sink,
        paths: order.into_iter().map(|j| ps.paths[j].clone()).collect(),
    })
}

/// Image of a path system under a vertex map; the map must send every path
/// edge to an edge of `host`.
pub fn map_path_system<F>(ps: &PathSystem, host: &AugmentedCube, iso: F) -> Result<PathSystem>
where
    F: Fn(Vertex) -> Option<Vertex>,
{
    let image = |w: Vertex| iso(w).ok_or(PathError::MapUndefined(w));
    let mut paths = Vec::with_capacity(ps.len());
    for p in &ps.paths {
        let vertices = p.vertices.iter().map(|&w| image(w)).collect::<Result<Vec<_>>>()?;
        for pair in vertices.windows(2) {
            if !host.is_adjacent(pair[0], pair[1]).unwrap_or(false) {
                return Err(PathError::MapNotAdjacencyPreserving(pair[0], pair[1]));
            }
        }
        paths.push(Path::new(vertices));
    }
    Ok(PathSystem { source: image(ps.source)?, sink: image(ps.sink)?, paths })
}

fn bfs_parents<G: GraphView + ?Sized>(view: &G, from: Vertex) -> HashMap<Vertex, Vertex> {
    let mut parent = HashMap::from([(from, from)]);
    let mut queue = VecDeque::from([from]);
    while let Some(a) = queue.pop_front() {
        for b in view.neighbors(a) {
            if let std::collections::hash_map::Entry::Vacant(e) = parent.entry(b) {
                e.insert(a);
                queue.push_back(b);
            }
        }
    }
    parent
}

/// A tree inside `view` whose vertex set contains all `terminals`: the union
/// of breadth-first shortest paths from each terminal to the tree grown so far.
pub fn connector_tree<G: GraphView + ?Sized>(view: &G, terminals: &[Vertex]) -> Result<Vec<Edge>> {
    for &t in terminals {
        if !view.contains(t) {
            return Err(PathError::OutsideView(t));
        }
    }
    let Some(&root) = terminals.first() else {
        return Ok(Vec::new());
    };
    if bfs_parents(view, root).len() != view.vertices().len() {
        return Err(PathError::DisconnectedView);
    }

    let mut in_tree: HashSet<Vertex> = HashSet::from([root]);
    let mut edges = Vec::new();
    for &t in &terminals[1..] {
        if in_tree.contains(&t) {
            continue;
        }
        // Shortest path from t to the nearest tree vertex.
        let mut parent = HashMap::from([(t, t)]);
        let mut queue = VecDeque::from([t]);
        let mut hit = None;
        while let Some(a) = queue.pop_front() {
            if in_tree.contains(&a) {
                hit = Some(a);
                break;
            }
            for b in view.neighbors(a) {
                if let std::collections::hash_map::Entry::Vacant(e) = parent.entry(b) {
                    e.insert(a);
                    queue.push_back(b);
                }
            }
        }
        let mut node = hit.expect("view is connected");
        while node != t {
            let p = parent[&node];
            edges.push(Edge::new(node, p));
            in_tree.insert(p);
            node = p;
        }
    }
    edges.sort();
    Ok(edges)
}

/// Hamiltonian `u`-`v` path of `view` by backtracking (fewest-onward-moves
/// ordering, connectivity pruning). `Ok(None)` means the search space was
/// exhausted without a path; running out of `budget` expansions is an error.
pub fn hamiltonian_path<G: GraphView + ?Sized>(view: &G, u: Vertex, v: Vertex, budget: u64) -> Result<Option<Path>> {
    for w in [u, v] {
        if !view.contains(w) {
            return Err(PathError::OutsideView(w));
        }
    }
    if u == v {
        return Err(PathError::SameEndpoints(u));
    }
    let verts = view.vertices();
    let index: HashMap<Vertex, usize> = verts.iter().enumerate().map(|(i, &w)| (w, i)).collect();
    let adj: Vec<Vec<usize>> = verts.iter().map(|&w| view.neighbors(w).iter().map(|x| index[x]).collect()).collect();

    let mut search = HamSearch {
        adj: &adj,
        target: index[&v],
        visited: vec![false; verts.len()],
        path: vec![index[&u]],
        nodes: 0,
        budget,
    };
    search.visited[index[&u]] = true;
    match search.extend() {
        Some(true) => Ok(Some(Path::new(search.path.iter().map(|&i| verts[i]).collect()))),
        Some(false) => Ok(None),
        None => Err(PathError::BudgetExhausted(budget)),
    }
}

struct HamSearch<'a> {
    adj: &'a [Vec<usize>],
    target: usize,
    visited: Vec<bool>,
    path: Vec<usize>,
    nodes: u64,
    budget: u64,
}

impl HamSearch<'_> {
    /// `Some(true)` found, `Some(false)` exhausted, `None` over budget.
    fn extend(&mut self) -> Option<bool> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return None;
        }
        let at = *self.path.last().expect("path starts at u");
        if self.path.len() == self.adj.len() {
            return Some(at == self.target);
        }
        if at == self.target || !self.rest_connected() {
            return Some(false);
        }
        let mut moves: Vec<(usize, usize)> = self.adj[at]
            .iter()
            .filter(|&&b| !self.visited[b])
            .map(|&b| (self.adj[b].iter().filter(|&&c| !self.visited[c]).count(), b))
            .collect();
        moves.sort_unstable();
        for (_, b) in moves {
            if b == self.target && self.path.len() + 1 != self.adj.len() {
                continue;
            }
            self.visited[b] = true;
            self.path.push(b);
            match self.extend() {
                Some(false) => {}
                other => return other,
            }
            self.path.pop();
            self.visited[b] = false;
        }
        Some(false)
    }

    /// Every unvisited vertex is reachable from the target through unvisited ones.
    fn rest_connected(&self) -> bool {
        let mut seen = vec![false; self.adj.len()];
        seen[self.target] = true;
        let mut stack = vec![self.target];
        let mut count = 1;
        while let Some(a) = stack.pop() {
            for &b in &self.adj[a] {
                if !self.visited[b] && !seen[b] {
                    seen[b] = true;
                    count += 1;
                    stack.push(b);
                }
            }
        }
        count == self.visited.iter().filter(|&&x| !x).count()
    }
}
