//! Bounded packing search for pendant trees.
//!
//! A pendant tree on three terminals (no two of them adjacent inside the
//! tree) is determined up to choice of spanning tree by its set `U` of
//! non-terminal vertices: `U` must induce a connected subgraph and touch
//! every terminal. Packing trees is therefore packing disjoint such sets.
//! Candidates are enumerated by iterative deepening on `|U|`; only sets
//! that lose validity when any vertex is removed are kept.

use std::collections::{BTreeSet, HashSet, VecDeque};

use super::SteinerTree;
use crate::topology::{AugmentedCube, Edge, Vertex};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchOutcome {
    Found(Vec<SteinerTree>),
    /// No packing of the requested size exists.
    Exhausted,
    OverBudget,
}

struct Space<'a> {
    cube: &'a AugmentedCube,
    terminals: [u64; 3],
    free: Vec<bool>,
    adj: Vec<Vec<u64>>,
    /// Distance from a vertex to the nearest free neighbour of each
    /// terminal, through free vertices.
    reach: [Vec<u32>; 3],
}

const FAR: u32 = u32::MAX;

impl<'a> Space<'a> {
    fn new(cube: &'a AugmentedCube, terminals: [Vertex; 3], blocked: &BTreeSet<Vertex>) -> Self {
        let count = cube.vertex_count() as usize;
        let terminals = terminals.map(Vertex::bits);
        let mut free = vec![true; count];
        for &t in &terminals {
            free[t as usize] = false;
        }
        for v in blocked {
            free[v.bits() as usize] = false;
        }
        let masks = cube.generator_masks();
        let adj: Vec<Vec<u64>> = (0..count as u64).map(|v| masks.iter().map(|m| v ^ m).collect()).collect();
        let reach = terminals.map(|t| {
            let mut dist = vec![FAR; count];
            let mut queue = VecDeque::new();
            for &w in &adj[t as usize] {
                if free[w as usize] {
                    dist[w as usize] = 0;
                    queue.push_back(w);
                }
            }
            while let Some(u) = queue.pop_front() {
                for &w in &adj[u as usize] {
                    if free[w as usize] && dist[w as usize] == FAR {
                        dist[w as usize] = dist[u as usize] + 1;
                        queue.push_back(w);
                    }
                }
            }
            dist
        });
        Space { cube, terminals, free, adj, reach }
    }

    fn touches(&self, set: &[u64], ti: usize) -> bool {
        set.iter().any(|&u| self.reach[ti][u as usize] == 0)
    }

    fn valid(&self, set: &[u64]) -> bool {
        (0..3).all(|ti| self.touches(set, ti)) && self.connected(set, None)
    }

    fn connected(&self, set: &[u64], skip: Option<u64>) -> bool {
        let members: Vec<u64> = set.iter().copied().filter(|&u| Some(u) != skip).collect();
        let Some(&start) = members.first() else { return false };
        let mut seen = vec![start];
        let mut stack = vec![start];
        while let Some(u) = stack.pop() {
            for &w in &self.adj[u as usize] {
                if members.contains(&w) && !seen.contains(&w) {
                    seen.push(w);
                    stack.push(w);
                }
            }
        }
        seen.len() == members.len()
    }

    fn minimal(&self, set: &[u64]) -> bool {
        set.iter().all(|&u| {
            let rest: Vec<u64> = set.iter().copied().filter(|&w| w != u).collect();
            rest.is_empty() || !((0..3).all(|ti| self.touches(&rest, ti)) && self.connected(&rest, None))
        })
    }

    /// Lower bound on the vertices still needed to touch every terminal.
    fn shortfall(&self, set: &[u64]) -> u32 {
        (0..3)
            .map(|ti| set.iter().map(|&u| self.reach[ti][u as usize]).min().unwrap_or(FAR))
            .max()
            .unwrap_or(0)
    }

    /// Minimal candidate sets of size at most `cap`, smallest first.
    fn candidates(&self, cap: usize, budget: &mut u64) -> Option<Vec<Vec<u64>>> {
        let mut found = Vec::new();
        let mut seen: HashSet<Vec<u64>> = HashSet::new();
        let seeds: BTreeSet<u64> = self.adj[self.terminals[0] as usize]
            .iter()
            .copied()
            .filter(|&w| self.free[w as usize])
            .collect();
        let mut level: Vec<Vec<u64>> = seeds.into_iter().map(|w| vec![w]).collect();
        while !level.is_empty() {
            let mut next = Vec::new();
            for set in level {
                *budget = budget.checked_sub(1)?;
                if set.len() + self.shortfall(&set) as usize > cap {
                    continue;
                }
                if self.valid(&set) {
                    if self.minimal(&set) {
                        found.push(set);
                    }
                    continue;
                }
                if set.len() == cap {
                    continue;
                }
                let frontier: BTreeSet<u64> = set
                    .iter()
                    .flat_map(|&u| self.adj[u as usize].iter().copied())
                    .filter(|&w| self.free[w as usize] && !set.contains(&w))
                    .collect();
                for w in frontier {
                    let mut grown = set.clone();
                    let at = grown.partition_point(|&u| u < w);
                    grown.insert(at, w);
                    if seen.insert(grown.clone()) {
                        next.push(grown);
                    }
                }
            }
            level = next;
        }
        found.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        Some(found)
    }

    /// A spanning tree of `U` plus one pendant edge per terminal.
    fn tree(&self, set: &[u64]) -> SteinerTree {
        let v = |bits: u64| self.cube.vertex(bits).expect("inside the cube");
        let mut edges = Vec::new();
        let mut seen = vec![set[0]];
        let mut queue = VecDeque::from([set[0]]);
        while let Some(u) = queue.pop_front() {
            for &w in &self.adj[u as usize] {
                if set.contains(&w) && !seen.contains(&w) {
                    seen.push(w);
                    queue.push_back(w);
                    edges.push(Edge::new(v(u), v(w)));
                }
            }
        }
        for t in self.terminals {
            let hook = *set.iter().find(|&&u| self.adj[t as usize].contains(&u)).expect("touches every terminal");
            edges.push(Edge::new(v(t), v(hook)));
        }
        SteinerTree::new(self.terminals.map(v), edges)
    }
}

struct Packer<'a> {
    space: &'a Space<'a>,
    sets: Vec<Vec<u64>>,
    /// Candidate indices containing each vertex.
    by_vertex: Vec<Vec<usize>>,
    used: Vec<bool>,
    chosen: Vec<usize>,
    target: usize,
    budget: u64,
}

enum Step {
    Done,
    Fail,
    OutOfBudget,
}

impl Packer<'_> {
    fn available(&self, set: &[u64]) -> bool {
        set.iter().all(|&u| !self.used[u as usize])
    }

    /// Free neighbours of terminal `ti` still usable by some candidate.
    fn room(&self, ti: usize) -> Vec<u64> {
        let t = self.space.terminals[ti];
        self.space.adj[t as usize]
            .iter()
            .copied()
            .filter(|&w| {
                self.space.free[w as usize]
                    && !self.used[w as usize]
                    && self.by_vertex[w as usize].iter().any(|&c| self.available(&self.sets[c]))
            })
            .collect()
    }

    fn search(&mut self, banned: &mut Vec<u64>) -> Step {
        if self.chosen.len() >= self.target {
            return Step::Done;
        }
        if self.budget == 0 {
            return Step::OutOfBudget;
        }
        self.budget -= 1;

        let rooms: Vec<Vec<u64>> =
            (0..3).map(|ti| self.room(ti).into_iter().filter(|w| !banned.contains(w)).collect()).collect();
        let tightest = (0..3).min_by_key(|&ti| rooms[ti].len()).expect("three terminals");
        if self.chosen.len() + rooms[tightest].len() < self.target {
            return Step::Fail;
        }
        let pivot = rooms[tightest][0];

        // Either some chosen tree uses `pivot`, or no remaining tree does.
        let options: Vec<usize> = self.by_vertex[pivot as usize]
            .iter()
            .copied()
            .filter(|&c| self.available(&self.sets[c]) && !self.sets[c].iter().any(|u| banned.contains(u)))
            .collect();
        for c in options {
            for &u in &self.sets[c] {
                self.used[u as usize] = true;
            }
            self.chosen.push(c);
            match self.search(banned) {
                Step::Fail => {}
                other => return other,
            }
            self.chosen.pop();
            for &u in &self.sets[c] {
                self.used[u as usize] = false;
            }
        }
        banned.push(pivot);
        let result = self.search(banned);
        banned.pop();
        result
    }
}

/// Searches for `target` pendant trees avoiding `blocked`. Returns the
/// outcome and the number of steps spent.
pub(crate) fn pack_trees(
    cube: &AugmentedCube,
    terminals: [Vertex; 3],
    blocked: &BTreeSet<Vertex>,
    target: usize,
    budget: u64,
) -> (SearchOutcome, u64) {
    if target == 0 {
        return (SearchOutcome::Found(Vec::new()), 0);
    }
    let space = Space::new(cube, terminals, blocked);
    let free_count = space.free.iter().filter(|&&f| f).count();
    let mut remaining = budget;
    let mut previous = 0;
    for cap in 1..=free_count {
        let Some(sets) = space.candidates(cap, &mut remaining) else {
            return (SearchOutcome::OverBudget, budget);
        };
        // With no new candidates the answer cannot change.
        if sets.len() == previous && cap > 1 && cap < free_count {
            continue;
        }
        previous = sets.len();
        let mut by_vertex = vec![Vec::new(); space.free.len()];
        for (i, set) in sets.iter().enumerate() {
            for &u in set {
                by_vertex[u as usize].push(i);
            }
        }
        let mut packer = Packer {
            space: &space,
            sets,
            by_vertex,
            used: vec![false; space.free.len()],
            chosen: Vec::new(),
            target,
            budget: remaining,
        };
        let step = packer.search(&mut Vec::new());
        remaining = packer.budget;
        match step {
            Step::Done => {
                let trees = packer.chosen.iter().map(|&c| space.tree(&packer.sets[c])).collect();
                return (SearchOutcome::Found(trees), budget - remaining);
            }
            Step::OutOfBudget => return (SearchOutcome::OverBudget, budget),
            Step::Fail => {}
        }
    }
    (SearchOutcome::Exhausted, budget - remaining)
}
