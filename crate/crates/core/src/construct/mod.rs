//! Packing `2n - 3` internally disjoint pendant Steiner trees for any three
//! vertices of AQ_n.
//!
//! The construction is inductive over the split `AQ_n = AQ^0 + AQ^1`:
//! after an optional complement (so that at most one terminal sits in the
//! 1-copy) the terminal set falls into Case 1 (all in the 0-copy; recurse
//! and add one tree per quarter of the 1-copy) or one of the Case 2
//! subcases (two terminals `x, y` in the 0-copy joined by a system of
//! disjoint paths, `z` in the 1-copy reached through a second path system).
//! Dimension 3, and any dimension-4 set whose recipe cannot run, is
//! settled by exhaustive search. Every family is
//! checked by [`crate::verify::verify_family`] before it is returned; a
//! recipe that fails the check falls back to a bounded search unless
//! [`Options::fallback`] is off.

mod cases;
mod search;

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::topology::{
    c_image, complement_automorphism, h_image, split_side, AugmentedCube, Edge, Side, SideMap, Vertex,
};
use crate::verify::verify_family;

pub use search::SearchOutcome;

/// A pendant Steiner tree: every terminal is a leaf.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SteinerTree {
    pub terminals: [Vertex; 3],
    pub edges: Vec<Edge>,
}

impl SteinerTree {
    /// Sorts terminals and edges into canonical order.
    pub fn new(mut terminals: [Vertex; 3], mut edges: Vec<Edge>) -> Self {
        terminals.sort();
        edges.sort();
        SteinerTree { terminals, edges }
    }

    pub fn vertices(&self) -> BTreeSet<Vertex> {
        let mut vs: BTreeSet<Vertex> = self.terminals.iter().copied().collect();
        for e in &self.edges {
            let (a, b) = e.endpoints();
            vs.insert(a);
            vs.insert(b);
        }
        vs
    }

    /// Vertices other than the terminals.
    pub fn inner_vertices(&self) -> BTreeSet<Vertex> {
        let mut vs = self.vertices();
        for t in &self.terminals {
            vs.remove(t);
        }
        vs
    }

    pub fn map(&self, f: impl Fn(Vertex) -> Vertex) -> SteinerTree {
        let terminals = self.terminals.map(&f);
        let edges = self
            .edges
            .iter()
            .map(|e| {
                let (a, b) = e.endpoints();
                Edge::new(f(a), f(b))
            })
            .collect();
        SteinerTree::new(terminals, edges)
    }
}

/// Which branch of the inductive argument produced a batch of trees.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CaseTag {
    Base3,
    Base4,
    Case1,
    Case2_1_1,
    Case2_1_2,
    Case2_1_3,
    Case2_2_1a,
    Case2_2_1b,
    Case2_2_2a,
    Case2_2_2b,
    Case2_2_2c,
    Case2_2_3a,
    Case2_2_3b,
    Case2_2_3c,
    FallbackSearch,
}

impl CaseTag {
    pub const ALL: [CaseTag; 15] = [
        CaseTag::Base3,
        CaseTag::Base4,
        CaseTag::Case1,
        CaseTag::Case2_1_1,
        CaseTag::Case2_1_2,
        CaseTag::Case2_1_3,
        CaseTag::Case2_2_1a,
        CaseTag::Case2_2_1b,
        CaseTag::Case2_2_2a,
        CaseTag::Case2_2_2b,
        CaseTag::Case2_2_2c,
        CaseTag::Case2_2_3a,
        CaseTag::Case2_2_3b,
        CaseTag::Case2_2_3c,
        CaseTag::FallbackSearch,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CaseTag::Base3 => "Base3",
            CaseTag::Base4 => "Base4",
            CaseTag::Case1 => "Case1",
            CaseTag::Case2_1_1 => "Case2_1_1",
            CaseTag::Case2_1_2 => "Case2_1_2",
            CaseTag::Case2_1_3 => "Case2_1_3",
            CaseTag::Case2_2_1a => "Case2_2_1a",
            CaseTag::Case2_2_1b => "Case2_2_1b",
            CaseTag::Case2_2_2a => "Case2_2_2a",
            CaseTag::Case2_2_2b => "Case2_2_2b",
            CaseTag::Case2_2_2c => "Case2_2_2c",
            CaseTag::Case2_2_3a => "Case2_2_3a",
            CaseTag::Case2_2_3b => "Case2_2_3b",
            CaseTag::Case2_2_3c => "Case2_2_3c",
            CaseTag::FallbackSearch => "FallbackSearch",
        }
    }

    /// z is a cross-split image of x or y.
    pub fn is_image_case(self) -> bool {
        matches!(self, CaseTag::Case2_1_1 | CaseTag::Case2_1_2 | CaseTag::Case2_1_3)
    }

    pub fn is_nonimage_case(self) -> bool {
        matches!(
            self,
            CaseTag::Case2_2_1a
                | CaseTag::Case2_2_1b
                | CaseTag::Case2_2_2a
                | CaseTag::Case2_2_2b
                | CaseTag::Case2_2_2c
                | CaseTag::Case2_2_3a
                | CaseTag::Case2_2_3b
                | CaseTag::Case2_2_3c
        )
    }
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CaseTag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        CaseTag::ALL.into_iter().find(|t| t.name() == s).ok_or_else(|| format!("unknown case tag {s:?}"))
    }
}

/// Automorphism applied before dispatch; both choices are involutions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Normalization {
    Identity,
    Complement,
}

impl Normalization {
    pub fn apply(self, v: Vertex) -> Vertex {
        match self {
            Normalization::Identity => v,
            Normalization::Complement => complement_automorphism(v),
        }
    }
}

/// The roles of the three terminals, in normalized coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Roles {
    pub x: Vertex,
    pub y: Vertex,
    pub z: Vertex,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub tag: CaseTag,
    pub normalization: Normalization,
    pub roles: Roles,
    /// For the image subcases: the matching with `z = map(x)`.
    pub map: Option<SideMap>,
    /// Set when the configuration is not spelled out by any subcase and is
    /// dispatched to the nearest recipe.
    pub unlisted: Option<&'static str>,
}

/// A contiguous run of trees produced by one construction step.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Batch {
    pub tag: CaseTag,
    pub normalization: Normalization,
    pub roles: Option<Roles>,
    pub first: usize,
    pub count: usize,
}

/// A family of pendant Steiner trees over one terminal set, with provenance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeFamily {
    pub dim: u32,
    pub terminals: [Vertex; 3],
    pub trees: Vec<SteinerTree>,
    pub provenance: Vec<Batch>,
    pub fallback_used: bool,
}

impl TreeFamily {
    pub fn from_trees(dim: u32, mut terminals: [Vertex; 3], trees: Vec<SteinerTree>) -> Self {
        terminals.sort();
        TreeFamily { dim, terminals, trees, provenance: Vec::new(), fallback_used: false }
    }

    /// Tag of the outermost construction step.
    pub fn case(&self) -> Option<CaseTag> {
        self.provenance.last().map(|b| b.tag)
    }

    pub fn len(&self) -> usize {
        self.trees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trees.is_empty()
    }

    /// Image under a vertex map (used for automorphisms).
    pub fn map(&self, f: impl Fn(Vertex) -> Vertex + Copy) -> TreeFamily {
        let mut terminals = self.terminals.map(f);
        terminals.sort();
        TreeFamily {
            dim: self.dim,
            terminals,
            trees: self.trees.iter().map(|t| t.map(f)).collect(),
            provenance: self.provenance.clone(),
            fallback_used: self.fallback_used,
        }
    }
}

/// Lifts a family of AQ_{n-1} into the `bit`-copy of AQ_n.
pub fn embed(family: &TreeFamily, bit: bool) -> TreeFamily {
    let lift = |v: Vertex| v.with_leading(bit).expect("dimension below the cap");
    let mut out = family.map(lift);
    out.dim = family.dim + 1;
    out
}

#[derive(Debug, Clone)]
pub struct Options {
    /// Case 1 uses Hamiltonian paths of the quarter cubes instead of
    /// shortest-path connectors.
    pub fidelity: bool,
    /// Replace a non-verifying recipe by a bounded search.
    pub fallback: bool,
    pub hamilton_budget: u64,
    pub search_budget: u64,
}

impl Default for Options {
    fn default() -> Self {
        Options { fidelity: false, fallback: true, hamilton_budget: 2_000_000, search_budget: 20_000_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructError {
    #[error("need exactly 3 distinct terminals of dimension {dim}: {detail}")]
    InvalidTerminals { dim: u32, detail: String },
    #[error("construction needs n >= 3 (got {0})")]
    DimensionTooSmall(u32),
    #[error("terminal set is classified {found}, not a {expected} configuration")]
    TagMismatch { expected: &'static str, found: CaseTag },
    #[error("{tag} recipe did not produce a valid family: {reason}")]
    AmbiguityFallback { tag: CaseTag, reason: String },
    #[error("internal error under {tag} for {terminals:?}: {detail}")]
    Internal { tag: CaseTag, terminals: Vec<Vertex>, detail: String },
}

pub type Result<T, E = ConstructError> = std::result::Result<T, E>;

fn checked_terminals(cube: &AugmentedCube, s: &[Vertex]) -> Result<[Vertex; 3]> {
    let bad = |detail: String| ConstructError::InvalidTerminals { dim: cube.dim(), detail };
    if cube.dim() < 3 {
        return Err(ConstructError::DimensionTooSmall(cube.dim()));
    }
    let arr: [Vertex; 3] = s.try_into().map_err(|_| bad(format!("got {} vertices", s.len())))?;
    for v in arr {
        cube.check(v).map_err(|e| bad(e.to_string()))?;
    }
    let mut sorted = arr;
    sorted.sort();
    if sorted[0] == sorted[1] || sorted[1] == sorted[2] {
        return Err(bad("duplicate vertex".into()));
    }
    Ok(sorted)
}

fn adjacent(cube: &AugmentedCube, a: Vertex, b: Vertex) -> bool {
    cube.is_adjacent(a, b).expect("same dimension")
}

/// Places `S` in the case tree. Subcase predicates are tested in the order
/// they are stated; the first that holds wins.
pub fn classify(cube: &AugmentedCube, s: &[Vertex]) -> Result<Classification> {
    let s = checked_terminals(cube, s)?;
    let on_one = s.iter().filter(|&&v| split_side(v).expect("n >= 3") == Side::One).count();
    let normalization = if on_one >= 2 { Normalization::Complement } else { Normalization::Identity };
    let mut t = s.map(|v| normalization.apply(v));
    t.sort();
    let classification = |tag, roles, map, unlisted| Classification { tag, normalization, roles, map, unlisted };

    let (zero, one): (Vec<Vertex>, Vec<Vertex>) = t.iter().partition(|&&v| !v.bit(1));
    if one.is_empty() {
        let roles = Roles { x: t[0], y: t[1], z: t[2] };
        return Ok(classification(CaseTag::Case1, roles, None, None));
    }
    let (a, b, z) = (zero[0], zero[1], one[0]);
    let h = |v: Vertex| h_image(v).expect("n >= 3");
    let c = |v: Vertex| c_image(v).expect("n >= 3");
    let same_images = BTreeSet::from([h(a), c(a)]) == BTreeSet::from([h(b), c(b)]);

    // Subcase 2.1: z is an image of x or y; relabel so that z = map(x).
    let image_of = [(a, b, SideMap::H), (b, a, SideMap::H), (a, b, SideMap::C), (b, a, SideMap::C)]
        .into_iter()
        .find(|&(x, _, m)| m.partner(x).expect("n >= 3") == z);
    if let Some((x, y, map)) = image_of {
        let roles = Roles { x, y, z };
        let tag = if same_images {
            CaseTag::Case2_1_1
        } else if !adjacent(cube, z, map.partner(y).expect("n >= 3")) {
            CaseTag::Case2_1_2
        } else {
            CaseTag::Case2_1_3
        };
        return Ok(classification(tag, roles, Some(map), None));
    }

    // Subcase 2.2: z is no image.
    if same_images {
        let (to_h, to_c) = (adjacent(cube, z, h(a)), adjacent(cube, z, c(a)));
        return Ok(match (to_h, to_c) {
            (true, true) => classification(CaseTag::Case2_2_1b, Roles { x: a, y: b, z }, None, None),
            // z ~ x^c for the chosen x; b^c = a^h.
            (false, true) => classification(CaseTag::Case2_2_1a, Roles { x: a, y: b, z }, None, None),
            (true, false) => classification(CaseTag::Case2_2_1a, Roles { x: b, y: a, z }, None, None),
            (false, false) => classification(
                CaseTag::Case2_2_1a,
                Roles { x: a, y: b, z },
                None,
                Some("z adjacent to neither x^h nor x^c"),
            ),
        });
    }

    let adj_x = [adjacent(cube, z, h(a)), adjacent(cube, z, c(a))];
    let adj_y = [adjacent(cube, z, h(b)), adjacent(cube, z, c(b))];
    let any = |m: [bool; 2]| m[0] || m[1];
    let xy_adjacent = adjacent(cube, a, b);
    let [tag_a, tag_b, tag_c] = if xy_adjacent {
        [CaseTag::Case2_2_3a, CaseTag::Case2_2_3b, CaseTag::Case2_2_3c]
    } else {
        [CaseTag::Case2_2_2a, CaseTag::Case2_2_2b, CaseTag::Case2_2_2c]
    };
    let straight = Roles { x: a, y: b, z };
    let swapped = Roles { x: b, y: a, z };
    Ok(match (adj_x, adj_y) {
        ([false, false], [false, false]) => classification(tag_a, straight, None, None),
        ([false, false], _) => classification(tag_b, straight, None, None),
        (_, [false, false]) => classification(tag_b, swapped, None, None),
        ([true, true], [true, false]) => classification(tag_c, straight, None, None),
        ([true, false], [true, true]) => classification(tag_c, swapped, None, None),
        _ if any(adj_x) && any(adj_y) => {
            classification(tag_a, straight, None, Some("z adjacent to images of both x and y in an unlisted pattern"))
        }
        _ => unreachable!("all adjacency patterns handled"),
    })
}

/// The built family before verification.
struct Built {
    trees: Vec<SteinerTree>,
    provenance: Vec<Batch>,
}

/// Runs the recipe for `S`'s case without verification or fallback.
fn run_recipe(cube: &AugmentedCube, s: [Vertex; 3], class: &Classification, opts: &Options) -> Result<Built, String> {
    let norm = class.normalization;
    let mut t = s.map(|v| norm.apply(v));
    t.sort();
    let mut built = match class.tag {
        CaseTag::Case1 => cases::case1(cube, t, class, opts)?,
        tag if tag.is_image_case() || tag.is_nonimage_case() => cases::case2(cube, t, class)?,
        other => return Err(format!("{other} has no recipe at n = {}", cube.dim())),
    };
    if norm == Normalization::Complement {
        built.trees = built.trees.iter().map(|tr| tr.map(|v| norm.apply(v))).collect();
    }
    Ok(built)
}

fn assemble(cube: &AugmentedCube, s: [Vertex; 3], built: Built) -> TreeFamily {
    TreeFamily { dim: cube.dim(), terminals: s, trees: built.trees, provenance: built.provenance, fallback_used: false }
}

fn check(cube: &AugmentedCube, family: &TreeFamily) -> Result<(), String> {
    let target = (2 * cube.dim() - 3) as usize;
    if family.trees.len() != target {
        return Err(format!("built {} trees, expected {target}", family.trees.len()));
    }
    let report = verify_family(cube, family);
    if report.accepted {
        Ok(())
    } else {
        let kinds: BTreeSet<_> = report.violations.iter().map(|v| format!("{:?}", v.kind)).collect();
        Err(format!("verifier rejected: {}", kinds.into_iter().collect::<Vec<_>>().join(", ")))
    }
}

fn build_checked(cube: &AugmentedCube, s: &[Vertex], opts: &Options, accept: impl Fn(CaseTag) -> bool, expected: &'static str) -> Result<TreeFamily> {
    let s = checked_terminals(cube, s)?;
    let class = classify(cube, &s)?;
    if !accept(class.tag) {
        return Err(ConstructError::TagMismatch { expected, found: class.tag });
    }
    if cube.dim() < 4 {
        return Err(ConstructError::AmbiguityFallback { tag: class.tag, reason: "AQ_3 is a searched base case".into() });
    }
    let fail = |reason| ConstructError::AmbiguityFallback { tag: class.tag, reason };
    let family = assemble(cube, s, run_recipe(cube, s, &class, opts).map_err(fail)?);
    check(cube, &family).map_err(fail)?;
    Ok(family)
}

/// Case 1 on its own: all terminals in one copy after normalization.
pub fn construct_case1(cube: &AugmentedCube, s: &[Vertex], opts: &Options) -> Result<TreeFamily> {
    build_checked(cube, s, opts, |t| t == CaseTag::Case1, "Case1")
}

/// Subcases 2.1.x: z is a cross-split image of x or y.
pub fn construct_case2_image(cube: &AugmentedCube, s: &[Vertex], opts: &Options) -> Result<TreeFamily> {
    build_checked(cube, s, opts, CaseTag::is_image_case, "Case2_1_*")
}

/// Subcases 2.2.x: z is not an image of x or y.
pub fn construct_case2_nonimage(cube: &AugmentedCube, s: &[Vertex], opts: &Options) -> Result<TreeFamily> {
    build_checked(cube, s, opts, CaseTag::is_nonimage_case, "Case2_2_*")
}

/// `2n - 3` internally disjoint pendant `S`-Steiner trees of AQ_n, verified.
pub fn construct(cube: &AugmentedCube, s: &[Vertex], opts: &Options) -> Result<TreeFamily> {
    let s = checked_terminals(cube, s)?;
    let searched = || -> Result<TreeFamily> {
        let family = base_case_search(cube, &s, (2 * cube.dim() - 3) as usize)?;
        check(cube, &family).map_err(|detail| ConstructError::Internal {
            tag: family.case().unwrap_or(CaseTag::Base3),
            terminals: s.to_vec(),
            detail,
        })?;
        Ok(family)
    };
    if cube.dim() == 3 {
        return searched();
    }

    let class = classify(cube, &s)?;
    let attempt = run_recipe(cube, s, &class, opts).map(|b| assemble(cube, s, b));
    let failure = match attempt {
        Ok(family) => match check(cube, &family) {
            Ok(()) => return Ok(family),
            Err(reason) => (reason, Some(family)),
        },
        Err(reason) => (reason, None),
    };
    // AQ_3 is only 4-connected, so some recipes cannot run at n = 4; the
    // searched base case is the regular route there, not a fallback.
    if cube.dim() == 4 {
        return searched();
    }
    if !opts.fallback {
        return Err(ConstructError::AmbiguityFallback { tag: class.tag, reason: failure.0 });
    }
    fallback(cube, s, &class, failure.1, opts)
}

/// Keeps the valid, mutually disjoint part of a failed recipe and searches
/// for the remaining trees; if that fails, searches for a whole family.
fn fallback(cube: &AugmentedCube, s: [Vertex; 3], class: &Classification, partial: Option<TreeFamily>, opts: &Options) -> Result<TreeFamily> {
    let target = (2 * cube.dim() - 3) as usize;
    let mut kept: Vec<SteinerTree> = Vec::new();
    if let Some(partial) = partial {
        let mut used: BTreeSet<Vertex> = BTreeSet::new();
        for tree in partial.trees {
            let solo = TreeFamily::from_trees(cube.dim(), s, vec![tree.clone()]);
            let inner = tree.inner_vertices();
            if kept.len() < target && verify_family(cube, &solo).accepted && inner.is_disjoint(&used) {
                used.extend(inner);
                kept.push(tree);
            }
        }
    }

    let attempts = [kept, Vec::new()];
    for base in attempts {
        let blocked: BTreeSet<Vertex> = base.iter().flat_map(|t| t.inner_vertices()).collect();
        let (outcome, _) = search::pack_trees(cube, s, &blocked, target - base.len(), opts.search_budget);
        if let SearchOutcome::Found(found) = outcome {
            let mut trees = base;
            trees.extend(found);
            let family = TreeFamily {
                dim: cube.dim(),
                terminals: s,
                provenance: vec![Batch {
                    tag: CaseTag::FallbackSearch,
                    normalization: Normalization::Identity,
                    roles: None,
                    first: 0,
                    count: trees.len(),
                }],
                trees,
                fallback_used: true,
            };
            if check(cube, &family).is_ok() {
                return Ok(family);
            }
        }
    }
    Err(ConstructError::Internal {
        tag: class.tag,
        terminals: s.to_vec(),
        detail: "recipe and fallback search both failed".into(),
    })
}

type CacheKey = (u32, [u64; 3]);

fn base_cache() -> &'static Mutex<HashMap<CacheKey, Arc<Vec<SteinerTree>>>> {
    static CACHE: OnceLock<Mutex<HashMap<CacheKey, Arc<Vec<SteinerTree>>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Translate so that one terminal becomes the origin, choosing the
/// lexicographically smallest result. Returns the canonical triple and the
/// translation that produced it.
fn canonical_form(s: [Vertex; 3]) -> ([Vertex; 3], u64) {
    s.iter()
        .map(|t| {
            let mut img = s.map(|v| v.translate(t.bits()));
            img.sort();
            (img, t.bits())
        })
        .min()
        .expect("three terminals")
}

/// Exhaustive packing search used for n = 3 and n = 4. Results are cached
/// per translation class of `S`.
pub fn base_case_search(cube: &AugmentedCube, s: &[Vertex], target: usize) -> Result<TreeFamily> {
    let s = checked_terminals(cube, s)?;
    let n = cube.dim();
    let tag = match n {
        3 => CaseTag::Base3,
        4 => CaseTag::Base4,
        _ => {
            return Err(ConstructError::InvalidTerminals { dim: n, detail: "base cases are n = 3 and n = 4".into() })
        }
    };
    let (canon, shift) = canonical_form(s);
    let key = (n, canon.map(Vertex::bits));

    let cached = base_cache().lock().expect("cache lock").get(&key).cloned();
    let trees = match cached {
        Some(trees) if trees.len() >= target => trees,
        _ => {
            let (outcome, nodes) = search::pack_trees(cube, canon, &BTreeSet::new(), target, u64::MAX);
            let found = match outcome {
                SearchOutcome::Found(found) => Arc::new(found),
                other => {
                    return Err(ConstructError::Internal {
                        tag,
                        terminals: s.to_vec(),
                        detail: format!("base search ended with {other:?} after {nodes} nodes"),
                    })
                }
            };
            let mut cache = base_cache().lock().expect("cache lock");
            let entry = cache.entry(key).or_insert_with(|| found.clone());
            if entry.len() < target {
                *entry = found;
            }
            entry.clone()
        }
    };

    let trees: Vec<SteinerTree> = trees.iter().take(target).map(|t| t.map(|v| v.translate(shift))).collect();
    let count = trees.len();
    Ok(TreeFamily {
        dim: n,
        terminals: s,
        trees,
        provenance: vec![Batch { tag, normalization: Normalization::Identity, roles: None, first: 0, count }],
        fallback_used: false,
    })
}

#[cfg(test)]
mod tests;
