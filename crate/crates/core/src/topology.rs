//! Bit-level model of the augmented cube AQ_n.
//!
//! A vertex is an n-bit label `x1 x2 ... xn` where `x1` is the most significant
//! stored bit and selects the copy (`0...` or `1...`) in the recursive split.
//! Two vertices are adjacent iff their labels differ in exactly one position,
//! or differ exactly on a suffix `xi ... xn` of length at least two. The
//! adjacency therefore depends only on `u XOR v`, which makes every
//! translation `v -> v XOR t` an automorphism.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Largest supported dimension; labels must fit in one machine word.
pub const MAX_DIM: u32 = 62;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TopologyError {
    #[error("dimension {0} out of range 1..={MAX_DIM}")]
    BadDimension(u32),
    #[error("label {bits:#b} does not fit in {dim} bits")]
    LabelTooWide { bits: u64, dim: u32 },
    #[error("dimension mismatch: graph has dimension {expected}, vertex has {found}")]
    DimensionMismatch { expected: u32, found: u32 },
    #[error("operation needs dimension at least 2 (no split at n = {0})")]
    NoSplit(u32),
    #[error("vertex {0} is not on the 0-side of the split")]
    WrongSide(Vertex),
    #[error("prefix of length {len} is too long for dimension {dim}")]
    PrefixTooLong { len: u32, dim: u32 },
    #[error("cannot parse {0:?} as a binary label")]
    Parse(String),
}

pub type Result<T, E = TopologyError> = std::result::Result<T, E>;

/// A vertex of AQ_n, rendered as its zero-padded binary label.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Vertex {
    bits: u64,
    dim: u32,
}

impl Vertex {
    pub fn new(bits: u64, dim: u32) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(TopologyError::BadDimension(dim));
        }
        if bits >> dim != 0 {
            return Err(TopologyError::LabelTooWide { bits, dim });
        }
        Ok(Vertex { bits, dim })
    }

    /// Builds a vertex without range checks. Callers guarantee `bits < 2^dim`.
    pub(crate) fn from_raw(bits: u64, dim: u32) -> Self {
        debug_assert!(dim >= 1 && dim <= MAX_DIM && bits >> dim == 0);
        Vertex { bits, dim }
    }

    pub fn bits(self) -> u64 {
        self.bits
    }

    pub fn dim(self) -> u32 {
        self.dim
    }

    /// Bit at 1-based position `i`, counted from the leading bit.
    pub fn bit(self, i: u32) -> bool {
        assert!(i >= 1 && i <= self.dim, "position {i} outside 1..={}", self.dim);
        (self.bits >> (self.dim - i)) & 1 == 1
    }

    fn all_ones(self) -> u64 {
        mask(self.dim)
    }

    /// XOR translation by `t` (same dimension). Always an automorphism of AQ_n.
    pub fn translate(self, t: u64) -> Vertex {
        Vertex::from_raw((self.bits ^ t) & self.all_ones(), self.dim)
    }

    /// Drops the leading bit: the label of this vertex inside its copy AQ_{n-1}.
    pub fn strip_leading(self) -> Result<Vertex> {
        if self.dim < 2 {
            return Err(TopologyError::NoSplit(self.dim));
        }
        Ok(Vertex::from_raw(self.bits & mask(self.dim - 1), self.dim - 1))
    }

    /// Prepends `bit` as the new leading bit (lifts into AQ_{n+1}).
    pub fn with_leading(self, bit: bool) -> Result<Vertex> {
        if self.dim >= MAX_DIM {
            return Err(TopologyError::BadDimension(self.dim + 1));
        }
        Ok(Vertex::from_raw(self.bits | (u64::from(bit) << self.dim), self.dim + 1))
    }
}

impl Ord for Vertex {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.dim, self.bits).cmp(&(other.dim, other.bits))
    }
}

impl PartialOrd for Vertex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:0width$b}", self.bits, width = self.dim as usize)
    }
}

impl fmt::Debug for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for Vertex {
    type Err = TopologyError;

    fn from_str(s: &str) -> Result<Self> {
        if s.is_empty() || s.len() > MAX_DIM as usize || !s.bytes().all(|b| b == b'0' || b == b'1') {
            return Err(TopologyError::Parse(s.to_string()));
        }
        let bits = u64::from_str_radix(s, 2).map_err(|_| TopologyError::Parse(s.to_string()))?;
        Vertex::new(bits, s.len() as u32)
    }
}

impl Serialize for Vertex {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Vertex {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Parses a comma-separated list of binary labels, e.g. `000,001,011`.
pub fn parse_vertex_list(s: &str) -> Result<Vec<Vertex>> {
    s.split(',').map(str::parse).collect()
}

fn mask(len: u32) -> u64 {
    if len >= 64 {
        u64::MAX
    } else {
        (1u64 << len) - 1
    }
}

/// An undirected edge stored with its endpoints in ascending order.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edge(Vertex, Vertex);

impl Edge {
    pub fn new(a: Vertex, b: Vertex) -> Edge {
        if a <= b {
            Edge(a, b)
        } else {
            Edge(b, a)
        }
    }

    pub fn endpoints(self) -> (Vertex, Vertex) {
        (self.0, self.1)
    }

    pub fn contains(self, v: Vertex) -> bool {
        self.0 == v || self.1 == v
    }

    /// The endpoint opposite `v`, if `v` is an endpoint.
    pub fn other(self, v: Vertex) -> Option<Vertex> {
        if self.0 == v {
            Some(self.1)
        } else if self.1 == v {
            Some(self.0)
        } else {
            None
        }
    }
}

impl fmt::Debug for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.0, self.1)
    }
}

/// Which copy of AQ_{n-1} a vertex lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Zero,
    One,
}

/// The two perfect matchings joining the copies: `H` keeps the trailing bits,
/// `C` complements them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SideMap {
    H,
    C,
}

impl SideMap {
    pub fn other(self) -> SideMap {
        match self {
            SideMap::H => SideMap::C,
            SideMap::C => SideMap::H,
        }
    }

    /// Cross-split partner of `v` along this matching. The map is an
    /// involution and works from either side.
    pub fn partner(self, v: Vertex) -> Result<Vertex> {
        match self {
            SideMap::H => h_image(v),
            SideMap::C => c_image(v),
        }
    }
}

/// A fixed label prefix selecting a sub-cube, e.g. `10` in AQ_4 selects
/// `{1000, 1001, 1010, 1011}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Prefix {
    bits: u64,
    len: u32,
}

impl Prefix {
    pub const EMPTY: Prefix = Prefix { bits: 0, len: 0 };

    pub fn new(bits: u64, len: u32) -> Prefix {
        assert!(len < 64 && bits >> len == 0, "prefix {bits:#b} wider than {len}");
        Prefix { bits, len }
    }

    pub fn len(self) -> u32 {
        self.len
    }

    pub fn is_empty(self) -> bool {
        self.len == 0
    }

    pub fn bits(self) -> u64 {
        self.bits
    }

    pub fn matches(self, v: Vertex) -> bool {
        self.len <= v.dim && v.bits >> (v.dim - self.len) == self.bits
    }
}

impl FromStr for Prefix {
    type Err = TopologyError;

    fn from_str(s: &str) -> Result<Self> {
        if s.is_empty() {
            return Ok(Prefix::EMPTY);
        }
        let v: Vertex = s.parse()?;
        Ok(Prefix::new(v.bits, v.dim))
    }
}

impl fmt::Display for Prefix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.len == 0 {
            Ok(())
        } else {
            write!(f, "{:0width$b}", self.bits, width = self.len as usize)
        }
    }
}

/// The implicit graph AQ_n. No adjacency is stored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AugmentedCube {
    dim: u32,
}

impl AugmentedCube {
    pub fn new(dim: u32) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(TopologyError::BadDimension(dim));
        }
        Ok(AugmentedCube { dim })
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    pub fn vertex_count(&self) -> u64 {
        1u64 << self.dim
    }

    pub fn degree(&self) -> u32 {
        2 * self.dim - 1
    }

    pub fn edge_count(&self) -> u64 {
        self.vertex_count() * u64::from(self.degree()) / 2
    }

    pub fn vertex(&self, bits: u64) -> Result<Vertex> {
        Vertex::new(bits, self.dim)
    }

    /// Vertices in ascending label order.
    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        let dim = self.dim;
        (0..self.vertex_count()).map(move |b| Vertex::from_raw(b, dim))
    }

    pub fn check(&self, v: Vertex) -> Result<()> {
        if v.dim != self.dim {
            Err(TopologyError::DimensionMismatch { expected: self.dim, found: v.dim })
        } else {
            Ok(())
        }
    }

    /// XOR masks of the generating set: single-bit flips and suffix
    /// complements of length 2..=n. Listed in ascending numeric order.
    pub fn generator_masks(&self) -> Vec<u64> {
        let mut masks: Vec<u64> = (0..self.dim).map(|j| 1u64 << j).collect();
        masks.extend((2..=self.dim).map(mask));
        masks.sort_unstable();
        masks.dedup();
        masks
    }

    /// The 2n-1 neighbours of `v` in ascending label order.
    pub fn neighbors(&self, v: Vertex) -> Result<Vec<Vertex>> {
        self.check(v)?;
        let mut out: Vec<Vertex> = self
            .generator_masks()
            .into_iter()
            .map(|m| Vertex::from_raw(v.bits ^ m, self.dim))
            .collect();
        out.sort_unstable();
        Ok(out)
    }

    pub fn is_adjacent(&self, u: Vertex, v: Vertex) -> Result<bool> {
        self.check(u)?;
        self.check(v)?;
        Ok(adjacent_bits(u.bits ^ v.bits))
    }

    /// Vertices extending `prefix`; they induce a copy of AQ_{n-len}.
    pub fn sub_cube_vertices(&self, prefix: Prefix) -> Result<Vec<Vertex>> {
        if prefix.len >= self.dim {
            return Err(TopologyError::PrefixTooLong { len: prefix.len, dim: self.dim });
        }
        let free = self.dim - prefix.len;
        let base = prefix.bits << free;
        Ok((0..(1u64 << free)).map(|low| Vertex::from_raw(base | low, self.dim)).collect())
    }
}

/// Adjacency test on the XOR difference of two labels.
fn adjacent_bits(d: u64) -> bool {
    d != 0 && (d.is_power_of_two() || d & (d + 1) == 0)
}

/// Copy of the split the vertex lives in (its leading bit).
pub fn split_side(v: Vertex) -> Result<Side> {
    if v.dim < 2 {
        return Err(TopologyError::NoSplit(v.dim));
    }
    Ok(if v.bit(1) { Side::One } else { Side::Zero })
}

/// Hypercube partner across the split: flips the leading bit only.
pub fn h_image(v: Vertex) -> Result<Vertex> {
    if v.dim < 2 {
        return Err(TopologyError::NoSplit(v.dim));
    }
    Ok(v.translate(1u64 << (v.dim - 1)))
}

/// Complementary partner across the split: complements all n bits.
pub fn c_image(v: Vertex) -> Result<Vertex> {
    if v.dim < 2 {
        return Err(TopologyError::NoSplit(v.dim));
    }
    Ok(v.translate(v.all_ones()))
}

/// Full bitwise complement; swaps the two copies and preserves adjacency.
pub fn complement_automorphism(v: Vertex) -> Vertex {
    v.translate(v.all_ones())
}

/// Bijection from the 0-copy onto the 1-copy along one of the matchings.
pub fn side_isomorphism(kind: SideMap, v: Vertex) -> Result<Vertex> {
    if split_side(v)? != Side::Zero {
        return Err(TopologyError::WrongSide(v));
    }
    kind.partner(v)
}

/// A vertex set inside AQ_n that induces the subgraph an algorithm runs on.
pub trait GraphView {
    fn cube(&self) -> AugmentedCube;

    fn contains(&self, v: Vertex) -> bool;

    /// Members in ascending label order.
    fn vertices(&self) -> Vec<Vertex>;

    /// Neighbours inside the view, ascending.
    fn neighbors(&self, v: Vertex) -> Vec<Vertex> {
        let cube = self.cube();
        match cube.neighbors(v) {
            Ok(ns) => ns.into_iter().filter(|&w| self.contains(w)).collect(),
            Err(_) => Vec::new(),
        }
    }
}

impl GraphView for AugmentedCube {
    fn cube(&self) -> AugmentedCube {
        *self
    }

    fn contains(&self, v: Vertex) -> bool {
        v.dim == self.dim
    }

    fn vertices(&self) -> Vec<Vertex> {
        AugmentedCube::vertices(self).collect()
    }
}

/// The sub-cube of all vertices carrying a given prefix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SubCube {
    cube: AugmentedCube,
    prefix: Prefix,
}

impl SubCube {
    pub fn new(cube: AugmentedCube, prefix: Prefix) -> Result<Self> {
        if prefix.len >= cube.dim {
            return Err(TopologyError::PrefixTooLong { len: prefix.len, dim: cube.dim });
        }
        Ok(SubCube { cube, prefix })
    }

    pub fn prefix(&self) -> Prefix {
        self.prefix
    }
}

impl GraphView for SubCube {
    fn cube(&self) -> AugmentedCube {
        self.cube
    }

    fn contains(&self, v: Vertex) -> bool {
        v.dim == self.cube.dim && self.prefix.matches(v)
    }

    fn vertices(&self) -> Vec<Vertex> {
        self.cube.sub_cube_vertices(self.prefix).unwrap_or_default()
    }
}

/// An arbitrary vertex filter over AQ_n.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Induced {
    cube: AugmentedCube,
    members: std::collections::BTreeSet<Vertex>,
}

impl Induced {
    pub fn new(cube: AugmentedCube, members: impl IntoIterator<Item = Vertex>) -> Result<Self> {
        let members: std::collections::BTreeSet<Vertex> = members.into_iter().collect();
        for &v in &members {
            cube.check(v)?;
        }
        Ok(Induced { cube, members })
    }
}

impl GraphView for Induced {
    fn cube(&self) -> AugmentedCube {
        self.cube
    }

    fn contains(&self, v: Vertex) -> bool {
        self.members.contains(&v)
    }

    fn vertices(&self) -> Vec<Vertex> {
        self.members.iter().copied().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn v(s: &str) -> Vertex {
        s.parse().unwrap()
    }

    fn set(xs: &[&str]) -> BTreeSet<Vertex> {
        xs.iter().map(|s| v(s)).collect()
    }

    /// Literal recursive construction: AQ_1 = K2, then two copies joined by
    /// the hypercube and complementary matchings.
    fn recursive_edges(n: u32) -> BTreeSet<(u64, u64)> {
        let mut edges = BTreeSet::new();
        if n == 1 {
            edges.insert((0, 1));
            return edges;
        }
        let sub = recursive_edges(n - 1);
        let top = 1u64 << (n - 1);
        for &(a, b) in &sub {
            edges.insert((a, b));
            edges.insert((a | top, b | top));
        }
        for x in 0..top {
            let h = x | top;
            let c = (!x & (top - 1)) | top;
            edges.insert((x, h));
            edges.insert((x, c));
        }
        edges
    }

    fn closed_form_edges(n: u32) -> BTreeSet<(u64, u64)> {
        let g = AugmentedCube::new(n).unwrap();
        let mut edges = BTreeSet::new();
        for u in g.vertices() {
            for w in g.neighbors(u).unwrap() {
                if u < w {
                    edges.insert((u.bits(), w.bits()));
                }
            }
        }
        edges
    }

    #[test]
    fn neighbors_of_origin() {
        let g3 = AugmentedCube::new(3).unwrap();
        let got: BTreeSet<_> = g3.neighbors(v("000")).unwrap().into_iter().collect();
        assert_eq!(got, set(&["001", "010", "011", "100", "111"]));

        let g1 = AugmentedCube::new(1).unwrap();
        assert_eq!(g1.neighbors(v("0")).unwrap(), vec![v("1")]);

        let g4 = AugmentedCube::new(4).unwrap();
        let got: BTreeSet<_> = g4.neighbors(v("0000")).unwrap().into_iter().collect();
        assert_eq!(got, set(&["1000", "0100", "0010", "0001", "1111", "0111", "0011"]));
    }

    #[test]
    fn neighbors_reject_wrong_dimension() {
        let g3 = AugmentedCube::new(3).unwrap();
        assert!(matches!(
            g3.neighbors(v("0000")),
            Err(TopologyError::DimensionMismatch { expected: 3, found: 4 })
        ));
        assert!(g3.is_adjacent(v("000"), v("01")).is_err());
    }

    #[test]
    fn adjacency_examples() {
        let g3 = AugmentedCube::new(3).unwrap();
        assert!(g3.is_adjacent(v("000"), v("111")).unwrap());
        assert!(!g3.is_adjacent(v("001"), v("100")).unwrap());
        assert!(!g3.is_adjacent(v("000"), v("000")).unwrap());
    }

    #[test]
    fn regular_symmetric_irreflexive() {
        for n in 1..=8 {
            let g = AugmentedCube::new(n).unwrap();
            for u in g.vertices() {
                let ns = g.neighbors(u).unwrap();
                assert_eq!(ns.len() as u32, 2 * n - 1, "n={n} v={u}");
                assert!(!ns.contains(&u));
                for w in ns {
                    assert!(g.neighbors(w).unwrap().contains(&u));
                }
            }
        }
    }

    #[test]
    fn closed_form_matches_recursive_definition() {
        for n in 1..=8 {
            assert_eq!(closed_form_edges(n), recursive_edges(n), "n={n}");
        }
    }

    #[test]
    fn split_and_images() {
        assert_eq!(split_side(v("0110")).unwrap(), Side::Zero);
        assert_eq!(split_side(v("1001")).unwrap(), Side::One);
        assert!(matches!(split_side(v("1")), Err(TopologyError::NoSplit(1))));
        assert_eq!(h_image(v("0101")).unwrap(), v("1101"));
        assert_eq!(c_image(v("0101")).unwrap(), v("1010"));
        assert_eq!(c_image(v("001")).unwrap(), v("110"));
        assert!(h_image(v("0")).is_err());
        assert!(c_image(v("1")).is_err());
    }

    #[test]
    fn images_are_distinct_adjacent_and_cross() {
        for n in 2..=6 {
            let g = AugmentedCube::new(n).unwrap();
            for u in g.vertices() {
                let h = h_image(u).unwrap();
                let c = c_image(u).unwrap();
                assert_ne!(h, c);
                assert_ne!(split_side(h).unwrap(), split_side(u).unwrap());
                assert_ne!(split_side(c).unwrap(), split_side(u).unwrap());
                assert!(g.is_adjacent(u, h).unwrap() && g.is_adjacent(u, c).unwrap());
            }
        }
    }

    #[test]
    fn quarter_property() {
        for n in 3..=8 {
            let g = AugmentedCube::new(n).unwrap();
            for u in g.vertices().filter(|u| !u.bit(1)) {
                let h = h_image(u).unwrap();
                let c = c_image(u).unwrap();
                assert!(h.bit(2) != c.bit(2), "n={n} v={u}");
            }
        }
    }

    #[test]
    fn cross_matchings_are_perfect_and_disjoint() {
        for n in 2..=6 {
            let g = AugmentedCube::new(n).unwrap();
            let mut h_edges = BTreeSet::new();
            let mut c_edges = BTreeSet::new();
            for u in g.vertices().filter(|u| !u.bit(1)) {
                h_edges.insert(Edge::new(u, h_image(u).unwrap()));
                c_edges.insert(Edge::new(u, c_image(u).unwrap()));
            }
            let half = g.vertex_count() as usize / 2;
            assert_eq!(h_edges.len(), half);
            assert_eq!(c_edges.len(), half);
            for es in [&h_edges, &c_edges] {
                let covered: BTreeSet<Vertex> =
                    es.iter().flat_map(|e| [e.endpoints().0, e.endpoints().1]).collect();
                assert_eq!(covered.len() as u64, g.vertex_count());
            }
            assert!(h_edges.is_disjoint(&c_edges));
        }
    }

    #[test]
    fn complement_is_an_involutive_automorphism() {
        assert_eq!(complement_automorphism(v("0000")), v("1111"));
        let g3 = AugmentedCube::new(3).unwrap();
        assert!(g3.is_adjacent(v("000"), v("011")).unwrap());
        assert!(g3
            .is_adjacent(complement_automorphism(v("000")), complement_automorphism(v("011")))
            .unwrap());
        for n in 1..=6 {
            let g = AugmentedCube::new(n).unwrap();
            for a in g.vertices() {
                assert_eq!(complement_automorphism(complement_automorphism(a)), a);
                for b in g.vertices() {
                    assert_eq!(
                        g.is_adjacent(a, b).unwrap(),
                        g.is_adjacent(complement_automorphism(a), complement_automorphism(b)).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn translations_are_automorphisms() {
        for n in 1..=5 {
            let g = AugmentedCube::new(n).unwrap();
            for t in 0..g.vertex_count() {
                for a in g.vertices() {
                    for b in g.vertices() {
                        assert_eq!(
                            g.is_adjacent(a, b).unwrap(),
                            g.is_adjacent(a.translate(t), b.translate(t)).unwrap()
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn side_isomorphisms() {
        assert_eq!(side_isomorphism(SideMap::H, v("0011")).unwrap(), v("1011"));
        assert_eq!(side_isomorphism(SideMap::C, v("0011")).unwrap(), v("1100"));
        assert!(matches!(
            side_isomorphism(SideMap::H, v("1011")),
            Err(TopologyError::WrongSide(_))
        ));
        let g3 = AugmentedCube::new(3).unwrap();
        let a = side_isomorphism(SideMap::C, v("000")).unwrap();
        let b = side_isomorphism(SideMap::C, v("001")).unwrap();
        assert_eq!((a, b), (v("111"), v("110")));
        assert!(g3.is_adjacent(a, b).unwrap());

        for n in 2..=6 {
            let g = AugmentedCube::new(n).unwrap();
            let zero: Vec<Vertex> = g.vertices().filter(|u| !u.bit(1)).collect();
            for kind in [SideMap::H, SideMap::C] {
                let images: BTreeSet<Vertex> =
                    zero.iter().map(|&u| side_isomorphism(kind, u).unwrap()).collect();
                assert_eq!(images.len(), zero.len());
                for &a in &zero {
                    for &b in &zero {
                        let (ia, ib) =
                            (side_isomorphism(kind, a).unwrap(), side_isomorphism(kind, b).unwrap());
                        assert_eq!(g.is_adjacent(a, b).unwrap(), g.is_adjacent(ia, ib).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn sub_cubes() {
        let g3 = AugmentedCube::new(3).unwrap();
        let got: BTreeSet<_> = g3.sub_cube_vertices("1".parse().unwrap()).unwrap().into_iter().collect();
        assert_eq!(got, set(&["100", "101", "110", "111"]));
        assert_eq!(g3.sub_cube_vertices(Prefix::EMPTY).unwrap().len(), 8);
        assert!(g3.sub_cube_vertices("101".parse().unwrap()).is_err());

        let g4 = AugmentedCube::new(4).unwrap();
        let quarter = g4.sub_cube_vertices("10".parse().unwrap()).unwrap();
        assert_eq!(quarter.len(), 4);
        for &a in &quarter {
            for &b in &quarter {
                if a != b {
                    assert!(g4.is_adjacent(a, b).unwrap());
                }
            }
        }
    }

    #[test]
    fn sub_cube_is_isomorphic_to_smaller_cube() {
        for n in 2..=5 {
            let g = AugmentedCube::new(n).unwrap();
            for len in 0..n {
                let small = AugmentedCube::new(n - len).unwrap();
                let low = (1u64 << (n - len)) - 1;
                for p in 0..(1u64 << len) {
                    let members = g.sub_cube_vertices(Prefix::new(p, len)).unwrap();
                    for &a in &members {
                        for &b in &members {
                            let sa = small.vertex(a.bits() & low).unwrap();
                            let sb = small.vertex(b.bits() & low).unwrap();
                            assert_eq!(g.is_adjacent(a, b).unwrap(), small.is_adjacent(sa, sb).unwrap());
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn labels_round_trip() {
        assert_eq!(v("0101").to_string(), "0101");
        assert_eq!(v("0").to_string(), "0");
        assert!("01a".parse::<Vertex>().is_err());
        assert!("".parse::<Vertex>().is_err());
        assert!(Vertex::new(8, 3).is_err());
        assert_eq!(parse_vertex_list("000,001,011").unwrap().len(), 3);
        assert!(parse_vertex_list("000,,011").is_err());
        assert_eq!(v("0110").strip_leading().unwrap(), v("110"));
        assert_eq!(v("110").with_leading(false).unwrap(), v("0110"));
    }

    #[test]
    fn views_filter_neighbors() {
        let g4 = AugmentedCube::new(4).unwrap();
        let zero = SubCube::new(g4, "0".parse().unwrap()).unwrap();
        let ns = zero.neighbors(v("0000"));
        assert_eq!(ns.len(), 5);
        assert!(ns.iter().all(|w| !w.bit(1)));
        let ind = Induced::new(g4, [v("0000"), v("0001"), v("1111")]).unwrap();
        assert_eq!(ind.neighbors(v("0000")), vec![v("0001"), v("1111")]);
    }
}
