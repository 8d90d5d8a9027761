//! Internally disjoint pendant Steiner trees in augmented cubes.
//!
//! * [`topology`]: vertices, adjacency and the structural maps of AQ_n.
//! * [`paths`]: disjoint path systems (Menger) and small connectors.
//! * [`construct`]: the inductive tree packing for three terminals.
//! * [`verify`]: independent checks of tree families plus a brute-force
//!   packing oracle for small cubes.

pub mod construct;
pub mod paths;
pub mod topology;
pub mod verify;

pub use construct::{construct, CaseTag, Options, SteinerTree, TreeFamily};
pub use topology::{AugmentedCube, Edge, Vertex};
