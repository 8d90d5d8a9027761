//! Command-line front end for `aqpack`: certificate I/O, Graphviz export
//! and the command implementations used by the `aqpack` binary.

pub mod cert;
pub mod commands;
pub mod dot;
