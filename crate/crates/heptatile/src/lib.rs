//! Heptagrid {7,3} tiling engine.
//!
//! The crate grows Fibonacci trees over the heptagrid, lays the interwoven
//! triangles along wires of seeds, decorates tiles with matching side
//! signs, compiles Turing machines into meta-tiles and renders patches in
//! the Poincaré disc.

pub mod cli;
pub mod decorate;
pub mod heptagrid;
pub mod isoclines;
pub mod render;
pub mod triangles;
pub mod turing;
