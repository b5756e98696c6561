//! Weighted multicoloring of cannonball graphs.
//!
//! A cannonball graph is the contact graph of a close-packed arrangement of
//! equal spheres: vertices are sphere centers, edges connect touching spheres,
//! and every vertex carries an integer demand (number of channels/colors it
//! must receive). This crate builds such graphs over finite grid windows,
//! multicolors them with a clique-bounded approximation algorithm, and ships
//! an independent verifier plus an exact oracle for desk-scale instances.
//!
//! Modules:
//! - [`lattice`]: exact integer geometry of the layered sphere packing
//!   (coordinates, tangency, triangles, tetrahedra, the base 4-coloring).
//! - [`graph`]: demand-weighted graphs over a grid window, clique numbers,
//!   the base function kappa, vertex classification.
//! - [`subcolor`]: reusable coloring subroutines on abstract weighted graphs
//!   (optimal bipartite multicoloring, constructive 3-coloring of subcubic
//!   graphs, the 3/2-approximate multicoloring of 3-colorable graphs).
//! - [`multicolor`]: the end-to-end pipeline plus a naive per-palette
//!   baseline.
//! - [`verify`]: independent checking, color counting, exhaustive
//!   multichromatic number, and brute-force clique oracles.

pub mod graph;
pub mod lattice;
pub mod multicolor;
pub mod subcolor;
pub mod verify;

pub use graph::{CannonballGraph, CliqueNumbers, GraphError, VertexClass};
pub use lattice::{
    GridRegion, GridVertex, LatticeError, ScaledPosition, StackingSequence, Tetrahedron, Triangle,
};
pub use multicolor::{ColorAssignment, PaletteColor, SolveError, Solution, SolveStats};
pub use verify::{OracleOutcome, VerificationReport, Violation, ViolationKind};
