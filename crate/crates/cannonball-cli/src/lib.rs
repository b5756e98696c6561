//! Library surface of the `cannonball` command-line tool: file formats,
//! instance generation, batch benchmarking, and SVG rendering.

pub mod bench;
pub mod files;
pub mod gen;
pub mod render;

pub use files::{ColoringFile, FileError, InstanceFile};
pub use gen::GenParams;
