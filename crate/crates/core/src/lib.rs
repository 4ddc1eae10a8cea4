//! Spectral graph partitioning with numerically certified Cheeger-type bounds.
//!
//! The crate covers the whole pipeline: weighted graphs and cut arithmetic,
//! dense spectra of the normalized Laplacian and the signless operator,
//! sweep cuts, step approximations of eigenfunctions, dyadic region
//! constructions, the balanced separator and max-cut algorithms, seeded
//! instance generators, and exhaustive oracles for small graphs.

pub mod battery;
pub mod certificate;
pub mod error;
pub mod graph;
pub mod io;
pub mod instances;
pub mod oracle;
pub mod partition;
pub mod regions;
pub mod spectral;
pub mod step;
pub mod suite;
pub mod sweep;

pub use certificate::Certificate;
pub use error::{Error, Result};
pub use graph::{Edge, InducedCut, VertexSet, WeightedGraph};
pub use spectral::{Operator, Spectrum};
pub use sweep::{Interval, SweepResult};
