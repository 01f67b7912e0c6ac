//! Graph domain adaptation through homophilic and heterophilic structure
//! reconstruction, dual spectral filtering and code alignment.

pub mod cli;
pub mod filters;
pub mod graph;
pub mod io;
pub mod matrix;
pub mod model;
pub mod pipeline;
pub mod reconstruct;
pub mod rng;

pub use filters::{FilterBank, FilterConfig, FilterOutput};
pub use graph::{Graph, GraphError};
pub use matrix::GraphMatrix;
pub use reconstruct::{HomophilicSolveConfig, ReconstructError, ReconstructedStructures};
