//! Nearest-neighbour type random graphs on point sets in `R^d`.
//!
//! The crate builds six graph families (j-th nearest neighbour, k-nearest
//! neighbours directed and undirected, on-line nearest neighbour, minimal
//! directed spanning forest under a cone order, Gabriel), evaluates the
//! closed-form limits of their rescaled total power-weighted edge length,
//! and checks those limits by seeded Monte Carlo simulation.
//!
//! Module map:
//! - [`constants`]: special functions and the per-family limiting constants.
//! - [`points`]: point sets, densities and the sampler.
//! - [`spatial_index`]: k-d tree, uniform grids, cone and on-line queries.
//! - [`graphs`]: the builders and their brute-force reference versions.
//! - [`functionals`]: power-weighted length of built graphs.
//! - [`montecarlo`]: the simulation harness and convergence reports.
//! - [`io`]: the CSV and JSON file formats.

pub mod constants;
pub mod error;
pub mod functionals;
pub mod graphs;
pub mod io;
pub mod montecarlo;
pub mod points;
pub mod spatial_index;

pub use constants::{limit_constant, GraphFamily, LimitQuery};
pub use error::{Error, Result};
pub use functionals::{rescaled_weight, total_weight, WeightExponent};
pub use graphs::{Edge, WeightedDigraph, WeightedGraph};
pub use montecarlo::{ConvergenceReport, SimConfig};
pub use points::{DensitySpec, PointSet, Seed};
pub use spatial_index::{ConeOrder, KdIndex};
