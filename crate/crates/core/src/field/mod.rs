//! Scalar fields on regular grids, their merge trees, and synthetic datasets.

mod generate;
mod grid;
mod simplify;
mod sweep;

pub use generate::{
    generate_ensemble, generate_periodic_series, generate_split_series, parse_key_values, EnsembleSpec, PeriodicSpec,
    SplitSpec,
};
pub use grid::{format_sf2, parse_sf2, read_sf2, write_sf2, ScalarField2D};
pub use simplify::simplify;
pub use sweep::{compute_merge_tree, count_local_extrema, simulated_values, Connectivity, Direction};
