//! Correlation fractal dimension (D2) estimation by box-counting.
//!
//! Two kernels compute the box-count plot `S(r) = sum_i C_i^2` over dyadic
//! grids `r = 1/2^j`:
//!
//! - [`boxcount::fd`] rescans the dataset for every grid resolution.
//! - [`boxcount::ffd`] scans it once at the finest resolution and builds every
//!   coarser grid by summing child occupancies into parent cells.
//!
//! Both give identical integer sums. [`fit`] turns a plot into a slope.

pub mod bench;
pub mod boxcount;
pub mod cli;
pub mod dataset;
pub mod error;
pub mod fit;
pub mod generators;
pub mod grid;
pub mod io;

pub use boxcount::{Algorithm, BoxCountPlot, OccupancyMap, OpCounters};
pub use dataset::{normalize, NormalizeMode, NormalizedDataset, RawDataset};
pub use error::{Error, Result};
pub use fit::{estimate_d2, D2Estimate, FitMode, FitRange};
pub use grid::{CellKey, RadiusSchedule};
