//! Distance-to-measure filtrations and their sparse approximations.
//!
//! The pipeline goes from a finite metric space to DTM weights, to a (sparse)
//! weighted Rips filtration, to persistence diagrams and distances between
//! them.

pub mod cech;
pub mod diagram;
pub mod dtm;
pub mod error;
pub mod experiments;
pub mod filtration;
pub mod io;
pub mod metric;
pub mod persistence;
pub mod sparse_rips;
pub mod transport;
pub mod weighted_rips;
pub mod witnessed;

pub use error::{Error, Result};
