pub mod cech;
pub mod chernsimons;
pub mod discrete;
pub mod error;
pub mod extension;
pub mod manifold;
pub mod models;

pub use error::{Error, Result};
pub mod quat;
pub mod report;
pub mod runner;
pub mod sampling;
pub mod simplicial;
