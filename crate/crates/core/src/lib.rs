//! Continental network planning: cluster a set of countries, pick gateway
//! nodes from submarine-cable landings, and route within and across clusters
//! with an ant colony that uses stench pheromones (destination-dependent
//! evaporation).

pub mod aco;
pub mod clustering;
pub mod dataset;
pub mod error;
pub mod gateways;
pub mod metrics;
pub mod pipeline;
pub mod seeds;

pub use error::{Error, Result};
