pub mod analysis;
pub mod error;
pub mod experiments;
pub mod model;
pub mod nk;
pub mod rng;
pub mod search;
pub mod stats;
pub mod walsh;

pub use error::{Error, Result};
