//! Linear interference alignment with delayed channel knowledge at the
//! transmitters: DoF bounds, integer scheme parameters, and a numerical
//! simulator that builds the precoders and checks decodability by rank.

pub mod channel;
pub mod constant_lab;
pub mod error;
pub mod linalg;
pub mod optimizer;
pub mod schemes;
pub mod tradeoff;

pub use error::{Error, Result};
