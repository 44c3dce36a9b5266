pub mod error;
pub mod exact_numerics;
pub mod flow_engine;
pub mod heisenberg;
pub mod lax_verification;
pub mod loop_algebra;
pub mod painleve_core;
pub mod report;
pub mod weyl_symmetry;
pub mod workers;

pub use error::{Error, Result};
