pub mod airy;
pub mod analytic;
pub mod barrier;
pub mod error;
pub mod floquet;
pub mod linalg;
pub mod model;
pub mod observables;
pub mod timedomain;

pub use error::{Error, Result};
