pub mod analysis;
pub mod error;
pub mod instance;
pub mod matrix;
pub mod norm;
pub mod relaxation;
pub mod rng;
pub mod partition;
