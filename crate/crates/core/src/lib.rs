pub mod agents;
pub mod datagen;
pub mod error;
pub mod harness;
pub mod mesh_sim;
pub mod neural;
pub mod surrogate;

pub use error::{Error, Result};
