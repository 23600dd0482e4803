pub mod arcs;
pub mod arith;
pub mod characters;
pub mod cli;
pub mod ergodic;
pub mod error;
pub mod expsum;
pub mod laurent;
pub mod ntt;
pub mod rng;
pub mod singular;
pub mod verify;
pub mod weights;

pub use error::{Error, Result};
