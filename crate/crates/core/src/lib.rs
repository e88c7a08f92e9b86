//! Quasi-minimum-time planar low-thrust orbit transfers with Earth-shadow
//! thrust cut-offs.
//!
//! The thrust follows the velocity costate. The initial costate is fixed
//! by two angles, the costate jumps explicitly at every shadow entry and
//! exit, and a DIRECT search picks the angles that land on the target orbit.

pub mod cli;
pub mod config;
pub mod direct;
pub mod dynamics;
pub mod error;
pub mod guess;
pub mod orbital;
pub mod propagation;
pub mod solver;

pub use error::{Result, TransferError};
