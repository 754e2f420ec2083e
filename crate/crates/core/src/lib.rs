//! Weighted mean inactivity time and the measures built on it.

pub mod acceptance;
pub mod applied;
pub mod dist;
pub mod error;
pub mod infomeasures;
pub mod inactivity;
pub mod numerics;
pub mod orders;
pub mod records;
pub mod spread;
pub mod weights;

pub use error::{Error, Result};
