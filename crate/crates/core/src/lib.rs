//! Computation and experiments on the state complexity of the shuffle of
//! regular languages.

pub mod automata;
pub mod disting;
pub mod error;
pub mod reach;
pub mod search;
pub mod shuffle;

pub use error::{Error, Result};
