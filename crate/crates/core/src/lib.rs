pub mod chron;
pub mod error;
pub mod hall;
pub mod ncseries;
pub mod rational;
pub mod riccati;
pub mod shuffle;
pub mod words;

pub use error::{Error, Result};
pub use ncseries::NcSeries;
pub use rational::Rational;
pub use words::{Letter, Word};
