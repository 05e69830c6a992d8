//! Weighted means, the weighted Kedlaya inequality and weighted Hardy
//! constants.
//!
//! Entries and weights are [`Numeric`] values: exact rationals where the
//! mean keeps them exact, binary64 otherwise. Every randomized routine takes
//! an explicit seed and gives identical results for identical arguments.

pub mod axioms;
pub mod error;
pub mod hardy;
pub mod kedlaya;
pub mod mean;
pub mod numeric;
pub mod rational;
pub mod sampling;
pub mod serde_ext;
pub mod step;
pub mod vectors;

pub use error::{Error, Result};
pub use mean::{eval_mean, Generator, MeanSpec};
pub use numeric::Numeric;
pub use rational::Rational;
pub use vectors::{EntryVector, WeightVector};
