pub mod circuit;
pub mod dsm;
pub mod error;
pub mod experiments;
pub mod gf2;
pub mod optimizer;
pub mod group;
pub mod permutation;
pub mod problems;
pub mod projection;

pub use error::{QuperError, Result};
pub use gf2::Gf2Matrix;
pub use permutation::Permutation;
