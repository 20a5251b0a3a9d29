//! Numerical kernels for block-masked attention over mixed token sequences,
//! attention-derived object masks, and recursive mask propagation across
//! frames, plus the synthetic-scenario harness used to exercise them.

pub mod attention;
pub mod config;
pub mod dmem;
pub mod error;
pub mod harness;
pub mod io;
pub mod layout;
pub mod mask;
pub mod pgm;
pub mod rmpm;
pub mod rng;
pub mod tensor;

pub use error::{Error, Result};
pub use tensor::{BinaryMatrix, Matrix, Tensor};
