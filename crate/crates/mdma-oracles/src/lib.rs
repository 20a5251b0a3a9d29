//! Deliberately naive reference implementations of everything `mdma-kit`
//! computes, used as independent test oracles.
//!
//! Every function here is a direct transcription of the defining formula —
//! explicit loops, no shared helpers from the library's computation paths,
//! no shortcuts. Library types (`TokenLayout`, `SpatialMask`, tensors)
//! appear only as data containers; offsets, coordinates, normalizations and
//! reductions are all recomputed from first principles. Where an oracle is
//! expected to agree with the library bit-for-bit, it performs the same
//! arithmetic in the same order the definition dictates (ascending-index
//! accumulation in `f32`).

pub mod attention;
pub mod blocks;
pub mod extract;
pub mod fidelity;
pub mod propagate;
