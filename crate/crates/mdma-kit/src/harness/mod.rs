//! Synthetic-scene harness: scenario generation with analytic ground truth,
//! evaluation metrics, and the end-to-end simulation pipeline.

pub mod metrics;
pub mod scenario;
pub mod simulate;
