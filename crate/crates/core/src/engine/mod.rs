//! Windowed datasets, sliding-window inference and error estimation.
//!
//! A window reads `n_in` input steps and predicts the last `n_out` outputs,
//! shifted one step past the inputs, so the first `n_in − n_out` steps in
//! which initial transients decay are never predicted. Long sequences are
//! covered by windows shifted by `n_out`.

mod config;
mod error_map;
mod estimator;
mod sliding;
mod windows;

pub use config::{Channel, SlideConfig, Source};
pub use error_map::ErrorMap;
pub use estimator::{build_estimator_dataset, predict_with_error, rank_correlation, window_rmse, EstimatorData};
pub use sliding::{sliding_inference, sliding_windows, window_count, window_of_step, EvalMode, SlidingOutput};
pub use windows::{build_windows, window_input, window_target, Provenance, Sequence, WindowedDataset};
