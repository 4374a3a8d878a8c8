//! Dataset and model files, run configuration.
//!
//! Both binary formats are little-endian with a fixed field order and end in
//! the CRC-32 of every preceding byte, so identical contents give identical
//! files on every platform.

mod binary;
mod dataset_file;
mod model_file;
mod run_config;

pub use dataset_file::{load_dataset, save_dataset, DatasetFile, DatasetTarget};
pub use model_file::{load_model, save_model, ModelFile, ModelRole, TrainingProvenance};
pub use run_config::{merge_toml, 
    BenchSection, DriveSpec, EstimatorSection, LinearizationSection, NetworkSection, RunConfig, SystemSection,
    TrainingSection, WindowSection, PRESETS,
};
