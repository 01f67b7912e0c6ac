//! Dataset loading, synthetic generation, shipped configs and metric writers.

pub mod configs;
pub mod loader;
pub mod metrics;
pub mod synthetic;

pub use configs::{config_for_task, shipped_configs, synthetic_task_for, SyntheticTask};
pub use loader::{load_dataset, load_dir, DatasetBundle, DatasetPaths, DeclaredStats, LoadError};
pub use synthetic::{generate_synthetic, SyntheticError, SyntheticSpec};
