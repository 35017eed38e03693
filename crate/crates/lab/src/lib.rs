//! Experiment runner for the qmlab numerical laboratory: configuration,
//! the five experiments, and report emission.

// `!(x > 0.0)` guards are deliberate: they reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod experiments;
pub mod report;

use config::{Config, ConfigError};
use report::{EmitError, Experiment, ExperimentReport};

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{experiment}: {source}")]
    Compute { experiment: Experiment, source: qmlab_core::Error },
    #[error(transparent)]
    Emit(#[from] EmitError),
    #[error("worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

/// Validate `config` and run `which` in order on a pool of `workers`
/// threads (`None` = one per core). Reports come back in the order asked.
pub fn run(which: &[Experiment], config: &Config, workers: Option<usize>) -> Result<Vec<ExperimentReport>, RunError> {
    config.validate()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = workers {
        builder = builder.num_threads(n);
    }
    let pool = builder.build()?;
    pool.install(|| {
        which
            .iter()
            .map(|&e| experiments::run(e, config).map_err(|source| RunError::Compute { experiment: e, source }))
            .collect()
    })
}
