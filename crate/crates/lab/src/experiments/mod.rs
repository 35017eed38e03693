//! The five experiments. Each returns a table (one row per parameter point,
//! in parameter order) and the checks its verdict rests on.

mod flat;
mod pinfty;
mod revolution;
mod sphere;
mod weakstar;

use std::time::Instant;

pub use flat::run_flat_smallp;
pub use pinfty::run_pinfty;
pub use revolution::run_revolution;
pub use sphere::run_sphere_instability;
pub use weakstar::run_weakstar;

use crate::config::Config;
use crate::report::{Experiment, ExperimentReport};

/// Run one experiment and stamp its wall-clock time.
pub fn run(experiment: Experiment, config: &Config) -> qmlab_core::Result<ExperimentReport> {
    let start = Instant::now();
    let mut report = match experiment {
        Experiment::Weakstar => run_weakstar(&config.weakstar),
        Experiment::SphereInstability => run_sphere_instability(&config.sphere_instability),
        Experiment::Revolution => run_revolution(&config.revolution),
        Experiment::FlatSmallp => run_flat_smallp(&config.flat_smallp),
        Experiment::Pinfty => run_pinfty(&config.pinfty, config.seed),
    }?;
    report.elapsed_seconds = start.elapsed().as_secs_f64();
    Ok(report)
}

/// `true` when every element is strictly below its predecessor.
pub(crate) fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

pub(crate) fn strictly_increasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] > w[0])
}

pub(crate) fn non_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] >= w[0])
}
