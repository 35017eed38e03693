use std::sync::Arc;

use rayon::prelude::*;

use qmlab_core::discretization::CylinderGrid;
use qmlab_core::quasimodes::{concentration_profile, radial_pairing, solve_sturm_liouville, SturmLiouvilleMode};
use qmlab_core::{Error, Result};

use super::{non_decreasing, strictly_decreasing};
use crate::config::RevolutionConfig;
use crate::report::{Check, Experiment, ExperimentReport, Table};

pub const COLUMNS: &[&str] = &[
    "kind", "m", "j", "intervals", "eigenvalue", "window", "window_mass", "pairing_one", "pairing_t2", "target_t2",
    "gap_t2", "ratio", "pass",
];

fn grid(cfg: &RevolutionConfig, intervals: usize) -> Result<Arc<CylinderGrid>> {
    let f: fn(f64) -> f64 = match cfg.profile.as_str() {
        "cosh" => f64::cosh,
        "one" => |_| 1.0,
        other => return Err(Error::InvalidParameter(format!("unknown profile `{other}`"))),
    };
    Ok(Arc::new(CylinderGrid::new(cfg.a, cfg.b, intervals - 1, 1, f)?))
}

/// The lowest mode at or above the top of the effective barrier `m²/f²`,
/// i.e. with `λ ≥ m² / min f²`.
fn barrier_top(grid: &Arc<CylinderGrid>, m: i64) -> Result<SturmLiouvilleMode> {
    let top = (m * m) as f64 / grid.profile(grid.argmin_profile()).powi(2);
    let mut count = 8usize;
    loop {
        let count_now = count.min(grid.n_t());
        let modes = solve_sturm_liouville(grid, m, count_now)?;
        if let Some(mode) = modes.iter().find(|v| v.eigenvalue >= top) {
            return Ok(mode.clone());
        }
        if count_now == grid.n_t() {
            return Err(Error::Eigen(format!("no mode of order {m} above the barrier top {top}")));
        }
        count *= 2;
    }
}

struct ModeRow {
    mode: SturmLiouvilleMode,
    window: f64,
    mass: f64,
    one: f64,
    t2: f64,
}

fn describe(mode: SturmLiouvilleMode, cfg: &RevolutionConfig) -> ModeRow {
    let window = (mode.m.unsigned_abs() as f64).powf(cfg.window_exponent);
    let mass = concentration_profile(&mode, window);
    let one = radial_pairing(&mode, |_| 1.0);
    let t2 = radial_pairing(&mode, |t| t * t);
    ModeRow { mode, window, mass, one, t2 }
}

pub fn run_revolution(cfg: &RevolutionConfig) -> Result<ExperimentReport> {
    let mut table = Table::new(COLUMNS);
    let g = grid(cfg, cfg.intervals)?;
    let t0 = g.profile_minimum();
    let target = t0 * t0;
    let rows = cfg
        .m
        .par_iter()
        .map(|&m| {
            let ground = solve_sturm_liouville(&g, m, 1)?.remove(0);
            Ok((describe(ground, cfg), describe(barrier_top(&g, m)?, cfg)))
        })
        .collect::<Result<Vec<_>>>()?;
    let refinement = cfg
        .refinement_intervals
        .par_iter()
        .map(|&n| Ok(solve_sturm_liouville(&grid(cfg, n)?, cfg.refinement_m, 1)?[0].eigenvalue))
        .collect::<Result<Vec<f64>>>()?;

    let mut masses = Vec::new();
    let mut gaps = Vec::new();
    let mut worst_one = 0.0f64;
    for (kind, pick) in [("ground", 0usize), ("barrier-top", 1)] {
        for pair in &rows {
            let r = if pick == 0 { &pair.0 } else { &pair.1 };
            let gap = (r.t2 - target).abs();
            if pick == 0 {
                masses.push(r.mass);
                gaps.push(gap);
                worst_one = worst_one.max((r.one - 1.0).abs());
            }
            table.push(vec![
                ("kind", kind.into()),
                ("m", r.mode.m.into()),
                ("j", r.mode.j.into()),
                ("intervals", cfg.intervals.into()),
                ("eigenvalue", r.mode.eigenvalue.into()),
                ("window", r.window.into()),
                ("window_mass", r.mass.into()),
                ("pairing_one", r.one.into()),
                ("pairing_t2", r.t2.into()),
                ("target_t2", target.into()),
                ("gap_t2", gap.into()),
            ]);
        }
    }
    let ratios: Vec<f64> = refinement.windows(3).map(|w| (w[0] - w[1]) / (w[1] - w[2])).collect();
    for (i, (&n, &lambda)) in cfg.refinement_intervals.iter().zip(&refinement).enumerate() {
        let ratio = i.checked_sub(2).map(|j| ratios[j]);
        table.push(vec![
            ("kind", "refinement".into()),
            ("m", cfg.refinement_m.into()),
            ("j", 0usize.into()),
            ("intervals", n.into()),
            ("eigenvalue", lambda.into()),
            ("ratio", ratio.into()),
            ("pass", ratio.map(|r| r >= cfg.ratio_range[0] && r <= cfg.ratio_range[1]).into()),
        ]);
    }

    let mut report = ExperimentReport::new(Experiment::Revolution, table);
    if !masses.is_empty() {
        report.checks.push(Check::holds(
            "ground window mass non-decreasing in m",
            non_decreasing(&masses),
            format!("{:.4?}", masses),
        ));
        report.checks.push(Check::at_least("ground window mass at largest m", *masses.last().unwrap(), cfg.final_mass, 0.0));
        report.checks.push(Check::holds("t² pairing approaches g(t₀)", strictly_decreasing(&gaps), format!("{:.4?}", gaps)));
        report.checks.push(Check::at_most("unit pairing", worst_one, 0.0, 1e-10));
    }
    if let Some(&ratio) = ratios.last() {
        report.checks.push(Check::at_least("refinement ratio lower", ratio, cfg.ratio_range[0], 0.0));
        report.checks.push(Check::at_most("refinement ratio upper", ratio, cfg.ratio_range[1], 0.0));
    }
    Ok(report)
}
