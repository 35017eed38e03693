use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;

use qmlab_core::discretization::{GridField, ModeIndex, SpectralState, ZonalGrid};
use qmlab_core::potentials::{lp_norm, EquatorialCutoff, DEFAULT_MARGIN};
use qmlab_core::propagator::{assemble_zonal_block, duhamel_diagnostics, sphere_potential_matrix, DenseExponential, UNITARITY_TOL};
use qmlab_core::quasimodes::EquatorialHarmonic;
use qmlab_core::{Error, Result};

use super::strictly_decreasing;
use crate::config::SphereInstabilityConfig;
use crate::report::{Check, Experiment, ExperimentReport, Table};

pub const COLUMNS: &[&str] = &[
    "kind", "k", "n", "kappa", "t", "showcase", "deficiency", "residual", "duhamel_residual", "residual_bound",
    "deficiency_identity_error", "distance", "lower_bound", "upper_bound", "margin", "p", "norm", "pass",
];

/// Degrees `n_min · 2^{j/per_octave}` up to `n_max`, deduplicated.
pub fn degree_scan(n_min: usize, n_max: usize, per_octave: usize) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::new();
    for j in 0.. {
        let n = (n_min as f64 * 2f64.powf(j as f64 / per_octave as f64)).round() as usize;
        if n > n_max {
            break;
        }
        if out.last() != Some(&n) {
            out.push(n);
        }
    }
    out
}

/// Smallest scanned n whose deficiency is within `slack` of the scan minimum.
pub fn pick_degree(scan: &[(usize, f64)], slack: f64) -> Option<usize> {
    let best = scan.iter().map(|(_, d)| *d).fold(f64::INFINITY, f64::min);
    scan.iter().find(|(_, d)| *d <= slack * best).map(|(n, _)| *n)
}

fn potential(cfg: &SphereInstabilityConfig, grid: &Arc<ZonalGrid>) -> GridField<ZonalGrid> {
    if cfg.v_amplitude == 0.0 {
        GridField::zeros(grid.clone())
    } else {
        grid.sample(|t| cfg.v_amplitude * t.cos().powi(2))
    }
}

struct Cell {
    kappa: f64,
    t: f64,
    showcase: bool,
}

fn cells(cfg: &SphereInstabilityConfig) -> Vec<Cell> {
    let show_t = if cfg.showcase_t == 0.0 { PI / cfg.showcase_kappa } else { cfg.showcase_t };
    let mut out: Vec<Cell> = Vec::new();
    for &kappa in &cfg.kappa {
        for &t in &cfg.t {
            out.push(Cell { kappa, t, showcase: kappa == cfg.showcase_kappa && t == show_t });
        }
    }
    if !out.iter().any(|c| c.showcase) {
        out.push(Cell { kappa: cfg.showcase_kappa, t: show_t, showcase: true });
    }
    out
}

struct ProbeRow {
    cell: usize,
    diag: qmlab_core::propagator::DuhamelDiagnostics,
    distance: f64,
    defect: f64,
}

fn probes(cfg: &SphereInstabilityConfig, k: usize, n: usize, cells: &[Cell]) -> Result<Vec<ProbeRow>> {
    let cut = EquatorialCutoff::new(k, 1.0, DEFAULT_MARGIN)?;
    let grid = Arc::new(cut.zonal_grid_for(n));
    let phi = grid.sample(|t| cut.value(t));
    let v = potential(cfg, &grid);
    let u = EquatorialHarmonic::new(n, 2);
    let l_max = n + cfg.block - 1;
    // the shift keeps the kinetic diagonal O(block·n) instead of O(n²)
    let h1 = assemble_zonal_block(&v, n, l_max, (n as u64) * (n as u64 + 1))?;
    let coupling = sphere_potential_matrix(&phi, n, l_max);
    let probe = SpectralState::unit(h1.basis(), ModeIndex::Sphere { l: n, m: n as i64 })?;
    let e1 = DenseExponential::new(&h1)?;
    let mut out = Vec::with_capacity(cells.len());
    let mut kappas: Vec<f64> = cells.iter().map(|c| c.kappa).collect();
    kappas.sort_by(f64::total_cmp);
    kappas.dedup();
    for kappa in kappas {
        let h2 = h1.with_added(&coupling.map(|z| z * kappa))?;
        let e2 = DenseExponential::new(&h2)?;
        for (i, c) in cells.iter().enumerate().filter(|(_, c)| c.kappa == kappa) {
            let a = e1.evolve(&probe, c.t)?;
            let b = e2.evolve(&probe, c.t)?;
            let distance =
                a.state.coeffs().iter().zip(b.state.coeffs()).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt();
            let diag = duhamel_diagnostics(&u, &v, &phi, kappa, c.t)?;
            out.push(ProbeRow { cell: i, diag, distance, defect: a.unitarity_defect.max(b.unitarity_defect) });
        }
    }
    out.sort_by_key(|r| r.cell);
    Ok(out)
}

pub fn run_sphere_instability(cfg: &SphereInstabilityConfig) -> Result<ExperimentReport> {
    let mut table = Table::new(COLUMNS);
    let degrees = degree_scan(cfg.n_min, cfg.n_max, cfg.per_octave);
    let scan_points: Vec<(usize, usize)> = cfg.k.iter().flat_map(|&k| degrees.iter().map(move |&n| (k, n))).collect();
    let deficiencies = scan_points
        .par_iter()
        .map(|&(k, n)| {
            let cut = EquatorialCutoff::new(k, 1.0, DEFAULT_MARGIN)?;
            let grid = Arc::new(cut.zonal_grid_for(n));
            let phi = grid.sample(|t| cut.value(t));
            duhamel_diagnostics(&EquatorialHarmonic::new(n, 2), &potential(cfg, &grid), &phi, 1.0, 0.0)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut schedule = Vec::with_capacity(cfg.k.len());
    for (i, &k) in cfg.k.iter().enumerate() {
        let scan: Vec<(usize, f64)> =
            degrees.iter().enumerate().map(|(j, &n)| (n, deficiencies[i * degrees.len() + j].deficiency)).collect();
        let n_k = pick_degree(&scan, cfg.schedule_slack)
            .ok_or_else(|| Error::InvalidParameter("empty degree scan".into()))?;
        schedule.push(n_k);
        for (n, d) in scan {
            table.push(vec![("kind", "scan".into()), ("k", k.into()), ("n", n.into()), ("deficiency", d.into())]);
        }
    }
    // a bounded scan can only show n_k → ∞ up to its ceiling, where the
    // schedule may plateau; a decrease means the scan is broken
    if schedule.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidParameter(format!("degree schedule {schedule:?} decreases in k")));
    }

    let cells = cells(cfg);
    let rows = cfg
        .k
        .par_iter()
        .zip(&schedule)
        .map(|(&k, &n)| probes(cfg, k, n, &cells))
        .collect::<Result<Vec<_>>>()?;

    let mut report_defect = 0.0f64;
    let mut worst_lower = f64::INFINITY;
    let mut worst_upper = f64::INFINITY;
    let mut worst_duhamel = f64::INFINITY;
    let mut worst_identity = 0.0f64;
    let mut showcase_lower_positive = true;
    let mut showcase_last = f64::NAN;
    for ((&k, &n), probe_rows) in cfg.k.iter().zip(&schedule).zip(&rows) {
        for r in probe_rows {
            let c = &cells[r.cell];
            let d = &r.diag;
            let upper = c.kappa * c.t.abs();
            let margin = r.distance - (d.lower_bound - cfg.tol);
            let identity_err = (d.deficiency.powi(2) - d.deficiency_identity).abs();
            report_defect = report_defect.max(r.defect);
            worst_lower = worst_lower.min(margin);
            worst_upper = worst_upper.min(upper + 1e-8 - r.distance);
            worst_duhamel = worst_duhamel.min(d.residual_bound * (1.0 + 1e-12) - d.duhamel_residual);
            worst_identity = worst_identity.max(identity_err);
            if c.showcase {
                showcase_lower_positive &= d.lower_bound > 0.0;
                showcase_last = r.distance;
            }
            table.push(vec![
                ("kind", "probe".into()),
                ("k", k.into()),
                ("n", n.into()),
                ("kappa", c.kappa.into()),
                ("t", c.t.into()),
                ("showcase", c.showcase.into()),
                ("deficiency", d.deficiency.into()),
                ("residual", d.residual.into()),
                ("duhamel_residual", d.duhamel_residual.into()),
                ("residual_bound", d.residual_bound.into()),
                ("deficiency_identity_error", identity_err.into()),
                ("distance", r.distance.into()),
                ("lower_bound", d.lower_bound.into()),
                ("upper_bound", upper.into()),
                ("margin", margin.into()),
                ("pass", (margin >= 0.0).into()),
            ]);
        }
    }

    let mut norms: Vec<Vec<f64>> = vec![Vec::new(); cfg.p.len()];
    let mut worst_sup = 0.0f64;
    for &k in &cfg.k {
        let cut = EquatorialCutoff::new(k, cfg.showcase_kappa, DEFAULT_MARGIN)?;
        let grid = Arc::new(cut.zonal_grid());
        let w = cut.sample_zonal(&grid);
        for (i, &p) in cfg.p.iter().enumerate() {
            let v = lp_norm(&w, p)?;
            norms[i].push(v);
            if p.is_infinite() {
                worst_sup = worst_sup.max((v - cfg.showcase_kappa).abs());
            }
            table.push(vec![
                ("kind", "norm".into()),
                ("k", k.into()),
                ("kappa", cfg.showcase_kappa.into()),
                ("p", p.into()),
                ("norm", v.into()),
            ]);
        }
    }

    let mut report = ExperimentReport::new(Experiment::SphereInstability, table);
    report.max_unitarity_defect = report_defect;
    if cfg.k.is_empty() {
        return Ok(report);
    }
    report.checks.push(Check::at_least("distance above lower bound", worst_lower, 0.0, 0.0));
    report.checks.push(Check::at_least("distance below κt", worst_upper, 0.0, 0.0));
    report.checks.push(Check::holds("lower bound positive on showcase cell", showcase_lower_positive, format!("k ∈ {:?}", cfg.k)));
    report.checks.push(Check::at_least("showcase distance at largest k", showcase_last, cfg.min_final_distance, 0.0));
    report.checks.push(Check::at_least("duhamel residual within r + κD", worst_duhamel, 0.0, 0.0));
    report.checks.push(Check::at_most("deficiency identity", worst_identity, 0.0, 1e-12));
    report.checks.push(Check::at_most("unitarity defect", report_defect, UNITARITY_TOL, 0.0));
    report.checks.push(Check::holds("degree schedule non-decreasing", true, format!("n_k = {schedule:?}")));
    for (i, &p) in cfg.p.iter().enumerate() {
        if p.is_infinite() {
            report.checks.push(Check::at_most("sup norm equals κ", worst_sup, 0.0, 1e-12));
            continue;
        }
        let v = &norms[i];
        report.checks.push(Check::holds(
            &format!("L^{p} norm decreasing in k"),
            strictly_decreasing(v),
            format!("{:.3e} → {:.3e}", v[0], v[v.len() - 1]),
        ));
        if p == 1.0 {
            report.checks.push(Check::at_least("L^1 reduction", v[0] / v[v.len() - 1], cfg.l1_reduction, 0.0));
        }
    }
    Ok(report)
}
