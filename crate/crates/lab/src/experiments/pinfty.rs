use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use qmlab_core::discretization::{GridField, ModeBasis, SpectralState, ZonalGrid};
use qmlab_core::potentials::{EquatorialCutoff, DEFAULT_MARGIN};
use qmlab_core::propagator::{free_sphere_block, linfty_stability_check};
use qmlab_core::{Result, C64};

use crate::config::PinftyConfig;
use crate::report::{Check, Experiment, ExperimentReport, Table};

pub const COLUMNS: &[&str] = &["kind", "trial", "k", "m", "t", "sup_w", "measured", "bound", "margin", "pass"];

/// Cosine coefficients of a random trigonometric profile.
const MODES: usize = 5;

enum Potential {
    Trig(Vec<f64>),
    Cutoff(usize),
    Constant(f64),
    Zero,
}

struct Trial {
    kind: &'static str,
    potential: Potential,
    m: usize,
    t: f64,
    probe: Vec<C64>,
}

fn unit_vector(rng: &mut ChaCha8Rng, n: usize) -> Vec<C64> {
    let mut v: Vec<C64> = (0..n).map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|z| *z /= norm);
    v
}

/// Every random number is drawn here, in one sequential pass, so the trial
/// list depends on the seed alone.
fn trials(cfg: &PinftyConfig, seed: u64) -> Vec<Trial> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for i in 0..cfg.trials {
        let coeffs = (0..MODES).map(|_| rng.random_range(-1.0..1.0)).collect();
        let m = rng.random_range(0..=cfg.m_max);
        let probe = unit_vector(&mut rng, cfg.block);
        out.push(Trial { kind: "random", potential: Potential::Trig(coeffs), m, t: cfg.t[i % cfg.t.len()], probe });
    }
    let fixed: Vec<(&'static str, Potential)> = cfg
        .cutoff_k
        .iter()
        .map(|&k| ("cutoff", Potential::Cutoff(k)))
        .chain(cfg.constants.iter().map(|&c| ("constant", Potential::Constant(c))))
        .chain(std::iter::once(("zero", Potential::Zero)))
        .collect();
    for (kind, potential) in fixed {
        let m = rng.random_range(0..=cfg.m_max);
        let probe = unit_vector(&mut rng, cfg.block);
        let t = *cfg.t.last().expect("validated t list");
        out.push(Trial { kind, potential, m, t, probe });
    }
    out
}

fn sample(cfg: &PinftyConfig, p: &Potential, gauss: &Arc<ZonalGrid>) -> Result<GridField<ZonalGrid>> {
    Ok(match p {
        Potential::Trig(a) => gauss.sample(|t| a.iter().enumerate().map(|(j, a)| a * (j as f64 * t).cos()).sum()),
        Potential::Cutoff(k) => {
            let cut = EquatorialCutoff::new(*k, cfg.cutoff_kappa, DEFAULT_MARGIN)?;
            cut.sample_zonal(&Arc::new(cut.zonal_grid()))
        }
        Potential::Constant(c) => gauss.sample(|_| *c),
        Potential::Zero => GridField::zeros(gauss.clone()),
    })
}

pub fn run_pinfty(cfg: &PinftyConfig, seed: u64) -> Result<ExperimentReport> {
    let mut table = Table::new(COLUMNS);
    let gauss = Arc::new(ZonalGrid::gauss(96));
    let list = trials(cfg, seed);
    let measured = list
        .par_iter()
        .map(|tr| {
            let w = sample(cfg, &tr.potential, &gauss)?;
            let h = free_sphere_block(tr.m, tr.m + cfg.block - 1, 0)?;
            let basis: ModeBasis = h.basis();
            let u = SpectralState::new(basis, tr.probe.clone())?;
            let (d, b) = linfty_stability_check(&h, &w, &u, tr.t)?;
            Ok((w.max_abs(), d, b))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut worst = f64::INFINITY;
    let mut worst_scalar = 0.0f64;
    for (i, (tr, &(sup, d, b))) in list.iter().zip(&measured).enumerate() {
        let margin = b + cfg.tol - d;
        worst = worst.min(margin);
        if let Potential::Constant(c) = tr.potential {
            worst_scalar = worst_scalar.max((d - 2.0 * (0.5 * c * tr.t).sin().abs()).abs());
        }
        let k = match tr.potential {
            Potential::Cutoff(k) => Some(k),
            _ => None,
        };
        table.push(vec![
            ("kind", tr.kind.into()),
            ("trial", i.into()),
            ("k", k.into()),
            ("m", tr.m.into()),
            ("t", tr.t.into()),
            ("sup_w", sup.into()),
            ("measured", d.into()),
            ("bound", b.into()),
            ("margin", margin.into()),
            ("pass", (margin >= 0.0).into()),
        ]);
    }
    let mut report = ExperimentReport::new(Experiment::Pinfty, table);
    if !list.is_empty() {
        report.checks.push(Check::at_least("distance within t‖W‖∞", worst, 0.0, 0.0));
        report.checks.push(Check::at_most("constant potentials give a scalar phase", worst_scalar, 0.0, 1e-12));
    }
    Ok(report)
}
