//! Experiment configuration.
//!
//! Read from TOML; every key has a default, unknown keys are rejected, and
//! `validate` checks ranges before anything is computed.

use std::path::Path;

use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("cannot parse {path}: {source}")]
    Parse { path: String, source: toml::de::Error },
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    /// seed for the randomized `pinfty` trials
    pub seed: u64,
    pub weakstar: WeakstarConfig,
    pub sphere_instability: SphereInstabilityConfig,
    pub revolution: RevolutionConfig,
    pub flat_smallp: FlatConfig,
    pub pinfty: PinftyConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WeakstarConfig {
    /// degrees for the pairing table
    pub n: Vec<usize>,
    /// test functions: `one`, `cos2`, `sin2cos2phi`, `x1`
    pub functions: Vec<String>,
    /// degrees for the eigen-residual table (with `L_max = n + residual_extra`)
    pub residual_n: Vec<usize>,
    pub residual_extra: usize,
    pub tol: f64,
    /// the cos²θ gap must fall below this at the largest degree
    pub final_gap: f64,
}

impl Default for WeakstarConfig {
    fn default() -> Self {
        Self {
            n: (1..=50).collect(),
            functions: vec!["one".into(), "cos2".into(), "sin2cos2phi".into(), "x1".into()],
            residual_n: vec![1, 2, 4, 8, 16, 32],
            residual_extra: 8,
            tol: 1e-10,
            final_gap: 0.01,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SphereInstabilityConfig {
    pub k: Vec<usize>,
    /// κ values of the scan grid
    pub kappa: Vec<f64>,
    /// t values of the scan grid
    pub t: Vec<f64>,
    /// showcase cell; `showcase_t = 0` means `π/κ`
    pub showcase_kappa: f64,
    pub showcase_t: f64,
    /// degree scan `n_min · 2^{j/per_octave} ≤ n_max`
    pub n_min: usize,
    pub n_max: usize,
    pub per_octave: usize,
    /// `n_k` = smallest scanned n with `D_k(n) ≤ slack · min D_k`
    pub schedule_slack: f64,
    /// rows of each azimuthal block: `l = n ..= n + block − 1`
    pub block: usize,
    /// `L^p` norms of κφ_k to report (`inf` allowed)
    pub p: Vec<f64>,
    pub tol: f64,
    /// the showcase distance at the largest k must reach this
    pub min_final_distance: f64,
    /// required `‖κφ_k‖_{L¹}` reduction from the first to the last k
    pub l1_reduction: f64,
    /// `V = v_amplitude · cos²θ` (0 disables)
    pub v_amplitude: f64,
}

impl Default for SphereInstabilityConfig {
    fn default() -> Self {
        Self {
            k: vec![1, 2, 4, 8, 16, 32, 64],
            kappa: vec![0.25, 0.5, 1.0],
            t: vec![0.0, 0.5, 1.0, 2.0, 4.0],
            showcase_kappa: 0.5,
            showcase_t: 0.0,
            n_min: 16,
            n_max: 1 << 24,
            per_octave: 2,
            schedule_slack: 1.05,
            block: 16,
            p: vec![1.0, 2.0, f64::INFINITY],
            tol: 1e-6,
            min_final_distance: 1.5,
            l1_reduction: 10.0,
            v_amplitude: 0.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RevolutionConfig {
    pub a: f64,
    pub b: f64,
    /// `cosh` or `one`
    pub profile: String,
    pub m: Vec<i64>,
    /// uniform intervals of the finite-difference grid
    pub intervals: usize,
    /// window half-width `m^{window_exponent}`
    pub window_exponent: f64,
    /// the window mass at the largest m must reach this
    pub final_mass: f64,
    /// refinement study: angular mode and interval counts (each doubling the last)
    pub refinement_m: i64,
    pub refinement_intervals: Vec<usize>,
    pub ratio_range: [f64; 2],
}

impl Default for RevolutionConfig {
    fn default() -> Self {
        Self {
            a: -1.0,
            b: 1.0,
            profile: "cosh".into(),
            m: vec![10, 20, 40, 80],
            intervals: 1024,
            window_exponent: -0.25,
            final_mass: 0.99,
            refinement_m: 10,
            refinement_intervals: vec![256, 512, 1024],
            ratio_range: [3.5, 4.5],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FlatConfig {
    pub n: Vec<usize>,
    /// box points per axis (power of two)
    pub grid: usize,
    /// unit-scale box side; scale n runs on a box of side `side / n`
    pub side: f64,
    /// support radius of the unscaled bump `u₀`
    pub r_u: f64,
    /// unit-scale guard band width (scale n uses `guard / n`)
    pub guard: f64,
    pub p: Vec<f64>,
    /// Simpson samples for the Duhamel integrals (odd)
    pub duhamel_samples: usize,
    /// split-step phase budget per step, `δ‖V‖_∞`
    pub phase_per_step: f64,
    /// background `V = v_amplitude · exp(−|x−c|²/(2 v_width²))` (0 disables)
    pub v_amplitude: f64,
    pub v_width: f64,
    pub phase_tol: f64,
    pub lp_rel_tol: f64,
}

impl Default for FlatConfig {
    fn default() -> Self {
        Self {
            n: vec![2, 4, 8],
            grid: 128,
            side: 96.0,
            r_u: 10.4,
            guard: 1.0,
            p: vec![1.0, 1.4, 2.0],
            duhamel_samples: 9,
            phase_per_step: 0.1,
            v_amplitude: 0.0,
            v_width: 4.0,
            phase_tol: 1e-12,
            lp_rel_tol: 0.01,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PinftyConfig {
    /// randomized axisymmetric trials
    pub trials: usize,
    pub t: Vec<f64>,
    /// azimuthal orders drawn from `0..=m_max`, blocks of `block` rows
    pub m_max: usize,
    pub block: usize,
    /// cutoff family `W = κφ_k`
    pub cutoff_k: Vec<usize>,
    pub cutoff_kappa: f64,
    /// constant potentials
    pub constants: Vec<f64>,
    pub tol: f64,
}

impl Default for PinftyConfig {
    fn default() -> Self {
        Self {
            trials: 24,
            t: vec![0.1, 1.0],
            m_max: 12,
            block: 24,
            cutoff_k: vec![1, 4, 16],
            cutoff_kappa: 0.5,
            constants: vec![0.3, -1.2],
            tol: 1e-8,
        }
    }
}

impl Config {
    pub fn from_toml(text: &str, origin: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|source| ConfigError::Parse { path: origin.into(), source })
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let shown = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: shown.clone(), source })?;
        Self::from_toml(&text, &shown)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |msg: String| Err(ConfigError::Invalid(msg));
        let w = &self.weakstar;
        for f in &w.functions {
            if !matches!(f.as_str(), "one" | "cos2" | "sin2cos2phi" | "x1") {
                return bad(format!("weakstar.functions: unknown test function `{f}`"));
            }
        }
        if w.n.contains(&0) || w.residual_n.contains(&0) {
            return bad("weakstar: degrees start at 1".into());
        }
        if w.n.iter().chain(&w.residual_n).any(|&n| n > 400) {
            return bad("weakstar: degrees above 400 need grids beyond the default budget".into());
        }
        positive("weakstar.tol", w.tol)?;
        positive("weakstar.final_gap", w.final_gap)?;

        let s = &self.sphere_instability;
        if s.k.contains(&0) {
            return bad("sphere_instability.k: cutoff indices start at 1".into());
        }
        for &kappa in s.kappa.iter().chain(std::iter::once(&s.showcase_kappa)) {
            if !(kappa > 0.0 && kappa <= 1.0) {
                return bad(format!("sphere_instability: κ must lie in (0, 1], got {kappa}"));
            }
        }
        if s.t.iter().chain(std::iter::once(&s.showcase_t)).any(|t| !(t.is_finite() && *t >= 0.0)) {
            return bad("sphere_instability: times must be finite and ≥ 0".into());
        }
        if s.n_min == 0 || s.n_max < s.n_min || s.n_max > 1 << 26 || s.per_octave == 0 {
            return bad("sphere_instability: need 1 ≤ n_min ≤ n_max ≤ 2^26 and per_octave ≥ 1".into());
        }
        if !(s.schedule_slack >= 1.0) {
            return bad("sphere_instability.schedule_slack must be ≥ 1".into());
        }
        if !(2..=256).contains(&s.block) {
            return bad("sphere_instability.block must lie in 2..=256".into());
        }
        lp_list("sphere_instability.p", &s.p)?;
        positive("sphere_instability.tol", s.tol)?;
        if !(s.v_amplitude >= 0.0 && s.v_amplitude.is_finite()) {
            return bad("sphere_instability.v_amplitude must be ≥ 0".into());
        }

        let r = &self.revolution;
        if !(r.a < r.b) || !r.a.is_finite() || !r.b.is_finite() {
            return bad("revolution: need a < b".into());
        }
        if !matches!(r.profile.as_str(), "cosh" | "one") {
            return bad(format!("revolution.profile: unknown profile `{}`", r.profile));
        }
        if r.intervals < 16 || r.refinement_intervals.iter().any(|&n| n < 16) {
            return bad("revolution: at least 16 intervals".into());
        }
        if r.refinement_intervals.len() != 3
            || r.refinement_intervals[1] != 2 * r.refinement_intervals[0]
            || r.refinement_intervals[2] != 2 * r.refinement_intervals[1]
        {
            return bad("revolution.refinement_intervals: need three successive doublings".into());
        }
        if !(r.ratio_range[0] < r.ratio_range[1]) {
            return bad("revolution.ratio_range must be increasing".into());
        }

        let f = &self.flat_smallp;
        if f.n.contains(&0) {
            return bad("flat_smallp.n: scales start at 1".into());
        }
        if !f.grid.is_power_of_two() || f.grid < 8 || f.grid > 256 {
            return bad("flat_smallp.grid must be a power of two in 8..=256".into());
        }
        positive("flat_smallp.side", f.side)?;
        positive("flat_smallp.r_u", f.r_u)?;
        if !(f.guard >= 0.0) {
            return bad("flat_smallp.guard must be ≥ 0".into());
        }
        lp_list("flat_smallp.p", &f.p)?;
        if f.duhamel_samples < 3 || f.duhamel_samples.is_multiple_of(2) {
            return bad("flat_smallp.duhamel_samples must be odd and ≥ 3".into());
        }
        positive("flat_smallp.phase_per_step", f.phase_per_step)?;
        if !(f.v_amplitude >= 0.0) {
            return bad("flat_smallp.v_amplitude must be ≥ 0".into());
        }
        positive("flat_smallp.v_width", f.v_width)?;
        positive("flat_smallp.phase_tol", f.phase_tol)?;
        positive("flat_smallp.lp_rel_tol", f.lp_rel_tol)?;

        let p = &self.pinfty;
        if p.t.is_empty() || p.t.iter().any(|t| !t.is_finite()) {
            return bad("pinfty.t must be a non-empty list of finite times".into());
        }
        if !(1..=256).contains(&p.block) {
            return bad("pinfty.block must lie in 1..=256".into());
        }
        if p.cutoff_k.contains(&0) {
            return bad("pinfty.cutoff_k: indices start at 1".into());
        }
        if !(p.cutoff_kappa > 0.0 && p.cutoff_kappa <= 1.0) {
            return bad("pinfty.cutoff_kappa must lie in (0, 1]".into());
        }
        positive("pinfty.tol", p.tol)?;
        Ok(())
    }
}

fn positive(name: &str, v: f64) -> Result<(), ConfigError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(ConfigError::Invalid(format!("{name} must be positive and finite, got {v}")))
    }
}

fn lp_list(name: &str, p: &[f64]) -> Result<(), ConfigError> {
    match p.iter().find(|p| !(**p >= 1.0)) {
        Some(p) => Err(ConfigError::Invalid(format!("{name}: exponents must be ≥ 1, got {p}"))),
        None => Ok(()),
    }
}
