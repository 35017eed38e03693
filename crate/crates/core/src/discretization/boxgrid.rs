use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use super::{GridField, ModeBasis, Quadrature, SpectralState};
use crate::{Error, Result, C64};

/// Periodic box `[0, L)³` with `N` points per side.
///
/// Samples are stored row-major, `(i·N + j)·N + k` for `x = (i, j, k)·h`.
/// Coefficients use the orthonormal plane waves `L^{-3/2} e^{2πi k·x/L}`, so
/// the grid `L²` norm and the coefficient `l²` norm coincide.
pub struct BoxGrid {
    side: f64,
    n: usize,
    weights: Vec<f64>,
    fft: Arc<dyn Fft<f64>>,
    ifft: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for BoxGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BoxGrid").field("side", &self.side).field("n", &self.n).finish()
    }
}

impl Quadrature for BoxGrid {
    fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// Lines handed to one rayon task in the FFT passes.
const LINES_PER_TASK: usize = 64;

impl BoxGrid {
    pub fn new(side: f64, n: usize) -> Result<Self> {
        if !n.is_power_of_two() || n < 2 {
            return Err(Error::NotPowerOfTwo(n));
        }
        if !(side > 0.0) {
            return Err(Error::InvalidParameter(format!("box side must be positive, got {side}")));
        }
        let h = side / n as f64;
        let mut planner = FftPlanner::new();
        Ok(Self {
            side,
            n,
            weights: vec![h * h * h; n * n * n],
            fft: planner.plan_fft_forward(n),
            ifft: planner.plan_fft_inverse(n),
        })
    }

    pub fn side(&self) -> f64 {
        self.side
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn spacing(&self) -> f64 {
        self.side / self.n as f64
    }

    pub fn center(&self) -> [f64; 3] {
        [0.5 * self.side; 3]
    }

    pub fn point(&self, idx: usize) -> [f64; 3] {
        let n = self.n;
        let h = self.spacing();
        [(idx / (n * n)) as f64 * h, ((idx / n) % n) as f64 * h, (idx % n) as f64 * h]
    }

    /// Angular wavenumber `2πk/L` of FFT index `i` along one axis.
    pub fn wavenumber(&self, i: usize) -> f64 {
        let k = if i >= self.n / 2 { i as i64 - self.n as i64 } else { i as i64 };
        2.0 * PI * k as f64 / self.side
    }

    /// `|ξ|²` for every FFT slot; `−|ξ|²` is the Laplacian symbol.
    pub fn wavenumber_sqr(&self) -> Vec<f64> {
        let n = self.n;
        let k2: Vec<f64> = (0..n).map(|i| self.wavenumber(i).powi(2)).collect();
        let mut out = vec![0.0; n * n * n];
        out.par_chunks_mut(n * n).enumerate().for_each(|(i, slab)| {
            for j in 0..n {
                for k in 0..n {
                    slab[j * n + k] = k2[i] + k2[j] + k2[k];
                }
            }
        });
        out
    }

    pub fn sample(self: &Arc<Self>, f: impl Fn([f64; 3]) -> C64 + Sync) -> GridField<Self> {
        let n = self.n;
        let mut values = vec![C64::new(0.0, 0.0); n * n * n];
        values.par_chunks_mut(n * n).enumerate().for_each(|(i, slab)| {
            for (r, v) in slab.iter_mut().enumerate() {
                *v = f(self.point(i * n * n + r));
            }
        });
        GridField { grid: self.clone(), values }
    }

    pub fn sample_real(self: &Arc<Self>, f: impl Fn([f64; 3]) -> f64 + Sync) -> GridField<Self> {
        self.sample(|x| C64::new(f(x), 0.0))
    }

    /// Unnormalized forward DFT over all three axes, in place.
    pub fn fft_forward(&self, data: &mut Vec<C64>) {
        self.fft3(data, &self.fft);
    }

    /// Unnormalized inverse DFT over all three axes, in place.
    pub fn fft_inverse(&self, data: &mut Vec<C64>) {
        self.fft3(data, &self.ifft);
    }

    fn fft3(&self, data: &mut Vec<C64>, plan: &Arc<dyn Fft<f64>>) {
        let n = self.n;
        assert_eq!(data.len(), n * n * n);
        let mut scratch = vec![C64::new(0.0, 0.0); data.len()];
        // transform the contiguous axis, then rotate (i,j,k) → (k,i,j); three
        // rounds visit every axis and restore the layout
        for _ in 0..3 {
            data.par_chunks_mut(n * LINES_PER_TASK).for_each(|chunk| plan.process(chunk));
            let src: &[C64] = data;
            scratch.par_chunks_mut(n * n).enumerate().for_each(|(k, out)| {
                for i in 0..n {
                    for j in 0..n {
                        out[i * n + j] = src[(i * n + j) * n + k];
                    }
                }
            });
            std::mem::swap(data, &mut scratch);
        }
    }

    /// `c_k = ⟨L^{-3/2} e^{2πik·x/L}, f⟩`.
    pub fn analyze(&self, field: &GridField<BoxGrid>) -> Result<SpectralState> {
        if field.grid.n != self.n || field.grid.side != self.side {
            return Err(Error::GridMismatch);
        }
        let mut data = field.values.clone();
        self.fft_forward(&mut data);
        let h = self.spacing();
        let scale = h * h * h / self.side.powf(1.5);
        data.par_iter_mut().for_each(|v| *v *= scale);
        SpectralState::new(ModeBasis::Box { n: self.n }, data)
    }

    pub fn synthesize(self: &Arc<Self>, state: &SpectralState) -> Result<GridField<BoxGrid>> {
        if state.basis() != (ModeBasis::Box { n: self.n }) {
            return Err(Error::InvalidParameter(format!("expected a {}³ box basis", self.n)));
        }
        let mut data = state.coeffs().to_vec();
        self.fft_inverse(&mut data);
        let scale = 1.0 / self.side.powf(1.5);
        data.par_iter_mut().for_each(|v| *v *= scale);
        Ok(GridField { grid: self.clone(), values: data })
    }

    /// `‖Δf‖_{L²}` computed in Fourier space.
    pub fn laplacian_norm(&self, field: &GridField<BoxGrid>) -> Result<f64> {
        let coeffs = self.analyze(field)?;
        let k2 = self.wavenumber_sqr();
        Ok(coeffs.coeffs().iter().zip(&k2).map(|(c, k)| c.norm_sqr() * k * k).sum::<f64>().sqrt())
    }

    /// Whether grid point `idx` lies within `width` of the box faces.
    pub fn in_guard_band(&self, idx: usize, width: f64) -> bool {
        let x = self.point(idx);
        let hi = self.side - width;
        // the periodic face at L is the same as 0, so points x ≥ L − width count too
        x.iter().any(|&c| c < width || c >= hi)
    }

    /// Mass `∫ |f|²` over the guard band of the given width.
    pub fn guard_mass(&self, field: &GridField<BoxGrid>, width: f64) -> f64 {
        let w = self.weights[0];
        field
            .values
            .iter()
            .enumerate()
            .filter(|(idx, _)| self.in_guard_band(*idx, width))
            .map(|(_, v)| w * v.norm_sqr())
            .sum()
    }
}
