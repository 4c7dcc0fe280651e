//! Frequency-bin discretization of the two triphoton states and the reduced
//! two-photon states left after one photon is lost.
//!
//! Photon 2's frequency is fixed by energy conservation (`nu2 = -nu1 - nu3`
//! for the three-mode state, `nu2 = -2 nu1` for the degenerate state) and is
//! mapped to the nearest bin of the same grid. Combinations whose `nu2` lies
//! more than half a bin outside the grid carry no amplitude.

use nalgebra::DMatrix;

use crate::qubit_toy::DensityMatrix;
use crate::spectra::{detuning_ghz, detuning_w, phi_value, FilterSpec, PhaseMatchConfig};
use crate::{Error, Result, C64};

/// Default cap on bins per photon; the pair space is `n_bins^2` dimensional.
pub const MAX_BINS: usize = 16;

/// `n_bins` uniformly spaced bin centers from `nu_min` to `nu_max` (rad/ps).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModeGrid {
    n_bins: usize,
    nu_min: f64,
    nu_max: f64,
}

impl ModeGrid {
    pub fn new(n_bins: usize, nu_min: f64, nu_max: f64) -> Result<Self> {
        if !(2..=MAX_BINS).contains(&n_bins) {
            return Err(Error::Configuration(format!(
                "n_bins must be between 2 and {MAX_BINS}, got {n_bins}"
            )));
        }
        if !(nu_min.is_finite() && nu_max.is_finite() && nu_max > nu_min) {
            return Err(Error::Configuration(format!(
                "mode grid needs nu_max > nu_min, got [{nu_min}, {nu_max}]"
            )));
        }
        Ok(Self {
            n_bins,
            nu_min,
            nu_max,
        })
    }

    /// Grid with spacing `2 half_span / n_bins` whose bin centers are integer
    /// multiples of the spacing, including zero. Sums and doubles of bin
    /// frequencies then land exactly on bin centers.
    pub fn centered(n_bins: usize, half_span: f64) -> Result<Self> {
        if !(half_span > 0.0) || n_bins < 2 {
            return Err(Error::Configuration(format!(
                "centered grid needs n_bins >= 2 and positive half-span, got {n_bins}, {half_span}"
            )));
        }
        let spacing = 2.0 * half_span / n_bins as f64;
        let nu_min = -((n_bins / 2) as f64) * spacing;
        Self::new(n_bins, nu_min, nu_min + (n_bins - 1) as f64 * spacing)
    }

    pub fn n_bins(&self) -> usize {
        self.n_bins
    }

    pub fn nu_min(&self) -> f64 {
        self.nu_min
    }

    pub fn nu_max(&self) -> f64 {
        self.nu_max
    }

    pub fn spacing(&self) -> f64 {
        (self.nu_max - self.nu_min) / (self.n_bins - 1) as f64
    }

    pub fn center(&self, i: usize) -> f64 {
        self.nu_min + i as f64 * self.spacing()
    }

    /// Nearest bin to `nu`, or `None` when `nu` is more than half a bin
    /// outside the grid.
    pub fn nearest_bin(&self, nu: f64) -> Option<usize> {
        let r = (nu - self.nu_min) / self.spacing();
        let last = (self.n_bins - 1) as f64;
        if !(-0.5..=last + 0.5).contains(&r) {
            return None;
        }
        Some(r.round().clamp(0.0, last) as usize)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum TensorAmplitudes {
    /// `a[i * n + k]` over (nu1 bin i, nu3 bin k); `photon2[i * n + k]` is the
    /// bin of photon 2.
    ThreeMode {
        a: Vec<C64>,
        photon2: Vec<Option<usize>>,
    },
    /// `b[i]` with both degenerate photons in bin i; `photon2[i]` is the bin
    /// of the nondegenerate photon.
    Degenerate {
        b: Vec<C64>,
        photon2: Vec<Option<usize>>,
    },
}

/// Normalized discretized joint spectral amplitude of a triphoton state.
#[derive(Clone, Debug, PartialEq)]
pub struct TriphotonTensor {
    grid: ModeGrid,
    amplitudes: TensorAmplitudes,
}

impl TriphotonTensor {
    /// Three-mode state from raw amplitudes `a[i * n + k]`. Entries whose
    /// photon-2 frequency falls off the grid are zeroed before normalizing.
    pub fn from_w_amplitudes(grid: ModeGrid, mut a: Vec<C64>) -> Result<Self> {
        let n = grid.n_bins();
        if a.len() != n * n {
            return Err(Error::InvalidArgument(format!(
                "expected {} amplitudes, got {}",
                n * n,
                a.len()
            )));
        }
        let photon2: Vec<Option<usize>> = (0..n * n)
            .map(|idx| grid.nearest_bin(-grid.center(idx / n) - grid.center(idx % n)))
            .collect();
        for (z, bin) in a.iter_mut().zip(&photon2) {
            if bin.is_none() {
                *z = C64::new(0.0, 0.0);
            }
        }
        normalize(&mut a)?;
        Ok(Self {
            grid,
            amplitudes: TensorAmplitudes::ThreeMode { a, photon2 },
        })
    }

    pub fn from_ghz_amplitudes(grid: ModeGrid, mut b: Vec<C64>) -> Result<Self> {
        let n = grid.n_bins();
        if b.len() != n {
            return Err(Error::InvalidArgument(format!(
                "expected {n} amplitudes, got {}",
                b.len()
            )));
        }
        let photon2: Vec<Option<usize>> = (0..n)
            .map(|i| grid.nearest_bin(-2.0 * grid.center(i)))
            .collect();
        for (z, bin) in b.iter_mut().zip(&photon2) {
            if bin.is_none() {
                *z = C64::new(0.0, 0.0);
            }
        }
        normalize(&mut b)?;
        Ok(Self {
            grid,
            amplitudes: TensorAmplitudes::Degenerate { b, photon2 },
        })
    }

    pub fn grid(&self) -> &ModeGrid {
        &self.grid
    }

    pub fn amplitudes(&self) -> &TensorAmplitudes {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        let v = match &self.amplitudes {
            TensorAmplitudes::ThreeMode { a, .. } => a,
            TensorAmplitudes::Degenerate { b, .. } => b,
        };
        v.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Multiplies every amplitude by `e^{i phase}`.
    pub fn with_global_phase(&self, phase: f64) -> Self {
        let u = C64::from_polar(1.0, phase);
        let mut out = self.clone();
        match &mut out.amplitudes {
            TensorAmplitudes::ThreeMode { a, .. } => a.iter_mut().for_each(|z| *z *= u),
            TensorAmplitudes::Degenerate { b, .. } => b.iter_mut().for_each(|z| *z *= u),
        }
        out
    }
}

fn normalize(v: &mut [C64]) -> Result<()> {
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if !(norm > 0.0 && norm.is_finite()) {
        return Err(Error::DegenerateInput(
            "all mode amplitudes vanish on this grid".into(),
        ));
    }
    v.iter_mut().for_each(|z| *z /= norm);
    Ok(())
}

/// `A[i,k] ~ f1(nu1_i) f2(nu2) f3(nu3_k) Phi(x(nu1_i, nu3_k))` with
/// `nu2 = -nu1_i - nu3_k`.
pub fn build_w_discrete(
    cfg: &PhaseMatchConfig,
    filters: [&FilterSpec; 3],
    grid: &ModeGrid,
) -> Result<TriphotonTensor> {
    let [f1, f2, f3] = filters;
    let n = grid.n_bins();
    let a = (0..n * n)
        .map(|idx| {
            let nu1 = grid.center(idx / n);
            let nu3 = grid.center(idx % n);
            let amp = f1.eval(nu1) * f2.eval(-nu1 - nu3) * f3.eval(nu3);
            phi_value(detuning_w(nu1, nu3, cfg)) * amp
        })
        .collect();
    TriphotonTensor::from_w_amplitudes(*grid, a)
}

/// `B[i] ~ f1(nu1_i)^2 f2(-2 nu1_i) Phi(-2 nu1_i t12)`.
pub fn build_ghz_discrete(
    cfg: &PhaseMatchConfig,
    filters: [&FilterSpec; 2],
    grid: &ModeGrid,
) -> Result<TriphotonTensor> {
    let [f1, f2] = filters;
    let b = (0..grid.n_bins())
        .map(|i| {
            let nu1 = grid.center(i);
            let f = f1.eval(nu1);
            phi_value(detuning_ghz(nu1, cfg)) * (f * f * f2.eval(-2.0 * nu1))
        })
        .collect();
    TriphotonTensor::from_ghz_amplitudes(*grid, b)
}

/// Traces out photon 3 of the three-mode state:
/// `rho_12 = sum_k |chi_k><chi_k|`, `|chi_k> = sum_i A[i,k] |i>_1 |j(i,k)>_2`.
pub fn reduce_w_trace3(state: &TriphotonTensor) -> Result<DensityMatrix> {
    let TensorAmplitudes::ThreeMode { a, photon2 } = &state.amplitudes else {
        return Err(Error::InvalidArgument(
            "reduce_w_trace3 needs a three-mode state".into(),
        ));
    };
    let n = state.grid.n_bins();
    let dim = n * n;
    let mut rho = DMatrix::<C64>::zeros(dim, dim);
    let mut chi: Vec<(usize, C64)> = Vec::with_capacity(n);
    for k in 0..n {
        chi.clear();
        chi.extend((0..n).filter_map(|i| {
            let idx = i * n + k;
            photon2[idx].map(|j| (i * n + j, a[idx]))
        }));
        for &(r, zr) in &chi {
            for &(c, zc) in &chi {
                rho[(r, c)] += zr * zc.conj();
            }
        }
    }
    DensityMatrix::new(rho, vec![n, n])
}

/// Traces out one of the degenerate photons. Measuring the remaining
/// degenerate photon fixes bin i, so the pair is left in the diagonal mixture
/// `sum_i |B[i]|^2 |i, m(i)><i, m(i)|`.
pub fn reduce_ghz_trace_one_degenerate(state: &TriphotonTensor) -> Result<DensityMatrix> {
    let TensorAmplitudes::Degenerate { b, photon2 } = &state.amplitudes else {
        return Err(Error::InvalidArgument(
            "reduce_ghz_trace_one_degenerate needs a degenerate two-mode state".into(),
        ));
    };
    let n = state.grid.n_bins();
    let mut rho = DMatrix::<C64>::zeros(n * n, n * n);
    for (i, (z, bin)) in b.iter().zip(photon2).enumerate() {
        if let Some(m) = bin {
            let idx = i * n + m;
            rho[(idx, idx)] += C64::new(z.norm_sqr(), 0.0);
        }
    }
    DensityMatrix::new(rho, vec![n, n])
}

pub fn purity(rho: &DensityMatrix) -> f64 {
    rho.purity()
}
