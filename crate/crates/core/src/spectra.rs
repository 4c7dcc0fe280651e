//! Spectral building blocks: the longitudinal phase-matching function, the
//! detuning maps of the two triphoton states, detection filters and the
//! transverse-mode window.
//!
//! Units: time in ps, angular frequency in rad/ps, transverse wavevector in
//! rad/um.

use crate::{Error, Result, C64};

/// Below this |x| the phase-matching function is evaluated from its Taylor
/// series instead of `(1 - e^{-ix}) / (ix)`.
const PHI_SERIES_CUTOFF: f64 = 1e-6;

/// Source geometry as the two group-delay mismatches `t12 = L/D12` and
/// `t32 = L/D32`, in ps. Both carry sign.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseMatchConfig {
    t12: f64,
    t32: f64,
}

impl PhaseMatchConfig {
    pub fn new(t12: f64, t32: f64) -> Result<Self> {
        for (name, t) in [("t12", t12), ("t32", t32)] {
            if !t.is_finite() || t == 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "{name} must be finite and nonzero, got {t}"
                )));
            }
        }
        Ok(Self { t12, t32 })
    }

    pub fn t12(&self) -> f64 {
        self.t12
    }

    pub fn t32(&self) -> f64 {
        self.t32
    }

    /// Half-width in rad/ps of the narrowest main lobe of the phase-matching
    /// function, `2 pi / max(|t12|, |t32|)`.
    pub fn main_lobe_half_width(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.t12.abs().max(self.t32.abs())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FilterShape {
    Gaussian,
    Rectangular,
}

/// Real amplitude filter peaked at `center_offset` (rad/ps from the central
/// frequency of its arm) with bandwidth parameter `sigma` (rad/ps).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FilterSpec {
    shape: FilterShape,
    sigma: f64,
    center_offset: f64,
}

impl FilterSpec {
    pub fn new(shape: FilterShape, sigma: f64, center_offset: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "filter sigma must be positive and finite, got {sigma}"
            )));
        }
        if !center_offset.is_finite() {
            return Err(Error::InvalidArgument(
                "filter center offset must be finite".into(),
            ));
        }
        Ok(Self {
            shape,
            sigma,
            center_offset,
        })
    }

    pub fn gaussian(sigma: f64) -> Result<Self> {
        Self::new(FilterShape::Gaussian, sigma, 0.0)
    }

    pub fn rectangular(sigma: f64) -> Result<Self> {
        Self::new(FilterShape::Rectangular, sigma, 0.0)
    }

    pub fn shape(&self) -> FilterShape {
        self.shape
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn center_offset(&self) -> f64 {
        self.center_offset
    }

    pub fn with_sigma(&self, sigma: f64) -> Result<Self> {
        Self::new(self.shape, sigma, self.center_offset)
    }

    pub fn eval(&self, nu: f64) -> f64 {
        let d = nu - self.center_offset;
        match self.shape {
            FilterShape::Gaussian => (-(d * d) / (2.0 * self.sigma * self.sigma)).exp(),
            FilterShape::Rectangular => {
                if d.abs() <= self.sigma {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}

/// Gaussian amplitude window `exp(-alpha^2 / alpha_max^2)` on each transverse
/// wavevector axis. `dims` is 1 or 2; two dimensions are treated as a
/// separable product.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransverseWindow {
    alpha_max: f64,
    dims: u8,
}

impl TransverseWindow {
    pub fn new(alpha_max: f64, dims: u8) -> Result<Self> {
        if !(alpha_max > 0.0 && alpha_max.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "alpha_max must be positive and finite, got {alpha_max}"
            )));
        }
        if !(1..=2).contains(&dims) {
            return Err(Error::InvalidArgument(format!(
                "transverse dims must be 1 or 2, got {dims}"
            )));
        }
        Ok(Self { alpha_max, dims })
    }

    pub fn alpha_max(&self) -> f64 {
        self.alpha_max
    }

    pub fn dims(&self) -> u8 {
        self.dims
    }

    pub fn eval(&self, alpha: f64) -> f64 {
        let r = alpha / self.alpha_max;
        (-r * r).exp()
    }
}

/// Longitudinal detuning function `(1 - e^{-ix}) / (ix)`, equal to
/// `sinc(x/2) e^{-ix/2}` and to 1 at the origin.
pub fn phi(x: f64) -> Result<C64> {
    if !x.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "phi argument must be finite, got {x}"
        )));
    }
    Ok(phi_value(x))
}

pub(crate) fn phi_value(x: f64) -> C64 {
    if x.abs() < PHI_SERIES_CUTOFF {
        let x2 = x * x;
        C64::new(1.0 - x2 / 6.0, -x / 2.0 + x * x2 / 24.0)
    } else {
        let h = 0.5 * x;
        let sinc = h.sin() / h;
        C64::new(sinc * h.cos(), -sinc * h.sin())
    }
}

/// Phase mismatch of the three-mode state, `x = -nu1 t12 - nu3 t32`, after
/// eliminating `nu2` with energy conservation.
pub fn detuning_w(nu1: f64, nu3: f64, cfg: &PhaseMatchConfig) -> f64 {
    -nu1 * cfg.t12 - nu3 * cfg.t32
}

/// Phase mismatch of the degenerate two-mode state, `x = -2 nu1 t12`.
pub fn detuning_ghz(nu1: f64, cfg: &PhaseMatchConfig) -> f64 {
    -2.0 * nu1 * cfg.t12
}

pub fn filter_eval(f: &FilterSpec, nu: f64) -> f64 {
    f.eval(nu)
}
