//! Temporal and spatial second- and third-order correlation functions of the
//! three-mode (`|1,1,1>`) and degenerate two-mode (`|1,2>`) triphoton states.
//!
//! Every correlator is a squared magnitude (or an integral of one) of a
//! Fourier integral over detuning frequencies. The frequency integrals are
//! discretized with the trapezoidal rule on a uniform symmetric grid and the
//! Fourier sums are evaluated either with a chirp-z transform
//! ([`Engine::Fft`]) or term by term ([`Engine::Direct`]). Both engines
//! compute the same discrete sum, so they agree to round-off.
//!
//! Delay convention: the Fourier kernel is `exp(+i nu tau)`. With negative
//! group-delay mismatches the phase-matching support then lies at
//! `0 <= tau_ij <= |t_ij|`, which is the physically allowed region.

use rayon::prelude::*;

use crate::czt::ChirpZ;
use crate::spectra::{
    detuning_ghz, detuning_w, phi_value, FilterShape, FilterSpec, PhaseMatchConfig,
    TransverseWindow,
};
use crate::{Error, Result, C64};

/// Tolerance on the peak of a normalized surface.
const NORMALIZED_TOL: f64 = 1e-12;
/// Number of filter widths the integration span must cover.
const SPAN_FILTER_WIDTHS: f64 = 6.0;
/// Number of phase-matching main-lobe half-widths the span must cover.
const SPAN_LOBE_WIDTHS: f64 = 6.0;
/// Transverse integration half-range in units of `alpha_max`.
const ALPHA_SPAN_WIDTHS: f64 = 8.0;
const MIN_ALPHA_PANELS: usize = 256;

/// Uniform 1-D sampling grid: `start + i * step` for `i < count`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid1D {
    start: f64,
    step: f64,
    count: usize,
}

impl Grid1D {
    pub fn new(start: f64, step: f64, count: usize) -> Result<Self> {
        if !start.is_finite() || !(step > 0.0 && step.is_finite()) || count < 2 {
            return Err(Error::InvalidArgument(format!(
                "grid needs finite start, positive step and count >= 2 \
                 (start {start}, step {step}, count {count})"
            )));
        }
        Ok(Self { start, step, count })
    }

    /// Grid from `start` to `stop` inclusive with the given step; `stop` is
    /// rounded to the nearest whole number of steps.
    pub fn spanning(start: f64, stop: f64, step: f64) -> Result<Self> {
        let n = ((stop - start) / step).round();
        if !(n >= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "empty grid from {start} to {stop} step {step}"
            )));
        }
        Self::new(start, step, n as usize + 1)
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn last(&self) -> f64 {
        self.value(self.count - 1)
    }

    pub fn value(&self, i: usize) -> f64 {
        self.start + i as f64 * self.step
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.count).map(|i| self.value(i)).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CorrelationKind {
    G2Temporal,
    G3Temporal,
    G2Spatial,
    G3Spatial,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StateKind {
    W111,
    Ghz12,
}

/// Sampled nonnegative correlation values over one or two axes. Two-axis
/// surfaces are stored row-major with the first axis outermost.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationSurface {
    axes: Vec<Grid1D>,
    values: Vec<f64>,
    normalized: bool,
    kind: CorrelationKind,
    state: StateKind,
}

impl CorrelationSurface {
    pub fn new(
        axes: Vec<Grid1D>,
        values: Vec<f64>,
        kind: CorrelationKind,
        state: StateKind,
    ) -> Result<Self> {
        if axes.is_empty() || axes.len() > 2 {
            return Err(Error::InvalidArgument(
                "surface must have one or two axes".into(),
            ));
        }
        let expect: usize = axes.iter().map(Grid1D::count).product();
        if values.len() != expect {
            return Err(Error::InvalidArgument(format!(
                "surface has {} values for {expect} grid points",
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !(**v >= 0.0) || !v.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "surface values must be finite and nonnegative, found {v}"
            )));
        }
        Ok(Self {
            axes,
            values,
            normalized: false,
            kind,
            state,
        })
    }

    pub fn axes(&self) -> &[Grid1D] {
        &self.axes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn kind(&self) -> CorrelationKind {
        self.kind
    }

    pub fn state(&self) -> StateKind {
        self.state
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Value at grid indices `(i, j)`; `j` is ignored for 1-D surfaces.
    pub fn at(&self, i: usize, j: usize) -> f64 {
        match self.axes.len() {
            1 => self.values[i],
            _ => self.values[i * self.axes[1].count() + j],
        }
    }

    /// Axis coordinates of the largest value (first occurrence).
    pub fn peak_location(&self) -> Vec<f64> {
        let idx = self
            .values
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (i, &v)| {
                if v > best.1 {
                    (i, v)
                } else {
                    best
                }
            })
            .0;
        match self.axes.len() {
            1 => vec![self.axes[0].value(idx)],
            _ => {
                let n1 = self.axes[1].count();
                vec![self.axes[0].value(idx / n1), self.axes[1].value(idx % n1)]
            }
        }
    }
}

/// Divides all values by the maximum so the peak is exactly one.
pub fn normalize_to_peak(surface: &CorrelationSurface) -> Result<CorrelationSurface> {
    let max = surface.max();
    if !(max > 0.0) {
        return Err(Error::DegenerateInput(
            "cannot normalize an all-zero surface".into(),
        ));
    }
    let mut out = surface.clone();
    if !(surface.normalized && (max - 1.0).abs() <= NORMALIZED_TOL) {
        out.values.iter_mut().for_each(|v| *v /= max);
    }
    out.normalized = true;
    Ok(out)
}

/// Full width at half maximum of a normalized 1-D curve, with linear
/// interpolation between samples.
///
/// The curve must rise above one half exactly once: it has to start and end
/// below the half-maximum level with a single connected region in between.
pub fn fwhm(curve: &CorrelationSurface) -> Result<f64> {
    if curve.axes.len() != 1 {
        return Err(Error::InvalidArgument("fwhm needs a 1-D curve".into()));
    }
    if !curve.normalized {
        return Err(Error::InvalidArgument(
            "fwhm needs a peak-normalized curve".into(),
        ));
    }
    let grid = curve.axes[0];
    let v = &curve.values;
    let crossings: Vec<f64> = v
        .windows(2)
        .enumerate()
        .filter(|(_, w)| (w[0] >= 0.5) != (w[1] >= 0.5))
        .map(|(i, w)| grid.value(i) + grid.step() * (0.5 - w[0]) / (w[1] - w[0]))
        .collect();
    let starts_low = v[0] < 0.5 && v[v.len() - 1] < 0.5;
    if crossings.len() != 2 || !starts_low {
        return Err(Error::AmbiguousWidth { crossings });
    }
    Ok(crossings[1] - crossings[0])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Engine {
    /// Chirp-z transform of the sampled integrand.
    #[default]
    Fft,
    /// Explicit sum over quadrature nodes for every output point.
    Direct,
}

/// Trapezoidal discretization of the detuning axes: `n_points` panels on
/// `[-nu_span, nu_span]`, i.e. `n_points + 1` nodes including zero.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureSpec {
    n_points: usize,
    nu_span: f64,
}

impl QuadratureSpec {
    pub fn new(n_points: usize, nu_span: f64) -> Result<Self> {
        if n_points < 2 || !n_points.is_power_of_two() {
            return Err(Error::Configuration(format!(
                "quadrature n_points must be a power of two >= 2, got {n_points}"
            )));
        }
        if !(nu_span > 0.0 && nu_span.is_finite()) {
            return Err(Error::Configuration(format!(
                "quadrature nu_span must be positive, got {nu_span}"
            )));
        }
        Ok(Self { n_points, nu_span })
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn nu_span(&self) -> f64 {
        self.nu_span
    }

    pub fn with_n_points(&self, n_points: usize) -> Result<Self> {
        Self::new(n_points, self.nu_span)
    }

    pub fn step(&self) -> f64 {
        2.0 * self.nu_span / self.n_points as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        let h = self.step();
        (0..=self.n_points)
            .map(|k| -self.nu_span + k as f64 * h)
            .collect()
    }

    pub fn weights(&self) -> Vec<f64> {
        trapezoid_weights(self.n_points + 1, self.step())
    }

    /// Checks that the span resolves the phase-matching main lobe and the
    /// filters. Gaussian filters need `SPAN_FILTER_WIDTHS` standard
    /// deviations; rectangular filters need their support inside the span.
    pub fn check_coverage(&self, cfg: &PhaseMatchConfig, filters: &[FilterSpec]) -> Result<()> {
        let lobe = SPAN_LOBE_WIDTHS * cfg.main_lobe_half_width();
        if self.nu_span < lobe {
            return Err(Error::Configuration(format!(
                "nu_span {} rad/ps does not cover {SPAN_LOBE_WIDTHS} phase-matching \
                 half-widths ({lobe} rad/ps)",
                self.nu_span
            )));
        }
        for f in filters {
            let need = match f.shape() {
                FilterShape::Gaussian => SPAN_FILTER_WIDTHS * f.sigma(),
                FilterShape::Rectangular => f.sigma(),
            };
            if self.nu_span + 1e-12 < need {
                return Err(Error::Configuration(format!(
                    "nu_span {} rad/ps does not cover the {:?} filter of width {} ({need} rad/ps needed)",
                    self.nu_span,
                    f.shape(),
                    f.sigma()
                )));
            }
        }
        Ok(())
    }
    /// Smallest span passing [`Self::check_coverage`].
    pub fn required_span(cfg: &PhaseMatchConfig, filters: &[FilterSpec]) -> f64 {
        filters
            .iter()
            .map(|f| match f.shape() {
                FilterShape::Gaussian => SPAN_FILTER_WIDTHS * f.sigma(),
                FilterShape::Rectangular => f.sigma(),
            })
            .fold(SPAN_LOBE_WIDTHS * cfg.main_lobe_half_width(), f64::max)
    }

    /// Widens the span when it fails the coverage check, doubling `n_points`
    /// so the node spacing never grows.
    pub fn fitted(&self, cfg: &PhaseMatchConfig, filters: &[FilterSpec]) -> Result<Self> {
        let need = Self::required_span(cfg, filters);
        if self.nu_span >= need {
            return Ok(*self);
        }
        let mut n = self.n_points;
        let mut span = self.nu_span;
        while span < need {
            n *= 2;
            span *= 2.0;
        }
        Self::new(n, span)
    }
}

fn trapezoid_weights(n: usize, h: f64) -> Vec<f64> {
    let mut w = vec![h; n];
    w[0] = 0.5 * h;
    w[n - 1] = 0.5 * h;
    w
}

/// `out[m] = sum_k a[k] exp(i nu[k] tau[m])` for a uniform `nu` starting at
/// `nu0` with step `h`, and tau on `grid` scaled by `delay_scale`.
fn fourier_sum(
    a: &[C64],
    nu0: f64,
    h: f64,
    grid: &Grid1D,
    delay_scale: f64,
    engine: Engine,
) -> Vec<C64> {
    match engine {
        Engine::Fft => ChirpZ::new(
            a.len(),
            nu0,
            h,
            grid.count(),
            delay_scale * grid.start(),
            delay_scale * grid.step(),
        )
        .apply(a),
        Engine::Direct => grid
            .points()
            .into_iter()
            .map(|tau| direct_sum(a, nu0, h, delay_scale * tau))
            .collect(),
    }
}

fn direct_sum(a: &[C64], nu0: f64, h: f64, tau: f64) -> C64 {
    a.iter()
        .enumerate()
        .map(|(k, ak)| ak * C64::from_polar(1.0, (nu0 + k as f64 * h) * tau))
        .sum()
}

/// Same as [`fourier_sum`] but with a reusable plan, for many rows.
struct RowTransform {
    plan: Option<ChirpZ>,
    nu0: f64,
    h: f64,
    grid: Grid1D,
}

impl RowTransform {
    fn new(len: usize, nu0: f64, h: f64, grid: Grid1D, engine: Engine) -> Self {
        let plan = match engine {
            Engine::Fft => Some(ChirpZ::new(
                len,
                nu0,
                h,
                grid.count(),
                grid.start(),
                grid.step(),
            )),
            Engine::Direct => None,
        };
        Self { plan, nu0, h, grid }
    }

    fn apply(&self, a: &[C64]) -> Vec<C64> {
        match &self.plan {
            Some(p) => p.apply(a),
            None => self
                .grid
                .points()
                .into_iter()
                .map(|tau| direct_sum(a, self.nu0, self.h, tau))
                .collect(),
        }
    }
}

fn filters_check(
    quad: &QuadratureSpec,
    cfg: &PhaseMatchConfig,
    filters: &[FilterSpec],
) -> Result<()> {
    quad.check_coverage(cfg, filters)
}

/// Weighted three-mode joint amplitude `w1 w3 f1(nu1) f2(nu1+nu3) f3(nu3) Phi`
/// on the quadrature grid, row-major over `(nu3, nu1)`. `f3 = None` leaves
/// photon 3 unfiltered.
fn w_amplitude_rows(
    cfg: &PhaseMatchConfig,
    f1: &FilterSpec,
    f2: &FilterSpec,
    f3: Option<&FilterSpec>,
    quad: &QuadratureSpec,
) -> Vec<Vec<C64>> {
    let nu = quad.nodes();
    let w = quad.weights();
    nu.iter()
        .zip(&w)
        .map(|(&nu3, &w3)| {
            let g3 = f3.map_or(1.0, |f| f.eval(nu3));
            nu.iter()
                .zip(&w)
                .map(|(&nu1, &w1)| {
                    let amp = f1.eval(nu1) * f2.eval(nu1 + nu3) * g3;
                    phi_value(detuning_w(nu1, nu3, cfg)) * (w1 * w3 * amp)
                })
                .collect()
        })
        .collect()
}

fn normalized(
    axes: Vec<Grid1D>,
    values: Vec<f64>,
    kind: CorrelationKind,
    state: StateKind,
) -> Result<CorrelationSurface> {
    normalize_to_peak(&CorrelationSurface::new(axes, values, kind, state)?)
}

/// Second-order temporal correlation of the three-mode state with photon 3
/// undetected: `int dnu3 | int dnu1 f1(nu1) f2(nu1+nu3) Phi e^{i nu1 tau12} |^2`.
pub fn g2_w_temporal(
    cfg: &PhaseMatchConfig,
    f1: &FilterSpec,
    f2: &FilterSpec,
    quad: &QuadratureSpec,
    grid: &Grid1D,
    engine: Engine,
) -> Result<CorrelationSurface> {
    filters_check(quad, cfg, &[*f1, *f2])?;
    let rows = w_amplitude_rows(cfg, f1, f2, None, quad);
    let nu0 = -quad.nu_span();
    let h = quad.step();
    let transform = RowTransform::new(rows[0].len(), nu0, h, *grid, engine);
    // Rows carry the outer weight w3 in every element; |w3 a|^2 / w3 restores
    // a single factor of w3.
    let weights = quad.weights();
    let slices: Vec<Vec<f64>> = rows
        .par_iter()
        .zip(weights.par_iter())
        .map(|(row, &w3)| {
            transform
                .apply(row)
                .into_iter()
                .map(|z| z.norm_sqr() / w3)
                .collect()
        })
        .collect();
    let mut values = vec![0.0; grid.count()];
    for slice in &slices {
        for (acc, v) in values.iter_mut().zip(slice) {
            *acc += v;
        }
    }
    normalized(
        vec![*grid],
        values,
        CorrelationKind::G2Temporal,
        StateKind::W111,
    )
}

/// Third-order temporal correlation of the three-mode state over
/// `(tau12, tau32)`.
pub fn g3_w_temporal(
    cfg: &PhaseMatchConfig,
    filters: [&FilterSpec; 3],
    quad: &QuadratureSpec,
    tau12: &Grid1D,
    tau32: &Grid1D,
    engine: Engine,
) -> Result<CorrelationSurface> {
    let [f1, f2, f3] = filters;
    filters_check(quad, cfg, &[*f1, *f2, *f3])?;
    let rows = w_amplitude_rows(cfg, f1, f2, Some(f3), quad);
    let nu0 = -quad.nu_span();
    let h = quad.step();
    let n = rows.len();

    // Transform along nu1 for every nu3 row: partial[k3][m1].
    let along_nu1 = RowTransform::new(n, nu0, h, *tau12, engine);
    let partial: Vec<Vec<C64>> = rows.par_iter().map(|r| along_nu1.apply(r)).collect();

    // Then along nu3 for every tau12 column.
    let along_nu3 = RowTransform::new(n, nu0, h, *tau32, engine);
    let columns: Vec<Vec<f64>> = (0..tau12.count())
        .into_par_iter()
        .map(|m1| {
            let col: Vec<C64> = partial.iter().map(|row| row[m1]).collect();
            along_nu3
                .apply(&col)
                .into_iter()
                .map(|z| z.norm_sqr())
                .collect()
        })
        .collect();
    let values = columns.into_iter().flatten().collect();
    normalized(
        vec![*tau12, *tau32],
        values,
        CorrelationKind::G3Temporal,
        StateKind::W111,
    )
}

/// Third-order correlation of the three-mode state along the line
/// `tau32 = -tau12 + |t12|`, evaluated exactly at every point of `grid`.
///
/// On the line the phase is `nu1 tau12 + nu3 (|t12| - tau12)`, so the double
/// sum collapses onto the diagonals `k1 - k3 = d` of the quadrature grid and
/// becomes a single Fourier sum over `d`.
pub fn g3_w_conditional(
    cfg: &PhaseMatchConfig,
    filters: [&FilterSpec; 3],
    quad: &QuadratureSpec,
    grid: &Grid1D,
    engine: Engine,
) -> Result<CorrelationSurface> {
    let [f1, f2, f3] = filters;
    filters_check(quad, cfg, &[*f1, *f2, *f3])?;
    let offset = cfg.t12().abs();
    let rows = w_amplitude_rows(cfg, f1, f2, Some(f3), quad);
    let nu = quad.nodes();
    let values: Vec<f64> = match engine {
        Engine::Direct => grid
            .points()
            .par_iter()
            .map(|&tau| {
                let tau32 = -tau + offset;
                let mut acc = C64::new(0.0, 0.0);
                for (row, &nu3) in rows.iter().zip(&nu) {
                    for (a, &nu1) in row.iter().zip(&nu) {
                        acc += a * C64::from_polar(1.0, nu1 * tau + nu3 * tau32);
                    }
                }
                acc.norm_sqr()
            })
            .collect(),
        Engine::Fft => {
            let n = nu.len();
            let h = quad.step();
            // c[d + n - 1] = sum_{k1 - k3 = d} a[k3][k1] exp(i nu3 |t12|)
            let mut diag = vec![C64::new(0.0, 0.0); 2 * n - 1];
            for (k3, (row, &nu3)) in rows.iter().zip(&nu).enumerate() {
                let shift = C64::from_polar(1.0, nu3 * offset);
                for (k1, a) in row.iter().enumerate() {
                    diag[k1 + n - 1 - k3] += a * shift;
                }
            }
            // (nu1 - nu3) = d h with d from -(n-1) to n-1
            fourier_sum(&diag, -((n - 1) as f64) * h, h, grid, 1.0, Engine::Fft)
                .into_iter()
                .map(|z| z.norm_sqr())
                .collect()
        }
    };
    normalized(
        vec![*grid],
        values,
        CorrelationKind::G3Temporal,
        StateKind::W111,
    )
}

fn ghz_scalar_integrand(cfg: &PhaseMatchConfig, f1: &FilterSpec, f2: &FilterSpec, nu: f64) -> f64 {
    (f1.eval(nu) * f2.eval(nu)).powi(2) * phi_value(detuning_ghz(nu, cfg)).norm_sqr()
}

/// Second-order temporal correlation of the two-mode state with one of the
/// degenerate photons undetected:
/// `int dnu1 |f1(nu1) f2(nu1) Phi(-2 nu1 t12)|^2`. It carries no delay
/// dependence.
pub fn g2_ghz_temporal(
    cfg: &PhaseMatchConfig,
    f1: &FilterSpec,
    f2: &FilterSpec,
    quad: &QuadratureSpec,
) -> Result<f64> {
    filters_check(quad, cfg, &[*f1, *f2])?;
    let value: f64 = quad
        .nodes()
        .iter()
        .zip(quad.weights())
        .map(|(&nu, w)| w * ghz_scalar_integrand(cfg, f1, f2, nu))
        .sum();
    if !(value > 0.0) {
        return Err(Error::DegenerateInput(
            "G2 of the two-mode state vanishes".into(),
        ));
    }
    Ok(value)
}

/// [`g2_ghz_temporal`] evaluated independently at every point of a delay
/// grid, for presentation next to the delay-dependent correlators.
pub fn g2_ghz_temporal_curve(
    cfg: &PhaseMatchConfig,
    f1: &FilterSpec,
    f2: &FilterSpec,
    quad: &QuadratureSpec,
    grid: &Grid1D,
) -> Result<CorrelationSurface> {
    let values = grid
        .points()
        .iter()
        // The integrand is independent of tau; every point repeats the integral.
        .map(|_| g2_ghz_temporal(cfg, f1, f2, quad))
        .collect::<Result<Vec<f64>>>()?;
    normalized(
        vec![*grid],
        values,
        CorrelationKind::G2Temporal,
        StateKind::Ghz12,
    )
}

/// Unnormalized third-order temporal correlation of the two-mode state,
/// `|int dnu1 f1^2(nu1) f2(nu1) Phi(-2 nu1 t12) e^{2 i nu1 tau12}|^2`.
pub fn g3_ghz_temporal_unnormalized(
    cfg: &PhaseMatchConfig,
    f1: &FilterSpec,
    f2: &FilterSpec,
    quad: &QuadratureSpec,
    grid: &Grid1D,
    engine: Engine,
) -> Result<CorrelationSurface> {
    filters_check(quad, cfg, &[*f1, *f2])?;
    let a: Vec<C64> = quad
        .nodes()
        .iter()
        .zip(quad.weights())
        .map(|(&nu, w)| {
            let f = f1.eval(nu);
            phi_value(detuning_ghz(nu, cfg)) * (w * f * f * f2.eval(nu))
        })
        .collect();
    let values = fourier_sum(&a, -quad.nu_span(), quad.step(), grid, 2.0, engine)
        .into_iter()
        .map(|z| z.norm_sqr())
        .collect();
    CorrelationSurface::new(
        vec![*grid],
        values,
        CorrelationKind::G3Temporal,
        StateKind::Ghz12,
    )
}

pub fn g3_ghz_temporal(
    cfg: &PhaseMatchConfig,
    f1: &FilterSpec,
    f2: &FilterSpec,
    quad: &QuadratureSpec,
    grid: &Grid1D,
    engine: Engine,
) -> Result<CorrelationSurface> {
    normalize_to_peak(&g3_ghz_temporal_unnormalized(
        cfg, f1, f2, quad, grid, engine,
    )?)
}

/// Trapezoidal grid over the transverse wavevector, fine enough that the
/// discrete transform does not alias within `max_displacement * scale`.
struct AlphaQuadrature {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    start: f64,
    step: f64,
}

impl AlphaQuadrature {
    fn new(window: &TransverseWindow, max_displacement: f64, scale: f64) -> Self {
        let span = ALPHA_SPAN_WIDTHS * window.alpha_max();
        // alias period 2 pi / (scale h) must exceed four times the extent
        let reach = 4.0 * 2.0 * scale * max_displacement.max(1.0 / window.alpha_max());
        let min_panels = (2.0 * span * reach / (2.0 * std::f64::consts::PI)).ceil() as usize;
        let panels = min_panels.max(MIN_ALPHA_PANELS).next_power_of_two();
        let step = 2.0 * span / panels as f64;
        let nodes = (0..=panels).map(|k| -span + k as f64 * step).collect();
        Self {
            nodes,
            weights: trapezoid_weights(panels + 1, step),
            start: -span,
            step,
        }
    }

    fn windowed(&self, window: &TransverseWindow, power: i32) -> Vec<C64> {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&a, &w)| C64::new(w * window.eval(a).powi(power), 0.0))
            .collect()
    }
}

fn max_abs(grid: &Grid1D) -> f64 {
    grid.start().abs().max(grid.last().abs())
}

/// `int dalpha W(alpha) e^{i scale alpha rho}` on `grid`, plus the same
/// integral at `rho = 0` for the idle transverse axis of 2-D windows.
fn single_window(
    window: &TransverseWindow,
    grid: &Grid1D,
    scale: f64,
    engine: Engine,
) -> (Vec<C64>, f64) {
    let q = AlphaQuadrature::new(window, max_abs(grid), scale);
    let a = q.windowed(window, 1);
    let at_origin: f64 = a.iter().map(|z| z.re).sum();
    (
        fourier_sum(&a, q.start, q.step, grid, scale, engine),
        at_origin,
    )
}

fn idle_axis_factor(window: &TransverseWindow, per_axis_at_origin: f64) -> f64 {
    per_axis_at_origin.powi(i32::from(window.dims()) - 1)
}

/// `|int dalpha W(alpha) e^{i alpha rho}|^2`: the transverse point-spread of
/// a single windowed mode, used as the width reference for the spatial
/// correlators.
pub fn single_window_reference(
    window: &TransverseWindow,
    grid: &Grid1D,
    engine: Engine,
) -> Result<CorrelationSurface> {
    let (amp, origin) = single_window(window, grid, 1.0, engine);
    let idle = idle_axis_factor(window, origin).powi(2);
    let values = amp.iter().map(|z| z.norm_sqr() * idle).collect();
    normalized(
        vec![*grid],
        values,
        CorrelationKind::G2Spatial,
        StateKind::W111,
    )
}

/// `int dalpha3 W^2(alpha3) |int dalpha1 W(alpha1) e^{i alpha1 rho12}|^2`.
pub fn g2_w_spatial(
    window: &TransverseWindow,
    grid: &Grid1D,
    engine: Engine,
) -> Result<CorrelationSurface> {
    let (amp, origin) = single_window(window, grid, 1.0, engine);
    let q = AlphaQuadrature::new(window, max_abs(grid), 1.0);
    let traced: f64 = q.windowed(window, 2).iter().map(|z| z.re).sum();
    let per_axis_traced = traced.powi(i32::from(window.dims()));
    let idle = idle_axis_factor(window, origin).powi(2);
    let values = amp
        .iter()
        .map(|z| per_axis_traced * z.norm_sqr() * idle)
        .collect();
    normalized(
        vec![*grid],
        values,
        CorrelationKind::G2Spatial,
        StateKind::W111,
    )
}

/// `|int dalpha1 dalpha3 W(alpha1) W(alpha3) e^{i alpha1 rho12} e^{i alpha3 rho32}|^2`.
/// The integrand factorizes, so the double integral is the product of two
/// single-window transforms.
pub fn g3_w_spatial(
    window: &TransverseWindow,
    rho12: &Grid1D,
    rho32: &Grid1D,
    engine: Engine,
) -> Result<CorrelationSurface> {
    let (a1, origin) = single_window(window, rho12, 1.0, engine);
    let (a3, _) = single_window(window, rho32, 1.0, engine);
    let idle = idle_axis_factor(window, origin).powi(4);
    let values = a1
        .iter()
        .flat_map(|x| a3.iter().map(move |y| (x * y).norm_sqr() * idle))
        .collect();
    normalized(
        vec![*rho12, *rho32],
        values,
        CorrelationKind::G3Spatial,
        StateKind::W111,
    )
}

/// `int dalpha1 W^2(alpha1)`, independent of the displacement.
pub fn g2_ghz_spatial(window: &TransverseWindow, grid: &Grid1D) -> Result<CorrelationSurface> {
    let q = AlphaQuadrature::new(window, max_abs(grid), 2.0);
    let per_axis: f64 = q.windowed(window, 2).iter().map(|z| z.re).sum();
    let value = per_axis.powi(i32::from(window.dims()));
    let values = grid.points().iter().map(|_| value).collect();
    normalized(
        vec![*grid],
        values,
        CorrelationKind::G2Spatial,
        StateKind::Ghz12,
    )
}

/// `|int dalpha1 W(alpha1) e^{2 i alpha1 rho12}|^2`: the degenerate pair
/// doubles the transverse phase and halves the correlation width.
pub fn g3_ghz_spatial(
    window: &TransverseWindow,
    grid: &Grid1D,
    engine: Engine,
) -> Result<CorrelationSurface> {
    let (amp, origin) = single_window(window, grid, 2.0, engine);
    let idle = idle_axis_factor(window, origin).powi(2);
    let values = amp.iter().map(|z| z.norm_sqr() * idle).collect();
    normalized(
        vec![*grid],
        values,
        CorrelationKind::G3Spatial,
        StateKind::Ghz12,
    )
}
