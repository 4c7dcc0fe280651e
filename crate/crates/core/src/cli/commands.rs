use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use clap::ValueEnum;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::correlators::{
    fwhm, g2_ghz_spatial, g2_ghz_temporal, g2_ghz_temporal_curve, g2_w_spatial, g2_w_temporal,
    g3_ghz_spatial, g3_ghz_temporal, g3_w_conditional, g3_w_spatial, g3_w_temporal,
    normalize_to_peak, single_window_reference, CorrelationKind, CorrelationSurface, Engine,
    Grid1D, QuadratureSpec, StateKind,
};
use crate::mode_space::{
    build_ghz_discrete, build_w_discrete, reduce_ghz_trace_one_degenerate, reduce_w_trace3,
    ModeGrid, TriphotonTensor,
};
use crate::qubit_toy::{
    self, basis_projector, fidelity, make_ghz, make_w, negativity, DensityMatrix,
};
use crate::spectra::{PhaseMatchConfig, TransverseWindow};

use super::config::{ExperimentConfig, OutputFormat};
use super::output::{
    ensure_dir, fmt_e12, kind_name, labels_for, pretty_json, state_name, surface_csv, surface_json,
    write_file,
};
use super::CliError;

/// Entanglement threshold on negativity and off-diagonal magnitudes.
const PROPERTY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Domain {
    Time,
    Space,
}

/// Machine-readable result of one command. Keys serialize in sorted order.
#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub command: String,
    pub files: Vec<String>,
    pub metrics: BTreeMap<String, f64>,
    pub flags: BTreeMap<String, bool>,
    pub wall_clock_ms: f64,
    pub config: Value,
}

impl RunSummary {
    fn new(command: &str, cfg: &ExperimentConfig) -> Self {
        Self {
            command: command.to_string(),
            files: Vec::new(),
            metrics: BTreeMap::new(),
            flags: BTreeMap::new(),
            wall_clock_ms: 0.0,
            config: cfg.to_json_value(),
        }
    }

    fn metric(&mut self, key: &str, value: Option<f64>) {
        if let Some(v) = value.filter(|v| v.is_finite()) {
            self.metrics.insert(key.to_string(), v);
        }
    }

    pub fn to_json(&self) -> String {
        pretty_json(&serde_json::to_value(self).expect("summary serializes"))
    }

    /// Summary file contents: everything except the timing, so reruns with
    /// the same configuration write identical bytes.
    fn file_json(&self) -> String {
        let mut v = serde_json::to_value(self).expect("summary serializes");
        if let Value::Object(map) = &mut v {
            map.remove("wall_clock_ms");
        }
        pretty_json(&v)
    }

    fn finish(mut self, out_dir: &Path, started: Instant) -> Result<Self, CliError> {
        let name = format!("{}_summary.json", self.command);
        self.files.push(name.clone());
        write_file(out_dir.join(name), &self.file_json())?;
        self.wall_clock_ms = started.elapsed().as_secs_f64() * 1e3;
        Ok(self)
    }
}

fn write_surface(
    cfg: &ExperimentConfig,
    out_dir: &Path,
    stem: &str,
    surface: &CorrelationSurface,
    physical_mask: bool,
    summary: &mut RunSummary,
) -> Result<(), CliError> {
    let labels = labels_for(surface, physical_mask);
    let (name, text) = match cfg.output_format {
        OutputFormat::Csv => (format!("{stem}.csv"), surface_csv(surface, &labels)),
        OutputFormat::Json => (
            format!("{stem}.json"),
            pretty_json(&surface_json(surface, &labels)),
        ),
    };
    write_file(out_dir.join(&name), &text)?;
    summary.files.push(name);
    Ok(())
}

fn fwhm_opt(surface: &CorrelationSurface) -> Option<f64> {
    fwhm(surface).ok()
}

fn peak(summary: &mut RunSummary, key: &str, surface: &CorrelationSurface) {
    for (axis, x) in surface.peak_location().into_iter().enumerate() {
        summary.metric(&format!("{key}_peak_axis{axis}"), Some(x));
    }
}

/// Third-order surface (a), conditional slice `tau32 = -tau12 + |t12|` (b)
/// and second-order curve (c) of the three-mode state.
pub fn cmd_figure1(
    cfg: &ExperimentConfig,
    out_dir: &Path,
    physical_mask: bool,
) -> Result<RunSummary, CliError> {
    let started = Instant::now();
    ensure_dir(out_dir)?;
    let mut summary = RunSummary::new("figure1", cfg);
    let pm = &cfg.phase_match;
    let f = cfg.filters3();
    let g = &cfg.grids;
    let engine = Engine::Fft;

    let q = &cfg.quadrature;
    let (a, (b, c)) = rayon::join(
        || g3_w_temporal(pm, f, q, &g.tau12, &g.tau32, engine),
        || {
            rayon::join(
                || g3_w_conditional(pm, f, q, &g.tau12, engine),
                || g2_w_temporal(pm, f[0], f[1], q, &g.tau12, engine),
            )
        },
    );
    let (a, b, c) = (a?, b?, c?);
    write_surface(cfg, out_dir, "fig1a", &a, physical_mask, &mut summary)?;
    write_surface(cfg, out_dir, "fig1b", &b, physical_mask, &mut summary)?;
    write_surface(cfg, out_dir, "fig1c", &c, physical_mask, &mut summary)?;

    peak(&mut summary, "fig1a", &a);
    peak(&mut summary, "fig1b", &b);
    peak(&mut summary, "fig1c", &c);
    let (wb, wc) = (fwhm_opt(&b), fwhm_opt(&c));
    summary.metric("fig1b_fwhm_ps", wb);
    summary.metric("fig1c_fwhm_ps", wc);
    if let (Some(wb), Some(wc)) = (wb, wc) {
        summary.metric("fwhm_ratio_b_over_c", Some(wb / wc));
        summary
            .flags
            .insert("conditional_narrower_than_g2".into(), wb < wc);
    }
    summary.finish(out_dir, started)
}

fn require_window(cfg: &ExperimentConfig) -> Result<TransverseWindow, CliError> {
    cfg.transverse.ok_or_else(|| {
        CliError::Usage("spatial correlations need a `transverse` section in the config".into())
    })
}

fn is_flat(surface: &CorrelationSurface) -> bool {
    let (lo, hi) = (surface.min(), surface.max());
    hi - lo <= 1e-12 * hi.abs().max(f64::MIN_POSITIVE)
}

/// One correlation function of one state on the configured grids.
pub fn cmd_correlate(
    cfg: &ExperimentConfig,
    state: StateKind,
    domain: Domain,
    order: u8,
    engine: Engine,
    out_dir: &Path,
    physical_mask: bool,
) -> Result<RunSummary, CliError> {
    if !(2..=3).contains(&order) {
        return Err(CliError::Usage(format!(
            "unsupported order {order}; valid combinations are --state w111|ghz12 \
             --domain time|space --order 2|3"
        )));
    }
    let started = Instant::now();
    ensure_dir(out_dir)?;
    let mut summary = RunSummary::new("correlate", cfg);
    let pm = &cfg.phase_match;
    let f = cfg.filters3();
    let q = &cfg.quadrature;
    let g = &cfg.grids;

    let surface = match (state, domain, order) {
        (StateKind::W111, Domain::Time, 2) => g2_w_temporal(pm, f[0], f[1], q, &g.tau12, engine)?,
        (StateKind::W111, Domain::Time, _) => g3_w_temporal(pm, f, q, &g.tau12, &g.tau32, engine)?,
        (StateKind::W111, Domain::Space, 2) => {
            g2_w_spatial(&require_window(cfg)?, &g.rho12, engine)?
        }
        (StateKind::W111, Domain::Space, _) => {
            g3_w_spatial(&require_window(cfg)?, &g.rho12, &g.rho32, engine)?
        }
        (StateKind::Ghz12, Domain::Time, 2) => {
            let value = g2_ghz_temporal(pm, f[0], f[1], q)?;
            summary.metric("g2_value", Some(value));
            g2_ghz_temporal_curve(pm, f[0], f[1], q, &g.tau12)?
        }
        (StateKind::Ghz12, Domain::Time, _) => {
            g3_ghz_temporal(pm, f[0], f[1], q, &g.tau12, engine)?
        }
        (StateKind::Ghz12, Domain::Space, 2) => g2_ghz_spatial(&require_window(cfg)?, &g.rho12)?,
        (StateKind::Ghz12, Domain::Space, _) => {
            let window = require_window(cfg)?;
            let s = g3_ghz_spatial(&window, &g.rho12, engine)?;
            let reference = single_window_reference(&window, &g.rho12, engine)?;
            let (w, wr) = (fwhm_opt(&s), fwhm_opt(&reference));
            summary.metric("reference_fwhm_um", wr);
            if let (Some(w), Some(wr)) = (w, wr) {
                summary.metric("fwhm_ratio_to_reference", Some(w / wr));
            }
            s
        }
    };

    if matches!(
        surface.kind(),
        CorrelationKind::G2Temporal | CorrelationKind::G2Spatial
    ) && state == StateKind::Ghz12
    {
        let key = match domain {
            Domain::Time => "delay_independent",
            Domain::Space => "displacement_independent",
        };
        summary.flags.insert(key.into(), is_flat(&surface));
    }
    if surface.axes().len() == 1 && surface.is_normalized() {
        let unit = match domain {
            Domain::Time => "ps",
            Domain::Space => "um",
        };
        summary.metric(&format!("fwhm_{unit}"), fwhm_opt(&surface));
    }
    peak(&mut summary, "surface", &surface);

    let domain_name = match domain {
        Domain::Time => "time",
        Domain::Space => "space",
    };
    let stem = format!("{}_g{order}_{domain_name}", state_name(state));
    summary
        .flags
        .insert(format!("kind_{}", kind_name(surface.kind())), true);
    write_surface(cfg, out_dir, &stem, &surface, physical_mask, &mut summary)?;
    summary.finish(out_dir, started)
}

fn require_mode_grid(cfg: &ExperimentConfig) -> Result<ModeGrid, CliError> {
    cfg.mode_grid.ok_or_else(|| {
        CliError::Usage("the modes command needs a `mode_grid` section in the config".into())
    })
}

fn mode_states(
    cfg: &ExperimentConfig,
    grid: &ModeGrid,
) -> Result<(TriphotonTensor, TriphotonTensor), CliError> {
    let f = cfg.filters3();
    let w = build_w_discrete(&cfg.phase_match, f, grid)?;
    let ghz = build_ghz_discrete(&cfg.phase_match, [f[0], f[1]], grid)?;
    Ok((w, ghz))
}

fn max_off_diagonal(rho: &DensityMatrix) -> f64 {
    let m = rho.matrix();
    let n = m.nrows();
    (0..n)
        .flat_map(|r| (0..n).filter(move |&c| c != r).map(move |c| (r, c)))
        .map(|(r, c)| m[(r, c)].norm())
        .fold(0.0, f64::max)
}

fn ghz_traced_expected() -> Result<DensityMatrix, crate::Error> {
    let p000 = basis_projector(&[2, 2], &[0, 0])?;
    let p111 = basis_projector(&[2, 2], &[1, 1])?;
    DensityMatrix::mixture(&[(0.5, &p000), (0.5, &p111)])
}

/// Builds both frequency-bin states, traces out one photon and reports
/// negativity and purity of the remaining pair together with the qubit
/// fixtures. Returns `PropertyViolation` after writing the report when the
/// GHZ-like pair is entangled or the W-like pair is not.
pub fn cmd_modes(cfg: &ExperimentConfig, out_dir: &Path) -> Result<RunSummary, CliError> {
    let started = Instant::now();
    ensure_dir(out_dir)?;
    let grid = require_mode_grid(cfg)?;
    let (w, ghz) = mode_states(cfg, &grid)?;
    let rho_w = reduce_w_trace3(&w)?;
    let rho_ghz = reduce_ghz_trace_one_degenerate(&ghz)?;
    let neg_w = negativity(&rho_w, &[0])?;
    let neg_ghz = negativity(&rho_ghz, &[0])?;
    let off_ghz = max_off_diagonal(&rho_ghz);

    let ghz3 = make_ghz().density();
    let w3 = make_w().density();
    let ghz_traced = qubit_toy::partial_trace(&ghz3, &[0, 1])?;
    let w_traced = qubit_toy::partial_trace(&w3, &[0, 1])?;
    let ghz_fid = fidelity(&ghz_traced, &ghz_traced_expected()?)?;
    let qubit_ghz_neg = negativity(&ghz_traced, &[0])?;
    let qubit_w_neg = negativity(&w_traced, &[0])?;

    let mut summary = RunSummary::new("modes", cfg);
    summary.metric("w111_negativity", Some(neg_w));
    summary.metric("w111_purity", Some(rho_w.purity()));
    summary.metric("ghz12_negativity", Some(neg_ghz));
    summary.metric("ghz12_purity", Some(rho_ghz.purity()));
    summary.metric("ghz12_max_off_diagonal", Some(off_ghz));
    summary.metric("qubit_ghz_traced_fidelity", Some(ghz_fid));
    summary.metric("qubit_ghz_traced_negativity", Some(qubit_ghz_neg));
    summary.metric("qubit_w_traced_negativity", Some(qubit_w_neg));

    let checks = [
        ("w111_entangled", neg_w > PROPERTY_TOL),
        ("ghz12_separable", neg_ghz <= PROPERTY_TOL),
        ("ghz12_diagonal", off_ghz <= PROPERTY_TOL),
        ("qubit_ghz_traced_classical", (ghz_fid - 1.0).abs() <= 1e-10),
        ("qubit_w_traced_entangled", qubit_w_neg > PROPERTY_TOL),
    ];
    for (k, v) in checks {
        summary.flags.insert(k.into(), v);
    }

    let report = json!({
        "mode_grid": {
            "n_bins": grid.n_bins(),
            "nu_min_rad_per_ps": grid.nu_min(),
            "nu_max_rad_per_ps": grid.nu_max(),
            "spacing_rad_per_ps": grid.spacing(),
        },
        "w111": {
            "reduced_dimension": rho_w.dim(),
            "negativity": neg_w,
            "purity": rho_w.purity(),
        },
        "ghz12": {
            "reduced_dimension": rho_ghz.dim(),
            "negativity": neg_ghz,
            "purity": rho_ghz.purity(),
            "max_off_diagonal": off_ghz,
        },
        "qubit_fixtures": {
            "ghz_traced_fidelity_to_classical_mixture": ghz_fid,
            "ghz_traced_negativity": qubit_ghz_neg,
            "w_traced_negativity": qubit_w_neg,
        },
        "checks": summary.flags.clone(),
    });
    write_file(out_dir.join("modes_report.json"), &pretty_json(&report))?;
    summary.files.push("modes_report.json".into());
    let summary = summary.finish(out_dir, started)?;

    let failed: Vec<&str> = checks
        .iter()
        .filter(|(_, ok)| !ok)
        .map(|(k, _)| *k)
        .collect();
    if failed.is_empty() {
        Ok(summary)
    } else {
        Err(CliError::PropertyViolation(failed.join(", ")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    Sigma,
    T12,
    T32,
    AlphaMax,
    NBins,
}

impl SweepParam {
    pub const ALL: [SweepParam; 5] = [
        SweepParam::Sigma,
        SweepParam::T12,
        SweepParam::T32,
        SweepParam::AlphaMax,
        SweepParam::NBins,
    ];

    pub fn key(self) -> &'static str {
        match self {
            SweepParam::Sigma => "sigma_rad_per_ps",
            SweepParam::T12 => "t12_ps",
            SweepParam::T32 => "t32_ps",
            SweepParam::AlphaMax => "alpha_max_rad_per_um",
            SweepParam::NBins => "n_bins",
        }
    }

    pub fn parse(key: &str) -> Result<Self, CliError> {
        Self::ALL
            .into_iter()
            .find(|p| p.key() == key)
            .ok_or_else(|| {
                let known: Vec<&str> = Self::ALL.iter().map(|p| p.key()).collect();
                CliError::Usage(format!(
                    "unknown sweep parameter {key:?}; expected one of {known:?}"
                ))
            })
    }

    /// Configuration with this parameter set to `value`. Filter sweeps set
    /// every filter; the quadrature is widened when the new value needs it.
    fn apply(self, cfg: &ExperimentConfig, value: f64) -> Result<ExperimentConfig, CliError> {
        let mut c = cfg.clone();
        match self {
            SweepParam::Sigma => {
                c.filters = c
                    .filters
                    .iter()
                    .map(|f| f.with_sigma(value))
                    .collect::<Result<_, _>>()?;
            }
            SweepParam::T12 => {
                c.phase_match = PhaseMatchConfig::new(value, c.phase_match.t32())?;
            }
            SweepParam::T32 => {
                c.phase_match = PhaseMatchConfig::new(c.phase_match.t12(), value)?;
            }
            SweepParam::AlphaMax => {
                let dims = c.transverse.map_or(1, |t| t.dims());
                c.transverse = Some(TransverseWindow::new(value, dims)?);
            }
            SweepParam::NBins => {
                if value.fract() != 0.0 || value < 0.0 {
                    return Err(CliError::Usage(format!(
                        "n_bins must be an integer, got {value}"
                    )));
                }
                let half_span = c.mode_grid.map_or(0.8, |g| -g.nu_min());
                c.mode_grid = Some(ModeGrid::centered(value as usize, half_span)?);
            }
        }
        c.quadrature = c.quadrature.fitted(&c.phase_match, &c.filters)?;
        Ok(c)
    }
}

const SWEEP_COLUMNS: [&str; 6] = [
    "g3_conditional_fwhm_ps",
    "g2_w_fwhm_ps",
    "g3_w_spatial_fwhm_um",
    "g3_ghz_spatial_fwhm_um",
    "w111_negativity",
    "ghz12_negativity",
];

fn sweep_row(cfg: &ExperimentConfig) -> Result<[Option<f64>; 6], CliError> {
    let pm = &cfg.phase_match;
    let f = cfg.filters3();
    let q: &QuadratureSpec = &cfg.quadrature;
    let tau = &cfg.grids.tau12;
    let engine = Engine::Fft;
    let cond = g3_w_conditional(pm, f, q, tau, engine)?;
    let g2 = g2_w_temporal(pm, f[0], f[1], q, tau, engine)?;
    let (sw, sg) = match cfg.transverse {
        Some(window) => {
            let rho = &cfg.grids.rho12;
            let origin = Grid1D::new(0.0, rho.step(), 2)?;
            let full = g3_w_spatial(&window, rho, &origin, engine)?;
            let slice: Vec<f64> = (0..rho.count()).map(|i| full.at(i, 0)).collect();
            let slice = normalize_to_peak(&CorrelationSurface::new(
                vec![*rho],
                slice,
                CorrelationKind::G3Spatial,
                StateKind::W111,
            )?)?;
            (
                fwhm_opt(&slice),
                fwhm_opt(&g3_ghz_spatial(&window, rho, engine)?),
            )
        }
        None => (None, None),
    };
    let (nw, ng) = match cfg.mode_grid {
        Some(grid) => {
            let (w, ghz) = mode_states(cfg, &grid)?;
            (
                Some(negativity(&reduce_w_trace3(&w)?, &[0])?),
                Some(negativity(&reduce_ghz_trace_one_degenerate(&ghz)?, &[0])?),
            )
        }
        None => (None, None),
    };
    Ok([fwhm_opt(&cond), fwhm_opt(&g2), sw, sg, nw, ng])
}

/// Summary metrics for each value of one parameter, one CSV row per value
/// in input order. Unresolvable widths are left empty.
pub fn cmd_sweep(
    cfg: &ExperimentConfig,
    param: SweepParam,
    values: &[f64],
    out_dir: &Path,
) -> Result<RunSummary, CliError> {
    if values.is_empty() {
        return Err(CliError::Usage("--values needs at least one value".into()));
    }
    let started = Instant::now();
    ensure_dir(out_dir)?;
    let configs = values
        .iter()
        .map(|&v| param.apply(cfg, v))
        .collect::<Result<Vec<_>, _>>()?;
    let rows = configs
        .par_iter()
        .map(sweep_row)
        .collect::<Result<Vec<_>, _>>()?;

    let mut csv = String::from(param.key());
    for col in SWEEP_COLUMNS {
        csv.push(',');
        csv.push_str(col);
    }
    csv.push('\n');
    for (value, row) in values.iter().zip(&rows) {
        csv.push_str(&fmt_e12(*value));
        for cell in row {
            csv.push(',');
            if let Some(x) = cell {
                csv.push_str(&fmt_e12(*x));
            }
        }
        csv.push('\n');
    }
    let mut summary = RunSummary::new("sweep", cfg);
    let name = format!("sweep_{}.csv", param.key());
    write_file(out_dir.join(&name), &csv)?;
    summary.files.push(name);
    summary.metric("rows", Some(rows.len() as f64));
    summary.finish(out_dir, started)
}
