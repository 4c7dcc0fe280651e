//! JSON experiment configuration. Every dimensional quantity carries its
//! unit in the key name (`t12_ps`, `sigma_rad_per_ps`, ...).

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::correlators::{Grid1D, QuadratureSpec};
use crate::mode_space::ModeGrid;
use crate::spectra::{FilterShape, FilterSpec, PhaseMatchConfig, TransverseWindow};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("malformed configuration: {0}")]
    Parse(String),
    #[error("invalid value for `{key}`: {reason}")]
    Invalid { key: String, reason: String },
}

fn invalid(key: &str, reason: impl ToString) -> ConfigError {
    ConfigError::Invalid {
        key: key.to_string(),
        reason: reason.to_string(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum ShapeKey {
    Gaussian,
    Rectangular,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawPhaseMatch {
    t12_ps: f64,
    t32_ps: f64,
}

impl Default for RawPhaseMatch {
    fn default() -> Self {
        Self {
            t12_ps: -20.0,
            t32_ps: -20.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawFilter {
    shape: ShapeKey,
    sigma_rad_per_ps: f64,
    center_offset_rad_per_ps: f64,
}

impl Default for RawFilter {
    fn default() -> Self {
        Self {
            shape: ShapeKey::Gaussian,
            sigma_rad_per_ps: 0.4,
            center_offset_rad_per_ps: 0.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawQuadrature {
    n_points: usize,
    nu_span_rad_per_ps: f64,
}

impl Default for RawQuadrature {
    fn default() -> Self {
        Self {
            n_points: 1024,
            nu_span_rad_per_ps: 3.2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTimeGrid {
    start_ps: f64,
    step_ps: f64,
    count: usize,
}

impl Default for RawTimeGrid {
    fn default() -> Self {
        Self {
            start_ps: 0.0,
            step_ps: 0.25,
            count: 161,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpaceGrid {
    start_um: f64,
    step_um: f64,
    count: usize,
}

impl Default for RawSpaceGrid {
    fn default() -> Self {
        Self {
            start_um: -10.0,
            step_um: 0.05,
            count: 401,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
struct RawGrids {
    tau12: RawTimeGrid,
    tau32: RawTimeGrid,
    rho12: RawSpaceGrid,
    rho32: RawSpaceGrid,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawTransverse {
    alpha_max_rad_per_um: f64,
    dims: u8,
}

impl Default for RawTransverse {
    fn default() -> Self {
        Self {
            alpha_max_rad_per_um: 1.0,
            dims: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawModeGrid {
    n_bins: usize,
    nu_min_rad_per_ps: f64,
    nu_max_rad_per_ps: f64,
}

impl Default for RawModeGrid {
    fn default() -> Self {
        // ModeGrid::centered(8, 0.8)
        Self {
            n_bins: 8,
            nu_min_rad_per_ps: -0.8,
            nu_max_rad_per_ps: 0.6000000000000001,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawOutput {
    dir: PathBuf,
    format: OutputFormat,
}

impl Default for RawOutput {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("triphoton-out"),
            format: OutputFormat::Csv,
        }
    }
}

fn default_filters() -> Vec<RawFilter> {
    vec![RawFilter::default(); 3]
}

fn default_transverse() -> Option<RawTransverse> {
    Some(RawTransverse::default())
}

fn default_mode_grid() -> Option<RawModeGrid> {
    Some(RawModeGrid::default())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default)]
    phase_match: RawPhaseMatch,
    #[serde(default = "default_filters")]
    filters: Vec<RawFilter>,
    #[serde(default)]
    quadrature: RawQuadrature,
    #[serde(default)]
    grids: RawGrids,
    #[serde(default = "default_transverse")]
    transverse: Option<RawTransverse>,
    #[serde(default = "default_mode_grid")]
    mode_grid: Option<RawModeGrid>,
    #[serde(default)]
    output: RawOutput,
}

impl Default for RawConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("empty config parses")
    }
}

/// Named delay and displacement grids.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grids {
    pub tau12: Grid1D,
    pub tau32: Grid1D,
    pub rho12: Grid1D,
    pub rho32: Grid1D,
}

/// Validated experiment configuration. Defaults are the `figure1` setup:
/// `t12 = t32 = -20 ps` and three Gaussian filters of `sigma = 0.4 rad/ps`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub phase_match: PhaseMatchConfig,
    pub filters: Vec<FilterSpec>,
    pub quadrature: QuadratureSpec,
    pub grids: Grids,
    pub transverse: Option<TransverseWindow>,
    pub mode_grid: Option<ModeGrid>,
    pub output_dir: PathBuf,
    pub output_format: OutputFormat,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        RawConfig::default().validate().expect("defaults are valid")
    }
}

fn time_grid(key: &str, g: &RawTimeGrid) -> Result<Grid1D, ConfigError> {
    Grid1D::new(g.start_ps, g.step_ps, g.count).map_err(|e| invalid(key, e))
}

fn space_grid(key: &str, g: &RawSpaceGrid) -> Result<Grid1D, ConfigError> {
    Grid1D::new(g.start_um, g.step_um, g.count).map_err(|e| invalid(key, e))
}

impl RawConfig {
    fn validate(&self) -> Result<ExperimentConfig, ConfigError> {
        let pm = &self.phase_match;
        if !pm.t12_ps.is_finite() || pm.t12_ps == 0.0 {
            return Err(invalid("phase_match.t12_ps", "must be finite and nonzero"));
        }
        let phase_match = PhaseMatchConfig::new(pm.t12_ps, pm.t32_ps)
            .map_err(|e| invalid("phase_match.t32_ps", e))?;

        if !(2..=3).contains(&self.filters.len()) {
            return Err(invalid("filters", "expected 2 or 3 filter entries"));
        }
        let filters = self
            .filters
            .iter()
            .enumerate()
            .map(|(i, f)| {
                let shape = match f.shape {
                    ShapeKey::Gaussian => FilterShape::Gaussian,
                    ShapeKey::Rectangular => FilterShape::Rectangular,
                };
                if !(f.sigma_rad_per_ps > 0.0) {
                    return Err(invalid(
                        &format!("filters[{i}].sigma_rad_per_ps"),
                        "must be positive",
                    ));
                }
                FilterSpec::new(shape, f.sigma_rad_per_ps, f.center_offset_rad_per_ps)
                    .map_err(|e| invalid(&format!("filters[{i}].center_offset_rad_per_ps"), e))
            })
            .collect::<Result<Vec<_>, _>>()?;

        let q = &self.quadrature;
        let quadrature = QuadratureSpec::new(q.n_points, q.nu_span_rad_per_ps).map_err(|e| {
            let key = if q.n_points < 2 || !q.n_points.is_power_of_two() {
                "quadrature.n_points"
            } else {
                "quadrature.nu_span_rad_per_ps"
            };
            invalid(key, e)
        })?;
        quadrature
            .check_coverage(&phase_match, &filters)
            .map_err(|e| invalid("quadrature.nu_span_rad_per_ps", e))?;

        let grids = Grids {
            tau12: time_grid("grids.tau12", &self.grids.tau12)?,
            tau32: time_grid("grids.tau32", &self.grids.tau32)?,
            rho12: space_grid("grids.rho12", &self.grids.rho12)?,
            rho32: space_grid("grids.rho32", &self.grids.rho32)?,
        };

        let transverse = self
            .transverse
            .as_ref()
            .map(|t| {
                TransverseWindow::new(t.alpha_max_rad_per_um, t.dims).map_err(|e| {
                    let key = if t.dims == 1 || t.dims == 2 {
                        "transverse.alpha_max_rad_per_um"
                    } else {
                        "transverse.dims"
                    };
                    invalid(key, e)
                })
            })
            .transpose()?;

        let mode_grid = self
            .mode_grid
            .as_ref()
            .map(|m| {
                ModeGrid::new(m.n_bins, m.nu_min_rad_per_ps, m.nu_max_rad_per_ps).map_err(|e| {
                    let key = if (2..=crate::mode_space::MAX_BINS).contains(&m.n_bins) {
                        "mode_grid.nu_max_rad_per_ps"
                    } else {
                        "mode_grid.n_bins"
                    };
                    invalid(key, e)
                })
            })
            .transpose()?;

        Ok(ExperimentConfig {
            phase_match,
            filters,
            quadrature,
            grids,
            transverse,
            mode_grid,
            output_dir: self.output.dir.clone(),
            output_format: self.output.format,
        })
    }
}

impl ExperimentConfig {
    fn to_raw(&self) -> RawConfig {
        let time = |g: &Grid1D| RawTimeGrid {
            start_ps: g.start(),
            step_ps: g.step(),
            count: g.count(),
        };
        let space = |g: &Grid1D| RawSpaceGrid {
            start_um: g.start(),
            step_um: g.step(),
            count: g.count(),
        };
        RawConfig {
            phase_match: RawPhaseMatch {
                t12_ps: self.phase_match.t12(),
                t32_ps: self.phase_match.t32(),
            },
            filters: self
                .filters
                .iter()
                .map(|f| RawFilter {
                    shape: match f.shape() {
                        FilterShape::Gaussian => ShapeKey::Gaussian,
                        FilterShape::Rectangular => ShapeKey::Rectangular,
                    },
                    sigma_rad_per_ps: f.sigma(),
                    center_offset_rad_per_ps: f.center_offset(),
                })
                .collect(),
            quadrature: RawQuadrature {
                n_points: self.quadrature.n_points(),
                nu_span_rad_per_ps: self.quadrature.nu_span(),
            },
            grids: RawGrids {
                tau12: time(&self.grids.tau12),
                tau32: time(&self.grids.tau32),
                rho12: space(&self.grids.rho12),
                rho32: space(&self.grids.rho32),
            },
            transverse: self.transverse.map(|t| RawTransverse {
                alpha_max_rad_per_um: t.alpha_max(),
                dims: t.dims(),
            }),
            mode_grid: self.mode_grid.map(|m| RawModeGrid {
                n_bins: m.n_bins(),
                nu_min_rad_per_ps: m.nu_min(),
                nu_max_rad_per_ps: m.nu_max(),
            }),
            output: RawOutput {
                dir: self.output_dir.clone(),
                format: self.output_format,
            },
        }
    }

    /// Pretty-printed JSON that [`parse_config`] maps back to `self`.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_raw()).expect("config serializes")
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(self.to_raw()).expect("config serializes")
    }

    /// Filters `[f1, f2, f3]`; a two-entry list reuses filter 1 for photon 3.
    pub fn filters3(&self) -> [&FilterSpec; 3] {
        let f = &self.filters;
        [&f[0], &f[1], f.get(2).unwrap_or(&f[0])]
    }

    pub fn has_three_filters(&self) -> bool {
        self.filters.len() == 3
    }
}

pub fn parse_config(text: &[u8]) -> Result<ExperimentConfig, ConfigError> {
    let raw: RawConfig =
        serde_json::from_slice(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
    raw.validate()
}
