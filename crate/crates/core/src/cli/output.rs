//! Serialization of correlation surfaces and reports.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use crate::correlators::{CorrelationKind, CorrelationSurface, StateKind};

use super::CliError;

/// C-style `%.12e`: twelve mantissa digits, signed exponent of at least two
/// digits.
pub fn fmt_e12(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    let s = format!("{x:.12e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}

/// Column names (with units) for the axes of a surface.
#[derive(Clone, Debug)]
pub struct AxisLabels {
    pub names: Vec<&'static str>,
    pub value: &'static str,
    /// Drop rows with a negative delay coordinate.
    pub physical_mask: bool,
}

pub fn labels_for(surface: &CorrelationSurface, physical_mask: bool) -> AxisLabels {
    let temporal = matches!(
        surface.kind(),
        CorrelationKind::G2Temporal | CorrelationKind::G3Temporal
    );
    let names = match (temporal, surface.axes().len()) {
        (true, 1) => vec!["tau12_ps"],
        (true, _) => vec!["tau12_ps", "tau32_ps"],
        (false, 1) => vec!["rho12_um"],
        (false, _) => vec!["rho12_um", "rho32_um"],
    };
    let value = match surface.kind() {
        CorrelationKind::G2Temporal | CorrelationKind::G2Spatial => "g2",
        CorrelationKind::G3Temporal | CorrelationKind::G3Spatial => "g3",
    };
    AxisLabels {
        names,
        value,
        physical_mask: physical_mask && temporal,
    }
}

pub fn surface_csv(surface: &CorrelationSurface, labels: &AxisLabels) -> String {
    let mut out = String::new();
    let mut header = labels.names.join(",");
    header.push(',');
    header.push_str(labels.value);
    out.push_str(&header);
    out.push('\n');
    let axes = surface.axes();
    let n1 = axes.get(1).map_or(1, |g| g.count());
    for i in 0..axes[0].count() {
        for j in 0..n1 {
            let mut coords = vec![axes[0].value(i)];
            if let Some(g) = axes.get(1) {
                coords.push(g.value(j));
            }
            if labels.physical_mask && coords.iter().any(|&c| c < 0.0) {
                continue;
            }
            for c in coords {
                out.push_str(&fmt_e12(c));
                out.push(',');
            }
            let _ = writeln!(out, "{}", fmt_e12(surface.at(i, j)));
        }
    }
    out
}

pub fn surface_json(surface: &CorrelationSurface, labels: &AxisLabels) -> Value {
    let axes: Vec<Value> = surface
        .axes()
        .iter()
        .zip(&labels.names)
        .map(|(g, name)| json!({"name": name, "start": g.start(), "step": g.step(), "count": g.count()}))
        .collect();
    json!({
        "axes": axes,
        "kind": kind_name(surface.kind()),
        "state": state_name(surface.state()),
        "normalized": surface.is_normalized(),
        "value": labels.value,
        "values": surface.values(),
    })
}

pub fn kind_name(kind: CorrelationKind) -> &'static str {
    match kind {
        CorrelationKind::G2Temporal => "g2_temporal",
        CorrelationKind::G3Temporal => "g3_temporal",
        CorrelationKind::G2Spatial => "g2_spatial",
        CorrelationKind::G3Spatial => "g3_spatial",
    }
}

pub fn state_name(state: StateKind) -> &'static str {
    match state {
        StateKind::W111 => "w111",
        StateKind::Ghz12 => "ghz12",
    }
}

/// Pretty JSON with sorted keys (serde_json maps are ordered).
pub fn pretty_json(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("JSON value serializes");
    s.push('\n');
    s
}

pub fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.to_path_buf(),
        source,
    })
}

pub fn write_file(path: PathBuf, contents: &str) -> Result<PathBuf, CliError> {
    std::fs::write(&path, contents).map_err(|source| CliError::Io {
        path: path.clone(),
        source,
    })?;
    Ok(path)
}
