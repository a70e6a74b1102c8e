//! Figure dataset presets.
//!
//! Presets live in `figures.json`, compiled into the binary. Each curve
//! becomes one CSV file; a `manifest.json` next to them records the exact
//! parameters and the manifest version that produced them.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::entanglement::{d_max_curve, sweep, Axis, DmaxScan, Spacing, SweepSpec};
use crate::geometry::{Alignment, ConeParameter};

use super::output::{dmax_csv, sweep_csv, DMAX_COLUMNS, SWEEP_COLUMNS};
use super::{CliError, VERSION};

const MANIFEST: &str = include_str!("figures.json");

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub manifest_version: u32,
    pub presets: Vec<Preset>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Preset {
    pub name: String,
    pub title: String,
    pub curves: Vec<Curve>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Curve {
    /// Concurrence table along one axis.
    Sweep {
        id: String,
        alignment: String,
        axis: String,
        lo: f64,
        hi: f64,
        n: usize,
        #[serde(default = "unit_nu")]
        nu: f64,
        #[serde(default)]
        l: f64,
        #[serde(default)]
        d: f64,
        gap: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        d_over_l: Option<f64>,
    },
    /// d_max against a linear grid of string distances.
    Dmax {
        id: String,
        alignment: String,
        lo: f64,
        hi: f64,
        n: usize,
        nu: f64,
        gap: f64,
        d_hi: f64,
        grid_n: usize,
    },
}

fn unit_nu() -> f64 {
    1.0
}

impl Curve {
    pub fn id(&self) -> &str {
        match self {
            Curve::Sweep { id, .. } | Curve::Dmax { id, .. } => id,
        }
    }
}

pub fn manifest() -> Manifest {
    serde_json::from_str(MANIFEST).expect("embedded figure manifest is valid")
}

pub fn find(name: &str) -> Result<Preset, CliError> {
    let m = manifest();
    m.presets.into_iter().find(|p| p.name == name).ok_or_else(|| {
        let known: Vec<String> = manifest().presets.into_iter().map(|p| p.name).collect();
        CliError::Usage(format!("unknown figure preset `{name}` (known: {})", known.join(", ")))
    })
}

fn alignment(s: &str) -> Result<Alignment, CliError> {
    s.parse().map_err(|e: crate::Error| CliError::Usage(e.to_string()))
}

fn l_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>, CliError> {
    SweepSpec {
        axis: Axis::L,
        lo,
        hi,
        n,
        spacing: Spacing::Linear,
        alignments: vec![Alignment::Flat],
        nu: 1.0,
        l: 0.0,
        d: 1.0,
        gap: 0.0,
        d_over_l: None,
    }
    .grid()
    .map_err(|e| CliError::Usage(e.to_string()))
}

/// The sweep a curve describes, with every grid point validated.
pub fn sweep_spec(curve: &Curve) -> Result<Option<SweepSpec>, CliError> {
    let Curve::Sweep { alignment: a, axis, lo, hi, n, nu, l, d, gap, d_over_l, .. } = curve else {
        return Ok(None);
    };
    let spec = SweepSpec {
        axis: Axis::parse(axis).map_err(|e| CliError::Usage(e.to_string()))?,
        lo: *lo,
        hi: *hi,
        n: *n,
        spacing: Spacing::Linear,
        alignments: vec![alignment(a)?],
        nu: *nu,
        l: *l,
        d: *d,
        gap: *gap,
        d_over_l: *d_over_l,
    };
    super::validate_sweep(&spec)?;
    Ok(Some(spec))
}

/// CSV text for one curve.
pub fn render_curve(curve: &Curve) -> Result<String, CliError> {
    match curve {
        Curve::Sweep { .. } => {
            let spec = sweep_spec(curve)?.expect("sweep curve");
            Ok(sweep_csv(&sweep(&spec)?))
        }
        Curve::Dmax { alignment: a, lo, hi, n, nu, gap, d_hi, grid_n, .. } => {
            let a = alignment(a)?;
            let nu = ConeParameter::new(*nu).map_err(|e| CliError::Usage(e.to_string()))?;
            let ls = l_grid(*lo, *hi, *n)?;
            let scan = DmaxScan { d_hi: *d_hi, grid_n: *grid_n, ..DmaxScan::default() };
            let results = d_max_curve(a, nu, *gap, &ls, &scan)
                .into_iter()
                .collect::<crate::Result<Vec<_>>>()?;
            Ok(dmax_csv(&ls, &results))
        }
    }
}

pub fn file_name(preset: &Preset, curve: &Curve) -> String {
    format!("{}_{}.csv", preset.name, curve.id())
}

/// Every output file of a preset, in manifest order: the curve CSVs
/// followed by `manifest.json`.
pub fn render(preset: &Preset) -> Result<Vec<(String, String)>, CliError> {
    let bodies = preset
        .curves
        .par_iter()
        .map(render_curve)
        .collect::<Result<Vec<_>, _>>()?;
    let mut files: Vec<(String, String)> = preset
        .curves
        .iter()
        .zip(bodies)
        .map(|(c, body)| (file_name(preset, c), body))
        .collect();
    let curves: Vec<Value> = preset
        .curves
        .iter()
        .map(|c| {
            let columns = match c {
                Curve::Sweep { .. } => SWEEP_COLUMNS,
                Curve::Dmax { .. } => DMAX_COLUMNS,
            };
            json!({ "file": file_name(preset, c), "columns": columns, "parameters": c })
        })
        .collect();
    let doc = json!({
        "version": VERSION,
        "manifest_version": manifest().manifest_version,
        "preset": preset.name,
        "title": preset.title,
        "units": { "lengths": "sigma", "gap": "Omega*sigma", "observables": "per lambda^2" },
        "curves": curves,
    });
    files.push(("manifest.json".to_string(), super::output::pretty(&doc)));
    Ok(files)
}
