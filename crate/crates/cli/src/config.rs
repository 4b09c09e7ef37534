//! JSON run configuration.
//!
//! All physical quantities are in units of the switching timescale T, with
//! c = ħ = 1. Unknown keys are rejected everywhere.

use std::path::PathBuf;

use harvest_core::kernels::{QuadratureSettings, TargetFieldSpec};
use harvest_core::oracle::LatticeModel;
use harvest_core::smearing::DetectorSpec;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// Documentation of every configuration key, printed by `--help`.
pub const CONFIG_HELP: &str = "\
CONFIGURATION (JSON, unknown keys are rejected; units of T, c = hbar = 1)

  task.kind                 \"harvest\" | \"purity\" | \"oracle\"
  output.csv                optional CSV path (overridden by --out)
  output.svg                optional SVG path (written when --svg is given)

  harvest:
    task.detector_a, task.detector_b
      potential.kind        \"harmonic\" | \"box\"
      potential.scale       trap length l (harmonic) or cube side d (box)
      potential.probe_mass  probe field mass m_d
      potential.center      [x, y, z]
      mode                  [n_x, n_y, n_z] (harmonic from 0, box from 1)
      switching.timescale   Gaussian switching width T
      switching.center_time switching peak time (default 0)
      coupling              lambda
      gap                   optional gap override (default: mode frequency)
    task.field.mass         target field mass
    task.field.state        \"minkowski_vacuum\" (default)
    task.sweep.axis         \"gap\" | \"separation\"
    task.sweep.min, .max    sweep range (min < max)
    task.sweep.points       number of points (>= 2)
    task.sweep.spacing      \"linear\" | \"centered\" | \"log\" (default linear)
    task.separations        optional list: for gap sweeps, one curve per
                            entry with detector B placed at A + (d, 0, 0)
    task.quadrature.rel_tol, .abs_tol, .max_evaluations
    task.quadrature.method  {\"kind\": \"adaptive_gk\"} | {\"kind\": \"tensor_gl\"} |
                            {\"kind\": \"monte_carlo\", \"seed\": u64, \"samples\": n}
    task.quadrature.force_full_3d  optional bool

  purity:
    task.ell                trap length l
    task.mass_ell           m l
    task.dims               list of spatial dimensions (1, 2, 3)
    task.sweep              as above with axis \"ratio\" (sigma / l)
    task.series_rel_tol     relative truncation target of the mode series

  oracle:
    task.model.n_sites, .spacing, .target_mass
    task.model.boundary     \"periodic\" | \"dirichlet\"
    task.model.probes[]     {coupling, switching, modes}
      modes                 {\"kind\": \"single_mode\", \"gap\": g, \"profile\": [..]} |
                            {\"kind\": \"chain\", \"first_site\": j, \"probe_mass\": m,
                             \"potential\": [..]}
    task.lambdas.min, .max, .points   log-spaced coupling grid
    task.lambdas.include_zero         optional bool, adds a lambda = 0 row
    task.multimode          optional bool: also compare chains with their
                            single-mode truncation
";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub task: Task,
    #[serde(default)]
    pub output: OutputPaths,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputPaths {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Task {
    Harvest(HarvestTask),
    Purity(PurityTask),
    Oracle(OracleTask),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    Gap,
    Separation,
    Ratio,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    /// `min + i (max - min) / (points - 1)`.
    #[default]
    Linear,
    /// Midpoints of `points` equal cells, so neither endpoint is sampled.
    Centered,
    /// Geometric between `min` and `max`.
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub axis: SweepAxis,
    pub min: f64,
    pub max: f64,
    pub points: usize,
    #[serde(default)]
    pub spacing: Spacing,
}

impl Sweep {
    pub fn validate(&self, path: &str) -> Result<()> {
        if self.points < 2 {
            return Err(CliError::config(format!("{path}.points"), "need at least two points"));
        }
        if !(self.min.is_finite() && self.max.is_finite()) {
            return Err(CliError::config(format!("{path}.min"), "range must be finite"));
        }
        if !(self.min < self.max) {
            return Err(CliError::config(
                format!("{path}.max"),
                format!("min ({}) must be below max ({})", self.min, self.max),
            ));
        }
        if self.spacing == Spacing::Log && self.min <= 0.0 {
            return Err(CliError::config(format!("{path}.min"), "log spacing needs a positive range"));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        let n = self.points;
        (0..n)
            .map(|i| match self.spacing {
                Spacing::Linear => {
                    if i + 1 == n {
                        self.max
                    } else {
                        self.min + (self.max - self.min) * i as f64 / (n - 1) as f64
                    }
                }
                Spacing::Centered => self.min + (self.max - self.min) * (i as f64 + 0.5) / n as f64,
                Spacing::Log => {
                    let (lo, hi) = (self.min.log10(), self.max.log10());
                    10f64.powf(lo + (hi - lo) * i as f64 / (n - 1) as f64)
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HarvestTask {
    pub detector_a: DetectorSpec,
    pub detector_b: DetectorSpec,
    pub field: TargetFieldSpec,
    pub sweep: Sweep,
    pub quadrature: QuadratureSettings,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub separations: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PurityTask {
    pub ell: f64,
    pub mass_ell: f64,
    pub dims: Vec<u32>,
    pub sweep: Sweep,
    pub series_rel_tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LambdaGrid {
    pub min: f64,
    pub max: f64,
    pub points: usize,
    #[serde(default)]
    pub include_zero: bool,
}

impl LambdaGrid {
    pub fn values(&self) -> Vec<f64> {
        let sweep = Sweep {
            axis: SweepAxis::Ratio,
            min: self.min,
            max: self.max,
            points: self.points,
            spacing: Spacing::Log,
        };
        let mut out = Vec::with_capacity(self.points + 1);
        if self.include_zero {
            out.push(0.0);
        }
        out.extend(sweep.values());
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleTask {
    pub model: LatticeModel,
    pub lambdas: LambdaGrid,
    #[serde(default)]
    pub multimode: bool,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("configuration serialises")
    }

    pub fn validate(&self) -> Result<()> {
        match &self.task {
            Task::Harvest(h) => {
                h.detector_a
                    .validate()
                    .map_err(|e| CliError::config("task.detector_a", e.to_string()))?;
                h.detector_b
                    .validate()
                    .map_err(|e| CliError::config("task.detector_b", e.to_string()))?;
                h.field.validate().map_err(|e| CliError::config("task.field", e.to_string()))?;
                h.quadrature
                    .validate()
                    .map_err(|e| CliError::config("task.quadrature", e.to_string()))?;
                h.sweep.validate("task.sweep")?;
                match h.sweep.axis {
                    SweepAxis::Gap => {}
                    SweepAxis::Separation => {
                        if !h.separations.is_empty() {
                            return Err(CliError::config(
                                "task.separations",
                                "extra separations only apply to gap sweeps",
                            ));
                        }
                    }
                    SweepAxis::Ratio => {
                        return Err(CliError::config("task.sweep.axis", "harvest sweeps use \"gap\" or \"separation\""));
                    }
                }
                if h.sweep.axis == SweepAxis::Gap && h.sweep.min < 0.0 {
                    return Err(CliError::config("task.sweep.min", "gaps must be non-negative"));
                }
                if let Some(d) = h.separations.iter().find(|d| !d.is_finite()) {
                    return Err(CliError::config("task.separations", format!("non-finite separation {d}")));
                }
            }
            Task::Purity(p) => {
                p.sweep.validate("task.sweep")?;
                if p.sweep.axis != SweepAxis::Ratio {
                    return Err(CliError::config("task.sweep.axis", "purity sweeps use \"ratio\""));
                }
                if p.sweep.min <= 0.0 {
                    return Err(CliError::config("task.sweep.min", "ratios must be positive"));
                }
                if p.dims.is_empty() {
                    return Err(CliError::config("task.dims", "list at least one dimension"));
                }
                if let Some(d) = p.dims.iter().find(|d| !(1..=3).contains(*d)) {
                    return Err(CliError::config("task.dims", format!("dimension {d} is not 1, 2 or 3")));
                }
                if !(p.ell > 0.0 && p.ell.is_finite()) {
                    return Err(CliError::config("task.ell", "must be positive"));
                }
                if !(p.mass_ell >= 0.0 && p.mass_ell.is_finite()) {
                    return Err(CliError::config("task.mass_ell", "must be non-negative"));
                }
                if !(p.series_rel_tol > 0.0 && p.series_rel_tol < 1.0) {
                    return Err(CliError::config("task.series_rel_tol", "must lie in (0, 1)"));
                }
            }
            Task::Oracle(o) => {
                o.model.validate().map_err(|e| CliError::config("task.model", e.to_string()))?;
                if o.model.probes.len() != 2 {
                    return Err(CliError::config("task.model.probes", "the campaign needs exactly two probes"));
                }
                let g = &o.lambdas;
                if g.points < 2 {
                    return Err(CliError::config("task.lambdas.points", "need at least two points"));
                }
                if !(g.min > 0.0 && g.min < g.max && g.max.is_finite()) {
                    return Err(CliError::config("task.lambdas", "need 0 < min < max"));
                }
            }
        }
        Ok(())
    }

    /// Replaces the point count of the sweep or coupling grid.
    pub fn with_points(mut self, points: usize) -> Self {
        match &mut self.task {
            Task::Harvest(h) => h.sweep.points = points,
            Task::Purity(p) => p.sweep.points = points,
            Task::Oracle(o) => o.lambdas.points = points,
        }
        self
    }

    pub fn uses_rng(&self) -> bool {
        matches!(&self.task, Task::Harvest(h) if h.quadrature.uses_rng())
    }
}
