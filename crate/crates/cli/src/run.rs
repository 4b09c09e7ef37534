//! Sweep runners. Each returns the full CSV text; rows always appear in
//! sweep order.

use std::fmt::Write as _;

use harvest_core::harvesting::{HarvestingResult, PairIntegrator};
use harvest_core::oracle::{fit_log_log, multimode_points, residual_points, ScalingPoint};
use harvest_core::purity::{purity_interval, symplectic_eigenvalue, PuritySpec};
use harvest_core::smearing::DetectorSpec;
use rayon::prelude::*;

use crate::config::{HarvestTask, OracleTask, PurityTask, RunConfig, SweepAxis, Task};
use crate::error::Result;

pub const HARVEST_COLUMNS: &str = "sweep_value,separation,L_AA,L_BB,Re_L_AB,Im_L_AB,Re_K_A,Im_K_A,Re_K_B,Im_K_B,\
Re_M,Im_M,negativity,negativity_over_lambda2,comm_ratio,err_L,err_M,status";
pub const PURITY_COLUMNS: &str = "sigma_over_ell,dim,nu,terms_used,truncation_bound,status";
pub const ORACLE_COLUMNS: &str = "kind,lambda,n_exact,n_pert,residual,slope,status";

/// Full-precision scientific notation (17 significant digits).
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

/// Status cell text with separators and line breaks removed.
fn status_of(e: &dyn std::fmt::Display) -> String {
    let text: String = e
        .to_string()
        .chars()
        .map(|c| if matches!(c, ',' | '\n' | '\r' | '"') { ';' } else { c })
        .collect();
    format!("error: {text}")
}

/// Header comment lines: tool name, notes, and the configuration as run.
pub fn provenance(name: &str, cfg: &RunConfig, notes: &[&str]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# harvest {name}");
    for n in notes {
        let _ = writeln!(s, "# {n}");
    }
    let _ = writeln!(s, "# config: {}", cfg.to_json());
    s
}

/// Runs the configured task and returns the CSV body (header row and data rows).
pub fn run(cfg: &RunConfig) -> Result<String> {
    cfg.validate()?;
    match &cfg.task {
        Task::Harvest(h) => Ok(run_harvest(h)),
        Task::Purity(p) => run_purity(p),
        Task::Oracle(o) => Ok(run_oracle(o)),
    }
}

fn harvest_row(x: f64, separation: f64, lambda2: f64, r: &Result<HarvestingResult, harvest_core::Error>) -> String {
    match r {
        Ok(r) => {
            let cells = [
                x,
                separation,
                r.l_aa,
                r.l_bb,
                r.l_ab.re,
                r.l_ab.im,
                r.k_a.re,
                r.k_a.im,
                r.k_b.re,
                r.k_b.im,
                r.m.re,
                r.m.im,
                r.negativity,
                r.negativity / lambda2,
                r.comm_ratio,
                r.errors.l_aa.max(r.errors.l_bb).max(r.errors.l_ab),
                r.errors.m,
            ];
            let mut s: Vec<String> = cells.iter().map(|&v| num(v)).collect();
            s.push("ok".into());
            s.join(",")
        }
        Err(e) => {
            let mut s = vec![num(x), num(separation)];
            s.extend(std::iter::repeat_n("NaN".to_string(), 15));
            s.push(status_of(e));
            s.join(",")
        }
    }
}

fn distance(a: &DetectorSpec, b: &DetectorSpec) -> f64 {
    (0..3)
        .map(|i| (a.potential.center[i] - b.potential.center[i]).powi(2))
        .sum::<f64>()
        .sqrt()
}

fn placed(a: &DetectorSpec, b: &DetectorSpec, d: f64) -> DetectorSpec {
    let c = a.potential.center;
    b.moved_to([c[0] + d, c[1], c[2]])
}

/// Gap sweeps reuse one integrator per curve so the gap-independent
/// columns are built once; separation sweeps build one per point.
pub fn run_harvest(h: &HarvestTask) -> String {
    let xs = h.sweep.values();
    let lambda2 = h.detector_a.coupling * h.detector_b.coupling;
    let mut out = String::new();
    let _ = writeln!(out, "{HARVEST_COLUMNS}");
    match h.sweep.axis {
        SweepAxis::Gap => {
            let curves: Vec<DetectorSpec> = if h.separations.is_empty() {
                vec![h.detector_b]
            } else {
                h.separations.iter().map(|&d| placed(&h.detector_a, &h.detector_b, d)).collect()
            };
            let blocks: Vec<Vec<String>> = curves
                .par_iter()
                .map(|b| {
                    let sep = distance(&h.detector_a, b);
                    match PairIntegrator::new(&h.detector_a, b, &h.field, &h.quadrature) {
                        Ok(mut integ) => xs
                            .iter()
                            .map(|&g| harvest_row(g, sep, lambda2, &integ.evaluate(Some(g))))
                            .collect(),
                        Err(e) => xs.iter().map(|&g| harvest_row(g, sep, lambda2, &Err(e.clone()))).collect(),
                    }
                })
                .collect();
            for line in blocks.into_iter().flatten() {
                let _ = writeln!(out, "{line}");
            }
        }
        SweepAxis::Separation | SweepAxis::Ratio => {
            let rows: Vec<String> = xs
                .par_iter()
                .map(|&d| {
                    let b = placed(&h.detector_a, &h.detector_b, d);
                    let r = PairIntegrator::new(&h.detector_a, &b, &h.field, &h.quadrature)
                        .and_then(|mut integ| integ.evaluate(None));
                    harvest_row(d, d, lambda2, &r)
                })
                .collect();
            for line in rows {
                let _ = writeln!(out, "{line}");
            }
        }
    }
    out
}

pub fn run_purity(p: &PurityTask) -> Result<String> {
    let ratios = p.sweep.values();
    let mut out = String::new();
    for &dim in &p.dims {
        match purity_interval(p.mass_ell, dim, 0.05, p.series_rel_tol) {
            Ok((lo, hi)) => {
                let _ = writeln!(out, "# nu <= 1.05 for sigma/ell in [{lo:.6e}, {hi:.6e}] (dim {dim})");
            }
            Err(e) => {
                let _ = writeln!(out, "# 5% purity interval unavailable for dim {dim}: {e}");
            }
        }
    }
    let _ = writeln!(out, "{PURITY_COLUMNS}");
    let jobs: Vec<(u32, f64)> = p.dims.iter().flat_map(|&d| ratios.iter().map(move |&r| (d, r))).collect();
    let rows: Vec<String> = jobs
        .par_iter()
        .map(|&(dim, ratio)| {
            let spec = PuritySpec {
                sigma: ratio * p.ell,
                ell: p.ell,
                mass_ell: p.mass_ell,
                dim,
                series_rel_tol: p.series_rel_tol,
            };
            match symplectic_eigenvalue(&spec) {
                Ok(r) => format!(
                    "{},{dim},{},{},{},ok",
                    num(ratio),
                    num(r.nu),
                    r.terms_used,
                    num(r.truncation_bound)
                ),
                Err(e) => format!("{},{dim},NaN,0,NaN,{}", num(ratio), status_of(&e)),
            }
        })
        .collect();
    for line in rows {
        let _ = writeln!(out, "{line}");
    }
    Ok(out)
}

fn scaling_rows(out: &mut String, kind: &str, points: &[ScalingPoint]) {
    for p in points {
        let _ = writeln!(
            out,
            "{kind},{},{},{},{},,ok",
            num(p.lambda),
            num(p.exact),
            num(p.reference),
            num(p.residual)
        );
    }
    match fit_log_log(points.to_vec()) {
        Ok(fit) => {
            let _ = writeln!(out, "{kind}_fit,,,,,{},fit over {} points", num(fit.slope), fit.used);
        }
        Err(e) => {
            let _ = writeln!(out, "{kind}_fit,,,,,NaN,{}", status_of(&e));
        }
    }
}

/// Exact-versus-perturbative campaign on the single-mode truncation of the
/// model, optionally followed by the multimode comparison.
pub fn run_oracle(o: &OracleTask) -> String {
    let lambdas = o.lambdas.values();
    let mut out = String::new();
    let _ = writeln!(out, "{ORACLE_COLUMNS}");
    let single = o.model.single_mode_truncation();
    let base = match &single {
        Ok(m) => m,
        Err(e) => {
            let _ = writeln!(out, "residual_fit,,,,,NaN,{}", status_of(e));
            return out;
        }
    };
    match residual_points(base, &lambdas) {
        Ok(points) => scaling_rows(&mut out, "residual", &points),
        Err(e) => {
            let _ = writeln!(out, "residual_fit,,,,,NaN,{}", status_of(&e));
        }
    }
    if o.multimode {
        match multimode_points(&o.model, &lambdas) {
            Ok(points) => scaling_rows(&mut out, "multimode", &points),
            Err(e) => {
                let _ = writeln!(out, "multimode_fit,,,,,NaN,{}", status_of(&e));
            }
        }
    }
    out
}
