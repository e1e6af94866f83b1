use std::fs;
use std::path::Path;

use anyhow::Context;
use log::{info, warn};
use serde::Serialize;
use viscap::birman_schwinger::{bs_determinant, find_resonances};
use viscap::davies::{davies_csv, resolvent_norm, weighted_cap_resolvent_norm, DaviesRow};
use viscap::deformation::{
    check_admissible, min_distance, region_mesh, symbol, symbol_csv, symbol_region_margin, Admissibility, Region,
};
use viscap::cap_sweep::sweep_csv;
use viscap::{converged_estimates, factorize, run_sweep, Error, ResonanceEstimate, SweepResult, C64};

use crate::config::RunConfig;
use crate::json::{Cx, EstimateJson};
use crate::report::{compare_report, CompareReport};

/// Outcome of a command that ran to completion.
pub enum Outcome {
    Done,
    /// The compare count check failed; the report is on disk.
    CheckFailed,
}

pub(crate) fn write(out: &Path, name: &str, body: &str) -> anyhow::Result<()> {
    let p = out.join(name);
    fs::write(&p, body).with_context(|| format!("writing {}", p.display()))
}

pub(crate) fn write_json<T: Serialize>(out: &Path, name: &str, v: &T) -> anyhow::Result<()> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    write(out, name, &s)
}

#[derive(Serialize)]
struct ResonancesJson {
    epsilon_last: Option<f64>,
    cauchy_tol: f64,
    resonances: Vec<EstimateJson>,
    tracks: usize,
    orphans: usize,
    ray_discards: usize,
    failures: Vec<FailureJson>,
}

#[derive(Serialize)]
struct FailureJson {
    epsilon: f64,
    message: String,
}

#[derive(Serialize)]
struct OracleJson {
    grid: viscap::GridSpec,
    omega: viscap::RectangleOmega,
    resonances: Vec<OracleEntry>,
}

#[derive(Serialize)]
struct OracleEntry {
    #[serde(flatten)]
    estimate: EstimateJson,
    /// |D| at the reported zero.
    residual: f64,
}

fn sweep_stage(cfg: &RunConfig, out: &Path) -> anyhow::Result<SweepResult> {
    let sc = cfg.sweep_config()?;
    info!("sweep: {} on L={} N={}, schedule {:?}", sc.potential.name, cfg.grid.half_width, cfg.grid.size, sc.schedule());
    let r = run_sweep(&sc)?;
    if r.final_epsilon.is_none() {
        return Err(Error::NoConvergence { name: "P_eps".into(), order: cfg.grid.size, sweeps: r.failures.len() }.into());
    }
    for f in &r.failures {
        warn!("eps={:e}: {}", f.epsilon, f.message);
    }
    let est = converged_estimates(&r, cfg.tolerances.cauchy_tol);
    info!("sweep: {} tracks, {} converged, {} orphans", r.tracks.len(), est.len(), r.orphans.len());
    write(out, "sweep.csv", &sweep_csv(&r))?;
    write_json(
        out,
        "resonances.json",
        &ResonancesJson {
            epsilon_last: r.final_epsilon,
            cauchy_tol: cfg.tolerances.cauchy_tol,
            resonances: est.iter().map(EstimateJson::from).collect(),
            tracks: r.tracks.len(),
            orphans: r.orphans.len(),
            ray_discards: r.ray_discards,
            failures: r.failures.iter().map(|f| FailureJson { epsilon: f.epsilon, message: f.message.clone() }).collect(),
        },
    )?;
    Ok(r)
}

fn oracle_stage(cfg: &RunConfig, out: &Path) -> anyhow::Result<Vec<ResonanceEstimate>> {
    let p = cfg.potential.build()?;
    let g = cfg.bs_grid.build()?;
    let f = factorize(&p, &g);
    info!("oracle: {} on L={} N={}", p.name, g.half_width, g.size);
    let est = find_resonances(&cfg.omega, &g, &f, cfg.tolerances.newton_tol)?;
    let mut entries = Vec::with_capacity(est.len());
    for e in &est {
        let residual = bs_determinant(e.lambda, &g, &f)?.det_value.norm();
        info!("oracle: zero at {} (multiplicity {}, |D| = {:.2e})", e.lambda, e.multiplicity, residual);
        entries.push(OracleEntry { estimate: e.into(), residual });
    }
    write_json(out, "oracle.json", &OracleJson { grid: cfg.bs_grid, omega: cfg.omega, resonances: entries })?;
    Ok(est)
}

pub fn sweep(cfg: &RunConfig, out: &Path) -> anyhow::Result<Outcome> {
    sweep_stage(cfg, out)?;
    Ok(Outcome::Done)
}

pub fn oracle(cfg: &RunConfig, out: &Path) -> anyhow::Result<Outcome> {
    oracle_stage(cfg, out)?;
    Ok(Outcome::Done)
}

pub fn compare(cfg: &RunConfig, out: &Path) -> anyhow::Result<Outcome> {
    let r = sweep_stage(cfg, out)?;
    let oracle = oracle_stage(cfg, out)?;
    let rep: CompareReport = compare_report(&r.final_lambdas, r.final_epsilon, &oracle, cfg.tolerances.delta)?;
    for e in &rep.entries {
        info!("compare: oracle {:?} cap_count {} pass {}", e.oracle, e.cap_count, e.pass);
    }
    write_json(out, "compare_report.json", &rep)?;
    Ok(if rep.pass { Outcome::Done } else { Outcome::CheckFailed })
}

pub fn davies(cfg: &RunConfig, out: &Path) -> anyhow::Result<Outcome> {
    let d = &cfg.davies;
    let mut rows = Vec::new();
    let g = d.grid.build()?;
    let lambda: C64 = d.lambda.into();
    for &eps in &d.weighted_eps {
        let n = weighted_cap_resolvent_norm(eps, lambda, d.gamma_weight, &g)?;
        info!("davies: weighted eps={eps:e} norm={n:e}");
        rows.push(DaviesRow { epsilon: eps, z: lambda * lambda, norm: n.min(d.norm_cap), weighted: true, gamma_weight: d.gamma_weight });
    }
    let g = d.unweighted_grid.build()?;
    let z: C64 = d.unweighted_z.into();
    for &eps in &d.unweighted_eps {
        let n = match resolvent_norm(eps, z, &g) {
            Ok(n) => n,
            // Below the double-precision floor the norm is only known to exceed the cap.
            Err(Error::Singular { .. }) => f64::INFINITY,
            Err(e) => return Err(e.into()),
        };
        info!("davies: unweighted eps={eps:e} norm={n:e}");
        rows.push(DaviesRow { epsilon: eps, z, norm: n.min(d.norm_cap), weighted: false, gamma_weight: 0.0 });
    }
    write(out, "davies_sweep.csv", &davies_csv(&rows))?;
    Ok(Outcome::Done)
}

#[derive(Serialize)]
struct SectorMargin {
    theta: Cx,
    margin: f64,
}

#[derive(Serialize)]
struct OmegaMargin {
    omega: viscap::RectangleOmega,
    beta: f64,
    admissibility: Admissibility,
    /// Ellipticity margin at θ = -iβ; absent when Ω is not admissible.
    margin: Option<f64>,
    /// Distance from the scanned symbol values to the mesh of {λ²: λ ∈ Ω}.
    scan_distance: f64,
}

#[derive(Serialize)]
struct MarginReport {
    theta: Cx,
    h: f64,
    xi_max: f64,
    n: usize,
    gamma: f64,
    sector: Vec<SectorMargin>,
    omega: OmegaMargin,
    /// Every nonzero φ_θ(ξ)² on the scan has |arg| < π/4.
    phi_arg_ok: bool,
}

pub fn symbol_cmd(cfg: &RunConfig, out: &Path) -> anyhow::Result<Outcome> {
    let s = &cfg.symbol;
    let theta: C64 = s.theta.into();
    let spec = &s.spec;
    if !viscap::deformation::in_theta_domain(theta, spec.gamma) {
        return Err(Error::Domain(format!("theta = {theta} outside D_gamma (gamma = {})", spec.gamma)).into());
    }
    let axis = s.window.axis();
    let mut samples = Vec::with_capacity(axis.len() * axis.len());
    for &xi in &axis {
        for &xs in &axis {
            samples.push(symbol(xi, xs, theta, s.h, spec));
        }
    }
    write(out, "symbol_scan.csv", &symbol_csv(&samples, theta))?;

    let mut sector = Vec::new();
    for t in &s.sector_thetas {
        let th = C64::from(*t) * spec.gamma;
        let m = symbol_region_margin(th, &Region::BadSector, s.h, spec, &s.window)?;
        info!("symbol: bad-sector margin at theta={th} is {m:e}");
        sector.push(SectorMargin { theta: th.into(), margin: m });
    }
    let adm = check_admissible(&s.omega, s.beta, spec)?;
    let region = Region::Omega { omega: s.omega, beta: s.beta };
    let margin = if adm.pass {
        Some(symbol_region_margin(C64::new(0.0, -s.beta), &region, s.h, spec, &s.window)?)
    } else {
        warn!("symbol: omega not admissible at beta={} (margin {})", s.beta, adm.margin);
        None
    };
    let scan_distance = min_distance(&samples, &region_mesh(&region, &s.window));
    let quarter = std::f64::consts::FRAC_PI_4;
    let phi_arg_ok = axis.iter().filter(|&&x| x != 0.0).all(|&x| {
        let p = viscap::deformation::phi_theta(x, theta, spec);
        (p * p).arg().abs() < quarter
    });
    write_json(
        out,
        "margin_report.json",
        &MarginReport {
            theta: theta.into(),
            h: s.h,
            xi_max: s.window.xi_max,
            n: s.window.n,
            gamma: spec.gamma,
            sector,
            omega: OmegaMargin { omega: s.omega, beta: s.beta, admissibility: adm, margin, scan_distance },
            phi_arg_ok,
        },
    )?;
    Ok(Outcome::Done)
}

