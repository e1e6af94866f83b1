//! The viscosity limit: eigenvalues of `P_ε` tracked through a decreasing
//! ε schedule.

use crate::assembly::{cap_matrix, Grid1D, GridSpec};
use crate::eig::{eigenvalues_named, sector_images, RectangleOmega};
use crate::potentials::Potential;
use crate::{Error, Result, C64};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Method {
    Cap,
    Bs,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResonanceEstimate {
    pub lambda: C64,
    pub multiplicity: usize,
    pub method: Method,
    pub epsilon: Option<f64>,
    pub error_estimate: f64,
}

#[derive(Clone, Debug)]
pub struct SweepConfig {
    pub potential: Potential,
    pub grid: GridSpec,
    pub omega: RectangleOmega,
    pub eps_start: f64,
    pub eps_ratio: f64,
    pub eps_count: usize,
    pub track_radius: f64,
    pub cauchy_tol: f64,
}

impl SweepConfig {
    /// Geometric schedule `eps_start · ratio^k`; default ratio 10^{-1/2}.
    pub fn schedule(&self) -> Vec<f64> {
        geometric_schedule(self.eps_start, self.eps_ratio, self.eps_count)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps_start > 0.0 && self.eps_start.is_finite()) {
            return Err(Error::Config(format!("eps_start must be positive, got {}", self.eps_start)));
        }
        if !(self.eps_ratio > 0.0 && self.eps_ratio < 1.0) {
            return Err(Error::Config(format!("eps_ratio must lie in (0,1), got {}", self.eps_ratio)));
        }
        if self.eps_count < 2 {
            return Err(Error::Config("eps_count must be at least 2".into()));
        }
        if !(self.track_radius > 0.0) {
            return Err(Error::Config("track_radius must be positive".into()));
        }
        if !(self.cauchy_tol > 0.0) {
            return Err(Error::Config("cauchy_tol must be positive".into()));
        }
        self.grid.build()?;
        self.omega.validate(self.potential.envelope_gamma)
    }
}

pub fn geometric_schedule(start: f64, ratio: f64, count: usize) -> Vec<f64> {
    (0..count).map(|k| start * ratio.powi(k as i32)).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct Track {
    pub id: usize,
    /// (ε, λ) in schedule order.
    pub points: Vec<(f64, C64)>,
}

impl Track {
    pub fn last(&self) -> (f64, C64) {
        *self.points.last().expect("tracks are never empty")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OrphanKind {
    Entered,
    Left,
}

/// A track that starts after the first or ends before the last ε.
#[derive(Clone, Debug, PartialEq)]
pub struct Orphan {
    pub track_id: usize,
    pub epsilon: f64,
    pub lambda: C64,
    pub kind: OrphanKind,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepFailure {
    pub epsilon: f64,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct SweepResult {
    pub schedule: Vec<f64>,
    pub tracks: Vec<Track>,
    pub orphans: Vec<Orphan>,
    pub failures: Vec<SweepFailure>,
    /// All Ω images at the last successfully solved ε.
    pub final_lambdas: Vec<C64>,
    pub final_epsilon: Option<f64>,
    /// Eigenvalues discarded on the Davies ray, summed over the schedule.
    pub ray_discards: usize,
}

/// Greedy nearest-neighbour pairing; returns (prev index, next index).
pub fn match_tracks(prev: &[C64], next: &[C64], radius: f64) -> Vec<(usize, usize)> {
    let mut cand: Vec<(f64, usize, usize)> = Vec::new();
    for (i, a) in prev.iter().enumerate() {
        for (j, b) in next.iter().enumerate() {
            let d = (a - b).norm();
            if d < radius {
                cand.push((d, i, j));
            }
        }
    }
    cand.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
    let mut used_prev = vec![false; prev.len()];
    let mut used_next = vec![false; next.len()];
    let mut out = Vec::new();
    for (_, i, j) in cand {
        if !used_prev[i] && !used_next[j] {
            used_prev[i] = true;
            used_next[j] = true;
            out.push((i, j));
        }
    }
    out.sort_unstable();
    out
}

pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepResult> {
    cfg.validate()?;
    let grid: Grid1D = cfg.grid.build()?;
    let schedule = cfg.schedule();
    run_sweep_with(&schedule, &cfg.omega, cfg.track_radius, |eps| {
        let a = cap_matrix(&grid, &cfg.potential, eps)?;
        Ok(eigenvalues_named(&a, &format!("P_eps(eps={eps:e})"))?.eigenvalues)
    })
}

/// Sweep driver over an arbitrary spectrum source `z(ε)`.
pub fn run_sweep_with<F>(schedule: &[f64], omega: &RectangleOmega, radius: f64, mut spectrum: F) -> Result<SweepResult>
where
    F: FnMut(f64) -> Result<Vec<C64>>,
{
    if schedule.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::Config("epsilon schedule must be strictly decreasing".into()));
    }
    let mut res = SweepResult { schedule: schedule.to_vec(), ..Default::default() };
    // Indices into res.tracks alive after the previous solved step.
    let mut active: Vec<usize> = Vec::new();
    let mut solved_any = false;
    for &eps in schedule {
        let z = match spectrum(eps) {
            Ok(z) => z,
            Err(e) if e.is_validation() => return Err(e),
            Err(e) => {
                log::warn!("eigensolve failed at eps={eps:e}: {e}");
                res.failures.push(SweepFailure { epsilon: eps, message: e.to_string() });
                continue;
            }
        };
        let images = sector_images(&z, omega);
        res.ray_discards += images.on_ray.len();
        let next = images.inside;
        let prev: Vec<C64> = active.iter().map(|&t| res.tracks[t].last().1).collect();
        let pairs = match_tracks(&prev, &next, radius);
        let mut matched_next = vec![false; next.len()];
        let mut still = Vec::new();
        for &(i, j) in &pairs {
            let t = active[i];
            res.tracks[t].points.push((eps, next[j]));
            matched_next[j] = true;
            still.push(t);
        }
        for (i, &t) in active.iter().enumerate() {
            if !pairs.iter().any(|&(pi, _)| pi == i) {
                let (e_last, l_last) = res.tracks[t].last();
                res.orphans.push(Orphan { track_id: res.tracks[t].id, epsilon: e_last, lambda: l_last, kind: OrphanKind::Left });
            }
        }
        for (j, &l) in next.iter().enumerate() {
            if matched_next[j] {
                continue;
            }
            let id = res.tracks.len();
            res.tracks.push(Track { id, points: vec![(eps, l)] });
            if solved_any {
                res.orphans.push(Orphan { track_id: id, epsilon: eps, lambda: l, kind: OrphanKind::Entered });
            }
            still.push(id);
        }
        still.sort_unstable();
        active = still;
        solved_any = true;
        res.final_lambdas = next;
        res.final_epsilon = Some(eps);
    }
    Ok(res)
}

/// Tracks alive at the last solved ε whose last step moved less than `tol`;
/// coincident tracks merge into one estimate with multiplicity.
pub fn converged_estimates(r: &SweepResult, tol: f64) -> Vec<ResonanceEstimate> {
    let mut cands: Vec<ResonanceEstimate> = Vec::new();
    for t in &r.tracks {
        let n = t.points.len();
        if n < 2 {
            continue;
        }
        let (eps, l) = t.points[n - 1];
        if Some(eps) != r.final_epsilon {
            continue;
        }
        let step = (l - t.points[n - 2].1).norm();
        if step < tol {
            cands.push(ResonanceEstimate {
                lambda: l,
                multiplicity: 1,
                method: Method::Cap,
                epsilon: Some(eps),
                error_estimate: step,
            });
        }
    }
    let mut out: Vec<ResonanceEstimate> = Vec::new();
    for c in cands {
        if let Some(o) = out.iter_mut().find(|o| (o.lambda - c.lambda).norm() < tol) {
            o.multiplicity += 1;
            o.error_estimate = o.error_estimate.max(c.error_estimate);
        } else {
            out.push(c);
        }
    }
    out
}

/// `epsilon,track_id,re_lambda,im_lambda,re_z,im_z`
pub fn sweep_csv(r: &SweepResult) -> String {
    let mut rows: Vec<(usize, usize, f64, C64)> = Vec::new();
    for t in &r.tracks {
        for &(eps, l) in &t.points {
            let k = r.schedule.iter().position(|&e| e == eps).unwrap_or(usize::MAX);
            rows.push((k, t.id, eps, l));
        }
    }
    rows.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut s = String::from("epsilon,track_id,re_lambda,im_lambda,re_z,im_z\n");
    for (_, id, eps, l) in rows {
        let z = l * l;
        s.push_str(&format!("{eps:e},{id},{:e},{:e},{:e},{:e}\n", l.re, l.im, z.re, z.im));
    }
    s
}
