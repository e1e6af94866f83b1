//! Birman–Schwinger determinant `D(λ) = det(I + vR₀(λ)w)`: continuation,
//! zero finding, contour multiplicities, and the CAP-regularized variant.
//!
//! The default Nyström rule is band-limited. The kernel `(i/2λ)e^{iλ|x-y|}`
//! has a derivative jump on the diagonal, so plain sampling converges only
//! like h². Projecting the free resolvent onto wavenumbers below the grid
//! Nyquist frequency Ω = π/h gives a Toeplitz kernel whose missing
//! high-frequency part contributes only to `log det` at leading orders; those
//! terms are restored analytically, which leaves an O(h⁵) error for smooth V.

use crate::assembly::{laplacian_matrix, Grid1D};
use crate::cap_sweep::{Method, ResonanceEstimate};
use crate::eig::{largest_singular_value, sqrt_sector, RectangleOmega};
use crate::linalg::{CMatrix, Lu};
use crate::potentials::Factorization;
use crate::special::exp_e1;
use crate::{eigenvalues, Error, Result, C64};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::f64::consts::PI;

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Step of the central-difference derivative in ζ.
pub const DERIVATIVE_STEP: f64 = 1e-6;
/// Subdivision stops at this rectangle diameter.
pub const MIN_DIAMETER: f64 = 1e-2;
pub const DEFAULT_NODES: usize = 64;

/// `k₀(λ; x, y) = (i/2λ) e^{iλ|x-y|}`
pub fn free_kernel(lambda: C64, x: f64, y: f64) -> Result<C64> {
    if lambda == C64::new(0.0, 0.0) {
        return Err(Error::Domain("free resolvent kernel is singular at lambda = 0".into()));
    }
    Ok(I / (2.0 * lambda) * (I * lambda * (x - y).abs()).exp())
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NystromRule {
    /// `K_ij = v_i k₀(x_i, x_j) w_j h`
    Plain,
    #[default]
    BandLimited,
}

#[derive(Clone, Debug)]
pub struct BsMatrix {
    pub lambda: C64,
    pub matrix: CMatrix,
    /// Analytic high-frequency part of `log D`; zero for the plain rule.
    pub log_correction: C64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DeterminantTrace {
    pub lambda: C64,
    pub det_value: C64,
    /// `log D` with the argument accumulated pivot by pivot.
    pub log_det: C64,
}

/// Σ_k coef(k) q^k, summed to convergence (|q| ≤ 1/4 by precondition).
fn power_series(q: C64, coef: impl Fn(usize) -> f64) -> C64 {
    let mut s = C64::new(0.0, 0.0);
    let mut t = C64::new(1.0, 0.0);
    for k in 0..400 {
        let add = t * coef(k);
        s += add;
        if add.norm() < 1e-18 * s.norm() {
            break;
        }
        t *= q;
    }
    s
}

/// Largest |λ| accepted by the band-limited rule, as a fraction of π/h.
pub const BAND_FRACTION: f64 = 0.5;

fn check_band(lambda: C64, g: &Grid1D) -> Result<f64> {
    let om = g.nyquist();
    if lambda.norm() >= BAND_FRACTION * om {
        return Err(Error::Domain(format!(
            "|lambda| = {} exceeds the resolved band {} of this grid",
            lambda.norm(),
            BAND_FRACTION * om
        )));
    }
    Ok(om)
}

/// Toeplitz symbol `T_m`, m = 0..N-1, so that `K_ij = v_i T_|i-j| w_j`.
fn toeplitz_symbol(lambda: C64, g: &Grid1D, rule: NystromRule) -> Result<Vec<C64>> {
    if lambda == C64::new(0.0, 0.0) {
        return Err(Error::Domain("Birman-Schwinger matrix is singular at lambda = 0".into()));
    }
    let h = g.h;
    let n = g.size;
    let pref = I / (2.0 * lambda);
    let free = |m: usize| pref * (I * lambda * (m as f64 * h)).exp();
    match rule {
        NystromRule::Plain => Ok((0..n).map(|m| h * free(m)).collect()),
        NystromRule::BandLimited => {
            let om = check_band(lambda, g)?;
            let q = (lambda / om).powu(2);
            let f = power_series(q, |k| 1.0 / (2 * k + 1) as f64) / om;
            let mut t = Vec::with_capacity(n);
            t.push(h * (pref - f / PI));
            for m in 1..n {
                let d = m as f64 * h;
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                // ∫_Ω^∞ cos(ξd)/(ξ - c) dξ through e^z E₁(z)
                let tail_int = |c: C64| {
                    let w = d * (om - c);
                    0.5 * sign * (exp_e1(-I * w) + exp_e1(I * w))
                };
                let tail = (tail_int(lambda) - tail_int(-lambda)) / (2.0 * PI * lambda);
                t.push(h * (free(m) - tail));
            }
            Ok(t)
        }
    }
}

fn log_correction(lambda: C64, g: &Grid1D, f: &Factorization, rule: NystromRule) -> Result<C64> {
    if rule == NystromRule::Plain {
        return Ok(C64::new(0.0, 0.0));
    }
    let om = check_band(lambda, g)?;
    let q = (lambda / om).powu(2);
    let vals = f.potential_values();
    let int_v: f64 = g.h * vals.iter().sum::<f64>();
    let int_v2: f64 = g.h * vals.iter().map(|v| v * v).sum::<f64>();
    let big_f = power_series(q, |k| 1.0 / (2 * k + 1) as f64) / om;
    let a1 = power_series(q, |k| 1.0 / (2 * k + 3) as f64) / om.powi(3);
    let a2 = power_series(q, |k| (k + 1) as f64 / (2 * k + 3) as f64) / om.powi(3);
    Ok(big_f / PI * int_v - int_v2 / PI * (a1 - 0.5 * a2))
}

pub fn bs_matrix(lambda: C64, g: &Grid1D, f: &Factorization) -> Result<BsMatrix> {
    bs_matrix_with(lambda, g, f, NystromRule::default())
}

pub fn bs_matrix_with(lambda: C64, g: &Grid1D, f: &Factorization, rule: NystromRule) -> Result<BsMatrix> {
    let t = toeplitz_symbol(lambda, g, rule)?;
    let matrix = CMatrix::from_fn(g.size, |i, j| f.v[i] * t[i.abs_diff(j)] * f.w[j]);
    Ok(BsMatrix { lambda, matrix, log_correction: log_correction(lambda, g, f, rule)? })
}

fn determinant_of(k: &BsMatrix) -> DeterminantTrace {
    let mut a = k.matrix.clone();
    a.shift(C64::new(1.0, 0.0));
    let lu = Lu::new(&a);
    let log_det = lu.log_det() + k.log_correction;
    let (m, e) = lu.det_scaled();
    let det_value = m * k.log_correction.exp() * 2f64.powi(e);
    DeterminantTrace { lambda: k.lambda, det_value, log_det }
}

pub fn bs_determinant(lambda: C64, g: &Grid1D, f: &Factorization) -> Result<DeterminantTrace> {
    bs_determinant_with(lambda, g, f, NystromRule::default())
}

pub fn bs_determinant_with(lambda: C64, g: &Grid1D, f: &Factorization, rule: NystromRule) -> Result<DeterminantTrace> {
    if f.is_zero() {
        if lambda == C64::new(0.0, 0.0) {
            return Err(Error::Domain("Birman-Schwinger matrix is singular at lambda = 0".into()));
        }
        let one = C64::new(1.0, 0.0);
        return Ok(DeterminantTrace { lambda, det_value: one, log_det: C64::new(0.0, 0.0) });
    }
    Ok(determinant_of(&bs_matrix_with(lambda, g, f, rule)?))
}

/// Memoized `D(λ)` for one grid and factorization.
pub struct Determinant<'a> {
    pub grid: &'a Grid1D,
    pub fact: &'a Factorization,
    pub rule: NystromRule,
    cache: HashMap<(u64, u64), C64>,
    pub evaluations: usize,
}

impl<'a> Determinant<'a> {
    pub fn new(grid: &'a Grid1D, fact: &'a Factorization) -> Self {
        Determinant { grid, fact, rule: NystromRule::default(), cache: HashMap::new(), evaluations: 0 }
    }

    pub fn with_rule(mut self, rule: NystromRule) -> Self {
        self.rule = rule;
        self
    }

    pub fn eval(&mut self, lambda: C64) -> Result<C64> {
        let key = (lambda.re.to_bits(), lambda.im.to_bits());
        if let Some(&d) = self.cache.get(&key) {
            return Ok(d);
        }
        let d = bs_determinant_with(lambda, self.grid, self.fact, self.rule)?.det_value;
        if !(d.re.is_finite() && d.im.is_finite()) {
            return Err(Error::Domain(format!("D({lambda}) overflowed")));
        }
        self.evaluations += 1;
        self.cache.insert(key, d);
        Ok(d)
    }

    pub fn derivative(&mut self, lambda: C64) -> Result<C64> {
        let h = DERIVATIVE_STEP;
        Ok((self.eval(lambda + h)? - self.eval(lambda - h)?) / (2.0 * h))
    }
}

/// Principal argument increment of `b/a` in (-π, π].
fn arg_step(a: C64, b: C64) -> f64 {
    (b / a).arg()
}

/// Winding number of `f` along the closed polygon through `verts`, with
/// adaptive refinement so that no sampled step turns by more than π/4.
fn polygon_winding(
    verts: &[C64],
    f: &mut dyn FnMut(C64) -> Result<C64>,
    zero_floor: f64,
) -> Result<(i64, f64)> {
    let mut total = 0.0;
    let mut min_abs = f64::INFINITY;
    for k in 0..verts.len() {
        let a = verts[k];
        let b = verts[(k + 1) % verts.len()];
        let pieces = ((b - a).norm() / 0.05).ceil().max(4.0) as usize;
        let mut prev_z = a;
        let mut prev_f = f(a)?;
        min_abs = min_abs.min(prev_f.norm());
        for p in 1..=pieces {
            let z = a + (b - a) * (p as f64 / pieces as f64);
            let fz = f(z)?;
            total += refine(prev_z, prev_f, z, fz, f, 0, &mut min_abs)?;
            prev_z = z;
            prev_f = fz;
        }
    }
    if min_abs <= zero_floor {
        return Err(Error::Contour(format!("|D| = {min_abs:e} on the contour; a zero sits on it")));
    }
    let w = total / (2.0 * PI);
    Ok((w.round() as i64, min_abs))
}

fn refine(
    za: C64,
    fa: C64,
    zb: C64,
    fb: C64,
    f: &mut dyn FnMut(C64) -> Result<C64>,
    depth: usize,
    min_abs: &mut f64,
) -> Result<f64> {
    let step = arg_step(fa, fb);
    if step.abs() <= PI / 4.0 {
        return Ok(step);
    }
    if depth >= 24 {
        return Err(Error::Contour(format!("argument unresolved between {za} and {zb}")));
    }
    let zm = 0.5 * (za + zb);
    let fm = f(zm)?;
    *min_abs = min_abs.min(fm.norm());
    Ok(refine(za, fa, zm, fm, f, depth + 1, min_abs)? + refine(zm, fm, zb, fb, f, depth + 1, min_abs)?)
}

#[derive(Clone, Copy, Debug)]
struct Rect {
    re0: f64,
    re1: f64,
    im0: f64,
    im1: f64,
}

impl Rect {
    fn verts(&self) -> [C64; 4] {
        [
            C64::new(self.re0, self.im0),
            C64::new(self.re1, self.im0),
            C64::new(self.re1, self.im1),
            C64::new(self.re0, self.im1),
        ]
    }
    fn diameter(&self) -> f64 {
        (self.re1 - self.re0).hypot(self.im1 - self.im0)
    }
    fn center(&self) -> C64 {
        C64::new(0.5 * (self.re0 + self.re1), 0.5 * (self.im0 + self.im1))
    }
    fn contains(&self, z: C64, slack: f64) -> bool {
        z.re >= self.re0 - slack && z.re <= self.re1 + slack && z.im >= self.im0 - slack && z.im <= self.im1 + slack
    }
    fn split(&self, t: f64) -> [Rect; 4] {
        let rm = self.re0 + t * (self.re1 - self.re0);
        let im = self.im0 + t * (self.im1 - self.im0);
        [
            Rect { re0: self.re0, re1: rm, im0: self.im0, im1: im },
            Rect { re0: rm, re1: self.re1, im0: self.im0, im1: im },
            Rect { re0: self.re0, re1: rm, im0: im, im1: self.im1 },
            Rect { re0: rm, re1: self.re1, im0: im, im1: self.im1 },
        ]
    }
    fn describe(&self) -> String {
        format!("({}, {}) + i({}, {})", self.re0, self.re1, self.im0, self.im1)
    }
}

struct Finder<'a, 'b> {
    det: &'b mut Determinant<'a>,
    target: f64,
    zero_floor: f64,
    found: Vec<ResonanceEstimate>,
}

impl Finder<'_, '_> {
    fn count(&mut self, r: &Rect) -> Result<i64> {
        let det = &mut *self.det;
        let mut f = |z: C64| det.eval(z);
        Ok(polygon_winding(&r.verts(), &mut f, self.zero_floor)?.0)
    }

    fn newton(&mut self, start: C64) -> Result<Option<(C64, f64)>> {
        let mut z = start;
        for _ in 0..60 {
            let d = self.det.eval(z)?;
            let dp = self.det.derivative(z)?;
            if dp == C64::new(0.0, 0.0) {
                return Ok(None);
            }
            let step = d / dp;
            z -= step;
            if !(z.re.is_finite() && z.im.is_finite()) {
                return Ok(None);
            }
            if step.norm() < 1e-13 * z.norm().max(1.0) {
                break;
            }
        }
        let d = self.det.eval(z)?;
        let dp = self.det.derivative(z)?;
        if d.norm() <= self.target {
            Ok(Some((z, (d / dp).norm())))
        } else {
            Ok(None)
        }
    }

    fn resolve(&mut self, r: Rect, count: i64) -> Result<()> {
        if count == 0 {
            return Ok(());
        }
        if count < 0 {
            return Err(Error::Unresolved(format!("negative winding {count} on {}", r.describe())));
        }
        let small = r.diameter() <= MIN_DIAMETER;
        if count == 1 || small {
            if let Some((z, err)) = self.newton(r.center())? {
                if r.contains(z, 1e-9) {
                    self.found.push(ResonanceEstimate {
                        lambda: z,
                        multiplicity: count as usize,
                        method: Method::Bs,
                        epsilon: None,
                        error_estimate: err,
                    });
                    return Ok(());
                }
            }
            if small {
                return Err(Error::Unresolved(format!(
                    "{count} zero(s) in {} but Newton did not converge inside it",
                    r.describe()
                )));
            }
        }
        for t in [0.5 + 1.0 / 64.0, 0.5 - 3.0 / 128.0] {
            let kids = r.split(t);
            let counts = kids.iter().map(|k| self.count(k)).collect::<Result<Vec<_>>>()?;
            if counts.iter().sum::<i64>() == count {
                for (k, c) in kids.into_iter().zip(counts) {
                    self.resolve(k, c)?;
                }
                return Ok(());
            }
        }
        Err(Error::Unresolved(format!("child windings do not add up on {}", r.describe())))
    }
}

/// All zeros of `D` inside Ω, with multiplicities from the winding counts.
pub fn find_resonances(omega: &RectangleOmega, g: &Grid1D, f: &Factorization, tol: f64) -> Result<Vec<ResonanceEstimate>> {
    let mut det = Determinant::new(g, f);
    find_resonances_with(omega, &mut det, tol)
}

pub fn find_resonances_with(omega: &RectangleOmega, det: &mut Determinant<'_>, tol: f64) -> Result<Vec<ResonanceEstimate>> {
    omega.validate_shape()?;
    if !(tol > 0.0) {
        return Err(Error::Config("tolerance must be positive".into()));
    }
    if det.fact.is_zero() {
        return Ok(Vec::new());
    }
    let rect = Rect { re0: omega.a_lo, re1: omega.a_hi, im0: -omega.gamma_lo, im1: omega.b_hi };
    // Scale of D on the boundary sets the Newton target.
    let mut scale: f64 = 1.0;
    for z in rect.verts() {
        scale = scale.max(det.eval(z)?.norm());
    }
    let mut finder = Finder { det, target: tol * scale, zero_floor: 1e-13 * scale, found: Vec::new() };
    let total = finder.count(&rect)?;
    finder.resolve(rect, total)?;
    let mut found = finder.found;
    found.sort_by(|a, b| a.lambda.re.total_cmp(&b.lambda.re).then(a.lambda.im.total_cmp(&b.lambda.im)));
    Ok(found)
}

fn circle_nodes(center: C64, r: f64, m: usize) -> Vec<C64> {
    (0..m).map(|k| center + C64::from_polar(r, 2.0 * PI * k as f64 / m as f64)).collect()
}

fn closed_winding(vals: &[C64]) -> f64 {
    let m = vals.len();
    (0..m).map(|k| arg_step(vals[k], vals[(k + 1) % m])).sum::<f64>() / (2.0 * PI)
}

fn max_arg_step(vals: &[C64]) -> f64 {
    let m = vals.len();
    (0..m).map(|k| arg_step(vals[k], vals[(k + 1) % m]).abs()).fold(0.0, f64::max)
}

/// `tr((I+K)^{-1} ∂K)` plus `det(I+K)` at one node, ∂K by central differences.
fn trace_node(k0: &CMatrix, kp: &CMatrix, km: &CMatrix) -> (C64, Lu) {
    let n = k0.order();
    let mut a = k0.clone();
    a.shift(C64::new(1.0, 0.0));
    let lu = Lu::new(&a);
    let inv = lu.inverse();
    let scale = 1.0 / (2.0 * DERIVATIVE_STEP);
    let mut tr = C64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            tr += inv[(i, j)] * (kp[(j, i)] - km[(j, i)]);
        }
    }
    (tr * scale, lu)
}

#[derive(Clone, Debug, PartialEq)]
pub struct MultiplicityReport {
    /// Trapezoidal value of `(1/2πi) tr ∮ (I+K)^{-1} ∂K dζ`.
    pub trace_value: C64,
    pub trace_count: usize,
    pub winding_count: usize,
    pub nodes: usize,
    pub min_abs_det: f64,
}

/// Contour count around `|ζ - λ₀| = r`, by the trace formula and by winding.
pub fn multiplicity_report(lambda0: C64, r: f64, g: &Grid1D, f: &Factorization, nodes: usize) -> Result<MultiplicityReport> {
    contour_report(lambda0, r, nodes, |z| {
        let b = bs_matrix(z, g, f)?;
        Ok((b.matrix, b.log_correction))
    })
}

fn contour_report(
    lambda0: C64,
    r: f64,
    nodes: usize,
    mut kfun: impl FnMut(C64) -> Result<(CMatrix, C64)>,
) -> Result<MultiplicityReport> {
    if !(r > 0.0) {
        return Err(Error::Config("contour radius must be positive".into()));
    }
    let mut m = nodes.max(8);
    let mut attempts = 0;
    loop {
        let zs = circle_nodes(lambda0, r, m);
        let mut integrand = C64::new(0.0, 0.0);
        let mut dets = Vec::with_capacity(m);
        let mut det_scale: f64 = 0.0;
        for &z in &zs {
            let (k0, corr) = kfun(z)?;
            let (kp, _) = kfun(z + DERIVATIVE_STEP)?;
            let (km, _) = kfun(z - DERIVATIVE_STEP)?;
            let (tr, lu) = trace_node(&k0, &kp, &km);
            integrand += tr * (z - lambda0);
            let d = lu.log_det() + corr;
            det_scale = det_scale.max(d.re);
            dets.push(d);
        }
        // Compare magnitudes through logs; keep only the phase for winding.
        let vals: Vec<C64> = dets.iter().map(|d| C64::from_polar((d.re - det_scale).exp(), d.im)).collect();
        let min_abs = vals.iter().map(|v| v.norm()).fold(f64::INFINITY, f64::min) * det_scale.exp();
        if min_abs <= 1e-12 * det_scale.exp().max(1.0) {
            return Err(Error::Contour(format!(
                "|D| = {min_abs:e} on the circle |z - ({lambda0})| = {r}; move the contour"
            )));
        }
        let trace_value = integrand / m as f64;
        let defect = (trace_value.re - trace_value.re.round()).abs().max(trace_value.im.abs());
        let arg_ok = max_arg_step(&vals) < PI / 2.0;
        if defect <= 0.1 && arg_ok {
            let tc = trace_value.re.round();
            let wc = closed_winding(&vals).round();
            if tc < 0.0 || wc < 0.0 {
                return Err(Error::Contour(format!("negative count trace={tc} winding={wc}")));
            }
            return Ok(MultiplicityReport {
                trace_value,
                trace_count: tc as usize,
                winding_count: wc as usize,
                nodes: m,
                min_abs_det: min_abs,
            });
        }
        attempts += 1;
        if attempts > 3 {
            return Err(Error::Contour(format!(
                "trace integral {trace_value} not integral within 0.1 after {m} nodes"
            )));
        }
        m *= 2;
    }
}

/// Number of zeros of `D` inside `|ζ - λ₀| < r`; both evaluation routes must agree.
pub fn multiplicity(lambda0: C64, r: f64, g: &Grid1D, f: &Factorization) -> Result<usize> {
    let rep = multiplicity_report(lambda0, r, g, f, DEFAULT_NODES)?;
    if rep.trace_count != rep.winding_count {
        return Err(Error::Discrepancy(format!(
            "trace formula gives {} but winding gives {}",
            rep.trace_count, rep.winding_count
        )));
    }
    Ok(rep.trace_count)
}

/// Winding of `D` via the trapezoidal rule for `(1/2πi)∮ D'/D dζ`; not rounded.
pub fn winding_quadrature(lambda0: C64, r: f64, nodes: usize, g: &Grid1D, f: &Factorization) -> Result<f64> {
    let mut det = Determinant::new(g, f);
    let mut s = C64::new(0.0, 0.0);
    for z in circle_nodes(lambda0, r, nodes) {
        s += det.derivative(z)? / det.eval(z)? * (z - lambda0);
    }
    Ok((s / nodes as f64).re)
}

fn free_cap_operator(eps: f64, g: &Grid1D) -> CMatrix {
    let mut a = laplacian_matrix(g);
    a.add_diag(g.points.iter().map(|&x| C64::new(0.0, -eps * x * x)));
    a
}

/// Rough σ_min from a few inverse-iteration steps on AᴴA (an upper bound).
fn sigma_min_estimate(lu: &Lu) -> f64 {
    let n = lu.order();
    let mut x: Vec<C64> = (0..n).map(|i| C64::new(1.0 + (i % 7) as f64 * 0.1, 0.3 * (i % 3) as f64)).collect();
    let mut est = 0.0;
    for _ in 0..6 {
        let nx = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        x.iter_mut().for_each(|z| *z /= nx);
        let y = lu.solve_adjoint(&x);
        let z = lu.solve(&y);
        est = z.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        x = z;
    }
    1.0 / est.sqrt()
}

/// Relative σ_min below which `H_{-iε} - λ²` counts as singular.
pub const RESOLVENT_GUARD: f64 = 1e-12;

/// `K_ε(λ) = diag(v) (H_{-iε} - λ²)^{-1} diag(w)`. The discrete inverse
/// already carries the quadrature weight.
pub fn regularized_bs_matrix(lambda: C64, eps: f64, g: &Grid1D, f: &Factorization) -> Result<CMatrix> {
    if !(eps >= 0.0) {
        return Err(Error::Config(format!("eps must be nonnegative, got {eps}")));
    }
    let mut a = free_cap_operator(eps, g);
    a.shift(-lambda * lambda);
    let scale = a.max_abs();
    let lu = Lu::new(&a);
    let s = if lu.is_singular() { 0.0 } else { sigma_min_estimate(&lu) };
    if !(s > RESOLVENT_GUARD * scale) {
        return Err(Error::Singular { context: format!("H_(-i{eps:e}) - lambda^2 at lambda={lambda}"), sigma_min: s });
    }
    let r = lu.inverse();
    let v: Vec<C64> = f.v.iter().map(|&x| C64::new(x, 0.0)).collect();
    let w: Vec<C64> = f.w.iter().map(|&x| C64::new(x, 0.0)).collect();
    Ok(r.scale_rows_cols(&v, &w))
}

#[derive(Clone, Debug, PartialEq)]
pub struct EpsMultiplicityReport {
    pub contour: MultiplicityReport,
    /// Eigenvalues of the discretized `P_ε` whose sector image lies in the disc.
    pub eigen_count: usize,
    /// Same count for the free operator `-Δ - iεx²`.
    pub free_eigen_count: usize,
}

/// Images of the eigenvalues of `A` inside the open disc `|λ - λ₀| < r`.
fn disc_count(a: &CMatrix, lambda0: C64, r: f64, name: &str) -> Result<usize> {
    let spec = crate::eig::eigenvalues_named(a, name)?;
    Ok(spec
        .eigenvalues
        .iter()
        .filter_map(|&z| sqrt_sector(z).ok())
        .filter(|l| (l - lambda0).norm() < r)
        .count())
}

pub fn multiplicity_eps_report(
    lambda0: C64,
    r: f64,
    eps: f64,
    g: &Grid1D,
    f: &Factorization,
    nodes: usize,
) -> Result<EpsMultiplicityReport> {
    let contour = contour_report(lambda0, r, nodes, |z| Ok((regularized_bs_matrix(z, eps, g, f)?, C64::new(0.0, 0.0))))?;
    let free = free_cap_operator(eps, g);
    let mut p = free.clone();
    p.add_diag(f.potential_values().into_iter().map(|v| C64::new(v, 0.0)));
    let eigen_count = disc_count(&p, lambda0, r, "P_eps")?;
    let free_eigen_count = disc_count(&free, lambda0, r, "H_eps")?;
    Ok(EpsMultiplicityReport { contour, eigen_count, free_eigen_count })
}

/// `m_ε(λ₀)` from the regularized contour; errors unless it equals the
/// direct eigenvalue count of `P_ε` in the same disc.
pub fn multiplicity_eps(lambda0: C64, r: f64, eps: f64, g: &Grid1D, f: &Factorization) -> Result<usize> {
    let rep = multiplicity_eps_report(lambda0, r, eps, g, f, DEFAULT_NODES)?;
    let c = &rep.contour;
    if c.trace_count != c.winding_count || c.trace_count != rep.eigen_count {
        return Err(Error::Discrepancy(format!(
            "m_eps: trace {} winding {} eigenvalue count {} (free operator count {})",
            c.trace_count, c.winding_count, rep.eigen_count, rep.free_eigen_count
        )));
    }
    Ok(c.trace_count)
}

/// `‖e^{-c|x|} R₀(λ) e^{-c|x|}‖` from the plain Nyström matrix.
pub fn weighted_free_resolvent_norm(lambda: C64, c: f64, g: &Grid1D) -> Result<f64> {
    const MARGIN: f64 = 1e-3;
    if lambda == C64::new(0.0, 0.0) || !(lambda.re > 0.0) || !(lambda.im > -c + MARGIN) {
        return Err(Error::Domain(format!(
            "weighted free resolvent needs Re lambda > 0 and Im lambda > -c, got lambda={lambda}, c={c}"
        )));
    }
    let wgt: Vec<f64> = g.points.iter().map(|&x| (-c * x.abs()).exp()).collect();
    let pref = I / (2.0 * lambda);
    let m = CMatrix::from_fn(g.size, |i, j| {
        let d = (g.points[i] - g.points[j]).abs();
        wgt[i] * pref * (I * lambda * d).exp() * wgt[j] * g.h
    });
    Ok(largest_singular_value(&m))
}

/// Determinant samples on a mesh, for plotting.
pub fn determinant_scan(omega: &RectangleOmega, nre: usize, nim: usize, g: &Grid1D, f: &Factorization) -> Result<Vec<(C64, C64)>> {
    let mut out = Vec::with_capacity(nre * nim);
    for a in 0..nim {
        let y = -omega.gamma_lo + (omega.b_hi + omega.gamma_lo) * a as f64 / (nim.max(2) - 1) as f64;
        for b in 0..nre {
            let x = omega.a_lo + (omega.a_hi - omega.a_lo) * b as f64 / (nre.max(2) - 1) as f64;
            let z = C64::new(x, y);
            out.push((z, bs_determinant(z, g, f)?.det_value));
        }
    }
    Ok(out)
}

/// Eigenvalues of `I + K(λ)` closest to zero signal a nearby resonance;
/// exposed for diagnostics.
pub fn bs_spectrum(lambda: C64, g: &Grid1D, f: &Factorization) -> Result<Vec<C64>> {
    let mut k = bs_matrix(lambda, g, f)?.matrix;
    k.shift(C64::new(1.0, 0.0));
    Ok(eigenvalues(&k)?.eigenvalues)
}
