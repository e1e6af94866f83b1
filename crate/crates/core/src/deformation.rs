//! Symbol-level Fourier-space deformation `ξ → φ_θ(ξ) = ξ + θ sign(ξ) ρ(|ξ|)`
//! and ellipticity margins of the deformed semiclassical symbol.

use crate::eig::RectangleOmega;
use crate::{Error, Result, C64};
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, FRAC_PI_8, PI};

const I: C64 = C64 { re: 0.0, im: 1.0 };

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Rho {
    /// 0 below t0, cubic smoothstep on [t0, t0 + w], 1 above.
    Plateau { t0: f64, w: f64 },
    /// `s tanh t`
    ScaledTanh { s: f64 },
}

impl Default for Rho {
    fn default() -> Self {
        Rho::Plateau { t0: 1.0, w: 4.0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeformationSpec {
    pub rho: Rho,
    pub gamma: f64,
}

impl DeformationSpec {
    pub fn plateau(gamma: f64) -> Self {
        DeformationSpec { rho: Rho::default(), gamma }
    }

    pub fn scaled_tanh(s: f64, gamma: f64) -> Self {
        DeformationSpec { rho: Rho::ScaledTanh { s }, gamma }
    }

    pub fn max_slope(&self) -> f64 {
        match self.rho {
            Rho::Plateau { w, .. } => 1.5 / w,
            Rho::ScaledTanh { s } => s.abs(),
        }
    }

    /// `ρ(0) = 0`, `ρ' ≥ 0` and `sup ρ' < tan(π/8)/γ`.
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(Error::Config("deformation gamma must be positive".into()));
        }
        match self.rho {
            Rho::Plateau { t0, w } if !(t0 >= 0.0 && w > 0.0) => {
                return Err(Error::Config("plateau ramp needs t0 >= 0 and w > 0".into()))
            }
            Rho::ScaledTanh { s } if !(s >= 0.0) => {
                return Err(Error::Config("scaled_tanh amplitude must be nonnegative".into()))
            }
            _ => {}
        }
        if !(self.max_slope() < FRAC_PI_8.tan() / self.gamma) {
            return Err(Error::Config(format!(
                "sup rho' = {} violates rho' < tan(pi/8)/gamma = {}",
                self.max_slope(),
                FRAC_PI_8.tan() / self.gamma
            )));
        }
        Ok(())
    }

    /// (ρ, ρ', ρ'', ρ''') at t ≥ 0.
    fn derivs(&self, t: f64) -> [f64; 4] {
        match self.rho {
            Rho::Plateau { t0, w } => {
                if t <= t0 {
                    [0.0; 4]
                } else if t >= t0 + w {
                    [1.0, 0.0, 0.0, 0.0]
                } else {
                    let s = (t - t0) / w;
                    [
                        s * s * (3.0 - 2.0 * s),
                        6.0 * s * (1.0 - s) / w,
                        (6.0 - 12.0 * s) / (w * w),
                        -12.0 / (w * w * w),
                    ]
                }
            }
            Rho::ScaledTanh { s } => {
                let th = t.tanh();
                let se2 = 1.0 - th * th;
                [s * th, s * se2, -2.0 * s * se2 * th, -2.0 * s * (se2 * se2 - 2.0 * se2 * th * th)]
            }
        }
    }
}

pub fn rho_eval(spec: &DeformationSpec, t: f64) -> Result<(f64, f64)> {
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("rho is defined for t >= 0, got {t}")));
    }
    let d = spec.derivs(t);
    Ok((d[0], d[1]))
}

/// `D_γ = {|Re θ| + |Im θ| < γ}`
pub fn in_theta_domain(theta: C64, gamma: f64) -> bool {
    theta.re.abs() + theta.im.abs() < gamma
}

fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

pub fn phi_theta(xi: f64, theta: C64, spec: &DeformationSpec) -> C64 {
    let r = spec.derivs(xi.abs())[0];
    xi + theta * sign(xi) * r
}

/// `J_θ = 1 + θρ'(|ξ|)`
pub fn jacobian(xi: f64, theta: C64, spec: &DeformationSpec) -> C64 {
    1.0 + theta * spec.derivs(xi.abs())[1]
}

/// (J, J', J'') in ξ.
fn jacobian_derivs(xi: f64, theta: C64, spec: &DeformationSpec) -> (C64, C64, C64) {
    let d = spec.derivs(xi.abs());
    (1.0 + theta * d[1], theta * d[2] * sign(xi), theta * d[3])
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymbolSample {
    pub xi: f64,
    pub xistar: f64,
    pub h: f64,
    pub value: C64,
}

/// Left symbol of `φ_θ² - i J^{-1/2}(hD)J^{-1}(hD)J^{-1/2}`:
/// `φ² - iJ^{-2}ξ*² + h(2J'/J³)ξ* + ih²(5J'²/(4J⁴) - J''/(2J³))`.
pub fn symbol(xi: f64, xistar: f64, theta: C64, h: f64, spec: &DeformationSpec) -> SymbolSample {
    let (j, jp, jpp) = jacobian_derivs(xi, theta, spec);
    let phi = phi_theta(xi, theta, spec);
    let j2 = j * j;
    let j3 = j2 * j;
    let a = 2.0 * jp / j3;
    let b = I * (1.25 * jp * jp / (j2 * j2) - 0.5 * jpp / j3);
    let value = phi * phi - I * xistar * xistar / j2 + h * a * xistar + h * h * b;
    SymbolSample { xi, xistar, h, value }
}

/// Lower-order coefficients (a, b) of the symbol, exposed for checks.
pub fn lower_order_coefficients(xi: f64, theta: C64, spec: &DeformationSpec) -> (C64, C64) {
    let (j, jp, jpp) = jacobian_derivs(xi, theta, spec);
    let j2 = j * j;
    let j3 = j2 * j;
    (2.0 * jp / j3, I * (1.25 * jp * jp / (j2 * j2) - 0.5 * jpp / j3))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Admissibility {
    pub pass: bool,
    /// inf over the lower edge of `y + βρ(x)`
    pub margin: f64,
}

/// `Ω ⋐ {x + iy : x > 0, y > -βρ(x)}` checked on a 200-point lower-edge mesh.
pub fn check_admissible(omega: &RectangleOmega, beta: f64, spec: &DeformationSpec) -> Result<Admissibility> {
    if !(beta >= 0.0 && beta < spec.gamma) {
        return Err(Error::Config(format!("beta must lie in [0, gamma), got {beta}")));
    }
    let n = 200;
    let mut margin = f64::INFINITY;
    for k in 0..n {
        let x = omega.a_lo + (omega.a_hi - omega.a_lo) * k as f64 / (n - 1) as f64;
        let y = -omega.gamma_lo;
        margin = margin.min(y + beta * spec.derivs(x)[0]);
    }
    Ok(Admissibility { pass: omega.a_lo > 0.0 && margin > 0.0, margin })
}

/// Region a symbol must avoid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Region {
    /// `{|z| > 1, π/2 < arg z < π}`
    BadSector,
    /// `{λ² : λ ∈ Ω}` for an Ω admissible at β.
    Omega { omega: RectangleOmega, beta: f64 },
}

/// Square scan window `[-Ξ, Ξ]²` with n points per axis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanWindow {
    pub xi_max: f64,
    pub n: usize,
}

impl Default for ScanWindow {
    fn default() -> Self {
        ScanWindow { xi_max: 20.0, n: 400 }
    }
}

impl ScanWindow {
    pub fn axis(&self) -> Vec<f64> {
        let n = self.n.max(2);
        (0..n).map(|k| -self.xi_max + 2.0 * self.xi_max * k as f64 / (n - 1) as f64).collect()
    }
}

/// 100-point mesh of the region.
pub fn region_mesh(region: &Region, window: &ScanWindow) -> Vec<C64> {
    let mut pts = Vec::with_capacity(100);
    match region {
        Region::BadSector => {
            let rmax = 4.0 * window.xi_max * window.xi_max;
            for a in 0..10 {
                let r = rmax.powf(a as f64 / 9.0);
                for b in 0..10 {
                    let t = FRAC_PI_2 + (b as f64 + 0.5) * FRAC_PI_2 / 10.0;
                    pts.push(C64::from_polar(r, t));
                }
            }
        }
        Region::Omega { omega, .. } => {
            for a in 0..10 {
                let y = -omega.gamma_lo + (omega.b_hi + omega.gamma_lo) * a as f64 / 9.0;
                for b in 0..10 {
                    let x = omega.a_lo + (omega.a_hi - omega.a_lo) * b as f64 / 9.0;
                    let l = C64::new(x, y);
                    pts.push(l * l);
                }
            }
        }
    }
    pts
}

/// Order function `m = 1 + ξ² + ξ*²`.
pub fn order_function(xi: f64, xistar: f64) -> f64 {
    1.0 + xi * xi + xistar * xistar
}

/// `min |q_θ(ξ, ξ*; h) - z| / m(ξ, ξ*)` over the scan window and region mesh.
pub fn symbol_region_margin(theta: C64, region: &Region, h: f64, spec: &DeformationSpec, window: &ScanWindow) -> Result<f64> {
    if !in_theta_domain(theta, spec.gamma) {
        return Err(Error::Domain(format!("theta = {theta} outside D_gamma (gamma = {})", spec.gamma)));
    }
    if let Region::Omega { omega, beta } = region {
        let adm = check_admissible(omega, *beta, spec)?;
        if !adm.pass {
            return Err(Error::Config(format!("omega is not admissible at beta = {beta}: margin {}", adm.margin)));
        }
    }
    let mesh = region_mesh(region, window);
    let axis = window.axis();
    let mut best = f64::INFINITY;
    for &xi in &axis {
        for &xs in &axis {
            let q = symbol(xi, xs, theta, h, spec).value;
            let m = order_function(xi, xs);
            for z in &mesh {
                best = best.min((q - z).norm() / m);
            }
        }
    }
    Ok(best)
}

/// Principal symbol (h = 0) on the scan window.
pub fn numerical_range_scan(theta: C64, spec: &DeformationSpec, window: &ScanWindow) -> Result<Vec<SymbolSample>> {
    if !in_theta_domain(theta, spec.gamma) {
        return Err(Error::Domain(format!("theta = {theta} outside D_gamma (gamma = {})", spec.gamma)));
    }
    let axis = window.axis();
    let mut out = Vec::with_capacity(axis.len() * axis.len());
    for &xi in &axis {
        for &xs in &axis {
            out.push(symbol(xi, xs, theta, 0.0, spec));
        }
    }
    Ok(out)
}

/// Smallest distance between scan values and a point set.
pub fn min_distance(samples: &[SymbolSample], points: &[C64]) -> f64 {
    let mut best = f64::INFINITY;
    for s in samples {
        for p in points {
            best = best.min((s.value - p).norm());
        }
    }
    best
}

/// `xi,xistar,re_q,im_q,theta_re,theta_im,h`
pub fn symbol_csv(samples: &[SymbolSample], theta: C64) -> String {
    let mut s = String::with_capacity(samples.len() * 96 + 64);
    s.push_str("xi,xistar,re_q,im_q,theta_re,theta_im,h\n");
    for p in samples {
        s.push_str(&format!(
            "{:e},{:e},{:e},{:e},{:e},{:e},{:e}\n",
            p.xi, p.xistar, p.value.re, p.value.im, theta.re, theta.im, p.h
        ));
    }
    s
}

/// Principal argument folded into (-π, π].
pub fn arg_in_pi(z: C64) -> f64 {
    let a = z.arg();
    if a <= -PI {
        a + 2.0 * PI
    } else {
        a
    }
}
