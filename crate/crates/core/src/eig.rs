//! Dense non-Hermitian eigenvalues, singular values, and the square-root map
//! into the resonance sector `-π/8 < arg λ < 7π/8`.

use crate::linalg::CMatrix;
use crate::{Error, Result, C64};
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_4, FRAC_PI_8, PI};

const ULP: f64 = f64::EPSILON;
const SAFE_MIN: f64 = f64::MIN_POSITIVE;

#[inline]
fn cabs1(z: C64) -> f64 {
    z.re.abs() + z.im.abs()
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumResult {
    /// Unordered; callers sort explicitly.
    pub eigenvalues: Vec<C64>,
    /// Backward-error estimate `n·u·‖A‖_F`.
    pub residual_bound: f64,
}

pub fn eigenvalues(a: &CMatrix) -> Result<SpectrumResult> {
    eigenvalues_named(a, "matrix")
}

/// Eigenvalues with `name` quoted in the non-convergence error.
pub fn eigenvalues_named(a: &CMatrix, name: &str) -> Result<SpectrumResult> {
    if !a.is_finite() {
        return Err(Error::Domain(format!("{name} has non-finite entries")));
    }
    let n = a.order();
    let residual_bound = n as f64 * ULP * a.frobenius_norm();
    let mut h = a.as_slice().to_vec();
    balance(&mut h, n);
    hessenberg(&mut h, n);
    let eigenvalues = hessenberg_qr(&mut h, n).map_err(|sweeps| Error::NoConvergence {
        name: name.to_string(),
        order: n,
        sweeps,
    })?;
    Ok(SpectrumResult { eigenvalues, residual_bound })
}

/// Diagonal similarity scaling by powers of two (no permutations).
fn balance(a: &mut [C64], n: usize) {
    const RADIX: f64 = 2.0;
    let mut done = false;
    let mut sweeps = 0;
    while !done && sweeps < 100 {
        done = true;
        sweeps += 1;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += cabs1(a[j * n + i]);
                    r += cabs1(a[i * n + j]);
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / RADIX;
            while c < g {
                f *= RADIX;
                c *= RADIX * RADIX;
            }
            g = r * RADIX;
            while c >= g {
                f /= RADIX;
                c /= RADIX * RADIX;
            }
            if (c + r) / f < 0.95 * s {
                done = false;
                for j in 0..n {
                    a[i * n + j] /= f;
                    a[j * n + i] *= f;
                }
            }
        }
    }
}

/// Householder vector for `x`: `(I - β v vᴴ) x = α e₁`. Returns None when x = 0.
fn householder(x: &[C64]) -> Option<(Vec<C64>, f64, C64)> {
    let sigma = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if sigma == 0.0 {
        return None;
    }
    let a0 = x[0].norm();
    let phase = if a0 == 0.0 { C64::new(1.0, 0.0) } else { x[0] / a0 };
    let alpha = -phase * sigma;
    let mut v = x.to_vec();
    v[0] = phase * (a0 + sigma);
    let beta = 1.0 / (sigma * (sigma + a0));
    Some((v, beta, alpha))
}

/// `A[rows, cols] ← (I - β v vᴴ) A[rows, cols]` with rows starting at r0.
fn apply_left(a: &mut [C64], n: usize, r0: usize, c0: usize, v: &[C64], beta: f64) {
    let mut w = vec![C64::new(0.0, 0.0); n - c0];
    for (k, vk) in v.iter().enumerate() {
        let row = &a[(r0 + k) * n + c0..(r0 + k + 1) * n];
        let cv = vk.conj();
        for (wj, x) in w.iter_mut().zip(row) {
            *wj += cv * x;
        }
    }
    for (k, vk) in v.iter().enumerate() {
        let s = *vk * beta;
        let row = &mut a[(r0 + k) * n + c0..(r0 + k + 1) * n];
        for (x, wj) in row.iter_mut().zip(&w) {
            *x -= s * wj;
        }
    }
}

/// `A[rows, cols] ← A[rows, cols] (I - β v vᴴ)` with columns starting at c0.
fn apply_right(a: &mut [C64], n: usize, r0: usize, c0: usize, v: &[C64], beta: f64) {
    for i in r0..n {
        let row = &mut a[i * n + c0..i * n + c0 + v.len()];
        let s: C64 = row.iter().zip(v).map(|(x, y)| x * y).sum::<C64>() * beta;
        for (x, y) in row.iter_mut().zip(v) {
            *x -= s * y.conj();
        }
    }
}

fn hessenberg(a: &mut [C64], n: usize) {
    if n < 3 {
        return;
    }
    for k in 0..n - 2 {
        let x: Vec<C64> = (k + 1..n).map(|i| a[i * n + k]).collect();
        if x[1..].iter().all(|z| *z == C64::new(0.0, 0.0)) {
            continue;
        }
        if let Some((v, beta, _)) = householder(&x) {
            apply_left(a, n, k + 1, k, &v, beta);
            apply_right(a, n, 0, k + 1, &v, beta);
            for i in k + 2..n {
                a[i * n + k] = C64::new(0.0, 0.0);
            }
        }
    }
}

/// Complex Givens pair (c, s) with `[c s; -s̄ c] [f; g] = [r; 0]`.
#[inline]
fn givens(f: C64, g: C64) -> (f64, C64) {
    if g == C64::new(0.0, 0.0) {
        return (1.0, C64::new(0.0, 0.0));
    }
    let fa = f.norm();
    if fa == 0.0 {
        return (0.0, g.conj() / g.norm());
    }
    let r = fa.hypot(g.norm());
    (fa / r, (f / fa) * g.conj() / r)
}

/// Single-shift complex QR on an upper Hessenberg matrix. Only the active
/// diagonal block is updated, which is enough for eigenvalues.
fn hessenberg_qr(h: &mut [C64], n: usize) -> std::result::Result<Vec<C64>, usize> {
    let mut eig = vec![C64::new(0.0, 0.0); n];
    if n == 0 {
        return Ok(eig);
    }
    let norm = h.iter().map(|z| cabs1(*z)).fold(0.0, f64::max);
    let small = SAFE_MIN * (n as f64 / ULP);
    let max_sweeps = 30 * n.max(1);
    let mut sweeps = 0usize;
    let mut hi = n - 1;
    let mut its = 0usize;
    let at = |i: usize, j: usize| i * n + j;
    loop {
        if hi == 0 {
            eig[0] = h[0];
            break;
        }
        // Locate the bottom unreduced block [l, hi].
        let mut l = hi;
        while l > 0 {
            let sub = h[at(l, l - 1)];
            if cabs1(sub) <= small {
                break;
            }
            let mut tst = cabs1(h[at(l - 1, l - 1)]) + cabs1(h[at(l, l)]);
            if tst == 0.0 {
                if l >= 2 {
                    tst += h[at(l - 1, l - 2)].re.abs();
                }
                if l + 1 <= hi {
                    tst += h[at(l + 1, l)].re.abs();
                }
                if tst == 0.0 {
                    tst = norm;
                }
            }
            if sub.re.abs() <= ULP * tst {
                // Ahues & Tisseur conservative deflation test.
                let ab = cabs1(sub).max(cabs1(h[at(l - 1, l)]));
                let ba = cabs1(sub).min(cabs1(h[at(l - 1, l)]));
                let d = h[at(l - 1, l - 1)] - h[at(l, l)];
                let aa = cabs1(h[at(l, l)]).max(cabs1(d));
                let bb = cabs1(h[at(l, l)]).min(cabs1(d));
                let s = aa + ab;
                if ba * (ab / s) <= small.max(ULP * (bb * (aa / s))) {
                    break;
                }
            }
            l -= 1;
        }
        if l > 0 {
            h[at(l, l - 1)] = C64::new(0.0, 0.0);
        }
        if l == hi {
            eig[hi] = h[at(hi, hi)];
            hi -= 1;
            its = 0;
            continue;
        }
        sweeps += 1;
        if sweeps > max_sweeps {
            return Err(max_sweeps);
        }
        its += 1;

        let mu = if its % 20 == 10 {
            h[at(l, l)] + 0.75 * h[at(l + 1, l)].re.abs()
        } else if its % 20 == 0 {
            h[at(hi, hi)] + 0.75 * h[at(hi, hi - 1)].re.abs()
        } else {
            wilkinson_shift(
                h[at(hi - 1, hi - 1)],
                h[at(hi - 1, hi)],
                h[at(hi, hi - 1)],
                h[at(hi, hi)],
            )
        };

        for k in l..=hi {
            h[at(k, k)] -= mu;
        }
        let mut rots = Vec::with_capacity(hi - l);
        for k in l..hi {
            let (c, s) = givens(h[at(k, k)], h[at(k + 1, k)]);
            rots.push((c, s));
            let (top, bot) = h.split_at_mut((k + 1) * n);
            let rk = &mut top[k * n + k..k * n + hi + 1];
            let rk1 = &mut bot[k..hi + 1];
            for (x, y) in rk.iter_mut().zip(rk1.iter_mut()) {
                let (a, b) = (*x, *y);
                *x = c * a + s * b;
                *y = c * b - s.conj() * a;
            }
            h[at(k + 1, k)] = C64::new(0.0, 0.0);
        }
        for (idx, &(c, s)) in rots.iter().enumerate() {
            let k = l + idx;
            let sc = s.conj();
            for i in l..=(k + 1).min(hi) {
                let (a, b) = (h[at(i, k)], h[at(i, k + 1)]);
                h[at(i, k)] = a * c + b * sc;
                h[at(i, k + 1)] = b * c - a * s;
            }
        }
        for k in l..=hi {
            h[at(k, k)] += mu;
        }
    }
    Ok(eig)
}

/// Eigenvalue of `[[a, b], [c, d]]` closest to `d`.
fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let u = b.sqrt() * c.sqrt();
    let mut s = cabs1(u);
    if s == 0.0 {
        return d;
    }
    let x = 0.5 * (a - d);
    let sx = cabs1(x);
    s = s.max(sx);
    let mut y = s * ((x / s) * (x / s) + (u / s) * (u / s)).sqrt();
    if sx > 0.0 {
        let xs = x / sx;
        if xs.re * y.re + xs.im * y.im < 0.0 {
            y = -y;
        }
    }
    d - u * (u / (x + y))
}

/// Singular values in descending order.
pub fn singular_values(a: &CMatrix) -> Vec<f64> {
    let (d, e) = bidiagonalize(a);
    let n = d.len();
    let mut out: Vec<f64> = (0..n).map(|k| bidiag_singular_value(&d, &e, k)).collect();
    out.reverse();
    out
}

pub fn smallest_singular_value(a: &CMatrix) -> f64 {
    let (d, e) = bidiagonalize(a);
    if d.is_empty() {
        return 0.0;
    }
    bidiag_singular_value(&d, &e, 0)
}

/// Spectral norm.
pub fn largest_singular_value(a: &CMatrix) -> f64 {
    let (d, e) = bidiagonalize(a);
    if d.is_empty() {
        return 0.0;
    }
    bidiag_singular_value(&d, &e, d.len() - 1)
}

/// Reduce to a real nonnegative upper bidiagonal (diagonal, superdiagonal)
/// with the same singular values.
fn bidiagonalize(a: &CMatrix) -> (Vec<f64>, Vec<f64>) {
    let n = a.order();
    let mut m = a.as_slice().to_vec();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n.saturating_sub(1)];
    for k in 0..n {
        let x: Vec<C64> = (k..n).map(|i| m[i * n + k]).collect();
        if let Some((v, beta, alpha)) = householder(&x) {
            apply_left(&mut m, n, k, k, &v, beta);
            d[k] = alpha.norm();
        }
        if k + 1 < n {
            let y: Vec<C64> = (k + 1..n).map(|j| m[k * n + j].conj()).collect();
            if let Some((v, beta, alpha)) = householder(&y) {
                apply_right(&mut m, n, k, k + 1, &v, beta);
                e[k] = alpha.norm();
            }
        }
    }
    (d, e)
}

/// Number of singular values of the bidiagonal below `x`, from a Sturm count
/// on the zero-diagonal Golub–Kahan tridiagonal.
fn count_below(d: &[f64], e: &[f64], x: f64) -> usize {
    let n = d.len();
    let pivmin = SAFE_MIN / ULP;
    let mut neg = 0;
    let mut q = -x;
    if q < 0.0 {
        neg += 1;
    }
    for i in 1..2 * n {
        let b = if i % 2 == 1 { d[i / 2] } else { e[i / 2 - 1] };
        let qq = if q.abs() < pivmin { -pivmin } else { q };
        q = -x - b * b / qq;
        if q < 0.0 {
            neg += 1;
        }
    }
    neg - n
}

/// k-th smallest singular value (k = 0 is the minimum), to full relative precision.
fn bidiag_singular_value(d: &[f64], e: &[f64], k: usize) -> f64 {
    let bound = d
        .iter()
        .chain(e.iter())
        .fold(0.0f64, |m, &v| m.max(v))
        * 2.0
        * 1.000001;
    if bound == 0.0 {
        return 0.0;
    }
    let mut lo = bound * 1e-40;
    let mut hi = bound;
    if count_below(d, e, lo) > k {
        return 0.0;
    }
    for _ in 0..400 {
        if hi / lo <= 1.0 + 4.0 * ULP {
            break;
        }
        let mid = if hi / lo > 4.0 { (lo * hi).sqrt() } else { 0.5 * (lo + hi) };
        if mid <= lo || mid >= hi {
            break;
        }
        if count_below(d, e, mid) > k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `Ω = (a′, a) + i(−γ′, b)`
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RectangleOmega {
    pub a_lo: f64,
    pub a_hi: f64,
    pub gamma_lo: f64,
    pub b_hi: f64,
}

impl RectangleOmega {
    pub fn new(a_lo: f64, a_hi: f64, gamma_lo: f64, b_hi: f64) -> Self {
        RectangleOmega { a_lo, a_hi, gamma_lo, b_hi }
    }

    pub fn contains(&self, z: C64) -> bool {
        z.re > self.a_lo && z.re < self.a_hi && z.im > -self.gamma_lo && z.im < self.b_hi
    }

    pub fn contains_closed(&self, z: C64) -> bool {
        z.re >= self.a_lo && z.re <= self.a_hi && z.im >= -self.gamma_lo && z.im <= self.b_hi
    }

    pub fn corners(&self) -> [C64; 4] {
        [
            C64::new(self.a_lo, -self.gamma_lo),
            C64::new(self.a_hi, -self.gamma_lo),
            C64::new(self.a_hi, self.b_hi),
            C64::new(self.a_lo, self.b_hi),
        ]
    }

    /// Shape checks only: ordering and the sector constraint.
    pub fn validate_shape(&self) -> Result<()> {
        let vals = [self.a_lo, self.a_hi, self.gamma_lo, self.b_hi];
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("omega bounds must be finite".into()));
        }
        if !(self.a_lo > 0.0 && self.a_lo < self.a_hi) {
            return Err(Error::Config(format!(
                "omega needs 0 < a' < a, got a'={} a={}",
                self.a_lo, self.a_hi
            )));
        }
        if !(self.b_hi > -self.gamma_lo) {
            return Err(Error::Config("omega needs b > -gamma'".into()));
        }
        if !(self.gamma_lo / self.a_lo < FRAC_PI_8.tan()) {
            return Err(Error::Config(format!(
                "omega lower-left corner leaves the sector: gamma'/a' = {} >= tan(pi/8)",
                self.gamma_lo / self.a_lo
            )));
        }
        Ok(())
    }

    /// Full check against the decay rate of the active potential.
    pub fn validate(&self, envelope_gamma: f64) -> Result<()> {
        self.validate_shape()?;
        if !(self.gamma_lo < envelope_gamma) {
            return Err(Error::Config(format!(
                "omega gamma' = {} must be below the envelope decay rate {}",
                self.gamma_lo, envelope_gamma
            )));
        }
        Ok(())
    }
}

/// Distance from z to the Davies ray `e^{-iπ/4}[0, ∞)`.
pub fn davies_ray_distance(z: C64) -> f64 {
    let w = z * C64::from_polar(1.0, FRAC_PI_4);
    if w.re >= 0.0 {
        w.im.abs()
    } else {
        w.norm()
    }
}

/// Square root with `-π/8 < arg λ < 7π/8`.
pub fn sqrt_sector(z: C64) -> Result<C64> {
    if z == C64::new(0.0, 0.0) || !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::Domain(format!("sqrt_sector undefined at {z}")));
    }
    if davies_ray_distance(z) <= 4.0 * ULP * z.norm() {
        return Err(Error::BranchCut(format!("{z} lies on the ray arg z = -pi/4")));
    }
    let mut t = z.arg();
    if t <= -FRAC_PI_4 {
        t += 2.0 * PI;
    }
    Ok(C64::from_polar(z.norm().sqrt(), 0.5 * t))
}

/// Distance below which eigenvalues count as sitting on the Davies ray.
pub const RAY_EXCLUSION: f64 = 1e-9;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SectorImages {
    /// Images inside Ω, sorted by real part.
    pub inside: Vec<C64>,
    /// Eigenvalues discarded for sitting on the branch ray.
    pub on_ray: Vec<C64>,
}

pub fn sector_images(eigs: &[C64], omega: &RectangleOmega) -> SectorImages {
    let mut out = SectorImages::default();
    for &z in eigs {
        if davies_ray_distance(z) < RAY_EXCLUSION {
            log::debug!("discarding eigenvalue {z} on the Davies ray");
            out.on_ray.push(z);
            continue;
        }
        match sqrt_sector(z) {
            Ok(l) if omega.contains(l) => out.inside.push(l),
            Ok(_) => {}
            Err(_) => out.on_ray.push(z),
        }
    }
    out.inside.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    out
}

pub fn filter_sector(spec: &SpectrumResult, omega: &RectangleOmega) -> Vec<C64> {
    let s = sector_images(&spec.eigenvalues, omega);
    if !s.on_ray.is_empty() {
        log::info!("{} eigenvalue(s) on the Davies ray excluded", s.on_ray.len());
    }
    s.inside
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn sorted(mut v: Vec<C64>) -> Vec<C64> {
        v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        v
    }

    #[test]
    fn diagonal_and_involution() {
        let a = CMatrix::from_diag(&[c(1.0, 0.0), c(0.0, 2.0), c(-3.0, 0.0)]);
        let e = sorted(eigenvalues(&a).unwrap().eigenvalues);
        let want = [c(-3.0, 0.0), c(0.0, 2.0), c(1.0, 0.0)];
        for (x, y) in e.iter().zip(&want) {
            assert!((x - y).norm() < 1e-14);
        }
        let swap = CMatrix::from_rows(&[vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(1.0, 0.0), c(0.0, 0.0)]]);
        let e = sorted(eigenvalues(&swap).unwrap().eigenvalues);
        assert!((e[0] - c(-1.0, 0.0)).norm() < 1e-14 && (e[1] - c(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn companion_cube_roots() {
        // z³ - 1
        let z = c(0.0, 0.0);
        let a = CMatrix::from_rows(&[
            vec![z, z, c(1.0, 0.0)],
            vec![c(1.0, 0.0), z, z],
            vec![z, c(1.0, 0.0), z],
        ]);
        let e = eigenvalues(&a).unwrap().eigenvalues;
        for k in 0..3 {
            let root = C64::from_polar(1.0, 2.0 * PI * k as f64 / 3.0);
            let d = e.iter().map(|x| (x - root).norm()).fold(f64::INFINITY, f64::min);
            assert!(d < 1e-12, "root {root} off by {d}");
        }
    }

    #[test]
    fn singular_value_examples() {
        assert!((smallest_singular_value(&CMatrix::identity(5)) - 1.0).abs() < 1e-14);
        let d = CMatrix::from_diag(&[c(3.0, 0.0), c(1e-8, 0.0)]);
        assert!((smallest_singular_value(&d) - 1e-8).abs() < 1e-22);
        assert!((largest_singular_value(&d) - 3.0).abs() < 1e-14);
        let r = CMatrix::from_rows(&[vec![c(1.0, 0.0), c(1.0, 0.0)], vec![c(1.0, 0.0), c(1.0, 0.0)]]);
        assert!(smallest_singular_value(&r) < 1e-14);
        let sv = singular_values(&r);
        assert!((sv[0] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn sqrt_sector_examples() {
        assert!((sqrt_sector(c(1.0, 0.0)).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
        assert!((sqrt_sector(c(0.0, -2.0)).unwrap() - c(-1.0, 1.0)).norm() < 1e-15);
        assert!((sqrt_sector(c(-4.0, 0.0)).unwrap() - c(0.0, 2.0)).norm() < 1e-15);
        let on_ray = C64::from_polar(3.0, -FRAC_PI_4);
        assert!(matches!(sqrt_sector(on_ray), Err(Error::BranchCut(_))));
        assert!(sqrt_sector(c(0.0, 0.0)).is_err());
    }

    #[test]
    fn filter_examples() {
        let omega = RectangleOmega::new(0.5, 2.0, 0.1, 1.0);
        let empty = SpectrumResult { eigenvalues: vec![], residual_bound: 0.0 };
        assert!(filter_sector(&empty, &omega).is_empty());
        let one = SpectrumResult { eigenvalues: vec![c(1.0, 0.0)], residual_bound: 0.0 };
        assert_eq!(filter_sector(&one, &omega), vec![c(1.0, 0.0)]);
        let ray = SpectrumResult { eigenvalues: vec![C64::from_polar(1.0, -FRAC_PI_4)], residual_bound: 0.0 };
        let s = sector_images(&ray.eigenvalues, &omega);
        assert!(s.inside.is_empty() && s.on_ray.len() == 1);
    }

    #[test]
    fn omega_validation() {
        assert!(RectangleOmega::new(2.0, 3.5, 0.8, 0.5).validate(1.0).is_ok());
        assert!(RectangleOmega::new(2.0, 3.5, 1.2, 0.5).validate(1.0).is_err());
        assert!(RectangleOmega::new(1.0, 3.5, 0.8, 0.5).validate(1.0).is_err());
        assert!(RectangleOmega::new(3.0, 2.0, 0.1, 0.5).validate(1.0).is_err());
    }
}
