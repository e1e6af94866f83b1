//! Uniform periodic grid and dense operator assembly.

use crate::linalg::CMatrix;
use crate::potentials::Potential;
use crate::{Error, Result, C64};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Grid parameters as they appear in configuration files.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    #[serde(rename = "L")]
    pub half_width: f64,
    #[serde(rename = "N")]
    pub size: usize,
}

impl GridSpec {
    pub fn new(half_width: f64, size: usize) -> Self {
        GridSpec { half_width, size }
    }

    pub fn build(&self) -> Result<Grid1D> {
        build_grid(self.half_width, self.size)
    }
}

/// `x_j = -L + j·2L/N`, j = 0..N-1.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid1D {
    pub half_width: f64,
    pub size: usize,
    pub points: Vec<f64>,
    pub h: f64,
}

impl Grid1D {
    pub fn spec(&self) -> GridSpec {
        GridSpec::new(self.half_width, self.size)
    }

    /// Largest resolved wavenumber π/h.
    pub fn nyquist(&self) -> f64 {
        PI / self.h
    }
}

pub fn build_grid(half_width: f64, size: usize) -> Result<Grid1D> {
    if !(half_width > 0.0 && half_width.is_finite()) {
        return Err(Error::Config(format!("grid half-width must be positive, got {half_width}")));
    }
    if size < 4 || size % 2 != 0 {
        return Err(Error::Config(format!("grid size must be even and at least 4, got {size}")));
    }
    let h = 2.0 * half_width / size as f64;
    let points = (0..size).map(|j| -half_width + j as f64 * h).collect();
    Ok(Grid1D { half_width, size, points, h })
}

/// Periodic Fourier-collocation matrix of `-d²/dx²` on `[-L, L)`.
pub fn laplacian_matrix(g: &Grid1D) -> CMatrix {
    let n = g.size;
    let ht = 2.0 * PI / n as f64;
    let scale = (PI / g.half_width).powi(2);
    let mut col = vec![0.0; n];
    col[0] = PI * PI / (3.0 * ht * ht) + 1.0 / 6.0;
    for (k, c) in col.iter_mut().enumerate().skip(1) {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        *c = sign * 0.5 / (0.5 * k as f64 * ht).sin().powi(2);
    }
    CMatrix::from_fn(n, |i, j| C64::new(scale * col[i.abs_diff(j)], 0.0))
}

/// `P_ε = -Δ - iεx² + V`
pub fn cap_matrix(g: &Grid1D, p: &Potential, eps: f64) -> Result<CMatrix> {
    if !(eps >= 0.0 && eps.is_finite()) {
        return Err(Error::Config(format!("CAP strength must be nonnegative, got {eps}")));
    }
    let mut a = laplacian_matrix(g);
    a.add_diag(g.points.iter().map(|&x| C64::new(p.value(x), -eps * x * x)));
    Ok(a)
}

/// `H_c = -Δ + cx²`
pub fn davies_matrix(g: &Grid1D, c: C64) -> Result<CMatrix> {
    check_davies_coupling(c)?;
    let mut a = laplacian_matrix(g);
    a.add_diag(g.points.iter().map(|&x| c * x * x));
    Ok(a)
}

pub(crate) fn check_davies_coupling(c: C64) -> Result<()> {
    let arg = c.arg();
    if !(c.re.is_finite() && c.im.is_finite()) || !(arg > -PI && arg <= 0.0) {
        return Err(Error::Config(format!("coupling {c} must satisfy -pi < arg c <= 0")));
    }
    Ok(())
}
