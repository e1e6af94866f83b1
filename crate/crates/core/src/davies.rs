//! The Davies oscillator `H_c = -Δ + cx²`: exact spectrum, resolvent norms,
//! and exponentially weighted CAP resolvent norms.

use crate::assembly::{check_davies_coupling, davies_matrix, Grid1D};
use crate::eig::{largest_singular_value, smallest_singular_value};
use crate::linalg::Lu;
use crate::{Error, Result, C64};

/// `c^{1/2}(1 + 2k)`, k < count, principal root.
pub fn exact_spectrum(c: C64, count: usize) -> Result<Vec<C64>> {
    check_davies_coupling(c).map_err(|e| Error::Domain(e.to_string()))?;
    if count == 0 {
        return Err(Error::Domain("count must be at least 1".into()));
    }
    let r = c.sqrt();
    Ok((0..count).map(|k| r * (1 + 2 * k) as f64).collect())
}

/// Distance to the spectrum below which resolvent norms are refused.
pub const SPECTRUM_GUARD: f64 = 1e-9;

/// `‖(-Δ - iεx² - z)^{-1}‖ = 1/σ_min(H_{-iε} - z)`
pub fn resolvent_norm(eps: f64, z: C64, g: &Grid1D) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(Error::Domain(format!("eps must be positive, got {eps}")));
    }
    let mut a = davies_matrix(g, C64::new(0.0, -eps))?;
    a.shift(-z);
    let s = smallest_singular_value(&a);
    if s < SPECTRUM_GUARD {
        return Err(Error::Singular { context: format!("H_(-i{eps:e}) - ({z})"), sigma_min: s });
    }
    Ok(1.0 / s)
}

/// `‖e^{-γw|x|}(H_{-iε} - λ²)^{-1}e^{-γw|x|}‖`; γw = 0 gives the plain norm.
pub fn weighted_cap_resolvent_norm(eps: f64, lambda: C64, gamma_w: f64, g: &Grid1D) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(Error::Domain(format!("eps must be positive, got {eps}")));
    }
    if !(gamma_w >= 0.0) {
        return Err(Error::Domain(format!("weight rate must be nonnegative, got {gamma_w}")));
    }
    let mut a = davies_matrix(g, C64::new(0.0, -eps))?;
    let z = lambda * lambda;
    a.shift(-z);
    let s = smallest_singular_value(&a);
    if s < SPECTRUM_GUARD * a.max_abs().max(1.0) * 1e-3 {
        return Err(Error::Singular { context: format!("H_(-i{eps:e}) - lambda^2 at lambda={lambda}"), sigma_min: s });
    }
    let r = Lu::new(&a).inverse();
    let wgt: Vec<C64> = g.points.iter().map(|&x| C64::new((-gamma_w * x.abs()).exp(), 0.0)).collect();
    Ok(largest_singular_value(&r.scale_rows_cols(&wgt, &wgt)))
}

#[derive(Clone, Debug, PartialEq)]
pub struct DaviesRow {
    pub epsilon: f64,
    pub z: C64,
    pub norm: f64,
    pub weighted: bool,
    pub gamma_weight: f64,
}

/// `epsilon,re_z,im_z,norm,weighted_flag,gamma_weight`
pub fn davies_csv(rows: &[DaviesRow]) -> String {
    let mut s = String::from("epsilon,re_z,im_z,norm,weighted_flag,gamma_weight\n");
    for r in rows {
        s.push_str(&format!(
            "{:e},{:e},{:e},{:e},{},{:e}\n",
            r.epsilon,
            r.z.re,
            r.z.im,
            r.norm,
            u8::from(r.weighted),
            r.gamma_weight
        ));
    }
    s
}

/// Least-squares slope and Pearson correlation of y against x.
pub fn regression(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    (sxy / sxx, sxy / (sxx * syy).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::build_grid;
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn exact_examples() {
        let s = exact_spectrum(C64::new(1.0, 0.0), 3).unwrap();
        assert_eq!(s, vec![C64::new(1.0, 0.0), C64::new(3.0, 0.0), C64::new(5.0, 0.0)]);
        let s = exact_spectrum(C64::new(0.0, -1.0), 2).unwrap();
        assert!((s[0] - C64::from_polar(1.0, -FRAC_PI_4)).norm() < 1e-15);
        assert!((s[1] - C64::from_polar(3.0, -FRAC_PI_4)).norm() < 1e-15);
        let eps = 0.03;
        let se = exact_spectrum(C64::new(0.0, -eps), 4).unwrap();
        let s1 = exact_spectrum(C64::new(0.0, -1.0), 4).unwrap();
        for (a, b) in se.iter().zip(&s1) {
            assert!((a - b * eps.sqrt()).norm() < 1e-15);
        }
        assert!(exact_spectrum(C64::new(0.0, 1.0), 2).is_err());
    }

    #[test]
    fn resolvent_norm_examples() {
        let g = build_grid(8.0, 128).unwrap();
        let n = resolvent_norm(1.0, C64::new(0.0, 10.0), &g).unwrap();
        assert!(n > 0.0 && n < 1.0, "{n}");
        let hit = resolvent_norm(1.0, C64::from_polar(1.0, -FRAC_PI_4), &g);
        assert!(matches!(hit, Err(Error::Singular { .. })), "{hit:?}");
    }

    #[test]
    fn regression_recovers_line() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v + 1.0).collect();
        let (s, r) = regression(&x, &y);
        assert!((s - 2.0).abs() < 1e-12 && (r - 1.0).abs() < 1e-12);
    }
}
