//! Dense complex matrices and LU factorization.

use crate::C64;
use std::ops::{Index, IndexMut};

/// Square complex matrix stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    n: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        CMatrix { n, data: vec![C64::new(0.0, 0.0); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        CMatrix { n, data }
    }

    pub fn from_diag(d: &[C64]) -> Self {
        let mut m = Self::zeros(d.len());
        for (i, &z) in d.iter().enumerate() {
            m[(i, i)] = z;
        }
        m
    }

    /// Build from row slices; panics on ragged or non-square input.
    pub fn from_rows(rows: &[Vec<C64>]) -> Self {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "matrix must be square");
        CMatrix { n, data: rows.concat() }
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn trace(&self) -> C64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)])
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)].conj())
    }

    pub fn add_diag(&mut self, d: impl IntoIterator<Item = C64>) {
        for (i, z) in d.into_iter().enumerate().take(self.n) {
            self[(i, i)] += z;
        }
    }

    pub fn shift(&mut self, z: C64) {
        for i in 0..self.n {
            self[(i, i)] += z;
        }
    }

    pub fn scale(&mut self, s: C64) {
        for z in &mut self.data {
            *z *= s;
        }
    }

    pub fn sub(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.n, other.n);
        CMatrix {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    /// diag(l) * self * diag(r)
    pub fn scale_rows_cols(&self, l: &[C64], r: &[C64]) -> CMatrix {
        Self::from_fn(self.n, |i, j| l[i] * self[(i, j)] * r[j])
    }

    pub fn matmul(&self, b: &CMatrix) -> CMatrix {
        assert_eq!(self.n, b.n);
        let n = self.n;
        let mut c = Self::zeros(n);
        for i in 0..n {
            let crow = &mut c.data[i * n..(i + 1) * n];
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                let brow = &b.data[k * n..(k + 1) * n];
                for (cj, bj) in crow.iter_mut().zip(brow) {
                    *cj += a * bj;
                }
            }
        }
        c
    }

    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        (0..self.n)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.n + j]
    }
}

/// LU factorization with partial pivoting, PA = LU.
#[derive(Clone, Debug)]
pub struct Lu {
    n: usize,
    lu: Vec<C64>,
    perm: Vec<usize>,
    odd: bool,
}

impl Lu {
    pub fn new(a: &CMatrix) -> Lu {
        let n = a.order();
        let mut lu = a.as_slice().to_vec();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut odd = false;
        for k in 0..n {
            let mut p = k;
            let mut best = lu[k * n + k].norm_sqr();
            for i in k + 1..n {
                let v = lu[i * n + k].norm_sqr();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if p != k {
                for j in 0..n {
                    lu.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
                odd = !odd;
            }
            let piv = lu[k * n + k];
            if piv == C64::new(0.0, 0.0) {
                continue;
            }
            let inv = piv.inv();
            let (top, bottom) = lu.split_at_mut((k + 1) * n);
            let krow = &top[k * n + k + 1..k * n + n];
            for i in 0..n - k - 1 {
                let row = &mut bottom[i * n..(i + 1) * n];
                let l = row[k] * inv;
                row[k] = l;
                if l == C64::new(0.0, 0.0) {
                    continue;
                }
                for (x, y) in row[k + 1..].iter_mut().zip(krow) {
                    *x -= l * y;
                }
            }
        }
        Lu { n, lu, perm, odd }
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn pivots(&self) -> impl Iterator<Item = C64> + '_ {
        (0..self.n).map(move |k| self.lu[k * self.n + k])
    }

    pub fn min_pivot(&self) -> f64 {
        self.pivots().map(|p| p.norm()).fold(f64::INFINITY, f64::min)
    }

    pub fn is_singular(&self) -> bool {
        self.pivots().any(|p| p == C64::new(0.0, 0.0))
    }

    pub fn det(&self) -> C64 {
        let (m, e) = self.det_scaled();
        m * 2f64.powi(e)
    }

    /// Determinant as mantissa * 2^exponent, immune to overflow.
    pub fn det_scaled(&self) -> (C64, i32) {
        let mut m = C64::new(if self.odd { -1.0 } else { 1.0 }, 0.0);
        let mut e = 0i32;
        for p in self.pivots() {
            m *= p;
            let a = m.norm();
            if a == 0.0 {
                return (C64::new(0.0, 0.0), 0);
            }
            let k = a.log2().floor() as i32;
            if k.abs() > 64 {
                m *= 2f64.powi(-k);
                e += k;
            }
        }
        (m, e)
    }

    /// Principal log of the determinant with unwrapped-by-pivot argument.
    pub fn log_det(&self) -> C64 {
        let mut s = C64::new(0.0, if self.odd { std::f64::consts::PI } else { 0.0 });
        for p in self.pivots() {
            s += p.ln();
        }
        s
    }

    pub fn solve_in_place(&self, b: &mut [C64]) {
        let n = self.n;
        let x: Vec<C64> = self.perm.iter().map(|&p| b[p]).collect();
        b.copy_from_slice(&x);
        for i in 0..n {
            let row = &self.lu[i * n..i * n + i];
            let s: C64 = row.iter().zip(&b[..i]).map(|(a, y)| a * y).sum();
            b[i] -= s;
        }
        for i in (0..n).rev() {
            let row = &self.lu[i * n + i + 1..(i + 1) * n];
            let s: C64 = row.iter().zip(&b[i + 1..]).map(|(a, y)| a * y).sum();
            b[i] = (b[i] - s) / self.lu[i * n + i];
        }
    }

    pub fn solve(&self, b: &[C64]) -> Vec<C64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }

    /// Solve A^H x = b.
    pub fn solve_adjoint(&self, b: &[C64]) -> Vec<C64> {
        let n = self.n;
        let mut y = b.to_vec();
        // U^H z = b
        for i in 0..n {
            let mut s = y[i];
            for k in 0..i {
                s -= self.lu[k * n + i].conj() * y[k];
            }
            y[i] = s / self.lu[i * n + i].conj();
        }
        // L^H w = z
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in i + 1..n {
                s -= self.lu[k * n + i].conj() * y[k];
            }
            y[i] = s;
        }
        let mut x = vec![C64::new(0.0, 0.0); n];
        for (i, &p) in self.perm.iter().enumerate() {
            x[p] = y[i];
        }
        x
    }

    pub fn inverse(&self) -> CMatrix {
        let n = self.n;
        // Solve on the transpose layout so each right-hand side is contiguous.
        let mut cols = vec![C64::new(0.0, 0.0); n * n];
        for j in 0..n {
            let col = &mut cols[j * n..(j + 1) * n];
            col[j] = C64::new(1.0, 0.0);
            self.solve_in_place(col);
        }
        CMatrix::from_fn(n, |i, j| cols[j * n + i])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn sample() -> CMatrix {
        CMatrix::from_rows(&[
            vec![c(2.0, 1.0), c(1.0, 0.0), c(0.0, -1.0)],
            vec![c(0.5, 0.0), c(3.0, 0.0), c(1.0, 1.0)],
            vec![c(0.0, 2.0), c(-1.0, 0.0), c(1.0, 0.0)],
        ])
    }

    #[test]
    fn det_matches_cofactor_expansion() {
        let a = sample();
        let m = |i, j| a[(i, j)];
        let expect = m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1))
            - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0))
            + m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
        let d = Lu::new(&a).det();
        assert!((d - expect).norm() < 1e-12);
        let ld = Lu::new(&a).log_det().exp();
        assert!((ld - expect).norm() < 1e-12);
    }

    #[test]
    fn inverse_times_matrix_is_identity() {
        let a = sample();
        let inv = Lu::new(&a).inverse();
        let p = a.matmul(&inv);
        let e = p.sub(&CMatrix::identity(3)).max_abs();
        assert!(e < 1e-13, "{e}");
    }

    #[test]
    fn adjoint_solve() {
        let a = sample();
        let b = vec![c(1.0, 0.0), c(0.0, 1.0), c(2.0, -1.0)];
        let x = Lu::new(&a).solve_adjoint(&b);
        let r = a.adjoint().matvec(&x);
        for (u, v) in r.iter().zip(&b) {
            assert!((u - v).norm() < 1e-13);
        }
    }

    #[test]
    fn scaled_det_survives_overflow() {
        let d: Vec<C64> = (0..400).map(|_| c(1e3, 0.0)).collect();
        let (m, e) = Lu::new(&CMatrix::from_diag(&d)).det_scaled();
        let log10 = m.norm().log10() + e as f64 * 2f64.log10();
        assert!((log10 - 1200.0).abs() < 1e-9);
    }
}
