// Copyright 2026 The gpolab Developers
// SPDX-License-Identifier: Apache-2.0

//! Dense complex matrices and the handful of kernels the rest of the crate
//! needs: products, adjoints, commutators, norms, integer powers, the matrix
//! exponential and a Hermitian eigendecomposition.
//!
//! Storage is row-major. Every operation is a pure function of its inputs.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::ser::{Serialize, SerializeStruct, Serializer};
use std::ops::{Index, IndexMut};

use crate::error::{GpoError, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Products above this many multiply-adds are split across rayon workers.
const PARALLEL_MATMUL_WORK: usize = 1 << 18;

#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from row-major entries, rejecting a wrong entry count
    /// or any non-finite value.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(GpoError::InvalidInput(format!(
                "{} entries supplied for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(GpoError::NonFinite {
                row: pos / cols.max(1),
                col: pos % cols.max(1),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn diagonal(diag: &[C64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &z) in diag.iter().enumerate() {
            m.data[i * n + i] = z;
        }
        m
    }

    pub fn real_diagonal(diag: &[f64]) -> Self {
        let entries: Vec<C64> = diag.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::diagonal(&entries)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn diag(&self) -> Vec<C64> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, c: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * c).collect(),
        }
    }

    pub fn scale_real(&self, c: f64) -> Self {
        self.scale(C64::new(c, 0.0))
    }

    fn check_same_shape(&self, other: &Self, op: &'static str) -> Result<()> {
        if self.shape() != other.shape() {
            return Err(GpoError::DimensionMismatch {
                op,
                left: self.shape(),
                right: other.shape(),
            });
        }
        Ok(())
    }

    fn require_square(&self) -> Result<usize> {
        if !self.is_square() {
            return Err(GpoError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        Ok(self.rows)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other, "add")?;
        Ok(self.zip_with(other, |a, b| a + b))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other, "sub")?;
        Ok(self.zip_with(other, |a, b| a - b))
    }

    /// `self + c * other`.
    pub fn add_scaled(&self, c: C64, other: &Self) -> Result<Self> {
        self.check_same_shape(other, "add_scaled")?;
        Ok(self.zip_with(other, |a, b| a + c * b))
    }

    fn zip_with(&self, other: &Self, f: impl Fn(C64, C64) -> C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(GpoError::DimensionMismatch {
                op: "matmul",
                left: self.shape(),
                right: other.shape(),
            });
        }
        let (n, p, m) = (self.rows, self.cols, other.cols);
        let mut out = vec![ZERO; n * m];
        if m == 0 {
            return Ok(Self {
                rows: n,
                cols: m,
                data: out,
            });
        }
        let row_kernel = |(i, out_row): (usize, &mut [C64])| {
            let lhs = &self.data[i * p..(i + 1) * p];
            for (k, &a) in lhs.iter().enumerate() {
                // Shift and diagonal operators are mostly zeros.
                if a == ZERO {
                    continue;
                }
                let rhs = &other.data[k * m..(k + 1) * m];
                for (o, &b) in out_row.iter_mut().zip(rhs) {
                    *o += a * b;
                }
            }
        };
        if n * p * m >= PARALLEL_MATMUL_WORK {
            out.par_chunks_mut(m).enumerate().for_each(row_kernel);
        } else {
            out.chunks_mut(m).enumerate().for_each(row_kernel);
        }
        Ok(Self {
            rows: n,
            cols: m,
            data: out,
        })
    }

    /// Non-negative integer power by binary exponentiation.
    pub fn pow(&self, exponent: u32) -> Result<Self> {
        let n = self.require_square()?;
        let mut result = Self::identity(n);
        let mut base = self.clone();
        let mut e = exponent;
        while e > 0 {
            if e & 1 == 1 {
                result = result.matmul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.matmul(&base)?;
            }
        }
        Ok(result)
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Largest entry modulus.
    pub fn max_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `max |self - other|` entrywise.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_same_shape(other, "max_abs_diff")?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// `max |h - h†|` entrywise.
    pub fn hermitian_residual(&self) -> Result<f64> {
        let n = self.require_square()?;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        Ok(worst)
    }

    /// `max |U†U - I|` entrywise.
    pub fn unitarity_residual(&self) -> Result<f64> {
        let n = self.require_square()?;
        self.adjoint().matmul(self)?.max_abs_diff(&Self::identity(n))
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        assert!(i < self.rows && j < self.cols, "index ({i}, {j}) out of bounds");
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        assert!(i < self.rows && j < self.cols, "index ({i}, {j}) out of bounds");
        &mut self.data[i * self.cols + j]
    }
}

/// Serialized as `{rows, cols, data: [[re, im], ...]}` in row-major order.
impl Serialize for ComplexMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let pairs: Vec<[f64; 2]> = self.data.iter().map(|z| [z.re, z.im]).collect();
        let mut st = serializer.serialize_struct("ComplexMatrix", 3)?;
        st.serialize_field("rows", &self.rows)?;
        st.serialize_field("cols", &self.cols)?;
        st.serialize_field("data", &pairs)?;
        st.end()
    }
}

/// `ab - ba`.
pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !a.is_square() || a.shape() != b.shape() {
        return Err(GpoError::DimensionMismatch {
            op: "commutator",
            left: a.shape(),
            right: b.shape(),
        });
    }
    a.matmul(b)?.sub(&b.matmul(a)?)
}

/// Matrix exponential by scaling and squaring of a truncated Taylor series.
pub fn expm(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = a.require_square()?;
    // Max absolute row sum bounds the spectral radius.
    let norm = (0..n)
        .map(|i| a.row(i).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let mut squarings = 0u32;
    let mut scaled_norm = norm;
    while scaled_norm > 0.5 {
        scaled_norm /= 2.0;
        squarings += 1;
    }
    let scaled = a.scale_real(0.5f64.powi(squarings as i32));
    let mut result = ComplexMatrix::identity(n);
    let mut term = ComplexMatrix::identity(n);
    for k in 1..=40 {
        term = term.matmul(&scaled)?.scale_real(1.0 / k as f64);
        result = result.add(&term)?;
        if term.max_norm() <= f64::EPSILON * 1e-3 {
            break;
        }
    }
    for _ in 0..squarings {
        result = result.matmul(&result)?;
    }
    Ok(result)
}

#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors stored as columns, in eigenvalue order.
    pub eigenvectors: ComplexMatrix,
}

impl EigenDecomposition {
    /// `V Λ V†`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let v = &self.eigenvectors;
        let scaled = ComplexMatrix::from_fn(v.rows(), v.cols(), |i, j| v[(i, j)] * self.eigenvalues[j]);
        scaled.matmul(&v.adjoint()).expect("eigenvector matrix is square")
    }
}

/// Relative tolerance on `‖h - h†‖_max / ‖h‖_max` accepted by [`hermitian_eig`].
pub const HERMITIAN_TOLERANCE: f64 = 1e-9;

const MAX_QL_ITERATIONS: usize = 64;

/// Eigendecomposition of a Hermitian matrix.
///
/// Householder reduction to a complex tridiagonal form, a diagonal phase
/// transform making the tridiagonal real, then implicit QL with Wilkinson
/// shifts. Deterministic for identical input.
pub fn hermitian_eig(h: &ComplexMatrix) -> Result<EigenDecomposition> {
    let n = h.require_square()?;
    if !h.all_finite() {
        let pos = h
            .data
            .iter()
            .position(|z| !(z.re.is_finite() && z.im.is_finite()))
            .unwrap();
        return Err(GpoError::NonFinite {
            row: pos / n,
            col: pos % n,
        });
    }
    let scale = h.max_norm();
    let residual = h.hermitian_residual()?;
    let tolerance = HERMITIAN_TOLERANCE * scale;
    if residual > tolerance {
        return Err(GpoError::NotHermitian { residual, tolerance });
    }
    if n == 0 {
        return Ok(EigenDecomposition {
            eigenvalues: Vec::new(),
            eigenvectors: ComplexMatrix::zeros(0, 0),
        });
    }

    let (diag, off, q) = tridiagonalize(h);

    // Phase transform D with D† T D real: d_{k+1} = d_k e_k / |e_k|.
    let mut phases = vec![ONE; n];
    let mut real_off = vec![0.0; n];
    for k in 0..n - 1 {
        let r = off[k].norm();
        real_off[k] = r;
        phases[k + 1] = if r > 0.0 { phases[k] * (off[k] / r) } else { phases[k] };
    }
    let mut d = diag;
    let mut zt = tql2(&mut d, &mut real_off)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| d[i]).collect();
    zt = order.iter().map(|&i| std::mem::take(&mut zt[i])).collect();

    // V = Q D Z, with Z supplied transposed (row c of zt is eigenvector c).
    let qd = ComplexMatrix::from_fn(n, n, |i, j| q[(i, j)] * phases[j]);
    let mut vecs = vec![ZERO; n * n];
    vecs.par_chunks_mut(n).enumerate().for_each(|(r, out_row)| {
        let qrow = qd.row(r);
        for (c, out) in out_row.iter_mut().enumerate() {
            *out = qrow.iter().zip(&zt[c]).map(|(&a, &b)| a * b).sum();
        }
    });
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors: ComplexMatrix {
            rows: n,
            cols: n,
            data: vecs,
        },
    })
}

/// Returns `(diag, subdiag, q)` with `h = q T q†`, `T` Hermitian tridiagonal,
/// `subdiag[k] = T[k+1, k]` and `subdiag[n-1] = 0`.
fn tridiagonalize(h: &ComplexMatrix) -> (Vec<f64>, Vec<C64>, ComplexMatrix) {
    let n = h.rows();
    let mut a = h.clone();
    let mut q = ComplexMatrix::identity(n);
    let mut v = vec![ZERO; n];
    let mut p = vec![ZERO; n];
    for k in 0..n.saturating_sub(2) {
        let lo = k + 1;
        let xnorm = (lo..n).map(|i| a[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        if xnorm == 0.0 {
            continue;
        }
        let x0 = a[(lo, k)];
        let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { ONE };
        let alpha = -phase * xnorm;
        for i in lo..n {
            v[i] = a[(i, k)];
        }
        v[lo] -= alpha;
        let vnorm = (lo..n).map(|i| v[i].norm_sqr()).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        for vi in &mut v[lo..n] {
            *vi /= vnorm;
        }

        a[(lo, k)] = alpha;
        a[(k, lo)] = alpha.conj();
        for i in lo + 1..n {
            a[(i, k)] = ZERO;
            a[(k, i)] = ZERO;
        }

        // Trailing block update B <- B - 2 (v w† + w v†), w = Bv - (v†Bv) v.
        for i in lo..n {
            p[i] = (lo..n).map(|j| a[(i, j)] * v[j]).sum();
        }
        let kappa: C64 = (lo..n).map(|i| v[i].conj() * p[i]).sum();
        for i in lo..n {
            p[i] -= kappa * v[i];
        }
        for i in lo..n {
            for j in lo..n {
                let delta = v[i] * p[j].conj() + p[i] * v[j].conj();
                a[(i, j)] -= delta * 2.0;
            }
        }

        // q <- q (I - 2 v v†)
        for r in 0..n {
            let qv: C64 = (lo..n).map(|j| q[(r, j)] * v[j]).sum();
            for j in lo..n {
                q[(r, j)] -= qv * v[j].conj() * 2.0;
            }
        }
    }
    let diag = (0..n).map(|i| a[(i, i)].re).collect();
    let mut off = vec![ZERO; n];
    for i in 0..n.saturating_sub(1) {
        off[i] = a[(i + 1, i)];
    }
    (diag, off, q)
}

/// Implicit QL on a real symmetric tridiagonal matrix (`e[i]` couples `i`
/// and `i+1`). Overwrites `d` with the eigenvalues and returns the
/// eigenvectors as rows.
fn tql2(d: &mut [f64], e: &mut [f64]) -> Result<Vec<Vec<f64>>> {
    let n = d.len();
    let mut zt: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut row = vec![0.0; n];
            row[i] = 1.0;
            row
        })
        .collect();
    if n == 0 {
        return Ok(zt);
    }
    e[n - 1] = 0.0;
    let eps = f64::EPSILON;
    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > eps * tst1 {
            m += 1;
        }
        if m > l {
            let mut iterations = 0;
            loop {
                iterations += 1;
                if iterations > MAX_QL_ITERATIONS {
                    return Err(GpoError::NoConvergence {
                        index: l,
                        iterations: MAX_QL_ITERATIONS,
                    });
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let h = g - d[l];
                for di in &mut d[l + 2..n] {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    let h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    let (head, tail) = zt.split_at_mut(i + 1);
                    let (zi, zi1) = (&mut head[i], &mut tail[0]);
                    for (a, b) in zi.iter_mut().zip(zi1.iter_mut()) {
                        let hk = *b;
                        *b = s * *a + c * hk;
                        *a = c * *a - s * hk;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(zt)
}
