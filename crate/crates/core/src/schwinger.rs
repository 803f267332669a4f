// Copyright 2026 The gpolab Developers
// SPDX-License-Identifier: Apache-2.0

//! Expansion of operators over the Schwinger unitary basis `{B^b A^a}`.
//!
//! `A^a` is the cyclic permutation `|b_k⟩ → |b_{k+a}⟩` and `B^b` the diagonal
//! `ω^{bj}`, so the basis is cached as the clock phase table alone and every
//! trace `Tr(A^{-a} B^{-b} M) = Σ_j ω^{-b(j+a)} M_{j+a, j}` costs `O(n)`.

use rayon::prelude::*;
use serde::Serialize;

use crate::dense::{ComplexMatrix, C64, ZERO};
use crate::error::{GpoError, Result};
use crate::gpo::{Dimension, GpoGenerators};

/// Precomputed powers of the generators for one dimension.
#[derive(Clone, Debug)]
pub struct SchwingerBasis {
    dim: Dimension,
    /// `ω^r` for `r = 0..n`, read off the clock generator's diagonal.
    phases: Vec<C64>,
}

impl SchwingerBasis {
    pub fn new(gens: &GpoGenerators) -> Self {
        let dim = gens.dim;
        let diag = gens.b.diag();
        // diag[index(j)] = ω^j; reorder so phases[r] = ω^r.
        let phases = (0..dim.n() as i64).map(|r| diag[dim.index(r)]).collect();
        Self { dim, phases }
    }

    pub fn dim(&self) -> Dimension {
        self.dim
    }

    fn phase(&self, k: i64) -> C64 {
        self.phases[k.rem_euclid(self.dim.n() as i64) as usize]
    }

    /// `m_{b,a} = (1/n) Tr(A^{-a} B^{-b} M)` over the full grid.
    pub fn decompose(&self, m: &ComplexMatrix) -> Result<SchwingerCoefficients> {
        let dim = self.dim;
        let n = dim.n();
        if m.shape() != (n, n) {
            return Err(GpoError::DimensionMismatch {
                op: "decompose",
                left: m.shape(),
                right: (n, n),
            });
        }
        let inv_n = 1.0 / n as f64;
        // Column a of the grid only needs the a-th cyclic diagonal of M.
        let columns: Vec<Vec<C64>> = dim
            .labels()
            .collect::<Vec<_>>()
            .into_par_iter()
            .map(|a| {
                let diagonal: Vec<(i64, C64)> = dim
                    .labels()
                    .map(|j| {
                        let row = dim.index(j + a);
                        (dim.label(row), m[(row, dim.index(j))])
                    })
                    .collect();
                dim.labels()
                    .map(|b| {
                        diagonal
                            .iter()
                            .map(|&(shifted, entry)| self.phase(-b * shifted) * entry)
                            .sum::<C64>()
                            * inv_n
                    })
                    .collect()
            })
            .collect();
        let mut grid = vec![ZERO; n * n];
        for (ai, column) in columns.iter().enumerate() {
            for (bi, &value) in column.iter().enumerate() {
                grid[bi * n + ai] = value;
            }
        }
        Ok(SchwingerCoefficients { dim, m: grid })
    }

    /// `Σ_{b,a} m_{b,a} B^b A^a`.
    pub fn reconstruct(&self, coeffs: &SchwingerCoefficients) -> Result<ComplexMatrix> {
        if coeffs.dim != self.dim {
            return Err(GpoError::DimensionMismatch {
                op: "reconstruct",
                left: (coeffs.dim.n(), coeffs.dim.n()),
                right: (self.dim.n(), self.dim.n()),
            });
        }
        let dim = self.dim;
        let n = dim.n();
        // (B^b A^a)_{rc} = ω^{b j_r} when j_r = j_c + a.
        Ok(ComplexMatrix::from_fn(n, n, |r, c| {
            let j = dim.label(r);
            let a = dim.wrap(j - dim.label(c));
            dim.labels().map(|b| coeffs.get(b, a) * self.phase(b * j)).sum()
        }))
    }

    /// Dense `B^b A^a`.
    pub fn element(&self, b: i64, a: i64) -> ComplexMatrix {
        let dim = self.dim;
        let n = dim.n();
        ComplexMatrix::from_fn(n, n, |r, c| {
            let j = dim.label(r);
            if dim.wrap(j - dim.label(c)) == dim.wrap(a) {
                self.phase(b * j)
            } else {
                ZERO
            }
        })
    }
}

/// `m_{b,a}` on the grid `b, a ∈ {-l, ..., l}`, stored b-major at
/// `(b + l) * n + (a + l)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SchwingerCoefficients {
    pub dim: Dimension,
    m: Vec<C64>,
}

/// One CSV row of a coefficient grid.
#[derive(Clone, Debug, Serialize)]
pub struct CoefficientRow {
    pub b: i64,
    pub a: i64,
    pub re: f64,
    pub im: f64,
    pub abs: f64,
}

impl SchwingerCoefficients {
    pub fn zeros(dim: Dimension) -> Self {
        Self {
            dim,
            m: vec![ZERO; dim.n() * dim.n()],
        }
    }

    fn offset(&self, b: i64, a: i64) -> usize {
        self.dim.index(b) * self.dim.n() + self.dim.index(a)
    }

    /// Indices wrap cyclically.
    pub fn get(&self, b: i64, a: i64) -> C64 {
        self.m[self.offset(b, a)]
    }

    pub fn set(&mut self, b: i64, a: i64, value: C64) {
        let k = self.offset(b, a);
        self.m[k] = value;
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.m
    }

    pub fn abs_sum(&self) -> f64 {
        self.m.iter().map(|z| z.norm()).sum()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.m
            .iter()
            .zip(&other.m)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn linear_combination(&self, c1: C64, other: &Self, c2: C64) -> Self {
        Self {
            dim: self.dim,
            m: self.m.iter().zip(&other.m).map(|(&x, &y)| c1 * x + c2 * y).collect(),
        }
    }

    pub fn scale(&self, c: C64) -> Self {
        Self {
            dim: self.dim,
            m: self.m.iter().map(|&x| c * x).collect(),
        }
    }

    /// `max |m_{b,a} - ω^{-ba} conj(m_{-b,-a})|`; zero for Hermitian sources.
    pub fn hermiticity_residual(&self) -> f64 {
        let dim = self.dim;
        let mut worst: f64 = 0.0;
        for b in dim.labels() {
            for a in dim.labels() {
                let mirrored = dim.omega_pow(-b * a) * self.get(-b, -a).conj();
                worst = worst.max((self.get(b, a) - mirrored).norm());
            }
        }
        worst
    }

    pub fn rows(&self) -> impl Iterator<Item = CoefficientRow> + '_ {
        let dim = self.dim;
        dim.labels().flat_map(move |b| {
            dim.labels().map(move |a| {
                let z = self.get(b, a);
                CoefficientRow {
                    b,
                    a,
                    re: z.re,
                    im: z.im,
                    abs: z.norm(),
                }
            })
        })
    }
}
