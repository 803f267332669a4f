// Copyright 2026 The gpolab Developers
// SPDX-License-Identifier: Apache-2.0

//! Shift profiles and operator collimation.
//!
//! The normalized amplitudes `|m̃_{b,a}|` form a distribution over the
//! Schwinger grid. Marginalizing over `b` gives the φ-shift profile (how far
//! the operator moves φ eigenstates), over `a` the π-shift profile.
//! Collimation is the profile's average under a decaying kernel, by default
//! `exp(-|k|/n)`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::dense::{ComplexMatrix, C64};
use crate::error::{GpoError, Result};
use crate::gpo::{ConjugatePair, Dimension};
use crate::schwinger::SchwingerCoefficients;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    /// Shifts of φ eigenstates (index `a`).
    Phi,
    /// Shifts of π eigenstates (index `b`).
    Pi,
}

#[derive(Clone, Debug, Serialize)]
pub struct ShiftProfile {
    pub dim: Dimension,
    pub axis: Axis,
    /// `weights[k + l]` is the weight of a `k`-unit shift.
    pub weights: Vec<f64>,
}

impl ShiftProfile {
    pub fn weight(&self, shift: i64) -> f64 {
        self.weights[self.dim.index(shift)]
    }

    /// `(shift, weight)` pairs in ascending shift order.
    pub fn entries(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.dim.labels().zip(self.weights.iter().copied())
    }
}

/// `m̃_{b,a} = m_{b,a} / Σ|m|`.
pub fn normalize(coeffs: &SchwingerCoefficients) -> Result<SchwingerCoefficients> {
    let total = coeffs.abs_sum();
    if total.is_nan() || total <= 0.0 {
        return Err(GpoError::ZeroOperator);
    }
    Ok(coeffs.scale(C64::new(1.0 / total, 0.0)))
}

pub fn shift_profile(coeffs: &SchwingerCoefficients, axis: Axis) -> Result<ShiftProfile> {
    let normalized = normalize(coeffs)?;
    let dim = coeffs.dim;
    let weights = dim
        .labels()
        .map(|k| {
            dim.labels()
                .map(|other| match axis {
                    Axis::Phi => normalized.get(other, k).norm(),
                    Axis::Pi => normalized.get(k, other).norm(),
                })
                .sum()
        })
        .collect();
    Ok(ShiftProfile { dim, axis, weights })
}

/// Weight given to a shift of `|k|` units in an `n`-dimensional space.
pub trait DecayKernel {
    fn weight(&self, shift: i64, n: usize) -> f64;
}

/// `exp(-|k|/n)`.
#[derive(Clone, Copy, Debug, Default)]
pub struct ExponentialDecay;

impl DecayKernel for ExponentialDecay {
    fn weight(&self, shift: i64, n: usize) -> f64 {
        (-(shift.unsigned_abs() as f64) / n as f64).exp()
    }
}

impl<F: Fn(i64, usize) -> f64> DecayKernel for F {
    fn weight(&self, shift: i64, n: usize) -> f64 {
        self(shift, n)
    }
}

pub fn collimation(profile: &ShiftProfile) -> f64 {
    collimation_with(profile, &ExponentialDecay)
}

pub fn collimation_with(profile: &ShiftProfile, kernel: &impl DecayKernel) -> f64 {
    let n = profile.dim.n();
    profile.entries().map(|(k, w)| w * kernel.weight(k, n)).sum()
}

#[derive(Clone, Debug, Serialize)]
pub struct CollimationReport {
    pub dim: Dimension,
    pub c_phi: f64,
    pub c_pi: f64,
    pub phi_profile: ShiftProfile,
    pub pi_profile: ShiftProfile,
}

impl CollimationReport {
    pub fn new(coeffs: &SchwingerCoefficients) -> Result<Self> {
        let phi_profile = shift_profile(coeffs, Axis::Phi)?;
        let pi_profile = shift_profile(coeffs, Axis::Pi)?;
        Ok(Self {
            dim: coeffs.dim,
            c_phi: collimation(&phi_profile),
            c_pi: collimation(&pi_profile),
            phi_profile,
            pi_profile,
        })
    }
}

/// Hermitian matrix with standard-normal real diagonal and standard-normal
/// complex off-diagonal entries (independent real and imaginary parts). The
/// upper triangle is drawn row by row from a ChaCha8 stream; the lower
/// triangle is its conjugate.
pub fn random_hermitian(dim: Dimension, seed: u64) -> ComplexMatrix {
    let n = dim.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut m = ComplexMatrix::zeros(n, n);
    for r in 0..n {
        let x: f64 = StandardNormal.sample(&mut rng);
        m[(r, r)] = C64::new(x, 0.0);
        for c in r + 1..n {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            m[(r, c)] = C64::new(re, im);
            m[(c, r)] = C64::new(re, -im);
        }
    }
    m
}

/// `π^1, ..., π^max_power` by repeated dense multiplication.
pub fn pi_powers(pair: &ConjugatePair, max_power: u32) -> Vec<ComplexMatrix> {
    let mut out = Vec::with_capacity(max_power as usize);
    let mut current = pair.pi.clone();
    for k in 1..=max_power {
        if k > 1 {
            current = current.matmul(&pair.pi).expect("square");
        }
        out.push(current.clone());
    }
    out
}

/// `π^k` through its eigenbasis `S`: `S diag((jβ)^k) S†`.
pub fn pi_power_spectral(pair: &ConjugatePair, s: &ComplexMatrix, power: u32) -> ComplexMatrix {
    let eig: Vec<C64> = pair
        .dim
        .labels()
        .map(|j| C64::new((j as f64 * pair.beta).powi(power as i32), 0.0))
        .collect();
    s.matmul(&ComplexMatrix::diagonal(&eig))
        .and_then(|m| m.matmul(&s.adjoint()))
        .expect("square")
}
