// Copyright 2026 The gpolab Developers
// SPDX-License-Identifier: Apache-2.0

//! Clock and shift generators for odd dimension `n = 2l + 1`, Sylvester's
//! DFT matrix, the conjugate pair `(φ, π)` obtained from their principal
//! logarithms, and the commutator witness `Z` with `[φ, π] = iZ`.
//!
//! All matrices are indexed by lattice labels `j ∈ {-l, ..., l}` stored at
//! row/column `j + l`.

use serde::Serialize;
use std::f64::consts::PI;

use crate::dense::{commutator, ComplexMatrix, C64, I, ONE, ZERO};
use crate::error::{GpoError, Result};

/// Odd Hilbert-space dimension `n = 2l + 1` with root of unity `ω = e^{2πi/n}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Dimension {
    l: usize,
}

impl Dimension {
    pub fn new(l: usize) -> Self {
        Self { l }
    }

    /// Accepts only odd `n`.
    pub fn from_n(n: usize) -> Result<Self> {
        if n.is_multiple_of(2) {
            return Err(GpoError::InvalidInput(format!("dimension {n} is not odd")));
        }
        Ok(Self { l: (n - 1) / 2 })
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn n(&self) -> usize {
        2 * self.l + 1
    }

    pub fn omega(&self) -> C64 {
        self.omega_pow(1)
    }

    /// `ω^k`, with the exponent reduced modulo `n` before evaluation.
    pub fn omega_pow(&self, k: i64) -> C64 {
        let n = self.n() as i64;
        let r = k.rem_euclid(n);
        C64::from_polar(1.0, 2.0 * PI * r as f64 / n as f64)
    }

    /// Storage index of label `j`, wrapping cyclically.
    pub fn index(&self, j: i64) -> usize {
        (j + self.l as i64).rem_euclid(self.n() as i64) as usize
    }

    /// Lattice label of storage index `row`.
    pub fn label(&self, row: usize) -> i64 {
        row as i64 - self.l as i64
    }

    /// Reduces any integer to its representative in `{-l, ..., l}`.
    pub fn wrap(&self, j: i64) -> i64 {
        self.label(self.index(j))
    }

    pub fn labels(&self) -> impl Iterator<Item = i64> {
        let l = self.l as i64;
        -l..=l
    }
}

#[derive(Clone, Debug)]
pub struct GpoGenerators {
    pub dim: Dimension,
    /// Cyclic shift: `A|b_j⟩ = |b_{j+1}⟩`.
    pub a: ComplexMatrix,
    /// Clock: `diag(ω^{-l}, ..., ω^{l})`.
    pub b: ComplexMatrix,
    /// Sylvester's matrix `ω^{jk}/√n`, with `S A S⁻¹ = B`.
    pub s: ComplexMatrix,
}

/// Invariant residuals of a generator set. All entries are max-norms.
#[derive(Clone, Debug, Serialize)]
pub struct GeneratorChecks {
    pub unitarity_a: f64,
    pub unitarity_b: f64,
    pub unitarity_s: f64,
    /// `‖AB - ω⁻¹BA‖`.
    pub braiding: f64,
    pub toroidal_a: f64,
    pub toroidal_b: f64,
    /// `max_j |Tr(A^j) - nδ_{j0}|` over `0 ≤ j < n`.
    pub trace_a: f64,
    pub trace_b: f64,
    /// `‖S A S⁻¹ - B‖`.
    pub sylvester: f64,
}

impl GeneratorChecks {
    pub const UNITARITY_TOL: f64 = 1e-10;
    pub const BRAIDING_TOL: f64 = 1e-12;
    pub const TOROIDAL_TOL: f64 = 1e-9;
    pub const TRACE_TOL: f64 = 1e-9;
    pub const SYLVESTER_TOL: f64 = 1e-10;

    /// Names and measured values of every invariant that exceeds its tolerance.
    pub fn violations(&self) -> Vec<(&'static str, f64, f64)> {
        [
            ("unitarity_a", self.unitarity_a, Self::UNITARITY_TOL),
            ("unitarity_b", self.unitarity_b, Self::UNITARITY_TOL),
            ("unitarity_s", self.unitarity_s, Self::UNITARITY_TOL),
            ("braiding", self.braiding, Self::BRAIDING_TOL),
            ("toroidal_a", self.toroidal_a, Self::TOROIDAL_TOL),
            ("toroidal_b", self.toroidal_b, Self::TOROIDAL_TOL),
            ("trace_a", self.trace_a, Self::TRACE_TOL),
            ("trace_b", self.trace_b, Self::TRACE_TOL),
            ("sylvester", self.sylvester, Self::SYLVESTER_TOL),
        ]
        .into_iter()
        .filter(|(_, v, tol)| v.is_nan() || v > tol)
        .collect()
    }
}

impl GpoGenerators {
    pub fn new(dim: Dimension) -> Self {
        let n = dim.n();
        let a = ComplexMatrix::from_fn(n, n, |r, c| if r == (c + 1) % n { ONE } else { ZERO });
        let clock: Vec<C64> = dim.labels().map(|j| dim.omega_pow(j)).collect();
        let b = ComplexMatrix::diagonal(&clock);
        let norm = 1.0 / (n as f64).sqrt();
        let s = ComplexMatrix::from_fn(n, n, |r, c| dim.omega_pow(dim.label(r) * dim.label(c)) * norm);
        Self { dim, a, b, s }
    }

    /// `A^k` for any integer `k`; negative powers use `A†`.
    pub fn a_pow(&self, k: i64) -> ComplexMatrix {
        signed_pow(&self.a, k)
    }

    pub fn b_pow(&self, k: i64) -> ComplexMatrix {
        signed_pow(&self.b, k)
    }

    /// Eigenvectors of `A` as columns: column `k` of `S`, with
    /// `A|a_k⟩ = ω^{-k}|a_k⟩` and `B|a_k⟩ = |a_{k+1}⟩`. These are also the
    /// eigenvectors of `π` (eigenvalue `kβ`).
    pub fn a_eigenvectors(&self) -> ComplexMatrix {
        self.s.clone()
    }

    pub fn checks(&self) -> GeneratorChecks {
        let n = self.dim.n();
        let eye = ComplexMatrix::identity(n);
        let ab = self.a.matmul(&self.b).expect("square");
        let ba = self.b.matmul(&self.a).expect("square");
        let braiding = ab.max_abs_diff(&ba.scale(self.dim.omega_pow(-1))).expect("square");
        let trace_residual = |m: &ComplexMatrix| {
            let mut power = ComplexMatrix::identity(n);
            let mut worst: f64 = 0.0;
            for j in 0..n {
                let expected = if j == 0 { n as f64 } else { 0.0 };
                worst = worst.max((power.trace() - expected).norm());
                power = power.matmul(m).expect("square");
            }
            // `power` is now m^n.
            (worst, power.max_abs_diff(&eye).expect("square"))
        };
        let (trace_a, toroidal_a) = trace_residual(&self.a);
        let (trace_b, toroidal_b) = trace_residual(&self.b);
        let sylvester = self
            .s
            .matmul(&self.a)
            .and_then(|sa| sa.matmul(&self.s.adjoint()))
            .and_then(|m| m.max_abs_diff(&self.b))
            .expect("square");
        GeneratorChecks {
            unitarity_a: self.a.unitarity_residual().expect("square"),
            unitarity_b: self.b.unitarity_residual().expect("square"),
            unitarity_s: self.s.unitarity_residual().expect("square"),
            braiding,
            toroidal_a,
            toroidal_b,
            trace_a,
            trace_b,
            sylvester,
        }
    }
}

fn signed_pow(u: &ComplexMatrix, k: i64) -> ComplexMatrix {
    let base = if k < 0 { u.adjoint() } else { u.clone() };
    base.pow(k.unsigned_abs() as u32).expect("generators are square")
}

/// Self-adjoint `φ`, `π` with `A = exp(-iαπ)`, `B = exp(iβφ)` and `αβn = 2π`.
#[derive(Clone, Debug)]
pub struct ConjugatePair {
    pub dim: Dimension,
    pub alpha: f64,
    pub beta: f64,
    pub phi: ComplexMatrix,
    pub pi: ComplexMatrix,
}

/// The symmetric scale `α = β = √(2π/n)`.
pub fn symmetric_scale(dim: Dimension) -> f64 {
    (2.0 * PI / dim.n() as f64).sqrt()
}

impl ConjugatePair {
    /// Builds the pair with the symmetric scale.
    pub fn new(gens: &GpoGenerators) -> Self {
        Self::with_alpha(gens, symmetric_scale(gens.dim)).expect("symmetric scale is positive")
    }

    /// `φ = diag(jα)` and `π = -(β/α) S⁻¹ φ S`, i.e. the principal logarithms
    /// of `B` and `A` on the symmetric branch `{-l, ..., l}`.
    pub fn with_alpha(gens: &GpoGenerators, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(GpoError::InvalidInput(format!("alpha must be positive, got {alpha}")));
        }
        let dim = gens.dim;
        let beta = 2.0 * PI / (dim.n() as f64 * alpha);
        let phi_diag: Vec<f64> = dim.labels().map(|j| j as f64 * alpha).collect();
        let phi = ComplexMatrix::real_diagonal(&phi_diag);
        let pi = gens
            .s
            .adjoint()
            .matmul(&phi)?
            .matmul(&gens.s)?
            .scale_real(-beta / alpha);
        Ok(Self {
            dim,
            alpha,
            beta,
            phi,
            pi,
        })
    }

    pub fn constraint_residual(&self) -> f64 {
        (self.alpha * self.beta * self.dim.n() as f64 - 2.0 * PI).abs()
    }

    /// `exp(-iαπ)` through `π`'s eigenbasis `S†`.
    pub fn shift_from_pi(&self, gens: &GpoGenerators) -> ComplexMatrix {
        let phases: Vec<C64> = self
            .dim
            .labels()
            .map(|j| (I * self.beta * j as f64 * self.alpha).exp())
            .collect();
        gens.s
            .adjoint()
            .matmul(&ComplexMatrix::diagonal(&phases))
            .and_then(|m| m.matmul(&gens.s))
            .expect("shared dimension")
    }

    /// `exp(iβφ)`, diagonal.
    pub fn clock_from_phi(&self) -> ComplexMatrix {
        let phases: Vec<C64> = self.phi.diag().iter().map(|&x| (I * self.beta * x).exp()).collect();
        ComplexMatrix::diagonal(&phases)
    }

    /// Parity residuals `(‖S⁴ - I‖, ‖S²φS⁻² + φ‖, ‖S²πS⁻² + π‖)`.
    pub fn parity_residuals(&self, gens: &GpoGenerators) -> (f64, f64, f64) {
        let s2 = gens.s.matmul(&gens.s).expect("square");
        let s2_inv = s2.adjoint();
        let s4 = s2.matmul(&s2).expect("square");
        let flip = |m: &ComplexMatrix| {
            s2.matmul(m)
                .and_then(|x| x.matmul(&s2_inv))
                .and_then(|x| x.add(m))
                .map(|x| x.max_norm())
                .expect("square")
        };
        (
            s4.max_abs_diff(&ComplexMatrix::identity(self.dim.n())).expect("square"),
            flip(&self.phi),
            flip(&self.pi),
        )
    }
}

/// `⟨φ_j|π|φ_j'⟩ = (2π/(n²α)) Σ_m m e^{2πi(j-j')m/n}`; the finite sum that
/// defines `π` entrywise.
pub fn pi_finite_sum(dim: Dimension, alpha: f64) -> ComplexMatrix {
    let n = dim.n();
    let prefactor = 2.0 * PI / ((n * n) as f64 * alpha);
    let column: Vec<C64> = (0..n as i64)
        .map(|d| dim.labels().map(|m| dim.omega_pow(d * m) * m as f64).sum::<C64>() * prefactor)
        .collect();
    ComplexMatrix::from_fn(n, n, |r, c| column[(r as i64 - c as i64).rem_euclid(n as i64) as usize])
}

/// `⟨φ_j|π|φ_j'⟩ = (iπ/(nα)) cosec(2πl(j-j')/n)` off the diagonal, 0 on it.
pub fn pi_closed_form(dim: Dimension, alpha: f64) -> ComplexMatrix {
    let n = dim.n();
    let l = dim.l() as f64;
    ComplexMatrix::from_fn(n, n, |r, c| {
        if r == c {
            return ZERO;
        }
        let d = r as f64 - c as f64;
        let cosec = 1.0 / (2.0 * PI * l * d / n as f64).sin();
        I * (PI / (n as f64 * alpha)) * cosec
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessSource {
    /// `-i[φ, π]` from the dense matrices.
    Direct,
    /// `(π(j-j')/n) cosec(2πl(j-j')/n)` entrywise.
    ClosedForm,
}

/// Hermitian `Z` with `[φ, π] = iZ`.
#[derive(Clone, Debug, Serialize)]
pub struct CommutatorWitness {
    pub dim: Dimension,
    pub z: ComplexMatrix,
    pub source: WitnessSource,
}

pub fn commutator_witness(
    pair: &ConjugatePair,
    gens: &GpoGenerators,
    source: WitnessSource,
) -> Result<CommutatorWitness> {
    if pair.dim != gens.dim {
        return Err(GpoError::DimensionMismatch {
            op: "commutator_witness",
            left: (pair.dim.n(), pair.dim.n()),
            right: (gens.dim.n(), gens.dim.n()),
        });
    }
    let residual = pair.constraint_residual();
    if residual > 1e-12 {
        return Err(GpoError::InvalidInput(format!(
            "alpha*beta*n deviates from 2π by {residual:e}"
        )));
    }
    let dim = pair.dim;
    let z = match source {
        WitnessSource::Direct => commutator(&pair.phi, &pair.pi)?.scale(-I),
        WitnessSource::ClosedForm => {
            let n = dim.n() as f64;
            let l = dim.l() as f64;
            ComplexMatrix::from_fn(dim.n(), dim.n(), |r, c| {
                if r == c {
                    return ZERO;
                }
                let d = r as f64 - c as f64;
                C64::new(PI * d / n / (2.0 * PI * l * d / n).sin(), 0.0)
            })
        }
    };
    Ok(CommutatorWitness { dim, z, source })
}

impl CommutatorWitness {
    /// Largest deviation from a real, symmetric, Toeplitz matrix with zero diagonal.
    pub fn structure_residual(&self) -> f64 {
        let n = self.dim.n();
        let z = &self.z;
        let mut worst: f64 = 0.0;
        for r in 0..n {
            worst = worst.max(z[(r, r)].norm());
            for c in 0..n {
                worst = worst.max(z[(r, c)].im.abs());
                worst = worst.max((z[(r, c)] - z[(c, r)]).norm());
                if r + 1 < n && c + 1 < n {
                    worst = worst.max((z[(r, c)] - z[(r + 1, c + 1)]).norm());
                }
            }
        }
        worst
    }
}
