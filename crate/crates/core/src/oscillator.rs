// Copyright 2026 The gpolab Developers
// SPDX-License-Identifier: Apache-2.0

//! The finite-dimensional harmonic oscillator `H = π²/2 + Ω²φ²/2`.

use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

use crate::dense::{commutator, hermitian_eig, ComplexMatrix, C64, I};
use crate::error::{GpoError, Result};
use crate::gpo::{symmetric_scale, ConjugatePair, Dimension, GpoGenerators};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OscillatorSpec {
    pub dim: Dimension,
    pub omega_freq: f64,
}

impl OscillatorSpec {
    pub fn new(dim: Dimension, omega_freq: f64) -> Result<Self> {
        if !(omega_freq > 0.0 && omega_freq.is_finite()) {
            return Err(GpoError::InvalidInput(format!(
                "oscillator frequency must be positive, got {omega_freq}"
            )));
        }
        Ok(Self { dim, omega_freq })
    }

    /// `(πl²/n)(1 + Ω²)`, from `λ_max(P + Q) ≤ λ_max(P) + λ_max(Q)`.
    pub fn lambda_max_bound(&self) -> f64 {
        let l = self.dim.l() as f64;
        PI * l * l / self.dim.n() as f64 * (1.0 + self.omega_freq * self.omega_freq)
    }
}

fn check_pair(spec: &OscillatorSpec, pair: &ConjugatePair) -> Result<()> {
    if spec.dim != pair.dim {
        return Err(GpoError::DimensionMismatch {
            op: "build_hamiltonian",
            left: (spec.dim.n(), spec.dim.n()),
            right: (pair.dim.n(), pair.dim.n()),
        });
    }
    Ok(())
}

/// `π²/2 + Ω²φ²/2` from the dense matrices.
pub fn build_hamiltonian(spec: &OscillatorSpec, pair: &ConjugatePair) -> Result<ComplexMatrix> {
    check_pair(spec, pair)?;
    let kinetic = pair.pi.matmul(&pair.pi)?;
    let potential = pair.phi.matmul(&pair.phi)?;
    let h = kinetic.add_scaled(C64::new(spec.omega_freq * spec.omega_freq, 0.0), &potential)?;
    Ok(h.scale_real(0.5))
}

/// Sign convention for the off-diagonal cosecant sum of the φ-basis matrix
/// elements.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OffDiagonalSign {
    /// `+π/(4n) Σ csc csc`, the commonly quoted form.
    Plus,
    /// `-π/(4n) Σ csc csc`, which carries the `i²` from `π_{jm} π_{mj'}`.
    Minus,
}

/// φ-basis matrix elements of `H` at the symmetric scale, summed from
/// cosecants:
///
/// ```text
/// H_jj  = Σ_{m≠j} π/(4n) csc²(2πl(j-m)/n) + Ω²π j²/n
/// H_jj' = ± Σ_{m≠j,j'} π/(4n) csc(2πl(j-m)/n) csc(2πl(m-j')/n)
/// ```
pub fn csc_hamiltonian(spec: &OscillatorSpec, sign: OffDiagonalSign) -> ComplexMatrix {
    let dim = spec.dim;
    let n = dim.n();
    let nf = n as f64;
    let l = dim.l() as f64;
    let csc = |d: i64| 1.0 / (2.0 * PI * l * d as f64 / nf).sin();
    let prefactor = PI / (4.0 * nf);
    let off = match sign {
        OffDiagonalSign::Plus => prefactor,
        OffDiagonalSign::Minus => -prefactor,
    };
    ComplexMatrix::from_fn(n, n, |r, c| {
        let (j, jp) = (dim.label(r), dim.label(c));
        let value = if r == c {
            dim.labels()
                .filter(|&m| m != j)
                .map(|m| csc(j - m).powi(2))
                .sum::<f64>()
                * prefactor
                + spec.omega_freq * spec.omega_freq * PI * (j * j) as f64 / nf
        } else {
            dim.labels()
                .filter(|&m| m != j && m != jp)
                .map(|m| csc(j - m) * csc(m - jp))
                .sum::<f64>()
                * off
        };
        C64::new(value, 0.0)
    })
}

/// Entrywise comparison of the matrix-built `H` against [`csc_hamiltonian`].
#[derive(Clone, Debug, Serialize)]
pub struct CscCrossCheck {
    pub diagonal: f64,
    pub off_diagonal_plus: f64,
    pub off_diagonal_minus: f64,
}

pub fn csc_cross_check(spec: &OscillatorSpec, pair: &ConjugatePair) -> Result<CscCrossCheck> {
    let h = build_hamiltonian(spec, pair)?;
    let n = spec.dim.n();
    let compare = |other: &ComplexMatrix| {
        let mut diag: f64 = 0.0;
        let mut off: f64 = 0.0;
        for r in 0..n {
            for c in 0..n {
                let d = (h[(r, c)] - other[(r, c)]).norm();
                if r == c {
                    diag = diag.max(d);
                } else {
                    off = off.max(d);
                }
            }
        }
        (diag, off)
    };
    let (diagonal, off_diagonal_plus) = compare(&csc_hamiltonian(spec, OffDiagonalSign::Plus));
    let (_, off_diagonal_minus) = compare(&csc_hamiltonian(spec, OffDiagonalSign::Minus));
    Ok(CscCrossCheck {
        diagonal,
        off_diagonal_plus,
        off_diagonal_minus,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumResult {
    pub spec: OscillatorSpec,
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    pub lambda_min: f64,
    pub lambda_max: f64,
    /// `λ_k/Ω - (k + 1/2)`.
    pub vanilla_deviation: Vec<f64>,
}

impl SpectrumResult {
    pub fn normalized(&self) -> impl Iterator<Item = f64> + '_ {
        self.eigenvalues.iter().map(|&x| x / self.spec.omega_freq)
    }
}

/// Spectrum at the symmetric scale `α = β = √(2π/n)`.
pub fn spectrum(spec: &OscillatorSpec) -> Result<SpectrumResult> {
    let gens = GpoGenerators::new(spec.dim);
    let pair = ConjugatePair::with_alpha(&gens, symmetric_scale(spec.dim))?;
    spectrum_with(spec, &pair)
}

pub fn spectrum_with(spec: &OscillatorSpec, pair: &ConjugatePair) -> Result<SpectrumResult> {
    let h = build_hamiltonian(spec, pair)?;
    let eigenvalues = hermitian_eig(&h)?.eigenvalues;
    let omega = spec.omega_freq;
    let vanilla_deviation = eigenvalues
        .iter()
        .enumerate()
        .map(|(k, &lam)| lam / omega - (k as f64 + 0.5))
        .collect();
    Ok(SpectrumResult {
        spec: *spec,
        lambda_min: eigenvalues[0],
        lambda_max: *eigenvalues.last().expect("dimension is at least 1"),
        eigenvalues,
        vanilla_deviation,
    })
}

/// `a = √(Ω/2) φ + iπ/√(2Ω)` and its adjoint. Their commutator is the
/// non-central `Z`, not the identity.
pub fn ladder_operators(spec: &OscillatorSpec, pair: &ConjugatePair) -> Result<(ComplexMatrix, ComplexMatrix)> {
    check_pair(spec, pair)?;
    let omega = spec.omega_freq;
    let phi_part = pair.phi.scale_real((omega / 2.0).sqrt());
    let pi_coeff = I / (2.0 * omega).sqrt();
    let a = phi_part.add_scaled(pi_coeff, &pair.pi)?;
    let a_dagger = phi_part.add_scaled(-pi_coeff, &pair.pi)?;
    Ok((a, a_dagger))
}

/// `Ω(a†a + [a, a†]/2)`, which equals `H`.
pub fn hamiltonian_from_ladder(
    spec: &OscillatorSpec,
    a: &ComplexMatrix,
    a_dagger: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    let number = a_dagger.matmul(a)?;
    let comm = commutator(a, a_dagger)?;
    Ok(number
        .add_scaled(C64::new(0.5, 0.0), &comm)?
        .scale_real(spec.omega_freq))
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub l: usize,
    pub dim: usize,
    pub omega: f64,
    pub lambda_min_over_omega: f64,
    pub lambda_max_over_omega: f64,
    pub bound_over_omega: f64,
    #[serde(skip)]
    pub eigenvalues: Option<Vec<f64>>,
}

/// One row per `(l, Ω)` cell, sorted by `(l, Ω)`. Cells are evaluated in
/// parallel on the current rayon pool.
pub fn sweep(ls: &[usize], omegas: &[f64], keep_spectra: bool) -> Result<Vec<SweepRow>> {
    if ls.is_empty() || omegas.is_empty() {
        return Err(GpoError::InvalidInput(
            "sweep needs at least one l and one omega".into(),
        ));
    }
    let mut cells: Vec<(usize, f64)> = ls.iter().flat_map(|&l| omegas.iter().map(move |&w| (l, w))).collect();
    cells.sort_by(|x, y| x.0.cmp(&y.0).then(x.1.total_cmp(&y.1)));
    cells.dedup();
    cells
        .into_par_iter()
        .map(|(l, omega)| {
            let spec = OscillatorSpec::new(Dimension::new(l), omega)?;
            let result = spectrum(&spec)?;
            Ok(SweepRow {
                l,
                dim: spec.dim.n(),
                omega,
                lambda_min_over_omega: result.lambda_min / omega,
                lambda_max_over_omega: result.lambda_max / omega,
                bound_over_omega: spec.lambda_max_bound() / omega,
                eigenvalues: keep_spectra.then_some(result.eigenvalues),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gpo::{commutator_witness, WitnessSource};

    fn setup(l: usize, omega: f64) -> (GpoGenerators, ConjugatePair, OscillatorSpec) {
        let g = GpoGenerators::new(Dimension::new(l));
        let p = ConjugatePair::new(&g);
        let spec = OscillatorSpec::new(g.dim, omega).unwrap();
        (g, p, spec)
    }

    /// Real roots of `x³ + a x² + b x + c` by the trigonometric method.
    fn cubic_roots(a: f64, b: f64, c: f64) -> [f64; 3] {
        let p = b - a * a / 3.0;
        let q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
        let m = 2.0 * (-p / 3.0).sqrt();
        let theta = (3.0 * q / (p * m)).clamp(-1.0, 1.0).acos() / 3.0;
        let mut roots = [0.0; 3];
        for (k, root) in roots.iter_mut().enumerate() {
            *root = m * (theta - 2.0 * PI * k as f64 / 3.0).cos() - a / 3.0;
        }
        roots.sort_by(f64::total_cmp);
        roots
    }

    #[test]
    fn spec_rejects_bad_frequency() {
        for w in [0.0, -1.0, f64::INFINITY] {
            assert!(OscillatorSpec::new(Dimension::new(2), w).is_err());
        }
    }

    #[test]
    fn trivial_dimension() {
        let (_, p, spec) = setup(0, 1.0);
        assert_eq!(build_hamiltonian(&spec, &p).unwrap().max_norm(), 0.0);
        let s = spectrum(&spec).unwrap();
        assert_eq!(s.eigenvalues, vec![0.0]);
        assert_eq!(s.lambda_min, s.lambda_max);
    }

    #[test]
    fn qutrit_hamiltonian_against_products_and_cubic() {
        let (_, p, spec) = setup(1, 1.0);
        let h = build_hamiltonian(&spec, &p).unwrap();
        assert!(h.hermitian_residual().unwrap() <= 1e-10);
        // Direct products.
        let want =
            p.pi.matmul(&p.pi)
                .unwrap()
                .add(&p.phi.matmul(&p.phi).unwrap())
                .unwrap()
                .scale_real(0.5);
        assert!(h.max_abs_diff(&want).unwrap() < 1e-14);
        // Potential part of the diagonal: Ω²π j²/3.
        let kinetic = p.pi.matmul(&p.pi).unwrap().scale_real(0.5);
        for (r, j) in spec.dim.labels().enumerate() {
            let pot = PI * (j * j) as f64 / 3.0;
            assert!((h[(r, r)].re - kinetic[(r, r)].re - pot).abs() < 1e-12);
        }
        // Characteristic polynomial λ³ - tr λ² + e2 λ - det.
        let m = |r: usize, c: usize| h[(r, c)];
        let tr = h.trace();
        let e2 = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0) + m(0, 0) * m(2, 2) - m(0, 2) * m(2, 0) + m(1, 1) * m(2, 2)
            - m(1, 2) * m(2, 1);
        let det = m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0))
            + m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
        let roots = cubic_roots(-tr.re, e2.re, -det.re);
        let got = spectrum(&spec).unwrap().eigenvalues;
        for (x, y) in got.iter().zip(roots) {
            assert!((x - y).abs() < 1e-10, "{got:?} vs {roots:?}");
        }
    }

    #[test]
    fn trace_is_linear() {
        for (l, w) in [(3, 0.5), (8, 2.0)] {
            let (_, p, spec) = setup(l, w);
            let h = build_hamiltonian(&spec, &p).unwrap();
            let pi2 = p.pi.matmul(&p.pi).unwrap().trace();
            let phi2 = p.phi.matmul(&p.phi).unwrap().trace();
            assert!((h.trace() - (pi2 + phi2 * w * w) * 0.5).norm() < 1e-9);
        }
    }

    #[test]
    fn csc_elements_diagonal_agrees_and_off_diagonal_needs_minus() {
        for (l, w) in [(1, 1.0), (3, 2.0), (10, 0.7)] {
            let (_, p, spec) = setup(l, w);
            let check = csc_cross_check(&spec, &p).unwrap();
            assert!(check.diagonal < 1e-10, "{check:?}");
            assert!(check.off_diagonal_minus < 1e-10, "{check:?}");
            assert!(check.off_diagonal_plus > 1e-3, "{check:?}");
        }
    }

    #[test]
    fn spectrum_invariants() {
        for (l, w) in [(2, 1.0), (10, 0.5), (15, 3.0), (30, 10.0)] {
            let (g, p, spec) = setup(l, w);
            let s = spectrum(&spec).unwrap();
            assert!(s.eigenvalues.windows(2).all(|x| x[0] <= x[1]));
            assert!(s.lambda_max <= spec.lambda_max_bound() + 1e-9);
            assert!(s.lambda_min >= -1e-9);
            // Basis independence under S.
            let h = build_hamiltonian(&spec, &p).unwrap();
            let rotated = g.s.matmul(&h).unwrap().matmul(&g.s.adjoint()).unwrap();
            let rotated = rotated.add(&rotated.adjoint()).unwrap().scale_real(0.5);
            let ev = hermitian_eig(&rotated).unwrap().eigenvalues;
            for (x, y) in ev.iter().zip(&s.eigenvalues) {
                assert!((x - y).abs() <= 1e-9 * s.lambda_max.max(1.0));
            }
        }
    }

    #[test]
    fn frequency_duality() {
        for l in [5, 20] {
            for w in [2.0, 3.5] {
                let (_, _, a) = setup(l, w);
                let (_, _, b) = setup(l, 1.0 / w);
                let sa: Vec<f64> = spectrum(&a).unwrap().normalized().collect();
                let sb: Vec<f64> = spectrum(&b).unwrap().normalized().collect();
                for (x, y) in sa.iter().zip(&sb) {
                    assert!((x - y).abs() <= 1e-8, "l={l} w={w}");
                }
            }
        }
    }

    #[test]
    fn ladder_operators_identities() {
        for l in [1, 4] {
            let (g, p, spec) = setup(l, 1.3);
            let (a, ad) = ladder_operators(&spec, &p).unwrap();
            assert!(a.adjoint().max_abs_diff(&ad).unwrap() < 1e-15);
            let h = build_hamiltonian(&spec, &p).unwrap();
            assert!(
                hamiltonian_from_ladder(&spec, &a, &ad)
                    .unwrap()
                    .max_abs_diff(&h)
                    .unwrap()
                    <= 1e-9
            );
            let z = commutator_witness(&p, &g, WitnessSource::Direct).unwrap().z;
            let comm = commutator(&a, &ad).unwrap();
            assert!(comm.max_abs_diff(&z).unwrap() <= 1e-10);
            if l == 1 {
                let eye = ComplexMatrix::identity(3);
                assert!(comm.max_abs_diff(&eye).unwrap() > 0.1);
            }
        }
    }

    #[test]
    fn sweep_single_trivial_cell() {
        let rows = sweep(&[0], &[1.0], true).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].lambda_min_over_omega, 0.0);
        assert_eq!(rows[0].lambda_max_over_omega, 0.0);
        assert!(sweep(&[], &[1.0], false).is_err());
    }

    #[test]
    fn sweep_is_sorted_and_deterministic() {
        let a = sweep(&[6, 2, 4], &[2.0, 0.5], false).unwrap();
        let keys: Vec<(usize, f64)> = a.iter().map(|r| (r.l, r.omega)).collect();
        assert_eq!(keys, vec![(2, 0.5), (2, 2.0), (4, 0.5), (4, 2.0), (6, 0.5), (6, 2.0)]);
        let b = sweep(&[4, 6, 2], &[0.5, 2.0], false).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.lambda_min_over_omega, y.lambda_min_over_omega);
            assert_eq!(x.lambda_max_over_omega, y.lambda_max_over_omega);
        }
    }

    #[test]
    fn lambda_min_suppressed_for_large_frequency() {
        let rows = sweep(&[5], &[1.0, 10.0], false).unwrap();
        assert!(rows[1].lambda_min_over_omega < rows[0].lambda_min_over_omega);
    }
}
