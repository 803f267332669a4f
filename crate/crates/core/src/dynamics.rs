// Copyright 2026 The gpolab Developers
// SPDX-License-Identifier: Apache-2.0

//! Central-difference derivative operators and the finite equations of motion.
//!
//! Conjugating by `A = exp(-iαπ)` translates φ eigenstates by one lattice
//! site, so `(A†HA - AHA†)/2α` is a central difference of `H` along φ. Its
//! nested-commutator expansion gives
//!
//! ```text
//! i[H, π] = -(∂H/∂φ) + Σ_{n≥3 odd} (iⁿ/n!) α^{n-1} [π, H]_n
//! i[H, φ] = +(∂H/∂π) + Σ_{n≥3 odd} (iⁿ/n!) β^{n-1} [φ, H]_n
//! ```
//!
//! and [`eom_residual`] measures how much of either identity is left after
//! truncating the sum.

use serde::Serialize;

use crate::dense::{commutator, ComplexMatrix, C64, I};
use crate::error::{GpoError, Result};
use crate::gpo::{ConjugatePair, Dimension, GpoGenerators};

/// Default odd truncation order of the nested-commutator tail.
pub const DEFAULT_TRUNCATION: usize = 25;

fn check_dims(op: &'static str, h: &ComplexMatrix, dim: Dimension) -> Result<()> {
    let n = dim.n();
    if h.shape() != (n, n) {
        return Err(GpoError::DimensionMismatch {
            op,
            left: h.shape(),
            right: (n, n),
        });
    }
    Ok(())
}

/// `(U†HU - UHU†) / (2 scale)`.
fn central_difference(h: &ComplexMatrix, u: &ComplexMatrix, scale: f64) -> Result<ComplexMatrix> {
    let ud = u.adjoint();
    let forward = ud.matmul(h)?.matmul(u)?;
    let backward = u.matmul(h)?.matmul(&ud)?;
    Ok(forward.sub(&backward)?.scale_real(0.5 / scale))
}

/// `∂H/∂φ ≈ (A†HA - AHA†) / 2α`.
pub fn dh_dphi(h: &ComplexMatrix, gens: &GpoGenerators, pair: &ConjugatePair) -> Result<ComplexMatrix> {
    check_dims("dh_dphi", h, gens.dim)?;
    check_dims("dh_dphi", h, pair.dim)?;
    central_difference(h, &gens.a, pair.alpha)
}

/// `∂H/∂π ≈ (B†HB - BHB†) / 2β`.
pub fn dh_dpi(h: &ComplexMatrix, gens: &GpoGenerators, pair: &ConjugatePair) -> Result<ComplexMatrix> {
    check_dims("dh_dpi", h, gens.dim)?;
    check_dims("dh_dpi", h, pair.dim)?;
    central_difference(h, &gens.b, pair.beta)
}

/// Heisenberg rate `dO/dt = i[H, O]`.
pub fn heisenberg_rate(h: &ComplexMatrix, o: &ComplexMatrix) -> Result<ComplexMatrix> {
    Ok(commutator(h, o)?.scale(I))
}

/// `[x, [x, ..., [x, h]]]` with `order` brackets; `order = 0` returns `h`.
pub fn nested_commutator(x: &ComplexMatrix, h: &ComplexMatrix, order: usize) -> Result<ComplexMatrix> {
    let mut acc = h.clone();
    for _ in 0..order {
        acc = commutator(x, &acc)?;
    }
    Ok(acc)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Variable {
    Phi,
    Pi,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct OrderResidual {
    pub n: usize,
    pub residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct EomReport {
    pub dim: usize,
    pub l: usize,
    pub variable: Variable,
    pub truncation: usize,
    /// Max-norm of the defect after including every odd term up to `n`.
    pub orders: Vec<OrderResidual>,
    pub final_residual: f64,
}

impl EomReport {
    pub fn residual_at(&self, n: usize) -> Option<f64> {
        self.orders.iter().find(|o| o.n == n).map(|o| o.residual)
    }
}

/// Residual of the truncated equation of motion for `variable`.
///
/// The `n = 1` entry is the defect of the bare Hamilton form, before any tail
/// term is subtracted.
pub fn eom_residual(
    h: &ComplexMatrix,
    pair: &ConjugatePair,
    gens: &GpoGenerators,
    variable: Variable,
    truncation: usize,
) -> Result<EomReport> {
    if truncation < 3 || truncation.is_multiple_of(2) {
        return Err(GpoError::InvalidInput(format!(
            "truncation order must be odd and at least 3, got {truncation}"
        )));
    }
    let dim = gens.dim;
    check_dims("eom_residual", h, dim)?;
    check_dims("eom_residual", h, pair.dim)?;

    let (x, scale, derivative, sign) = match variable {
        Variable::Pi => (&pair.pi, pair.alpha, dh_dphi(h, gens, pair)?, 1.0),
        Variable::Phi => (&pair.phi, pair.beta, dh_dpi(h, gens, pair)?, -1.0),
    };
    // pi:  D = i[H, π] + ∂H/∂φ - tail
    // phi: D = i[H, φ] - ∂H/∂π - tail
    let mut defect = heisenberg_rate(h, x)?.add_scaled(C64::new(sign, 0.0), &derivative)?;
    let mut orders = vec![OrderResidual {
        n: 1,
        residual: defect.max_norm(),
    }];

    let mut nested = commutator(x, h)?;
    let mut coefficient = I; // iⁿ αⁿ⁻¹ / n! at n = 1
    for n in 2..=truncation {
        nested = commutator(x, &nested)?;
        coefficient *= I * scale / n as f64;
        if n % 2 == 1 {
            defect = defect.add_scaled(-coefficient, &nested)?;
            orders.push(OrderResidual {
                n,
                residual: defect.max_norm(),
            });
        }
    }
    Ok(EomReport {
        dim: dim.n(),
        l: dim.l(),
        variable,
        truncation,
        final_residual: defect.max_norm(),
        orders,
    })
}

/// `Σ_{n=0}^{order} (iα)ⁿ/n! [π, H]_n`, the series for `A†HA`.
pub fn conjugation_series(h: &ComplexMatrix, pair: &ConjugatePair, order: usize) -> Result<ComplexMatrix> {
    let mut acc = h.clone();
    let mut term = h.clone();
    for n in 1..=order {
        term = commutator(&pair.pi, &term)?.scale(I * pair.alpha / n as f64);
        acc = acc.add(&term)?;
    }
    Ok(acc)
}

/// Relative defect of the infinite-dimensional (Hamilton) form of the
/// equation of motion, restricted to the central block `|j|, |j'| ≤ l/2`
/// where the cyclic wrap of the lattice does not reach.
pub fn hamilton_defect(
    h: &ComplexMatrix,
    pair: &ConjugatePair,
    gens: &GpoGenerators,
    variable: Variable,
) -> Result<f64> {
    let (rate, derivative) = match variable {
        Variable::Phi => (heisenberg_rate(h, &pair.phi)?, dh_dpi(h, gens, pair)?),
        Variable::Pi => (heisenberg_rate(h, &pair.pi)?, dh_dphi(h, gens, pair)?.scale_real(-1.0)),
    };
    let dim = gens.dim;
    let half = dim.l() as i64 / 2;
    let central: Vec<usize> = dim.labels().filter(|j| j.abs() <= half).map(|j| dim.index(j)).collect();
    let mut diff: f64 = 0.0;
    let mut size: f64 = 0.0;
    for &r in &central {
        for &c in &central {
            diff = diff.max((rate[(r, c)] - derivative[(r, c)]).norm());
            size = size.max(derivative[(r, c)].norm());
        }
    }
    if size == 0.0 {
        return Err(GpoError::InvalidInput(
            "derivative operator vanishes on the central block".into(),
        ));
    }
    Ok(diff / size)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oscillator::{build_hamiltonian, OscillatorSpec};

    fn setup(l: usize) -> (GpoGenerators, ConjugatePair) {
        let g = GpoGenerators::new(Dimension::new(l));
        let p = ConjugatePair::new(&g);
        (g, p)
    }

    fn oscillator(l: usize, omega: f64) -> (GpoGenerators, ConjugatePair, ComplexMatrix) {
        let (g, p) = setup(l);
        let spec = OscillatorSpec::new(g.dim, omega).unwrap();
        let h = build_hamiltonian(&spec, &p).unwrap();
        (g, p, h)
    }

    #[test]
    fn derivatives_of_identity_vanish() {
        let (g, p) = setup(3);
        let id = ComplexMatrix::identity(7);
        assert!(dh_dphi(&id, &g, &p).unwrap().max_norm() < 1e-15);
        assert!(dh_dpi(&id, &g, &p).unwrap().max_norm() < 1e-15);
    }

    #[test]
    fn derivatives_of_single_variable_functions() {
        let (g, p) = setup(4);
        let f_pi = p.pi.matmul(&p.pi).unwrap().add(&p.pi).unwrap();
        assert!(dh_dphi(&f_pi, &g, &p).unwrap().max_norm() <= 1e-10);
        let g_phi = p.phi.matmul(&p.phi).unwrap().matmul(&p.phi).unwrap();
        assert!(dh_dpi(&g_phi, &g, &p).unwrap().max_norm() <= 1e-10);
    }

    #[test]
    fn derivative_of_phi_is_unity_away_from_edges() {
        // l = 2: (A†φA - AφA†)/2α = diag(-3/2, 1, 1, 1, -3/2); the edges carry
        // the wrap from j = l to j = -l.
        let (g, p) = setup(2);
        let d = dh_dphi(&p.phi, &g, &p).unwrap();
        let want = ComplexMatrix::real_diagonal(&[-1.5, 1.0, 1.0, 1.0, -1.5]);
        assert!(d.max_abs_diff(&want).unwrap() < 1e-12);
    }

    #[test]
    fn dh_dpi_matches_triple_products() {
        let (g, p, h) = oscillator(2, 1.0);
        let bd = g.b.adjoint();
        let want = bd
            .matmul(&h)
            .unwrap()
            .matmul(&g.b)
            .unwrap()
            .sub(&g.b.matmul(&h).unwrap().matmul(&bd).unwrap())
            .unwrap()
            .scale_real(1.0 / (2.0 * p.beta));
        let got = dh_dpi(&h, &g, &p).unwrap();
        assert!(got.max_abs_diff(&want).unwrap() < 1e-13);
        assert!(got.hermitian_residual().unwrap() <= 1e-10);
    }

    #[test]
    fn derivatives_preserve_hermiticity() {
        let (g, p) = setup(6);
        let h = crate::collimation::random_hermitian(g.dim, 1);
        for d in [
            dh_dphi(&h, &g, &p).unwrap(),
            dh_dpi(&h, &g, &p).unwrap(),
            heisenberg_rate(&h, &p.pi).unwrap(),
        ] {
            assert!(d.hermitian_residual().unwrap() <= 1e-10);
        }
    }

    #[test]
    fn heisenberg_rate_trivial_cases() {
        let (_, _, h) = oscillator(3, 2.0);
        assert!(heisenberg_rate(&h, &h).unwrap().max_norm() <= 1e-12);
        assert_eq!(
            heisenberg_rate(&h, &ComplexMatrix::identity(7)).unwrap().max_norm(),
            0.0
        );
        assert!(heisenberg_rate(&h, &ComplexMatrix::identity(5)).is_err());
    }

    #[test]
    fn nested_commutator_recursion() {
        let (_, p, h) = oscillator(1, 1.0);
        assert_eq!(nested_commutator(&p.pi, &h, 0).unwrap(), h);
        assert_eq!(nested_commutator(&p.pi, &h, 1).unwrap(), commutator(&p.pi, &h).unwrap());
        let unrolled = commutator(&p.pi, &commutator(&p.pi, &commutator(&p.pi, &h).unwrap()).unwrap()).unwrap();
        assert!(
            nested_commutator(&p.pi, &h, 3)
                .unwrap()
                .max_abs_diff(&unrolled)
                .unwrap()
                < 1e-14
        );
        let f = p.pi.matmul(&p.pi).unwrap();
        for k in 1..5 {
            assert!(nested_commutator(&p.pi, &f, k).unwrap().max_norm() < 1e-12);
        }
    }

    #[test]
    fn eom_rejects_bad_truncation() {
        let (g, p, h) = oscillator(2, 1.0);
        for k in [0, 1, 2, 24] {
            assert!(eom_residual(&h, &p, &g, Variable::Pi, k).is_err(), "k={k}");
        }
    }

    #[test]
    fn eom_for_pure_kinetic_hamiltonian_is_exact() {
        let (g, p) = setup(5);
        let h = p.pi.matmul(&p.pi).unwrap().scale_real(0.5);
        let r = eom_residual(&h, &p, &g, Variable::Pi, 3).unwrap();
        assert!(r.final_residual <= 1e-10);
    }

    #[test]
    fn eom_series_converges_for_oscillator() {
        let (g, p, h) = oscillator(10, 1.0);
        for variable in [Variable::Pi, Variable::Phi] {
            let r = eom_residual(&h, &p, &g, variable, 41).unwrap();
            let at3 = r.residual_at(3).unwrap();
            let at25 = r.residual_at(25).unwrap();
            assert!(at25 < at3);
            // Factorial decay sets in once n exceeds 2α‖π‖ ≈ 2π.
            let tail: Vec<f64> = r.orders.iter().filter(|o| o.n >= 9).map(|o| o.residual).collect();
            for w in tail.windows(2) {
                assert!(w[1] <= w[0] * 1.0001 + 1e-12, "{variable:?}: {tail:?}");
            }
            assert!(r.final_residual <= 1e-8, "{variable:?}: {}", r.final_residual);
            assert_eq!(r.orders.len(), 21);
        }
    }

    #[test]
    fn conjugation_series_reproduces_shift() {
        let (g, p, h) = oscillator(4, 1.5);
        let exact = g.a.adjoint().matmul(&h).unwrap().matmul(&g.a).unwrap();
        let coarse = conjugation_series(&h, &p, 5).unwrap().max_abs_diff(&exact).unwrap();
        let fine = conjugation_series(&h, &p, 60).unwrap().max_abs_diff(&exact).unwrap();
        assert!(fine < coarse);
        assert!(fine <= 1e-10 * h.max_norm(), "{fine:e}");
    }

    #[test]
    fn hamilton_form_emerges_on_central_block() {
        let defects: Vec<f64> = [5, 10, 20, 40]
            .iter()
            .map(|&l| {
                let (g, p, h) = oscillator(l, 1.0);
                hamilton_defect(&h, &p, &g, Variable::Phi).unwrap()
            })
            .collect();
        for w in defects.windows(2) {
            assert!(w[1] < w[0], "{defects:?}");
        }
    }
}
