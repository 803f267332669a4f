// Copyright 2026 The gpolab Developers
// SPDX-License-Identifier: Apache-2.0

use gpolab_core::collimation::{
    pi_power_spectral, pi_powers, random_hermitian, shift_profile, Axis, CollimationReport,
};
use gpolab_core::dynamics::{eom_residual, hamilton_defect, Variable};
use gpolab_core::oscillator::{build_hamiltonian, spectrum, OscillatorSpec};
use gpolab_core::{ConjugatePair, Dimension, GpoGenerators, SchwingerBasis};

fn setup(l: usize) -> (GpoGenerators, ConjugatePair, SchwingerBasis) {
    let g = GpoGenerators::new(Dimension::new(l));
    let p = ConjugatePair::new(&g);
    let basis = SchwingerBasis::new(&g);
    (g, p, basis)
}

#[test]
fn qutrit_oscillator_round_trips_through_schwinger_basis() {
    let (g, p, basis) = setup(1);
    let spec = OscillatorSpec::new(g.dim, 1.0).unwrap();
    let h = build_hamiltonian(&spec, &p).unwrap();
    let coeffs = basis.decompose(&h).unwrap();
    assert!(basis.reconstruct(&coeffs).unwrap().max_abs_diff(&h).unwrap() <= 1e-10);
    assert!(coeffs.hermiticity_residual() <= 1e-10);
}

#[test]
fn functions_of_pi_are_separable_and_fully_pi_collimated() {
    let (g, p, basis) = setup(15);
    let dense = pi_powers(&p, 4);
    for (k, m) in dense.iter().enumerate() {
        let spectral = pi_power_spectral(&p, &g.s, k as u32 + 1);
        assert!(m.max_abs_diff(&spectral).unwrap() <= 1e-9);
        let coeffs = basis.decompose(m).unwrap();
        for b in g.dim.labels().filter(|&b| b != 0) {
            for a in g.dim.labels() {
                assert!(coeffs.get(b, a).norm() <= 1e-10);
            }
        }
        let report = CollimationReport::new(&coeffs).unwrap();
        assert!((report.c_pi - 1.0).abs() <= 1e-12);
    }
}

#[test]
fn random_profile_is_symmetric_and_roughly_uniform() {
    let (g, _, basis) = setup(40);
    let mut mean = vec![0.0; g.dim.n()];
    for seed in 0..10 {
        let coeffs = basis.decompose(&random_hermitian(g.dim, seed)).unwrap();
        let profile = shift_profile(&coeffs, Axis::Phi).unwrap();
        for (k, w) in profile.entries() {
            assert!((w - profile.weight(-k)).abs() <= 1e-10);
        }
        for (acc, w) in mean.iter_mut().zip(&profile.weights) {
            *acc += w / 10.0;
        }
    }
    let max = mean.iter().copied().fold(f64::MIN, f64::max);
    let min = mean.iter().copied().fold(f64::MAX, f64::min);
    assert!(max <= 3.0 * min, "max {max} min {min}");
}

#[test]
fn eom_series_converges_with_enough_terms() {
    let (g, p, _) = setup(10);
    let spec = OscillatorSpec::new(g.dim, 1.0).unwrap();
    let h = build_hamiltonian(&spec, &p).unwrap();
    for v in [Variable::Pi, Variable::Phi] {
        let r = eom_residual(&h, &p, &g, v, 35).unwrap();
        assert!(r.final_residual <= 1e-8, "{v:?}: {}", r.final_residual);
        assert!(r.final_residual < r.residual_at(3).unwrap());
    }
}

#[test]
fn hamilton_form_improves_with_dimension() {
    let mut last = f64::INFINITY;
    for l in [10, 20, 40, 80] {
        let (g, p, _) = setup(l);
        let spec = OscillatorSpec::new(g.dim, 1.0).unwrap();
        let h = build_hamiltonian(&spec, &p).unwrap();
        let d = hamilton_defect(&h, &p, &g, Variable::Phi).unwrap();
        assert!(d < last, "l={l}: {d} vs {last}");
        last = d;
    }
}

#[test]
fn large_oscillator_top_of_spectrum_exceeds_vanilla() {
    let spec = OscillatorSpec::new(Dimension::new(200), 1.0).unwrap();
    let s = spectrum(&spec).unwrap();
    let top = s.eigenvalues.len() - 1;
    assert!(s.lambda_max > top as f64 + 0.5);
    assert!(s.lambda_max <= spec.lambda_max_bound());
    for k in 0..10 {
        assert!((s.eigenvalues[k] - (k as f64 + 0.5)).abs() <= 1e-2 * (k as f64 + 0.5));
    }
}
