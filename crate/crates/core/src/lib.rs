// Copyright 2026 The gpolab Developers
// SPDX-License-Identifier: Apache-2.0

//! Finite-dimensional generalized Pauli operators: clock and shift
//! generators, a discrete conjugate pair, Schwinger operator bases,
//! collimation scores, truncated equations of motion and the finite
//! harmonic oscillator.

pub mod collimation;
pub mod dense;
pub mod dynamics;
pub mod error;
pub mod gpo;
pub mod oscillator;
pub mod schwinger;

pub use dense::{ComplexMatrix, C64};
pub use error::{GpoError, Result};
pub use gpo::{ConjugatePair, Dimension, GpoGenerators};
pub use schwinger::{SchwingerBasis, SchwingerCoefficients};
