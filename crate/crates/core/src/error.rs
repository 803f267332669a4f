// Copyright 2026 The gpolab Developers
// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GpoError {
    #[error("dimension mismatch in {op}: {left:?} vs {right:?}")]
    DimensionMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not Hermitian: residual {residual:e} exceeds tolerance {tolerance:e}")]
    NotHermitian { residual: f64, tolerance: f64 },
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("eigensolver failed to converge for eigenvalue {index} after {iterations} iterations")]
    NoConvergence { index: usize, iterations: usize },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("operator has no nonzero Schwinger coefficient; normalization is undefined")]
    ZeroOperator,
}

pub type Result<T> = std::result::Result<T, GpoError>;
