//! Fourier quantization on the torus `[0, 2π)ⁿ` and the numerics built on
//! it: Sobolev norms, the duality pairing, regularized oscillatory integrals
//! and the circle index.

mod apply;
mod grid;
mod index;
mod oscint;
mod separate;
mod sobolev;

use thiserror::Error;

use crate::symbolic::DomainError;

pub use apply::{op_apply, op_apply_with_report, ApplyReport, TermQuantization, ZeroModePolicy};
pub use grid::{GridFunction, GridSpectrum};
pub use index::{
    circle_index, winding_number, Half, IndexReport, Section, CIRCLE_SAMPLES, RANK_TOL,
    STABILITY_STEP,
};
pub use oscint::{
    oscint_eval, Amplitude, CutoffProfile, OscMethod, OscOptions, OscReport, TestFunction,
};
pub use sobolev::{
    duality_pair, sobolev_norm, sobolev_trend, spectrum_sobolev_norm, SobolevTrend, SobolevVerdict,
    GROWTH_RATIO,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuantizeError {
    #[error("invalid grid: n = {n}, M = {m} (need n >= 1 and M a power of two >= 2)")]
    InvalidGrid { n: usize, m: usize },
    #[error("expected {expected} values, found {found}")]
    ValueCount { expected: usize, found: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("grids differ: (n, M) = {left:?} vs {right:?}")]
    GridMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("wavenumber {0:?} outside the grid band")]
    OutOfBand(Vec<i64>),
    #[error(transparent)]
    Domain(DomainError),
    #[error("need at least two grids, got {0}")]
    TooFewGrids(usize),
    #[error("a_{half:?} vanishes near x = {x}")]
    SymbolVanishes { half: Half, x: f64 },
    #[error("index changed from {index} at K = {k} to {index_next} at K + 8")]
    Unstable {
        k: usize,
        index: i64,
        index_next: i64,
    },
    #[error(
        "epsilon sequence did not settle: last difference {difference:e}, tolerance {tolerance:e}"
    )]
    NonConvergent { difference: f64, tolerance: f64 },
    #[error("unsupported input: {0}")]
    Unsupported(String),
    #[error("quadrature setup failed: {0}")]
    Quadrature(String),
}
