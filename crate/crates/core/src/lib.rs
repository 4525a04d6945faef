//! Classical pseudo-differential symbol calculus.
//!
//! The crate represents classical symbols as truncated series of
//! ξ-homogeneous expression trees and implements the symbol-level operator
//! calculus (composition, adjoints, parametrices, square roots), Hamiltonian
//! flows of principal symbols, Fourier quantization on the flat torus and
//! the Hodge theory of the flat torus. Every numerical layer is generic over
//! [`Real`] (`f32` or `f64`); the aliases at the crate root fix `f64`.

pub mod calculus;
pub mod hamilton;
pub mod hodge;
pub mod io;
pub mod quantize;
mod scalar;
pub mod symbolic;
pub mod syntax;

pub use scalar::Real;

pub use calculus::{
    adjoint, commutator, compose, convert_left_right, is_elliptic, micro_elliptic_at, parametrix,
    principal, pullback_principal, sqrt_approx, CalculusError, Direction, EllipticityOptions,
    EllipticityReport,
};
pub use symbolic::{
    make_lambda_s, ClassicalSymbol, Diffeo, DomainError, Expr, HomogeneousTerm, MultiIndex,
    SymbolError, VarKind,
};

pub type PhasePoint64 = hamilton::PhasePoint<f64>;
pub type Bicharacteristic64 = hamilton::Bicharacteristic<f64>;
pub type GridFunction64 = quantize::GridFunction<f64>;
pub type GridFunction32 = quantize::GridFunction<f32>;
pub type GridSpectrum64 = quantize::GridSpectrum<f64>;
pub type FormField64 = hodge::FormField<f64>;
pub type FormField32 = hodge::FormField<f32>;

/// The generator behind every seeded random choice (probes, random fields).
pub fn seeded_rng(seed: u64) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    rand_chacha::ChaCha8Rng::seed_from_u64(seed)
}
