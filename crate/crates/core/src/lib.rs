//! Lattice Dirac fermions in 1+1 dimensions: continuous-time Hamiltonians,
//! their unitary and ultralocal quantum-walk digitizations, the equivalence
//! maps between them, and a U(1)-gauged walk.
//!
//! Everything is generic over the real scalar `T` ([`Real`], implemented for
//! `f32` and `f64`); the `*F64` aliases below fix `T = f64`.

pub mod digitize;
pub mod equivalence;
pub mod error;
pub mod gauge;
pub mod hamiltonians;
pub mod lattice;
pub mod linalg;
pub mod scalar;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::Real;

pub type WalkParamsF64 = lattice::WalkParams<f64>;
pub type SpinorFieldF64 = lattice::SpinorField<f64>;
pub type StaggeredFieldF64 = lattice::StaggeredField<f64>;
pub type LatticeOperatorF64 = lattice::LatticeOperator<f64>;
pub type WalkOperatorF64 = digitize::WalkOperator<f64>;
pub type GaugeConfigF64 = gauge::GaugeConfig<f64>;

pub type WalkParamsF32 = lattice::WalkParams<f32>;
pub type LatticeOperatorF32 = lattice::LatticeOperator<f32>;
pub type WalkOperatorF32 = digitize::WalkOperator<f32>;
