//! Numerics for rotation sensing with second-order anti-coherent spin states.
//!
//! The crate is `no_std` (it needs `alloc`) and covers the whole pipeline
//! from spin algebra to Monte Carlo estimation:
//!
//! - [`spin`]: spin-J operators, rotation unitaries, and the conversion
//!   between the collective `|J, m⟩` picture and the N-qubit picture.
//! - [`metrology`]: covariance of the angular momentum, single-parameter
//!   Fisher information, anti-coherence certification and the
//!   three-parameter quantum Fisher information matrix.
//! - [`measurement`]: the optimal four-projector basis, exact and
//!   small-angle outcome probabilities, classical Fisher information.
//! - [`bell`]: Bell-product decompositions and the aggregation of Bell-pair
//!   outcomes into optimal-basis probabilities.
//! - [`circuit`]: a small statevector simulator with the preparation and
//!   Bell-analysis circuits.
//! - [`estimation`]: multinomial sampling, parameter extraction and
//!   Cramér-Rao saturation statistics.
//!
//! Conventions: `Ĵ = Σ_k σ^(k)/2`, rotations are `exp(−iθ₁ u·Ĵ)`, `|J, m⟩`
//! amplitudes are stored in descending `m`, qubit 0 is the most significant
//! bit and `|H⟩ ↦ |0⟩`, `|V⟩ ↦ |1⟩`.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod bell;
pub mod circuit;
mod error;
pub mod estimation;
pub mod linalg;
pub mod measurement;
pub mod metrology;
pub mod spin;
pub mod states;

pub use error::{Error, Result};
pub use linalg::{CMatrix, C64};
pub use spin::{QubitState, RotationParams, Spin, SpinState};
