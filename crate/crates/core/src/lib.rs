//! Pseudospectral simulation of the scaled Dirac–Maxwell system in Coulomb
//! gauge on a periodic box, together with solvers for its nonrelativistic
//! limits (Schrödinger–Poisson and Pauli) and a verification harness.
//!
//! Conventions used throughout the crate:
//!
//! * Fields are sampled on a uniform `n³` grid over `[0, L)³`. Spectra are
//!   normalized Fourier coefficients, `f(x) = Σ_k f̂_k e^{iξ_k·x}`.
//! * The `C^n` inner product is linear in the first slot,
//!   `⟨a, b⟩ = Σ a_i conj(b_i)`, so that `Im⟨∂v, v⟩` is the usual
//!   probability current.
//! * The Poisson problem `ΔA₀ = ρ` is solved with the mean of `ρ` removed and
//!   the zero mode of `A₀` set to zero (neutralizing background).

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod dm;
mod error;
pub mod fourier;
pub mod limit;
pub mod par;
pub mod spinor;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64;

pub mod prelude {
    pub use crate::dm::{DmState, StepConfig};
    pub use crate::fourier::{
        ComplexField, Lattice, ScalarField, SpinorField, TwoSpinorField, VectorField,
    };
    pub use crate::limit::{LimitState, PauliState};
    pub use crate::spinor::Branch;
    pub use crate::{Complex64, Error, Result};
}
