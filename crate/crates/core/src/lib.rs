//! Numerical workbench for noncommutative Poisson random measures on
//! finite-dimensional von Neumann algebras with faithful weights.
//!
//! Every closed-form identity of the construction — the set-partition
//! moment formula, the characteristic functional exp(ω(e^{ix}−1)), the λ_∅
//! and Fock-basis Gram matrices, modular/KMS relations, factor-type
//! classification from the Arveson spectrum, and the Lindblad relative
//! entropy — is implemented next to an independent brute-force oracle: the
//! level-truncated direct sum ⊕_{m≤M} N^{⊗m} with the weighted inner
//! product ⟨u,v⟩ = e^{−ω(1)} Σ_m ω^{⊗m}(u_m* v_m)/m!. The two evaluation
//! routes are held against each other throughout the test suites.
//!
//! The numerical core is generic over the real scalar (`f32` or `f64`)
//! through [`scalar::Real`]; the aliases below fix the `f64` instantiation
//! the CLI and the acceptance suite use.

pub mod error;
pub mod scalar;
pub mod linalg;
pub mod algebra;
pub mod partitions;
pub mod moments;
pub mod gns;
pub mod fock;
pub mod modular;
pub mod channels;
pub mod entropy;
pub mod io;
pub mod fixtures;

#[cfg(test)]
pub(crate) mod testutil;

pub use error::{Error, Result};

/// `f64` instantiations of the core types.
pub type AlgebraElement64 = algebra::AlgebraElement<f64>;
pub type Weight64 = algebra::Weight<f64>;
pub type Mat64 = linalg::Mat<f64>;
pub type PoissonWord64 = gns::PoissonWord<f64>;
pub type GnsContext64 = gns::GnsContext<f64>;
pub type TruncatedGnsVector64 = gns::TruncatedGnsVector<f64>;
pub type LinearMap64 = channels::LinearMapOnAlgebra<f64>;
