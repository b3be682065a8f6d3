//! Exact computations around the `SL(n)` skein algebra of the annulus.
//!
//! The crate provides Laurent scalars in `ω^{1/2}`, the Fock–Goncharov quantum
//! torus of a triangle, the standard quantum left and right matrices, biangle
//! co-units, the state-sum quantum trace of the annulus basis webs, the
//! tropical (Knutson–Tao) combinatorics of their highest degrees, and a
//! reduction engine expressing braid closures in the `γ_m` generators.

pub mod annulus_trace;
pub mod biangle_counit;
pub mod braid_reduction;
pub mod cli;
pub mod error;
pub mod fg_matrices;
pub mod quantum_torus;
pub mod scalars;
pub mod tropical_fan;

pub use error::{Error, Result};
pub use scalars::{LaurentScalar, RingContext};
