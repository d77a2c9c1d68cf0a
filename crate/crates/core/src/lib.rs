//! Generalized Schmidt decomposition of three-qubit pure states.
//!
//! The crate finds stationary points of the product overlap
//! `|⟨u1 u2 u3|ψ⟩|`, builds the five-term canonical form
//!
//! ```text
//! |ψ⟩ = λ0|u1u2u3⟩ + λ1|u1v2v3⟩ + λ2|v1u2v3⟩ + λ3|v1v2u3⟩ + λ4|v1v2v3⟩
//! ```
//!
//! at each of them, and decides which form is the decomposition proper: the
//! one whose `λ0` is the maximal product overlap. Necessary conditions come
//! from the second variation (`λ0² ≥ λ1² + λ2² + λ3² + 2λ1λ2λ3/λ0` and
//! `λ0 ≥ |λ4|`); sufficiency is checked numerically against the multistart
//! maximum and an independent grid oracle.

pub mod canonical;
pub mod config;
pub mod decompose;
pub mod error;
pub mod oracle;
pub mod report;
pub mod scan;
pub mod solver;
pub mod state;
pub mod w_family;

pub use canonical::{
    build_canonical_form, is_gsd, positivity_verdict, reconstruct_state, schmidt_inequality_residual,
    second_variation_matrix, tangent_hessian, CanonicalForm, GsdVerdict, SecondVariationMatrix,
};
pub use config::SolverConfig;
pub use decompose::{decompose, Decomposition};
pub use error::{Error, Result};
pub use solver::{find_stationary_points, maximal_product_overlap, power_sweep, PointKind, StationaryPoint};
pub use state::{overlap, ProductTriple, PureState3Q, Qubit, QubitVector};
pub use num_complex::Complex64;
