//! Exact realization of finite-dimensional ordered vector spaces with the
//! Riesz interpolation property as limits of simplicial cones.
//!
//! A [`ConeStructure`] records a lattice of supports and, for each support,
//! which coordinates are strictly positive. From it the crate builds the maps
//! `α^ε`, `β^R` and chains of simplicial stages `φ_i = β^{R_i} α^{ε_i}` whose
//! union is the positive cone, all in exact rational arithmetic.
//!
//! The numeric code is generic over [`Scalar`]; [`Rational`] (malachite) is
//! the default backend and [`BigRational`] (num-rational) the second one.

pub mod index_set;
pub mod integer;
pub mod io;
pub mod linalg;
pub mod maps;
pub mod realization;
pub mod scalar;
pub mod structure;
pub mod testkit;

pub use index_set::IndexSet;
pub use integer::{integerize_chain, verify_integer_chain, IntegerChain, IntegerReport, DEFAULT_PRIMES};
pub use linalg::{rank_one_update_inverse, LinalgError, Matrix, Vector};
pub use maps::MapError;
pub use realization::{
    absorb, build_chain, epsilon_bound, interpolate, r_threshold, refine, verify_chain, ChainReport, RealizationChain,
    RealizeError, Stage,
};
pub use scalar::{Rational, Scalar};
pub use structure::{
    validate_structure, Clause, ConeStructure, DerivedIndexData, StructureCandidate, StructureError, ValidationReport,
};

pub use num_rational::BigRational;

pub type RationalVector = Vector<Rational>;
pub type RationalMatrix = Matrix<Rational>;
pub type RationalChain = RealizationChain<Rational>;
pub type RationalIntegerChain = IntegerChain<Rational>;
