//! Exact-arithmetic experiments on transportation polytopes.
//!
//! Classical (2-way) polytopes live in [`polytope2`], 3-way axial and planar
//! polytopes plus the margin reductions in [`polytope3`], and integer points
//! of 2-way polytopes in [`lattice`]. All algorithms are generic over an
//! exact [`Scalar`]; the aliases below fix it to arbitrary-precision
//! rationals, which is what the command-line front end uses.

#![allow(clippy::needless_range_loop)]

pub mod constraint;
pub mod error;
pub mod io;
pub mod lattice;
pub mod linalg;
pub mod polytope2;
pub mod polytope3;
pub mod scalar;
pub mod survey;
pub mod tables;

use num_bigint::BigInt;

pub use constraint::{build_constraint_system, expected_rank, Kind, Shape};
pub use error::{Error, Result};
pub use scalar::{format_scalar, parse_scalar, IntBase, Scalar};
pub use tables::{support_graph, SupportGraph};

/// Arbitrary-precision rational, the default scalar.
pub type Rational = num_rational::Ratio<BigInt>;

pub type Margins2 = tables::Margins2<Rational>;
pub type AxialMargins = tables::AxialMargins<Rational>;
pub type PlanarMargins = tables::PlanarMargins<Rational>;
pub type Table2 = tables::Table2<Rational>;
pub type Table3 = tables::Table3<Rational>;
pub type Matrix = linalg::Matrix<Rational>;
pub type EqualityPolytope = linalg::EqualityPolytope<Rational>;
pub type ConstraintSystem = constraint::ConstraintSystem<Rational>;
pub type VertexSet2 = polytope2::VertexSet2<Rational>;
pub type AxialProblem = polytope3::AxialProblem<Rational>;
pub type PlanarProblem = polytope3::PlanarProblem<Rational>;
pub type UniversalityEncoding = polytope3::UniversalityEncoding<Rational>;
