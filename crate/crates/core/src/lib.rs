//! Iterates of `x -> A x^d + C` over prime fields: image sizes, preimage
//! moments, the counting recursion behind them, labeled iteration graphs,
//! and brute-force point counts on the associated varieties.
//!
//! The recursion code is generic over [`scalar::Scalar`]; the aliases below
//! fix the two scalar types used in practice.

pub mod curves;
pub mod dynamics;
pub mod field;
pub mod graphs;
pub mod lab;
pub mod recur;
pub mod scalar;

pub use dynamics::PolyMap;
pub use field::FieldParams;
pub use graphs::IterGraph;
pub use scalar::Scalar;

/// Exact rational scalar.
pub type Rational = num_rational::BigRational;

pub type ExactMu = recur::MuSequence<Rational>;
pub type FloatMu = recur::MuSequence<f64>;
pub type ExactCoeffTable = recur::CoeffTable<Rational>;
pub type FloatCoeffTable = recur::CoeffTable<f64>;

/// `mu_0, ..., mu_R` as exact rationals.
pub fn exact_mu(d: u32, max_level: usize) -> ExactMu {
    recur::mu_sequence(d, max_level)
}

/// `mu_0, ..., mu_R` in double precision, for levels too deep for exact denominators.
pub fn float_mu(d: u32, max_level: usize) -> FloatMu {
    recur::mu_sequence(d, max_level)
}
