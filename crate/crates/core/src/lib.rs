//! Quaternionic harmonic fields on bounded domains of R^3.
//!
//! A quaternion field `p = {a, u}` pairs a scalar function with a vector
//! field; it is harmonic when `grad a = rot u` and pure harmonic when in
//! addition `div u = 0`. This crate provides
//!
//! * quaternion arithmetic in exact and double precision ([`quaternion`]),
//! * fields over exact polynomial or sampled-grid backends ([`fields`], [`domain`], [`poly`]),
//! * vector calculus and its product-rule identities ([`calculus`]),
//! * harmonic residuals, product residual formulas, subharmonicity and the
//!   maximum-modulus check ([`harmonic`]),
//! * planar and radial axial algebras built from analytic generators ([`axial`]),
//! * Dirac functionals, multiplicativity and point recovery ([`spectrum`]),
//! * seeded experiment drivers producing JSON reports ([`experiments`]).

pub mod axial;
pub mod calculus;
pub mod domain;
pub mod ensemble;
pub mod error;
pub mod experiments;
pub mod fields;
pub mod harmonic;
pub mod poly;
pub mod quaternion;
pub mod spectrum;

pub use domain::{Domain, DomainSpec, Shape};
pub use error::{Error, Result};
pub use fields::{Backend, QuaternionField, ScalarField, VectorField};
pub use quaternion::{ExactQuaternion, Quaternion};
