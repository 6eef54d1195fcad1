//! Dynamics of finitely generated holomorphic semigroups.
//!
//! Generators are rational or transcendental entire maps
//! ([`map::HolomorphicMap`]); a [`semigroup::Semigroup`] is the set of all
//! finite compositions ([`semigroup::Word`]s) of its generators. The
//! [`classify`] module estimates the Fatou, Julia and escaping sets on points
//! and pixel grids, samples backward orbits and probes exceptional points.
//! The [`verify`] module turns the known set identities and closed-form
//! examples into pass/fail [`verify::Report`]s.

pub mod classify;
pub mod error;
pub mod exec;
pub mod map;
pub mod roots;
pub mod rng;
pub mod semigroup;
pub mod sphere;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64;
