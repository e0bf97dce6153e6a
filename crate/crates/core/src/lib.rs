//! Finite arithmetic of even lattices: discriminant forms, the finite Weil
//! representation, Gauss sums, Witt indices, local L-factor data, and
//! hypothesis checks for Borcherds products and reflective forms.

pub mod borcherds;
pub mod error;
pub mod exact;
pub mod fqm;
pub mod json;
pub mod lattice;
pub mod lfactor;
pub mod nt;
pub mod theta;
pub mod weil;

pub use error::{Error, Result};
pub use exact::{CycloNum, Rational};
pub use fqm::{Fqm, FqmElement};
pub use lattice::GramMatrix;
