//! Desk-scale computations with finite DG categories: hom complexes, twisted
//! complexes, Drinfeld quotients, Euler forms and numerical Grothendieck groups.

pub mod dgcat;
pub mod drinfeld;
pub mod error;
pub mod field;
pub mod io;
pub mod ktheory;
pub mod perfect;
pub mod lattice;

pub use error::{Error, Result};
pub use field::Field;
