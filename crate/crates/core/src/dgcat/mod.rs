//! Finite DG categories over a field, described by explicit bases.

pub mod category;
pub mod complex;
pub mod functor;
pub mod quiver;
pub mod random;
pub mod validate;

pub use category::{format_combination, BasisElement, DGCategory, DGCategoryBuilder, DgStructure};
pub use complex::{Cohomology, Complex, GradedIndex};
pub use functor::DGFunctor;
pub use quiver::{from_quiver, Arrow, QuiverPresentation, Relation};
pub use validate::{validate, Axiom, ValidationReport, Violation};
pub use random::{random_category, random_quiver, RandomCategoryConfig};
