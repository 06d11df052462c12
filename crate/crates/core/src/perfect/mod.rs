//! Perfect objects as one-sided twisted complexes, right modules, and the
//! transport of both along DG functors.

pub mod module;
pub mod search;
pub mod twisted;

pub use module::{hom_to_module, Fiber, Module, ModuleHom};
pub use search::{bounded_perfectness_search, diagonal_restrictions, verify_witness, PerfectnessOutcome};
pub use twisted::{cone, euler_pairing, hom_complex, is_quasi_iso, Entry, HomCell, HomComplex, PerfMorphism, TwistedComplex};
