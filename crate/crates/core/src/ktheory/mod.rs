//! Euler forms on K₀, numerical Grothendieck groups, and checks of the
//! sequences relating a category, a subcategory and their quotient.
//!
//! Convention throughout: `G[i][j] = χ(e_i, e_j) = χ(Hom(e_i, e_j))`, the first
//! argument being the source.

mod sequence;

use std::fmt;

use num_bigint::BigInt;

use crate::dgcat::DgStructure;
use crate::error::{Error, Result};
use crate::lattice::{
    fmt_vector, integer_kernel, quotient_presentation, smith_normal_form, AbGroupPresentation,
    IntMatrix, Sublattice,
};
use crate::perfect::{euler_pairing, TwistedComplex};

pub use sequence::{
    check_kermaps, verify_k0_sequence, verify_numerical_sequence, Backing, K0Report, KTriple, KermapsReport,
    SequenceReport, Verdict,
};

pub const CONVENTION: &str = "chi(a, b) = sum_n (-1)^n dim H^n Hom(a, b), rows index the source";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    ComputedFromCategory,
    UserSupplied,
}

/// K₀ with a declared free basis, its Euler form, and optionally the action of
/// a Serre functor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EulerLattice {
    gram: IntMatrix,
    serre: Option<IntMatrix>,
    provenance: Provenance,
}

impl EulerLattice {
    pub fn new(gram: IntMatrix, provenance: Provenance) -> Result<Self> {
        if !gram.is_square() {
            return Err(Error::Shape(format!("Gram matrix is {}x{}", gram.rows(), gram.cols())));
        }
        Ok(EulerLattice { gram, serre: None, provenance })
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        Self::new(IntMatrix::from_rows(rows)?, Provenance::UserSupplied)
    }

    /// Attaches `S`; requires `Gᵀ = G S` and `S` invertible over Z.
    pub fn with_serre(mut self, serre: IntMatrix) -> Result<Self> {
        let issues = serre_issues(&self.gram, &serre)?;
        if let Some(issue) = issues.first() {
            return Err(Error::Input(format!("Serre matrix rejected: {issue}")));
        }
        self.serre = Some(serre);
        Ok(self)
    }

    pub fn rank(&self) -> usize {
        self.gram.rows()
    }

    pub fn gram(&self) -> &IntMatrix {
        &self.gram
    }

    pub fn serre(&self) -> Option<&IntMatrix> {
        self.serre.as_ref()
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    /// `χ(u, v) = uᵀ G v`.
    pub fn pairing(&self, u: &[BigInt], v: &[BigInt]) -> Result<BigInt> {
        let gv = self.gram.apply(v)?;
        if u.len() != gv.len() {
            return Err(Error::Shape(format!("vector of length {} paired in rank {}", u.len(), gv.len())));
        }
        Ok(u.iter().zip(&gv).map(|(a, b)| a * b).sum())
    }
}

fn serre_issues(gram: &IntMatrix, serre: &IntMatrix) -> Result<Vec<String>> {
    if serre.rows() != gram.rows() || serre.cols() != gram.cols() {
        return Err(Error::Shape(format!(
            "Serre matrix is {}x{} for a Gram matrix of rank {}",
            serre.rows(),
            serre.cols(),
            gram.rows()
        )));
    }
    let mut issues = Vec::new();
    if gram.mul(serre)? != gram.transpose() {
        issues.push("G^T != G S".to_string());
    }
    if !serre.is_unimodular() {
        issues.push("S is not invertible over Z".to_string());
    }
    Ok(issues)
}

/// `G[i][j] = χ(Hom(gens[i], gens[j]))`. The caller vouches that the classes of
/// `gens` form a basis of K₀.
pub fn gram_from_category<C: DgStructure>(c: &C, gens: &[TwistedComplex]) -> Result<EulerLattice> {
    if gens.is_empty() {
        return Err(Error::Input("at least one generator is needed".into()));
    }
    let mut rows = Vec::with_capacity(gens.len());
    for x in gens {
        let row: Result<Vec<i64>> = gens.iter().map(|y| euler_pairing(c, x, y)).collect();
        rows.push(row?);
    }
    EulerLattice::new(IntMatrix::from_rows(&rows)?, Provenance::ComputedFromCategory)
}

/// Inverse of a matrix with determinant ±1.
pub fn unimodular_inverse(m: &IntMatrix) -> Result<IntMatrix> {
    if !m.is_square() {
        return Err(Error::Shape(format!("inverse of a {}x{} matrix", m.rows(), m.cols())));
    }
    if !m.is_unimodular() {
        let det = m.determinant()?;
        return Err(Error::NotUnimodular(det.to_string()));
    }
    // D = U M V with D = diag(±1), so M⁻¹ = V D U
    let s = smith_normal_form(m);
    s.v.mul(&s.d)?.mul(&s.u)
}

/// `S = G⁻¹ Gᵀ`, the unique solution of `Gᵀ = G S`.
pub fn serre_from_gram(l: &EulerLattice) -> Result<IntMatrix> {
    unimodular_inverse(&l.gram)?.mul(&l.gram.transpose())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SerreReport {
    pub issues: Vec<String>,
    /// `G⁻¹Gᵀ` when `G` is unimodular.
    pub computed: Option<IntMatrix>,
    /// Whether the supplied matrix equals the computed one.
    pub agrees_with_computed: Option<bool>,
}

impl SerreReport {
    pub fn holds(&self) -> bool {
        self.issues.is_empty() && self.agrees_with_computed != Some(false)
    }
}

/// Checks a candidate Serre matrix against the Euler form.
pub fn verify_serre(l: &EulerLattice, serre: &IntMatrix) -> Result<SerreReport> {
    let issues = serre_issues(&l.gram, serre)?;
    let computed = serre_from_gram(l).ok();
    let agrees_with_computed = computed.as_ref().map(|s| s == serre);
    Ok(SerreReport { issues, computed, agrees_with_computed })
}

/// Coxeter transformation `-S`.
pub fn coxeter(serre: &IntMatrix) -> IntMatrix {
    serre.negated()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChiKernels {
    /// `{v : χ(v, -) = 0}`, that is `ker Gᵀ`.
    pub left: Sublattice,
    /// `{v : χ(-, v) = 0}`, that is `ker G`.
    pub right: Sublattice,
    pub agree: bool,
}

pub fn chi_kernels(l: &EulerLattice) -> ChiKernels {
    let left = integer_kernel(&l.gram.transpose());
    let right = integer_kernel(&l.gram);
    let agree = left == right;
    if l.serre.is_some() {
        assert!(agree, "an accepted Serre matrix forces the kernels to agree");
    }
    ChiKernels { left, right, agree }
}

/// `N = K₀ / Ker χ` with explicit coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NumericalGroup {
    pub kernel: Sublattice,
    pub presentation: AbGroupPresentation,
    /// `rank N x rank K₀`; sends a class to its coordinates in `N`.
    pub projection: IntMatrix,
    /// `rank K₀ x rank N`, a splitting of the projection.
    pub section: IntMatrix,
}

impl NumericalGroup {
    pub fn rank(&self) -> usize {
        self.projection.rows()
    }
}

impl fmt::Display for NumericalGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.presentation)
    }
}

pub fn numerical_group(l: &EulerLattice) -> Result<NumericalGroup> {
    let k = chi_kernels(l);
    if !k.agree {
        return Err(Error::KernelsDisagree);
    }
    let n = l.rank();
    let presentation = quotient_presentation(n, &k.left)?;
    // the kernel is saturated, so its invariant factors are all 1 and the
    // remaining rows of U are coordinates on the quotient
    let kr = k.left.rank();
    let u = presentation.coordinate_matrix().clone();
    let u_inv = unimodular_inverse(&u)?;
    let projection = u.select_rows(kr..n);
    let section = u_inv.select_columns(kr..n);
    debug_assert!(projection.mul(&section).map(|p| p == IntMatrix::identity(n - kr)).unwrap_or(false));
    Ok(NumericalGroup { kernel: k.left, presentation, projection, section })
}

/// The map `N(src) → N(dst)` induced by `f: K₀(src) → K₀(dst)`, provided `f`
/// sends `Ker χ_src` into `Ker χ_dst`.
pub fn induced_numerical_map(f: &IntMatrix, src: &EulerLattice, dst: &EulerLattice) -> Result<IntMatrix> {
    let (ns, nd) = (numerical_group(src)?, numerical_group(dst)?);
    induced_between(f, &ns, &nd)
}

pub(crate) fn induced_between(f: &IntMatrix, src: &NumericalGroup, dst: &NumericalGroup) -> Result<IntMatrix> {
    if f.cols() != src.kernel.ambient_rank() || f.rows() != dst.kernel.ambient_rank() {
        return Err(Error::Shape(format!(
            "map is {}x{} between lattices of rank {} and {}",
            f.rows(),
            f.cols(),
            src.kernel.ambient_rank(),
            dst.kernel.ambient_rank()
        )));
    }
    for v in src.kernel.basis_vectors() {
        let image = f.apply(&v)?;
        if !dst.kernel.contains(&image) {
            return Err(Error::KernelNotPreserved(format!("{} maps to {}", fmt_vector(&v), fmt_vector(&image))));
        }
    }
    dst.projection.mul(f)?.mul(&src.section)
}

#[cfg(test)]
mod tests;
