//! Exact integer linear algebra: Smith and Hermite forms, sublattices,
//! finitely generated abelian groups and exactness checks.

mod matrix;
mod snf;
mod sublattice;

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

pub use matrix::{fmt_vector, to_bigint_vec, IntMatrix};
pub use snf::{smith_normal_form, SmithForm};
pub use sublattice::{hermite_basis, Sublattice};

use crate::error::{Error, Result};

/// Z-basis of `{v : M v = 0}`; the result is saturated in `Z^cols`.
pub fn integer_kernel(m: &IntMatrix) -> Sublattice {
    let s = smith_normal_form(m);
    let r = s.rank();
    let gens: Vec<Vec<BigInt>> = (r..m.cols()).map(|j| s.v.column(j)).collect();
    Sublattice::from_generators(m.cols(), &gens).expect("columns of V have the right length")
}

/// Z-span of the columns of `m`.
pub fn image_lattice(m: &IntMatrix) -> Sublattice {
    Sublattice::from_columns_of(m)
}

pub fn intersect(a: &Sublattice, b: &Sublattice) -> Result<Sublattice> {
    if a.ambient_rank() != b.ambient_rank() {
        return Err(Error::Shape(format!(
            "intersection of sublattices of Z^{} and Z^{}",
            a.ambient_rank(),
            b.ambient_rank()
        )));
    }
    let n = a.ambient_rank();
    let stacked = a.basis().hcat(&b.basis().negated())?;
    let k = integer_kernel(&stacked);
    let gens: Result<Vec<Vec<BigInt>>> = k
        .basis_vectors()
        .iter()
        .map(|xy| a.basis().apply(&xy[..a.rank()]))
        .collect();
    Sublattice::from_generators(n, &gens?)
}

/// A finitely generated abelian group `Z^n / span(relations)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbGroupPresentation {
    generator_count: usize,
    relations: IntMatrix,
    invariant_factors: Vec<BigInt>,
    /// `U` from the Smith form; `U v` gives coordinates adapted to the factors.
    coordinates: IntMatrix,
}

impl AbGroupPresentation {
    /// `relations` is `n x k`, one relation per column.
    pub fn new(relations: IntMatrix) -> Self {
        let n = relations.rows();
        let s = smith_normal_form(&relations);
        let diag = s.diagonal();
        let invariant_factors =
            (0..n).map(|i| diag.get(i).cloned().unwrap_or_else(BigInt::zero)).collect();
        AbGroupPresentation { generator_count: n, relations, invariant_factors, coordinates: s.u }
    }

    pub fn free(rank: usize) -> Self {
        Self::new(IntMatrix::zeros(rank, 0))
    }

    /// Builds the group with the given (nonnegative) invariant factors.
    pub fn from_invariant_factors(factors: &[i64]) -> Self {
        Self::new(IntMatrix::diagonal(factors))
    }

    pub fn generator_count(&self) -> usize {
        self.generator_count
    }

    pub fn relations(&self) -> &IntMatrix {
        &self.relations
    }

    pub fn invariant_factors(&self) -> &[BigInt] {
        &self.invariant_factors
    }

    pub fn coordinate_matrix(&self) -> &IntMatrix {
        &self.coordinates
    }

    pub fn free_rank(&self) -> usize {
        self.invariant_factors.iter().filter(|d| d.is_zero()).count()
    }

    /// Nontrivial torsion factors, `d1 | d2 | ...`, each > 1.
    pub fn torsion(&self) -> Vec<BigInt> {
        self.invariant_factors.iter().filter(|d| !d.is_zero() && !d.is_one()).cloned().collect()
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank() == 0 && self.torsion().is_empty()
    }

    pub fn isomorphic(&self, other: &AbGroupPresentation) -> bool {
        self.free_rank() == other.free_rank() && self.torsion() == other.torsion()
    }
}

impl fmt::Display for AbGroupPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.torsion().iter().map(|d| format!("Z/{d}")).collect();
        match self.free_rank() {
            0 => {}
            1 => parts.insert(0, "Z".into()),
            r => parts.insert(0, format!("Z^{r}")),
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// `Z^ambient_rank / sub`.
pub fn quotient_presentation(ambient_rank: usize, sub: &Sublattice) -> Result<AbGroupPresentation> {
    if sub.ambient_rank() != ambient_rank {
        return Err(Error::Shape(format!(
            "sublattice of Z^{} used in Z^{ambient_rank}",
            sub.ambient_rank()
        )));
    }
    Ok(AbGroupPresentation::new(sub.basis().clone()))
}

pub fn is_torsion_free(p: &AbGroupPresentation) -> bool {
    p.torsion().is_empty()
}

/// Cokernel of `m : Z^cols -> Z^rows`.
pub fn cokernel(m: &IntMatrix) -> AbGroupPresentation {
    AbGroupPresentation::new(m.clone())
}

/// Exactness of `A --f--> B --g--> C` at `B`, and surjectivity of `g`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactnessReport {
    pub composite_zero: bool,
    pub image_in_kernel: bool,
    pub image_equals_kernel: bool,
    /// `[Ker g : Im f]` when finite and not 1.
    pub finite_index: Option<BigInt>,
    pub surjective: bool,
    /// A vector of `Ker g` outside `Im f`.
    pub witness: Option<Vec<BigInt>>,
    pub image: Sublattice,
    pub kernel: Sublattice,
}

impl ExactnessReport {
    pub fn exact(&self) -> bool {
        self.composite_zero && self.image_equals_kernel && self.surjective
    }
}

pub fn check_exact_at(f: &IntMatrix, g: &IntMatrix) -> Result<ExactnessReport> {
    check_exact_at_presented(f, g, &IntMatrix::zeros(g.rows(), 0))
}

/// Like [`check_exact_at`] with target `Z^c / span(target_relations)`.
pub fn check_exact_at_presented(
    f: &IntMatrix,
    g: &IntMatrix,
    target_relations: &IntMatrix,
) -> Result<ExactnessReport> {
    if f.rows() != g.cols() {
        return Err(Error::Shape(format!(
            "f is {}x{} but g is {}x{}",
            f.rows(),
            f.cols(),
            g.rows(),
            g.cols()
        )));
    }
    if target_relations.rows() != g.rows() {
        return Err(Error::Shape("target relations do not match the target of g".into()));
    }
    let middle = g.cols();
    let relations = image_lattice(target_relations);

    // kernel of g modulo relations: first block of ker [g | R]
    let stacked = g.hcat(target_relations)?;
    let k = integer_kernel(&stacked);
    let gens: Vec<Vec<BigInt>> = k.basis_vectors().iter().map(|v| v[..middle].to_vec()).collect();
    let kernel = Sublattice::from_generators(middle, &gens)?;
    let image = image_lattice(f);

    let gf = g.mul(f)?;
    let composite_zero = gf.columns().iter().all(|c| relations.contains(c));
    let image_in_kernel = kernel.contains_lattice(&image);
    let image_equals_kernel = image == kernel;
    let finite_index = if image_in_kernel && !image_equals_kernel {
        image.index_in(&kernel)
    } else {
        None
    };
    let witness = if image_equals_kernel {
        None
    } else {
        kernel.basis_vectors().into_iter().find(|v| !image.contains(v))
    };
    let surjective = image_lattice(g).sum(&relations)? == Sublattice::full(g.rows());
    Ok(ExactnessReport {
        composite_zero,
        image_in_kernel,
        image_equals_kernel,
        finite_index,
        surjective,
        witness,
        image,
        kernel,
    })
}

/// `v` with nonnegative leading entry; used to print lattice vectors stably.
pub fn normalize_sign(v: &[BigInt]) -> Vec<BigInt> {
    match v.iter().find(|x| !x.is_zero()) {
        Some(x) if x.is_negative() => v.iter().map(|y| -y).collect(),
        _ => v.to_vec(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[i64]) -> Vec<BigInt> {
        to_bigint_vec(xs)
    }

    fn m(rows: &[Vec<i64>]) -> IntMatrix {
        IntMatrix::from_rows(rows).unwrap()
    }

    /// All integer vectors with entries in [-b, b].
    fn box_vectors(n: usize, b: i64) -> Vec<Vec<BigInt>> {
        let mut out = vec![vec![]];
        for _ in 0..n {
            out = out
                .into_iter()
                .flat_map(|p: Vec<i64>| (-b..=b).map(move |x| [p.clone(), vec![x]].concat()))
                .collect();
        }
        out.iter().map(|p| v(p)).collect()
    }

    #[test]
    fn kernel_of_all_ones_matches_brute_force() {
        let g = m(&[vec![1, 1], vec![1, 1]]);
        let k = integer_kernel(&g);
        assert_eq!(k, Sublattice::from_generators(2, &[v(&[1, -1])]).unwrap());
        for x in box_vectors(2, 4) {
            let in_kernel = g.apply(&x).unwrap().iter().all(Zero::is_zero);
            assert_eq!(in_kernel, k.contains(&x), "{x:?}");
        }
    }

    #[test]
    fn kernel_trivial_cases() {
        assert!(integer_kernel(&IntMatrix::identity(3)).is_zero());
        assert_eq!(integer_kernel(&IntMatrix::zeros(1, 1)), Sublattice::full(1));
    }

    #[test]
    fn kernel_is_saturated() {
        // 2x - 4y = 0 has kernel spanned by (2, 1), not (4, 2)
        let k = integer_kernel(&m(&[vec![2, -4]]));
        assert_eq!(k, Sublattice::from_generators(2, &[v(&[2, 1])]).unwrap());
    }

    #[test]
    fn quotient_examples() {
        let s = Sublattice::from_generators(2, &[v(&[1, -1])]).unwrap();
        let q = quotient_presentation(2, &s).unwrap();
        assert_eq!(q.free_rank(), 1);
        assert!(is_torsion_free(&q));
        assert_eq!(quotient_presentation(3, &Sublattice::zero(3)).unwrap().free_rank(), 3);
        let z2 = quotient_presentation(1, &Sublattice::from_generators(1, &[v(&[2])]).unwrap()).unwrap();
        assert_eq!(z2.torsion(), v(&[2]));
        assert_eq!(z2.to_string(), "Z/2");
        assert!(quotient_presentation(3, &s).is_err());
    }

    #[test]
    fn image_examples() {
        assert_eq!(
            image_lattice(&m(&[vec![2, 0], vec![0, 0]])),
            Sublattice::from_generators(2, &[v(&[2, 0])]).unwrap()
        );
        assert_eq!(image_lattice(&IntMatrix::identity(2)), Sublattice::full(2));
        assert_eq!(
            image_lattice(&m(&[vec![1, 1], vec![1, 1]])),
            Sublattice::from_generators(2, &[v(&[1, 1])]).unwrap()
        );
    }

    #[test]
    fn intersection_examples() {
        let x = Sublattice::from_generators(2, &[v(&[1, 0])]).unwrap();
        let y = Sublattice::from_generators(2, &[v(&[0, 1])]).unwrap();
        assert!(intersect(&x, &y).unwrap().is_zero());
        assert_eq!(intersect(&x, &x).unwrap(), x);

        let s1 = Sublattice::from_generators(2, &[v(&[2, 0]), v(&[0, 1])]).unwrap();
        let s2 = Sublattice::from_generators(2, &[v(&[1, 1])]).unwrap();
        let got = intersect(&s1, &s2).unwrap();
        assert_eq!(got, Sublattice::from_generators(2, &[v(&[2, 2])]).unwrap());
        // brute force: every small vector in both lattices is in the intersection
        for w in box_vectors(2, 6) {
            assert_eq!(s1.contains(&w) && s2.contains(&w), got.contains(&w));
        }
        assert!(intersect(&x, &Sublattice::zero(3)).is_err());
    }

    #[test]
    fn exactness_examples() {
        let f = m(&[vec![1], vec![0]]);
        let g = m(&[vec![0, 1]]);
        let r = check_exact_at(&f, &g).unwrap();
        assert!(r.exact());

        let zero = IntMatrix::zeros(2, 1);
        let r = check_exact_at(&zero, &IntMatrix::identity(2)).unwrap();
        assert!(r.image_equals_kernel && r.surjective);

        let f2 = m(&[vec![2], vec![0]]);
        let r = check_exact_at(&f2, &g).unwrap();
        assert!(r.image_in_kernel && !r.image_equals_kernel);
        assert_eq!(r.finite_index, Some(BigInt::from(2)));
        assert_eq!(r.witness, Some(v(&[1, 0])));

        assert!(check_exact_at(&m(&[vec![1]]), &g).is_err());
    }

    #[test]
    fn exactness_modulo_target_relations() {
        // Z --2--> Z --1--> Z/2
        let r = check_exact_at_presented(&m(&[vec![2]]), &m(&[vec![1]]), &m(&[vec![2]])).unwrap();
        assert!(r.exact());
    }

    #[test]
    fn torsion_examples() {
        assert!(is_torsion_free(&AbGroupPresentation::free(2)));
        assert!(!is_torsion_free(&AbGroupPresentation::from_invariant_factors(&[2, 0])));
        let c = cokernel(&IntMatrix::diagonal(&[2, 3]));
        assert!(!is_torsion_free(&c));
        assert_eq!(c.torsion(), v(&[6]));
    }
}
