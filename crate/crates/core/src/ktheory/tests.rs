use num_bigint::BigInt;

use super::*;
use crate::dgcat::{from_quiver, DGCategory, QuiverPresentation};
use crate::drinfeld::{drinfeld_quotient, TrustWindow};
use crate::field::Field;
use crate::lattice::{to_bigint_vec, AbGroupPresentation, IntMatrix};

use num_traits::{One, Zero};

fn is_identity(m: &IntMatrix) -> bool {
    m.is_square()
        && (0..m.rows()).all(|i| (0..m.cols()).all(|j| if i == j { m[(i, j)].is_one() } else { m[(i, j)].is_zero() }))
}

fn vec_i64(v: &[i64]) -> Vec<BigInt> {
    to_bigint_vec(v)
}

fn m(rows: &[Vec<i64>]) -> IntMatrix {
    IntMatrix::from_rows(rows).unwrap()
}

fn lat(rows: &[Vec<i64>]) -> EulerLattice {
    EulerLattice::from_rows(rows).unwrap()
}

fn empty(rows: usize, cols: usize) -> IntMatrix {
    IntMatrix::zeros(rows, cols)
}

fn a2() -> DGCategory {
    from_quiver(&QuiverPresentation::new(&["x", "y"]).arrow("f", "x", "y"), Field::Rational).unwrap()
}

/// Number of paths from `s` to `t` in an acyclic quiver given by its arrows.
fn count_paths(arrows: &[(usize, usize)], s: usize, t: usize) -> i64 {
    if s == t {
        return 1;
    }
    arrows.iter().filter(|a| a.0 == s).map(|a| count_paths(arrows, a.1, t)).sum()
}

#[test]
fn gram_of_a2_counts_paths() {
    let c = a2();
    let gens = [TwistedComplex::representable(0), TwistedComplex::representable(1)];
    let l = gram_from_category(&c, &gens).unwrap();
    let arrows = [(0, 1)];
    let expected: Vec<Vec<i64>> = (0..2).map(|i| (0..2).map(|j| count_paths(&arrows, i, j)).collect()).collect();
    assert_eq!(l.gram(), &m(&expected));
    assert_eq!(l.gram(), &m(&[vec![1, 1], vec![0, 1]]));
    assert_eq!(l.provenance(), Provenance::ComputedFromCategory);
}

#[test]
fn gram_of_the_point_and_of_a_shift() {
    let k = DGCategory::unit(Field::Rational, "v");
    let p = TwistedComplex::representable(0);
    assert_eq!(gram_from_category(&k, &[p.clone()]).unwrap().gram(), &m(&[vec![1]]));
    let l = gram_from_category(&k, &[p.clone(), p.shift(1, Field::Rational).unwrap()]).unwrap();
    assert_eq!(l.gram(), &m(&[vec![1, -1], vec![-1, 1]]));
    assert!(gram_from_category(&k, &[]).is_err());
}

/// `[[a, b], [c, d]]⁻¹ = [[d, -b], [-c, a]] / det`.
fn inverse_2x2(g: &[[i64; 2]; 2]) -> [[i64; 2]; 2] {
    let det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
    assert!(det == 1 || det == -1);
    [[g[1][1] * det, -g[0][1] * det], [-g[1][0] * det, g[0][0] * det]]
}

#[test]
fn serre_matrices() {
    assert_eq!(serre_from_gram(&lat(&[vec![1, 0], vec![0, 1]])).unwrap(), IntMatrix::identity(2));
    let g = [[1, 1], [0, 1]];
    let inv = inverse_2x2(&g);
    let mut s = [[0i64; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            s[i][j] = (0..2).map(|k| inv[i][k] * g[j][k]).sum();
        }
    }
    let l = lat(&[vec![1, 1], vec![0, 1]]);
    let computed = serre_from_gram(&l).unwrap();
    assert_eq!(computed, m(&[s[0].to_vec(), s[1].to_vec()]));
    assert_eq!(computed, m(&[vec![0, -1], vec![1, 1]]));
    assert_eq!(serre_from_gram(&lat(&[vec![2, 1], vec![1, 1]])).unwrap(), IntMatrix::identity(2));
    assert!(matches!(serre_from_gram(&lat(&[vec![2]])), Err(Error::NotUnimodular(_))));

    let accepted = l.clone().with_serre(computed.clone()).unwrap();
    assert!(chi_kernels(&accepted).agree);
    assert!(l.clone().with_serre(IntMatrix::identity(2)).is_err());
    let report = verify_serre(&l, &computed).unwrap();
    assert!(report.holds());
    assert!(!verify_serre(&l, &IntMatrix::identity(2)).unwrap().holds());
    assert_eq!(coxeter(&computed), m(&[vec![0, 1], vec![-1, -1]]));
}

#[test]
fn kernels_of_the_euler_form() {
    let k = chi_kernels(&lat(&[vec![1, 1], vec![1, 1]]));
    let expected = Sublattice::from_generators(2, &[vec_i64(&[1, -1])]).unwrap();
    assert_eq!((k.left.clone(), k.right.clone(), k.agree), (expected.clone(), expected, true));
    let k = chi_kernels(&lat(&[vec![1, 1], vec![0, 1]]));
    assert!(k.left.is_zero() && k.right.is_zero() && k.agree);
    // χ(v, -) = 0 forces v_0 = 0; χ(-, v) = 0 forces v_1 = 0
    let k = chi_kernels(&lat(&[vec![0, 1], vec![0, 0]]));
    assert_eq!(k.left, Sublattice::from_generators(2, &[vec_i64(&[0, 1])]).unwrap());
    assert_eq!(k.right, Sublattice::from_generators(2, &[vec_i64(&[1, 0])]).unwrap());
    assert!(!k.agree);
}

#[test]
fn numerical_groups() {
    let n = numerical_group(&lat(&[vec![1, 1], vec![0, 1]])).unwrap();
    assert_eq!(n.presentation.to_string(), "Z^2");
    let n = numerical_group(&lat(&[vec![1, 1], vec![1, 1]])).unwrap();
    assert_eq!(n.presentation.to_string(), "Z");
    assert_eq!(n.rank(), 1);
    assert!(n.projection.apply(&vec_i64(&[1, -1])).unwrap().iter().all(|x| *x == BigInt::from(0)));
    assert!(is_identity(&n.projection.mul(&n.section).unwrap()));
    assert!(numerical_group(&lat(&[vec![0]])).unwrap().presentation.is_trivial());
    assert!(matches!(numerical_group(&lat(&[vec![0, 1], vec![0, 0]])), Err(Error::KernelsDisagree)));
    let zero = EulerLattice::new(empty(0, 0), Provenance::UserSupplied).unwrap();
    assert!(numerical_group(&zero).unwrap().presentation.is_trivial());
}

#[test]
fn induced_maps() {
    let l = lat(&[vec![1, 1], vec![1, 1]]);
    let id = induced_numerical_map(&IntMatrix::identity(2), &l, &l).unwrap();
    assert!(is_identity(&id));
    assert!(induced_numerical_map(&empty(2, 2), &l, &l).unwrap().is_zero());
    let unimodular = lat(&[vec![1, 0], vec![0, 1]]);
    let err = induced_numerical_map(&IntMatrix::identity(2), &l, &unimodular).unwrap_err();
    assert_eq!(err, Error::KernelNotPreserved("(1, -1) maps to (1, -1)".into()));
}

/// `{x} ⊂ A₂ → A₂/{x}` with K₀(Q) generated by the image of `y`.
fn a2_triple() -> KTriple {
    KTriple::new(
        lat(&[vec![1]]),
        lat(&[vec![1, 1], vec![0, 1]]),
        lat(&[vec![1]]),
        m(&[vec![1], vec![0]]),
        m(&[vec![0, 1]]),
    )
    .unwrap()
}

fn degenerate_triple() -> KTriple {
    KTriple::new(lat(&[vec![4]]), lat(&[vec![1, 1], vec![1, 1]]), lat(&[vec![0]]), m(&[vec![1], vec![1]]), m(&[vec![1, -1]]))
        .unwrap()
}

fn torsion_triple() -> KTriple {
    KTriple::with_relations(lat(&[vec![4]]), lat(&[vec![1]]), lat(&[vec![0]]), m(&[vec![2]]), m(&[vec![1]]), m(&[vec![2]])).unwrap()
}

#[test]
fn triples_are_checked() {
    assert!(KTriple::new(lat(&[vec![1]]), lat(&[vec![1]]), lat(&[vec![1]]), m(&[vec![1]]), m(&[vec![1]])).is_err());
    assert!(matches!(
        KTriple::new(lat(&[vec![1]]), lat(&[vec![1]]), lat(&[vec![1]]), m(&[vec![1, 0]]), m(&[vec![1]])),
        Err(Error::Shape(_))
    ));
    // the Euler form of Q must vanish on its relations
    assert!(KTriple::with_relations(lat(&[vec![1]]), lat(&[vec![1]]), lat(&[vec![1]]), m(&[vec![2]]), m(&[vec![1]]), m(&[vec![2]])).is_err());
    assert!(a2_triple().euler_forms_compatible());
    assert!(degenerate_triple().euler_forms_compatible());
}

#[test]
fn kermaps_on_the_flagship_triple() {
    let r = check_kermaps(&a2_triple()).unwrap();
    assert!(r.verdicts.iter().all(|v| v.holds && v.witness.is_none()));
    assert!(r.to_string().starts_with("convention: "));
}

#[test]
fn kermaps_on_a_degenerate_triple() {
    let r = check_kermaps(&degenerate_triple()).unwrap();
    // i_*(Z) = span(1, 1) meets Ker chi_A = span(1, -1) in 0 = i_*(Ker chi_I)
    assert!(r.verdicts[0].holds);
    // q_*(1, -1) = 2 lies in Ker chi_Q = Z but does not generate it
    assert!(r.verdicts[1].holds);
    assert!(!r.verdicts[2].holds);
    assert_eq!(r.verdicts[2].witness, Some(vec_i64(&[1])));
    assert_eq!(r.verdicts[2].backing, Backing::Unbacked);
    assert!(r.consistent());
    assert!(r.to_string().contains("fails (consistent"));
    let asserted = check_kermaps(&degenerate_triple().preserving_compacts(true)).unwrap();
    assert!(!asserted.consistent());
}

#[test]
fn kermaps_with_nothing_contracted() {
    let l = lat(&[vec![1, 1], vec![1, 1]]);
    let t = KTriple::new(lat(&[]), l.clone(), l, empty(2, 0), IntMatrix::identity(2)).unwrap();
    let r = check_kermaps(&t).unwrap();
    assert!(r.verdicts.iter().all(|v| v.holds));
}

#[test]
fn numerical_sequence_from_the_quotient() {
    let c = a2();
    let gens = [TwistedComplex::representable(0), TwistedComplex::representable(1)];
    let la = gram_from_category(&c, &gens).unwrap();
    let (sub, incl) = c.full_subcategory(&["x"]).unwrap();
    let li = gram_from_category(&sub, &[TwistedComplex::representable(0)]).unwrap();
    assert!(incl.check(&sub, &c).is_empty());
    // χ over the quotient from its trusted cohomology
    let q = drinfeld_quotient(&c, &["x"], 3).unwrap();
    assert_eq!(q.trust_window(1, 1), TrustWindow::All);
    let mut chi = 0i64;
    let (complex, _) = q.hom_complex(1, 1).unwrap();
    for n in complex.degrees() {
        if q.trust_window(1, 1).contains(n) {
            let d = q.cohomology(1, 1, n).unwrap().dim as i64;
            chi += if n % 2 == 0 { d } else { -d };
        }
    }
    let lq = EulerLattice::new(m(&[vec![chi]]), Provenance::ComputedFromCategory).unwrap();
    let t = KTriple::new(li, la, lq, m(&[vec![1], vec![0]]), m(&[vec![0, 1]])).unwrap().thick(true).preserving_compacts(true);
    let r = verify_numerical_sequence(&t).unwrap();
    assert!(r.exact(), "{r}");
    assert_eq!(r.backing, Backing::Theorem);
    let [ni, na, nq] = &r.groups;
    assert_eq!((ni.to_string(), na.to_string(), nq.to_string()), ("Z".into(), "Z^2".into(), "Z".into()));
    let k0 = verify_k0_sequence(&t, &AbGroupPresentation::free(1)).unwrap();
    assert!(k0.holds());
    assert_eq!(k0.exactness, r.exactness.clone().unwrap());
}

#[test]
fn contracting_everything() {
    let l = lat(&[vec![1, 1], vec![0, 1]]);
    let t = KTriple::new(l.clone(), l, lat(&[]), IntMatrix::identity(2), empty(0, 2)).unwrap().thick(true);
    let r = verify_numerical_sequence(&t).unwrap();
    assert!(r.groups[2].presentation.is_trivial());
    assert!(r.exact());
    assert_eq!(r.backing, Backing::Corollary);
}

#[test]
fn torsion_in_the_cokernel() {
    let t = torsion_triple().thick(true);
    let r = verify_numerical_sequence(&t).unwrap();
    assert!(!r.coker_torsion_free);
    assert_eq!(r.backing, Backing::Unbacked);
    assert!(!r.exact());
    assert!(!r.contradiction());
    assert_eq!(r.chain_quotient.to_string(), "Z/2");
    assert!(r.to_string().contains("hypotheses of both the theorem and the corollary unmet"));
    let k0 = verify_k0_sequence(&t, &AbGroupPresentation::from_invariant_factors(&[2])).unwrap();
    assert!(k0.holds(), "{k0}");
}

#[test]
fn k0_sequence_with_nothing_contracted() {
    let l = lat(&[vec![1, 1], vec![0, 1]]);
    let t = KTriple::new(lat(&[]), l.clone(), l, empty(2, 0), IntMatrix::identity(2)).unwrap();
    let k0 = verify_k0_sequence(&t, &AbGroupPresentation::free(2)).unwrap();
    assert!(k0.holds());
    assert!(!verify_k0_sequence(&t, &AbGroupPresentation::free(1)).unwrap().holds());
    let k0 = verify_k0_sequence(&a2_triple(), &AbGroupPresentation::free(1)).unwrap();
    assert!(k0.holds());
}
