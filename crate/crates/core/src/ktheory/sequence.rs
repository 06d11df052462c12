use std::fmt;

use num_bigint::BigInt;

use super::{chi_kernels, induced_between, numerical_group, EulerLattice, NumericalGroup, CONVENTION};
use crate::error::{Error, Result};
use crate::lattice::{
    check_exact_at, check_exact_at_presented, cokernel, fmt_vector, image_lattice, intersect, is_torsion_free,
    quotient_presentation, AbGroupPresentation, ExactnessReport, IntMatrix, Sublattice,
};

/// K₀ data of `I ⊂ A → A/I`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KTriple {
    pub sub: EulerLattice,
    pub ambient: EulerLattice,
    pub quotient: EulerLattice,
    /// `rank A x rank I`
    pub i_star: IntMatrix,
    /// `rank Q x rank A`
    pub q_star: IntMatrix,
    /// Relations presenting K₀(Q) as a quotient of `Z^{rank Q}`, one per column.
    pub q_relations: IntMatrix,
    pub quotient_preserves_compacts: bool,
    pub subcategory_thick: bool,
}

impl KTriple {
    pub fn new(sub: EulerLattice, ambient: EulerLattice, quotient: EulerLattice, i_star: IntMatrix, q_star: IntMatrix) -> Result<Self> {
        let q_relations = IntMatrix::zeros(quotient.rank(), 0);
        Self::with_relations(sub, ambient, quotient, i_star, q_star, q_relations)
    }

    pub fn with_relations(
        sub: EulerLattice,
        ambient: EulerLattice,
        quotient: EulerLattice,
        i_star: IntMatrix,
        q_star: IntMatrix,
        q_relations: IntMatrix,
    ) -> Result<Self> {
        let (ni, na, nq) = (sub.rank(), ambient.rank(), quotient.rank());
        if i_star.rows() != na || i_star.cols() != ni {
            return Err(Error::Shape(format!("i_* is {}x{}, expected {na}x{ni}", i_star.rows(), i_star.cols())));
        }
        if q_star.rows() != nq || q_star.cols() != na {
            return Err(Error::Shape(format!("q_* is {}x{}, expected {nq}x{na}", q_star.rows(), q_star.cols())));
        }
        if q_relations.rows() != nq {
            return Err(Error::Shape(format!("relations live in Z^{}, expected Z^{nq}", q_relations.rows())));
        }
        let relations = image_lattice(&q_relations);
        let composite = q_star.mul(&i_star)?;
        if let Some(c) = composite.columns().into_iter().find(|c| !relations.contains(c)) {
            return Err(Error::Input(format!("q_* i_* does not vanish: a class of I maps to {}", fmt_vector(&c))));
        }
        let g = quotient.gram();
        let left = g.transpose().mul(&q_relations)?;
        let right = g.mul(&q_relations)?;
        if !left.is_zero() || !right.is_zero() {
            return Err(Error::Input("the Euler form of the quotient does not vanish on its relations".into()));
        }
        Ok(KTriple {
            sub,
            ambient,
            quotient,
            i_star,
            q_star,
            q_relations,
            quotient_preserves_compacts: false,
            subcategory_thick: false,
        })
    }

    pub fn preserving_compacts(mut self, flag: bool) -> Self {
        self.quotient_preserves_compacts = flag;
        self
    }

    pub fn thick(mut self, flag: bool) -> Self {
        self.subcategory_thick = flag;
        self
    }

    /// Whether `χ_A(i_* u, i_* v) = χ_I(u, v)`, as for a fully faithful inclusion.
    pub fn euler_forms_compatible(&self) -> bool {
        self.i_star
            .transpose()
            .mul(self.ambient.gram())
            .and_then(|m| m.mul(&self.i_star))
            .map(|m| &m == self.sub.gram())
            .unwrap_or(false)
    }
}

/// What a verdict rests on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Backing {
    Lemma,
    Theorem,
    Corollary,
    /// Checked, but no result predicts the outcome under the recorded hypotheses.
    Unbacked,
}

impl fmt::Display for Backing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Backing::Lemma => "lemma-backed",
            Backing::Theorem => "theorem-backed",
            Backing::Corollary => "corollary-backed",
            Backing::Unbacked => "not theorem-backed",
        };
        write!(f, "{s}")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub statement: String,
    pub holds: bool,
    pub backing: Backing,
    pub witness: Option<Vec<BigInt>>,
}

impl Verdict {
    /// A failure is a contradiction only when a result predicted success.
    pub fn contradiction(&self) -> bool {
        !self.holds && self.backing != Backing::Unbacked
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let outcome = match (self.holds, self.backing) {
            (true, _) => "holds",
            (false, Backing::Unbacked) => "fails (consistent: hypotheses not asserted)",
            (false, _) => "FAILS",
        };
        write!(f, "{}: {outcome} [{}]", self.statement, self.backing)?;
        if let Some(w) = &self.witness {
            write!(f, " witness {}", fmt_vector(w))?;
        }
        Ok(())
    }
}

fn missing(sup: &Sublattice, sub: &Sublattice) -> Option<Vec<BigInt>> {
    sub.basis_vectors().into_iter().find(|v| !sup.contains(v))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KermapsReport {
    pub euler_forms_compatible: bool,
    pub verdicts: [Verdict; 3],
}

impl KermapsReport {
    pub fn consistent(&self) -> bool {
        self.verdicts.iter().all(|v| !v.contradiction())
    }
}

impl fmt::Display for KermapsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "convention: {CONVENTION}")?;
        if !self.euler_forms_compatible {
            writeln!(f, "note: i_*^T G_A i_* != G_I")?;
        }
        for (k, v) in self.verdicts.iter().enumerate() {
            writeln!(f, "({}) {v}", k + 1)?;
        }
        Ok(())
    }
}

/// Kernels of the Euler forms under `i_*` and `q_*`, using left kernels.
pub fn check_kermaps(t: &KTriple) -> Result<KermapsReport> {
    let ker_i = chi_kernels(&t.sub).left;
    let ker_a = chi_kernels(&t.ambient).left;
    let ker_q = chi_kernels(&t.quotient).left;

    let lhs = intersect(&image_lattice(&t.i_star), &ker_a)?;
    let rhs = ker_i.image_under(&t.i_star)?;
    let first = Verdict {
        statement: "i_*(K0(I)) ∩ Ker chi_A = i_*(Ker chi_I)".into(),
        holds: lhs == rhs,
        backing: Backing::Lemma,
        witness: missing(&rhs, &lhs).or_else(|| missing(&lhs, &rhs)),
    };

    let pushed = ker_a.image_under(&t.q_star)?;
    let second = Verdict {
        statement: "q_*(Ker chi_A) ⊆ Ker chi_Q".into(),
        holds: ker_q.contains_lattice(&pushed),
        backing: Backing::Lemma,
        witness: missing(&ker_q, &pushed),
    };

    let generated = pushed.sum(&image_lattice(&t.q_relations))?;
    let third = Verdict {
        statement: "q_*(Ker chi_A) = Ker chi_Q".into(),
        holds: generated == ker_q,
        backing: if t.quotient_preserves_compacts { Backing::Lemma } else { Backing::Unbacked },
        witness: missing(&generated, &ker_q).or_else(|| missing(&ker_q, &generated)),
    };
    Ok(KermapsReport { euler_forms_compatible: t.euler_forms_compatible(), verdicts: [first, second, third] })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SequenceReport {
    pub subcategory_thick: bool,
    pub quotient_preserves_compacts: bool,
    pub coker_torsion_free: bool,
    pub backing: Backing,
    pub groups: [NumericalGroup; 3],
    /// Induced maps `N(I) → N(A)` and `N(A) → N(Q)`, or why they do not exist.
    pub maps: std::result::Result<(IntMatrix, IntMatrix), String>,
    pub exactness: Option<ExactnessReport>,
    /// `K₀(A) / (i_* K₀(I) + Ker chi_A)`, to be compared with `N(Q)`.
    pub chain_quotient: AbGroupPresentation,
    pub chain_matches: bool,
}

impl SequenceReport {
    pub fn exact(&self) -> bool {
        self.exactness.as_ref().is_some_and(ExactnessReport::exact) && self.chain_matches
    }

    pub fn contradiction(&self) -> bool {
        !self.exact() && self.backing != Backing::Unbacked
    }
}

impl fmt::Display for SequenceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "convention: {CONVENTION}")?;
        writeln!(
            f,
            "hypotheses: thick = {}, quotient preserves compacts = {}, coker(i_*) torsion-free = {}",
            self.subcategory_thick, self.quotient_preserves_compacts, self.coker_torsion_free
        )?;
        let [ni, na, nq] = &self.groups;
        writeln!(f, "N(I) = {ni}, N(A) = {na}, N(Q) = {nq}")?;
        match &self.maps {
            Ok((i, q)) => {
                write!(f, "induced i:\n{i}induced q:\n{q}")?;
            }
            Err(e) => writeln!(f, "induced maps unavailable: {e}")?,
        }
        if let Some(e) = &self.exactness {
            writeln!(
                f,
                "exact at N(A): {}, N(A) -> N(Q) surjective: {}",
                e.image_equals_kernel && e.composite_zero,
                e.surjective
            )?;
            if let Some(w) = &e.witness {
                writeln!(f, "kernel class outside the image: {}", fmt_vector(w))?;
            }
        }
        writeln!(
            f,
            "K0(A)/(Im i_* + Ker chi_A) = {} ({} N(Q))",
            self.chain_quotient,
            if self.chain_matches { "matches" } else { "DOES NOT match" }
        )?;
        let verdict = match (self.exact(), self.backing) {
            (true, b) => format!("exact [{b}]"),
            (false, Backing::Unbacked) => "not exact; hypotheses of both the theorem and the corollary unmet".into(),
            (false, b) => format!("NOT EXACT despite being {b}"),
        };
        writeln!(f, "verdict: {verdict}")
    }
}

/// `N(I) → N(A) → N(Q) → 0`, checked exactly.
pub fn verify_numerical_sequence(t: &KTriple) -> Result<SequenceReport> {
    let groups = [numerical_group(&t.sub)?, numerical_group(&t.ambient)?, numerical_group(&t.quotient)?];
    let coker_torsion_free = is_torsion_free(&cokernel(&t.i_star));
    let backing = if !t.subcategory_thick {
        Backing::Unbacked
    } else if t.quotient_preserves_compacts {
        Backing::Theorem
    } else if coker_torsion_free {
        Backing::Corollary
    } else {
        Backing::Unbacked
    };
    let maps = induced_between(&t.i_star, &groups[0], &groups[1])
        .and_then(|i| Ok((i, induced_between(&t.q_star, &groups[1], &groups[2])?)))
        .map_err(|e| e.to_string());
    let exactness = match &maps {
        Ok((i, q)) => Some(check_exact_at(i, q)?),
        Err(_) => None,
    };
    let span = image_lattice(&t.i_star).sum(&groups[1].kernel)?;
    let chain_quotient = quotient_presentation(t.ambient.rank(), &span)?;
    let chain_matches = chain_quotient.isomorphic(&groups[2].presentation);
    Ok(SequenceReport {
        subcategory_thick: t.subcategory_thick,
        quotient_preserves_compacts: t.quotient_preserves_compacts,
        coker_torsion_free,
        backing,
        groups,
        maps,
        exactness,
        chain_quotient,
        chain_matches,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct K0Report {
    pub exactness: ExactnessReport,
    pub coker: AbGroupPresentation,
    pub expected_coker: AbGroupPresentation,
}

impl K0Report {
    pub fn coker_matches(&self) -> bool {
        self.coker.isomorphic(&self.expected_coker)
    }

    pub fn holds(&self) -> bool {
        self.exactness.exact() && self.coker_matches()
    }
}

impl fmt::Display for K0Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let e = &self.exactness;
        writeln!(f, "q_* i_* = 0: {}", e.composite_zero)?;
        writeln!(f, "Im i_* = Ker q_*: {}", e.image_equals_kernel)?;
        if let Some(idx) = &e.finite_index {
            writeln!(f, "[Ker q_* : Im i_*] = {idx}")?;
        }
        writeln!(f, "q_* surjective: {}", e.surjective)?;
        writeln!(f, "coker(i_*) = {} (expected {})", self.coker, self.expected_coker)
    }
}

/// `K₀(I) → K₀(A) → K₀(Q) → 0`, with `K₀(Q)` presented by `q_relations`.
pub fn verify_k0_sequence(t: &KTriple, expected_coker: &AbGroupPresentation) -> Result<K0Report> {
    let exactness = check_exact_at_presented(&t.i_star, &t.q_star, &t.q_relations)?;
    Ok(K0Report { exactness, coker: cokernel(&t.i_star), expected_coker: expected_coker.clone() })
}
