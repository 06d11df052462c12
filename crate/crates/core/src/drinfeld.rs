//! Drinfeld quotients `A/I` materialized up to a ξ-path length, with the degree
//! range in which truncation cannot affect cohomology.

use std::collections::HashMap;
use std::fmt;

use crate::dgcat::{Cohomology, DGCategory, DGFunctor, DgStructure};
use crate::error::{Error, Result};
use crate::field::{int, Accumulator, Field, Scalar, SparseVec};
use crate::perfect::{hom_complex, PerfMorphism, TwistedComplex};

/// A ξ-path `f_n ξ f_{n-1} ξ … ξ f_0` from `objects[0]` to `objects[n+1]`.
///
/// `objects = [a, c_1, …, c_n, b]` with every `c_i` contracted, and
/// `factors[i]` a basis element of `Hom_A(objects[i], objects[i+1])`, so the
/// factors are listed in the order they are traversed.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    pub objects: Vec<usize>,
    pub factors: Vec<usize>,
}

impl Word {
    /// Number of ξ letters.
    pub fn length(&self) -> usize {
        self.factors.len() - 1
    }
}

/// Degrees of `Hom_{A/I}(a, b)` whose cohomology is unaffected by truncation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TrustWindow {
    All,
    AtLeast(i32),
    Nothing,
}

impl TrustWindow {
    pub fn contains(&self, degree: i32) -> bool {
        match self {
            TrustWindow::All => true,
            TrustWindow::AtLeast(m) => degree >= *m,
            TrustWindow::Nothing => false,
        }
    }

    /// The window in which both inputs are trusted.
    pub fn meet(self, other: TrustWindow) -> TrustWindow {
        match (self, other) {
            (TrustWindow::Nothing, _) | (_, TrustWindow::Nothing) => TrustWindow::Nothing,
            (TrustWindow::All, w) | (w, TrustWindow::All) => w,
            (TrustWindow::AtLeast(a), TrustWindow::AtLeast(b)) => TrustWindow::AtLeast(a.max(b)),
        }
    }
}

impl fmt::Display for TrustWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TrustWindow::All => write!(f, "all degrees"),
            TrustWindow::AtLeast(m) => write!(f, "degrees >= {m}"),
            TrustWindow::Nothing => write!(f, "no degrees"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct QuotientHom {
    words: Vec<Word>,
    index: HashMap<Word, usize>,
    degrees: Vec<i32>,
    diffs: Vec<SparseVec>,
}

/// `A/I` with all ξ-paths of length at most `depth`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientCategory {
    base: DGCategory,
    contracted: Vec<usize>,
    depth: usize,
    homs: Vec<QuotientHom>,
    trust: Vec<TrustWindow>,
}

fn sign_of(odd: bool) -> Scalar {
    if odd {
        int(-1)
    } else {
        int(1)
    }
}

impl DgStructure for QuotientCategory {
    fn field(&self) -> Field {
        self.base.field()
    }

    fn object_count(&self) -> usize {
        self.base.object_count()
    }

    fn object_label(&self, a: usize) -> &str {
        self.base.object_label(a)
    }

    fn hom_dim(&self, a: usize, b: usize) -> usize {
        self.hom(a, b).words.len()
    }

    fn basis_degree(&self, a: usize, b: usize, i: usize) -> i32 {
        self.hom(a, b).degrees[i]
    }

    fn basis_name(&self, a: usize, b: usize, i: usize) -> String {
        self.word_name(&self.hom(a, b).words[i])
    }

    fn differential(&self, a: usize, b: usize, i: usize) -> SparseVec {
        self.hom(a, b).diffs[i].clone()
    }

    /// Concatenation; `None` when the product is longer than the depth.
    fn compose(&self, a: usize, b: usize, c: usize, g: usize, f: usize) -> Option<SparseVec> {
        let gw = &self.hom(b, c).words[g];
        let fw = &self.hom(a, b).words[f];
        if gw.length() + fw.length() > self.depth {
            return None;
        }
        let field = self.field();
        let n = self.object_count();
        let junction = (fw.objects[fw.objects.len() - 2], b, gw.objects[1]);
        let joint = self.base.compose(junction.0, junction.1, junction.2, gw.factors[0], fw.factors[fw.factors.len() - 1])?;
        let target = &self.homs[a * n + c];
        let mut acc = Accumulator::new(field);
        for (t, coef) in joint.iter() {
            let mut objects = fw.objects.clone();
            objects.pop();
            objects.extend_from_slice(&gw.objects[1..]);
            let mut factors = fw.factors[..fw.factors.len() - 1].to_vec();
            factors.push(*t);
            factors.extend_from_slice(&gw.factors[1..]);
            let w = Word { objects, factors };
            acc.add_term(target.index[&w], coef);
        }
        Some(acc.finish())
    }

    fn identity(&self, a: usize) -> SparseVec {
        let target = self.hom(a, a);
        let id = self.base.identity(a);
        SparseVec::from_terms(
            self.field(),
            id.iter().map(|(t, c)| (target.index[&Word { objects: vec![a, a], factors: vec![*t] }], c.clone())),
        )
    }
}

impl QuotientCategory {
    fn hom(&self, a: usize, b: usize) -> &QuotientHom {
        &self.homs[a * self.base.object_count() + b]
    }

    pub fn base(&self) -> &DGCategory {
        &self.base
    }

    pub fn contracted(&self) -> &[usize] {
        &self.contracted
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn word(&self, a: usize, b: usize, i: usize) -> &Word {
        &self.hom(a, b).words[i]
    }

    pub fn word_name(&self, w: &Word) -> String {
        let mut parts = Vec::with_capacity(2 * w.factors.len());
        for i in (0..w.factors.len()).rev() {
            parts.push(self.base.basis_name(w.objects[i], w.objects[i + 1], w.factors[i]));
            if i > 0 {
                parts.push(format!("ξ[{}]", self.base.object_label(w.objects[i])));
            }
        }
        parts.join(" ")
    }

    pub fn trust_window(&self, a: usize, b: usize) -> TrustWindow {
        self.trust[a * self.base.object_count() + b]
    }

    /// Degrees in which `Hom(X, Y)` between twisted complexes over the quotient
    /// is unaffected by truncation. Twists must consist of length-0 words;
    /// otherwise nothing is trusted.
    pub fn trust_window_between(&self, x: &TwistedComplex, y: &TwistedComplex) -> TrustWindow {
        let short = |t: &TwistedComplex| {
            t.twist().iter().all(|(&(j, i), v)| {
                let (a, b) = (t.entries()[i].object, t.entries()[j].object);
                v.iter().all(|(w, _)| self.word(a, b, *w).length() == 0)
            })
        };
        if !short(x) || !short(y) {
            return TrustWindow::Nothing;
        }
        let mut window = TrustWindow::All;
        for sx in x.entries() {
            for ty in y.entries() {
                let w = match self.trust_window(sx.object, ty.object) {
                    TrustWindow::AtLeast(m) => TrustWindow::AtLeast(m - ty.shift + sx.shift),
                    other => other,
                };
                window = window.meet(w);
            }
        }
        window
    }

    pub fn cohomology(&self, a: usize, b: usize, degree: i32) -> Result<Cohomology> {
        if !self.trust_window(a, b).contains(degree) {
            return Err(Error::OutsideTrustWindow {
                source_obj: self.object_label(a).to_string(),
                target_obj: self.object_label(b).to_string(),
                degree,
            });
        }
        let (complex, index) = self.hom_complex(a, b)?;
        let mut h = complex.cohomology(degree);
        h.representatives = h.representatives.iter().map(|r| index.globalize(self.field(), degree, r)).collect();
        Ok(h)
    }

    /// `H^0 Hom_{A/I}(a, b)` with representatives in the ξ-path basis.
    pub fn h0_hom(&self, a: usize, b: usize) -> Result<Cohomology> {
        self.cohomology(a, b, 0)
    }

    pub fn h0_hom_by_label(&self, a: &str, b: &str) -> Result<Cohomology> {
        self.h0_hom(self.require_object(a)?, self.require_object(b)?)
    }

    /// `q: A → A/I`, the identity on objects and the inclusion of length-0 paths.
    pub fn quotient_functor(&self) -> DGFunctor {
        let n = self.object_count();
        let mut maps = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                let target = self.hom(a, b);
                maps.push(
                    (0..self.base.hom_dim(a, b))
                        .map(|e| SparseVec::unit(target.index[&Word { objects: vec![a, b], factors: vec![e] }]))
                        .collect(),
                );
            }
        }
        DGFunctor::new(n, (0..n).collect(), maps).expect("square tables")
    }

    /// Levelwise quasi-isomorphism test that only looks at trusted degrees.
    pub fn is_quasi_iso_trusted(&self, x: &TwistedComplex, y: &TwistedComplex, f: &PerfMorphism) -> Result<bool> {
        let z = crate::perfect::cone(self, x, y, f)?;
        for a in 0..self.object_count() {
            let ra = TwistedComplex::representable(a);
            let window = self.trust_window_between(&ra, &z);
            if window == TrustWindow::Nothing {
                return Err(Error::OutsideTrustWindow {
                    source_obj: self.object_label(a).to_string(),
                    target_obj: "cone".into(),
                    degree: 0,
                });
            }
            let h = hom_complex(self, &ra, &z)?;
            if h.complex.degrees().any(|n| window.contains(n) && h.complex.cohomology_dim(n) > 0) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

fn enumerate_words(base: &DGCategory, contracted: &[usize], a: usize, b: usize, depth: usize) -> Vec<Word> {
    let mut out = Vec::new();
    // partial words ending at an object, extended one factor at a time
    let mut partial: Vec<Word> = vec![Word { objects: vec![a], factors: Vec::new() }];
    for _ in 0..=depth {
        let mut next = Vec::new();
        for w in &partial {
            let last = *w.objects.last().expect("nonempty");
            for e in 0..base.hom_dim(last, b) {
                let mut done = w.clone();
                done.objects.push(b);
                done.factors.push(e);
                out.push(done);
            }
            for &c in contracted {
                for e in 0..base.hom_dim(last, c) {
                    let mut longer = w.clone();
                    longer.objects.push(c);
                    longer.factors.push(e);
                    next.push(longer);
                }
            }
        }
        partial = next;
    }
    out.sort_by(|x, y| x.length().cmp(&y.length()).then_with(|| x.cmp(y)));
    out
}

fn word_degree(base: &DGCategory, w: &Word) -> i32 {
    let factors: i32 = (0..w.factors.len()).map(|i| base.basis_degree(w.objects[i], w.objects[i + 1], w.factors[i])).sum();
    factors - w.length() as i32
}

fn word_differential(base: &DGCategory, w: &Word, index: &HashMap<Word, usize>) -> SparseVec {
    let field = base.field();
    let n = w.length();
    let degs: Vec<i32> = (0..=n).map(|i| base.basis_degree(w.objects[i], w.objects[i + 1], w.factors[i])).collect();
    // degree of everything written to the left of factor i (factors and ξ after it)
    let left_of_factor = |i: usize| -> i32 { degs[i + 1..].iter().sum::<i32>() - (n - i) as i32 };
    let mut acc = Accumulator::new(field);
    for i in 0..=n {
        let d = base.differential(w.objects[i], w.objects[i + 1], w.factors[i]);
        let s = sign_of(left_of_factor(i).rem_euclid(2) == 1);
        for (t, coef) in d.iter() {
            let mut v = w.clone();
            v.factors[i] = *t;
            acc.add_term(index[&v], &field.mul(&s, coef));
        }
    }
    for j in 1..=n {
        // ξ at c_j sits between factors j-1 and j; to its left are factors j..n and ξ's j+1..n
        let left = degs[j..].iter().sum::<i32>() - (n - j) as i32;
        let s = sign_of(left.rem_euclid(2) == 1);
        let (x, c, y) = (w.objects[j - 1], w.objects[j], w.objects[j + 1]);
        let joint = base.compose(x, c, y, w.factors[j], w.factors[j - 1]).expect("base tables are complete");
        for (t, coef) in joint.iter() {
            let mut objects = w.objects.clone();
            objects.remove(j);
            let mut factors = w.factors.clone();
            factors.splice(j - 1..=j, [*t]);
            acc.add_term(index[&Word { objects, factors }], &field.mul(&s, coef));
        }
    }
    acc.finish()
}

fn max_degree(base: &DGCategory, pairs: impl Iterator<Item = (usize, usize)>) -> Option<i32> {
    pairs.flat_map(|(x, y)| base.hom_degrees(x, y)).max()
}

/// A length-`n` ξ-path from `a` to `b` has degree at most
/// `h_in + h_out - 1 + (n - 1)(h_I - 1)`; cohomology in degree `m` is exact once
/// no path longer than the depth reaches degree `m - 1`.
fn trust_window(base: &DGCategory, contracted: &[usize], a: usize, b: usize, depth: usize) -> TrustWindow {
    let h_in = max_degree(base, contracted.iter().map(|&c| (a, c)));
    let h_out = max_degree(base, contracted.iter().map(|&c| (c, b)));
    let (Some(h_in), Some(h_out)) = (h_in, h_out) else {
        return TrustWindow::All;
    };
    let any_path = contracted.iter().any(|&c| base.hom_dim(a, c) > 0 && base.hom_dim(c, b) > 0);
    if !any_path {
        return TrustWindow::All;
    }
    let h_i = max_degree(base, contracted.iter().flat_map(|&c| contracted.iter().map(move |&d| (c, d))))
        .expect("identities live in Hom(c, c)");
    if h_i >= 1 {
        return TrustWindow::Nothing;
    }
    let bound = h_in as i64 + h_out as i64 - 1 + depth as i64 * (h_i as i64 - 1);
    TrustWindow::AtLeast((bound + 2).clamp(i32::MIN as i64, i32::MAX as i64) as i32)
}

/// Materializes `A/I` up to ξ-path length `depth`.
pub fn drinfeld_quotient(base: &DGCategory, contracted: &[&str], depth: usize) -> Result<QuotientCategory> {
    if depth < 2 {
        return Err(Error::DepthTooSmall(depth));
    }
    let mut ids = Vec::with_capacity(contracted.len());
    for label in contracted {
        let c = base.require_object(label)?;
        if !ids.contains(&c) {
            ids.push(c);
        }
    }
    ids.sort_unstable();
    let n = base.object_count();
    let mut homs = Vec::with_capacity(n * n);
    let mut trust = Vec::with_capacity(n * n);
    for a in 0..n {
        for b in 0..n {
            let words = enumerate_words(base, &ids, a, b, depth);
            let index: HashMap<Word, usize> = words.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect();
            let degrees: Vec<i32> = words.iter().map(|w| word_degree(base, w)).collect();
            if let (Some(lo), Some(hi)) = (degrees.iter().min(), degrees.iter().max()) {
                if *hi as i64 - *lo as i64 >= crate::dgcat::complex::MAX_DEGREE_SPAN {
                    return Err(Error::DegreeOverflow(format!(
                        "Hom({}, {}) in the quotient spans degrees {lo}..={hi}",
                        base.object_label(a),
                        base.object_label(b)
                    )));
                }
            }
            let diffs = words.iter().map(|w| word_differential(base, w, &index)).collect();
            homs.push(QuotientHom { words, index, degrees, diffs });
            trust.push(trust_window(base, &ids, a, b, depth));
        }
    }
    Ok(QuotientCategory { base: base.clone(), contracted: ids, depth, homs, trust })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComparisonRow {
    pub source: String,
    pub target: String,
    pub expected: usize,
    pub computed: usize,
}

impl ComparisonRow {
    pub fn matches(&self) -> bool {
        self.expected == self.computed
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComparisonReport {
    pub rows: Vec<ComparisonRow>,
}

impl ComparisonReport {
    pub fn all_match(&self) -> bool {
        self.rows.iter().all(ComparisonRow::matches)
    }
}

impl fmt::Display for ComparisonReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rows {
            let verdict = if r.matches() { "ok" } else { "MISMATCH" };
            writeln!(f, "H0 Hom({}, {}) = {} (expected {}) {verdict}", r.source, r.target, r.computed, r.expected)?;
        }
        Ok(())
    }
}

/// Compares `dim H^0 Hom_{A/I}` against independently known dimensions.
pub fn verdier_hom_check(
    base: &DGCategory,
    contracted: &[&str],
    pairs: &[(&str, &str, usize)],
    depth: usize,
) -> Result<ComparisonReport> {
    let q = drinfeld_quotient(base, contracted, depth)?;
    let rows = pairs
        .iter()
        .map(|&(s, t, expected)| {
            let computed = q.h0_hom_by_label(s, t)?.dim;
            Ok(ComparisonRow { source: s.to_string(), target: t.to_string(), expected, computed })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ComparisonReport { rows })
}
