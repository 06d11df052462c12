use std::collections::{BTreeMap, HashMap};

use crate::dgcat::{Complex, DGFunctor, DgStructure, GradedIndex};
use crate::error::{Error, Result};
use crate::field::{int, Accumulator, Field, SparseVec};

/// An entry `a[s]`: an object of the base category and a shift.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Entry {
    pub object: usize,
    pub shift: i32,
}

/// A one-sided twisted complex `(⊕ a_i[s_i], α)`.
///
/// Conventions: `Hom(a[s], b[t])^k = Hom_A(a, b)^{k + t - s}`, composition of
/// components carries no sign, and the differential of a component is
/// `(-1)^t d_A`. The twist component `α_{ji}: a_i[s_i] → a_j[s_j]` has degree 1
/// and may be nonzero only for `i > j`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct TwistedComplex {
    entries: Vec<Entry>,
    twist: BTreeMap<(usize, usize), SparseVec>,
}

fn sign(odd: bool) -> crate::field::Scalar {
    if odd {
        int(-1)
    } else {
        int(1)
    }
}

fn is_odd(n: i32) -> bool {
    n.rem_euclid(2) == 1
}

pub(crate) fn compose_or_fail<C: DgStructure>(
    c: &C,
    (a, b, cc): (usize, usize, usize),
    g: &SparseVec,
    f: &SparseVec,
) -> Result<SparseVec> {
    c.compose_vecs(a, b, cc, g, f).ok_or_else(|| {
        Error::OutsideMaterializedRange(format!(
            "product Hom({}, {}) × Hom({}, {}) is not materialized",
            c.object_label(b),
            c.object_label(cc),
            c.object_label(a),
            c.object_label(b)
        ))
    })
}

impl TwistedComplex {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn representable(object: usize) -> Self {
        TwistedComplex { entries: vec![Entry { object, shift: 0 }], twist: BTreeMap::new() }
    }

    /// Checks indices, one-sidedness, degrees and the Maurer–Cartan equation.
    pub fn new<C: DgStructure>(
        c: &C,
        entries: Vec<Entry>,
        twist: BTreeMap<(usize, usize), SparseVec>,
    ) -> Result<Self> {
        let x = TwistedComplex { entries, twist: twist.into_iter().filter(|(_, v)| !v.is_zero()).collect() };
        x.check(c)?;
        Ok(x)
    }

    pub(crate) fn new_unchecked(entries: Vec<Entry>, twist: BTreeMap<(usize, usize), SparseVec>) -> Self {
        TwistedComplex { entries, twist: twist.into_iter().filter(|(_, v)| !v.is_zero()).collect() }
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Nonzero twist components, keyed `(target, source)`.
    pub fn twist(&self) -> &BTreeMap<(usize, usize), SparseVec> {
        &self.twist
    }

    pub fn twist_component(&self, target: usize, source: usize) -> Option<&SparseVec> {
        self.twist.get(&(target, source))
    }

    pub fn check<C: DgStructure>(&self, c: &C) -> Result<()> {
        let n = c.object_count();
        if let Some(e) = self.entries.iter().find(|e| e.object >= n) {
            return Err(Error::UnknownObject(format!("object index {}", e.object)));
        }
        for (&(j, i), v) in &self.twist {
            if i >= self.entries.len() || j >= self.entries.len() {
                return Err(Error::Shape(format!("twist component ({j}, {i}) outside the entries")));
            }
            if i <= j {
                return Err(Error::MaurerCartan(format!("twist component ({j}, {i}) is not one-sided")));
            }
            let (src, tgt) = (self.entries[i], self.entries[j]);
            let wanted = 1 + tgt.shift as i64 - src.shift as i64;
            if v.iter().any(|(e, _)| c.basis_degree(src.object, tgt.object, *e) as i64 != wanted) {
                return Err(Error::MaurerCartan(format!("twist component ({j}, {i}) does not have degree 1")));
            }
        }
        let defect = self.maurer_cartan_defect(c)?;
        if let Some(((j, i), v)) = defect.iter().next() {
            let (src, tgt) = (self.entries[*i], self.entries[*j]);
            return Err(Error::MaurerCartan(format!(
                "dα + α² ≠ 0 at component ({j}, {i}): {}",
                c.format_vector(src.object, tgt.object, v)
            )));
        }
        Ok(())
    }

    /// Nonzero components of `d'α + α·α`.
    pub fn maurer_cartan_defect<C: DgStructure>(&self, c: &C) -> Result<BTreeMap<(usize, usize), SparseVec>> {
        let field = c.field();
        let mut out: BTreeMap<(usize, usize), Accumulator> = BTreeMap::new();
        for (&(j, i), v) in &self.twist {
            let (src, tgt) = (self.entries[i], self.entries[j]);
            let dv = c.apply_differential(src.object, tgt.object, v);
            out.entry((j, i)).or_insert_with(|| Accumulator::new(field)).add_vec(&sign(is_odd(tgt.shift)), &dv);
        }
        for (&(k, l), outer) in &self.twist {
            for (&(l2, i), inner) in self.twist.range((l, 0)..(l + 1, 0)) {
                debug_assert_eq!(l, l2);
                let objs = (self.entries[i].object, self.entries[l].object, self.entries[k].object);
                let prod = compose_or_fail(c, objs, outer, inner)?;
                out.entry((k, i)).or_insert_with(|| Accumulator::new(field)).add_vec(&int(1), &prod);
            }
        }
        Ok(out.into_iter().map(|(k, acc)| (k, acc.finish())).filter(|(_, v)| !v.is_zero()).collect())
    }

    /// `X[n]`: shifts raised by `n`, twist multiplied by `(-1)^n`.
    pub fn shift(&self, n: i32, field: Field) -> Result<Self> {
        let entries = self
            .entries
            .iter()
            .map(|e| {
                e.shift
                    .checked_add(n)
                    .map(|shift| Entry { object: e.object, shift })
                    .ok_or_else(|| Error::DegreeOverflow(format!("shift {} by {n}", e.shift)))
            })
            .collect::<Result<Vec<_>>>()?;
        let twist = self.twist.iter().map(|(k, v)| (*k, if is_odd(n) { v.negated(field) } else { v.clone() })).collect();
        Ok(TwistedComplex { entries, twist })
    }

    /// `X ⊕ Y` with the entries of `self` first.
    pub fn direct_sum(&self, other: &TwistedComplex) -> Self {
        let offset = self.entries.len();
        let mut entries = self.entries.clone();
        entries.extend_from_slice(&other.entries);
        let mut twist = self.twist.clone();
        for (&(j, i), v) in &other.twist {
            twist.insert((j + offset, i + offset), v.clone());
        }
        TwistedComplex { entries, twist }
    }

    /// Relabels entries through `F` and pushes the twist through its hom maps.
    pub fn extend_scalars<T: DgStructure>(&self, f: &DGFunctor, target: &T) -> Result<Self> {
        if let Some(e) = self.entries.iter().find(|e| e.object >= f.source_count()) {
            return Err(Error::UnknownObject(format!("object index {}", e.object)));
        }
        let entries = self.entries.iter().map(|e| Entry { object: f.object(e.object), shift: e.shift }).collect();
        let twist = self
            .twist
            .iter()
            .map(|(&(j, i), v)| ((j, i), f.map(target, self.entries[i].object, self.entries[j].object, v)))
            .collect();
        Ok(TwistedComplex::new_unchecked(entries, twist))
    }
}

/// A basis element of a hom complex: a basis element `element` of
/// `Hom_A(a_source, b_target)` placed between entries `source` and `target`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HomCell {
    pub source: usize,
    pub target: usize,
    pub element: usize,
    pub degree: i32,
}

/// `Hom(X, Y)` with `D φ = d'φ + α_Y φ - (-1)^{|φ|} φ α_X`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomComplex {
    pub complex: Complex,
    pub index: GradedIndex,
    pub cells: Vec<HomCell>,
    offsets: HashMap<(usize, usize), usize>,
    differentials: Vec<SparseVec>,
}

impl HomComplex {
    pub fn cell_index(&self, source: usize, target: usize, element: usize) -> usize {
        self.offsets[&(source, target)] + element
    }

    pub fn to_morphism(&self, v: &SparseVec) -> PerfMorphism {
        let mut acc: BTreeMap<(usize, usize), Vec<(usize, crate::field::Scalar)>> = BTreeMap::new();
        let mut degree = 0;
        for (g, c) in v.iter() {
            let cell = self.cells[*g];
            degree = cell.degree;
            acc.entry((cell.source, cell.target)).or_default().push((cell.element, c.clone()));
        }
        let field = self.complex.field();
        PerfMorphism {
            degree,
            components: acc.into_iter().map(|(k, terms)| (k, SparseVec::from_terms(field, terms))).collect(),
        }
    }

    pub fn to_vector(&self, f: &PerfMorphism) -> SparseVec {
        let field = self.complex.field();
        let mut acc = Accumulator::new(field);
        for (&(i, j), v) in &f.components {
            for (e, c) in v.iter() {
                acc.add_term(self.cell_index(i, j, *e), c);
            }
        }
        acc.finish()
    }

    /// `D v` in global coordinates.
    pub fn apply_differential(&self, v: &SparseVec) -> SparseVec {
        let mut acc = Accumulator::new(self.complex.field());
        for (g, c) in v.iter() {
            acc.add_vec(c, &self.differentials[*g]);
        }
        acc.finish()
    }

    pub fn euler_char(&self) -> i64 {
        self.complex.euler_char()
    }
}

pub fn hom_complex<C: DgStructure>(c: &C, x: &TwistedComplex, y: &TwistedComplex) -> Result<HomComplex> {
    let field = c.field();
    let mut cells = Vec::new();
    let mut offsets = HashMap::new();
    for (i, src) in x.entries.iter().enumerate() {
        for (j, tgt) in y.entries.iter().enumerate() {
            offsets.insert((i, j), cells.len());
            for e in 0..c.hom_dim(src.object, tgt.object) {
                let adeg = c.basis_degree(src.object, tgt.object, e) as i64;
                let degree = adeg - tgt.shift as i64 + src.shift as i64;
                let degree = i32::try_from(degree)
                    .map_err(|_| Error::DegreeOverflow(format!("hom degree {degree} does not fit")))?;
                cells.push(HomCell { source: i, target: j, element: e, degree });
            }
        }
    }
    let mut diffs = Vec::with_capacity(cells.len());
    for cell in &cells {
        let (i, j) = (cell.source, cell.target);
        let (a, b) = (x.entries[i].object, y.entries[j].object);
        let unit = SparseVec::unit(cell.element);
        let mut acc = Accumulator::new(field);
        let d = c.differential(a, b, cell.element);
        let s = sign(is_odd(y.entries[j].shift));
        for (e, coef) in d.iter() {
            acc.add_term(offsets[&(i, j)] + e, &field.mul(&s, coef));
        }
        for (&(k, j2), alpha) in &y.twist {
            if j2 != j {
                continue;
            }
            let prod = compose_or_fail(c, (a, b, y.entries[k].object), alpha, &unit)?;
            for (e, coef) in prod.iter() {
                acc.add_term(offsets[&(i, k)] + e, coef);
            }
        }
        let s = sign(!is_odd(cell.degree));
        for (&(i2, l), alpha) in x.twist.range((i, 0)..(i + 1, 0)) {
            debug_assert_eq!(i2, i);
            let prod = compose_or_fail(c, (x.entries[l].object, a, b), &unit, alpha)?;
            for (e, coef) in prod.iter() {
                acc.add_term(offsets[&(l, j)] + e, &field.mul(&s, coef));
            }
        }
        diffs.push(acc.finish());
    }
    let degrees: Vec<i32> = cells.iter().map(|c| c.degree).collect();
    let (complex, index) = Complex::from_basis(field, &degrees, |g| diffs[g].clone())?;
    Ok(HomComplex { complex, index, cells, offsets, differentials: diffs })
}

/// `χ(X, Y) = Σ (-1)^n dim H^n Hom(X, Y)`.
pub fn euler_pairing<C: DgStructure>(c: &C, x: &TwistedComplex, y: &TwistedComplex) -> Result<i64> {
    Ok(hom_complex(c, x, y)?.euler_char())
}

/// A morphism of twisted complexes: components `(source entry, target entry)`
/// in `Hom_A(a_source, b_target)`, homogeneous of the given degree.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PerfMorphism {
    pub degree: i32,
    pub components: BTreeMap<(usize, usize), SparseVec>,
}

impl PerfMorphism {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn identity<C: DgStructure>(c: &C, x: &TwistedComplex) -> Self {
        PerfMorphism {
            degree: 0,
            components: x.entries.iter().enumerate().map(|(i, e)| ((i, i), c.identity(e.object))).collect(),
        }
    }

    /// A single component between entries.
    pub fn single(source: usize, target: usize, value: SparseVec, degree: i32) -> Self {
        PerfMorphism { degree, components: BTreeMap::from([((source, target), value)]) }
    }

    /// `D f` in `Hom(X, Y)`.
    pub fn boundary<C: DgStructure>(&self, c: &C, x: &TwistedComplex, y: &TwistedComplex) -> Result<PerfMorphism> {
        let h = hom_complex(c, x, y)?;
        let mut out = h.to_morphism(&h.apply_differential(&h.to_vector(self)));
        out.degree = self.degree + 1;
        Ok(out)
    }

    pub fn is_closed<C: DgStructure>(&self, c: &C, x: &TwistedComplex, y: &TwistedComplex) -> Result<bool> {
        Ok(self.boundary(c, x, y)?.components.is_empty())
    }

    /// `g ∘ f`, componentwise matrix product.
    pub fn compose<C: DgStructure>(
        c: &C,
        x: &TwistedComplex,
        y: &TwistedComplex,
        z: &TwistedComplex,
        g: &PerfMorphism,
        f: &PerfMorphism,
    ) -> Result<PerfMorphism> {
        let field = c.field();
        let mut out: BTreeMap<(usize, usize), Accumulator> = BTreeMap::new();
        for (&(i, j), fv) in &f.components {
            for (&(j2, k), gv) in g.components.range((j, 0)..(j + 1, 0)) {
                debug_assert_eq!(j, j2);
                let objs = (x.entries[i].object, y.entries[j].object, z.entries[k].object);
                let prod = compose_or_fail(c, objs, gv, fv)?;
                out.entry((i, k)).or_insert_with(|| Accumulator::new(field)).add_vec(&int(1), &prod);
            }
        }
        Ok(PerfMorphism {
            degree: f.degree + g.degree,
            components: out.into_iter().map(|(k, a)| (k, a.finish())).filter(|(_, v)| !v.is_zero()).collect(),
        })
    }
}

/// `cone(f) = (Y ⊕ X[1], [[α_Y, f], [0, -α_X]])` for a closed degree-0 `f`.
pub fn cone<C: DgStructure>(c: &C, x: &TwistedComplex, y: &TwistedComplex, f: &PerfMorphism) -> Result<TwistedComplex> {
    if f.degree != 0 && !f.components.is_empty() {
        return Err(Error::MaurerCartan(format!("cone of a degree-{} map", f.degree)));
    }
    let field = c.field();
    let ny = y.entries.len();
    let shifted = x.shift(1, field)?;
    let mut z = y.direct_sum(&shifted);
    for (&(i, j), v) in &f.components {
        if i >= x.entries.len() || j >= ny {
            return Err(Error::Shape(format!("morphism component ({i}, {j}) outside the entries")));
        }
        if !v.is_zero() {
            z.twist.insert((j, ny + i), v.clone());
        }
    }
    z.check(c)?;
    Ok(z)
}

/// Levelwise test: `Hom(a, cone(f))` is acyclic for every object `a`.
pub fn is_quasi_iso<C: DgStructure>(c: &C, x: &TwistedComplex, y: &TwistedComplex, f: &PerfMorphism) -> Result<bool> {
    let z = cone(c, x, y, f)?;
    for a in 0..c.object_count() {
        if !hom_complex(c, &TwistedComplex::representable(a), &z)?.complex.is_acyclic() {
            return Ok(false);
        }
    }
    Ok(true)
}
