use std::collections::{BTreeMap, HashMap};

use super::complex::{Complex, GradedIndex};
use super::functor::DGFunctor;
use crate::error::{Error, Result};
use crate::field::{Accumulator, Field, Scalar, SparseVec};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BasisElement {
    pub name: String,
    pub degree: i32,
}

/// Read access to a DG category given by a graded basis of every hom space and
/// structure constants. Morphisms `g ∈ Hom(b, c)`, `f ∈ Hom(a, b)` compose to
/// `g ∘ f ∈ Hom(a, c)`.
pub trait DgStructure {
    fn field(&self) -> Field;
    fn object_count(&self) -> usize;
    fn object_label(&self, a: usize) -> &str;
    fn hom_dim(&self, a: usize, b: usize) -> usize;
    fn basis_degree(&self, a: usize, b: usize, i: usize) -> i32;
    fn basis_name(&self, a: usize, b: usize, i: usize) -> String;
    /// `d` of the `i`-th basis element of `Hom(a, b)`.
    fn differential(&self, a: usize, b: usize, i: usize) -> SparseVec;
    /// `None` when the product is not available (for truncated structures).
    fn compose(&self, a: usize, b: usize, c: usize, g: usize, f: usize) -> Option<SparseVec>;
    fn identity(&self, a: usize) -> SparseVec;

    fn object_index(&self, label: &str) -> Option<usize> {
        (0..self.object_count()).find(|&a| self.object_label(a) == label)
    }

    fn require_object(&self, label: &str) -> Result<usize> {
        self.object_index(label).ok_or_else(|| Error::UnknownObject(label.to_string()))
    }

    fn hom_degrees(&self, a: usize, b: usize) -> Vec<i32> {
        (0..self.hom_dim(a, b)).map(|i| self.basis_degree(a, b, i)).collect()
    }

    fn hom_complex(&self, a: usize, b: usize) -> Result<(Complex, GradedIndex)> {
        Complex::from_basis(self.field(), &self.hom_degrees(a, b), |i| self.differential(a, b, i))
    }

    fn apply_differential(&self, a: usize, b: usize, v: &SparseVec) -> SparseVec {
        let mut acc = Accumulator::new(self.field());
        for (i, c) in v.iter() {
            acc.add_vec(c, &self.differential(a, b, *i));
        }
        acc.finish()
    }

    fn compose_vecs(&self, a: usize, b: usize, c: usize, g: &SparseVec, f: &SparseVec) -> Option<SparseVec> {
        let field = self.field();
        let mut acc = Accumulator::new(field);
        for (gi, gc) in g.iter() {
            for (fi, fc) in f.iter() {
                let prod = self.compose(a, b, c, *gi, *fi)?;
                acc.add_vec(&field.mul(gc, fc), &prod);
            }
        }
        Some(acc.finish())
    }

    /// Degree of a homogeneous vector; `None` for zero or mixed vectors.
    fn vector_degree(&self, a: usize, b: usize, v: &SparseVec) -> Option<i32> {
        let mut degs = v.iter().map(|(i, _)| self.basis_degree(a, b, *i));
        let first = degs.next()?;
        degs.all(|d| d == first).then_some(first)
    }

    fn format_vector(&self, a: usize, b: usize, v: &SparseVec) -> String {
        format_combination(v, |i| self.basis_name(a, b, i))
    }
}

pub fn format_combination(v: &SparseVec, name: impl Fn(usize) -> String) -> String {
    if v.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (k, (i, c)) in v.iter().enumerate() {
        let negative = crate::field::scalar_is_negative(c);
        let magnitude = if negative { -c.clone() } else { c.clone() };
        if k == 0 {
            if negative {
                out.push('-');
            }
        } else {
            out.push_str(if negative { " - " } else { " + " });
        }
        if magnitude != crate::field::int(1) {
            out.push_str(&crate::field::fmt_scalar(&magnitude));
            out.push('*');
        }
        out.push_str(&name(*i));
    }
    out
}

/// A finite DG category with an explicit basis of every hom complex.
///
/// Hom degrees live in the declared window `[lo, hi]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DGCategory {
    field: Field,
    objects: Vec<String>,
    window: (i32, i32),
    homs: Vec<Vec<BasisElement>>,
    diffs: Vec<Vec<SparseVec>>,
    comps: Vec<Vec<SparseVec>>,
    identities: Vec<SparseVec>,
}

impl DgStructure for DGCategory {
    fn field(&self) -> Field {
        self.field
    }

    fn object_count(&self) -> usize {
        self.objects.len()
    }

    fn object_label(&self, a: usize) -> &str {
        &self.objects[a]
    }

    fn hom_dim(&self, a: usize, b: usize) -> usize {
        self.homs[self.pair(a, b)].len()
    }

    fn basis_degree(&self, a: usize, b: usize, i: usize) -> i32 {
        self.homs[self.pair(a, b)][i].degree
    }

    fn basis_name(&self, a: usize, b: usize, i: usize) -> String {
        self.homs[self.pair(a, b)][i].name.clone()
    }

    fn differential(&self, a: usize, b: usize, i: usize) -> SparseVec {
        self.diffs[self.pair(a, b)][i].clone()
    }

    fn compose(&self, a: usize, b: usize, c: usize, g: usize, f: usize) -> Option<SparseVec> {
        let table = &self.comps[self.triple(a, b, c)];
        Some(table[g * self.hom_dim(a, b) + f].clone())
    }

    fn identity(&self, a: usize) -> SparseVec {
        self.identities[a].clone()
    }
}

impl DGCategory {
    fn pair(&self, a: usize, b: usize) -> usize {
        a * self.objects.len() + b
    }

    fn triple(&self, a: usize, b: usize, c: usize) -> usize {
        let n = self.objects.len();
        (a * n + b) * n + c
    }

    /// Assembles a category from complete tables, checking only shapes.
    ///
    /// `homs`, `diffs` are indexed by `a * n + b`; `comps` by `(a * n + b) * n + c`
    /// with entry `g * dim Hom(a, b) + f`.
    pub(crate) fn from_parts(
        field: Field,
        objects: Vec<String>,
        window: (i32, i32),
        homs: Vec<Vec<BasisElement>>,
        diffs: Vec<Vec<SparseVec>>,
        comps: Vec<Vec<SparseVec>>,
        identities: Vec<SparseVec>,
    ) -> Result<Self> {
        let n = objects.len();
        if homs.len() != n * n || diffs.len() != n * n || comps.len() != n * n * n || identities.len() != n {
            return Err(Error::Shape("category tables do not match the object count".into()));
        }
        for (h, basis) in homs.iter().enumerate() {
            if let Some(e) = basis.iter().find(|e| e.degree < window.0 || e.degree > window.1) {
                return Err(Error::DegreeOverflow(format!(
                    "{} has degree {} outside the window [{}, {}]",
                    e.name, e.degree, window.0, window.1
                )));
            }
            if diffs[h].len() != basis.len() {
                return Err(Error::Shape("differential table does not match the hom basis".into()));
            }
        }
        let cat = DGCategory { field, objects, window, homs, diffs, comps, identities };
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if cat.comps[cat.triple(a, b, c)].len() != cat.hom_dim(b, c) * cat.hom_dim(a, b) {
                        return Err(Error::Shape("composition table does not match the hom bases".into()));
                    }
                }
            }
        }
        Ok(cat)
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn window(&self) -> (i32, i32) {
        self.window
    }

    pub fn hom_basis(&self, a: usize, b: usize) -> &[BasisElement] {
        &self.homs[self.pair(a, b)]
    }

    /// Object pair and position of a basis element, looked up by name.
    pub fn find_element(&self, name: &str) -> Option<(usize, usize, usize)> {
        let n = self.objects.len();
        for a in 0..n {
            for b in 0..n {
                if let Some(i) = self.hom_basis(a, b).iter().position(|e| e.name == name) {
                    return Some((a, b, i));
                }
            }
        }
        None
    }

    /// The one-object category whose endomorphisms are the field in degree 0.
    pub fn unit(field: Field, label: &str) -> Self {
        let one = SparseVec::single(0, crate::field::int(1));
        DGCategory {
            field,
            objects: vec![label.to_string()],
            window: (0, 0),
            homs: vec![vec![BasisElement { name: format!("id_{label}"), degree: 0 }]],
            diffs: vec![vec![SparseVec::zero()]],
            comps: vec![vec![one.clone()]],
            identities: vec![one],
        }
    }

    pub fn empty(field: Field) -> Self {
        DGCategory {
            field,
            objects: Vec::new(),
            window: (0, 0),
            homs: Vec::new(),
            diffs: Vec::new(),
            comps: Vec::new(),
            identities: Vec::new(),
        }
    }

    /// `Hom^op(a, b) = Hom(b, a)` and `g ∘^op f = (-1)^{|f||g|} f ∘ g`.
    pub fn opposite(&self) -> DGCategory {
        let n = self.objects.len();
        let mut homs = Vec::with_capacity(n * n);
        let mut diffs = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                homs.push(self.homs[self.pair(b, a)].clone());
                diffs.push(self.diffs[self.pair(b, a)].clone());
            }
        }
        let mut comps = Vec::with_capacity(n * n * n);
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    // g ∈ Hom(c, b), f ∈ Hom(b, a) in the original category
                    let (dg, df) = (self.hom_dim(c, b), self.hom_dim(b, a));
                    let mut table = Vec::with_capacity(dg * df);
                    for g in 0..dg {
                        for f in 0..df {
                            let prod = self.compose(c, b, a, f, g).expect("complete table");
                            let odd = (self.basis_degree(c, b, g) * self.basis_degree(b, a, f)).rem_euclid(2) == 1;
                            table.push(if odd { prod.negated(self.field) } else { prod });
                        }
                    }
                    comps.push(table);
                }
            }
        }
        DGCategory {
            field: self.field,
            objects: self.objects.clone(),
            window: self.window,
            homs,
            diffs,
            comps,
            identities: self.identities.clone(),
        }
    }

    /// Full subcategory on the given labels (kept in their original order) and its
    /// inclusion.
    pub fn full_subcategory(&self, labels: &[&str]) -> Result<(DGCategory, DGFunctor)> {
        let mut keep = Vec::new();
        for label in labels {
            let a = self.require_object(label)?;
            if !keep.contains(&a) {
                keep.push(a);
            }
        }
        keep.sort_unstable();
        Ok((self.restricted_to(&keep), DGFunctor::inclusion(self, &keep)))
    }

    fn restricted_to(&self, keep: &[usize]) -> DGCategory {
        let mut homs = Vec::new();
        let mut diffs = Vec::new();
        for &a in keep {
            for &b in keep {
                homs.push(self.homs[self.pair(a, b)].clone());
                diffs.push(self.diffs[self.pair(a, b)].clone());
            }
        }
        let mut comps = Vec::new();
        for &a in keep {
            for &b in keep {
                for &c in keep {
                    comps.push(self.comps[self.triple(a, b, c)].clone());
                }
            }
        }
        DGCategory {
            field: self.field,
            objects: keep.iter().map(|&a| self.objects[a].clone()).collect(),
            window: self.window,
            homs,
            diffs,
            comps,
            identities: keep.iter().map(|&a| self.identities[a].clone()).collect(),
        }
    }

    /// Reorders objects: object `k` of the result is object `order[k]` of `self`.
    pub fn reorder_objects(&self, order: &[usize]) -> Result<DGCategory> {
        let mut sorted = order.to_vec();
        sorted.sort_unstable();
        if sorted != (0..self.objects.len()).collect::<Vec<_>>() {
            return Err(Error::Input("object order is not a permutation".into()));
        }
        Ok(self.restricted_to(order))
    }

    /// Total number of basis elements over all hom spaces.
    pub fn total_dimension(&self) -> usize {
        self.homs.iter().map(Vec::len).sum()
    }

    /// Same structure with objects and basis elements renamed.
    pub fn renamed(&self, object: impl Fn(&str) -> String, element: impl Fn(&str) -> String) -> DGCategory {
        let mut out = self.clone();
        out.objects = self.objects.iter().map(|o| object(o)).collect();
        for hom in out.homs.iter_mut() {
            for e in hom.iter_mut() {
                e.name = element(&e.name);
            }
        }
        out
    }
}

/// Incremental construction of a [`DGCategory`] from named basis elements.
#[derive(Clone, Debug)]
pub struct DGCategoryBuilder {
    field: Field,
    objects: Vec<String>,
    window: Option<(i32, i32)>,
    homs: BTreeMap<(usize, usize), Vec<BasisElement>>,
    names: HashMap<String, (usize, usize, usize)>,
    diffs: Vec<(String, Vec<(Scalar, String)>)>,
    comps: Vec<(String, String, Vec<(Scalar, String)>)>,
    identities: HashMap<usize, Vec<(Scalar, String)>>,
}

impl DGCategoryBuilder {
    pub fn new(field: Field) -> Self {
        DGCategoryBuilder {
            field,
            objects: Vec::new(),
            window: None,
            homs: BTreeMap::new(),
            names: HashMap::new(),
            diffs: Vec::new(),
            comps: Vec::new(),
            identities: HashMap::new(),
        }
    }

    pub fn object(&mut self, label: &str) -> Result<usize> {
        if self.objects.iter().any(|o| o == label) {
            return Err(Error::Input(format!("duplicate object {label}")));
        }
        self.objects.push(label.to_string());
        Ok(self.objects.len() - 1)
    }

    pub fn window(&mut self, lo: i32, hi: i32) -> Result<&mut Self> {
        if lo > hi {
            return Err(Error::Input(format!("empty degree window [{lo}, {hi}]")));
        }
        self.window = Some((lo, hi));
        Ok(self)
    }

    fn index(&self, label: &str) -> Result<usize> {
        self.objects.iter().position(|o| o == label).ok_or_else(|| Error::UnknownObject(label.to_string()))
    }

    pub fn basis(&mut self, source: &str, target: &str, name: &str, degree: i32) -> Result<&mut Self> {
        let (a, b) = (self.index(source)?, self.index(target)?);
        if self.names.contains_key(name) {
            return Err(Error::Input(format!("duplicate basis element {name}")));
        }
        let list = self.homs.entry((a, b)).or_default();
        self.names.insert(name.to_string(), (a, b, list.len()));
        list.push(BasisElement { name: name.to_string(), degree });
        Ok(self)
    }

    pub fn differential(&mut self, element: &str, value: &[(Scalar, &str)]) -> &mut Self {
        self.diffs.push((element.to_string(), owned(value)));
        self
    }

    /// Sets `left ∘ right`.
    pub fn composition(&mut self, left: &str, right: &str, value: &[(Scalar, &str)]) -> &mut Self {
        self.comps.push((left.to_string(), right.to_string(), owned(value)));
        self
    }

    pub fn identity(&mut self, object: &str, value: &[(Scalar, &str)]) -> Result<&mut Self> {
        let a = self.index(object)?;
        self.identities.insert(a, owned(value));
        Ok(self)
    }

    fn lookup(&self, name: &str) -> Result<(usize, usize, usize)> {
        self.names.get(name).copied().ok_or_else(|| Error::Input(format!("unknown basis element {name}")))
    }

    fn combination(&self, pair: (usize, usize), terms: &[(Scalar, String)], context: &str) -> Result<SparseVec> {
        let mut acc = Accumulator::new(self.field);
        for (c, name) in terms {
            let (a, b, i) = self.lookup(name)?;
            if (a, b) != pair {
                return Err(Error::Shape(format!(
                    "{context}: {name} lies in Hom({}, {}), expected Hom({}, {})",
                    self.objects[a], self.objects[b], self.objects[pair.0], self.objects[pair.1]
                )));
            }
            acc.add_term(i, &self.field.element(c)?);
        }
        Ok(acc.finish())
    }

    /// Unset differentials and products are zero. Every object needs an identity.
    pub fn build(&self) -> Result<DGCategory> {
        let n = self.objects.len();
        let degrees: Vec<i32> = self.homs.values().flatten().map(|e| e.degree).collect();
        let window = match self.window {
            Some(w) => w,
            None => match (degrees.iter().min(), degrees.iter().max()) {
                (Some(&lo), Some(&hi)) => (lo, hi),
                _ => (0, 0),
            },
        };
        let basis_of = |a: usize, b: usize| self.homs.get(&(a, b)).cloned().unwrap_or_default();
        let mut homs = Vec::with_capacity(n * n);
        let mut diffs = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                let basis = basis_of(a, b);
                diffs.push(vec![SparseVec::zero(); basis.len()]);
                homs.push(basis);
            }
        }
        for (element, value) in &self.diffs {
            let (a, b, i) = self.lookup(element)?;
            diffs[a * n + b][i] = self.combination((a, b), value, &format!("d({element})"))?;
        }
        let mut comps: Vec<Vec<SparseVec>> = Vec::with_capacity(n * n * n);
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    comps.push(vec![SparseVec::zero(); homs[b * n + c].len() * homs[a * n + b].len()]);
                }
            }
        }
        for (left, right, value) in &self.comps {
            let (b, c, g) = self.lookup(left)?;
            let (a, b2, f) = self.lookup(right)?;
            if b != b2 {
                return Err(Error::Shape(format!("{left} ∘ {right} is not composable")));
            }
            let width = homs[a * n + b].len();
            comps[(a * n + b) * n + c][g * width + f] =
                self.combination((a, c), value, &format!("{left} ∘ {right}"))?;
        }
        let mut identities = Vec::with_capacity(n);
        for a in 0..n {
            let value = self
                .identities
                .get(&a)
                .ok_or_else(|| Error::Input(format!("no identity given for object {}", self.objects[a])))?;
            identities.push(self.combination((a, a), value, &format!("identity of {}", self.objects[a]))?);
        }
        DGCategory::from_parts(self.field, self.objects.clone(), window, homs, diffs, comps, identities)
    }
}

fn owned(value: &[(Scalar, &str)]) -> Vec<(Scalar, String)> {
    value.iter().map(|(c, s)| (c.clone(), s.to_string())).collect()
}
