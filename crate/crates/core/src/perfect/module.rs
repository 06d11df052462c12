use std::collections::BTreeMap;

use super::twisted::{compose_or_fail, hom_complex, TwistedComplex};
use crate::dgcat::{Complex, DGFunctor, DgStructure, GradedIndex};
use crate::error::{Error, Result};
use crate::field::{int, Accumulator, Field, SparseVec};

/// A graded vector space with a differential, given on a basis.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Fiber {
    pub degrees: Vec<i32>,
    pub differential: Vec<SparseVec>,
}

impl Fiber {
    pub fn dim(&self) -> usize {
        self.degrees.len()
    }

    pub fn apply(&self, field: Field, v: &SparseVec) -> SparseVec {
        let mut acc = Accumulator::new(field);
        for (i, c) in v.iter() {
            acc.add_vec(c, &self.differential[*i]);
        }
        acc.finish()
    }

    pub fn complex(&self, field: Field) -> Result<(Complex, GradedIndex)> {
        Complex::from_basis(field, &self.degrees, |i| self.differential[i].clone())
    }
}

/// A right DG module: a fiber `M_a` for each object and, for each basis element
/// `f ∈ Hom(a, b)`, the action `M_b → M_a, m ↦ m·f`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Module {
    field: Field,
    fibers: Vec<Fiber>,
    /// `(a, b, k)` ↦ images of the basis of `M_b` under `- · f_k`.
    actions: BTreeMap<(usize, usize, usize), Vec<SparseVec>>,
}

impl Module {
    /// Assembles a module; unset actions are zero. No axioms are checked.
    pub fn new(field: Field, fibers: Vec<Fiber>, actions: BTreeMap<(usize, usize, usize), Vec<SparseVec>>) -> Self {
        Module { field, fibers, actions }
    }

    pub fn zero<C: DgStructure>(c: &C) -> Self {
        Module { field: c.field(), fibers: vec![Fiber::default(); c.object_count()], actions: BTreeMap::new() }
    }

    /// `h_x = Hom(-, x)` with action by composition.
    pub fn representable<C: DgStructure>(c: &C, x: usize) -> Result<Self> {
        let n = c.object_count();
        let mut fibers = Vec::with_capacity(n);
        for a in 0..n {
            fibers.push(Fiber {
                degrees: c.hom_degrees(a, x),
                differential: (0..c.hom_dim(a, x)).map(|i| c.differential(a, x, i)).collect(),
            });
        }
        let mut actions = BTreeMap::new();
        for a in 0..n {
            for b in 0..n {
                for k in 0..c.hom_dim(a, b) {
                    let f = SparseVec::unit(k);
                    let images = (0..c.hom_dim(b, x))
                        .map(|m| compose_or_fail(c, (a, b, x), &SparseVec::unit(m), &f))
                        .collect::<Result<Vec<_>>>()?;
                    actions.insert((a, b, k), images);
                }
            }
        }
        Ok(Module { field: c.field(), fibers, actions })
    }

    /// The module `Hom(-, X)` of a twisted complex; fibers are hom complexes from
    /// representables, and the action is precomposition.
    pub fn from_twisted<C: DgStructure>(c: &C, x: &TwistedComplex) -> Result<Self> {
        let n = c.object_count();
        let mut homs = Vec::with_capacity(n);
        for a in 0..n {
            homs.push(hom_complex(c, &TwistedComplex::representable(a), x)?);
        }
        let fibers = homs
            .iter()
            .map(|h| Fiber {
                degrees: h.cells.iter().map(|cell| cell.degree).collect(),
                differential: (0..h.cells.len()).map(|g| h.apply_differential(&SparseVec::unit(g))).collect(),
            })
            .collect();
        let mut actions = BTreeMap::new();
        for a in 0..n {
            for b in 0..n {
                for k in 0..c.hom_dim(a, b) {
                    let f = SparseVec::unit(k);
                    let mut images = Vec::with_capacity(homs[b].cells.len());
                    for cell in &homs[b].cells {
                        let target = x.entries()[cell.target].object;
                        let prod = compose_or_fail(c, (a, b, target), &SparseVec::unit(cell.element), &f)?;
                        images.push(prod.reindex(c.field(), |e| homs[a].cell_index(0, cell.target, e)));
                    }
                    actions.insert((a, b, k), images);
                }
            }
        }
        Ok(Module { field: c.field(), fibers, actions })
    }

    /// `F^* M`: fiber over `a` is `M_{F a}`, acting through `F`.
    pub fn restrict<S: DgStructure, T: DgStructure>(&self, f: &DGFunctor, source: &S, target: &T) -> Result<Self> {
        if self.fibers.len() != target.object_count() {
            return Err(Error::Shape("module and target category disagree on objects".into()));
        }
        let n = source.object_count();
        let fibers = (0..n).map(|a| self.fibers[f.object(a)].clone()).collect();
        let mut actions = BTreeMap::new();
        for a in 0..n {
            for b in 0..n {
                for k in 0..source.hom_dim(a, b) {
                    let image = f.basis_image(a, b, k);
                    let (fa, fb) = (f.object(a), f.object(b));
                    let cols = (0..self.fibers[fb].dim())
                        .map(|m| self.act(fa, fb, image, &SparseVec::unit(m)))
                        .collect();
                    actions.insert((a, b, k), cols);
                }
            }
        }
        Ok(Module { field: self.field, fibers, actions })
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn object_count(&self) -> usize {
        self.fibers.len()
    }

    pub fn fiber(&self, a: usize) -> &Fiber {
        &self.fibers[a]
    }

    pub fn total_dim(&self) -> usize {
        self.fibers.iter().map(Fiber::dim).sum()
    }

    /// `m · f` for `m ∈ M_b` and a combination `f` of the basis of `Hom(a, b)`.
    pub fn act(&self, a: usize, b: usize, f: &SparseVec, m: &SparseVec) -> SparseVec {
        let mut acc = Accumulator::new(self.field);
        for (k, fc) in f.iter() {
            let Some(cols) = self.actions.get(&(a, b, *k)) else { continue };
            for (i, mc) in m.iter() {
                acc.add_vec(&self.field.mul(fc, mc), &cols[*i]);
            }
        }
        acc.finish()
    }

    fn vector_degree(&self, a: usize, v: &SparseVec) -> Option<i32> {
        let mut degs = v.iter().map(|(i, _)| self.fibers[a].degrees[*i]);
        let first = degs.next()?;
        degs.all(|d| d == first).then_some(first)
    }

    /// Lists failures of `d² = 0`, degree, Leibniz, associativity and unit laws.
    pub fn validate<C: DgStructure>(&self, c: &C) -> Vec<String> {
        let field = self.field;
        let n = c.object_count();
        let mut problems = Vec::new();
        if self.fibers.len() != n {
            problems.push("module and category disagree on objects".to_string());
            return problems;
        }
        for (a, fiber) in self.fibers.iter().enumerate() {
            for i in 0..fiber.dim() {
                let d = &fiber.differential[i];
                if d.iter().any(|(t, _)| fiber.degrees[*t] != fiber.degrees[i] + 1) {
                    problems.push(format!("d has the wrong degree on element {i} of the fiber over {}", c.object_label(a)));
                }
                if !fiber.apply(field, d).is_zero() {
                    problems.push(format!("d² ≠ 0 on element {i} of the fiber over {}", c.object_label(a)));
                }
            }
        }
        for a in 0..n {
            let id = c.identity(a);
            for m in 0..self.fibers[a].dim() {
                let unit = SparseVec::unit(m);
                if self.act(a, a, &id, &unit) != unit {
                    problems.push(format!("m·id ≠ m for element {m} over {}", c.object_label(a)));
                }
            }
            for b in 0..n {
                for k in 0..c.hom_dim(a, b) {
                    let f = SparseVec::unit(k);
                    let fdeg = c.basis_degree(a, b, k);
                    let df = c.differential(a, b, k);
                    for m in 0..self.fibers[b].dim() {
                        let um = SparseVec::unit(m);
                        let mdeg = self.fibers[b].degrees[m];
                        let mf = self.act(a, b, &f, &um);
                        if !mf.is_zero() && self.vector_degree(a, &mf) != Some(mdeg + fdeg) {
                            problems.push(format!("action of {} has the wrong degree", c.basis_name(a, b, k)));
                        }
                        let lhs = self.fibers[a].apply(field, &mf);
                        let mut rhs = Accumulator::new(field);
                        rhs.add_vec(&int(1), &self.act(a, b, &f, &self.fibers[b].apply(field, &um)));
                        rhs.add_vec(&field.sign(mdeg.rem_euclid(2) == 1, &int(1)), &self.act(a, b, &df, &um));
                        if lhs != rhs.finish() {
                            problems.push(format!("Leibniz fails for element {m} · {}", c.basis_name(a, b, k)));
                        }
                    }
                    for z in 0..n {
                        for g in 0..c.hom_dim(b, z) {
                            let Some(gf) = c.compose(a, b, z, g, k) else { continue };
                            for m in 0..self.fibers[z].dim() {
                                let um = SparseVec::unit(m);
                                let left = self.act(a, b, &f, &self.act(b, z, &SparseVec::unit(g), &um));
                                let right = self.act(a, z, &gf, &um);
                                if left != right {
                                    problems.push(format!(
                                        "(m·{})·{} ≠ m·({} ∘ {})",
                                        c.basis_name(b, z, g),
                                        c.basis_name(a, b, k),
                                        c.basis_name(b, z, g),
                                        c.basis_name(a, b, k)
                                    ));
                                }
                            }
                        }
                    }
                }
            }
        }
        problems
    }
}

/// `Hom(X, M)` for a twisted complex `X` and a module `M`: cells are pairs
/// (entry `i`, basis element of `M_{a_i}`), of degree `|m| + s_i`, with
/// `D φ = d_M φ - (-1)^{|φ|} φ·α`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleHom {
    pub complex: Complex,
    pub index: GradedIndex,
    pub cells: Vec<(usize, usize)>,
    pub degrees: Vec<i32>,
    offsets: Vec<usize>,
    differentials: Vec<SparseVec>,
}

impl ModuleHom {
    pub fn cell_index(&self, entry: usize, m: usize) -> usize {
        self.offsets[entry] + m
    }

    pub fn apply_differential(&self, v: &SparseVec) -> SparseVec {
        let mut acc = Accumulator::new(self.complex.field());
        for (g, c) in v.iter() {
            acc.add_vec(c, &self.differentials[*g]);
        }
        acc.finish()
    }

    /// Component of `v` at entry `i`, as an element of `M_{a_i}`.
    pub fn component(&self, v: &SparseVec, entry: usize) -> SparseVec {
        let lo = self.offsets[entry];
        let hi = self.offsets.get(entry + 1).copied().unwrap_or(self.cells.len());
        SparseVec::from_terms(
            self.complex.field(),
            v.iter().filter(|(g, _)| (lo..hi).contains(g)).map(|(g, c)| (g - lo, c.clone())),
        )
    }

    pub fn euler_char(&self) -> i64 {
        self.complex.euler_char()
    }
}

pub fn hom_to_module<C: DgStructure>(c: &C, x: &TwistedComplex, m: &Module) -> Result<ModuleHom> {
    if m.object_count() != c.object_count() {
        return Err(Error::Shape("module and category disagree on objects".into()));
    }
    let field = c.field();
    let mut cells = Vec::new();
    let mut degrees = Vec::new();
    let mut offsets = Vec::with_capacity(x.len());
    for (i, e) in x.entries().iter().enumerate() {
        offsets.push(cells.len());
        let fiber = m.fiber(e.object);
        for (k, &d) in fiber.degrees.iter().enumerate() {
            cells.push((i, k));
            let deg = d as i64 + e.shift as i64;
            degrees.push(i32::try_from(deg).map_err(|_| Error::DegreeOverflow(format!("degree {deg} does not fit")))?);
        }
    }
    let mut differentials = Vec::with_capacity(cells.len());
    for (g, &(i, k)) in cells.iter().enumerate() {
        let a = x.entries()[i].object;
        let unit = SparseVec::unit(k);
        let mut acc = Accumulator::new(field);
        for (t, coef) in m.fiber(a).differential[k].iter() {
            acc.add_term(offsets[i] + t, coef);
        }
        let s = field.sign(degrees[g].rem_euclid(2) == 0, &int(1));
        for (&(i2, l), alpha) in x.twist().range((i, 0)..(i + 1, 0)) {
            debug_assert_eq!(i, i2);
            let image = m.act(x.entries()[l].object, a, alpha, &unit);
            for (t, coef) in image.iter() {
                acc.add_term(offsets[l] + t, &field.mul(&s, coef));
            }
        }
        differentials.push(acc.finish());
    }
    let (complex, index) = Complex::from_basis(field, &degrees, |g| differentials[g].clone())?;
    Ok(ModuleHom { complex, index, cells, degrees, offsets, differentials })
}
