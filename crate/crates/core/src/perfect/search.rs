use std::collections::BTreeMap;

use super::module::{hom_to_module, Module};
use super::twisted::{Entry, TwistedComplex};
use crate::dgcat::{Complex, DGFunctor, DgStructure};
use crate::error::Result;
use crate::field::{int, Accumulator, EchelonBasis, Field, SparseVec};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PerfectnessOutcome {
    /// `witness` is quasi-isomorphic to the module through `map`, a closed
    /// degree-0 element of `Hom(witness, M)` with one component per entry.
    Perfect { witness: TwistedComplex, map: Vec<SparseVec> },
    /// No witness with at most `max_len` entries was found. This says nothing
    /// about perfectness.
    NotFound { max_len: usize },
}

impl PerfectnessOutcome {
    pub fn is_perfect(&self) -> bool {
        matches!(self, PerfectnessOutcome::Perfect { .. })
    }
}

/// Cone of `φ: Hom(-, P) → M` over one object: `M_c ⊕ P_c[1]` with
/// `d(m, p) = (dm + φ(p), -Dp)`.
struct ConeFiber {
    split: usize,
    complex: Complex,
    by_degree: BTreeMap<i32, Vec<usize>>,
    degrees: Vec<i32>,
}

impl ConeFiber {
    fn local(&self, v: &SparseVec, field: Field) -> (i32, SparseVec) {
        let deg = self.degrees[v.leading().expect("nonzero")];
        let members = &self.by_degree[&deg];
        (deg, v.reindex(field, |g| members.iter().position(|&x| x == g).expect("homogeneous")))
    }
}

struct Cone {
    fibers: Vec<ConeFiber>,
    p_module: Module,
}

fn build_cone<C: DgStructure>(c: &C, p: &TwistedComplex, phi: &[SparseVec], m: &Module) -> Result<Cone> {
    let field = c.field();
    let p_module = Module::from_twisted(c, p)?;
    let mut fibers = Vec::with_capacity(c.object_count());
    for obj in 0..c.object_count() {
        let mf = m.fiber(obj);
        let pf = p_module.fiber(obj);
        let split = mf.dim();
        let mut degrees = mf.degrees.clone();
        degrees.extend(pf.degrees.iter().map(|d| d - 1));
        let mut differentials: Vec<SparseVec> = mf.differential.clone();
        // the cells of Hom(obj, P) in the order produced by hom_complex
        let mut cells = Vec::new();
        for (j, e) in p.entries().iter().enumerate() {
            for k in 0..c.hom_dim(obj, e.object) {
                cells.push((j, k));
            }
        }
        for (g, &(j, k)) in cells.iter().enumerate() {
            let image = m.act(obj, p.entries()[j].object, &SparseVec::unit(k), &phi[j]);
            let dp = pf.differential[g].reindex(field, |t| t + split).negated(field);
            differentials.push(image.add(field, &dp));
        }
        let (complex, _) = Complex::from_basis(field, &degrees, |g| differentials[g].clone())?;
        let mut by_degree: BTreeMap<i32, Vec<usize>> = BTreeMap::new();
        for (g, &d) in degrees.iter().enumerate() {
            by_degree.entry(d).or_default().push(g);
        }
        fibers.push(ConeFiber { split, complex, by_degree, degrees });
    }
    Ok(Cone { fibers, p_module })
}

impl Cone {
    fn act(&self, m: &Module, a: usize, b: usize, f: &SparseVec, z: &SparseVec, field: Field) -> SparseVec {
        let split_b = self.fibers[b].split;
        let split_a = self.fibers[a].split;
        let mpart = SparseVec::from_terms(field, z.iter().filter(|(i, _)| *i < split_b).cloned());
        let ppart = SparseVec::from_terms(field, z.iter().filter(|(i, _)| *i >= split_b).map(|(i, c)| (i - split_b, c.clone())));
        let left = m.act(a, b, f, &mpart);
        let right = self.p_module.act(a, b, f, &ppart).reindex(field, |t| t + split_a);
        left.add(field, &right)
    }

    /// How many independent cohomology classes the submodule generated by `z`
    /// (under closed basis elements) contributes, summed over objects.
    fn score<C: DgStructure>(&self, c: &C, m: &Module, obj: usize, z: &SparseVec) -> usize {
        let field = c.field();
        let mut total = 0;
        for a in 0..c.object_count() {
            let mut spans: BTreeMap<i32, EchelonBasis> = BTreeMap::new();
            for f in 0..c.hom_dim(a, obj) {
                if !c.differential(a, obj, f).is_zero() {
                    continue;
                }
                let image = self.act(m, a, obj, &SparseVec::unit(f), z, field);
                if image.is_zero() {
                    continue;
                }
                let fiber = &self.fibers[a];
                let (deg, local) = fiber.local(&image, field);
                let span = spans.entry(deg).or_insert_with(|| {
                    let mut e = EchelonBasis::new(field);
                    if let Some(d) = fiber.complex.differential(deg - 1) {
                        for b in d.image() {
                            e.insert(&b);
                        }
                    }
                    e
                });
                if span.insert(&local) {
                    total += 1;
                }
            }
        }
        total
    }
}

/// Greedy search for a twisted complex resolving `M`.
///
/// Each step looks at the highest degree `k` where the cone of `P → M` has
/// cohomology, picks the class generating the most cohomology (ties go to the
/// first object, then the first class), and attaches a cell `h_c[-k]` killing
/// it. Stops with a witness when the cone is acyclic over every object.
pub fn bounded_perfectness_search<C: DgStructure>(c: &C, m: &Module, max_len: usize) -> Result<PerfectnessOutcome> {
    let field = c.field();
    let mut p = TwistedComplex::zero();
    let mut phi: Vec<SparseVec> = Vec::new();
    loop {
        let cone = build_cone(c, &p, &phi, m)?;
        let top = cone
            .fibers
            .iter()
            .flat_map(|f| f.complex.degrees().filter(|&n| f.complex.cohomology_dim(n) > 0))
            .max();
        let Some(k) = top else {
            return Ok(PerfectnessOutcome::Perfect { witness: p, map: phi });
        };
        if p.len() >= max_len {
            return Ok(PerfectnessOutcome::NotFound { max_len });
        }
        let mut best: Option<(usize, usize, SparseVec)> = None;
        for (obj, fiber) in cone.fibers.iter().enumerate() {
            let members = fiber.by_degree.get(&k).cloned().unwrap_or_default();
            for rep in fiber.complex.cohomology(k).representatives {
                let z = rep.reindex(field, |i| members[i]);
                let score = cone.score(c, m, obj, &z);
                if best.as_ref().map_or(true, |(s, _, _)| score > *s) {
                    best = Some((score, obj, z));
                }
            }
        }
        let (_, obj, z) = best.expect("some fiber has cohomology in degree k");
        let split = cone.fibers[obj].split;
        let mpart = SparseVec::from_terms(field, z.iter().filter(|(i, _)| *i < split).cloned());
        // p-part lives in Hom(obj, P); regroup it by entry of P
        let mut column: BTreeMap<usize, Accumulator> = BTreeMap::new();
        let mut g = split;
        for (j, e) in p.entries().iter().enumerate() {
            for kk in 0..c.hom_dim(obj, e.object) {
                let coef = z.get(g);
                if coef != int(0) {
                    column.entry(j).or_insert_with(|| Accumulator::new(field)).add_term(kk, &field.neg(&coef));
                }
                g += 1;
            }
        }
        let mut entries = p.entries().to_vec();
        let new = entries.len();
        entries.push(Entry { object: obj, shift: -k });
        let mut twist = p.twist().clone();
        for (j, acc) in column {
            let v = acc.finish();
            if !v.is_zero() {
                twist.insert((j, new), v);
            }
        }
        p = TwistedComplex::new(c, entries, twist)?;
        phi.push(mpart);
    }
}

/// Checks a witness independently: the map is closed of degree 0 and its cone
/// is acyclic over every object.
pub fn verify_witness<C: DgStructure>(c: &C, m: &Module, witness: &TwistedComplex, map: &[SparseVec]) -> Result<bool> {
    let h = hom_to_module(c, witness, m)?;
    let mut acc = Accumulator::new(c.field());
    for (i, v) in map.iter().enumerate() {
        for (k, coef) in v.iter() {
            acc.add_term(h.cell_index(i, *k), coef);
        }
    }
    let v = acc.finish();
    if !h.apply_differential(&v).is_zero() {
        return Ok(false);
    }
    if v.iter().any(|(g, _)| h.degrees[*g] != 0) {
        return Ok(false);
    }
    let cone = build_cone(c, witness, map, m)?;
    Ok(cone.fibers.iter().all(|f| f.complex.is_acyclic()))
}

/// Restrictions `F^* h_b` of the representables of the target along `F`, one
/// per target object: the fibers of the diagonal bimodule seen from the source.
pub fn diagonal_restrictions<S: DgStructure, T: DgStructure>(f: &DGFunctor, source: &S, target: &T) -> Result<Vec<Module>> {
    (0..target.object_count())
        .map(|b| Module::representable(target, b)?.restrict(f, source, target))
        .collect()
}
