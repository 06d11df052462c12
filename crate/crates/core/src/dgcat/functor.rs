use super::category::DgStructure;
use crate::error::{Error, Result};
use crate::field::SparseVec;

/// A DG functor between finite DG categories: an object map and, for every pair
/// of source objects, the images of the hom basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DGFunctor {
    source_count: usize,
    target_count: usize,
    object_map: Vec<usize>,
    hom_maps: Vec<Vec<SparseVec>>,
}

impl DGFunctor {
    /// `hom_maps[a * n + b][i]` is the image of basis element `i` of `Hom(a, b)`.
    pub fn new(target_count: usize, object_map: Vec<usize>, hom_maps: Vec<Vec<SparseVec>>) -> Result<Self> {
        let n = object_map.len();
        if hom_maps.len() != n * n {
            return Err(Error::Shape("functor needs one hom map per ordered pair".into()));
        }
        if object_map.iter().any(|&t| t >= target_count) {
            return Err(Error::Shape("object map points outside the target".into()));
        }
        Ok(DGFunctor { source_count: n, target_count, object_map, hom_maps })
    }

    pub fn identity<C: DgStructure>(c: &C) -> Self {
        let n = c.object_count();
        Self::inclusion(c, &(0..n).collect::<Vec<_>>())
    }

    /// Inclusion of the full subcategory on `keep` (in this order).
    pub fn inclusion<C: DgStructure>(c: &C, keep: &[usize]) -> Self {
        let mut hom_maps = Vec::with_capacity(keep.len() * keep.len());
        for &a in keep {
            for &b in keep {
                hom_maps.push((0..c.hom_dim(a, b)).map(SparseVec::unit).collect());
            }
        }
        DGFunctor { source_count: keep.len(), target_count: c.object_count(), object_map: keep.to_vec(), hom_maps }
    }

    pub fn source_count(&self) -> usize {
        self.source_count
    }

    pub fn target_count(&self) -> usize {
        self.target_count
    }

    pub fn object(&self, a: usize) -> usize {
        self.object_map[a]
    }

    pub fn object_map(&self) -> &[usize] {
        &self.object_map
    }

    pub fn basis_image(&self, a: usize, b: usize, i: usize) -> &SparseVec {
        &self.hom_maps[a * self.source_count + b][i]
    }

    pub fn map<C: DgStructure>(&self, target: &C, a: usize, b: usize, v: &SparseVec) -> SparseVec {
        let mut acc = crate::field::Accumulator::new(target.field());
        for (i, c) in v.iter() {
            acc.add_vec(c, self.basis_image(a, b, *i));
        }
        acc.finish()
    }

    pub fn is_identity(&self) -> bool {
        self.source_count == self.target_count
            && self.object_map.iter().enumerate().all(|(i, &t)| i == t)
            && self
                .hom_maps
                .iter()
                .all(|m| m.iter().enumerate().all(|(i, v)| *v == SparseVec::unit(i)))
    }

    /// Lists every failure of degree preservation, compatibility with `d`,
    /// composition and identities.
    pub fn check<S: DgStructure, T: DgStructure>(&self, source: &S, target: &T) -> Vec<String> {
        let mut problems = Vec::new();
        let n = self.source_count;
        if source.object_count() != n || target.object_count() != self.target_count {
            problems.push("object counts do not match the functor".to_string());
            return problems;
        }
        for a in 0..n {
            for b in 0..n {
                let (fa, fb) = (self.object(a), self.object(b));
                for i in 0..source.hom_dim(a, b) {
                    let image = self.basis_image(a, b, i);
                    let name = source.basis_name(a, b, i);
                    if !image.is_zero() && target.vector_degree(fa, fb, image) != Some(source.basis_degree(a, b, i)) {
                        problems.push(format!("degree of {name} is not preserved"));
                    }
                    let lhs = target.apply_differential(fa, fb, image);
                    let rhs = self.map(target, a, b, &source.differential(a, b, i));
                    if lhs != rhs {
                        problems.push(format!("F(d {name}) ≠ d F({name})"));
                    }
                }
            }
        }
        for a in 0..n {
            let lhs = self.map(target, a, a, &source.identity(a));
            if lhs != target.identity(self.object(a)) {
                problems.push(format!("identity of {} is not preserved", source.object_label(a)));
            }
            for b in 0..n {
                for c in 0..n {
                    for g in 0..source.hom_dim(b, c) {
                        for f in 0..source.hom_dim(a, b) {
                            let Some(prod) = source.compose(a, b, c, g, f) else { continue };
                            let lhs = self.map(target, a, c, &prod);
                            let rhs = target.compose_vecs(
                                self.object(a),
                                self.object(b),
                                self.object(c),
                                self.basis_image(b, c, g),
                                self.basis_image(a, b, f),
                            );
                            if rhs.is_some_and(|r| r != lhs) {
                                problems.push(format!(
                                    "F({} ∘ {}) ≠ F({}) ∘ F({})",
                                    source.basis_name(b, c, g),
                                    source.basis_name(a, b, f),
                                    source.basis_name(b, c, g),
                                    source.basis_name(a, b, f)
                                ));
                            }
                        }
                    }
                }
            }
        }
        problems
    }
}
