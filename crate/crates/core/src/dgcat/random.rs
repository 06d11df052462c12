use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::category::{DGCategory, DgStructure};
use super::quiver::{from_quiver, QuiverPresentation, Relation};
use crate::field::{int, Field};

/// Shape of the random quiver categories used by property tests.
#[derive(Clone, Debug)]
pub struct RandomCategoryConfig {
    pub field: Field,
    pub max_vertices: usize,
    pub max_arrows: usize,
    pub loops: bool,
    /// Inclusive range of arrow degrees.
    pub arrow_degrees: (i32, i32),
    /// Every hom basis element must have degree in `[-degree_bound, degree_bound]`.
    pub degree_bound: i32,
    pub max_hom_dim: usize,
    /// Probability of a zero relation on each path of length two.
    pub zero_relation: f64,
    /// Probability of a commutativity relation on each pair of parallel paths.
    pub commutativity: f64,
}

impl Default for RandomCategoryConfig {
    fn default() -> Self {
        RandomCategoryConfig {
            field: Field::Rational,
            max_vertices: 4,
            max_arrows: 4,
            loops: true,
            arrow_degrees: (-1, 1),
            degree_bound: 2,
            max_hom_dim: 3,
            zero_relation: 0.3,
            commutativity: 0.5,
        }
    }
}

impl RandomCategoryConfig {
    /// Homs concentrated in degree 0.
    pub fn ungraded() -> Self {
        RandomCategoryConfig { arrow_degrees: (0, 0), ..Self::default() }
    }

    /// Arrow degrees in `[-1, 0]`, so no hom has positive degrees.
    pub fn nonpositive() -> Self {
        RandomCategoryConfig { arrow_degrees: (-1, 0), ..Self::default() }
    }
}

/// A random quiver presentation. Arrows go from lower to higher vertex index,
/// and each vertex carries at most one loop with square zero, so the path
/// category is always finite.
pub fn random_quiver<R: Rng>(rng: &mut R, cfg: &RandomCategoryConfig) -> QuiverPresentation {
    let n = rng.gen_range(1..=cfg.max_vertices.max(1));
    let names: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let mut q = QuiverPresentation::new(&refs);
    let arrow_count = rng.gen_range(0..=cfg.max_arrows);
    let mut looped = vec![false; n];
    for k in 0..arrow_count {
        let degree = rng.gen_range(cfg.arrow_degrees.0..=cfg.arrow_degrees.1);
        let label = format!("a{k}");
        let i = rng.gen_range(0..n);
        if cfg.loops && !looped[i] && rng.gen_bool(0.2) {
            looped[i] = true;
            q = q.graded_arrow(&label, &names[i], &names[i], degree);
            q.relations.push(Relation { terms: vec![(int(1), vec![label.clone(), label])] });
            continue;
        }
        if n < 2 {
            continue;
        }
        let (mut s, mut t) = (rng.gen_range(0..n), rng.gen_range(0..n));
        while s == t {
            t = rng.gen_range(0..n);
        }
        if s > t {
            std::mem::swap(&mut s, &mut t);
        }
        q = q.graded_arrow(&label, &names[s], &names[t], degree);
    }

    let arrows = q.arrows.clone();
    let mut length_two: Vec<(Vec<String>, String, String, i32)> = Vec::new();
    for x in &arrows {
        for y in &arrows {
            if x.target == y.source && !(x.label == y.label && x.source == x.target) {
                length_two.push((vec![x.label.clone(), y.label.clone()], x.source.clone(), y.target.clone(), x.degree + y.degree));
            }
        }
    }
    let mut zeroed = vec![false; length_two.len()];
    for (k, (path, _, _, _)) in length_two.iter().enumerate() {
        if rng.gen_bool(cfg.zero_relation) {
            zeroed[k] = true;
            q.relations.push(Relation { terms: vec![(int(1), path.clone())] });
        }
    }
    for i in 0..length_two.len() {
        for j in i + 1..length_two.len() {
            let (p, ps, pt, pd) = &length_two[i];
            let (r, rs, rt, rd) = &length_two[j];
            if zeroed[i] || zeroed[j] || ps != rs || pt != rt || pd != rd || !rng.gen_bool(cfg.commutativity) {
                continue;
            }
            let c = *[1i64, -1, 2].choose(rng).expect("nonempty");
            q.relations.push(Relation { terms: vec![(int(1), p.clone()), (int(-c), r.clone())] });
        }
    }
    q
}

fn acceptable(c: &DGCategory, cfg: &RandomCategoryConfig) -> bool {
    let n = c.object_count();
    (0..n).all(|a| {
        (0..n).all(|b| {
            c.hom_dim(a, b) <= cfg.max_hom_dim
                && c.hom_degrees(a, b).iter().all(|d| d.abs() <= cfg.degree_bound)
        })
    })
}

/// A seeded random category together with its presentation. Draws that violate
/// the size bounds are rejected and redrawn from the same stream.
pub fn random_category(seed: u64, cfg: &RandomCategoryConfig) -> (QuiverPresentation, DGCategory) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let q = random_quiver(&mut rng, cfg);
        if let Ok(c) = from_quiver(&q, cfg.field) {
            if acceptable(&c, cfg) {
                return (q, c);
            }
        }
    }
}
