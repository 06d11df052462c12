use std::collections::{BTreeMap, HashMap};

use super::category::{BasisElement, DGCategory};
use crate::error::{Error, Result};
use crate::field::{int, Accumulator, EchelonBasis, Field, Scalar, SparseVec};

pub const DEFAULT_PATH_CAP: usize = 12;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arrow {
    pub label: String,
    pub source: String,
    pub target: String,
    pub degree: i32,
}

/// A formal combination of parallel paths. Paths list arrow labels in the order
/// they are traversed; the empty path is not allowed in relations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    pub terms: Vec<(Scalar, Vec<String>)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuiverPresentation {
    pub vertices: Vec<String>,
    pub arrows: Vec<Arrow>,
    pub relations: Vec<Relation>,
    pub path_cap: usize,
}

impl QuiverPresentation {
    pub fn new(vertices: &[&str]) -> Self {
        QuiverPresentation {
            vertices: vertices.iter().map(|v| v.to_string()).collect(),
            arrows: Vec::new(),
            relations: Vec::new(),
            path_cap: DEFAULT_PATH_CAP,
        }
    }

    pub fn arrow(mut self, label: &str, source: &str, target: &str) -> Self {
        self.arrows.push(Arrow { label: label.into(), source: source.into(), target: target.into(), degree: 0 });
        self
    }

    pub fn graded_arrow(mut self, label: &str, source: &str, target: &str, degree: i32) -> Self {
        self.arrows.push(Arrow { label: label.into(), source: source.into(), target: target.into(), degree });
        self
    }

    pub fn relation(mut self, terms: &[(i64, &[&str])]) -> Self {
        self.relations.push(Relation {
            terms: terms.iter().map(|(c, p)| (int(*c), p.iter().map(|s| s.to_string()).collect())).collect(),
        });
        self
    }

    /// Renames vertices through `rename`, which must be injective.
    pub fn relabeled(&self, rename: impl Fn(&str) -> String) -> Self {
        QuiverPresentation {
            vertices: self.vertices.iter().map(|v| rename(v)).collect(),
            arrows: self
                .arrows
                .iter()
                .map(|a| Arrow { source: rename(&a.source), target: rename(&a.target), ..a.clone() })
                .collect(),
            ..self.clone()
        }
    }

    /// Lists the vertices in the order `order[k]`.
    pub fn reordered(&self, order: &[usize]) -> Self {
        QuiverPresentation { vertices: order.iter().map(|&i| self.vertices[i].clone()).collect(), ..self.clone() }
    }
}

/// Name of the basis element of a path: arrow labels joined by `.`, or
/// `e_<vertex>` for the trivial path.
pub fn path_name(vertex: &str, labels: &[&str]) -> String {
    if labels.is_empty() {
        format!("e_{vertex}")
    } else {
        labels.join(".")
    }
}


/// Paths of one length grouped by (source, target); each group is sorted by
/// label sequence.
struct Layer {
    groups: BTreeMap<(usize, usize), Vec<Vec<usize>>>,
    position: HashMap<(usize, Vec<usize>), usize>,
    ideal: HashMap<(usize, usize), EchelonBasis>,
    basis_index: HashMap<(usize, usize), Vec<Option<usize>>>,
}

impl Layer {
    fn paths(&self, source: Option<usize>, target: Option<usize>) -> Vec<(usize, &Vec<usize>)> {
        let mut out = Vec::new();
        for (&(s, t), list) in &self.groups {
            if source.is_some_and(|x| x != s) || target.is_some_and(|x| x != t) {
                continue;
            }
            out.extend(list.iter().map(|p| (s, p)));
        }
        out
    }

    fn endpoints_and_position(&self, source: usize, arrows: &[usize], ends: &[(usize, usize)]) -> (usize, usize) {
        let target = arrows.last().map_or(source, |&a| ends[a].1);
        (target, self.position[&(source, arrows.to_vec())])
    }
}

/// The path category modulo the two-sided ideal generated by the relations.
///
/// Relations must be homogeneous in path length and in degree, so the ideal is
/// graded by length. Hom spaces are spanned by the standard monomials of each
/// length; construction fails when paths of every length up to `path_cap`
/// survive.
pub fn from_quiver(q: &QuiverPresentation, field: Field) -> Result<DGCategory> {
    let nv = q.vertices.len();
    let vertex = |label: &str| -> Result<usize> {
        q.vertices.iter().position(|v| v == label).ok_or_else(|| Error::UnknownObject(label.to_string()))
    };
    for (i, v) in q.vertices.iter().enumerate() {
        if q.vertices[..i].contains(v) {
            return Err(Error::Input(format!("duplicate vertex {v}")));
        }
    }
    let mut ends = Vec::with_capacity(q.arrows.len());
    for (i, a) in q.arrows.iter().enumerate() {
        if a.label.is_empty() || a.label.contains('.') || q.arrows[..i].iter().any(|b| b.label == a.label) {
            return Err(Error::Input(format!("arrow label {:?} is duplicated or malformed", a.label)));
        }
        ends.push((vertex(&a.source)?, vertex(&a.target)?));
    }
    let arrow = |label: &str| -> Result<usize> {
        q.arrows.iter().position(|a| a.label == label).ok_or_else(|| Error::Input(format!("unknown arrow {label}")))
    };

    struct Rel {
        len: usize,
        source: usize,
        target: usize,
        terms: Vec<(Scalar, Vec<usize>)>,
    }
    let mut relations = Vec::new();
    for (k, r) in q.relations.iter().enumerate() {
        let mut shape: Option<(usize, usize, usize, i32)> = None;
        let mut terms = Vec::new();
        for (c, labels) in &r.terms {
            if labels.is_empty() {
                return Err(Error::Input(format!("relation {k} contains the empty path")));
            }
            let idx: Vec<usize> = labels.iter().map(|l| arrow(l)).collect::<Result<_>>()?;
            if idx.windows(2).any(|w| ends[w[0]].1 != ends[w[1]].0) {
                return Err(Error::Input(format!("relation {k}: {} is not a path", labels.join("."))));
            }
            let this = (
                idx.len(),
                ends[idx[0]].0,
                ends[idx[idx.len() - 1]].1,
                idx.iter().map(|&i| q.arrows[i].degree).sum::<i32>(),
            );
            match shape {
                None => shape = Some(this),
                Some(prev) if (prev.1, prev.2) != (this.1, this.2) => {
                    return Err(Error::Input(format!("relation {k} mixes paths with different endpoints")));
                }
                Some(prev) if prev != this => {
                    return Err(Error::Input(format!("relation {k} is not homogeneous in path length and degree")));
                }
                _ => {}
            }
            terms.push((field.element(c)?, idx));
        }
        if let Some((len, source, target, _)) = shape {
            relations.push(Rel { len, source, target, terms });
        }
    }

    let labels_of = |p: &[usize]| -> Vec<&str> { p.iter().map(|&i| q.arrows[i].label.as_str()).collect() };

    let mut layers: Vec<Layer> = Vec::new();
    let mut frontier: Vec<(usize, usize, Vec<usize>)> = (0..nv).map(|v| (v, v, Vec::new())).collect();
    let mut stable = false;
    for len in 0..=q.path_cap {
        let mut groups: BTreeMap<(usize, usize), Vec<Vec<usize>>> = BTreeMap::new();
        for (s, t, p) in &frontier {
            groups.entry((*s, *t)).or_default().push(p.clone());
        }
        let mut position = HashMap::new();
        for (&(s, _), list) in groups.iter_mut() {
            list.sort_by(|x, y| labels_of(x).cmp(&labels_of(y)));
            for (pos, p) in list.iter().enumerate() {
                position.insert((s, p.clone()), pos);
            }
        }
        let mut layer = Layer { groups, position, ideal: HashMap::new(), basis_index: HashMap::new() };
        for r in relations.iter().filter(|r| r.len <= len) {
            let rest = len - r.len;
            for left in 0..=rest {
                for (s, u) in layers[left].paths(None, Some(r.source)) {
                    for (_, v) in layers[rest - left].paths(Some(r.target), None) {
                        let mut acc = Accumulator::new(field);
                        let mut target = s;
                        for (c, p) in &r.terms {
                            let full: Vec<usize> = u.iter().chain(p).chain(v.iter()).copied().collect();
                            let (t, pos) = layer.endpoints_and_position(s, &full, &ends);
                            target = t;
                            acc.add_term(pos, c);
                        }
                        layer.ideal.entry((s, target)).or_insert_with(|| EchelonBasis::new(field)).insert(&acc.finish());
                    }
                }
            }
        }
        let mut survivors = 0;
        let mut basis_index = HashMap::new();
        for (&st, list) in &layer.groups {
            let pivots: Vec<usize> = layer.ideal.get(&st).map(|e| e.pivots().collect()).unwrap_or_default();
            survivors += list.len() - pivots.len();
            basis_index.insert(st, vec![None; list.len()]);
        }
        layer.basis_index = basis_index;
        layers.push(layer);
        if survivors == 0 {
            stable = true;
            break;
        }
        let mut next = Vec::new();
        for (s, t, p) in &frontier {
            for (i, &(from, to)) in ends.iter().enumerate() {
                if from == *t {
                    let mut arrows = p.clone();
                    arrows.push(i);
                    next.push((*s, to, arrows));
                }
            }
        }
        frontier = next;
    }
    if !stable {
        return Err(Error::InfiniteHom {
            cap: q.path_cap,
            detail: format!("paths of length {} survive the relations", q.path_cap),
        });
    }

    let mut homs: Vec<Vec<BasisElement>> = vec![Vec::new(); nv * nv];
    let mut basis_paths: Vec<Vec<Vec<usize>>> = vec![Vec::new(); nv * nv];
    for layer in layers.iter_mut() {
        for (&(s, t), list) in &layer.groups {
            let pivots: Vec<usize> = layer.ideal.get(&(s, t)).map(|e| e.pivots().collect()).unwrap_or_default();
            let slots = layer.basis_index.get_mut(&(s, t)).expect("every group has slots");
            for (pos, p) in list.iter().enumerate() {
                if pivots.contains(&pos) {
                    continue;
                }
                let hom = &mut homs[s * nv + t];
                slots[pos] = Some(hom.len());
                hom.push(BasisElement {
                    name: path_name(&q.vertices[s], &labels_of(p)),
                    degree: p.iter().map(|&i| q.arrows[i].degree).sum(),
                });
                basis_paths[s * nv + t].push(p.clone());
            }
        }
    }

    let mut comps = Vec::with_capacity(nv * nv * nv);
    for a in 0..nv {
        for b in 0..nv {
            for c in 0..nv {
                let (gs, fs) = (&basis_paths[b * nv + c], &basis_paths[a * nv + b]);
                let mut table = Vec::with_capacity(gs.len() * fs.len());
                for g in gs {
                    for f in fs {
                        let full: Vec<usize> = f.iter().chain(g).copied().collect();
                        let Some(layer) = layers.get(full.len()) else {
                            table.push(SparseVec::zero());
                            continue;
                        };
                        let (t, pos) = layer.endpoints_and_position(a, &full, &ends);
                        let unit = SparseVec::unit(pos);
                        let nf = layer.ideal.get(&(a, t)).map_or(unit.clone(), |e| e.reduce(&unit));
                        let slots = &layer.basis_index[&(a, t)];
                        table.push(nf.reindex(field, |k| slots[k].expect("normal forms avoid pivots")));
                    }
                }
                comps.push(table);
            }
        }
    }

    let identities: Vec<SparseVec> = (0..nv)
        .map(|v| SparseVec::unit(layers[0].basis_index[&(v, v)][0].expect("trivial paths survive")))
        .collect();
    let degrees: Vec<i32> = homs.iter().flatten().map(|e| e.degree).collect();
    let window = (degrees.iter().copied().min().unwrap_or(0), degrees.iter().copied().max().unwrap_or(0));
    let diffs = homs.iter().map(|h| vec![SparseVec::zero(); h.len()]).collect();
    DGCategory::from_parts(field, q.vertices.clone(), window, homs, diffs, comps, identities)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dgcat::category::DgStructure;
    use crate::dgcat::validate::validate;

    fn dims(c: &DGCategory) -> Vec<usize> {
        let n = c.object_count();
        (0..n * n).map(|k| c.hom_dim(k / n, k % n)).collect()
    }

    #[test]
    fn a2_quiver() {
        let q = QuiverPresentation::new(&["x", "y"]).arrow("f", "x", "y");
        let c = from_quiver(&q, Field::Rational).unwrap();
        assert_eq!(dims(&c), vec![1, 1, 0, 1]);
        assert!(validate(&c).is_valid());
    }

    #[test]
    fn single_vertex_is_the_field() {
        let c = from_quiver(&QuiverPresentation::new(&["pt"]), Field::Rational).unwrap();
        assert_eq!(c, DGCategory::unit(Field::Rational, "pt").renamed(|o| o.to_string(), |_| "e_pt".into()));
    }

    #[test]
    fn nilpotent_loop() {
        let q = QuiverPresentation::new(&["v"]).arrow("t", "v", "v").relation(&[(1, &["t", "t"])]);
        let c = from_quiver(&q, Field::Rational).unwrap();
        assert_eq!(c.hom_dim(0, 0), 2);
        assert!(validate(&c).is_valid());
        assert_eq!(c.compose(0, 0, 0, 1, 1).unwrap(), SparseVec::zero());
    }

    #[test]
    fn free_loop_is_infinite() {
        let q = QuiverPresentation::new(&["v"]).arrow("t", "v", "v");
        assert!(matches!(from_quiver(&q, Field::Rational), Err(Error::InfiniteHom { .. })));
    }

    #[test]
    fn commutative_square() {
        let q = QuiverPresentation::new(&["a", "b", "c", "d"])
            .arrow("p", "a", "b")
            .arrow("q", "b", "d")
            .arrow("r", "a", "c")
            .arrow("s", "c", "d")
            .relation(&[(1, &["p", "q"]), (-1, &["r", "s"])]);
        let c = from_quiver(&q, Field::Rational).unwrap();
        assert_eq!(c.hom_dim(0, 3), 1);
        assert!(validate(&c).is_valid());
        // both composites equal the surviving standard monomial
        let (p, qq) = (c.find_element("p").unwrap(), c.find_element("q").unwrap());
        let (r, s) = (c.find_element("r").unwrap(), c.find_element("s").unwrap());
        assert_eq!(c.compose(0, 1, 3, qq.2, p.2), c.compose(0, 2, 3, s.2, r.2));
    }

    #[test]
    fn inhomogeneous_relation_is_rejected() {
        let q = QuiverPresentation::new(&["a", "b"])
            .arrow("f", "a", "b")
            .arrow("g", "b", "b")
            .relation(&[(1, &["f"]), (1, &["f", "g"])]);
        assert!(from_quiver(&q, Field::Rational).is_err());
    }

    #[test]
    fn graded_arrows_give_graded_homs() {
        let q = QuiverPresentation::new(&["x", "y"]).graded_arrow("f", "x", "y", -1);
        let c = from_quiver(&q, Field::Rational).unwrap();
        assert_eq!(c.window(), (-1, 0));
        assert_eq!(c.basis_degree(0, 1, 0), -1);
    }
}
