//! JSON formats: categories (explicit or by quiver), triples, lattices and
//! integer matrices.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;

use crate::dgcat::{from_quiver, validate, Arrow, DGCategory, DGCategoryBuilder, DgStructure, QuiverPresentation, Relation};
use crate::drinfeld::drinfeld_quotient;
use crate::error::{Error, Result};
use crate::field::{fmt_scalar, int, parse_scalar, Field, Scalar};
use crate::ktheory::{gram_from_category, EulerLattice, KTriple, Provenance};
use crate::lattice::{AbGroupPresentation, IntMatrix};
use crate::perfect::TwistedComplex;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
enum Coef {
    Int(i64),
    Text(String),
}

impl Coef {
    fn scalar(&self) -> Result<Scalar> {
        match self {
            Coef::Int(n) => Ok(int(*n)),
            Coef::Text(s) => parse_scalar(s),
        }
    }

    fn from_scalar(x: &Scalar) -> Coef {
        match (x.is_integer(), i64::try_from(x.numer())) {
            (true, Ok(n)) => Coef::Int(n),
            _ => Coef::Text(fmt_scalar(x)),
        }
    }
}

type Combination = Vec<(Coef, String)>;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ElementFile {
    name: String,
    degree: i32,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct HomFile {
    source: String,
    target: String,
    basis: Vec<ElementFile>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DifferentialFile {
    element: String,
    value: Combination,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CompositionFile {
    left: String,
    right: String,
    value: Combination,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum IdentityFile {
    Element(String),
    Combination(Combination),
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ArrowFile {
    label: String,
    source: String,
    target: String,
    #[serde(default)]
    degree: i32,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct QuiverFile {
    vertices: Vec<String>,
    #[serde(default)]
    arrows: Vec<ArrowFile>,
    #[serde(default)]
    relations: Vec<Vec<(Coef, Vec<String>)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    path_cap: Option<usize>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CategoryFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    field: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    objects: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    window: Option<(i32, i32)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    homs: Option<Vec<HomFile>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    identities: Option<BTreeMap<String, IdentityFile>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    differential: Option<Vec<DifferentialFile>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    composition: Option<Vec<CompositionFile>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    quiver: Option<QuiverFile>,
}

/// 1-based line and column of byte `offset` in `text`.
fn position(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rfind('\n').map_or(before.len(), |i| before.len() - i - 1) + 1;
    (line, column)
}

/// Where `"key"` first appears, for errors found after deserialization.
fn locate(text: &str, key: &str) -> String {
    match text.find(&format!("\"{key}\"")) {
        Some(offset) => {
            let (line, column) = position(text, offset);
            format!("line {line}, column {column}: ")
        }
        None => String::new(),
    }
}

/// Line/column of `inner` (a slice of `outer`) translated to `outer`.
fn shift_position(outer: &str, inner: &str, line: usize, column: usize) -> (usize, usize) {
    let offset = inner.as_ptr() as usize - outer.as_ptr() as usize;
    let (base_line, base_column) = position(outer, offset);
    if line <= 1 {
        (base_line, base_column + column.saturating_sub(1))
    } else {
        (base_line + line - 1, column)
    }
}

fn json_error(e: serde_json::Error) -> Error {
    use serde_json::error::Category;
    match e.classify() {
        Category::Data => Error::Schema(format!("line {}, column {}: {}", e.line(), e.column(), strip_position(&e))),
        Category::Io => Error::Input(e.to_string()),
        _ => Error::Syntax { line: e.line(), column: e.column(), message: strip_position(&e) },
    }
}

fn strip_position(e: &serde_json::Error) -> String {
    let s = e.to_string();
    match s.rfind(" at line ") {
        Some(i) => s[..i].to_string(),
        None => s,
    }
}

fn from_json<'a, T: Deserialize<'a>>(text: &'a str) -> Result<T> {
    serde_json::from_str(text).map_err(json_error)
}

fn combination(terms: &Combination) -> Result<Vec<(Scalar, String)>> {
    terms.iter().map(|(c, name)| Ok((c.scalar()?, name.clone()))).collect()
}

fn borrowed(terms: &[(Scalar, String)]) -> Vec<(Scalar, &str)> {
    terms.iter().map(|(c, s)| (c.clone(), s.as_str())).collect()
}

fn build_explicit(file: &CategoryFile, field: Field, text: &str) -> Result<DGCategory> {
    let schema = |key: &str, msg: String| Error::Schema(format!("{}{msg}", locate(text, key)));
    let objects = file.objects.as_ref().ok_or_else(|| schema("homs", "\"objects\" is required with \"homs\"".into()))?;
    let mut b = DGCategoryBuilder::new(field);
    for o in objects {
        b.object(o).map_err(|e| schema("objects", e.to_string()))?;
    }
    if let Some((lo, hi)) = file.window {
        b.window(lo, hi).map_err(|e| schema("window", e.to_string()))?;
    }
    for h in file.homs.iter().flatten() {
        for e in &h.basis {
            b.basis(&h.source, &h.target, &e.name, e.degree).map_err(|err| match err {
                Error::UnknownObject(o) => schema(&o, format!("unknown object `{o}` in \"homs\"")),
                other => schema(&e.name, other.to_string()),
            })?;
        }
    }
    let identities = file.identities.as_ref().ok_or_else(|| schema("homs", "\"identities\" is required".into()))?;
    for (object, id) in identities {
        let terms = match id {
            IdentityFile::Element(name) => vec![(int(1), name.clone())],
            IdentityFile::Combination(c) => combination(c)?,
        };
        b.identity(object, &borrowed(&terms)).map_err(|e| schema("identities", e.to_string()))?;
    }
    for d in file.differential.iter().flatten() {
        b.differential(&d.element, &borrowed(&combination(&d.value)?));
    }
    for c in file.composition.iter().flatten() {
        b.composition(&c.left, &c.right, &borrowed(&combination(&c.value)?));
    }
    b.build().map_err(|e| match e {
        Error::Input(msg) | Error::Shape(msg) => {
            let key = msg.split_whitespace().last().unwrap_or("").to_string();
            schema(&key, msg)
        }
        other => other,
    })
}

fn quiver_presentation(q: &QuiverFile) -> Result<QuiverPresentation> {
    let refs: Vec<&str> = q.vertices.iter().map(String::as_str).collect();
    let mut p = QuiverPresentation::new(&refs);
    p.arrows = q
        .arrows
        .iter()
        .map(|a| Arrow { label: a.label.clone(), source: a.source.clone(), target: a.target.clone(), degree: a.degree })
        .collect();
    for r in &q.relations {
        let terms = r.iter().map(|(c, path)| Ok((c.scalar()?, path.clone()))).collect::<Result<Vec<_>>>()?;
        p.relations.push(Relation { terms });
    }
    if let Some(cap) = q.path_cap {
        p.path_cap = cap;
    }
    Ok(p)
}

fn category_from_file(file: &CategoryFile, text: &str, field: Option<Field>) -> Result<DGCategory> {
    let field = match (field, &file.field) {
        (Some(f), _) => f,
        (None, Some(s)) => s.parse().map_err(|e: Error| Error::Schema(format!("{}{e}", locate(text, "field"))))?,
        (None, None) => Field::Rational,
    };
    let explicit = file.homs.is_some() || file.composition.is_some() || file.differential.is_some() || file.identities.is_some();
    let c = match (&file.quiver, explicit) {
        (Some(_), true) => {
            return Err(Error::Schema(format!(
                "{}give either \"quiver\" or \"homs\"/\"composition\", not both",
                locate(text, "quiver")
            )))
        }
        (Some(q), false) => {
            if file.objects.is_some() || file.window.is_some() {
                return Err(Error::Schema(format!("{}\"objects\" and \"window\" do not apply to a quiver", locate(text, "quiver"))));
            }
            from_quiver(&quiver_presentation(q)?, field)?
        }
        (None, true) => build_explicit(file, field, text)?,
        (None, false) => return Err(Error::Schema("one of \"quiver\" or \"homs\" is required".into())),
    };
    let report = validate(&c);
    if let Some(v) = report.violations.first() {
        return Err(Error::Axiom(v.to_string()));
    }
    Ok(c)
}

/// Parses and validates a category. `field` overrides the file's field.
pub fn parse_category(text: &str, field: Option<Field>) -> Result<DGCategory> {
    let file: CategoryFile = from_json(text)?;
    category_from_file(&file, text, field)
}

/// The explicit form of `c`; parsing it back gives `c`.
pub fn category_to_json(c: &DGCategory) -> String {
    let n = c.object_count();
    let name = |a: usize, b: usize, i: usize| c.basis_name(a, b, i);
    let combo = |a: usize, b: usize, v: &crate::field::SparseVec| -> Combination {
        v.iter().map(|(i, x)| (Coef::from_scalar(x), name(a, b, *i))).collect()
    };
    let mut homs = Vec::new();
    let mut differential = Vec::new();
    let mut composition = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if c.hom_dim(a, b) == 0 {
                continue;
            }
            homs.push(HomFile {
                source: c.object_label(a).to_string(),
                target: c.object_label(b).to_string(),
                basis: c.hom_basis(a, b).iter().map(|e| ElementFile { name: e.name.clone(), degree: e.degree }).collect(),
            });
            for i in 0..c.hom_dim(a, b) {
                let d = c.differential(a, b, i);
                if !d.is_zero() {
                    differential.push(DifferentialFile { element: name(a, b, i), value: combo(a, b, &d) });
                }
            }
        }
    }
    for a in 0..n {
        for b in 0..n {
            for cc in 0..n {
                for g in 0..c.hom_dim(b, cc) {
                    for f in 0..c.hom_dim(a, b) {
                        let v = c.compose(a, b, cc, g, f).expect("finite categories compose everything");
                        if !v.is_zero() {
                            composition.push(CompositionFile { left: name(b, cc, g), right: name(a, b, f), value: combo(a, cc, &v) });
                        }
                    }
                }
            }
        }
    }
    let identities = (0..n)
        .map(|a| (c.object_label(a).to_string(), IdentityFile::Combination(combo(a, a, &c.identity(a)))))
        .collect();
    let file = CategoryFile {
        field: Some(c.field().to_string()),
        objects: Some(c.objects().to_vec()),
        window: Some(c.window()),
        homs: Some(homs),
        identities: Some(identities),
        differential: Some(differential),
        composition: Some(composition),
        quiver: None,
    };
    serde_json::to_string_pretty(&file).expect("serializable") + "\n"
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct LatticeFile {
    gram: Vec<Vec<i64>>,
    #[serde(default)]
    serre: Option<Vec<Vec<i64>>>,
}

fn matrix(rows: &[Vec<i64>], cols: usize, what: &str) -> Result<IntMatrix> {
    if rows.is_empty() {
        return Ok(IntMatrix::zeros(0, cols));
    }
    IntMatrix::from_rows(rows).map_err(|e| Error::Schema(format!("{what}: {e}")))
}

/// `{"gram": [[..]], "serre": [[..]]}` with `serre` optional.
pub fn parse_lattice(text: &str) -> Result<(EulerLattice, Option<IntMatrix>)> {
    let file: LatticeFile = from_json(text)?;
    let n = file.gram.len();
    let l = EulerLattice::new(matrix(&file.gram, n, "gram")?, Provenance::UserSupplied)?;
    let s = file.serre.as_ref().map(|s| matrix(s, n, "serre")).transpose()?;
    Ok((l, s))
}

/// Whether a document looks like a lattice file rather than a category.
pub fn is_lattice_document(text: &str) -> bool {
    serde_json::from_str::<serde_json::Map<String, serde_json::Value>>(text).is_ok_and(|m| m.contains_key("gram"))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixFile {
    matrix: Vec<Vec<i64>>,
    #[serde(default)]
    cols: Option<usize>,
}

/// `{"matrix": [[..]]}`; `cols` is needed only for matrices without rows.
pub fn parse_matrix(text: &str) -> Result<IntMatrix> {
    let file: MatrixFile = from_json(text)?;
    matrix(&file.matrix, file.cols.unwrap_or(0), "matrix")
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct K0File {
    sub: Vec<Vec<i64>>,
    ambient: Vec<Vec<i64>>,
    quotient: Vec<Vec<i64>>,
    i_star: Vec<Vec<i64>>,
    q_star: Vec<Vec<i64>>,
    /// `rank Q` rows, one column per relation.
    #[serde(default)]
    q_relations: Option<Vec<Vec<i64>>>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Flags {
    #[serde(default)]
    pub thick: bool,
    #[serde(default)]
    pub q_preserves_compacts: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairSpec {
    pub source: String,
    pub target: String,
    #[serde(default)]
    pub expected: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TripleFile<'a> {
    #[serde(borrow, default)]
    category: Option<&'a RawValue>,
    #[serde(default)]
    category_path: Option<String>,
    #[serde(default)]
    contract: Vec<String>,
    #[serde(default)]
    depth: Option<usize>,
    #[serde(default)]
    k0: Option<K0File>,
    #[serde(default)]
    flags: Flags,
    #[serde(default)]
    pairs: Option<Vec<PairSpec>>,
    #[serde(default)]
    expected_coker: Option<Vec<i64>>,
}

pub const DEFAULT_DEPTH: usize = 3;

/// Where the K₀ data of a triple came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum K0Source {
    Supplied,
    /// Representables as bases; Euler form of the quotient from the cohomology
    /// in the trust window at the given depth.
    Derived { depth: usize },
}

#[derive(Debug)]
pub struct TripleSpec {
    pub category: Option<DGCategory>,
    pub contract: Vec<String>,
    pub depth: usize,
    pub flags: Flags,
    pub pairs: Option<Vec<PairSpec>>,
    pub expected_coker: Option<AbGroupPresentation>,
    k0: Option<KTriple>,
}

/// Parses a triple. `category_path` is resolved against `base_dir`;
/// `field` overrides the category's field.
pub fn parse_triple(text: &str, base_dir: &Path, field: Option<Field>) -> Result<TripleSpec> {
    let file: TripleFile = from_json(text)?;
    let category = match (file.category, &file.category_path) {
        (Some(_), Some(_)) => {
            return Err(Error::Schema(format!("{}give \"category\" or \"category_path\", not both", locate(text, "category_path"))))
        }
        (Some(raw), None) => {
            let inner: CategoryFile = serde_json::from_str(raw.get()).map_err(|e| match json_error(e) {
                Error::Syntax { line, column, message } => {
                    let (line, column) = shift_position(text, raw.get(), line, column);
                    Error::Syntax { line, column, message }
                }
                other => other,
            })?;
            Some(category_from_file(&inner, text, field)?)
        }
        (None, Some(path)) => {
            let full = base_dir.join(path);
            let inner = std::fs::read_to_string(&full).map_err(|e| Error::Input(format!("{}: {e}", full.display())))?;
            Some(parse_category(&inner, field)?)
        }
        (None, None) => None,
    };
    if let Some(c) = &category {
        for label in &file.contract {
            c.require_object(label)?;
        }
    }
    let depth = file.depth.unwrap_or(DEFAULT_DEPTH);
    if depth < 2 {
        return Err(Error::DepthTooSmall(depth));
    }
    let k0 = file
        .k0
        .as_ref()
        .map(|k| {
            let lat = |rows: &Vec<Vec<i64>>, what: &str| {
                EulerLattice::new(matrix(rows, rows.len(), what)?, Provenance::UserSupplied)
            };
            let (sub, ambient, quotient) = (lat(&k.sub, "sub")?, lat(&k.ambient, "ambient")?, lat(&k.quotient, "quotient")?);
            let i_star = matrix(&k.i_star, sub.rank(), "i_star")?;
            let q_star = matrix(&k.q_star, ambient.rank(), "q_star")?;
            let relations = match &k.q_relations {
                Some(r) if !r.is_empty() => matrix(r, 0, "q_relations")?,
                _ => IntMatrix::zeros(quotient.rank(), 0),
            };
            KTriple::with_relations(sub, ambient, quotient, i_star, q_star, relations)
        })
        .transpose()?;
    if category.is_none() && k0.is_none() {
        return Err(Error::Schema("a triple needs a category or explicit \"k0\" data".into()));
    }
    let expected_coker = file.expected_coker.as_ref().map(|f| AbGroupPresentation::from_invariant_factors(f));
    Ok(TripleSpec { category, contract: file.contract, depth, flags: file.flags, pairs: file.pairs, expected_coker, k0 })
}

impl TripleSpec {
    pub fn contract_refs(&self) -> Vec<&str> {
        self.contract.iter().map(String::as_str).collect()
    }

    pub fn require_category(&self) -> Result<&DGCategory> {
        self.category.as_ref().ok_or_else(|| Error::Schema("this command needs a \"category\"".into()))
    }

    /// The K₀ triple, supplied or derived from representables.
    pub fn k_triple(&self) -> Result<(KTriple, K0Source)> {
        let t = match &self.k0 {
            Some(t) => (t.clone(), K0Source::Supplied),
            None => (self.derive_k_triple()?, K0Source::Derived { depth: self.depth }),
        };
        Ok((t.0.thick(self.flags.thick).preserving_compacts(self.flags.q_preserves_compacts), t.1))
    }

    fn derive_k_triple(&self) -> Result<KTriple> {
        let c = self.require_category()?;
        let n = c.object_count();
        let contracted: Vec<usize> = (0..n).filter(|&a| self.contract.iter().any(|l| l == c.object_label(a))).collect();
        let kept: Vec<usize> = (0..n).filter(|a| !contracted.contains(a)).collect();
        let reps = |objs: &[usize]| objs.iter().map(|&a| TwistedComplex::representable(a)).collect::<Vec<_>>();
        let all: Vec<usize> = (0..n).collect();
        let ambient = gram_from_category(c, &reps(&all))?;
        let sub = if contracted.is_empty() {
            EulerLattice::new(IntMatrix::zeros(0, 0), Provenance::ComputedFromCategory)?
        } else {
            gram_from_category(c, &reps(&contracted))?
        };
        let q = drinfeld_quotient(c, &self.contract_refs(), self.depth)?;
        let mut rows = Vec::with_capacity(kept.len());
        for &a in &kept {
            let mut row = Vec::with_capacity(kept.len());
            for &b in &kept {
                let (complex, _) = q.hom_complex(a, b)?;
                let window = q.trust_window(a, b);
                let mut chi = 0i64;
                for m in complex.degrees() {
                    if window.contains(m) {
                        let d = complex.cohomology_dim(m) as i64;
                        chi += if m.rem_euclid(2) == 0 { d } else { -d };
                    }
                }
                row.push(chi);
            }
            rows.push(row);
        }
        let quotient = EulerLattice::new(matrix(&rows, kept.len(), "quotient")?, Provenance::ComputedFromCategory)?;
        let mut i_star = IntMatrix::zeros(n, contracted.len());
        for (j, &a) in contracted.iter().enumerate() {
            i_star[(a, j)] = 1.into();
        }
        let mut q_star = IntMatrix::zeros(kept.len(), n);
        for (i, &a) in kept.iter().enumerate() {
            q_star[(i, a)] = 1.into();
        }
        KTriple::new(sub, ambient, quotient, i_star, q_star)
    }
}
