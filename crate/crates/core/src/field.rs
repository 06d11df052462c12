//! Coefficient fields and exact linear algebra over them.
//!
//! Elements are stored as [`BigRational`] in both supported fields. Over a
//! prime field the stored value is always the canonical integer representative
//! in `[0, p)`, so equality of elements is equality of the stored values.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Scalar = BigRational;

/// The coefficient field of a session.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Field {
    Rational,
    Prime(u64),
}

impl Default for Field {
    fn default() -> Self {
        Field::Rational
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rational => write!(f, "Q"),
            Field::Prime(p) => write!(f, "Fp:{p}"),
        }
    }
}

impl FromStr for Field {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "Q" {
            return Ok(Field::Rational);
        }
        let p = s
            .strip_prefix("Fp:")
            .and_then(|rest| rest.parse::<u64>().ok())
            .ok_or_else(|| Error::Input(format!("unknown field `{s}` (expected Q or Fp:<prime>)")))?;
        if !is_prime(p) {
            return Err(Error::Input(format!("field characteristic {p} is not prime")));
        }
        if p > u32::MAX as u64 {
            return Err(Error::Input(format!("field characteristic {p} is too large")));
        }
        Ok(Field::Prime(p))
    }
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub fn int(n: i64) -> Scalar {
    BigRational::from_integer(BigInt::from(n))
}

impl Field {
    pub fn characteristic(&self) -> u64 {
        match self {
            Field::Rational => 0,
            Field::Prime(p) => *p,
        }
    }

    /// Brings an arbitrary rational into canonical form for this field.
    pub fn element(&self, x: &Scalar) -> Result<Scalar> {
        match self {
            Field::Rational => Ok(x.clone()),
            Field::Prime(p) => {
                let p = BigInt::from(*p);
                let den = x.denom().mod_floor(&p);
                if den.is_zero() {
                    return Err(Error::Input(format!(
                        "coefficient {x} has a denominator divisible by the characteristic {p}"
                    )));
                }
                let num = x.numer().mod_floor(&p);
                let inv = mod_inverse(&den, &p);
                Ok(BigRational::from_integer((num * inv).mod_floor(&p)))
            }
        }
    }

    pub fn from_i64(&self, n: i64) -> Scalar {
        self.reduce_int(BigInt::from(n))
    }

    fn reduce_int(&self, n: BigInt) -> Scalar {
        match self {
            Field::Rational => BigRational::from_integer(n),
            Field::Prime(p) => BigRational::from_integer(n.mod_floor(&BigInt::from(*p))),
        }
    }

    fn reduce(&self, x: Scalar) -> Scalar {
        match self {
            Field::Rational => x,
            Field::Prime(p) => {
                debug_assert!(x.is_integer());
                BigRational::from_integer(x.to_integer().mod_floor(&BigInt::from(*p)))
            }
        }
    }

    pub fn add(&self, a: &Scalar, b: &Scalar) -> Scalar {
        self.reduce(a + b)
    }

    pub fn sub(&self, a: &Scalar, b: &Scalar) -> Scalar {
        self.reduce(a - b)
    }

    pub fn mul(&self, a: &Scalar, b: &Scalar) -> Scalar {
        self.reduce(a * b)
    }

    pub fn neg(&self, a: &Scalar) -> Scalar {
        self.reduce(-a)
    }

    pub fn sign(&self, odd: bool, a: &Scalar) -> Scalar {
        if odd {
            self.neg(a)
        } else {
            a.clone()
        }
    }

    pub fn inv(&self, a: &Scalar) -> Option<Scalar> {
        if a.is_zero() {
            return None;
        }
        match self {
            Field::Rational => Some(a.recip()),
            Field::Prime(p) => {
                let p = BigInt::from(*p);
                Some(BigRational::from_integer(mod_inverse(&a.to_integer(), &p)))
            }
        }
    }
}

fn mod_inverse(a: &BigInt, p: &BigInt) -> BigInt {
    let e = a.extended_gcd(p);
    e.x.mod_floor(p)
}

/// Print a scalar compactly (`3`, `-1/2`).
pub fn fmt_scalar(x: &Scalar) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parse `"3"`, `"-1/2"`.
pub fn parse_scalar(s: &str) -> Result<Scalar> {
    let s = s.trim();
    let bad = || Error::Input(format!("`{s}` is not a rational number"));
    if let Some((n, d)) = s.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
        let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        Ok(BigRational::new(n, d))
    } else {
        Ok(BigRational::from_integer(BigInt::from_str(s).map_err(|_| bad())?))
    }
}

/// Sparse vector: strictly increasing indices, no stored zeros.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SparseVec {
    entries: Vec<(usize, Scalar)>,
}

impl SparseVec {
    pub fn zero() -> Self {
        SparseVec { entries: Vec::new() }
    }

    pub fn unit(index: usize) -> Self {
        SparseVec { entries: vec![(index, Scalar::one())] }
    }

    pub fn single(index: usize, value: Scalar) -> Self {
        if value.is_zero() {
            Self::zero()
        } else {
            SparseVec { entries: vec![(index, value)] }
        }
    }

    /// Builds from unsorted terms, merging repeated indices.
    pub fn from_terms(field: Field, terms: impl IntoIterator<Item = (usize, Scalar)>) -> Self {
        let mut acc: BTreeMap<usize, Scalar> = BTreeMap::new();
        for (i, c) in terms {
            let slot = acc.entry(i).or_insert_with(Scalar::zero);
            *slot = field.add(slot, &c);
        }
        SparseVec { entries: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect() }
    }

    pub fn from_dense(field: Field, dense: &[Scalar]) -> Self {
        Self::from_terms(field, dense.iter().cloned().enumerate())
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = &(usize, Scalar)> {
        self.entries.iter()
    }

    pub fn leading(&self) -> Option<usize> {
        self.entries.first().map(|(i, _)| *i)
    }

    pub fn get(&self, index: usize) -> Scalar {
        match self.entries.binary_search_by_key(&index, |(i, _)| *i) {
            Ok(pos) => self.entries[pos].1.clone(),
            Err(_) => Scalar::zero(),
        }
    }

    pub fn to_dense(&self, len: usize) -> Vec<Scalar> {
        let mut out = vec![Scalar::zero(); len];
        for (i, c) in &self.entries {
            out[*i] = c.clone();
        }
        out
    }

    pub fn scale(&self, field: Field, c: &Scalar) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        SparseVec {
            entries: self
                .entries
                .iter()
                .map(|(i, x)| (*i, field.mul(x, c)))
                .filter(|(_, x)| !x.is_zero())
                .collect(),
        }
    }

    pub fn negated(&self, field: Field) -> Self {
        SparseVec { entries: self.entries.iter().map(|(i, x)| (*i, field.neg(x))).collect() }
    }

    /// `self + c * other`.
    pub fn add_scaled(&self, field: Field, c: &Scalar, other: &SparseVec) -> Self {
        if c.is_zero() || other.is_zero() {
            return self.clone();
        }
        let mut out = Vec::with_capacity(self.entries.len() + other.entries.len());
        let (mut a, mut b) = (self.entries.iter().peekable(), other.entries.iter().peekable());
        loop {
            match (a.peek(), b.peek()) {
                (Some((i, x)), Some((j, y))) => {
                    if i < j {
                        out.push((*i, x.clone()));
                        a.next();
                    } else if j < i {
                        out.push((*j, field.mul(c, y)));
                        b.next();
                    } else {
                        let v = field.add(x, &field.mul(c, y));
                        if !v.is_zero() {
                            out.push((*i, v));
                        }
                        a.next();
                        b.next();
                    }
                }
                (Some((i, x)), None) => {
                    out.push((*i, x.clone()));
                    a.next();
                }
                (None, Some((j, y))) => {
                    out.push((*j, field.mul(c, y)));
                    b.next();
                }
                (None, None) => break,
            }
        }
        out.retain(|(_, x)| !x.is_zero());
        SparseVec { entries: out }
    }

    pub fn add(&self, field: Field, other: &SparseVec) -> Self {
        self.add_scaled(field, &Scalar::one(), other)
    }

    pub fn sub(&self, field: Field, other: &SparseVec) -> Self {
        self.add_scaled(field, &-Scalar::one(), other)
    }

    /// Reindexes entries through `map`; callers guarantee injectivity.
    pub fn reindex(&self, field: Field, map: impl Fn(usize) -> usize) -> Self {
        Self::from_terms(field, self.entries.iter().map(|(i, c)| (map(*i), c.clone())))
    }
}

/// Accumulator for linear combinations built term by term.
#[derive(Clone, Debug)]
pub struct Accumulator {
    field: Field,
    terms: BTreeMap<usize, Scalar>,
}

impl Accumulator {
    pub fn new(field: Field) -> Self {
        Accumulator { field, terms: BTreeMap::new() }
    }

    pub fn add_term(&mut self, index: usize, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(index).or_insert_with(Scalar::zero);
        *slot = self.field.add(slot, c);
    }

    pub fn add_vec(&mut self, c: &Scalar, v: &SparseVec) {
        if c.is_zero() {
            return;
        }
        for (i, x) in v.iter() {
            let term = self.field.mul(c, x);
            self.add_term(*i, &term);
        }
    }

    pub fn finish(self) -> SparseVec {
        SparseVec { entries: self.terms.into_iter().filter(|(_, c)| !c.is_zero()).collect() }
    }
}

/// Incrementally maintained row-echelon basis of a subspace.
#[derive(Clone, Debug)]
pub struct EchelonBasis {
    field: Field,
    rows: BTreeMap<usize, SparseVec>,
}

impl EchelonBasis {
    pub fn new(field: Field) -> Self {
        EchelonBasis { field, rows: BTreeMap::new() }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Remainder of `v` after elimination against the basis.
    pub fn reduce(&self, v: &SparseVec) -> SparseVec {
        let mut r = v.clone();
        for (p, row) in &self.rows {
            let c = r.get(*p);
            if !c.is_zero() {
                r = r.add_scaled(self.field, &self.field.neg(&c), row);
            }
        }
        r
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(v).is_zero()
    }

    /// Inserts `v`; returns false if it was already in the span.
    pub fn insert(&mut self, v: &SparseVec) -> bool {
        let r = self.reduce(v);
        let Some(p) = r.leading() else { return false };
        let inv = self.field.inv(&r.get(p)).expect("leading entry is nonzero");
        let r = r.scale(self.field, &inv);
        // rows stay fully reduced: column p is cleared everywhere else
        let field = self.field;
        for row in self.rows.values_mut() {
            let c = row.get(p);
            if !c.is_zero() {
                *row = row.add_scaled(field, &field.neg(&c), &r);
            }
        }
        self.rows.insert(p, r);
        true
    }

    pub fn pivots(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.keys().copied()
    }

    /// Rows in reduced row echelon form, keyed by pivot.
    pub fn rows(&self) -> &BTreeMap<usize, SparseVec> {
        &self.rows
    }
}

/// Matrix over a field stored as sparse rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldMatrix {
    field: Field,
    nrows: usize,
    ncols: usize,
    rows: Vec<SparseVec>,
}

impl FieldMatrix {
    pub fn zeros(field: Field, nrows: usize, ncols: usize) -> Self {
        FieldMatrix { field, nrows, ncols, rows: vec![SparseVec::zero(); nrows] }
    }

    pub fn identity(field: Field, n: usize) -> Self {
        FieldMatrix { field, nrows: n, ncols: n, rows: (0..n).map(SparseVec::unit).collect() }
    }

    pub fn from_rows(field: Field, ncols: usize, rows: Vec<SparseVec>) -> Self {
        debug_assert!(rows.iter().all(|r| r.iter().all(|(i, _)| *i < ncols)));
        FieldMatrix { field, nrows: rows.len(), ncols, rows }
    }

    /// Matrix whose `j`-th column is `columns[j]` (vectors of length `nrows`).
    pub fn from_columns(field: Field, nrows: usize, columns: &[SparseVec]) -> Self {
        let mut rows: Vec<Vec<(usize, Scalar)>> = vec![Vec::new(); nrows];
        for (j, col) in columns.iter().enumerate() {
            for (i, c) in col.iter() {
                rows[*i].push((j, c.clone()));
            }
        }
        let rows = rows.into_iter().map(|terms| SparseVec::from_terms(field, terms)).collect();
        FieldMatrix { field, nrows, ncols: columns.len(), rows }
    }

    pub fn from_dense(field: Field, dense: &[Vec<Scalar>]) -> Result<Self> {
        let ncols = dense.first().map_or(0, |r| r.len());
        let mut rows = Vec::with_capacity(dense.len());
        for r in dense {
            if r.len() != ncols {
                return Err(Error::Shape("ragged matrix rows".into()));
            }
            let normalized: Result<Vec<Scalar>> = r.iter().map(|x| field.element(x)).collect();
            rows.push(SparseVec::from_dense(field, &normalized?));
        }
        Ok(FieldMatrix { field, nrows: dense.len(), ncols, rows })
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn row(&self, i: usize) -> &SparseVec {
        &self.rows[i]
    }

    pub fn get(&self, i: usize, j: usize) -> Scalar {
        self.rows[i].get(j)
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(SparseVec::is_zero)
    }

    pub fn transpose(&self) -> Self {
        FieldMatrix::from_columns(self.field, self.ncols, &self.rows)
    }

    pub fn columns(&self) -> Vec<SparseVec> {
        self.transpose().rows
    }

    pub fn apply(&self, v: &SparseVec) -> SparseVec {
        let terms = self.rows.iter().enumerate().filter_map(|(i, row)| {
            let mut acc = Scalar::zero();
            for (j, c) in row.iter() {
                let x = v.get(*j);
                if !x.is_zero() {
                    acc = self.field.add(&acc, &self.field.mul(c, &x));
                }
            }
            (!acc.is_zero()).then_some((i, acc))
        });
        SparseVec::from_terms(self.field, terms.collect::<Vec<_>>())
    }

    pub fn mul(&self, other: &FieldMatrix) -> Result<FieldMatrix> {
        if self.ncols != other.nrows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.nrows, self.ncols, other.nrows, other.ncols
            )));
        }
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let mut acc = Accumulator::new(self.field);
                for (k, c) in row.iter() {
                    acc.add_vec(c, &other.rows[*k]);
                }
                acc.finish()
            })
            .collect();
        Ok(FieldMatrix { field: self.field, nrows: self.nrows, ncols: other.ncols, rows })
    }

    pub fn row_echelon(&self) -> EchelonBasis {
        let mut e = EchelonBasis::new(self.field);
        for r in &self.rows {
            e.insert(r);
        }
        e
    }

    pub fn rank(&self) -> usize {
        // eliminate along the shorter side
        if self.nrows <= self.ncols {
            self.row_echelon().dim()
        } else {
            self.transpose().row_echelon().dim()
        }
    }

    /// Basis of `{v : M v = 0}`.
    pub fn kernel(&self) -> Vec<SparseVec> {
        let e = self.row_echelon();
        let pivots: Vec<usize> = e.pivots().collect();
        let mut is_pivot = vec![false; self.ncols];
        for p in &pivots {
            is_pivot[*p] = true;
        }
        (0..self.ncols)
            .filter(|f| !is_pivot[*f])
            .map(|f| {
                let mut terms = vec![(f, Scalar::one())];
                for (p, row) in e.rows() {
                    let c = row.get(f);
                    if !c.is_zero() {
                        terms.push((*p, self.field.neg(&c)));
                    }
                }
                SparseVec::from_terms(self.field, terms)
            })
            .collect()
    }

    /// Basis of the column span.
    pub fn image(&self) -> Vec<SparseVec> {
        let e = self.transpose().row_echelon();
        e.rows().values().cloned().collect()
    }
}

impl fmt::Display for FieldMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.nrows {
            let cells: Vec<String> = (0..self.ncols).map(|j| fmt_scalar(&self.get(i, j))).collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

/// Small helper used by reports: `Some(i64)` when the scalar is a machine integer.
pub fn scalar_to_i64(x: &Scalar) -> Option<i64> {
    if x.is_integer() {
        x.to_integer().to_i64()
    } else {
        None
    }
}

pub fn scalar_is_negative(x: &Scalar) -> bool {
    x.is_negative()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(v: &[i64]) -> Vec<Scalar> {
        v.iter().map(|x| int(*x)).collect()
    }

    #[test]
    fn parses_fields() {
        assert_eq!("Q".parse::<Field>().unwrap(), Field::Rational);
        assert_eq!("Fp:7".parse::<Field>().unwrap(), Field::Prime(7));
        assert!("Fp:8".parse::<Field>().is_err());
        assert!("R".parse::<Field>().is_err());
    }

    #[test]
    fn prime_field_arithmetic_is_canonical() {
        let f = Field::Prime(5);
        assert_eq!(f.add(&int(3), &int(4)), int(2));
        assert_eq!(f.neg(&int(1)), int(4));
        assert_eq!(f.inv(&int(2)).unwrap(), int(3));
        assert_eq!(f.element(&parse_scalar("1/2").unwrap()).unwrap(), int(3));
        assert!(f.element(&parse_scalar("1/5").unwrap()).is_err());
    }

    #[test]
    fn rank_and_kernel_over_q() {
        let m = FieldMatrix::from_dense(Field::Rational, &[q(&[1, 2, 3]), q(&[2, 4, 6])]).unwrap();
        assert_eq!(m.rank(), 1);
        let k = m.kernel();
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(m.apply(v).is_zero());
        }
    }

    #[test]
    fn rank_depends_on_characteristic() {
        let rows = [q(&[1, 1]), q(&[1, 3])];
        let over_q = FieldMatrix::from_dense(Field::Rational, &rows).unwrap();
        let over_f2 = FieldMatrix::from_dense(Field::Prime(2), &rows).unwrap();
        assert_eq!(over_q.rank(), 2);
        assert_eq!(over_f2.rank(), 1);
    }

    #[test]
    fn echelon_reduce_detects_membership() {
        let f = Field::Rational;
        let mut e = EchelonBasis::new(f);
        assert!(e.insert(&SparseVec::from_dense(f, &q(&[1, 1, 0]))));
        assert!(e.insert(&SparseVec::from_dense(f, &q(&[0, 1, 1]))));
        assert!(!e.insert(&SparseVec::from_dense(f, &q(&[1, 2, 1]))));
        assert!(!e.contains(&SparseVec::from_dense(f, &q(&[0, 0, 1]))));
        assert_eq!(e.dim(), 2);
    }
}
