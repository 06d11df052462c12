use crate::error::{Error, Result};
use crate::field::{EchelonBasis, Field, FieldMatrix, SparseVec};

/// Largest degree span a single complex may occupy.
pub const MAX_DEGREE_SPAN: i64 = 4096;

/// A bounded complex of finite-dimensional vector spaces, cohomologically graded.
///
/// `diffs[k]` is the differential from degree `lo + k` to `lo + k + 1`, as a
/// `dims[k + 1] x dims[k]` matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Complex {
    field: Field,
    lo: i32,
    dims: Vec<usize>,
    diffs: Vec<FieldMatrix>,
}

/// Position of each global basis element inside its degree piece.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedIndex {
    lo: i32,
    local: Vec<(i32, usize)>,
    by_degree: Vec<Vec<usize>>,
}

impl GradedIndex {
    pub fn degree_of(&self, global: usize) -> i32 {
        self.local[global].0
    }

    pub fn members(&self, degree: i32) -> &[usize] {
        let k = degree as i64 - self.lo as i64;
        if k < 0 || k as usize >= self.by_degree.len() {
            return &[];
        }
        &self.by_degree[k as usize]
    }

    /// Converts a vector of the degree-`degree` piece to global coordinates.
    pub fn globalize(&self, field: Field, degree: i32, v: &SparseVec) -> SparseVec {
        let members = self.members(degree);
        v.reindex(field, |i| members[i])
    }

    pub fn localize(&self, field: Field, v: &SparseVec) -> SparseVec {
        v.reindex(field, |g| self.local[g].1)
    }
}

/// `H^n`: its dimension and representative cocycles (in degree-`n` coordinates).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cohomology {
    pub degree: i32,
    pub dim: usize,
    pub representatives: Vec<SparseVec>,
}

impl Complex {
    pub fn zero(field: Field) -> Self {
        Complex { field, lo: 0, dims: Vec::new(), diffs: Vec::new() }
    }

    /// One copy of the field in degree `degree`.
    pub fn unit(field: Field, degree: i32) -> Self {
        Complex { field, lo: degree, dims: vec![1], diffs: Vec::new() }
    }

    /// From explicit pieces; checks shapes and `d ∘ d = 0`.
    pub fn new(field: Field, lo: i32, dims: Vec<usize>, diffs: Vec<FieldMatrix>) -> Result<Self> {
        let expected = dims.len().saturating_sub(1);
        if diffs.len() != expected {
            return Err(Error::Shape(format!("{} differentials for {} pieces", diffs.len(), dims.len())));
        }
        for (k, d) in diffs.iter().enumerate() {
            if d.nrows() != dims[k + 1] || d.ncols() != dims[k] {
                return Err(Error::Shape(format!("differential out of degree {} has the wrong shape", lo as i64 + k as i64)));
            }
        }
        for k in 1..diffs.len() {
            if !diffs[k].mul(&diffs[k - 1])?.is_zero() {
                return Err(Error::Axiom(format!("d∘d ≠ 0 out of degree {}", lo as i64 + k as i64 - 1)));
            }
        }
        Ok(Complex { field, lo, dims, diffs })
    }

    /// Builds a complex from a graded basis and the differential of each basis
    /// element (as a combination of basis elements of one degree higher).
    pub fn from_basis(
        field: Field,
        degrees: &[i32],
        differential: impl Fn(usize) -> SparseVec,
    ) -> Result<(Complex, GradedIndex)> {
        if degrees.is_empty() {
            let index = GradedIndex { lo: 0, local: Vec::new(), by_degree: Vec::new() };
            return Ok((Complex::zero(field), index));
        }
        let lo = *degrees.iter().min().unwrap();
        let hi = *degrees.iter().max().unwrap();
        if hi as i64 - lo as i64 >= MAX_DEGREE_SPAN {
            return Err(Error::DegreeOverflow(format!("complex spans degrees {lo}..={hi}")));
        }
        let span = (hi - lo + 1) as usize;
        let mut by_degree = vec![Vec::new(); span];
        let mut local = Vec::with_capacity(degrees.len());
        for (g, &deg) in degrees.iter().enumerate() {
            let slot = &mut by_degree[(deg - lo) as usize];
            local.push((deg, slot.len()));
            slot.push(g);
        }
        let dims: Vec<usize> = by_degree.iter().map(Vec::len).collect();
        let mut diffs = Vec::with_capacity(span.saturating_sub(1));
        for k in 0..span {
            let mut columns = Vec::with_capacity(dims[k]);
            for &g in &by_degree[k] {
                let dv = differential(g);
                for (t, _) in dv.iter() {
                    if degrees[*t] != degrees[g] + 1 {
                        return Err(Error::Axiom(format!(
                            "differential of a degree-{} element has a degree-{} component",
                            degrees[g], degrees[*t]
                        )));
                    }
                }
                columns.push(dv.reindex(field, |t| local[t].1));
            }
            if k + 1 < span {
                diffs.push(FieldMatrix::from_columns(field, dims[k + 1], &columns));
            } else if columns.iter().any(|c| !c.is_zero()) {
                unreachable!("checked above: components have degree + 1");
            }
        }
        let complex = Complex::new(field, lo, dims, diffs)?;
        Ok((complex, GradedIndex { lo, local, by_degree }))
    }

    pub fn field(&self) -> Field {
        self.field
    }

    /// Lowest degree of the stored window (0 for the zero complex).
    pub fn lo(&self) -> i32 {
        self.lo
    }

    pub fn hi(&self) -> i32 {
        self.lo + self.dims.len() as i32 - 1
    }

    pub fn degrees(&self) -> impl Iterator<Item = i32> + '_ {
        (0..self.dims.len()).map(move |k| self.lo + k as i32)
    }

    fn slot(&self, n: i32) -> Option<usize> {
        let k = n as i64 - self.lo as i64;
        (k >= 0 && (k as usize) < self.dims.len()).then_some(k as usize)
    }

    pub fn dim(&self, n: i32) -> usize {
        self.slot(n).map_or(0, |k| self.dims[k])
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    /// Differential out of degree `n`, or `None` when it is the zero map between
    /// (possibly empty) pieces outside the window.
    pub fn differential(&self, n: i32) -> Option<&FieldMatrix> {
        self.slot(n).and_then(|k| self.diffs.get(k))
    }

    fn rank_out_of(&self, n: i32) -> usize {
        self.differential(n).map_or(0, FieldMatrix::rank)
    }

    pub fn cohomology_dim(&self, n: i32) -> usize {
        let dim = self.dim(n);
        if dim == 0 {
            return 0;
        }
        dim - self.rank_out_of(n) - self.rank_out_of(n - 1)
    }

    pub fn cohomology(&self, n: i32) -> Cohomology {
        let dim = self.dim(n);
        if dim == 0 {
            return Cohomology { degree: n, dim: 0, representatives: Vec::new() };
        }
        let cycles = match self.differential(n) {
            Some(d) => d.kernel(),
            None => (0..dim).map(SparseVec::unit).collect(),
        };
        let mut span = EchelonBasis::new(self.field);
        if let Some(d) = self.differential(n - 1) {
            for b in d.image() {
                span.insert(&b);
            }
        }
        let representatives: Vec<SparseVec> = cycles.into_iter().filter(|z| span.insert(z)).collect();
        Cohomology { degree: n, dim: representatives.len(), representatives }
    }

    /// The class of a cocycle is zero iff it lies in the image of `d^{n-1}`.
    pub fn is_coboundary(&self, n: i32, v: &SparseVec) -> bool {
        if v.is_zero() {
            return true;
        }
        match self.differential(n - 1) {
            Some(d) => {
                let mut span = EchelonBasis::new(self.field);
                for b in d.image() {
                    span.insert(&b);
                }
                span.contains(v)
            }
            None => false,
        }
    }

    pub fn is_acyclic(&self) -> bool {
        self.degrees().all(|n| self.cohomology_dim(n) == 0)
    }

    /// `Σ (-1)^n dim C^n`.
    pub fn euler_char(&self) -> i64 {
        self.degrees().map(|n| sign(n) * self.dim(n) as i64).sum()
    }

    /// `Σ (-1)^n dim H^n`.
    pub fn euler_char_from_cohomology(&self) -> i64 {
        self.degrees().map(|n| sign(n) * self.cohomology_dim(n) as i64).sum()
    }

    /// Same pieces and differentials, every degree raised by `offset`.
    pub fn regraded(&self, offset: i32) -> Result<Self> {
        let lo = self
            .lo
            .checked_add(offset)
            .ok_or_else(|| Error::DegreeOverflow(format!("regrading by {offset}")))?;
        Ok(Complex { lo: if self.dims.is_empty() { 0 } else { lo }, ..self.clone() })
    }

    /// Compares dimensions and differentials; empty pieces at either end are ignored.
    pub fn same_as(&self, other: &Complex) -> bool {
        let trim = |c: &Complex| -> (i32, Vec<usize>, Vec<FieldMatrix>) {
            let first = c.dims.iter().position(|&d| d > 0);
            let last = c.dims.iter().rposition(|&d| d > 0);
            match (first, last) {
                (Some(f), Some(l)) => (c.lo + f as i32, c.dims[f..=l].to_vec(), c.diffs[f..l].to_vec()),
                _ => (0, Vec::new(), Vec::new()),
            }
        };
        trim(self) == trim(other)
    }
}

fn sign(n: i32) -> i64 {
    if n.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}
