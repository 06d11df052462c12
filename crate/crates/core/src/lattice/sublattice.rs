use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::IntMatrix;
use crate::error::{Error, Result};

/// Row-style Hermite normal form of a list of generators.
///
/// The result has strictly increasing pivot positions, positive pivots, and
/// every entry above a pivot reduced into `[0, pivot)`. Zero rows are dropped,
/// so the output is the canonical basis of the generated lattice.
pub fn hermite_basis(ambient: usize, generators: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let mut rows: Vec<Vec<BigInt>> =
        generators.iter().filter(|g| g.iter().any(|x| !x.is_zero())).cloned().collect();
    let mut r = 0;
    for c in 0..ambient {
        if r == rows.len() {
            break;
        }
        loop {
            // smallest nonzero |entry| in column c among rows r..
            let pivot = (r..rows.len())
                .filter(|&i| !rows[i][c].is_zero())
                .min_by(|&a, &b| rows[a][c].abs().cmp(&rows[b][c].abs()).then(a.cmp(&b)));
            let Some(p) = pivot else { break };
            rows.swap(r, p);
            let mut done = true;
            for i in r + 1..rows.len() {
                if rows[i][c].is_zero() {
                    continue;
                }
                let q = rows[i][c].div_floor(&rows[r][c]);
                let pivot_row = rows[r].clone();
                for (x, y) in rows[i].iter_mut().zip(&pivot_row) {
                    *x -= &q * y;
                }
                if !rows[i][c].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if r < rows.len() && !rows[r][c].is_zero() {
            if rows[r][c].is_negative() {
                for x in rows[r].iter_mut() {
                    *x = -&*x;
                }
            }
            let pivot_row = rows[r].clone();
            for i in 0..r {
                let q = rows[i][c].div_floor(&pivot_row[c]);
                if !q.is_zero() {
                    for (x, y) in rows[i].iter_mut().zip(&pivot_row) {
                        *x -= &q * y;
                    }
                }
            }
            r += 1;
        }
    }
    rows.truncate(r);
    rows.retain(|row| row.iter().any(|x| !x.is_zero()));
    rows
}

/// A sublattice of `Z^n`, stored by its Hermite basis (columns of `basis`).
///
/// Two sublattices are equal iff their stored data is equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Sublattice {
    ambient: usize,
    basis: IntMatrix,
}

impl Sublattice {
    pub fn from_generators(ambient: usize, generators: &[Vec<BigInt>]) -> Result<Self> {
        if let Some(g) = generators.iter().find(|g| g.len() != ambient) {
            return Err(Error::Shape(format!(
                "generator of length {} in ambient rank {ambient}",
                g.len()
            )));
        }
        let rows = hermite_basis(ambient, generators);
        Ok(Sublattice { ambient, basis: IntMatrix::from_columns(ambient, &rows) })
    }

    pub fn zero(ambient: usize) -> Self {
        Sublattice { ambient, basis: IntMatrix::zeros(ambient, 0) }
    }

    pub fn full(ambient: usize) -> Self {
        Sublattice { ambient, basis: IntMatrix::identity(ambient) }
    }

    pub fn from_columns_of(m: &IntMatrix) -> Self {
        Self::from_generators(m.rows(), &m.columns()).expect("columns have the ambient length")
    }

    pub fn ambient_rank(&self) -> usize {
        self.ambient
    }

    pub fn rank(&self) -> usize {
        self.basis.cols()
    }

    pub fn is_zero(&self) -> bool {
        self.rank() == 0
    }

    pub fn basis(&self) -> &IntMatrix {
        &self.basis
    }

    pub fn basis_vectors(&self) -> Vec<Vec<BigInt>> {
        self.basis.columns()
    }

    /// Coefficients of `v` in the stored basis, if `v` lies in the lattice.
    pub fn coordinates(&self, v: &[BigInt]) -> Option<Vec<BigInt>> {
        if v.len() != self.ambient {
            return None;
        }
        let mut rem = v.to_vec();
        let mut coeffs = Vec::with_capacity(self.rank());
        for b in self.basis_vectors() {
            let p = b.iter().position(|x| !x.is_zero()).expect("basis vectors are nonzero");
            if rem[..p].iter().any(|x| !x.is_zero()) {
                return None;
            }
            let (q, r) = rem[p].div_rem(&b[p]);
            if !r.is_zero() {
                return None;
            }
            for (x, y) in rem.iter_mut().zip(&b) {
                *x -= &q * y;
            }
            coeffs.push(q);
        }
        rem.iter().all(Zero::is_zero).then_some(coeffs)
    }

    pub fn contains(&self, v: &[BigInt]) -> bool {
        self.coordinates(v).is_some()
    }

    pub fn contains_lattice(&self, other: &Sublattice) -> bool {
        self.ambient == other.ambient && other.basis_vectors().iter().all(|v| self.contains(v))
    }

    fn check_ambient(&self, other: &Sublattice) -> Result<()> {
        if self.ambient != other.ambient {
            return Err(Error::Shape(format!(
                "sublattices of Z^{} and Z^{}",
                self.ambient, other.ambient
            )));
        }
        Ok(())
    }

    pub fn sum(&self, other: &Sublattice) -> Result<Sublattice> {
        self.check_ambient(other)?;
        let mut gens = self.basis_vectors();
        gens.extend(other.basis_vectors());
        Sublattice::from_generators(self.ambient, &gens)
    }

    /// Image of the lattice under `m` (a `k x ambient` matrix).
    pub fn image_under(&self, m: &IntMatrix) -> Result<Sublattice> {
        if m.cols() != self.ambient {
            return Err(Error::Shape(format!(
                "{}x{} matrix applied to a sublattice of Z^{}",
                m.rows(),
                m.cols(),
                self.ambient
            )));
        }
        let gens: Result<Vec<Vec<BigInt>>> = self.basis_vectors().iter().map(|v| m.apply(v)).collect();
        Sublattice::from_generators(m.rows(), &gens?)
    }

    /// `[other : self]` when `self` is a finite-index sublattice of `other`.
    pub fn index_in(&self, other: &Sublattice) -> Option<BigInt> {
        if !other.contains_lattice(self) || self.rank() != other.rank() {
            return None;
        }
        let coords: Vec<Vec<BigInt>> =
            self.basis_vectors().iter().map(|v| other.coordinates(v).expect("contained")).collect();
        let m = IntMatrix::from_columns(other.rank(), &coords);
        m.determinant().ok().map(|d| d.abs())
    }
}
