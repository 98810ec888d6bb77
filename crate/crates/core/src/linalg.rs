//! Dense complex kets and operators for the small dimensions used here
//! (N ≤ 21, N² ≤ 441).
//!
//! Tensor products follow the row-major convention: the index of
//! `|i⟩ ⊗ |j⟩` is `i·dim_b + j`. Equality is always tolerance based on the
//! largest absolute entry difference.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Default absolute tolerance on matrix entries.
pub const DEFAULT_TOL: f64 = 1e-9;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

fn max_abs_diff<'a>(a: impl Iterator<Item = &'a C64>, b: impl Iterator<Item = &'a C64>) -> f64 {
    a.zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ket {
    amps: DVector<C64>,
}

impl Ket {
    pub fn from_vec(amps: Vec<C64>) -> Self {
        Self {
            amps: DVector::from_vec(amps),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            amps: DVector::zeros(dim),
        }
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        let mut k = Self::zeros(dim);
        k.amps[index] = ONE;
        k
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[C64] {
        self.amps.as_slice()
    }

    pub fn as_vector(&self) -> &DVector<C64> {
        &self.amps
    }

    pub fn get(&self, i: usize) -> C64 {
        self.amps[i]
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Ket) -> C64 {
        self.amps.dotc(&other.amps)
    }

    pub fn norm(&self) -> f64 {
        self.amps.norm()
    }

    pub fn normalized(&self) -> Ket {
        Ket {
            amps: self.amps.normalize(),
        }
    }

    /// Entrywise complex conjugate in the computational basis.
    pub fn conj(&self) -> Ket {
        Ket {
            amps: self.amps.map(|c| c.conj()),
        }
    }

    pub fn scale(&self, s: C64) -> Ket {
        Ket {
            amps: &self.amps * s,
        }
    }

    pub fn add_scaled(&mut self, s: C64, other: &Ket) {
        self.amps.axpy(s, &other.amps, ONE);
    }

    pub fn tensor(&self, other: &Ket) -> Ket {
        Ket {
            amps: self.amps.kronecker(&other.amps),
        }
    }

    /// `|self⟩⟨self|`.
    pub fn projector(&self) -> Operator {
        Operator {
            mat: &self.amps * self.amps.adjoint(),
        }
    }

    /// `|self⟩⟨other|`.
    pub fn outer(&self, other: &Ket) -> Operator {
        Operator {
            mat: &self.amps * other.amps.adjoint(),
        }
    }

    pub fn max_abs_diff(&self, other: &Ket) -> f64 {
        if self.dim() != other.dim() {
            return f64::INFINITY;
        }
        max_abs_diff(self.amps.iter(), other.amps.iter())
    }

    pub fn approx_eq(&self, other: &Ket, tol: f64) -> bool {
        self.max_abs_diff(other) <= tol
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.norm() - 1.0).abs() <= tol
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    mat: DMatrix<C64>,
}

impl Operator {
    pub fn from_matrix(mat: DMatrix<C64>) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::DimensionMismatch(mat.nrows(), mat.ncols()));
        }
        Ok(Self { mat })
    }

    /// Row-major entries.
    pub fn from_rows(dim: usize, entries: &[C64]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch(entries.len(), dim * dim));
        }
        Ok(Self {
            mat: DMatrix::from_row_slice(dim, dim, entries),
        })
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        Self {
            mat: DMatrix::from_fn(dim, dim, f),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            mat: DMatrix::zeros(dim, dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            mat: DMatrix::identity(dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.mat[(row, col)]
    }

    pub fn set(&mut self, row: usize, col: usize, value: C64) {
        self.mat[(row, col)] = value;
    }

    /// Column `k` as a ket.
    pub fn column(&self, k: usize) -> Ket {
        Ket {
            amps: self.mat.column(k).into_owned(),
        }
    }

    pub fn from_columns(kets: &[Ket]) -> Self {
        let cols: Vec<_> = kets.iter().map(|k| k.amps.clone()).collect();
        Self {
            mat: DMatrix::from_columns(&cols),
        }
    }

    pub fn adjoint(&self) -> Operator {
        Operator {
            mat: self.mat.adjoint(),
        }
    }

    pub fn conj(&self) -> Operator {
        Operator {
            mat: self.mat.map(|c| c.conj()),
        }
    }

    pub fn trace(&self) -> C64 {
        self.mat.trace()
    }

    pub fn scale(&self, s: C64) -> Operator {
        Operator { mat: &self.mat * s }
    }

    pub fn add_scaled(&mut self, s: C64, other: &Operator) {
        self.mat += &other.mat * s;
    }

    pub fn apply(&self, ket: &Ket) -> Ket {
        Ket {
            amps: &self.mat * &ket.amps,
        }
    }

    pub fn tensor(&self, other: &Operator) -> Operator {
        Operator {
            mat: self.mat.kronecker(&other.mat),
        }
    }

    pub fn max_abs_diff(&self, other: &Operator) -> f64 {
        if self.dim() != other.dim() {
            return f64::INFINITY;
        }
        max_abs_diff(self.mat.iter(), other.mat.iter())
    }

    pub fn approx_eq(&self, other: &Operator, tol: f64) -> bool {
        self.max_abs_diff(other) <= tol
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        (&self.adjoint() * self).approx_eq(&Operator::identity(self.dim()), tol)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.approx_eq(&self.adjoint(), tol)
    }

    /// Row-major copy of the entries.
    pub fn to_rows(&self) -> Vec<C64> {
        self.mat.transpose().as_slice().to_vec()
    }
}

impl std::ops::Mul for &Operator {
    type Output = Operator;

    fn mul(self, rhs: &Operator) -> Operator {
        Operator {
            mat: &self.mat * &rhs.mat,
        }
    }
}

impl std::ops::Add for &Operator {
    type Output = Operator;

    fn add(self, rhs: &Operator) -> Operator {
        Operator {
            mat: &self.mat + &rhs.mat,
        }
    }
}

impl std::ops::Sub for &Operator {
    type Output = Operator;

    fn sub(self, rhs: &Operator) -> Operator {
        Operator {
            mat: &self.mat - &rhs.mat,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    First,
    Second,
}

/// Traces out `subsystem` of an operator on an N²-dimensional space.
pub fn partial_trace(op: &Operator, subsystem: Subsystem) -> Result<Operator> {
    let big = op.dim();
    let n = (big as f64).sqrt().round() as usize;
    if n * n != big {
        return Err(Error::NotSquare(big));
    }
    let out = Operator::from_fn(n, |r, c| {
        (0..n)
            .map(|t| match subsystem {
                Subsystem::First => op.get(t * n + r, t * n + c),
                Subsystem::Second => op.get(r * n + t, c * n + t),
            })
            .sum()
    });
    Ok(out)
}

/// Hilbert–Schmidt inner product `Tr(a†·b)`.
pub fn hs_inner(a: &Operator, b: &Operator) -> Result<C64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(a.dim(), b.dim()));
    }
    Ok(a.mat
        .iter()
        .zip(b.mat.iter())
        .map(|(x, y)| x.conj() * y)
        .sum())
}

/// Serde adapter: complex values as `[re, im]` pairs.
pub mod serde_complex {
    use super::*;

    pub fn pair(c: &C64) -> [f64; 2] {
        [c.re, c.im]
    }

    pub fn serialize<S: Serializer>(c: &C64, s: S) -> std::result::Result<S::Ok, S::Error> {
        pair(c).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<C64, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        Ok(C64::new(re, im))
    }
}

impl Serialize for Ket {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<[f64; 2]> = self.amps.iter().map(serde_complex::pair).collect();
        v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Ket {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<[f64; 2]>::deserialize(d)?;
        Ok(Ket::from_vec(
            v.into_iter().map(|[re, im]| C64::new(re, im)).collect(),
        ))
    }
}

/// Operators serialize as a list of rows, each a list of `[re, im]` pairs.
impl Serialize for Operator {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<[f64; 2]>> = (0..self.dim())
            .map(|r| {
                (0..self.dim())
                    .map(|c| serde_complex::pair(&self.get(r, c)))
                    .collect()
            })
            .collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Operator {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<[f64; 2]>>::deserialize(d)?;
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(D::Error::custom("operator rows must form a square matrix"));
        }
        let entries: Vec<C64> = rows
            .into_iter()
            .flatten()
            .map(|[re, im]| C64::new(re, im))
            .collect();
        Operator::from_rows(dim, &entries).map_err(D::Error::custom)
    }
}
