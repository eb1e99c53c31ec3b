use std::fmt;

use itertools::Itertools;
use num::Zero;

use super::field::{Field, Scalar};
use crate::error::{Error, Result};

/// Sparse matrix over a [`Field`], stored as row-major sorted triplets with
/// no zeros and no duplicate positions.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    field: Field,
    rows: usize,
    cols: usize,
    entries: Vec<(usize, usize, Scalar)>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} over {}", self.rows, self.cols, self.field)?;
        if self.rows * self.cols <= 400 {
            for row in self.to_dense() {
                writeln!(f, "  [{}]", row.iter().map(Field::format).join(", "))?;
            }
        } else {
            writeln!(f, "  {} nonzeros", self.entries.len())?;
        }
        Ok(())
    }
}

impl Matrix {
    pub fn zeros(field: Field, rows: usize, cols: usize) -> Matrix {
        Matrix {
            field,
            rows,
            cols,
            entries: Vec::new(),
        }
    }

    pub fn identity(field: Field, n: usize) -> Matrix {
        Matrix {
            field,
            rows: n,
            cols: n,
            entries: (0..n).map(|i| (i, i, field.one())).collect(),
        }
    }

    /// Builds a matrix from arbitrary triplets; duplicates are summed and values reduced
    /// into the field.
    pub fn from_triplets<I>(field: Field, rows: usize, cols: usize, triplets: I) -> Result<Matrix>
    where
        I: IntoIterator<Item = (usize, usize, Scalar)>,
    {
        let mut raw: Vec<(usize, usize, Scalar)> = Vec::new();
        for (r, c, v) in triplets {
            if r >= rows || c >= cols {
                return Err(Error::Shape(format!(
                    "entry ({r},{c}) outside {rows}x{cols}"
                )));
            }
            raw.push((r, c, field.reduce(&v)?));
        }
        Ok(Self::assemble(field, rows, cols, raw))
    }

    /// Same as [`Matrix::from_triplets`] for values already canonical in `field`.
    pub(crate) fn assemble(
        field: Field,
        rows: usize,
        cols: usize,
        mut raw: Vec<(usize, usize, Scalar)>,
    ) -> Matrix {
        raw.sort_by_key(|a| (a.0, a.1));
        let mut entries: Vec<(usize, usize, Scalar)> = Vec::with_capacity(raw.len());
        for (r, c, v) in raw {
            match entries.last_mut() {
                Some(last) if last.0 == r && last.1 == c => {
                    last.2 = field.add(&last.2, &v);
                }
                _ => entries.push((r, c, v)),
            }
        }
        entries.retain(|e| !e.2.is_zero());
        Matrix {
            field,
            rows,
            cols,
            entries,
        }
    }

    pub fn from_dense(field: Field, rows: usize, cols: usize, data: &[Scalar]) -> Result<Matrix> {
        if data.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{} values for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Self::from_triplets(
            field,
            rows,
            cols,
            data.iter()
                .enumerate()
                .map(|(i, v)| (i / cols.max(1), i % cols.max(1), v.clone())),
        )
    }

    pub fn from_i64(field: Field, rows: &[&[i64]]) -> Matrix {
        let n = rows.len();
        let m = rows.first().map_or(0, |r| r.len());
        let mut raw = Vec::new();
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), m, "ragged matrix literal");
            for (j, v) in row.iter().enumerate() {
                raw.push((i, j, field.from_i64(*v)));
            }
        }
        Self::assemble(field, n, m, raw)
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn entries(&self) -> &[(usize, usize, Scalar)] {
        &self.entries
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, r: usize, c: usize) -> Scalar {
        match self.entries.binary_search_by(|e| (e.0, e.1).cmp(&(r, c))) {
            Ok(i) => self.entries[i].2.clone(),
            Err(_) => Scalar::zero(),
        }
    }

    pub fn to_dense(&self) -> Vec<Vec<Scalar>> {
        let mut out = vec![vec![Scalar::zero(); self.cols]; self.rows];
        for (r, c, v) in &self.entries {
            out[*r][*c] = v.clone();
        }
        out
    }

    /// Row-major dense values, used by the JSON layer.
    pub fn to_flat(&self) -> Vec<Scalar> {
        self.to_dense().into_iter().flatten().collect()
    }

    pub fn transpose(&self) -> Matrix {
        let raw = self
            .entries
            .iter()
            .map(|(r, c, v)| (*c, *r, v.clone()))
            .collect();
        Self::assemble(self.field, self.cols, self.rows, raw)
    }

    pub fn row_lists(&self) -> Vec<Vec<(usize, Scalar)>> {
        let mut out = vec![Vec::new(); self.rows];
        for (r, c, v) in &self.entries {
            out[*r].push((*c, v.clone()));
        }
        out
    }

    pub fn col_lists(&self) -> Vec<Vec<(usize, Scalar)>> {
        let mut out = vec![Vec::new(); self.cols];
        for (r, c, v) in &self.entries {
            out[*c].push((*r, v.clone()));
        }
        out
    }

    fn check_field(&self, other: &Matrix) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch(format!(
                "{} vs {}",
                self.field, other.field
            )));
        }
        Ok(())
    }

    /// `self * other`.
    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        self.check_field(other)?;
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let f = self.field;
        let rhs = other.row_lists();
        let mut raw = Vec::new();
        for (r, k, a) in &self.entries {
            for (c, b) in &rhs[*k] {
                raw.push((*r, *c, f.mul(a, b)));
            }
        }
        Ok(Self::assemble(f, self.rows, other.cols, raw))
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        self.check_field(other)?;
        if self.shape() != other.shape() {
            return Err(Error::Shape(format!(
                "cannot add {:?} and {:?}",
                self.shape(),
                other.shape()
            )));
        }
        let mut raw = self.entries.clone();
        raw.extend(other.entries.iter().cloned());
        Ok(Self::assemble(self.field, self.rows, self.cols, raw))
    }

    pub fn neg(&self) -> Matrix {
        let f = self.field;
        Matrix {
            field: f,
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .map(|(r, c, v)| (*r, *c, f.neg(v)))
                .collect(),
        }
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix> {
        self.add(&other.neg())
    }

    pub fn scale(&self, s: &Scalar) -> Matrix {
        let f = self.field;
        let raw = self
            .entries
            .iter()
            .map(|(r, c, v)| (*r, *c, f.mul(v, s)))
            .collect();
        Self::assemble(f, self.rows, self.cols, raw)
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Matrix) -> Result<Matrix> {
        self.check_field(other)?;
        let f = self.field;
        let mut raw = Vec::with_capacity(self.nnz() * other.nnz());
        for (r1, c1, a) in &self.entries {
            for (r2, c2, b) in &other.entries {
                raw.push((r1 * other.rows + r2, c1 * other.cols + c2, f.mul(a, b)));
            }
        }
        Ok(Self::assemble(
            f,
            self.rows * other.rows,
            self.cols * other.cols,
            raw,
        ))
    }

    /// Submatrix with the given rows and columns (in the given order).
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Matrix {
        let mut rmap = vec![usize::MAX; self.rows];
        for (i, r) in rows.iter().enumerate() {
            rmap[*r] = i;
        }
        let mut cmap = vec![usize::MAX; self.cols];
        for (j, c) in cols.iter().enumerate() {
            cmap[*c] = j;
        }
        let raw = self
            .entries
            .iter()
            .filter(|(r, c, _)| rmap[*r] != usize::MAX && cmap[*c] != usize::MAX)
            .map(|(r, c, v)| (rmap[*r], cmap[*c], v.clone()))
            .collect();
        Self::assemble(self.field, rows.len(), cols.len(), raw)
    }

    /// Columns `[a, b)`.
    pub fn column_range(&self, a: usize, b: usize) -> Matrix {
        let cols: Vec<usize> = (a..b).collect();
        let rows: Vec<usize> = (0..self.rows).collect();
        self.select(&rows, &cols)
    }

    pub fn hstack(&self, other: &Matrix) -> Result<Matrix> {
        self.check_field(other)?;
        if self.rows != other.rows {
            return Err(Error::Shape("hstack row mismatch".into()));
        }
        let mut raw = self.entries.clone();
        raw.extend(
            other
                .entries
                .iter()
                .map(|(r, c, v)| (*r, c + self.cols, v.clone())),
        );
        Ok(Self::assemble(
            self.field,
            self.rows,
            self.cols + other.cols,
            raw,
        ))
    }
}

/// Accumulates blocks into a large sparse matrix.
pub struct MatrixBuilder {
    field: Field,
    rows: usize,
    cols: usize,
    raw: Vec<(usize, usize, Scalar)>,
}

impl MatrixBuilder {
    pub fn new(field: Field, rows: usize, cols: usize) -> Self {
        MatrixBuilder {
            field,
            rows,
            cols,
            raw: Vec::new(),
        }
    }

    pub fn push(&mut self, r: usize, c: usize, v: Scalar) {
        debug_assert!(r < self.rows && c < self.cols);
        if !v.is_zero() {
            self.raw.push((r, c, v));
        }
    }

    /// Adds `coeff * block` with its top-left corner at `(r0, c0)`.
    pub fn push_block(&mut self, r0: usize, c0: usize, block: &Matrix, coeff: &Scalar) {
        let f = self.field;
        let one = num::One::is_one(coeff);
        for (r, c, v) in block.entries() {
            let val = if one { v.clone() } else { f.mul(v, coeff) };
            self.push(r0 + r, c0 + c, val);
        }
    }

    /// Adds `coeff * I_n` at `(r0, c0)`.
    pub fn push_identity(&mut self, r0: usize, c0: usize, n: usize, coeff: &Scalar) {
        for i in 0..n {
            self.push(r0 + i, c0 + i, coeff.clone());
        }
    }

    pub fn build(self) -> Matrix {
        Matrix::assemble(self.field, self.rows, self.cols, self.raw)
    }
}
