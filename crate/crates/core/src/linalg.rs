//! Dense exact linear algebra over a [`Field`].
//!
//! Elimination always pivots on the first nonzero entry of a column, so
//! echelon forms, kernels and inverses are reproducible bit for bit.

use std::fmt;

use thiserror::Error;

use crate::field::{Field, FieldError, FieldValue};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("dimension mismatch: {0}")]
    Shape(String),
    #[error("matrix is singular")]
    Singular,
    #[error(transparent)]
    Field(#[from] FieldError),
}

pub type Vector = Vec<FieldValue>;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Matrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<FieldValue>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix<{}>{}x{} [", self.field, self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|v| v.to_string()).collect();
            write!(f, "[{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl Matrix {
    pub fn zeros(field: Field, rows: usize, cols: usize) -> Self {
        Matrix {
            field,
            rows,
            cols,
            data: vec![field.zero(); rows * cols],
        }
    }

    pub fn identity(field: Field, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = field.one();
        }
        m
    }

    pub fn from_rows(field: Field, rows: &[Vector]) -> Result<Self, LinalgError> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(LinalgError::Shape("ragged rows".into()));
            }
            for v in r {
                if v.field() != field {
                    return Err(FieldError::MixedFields {
                        left: field,
                        right: v.field(),
                    }
                    .into());
                }
                data.push(v.clone());
            }
        }
        Ok(Matrix {
            field,
            rows: rows.len(),
            cols,
            data,
        })
    }

    /// Builds an `n × k` matrix whose columns are the given vectors.
    pub fn from_columns(field: Field, n: usize, columns: &[Vector]) -> Result<Self, LinalgError> {
        if columns.iter().any(|c| c.len() != n) {
            return Err(LinalgError::Shape(format!("columns must have length {n}")));
        }
        let t = Self::from_rows(field, columns)?;
        if columns.is_empty() {
            return Ok(Self::zeros(field, n, 0));
        }
        Ok(t.transpose())
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

    pub fn get(&self, i: usize, j: usize) -> &FieldValue {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: FieldValue) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[FieldValue] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vector {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vector> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        t
    }

    /// Concatenates columns `[self | other]`.
    pub fn hstack(&self, other: &Matrix) -> Result<Self, LinalgError> {
        if self.rows != other.rows {
            return Err(LinalgError::Shape("hstack row counts differ".into()));
        }
        let mut cols = self.columns();
        cols.extend(other.columns());
        Self::from_columns(self.field, self.rows, &cols)
    }

    pub fn mul(&self, other: &Matrix) -> Result<Self, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::Shape(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.field, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let prod = a * other.get(k, j);
                    out.data[i * other.cols + j] += &prod;
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[FieldValue]) -> Result<Vector, LinalgError> {
        if v.len() != self.cols {
            return Err(LinalgError::Shape(format!(
                "vector of length {} against {} columns",
                v.len(),
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|i| {
                let mut acc = self.field.zero();
                for (a, b) in self.row(i).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc += &(a * b);
                    }
                }
                acc
            })
            .collect())
    }

    /// Reduced row echelon form and the pivot column of each nonzero row.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let pivots = m.rref_in_place();
        (m, pivots)
    }

    fn rref_in_place(&mut self) -> Vec<usize> {
        let (rows, cols) = (self.rows, self.cols);
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..cols {
            if r == rows {
                break;
            }
            let Some(p) = (r..rows).find(|&i| !self.get(i, c).is_zero()) else {
                continue;
            };
            if p != r {
                for j in 0..cols {
                    self.data.swap(p * cols + j, r * cols + j);
                }
            }
            let inv = self.get(r, c).inv().expect("pivot is nonzero");
            for j in c..cols {
                let v = self.get(r, j) * &inv;
                self.set(r, j, v);
            }
            for i in 0..rows {
                if i == r {
                    continue;
                }
                let factor = self.get(i, c).clone();
                if factor.is_zero() {
                    continue;
                }
                for j in c..cols {
                    let sub = &factor * self.get(r, j);
                    if !sub.is_zero() {
                        self.data[i * cols + j] -= &sub;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right kernel `{v : M v = 0}`, one vector per free column
    /// in increasing column order, each with a 1 in its free column.
    pub fn kernel(&self) -> Vec<Vector> {
        let (r, pivots) = self.rref();
        let mut is_pivot = vec![None; self.cols];
        for (row, &c) in pivots.iter().enumerate() {
            is_pivot[c] = Some(row);
        }
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if is_pivot[free].is_some() {
                continue;
            }
            let mut v = vec![self.field.zero(); self.cols];
            v[free] = self.field.one();
            for (row, &c) in pivots.iter().enumerate() {
                v[c] = -r.get(row, free);
            }
            basis.push(v);
        }
        basis
    }

    pub fn inverse(&self) -> Result<Matrix, LinalgError> {
        if self.rows != self.cols {
            return Err(LinalgError::Shape("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        let aug = self.hstack(&Matrix::identity(self.field, n))?;
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return Err(LinalgError::Singular);
        }
        let mut inv = Matrix::zeros(self.field, n, n);
        for i in 0..n {
            for j in 0..n {
                inv.set(i, j, r.get(i, n + j).clone());
            }
        }
        Ok(inv)
    }

    /// One solution of `M x = b` (free variables set to zero), or `None`
    /// when the system is inconsistent.
    pub fn solve(&self, b: &[FieldValue]) -> Result<Option<Vector>, LinalgError> {
        if b.len() != self.rows {
            return Err(LinalgError::Shape("right-hand side length".into()));
        }
        let rhs = Matrix::from_columns(self.field, self.rows, &[b.to_vec()])?;
        let aug = self.hstack(&rhs)?;
        let (r, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return Ok(None);
        }
        let mut x = vec![self.field.zero(); self.cols];
        for (row, &c) in pivots.iter().enumerate() {
            x[c] = r.get(row, self.cols).clone();
        }
        Ok(Some(x))
    }
}

/// Incrementally maintained reduced basis of a span, used for rank and
/// membership tests with early exit.
#[derive(Debug, Clone)]
pub struct SpanBasis {
    field: Field,
    dim: usize,
    // (pivot column, row with 1 at pivot and 0 at every other stored pivot)
    rows: Vec<(usize, Vector)>,
}

impl SpanBasis {
    pub fn new(field: Field, dim: usize) -> Self {
        SpanBasis {
            field,
            dim,
            rows: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Residual of `v` after eliminating every stored pivot.
    pub fn reduce(&self, v: &[FieldValue]) -> Vector {
        let mut w = v.to_vec();
        for (p, row) in &self.rows {
            if w[*p].is_zero() {
                continue;
            }
            let f = w[*p].clone();
            for (wi, ri) in w.iter_mut().zip(row) {
                if !ri.is_zero() {
                    *wi -= &(&f * ri);
                }
            }
        }
        w
    }

    pub fn contains(&self, v: &[FieldValue]) -> bool {
        self.reduce(v).iter().all(FieldValue::is_zero)
    }

    /// Adds `v`; returns false (and leaves the span unchanged) if dependent.
    pub fn insert(&mut self, v: &[FieldValue]) -> bool {
        assert_eq!(
            v.len(),
            self.dim,
            "vector length must match the span's ambient dimension"
        );
        let mut w = self.reduce(v);
        let Some(p) = w.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = w[p].inv().expect("nonzero");
        for x in w.iter_mut() {
            *x *= &inv;
        }
        for (_, row) in self.rows.iter_mut() {
            if row[p].is_zero() {
                continue;
            }
            let f = row[p].clone();
            for (ri, wi) in row.iter_mut().zip(&w) {
                if !wi.is_zero() {
                    *ri -= &(&f * wi);
                }
            }
        }
        self.rows.push((p, w));
        true
    }

    /// Stored rows sorted by pivot: the reduced row echelon form of the span.
    pub fn echelon_rows(&self) -> Vec<(usize, Vector)> {
        let mut rows = self.rows.clone();
        rows.sort_by_key(|(p, _)| *p);
        rows
    }

    pub fn field(&self) -> Field {
        self.field
    }
}

/// Rank of a list of vectors of equal length `dim`.
pub fn rank_of(field: Field, dim: usize, vectors: &[Vector]) -> usize {
    let mut span = SpanBasis::new(field, dim);
    for v in vectors {
        span.insert(v);
        if span.rank() == dim {
            break;
        }
    }
    span.rank()
}
