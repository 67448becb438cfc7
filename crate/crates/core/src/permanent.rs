//! Dense complex matrices and their permanents.
//!
//! The main kernel is Ryser's inclusion-exclusion formula walked in Gray-code
//! order, so that consecutive column subsets differ by one column and the row
//! sums update in `O(n)`:
//!
//! ```text
//! per(A) = (-1)^n  sum_{S ⊆ cols} (-1)^{|S|}  prod_i  sum_{j in S} A[i][j]
//! ```
//!
//! Repeated rows and columns (the `A[n, s]` notation, where row `i` appears
//! `n_i` times and column `j` appears `s_j` times) are handled without
//! expansion: a column repeated `s_j` times contributes `k_j` copies to a
//! subset in `C(s_j, k_j)` ways, and a repeated row turns its factor into a
//! power.

use std::fmt;
use std::ops::{Index, IndexMut, Mul};

use crate::error::{Error, Result};
use crate::fock::PhotonConfig;
use num_complex::Complex64;

/// Largest permanent dimension accepted.
pub const MAX_PERMANENT_DIM: usize = 30;

/// Row-major dense complex matrix.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries given for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::BadParameters("matrix entries must be finite".into()));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Self::from_row_major(rows.len(), cols, rows.concat())
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let rows: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<Complex64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn adjoint(&self) -> Self {
        let mut t = self.transpose();
        t.data.iter_mut().for_each(|z| *z = z.conj());
        t
    }

    /// Largest entrywise deviation of `M^dagger M` from the identity.
    pub fn unitarity_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let prod = &self.adjoint() * self;
        let id = Self::identity(self.rows);
        prod.max_abs_diff(&id)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Explicit `A[row_reps, col_reps]`: row `i` repeated `row_reps[i]` times
    /// and column `j` repeated `col_reps[j]` times.
    pub fn expand(&self, row_reps: &[usize], col_reps: &[usize]) -> Result<Self> {
        if row_reps.len() != self.rows || col_reps.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "repetition vectors of length ({}, {}) for a {}x{} matrix",
                row_reps.len(),
                col_reps.len(),
                self.rows,
                self.cols
            )));
        }
        let rows: Vec<usize> = repeat_indices(row_reps);
        let cols: Vec<usize> = repeat_indices(col_reps);
        let mut out = Self::zeros(rows.len(), cols.len());
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                out[(a, b)] = self[(i, j)];
            }
        }
        Ok(out)
    }
}

fn repeat_indices(reps: &[usize]) -> Vec<usize> {
    reps.iter()
        .enumerate()
        .flat_map(|(i, &r)| std::iter::repeat_n(i, r))
        .collect()
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, rhs.rows, "incompatible shapes for multiplication");
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for z in self.row(i) {
                write!(f, "{:+.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Permanent of a square matrix (Gray-code Ryser, `O(2^n n)`).
pub fn permanent(m: &ComplexMatrix) -> Result<Complex64> {
    if !m.is_square() {
        return Err(Error::NonSquare {
            rows: m.rows,
            cols: m.cols,
        });
    }
    let n = m.rows;
    if n > MAX_PERMANENT_DIM {
        return Err(Error::DimensionTooLarge {
            dim: n,
            max: MAX_PERMANENT_DIM,
        });
    }
    Ok(ryser_gray(m))
}

fn ryser_gray(m: &ComplexMatrix) -> Complex64 {
    let n = m.rows;
    if n == 0 {
        return Complex64::new(1.0, 0.0);
    }
    let mut row_sums = vec![Complex64::new(0.0, 0.0); n];
    let mut in_subset = vec![false; n];
    let mut total = Complex64::new(0.0, 0.0);
    let mut subset_size = 0usize;
    for step in 1u64..(1u64 << n) {
        let j = step.trailing_zeros() as usize;
        if in_subset[j] {
            for (i, s) in row_sums.iter_mut().enumerate() {
                *s -= m[(i, j)];
            }
            subset_size -= 1;
        } else {
            for (i, s) in row_sums.iter_mut().enumerate() {
                *s += m[(i, j)];
            }
            subset_size += 1;
        }
        in_subset[j] = !in_subset[j];
        let prod: Complex64 = row_sums.iter().product();
        if subset_size.is_multiple_of(2) {
            total += prod;
        } else {
            total -= prod;
        }
    }
    if n % 2 == 1 {
        -total
    } else {
        total
    }
}

/// `per(base[row_reps, col_reps])` without building the expanded matrix.
///
/// Zero total repetitions give the empty permanent, 1.
pub fn permanent_with_multiplicity(
    base: &ComplexMatrix,
    row_reps: &PhotonConfig,
    col_reps: &PhotonConfig,
) -> Result<Complex64> {
    permanent_with_multiplicity_slices(base, row_reps.counts(), col_reps.counts())
}

pub(crate) fn permanent_with_multiplicity_slices(
    base: &ComplexMatrix,
    row_reps: &[usize],
    col_reps: &[usize],
) -> Result<Complex64> {
    if row_reps.len() != base.rows || col_reps.len() != base.cols {
        return Err(Error::DimensionMismatch(format!(
            "repetition vectors of length ({}, {}) for a {}x{} matrix",
            row_reps.len(),
            col_reps.len(),
            base.rows,
            base.cols
        )));
    }
    let total_rows: usize = row_reps.iter().sum();
    let total_cols: usize = col_reps.iter().sum();
    if total_rows != total_cols {
        return Err(Error::MismatchedTotals {
            rows: total_rows,
            cols: total_cols,
        });
    }
    if total_rows > MAX_PERMANENT_DIM {
        return Err(Error::DimensionTooLarge {
            dim: total_rows,
            max: MAX_PERMANENT_DIM,
        });
    }
    if total_rows == 0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    Ok(ryser_multiplicity(base, row_reps, col_reps))
}

/// Ryser's formula over multisets of columns:
///
/// `per = (-1)^m sum_{0 <= k <= s} (-1)^{|k|} prod_j C(s_j, k_j) prod_i (sum_j k_j A[i][j])^{n_i}`
///
/// with the `k` vector walked as a mixed-radix Gray code so each step adds or
/// removes one copy of one column.
fn ryser_multiplicity(base: &ComplexMatrix, row_reps: &[usize], col_reps: &[usize]) -> Complex64 {
    let rows: Vec<(usize, i32)> = row_reps
        .iter()
        .enumerate()
        .filter(|&(_, &r)| r > 0)
        .map(|(i, &r)| (i, r as i32))
        .collect();
    let cols: Vec<(usize, usize)> = col_reps
        .iter()
        .enumerate()
        .filter(|&(_, &s)| s > 0)
        .map(|(j, &s)| (j, s))
        .collect();
    let m: usize = col_reps.iter().sum();

    let mut k = vec![0usize; cols.len()];
    let mut dir = vec![true; cols.len()];
    let mut row_sums = vec![Complex64::new(0.0, 0.0); rows.len()];
    let mut coeff = 1.0f64;
    let mut k_total = 0usize;
    // k = 0 term has a zero row sum, so it contributes nothing.
    let mut total = Complex64::new(0.0, 0.0);
    let steps: usize = cols.iter().map(|&(_, s)| s + 1).product();
    for _ in 1..steps {
        // reflected mixed-radix Gray code: move the lowest digit that can move
        let mut d = 0;
        loop {
            let (_, s) = cols[d];
            if (dir[d] && k[d] < s) || (!dir[d] && k[d] > 0) {
                break;
            }
            dir[d] = !dir[d];
            d += 1;
        }
        let (j, s) = cols[d];
        if dir[d] {
            // C(s, k+1) = C(s, k) (s - k) / (k + 1)
            coeff *= (s - k[d]) as f64 / (k[d] + 1) as f64;
            k[d] += 1;
            k_total += 1;
            for (r, &(i, _)) in row_sums.iter_mut().zip(&rows) {
                *r += base[(i, j)];
            }
        } else {
            coeff *= k[d] as f64 / (s - k[d] + 1) as f64;
            k[d] -= 1;
            k_total -= 1;
            for (r, &(i, _)) in row_sums.iter_mut().zip(&rows) {
                *r -= base[(i, j)];
            }
        }
        let prod: Complex64 = row_sums.iter().zip(&rows).map(|(z, &(_, n))| z.powi(n)).product();
        let term = prod * coeff;
        if k_total.is_multiple_of(2) {
            total += term;
        } else {
            total -= term;
        }
    }
    if m % 2 == 1 {
        -total
    } else {
        total
    }
}
