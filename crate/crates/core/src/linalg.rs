//! Dense matrices with exact and floating point rank routines.

use std::ops::Neg;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{Num, One, Zero};

use crate::scalar::Rational;

/// Relative singular value threshold for complex rank decisions.
pub const COMPLEX_RANK_TOL: f64 = 1.0 / (1u64 << 40) as f64;

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Clone> Matrix<T> {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Panics if the rows are ragged.
    pub fn from_rows(rows: Vec<Vec<T>>, cols: usize) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged matrix rows");
            data.extend(r);
        }
        Self {
            rows: n,
            cols,
            data,
        }
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[T]> {
        (0..self.rows).map(move |i| self.row(i))
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn map<U: Clone>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    /// Rows selected by index, in the given order.
    pub fn select_rows(&self, idx: &[usize]) -> Self {
        Self::from_rows(idx.iter().map(|&i| self.row(i).to_vec()).collect(), self.cols)
    }

    /// Vertical concatenation. Panics on column mismatch.
    pub fn stack(blocks: &[Matrix<T>], cols: usize) -> Self {
        let mut data = Vec::new();
        let mut rows = 0;
        for b in blocks {
            assert_eq!(b.cols, cols);
            rows += b.rows;
            data.extend(b.data.iter().cloned());
        }
        Self { rows, cols, data }
    }
}

impl<T: Num + Clone> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| T::zero())
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn diagonal(entries: &[T]) -> Self {
        let n = entries.len();
        Self::from_fn(n, n, |i, j| if i == j { entries[i].clone() } else { T::zero() })
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        Self::from_fn(self.rows, other.cols, |i, j| {
            (0..self.cols).fold(T::zero(), |acc, k| {
                acc + self.get(i, k).clone() * other.get(k, j).clone()
            })
        })
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len(), "matrix-vector shape mismatch");
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
            })
            .collect()
    }

    pub fn scale(&self, s: &T) -> Self {
        self.map(|x| x.clone() * s.clone())
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a.clone() - b.clone())
                .collect(),
        }
    }

    pub fn trace(&self) -> T {
        (0..self.rows.min(self.cols)).fold(T::zero(), |acc, i| acc + self.get(i, i).clone())
    }

    pub fn is_zero_matrix(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self.get(i, j).is_zero()))
    }
}

/// Determinant by fraction-free (Bareiss) elimination. Works over any field;
/// the divisions are exact whenever the entries live in an integral domain.
pub fn determinant<T: Num + Clone + Neg<Output = T>>(m: &Matrix<T>) -> T {
    assert!(m.is_square(), "determinant of a non-square matrix");
    let n = m.rows;
    if n == 0 {
        return T::one();
    }
    let mut a: Vec<Vec<T>> = m.rows().map(|r| r.to_vec()).collect();
    let mut prev = T::one();
    let mut negate = false;
    for k in 0..n {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(p) => {
                    a.swap(k, p);
                    negate = !negate;
                }
                None => return T::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (a[k][k].clone() * a[i][j].clone() - a[i][k].clone() * a[k][j].clone())
                    / prev.clone();
                a[i][j] = v;
            }
            a[i][k] = T::zero();
        }
        prev = a[k][k].clone();
    }
    let det = a[n - 1][n - 1].clone();
    if negate {
        -det
    } else {
        det
    }
}

/// Clears denominators row by row so the row space is unchanged.
fn integer_rows(m: &Matrix<Rational>) -> Vec<Vec<BigInt>> {
    m.rows()
        .map(|row| {
            let lcm = row
                .iter()
                .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
            row.iter()
                .map(|q| q.numer() * (&lcm / q.denom()))
                .collect()
        })
        .collect()
}

/// Exact rank via fraction-free Gaussian elimination over the integers.
pub fn rational_rank(m: &Matrix<Rational>) -> usize {
    let mut a = integer_rows(m);
    let (rows, cols) = (m.rows, m.cols);
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let (top, rest) = a.split_at_mut(r + 1);
        let pivot_row = &top[r];
        let pivot = &pivot_row[c];
        for row in rest.iter_mut() {
            let factor = std::mem::take(&mut row[c]);
            if factor.is_zero() {
                for x in row[c + 1..].iter_mut() {
                    *x = &*x * pivot / &prev;
                }
                continue;
            }
            for j in c + 1..cols {
                row[j] = (pivot * &row[j] - &factor * &pivot_row[j]) / &prev;
            }
        }
        prev = a[r][c].clone();
        r += 1;
    }
    r
}

/// Reduced row echelon form over the rationals. Returns the pivot columns.
pub fn rref(m: &mut Matrix<Rational>) -> Vec<usize> {
    let (rows, cols) = (m.rows, m.cols);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m.get(i, c).is_zero()) else {
            continue;
        };
        if p != r {
            for j in 0..cols {
                m.data.swap(p * cols + j, r * cols + j);
            }
        }
        let inv = m.get(r, c).recip();
        for j in c..cols {
            let v = m.get(r, j) * &inv;
            m.set(r, j, v);
        }
        for i in 0..rows {
            if i == r || m.get(i, c).is_zero() {
                continue;
            }
            let f = m.get(i, c).clone();
            for j in c..cols {
                let v = m.get(i, j) - &f * m.get(r, j);
                m.set(i, j, v);
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rational_nullspace(m: &Matrix<Rational>) -> Vec<Vec<Rational>> {
    let mut a = m.clone();
    let pivots = rref(&mut a);
    let cols = m.cols;
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); cols];
            v[f] = Rational::one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -a.get(r, f).clone();
            }
            v
        })
        .collect()
}

fn to_nalgebra(m: &Matrix<Complex64>, min_rows: usize) -> DMatrix<Complex64> {
    let rows = m.rows.max(min_rows);
    DMatrix::from_fn(rows, m.cols, |i, j| {
        if i < m.rows {
            *m.get(i, j)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

fn rank_threshold(sigma: &[f64], rows: usize, cols: usize) -> f64 {
    let smax = sigma.iter().cloned().fold(0.0, f64::max);
    COMPLEX_RANK_TOL * rows.max(cols) as f64 * smax
}

/// Numerical rank: singular values above `2^-40 · max(m,n) · σ_max`.
pub fn complex_rank(m: &Matrix<Complex64>) -> usize {
    if m.rows == 0 || m.cols == 0 {
        return 0;
    }
    let svd = to_nalgebra(m, 0).svd(false, false);
    let sigma: Vec<f64> = svd.singular_values.iter().cloned().collect();
    let smax = sigma.iter().cloned().fold(0.0, f64::max);
    if smax == 0.0 {
        return 0;
    }
    let tol = rank_threshold(&sigma, m.rows, m.cols);
    sigma.iter().filter(|&&s| s > tol).count()
}

/// Right kernel from the SVD; rows are padded so the full `V` is available.
pub fn complex_nullspace(m: &Matrix<Complex64>) -> Vec<Vec<Complex64>> {
    let n = m.cols;
    if n == 0 {
        return Vec::new();
    }
    let a = to_nalgebra(m, n);
    let svd = a.svd(false, true);
    let v_t = svd.v_t.expect("requested V^H");
    let sigma: Vec<f64> = svd.singular_values.iter().cloned().collect();
    let tol = rank_threshold(&sigma, m.rows, m.cols);
    let smax = sigma.iter().cloned().fold(0.0, f64::max);
    (0..sigma.len())
        .filter(|&k| smax == 0.0 || sigma[k] <= tol)
        .map(|k| (0..n).map(|j| v_t[(k, j)].conj()).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, ratio};

    fn q(rows: &[&[i64]]) -> Matrix<Rational> {
        let cols = rows.first().map_or(0, |r| r.len());
        Matrix::from_rows(
            rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect(),
            cols,
        )
    }

    #[test]
    fn rank_of_zero_and_identity() {
        assert_eq!(rational_rank(&Matrix::<Rational>::zeros(4, 5)), 0);
        assert_eq!(rational_rank(&Matrix::<Rational>::identity(6)), 6);
        assert_eq!(rational_rank(&Matrix::<Rational>::zeros(0, 3)), 0);
    }

    #[test]
    fn rank_of_product_is_inner_dimension() {
        let a = q(&[&[1, 2], &[3, -1], &[0, 5], &[7, 7], &[-2, 4], &[1, 1]]);
        let b = q(&[&[1, 0, 3, -4, 2, 9], &[0, 2, -1, 5, 3, 1]]);
        assert_eq!(rational_rank(&a.mul(&b)), 2);
    }

    #[test]
    fn rank_with_fractions_and_skipped_columns() {
        let mut m = q(&[&[0, 1, 2], &[0, 2, 4], &[0, 0, 1]]);
        m.set(1, 2, ratio(9, 2));
        assert_eq!(rational_rank(&m), 2);
    }

    #[test]
    fn determinant_matches_cofactor_expansion() {
        let m = q(&[&[2, -1, 0, 3], &[1, 4, 2, 0], &[0, 0, 5, 1], &[3, 1, 1, 1]]);
        // cofactor expansion along the first row, computed by hand with 3x3 rule
        let det3 = |a: [[i64; 3]; 3]| {
            a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
                - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
                + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
        };
        let expected = 2 * det3([[4, 2, 0], [0, 5, 1], [1, 1, 1]])
            + det3([[1, 2, 0], [0, 5, 1], [3, 1, 1]])
            - 3 * det3([[1, 4, 2], [0, 0, 5], [3, 1, 1]]);
        assert_eq!(determinant(&m), int(expected));
    }

    #[test]
    fn nullspace_vectors_are_in_kernel() {
        let m = q(&[&[1, 2, 3, 4], &[2, 4, 6, 8], &[0, 1, 1, 0]]);
        let ker = rational_nullspace(&m);
        assert_eq!(ker.len(), 2);
        for v in &ker {
            assert!(m.mul_vec(v).iter().all(|x| x.is_zero()));
        }
    }

    #[test]
    fn complex_rank_and_kernel() {
        let i = Complex64::new(0.0, 1.0);
        let one = Complex64::new(1.0, 0.0);
        let z = Complex64::new(0.0, 0.0);
        let m = Matrix::from_rows(vec![vec![one, i, z], vec![i, -one, z]], 3);
        assert_eq!(complex_rank(&m), 1);
        let ker = complex_nullspace(&m);
        assert_eq!(ker.len(), 2);
        for v in &ker {
            assert!(m.mul_vec(v).iter().all(|x| x.norm() < 1e-12));
        }
        assert_eq!(complex_rank(&Matrix::<Complex64>::zeros(3, 3)), 0);
    }
}
