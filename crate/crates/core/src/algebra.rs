//! Exterior algebra on `R^{d+1}`: extensors in Plücker coordinates, the Hodge
//! star, the complementary-grade pairing and induced representations on
//! exterior powers.
//!
//! Coordinates of a grade-`k` extensor are indexed by strictly increasing
//! `k`-tuples of `{0, .., d}` in lexicographic order. Tuples are 0-based in
//! code and 1-based whenever they are shown to a user.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{determinant, Matrix};
use crate::scalar::{Field, Rational};

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// All strictly increasing `k`-tuples drawn from `0..n`, lexicographically.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::with_capacity(binomial(n, k));
    rec(0, n, k, &mut Vec::with_capacity(k), &mut out);
    out
}

/// Sign of the permutation sending `(i_1..i_k, j_1..j_{n-k})` to `(1..n)`,
/// where `j` is the increasing complement of the increasing tuple `i`.
pub fn complement_sign(tuple: &[usize]) -> i32 {
    let inversions: usize = tuple.iter().enumerate().map(|(t, &i)| i - t).sum();
    if inversions.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

pub fn complement(tuple: &[usize], n: usize) -> Vec<usize> {
    (0..n).filter(|i| !tuple.contains(i)).collect()
}

/// Bijection between increasing `k`-tuples of `0..n` and `0..C(n,k)`.
#[derive(Clone, Debug)]
pub struct LexIndex {
    n: usize,
    k: usize,
    tuples: Vec<Vec<usize>>,
    positions: HashMap<Vec<usize>, usize>,
}

impl LexIndex {
    pub fn new(n: usize, k: usize) -> Self {
        let tuples = combinations(n, k);
        let positions = tuples
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i))
            .collect();
        Self {
            n,
            k,
            tuples,
            positions,
        }
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn ambient(&self) -> usize {
        self.n
    }

    pub fn grade(&self) -> usize {
        self.k
    }

    pub fn tuple(&self, pos: usize) -> &[usize] {
        &self.tuples[pos]
    }

    pub fn tuples(&self) -> &[Vec<usize>] {
        &self.tuples
    }

    pub fn position(&self, tuple: &[usize]) -> Option<usize> {
        self.positions.get(tuple).copied()
    }

    /// 1-based label such as `"(1,2)"`.
    pub fn label(&self, pos: usize) -> String {
        tuple_label(&self.tuples[pos])
    }
}

pub fn tuple_label(tuple: &[usize]) -> String {
    let inner: Vec<String> = tuple.iter().map(|i| (i + 1).to_string()).collect();
    format!("({})", inner.join(","))
}

/// An element of the `k`-th exterior power of `R^{d+1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Extensor<T = Rational> {
    d: usize,
    k: usize,
    coords: Vec<T>,
}

impl<T: Field> Extensor<T> {
    pub fn new(d: usize, k: usize, coords: Vec<T>) -> Result<Self> {
        if k > d + 1 {
            return Err(Error::Grade(format!("grade {k} exceeds ambient {}", d + 1)));
        }
        let expected = binomial(d + 1, k);
        if coords.len() != expected {
            return Err(Error::Dimension {
                expected,
                found: coords.len(),
            });
        }
        Ok(Self { d, k, coords })
    }

    pub fn zero(d: usize, k: usize) -> Self {
        Self {
            d,
            k,
            coords: vec![T::zero(); binomial(d + 1, k)],
        }
    }

    /// The basis extensor `e_{i_1} ∧ … ∧ e_{i_k}` for an increasing 0-based tuple.
    pub fn basis(d: usize, tuple: &[usize]) -> Self {
        let idx = LexIndex::new(d + 1, tuple.len());
        let pos = idx.position(tuple).expect("increasing tuple within range");
        let mut e = Self::zero(d, tuple.len());
        e.coords[pos] = T::one();
        e
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn grade(&self) -> usize {
        self.k
    }

    pub fn coords(&self) -> &[T] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<T> {
        self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    pub fn neg(&self) -> Self {
        Self {
            d: self.d,
            k: self.k,
            coords: self.coords.iter().map(|c| -c.clone()).collect(),
        }
    }

    /// Standard dot product of coordinate vectors.
    pub fn dot(&self, other: &Self) -> Result<T> {
        if self.k != other.k || self.d != other.d {
            return Err(Error::Grade(format!(
                "dot of grades {} and {}",
                self.k, other.k
            )));
        }
        Ok(self
            .coords
            .iter()
            .zip(&other.coords)
            .fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone()))
    }

    /// Applies a linear map on the coordinate space.
    pub fn transform(&self, m: &Matrix<T>) -> Self {
        Self {
            d: self.d,
            k: self.k,
            coords: m.mul_vec(&self.coords),
        }
    }

    /// Plücker relations `x_ij x_kl - x_ik x_jl + x_il x_jk = 0` (grade 2 only).
    pub fn is_decomposable(&self) -> bool {
        if self.k != 2 {
            return self.k <= 1 || self.k + 1 > self.d;
        }
        let idx = LexIndex::new(self.d + 1, 2);
        let c = |i: usize, j: usize| self.coords[idx.position(&[i, j]).unwrap()].clone();
        combinations(self.d + 1, 4).iter().all(|q| {
            let (i, j, k, l) = (q[0], q[1], q[2], q[3]);
            (c(i, j) * c(k, l) - c(i, k) * c(j, l) + c(i, l) * c(j, k)).is_zero()
        })
    }
}

impl fmt::Display for Extensor<Rational> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .coords
            .iter()
            .map(crate::scalar::rational_to_string)
            .collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// `v_1 ∧ … ∧ v_k`: coordinate `(i_1..i_k)` is the minor on those rows of the
/// `(d+1) × k` matrix with columns `v_1..v_k`.
pub fn wedge<T: Field>(vectors: &[Vec<T>], d: usize) -> Result<Extensor<T>> {
    let k = vectors.len();
    if k == 0 || k > d + 1 {
        return Err(Error::Grade(format!(
            "wedge of {k} vectors in dimension {}",
            d + 1
        )));
    }
    for v in vectors {
        if v.len() != d + 1 {
            return Err(Error::Dimension {
                expected: d + 1,
                found: v.len(),
            });
        }
    }
    let coords = combinations(d + 1, k)
        .iter()
        .map(|rows| {
            let minor = Matrix::from_fn(k, k, |r, c| vectors[c][rows[r]].clone());
            determinant(&minor)
        })
        .collect();
    Ok(Extensor { d, k, coords })
}

pub fn wedge2<T: Field>(p: &[T], q: &[T]) -> Result<Extensor<T>> {
    let d = p.len().checked_sub(1).ok_or(Error::Dimension {
        expected: 1,
        found: 0,
    })?;
    wedge(&[p.to_vec(), q.to_vec()], d)
}

pub fn hodge_star<T: Field>(x: &Extensor<T>) -> Extensor<T> {
    let n = x.d + 1;
    let from = LexIndex::new(n, x.k);
    let to = LexIndex::new(n, n - x.k);
    let mut coords = vec![T::zero(); to.len()];
    for (pos, tuple) in from.tuples().iter().enumerate() {
        let target = to.position(&complement(tuple, n)).unwrap();
        let v = x.coords[pos].clone();
        coords[target] = if complement_sign(tuple) > 0 { v } else { -v };
    }
    Extensor {
        d: x.d,
        k: n - x.k,
        coords,
    }
}

/// The pairing `p ∘ q` between complementary grades.
pub fn cap_product<T: Field>(p: &Extensor<T>, q: &Extensor<T>) -> Result<T> {
    if p.d != q.d {
        return Err(Error::Dimension {
            expected: p.d,
            found: q.d,
        });
    }
    let n = p.d + 1;
    if p.k + q.k != n {
        return Err(Error::Grade(format!(
            "pairing grades {} and {} in dimension {n}",
            p.k, q.k
        )));
    }
    let from = LexIndex::new(n, p.k);
    let to = LexIndex::new(n, q.k);
    let mut acc = T::zero();
    for (pos, tuple) in from.tuples().iter().enumerate() {
        let other = to.position(&complement(tuple, n)).unwrap();
        let term = p.coords[pos].clone() * q.coords[other].clone();
        acc = if complement_sign(tuple) > 0 {
            acc + term
        } else {
            acc - term
        };
    }
    Ok(acc)
}

/// The matrix of the induced action on the `k`-th exterior power: entry
/// `[I, J]` is the minor of `a` on rows `I` and columns `J`.
pub fn induced_rep<T: Field>(a: &Matrix<T>, k: usize) -> Result<Matrix<T>> {
    if !a.is_square() {
        return Err(Error::Input(format!(
            "induced representation of a {}x{} matrix",
            a.nrows(),
            a.ncols()
        )));
    }
    let n = a.nrows();
    if k > n {
        return Err(Error::Grade(format!("grade {k} exceeds size {n}")));
    }
    let idx = combinations(n, k);
    Ok(Matrix::from_fn(idx.len(), idx.len(), |r, c| {
        let (rows, cols) = (&idx[r], &idx[c]);
        determinant(&Matrix::from_fn(k, k, |i, j| a.get(rows[i], cols[j]).clone()))
    }))
}
