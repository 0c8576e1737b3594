//! Dense matrices over an exact (or exact-when-possible) field.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_traits::{One, Zero};

use crate::scalar::{ExactScalar, Scalar};

pub trait Field: Clone + fmt::Debug + PartialEq + Zero + One {
    fn from_int(n: i64) -> Self;
    fn plus(&self, o: &Self) -> Self;
    fn minus(&self, o: &Self) -> Self;
    fn times(&self, o: &Self) -> Self;
    fn negated(&self) -> Self;
    fn recip(&self) -> Option<Self>;
    fn conjugate(&self) -> Self;
    /// Larger is a better elimination pivot; 0 means unusable.
    fn pivot_score(&self) -> f64;

    fn over(&self, o: &Self) -> Self {
        self.times(&o.recip().expect("division by zero"))
    }
}

impl Field for ExactScalar {
    fn from_int(n: i64) -> Self {
        ExactScalar::from_int(n)
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn minus(&self, o: &Self) -> Self {
        self - o
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
    fn negated(&self) -> Self {
        -self
    }
    fn recip(&self) -> Option<Self> {
        self.inv()
    }
    fn conjugate(&self) -> Self {
        self.conj()
    }
    fn pivot_score(&self) -> f64 {
        if self.is_zero() {
            0.0
        } else {
            1.0
        }
    }
}

impl Field for Scalar {
    fn from_int(n: i64) -> Self {
        Scalar::from_int(n)
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn minus(&self, o: &Self) -> Self {
        self - o
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
    fn negated(&self) -> Self {
        -self
    }
    fn recip(&self) -> Option<Self> {
        self.inv()
    }
    fn conjugate(&self) -> Self {
        self.conj()
    }
    fn pivot_score(&self) -> f64 {
        match self {
            Scalar::Exact(x) => x.pivot_score(),
            Scalar::Approx(a) if a.abs() > crate::scalar::DEFAULT_TOL => a.abs(),
            Scalar::Approx(_) => 0.0,
        }
    }
}

#[derive(Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

pub type ExactMatrix = Matrix<ExactScalar>;

impl<T: Field> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for k in 0..n {
            m[(k, k)] = T::one();
        }
        m
    }

    pub fn diagonal(entries: &[T]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (k, x) in entries.iter().enumerate() {
            m[(k, k)] = x.clone();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Matrix { rows, cols, data }
    }

    /// Returns `None` when rows are ragged.
    pub fn from_rows(rows: Vec<Vec<T>>) -> Option<Self> {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != m) {
            return None;
        }
        Some(Matrix { rows: n, cols: m, data: rows.into_iter().flatten().collect() })
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        self.data.chunks(self.cols.max(1)).take(self.rows).map(<[T]>::to_vec).collect()
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

    pub fn map<U: Field>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.cols, o.rows, "matrix shape mismatch");
        let mut out = Self::zeros(self.rows, o.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(r, k)];
                if a.is_zero() {
                    continue;
                }
                for c in 0..o.cols {
                    let b = &o[(k, c)];
                    if !b.is_zero() {
                        out[(r, c)] = out[(r, c)].plus(&a.times(b));
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols), "matrix shape mismatch");
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&o.data).map(|(a, b)| a.plus(b)).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols), "matrix shape mismatch");
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&o.data).map(|(a, b)| a.minus(b)).collect() }
    }

    pub fn scale(&self, s: &T) -> Self {
        self.map(|x| x.times(s))
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].clone())
    }

    pub fn conj(&self) -> Self {
        self.map(T::conjugate)
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conjugate())
    }

    pub fn trace(&self) -> T {
        (0..self.rows.min(self.cols)).fold(T::zero(), |acc, k| acc.plus(&self[(k, k)]))
    }

    /// Kronecker product; index `(a, b)` of the result is `a * o.rows + b`.
    pub fn kron(&self, o: &Self) -> Self {
        Self::from_fn(self.rows * o.rows, self.cols * o.cols, |r, c| {
            self[(r / o.rows, c / o.cols)].times(&o[(r % o.rows, c % o.cols)])
        })
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(T::is_zero)
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|r| (0..self.cols).all(|c| r == c || self[(r, c)].is_zero()))
    }

    pub fn is_lower_triangular(&self) -> bool {
        (0..self.rows).all(|r| (r + 1..self.cols).all(|c| self[(r, c)].is_zero()))
    }

    pub fn is_hermitian(&self) -> bool {
        self.is_square() && (0..self.rows).all(|r| (r..self.cols).all(|c| self[(r, c)] == self[(c, r)].conjugate()))
    }

    /// Reduced row echelon form in place; returns pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            let best = (row..self.rows)
                .map(|r| (r, self[(r, col)].pivot_score()))
                .filter(|&(_, s)| s > 0.0)
                .fold(None, |acc: Option<(usize, f64)>, x| match acc {
                    Some(a) if a.1 >= x.1 => Some(a),
                    _ => Some(x),
                });
            let Some((p, _)) = best else { continue };
            self.swap_rows(row, p);
            let inv = self[(row, col)].recip().expect("pivot is nonzero");
            for c in 0..self.cols {
                self[(row, c)] = self[(row, c)].times(&inv);
            }
            for r in 0..self.rows {
                if r == row || self[(r, col)].is_zero() {
                    continue;
                }
                let f = self[(r, col)].clone();
                for c in 0..self.cols {
                    if !self[(row, c)].is_zero() {
                        let v = self[(r, c)].minus(&f.times(&self[(row, c)]));
                        self[(r, c)] = v;
                    }
                }
                self[(r, col)] = T::zero();
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for c in 0..self.cols {
                self.data.swap(a * self.cols + c, b * self.cols + c);
            }
        }
    }

    pub fn rank(&self) -> usize {
        self.clone().rref().len()
    }

    /// Basis of `{x : self·x = 0}` as column vectors.
    pub fn nullspace(&self) -> Vec<Vec<T>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![T::zero(); self.cols];
                v[f] = T::one();
                for (r, &p) in pivots.iter().enumerate() {
                    v[p] = m[(r, f)].negated();
                }
                v
            })
            .collect()
    }

    pub fn det(&self) -> T {
        assert!(self.is_square(), "determinant of non-square matrix");
        let mut m = self.clone();
        let n = self.rows;
        let mut det = T::one();
        for col in 0..n {
            let Some(p) = (col..n).find(|&r| !m[(r, col)].is_zero()) else {
                return T::zero();
            };
            if p != col {
                m.swap_rows(p, col);
                det = det.negated();
            }
            let piv = m[(col, col)].clone();
            det = det.times(&piv);
            let inv = piv.recip().expect("pivot is nonzero");
            for r in col + 1..n {
                if m[(r, col)].is_zero() {
                    continue;
                }
                let f = m[(r, col)].times(&inv);
                for c in col..n {
                    let v = m[(r, c)].minus(&f.times(&m[(col, c)]));
                    m[(r, c)] = v;
                }
            }
        }
        det
    }

    pub fn inverse(&self) -> Option<Self> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let mut aug = Self::from_fn(n, 2 * n, |r, c| {
            if c < n {
                self[(r, c)].clone()
            } else if c - n == r {
                T::one()
            } else {
                T::zero()
            }
        });
        let pivots = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        Some(Self::from_fn(n, n, |r, c| aug[(r, c + n)].clone()))
    }

    /// Determinants of the leading principal submatrices.
    pub fn leading_minors(&self) -> Vec<T> {
        (1..=self.rows.min(self.cols)).map(|k| Self::from_fn(k, k, |r, c| self[(r, c)].clone()).det()).collect()
    }

    /// Characteristic polynomial `det(xI − A)`, coefficients from degree 0 up.
    pub fn charpoly(&self) -> Vec<T> {
        // Faddeev–LeVerrier
        let n = self.rows;
        let mut coeffs = vec![T::zero(); n + 1];
        coeffs[n] = T::one();
        let mut m = Self::zeros(n, n);
        for k in 1..=n {
            let mut next = self.mul(&m);
            for d in 0..n {
                next[(d, d)] = next[(d, d)].plus(&coeffs[n - k + 1]);
            }
            m = next;
            let c = self.mul(&m).trace().negated().over(&T::from_int(k as i64));
            coeffs[n - k] = c;
        }
        coeffs
    }

    pub fn column(&self, c: usize) -> Vec<T> {
        (0..self.rows).map(|r| self[(r, c)].clone()).collect()
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        (0..self.rows)
            .map(|r| (0..self.cols).fold(T::zero(), |acc, c| acc.plus(&self[(r, c)].times(&v[c]))))
            .collect()
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (r, c): (usize, usize)) -> &T {
        &self.data[r * self.cols + c]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut T {
        &mut self.data[r * self.cols + c]
    }
}

impl<T: fmt::Display> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for c in 0..self.cols {
                if c > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.data[r * self.cols + c])?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

pub fn exact_matrix(rows: &[&[&str]]) -> ExactMatrix {
    Matrix::from_rows(rows.iter().map(|r| r.iter().map(|s| s.parse().expect("scalar literal")).collect()).collect())
        .expect("rectangular literal")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_and_det() {
        let a = exact_matrix(&[&["1", "1"], &["0", "2"]]);
        assert_eq!(a.det(), ExactScalar::from_int(2));
        let ai = a.inverse().unwrap();
        assert_eq!(a.mul(&ai), Matrix::identity(2));
        assert!(exact_matrix(&[&["1", "2"], &["2", "4"]]).inverse().is_none());
    }

    #[test]
    fn charpoly_of_rotation() {
        let a = exact_matrix(&[&["0", "1"], &["-1", "0"]]);
        assert_eq!(a.charpoly(), vec![ExactScalar::one(), ExactScalar::zero(), ExactScalar::one()]);
        let b = exact_matrix(&[&["2", "1", "0"], &["0", "3", "0"], &["1", "0", "1"]]);
        // (x−2)(x−3)(x−1) = x³ − 6x² + 11x − 6
        let want: Vec<ExactScalar> = [-6, 11, -6, 1].iter().map(|&n| ExactScalar::from_int(n)).collect();
        assert_eq!(b.charpoly(), want);
    }

    #[test]
    fn nullspace_of_rank_one() {
        let a = exact_matrix(&[&["1", "2"], &["2", "4"]]);
        let ns = a.nullspace();
        assert_eq!(ns.len(), 1);
        assert!(a.mul_vec(&ns[0]).iter().all(Zero::is_zero));
    }

    #[test]
    fn kron_indexing() {
        let a = exact_matrix(&[&["1", "2"], &["3", "4"]]);
        let i = Matrix::identity(2);
        let k = a.kron(&i);
        assert_eq!(k[(2, 0)], ExactScalar::from_int(3));
        assert_eq!(k[(3, 1)], ExactScalar::from_int(3));
        assert_eq!(k[(3, 0)], ExactScalar::zero());
    }
}
