//! Multimatrices `E = (E_1, …, E_n)` and the trace-form measure they induce
//! on the multimatrix algebra `A_E = ⊕ M_{d_λ}(ℂ)`.

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{ExactMatrix, Matrix};
use crate::scalar::{solve_unit_quadratic, ExactScalar, Scalar, UnitQuadraticRoots};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MultiMatrixError {
    #[error("a multimatrix needs at least one block")]
    Empty,
    #[error("block {0} is not square")]
    NotSquare(usize),
    #[error("block {0} is singular")]
    Singular(usize),
    #[error("basis index out of range")]
    IndexOutOfRange,
    #[error("block shapes do not match")]
    ShapeMismatch,
    #[error("conjugating matrix block {0} is singular")]
    SingularP(usize),
    #[error("multimatrix is not normalizable")]
    NotNormalizable,
    #[error("F·conj(F) is not ±I (deviation {0:e})")]
    NotInvolutivePair(f64),
}

/// Position of the matrix unit `e_{row,col}` inside block `block` (all zero-based).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BasisIndex {
    pub block: usize,
    pub row: usize,
    pub col: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MultiMatrix {
    blocks: Vec<ExactMatrix>,
    inverses: Vec<ExactMatrix>,
    /// `permutation[k]` is the input position of stored block `k`.
    permutation: Vec<usize>,
}

impl MultiMatrix {
    /// Validates and stores blocks sorted by nondecreasing size (stable).
    pub fn new(blocks: Vec<ExactMatrix>) -> Result<Self, MultiMatrixError> {
        if blocks.is_empty() {
            return Err(MultiMatrixError::Empty);
        }
        let mut inverses = Vec::with_capacity(blocks.len());
        for (k, b) in blocks.iter().enumerate() {
            if !b.is_square() || b.rows() == 0 {
                return Err(MultiMatrixError::NotSquare(k));
            }
            inverses.push(b.inverse().ok_or(MultiMatrixError::Singular(k))?);
        }
        let mut order: Vec<usize> = (0..blocks.len()).collect();
        order.sort_by_key(|&k| blocks[k].rows());
        let mut slots: Vec<Option<(ExactMatrix, ExactMatrix)>> = blocks.into_iter().zip(inverses).map(Some).collect();
        let (blocks, inverses) = order.iter().map(|&k| slots[k].take().expect("each block taken once")).unzip();
        Ok(MultiMatrix { blocks, inverses, permutation: order })
    }

    pub fn single(block: ExactMatrix) -> Result<Self, MultiMatrixError> {
        Self::new(vec![block])
    }

    pub fn identity(dims: &[usize]) -> Self {
        Self::new(dims.iter().map(|&d| Matrix::identity(d)).collect()).expect("identity blocks are invertible")
    }

    pub fn diagonal(entries: &[ExactScalar]) -> Result<Self, MultiMatrixError> {
        Self::single(Matrix::diagonal(entries))
    }

    pub fn blocks(&self) -> &[ExactMatrix] {
        &self.blocks
    }

    pub fn block(&self, lambda: usize) -> &ExactMatrix {
        &self.blocks[lambda]
    }

    pub fn inverse_block(&self, lambda: usize) -> &ExactMatrix {
        &self.inverses[lambda]
    }

    pub fn permutation(&self) -> &[usize] {
        &self.permutation
    }

    pub fn n_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.blocks.iter().map(Matrix::rows).collect()
    }

    pub fn dim(&self, lambda: usize) -> usize {
        self.blocks[lambda].rows()
    }

    /// Size of the last (largest) block.
    pub fn last_dim(&self) -> usize {
        self.dim(self.n_blocks() - 1)
    }

    pub fn algebra_dim(&self) -> usize {
        self.blocks.iter().map(|b| b.rows() * b.rows()).sum()
    }

    pub fn block_traces(&self) -> Vec<ExactScalar> {
        self.blocks.iter().map(Matrix::trace).collect()
    }

    /// `Tr(E⁻¹) = Σ_λ tr(E_λ⁻¹)`.
    pub fn inverse_trace(&self) -> ExactScalar {
        self.inverses.iter().fold(ExactScalar::zero(), |acc, b| acc + b.trace())
    }

    pub fn entry(&self, lambda: usize, r: usize, c: usize) -> &ExactScalar {
        &self.blocks[lambda][(r, c)]
    }

    pub fn inv_entry(&self, lambda: usize, r: usize, c: usize) -> &ExactScalar {
        &self.inverses[lambda][(r, c)]
    }

    pub fn is_diagonal(&self) -> bool {
        self.blocks.iter().all(Matrix::is_diagonal)
    }

    pub fn is_lower_triangular(&self) -> bool {
        self.blocks.iter().all(Matrix::is_lower_triangular)
    }

    pub fn scale(&self, xi: &ExactScalar) -> Result<Self, MultiMatrixError> {
        Self::new(self.blocks.iter().map(|b| b.scale(xi)).collect())
    }

    /// Matrix units ordered by block, then row, then column.
    pub fn basis(&self) -> Vec<BasisIndex> {
        let mut out = Vec::with_capacity(self.algebra_dim());
        for (block, b) in self.blocks.iter().enumerate() {
            for row in 0..b.rows() {
                for col in 0..b.rows() {
                    out.push(BasisIndex { block, row, col });
                }
            }
        }
        out
    }

    pub fn basis_position(&self, x: BasisIndex) -> usize {
        let offset: usize = self.blocks[..x.block].iter().map(|b| b.rows() * b.rows()).sum();
        offset + x.row * self.dim(x.block) + x.col
    }

    /// `tr_E(e_{ij,λ}) = (E_λ⁻¹)_{ij}`.
    pub fn trace_form(&self, x: BasisIndex) -> Result<ExactScalar, MultiMatrixError> {
        if x.block >= self.n_blocks() || x.row >= self.dim(x.block) || x.col >= self.dim(x.block) {
            return Err(MultiMatrixError::IndexOutOfRange);
        }
        Ok(self.inverses[x.block][(x.row, x.col)].clone())
    }

    /// Product of two matrix units, if nonzero.
    pub fn unit_product(a: BasisIndex, b: BasisIndex) -> Option<BasisIndex> {
        (a.block == b.block && a.col == b.row).then_some(BasisIndex { block: a.block, row: a.row, col: b.col })
    }

    pub fn measure_report(&self) -> MeasureReport {
        let traces = self.block_traces();
        let common = &traces[0];
        let homogeneous = !common.is_zero() && traces.iter().all(|t| t == common);
        let inv_tr = self.inverse_trace();
        let normalized = homogeneous && inv_tr == *common;
        let normalizable = homogeneous && !inv_tr.is_zero();
        MeasureReport {
            homogeneous,
            lambda_a: homogeneous.then(|| common.clone()),
            normalized,
            normalizable,
            xi_squared: normalizable.then(|| &inv_tr / common),
            positive: self.is_positive(),
        }
    }

    /// Every block Hermitian positive-definite, decided by leading minors.
    pub fn is_positive(&self) -> bool {
        self.blocks.iter().all(|b| {
            b.is_hermitian()
                && b.leading_minors().iter().all(|m| m.is_real() && m.re().is_positive())
        })
    }

    /// `δ̃(1)` as a coefficient table over pairs of basis positions.
    pub fn delta_tilde(&self) -> ExactMatrix {
        let n = self.algebra_dim();
        let mut out = Matrix::zeros(n, n);
        for (lambda, e) in self.blocks.iter().enumerate() {
            let d = e.rows();
            for k in 0..d {
                for l in 0..d {
                    for r in 0..d {
                        let c = &e[(l, r)];
                        if c.is_zero() {
                            continue;
                        }
                        let a = self.basis_position(BasisIndex { block: lambda, row: k, col: l });
                        let b = self.basis_position(BasisIndex { block: lambda, row: r, col: k });
                        out[(a, b)] = &out[(a, b)] + c;
                    }
                }
            }
        }
        out
    }

    /// `φ̃ = (tr_E∘m)∘(m⊗id)∘(id⊗δ̃)`, evaluated on each basis element.
    pub fn phi_tilde(&self) -> Vec<ExactScalar> {
        let basis = self.basis();
        let dt = self.delta_tilde();
        basis
            .iter()
            .map(|&x| {
                let mut acc = ExactScalar::zero();
                for (p, &a) in basis.iter().enumerate() {
                    let Some(xa) = Self::unit_product(x, a) else { continue };
                    for (q, &b) in basis.iter().enumerate() {
                        let c = &dt[(p, q)];
                        if c.is_zero() {
                            continue;
                        }
                        if let Some(xab) = Self::unit_product(xa, b) {
                            acc += &(c * &self.trace_form(xab).expect("in range"));
                        }
                    }
                }
                acc
            })
            .collect()
    }

    /// Blockwise `P_λ E_λ P_λ⁻¹`.
    pub fn conjugate(&self, p: &MultiMatrix) -> Result<MultiMatrix, MultiMatrixError> {
        if p.dims() != self.dims() {
            return Err(MultiMatrixError::ShapeMismatch);
        }
        let blocks = self
            .blocks
            .iter()
            .zip(&p.blocks)
            .enumerate()
            .map(|(k, (e, pb))| {
                let pi = pb.inverse().ok_or(MultiMatrixError::SingularP(k))?;
                Ok(pb.mul(e).mul(&pi))
            })
            .collect::<Result<Vec<_>, _>>()?;
        MultiMatrix::new(blocks)
    }

    pub fn triangularize(&self) -> Triangularization {
        let mut ps = Vec::new();
        let mut ts = Vec::new();
        for b in &self.blocks {
            match triangularize_block_exact(b) {
                Some((p, t)) => {
                    ps.push(p);
                    ts.push(t);
                }
                None => return triangularize_approx(&self.blocks),
            }
        }
        Triangularization::Exact {
            p: MultiMatrix::new(ps).expect("conjugator is invertible"),
            t: MultiMatrix::new(ts).expect("similar blocks stay invertible"),
        }
    }

    /// Roots of `q² − s·q + 1` with `s² = Tr(E⁻¹)·tr(E_1)`.
    pub fn q_parameter(&self) -> Result<QParameter, MultiMatrixError> {
        let report = self.measure_report();
        if !report.normalizable {
            return Err(MultiMatrixError::NotNormalizable);
        }
        let inv_tr = self.inverse_trace();
        let s_squared = &inv_tr * &self.block_traces()[0];
        let (s, sign_ambiguous) = if report.normalized {
            (Scalar::Exact(inv_tr), false)
        } else {
            (Scalar::Exact(s_squared.clone()).sqrt(), true)
        };
        let roots = solve_unit_quadratic(&s);
        Ok(QParameter { s_squared, s, roots, sign_ambiguous })
    }

    pub fn to_json(&self) -> MultiMatrixJson {
        MultiMatrixJson { blocks: self.blocks.iter().map(Matrix::to_rows).collect(), permutation: Some(self.permutation.clone()) }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MeasureReport {
    pub homogeneous: bool,
    pub lambda_a: Option<ExactScalar>,
    pub normalized: bool,
    pub normalizable: bool,
    pub xi_squared: Option<ExactScalar>,
    pub positive: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QParameter {
    pub s_squared: ExactScalar,
    pub s: Scalar,
    pub roots: UnitQuadraticRoots,
    pub sign_ambiguous: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MultiMatrixJson {
    pub blocks: Vec<Vec<Vec<ExactScalar>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub permutation: Option<Vec<usize>>,
}

impl TryFrom<MultiMatrixJson> for MultiMatrix {
    type Error = MultiMatrixError;

    fn try_from(j: MultiMatrixJson) -> Result<Self, MultiMatrixError> {
        let blocks = j
            .blocks
            .into_iter()
            .enumerate()
            .map(|(k, rows)| Matrix::from_rows(rows).ok_or(MultiMatrixError::NotSquare(k)))
            .collect::<Result<Vec<_>, _>>()?;
        let n = blocks.len();
        let mut m = MultiMatrix::new(blocks)?;
        if let Some(prev) = j.permutation.filter(|p| p.len() == n) {
            m.permutation = m.permutation.iter().map(|&k| prev[k]).collect();
        }
        Ok(m)
    }
}

pub enum Triangularization {
    Exact { p: MultiMatrix, t: MultiMatrix },
    Approximate { p: Vec<DMatrix<Complex64>>, t: Vec<DMatrix<Complex64>>, residual: f64 },
}

impl Triangularization {
    pub fn is_exact(&self) -> bool {
        matches!(self, Triangularization::Exact { .. })
    }
}

fn reversal(n: usize) -> ExactMatrix {
    Matrix::from_fn(n, n, |r, c| if r + c == n - 1 { ExactScalar::one() } else { ExactScalar::zero() })
}

fn triangularize_block_exact(e: &ExactMatrix) -> Option<(ExactMatrix, ExactMatrix)> {
    let n = e.rows();
    if e.is_lower_triangular() {
        return Some((Matrix::identity(n), e.clone()));
    }
    let mut eigs = exact_eigenvalues(e)?;
    eigs.sort_by(|a, b| b.im().cmp(a.im()).then_with(|| b.re().cmp(a.re())));
    let mut distinct = eigs.clone();
    distinct.dedup();
    let mut vectors = Vec::new();
    for lam in &distinct {
        vectors.extend(e.sub(&Matrix::identity(n).scale(lam)).nullspace());
    }
    if vectors.len() == n {
        let s = Matrix::from_fn(n, n, |r, c| vectors[c][r].clone());
        let si = s.inverse()?;
        return Some((si.clone(), si.mul(e).mul(&s)));
    }
    let s = upper_triangularizer(e, &eigs)?;
    let j = reversal(n);
    let p = j.mul(&s.inverse()?);
    let t = p.mul(e).mul(&s.mul(&j));
    Some((p, t))
}

/// `S` with `S⁻¹·A·S` upper triangular, given all eigenvalues exactly.
fn upper_triangularizer(a: &ExactMatrix, eigs: &[ExactScalar]) -> Option<ExactMatrix> {
    let n = a.rows();
    if n == 1 {
        return Some(Matrix::identity(1));
    }
    let lam = &eigs[0];
    let v = a.sub(&Matrix::identity(n).scale(lam)).nullspace().into_iter().next()?;
    let p = v.iter().position(|x| !x.is_zero())?;
    let others: Vec<usize> = (0..n).filter(|&k| k != p).collect();
    let s1 = Matrix::from_fn(n, n, |r, c| {
        if c == 0 {
            v[r].clone()
        } else if r == others[c - 1] {
            ExactScalar::one()
        } else {
            ExactScalar::zero()
        }
    });
    let b = s1.inverse()?.mul(a).mul(&s1);
    let sub = Matrix::from_fn(n - 1, n - 1, |r, c| b[(r + 1, c + 1)].clone());
    let s_sub = upper_triangularizer(&sub, &eigs[1..])?;
    let lift = Matrix::from_fn(n, n, |r, c| match (r, c) {
        (0, 0) => ExactScalar::one(),
        (0, _) | (_, 0) => ExactScalar::zero(),
        _ => s_sub[(r - 1, c - 1)].clone(),
    });
    Some(s1.mul(&lift))
}

fn to_dmatrix(m: &ExactMatrix) -> DMatrix<Complex64> {
    DMatrix::from_fn(m.rows(), m.cols(), |r, c| m[(r, c)].to_approx().0)
}

fn float_eigenvalues(m: &ExactMatrix) -> Vec<Complex64> {
    let schur = nalgebra::linalg::Schur::new(to_dmatrix(m));
    let (_, t) = schur.unpack();
    (0..m.rows()).map(|k| t[(k, k)]).collect()
}

/// Best rational approximation with denominator at most `max_den`.
fn rationalize(x: f64, max_den: i64) -> BigRational {
    let (mut h0, mut h1, mut k0, mut k1) = (0i128, 1i128, 1i128, 0i128);
    let mut v = x.abs();
    for _ in 0..64 {
        let a = v.floor() as i128;
        let (h2, k2) = (a * h1 + h0, a * k1 + k0);
        if k2 > max_den as i128 {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac = v - a as f64;
        if frac < 1e-12 {
            break;
        }
        v = 1.0 / frac;
    }
    let r = BigRational::new(BigInt::from(h1), BigInt::from(k1.max(1)));
    if x < 0.0 {
        -r
    } else {
        r
    }
}

fn poly_eval(p: &[ExactScalar], x: &ExactScalar) -> ExactScalar {
    p.iter().rev().fold(ExactScalar::zero(), |acc, c| &(&acc * x) + c)
}

/// Divides `p` by `(x − root)`; remainder must be zero.
fn deflate(p: &[ExactScalar], root: &ExactScalar) -> Vec<ExactScalar> {
    let n = p.len() - 1;
    let mut q = vec![ExactScalar::zero(); n];
    let mut carry = ExactScalar::zero();
    for k in (0..n).rev() {
        carry = &p[k + 1] + &(&carry * root);
        q[k] = carry.clone();
    }
    q
}

/// All eigenvalues with multiplicity, if each lies in Q(i).
fn exact_eigenvalues(e: &ExactMatrix) -> Option<Vec<ExactScalar>> {
    let mut poly = e.charpoly();
    let mut found = Vec::new();
    for z in float_eigenvalues(e) {
        let cand = ExactScalar::new(rationalize(z.re, 1_000_000), rationalize(z.im, 1_000_000));
        while poly.len() > 1 && poly_eval(&poly, &cand).is_zero() {
            poly = deflate(&poly, &cand);
            found.push(cand.clone());
        }
    }
    (found.len() == e.rows()).then_some(found)
}

fn triangularize_approx(blocks: &[ExactMatrix]) -> Triangularization {
    let mut ps = Vec::new();
    let mut ts = Vec::new();
    let mut residual: f64 = 0.0;
    for b in blocks {
        let n = b.rows();
        let a = to_dmatrix(b);
        let (q, _) = nalgebra::linalg::Schur::new(a.clone()).unpack();
        let j = DMatrix::from_fn(n, n, |r, c| if r + c == n - 1 { Complex64::one() } else { Complex64::zero() });
        let p = &j * q.adjoint();
        let t = &p * &a * (q * &j);
        for r in 0..n {
            for c in r + 1..n {
                residual = residual.max(t[(r, c)].norm());
            }
        }
        ps.push(p);
        ts.push(t);
    }
    Triangularization::Approximate { p: ps, t: ts, residual }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InvolutivePair {
    pub r: i8,
    pub tr_ff_star: ExactScalar,
    pub passes: bool,
}

/// Checks `F·conj(F) = R·I` with `R = ±1`, then the bound `tr(FF*) > 2` for size ≥ 3.
pub fn involutive_pair_check(f: &ExactMatrix, tol: f64) -> Result<InvolutivePair, MultiMatrixError> {
    if !f.is_square() {
        return Err(MultiMatrixError::ShapeMismatch);
    }
    let n = f.rows();
    let g = f.mul(&f.conj());
    let deviation = |r: i64| {
        let target = Matrix::identity(n).scale(&ExactScalar::from_int(r));
        let d = g.sub(&target);
        (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).map(|k| d[k].to_approx().abs()).fold(0.0, f64::max)
    };
    let (r, dev) = [1i64, -1].into_iter().map(|r| (r, deviation(r))).min_by(|a, b| a.1.total_cmp(&b.1)).expect("two candidates");
    if dev > tol {
        return Err(MultiMatrixError::NotInvolutivePair(dev));
    }
    let tr = f.mul(&f.adjoint()).trace();
    let two = BigRational::from_integer(2.into());
    let passes = n < 3 || (tr.is_real() && *tr.re() > two);
    Ok(InvolutivePair { r: r as i8, tr_ff_star: tr, passes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::exact_matrix;

    fn s(x: &str) -> ExactScalar {
        x.parse().unwrap()
    }

    fn fq2() -> MultiMatrix {
        MultiMatrix::diagonal(&[s("1/2"), s("2")]).unwrap()
    }

    fn two_plus_i2() -> MultiMatrix {
        MultiMatrix::new(vec![Matrix::identity(2), exact_matrix(&[&["2"]])]).unwrap()
    }

    #[test]
    fn blocks_sorted_with_permutation() {
        let m = two_plus_i2();
        assert_eq!(m.dims(), vec![1, 2]);
        assert_eq!(m.permutation(), &[1, 0]);
        let j = serde_json::to_string(&m.to_json()).unwrap();
        let back: MultiMatrix = serde_json::from_str::<MultiMatrixJson>(&j).unwrap().try_into().unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn trace_form_examples() {
        let i2 = MultiMatrix::identity(&[2]);
        assert_eq!(i2.trace_form(BasisIndex { block: 0, row: 0, col: 0 }), Ok(s("1")));
        assert_eq!(i2.trace_form(BasisIndex { block: 0, row: 0, col: 1 }), Ok(s("0")));
        assert_eq!(fq2().trace_form(BasisIndex { block: 0, row: 0, col: 0 }), Ok(s("2")));
        assert_eq!(i2.trace_form(BasisIndex { block: 1, row: 0, col: 0 }), Err(MultiMatrixError::IndexOutOfRange));
    }

    #[test]
    fn measure_reports() {
        let r = MultiMatrix::identity(&[2]).measure_report();
        assert!(r.homogeneous && r.normalized && r.normalizable && r.positive);
        assert_eq!(r.lambda_a, Some(s("2")));
        assert_eq!(r.xi_squared, Some(s("1")));

        let r = fq2().measure_report();
        assert!(r.normalized && r.positive);
        assert_eq!(r.lambda_a, Some(s("5/2")));

        let r = two_plus_i2().measure_report();
        assert!(r.homogeneous && !r.normalized && r.normalizable);
        assert_eq!(r.xi_squared, Some(s("5/4")));

        let r = MultiMatrix::diagonal(&[s("1"), s("-1")]).unwrap().measure_report();
        assert!(!r.homogeneous && !r.normalizable);
    }

    #[test]
    fn delta_tilde_examples() {
        let one = MultiMatrix::identity(&[1]).delta_tilde();
        assert_eq!(one, Matrix::identity(1));
        let d = fq2().delta_tilde();
        // positions: e11=0, e12=1, e21=2, e22=3
        let mut want = Matrix::zeros(4, 4);
        want[(0, 0)] = s("1/2");
        want[(2, 1)] = s("1/2");
        want[(1, 2)] = s("2");
        want[(3, 3)] = s("2");
        assert_eq!(d, want);
    }

    #[test]
    fn phi_tilde_examples() {
        let i2 = MultiMatrix::identity(&[2]);
        let pt = i2.phi_tilde();
        for (k, x) in i2.basis().into_iter().enumerate() {
            assert_eq!(pt[k], &s("2") * &i2.trace_form(x).unwrap());
        }
        assert_eq!(fq2().phi_tilde()[0], s("5"));
    }

    #[test]
    fn conjugate_examples() {
        let e = MultiMatrix::single(exact_matrix(&[&["1", "1"], &["0", "2"]])).unwrap();
        assert_eq!(e.conjugate(&MultiMatrix::identity(&[2])).unwrap(), e);
        let p = MultiMatrix::single(exact_matrix(&[&["1", "-1"], &["0", "1"]])).unwrap();
        assert_eq!(e.conjugate(&p).unwrap(), MultiMatrix::diagonal(&[s("1"), s("2")]).unwrap());
        assert_eq!(e.conjugate(&MultiMatrix::identity(&[3])), Err(MultiMatrixError::ShapeMismatch));
        let sing = MultiMatrix { blocks: vec![exact_matrix(&[&["1", "1"], &["1", "1"]])], inverses: vec![], permutation: vec![0] };
        assert_eq!(e.conjugate(&sing), Err(MultiMatrixError::SingularP(0)));
    }

    #[test]
    fn triangularize_examples() {
        let e = MultiMatrix::single(exact_matrix(&[&["1", "0"], &["3", "2"]])).unwrap();
        let Triangularization::Exact { p, t } = e.triangularize() else { panic!("exact expected") };
        assert_eq!(p, MultiMatrix::identity(&[2]));
        assert_eq!(t, e);

        let rot = MultiMatrix::single(exact_matrix(&[&["0", "1"], &["-1", "0"]])).unwrap();
        let Triangularization::Exact { p, t } = rot.triangularize() else { panic!("exact expected") };
        assert_eq!(t, MultiMatrix::diagonal(&[s("i"), s("-i")]).unwrap());
        assert_eq!(rot.conjugate(&p).unwrap(), t);

        // Jordan block: not diagonalizable, still exact.
        let jb = MultiMatrix::single(exact_matrix(&[&["2", "1", "0"], &["0", "2", "0"], &["1", "0", "3"]])).unwrap();
        let Triangularization::Exact { p, t } = jb.triangularize() else { panic!("exact expected") };
        assert!(t.is_lower_triangular());
        assert_eq!(jb.conjugate(&p).unwrap(), t);

        let irr = MultiMatrix::single(exact_matrix(&[&["1", "1"], &["1", "0"]])).unwrap();
        match irr.triangularize() {
            Triangularization::Approximate { residual, .. } => assert!(residual < 1e-9),
            Triangularization::Exact { .. } => panic!("golden-ratio eigenvalues are irrational"),
        }
    }

    #[test]
    fn q_parameter_examples() {
        let q = MultiMatrix::identity(&[2]).q_parameter().unwrap();
        assert_eq!(q.roots.roots, [Scalar::one(), Scalar::one()]);
        let q = fq2().q_parameter().unwrap();
        assert_eq!(q.roots.roots, [Scalar::Exact(s("2")), Scalar::Exact(s("1/2"))]);
        assert!(!q.sign_ambiguous);
        let q = two_plus_i2().q_parameter().unwrap();
        assert_eq!(q.s_squared, s("5"));
        assert!(q.roots.approximate && q.sign_ambiguous);
        assert!((q.s.approx().re() - 5f64.sqrt()).abs() < 1e-12);
        let bad = MultiMatrix::diagonal(&[s("1"), s("-1")]).unwrap();
        assert_eq!(bad.q_parameter().unwrap_err(), MultiMatrixError::NotNormalizable);
    }

    #[test]
    fn involutive_pairs() {
        let r = involutive_pair_check(&Matrix::identity(3), 1e-9).unwrap();
        assert_eq!((r.r, r.tr_ff_star.clone(), r.passes), (1, s("3"), true));
        let f = Matrix::from_fn(4, 4, |r, c| match (r, c) {
            (0, 2) | (1, 3) => s("1"),
            (2, 0) | (3, 1) => s("-1"),
            _ => s("0"),
        });
        let r = involutive_pair_check(&f, 1e-9).unwrap();
        assert_eq!((r.r, r.tr_ff_star.clone(), r.passes), (-1, s("4"), true));
        let r = involutive_pair_check(&Matrix::identity(2), 1e-9).unwrap();
        assert_eq!((r.tr_ff_star.clone(), r.passes), (s("2"), true));
        assert!(matches!(
            involutive_pair_check(&Matrix::diagonal(&[s("2"), s("1")]), 1e-9),
            Err(MultiMatrixError::NotInvolutivePair(_))
        ));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn small() -> impl Strategy<Value = ExactScalar> {
            (-4i64..5, 1i64..4, -2i64..3).prop_map(|(a, b, c)| ExactScalar::gaussian((a, b), (c, 1)))
        }

        fn block(d: usize) -> impl Strategy<Value = ExactMatrix> {
            proptest::collection::vec(small(), d * d)
                .prop_map(move |v| Matrix::from_fn(d, d, |r, c| v[r * d + c].clone()))
                .prop_filter("invertible", |m| !m.det().is_zero())
        }

        fn multi() -> impl Strategy<Value = MultiMatrix> {
            proptest::collection::vec(1usize..4, 1..3)
                .prop_flat_map(|dims| dims.into_iter().map(block).collect::<Vec<_>>())
                .prop_map(|b| MultiMatrix::new(b).unwrap())
        }

        fn with_conjugator() -> impl Strategy<Value = (MultiMatrix, MultiMatrix)> {
            multi().prop_flat_map(|e| {
                let p = e.dims().into_iter().map(block).collect::<Vec<_>>();
                (Just(e), p.prop_map(|b| MultiMatrix::new(b).unwrap()))
            })
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn phi_tilde_closed_form(e in multi()) {
                let pt = e.phi_tilde();
                let tr = e.block_traces();
                for (k, x) in e.basis().into_iter().enumerate() {
                    prop_assert_eq!(&pt[k], &(&tr[x.block] * &e.trace_form(x).unwrap()));
                }
            }

            #[test]
            fn delta_tilde_inverts_the_form(e in multi()) {
                let basis = e.basis();
                let n = basis.len();
                let form = Matrix::from_fn(n, n, |a, b| {
                    MultiMatrix::unit_product(basis[a], basis[b])
                        .map_or_else(ExactScalar::zero, |x| e.trace_form(x).unwrap())
                });
                let dt = e.delta_tilde();
                // left slot: Σ_p form(x, a_p) δ̃_{pq} = δ_{xq}
                prop_assert_eq!(form.mul(&dt), Matrix::identity(n));
                // right slot: Σ_q δ̃_{pq} form(a_q, y) = δ_{py}
                prop_assert_eq!(dt.mul(&form), Matrix::identity(n));
            }

            #[test]
            fn conjugation_invariance((e, p) in with_conjugator()) {
                let c = e.conjugate(&p).unwrap();
                prop_assert_eq!(c.measure_report().homogeneous, e.measure_report().homogeneous);
                prop_assert_eq!(c.measure_report().normalized, e.measure_report().normalized);
                prop_assert_eq!(c.inverse_trace(), e.inverse_trace());
                prop_assert_eq!(c.block_traces(), e.block_traces());
                prop_assert_eq!(c.q_parameter().ok(), e.q_parameter().ok());
            }

            #[test]
            fn rescaling(e in multi(), xi in small()) {
                prop_assume!(!xi.is_zero());
                let se = e.scale(&xi).unwrap();
                let r = e.measure_report();
                let sr = se.measure_report();
                prop_assert_eq!(sr.homogeneous, r.homogeneous);
                if r.normalizable {
                    prop_assert_eq!(sr.normalized, &xi * &xi == r.xi_squared.clone().unwrap());
                }
                prop_assert_eq!(se.phi_tilde(), e.phi_tilde());
            }

            #[test]
            fn triangularize_exact_when_possible(e in multi()) {
                match e.triangularize() {
                    Triangularization::Exact { p, t } => {
                        prop_assert!(t.is_lower_triangular());
                        prop_assert_eq!(e.conjugate(&p).unwrap(), t);
                    }
                    Triangularization::Approximate { residual, .. } => prop_assert!(residual < 1e-9),
                }
            }
        }
    }
}
