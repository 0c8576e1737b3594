//! Pairing data `(e, δ, C, D, τ, ω)` on a comodule `W`, the relation systems
//! it must satisfy, and the measured algebra `ℂ ⊕ W` folded out of it.
//!
//! Linear maps are stored as matrices acting on coordinate columns, with
//! `W⊗W` indexed by `i·n + j`. So `e` is `1×n²`, `δ` is `n²×1`, `C` is
//! `n×n²` and `D` is `n²×n`.

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::Matrix;
use crate::multimatrix::{BasisIndex, MultiMatrix, MultiMatrixError};
use crate::scalar::{ExactScalar, Scalar, DEFAULT_TOL};

type Mat = Matrix<Scalar>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ComoduleError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("τ = 1: the folded product is undefined")]
    TauIsOne,
    #[error("τ = {0}: the separability idempotent needs τ ∉ {{1, −1}}")]
    TauDegenerate(String),
    #[error("the bilinear form φ∘m is degenerate")]
    DegenerateForm,
    #[error("φ̃ is not proportional to φ: φ̃ = [{}]", .0.join(", "))]
    NotHomogeneous(Vec<String>),
    #[error("multimatrix is not normalizable")]
    NotNormalizable,
    #[error("dim A = {0} is below 4")]
    DimensionTooSmall(usize),
    #[error("pairing data carries no star map")]
    MissingStar,
    #[error(transparent)]
    MultiMatrix(#[from] MultiMatrixError),
}

/// `e(w_i⊗w_j) = e[i][j]`, `δ(1) = Σ delta[i][j] w_i⊗w_j`,
/// `C(w_i⊗w_j) = Σ_k C[i][j][k] w_k`, `D(w_k) = Σ D[k][i][j] w_i⊗w_j`,
/// `w_i* = Σ_k star[k][i] w_k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairingData {
    pub dim: usize,
    pub e: Vec<Vec<Scalar>>,
    pub delta: Vec<Vec<Scalar>>,
    #[serde(rename = "C")]
    pub c: Vec<Vec<Vec<Scalar>>>,
    #[serde(rename = "D", default, skip_serializing_if = "Option::is_none")]
    pub d: Option<Vec<Vec<Vec<Scalar>>>>,
    pub tau: Scalar,
    pub omega: Scalar,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub star: Option<Vec<Vec<Scalar>>>,
}

fn s(n: i64) -> Scalar {
    Scalar::from_int(n)
}

fn ratio(n: i64, d: i64) -> Scalar {
    Scalar::Exact(ExactScalar::ratio(n, d))
}

impl PairingData {
    /// The unit quaternions `e_1, e_2, e_3` spanning `ker tr ⊂ M_2(ℂ)`:
    /// `e = −2I`, `δ = −½I`, `C` the Levi-Civita symbol, `τ = 3`, star `e_k* = −e_k`.
    pub fn quaternion() -> Self {
        let n = 3;
        let diag = |v: Scalar| -> Vec<Vec<Scalar>> {
            (0..n).map(|i| (0..n).map(|j| if i == j { v.clone() } else { Scalar::zero() }).collect()).collect()
        };
        let mut c = vec![vec![vec![Scalar::zero(); n]; n]; n];
        for (i, j, k) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
            c[i][j][k] = s(1);
            c[j][i][k] = s(-1);
        }
        let mut data = PairingData {
            dim: n,
            e: diag(s(-2)),
            delta: diag(ratio(-1, 2)),
            c,
            d: None,
            tau: s(3),
            omega: s(1),
            star: Some(diag(s(-1))),
        };
        data.d = Some(derive_d(&data).expect("well-shaped"));
        data
    }

    pub fn validate(&self) -> Result<(), ComoduleError> {
        let n = self.dim;
        let square = |m: &Vec<Vec<Scalar>>, name: &str| {
            if m.len() != n || m.iter().any(|r| r.len() != n) {
                Err(ComoduleError::DimensionMismatch(format!("{name} must be {n}×{n}")))
            } else {
                Ok(())
            }
        };
        let cube = |t: &Vec<Vec<Vec<Scalar>>>, name: &str| {
            if t.len() != n || t.iter().any(|m| m.len() != n || m.iter().any(|r| r.len() != n)) {
                Err(ComoduleError::DimensionMismatch(format!("{name} must be {n}×{n}×{n}")))
            } else {
                Ok(())
            }
        };
        if n == 0 {
            return Err(ComoduleError::DimensionMismatch("dim must be positive".into()));
        }
        square(&self.e, "e")?;
        square(&self.delta, "delta")?;
        cube(&self.c, "C")?;
        if let Some(d) = &self.d {
            cube(d, "D")?;
        }
        if let Some(st) = &self.star {
            square(st, "star")?;
        }
        Ok(())
    }

    fn e_map(&self) -> Mat {
        let n = self.dim;
        Matrix::from_fn(1, n * n, |_, c| self.e[c / n][c % n].clone())
    }

    fn delta_map(&self) -> Mat {
        let n = self.dim;
        Matrix::from_fn(n * n, 1, |r, _| self.delta[r / n][r % n].clone())
    }

    fn c_map(&self) -> Mat {
        let n = self.dim;
        Matrix::from_fn(n, n * n, |k, c| self.c[c / n][c % n][k].clone())
    }

    fn star_map(&self) -> Option<Mat> {
        self.star.as_ref().map(|st| Matrix::from_rows(st.clone()).expect("validated"))
    }

    /// Supplied `D`, or the derived one when absent.
    fn d_map(&self) -> Mat {
        match &self.d {
            Some(d) => d_tensor_to_map(self.dim, d),
            None => derived_d_map(self),
        }
    }

    pub fn scale_c(&self, k: &Scalar) -> Self {
        let mut out = self.clone();
        for x in out.c.iter_mut().flatten().flatten() {
            *x = &*x * k;
        }
        out.d = None;
        out
    }
}

fn d_tensor_to_map(n: usize, d: &[Vec<Vec<Scalar>>]) -> Mat {
    Matrix::from_fn(n * n, n, |r, k| d[k][r / n][r % n].clone())
}

fn derived_d_map(data: &PairingData) -> Mat {
    let id = Matrix::identity(data.dim);
    id.kron(&data.c_map()).mul(&data.delta_map().kron(&id))
}

/// `D = (id⊗C)(δ⊗id)`, as `D[k][i][j]`.
pub fn derive_d(data: &PairingData) -> Result<Vec<Vec<Vec<Scalar>>>, ComoduleError> {
    data.validate()?;
    let n = data.dim;
    let m = derived_d_map(data);
    Ok((0..n).map(|k| (0..n).map(|i| (0..n).map(|j| m[(i * n + j, k)].clone()).collect()).collect()).collect())
}

/// `eδ`, the full contraction `Σ e_ij δ_ij`.
pub fn tau_of(data: &PairingData) -> Result<Scalar, ComoduleError> {
    data.validate()?;
    Ok(data.e_map().mul(&data.delta_map())[(0, 0)].clone())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RelationCheck {
    pub id: String,
    pub statement: &'static str,
    pub verdict: Verdict,
    /// Largest entry of `lhs − rhs` over the relation's equations.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RelationReport {
    pub tau: Scalar,
    pub checks: Vec<RelationCheck>,
}

impl RelationReport {
    pub fn get(&self, id: &str) -> Option<&RelationCheck> {
        self.checks.iter().find(|c| c.id == id)
    }

    pub fn passes(&self, id: &str) -> bool {
        self.get(id).is_some_and(|c| c.verdict == Verdict::Pass)
    }

    /// Every check that ran passed.
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.verdict != Verdict::Fail)
    }

    pub fn failures(&self) -> Vec<&str> {
        self.checks.iter().filter(|c| c.verdict == Verdict::Fail).map(|c| c.id.as_str()).collect()
    }
}

fn compare(eqs: &[(Mat, Mat)], tol: f64) -> (bool, f64) {
    let mut ok = true;
    let mut worst = 0.0f64;
    for (l, r) in eqs {
        assert_eq!((l.rows(), l.cols()), (r.rows(), r.cols()), "relation sides differ in shape");
        for i in 0..l.rows() {
            for j in 0..l.cols() {
                let diff = &l[(i, j)] - &r[(i, j)];
                ok &= diff.is_zero_within(tol);
                worst = worst.max(diff.residual());
            }
        }
    }
    (ok, worst)
}

fn checked(id: &str, statement: &'static str, eqs: Vec<(Mat, Mat)>, tol: f64) -> RelationCheck {
    let (ok, res) = compare(&eqs, tol);
    RelationCheck {
        id: id.into(),
        statement,
        verdict: if ok { Verdict::Pass } else { Verdict::Fail },
        residual: Some(res),
        note: None,
    }
}

fn skipped(id: &str, statement: &'static str, why: &str) -> RelationCheck {
    RelationCheck { id: id.into(), statement, verdict: Verdict::Skipped, residual: None, note: Some(why.into()) }
}

fn flag(id: &str, statement: &'static str, ok: bool, note: Option<String>) -> RelationCheck {
    RelationCheck { id: id.into(), statement, verdict: if ok { Verdict::Pass } else { Verdict::Fail }, residual: None, note }
}

pub fn verify_relations(data: &PairingData) -> Result<RelationReport, ComoduleError> {
    verify_relations_tol(data, DEFAULT_TOL)
}

/// Evaluates both sides of the compact relations (2a–2h, with `R = 1` and
/// `e* = δ`) and the ω-twisted ones (13a–13i) as explicit matrices.
pub fn verify_relations_tol(data: &PairingData, tol: f64) -> Result<RelationReport, ComoduleError> {
    data.validate()?;
    let n = data.dim;
    let id = Matrix::<Scalar>::identity(n);
    let id2 = Matrix::<Scalar>::identity(n * n);
    let e = data.e_map();
    let dl = data.delta_map();
    let c = data.c_map();
    let d = data.d_map();
    let tau = data.tau.clone();
    let w = data.omega.clone();
    let one = Matrix::<Scalar>::identity(1);

    let e_id = e.kron(&id);
    let id_e = id.kron(&e);
    let dl_id = dl.kron(&id);
    let id_dl = id.kron(&dl);
    let c_id = c.kron(&id);
    let id_c = id.kron(&c);
    let d_id = d.kron(&id);
    let id_d = id.kron(&d);

    let zigzag = vec![(e_id.mul(&id_dl), id.clone()), (id_e.mul(&dl_id), id.clone())];
    let normal = vec![(c.mul(&d), id.clone()), (e.mul(&dl), one.scale(&tau))];
    let killing = vec![(c.mul(&dl), Matrix::zeros(n, 1)), (e.mul(&d), Matrix::zeros(1, n))];
    let left_c = id_c.mul(&dl_id);
    let right_c = c_id.mul(&id_dl);

    let tau_minus_one = &tau - &s(1);
    let cubic = tau_minus_one.inv().map(|inv| {
        let neg = -&inv;
        let f_lhs = id_c.mul(&d_id);
        let f_mid = c_id.mul(&id_d);
        let f_rhs = id2.scale(&neg).add(&dl.mul(&e).scale(&inv)).add(&d.mul(&c));
        let g = (
            id_d.mul(&d),
            dl_id.scale(&inv).add(&id_dl.scale(&neg)).add(&d_id.mul(&d)),
        );
        let h = (
            c.mul(&id_c),
            id_e.scale(&neg).add(&e_id.scale(&inv)).add(&c.mul(&c_id)),
        );
        (vec![(f_lhs, f_mid.clone()), (f_mid, f_rhs)], vec![g], vec![h])
    });
    let omega_is_one = w.approx_eq(&s(1), tol);

    let mut checks = Vec::new();
    checks.push(flag(
        "tau-nonzero",
        "τ ≠ 0",
        !tau.is_zero_within(tol),
        None,
    ));
    let w3 = &(&w * &w) * &w;
    checks.push(flag("omega-cube-root", "ω³ = 1", w3.approx_eq(&s(1), tol), None));
    if !omega_is_one {
        checks.push(flag("omega-tau", "ω ≠ 1 forces τ = 2", tau.approx_eq(&s(2), tol), None));
    }

    checks.push(checked("2a", "(e⊗id)(id⊗e*) = id, (id⊗e)(e*⊗id) = id", zigzag.clone(), tol));
    checks.push(checked("2b", "CD = id, ee* = τ", normal.clone(), tol));
    checks.push(checked("2c", "Ce* = 0, eD = 0", killing.clone(), tol));
    checks.push(checked(
        "2d",
        "e(C⊗id) = e(id⊗C), (id⊗C)(e*⊗id) = (C⊗id)(id⊗e*)",
        vec![(e.mul(&c_id), e.mul(&id_c)), (left_c.clone(), right_c.clone())],
        tol,
    ));
    checks.push(checked(
        "2e",
        "(id⊗D)e* = (D⊗id)e*, (id⊗e)(D⊗id) = (e⊗id)(id⊗D)",
        vec![(id_d.mul(&dl), d_id.mul(&dl)), (id_e.mul(&d_id), e_id.mul(&id_d))],
        tol,
    ));
    const F: &str = "(id⊗C)(D⊗id) = (C⊗id)(id⊗D) = (1−τ)⁻¹id + (τ−1)⁻¹e*e + DC";
    const G: &str = "(id⊗D)D = (τ−1)⁻¹(e*⊗id) + (1−τ)⁻¹(id⊗e*) + (D⊗id)D";
    const H: &str = "C(id⊗C) = (1−τ)⁻¹(id⊗e) + (τ−1)⁻¹(e⊗id) + C(C⊗id)";
    let cubic_checks = |ids: [&str; 3]| -> Vec<RelationCheck> {
        match (&cubic, omega_is_one) {
            (Some((f, g, h)), true) => vec![
                checked(ids[0], F, f.clone(), tol),
                checked(ids[1], G, g.clone(), tol),
                checked(ids[2], H, h.clone(), tol),
            ],
            (None, _) => ids.iter().zip([F, G, H]).map(|(i, st)| skipped(i, st, "τ = 1")).collect(),
            (_, false) => ids.iter().zip([F, G, H]).map(|(i, st)| skipped(i, st, "ω ≠ 1")).collect(),
        }
    };
    checks.extend(cubic_checks(["2f", "2g", "2h"]));

    checks.push(checked("13a", "(e⊗id)(id⊗δ) = id, (id⊗e)(δ⊗id) = id", zigzag, tol));
    checks.push(checked("13b", "D = (id⊗C)(δ⊗id)", vec![(d.clone(), derived_d_map(data))], tol));
    checks.push(checked("13c", "CD = id, eδ = τ", normal, tol));
    checks.push(checked("13d", "Cδ = 0, eD = 0", killing, tol));
    checks.push(checked(
        "13e",
        "(id⊗C)(δ⊗id) = ω(C⊗id)(id⊗δ), e(C⊗id) = ωe(id⊗C)",
        vec![(left_c, right_c.scale(&w)), (e.mul(&c_id), e.mul(&id_c).scale(&w))],
        tol,
    ));
    checks.push(checked(
        "13f",
        "(id⊗e)(D⊗id) = ω(e⊗id)(id⊗D), (id⊗D)δ = ω(D⊗id)δ",
        vec![(id_e.mul(&d_id), e_id.mul(&id_d).scale(&w)), (id_d.mul(&dl), d_id.mul(&dl).scale(&w))],
        tol,
    ));
    checks.extend(cubic_checks(["13g", "13h", "13i"]));
    Ok(RelationReport { tau, checks })
}

/// `ℂ ⊕ W` with basis `a_0 = 1`, `a_{i+1} = w_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct FoldedAlgebra {
    dim: usize,
    /// `table[(a·dim + b)·dim + c]` is the `a_c` coefficient of `a_a·a_b`.
    table: Vec<Scalar>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FoldedAlgebraJson {
    pub dim: usize,
    pub unit: Vec<Scalar>,
    pub measure: Vec<Scalar>,
    /// `products[a][b]` lists the coordinates of `a_a·a_b`.
    pub products: Vec<Vec<Vec<Scalar>>>,
}

impl FoldedAlgebra {
    pub fn from_table(dim: usize, table: Vec<Scalar>) -> Self {
        assert_eq!(table.len(), dim * dim * dim);
        FoldedAlgebra { dim, table }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn product(&self, a: usize, b: usize) -> &[Scalar] {
        let start = (a * self.dim + b) * self.dim;
        &self.table[start..start + self.dim]
    }

    pub fn unit(&self) -> Vec<Scalar> {
        basis_vector(self.dim, 0)
    }

    /// `φ(λ, v) = λ`.
    pub fn measure(&self, x: &[Scalar]) -> Scalar {
        x[0].clone()
    }

    pub fn mul(&self, x: &[Scalar], y: &[Scalar]) -> Vec<Scalar> {
        let mut out = vec![Scalar::zero(); self.dim];
        for (a, xa) in x.iter().enumerate() {
            if xa.is_zero_within(0.0) {
                continue;
            }
            for (b, yb) in y.iter().enumerate() {
                if yb.is_zero_within(0.0) {
                    continue;
                }
                let k = xa * yb;
                for (o, p) in out.iter_mut().zip(self.product(a, b)) {
                    *o = &*o + &(&k * p);
                }
            }
        }
        out
    }

    pub fn to_json(&self) -> FoldedAlgebraJson {
        let mut measure = vec![Scalar::zero(); self.dim];
        measure[0] = Scalar::one();
        FoldedAlgebraJson {
            dim: self.dim,
            unit: self.unit(),
            measure,
            products: (0..self.dim).map(|a| (0..self.dim).map(|b| self.product(a, b).to_vec()).collect()).collect(),
        }
    }

    /// Left multiplication by `a_x` as a matrix on coordinates.
    fn left_mult(&self, x: usize) -> Mat {
        Matrix::from_fn(self.dim, self.dim, |c, b| self.product(x, b)[c].clone())
    }

    /// Nondegeneracy of the regular trace form `Tr(L_a L_b)`.
    pub fn is_semisimple(&self) -> bool {
        let tr: Vec<Scalar> = (0..self.dim).map(|c| self.left_mult(c).trace()).collect();
        let gram = Matrix::from_fn(self.dim, self.dim, |a, b| {
            self.product(a, b).iter().zip(&tr).fold(Scalar::zero(), |acc, (p, t)| &acc + &(p * t))
        });
        !gram.det().is_zero()
    }

    pub fn center_dim(&self) -> usize {
        let n = self.dim;
        // Row (b, c) of the commutator map z ↦ z·a_b − a_b·z.
        let m = Matrix::from_fn(n * n, n, |r, z| {
            let (b, c) = (r / n, r % n);
            &self.product(z, b)[c] - &self.product(b, z)[c]
        });
        n - m.rank()
    }
}

fn basis_vector(n: usize, k: usize) -> Vec<Scalar> {
    let mut v = vec![Scalar::zero(); n];
    v[k] = Scalar::one();
    v
}

/// `(λ,v)(μ,w) = (λμ + (τ−1)⁻¹e(v⊗w), λw + μv + C(v⊗w))`.
pub fn fold_algebra(data: &PairingData) -> Result<FoldedAlgebra, ComoduleError> {
    data.validate()?;
    let n = data.dim;
    let dim = n + 1;
    let scale = (&data.tau - &s(1)).inv().ok_or(ComoduleError::TauIsOne)?;
    let mut table = vec![Scalar::zero(); dim * dim * dim];
    let at = |a: usize, b: usize, c: usize| (a * dim + b) * dim + c;
    for a in 0..dim {
        table[at(0, a, a)] = Scalar::one();
        table[at(a, 0, a)] = Scalar::one();
    }
    for i in 0..n {
        for j in 0..n {
            table[at(i + 1, j + 1, 0)] = &scale * &data.e[i][j];
            for k in 0..n {
                table[at(i + 1, j + 1, k + 1)] = data.c[i][j][k].clone();
            }
        }
    }
    Ok(FoldedAlgebra { dim, table })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AssociativityWitness {
    pub triple: (usize, usize, usize),
    pub left: Vec<Scalar>,
    pub right: Vec<Scalar>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Associativity {
    Associative,
    Fails(AssociativityWitness),
}

impl Associativity {
    pub fn holds(&self) -> bool {
        matches!(self, Associativity::Associative)
    }
}

pub fn check_associativity(alg: &FoldedAlgebra) -> Associativity {
    check_associativity_tol(alg, DEFAULT_TOL)
}

/// `(a_x a_y) a_z = a_x (a_y a_z)` over all basis triples; first failure wins.
pub fn check_associativity_tol(alg: &FoldedAlgebra, tol: f64) -> Associativity {
    let n = alg.dim;
    for x in 0..n {
        for y in 0..n {
            let xy = alg.product(x, y).to_vec();
            for z in 0..n {
                let left = alg.mul(&xy, &basis_vector(n, z));
                let right = alg.mul(&basis_vector(n, x), alg.product(y, z));
                if left.iter().zip(&right).any(|(l, r)| !l.approx_eq(r, tol)) {
                    return Associativity::Fails(AssociativityWitness { triple: (x, y, z), left, right });
                }
            }
        }
    }
    Associativity::Associative
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Separability {
    /// `r = Σ r[a][b] a_a⊗a_b`.
    pub r: Vec<Vec<Scalar>>,
    pub multiplies_to_unit: bool,
    /// Basis elements `a` with `a·r ≠ r·a`.
    pub noncentral: Vec<usize>,
}

impl Separability {
    pub fn holds(&self) -> bool {
        self.multiplies_to_unit && self.noncentral.is_empty()
    }
}

/// `r = (τ+1)⁻¹(1⊗1 + (τ−1)δ(1))`, checked for `m(r) = 1` and `a·r = r·a`.
pub fn separability_idempotent(alg: &FoldedAlgebra, data: &PairingData) -> Result<Separability, ComoduleError> {
    data.validate()?;
    let tau = &data.tau;
    let degenerate = || ComoduleError::TauDegenerate(tau.to_string());
    let inv_plus = (tau + &s(1)).inv().ok_or_else(degenerate)?;
    let minus = tau - &s(1);
    if minus.is_zero_within(DEFAULT_TOL) {
        return Err(degenerate());
    }
    let n = alg.dim;
    if n != data.dim + 1 {
        return Err(ComoduleError::DimensionMismatch("algebra and data disagree".into()));
    }
    let mut r = vec![vec![Scalar::zero(); n]; n];
    r[0][0] = inv_plus.clone();
    let k = &inv_plus * &minus;
    for i in 0..data.dim {
        for j in 0..data.dim {
            r[i + 1][j + 1] = &k * &data.delta[i][j];
        }
    }
    let mut mr = vec![Scalar::zero(); n];
    for (a, row) in r.iter().enumerate() {
        for (b, rab) in row.iter().enumerate() {
            for (o, p) in mr.iter_mut().zip(alg.product(a, b)) {
                *o = &*o + &(rab * p);
            }
        }
    }
    let unit = alg.unit();
    let multiplies_to_unit = mr.iter().zip(&unit).all(|(x, y)| x.approx_eq(y, DEFAULT_TOL));
    let noncentral = (0..n)
        .filter(|&x| {
            // (a_x·r)[p][c] = Σ_b r_bc (a_x a_b)_p; (r·a_x)[b][p] = Σ_c r_bc (a_c a_x)_p.
            (0..n).any(|p| {
                (0..n).any(|q| {
                    let left = (0..n).fold(Scalar::zero(), |acc, b| &acc + &(&r[b][q] * &alg.product(x, b)[p]));
                    let right = (0..n).fold(Scalar::zero(), |acc, c| &acc + &(&r[p][c] * &alg.product(c, x)[q]));
                    !left.approx_eq(&right, DEFAULT_TOL)
                })
            })
        })
        .collect();
    Ok(Separability { r, multiplies_to_unit, noncentral })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Homogeneity {
    pub c: Scalar,
    pub phi_tilde: Vec<Scalar>,
}

/// Builds `δ̃` from the inverse of `B_ij = φ(a_i a_j)`, evaluates
/// `φ̃(x) = Σ (B⁻¹)_jk φ(x a_j a_k)` and returns `c` with `φ̃ = c·φ`.
pub fn check_homogeneity_folded(alg: &FoldedAlgebra) -> Result<Homogeneity, ComoduleError> {
    let n = alg.dim;
    let gram = Matrix::from_fn(n, n, |i, j| alg.measure(alg.product(i, j)));
    let inv = gram.inverse().ok_or(ComoduleError::DegenerateForm)?;
    let phi_tilde: Vec<Scalar> = (0..n)
        .map(|x| {
            let mut acc = Scalar::zero();
            for j in 0..n {
                let xj = alg.product(x, j).to_vec();
                for k in 0..n {
                    let w = &inv[(j, k)];
                    if w.is_zero_within(0.0) {
                        continue;
                    }
                    acc = &acc + &(w * &alg.measure(&alg.mul(&xj, &basis_vector(n, k))));
                }
            }
            acc
        })
        .collect();
    if phi_tilde[1..].iter().any(|v| !v.is_zero_within(DEFAULT_TOL)) {
        return Err(ComoduleError::NotHomogeneous(phi_tilde.iter().map(|v| v.to_string()).collect()));
    }
    Ok(Homogeneity { c: phi_tilde[0].clone(), phi_tilde })
}

/// `φ(x*x) > 0` on `A = ℂ ⊕ W` with `(λ, v)* = (conj λ, v*)`, decided by the
/// leading minors of `H_ab = φ(a_a* a_b)`.
pub fn measure_positive(alg: &FoldedAlgebra, data: &PairingData) -> Result<bool, ComoduleError> {
    data.validate()?;
    let star = data.star_map().ok_or(ComoduleError::MissingStar)?;
    let n = alg.dim;
    if n != data.dim + 1 {
        return Err(ComoduleError::DimensionMismatch("algebra and data disagree".into()));
    }
    let starred = |a: usize| -> Vec<Scalar> {
        if a == 0 {
            return alg.unit();
        }
        let mut v = vec![Scalar::zero(); n];
        for k in 0..data.dim {
            v[k + 1] = star[(k, a - 1)].clone();
        }
        v
    };
    let h = Matrix::from_fn(n, n, |a, b| alg.measure(&alg.mul(&starred(a), &basis_vector(n, b))));
    Ok(h.is_hermitian()
        && h.leading_minors().iter().all(|m| {
            let a = m.approx();
            a.im().abs() <= DEFAULT_TOL && a.re() > DEFAULT_TOL
        }))
}

/// How the star matrix extends from basis vectors to all of `W`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Extension {
    Antilinear,
    Linear,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StarReport {
    pub checks: Vec<RelationCheck>,
    pub sample_count: usize,
}

impl StarReport {
    pub fn passes(&self, id: &str) -> bool {
        self.checks.iter().any(|c| c.id == id && c.verdict == Verdict::Pass)
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.verdict == Verdict::Pass)
    }
}

pub fn check_star_structure(data: &PairingData) -> Result<StarReport, ComoduleError> {
    data.validate()?;
    let star = data.star_map().ok_or(ComoduleError::MissingStar)?;
    check_star(data, &star, Extension::Antilinear)
}

fn sample_vectors(n: usize) -> Vec<Vec<Scalar>> {
    let i = Scalar::Exact(ExactScalar::i());
    let mut out = Vec::new();
    for k in 0..n {
        out.push(basis_vector(n, k));
        let mut v = vec![Scalar::zero(); n];
        v[k] = i.clone();
        out.push(v);
    }
    for k in 0..n {
        for l in k + 1..n {
            let mut v = basis_vector(n, k);
            v[l] = Scalar::one();
            out.push(v.clone());
            v[l] = i.clone();
            out.push(v);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..4 {
        out.push(
            (0..n)
                .map(|_| {
                    let re = (rng.gen_range(-5..=5), rng.gen_range(1..=4));
                    let im = (rng.gen_range(-5..=5), rng.gen_range(1..=4));
                    Scalar::Exact(ExactScalar::gaussian(re, im))
                })
                .collect(),
        );
    }
    out.retain(|v| v.iter().any(|x| !x.is_zero_within(0.0)));
    out
}

/// Checks the star relations: `w** = w` (3a), `e(v*⊗w*) = conj e(w⊗v)` (3b),
/// `e(w⊗w*) > 0` (3c) and `C(v*⊗w*) = C(w⊗v)*` (3d).
pub fn check_star(data: &PairingData, star: &Mat, ext: Extension) -> Result<StarReport, ComoduleError> {
    data.validate()?;
    let n = data.dim;
    if star.rows() != n || star.cols() != n {
        return Err(ComoduleError::DimensionMismatch(format!("star must be {n}×{n}")));
    }
    let tol = DEFAULT_TOL;
    let apply = |v: &[Scalar]| -> Vec<Scalar> {
        match ext {
            Extension::Antilinear => star.mul_vec(&v.iter().map(Scalar::conj).collect::<Vec<_>>()),
            Extension::Linear => star.mul_vec(v),
        }
    };
    let pair = |v: &[Scalar], w: &[Scalar]| -> Scalar {
        let mut acc = Scalar::zero();
        for i in 0..n {
            for j in 0..n {
                acc = &acc + &(&(&v[i] * &w[j]) * &data.e[i][j]);
            }
        }
        acc
    };
    let prod = |v: &[Scalar], w: &[Scalar]| -> Vec<Scalar> {
        (0..n)
            .map(|k| {
                let mut acc = Scalar::zero();
                for i in 0..n {
                    for j in 0..n {
                        acc = &acc + &(&(&v[i] * &w[j]) * &data.c[i][j][k]);
                    }
                }
                acc
            })
            .collect()
    };
    let gap = |a: &[Scalar], b: &[Scalar]| a.iter().zip(b).map(|(x, y)| (x - y).residual()).fold(0.0, f64::max);

    let samples = sample_vectors(n);
    let stars: Vec<Vec<Scalar>> = samples.iter().map(|v| apply(v)).collect();
    let mut res_a = 0.0f64;
    for (v, vs) in samples.iter().zip(&stars) {
        res_a = res_a.max(gap(&apply(vs), v));
    }
    let (mut res_b, mut res_d) = (0.0f64, 0.0f64);
    for (v, vs) in samples.iter().zip(&stars) {
        for (w, ws) in samples.iter().zip(&stars) {
            res_b = res_b.max((&pair(vs, ws) - &pair(w, v).conj()).residual());
            res_d = res_d.max(gap(&prod(vs, ws), &apply(&prod(w, v))));
        }
    }
    let sample_positive = samples.iter().zip(&stars).all(|(w, ws)| {
        let h = pair(w, ws).approx();
        h.im().abs() <= tol && h.re() > tol
    });
    // h(w) = conj(λ)ᵀ H λ with H_ji = e(w_i⊗w_j*), for the antilinear extension.
    let (gram_positive, gram_note) = match ext {
        Extension::Antilinear => {
            let h = Matrix::from_fn(n, n, |j, i| pair(&basis_vector(n, i), &stars[2 * j]));
            let pd = h.is_hermitian()
                && h.leading_minors().iter().all(|m| {
                    let a = m.approx();
                    a.im().abs() <= tol && a.re() > tol
                });
            (pd, None)
        }
        Extension::Linear => (true, Some("form is bilinear; Gram test not applicable".to_string())),
    };
    let verdict = |ok: bool| if ok { Verdict::Pass } else { Verdict::Fail };
    let checks = vec![
        RelationCheck { id: "3a".into(), statement: "w** = w", verdict: verdict(res_a <= tol), residual: Some(res_a), note: None },
        RelationCheck {
            id: "3b".into(),
            statement: "e(v*⊗w*) = conj(e(w⊗v))",
            verdict: verdict(res_b <= tol),
            residual: Some(res_b),
            note: None,
        },
        RelationCheck {
            id: "3c".into(),
            statement: "e(w⊗w*) > 0",
            verdict: verdict(sample_positive && gram_positive),
            residual: None,
            note: gram_note,
        },
        RelationCheck {
            id: "3d".into(),
            statement: "C(v*⊗w*) = C(w⊗v)*",
            verdict: verdict(res_d <= tol),
            residual: Some(res_d),
            note: None,
        },
    ];
    Ok(StarReport { checks, sample_count: samples.len() })
}

/// Splits `A_E = ℂ1 ⊕ ker φ` for `φ = tr_E / Tr(E⁻¹)` and reads `e`, `C` off
/// the product, so that folding the result gives back `A_E`.
#[derive(Clone, Debug, PartialEq)]
pub struct Reconstruction {
    pub data: PairingData,
    /// Kernel basis `w_b` in matrix-unit coordinates of `A_E`.
    pub kernel_basis: Vec<Vec<ExactScalar>>,
}

pub fn reconstruct_from_multimatrix(e: &MultiMatrix) -> Result<Reconstruction, ComoduleError> {
    let dim = e.algebra_dim();
    if dim < 4 {
        return Err(ComoduleError::DimensionTooSmall(dim));
    }
    if !e.measure_report().normalizable {
        return Err(ComoduleError::NotNormalizable);
    }
    let basis = e.basis();
    let total = e.inverse_trace();
    let phi: Vec<ExactScalar> = basis.iter().map(|&x| &e.trace_form(x).expect("in range") / &total).collect();
    let pivot = phi.iter().position(|v| !v.is_zero()).ok_or(ComoduleError::NotNormalizable)?;
    let kernel: Vec<usize> = (0..dim).filter(|&b| b != pivot).collect();
    let kernel_basis: Vec<Vec<ExactScalar>> = kernel
        .iter()
        .map(|&b| {
            let mut v = vec![ExactScalar::zero(); dim];
            v[b] = ExactScalar::one();
            v[pivot] = -(&phi[b] / &phi[pivot]);
            v
        })
        .collect();
    let mut unit = vec![ExactScalar::zero(); dim];
    for (k, x) in basis.iter().enumerate() {
        if x.row == x.col {
            unit[k] = ExactScalar::one();
        }
    }
    let mul = |x: &[ExactScalar], y: &[ExactScalar]| -> Vec<ExactScalar> {
        let mut out = vec![ExactScalar::zero(); dim];
        for (a, xa) in x.iter().enumerate().filter(|(_, v)| !v.is_zero()) {
            for (b, yb) in y.iter().enumerate().filter(|(_, v)| !v.is_zero()) {
                if let Some(ab) = MultiMatrix::unit_product(basis[a], basis[b]) {
                    let p = e.basis_position(ab);
                    out[p] += &(xa * yb);
                }
            }
        }
        out
    };
    let measure = |x: &[ExactScalar]| x.iter().zip(&phi).fold(ExactScalar::zero(), |acc, (a, b)| &acc + &(a * b));

    let n = dim - 1;
    let mut bform = Matrix::<ExactScalar>::zeros(n, n);
    let mut c = vec![vec![vec![Scalar::zero(); n]; n]; n];
    for i in 0..n {
        for j in 0..n {
            let p = mul(&kernel_basis[i], &kernel_basis[j]);
            let b = measure(&p);
            for (k, &pos) in kernel.iter().enumerate() {
                c[i][j][k] = Scalar::Exact(&p[pos] - &(&b * &unit[pos]));
            }
            bform[(i, j)] = b;
        }
    }
    let binv = bform.inverse().ok_or(ComoduleError::DegenerateForm)?;
    let mut tau = ExactScalar::zero();
    for i in 0..n {
        for j in 0..n {
            tau += &(&bform[(i, j)] * &binv[(i, j)]);
        }
    }
    let t1 = &tau - &ExactScalar::one();
    let t1_inv = t1.inv().ok_or(ComoduleError::TauIsOne)?;
    let to_rows = |m: &Matrix<ExactScalar>, k: &ExactScalar| -> Vec<Vec<Scalar>> {
        (0..n).map(|i| (0..n).map(|j| Scalar::Exact(&m[(i, j)] * k)).collect()).collect()
    };
    let mut data = PairingData {
        dim: n,
        e: to_rows(&bform, &t1),
        delta: to_rows(&binv, &t1_inv),
        c,
        d: None,
        tau: Scalar::Exact(tau),
        omega: Scalar::one(),
        star: None,
    };
    data.d = Some(derive_d(&data)?);
    Ok(Reconstruction { data, kernel_basis })
}

/// Structure constants of `A_E` in the basis `{1} ∪ {w_b}` of a reconstruction.
pub fn multimatrix_table(e: &MultiMatrix, rec: &Reconstruction) -> FoldedAlgebra {
    let dim = e.algebra_dim();
    let basis: Vec<BasisIndex> = e.basis();
    let mut unit = vec![ExactScalar::zero(); dim];
    for (k, x) in basis.iter().enumerate() {
        if x.row == x.col {
            unit[k] = ExactScalar::one();
        }
    }
    let mut vectors = vec![unit];
    vectors.extend(rec.kernel_basis.iter().cloned());
    // Change of basis: columns are the new basis vectors.
    let change = Matrix::from_fn(dim, dim, |r, c| vectors[c][r].clone());
    let back = change.inverse().expect("basis");
    let mut table = Vec::with_capacity(dim * dim * dim);
    for x in &vectors {
        for y in &vectors {
            let mut p = vec![ExactScalar::zero(); dim];
            for (a, xa) in x.iter().enumerate().filter(|(_, v)| !v.is_zero()) {
                for (b, yb) in y.iter().enumerate().filter(|(_, v)| !v.is_zero()) {
                    if let Some(ab) = MultiMatrix::unit_product(basis[a], basis[b]) {
                        p[e.basis_position(ab)] += &(xa * yb);
                    }
                }
            }
            table.extend(back.mul_vec(&p).into_iter().map(Scalar::Exact));
        }
    }
    FoldedAlgebra::from_table(dim, table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::exact_matrix;
    use proptest::prelude::*;

    fn q() -> PairingData {
        PairingData::quaternion()
    }

    fn diag_mm(entries: &[(i64, i64)]) -> MultiMatrix {
        MultiMatrix::diagonal(&entries.iter().map(|&(a, b)| ExactScalar::ratio(a, b)).collect::<Vec<_>>()).unwrap()
    }

    fn single(rows: &[&[&str]]) -> MultiMatrix {
        MultiMatrix::single(exact_matrix(rows)).unwrap()
    }

    #[test]
    fn quaternion_d_is_half_the_displayed_map_negated() {
        let d = derive_d(&q()).unwrap();
        // D(e_1) = −½ Σ_{p≠1} ε_{1p} e_{⟨1p⟩}⊗e_p: ε_12 e_3⊗e_2 and ε_13 e_2⊗e_3.
        assert_eq!(d[0][2][1], ratio(-1, 2));
        assert_eq!(d[0][1][2], ratio(1, 2));
        assert_eq!(d[0][0][0], s(0));
    }

    #[test]
    fn zero_c_gives_zero_d() {
        let data = q().scale_c(&s(0));
        assert!(derive_d(&data).unwrap().iter().flatten().flatten().all(|x| x.is_zero()));
    }

    #[test]
    fn quaternion_passes_every_relation() {
        let report = verify_relations(&q()).unwrap();
        assert!(report.all_pass(), "{:?}", report.failures());
        for id in ["2a", "2b", "2c", "2d", "2e", "2f", "2g", "2h", "13e", "13i"] {
            let c = report.get(id).unwrap();
            assert_eq!(c.verdict, Verdict::Pass);
            assert_eq!(c.residual, Some(0.0));
        }
    }

    #[test]
    fn scaled_c_breaks_cd() {
        let data = q().scale_c(&s(2));
        let report = verify_relations(&data).unwrap();
        assert!(!report.passes("2b"));
        let m = data.c_map().mul(&data.d_map());
        assert_eq!(m, Matrix::identity(3).scale(&s(4)));
    }

    #[test]
    fn tau_values() {
        assert_eq!(tau_of(&q()).unwrap(), s(3));
        let mut zero = q();
        zero.delta = vec![vec![s(0); 3]; 3];
        assert_eq!(tau_of(&zero).unwrap(), s(0));
        zero.tau = s(0);
        assert!(!verify_relations(&zero).unwrap().passes("tau-nonzero"));
    }

    #[test]
    fn fold_quaternion_is_m2() {
        let alg = fold_algebra(&q()).unwrap();
        assert_eq!(alg.dim(), 4);
        assert_eq!(alg.product(1, 1), &[s(-1), s(0), s(0), s(0)]);
        assert_eq!(alg.product(1, 2), &[s(0), s(0), s(0), s(1)]);
        assert_eq!(alg.mul(&alg.unit(), &alg.unit()), alg.unit());
        assert!(check_associativity(&alg).holds());
        assert!(alg.is_semisimple());
        assert_eq!(alg.center_dim(), 1);
    }

    #[test]
    fn fold_rejects_tau_one() {
        let mut data = q();
        data.tau = s(1);
        assert_eq!(fold_algebra(&data), Err(ComoduleError::TauIsOne));
    }

    #[test]
    fn scaled_c_fold_has_witness() {
        let alg = fold_algebra(&q().scale_c(&s(2))).unwrap();
        match check_associativity(&alg) {
            Associativity::Fails(w) => assert_ne!(w.left, w.right),
            Associativity::Associative => panic!("expected a witness"),
        }
    }

    #[test]
    fn one_dimensional_w() {
        let data = PairingData {
            dim: 1,
            e: vec![vec![s(2)]],
            delta: vec![vec![ratio(1, 2)]],
            c: vec![vec![vec![s(0)]]],
            d: None,
            tau: s(1),
            omega: s(1),
            star: None,
        };
        assert_eq!(fold_algebra(&data), Err(ComoduleError::TauIsOne));
        let data = PairingData { tau: s(3), ..data };
        let alg = fold_algebra(&data).unwrap();
        assert!(check_associativity(&alg).holds());
        assert_eq!(alg.center_dim(), 2);
    }

    #[test]
    fn separability_quaternion() {
        let data = q();
        let alg = fold_algebra(&data).unwrap();
        let sep = separability_idempotent(&alg, &data).unwrap();
        assert!(sep.holds());
        assert_eq!(sep.r[0][0], ratio(1, 4));
        assert_eq!(sep.r[1][1], ratio(-1, 4));
        let mut bad = data.clone();
        bad.tau = s(-1);
        assert!(matches!(separability_idempotent(&alg, &bad), Err(ComoduleError::TauDegenerate(_))));
    }

    #[test]
    fn homogeneity_quaternion() {
        let alg = fold_algebra(&q()).unwrap();
        assert_eq!(check_homogeneity_folded(&alg).unwrap().c, s(4));
    }

    #[test]
    fn perturbed_e_breaks_homogeneity() {
        let mut data = q();
        data.e[0][1] = s(1);
        let alg = fold_algebra(&data).unwrap();
        assert!(matches!(
            check_homogeneity_folded(&alg),
            Err(ComoduleError::NotHomogeneous(_) | ComoduleError::DegenerateForm)
        ));
    }

    #[test]
    fn star_quaternion() {
        let report = check_star_structure(&q()).unwrap();
        assert!(report.all_pass(), "{:?}", report.checks);
        let data = q();
        assert!(measure_positive(&fold_algebra(&data).unwrap(), &data).unwrap());
    }

    #[test]
    fn star_sign_flip_fails_positivity() {
        let mut data = q();
        data.star = Some((0..3).map(|i| (0..3).map(|j| if i == j { s(1) } else { s(0) }).collect()).collect());
        let report = check_star_structure(&data).unwrap();
        assert!(!report.passes("3c"));
        assert!(report.passes("3a") && report.passes("3b"));
    }

    #[test]
    fn linear_star_fails_conjugate_symmetry() {
        let data = q();
        let star = data.star_map().unwrap();
        let report = check_star(&data, &star, Extension::Linear).unwrap();
        assert!(!report.passes("3b"));
    }

    #[test]
    fn missing_star() {
        let mut data = q();
        data.star = None;
        assert_eq!(check_star_structure(&data), Err(ComoduleError::MissingStar));
    }

    #[test]
    fn reconstruct_identity() {
        let e = MultiMatrix::identity(&[2]);
        let rec = reconstruct_from_multimatrix(&e).unwrap();
        assert_eq!(rec.data.tau, s(3));
        assert!(verify_relations(&rec.data).unwrap().all_pass());
        let alg = fold_algebra(&rec.data).unwrap();
        assert_eq!(alg, multimatrix_table(&e, &rec));
    }

    #[test]
    fn reconstruct_q2() {
        let e = diag_mm(&[(1, 2), (2, 1)]);
        let e = MultiMatrix::single(e.block(0).clone()).unwrap();
        let rec = reconstruct_from_multimatrix(&e).unwrap();
        assert_eq!(rec.data.tau, ratio(21, 4));
        let report = verify_relations(&rec.data).unwrap();
        assert!(report.all_pass(), "{:?}", report.failures());
        let alg = fold_algebra(&rec.data).unwrap();
        assert_eq!(alg, multimatrix_table(&e, &rec));
        assert_eq!(check_homogeneity_folded(&alg).unwrap().c, ratio(25, 4));
        assert!(separability_idempotent(&alg, &rec.data).unwrap().holds());
    }

    #[test]
    fn reconstruct_sum_block() {
        let e = MultiMatrix::new(vec![exact_matrix(&[&["2"]]), exact_matrix(&[&["1", "0"], &["0", "1"]])]).unwrap();
        let rec = reconstruct_from_multimatrix(&e).unwrap();
        assert_eq!(rec.data.tau, s(4));
        let alg = fold_algebra(&rec.data).unwrap();
        assert_eq!(check_homogeneity_folded(&alg).unwrap().c, s(5));
    }

    #[test]
    fn reconstruct_errors() {
        assert_eq!(
            reconstruct_from_multimatrix(&MultiMatrix::identity(&[1, 1])),
            Err(ComoduleError::DimensionTooSmall(2))
        );
        let e = MultiMatrix::new(vec![exact_matrix(&[&["1"]]), exact_matrix(&[&["1", "0"], &["0", "1"]])]).unwrap();
        assert_eq!(reconstruct_from_multimatrix(&e), Err(ComoduleError::NotNormalizable));
    }

    #[test]
    fn nondiagonal_reconstruction() {
        let e = single(&[&["1/2", "0"], &["3", "2"]]);
        let rec = reconstruct_from_multimatrix(&e).unwrap();
        assert_eq!(rec.data.tau, ratio(21, 4));
        assert!(verify_relations(&rec.data).unwrap().all_pass());
    }

    #[test]
    fn omega_twisted_synthetic() {
        let mut data = q();
        let w: Scalar = "~-0.5+0.8660254037844386i".parse().unwrap();
        data.omega = w;
        let report = verify_relations(&data).unwrap();
        assert!(report.passes("omega-cube-root"));
        assert!(!report.passes("13e"));
        assert_eq!(report.get("13g").unwrap().verdict, Verdict::Skipped);
        assert!(!report.passes("omega-tau"));
    }

    #[test]
    fn json_round_trip() {
        let data = q();
        let text = serde_json::to_string(&data).unwrap();
        assert!(text.contains("\"C\""));
        let back: PairingData = serde_json::from_str(&text).unwrap();
        assert_eq!(back, data);
    }

    fn small() -> impl Strategy<Value = Scalar> {
        (-4i64..=4, 1i64..=3).prop_map(|(a, b)| ratio(a, b))
    }

    proptest! {
        #[test]
        fn derive_d_matches_contraction(
            delta in prop::collection::vec(small(), 4),
            c in prop::collection::vec(small(), 8),
        ) {
            let n = 2;
            let data = PairingData {
                dim: n,
                e: vec![vec![s(1), s(0)], vec![s(0), s(1)]],
                delta: (0..n).map(|i| delta[i * n..(i + 1) * n].to_vec()).collect(),
                c: (0..n).map(|i| (0..n).map(|j| c[(i * n + j) * n..(i * n + j + 1) * n].to_vec()).collect()).collect(),
                d: None,
                tau: s(2),
                omega: s(1),
                star: None,
            };
            let d = derive_d(&data).unwrap();
            for k in 0..n {
                for i in 0..n {
                    for l in 0..n {
                        let mut want = s(0);
                        for j in 0..n {
                            want = &want + &(&data.delta[i][j] * &data.c[j][k][l]);
                        }
                        prop_assert_eq!(&d[k][i][l], &want);
                    }
                }
            }
        }

        #[test]
        fn star_is_involutive(k in 0usize..3) {
            let data = q();
            let star = data.star_map().unwrap();
            let v = basis_vector(3, k);
            let once = star.mul_vec(&v.iter().map(Scalar::conj).collect::<Vec<_>>());
            let twice = star.mul_vec(&once.iter().map(Scalar::conj).collect::<Vec<_>>());
            prop_assert_eq!(twice, v);
        }
    }
}
