//! Fusion rules of SO(3)-deformations: the generic Clebsch–Gordan semiring and
//! the two root-of-unity regimes, plus the deformation-type report that links a
//! multimatrix to its regime.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::multimatrix::{MultiMatrix, MultiMatrixError};
use crate::scalar::{classify_q_tol, Parity, QClass, Scalar, ScalarError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FusionError {
    #[error("label {0} is not a generic W_n")]
    MixedRegime(String),
    #[error("label {0} is outside the alphabet of this regime")]
    IndexOutOfRegime(String),
    #[error("cannot parse fusion expression: {0}")]
    Parse(String),
    #[error("multimatrix is not normalizable")]
    NotNormalizable,
    #[error("algebra dimension {0} is below 4")]
    DimensionTooSmall(usize),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Regime {
    Generic,
    /// `N₀ = 2N₁`.
    Even { n1: u32 },
    /// `N₀ = 2N₁ − 1`.
    Odd { n1: u32 },
}

impl Regime {
    pub fn from_class(c: QClass) -> Regime {
        match c {
            QClass::Generic => Regime::Generic,
            QClass::NonGeneric { n1, parity: Parity::Even, .. } => Regime::Even { n1 },
            QClass::NonGeneric { n1, parity: Parity::Odd, .. } => Regime::Odd { n1 },
        }
    }

    pub fn n0(&self) -> Option<u32> {
        match *self {
            Regime::Generic => None,
            Regime::Even { n1 } => Some(2 * n1),
            Regime::Odd { n1 } => Some(2 * n1 - 1),
        }
    }

    pub fn unit(&self) -> SimpleLabel {
        match self {
            Regime::Generic => SimpleLabel::GenericW(0),
            Regime::Even { .. } => SimpleLabel::EvenW(0),
            Regime::Odd { .. } => SimpleLabel::OddVeven(0),
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Regime::Generic => write!(f, "generic"),
            Regime::Even { n1 } => write!(f, "even:N1={n1}"),
            Regime::Odd { n1 } => write!(f, "odd:N1={n1}"),
        }
    }
}

/// Simple comodule labels. Odd-regime even-index families store half the index:
/// `OddVeven(n)` is `V_{2n}`, `OddUeven(n)` is `U_{2n}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SimpleLabel {
    GenericW(u32),
    EvenW(u32),
    EvenV(u32),
    /// `W_n ⊗ V_m` with `n, m ≥ 1`, kept atomic.
    EvenWV(u32, u32),
    OddVeven(u32),
    OddUeven(u32),
    /// `V_n ⊗ U_m` with `n, m` odd.
    OddVU(u32, u32),
}

use SimpleLabel::*;

impl SimpleLabel {
    pub fn dim(&self) -> u64 {
        let (a, b) = match *self {
            GenericW(n) | EvenW(n) | OddVeven(n) | OddUeven(n) => return 2 * n as u64 + 1,
            EvenV(m) => return m as u64 + 1,
            EvenWV(n, m) => (2 * n as u64 + 1, m as u64 + 1),
            OddVU(n, m) => (n as u64 + 1, m as u64 + 1),
        };
        a * b
    }

    fn is_unit(&self) -> bool {
        matches!(self, GenericW(0) | EvenW(0) | EvenV(0) | OddVeven(0) | OddUeven(0))
    }

    /// Checks the label against the regime's alphabet and folds the aliases
    /// `V_0 = W_0`, `U_0 = V_0`, `W_n⊗V_0 = W_n`, `W_0⊗V_m = V_m`.
    pub fn normalize(self, regime: Regime) -> Result<SimpleLabel, FusionError> {
        let bad = || FusionError::IndexOutOfRegime(self.to_string());
        match (regime, self) {
            (Regime::Generic, GenericW(_)) => Ok(self),
            (Regime::Even { n1 }, EvenW(n)) if n < n1 => Ok(self),
            (Regime::Even { .. }, EvenV(0)) => Ok(EvenW(0)),
            (Regime::Even { .. }, EvenV(_)) => Ok(self),
            (Regime::Even { n1 }, EvenWV(n, m)) if n < n1 => Ok(match (n, m) {
                (0, m) => EvenV(m).normalize(regime)?,
                (n, 0) => EvenW(n),
                _ => self,
            }),
            (Regime::Odd { .. }, OddVeven(_)) => Ok(self),
            (Regime::Odd { .. }, OddUeven(0)) => Ok(OddVeven(0)),
            (Regime::Odd { n1 }, OddUeven(n)) if n < n1 => Ok(self),
            (Regime::Odd { n1 }, OddVU(n, m)) if n % 2 == 1 && m % 2 == 1 && m < 2 * n1 - 1 => Ok(self),
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for SimpleLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            GenericW(n) | EvenW(n) => write!(f, "W{n}"),
            EvenV(m) => write!(f, "V{m}"),
            EvenWV(n, m) => write!(f, "W{n}V{m}"),
            OddVeven(n) => write!(f, "V{}", 2 * n),
            OddUeven(n) => write!(f, "U{}", 2 * n),
            OddVU(n, m) => write!(f, "V{n}U{m}"),
        }
    }
}

/// Finitely supported multiset of simple labels.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FusionElement(BTreeMap<SimpleLabel, u64>);

impl FusionElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn simple(l: SimpleLabel) -> Self {
        Self::from_iter([(l, 1)])
    }

    pub fn add(&mut self, l: SimpleLabel, mult: u64) {
        if mult > 0 {
            *self.0.entry(l).or_insert(0) += mult;
        }
    }

    pub fn multiplicity(&self, l: &SimpleLabel) -> u64 {
        self.0.get(l).copied().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&SimpleLabel, &u64)> {
        self.0.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn dim(&self) -> u64 {
        self.0.iter().map(|(l, m)| l.dim() * m).sum()
    }

    pub fn to_json(&self) -> FusionJson {
        FusionJson {
            terms: self.0.iter().map(|(l, &mult)| TermJson { label: l.to_string(), mult, dim: l.dim() }).collect(),
            dim_total: self.dim(),
        }
    }
}

impl FromIterator<(SimpleLabel, u64)> for FusionElement {
    fn from_iter<I: IntoIterator<Item = (SimpleLabel, u64)>>(iter: I) -> Self {
        let mut out = FusionElement::zero();
        for (l, m) in iter {
            out.add(l, m);
        }
        out
    }
}

impl fmt::Display for FusionElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> =
            self.0.iter().map(|(l, &m)| if m == 1 { l.to_string() } else { format!("{m}{l}") }).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TermJson {
    pub label: String,
    pub mult: u64,
    pub dim: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct FusionJson {
    pub terms: Vec<TermJson>,
    pub dim_total: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Product {
    Determined(FusionElement),
    NotDetermined { reason: String },
}

impl Product {
    pub fn determined(self) -> Option<FusionElement> {
        match self {
            Product::Determined(x) => Some(x),
            Product::NotDetermined { .. } => None,
        }
    }
}

/// `⊕_{k=|a−b|}^{a+b}` with the given stride.
fn clebsch_gordan(a: u32, b: u32, step: usize) -> impl Iterator<Item = u32> {
    (a.abs_diff(b)..=a + b).step_by(step)
}

/// `W_m ⊗ W_n = ⊕_{k=|m−n|}^{m+n} W_k`, extended bilinearly.
pub fn tensor_generic(x: &FusionElement, y: &FusionElement) -> Result<FusionElement, FusionError> {
    let index = |l: &SimpleLabel| match l {
        GenericW(n) => Ok(*n),
        other => Err(FusionError::MixedRegime(other.to_string())),
    };
    let mut out = FusionElement::zero();
    for (a, ma) in x.terms() {
        let a = index(a)?;
        for (b, mb) in y.terms() {
            for k in clebsch_gordan(a, index(b)?, 1) {
                out.add(GenericW(k), ma * mb);
            }
        }
    }
    Ok(out)
}

fn simple_product(regime: Regime, a: SimpleLabel, b: SimpleLabel) -> Product {
    if a.is_unit() {
        return Product::Determined(FusionElement::simple(b));
    }
    if b.is_unit() {
        return Product::Determined(FusionElement::simple(a));
    }
    let undetermined = |why: &str| Product::NotDetermined { reason: format!("{a} ⊗ {b}: {why}") };
    let cg = |a, b, step, f: &dyn Fn(u32) -> SimpleLabel| {
        Product::Determined(clebsch_gordan(a, b, step).map(|k| (f(k), 1)).collect())
    };
    match (regime, a, b) {
        (Regime::Generic, GenericW(m), GenericW(n)) => cg(m, n, 1, &GenericW),
        (Regime::Even { n1 }, EvenW(m), EvenW(n)) => {
            if m + n < n1 {
                cg(m, n, 1, &EvenW)
            } else {
                undetermined("meets the non-semisimple boundary W_{N1-1} ⊗ W_1")
            }
        }
        (Regime::Even { .. }, EvenV(m), EvenV(n)) => cg(m, n, 2, &EvenV),
        (Regime::Even { .. }, EvenW(n), EvenV(m)) | (Regime::Even { .. }, EvenV(m), EvenW(n)) => {
            Product::Determined(FusionElement::simple(EvenWV(n, m)))
        }
        (Regime::Odd { .. }, OddVeven(m), OddVeven(n)) => cg(m, n, 1, &OddVeven),
        (Regime::Odd { n1 }, OddUeven(m), OddUeven(n)) => {
            if m + n < n1 {
                cg(m, n, 1, &OddUeven)
            } else {
                undetermined("meets the non-simple U_{2(N1-1)} ⊗ U_2")
            }
        }
        _ => undetermined("not decomposed by the fusion rules"),
    }
}

/// Product in a root-of-unity regime (the generic regime is accepted too).
pub fn tensor_nongeneric(regime: Regime, x: &FusionElement, y: &FusionElement) -> Result<Product, FusionError> {
    let norm = |e: &FusionElement| -> Result<Vec<(SimpleLabel, u64)>, FusionError> {
        e.terms().map(|(l, &m)| Ok((l.normalize(regime)?, m))).collect()
    };
    let (xs, ys) = (norm(x)?, norm(y)?);
    let mut out = FusionElement::zero();
    for &(a, ma) in &xs {
        for &(b, mb) in &ys {
            match simple_product(regime, a, b) {
                Product::Determined(p) => {
                    for (l, m) in p.terms() {
                        out.add(l.normalize(regime)?, m * ma * mb);
                    }
                }
                nd => return Ok(nd),
            }
        }
    }
    Ok(Product::Determined(out))
}

#[derive(Clone, Debug, Serialize)]
pub struct Layer {
    pub labels: Vec<String>,
    pub dims: Vec<u64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct FiltrationReport {
    pub regime: Regime,
    pub module: String,
    pub layers: Vec<Layer>,
    pub layer_total: u64,
    pub product_dim: u64,
    /// Sum of layer dimensions equals the product dimension.
    pub audit: bool,
}

/// Layers of the displayed filtration of the non-semisimple product, bottom first.
pub fn filtration_report(regime: Regime) -> Option<FiltrationReport> {
    let (module, layers, product_dim) = match regime {
        Regime::Even { n1 } if n1 >= 2 => {
            let top = (2 * n1 - 1) as u64;
            let layers = vec![
                Layer { labels: vec![EvenW(n1 - 2).to_string(), EvenW(n1 - 1).to_string()], dims: vec![top - 2, top] },
                Layer { labels: vec![EvenV(1).to_string()], dims: vec![2] },
                Layer { labels: vec![EvenW(n1 - 1).to_string()], dims: vec![top] },
            ];
            (format!("W{} ⊗ W1", n1 - 1), layers, top * 3)
        }
        Regime::Odd { n1 } if n1 >= 2 => {
            let low = OddUeven(n1 - 2);
            let layers = vec![
                Layer { labels: vec![low.to_string()], dims: vec![low.dim()] },
                Layer { labels: vec!["U1V1".into()], dims: vec![4] },
                Layer { labels: vec![low.to_string()], dims: vec![low.dim()] },
            ];
            (format!("U{} ⊗ U2", 2 * (n1 - 1)), layers, OddUeven(n1 - 1).dim() * OddUeven(1).dim())
        }
        _ => return None,
    };
    let layer_total = layers.iter().flat_map(|l| &l.dims).sum();
    Some(FiltrationReport { regime, module, layers, layer_total, product_dim, audit: layer_total == product_dim })
}

#[derive(Clone, Debug, Serialize)]
pub struct DeformationReport {
    pub q: [String; 2],
    pub approximate: bool,
    pub sign_ambiguous: bool,
    pub class: QClass,
    pub regime: Regime,
    pub cosemisimple: bool,
    pub alphabet: String,
}

/// `q` from `q² − s q + 1 = 0`, its root-of-unity class and the resulting fusion alphabet.
pub fn deformation_type_report(e: &MultiMatrix, bound: u32, tol: f64) -> Result<DeformationReport, FusionError> {
    if e.algebra_dim() < 4 {
        return Err(FusionError::DimensionTooSmall(e.algebra_dim()));
    }
    let qp = e.q_parameter().map_err(|err| match err {
        MultiMatrixError::NotNormalizable => FusionError::NotNormalizable,
        other => FusionError::Parse(other.to_string()),
    })?;
    let q: &Scalar = &qp.roots.roots[0];
    let class = classify_q_tol(q, bound, tol)?;
    let regime = Regime::from_class(class);
    let alphabet = match regime {
        Regime::Generic => "W_n (n ≥ 0)".to_string(),
        Regime::Even { n1 } => format!("V_m (m ≥ 0), W_n (n < {n1}), W_n⊗V_m"),
        Regime::Odd { n1 } => format!("V_2n (n ≥ 0), U_2n (n < {n1}), V_n⊗U_m (n, m odd)"),
    };
    Ok(DeformationReport {
        q: [qp.roots.roots[0].to_string(), qp.roots.roots[1].to_string()],
        approximate: qp.roots.approximate,
        sign_ambiguous: qp.sign_ambiguous,
        class,
        regime,
        cosemisimple: regime == Regime::Generic,
        alphabet,
    })
}

/// A parsed `A*B*…@regime` expression.
#[derive(Clone, Debug, PartialEq)]
pub struct FusionExpr {
    pub regime: Regime,
    pub factors: Vec<SimpleLabel>,
}

impl FusionExpr {
    pub fn evaluate(&self) -> Result<Product, FusionError> {
        let mut acc = FusionElement::simple(self.regime.unit());
        for f in &self.factors {
            match tensor_nongeneric(self.regime, &acc, &FusionElement::simple(*f))? {
                Product::Determined(x) => acc = x,
                nd => return Ok(nd),
            }
        }
        Ok(Product::Determined(acc))
    }
}

fn parse_regime(s: &str) -> Result<Regime, FusionError> {
    let err = || FusionError::Parse(format!("unknown regime `{s}`"));
    if s == "generic" {
        return Ok(Regime::Generic);
    }
    let (kind, n1) = s.split_once(":N1=").ok_or_else(err)?;
    let n1: u32 = n1.parse().map_err(|_| err())?;
    if n1 == 0 {
        return Err(err());
    }
    match kind {
        "even" => Ok(Regime::Even { n1 }),
        "odd" => Ok(Regime::Odd { n1 }),
        _ => Err(err()),
    }
}

/// Splits `W2V3` into `[('W', 2), ('V', 3)]`.
fn letters(tok: &str) -> Result<Vec<(char, u32)>, FusionError> {
    let err = || FusionError::Parse(format!("bad label `{tok}`"));
    let mut out = Vec::new();
    let mut rest = tok;
    while let Some(c) = rest.chars().next() {
        let digits: String = rest[1..].chars().take_while(char::is_ascii_digit).collect();
        if !"WVU".contains(c) || digits.is_empty() {
            return Err(err());
        }
        out.push((c, digits.parse().map_err(|_| err())?));
        rest = &rest[1 + digits.len()..];
    }
    if out.is_empty() {
        return Err(err());
    }
    Ok(out)
}

fn parse_label(tok: &str, regime: Regime) -> Result<SimpleLabel, FusionError> {
    let parts = letters(tok)?;
    let half = |n: u32| {
        if n.is_multiple_of(2) {
            Ok(n / 2)
        } else {
            Err(FusionError::IndexOutOfRegime(tok.into()))
        }
    };
    let label = match (regime, parts.as_slice()) {
        (Regime::Generic, [('W', n)]) => GenericW(*n),
        (Regime::Even { .. }, [('W', n)]) => EvenW(*n),
        (Regime::Even { .. }, [('V', m)]) => EvenV(*m),
        (Regime::Even { .. }, [('W', n), ('V', m)]) => EvenWV(*n, *m),
        (Regime::Odd { .. }, [('V', n)]) => OddVeven(half(*n)?),
        (Regime::Odd { .. }, [('U', n)]) => OddUeven(half(*n)?),
        (Regime::Odd { .. }, [('V', n), ('U', m)]) => OddVU(*n, *m),
        _ => return Err(FusionError::IndexOutOfRegime(tok.into())),
    };
    label.normalize(regime)
}

impl FromStr for FusionExpr {
    type Err = FusionError;

    fn from_str(s: &str) -> Result<Self, FusionError> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let (body, regime) = match s.split_once('@') {
            Some((b, r)) => (b.to_string(), parse_regime(r)?),
            None => (s.clone(), Regime::Generic),
        };
        let factors = body
            .split(['*', '⊗'])
            .map(|t| parse_label(t, regime))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(FusionExpr { regime, factors })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ExactScalar;
    use proptest::prelude::*;

    /// Character of `W_n` as a Laurent polynomial: coefficients of x^{-n..n}, offset by `OFF`.
    const OFF: usize = 64;

    fn chi(n: u32) -> Vec<i64> {
        let mut v = vec![0; 2 * OFF + 1];
        for k in OFF - n as usize..=OFF + n as usize {
            v[k] = 1;
        }
        v
    }

    fn chi_mul(a: &[i64], b: &[i64]) -> Vec<i64> {
        let mut v = vec![0; 2 * OFF + 1];
        for (i, &x) in a.iter().enumerate().filter(|(_, x)| **x != 0) {
            for (j, &y) in b.iter().enumerate().filter(|(_, y)| **y != 0) {
                v[i + j - OFF] += x * y;
            }
        }
        v
    }

    /// Peels off the top degree repeatedly.
    fn decompose(mut v: Vec<i64>) -> FusionElement {
        let mut out = FusionElement::zero();
        while let Some(top) = (OFF..v.len()).rev().find(|&k| v[k] != 0) {
            let n = (top - OFF) as u32;
            let m = v[top];
            assert!(m > 0);
            out.add(GenericW(n), m as u64);
            for (k, c) in chi(n).iter().enumerate() {
                v[k] -= m * c;
            }
        }
        out
    }

    fn w(n: u32) -> FusionElement {
        FusionElement::simple(GenericW(n))
    }

    #[test]
    fn generic_examples() {
        let p = tensor_generic(&w(1), &w(1)).unwrap();
        assert_eq!(p, (0..=2).map(|k| (GenericW(k), 1)).collect());
        assert_eq!(p.dim(), 9);
        assert_eq!(tensor_generic(&w(0), &w(5)).unwrap(), w(5));
        let p = tensor_generic(&w(2), &w(3)).unwrap();
        assert_eq!(p, (1..=5).map(|k| (GenericW(k), 1)).collect());
        assert_eq!(p.dim(), 35);
        assert_eq!(FusionElement::zero().dim(), 0);
        assert!(matches!(
            tensor_generic(&w(1), &FusionElement::simple(EvenV(1))),
            Err(FusionError::MixedRegime(_))
        ));
    }

    #[test]
    fn matches_character_oracle() {
        for m in 0..10 {
            for n in 0..10 {
                let p = tensor_generic(&w(m), &w(n)).unwrap();
                assert_eq!(p, decompose(chi_mul(&chi(m), &chi(n))));
            }
        }
    }

    #[test]
    fn closed_form_matches_recursion() {
        // W_n ⊗ W_1 = W_{n-1} ⊕ W_n ⊕ W_{n+1}, and W_{n+1} = W_n⊗W_1 − W_n − W_{n−1}
        for n in 1..20 {
            let p = tensor_generic(&w(n), &w(1)).unwrap();
            assert_eq!(p, [(GenericW(n - 1), 1), (GenericW(n), 1), (GenericW(n + 1), 1)].into_iter().collect());
        }
    }

    #[test]
    fn even_regime() {
        let even3 = Regime::Even { n1: 3 };
        let ew = |n| FusionElement::simple(EvenW(n));
        let ev = |n| FusionElement::simple(EvenV(n));
        let p = tensor_nongeneric(even3, &ew(1), &ew(1)).unwrap().determined().unwrap();
        assert_eq!(p, (0..=2).map(|k| (EvenW(k), 1)).collect());
        let p = tensor_nongeneric(even3, &ev(1), &ev(1)).unwrap().determined().unwrap();
        assert_eq!(p, [(EvenW(0), 1), (EvenV(2), 1)].into_iter().collect());
        let even2 = Regime::Even { n1: 2 };
        assert!(matches!(tensor_nongeneric(even2, &ew(1), &ew(1)).unwrap(), Product::NotDetermined { .. }));
        assert!(matches!(tensor_nongeneric(even2, &ew(2), &ew(0)), Err(FusionError::IndexOutOfRegime(_))));
        let p = tensor_nongeneric(even2, &ew(1), &ev(2)).unwrap().determined().unwrap();
        assert_eq!(p, FusionElement::simple(EvenWV(1, 2)));
        assert_eq!(p.dim(), 9);
    }

    #[test]
    fn odd_regime() {
        let odd = Regime::Odd { n1: 3 };
        let u = |n| FusionElement::simple(OddUeven(n));
        let p = tensor_nongeneric(odd, &u(1), &u(1)).unwrap().determined().unwrap();
        assert_eq!(p, [(OddVeven(0), 1), (OddUeven(1), 1), (OddUeven(2), 1)].into_iter().collect());
        assert!(matches!(tensor_nongeneric(odd, &u(2), &u(1)).unwrap(), Product::NotDetermined { .. }));
        let vu = FusionElement::simple(OddVU(1, 3));
        assert_eq!(vu.dim(), 8);
        assert!(matches!(tensor_nongeneric(odd, &vu, &u(1)).unwrap(), Product::NotDetermined { .. }));
        let bad = FusionElement::simple(OddVU(1, 5));
        assert!(matches!(tensor_nongeneric(odd, &bad, &u(1)), Err(FusionError::IndexOutOfRegime(_))));
    }

    #[test]
    fn units_in_every_regime() {
        let cases = [
            (Regime::Generic, GenericW(4)),
            (Regime::Even { n1: 3 }, EvenWV(2, 5)),
            (Regime::Even { n1: 3 }, EvenV(7)),
            (Regime::Odd { n1: 2 }, OddVU(3, 1)),
            (Regime::Odd { n1: 2 }, OddUeven(1)),
        ];
        for (regime, l) in cases {
            let x = FusionElement::simple(l);
            for unit in [GenericW(0), EvenW(0), EvenV(0), OddVeven(0), OddUeven(0)] {
                let Ok(u) = unit.normalize(regime) else { continue };
                let p = tensor_nongeneric(regime, &FusionElement::simple(u), &x).unwrap();
                assert_eq!(p, Product::Determined(x.clone()));
            }
        }
    }

    #[test]
    fn filtrations() {
        let r = filtration_report(Regime::Even { n1: 2 }).unwrap();
        assert_eq!(r.layers.iter().map(|l| l.dims.clone()).collect::<Vec<_>>(), vec![vec![1, 3], vec![2], vec![3]]);
        assert!(r.audit);
        let r = filtration_report(Regime::Even { n1: 3 }).unwrap();
        assert_eq!((r.layer_total, r.product_dim), (15, 15));
        for n1 in 2..=10 {
            assert!(filtration_report(Regime::Even { n1 }).unwrap().audit);
        }
        let r = filtration_report(Regime::Odd { n1: 2 }).unwrap();
        assert_eq!(r.layers.iter().map(|l| l.dims[0]).collect::<Vec<_>>(), vec![1, 4, 1]);
        assert_eq!((r.layer_total, r.product_dim, r.audit), (6, 9, false));
        assert!(filtration_report(Regime::Generic).is_none());
        assert!(filtration_report(Regime::Even { n1: 1 }).is_none());
    }

    #[test]
    fn deformation_reports() {
        let r = deformation_type_report(&MultiMatrix::identity(&[2]), 64, 1e-9).unwrap();
        assert_eq!(r.class, QClass::Generic);
        assert!(r.cosemisimple);
        assert_eq!(r.q[0], "1");
        let d = MultiMatrix::diagonal(&[ExactScalar::ratio(1, 2), ExactScalar::from_int(2)]).unwrap();
        let r = deformation_type_report(&d, 64, 1e-9).unwrap();
        assert!(r.cosemisimple);
        assert_eq!(r.q, ["2".to_string(), "1/2".to_string()]);
        let e8 = MultiMatrix::diagonal(&[ExactScalar::from_int(1), ExactScalar::i()]).unwrap();
        let r = deformation_type_report(&e8, 64, 1e-9).unwrap();
        assert_eq!(r.class, QClass::NonGeneric { order: 8, n0: 4, n1: 2, parity: Parity::Even });
        assert_eq!(r.regime, Regime::Even { n1: 2 });
        assert!(!r.cosemisimple);
        assert_eq!(
            deformation_type_report(&MultiMatrix::identity(&[1]), 64, 1e-9).unwrap_err(),
            FusionError::DimensionTooSmall(1)
        );
        let inhom = MultiMatrix::new(vec![crate::linalg::exact_matrix(&[&["1"]]), crate::linalg::Matrix::identity(2)]).unwrap();
        assert_eq!(deformation_type_report(&inhom, 64, 1e-9).unwrap_err(), FusionError::NotNormalizable);
    }

    #[test]
    fn parsing() {
        let e: FusionExpr = "W2*W3".parse().unwrap();
        assert_eq!(e.factors, vec![GenericW(2), GenericW(3)]);
        let p = e.evaluate().unwrap().determined().unwrap();
        assert_eq!(p.dim(), 35);
        let e: FusionExpr = "V1*V1@even:N1=3".parse().unwrap();
        assert_eq!(e.regime, Regime::Even { n1: 3 });
        assert_eq!(e.evaluate().unwrap().determined().unwrap().to_string(), "W0 + V2");
        let e: FusionExpr = "U2 * V3U1 @odd:N1=2".parse().unwrap();
        assert_eq!(e.factors, vec![OddUeven(1), OddVU(3, 1)]);
        assert!(matches!("W2*X1".parse::<FusionExpr>(), Err(FusionError::Parse(_))));
        assert!(matches!("V1@odd:N1=2".parse::<FusionExpr>(), Err(FusionError::IndexOutOfRegime(_))));
        assert!(matches!("W1@weird".parse::<FusionExpr>(), Err(FusionError::Parse(_))));
        let json = serde_json::to_string(&FusionExpr::from_str("W1*W1").unwrap().evaluate().unwrap().determined().unwrap().to_json()).unwrap();
        assert_eq!(json, r#"{"terms":[{"label":"W0","mult":1,"dim":1},{"label":"W1","mult":1,"dim":3},{"label":"W2","mult":1,"dim":5}],"dim_total":9}"#);
    }

    fn element() -> impl Strategy<Value = FusionElement> {
        prop::collection::vec((0u32..=8, 1u64..3), 1..4)
            .prop_map(|v| v.into_iter().map(|(n, m)| (GenericW(n), m)).collect())
    }

    proptest! {
        #[test]
        fn generic_is_commutative_and_associative(x in element(), y in element(), z in element()) {
            let xy = tensor_generic(&x, &y).unwrap();
            prop_assert_eq!(&xy, &tensor_generic(&y, &x).unwrap());
            let l = tensor_generic(&xy, &z).unwrap();
            let r = tensor_generic(&x, &tensor_generic(&y, &z).unwrap()).unwrap();
            prop_assert_eq!(l, r);
        }

        #[test]
        fn dimension_is_multiplicative(x in element(), y in element()) {
            prop_assert_eq!(tensor_generic(&x, &y).unwrap().dim(), x.dim() * y.dim());
        }

        #[test]
        fn determined_nongeneric_products_multiply_dims(n1 in 2u32..6, a in 0u32..6, b in 0u32..6, va in 0u32..5, vb in 0u32..5) {
            let regime = Regime::Even { n1 };
            let x = FusionElement::simple(EvenWV(a % n1, va));
            let y = FusionElement::simple(EvenWV(b % n1, vb));
            let (Ok(x), Ok(y)) = (
                x.terms().map(|(l, &m)| Ok::<_, FusionError>((l.normalize(regime)?, m))).collect::<Result<FusionElement, _>>(),
                y.terms().map(|(l, &m)| Ok::<_, FusionError>((l.normalize(regime)?, m))).collect::<Result<FusionElement, _>>(),
            ) else { return Ok(()) };
            if let Product::Determined(p) = tensor_nongeneric(regime, &x, &y).unwrap() {
                prop_assert_eq!(p.dim(), x.dim() * y.dim());
            }
        }
    }
}
