//! Gaussian-rational scalars, their floating-point shadow, and the
//! root-of-unity classification of deformation parameters.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_BOUND: u32 = 64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScalarError {
    #[error("cannot parse scalar from `{0}`")]
    Parse(String),
    #[error("zero input")]
    ZeroInput,
    #[error("division by zero")]
    DivisionByZero,
}

/// `re + im·i` with both parts rational.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct ExactScalar {
    re: BigRational,
    im: BigRational,
}

impl ExactScalar {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        ExactScalar { re, im }
    }

    pub fn real(re: BigRational) -> Self {
        ExactScalar { re, im: BigRational::zero() }
    }

    pub fn from_int(n: i64) -> Self {
        Self::real(BigRational::from_integer(n.into()))
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Self::real(BigRational::new(n.into(), d.into()))
    }

    pub fn gaussian(re: (i64, i64), im: (i64, i64)) -> Self {
        ExactScalar {
            re: BigRational::new(re.0.into(), re.1.into()),
            im: BigRational::new(im.0.into(), im.1.into()),
        }
    }

    pub fn i() -> Self {
        ExactScalar { re: BigRational::zero(), im: BigRational::one() }
    }

    pub fn re(&self) -> &BigRational {
        &self.re
    }

    pub fn im(&self) -> &BigRational {
        &self.im
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        ExactScalar { re: self.re.clone(), im: -self.im.clone() }
    }

    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm_sqr();
        Some(ExactScalar { re: &self.re / &n, im: -(&self.im / &n) })
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Principal square root (nonnegative real part) when it stays in Q(i).
    pub fn sqrt(&self) -> Option<Self> {
        if self.im.is_zero() {
            if self.re.is_negative() {
                return rational_sqrt(&-self.re.clone()).map(|y| ExactScalar { re: BigRational::zero(), im: y });
            }
            return rational_sqrt(&self.re).map(Self::real);
        }
        let modulus = rational_sqrt(&self.norm_sqr())?;
        let two = BigRational::from_integer(2.into());
        let x = rational_sqrt(&((&modulus + &self.re) / &two))?;
        let y = rational_sqrt(&((&modulus - &self.re) / &two))?;
        let y = if self.im.is_negative() { -y } else { y };
        Some(ExactScalar { re: x, im: y })
    }

    pub fn to_approx(&self) -> ApproxScalar {
        ApproxScalar(Complex64::new(rat_to_f64(&self.re), rat_to_f64(&self.im)))
    }

    /// Total order used only for deterministic sorting (real part, then imaginary).
    pub fn lex_cmp(&self, other: &Self) -> Ordering {
        self.re.cmp(&other.re).then_with(|| self.im.cmp(&other.im))
    }
}

pub fn rat_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        let n = r.numer().to_f64().unwrap_or(f64::NAN);
        let d = r.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

fn rational_sqrt(r: &BigRational) -> Option<BigRational> {
    if r.is_negative() {
        return None;
    }
    let n = int_sqrt(r.numer())?;
    let d = int_sqrt(r.denom())?;
    Some(BigRational::new(n, d))
}

fn int_sqrt(n: &BigInt) -> Option<BigInt> {
    if n.sign() == Sign::Minus {
        return None;
    }
    let s = n.sqrt();
    (&s * &s == *n).then_some(s)
}

impl Zero for ExactScalar {
    fn zero() -> Self {
        ExactScalar::default()
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for ExactScalar {
    fn one() -> Self {
        Self::from_int(1)
    }
}

impl From<i64> for ExactScalar {
    fn from(n: i64) -> Self {
        Self::from_int(n)
    }
}

impl<'a> Add<&'a ExactScalar> for &'a ExactScalar {
    type Output = ExactScalar;
    fn add(self, o: &ExactScalar) -> ExactScalar {
        ExactScalar { re: &self.re + &o.re, im: &self.im + &o.im }
    }
}

impl<'a> Sub<&'a ExactScalar> for &'a ExactScalar {
    type Output = ExactScalar;
    fn sub(self, o: &ExactScalar) -> ExactScalar {
        ExactScalar { re: &self.re - &o.re, im: &self.im - &o.im }
    }
}

impl<'a> Mul<&'a ExactScalar> for &'a ExactScalar {
    type Output = ExactScalar;
    fn mul(self, o: &ExactScalar) -> ExactScalar {
        if self.im.is_zero() && o.im.is_zero() {
            return ExactScalar::real(&self.re * &o.re);
        }
        ExactScalar {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }
}

impl<'a> Div<&'a ExactScalar> for &'a ExactScalar {
    type Output = ExactScalar;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: &ExactScalar) -> ExactScalar {
        self * &o.inv().expect("division by zero scalar")
    }
}

macro_rules! forward_owned {
    ($ty:ty: $($tr:ident $m:ident),*) => {$(
        impl $tr<$ty> for $ty {
            type Output = $ty;
            fn $m(self, o: $ty) -> $ty { (&self).$m(&o) }
        }
        impl<'a> $tr<&'a $ty> for $ty {
            type Output = $ty;
            fn $m(self, o: &$ty) -> $ty { (&self).$m(o) }
        }
    )*};
}
forward_owned!(ExactScalar: Add add, Sub sub, Mul mul, Div div);

impl Neg for ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        ExactScalar { re: -self.re, im: -self.im }
    }
}

impl Neg for &ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        -self.clone()
    }
}

impl AddAssign<&ExactScalar> for ExactScalar {
    fn add_assign(&mut self, o: &ExactScalar) {
        self.re += &o.re;
        self.im += &o.im;
    }
}

impl SubAssign<&ExactScalar> for ExactScalar {
    fn sub_assign(&mut self, o: &ExactScalar) {
        self.re -= &o.re;
        self.im -= &o.im;
    }
}

impl MulAssign<&ExactScalar> for ExactScalar {
    fn mul_assign(&mut self, o: &ExactScalar) {
        *self = &*self * o;
    }
}

impl fmt::Display for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            return write!(f, "{}", self.re);
        }
        let sign = if self.im.is_negative() { '-' } else { '+' };
        write!(f, "{}{}{}*i", self.re, sign, self.im.abs())
    }
}

impl fmt::Debug for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn parse_rational(tok: &str) -> Option<BigRational> {
    let t = tok.strip_prefix('+').unwrap_or(tok);
    if t.is_empty() || t.starts_with('+') {
        return None;
    }
    let (neg, body) = match t.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, t),
    };
    if body.is_empty() || body.starts_with(['+', '-']) {
        return None;
    }
    let r = match body.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.parse().ok()?;
            let d: BigInt = d.parse().ok()?;
            if d.is_zero() || d.is_negative() || n.is_negative() {
                return None;
            }
            BigRational::new(n, d)
        }
        None => BigRational::from_integer(body.parse::<BigInt>().ok().filter(|n| !n.is_negative())?),
    };
    Some(if neg { -r } else { r })
}

impl FromStr for ExactScalar {
    type Err = ScalarError;

    fn from_str(s: &str) -> Result<Self, ScalarError> {
        let err = || ScalarError::Parse(s.to_string());
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if t.is_empty() {
            return Err(err());
        }
        let Some(body) = t.strip_suffix('i') else {
            return parse_rational(&t).map(ExactScalar::real).ok_or_else(err);
        };
        let (body, starred) = match body.strip_suffix('*') {
            Some(b) => (b, true),
            None => (body, false),
        };
        // split real and imaginary parts at the last sign that is not leading
        let split = body
            .char_indices()
            .filter(|&(k, c)| k > 0 && (c == '+' || c == '-'))
            .map(|(k, _)| k)
            .next_back();
        let (re_tok, im_tok) = match split {
            Some(k) => (&body[..k], &body[k..]),
            None => ("", body),
        };
        let re = if re_tok.is_empty() { BigRational::zero() } else { parse_rational(re_tok).ok_or_else(err)? };
        let im = match im_tok {
            "" | "+" if !starred => BigRational::one(),
            "-" if !starred => -BigRational::one(),
            tok => parse_rational(tok).ok_or_else(err)?,
        };
        Ok(ExactScalar { re, im })
    }
}

impl Serialize for ExactScalar {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Scalars arrive as strings (`"1/2"`, `"3-i"`, `"~0.7"`) or bare integers.
#[derive(Deserialize)]
#[serde(untagged)]
enum ScalarToken {
    Text(String),
    Int(i64),
}

impl ScalarToken {
    fn text(self) -> String {
        match self {
            ScalarToken::Text(s) => s,
            ScalarToken::Int(n) => n.to_string(),
        }
    }
}

impl<'de> Deserialize<'de> for ExactScalar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        ScalarToken::deserialize(d)?.text().parse().map_err(serde::de::Error::custom)
    }
}

/// Double-precision complex value.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct ApproxScalar(pub Complex64);

impl ApproxScalar {
    pub fn new(re: f64, im: f64) -> Self {
        ApproxScalar(Complex64::new(re, im))
    }

    pub fn re(self) -> f64 {
        self.0.re
    }

    pub fn im(self) -> f64 {
        self.0.im
    }

    pub fn abs(self) -> f64 {
        self.0.norm()
    }

    /// Primitive `n`-th root of unity `exp(2πi·k/n)`.
    pub fn root_of_unity(k: u32, n: u32) -> Self {
        ApproxScalar(Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / n as f64))
    }
}

impl fmt::Display for ApproxScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.0.im < 0.0 { '-' } else { '+' };
        write!(f, "~{}{}{}*i", self.0.re, sign, self.0.im.abs())
    }
}

impl FromStr for ApproxScalar {
    type Err = ScalarError;

    fn from_str(s: &str) -> Result<Self, ScalarError> {
        let err = || ScalarError::Parse(s.to_string());
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let t = t.strip_prefix('~').unwrap_or(&t);
        let Some(body) = t.strip_suffix('i') else {
            return t.parse::<f64>().map(|re| ApproxScalar::new(re, 0.0)).map_err(|_| err());
        };
        let body = body.strip_suffix('*').unwrap_or(body);
        let bytes = body.as_bytes();
        let split = (1..bytes.len())
            .rev()
            .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
        let (re_tok, im_tok) = match split {
            Some(k) => (&body[..k], &body[k..]),
            None => ("", body),
        };
        let re = if re_tok.is_empty() { 0.0 } else { re_tok.parse().map_err(|_| err())? };
        let im = match im_tok {
            "" | "+" => 1.0,
            "-" => -1.0,
            tok => tok.strip_prefix('+').unwrap_or(tok).parse().map_err(|_| err())?,
        };
        Ok(ApproxScalar::new(re, im))
    }
}

/// A value that is exact as long as every operation stayed inside Q(i).
#[derive(Clone, Debug, PartialEq)]
pub enum Scalar {
    Exact(ExactScalar),
    Approx(ApproxScalar),
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Exact(ExactScalar::zero())
    }

    pub fn one() -> Self {
        Scalar::Exact(ExactScalar::one())
    }

    pub fn from_int(n: i64) -> Self {
        Scalar::Exact(ExactScalar::from_int(n))
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn as_exact(&self) -> Option<&ExactScalar> {
        match self {
            Scalar::Exact(x) => Some(x),
            Scalar::Approx(_) => None,
        }
    }

    pub fn approx(&self) -> ApproxScalar {
        match self {
            Scalar::Exact(x) => x.to_approx(),
            Scalar::Approx(a) => *a,
        }
    }

    pub fn conj(&self) -> Self {
        match self {
            Scalar::Exact(x) => Scalar::Exact(x.conj()),
            Scalar::Approx(a) => Scalar::Approx(ApproxScalar(a.0.conj())),
        }
    }

    pub fn inv(&self) -> Option<Self> {
        match self {
            Scalar::Exact(x) => x.inv().map(Scalar::Exact),
            Scalar::Approx(a) => (a.0.norm() != 0.0).then(|| Scalar::Approx(ApproxScalar(a.0.inv()))),
        }
    }

    /// Exact zero test, or `|x| ≤ tol` for approximate values.
    pub fn is_zero_within(&self, tol: f64) -> bool {
        match self {
            Scalar::Exact(x) => x.is_zero(),
            Scalar::Approx(a) => a.abs() <= tol,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.is_zero_within(DEFAULT_TOL)
    }

    pub fn approx_eq(&self, other: &Scalar, tol: f64) -> bool {
        (self - other).is_zero_within(tol)
    }

    /// Magnitude of the value; 0 for exact zero.
    pub fn residual(&self) -> f64 {
        self.approx().abs()
    }

    pub fn sqrt(&self) -> Scalar {
        match self {
            Scalar::Exact(x) => match x.sqrt() {
                Some(r) => Scalar::Exact(r),
                None => Scalar::Approx(ApproxScalar(x.to_approx().0.sqrt())),
            },
            Scalar::Approx(a) => Scalar::Approx(ApproxScalar(a.0.sqrt())),
        }
    }
}

impl Zero for Scalar {
    fn zero() -> Self {
        Scalar::zero()
    }
    fn is_zero(&self) -> bool {
        Scalar::is_zero(self)
    }
}

impl One for Scalar {
    fn one() -> Self {
        Scalar::one()
    }
}

impl From<ExactScalar> for Scalar {
    fn from(x: ExactScalar) -> Self {
        Scalar::Exact(x)
    }
}

impl From<ApproxScalar> for Scalar {
    fn from(a: ApproxScalar) -> Self {
        Scalar::Approx(a)
    }
}

macro_rules! scalar_binop {
    ($tr:ident $m:ident) => {
        impl<'a> $tr<&'a Scalar> for &'a Scalar {
            type Output = Scalar;
            fn $m(self, o: &Scalar) -> Scalar {
                match (self, o) {
                    (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a.$m(b)),
                    _ => Scalar::Approx(ApproxScalar(self.approx().0.$m(o.approx().0))),
                }
            }
        }
    };
}
scalar_binop!(Add add);
scalar_binop!(Sub sub);
scalar_binop!(Mul mul);
scalar_binop!(Div div);
forward_owned!(Scalar: Add add, Sub sub, Mul mul, Div div);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(x) => Scalar::Exact(-x),
            Scalar::Approx(a) => Scalar::Approx(ApproxScalar(-a.0)),
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -self.clone()
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(x) => x.fmt(f),
            Scalar::Approx(a) => a.fmt(f),
        }
    }
}

impl FromStr for Scalar {
    type Err = ScalarError;

    /// Exact syntax, or a `~`-prefixed float literal for approximate input.
    fn from_str(s: &str) -> Result<Self, ScalarError> {
        if s.trim_start().starts_with('~') {
            s.parse().map(Scalar::Approx)
        } else {
            s.parse().map(Scalar::Exact)
        }
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        ScalarToken::deserialize(d)?.text().parse().map_err(serde::de::Error::custom)
    }
}

/// The two solutions of `q² − s·q + 1 = 0`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UnitQuadraticRoots {
    pub roots: [Scalar; 2],
    pub approximate: bool,
}

pub fn solve_unit_quadratic(s: &Scalar) -> UnitQuadraticRoots {
    let disc = s * s - Scalar::from_int(4);
    let r = disc.sqrt();
    let two = Scalar::from_int(2);
    let roots = [(s + &r) / two.clone(), (s - &r) / two];
    let approximate = !roots.iter().all(Scalar::is_exact);
    UnitQuadraticRoots { roots, approximate }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum RootOrder {
    Order(u32),
    NotARoot,
}

pub fn root_of_unity_order(q: &Scalar, bound: u32) -> Result<RootOrder, ScalarError> {
    root_of_unity_order_tol(q, bound, DEFAULT_TOL)
}

pub fn root_of_unity_order_tol(q: &Scalar, bound: u32, tol: f64) -> Result<RootOrder, ScalarError> {
    if q.is_zero_within(0.0) {
        return Err(ScalarError::ZeroInput);
    }
    if let Scalar::Approx(a) = q {
        if (a.abs() - 1.0).abs() > tol {
            return Ok(RootOrder::NotARoot);
        }
    }
    if let Scalar::Exact(x) = q {
        if x.norm_sqr() != BigRational::one() {
            return Ok(RootOrder::NotARoot);
        }
    }
    let one = Scalar::one();
    let mut p = q.clone();
    for n in 1..=bound {
        if p.approx_eq(&one, tol) {
            return Ok(RootOrder::Order(n));
        }
        p = &p * q;
    }
    Ok(RootOrder::NotARoot)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum QClass {
    Generic,
    NonGeneric { order: u32, n0: u32, n1: u32, parity: Parity },
}

impl QClass {
    pub fn from_order(n: u32) -> QClass {
        if n <= 2 {
            return QClass::Generic;
        }
        let n0 = if n.is_multiple_of(2) { n / 2 } else { n };
        let n1 = n0.div_ceil(2);
        let parity = if n0 % 2 == 0 { Parity::Even } else { Parity::Odd };
        QClass::NonGeneric { order: n, n0, n1, parity }
    }
}

pub fn classify_q(q: &Scalar, bound: u32) -> Result<QClass, ScalarError> {
    classify_q_tol(q, bound, DEFAULT_TOL)
}

pub fn classify_q_tol(q: &Scalar, bound: u32, tol: f64) -> Result<QClass, ScalarError> {
    Ok(match root_of_unity_order_tol(q, bound, tol)? {
        RootOrder::NotARoot => QClass::Generic,
        RootOrder::Order(n) => QClass::from_order(n),
    })
}
