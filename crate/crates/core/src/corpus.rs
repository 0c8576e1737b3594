//! Bundled fixtures: a few multimatrices and the quaternion pairing data.

use serde::Serialize;

use crate::comodule::PairingData;
use crate::linalg::Matrix;
use crate::multimatrix::{MultiMatrix, MultiMatrixJson};
use crate::scalar::ExactScalar;

#[derive(Clone, Debug)]
pub enum FixtureData {
    MultiMatrix(MultiMatrix),
    Pairing(Box<PairingData>),
}

#[derive(Clone, Debug)]
pub struct Fixture {
    pub name: &'static str,
    pub data: FixtureData,
}

impl Fixture {
    pub fn file_name(&self) -> String {
        format!("{}.json", self.name)
    }

    /// Pretty JSON with a trailing newline; stable across runs.
    pub fn to_json(&self) -> String {
        let mut out = match &self.data {
            FixtureData::MultiMatrix(m) => pretty(&MultiMatrixJson { permutation: None, ..m.to_json() }),
            FixtureData::Pairing(p) => pretty(p),
        };
        out.push('\n');
        out
    }
}

fn pretty<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("fixtures serialize")
}

/// `F_q = diag(q⁻¹, q)`.
pub fn f_q(q: &ExactScalar) -> MultiMatrix {
    let inv = q.inv().expect("q ≠ 0");
    MultiMatrix::diagonal(&[inv, q.clone()]).expect("invertible")
}

fn ones(n: usize) -> Matrix<ExactScalar> {
    Matrix::identity(n)
}

pub fn fixtures() -> Vec<Fixture> {
    let mm = |name, m| Fixture { name, data: FixtureData::MultiMatrix(m) };
    vec![
        mm("I2", MultiMatrix::identity(&[2])),
        mm("Fq2", f_q(&ExactScalar::from_int(2))),
        mm("Fq3", f_q(&ExactScalar::from_int(3))),
        // q = F_16/F_15, a rational stand-in for the golden ratio.
        mm("golden", f_q(&ExactScalar::ratio(987, 610))),
        mm(
            "2+I2",
            MultiMatrix::new(vec![Matrix::diagonal(&[ExactScalar::from_int(2)]), ones(2)]).expect("valid"),
        ),
        mm("C4", MultiMatrix::identity(&[1, 1, 1, 1])),
        Fixture { name: "quaternion", data: FixtureData::Pairing(Box::new(PairingData::quaternion())) },
    ]
}

pub fn fixture(name: &str) -> Option<Fixture> {
    fixtures().into_iter().find(|f| f.name == name)
}

pub fn multimatrix(name: &str) -> Option<MultiMatrix> {
    match fixture(name)?.data {
        FixtureData::MultiMatrix(m) => Some(m),
        FixtureData::Pairing(_) => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn byte_stable() {
        let a: Vec<String> = fixtures().iter().map(Fixture::to_json).collect();
        let b: Vec<String> = fixtures().iter().map(Fixture::to_json).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn shapes() {
        let i2 = fixture("I2").unwrap().to_json();
        let v: serde_json::Value = serde_json::from_str(&i2).unwrap();
        assert_eq!(v, serde_json::json!({"blocks": [[["1", "0"], ["0", "1"]]]}));
        let fq2: serde_json::Value = serde_json::from_str(&fixture("Fq2").unwrap().to_json()).unwrap();
        assert_eq!(fq2, serde_json::json!({"blocks": [[["1/2", "0"], ["0", "2"]]]}));
        assert_eq!(multimatrix("C4").unwrap().n_blocks(), 4);
    }

    #[test]
    fn quaternion_matches_example() {
        let FixtureData::Pairing(p) = fixture("quaternion").unwrap().data else { panic!() };
        for k in 0..3 {
            for l in 0..3 {
                let want = if k == l { ExactScalar::from_int(-2) } else { ExactScalar::from_int(0) };
                assert_eq!(p.e[k][l].as_exact(), Some(&want));
            }
        }
    }
}
