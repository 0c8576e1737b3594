use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::scalar::ExactScalar;

/// A word in dense generator ids. Ids are assigned in generator order, so
/// comparing ids compares generators.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn letter(g: u32) -> Self {
        Monomial(vec![g])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[u32] {
        &self.0
    }

    pub fn concat(&self, o: &Monomial) -> Monomial {
        let mut w = Vec::with_capacity(self.len() + o.len());
        w.extend_from_slice(&self.0);
        w.extend_from_slice(&o.0);
        Monomial(w)
    }

    pub fn slice(&self, from: usize, to: usize) -> Monomial {
        Monomial(self.0[from..to].to_vec())
    }

    pub fn contains(&self, pattern: &[u32]) -> bool {
        pattern.is_empty() || self.0.windows(pattern.len()).any(|w| w == pattern)
    }

    pub fn render(&self, names: &dyn Fn(u32) -> String) -> String {
        if self.is_empty() {
            return "1".into();
        }
        self.0.iter().map(|&g| names(g)).collect::<Vec<_>>().join("*")
    }
}

/// Degree first, then lexicographic.
impl Ord for Monomial {
    fn cmp(&self, o: &Self) -> Ordering {
        self.len().cmp(&o.len()).then_with(|| self.0.cmp(&o.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// Noncommutative polynomial with no zero coefficients.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct NCPoly {
    terms: BTreeMap<Monomial, ExactScalar>,
}

impl NCPoly {
    pub fn zero() -> Self {
        NCPoly::default()
    }

    pub fn constant(c: ExactScalar) -> Self {
        Self::term(Monomial::one(), c)
    }

    pub fn one() -> Self {
        Self::constant(ExactScalar::one())
    }

    pub fn term(m: Monomial, c: ExactScalar) -> Self {
        let mut p = NCPoly::zero();
        p.add_term(m, &c);
        p
    }

    pub fn letter(g: u32) -> Self {
        Self::term(Monomial::letter(g), ExactScalar::one())
    }

    pub fn word(w: &[u32]) -> Self {
        Self::term(Monomial(w.to_vec()), ExactScalar::one())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, m: Monomial, c: &ExactScalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c.clone());
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn coefficient(&self, m: &Monomial) -> ExactScalar {
        self.terms.get(m).cloned().unwrap_or_else(ExactScalar::zero)
    }

    /// Terms in descending monomial order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &ExactScalar)> {
        self.terms.iter().rev()
    }

    pub fn leading(&self) -> Option<(&Monomial, &ExactScalar)> {
        self.terms.iter().next_back()
    }

    pub fn pop_leading(&mut self) -> Option<(Monomial, ExactScalar)> {
        self.terms.pop_last()
    }

    pub fn degree(&self) -> Option<usize> {
        self.leading().map(|(m, _)| m.len())
    }

    pub fn add(&self, o: &NCPoly) -> NCPoly {
        let mut out = self.clone();
        out.add_assign(o);
        out
    }

    pub fn add_assign(&mut self, o: &NCPoly) {
        for (m, c) in &o.terms {
            self.add_term(m.clone(), c);
        }
    }

    pub fn add_scaled(&mut self, o: &NCPoly, s: &ExactScalar) {
        for (m, c) in &o.terms {
            self.add_term(m.clone(), &(c * s));
        }
    }

    pub fn sub(&self, o: &NCPoly) -> NCPoly {
        let mut out = self.clone();
        out.add_scaled(o, &-ExactScalar::one());
        out
    }

    pub fn scale(&self, s: &ExactScalar) -> NCPoly {
        let mut out = NCPoly::zero();
        out.add_scaled(self, s);
        out
    }

    pub fn mul(&self, o: &NCPoly) -> NCPoly {
        let mut out = NCPoly::zero();
        for (a, ca) in &self.terms {
            for (b, cb) in &o.terms {
                out.add_term(a.concat(b), &(ca * cb));
            }
        }
        out
    }

    pub fn render(&self, names: &dyn Fn(u32) -> String) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut s = String::new();
        for (k, (m, c)) in self.terms().enumerate() {
            let cs = c.to_string();
            let (neg, mag) = match cs.strip_prefix('-') {
                Some(rest) if c.is_real() => (true, rest.to_string()),
                _ => (false, if c.is_real() { cs } else { format!("({cs})") }),
            };
            if k > 0 {
                s.push_str(if neg { " - " } else { " + " });
            } else if neg {
                s.push('-');
            }
            match (mag == "1", m.is_empty()) {
                (true, true) => s.push('1'),
                (true, false) => s.push_str(&m.render(names)),
                (false, true) => s.push_str(&mag),
                (false, false) => {
                    s.push_str(&mag);
                    s.push('*');
                    s.push_str(&m.render(names));
                }
            }
        }
        s
    }
}

impl FromIterator<(Monomial, ExactScalar)> for NCPoly {
    fn from_iter<I: IntoIterator<Item = (Monomial, ExactScalar)>>(iter: I) -> Self {
        let mut p = NCPoly::zero();
        for (m, c) in iter {
            p.add_term(m, &c);
        }
        p
    }
}

impl fmt::Debug for NCPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render(&|g| format!("x{g}")))
    }
}

/// Element of a tensor product of free algebras; each key holds one word per slot.
#[derive(Clone, PartialEq, Eq)]
pub struct TensorPoly {
    arity: usize,
    terms: BTreeMap<Vec<Monomial>, ExactScalar>,
}

impl TensorPoly {
    pub fn zero(arity: usize) -> Self {
        TensorPoly { arity, terms: BTreeMap::new() }
    }

    /// `1⊗…⊗1`.
    pub fn unit(arity: usize) -> Self {
        let mut t = Self::zero(arity);
        t.add_term(vec![Monomial::one(); arity], &ExactScalar::one());
        t
    }

    pub fn pure(slots: Vec<Monomial>, c: ExactScalar) -> Self {
        let mut t = Self::zero(slots.len());
        t.add_term(slots, &c);
        t
    }

    pub fn from_poly(p: &NCPoly) -> Self {
        let mut t = Self::zero(1);
        for (m, c) in p.terms() {
            t.add_term(vec![m.clone()], c);
        }
        t
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<Monomial>, &ExactScalar)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, slots: Vec<Monomial>, c: &ExactScalar) {
        assert_eq!(slots.len(), self.arity, "tensor arity mismatch");
        if c.is_zero() {
            return;
        }
        match self.terms.entry(slots) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c.clone());
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add_scaled(&mut self, o: &TensorPoly, s: &ExactScalar) {
        for (k, c) in &o.terms {
            self.add_term(k.clone(), &(c * s));
        }
    }

    pub fn sub(&self, o: &TensorPoly) -> TensorPoly {
        let mut out = self.clone();
        out.add_scaled(o, &-ExactScalar::one());
        out
    }

    /// Slotwise product.
    pub fn mul(&self, o: &TensorPoly) -> TensorPoly {
        assert_eq!(self.arity, o.arity, "tensor arity mismatch");
        let mut out = TensorPoly::zero(self.arity);
        for (a, ca) in &self.terms {
            for (b, cb) in &o.terms {
                out.add_term(a.iter().zip(b).map(|(x, y)| x.concat(y)).collect(), &(ca * cb));
            }
        }
        out
    }

    /// Replaces slot `slot` by the image of its word under the algebra map
    /// sending generator `g` to `hom(g)` (all images of a common arity).
    pub fn apply_slot(&self, slot: usize, image_arity: usize, hom: &dyn Fn(u32) -> TensorPoly) -> TensorPoly {
        let mut out = TensorPoly::zero(self.arity - 1 + image_arity);
        for (key, c) in &self.terms {
            let img = key[slot]
                .letters()
                .iter()
                .fold(TensorPoly::unit(image_arity), |acc, &g| acc.mul(&hom(g)));
            for (ik, ic) in &img.terms {
                let mut k = key[..slot].to_vec();
                k.extend(ik.iter().cloned());
                k.extend(key[slot + 1..].iter().cloned());
                out.add_term(k, &(c * ic));
            }
        }
        out
    }

    /// Multiplies slots `a` and `a+1` together.
    pub fn contract(&self, a: usize) -> TensorPoly {
        let mut out = TensorPoly::zero(self.arity - 1);
        for (key, c) in &self.terms {
            let mut k = key[..a].to_vec();
            k.push(key[a].concat(&key[a + 1]));
            k.extend(key[a + 2..].iter().cloned());
            out.add_term(k, c);
        }
        out
    }

    /// Collapses an arity-one tensor back to a polynomial.
    pub fn into_poly(self) -> NCPoly {
        assert_eq!(self.arity, 1, "only arity-one tensors are polynomials");
        self.terms.into_iter().map(|(mut k, c)| (k.pop().expect("one slot"), c)).collect()
    }

    pub fn render(&self, names: &[&dyn Fn(u32) -> String]) -> String {
        if self.is_zero() {
            return "0".into();
        }
        self.terms
            .iter()
            .map(|(k, c)| {
                let slots: Vec<String> = k.iter().zip(names).map(|(m, n)| m.render(*n)).collect();
                format!("({c})*{}", slots.join(" ⊗ "))
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

impl fmt::Debug for TensorPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = |g: u32| format!("x{g}");
        let names: Vec<&dyn Fn(u32) -> String> = vec![&n; self.arity];
        write!(f, "{}", self.render(&names))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monomial_order_is_deglex() {
        let a = Monomial(vec![5]);
        let b = Monomial(vec![0, 0]);
        let c = Monomial(vec![0, 1]);
        assert!(Monomial::one() < a);
        assert!(a < b && b < c);
    }

    #[test]
    fn poly_cancellation_and_order() {
        let mut p = NCPoly::letter(1);
        p.add_term(Monomial(vec![0, 0]), &ExactScalar::from_int(2));
        p.add_term(Monomial::letter(1), &ExactScalar::from_int(-1));
        assert_eq!(p.len(), 1);
        assert_eq!(p.leading().unwrap().0, &Monomial(vec![0, 0]));
        assert_eq!(p.render(&|g| format!("x{g}")), "2*x0*x0");
    }

    #[test]
    fn tensor_apply_slot() {
        // x0 ↦ x0⊗x1 + x1⊗x0 applied to (x0 x0) ⊗ 1 gives four terms
        let d = |_: u32| {
            let mut t = TensorPoly::pure(vec![Monomial::letter(0), Monomial::letter(1)], ExactScalar::one());
            t.add_term(vec![Monomial::letter(1), Monomial::letter(0)], &ExactScalar::one());
            t
        };
        let t = TensorPoly::pure(vec![Monomial(vec![0, 0]), Monomial::one()], ExactScalar::one());
        let out = t.apply_slot(0, 2, &d);
        assert_eq!(out.arity(), 3);
        assert_eq!(out.len(), 4);
        assert_eq!(out.contract(0).contract(0).len(), 4);
    }
}
