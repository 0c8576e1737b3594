use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::poly::{Monomial, NCPoly};
use super::RewriteError;

pub const DEFAULT_TERM_CAP: usize = 1_000_000;

/// `lhs → rhs`; `family` is a free tag (the presentation uses 1–4, completion 0).
#[derive(Clone, Debug, PartialEq)]
pub struct Rule {
    pub lhs: Monomial,
    pub rhs: NCPoly,
    pub family: u8,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    Leftmost,
    Rightmost,
    /// Uniform choice among all (position, rule) matches, seeded.
    Random(u64),
}

#[derive(Clone)]
pub struct ReductionSystem {
    n_letters: u32,
    rules: Vec<Rule>,
    index: HashMap<Vec<u32>, Vec<usize>>,
    lengths: BTreeSet<usize>,
    names: Arc<Vec<String>>,
    term_cap: usize,
    verified: bool,
}

impl ReductionSystem {
    /// Rejects rules whose right side is not strictly below the left side.
    pub fn new(n_letters: u32, rules: Vec<Rule>) -> Result<Self, RewriteError> {
        let names = (0..n_letters).map(|g| format!("x{g}")).collect();
        Self::with_names(rules, Arc::new(names))
    }

    pub fn with_names(rules: Vec<Rule>, names: Arc<Vec<String>>) -> Result<Self, RewriteError> {
        let mut sys = ReductionSystem {
            n_letters: names.len() as u32,
            rules: Vec::with_capacity(rules.len()),
            index: HashMap::new(),
            lengths: BTreeSet::new(),
            names,
            term_cap: DEFAULT_TERM_CAP,
            verified: true,
        };
        for r in rules {
            sys.push_rule(r)?;
        }
        Ok(sys)
    }

    pub fn push_rule(&mut self, rule: Rule) -> Result<usize, RewriteError> {
        if let Some(bad) = rule.rhs.terms().map(|(m, _)| m).find(|m| **m >= rule.lhs) {
            return Err(RewriteError::IllFormedRule {
                lhs: self.render_monomial(&rule.lhs),
                offending: self.render_monomial(bad),
            });
        }
        if rule.lhs.letters().iter().any(|&g| g >= self.n_letters) {
            return Err(RewriteError::UnknownLetter);
        }
        let k = self.rules.len();
        self.index.entry(rule.lhs.letters().to_vec()).or_default().push(k);
        self.lengths.insert(rule.lhs.len());
        self.rules.push(rule);
        Ok(k)
    }

    pub fn set_term_cap(&mut self, cap: usize) {
        self.term_cap = cap;
    }

    /// Marks a system built outside the hypotheses that guarantee its meaning.
    pub fn mark_unverified(&mut self) {
        self.verified = false;
    }

    pub fn is_verified(&self) -> bool {
        self.verified
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn n_letters(&self) -> u32 {
        self.n_letters
    }

    pub fn names(&self) -> &Arc<Vec<String>> {
        &self.names
    }

    pub fn name(&self, g: u32) -> String {
        self.names[g as usize].clone()
    }

    pub fn render_monomial(&self, m: &Monomial) -> String {
        m.render(&|g| self.name(g))
    }

    pub fn render(&self, p: &NCPoly) -> String {
        p.render(&|g| self.name(g))
    }

    /// Rules whose left side is exactly `w`, in insertion order.
    pub fn rules_with_lhs(&self, w: &[u32]) -> &[usize] {
        self.index.get(w).map_or(&[], Vec::as_slice)
    }

    pub fn lhs_lengths(&self) -> impl Iterator<Item = usize> + '_ {
        self.lengths.iter().copied()
    }

    pub fn is_irreducible(&self, m: &Monomial) -> bool {
        self.first_match(m.letters(), Strategy::Leftmost, None).is_none()
    }

    fn first_match(&self, w: &[u32], strategy: Strategy, rng: Option<&mut ChaCha8Rng>) -> Option<(usize, usize)> {
        let at = |pos: usize| {
            self.lengths
                .iter()
                .filter(|&&l| pos + l <= w.len())
                .find_map(|&l| self.index.get(&w[pos..pos + l]).map(|rs| (pos, rs[0])))
        };
        match strategy {
            Strategy::Leftmost => (0..=w.len()).find_map(at),
            Strategy::Rightmost => (0..=w.len()).rev().find_map(at),
            Strategy::Random(_) => {
                let mut all = Vec::new();
                for pos in 0..=w.len() {
                    for &l in &self.lengths {
                        if pos + l <= w.len() {
                            if let Some(rs) = self.index.get(&w[pos..pos + l]) {
                                all.extend(rs.iter().map(|&r| (pos, r)));
                            }
                        }
                    }
                }
                if all.is_empty() {
                    return None;
                }
                let rng = rng.expect("random strategy carries a generator");
                Some(all[rng.gen_range(0..all.len())])
            }
        }
    }

    /// Normal form: repeatedly rewrites the largest reducible monomial.
    pub fn reduce(&self, p: &NCPoly) -> Result<NCPoly, RewriteError> {
        self.reduce_with(p, Strategy::Leftmost)
    }

    pub fn reduce_with(&self, p: &NCPoly, strategy: Strategy) -> Result<NCPoly, RewriteError> {
        let mut rng = match strategy {
            Strategy::Random(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
            _ => None,
        };
        let mut work = p.clone();
        let mut out = NCPoly::zero();
        while let Some((m, c)) = work.pop_leading() {
            match self.first_match(m.letters(), strategy, rng.as_mut()) {
                None => out.add_term(m, &c),
                Some((pos, r)) => {
                    let rule = &self.rules[r];
                    let prefix = &m.letters()[..pos];
                    let suffix = &m.letters()[pos + rule.lhs.len()..];
                    for (rm, rc) in rule.rhs.terms() {
                        let mut w = Vec::with_capacity(prefix.len() + rm.len() + suffix.len());
                        w.extend_from_slice(prefix);
                        w.extend_from_slice(rm.letters());
                        w.extend_from_slice(suffix);
                        work.add_term(Monomial(w), &(&c * rc));
                    }
                    if work.len() + out.len() > self.term_cap {
                        return Err(RewriteError::TermCapExceeded(self.term_cap));
                    }
                }
            }
        }
        Ok(out)
    }
}

impl std::fmt::Debug for ReductionSystem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for r in &self.rules {
            writeln!(f, "{} -> {}", self.render_monomial(&r.lhs), self.render(&r.rhs))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ExactScalar;

    fn rule(lhs: &[u32], rhs: NCPoly) -> Rule {
        Rule { lhs: Monomial(lhs.to_vec()), rhs, family: 0 }
    }

    #[test]
    fn rejects_increasing_rule() {
        let err = ReductionSystem::new(3, vec![rule(&[0], NCPoly::letter(1))]).unwrap_err();
        assert!(matches!(err, RewriteError::IllFormedRule { .. }));
    }

    #[test]
    fn reduces_to_irreducible_form() {
        // x1 x0 → x0 ; x1 → 2
        let sys = ReductionSystem::new(
            2,
            vec![rule(&[1, 0], NCPoly::letter(0)), rule(&[1], NCPoly::constant(ExactScalar::from_int(2)))],
        )
        .unwrap();
        let p = NCPoly::word(&[1, 1, 0]);
        // leftmost: x1 x1 x0 → 2 x1 x0 → 4 x0 (x1 at position 0 fires first)
        assert_eq!(sys.reduce(&p).unwrap(), NCPoly::term(Monomial::letter(0), ExactScalar::from_int(4)));
        assert!(sys.is_irreducible(&Monomial(vec![0, 0])));
    }

    #[test]
    fn term_cap_is_enforced() {
        let rhs: NCPoly = (0..3).map(|g| (Monomial::letter(g), ExactScalar::from_int(1))).collect();
        let mut sys = ReductionSystem::new(4, vec![rule(&[3], rhs)]).unwrap();
        sys.set_term_cap(10);
        let p = NCPoly::word(&[3, 3, 3, 3]);
        assert_eq!(sys.reduce(&p), Err(RewriteError::TermCapExceeded(10)));
    }
}
