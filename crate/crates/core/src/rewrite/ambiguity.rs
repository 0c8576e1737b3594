use std::collections::HashMap;

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use super::poly::{Monomial, NCPoly};
use super::system::{ReductionSystem, Rule};
use super::RewriteError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum AmbiguityKind {
    Overlap,
    Inclusion,
}

/// For an overlap, `rules.0` matches the witness prefix and `rules.1` starts at
/// `offset`. For an inclusion, `rules.0` is the inner rule found at `offset`
/// inside the left side of `rules.1`, which is the witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ambiguity {
    pub kind: AmbiguityKind,
    pub rules: (usize, usize),
    pub witness: Monomial,
    pub offset: usize,
}

impl Ambiguity {
    /// The two one-step rewrites of the witness.
    pub fn branches(&self, sys: &ReductionSystem) -> (NCPoly, NCPoly) {
        let w = &self.witness;
        let (ra, rb) = (&sys.rules()[self.rules.0], &sys.rules()[self.rules.1]);
        match self.kind {
            AmbiguityKind::Overlap => {
                let tail = w.slice(ra.lhs.len(), w.len());
                let head = w.slice(0, self.offset);
                (ra.rhs.mul(&NCPoly::term(tail, One::one())), NCPoly::term(head, One::one()).mul(&rb.rhs))
            }
            AmbiguityKind::Inclusion => {
                let head = w.slice(0, self.offset);
                let tail = w.slice(self.offset + ra.lhs.len(), w.len());
                let inner = NCPoly::term(head, One::one()).mul(&ra.rhs).mul(&NCPoly::term(tail, One::one()));
                (rb.rhs.clone(), inner)
            }
        }
    }
}

/// All overlap and inclusion ambiguities between rule left sides.
pub fn enumerate_ambiguities(sys: &ReductionSystem) -> Vec<Ambiguity> {
    let rules = sys.rules();
    let mut by_prefix: HashMap<&[u32], Vec<usize>> = HashMap::new();
    for (k, r) in rules.iter().enumerate() {
        let w = r.lhs.letters();
        for p in 1..w.len() {
            by_prefix.entry(&w[..p]).or_default().push(k);
        }
    }
    let mut out = Vec::new();
    for (b, rb) in rules.iter().enumerate() {
        let w = rb.lhs.letters();
        // inclusions: some other left side occurs inside w
        for start in 0..=w.len() {
            for len in sys.lhs_lengths() {
                if start + len > w.len() {
                    continue;
                }
                for &a in sys.rules_with_lhs(&w[start..start + len]) {
                    let same = len == w.len();
                    // equal left sides give one witness per unordered pair
                    if a == b || (same && a > b) {
                        continue;
                    }
                    out.push(Ambiguity { kind: AmbiguityKind::Inclusion, rules: (a, b), witness: rb.lhs.clone(), offset: start });
                }
            }
        }
        // overlaps: a proper suffix of w is a proper prefix of another left side
        for k in 1..w.len() {
            let Some(cands) = by_prefix.get(&w[k..]) else { continue };
            for &c in cands {
                let wc = rules[c].lhs.letters();
                if wc.len() <= w.len() - k {
                    continue;
                }
                let mut witness = w.to_vec();
                witness.extend_from_slice(&wc[w.len() - k..]);
                out.push(Ambiguity { kind: AmbiguityKind::Overlap, rules: (b, c), witness: Monomial(witness), offset: k });
            }
        }
    }
    out.sort_by_key(|x| (x.rules, x.offset, x.kind));
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct Failure {
    pub ambiguity: Ambiguity,
    pub nf_left: NCPoly,
    pub nf_right: NCPoly,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Confluence {
    Resolved,
    Failed(Vec<Failure>),
}

#[derive(Clone, Debug)]
pub struct ConfluenceReport {
    pub ambiguity_count: usize,
    pub outcome: Confluence,
}

impl ConfluenceReport {
    pub fn is_resolved(&self) -> bool {
        self.outcome == Confluence::Resolved
    }

    pub fn failures(&self) -> &[Failure] {
        match &self.outcome {
            Confluence::Resolved => &[],
            Confluence::Failed(f) => f,
        }
    }
}

fn resolve(sys: &ReductionSystem, amb: &Ambiguity) -> Result<Option<Failure>, RewriteError> {
    let (l, r) = amb.branches(sys);
    let nf_left = sys.reduce(&l)?;
    let nf_right = sys.reduce(&r)?;
    Ok((nf_left != nf_right).then(|| Failure { ambiguity: amb.clone(), nf_left, nf_right }))
}

/// Reduces both branches of every ambiguity; results are ordered by ambiguity index.
pub fn check_confluence(sys: &ReductionSystem) -> Result<ConfluenceReport, RewriteError> {
    let ambs = enumerate_ambiguities(sys);
    check_ambiguities(sys, &ambs)
}

fn check_ambiguities(sys: &ReductionSystem, ambs: &[Ambiguity]) -> Result<ConfluenceReport, RewriteError> {
    let results: Vec<Option<Failure>> = ambs.par_iter().map(|a| resolve(sys, a)).collect::<Result<_, _>>()?;
    let failures: Vec<Failure> = results.into_iter().flatten().collect();
    let outcome = if failures.is_empty() { Confluence::Resolved } else { Confluence::Failed(failures) };
    Ok(ConfluenceReport { ambiguity_count: ambs.len(), outcome })
}

pub const MAX_COMPLETION_DEGREE: usize = 6;

#[derive(Clone, Debug)]
pub struct CompletionBudget {
    pub max_rounds: usize,
    pub max_new_rules: usize,
}

impl Default for CompletionBudget {
    fn default() -> Self {
        CompletionBudget { max_rounds: 16, max_new_rules: 4096 }
    }
}

#[derive(Debug)]
pub struct Completion {
    pub system: ReductionSystem,
    pub added: usize,
    /// The rule `1 → 0` was derived: the presented algebra is zero.
    pub collapsed: bool,
}

/// Bounded completion: orients normal-form differences of failed ambiguities
/// with witnesses of length ≤ `max_degree` into new rules.
pub fn complete(sys: &ReductionSystem, max_degree: usize) -> Result<Completion, RewriteError> {
    complete_with(sys, max_degree, &CompletionBudget::default())
}

pub fn complete_with(sys: &ReductionSystem, max_degree: usize, budget: &CompletionBudget) -> Result<Completion, RewriteError> {
    if max_degree > MAX_COMPLETION_DEGREE {
        return Err(RewriteError::DegreeTooLarge(max_degree));
    }
    let mut system = sys.clone();
    let mut added = 0;
    for _ in 0..budget.max_rounds {
        let ambs: Vec<Ambiguity> =
            enumerate_ambiguities(&system).into_iter().filter(|a| a.witness.len() <= max_degree).collect();
        let report = check_ambiguities(&system, &ambs)?;
        if report.is_resolved() {
            return Ok(Completion { system, added, collapsed: false });
        }
        for f in report.failures() {
            let diff = system.reduce(&f.nf_left.sub(&f.nf_right))?;
            let Some((lead, c)) = diff.leading().map(|(m, c)| (m.clone(), c.clone())) else { continue };
            let inv = c.inv().expect("leading coefficient is nonzero");
            let mut rhs = diff.scale(&-inv);
            rhs.add_term(lead.clone(), &One::one());
            let collapsed = lead.is_empty();
            system.push_rule(Rule { lhs: lead, rhs, family: 0 })?;
            added += 1;
            if collapsed {
                return Ok(Completion { system, added, collapsed: true });
            }
            if added > budget.max_new_rules {
                return Err(RewriteError::BudgetExceeded);
            }
        }
    }
    Err(RewriteError::BudgetExceeded)
}

impl Failure {
    pub fn difference(&self) -> NCPoly {
        self.nf_left.sub(&self.nf_right)
    }

    pub fn is_scalar_contradiction(&self) -> bool {
        let d = self.difference();
        d.len() == 1 && d.leading().is_some_and(|(m, c)| m.is_empty() && !c.is_zero())
    }
}
