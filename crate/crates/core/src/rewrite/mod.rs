//! Diamond-Lemma engine: deg-lex reduction, ambiguity enumeration, confluence,
//! irreducible-word counting, bounded completion, and the certificates built
//! on top of them.

mod ambiguity;
mod certify;
mod hilbert;
mod poly;
mod system;

use thiserror::Error;

pub use ambiguity::{
    check_confluence, complete, complete_with, enumerate_ambiguities, Ambiguity, AmbiguityKind, Completion,
    CompletionBudget, Confluence, ConfluenceReport, Failure, MAX_COMPLETION_DEGREE,
};
pub use certify::{
    ambiguity_signatures, appendix_tally, certify_nonzero, trace_hypotheses, verify_hopf_axioms, AmbiguitySignature,
    AxiomCheck, AxiomStatus, Certificate, FamilyTally, HopfReport, NonzeroOutcome,
};
pub use hilbert::{irreducible_counts, irreducible_words};
pub use poly::{Monomial, NCPoly, TensorPoly};
pub use system::{ReductionSystem, Rule, Strategy, DEFAULT_TERM_CAP};

use crate::presentation::PresentationError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RewriteError {
    #[error("rule {lhs} -> … has right-hand monomial {offending} not below its left side")]
    IllFormedRule { lhs: String, offending: String },
    #[error("rule mentions a letter outside the alphabet")]
    UnknownLetter,
    #[error("polynomial exceeded {0} terms during reduction")]
    TermCapExceeded(usize),
    #[error("completion budget exhausted")]
    BudgetExceeded,
    #[error("completion degree {0} exceeds the limit of 6")]
    DegreeTooLarge(usize),
    #[error("reduction system is not confluent ({0} failed ambiguities)")]
    NotConfluent(usize),
    #[error("tensor arity {got} does not match {want} systems")]
    ArityMismatch { got: usize, want: usize },
    #[error("hypothesis violated: {0}")]
    HypothesisViolation(String),
    #[error(transparent)]
    Presentation(Box<PresentationError>),
}

impl From<PresentationError> for RewriteError {
    fn from(e: PresentationError) -> Self {
        match e {
            PresentationError::Rewrite(inner) => inner,
            other => RewriteError::Presentation(Box::new(other)),
        }
    }
}

/// A reduction system whose ambiguities were all checked to resolve.
#[derive(Clone, Debug)]
pub struct ConfluentSystem(ReductionSystem);

impl ConfluentSystem {
    pub fn new(sys: ReductionSystem) -> Result<Self, RewriteError> {
        let report = check_confluence(&sys)?;
        match report.outcome {
            Confluence::Resolved => Ok(ConfluentSystem(sys)),
            Confluence::Failed(f) => Err(RewriteError::NotConfluent(f.len())),
        }
    }

    pub fn system(&self) -> &ReductionSystem {
        &self.0
    }

    pub fn reduce(&self, p: &NCPoly) -> Result<NCPoly, RewriteError> {
        self.0.reduce(p)
    }
}

/// Normal form in every tensor slot, slot `k` reduced by `systems[k]`.
pub fn tensor_reduce(p: &TensorPoly, systems: &[&ConfluentSystem]) -> Result<TensorPoly, RewriteError> {
    if p.arity() != systems.len() {
        return Err(RewriteError::ArityMismatch { got: p.arity(), want: systems.len() });
    }
    let mut out = TensorPoly::zero(p.arity());
    let mut cache: Vec<std::collections::HashMap<Monomial, NCPoly>> = vec![Default::default(); p.arity()];
    for (key, c) in p.terms() {
        let mut acc = TensorPoly::unit(0);
        for (slot, m) in key.iter().enumerate() {
            let nf = match cache[slot].get(m) {
                Some(nf) => nf.clone(),
                None => {
                    let nf = systems[slot].reduce(&NCPoly::term(m.clone(), num_traits::One::one()))?;
                    cache[slot].insert(m.clone(), nf.clone());
                    nf
                }
            };
            acc = append_slot(&acc, &nf);
        }
        out.add_scaled(&acc, c);
    }
    Ok(out)
}

fn append_slot(t: &TensorPoly, p: &NCPoly) -> TensorPoly {
    let mut out = TensorPoly::zero(t.arity() + 1);
    for (key, c) in t.terms() {
        for (m, pc) in p.terms() {
            let mut k = key.clone();
            k.push(m.clone());
            out.add_term(k, &(c * pc));
        }
    }
    out
}

pub fn tensor_reduce_pair(
    p: &TensorPoly,
    left: &ConfluentSystem,
    right: &ConfluentSystem,
) -> Result<TensorPoly, RewriteError> {
    tensor_reduce(p, &[left, right])
}
