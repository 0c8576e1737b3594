use std::collections::BTreeMap;

use serde::Serialize;

use super::ambiguity::{check_confluence, enumerate_ambiguities, AmbiguityKind};
use super::poly::{Monomial, NCPoly, TensorPoly};
use super::system::ReductionSystem;
use super::{tensor_reduce, ConfluentSystem, RewriteError};
use crate::multimatrix::{MultiMatrix, Triangularization};
use crate::presentation::{antipode, comultiplication, counit, Context, GenIndex, RuleMode};

#[derive(Clone, Debug, Serialize)]
pub struct Certificate {
    pub e_diagonal: Vec<Vec<Vec<String>>>,
    pub f_triangular: Vec<Vec<Vec<String>>>,
    pub rule_count: usize,
    pub ambiguity_count: usize,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum NonzeroOutcome {
    /// The (DL) system is confluent, so `1` is a nonzero basis element.
    Certificate(Certificate),
    Inconclusive { reason: String },
}

fn rows(m: &MultiMatrix) -> Vec<Vec<Vec<String>>> {
    m.blocks().iter().map(|b| b.to_rows().into_iter().map(|r| r.iter().map(ToString::to_string).collect()).collect()).collect()
}

/// Trace hypotheses for `𝒜(E,F)`: `Tr(E⁻¹) = Tr(F⁻¹)` and every `tr(E_λ)`, `tr(F_μ)` equal.
pub fn trace_hypotheses(e: &MultiMatrix, f: &MultiMatrix) -> Result<(), RewriteError> {
    let (ie, i_f) = (e.inverse_trace(), f.inverse_trace());
    if ie != i_f {
        return Err(RewriteError::HypothesisViolation(format!("Tr(E⁻¹) = {ie} differs from Tr(F⁻¹) = {i_f}")));
    }
    let t0 = e.block_traces()[0].clone();
    for (side, m) in [("E", e), ("F", f)] {
        for (k, t) in m.block_traces().into_iter().enumerate() {
            if t != t0 {
                return Err(RewriteError::HypothesisViolation(format!(
                    "tr({side}_{}) = {t} differs from tr(E_1) = {t0}",
                    k + 1
                )));
            }
        }
    }
    Ok(())
}

/// Conjugates E to diagonal and F to lower-triangular form, then checks the
/// (DL) system of the conjugated pair for confluence.
pub fn certify_nonzero(e: &MultiMatrix, f: &MultiMatrix) -> Result<NonzeroOutcome, RewriteError> {
    if e.last_dim() < 2 || f.last_dim() < 2 {
        return Err(RewriteError::HypothesisViolation("d_E = 1 or d_F = 1".into()));
    }
    trace_hypotheses(e, f)?;
    let inconclusive = |reason: &str| Ok(NonzeroOutcome::Inconclusive { reason: reason.into() });
    let Triangularization::Exact { t: et, .. } = e.triangularize() else {
        return inconclusive("E has no exact triangular form");
    };
    if !et.is_diagonal() {
        return inconclusive("E is not diagonalizable");
    }
    let Triangularization::Exact { t: ft, .. } = f.triangularize() else {
        return inconclusive("F has no exact triangular form");
    };
    let ctx = Context::new(&et, &ft);
    let sys = ctx.reduction_rules(RuleMode::Strict)?;
    let report = check_confluence(&sys)?;
    if !report.is_resolved() {
        return inconclusive("the reduction system is not confluent");
    }
    Ok(NonzeroOutcome::Certificate(Certificate {
        e_diagonal: rows(&et),
        f_triangular: rows(&ft),
        rule_count: sys.rules().len(),
        ambiguity_count: report.ambiguity_count,
    }))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum AxiomStatus {
    Pass,
    Fail { witnesses: Vec<String> },
    Skipped { reason: String },
}

#[derive(Clone, Debug, Serialize)]
pub struct AxiomCheck {
    pub name: String,
    #[serde(flatten)]
    pub status: AxiomStatus,
}

#[derive(Clone, Debug, Serialize)]
pub struct HopfReport {
    pub checks: Vec<AxiomCheck>,
}

impl HopfReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.status == AxiomStatus::Pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &AxiomCheck> {
        self.checks.iter().filter(|c| c.status != AxiomStatus::Pass)
    }
}

struct Algebra {
    ctx: Context,
    sys: Result<ConfluentSystem, String>,
}

impl Algebra {
    fn new(e: &MultiMatrix, f: &MultiMatrix) -> Algebra {
        let ctx = Context::new(e, f);
        let sys = ctx
            .reduction_rules(RuleMode::Strict)
            .map_err(|err| err.to_string())
            .and_then(|s| ConfluentSystem::new(s).map_err(|err| err.to_string()));
        Algebra { ctx, sys }
    }

    fn confluent(&self, label: &str) -> Result<&ConfluentSystem, String> {
        self.sys.as_ref().map_err(|err| format!("𝒜({label}) has no confluent presentation: {err}"))
    }
}

fn check(name: &str, result: Result<Vec<String>, String>) -> AxiomCheck {
    let status = match result {
        Ok(w) if w.is_empty() => AxiomStatus::Pass,
        Ok(witnesses) => AxiomStatus::Fail { witnesses },
        Err(reason) => AxiomStatus::Skipped { reason },
    };
    AxiomCheck { name: name.into(), status }
}

fn as_tensor(ctx: &Context, x: &GenIndex) -> TensorPoly {
    TensorPoly::pure(vec![Monomial::letter(ctx.id(x).expect("generator of this context"))], num_traits::One::one())
}

/// Checks the cogroupoid axioms on every generator: coassociativity across
/// `(G, M)`, both counit identities, both antipode identities, and that `Δ^G`
/// maps every defining relation of `𝒜(E,F)` to zero.
pub fn verify_hopf_axioms(
    e: &MultiMatrix,
    f: &MultiMatrix,
    g: &MultiMatrix,
    m: &MultiMatrix,
) -> Result<HopfReport, RewriteError> {
    let ef = Algebra::new(e, f);
    let fe = Algebra::new(f, e);
    let ee = Context::new(e, e);
    let ff = Context::new(f, f);
    let eg = Algebra::new(e, g);
    let gf = Algebra::new(g, f);
    let em = Context::new(e, m);
    let mg = Context::new(m, g);
    let mf = Context::new(m, f);
    let mut checks = Vec::new();

    // (Δ^M_{E,G} ⊗ id)Δ^G_{E,F} = (id ⊗ Δ^G_{M,F})Δ^M_{E,F}, formally in 𝒜(E,M)⊗𝒜(M,G)⊗𝒜(G,F)
    let mut bad = Vec::new();
    for x in ef.ctx.generators() {
        let lhs = comultiplication(&eg.ctx, &gf.ctx, x)?
            .apply_slot(0, 2, &|a| comultiplication(&em, &mg, &eg.ctx.gen(a)).expect("shared context"));
        let rhs = comultiplication(&em, &mf, x)?
            .apply_slot(1, 2, &|a| comultiplication(&mg, &gf.ctx, &mf.gen(a)).expect("shared context"));
        if lhs != rhs {
            bad.push(x.to_string());
        }
    }
    checks.push(check("coassociativity", Ok(bad)));

    // (ε_E ⊗ id)Δ^E_{E,F}(x) = x and (id ⊗ ε_F)Δ^F_{E,F}(x) = x
    let mut bad_l = Vec::new();
    let mut bad_r = Vec::new();
    for x in ef.ctx.generators() {
        let want = as_tensor(&ef.ctx, x);
        let left = comultiplication(&ee, &ef.ctx, x)?;
        let mut got = TensorPoly::zero(1);
        for (k, c) in left.terms() {
            let eps = counit(&ee, &ee.gen(k[0].letters()[0]))?;
            got.add_term(vec![k[1].clone()], &(c * &eps));
        }
        if got != want {
            bad_l.push(x.to_string());
        }
        let right = comultiplication(&ef.ctx, &ff, x)?;
        let mut got = TensorPoly::zero(1);
        for (k, c) in right.terms() {
            let eps = counit(&ff, &ff.gen(k[1].letters()[0]))?;
            got.add_term(vec![k[0].clone()], &(c * &eps));
        }
        if got != want {
            bad_r.push(x.to_string());
        }
    }
    checks.push(check("left counit", Ok(bad_l)));
    checks.push(check("right counit", Ok(bad_r)));

    // m(id ⊗ S_{F,E})Δ^F_{E,E} = uε in 𝒜(E,F); m(S_{E,F} ⊗ id)Δ^F_{E,E} = uε in 𝒜(F,E)
    let antipode_check = |right: bool| -> Result<Vec<String>, String> {
        let target = if right { &ef } else { &fe };
        let sys = target.confluent(if right { "E,F" } else { "F,E" })?;
        let mut bad = Vec::new();
        for x in ee.generators() {
            let delta = comultiplication(&ef.ctx, &fe.ctx, x).map_err(|e| e.to_string())?;
            let mut prod = NCPoly::zero();
            for (k, c) in delta.terms() {
                let (a, b) = (ef.ctx.gen(k[0].letters()[0]), fe.ctx.gen(k[1].letters()[0]));
                let term = if right {
                    NCPoly::letter(ef.ctx.id(&a).expect("own generator"))
                        .mul(&antipode(&fe.ctx, &ef.ctx, &b).map_err(|e| e.to_string())?)
                } else {
                    antipode(&ef.ctx, &fe.ctx, &a)
                        .map_err(|e| e.to_string())?
                        .mul(&NCPoly::letter(fe.ctx.id(&b).expect("own generator")))
                };
                prod.add_scaled(&term, c);
            }
            let eps = counit(&ee, x).map_err(|e| e.to_string())?;
            let diff = prod.sub(&NCPoly::constant(eps));
            if !sys.reduce(&diff).map_err(|e| e.to_string())?.is_zero() {
                bad.push(x.to_string());
            }
        }
        Ok(bad)
    };
    checks.push(check("antipode m(id⊗S)Δ = uε", antipode_check(true)));
    checks.push(check("antipode m(S⊗id)Δ = uε", antipode_check(false)));

    // Δ^G_{E,F} kills the defining relations of 𝒜(E,F)
    let well_defined = || -> Result<Vec<String>, String> {
        let l = eg.confluent("E,G")?;
        let r = gf.confluent("G,F")?;
        let images: Vec<TensorPoly> = ef
            .ctx
            .generators()
            .iter()
            .map(|x| comultiplication(&eg.ctx, &gf.ctx, x).expect("shared context"))
            .collect();
        let mut bad = Vec::new();
        for rel in ef.ctx.relations().iter() {
            let img = TensorPoly::from_poly(rel).apply_slot(0, 2, &|a| images[a as usize].clone());
            if !tensor_reduce(&img, &[l, r]).map_err(|e| e.to_string())?.is_zero() {
                bad.push(ef.ctx.render(rel));
            }
        }
        Ok(bad)
    };
    checks.push(check("comultiplication respects relations", well_defined()));

    Ok(HopfReport { checks })
}

/// Rule-family signature of an ambiguity: kind, the two rule families, and for
/// inclusions whether the inner left side is the whole witness.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct AmbiguitySignature {
    pub kind: AmbiguityKind,
    pub families: (u8, u8),
    pub offset: usize,
    pub equal_lhs: bool,
}

pub fn ambiguity_signatures(sys: &ReductionSystem) -> BTreeMap<AmbiguitySignature, usize> {
    let mut out = BTreeMap::new();
    for a in enumerate_ambiguities(sys) {
        let (ra, rb) = (&sys.rules()[a.rules.0], &sys.rules()[a.rules.1]);
        let sig = AmbiguitySignature {
            kind: a.kind,
            families: (ra.family, rb.family),
            offset: if a.kind == AmbiguityKind::Overlap { 0 } else { a.offset },
            equal_lhs: a.kind == AmbiguityKind::Inclusion && ra.lhs == rb.lhs,
        };
        *out.entry(sig).or_insert(0) += 1;
    }
    out
}

/// Groups signatures the way the appendix lists them: inclusions together
/// with self-overlaps of one family, and overlaps between different families.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FamilyTally {
    pub inclusion_like: usize,
    pub overlap: usize,
}

pub fn appendix_tally(sigs: &BTreeMap<AmbiguitySignature, usize>) -> FamilyTally {
    let (mut inclusion_like, mut overlap) = (0, 0);
    for s in sigs.keys() {
        if s.kind == AmbiguityKind::Inclusion || s.families.0 == s.families.1 {
            inclusion_like += 1;
        } else {
            overlap += 1;
        }
    }
    FamilyTally { inclusion_like, overlap }
}
