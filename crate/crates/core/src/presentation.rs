//! Generators, defining relations, the (DL) reduction rules and the cogroupoid
//! structure maps of `𝒜(E,F)`.
//!
//! A generator `X^{ij,λ}_{kl,μ}` carries its upper index on the E side and its
//! lower index on the F side. All indices are zero-based internally and printed
//! one-based as `X[i,j,λ|k,l,μ]`.

use std::cmp::{Ordering, Reverse};
use std::collections::HashMap;
use std::sync::Arc;

use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::multimatrix::{BasisIndex, MultiMatrix, MultiMatrixError};
use crate::rewrite::{Monomial, NCPoly, ReductionSystem, RewriteError, Rule, TensorPoly};
use crate::scalar::ExactScalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PresentationError {
    #[error("hypothesis violated: {0} (extended mode builds the rules anyway)")]
    HypothesisViolation(String),
    #[error("generator or multimatrix does not belong to this context")]
    ContextMismatch,
    #[error("conjugating multimatrices have the wrong block shapes")]
    ShapeMismatch,
    #[error(transparent)]
    MultiMatrix(#[from] MultiMatrixError),
    #[error(transparent)]
    Rewrite(#[from] RewriteError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct GenIndex {
    pub upper: BasisIndex,
    pub lower: BasisIndex,
}

impl GenIndex {
    pub fn new(upper: BasisIndex, lower: BasisIndex) -> Self {
        GenIndex { upper, lower }
    }

    fn order_key(&self) -> impl Ord {
        let (u, l) = (self.upper, self.lower);
        ((u.block, l.block), (u.row, l.row), Reverse((u.col, l.col)))
    }
}

/// One-based `X[i,j,λ|k,l,μ]`.
impl std::fmt::Display for GenIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let (u, l) = (self.upper, self.lower);
        write!(f, "X[{},{},{}|{},{},{}]", u.row + 1, u.col + 1, u.block + 1, l.row + 1, l.col + 1, l.block + 1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RuleMode {
    /// E diagonal, F lower-triangular, both largest blocks of size > 1.
    Strict,
    /// Builds the rules regardless and marks the system unverified.
    Extended,
}

#[derive(Clone, Debug, Default)]
pub struct RelationSet {
    pub family1: Vec<NCPoly>,
    pub family2: Vec<NCPoly>,
    pub family3: Vec<NCPoly>,
    pub family4: Vec<NCPoly>,
}

impl RelationSet {
    pub fn families(&self) -> [&[NCPoly]; 4] {
        [&self.family1, &self.family2, &self.family3, &self.family4]
    }

    pub fn iter(&self) -> impl Iterator<Item = &NCPoly> {
        self.family1.iter().chain(&self.family2).chain(&self.family3).chain(&self.family4)
    }
}

/// The fixed pair `(E,F)` with its generators interned in appendix order.
#[derive(Clone, Debug)]
pub struct Context {
    e: MultiMatrix,
    f: MultiMatrix,
    gens: Vec<GenIndex>,
    ids: HashMap<GenIndex, u32>,
    names: Arc<Vec<String>>,
}

fn units(m: &MultiMatrix) -> Vec<BasisIndex> {
    m.basis()
}

fn bi(block: usize, row: usize, col: usize) -> BasisIndex {
    BasisIndex { block, row, col }
}

fn s(n: i64) -> ExactScalar {
    ExactScalar::from_int(n)
}

impl Context {
    pub fn new(e: &MultiMatrix, f: &MultiMatrix) -> Self {
        let mut gens: Vec<GenIndex> =
            units(e).into_iter().flat_map(|u| units(f).into_iter().map(move |l| GenIndex::new(u, l))).collect();
        gens.sort_by_key(GenIndex::order_key);
        let ids = gens.iter().enumerate().map(|(k, g)| (*g, k as u32)).collect();
        let names = Arc::new(gens.iter().map(ToString::to_string).collect());
        Context { e: e.clone(), f: f.clone(), gens, ids, names }
    }

    pub fn e(&self) -> &MultiMatrix {
        &self.e
    }

    pub fn f(&self) -> &MultiMatrix {
        &self.f
    }

    /// Generators in increasing order; position = letter id.
    pub fn generators(&self) -> &[GenIndex] {
        &self.gens
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn names(&self) -> &Arc<Vec<String>> {
        &self.names
    }

    pub fn id(&self, g: &GenIndex) -> Result<u32, PresentationError> {
        self.ids.get(g).copied().ok_or(PresentationError::ContextMismatch)
    }

    pub fn gen(&self, id: u32) -> GenIndex {
        self.gens[id as usize]
    }

    fn x(&self, upper: BasisIndex, lower: BasisIndex) -> u32 {
        self.ids[&GenIndex::new(upper, lower)]
    }

    pub fn render(&self, p: &NCPoly) -> String {
        p.render(&|g| self.names[g as usize].clone())
    }

    pub fn compare_generators(&self, a: &GenIndex, b: &GenIndex) -> Result<Ordering, PresentationError> {
        self.id(a)?;
        self.id(b)?;
        Ok(a.order_key().cmp(&b.order_key()))
    }

    fn word(&self, xs: &[(BasisIndex, BasisIndex)]) -> Monomial {
        Monomial(xs.iter().map(|&(u, l)| self.x(u, l)).collect())
    }

    /// The four displayed relation families, each relation as an element equal to zero.
    pub fn relations(&self) -> RelationSet {
        let (e, f) = (&self.e, &self.f);
        let mut rel = RelationSet::default();
        // Σ_q X^{rq,ν}_{ij,λ} X^{qs,ν}_{kl,μ} − δ_{λμ}δ_{jk} X^{rs,ν}_{il,μ}
        for rs in units(e) {
            for ij in units(f) {
                for kl in units(f) {
                    let mut p = NCPoly::zero();
                    for q in 0..e.dim(rs.block) {
                        let w = self.word(&[(bi(rs.block, rs.row, q), ij), (bi(rs.block, q, rs.col), kl)]);
                        p.add_term(w, &s(1));
                    }
                    if ij.block == kl.block && ij.col == kl.row {
                        p.add_term(self.word(&[(rs, bi(ij.block, ij.row, kl.col))]), &s(-1));
                    }
                    rel.family1.push(p);
                }
            }
        }
        // Σ_μ Σ_k X^{ij,λ}_{kk,μ} − δ_{ij}
        for ij in units(e) {
            let mut p = NCPoly::zero();
            for mu in 0..f.n_blocks() {
                for k in 0..f.dim(mu) {
                    p.add_term(self.word(&[(ij, bi(mu, k, k))]), &s(1));
                }
            }
            if ij.row == ij.col {
                p.add_term(Monomial::one(), &s(-1));
            }
            rel.family2.push(p);
        }
        // Σ E⁻¹_{kl,μ} X^{kl,μ}_{ij,λ} − F⁻¹_{ij,λ}
        for ij in units(f) {
            let mut p = NCPoly::zero();
            for kl in units(e) {
                p.add_term(self.word(&[(kl, ij)]), e.inv_entry(kl.block, kl.row, kl.col));
            }
            p.add_term(Monomial::one(), &-f.inv_entry(ij.block, ij.row, ij.col).clone());
            rel.family3.push(p);
        }
        // Σ_{r,s} F_{rs,μ} X^{ip,λ}_{kr,μ} X^{qj,ν}_{sl,μ} − δ_{λν} E_{pq,λ} X^{ij,λ}_{kl,μ}
        for ip in units(e) {
            for qj in units(e) {
                for kl in units(f) {
                    let mu = kl.block;
                    let mut p = NCPoly::zero();
                    for r in 0..f.dim(mu) {
                        for s_ in 0..f.dim(mu) {
                            let c = f.entry(mu, r, s_);
                            if c.is_zero() {
                                continue;
                            }
                            let w = self.word(&[(ip, bi(mu, kl.row, r)), (qj, bi(mu, s_, kl.col))]);
                            p.add_term(w, c);
                        }
                    }
                    if ip.block == qj.block {
                        let c = e.entry(ip.block, ip.col, qj.row);
                        p.add_term(self.word(&[(bi(ip.block, ip.row, qj.col), kl)]), &-c.clone());
                    }
                    rel.family4.push(p);
                }
            }
        }
        rel
    }

    fn check_hypotheses(&self) -> Result<(), PresentationError> {
        if !self.e.is_diagonal() {
            return Err(PresentationError::HypothesisViolation("E is not diagonal".into()));
        }
        if !self.f.is_lower_triangular() {
            return Err(PresentationError::HypothesisViolation("F is not lower-triangular".into()));
        }
        if self.e.last_dim() < 2 || self.f.last_dim() < 2 {
            return Err(PresentationError::HypothesisViolation("d_E = 1 or d_F = 1".into()));
        }
        Ok(())
    }

    /// Rules (1)–(4) of the appendix presentation, in that family order.
    pub fn reduction_rules(&self, mode: RuleMode) -> Result<ReductionSystem, PresentationError> {
        if mode == RuleMode::Strict {
            self.check_hypotheses()?;
        }
        let (e, f) = (&self.e, &self.f);
        let (ne, nf) = (e.n_blocks() - 1, f.n_blocks() - 1);
        let (de, df) = (e.last_dim() - 1, f.last_dim() - 1);
        let mut rules = Vec::new();

        // (1) X^{r1,ν}_{ij,λ} X^{1s,ν}_{kl,μ} → δ_{λμ}δ_{jk} X^{rs,ν}_{il,μ} − Σ_{t>1} X^{rt,ν}_{ij,λ} X^{ts,ν}_{kl,μ}
        for rs in units(e) {
            let nu = rs.block;
            for ij in units(f) {
                for kl in units(f) {
                    let lhs = self.word(&[(bi(nu, rs.row, 0), ij), (bi(nu, 0, rs.col), kl)]);
                    let mut rhs = NCPoly::zero();
                    if ij.block == kl.block && ij.col == kl.row {
                        rhs.add_term(self.word(&[(rs, bi(ij.block, ij.row, kl.col))]), &s(1));
                    }
                    for t in 1..e.dim(nu) {
                        rhs.add_term(self.word(&[(bi(nu, rs.row, t), ij), (bi(nu, t, rs.col), kl)]), &s(-1));
                    }
                    rules.push(Rule { lhs, rhs, family: 1 });
                }
            }
        }
        // (2) X^{ij,λ}_{dd,n_F} → δ_{ij} − Σ_{(k,μ)≠(d,n_F)} X^{ij,λ}_{kk,μ}
        for ij in units(e) {
            let lhs = self.word(&[(ij, bi(nf, df, df))]);
            let mut rhs = NCPoly::zero();
            if ij.row == ij.col {
                rhs.add_term(Monomial::one(), &s(1));
            }
            for mu in 0..f.n_blocks() {
                for k in 0..f.dim(mu) {
                    if (mu, k) != (nf, df) {
                        rhs.add_term(self.word(&[(ij, bi(mu, k, k))]), &s(-1));
                    }
                }
            }
            rules.push(Rule { lhs, rhs, family: 2 });
        }
        // (3) X^{dd,n_E}_{ij,λ} → (F⁻¹_{ij,λ} − Σ_{other} E⁻¹_{kl,μ} X^{kl,μ}_{ij,λ}) / E⁻¹_{dd,n_E}
        let pivot = e.inv_entry(ne, de, de).inv().ok_or_else(|| {
            PresentationError::HypothesisViolation("E⁻¹ has a zero last diagonal entry".into())
        })?;
        for ij in units(f) {
            let lhs = self.word(&[(bi(ne, de, de), ij)]);
            let mut rhs = NCPoly::constant(f.inv_entry(ij.block, ij.row, ij.col).clone());
            for kl in units(e) {
                if kl != bi(ne, de, de) {
                    rhs.add_term(self.word(&[(kl, ij)]), &-e.inv_entry(kl.block, kl.row, kl.col).clone());
                }
            }
            rules.push(Rule { lhs, rhs: rhs.scale(&pivot), family: 3 });
        }
        // (4) X^{kp,μ}_{i1,λ} X^{ql,ν}_{1j,λ}
        //     → F⁻¹_{11,λ}(δ_{μν}E_{pq,μ} X^{kl,μ}_{ij,λ} − Σ_{(n,m)≠(1,1)} F_{nm,λ} X^{kp,μ}_{in,λ} X^{ql,ν}_{mj,λ})
        for lam in 0..f.n_blocks() {
            let d = f.dim(lam);
            let f00 = f.entry(lam, 0, 0).inv().ok_or_else(|| {
                PresentationError::HypothesisViolation("F has a zero leading diagonal entry".into())
            })?;
            for kp in units(e) {
                for ql in units(e) {
                    for i in 0..d {
                        for j in 0..d {
                            let lhs = self.word(&[(kp, bi(lam, i, 0)), (ql, bi(lam, 0, j))]);
                            let mut rhs = NCPoly::zero();
                            if kp.block == ql.block {
                                let c = e.entry(kp.block, kp.col, ql.row);
                                rhs.add_term(self.word(&[(bi(kp.block, kp.row, ql.col), bi(lam, i, j))]), c);
                            }
                            for n in 0..d {
                                for m in 0..d {
                                    let c = f.entry(lam, n, m);
                                    if (n, m) == (0, 0) || c.is_zero() {
                                        continue;
                                    }
                                    let w = self.word(&[(kp, bi(lam, i, n)), (ql, bi(lam, m, j))]);
                                    rhs.add_term(w, &-c.clone());
                                }
                            }
                            rules.push(Rule { lhs, rhs: rhs.scale(&f00), family: 4 });
                        }
                    }
                }
            }
        }
        let mut sys = ReductionSystem::with_names(rules, self.names.clone())?;
        if mode == RuleMode::Extended {
            sys.mark_unverified();
        }
        Ok(sys)
    }

    /// Line-oriented dump: generators in order, then one rule per line.
    pub fn dump(&self, sys: &ReductionSystem) -> String {
        let mut out = String::new();
        out.push_str(&format!("# generators {}\n", self.len()));
        for g in &self.gens {
            out.push_str(&format!("{g}\n"));
        }
        out.push_str(&format!("# rules {}\n", sys.rules().len()));
        for r in sys.rules() {
            out.push_str(&format!("({}) {} -> {}\n", r.family, sys.render_monomial(&r.lhs), sys.render(&r.rhs)));
        }
        out
    }

    pub fn manifest(&self, sys: &ReductionSystem) -> Manifest {
        let mut per_family = [0usize; 4];
        for r in sys.rules() {
            if (1..=4).contains(&r.family) {
                per_family[r.family as usize - 1] += 1;
            }
        }
        Manifest {
            generator_count: self.len(),
            rule_count: sys.rules().len(),
            rules_per_family: per_family,
            verified: sys.is_verified(),
            order: self.names.to_vec(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Manifest {
    pub generator_count: usize,
    pub rule_count: usize,
    pub rules_per_family: [usize; 4],
    pub verified: bool,
    /// Generator names, smallest first.
    pub order: Vec<String>,
}

/// `Δ^G_{E,F}(X^{ij,λ}_{kl,μ}) = Σ_{ν,r,s} X^{ij,λ}_{rs,ν} ⊗ X^{rs,ν}_{kl,μ}`, with
/// `left = 𝒜(E,G)` and `right = 𝒜(G,F)`.
pub fn comultiplication(left: &Context, right: &Context, x: &GenIndex) -> Result<TensorPoly, PresentationError> {
    if left.f != right.e {
        return Err(PresentationError::ContextMismatch);
    }
    let mut out = TensorPoly::zero(2);
    for rs in units(&left.f) {
        let a = left.id(&GenIndex::new(x.upper, rs))?;
        let b = right.id(&GenIndex::new(rs, x.lower))?;
        out.add_term(vec![Monomial::letter(a), Monomial::letter(b)], &s(1));
    }
    Ok(out)
}

/// `ε(X^{ij,λ}_{kl,μ}) = δ_{ik}δ_{jl}δ_{λμ}` on `𝒜(E,E)`.
pub fn counit(ctx: &Context, x: &GenIndex) -> Result<ExactScalar, PresentationError> {
    if ctx.e != ctx.f {
        return Err(PresentationError::ContextMismatch);
    }
    ctx.id(x)?;
    Ok(if x.upper == x.lower { ExactScalar::one() } else { ExactScalar::zero() })
}

/// Counit extended multiplicatively to words.
pub fn counit_word(ctx: &Context, m: &Monomial) -> Result<ExactScalar, PresentationError> {
    m.letters().iter().try_fold(ExactScalar::one(), |acc, &g| Ok(acc * counit(ctx, &ctx.gen(g))?))
}

/// `S_{E,F}(X^{ij,λ}_{kl,μ}) = Σ_{r,s} E_{jr,λ} F⁻¹_{sl,μ} X^{sk,μ}_{ri,λ}`, valued in
/// `target = 𝒜(F,E)`.
pub fn antipode(source: &Context, target: &Context, x: &GenIndex) -> Result<NCPoly, PresentationError> {
    if source.e != target.f || source.f != target.e {
        return Err(PresentationError::ContextMismatch);
    }
    source.id(x)?;
    let (u, l) = (x.upper, x.lower);
    let (lam, mu) = (u.block, l.block);
    let mut out = NCPoly::zero();
    for r in 0..source.e.dim(lam) {
        let a = source.e.entry(lam, u.col, r);
        if a.is_zero() {
            continue;
        }
        for s_ in 0..source.f.dim(mu) {
            let b = source.f.inv_entry(mu, s_, l.col);
            if b.is_zero() {
                continue;
            }
            out.add_term(Monomial::letter(target.x(bi(mu, s_, l.row), bi(lam, r, u.row))), &(a * b));
        }
    }
    Ok(out)
}

/// Antipode extended anti-multiplicatively to a polynomial.
pub fn antipode_poly(source: &Context, target: &Context, p: &NCPoly) -> Result<NCPoly, PresentationError> {
    let images: Vec<NCPoly> =
        (0..source.len() as u32).map(|g| antipode(source, target, &source.gen(g))).collect::<Result<_, _>>()?;
    let mut out = NCPoly::zero();
    for (m, c) in p.terms() {
        let img = m.letters().iter().rev().fold(NCPoly::one(), |acc, &g| acc.mul(&images[g as usize]));
        out.add_scaled(&img, c);
    }
    Ok(out)
}

/// Image of every generator of `source = 𝒜(E,F)` in `target = 𝒜(PEP⁻¹, QFQ⁻¹)`:
/// `X^{kl,μ}_{ij,λ} ↦ Σ P_{uk,μ} P⁻¹_{lv,μ} Q⁻¹_{ir,λ} Q_{sj,λ} Y^{uv,μ}_{rs,λ}`.
pub fn conjugation_morphism(
    source: &Context,
    p: &MultiMatrix,
    q: &MultiMatrix,
) -> Result<(Context, Vec<NCPoly>), PresentationError> {
    if p.dims() != source.e.dims() || q.dims() != source.f.dims() {
        return Err(PresentationError::ShapeMismatch);
    }
    let target = Context::new(&source.e.conjugate(p)?, &source.f.conjugate(q)?);
    let images = conjugation_images(source, &target, p, q);
    Ok((target, images))
}

fn conjugation_images(source: &Context, target: &Context, p: &MultiMatrix, q: &MultiMatrix) -> Vec<NCPoly> {
    source
        .gens
        .iter()
        .map(|g| {
            let (up, lo) = (g.upper, g.lower);
            let (mu, lam) = (up.block, lo.block);
            let mut out = NCPoly::zero();
            for u in 0..p.dim(mu) {
                for v in 0..p.dim(mu) {
                    let a = p.entry(mu, u, up.row) * p.inv_entry(mu, up.col, v);
                    if a.is_zero() {
                        continue;
                    }
                    for r in 0..q.dim(lam) {
                        for s_ in 0..q.dim(lam) {
                            let b = q.inv_entry(lam, lo.row, r) * q.entry(lam, s_, lo.col);
                            if b.is_zero() {
                                continue;
                            }
                            out.add_term(Monomial::letter(target.x(bi(mu, u, v), bi(lam, r, s_))), &(&a * &b));
                        }
                    }
                }
            }
            out
        })
        .collect()
}

/// Applies a generator substitution to a polynomial.
pub fn substitute(p: &NCPoly, images: &[NCPoly]) -> NCPoly {
    let mut out = NCPoly::zero();
    for (m, c) in p.terms() {
        let img = m.letters().iter().fold(NCPoly::one(), |acc, &g| acc.mul(&images[g as usize]));
        out.add_scaled(&img, c);
    }
    out
}
