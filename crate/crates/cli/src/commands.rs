use std::fs;
use std::path::Path;

use qaut_core::comodule::{
    check_associativity_tol, check_homogeneity_folded, check_star_structure, fold_algebra, measure_positive,
    separability_idempotent, verify_relations_tol, PairingData,
};
use qaut_core::corpus;
use qaut_core::fusion::{deformation_type_report, filtration_report, FusionExpr, Product};
use qaut_core::multimatrix::MultiMatrix;
use qaut_core::presentation::{Context, RuleMode};
use qaut_core::rewrite::{
    certify_nonzero, check_confluence, irreducible_counts, verify_hopf_axioms, AxiomStatus, NonzeroOutcome,
    ReductionSystem, RewriteError,
};
use serde_json::{json, Value};

use crate::input::{load_multimatrix, load_pairing, InputError};
use crate::{Cli, CliResult, Command, Report};

const MAX_WITNESSES: usize = 5;

fn verified(body: Value) -> CliResult {
    Ok(Report { verified: true, body })
}

fn report(ok: bool, body: Value) -> CliResult {
    Ok(Report { verified: ok, body })
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable report")
}

fn mode(extended: bool) -> RuleMode {
    if extended {
        RuleMode::Extended
    } else {
        RuleMode::Strict
    }
}

/// Rule-generation failures are findings about (E, F), not input errors.
fn rules(ctx: &Context, extended: bool) -> Result<ReductionSystem, Value> {
    ctx.reduction_rules(mode(extended)).map_err(|e| json!({ "status": "Rejected", "reason": e.to_string() }))
}

pub fn run(cli: &Cli) -> CliResult {
    match &cli.command {
        Command::Check { e } => check(&load_multimatrix(e)?),
        Command::Qparam { e } => qparam(&load_multimatrix(e)?, cli),
        Command::Present { e, f, extended } => present(&load_multimatrix(e)?, &load_multimatrix(f)?, *extended),
        Command::Confluence { e, f, extended } => {
            confluence(&load_multimatrix(e)?, &load_multimatrix(f)?, *extended)
        }
        Command::Hilbert { e, f, max_deg, extended } => {
            hilbert(&load_multimatrix(e)?, &load_multimatrix(f)?, *max_deg, *extended)
        }
        Command::Fusion { expr, regime } => fusion(expr, regime.as_deref()),
        Command::VerifyRelations { pairing } => verify(&load_pairing(pairing)?, cli.approx_tol),
        Command::Fold { pairing } => fold(&load_pairing(pairing)?, cli.approx_tol),
        Command::CertifyNonzero { e, f } => certify(&load_multimatrix(e)?, &load_multimatrix(f)?),
        Command::HopfAxioms { e, f, g, m } => hopf(
            &load_multimatrix(e)?,
            &load_multimatrix(f)?,
            &load_multimatrix(g)?,
            &load_multimatrix(m)?,
        ),
        Command::Corpus { out } => write_corpus(out),
    }
}

fn check(e: &MultiMatrix) -> CliResult {
    let m = e.measure_report();
    verified(json!({
        "dims": e.dims(),
        "algebra_dim": e.algebra_dim(),
        "homogeneous": m.homogeneous,
        "normalized": m.normalized,
        "normalizable": m.normalizable,
        "positive": m.positive,
        "lambda_a": m.lambda_a.map(|x| x.to_string()),
        "xi_squared": m.xi_squared.map(|x| x.to_string()),
    }))
}

fn qparam(e: &MultiMatrix, cli: &Cli) -> CliResult {
    match deformation_type_report(e, cli.bound, cli.approx_tol) {
        Ok(rep) => {
            let filtration = filtration_report(rep.regime);
            verified(json!({ "deformation": to_value(&rep), "filtration": to_value(&filtration) }))
        }
        Err(err) => report(false, json!({ "status": "Rejected", "reason": err.to_string() })),
    }
}

fn present(e: &MultiMatrix, f: &MultiMatrix, extended: bool) -> CliResult {
    let ctx = Context::new(e, f);
    let relations = ctx.relations();
    let counts: Vec<usize> = relations.families().iter().map(|r| r.len()).collect();
    let sys = match rules(&ctx, extended) {
        Ok(sys) => sys,
        Err(body) => {
            return report(false, json!({ "generators": ctx.len(), "relations_per_family": counts, "rules": body }))
        }
    };
    let dump: Vec<String> = ctx.dump(&sys).lines().map(str::to_string).collect();
    verified(json!({
        "generators": ctx.len(),
        "relations_per_family": counts,
        "manifest": to_value(&ctx.manifest(&sys)),
        "rules": dump,
    }))
}

fn engine_failure(err: RewriteError) -> CliResult {
    report(false, json!({ "status": "EngineFailure", "reason": err.to_string() }))
}

fn confluence(e: &MultiMatrix, f: &MultiMatrix, extended: bool) -> CliResult {
    let ctx = Context::new(e, f);
    let sys = match rules(&ctx, extended) {
        Ok(sys) => sys,
        Err(body) => return report(false, body),
    };
    let rep = match check_confluence(&sys) {
        Ok(r) => r,
        Err(err) => return engine_failure(err),
    };
    let failures = rep.failures();
    let witnesses: Vec<Value> = failures
        .iter()
        .take(MAX_WITNESSES)
        .map(|fl| {
            json!({
                "kind": to_value(&fl.ambiguity.kind),
                "rules": [fl.ambiguity.rules.0, fl.ambiguity.rules.1],
                "word": sys.render_monomial(&fl.ambiguity.witness),
                "left": ctx.render(&fl.nf_left),
                "right": ctx.render(&fl.nf_right),
            })
        })
        .collect();
    let status = if rep.is_resolved() { "Resolved" } else { "Failed" };
    report(
        rep.is_resolved(),
        json!({
            "status": status,
            "mode": if extended { "extended" } else { "strict" },
            "verified_rules": sys.is_verified(),
            "rule_count": sys.rules().len(),
            "ambiguity_count": rep.ambiguity_count,
            "failed_count": failures.len(),
            "witnesses": witnesses,
        }),
    )
}

fn hilbert(e: &MultiMatrix, f: &MultiMatrix, max_deg: usize, extended: bool) -> CliResult {
    let ctx = Context::new(e, f);
    let sys = match rules(&ctx, extended) {
        Ok(sys) => sys,
        Err(body) => return report(false, body),
    };
    let confluent = match check_confluence(&sys) {
        Ok(r) => r.is_resolved(),
        Err(err) => return engine_failure(err),
    };
    let counts: Vec<String> = irreducible_counts(&sys, max_deg).iter().map(u128::to_string).collect();
    report(confluent, json!({ "confluent": confluent, "max_deg": max_deg, "counts": counts }))
}

fn fusion(expr: &str, regime: Option<&str>) -> CliResult {
    let text = match regime {
        Some(r) if !expr.contains('@') => format!("{expr}@{r}"),
        Some(_) => return Err(InputError::Usage("regime given both inline and via --regime".into())),
        None => expr.to_string(),
    };
    let parsed: FusionExpr = text.parse().map_err(|e: qaut_core::fusion::FusionError| InputError::Usage(e.to_string()))?;
    match parsed.evaluate() {
        Ok(Product::Determined(x)) => verified(json!({
            "status": "determined",
            "regime": parsed.regime.to_string(),
            "expr": text,
            "value": x.to_string(),
            "result": to_value(&x.to_json()),
        })),
        Ok(Product::NotDetermined { reason }) => verified(json!({
            "status": "not_determined",
            "regime": parsed.regime.to_string(),
            "expr": text,
            "reason": reason,
        })),
        Err(err) => Err(InputError::Usage(err.to_string())),
    }
}

fn verify(data: &PairingData, tol: f64) -> CliResult {
    let rel = verify_relations_tol(data, tol).map_err(|e| InputError::Usage(e.to_string()))?;
    let star = data.star.as_ref().map(|_| check_star_structure(data).expect("validated star"));
    let ok = rel.all_pass() && star.as_ref().is_none_or(|s| s.all_pass());
    report(ok, json!({ "relations": to_value(&rel), "star": to_value(&star) }))
}

fn fold(data: &PairingData, tol: f64) -> CliResult {
    let alg = match fold_algebra(data) {
        Ok(a) => a,
        Err(err) => return report(false, json!({ "status": "Rejected", "reason": err.to_string() })),
    };
    let assoc = check_associativity_tol(&alg, tol);
    let homogeneity = match check_homogeneity_folded(&alg) {
        Ok(h) => to_value(&h),
        Err(err) => json!({ "error": err.to_string() }),
    };
    let separability = match separability_idempotent(&alg, data) {
        Ok(s) => to_value(&s),
        Err(err) => json!({ "error": err.to_string() }),
    };
    let positive = data.star.as_ref().map(|_| measure_positive(&alg, data).expect("validated star"));
    report(
        assoc.holds(),
        json!({
            "algebra": to_value(&alg.to_json()),
            "associativity": to_value(&assoc),
            "semisimple": alg.is_semisimple(),
            "center_dim": alg.center_dim(),
            "homogeneity": homogeneity,
            "separability": separability,
            "measure_positive": positive,
        }),
    )
}

fn certify(e: &MultiMatrix, f: &MultiMatrix) -> CliResult {
    match certify_nonzero(e, f) {
        Ok(out @ NonzeroOutcome::Certificate(_)) => verified(to_value(&out)),
        Ok(out) => report(false, to_value(&out)),
        Err(RewriteError::HypothesisViolation(reason)) => {
            report(false, json!({ "status": "hypothesis_violation", "reason": reason }))
        }
        Err(err) => engine_failure(err),
    }
}

fn hopf(e: &MultiMatrix, f: &MultiMatrix, g: &MultiMatrix, m: &MultiMatrix) -> CliResult {
    match verify_hopf_axioms(e, f, g, m) {
        Ok(rep) => {
            let failed = rep.checks.iter().any(|c| matches!(c.status, AxiomStatus::Fail { .. }));
            report(!failed, to_value(&rep))
        }
        Err(err) => engine_failure(err),
    }
}

fn write_corpus(out: &Path) -> CliResult {
    let io = |source| InputError::Io { file: out.to_path_buf(), source };
    fs::create_dir_all(out).map_err(io)?;
    let mut written = Vec::new();
    for fx in corpus::fixtures() {
        let path = out.join(fx.file_name());
        fs::write(&path, fx.to_json()).map_err(|source| InputError::Io { file: path.clone(), source })?;
        written.push(path.display().to_string());
    }
    verified(json!({ "written": written }))
}
