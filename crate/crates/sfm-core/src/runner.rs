//! Instance-to-result pipeline behind the command line: algorithm dispatch,
//! result JSON assembly, and optional verification. Equal inputs produce
//! byte-identical output.

use crate::certificate::CertificateDoc;
use crate::error::SfmError;
use crate::gen::{generate, FamilyKind};
use crate::instance::serialize_instance;
use crate::oracle::FunctionFamily;
use crate::rational::{format_rational, Rational};
use crate::scaling::{sfm_with, SfmResult, SolveStats};
use crate::strong::strong_sfm_with;
use crate::subset::Subset;
use crate::trace::TraceEvent;
use crate::verify::{brute_force_min, check_certificate, BRUTE_FORCE_LIMIT};
use num_traits::One;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    Scaling,
    Strong,
    Brute,
}

impl Algorithm {
    pub fn parse(s: &str) -> Result<Algorithm, SfmError> {
        match s {
            "scaling" => Ok(Algorithm::Scaling),
            "strong" => Ok(Algorithm::Strong),
            "brute" => Ok(Algorithm::Brute),
            other => Err(SfmError::InvalidInput(format!(
                "unknown algorithm {other:?}; expected scaling, strong or brute"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Scaling => "scaling",
            Algorithm::Strong => "strong",
            Algorithm::Brute => "brute",
        }
    }
}

/// How a run can fail: bad input (exit 1) versus a correctness check that
/// did not hold (exit 2).
#[derive(Debug)]
pub enum RunFailure {
    Input(SfmError),
    Check(String),
}

impl std::fmt::Display for RunFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunFailure::Input(e) => write!(f, "{e}"),
            RunFailure::Check(msg) => write!(f, "verification failed: {msg}"),
        }
    }
}

fn classify(e: SfmError) -> RunFailure {
    match e {
        SfmError::InternalInvariant(_) | SfmError::PreconditionViolation(_) => {
            RunFailure::Check(e.to_string())
        }
        other => RunFailure::Input(other),
    }
}

#[derive(Debug, Clone, Serialize)]
struct StatsDoc {
    oracle_calls: u64,
    phases: u64,
    augmentations: u64,
    pushes: u64,
}

#[derive(Debug, Clone, Serialize)]
struct ResultDoc {
    minimizer: Vec<String>,
    value: String,
    gap: Option<String>,
    stats: StatsDoc,
    certificate: Option<CertificateDoc>,
}

#[derive(Debug)]
pub struct SolveOutput {
    /// Result document, pretty-printed JSON with a trailing newline.
    pub json: String,
    pub minimizer: Subset,
    pub value: Rational,
    pub stats: SolveStats,
}

pub fn run_solve(
    family: &FunctionFamily,
    algorithm: Algorithm,
    epsilon: Option<&Rational>,
    verify: bool,
    trace: Option<&mut dyn FnMut(TraceEvent)>,
) -> Result<SolveOutput, RunFailure> {
    if algorithm == Algorithm::Scaling && !family.is_integer_valued() && epsilon.is_none() {
        return Err(RunFailure::Input(SfmError::InvalidInput(
            "rational-valued instance: the scaling algorithm needs --epsilon, a positive \
             lower bound on the gap between distinct function values"
                .to_string(),
        )));
    }
    let oracle = family.build_oracle().map_err(RunFailure::Input)?;

    let result: SfmResult = match algorithm {
        Algorithm::Scaling => sfm_with(&oracle, epsilon, trace).map_err(classify)?,
        Algorithm::Strong => strong_sfm_with(&oracle, None, trace).map_err(classify)?,
        Algorithm::Brute => {
            if oracle.size() > BRUTE_FORCE_LIMIT {
                return Err(RunFailure::Input(SfmError::InvalidInput(format!(
                    "brute force refused for n > {BRUTE_FORCE_LIMIT}"
                ))));
            }
            let calls_before = oracle.calls();
            let out = brute_force_min(&oracle).map_err(classify)?;
            SfmResult {
                minimizer_labels: oracle.ground().subset_labels(&out.minimizer),
                minimizer: out.minimizer,
                value: out.value + oracle.offset(),
                gap: None,
                certificate: None,
                stats: SolveStats {
                    oracle_calls: oracle.calls() - calls_before,
                    ..SolveStats::default()
                },
            }
        }
    };

    let doc = ResultDoc {
        minimizer: result.minimizer_labels.clone(),
        value: format_rational(&result.value),
        gap: result.gap.as_ref().map(format_rational),
        stats: StatsDoc {
            oracle_calls: result.stats.oracle_calls,
            phases: result.stats.loop_stats.phases,
            augmentations: result.stats.loop_stats.augmentations,
            pushes: result.stats.loop_stats.pushes,
        },
        certificate: result.certificate.clone(),
    };
    let mut json = serde_json::to_string_pretty(&doc).expect("results always serialize");
    json.push('\n');

    if verify {
        verify_result(family, epsilon, &result).map_err(RunFailure::Check)?;
    }

    Ok(SolveOutput {
        json,
        minimizer: result.minimizer,
        value: result.value,
        stats: result.stats,
    })
}

/// Re-checks a result on fresh oracles: the certificate (when present) must
/// pass, and for n ≤ 24 the value must match exhaustive enumeration.
fn verify_result(
    family: &FunctionFamily,
    epsilon: Option<&Rational>,
    result: &SfmResult,
) -> Result<(), String> {
    if let Some(cert) = &result.certificate {
        let fresh = family.build_oracle().map_err(|e| e.to_string())?;
        let bound = epsilon.cloned().unwrap_or_else(Rational::one);
        let report = check_certificate(&fresh, cert, &bound);
        if !report.pass {
            return Err(report
                .failure
                .unwrap_or_else(|| "certificate rejected".to_string()));
        }
    }
    if family.size() <= BRUTE_FORCE_LIMIT {
        let fresh = family.build_oracle().map_err(|e| e.to_string())?;
        let brute = brute_force_min(&fresh).map_err(|e| e.to_string())?;
        let brute_value = brute.value + fresh.offset();
        if brute_value != result.value {
            return Err(format!(
                "reported value {} but exhaustive enumeration found {}",
                format_rational(&result.value),
                format_rational(&brute_value)
            ));
        }
        let at_minimizer = fresh
            .evaluate(&result.minimizer)
            .map_err(|e| e.to_string())?
            + fresh.offset();
        if at_minimizer != result.value {
            return Err("reported set does not attain the reported value".to_string());
        }
    }
    Ok(())
}

pub fn run_gen(kind: FamilyKind, n: usize, seed: u64) -> Result<String, SfmError> {
    Ok(serialize_instance(&generate(kind, n, seed)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::parse_instance;
    use crate::rational::rat_int;

    fn fixture() -> FunctionFamily {
        parse_instance(r#"{"type":"table","labels":["a","b"],"values":[0,-1,2,1]}"#).unwrap()
    }

    #[test]
    fn scaling_solve_produces_expected_document() {
        let out = run_solve(&fixture(), Algorithm::Scaling, None, true, None).unwrap();
        assert_eq!(out.value, rat_int(-1));
        let doc: serde_json::Value = serde_json::from_str(&out.json).unwrap();
        assert_eq!(doc["minimizer"], serde_json::json!(["a"]));
        assert_eq!(doc["value"], serde_json::json!("-1"));
        assert!(doc["certificate"].is_object());
        assert!(doc["stats"]["oracle_calls"].as_u64().unwrap() > 0);
    }

    #[test]
    fn strong_solve_agrees_and_omits_certificate() {
        let out = run_solve(&fixture(), Algorithm::Strong, None, true, None).unwrap();
        assert_eq!(out.value, rat_int(-1));
        let doc: serde_json::Value = serde_json::from_str(&out.json).unwrap();
        assert!(doc["certificate"].is_null());
        assert!(doc["gap"].is_null());
    }

    #[test]
    fn brute_solve_reports_plain_result() {
        let out = run_solve(&fixture(), Algorithm::Brute, None, true, None).unwrap();
        assert_eq!(out.value, rat_int(-1));
        let doc: serde_json::Value = serde_json::from_str(&out.json).unwrap();
        assert_eq!(doc["stats"]["phases"], serde_json::json!(0));
    }

    #[test]
    fn identical_requests_produce_identical_bytes() {
        let a = run_solve(&fixture(), Algorithm::Scaling, None, false, None).unwrap();
        let b = run_solve(&fixture(), Algorithm::Scaling, None, false, None).unwrap();
        assert_eq!(a.json, b.json);
    }

    #[test]
    fn rational_instance_without_epsilon_is_an_input_error() {
        let fam =
            parse_instance("cut 2 1 undirected\n0 1 1/2\n").unwrap();
        let err = run_solve(&fam, Algorithm::Scaling, None, false, None).unwrap_err();
        assert!(matches!(err, RunFailure::Input(_)));
        // strong handles rationals natively
        assert!(run_solve(&fam, Algorithm::Strong, None, true, None).is_ok());
    }

    #[test]
    fn gen_is_deterministic_at_the_byte_level() {
        let a = run_gen(FamilyKind::Cut, 6, 42).unwrap();
        let b = run_gen(FamilyKind::Cut, 6, 42).unwrap();
        assert_eq!(a, b);
        assert!(a.starts_with("cut 6 "));
    }
}
