//! Independent verification: exhaustive minimization, exchange capacities by
//! definition, and certificate checking.
//!
//! Nothing here reuses solver code paths. The certificate checker consumes
//! only the serialized document and oracle access, and regenerates greedy
//! bases from the prefix-difference definition on its own.

use crate::certificate::CertificateDoc;
use crate::error::SfmError;
use crate::oracle::SetFunctionOracle;
use crate::rational::{negative_part_total, parse_rational, Rational};
use crate::subset::Subset;
use num_traits::{One, Signed, Zero};

pub const BRUTE_FORCE_LIMIT: usize = 24;
pub const EXCHANGE_BRUTE_LIMIT: usize = 16;

#[derive(Debug, Clone)]
pub struct BruteForceOutcome {
    /// Lexicographically smallest minimizer (by bitmask).
    pub minimizer: Subset,
    pub value: Rational,
    /// Every minimizing subset, in increasing bitmask order.
    pub all_minimizers: Vec<Subset>,
}

/// Exact minimum of f over all 2ⁿ subsets. Refused above n = 24.
pub fn brute_force_min(f: &SetFunctionOracle) -> Result<BruteForceOutcome, SfmError> {
    let n = f.size();
    if n > BRUTE_FORCE_LIMIT {
        return Err(SfmError::InvalidArgument(format!(
            "brute force refused for n = {n} > {BRUTE_FORCE_LIMIT}"
        )));
    }
    Ok(brute_force_with_mode(f, cfg!(feature = "parallel")))
}

/// Same enumeration with the execution strategy pinned; the benchmark suite
/// compares both.
pub fn brute_force_with_mode(f: &SetFunctionOracle, parallel: bool) -> BruteForceOutcome {
    let n = f.size();
    assert!(n <= BRUTE_FORCE_LIMIT);
    let total: u64 = 1u64 << n;
    let outcome = if parallel {
        scan_parallel(f, total)
    } else {
        scan_range(f, 0..total)
    };
    let (value, masks) = outcome;
    let all_minimizers: Vec<Subset> = masks
        .into_iter()
        .map(|m| Subset::from_mask(n, m))
        .collect();
    BruteForceOutcome {
        minimizer: all_minimizers[0].clone(),
        value,
        all_minimizers,
    }
}

fn scan_range(f: &SetFunctionOracle, range: std::ops::Range<u64>) -> (Rational, Vec<u64>) {
    let n = f.size();
    let mut best: Option<Rational> = None;
    let mut masks: Vec<u64> = Vec::new();
    for mask in range {
        let v = f.eval_nocache(&Subset::from_mask(n, mask));
        match &best {
            Some(b) if v > *b => {}
            Some(b) if v == *b => masks.push(mask),
            _ => {
                best = Some(v);
                masks = vec![mask];
            }
        }
    }
    (best.expect("range is nonempty"), masks)
}

#[cfg(feature = "parallel")]
fn scan_parallel(f: &SetFunctionOracle, total: u64) -> (Rational, Vec<u64>) {
    use rayon::prelude::*;
    let chunk = 1u64 << 12;
    let starts: Vec<u64> = (0..total).step_by(chunk as usize).collect();
    starts
        .par_iter()
        .map(|&s| scan_range(f, s..(s + chunk).min(total)))
        .reduce_with(|(va, ma), (vb, mb)| {
            if va < vb {
                (va, ma)
            } else if vb < va {
                (vb, mb)
            } else {
                let mut m = ma;
                m.extend(mb);
                (va, m)
            }
        })
        .expect("at least one chunk")
}

#[cfg(not(feature = "parallel"))]
fn scan_parallel(f: &SetFunctionOracle, total: u64) -> (Rational, Vec<u64>) {
    scan_range(f, 0..total)
}

/// Exhaustive membership test y ∈ B(f): y(X) ≤ f(X) for every X and
/// y(V) = f(V).
pub fn in_base_polyhedron(f: &SetFunctionOracle, y: &[Rational]) -> bool {
    let n = f.size();
    assert!(n <= BRUTE_FORCE_LIMIT && y.len() == n);
    let full_sum: Rational = y.iter().sum();
    if full_sum != f.eval(&Subset::full(n)) {
        return false;
    }
    for mask in 0..1u64 << n {
        let s = Subset::from_mask(n, mask);
        let ys: Rational = s.iter().map(|i| y[i].clone()).sum();
        if ys > f.eval_nocache(&s) {
            return false;
        }
    }
    true
}

/// Exchange capacity by its definition: min{f(X) − y(X) : u ∈ X ⊆ V∖{v}},
/// enumerated over all 2^{n−2} qualifying subsets. The base y is checked
/// exhaustively for membership in B(f) first.
pub fn exchange_capacity_bruteforce(
    f: &SetFunctionOracle,
    y: &[Rational],
    u: usize,
    v: usize,
) -> Result<Rational, SfmError> {
    let n = f.size();
    if n > EXCHANGE_BRUTE_LIMIT {
        return Err(SfmError::InvalidArgument(format!(
            "exchange brute force refused for n = {n} > {EXCHANGE_BRUTE_LIMIT}"
        )));
    }
    if u == v || u >= n || v >= n {
        return Err(SfmError::InvalidArgument(format!(
            "invalid vertex pair ({u}, {v})"
        )));
    }
    if !in_base_polyhedron(f, y) {
        return Err(SfmError::InvalidArgument(
            "y is not in the base polyhedron".to_string(),
        ));
    }
    let mut best: Option<Rational> = None;
    for mask in 0..1u64 << n {
        if mask >> u & 1 == 0 || mask >> v & 1 == 1 {
            continue;
        }
        let s = Subset::from_mask(n, mask);
        let ys: Rational = s.iter().map(|i| y[i].clone()).sum();
        let slack = f.eval_nocache(&s) - ys;
        if best.as_ref().map_or(true, |b| slack < *b) {
            best = Some(slack);
        }
    }
    Ok(best.expect("sets containing u and avoiding v exist"))
}

#[derive(Debug, Clone)]
pub struct CertificateReport {
    pub pass: bool,
    /// First violated clause, when any.
    pub failure: Option<String>,
    /// Clauses checked, in order, with individual verdicts.
    pub clauses: Vec<(String, bool)>,
}

impl CertificateReport {
    fn fail(clauses: Vec<(String, bool)>, failure: String) -> CertificateReport {
        CertificateReport {
            pass: false,
            failure: Some(failure),
            clauses,
        }
    }
}

/// Re-checks a serialized certificate against an oracle. Verifies, in order:
/// every base regenerates from its ordering by the greedy rule (n calls
/// each), weights are positive and sum to one, and the recomputed duality gap
/// f(X) − x⁻(V) for x = Σ λ_i y_i matches the document and lies below
/// `gap_bound` (1 for integer-valued functions, ε for ε-scaled ones).
pub fn check_certificate(
    f: &SetFunctionOracle,
    doc: &CertificateDoc,
    gap_bound: &Rational,
) -> CertificateReport {
    let mut clauses: Vec<(String, bool)> = Vec::new();
    let structure = parse_certificate(f, doc);
    let parsed = match structure {
        Ok(p) => {
            clauses.push(("structure".to_string(), true));
            p
        }
        Err(msg) => {
            clauses.push(("structure".to_string(), false));
            return CertificateReport::fail(clauses, msg);
        }
    };
    let n = f.size();

    for (i, (ordering, y)) in parsed.bases.iter().enumerate() {
        let regenerated = greedy_by_definition(f, ordering);
        if regenerated != *y {
            clauses.push(("greedy-regeneration".to_string(), false));
            return CertificateReport::fail(
                clauses,
                format!("base {i} does not regenerate from its ordering"),
            );
        }
    }
    clauses.push(("greedy-regeneration".to_string(), true));

    if let Some(i) = parsed.lambda.iter().position(|l| !l.is_positive()) {
        clauses.push(("lambda-positive".to_string(), false));
        return CertificateReport::fail(clauses, format!("lambda[{i}] is not positive"));
    }
    clauses.push(("lambda-positive".to_string(), true));

    let lambda_sum: Rational = parsed.lambda.iter().sum();
    if !lambda_sum.is_one() {
        clauses.push(("lambda-sum".to_string(), false));
        return CertificateReport::fail(clauses, "weights do not sum to one".to_string());
    }
    clauses.push(("lambda-sum".to_string(), true));

    let mut x = vec![Rational::zero(); n];
    for (l, (_, y)) in parsed.lambda.iter().zip(&parsed.bases) {
        for (xi, yi) in x.iter_mut().zip(y) {
            *xi += l * yi;
        }
    }
    let gap = f.eval(&parsed.x_set) - negative_part_total(&x);
    if gap != parsed.gap {
        clauses.push(("gap-matches".to_string(), false));
        return CertificateReport::fail(
            clauses,
            "recomputed duality gap differs from the document".to_string(),
        );
    }
    clauses.push(("gap-matches".to_string(), true));

    if gap >= *gap_bound {
        clauses.push(("gap-bound".to_string(), false));
        return CertificateReport::fail(
            clauses,
            format!("duality gap {gap} does not certify optimality"),
        );
    }
    clauses.push(("gap-bound".to_string(), true));

    CertificateReport {
        pass: true,
        failure: None,
        clauses,
    }
}

struct ParsedCertificate {
    x_set: Subset,
    lambda: Vec<Rational>,
    bases: Vec<(Vec<usize>, Vec<Rational>)>,
    gap: Rational,
}

fn parse_certificate(
    f: &SetFunctionOracle,
    doc: &CertificateDoc,
) -> Result<ParsedCertificate, String> {
    let ground = f.ground();
    let n = ground.size();
    let mut x_set = Subset::empty(n);
    for label in &doc.x_set {
        let idx = ground
            .index_of(label)
            .ok_or_else(|| format!("unknown label {label:?} in X"))?;
        x_set.insert(idx);
    }
    if doc.lambda.len() != doc.bases.len() {
        return Err("one weight per base required".to_string());
    }
    if doc.bases.is_empty() {
        return Err("certificate carries no bases".to_string());
    }
    let lambda = doc
        .lambda
        .iter()
        .map(|s| parse_rational(s).map_err(|e| e.to_string()))
        .collect::<Result<Vec<_>, _>>()?;
    let mut bases = Vec::with_capacity(doc.bases.len());
    for (i, b) in doc.bases.iter().enumerate() {
        if b.ordering.len() != n || b.y.len() != n {
            return Err(format!("base {i} has wrong dimensions"));
        }
        let mut perm = Vec::with_capacity(n);
        let mut seen = vec![false; n];
        for label in &b.ordering {
            let idx = ground
                .index_of(label)
                .ok_or_else(|| format!("unknown label {label:?} in ordering {i}"))?;
            if seen[idx] {
                return Err(format!("ordering {i} repeats {label:?}"));
            }
            seen[idx] = true;
            perm.push(idx);
        }
        let y = b
            .y
            .iter()
            .map(|s| parse_rational(s).map_err(|e| e.to_string()))
            .collect::<Result<Vec<_>, _>>()?;
        bases.push((perm, y));
    }
    if doc.phi.len() != n || doc.phi.iter().any(|row| row.len() != n) {
        return Err("phi must be an n×n matrix".to_string());
    }
    let gap = parse_rational(&doc.gap).map_err(|e| e.to_string())?;
    Ok(ParsedCertificate {
        x_set,
        lambda,
        bases,
        gap,
    })
}

/// Greedy rule straight from the definition: y(v_i) = f(L(v_i)) − f(L(v_{i−1})).
fn greedy_by_definition(f: &SetFunctionOracle, perm: &[usize]) -> Vec<Rational> {
    let n = perm.len();
    let mut y = vec![Rational::zero(); n];
    let mut prefix = Subset::empty(n);
    let mut prev = Rational::zero();
    for &v in perm {
        prefix.insert(v);
        let cur = f.eval(&prefix);
        y[v] = &cur - &prev;
        prev = cur;
    }
    y
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certificate::CertificateBase;
    use crate::oracle::FunctionFamily;
    use crate::rational::rat_int;

    fn two_element_table() -> SetFunctionOracle {
        FunctionFamily::ExplicitTable {
            labels: vec!["a".to_string(), "b".to_string()],
            values: vec![rat_int(0), rat_int(-1), rat_int(2), rat_int(1)],
        }
        .build_oracle()
        .unwrap()
    }

    #[test]
    fn brute_force_on_two_element_table() {
        let f = two_element_table();
        let out = brute_force_min(&f).unwrap();
        assert_eq!(out.value, rat_int(-1));
        assert_eq!(out.minimizer, Subset::from_indices(2, [0]));
        assert_eq!(out.all_minimizers.len(), 1);
    }

    #[test]
    fn brute_force_on_zero_function_lists_every_subset() {
        let f = FunctionFamily::ExplicitTable {
            labels: vec!["a".into(), "b".into()],
            values: vec![rat_int(0); 4],
        }
        .build_oracle()
        .unwrap();
        let out = brute_force_min(&f).unwrap();
        assert_eq!(out.value, rat_int(0));
        assert_eq!(out.minimizer, Subset::empty(2));
        assert_eq!(out.all_minimizers.len(), 4);
    }

    #[test]
    fn brute_force_on_strictly_decreasing_modular() {
        // f(X) = −|X|
        let f = FunctionFamily::ConcaveCardinality {
            labels: vec!["a".into(), "b".into(), "c".into()],
            g: vec![rat_int(0), rat_int(-1), rat_int(-2), rat_int(-3)],
            w: vec![rat_int(0); 3],
        }
        .build_oracle()
        .unwrap();
        let out = brute_force_min(&f).unwrap();
        assert_eq!(out.value, rat_int(-3));
        assert_eq!(out.minimizer, Subset::full(3));
        assert_eq!(out.all_minimizers, vec![Subset::full(3)]);
    }

    #[test]
    fn brute_force_modes_agree() {
        let f = two_element_table();
        let seq = brute_force_with_mode(&f, false);
        let par = brute_force_with_mode(&f, true);
        assert_eq!(seq.value, par.value);
        assert_eq!(seq.minimizer, par.minimizer);
        assert_eq!(seq.all_minimizers, par.all_minimizers);
    }

    #[test]
    fn brute_force_refuses_large_ground_sets() {
        let ground = crate::oracle::GroundSet::with_default_labels(30).unwrap();
        let f = SetFunctionOracle::from_hook(ground, |_| Rational::zero());
        assert!(brute_force_min(&f).is_err());
    }

    #[test]
    fn exchange_bruteforce_single_edge_cut() {
        let f = FunctionFamily::Cut {
            labels: vec!["a".into(), "b".into()],
            directed: false,
            edges: vec![(0, 1, rat_int(1))],
        }
        .build_oracle()
        .unwrap();
        let y = vec![rat_int(1), rat_int(-1)];
        // min over {X : b ∈ X ⊆ V∖{a}} = f({b}) − y({b}) = 1 − (−1) = 2
        assert_eq!(
            exchange_capacity_bruteforce(&f, &y, 1, 0).unwrap(),
            rat_int(2)
        );
    }

    #[test]
    fn exchange_bruteforce_rejects_non_bases() {
        let f = two_element_table();
        let bad = vec![rat_int(10), rat_int(10)];
        assert!(matches!(
            exchange_capacity_bruteforce(&f, &bad, 0, 1),
            Err(SfmError::InvalidArgument(_))
        ));
    }

    #[test]
    fn membership_test_is_exhaustive() {
        let f = two_element_table();
        assert!(in_base_polyhedron(&f, &[rat_int(-1), rat_int(2)]));
        // right total, violates x({a}) ≤ f({a})
        assert!(!in_base_polyhedron(&f, &[rat_int(0), rat_int(1)]));
        assert!(!in_base_polyhedron(&f, &[rat_int(0), rat_int(0)]));
    }

    fn good_certificate() -> CertificateDoc {
        // x = y from ordering (b,a): y(a) = −1, y(b) = 2; X = {a};
        // gap = f({a}) − x⁻(V) = −1 − (−1) = 0
        CertificateDoc {
            x_set: vec!["a".into()],
            lambda: vec!["1".into()],
            bases: vec![CertificateBase {
                ordering: vec!["b".into(), "a".into()],
                y: vec!["-1".into(), "2".into()],
            }],
            phi: vec![vec!["0".into(), "0".into()], vec!["0".into(), "0".into()]],
            gap: "0".into(),
        }
    }

    #[test]
    fn accepts_a_valid_certificate() {
        let f = two_element_table();
        let report = check_certificate(&f, &good_certificate(), &rat_int(1));
        assert!(report.pass, "{:?}", report.failure);
        assert!(report.clauses.iter().all(|(_, ok)| *ok));
    }

    #[test]
    fn rejects_negated_weight() {
        let f = two_element_table();
        let mut doc = good_certificate();
        doc.lambda[0] = "-1".into();
        let report = check_certificate(&f, &doc, &rat_int(1));
        assert!(!report.pass);
        assert_eq!(report.clauses.last().unwrap().0, "lambda-positive");
    }

    #[test]
    fn rejects_perturbed_base_vector() {
        let f = two_element_table();
        let mut doc = good_certificate();
        doc.bases[0].y[0] = "0".into(); // −1 + 1
        let report = check_certificate(&f, &doc, &rat_int(1));
        assert!(!report.pass);
        assert_eq!(report.clauses.last().unwrap().0, "greedy-regeneration");
    }

    #[test]
    fn rejects_wrong_gap_and_bad_structure() {
        let f = two_element_table();
        let mut doc = good_certificate();
        doc.gap = "1/2".into();
        let report = check_certificate(&f, &doc, &rat_int(1));
        assert!(!report.pass);
        assert_eq!(report.clauses.last().unwrap().0, "gap-matches");

        let mut doc = good_certificate();
        doc.x_set = vec!["zzz".into()];
        assert!(!check_certificate(&f, &doc, &rat_int(1)).pass);
    }
}
