//! The acceptance suite behind the `selftest` subcommand and the
//! `acceptance` integration test. Each criterion exercises the solvers
//! against independent oracles (exhaustive enumeration, definitional
//! recomputation, recorded traces) and reports one pass/fail line.

use crate::base::LinearOrdering;
use crate::batch::map_batch;
use crate::certificate::CertificateDoc;
use crate::error::SfmError;
use crate::gen::{generate, generate_with_epsilon, FamilyKind, GENERATOR_FAMILIES};
use crate::oracle::{FunctionFamily, SetFunctionOracle};
use crate::rational::{parse_rational, rat_int, Rational};
use crate::runner::{run_gen, run_solve, Algorithm};
use crate::scaling::{ceil_log2_rational, sfm, sfm_with, SfmResult};
use crate::strong::{consistent_extreme_base, eta, fix, strong_sfm_with, PrecedenceDag, StrongObserver};
use crate::trace::TraceEvent;
use crate::verify::{brute_force_with_mode, check_certificate, exchange_capacity_bruteforce};
use crate::base::{exchange_capacity_consecutive, greedy_extreme_base};
use num_traits::{Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct CriterionOutcome {
    pub index: usize,
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug)]
pub struct SelftestReport {
    pub criteria: Vec<CriterionOutcome>,
}

impl SelftestReport {
    pub fn all_pass(&self) -> bool {
        self.criteria.iter().all(|c| c.pass)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.criteria {
            let dots = ".".repeat(46usize.saturating_sub(c.name.len()));
            out.push_str(&format!(
                "[{:2}] {} {} {}  {}\n",
                c.index,
                c.name,
                dots,
                if c.pass { "PASS" } else { "FAIL" },
                c.detail
            ));
        }
        let passed = self.criteria.iter().filter(|c| c.pass).count();
        out.push_str(&format!(
            "overall: {} ({passed}/{} criteria)\n",
            if self.all_pass() { "PASS" } else { "FAIL" },
            self.criteria.len()
        ));
        out
    }
}

#[derive(Debug, Clone, Copy)]
struct InstanceSpec {
    kind: FamilyKind,
    n: usize,
    seed: u64,
}

const INSTANCES_PER_FAMILY: usize = 100;

fn corpus() -> Vec<InstanceSpec> {
    let mut specs = Vec::new();
    for (fi, kind) in GENERATOR_FAMILIES.iter().enumerate() {
        for i in 0..INSTANCES_PER_FAMILY {
            specs.push(InstanceSpec {
                kind: *kind,
                n: (i % 10) + 1,
                seed: (fi as u64 + 1) * 100_000 + i as u64,
            });
        }
    }
    specs
}

struct MainRun {
    spec: InstanceSpec,
    brute_value: Rational,
    sfm: SfmResult,
    strong: SfmResult,
}

fn run_instance(spec: InstanceSpec) -> Result<MainRun, String> {
    let tag = format!("{}/n{}/seed{}", spec.kind.name(), spec.n, spec.seed);
    let fam = generate(spec.kind, spec.n, spec.seed).map_err(|e| format!("{tag}: {e}"))?;
    let brute_oracle = fam.build_oracle().map_err(|e| format!("{tag}: {e}"))?;
    let brute = brute_force_with_mode(&brute_oracle, false);
    let sfm_oracle = fam.build_oracle().map_err(|e| format!("{tag}: {e}"))?;
    let sfm_result = sfm(&sfm_oracle).map_err(|e| format!("{tag}: scaling: {e}"))?;
    let strong_oracle = fam.build_oracle().map_err(|e| format!("{tag}: {e}"))?;
    let strong_result =
        strong_sfm_with(&strong_oracle, None, None).map_err(|e| format!("{tag}: strong: {e}"))?;
    Ok(MainRun {
        spec,
        brute_value: brute.value,
        sfm: sfm_result,
        strong: strong_result,
    })
}

pub fn run_selftest(parallel: bool) -> SelftestReport {
    let mut criteria = Vec::new();

    let main_runs: Vec<Result<MainRun, String>> =
        map_batch(corpus(), parallel, run_instance);
    let failures: Vec<&String> = main_runs.iter().filter_map(|r| r.as_ref().err()).collect();
    let runs: Vec<&MainRun> = main_runs.iter().filter_map(|r| r.as_ref().ok()).collect();

    criteria.push(exact_optimality(&runs, &failures));
    criteria.push(certificate_soundness(&runs, parallel));
    criteria.push(lemma1_equivalence(parallel));
    criteria.push(z_invariance(&runs, parallel));
    criteria.push(complexity_envelopes(&runs));
    criteria.push(tight_w(&runs));
    let (c7, c8) = fix_and_compatibility(parallel);
    criteria.push(c7);
    criteria.push(c8);
    criteria.push(epsilon_mode(parallel));
    criteria.push(determinism());

    SelftestReport { criteria }
}

/// Criterion 1: on every seeded instance both solvers return exactly the
/// exhaustive minimum.
fn exact_optimality(runs: &[&MainRun], failures: &[&String]) -> CriterionOutcome {
    let total = corpus().len();
    let mut bad = Vec::new();
    for r in runs {
        let normalized_sfm = &r.sfm.value;
        let normalized_strong = &r.strong.value;
        if *normalized_sfm != r.brute_value || *normalized_strong != r.brute_value {
            bad.push(format!(
                "{}/n{}/seed{}: scaling={} strong={} exhaustive={}",
                r.spec.kind.name(),
                r.spec.n,
                r.spec.seed,
                normalized_sfm,
                normalized_strong,
                r.brute_value
            ));
        }
    }
    let pass = bad.is_empty() && failures.is_empty();
    let detail = if pass {
        format!("{}/{} instances: scaling = strong = exhaustive", runs.len(), total)
    } else if let Some(f) = failures.first() {
        format!("solver failure: {f}")
    } else {
        format!("{} disagreements, first: {}", bad.len(), bad[0])
    };
    CriterionOutcome {
        index: 1,
        name: "exact-optimality",
        pass,
        detail,
    }
}

/// Criterion 2: every emitted certificate re-verifies, with gap below one,
/// and each of five mutated certificates is rejected.
fn certificate_soundness(runs: &[&MainRun], parallel: bool) -> CriterionOutcome {
    let one = rat_int(1);
    let checks: Vec<Option<String>> = map_batch(
        runs.iter().map(|r| r.spec).collect::<Vec<_>>(),
        parallel,
        |spec| {
            let fam = generate(spec.kind, spec.n, spec.seed).ok()?;
            let oracle = fam.build_oracle().ok()?;
            let result = sfm(&oracle).ok()?;
            let cert = result.certificate?;
            let fresh = fam.build_oracle().ok()?;
            let report = check_certificate(&fresh, &cert, &rat_int(1));
            if report.pass {
                None
            } else {
                Some(format!(
                    "{}/n{}/seed{}: {}",
                    spec.kind.name(),
                    spec.n,
                    spec.seed,
                    report.failure.unwrap_or_default()
                ))
            }
        },
    );
    let cert_failures: Vec<String> = checks.into_iter().flatten().collect();
    let gap_ok = runs
        .iter()
        .all(|r| r.sfm.gap.as_ref().map_or(false, |g| *g < one));

    let (mutations_rejected, mutation_total) = mutation_battery();

    let pass = cert_failures.is_empty() && gap_ok && mutations_rejected == mutation_total;
    let detail = if pass {
        format!(
            "{} certificates verified, every gap < 1; {mutations_rejected}/{mutation_total} mutations rejected",
            runs.len()
        )
    } else if let Some(f) = cert_failures.first() {
        f.clone()
    } else if !gap_ok {
        "a certificate gap reached 1".to_string()
    } else {
        format!("only {mutations_rejected}/{mutation_total} mutations rejected")
    };
    CriterionOutcome {
        index: 2,
        name: "certificate-soundness",
        pass,
        detail,
    }
}

fn mutation_battery() -> (usize, usize) {
    let fam = FunctionFamily::ExplicitTable {
        labels: vec!["a".to_string(), "b".to_string()],
        values: vec![rat_int(0), rat_int(-1), rat_int(2), rat_int(1)],
    };
    let oracle = fam.build_oracle().expect("fixture builds");
    let cert = sfm(&oracle)
        .expect("fixture solves")
        .certificate
        .expect("scaling always certifies");
    let mutations: Vec<Box<dyn Fn(&mut CertificateDoc)>> = vec![
        Box::new(|c| c.lambda[0] = format!("-{}", c.lambda[0].trim_start_matches('-'))),
        Box::new(|c| {
            let y0 = parse_rational(&c.bases[0].y[0]).unwrap();
            c.bases[0].y[0] = crate::rational::format_rational(&(y0 + rat_int(1)));
        }),
        Box::new(|c| {
            let g = parse_rational(&c.gap).unwrap();
            c.gap = crate::rational::format_rational(&(g + rat_int(1)));
        }),
        Box::new(|c| {
            let l = parse_rational(&c.lambda[0]).unwrap();
            c.lambda[0] = crate::rational::format_rational(&(l * rat_int(2)));
        }),
        Box::new(|c| {
            // drop a base so the weights cannot sum to one
            if c.bases.len() > 1 {
                c.bases.pop();
                c.lambda.pop();
            } else {
                c.lambda[0] = "1/2".to_string();
            }
        }),
    ];
    let total = mutations.len();
    let mut rejected = 0;
    for mutate in mutations {
        let mut bad = cert.clone();
        mutate(&mut bad);
        let fresh = fam.build_oracle().expect("fixture builds");
        if !check_certificate(&fresh, &bad, &rat_int(1)).pass {
            rejected += 1;
        }
    }
    (rejected, total)
}

/// Criterion 3: the one-call exchange capacity for consecutive pairs equals
/// the definitional minimum on ≥ 1000 random (instance, ordering, position)
/// triples.
fn lemma1_equivalence(parallel: bool) -> CriterionOutcome {
    const TRIPLES: usize = 1000;
    let kinds = [
        FamilyKind::Table,
        FamilyKind::Coverage,
        FamilyKind::Concave,
        FamilyKind::Cut,
        FamilyKind::Matroid,
    ];
    let specs: Vec<(usize, InstanceSpec)> = (0..TRIPLES)
        .map(|i| {
            (
                i,
                InstanceSpec {
                    kind: kinds[i % kinds.len()],
                    n: 2 + (i % 7),
                    seed: 700_000 + i as u64,
                },
            )
        })
        .collect();
    let results: Vec<Option<String>> = map_batch(specs, parallel, |(i, spec)| {
        let tag = format!("triple {i} ({}/n{})", spec.kind.name(), spec.n);
        let fam = match generate(spec.kind, spec.n, spec.seed) {
            Ok(f) => f,
            Err(e) => return Some(format!("{tag}: {e}")),
        };
        let oracle = match fam.build_oracle() {
            Ok(o) => o,
            Err(e) => return Some(format!("{tag}: {e}")),
        };
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed.wrapping_mul(31).wrapping_add(1));
        let mut perm: Vec<usize> = (0..spec.n).collect();
        perm.shuffle(&mut rng);
        let position = rng.gen_range(1..spec.n);
        let ordering = LinearOrdering::new(perm).expect("shuffled permutation");
        let base = greedy_extreme_base(&oracle, ordering);
        let fast = match exchange_capacity_consecutive(&oracle, &base, position) {
            Ok(b) => b,
            Err(e) => return Some(format!("{tag}: {e}")),
        };
        let u = base.ordering().vertex_at(position);
        let v = base.ordering().vertex_at(position - 1);
        let slow = match exchange_capacity_bruteforce(&oracle, base.y(), u, v) {
            Ok(b) => b,
            Err(e) => return Some(format!("{tag}: {e}")),
        };
        if fast != slow {
            Some(format!("{tag}: one-call {fast} vs exhaustive {slow}"))
        } else {
            None
        }
    });
    let bad: Vec<String> = results.into_iter().flatten().collect();
    CriterionOutcome {
        index: 3,
        name: "exchange-capacity-equivalence",
        pass: bad.is_empty(),
        detail: if bad.is_empty() {
            format!("{TRIPLES} triples match the definitional minimum exactly")
        } else {
            bad[0].clone()
        },
    }
}

/// Criterion 4: z = x − ∂φ is unchanged by every push and raised by exactly
/// δ by every augmentation, both from in-solver exact checks and from
/// recorded traces.
fn z_invariance(runs: &[&MainRun], parallel: bool) -> CriterionOutcome {
    let mut pushes = 0u64;
    let mut push_checks = 0u64;
    let mut augs = 0u64;
    let mut aug_checks = 0u64;
    for r in runs {
        for stats in [&r.sfm.stats, &r.strong.stats] {
            pushes += stats.loop_stats.pushes;
            push_checks += stats.loop_stats.checks.push_z_invariance;
            augs += stats.loop_stats.augmentations;
            aug_checks += stats.loop_stats.checks.augment_z_gain;
        }
    }
    let counters_ok = pushes == push_checks && augs == aug_checks && pushes > 0 && augs > 0;

    // independent re-check on recorded traces for a sample of instances
    let sample: Vec<InstanceSpec> = corpus()
        .into_iter()
        .filter(|s| s.n >= 3)
        .take(25)
        .collect();
    let trace_results: Vec<Option<String>> = map_batch(sample, parallel, |spec| {
        match audit_trace(spec) {
            Ok(()) => None,
            Err(e) => Some(format!(
                "{}/n{}/seed{}: {e}",
                spec.kind.name(),
                spec.n,
                spec.seed
            )),
        }
    });
    let trace_bad: Vec<String> = trace_results.into_iter().flatten().collect();

    let pass = counters_ok && trace_bad.is_empty();
    CriterionOutcome {
        index: 4,
        name: "z-invariance",
        pass,
        detail: if pass {
            format!("{pushes} pushes invariant, {augs} augmentations gained exactly δ; 25 traces audited")
        } else if !counters_ok {
            format!("checked {push_checks}/{pushes} pushes, {aug_checks}/{augs} augmentations")
        } else {
            trace_bad[0].clone()
        },
    }
}

/// Replays a recorded event stream: pushes must keep z⁻(V), augmentations
/// must add exactly δ, and z⁻(V) must stay within the relaxed weak duality
/// bound f(X) + C(n,2)·δ for the eventual output X.
fn audit_trace(spec: InstanceSpec) -> Result<(), String> {
    let fam = generate(spec.kind, spec.n, spec.seed).map_err(|e| e.to_string())?;
    let oracle = fam.build_oracle().map_err(|e| e.to_string())?;
    let mut events: Vec<TraceEvent> = Vec::new();
    let mut sink = |ev: TraceEvent| events.push(ev);
    let result = sfm_with(&oracle, None, Some(&mut sink)).map_err(|e| e.to_string())?;
    let f_at_output = oracle.evaluate(&result.minimizer).map_err(|e| e.to_string())?;
    let pairs = rat_int((spec.n * (spec.n - 1) / 2) as i64);

    let mut delta = Rational::zero();
    let mut prev_z: Option<Rational> = None;
    for ev in &events {
        let z = parse_rational(ev.z_neg()).map_err(|e| e.to_string())?;
        match ev {
            TraceEvent::Phase { delta: d, .. } => {
                delta = parse_rational(d).map_err(|e| e.to_string())?;
            }
            TraceEvent::Push { .. } => {
                if let Some(p) = &prev_z {
                    if z != *p {
                        return Err("push changed z⁻(V) in the trace".to_string());
                    }
                }
            }
            TraceEvent::Augment { delta: d, .. } => {
                let d = parse_rational(d).map_err(|e| e.to_string())?;
                if d != delta {
                    return Err("augmentation ran at a different δ than its phase".to_string());
                }
                match &prev_z {
                    Some(p) => {
                        if z != p + &delta {
                            return Err(format!(
                                "augmentation moved z⁻(V) from {p} to {z}, not by δ = {delta}"
                            ));
                        }
                    }
                    None => return Err("augmentation without a phase event".to_string()),
                }
            }
        }
        let bound = &f_at_output + &pairs * &delta;
        if z > bound {
            return Err(format!(
                "relaxed weak duality violated: z⁻(V) = {z} above f(X) + C(n,2)δ = {bound}"
            ));
        }
        prev_z = Some(z);
    }
    if events.is_empty() {
        return Err("no events recorded".to_string());
    }
    Ok(())
}

/// Criterion 5: augmentations per phase, phase counts, fixing rounds and
/// total oracle calls all stay inside their stated envelopes.
fn complexity_envelopes(runs: &[&MainRun]) -> CriterionOutcome {
    let mut bad = Vec::new();
    for r in runs {
        let n = r.spec.n as u64;
        let tag = format!("{}/n{}/seed{}", r.spec.kind.name(), r.spec.n, r.spec.seed);
        let aug_bound = n * n + n;
        for (alg, stats) in [("scaling", &r.sfm.stats), ("strong", &r.strong.stats)] {
            if stats.loop_stats.max_augmentations_in_phase > aug_bound {
                bad.push(format!(
                    "{tag}: {alg} ran {} augmentations in one phase (bound {aug_bound})",
                    stats.loop_stats.max_augmentations_in_phase
                ));
            }
        }
        let m = r.sfm.stats.bound_m.clone().unwrap_or_else(Rational::zero);
        if m.is_zero() {
            // f ≡ 0: both solvers must have used only a handful of calls
            for (alg, stats) in [("scaling", &r.sfm.stats), ("strong", &r.strong.stats)] {
                if stats.oracle_calls > 100 {
                    bad.push(format!("{tag}: {alg} used {} calls on a zero function", stats.oracle_calls));
                }
            }
        } else {
            let n_rat = rat_int(r.spec.n as i64);
            let phase_bound = ceil_log2_rational(&(&n_rat * &n_rat * &m)) + 1;
            if r.sfm.stats.loop_stats.phases > phase_bound {
                bad.push(format!(
                    "{tag}: {} phases (bound {phase_bound})",
                    r.sfm.stats.loop_stats.phases
                ));
            }
            let call_bound = 100 * n.pow(5) * (ceil_log2_rational(&(&n_rat * &m)) + 2);
            for (alg, stats) in [("scaling", &r.sfm.stats), ("strong", &r.strong.stats)] {
                if stats.oracle_calls > call_bound {
                    bad.push(format!(
                        "{tag}: {alg} used {} oracle calls (envelope {call_bound})",
                        stats.oracle_calls
                    ));
                }
            }
        }
        if r.strong.stats.fix_calls > n * n {
            bad.push(format!(
                "{tag}: {} fixing rounds (bound n² = {})",
                r.strong.stats.fix_calls,
                n * n
            ));
        }
    }
    CriterionOutcome {
        index: 5,
        name: "complexity-envelopes",
        pass: bad.is_empty(),
        detail: if bad.is_empty() {
            format!("{} runs inside all envelopes", runs.len() * 2)
        } else {
            format!("{} violations, first: {}", bad.len(), bad[0])
        },
    }
}

/// Criterion 6: every phase that ran out of active pairs verified
/// x(W) = f(W) exactly (the in-solver check errors out otherwise).
fn tight_w(runs: &[&MainRun]) -> CriterionOutcome {
    let exits: u64 = runs
        .iter()
        .map(|r| {
            r.sfm.stats.loop_stats.checks.tight_w_exits
                + r.strong.stats.loop_stats.checks.tight_w_exits
        })
        .sum();
    CriterionOutcome {
        index: 6,
        name: "tight-reachable-set",
        pass: exits > 0,
        detail: format!("{exits} exhausted-phase exits verified x(W) = f(W)"),
    }
}

struct BruteCheckObserver {
    fixes: u64,
    arcs: u64,
    bases: u64,
}

impl StrongObserver for BruteCheckObserver {
    fn on_fix(&mut self, g: &SetFunctionOracle, w: usize) -> Result<(), SfmError> {
        if g.size() <= 8 {
            let out = brute_force_with_mode(g, false);
            for m in &out.all_minimizers {
                if !m.contains(w) {
                    return Err(SfmError::InternalInvariant(format!(
                        "fixed vertex {w} is missing from a minimizer"
                    )));
                }
            }
        }
        self.fixes += 1;
        Ok(())
    }

    fn on_arc_added(
        &mut self,
        g: &SetFunctionOracle,
        u: usize,
        w: usize,
    ) -> Result<(), SfmError> {
        if g.size() <= 8 {
            let out = brute_force_with_mode(g, false);
            for m in &out.all_minimizers {
                if m.contains(u) && !m.contains(w) {
                    return Err(SfmError::InternalInvariant(format!(
                        "recorded pair ({u}, {w}) is not compatible"
                    )));
                }
            }
        }
        self.arcs += 1;
        Ok(())
    }

    fn on_consistent_base(
        &mut self,
        _g: &SetFunctionOracle,
        _dag: &PrecedenceDag,
        _base: &crate::base::ExtremeBase,
    ) -> Result<(), SfmError> {
        self.bases += 1;
        Ok(())
    }
}

/// Criteria 7 and 8: the fixing procedure only ever pins elements lying in
/// every minimizer, recorded pairs are compatible under exhaustive
/// enumeration, and consistent extreme bases respect their marginal bounds.
fn fix_and_compatibility(parallel: bool) -> (CriterionOutcome, CriterionOutcome) {
    const TARGET: usize = 200;
    let kinds = [FamilyKind::Table, FamilyKind::Coverage, FamilyKind::Concave];
    let candidates: Vec<InstanceSpec> = (0..1600)
        .map(|i| InstanceSpec {
            kind: kinds[i % kinds.len()],
            n: 1 + (i % 8),
            seed: 900_000 + i as u64,
        })
        .collect();

    #[derive(Default)]
    struct FixProbe {
        qualifying: bool,
        base_checked: bool,
        error: Option<String>,
    }

    let probes: Vec<FixProbe> = map_batch(candidates, parallel, |spec| {
        let tag = format!("{}/n{}/seed{}", spec.kind.name(), spec.n, spec.seed);
        let mut probe = FixProbe::default();
        let fam = match generate(spec.kind, spec.n, spec.seed) {
            Ok(f) => f,
            Err(e) => {
                probe.error = Some(format!("{tag}: {e}"));
                return probe;
            }
        };
        let oracle = match fam.build_oracle() {
            Ok(o) => o,
            Err(e) => {
                probe.error = Some(format!("{tag}: {e}"));
                return probe;
            }
        };
        let dag = PrecedenceDag::new(spec.n);
        let (eta_value, _) = match eta(&oracle, &dag) {
            Ok(v) => v,
            Err(e) => {
                probe.error = Some(format!("{tag}: {e}"));
                return probe;
            }
        };
        if !eta_value.is_positive() {
            return probe;
        }
        let start = match consistent_extreme_base(&oracle, &dag) {
            Ok(b) => b,
            Err(e) => {
                probe.error = Some(format!("{tag}: {e}"));
                return probe;
            }
        };
        probe.base_checked = true;
        // the procedure requires some set at or below −η/2
        let brute = brute_force_with_mode(&oracle, false);
        let kappa = eta_value.clone() / rat_int(2);
        if brute.value > -kappa {
            return probe;
        }
        probe.qualifying = true;
        match fix(&oracle, start, &eta_value, None) {
            Ok(outcome) => {
                for m in &brute.all_minimizers {
                    if !m.contains(outcome.fixed_vertex) {
                        probe.error = Some(format!(
                            "{tag}: vertex {} is not in every minimizer",
                            outcome.fixed_vertex
                        ));
                        break;
                    }
                }
            }
            Err(e) => probe.error = Some(format!("{tag}: {e}")),
        }
        probe
    });

    let qualifying = probes.iter().filter(|p| p.qualifying).count();
    let direct_bases = probes.iter().filter(|p| p.base_checked).count();
    let mut errors: Vec<String> = probes.iter().filter_map(|p| p.error.clone()).collect();

    // audited strong solves: every fixing round and every recorded pair is
    // checked against exhaustive enumeration through the observer
    let audited: Vec<InstanceSpec> = corpus().into_iter().filter(|s| s.n <= 8).take(150).collect();
    let audit_results: Vec<Result<(u64, u64, u64), String>> =
        map_batch(audited, parallel, |spec| {
            let tag = format!("{}/n{}/seed{}", spec.kind.name(), spec.n, spec.seed);
            let fam = generate(spec.kind, spec.n, spec.seed).map_err(|e| format!("{tag}: {e}"))?;
            let oracle = fam.build_oracle().map_err(|e| format!("{tag}: {e}"))?;
            let mut obs = BruteCheckObserver {
                fixes: 0,
                arcs: 0,
                bases: 0,
            };
            strong_sfm_with(&oracle, Some(&mut obs), None)
                .map_err(|e| format!("{tag}: {e}"))?;
            Ok((obs.fixes, obs.arcs, obs.bases))
        });
    let mut audited_fixes = 0u64;
    let mut audited_arcs = 0u64;
    let mut audited_bases = 0u64;
    for r in &audit_results {
        match r {
            Ok((f, a, b)) => {
                audited_fixes += f;
                audited_arcs += a;
                audited_bases += b;
            }
            Err(e) => errors.push(e.clone()),
        }
    }

    let c7_pass = errors.is_empty() && qualifying >= TARGET;
    let c7 = CriterionOutcome {
        index: 7,
        name: "fix-pins-common-elements",
        pass: c7_pass,
        detail: if c7_pass {
            format!(
                "{qualifying} qualifying runs pinned a common element; {audited_fixes} audited rounds, {audited_arcs} pairs compatible"
            )
        } else if let Some(e) = errors.first() {
            e.clone()
        } else {
            format!("only {qualifying}/{TARGET} qualifying instances")
        },
    };

    let total_bases = direct_bases as u64 + audited_bases;
    let c8 = CriterionOutcome {
        index: 8,
        name: "consistent-base-bound",
        pass: errors.is_empty() && total_bases > 0,
        detail: format!(
            "{total_bases} consistent bases stayed within their marginal bounds"
        ),
    };
    (c7, c8)
}

/// Criterion 9: with a declared ε, the scaling solver recovers the exact
/// minimum of rational-valued instances.
fn epsilon_mode(parallel: bool) -> CriterionOutcome {
    const COUNT: usize = 60;
    let specs: Vec<(usize, InstanceSpec)> = (0..COUNT)
        .map(|i| {
            (
                i,
                InstanceSpec {
                    kind: if i % 2 == 0 {
                        FamilyKind::RationalTable
                    } else {
                        FamilyKind::RationalCut
                    },
                    n: 1 + (i % 8),
                    seed: 550_000 + i as u64,
                },
            )
        })
        .collect();
    let results: Vec<Option<String>> = map_batch(specs, parallel, |(i, spec)| {
        let tag = format!("ε-instance {i} ({}/n{})", spec.kind.name(), spec.n);
        let (fam, eps) = match generate_with_epsilon(spec.kind, spec.n, spec.seed) {
            Ok(p) => p,
            Err(e) => return Some(format!("{tag}: {e}")),
        };
        let oracle = match fam.build_oracle() {
            Ok(o) => o,
            Err(e) => return Some(format!("{tag}: {e}")),
        };
        let result = match sfm_with(&oracle, Some(&eps), None) {
            Ok(r) => r,
            Err(e) => return Some(format!("{tag}: {e}")),
        };
        let fresh = fam.build_oracle().expect("fixture rebuilds");
        let brute = brute_force_with_mode(&fresh, false);
        if result.value != brute.value {
            return Some(format!(
                "{tag}: scaling found {} but exhaustive is {}",
                result.value, brute.value
            ));
        }
        if let Some(cert) = &result.certificate {
            let again = fam.build_oracle().expect("fixture rebuilds");
            let report = check_certificate(&again, cert, &eps);
            if !report.pass {
                return Some(format!("{tag}: {}", report.failure.unwrap_or_default()));
            }
        }
        None
    });
    let bad: Vec<String> = results.into_iter().flatten().collect();
    CriterionOutcome {
        index: 9,
        name: "epsilon-scaled-mode",
        pass: bad.is_empty(),
        detail: if bad.is_empty() {
            format!("{COUNT} rational instances solved exactly with certified gap < ε")
        } else {
            bad[0].clone()
        },
    }
}

/// Criterion 10: any fixed configuration produces byte-identical output on
/// repeated runs.
fn determinism() -> CriterionOutcome {
    let mut bad = Vec::new();
    for kind in GENERATOR_FAMILIES {
        let spec = InstanceSpec {
            kind,
            n: 6,
            seed: 42,
        };
        let gen_a = run_gen(kind, spec.n, spec.seed);
        let gen_b = run_gen(kind, spec.n, spec.seed);
        match (gen_a, gen_b) {
            (Ok(a), Ok(b)) if a == b => {}
            _ => bad.push(format!("{}: gen output differs", kind.name())),
        }
        let fam = match generate(kind, spec.n, spec.seed) {
            Ok(f) => f,
            Err(e) => {
                bad.push(format!("{}: {e}", kind.name()));
                continue;
            }
        };
        for alg in [Algorithm::Scaling, Algorithm::Strong, Algorithm::Brute] {
            let a = run_solve(&fam, alg, None, false, None);
            let b = run_solve(&fam, alg, None, false, None);
            match (a, b) {
                (Ok(a), Ok(b)) if a.json == b.json => {}
                (Err(_), _) | (_, Err(_)) => {
                    bad.push(format!("{}/{}: solve failed", kind.name(), alg.name()))
                }
                _ => bad.push(format!("{}/{}: output differs", kind.name(), alg.name())),
            }
        }
        // traced runs must replay identically as well
        let mut ev_a: Vec<TraceEvent> = Vec::new();
        let mut ev_b: Vec<TraceEvent> = Vec::new();
        let oracle_a = fam.build_oracle().expect("fixture builds");
        let oracle_b = fam.build_oracle().expect("fixture builds");
        let mut sink_a = |ev: TraceEvent| ev_a.push(ev);
        let mut sink_b = |ev: TraceEvent| ev_b.push(ev);
        let _ = sfm_with(&oracle_a, None, Some(&mut sink_a));
        let _ = sfm_with(&oracle_b, None, Some(&mut sink_b));
        if ev_a != ev_b {
            bad.push(format!("{}: traces differ", kind.name()));
        }
    }
    CriterionOutcome {
        index: 10,
        name: "determinism",
        pass: bad.is_empty(),
        detail: if bad.is_empty() {
            "gen, all three algorithms and traces are byte-stable".to_string()
        } else {
            bad[0].clone()
        },
    }
}
