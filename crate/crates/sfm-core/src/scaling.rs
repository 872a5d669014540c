//! The capacity-scaling solver.
//!
//! A base x ∈ B(f) is kept as a convex combination of extreme bases next to a
//! skew-symmetric δ-feasible flow φ on the complete digraph. The quantity the
//! phases drive up is z⁻(V) for z = x − ∂φ. Each phase halves δ, clamps φ
//! back into [−δ, δ], and then alternates between exchange pushes (which
//! leave z untouched while opening residual arcs) and δ-augmentations from
//! S = {v : z(v) ≤ −δ} to T = {v : z(v) ≥ δ}, each of which raises z⁻(V) by
//! exactly δ. When δ drops below 1/n² the duality gap of the reported set is
//! under 1, which pins the exact minimizer for integer-valued functions.
//!
//! Runs are deterministic: active pairs are scanned in combination order,
//! path search breaks ties by smallest vertex index, and all arithmetic is
//! exact.

use crate::base::{
    apply_interchange, exchange_capacity_consecutive, greedy_extreme_base, CombinationEntry,
    ConvexCombination, ExtremeBase, LinearOrdering,
};
use crate::certificate::CertificateDoc;
use crate::error::SfmError;
use crate::flow::Flow;
use crate::oracle::{upper_bound_m, SetFunctionOracle};
use crate::rational::{format_rational, negative_part_total, rat_int, Rational};
use crate::subset::Subset;
use crate::trace::TraceEvent;
use num_traits::{One, Signed, Zero};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CheckCounters {
    /// Pushes whose z-invariance was verified exactly.
    pub push_z_invariance: u64,
    /// Augmentations verified to raise z⁻(V) by exactly δ.
    pub augment_z_gain: u64,
    /// Phase exits with no active pair left, each verified to satisfy
    /// x(W) = f(W).
    pub tight_w_exits: u64,
    /// Pushes verified not to shrink the reachable set.
    pub w_monotone: u64,
}

impl CheckCounters {
    pub fn absorb(&mut self, other: &CheckCounters) {
        self.push_z_invariance += other.push_z_invariance;
        self.augment_z_gain += other.augment_z_gain;
        self.tight_w_exits += other.tight_w_exits;
        self.w_monotone += other.w_monotone;
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LoopStats {
    pub phases: u64,
    pub augmentations: u64,
    pub pushes: u64,
    pub max_augmentations_in_phase: u64,
    pub max_combination_size: usize,
    pub checks: CheckCounters,
}

impl LoopStats {
    pub fn absorb(&mut self, other: &LoopStats) {
        self.phases += other.phases;
        self.augmentations += other.augmentations;
        self.pushes += other.pushes;
        self.max_augmentations_in_phase = self
            .max_augmentations_in_phase
            .max(other.max_augmentations_in_phase);
        self.max_combination_size = self.max_combination_size.max(other.max_combination_size);
        self.checks.absorb(&other.checks);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ExitCause {
    SourcesEmpty,
    TargetsEmpty,
    NoActivePairs,
}

pub(crate) struct ScalingOutcome {
    pub minimizer: Subset,
    pub combination: ConvexCombination,
    pub phi: Flow,
    pub delta_final: Rational,
    pub stats: LoopStats,
}

pub(crate) fn run_scaling_loop(
    f: &SetFunctionOracle,
    initial: ExtremeBase,
    delta_start: Rational,
    threshold: Rational,
    trace: Option<&mut dyn FnMut(TraceEvent)>,
) -> Result<ScalingOutcome, SfmError> {
    ScalingLoop::new(f, initial, delta_start, threshold, trace).run()
}

struct ScalingLoop<'f, 't> {
    f: &'f SetFunctionOracle,
    n: usize,
    delta: Rational,
    threshold: Rational,
    comb: ConvexCombination,
    phi: Flow,
    dphi: Vec<Rational>,
    sources: Subset,
    targets: Subset,
    reached: Subset,
    last_exit: Option<ExitCause>,
    stats: LoopStats,
    trace: Option<&'t mut dyn FnMut(TraceEvent)>,
}

impl<'f, 't> ScalingLoop<'f, 't> {
    fn new(
        f: &'f SetFunctionOracle,
        initial: ExtremeBase,
        delta_start: Rational,
        threshold: Rational,
        trace: Option<&'t mut dyn FnMut(TraceEvent)>,
    ) -> ScalingLoop<'f, 't> {
        let n = f.size();
        ScalingLoop {
            f,
            n,
            delta: delta_start,
            threshold,
            comb: ConvexCombination::single(initial),
            phi: Flow::zero(n),
            dphi: vec![Rational::zero(); n],
            sources: Subset::empty(n),
            targets: Subset::empty(n),
            reached: Subset::empty(n),
            last_exit: None,
            stats: LoopStats::default(),
            trace,
        }
    }

    fn run(mut self) -> Result<ScalingOutcome, SfmError> {
        let mut phase_index: u64 = 0;
        while self.delta >= self.threshold {
            self.delta = &self.delta / rat_int(2);
            phase_index += 1;
            self.run_phase(phase_index)?;
        }
        if self.stats.phases == 0 {
            // No phase ran (the starting δ was already below the threshold);
            // derive the cut sets once so the output rule has something to
            // look at.
            self.refresh_cut_sets();
        }
        let minimizer = self.output_set()?;
        Ok(ScalingOutcome {
            minimizer,
            combination: self.comb,
            phi: self.phi,
            delta_final: self.delta,
            stats: self.stats,
        })
    }

    fn run_phase(&mut self, phase_index: u64) -> Result<(), SfmError> {
        self.phi.clamp(&self.delta);
        self.dphi = self.phi.boundary();
        self.refresh_cut_sets();
        self.stats.phases += 1;
        self.emit(|s| TraceEvent::Phase {
            index: phase_index,
            delta: format_rational(&s.delta),
            z_neg: format_rational(&s.z_neg()),
        });

        let aug_bound = (self.n * self.n + self.n) as u64;
        let push_bound = 8 * (self.n as u64).pow(3) + 16;
        let mut phase_augmentations: u64 = 0;
        let mut pushes_this_search: u64 = 0;
        loop {
            if self.sources.is_empty() {
                self.last_exit = Some(ExitCause::SourcesEmpty);
                break;
            }
            if self.targets.is_empty() {
                self.last_exit = Some(ExitCause::TargetsEmpty);
                break;
            }
            while !self.reached.intersects(&self.targets) {
                match self.find_active_pair() {
                    Some((i, v)) => {
                        self.push(i, v)?;
                        pushes_this_search += 1;
                        if pushes_this_search > push_bound {
                            return Err(SfmError::InternalInvariant(format!(
                                "more than {push_bound} pushes without an augmentation"
                            )));
                        }
                    }
                    None => break,
                }
            }
            if self.reached.intersects(&self.targets) {
                self.augment_once()?;
                phase_augmentations += 1;
                if phase_augmentations > aug_bound {
                    return Err(SfmError::InternalInvariant(format!(
                        "phase exceeded the n²+n = {aug_bound} augmentation bound"
                    )));
                }
                pushes_this_search = 0;
                self.reduce_combination()?;
                continue;
            }
            // No augmenting path can appear any more: no active pair is left
            // and the reachable set misses T. The reachable set is tight now.
            self.reduce_combination()?;
            self.assert_tight_reached()?;
            self.last_exit = Some(ExitCause::NoActivePairs);
            break;
        }
        self.stats.max_augmentations_in_phase = self
            .stats
            .max_augmentations_in_phase
            .max(phase_augmentations);
        Ok(())
    }

    /// S = {v : z(v) ≤ −δ}, T = {v : z(v) ≥ δ}, W = reachable from S.
    fn refresh_cut_sets(&mut self) {
        let mut s = Subset::empty(self.n);
        let mut t = Subset::empty(self.n);
        let neg_delta = -self.delta.clone();
        for v in 0..self.n {
            let z = &self.comb.x()[v] - &self.dphi[v];
            if z <= neg_delta {
                s.insert(v);
            } else if z >= self.delta {
                t.insert(v);
            }
        }
        self.sources = s;
        self.targets = t;
        self.reached = self.phi.residual_reachable(&self.sources);
    }

    fn z_neg(&self) -> Rational {
        let mut acc = Rational::zero();
        for v in 0..self.n {
            let z = &self.comb.x()[v] - &self.dphi[v];
            if z.is_negative() {
                acc += z;
            }
        }
        acc
    }

    /// Active pair with the smallest combination index.
    fn find_active_pair(&self) -> Option<(usize, usize)> {
        for (i, entry) in self.comb.entries().iter().enumerate() {
            if let Some(v) = active_vertex(entry.base.ordering(), &self.reached) {
                return Some((i, v));
            }
        }
        None
    }

    /// One exchange push on active pair (i, v) with u the successor of v.
    fn push(&mut self, i: usize, v: usize) -> Result<(), SfmError> {
        let (u, position_of_u) = {
            let ord = self.comb.entries()[i].base.ordering();
            let kv = ord.position_of(v);
            if kv + 1 >= self.n {
                return Err(SfmError::InternalInvariant(
                    "active vertex has no successor".to_string(),
                ));
            }
            (ord.vertex_at(kv + 1), kv + 1)
        };
        if !self.reached.contains(u) {
            return Err(SfmError::InternalInvariant(
                "successor of an active vertex must be reachable".to_string(),
            ));
        }
        let exchange =
            exchange_capacity_consecutive(self.f, &self.comb.entries()[i].base, position_of_u)?;
        if exchange.is_negative() {
            return Err(SfmError::InternalInvariant(
                "negative exchange capacity".to_string(),
            ));
        }
        let z_u_before = &self.comb.x()[u] - &self.dphi[u];
        let z_v_before = &self.comb.x()[v] - &self.dphi[v];

        let scaled = &self.comb.entries()[i].lambda * &exchange;
        let alpha = if self.delta < scaled {
            self.delta.clone()
        } else {
            scaled.clone()
        };
        let saturating = alpha == scaled;

        if alpha.is_positive() {
            let neg_alpha = -alpha.clone();
            self.phi.add_to(u, v, &neg_alpha);
            self.dphi[u] += &alpha;
            self.dphi[v] -= &alpha;
        }
        if exchange.is_positive() {
            if !saturating {
                let lambda_front = &alpha / &exchange;
                let lambda_rest = &self.comb.entries()[i].lambda - &lambda_front;
                let old_base = self.comb.entries()[i].base.clone();
                self.comb.push_entry(CombinationEntry {
                    lambda: lambda_rest,
                    base: old_base,
                });
                self.comb.entry_mut(i).lambda = lambda_front;
            }
            let swapped = apply_interchange(&self.comb.entries()[i].base, position_of_u, &exchange);
            self.comb.entry_mut(i).base = swapped;
            self.comb.shift_x(u, v, &alpha);
        } else {
            let swapped =
                apply_interchange(&self.comb.entries()[i].base, position_of_u, &exchange);
            self.comb.entry_mut(i).base = swapped;
        }

        let z_u_after = &self.comb.x()[u] - &self.dphi[u];
        let z_v_after = &self.comb.x()[v] - &self.dphi[v];
        if z_u_after != z_u_before || z_v_after != z_v_before {
            return Err(SfmError::InternalInvariant(
                "push changed z = x − ∂φ".to_string(),
            ));
        }
        self.stats.checks.push_z_invariance += 1;
        self.stats.pushes += 1;
        self.stats.max_combination_size = self.stats.max_combination_size.max(self.comb.len());
        if self.comb.len() > 2 * self.n {
            return Err(SfmError::InternalInvariant(format!(
                "combination grew past 2n = {}",
                2 * self.n
            )));
        }

        let reached_before = std::mem::replace(&mut self.reached, Subset::empty(self.n));
        self.reached = self.phi.residual_reachable(&self.sources);
        if !reached_before.is_subset_of(&self.reached) {
            return Err(SfmError::InternalInvariant(
                "reachable set shrank during a push".to_string(),
            ));
        }
        self.stats.checks.w_monotone += 1;
        if !saturating && !self.reached.contains(v) {
            return Err(SfmError::InternalInvariant(
                "nonsaturating push failed to make its vertex reachable".to_string(),
            ));
        }

        let alpha_s = format_rational(&alpha);
        let exchange_s = format_rational(&exchange);
        self.emit(move |s| TraceEvent::Push {
            i,
            u,
            v,
            alpha: alpha_s.clone(),
            exchange: exchange_s.clone(),
            saturating,
            z_neg: format_rational(&s.z_neg()),
        });
        Ok(())
    }

    fn augment_once(&mut self) -> Result<(), SfmError> {
        let path = self
            .phi
            .find_augmenting_path(&self.sources, &self.targets)
            .ok_or_else(|| {
                SfmError::InternalInvariant(
                    "reachable set meets T but no augmenting path was found".to_string(),
                )
            })?;
        if path.len() < 2 {
            return Err(SfmError::InternalInvariant(
                "degenerate augmenting path".to_string(),
            ));
        }
        let z_neg_before = self.z_neg();
        self.phi.augment(&path, &self.delta)?;
        let first = path[0];
        let last = *path.last().unwrap();
        self.dphi[first] -= &self.delta;
        self.dphi[last] += &self.delta;
        let z_neg_after = self.z_neg();
        if z_neg_after != &z_neg_before + &self.delta {
            return Err(SfmError::InternalInvariant(
                "augmentation did not raise z⁻(V) by exactly δ".to_string(),
            ));
        }
        self.stats.checks.augment_z_gain += 1;
        self.stats.augmentations += 1;
        self.refresh_cut_sets();

        let path_c = path.clone();
        self.emit(move |s| TraceEvent::Augment {
            delta: format_rational(&s.delta),
            path: path_c.clone(),
            z_neg: format_rational(&s.z_neg()),
        });
        Ok(())
    }

    fn reduce_combination(&mut self) -> Result<(), SfmError> {
        self.comb.reduce();
        if self.comb.len() > self.n + 1 {
            return Err(SfmError::InternalInvariant(
                "reduction left more than n+1 bases".to_string(),
            ));
        }
        self.comb.check_invariants()
    }

    /// With no active pair left, every ordering starts with the reachable
    /// set, so x(W) = f(W) must hold exactly.
    fn assert_tight_reached(&mut self) -> Result<(), SfmError> {
        let mut x_w = Rational::zero();
        for v in self.reached.iter() {
            x_w += &self.comb.x()[v];
        }
        if x_w != self.f.eval(&self.reached) {
            return Err(SfmError::InternalInvariant(
                "reachable set is not tight for x".to_string(),
            ));
        }
        self.stats.checks.tight_w_exits += 1;
        Ok(())
    }

    fn output_set(&mut self) -> Result<Subset, SfmError> {
        if self.sources.is_empty() {
            Ok(Subset::empty(self.n))
        } else if self.targets.is_empty() {
            Ok(Subset::full(self.n))
        } else {
            if self.last_exit != Some(ExitCause::NoActivePairs) {
                return Err(SfmError::InternalInvariant(
                    "phase loop stopped with sources, targets and active pairs left".to_string(),
                ));
            }
            Ok(self.reached.clone())
        }
    }

    fn emit<F>(&mut self, make: F)
    where
        F: Fn(&ScalingLoop<'f, 't>) -> TraceEvent,
    {
        if self.trace.is_some() {
            let ev = make(self);
            if let Some(sink) = self.trace.as_mut() {
                sink(ev);
            }
        }
    }
}

/// The active vertex of one ordering: the last vertex outside `reached`
/// that still has a `reached` vertex somewhere after it. At most one vertex
/// per ordering qualifies.
pub(crate) fn active_vertex(ordering: &LinearOrdering, reached: &Subset) -> Option<usize> {
    let mut later_in_reached = false;
    for k in (0..ordering.len()).rev() {
        let v = ordering.vertex_at(k);
        if reached.contains(v) {
            later_in_reached = true;
        } else if later_in_reached {
            return Some(v);
        }
    }
    None
}

#[derive(Debug, Clone, Default)]
pub struct SolveStats {
    /// Underlying oracle evaluations consumed by this solve.
    pub oracle_calls: u64,
    /// Invocations of the element-fixing procedure (strong algorithm only).
    pub fix_calls: u64,
    /// The bound M the δ-schedule started from (scaling algorithm only).
    pub bound_m: Option<Rational>,
    pub loop_stats: LoopStats,
}

#[derive(Debug, Clone)]
pub struct SfmResult {
    pub minimizer: Subset,
    pub minimizer_labels: Vec<String>,
    /// Minimum value of the function as given (any f(∅) offset added back).
    pub value: Rational,
    /// Duality gap f(X) − x⁻(V) when a certificate is available.
    pub gap: Option<Rational>,
    pub certificate: Option<CertificateDoc>,
    pub stats: SolveStats,
}

/// Minimizes an integer-valued submodular function given by its oracle.
pub fn sfm(f: &SetFunctionOracle) -> Result<SfmResult, SfmError> {
    sfm_with(f, None, None)
}

/// Scaling solver with options. For a rational-valued f, pass ε: a positive
/// lower bound on the difference between distinct function values; the solver
/// then runs on (1/ε)·f and certifies with gap < ε.
pub fn sfm_with(
    f: &SetFunctionOracle,
    epsilon: Option<&Rational>,
    trace: Option<&mut dyn FnMut(TraceEvent)>,
) -> Result<SfmResult, SfmError> {
    let n = f.size();
    if n == 0 {
        return Err(SfmError::InvalidInput(
            "cannot minimize over an empty ground set".to_string(),
        ));
    }
    if let Some(e) = epsilon {
        if !e.is_positive() {
            return Err(SfmError::InvalidArgument("ε must be positive".to_string()));
        }
    }
    let calls_before = f.calls();
    let scaled_oracle;
    let g: &SetFunctionOracle = match epsilon {
        Some(e) if !e.is_one() => {
            scaled_oracle = f.scale(e.recip())?;
            &scaled_oracle
        }
        _ => f,
    };

    let initial = greedy_extreme_base(g, LinearOrdering::identity(n));
    let bound_m = upper_bound_m(g, &LinearOrdering::identity(n));
    let gap_bound = epsilon.cloned().unwrap_or_else(Rational::one);

    if bound_m.is_zero() {
        // |f(X)| ≤ M = 0 forces f ≡ 0; the empty set minimizes.
        let minimizer = Subset::empty(n);
        let comb = ConvexCombination::single(initial);
        let phi = Flow::zero(n);
        let gap = Rational::zero();
        let certificate =
            CertificateDoc::from_solver_state(f.ground(), &minimizer, &comb, &phi, &gap);
        return Ok(SfmResult {
            minimizer_labels: f.ground().subset_labels(&minimizer),
            minimizer,
            value: f.offset().clone(),
            gap: Some(gap),
            certificate: Some(certificate),
            stats: SolveStats {
                oracle_calls: f.calls() - calls_before,
                fix_calls: 0,
                bound_m: Some(bound_m),
                loop_stats: LoopStats::default(),
            },
        });
    }

    let threshold = Rational::new(
        num_bigint::BigInt::from(1),
        num_bigint::BigInt::from((n * n) as u64),
    );
    let outcome = run_scaling_loop(g, initial, bound_m.clone(), threshold, trace)?;

    let mut combination = outcome.combination;
    let mut phi = outcome.phi;
    if let Some(e) = epsilon {
        if !e.is_one() {
            combination.scale_values(e);
            phi.scale_values(e);
        }
    }
    let minimizer = outcome.minimizer;
    let min_normalized = f.eval(&minimizer);
    let gap = &min_normalized - negative_part_total(combination.x());
    if gap.is_negative() {
        return Err(SfmError::InternalInvariant(
            "negative duality gap".to_string(),
        ));
    }
    if gap >= gap_bound {
        return Err(SfmError::InternalInvariant(format!(
            "final duality gap {gap} does not certify optimality"
        )));
    }
    let certificate =
        CertificateDoc::from_solver_state(f.ground(), &minimizer, &combination, &phi, &gap);
    Ok(SfmResult {
        minimizer_labels: f.ground().subset_labels(&minimizer),
        minimizer,
        value: min_normalized + f.offset(),
        gap: Some(gap),
        certificate: Some(certificate),
        stats: SolveStats {
            oracle_calls: f.calls() - calls_before,
            fix_calls: 0,
            bound_m: Some(bound_m),
            loop_stats: outcome.stats,
        },
    })
}

/// Smallest k ≥ 0 with 2^k ≥ q; 0 for q ≤ 1. Used by the complexity
/// envelope checks.
pub fn ceil_log2_rational(q: &Rational) -> u64 {
    let one = Rational::one();
    if *q <= one {
        return 0;
    }
    let mut power = one;
    let two = rat_int(2);
    let mut k = 0u64;
    while power < *q {
        power *= &two;
        k += 1;
    }
    k
}
