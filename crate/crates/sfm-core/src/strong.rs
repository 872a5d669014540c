//! The strongly polynomial solver.
//!
//! Runs the scaling core only for a value-independent number of phases at a
//! time. Each round either pins an element that belongs to every minimizer,
//! records an ordered pair (u, w) such that any minimizer containing u must
//! contain w, or contracts a cycle of such pairs. Pinned elements accumulate
//! through restrictions of the function; the pair structure lives in an
//! acyclic precedence graph over the current (possibly merged) vertices.

use crate::base::{greedy_extreme_base, ExtremeBase, LinearOrdering};
use crate::error::SfmError;
use crate::oracle::SetFunctionOracle;
use crate::rational::{rat_int, Rational};
use crate::scaling::{run_scaling_loop, LoopStats, SfmResult, SolveStats};
use crate::subset::Subset;
use crate::trace::TraceEvent;
use num_bigint::BigInt;
use num_traits::Signed;
use std::collections::BTreeSet;

/// Acyclic digraph of precedence pairs: an arc (u, w) records that every
/// minimizer of the current function containing u also contains w.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrecedenceDag {
    n: usize,
    arcs: BTreeSet<(usize, usize)>,
}

impl PrecedenceDag {
    pub fn new(n: usize) -> PrecedenceDag {
        PrecedenceDag {
            n,
            arcs: BTreeSet::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn arcs(&self) -> &BTreeSet<(usize, usize)> {
        &self.arcs
    }

    pub fn has_arc(&self, u: usize, w: usize) -> bool {
        self.arcs.contains(&(u, w))
    }

    /// Adds an arc; the graph must stay acyclic (contract cycles first).
    pub fn add_arc(&mut self, u: usize, w: usize) -> Result<(), SfmError> {
        if u >= self.n || w >= self.n || u == w {
            return Err(SfmError::InvalidArgument(format!("bad arc ({u}, {w})")));
        }
        if self.reachable_from(w).contains(u) {
            return Err(SfmError::InvalidArgument(format!(
                "arc ({u}, {w}) would close a cycle"
            )));
        }
        self.arcs.insert((u, w));
        Ok(())
    }

    /// R(v): vertices reachable from v, including v itself.
    pub fn reachable_from(&self, v: usize) -> Subset {
        let mut seen = Subset::singleton(self.n, v);
        let mut stack = vec![v];
        while let Some(p) = stack.pop() {
            for &(a, b) in self.arcs.range((p, 0)..(p + 1, 0)) {
                debug_assert_eq!(a, p);
                if !seen.contains(b) {
                    seen.insert(b);
                    stack.push(b);
                }
            }
        }
        seen
    }

    pub fn is_acyclic(&self) -> bool {
        self.reverse_topological_order().is_ok()
    }

    /// Ordering in which every vertex appears after everything it can reach
    /// (so arcs always point from later to earlier positions); ties broken by
    /// smallest vertex index. Greedy along such an ordering yields a base
    /// consistent with the precedence graph.
    pub fn reverse_topological_order(&self) -> Result<Vec<usize>, SfmError> {
        let mut out_deg = vec![0usize; self.n];
        for &(u, _) in &self.arcs {
            out_deg[u] += 1;
        }
        let mut ready: BTreeSet<usize> = (0..self.n).filter(|&v| out_deg[v] == 0).collect();
        let mut order = Vec::with_capacity(self.n);
        while let Some(&v) = ready.iter().next() {
            ready.remove(&v);
            order.push(v);
            for &(p, q) in &self.arcs {
                if q == v {
                    out_deg[p] -= 1;
                    if out_deg[p] == 0 {
                        ready.insert(p);
                    }
                }
            }
        }
        if order.len() != self.n {
            return Err(SfmError::InternalInvariant(
                "precedence graph contains a cycle".to_string(),
            ));
        }
        Ok(order)
    }

    /// Contracts `component` to a single vertex placed at its smallest
    /// member's position. `closing` is the arc whose insertion creates the
    /// cycle; `component` must be exactly the strongly connected component
    /// of that arc's endpoints in D ∪ {closing}. Returns the contracted
    /// graph and, for each new vertex, the set of old vertices it stands for.
    pub fn contract(
        &self,
        component: &Subset,
        closing: (usize, usize),
    ) -> Result<(PrecedenceDag, Vec<Subset>), SfmError> {
        component.validate(self.n)?;
        if component.len() < 2 {
            return Err(SfmError::InvalidArgument(
                "contraction needs at least two vertices".to_string(),
            ));
        }
        let (cu, cw) = closing;
        let mut with_arc = self.clone();
        with_arc.arcs.insert((cu, cw));
        let from_u = with_arc.reachable_from(cu);
        let mut scc = Subset::empty(self.n);
        for v in from_u.iter() {
            if with_arc.reachable_from(v).contains(cu) {
                scc.insert(v);
            }
        }
        if scc != *component {
            return Err(SfmError::InvalidArgument(
                "component is not the strongly connected component of the closing arc"
                    .to_string(),
            ));
        }
        let anchor = component.iter().next().unwrap();
        let mut old_to_new = vec![usize::MAX; self.n];
        let mut groups: Vec<Subset> = Vec::new();
        for v in 0..self.n {
            if component.contains(v) && v != anchor {
                continue;
            }
            let idx = groups.len();
            if v == anchor {
                groups.push(component.clone());
            } else {
                groups.push(Subset::singleton(self.n, v));
            }
            old_to_new[v] = idx;
        }
        for v in component.iter() {
            old_to_new[v] = old_to_new[anchor];
        }
        let mut arcs = BTreeSet::new();
        for &(a, b) in &self.arcs {
            let (na, nb) = (old_to_new[a], old_to_new[b]);
            if na != nb {
                arcs.insert((na, nb));
            }
        }
        let contracted = PrecedenceDag {
            n: groups.len(),
            arcs,
        };
        if !contracted.is_acyclic() {
            return Err(SfmError::InternalInvariant(
                "contraction left a cycle behind".to_string(),
            ));
        }
        Ok((contracted, groups))
    }

    /// Drops `removed` and reindexes. Returns the new graph and the map from
    /// new indices to surviving old indices.
    pub fn remove_vertices(&self, removed: &Subset) -> (PrecedenceDag, Vec<usize>) {
        let keep: Vec<usize> = (0..self.n).filter(|&v| !removed.contains(v)).collect();
        let mut old_to_new = vec![usize::MAX; self.n];
        for (new, &old) in keep.iter().enumerate() {
            old_to_new[old] = new;
        }
        let arcs = self
            .arcs
            .iter()
            .filter(|(a, b)| !removed.contains(*a) && !removed.contains(*b))
            .map(|&(a, b)| (old_to_new[a], old_to_new[b]))
            .collect();
        (
            PrecedenceDag {
                n: keep.len(),
                arcs,
            },
            keep,
        )
    }
}

/// η = max{ f(R(v)) − f(R(v)∖{v}) : v ∈ V } and the smallest attaining
/// vertex. 2|V| oracle calls.
pub fn eta(f: &SetFunctionOracle, dag: &PrecedenceDag) -> Result<(Rational, usize), SfmError> {
    let n = f.size();
    if n == 0 || dag.n() != n {
        return Err(SfmError::InvalidArgument(
            "η needs a nonempty ground set matching the precedence graph".to_string(),
        ));
    }
    let mut best: Option<(Rational, usize)> = None;
    for v in 0..n {
        let r = dag.reachable_from(v);
        let marginal = f.eval(&r) - f.eval(&r.with_removed(v));
        match &best {
            Some((b, _)) if marginal <= *b => {}
            _ => best = Some((marginal, v)),
        }
    }
    Ok(best.unwrap())
}

/// Greedy base along an ordering consistent with the precedence graph.
/// The result satisfies x(v) ≤ f(R(v)) − f(R(v)∖{v}) componentwise, which
/// is asserted here (2n oracle calls, typically cached).
pub fn consistent_extreme_base(
    f: &SetFunctionOracle,
    dag: &PrecedenceDag,
) -> Result<ExtremeBase, SfmError> {
    let order = dag.reverse_topological_order()?;
    let ordering = LinearOrdering::new(order)
        .map_err(|e| SfmError::InternalInvariant(format!("bad topological order: {e}")))?;
    let base = greedy_extreme_base(f, ordering);
    for v in 0..f.size() {
        let r = dag.reachable_from(v);
        let bound = f.eval(&r) - f.eval(&r.with_removed(v));
        if base.y()[v] > bound {
            return Err(SfmError::InternalInvariant(format!(
                "consistent base exceeds its marginal bound at vertex {v}"
            )));
        }
    }
    Ok(base)
}

#[derive(Debug)]
pub struct FixOutcome {
    /// Vertex with the most negative final x(w); it belongs to every
    /// minimizer of the function the procedure ran on.
    pub fixed_vertex: usize,
    pub final_x: Vec<Rational>,
    pub delta_final: Rational,
    pub stats: LoopStats,
}

/// Bounded run of the scaling loop that pins an element of every minimizer.
///
/// Preconditions: all components of `start` are at most η, and some set Y
/// has f(Y) ≤ −η/2. Starting from δ = η, phases run until δ < (η/2)/n³;
/// then some vertex satisfies x(w) < −n²δ and is returned (most negative
/// first, ties to the smallest index).
pub fn fix(
    f: &SetFunctionOracle,
    start: ExtremeBase,
    eta_value: &Rational,
    trace: Option<&mut dyn FnMut(TraceEvent)>,
) -> Result<FixOutcome, SfmError> {
    let n = f.size();
    if n == 0 {
        return Err(SfmError::InvalidArgument(
            "cannot fix over an empty ground set".to_string(),
        ));
    }
    if !eta_value.is_positive() {
        return Err(SfmError::InvalidArgument("η must be positive".to_string()));
    }
    if start.y().iter().any(|y| y > eta_value) {
        return Err(SfmError::PreconditionViolation(
            "starting base has a component above η".to_string(),
        ));
    }
    // threshold κ/n³ with κ = η/2
    let n_cubed = Rational::from_integer(BigInt::from((n * n * n) as u64));
    let threshold = eta_value / (rat_int(2) * n_cubed);
    let outcome = run_scaling_loop(f, start, eta_value.clone(), threshold, trace)?;

    let n_sq_delta = rat_int((n * n) as i64) * &outcome.delta_final;
    let cutoff = -n_sq_delta;
    let mut best: Option<usize> = None;
    let x = outcome.combination.x();
    for v in 0..n {
        if x[v] < cutoff && best.map_or(true, |b| x[v] < x[b]) {
            best = Some(v);
        }
    }
    let fixed_vertex = best.ok_or_else(|| {
        SfmError::PreconditionViolation(
            "no vertex ended below −n²δ; the f(Y) ≤ −η/2 guarantee did not hold".to_string(),
        )
    })?;
    Ok(FixOutcome {
        fixed_vertex,
        final_x: x.to_vec(),
        delta_final: outcome.delta_final,
        stats: outcome.stats,
    })
}

/// Hooks for auditing a strong solve from the outside. The acceptance suite
/// uses them to cross-check every fixed element and every recorded pair
/// against exhaustive enumeration; errors abort the solve.
pub trait StrongObserver {
    /// `w` (in g's index space) was just pinned by the fixing procedure run
    /// on `g`.
    fn on_fix(&mut self, g: &SetFunctionOracle, w: usize) -> Result<(), SfmError> {
        let _ = (g, w);
        Ok(())
    }

    /// Arc (u, w) was recorded for the current function `g`.
    fn on_arc_added(
        &mut self,
        g: &SetFunctionOracle,
        u: usize,
        w: usize,
    ) -> Result<(), SfmError> {
        let _ = (g, u, w);
        Ok(())
    }

    /// A consistent extreme base was produced for `g` under `dag`.
    fn on_consistent_base(
        &mut self,
        g: &SetFunctionOracle,
        dag: &PrecedenceDag,
        base: &ExtremeBase,
    ) -> Result<(), SfmError> {
        let _ = (g, dag, base);
        Ok(())
    }
}

pub fn strong_sfm(f: &SetFunctionOracle) -> Result<SfmResult, SfmError> {
    strong_sfm_with(f, None, None)
}

pub fn strong_sfm_with(
    f: &SetFunctionOracle,
    mut observer: Option<&mut dyn StrongObserver>,
    mut trace: Option<&mut dyn FnMut(TraceEvent)>,
) -> Result<SfmResult, SfmError> {
    let n_orig = f.size();
    if n_orig == 0 {
        return Err(SfmError::InvalidInput(
            "cannot minimize over an empty ground set".to_string(),
        ));
    }
    let calls_before = f.calls();
    let fix_call_bound = (n_orig * n_orig) as u64;

    let mut view = f.clone();
    let mut dag = PrecedenceDag::new(n_orig);
    let mut represents: Vec<Subset> = (0..n_orig).map(|v| Subset::singleton(n_orig, v)).collect();
    let mut fixed = Subset::empty(n_orig);
    let mut loop_stats = LoopStats::default();
    let mut fix_calls: u64 = 0;

    while view.size() > 0 {
        let (clamped, _was_clamped) = view.clamp_top();
        view = clamped;
        let (eta_value, u) = eta(&view, &dag)?;
        if !eta_value.is_positive() {
            break;
        }
        let half_eta = &eta_value / rat_int(2);
        let r_u = dag.reachable_from(u);
        let f_r_u = view.eval(&r_u);

        if f_r_u >= half_eta {
            // pin an element of every minimizer of the restriction above R(u)
            let sub = view.restrict_above(&r_u)?;
            if sub.size() == 0 {
                return Err(SfmError::InternalInvariant(
                    "restriction above R(u) is empty although f(R(u)) > 0".to_string(),
                ));
            }
            let (sub_dag, keep) = dag.remove_vertices(&r_u);
            let start = consistent_extreme_base(&sub, &sub_dag)?;
            if let Some(obs) = observer.as_mut() {
                obs.on_consistent_base(&sub, &sub_dag, &start)?;
            }
            let outcome = fix(&sub, start, &eta_value, reborrow(&mut trace))?;
            fix_calls += 1;
            if fix_calls > fix_call_bound {
                return Err(SfmError::InternalInvariant(format!(
                    "more than n² = {fix_call_bound} fixing rounds"
                )));
            }
            loop_stats.absorb(&outcome.stats);
            if let Some(obs) = observer.as_mut() {
                obs.on_fix(&sub, outcome.fixed_vertex)?;
            }
            let w = keep[outcome.fixed_vertex];
            if dag.reachable_from(w).contains(u) {
                // the pair (u, w) closes a cycle: merge everything on the
                // w → … → u paths into one vertex
                let r_w = dag.reachable_from(w);
                let mut component = Subset::empty(dag.n());
                for v in r_w.iter() {
                    if dag.reachable_from(v).contains(u) {
                        component.insert(v);
                    }
                }
                let (new_dag, groups) = dag.contract(&component, (u, w))?;
                let mut new_represents = Vec::with_capacity(groups.len());
                for g in &groups {
                    let mut merged = Subset::empty(n_orig);
                    for v in g.iter() {
                        merged = merged.union(&represents[v]);
                    }
                    new_represents.push(merged);
                }
                view = view.contract_groups(groups)?;
                dag = new_dag;
                represents = new_represents;
            } else {
                dag.add_arc(u, w)?;
                if let Some(obs) = observer.as_mut() {
                    obs.on_arc_added(&view, u, w)?;
                }
            }
        } else {
            // η > 0 forces f(R(u)∖{u}) = f(R(u)) − η < −η/2 here
            let f_below = view.eval(&r_u.with_removed(u));
            if f_below >= -&half_eta {
                return Err(SfmError::InternalInvariant(
                    "neither branch guarantee holds; η computation is wrong".to_string(),
                ));
            }
            let start = consistent_extreme_base(&view, &dag)?;
            if let Some(obs) = observer.as_mut() {
                obs.on_consistent_base(&view, &dag, &start)?;
            }
            let outcome = fix(&view, start, &eta_value, reborrow(&mut trace))?;
            fix_calls += 1;
            if fix_calls > fix_call_bound {
                return Err(SfmError::InternalInvariant(format!(
                    "more than n² = {fix_call_bound} fixing rounds"
                )));
            }
            loop_stats.absorb(&outcome.stats);
            if let Some(obs) = observer.as_mut() {
                obs.on_fix(&view, outcome.fixed_vertex)?;
            }
            // every minimizer of the current function contains R(w)
            let r_w = dag.reachable_from(outcome.fixed_vertex);
            for v in r_w.iter() {
                fixed = fixed.union(&represents[v]);
            }
            view = view.restrict_above(&r_w)?;
            let (new_dag, keep) = dag.remove_vertices(&r_w);
            represents = keep.iter().map(|&old| represents[old].clone()).collect();
            dag = new_dag;
        }
    }

    if view.size() > 0 {
        let full = Subset::full(view.size());
        if view.eval(&full).is_negative() {
            for r in &represents {
                fixed = fixed.union(r);
            }
        }
    }

    let min_normalized = f.eval(&fixed);
    Ok(SfmResult {
        minimizer_labels: f.ground().subset_labels(&fixed),
        minimizer: fixed,
        value: min_normalized + f.offset(),
        gap: None,
        certificate: None,
        stats: SolveStats {
            oracle_calls: f.calls() - calls_before,
            fix_calls,
            bound_m: None,
            loop_stats,
        },
    })
}

fn reborrow<'s>(
    t: &'s mut Option<&mut dyn FnMut(TraceEvent)>,
) -> Option<&'s mut dyn FnMut(TraceEvent)> {
    match t {
        Some(x) => Some(&mut **x),
        None => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::FunctionFamily;
    use crate::verify::brute_force_min;

    fn table(labels: &[&str], values: &[i64]) -> SetFunctionOracle {
        FunctionFamily::ExplicitTable {
            labels: labels.iter().map(|s| s.to_string()).collect(),
            values: values.iter().map(|&v| rat_int(v)).collect(),
        }
        .build_oracle()
        .unwrap()
    }

    #[test]
    fn reachability_includes_self_and_follows_arcs() {
        let mut dag = PrecedenceDag::new(3);
        dag.add_arc(2, 1).unwrap();
        dag.add_arc(1, 0).unwrap();
        assert_eq!(dag.reachable_from(2).to_indices(), vec![0, 1, 2]);
        assert_eq!(dag.reachable_from(1).to_indices(), vec![0, 1]);
        assert_eq!(dag.reachable_from(0).to_indices(), vec![0]);
    }

    #[test]
    fn arc_insertion_rejects_cycles() {
        let mut dag = PrecedenceDag::new(2);
        dag.add_arc(0, 1).unwrap();
        assert!(dag.add_arc(1, 0).is_err());
        assert!(dag.add_arc(0, 0).is_err());
    }

    #[test]
    fn reverse_topological_order_puts_heads_first() {
        let mut dag = PrecedenceDag::new(2);
        dag.add_arc(1, 0).unwrap(); // choosing 1 forces 0
        assert_eq!(dag.reverse_topological_order().unwrap(), vec![0, 1]);

        let mut chain = PrecedenceDag::new(3);
        chain.add_arc(2, 1).unwrap();
        chain.add_arc(1, 0).unwrap();
        assert_eq!(chain.reverse_topological_order().unwrap(), vec![0, 1, 2]);

        let empty = PrecedenceDag::new(3);
        assert_eq!(empty.reverse_topological_order().unwrap(), vec![0, 1, 2]);
    }

    #[test]
    fn contraction_merges_two_cycle() {
        let mut dag = PrecedenceDag::new(2);
        dag.add_arc(1, 0).unwrap();
        // adding (0, 1) would close the cycle {0, 1}
        let comp = Subset::from_indices(2, [0, 1]);
        let (contracted, groups) = dag.contract(&comp, (0, 1)).unwrap();
        assert_eq!(contracted.n(), 1);
        assert!(contracted.arcs().is_empty());
        assert_eq!(groups, vec![Subset::from_indices(2, [0, 1])]);
    }

    #[test]
    fn contraction_merges_three_cycle_and_validates_component() {
        let mut dag = PrecedenceDag::new(3);
        dag.add_arc(0, 1).unwrap();
        dag.add_arc(1, 2).unwrap();
        // closing arc (2, 0) makes {0,1,2} strongly connected
        let comp = Subset::full(3);
        let (contracted, groups) = dag.contract(&comp, (2, 0)).unwrap();
        assert_eq!(contracted.n(), 1);
        assert_eq!(groups.len(), 1);
        // a wrong component is rejected
        let wrong = Subset::from_indices(3, [0, 1]);
        assert!(dag.contract(&wrong, (2, 0)).is_err());
    }

    #[test]
    fn eta_without_arcs_scans_singletons() {
        let f = table(&["a", "b"], &[0, -1, 2, 1]);
        let dag = PrecedenceDag::new(2);
        let (value, u) = eta(&f, &dag).unwrap();
        assert_eq!(value, rat_int(2));
        assert_eq!(u, 1);
    }

    #[test]
    fn eta_follows_reachability_through_arcs() {
        let f = table(&["a", "b"], &[0, -1, 2, 1]);
        let (clamped, was) = f.clamp_top();
        assert!(was);
        let mut dag = PrecedenceDag::new(2);
        dag.add_arc(1, 0).unwrap();
        // R(a) = {a}: marginal −1; R(b) = {a,b}: f(V) − f({a}) = 0 + 1 = 1
        let (value, u) = eta(&clamped, &dag).unwrap();
        assert_eq!(value, rat_int(1));
        assert_eq!(u, 1);
    }

    #[test]
    fn eta_on_modular_function_is_max_weight() {
        let f = FunctionFamily::ConcaveCardinality {
            labels: vec!["a".into(), "b".into(), "c".into()],
            g: vec![rat_int(0); 4],
            w: vec![rat_int(3), rat_int(-2), rat_int(5)],
        }
        .build_oracle()
        .unwrap();
        let (value, u) = eta(&f, &PrecedenceDag::new(3)).unwrap();
        assert_eq!(value, rat_int(5));
        assert_eq!(u, 2);
    }

    #[test]
    fn consistent_base_respects_chain() {
        let f = table(&["a", "b"], &[0, -1, 2, 1]);
        let mut dag = PrecedenceDag::new(2);
        dag.add_arc(1, 0).unwrap();
        let base = consistent_extreme_base(&f, &dag).unwrap();
        assert_eq!(base.ordering().as_slice(), &[0, 1]);
        assert_eq!(base.y(), &[rat_int(-1), rat_int(2)]);
    }

    #[test]
    fn fix_on_single_negative_element() {
        let f = table(&["a"], &[0, -1]);
        let start = greedy_extreme_base(&f, LinearOrdering::identity(1));
        let out = fix(&f, start, &rat_int(2), None).unwrap();
        assert_eq!(out.fixed_vertex, 0);
        assert_eq!(out.final_x, vec![rat_int(-1)]);
    }

    #[test]
    fn fix_on_clamped_two_element_table() {
        let f = table(&["a", "b"], &[0, -1, 2, 0]);
        let start = greedy_extreme_base(&f, LinearOrdering::identity(2));
        // components −1, 1 are within η = 1; f({a}) = −1 ≤ −η/2
        let out = fix(&f, start, &rat_int(1), None).unwrap();
        assert_eq!(out.fixed_vertex, 0, "a is the unique minimizer element");
    }

    #[test]
    fn fix_rejects_bad_preconditions() {
        let f = table(&["a"], &[0, -1]);
        let start = greedy_extreme_base(&f, LinearOrdering::identity(1));
        assert!(fix(&f, start.clone(), &rat_int(0), None).is_err());
        // nonnegative function: the f(Y) ≤ −κ guarantee cannot hold
        let g = table(&["a"], &[0, 2]);
        let sg = greedy_extreme_base(&g, LinearOrdering::identity(1));
        assert!(matches!(
            fix(&g, sg, &rat_int(2), None),
            Err(SfmError::PreconditionViolation(_))
        ));
    }

    #[test]
    fn strong_solves_two_element_table() {
        // walkthrough: clamp f(V) to 0; η = 2 at b; f({b}) = 2 ≥ 1 pins a and
        // records (b, a); next round η = 1 at b, f(R(b)) = 0 < 1/2, so the
        // second fixing round pins {a} for good; the leftover {b} stops at
        // η ≤ 0 with f(V') = 0.
        let f = table(&["a", "b"], &[0, -1, 2, 1]);
        let r = strong_sfm(&f).unwrap();
        assert_eq!(r.minimizer_labels, vec!["a".to_string()]);
        assert_eq!(r.value, rat_int(-1));
        assert!(r.certificate.is_none());
        assert_eq!(r.stats.fix_calls, 2);
    }

    #[test]
    fn strong_records_the_compatibility_arc_from_the_walkthrough() {
        struct ArcLog(Vec<(usize, usize)>);
        impl StrongObserver for ArcLog {
            fn on_arc_added(
                &mut self,
                _g: &SetFunctionOracle,
                u: usize,
                w: usize,
            ) -> Result<(), SfmError> {
                self.0.push((u, w));
                Ok(())
            }
        }
        let f = table(&["a", "b"], &[0, -1, 2, 1]);
        let mut log = ArcLog(Vec::new());
        let r = strong_sfm_with(&f, Some(&mut log), None).unwrap();
        assert_eq!(r.value, rat_int(-1));
        assert_eq!(log.0, vec![(1, 0)], "the first round records (b, a)");
    }

    #[test]
    fn strong_returns_empty_for_positive_functions() {
        // f(X) = |X| has minimum 0; the clamp rule reports ∅
        let f = FunctionFamily::ConcaveCardinality {
            labels: vec!["a".into(), "b".into()],
            g: vec![rat_int(0), rat_int(1), rat_int(2)],
            w: vec![rat_int(0), rat_int(0)],
        }
        .build_oracle()
        .unwrap();
        let r = strong_sfm(&f).unwrap();
        assert!(r.minimizer.is_empty());
        assert_eq!(r.value, rat_int(0));
    }

    #[test]
    fn strong_takes_everything_for_decreasing_modular() {
        let f = FunctionFamily::ConcaveCardinality {
            labels: vec!["a".into(), "b".into(), "c".into()],
            g: vec![rat_int(0), rat_int(-1), rat_int(-2), rat_int(-3)],
            w: vec![rat_int(0); 3],
        }
        .build_oracle()
        .unwrap();
        let r = strong_sfm(&f).unwrap();
        assert_eq!(r.minimizer, Subset::full(3));
        assert_eq!(r.value, rat_int(-3));
    }

    #[test]
    fn strong_agrees_with_brute_force_on_fixed_tables() {
        let cases: Vec<(Vec<&str>, Vec<i64>)> = vec![
            (vec!["a", "b"], vec![0, -1, 2, 1]),
            (vec!["a", "b"], vec![0, 1, 1, 0]),
            (vec!["a", "b"], vec![0, -2, -1, -3]),
            (vec!["a", "b", "c"], vec![0, -2, 3, 1, 1, -1, 4, 2]),
        ];
        for (labels, values) in cases {
            let f = table(&labels, &values);
            let expect = brute_force_min(&f).unwrap();
            let got = strong_sfm(&f).unwrap();
            assert_eq!(got.value, expect.value, "table {values:?}");
            assert_eq!(f.eval(&got.minimizer), expect.value);
        }
    }

    #[test]
    fn strong_handles_rational_values_natively() {
        let f = FunctionFamily::ExplicitTable {
            labels: vec!["a".into(), "b".into()],
            values: vec![
                rat_int(0),
                crate::rational::rat(-1, 2),
                rat_int(1),
                crate::rational::rat(1, 2),
            ],
        }
        .build_oracle()
        .unwrap();
        let r = strong_sfm(&f).unwrap();
        assert_eq!(r.minimizer_labels, vec!["a".to_string()]);
        assert_eq!(r.value, crate::rational::rat(-1, 2));
    }
}
