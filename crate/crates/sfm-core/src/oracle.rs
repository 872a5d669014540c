//! Evaluation oracles for submodular set functions.
//!
//! An oracle maps subsets of a finite ground set to exact rationals. After
//! construction f(∅) = 0 holds exactly: any nonzero value of the raw function
//! at ∅ is recorded as an offset and subtracted from every evaluation. The
//! call counter counts underlying evaluations (cache hits are free), which is
//! the quantity the oracle-complexity bounds are stated in.

use crate::base::LinearOrdering;
use crate::error::SfmError;
use crate::rational::{rat_int, Rational};
use crate::subset::Subset;
use lru::LruCache;
use num_traits::{Signed, Zero};
use std::num::NonZeroUsize;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};

pub const DEFAULT_CACHE_CAPACITY: usize = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundSet {
    labels: Vec<String>,
}

impl GroundSet {
    pub fn new(labels: Vec<String>) -> Result<GroundSet, SfmError> {
        if labels.is_empty() {
            return Err(SfmError::InvalidInput(
                "ground set must have at least one element".to_string(),
            ));
        }
        GroundSet::allow_empty(labels)
    }

    /// Restrictions may leave no elements behind; everything else goes
    /// through `new`, which rejects the empty ground set.
    pub(crate) fn allow_empty(labels: Vec<String>) -> Result<GroundSet, SfmError> {
        let mut seen = std::collections::HashSet::new();
        for l in &labels {
            if !seen.insert(l.clone()) {
                return Err(SfmError::InvalidInput(format!("duplicate label {l:?}")));
            }
        }
        Ok(GroundSet { labels })
    }

    pub fn with_default_labels(n: usize) -> Result<GroundSet, SfmError> {
        GroundSet::new((0..n).map(|i| format!("v{i}")).collect())
    }

    pub fn size(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn subset_labels(&self, s: &Subset) -> Vec<String> {
        s.iter().map(|i| self.labels[i].clone()).collect()
    }
}

type EvalHook = Box<dyn Fn(&Subset) -> Rational + Send + Sync>;

struct OracleInner {
    ground: GroundSet,
    hook: EvalHook,
    /// Raw value of the underlying function at ∅, subtracted on every eval.
    offset: Rational,
    /// Shared with every view derived from this oracle.
    counter: Arc<AtomicU64>,
    /// Views do not count: the root they delegate to already does.
    counts: bool,
    cache: Option<Mutex<LruCache<Subset, Rational>>>,
}

/// Cheaply cloneable handle to an immutable oracle. The counter and the memo
/// cache are interior-mutable and safe under concurrent access.
#[derive(Clone)]
pub struct SetFunctionOracle {
    inner: Arc<OracleInner>,
}

impl std::fmt::Debug for SetFunctionOracle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SetFunctionOracle")
            .field("n", &self.size())
            .field("offset", &self.inner.offset)
            .field("calls", &self.calls())
            .finish()
    }
}

fn new_cache(capacity: usize) -> Option<Mutex<LruCache<Subset, Rational>>> {
    NonZeroUsize::new(capacity).map(|c| Mutex::new(LruCache::new(c)))
}

impl SetFunctionOracle {
    /// Wraps a raw evaluation hook, normalizing so that f(∅) = 0. Costs one
    /// oracle call for the value at ∅.
    pub fn from_hook<F>(ground: GroundSet, hook: F) -> SetFunctionOracle
    where
        F: Fn(&Subset) -> Rational + Send + Sync + 'static,
    {
        SetFunctionOracle::build(ground, Box::new(hook), true, None, DEFAULT_CACHE_CAPACITY)
    }

    pub fn from_hook_uncached<F>(ground: GroundSet, hook: F) -> SetFunctionOracle
    where
        F: Fn(&Subset) -> Rational + Send + Sync + 'static,
    {
        SetFunctionOracle::build(ground, Box::new(hook), true, None, 0)
    }

    fn build(
        ground: GroundSet,
        hook: EvalHook,
        counts: bool,
        counter: Option<Arc<AtomicU64>>,
        cache_capacity: usize,
    ) -> SetFunctionOracle {
        let counter = counter.unwrap_or_default();
        let empty = Subset::empty(ground.size());
        let offset = (hook)(&empty);
        if counts {
            counter.fetch_add(1, Ordering::SeqCst);
        }
        let cache = new_cache(cache_capacity);
        if let Some(c) = &cache {
            c.lock().unwrap().put(empty, Rational::zero());
        }
        SetFunctionOracle {
            inner: Arc::new(OracleInner {
                ground,
                hook,
                offset,
                counter,
                counts,
                cache,
            }),
        }
    }

    /// Derived view sharing the parent's counter; evaluations delegate, so
    /// the view itself never increments.
    fn view<F>(&self, ground: GroundSet, hook: F) -> SetFunctionOracle
    where
        F: Fn(&Subset) -> Rational + Send + Sync + 'static,
    {
        SetFunctionOracle::build(
            ground,
            Box::new(hook),
            false,
            Some(self.inner.counter.clone()),
            DEFAULT_CACHE_CAPACITY,
        )
    }

    pub fn ground(&self) -> &GroundSet {
        &self.inner.ground
    }

    pub fn size(&self) -> usize {
        self.inner.ground.size()
    }

    /// Number of underlying oracle evaluations so far (cache misses only).
    pub fn calls(&self) -> u64 {
        self.inner.counter.load(Ordering::SeqCst)
    }

    /// Raw value of the underlying function at ∅ (zero unless the input
    /// needed normalizing). Reported minima add this back.
    pub fn offset(&self) -> &Rational {
        &self.inner.offset
    }

    /// Validating evaluation; the subset must lie inside the ground set.
    pub fn evaluate(&self, x: &Subset) -> Result<Rational, SfmError> {
        x.validate(self.size())?;
        Ok(self.eval(x))
    }

    /// Internal evaluation on subsets the solver constructed itself.
    pub(crate) fn eval(&self, x: &Subset) -> Rational {
        debug_assert!(x.validate(self.size()).is_ok());
        if let Some(cache) = &self.inner.cache {
            if let Some(v) = cache.lock().unwrap().get(x) {
                return v.clone();
            }
        }
        let val = self.eval_nocache(x);
        if let Some(cache) = &self.inner.cache {
            cache.lock().unwrap().put(x.clone(), val.clone());
        }
        val
    }

    /// Evaluation bypassing the memo cache (still counted). Exhaustive
    /// enumerations never revisit a subset, so they skip cache traffic.
    pub(crate) fn eval_nocache(&self, x: &Subset) -> Rational {
        let raw = (self.inner.hook)(x);
        if self.inner.counts {
            self.inner.counter.fetch_add(1, Ordering::SeqCst);
        }
        raw - &self.inner.offset
    }

    /// Restriction above `r`: an oracle g on V∖r with
    /// g(X) = f(X ∪ r) − f(r), reindexed to 0..|V∖r|.
    /// Call counting delegates to this oracle's counter.
    pub fn restrict_above(&self, r: &Subset) -> Result<SetFunctionOracle, SfmError> {
        r.validate(self.size())?;
        let parent = self.clone();
        let keep: Vec<usize> = (0..self.size()).filter(|i| !r.contains(*i)).collect();
        let labels = keep
            .iter()
            .map(|&i| self.ground().label(i).to_string())
            .collect();
        let ground = GroundSet::allow_empty(labels)?;
        let r = r.clone();
        let parent_n = self.size();
        Ok(self.view(ground, move |x: &Subset| {
            let mut lifted = r.clone();
            for i in x.iter() {
                lifted.insert(keep[i]);
            }
            debug_assert!(lifted.validate(parent_n).is_ok());
            parent.eval(&lifted) - parent.eval(&r)
        }))
    }

    /// Replaces the value at the full ground set by zero when it is positive.
    /// Returns the (possibly unchanged) oracle and whether clamping happened.
    pub fn clamp_top(&self) -> (SetFunctionOracle, bool) {
        let full = Subset::full(self.size());
        if !self.eval(&full).is_positive() {
            return (self.clone(), false);
        }
        let parent = self.clone();
        let ground = self.ground().clone();
        let clamped = self.view(ground, move |x: &Subset| {
            if *x == full {
                Rational::zero()
            } else {
                parent.eval(x)
            }
        });
        (clamped, true)
    }

    /// Merges groups of elements into single vertices. `groups` must
    /// partition the current ground set; group k becomes vertex k of the new
    /// oracle, labelled by its smallest member's label. Evaluation expands
    /// each vertex to the union of its members.
    pub fn contract_groups(&self, groups: Vec<Subset>) -> Result<SetFunctionOracle, SfmError> {
        let n = self.size();
        let mut seen = Subset::empty(n);
        for g in &groups {
            g.validate(n)?;
            if g.is_empty() {
                return Err(SfmError::InvalidArgument(
                    "empty contraction group".to_string(),
                ));
            }
            if seen.intersects(g) {
                return Err(SfmError::InvalidArgument(
                    "contraction groups overlap".to_string(),
                ));
            }
            seen = seen.union(g);
        }
        if seen.len() != n {
            return Err(SfmError::InvalidArgument(
                "contraction groups must cover the ground set".to_string(),
            ));
        }
        let labels = groups
            .iter()
            .map(|g| self.ground().label(g.iter().next().unwrap()).to_string())
            .collect();
        let ground = GroundSet::new(labels)?;
        let parent = self.clone();
        Ok(self.view(ground, move |x: &Subset| {
            let mut expanded = Subset::empty(n);
            for v in x.iter() {
                expanded = expanded.union(&groups[v]);
            }
            parent.eval(&expanded)
        }))
    }

    /// Same function times a positive factor; used to run the scaling solver
    /// on (1/ε)·f for rational-valued inputs with value gap at least ε.
    pub fn scale(&self, factor: Rational) -> Result<SetFunctionOracle, SfmError> {
        if !factor.is_positive() {
            return Err(SfmError::InvalidArgument(
                "scale factor must be positive".to_string(),
            ));
        }
        let parent = self.clone();
        let ground = self.ground().clone();
        Ok(self.view(ground, move |x: &Subset| parent.eval(x) * &factor))
    }
}

/// Upper bound M on |f(X)| over all X, computed from the extreme base y
/// generated by `ordering`: M = max{ |y⁻(V)|, Σ_v max{0, f({v})} }.
/// Uses O(n) oracle calls.
pub fn upper_bound_m(f: &SetFunctionOracle, ordering: &LinearOrdering) -> Rational {
    let n = f.size();
    let mut neg_total = Rational::zero();
    let mut prefix = Subset::empty(n);
    let mut prev = Rational::zero();
    for k in 0..n {
        let v = ordering.vertex_at(k);
        prefix.insert(v);
        let cur = f.eval(&prefix);
        let y_v = &cur - &prev;
        if y_v.is_negative() {
            neg_total += y_v;
        }
        prev = cur;
    }
    let mut pos_singletons = Rational::zero();
    for v in 0..n {
        let fv = f.eval(&Subset::singleton(n, v));
        if fv.is_positive() {
            pos_singletons += fv;
        }
    }
    let neg_abs = neg_total.abs();
    if neg_abs > pos_singletons {
        neg_abs
    } else {
        pos_singletons
    }
}

/// Built-in function families, each submodular by construction.
#[derive(Debug, Clone, PartialEq)]
pub enum FunctionFamily {
    /// All 2ⁿ values listed; index i encodes the bitmask of the subset.
    ExplicitTable {
        labels: Vec<String>,
        values: Vec<Rational>,
    },
    /// f(X) = total capacity of edges leaving X (directed) or crossing X
    /// (undirected). Capacities must be nonnegative.
    Cut {
        labels: Vec<String>,
        directed: bool,
        edges: Vec<(usize, usize, Rational)>,
    },
    /// f(X) = weight of the items covered by X minus the total cost of X.
    /// Item weights must be nonnegative.
    Coverage {
        labels: Vec<String>,
        item_weights: Vec<Rational>,
        covers: Vec<Vec<usize>>,
        costs: Vec<Rational>,
    },
    /// Partition matroid rank: f(X) = Σ_j min{|X ∩ block_j|, cap_j}.
    MatroidRank {
        labels: Vec<String>,
        blocks: Vec<Vec<usize>>,
        caps: Vec<u64>,
    },
    /// f(X) = g(|X|) + w(X) with g concave and g(0) = 0.
    ConcaveCardinality {
        labels: Vec<String>,
        g: Vec<Rational>,
        w: Vec<Rational>,
    },
}

pub const TABLE_VALIDATION_LIMIT: usize = 16;

impl FunctionFamily {
    pub fn labels(&self) -> &[String] {
        match self {
            FunctionFamily::ExplicitTable { labels, .. }
            | FunctionFamily::Cut { labels, .. }
            | FunctionFamily::Coverage { labels, .. }
            | FunctionFamily::MatroidRank { labels, .. }
            | FunctionFamily::ConcaveCardinality { labels, .. } => labels,
        }
    }

    pub fn size(&self) -> usize {
        self.labels().len()
    }

    /// True when every value the function can take is an integer. Sums and
    /// differences of the instance's integer data stay integral, so this is
    /// decidable from the data alone.
    pub fn is_integer_valued(&self) -> bool {
        let all_int = |vs: &[Rational]| vs.iter().all(|v| v.is_integer());
        match self {
            FunctionFamily::ExplicitTable { values, .. } => all_int(values),
            FunctionFamily::Cut { edges, .. } => edges.iter().all(|(_, _, c)| c.is_integer()),
            FunctionFamily::Coverage {
                item_weights,
                costs,
                ..
            } => all_int(item_weights) && all_int(costs),
            FunctionFamily::MatroidRank { .. } => true,
            FunctionFamily::ConcaveCardinality { g, w, .. } => all_int(g) && all_int(w),
        }
    }

    pub fn validate(&self) -> Result<(), SfmError> {
        let n = self.size();
        let _ = GroundSet::new(self.labels().to_vec())?;
        match self {
            FunctionFamily::ExplicitTable { values, .. } => {
                if n > 30 {
                    return Err(SfmError::InvalidInput(
                        "explicit tables limited to 30 elements".to_string(),
                    ));
                }
                if values.len() != 1usize << n {
                    return Err(SfmError::InvalidInput(format!(
                        "table for {n} elements needs {} values, got {}",
                        1usize << n,
                        values.len()
                    )));
                }
                if n <= TABLE_VALIDATION_LIMIT {
                    validate_table_submodular(self.labels(), values)?;
                }
            }
            FunctionFamily::Cut { edges, .. } => {
                for (i, (u, v, cap)) in edges.iter().enumerate() {
                    if *u >= n || *v >= n {
                        return Err(SfmError::InvalidInput(format!(
                            "edge {i}: endpoint outside ground set"
                        )));
                    }
                    if u == v {
                        return Err(SfmError::InvalidInput(format!("edge {i}: self-loop")));
                    }
                    if cap.is_negative() {
                        return Err(SfmError::InvalidInput(format!(
                            "edge {i}: negative capacity"
                        )));
                    }
                }
            }
            FunctionFamily::Coverage {
                item_weights,
                covers,
                costs,
                ..
            } => {
                if covers.len() != n || costs.len() != n {
                    return Err(SfmError::InvalidInput(
                        "covers and costs must have one entry per element".to_string(),
                    ));
                }
                if item_weights.iter().any(|w| w.is_negative()) {
                    return Err(SfmError::InvalidInput(
                        "item weights must be nonnegative".to_string(),
                    ));
                }
                let k = item_weights.len();
                for (v, c) in covers.iter().enumerate() {
                    if c.iter().any(|&it| it >= k) {
                        return Err(SfmError::InvalidInput(format!(
                            "element {v} covers an unknown item"
                        )));
                    }
                }
            }
            FunctionFamily::MatroidRank { blocks, caps, .. } => {
                if blocks.len() != caps.len() {
                    return Err(SfmError::InvalidInput(
                        "one cap per block required".to_string(),
                    ));
                }
                let mut seen = vec![false; n];
                for (j, b) in blocks.iter().enumerate() {
                    for &e in b {
                        if e >= n {
                            return Err(SfmError::InvalidInput(format!(
                                "block {j}: element outside ground set"
                            )));
                        }
                        if seen[e] {
                            return Err(SfmError::InvalidInput(format!(
                                "element {e} appears in two blocks"
                            )));
                        }
                        seen[e] = true;
                    }
                }
            }
            FunctionFamily::ConcaveCardinality { g, w, .. } => {
                if g.len() != n + 1 {
                    return Err(SfmError::InvalidInput(format!(
                        "g must list n+1 = {} values",
                        n + 1
                    )));
                }
                if w.len() != n {
                    return Err(SfmError::InvalidInput(
                        "w must list one value per element".to_string(),
                    ));
                }
                if !g[0].is_zero() {
                    return Err(SfmError::InvalidInput("g(0) must be 0".to_string()));
                }
                for k in 2..g.len() {
                    let d_prev = &g[k - 1] - &g[k - 2];
                    let d_cur = &g[k] - &g[k - 1];
                    if d_cur > d_prev {
                        return Err(SfmError::InvalidInput(format!("g is not concave at {k}")));
                    }
                }
            }
        }
        Ok(())
    }

    /// Validates the instance and wraps it in a memoized, normalized oracle.
    pub fn build_oracle(&self) -> Result<SetFunctionOracle, SfmError> {
        self.validate()?;
        let ground = GroundSet::new(self.labels().to_vec())?;
        let hook: EvalHook = match self.clone() {
            FunctionFamily::ExplicitTable { values, .. } => Box::new(move |x: &Subset| {
                let mask = x.to_mask().expect("table ground sets fit in a mask");
                values[mask as usize].clone()
            }),
            FunctionFamily::Cut {
                directed, edges, ..
            } => Box::new(move |x: &Subset| {
                let mut total = Rational::zero();
                for (u, v, cap) in &edges {
                    let inside_u = x.contains(*u);
                    let inside_v = x.contains(*v);
                    let crossing = if directed {
                        inside_u && !inside_v
                    } else {
                        inside_u != inside_v
                    };
                    if crossing {
                        total += cap;
                    }
                }
                total
            }),
            FunctionFamily::Coverage {
                item_weights,
                covers,
                costs,
                ..
            } => Box::new(move |x: &Subset| {
                let mut covered = vec![false; item_weights.len()];
                let mut total = Rational::zero();
                for v in x.iter() {
                    for &item in &covers[v] {
                        covered[item] = true;
                    }
                    total -= &costs[v];
                }
                for (item, hit) in covered.iter().enumerate() {
                    if *hit {
                        total += &item_weights[item];
                    }
                }
                total
            }),
            FunctionFamily::MatroidRank { blocks, caps, .. } => Box::new(move |x: &Subset| {
                let mut rank = 0u64;
                for (b, cap) in blocks.iter().zip(caps.iter()) {
                    let hit = b.iter().filter(|&&e| x.contains(e)).count() as u64;
                    rank += hit.min(*cap);
                }
                rat_int(rank as i64)
            }),
            FunctionFamily::ConcaveCardinality { g, w, .. } => Box::new(move |x: &Subset| {
                let mut total = g[x.len()].clone();
                for v in x.iter() {
                    total += &w[v];
                }
                total
            }),
        };
        Ok(SetFunctionOracle::from_hook(ground, hook))
    }
}

/// Submodularity holds iff for every X and distinct u, v ∉ X:
/// f(X∪{u}) + f(X∪{v}) ≥ f(X∪{u,v}) + f(X). Checking this local condition
/// over all (X, u, v) costs O(2ⁿ·n²) table lookups instead of O(4ⁿ) pair
/// checks.
fn validate_table_submodular(labels: &[String], values: &[Rational]) -> Result<(), SfmError> {
    let n = labels.len();
    if let Some((x_mask, u, v)) = find_table_violation(n, values) {
        let show = |mask: u64| {
            let names: Vec<&str> = (0..n)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| labels[i].as_str())
                .collect();
            format!("{{{}}}", names.join(","))
        };
        return Err(SfmError::InvalidInput(format!(
            "submodularity violated at ({},{})",
            show(x_mask | 1 << u),
            show(x_mask | 1 << v)
        )));
    }
    Ok(())
}

fn check_masks_range(
    n: usize,
    values: &[Rational],
    range: std::ops::Range<u64>,
) -> Option<(u64, usize, usize)> {
    for x in range {
        for u in 0..n {
            if x >> u & 1 == 1 {
                continue;
            }
            let xu = x | 1 << u;
            for v in (u + 1)..n {
                if x >> v & 1 == 1 {
                    continue;
                }
                let xv = x | 1 << v;
                let xuv = xu | 1 << v;
                let lhs = &values[xu as usize] + &values[xv as usize];
                let rhs = &values[xuv as usize] + &values[x as usize];
                if lhs < rhs {
                    return Some((x, u, v));
                }
            }
        }
    }
    None
}

#[cfg(feature = "parallel")]
fn find_table_violation(n: usize, values: &[Rational]) -> Option<(u64, usize, usize)> {
    use rayon::prelude::*;
    let total = 1u64 << n;
    let chunk = 1u64 << 10;
    let starts: Vec<u64> = (0..total).step_by(chunk as usize).collect();
    starts
        .par_iter()
        .filter_map(|&s| check_masks_range(n, values, s..(s + chunk).min(total)))
        .min_by_key(|&(x, u, v)| (x, u, v))
}

#[cfg(not(feature = "parallel"))]
fn find_table_violation(n: usize, values: &[Rational]) -> Option<(u64, usize, usize)> {
    check_masks_range(n, values, 0..1u64 << n)
}
