//! Extreme bases of the base polyhedron B(f) and convex combinations of them.
//!
//! B(f) = { x : x(V) = f(V), x(X) ≤ f(X) for all X }. The greedy rule turns a
//! linear ordering L = (v_1, …, v_n) into the extreme base
//! y(v_i) = f(L(v_i)) − f(L(v_{i−1})). Each base carries its ordering and the
//! prefix values f(L(v_i)), so interchanging two consecutive vertices needs
//! exactly one fresh oracle call.

use crate::error::SfmError;
use crate::oracle::SetFunctionOracle;
use crate::rational::Rational;
use crate::subset::Subset;
use num_traits::{One, Signed, Zero};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearOrdering {
    perm: Vec<usize>,
    pos: Vec<usize>,
}

impl LinearOrdering {
    pub fn identity(n: usize) -> LinearOrdering {
        LinearOrdering {
            perm: (0..n).collect(),
            pos: (0..n).collect(),
        }
    }

    pub fn new(perm: Vec<usize>) -> Result<LinearOrdering, SfmError> {
        let n = perm.len();
        let mut pos = vec![usize::MAX; n];
        for (k, &v) in perm.iter().enumerate() {
            if v >= n || pos[v] != usize::MAX {
                return Err(SfmError::InvalidArgument(format!(
                    "{perm:?} is not a permutation"
                )));
            }
            pos[v] = k;
        }
        Ok(LinearOrdering { perm, pos })
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    /// Vertex at position k (0-indexed).
    pub fn vertex_at(&self, k: usize) -> usize {
        self.perm[k]
    }

    /// Position of vertex v.
    pub fn position_of(&self, v: usize) -> usize {
        self.pos[v]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.perm
    }

    /// Prefix set {perm[0], …, perm[k]}.
    pub fn prefix_through(&self, k: usize) -> Subset {
        Subset::from_indices(self.len(), self.perm[..=k].iter().copied())
    }

    fn swap_positions(&mut self, a: usize, b: usize) {
        self.perm.swap(a, b);
        self.pos[self.perm[a]] = a;
        self.pos[self.perm[b]] = b;
    }
}

/// An extreme base together with the ordering that generates it and the
/// cached prefix values f(L(v_i)).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtremeBase {
    ordering: LinearOrdering,
    y: Vec<Rational>,
    prefix: Vec<Rational>,
}

impl ExtremeBase {
    pub fn ordering(&self) -> &LinearOrdering {
        &self.ordering
    }

    /// Component vector indexed by vertex.
    pub fn y(&self) -> &[Rational] {
        &self.y
    }

    pub fn prefix_values(&self) -> &[Rational] {
        &self.prefix
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    /// Re-derives the base from its ordering and compares; n oracle calls.
    pub fn verify_tight(&self, f: &SetFunctionOracle) -> bool {
        *self == greedy_extreme_base(f, self.ordering.clone())
    }

    /// Multiplies the base through by a positive factor. Greedy commutes
    /// with positive scaling, so the result is the extreme base of the same
    /// ordering for the scaled function.
    pub(crate) fn scale_values(&mut self, factor: &Rational) {
        for y in &mut self.y {
            *y *= factor;
        }
        for p in &mut self.prefix {
            *p *= factor;
        }
    }
}

/// Runs Edmonds' greedy rule along `ordering`; exactly n oracle calls.
pub fn greedy_extreme_base(f: &SetFunctionOracle, ordering: LinearOrdering) -> ExtremeBase {
    let n = f.size();
    debug_assert_eq!(ordering.len(), n);
    let mut y = vec![Rational::zero(); n];
    let mut prefix = Vec::with_capacity(n);
    let mut set = Subset::empty(n);
    let mut prev = Rational::zero();
    for k in 0..n {
        let v = ordering.vertex_at(k);
        set.insert(v);
        let cur = f.eval(&set);
        y[v] = &cur - &prev;
        prefix.push(cur.clone());
        prev = cur;
    }
    ExtremeBase {
        ordering,
        y,
        prefix,
    }
}

/// Exchange capacity c̃(y, u, v) for the consecutive pair at positions
/// (k−1, k) of the base's ordering, where v = perm[k−1] and u = perm[k]:
///
///   β = f(L(u)∖{v}) − f(L(u)) + y(v)
///
/// One fresh oracle call; f(L(u)) comes from the cached prefix values.
pub fn exchange_capacity_consecutive(
    f: &SetFunctionOracle,
    base: &ExtremeBase,
    k: usize,
) -> Result<Rational, SfmError> {
    let n = base.n();
    if k == 0 || k >= n {
        return Err(SfmError::InvalidArgument(format!(
            "position {k} out of range 1..{n}"
        )));
    }
    let v = base.ordering.vertex_at(k - 1);
    let prefix_minus_v = base.ordering.prefix_through(k).with_removed(v);
    let beta = f.eval(&prefix_minus_v) - &base.prefix[k] + &base.y[v];
    debug_assert!(!beta.is_negative(), "exchange capacity must be nonnegative");
    Ok(beta)
}

/// Interchanges positions k−1 and k of the ordering and applies the exchange
/// y' = y + β(χ_u − χ_v). With β from `exchange_capacity_consecutive` the
/// result is the extreme base of the swapped ordering; no oracle calls (the
/// one changed prefix value is β + f(L(u)) − y(v)).
pub fn apply_interchange(base: &ExtremeBase, k: usize, beta: &Rational) -> ExtremeBase {
    let n = base.n();
    assert!(k >= 1 && k < n, "position {k} out of range");
    let v = base.ordering.vertex_at(k - 1);
    let u = base.ordering.vertex_at(k);
    let mut out = base.clone();
    out.y[u] += beta;
    out.y[v] -= beta;
    out.prefix[k - 1] = beta + &base.prefix[k] - &base.y[v];
    out.ordering.swap_positions(k - 1, k);
    out
}

/// A base x ∈ B(f) maintained as x = Σ λ_i y_i with λ_i > 0, Σ λ_i = 1.
#[derive(Debug, Clone)]
pub struct ConvexCombination {
    entries: Vec<CombinationEntry>,
    x: Vec<Rational>,
}

#[derive(Debug, Clone)]
pub struct CombinationEntry {
    pub lambda: Rational,
    pub base: ExtremeBase,
}

impl ConvexCombination {
    pub fn single(base: ExtremeBase) -> ConvexCombination {
        let x = base.y().to_vec();
        ConvexCombination {
            entries: vec![CombinationEntry {
                lambda: Rational::one(),
                base,
            }],
            x,
        }
    }

    /// Assembles a combination from explicit entries. Weights must be
    /// positive and sum to one; the bases must share one ground set.
    pub fn from_entries(entries: Vec<CombinationEntry>) -> Result<ConvexCombination, SfmError> {
        let n = match entries.first() {
            Some(e) => e.base.n(),
            None => {
                return Err(SfmError::InvalidArgument(
                    "a combination needs at least one base".to_string(),
                ))
            }
        };
        if entries.iter().any(|e| e.base.n() != n) {
            return Err(SfmError::InvalidArgument(
                "bases live on different ground sets".to_string(),
            ));
        }
        let mut x = vec![Rational::zero(); n];
        for e in &entries {
            for (xi, yi) in x.iter_mut().zip(e.base.y()) {
                *xi += &e.lambda * yi;
            }
        }
        let c = ConvexCombination { entries, x };
        if let Err(e) = c.check_invariants() {
            return Err(SfmError::InvalidArgument(e.to_string()));
        }
        Ok(c)
    }

    pub fn entries(&self) -> &[CombinationEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn x(&self) -> &[Rational] {
        &self.x
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    pub(crate) fn entry_mut(&mut self, i: usize) -> &mut CombinationEntry {
        &mut self.entries[i]
    }

    pub(crate) fn push_entry(&mut self, entry: CombinationEntry) {
        self.entries.push(entry);
    }

    pub(crate) fn shift_x(&mut self, u: usize, v: usize, alpha: &Rational) {
        self.x[u] += alpha;
        self.x[v] -= alpha;
    }

    pub(crate) fn scale_values(&mut self, factor: &Rational) {
        for e in &mut self.entries {
            e.base.scale_values(factor);
        }
        for x in &mut self.x {
            *x *= factor;
        }
    }

    /// Σ λ_i y_i recomputed from scratch.
    pub fn recompute_x(&self) -> Vec<Rational> {
        let n = self.n();
        let mut x = vec![Rational::zero(); n];
        for e in &self.entries {
            for (xi, yi) in x.iter_mut().zip(e.base.y()) {
                *xi += &e.lambda * yi;
            }
        }
        x
    }

    pub fn lambda_total(&self) -> Rational {
        let mut t = Rational::zero();
        for e in &self.entries {
            t += &e.lambda;
        }
        t
    }

    pub fn check_invariants(&self) -> Result<(), SfmError> {
        if self.entries.iter().any(|e| !e.lambda.is_positive()) {
            return Err(SfmError::InternalInvariant(
                "combination weight not positive".to_string(),
            ));
        }
        if !self.lambda_total().is_one() {
            return Err(SfmError::InternalInvariant(
                "combination weights do not sum to one".to_string(),
            ));
        }
        if self.recompute_x() != self.x {
            return Err(SfmError::InternalInvariant(
                "cached x departs from Σ λ_i y_i".to_string(),
            ));
        }
        Ok(())
    }

    /// Rewrites x over an affinely independent subset of the current bases
    /// (at most n+1 of them; n when all lie on the hyperplane y(V) = f(V)).
    /// Repeatedly finds μ with Σ μ_i y_i = 0 and Σ μ_i = 0 by exact Gaussian
    /// elimination, steps θ = min{λ_i/μ_i : μ_i > 0}, and deletes every entry
    /// whose weight hits zero.
    pub fn reduce(&mut self) {
        while self.entries.len() > 1 {
            let mu = match self.affine_dependency() {
                Some(mu) => mu,
                None => break,
            };
            let mu = if mu.iter().any(|m| m.is_positive()) {
                mu
            } else {
                mu.into_iter().map(|m| -m).collect()
            };
            let mut theta: Option<Rational> = None;
            for (e, m) in self.entries.iter().zip(&mu) {
                if m.is_positive() {
                    let ratio = &e.lambda / m;
                    if theta.as_ref().map_or(true, |t| ratio < *t) {
                        theta = Some(ratio);
                    }
                }
            }
            let theta = theta.expect("μ has a positive component");
            for (e, m) in self.entries.iter_mut().zip(&mu) {
                e.lambda -= &theta * m;
                debug_assert!(!e.lambda.is_negative());
            }
            self.entries.retain(|e| e.lambda.is_positive());
        }
        debug_assert_eq!(self.recompute_x(), self.x);
    }

    /// Finds μ ≠ 0 with Σ μ_i ỹ_i = 0 for ỹ_i = (y_i, 1), or None if the
    /// lifted columns are linearly independent (equivalently the y_i are
    /// affinely independent). Columns are eliminated left to right; pivots
    /// take the largest-magnitude entry, ties to the lowest row index.
    fn affine_dependency(&self) -> Option<Vec<Rational>> {
        let n = self.n();
        let m = self.entries.len();
        let rows = n + 1;
        // echelon columns and their expressions over the original columns
        let mut pivot_rows: Vec<usize> = Vec::new();
        let mut echelon: Vec<Vec<Rational>> = Vec::new();
        let mut expr: Vec<Vec<Rational>> = Vec::new();
        let mut row_used = vec![false; rows];
        for j in 0..m {
            let mut col: Vec<Rational> = Vec::with_capacity(rows);
            col.extend(self.entries[j].base.y().iter().cloned());
            col.push(Rational::one());
            let mut e = vec![Rational::zero(); m];
            e[j] = Rational::one();
            for (p, t) in echelon.iter().enumerate() {
                let r = pivot_rows[p];
                if col[r].is_zero() {
                    continue;
                }
                let coef = &col[r] / &t[r];
                for (c, tv) in col.iter_mut().zip(t.iter()) {
                    *c -= &coef * tv;
                }
                for (ev, pv) in e.iter_mut().zip(expr[p].iter()) {
                    *ev -= &coef * pv;
                }
            }
            let mut pivot: Option<usize> = None;
            for r in 0..rows {
                if row_used[r] || col[r].is_zero() {
                    continue;
                }
                match pivot {
                    None => pivot = Some(r),
                    Some(best) => {
                        if col[r].abs() > col[best].abs() {
                            pivot = Some(r);
                        }
                    }
                }
            }
            match pivot {
                Some(r) => {
                    row_used[r] = true;
                    pivot_rows.push(r);
                    echelon.push(col);
                    expr.push(e);
                }
                // column j is an affine combination of the pivots
                None => return Some(e),
            }
        }
        None
    }
}
