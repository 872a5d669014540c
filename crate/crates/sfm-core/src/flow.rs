//! Skew-symmetric flows on the complete digraph over the ground set.
//!
//! Only the upper triangle is stored; φ(v,u) is derived as −φ(u,v), so
//! skew-symmetry cannot be broken by construction. The residual graph G(φ)
//! has an arc (u,v) whenever u ≠ v and φ(u,v) ≤ 0: those are the arcs that
//! can carry δ more flow without leaving [−δ, δ].

use crate::error::SfmError;
use crate::rational::Rational;
use crate::subset::Subset;
use num_traits::{Signed, Zero};
use std::collections::VecDeque;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Flow {
    n: usize,
    /// φ(u,v) for u < v, packed row by row.
    upper: Vec<Rational>,
}

impl Flow {
    pub fn zero(n: usize) -> Flow {
        let pairs = n * n.saturating_sub(1) / 2;
        Flow {
            n,
            upper: vec![Rational::zero(); pairs],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn tri(&self, u: usize, v: usize) -> usize {
        debug_assert!(u < v && v < self.n);
        u * self.n - u * (u + 1) / 2 + (v - u - 1)
    }

    pub fn get(&self, u: usize, v: usize) -> Rational {
        if u == v {
            Rational::zero()
        } else if u < v {
            self.upper[self.tri(u, v)].clone()
        } else {
            -self.upper[self.tri(v, u)].clone()
        }
    }

    /// φ(u,v) += d, and implicitly φ(v,u) −= d.
    pub fn add_to(&mut self, u: usize, v: usize, d: &Rational) {
        assert!(u != v, "no flow on self-loops");
        if u < v {
            let i = self.tri(u, v);
            self.upper[i] += d;
        } else {
            let i = self.tri(v, u);
            self.upper[i] -= d;
        }
    }

    /// Boundary ∂φ(v) = Σ_u φ(u,v); its components always sum to zero.
    pub fn boundary(&self) -> Vec<Rational> {
        let mut b = vec![Rational::zero(); self.n];
        for u in 0..self.n {
            for v in (u + 1)..self.n {
                let val = &self.upper[self.tri(u, v)];
                b[v] += val;
                b[u] -= val;
            }
        }
        b
    }

    pub(crate) fn scale_values(&mut self, factor: &Rational) {
        for e in &mut self.upper {
            *e *= factor;
        }
    }

    /// Moves every entry to the nearest point of [−δ, δ].
    pub fn clamp(&mut self, delta: &Rational) {
        debug_assert!(!delta.is_negative());
        let neg = -delta.clone();
        for e in &mut self.upper {
            if &*e > delta {
                *e = delta.clone();
            } else if *e < neg {
                *e = neg.clone();
            }
        }
    }

    pub fn is_feasible(&self, delta: &Rational) -> bool {
        self.upper.iter().all(|e| e.abs() <= *delta)
    }

    pub fn residual_arc(&self, u: usize, v: usize) -> bool {
        if u == v {
            return false;
        }
        if u < v {
            !self.upper[self.tri(u, v)].is_positive()
        } else {
            !(-&self.upper[self.tri(v, u)]).is_positive()
        }
    }

    /// Vertices reachable from `sources` along residual arcs. Breadth-first,
    /// sources enqueued in index order, neighbors scanned in index order.
    pub fn residual_reachable(&self, sources: &Subset) -> Subset {
        let mut reached = sources.clone();
        let mut queue: VecDeque<usize> = sources.iter().collect();
        while let Some(u) = queue.pop_front() {
            for v in 0..self.n {
                if !reached.contains(v) && self.residual_arc(u, v) {
                    reached.insert(v);
                    queue.push_back(v);
                }
            }
        }
        reached
    }

    /// Shortest residual path from `sources` to `targets` as a vertex list,
    /// or None. Breadth-first with index-order tie-breaking, so runs are
    /// reproducible.
    pub fn find_augmenting_path(&self, sources: &Subset, targets: &Subset) -> Option<Vec<usize>> {
        if sources.is_empty() || targets.is_empty() {
            return None;
        }
        let mut parent: Vec<Option<usize>> = vec![None; self.n];
        let mut seen = sources.clone();
        let mut queue: VecDeque<usize> = sources.iter().collect();
        // a source inside the target set is a zero-length path
        if let Some(t) = sources.iter().find(|&s| targets.contains(s)) {
            return Some(vec![t]);
        }
        while let Some(u) = queue.pop_front() {
            for v in 0..self.n {
                if seen.contains(v) || !self.residual_arc(u, v) {
                    continue;
                }
                seen.insert(v);
                parent[v] = Some(u);
                if targets.contains(v) {
                    let mut path = vec![v];
                    let mut cur = v;
                    while let Some(p) = parent[cur] {
                        path.push(p);
                        cur = p;
                    }
                    path.reverse();
                    return Some(path);
                }
                queue.push_back(v);
            }
        }
        None
    }

    /// Sends δ along a residual path: φ += δ on path arcs (reverse arcs get
    /// −δ via skew-symmetry). Every path arc must be residual and δ-feasible
    /// flow stays δ-feasible.
    pub fn augment(&mut self, path: &[usize], delta: &Rational) -> Result<(), SfmError> {
        for pair in path.windows(2) {
            if !self.residual_arc(pair[0], pair[1]) {
                return Err(SfmError::InternalInvariant(format!(
                    "augmenting along non-residual arc ({}, {})",
                    pair[0], pair[1]
                )));
            }
        }
        for pair in path.windows(2) {
            self.add_to(pair[0], pair[1], delta);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rat_int};

    #[test]
    fn boundary_of_zero_flow_is_zero() {
        let phi = Flow::zero(4);
        assert!(phi.boundary().iter().all(|b| b.is_zero()));
    }

    #[test]
    fn boundary_of_single_arc() {
        let mut phi = Flow::zero(2);
        phi.add_to(0, 1, &rat_int(1));
        assert_eq!(phi.boundary(), vec![rat_int(-1), rat_int(1)]);
        assert_eq!(phi.get(1, 0), rat_int(-1));
    }

    #[test]
    fn circulation_has_zero_boundary() {
        let mut phi = Flow::zero(3);
        phi.add_to(0, 1, &rat_int(1));
        phi.add_to(1, 2, &rat_int(1));
        phi.add_to(2, 0, &rat_int(1));
        assert!(phi.boundary().iter().all(|b| b.is_zero()));
    }

    #[test]
    fn boundary_components_sum_to_zero() {
        let mut phi = Flow::zero(5);
        phi.add_to(0, 3, &rat(7, 2));
        phi.add_to(4, 1, &rat(-1, 3));
        phi.add_to(2, 0, &rat_int(2));
        let total: Rational = phi.boundary().into_iter().sum();
        assert!(total.is_zero());
    }

    #[test]
    fn clamp_moves_entries_to_nearest_feasible_value() {
        let delta = rat_int(1);
        let mut phi = Flow::zero(2);
        phi.add_to(0, 1, &rat_int(2));
        phi.clamp(&delta);
        assert_eq!(phi.get(0, 1), rat_int(1));

        let mut phi = Flow::zero(2);
        phi.add_to(0, 1, &rat(1, 2));
        phi.clamp(&delta);
        assert_eq!(phi.get(0, 1), rat(1, 2));

        let mut phi = Flow::zero(2);
        phi.add_to(0, 1, &rat_int(-2));
        phi.clamp(&delta);
        assert_eq!(phi.get(0, 1), rat_int(-1));
        assert_eq!(phi.get(1, 0), rat_int(1));
        assert!(phi.is_feasible(&delta));
    }

    #[test]
    fn reachability_with_zero_flow_covers_everything() {
        let phi = Flow::zero(4);
        let s = Subset::from_indices(4, [2]);
        assert_eq!(phi.residual_reachable(&s), Subset::full(4));
        assert_eq!(phi.residual_reachable(&Subset::empty(4)), Subset::empty(4));
    }

    #[test]
    fn saturated_arc_blocks_reachability() {
        let mut phi = Flow::zero(2);
        phi.add_to(0, 1, &rat_int(1));
        let w = phi.residual_reachable(&Subset::from_indices(2, [0]));
        assert_eq!(w.to_indices(), vec![0]);
        // the reverse direction is residual
        let w = phi.residual_reachable(&Subset::from_indices(2, [1]));
        assert_eq!(w.to_indices(), vec![0, 1]);
    }

    #[test]
    fn direct_path_found_on_zero_flow() {
        let phi = Flow::zero(2);
        let p = phi
            .find_augmenting_path(
                &Subset::from_indices(2, [0]),
                &Subset::from_indices(2, [1]),
            )
            .unwrap();
        assert_eq!(p, vec![0, 1]);
    }

    #[test]
    fn no_path_through_saturated_arc() {
        let mut phi = Flow::zero(2);
        phi.add_to(0, 1, &rat_int(1));
        assert!(phi
            .find_augmenting_path(
                &Subset::from_indices(2, [0]),
                &Subset::from_indices(2, [1])
            )
            .is_none());
    }

    #[test]
    fn detour_path_when_direct_arc_saturated() {
        let mut phi = Flow::zero(3);
        phi.add_to(0, 1, &rat_int(1)); // a→b saturated, a→c→b open
        let p = phi
            .find_augmenting_path(
                &Subset::from_indices(3, [0]),
                &Subset::from_indices(3, [1]),
            )
            .unwrap();
        assert_eq!(p, vec![0, 2, 1]);
    }

    #[test]
    fn augment_updates_flow_and_boundary() {
        let delta = rat_int(1);
        let mut phi = Flow::zero(3);
        phi.augment(&[0, 2, 1], &delta).unwrap();
        assert_eq!(phi.get(0, 2), rat_int(1));
        assert_eq!(phi.get(2, 1), rat_int(1));
        // boundary changes by δ(χ_last − χ_first), middles cancel
        assert_eq!(phi.boundary(), vec![rat_int(-1), rat_int(1), rat_int(0)]);
        assert!(phi.is_feasible(&delta));
    }

    #[test]
    fn augment_cancels_reverse_flow() {
        let delta = rat_int(1);
        let mut phi = Flow::zero(2);
        phi.add_to(0, 1, &rat_int(-1));
        phi.augment(&[0, 1], &delta).unwrap();
        assert!(phi.get(0, 1).is_zero());
    }

    #[test]
    fn augment_refuses_non_residual_arcs() {
        let mut phi = Flow::zero(2);
        phi.add_to(0, 1, &rat(1, 2));
        let err = phi.augment(&[0, 1], &rat_int(1)).unwrap_err();
        assert!(matches!(err, SfmError::InternalInvariant(_)));
    }

    #[test]
    fn reachability_is_monotone_in_sources() {
        let mut phi = Flow::zero(4);
        phi.add_to(0, 1, &rat_int(1));
        phi.add_to(2, 3, &rat_int(1));
        let small = phi.residual_reachable(&Subset::from_indices(4, [0]));
        let large = phi.residual_reachable(&Subset::from_indices(4, [0, 2]));
        assert!(small.is_subset_of(&large));
        assert!(Subset::from_indices(4, [0]).is_subset_of(&small));
    }
}
