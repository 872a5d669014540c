//! Subsets of a ground set. Elements are addressed by index. Ground sets with
//! at most 64 elements use a bitmask; larger ones fall back to a sorted index
//! list. The two forms round-trip through `to_indices` / `from_indices`.

use crate::error::SfmError;

pub const MASK_LIMIT: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Subset {
    Mask(u64),
    Indices(Vec<usize>),
}

impl Subset {
    pub fn empty(n: usize) -> Subset {
        if n <= MASK_LIMIT {
            Subset::Mask(0)
        } else {
            Subset::Indices(Vec::new())
        }
    }

    pub fn full(n: usize) -> Subset {
        if n <= MASK_LIMIT {
            if n == MASK_LIMIT {
                Subset::Mask(u64::MAX)
            } else {
                Subset::Mask((1u64 << n) - 1)
            }
        } else {
            Subset::Indices((0..n).collect())
        }
    }

    pub fn singleton(n: usize, i: usize) -> Subset {
        let mut s = Subset::empty(n);
        s.insert(i);
        s
    }

    pub fn from_mask(n: usize, mask: u64) -> Subset {
        if n <= MASK_LIMIT {
            Subset::Mask(mask)
        } else {
            Subset::Indices((0..MASK_LIMIT).filter(|i| mask >> i & 1 == 1).collect())
        }
    }

    /// Builds a subset from arbitrary indices (deduplicated, order-insensitive).
    pub fn from_indices<I: IntoIterator<Item = usize>>(n: usize, indices: I) -> Subset {
        let mut s = Subset::empty(n);
        for i in indices {
            s.insert(i);
        }
        s
    }

    pub fn contains(&self, i: usize) -> bool {
        match self {
            Subset::Mask(m) => i < MASK_LIMIT && m >> i & 1 == 1,
            Subset::Indices(v) => v.binary_search(&i).is_ok(),
        }
    }

    pub fn insert(&mut self, i: usize) {
        match self {
            Subset::Mask(m) => {
                debug_assert!(i < MASK_LIMIT);
                *m |= 1u64 << i;
            }
            Subset::Indices(v) => {
                if let Err(pos) = v.binary_search(&i) {
                    v.insert(pos, i);
                }
            }
        }
    }

    pub fn remove(&mut self, i: usize) {
        match self {
            Subset::Mask(m) => {
                if i < MASK_LIMIT {
                    *m &= !(1u64 << i);
                }
            }
            Subset::Indices(v) => {
                if let Ok(pos) = v.binary_search(&i) {
                    v.remove(pos);
                }
            }
        }
    }

    pub fn with_inserted(&self, i: usize) -> Subset {
        let mut s = self.clone();
        s.insert(i);
        s
    }

    pub fn with_removed(&self, i: usize) -> Subset {
        let mut s = self.clone();
        s.remove(i);
        s
    }

    pub fn len(&self) -> usize {
        match self {
            Subset::Mask(m) => m.count_ones() as usize,
            Subset::Indices(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        match self {
            Subset::Mask(m) => *m == 0,
            Subset::Indices(v) => v.is_empty(),
        }
    }

    /// Elements in increasing index order.
    pub fn iter(&self) -> Box<dyn Iterator<Item = usize> + '_> {
        match self {
            Subset::Mask(m) => {
                let m = *m;
                Box::new((0..MASK_LIMIT).filter(move |i| m >> i & 1 == 1))
            }
            Subset::Indices(v) => Box::new(v.iter().copied()),
        }
    }

    pub fn to_indices(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn to_mask(&self) -> Option<u64> {
        match self {
            Subset::Mask(m) => Some(*m),
            Subset::Indices(v) => {
                if v.iter().all(|&i| i < MASK_LIMIT) {
                    Some(v.iter().fold(0u64, |acc, &i| acc | 1u64 << i))
                } else {
                    None
                }
            }
        }
    }

    pub fn union(&self, other: &Subset) -> Subset {
        match (self, other) {
            (Subset::Mask(a), Subset::Mask(b)) => Subset::Mask(a | b),
            _ => {
                let mut s = self.clone();
                for i in other.iter() {
                    s.insert(i);
                }
                s
            }
        }
    }

    pub fn intersection(&self, other: &Subset) -> Subset {
        match (self, other) {
            (Subset::Mask(a), Subset::Mask(b)) => Subset::Mask(a & b),
            _ => {
                let mut s = self.clone();
                let drop: Vec<usize> = s.iter().filter(|&i| !other.contains(i)).collect();
                for i in drop {
                    s.remove(i);
                }
                s
            }
        }
    }

    pub fn difference(&self, other: &Subset) -> Subset {
        match (self, other) {
            (Subset::Mask(a), Subset::Mask(b)) => Subset::Mask(a & !b),
            _ => {
                let mut s = self.clone();
                let drop: Vec<usize> = s.iter().filter(|&i| other.contains(i)).collect();
                for i in drop {
                    s.remove(i);
                }
                s
            }
        }
    }

    pub fn intersects(&self, other: &Subset) -> bool {
        match (self, other) {
            (Subset::Mask(a), Subset::Mask(b)) => a & b != 0,
            _ => self.iter().any(|i| other.contains(i)),
        }
    }

    pub fn is_subset_of(&self, other: &Subset) -> bool {
        match (self, other) {
            (Subset::Mask(a), Subset::Mask(b)) => a & !b == 0,
            _ => self.iter().all(|i| other.contains(i)),
        }
    }

    /// Checks that every element lies in 0..n and the representation matches n.
    pub fn validate(&self, n: usize) -> Result<(), SfmError> {
        let ok = match self {
            Subset::Mask(m) => {
                n <= MASK_LIMIT && (n == MASK_LIMIT || m >> n == 0)
            }
            Subset::Indices(v) => v.iter().all(|&i| i < n),
        };
        if ok {
            Ok(())
        } else {
            Err(SfmError::InvalidSubset(format!(
                "subset {:?} does not fit a ground set of size {n}",
                self
            )))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mask_basics() {
        let mut s = Subset::empty(5);
        assert!(s.is_empty());
        s.insert(0);
        s.insert(3);
        s.insert(3);
        assert_eq!(s.len(), 2);
        assert!(s.contains(3) && !s.contains(1));
        assert_eq!(s.to_indices(), vec![0, 3]);
        s.remove(0);
        assert_eq!(s.to_indices(), vec![3]);
    }

    #[test]
    fn indices_variant_above_mask_limit() {
        let n = 70;
        let mut s = Subset::empty(n);
        assert!(matches!(s, Subset::Indices(_)));
        s.insert(69);
        s.insert(2);
        s.insert(69);
        assert_eq!(s.to_indices(), vec![2, 69]);
        assert_eq!(s.len(), 2);
        assert!(s.to_mask().is_none());
        assert_eq!(Subset::full(n).len(), n);
    }

    #[test]
    fn round_trips_between_forms() {
        let s = Subset::from_indices(10, [4, 1, 7]);
        assert_eq!(s, Subset::from_mask(10, s.to_mask().unwrap()));
        let big = Subset::from_indices(80, [0, 64, 79]);
        assert_eq!(big, Subset::from_indices(80, big.to_indices()));
    }

    #[test]
    fn set_algebra() {
        let a = Subset::from_indices(6, [0, 1, 4]);
        let b = Subset::from_indices(6, [1, 2]);
        assert_eq!(a.union(&b).to_indices(), vec![0, 1, 2, 4]);
        assert_eq!(a.intersection(&b).to_indices(), vec![1]);
        assert_eq!(a.difference(&b).to_indices(), vec![0, 4]);
        assert!(a.intersects(&b));
        assert!(!a.is_subset_of(&b));
        assert!(Subset::empty(6).is_subset_of(&b));
    }

    #[test]
    fn validation() {
        assert!(Subset::from_indices(4, [3]).validate(4).is_ok());
        assert!(Subset::Mask(0b10000).validate(4).is_err());
        assert!(Subset::Indices(vec![70]).validate(65).is_err());
        assert!(Subset::full(64).validate(64).is_ok());
    }
}
