//! Dependency factors.
//!
//! Each occurrence in the equation carries a depfactor: the set of basic
//! positions of the original (marker-framed) equation that determine it.
//! Depfactors are kept as sorted interval lists over positions of one side;
//! the intervals may have gaps where a removed variable's position vanished
//! from all live occurrences.

use smallvec::SmallVec;

use crate::error::{Result, SolverError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    Lhs,
    Rhs,
}

impl Side {
    pub fn name(self) -> &'static str {
        match self {
            Side::Lhs => "lhs",
            Side::Rhs => "rhs",
        }
    }
}

/// Inclusive position interval.
pub type Interval = (u32, u32);

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Depfactor {
    pub side: Side,
    /// Sorted, disjoint, non-adjacent inclusive intervals.
    ivs: SmallVec<[Interval; 2]>,
}

impl Depfactor {
    /// The basic depfactor of a single original position.
    pub fn basic(side: Side, pos: u32) -> Self {
        Depfactor {
            side,
            ivs: SmallVec::from_slice(&[(pos, pos)]),
        }
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.ivs
    }

    pub fn is_basic(&self) -> bool {
        self.ivs.len() == 1 && self.ivs[0].0 == self.ivs[0].1
    }

    pub fn min_pos(&self) -> u32 {
        self.ivs[0].0
    }

    pub fn max_pos(&self) -> u32 {
        self.ivs[self.ivs.len() - 1].1
    }

    pub fn contains(&self, pos: u32) -> bool {
        self.ivs.iter().any(|&(lo, hi)| lo <= pos && pos <= hi)
    }

    pub fn positions(&self) -> impl Iterator<Item = u32> + '_ {
        self.ivs.iter().flat_map(|&(lo, hi)| lo..=hi)
    }

    pub fn position_count(&self) -> u32 {
        self.ivs.iter().map(|&(lo, hi)| hi - lo + 1).sum()
    }

    /// Factor order: every LHS depfactor precedes every RHS depfactor;
    /// within a side, compare both endpoints.
    pub fn le(&self, other: &Depfactor) -> bool {
        match (self.side, other.side) {
            (Side::Lhs, Side::Rhs) => true,
            (Side::Rhs, Side::Lhs) => false,
            _ => self.min_pos() <= other.min_pos() && self.max_pos() <= other.max_pos(),
        }
    }

    pub fn comparable(&self, other: &Depfactor) -> bool {
        self.le(other) || other.le(self)
    }

    /// Sum of two comparable depfactors: position-set union with duplicates
    /// removed. Fails fast on incomparable inputs, which would indicate a
    /// broken rewrite.
    pub fn sum(&self, other: &Depfactor) -> Result<Depfactor> {
        if self.side != other.side {
            return Err(SolverError::IncomparableDepfactors(format!(
                "{} vs {}",
                self.side.name(),
                other.side.name()
            )));
        }
        if !self.comparable(other) {
            return Err(SolverError::IncomparableDepfactors(format!(
                "[{},{}] vs [{},{}]",
                self.min_pos(),
                self.max_pos(),
                other.min_pos(),
                other.max_pos()
            )));
        }
        let mut merged: SmallVec<[Interval; 2]> = SmallVec::new();
        let mut i = 0;
        let mut j = 0;
        let push = |out: &mut SmallVec<[Interval; 2]>, iv: Interval| {
            if let Some(last) = out.last_mut() {
                // merge overlapping or adjacent intervals
                if iv.0 <= last.1.saturating_add(1) {
                    last.1 = last.1.max(iv.1);
                    return;
                }
            }
            out.push(iv);
        };
        while i < self.ivs.len() || j < other.ivs.len() {
            let take_left = match (self.ivs.get(i), other.ivs.get(j)) {
                (Some(a), Some(b)) => a.0 <= b.0,
                (Some(_), None) => true,
                (None, Some(_)) => false,
                (None, None) => unreachable!(),
            };
            if take_left {
                push(&mut merged, self.ivs[i]);
                i += 1;
            } else {
                push(&mut merged, other.ivs[j]);
                j += 1;
            }
        }
        Ok(Depfactor {
            side: self.side,
            ivs: merged,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn df(side: Side, ivs: &[Interval]) -> Depfactor {
        let mut d = Depfactor::basic(side, ivs[0].0);
        d.ivs = SmallVec::from_slice(ivs);
        d
    }

    #[test]
    fn sum_merges_overlapping_intervals() {
        let a = df(Side::Lhs, &[(2, 3)]);
        let b = df(Side::Lhs, &[(3, 5)]);
        let s = a.sum(&b).unwrap();
        assert_eq!(s.intervals(), &[(2, 5)]);
    }

    #[test]
    fn sum_is_idempotent() {
        let a = df(Side::Lhs, &[(1, 2), (4, 4)]);
        assert_eq!(a.sum(&a).unwrap(), a);
    }

    #[test]
    fn sum_keeps_gap_intervals() {
        // A removed variable's position may be absent from both operands.
        let a = df(Side::Rhs, &[(2, 2)]);
        let b = df(Side::Rhs, &[(4, 4)]);
        let s = a.sum(&b).unwrap();
        assert_eq!(s.intervals(), &[(2, 2), (4, 4)]);
        assert!(!s.contains(3));
    }

    #[test]
    fn adjacent_intervals_coalesce() {
        let a = df(Side::Lhs, &[(2, 3)]);
        let b = df(Side::Lhs, &[(4, 6)]);
        assert_eq!(a.sum(&b).unwrap().intervals(), &[(2, 6)]);
    }

    #[test]
    fn incomparable_sum_fails() {
        // strictly nested factors are incomparable under the endpoint order
        let a = df(Side::Lhs, &[(2, 5)]);
        let b = df(Side::Lhs, &[(3, 4)]);
        assert!(!a.comparable(&b));
        assert!(a.sum(&b).is_err());
        let c = df(Side::Rhs, &[(0, 0)]);
        assert!(a.sum(&c).is_err());
    }

    #[test]
    fn side_order_puts_lhs_first() {
        let a = df(Side::Lhs, &[(9, 9)]);
        let b = df(Side::Rhs, &[(0, 0)]);
        assert!(a.le(&b));
        assert!(!b.le(&a));
    }
}
