//! Finite unions of intervals and the measure-compressing map onto `[0, mu]`.

use serde::Serialize;

use crate::error::{Error, Result};

/// Sorted disjoint intervals `[a, b)`; with `closed_end` the last one also
/// contains its right end.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IntervalSet {
    intervals: Vec<(f64, f64)>,
    closed_end: bool,
    #[serde(skip)]
    prefix: Vec<f64>,
    measure: f64,
}

impl IntervalSet {
    /// Validates order and disjointness; empty intervals are dropped and
    /// touching ones merged.
    pub fn new(raw: Vec<(f64, f64)>, closed_end: bool) -> Result<Self> {
        let mut intervals: Vec<(f64, f64)> = Vec::with_capacity(raw.len());
        for (a, b) in raw {
            if !(a.is_finite() && b.is_finite()) || b < a {
                return Err(Error::InvalidArgument(format!("bad interval [{a}, {b})")));
            }
            if b == a {
                continue;
            }
            match intervals.last_mut() {
                Some(last) if a < last.1 => {
                    return Err(Error::InvalidArgument(format!(
                        "interval [{a}, {b}) overlaps or precedes [{}, {})",
                        last.0, last.1
                    )))
                }
                Some(last) if a == last.1 => last.1 = b,
                _ => intervals.push((a, b)),
            }
        }
        let mut prefix = Vec::with_capacity(intervals.len() + 1);
        let mut acc = 0.0;
        prefix.push(acc);
        for &(a, b) in &intervals {
            acc += b - a;
            prefix.push(acc);
        }
        let closed_end = closed_end && !intervals.is_empty();
        Ok(IntervalSet {
            intervals,
            closed_end,
            prefix,
            measure: acc,
        })
    }

    pub fn empty() -> Self {
        IntervalSet::new(Vec::new(), false).expect("empty set is valid")
    }

    /// The closed interval `[a, b]`.
    pub fn closed(a: f64, b: f64) -> Result<Self> {
        IntervalSet::new(vec![(a, b)], true)
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn closed_end(&self) -> bool {
        self.closed_end
    }

    pub fn measure(&self) -> f64 {
        self.measure
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn inf(&self) -> Option<f64> {
        self.intervals.first().map(|i| i.0)
    }

    pub fn sup(&self) -> Option<f64> {
        self.intervals.last().map(|i| i.1)
    }

    pub fn contains(&self, x: f64) -> bool {
        let k = self.intervals.partition_point(|&(a, _)| a <= x);
        if k == 0 {
            return false;
        }
        let (a, b) = self.intervals[k - 1];
        (a <= x && x < b) || (self.closed_end && k == self.intervals.len() && x == b)
    }

    /// `mu([0, x] ∩ S)`, assuming `S ⊂ [0, inf)`.
    pub fn pi(&self, x: f64) -> f64 {
        // intervals starting at or before x
        let k = self.intervals.partition_point(|&(a, _)| a <= x);
        if k == 0 {
            return 0.0;
        }
        let (a, b) = self.intervals[k - 1];
        self.prefix[k - 1] + (x.min(b) - a)
    }

    /// Right inverse of [`pi`](Self::pi).
    ///
    /// `y` equal to the image of an interval's left end maps to that left
    /// end, so `pi_inv(0)` is `inf S`; `y = mu(S)` maps to `sup S`. Inside an
    /// interval the result is `a + (y - prefix)`; if rounding pushes it to a
    /// half-open right end it is pulled back by one ulp.
    pub fn pi_inv(&self, y: f64) -> Result<f64> {
        if !(y >= 0.0 && y <= self.measure) {
            return Err(Error::OutOfRange {
                value: y,
                limit: self.measure,
            });
        }
        if self.intervals.is_empty() {
            return Err(Error::EmptyRadiusSet);
        }
        // first k whose image [prefix_k, prefix_{k+1}) contains y
        let k = self.prefix[1..].partition_point(|&p| p <= y);
        if k == self.intervals.len() {
            return Ok(self.intervals[k - 1].1);
        }
        let (a, b) = self.intervals[k];
        let t = a + (y - self.prefix[k]);
        Ok(if t >= b { next_down(b) } else { t })
    }
}

/// Largest float below a positive finite `x`.
pub fn next_down(x: f64) -> f64 {
    debug_assert!(x > 0.0 && x.is_finite());
    f64::from_bits(x.to_bits() - 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_on_full_range() {
        let s = IntervalSet::closed(0.0, 1.0 / 3.0).unwrap();
        for &x in &[0.0, 0.1, 0.2, 1.0 / 3.0] {
            assert_eq!(s.pi(x), x);
            assert_eq!(s.pi_inv(x).unwrap(), x);
        }
    }

    #[test]
    fn two_piece_inverse() {
        let s = IntervalSet::new(vec![(1.0, 2.0), (3.0, 4.0)], false).unwrap();
        assert_eq!(s.measure(), 2.0);
        assert_eq!(s.pi_inv(1.5).unwrap(), 3.5);
        assert_eq!(s.pi(3.5), 1.5);
        assert_eq!(s.pi(2.5), 1.0);
        assert_eq!(s.pi_inv(0.0).unwrap(), 1.0);
        assert_eq!(s.pi_inv(1.0).unwrap(), 3.0);
        assert_eq!(s.pi_inv(2.0).unwrap(), 4.0);
        assert!(s.pi_inv(2.5).is_err());
        assert!(s.contains(3.0) && !s.contains(2.0) && !s.contains(4.0));
    }

    #[test]
    fn closed_end_contains_sup() {
        let s = IntervalSet::new(vec![(1.0, 2.0)], true).unwrap();
        assert!(s.contains(2.0));
    }

    #[test]
    fn touching_intervals_merge() {
        let s = IntervalSet::new(vec![(0.0, 1.0), (1.0, 2.0), (2.0, 2.0)], false).unwrap();
        assert_eq!(s.intervals(), &[(0.0, 2.0)]);
        assert!(IntervalSet::new(vec![(0.0, 1.0), (0.5, 2.0)], false).is_err());
    }

    #[test]
    fn empty_set() {
        let s = IntervalSet::empty();
        assert_eq!(s.measure(), 0.0);
        assert!(matches!(s.pi_inv(0.0), Err(Error::EmptyRadiusSet)));
        assert_eq!(s.pi(5.0), 0.0);
    }
}
