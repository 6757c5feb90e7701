//! Eventually periodic subsets of ω in explicit normal form.
//!
//! Any Boolean combination of finite sets, intervals, residue classes and
//! bit-mask constraints is eventually periodic: beyond a threshold `t`,
//! membership of `n` depends only on `n mod period`. That normal form is
//! closed under union/intersection/difference/complement and makes
//! finiteness, counting, density and inclusion questions exactly decidable.

use num::BigRational;
use std::cmp::max;

/// Normal form: `n < t` is a member iff `head[n]`; `n ≥ t` is a member iff
/// `mask[n mod period]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EpSet {
    t: u64,
    head: Vec<bool>,
    period: u64,
    mask: Vec<bool>,
}

/// Combined period/threshold sizes beyond this are refused (callers fall back
/// to tri-state Unknown paths rather than chewing unbounded memory).
pub const MAX_SPAN: u64 = 1 << 22;

fn lcm(a: u64, b: u64) -> Option<u64> {
    let g = gcd(a, b);
    (a / g).checked_mul(b)
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl EpSet {
    pub fn new(t: u64, head: Vec<bool>, period: u64, mask: Vec<bool>) -> Self {
        assert_eq!(head.len() as u64, t);
        assert_eq!(mask.len() as u64, period);
        assert!(period >= 1);
        EpSet { t, head, period, mask }
    }

    pub fn empty() -> Self {
        EpSet::new(0, vec![], 1, vec![false])
    }

    pub fn full() -> Self {
        EpSet::new(0, vec![], 1, vec![true])
    }

    pub fn finite(elements: &[u64]) -> Option<Self> {
        let t = elements.iter().max().map_or(0, |m| m + 1);
        if t > MAX_SPAN {
            return None;
        }
        let mut head = vec![false; t as usize];
        for &e in elements {
            head[e as usize] = true;
        }
        Some(EpSet::new(t, head, 1, vec![false]))
    }

    /// `{n : n ≡ a (mod m)}`.
    pub fn residue(a: u64, m: u64) -> Option<Self> {
        if m == 0 || m > MAX_SPAN {
            return None;
        }
        let mut mask = vec![false; m as usize];
        mask[(a % m) as usize] = true;
        Some(EpSet::new(0, vec![], m, mask))
    }

    /// `[lo, hi]` inclusive, or `[lo, ∞)` when `hi` is `None`.
    pub fn interval(lo: u64, hi: Option<u64>) -> Option<Self> {
        match hi {
            None => {
                if lo > MAX_SPAN {
                    return None;
                }
                Some(EpSet::new(lo, vec![false; lo as usize], 1, vec![true]))
            }
            Some(hi) => {
                if hi < lo {
                    return Some(EpSet::empty());
                }
                if hi + 1 > MAX_SPAN {
                    return None;
                }
                let mut head = vec![false; (hi + 1) as usize];
                for slot in head.iter_mut().take((hi + 1) as usize).skip(lo as usize) {
                    *slot = true;
                }
                Some(EpSet::new(hi + 1, head, 1, vec![false]))
            }
        }
    }

    /// `{n : n & mask_bits == pattern}`; periodic with period 2^(top mask bit + 1).
    pub fn bitmask(mask_bits: u64, pattern: u64) -> Option<Self> {
        if pattern & !mask_bits != 0 {
            return Some(EpSet::empty());
        }
        let top = 64 - mask_bits.leading_zeros() as u64;
        let period = 1u64.checked_shl(top as u32)?;
        if period > MAX_SPAN {
            return None;
        }
        let mask = (0..period)
            .map(|r| r & mask_bits == pattern)
            .collect();
        Some(EpSet::new(0, vec![], period, mask))
    }

    pub fn member(&self, n: u64) -> bool {
        if n < self.t {
            self.head[n as usize]
        } else {
            self.mask[(n % self.period) as usize]
        }
    }

    fn align(a: &EpSet, b: &EpSet) -> Option<(EpSet, EpSet)> {
        let t = max(a.t, b.t);
        let p = lcm(a.period, b.period)?;
        if t.checked_add(p)? > MAX_SPAN {
            return None;
        }
        Some((a.rebase(t, p), b.rebase(t, p)))
    }

    fn rebase(&self, t: u64, period: u64) -> EpSet {
        debug_assert!(t >= self.t && period % self.period == 0);
        let head = (0..t).map(|n| self.member(n)).collect();
        let mask = (0..period).map(|r| {
            // representative ≥ t congruent to r mod period
            let rep = if r >= t { r } else { r + period * t.div_ceil(period) };
            self.member(rep)
        });
        EpSet::new(t, head, period, mask.collect())
    }

    fn zip(a: &EpSet, b: &EpSet, f: impl Fn(bool, bool) -> bool) -> Option<EpSet> {
        let (x, y) = Self::align(a, b)?;
        let head = x.head.iter().zip(&y.head).map(|(&p, &q)| f(p, q)).collect();
        let mask = x.mask.iter().zip(&y.mask).map(|(&p, &q)| f(p, q)).collect();
        Some(EpSet::new(x.t, head, x.period, mask))
    }

    pub fn union(&self, other: &EpSet) -> Option<EpSet> {
        Self::zip(self, other, |p, q| p || q)
    }

    pub fn intersection(&self, other: &EpSet) -> Option<EpSet> {
        Self::zip(self, other, |p, q| p && q)
    }

    pub fn difference(&self, other: &EpSet) -> Option<EpSet> {
        Self::zip(self, other, |p, q| p && !q)
    }

    pub fn complement(&self) -> EpSet {
        EpSet::new(
            self.t,
            self.head.iter().map(|&b| !b).collect(),
            self.period,
            self.mask.iter().map(|&b| !b).collect(),
        )
    }

    /// Number of residues in the periodic part; zero iff the set is finite.
    pub fn periodic_count(&self) -> u64 {
        self.mask.iter().filter(|&&b| b).count() as u64
    }

    pub fn is_finite(&self) -> bool {
        self.periodic_count() == 0
    }

    pub fn is_empty(&self) -> bool {
        self.is_finite() && !self.head.iter().any(|&b| b)
    }

    /// Exact asymptotic density: |mask| / period.
    pub fn density(&self) -> BigRational {
        BigRational::new(self.periodic_count().into(), self.period.into())
    }

    pub fn count_upto(&self, n: u64) -> u64 {
        let head_part = self
            .head
            .iter()
            .take(n.min(self.t) as usize)
            .filter(|&&b| b)
            .count() as u64;
        if n <= self.t {
            return head_part;
        }
        let lo = self.t;
        let full = (n - lo) / self.period;
        let mut cnt = head_part + full * self.periodic_count();
        for r in lo + full * self.period..n {
            if self.mask[(r % self.period) as usize] {
                cnt += 1;
            }
        }
        cnt
    }

    pub fn min(&self) -> Option<u64> {
        (0..self.t)
            .find(|&n| self.head[n as usize])
            .or_else(|| (self.t..self.t + self.period).find(|&n| self.member(n)))
    }

    /// All members below `n`.
    pub fn elements_below(&self, n: u64) -> Vec<u64> {
        (0..n).filter(|&i| self.member(i)).collect()
    }

    pub fn is_subset_of(&self, other: &EpSet) -> Option<bool> {
        Some(self.difference(other)?.is_empty())
    }

    pub fn is_disjoint_from(&self, other: &EpSet) -> Option<bool> {
        Some(self.intersection(other)?.is_empty())
    }

    pub fn threshold(&self) -> u64 {
        self.t
    }

    pub fn period(&self) -> u64 {
        self.period
    }

    /// Membership of the eventual residue class `r` (for callers that reason
    /// about tails).
    pub fn tail_member(&self, r: u64) -> bool {
        self.mask[(r % self.period) as usize]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Brute-force oracle for a Boolean expression over simple predicates.
    fn brute(f: impl Fn(u64) -> bool, n: u64) -> Vec<u64> {
        (0..n).filter(|&i| f(i)).collect()
    }

    #[test]
    fn residue_intersection_is_crt() {
        let a = EpSet::residue(0, 2).unwrap();
        let b = EpSet::residue(0, 3).unwrap();
        let c = a.intersection(&b).unwrap();
        let want = brute(|n| n % 6 == 0, 1000);
        assert_eq!(c.elements_below(1000), want);
        assert_eq!(c.density(), BigRational::new(1.into(), 6.into()));
    }

    #[test]
    fn difference_of_interval_and_finite() {
        let iv = EpSet::interval(0, None).unwrap();
        let f = EpSet::finite(&[0]).unwrap();
        let d = iv.difference(&f).unwrap();
        assert!(!d.member(0));
        assert!(d.member(1));
        assert!(!d.is_finite());
    }

    #[test]
    fn count_matches_brute_scan() {
        let s = EpSet::residue(1, 4)
            .unwrap()
            .union(&EpSet::interval(10, Some(20)).unwrap())
            .unwrap()
            .difference(&EpSet::finite(&[13, 17, 101]).unwrap())
            .unwrap();
        for n in [0, 1, 7, 50, 1000, 4096] {
            let want = (0..n).filter(|&i| (i % 4 == 1 || (10..=20).contains(&i)) && ![13, 17, 101].contains(&i)).count() as u64;
            assert_eq!(s.count_upto(n), want, "n={n}");
        }
    }

    #[test]
    fn bitmask_matches_direct_predicate() {
        // bits 1..3 of n must equal 0b10 (i.e. n & 0b0110 == 0b0100)
        let s = EpSet::bitmask(0b0110, 0b0100).unwrap();
        for n in 0..512 {
            assert_eq!(s.member(n), n & 0b0110 == 0b0100, "n={n}");
        }
    }

    #[test]
    fn subset_and_disjoint_are_exact() {
        let evens = EpSet::residue(0, 2).unwrap();
        let mult4 = EpSet::residue(0, 4).unwrap();
        assert_eq!(mult4.is_subset_of(&evens), Some(true));
        assert_eq!(evens.is_subset_of(&mult4), Some(false));
        let odds = EpSet::residue(1, 2).unwrap();
        assert_eq!(evens.is_disjoint_from(&odds), Some(true));
    }

    #[test]
    fn min_and_finiteness() {
        let s = EpSet::finite(&[5, 9]).unwrap();
        assert_eq!(s.min(), Some(5));
        assert!(s.is_finite());
        let t = EpSet::residue(3, 7).unwrap();
        assert_eq!(t.min(), Some(3));
        assert!(!t.is_finite());
        assert!(EpSet::empty().min().is_none());
    }
}
