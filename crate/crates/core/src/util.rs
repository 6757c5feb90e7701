//! Small shared utilities: tri-state logic, deterministic pseudo-randomness for
//! adversarial sweeps, and the exact order comparator for pair-coded points.

use serde::{Deserialize, Serialize};

/// Three-valued truth for questions the exact layer cannot always settle.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum TriBool {
    True,
    False,
    Unknown,
}

impl TriBool {
    pub fn from_bool(b: bool) -> Self {
        if b {
            TriBool::True
        } else {
            TriBool::False
        }
    }

    pub fn and(self, other: TriBool) -> TriBool {
        use TriBool::*;
        match (self, other) {
            (False, _) | (_, False) => False,
            (True, True) => True,
            _ => Unknown,
        }
    }

    pub fn or(self, other: TriBool) -> TriBool {
        use TriBool::*;
        match (self, other) {
            (True, _) | (_, True) => True,
            (False, False) => False,
            _ => Unknown,
        }
    }

    pub fn not(self) -> TriBool {
        use TriBool::*;
        match self {
            True => False,
            False => True,
            Unknown => Unknown,
        }
    }

    pub fn is_true(self) -> bool {
        self == TriBool::True
    }

    pub fn is_false(self) -> bool {
        self == TriBool::False
    }
}

/// Tri-state finiteness verdict for described sets.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum Finiteness {
    Finite,
    Infinite,
    Unknown,
}

/// Splitmix64: a tiny deterministic generator for adversarial candidate
/// families. Hand-rolled so library output is bit-stable forever, independent
/// of any external RNG crate's stream changes.
#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform value in `[0, bound)`; `bound` must be nonzero.
    pub fn below(&mut self, bound: u64) -> u64 {
        self.next_u64() % bound
    }
}

/// Exact comparison of pair codes: π(n,k) = 2^n(2k+1) − 1, compared without
/// materializing the (possibly astronomically large) code. Total order on ω².
pub fn cmp_pair_code(a: (u64, u64), b: (u64, u64)) -> std::cmp::Ordering {
    use std::cmp::Ordering;
    let (n1, k1) = a;
    let (n2, k2) = b;
    if n1 == n2 {
        return k1.cmp(&k2);
    }
    // Compare 2^{n1}(2k1+1) with 2^{n2}(2k2+1); shift the smaller exponent out.
    let (lo_n, lo_k, hi_n, hi_k, flip) = if n1 < n2 {
        (n1, k1, n2, k2, false)
    } else {
        (n2, k2, n1, k1, true)
    };
    let shift = hi_n - lo_n;
    let lo_odd = 2 * lo_k + 1; // fits: k ≤ (u64::MAX-1)/2 in all toolkit uses
    let hi_odd = 2 * hi_k + 1;
    // hi side value is hi_odd << shift; compare against lo_odd.
    let overflows = shift >= 64 || (hi_odd.leading_zeros() as u64) < shift;
    let ord = if overflows {
        Ordering::Less // hi_odd << shift exceeds u64::MAX ≥ lo_odd
    } else {
        lo_odd.cmp(&(hi_odd << shift))
    };
    if flip {
        ord.reverse()
    } else {
        ord
    }
}

/// Enumerate ω² in pair-code order: the m-th point is unpair(m).
/// Total on u64: n = trailing zeros of m+1, k = ((m+1) >> n − 1)/2.
pub fn unpair_u64(m: u64) -> (u64, u64) {
    let v = m + 1;
    let n = v.trailing_zeros() as u64;
    let odd = v >> n;
    (n, (odd - 1) / 2)
}

/// π(n,k) within u64; `None` when the code exceeds 64 bits.
pub fn pair_u64(n: u64, k: u64) -> Option<u64> {
    if n >= 64 {
        return None;
    }
    let odd = k.checked_mul(2)?.checked_add(1)?;
    let v = odd.checked_shl(n as u32)?;
    if n > 0 && (v >> n) != odd {
        return None;
    }
    v.checked_sub(1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::cmp::Ordering;

    // Oracle: big-integer pairing, written independently of pair_u64.
    fn pair_big(n: u64, k: u64) -> num::BigUint {
        use num::BigUint;
        let one = BigUint::from(1u32);
        (BigUint::from(2u32).pow(n as u32) * (BigUint::from(2u32) * k + &one)) - one
    }

    #[test]
    fn pair_matches_big_oracle_on_small_grid() {
        for n in 0..20u64 {
            for k in 0..20u64 {
                let big = pair_big(n, k);
                let small = pair_u64(n, k).expect("fits");
                assert_eq!(num::BigUint::from(small), big, "n={n} k={k}");
                assert_eq!(unpair_u64(small), (n, k));
            }
        }
    }

    #[test]
    fn frozen_pairing_values() {
        assert_eq!(pair_u64(0, 0), Some(0));
        assert_eq!(pair_u64(1, 0), Some(1));
        assert_eq!(unpair_u64(11), (2, 1)); // 12 = 4·3
        assert_eq!(pair_u64(3, 7), Some(119));
    }

    #[test]
    fn cmp_pair_code_agrees_with_big_oracle() {
        let mut rng = SplitMix64::new(7);
        for _ in 0..2000 {
            let a = (rng.below(90), rng.below(1000));
            let b = (rng.below(90), rng.below(1000));
            let want = pair_big(a.0, a.1).cmp(&pair_big(b.0, b.1));
            assert_eq!(cmp_pair_code(a, b), want, "a={a:?} b={b:?}");
        }
    }

    #[test]
    fn cmp_pair_code_orders_unpair_enumeration() {
        for m in 0..5000u64 {
            let p = unpair_u64(m);
            let q = unpair_u64(m + 1);
            assert_eq!(cmp_pair_code(p, q), Ordering::Less);
        }
    }

    #[test]
    fn tribool_tables() {
        use TriBool::*;
        assert_eq!(True.and(Unknown), Unknown);
        assert_eq!(False.and(Unknown), False);
        assert_eq!(True.or(Unknown), True);
        assert_eq!(False.or(Unknown), Unknown);
        assert_eq!(Unknown.not(), Unknown);
    }
}
