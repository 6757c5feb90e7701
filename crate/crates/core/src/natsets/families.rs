//! Registered infinite families used as set leaves: partition families,
//! named strictly-increasing enumerations, and branch bit-oracles backing
//! planar pseudo-intersection certificates.

use std::fmt;
use std::sync::Arc;

use super::{DescribedSet, Carrier, Nat, RectPiece, SetError};
use crate::words::BinWord;

// ---------------------------------------------------------------------------
// Partition families
// ---------------------------------------------------------------------------

/// A registered infinite family of pairwise-disjoint parts.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum PartFamily {
    /// S_k = {n : n ≡ 2^k (mod 2^{k+1})} — the 2-adic valuation classes,
    /// partitioning ω ∖ {0}.
    Nu2,
    /// The columns of ω²: part k = {(k, i) : i ∈ ω}.
    PlaneColumns,
    /// [2^k − 1, 2^{k+1} − 1) — consecutive finite blocks partitioning ω.
    DyadicBlocks,
    /// Part k = {(n, k) : n ≥ k} on ω² — row k from the diagonal rightwards.
    /// The union over all k is the under-diagonal triangle {(n, k) : k ≤ n},
    /// whose sections are all finite.
    DiagRows,
}

impl PartFamily {
    pub fn name(&self) -> &'static str {
        match self {
            PartFamily::Nu2 => "nu2",
            PartFamily::PlaneColumns => "plane-columns",
            PartFamily::DyadicBlocks => "dyadic-blocks",
            PartFamily::DiagRows => "diag-rows",
        }
    }

    pub fn parse(name: &str) -> Option<PartFamily> {
        match name {
            "nu2" => Some(PartFamily::Nu2),
            "plane-columns" => Some(PartFamily::PlaneColumns),
            "dyadic-blocks" => Some(PartFamily::DyadicBlocks),
            "diag-rows" => Some(PartFamily::DiagRows),
            _ => None,
        }
    }

    pub fn part_carrier(&self) -> Carrier {
        match self {
            PartFamily::Nu2 | PartFamily::DyadicBlocks => Carrier::Line,
            PartFamily::PlaneColumns | PartFamily::DiagRows => Carrier::plane1(),
        }
    }

    /// The k-th part as a described set.
    pub fn part(&self, k: Nat) -> Result<DescribedSet, SetError> {
        match self {
            PartFamily::Nu2 => {
                if k > 61 {
                    return Err(SetError::Resource(format!(
                        "valuation class index {k} beyond supported range"
                    )));
                }
                DescribedSet::residue(1u64 << k, 1u64 << (k + 1))
            }
            PartFamily::PlaneColumns => Ok(DescribedSet::column(k)),
            PartFamily::DyadicBlocks => {
                if k > 62 {
                    return Err(SetError::Resource(format!(
                        "dyadic block index {k} beyond supported range"
                    )));
                }
                DescribedSet::interval((1u64 << k) - 1, Some((1u64 << (k + 1)) - 2))
            }
            PartFamily::DiagRows => {
                let cols = DescribedSet::interval(k, None)?;
                DescribedSet::rect(cols, DescribedSet::finite(vec![k]))
            }
        }
    }

    /// Which part a point falls into, if any.
    pub fn locate(&self, p: &super::Point) -> Option<Nat> {
        match self {
            PartFamily::Nu2 => {
                let n = p.as_nat()?;
                if n == 0 {
                    None
                } else {
                    Some(n.trailing_zeros() as u64)
                }
            }
            PartFamily::PlaneColumns => p.as_pair().map(|(n, _)| n),
            PartFamily::DyadicBlocks => {
                let n = p.as_nat()?;
                Some(63 - (n + 1).leading_zeros() as u64)
            }
            PartFamily::DiagRows => {
                let (n, r) = p.as_pair()?;
                if n >= r {
                    Some(r)
                } else {
                    None
                }
            }
        }
    }

    /// Whether every part of the family is finite.
    pub fn parts_are_finite(&self) -> bool {
        matches!(self, PartFamily::DyadicBlocks)
    }

    /// Closed form for ∪_{k ≥ t} part(k), when one exists.
    pub fn tail_union(&self, t: Nat) -> Option<DescribedSet> {
        match self {
            PartFamily::Nu2 => {
                // {n ≠ 0 : 2^t | n}
                if t > 61 {
                    return None;
                }
                let zeros = DescribedSet::residue(0, 1u64 << t).ok()?;
                DescribedSet::diff(zeros, DescribedSet::finite(vec![0])).ok()
            }
            PartFamily::DyadicBlocks => {
                if t > 62 {
                    return None;
                }
                DescribedSet::interval((1u64 << t) - 1, None).ok()
            }
            PartFamily::PlaneColumns => {
                let cols = DescribedSet::interval(t, None).ok()?;
                DescribedSet::rect(cols, DescribedSet::full()).ok()
            }
            // A row tail-union is a staircase, not expressible in the grammar's
            // closed forms.
            PartFamily::DiagRows => None,
        }
    }

    /// Rect decomposition of a union of parts, for planar families.
    pub fn plane_pieces(
        &self,
        indices: &DescribedSet,
        full_rows: &DescribedSet,
    ) -> Option<Vec<RectPiece>> {
        match self {
            PartFamily::PlaneColumns => Some(vec![RectPiece {
                cols: indices.clone(),
                rows: full_rows.clone(),
            }]),
            PartFamily::DiagRows => {
                // Only a finite selection of rows decomposes into finitely
                // many rectangles.
                let ep = indices.try_ep()?;
                if !ep.is_finite() {
                    return None;
                }
                let rows = ep.elements_below(ep.threshold());
                if rows.len() > super::MAX_RECT_PIECES {
                    return None;
                }
                let mut pieces = Vec::with_capacity(rows.len());
                for k in rows {
                    pieces.push(RectPiece {
                        cols: DescribedSet::interval(k, None).ok()?,
                        rows: DescribedSet::finite(vec![k]),
                    });
                }
                Some(pieces)
            }
            _ => None,
        }
    }
}

impl fmt::Display for PartFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

// ---------------------------------------------------------------------------
// Named enumerations
// ---------------------------------------------------------------------------

/// Shape witness justifying summability of reciprocals and vanishing density.
///
/// * `Pow2`: terms at least double at every step once nonzero.
/// * `Square`: the i-th term is at least i².
/// * `PolyLog`: at most (log₂N + 2)² elements below any N ≥ 1.  This forces
///   density → 0 directly, and summability by partial summation: with
///   c(N) = #{elements < N}, Σ 1/(a+1) over elements < N equals
///   c(N)/N + Σ_{M<N} c(M)·(1/M − 1/(M+1)) ≤ 1 + Σ (log₂M + 2)²/M² < ∞.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Growth {
    Pow2,
    Square,
    PolyLog,
}

/// Gap/run witness about the spacing of the enumeration.
///
/// * `GapsDiverge`: consecutive gaps are nondecreasing and unbounded.  This
///   forces vanishing uniform (window) density — growth alone does not: a
///   doubling skeleton can carry paired clusters of full window density.
/// * `FullRuns`: for every L the set contains a solid run of L consecutive
///   naturals.  This forces the uniform upper density to equal 1 (witness
///   windows of density one), so it is an anti-sparseness certificate.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Spread {
    GapsDiverge,
    FullRuns,
}

/// A named strictly increasing enumeration with an exact membership test.
/// The generator and the membership closure must agree; registered instances
/// are property-tested for this.
#[derive(Clone)]
pub struct EnumSet {
    pub name: String,
    gen: Arc<dyn Fn(u64) -> Option<Nat> + Send + Sync>,
    member: Arc<dyn Fn(Nat) -> bool + Send + Sync>,
    pub growth: Option<Growth>,
    pub spread: Option<Spread>,
}

impl EnumSet {
    pub fn new(
        name: impl Into<String>,
        gen: Arc<dyn Fn(u64) -> Option<Nat> + Send + Sync>,
        member: Arc<dyn Fn(Nat) -> bool + Send + Sync>,
        growth: Option<Growth>,
        spread: Option<Spread>,
    ) -> EnumSet {
        EnumSet { name: name.into(), gen, member, growth, spread }
    }

    pub fn nth(&self, i: u64) -> Option<Nat> {
        (self.gen)(i)
    }

    pub fn contains(&self, n: Nat) -> bool {
        (self.member)(n)
    }

    pub fn iter(&self) -> impl Iterator<Item = Nat> + '_ {
        (0..).map_while(move |i| (self.gen)(i))
    }

    /// Registered enumerations reachable from the textual grammar.
    pub fn registry(name: &str) -> Option<EnumSet> {
        match name {
            "pow2" => Some(EnumSet::new(
                "pow2",
                Arc::new(|i| if i < 64 { Some(1u64 << i) } else { None }),
                Arc::new(|n: u64| n.is_power_of_two()),
                Some(Growth::Pow2),
                Some(Spread::GapsDiverge),
            )),
            "squares" => Some(EnumSet::new(
                "squares",
                Arc::new(|i| i.checked_mul(i)),
                Arc::new(|n: u64| {
                    let r = n.isqrt();
                    r * r == n
                }),
                Some(Growth::Square),
                Some(Spread::GapsDiverge),
            )),
            // Same elements as pow2, registered without any witness: exercises
            // the honest-Unknown path of deciders that require witnesses.
            "pow2-plain" => Some(EnumSet::new(
                "pow2-plain",
                Arc::new(|i| if i < 64 { Some(1u64 << i) } else { None }),
                Arc::new(|n: u64| n.is_power_of_two()),
                None,
                None,
            )),
            // Indices n_k = 2(4^k − 1)/3, i.e. binary 10, 1010, 101010, ….
            // Reading digits least-significant first, the standard enumeration
            // of eventually-zero points sends n_k to the alternating word
            // (01)^k, so the images converge to the alternating point — one
            // with infinitely many ones.
            "alt-block-idx" => Some(EnumSet::new(
                "alt-block-idx",
                Arc::new(|i| {
                    if i >= 31 {
                        return None;
                    }
                    Some(2 * (4u64.pow(i as u32) - 1) / 3)
                }),
                Arc::new(|n: u64| {
                    // n = 2(4^k−1)/3 ⟺ n even and 3n/2 + 1 a power of 4.
                    if n % 2 != 0 {
                        return false;
                    }
                    match (n / 2).checked_mul(3).and_then(|x| x.checked_add(1)) {
                        Some(m) => m.is_power_of_two() && m.trailing_zeros() % 2 == 0,
                        None => false,
                    }
                }),
                Some(Growth::Pow2),
                Some(Spread::GapsDiverge),
            )),
            // ∪_{k≥1} [2^k, 2^k + k): a poly-log-count set containing solid
            // runs of every length.  Reciprocal-summable and of vanishing
            // density, yet of full upper window density — the standard
            // separator between the density and window-density ideals.
            "log-ramp" => Some(EnumSet::new(
                "log-ramp",
                Arc::new(|i| {
                    // Block k (k ≥ 1) holds k elements; blocks 1..k hold
                    // T(k+1) = k(k+1)/2 in total.  Blocks above 63 overflow.
                    if i >= 63 * 64 / 2 {
                        return None;
                    }
                    let mut k = (1 + (8 * i + 1).isqrt()) / 2;
                    while k * (k - 1) / 2 > i {
                        k -= 1;
                    }
                    while (k + 1) * k / 2 <= i {
                        k += 1;
                    }
                    Some((1u64 << k) + (i - k * (k - 1) / 2))
                }),
                Arc::new(|n: u64| {
                    if n < 2 {
                        return false;
                    }
                    let k = 63 - n.leading_zeros() as u64;
                    n - (1u64 << k) < k
                }),
                Some(Growth::PolyLog),
                Some(Spread::FullRuns),
            )),
            _ => None,
        }
    }
}

impl fmt::Debug for EnumSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "EnumSet({})", self.name)
    }
}

// ---------------------------------------------------------------------------
// Branch bit-oracles
// ---------------------------------------------------------------------------

/// A branch of the full binary tree given as a total bit oracle, used to
/// derive planar pseudo-intersection certificates.  Oracles built from an
/// explicit (prefix, period) pair carry a parseable name `BITS:PERIOD`; lazy
/// oracles carry an opaque name and can be printed but not re-parsed.
#[derive(Clone)]
pub struct BranchBits {
    pub name: String,
    bit: Arc<dyn Fn(u64) -> bool + Send + Sync>,
}

impl BranchBits {
    pub fn new(name: impl Into<String>, bit: Arc<dyn Fn(u64) -> bool + Send + Sync>) -> Self {
        BranchBits { name: name.into(), bit }
    }

    /// Branch whose bits are `head` followed by `period` repeated forever.
    pub fn from_ep(head: &BinWord, period: &BinWord) -> Result<BranchBits, SetError> {
        if period.len() == 0 {
            return Err(SetError::Malformed("branch period must be nonempty".into()));
        }
        let name = format!("{}:{}", head.digits(), period.digits());
        let (h, p) = (*head, *period);
        Ok(BranchBits::new(
            name,
            Arc::new(move |i| {
                if i < h.len() as u64 {
                    h.bit(i as u32) != 0
                } else {
                    p.bit(((i - h.len() as u64) % p.len() as u64) as u32) != 0
                }
            }),
        ))
    }

    /// Parses the `BITS:PERIOD` form produced by [`Self::from_ep`].
    pub fn parse(name: &str) -> Result<BranchBits, SetError> {
        let (h, p) = name.split_once(':').ok_or_else(|| {
            SetError::Parse(format!("branch oracle `{name}` is not of the form BITS:PERIOD"))
        })?;
        let head = if h.is_empty() {
            BinWord::empty()
        } else {
            BinWord::parse(h).ok_or_else(|| SetError::Parse(format!("bad branch bits `{h}`")))?
        };
        let period = BinWord::parse(p)
            .ok_or_else(|| SetError::Parse(format!("bad branch period `{p}`")))?;
        BranchBits::from_ep(&head, &period)
    }

    /// Recovers the (head, period) pair for oracles named `BITS:PERIOD`;
    /// `None` for lazy oracles with opaque names.
    pub fn ep_parts(&self) -> Option<(BinWord, BinWord)> {
        let (h, p) = self.name.split_once(':')?;
        let head = if h.is_empty() {
            BinWord::empty()
        } else {
            BinWord::parse(h)?
        };
        let period = BinWord::parse(p)?;
        if period.len() == 0 {
            return None;
        }
        Some((head, period))
    }

    pub fn bit(&self, i: u64) -> bool {
        (self.bit)(i)
    }

    /// val(branch↾l) = Σ_{p<l} bit(p)·2^p; `None` for l > 62.
    pub fn prefix_val(&self, l: u64) -> Option<Nat> {
        if l > 62 {
            return None;
        }
        let mut v = 0u64;
        for p in 0..l {
            if self.bit(p) {
                v |= 1u64 << p;
            }
        }
        Some(v)
    }

    pub fn prefix_word(&self, l: u32) -> Option<BinWord> {
        if l as u64 > 62 {
            return None;
        }
        let mut w = BinWord::empty();
        for p in 0..l {
            w = w.push(self.bit(p as u64) as u8);
        }
        Some(w)
    }

    /// Length m_j of the j-th branch prefix ending in 1 (j from 0), searching
    /// only up to length 63 — longer anchors index no u64-representable
    /// certificate points.
    pub fn anchor(&self, j: u64) -> Option<u64> {
        let mut seen = 0u64;
        for m in 1..=63u64 {
            if self.bit(m - 1) {
                if seen == j {
                    return Some(m);
                }
                seen += 1;
            }
        }
        None
    }

    /// Column idx(branch↾m_j) of the j-th anchor.
    pub fn anchor_column(&self, j: u64) -> Option<Nat> {
        let m = self.anchor(j)?;
        if m > 62 {
            return None;
        }
        Some((1u64 << m) + self.prefix_val(m)? - 1)
    }

    /// Row 2^l + val(branch↾l) of the certificate at level l ≤ 62.
    pub fn cert_row(&self, l: u32) -> Option<Nat> {
        if l > 62 {
            return None;
        }
        Some((1u64 << l) + self.prefix_val(l as u64)?)
    }

    /// Exact membership of (n, k) in the certificate set: n must be the
    /// column of the anchor u = branch↾m (some prefix ending in 1), and k a
    /// certificate row at level ≥ m + j where j is the anchor's rank.
    pub fn cert_member(&self, n: Nat, k: Nat) -> bool {
        if n == u64::MAX {
            return false;
        }
        let u = BinWord::from_idx(n);
        let m = u.len() as u64;
        if m == 0 || m > 62 || u.last() != Some(1) {
            return false;
        }
        // u must be the actual branch prefix of length m.
        for p in 0..m {
            if (u.bit(p as u32) != 0) != self.bit(p) {
                return false;
            }
        }
        // Rank: number of strictly shorter prefixes ending in 1.
        let mut j = 0u64;
        for p in 0..(m - 1) {
            if self.bit(p) {
                j += 1;
            }
        }
        if k == 0 {
            return false;
        }
        let l = 63 - k.leading_zeros() as u64;
        l >= m + j && l <= 62 && self.cert_row(l as u32) == Some(k)
    }

    /// Number of ones among the first `l` bits.
    pub fn ones_upto(&self, l: u64) -> u64 {
        (0..l).filter(|p| self.bit(*p)).count() as u64
    }
}

impl fmt::Debug for BranchBits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BranchBits({})", self.name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::natsets::Point;

    #[test]
    fn nu2_parts_partition_positive_naturals() {
        let f = PartFamily::Nu2;
        for n in 1..5000u64 {
            let k = f.locate(&Point::N(n)).unwrap();
            assert!(f.part(k).unwrap().member_nat(n), "n={n} not in its own part");
            for other in 0..12 {
                if other != k {
                    assert!(
                        !f.part(other).unwrap().member_nat(n),
                        "n={n} in parts {k} and {other}"
                    );
                }
            }
        }
        assert_eq!(f.locate(&Point::N(0)), None);
    }

    #[test]
    fn nu2_tail_union_matches_brute_union() {
        let f = PartFamily::Nu2;
        for t in 0..6u64 {
            let tail = f.tail_union(t).unwrap();
            for n in 0..2000u64 {
                let brute = n != 0 && (n.trailing_zeros() as u64) >= t;
                assert_eq!(tail.member_nat(n), brute, "t={t} n={n}");
            }
        }
    }

    #[test]
    fn dyadic_blocks_cover_omega() {
        let f = PartFamily::DyadicBlocks;
        for n in 0..5000u64 {
            let k = f.locate(&Point::N(n)).unwrap();
            assert!(f.part(k).unwrap().member_nat(n));
        }
        // Block boundaries: part(0)={0}, part(1)={1,2}, part(2)={3..6}.
        assert!(f.part(0).unwrap().member_nat(0));
        assert!(!f.part(0).unwrap().member_nat(1));
        assert!(f.part(2).unwrap().member_nat(3));
        assert!(f.part(2).unwrap().member_nat(6));
        assert!(!f.part(2).unwrap().member_nat(7));
    }

    #[test]
    fn registered_enums_generator_matches_membership() {
        for name in ["pow2", "squares", "pow2-plain", "alt-block-idx", "log-ramp"] {
            let e = EnumSet::registry(name).unwrap();
            let listed: Vec<u64> = e.iter().take_while(|n| *n < 100_000).collect();
            // Strictly increasing.
            for w in listed.windows(2) {
                assert!(w[0] < w[1], "{name} not strictly increasing");
            }
            for n in 0..100_000u64 {
                assert_eq!(
                    e.contains(n),
                    listed.contains(&n),
                    "{name} membership mismatch at {n}"
                );
            }
        }
    }

    #[test]
    fn alt_block_indices_closed_form() {
        let e = EnumSet::registry("alt-block-idx").unwrap();
        // n_k = 2(4^k − 1)/3: 0, 2, 10, 42, 170, ...
        let got: Vec<u64> = e.iter().take(5).collect();
        assert_eq!(got, vec![0, 2, 10, 42, 170]);
    }

    #[test]
    fn log_ramp_closed_form_and_counts() {
        let e = EnumSet::registry("log-ramp").unwrap();
        // Blocks [2,3), [4,6), [8,11), [16,20), ...
        let got: Vec<u64> = e.iter().take(10).collect();
        assert_eq!(got, vec![2, 4, 5, 8, 9, 10, 16, 17, 18, 19]);
        // Count below 2^m is m(m−1)/2, comfortably within the poly-log bound.
        for m in 1..16u64 {
            let n = 1u64 << m;
            let count = e.iter().take_while(|x| *x < n).count() as u64;
            assert_eq!(count, m * (m - 1) / 2);
            assert!(count <= (m + 2) * (m + 2));
        }
        // Solid run of length 9 inside block 9.
        for n in (1 << 9)..(1 << 9) + 9 {
            assert!(e.contains(n));
        }
        assert!(!e.contains((1 << 9) + 9));
    }

    #[test]
    fn diag_rows_parts_tile_the_triangle() {
        let f = PartFamily::DiagRows;
        for n in 0..30u64 {
            for r in 0..30u64 {
                let p = Point::pair(n, r);
                let loc = f.locate(&p);
                assert_eq!(loc, if n >= r { Some(r) } else { None }, "({n},{r})");
                if let Some(k) = loc {
                    assert!(f.part(k).unwrap().member(&p));
                }
            }
        }
        // A finite index selection decomposes into rectangles.
        let idx = DescribedSet::finite(vec![0, 2]);
        let pieces = f.plane_pieces(&idx, &DescribedSet::full()).unwrap();
        assert_eq!(pieces.len(), 2);
        // An infinite one does not.
        assert!(f.plane_pieces(&DescribedSet::full(), &DescribedSet::full()).is_none());
        assert!(f.tail_union(0).is_none());
    }

    #[test]
    fn branch_oracle_ep_parts_round_trip() {
        let b = BranchBits::parse("10:110").unwrap();
        let (h, p) = b.ep_parts().unwrap();
        assert_eq!(h.digits(), "10");
        assert_eq!(p.digits(), "110");
        let lazy = BranchBits::new("every-third", Arc::new(|i| i % 3 == 2));
        assert!(lazy.ep_parts().is_none());
        let odd = BranchBits::new("walk:left-most", Arc::new(|_| false));
        assert!(odd.ep_parts().is_none());
    }

    #[test]
    fn branch_oracle_ep_bits_and_anchors() {
        // head = 1 0, period = 1 0 → bits 1,0,1,0,1,0,...
        let b = BranchBits::parse("10:10").unwrap();
        assert!(b.bit(0));
        assert!(!b.bit(1));
        assert!(b.bit(2));
        // Anchors at every odd length m with bit(m−1)=1: m = 1, 3, 5, ...
        assert_eq!(b.anchor(0), Some(1));
        assert_eq!(b.anchor(1), Some(3));
        assert_eq!(b.anchor(2), Some(5));
        // Anchor 0 column: idx((1)) = 2.
        assert_eq!(b.anchor_column(0), Some(2));
        // val(10101↾3) = 1 + 4 = 5 → idx = 2^3 + 5 − 1 = 12.
        assert_eq!(b.anchor_column(1), Some(12));
    }

    #[test]
    fn cert_member_agrees_with_row_formula() {
        let b = BranchBits::parse(":1").unwrap(); // all-ones branch
        // Anchor j has m_j = j+1, column idx(1^{j+1}) = 2^{j+2} − 2.
        assert_eq!(b.anchor_column(0), Some(2));
        assert_eq!(b.anchor_column(1), Some(6));
        // Rows for anchor 0 start at level m_0 + 0 = 1: 2^l + (2^l − 1).
        assert!(b.cert_member(2, 3)); // l = 1: 2 + 1
        assert!(b.cert_member(2, 7)); // l = 2: 4 + 3
        assert!(!b.cert_member(2, 1)); // l = 0 below start
        // Anchor 1 rows start at level m_1 + 1 = 3.
        assert!(b.cert_member(6, 15)); // l = 3: 8 + 7
        assert!(!b.cert_member(6, 7)); // l = 2 below start
        assert!(!b.cert_member(3, 3)); // idx 3 = (0,0) not a branch prefix
    }

    #[test]
    fn lazy_oracle_supported() {
        let b = BranchBits::new("every-third", Arc::new(|i| i % 3 == 2));
        assert_eq!(b.anchor(0), Some(3)); // first 1 at position 2 → prefix length 3
        assert_eq!(b.ones_upto(9), 3);
    }
}
