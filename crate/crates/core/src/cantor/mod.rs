//! The binary sequence space: points given exactly (eventually periodic) or
//! lazily (bit oracle with a declared definedness horizon), the dyadic
//! ultrametric, cylinder distances, the canonical enumeration of eventually
//! zero points, and codes for closed, countable-limsup, and tree-indexed
//! families of closed sets.

pub mod codes;
pub mod limsup;
pub mod souslin;

use std::cell::RefCell;
use std::fmt;
use std::rc::Rc;

use thiserror::Error;

use crate::words::BinWord;

/// Errors raised by point and tree operations.
#[derive(Debug, Error)]
pub enum CantorError {
    #[error("bit {pos} lies beyond the declared definedness horizon {horizon}")]
    Undefined { pos: u64, horizon: u64 },
    #[error(
        "points agree on the first {agree_to} positions; separating them needs more defined bits"
    )]
    NeedMoreBits { agree_to: u64 },
    #[error("invalid point literal `{0}`: expected `prefix:period` over digits 0/1, period nonempty")]
    BadLiteral(String),
    #[error("the tree rejects its root, so it has no branches")]
    EmptyTree,
    #[error("node {0} admits no child; the tree is not pruned there")]
    NotPruned(String),
    #[error("node {0} is not in the tree")]
    OutsideTree(String),
    #[error("closed-set family defect: {0}")]
    FamilyDefect(String),
    #[error("tree `{name}` is not registered (parameters: {params})")]
    UnknownTree { name: String, params: String },
}

/// An exact dyadic distance value: zero or a power 2^{-k}.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Dyadic {
    Zero,
    /// The value 2^{-neg_exp}; `Pow2Neg(0)` is 1.
    Pow2Neg(u64),
}

impl Dyadic {
    pub fn is_zero(self) -> bool {
        matches!(self, Dyadic::Zero)
    }

    /// Whether the value is at most 2^{-m}.
    pub fn at_most_pow(self, m: u64) -> bool {
        match self {
            Dyadic::Zero => true,
            Dyadic::Pow2Neg(k) => k >= m,
        }
    }

    pub fn as_f64(self) -> f64 {
        match self {
            Dyadic::Zero => 0.0,
            Dyadic::Pow2Neg(k) => (0.5f64).powi(k.min(1070) as i32),
        }
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        use std::cmp::Ordering::*;
        match (self, other) {
            (Dyadic::Zero, Dyadic::Zero) => Equal,
            (Dyadic::Zero, _) => Less,
            (_, Dyadic::Zero) => Greater,
            // Larger exponent k means a smaller value 2^{-k}.
            (Dyadic::Pow2Neg(a), Dyadic::Pow2Neg(b)) => b.cmp(a),
        }
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dyadic::Zero => write!(f, "0"),
            Dyadic::Pow2Neg(0) => write!(f, "1"),
            Dyadic::Pow2Neg(k) => write!(f, "2^-{k}"),
        }
    }
}

/// An eventually periodic 0/1 sequence: `prefix` followed by `period`
/// repeated forever. The period is always nonempty.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct EpPoint {
    prefix: Vec<u8>,
    period: Vec<u8>,
}

impl EpPoint {
    pub fn new(prefix: Vec<u8>, period: Vec<u8>) -> Self {
        assert!(!period.is_empty(), "period must be nonempty");
        assert!(
            prefix.iter().chain(period.iter()).all(|&b| b <= 1),
            "letters must be 0 or 1"
        );
        EpPoint { prefix, period }
    }

    /// The constant-zero point.
    pub fn zeros() -> Self {
        EpPoint::new(Vec::new(), vec![0])
    }

    /// The constant-one point.
    pub fn ones() -> Self {
        EpPoint::new(Vec::new(), vec![1])
    }

    /// The word `u` followed by zeros forever.
    pub fn word_then_zeros(u: &BinWord) -> Self {
        EpPoint::new(u.letters(), vec![0])
    }

    /// The word `u` followed by ones forever.
    pub fn word_then_ones(u: &BinWord) -> Self {
        EpPoint::new(u.letters(), vec![1])
    }

    pub fn bit(&self, n: u64) -> u8 {
        let p = self.prefix.len() as u64;
        if n < p {
            self.prefix[n as usize]
        } else {
            self.period[((n - p) % self.period.len() as u64) as usize]
        }
    }

    pub fn prefix_len(&self) -> u64 {
        self.prefix.len() as u64
    }

    pub fn period_len(&self) -> u64 {
        self.period.len() as u64
    }

    /// Whether the sequence is eventually zero.
    pub fn eventually_zero(&self) -> bool {
        self.period.iter().all(|&b| b == 0)
    }

    /// Two eventually periodic sequences are equal exactly when they agree up
    /// to the longer prefix plus one common period of the two cycles.
    pub fn same_point(&self, other: &EpPoint) -> bool {
        let head = self.prefix_len().max(other.prefix_len());
        let cycle = num::integer::lcm(self.period_len(), other.period_len());
        (0..head + cycle).all(|n| self.bit(n) == other.bit(n))
    }

    /// Parse a `prefix:period` literal, e.g. `01:0` for 0 1 0 0 0 ….
    pub fn parse(text: &str) -> Result<Self, CantorError> {
        let bad = || CantorError::BadLiteral(text.to_string());
        let (head, cycle) = text.split_once(':').ok_or_else(bad)?;
        let digits = |part: &str| -> Result<Vec<u8>, CantorError> {
            part.chars()
                .map(|c| match c {
                    '0' => Ok(0),
                    '1' => Ok(1),
                    _ => Err(bad()),
                })
                .collect()
        };
        let period = digits(cycle)?;
        if period.is_empty() {
            return Err(bad());
        }
        Ok(EpPoint::new(digits(head)?, period))
    }
}

impl fmt::Display for EpPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.prefix {
            write!(f, "{b}")?;
        }
        write!(f, ":")?;
        for &b in &self.period {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

/// A lazily produced point: a generator maps the bits computed so far to the
/// next bit, up to a declared horizon. Computed bits are cached so that deep
/// probes do not recompute the walk.
pub struct LazyPoint {
    label: String,
    horizon: u64,
    gen: Box<dyn Fn(&[u8]) -> Option<u8>>,
    cache: RefCell<Vec<u8>>,
}

impl LazyPoint {
    pub fn new(
        label: impl Into<String>,
        horizon: u64,
        gen: impl Fn(&[u8]) -> Option<u8> + 'static,
    ) -> Self {
        LazyPoint {
            label: label.into(),
            horizon,
            gen: Box::new(gen),
            cache: RefCell::new(Vec::new()),
        }
    }

    pub fn bit(&self, n: u64) -> Result<u8, CantorError> {
        if n >= self.horizon {
            return Err(CantorError::Undefined {
                pos: n,
                horizon: self.horizon,
            });
        }
        let mut cache = self.cache.borrow_mut();
        while (cache.len() as u64) <= n {
            match (self.gen)(&cache) {
                Some(b) => cache.push(b & 1),
                None => {
                    return Err(CantorError::Undefined {
                        pos: cache.len() as u64,
                        horizon: cache.len() as u64,
                    })
                }
            }
        }
        Ok(cache[n as usize])
    }
}

/// A point of the binary sequence space.
#[derive(Clone)]
pub enum CantorPoint {
    Periodic(EpPoint),
    Lazy(Rc<LazyPoint>),
}

impl CantorPoint {
    pub fn zeros() -> Self {
        CantorPoint::Periodic(EpPoint::zeros())
    }

    pub fn ones() -> Self {
        CantorPoint::Periodic(EpPoint::ones())
    }

    pub fn word_then_zeros(u: &BinWord) -> Self {
        CantorPoint::Periodic(EpPoint::word_then_zeros(u))
    }

    pub fn lazy(
        label: impl Into<String>,
        horizon: u64,
        gen: impl Fn(&[u8]) -> Option<u8> + 'static,
    ) -> Self {
        CantorPoint::Lazy(Rc::new(LazyPoint::new(label, horizon, gen)))
    }

    pub fn bit(&self, n: u64) -> Result<u8, CantorError> {
        match self {
            CantorPoint::Periodic(p) => Ok(p.bit(n)),
            CantorPoint::Lazy(l) => l.bit(n),
        }
    }

    /// The declared definedness horizon; `None` means total.
    pub fn defined_to(&self) -> Option<u64> {
        match self {
            CantorPoint::Periodic(_) => None,
            CantorPoint::Lazy(l) => Some(l.horizon),
        }
    }

    pub fn as_periodic(&self) -> Option<&EpPoint> {
        match self {
            CantorPoint::Periodic(p) => Some(p),
            CantorPoint::Lazy(_) => None,
        }
    }

    /// The first `n` bits as a digit string, e.g. `0101` for n = 4.
    pub fn digits(&self, n: u64) -> Result<String, CantorError> {
        let mut out = String::with_capacity(n as usize);
        for i in 0..n {
            out.push(if self.bit(i)? == 1 { '1' } else { '0' });
        }
        Ok(out)
    }
}

impl fmt::Display for CantorPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CantorPoint::Periodic(p) => write!(f, "{p}"),
            CantorPoint::Lazy(l) => write!(f, "{}(defined to {})", l.label, l.horizon),
        }
    }
}

/// The dyadic distance between two points: 2^{-n} at the first position n
/// where they differ, zero when equal.
///
/// For two eventually periodic points equality is decided exactly; when a
/// lazy point is involved and no difference appears inside the defined range,
/// the comparison reports how far the points agree instead of guessing.
pub fn metric(x: &CantorPoint, y: &CantorPoint) -> Result<Dyadic, CantorError> {
    if let (CantorPoint::Lazy(a), CantorPoint::Lazy(b)) = (x, y) {
        if Rc::ptr_eq(a, b) {
            return Ok(Dyadic::Zero);
        }
    }
    let scan_to: u64 = match (x, y) {
        (CantorPoint::Periodic(a), CantorPoint::Periodic(b)) => {
            let head = a.prefix_len().max(b.prefix_len());
            head + num::integer::lcm(a.period_len(), b.period_len())
        }
        _ => {
            let hx = x.defined_to().unwrap_or(u64::MAX);
            let hy = y.defined_to().unwrap_or(u64::MAX);
            hx.min(hy)
        }
    };
    for n in 0..scan_to {
        let (bx, by) = match (x.bit(n), y.bit(n)) {
            (Ok(bx), Ok(by)) => (bx, by),
            // The generator ran dry before its declared horizon.
            _ => return Err(CantorError::NeedMoreBits { agree_to: n }),
        };
        if bx != by {
            return Ok(Dyadic::Pow2Neg(n));
        }
    }
    match (x, y) {
        (CantorPoint::Periodic(_), CantorPoint::Periodic(_)) => Ok(Dyadic::Zero),
        _ => Err(CantorError::NeedMoreBits { agree_to: scan_to }),
    }
}

/// Distance from a point to the cylinder named by `s`: 2^{-n} at the first
/// position n < |s| where the point leaves the cylinder, zero if it lies
/// inside.
pub fn cylinder_dist(x: &CantorPoint, s: &BinWord) -> Result<Dyadic, CantorError> {
    for n in 0..s.len() {
        if x.bit(n as u64)? != s.bit(n) {
            return Ok(Dyadic::Pow2Neg(n as u64));
        }
    }
    Ok(Dyadic::Zero)
}

/// Whether two points agree on all positions below `m`, i.e. lie within
/// 2^{-m} of each other.
pub fn agrees_to(x: &CantorPoint, y: &CantorPoint, m: u64) -> Result<bool, CantorError> {
    for n in 0..m {
        if x.bit(n)? != y.bit(n)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The canonical enumeration of the eventually zero points: n is sent to its
/// binary digits, least significant first, padded with zeros forever. This is
/// a bijection from the natural numbers onto the eventually zero points; 0
/// names the all-zero point.
pub fn q_enum(n: u64) -> EpPoint {
    let mut digits = Vec::new();
    let mut m = n;
    while m > 0 {
        digits.push((m & 1) as u8);
        m >>= 1;
    }
    EpPoint::new(digits, vec![0])
}

/// The inverse of the enumeration on eventually zero points: the number whose
/// binary digits (least significant first) the point carries. `None` when the
/// point is not eventually zero or a one sits at position 64 or beyond.
pub fn q_enum_inverse(p: &EpPoint) -> Option<u64> {
    if !p.eventually_zero() {
        return None;
    }
    let mut n: u64 = 0;
    for (i, &b) in p.prefix.iter().enumerate() {
        if b == 1 {
            if i >= 64 {
                return None;
            }
            n |= 1u64 << i;
        }
    }
    Some(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(lit: &str) -> CantorPoint {
        CantorPoint::Periodic(EpPoint::parse(lit).unwrap())
    }

    #[test]
    fn distances_between_landmark_points() {
        assert_eq!(metric(&pt(":0"), &pt(":1")).unwrap(), Dyadic::Pow2Neg(0));
        assert_eq!(
            metric(&pt(":0"), &pt("000001:0")).unwrap(),
            Dyadic::Pow2Neg(5)
        );
        assert_eq!(metric(&pt(":0"), &pt(":0")).unwrap(), Dyadic::Zero);
    }

    #[test]
    fn cylinder_distance_counts_the_first_escape() {
        let s = BinWord::from_bits(&[0, 0, 1]);
        assert_eq!(cylinder_dist(&pt(":0"), &s).unwrap(), Dyadic::Pow2Neg(2));
        assert_eq!(cylinder_dist(&pt("001:0"), &s).unwrap(), Dyadic::Zero);
        assert_eq!(cylinder_dist(&pt(":1"), &s).unwrap(), Dyadic::Pow2Neg(0));
    }

    #[test]
    fn periodic_equality_sees_through_different_presentations() {
        // 0 1 0 1 … presented three ways.
        assert!(EpPoint::parse(":01")
            .unwrap()
            .same_point(&EpPoint::parse("01:01").unwrap()));
        assert!(EpPoint::parse(":01")
            .unwrap()
            .same_point(&EpPoint::parse("0:10").unwrap()));
        assert!(!EpPoint::parse(":01")
            .unwrap()
            .same_point(&EpPoint::parse(":10").unwrap()));
        assert_eq!(
            metric(&pt(":01"), &pt("0:10")).unwrap(),
            Dyadic::Zero
        );
    }

    #[test]
    fn enumeration_of_eventually_zero_points_starts_as_frozen() {
        assert!(q_enum(0).same_point(&EpPoint::zeros()));
        assert!(q_enum(1).same_point(&EpPoint::parse("1:0").unwrap()));
        assert!(q_enum(2).same_point(&EpPoint::parse("01:0").unwrap()));
        assert!(q_enum(6).same_point(&EpPoint::parse("011:0").unwrap()));
    }

    #[test]
    fn enumeration_is_injective_and_lands_on_eventually_zero_points() {
        let mut seen = std::collections::HashSet::new();
        for n in 0..(1u64 << 12) {
            let p = q_enum(n);
            assert!(p.eventually_zero());
            assert_eq!(q_enum_inverse(&p), Some(n));
            // Canonical form: digit strings are unique.
            assert!(seen.insert(p.to_string()), "repeat at {n}");
        }
    }

    #[test]
    fn first_sixty_four_enumeration_values_are_pairwise_distinct() {
        let pts: Vec<EpPoint> = (0..64).map(q_enum).collect();
        for i in 0..pts.len() {
            for j in 0..i {
                assert!(!pts[i].same_point(&pts[j]), "{i} vs {j}");
            }
        }
    }

    #[test]
    fn ultrametric_inequality_holds_on_a_periodic_corpus() {
        let mut rng = crate::util::SplitMix64::new(0x5eed_cafe);
        let mut corpus = Vec::new();
        for _ in 0..24 {
            let plen = rng.below(6) as usize;
            let qlen = 1 + rng.below(4) as usize;
            let prefix: Vec<u8> = (0..plen).map(|_| (rng.next_u64() & 1) as u8).collect();
            let period: Vec<u8> = (0..qlen).map(|_| (rng.next_u64() & 1) as u8).collect();
            corpus.push(CantorPoint::Periodic(EpPoint::new(prefix, period)));
        }
        for x in &corpus {
            for y in &corpus {
                for z in &corpus {
                    let dxz = metric(x, z).unwrap();
                    let dxy = metric(x, y).unwrap();
                    let dyz = metric(y, z).unwrap();
                    assert!(dxz <= dxy.max(dyz));
                }
            }
        }
    }

    #[test]
    fn lazy_points_respect_their_horizon() {
        let x = CantorPoint::lazy("alternating", 6, |sofar| Some((sofar.len() % 2) as u8));
        assert_eq!(x.bit(5).unwrap(), 1);
        assert!(matches!(
            x.bit(6),
            Err(CantorError::Undefined { pos: 6, horizon: 6 })
        ));
        // Distance to a periodic point that agrees everywhere defined: undecided.
        assert!(matches!(
            metric(&x, &pt(":01")),
            Err(CantorError::NeedMoreBits { agree_to: 6 })
        ));
        // A difference inside the defined range is found.
        assert_eq!(metric(&x, &pt(":0")).unwrap(), Dyadic::Pow2Neg(1));
    }

    #[test]
    fn literal_parse_and_display_round_trip() {
        for lit in [":0", ":1", "01:0", "0:10", "1101:001"] {
            let p = EpPoint::parse(lit).unwrap();
            assert_eq!(p.to_string(), lit);
        }
        for bad in ["", "01", ":", "2:0", "01:", "0 1:0"] {
            assert!(EpPoint::parse(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn dyadic_values_order_and_print_correctly() {
        assert!(Dyadic::Zero < Dyadic::Pow2Neg(10));
        assert!(Dyadic::Pow2Neg(10) < Dyadic::Pow2Neg(3));
        assert!(Dyadic::Pow2Neg(3) < Dyadic::Pow2Neg(0));
        assert!(Dyadic::Pow2Neg(7).at_most_pow(7));
        assert!(!Dyadic::Pow2Neg(6).at_most_pow(7));
        assert!(Dyadic::Zero.at_most_pow(1000));
        assert_eq!(Dyadic::Pow2Neg(0).to_string(), "1");
        assert_eq!(Dyadic::Pow2Neg(5).to_string(), "2^-5");
        assert_eq!(Dyadic::Zero.to_string(), "0");
    }
}
