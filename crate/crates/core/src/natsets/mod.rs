//! Exact, closed algebra of described subsets of ω and of ω² (via the fixed
//! pairing π(n,k) = 2^n(2k+1) − 1).
//!
//! Every set is a generator tree whose membership predicate is decidable by
//! structural recursion.  A normal-form layer ([`ep::EpSet`]) makes Boolean
//! combinations of finite sets, intervals, residue classes and bit-mask sets
//! fully exact; sparser leaves (power tails, column-prefix sets, enumerations)
//! keep exactness through dedicated structural rules.  Anything outside the
//! supported fragment fails loudly rather than guessing.

pub mod ep;
pub mod families;
pub mod grammar;
mod proofs;

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::fmt;
use std::sync::Arc;

use num::rational::Ratio;
use num::BigInt;
use num::BigRational;

use crate::util::{cmp_pair_code, pair_u64, unpair_u64};
use crate::words::BinWord;

pub use families::{BranchBits, EnumSet, Growth, PartFamily, Spread};

/// Element of the line carrier ω.
pub type Nat = u64;

/// Hard cap for exhaustive scans; statistics beyond this are a resource error.
pub const MAX_SCAN: u64 = 1 << 22;

/// Reciprocal sums are exact rationals; past this many terms the denominators
/// grow uselessly large, so the operation refuses instead of degrading.
pub const RECIP_TERM_CAP: u64 = 1 << 14;

/// Errors raised by set construction, parsing and statistics.
#[derive(Debug, thiserror::Error)]
pub enum SetError {
    #[error("carrier mismatch: {0}")]
    Carrier(String),
    #[error("malformed set: {0}")]
    Malformed(String),
    #[error("resource limit exceeded: {0}")]
    Resource(String),
    #[error("outside the supported set fragment: {0}")]
    Fragment(String),
    #[error("parse error: {0}")]
    Parse(String),
}

/// The carrier a set lives on: ω, or a plane whose rows are again a carrier.
/// `Plane(Line)` is ω²; one more level (ω × ω²) is the deepest anything in
/// this crate uses.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Carrier {
    Line,
    Plane(Box<Carrier>),
}

impl Carrier {
    pub fn plane1() -> Carrier {
        Carrier::Plane(Box::new(Carrier::Line))
    }

    pub fn depth(&self) -> u32 {
        match self {
            Carrier::Line => 1,
            Carrier::Plane(inner) => 1 + inner.depth(),
        }
    }
}

impl fmt::Display for Carrier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Carrier::Line => write!(f, "line"),
            Carrier::Plane(inner) => write!(f, "plane({inner})"),
        }
    }
}

/// A point of some carrier: a natural, or a (column, rest) pair.
#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub enum Point {
    N(Nat),
    P(Nat, Box<Point>),
}

impl Point {
    pub fn pair(n: Nat, k: Nat) -> Point {
        Point::P(n, Box::new(Point::N(k)))
    }

    pub fn carrier(&self) -> Carrier {
        match self {
            Point::N(_) => Carrier::Line,
            Point::P(_, rest) => Carrier::Plane(Box::new(rest.carrier())),
        }
    }

    pub fn as_nat(&self) -> Option<Nat> {
        match self {
            Point::N(n) => Some(*n),
            _ => None,
        }
    }

    pub fn as_pair(&self) -> Option<(Nat, Nat)> {
        match self {
            Point::P(n, rest) => rest.as_nat().map(|k| (*n, k)),
            _ => None,
        }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::N(n) => write!(f, "{n}"),
            Point::P(n, rest) => write!(f, "({n},{rest})"),
        }
    }
}

pub(crate) enum Node {
    /// Finite list, sorted and deduplicated.
    Finite(Vec<Nat>),
    /// Inclusive interval [lo, hi]; `hi = None` means unbounded.
    Interval { lo: Nat, hi: Option<Nat> },
    /// {n : n ≡ a (mod m)}, with a < m, m ≥ 1.
    Residue { a: Nat, m: Nat },
    /// {n : n & mask == pattern}; pattern ⊆ mask.
    BitMask { mask: Nat, pattern: Nat },
    /// {2^l + add : l ≥ start}; add < 2^start.
    PowerTail { add: Nat, start: u32 },
    /// {idx(u) : u a binary word extending `word`} — the column indices of a
    /// whole subtree of the binary tree.
    PrefixCols { word: BinWord },
    /// Strictly increasing registered enumeration.
    Enumerated(EnumSet),
    /// Union of the parts of a registered partition family selected by a line
    /// set of indices.
    PartitionUnion { family: PartFamily, indices: DescribedSet },
    /// {(c, k) : k ∈ ω} on ω².
    Column(Nat),
    /// {(n, r) : n ∈ ω} on ω².
    Row(Nat),
    /// cols × rows; cols is a line set, rows lives on the inner carrier.
    Rect { cols: DescribedSet, rows: DescribedSet },
    /// Pseudo-intersection certificate set for the anchored planar scheme,
    /// determined by a branch bit-oracle: the union over anchors u_j (prefixes
    /// of the branch ending in 1, j-th in order, |u_j| = m_j) of
    /// {(idx(u_j), 2^l + val(branch↾l)) : l ≥ m_j + j}.
    BranchCert(BranchBits),
    /// Diagonal of a branch bit-oracle on the line:
    /// {2^l + val(branch↾l) : l ∈ ω}. Level l contributes the number whose
    /// binary digits are the branch's first l bits followed by a single 1.
    BranchDiag(BranchBits),
    Union(DescribedSet, DescribedSet),
    Inter(DescribedSet, DescribedSet),
    Diff(DescribedSet, DescribedSet),
    Compl(DescribedSet),
}

/// An exactly-decidable described subset of ω or ω² (cheaply clonable handle).
#[derive(Clone)]
pub struct DescribedSet(pub(crate) Arc<Node>);

impl fmt::Debug for DescribedSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", grammar::print(self))
    }
}

impl fmt::Display for DescribedSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", grammar::print(self))
    }
}

impl PartialEq for DescribedSet {
    /// Syntactic equality of the printed form (not extensional equality).
    fn eq(&self, other: &Self) -> bool {
        grammar::print(self) == grammar::print(other)
    }
}
impl Eq for DescribedSet {}

fn node(n: Node) -> DescribedSet {
    DescribedSet(Arc::new(n))
}

// ---------------------------------------------------------------------------
// Constructors
// ---------------------------------------------------------------------------

impl DescribedSet {
    pub fn finite(mut elems: Vec<Nat>) -> DescribedSet {
        elems.sort_unstable();
        elems.dedup();
        node(Node::Finite(elems))
    }

    pub fn empty() -> DescribedSet {
        DescribedSet::finite(vec![])
    }

    pub fn empty_of(carrier: &Carrier) -> DescribedSet {
        match carrier {
            Carrier::Line => DescribedSet::empty(),
            Carrier::Plane(inner) => {
                DescribedSet::rect(DescribedSet::empty(), DescribedSet::empty_of(inner))
                    .expect("empty rect")
            }
        }
    }

    pub fn full() -> DescribedSet {
        node(Node::Interval { lo: 0, hi: None })
    }

    pub fn full_of(carrier: &Carrier) -> DescribedSet {
        match carrier {
            Carrier::Line => DescribedSet::full(),
            Carrier::Plane(inner) => {
                DescribedSet::rect(DescribedSet::full(), DescribedSet::full_of(inner))
                    .expect("full rect")
            }
        }
    }

    /// Inclusive interval; `hi = None` is unbounded.
    pub fn interval(lo: Nat, hi: Option<Nat>) -> Result<DescribedSet, SetError> {
        if let Some(h) = hi {
            if h < lo {
                return Err(SetError::Malformed(format!("interval [{lo},{h}] is inverted")));
            }
        }
        Ok(node(Node::Interval { lo, hi }))
    }

    pub fn residue(a: Nat, m: Nat) -> Result<DescribedSet, SetError> {
        if m == 0 {
            return Err(SetError::Malformed("residue modulus must be positive".into()));
        }
        Ok(node(Node::Residue { a: a % m, m }))
    }

    pub fn bitmask(mask: Nat, pattern: Nat) -> Result<DescribedSet, SetError> {
        if pattern & !mask != 0 {
            return Err(SetError::Malformed(format!(
                "bitmask pattern {pattern:#x} has bits outside mask {mask:#x}"
            )));
        }
        Ok(node(Node::BitMask { mask, pattern }))
    }

    /// {2^l + add : l ≥ start}.
    pub fn power_tail(add: Nat, start: u32) -> Result<DescribedSet, SetError> {
        if start > 62 {
            return Err(SetError::Resource("power tail start beyond 2^62".into()));
        }
        if add >= 1u64 << start {
            return Err(SetError::Malformed(format!(
                "power tail offset {add} not below 2^{start}"
            )));
        }
        Ok(node(Node::PowerTail { add, start }))
    }

    pub fn prefix_cols(word: BinWord) -> DescribedSet {
        node(Node::PrefixCols { word })
    }

    pub fn enumerated(e: EnumSet) -> DescribedSet {
        node(Node::Enumerated(e))
    }

    pub fn partition_union(
        family: PartFamily,
        indices: DescribedSet,
    ) -> Result<DescribedSet, SetError> {
        if indices.carrier() != Carrier::Line {
            return Err(SetError::Carrier(format!(
                "partition indices must be a line set, got {}",
                indices.carrier()
            )));
        }
        Ok(node(Node::PartitionUnion { family, indices }))
    }

    pub fn column(c: Nat) -> DescribedSet {
        node(Node::Column(c))
    }

    pub fn row(r: Nat) -> DescribedSet {
        node(Node::Row(r))
    }

    pub fn rect(cols: DescribedSet, rows: DescribedSet) -> Result<DescribedSet, SetError> {
        if cols.carrier() != Carrier::Line {
            return Err(SetError::Carrier(format!(
                "rect column set must be a line set, got {}",
                cols.carrier()
            )));
        }
        Ok(node(Node::Rect { cols, rows }))
    }

    pub fn branch_cert(branch: BranchBits) -> DescribedSet {
        node(Node::BranchCert(branch))
    }

    pub fn branch_diag(branch: BranchBits) -> DescribedSet {
        node(Node::BranchDiag(branch))
    }

    /// Rebuilds a grammar term denoting exactly the same line set as an
    /// eventually periodic fragment, preferring the simplest printable form.
    pub fn from_ep(ep: &ep::EpSet) -> Result<DescribedSet, SetError> {
        let t = ep.threshold();
        let p = ep.period();
        let head = ep.elements_below(t);
        let classes: Vec<Nat> = (0..p).filter(|r| ep.tail_member(*r)).collect();
        if classes.is_empty() {
            return Ok(DescribedSet::finite(head));
        }
        if classes.len() > 512 {
            return Err(SetError::Resource(format!(
                "eventually periodic set with {} residue classes is too wide to print",
                classes.len()
            )));
        }
        let tail = if classes.len() as u64 == p {
            DescribedSet::interval(t, None)?
        } else {
            let residues = DescribedSet::union_all(
                classes.iter().map(|r| DescribedSet::residue(*r, p)).collect::<Result<_, _>>()?,
            )?;
            if t == 0 {
                residues
            } else {
                DescribedSet::inter(DescribedSet::interval(t, None)?, residues)?
            }
        };
        if head.is_empty() {
            Ok(tail)
        } else {
            DescribedSet::union(DescribedSet::finite(head), tail)
        }
    }

    pub fn union(a: DescribedSet, b: DescribedSet) -> Result<DescribedSet, SetError> {
        check_same_carrier("union", &a, &b)?;
        Ok(node(Node::Union(a, b)))
    }

    pub fn inter(a: DescribedSet, b: DescribedSet) -> Result<DescribedSet, SetError> {
        check_same_carrier("inter", &a, &b)?;
        Ok(node(Node::Inter(a, b)))
    }

    pub fn diff(a: DescribedSet, b: DescribedSet) -> Result<DescribedSet, SetError> {
        check_same_carrier("diff", &a, &b)?;
        Ok(node(Node::Diff(a, b)))
    }

    pub fn compl(a: DescribedSet) -> DescribedSet {
        node(Node::Compl(a))
    }

    pub fn union_all(mut sets: Vec<DescribedSet>) -> Result<DescribedSet, SetError> {
        match sets.len() {
            0 => Ok(DescribedSet::empty()),
            1 => Ok(sets.pop().unwrap()),
            _ => {
                let mut acc = sets.remove(0);
                for s in sets {
                    acc = DescribedSet::union(acc, s)?;
                }
                Ok(acc)
            }
        }
    }
}

fn check_same_carrier(op: &str, a: &DescribedSet, b: &DescribedSet) -> Result<(), SetError> {
    let (ca, cb) = (a.carrier(), b.carrier());
    if ca != cb {
        return Err(SetError::Carrier(format!("{op} of {ca} set with {cb} set")));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Carrier and membership
// ---------------------------------------------------------------------------

impl DescribedSet {
    pub fn carrier(&self) -> Carrier {
        match &*self.0 {
            Node::Finite(_)
            | Node::Interval { .. }
            | Node::Residue { .. }
            | Node::BitMask { .. }
            | Node::PowerTail { .. }
            | Node::PrefixCols { .. }
            | Node::BranchDiag(_)
            | Node::Enumerated(_) => Carrier::Line,
            Node::PartitionUnion { family, .. } => family.part_carrier(),
            Node::Column(_) | Node::Row(_) | Node::BranchCert(_) => Carrier::plane1(),
            Node::Rect { rows, .. } => Carrier::Plane(Box::new(rows.carrier())),
            Node::Union(a, _) | Node::Inter(a, _) | Node::Diff(a, _) | Node::Compl(a) => {
                a.carrier()
            }
        }
    }

    /// Membership of a point of the matching carrier.  Points of the wrong
    /// carrier are simply not members.
    pub fn member(&self, p: &Point) -> bool {
        match &*self.0 {
            Node::Finite(v) => p.as_nat().map(|n| v.binary_search(&n).is_ok()).unwrap_or(false),
            Node::Interval { lo, hi } => p
                .as_nat()
                .map(|n| n >= *lo && hi.map(|h| n <= h).unwrap_or(true))
                .unwrap_or(false),
            Node::Residue { a, m } => p.as_nat().map(|n| n % m == *a).unwrap_or(false),
            Node::BitMask { mask, pattern } => {
                p.as_nat().map(|n| n & mask == *pattern).unwrap_or(false)
            }
            Node::PowerTail { add, start } => p
                .as_nat()
                .map(|n| match n.checked_sub(*add) {
                    Some(d) => d.is_power_of_two() && d.trailing_zeros() >= *start,
                    None => false,
                })
                .unwrap_or(false),
            Node::PrefixCols { word } => p
                .as_nat()
                .map(|n| n != u64::MAX && word.is_prefix_of(&BinWord::from_idx(n)))
                .unwrap_or(false),
            Node::Enumerated(e) => p.as_nat().map(|n| e.contains(n)).unwrap_or(false),
            Node::PartitionUnion { family, indices } => family
                .locate(p)
                .map(|k| indices.member(&Point::N(k)))
                .unwrap_or(false),
            Node::Column(c) => {
                matches!(p, Point::P(n, rest) if n == c && rest.carrier() == Carrier::Line)
            }
            Node::Row(r) => p.as_pair().map(|(_, k)| k == *r).unwrap_or(false),
            Node::Rect { cols, rows } => match p {
                Point::P(n, rest) => cols.member(&Point::N(*n)) && rows.member(rest),
                _ => false,
            },
            Node::BranchCert(b) => p.as_pair().map(|(n, k)| b.cert_member(n, k)).unwrap_or(false),
            // A diagonal element of level l lies in [2^l, 2^{l+1}), so the
            // candidate level is the bit length and the row value is checked
            // exactly.
            Node::BranchDiag(b) => p
                .as_nat()
                .map(|n| {
                    n > 0 && {
                        let l = 63 - n.leading_zeros();
                        l <= 62 && b.cert_row(l) == Some(n)
                    }
                })
                .unwrap_or(false),
            Node::Union(a, b) => a.member(p) || b.member(p),
            Node::Inter(a, b) => a.member(p) && b.member(p),
            Node::Diff(a, b) => a.member(p) && !b.member(p),
            Node::Compl(a) => p.carrier() == a.carrier() && !a.member(p),
        }
    }

    pub fn member_nat(&self, n: Nat) -> bool {
        self.member(&Point::N(n))
    }

    pub fn member2(&self, n: Nat, k: Nat) -> bool {
        self.member(&Point::pair(n, k))
    }
}

// ---------------------------------------------------------------------------
// Pairing (re-exported at set level for the public API)
// ---------------------------------------------------------------------------

/// π(n,k) = 2^n(2k+1) − 1; `None` on u64 overflow.
pub fn pair(n: Nat, k: Nat) -> Option<Nat> {
    pair_u64(n, k)
}

/// Inverse of [`pair`]: n = number of trailing zeros of m+1 in base 2, k from
/// the remaining odd part.
pub fn unpair(m: Nat) -> (Nat, Nat) {
    unpair_u64(m)
}

/// Total order on plane points by pair code, computed without materializing
/// the (possibly astronomically large) codes.
pub fn plane_point_cmp(a: (Nat, Nat), b: (Nat, Nat)) -> Ordering {
    cmp_pair_code(a, b)
}

// ---------------------------------------------------------------------------
// Sorted iteration (line carrier)
// ---------------------------------------------------------------------------

impl DescribedSet {
    /// Strictly increasing iterator over the elements.  Sparse shapes (power
    /// tails, enumerations, column-prefix sets) are enumerated structurally;
    /// dense shapes fall back to filtering ω, which is fine for bounded
    /// pulls but will spin on a set that is actually finite.  Callers must
    /// bound their pulls.  `None` only for planar carriers.
    pub fn sorted_iter(&self) -> Option<Box<dyn Iterator<Item = Nat> + '_>> {
        if self.carrier() != Carrier::Line {
            return None;
        }
        Some(self.line_iter())
    }

    fn line_iter(&self) -> Box<dyn Iterator<Item = Nat> + '_> {
        match &*self.0 {
            Node::Finite(v) => Box::new(v.iter().copied()),
            Node::PowerTail { add, start } => {
                let add = *add;
                Box::new((*start..63).map(move |l| (1u64 << l) + add))
            }
            Node::PrefixCols { word } => {
                let base = word.value();
                let step = 1u64 << word.len();
                let wl = word.len();
                Box::new((wl..=62).flat_map(move |l| {
                    let count = 1u64 << (l - wl);
                    (0..count).map(move |t| (1u64 << l) + base + t * step - 1)
                }))
            }
            Node::Enumerated(e) => Box::new(e.iter()),
            Node::BranchDiag(b) => Box::new((0u32..=62).map_while(move |l| b.cert_row(l))),
            Node::Union(a, b) => Box::new(MergeIter::new(a.line_iter(), b.line_iter())),
            Node::Inter(a, b) => Box::new(a.line_iter().filter(move |n| b.member_nat(*n))),
            Node::Diff(a, b) => Box::new(a.line_iter().filter(move |n| !b.member_nat(*n))),
            // Dense or structurally opaque shapes: filter ω by membership.
            _ => Box::new((0..).filter(move |n| self.member_nat(*n))),
        }
    }
}

struct MergeIter<'a> {
    a: std::iter::Peekable<Box<dyn Iterator<Item = Nat> + 'a>>,
    b: std::iter::Peekable<Box<dyn Iterator<Item = Nat> + 'a>>,
}

impl<'a> MergeIter<'a> {
    fn new(a: Box<dyn Iterator<Item = Nat> + 'a>, b: Box<dyn Iterator<Item = Nat> + 'a>) -> Self {
        MergeIter { a: a.peekable(), b: b.peekable() }
    }
}

impl Iterator for MergeIter<'_> {
    type Item = Nat;
    fn next(&mut self) -> Option<Nat> {
        match (self.a.peek().copied(), self.b.peek().copied()) {
            (Some(x), Some(y)) => {
                if x < y {
                    self.a.next()
                } else if y < x {
                    self.b.next()
                } else {
                    self.a.next();
                    self.b.next()
                }
            }
            (Some(_), None) => self.a.next(),
            (None, Some(_)) => self.b.next(),
            (None, None) => None,
        }
    }
}

/// Iterator that owns its set, with structural fast paths for sparse shapes;
/// used where iterators must outlive the borrow (planar frontier streams).
pub struct OwnedLineIter {
    set: DescribedSet,
    next_candidate: Nat,
    pulls: u64,
}

impl OwnedLineIter {
    pub fn new(set: DescribedSet) -> OwnedLineIter {
        OwnedLineIter { set, next_candidate: 0, pulls: 0 }
    }
}

impl Iterator for OwnedLineIter {
    type Item = Nat;
    fn next(&mut self) -> Option<Nat> {
        let idx = self.pulls;
        self.pulls += 1;
        let set = self.set.clone();
        match &*set.0 {
            Node::Finite(v) => v.get(idx as usize).copied(),
            Node::PowerTail { add, start } => {
                let l = *start as u64 + idx;
                if l > 62 {
                    None
                } else {
                    Some((1u64 << l) + add)
                }
            }
            Node::Enumerated(e) => e.nth(idx),
            Node::BranchDiag(b) => {
                let l = u32::try_from(idx).ok()?;
                if l > 62 { None } else { b.cert_row(l) }
            }
            Node::Residue { a, m } => a.checked_add(idx.checked_mul(*m)?),
            Node::PrefixCols { word } => {
                let wl = word.len() as u64;
                let mut level = 0u64;
                let mut seen = 0u64;
                loop {
                    let count = 1u64 << level;
                    if seen + count > idx {
                        let t = idx - seen;
                        let l = wl + level;
                        if l > 62 {
                            return None;
                        }
                        return Some((1u64 << l) + word.value() + t * (1u64 << wl) - 1);
                    }
                    seen += count;
                    level += 1;
                    if level > 62 {
                        return None;
                    }
                }
            }
            _ => {
                let mut n = self.next_candidate;
                let stop = self.next_candidate.saturating_add(MAX_SCAN);
                loop {
                    if set.member_nat(n) {
                        self.next_candidate = n + 1;
                        return Some(n);
                    }
                    n = n.checked_add(1)?;
                    if n > stop {
                        return None;
                    }
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Planar decomposition and π-order enumeration
// ---------------------------------------------------------------------------

/// One product piece of a planar decomposition: cols × rows.
#[derive(Clone)]
pub struct RectPiece {
    pub cols: DescribedSet,
    pub rows: DescribedSet,
}

const MAX_RECT_PIECES: usize = 512;

impl DescribedSet {
    /// Writes a planar set as a finite union of products cols×rows (the union
    /// need not be disjoint).  `None` when the set contains a branch
    /// certificate or the piece count explodes.
    pub fn rect_decompose(&self) -> Option<Vec<RectPiece>> {
        let inner = match self.carrier() {
            Carrier::Plane(inner) => *inner,
            Carrier::Line => return None,
        };
        let full_rows = DescribedSet::full_of(&inner);
        let pieces = self.decompose_inner(&full_rows)?;
        if pieces.len() > MAX_RECT_PIECES {
            return None;
        }
        Some(pieces)
    }

    fn decompose_inner(&self, full_rows: &DescribedSet) -> Option<Vec<RectPiece>> {
        let out = match &*self.0 {
            Node::Column(c) => vec![RectPiece {
                cols: DescribedSet::finite(vec![*c]),
                rows: full_rows.clone(),
            }],
            Node::Row(r) => vec![RectPiece {
                cols: DescribedSet::full(),
                rows: DescribedSet::finite(vec![*r]),
            }],
            Node::Rect { cols, rows } => {
                vec![RectPiece { cols: cols.clone(), rows: rows.clone() }]
            }
            Node::PartitionUnion { family, indices } => {
                family.plane_pieces(indices, full_rows)?
            }
            Node::BranchCert(_) => return None,
            Node::Union(a, b) => {
                let mut va = a.decompose_inner(full_rows)?;
                let vb = b.decompose_inner(full_rows)?;
                va.extend(vb);
                va
            }
            Node::Inter(a, b) => {
                let va = a.decompose_inner(full_rows)?;
                let vb = b.decompose_inner(full_rows)?;
                let mut out = Vec::new();
                for pa in &va {
                    for pb in &vb {
                        out.push(RectPiece {
                            cols: DescribedSet::inter(pa.cols.clone(), pb.cols.clone()).ok()?,
                            rows: DescribedSet::inter(pa.rows.clone(), pb.rows.clone()).ok()?,
                        });
                    }
                }
                out
            }
            Node::Diff(a, b) => {
                let va = a.decompose_inner(full_rows)?;
                let vb = b.decompose_inner(full_rows)?;
                subtract_pieces(va, &vb)?
            }
            Node::Compl(a) => {
                let va = a.decompose_inner(full_rows)?;
                let full =
                    vec![RectPiece { cols: DescribedSet::full(), rows: full_rows.clone() }];
                subtract_pieces(full, &va)?
            }
            _ => return None,
        };
        if out.len() > MAX_RECT_PIECES {
            return None;
        }
        Some(out)
    }

    /// Enumerates a `Plane(Line)` set in π-code order.  Exact for sets made of
    /// rect pieces and branch certificates; `None` otherwise.
    pub fn plane_iter(&self) -> Option<PlaneIter> {
        if self.carrier() != Carrier::plane1() {
            return None;
        }
        let mut streams: Vec<PieceStream> = Vec::new();
        if !collect_plane_streams(self, &mut streams) {
            return None;
        }
        Some(PlaneIter::new(streams))
    }

    /// Smallest point in π-order avoiding `excl`.  `Ok(None)` = the stream is
    /// exhausted; an error when the structure does not support ordered
    /// enumeration or the budget runs out.
    pub fn min_plane_excluding(
        &self,
        excl: &[(Nat, Nat)],
        budget: usize,
    ) -> Result<Option<(Nat, Nat)>, SetError> {
        let mut it = self.plane_iter().ok_or_else(|| {
            SetError::Fragment("planar set does not support ordered enumeration".into())
        })?;
        let mut pulled = 0usize;
        while pulled < budget {
            match it.next() {
                Some(p) => {
                    if !excl.contains(&p) {
                        return Ok(Some(p));
                    }
                    pulled += 1;
                }
                None => return Ok(None),
            }
        }
        Err(SetError::Resource(format!(
            "planar minimum search exhausted budget {budget}"
        )))
    }

    /// Smallest element of a line set avoiding `excl`, with a pull budget.
    pub fn min_line_excluding(
        &self,
        excl: &[Nat],
        budget: usize,
    ) -> Result<Option<Nat>, SetError> {
        let it = self
            .sorted_iter()
            .ok_or_else(|| SetError::Carrier("line minimum of a planar set".into()))?;
        let mut pulled = 0usize;
        for n in it {
            if !excl.contains(&n) {
                return Ok(Some(n));
            }
            pulled += 1;
            if pulled >= budget {
                return Err(SetError::Resource(format!(
                    "line minimum search exhausted budget {budget}"
                )));
            }
        }
        Ok(None)
    }
}

/// pieces \ cuts, via (C,R) \ (C',R') = (C\C', R) ∪ (C∩C', R\R').
fn subtract_pieces(pieces: Vec<RectPiece>, cuts: &[RectPiece]) -> Option<Vec<RectPiece>> {
    let mut cur = pieces;
    for cut in cuts {
        let mut next = Vec::new();
        for p in &cur {
            next.push(RectPiece {
                cols: DescribedSet::diff(p.cols.clone(), cut.cols.clone()).ok()?,
                rows: p.rows.clone(),
            });
            next.push(RectPiece {
                cols: DescribedSet::inter(p.cols.clone(), cut.cols.clone()).ok()?,
                rows: DescribedSet::diff(p.rows.clone(), cut.rows.clone()).ok()?,
            });
            if next.len() > MAX_RECT_PIECES {
                return None;
            }
        }
        cur = next;
    }
    Some(cur)
}

enum PieceStream {
    Rect(RectStream),
    Cert(CertStream),
}

impl PieceStream {
    fn next(&mut self) -> Option<(Nat, Nat)> {
        match self {
            PieceStream::Rect(r) => r.next(),
            PieceStream::Cert(c) => c.next(),
        }
    }
}

fn collect_plane_streams(s: &DescribedSet, out: &mut Vec<PieceStream>) -> bool {
    match &*s.0 {
        Node::BranchCert(b) => {
            out.push(PieceStream::Cert(CertStream::new(b.clone())));
            true
        }
        Node::Union(a, b) => collect_plane_streams(a, out) && collect_plane_streams(b, out),
        _ => match s.rect_decompose() {
            Some(pieces) => {
                for p in pieces {
                    if p.rows.carrier() != Carrier::Line {
                        return false;
                    }
                    out.push(PieceStream::Rect(RectStream::new(p)));
                }
                true
            }
            None => false,
        },
    }
}

/// π-order enumeration of a union of rect pieces and branch certificates.
pub struct PlaneIter {
    streams: Vec<PieceStream>,
    heads: Vec<Option<(Nat, Nat)>>,
    last: Option<(Nat, Nat)>,
}

impl PlaneIter {
    fn new(mut streams: Vec<PieceStream>) -> Self {
        let heads = streams.iter_mut().map(|s| s.next()).collect();
        PlaneIter { streams, heads, last: None }
    }
}

impl Iterator for PlaneIter {
    type Item = (Nat, Nat);
    fn next(&mut self) -> Option<(Nat, Nat)> {
        loop {
            let mut best: Option<(usize, (Nat, Nat))> = None;
            for (i, h) in self.heads.iter().enumerate() {
                if let Some(p) = h {
                    let better = match best {
                        None => true,
                        Some((_, q)) => cmp_pair_code(*p, q) == Ordering::Less,
                    };
                    if better {
                        best = Some((i, *p));
                    }
                }
            }
            let (i, p) = best?;
            self.heads[i] = self.streams[i].next();
            // Streams may overlap; duplicates arrive adjacently in π-order.
            if Some(p) != self.last {
                self.last = Some(p);
                return Some(p);
            }
        }
    }
}

struct ActiveCol {
    head: (Nat, Nat),
    row_pos: u64,
}

impl PartialEq for ActiveCol {
    fn eq(&self, other: &Self) -> bool {
        self.head == other.head
    }
}
impl Eq for ActiveCol {}
impl PartialOrd for ActiveCol {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for ActiveCol {
    fn cmp(&self, other: &Self) -> Ordering {
        // Reversed: BinaryHeap is a max-heap, we need the π-least on top.
        cmp_pair_code(other.head, self.head)
    }
}

/// π-order enumeration of one cols×rows piece: columns are activated lazily
/// (π(c, ·) ≥ 2^c − 1 grows with c), each active column walks its rows upward.
struct RectStream {
    rows: DescribedSet,
    cols: std::iter::Peekable<OwnedLineIter>,
    rows_first: Option<Nat>,
    active: BinaryHeap<ActiveCol>,
}

impl RectStream {
    fn new(piece: RectPiece) -> RectStream {
        let rows_first = OwnedLineIter::new(piece.rows.clone()).next();
        RectStream {
            rows: piece.rows,
            cols: OwnedLineIter::new(piece.cols).peekable(),
            rows_first,
            active: BinaryHeap::new(),
        }
    }

    fn row_nth(&self, pos: u64) -> Option<Nat> {
        OwnedLineIter::new(self.rows.clone()).nth(pos as usize)
    }

    fn activate_due(&mut self) {
        let Some(first_row) = self.rows_first else { return };
        loop {
            let Some(&c) = self.cols.peek() else { break };
            let candidate = (c, first_row);
            let due = match self.active.peek() {
                None => true,
                Some(top) => cmp_pair_code(candidate, top.head) == Ordering::Less,
            };
            if due {
                self.cols.next();
                self.active.push(ActiveCol { head: candidate, row_pos: 0 });
            } else {
                break;
            }
        }
    }

    fn next(&mut self) -> Option<(Nat, Nat)> {
        self.activate_due();
        let top = self.active.pop()?;
        let (c, _) = top.head;
        if let Some(r) = self.row_nth(top.row_pos + 1) {
            self.active.push(ActiveCol { head: (c, r), row_pos: top.row_pos + 1 });
        }
        Some(top.head)
    }
}

/// Enumeration of a branch-certificate set in π-order.
struct CertStream {
    branch: BranchBits,
    heads: Vec<Option<(Nat, Nat)>>,
    levels: Vec<u32>,
    anchors_exhausted: bool,
}

impl CertStream {
    fn new(branch: BranchBits) -> CertStream {
        CertStream { branch, heads: vec![], levels: vec![], anchors_exhausted: false }
    }

    fn introduce_anchor(&mut self) {
        if self.anchors_exhausted {
            return;
        }
        let j = self.heads.len() as u64;
        match self.branch.anchor(j) {
            Some(m_j) => {
                let start = m_j + j;
                let head = if start > 62 {
                    None
                } else {
                    let c = self.branch.anchor_column(j);
                    match (c, self.branch.cert_row(start as u32)) {
                        (Some(c), Some(k)) => Some((c, k)),
                        _ => None,
                    }
                };
                self.levels.push(start.min(63) as u32);
                self.heads.push(head);
            }
            None => self.anchors_exhausted = true,
        }
    }

    fn next(&mut self) -> Option<(Nat, Nat)> {
        loop {
            let best = self
                .heads
                .iter()
                .flatten()
                .copied()
                .min_by(|a, b| cmp_pair_code(*a, *b));
            if self.anchors_exhausted {
                break;
            }
            match best {
                None => self.introduce_anchor(),
                Some(b) => {
                    let j = self.heads.len() as u64;
                    match self.branch.anchor(j) {
                        None => {
                            self.anchors_exhausted = true;
                        }
                        Some(m_j) => {
                            if m_j > 62 {
                                // Columns only grow; everything further starts
                                // beyond u64 range.
                                self.anchors_exhausted = true;
                                break;
                            }
                            // Least element of anchor j has column ≥ 2^{m_j}:
                            // compare via the floor point (2^{m_j}, 0).
                            let col_floor = 1u64 << m_j;
                            if cmp_pair_code((col_floor, 0), b) == Ordering::Less {
                                self.introduce_anchor();
                            } else {
                                break;
                            }
                        }
                    }
                }
            }
        }
        let (i, head) = self
            .heads
            .iter()
            .enumerate()
            .filter_map(|(i, h)| h.map(|p| (i, p)))
            .min_by(|a, b| cmp_pair_code(a.1, b.1))?;
        let next_level = self.levels[i] + 1;
        self.heads[i] = if next_level <= 62 {
            self.branch.cert_row(next_level).map(|k| (head.0, k))
        } else {
            None
        };
        self.levels[i] = next_level;
        Some(head)
    }
}

// ---------------------------------------------------------------------------
// Statistics
// ---------------------------------------------------------------------------

/// Exact statistics of a line set over an initial segment.
#[derive(Clone, Debug)]
pub struct SetStats {
    pub count: u64,
    pub density: BigRational,
    pub banach: Option<BigRational>,
    pub recip_sum: Option<BigRational>,
}

fn big(n: u64) -> BigInt {
    BigInt::from(n)
}

impl DescribedSet {
    pub fn count_upto(&self, n_bound: u64) -> Result<u64, SetError> {
        if n_bound > MAX_SCAN {
            return Err(SetError::Resource(format!(
                "count horizon {n_bound} beyond {MAX_SCAN}"
            )));
        }
        if let Some(e) = self.try_ep() {
            return Ok(e.count_upto(n_bound));
        }
        Ok((0..n_bound).filter(|n| self.member_nat(*n)).count() as u64)
    }

    pub fn density_upto(&self, n_bound: u64) -> Result<BigRational, SetError> {
        if n_bound == 0 {
            return Err(SetError::Malformed("density over empty horizon".into()));
        }
        let c = self.count_upto(n_bound)?;
        Ok(Ratio::new(big(c), big(n_bound)))
    }

    /// max over windows [k, k+w) ⊆ [0, N) of |S ∩ window| / w.
    pub fn banach_window(&self, n_bound: u64, w: u64) -> Result<BigRational, SetError> {
        if w == 0 || w > n_bound {
            return Err(SetError::Malformed(format!(
                "window {w} invalid for horizon {n_bound}"
            )));
        }
        if n_bound > MAX_SCAN {
            return Err(SetError::Resource(format!(
                "window horizon {n_bound} beyond {MAX_SCAN}"
            )));
        }
        let mut cur: u64 = (0..w).filter(|n| self.member_nat(*n)).count() as u64;
        let mut best = cur;
        for k in 0..(n_bound - w) {
            cur -= self.member_nat(k) as u64;
            cur += self.member_nat(k + w) as u64;
            best = best.max(cur);
            if best == w {
                break;
            }
        }
        Ok(Ratio::new(big(best), big(w)))
    }

    /// Σ_{n ∈ S, n < N} 1/(n+1), exact.  Refuses when the set is so dense the
    /// rational would be astronomically sized.
    pub fn recip_sum_upto(&self, n_bound: u64) -> Result<BigRational, SetError> {
        let count = self.count_upto(n_bound)?;
        if count > RECIP_TERM_CAP {
            return Err(SetError::Resource(format!(
                "reciprocal sum with {count} terms exceeds cap {RECIP_TERM_CAP}"
            )));
        }
        let mut acc: BigRational = Ratio::from_integer(BigInt::from(0));
        for n in 0..n_bound {
            if self.member_nat(n) {
                acc += Ratio::new(BigInt::from(1), big(n + 1));
            }
        }
        Ok(acc)
    }

    pub fn stats(&self, n_bound: u64, w: u64) -> Result<SetStats, SetError> {
        let count = self.count_upto(n_bound)?;
        let density = self.density_upto(n_bound)?;
        let banach = self.banach_window(n_bound, w).ok();
        let recip_sum = self.recip_sum_upto(n_bound).ok();
        Ok(SetStats { count, density, banach, recip_sum })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn res(a: Nat, m: Nat) -> DescribedSet {
        DescribedSet::residue(a, m).unwrap()
    }

    #[test]
    fn membership_matches_definitions() {
        assert!(res(1, 4).member_nat(5));
        assert!(!res(1, 4).member_nat(4));
        let full_minus_zero =
            DescribedSet::diff(DescribedSet::full(), DescribedSet::finite(vec![0])).unwrap();
        assert!(!full_minus_zero.member_nat(0));
        assert!(full_minus_zero.member_nat(1));
    }

    #[test]
    fn column_is_a_residue_under_the_pairing() {
        // Column(c) codes are {m : m ≡ 2^c − 1 mod 2^{c+1}}.
        let col3 = DescribedSet::column(3);
        for m in 0..2048u64 {
            let (n, k) = unpair(m);
            assert_eq!(col3.member2(n, k), n == 3);
            assert_eq!(n == 3, m % 16 == 7);
        }
        assert!(col3.member(&Point::pair(3, 7)));
        assert_eq!(pair(3, 7), Some(119));
    }

    #[test]
    fn rect_membership_and_carriers() {
        let evens = res(0, 2);
        let r = DescribedSet::rect(evens, DescribedSet::full()).unwrap();
        assert_eq!(r.carrier(), Carrier::plane1());
        assert!(r.member2(2, 100));
        assert!(!r.member2(3, 100));
        // Carrier mismatch is rejected at construction.
        assert!(DescribedSet::union(DescribedSet::column(1), res(0, 2)).is_err());
    }

    #[test]
    fn power_tail_and_prefix_cols_membership() {
        let pt = DescribedSet::power_tail(3, 2).unwrap();
        assert!(pt.member_nat(7)); // 4 + 3
        assert!(pt.member_nat(11)); // 8 + 3
        assert!(!pt.member_nat(5)); // 2 + 3 has l = 1 < start
        assert!(!pt.member_nat(10));

        let w = BinWord::parse("1").unwrap();
        let pc = DescribedSet::prefix_cols(w);
        // Words extending (1): (1) idx 2, (1,0) idx 4, (1,1) idx 6, ...
        assert!(pc.member_nat(2));
        assert!(pc.member_nat(4));
        assert!(pc.member_nat(6));
        assert!(!pc.member_nat(5)); // idx 5 = (0,1) starts with 0
        let got: Vec<Nat> = pc.sorted_iter().unwrap().take(7).collect();
        assert_eq!(got, vec![2, 4, 6, 8, 10, 12, 14]);
    }

    #[test]
    fn owned_iter_matches_borrowed_iter() {
        let shapes = vec![
            res(2, 5),
            DescribedSet::power_tail(1, 1).unwrap(),
            DescribedSet::prefix_cols(BinWord::parse("01").unwrap()),
            DescribedSet::finite(vec![3, 9, 27]),
            DescribedSet::branch_diag(BranchBits::parse("1:10").unwrap()),
        ];
        for s in shapes {
            let a: Vec<Nat> = s.sorted_iter().unwrap().take(20).collect();
            let b: Vec<Nat> = OwnedLineIter::new(s.clone()).take(20).collect();
            assert_eq!(a, b, "owned vs borrowed mismatch for {s}");
        }
    }

    #[test]
    fn rebuilt_periodic_fragments_keep_membership_and_simplify() {
        let cases = [
            ("(res 1 4)", "(res 1 4)"),
            ("(ival 0 *)", "(ival 0 *)"),
            ("(fin 3 5)", "(fin 3 5)"),
            ("(union (res 0 2) (res 1 2))", "(ival 0 *)"),
            ("(inter (res 0 2) (res 0 3))", "(res 0 6)"),
            ("(diff (res 0 2) (fin 0))", "(inter (ival 1 *) (res 0 2))"),
        ];
        for (src, want) in cases {
            let s = grammar::parse(src).unwrap();
            let rebuilt = DescribedSet::from_ep(&s.try_ep().unwrap()).unwrap();
            assert_eq!(grammar::print(&rebuilt), want, "simplified form of {src}");
            for n in 0..500u64 {
                assert_eq!(s.member_nat(n), rebuilt.member_nat(n), "{src} at {n}");
            }
        }
    }

    #[test]
    fn sorted_iter_agrees_with_membership() {
        let s = DescribedSet::union(
            res(1, 3),
            DescribedSet::power_tail(0, 4).unwrap(),
        )
        .unwrap();
        let from_iter: Vec<Nat> =
            s.sorted_iter().unwrap().take_while(|n| *n < 200).collect();
        let from_scan: Vec<Nat> = (0..200).filter(|n| s.member_nat(*n)).collect();
        assert_eq!(from_iter, from_scan);
    }

    #[test]
    fn branch_diag_elements_match_the_prefix_fold() {
        // Independent fold: the level-l element is 2^l plus the value of the
        // branch's first l bits.
        for name in [":0", "1:0", "1:10", ":1", "0011:01"] {
            let b = BranchBits::parse(name).unwrap();
            let s = DescribedSet::branch_diag(b.clone());
            let mut expect = Vec::new();
            let mut val = 0u64;
            for l in 0..24u32 {
                expect.push((1u64 << l) + val);
                if b.bit(l as u64) {
                    val |= 1 << l;
                }
            }
            let got: Vec<Nat> = s.sorted_iter().unwrap().take(24).collect();
            assert_eq!(got, expect, "diagonal of {name}");
            let from_scan: Vec<Nat> = (0..5000).filter(|n| s.member_nat(*n)).collect();
            let bounded: Vec<Nat> = expect.iter().copied().filter(|n| *n < 5000).collect();
            assert_eq!(from_scan, bounded, "membership scan for {name}");
        }
        // Frozen small values.
        let zeros = DescribedSet::branch_diag(BranchBits::parse(":0").unwrap());
        let got: Vec<Nat> = zeros.sorted_iter().unwrap().take(6).collect();
        assert_eq!(got, vec![1, 2, 4, 8, 16, 32]);
        let one = DescribedSet::branch_diag(BranchBits::parse("1:0").unwrap());
        let got: Vec<Nat> = one.sorted_iter().unwrap().take(6).collect();
        assert_eq!(got, vec![1, 3, 5, 9, 17, 33]);
        // The whole diagonal has exactly one u64-representable element per
        // level 0..=62.
        assert_eq!(zeros.sorted_iter().unwrap().count(), 63);
    }

    #[test]
    fn stats_block_set_density_and_banach() {
        // Blocks [2^k, 2^k + k) for k ≤ 19.
        let mut blocks = Vec::new();
        for k in 1..=19u64 {
            blocks.push(
                DescribedSet::interval(1 << k, Some((1 << k) + k - 1)).unwrap(),
            );
        }
        let s = DescribedSet::union_all(blocks).unwrap();
        let n = 1u64 << 20;
        assert_eq!(s.count_upto(n).unwrap(), (1..=19u64).sum::<u64>());
        let d = s.density_upto(n).unwrap();
        assert_eq!(d, Ratio::new(big(190), big(n)));
        let b = s.banach_window(n, 19).unwrap();
        assert_eq!(b, Ratio::new(big(19), big(19)));
    }

    #[test]
    fn recip_sum_cap_and_exact_small_sums() {
        let pt = DescribedSet::power_tail(0, 0).unwrap(); // {2^l : l ≥ 0}
        let s = pt.recip_sum_upto(1 << 20).unwrap();
        assert!(s < Ratio::from_integer(BigInt::from(2)));
        let dense = DescribedSet::full();
        assert!(matches!(
            dense.recip_sum_upto(1 << 20),
            Err(SetError::Resource(_))
        ));
    }

    #[test]
    fn plane_iter_pair_order() {
        let s = DescribedSet::union(
            DescribedSet::column(0),
            DescribedSet::rect(res(1, 2), DescribedSet::finite(vec![0, 1])).unwrap(),
        )
        .unwrap();
        let got: Vec<(Nat, Nat)> = s.plane_iter().unwrap().take(12).collect();
        let mut expect = Vec::new();
        for m in 0..5000u64 {
            let (n, k) = unpair(m);
            if s.member2(n, k) {
                expect.push((n, k));
            }
            if expect.len() == 12 {
                break;
            }
        }
        assert_eq!(got, expect);
    }

    #[test]
    fn plane_iter_handles_empty_rows() {
        let s = DescribedSet::rect(DescribedSet::full(), DescribedSet::empty()).unwrap();
        assert_eq!(s.plane_iter().unwrap().next(), None);
    }

    #[test]
    fn min_excluding_budgets() {
        let s = res(0, 2);
        assert_eq!(s.min_line_excluding(&[0, 2], 64).unwrap(), Some(4));
        let plane = DescribedSet::column(2);
        assert_eq!(
            plane.min_plane_excluding(&[(2, 0)], 64).unwrap(),
            Some((2, 1))
        );
    }

    #[test]
    fn rect_decompose_covers_difference() {
        // (evens × ω) \ (ω × {0}) decomposes into pieces whose union matches
        // membership on a brute π-scan.
        let s = DescribedSet::diff(
            DescribedSet::rect(res(0, 2), DescribedSet::full()).unwrap(),
            DescribedSet::row(0),
        )
        .unwrap();
        let pieces = s.rect_decompose().unwrap();
        for m in 0..2000u64 {
            let (n, k) = unpair(m);
            let in_pieces = pieces
                .iter()
                .any(|p| p.cols.member_nat(n) && p.rows.member_nat(k));
            assert_eq!(in_pieces, s.member2(n, k), "mismatch at ({n},{k})");
        }
    }
}
