//! Codes for closed sets of binary sequences: a node predicate carving a
//! pruned subtree out of the full binary tree. Where the code's structure
//! supports it (a free depth past which admitted nodes are unconstrained, or
//! an exact rule for eventually periodic points), membership of a point is
//! decided outright; otherwise probes answer `Unknown` rather than guess.

use std::fmt;
use std::rc::Rc;

use crate::util::{SplitMix64, TriBool};
use crate::words::BinWord;

use super::{CantorError, CantorPoint, EpPoint};

/// Tri-state answer for "does this point lie on a branch of the tree?".
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Membership {
    In,
    Out,
    Unknown,
}

struct CodeInner {
    label: String,
    admits: Box<dyn Fn(&BinWord) -> bool>,
    /// A length past which every admitted node has both children admitted;
    /// membership past an admitted node of this length is automatic.
    free_depth: Option<u32>,
    /// Exact membership for eventually periodic points, supplied by
    /// constructors that know their tree's semantics.
    ep_rule: Option<Box<dyn Fn(&EpPoint) -> bool>>,
}

/// A closed set presented as the branches of a pruned binary tree.
#[derive(Clone)]
pub struct ClosedCode {
    inner: Rc<CodeInner>,
}

/// Longest node length representable; probes never look deeper.
pub const MAX_NODE_LEN: u32 = BinWord::MAX_LEN;

impl ClosedCode {
    fn build(
        label: String,
        admits: Box<dyn Fn(&BinWord) -> bool>,
        free_depth: Option<u32>,
        ep_rule: Option<Box<dyn Fn(&EpPoint) -> bool>>,
    ) -> Self {
        if let Some(f) = free_depth {
            assert!(f <= MAX_NODE_LEN, "free depth out of probe range");
        }
        ClosedCode {
            inner: Rc::new(CodeInner {
                label,
                admits,
                free_depth,
                ep_rule,
            }),
        }
    }

    /// A code with no structural knowledge: membership probes can reject but
    /// never confirm.
    pub fn opaque(label: impl Into<String>, admits: impl Fn(&BinWord) -> bool + 'static) -> Self {
        ClosedCode::build(label.into(), Box::new(admits), None, None)
    }

    /// A code whose admitted nodes of length `free_depth` and beyond have all
    /// extensions admitted.
    pub fn with_free_depth(
        label: impl Into<String>,
        admits: impl Fn(&BinWord) -> bool + 'static,
        free_depth: u32,
    ) -> Self {
        ClosedCode::build(label.into(), Box::new(admits), Some(free_depth), None)
    }

    /// A code carrying an exact membership rule for eventually periodic
    /// points.
    pub fn with_ep_rule(
        label: impl Into<String>,
        admits: impl Fn(&BinWord) -> bool + 'static,
        ep_rule: impl Fn(&EpPoint) -> bool + 'static,
    ) -> Self {
        ClosedCode::build(label.into(), Box::new(admits), None, Some(Box::new(ep_rule)))
    }

    /// The whole space.
    pub fn full() -> Self {
        ClosedCode::with_free_depth("full", |_| true, 0)
    }

    /// The cylinder of all extensions of `u`.
    pub fn cylinder(u: &BinWord) -> Self {
        let stem = u.clone();
        let free = u.len();
        ClosedCode::with_free_depth(
            format!("cyl:{}", if u.is_empty() { "e".into() } else { u.digits() }),
            move |w| {
                let m = w.len().min(stem.len());
                (0..m).all(|i| w.bit(i) == stem.bit(i))
            },
            free,
        )
    }

    /// The single branch through an eventually periodic point.
    pub fn branch(p: &EpPoint) -> Self {
        let along = p.clone();
        let target = p.clone();
        ClosedCode::with_ep_rule(
            format!("branch:{p}"),
            move |w| (0..w.len()).all(|i| w.bit(i) == along.bit(i as u64)),
            move |q| q.same_point(&target),
        )
    }

    /// Points whose bit at position `n` is zero.
    pub fn bit_zero(n: u32) -> Self {
        ClosedCode::with_free_depth(
            format!("bit-zero:{n}"),
            move |w| w.len() <= n || w.bit(n) == 0,
            n + 1,
        )
    }

    /// Points with zeros at every even position.
    pub fn even_zero() -> Self {
        ClosedCode::with_ep_rule(
            "even-zero",
            |w| (0..w.len()).step_by(2).all(|i| w.bit(i) == 0),
            |p| {
                let window = p.prefix_len() + num::integer::lcm(2, p.period_len());
                (0..window).step_by(2).all(|n| p.bit(n) == 0)
            },
        )
    }

    /// A deterministic pseudo-random pruned tree: above `depth` each node
    /// keeps one or both children by a seeded coin; below `depth` surviving
    /// nodes are unconstrained.
    pub fn random_pruned(seed: u64, depth: u32) -> Self {
        assert!(depth <= MAX_NODE_LEN);
        let admits = move |w: &BinWord| {
            let d = w.len().min(depth);
            for i in 0..d {
                let keep = child_pattern(seed, &w.prefix(i));
                if keep & (1 << w.bit(i)) == 0 {
                    return false;
                }
            }
            true
        };
        ClosedCode::with_free_depth(format!("random:{seed}:{depth}"), admits, depth)
    }

    /// The intersection of two codes. The node predicate is the conjunction;
    /// exact point decisions combine when both sides support them. The
    /// intersection of pruned trees need not be pruned, so callers that rely
    /// on prunedness should check it.
    pub fn intersection(a: &ClosedCode, b: &ClosedCode) -> Self {
        let label = format!("({})&({})", a.label(), b.label());
        let (pa, pb) = (a.clone(), b.clone());
        let admits = move |w: &BinWord| pa.admits(w) && pb.admits(w);
        let free = match (a.inner.free_depth, b.inner.free_depth) {
            (Some(x), Some(y)) => Some(x.max(y)),
            _ => None,
        };
        let ep_rule: Option<Box<dyn Fn(&EpPoint) -> bool>> = if free.is_none()
            && a.decides_ep()
            && b.decides_ep()
        {
            let (ra, rb) = (a.clone(), b.clone());
            Some(Box::new(move |p: &EpPoint| {
                ra.ep_member(p).is_true() && rb.ep_member(p).is_true()
            }))
        } else {
            None
        };
        ClosedCode::build(label, Box::new(admits), free, ep_rule)
    }

    pub fn label(&self) -> &str {
        &self.inner.label
    }

    pub fn admits(&self, w: &BinWord) -> bool {
        (self.inner.admits)(w)
    }

    pub fn free_depth(&self) -> Option<u32> {
        self.inner.free_depth
    }

    /// Whether the branches are nonempty; for a pruned tree this is exactly
    /// admission of the root.
    pub fn nonempty(&self) -> bool {
        self.admits(&BinWord::empty())
    }

    fn decides_ep(&self) -> bool {
        self.inner.free_depth.is_some() || self.inner.ep_rule.is_some()
    }

    /// Exact membership of an eventually periodic point, when the code's
    /// structure allows a verdict.
    pub fn ep_member(&self, p: &EpPoint) -> TriBool {
        if let Some(free) = self.inner.free_depth {
            // All branches of the tree through the depth-`free` prefix agree
            // with p beyond it, so the finite check is conclusive.
            let mut w = BinWord::empty();
            if !self.admits(&w) {
                return TriBool::False;
            }
            for n in 0..free {
                w = w.push(p.bit(n as u64));
                if !self.admits(&w) {
                    return TriBool::False;
                }
            }
            return TriBool::True;
        }
        if let Some(rule) = &self.inner.ep_rule {
            return TriBool::from_bool(rule(p));
        }
        let mut w = BinWord::empty();
        for n in 0..=MAX_NODE_LEN {
            if !self.admits(&w) {
                return TriBool::False;
            }
            if n < MAX_NODE_LEN {
                w = w.push(p.bit(n as u64));
            }
        }
        TriBool::Unknown
    }

    /// Branch membership probed to `depth`: `Out` exactly when some prefix of
    /// the point within the probed range is rejected; `In` only when the
    /// code's structure verifies the whole branch; `Unknown` otherwise.
    pub fn membership(&self, x: &CantorPoint, depth: u32) -> Membership {
        let defined = x.defined_to().unwrap_or(u64::MAX);
        let scan = (depth.min(MAX_NODE_LEN) as u64).min(defined) as u32;
        let mut w = BinWord::empty();
        if !self.admits(&w) {
            return Membership::Out;
        }
        let mut reached = 0;
        for n in 0..scan {
            let Ok(b) = x.bit(n as u64) else { break };
            w = w.push(b);
            if !self.admits(&w) {
                return Membership::Out;
            }
            reached = n + 1;
        }
        if let Some(free) = self.inner.free_depth {
            if free <= reached {
                return Membership::In;
            }
        }
        if let Some(p) = x.as_periodic() {
            if self.ep_member(p).is_true() {
                return Membership::In;
            }
        }
        Membership::Unknown
    }

    /// Verify, walking the admitted part of the tree, that every admitted
    /// node of length below `depth` has an admitted child. Returns the number
    /// of admitted nodes visited.
    pub fn check_pruned(&self, depth: u32) -> Result<u64, CantorError> {
        if !self.nonempty() {
            return Err(CantorError::EmptyTree);
        }
        let depth = depth.min(MAX_NODE_LEN);
        let mut stack = vec![BinWord::empty()];
        let mut visited = 0u64;
        while let Some(node) = stack.pop() {
            visited += 1;
            if node.len() >= depth {
                continue;
            }
            let c0 = node.push(0);
            let c1 = node.push(1);
            let mut any = false;
            for child in [c0, c1] {
                if self.admits(&child) {
                    any = true;
                    stack.push(child);
                }
            }
            if !any {
                return Err(CantorError::NotPruned(format!("[{}]", node.digits())));
            }
        }
        Ok(visited)
    }

    /// The leftmost branch through `node`: descend choosing child 0 whenever
    /// admitted, child 1 otherwise. With a free depth the walk closes into an
    /// exact eventually periodic point; otherwise the branch stays lazy.
    pub fn leftmost_from(&self, node: &BinWord) -> Result<CantorPoint, CantorError> {
        if !self.admits(node) {
            return Err(CantorError::OutsideTree(format!("[{}]", node.digits())));
        }
        if let Some(free) = self.inner.free_depth {
            let mut w = node.clone();
            while w.len() < free {
                let c0 = w.push(0);
                if self.admits(&c0) {
                    w = c0;
                } else {
                    let c1 = w.push(1);
                    if !self.admits(&c1) {
                        return Err(CantorError::NotPruned(format!("[{}]", w.digits())));
                    }
                    w = c1;
                }
            }
            return Ok(CantorPoint::Periodic(EpPoint::new(w.letters(), vec![0])));
        }
        let code = self.clone();
        let start = node.letters();
        let label = format!("leftmost({}, [{}])", self.label(), node.digits());
        Ok(CantorPoint::lazy(label, MAX_NODE_LEN as u64 + 1, move |sofar| {
            if sofar.len() < start.len() {
                return Some(start[sofar.len()]);
            }
            if sofar.len() as u32 >= MAX_NODE_LEN {
                return None;
            }
            let w = BinWord::from_bits(sofar);
            let c0 = w.push(0);
            if code.admits(&c0) {
                return Some(0);
            }
            if code.admits(&w.push(1)) {
                return Some(1);
            }
            None
        }))
    }

    /// The leftmost branch of the whole tree.
    pub fn leftmost(&self) -> Result<CantorPoint, CantorError> {
        self.leftmost_from(&BinWord::empty())
    }
}

impl fmt::Debug for ClosedCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ClosedCode({})", self.label())
    }
}

/// Child-survival pattern of a node in the seeded random tree: 1 keeps only
/// child 0, 2 keeps only child 1, 3 keeps both.
fn child_pattern(seed: u64, node: &BinWord) -> u8 {
    let mix = seed ^ node.idx().wrapping_mul(0x9E37_79B9_7F4A_7C15);
    1 + (SplitMix64::new(mix).next_u64() % 3) as u8
}

/// Look up a tree by registered name and parameters.
pub fn closed_registry(name: &str, params: &[&str]) -> Result<ClosedCode, CantorError> {
    let fail = || CantorError::UnknownTree {
        name: name.to_string(),
        params: params.join(" "),
    };
    match name {
        "full" => Ok(ClosedCode::full()),
        "cylinder" => BinWord::parse(params.first().copied().unwrap_or("e"))
            .map(|u| ClosedCode::cylinder(&u))
            .ok_or_else(fail),
        "branch" => {
            let lit = params.first().ok_or_else(fail)?;
            let p = EpPoint::parse(lit).map_err(|_| fail())?;
            Ok(ClosedCode::branch(&p))
        }
        "bit-zero" => {
            let n = params
                .first()
                .and_then(|s| s.parse::<u32>().ok())
                .ok_or_else(fail)?;
            Ok(ClosedCode::bit_zero(n))
        }
        "even-zero" => Ok(ClosedCode::even_zero()),
        "random" => {
            let seed = params
                .first()
                .and_then(|s| s.parse::<u64>().ok())
                .ok_or_else(fail)?;
            let depth = params
                .get(1)
                .and_then(|s| s.parse::<u32>().ok())
                .ok_or_else(fail)?;
            if depth > MAX_NODE_LEN {
                return Err(fail());
            }
            Ok(ClosedCode::random_pruned(seed, depth))
        }
        _ => Err(fail()),
    }
}

/// An eventually periodic sequence of natural numbers: an argument for the
/// surjection from the integer sequence space onto a tree's branches.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BaireSeq {
    head: Vec<u64>,
    cycle: Vec<u64>,
}

impl BaireSeq {
    pub fn new(head: Vec<u64>, cycle: Vec<u64>) -> Self {
        assert!(!cycle.is_empty(), "cycle must be nonempty");
        BaireSeq { head, cycle }
    }

    /// The sequence `head` followed by zeros forever.
    pub fn then_zeros(head: Vec<u64>) -> Self {
        BaireSeq::new(head, vec![0])
    }

    pub fn constant(v: u64) -> Self {
        BaireSeq::new(Vec::new(), vec![v])
    }

    pub fn entry(&self, n: u64) -> u64 {
        let p = self.head.len() as u64;
        if n < p {
            self.head[n as usize]
        } else {
            self.cycle[((n - p) % self.cycle.len() as u64) as usize]
        }
    }

    pub fn head(&self) -> &[u64] {
        &self.head
    }

    pub fn cycle(&self) -> &[u64] {
        &self.cycle
    }
}

impl fmt::Display for BaireSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |xs: &[u64]| {
            xs.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        write!(f, "{}:{}", join(&self.head), join(&self.cycle))
    }
}

/// A continuous map from integer sequences onto the branches of a pruned
/// tree: at each node one entry of the argument is consumed and, taken modulo
/// the number of admitted children, selects the child. Every branch is the
/// image of the argument that spells out its own bits.
pub struct Surjection {
    code: ClosedCode,
}

/// Build the surjection onto the branches of `code`.
pub fn tree_surjection(code: &ClosedCode) -> Result<Surjection, CantorError> {
    if !code.nonempty() {
        return Err(CantorError::EmptyTree);
    }
    Ok(Surjection { code: code.clone() })
}

impl Surjection {
    pub fn apply(&self, y: &BaireSeq) -> CantorPoint {
        let code = self.code.clone();
        let arg = y.clone();
        let free = code.free_depth();
        let horizon = if free.is_some() {
            u64::MAX
        } else {
            MAX_NODE_LEN as u64 + 1
        };
        let label = format!("surj({}, {})", code.label(), arg);
        CantorPoint::lazy(label, horizon, move |sofar| {
            let n = sofar.len();
            if let Some(f) = free {
                // Past the free depth both children of the current (admitted)
                // node are admitted, so the entry picks the bit directly.
                if n as u64 >= f as u64 {
                    return Some((arg.entry(n as u64) % 2) as u8);
                }
            }
            if n as u32 >= MAX_NODE_LEN {
                return None;
            }
            let w = BinWord::from_bits(sofar);
            let c0 = code.admits(&w.push(0));
            let c1 = code.admits(&w.push(1));
            match (c0, c1) {
                (true, true) => Some((arg.entry(n as u64) % 2) as u8),
                (true, false) => Some(0),
                (false, true) => Some(1),
                (false, false) => None,
            }
        })
    }
}

/// Free-function form of branch membership probing.
pub fn closed_membership(code: &ClosedCode, x: &CantorPoint, depth: u32) -> Membership {
    code.membership(x, depth)
}
