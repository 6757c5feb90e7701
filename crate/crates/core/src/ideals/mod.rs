//! Ideals on the described carriers, with certified tri-state decisions.
//!
//! An [`IdealHandle`] couples a carrier with a decision kernel.  [`decide`]
//! answers `in` (the set provably belongs to the ideal), `positive` (it
//! provably does not), or `unknown`, together with a prose trace of the rules
//! that fired.  Every `in`/`positive` answer rests on an exact structural
//! argument — scans and statistics never upgrade to a verdict — and `unknown`
//! is an honest first-class outcome, never a guess.
//!
//! [`decide`]: IdealHandle::decide

pub mod pwitness;
pub mod reduction;

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::natsets::families::{Growth, PartFamily, Spread};
use crate::natsets::{grammar, Carrier, DescribedSet, EnumSet, Node, SetError};
use crate::util::{Finiteness, TriBool};
use crate::words::BinWord;

/// Cap on structural recursion while deciding a single set term.
const DECIDE_DEPTH_CAP: u32 = 12;
/// Scan budget when probing an index set for one concrete member.
const PROBE_LIMIT: u64 = 1 << 16;
/// Longest set term quoted verbatim inside a decision trace.
const TRACE_TERM_LEN: usize = 72;

/// Errors raised by ideal construction and decision.
#[derive(Debug, thiserror::Error)]
pub enum IdealError {
    #[error("carrier mismatch: {0}")]
    Carrier(String),
    #[error("improper construction: {0}")]
    Improper(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Set(#[from] SetError),
}

/// Tri-state answer of a decision procedure.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    /// The set provably belongs to the ideal.
    In,
    /// The set provably lies outside the ideal.
    Positive,
    /// Neither direction could be certified within the supported fragment.
    Unknown,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::In => write!(f, "in"),
            Verdict::Positive => write!(f, "positive"),
            Verdict::Unknown => write!(f, "unknown"),
        }
    }
}

/// A verdict together with the trace of rules that produced it.
#[derive(Clone, Debug, Serialize)]
pub struct Decision {
    pub verdict: Verdict,
    pub path: Vec<String>,
}

/// Structural properties of an ideal, reported for documentation purposes.
/// `None` means the property is not asserted either way by this crate.
#[derive(Clone, Debug, Serialize)]
pub struct IdealTags {
    pub p_plus: Option<bool>,
    pub p_minus: Option<bool>,
    pub p_prime: Option<bool>,
    pub class_note: String,
}

impl IdealTags {
    fn new(
        p_plus: Option<bool>,
        p_minus: Option<bool>,
        p_prime: Option<bool>,
        note: &str,
    ) -> IdealTags {
        IdealTags { p_plus, p_minus, p_prime, class_note: note.to_string() }
    }
}

/// Decision kernel: the concrete rule set behind a handle.
#[derive(Clone)]
enum Kernel {
    /// Finite sets.
    Fin,
    /// Sets whose reciprocal series Σ 1/(n+1) converges.
    Summable,
    /// Sets of natural density zero.
    DensityZero,
    /// Sets of uniform (sliding-window) density zero.
    BanachZero,
    /// Only the empty set.
    EmptyIdeal,
    /// Planar sets with all but finitely many vertical sections finite.
    Fin2,
    /// Index sets along which the standard enumeration of eventually-zero
    /// points only accumulates at eventually-zero points.
    IrrationalClosure,
    /// Fubini-style product: small when the columns with inner-positive
    /// sections form an outer-small set of column indices.
    Fubini { outer: Box<IdealHandle>, inner: Box<IdealHandle> },
    /// Disjoint sum via the even/odd interleaving of ω.
    FubiniSum { left: Box<IdealHandle>, right: Box<IdealHandle> },
    /// Trace of `base` on a fixed positive set.
    Restrict { base: Box<IdealHandle>, within: DescribedSet },
}

/// An ideal on a fixed carrier, with a certified decision procedure.
#[derive(Clone)]
pub struct IdealHandle {
    pub name: String,
    pub carrier: Carrier,
    kernel: Kernel,
    pub tags: IdealTags,
    /// Whether the ideal contains every finite subset of its carrier.
    pub admissible: bool,
    /// Whether the full carrier lies outside the ideal.
    pub proper: bool,
}

impl fmt::Debug for IdealHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IdealHandle({} on {})", self.name, self.carrier)
    }
}

fn trace_term(s: &DescribedSet) -> String {
    let mut t = grammar::print(s);
    if t.len() > TRACE_TERM_LEN {
        t.truncate(TRACE_TERM_LEN);
        t.push_str("…");
    }
    t
}

// ---------------------------------------------------------------------------
// Registry and constructors
// ---------------------------------------------------------------------------

/// The finite ideal: the minimal admissible ideal on ω.
pub fn fin() -> IdealHandle {
    IdealHandle {
        name: "fin".into(),
        carrier: Carrier::Line,
        kernel: Kernel::Fin,
        tags: IdealTags::new(
            Some(true),
            Some(true),
            Some(true),
            "finite sets; sigma-compact P-ideal, all chain-compactness properties hold",
        ),
        admissible: true,
        proper: true,
    }
}

/// Sets with convergent reciprocal series Σ_{n∈S} 1/(n+1).
pub fn summable() -> IdealHandle {
    IdealHandle {
        name: "summable".into(),
        carrier: Carrier::Line,
        kernel: Kernel::Summable,
        tags: IdealTags::new(
            Some(true),
            Some(true),
            Some(true),
            "reciprocal-summable sets; an F-sigma P-ideal",
        ),
        admissible: true,
        proper: true,
    }
}

/// Sets of natural (asymptotic) density zero.
pub fn density_zero() -> IdealHandle {
    IdealHandle {
        name: "density-zero".into(),
        carrier: Carrier::Line,
        kernel: Kernel::DensityZero,
        tags: IdealTags::new(
            Some(false),
            Some(true),
            Some(false),
            "density-zero sets; an F-sigma-delta P-ideal that is neither P-plus nor P-prime",
        ),
        admissible: true,
        proper: true,
    }
}

/// Sets of uniform density zero: window counts o(L) uniformly in the window
/// position.
pub fn banach_zero() -> IdealHandle {
    IdealHandle {
        name: "banach-zero".into(),
        carrier: Carrier::Line,
        kernel: Kernel::BanachZero,
        tags: IdealTags::new(
            None,
            None,
            None,
            "uniform-density-zero sets; F-sigma-delta but not a P-ideal",
        ),
        admissible: true,
        proper: true,
    }
}

/// The degenerate ideal containing only the empty set.  Not admissible.
pub fn none_ideal() -> IdealHandle {
    IdealHandle {
        name: "none".into(),
        carrier: Carrier::Line,
        kernel: Kernel::EmptyIdeal,
        tags: IdealTags::new(None, None, None, "the trivial ideal {∅}; every nonempty set is positive"),
        admissible: false,
        proper: true,
    }
}

/// The iterated finite ideal on ω²: all but finitely many sections finite.
pub fn fin2() -> IdealHandle {
    IdealHandle {
        name: "fin2".into(),
        carrier: Carrier::plane1(),
        kernel: Kernel::Fin2,
        tags: IdealTags::new(
            Some(false),
            Some(false),
            Some(false),
            "planar sets with all but finitely many vertical sections finite; \
             fails every chain-compactness property",
        ),
        admissible: true,
        proper: true,
    }
}

/// Index sets along which the standard enumeration of eventually-zero points
/// accumulates only at eventually-zero points.
pub fn iw() -> IdealHandle {
    IdealHandle {
        name: "iw".into(),
        carrier: Carrier::Line,
        kernel: Kernel::IrrationalClosure,
        tags: IdealTags::new(
            None,
            Some(true),
            None,
            "coanalytic, not Borel: decided only on the structured fragment",
        ),
        admissible: true,
        proper: true,
    }
}

/// Fubini-style product of a line ideal with another ideal: a planar set is
/// small when its inner-positive sections sit over an outer-small column set.
pub fn fubini_product(outer: IdealHandle, inner: IdealHandle) -> Result<IdealHandle, IdealError> {
    if outer.carrier != Carrier::Line {
        return Err(IdealError::Carrier(format!(
            "product outer ideal must act on column indices (line carrier), got {}",
            outer.carrier
        )));
    }
    let carrier = Carrier::Plane(Box::new(inner.carrier.clone()));
    if carrier.depth() > 3 {
        return Err(IdealError::Unsupported(
            "product nesting beyond three carrier levels".into(),
        ));
    }
    let name = format!("prod({},{})", outer.name, inner.name);
    let admissible = outer.admissible || inner.admissible;
    let proper = outer.proper && inner.proper;
    let note = format!(
        "columns with `{}`-positive sections must form a `{}`-small set",
        inner.name, outer.name
    );
    Ok(IdealHandle {
        name,
        carrier,
        kernel: Kernel::Fubini { outer: Box::new(outer), inner: Box::new(inner) },
        tags: IdealTags { p_plus: None, p_minus: None, p_prime: None, class_note: note },
        admissible,
        proper,
    })
}

/// Disjoint sum of two line ideals along the even/odd split of ω.
pub fn fubini_sum(left: IdealHandle, right: IdealHandle) -> Result<IdealHandle, IdealError> {
    if left.carrier != Carrier::Line || right.carrier != Carrier::Line {
        return Err(IdealError::Carrier(
            "disjoint sums are supported for line ideals only".into(),
        ));
    }
    let name = format!("sum({},{})", left.name, right.name);
    let admissible = left.admissible && right.admissible;
    let proper = left.proper || right.proper;
    let note = format!(
        "evens judged by `{}`, odds by `{}`",
        left.name, right.name
    );
    Ok(IdealHandle {
        name,
        carrier: Carrier::Line,
        kernel: Kernel::FubiniSum { left: Box::new(left), right: Box::new(right) },
        tags: IdealTags { p_plus: None, p_minus: None, p_prime: None, class_note: note },
        admissible,
        proper,
    })
}

/// Trace of `base` on a positive set `within`: S is small iff S ∩ within is.
/// Fails when `within` cannot be certified positive — restricting to a small
/// set would produce the improper ideal.
pub fn restrict(base: IdealHandle, within: DescribedSet) -> Result<IdealHandle, IdealError> {
    if within.carrier() != base.carrier {
        return Err(IdealError::Carrier(format!(
            "restriction target lives on {}, ideal `{}` on {}",
            within.carrier(),
            base.name,
            base.carrier
        )));
    }
    let d = base.decide(&within)?;
    match d.verdict {
        Verdict::Positive => {}
        Verdict::In => {
            return Err(IdealError::Improper(format!(
                "`{}` already contains the restriction target; the trace would be trivial",
                base.name
            )));
        }
        Verdict::Unknown => {
            return Err(IdealError::Unsupported(format!(
                "positivity of the restriction target could not be established for `{}`",
                base.name
            )));
        }
    }
    let name = format!("{}|{}", base.name, trace_term(&within));
    let admissible = base.admissible;
    let proper = true; // the full carrier traces to `within`, which is positive
    let note = format!("trace of `{}` on a certified positive set", base.name);
    Ok(IdealHandle {
        name,
        carrier: base.carrier.clone(),
        kernel: Kernel::Restrict { base: Box::new(base), within },
        tags: IdealTags { p_plus: None, p_minus: None, p_prime: None, class_note: note },
        admissible,
        proper,
    })
}

/// Names accepted by [`registry`].
pub const REGISTRY_NAMES: [&str; 8] = [
    "fin",
    "summable",
    "density-zero",
    "banach-zero",
    "fin2",
    "empty-times-fin",
    "iw",
    "none",
];

/// Ideals reachable by name from the command line.
pub fn registry(name: &str) -> Option<IdealHandle> {
    match name {
        "fin" => Some(fin()),
        "summable" => Some(summable()),
        "density-zero" => Some(density_zero()),
        "banach-zero" => Some(banach_zero()),
        "fin2" => Some(fin2()),
        "empty-times-fin" => {
            let mut h = fubini_product(none_ideal(), fin()).expect("registry product");
            h.name = "empty-times-fin".into();
            Some(h)
        }
        "iw" => Some(iw()),
        "none" => Some(none_ideal()),
        _ => None,
    }
}

// ---------------------------------------------------------------------------
// Decision procedure
// ---------------------------------------------------------------------------

impl IdealHandle {
    /// Decides membership of `s`, with a prose trace of the rules that fired.
    pub fn decide(&self, s: &DescribedSet) -> Result<Decision, IdealError> {
        if s.carrier() != self.carrier {
            return Err(IdealError::Carrier(format!(
                "ideal `{}` acts on {}, but the set lives on {}",
                self.name,
                self.carrier,
                s.carrier()
            )));
        }
        let mut path = Vec::new();
        let verdict = self.decide_in(s, 0, &mut path);
        Ok(Decision { verdict, path })
    }

    /// Convenience wrapper returning only the verdict.
    pub fn verdict(&self, s: &DescribedSet) -> Result<Verdict, IdealError> {
        Ok(self.decide(s)?.verdict)
    }

    fn decide_in(&self, s: &DescribedSet, depth: u32, path: &mut Vec<String>) -> Verdict {
        if depth > DECIDE_DEPTH_CAP {
            path.push("structural recursion budget exhausted".into());
            return Verdict::Unknown;
        }
        // Admissible ideals contain every provably finite set.
        if self.admissible && s.finiteness() == Finiteness::Finite {
            path.push(format!(
                "`{}` is provably finite and `{}` contains all finite sets",
                trace_term(s),
                self.name
            ));
            return Verdict::In;
        }
        match &self.kernel {
            Kernel::Fin => self.decide_fin(s, depth, path),
            Kernel::Summable => self.decide_summable(s, depth, path),
            Kernel::DensityZero => self.decide_density(s, depth, path),
            Kernel::BanachZero => self.decide_banach(s, depth, path),
            Kernel::EmptyIdeal => self.decide_empty(s, depth, path),
            Kernel::Fin2 => self.decide_fin2(s, depth, path),
            Kernel::IrrationalClosure => self.decide_irrational(s, depth, path),
            Kernel::Fubini { .. } => self.decide_fubini(s, depth, path),
            Kernel::FubiniSum { .. } => self.decide_sum(s, depth, path),
            Kernel::Restrict { .. } => self.decide_restrict(s, depth, path),
        }
    }

    fn decide_fin(&self, s: &DescribedSet, depth: u32, path: &mut Vec<String>) -> Verdict {
        match s.finiteness() {
            Finiteness::Finite => Verdict::In,
            Finiteness::Infinite => {
                path.push(format!("`{}` is provably infinite", trace_term(s)));
                Verdict::Positive
            }
            Finiteness::Unknown => self.boolean_fallback(s, depth, path),
        }
    }

    fn decide_summable(&self, s: &DescribedSet, depth: u32, path: &mut Vec<String>) -> Verdict {
        if let Some(ep) = s.try_ep() {
            if ep.is_finite() {
                return Verdict::In;
            }
            path.push(format!(
                "`{}` is eventually periodic and infinite: it contains a full arithmetic \
                 progression, whose reciprocal series diverges",
                trace_term(s)
            ));
            return Verdict::Positive;
        }
        match &*s.0 {
            Node::PowerTail { .. } => {
                path.push(
                    "terms at least double at every step, so the reciprocal series is dominated \
                     by a geometric one"
                        .into(),
                );
                Verdict::In
            }
            Node::BranchDiag(_) => {
                path.push(
                    "one element per dyadic block [2^l, 2^(l+1)): the reciprocal series is \
                     dominated by a geometric one"
                        .into(),
                );
                Verdict::In
            }
            Node::Enumerated(e) => match e.growth {
                Some(Growth::Pow2) => {
                    path.push(format!(
                        "enumeration `{}` carries a doubling witness: geometric reciprocal bound",
                        e.name
                    ));
                    Verdict::In
                }
                Some(Growth::Square) => {
                    path.push(format!(
                        "enumeration `{}` grows at least quadratically: reciprocal series \
                         dominated by Σ 1/i²",
                        e.name
                    ));
                    Verdict::In
                }
                Some(Growth::PolyLog) => {
                    path.push(format!(
                        "enumeration `{}` has poly-log counting growth: partial summation \
                         bounds the reciprocal series by a convergent integral",
                        e.name
                    ));
                    Verdict::In
                }
                None => self.boolean_fallback(s, depth, path),
            },
            Node::PartitionUnion { family, indices } => self
                .line_partition_rule(
                    *family,
                    indices,
                    "a selected valuation class is a full progression with divergent \
                     reciprocal sum",
                    "infinitely many selected dyadic blocks each contribute reciprocal mass \
                     about ln 2",
                    path,
                )
                .unwrap_or_else(|| self.boolean_fallback(s, depth, path)),
            _ => self.boolean_fallback(s, depth, path),
        }
    }

    fn decide_density(&self, s: &DescribedSet, depth: u32, path: &mut Vec<String>) -> Verdict {
        if let Some(ep) = s.try_ep() {
            if ep.is_finite() {
                return Verdict::In;
            }
            path.push(format!(
                "`{}` is eventually periodic and infinite: its density is a positive rational",
                trace_term(s)
            ));
            return Verdict::Positive;
        }
        match &*s.0 {
            Node::PowerTail { .. } => {
                path.push("at most log₂N + 1 elements below N: density vanishes".into());
                Verdict::In
            }
            Node::BranchDiag(_) => {
                path.push(
                    "one element per dyadic block, so at most log₂N + 1 elements below N: \
                     density vanishes"
                        .into(),
                );
                Verdict::In
            }
            Node::Enumerated(e) => {
                if e.growth.is_some() {
                    path.push(format!(
                        "enumeration `{}` carries a growth witness forcing sublinear counting",
                        e.name
                    ));
                    Verdict::In
                } else if e.spread == Some(Spread::GapsDiverge) {
                    path.push(format!(
                        "enumeration `{}` has nondecreasing unbounded gaps: density vanishes",
                        e.name
                    ));
                    Verdict::In
                } else {
                    self.boolean_fallback(s, depth, path)
                }
            }
            Node::PartitionUnion { family, indices } => self
                .line_partition_rule(
                    *family,
                    indices,
                    "a selected valuation class is a full residue class of positive density",
                    "infinitely many selected dyadic blocks force upper density at least 1/2",
                    path,
                )
                .unwrap_or_else(|| self.boolean_fallback(s, depth, path)),
            _ => self.boolean_fallback(s, depth, path),
        }
    }

    fn decide_banach(&self, s: &DescribedSet, depth: u32, path: &mut Vec<String>) -> Verdict {
        if let Some(ep) = s.try_ep() {
            if ep.is_finite() {
                return Verdict::In;
            }
            path.push(format!(
                "`{}` is eventually periodic and infinite: every window of one period length \
                 contains a member, so the uniform density is positive",
                trace_term(s)
            ));
            return Verdict::Positive;
        }
        match &*s.0 {
            Node::PowerTail { .. } => {
                path.push("gaps double, so window counts are O(log L) uniformly".into());
                Verdict::In
            }
            Node::BranchDiag(_) => {
                path.push(
                    "the gap above the level-l element is at least 2^l, so window counts are \
                     O(log L) uniformly"
                        .into(),
                );
                Verdict::In
            }
            Node::Enumerated(e) => match (e.growth, e.spread) {
                (_, Some(Spread::GapsDiverge)) => {
                    path.push(format!(
                        "enumeration `{}` has nondecreasing unbounded gaps: uniform density \
                         vanishes",
                        e.name
                    ));
                    Verdict::In
                }
                (Some(Growth::Pow2), _) => {
                    path.push(format!(
                        "enumeration `{}` doubles at every step: any window of length L holds \
                         O(log L) members wherever it sits",
                        e.name
                    ));
                    Verdict::In
                }
                (Some(Growth::Square), _) => {
                    path.push(format!(
                        "enumeration `{}` grows quadratically, so its gaps grow without bound",
                        e.name
                    ));
                    Verdict::In
                }
                (_, Some(Spread::FullRuns)) => {
                    path.push(format!(
                        "enumeration `{}` contains solid runs of every length: some window of \
                         each length has density one",
                        e.name
                    ));
                    Verdict::Positive
                }
                _ => self.boolean_fallback(s, depth, path),
            },
            Node::PartitionUnion { family, indices } => self
                .line_partition_rule(
                    *family,
                    indices,
                    "a selected valuation class meets every window of one period length",
                    "each selected dyadic block is a solid run of its own length",
                    path,
                )
                .unwrap_or_else(|| self.boolean_fallback(s, depth, path)),
            _ => self.boolean_fallback(s, depth, path),
        }
    }

    fn decide_empty(&self, s: &DescribedSet, depth: u32, path: &mut Vec<String>) -> Verdict {
        match s.emptiness() {
            TriBool::True => {
                path.push(format!("`{}` is provably empty", trace_term(s)));
                Verdict::In
            }
            TriBool::False => {
                path.push(format!("`{}` is provably nonempty", trace_term(s)));
                Verdict::Positive
            }
            TriBool::Unknown => self.boolean_fallback(s, depth, path),
        }
    }

    fn decide_irrational(&self, s: &DescribedSet, depth: u32, path: &mut Vec<String>) -> Verdict {
        if let Some(ep) = s.try_ep() {
            if ep.is_finite() {
                return Verdict::In;
            }
            path.push(format!(
                "`{}` contains a full arithmetic progression; progression indices realize \
                 every digit pattern above the fixed low bits, so the enumerated points \
                 accumulate at a tail-of-ones (never eventually zero) point",
                trace_term(s)
            ));
            return Verdict::Positive;
        }
        match &*s.0 {
            Node::PowerTail { add, .. } => {
                path.push(format!(
                    "indices 2^l + {add} code the digits of {add} plus one high digit drifting \
                     to infinity; the images converge to the single eventually-zero point coded \
                     by {add}, as does every subsequence",
                ));
                Verdict::In
            }
            Node::BranchDiag(b) => match b.ep_parts() {
                Some((_, period)) if period.value() == 0 => {
                    path.push(format!(
                        "the level-l element codes the first l digits of branch `{}` plus one \
                         high digit drifting to infinity; the images converge to the branch \
                         point, which is eventually zero",
                        b.name
                    ));
                    Verdict::In
                }
                Some(_) => {
                    path.push(format!(
                        "the level-l element codes the first l digits of branch `{}` plus one \
                         high digit drifting to infinity; the images accumulate at the branch \
                         point, which has infinitely many one digits",
                        b.name
                    ));
                    Verdict::Positive
                }
                None => self.boolean_fallback(s, depth, path),
            },
            Node::Enumerated(e) if e.name == "alt-block-idx" => {
                path.push(
                    "indices of the alternating words: their points converge to the \
                     alternating (never eventually zero) point"
                        .into(),
                );
                Verdict::Positive
            }
            Node::Enumerated(e) if e.name == "pow2" || e.name == "pow2-plain" => {
                path.push(
                    "power indices code points with a single drifting high digit; those \
                     converge to the all-zero point, as does every subsequence"
                        .into(),
                );
                Verdict::In
            }
            Node::PartitionUnion { family, indices } => self
                .line_partition_rule(
                    *family,
                    indices,
                    "a selected valuation class is a full progression; its points accumulate \
                     at a tail-of-ones point",
                    "selected dyadic blocks exhaust all words of infinitely many lengths, so \
                     the image accumulates at every point of the space",
                    path,
                )
                .unwrap_or_else(|| self.boolean_fallback(s, depth, path)),
            _ => self.boolean_fallback(s, depth, path),
        }
    }

    /// Shared positive rules for unions of registered line partitions.
    /// Returns `None` when the family gives this kernel no leverage.
    fn line_partition_rule(
        &self,
        family: PartFamily,
        indices: &DescribedSet,
        nu2_reason: &str,
        dyadic_reason: &str,
        path: &mut Vec<String>,
    ) -> Option<Verdict> {
        match family {
            PartFamily::Nu2 => match indices.emptiness() {
                TriBool::True => {
                    path.push("no parts selected: the union is empty".into());
                    Some(Verdict::In)
                }
                TriBool::False => {
                    path.push(nu2_reason.to_string());
                    Some(Verdict::Positive)
                }
                TriBool::Unknown => {
                    if let Some(p) = indices.probe_member(PROBE_LIMIT) {
                        if let Some(k) = p.as_nat() {
                            path.push(format!("index {k} selected; {nu2_reason}"));
                            return Some(Verdict::Positive);
                        }
                    }
                    None
                }
            },
            PartFamily::DyadicBlocks => match indices.finiteness() {
                Finiteness::Infinite => {
                    path.push(dyadic_reason.to_string());
                    Some(Verdict::Positive)
                }
                Finiteness::Finite => {
                    path.push("finitely many finite blocks selected: a finite set".into());
                    Some(Verdict::In)
                }
                Finiteness::Unknown => None,
            },
            _ => None,
        }
    }

    fn decide_fin2(&self, s: &DescribedSet, depth: u32, path: &mut Vec<String>) -> Verdict {
        match &*s.0 {
            Node::BranchCert(b) => match b.ep_parts() {
                Some((head, period)) => {
                    if word_has_one(&period) {
                        path.push(
                            "branch period contains a one: infinitely many anchors, each an \
                             infinite certificate column"
                                .into(),
                        );
                        Verdict::Positive
                    } else {
                        let ones = (0..head.len()).filter(|i| head.bit(*i) != 0).count();
                        path.push(format!(
                            "branch ones are confined to the finite head ({ones} of them): \
                             only finitely many columns are infinite"
                        ));
                        Verdict::In
                    }
                }
                None => {
                    path.push("opaque branch oracle: anchor count unprovable".into());
                    Verdict::Unknown
                }
            },
            Node::PartitionUnion { family: PartFamily::DiagRows, .. } => {
                path.push(
                    "every vertical section of a diagonal-rows union is finite (bounded by \
                     the column index)"
                        .into(),
                );
                Verdict::In
            }
            _ => {
                if let Some(pieces) = s.rect_decompose() {
                    return self.fin2_pieces(&pieces, depth, path);
                }
                self.boolean_fallback(s, depth, path)
            }
        }
    }

    fn fin2_pieces(
        &self,
        pieces: &[crate::natsets::RectPiece],
        depth: u32,
        path: &mut Vec<String>,
    ) -> Verdict {
        let mut bad_cols: Vec<DescribedSet> = Vec::new();
        let mut unknown = 0usize;
        for p in pieces {
            match p.rows.finiteness() {
                Finiteness::Finite => {}
                Finiteness::Infinite => bad_cols.push(p.cols.clone()),
                Finiteness::Unknown => unknown += 1,
            }
        }
        path.push(format!(
            "{} rectangle piece(s): {} with infinite rows, {} undetermined",
            pieces.len(),
            bad_cols.len(),
            unknown
        ));
        let lower = match DescribedSet::union_all(bad_cols) {
            Ok(u) => u,
            Err(_) => return Verdict::Unknown,
        };
        if unknown == 0 {
            // Sections over other columns are finite unions of finite sets,
            // so `lower` is exactly the set of infinite-section columns.
            match lower.finiteness() {
                Finiteness::Finite => {
                    path.push("the infinite-section columns form a finite set".into());
                    Verdict::In
                }
                Finiteness::Infinite => {
                    path.push("infinitely many columns have infinite sections".into());
                    Verdict::Positive
                }
                Finiteness::Unknown => self.piece_fallback(depth, path),
            }
        } else if lower.finiteness() == Finiteness::Infinite {
            path.push(
                "already the certified infinite-row pieces cover infinitely many columns"
                    .into(),
            );
            Verdict::Positive
        } else {
            self.piece_fallback(depth, path)
        }
    }

    fn piece_fallback(&self, _depth: u32, path: &mut Vec<String>) -> Verdict {
        path.push("column classification incomplete".into());
        Verdict::Unknown
    }

    fn decide_fubini(&self, s: &DescribedSet, depth: u32, path: &mut Vec<String>) -> Verdict {
        let (outer, inner) = match &self.kernel {
            Kernel::Fubini { outer, inner } => (outer.as_ref(), inner.as_ref()),
            _ => unreachable!("decide_fubini on a non-product kernel"),
        };
        match &*s.0 {
            Node::BranchCert(b) => self.fubini_branch(outer, inner, b, depth, path),
            Node::PartitionUnion { family: PartFamily::DiagRows, indices } => {
                path.push("every vertical section of a diagonal-rows union is finite".into());
                if inner.admissible {
                    path.push(format!(
                        "finite sections lie in `{}`: no bad columns at all",
                        inner.name
                    ));
                    return Verdict::In;
                }
                if matches!(inner.kernel, Kernel::EmptyIdeal) {
                    return self.diag_rows_over_empty(outer, indices, depth, path);
                }
                self.boolean_fallback(s, depth, path)
            }
            _ => {
                if let Some(pieces) = s.rect_decompose() {
                    return self.fubini_pieces(outer, inner, &pieces, depth, path);
                }
                self.boolean_fallback(s, depth, path)
            }
        }
    }

    /// Diagonal-rows unions judged with the trivial inner ideal: a section is
    /// bad exactly when it is nonempty, i.e. from the least selected row on.
    fn diag_rows_over_empty(
        &self,
        outer: &IdealHandle,
        indices: &DescribedSet,
        depth: u32,
        path: &mut Vec<String>,
    ) -> Verdict {
        match indices.emptiness() {
            TriBool::True => {
                path.push("no rows selected: the union is empty".into());
                return Verdict::In;
            }
            TriBool::False | TriBool::Unknown => {}
        }
        if let Some(ep) = indices.try_ep() {
            if let Some(m) = ep.min() {
                let bad = DescribedSet::interval(m, None).expect("interval");
                path.push(format!(
                    "sections are nonempty exactly from column {m} on: bad columns `{}`",
                    trace_term(&bad)
                ));
                return outer.decide_in(&bad, depth + 1, path);
            }
            path.push("no rows selected: the union is empty".into());
            return Verdict::In;
        }
        if let Some(p) = indices.probe_member(PROBE_LIMIT) {
            if let Some(k) = p.as_nat() {
                let tail = DescribedSet::interval(k, None).expect("interval");
                path.push(format!(
                    "row {k} is selected, so all columns from {k} on have nonempty sections"
                ));
                if outer.decide_in(&tail, depth + 1, path) == Verdict::Positive {
                    return Verdict::Positive;
                }
            }
        }
        Verdict::Unknown
    }

    fn fubini_branch(
        &self,
        outer: &IdealHandle,
        inner: &IdealHandle,
        b: &crate::natsets::BranchBits,
        depth: u32,
        path: &mut Vec<String>,
    ) -> Verdict {
        let rep = match representative_cert_rows(b) {
            Some(r) => r,
            None => {
                path.push("certificate rows not representable for this branch".into());
                return Verdict::Unknown;
            }
        };
        path.push("judging one representative certificate column; all anchor sections share \
                   its tail"
            .into());
        let iv = inner.decide_in(&rep, depth + 1, path);
        match iv {
            Verdict::In => {
                path.push(format!(
                    "certificate columns lie in `{}` (sections are subsets of the \
                     representative up to finite head): no bad columns",
                    inner.name
                ));
                Verdict::In
            }
            Verdict::Positive => {
                // Anchor sections differ from the representative by a finite
                // head, which admissible inner ideals ignore; the trivial
                // inner ideal only needs nonemptiness, which tails keep.
                if !inner.admissible && !matches!(inner.kernel, Kernel::EmptyIdeal) {
                    path.push(
                        "inner positivity may not transfer to section tails for this inner \
                         ideal"
                            .into(),
                    );
                    return Verdict::Unknown;
                }
                path.push("every anchor column is a bad column".into());
                self.anchor_set_verdict(outer, b, path)
            }
            Verdict::Unknown => Verdict::Unknown,
        }
    }

    /// Outer verdict on the set of anchor columns of a branch.
    fn anchor_set_verdict(
        &self,
        outer: &IdealHandle,
        b: &crate::natsets::BranchBits,
        path: &mut Vec<String>,
    ) -> Verdict {
        match (&outer.kernel, b.ep_parts()) {
            (Kernel::Fin, Some((head, period))) => {
                if word_has_one(&period) {
                    path.push("branch period contains a one: infinitely many anchors".into());
                    Verdict::Positive
                } else {
                    let ones = (0..head.len()).filter(|i| head.bit(*i) != 0).count();
                    path.push(format!(
                        "branch ones confined to the head ({ones}): finitely many anchors"
                    ));
                    Verdict::In
                }
            }
            (Kernel::EmptyIdeal, parts) => {
                if let Some((head, period)) = &parts {
                    if !word_has_one(head) && !word_has_one(period) {
                        path.push("branch has no ones: no anchors at all".into());
                        return Verdict::In;
                    }
                }
                if b.anchor(0).is_some() {
                    path.push("at least one anchor exists".into());
                    Verdict::Positive
                } else {
                    path.push("no anchor found within the scan horizon".into());
                    Verdict::Unknown
                }
            }
            _ => {
                path.push(format!(
                    "outer ideal `{}` cannot classify the sparse anchor-column set",
                    outer.name
                ));
                Verdict::Unknown
            }
        }
    }

    fn fubini_pieces(
        &self,
        outer: &IdealHandle,
        inner: &IdealHandle,
        pieces: &[crate::natsets::RectPiece],
        depth: u32,
        path: &mut Vec<String>,
    ) -> Verdict {
        let mut bad_cols: Vec<DescribedSet> = Vec::new();
        let mut unknown = 0usize;
        for p in pieces {
            match inner.decide_in(&p.rows, depth + 1, path) {
                Verdict::In => {}
                Verdict::Positive => bad_cols.push(p.cols.clone()),
                Verdict::Unknown => unknown += 1,
            }
        }
        path.push(format!(
            "{} rectangle piece(s): {} with `{}`-positive rows, {} undetermined",
            pieces.len(),
            bad_cols.len(),
            inner.name,
            unknown
        ));
        let lower = match DescribedSet::union_all(bad_cols) {
            Ok(u) => u,
            Err(_) => return Verdict::Unknown,
        };
        if unknown == 0 {
            // Overlaps are safe in both directions: a column covered only by
            // inner-small pieces has an inner-small section (finite union),
            // and one covered by some positive piece has a positive section
            // (supersets of positive sets are positive).
            path.push(format!("exact bad-column set `{}`", trace_term(&lower)));
            outer.decide_in(&lower, depth + 1, path)
        } else if outer.decide_in(&lower, depth + 1, path) == Verdict::Positive {
            path.push(
                "already the certified positive-section columns form an outer-positive set"
                    .into(),
            );
            Verdict::Positive
        } else {
            Verdict::Unknown
        }
    }

    fn decide_sum(&self, s: &DescribedSet, depth: u32, path: &mut Vec<String>) -> Verdict {
        let (left, right) = match &self.kernel {
            Kernel::FubiniSum { left, right } => (left.as_ref(), right.as_ref()),
            _ => unreachable!("decide_sum on a non-sum kernel"),
        };
        if let Some(ep) = s.try_ep() {
            let evens = reduction::ep_affine_preimage(&ep, 2, 0)
                .ok()
                .and_then(|e| DescribedSet::from_ep(&e).ok());
            let odds = reduction::ep_affine_preimage(&ep, 2, 1)
                .ok()
                .and_then(|e| DescribedSet::from_ep(&e).ok());
            if let (Some(evens), Some(odds)) = (evens, odds) {
                path.push(format!(
                    "even half `{}`, odd half `{}`",
                    trace_term(&evens),
                    trace_term(&odds)
                ));
                let lv = left.decide_in(&evens, depth + 1, path);
                let rv = right.decide_in(&odds, depth + 1, path);
                return match (lv, rv) {
                    (Verdict::In, Verdict::In) => Verdict::In,
                    (Verdict::Positive, _) | (_, Verdict::Positive) => Verdict::Positive,
                    _ => Verdict::Unknown,
                };
            }
        }
        self.boolean_fallback(s, depth, path)
    }

    fn decide_restrict(&self, s: &DescribedSet, depth: u32, path: &mut Vec<String>) -> Verdict {
        let (base, within) = match &self.kernel {
            Kernel::Restrict { base, within } => (base.as_ref(), within),
            _ => unreachable!("decide_restrict on a non-trace kernel"),
        };
        let cut = match DescribedSet::inter(s.clone(), within.clone()) {
            Ok(c) => c,
            Err(_) => return Verdict::Unknown,
        };
        path.push(format!("judging the part inside `{}`", trace_term(within)));
        base.decide_in(&cut, depth + 1, path)
    }

    /// Generic monotonicity/union laws, valid for every ideal; the complement
    /// rule additionally uses properness.
    fn boolean_fallback(&self, s: &DescribedSet, depth: u32, path: &mut Vec<String>) -> Verdict {
        match &*s.0 {
            Node::Union(a, b) => {
                let va = self.decide_in(a, depth + 1, path);
                if va == Verdict::Positive {
                    path.push("a positive set stays positive inside any union".into());
                    return Verdict::Positive;
                }
                let vb = self.decide_in(b, depth + 1, path);
                match (va, vb) {
                    (_, Verdict::Positive) => {
                        path.push("a positive set stays positive inside any union".into());
                        Verdict::Positive
                    }
                    (Verdict::In, Verdict::In) => {
                        path.push("ideals are closed under finite unions".into());
                        Verdict::In
                    }
                    _ => Verdict::Unknown,
                }
            }
            Node::Inter(a, b) => {
                if self.decide_in(a, depth + 1, path) == Verdict::In
                    || self.decide_in(b, depth + 1, path) == Verdict::In
                {
                    path.push("a subset of an ideal member is a member".into());
                    return Verdict::In;
                }
                Verdict::Unknown
            }
            Node::Diff(a, b) => {
                let va = self.decide_in(a, depth + 1, path);
                if va == Verdict::In {
                    path.push("a subset of an ideal member is a member".into());
                    return Verdict::In;
                }
                if va == Verdict::Positive && self.decide_in(b, depth + 1, path) == Verdict::In {
                    path.push(
                        "removing an ideal member cannot make a positive set small".into(),
                    );
                    return Verdict::Positive;
                }
                Verdict::Unknown
            }
            Node::Compl(a) => {
                if self.proper && self.decide_in(a, depth + 1, path) == Verdict::In {
                    path.push(
                        "the carrier splits into this set and an ideal member; a proper ideal \
                         cannot contain both"
                            .into(),
                    );
                    return Verdict::Positive;
                }
                Verdict::Unknown
            }
            _ => {
                path.push(format!(
                    "no decision rule of `{}` applies to `{}`",
                    self.name,
                    trace_term(s)
                ));
                Verdict::Unknown
            }
        }
    }
}

fn word_has_one(w: &BinWord) -> bool {
    (0..w.len()).any(|i| w.bit(i) != 0)
}

/// One representative certificate column of a branch, as a line enumeration
/// with exact witnesses: elements 2^l + val(branch↾l) for l ≥ 1, one per
/// dyadic block, with nondecreasing unbounded gaps 2^l·(1 + bit_l).
fn representative_cert_rows(b: &crate::natsets::BranchBits) -> Option<DescribedSet> {
    let gen_b = b.clone();
    let mem_b = b.clone();
    let e = EnumSet::new(
        format!("cert rows along {}", b.name),
        Arc::new(move |i| {
            let l = i.checked_add(1)?;
            if l > 62 {
                return None;
            }
            gen_b.cert_row(l as u32)
        }),
        Arc::new(move |n: u64| {
            if n < 2 {
                return false;
            }
            let l = 63 - n.leading_zeros();
            mem_b.cert_row(l) == Some(n)
        }),
        Some(Growth::PolyLog),
        Some(Spread::GapsDiverge),
    );
    Some(DescribedSet::enumerated(e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::natsets::grammar::parse;

    fn v(ideal: &IdealHandle, term: &str) -> Verdict {
        ideal.decide(&parse(term).unwrap()).unwrap().verdict
    }

    #[test]
    fn finite_sets_belong_to_every_admissible_ideal() {
        for name in REGISTRY_NAMES {
            let h = registry(name).unwrap();
            if !h.admissible {
                continue;
            }
            let s = if h.carrier == Carrier::Line {
                parse("(fin 0 5 17)").unwrap()
            } else {
                parse("(rect (fin 1 2) (fin 3))").unwrap()
            };
            assert_eq!(h.decide(&s).unwrap().verdict, Verdict::In, "{name}");
        }
    }

    #[test]
    fn full_carrier_is_positive_everywhere() {
        for name in REGISTRY_NAMES {
            let h = registry(name).unwrap();
            let s = DescribedSet::full_of(&h.carrier);
            assert_eq!(h.decide(&s).unwrap().verdict, Verdict::Positive, "{name}");
        }
    }

    #[test]
    fn residue_classes_are_positive_for_the_line_ideals() {
        for name in ["fin", "summable", "density-zero", "banach-zero", "iw"] {
            let h = registry(name).unwrap();
            assert_eq!(v(&h, "(res 1 4)"), Verdict::Positive, "{name}");
        }
    }

    #[test]
    fn doubling_sets_are_summable_and_sparse() {
        for name in ["summable", "density-zero", "banach-zero"] {
            let h = registry(name).unwrap();
            assert_eq!(v(&h, "(enum pow2)"), Verdict::In, "{name} pow2");
            assert_eq!(v(&h, "(ptail 0 0)"), Verdict::In, "{name} ptail");
        }
        assert_eq!(v(&fin(), "(enum pow2)"), Verdict::Positive);
    }

    #[test]
    fn witnessless_enumeration_is_honestly_unknown() {
        assert_eq!(v(&summable(), "(enum pow2-plain)"), Verdict::Unknown);
        // But the finite ideal still decides it: registered enumerations are
        // infinite by contract.
        assert_eq!(v(&fin(), "(enum pow2-plain)"), Verdict::Positive);
    }

    #[test]
    fn block_ramp_separates_density_from_uniform_density() {
        let z = density_zero();
        let b = banach_zero();
        let s = summable();
        assert_eq!(v(&z, "(enum log-ramp)"), Verdict::In);
        assert_eq!(v(&b, "(enum log-ramp)"), Verdict::Positive);
        assert_eq!(v(&s, "(enum log-ramp)"), Verdict::In);
    }

    #[test]
    fn summable_and_density_disagree_on_thin_progressions() {
        // A progression is positive for the density ideal but also for the
        // summable ideal; the separator is the squares, summable but not
        // a progression.
        assert_eq!(v(&summable(), "(enum squares)"), Verdict::In);
        assert_eq!(v(&density_zero(), "(enum squares)"), Verdict::In);
        assert_eq!(v(&summable(), "(res 0 1000)"), Verdict::Positive);
    }

    #[test]
    fn planar_products_judge_columns() {
        let f2 = fin2();
        assert_eq!(v(&f2, "(row 0)"), Verdict::In, "one infinite column only");
        assert_eq!(v(&f2, "(rect (res 0 2) (ival 0 *))"), Verdict::Positive);
        assert_eq!(v(&f2, "(rect (ival 0 *) (fin 1 2))"), Verdict::In);
        assert_eq!(v(&f2, "(col 7)"), Verdict::In, "a single infinite section");
        assert_eq!(
            v(&f2, "(union (col 1) (union (col 2) (col 3)))"),
            Verdict::In,
            "three infinite sections"
        );
        assert_eq!(v(&f2, "(punion plane-columns (res 0 2))"), Verdict::Positive);
    }

    #[test]
    fn sectionwise_finite_ideal_flags_any_infinite_section() {
        let etf = registry("empty-times-fin").unwrap();
        assert_eq!(v(&etf, "(col 3)"), Verdict::Positive, "one infinite section");
        assert_eq!(v(&etf, "(row 0)"), Verdict::In, "all sections are singletons");
        assert_eq!(v(&etf, "(punion diag-rows (ival 0 *))"), Verdict::In, "triangle");
        assert_eq!(v(&etf, "(rect (fin 1 2 3) (fin 0 9))"), Verdict::In);
        assert_eq!(v(&etf, "(punion diag-rows (res 0 2))"), Verdict::In);
    }

    #[test]
    fn triangle_lies_in_the_iterated_finite_ideal() {
        assert_eq!(v(&fin2(), "(punion diag-rows (ival 0 *))"), Verdict::In);
    }

    #[test]
    fn branch_certificates_concentrate_on_anchor_columns() {
        let f2 = fin2();
        assert_eq!(v(&f2, "(bcert :1)"), Verdict::Positive, "ones forever");
        assert_eq!(v(&f2, "(bcert 101:0)"), Verdict::In, "ones only in the head");
        assert_eq!(v(&f2, "(bcert :10)"), Verdict::Positive, "periodic ones");
        let prod = fubini_product(fin(), fin()).unwrap();
        assert_eq!(v(&prod, "(bcert :1)"), Verdict::Positive);
        assert_eq!(v(&prod, "(bcert 101:0)"), Verdict::In);
        let etf = registry("empty-times-fin").unwrap();
        assert_eq!(v(&etf, "(bcert 101:0)"), Verdict::Positive, "anchors exist");
        assert_eq!(v(&etf, "(bcert :0)"), Verdict::In, "no ones, empty certificate");
    }

    #[test]
    fn branch_diagonals_decide_across_line_ideals() {
        // One element per dyadic block: infinite but sparse in every sense.
        for diag in ["(bdiag 110:0)", "(bdiag :10)", "(bdiag :1)"] {
            assert_eq!(v(&fin(), diag), Verdict::Positive, "{diag} is infinite");
            assert_eq!(v(&summable(), diag), Verdict::In, "{diag} reciprocals");
            assert_eq!(v(&density_zero(), diag), Verdict::In, "{diag} density");
            assert_eq!(v(&banach_zero(), diag), Verdict::In, "{diag} windows");
        }
        // The coded points converge to the branch point itself, so the
        // accumulation ideal turns on whether that point is eventually zero.
        let w = iw();
        assert_eq!(v(&w, "(bdiag 110:0)"), Verdict::In, "branch dies out");
        assert_eq!(v(&w, "(bdiag :10)"), Verdict::Positive, "branch alternates");
        assert_eq!(v(&w, "(bdiag :1)"), Verdict::Positive, "branch of ones");
    }

    #[test]
    fn product_of_fin_with_fin_matches_the_bespoke_kernel() {
        let f2 = fin2();
        let prod = fubini_product(fin(), fin()).unwrap();
        for term in [
            "(row 0)",
            "(col 7)",
            "(rect (res 0 2) (ival 0 *))",
            "(rect (ival 0 *) (fin 1 2))",
            "(punion plane-columns (res 0 2))",
            "(punion diag-rows (ival 0 *))",
            "(bcert :1)",
            "(bcert 101:0)",
            "(union (col 1) (rect (fin 2 3) (ival 0 *)))",
            "(rect (fin) (ival 0 *))",
        ] {
            assert_eq!(v(&f2, term), v(&prod, term), "disagreement on {term}");
        }
    }

    #[test]
    fn nested_product_respects_the_depth_cap() {
        let p2 = fubini_product(fin(), fin()).unwrap();
        let p3 = fubini_product(fin(), p2).unwrap();
        assert_eq!(p3.carrier.depth(), 3);
        assert!(matches!(
            fubini_product(fin(), p3),
            Err(IdealError::Unsupported(_))
        ));
    }

    #[test]
    fn disjoint_sum_splits_even_and_odd() {
        let s = fubini_sum(fin(), density_zero()).unwrap();
        // Evens of (res 0 2) are everything → fin-positive.
        assert_eq!(v(&s, "(res 0 2)"), Verdict::Positive);
        // Odd progression: evens empty (fin-in), odds = full → density-positive.
        assert_eq!(v(&s, "(res 1 2)"), Verdict::Positive);
        // {2·4k} ∪ odd squares-like thin set: evens (res 0 4)→fin positive.
        assert_eq!(v(&s, "(res 0 8)"), Verdict::Positive);
        assert_eq!(v(&s, "(fin 0 1 2 3)"), Verdict::In);
    }

    #[test]
    fn restriction_requires_a_positive_target() {
        let r = restrict(density_zero(), parse("(res 0 2)").unwrap()).unwrap();
        // Odds are disjoint from the target: small in the trace.
        assert_eq!(v(&r, "(res 1 2)"), Verdict::In);
        assert_eq!(v(&r, "(res 0 4)"), Verdict::Positive);
        assert!(matches!(
            restrict(density_zero(), parse("(enum pow2)").unwrap()),
            Err(IdealError::Improper(_))
        ));
        assert!(matches!(
            restrict(summable(), parse("(enum pow2-plain)").unwrap()),
            Err(IdealError::Unsupported(_))
        ));
    }

    #[test]
    fn trivial_ideal_sees_only_emptiness() {
        let n = none_ideal();
        assert_eq!(v(&n, "(fin)"), Verdict::In);
        assert_eq!(v(&n, "(fin 7)"), Verdict::Positive);
        assert_eq!(v(&n, "(inter (res 0 2) (res 1 2))"), Verdict::In);
    }

    #[test]
    fn irrational_closure_ideal_on_the_structured_fragment() {
        let w = iw();
        assert_eq!(v(&w, "(ival 0 *)"), Verdict::Positive);
        assert_eq!(v(&w, "(res 3 7)"), Verdict::Positive);
        assert_eq!(v(&w, "(ptail 5 3)"), Verdict::In);
        assert_eq!(v(&w, "(enum alt-block-idx)"), Verdict::Positive);
        assert_eq!(v(&w, "(enum pow2)"), Verdict::In);
        assert_eq!(v(&w, "(fin 0 1 2)"), Verdict::In);
        assert_eq!(v(&w, "(enum squares)"), Verdict::Unknown);
        assert_eq!(v(&w, "(punion dyadic-blocks (res 0 2))"), Verdict::Positive);
    }

    #[test]
    fn boolean_laws_cover_composite_terms() {
        let z = density_zero();
        assert_eq!(v(&z, "(union (enum pow2) (enum squares))"), Verdict::In);
        assert_eq!(v(&z, "(union (enum pow2) (res 0 2))"), Verdict::Positive);
        assert_eq!(v(&z, "(inter (res 0 2) (enum pow2))"), Verdict::In);
        assert_eq!(v(&z, "(diff (res 0 2) (enum pow2))"), Verdict::Positive);
        assert_eq!(v(&z, "(compl (enum pow2))"), Verdict::Positive);
        assert_eq!(v(&z, "(diff (enum pow2) (res 0 2))"), Verdict::In);
    }

    #[test]
    fn carrier_mismatch_is_an_error() {
        assert!(matches!(
            fin().decide(&parse("(col 1)").unwrap()),
            Err(IdealError::Carrier(_))
        ));
        assert!(matches!(
            fin2().decide(&parse("(res 0 2)").unwrap()),
            Err(IdealError::Carrier(_))
        ));
    }

    #[test]
    fn decision_paths_serialize_and_explain() {
        let d = density_zero().decide(&parse("(enum log-ramp)").unwrap()).unwrap();
        assert_eq!(d.verdict, Verdict::In);
        assert!(!d.path.is_empty());
        let json = serde_json::to_string(&d).unwrap();
        assert!(json.contains("\"verdict\":\"in\""));
    }

    #[test]
    fn monotonicity_spot_checks() {
        // In-member ⊆ bigger ⇒ bigger never In-refuted as subset; concretely:
        // no pair (A ⊆ B) with A positive and B in.
        let z = density_zero();
        let pairs = [
            ("(enum pow2)", "(union (enum pow2) (enum squares))"),
            ("(res 0 4)", "(res 0 2)"),
            ("(fin 1 2)", "(ival 0 *)"),
        ];
        for (small, big) in pairs {
            let a = parse(small).unwrap();
            let b = parse(big).unwrap();
            assert_eq!(a.prove_subset(&b), TriBool::True, "{small} ⊆ {big}");
            let va = z.decide(&a).unwrap().verdict;
            let vb = z.decide(&b).unwrap().verdict;
            assert!(
                !(va == Verdict::Positive && vb == Verdict::In),
                "monotonicity violated on {small} ⊆ {big}"
            );
        }
    }
}
