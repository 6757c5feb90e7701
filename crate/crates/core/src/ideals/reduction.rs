//! Reduction maps between carriers: exact preimages on the periodic fragment,
//! pointwise probing, and corpus-driven consistency checks for claimed
//! reductions between ideals.
//!
//! A map `f : dom → cod` witnesses a reduction of an ideal `I` on `cod` to an
//! ideal `J` on `dom` when membership transfers through preimages.  Two
//! styles are checked: the two-sided one additionally requires the map to be
//! finite-to-one and flags disagreements in both directions; the one-sided
//! style only requires small sets to pull back to small sets.

use serde::Serialize;

use super::{IdealError, IdealHandle, Verdict};
use crate::natsets::ep::{EpSet, MAX_SPAN};
use crate::natsets::{grammar, Carrier, DescribedSet, Nat, Point, SetError};

/// Points probed per sample when replaying pointwise membership.
const POINT_PROBES: u64 = 400;
/// Scan budget for fiber-size evidence.
const FIBER_SCAN: u64 = 1 << 14;
/// Fiber targets examined for evidence.
const FIBER_TARGETS: u64 = 20;

/// The supported map shapes.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum MapKind {
    /// n ↦ n.
    Identity,
    /// n ↦ a·n + b with a ≥ 1: injective, order preserving.
    Affine { a: Nat, b: Nat },
    /// n ↦ ⌊n/c⌋ with c ≥ 1: exactly c-to-one.
    FloorDiv { c: Nat },
    /// (n, k) ↦ n: fibers are whole columns, not finite-to-one.
    FirstProjection,
    /// (n, k) ↦ (n, 0): collapses each column onto its base point.
    CollapseRows,
}

/// A total map between carriers with exact preimages on the supported
/// fragment.
#[derive(Clone, Debug)]
pub struct ReductionMap {
    pub name: String,
    pub kind: MapKind,
    pub dom: Carrier,
    pub cod: Carrier,
}

impl ReductionMap {
    pub fn identity(carrier: Carrier) -> ReductionMap {
        ReductionMap {
            name: "identity".into(),
            kind: MapKind::Identity,
            dom: carrier.clone(),
            cod: carrier,
        }
    }

    pub fn affine(a: Nat, b: Nat) -> Result<ReductionMap, IdealError> {
        if a == 0 {
            return Err(IdealError::Unsupported(
                "constant maps carry no reduction information".into(),
            ));
        }
        Ok(ReductionMap {
            name: format!("n↦{a}n+{b}"),
            kind: MapKind::Affine { a, b },
            dom: Carrier::Line,
            cod: Carrier::Line,
        })
    }

    pub fn floor_div(c: Nat) -> Result<ReductionMap, IdealError> {
        if c == 0 {
            return Err(IdealError::Unsupported("division by zero".into()));
        }
        Ok(ReductionMap {
            name: format!("n↦⌊n/{c}⌋"),
            kind: MapKind::FloorDiv { c },
            dom: Carrier::Line,
            cod: Carrier::Line,
        })
    }

    pub fn first_projection() -> ReductionMap {
        ReductionMap {
            name: "(n,k)↦n".into(),
            kind: MapKind::FirstProjection,
            dom: Carrier::plane1(),
            cod: Carrier::Line,
        }
    }

    pub fn collapse_rows() -> ReductionMap {
        ReductionMap {
            name: "(n,k)↦(n,0)".into(),
            kind: MapKind::CollapseRows,
            dom: Carrier::plane1(),
            cod: Carrier::plane1(),
        }
    }

    /// Applies the map to one point of the domain.  `None` when the image
    /// would leave the representable range.
    pub fn apply(&self, p: &Point) -> Option<Point> {
        match self.kind {
            MapKind::Identity => Some(p.clone()),
            MapKind::Affine { a, b } => {
                let n = p.as_nat()?;
                Some(Point::N(a.checked_mul(n)?.checked_add(b)?))
            }
            MapKind::FloorDiv { c } => Some(Point::N(p.as_nat()? / c)),
            MapKind::FirstProjection => {
                let (n, _) = p.as_pair()?;
                Some(Point::N(n))
            }
            MapKind::CollapseRows => {
                let (n, _) = p.as_pair()?;
                Some(Point::pair(n, 0))
            }
        }
    }

    /// Whether every fiber is finite.
    pub fn finite_to_one(&self) -> bool {
        !matches!(self.kind, MapKind::FirstProjection | MapKind::CollapseRows)
    }

    /// A uniform bound on fiber sizes, when one exists.
    pub fn fiber_bound(&self) -> Option<Nat> {
        match self.kind {
            MapKind::Identity => Some(1),
            MapKind::Affine { .. } => Some(1),
            MapKind::FloorDiv { c } => Some(c),
            MapKind::FirstProjection | MapKind::CollapseRows => None,
        }
    }

    /// Exact preimage of a described set under the map.
    pub fn pullback(&self, s: &DescribedSet) -> Result<DescribedSet, IdealError> {
        if s.carrier() != self.cod {
            return Err(IdealError::Carrier(format!(
                "pullback target lives on {}, map `{}` lands in {}",
                s.carrier(),
                self.name,
                self.cod
            )));
        }
        match self.kind {
            MapKind::Identity => Ok(s.clone()),
            MapKind::FirstProjection => {
                // f⁻¹(S) = S × ω: exact for every line set.
                Ok(DescribedSet::rect(s.clone(), DescribedSet::full())?)
            }
            MapKind::CollapseRows => {
                let pieces = s.rect_decompose().ok_or_else(|| {
                    IdealError::Unsupported(format!(
                        "preimage under `{}` needs a rectangular decomposition of `{}`",
                        self.name,
                        grammar::print(s)
                    ))
                })?;
                let mut base_cols = Vec::new();
                for p in &pieces {
                    if p.rows.member_nat(0) {
                        base_cols.push(p.cols.clone());
                    }
                }
                let cols = DescribedSet::union_all(base_cols)?;
                Ok(DescribedSet::rect(cols, DescribedSet::full())?)
            }
            MapKind::Affine { .. } | MapKind::FloorDiv { .. } => self.pullback_line(s),
        }
    }

    fn pullback_line(&self, s: &DescribedSet) -> Result<DescribedSet, IdealError> {
        if let Some(ep) = s.try_ep() {
            let pre = match self.kind {
                MapKind::Affine { a, b } => ep_affine_preimage(&ep, a, b)?,
                MapKind::FloorDiv { c } => ep_floordiv_preimage(&ep, c)?,
                _ => unreachable!("pullback_line on a non-line map"),
            };
            return Ok(DescribedSet::from_ep(&pre)?);
        }
        // Preimages commute with every Boolean operation of a total map.
        use crate::natsets::Node;
        match &*s.0 {
            Node::Union(a, b) => {
                Ok(DescribedSet::union(self.pullback_line(a)?, self.pullback_line(b)?)?)
            }
            Node::Inter(a, b) => {
                Ok(DescribedSet::inter(self.pullback_line(a)?, self.pullback_line(b)?)?)
            }
            Node::Diff(a, b) => {
                Ok(DescribedSet::diff(self.pullback_line(a)?, self.pullback_line(b)?)?)
            }
            Node::Compl(a) => Ok(DescribedSet::compl(self.pullback_line(a)?)),
            _ => Err(IdealError::Unsupported(format!(
                "preimage under `{}` supported on the periodic fragment only, got `{}`",
                self.name,
                grammar::print(s)
            ))),
        }
    }
}

/// Exact preimage {n : a·n + b ∈ E} of an eventually periodic set.
pub(crate) fn ep_affine_preimage(ep: &EpSet, a: Nat, b: Nat) -> Result<EpSet, SetError> {
    if a == 0 {
        return Err(SetError::Malformed("affine preimage needs a ≥ 1".into()));
    }
    let t = ep.threshold();
    let p = ep.period();
    // Beyond t2, the image a·n + b is in the periodic tail of E.
    let t2 = t.saturating_sub(b).div_ceil(a);
    if t2 > MAX_SPAN {
        return Err(SetError::Resource(format!(
            "affine preimage head of length {t2} exceeds the supported span"
        )));
    }
    let g = gcd(a % p, p).max(1);
    let p2 = p / g;
    let head: Vec<bool> = (0..t2)
        .map(|n| {
            let val = a as u128 * n as u128 + b as u128;
            if val < t as u128 {
                ep.member(val as u64)
            } else {
                ep.tail_member((val % p as u128) as u64)
            }
        })
        .collect();
    let mask: Vec<bool> = (0..p2)
        .map(|r| {
            // Representative of the absolute class r (mod p2) at or above t2;
            // a·p2 ≡ 0 (mod p), so the image residue is class-invariant.
            let rep = r + p2 * t2.div_ceil(p2);
            let val = a as u128 * rep as u128 + b as u128;
            ep.tail_member((val % p as u128) as u64)
        })
        .collect();
    Ok(EpSet::new(t2, head, p2, mask))
}

/// Exact preimage {n : ⌊n/c⌋ ∈ E} of an eventually periodic set.
pub(crate) fn ep_floordiv_preimage(ep: &EpSet, c: Nat) -> Result<EpSet, SetError> {
    if c == 0 {
        return Err(SetError::Malformed("floor-division preimage needs c ≥ 1".into()));
    }
    let t = ep.threshold();
    let p = ep.period();
    let t2 = t.checked_mul(c).filter(|v| *v <= MAX_SPAN).ok_or_else(|| {
        SetError::Resource("floor-division preimage head exceeds the supported span".into())
    })?;
    let p2 = p.checked_mul(c).filter(|v| *v <= MAX_SPAN).ok_or_else(|| {
        SetError::Resource("floor-division preimage period exceeds the supported span".into())
    })?;
    let head: Vec<bool> = (0..t2).map(|n| ep.member(n / c)).collect();
    // For n ≡ r (mod p·c) with n ≥ t·c, the quotient ⌊n/c⌋ is ≥ t and its
    // residue mod p depends only on r, so one representative per class
    // determines the whole tail.
    let mask: Vec<bool> = (0..p2)
        .map(|r| {
            let rep = r + p2 * t2.div_ceil(p2);
            ep.tail_member(rep / c)
        })
        .collect();
    Ok(EpSet::new(t2, head, p2, mask))
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

// ---------------------------------------------------------------------------
// Reduction checking
// ---------------------------------------------------------------------------

/// Which transfer laws a claimed reduction must satisfy.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReductionStyle {
    /// Two-sided transfer through a finite-to-one map.
    TwoSided,
    /// One-sided transfer: small sets must pull back to small sets.
    OneSided,
}

/// One sample of the transfer law.
#[derive(Clone, Debug, Serialize)]
pub struct SamplePair {
    pub set: String,
    pub forward: Verdict,
    pub pulled: Verdict,
    pub flagged: bool,
}

/// Outcome of replaying a claimed reduction over a sample corpus.
#[derive(Clone, Debug, Serialize)]
pub struct ReductionReport {
    pub map: String,
    pub style: ReductionStyle,
    pub target_ideal: String,
    pub source_ideal: String,
    pub finite_to_one: bool,
    pub fiber_evidence: String,
    pub checked: usize,
    pub skipped: usize,
    pub inconclusive: usize,
    pub agreements: usize,
    pub samples: Vec<SamplePair>,
    pub membership_probes: u64,
    pub membership_mismatches: u64,
    pub consistent: bool,
}

/// Replays `target ≤ source` through `map` over the sample corpus: decides
/// each sample under the target ideal, pulls it back, decides under the
/// source ideal, and flags transfer violations.  Pointwise membership of each
/// pullback is probed as an independent exactness check.
pub fn check_reduction(
    map: &ReductionMap,
    target: &IdealHandle,
    source: &IdealHandle,
    samples: &[DescribedSet],
    style: ReductionStyle,
) -> Result<ReductionReport, IdealError> {
    if target.carrier != map.cod {
        return Err(IdealError::Carrier(format!(
            "target ideal `{}` acts on {}, map lands in {}",
            target.name, target.carrier, map.cod
        )));
    }
    if source.carrier != map.dom {
        return Err(IdealError::Carrier(format!(
            "source ideal `{}` acts on {}, map starts from {}",
            source.name, source.carrier, map.dom
        )));
    }
    let mut report = ReductionReport {
        map: map.name.clone(),
        style,
        target_ideal: target.name.clone(),
        source_ideal: source.name.clone(),
        finite_to_one: map.finite_to_one(),
        fiber_evidence: fiber_evidence(map),
        checked: 0,
        skipped: 0,
        inconclusive: 0,
        agreements: 0,
        samples: Vec::new(),
        membership_probes: 0,
        membership_mismatches: 0,
        consistent: true,
    };
    for s in samples {
        let pulled_set = match map.pullback(s) {
            Ok(ps) => ps,
            Err(_) => {
                report.skipped += 1;
                continue;
            }
        };
        let forward = target.decide(s)?.verdict;
        let pulled = source.decide(&pulled_set)?.verdict;
        report.checked += 1;
        // Independent pointwise replay of the preimage law.
        let (probes, mismatches) = probe_pullback(map, s, &pulled_set);
        report.membership_probes += probes;
        report.membership_mismatches += mismatches;
        let flagged = match style {
            ReductionStyle::TwoSided => {
                forward == Verdict::In && pulled == Verdict::Positive
                    || forward == Verdict::Positive && pulled == Verdict::In
            }
            ReductionStyle::OneSided => {
                forward == Verdict::In && pulled == Verdict::Positive
            }
        };
        if forward == Verdict::Unknown || pulled == Verdict::Unknown {
            report.inconclusive += 1;
        } else if flagged {
            // recorded below
        } else {
            report.agreements += 1;
        }
        if flagged {
            report.consistent = false;
        }
        report.samples.push(SamplePair {
            set: grammar::print(s),
            forward,
            pulled,
            flagged,
        });
    }
    if style == ReductionStyle::TwoSided && !map.finite_to_one() {
        report.consistent = false;
    }
    if report.membership_mismatches > 0 {
        report.consistent = false;
    }
    Ok(report)
}

/// Bounded scan over the first domain points, reporting the largest observed
/// fiber over the first few targets.
fn fiber_evidence(map: &ReductionMap) -> String {
    let mut counts = vec![0u64; FIBER_TARGETS as usize];
    for code in 0..FIBER_SCAN {
        let p = domain_point(&map.dom, code);
        if let Some(q) = map.apply(&p) {
            if let Some(t) = target_index(&q) {
                if t < FIBER_TARGETS {
                    counts[t as usize] += 1;
                }
            }
        }
    }
    let max = counts.iter().copied().max().unwrap_or(0);
    match map.fiber_bound() {
        Some(b) => format!(
            "fibers bounded by {b}; largest observed over {FIBER_TARGETS} targets: {max}"
        ),
        None => format!(
            "no uniform fiber bound; a single target already collected {max} preimages \
             within the scan"
        ),
    }
}

/// The `code`-th point of a carrier, following the canonical enumeration.
fn domain_point(carrier: &Carrier, code: u64) -> Point {
    match carrier {
        Carrier::Line => Point::N(code),
        Carrier::Plane(inner) => {
            let (n, rest) = crate::util::unpair_u64(code);
            match &**inner {
                Carrier::Line => Point::pair(n, rest),
                Carrier::Plane(_) => Point::P(n, Box::new(domain_point(inner, rest))),
            }
        }
    }
}

/// Collapses a point to a small scalar index used to bucket fibers.
fn target_index(q: &Point) -> Option<u64> {
    match q {
        Point::N(n) => Some(*n),
        Point::P(n, rest) => rest.as_nat().and_then(|k| crate::util::pair_u64(*n, k)),
    }
}

fn probe_pullback(
    map: &ReductionMap,
    s: &DescribedSet,
    pulled: &DescribedSet,
) -> (u64, u64) {
    let mut probes = 0;
    let mut mismatches = 0;
    for code in 0..POINT_PROBES {
        let p = domain_point(&map.dom, code);
        let image = match map.apply(&p) {
            Some(q) => q,
            None => continue,
        };
        probes += 1;
        if pulled.member(&p) != s.member(&image) {
            mismatches += 1;
        }
    }
    (probes, mismatches)
}
