//! Structural analysis of described sets: eventual-periodic normalization,
//! finiteness, emptiness, and subset/disjointness provers.
//!
//! All verdicts are sound: `True`/`False`/`Finite`/`Infinite` are only
//! produced when the structure genuinely proves them; everything else is
//! `Unknown`.  The workhorse is the eventually-periodic normal form, which
//! covers finite sets, intervals, residue classes, bit-mask sets,
//! column-prefix sets, and Boolean combinations thereof exactly.  Power tails
//! are handled against the periodic fragment by modular cycle analysis;
//! enumerations and partition unions by dedicated rules.

use super::ep::EpSet;
use super::{BranchBits, Carrier, DescribedSet, Node, Point};
use crate::util::{Finiteness, TriBool};

/// Bounded-candidate scan limit for counterexample searches.
const SCAN_CANDIDATES: u64 = 1 << 13;
/// How many elements of a sparse structural iterator to test in scans.
const SPARSE_PULLS: usize = 160;
/// Recursion cap for the structural provers.
const MAX_DEPTH: u32 = 24;
/// Largest eventual period for which power-tail cycle analysis runs.
const MAX_CYCLE_PERIOD: u64 = 1 << 16;

impl DescribedSet {
    /// Eventually periodic normal form, when the set lies in that fragment.
    pub fn try_ep(&self) -> Option<EpSet> {
        if self.carrier() != Carrier::Line {
            return None;
        }
        match &*self.0 {
            Node::Finite(v) => EpSet::finite(v),
            Node::Interval { lo, hi } => EpSet::interval(*lo, *hi),
            Node::Residue { a, m } => EpSet::residue(*a, *m),
            Node::BitMask { mask, pattern } => EpSet::bitmask(*mask, *pattern),
            Node::PrefixCols { word } => {
                // {n ≥ idx(w) : n ≡ value(w) − 1 (mod 2^{|w|})}.
                if word.len() > 21 {
                    return None;
                }
                let m = 1u64 << word.len();
                let a = (word.value() + m - 1) % m;
                let r = EpSet::residue(a, m)?;
                let i = EpSet::interval(word.idx(), None)?;
                r.intersection(&i)
            }
            Node::PartitionUnion { family, indices } => {
                let ie = indices.try_ep()?;
                let period = ie.period();
                let t = ie.threshold();
                let tail_full = (0..period).all(|r| ie.tail_member(r));
                let tail_empty = (0..period).all(|r| !ie.tail_member(r));
                if !tail_full && !tail_empty {
                    return None;
                }
                let mut acc = EpSet::empty();
                for k in ie.elements_below(t) {
                    let part = family.part(k).ok()?;
                    acc = acc.union(&part.try_ep()?)?;
                }
                if tail_full {
                    let tail = family.tail_union(t)?;
                    acc = acc.union(&tail.try_ep()?)?;
                }
                Some(acc)
            }
            Node::Union(a, b) => a.try_ep()?.union(&b.try_ep()?),
            Node::Inter(a, b) => a.try_ep()?.intersection(&b.try_ep()?),
            Node::Diff(a, b) => a.try_ep()?.difference(&b.try_ep()?),
            Node::Compl(a) => Some(a.try_ep()?.complement()),
            Node::PowerTail { .. } | Node::Enumerated(_) => None,
            // Planar leaves (unreachable behind the carrier check).
            _ => None,
        }
    }

    /// Tri-state finiteness.
    pub fn finiteness(&self) -> Finiteness {
        self.finiteness_at(0)
    }

    fn finiteness_at(&self, depth: u32) -> Finiteness {
        if depth > MAX_DEPTH {
            return Finiteness::Unknown;
        }
        if let Some(ep) = self.try_ep() {
            return if ep.is_finite() { Finiteness::Finite } else { Finiteness::Infinite };
        }
        match &*self.0 {
            Node::Finite(_) => Finiteness::Finite,
            Node::Interval { hi, .. } => {
                if hi.is_some() {
                    Finiteness::Finite
                } else {
                    Finiteness::Infinite
                }
            }
            Node::Residue { .. } | Node::BitMask { .. } => Finiteness::Infinite,
            Node::PowerTail { .. } | Node::PrefixCols { .. } | Node::Enumerated(_) => {
                Finiteness::Infinite
            }
            Node::PartitionUnion { family, indices } => {
                match indices.finiteness_at(depth + 1) {
                    Finiteness::Infinite => Finiteness::Infinite,
                    Finiteness::Finite => {
                        if family.parts_are_finite() {
                            Finiteness::Finite
                        } else {
                            match indices.emptiness_at(depth + 1) {
                                TriBool::True => Finiteness::Finite,
                                TriBool::False => Finiteness::Infinite,
                                TriBool::Unknown => Finiteness::Unknown,
                            }
                        }
                    }
                    Finiteness::Unknown => {
                        if !family.parts_are_finite()
                            && indices.emptiness_at(depth + 1) == TriBool::False
                        {
                            Finiteness::Infinite
                        } else {
                            Finiteness::Unknown
                        }
                    }
                }
            }
            Node::Column(_) | Node::Row(_) => Finiteness::Infinite,
            Node::Rect { cols, rows } => {
                let ce = cols.emptiness_at(depth + 1);
                let re = rows.emptiness_at(depth + 1);
                if ce == TriBool::True || re == TriBool::True {
                    return Finiteness::Finite;
                }
                let cf = cols.finiteness_at(depth + 1);
                let rf = rows.finiteness_at(depth + 1);
                if cf == Finiteness::Finite && rf == Finiteness::Finite {
                    return Finiteness::Finite;
                }
                if (cf == Finiteness::Infinite && re == TriBool::False)
                    || (rf == Finiteness::Infinite && ce == TriBool::False)
                {
                    return Finiteness::Infinite;
                }
                Finiteness::Unknown
            }
            Node::BranchCert(b) => {
                if b.anchor(0).is_some() {
                    Finiteness::Infinite
                } else {
                    Finiteness::Unknown
                }
            }
            // One element per level of the branch.
            Node::BranchDiag(_) => Finiteness::Infinite,
            Node::Union(a, b) => {
                match (a.finiteness_at(depth + 1), b.finiteness_at(depth + 1)) {
                    (Finiteness::Infinite, _) | (_, Finiteness::Infinite) => Finiteness::Infinite,
                    (Finiteness::Finite, Finiteness::Finite) => Finiteness::Finite,
                    _ => Finiteness::Unknown,
                }
            }
            Node::Inter(a, b) => {
                if a.finiteness_at(depth + 1) == Finiteness::Finite
                    || b.finiteness_at(depth + 1) == Finiteness::Finite
                {
                    Finiteness::Finite
                } else if a.prove_disjoint_at(b, depth + 1) == TriBool::True {
                    Finiteness::Finite
                } else {
                    // A diagonal side with a structurally decided tail: exact.
                    for (d, o) in [(a, b), (b, a)] {
                        if let Node::BranchDiag(br) = &*d.0 {
                            if let Some(inside) = diag_tail_inside(br, o, depth + 1) {
                                return if inside {
                                    Finiteness::Infinite
                                } else {
                                    Finiteness::Finite
                                };
                            }
                        }
                    }
                    self.pieces_finiteness(depth)
                }
            }
            Node::Diff(a, b) => {
                let fa = a.finiteness_at(depth + 1);
                if fa == Finiteness::Finite {
                    return Finiteness::Finite;
                }
                if fa == Finiteness::Infinite {
                    if b.finiteness_at(depth + 1) == Finiteness::Finite {
                        return Finiteness::Infinite;
                    }
                    if a.prove_disjoint_at(b, depth + 1) == TriBool::True {
                        return Finiteness::Infinite;
                    }
                    // Power tail minus a periodic set: exact via cycle analysis.
                    if let (Node::PowerTail { add, start }, Some(bep)) =
                        (&*a.0, b.try_ep())
                    {
                        // Head levels escape at most finitely often, so only
                        // the residue cycle decides finiteness.
                        if let Some((_, _, cycle_all, _)) = power_tail_vs_ep(*add, *start, &bep)
                        {
                            return if cycle_all {
                                Finiteness::Finite
                            } else {
                                Finiteness::Infinite
                            };
                        }
                    }
                    // Diagonal minus a structurally decided tail: exact.
                    if let Node::BranchDiag(br) = &*a.0 {
                        if let Some(inside) = diag_tail_inside(br, b, depth + 1) {
                            return if inside {
                                Finiteness::Finite
                            } else {
                                Finiteness::Infinite
                            };
                        }
                    }
                    // Anchored certificate minus a decomposable planar set:
                    // per-anchor-column tail analysis.
                    if let Node::BranchCert(br) = &*a.0 {
                        if let Some(v) = branch_cert_diff_finiteness(br, b, depth + 1) {
                            return v;
                        }
                    }
                }
                self.pieces_finiteness(depth)
            }
            Node::Compl(a) => match a.finiteness_at(depth + 1) {
                Finiteness::Finite => Finiteness::Infinite,
                _ => {
                    // Complements of density-collapsing sets are infinite.
                    if a.provably_sparse() {
                        Finiteness::Infinite
                    } else {
                        self.pieces_finiteness(depth)
                    }
                }
            },
        }
    }

    /// Finiteness of a planar composite via rectangle decomposition: the set
    /// is a finite union of product pieces, so it is infinite as soon as one
    /// piece is and finite when every piece is.
    fn pieces_finiteness(&self, depth: u32) -> Finiteness {
        if matches!(self.carrier(), Carrier::Line) {
            return Finiteness::Unknown;
        }
        let Some(pieces) = self.rect_decompose() else {
            return Finiteness::Unknown;
        };
        let mut verdict = Finiteness::Finite;
        for piece in &pieces {
            let Ok(rect) = DescribedSet::rect(piece.cols.clone(), piece.rows.clone()) else {
                return Finiteness::Unknown;
            };
            match rect.finiteness_at(depth + 1) {
                Finiteness::Infinite => return Finiteness::Infinite,
                Finiteness::Unknown => verdict = Finiteness::Unknown,
                Finiteness::Finite => {}
            }
        }
        verdict
    }

    /// Tri-state emptiness.
    pub fn emptiness(&self) -> TriBool {
        self.emptiness_at(0)
    }

    fn emptiness_at(&self, depth: u32) -> TriBool {
        if depth > MAX_DEPTH {
            return TriBool::Unknown;
        }
        if let Some(ep) = self.try_ep() {
            return TriBool::from_bool(ep.is_empty());
        }
        match &*self.0 {
            Node::Finite(v) => TriBool::from_bool(v.is_empty()),
            Node::Interval { .. } | Node::Residue { .. } | Node::PrefixCols { .. } => {
                TriBool::False
            }
            Node::BitMask { .. } => TriBool::False, // pattern itself is a member
            Node::PowerTail { .. } => TriBool::False,
            Node::Enumerated(e) => {
                if e.nth(0).is_some() {
                    TriBool::False
                } else {
                    TriBool::Unknown
                }
            }
            Node::PartitionUnion { indices, .. } => match indices.emptiness_at(depth + 1) {
                TriBool::True => TriBool::True,
                // Every part of every registered family is nonempty.
                TriBool::False => TriBool::False,
                TriBool::Unknown => self.scan_emptiness(),
            },
            Node::Column(_) | Node::Row(_) => TriBool::False,
            Node::Rect { cols, rows } => {
                let ce = cols.emptiness_at(depth + 1);
                let re = rows.emptiness_at(depth + 1);
                if ce == TriBool::True || re == TriBool::True {
                    TriBool::True
                } else if ce == TriBool::False && re == TriBool::False {
                    TriBool::False
                } else {
                    TriBool::Unknown
                }
            }
            Node::BranchCert(b) => {
                match b.anchor(0) {
                    Some(m0) if m0 <= 62 => TriBool::False,
                    _ => TriBool::Unknown,
                }
            }
            // Level 0 always contributes 2^0 + 0 = 1.
            Node::BranchDiag(_) => TriBool::False,
            Node::Union(a, b) => {
                a.emptiness_at(depth + 1).and(b.emptiness_at(depth + 1))
            }
            Node::Inter(a, b) => {
                if a.emptiness_at(depth + 1) == TriBool::True
                    || b.emptiness_at(depth + 1) == TriBool::True
                    || a.prove_disjoint_at(b, depth + 1) == TriBool::True
                {
                    TriBool::True
                } else {
                    self.scan_emptiness()
                }
            }
            Node::Diff(a, b) => {
                if a.emptiness_at(depth + 1) == TriBool::True
                    || a.prove_subset_at(b, depth + 1) == TriBool::True
                {
                    TriBool::True
                } else {
                    self.scan_emptiness()
                }
            }
            Node::Compl(_) => self.scan_emptiness(),
        }
    }

    /// Bounded search for any member: `False` (= nonempty) on a witness,
    /// `Unknown` otherwise.
    fn scan_emptiness(&self) -> TriBool {
        if self.probe_member(SCAN_CANDIDATES).is_some() {
            TriBool::False
        } else {
            TriBool::Unknown
        }
    }

    /// First member found scanning candidates in canonical order (naturals on
    /// the line, pair codes on the plane); bounded, so `None` proves nothing.
    pub fn probe_member(&self, limit: u64) -> Option<Point> {
        match self.carrier() {
            Carrier::Line => (0..limit).map(Point::N).find(|p| self.member(p)),
            Carrier::Plane(inner) if *inner == Carrier::Line => (0..limit)
                .map(|m| {
                    let (n, k) = super::unpair(m);
                    Point::pair(n, k)
                })
                .find(|p| self.member(p)),
            Carrier::Plane(_) => None,
        }
    }

    /// Sound subset prover: `True`/`False` only with structural or
    /// exhaustive justification.
    pub fn prove_subset(&self, other: &DescribedSet) -> TriBool {
        self.prove_subset_at(other, 0)
    }

    fn prove_subset_at(&self, other: &DescribedSet, depth: u32) -> TriBool {
        if depth > MAX_DEPTH {
            return TriBool::Unknown;
        }
        if self.carrier() != other.carrier() {
            return TriBool::Unknown;
        }
        // Exact periodic fragment.
        if let (Some(a), Some(b)) = (self.try_ep(), other.try_ep()) {
            if let Some(r) = a.is_subset_of(&b) {
                return TriBool::from_bool(r);
            }
        }
        if self.emptiness_at(depth + 1) == TriBool::True {
            return TriBool::True;
        }
        // Finite left side: exhaustive check is exact.
        if let Some(elems) = self.finite_elements() {
            return TriBool::from_bool(elems.iter().all(|p| other.member(p)));
        }
        // Cofinite right side: only its finitely many gaps matter, and exact
        // membership settles each one.
        if let Some(bep) = other.try_ep() {
            let comp = bep.complement();
            if comp.is_finite() {
                let gaps = comp.elements_below(comp.threshold() + comp.period());
                return TriBool::from_bool(!gaps.iter().any(|g| self.member_nat(*g)));
            }
        }
        // Power tail against a periodic right side: cycle analysis is exact.
        if let (Node::PowerTail { add, start }, Some(bep)) = (&*self.0, other.try_ep()) {
            if let Some((all_in, _, _, _)) = power_tail_vs_ep(*add, *start, &bep) {
                return TriBool::from_bool(all_in);
            }
        }
        // Infinite periodic left side cannot fit inside a vanishing-density
        // right side.
        if let Some(aep) = self.try_ep() {
            if !aep.is_finite() && other.provably_sparse() {
                return TriBool::False;
            }
        }
        // A diagonal whose tail escapes the right side is not a subset.
        if let Node::BranchDiag(br) = &*self.0 {
            if diag_tail_inside(br, other, depth + 1) == Some(false) {
                return TriBool::False;
            }
        }
        if let Some(v) = self.subset_structural(other, depth) {
            return v;
        }
        // Counterexample scans.
        if self.scan_counterexample_subset(other) {
            return TriBool::False;
        }
        TriBool::Unknown
    }

    fn subset_structural(&self, other: &DescribedSet, depth: u32) -> Option<TriBool> {
        // Left-side decompositions.
        match &*self.0 {
            Node::Union(a, b) => {
                let ra = a.prove_subset_at(other, depth + 1);
                let rb = b.prove_subset_at(other, depth + 1);
                let v = ra.and(rb);
                if v != TriBool::Unknown {
                    return Some(v);
                }
            }
            Node::Inter(a, b) => {
                if a.prove_subset_at(other, depth + 1) == TriBool::True
                    || b.prove_subset_at(other, depth + 1) == TriBool::True
                {
                    return Some(TriBool::True);
                }
            }
            Node::Diff(a, _) => {
                if a.prove_subset_at(other, depth + 1) == TriBool::True {
                    return Some(TriBool::True);
                }
            }
            Node::Compl(a) => {
                if let Node::Compl(b) = &*other.0 {
                    if b.prove_subset_at(a, depth + 1) == TriBool::True {
                        return Some(TriBool::True);
                    }
                }
            }
            Node::Enumerated(e) => {
                if let Node::Enumerated(f) = &*other.0 {
                    if e.name == f.name {
                        return Some(TriBool::True);
                    }
                }
            }
            Node::PartitionUnion { family, indices } => {
                if let Node::PartitionUnion { family: f2, indices: i2 } = &*other.0 {
                    if family == f2
                        && indices.prove_subset_at(i2, depth + 1) == TriBool::True
                    {
                        return Some(TriBool::True);
                    }
                }
                // Union of two selections from the same family: compare the
                // combined index sets.
                if let Node::Union(x, y) = &*other.0 {
                    if let (
                        Node::PartitionUnion { family: fx, indices: ix },
                        Node::PartitionUnion { family: fy, indices: iy },
                    ) = (&*x.0, &*y.0)
                    {
                        if family == fx && family == fy {
                            if let Ok(iu) = DescribedSet::union(ix.clone(), iy.clone()) {
                                if indices.prove_subset_at(&iu, depth + 1) == TriBool::True {
                                    return Some(TriBool::True);
                                }
                            }
                        }
                    }
                }
            }
            _ => {}
        }
        // Right-side decompositions.
        match &*other.0 {
            Node::Inter(a, b) => {
                let ra = self.prove_subset_at(a, depth + 1);
                let rb = self.prove_subset_at(b, depth + 1);
                let v = ra.and(rb);
                if v != TriBool::Unknown {
                    return Some(v);
                }
            }
            Node::Union(a, b) => {
                if self.prove_subset_at(a, depth + 1) == TriBool::True
                    || self.prove_subset_at(b, depth + 1) == TriBool::True
                {
                    return Some(TriBool::True);
                }
            }
            Node::Diff(a, b) => {
                if self.prove_subset_at(a, depth + 1) == TriBool::True
                    && self.prove_disjoint_at(b, depth + 1) == TriBool::True
                {
                    return Some(TriBool::True);
                }
            }
            Node::Compl(a) => {
                let d = self.prove_disjoint_at(a, depth + 1);
                if d != TriBool::Unknown {
                    return Some(d);
                }
            }
            _ => {}
        }
        // Product against a union of two products: split the columns (or the
        // rows) of the left side between the two pieces.
        if let (Some((sc, sr)), Node::Union(x, y)) = (self.as_product(), &*other.0) {
            if let (Some((cx, rx)), Some((cy, ry))) = (x.as_product(), y.as_product()) {
                for ((c1, r1), (c2, r2)) in
                    [((&cx, &rx), (&cy, &ry)), ((&cy, &ry), (&cx, &rx))]
                {
                    // Columns of sc inside c1 are covered by the first piece
                    // when sr ⊆ r1; the remaining columns must fit in the
                    // second piece entirely.
                    let first_ok = match DescribedSet::inter(sc.clone(), c1.clone()) {
                        Ok(i) => i.emptiness_at(depth + 1) == TriBool::True,
                        Err(_) => false,
                    } || sr.prove_subset_at(r1, depth + 1) == TriBool::True;
                    if !first_ok {
                        continue;
                    }
                    let Ok(rest) = DescribedSet::diff(sc.clone(), c1.clone()) else {
                        continue;
                    };
                    let rest_ok = rest.emptiness_at(depth + 1) == TriBool::True
                        || (rest.prove_subset_at(c2, depth + 1) == TriBool::True
                            && sr.prove_subset_at(r2, depth + 1) == TriBool::True);
                    if rest_ok {
                        return Some(TriBool::True);
                    }
                }
            }
        }
        // Planar product shapes.
        if let (Some((sc, sr)), Some((tc, tr))) = (self.as_product(), other.as_product()) {
            if sc.prove_subset_at(&tc, depth + 1) == TriBool::True
                && sr.prove_subset_at(&tr, depth + 1) == TriBool::True
            {
                return Some(TriBool::True);
            }
            // A column outside tc paired with any row of sr is a witness.
            if sc.prove_subset_at(&tc, depth + 1) == TriBool::False
                && sr.emptiness_at(depth + 1) == TriBool::False
            {
                return Some(TriBool::False);
            }
            if sr.prove_subset_at(&tr, depth + 1) == TriBool::False
                && sc.emptiness_at(depth + 1) == TriBool::False
            {
                return Some(TriBool::False);
            }
        }
        None
    }

    /// Sound disjointness prover.
    pub fn prove_disjoint(&self, other: &DescribedSet) -> TriBool {
        self.prove_disjoint_at(other, 0)
    }

    fn prove_disjoint_at(&self, other: &DescribedSet, depth: u32) -> TriBool {
        if depth > MAX_DEPTH {
            return TriBool::Unknown;
        }
        if self.carrier() != other.carrier() {
            return TriBool::True;
        }
        if let (Some(a), Some(b)) = (self.try_ep(), other.try_ep()) {
            if let Some(r) = a.is_disjoint_from(&b) {
                return TriBool::from_bool(r);
            }
        }
        if self.emptiness_at(depth + 1) == TriBool::True
            || other.emptiness_at(depth + 1) == TriBool::True
        {
            return TriBool::True;
        }
        // Finite side: exhaustive.
        if let Some(elems) = self.finite_elements() {
            return TriBool::from_bool(!elems.iter().any(|p| other.member(p)));
        }
        if let Some(elems) = other.finite_elements() {
            return TriBool::from_bool(!elems.iter().any(|p| self.member(p)));
        }
        // Power tail vs periodic set: exact.
        for (pt, ep_side) in [(self, other), (other, self)] {
            if let (Node::PowerTail { add, start }, Some(ep)) = (&*pt.0, ep_side.try_ep()) {
                if let Some((_, any_in, _, _)) = power_tail_vs_ep(*add, *start, &ep) {
                    return TriBool::from_bool(!any_in);
                }
            }
        }
        // A diagonal whose tail sits inside the other side meets it.
        for (d, o) in [(self, other), (other, self)] {
            if let Node::BranchDiag(br) = &*d.0 {
                if diag_tail_inside(br, o, depth + 1) == Some(true) {
                    return TriBool::False;
                }
            }
        }
        if let Some(v) = self.disjoint_structural(other, depth) {
            return v;
        }
        if let Some(v) = other.disjoint_structural(self, depth) {
            return v;
        }
        if self.scan_witness_common(other) {
            return TriBool::False;
        }
        TriBool::Unknown
    }

    fn disjoint_structural(&self, other: &DescribedSet, depth: u32) -> Option<TriBool> {
        match &*self.0 {
            Node::Union(a, b) => {
                let ra = a.prove_disjoint_at(other, depth + 1);
                let rb = b.prove_disjoint_at(other, depth + 1);
                let v = ra.and(rb);
                if v != TriBool::Unknown {
                    return Some(v);
                }
            }
            Node::Inter(a, b) => {
                if a.prove_disjoint_at(other, depth + 1) == TriBool::True
                    || b.prove_disjoint_at(other, depth + 1) == TriBool::True
                {
                    return Some(TriBool::True);
                }
            }
            Node::Diff(a, b) => {
                if a.prove_disjoint_at(other, depth + 1) == TriBool::True
                    || other.prove_subset_at(b, depth + 1) == TriBool::True
                {
                    return Some(TriBool::True);
                }
            }
            Node::Compl(a) => {
                if other.prove_subset_at(a, depth + 1) == TriBool::True {
                    return Some(TriBool::True);
                }
            }
            Node::PartitionUnion { family, indices } => {
                if let Node::PartitionUnion { family: f2, indices: i2 } = &*other.0 {
                    if family == f2
                        && indices.prove_disjoint_at(i2, depth + 1) == TriBool::True
                    {
                        return Some(TriBool::True);
                    }
                }
            }
            _ => {}
        }
        // Products: disjoint columns or disjoint rows suffice.
        if let (Some((sc, sr)), Some((tc, tr))) = (self.as_product(), other.as_product()) {
            if sc.prove_disjoint_at(&tc, depth + 1) == TriBool::True
                || sr.prove_disjoint_at(&tr, depth + 1) == TriBool::True
            {
                return Some(TriBool::True);
            }
        }
        None
    }

    /// View single-product planar shapes as (cols, rows).
    fn as_product(&self) -> Option<(DescribedSet, DescribedSet)> {
        match &*self.0 {
            Node::Column(c) => Some((
                DescribedSet::finite(vec![*c]),
                DescribedSet::full(),
            )),
            Node::Row(r) => Some((
                DescribedSet::full(),
                DescribedSet::finite(vec![*r]),
            )),
            Node::Rect { cols, rows } => Some((cols.clone(), rows.clone())),
            _ => None,
        }
    }

    /// All elements of a provably finite set, as points; `None` when not
    /// provably finite or not cheaply listable.
    fn finite_elements(&self) -> Option<Vec<Point>> {
        match self.carrier() {
            Carrier::Line => {
                let ep = self.try_ep()?;
                if !ep.is_finite() {
                    return None;
                }
                let bound = ep.threshold() + ep.period();
                Some(ep.elements_below(bound).into_iter().map(Point::N).collect())
            }
            Carrier::Plane(_) => {
                let (cols, rows) = self.as_product()?;
                let ce = cols.try_ep()?;
                let re = rows.try_ep()?;
                if !ce.is_finite() || !re.is_finite() {
                    return None;
                }
                let cb = ce.threshold() + ce.period();
                let rb = re.threshold() + re.period();
                let rows_list = re.elements_below(rb);
                let mut out = Vec::new();
                for c in ce.elements_below(cb) {
                    for r in &rows_list {
                        out.push(Point::pair(c, *r));
                    }
                }
                Some(out)
            }
        }
    }

    /// Whether the set provably has vanishing density (so no infinite
    /// eventually-periodic set fits inside it).
    fn provably_sparse(&self) -> bool {
        match &*self.0 {
            Node::PowerTail { .. } | Node::BranchDiag(_) => true,
            Node::Enumerated(e) => {
                // FullRuns is an anti-sparseness witness, so only diverging
                // gaps count here.
                e.growth.is_some() || e.spread == Some(super::families::Spread::GapsDiverge)
            }
            Node::Finite(_) => true,
            Node::Union(a, b) => a.provably_sparse() && b.provably_sparse(),
            Node::Inter(a, b) => a.provably_sparse() || b.provably_sparse(),
            Node::Diff(a, _) => a.provably_sparse(),
            _ => false,
        }
    }

    /// True when a bounded scan finds an element of `self` outside `other`.
    fn scan_counterexample_subset(&self, other: &DescribedSet) -> bool {
        match self.carrier() {
            Carrier::Line => {
                for n in 0..SCAN_CANDIDATES {
                    if self.member_nat(n) && !other.member_nat(n) {
                        return true;
                    }
                }
                if let Some(it) = self.sorted_iter() {
                    if self.has_structural_iter() {
                        for n in it.take(SPARSE_PULLS) {
                            if !other.member_nat(n) {
                                return true;
                            }
                        }
                    }
                }
                false
            }
            Carrier::Plane(inner) if *inner == Carrier::Line => {
                for m in 0..SCAN_CANDIDATES {
                    let (n, k) = super::unpair(m);
                    if self.member2(n, k) && !other.member2(n, k) {
                        return true;
                    }
                }
                if let Some(it) = self.plane_iter() {
                    for (n, k) in it.take(SPARSE_PULLS) {
                        if !other.member2(n, k) {
                            return true;
                        }
                    }
                }
                false
            }
            Carrier::Plane(_) => false,
        }
    }

    /// True when a bounded scan finds a common element.
    fn scan_witness_common(&self, other: &DescribedSet) -> bool {
        match self.carrier() {
            Carrier::Line => {
                for n in 0..SCAN_CANDIDATES {
                    if self.member_nat(n) && other.member_nat(n) {
                        return true;
                    }
                }
                for (a, b) in [(self, other), (other, self)] {
                    if a.has_structural_iter() {
                        if let Some(it) = a.sorted_iter() {
                            for n in it.take(SPARSE_PULLS) {
                                if b.member_nat(n) {
                                    return true;
                                }
                            }
                        }
                    }
                }
                false
            }
            Carrier::Plane(inner) if *inner == Carrier::Line => {
                for m in 0..SCAN_CANDIDATES {
                    let (n, k) = super::unpair(m);
                    if self.member2(n, k) && other.member2(n, k) {
                        return true;
                    }
                }
                for (a, b) in [(self, other), (other, self)] {
                    if let Some(it) = a.plane_iter() {
                        for (n, k) in it.take(SPARSE_PULLS) {
                            if b.member2(n, k) {
                                return true;
                            }
                        }
                    }
                }
                false
            }
            Carrier::Plane(_) => false,
        }
    }

    /// Whether `sorted_iter` reaches sparse elements without an ω-scan.
    fn has_structural_iter(&self) -> bool {
        match &*self.0 {
            Node::Finite(_)
            | Node::PowerTail { .. }
            | Node::PrefixCols { .. }
            | Node::BranchDiag(_)
            | Node::Enumerated(_) => true,
            Node::Union(a, b) => a.has_structural_iter() && b.has_structural_iter(),
            Node::Inter(a, _) | Node::Diff(a, _) => a.has_structural_iter(),
            _ => false,
        }
    }
}

/// Classifies the power tail {2^l + add : l ≥ start} against a periodic set:
/// returns (every element in, some element in, every cycle residue in, some
/// cycle residue in), exactly, covering all mathematical elements — levels
/// beyond u64 range are handled by modular cycle analysis.  The two cycle
/// components alone govern cofinal behaviour: cofinitely many levels land
/// inside iff the third is true, cofinitely many land outside iff the fourth
/// is false.  `None` when the period is too large to analyze.
fn power_tail_vs_ep(add: u64, start: u32, ep: &EpSet) -> Option<(bool, bool, bool, bool)> {
    let p = ep.period();
    if p == 0 || p > MAX_CYCLE_PERIOD {
        return None;
    }
    let mut all_in = true;
    let mut any_in = false;
    // Representable levels: direct membership.
    for l in start..63 {
        let v = (1u64 << l) + add;
        let m = ep.member(v);
        all_in &= m;
        any_in |= m;
    }
    // Levels ≥ 63: values exceed the threshold (threshold ≤ 2^22), so only the
    // residue mod p matters; 2^l mod p cycles within p steps.  Membership on
    // this cycle is tracked separately: it alone governs whether cofinitely
    // many levels land inside the periodic set.
    let mut cycle_all = true;
    let mut cycle_any = false;
    let mut r = 1u64;
    for _ in 0..63 {
        r = (r * 2) % p;
    }
    let add_r = add % p;
    for _ in 0..=p {
        let m = ep.tail_member((r + add_r) % p);
        all_in &= m;
        any_in |= m;
        cycle_all &= m;
        cycle_any |= m;
        r = (r * 2) % p;
    }
    Some((all_in, any_in, cycle_all, cycle_any))
}

/// Decides the cofinal behaviour of the diagonal {2^l + val(branch↾l) : l}
/// against a line set: `Some(true)` when all but finitely many diagonal
/// elements lie inside `x`, `Some(false)` when all but finitely many lie
/// outside, `None` when neither is structurally provable (including genuinely
/// alternating tails).  The key algebra: the element at level l lies in
/// [2^l, 2^{l+1}), and its low bits below any fixed position d are the
/// branch's own first d bits once l ≥ d.
fn diag_tail_inside(b: &BranchBits, x: &DescribedSet, depth: u32) -> Option<bool> {
    if depth > MAX_DEPTH || x.carrier() != Carrier::Line {
        return None;
    }
    // An eventually-zero branch makes the diagonal tail a genuine power tail,
    // so periodic targets decide exactly by residue-cycle analysis.
    if let (Some((head, period)), Some(ep)) = (b.ep_parts(), x.try_ep()) {
        if period.value() == 0 {
            if let Some((_, _, cycle_all, cycle_any)) =
                power_tail_vs_ep(head.value(), head.len(), &ep)
            {
                if cycle_all {
                    return Some(true);
                }
                if !cycle_any {
                    return Some(false);
                }
                return None;
            }
        }
    }
    match &*x.0 {
        Node::Finite(_) => Some(false),
        // Diagonal elements grow without bound, so an unbounded interval
        // eventually swallows them and a bounded one eventually loses them.
        Node::Interval { hi, .. } => Some(hi.is_none()),
        Node::Residue { a, m } => {
            if !m.is_power_of_two() {
                return None;
            }
            let d = m.trailing_zeros() as u64;
            Some(b.prefix_val(d)? == *a)
        }
        Node::BitMask { mask, pattern } => {
            // Once the level passes the top mask bit, the lone high digit sits
            // above the mask and the masked bits are the branch's own.
            let top = (64 - mask.leading_zeros()) as u64;
            Some((b.prefix_val(top)? & mask) == *pattern)
        }
        Node::PowerTail { add, .. } => {
            // The element at level l can only match the tail element at the
            // same level, so the branch value must stabilize at `add`.
            let (head, period) = b.ep_parts()?;
            if period.value() != 0 {
                return Some(false);
            }
            Some(head.value() == *add)
        }
        Node::BranchDiag(other) => match first_branch_disagreement(b, other) {
            Some(Some(_)) => Some(false),
            Some(None) => Some(true),
            None => None,
        },
        Node::PrefixCols { .. } | Node::Enumerated(_) | Node::PartitionUnion { .. } => None,
        Node::Union(p, q) => {
            match (diag_tail_inside(b, p, depth + 1), diag_tail_inside(b, q, depth + 1)) {
                (Some(true), _) | (_, Some(true)) => Some(true),
                (Some(false), Some(false)) => Some(false),
                _ => None,
            }
        }
        Node::Inter(p, q) => {
            match (diag_tail_inside(b, p, depth + 1), diag_tail_inside(b, q, depth + 1)) {
                (Some(false), _) | (_, Some(false)) => Some(false),
                (Some(true), Some(true)) => Some(true),
                _ => None,
            }
        }
        Node::Diff(p, q) => {
            match (diag_tail_inside(b, p, depth + 1), diag_tail_inside(b, q, depth + 1)) {
                (Some(true), Some(false)) => Some(true),
                (Some(false), _) | (_, Some(true)) => Some(false),
                _ => None,
            }
        }
        Node::Compl(p) => diag_tail_inside(b, p, depth + 1).map(|v| !v),
        // Planar shapes are unreachable behind the carrier check.
        Node::Column(_) | Node::Row(_) | Node::Rect { .. } | Node::BranchCert(_) => None,
    }
}

/// Finiteness of `branch certificate ∖ x` for a decomposable planar `x`:
/// the certificate is a union of single-column rectangles whose row-sets are
/// diagonal tails, so the question reduces to per-column tail analysis
/// against the column sections of `x`.  `None` when `x` does not decompose
/// or some column stays undecided.
fn branch_cert_diff_finiteness(
    br: &BranchBits,
    x: &DescribedSet,
    depth: u32,
) -> Option<Finiteness> {
    let pieces = x.rect_decompose()?;
    for j in 0..63u64 {
        let Some(col) = br.anchor_column(j) else {
            // Anchors exhausted (or beyond the representable range, where no
            // certificate points exist anyway).
            break;
        };
        // Section of x above this column.
        let mut parts: Vec<DescribedSet> = Vec::new();
        for p in &pieces {
            if p.cols.member_nat(col) {
                parts.push(p.rows.clone());
            }
        }
        let section = match parts.len() {
            0 => DescribedSet::empty(),
            _ => DescribedSet::union_all(parts).ok()?,
        };
        // The column's row-set is a tail of the diagonal, so cofinal
        // behaviour against the section decides its contribution.
        match diag_tail_inside(br, &section, depth + 1) {
            Some(true) => {}
            Some(false) => return Some(Finiteness::Infinite),
            None => return None,
        }
    }
    // A branch with infinitely many ones has anchors beyond the range probed
    // above; a Finite verdict then needs those columns absorbed too.  That
    // holds when some piece collects a whole subtree of columns along the
    // branch and its row side swallows the diagonal tail.
    let anchors_unbounded = match br.ep_parts() {
        Some((_, period)) => period.value() != 0,
        None => true,
    };
    if anchors_unbounded {
        let covered = pieces.iter().any(|p| {
            if let Node::PrefixCols { word } = &*p.cols.0 {
                let along =
                    (0..word.len()).all(|i| (word.bit(i) != 0) == br.bit(i as u64));
                along && diag_tail_inside(br, &p.rows, depth + 1) == Some(true)
            } else {
                false
            }
        });
        if !covered {
            return None;
        }
    }
    Some(Finiteness::Finite)
}

/// Compares two branch oracles: `Some(Some(p))` when the first disagreement
/// is at position p, `Some(None)` when the streams provably agree everywhere
/// (both eventually periodic, checked to the canonical head + lcm bound),
/// `None` when neither a disagreement nor full agreement can be established.
fn first_branch_disagreement(a: &BranchBits, b: &BranchBits) -> Option<Option<u64>> {
    let bound = match (a.ep_parts(), b.ep_parts()) {
        (Some((ha, pa)), Some((hb, pb))) => {
            let heads = ha.len().max(hb.len()) as u64;
            heads + num::integer::lcm(pa.len() as u64, pb.len() as u64)
        }
        // Opaque oracle: a probe can refute equality but never confirm it.
        _ => 256,
    };
    for i in 0..bound {
        if a.bit(i) != b.bit(i) {
            return Some(Some(i));
        }
    }
    match (a.ep_parts(), b.ep_parts()) {
        (Some(_), Some(_)) => Some(None),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::natsets::Nat;
    use crate::words::BinWord;

    fn res(a: Nat, m: Nat) -> DescribedSet {
        DescribedSet::residue(a, m).unwrap()
    }

    #[test]
    fn product_and_partition_coverage_rules() {
        // Tail rectangle splits exactly into the next tail and one column.
        let tail = |k: u64| {
            DescribedSet::rect(
                DescribedSet::interval(k, None).unwrap(),
                DescribedSet::full(),
            )
            .unwrap()
        };
        let column_rect = |k: u64| {
            DescribedSet::rect(DescribedSet::finite(vec![k]), DescribedSet::full()).unwrap()
        };
        for k in 0..6u64 {
            let rhs = DescribedSet::union(tail(k + 1), column_rect(k)).unwrap();
            assert_eq!(tail(k).prove_subset(&rhs), TriBool::True, "tail split at {k}");
            assert_eq!(rhs.prove_subset(&tail(k)), TriBool::True, "tail join at {k}");
        }
        // Same-family partition unions compare via their index sets.
        let pu = |a: u64, m: u64| {
            DescribedSet::partition_union(super::super::PartFamily::Nu2, res(a, m)).unwrap()
        };
        let whole = pu(0, 1);
        let halves = DescribedSet::union(pu(0, 2), pu(1, 2)).unwrap();
        assert_eq!(whole.prove_subset(&halves), TriBool::True);
        assert_eq!(halves.prove_subset(&whole), TriBool::True);
    }

    #[test]
    fn branch_cert_differences_resolve_against_decomposable_sets() {
        let all_ones = BranchBits::parse(":1").unwrap();
        let cert = DescribedSet::branch_cert(all_ones.clone());
        // A subtree-columns rectangle along the branch absorbs the whole
        // certificate tail.
        let along = DescribedSet::rect(
            DescribedSet::prefix_cols(BinWord::parse("11").unwrap()),
            DescribedSet::full(),
        )
        .unwrap();
        assert_eq!(
            DescribedSet::diff(cert.clone(), along).unwrap().finiteness(),
            Finiteness::Finite
        );
        // A bounded union of columns misses cofinally many certificate points.
        let two_cols = DescribedSet::rect(
            DescribedSet::finite(vec![1, 3]),
            DescribedSet::full(),
        )
        .unwrap();
        assert_eq!(
            DescribedSet::diff(cert.clone(), two_cols).unwrap().finiteness(),
            Finiteness::Infinite
        );
        // A subtree off the branch does not cover the anchors on it.
        let off = DescribedSet::rect(
            DescribedSet::prefix_cols(BinWord::parse("10").unwrap()),
            DescribedSet::full(),
        )
        .unwrap();
        assert_eq!(
            DescribedSet::diff(cert, off).unwrap().finiteness(),
            Finiteness::Infinite
        );
    }

    #[test]
    fn branch_diag_tail_analysis_is_exact() {
        // Branch 1,0,1,0,…: prefix values stabilize modulo every power of two,
        // so differences against residue classes resolve exactly.
        let b = BranchBits::parse("10:10").unwrap();
        let d = DescribedSet::branch_diag(b);
        // Levels ≥ 3 are ≡ 5 (mod 8); escapees are the head levels 0 and 1.
        let inside = res(5, 8);
        let escapees = DescribedSet::diff(d.clone(), inside.clone()).unwrap();
        assert_eq!(escapees.finiteness(), Finiteness::Finite);
        let listed: Vec<u64> = escapees.sorted_iter().unwrap().collect();
        assert_eq!(listed, vec![1, 3]);
        // A residue class the tail avoids keeps cofinitely many elements out.
        let outside = res(3, 8);
        assert_eq!(
            DescribedSet::diff(d.clone(), outside.clone()).unwrap().finiteness(),
            Finiteness::Infinite
        );
        assert_eq!(
            DescribedSet::inter(d.clone(), outside).unwrap().finiteness(),
            Finiteness::Finite
        );
        // Subset verdicts: everything fits in ω; a head escapee or an escaping
        // tail each refute containment.
        assert_eq!(d.prove_subset(&DescribedSet::full()), TriBool::True);
        assert_eq!(d.prove_subset(&inside), TriBool::False);
        assert_eq!(d.prove_subset(&res(3, 8)), TriBool::False);

        // Eventually-zero branch: the tail is a power tail, and non-dyadic
        // moduli resolve by residue-cycle analysis.  2^l + 3 is never ≡ 0
        // (mod 3), so only the head level 1 contributes the element 3.
        let dz = DescribedSet::branch_diag(BranchBits::parse("11:0").unwrap());
        let r03 = res(0, 3);
        assert_eq!(
            DescribedSet::inter(dz.clone(), r03.clone()).unwrap().finiteness(),
            Finiteness::Finite
        );
        assert_eq!(
            DescribedSet::diff(dz.clone(), r03).unwrap().finiteness(),
            Finiteness::Infinite
        );
        // A genuinely alternating tail stays honestly undecided.
        assert_eq!(
            DescribedSet::diff(dz, res(1, 3)).unwrap().finiteness(),
            Finiteness::Unknown
        );
    }

    #[test]
    fn prefix_cols_normal_form_matches_membership() {
        for w in ["e", "0", "1", "01", "10", "110", "0101"] {
            let word = BinWord::parse(w).unwrap();
            let pc = DescribedSet::prefix_cols(word);
            let ep = pc.try_ep().expect("prefix columns are eventually periodic");
            for n in 0..4096u64 {
                assert_eq!(ep.member(n), pc.member_nat(n), "word {w}, n {n}");
            }
        }
    }

    #[test]
    fn finiteness_verdicts() {
        assert_eq!(DescribedSet::finite(vec![1, 2]).finiteness(), Finiteness::Finite);
        assert_eq!(res(0, 2).finiteness(), Finiteness::Infinite);
        assert_eq!(
            DescribedSet::power_tail(0, 3).unwrap().finiteness(),
            Finiteness::Infinite
        );
        // evens \ (evens ∪ {1}) is empty hence finite.
        let evens = res(0, 2);
        let d = DescribedSet::diff(
            evens.clone(),
            DescribedSet::union(evens, DescribedSet::finite(vec![1])).unwrap(),
        )
        .unwrap();
        assert_eq!(d.finiteness(), Finiteness::Finite);
        // Power tail with even offset minus evens: all 2^l (l≥1) even → finite
        // leftover {2^0+0}... here add=0, start=1: every element even → Finite.
        let pt = DescribedSet::power_tail(0, 1).unwrap();
        let d2 = DescribedSet::diff(pt.clone(), res(0, 2)).unwrap();
        assert_eq!(d2.finiteness(), Finiteness::Finite);
        // Minus odds: nothing removed → Infinite.
        let d3 = DescribedSet::diff(pt, res(1, 2)).unwrap();
        assert_eq!(d3.finiteness(), Finiteness::Infinite);
    }

    #[test]
    fn subset_exact_on_periodic_fragment() {
        assert_eq!(res(0, 4).prove_subset(&res(0, 2)), TriBool::True);
        assert_eq!(res(0, 2).prove_subset(&res(0, 4)), TriBool::False);
        let pc = DescribedSet::prefix_cols(BinWord::parse("1").unwrap());
        // Columns under (1) are the evens ≥ 2.
        assert_eq!(pc.prove_subset(&res(0, 2)), TriBool::True);
        assert_eq!(pc.prove_subset(&res(1, 2)), TriBool::False);
    }

    #[test]
    fn power_tail_cycle_analysis() {
        // {2^l : l ≥ 1} ⊆ evens: true including levels beyond u64.
        let pt = DescribedSet::power_tail(0, 1).unwrap();
        assert_eq!(pt.prove_subset(&res(0, 2)), TriBool::True);
        assert_eq!(pt.prove_disjoint(&res(1, 2)), TriBool::True);
        // 2^l mod 3 alternates 1, 2: {2^l} meets both classes infinitely.
        assert_eq!(pt.prove_subset(&res(1, 3)), TriBool::False);
        assert_eq!(pt.prove_disjoint(&res(1, 3)), TriBool::False);
        // Infinite periodic set never fits in a power tail.
        assert_eq!(res(0, 2).prove_subset(&pt), TriBool::False);
    }

    #[test]
    fn enum_vs_periodic_rules() {
        let pow2 = DescribedSet::enumerated(super::super::EnumSet::registry("pow2").unwrap());
        assert_eq!(res(0, 2).prove_subset(&pow2), TriBool::False);
        // 1 ∈ pow2 is odd: counterexample scan refutes pow2 ⊆ evens.
        assert_eq!(pow2.prove_subset(&res(0, 2)), TriBool::False);
        // Same-name rule.
        let pow2b = DescribedSet::enumerated(super::super::EnumSet::registry("pow2").unwrap());
        assert_eq!(pow2.prove_subset(&pow2b), TriBool::True);
    }

    #[test]
    fn partition_union_rules() {
        use super::super::PartFamily;
        let a = DescribedSet::partition_union(PartFamily::Nu2, DescribedSet::finite(vec![0, 2]))
            .unwrap();
        let b = DescribedSet::partition_union(
            PartFamily::Nu2,
            DescribedSet::finite(vec![0, 1, 2]),
        )
        .unwrap();
        assert_eq!(a.prove_subset(&b), TriBool::True);
        let c = DescribedSet::partition_union(PartFamily::Nu2, DescribedSet::finite(vec![1, 3]))
            .unwrap();
        assert_eq!(a.prove_disjoint(&c), TriBool::True);
        // Full-tail indices reduce to an exact periodic form.
        let tail_indices = DescribedSet::interval(3, None).unwrap();
        let t = DescribedSet::partition_union(PartFamily::Nu2, tail_indices).unwrap();
        let ep = t.try_ep().expect("tail union is periodic");
        for n in 0..4096u64 {
            let expect = n != 0 && n.trailing_zeros() >= 3;
            assert_eq!(ep.member(n), expect, "n={n}");
        }
    }

    #[test]
    fn planar_product_rules() {
        let evens_cols = DescribedSet::rect(res(0, 2), DescribedSet::full()).unwrap();
        let all = DescribedSet::rect(DescribedSet::full(), DescribedSet::full()).unwrap();
        assert_eq!(evens_cols.prove_subset(&all), TriBool::True);
        assert_eq!(all.prove_subset(&evens_cols), TriBool::False);
        let odds_cols = DescribedSet::rect(res(1, 2), DescribedSet::full()).unwrap();
        assert_eq!(evens_cols.prove_disjoint(&odds_cols), TriBool::True);
        assert_eq!(
            DescribedSet::column(3).prove_subset(&odds_cols),
            TriBool::True
        );
        assert_eq!(
            DescribedSet::column(3).prove_disjoint(&DescribedSet::column(4)),
            TriBool::True
        );
        assert_eq!(
            DescribedSet::column(3).prove_disjoint(&DescribedSet::row(5)),
            TriBool::False
        );
    }

    #[test]
    fn emptiness_verdicts() {
        assert_eq!(DescribedSet::empty().emptiness(), TriBool::True);
        assert_eq!(res(0, 7).emptiness(), TriBool::False);
        let i = DescribedSet::inter(res(0, 2), res(1, 2)).unwrap();
        assert_eq!(i.emptiness(), TriBool::True);
        let plane_empty =
            DescribedSet::rect(DescribedSet::empty(), DescribedSet::full()).unwrap();
        assert_eq!(plane_empty.emptiness(), TriBool::True);
    }
}
