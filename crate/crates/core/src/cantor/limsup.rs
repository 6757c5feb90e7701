//! Countable limsup presentations: a set given as the points lying in
//! infinitely many of a sequence of closed levels, and its decomposition into
//! one stream of small clopen-based cells, each known to meet the target.
//!
//! The decomposition covers each level by the cylinders of a fixed length
//! (one more than the level index, so cell diameters shrink strictly faster
//! than 2^{-n}), intersects the level with each cylinder, and keeps exactly
//! the cells that pass the family's own meets-the-target rule. Candidates the
//! rule cannot settle are dropped and logged rather than emitted.

use std::fmt;
use std::rc::Rc;

use crate::util::TriBool;
use crate::words::BinWord;

use super::codes::{ClosedCode, MAX_NODE_LEN};
use super::CantorError;

/// A set presented as `limsup` of a sequence of closed levels, together with
/// the family's rule for deciding whether the target meets a given cylinder
/// cell of a given level.
#[derive(Clone)]
pub struct SigmaDeltaCode {
    name: String,
    level: Rc<dyn Fn(u64) -> ClosedCode>,
    meets: Rc<dyn Fn(u64, &BinWord) -> TriBool>,
}

impl SigmaDeltaCode {
    pub fn new(
        name: impl Into<String>,
        level: impl Fn(u64) -> ClosedCode + 'static,
        meets: impl Fn(u64, &BinWord) -> TriBool + 'static,
    ) -> Self {
        SigmaDeltaCode {
            name: name.into(),
            level: Rc::new(level),
            meets: Rc::new(meets),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn level(&self, n: u64) -> ClosedCode {
        (self.level)(n)
    }

    /// The family's rule for "the target meets level `n` inside cylinder `s`".
    pub fn meets_target(&self, n: u64, s: &BinWord) -> TriBool {
        (self.meets)(n, s)
    }

    /// Walk the first `count` levels and verify each is a nonempty pruned
    /// tree to `depth`.
    pub fn check_levels(&self, count: u64, depth: u32) -> Result<(), CantorError> {
        for n in 0..count {
            self.level(n).check_pruned(depth)?;
        }
        Ok(())
    }
}

impl fmt::Debug for SigmaDeltaCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SigmaDeltaCode({})", self.name)
    }
}

/// The points with infinitely many zero bits, presented as the limsup of the
/// levels "bit n is zero". A cell of level n meets the target exactly when
/// its cylinder carries a zero at position n, since that cylinder then
/// extends by zeros forever.
pub fn inf_zeros_family() -> SigmaDeltaCode {
    SigmaDeltaCode::new(
        "inf-zeros",
        |n| ClosedCode::bit_zero(n.min(MAX_NODE_LEN as u64 - 1) as u32),
        |n, s| {
            if n >= s.len() as u64 {
                return TriBool::Unknown;
            }
            TriBool::from_bool(s.bit(n as u32) == 0)
        },
    )
}

/// Cylinder length used for cells of level `n`: one more than the level, so
/// the cell diameter 2^{-(n+1)} undercuts the shrinking radii 2^{-n}.
/// Lengths are capped at the deepest representable node.
pub fn canonical_depth_rule(n: u64) -> u32 {
    (n + 1).min(MAX_NODE_LEN as u64) as u32
}

/// One emitted cell of the decomposition: level `level` intersected with the
/// cylinder named by `cylinder`, known (by the family's rule) to meet the
/// target.
#[derive(Clone, Debug)]
pub struct LimsupCell {
    /// Position in the emission stream.
    pub k: u64,
    pub level: u64,
    pub cylinder: BinWord,
    pub code: ClosedCode,
}

/// Infinite stream of decomposition cells, with a log of candidates the
/// meets-rule could not settle.
pub struct LimsupStream {
    family: SigmaDeltaCode,
    depth_rule: Box<dyn Fn(u64) -> u32>,
    level: u64,
    cyl: u64,
    emitted: u64,
    dropped_unknown: Vec<(u64, BinWord)>,
    dropped_false: u64,
}

/// Decompose a limsup presentation into the canonical cell stream.
pub fn limsup_decompose(
    code: &SigmaDeltaCode,
    depth_rule: impl Fn(u64) -> u32 + 'static,
) -> LimsupStream {
    LimsupStream {
        family: code.clone(),
        depth_rule: Box::new(depth_rule),
        level: 0,
        cyl: 0,
        emitted: 0,
        dropped_unknown: Vec::new(),
        dropped_false: 0,
    }
}

impl LimsupStream {
    /// Candidates dropped because the meets-rule answered `Unknown`.
    pub fn dropped_unknown(&self) -> &[(u64, BinWord)] {
        &self.dropped_unknown
    }

    /// Candidates dropped because the meets-rule refuted them.
    pub fn dropped_false(&self) -> u64 {
        self.dropped_false
    }

    fn word_at(value: u64, len: u32) -> BinWord {
        let bits: Vec<u8> = (0..len).map(|j| ((value >> j) & 1) as u8).collect();
        BinWord::from_bits(&bits)
    }
}

impl Iterator for LimsupStream {
    type Item = LimsupCell;

    fn next(&mut self) -> Option<LimsupCell> {
        loop {
            let len = (self.depth_rule)(self.level).min(MAX_NODE_LEN);
            if self.cyl >> len != 0 {
                self.level += 1;
                self.cyl = 0;
                continue;
            }
            let s = Self::word_at(self.cyl, len);
            let n = self.level;
            self.cyl += 1;
            match self.family.meets_target(n, &s) {
                TriBool::True => {
                    let cell = ClosedCode::intersection(
                        &self.family.level(n),
                        &ClosedCode::cylinder(&s),
                    );
                    let k = self.emitted;
                    self.emitted += 1;
                    return Some(LimsupCell {
                        k,
                        level: n,
                        cylinder: s,
                        code: cell,
                    });
                }
                TriBool::False => self.dropped_false += 1,
                TriBool::Unknown => self.dropped_unknown.push((n, s)),
            }
        }
    }
}
