//! Tree-indexed families of closed sets: one closed cell per finite integer
//! sequence, shrinking along branches, so that every infinite branch pins
//! down exactly one point. The family shipped here has cells that sweep out
//! the points with infinitely many ones.

use std::fmt;
use std::rc::Rc;

use crate::words::BinWord;

use super::codes::{BaireSeq, ClosedCode, MAX_NODE_LEN};
use super::{CantorError, CantorPoint, EpPoint};

/// Visit budget for uniqueness searches inside one cell.
const CELL_SCAN_CAP: u64 = 1 << 12;

/// A family of closed cells indexed by finite integer sequences, declared to
/// shrink along branches: the cell at `t` contains the cell at every
/// extension of `t` and has diameter at most 2^{-|t|}.
#[derive(Clone)]
pub struct SouslinCode {
    name: String,
    cell: Rc<dyn Fn(&[u64]) -> ClosedCode>,
}

impl SouslinCode {
    pub fn new(name: impl Into<String>, cell: impl Fn(&[u64]) -> ClosedCode + 'static) -> Self {
        SouslinCode {
            name: name.into(),
            cell: Rc::new(cell),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn cell(&self, t: &[u64]) -> ClosedCode {
        (self.cell)(t)
    }

    /// Node-level containment check: on each probed index sequence, every
    /// admitted node of the cell (to `depth`) is admitted by the parent cell.
    pub fn check_monotone(&self, probes: &[Vec<u64>], depth: u32) -> Result<(), CantorError> {
        for t in probes {
            if t.is_empty() {
                continue;
            }
            let child = self.cell(t);
            let parent = self.cell(&t[..t.len() - 1]);
            let mut stack = vec![BinWord::empty()];
            let mut visited = 0u64;
            while let Some(node) = stack.pop() {
                visited += 1;
                if visited > CELL_SCAN_CAP {
                    break;
                }
                if !child.admits(&node) {
                    continue;
                }
                if !parent.admits(&node) {
                    return Err(CantorError::FamilyDefect(format!(
                        "cell at {t:?} admits [{}] but the parent cell rejects it",
                        node.digits()
                    )));
                }
                if node.len() < depth.min(MAX_NODE_LEN) {
                    stack.push(node.push(0));
                    stack.push(node.push(1));
                }
            }
        }
        Ok(())
    }

    /// Diameter and nonemptiness check: each probed cell admits exactly one
    /// node at depth |t|, so all its branches agree on their first |t| bits.
    pub fn check_diameter(&self, probes: &[Vec<u64>]) -> Result<(), CantorError> {
        for t in probes {
            let cell = self.cell(t);
            let target = (t.len() as u32).min(MAX_NODE_LEN);
            match unique_node_at_depth(&cell, target)? {
                Some(_) => {}
                None => {
                    return Err(CantorError::FamilyDefect(format!(
                        "cell at {t:?} admits no node at depth {target}"
                    )))
                }
            }
        }
        Ok(())
    }

    /// The single point shared by the cells along a branch, produced bit by
    /// bit: the n-th bit is read off the unique depth-(n+1) node of the cell
    /// at the branch's first n+1 indices.
    pub fn branch_point(&self, y: &BaireSeq) -> CantorPoint {
        let family = self.clone();
        let branch = y.clone();
        let label = format!("branch({}, {})", self.name, branch);
        CantorPoint::lazy(label, MAX_NODE_LEN as u64, move |sofar| {
            let k = sofar.len() as u32 + 1;
            let t: Vec<u64> = (0..k as u64).map(|i| branch.entry(i)).collect();
            let cell = family.cell(&t);
            let node = unique_node_at_depth(&cell, k).ok().flatten()?;
            let consistent = (0..sofar.len()).all(|i| node.bit(i as u32) == sofar[i]);
            if !consistent {
                return None;
            }
            Some(node.bit(k - 1))
        })
    }
}

impl fmt::Debug for SouslinCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SouslinCode({})", self.name)
    }
}

/// The admitted node at exactly `depth`, provided there is one and only one.
/// `Ok(None)` when the cell has no node there; an error when two distinct
/// nodes survive, since the cell's branches then spread wider than declared.
fn unique_node_at_depth(cell: &ClosedCode, depth: u32) -> Result<Option<BinWord>, CantorError> {
    let mut stack = vec![BinWord::empty()];
    let mut found: Option<BinWord> = None;
    let mut visited = 0u64;
    while let Some(node) = stack.pop() {
        visited += 1;
        if visited > CELL_SCAN_CAP {
            return Ok(None);
        }
        if !cell.admits(&node) {
            continue;
        }
        if node.len() == depth {
            if let Some(prev) = &found {
                return Err(CantorError::FamilyDefect(format!(
                    "two nodes [{}] and [{}] at depth {depth} in one cell",
                    prev.digits(),
                    node.digits()
                )));
            }
            found = Some(node);
            continue;
        }
        stack.push(node.push(0));
        stack.push(node.push(1));
    }
    Ok(found)
}

/// The stem named by an index sequence: `t_0` zeros, a one, `t_1` zeros, a
/// one, and so on — one one per index.
fn ones_stem(t: &[u64]) -> BinWord {
    let mut letters = Vec::new();
    for &gap in t {
        for _ in 0..gap {
            letters.push(0);
        }
        letters.push(1);
    }
    assert!(
        letters.len() as u32 <= BinWord::MAX_LEN,
        "stem too long to represent"
    );
    BinWord::from_bits(&letters)
}

/// The family whose cells are the cylinders `[0^(t_0) 1 0^(t_1) 1 …]`: each
/// branch index spends its value on zeros and then commits a one, so branch
/// points carry infinitely many ones, and every such point arises from the
/// branch spelling out its gap pattern.
pub fn wirr_souslin() -> SouslinCode {
    SouslinCode::new("ones-forever", |t| ClosedCode::cylinder(&ones_stem(t)))
}

/// The exact branch point of the cylinder family above: gaps of zeros sized
/// by the entries, a one after each, repeating with the branch's cycle.
pub fn wirr_point(y: &BaireSeq) -> EpPoint {
    let spell = |entries: &[u64]| {
        let mut letters = Vec::new();
        for &gap in entries {
            for _ in 0..gap {
                letters.push(0u8);
            }
            letters.push(1);
        }
        letters
    };
    // Every cycle entry contributes a one, so the spelled cycle is nonempty.
    EpPoint::new(spell(y.head()), spell(y.cycle()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cantor::codes::Membership;
    use crate::cantor::metric;

    fn ep(lit: &str) -> CantorPoint {
        CantorPoint::Periodic(EpPoint::parse(lit).unwrap())
    }

    #[test]
    fn first_cells_are_the_frozen_cylinders() {
        let fam = wirr_souslin();
        // One index: t_0 zeros then a one.
        assert_eq!(fam.cell(&[0]).membership(&ep("1:0"), 8), Membership::In);
        assert_eq!(fam.cell(&[0]).membership(&ep(":0"), 8), Membership::Out);
        assert_eq!(fam.cell(&[1]).membership(&ep("01:1"), 8), Membership::In);
        assert_eq!(fam.cell(&[1]).membership(&ep("1:0"), 8), Membership::Out);
        // Two indices nest inside one.
        assert_eq!(fam.cell(&[0, 0]).membership(&ep("11:0"), 8), Membership::In);
        assert_eq!(fam.cell(&[0, 0]).membership(&ep("10:0"), 8), Membership::Out);
    }

    #[test]
    fn cells_nest_and_shrink_as_declared() {
        let fam = wirr_souslin();
        let mut probes = Vec::new();
        for a in 0..4u64 {
            probes.push(vec![a]);
            for b in 0..4u64 {
                probes.push(vec![a, b]);
            }
        }
        fam.check_monotone(&probes, 8).unwrap();
        fam.check_diameter(&probes).unwrap();
    }

    #[test]
    fn branch_points_spell_gap_patterns_and_carry_infinitely_many_ones() {
        let y = BaireSeq::then_zeros(vec![2, 0, 1]);
        let p = wirr_point(&y);
        // Head 001 1 01, then a one for every trailing zero entry.
        assert!(p.same_point(&EpPoint::parse("001101:1").unwrap()));
        assert!(!p.eventually_zero());
        let constant = wirr_point(&BaireSeq::constant(1));
        assert!(constant.same_point(&EpPoint::parse(":01").unwrap()));
    }

    #[test]
    fn lazy_and_exact_branch_points_agree() {
        let fam = wirr_souslin();
        for y in [
            BaireSeq::then_zeros(vec![2, 0, 1]),
            BaireSeq::constant(0),
            BaireSeq::new(vec![3], vec![1, 0]),
        ] {
            let lazy = fam.branch_point(&y);
            let exact = CantorPoint::Periodic(wirr_point(&y));
            for n in 0..12 {
                assert_eq!(lazy.bit(n).unwrap(), exact.bit(n).unwrap(), "bit {n} of {y}");
            }
        }
    }

    #[test]
    fn eventually_zero_points_exit_every_branch_after_their_last_one() {
        let fam = wirr_souslin();
        let rational = ep("0101:0");
        // The point sits inside the cylinder spelling its own two ones …
        assert_eq!(fam.cell(&[1, 1]).membership(&rational, 12), Membership::In);
        // … but every extension of that index sequence demands another one,
        // which the eventually zero tail cannot supply.
        assert_eq!(
            fam.cell(&[1, 1, 0]).membership(&rational, 12),
            Membership::Out
        );
        assert_eq!(
            fam.cell(&[1, 1, 1]).membership(&rational, 12),
            Membership::Out
        );
        assert_eq!(
            fam.cell(&[1, 1, 4]).membership(&rational, 12),
            Membership::Out
        );
    }

    #[test]
    fn branch_point_distance_reflects_shared_stems() {
        // Branches agreeing on their first two entries share the stem, so
        // their points agree at least that far.
        let a = wirr_point(&BaireSeq::then_zeros(vec![1, 2, 0]));
        let b = wirr_point(&BaireSeq::then_zeros(vec![1, 2, 3]));
        let d = metric(
            &CantorPoint::Periodic(a),
            &CantorPoint::Periodic(b),
        )
        .unwrap();
        // Shared stem 01 001 fills positions 0..=4; the third entries commit
        // a one versus a zero at position 5.
        assert_eq!(d, crate::cantor::Dyadic::Pow2Neg(5));
    }
}
