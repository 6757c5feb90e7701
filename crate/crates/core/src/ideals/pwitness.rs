//! Chain-compactness witnesses: decreasing chains of positive sets together
//! with an optional pseudo-intersection candidate, validated clause by
//! clause against a concrete ideal.
//!
//! Three witness shapes are supported.  All require a decreasing chain of
//! positive sets; they differ in what the successive differences must do:
//! the `minus` shape requires each difference to fall inside the ideal, the
//! `prime` shape requires each difference to stay positive, and the `plus`
//! shape puts no constraint on differences.  A candidate, when present, must
//! be positive and almost contained (up to a finite set) in every chain
//! member.  The validator never guesses: each clause reports `holds`,
//! `fails`, or `undetermined`.

use serde::Serialize;

use super::{IdealError, IdealHandle, Verdict};
use crate::natsets::{grammar, Carrier, DescribedSet};
use crate::util::{Finiteness, TriBool};

/// Which chain-compactness shape a witness claims.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PKind {
    /// Decreasing positive chain, unconstrained differences.
    Plus,
    /// Differences must be small.
    Minus,
    /// Differences must be positive.
    Prime,
}

impl PKind {
    pub fn parse(s: &str) -> Option<PKind> {
        match s {
            "p+" | "plus" => Some(PKind::Plus),
            "p-" | "minus" => Some(PKind::Minus),
            "p'" | "prime" => Some(PKind::Prime),
            _ => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            PKind::Plus => "p+",
            PKind::Minus => "p-",
            PKind::Prime => "p'",
        }
    }
}

/// A chain witness to be validated.
#[derive(Clone, Debug)]
pub struct PWitness {
    pub kind: PKind,
    pub chain: Vec<DescribedSet>,
    pub candidate: Option<DescribedSet>,
}

/// One validated clause.
#[derive(Clone, Debug, Serialize)]
pub struct ClauseCheck {
    pub clause: String,
    pub status: ClauseStatus,
    pub note: String,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClauseStatus {
    Holds,
    Fails,
    Undetermined,
}

impl ClauseStatus {
    fn of_tri(t: TriBool) -> ClauseStatus {
        match t {
            TriBool::True => ClauseStatus::Holds,
            TriBool::False => ClauseStatus::Fails,
            TriBool::Unknown => ClauseStatus::Undetermined,
        }
    }

    fn of_verdict(v: Verdict, want: Verdict) -> ClauseStatus {
        if v == Verdict::Unknown {
            ClauseStatus::Undetermined
        } else if v == want {
            ClauseStatus::Holds
        } else {
            ClauseStatus::Fails
        }
    }
}

/// Overall outcome: `Invalid` as soon as one clause fails, `Valid` only when
/// every clause holds.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessVerdict {
    Valid,
    Invalid,
    Inconclusive,
}

/// Full clause-by-clause report.
#[derive(Clone, Debug, Serialize)]
pub struct PWitnessReport {
    pub ideal: String,
    pub kind: PKind,
    pub verdict: WitnessVerdict,
    pub clauses: Vec<ClauseCheck>,
    pub chain_stats: Vec<String>,
}

/// Validates a chain witness against an ideal.  `horizon` only affects the
/// descriptive statistics; the verdict rests entirely on certified rules.
pub fn validate_p_witness(
    ideal: &IdealHandle,
    w: &PWitness,
    horizon: u64,
) -> Result<PWitnessReport, IdealError> {
    if w.chain.len() < 2 {
        return Err(IdealError::Unsupported(
            "a chain witness needs at least two sets".into(),
        ));
    }
    for s in w.chain.iter().chain(w.candidate.iter()) {
        if s.carrier() != ideal.carrier {
            return Err(IdealError::Carrier(format!(
                "witness set `{}` lives on {}, ideal `{}` on {}",
                grammar::print(s),
                s.carrier(),
                ideal.name,
                ideal.carrier
            )));
        }
    }
    let mut clauses = Vec::new();

    // Every chain member must be positive.
    for (i, a) in w.chain.iter().enumerate() {
        let d = ideal.decide(a)?;
        clauses.push(ClauseCheck {
            clause: format!("chain[{i}] positive"),
            status: ClauseStatus::of_verdict(d.verdict, Verdict::Positive),
            note: format!("`{}` decided {}", grammar::print(a), d.verdict),
        });
    }

    // The chain must decrease.
    for i in 0..w.chain.len() - 1 {
        let sub = w.chain[i + 1].prove_subset(&w.chain[i]);
        clauses.push(ClauseCheck {
            clause: format!("chain[{}] ⊆ chain[{i}]", i + 1),
            status: ClauseStatus::of_tri(sub),
            note: match sub {
                TriBool::True => "inclusion certified".into(),
                TriBool::False => "counterexample element found".into(),
                TriBool::Unknown => "inclusion outside the certified fragment".into(),
            },
        });
    }

    // Differences, according to the claimed shape.
    if w.kind != PKind::Plus {
        let want = match w.kind {
            PKind::Minus => Verdict::In,
            PKind::Prime => Verdict::Positive,
            PKind::Plus => unreachable!(),
        };
        for i in 0..w.chain.len() - 1 {
            let diff = DescribedSet::diff(w.chain[i].clone(), w.chain[i + 1].clone())?;
            let d = ideal.decide(&diff)?;
            clauses.push(ClauseCheck {
                clause: format!("chain[{i}] ∖ chain[{}] is {want}", i + 1),
                status: ClauseStatus::of_verdict(d.verdict, want),
                note: format!("difference decided {}", d.verdict),
            });
        }
    }

    // Candidate pseudo-intersection.
    if let Some(b) = &w.candidate {
        let d = ideal.decide(b)?;
        clauses.push(ClauseCheck {
            clause: "candidate positive".into(),
            status: ClauseStatus::of_verdict(d.verdict, Verdict::Positive),
            note: format!("`{}` decided {}", grammar::print(b), d.verdict),
        });
        for (i, a) in w.chain.iter().enumerate() {
            let leak = DescribedSet::diff(b.clone(), a.clone())?;
            let f = leak.finiteness();
            clauses.push(ClauseCheck {
                clause: format!("candidate ∖ chain[{i}] finite"),
                status: match f {
                    Finiteness::Finite => ClauseStatus::Holds,
                    Finiteness::Infinite => ClauseStatus::Fails,
                    Finiteness::Unknown => ClauseStatus::Undetermined,
                },
                note: format!("leak set is {f:?}"),
            });
        }
    }

    let verdict = if clauses.iter().any(|c| c.status == ClauseStatus::Fails) {
        WitnessVerdict::Invalid
    } else if clauses.iter().all(|c| c.status == ClauseStatus::Holds) {
        WitnessVerdict::Valid
    } else {
        WitnessVerdict::Inconclusive
    };

    let chain_stats = w
        .chain
        .iter()
        .enumerate()
        .map(|(i, a)| describe_set(&format!("chain[{i}]"), a, horizon))
        .chain(w.candidate.iter().map(|b| describe_set("candidate", b, horizon)))
        .collect();

    Ok(PWitnessReport {
        ideal: ideal.name.clone(),
        kind: w.kind,
        verdict,
        clauses,
        chain_stats,
    })
}

fn describe_set(label: &str, s: &DescribedSet, horizon: u64) -> String {
    if s.carrier() != Carrier::Line {
        return format!("{label}: planar set, counting statistics omitted");
    }
    match s.count_upto(horizon) {
        Ok(c) => {
            let dens = c as f64 / horizon.max(1) as f64;
            format!("{label}: {c} elements below {horizon} (density ≈ {dens:.6})")
        }
        Err(_) => format!("{label}: statistics unavailable at horizon {horizon}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ideals::{density_zero, fin, fin2};
    use crate::natsets::grammar::parse;
    use crate::natsets::DescribedSet;

    fn sets(terms: &[&str]) -> Vec<DescribedSet> {
        terms.iter().map(|t| parse(t).unwrap()).collect()
    }

    #[test]
    fn interval_chain_with_even_candidate_validates_for_fin() {
        let w = PWitness {
            kind: PKind::Minus,
            chain: sets(&["(ival 0 *)", "(ival 10 *)", "(ival 20 *)"]),
            candidate: Some(parse("(res 0 2)").unwrap()),
        };
        let r = validate_p_witness(&fin(), &w, 1000).unwrap();
        assert_eq!(r.verdict, WitnessVerdict::Valid, "clauses: {:#?}", r.clauses);
        assert!(r.chain_stats.iter().any(|s| s.contains("1000")));
    }

    #[test]
    fn valuation_tail_chain_is_a_prime_shape_for_density() {
        // Tails of the 2-adic valuation partition: positive, decreasing, with
        // positive differences (each difference is a full residue class).
        let chain = sets(&[
            "(diff (res 0 1) (fin 0))",
            "(diff (res 0 2) (fin 0))",
            "(diff (res 0 4) (fin 0))",
            "(diff (res 0 8) (fin 0))",
        ]);
        let w = PWitness { kind: PKind::Prime, chain, candidate: None };
        let r = validate_p_witness(&density_zero(), &w, 4096).unwrap();
        assert_eq!(r.verdict, WitnessVerdict::Valid, "clauses: {:#?}", r.clauses);
    }

    #[test]
    fn sparse_candidate_for_the_valuation_chain_is_refuted() {
        // A candidate almost inside every tail of the valuation chain must be
        // very sparse — here it is certified density-zero, so the positivity
        // clause fails and the witness is rejected.
        let chain = sets(&["(diff (res 0 2) (fin 0))", "(diff (res 0 4) (fin 0))"]);
        let w = PWitness {
            kind: PKind::Prime,
            chain,
            candidate: Some(parse("(ptail 0 0)").unwrap()),
        };
        let r = validate_p_witness(&density_zero(), &w, 4096).unwrap();
        assert_eq!(r.verdict, WitnessVerdict::Invalid);
        let failing: Vec<_> =
            r.clauses.iter().filter(|c| c.status == ClauseStatus::Fails).collect();
        assert!(failing.iter().any(|c| c.clause == "candidate positive"));
        // The almost-containment clauses themselves hold: powers of two do
        // sit inside every valuation tail up to finitely many elements.
        assert!(r
            .clauses
            .iter()
            .filter(|c| c.clause.starts_with("candidate ∖"))
            .all(|c| c.status == ClauseStatus::Holds));
    }

    #[test]
    fn column_tail_chain_for_the_planar_ideal_refutes_a_wide_candidate() {
        let chain = sets(&[
            "(rect (ival 0 *) (ival 0 *))",
            "(rect (ival 5 *) (ival 0 *))",
            "(rect (ival 10 *) (ival 0 *))",
        ]);
        let w = PWitness {
            kind: PKind::Minus,
            chain,
            candidate: Some(parse("(rect (res 0 2) (ival 0 *))").unwrap()),
        };
        let r = validate_p_witness(&fin2(), &w, 1 << 12).unwrap();
        assert_eq!(r.verdict, WitnessVerdict::Invalid, "clauses: {:#?}", r.clauses);
        // The chain clauses validate; only the candidate leaks infinitely.
        assert!(r
            .clauses
            .iter()
            .filter(|c| !c.clause.starts_with("candidate"))
            .all(|c| c.status == ClauseStatus::Holds));
        assert!(r
            .clauses
            .iter()
            .any(|c| c.clause.starts_with("candidate ∖") && c.status == ClauseStatus::Fails));
    }

    #[test]
    fn short_chains_are_rejected() {
        let w = PWitness {
            kind: PKind::Plus,
            chain: sets(&["(ival 0 *)"]),
            candidate: None,
        };
        assert!(matches!(
            validate_p_witness(&fin(), &w, 100),
            Err(IdealError::Unsupported(_))
        ));
    }

    #[test]
    fn non_decreasing_chains_fail_the_inclusion_clause() {
        let w = PWitness {
            kind: PKind::Plus,
            chain: sets(&["(res 0 4)", "(res 0 2)"]),
            candidate: None,
        };
        let r = validate_p_witness(&density_zero(), &w, 100).unwrap();
        assert_eq!(r.verdict, WitnessVerdict::Invalid);
        assert!(r
            .clauses
            .iter()
            .any(|c| c.clause.contains("⊆") && c.status == ClauseStatus::Fails));
    }

    #[test]
    fn reports_serialize() {
        let w = PWitness {
            kind: PKind::Minus,
            chain: sets(&["(ival 0 *)", "(ival 4 *)"]),
            candidate: None,
        };
        let r = validate_p_witness(&fin(), &w, 100).unwrap();
        let json = serde_json::to_string_pretty(&r).unwrap();
        assert!(json.contains("\"verdict\""));
        assert!(PKind::parse("p+").is_some());
        assert_eq!(PKind::Prime.label(), "p'");
    }
}
