//! Textual grammar for described sets: an s-expression printer and parser
//! that round-trip byte-exactly.
//!
//! Forms:
//! `(fin n...)` · `(ival lo hi|*)` · `(res a m)` · `(mask m p)` ·
//! `(ptail add start)` · `(pcols WORD)` · `(enum NAME)` ·
//! `(punion FAMILY SET)` · `(col c)` · `(row r)` · `(rect SET SET)` ·
//! `(bcert NAME)` · `(bdiag NAME)` · `(union SET SET)` · `(inter SET SET)` ·
//! `(diff SET SET)` · `(compl SET)`
//!
//! Words use `e` for the empty word, otherwise a 0/1 digit string read
//! low-index first.  Enumeration and branch names are the registered ones;
//! branch names of the form `HEAD:PERIOD` describe eventually periodic
//! branches and parse back exactly, while ad-hoc branch oracles print a name
//! that will not re-parse (such sets are not meant to be serialized).

use super::{DescribedSet, Node, SetError};
use crate::words::BinWord;

/// Canonical printed form.
pub fn print(s: &DescribedSet) -> String {
    let mut out = String::new();
    print_into(s, &mut out);
    out
}

fn print_into(s: &DescribedSet, out: &mut String) {
    use std::fmt::Write;
    match &*s.0 {
        Node::Finite(v) => {
            out.push_str("(fin");
            for n in v {
                write!(out, " {n}").unwrap();
            }
            out.push(')');
        }
        Node::Interval { lo, hi } => match hi {
            Some(h) => write!(out, "(ival {lo} {h})").unwrap(),
            None => write!(out, "(ival {lo} *)").unwrap(),
        },
        Node::Residue { a, m } => write!(out, "(res {a} {m})").unwrap(),
        Node::BitMask { mask, pattern } => write!(out, "(mask {mask} {pattern})").unwrap(),
        Node::PowerTail { add, start } => write!(out, "(ptail {add} {start})").unwrap(),
        Node::PrefixCols { word } => write!(out, "(pcols {word})").unwrap(),
        Node::Enumerated(e) => write!(out, "(enum {})", e.name).unwrap(),
        Node::PartitionUnion { family, indices } => {
            write!(out, "(punion {} ", family.name()).unwrap();
            print_into(indices, out);
            out.push(')');
        }
        Node::Column(c) => write!(out, "(col {c})").unwrap(),
        Node::Row(r) => write!(out, "(row {r})").unwrap(),
        Node::Rect { cols, rows } => {
            out.push_str("(rect ");
            print_into(cols, out);
            out.push(' ');
            print_into(rows, out);
            out.push(')');
        }
        Node::BranchCert(b) => write!(out, "(bcert {})", b.name).unwrap(),
        Node::BranchDiag(b) => write!(out, "(bdiag {})", b.name).unwrap(),
        Node::Union(a, b) => print_binary("union", a, b, out),
        Node::Inter(a, b) => print_binary("inter", a, b, out),
        Node::Diff(a, b) => print_binary("diff", a, b, out),
        Node::Compl(a) => {
            out.push_str("(compl ");
            print_into(a, out);
            out.push(')');
        }
    }
}

fn print_binary(head: &str, a: &DescribedSet, b: &DescribedSet, out: &mut String) {
    out.push('(');
    out.push_str(head);
    out.push(' ');
    print_into(a, out);
    out.push(' ');
    print_into(b, out);
    out.push(')');
}

#[derive(Clone, Copy, PartialEq, Debug)]
enum Tok<'a> {
    Open,
    Close,
    Atom(&'a str),
}

fn lex(input: &str) -> Result<Vec<Tok<'_>>, SetError> {
    let mut toks = Vec::new();
    let bytes = input.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        match bytes[i] {
            b'(' => {
                toks.push(Tok::Open);
                i += 1;
            }
            b')' => {
                toks.push(Tok::Close);
                i += 1;
            }
            c if c.is_ascii_whitespace() => i += 1,
            _ => {
                let start = i;
                while i < bytes.len()
                    && !bytes[i].is_ascii_whitespace()
                    && bytes[i] != b'('
                    && bytes[i] != b')'
                {
                    i += 1;
                }
                toks.push(Tok::Atom(&input[start..i]));
            }
        }
    }
    Ok(toks)
}

struct Parser<'a> {
    toks: Vec<Tok<'a>>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<Tok<'a>> {
        self.toks.get(self.pos).copied()
    }

    fn next(&mut self) -> Result<Tok<'a>, SetError> {
        let t = self
            .peek()
            .ok_or_else(|| SetError::Parse("unexpected end of input".into()))?;
        self.pos += 1;
        Ok(t)
    }

    fn expect_open(&mut self) -> Result<(), SetError> {
        match self.next()? {
            Tok::Open => Ok(()),
            t => Err(SetError::Parse(format!("expected '(', got {t:?}"))),
        }
    }

    fn expect_close(&mut self) -> Result<(), SetError> {
        match self.next()? {
            Tok::Close => Ok(()),
            t => Err(SetError::Parse(format!("expected ')', got {t:?}"))),
        }
    }

    fn atom(&mut self) -> Result<&'a str, SetError> {
        match self.next()? {
            Tok::Atom(a) => Ok(a),
            t => Err(SetError::Parse(format!("expected an atom, got {t:?}"))),
        }
    }

    fn nat(&mut self) -> Result<u64, SetError> {
        let a = self.atom()?;
        a.parse::<u64>()
            .map_err(|_| SetError::Parse(format!("expected a natural number, got '{a}'")))
    }

    fn set(&mut self) -> Result<DescribedSet, SetError> {
        self.expect_open()?;
        let head = self.atom()?;
        let out = match head {
            "fin" => {
                let mut elems = Vec::new();
                while matches!(self.peek(), Some(Tok::Atom(_))) {
                    elems.push(self.nat()?);
                }
                DescribedSet::finite(elems)
            }
            "ival" => {
                let lo = self.nat()?;
                let hi = match self.atom()? {
                    "*" => None,
                    a => Some(a.parse::<u64>().map_err(|_| {
                        SetError::Parse(format!("expected a bound or '*', got '{a}'"))
                    })?),
                };
                DescribedSet::interval(lo, hi)?
            }
            "res" => {
                let a = self.nat()?;
                let m = self.nat()?;
                DescribedSet::residue(a, m)?
            }
            "mask" => {
                let m = self.nat()?;
                let p = self.nat()?;
                DescribedSet::bitmask(m, p)?
            }
            "ptail" => {
                let add = self.nat()?;
                let start = self.nat()?;
                let start = u32::try_from(start)
                    .map_err(|_| SetError::Parse(format!("ptail start {start} too large")))?;
                DescribedSet::power_tail(add, start)?
            }
            "pcols" => {
                let w = self.atom()?;
                let word = BinWord::parse(w)
                    .ok_or_else(|| SetError::Parse(format!("bad word '{w}'")))?;
                DescribedSet::prefix_cols(word)
            }
            "enum" => {
                let name = self.atom()?;
                let e = super::EnumSet::registry(name).ok_or_else(|| {
                    SetError::Parse(format!("unknown enumeration '{name}'"))
                })?;
                DescribedSet::enumerated(e)
            }
            "punion" => {
                let fname = self.atom()?;
                let family = super::PartFamily::parse(fname).ok_or_else(|| {
                    SetError::Parse(format!("unknown partition family '{fname}'"))
                })?;
                let indices = self.set()?;
                DescribedSet::partition_union(family, indices)?
            }
            "col" => DescribedSet::column(self.nat()?),
            "row" => DescribedSet::row(self.nat()?),
            "rect" => {
                let cols = self.set()?;
                let rows = self.set()?;
                DescribedSet::rect(cols, rows)?
            }
            "bcert" => {
                let name = self.atom()?;
                DescribedSet::branch_cert(super::BranchBits::parse(name)?)
            }
            "bdiag" => {
                let name = self.atom()?;
                DescribedSet::branch_diag(super::BranchBits::parse(name)?)
            }
            "union" => {
                let a = self.set()?;
                let b = self.set()?;
                DescribedSet::union(a, b)?
            }
            "inter" => {
                let a = self.set()?;
                let b = self.set()?;
                DescribedSet::inter(a, b)?
            }
            "diff" => {
                let a = self.set()?;
                let b = self.set()?;
                DescribedSet::diff(a, b)?
            }
            "compl" => DescribedSet::compl(self.set()?),
            other => {
                return Err(SetError::Parse(format!("unknown set form '{other}'")));
            }
        };
        self.expect_close()?;
        Ok(out)
    }
}

/// Parses the canonical grammar; inverse of [`print`] on its image.
pub fn parse(input: &str) -> Result<DescribedSet, SetError> {
    let mut p = Parser { toks: lex(input)?, pos: 0 };
    let s = p.set()?;
    if p.pos != p.toks.len() {
        return Err(SetError::Parse(format!(
            "trailing input after set expression (token {})",
            p.pos
        )));
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::natsets::{EnumSet, PartFamily};

    fn roundtrip(text: &str) {
        let s = parse(text).expect(text);
        assert_eq!(print(&s), text, "canonical form should round-trip");
        let again = parse(&print(&s)).unwrap();
        assert_eq!(print(&again), text);
    }

    #[test]
    fn canonical_forms_round_trip() {
        for text in [
            "(fin)",
            "(fin 0 2 5)",
            "(ival 10 *)",
            "(ival 3 9)",
            "(res 1 4)",
            "(mask 6 2)",
            "(ptail 1 3)",
            "(pcols e)",
            "(pcols 01)",
            "(enum pow2)",
            "(enum alt-block-idx)",
            "(punion nu2 (fin 0 2))",
            "(punion dyadic-blocks (ival 3 *))",
            "(col 3)",
            "(row 0)",
            "(rect (res 0 2) (ival 0 *))",
            "(bcert 10:10)",
            "(bcert :1)",
            "(bdiag 10:10)",
            "(bdiag :1)",
            "(union (res 1 4) (fin 0))",
            "(inter (res 0 2) (res 0 3))",
            "(diff (ival 0 *) (res 0 2))",
            "(compl (fin 7))",
        ] {
            roundtrip(text);
        }
    }

    #[test]
    fn parse_normalizes_finite_lists() {
        let s = parse("(fin 5 2 2 0)").unwrap();
        assert_eq!(print(&s), "(fin 0 2 5)");
    }

    #[test]
    fn parse_rejects_malformed_input() {
        for bad in [
            "",
            "(",
            "(fin",
            "(res 1)",
            "(res 3 0)",
            "(ival 9 3)",
            "(wat 1 2)",
            "(fin 1) junk",
            "(pcols 012)",
            "(enum no-such-enum)",
            "(punion no-family (fin))",
            "(mask 1 3)",
        ] {
            assert!(parse(bad).is_err(), "should reject: {bad}");
        }
    }

    #[test]
    fn printed_constructors_parse_back_equal(){
        let sets = vec![
            DescribedSet::enumerated(EnumSet::registry("squares").unwrap()),
            DescribedSet::partition_union(
                PartFamily::PlaneColumns,
                DescribedSet::residue(0, 2).unwrap(),
            )
            .unwrap(),
            DescribedSet::rect(
                DescribedSet::prefix_cols(crate::words::BinWord::parse("1").unwrap()),
                DescribedSet::full(),
            )
            .unwrap(),
        ];
        for s in sets {
            let text = print(&s);
            let back = parse(&text).unwrap();
            assert_eq!(s, back);
            for n in 0..64u64 {
                match s.carrier() {
                    crate::natsets::Carrier::Line => {
                        assert_eq!(s.member_nat(n), back.member_nat(n))
                    }
                    _ => {
                        let (a, b) = crate::natsets::unpair(n);
                        assert_eq!(s.member2(a, b), back.member2(a, b))
                    }
                }
            }
        }
    }
}
