//! Pretty printing in the ASCII grammar accepted by [`parse`](super::parse).
//!
//! Desugared encodings of `|`, `->`, `<->`, `false` and `<φ>ψ` are printed
//! back in their sugared form. Parsing the output yields the same tree.

use std::fmt;

use super::ast::{Formula, TOP_ATOM};

// Binding levels, loosest first.
const IFF: u8 = 0;
const IMPLIES: u8 = 1;
const OR: u8 = 2;
const AND: u8 = 3;
const UNARY: u8 = 4;

enum View<'a> {
    Iff(&'a Formula, &'a Formula),
    Implies(&'a Formula, &'a Formula),
    Or(&'a Formula, &'a Formula),
    And(&'a Formula, &'a Formula),
    Bottom,
    Dual(&'a Formula, &'a Formula),
    Unary,
}

fn strip_not(f: &Formula) -> Option<&Formula> {
    match f {
        Formula::Not(inner) => Some(inner),
        _ => None,
    }
}

fn as_implies(f: &Formula) -> Option<(&Formula, &Formula)> {
    let Formula::And(a, nb) = strip_not(f)? else {
        return None;
    };
    Some((a, strip_not(nb)?))
}

fn view(f: &Formula) -> View<'_> {
    match f {
        Formula::And(l, r) => {
            if let (Some((a, b)), Some((b2, a2))) = (as_implies(l), as_implies(r)) {
                if a == a2 && b == b2 {
                    return View::Iff(a, b);
                }
            }
            View::And(l, r)
        }
        Formula::Not(inner) => match inner.as_ref() {
            Formula::Atom(name) if name == TOP_ATOM => View::Bottom,
            Formula::Announce(announced, body) => match body.as_ref() {
                Formula::Not(b) => View::Dual(announced, b),
                _ => View::Unary,
            },
            Formula::And(l, r) => match (strip_not(l), strip_not(r)) {
                // `¬(¬(x ∧ ¬y) ∧ ¬b)` reads as `(x -> y) -> b` rather than `x & !y | b`.
                (Some(a), Some(b)) => match a {
                    Formula::And(_, r2) if strip_not(r2).is_some() => View::Implies(l, b),
                    _ => View::Or(a, b),
                },
                (None, Some(b)) => View::Implies(l, b),
                _ => View::Unary,
            },
            _ => View::Unary,
        },
        _ => View::Unary,
    }
}

fn level(f: &Formula) -> u8 {
    match view(f) {
        View::Iff(..) => IFF,
        View::Implies(..) => IMPLIES,
        View::Or(..) => OR,
        View::And(..) => AND,
        _ => UNARY,
    }
}

fn write_at(out: &mut fmt::Formatter<'_>, f: &Formula, min_level: u8) -> fmt::Result {
    if level(f) < min_level {
        write!(out, "(")?;
        write_formula(out, f)?;
        write!(out, ")")
    } else {
        write_formula(out, f)
    }
}

fn write_formula(out: &mut fmt::Formatter<'_>, f: &Formula) -> fmt::Result {
    match view(f) {
        View::Iff(a, b) => {
            write_at(out, a, IFF)?;
            write!(out, " <-> ")?;
            write_at(out, b, IMPLIES)
        }
        View::Implies(a, b) => {
            write_at(out, a, OR)?;
            write!(out, " -> ")?;
            write_at(out, b, IMPLIES)
        }
        View::Or(a, b) => {
            write_at(out, a, OR)?;
            write!(out, " | ")?;
            write_at(out, b, AND)
        }
        View::And(a, b) => {
            write_at(out, a, AND)?;
            write!(out, " & ")?;
            write_at(out, b, UNARY)
        }
        View::Bottom => write!(out, "false"),
        View::Dual(announced, body) => {
            write!(out, "<")?;
            write_formula(out, announced)?;
            write!(out, ">")?;
            write_at(out, body, UNARY)
        }
        View::Unary => match f {
            Formula::Atom(name) => write!(out, "{name}"),
            Formula::DepthExact(a, d) => write!(out, "E[{a},{d}]"),
            Formula::DepthAtLeast(a, d) => write!(out, "P[{a},{d}]"),
            Formula::Not(inner) => {
                write!(out, "!")?;
                write_at(out, inner, UNARY)
            }
            Formula::Know(a, inner) => {
                write!(out, "K[{a}] ")?;
                write_at(out, inner, UNARY)
            }
            Formula::KnowInf(a, inner) => {
                write!(out, "Kinf[{a}] ")?;
                write_at(out, inner, UNARY)
            }
            Formula::Announce(announced, body) => {
                write!(out, "[")?;
                write_formula(out, announced)?;
                write!(out, "]")?;
                write_at(out, body, UNARY)
            }
            Formula::And(..) => unreachable!("conjunctions have their own view"),
        },
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(f, self)
    }
}

#[cfg(test)]
mod tests {
    use crate::syntax::parse;

    #[test]
    fn sugared_output() {
        for text in [
            "p | q",
            "p -> q",
            "p <-> q",
            "false",
            "<!K[1] m1>K[0] m0",
            "[K[2] K[2] p0]K[0] K[1] p0",
            "(p -> q) -> r",
            "p & (q & r)",
            "!(p & q)",
            "E[0,2] & P[1,0]",
            "Kinf[0] (p | q)",
        ] {
            let f = parse(text).unwrap();
            assert_eq!(f.to_string(), text, "printing {text}");
        }
    }
}
