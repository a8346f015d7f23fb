//! Canonical surface syntax. Players print as 1-based numbers and only the
//! parentheses required by precedence (`!` > `&` > `->`) are emitted.

use std::fmt;

use num_traits::{One, Signed};

use super::Formula;
use crate::rational::Rational;

const IMP: u8 = 0;
const CONJ: u8 = 1;
const NEG: u8 = 2;

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(f, self, IMP)
    }
}

fn write_formula(out: &mut fmt::Formatter<'_>, f: &Formula, level: u8) -> fmt::Result {
    match f {
        Formula::Atom(atom) => write!(out, "{atom}"),
        Formula::Not(inner) => {
            out.write_str("!")?;
            write_formula(out, inner, NEG)
        }
        Formula::And(a, b) => grouped(out, level > CONJ, |out| {
            write_formula(out, a, CONJ)?;
            out.write_str(" & ")?;
            write_formula(out, b, NEG)
        }),
        Formula::Implies(a, b) => grouped(out, level > IMP, |out| {
            write_formula(out, a, CONJ)?;
            out.write_str(" -> ")?;
            write_formula(out, b, IMP)
        }),
        Formula::ProbGe { owner, terms, bound } => {
            for (k, (coef, body)) in terms.iter().enumerate() {
                if k == 0 {
                    if !coef.is_one() {
                        write!(out, "{coef}*")?;
                    }
                } else if coef.is_negative() {
                    out.write_str(" - ")?;
                    write_coefficient(out, &-coef)?;
                } else {
                    out.write_str(" + ")?;
                    write_coefficient(out, coef)?;
                }
                write!(out, "pr_{owner}({body})")?;
            }
            write!(out, " >= {bound}")
        }
        Formula::CommonBelief(inner) => write!(out, "CB({inner})"),
        Formula::Belief(p, inner) => write!(out, "B_{p}({inner})"),
        Formula::MutualBelief(1, inner) => write!(out, "EB({inner})"),
        Formula::MutualBelief(m, inner) => write!(out, "EB^{m}({inner})"),
        Formula::Optimal(p, a) => write!(out, "opt_{p}({a})"),
        Formula::Rational(p) => write!(out, "rat_{p}"),
    }
}

fn write_coefficient(out: &mut fmt::Formatter<'_>, magnitude: &Rational) -> fmt::Result {
    if magnitude.is_one() {
        Ok(())
    } else {
        write!(out, "{magnitude}*")
    }
}

fn grouped(
    out: &mut fmt::Formatter<'_>,
    parens: bool,
    body: impl FnOnce(&mut fmt::Formatter<'_>) -> fmt::Result,
) -> fmt::Result {
    if parens {
        out.write_str("(")?;
    }
    body(out)?;
    if parens {
        out.write_str(")")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::PlayerId;
    use crate::rational::{int, ratio};

    #[test]
    fn canonical_forms() {
        let p = Formula::prim("p");
        assert_eq!(
            Formula::implies(Formula::receive(PlayerId(0), "s1"), Formula::play(PlayerId(0), "T")).to_string(),
            "rec(1,s1) -> pl(1,T)"
        );
        assert_eq!(Formula::belief(PlayerId(1), p.clone()).to_string(), "B_2(p)");
        assert_eq!(Formula::not(Formula::and(p.clone(), Formula::not(p.clone()))).to_string(), "!(p & !p)");
    }

    #[test]
    fn probability_terms() {
        let p = Formula::prim("p");
        let q = Formula::prim("q");
        let f = Formula::prob_ge(
            PlayerId(0),
            vec![(int(-1), p.clone()), (ratio(-3, 2), q.clone()), (int(1), p), (int(0), q)],
            ratio(-1, 3),
        );
        assert_eq!(f.to_string(), "-1*pr_1(p) - 3/2*pr_1(q) + pr_1(p) + 0*pr_1(q) >= -1/3");
    }

    #[test]
    fn precedence_parentheses() {
        let (a, b, c) = (Formula::prim("a"), Formula::prim("b"), Formula::prim("c"));
        let left = Formula::implies(Formula::implies(a.clone(), b.clone()), c.clone());
        assert_eq!(left.to_string(), "(a -> b) -> c");
        let right = Formula::implies(a.clone(), Formula::implies(b.clone(), c.clone()));
        assert_eq!(right.to_string(), "a -> b -> c");
        let nested = Formula::and(a.clone(), Formula::and(b.clone(), c.clone()));
        assert_eq!(nested.to_string(), "a & (b & c)");
        let flat = Formula::and(Formula::and(a, b), c);
        assert_eq!(flat.to_string(), "a & b & c");
    }
}
