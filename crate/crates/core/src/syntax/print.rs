//! Concrete-syntax printing. The output re-parses to an alpha-equal value.

use std::fmt::{self, Display, Formatter, Write};

use super::{Formula, Individual, ProofTerm};

impl Display for Individual {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

// Formula precedence levels: `->` < `\/` < `/\` < atoms.
const IMP: u8 = 1;
const OR: u8 = 2;
const AND: u8 = 3;
const ATOM: u8 = 4;

fn formula_prec(formula: &Formula) -> u8 {
    match formula {
        Formula::Imp(..) => IMP,
        Formula::Or(..) => OR,
        Formula::And(..) => AND,
        Formula::Atom(..) => ATOM,
        Formula::Forall(..) | Formula::Exists(..) => 0,
    }
}

/// `min` is the weakest operator allowed unparenthesised; `tail` says nothing
/// follows, so a quantifier may extend to the end.
fn write_formula(out: &mut impl Write, formula: &Formula, min: u8, tail: bool) -> fmt::Result {
    let prec = formula_prec(formula);
    let quantifier = prec == 0;
    if (quantifier && !tail) || (!quantifier && prec < min) {
        out.write_char('(')?;
        write_formula(out, formula, 0, true)?;
        return out.write_char(')');
    }
    match formula {
        Formula::Atom(p, args) => {
            out.write_str(p)?;
            if !args.is_empty() {
                out.write_char('(')?;
                for (i, arg) in args.iter().enumerate() {
                    if i > 0 {
                        out.write_char(',')?;
                    }
                    write!(out, "{arg}")?;
                }
                out.write_char(')')?;
            }
            Ok(())
        }
        Formula::Imp(a, b) => {
            write_formula(out, a, OR, false)?;
            out.write_str(" -> ")?;
            write_formula(out, b, IMP, tail)
        }
        Formula::Or(a, b) => {
            write_formula(out, a, AND, false)?;
            out.write_str(" \\/ ")?;
            write_formula(out, b, OR, tail)
        }
        Formula::And(a, b) => {
            write_formula(out, a, ATOM, false)?;
            out.write_str(" /\\ ")?;
            write_formula(out, b, AND, tail)
        }
        Formula::Forall(x, body) => {
            write!(out, "forall {x}. ")?;
            write_formula(out, body, 0, true)
        }
        Formula::Exists(x, body) => {
            write!(out, "exists {x}. ")?;
            write_formula(out, body, 0, true)
        }
    }
}

impl Display for Formula {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write_formula(f, self, 0, true)
    }
}

/// Syntactic positions a term can be printed in.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Pos {
    /// Delimited on the right by a keyword, bracket, separator or end of input.
    Top,
    /// Function position of an application.
    Head,
    /// Operand of `fst`, `snd`, `inl`, `inr`.
    Prefix,
    /// Argument of an application.
    Arg,
}

fn write_term(out: &mut impl Write, term: &ProofTerm, pos: Pos) -> fmt::Result {
    let allowed = match term {
        ProofTerm::Lam(..) | ProofTerm::Gen(..) | ProofTerm::Case(..) | ProofTerm::Dest(..) => Pos::Top,
        ProofTerm::App(..) | ProofTerm::IApp(..) => Pos::Head,
        ProofTerm::Proj1(_) | ProofTerm::Proj2(_) | ProofTerm::Inj1(_) | ProofTerm::Inj2(_) => Pos::Prefix,
        ProofTerm::Var(_) | ProofTerm::Pair(..) | ProofTerm::Witness(..) => Pos::Arg,
    };
    if pos > allowed {
        out.write_char('(')?;
        write_term(out, term, Pos::Top)?;
        return out.write_char(')');
    }
    match term {
        ProofTerm::Var(a) => out.write_str(a),
        ProofTerm::Lam(a, body) => {
            write!(out, "fun {a} => ")?;
            write_term(out, body, Pos::Top)
        }
        ProofTerm::App(p, q) => {
            write_term(out, p, Pos::Head)?;
            out.write_char(' ')?;
            write_term(out, q, Pos::Arg)
        }
        ProofTerm::Pair(p, q) => {
            out.write_char('(')?;
            write_term(out, p, Pos::Top)?;
            out.write_str(", ")?;
            write_term(out, q, Pos::Top)?;
            out.write_char(')')
        }
        ProofTerm::Proj1(p) => prefix(out, "fst", p),
        ProofTerm::Proj2(p) => prefix(out, "snd", p),
        ProofTerm::Inj1(p) => prefix(out, "inl", p),
        ProofTerm::Inj2(p) => prefix(out, "inr", p),
        ProofTerm::Case(s, a1, q1, a2, q2) => {
            out.write_str("case ")?;
            write_term(out, s, Pos::Top)?;
            write!(out, " of inl {a1} => ")?;
            write_term(out, q1, Pos::Top)?;
            write!(out, " | inr {a2} => ")?;
            write_term(out, q2, Pos::Top)
        }
        ProofTerm::Gen(x, body) => {
            write!(out, "gen {x} => ")?;
            write_term(out, body, Pos::Top)
        }
        ProofTerm::IApp(p, t) => {
            write_term(out, p, Pos::Head)?;
            write!(out, " [{t}]")
        }
        ProofTerm::Witness(t, p) => {
            write!(out, "[{t}, ")?;
            write_term(out, p, Pos::Top)?;
            out.write_char(']')
        }
        ProofTerm::Dest(p, x, a, q) => {
            out.write_str("dest ")?;
            write_term(out, p, Pos::Top)?;
            write!(out, " as [{x}, {a}] in ")?;
            write_term(out, q, Pos::Top)
        }
    }
}

fn prefix(out: &mut impl Write, keyword: &str, p: &ProofTerm) -> fmt::Result {
    out.write_str(keyword)?;
    out.write_char(' ')?;
    write_term(out, p, Pos::Prefix)
}

impl Display for ProofTerm {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write_term(f, self, Pos::Top)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Formula {
        Formula::prop("X")
    }
    fn y() -> Formula {
        Formula::prop("Y")
    }

    #[test]
    fn formula_precedence() {
        assert_eq!(Formula::imp(x(), Formula::or(y(), x())).to_string(), "X -> Y \\/ X");
        assert_eq!(Formula::imp(Formula::imp(x(), y()), x()).to_string(), "(X -> Y) -> X");
        assert_eq!(Formula::and(Formula::or(x(), y()), x()).to_string(), "(X \\/ Y) /\\ X");
    }

    #[test]
    fn quantifier_parenthesised_unless_trailing() {
        let p = Formula::atom("P", [Individual::var("x")]);
        let all = Formula::forall("x", p.clone());
        assert_eq!(Formula::imp(x(), all.clone()).to_string(), "X -> forall x. P(x)");
        assert_eq!(Formula::imp(all.clone(), x()).to_string(), "(forall x. P(x)) -> X");
        assert_eq!(Formula::imp(Formula::and(x(), all), x()).to_string(), "X /\\ (forall x. P(x)) -> X");
    }

    #[test]
    fn term_layout() {
        let t = ProofTerm::case(
            ProofTerm::var("c"),
            "a0",
            ProofTerm::inj1(ProofTerm::var("a0")),
            "a1",
            ProofTerm::inj2(ProofTerm::var("a1")),
        );
        assert_eq!(t.to_string(), "case c of inl a0 => inl a0 | inr a1 => inr a1");
        let app = ProofTerm::app(ProofTerm::lam("a", ProofTerm::var("a")), ProofTerm::proj1(ProofTerm::var("p")));
        assert_eq!(app.to_string(), "(fun a => a) (fst p)");
        let inj = ProofTerm::inj1(ProofTerm::app(ProofTerm::var("f"), ProofTerm::var("a")));
        assert_eq!(inj.to_string(), "inl (f a)");
        let spine = ProofTerm::iapp(ProofTerm::app(ProofTerm::proj1(ProofTerm::var("p")), ProofTerm::var("a")), Individual::var("t"));
        assert_eq!(spine.to_string(), "fst p a [t]");
    }
}
