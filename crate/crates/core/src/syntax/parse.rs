//! Lexer and recursive-descent parser for formulas, proof terms and context files.
//!
//! Formulas: `P(t1,...,tn)`, `X`, `A /\ B`, `A \/ B`, `A -> B`, `forall x. A`,
//! `exists x. A`. `/\` binds tighter than `\/`, which binds tighter than `->`;
//! all three associate to the right and quantifiers extend as far right as possible.
//!
//! Terms: `fun a => p`, `p q`, `(p, q)`, `fst p`, `snd p`, `inl p`, `inr p`,
//! `case p of inl a1 => q1 | inr a2 => q2`, `gen x => p`, `p [t]`, `[t, p]`,
//! `dest p as [x, a] in q`.
//!
//! Every individual is parsed as a variable; [`Context::resolve_formula`] turns
//! declared constants into constants. Binders that shadow an enclosing binder
//! of the same namespace are renamed apart.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use super::{fresh_variant, Context, ContextError, Formula, Individual, Name, ProofTerm, KEYWORDS};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub expected: Vec<String>,
    pub found: String,
    /// Set when the input is syntactically fine but violates a declaration rule.
    pub context: Option<ContextError>,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "parse error at line {}, column {}: ", self.line, self.column)?;
        if let Some(err) = &self.context {
            return write!(f, "{err}");
        }
        match self.expected.as_slice() {
            [] => write!(f, "unexpected {}", self.found),
            [one] => write!(f, "expected {one}, found {}", self.found),
            many => write!(f, "expected one of {}, found {}", many.join(", "), self.found),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Lower(Name),
    Upper(Name),
    Kw(&'static str),
    Sym(&'static str),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Lower(n) | Tok::Upper(n) => write!(f, "`{n}`"),
            Tok::Kw(k) => write!(f, "`{k}`"),
            Tok::Sym(s) => write!(f, "`{s}`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

const SYMBOLS: &[&str] = &["=>", "->", "/\\", "\\/", "(", ")", "[", "]", ",", ".", ":", "|"];

fn lex(input: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<char> = input.chars().collect();
    let (mut i, mut line, mut column) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            i += 1;
            line += 1;
            column = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            column += 1;
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let (start_line, start_column) = (line, column);
        if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            column += i - start;
            let tok = if let Some(kw) = KEYWORDS.iter().find(|k| **k == word) {
                Tok::Kw(kw)
            } else if c.is_ascii_uppercase() {
                Tok::Upper(Name::from(word))
            } else {
                Tok::Lower(Name::from(word))
            };
            out.push(Spanned { tok, line: start_line, column: start_column });
            continue;
        }
        let rest: String = chars[i..chars.len().min(i + 2)].iter().collect();
        match SYMBOLS.iter().find(|s| rest.starts_with(**s)) {
            Some(sym) => {
                i += sym.len();
                column += sym.len();
                out.push(Spanned { tok: Tok::Sym(sym), line: start_line, column: start_column });
            }
            None => {
                return Err(ParseError {
                    line,
                    column,
                    expected: Vec::new(),
                    found: format!("character `{c}`"),
                    context: None,
                })
            }
        }
    }
    out.push(Spanned { tok: Tok::Eof, line, column });
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn new(input: &str) -> PResult<Parser> {
        Ok(Parser { toks: lex(input)?, pos: 0 })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, offset: usize) -> &Tok {
        let idx = (self.pos + offset).min(self.toks.len() - 1);
        &self.toks[idx].tok
    }

    fn bump(&mut self) -> Tok {
        let tok = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        tok
    }

    fn error(&self, expected: &[&str]) -> ParseError {
        let here = &self.toks[self.pos];
        ParseError {
            line: here.line,
            column: here.column,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: here.tok.to_string(),
            context: None,
        }
    }

    fn is_sym(&self, sym: &str) -> bool {
        matches!(self.peek(), Tok::Sym(s) if *s == sym)
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Kw(k) if *k == kw)
    }

    fn expect_sym(&mut self, sym: &'static str) -> PResult<()> {
        if self.is_sym(sym) {
            self.bump();
            Ok(())
        } else {
            Err(self.error(&[&format!("`{sym}`")]))
        }
    }

    fn expect_kw(&mut self, kw: &'static str) -> PResult<()> {
        if self.is_kw(kw) {
            self.bump();
            Ok(())
        } else {
            Err(self.error(&[&format!("`{kw}`")]))
        }
    }

    fn lower(&mut self, what: &str) -> PResult<Name> {
        match self.peek() {
            Tok::Lower(n) => {
                let n = n.clone();
                self.bump();
                Ok(n)
            }
            _ => Err(self.error(&[what])),
        }
    }

    fn finish(&mut self) -> PResult<()> {
        if matches!(self.peek(), Tok::Eof) {
            Ok(())
        } else {
            Err(self.error(&["end of input"]))
        }
    }

    // formula := quantifier | imp
    fn formula(&mut self) -> PResult<Formula> {
        if self.is_kw("forall") || self.is_kw("exists") {
            let universal = self.is_kw("forall");
            self.bump();
            let x = self.lower("an individual variable")?;
            self.expect_sym(".")?;
            let body = self.formula()?;
            return Ok(if universal { Formula::forall(x, body) } else { Formula::exists(x, body) });
        }
        let lhs = self.disjunction()?;
        if self.is_sym("->") {
            self.bump();
            let rhs = self.formula()?;
            return Ok(Formula::imp(lhs, rhs));
        }
        Ok(lhs)
    }

    fn starts_quantifier(&self) -> bool {
        self.is_kw("forall") || self.is_kw("exists")
    }

    fn disjunction(&mut self) -> PResult<Formula> {
        let lhs = self.conjunction()?;
        if self.is_sym("\\/") {
            self.bump();
            let rhs = if self.starts_quantifier() { self.formula()? } else { self.disjunction()? };
            return Ok(Formula::or(lhs, rhs));
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> PResult<Formula> {
        let lhs = self.formula_atom()?;
        if self.is_sym("/\\") {
            self.bump();
            let rhs = if self.starts_quantifier() { self.formula()? } else { self.conjunction()? };
            return Ok(Formula::and(lhs, rhs));
        }
        Ok(lhs)
    }

    fn formula_atom(&mut self) -> PResult<Formula> {
        match self.peek().clone() {
            Tok::Upper(p) => {
                self.bump();
                let mut args = Vec::new();
                if self.is_sym("(") {
                    self.bump();
                    loop {
                        args.push(Individual::Var(self.lower("an individual")?));
                        if self.is_sym(",") {
                            self.bump();
                        } else {
                            break;
                        }
                    }
                    self.expect_sym(")")?;
                }
                Ok(Formula::atom(p, args))
            }
            Tok::Sym("(") => {
                self.bump();
                let inner = self.formula()?;
                self.expect_sym(")")?;
                Ok(inner)
            }
            _ if self.starts_quantifier() => self.formula(),
            _ => Err(self.error(&["an atom", "`(`", "`forall`", "`exists`"])),
        }
    }

    // term := fun a => term | gen x => term | case ... | dest ... | application
    fn term(&mut self) -> PResult<ProofTerm> {
        match self.peek() {
            Tok::Kw("fun") => {
                self.bump();
                let a = self.lower("a proof variable")?;
                self.expect_sym("=>")?;
                Ok(ProofTerm::lam(a, self.term()?))
            }
            Tok::Kw("gen") => {
                self.bump();
                let x = self.lower("an individual variable")?;
                self.expect_sym("=>")?;
                Ok(ProofTerm::gen(x, self.term()?))
            }
            Tok::Kw("case") => {
                self.bump();
                let scrutinee = self.term()?;
                self.expect_kw("of")?;
                self.expect_kw("inl")?;
                let a1 = self.lower("a proof variable")?;
                self.expect_sym("=>")?;
                let q1 = self.term()?;
                self.expect_sym("|")?;
                self.expect_kw("inr")?;
                let a2 = self.lower("a proof variable")?;
                self.expect_sym("=>")?;
                let q2 = self.term()?;
                Ok(ProofTerm::case(scrutinee, a1, q1, a2, q2))
            }
            Tok::Kw("dest") => {
                self.bump();
                let scrutinee = self.term()?;
                self.expect_kw("as")?;
                self.expect_sym("[")?;
                let x = self.lower("an individual variable")?;
                self.expect_sym(",")?;
                let a = self.lower("a proof variable")?;
                self.expect_sym("]")?;
                self.expect_kw("in")?;
                Ok(ProofTerm::dest(scrutinee, x, a, self.term()?))
            }
            _ => self.application(),
        }
    }

    fn starts_argument(&self) -> bool {
        matches!(self.peek(), Tok::Lower(_) | Tok::Sym("(") | Tok::Sym("["))
    }

    fn application(&mut self) -> PResult<ProofTerm> {
        let mut head = self.prefixed()?;
        loop {
            // `p [t]` instantiates; `p [t, q]` applies p to a witness pair.
            if self.is_sym("[") && matches!(self.peek_at(1), Tok::Lower(_)) && matches!(self.peek_at(2), Tok::Sym("]")) {
                self.bump();
                let t = self.lower("an individual")?;
                self.expect_sym("]")?;
                head = ProofTerm::iapp(head, Individual::Var(t));
            } else if self.starts_argument() {
                let arg = self.term_atom()?;
                head = ProofTerm::app(head, arg);
            } else {
                return Ok(head);
            }
        }
    }

    fn prefixed(&mut self) -> PResult<ProofTerm> {
        let build: fn(ProofTerm) -> ProofTerm = match self.peek() {
            Tok::Kw("fst") => ProofTerm::proj1,
            Tok::Kw("snd") => ProofTerm::proj2,
            Tok::Kw("inl") => ProofTerm::inj1,
            Tok::Kw("inr") => ProofTerm::inj2,
            _ => return self.term_atom(),
        };
        self.bump();
        Ok(build(self.prefixed()?))
    }

    fn term_atom(&mut self) -> PResult<ProofTerm> {
        match self.peek().clone() {
            Tok::Lower(a) => {
                self.bump();
                Ok(ProofTerm::Var(a))
            }
            Tok::Sym("(") => {
                self.bump();
                let first = self.term()?;
                if self.is_sym(",") {
                    self.bump();
                    let second = self.term()?;
                    self.expect_sym(")")?;
                    return Ok(ProofTerm::pair(first, second));
                }
                self.expect_sym(")")?;
                Ok(first)
            }
            Tok::Sym("[") => {
                self.bump();
                let t = self.lower("an individual")?;
                self.expect_sym(",")?;
                let body = self.term()?;
                self.expect_sym("]")?;
                Ok(ProofTerm::witness(Individual::Var(t), body))
            }
            _ => Err(self.error(&[
                "a proof variable",
                "`(`",
                "`[`",
                "`fun`",
                "`case`",
                "`gen`",
                "`dest`",
                "`fst`",
                "`snd`",
                "`inl`",
                "`inr`",
            ])),
        }
    }
}

/// Parses a formula. Individuals come out as variables; see [`Context::resolve_formula`].
pub fn parse_formula(input: &str) -> Result<Formula, ParseError> {
    let mut parser = Parser::new(input)?;
    let formula = parser.formula()?;
    parser.finish()?;
    let mut used = BTreeSet::new();
    formula_names(&formula, &mut used);
    Ok(freshen_formula(&formula, &mut Vec::new(), &mut used))
}

pub fn parse_term(input: &str) -> Result<ProofTerm, ParseError> {
    let mut parser = Parser::new(input)?;
    let term = parser.term()?;
    parser.finish()?;
    let mut used = term.all_names();
    Ok(freshen_term(&term, &mut Scopes::default(), &mut used))
}

/// Parses a context file: `const c.`, `var x.` and `a : <formula>.` declarations
/// with `#` comments. Declarations are checked in order.
pub fn parse_context(input: &str) -> Result<Context, ParseError> {
    let mut parser = Parser::new(input)?;
    let mut ctx = Context::new();
    while !matches!(parser.peek(), Tok::Eof) {
        let start = parser.toks[parser.pos].clone();
        let declared = match (parser.peek().clone(), parser.peek_at(1).clone()) {
            (Tok::Lower(kw), Tok::Lower(name)) if &*kw == "const" || &*kw == "var" => {
                parser.bump();
                parser.bump();
                parser.expect_sym(".")?;
                if &*kw == "const" {
                    ctx.declare_const(name)
                } else {
                    ctx.declare_var(name)
                }
            }
            (Tok::Lower(a), Tok::Sym(":")) => {
                parser.bump();
                parser.bump();
                let raw = parser.formula()?;
                parser.expect_sym(".")?;
                let mut used = BTreeSet::new();
                formula_names(&raw, &mut used);
                let formula = ctx.resolve_formula(&freshen_formula(&raw, &mut Vec::new(), &mut used));
                ctx.assume(a, formula)
            }
            _ => return Err(parser.error(&["`const`", "`var`", "a hypothesis `name : formula.`"])),
        };
        declared.map_err(|err| ParseError {
            line: start.line,
            column: start.column,
            expected: Vec::new(),
            found: start.tok.to_string(),
            context: Some(err),
        })?;
    }
    Ok(ctx)
}

fn formula_names(formula: &Formula, out: &mut BTreeSet<Name>) {
    match formula {
        Formula::Atom(_, args) => out.extend(args.iter().map(|t| t.name().clone())),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
            formula_names(a, out);
            formula_names(b, out);
        }
        Formula::Forall(x, body) | Formula::Exists(x, body) => {
            out.insert(x.clone());
            formula_names(body, out);
        }
    }
}

/// Picks a replacement for a binder that shadows an enclosing one.
fn rebind(name: &Name, enclosing: &[Name], used: &mut BTreeSet<Name>) -> Name {
    if !enclosing.contains(name) {
        return name.clone();
    }
    let fresh = fresh_variant(name, |c| used.contains(c));
    used.insert(fresh.clone());
    fresh
}

fn freshen_formula(formula: &Formula, bound: &mut Vec<Name>, used: &mut BTreeSet<Name>) -> Formula {
    match formula {
        Formula::Atom(..) => formula.clone(),
        Formula::And(a, b) => Formula::and(freshen_formula(a, bound, used), freshen_formula(b, bound, used)),
        Formula::Or(a, b) => Formula::or(freshen_formula(a, bound, used), freshen_formula(b, bound, used)),
        Formula::Imp(a, b) => Formula::imp(freshen_formula(a, bound, used), freshen_formula(b, bound, used)),
        Formula::Forall(x, body) | Formula::Exists(x, body) => {
            let y = rebind(x, bound, used);
            let body = if &y == x { (**body).clone() } else { body.rename_ind(x, &y) };
            bound.push(y.clone());
            let body = freshen_formula(&body, bound, used);
            bound.pop();
            match formula {
                Formula::Forall(..) => Formula::forall(y, body),
                _ => Formula::exists(y, body),
            }
        }
    }
}

#[derive(Default)]
struct Scopes {
    proofs: Vec<Name>,
    inds: Vec<Name>,
}

fn freshen_proof_binder(
    a: &Name,
    body: &ProofTerm,
    scopes: &mut Scopes,
    used: &mut BTreeSet<Name>,
) -> (Name, ProofTerm) {
    let b = rebind(a, &scopes.proofs, used);
    let body = if &b == a { body.clone() } else { body.rename_proof(a, &b) };
    scopes.proofs.push(b.clone());
    let body = freshen_term(&body, scopes, used);
    scopes.proofs.pop();
    (b, body)
}

fn freshen_term(term: &ProofTerm, scopes: &mut Scopes, used: &mut BTreeSet<Name>) -> ProofTerm {
    let mut go = |p: &Arc<ProofTerm>, scopes: &mut Scopes| freshen_term(p, scopes, used);
    match term {
        ProofTerm::Var(_) => term.clone(),
        ProofTerm::Lam(a, body) => {
            let (a, body) = freshen_proof_binder(a, body, scopes, used);
            ProofTerm::lam(a, body)
        }
        ProofTerm::App(p, q) => ProofTerm::app(go(p, scopes), go(q, scopes)),
        ProofTerm::Pair(p, q) => ProofTerm::pair(go(p, scopes), go(q, scopes)),
        ProofTerm::Proj1(p) => ProofTerm::proj1(go(p, scopes)),
        ProofTerm::Proj2(p) => ProofTerm::proj2(go(p, scopes)),
        ProofTerm::Inj1(p) => ProofTerm::inj1(go(p, scopes)),
        ProofTerm::Inj2(p) => ProofTerm::inj2(go(p, scopes)),
        ProofTerm::Case(s, a1, q1, a2, q2) => {
            let s = freshen_term(s, scopes, used);
            let (a1, q1) = freshen_proof_binder(a1, q1, scopes, used);
            let (a2, q2) = freshen_proof_binder(a2, q2, scopes, used);
            ProofTerm::case(s, a1, q1, a2, q2)
        }
        ProofTerm::Gen(x, body) => {
            let y = rebind(x, &scopes.inds, used);
            let body = if &y == x { (**body).clone() } else { body.rename_ind(x, &y) };
            scopes.inds.push(y.clone());
            let body = freshen_term(&body, scopes, used);
            scopes.inds.pop();
            ProofTerm::gen(y, body)
        }
        ProofTerm::IApp(p, t) => ProofTerm::iapp(go(p, scopes), t.clone()),
        ProofTerm::Witness(t, p) => ProofTerm::witness(t.clone(), go(p, scopes)),
        ProofTerm::Dest(p, x, a, q) => {
            let p = freshen_term(p, scopes, used);
            let y = rebind(x, &scopes.inds, used);
            let q = if &y == x { (**q).clone() } else { q.rename_ind(x, &y) };
            scopes.inds.push(y.clone());
            let (a, q) = freshen_proof_binder(a, &q, scopes, used);
            scopes.inds.pop();
            ProofTerm::dest(p, y, a, q)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Formula {
        Formula::prop("X")
    }

    #[test]
    fn implication_binds_loosest() {
        let f = parse_formula("X -> Y \\/ Z").unwrap();
        assert_eq!(f, Formula::imp(x(), Formula::or(Formula::prop("Y"), Formula::prop("Z"))));
    }

    #[test]
    fn implication_right_associative() {
        let f = parse_formula("X -> X -> X").unwrap();
        assert_eq!(f, Formula::imp(x(), Formula::imp(x(), x())));
    }

    #[test]
    fn quantifier_scopes_maximally() {
        let f = parse_formula("forall x. P(x) -> P(x)").unwrap();
        let p = Formula::atom("P", [Individual::var("x")]);
        assert_eq!(f, Formula::forall("x", Formula::imp(p.clone(), p)));
    }

    #[test]
    fn case_example() {
        let t = parse_term("fun a => case a of inl a1 => inr a1 | inr a2 => inl a2").unwrap();
        let expected = ProofTerm::lam(
            "a",
            ProofTerm::case(
                ProofTerm::var("a"),
                "a1",
                ProofTerm::inj2(ProofTerm::var("a1")),
                "a2",
                ProofTerm::inj1(ProofTerm::var("a2")),
            ),
        );
        assert_eq!(t, expected);
    }

    #[test]
    fn individual_application_and_witness() {
        let t = parse_term("f [t] [s, a]").unwrap();
        let expected = ProofTerm::app(
            ProofTerm::iapp(ProofTerm::var("f"), Individual::var("t")),
            ProofTerm::witness(Individual::var("s"), ProofTerm::var("a")),
        );
        assert_eq!(t, expected);
    }

    #[test]
    fn dest_syntax() {
        let t = parse_term("dest e as [x, a] in [x, a]").unwrap();
        let expected = ProofTerm::dest(
            ProofTerm::var("e"),
            "x",
            "a",
            ProofTerm::witness(Individual::var("x"), ProofTerm::var("a")),
        );
        assert_eq!(t, expected);
    }

    #[test]
    fn shadowed_binders_are_freshened() {
        let t = parse_term("fun a => fun a => a").unwrap();
        assert_eq!(t, ProofTerm::lam("a", ProofTerm::lam("a0", ProofTerm::var("a0"))));
        // the fresh name must not capture an existing free a0
        let t = parse_term("fun a => fun a => a0").unwrap();
        assert_eq!(t, ProofTerm::lam("a", ProofTerm::lam("a1", ProofTerm::var("a0"))));
        let f = parse_formula("forall x. forall x. P(x)").unwrap();
        let inner = Formula::forall("x0", Formula::atom("P", [Individual::var("x0")]));
        assert_eq!(f, Formula::forall("x", inner));
    }

    #[test]
    fn error_reports_position_and_expectations() {
        let err = parse_formula("X -> /\\ Y").unwrap_err();
        assert_eq!((err.line, err.column), (1, 6));
        assert!(err.expected.iter().any(|e| e == "an atom"));
        let err = parse_term("fun a =>").unwrap_err();
        assert_eq!(err.found, "end of input");
    }

    #[test]
    fn context_file() {
        let src = "# signature\nconst c.\nvar y.\nh : forall x. P(x) -> Q(x, c).\nd : X \\/ Y. e : P(y).\n";
        let ctx = parse_context(src).unwrap();
        assert!(ctx.is_constant("c"));
        assert!(ctx.has_ind_var("y"));
        assert_eq!(ctx.hyps().len(), 3);
        let h = ctx.lookup("h").unwrap();
        assert_eq!(h.to_string(), "forall x. P(x) -> Q(x,c)");
        assert!(matches!(h, Formula::Forall(_, body) if body.constants().contains("c")));
    }

    #[test]
    fn context_errors_carry_location() {
        let err = parse_context("a : X.\na : Y.").unwrap_err();
        assert_eq!(err.line, 2);
        assert!(matches!(err.context, Some(ContextError::DuplicateHypothesis(_))));
        let err = parse_context("a : P(z).").unwrap_err();
        assert!(matches!(err.context, Some(ContextError::IllScoped { .. })));
    }
}
