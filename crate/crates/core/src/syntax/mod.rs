//! Individuals, formulas and proof terms of minimal predicate logic, plus the
//! typing contexts that double as worlds of the universal model.

mod alpha;
mod context;
mod parse;
mod print;
mod subst;

use std::collections::BTreeSet;
use std::sync::Arc;

pub use context::{Context, ContextError, NameSupply};
pub use parse::{parse_context, parse_formula, parse_term, ParseError};
pub use alpha::alpha_eq;
pub use subst::fresh_variant;

/// Identifiers are shared, immutable strings.
pub type Name = Arc<str>;

/// Words reserved by the concrete syntax.
pub const KEYWORDS: &[&str] = &[
    "fun", "gen", "case", "of", "inl", "inr", "fst", "snd", "dest", "as", "in", "forall", "exists",
];

/// A first-order individual: there are no function symbols.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Individual {
    Var(Name),
    Const(Name),
}

impl Individual {
    pub fn var(name: impl Into<Name>) -> Individual {
        Individual::Var(name.into())
    }

    pub fn constant(name: impl Into<Name>) -> Individual {
        Individual::Const(name.into())
    }

    pub fn name(&self) -> &Name {
        match self {
            Individual::Var(n) | Individual::Const(n) => n,
        }
    }

    pub fn as_var(&self) -> Option<&Name> {
        match self {
            Individual::Var(n) => Some(n),
            Individual::Const(_) => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    Atom(Name, Arc<[Individual]>),
    And(Arc<Formula>, Arc<Formula>),
    Or(Arc<Formula>, Arc<Formula>),
    Imp(Arc<Formula>, Arc<Formula>),
    Forall(Name, Arc<Formula>),
    Exists(Name, Arc<Formula>),
}

impl Formula {
    pub fn atom(name: impl Into<Name>, args: impl IntoIterator<Item = Individual>) -> Formula {
        Formula::Atom(name.into(), args.into_iter().collect())
    }

    /// A nullary atom such as `X`.
    pub fn prop(name: impl Into<Name>) -> Formula {
        Formula::Atom(name.into(), Arc::from(Vec::new()))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Arc::new(a), Arc::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Arc::new(a), Arc::new(b))
    }

    pub fn imp(a: Formula, b: Formula) -> Formula {
        Formula::Imp(Arc::new(a), Arc::new(b))
    }

    pub fn forall(x: impl Into<Name>, body: Formula) -> Formula {
        Formula::Forall(x.into(), Arc::new(body))
    }

    pub fn exists(x: impl Into<Name>, body: Formula) -> Formula {
        Formula::Exists(x.into(), Arc::new(body))
    }

    pub fn is_atomic(&self) -> bool {
        matches!(self, Formula::Atom(..))
    }

    pub fn free_ind_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_free_ind(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free_ind(&self, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
        match self {
            Formula::Atom(_, args) => {
                for arg in args.iter() {
                    if let Individual::Var(x) = arg {
                        if !bound.contains(x) {
                            out.insert(x.clone());
                        }
                    }
                }
            }
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                a.collect_free_ind(bound, out);
                b.collect_free_ind(bound, out);
            }
            Formula::Forall(x, body) | Formula::Exists(x, body) => {
                bound.push(x.clone());
                body.collect_free_ind(bound, out);
                bound.pop();
            }
        }
    }

    pub fn has_free_ind(&self, x: &str) -> bool {
        match self {
            Formula::Atom(_, args) => args.iter().any(|a| matches!(a, Individual::Var(v) if &**v == x)),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                a.has_free_ind(x) || b.has_free_ind(x)
            }
            Formula::Forall(y, body) | Formula::Exists(y, body) => &**y != x && body.has_free_ind(x),
        }
    }

    /// Constants mentioned anywhere in the formula.
    pub fn constants(&self) -> BTreeSet<Name> {
        fn go(f: &Formula, out: &mut BTreeSet<Name>) {
            match f {
                Formula::Atom(_, args) => {
                    for arg in args.iter() {
                        if let Individual::Const(c) = arg {
                            out.insert(c.clone());
                        }
                    }
                }
                Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                    go(a, out);
                    go(b, out);
                }
                Formula::Forall(_, body) | Formula::Exists(_, body) => go(body, out),
            }
        }
        let mut out = BTreeSet::new();
        go(self, &mut out);
        out
    }

    /// Number of connectives, quantifiers and atoms.
    pub fn size(&self) -> usize {
        match self {
            Formula::Atom(..) => 1,
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => 1 + a.size() + b.size(),
            Formula::Forall(_, body) | Formula::Exists(_, body) => 1 + body.size(),
        }
    }
}

/// Untyped natural-deduction proof terms.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ProofTerm {
    Var(Name),
    Lam(Name, Arc<ProofTerm>),
    App(Arc<ProofTerm>, Arc<ProofTerm>),
    Pair(Arc<ProofTerm>, Arc<ProofTerm>),
    Proj1(Arc<ProofTerm>),
    Proj2(Arc<ProofTerm>),
    Inj1(Arc<ProofTerm>),
    Inj2(Arc<ProofTerm>),
    /// `case p of inl a1 => q1 | inr a2 => q2`
    Case(Arc<ProofTerm>, Name, Arc<ProofTerm>, Name, Arc<ProofTerm>),
    /// Universal introduction `gen x => p`.
    Gen(Name, Arc<ProofTerm>),
    /// Universal elimination `p [t]`.
    IApp(Arc<ProofTerm>, Individual),
    /// Existential introduction `[t, p]`.
    Witness(Individual, Arc<ProofTerm>),
    /// Existential elimination `dest p as [x, a] in q`.
    Dest(Arc<ProofTerm>, Name, Name, Arc<ProofTerm>),
}

impl ProofTerm {
    pub fn var(a: impl Into<Name>) -> ProofTerm {
        ProofTerm::Var(a.into())
    }

    pub fn lam(a: impl Into<Name>, body: ProofTerm) -> ProofTerm {
        ProofTerm::Lam(a.into(), Arc::new(body))
    }

    pub fn app(f: ProofTerm, x: ProofTerm) -> ProofTerm {
        ProofTerm::App(Arc::new(f), Arc::new(x))
    }

    pub fn pair(l: ProofTerm, r: ProofTerm) -> ProofTerm {
        ProofTerm::Pair(Arc::new(l), Arc::new(r))
    }

    pub fn proj1(p: ProofTerm) -> ProofTerm {
        ProofTerm::Proj1(Arc::new(p))
    }

    pub fn proj2(p: ProofTerm) -> ProofTerm {
        ProofTerm::Proj2(Arc::new(p))
    }

    pub fn inj1(p: ProofTerm) -> ProofTerm {
        ProofTerm::Inj1(Arc::new(p))
    }

    pub fn inj2(p: ProofTerm) -> ProofTerm {
        ProofTerm::Inj2(Arc::new(p))
    }

    pub fn case(
        scrutinee: ProofTerm,
        a1: impl Into<Name>,
        q1: ProofTerm,
        a2: impl Into<Name>,
        q2: ProofTerm,
    ) -> ProofTerm {
        ProofTerm::Case(Arc::new(scrutinee), a1.into(), Arc::new(q1), a2.into(), Arc::new(q2))
    }

    pub fn gen(x: impl Into<Name>, body: ProofTerm) -> ProofTerm {
        ProofTerm::Gen(x.into(), Arc::new(body))
    }

    pub fn iapp(p: ProofTerm, t: Individual) -> ProofTerm {
        ProofTerm::IApp(Arc::new(p), t)
    }

    pub fn witness(t: Individual, p: ProofTerm) -> ProofTerm {
        ProofTerm::Witness(t, Arc::new(p))
    }

    pub fn dest(p: ProofTerm, x: impl Into<Name>, a: impl Into<Name>, body: ProofTerm) -> ProofTerm {
        ProofTerm::Dest(Arc::new(p), x.into(), a.into(), Arc::new(body))
    }

    /// Number of AST nodes, counting every variable occurrence.
    pub fn size(&self) -> usize {
        match self {
            ProofTerm::Var(_) => 1,
            ProofTerm::Lam(_, p)
            | ProofTerm::Proj1(p)
            | ProofTerm::Proj2(p)
            | ProofTerm::Inj1(p)
            | ProofTerm::Inj2(p)
            | ProofTerm::Gen(_, p)
            | ProofTerm::IApp(p, _)
            | ProofTerm::Witness(_, p) => 1 + p.size(),
            ProofTerm::App(p, q) | ProofTerm::Pair(p, q) | ProofTerm::Dest(p, _, _, q) => {
                1 + p.size() + q.size()
            }
            ProofTerm::Case(s, _, q1, _, q2) => 1 + s.size() + q1.size() + q2.size(),
        }
    }

    pub fn free_proof_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_free_proof(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free_proof(&self, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
        match self {
            ProofTerm::Var(a) => {
                if !bound.contains(a) {
                    out.insert(a.clone());
                }
            }
            ProofTerm::Lam(a, p) => {
                bound.push(a.clone());
                p.collect_free_proof(bound, out);
                bound.pop();
            }
            ProofTerm::App(p, q) | ProofTerm::Pair(p, q) => {
                p.collect_free_proof(bound, out);
                q.collect_free_proof(bound, out);
            }
            ProofTerm::Proj1(p)
            | ProofTerm::Proj2(p)
            | ProofTerm::Inj1(p)
            | ProofTerm::Inj2(p)
            | ProofTerm::Gen(_, p)
            | ProofTerm::IApp(p, _)
            | ProofTerm::Witness(_, p) => p.collect_free_proof(bound, out),
            ProofTerm::Case(s, a1, q1, a2, q2) => {
                s.collect_free_proof(bound, out);
                bound.push(a1.clone());
                q1.collect_free_proof(bound, out);
                bound.pop();
                bound.push(a2.clone());
                q2.collect_free_proof(bound, out);
                bound.pop();
            }
            ProofTerm::Dest(p, _, a, q) => {
                p.collect_free_proof(bound, out);
                bound.push(a.clone());
                q.collect_free_proof(bound, out);
                bound.pop();
            }
        }
    }

    pub fn free_ind_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_free_ind(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free_ind(&self, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
        let mut note = |t: &Individual, bound: &Vec<Name>| {
            if let Individual::Var(x) = t {
                if !bound.contains(x) {
                    out.insert(x.clone());
                }
            }
        };
        match self {
            ProofTerm::Var(_) => {}
            ProofTerm::Lam(_, p)
            | ProofTerm::Proj1(p)
            | ProofTerm::Proj2(p)
            | ProofTerm::Inj1(p)
            | ProofTerm::Inj2(p) => p.collect_free_ind(bound, out),
            ProofTerm::App(p, q) | ProofTerm::Pair(p, q) => {
                p.collect_free_ind(bound, out);
                q.collect_free_ind(bound, out);
            }
            ProofTerm::Case(s, _, q1, _, q2) => {
                s.collect_free_ind(bound, out);
                q1.collect_free_ind(bound, out);
                q2.collect_free_ind(bound, out);
            }
            ProofTerm::Gen(x, p) => {
                bound.push(x.clone());
                p.collect_free_ind(bound, out);
                bound.pop();
            }
            ProofTerm::IApp(p, t) => {
                note(t, bound);
                p.collect_free_ind(bound, out);
            }
            ProofTerm::Witness(t, p) => {
                note(t, bound);
                p.collect_free_ind(bound, out);
            }
            ProofTerm::Dest(p, x, _, q) => {
                p.collect_free_ind(bound, out);
                bound.push(x.clone());
                q.collect_free_ind(bound, out);
                bound.pop();
            }
        }
    }

    /// Every identifier occurring in the term, bound or free, in either namespace.
    pub fn all_names(&self) -> BTreeSet<Name> {
        fn go(p: &ProofTerm, out: &mut BTreeSet<Name>) {
            match p {
                ProofTerm::Var(a) => {
                    out.insert(a.clone());
                }
                ProofTerm::Lam(a, p) | ProofTerm::Gen(a, p) => {
                    out.insert(a.clone());
                    go(p, out);
                }
                ProofTerm::App(p, q) | ProofTerm::Pair(p, q) => {
                    go(p, out);
                    go(q, out);
                }
                ProofTerm::Proj1(p) | ProofTerm::Proj2(p) | ProofTerm::Inj1(p) | ProofTerm::Inj2(p) => {
                    go(p, out)
                }
                ProofTerm::Case(s, a1, q1, a2, q2) => {
                    out.insert(a1.clone());
                    out.insert(a2.clone());
                    go(s, out);
                    go(q1, out);
                    go(q2, out);
                }
                ProofTerm::IApp(p, t) | ProofTerm::Witness(t, p) => {
                    out.insert(t.name().clone());
                    go(p, out);
                }
                ProofTerm::Dest(p, x, a, q) => {
                    out.insert(x.clone());
                    out.insert(a.clone());
                    go(p, out);
                    go(q, out);
                }
            }
        }
        let mut out = BTreeSet::new();
        go(self, &mut out);
        out
    }
}
