use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use super::{Formula, Individual, Name, ProofTerm};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ContextError {
    #[error("hypothesis `{0}` is declared twice")]
    DuplicateHypothesis(Name),
    #[error("individual `{0}` is declared twice")]
    DuplicateIndividual(Name),
    #[error("formula `{formula}` of hypothesis `{name}` mentions undeclared individuals")]
    IllScoped { name: Name, formula: Formula },
}

/// A typing context, which is also a world of the universal model.
///
/// Worlds are ordered by extension: `w <= w'` when the hypotheses of `w` are a
/// prefix of those of `w'` and every individual of `w` is available in `w'`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Context {
    hyps: Vec<(Name, Formula)>,
    ind_vars: Vec<Name>,
    constants: BTreeSet<Name>,
}

impl Context {
    pub fn new() -> Context {
        Context::default()
    }

    pub fn declare_const(&mut self, c: impl Into<Name>) -> Result<(), ContextError> {
        let c = c.into();
        if self.constants.contains(&c) || self.ind_vars.contains(&c) {
            return Err(ContextError::DuplicateIndividual(c));
        }
        self.constants.insert(c);
        Ok(())
    }

    pub fn declare_var(&mut self, x: impl Into<Name>) -> Result<(), ContextError> {
        let x = x.into();
        if self.constants.contains(&x) || self.ind_vars.contains(&x) {
            return Err(ContextError::DuplicateIndividual(x));
        }
        self.ind_vars.push(x);
        Ok(())
    }

    /// Adds a hypothesis after checking the name is new and the formula is well scoped.
    pub fn assume(&mut self, a: impl Into<Name>, formula: Formula) -> Result<(), ContextError> {
        let a = a.into();
        if self.lookup(&a).is_some() {
            return Err(ContextError::DuplicateHypothesis(a));
        }
        if !self.is_well_scoped(&formula) {
            return Err(ContextError::IllScoped { name: a, formula });
        }
        self.hyps.push((a, formula));
        Ok(())
    }

    /// Builder-style [`Context::assume`] for tests and fixtures; panics on invalid input.
    pub fn with(mut self, a: &str, formula: Formula) -> Context {
        self.assume(a, formula).expect("invalid hypothesis");
        self
    }

    /// The world extended by one hypothesis. An existing hypothesis of the same name is shadowed.
    pub fn extend(&self, a: Name, formula: Formula) -> Context {
        let mut next = self.clone();
        next.hyps.push((a, formula));
        next
    }

    /// The world extended by one individual variable.
    pub fn extend_ind(&self, x: Name) -> Context {
        let mut next = self.clone();
        if !next.ind_vars.contains(&x) {
            next.ind_vars.push(x);
        }
        next
    }

    pub fn lookup(&self, a: &str) -> Option<&Formula> {
        self.hyps.iter().rev().find(|(b, _)| &**b == a).map(|(_, f)| f)
    }

    pub fn hyps(&self) -> &[(Name, Formula)] {
        &self.hyps
    }

    pub fn ind_vars(&self) -> &[Name] {
        &self.ind_vars
    }

    pub fn constants(&self) -> &BTreeSet<Name> {
        &self.constants
    }

    pub fn has_hypotheses(&self) -> bool {
        !self.hyps.is_empty()
    }

    pub fn has_ind_var(&self, x: &str) -> bool {
        self.ind_vars.iter().any(|y| &**y == x)
    }

    pub fn is_constant(&self, c: &str) -> bool {
        self.constants.contains(c)
    }

    pub fn individual_in_scope(&self, t: &Individual) -> bool {
        match t {
            Individual::Var(x) => self.has_ind_var(x),
            Individual::Const(c) => self.is_constant(c),
        }
    }

    /// The domain of quantification: constants first, then individual variables.
    pub fn domain(&self) -> Vec<Individual> {
        self.constants
            .iter()
            .cloned()
            .map(Individual::Const)
            .chain(self.ind_vars.iter().cloned().map(Individual::Var))
            .collect()
    }

    pub fn is_well_scoped(&self, formula: &Formula) -> bool {
        formula.free_ind_vars().iter().all(|x| self.has_ind_var(x))
            && formula.constants().iter().all(|c| self.is_constant(c))
    }

    /// `self <= other` in the world order.
    pub fn le(&self, other: &Context) -> bool {
        self.hyps.len() <= other.hyps.len()
            && self.hyps.iter().zip(other.hyps.iter()).all(|(l, r)| l.0 == r.0 && l.1 == r.1)
            && self.ind_vars.iter().all(|x| other.has_ind_var(x))
            && self.constants.is_subset(&other.constants)
    }

    /// Every identifier the context uses, in either namespace.
    pub fn names(&self) -> impl Iterator<Item = &Name> {
        self.hyps
            .iter()
            .map(|(a, _)| a)
            .chain(self.ind_vars.iter())
            .chain(self.constants.iter())
    }

    /// Reads free individual variables that name declared constants as constants.
    pub fn resolve_formula(&self, formula: &Formula) -> Formula {
        self.resolve_formula_in(formula, &mut Vec::new())
    }

    fn resolve_individual(&self, t: &Individual, bound: &[Name]) -> Individual {
        match t {
            Individual::Var(x) if !bound.contains(x) && !self.has_ind_var(x) && self.is_constant(x) => {
                Individual::Const(x.clone())
            }
            _ => t.clone(),
        }
    }

    fn resolve_formula_in(&self, formula: &Formula, bound: &mut Vec<Name>) -> Formula {
        match formula {
            Formula::Atom(p, args) => {
                Formula::Atom(p.clone(), args.iter().map(|t| self.resolve_individual(t, bound)).collect())
            }
            Formula::And(a, b) => Formula::and(self.resolve_formula_in(a, bound), self.resolve_formula_in(b, bound)),
            Formula::Or(a, b) => Formula::or(self.resolve_formula_in(a, bound), self.resolve_formula_in(b, bound)),
            Formula::Imp(a, b) => Formula::imp(self.resolve_formula_in(a, bound), self.resolve_formula_in(b, bound)),
            Formula::Forall(x, body) => {
                bound.push(x.clone());
                let body = self.resolve_formula_in(body, bound);
                bound.pop();
                Formula::forall(x.clone(), body)
            }
            Formula::Exists(x, body) => {
                bound.push(x.clone());
                let body = self.resolve_formula_in(body, bound);
                bound.pop();
                Formula::exists(x.clone(), body)
            }
        }
    }

    /// Term analogue of [`Context::resolve_formula`].
    pub fn resolve_term(&self, term: &ProofTerm) -> ProofTerm {
        self.resolve_term_in(term, &mut Vec::new())
    }

    fn resolve_term_in(&self, term: &ProofTerm, bound: &mut Vec<Name>) -> ProofTerm {
        let go = |p: &Arc<ProofTerm>, bound: &mut Vec<Name>| Arc::new(self.resolve_term_in(p, bound));
        match term {
            ProofTerm::Var(_) => term.clone(),
            ProofTerm::Lam(a, p) => ProofTerm::Lam(a.clone(), go(p, bound)),
            ProofTerm::App(p, q) => ProofTerm::App(go(p, bound), go(q, bound)),
            ProofTerm::Pair(p, q) => ProofTerm::Pair(go(p, bound), go(q, bound)),
            ProofTerm::Proj1(p) => ProofTerm::Proj1(go(p, bound)),
            ProofTerm::Proj2(p) => ProofTerm::Proj2(go(p, bound)),
            ProofTerm::Inj1(p) => ProofTerm::Inj1(go(p, bound)),
            ProofTerm::Inj2(p) => ProofTerm::Inj2(go(p, bound)),
            ProofTerm::Case(s, a1, q1, a2, q2) => {
                ProofTerm::Case(go(s, bound), a1.clone(), go(q1, bound), a2.clone(), go(q2, bound))
            }
            ProofTerm::Gen(x, p) => {
                bound.push(x.clone());
                let p = go(p, bound);
                bound.pop();
                ProofTerm::Gen(x.clone(), p)
            }
            ProofTerm::IApp(p, t) => ProofTerm::IApp(go(p, bound), self.resolve_individual(t, bound)),
            ProofTerm::Witness(t, p) => ProofTerm::Witness(self.resolve_individual(t, bound), go(p, bound)),
            ProofTerm::Dest(p, x, a, q) => {
                let p = go(p, bound);
                bound.push(x.clone());
                let q = go(q, bound);
                bound.pop();
                ProofTerm::Dest(p, x.clone(), a.clone(), q)
            }
        }
    }
}

impl fmt::Display for Context {
    /// Renders the context in the context-file format.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.constants {
            writeln!(f, "const {c}.")?;
        }
        for x in &self.ind_vars {
            writeln!(f, "var {x}.")?;
        }
        for (a, formula) in &self.hyps {
            writeln!(f, "{a} : {formula}.")?;
        }
        Ok(())
    }
}

/// Deterministic job-local supply of fresh names: `a0, a1, ...` for proofs and
/// `x0, x1, ...` for individuals, skipping anything already reserved.
#[derive(Clone, Debug, Default)]
pub struct NameSupply {
    next_proof: usize,
    next_ind: usize,
    taken: HashSet<Name>,
}

impl NameSupply {
    pub fn new() -> NameSupply {
        NameSupply::default()
    }

    /// A supply whose names never collide with those of `ctx`.
    pub fn for_context(ctx: &Context) -> NameSupply {
        let mut supply = NameSupply::new();
        supply.reserve(ctx.names().cloned());
        supply
    }

    pub fn reserve(&mut self, names: impl IntoIterator<Item = Name>) {
        self.taken.extend(names);
    }

    pub fn fresh_proof(&mut self) -> Name {
        Self::next(&mut self.next_proof, "a", &mut self.taken)
    }

    pub fn fresh_ind(&mut self) -> Name {
        Self::next(&mut self.next_ind, "x", &mut self.taken)
    }

    fn next(counter: &mut usize, prefix: &str, taken: &mut HashSet<Name>) -> Name {
        loop {
            let cand: Name = Name::from(format!("{prefix}{counter}"));
            *counter += 1;
            if taken.insert(cand.clone()) {
                return cand;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn supply_skips_context_names() {
        let ctx = Context::new().with("a0", Formula::prop("X")).with("a2", Formula::prop("Y"));
        let mut supply = NameSupply::for_context(&ctx);
        assert_eq!(&*supply.fresh_proof(), "a1");
        assert_eq!(&*supply.fresh_proof(), "a3");
        assert_eq!(&*supply.fresh_ind(), "x0");
    }

    #[test]
    fn world_order_is_prefix_and_subset() {
        let base = Context::new().with("c", Formula::prop("X"));
        let bigger = base.extend("d".into(), Formula::prop("Y")).extend_ind("x0".into());
        assert!(base.le(&bigger));
        assert!(!bigger.le(&base));
        let other = Context::new().with("d", Formula::prop("Y"));
        assert!(!base.le(&other));
    }

    #[test]
    fn duplicate_hypothesis_rejected() {
        let mut ctx = Context::new();
        ctx.assume("a", Formula::prop("X")).unwrap();
        assert_eq!(ctx.assume("a", Formula::prop("Y")), Err(ContextError::DuplicateHypothesis("a".into())));
    }

    #[test]
    fn ill_scoped_hypothesis_rejected() {
        let mut ctx = Context::new();
        let f = Formula::atom("P", [Individual::var("x")]);
        assert!(matches!(ctx.assume("a", f), Err(ContextError::IllScoped { .. })));
    }

    #[test]
    fn resolution_turns_declared_names_into_constants() {
        let mut ctx = Context::new();
        ctx.declare_const("c").unwrap();
        let raw = Formula::and(
            Formula::atom("P", [Individual::var("c")]),
            Formula::forall("c", Formula::atom("P", [Individual::var("c")])),
        );
        let resolved = ctx.resolve_formula(&raw);
        let expected = Formula::and(
            Formula::atom("P", [Individual::constant("c")]),
            Formula::forall("c", Formula::atom("P", [Individual::var("c")])),
        );
        assert_eq!(resolved, expected);
    }
}
