//! Type checking for the natural-deduction proof terms, plus the normal and
//! neutral term classifiers.
//!
//! Checking is bidirectional: introductions are checked against the goal and
//! neutral eliminations infer their formula. Terms containing redexes need more
//! than that (the formula of `A` in `(fun a => a) q` appears nowhere in the
//! term), so the checker works over formulas with metavariables and solves them
//! by first-order unification. Metavariables record the individual variables in
//! scope where they were created, which keeps the eigenvariable conditions of
//! the quantifier rules intact.

use std::collections::BTreeSet;
use std::rc::Rc;
use std::sync::Arc;

use thiserror::Error;

use crate::syntax::{fresh_variant, Context, Formula, Individual, Name, ProofTerm};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TypeError {
    #[error("unbound proof variable `{0}`")]
    UnboundVariable(Name),
    #[error("individual `{0}` is not in scope")]
    UnboundIndividual(Individual),
    #[error("goal formula `{0}` mentions undeclared individuals")]
    IllScopedGoal(Formula),
    #[error("`{term}` has the wrong shape: expected {expected}, found `{actual}`")]
    ShapeMismatch { term: ProofTerm, expected: String, actual: String },
    #[error("`{term}` has formula `{actual}` but `{expected}` was expected")]
    Mismatch { term: ProofTerm, expected: String, actual: String },
    #[error("branches of `{term}` disagree: `{left}` versus `{right}`")]
    BranchMismatch { term: ProofTerm, left: String, right: String },
    #[error("individual `{var}` escapes its scope in `{term}`")]
    EigenvariableEscape { term: ProofTerm, var: Name },
    #[error("`{0}` is not a neutral term")]
    NotNeutral(ProofTerm),
    #[error("cannot determine a formula for `{0}`")]
    Ambiguous(ProofTerm),
}

/// Checks `ctx |- p : goal`.
pub fn check(ctx: &Context, p: &ProofTerm, goal: &Formula) -> Result<(), TypeError> {
    if !ctx.is_well_scoped(goal) {
        return Err(TypeError::IllScopedGoal(goal.clone()));
    }
    let mut elab = Elab::new(ctx, p);
    let goal = elab.from_formula(goal);
    elab.check(p, &goal)
}

/// Infers the formula of a neutral term.
pub fn infer_neutral(ctx: &Context, e: &ProofTerm) -> Result<Formula, TypeError> {
    if !is_neutral(e) {
        return Err(TypeError::NotNeutral(e.clone()));
    }
    let mut elab = Elab::new(ctx, e);
    let ty = elab.infer(e)?;
    elab.to_formula(&ty).ok_or_else(|| TypeError::Ambiguous(e.clone()))
}

/// Membership in the grammar of normal terms:
/// `r ::= e | fun a => r | inl r | inr r | (r, r) | gen x => r | [t, r]`.
pub fn is_normal(p: &ProofTerm) -> bool {
    match p {
        ProofTerm::Lam(_, r) | ProofTerm::Inj1(r) | ProofTerm::Inj2(r) | ProofTerm::Gen(_, r) => is_normal(r),
        ProofTerm::Witness(_, r) => is_normal(r),
        ProofTerm::Pair(r1, r2) => is_normal(r1) && is_normal(r2),
        _ => is_neutral(p),
    }
}

/// Membership in the grammar of neutral terms:
/// `e ::= a | e r | fst e | snd e | e [t] | case e of ... | dest e as ... in r`.
pub fn is_neutral(p: &ProofTerm) -> bool {
    match p {
        ProofTerm::Var(_) => true,
        ProofTerm::App(e, r) => is_neutral(e) && is_normal(r),
        ProofTerm::Proj1(e) | ProofTerm::Proj2(e) | ProofTerm::IApp(e, _) => is_neutral(e),
        ProofTerm::Case(e, _, r1, _, r2) => is_neutral(e) && is_normal(r1) && is_normal(r2),
        ProofTerm::Dest(e, _, _, r) => is_neutral(e) && is_normal(r),
        _ => false,
    }
}

#[derive(Debug)]
enum Ty {
    Atom(Name, Arc<[Individual]>),
    And(Rc<Ty>, Rc<Ty>),
    Or(Rc<Ty>, Rc<Ty>),
    Imp(Rc<Ty>, Rc<Ty>),
    Forall(Name, Rc<Ty>),
    Exists(Name, Rc<Ty>),
    Meta(usize),
}

#[derive(Clone)]
struct Meta {
    solution: Option<Rc<Ty>>,
    /// Number of individual variables (from the bottom of the scope stack) the solution may mention.
    depth: usize,
}

#[derive(Clone)]
struct Snapshot {
    metas: Vec<Meta>,
    hyps: usize,
    inds: usize,
}

struct Elab<'c> {
    ctx: &'c Context,
    hyps: Vec<(Name, Rc<Ty>)>,
    inds: Vec<Name>,
    metas: Vec<Meta>,
    used: BTreeSet<Name>,
}

impl<'c> Elab<'c> {
    fn new(ctx: &'c Context, p: &ProofTerm) -> Elab<'c> {
        let mut used = p.all_names();
        used.extend(ctx.names().cloned());
        let mut elab = Elab { ctx, hyps: Vec::new(), inds: ctx.ind_vars().to_vec(), metas: Vec::new(), used };
        elab.hyps = ctx.hyps().iter().map(|(a, f)| (a.clone(), elab.from_formula(f))).collect();
        elab
    }

    fn fresh(&mut self, base: &str) -> Name {
        let used = &self.used;
        let name = fresh_variant(base, |c| used.contains(c));
        self.used.insert(name.clone());
        name
    }

    fn new_meta(&mut self) -> Rc<Ty> {
        self.metas.push(Meta { solution: None, depth: self.inds.len() });
        Rc::new(Ty::Meta(self.metas.len() - 1))
    }

    fn snapshot(&self) -> Snapshot {
        Snapshot { metas: self.metas.clone(), hyps: self.hyps.len(), inds: self.inds.len() }
    }

    fn restore(&mut self, snap: Snapshot) {
        self.metas = snap.metas;
        self.hyps.truncate(snap.hyps);
        self.inds.truncate(snap.inds);
    }

    fn from_formula(&mut self, f: &Formula) -> Rc<Ty> {
        Rc::new(match f {
            Formula::Atom(p, args) => Ty::Atom(p.clone(), args.clone()),
            Formula::And(a, b) => Ty::And(self.from_formula(a), self.from_formula(b)),
            Formula::Or(a, b) => Ty::Or(self.from_formula(a), self.from_formula(b)),
            Formula::Imp(a, b) => Ty::Imp(self.from_formula(a), self.from_formula(b)),
            Formula::Forall(x, body) => Ty::Forall(x.clone(), self.from_formula(body)),
            Formula::Exists(x, body) => Ty::Exists(x.clone(), self.from_formula(body)),
        })
    }

    /// Fully resolved formula, or `None` if an unsolved metavariable remains.
    fn to_formula(&self, ty: &Rc<Ty>) -> Option<Formula> {
        Some(match &*self.whnf(ty) {
            Ty::Atom(p, args) => Formula::Atom(p.clone(), args.clone()),
            Ty::And(a, b) => Formula::and(self.to_formula(a)?, self.to_formula(b)?),
            Ty::Or(a, b) => Formula::or(self.to_formula(a)?, self.to_formula(b)?),
            Ty::Imp(a, b) => Formula::imp(self.to_formula(a)?, self.to_formula(b)?),
            Ty::Forall(x, body) => Formula::forall(x.clone(), self.to_formula(body)?),
            Ty::Exists(x, body) => Formula::exists(x.clone(), self.to_formula(body)?),
            Ty::Meta(_) => return None,
        })
    }

    /// Renders a formula for error messages, showing unsolved metavariables as `?n`.
    fn show(&self, ty: &Rc<Ty>) -> String {
        self.display(ty).to_string()
    }

    fn display(&self, ty: &Rc<Ty>) -> Formula {
        match &*self.whnf(ty) {
            Ty::Atom(p, args) => Formula::Atom(p.clone(), args.clone()),
            Ty::And(a, b) => Formula::and(self.display(a), self.display(b)),
            Ty::Or(a, b) => Formula::or(self.display(a), self.display(b)),
            Ty::Imp(a, b) => Formula::imp(self.display(a), self.display(b)),
            Ty::Forall(x, body) => Formula::forall(x.clone(), self.display(body)),
            Ty::Exists(x, body) => Formula::exists(x.clone(), self.display(body)),
            Ty::Meta(m) => Formula::prop(format!("?{m}")),
        }
    }

    fn whnf(&self, ty: &Rc<Ty>) -> Rc<Ty> {
        let mut ty = ty.clone();
        while let Ty::Meta(m) = &*ty {
            match &self.metas[*m].solution {
                Some(sol) => ty = sol.clone(),
                None => break,
            }
        }
        ty
    }

    /// Resolves every solved metavariable.
    fn zonk(&self, ty: &Rc<Ty>) -> Rc<Ty> {
        let ty = self.whnf(ty);
        match &*ty {
            Ty::Atom(..) | Ty::Meta(_) => ty,
            Ty::And(a, b) => Rc::new(Ty::And(self.zonk(a), self.zonk(b))),
            Ty::Or(a, b) => Rc::new(Ty::Or(self.zonk(a), self.zonk(b))),
            Ty::Imp(a, b) => Rc::new(Ty::Imp(self.zonk(a), self.zonk(b))),
            Ty::Forall(x, body) => Rc::new(Ty::Forall(x.clone(), self.zonk(body))),
            Ty::Exists(x, body) => Rc::new(Ty::Exists(x.clone(), self.zonk(body))),
        }
    }

    fn mentions(&self, ty: &Rc<Ty>, x: &str) -> bool {
        match &*self.whnf(ty) {
            Ty::Atom(_, args) => args.iter().any(|t| matches!(t, Individual::Var(v) if &**v == x)),
            Ty::And(a, b) | Ty::Or(a, b) | Ty::Imp(a, b) => self.mentions(a, x) || self.mentions(b, x),
            Ty::Forall(y, body) | Ty::Exists(y, body) => &**y != x && self.mentions(body, x),
            Ty::Meta(_) => false,
        }
    }

    /// `ty[t/x]`. Unsolved metavariables never mention quantifier-bound names, so
    /// substitution passes through them.
    fn subst(&mut self, ty: &Rc<Ty>, x: &str, t: &Individual) -> Rc<Ty> {
        let ty = self.whnf(ty);
        let go = |elab: &mut Self, a: &Rc<Ty>| elab.subst(a, x, t);
        match &*ty {
            Ty::Atom(p, args) => {
                let args: Arc<[Individual]> = args
                    .iter()
                    .map(|a| match a {
                        Individual::Var(v) if &**v == x => t.clone(),
                        _ => a.clone(),
                    })
                    .collect();
                Rc::new(Ty::Atom(p.clone(), args))
            }
            Ty::And(a, b) => Rc::new(Ty::And(go(self, a), go(self, b))),
            Ty::Or(a, b) => Rc::new(Ty::Or(go(self, a), go(self, b))),
            Ty::Imp(a, b) => Rc::new(Ty::Imp(go(self, a), go(self, b))),
            Ty::Forall(y, body) | Ty::Exists(y, body) => {
                let (y, body) = if &**y == x {
                    (y.clone(), body.clone())
                } else if t.as_var() == Some(y) {
                    let z = self.fresh(y);
                    let renamed = self.subst(body, y, &Individual::Var(z.clone()));
                    (z, self.subst(&renamed, x, t))
                } else {
                    (y.clone(), self.subst(body, x, t))
                };
                Rc::new(match &*ty {
                    Ty::Forall(..) => Ty::Forall(y, body),
                    _ => Ty::Exists(y, body),
                })
            }
            Ty::Meta(_) => ty.clone(),
        }
    }

    fn free_inds(&self, ty: &Rc<Ty>, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>, metas: &mut Vec<usize>) {
        match &*self.whnf(ty) {
            Ty::Atom(_, args) => {
                for arg in args.iter() {
                    if let Individual::Var(v) = arg {
                        if !bound.contains(v) {
                            out.insert(v.clone());
                        }
                    }
                }
            }
            Ty::And(a, b) | Ty::Or(a, b) | Ty::Imp(a, b) => {
                self.free_inds(a, bound, out, metas);
                self.free_inds(b, bound, out, metas);
            }
            Ty::Forall(y, body) | Ty::Exists(y, body) => {
                bound.push(y.clone());
                self.free_inds(body, bound, out, metas);
                bound.pop();
            }
            Ty::Meta(m) => metas.push(*m),
        }
    }

    fn solve(&mut self, m: usize, ty: &Rc<Ty>) -> Result<(), ()> {
        let ty = self.zonk(ty);
        let (mut free, mut inner) = (BTreeSet::new(), Vec::new());
        self.free_inds(&ty, &mut Vec::new(), &mut free, &mut inner);
        if inner.contains(&m) {
            return Err(());
        }
        let depth = self.metas[m].depth;
        if free.iter().any(|x| !self.inds[..depth].contains(x)) {
            return Err(());
        }
        for n in inner {
            self.metas[n].depth = self.metas[n].depth.min(depth);
        }
        self.metas[m].solution = Some(ty);
        Ok(())
    }

    fn unify(&mut self, l: &Rc<Ty>, r: &Rc<Ty>) -> Result<(), ()> {
        let (l, r) = (self.whnf(l), self.whnf(r));
        match (&*l, &*r) {
            (Ty::Meta(m), Ty::Meta(n)) if m == n => Ok(()),
            (Ty::Meta(m), _) => self.solve(*m, &r),
            (_, Ty::Meta(n)) => self.solve(*n, &l),
            (Ty::Atom(p, xs), Ty::Atom(q, ys)) if p == q && xs == ys => Ok(()),
            (Ty::And(a, b), Ty::And(c, d)) | (Ty::Or(a, b), Ty::Or(c, d)) | (Ty::Imp(a, b), Ty::Imp(c, d)) => {
                self.unify(a, c)?;
                self.unify(b, d)
            }
            (Ty::Forall(x, a), Ty::Forall(y, b)) | (Ty::Exists(x, a), Ty::Exists(y, b)) => {
                let z = Individual::Var(self.fresh("z"));
                let a = self.subst(a, x, &z);
                let b = self.subst(b, y, &z);
                self.unify(&a, &b)
            }
            _ => Err(()),
        }
    }

    fn expect(&mut self, term: &ProofTerm, actual: &Rc<Ty>, expected: &Rc<Ty>) -> Result<(), TypeError> {
        self.unify(actual, expected).map_err(|()| TypeError::Mismatch {
            term: term.clone(),
            expected: self.show(expected),
            actual: self.show(actual),
        })
    }

    fn shape_error(&self, term: &ProofTerm, expected: &str, actual: &Rc<Ty>) -> TypeError {
        TypeError::ShapeMismatch { term: term.clone(), expected: expected.to_string(), actual: self.show(actual) }
    }

    fn lookup(&self, a: &Name) -> Result<Rc<Ty>, TypeError> {
        self.hyps
            .iter()
            .rev()
            .find(|(b, _)| b == a)
            .map(|(_, ty)| ty.clone())
            .ok_or_else(|| TypeError::UnboundVariable(a.clone()))
    }

    fn check_individual(&self, t: &Individual) -> Result<(), TypeError> {
        let ok = match t {
            Individual::Var(x) => self.inds.contains(x),
            Individual::Const(c) => self.ctx.is_constant(c),
        };
        if ok {
            Ok(())
        } else {
            Err(TypeError::UnboundIndividual(t.clone()))
        }
    }

    /// Picks a name for an individual binder that is not yet in scope.
    fn bind_ind(&mut self, x: &Name, body: &ProofTerm) -> (Name, ProofTerm) {
        if self.inds.contains(x) {
            let y = self.fresh(x);
            let body = body.rename_ind(x, &y);
            (y, body)
        } else {
            (x.clone(), body.clone())
        }
    }

    fn pop_ind(&mut self) {
        self.inds.pop();
        let depth = self.inds.len();
        for meta in self.metas.iter_mut().filter(|m| m.solution.is_none()) {
            meta.depth = meta.depth.min(depth);
        }
    }

    fn with_hyp<T>(&mut self, a: &Name, ty: Rc<Ty>, f: impl FnOnce(&mut Self) -> T) -> T {
        self.hyps.push((a.clone(), ty));
        let out = f(self);
        self.hyps.pop();
        out
    }

    /// Solves a metavariable goal with a fresh connective of the requested shape.
    fn split_meta(&mut self, goal: &Rc<Ty>, make: fn(Rc<Ty>, Rc<Ty>) -> Ty) -> Option<(Rc<Ty>, Rc<Ty>)> {
        let Ty::Meta(m) = &*self.whnf(goal) else { return None };
        let (a, b) = (self.new_meta(), self.new_meta());
        let depth = self.metas[*m].depth;
        for ty in [&a, &b] {
            if let Ty::Meta(n) = &**ty {
                self.metas[*n].depth = depth;
            }
        }
        self.metas[*m].solution = Some(Rc::new(make(a.clone(), b.clone())));
        Some((a, b))
    }

    fn check(&mut self, p: &ProofTerm, goal: &Rc<Ty>) -> Result<(), TypeError> {
        let goal = self.whnf(goal);
        match (p, &*goal) {
            (ProofTerm::Lam(a, body), Ty::Imp(dom, cod)) => {
                let cod = cod.clone();
                self.with_hyp(a, dom.clone(), |elab| elab.check(body, &cod))
            }
            (ProofTerm::Pair(l, r), Ty::And(a, b)) => {
                let b = b.clone();
                self.check(l, a)?;
                self.check(r, &b)
            }
            (ProofTerm::Inj1(q), Ty::Or(a, _)) => self.check(q, a),
            (ProofTerm::Inj2(q), Ty::Or(_, b)) => self.check(q, b),
            (ProofTerm::Lam(..), Ty::Meta(_)) => {
                self.split_meta(&goal, Ty::Imp);
                self.check(p, &goal)
            }
            (ProofTerm::Pair(..), Ty::Meta(_)) => {
                self.split_meta(&goal, Ty::And);
                self.check(p, &goal)
            }
            (ProofTerm::Inj1(_) | ProofTerm::Inj2(_), Ty::Meta(_)) => {
                self.split_meta(&goal, Ty::Or);
                self.check(p, &goal)
            }
            (ProofTerm::Gen(x, body), Ty::Forall(y, b)) => {
                let b = b.clone();
                let (x, body) = self.bind_ind(x, body);
                let b = self.subst(&b, y, &Individual::Var(x.clone()));
                self.inds.push(x);
                let result = self.check(&body, &b);
                self.pop_ind();
                result
            }
            (ProofTerm::Witness(t, q), Ty::Exists(y, b)) => {
                self.check_individual(t)?;
                let b = self.subst(&b.clone(), y, t);
                self.check(q, &b)
            }
            (ProofTerm::Lam(..) | ProofTerm::Pair(..) | ProofTerm::Inj1(_) | ProofTerm::Inj2(_), _) => {
                let expected = match p {
                    ProofTerm::Lam(..) => "an implication",
                    ProofTerm::Pair(..) => "a conjunction",
                    _ => "a disjunction",
                };
                Err(self.shape_error(p, expected, &goal))
            }
            (ProofTerm::Gen(..), Ty::Meta(_)) | (ProofTerm::Witness(..), Ty::Meta(_)) => {
                let ty = self.infer(p)?;
                self.expect(p, &ty, &goal)
            }
            (ProofTerm::Gen(..), _) => Err(self.shape_error(p, "a universal formula", &goal)),
            (ProofTerm::Witness(..), _) => Err(self.shape_error(p, "an existential formula", &goal)),
            (ProofTerm::Case(s, a1, q1, a2, q2), _) => self.check_case(s, (a1, q1), (a2, q2), &goal),
            (ProofTerm::Dest(s, x, a, body), _) => self.check_dest(p, s, x, a, body, &goal),
            (ProofTerm::App(f, arg), _) if !is_neutral(f) => {
                let dom = self.new_meta();
                let fun = Rc::new(Ty::Imp(dom.clone(), goal.clone()));
                self.check(f, &fun)?;
                self.check(arg, &dom)
            }
            (ProofTerm::Proj1(q), _) if !is_neutral(q) => {
                let other = self.new_meta();
                self.check(q, &Rc::new(Ty::And(goal.clone(), other)))
            }
            (ProofTerm::Proj2(q), _) if !is_neutral(q) => {
                let other = self.new_meta();
                self.check(q, &Rc::new(Ty::And(other, goal.clone())))
            }
            (ProofTerm::IApp(g, t), _) if !is_neutral(g) => {
                self.check_individual(t)?;
                self.check_instance(p, g, t, &goal)
            }
            _ => {
                let ty = self.infer(p)?;
                self.expect(p, &ty, &goal)
            }
        }
    }

    /// Checks `g [t]` for a non-neutral `g`, trying each way of
    /// abstracting occurrences of `t` in the goal, the vacuous one first.
    fn check_instance(&mut self, p: &ProofTerm, g: &ProofTerm, t: &Individual, goal: &Rc<Ty>) -> Result<(), TypeError> {
        let snap = self.snapshot();
        let y = self.fresh("z");
        let mut candidates = vec![Rc::new(Ty::Forall(y.clone(), goal.clone()))];
        if let Some(f) = self.to_formula(goal) {
            for body in abstractions(&f, t, &y) {
                candidates.push(Rc::new(Ty::Forall(y.clone(), self.from_formula(&body))));
            }
        }
        for candidate in candidates {
            if self.check(g, &candidate).is_ok() {
                return Ok(());
            }
            self.restore(snap.clone());
        }
        let ty = self.infer(p)?;
        self.expect(p, &ty, goal)
    }

    fn check_case(
        &mut self,
        s: &ProofTerm,
        (a1, q1): (&Name, &ProofTerm),
        (a2, q2): (&Name, &ProofTerm),
        goal: &Rc<Ty>,
    ) -> Result<(), TypeError> {
        let snap = self.snapshot();
        let scrutinee_first = (|| {
            let ty = self.infer(s)?;
            if self.whnf(&ty).is_meta() {
                self.split_meta(&ty, Ty::Or);
            }
            let Ty::Or(l, r) = &*self.whnf(&ty) else {
                return Err(self.shape_error(s, "a disjunction", &ty));
            };
            let r = r.clone();
            self.with_hyp(a1, l.clone(), |elab| elab.check(q1, goal))?;
            self.with_hyp(a2, r, |elab| elab.check(q2, goal))
        })();
        let Err(first) = scrutinee_first else { return Ok(()) };
        self.restore(snap);
        let (l, r) = (self.new_meta(), self.new_meta());
        let branches_first = (|| {
            self.with_hyp(a1, l.clone(), |elab| elab.check(q1, goal))?;
            self.with_hyp(a2, r.clone(), |elab| elab.check(q2, goal))?;
            self.check(s, &Rc::new(Ty::Or(l, r)))
        })();
        branches_first.map_err(|_| first)
    }

    fn check_dest(
        &mut self,
        term: &ProofTerm,
        s: &ProofTerm,
        x: &Name,
        a: &Name,
        body: &ProofTerm,
        goal: &Rc<Ty>,
    ) -> Result<(), TypeError> {
        let (x, body) = self.bind_ind(x, body);
        if let ProofTerm::Witness(t, q) = s {
            // An introduced witness is typed vacuously: `[t, q] : exists x. B` with x not in B.
            let snap = self.snapshot();
            let hyp = self.new_meta();
            self.inds.push(x.clone());
            let branch = self.with_hyp(a, hyp.clone(), |elab| elab.check(&body, goal));
            self.pop_ind();
            let vacuous = branch.and_then(|()| {
                self.check_individual(t)?;
                self.check(q, &hyp)
            });
            if vacuous.is_ok() {
                return Ok(());
            }
            self.restore(snap.clone());
            if let Ok(ty) = self.infer(q) {
                if let Some(f) = self.to_formula(&ty) {
                    let y = self.fresh("z");
                    for b in abstractions(&f, t, &y) {
                        let ty = Rc::new(Ty::Exists(y.clone(), self.from_formula(&b)));
                        if self.dest_with(term, s, &ty, &x, a, &body, goal).is_ok() {
                            return Ok(());
                        }
                        self.restore(snap.clone());
                    }
                }
            }
            self.restore(snap);
        }
        if is_neutral(s) {
            let ty = self.infer(s)?;
            return self.dest_with(term, s, &ty, &x, a, &body, goal);
        }
        let snap = self.snapshot();
        let first = match self.infer(s) {
            Ok(ty) => self.dest_with(term, s, &ty, &x, a, &body, goal),
            Err(err) => Err(err),
        };
        let Err(first) = first else { return Ok(()) };
        self.restore(snap);
        // body first: the hypothesis formula may mention the eigenvariable
        self.inds.push(x.clone());
        let hyp = self.new_meta();
        let branch = self.with_hyp(a, hyp.clone(), |elab| elab.check(&body, goal));
        let hyp = self.zonk(&hyp);
        self.pop_ind();
        if branch.is_err() || self.mentions(goal, &x) {
            return Err(first);
        }
        let y = self.fresh("z");
        let b = self.subst(&hyp, &x, &Individual::Var(y.clone()));
        self.check(s, &Rc::new(Ty::Exists(y, b))).map_err(|_| first)
    }

    /// Checks the body of `dest s as [x, a] in body` given the formula of `s`.
    fn dest_with(
        &mut self,
        term: &ProofTerm,
        s: &ProofTerm,
        ty: &Rc<Ty>,
        x: &Name,
        a: &Name,
        body: &ProofTerm,
        goal: &Rc<Ty>,
    ) -> Result<(), TypeError> {
        let x = x.clone();
        let Ty::Exists(y, b) = &*self.whnf(ty) else {
            return Err(self.shape_error(s, "an existential formula", ty));
        };
        let b = self.subst(&b.clone(), y, &Individual::Var(x.clone()));
        self.inds.push(x.clone());
        let result = self.with_hyp(a, b, |elab| elab.check(body, goal));
        self.pop_ind();
        result?;
        if self.mentions(goal, &x) {
            return Err(TypeError::EigenvariableEscape { term: term.clone(), var: x });
        }
        Ok(())
    }

    fn infer(&mut self, p: &ProofTerm) -> Result<Rc<Ty>, TypeError> {
        match p {
            ProofTerm::Var(a) => self.lookup(a),
            ProofTerm::App(f, arg) => {
                let ty = self.infer(f)?;
                if self.whnf(&ty).is_meta() {
                    self.split_meta(&ty, Ty::Imp);
                }
                match &*self.whnf(&ty) {
                    Ty::Imp(dom, cod) => {
                        let cod = cod.clone();
                        self.check(arg, dom)?;
                        Ok(cod)
                    }
                    _ => Err(self.shape_error(f, "an implication", &ty)),
                }
            }
            ProofTerm::Proj1(q) | ProofTerm::Proj2(q) => {
                let ty = self.infer(q)?;
                if self.whnf(&ty).is_meta() {
                    self.split_meta(&ty, Ty::And);
                }
                match &*self.whnf(&ty) {
                    Ty::And(l, r) => Ok(if matches!(p, ProofTerm::Proj1(_)) { l.clone() } else { r.clone() }),
                    _ => Err(self.shape_error(q, "a conjunction", &ty)),
                }
            }
            ProofTerm::IApp(q, t) => {
                self.check_individual(t)?;
                let ty = self.infer(q)?;
                match &*self.whnf(&ty) {
                    Ty::Forall(y, body) => {
                        let body = body.clone();
                        Ok(self.subst(&body, &y.clone(), t))
                    }
                    _ => Err(self.shape_error(q, "a universal formula", &ty)),
                }
            }
            ProofTerm::Case(s, a1, q1, a2, q2) => {
                let ty = self.infer(s)?;
                if self.whnf(&ty).is_meta() {
                    self.split_meta(&ty, Ty::Or);
                }
                let Ty::Or(l, r) = &*self.whnf(&ty) else {
                    return Err(self.shape_error(s, "a disjunction", &ty));
                };
                let r = r.clone();
                let left = self.with_hyp(a1, l.clone(), |elab| elab.infer(q1))?;
                self.with_hyp(a2, r, |elab| elab.check(q2, &left)).map_err(|err| match err {
                    TypeError::Mismatch { term, expected, actual } if term == **q2 => {
                        TypeError::BranchMismatch { term: p.clone(), left: expected, right: actual }
                    }
                    other => other,
                })?;
                Ok(left)
            }
            ProofTerm::Dest(s, x, a, body) => {
                let ty = self.infer(s)?;
                let Ty::Exists(y, b) = &*self.whnf(&ty) else {
                    return Err(self.shape_error(s, "an existential formula", &ty));
                };
                let (y, b) = (y.clone(), b.clone());
                let (x, body) = self.bind_ind(x, body);
                let b = self.subst(&b, &y, &Individual::Var(x.clone()));
                self.inds.push(x.clone());
                let result = self.with_hyp(a, b, |elab| elab.infer(&body));
                self.pop_ind();
                let result = result?;
                if self.mentions(&result, &x) {
                    return Err(TypeError::EigenvariableEscape { term: p.clone(), var: x });
                }
                Ok(result)
            }
            ProofTerm::Lam(a, body) => {
                let dom = self.new_meta();
                let cod = self.with_hyp(a, dom.clone(), |elab| elab.infer(body))?;
                Ok(Rc::new(Ty::Imp(dom, cod)))
            }
            ProofTerm::Pair(l, r) => Ok(Rc::new(Ty::And(self.infer(l)?, self.infer(r)?))),
            ProofTerm::Inj1(q) => {
                let l = self.infer(q)?;
                Ok(Rc::new(Ty::Or(l, self.new_meta())))
            }
            ProofTerm::Inj2(q) => {
                let r = self.infer(q)?;
                Ok(Rc::new(Ty::Or(self.new_meta(), r)))
            }
            ProofTerm::Gen(x, body) => {
                let (x, body) = self.bind_ind(x, body);
                self.inds.push(x.clone());
                let result = self.infer(&body);
                self.pop_ind();
                Ok(Rc::new(Ty::Forall(x, result?)))
            }
            ProofTerm::Witness(t, q) => {
                self.check_individual(t)?;
                let body = self.infer(q)?;
                let z = self.fresh("z");
                Ok(Rc::new(Ty::Exists(z, body)))
            }
        }
    }
}

/// Every formula `b` other than `f` itself with `b[t/y] = f`: each nonempty
/// subset of the free occurrences of `t` in `f` replaced by `y`.
fn abstractions(f: &Formula, t: &Individual, y: &Name) -> Vec<Formula> {
    fn count(f: &Formula, t: &Individual) -> usize {
        match f {
            Formula::Atom(_, args) => args.iter().filter(|a| *a == t).count(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => count(a, t) + count(b, t),
            Formula::Forall(z, body) | Formula::Exists(z, body) => {
                if t.as_var() == Some(z) {
                    0
                } else {
                    count(body, t)
                }
            }
        }
    }
    fn replace(f: &Formula, t: &Individual, y: &Name, mask: u32, seen: &mut u32) -> Formula {
        match f {
            Formula::Atom(p, args) => Formula::atom(
                p.clone(),
                args.iter().map(|a| {
                    if a != t {
                        return a.clone();
                    }
                    let bit = 1 << *seen;
                    *seen += 1;
                    if mask & bit != 0 {
                        Individual::Var(y.clone())
                    } else {
                        a.clone()
                    }
                }).collect::<Vec<_>>(),
            ),
            Formula::And(a, b) => Formula::and(replace(a, t, y, mask, seen), replace(b, t, y, mask, seen)),
            Formula::Or(a, b) => Formula::or(replace(a, t, y, mask, seen), replace(b, t, y, mask, seen)),
            Formula::Imp(a, b) => Formula::imp(replace(a, t, y, mask, seen), replace(b, t, y, mask, seen)),
            Formula::Forall(z, body) | Formula::Exists(z, body) => {
                let body = if t.as_var() == Some(z) { (**body).clone() } else { replace(body, t, y, mask, seen) };
                match f {
                    Formula::Forall(..) => Formula::forall(z.clone(), body),
                    _ => Formula::exists(z.clone(), body),
                }
            }
        }
    }
    let n = count(f, t).min(10) as u32;
    (1..1u32 << n).map(|mask| replace(f, t, y, mask, &mut 0)).collect()
}

impl Ty {
    fn is_meta(&self) -> bool {
        matches!(self, Ty::Meta(_))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_context, parse_formula, parse_term};

    fn ok(ctx: &str, term: &str, formula: &str) -> Result<(), TypeError> {
        let ctx = parse_context(ctx).unwrap();
        let term = ctx.resolve_term(&parse_term(term).unwrap());
        let goal = ctx.resolve_formula(&parse_formula(formula).unwrap());
        check(&ctx, &term, &goal)
    }

    fn infer(ctx: &str, term: &str) -> Result<String, TypeError> {
        let ctx = parse_context(ctx).unwrap();
        let term = ctx.resolve_term(&parse_term(term).unwrap());
        infer_neutral(&ctx, &term).map(|f| f.to_string())
    }

    #[test]
    fn infer_examples() {
        assert_eq!(infer("a : X /\\ Y.", "fst a").unwrap(), "X");
        assert_eq!(infer("a : X.", "a").unwrap(), "X");
        assert_eq!(infer("f : X -> Y. a : X.", "f a").unwrap(), "Y");
        assert!(matches!(infer("", "a"), Err(TypeError::UnboundVariable(_))));
        assert!(matches!(infer("a : X.", "fst a"), Err(TypeError::ShapeMismatch { .. })));
        assert!(matches!(infer("", "fun a => a"), Err(TypeError::NotNeutral(_))));
    }

    #[test]
    fn check_examples() {
        assert!(ok("", "fun a => a", "X -> X").is_ok());
        assert!(matches!(ok("", "fun a => a", "X -> Y"), Err(TypeError::Mismatch { .. })));
        assert!(ok("const t. c : P(t).", "[t, c]", "exists x. P(x)").is_ok());
    }

    #[test]
    fn branch_mismatch() {
        let err = infer("c : X \\/ Y.", "case c of inl a => a | inr b => b").unwrap_err();
        assert!(matches!(err, TypeError::BranchMismatch { .. }), "{err:?}");
    }

    #[test]
    fn redexes_check() {
        assert!(ok("b : X.", "(fun a => a) b", "X").is_ok());
        assert!(ok("b : X.", "case (inl b) of inl a1 => inr a1 | inr a2 => inl a2", "X \\/ X").is_ok());
        assert!(ok("b : X.", "fst (b, fun c => c)", "X").is_ok());
        assert!(ok("b : X.", "(gen x => b) [y]", "X").is_err());
        assert!(ok("var y. b : X.", "(gen x => b) [y]", "X").is_ok());
        assert!(ok("var y. b : X.", "dest [y, b] as [x, a] in a", "X").is_ok());
        assert!(ok("c : X \\/ Y. d : X.", "(case c of inl a1 => fun b => b | inr a2 => fun b => b) d", "X").is_ok());
        assert!(ok("h : forall x. P(x). var y.", "(gen z => h [z]) [y]", "P(y)").is_ok());
    }

    #[test]
    fn eigenvariable_conditions() {
        // forall-intro may not generalise a variable free in the context
        assert!(ok("var x. c : P(x).", "gen x => c", "forall x. P(x)").is_err());
        assert!(ok("", "fun h => gen x => h [x]", "(forall y. P(y)) -> forall x. P(x)").is_ok());
        // the dest eigenvariable may not escape into the result
        assert!(matches!(
            ok("e : exists x. P(x).", "dest e as [x, a] in a", "P(x)"),
            Err(TypeError::UnboundIndividual(_)) | Err(TypeError::IllScopedGoal(_))
        ));
        assert!(ok("e : exists x. P(x) /\\ Q. ", "dest e as [x, a] in snd a", "Q").is_ok());
        assert!(matches!(
            infer("e : exists x. P(x).", "dest e as [x, a] in a"),
            Err(TypeError::EigenvariableEscape { .. })
        ));
    }

    #[test]
    fn quantifier_instantiation_avoids_capture() {
        assert!(ok("var y. h : forall x. exists y. Q(x, y).", "h [y]", "exists z. Q(y, z)").is_ok());
        assert!(ok("var y. h : forall x. exists y. Q(x, y).", "h [y]", "exists z. Q(z, z)").is_err());
    }

    #[test]
    fn classifiers() {
        let t = |s: &str| parse_term(s).unwrap();
        assert!(is_normal(&t("fun a => inl a")));
        assert!(!is_normal(&t("(fun a => a) b")));
        assert!(is_neutral(&t("case c of inl a1 => a1 | inr a2 => a2")));
        assert!(!is_neutral(&t("case inl c of inl a1 => a1 | inr a2 => a2")));
        assert!(is_neutral(&t("f (fun a => a) [x]")));
        assert!(!is_normal(&t("fst (a, b)")));
        assert!(is_normal(&t("gen x => [x, dest e as [y, a] in a]")));
    }
}
