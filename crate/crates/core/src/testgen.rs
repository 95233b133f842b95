//! Seedable generators of well-typed proof terms.
//!
//! [`gen_term`] runs a randomized, goal-directed proof search: introduction
//! rules follow the shape of the goal, and elimination spines start from
//! hypotheses whose formula can lead to it. [`gen_problem`] draws a random
//! context and goal and keeps the first one the search can inhabit.
//! [`inject_redexes`] wraps subterms in type-preserving beta expansions.

use std::collections::BTreeSet;
use std::rc::Rc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::nbe::{eval, initial_env, reify};
use crate::semantics::{bind, run, unit, ForcingValue, Job, StrongValue};
use crate::syntax::{Context, Formula, Individual, Name, NameSupply, ProofTerm};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("no proof of `{0}` found within the size budget")]
    GenerationFailed(Formula),
}

/// Which connectives generated formulas may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fragment {
    /// `->`, `/\` and `\/` over propositional atoms.
    Propositional,
    /// Like `Propositional`, but `\/` occurs only in strictly positive
    /// positions: never inside the antecedent of an implication or a hypothesis.
    PositiveDisjunction,
    /// All connectives and quantifiers, with unary and binary predicates.
    Full,
}

/// A generated typing problem together with its witness.
#[derive(Debug, Clone)]
pub struct Problem {
    pub context: Context,
    pub goal: Formula,
    pub term: ProofTerm,
}

const STEP_LIMIT: usize = 4000;

/// Size of a term counting constructor nodes only; variables are free.
pub fn constructor_size(p: &ProofTerm) -> usize {
    p.size() - count_vars(p)
}

fn count_vars(p: &ProofTerm) -> usize {
    match p {
        ProofTerm::Var(_) => 1,
        ProofTerm::Lam(_, q)
        | ProofTerm::Proj1(q)
        | ProofTerm::Proj2(q)
        | ProofTerm::Inj1(q)
        | ProofTerm::Inj2(q)
        | ProofTerm::Gen(_, q)
        | ProofTerm::IApp(q, _)
        | ProofTerm::Witness(_, q) => count_vars(q),
        ProofTerm::App(l, r) | ProofTerm::Pair(l, r) | ProofTerm::Dest(l, _, _, r) => count_vars(l) + count_vars(r),
        ProofTerm::Case(s, _, l, _, r) => count_vars(s) + count_vars(l) + count_vars(r),
    }
}

/// Generates a term of `goal` in `ctx` with at most `size` constructor nodes.
pub fn gen_term(ctx: &Context, goal: &Formula, size: usize, seed: u64) -> Result<ProofTerm, GenError> {
    let mut search = Search {
        rng: ChaCha8Rng::seed_from_u64(seed),
        supply: NameSupply::for_context(ctx),
        steps: 0,
    };
    let scope = Scope {
        hyps: ctx.hyps().to_vec(),
        domain: ctx.domain(),
        split: BTreeSet::new(),
    };
    search
        .prove(&scope, goal, size)
        .map(|(p, _)| p)
        .ok_or_else(|| GenError::GenerationFailed(goal.clone()))
}

#[derive(Clone)]
struct Scope {
    hyps: Vec<(Name, Formula)>,
    domain: Vec<Individual>,
    /// Neutral terms that have already been case-split or destructured.
    split: BTreeSet<String>,
}

impl Scope {
    fn with_hyp(&self, a: Name, f: Formula) -> Scope {
        let mut next = self.clone();
        next.hyps.push((a, f));
        next
    }
}

struct Search {
    rng: ChaCha8Rng,
    supply: NameSupply,
    steps: usize,
}

enum Rule {
    Intro,
    Elim(usize),
}

/// Same connective skeleton, ignoring individuals.
fn skeleton_eq(a: &Formula, b: &Formula) -> bool {
    match (a, b) {
        (Formula::Atom(p, xs), Formula::Atom(q, ys)) => p == q && xs.len() == ys.len(),
        (Formula::And(a1, a2), Formula::And(b1, b2))
        | (Formula::Or(a1, a2), Formula::Or(b1, b2))
        | (Formula::Imp(a1, a2), Formula::Imp(b1, b2)) => skeleton_eq(a1, b1) && skeleton_eq(a2, b2),
        (Formula::Forall(_, a), Formula::Forall(_, b)) | (Formula::Exists(_, a), Formula::Exists(_, b)) => {
            skeleton_eq(a, b)
        }
        _ => false,
    }
}

/// Can an elimination spine starting at `a` end in `goal`?
fn leads_to(a: &Formula, goal: &Formula) -> bool {
    skeleton_eq(a, goal)
        || match a {
            Formula::Imp(_, c) => leads_to(c, goal),
            Formula::And(b, c) => leads_to(b, goal) || leads_to(c, goal),
            Formula::Forall(_, b) => leads_to(b, goal),
            Formula::Or(..) | Formula::Exists(..) => true,
            Formula::Atom(..) => false,
        }
}

impl Search {
    fn tick(&mut self) -> bool {
        self.steps += 1;
        self.steps <= STEP_LIMIT
    }

    /// Draws rules in random order, weighted.
    fn order(&mut self, mut rules: Vec<(u32, Rule)>) -> Vec<Rule> {
        let mut out = Vec::with_capacity(rules.len());
        while !rules.is_empty() {
            let total: u32 = rules.iter().map(|(w, _)| w).sum();
            let mut pick = self.rng.gen_range(0..total);
            let idx = rules
                .iter()
                .position(|(w, _)| {
                    if pick < *w {
                        true
                    } else {
                        pick -= w;
                        false
                    }
                })
                .expect("weights sum to total");
            out.push(rules.swap_remove(idx).1);
        }
        out
    }

    fn prove(&mut self, scope: &Scope, goal: &Formula, budget: usize) -> Option<(ProofTerm, usize)> {
        if !self.tick() {
            return None;
        }
        let mut rules = Vec::new();
        if !goal.is_atomic() && budget > 0 {
            rules.push((1, Rule::Intro));
        }
        for (i, (_, f)) in scope.hyps.iter().enumerate() {
            if leads_to(f, goal) {
                rules.push((if f.is_atomic() { 1 } else { 2 }, Rule::Elim(i)));
            }
        }
        for rule in self.order(rules) {
            let found = match rule {
                Rule::Intro => self.intro(scope, goal, budget),
                Rule::Elim(i) => {
                    let (a, f) = scope.hyps[i].clone();
                    self.elim(scope, ProofTerm::Var(a), &f, goal, budget)
                }
            };
            if found.is_some() {
                return found;
            }
            if self.steps > STEP_LIMIT {
                return None;
            }
        }
        None
    }

    fn intro(&mut self, scope: &Scope, goal: &Formula, budget: usize) -> Option<(ProofTerm, usize)> {
        let rest = budget - 1;
        match goal {
            Formula::Imp(a, b) => {
                let name = self.supply.fresh_proof();
                let (body, used) = self.prove(&scope.with_hyp(name.clone(), (**a).clone()), b, rest)?;
                Some((ProofTerm::lam(name, body), used + 1))
            }
            Formula::And(a, b) => {
                let (l, used_l) = self.prove(scope, a, rest)?;
                let (r, used_r) = self.prove(scope, b, rest - used_l)?;
                Some((ProofTerm::pair(l, r), used_l + used_r + 1))
            }
            Formula::Or(a, b) => {
                let left_first = self.rng.gen_bool(0.5);
                for left in [left_first, !left_first] {
                    let side = if left { a } else { b };
                    if let Some((p, used)) = self.prove(scope, side, rest) {
                        let p = if left { ProofTerm::inj1(p) } else { ProofTerm::inj2(p) };
                        return Some((p, used + 1));
                    }
                }
                None
            }
            Formula::Forall(x, body) => {
                let x0 = self.supply.fresh_ind();
                let t = Individual::Var(x0.clone());
                let mut inner = scope.clone();
                inner.domain.push(t.clone());
                let (p, used) = self.prove(&inner, &Formula::instantiate(x, body, &t), rest)?;
                Some((ProofTerm::gen(x0, p), used + 1))
            }
            Formula::Exists(x, body) => {
                let mut domain = scope.domain.clone();
                domain.shuffle(&mut self.rng);
                for t in domain {
                    if let Some((p, used)) = self.prove(scope, &Formula::instantiate(x, body, &t), rest) {
                        return Some((ProofTerm::witness(t, p), used + 1));
                    }
                }
                None
            }
            Formula::Atom(..) => None,
        }
    }

    fn elim(
        &mut self,
        scope: &Scope,
        spine: ProofTerm,
        a: &Formula,
        goal: &Formula,
        budget: usize,
    ) -> Option<(ProofTerm, usize)> {
        if !self.tick() {
            return None;
        }
        if a.alpha_eq(goal) {
            return Some((spine, 0));
        }
        if budget == 0 {
            return None;
        }
        let rest = budget - 1;
        match a {
            Formula::Imp(b, c) if leads_to(c, goal) => {
                let (arg, used_arg) = self.prove(scope, b, rest)?;
                let (p, used) = self.elim(scope, ProofTerm::app(spine, arg), c, goal, rest - used_arg)?;
                Some((p, used + used_arg + 1))
            }
            Formula::And(b, c) => {
                let first = self.rng.gen_bool(0.5);
                for left in [first, !first] {
                    let (part, proj) = if left {
                        (b, ProofTerm::proj1(spine.clone()))
                    } else {
                        (c, ProofTerm::proj2(spine.clone()))
                    };
                    if leads_to(part, goal) {
                        if let Some((p, used)) = self.elim(scope, proj, part, goal, rest) {
                            return Some((p, used + 1));
                        }
                    }
                }
                None
            }
            Formula::Forall(x, body) => {
                let mut domain = scope.domain.clone();
                domain.shuffle(&mut self.rng);
                for t in domain {
                    let instance = Formula::instantiate(x, body, &t);
                    if let Some((p, used)) = self.elim(scope, ProofTerm::iapp(spine.clone(), t), &instance, goal, rest) {
                        return Some((p, used + 1));
                    }
                }
                None
            }
            Formula::Or(b, c) => {
                let key = spine.to_string();
                if scope.split.contains(&key) {
                    return None;
                }
                let mut inner = scope.clone();
                inner.split.insert(key);
                let a1 = self.supply.fresh_proof();
                let (q1, used1) = self.prove(&inner.with_hyp(a1.clone(), (**b).clone()), goal, rest)?;
                let a2 = self.supply.fresh_proof();
                let (q2, used2) = self.prove(&inner.with_hyp(a2.clone(), (**c).clone()), goal, rest - used1)?;
                Some((ProofTerm::case(spine, a1, q1, a2, q2), used1 + used2 + 1))
            }
            Formula::Exists(x, body) => {
                let key = spine.to_string();
                if scope.split.contains(&key) {
                    return None;
                }
                let x0 = self.supply.fresh_ind();
                let name = self.supply.fresh_proof();
                let t = Individual::Var(x0.clone());
                let mut inner = scope.with_hyp(name.clone(), Formula::instantiate(x, body, &t));
                inner.split.insert(key);
                inner.domain.push(t);
                let (q, used) = self.prove(&inner, goal, rest)?;
                if goal.has_free_ind(&x0) {
                    return None;
                }
                Some((ProofTerm::dest(spine, x0, name, q), used + 1))
            }
            _ => None,
        }
    }
}

struct FormulaGen<'r> {
    rng: &'r mut ChaCha8Rng,
    fragment: Fragment,
    /// Individuals declared in the context.
    domain: Vec<Individual>,
}

const PROPS: &[&str] = &["X", "Y", "Z"];
const BINDERS: &[&str] = &["u", "v", "w"];

impl FormulaGen<'_> {
    fn atom(&mut self, bound: &[Name]) -> Formula {
        if self.fragment == Fragment::Full && self.rng.gen_bool(0.6) {
            let terms: Vec<Individual> =
                bound.iter().cloned().map(Individual::Var).chain(self.domain.iter().cloned()).collect();
            if !terms.is_empty() {
                // prefer the innermost bound variable
                let pick = |rng: &mut ChaCha8Rng| {
                    if !bound.is_empty() && rng.gen_bool(0.6) {
                        Individual::Var(bound[bound.len() - 1].clone())
                    } else {
                        terms.choose(rng).expect("nonempty").clone()
                    }
                };
                return if self.rng.gen_bool(0.7) {
                    Formula::atom("P", [pick(self.rng)])
                } else {
                    let (s, t) = (pick(self.rng), pick(self.rng));
                    Formula::atom("Q", [s, t])
                };
            }
        }
        Formula::prop(*PROPS.choose(self.rng).expect("nonempty"))
    }

    /// `or_ok` is false inside antecedents of the positive-disjunction fragment.
    fn formula(&mut self, depth: usize, or_ok: bool, bound: &mut Vec<Name>) -> Formula {
        if depth == 0 || self.rng.gen_bool(0.2) {
            return self.atom(bound);
        }
        let full = self.fragment == Fragment::Full;
        let or_allowed = or_ok || self.fragment != Fragment::PositiveDisjunction;
        let free_binder = BINDERS.iter().find(|b| !bound.iter().any(|n| &**n == **b));
        let choices: Vec<(u32, u8)> = [
            (3, 0),
            (2, 1),
            (if or_allowed { 2 } else { 0 }, 2),
            (if full && free_binder.is_some() { 1 } else { 0 }, 3),
            (if full && free_binder.is_some() { 1 } else { 0 }, 4),
        ]
        .into_iter()
        .filter(|(w, _)| *w > 0)
        .collect();
        let kind = choices.choose_weighted(self.rng, |(w, _)| *w).expect("nonempty").1;
        match kind {
            0 => {
                let antecedent_or = self.fragment != Fragment::PositiveDisjunction;
                let a = self.formula(depth - 1, antecedent_or && or_ok, bound);
                let b = self.formula(depth - 1, or_ok, bound);
                Formula::imp(a, b)
            }
            1 => Formula::and(self.formula(depth - 1, or_ok, bound), self.formula(depth - 1, or_ok, bound)),
            2 => Formula::or(self.formula(depth - 1, or_ok, bound), self.formula(depth - 1, or_ok, bound)),
            _ => {
                let x: Name = Name::from(*free_binder.expect("checked above"));
                bound.push(x.clone());
                let body = self.formula(depth - 1, or_ok, bound);
                bound.pop();
                if kind == 3 {
                    Formula::forall(x, body)
                } else {
                    Formula::exists(x, body)
                }
            }
        }
    }
}

/// Draws a random problem and a term solving it. `size` bounds the
/// constructor count of the term. A closed problem has no hypotheses: its
/// goal abstracts the generated hypotheses as antecedents.
pub fn gen_problem(seed: u64, fragment: Fragment, closed: bool, size: usize) -> Problem {
    problem(seed, fragment, closed, size, false)
}

/// Like [`gen_problem`] with an open context and an atomic goal.
pub fn gen_atomic_problem(seed: u64, fragment: Fragment, size: usize) -> Problem {
    problem(seed, fragment, false, size, true)
}

fn problem(seed: u64, fragment: Fragment, closed: bool, size: usize, atomic: bool) -> Problem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let size = size.max(1);
    let goal_depth = (1 + size / 10).min(4);
    for _ in 0..10_000 {
        let mut ctx = Context::new();
        if fragment == Fragment::Full {
            ctx.declare_const("k").expect("fresh context");
            if rng.gen_bool(0.5) {
                ctx.declare_var("y").expect("fresh context");
            }
        }
        let mut gen = FormulaGen { rng: &mut rng, fragment, domain: ctx.domain() };
        let hyp_count = gen.rng.gen_range(1..=4);
        let hyps: Vec<Formula> = (0..hyp_count)
            .map(|_| {
                let depth = gen.rng.gen_range(0..=2);
                let or_ok = fragment != Fragment::PositiveDisjunction;
                gen.formula(depth, or_ok, &mut Vec::new())
            })
            .collect();
        let goal = if atomic { gen.atom(&[]) } else { gen.formula(goal_depth, true, &mut Vec::new()) };
        for (i, h) in hyps.iter().enumerate() {
            ctx.assume(format!("h{i}"), h.clone()).expect("generated hypotheses are well scoped");
        }
        let term_seed = rng.gen();
        let Ok(term) = gen_term(&ctx, &goal, size, term_seed) else { continue };
        if constructor_size(&term) * 3 < size {
            continue;
        }
        if !closed {
            return Problem { context: ctx, goal, term };
        }
        let mut open = Context::new();
        for c in ctx.constants() {
            open.declare_const(c.clone()).expect("fresh context");
        }
        for x in ctx.ind_vars() {
            open.declare_var(x.clone()).expect("fresh context");
        }
        let (goal, term) = ctx.hyps().iter().rev().fold((goal, term), |(g, t), (a, f)| {
            (Formula::imp(f.clone(), g), ProofTerm::lam(a.clone(), t))
        });
        return Problem { context: open, goal, term };
    }
    panic!("no problem found for seed {seed}");
}

/// Wraps `n` randomly chosen subterms of `p` in beta expansions that preserve
/// its formula. Variables become `(fun a => a) v`; other subterms may also be
/// wrapped in a projection of a pair, a case of an injection, an
/// instantiation of a vacuous generalization or a destructuring of a witness.
pub fn inject_redexes(p: &ProofTerm, n: usize, seed: u64) -> ProofTerm {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut supply = NameSupply::new();
    supply.reserve(p.all_names());
    let mut free: Vec<Individual> = p.free_ind_vars().into_iter().map(Individual::Var).collect();
    collect_constants(p, &mut free);
    let mut current = p.clone();
    for _ in 0..n {
        let target = rng.gen_range(0..current.size());
        let mut injector = Injector { rng: &mut rng, supply: &mut supply, target, seen: 0 };
        current = injector.walk(&current, &mut free.clone());
    }
    current
}

fn collect_constants(p: &ProofTerm, out: &mut Vec<Individual>) {
    let note = |t: &Individual, out: &mut Vec<Individual>| {
        if matches!(t, Individual::Const(_)) && !out.contains(t) {
            out.push(t.clone());
        }
    };
    match p {
        ProofTerm::Var(_) => {}
        ProofTerm::Lam(_, q) | ProofTerm::Proj1(q) | ProofTerm::Proj2(q) | ProofTerm::Inj1(q) | ProofTerm::Inj2(q) => {
            collect_constants(q, out)
        }
        ProofTerm::Gen(_, q) => collect_constants(q, out),
        ProofTerm::IApp(q, t) | ProofTerm::Witness(t, q) => {
            note(t, out);
            collect_constants(q, out);
        }
        ProofTerm::App(l, r) | ProofTerm::Pair(l, r) | ProofTerm::Dest(l, _, _, r) => {
            collect_constants(l, out);
            collect_constants(r, out);
        }
        ProofTerm::Case(s, _, l, _, r) => {
            collect_constants(s, out);
            collect_constants(l, out);
            collect_constants(r, out);
        }
    }
}

struct Injector<'a> {
    rng: &'a mut ChaCha8Rng,
    supply: &'a mut NameSupply,
    target: usize,
    seen: usize,
}

impl Injector<'_> {
    /// Pre-order walk; `inds` are the individuals in scope at the current node.
    fn walk(&mut self, p: &ProofTerm, inds: &mut Vec<Individual>) -> ProofTerm {
        let here = self.seen;
        self.seen += 1;
        if here == self.target {
            return self.wrap(p, inds);
        }
        if self.seen > self.target + p.size() {
            return p.clone();
        }
        let go = |this: &mut Self, q: &ProofTerm, inds: &mut Vec<Individual>| this.walk(q, inds);
        match p {
            ProofTerm::Var(_) => p.clone(),
            ProofTerm::Lam(a, q) => ProofTerm::lam(a.clone(), go(self, q, inds)),
            ProofTerm::App(l, r) => {
                let l = go(self, l, inds);
                ProofTerm::app(l, go(self, r, inds))
            }
            ProofTerm::Pair(l, r) => {
                let l = go(self, l, inds);
                ProofTerm::pair(l, go(self, r, inds))
            }
            ProofTerm::Proj1(q) => ProofTerm::proj1(go(self, q, inds)),
            ProofTerm::Proj2(q) => ProofTerm::proj2(go(self, q, inds)),
            ProofTerm::Inj1(q) => ProofTerm::inj1(go(self, q, inds)),
            ProofTerm::Inj2(q) => ProofTerm::inj2(go(self, q, inds)),
            ProofTerm::Case(s, a1, q1, a2, q2) => {
                let s = go(self, s, inds);
                let q1 = go(self, q1, inds);
                ProofTerm::case(s, a1.clone(), q1, a2.clone(), go(self, q2, inds))
            }
            ProofTerm::Gen(x, q) => {
                inds.push(Individual::Var(x.clone()));
                let q = go(self, q, inds);
                inds.pop();
                ProofTerm::gen(x.clone(), q)
            }
            ProofTerm::IApp(q, t) => ProofTerm::iapp(go(self, q, inds), t.clone()),
            ProofTerm::Witness(t, q) => ProofTerm::witness(t.clone(), go(self, q, inds)),
            ProofTerm::Dest(s, x, a, q) => {
                let s = go(self, s, inds);
                inds.push(Individual::Var(x.clone()));
                let q = go(self, q, inds);
                inds.pop();
                ProofTerm::dest(s, x.clone(), a.clone(), q)
            }
        }
    }

    fn wrap(&mut self, q: &ProofTerm, inds: &[Individual]) -> ProofTerm {
        let kinds = if matches!(q, ProofTerm::Var(_)) {
            1
        } else if inds.is_empty() {
            4
        } else {
            6
        };
        match self.rng.gen_range(0..kinds) {
            0 => {
                let a = self.supply.fresh_proof();
                ProofTerm::app(ProofTerm::lam(a.clone(), ProofTerm::Var(a)), q.clone())
            }
            1 => {
                let b = self.supply.fresh_proof();
                let filler = ProofTerm::lam(b.clone(), ProofTerm::Var(b));
                if self.rng.gen_bool(0.5) {
                    ProofTerm::proj1(ProofTerm::pair(q.clone(), filler))
                } else {
                    ProofTerm::proj2(ProofTerm::pair(filler, q.clone()))
                }
            }
            2 | 3 => {
                let (a1, a2) = (self.supply.fresh_proof(), self.supply.fresh_proof());
                let inj = if self.rng.gen_bool(0.5) { ProofTerm::inj1(q.clone()) } else { ProofTerm::inj2(q.clone()) };
                ProofTerm::case(inj, a1.clone(), ProofTerm::Var(a1), a2.clone(), ProofTerm::Var(a2))
            }
            4 => {
                let x = self.supply.fresh_ind();
                let t = inds.choose(self.rng).expect("nonempty").clone();
                ProofTerm::iapp(ProofTerm::gen(x, q.clone()), t)
            }
            _ => {
                let x = self.supply.fresh_ind();
                let a = self.supply.fresh_proof();
                let t = inds.choose(self.rng).expect("nonempty").clone();
                ProofTerm::dest(ProofTerm::witness(t, q.clone()), x, a.clone(), ProofTerm::Var(a))
            }
        }
    }
}

/// Checks the three monad laws on values built from generated terms of atomic
/// formulas, observing each side with `run`.
pub fn check_monad_laws(seed: u64, frag: Fragment) -> Result<(), String> {
    let pr = gen_atomic_problem(seed, frag, 12);
    let ctx = &pr.context;
    let env = initial_env(ctx);
    let v: ForcingValue = eval(&pr.term, &env);
    // f and g run generated terms with the delivered value bound to a fresh hypothesis
    let continuation = |input: &Formula, offset: u64| {
        let (body, goal) = follow_up(ctx, input, seed.wrapping_add(offset));
        let env = env.clone();
        let f = move |_: &Context, sv: StrongValue| eval(&body, &env.bind("arg".into(), unit(sv)));
        (Rc::new(f), goal)
    };
    let (f, f_goal) = continuation(&pr.goal, 1);
    let (g, g_goal) = continuation(&f_goal, 2);
    let observe = |w: &ForcingValue, goal: &Formula| {
        run(&mut Job::for_context(ctx).validating(true), w, goal, ctx).map_err(|e| e.to_string())
    };

    let right = observe(&bind(v.clone(), |_, x| unit(x)), &pr.goal);
    if right? != observe(&v, &pr.goal)? {
        return Err(format!("right identity fails for {}", pr.term));
    }
    let sv = StrongValue::Atom(reify(&mut Job::for_context(ctx), ctx, &pr.goal, &v).map_err(|e| e.to_string())?);
    let f1 = f.clone();
    let left = observe(&bind(unit(sv.clone()), move |w, x| f1(w, x)), &f_goal);
    if left? != observe(&f(ctx, sv), &f_goal)? {
        return Err(format!("left identity fails for {}", pr.term));
    }
    let (f1, g1) = (f.clone(), g.clone());
    let nested = bind(bind(v.clone(), move |w, x| f1(w, x)), move |w, x| g1(w, x));
    let (f2, g2) = (f.clone(), g.clone());
    let flat = bind(v, move |w, x| {
        let g3 = g2.clone();
        bind(f2(w, x), move |w, y| g3(w, y))
    });
    if observe(&nested, &g_goal)? != observe(&flat, &g_goal)? {
        return Err(format!("associativity fails for {}", pr.term));
    }
    Ok(())
}

/// A generated term of some atomic formula in `ctx` extended with `arg : input`.
fn follow_up(ctx: &Context, input: &Formula, seed: u64) -> (ProofTerm, Formula) {
    fn atoms(f: &Formula, out: &mut Vec<Formula>) {
        match f {
            Formula::Atom(..) => out.push(f.clone()),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                atoms(a, out);
                atoms(b, out);
            }
            Formula::Forall(_, a) | Formula::Exists(_, a) => atoms(a, out),
        }
    }
    let extended = ctx.clone().with("arg", input.clone());
    let mut candidates = Vec::new();
    for (_, f) in ctx.hyps() {
        atoms(f, &mut candidates);
    }
    candidates.retain(|a| extended.is_well_scoped(a));
    for (i, goal) in candidates.iter().enumerate() {
        if let Ok(p) = gen_term(&extended, goal, 8, seed.wrapping_add(i as u64)) {
            return (p, goal.clone());
        }
    }
    (ProofTerm::var("arg"), input.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reduction::beta_eq;
    use crate::syntax::parse_formula;
    use crate::typecheck::check;

    #[test]
    fn identity_goal_is_inhabited() {
        let goal = parse_formula("X -> X").unwrap();
        let p = gen_term(&Context::new(), &goal, 3, 7).unwrap();
        assert!(check(&Context::new(), &p, &goal).is_ok());
        assert!(matches!(p, ProofTerm::Lam(..)));
    }

    #[test]
    fn atom_without_hypotheses_fails() {
        let goal = Formula::prop("X");
        assert_eq!(gen_term(&Context::new(), &goal, 3, 1), Err(GenError::GenerationFailed(goal)));
    }

    #[test]
    fn disjunction_swap_splits() {
        let ctx = Context::new().with("c", parse_formula("X \\/ Y").unwrap());
        let goal = parse_formula("Y \\/ X").unwrap();
        for seed in 0..10 {
            let p = gen_term(&ctx, &goal, 5, seed).unwrap();
            assert!(check(&ctx, &p, &goal).is_ok());
            assert!(matches!(&p, ProofTerm::Case(s, ..) if **s == ProofTerm::var("c")), "{p}");
        }
    }

    #[test]
    fn reproducible() {
        for seed in 0..20 {
            let a = gen_problem(seed, Fragment::Full, false, 20);
            let b = gen_problem(seed, Fragment::Full, false, 20);
            assert_eq!(a.term, b.term);
            assert_eq!(a.goal, b.goal);
        }
    }

    #[test]
    fn problems_check() {
        for (seed, fragment) in (0..60).zip([Fragment::Propositional, Fragment::PositiveDisjunction, Fragment::Full].iter().cycle()) {
            let closed = seed % 2 == 0;
            let pr = gen_problem(seed, *fragment, closed, 5 + (seed as usize % 30));
            assert!(check(&pr.context, &pr.term, &pr.goal).is_ok(), "{} : {}", pr.term, pr.goal);
            assert!(!closed || !pr.context.has_hypotheses());
        }
    }

    #[test]
    fn injecting_into_variable() {
        let p = inject_redexes(&ProofTerm::var("b"), 1, 3);
        assert_eq!(p.to_string(), "(fun a0 => a0) b");
    }

    #[test]
    fn injection_preserves_type_and_beta_class() {
        for seed in 0..60 {
            let pr = gen_problem(seed, Fragment::Full, false, 15);
            let q = inject_redexes(&pr.term, 1 + seed as usize % 5, seed);
            assert!(check(&pr.context, &q, &pr.goal).is_ok(), "{q} : {}", pr.goal);
            assert_eq!(beta_eq(&pr.term, &q, 100_000), Ok(true));
        }
    }
}
