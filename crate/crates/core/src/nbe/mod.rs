//! Normalization by evaluation: evaluate a proof term into the continuation
//! model, then read a normal term back out of the model by reification.

mod cbv;

use std::rc::Rc;

use crate::semantics::{bind, run, unit, Answer, Cont, Env, Forcing, ForcingValue, Job, NbeError, StrongValue};
use crate::syntax::{Context, Formula, Individual, ProofTerm};
use crate::typecheck::{check, is_neutral, is_normal};

pub use cbv::{eval_cbv, reflect_cbv, reify_cbv, CbvValue};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Strategy {
    #[default]
    Cbn,
    Cbv,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Options {
    pub strategy: Strategy,
    /// Re-check every intermediate answer and the final result.
    pub validate: bool,
}

impl Options {
    pub fn cbn() -> Options {
        Options::default()
    }

    pub fn cbv() -> Options {
        Options { strategy: Strategy::Cbv, ..Options::default() }
    }

    pub fn validating(self) -> Options {
        Options { validate: true, ..self }
    }
}

/// Normalizes `p`, which must check at `goal` in `ctx`.
pub fn normalize(ctx: &Context, p: &ProofTerm, goal: &Formula, options: Options) -> Answer {
    check(ctx, p, goal)?;
    let mut job = Job::for_context(ctx).validating(options.validate);
    let nf = match options.strategy {
        Strategy::Cbn => reify(&mut job, ctx, goal, &eval(p, &initial_env(ctx))),
        Strategy::Cbv => {
            if ctx.has_hypotheses() {
                return Err(NbeError::CbvOpenTerm);
            }
            let env = ctx
                .ind_vars()
                .iter()
                .fold(Env::new(), |env, x| env.bind_ind(x.clone(), Individual::Var(x.clone())));
            reify_cbv(&mut job, ctx, goal, &eval_cbv(p, &env))
        }
    }?;
    if options.validate {
        if !is_normal(&nf) {
            return Err(NbeError::Validation { term: nf, formula: goal.clone(), reason: "result is not normal".into() });
        }
        check(ctx, &nf, goal)?;
    }
    Ok(nf)
}

/// The environment reflecting every hypothesis of `ctx` and mapping each
/// individual variable to itself.
pub fn initial_env(ctx: &Context) -> Env<ForcingValue> {
    let env = ctx.ind_vars().iter().fold(Env::new(), |env, x| env.bind_ind(x.clone(), Individual::Var(x.clone())));
    ctx.hyps().iter().fold(env, |env, (a, f)| env.bind(a.clone(), reflect(f, ProofTerm::Var(a.clone()))))
}

fn mismatch<V: 'static>(formula: &str) -> Forcing<V> {
    Forcing::fail(NbeError::ValueMismatch(Formula::prop(formula)))
}

/// Call-by-name evaluation.
pub fn eval(p: &ProofTerm, env: &Env<ForcingValue>) -> ForcingValue {
    match p {
        ProofTerm::Var(a) => env.lookup(a).unwrap_or_else(|| Forcing::fail(NbeError::UnboundInEnv(a.clone()))),
        ProofTerm::Lam(a, body) => {
            let (a, body, env) = (a.clone(), body.clone(), env.clone());
            unit(StrongValue::Fun(Rc::new(move |_, arg| eval(&body, &env.bind(a.clone(), arg)))))
        }
        ProofTerm::App(f, q) => {
            let arg = eval(q, env);
            bind(eval(f, env), move |world, sv| match sv {
                StrongValue::Fun(f) => f(world, arg.clone()),
                _ => mismatch("->"),
            })
        }
        ProofTerm::Pair(l, r) => unit(StrongValue::Pair(eval(l, env), eval(r, env))),
        ProofTerm::Proj1(q) => bind(eval(q, env), |_, sv| match sv {
            StrongValue::Pair(l, _) => l,
            _ => mismatch("/\\"),
        }),
        ProofTerm::Proj2(q) => bind(eval(q, env), |_, sv| match sv {
            StrongValue::Pair(_, r) => r,
            _ => mismatch("/\\"),
        }),
        ProofTerm::Inj1(q) => unit(StrongValue::Left(eval(q, env))),
        ProofTerm::Inj2(q) => unit(StrongValue::Right(eval(q, env))),
        ProofTerm::Case(s, a1, q1, a2, q2) => {
            let (a1, q1, a2, q2, env2) = (a1.clone(), q1.clone(), a2.clone(), q2.clone(), env.clone());
            bind(eval(s, env), move |_, sv| match sv {
                StrongValue::Left(v) => eval(&q1, &env2.bind(a1.clone(), v)),
                StrongValue::Right(v) => eval(&q2, &env2.bind(a2.clone(), v)),
                _ => mismatch("\\/"),
            })
        }
        ProofTerm::Gen(x, body) => {
            let (x, body, env) = (x.clone(), body.clone(), env.clone());
            unit(StrongValue::All(Rc::new(move |_, t| eval(&body, &env.bind_ind(x.clone(), t)))))
        }
        ProofTerm::IApp(q, t) => match env.individual(t) {
            Ok(t) => bind(eval(q, env), move |world, sv| match sv {
                StrongValue::All(f) => f(world, t.clone()),
                _ => mismatch("forall"),
            }),
            Err(err) => Forcing::fail(err),
        },
        ProofTerm::Witness(t, q) => match env.individual(t) {
            Ok(t) => unit(StrongValue::Wit(t, eval(q, env))),
            Err(err) => Forcing::fail(err),
        },
        ProofTerm::Dest(s, x, a, body) => {
            let (x, a, body, env2) = (x.clone(), a.clone(), body.clone(), env.clone());
            bind(eval(s, env), move |_, sv| match sv {
                StrongValue::Wit(t, v) => eval(&body, &env2.bind_ind(x.clone(), t).bind(a.clone(), v)),
                _ => mismatch("exists"),
            })
        }
    }
}

/// Reads a normal proof of `formula` at `world` out of a forcing value.
pub fn reify(job: &mut Job, world: &Context, formula: &Formula, v: &ForcingValue) -> Answer {
    if formula.is_atomic() {
        return run(job, v, formula, world);
    }
    let target = formula.clone();
    let k = Cont::new(move |job, world, sv| reify_value(job, world, &target, sv));
    v.invoke(job, formula, world, k)
}

fn reify_value(job: &mut Job, world: &Context, formula: &Formula, sv: StrongValue) -> Answer {
    match (formula, sv) {
        (Formula::Atom(..), StrongValue::Atom(e)) => Ok(e),
        (Formula::Imp(dom, cod), StrongValue::Fun(f)) => {
            let a = job.supply.fresh_proof();
            let inner = world.extend(a.clone(), (**dom).clone());
            let arg = reflect(dom, ProofTerm::Var(a.clone()));
            let body = reify(job, &inner, cod, &f(&inner, arg))?;
            Ok(ProofTerm::lam(a, body))
        }
        (Formula::And(l, r), StrongValue::Pair(vl, vr)) => {
            let pl = reify(job, world, l, &vl)?;
            let pr = reify(job, world, r, &vr)?;
            Ok(ProofTerm::pair(pl, pr))
        }
        (Formula::Or(l, _), StrongValue::Left(v)) => Ok(ProofTerm::inj1(reify(job, world, l, &v)?)),
        (Formula::Or(_, r), StrongValue::Right(v)) => Ok(ProofTerm::inj2(reify(job, world, r, &v)?)),
        (Formula::Forall(x, body), StrongValue::All(f)) => {
            let x0 = job.supply.fresh_ind();
            let inner = world.extend_ind(x0.clone());
            let t = Individual::Var(x0.clone());
            let instance = Formula::instantiate(x, body, &t);
            let p = reify(job, &inner, &instance, &f(&inner, t))?;
            Ok(ProofTerm::gen(x0, p))
        }
        (Formula::Exists(x, body), StrongValue::Wit(t, v)) => {
            let instance = Formula::instantiate(x, body, &t);
            let p = reify(job, world, &instance, &v)?;
            Ok(ProofTerm::witness(t, p))
        }
        _ => Err(NbeError::ValueMismatch(formula.clone())),
    }
}

/// Embeds a neutral term of `formula` into the model. Disjunctions and
/// existentials are the only cases that use the continuation: they wrap its
/// answer in a `case` or `dest` on the neutral term.
pub fn reflect(formula: &Formula, e: ProofTerm) -> ForcingValue {
    if !is_neutral(&e) {
        return Forcing::fail(NbeError::NotNeutral(e));
    }
    match formula {
        Formula::Atom(..) => unit(StrongValue::Atom(e)),
        Formula::And(l, r) => unit(StrongValue::Pair(
            reflect(l, ProofTerm::proj1(e.clone())),
            reflect(r, ProofTerm::proj2(e)),
        )),
        Formula::Imp(dom, cod) => {
            let (dom, cod) = (dom.clone(), cod.clone());
            unit(StrongValue::Fun(Rc::new(move |_, arg: ForcingValue| {
                let (dom, cod, e) = (dom.clone(), cod.clone(), e.clone());
                Forcing::new(move |job, answer, world, k| {
                    let r = reify(job, world, &dom, &arg)?;
                    reflect(&cod, ProofTerm::app(e.clone(), r)).invoke(job, answer, world, k)
                })
            })))
        }
        Formula::Forall(x, body) => {
            let (x, body) = (x.clone(), body.clone());
            unit(StrongValue::All(Rc::new(move |_, t| {
                reflect(&Formula::instantiate(&x, &body, &t), ProofTerm::iapp(e.clone(), t))
            })))
        }
        Formula::Or(l, r) => {
            let (l, r) = (l.clone(), r.clone());
            Forcing::new(move |job, _, world, k| {
                let a1 = job.supply.fresh_proof();
                let w1 = world.extend(a1.clone(), (*l).clone());
                let q1 = k.call(job, &w1, StrongValue::Left(reflect(&l, ProofTerm::Var(a1.clone()))))?;
                let a2 = job.supply.fresh_proof();
                let w2 = world.extend(a2.clone(), (*r).clone());
                let q2 = k.call(job, &w2, StrongValue::Right(reflect(&r, ProofTerm::Var(a2.clone()))))?;
                Ok(ProofTerm::case(e.clone(), a1, q1, a2, q2))
            })
        }
        Formula::Exists(x, body) => {
            let (x, body) = (x.clone(), body.clone());
            Forcing::new(move |job, _, world, k| {
                let x0 = job.supply.fresh_ind();
                let a = job.supply.fresh_proof();
                let t = Individual::Var(x0.clone());
                let instance = Formula::instantiate(&x, &body, &t);
                let inner = world.extend_ind(x0.clone()).extend(a.clone(), instance.clone());
                let q = k.call(job, &inner, StrongValue::Wit(t, reflect(&instance, ProofTerm::Var(a.clone()))))?;
                Ok(ProofTerm::dest(e.clone(), x0, a, q))
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_context, parse_formula, parse_term};

    fn nf(ctx: &str, term: &str, goal: &str, options: Options) -> Answer {
        let ctx = parse_context(ctx).unwrap();
        let term = ctx.resolve_term(&parse_term(term).unwrap());
        let goal = ctx.resolve_formula(&parse_formula(goal).unwrap());
        normalize(&ctx, &term, &goal, options.validating())
    }

    fn show(ctx: &str, term: &str, goal: &str) -> String {
        nf(ctx, term, goal, Options::cbn()).unwrap().to_string()
    }

    #[test]
    fn identity() {
        assert_eq!(show("", "fun a => a", "X -> X"), "fun a0 => a0");
        assert_eq!(nf("", "fun a => a", "X -> X", Options::cbv()).unwrap().to_string(), "fun a0 => a0");
    }

    #[test]
    fn eta_expands_disjunctive_variable() {
        assert_eq!(show("c : X \\/ Y.", "c", "X \\/ Y"), "case c of inl a0 => inl a0 | inr a1 => inr a1");
    }

    #[test]
    fn eta_expands_functions() {
        assert_eq!(show("f : X -> X.", "f", "X -> X"), "fun a0 => f a0");
    }

    #[test]
    fn case_of_injection() {
        assert_eq!(show("b : X.", "case inl b of inl a1 => inr a1 | inr a2 => inl a2", "X \\/ X"), "inr b");
    }

    #[test]
    fn commuting_conversion() {
        let t = "(case c of inl a1 => fun b => b | inr a2 => fun b => b) d";
        assert_eq!(show("c : X \\/ Y. d : X.", t, "X"), "case c of inl a0 => d | inr a1 => d");
    }

    #[test]
    fn beta_redex_at_atom() {
        assert_eq!(show("b : X.", "(fun a => a) b", "X"), "b");
    }

    #[test]
    fn quantifiers() {
        assert_eq!(show("h : forall x. P(x).", "h", "forall x. P(x)"), "gen x0 => h [x0]");
        assert_eq!(
            show("e : exists x. P(x).", "e", "exists x. P(x)"),
            "dest e as [x0, a0] in [x0, a0]"
        );
        assert_eq!(show("const k. h : forall x. P(x).", "[k, (gen x => h [x]) [k]]", "exists y. P(y)"), "[k, h [k]]");
        assert_eq!(show("p : X /\\ Y.", "fun a => fst p", "Y /\\ X -> X"), "fun a0 => fst p");
    }

    #[test]
    fn reflect_needs_a_neutral_term() {
        let ctx = Context::new();
        let v = reflect(&Formula::prop("X"), parse_term("fun a => a").unwrap());
        let mut job = Job::for_context(&ctx);
        assert!(matches!(run(&mut job, &v, &Formula::prop("X"), &ctx), Err(NbeError::NotNeutral(_))));
    }

    #[test]
    fn cbv_rejects_open_terms() {
        assert_eq!(nf("b : X.", "b", "X", Options::cbv()), Err(NbeError::CbvOpenTerm));
    }

    #[test]
    fn strategies_diverge_on_disjunctive_hypotheses() {
        let t = "fun a => fun b => b";
        let goal = "X \\/ Y -> Z -> Z";
        assert_eq!(nf("", t, goal, Options::cbn()).unwrap().to_string(), "fun a0 => fun a1 => a1");
        assert_eq!(
            nf("", t, goal, Options::cbv()).unwrap().to_string(),
            "fun a0 => case a0 of inl a1 => fun a2 => a2 | inr a3 => fun a4 => a4"
        );
    }

    #[test]
    fn ill_typed_input_is_rejected() {
        assert!(matches!(nf("", "fun a => a", "X -> Y", Options::cbn()), Err(NbeError::Type(_))));
    }
}
