//! The call-by-value variant. Environments bind strong values, so every
//! subterm is evaluated to a value before it is used, and a bound variable of
//! disjunctive or existential formula is split as soon as it is introduced.
//! Only closed terms are supported.

use std::fmt;
use std::rc::Rc;

use crate::semantics::{bind, unit, Answer, Cont, Env, Forcing, Job, NbeError, Observable};
use crate::syntax::{Context, Formula, Individual, ProofTerm};
use crate::typecheck::is_neutral;

#[derive(Clone)]
pub enum CbvValue {
    Atom(ProofTerm),
    Pair(Rc<CbvValue>, Rc<CbvValue>),
    Left(Rc<CbvValue>),
    Right(Rc<CbvValue>),
    Fun(Rc<dyn Fn(&Context, CbvValue) -> Forcing<CbvValue>>),
    All(Rc<dyn Fn(&Context, Individual) -> Forcing<CbvValue>>),
    Wit(Individual, Rc<CbvValue>),
}

impl fmt::Debug for CbvValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CbvValue::Atom(e) => write!(f, "Atom({e})"),
            CbvValue::Pair(l, r) => write!(f, "Pair({l:?}, {r:?})"),
            CbvValue::Left(v) => write!(f, "Left({v:?})"),
            CbvValue::Right(v) => write!(f, "Right({v:?})"),
            CbvValue::Fun(_) => f.write_str("Fun(..)"),
            CbvValue::All(_) => f.write_str("All(..)"),
            CbvValue::Wit(t, v) => write!(f, "Wit({t}, {v:?})"),
        }
    }
}

impl Observable for CbvValue {
    fn atom(&self) -> Option<&ProofTerm> {
        match self {
            CbvValue::Atom(e) => Some(e),
            _ => None,
        }
    }
}

fn mismatch(formula: &str) -> Forcing<CbvValue> {
    Forcing::fail(NbeError::ValueMismatch(Formula::prop(formula)))
}

/// Call-by-value evaluation.
pub fn eval_cbv(p: &ProofTerm, env: &Env<CbvValue>) -> Forcing<CbvValue> {
    match p {
        ProofTerm::Var(a) => match env.lookup(a) {
            Some(v) => unit(v),
            None => Forcing::fail(NbeError::UnboundInEnv(a.clone())),
        },
        ProofTerm::Lam(a, body) => {
            let (a, body, env) = (a.clone(), body.clone(), env.clone());
            unit(CbvValue::Fun(Rc::new(move |_, arg| eval_cbv(&body, &env.bind(a.clone(), arg)))))
        }
        ProofTerm::App(f, q) => {
            let arg = eval_cbv(q, env);
            bind(eval_cbv(f, env), move |_, fv| {
                bind(arg.clone(), move |world, av| match &fv {
                    CbvValue::Fun(f) => f(world, av),
                    _ => mismatch("->"),
                })
            })
        }
        ProofTerm::Pair(l, r) => {
            let right = eval_cbv(r, env);
            bind(eval_cbv(l, env), move |_, lv| {
                bind(right.clone(), move |_, rv| unit(CbvValue::Pair(Rc::new(lv.clone()), Rc::new(rv))))
            })
        }
        ProofTerm::Proj1(q) => bind(eval_cbv(q, env), |_, v| match v {
            CbvValue::Pair(l, _) => unit((*l).clone()),
            _ => mismatch("/\\"),
        }),
        ProofTerm::Proj2(q) => bind(eval_cbv(q, env), |_, v| match v {
            CbvValue::Pair(_, r) => unit((*r).clone()),
            _ => mismatch("/\\"),
        }),
        ProofTerm::Inj1(q) => bind(eval_cbv(q, env), |_, v| unit(CbvValue::Left(Rc::new(v)))),
        ProofTerm::Inj2(q) => bind(eval_cbv(q, env), |_, v| unit(CbvValue::Right(Rc::new(v)))),
        ProofTerm::Case(s, a1, q1, a2, q2) => {
            let (a1, q1, a2, q2, env2) = (a1.clone(), q1.clone(), a2.clone(), q2.clone(), env.clone());
            bind(eval_cbv(s, env), move |_, v| match v {
                CbvValue::Left(v) => eval_cbv(&q1, &env2.bind(a1.clone(), (*v).clone())),
                CbvValue::Right(v) => eval_cbv(&q2, &env2.bind(a2.clone(), (*v).clone())),
                _ => mismatch("\\/"),
            })
        }
        ProofTerm::Gen(x, body) => {
            let (x, body, env) = (x.clone(), body.clone(), env.clone());
            unit(CbvValue::All(Rc::new(move |_, t| eval_cbv(&body, &env.bind_ind(x.clone(), t)))))
        }
        ProofTerm::IApp(q, t) => match env.individual(t) {
            Ok(t) => bind(eval_cbv(q, env), move |world, v| match v {
                CbvValue::All(f) => f(world, t.clone()),
                _ => mismatch("forall"),
            }),
            Err(err) => Forcing::fail(err),
        },
        ProofTerm::Witness(t, q) => match env.individual(t) {
            Ok(t) => bind(eval_cbv(q, env), move |_, v| unit(CbvValue::Wit(t.clone(), Rc::new(v)))),
            Err(err) => Forcing::fail(err),
        },
        ProofTerm::Dest(s, x, a, body) => {
            let (x, a, body, env2) = (x.clone(), a.clone(), body.clone(), env.clone());
            bind(eval_cbv(s, env), move |_, v| match v {
                CbvValue::Wit(t, v) => eval_cbv(&body, &env2.bind_ind(x.clone(), t).bind(a.clone(), (*v).clone())),
                _ => mismatch("exists"),
            })
        }
    }
}

pub fn reify_cbv(job: &mut Job, world: &Context, formula: &Formula, v: &Forcing<CbvValue>) -> Answer {
    let target = formula.clone();
    v.invoke(job, formula, world, Cont::new(move |job, world, value| reify_value(job, world, &target, value)))
}

fn reify_value(job: &mut Job, world: &Context, formula: &Formula, value: CbvValue) -> Answer {
    match (formula, value) {
        (Formula::Atom(..), CbvValue::Atom(e)) => Ok(e),
        (Formula::Imp(dom, cod), CbvValue::Fun(f)) => {
            let a = job.supply.fresh_proof();
            let inner = world.extend(a.clone(), (**dom).clone());
            let body = bind(reflect_cbv(dom, ProofTerm::Var(a.clone())), move |world, v| f(world, v));
            Ok(ProofTerm::lam(a, reify_cbv(job, &inner, cod, &body)?))
        }
        (Formula::And(l, r), CbvValue::Pair(vl, vr)) => {
            let pl = reify_value(job, world, l, (*vl).clone())?;
            let pr = reify_value(job, world, r, (*vr).clone())?;
            Ok(ProofTerm::pair(pl, pr))
        }
        (Formula::Or(l, _), CbvValue::Left(v)) => Ok(ProofTerm::inj1(reify_value(job, world, l, (*v).clone())?)),
        (Formula::Or(_, r), CbvValue::Right(v)) => Ok(ProofTerm::inj2(reify_value(job, world, r, (*v).clone())?)),
        (Formula::Forall(x, body), CbvValue::All(f)) => {
            let x0 = job.supply.fresh_ind();
            let inner = world.extend_ind(x0.clone());
            let t = Individual::Var(x0.clone());
            let instance = Formula::instantiate(x, body, &t);
            Ok(ProofTerm::gen(x0, reify_cbv(job, &inner, &instance, &f(&inner, t))?))
        }
        (Formula::Exists(x, body), CbvValue::Wit(t, v)) => {
            let instance = Formula::instantiate(x, body, &t);
            let p = reify_value(job, world, &instance, (*v).clone())?;
            Ok(ProofTerm::witness(t, p))
        }
        _ => Err(NbeError::ValueMismatch(formula.clone())),
    }
}

/// Reflection producing values. Conjunctions reflect both components eagerly,
/// so a disjunction nested in a conjunction is split immediately.
pub fn reflect_cbv(formula: &Formula, e: ProofTerm) -> Forcing<CbvValue> {
    if !is_neutral(&e) {
        return Forcing::fail(NbeError::NotNeutral(e));
    }
    match formula {
        Formula::Atom(..) => unit(CbvValue::Atom(e)),
        Formula::And(l, r) => {
            let right = reflect_cbv(r, ProofTerm::proj2(e.clone()));
            bind(reflect_cbv(l, ProofTerm::proj1(e)), move |_, lv| {
                bind(right.clone(), move |_, rv| unit(CbvValue::Pair(Rc::new(lv.clone()), Rc::new(rv))))
            })
        }
        Formula::Imp(dom, cod) => {
            let (dom, cod) = (dom.clone(), cod.clone());
            unit(CbvValue::Fun(Rc::new(move |_, arg: CbvValue| {
                let (dom, cod, e) = (dom.clone(), cod.clone(), e.clone());
                Forcing::new(move |job, answer, world, k| {
                    let r = reify_value(job, world, &dom, arg.clone())?;
                    reflect_cbv(&cod, ProofTerm::app(e.clone(), r)).invoke(job, answer, world, k)
                })
            })))
        }
        Formula::Forall(x, body) => {
            let (x, body) = (x.clone(), body.clone());
            unit(CbvValue::All(Rc::new(move |_, t| {
                reflect_cbv(&Formula::instantiate(&x, &body, &t), ProofTerm::iapp(e.clone(), t))
            })))
        }
        Formula::Or(l, r) => {
            let (l, r) = (l.clone(), r.clone());
            Forcing::new(move |job, answer, world, k| {
                let a1 = job.supply.fresh_proof();
                let w1 = world.extend(a1.clone(), (*l).clone());
                let k1 = k.clone();
                let left = Cont::new(move |job, w, v| k1.call(job, w, CbvValue::Left(Rc::new(v))));
                let q1 = reflect_cbv(&l, ProofTerm::Var(a1.clone())).invoke(job, answer, &w1, left)?;
                let a2 = job.supply.fresh_proof();
                let w2 = world.extend(a2.clone(), (*r).clone());
                let k2 = k.clone();
                let right = Cont::new(move |job, w, v| k2.call(job, w, CbvValue::Right(Rc::new(v))));
                let q2 = reflect_cbv(&r, ProofTerm::Var(a2.clone())).invoke(job, answer, &w2, right)?;
                Ok(ProofTerm::case(e.clone(), a1, q1, a2, q2))
            })
        }
        Formula::Exists(x, body) => {
            let (x, body) = (x.clone(), body.clone());
            Forcing::new(move |job, answer, world, k| {
                let x0 = job.supply.fresh_ind();
                let a = job.supply.fresh_proof();
                let t = Individual::Var(x0.clone());
                let instance = Formula::instantiate(&x, &body, &t);
                let inner = world.extend_ind(x0.clone()).extend(a.clone(), instance.clone());
                let k = k.clone();
                let wit = Cont::new(move |job, w, v| k.call(job, w, CbvValue::Wit(t.clone(), Rc::new(v))));
                let q = reflect_cbv(&instance, ProofTerm::Var(a.clone())).invoke(job, answer, &inner, wit)?;
                Ok(ProofTerm::dest(e.clone(), x0, a, q))
            })
        }
    }
}
