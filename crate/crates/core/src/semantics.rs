//! The semantic domain of the universal continuation model.
//!
//! Worlds are typing contexts. A [`Forcing`] value is a computation that, given
//! an answer formula `C`, a world and a continuation, produces a normal proof
//! of `C` in that world. The continuation receives a strong value, which is
//! formula-directed: a normal term at atoms, a pair at conjunctions, a tagged
//! value at disjunctions, and a function over future worlds at implications and
//! universal formulas.

use std::fmt;
use std::rc::Rc;

use thiserror::Error;

use crate::syntax::{Context, Formula, Individual, Name, NameSupply, ProofTerm};
use crate::typecheck::{check, is_normal, TypeError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NbeError {
    #[error(transparent)]
    Type(#[from] TypeError),
    #[error("call-by-value normalization needs a context without hypotheses")]
    CbvOpenTerm,
    #[error("run is only defined at atomic formulas, not at `{0}`")]
    FormulaNotAtomic(Formula),
    #[error("`{0}` is not a neutral term")]
    NotNeutral(ProofTerm),
    #[error("variable `{0}` is not bound in the environment")]
    UnboundInEnv(Name),
    #[error("semantic value does not match formula `{0}`")]
    ValueMismatch(Formula),
    #[error("{reason}: `{term}` at `{formula}`")]
    Validation { term: ProofTerm, formula: Formula, reason: String },
}

pub type Answer = Result<ProofTerm, NbeError>;

/// State threaded through one normalization job.
pub struct Job {
    pub supply: NameSupply,
    /// Re-check every answer produced by a forcing computation.
    pub validate: bool,
}

impl Job {
    pub fn new(supply: NameSupply) -> Job {
        Job { supply, validate: false }
    }

    pub fn for_context(ctx: &Context) -> Job {
        Job::new(NameSupply::for_context(ctx))
    }

    pub fn validating(mut self, on: bool) -> Job {
        self.validate = on;
        self
    }
}

/// A continuation: consumes a value delivered at some world and produces the answer.
pub struct Cont<V>(Rc<dyn Fn(&mut Job, &Context, V) -> Answer>);

impl<V> Clone for Cont<V> {
    fn clone(&self) -> Self {
        Cont(self.0.clone())
    }
}

impl<V: 'static> Cont<V> {
    pub fn new(f: impl Fn(&mut Job, &Context, V) -> Answer + 'static) -> Cont<V> {
        Cont(Rc::new(f))
    }

    pub fn call(&self, job: &mut Job, world: &Context, value: V) -> Answer {
        (self.0)(job, world, value)
    }
}

/// A forcing computation over values of type `V`.
pub struct Forcing<V = StrongValue>(Rc<dyn Fn(&mut Job, &Formula, &Context, Cont<V>) -> Answer>);

/// Forcing values of the call-by-name domain.
pub type ForcingValue = Forcing<StrongValue>;

impl<V> Clone for Forcing<V> {
    fn clone(&self) -> Self {
        Forcing(self.0.clone())
    }
}

impl<V> fmt::Debug for Forcing<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("<forcing>")
    }
}

impl<V: 'static> Forcing<V> {
    pub fn new(f: impl Fn(&mut Job, &Formula, &Context, Cont<V>) -> Answer + 'static) -> Forcing<V> {
        Forcing(Rc::new(f))
    }

    /// A computation that fails as soon as it is run.
    pub fn fail(err: NbeError) -> Forcing<V> {
        Forcing::new(move |_, _, _, _| Err(err.clone()))
    }

    /// Runs the computation with answer formula `answer` at `world`.
    pub fn invoke(&self, job: &mut Job, answer: &Formula, world: &Context, k: Cont<V>) -> Answer {
        let result = (self.0)(job, answer, world, k)?;
        if job.validate {
            validate(world, &result, answer)?;
        }
        Ok(result)
    }
}

fn validate(world: &Context, term: &ProofTerm, formula: &Formula) -> Result<(), NbeError> {
    let fail = |reason: String| NbeError::Validation { term: term.clone(), formula: formula.clone(), reason };
    if !is_normal(term) {
        return Err(fail("answer is not normal".into()));
    }
    check(world, term, formula).map_err(|err| fail(err.to_string()))
}

/// The call-by-name strong values. Components are unevaluated computations.
#[derive(Clone)]
pub enum StrongValue {
    Atom(ProofTerm),
    Pair(ForcingValue, ForcingValue),
    Left(ForcingValue),
    Right(ForcingValue),
    Fun(Rc<dyn Fn(&Context, ForcingValue) -> ForcingValue>),
    All(Rc<dyn Fn(&Context, Individual) -> ForcingValue>),
    Wit(Individual, ForcingValue),
}

impl fmt::Debug for StrongValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StrongValue::Atom(e) => write!(f, "Atom({e})"),
            StrongValue::Pair(..) => f.write_str("Pair(..)"),
            StrongValue::Left(_) => f.write_str("Left(..)"),
            StrongValue::Right(_) => f.write_str("Right(..)"),
            StrongValue::Fun(_) => f.write_str("Fun(..)"),
            StrongValue::All(_) => f.write_str("All(..)"),
            StrongValue::Wit(t, _) => write!(f, "Wit({t}, ..)"),
        }
    }
}

/// Values that can be observed at atomic formulas.
pub trait Observable: Clone + 'static {
    fn atom(&self) -> Option<&ProofTerm>;
}

impl Observable for StrongValue {
    fn atom(&self) -> Option<&ProofTerm> {
        match self {
            StrongValue::Atom(e) => Some(e),
            _ => None,
        }
    }
}

/// `unit(v) = k => k v`: deliver `v` at the current world.
pub fn unit<V: Clone + 'static>(value: V) -> Forcing<V> {
    Forcing::new(move |job, _, world, k| k.call(job, world, value.clone()))
}

/// `bind(v, f) = k => v (w, b => f(w, b) k)`.
pub fn bind<V: 'static, W: 'static>(
    v: Forcing<V>,
    f: impl Fn(&Context, V) -> Forcing<W> + 'static,
) -> Forcing<W> {
    let f = Rc::new(f);
    Forcing::new(move |job, answer, world, k| {
        let f = f.clone();
        let outer = answer.clone();
        v.invoke(
            job,
            answer,
            world,
            Cont::new(move |job, world, value| f(world, value).invoke(job, &outer, world, k.clone())),
        )
    })
}

/// Runs a computation at an atomic formula with the continuation that projects
/// the delivered normal term.
pub fn run<V: Observable>(job: &mut Job, v: &Forcing<V>, formula: &Formula, world: &Context) -> Answer {
    if !formula.is_atomic() {
        return Err(NbeError::FormulaNotAtomic(formula.clone()));
    }
    let expected = formula.clone();
    v.invoke(
        job,
        formula,
        world,
        Cont::new(move |_, _, value: V| value.atom().cloned().ok_or_else(|| NbeError::ValueMismatch(expected.clone()))),
    )
}

/// Persistent environment binding proof variables to values and individual
/// variables to individuals.
pub struct Env<V>(Option<Rc<Frame<V>>>);

enum Binding<V> {
    Proof(Name, V),
    Ind(Name, Individual),
}

struct Frame<V> {
    binding: Binding<V>,
    next: Env<V>,
}

impl<V> Clone for Env<V> {
    fn clone(&self) -> Self {
        Env(self.0.clone())
    }
}

impl<V> Default for Env<V> {
    fn default() -> Self {
        Env(None)
    }
}

impl<V: Clone> Env<V> {
    pub fn new() -> Env<V> {
        Env(None)
    }

    pub fn bind(&self, a: Name, value: V) -> Env<V> {
        Env(Some(Rc::new(Frame { binding: Binding::Proof(a, value), next: self.clone() })))
    }

    pub fn bind_ind(&self, x: Name, t: Individual) -> Env<V> {
        Env(Some(Rc::new(Frame { binding: Binding::Ind(x, t), next: self.clone() })))
    }

    fn frames(&self) -> impl Iterator<Item = &Binding<V>> {
        let mut cur = self.0.as_deref();
        std::iter::from_fn(move || {
            let frame = cur?;
            cur = frame.next.0.as_deref();
            Some(&frame.binding)
        })
    }

    pub fn lookup(&self, a: &str) -> Option<V> {
        self.frames().find_map(|b| match b {
            Binding::Proof(n, v) if &**n == a => Some(v.clone()),
            _ => None,
        })
    }

    /// The individual a term-level individual denotes. Constants denote themselves.
    pub fn individual(&self, t: &Individual) -> Result<Individual, NbeError> {
        match t {
            Individual::Const(_) => Ok(t.clone()),
            Individual::Var(x) => self
                .frames()
                .find_map(|b| match b {
                    Binding::Ind(n, v) if n == x => Some(v.clone()),
                    _ => None,
                })
                .ok_or_else(|| NbeError::UnboundInEnv(x.clone())),
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
    fn run_of_unit_is_the_payload() {
        let ctx = Context::new().with("a", x());
        let mut job = Job::for_context(&ctx).validating(true);
        let v = unit(StrongValue::Atom(ProofTerm::var("a")));
        assert_eq!(run(&mut job, &v, &x(), &ctx).unwrap(), ProofTerm::var("a"));
    }

    #[test]
    fn run_rejects_composite_formulas() {
        let ctx = Context::new();
        let mut job = Job::for_context(&ctx);
        let v = unit(StrongValue::Atom(ProofTerm::var("a")));
        let imp = Formula::imp(x(), x());
        assert_eq!(run(&mut job, &v, &imp, &ctx), Err(NbeError::FormulaNotAtomic(imp)));
    }

    #[test]
    fn monad_identities_on_a_branching_value() {
        // v emits `case c of ...` and delivers a different atom in each branch
        let ctx = Context::new().with("c", Formula::or(x(), x())).with("d", x());
        let v: ForcingValue = Forcing::new(|job, _, world, k| {
            let (a1, a2) = (job.supply.fresh_proof(), job.supply.fresh_proof());
            let w1 = world.extend(a1.clone(), x());
            let q1 = k.call(job, &w1, StrongValue::Atom(ProofTerm::Var(a1.clone())))?;
            let w2 = world.extend(a2.clone(), x());
            let q2 = k.call(job, &w2, StrongValue::Atom(ProofTerm::Var(a2.clone())))?;
            Ok(ProofTerm::case(ProofTerm::var("c"), a1, q1, a2, q2))
        });
        let observe = |v: &ForcingValue| run(&mut Job::for_context(&ctx).validating(true), v, &x(), &ctx).unwrap();
        let direct = observe(&v);
        assert_eq!(direct.to_string(), "case c of inl a0 => a0 | inr a1 => a1");
        assert_eq!(observe(&bind(v.clone(), |_, sv| unit(sv))), direct);
        let sv = StrongValue::Atom(ProofTerm::var("d"));
        let f = |_: &Context, sv: StrongValue| unit(sv);
        assert_eq!(observe(&bind(unit(sv.clone()), f)), observe(&f(&ctx, sv)));
    }

    #[test]
    fn env_lookup_prefers_latest_binding() {
        let env: Env<u32> = Env::new().bind("a".into(), 1).bind_ind("x".into(), Individual::var("y")).bind("a".into(), 2);
        assert_eq!(env.lookup("a"), Some(2));
        assert_eq!(env.lookup("b"), None);
        assert_eq!(env.individual(&Individual::var("x")), Ok(Individual::var("y")));
        assert_eq!(env.individual(&Individual::constant("k")), Ok(Individual::constant("k")));
        assert!(env.individual(&Individual::var("z")).is_err());
    }
}
