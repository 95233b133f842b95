//! Small-step beta reduction, used as an independent oracle.

use thiserror::Error;

use crate::syntax::{alpha_eq, ProofTerm};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReductionError {
    #[error("no normal form within {0} steps")]
    FuelExhausted(usize),
}

/// The order in which redexes are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Order {
    #[default]
    LeftmostOutermost,
    RightmostInnermost,
}

/// Contracts `p` if it is itself a redex.
pub fn contract(p: &ProofTerm) -> Option<ProofTerm> {
    match p {
        ProofTerm::App(f, q) => match &**f {
            ProofTerm::Lam(a, body) => Some(body.subst_proof(a, q)),
            _ => None,
        },
        ProofTerm::Proj1(q) => match &**q {
            ProofTerm::Pair(l, _) => Some((**l).clone()),
            _ => None,
        },
        ProofTerm::Proj2(q) => match &**q {
            ProofTerm::Pair(_, r) => Some((**r).clone()),
            _ => None,
        },
        ProofTerm::Case(s, a1, q1, a2, q2) => match &**s {
            ProofTerm::Inj1(v) => Some(q1.subst_proof(a1, v)),
            ProofTerm::Inj2(v) => Some(q2.subst_proof(a2, v)),
            _ => None,
        },
        ProofTerm::IApp(g, t) => match &**g {
            ProofTerm::Gen(x, body) => Some(body.subst_ind(x, t)),
            _ => None,
        },
        ProofTerm::Dest(s, x, a, body) => match &**s {
            ProofTerm::Witness(t, v) => Some(body.subst_ind(x, t).subst_proof(a, v)),
            _ => None,
        },
        _ => None,
    }
}

pub fn is_redex(p: &ProofTerm) -> bool {
    contract(p).is_some()
}

/// True if some subterm is a redex.
pub fn has_redex(p: &ProofTerm) -> bool {
    is_redex(p) || children(p).iter().any(|c| has_redex(c))
}

fn children(p: &ProofTerm) -> Vec<&ProofTerm> {
    match p {
        ProofTerm::Var(_) => vec![],
        ProofTerm::Lam(_, q)
        | ProofTerm::Proj1(q)
        | ProofTerm::Proj2(q)
        | ProofTerm::Inj1(q)
        | ProofTerm::Inj2(q)
        | ProofTerm::Gen(_, q)
        | ProofTerm::IApp(q, _)
        | ProofTerm::Witness(_, q) => vec![q],
        ProofTerm::App(l, r) | ProofTerm::Pair(l, r) | ProofTerm::Dest(l, _, _, r) => vec![l, r],
        ProofTerm::Case(s, _, q1, _, q2) => vec![s, q1, q2],
    }
}

/// Rebuilds `p` with its `i`-th child replaced.
fn replace_child(p: &ProofTerm, i: usize, new: ProofTerm) -> ProofTerm {
    use std::sync::Arc;
    let new = Arc::new(new);
    match (p, i) {
        (ProofTerm::Lam(a, _), 0) => ProofTerm::Lam(a.clone(), new),
        (ProofTerm::Proj1(_), 0) => ProofTerm::Proj1(new),
        (ProofTerm::Proj2(_), 0) => ProofTerm::Proj2(new),
        (ProofTerm::Inj1(_), 0) => ProofTerm::Inj1(new),
        (ProofTerm::Inj2(_), 0) => ProofTerm::Inj2(new),
        (ProofTerm::Gen(x, _), 0) => ProofTerm::Gen(x.clone(), new),
        (ProofTerm::IApp(_, t), 0) => ProofTerm::IApp(new, t.clone()),
        (ProofTerm::Witness(t, _), 0) => ProofTerm::Witness(t.clone(), new),
        (ProofTerm::App(_, r), 0) => ProofTerm::App(new, r.clone()),
        (ProofTerm::App(l, _), 1) => ProofTerm::App(l.clone(), new),
        (ProofTerm::Pair(_, r), 0) => ProofTerm::Pair(new, r.clone()),
        (ProofTerm::Pair(l, _), 1) => ProofTerm::Pair(l.clone(), new),
        (ProofTerm::Dest(_, x, a, r), 0) => ProofTerm::Dest(new, x.clone(), a.clone(), r.clone()),
        (ProofTerm::Dest(l, x, a, _), 1) => ProofTerm::Dest(l.clone(), x.clone(), a.clone(), new),
        (ProofTerm::Case(_, a1, q1, a2, q2), 0) => ProofTerm::Case(new, a1.clone(), q1.clone(), a2.clone(), q2.clone()),
        (ProofTerm::Case(s, a1, _, a2, q2), 1) => ProofTerm::Case(s.clone(), a1.clone(), new, a2.clone(), q2.clone()),
        (ProofTerm::Case(s, a1, q1, a2, _), 2) => ProofTerm::Case(s.clone(), a1.clone(), q1.clone(), a2.clone(), new),
        _ => unreachable!("child index out of range"),
    }
}

/// One leftmost-outermost beta step, or `None` if `p` is normal.
pub fn step(p: &ProofTerm) -> Option<ProofTerm> {
    step_with(p, Order::LeftmostOutermost)
}

pub fn step_with(p: &ProofTerm, order: Order) -> Option<ProofTerm> {
    if order == Order::LeftmostOutermost {
        if let Some(q) = contract(p) {
            return Some(q);
        }
    }
    let kids = children(p);
    let indices: Vec<usize> = match order {
        Order::LeftmostOutermost => (0..kids.len()).collect(),
        Order::RightmostInnermost => (0..kids.len()).rev().collect(),
    };
    for i in indices {
        if let Some(q) = step_with(kids[i], order) {
            return Some(replace_child(p, i, q));
        }
    }
    match order {
        Order::LeftmostOutermost => None,
        Order::RightmostInnermost => contract(p),
    }
}

/// Reduces to beta normal form, taking at most `fuel` steps.
pub fn beta_nf(p: &ProofTerm, fuel: usize) -> Result<ProofTerm, ReductionError> {
    beta_nf_with(p, fuel, Order::LeftmostOutermost)
}

pub fn beta_nf_with(p: &ProofTerm, fuel: usize, order: Order) -> Result<ProofTerm, ReductionError> {
    let mut current = p.clone();
    for _ in 0..fuel {
        match step_with(&current, order) {
            Some(next) => current = next,
            None => return Ok(current),
        }
    }
    if has_redex(&current) {
        Err(ReductionError::FuelExhausted(fuel))
    } else {
        Ok(current)
    }
}

pub fn beta_eq(p: &ProofTerm, q: &ProofTerm, fuel: usize) -> Result<bool, ReductionError> {
    Ok(alpha_eq(&beta_nf(p, fuel)?, &beta_nf(q, fuel)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_term;

    fn t(s: &str) -> ProofTerm {
        parse_term(s).unwrap()
    }

    #[test]
    fn single_steps() {
        assert_eq!(step(&t("(fun a => a) b")), Some(t("b")));
        assert_eq!(step(&t("fst (p, q)")), Some(t("p")));
        assert_eq!(step(&t("a")), None);
        assert_eq!(step(&t("(gen x => h [x]) [y]")), Some(t("h [y]")));
        assert_eq!(step(&t("dest [y, b] as [x, a] in f a [x]")), Some(t("f b [y]")));
    }

    #[test]
    fn outermost_first() {
        let p = t("(fun a => c) ((fun b => b) d)");
        assert_eq!(step(&p), Some(t("c")));
        assert_eq!(step_with(&p, Order::RightmostInnermost), Some(t("(fun a => c) d")));
    }

    #[test]
    fn normal_forms() {
        let p = t("case inl b of inl a1 => inr a1 | inr a2 => inl a2");
        assert_eq!(beta_nf(&p, 1000), Ok(t("inr b")));
        assert_eq!(beta_nf(&t("a"), 1), Ok(t("a")));
        let omega = t("(fun a => a a) (fun a => a a)");
        assert_eq!(beta_nf(&omega, 50), Err(ReductionError::FuelExhausted(50)));
    }

    #[test]
    fn equality() {
        assert_eq!(beta_eq(&t("(fun a => a) b"), &t("b"), 100), Ok(true));
        assert_eq!(beta_eq(&t("fun a => a"), &t("fun b => b"), 100), Ok(true));
        assert_eq!(beta_eq(&t("inl b"), &t("inr b"), 100), Ok(false));
    }

    #[test]
    fn substitution_avoids_capture() {
        // (fun a => fun b => a) b  ~>  fun b0 => b
        let r = beta_nf(&t("(fun a => fun b => a) b"), 10).unwrap();
        assert!(alpha_eq(&r, &t("fun c => b")));
    }
}
