//! Capture-avoiding substitution for individuals and proof terms.

use std::collections::BTreeSet;
use std::sync::Arc;

use super::{Formula, Individual, Name, ProofTerm};

/// Picks `stem0`, `stem1`, ... where `stem` is `name` without trailing digits,
/// returning the first candidate that differs from `name` and is not avoided.
pub fn fresh_variant(name: &str, avoid: impl Fn(&str) -> bool) -> Name {
    let stem = name.trim_end_matches(|c: char| c.is_ascii_digit());
    let stem = if stem.is_empty() { "v" } else { stem };
    (0u64..)
        .map(|n| format!("{stem}{n}"))
        .find(|cand| cand != name && !avoid(cand))
        .map(Name::from)
        .expect("unbounded candidate stream")
}

fn subst_individual(t: &Individual, x: &str, by: &Individual) -> Individual {
    match t {
        Individual::Var(v) if &**v == x => by.clone(),
        _ => t.clone(),
    }
}

impl Formula {
    /// `A[t/x]`, renaming binders that would capture `t`.
    pub fn subst_ind(&self, x: &str, t: &Individual) -> Formula {
        match self {
            Formula::Atom(p, args) => {
                if !args.iter().any(|a| matches!(a, Individual::Var(v) if &**v == x)) {
                    return self.clone();
                }
                Formula::Atom(p.clone(), args.iter().map(|a| subst_individual(a, x, t)).collect())
            }
            Formula::And(a, b) => Formula::And(Arc::new(a.subst_ind(x, t)), Arc::new(b.subst_ind(x, t))),
            Formula::Or(a, b) => Formula::Or(Arc::new(a.subst_ind(x, t)), Arc::new(b.subst_ind(x, t))),
            Formula::Imp(a, b) => Formula::Imp(Arc::new(a.subst_ind(x, t)), Arc::new(b.subst_ind(x, t))),
            Formula::Forall(y, body) => {
                let (y, body) = subst_under_quantifier(y, body, x, t);
                Formula::Forall(y, Arc::new(body))
            }
            Formula::Exists(y, body) => {
                let (y, body) = subst_under_quantifier(y, body, x, t);
                Formula::Exists(y, Arc::new(body))
            }
        }
    }

    /// Renames the free individual variable `x` to `y`.
    pub fn rename_ind(&self, x: &str, y: &Name) -> Formula {
        self.subst_ind(x, &Individual::Var(y.clone()))
    }

    /// Instantiates the body of a quantifier `Q v. body` at `t`.
    pub fn instantiate(var: &str, body: &Formula, t: &Individual) -> Formula {
        body.subst_ind(var, t)
    }
}

fn subst_under_quantifier(y: &Name, body: &Formula, x: &str, t: &Individual) -> (Name, Formula) {
    if &**y == x || !body.has_free_ind(x) {
        return (y.clone(), body.clone());
    }
    if t.as_var() == Some(y) {
        let fv = body.free_ind_vars();
        let fresh = fresh_variant(y, |c| fv.contains(c) || c == x || c == &**t.name());
        let renamed = body.rename_ind(y, &fresh);
        (fresh, renamed.subst_ind(x, t))
    } else {
        (y.clone(), body.subst_ind(x, t))
    }
}

impl ProofTerm {
    /// `p[q/a]` for proof variables, renaming proof and individual binders on demand.
    pub fn subst_proof(&self, a: &str, q: &ProofTerm) -> ProofTerm {
        if !self.free_proof_vars().iter().any(|v| &**v == a) {
            return self.clone();
        }
        let fv_proof = q.free_proof_vars();
        let fv_ind = q.free_ind_vars();
        self.subst_proof_with(a, q, &fv_proof, &fv_ind)
    }

    fn subst_proof_with(
        &self,
        a: &str,
        q: &ProofTerm,
        fvp: &BTreeSet<Name>,
        fvi: &BTreeSet<Name>,
    ) -> ProofTerm {
        let go = |p: &Arc<ProofTerm>| Arc::new(p.subst_proof_with(a, q, fvp, fvi));
        match self {
            ProofTerm::Var(b) => {
                if &**b == a {
                    q.clone()
                } else {
                    self.clone()
                }
            }
            ProofTerm::Lam(b, body) => {
                let (b, body) = proof_binder(b, body, a, q, fvp, fvi);
                ProofTerm::Lam(b, Arc::new(body))
            }
            ProofTerm::App(p, r) => ProofTerm::App(go(p), go(r)),
            ProofTerm::Pair(p, r) => ProofTerm::Pair(go(p), go(r)),
            ProofTerm::Proj1(p) => ProofTerm::Proj1(go(p)),
            ProofTerm::Proj2(p) => ProofTerm::Proj2(go(p)),
            ProofTerm::Inj1(p) => ProofTerm::Inj1(go(p)),
            ProofTerm::Inj2(p) => ProofTerm::Inj2(go(p)),
            ProofTerm::Case(s, a1, q1, a2, q2) => {
                let (a1, q1) = proof_binder(a1, q1, a, q, fvp, fvi);
                let (a2, q2) = proof_binder(a2, q2, a, q, fvp, fvi);
                ProofTerm::Case(go(s), a1, Arc::new(q1), a2, Arc::new(q2))
            }
            ProofTerm::Gen(x, body) => {
                let (x, body) = ind_binder_for_proof_subst(x, body, fvi);
                ProofTerm::Gen(x, Arc::new(body.subst_proof_with(a, q, fvp, fvi)))
            }
            ProofTerm::IApp(p, t) => ProofTerm::IApp(go(p), t.clone()),
            ProofTerm::Witness(t, p) => ProofTerm::Witness(t.clone(), go(p)),
            ProofTerm::Dest(p, x, b, body) => {
                let scrutinee = go(p);
                if &**b == a {
                    return ProofTerm::Dest(scrutinee, x.clone(), b.clone(), body.clone());
                }
                let (x, body) = ind_binder_for_proof_subst(x, body, fvi);
                let (b, body) = proof_binder(b, &Arc::new(body), a, q, fvp, fvi);
                ProofTerm::Dest(scrutinee, x, b, Arc::new(body))
            }
        }
    }

    /// `p[t/x]` for individual variables.
    pub fn subst_ind(&self, x: &str, t: &Individual) -> ProofTerm {
        if !self.free_ind_vars().iter().any(|v| &**v == x) {
            return self.clone();
        }
        let go = |p: &Arc<ProofTerm>| Arc::new(p.subst_ind(x, t));
        match self {
            ProofTerm::Var(_) => self.clone(),
            ProofTerm::Lam(b, p) => ProofTerm::Lam(b.clone(), go(p)),
            ProofTerm::App(p, r) => ProofTerm::App(go(p), go(r)),
            ProofTerm::Pair(p, r) => ProofTerm::Pair(go(p), go(r)),
            ProofTerm::Proj1(p) => ProofTerm::Proj1(go(p)),
            ProofTerm::Proj2(p) => ProofTerm::Proj2(go(p)),
            ProofTerm::Inj1(p) => ProofTerm::Inj1(go(p)),
            ProofTerm::Inj2(p) => ProofTerm::Inj2(go(p)),
            ProofTerm::Case(s, a1, q1, a2, q2) => {
                ProofTerm::Case(go(s), a1.clone(), go(q1), a2.clone(), go(q2))
            }
            ProofTerm::Gen(y, body) => {
                let (y, body) = ind_binder(y, body, x, t);
                ProofTerm::Gen(y, Arc::new(body))
            }
            ProofTerm::IApp(p, s) => ProofTerm::IApp(go(p), subst_individual(s, x, t)),
            ProofTerm::Witness(s, p) => ProofTerm::Witness(subst_individual(s, x, t), go(p)),
            ProofTerm::Dest(p, y, b, body) => {
                let (y, body) = ind_binder(y, body, x, t);
                ProofTerm::Dest(go(p), y, b.clone(), Arc::new(body))
            }
        }
    }

    pub fn rename_proof(&self, a: &str, b: &Name) -> ProofTerm {
        self.subst_proof(a, &ProofTerm::Var(b.clone()))
    }

    pub fn rename_ind(&self, x: &str, y: &Name) -> ProofTerm {
        self.subst_ind(x, &Individual::Var(y.clone()))
    }
}

fn proof_binder(
    b: &Name,
    body: &Arc<ProofTerm>,
    a: &str,
    q: &ProofTerm,
    fvp: &BTreeSet<Name>,
    fvi: &BTreeSet<Name>,
) -> (Name, ProofTerm) {
    if &**b == a {
        return (b.clone(), (**body).clone());
    }
    if fvp.contains(b) && body.free_proof_vars().iter().any(|v| &**v == a) {
        let body_fv = body.free_proof_vars();
        let fresh = fresh_variant(b, |c| fvp.contains(c) || body_fv.contains(c) || c == a);
        let renamed = body.rename_proof(b, &fresh);
        (fresh, renamed.subst_proof_with(a, q, fvp, fvi))
    } else {
        (b.clone(), body.subst_proof_with(a, q, fvp, fvi))
    }
}

/// Renames an individual binder whose name occurs free in the proof term being substituted in.
fn ind_binder_for_proof_subst(x: &Name, body: &Arc<ProofTerm>, fvi: &BTreeSet<Name>) -> (Name, ProofTerm) {
    if fvi.contains(x) {
        let body_fv = body.free_ind_vars();
        let fresh = fresh_variant(x, |c| fvi.contains(c) || body_fv.contains(c));
        (fresh.clone(), body.rename_ind(x, &fresh))
    } else {
        (x.clone(), (**body).clone())
    }
}

fn ind_binder(y: &Name, body: &Arc<ProofTerm>, x: &str, t: &Individual) -> (Name, ProofTerm) {
    if &**y == x {
        return (y.clone(), (**body).clone());
    }
    if t.as_var() == Some(y) {
        let fv = body.free_ind_vars();
        let fresh = fresh_variant(y, |c| fv.contains(c) || c == x || c == &**t.name());
        (fresh.clone(), body.rename_ind(y, &fresh).subst_ind(x, t))
    } else {
        (y.clone(), body.subst_ind(x, t))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(a: &str) -> ProofTerm {
        ProofTerm::var(a)
    }

    #[test]
    fn proof_subst_base_case() {
        assert_eq!(v("a").subst_proof("a", &v("b")), v("b"));
    }

    #[test]
    fn proof_subst_respects_shadowing() {
        let p = ProofTerm::lam("a", v("a"));
        assert_eq!(p.subst_proof("a", &v("b")), p);
    }

    #[test]
    fn proof_subst_renames_capturing_binder() {
        let p = ProofTerm::lam("b", ProofTerm::app(v("a"), v("b")));
        let expected = ProofTerm::lam("b0", ProofTerm::app(v("b"), v("b0")));
        assert_eq!(p.subst_proof("a", &v("b")), expected);
    }

    #[test]
    fn proof_subst_renames_individual_binder() {
        // gen x => a, substituting a := [x, c]: the binder x must move out of the way
        let p = ProofTerm::gen("x", v("a"));
        let q = ProofTerm::witness(Individual::var("x"), v("c"));
        let out = p.subst_proof("a", &q);
        assert_eq!(out, ProofTerm::gen("x0", q));
    }

    #[test]
    fn formula_subst_atom() {
        let f = Formula::atom("P", [Individual::var("x")]);
        let c = Individual::constant("c");
        assert_eq!(f.subst_ind("x", &c), Formula::atom("P", [c.clone()]));
    }

    #[test]
    fn formula_subst_bound_occurrence() {
        let f = Formula::forall("x", Formula::atom("P", [Individual::var("x")]));
        assert_eq!(f.subst_ind("x", &Individual::constant("c")), f);
    }

    #[test]
    fn formula_subst_capture_avoidance() {
        let f = Formula::exists("y", Formula::atom("Q", [Individual::var("x"), Individual::var("y")]));
        let expected = Formula::exists("y0", Formula::atom("Q", [Individual::var("y"), Individual::var("y0")]));
        assert_eq!(f.subst_ind("x", &Individual::var("y")), expected);
    }

    #[test]
    fn fresh_variant_strips_digits() {
        assert_eq!(&*fresh_variant("b", |_| false), "b0");
        assert_eq!(&*fresh_variant("a0", |c| c == "a1"), "a2");
    }
}
