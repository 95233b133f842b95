//! Alpha-equivalence: equality up to consistent renaming of bound variables.

use super::{Formula, Individual, Name, ProofTerm};

/// Pairs of binders in scope on the left and right; the most recent binding wins.
#[derive(Default)]
struct Binders {
    pairs: Vec<(Name, Name)>,
}

impl Binders {
    fn same(&self, l: &Name, r: &Name) -> bool {
        let li = self.pairs.iter().rposition(|(x, _)| x == l);
        let ri = self.pairs.iter().rposition(|(_, y)| y == r);
        match (li, ri) {
            (None, None) => l == r,
            (Some(i), Some(j)) => i == j,
            _ => false,
        }
    }

    fn under<T>(&mut self, l: &Name, r: &Name, f: impl FnOnce(&mut Self) -> T) -> T {
        self.pairs.push((l.clone(), r.clone()));
        let out = f(self);
        self.pairs.pop();
        out
    }
}

fn individual_eq(inds: &Binders, l: &Individual, r: &Individual) -> bool {
    match (l, r) {
        (Individual::Var(x), Individual::Var(y)) => inds.same(x, y),
        (Individual::Const(c), Individual::Const(d)) => c == d,
        _ => false,
    }
}

fn formula_eq(inds: &mut Binders, l: &Formula, r: &Formula) -> bool {
    match (l, r) {
        (Formula::Atom(p, xs), Formula::Atom(q, ys)) => {
            p == q && xs.len() == ys.len() && xs.iter().zip(ys.iter()).all(|(x, y)| individual_eq(inds, x, y))
        }
        (Formula::And(a, b), Formula::And(c, d))
        | (Formula::Or(a, b), Formula::Or(c, d))
        | (Formula::Imp(a, b), Formula::Imp(c, d)) => formula_eq(inds, a, c) && formula_eq(inds, b, d),
        (Formula::Forall(x, a), Formula::Forall(y, b)) | (Formula::Exists(x, a), Formula::Exists(y, b)) => {
            inds.under(x, y, |inds| formula_eq(inds, a, b))
        }
        _ => false,
    }
}

fn term_eq(proofs: &mut Binders, inds: &mut Binders, l: &ProofTerm, r: &ProofTerm) -> bool {
    use ProofTerm::*;
    match (l, r) {
        (Var(a), Var(b)) => proofs.same(a, b),
        (Lam(a, p), Lam(b, q)) => proofs.under(a, b, |proofs| term_eq(proofs, inds, p, q)),
        (App(p1, q1), App(p2, q2)) | (Pair(p1, q1), Pair(p2, q2)) => {
            term_eq(proofs, inds, p1, p2) && term_eq(proofs, inds, q1, q2)
        }
        (Proj1(p), Proj1(q)) | (Proj2(p), Proj2(q)) | (Inj1(p), Inj1(q)) | (Inj2(p), Inj2(q)) => {
            term_eq(proofs, inds, p, q)
        }
        (Case(s1, a1, l1, b1, r1), Case(s2, a2, l2, b2, r2)) => {
            term_eq(proofs, inds, s1, s2)
                && proofs.under(a1, a2, |proofs| term_eq(proofs, inds, l1, l2))
                && proofs.under(b1, b2, |proofs| term_eq(proofs, inds, r1, r2))
        }
        (Gen(x, p), Gen(y, q)) => inds.under(x, y, |inds| term_eq(proofs, inds, p, q)),
        (IApp(p, s), IApp(q, t)) => individual_eq(inds, s, t) && term_eq(proofs, inds, p, q),
        (Witness(s, p), Witness(t, q)) => individual_eq(inds, s, t) && term_eq(proofs, inds, p, q),
        (Dest(p1, x1, a1, q1), Dest(p2, x2, a2, q2)) => {
            term_eq(proofs, inds, p1, p2)
                && inds.under(x1, x2, |inds| {
                    proofs.under(a1, a2, |proofs| term_eq(proofs, inds, q1, q2))
                })
        }
        _ => false,
    }
}

impl Formula {
    pub fn alpha_eq(&self, other: &Formula) -> bool {
        formula_eq(&mut Binders::default(), self, other)
    }
}

impl ProofTerm {
    pub fn alpha_eq(&self, other: &ProofTerm) -> bool {
        term_eq(&mut Binders::default(), &mut Binders::default(), self, other)
    }
}

/// Free-function form of [`ProofTerm::alpha_eq`].
pub fn alpha_eq(p: &ProofTerm, q: &ProofTerm) -> bool {
    p.alpha_eq(q)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_is_alpha_invariant() {
        assert!(alpha_eq(&ProofTerm::lam("a", ProofTerm::var("a")), &ProofTerm::lam("b", ProofTerm::var("b"))));
    }

    #[test]
    fn bound_vs_free() {
        assert!(!alpha_eq(&ProofTerm::lam("a", ProofTerm::var("a")), &ProofTerm::lam("a", ProofTerm::var("b"))));
    }

    #[test]
    fn individual_binders() {
        let l = ProofTerm::gen("x", ProofTerm::witness(Individual::var("x"), ProofTerm::var("a")));
        let r = ProofTerm::gen("y", ProofTerm::witness(Individual::var("y"), ProofTerm::var("a")));
        assert!(alpha_eq(&l, &r));
        let bad = ProofTerm::gen("y", ProofTerm::witness(Individual::var("x"), ProofTerm::var("a")));
        assert!(!alpha_eq(&l, &bad));
    }

    #[test]
    fn shadowing_is_tracked() {
        // fun a => fun b => a  vs  fun a => fun a => a
        let l = ProofTerm::lam("a", ProofTerm::lam("b", ProofTerm::var("a")));
        let r = ProofTerm::lam("a", ProofTerm::lam("a", ProofTerm::var("a")));
        assert!(!alpha_eq(&l, &r));
    }

    #[test]
    fn formulas_up_to_renaming() {
        let p = |x: &str| Formula::atom("P", [Individual::var(x)]);
        assert!(Formula::forall("x", p("x")).alpha_eq(&Formula::forall("y", p("y"))));
        assert!(!Formula::forall("x", p("x")).alpha_eq(&Formula::exists("y", p("y"))));
        assert!(!Formula::forall("x", p("z")).alpha_eq(&Formula::forall("y", p("y"))));
    }
}
