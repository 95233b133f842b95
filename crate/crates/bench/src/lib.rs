//! Fixtures shared by the benchmarks.

use mqc_core::{gen_problem, inject_redexes, Context, Formula, Fragment, Problem, ProofTerm};

/// `c1 .. cn : X \/ Y` and a complete case tree over them at `X \/ Y`.
pub fn case_tree(depth: usize) -> Problem {
    let mut context = Context::new();
    let goal = Formula::or(Formula::prop("X"), Formula::prop("Y"));
    for i in 1..=depth {
        context.assume(format!("c{i}"), goal.clone()).expect("distinct names");
    }
    fn tree(level: usize, depth: usize, leaf: ProofTerm) -> ProofTerm {
        if level > depth {
            return leaf;
        }
        let (a1, a2) = (format!("l{level}"), format!("r{level}"));
        let q1 = tree(level + 1, depth, ProofTerm::inj1(ProofTerm::var(a1.clone())));
        let q2 = tree(level + 1, depth, ProofTerm::inj2(ProofTerm::var(a2.clone())));
        ProofTerm::case(ProofTerm::var(format!("c{level}")), a1, q1, a2, q2)
    }
    let term = tree(1, depth, ProofTerm::var("c1"));
    Problem { context, goal, term }
}

/// Generated problems with `redexes` beta expansions injected into each term.
pub fn generated(count: u64, size: usize, redexes: usize) -> Vec<Problem> {
    (0..count)
        .map(|seed| {
            let mut problem = gen_problem(seed, Fragment::Full, false, size);
            problem.term = inject_redexes(&problem.term, redexes, seed);
            problem
        })
        .collect()
}
