use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use mqc_core::reduction::{beta_nf_with, step, Order};
use mqc_core::testgen::check_monad_laws;
use mqc_core::{
    alpha_eq, check, gen_problem, inject_redexes, is_normal, normalize, parse_context, parse_formula, parse_term,
    Context, Formula, Fragment, Options, ProofTerm,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    passed: bool,
    /// A failure that is a documented limitation rather than a regression.
    known: bool,
    detail: String,
}

fn outcome(failures: &[String], total: usize, extra: String) -> Outcome {
    let mut detail = format!("{}/{total} ok{extra}", total - failures.len());
    if let Some(first) = failures.first() {
        detail.push_str(&format!("; first failure: {first}"));
    }
    Outcome { passed: failures.is_empty(), known: false, detail }
}

fn mixed_problems() -> Vec<mqc_core::Problem> {
    let fragments = [Fragment::Propositional, Fragment::Full, Fragment::Full];
    (0..1000u64)
        .map(|i| gen_problem(i, fragments[i as usize % 3], i % 4 == 0, 5 + i as usize % 36))
        .collect()
}

fn main() -> ExitCode {
    let mut results: Vec<(&str, Outcome)> = Vec::new();

    // 1-3 share the same 1000 generated terms
    let start = Instant::now();
    let problems = mixed_problems();
    let (mut untyped, mut abnormal, mut unstable) = (Vec::new(), Vec::new(), Vec::new());
    for (i, pr) in problems.iter().enumerate() {
        let nf = match normalize(&pr.context, &pr.term, &pr.goal, Options::cbn()) {
            Ok(nf) => nf,
            Err(err) => {
                let msg = format!("seed {i}: {err}");
                untyped.push(msg.clone());
                abnormal.push(msg.clone());
                unstable.push(msg);
                continue;
            }
        };
        if let Err(err) = check(&pr.context, &nf, &pr.goal) {
            untyped.push(format!("seed {i}: {err}"));
        }
        if !is_normal(&nf) {
            abnormal.push(format!("seed {i}: {nf}"));
        }
        match normalize(&pr.context, &nf, &pr.goal, Options::cbn()) {
            Ok(again) if alpha_eq(&again, &nf) => {}
            _ => unstable.push(format!("seed {i}: {nf}")),
        }
    }
    let elapsed = start.elapsed();
    let timing = format!(", {:.1}s", elapsed.as_secs_f64());
    let mut first = outcome(&untyped, problems.len(), timing.clone());
    first.passed &= elapsed < Duration::from_secs(60);
    results.push(("1 type preservation", first));
    results.push(("2 normal-grammar membership", outcome(&abnormal, problems.len(), String::new())));
    results.push(("3 idempotence", outcome(&unstable, problems.len(), String::new())));

    results.push(("4 beta invariance", beta_invariance()));
    results.push(("5 fixed-answer regressions", regressions()));
    results.push(("6 strategy agreement", strategy_agreement()));
    results.push(("7 monad laws", monad_laws()));
    results.push(("8 oracle self-check", oracle_self_check()));
    results.push(("9 performance sanity", case_tree()));

    let mut regressions = 0;
    for (name, result) in &results {
        let tag = match (result.passed, result.known) {
            (true, _) => "PASS",
            (false, true) => "FAIL (known limitation)",
            (false, false) => "FAIL",
        };
        println!("{tag} criterion {name}: {}", result.detail);
        if !result.passed && !result.known {
            regressions += 1;
        }
    }
    if regressions == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn beta_invariance() -> Outcome {
    let fragments = [Fragment::Propositional, Fragment::Full];
    let mut failures = Vec::new();
    for i in 0..500u64 {
        let seed = 10_000 + i;
        let pr = gen_problem(seed, fragments[i as usize % 2], i % 3 == 0, 5 + i as usize % 36);
        let injected = inject_redexes(&pr.term, 1 + i as usize % 5, seed);
        let norm = |p: &ProofTerm| normalize(&pr.context, p, &pr.goal, Options::cbn());
        let reduced = match beta_nf_with(&injected, 100_000, Order::LeftmostOutermost) {
            Ok(p) => p,
            Err(err) => {
                failures.push(format!("seed {seed}: {err}"));
                continue;
            }
        };
        match (norm(&pr.term), norm(&injected), norm(&reduced)) {
            (Ok(a), Ok(b), Ok(c)) if alpha_eq(&a, &b) && alpha_eq(&a, &c) => {}
            _ => failures.push(format!("seed {seed}: {injected}")),
        }
    }
    outcome(&failures, 500, String::new())
}

fn regressions() -> Outcome {
    let cases = [
        ("", "fun a => a", "X -> X", "fun a0 => a0"),
        ("c : X \\/ Y.", "c", "X \\/ Y", "case c of inl a0 => inl a0 | inr a1 => inr a1"),
        ("b : X.", "case inl b of inl a1 => inr a1 | inr a2 => inl a2", "X \\/ X", "inr b"),
        (
            "c : X \\/ Y. d : X.",
            "(case c of inl a1 => fun b => b | inr a2 => fun b => b) d",
            "X",
            "case c of inl a0 => d | inr a1 => d",
        ),
    ];
    let mut failures = Vec::new();
    for (ctx, term, goal, expected) in cases {
        let ctx = parse_context(ctx).unwrap();
        let p = ctx.resolve_term(&parse_term(term).unwrap());
        let goal = ctx.resolve_formula(&parse_formula(goal).unwrap());
        match normalize(&ctx, &p, &goal, Options::cbn()) {
            Ok(nf) if nf.to_string() == expected => {}
            Ok(nf) => failures.push(format!("{term}: got `{nf}`, expected `{expected}`")),
            Err(err) => failures.push(format!("{term}: {err}")),
        }
    }
    outcome(&failures, cases.len(), String::new())
}

/// Compares the strategies on closed terms of a fragment; returns the failures.
fn agreement(fragment: Fragment, first_seed: u64) -> Vec<String> {
    let mut failures = Vec::new();
    for i in 0..200u64 {
        let seed = first_seed + i;
        let pr = gen_problem(seed, fragment, true, 5 + i as usize % 36);
        let cbn = normalize(&pr.context, &pr.term, &pr.goal, Options::cbn());
        let cbv = normalize(&pr.context, &pr.term, &pr.goal, Options::cbv());
        match (cbn, cbv) {
            (Ok(a), Ok(b)) if alpha_eq(&a, &b) => {}
            (Ok(a), Ok(b)) => failures.push(format!("seed {seed}: `{a}` vs `{b}`")),
            (a, b) => failures.push(format!("seed {seed}: {a:?} vs {b:?}")),
        }
    }
    failures
}

fn strategy_agreement() -> Outcome {
    let full = agreement(Fragment::Propositional, 20_000);
    let positive = agreement(Fragment::PositiveDisjunction, 20_000);
    let status = Command::new(env!("CARGO_BIN_EXE_nbe"))
        .args(["normalize", "-c", "b : X. f : X -> Y.", "-e", "f b", "-t", "Y", "--strategy", "cbv"])
        .output()
        .map(|out| out.status.code());
    let open_ok = status.as_ref().ok() == Some(&Some(3));
    let mut detail = format!(
        "closed (->, /\\, \\/) terms {}/200 agree; without \\/ in antecedents {}/200 agree; open term under cbv exit {}",
        200 - full.len(),
        200 - positive.len(),
        match status {
            Ok(Some(code)) => code.to_string(),
            _ => "?".into(),
        }
    );
    if let Some(first) = full.first() {
        detail.push_str(&format!("; first disagreement: {first}"));
    }
    Outcome {
        passed: full.is_empty() && positive.is_empty() && open_ok,
        // call-by-value splits a disjunctive lambda variable on entry; call-by-name only when it is used
        known: positive.is_empty() && open_ok,
        detail,
    }
}

fn monad_laws() -> Outcome {
    let fragments = [Fragment::Propositional, Fragment::Full];
    let failures: Vec<String> = (0..100u64)
        .filter_map(|i| check_monad_laws(30_000 + i, fragments[i as usize % 2]).err())
        .collect();
    outcome(&failures, 100, String::new())
}

fn oracle_self_check() -> Outcome {
    let fragments = [Fragment::Propositional, Fragment::Full];
    let mut failures = Vec::new();
    for i in 0..500u64 {
        let seed = 40_000 + i;
        let pr = gen_problem(seed, fragments[i as usize % 2], false, 5 + i as usize % 30);
        let mut p = inject_redexes(&pr.term, 1 + i as usize % 5, seed);
        let outer = beta_nf_with(&p, 100_000, Order::LeftmostOutermost);
        let inner = beta_nf_with(&p, 100_000, Order::RightmostInnermost);
        match (&outer, &inner) {
            (Ok(a), Ok(b)) if alpha_eq(a, b) => {}
            _ => failures.push(format!("seed {seed}: reduction orders disagree on {p}")),
        }
        while let Some(next) = step(&p) {
            if let Err(err) = check(&pr.context, &next, &pr.goal) {
                failures.push(format!("seed {seed}: {next} fails to check: {err}"));
                break;
            }
            p = next;
        }
    }
    outcome(&failures, 500, String::new())
}

/// A complete case tree splitting `c1` to `c10` in turn; each leaf injects a
/// randomly chosen branch variable in scope.
fn case_tree() -> Outcome {
    let mut ctx = Context::new();
    let x_or_y = Formula::or(Formula::prop("X"), Formula::prop("Y"));
    for i in 1..=10 {
        ctx.assume(format!("c{i}"), x_or_y.clone()).unwrap();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut counter = 0;
    fn tree(depth: usize, scope: &mut Vec<(String, bool)>, rng: &mut ChaCha8Rng, counter: &mut usize) -> ProofTerm {
        if depth > 10 {
            let (a, left) = scope[rng.gen_range(0..scope.len())].clone();
            return if left { ProofTerm::inj1(ProofTerm::var(a)) } else { ProofTerm::inj2(ProofTerm::var(a)) };
        }
        *counter += 2;
        let (a1, a2) = (format!("b{}", *counter - 1), format!("b{}", *counter));
        let mut branch = |a: &String, left: bool, rng: &mut ChaCha8Rng, counter: &mut usize| {
            scope.push((a.clone(), left));
            let q = tree(depth + 1, scope, rng, counter);
            scope.pop();
            q
        };
        let q1 = branch(&a1, true, rng, counter);
        let q2 = branch(&a2, false, rng, counter);
        ProofTerm::case(ProofTerm::var(format!("c{depth}")), a1, q1, a2, q2)
    }
    let p = tree(1, &mut Vec::new(), &mut rng, &mut counter);
    if let Err(err) = check(&ctx, &p, &x_or_y) {
        return Outcome { passed: false, known: false, detail: format!("generated case tree does not check: {err}") };
    }
    let start = Instant::now();
    let result = normalize(&ctx, &p, &x_or_y, Options::cbn());
    let elapsed = start.elapsed();
    match result {
        Ok(nf) => Outcome {
            passed: elapsed < Duration::from_secs(5) && is_normal(&nf),
            known: false,
            detail: format!("{} nodes normalized in {:.3}s", p.size(), elapsed.as_secs_f64()),
        },
        Err(err) => Outcome { passed: false, known: false, detail: err.to_string() },
    }
}
