use std::fs;
use std::path::Path;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mqc_core::reduction::{beta_nf_with, Order};
use mqc_core::{
    alpha_eq, check, gen_problem, inject_redexes, is_normal, normalize, parse_context, parse_formula, parse_term,
    Context, Formula, Fragment, NbeError, Options, ParseError, ProofTerm, ReductionError, TypeError,
};

#[derive(Parser)]
#[command(name = "nbe", version, about = "Proof checking and normalization for minimal predicate logic")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a term against a formula.
    Check(Problem),
    /// Print the normal form of a term.
    Normalize {
        #[command(flatten)]
        problem: Problem,
        #[arg(long, value_enum, default_value_t = StrategyArg::Cbn)]
        strategy: StrategyArg,
        /// Re-check every intermediate answer.
        #[arg(long)]
        validate: bool,
    },
    /// Print the beta normal form computed by step-wise reduction.
    Reduce {
        #[arg(short, long, value_name = "FILE|TEXT")]
        context: Option<String>,
        #[arg(short, long, value_name = "TERM")]
        expr: String,
        /// If given, the term is checked against this formula first.
        #[arg(short = 't', long = "type", value_name = "FORMULA")]
        formula: Option<String>,
        #[arg(long, default_value_t = 100_000)]
        fuel: usize,
        #[arg(long, value_enum, default_value_t = OrderArg::Outermost)]
        order: OrderArg,
    },
    /// Normalize two terms of the same formula and compare the results.
    Equal {
        #[arg(short, long, value_name = "FILE|TEXT")]
        context: Option<String>,
        #[arg(short, long = "expr", value_name = "TERM", num_args = 1, required = true)]
        exprs: Vec<String>,
        #[arg(short = 't', long = "type", value_name = "FORMULA")]
        formula: String,
        #[arg(long, value_enum, default_value_t = StrategyArg::Cbn)]
        strategy: StrategyArg,
    },
    /// Print a generated problem: context, goal and term.
    Gen {
        #[command(flatten)]
        gen: GenArgs,
        /// Number of beta expansions to inject into the term.
        #[arg(long, default_value_t = 0)]
        redexes: usize,
    },
    /// Run the normalizer over generated problems and report failures.
    Harness {
        #[command(flatten)]
        gen: GenArgs,
        #[arg(long, default_value_t = 100)]
        count: u64,
        #[arg(long, default_value_t = 3)]
        redexes: usize,
        #[arg(long, default_value_t = 100_000)]
        fuel: usize,
    },
}

#[derive(Args)]
struct Problem {
    /// Context file, or the context text itself.
    #[arg(short, long, value_name = "FILE|TEXT")]
    context: Option<String>,
    /// Term file, or the term text itself.
    #[arg(short, long, value_name = "TERM")]
    expr: String,
    #[arg(short = 't', long = "type", value_name = "FORMULA")]
    formula: String,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 20)]
    size: usize,
    #[arg(long, value_enum, default_value_t = FragmentArg::Full)]
    fragment: FragmentArg,
    /// Abstract the hypotheses into the goal.
    #[arg(long)]
    closed: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Cbn,
    Cbv,
}

#[derive(Clone, Copy, ValueEnum)]
enum OrderArg {
    Outermost,
    Innermost,
}

#[derive(Clone, Copy, ValueEnum)]
enum FragmentArg {
    Prop,
    Positive,
    Full,
}

impl From<FragmentArg> for Fragment {
    fn from(f: FragmentArg) -> Fragment {
        match f {
            FragmentArg::Prop => Fragment::Propositional,
            FragmentArg::Positive => Fragment::PositiveDisjunction,
            FragmentArg::Full => Fragment::Full,
        }
    }
}

impl StrategyArg {
    fn options(self) -> Options {
        match self {
            StrategyArg::Cbn => Options::cbn(),
            StrategyArg::Cbv => Options::cbv(),
        }
    }
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn parse(what: &str, err: ParseError) -> Failure {
        Failure { code: 2, message: format!("parse error in {what}: {err}") }
    }
}

impl From<TypeError> for Failure {
    fn from(err: TypeError) -> Failure {
        Failure { code: 1, message: format!("type error: {err}") }
    }
}

impl From<NbeError> for Failure {
    fn from(err: NbeError) -> Failure {
        match err {
            NbeError::Type(err) => err.into(),
            NbeError::CbvOpenTerm => Failure { code: 3, message: format!("error: {err}") },
            err => Failure { code: 1, message: format!("normalization failed: {err}") },
        }
    }
}

impl From<ReductionError> for Failure {
    fn from(err: ReductionError) -> Failure {
        Failure { code: 4, message: format!("error: {err}") }
    }
}

/// Reads `arg` as a file if one exists at that path, else returns it verbatim.
fn text(arg: &str) -> Result<String, Failure> {
    let path = Path::new(arg);
    if arg.len() < 4096 && path.is_file() {
        fs::read_to_string(path).map_err(|err| Failure { code: 2, message: format!("cannot read {arg}: {err}") })
    } else {
        Ok(arg.to_string())
    }
}

fn context(arg: Option<&str>) -> Result<Context, Failure> {
    match arg {
        Some(arg) => parse_context(&text(arg)?).map_err(|e| Failure::parse("context", e)),
        None => Ok(Context::new()),
    }
}

fn term(ctx: &Context, arg: &str) -> Result<ProofTerm, Failure> {
    let p = parse_term(&text(arg)?).map_err(|e| Failure::parse("term", e))?;
    Ok(ctx.resolve_term(&p))
}

fn formula(ctx: &Context, arg: &str) -> Result<Formula, Failure> {
    let f = parse_formula(arg).map_err(|e| Failure::parse("formula", e))?;
    Ok(ctx.resolve_formula(&f))
}

fn load(problem: &Problem) -> Result<(Context, ProofTerm, Formula), Failure> {
    let ctx = context(problem.context.as_deref())?;
    let goal = formula(&ctx, &problem.formula)?;
    let p = term(&ctx, &problem.expr)?;
    Ok((ctx, p, goal))
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Check(problem) => {
            let (ctx, p, goal) = load(&problem)?;
            check(&ctx, &p, &goal)?;
            println!("ok : {goal}");
        }
        Command::Normalize { problem, strategy, validate } => {
            let (ctx, p, goal) = load(&problem)?;
            let mut options = strategy.options();
            options.validate = validate;
            println!("{}", normalize(&ctx, &p, &goal, options)?);
        }
        Command::Reduce { context: c, expr, formula: f, fuel, order } => {
            let ctx = context(c.as_deref())?;
            let p = term(&ctx, &expr)?;
            if let Some(f) = f {
                check(&ctx, &p, &formula(&ctx, &f)?)?;
            }
            let order = match order {
                OrderArg::Outermost => Order::LeftmostOutermost,
                OrderArg::Innermost => Order::RightmostInnermost,
            };
            println!("{}", beta_nf_with(&p, fuel, order)?);
        }
        Command::Equal { context: c, exprs, formula: f, strategy } => {
            if exprs.len() != 2 {
                return Err(Failure { code: 2, message: "equal takes exactly two -e terms".into() });
            }
            let ctx = context(c.as_deref())?;
            let goal = formula(&ctx, &f)?;
            let left = normalize(&ctx, &term(&ctx, &exprs[0])?, &goal, strategy.options())?;
            let right = normalize(&ctx, &term(&ctx, &exprs[1])?, &goal, strategy.options())?;
            if alpha_eq(&left, &right) {
                println!("equal");
            } else {
                println!("not equal\n  {left}\n  {right}");
                return Err(Failure { code: 1, message: String::new() });
            }
        }
        Command::Gen { gen, redexes } => {
            let problem = gen_problem(gen.seed, gen.fragment.into(), gen.closed, gen.size);
            let p = inject_redexes(&problem.term, redexes, gen.seed);
            print!("{}", problem.context);
            println!("# goal: {}", problem.goal);
            println!("# term: {p}");
        }
        Command::Harness { gen, count, redexes, fuel } => harness(&gen, count, redexes, fuel)?,
    }
    Ok(())
}

fn harness(gen: &GenArgs, count: u64, redexes: usize, fuel: usize) -> Result<(), Failure> {
    let mut failures = 0;
    for seed in gen.seed..gen.seed + count {
        let problem = gen_problem(seed, gen.fragment.into(), gen.closed, gen.size);
        let (ctx, goal) = (&problem.context, &problem.goal);
        let report = |what: &str| println!("seed {seed}: {what}\n  term: {}\n  goal: {goal}", problem.term);
        let nf = match normalize(ctx, &problem.term, goal, Options::cbn()) {
            Ok(nf) => nf,
            Err(err) => {
                report(&format!("normalize failed: {err}"));
                failures += 1;
                continue;
            }
        };
        let injected = inject_redexes(&problem.term, redexes, seed);
        let mut problems = Vec::new();
        if check(ctx, &nf, goal).is_err() {
            problems.push("normal form does not check".to_string());
        }
        if !is_normal(&nf) {
            problems.push("result is not normal".to_string());
        }
        match normalize(ctx, &nf, goal, Options::cbn()) {
            Ok(again) if alpha_eq(&again, &nf) => {}
            _ => problems.push("normalization is not idempotent".to_string()),
        }
        match normalize(ctx, &injected, goal, Options::cbn()) {
            Ok(other) if alpha_eq(&other, &nf) => {}
            _ => problems.push(format!("injected term {injected} normalizes differently")),
        }
        match beta_nf_with(&problem.term, fuel, Order::LeftmostOutermost) {
            Ok(reduced) => match normalize(ctx, &reduced, goal, Options::cbn()) {
                Ok(other) if alpha_eq(&other, &nf) => {}
                _ => problems.push("beta normal form normalizes differently".to_string()),
            },
            Err(err) => problems.push(err.to_string()),
        }
        if matches!(gen.fragment, FragmentArg::Positive) && !ctx.has_hypotheses() {
            match normalize(ctx, &problem.term, goal, Options::cbv()) {
                Ok(other) if alpha_eq(&other, &nf) => {}
                _ => problems.push("call-by-value disagrees".to_string()),
            }
        }
        if !problems.is_empty() {
            failures += 1;
            report(&problems.join("; "));
        }
    }
    println!("{} of {count} problems passed", count - failures);
    if failures == 0 {
        Ok(())
    } else {
        Err(Failure { code: 1, message: format!("{failures} problems failed") })
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            if !failure.message.is_empty() {
                eprintln!("{}", failure.message);
            }
            ExitCode::from(failure.code)
        }
    }
}
