use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use avon::gen;
use avon::model::{load_model, parse_value_str};
use avon::proofcheck::{check_proof, load_script};
use avon::semantics::{
    classify, is_expr_diag, is_sentence, meaning, states, Context, Interpretation, State,
};
use avon::syntax::{depth, parse, render, Expr, Op, SymbolTable, RESERVED};

#[derive(Parser)]
#[command(name = "avon", about = "Check proof scripts and evaluate expressions over finite models", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a proof script
    Check(CheckArgs),
    /// Evaluate an expression in a context and state
    Eval(EvalArgs),
    /// Classify an expression and test well-formedness
    Wf(WfArgs),
    /// Run the parser round-trip property suite
    Roundtrip(RoundtripArgs),
}

#[derive(Args)]
struct CheckArgs {
    /// Path to the proof script
    script: PathBuf,
    /// Report format: `human` (default) or `json-lines`
    #[arg(long, default_value = "human")]
    report: String,
}

#[derive(Args)]
struct EvalArgs {
    /// Model file assigning values to constants
    #[arg(long)]
    model: PathBuf,
    /// Context as `x:expr,…`
    #[arg(long, default_value = "")]
    context: String,
    /// State as `x=value,…` (model-file value literals)
    #[arg(long, default_value = "")]
    state: String,
    /// The expression to evaluate
    expr: String,
}

#[derive(Args)]
struct WfArgs {
    /// Model file assigning values to constants
    #[arg(long)]
    model: Option<PathBuf>,
    /// Context as `x:expr,…`
    #[arg(long, default_value = "")]
    context: String,
    /// The expression to classify; with two positionals the first is the
    /// context and the second the expression
    #[arg(num_args = 1..=2, required = true)]
    expr: Vec<String>,
}

#[derive(Args)]
struct RoundtripArgs {
    /// Number of generated expressions
    #[arg(long, default_value_t = 1000)]
    cases: usize,
    /// Generator seed; the AVON_SEED environment variable overrides the
    /// default, this flag overrides both
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Check(args) => cmd_check(args),
        Command::Eval(args) => cmd_eval(args),
        Command::Wf(args) => cmd_wf(args),
        Command::Roundtrip(args) => cmd_roundtrip(args),
    }
}

#[derive(Serialize)]
struct StepRecord<'a> {
    id: usize,
    schema: &'a str,
    verdict: &'a str,
    witness: Option<&'a str>,
}

fn cmd_check(args: CheckArgs) -> ExitCode {
    let script = match load_script(&args.script) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let verdict = check_proof(&script);
    match args.report.as_str() {
        "json-lines" => {
            for step in &verdict.steps {
                let record = StepRecord {
                    id: step.id,
                    schema: &step.schema,
                    verdict: if step.ok { "ok" } else { "fail" },
                    witness: step.detail.as_deref(),
                };
                println!("{}", serde_json::to_string(&record).unwrap());
            }
        }
        _ => {
            for step in &verdict.steps {
                match &step.detail {
                    Some(detail) if !step.ok => {
                        println!("step {}: FAIL  {}  {detail}", step.id, step.schema)
                    }
                    _ => println!("step {}: ok  {}", step.id, step.schema),
                }
            }
            let ok = verdict.steps.iter().filter(|s| s.ok).count();
            println!("{ok}/{} steps verified", verdict.steps.len());
        }
    }
    if verdict.accepted {
        ExitCode::SUCCESS
    } else {
        if let Some((id, detail)) = &verdict.first_failure {
            eprintln!("rejected at step {id}: {detail}");
        }
        ExitCode::from(1)
    }
}

/// Tokenizing eval/wf input needs every name classified. Names bound by the
/// context or the model are known; any other identifier-looking chunk is
/// declared as a variable, which is what exploratory use wants.
fn autodeclare(table: &mut SymbolTable, text: &str) {
    let mut word = String::new();
    let flush = |w: &mut String, table: &mut SymbolTable| {
        if w.is_empty() {
            return;
        }
        let known = table.is_variable(w)
            || table.is_constant(w)
            || Op::from_spelling(w).is_some();
        if !known {
            let _ = table.declare_variable(w);
        }
        w.clear();
    };
    for c in text.chars() {
        let breaker = RESERVED.contains(&c)
            || c.is_whitespace()
            || Op::from_spelling(&c.to_string()).is_some();
        if breaker {
            flush(&mut word, table);
        } else {
            word.push(c);
        }
    }
    flush(&mut word, table);
}

/// Split `x:expr,…` / `x=value,…` lists at top-level commas, tracking
/// both parentheses and braces.
fn split_bindings(text: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in text.char_indices() {
        match c {
            '(' | '{' => depth += 1,
            ')' | '}' => depth -= 1,
            ',' if depth == 0 => {
                parts.push(&text[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&text[start..]);
    parts.into_iter().filter(|p| !p.trim().is_empty()).collect()
}

fn load_context(
    context_arg: &str,
    table: &mut SymbolTable,
    interp: &Interpretation,
) -> Result<Context, String> {
    let mut pairs: Vec<(String, Expr)> = Vec::new();
    for piece in split_bindings(context_arg) {
        let (var, dom_text) = piece
            .split_once(':')
            .ok_or_else(|| format!("context entry `{piece}` is not of the form var:expr"))?;
        let var = var.trim();
        table
            .declare_variable(var)
            .map_err(|e| format!("context variable `{var}`: {e}"))?;
        autodeclare(table, dom_text);
        let dom = parse(dom_text.trim(), table).map_err(|e| format!("context domain: {e}"))?;
        pairs.push((var.to_string(), dom));
    }
    Context::from_pairs(&pairs, interp).map_err(|e| e.to_string())
}

fn load_state(state_arg: &str, ctx: &Context) -> Result<State, String> {
    let mut sigma = State::empty();
    for piece in split_bindings(state_arg) {
        let (var, value_text) = piece
            .split_once('=')
            .ok_or_else(|| format!("state entry `{piece}` is not of the form var=value"))?;
        let value = parse_value_str(value_text.trim())?;
        sigma = sigma.extended(var.trim(), value);
    }
    // entries must mirror the context order
    let vars: Vec<&str> = ctx.entries().iter().map(|(v, _)| v.as_str()).collect();
    let given: Vec<&str> = sigma.entries().iter().map(|(v, _)| v.as_str()).collect();
    if vars != given {
        return Err(format!(
            "state domain {given:?} does not match context domain {vars:?}"
        ));
    }
    Ok(sigma)
}

fn cmd_eval(args: EvalArgs) -> ExitCode {
    let fail = |msg: String| -> ExitCode {
        eprintln!("error: {msg}");
        ExitCode::from(2)
    };
    let (mut table, interp) = match load_model(&args.model) {
        Ok(x) => x,
        Err(e) => return fail(e.to_string()),
    };
    let ctx = match load_context(&args.context, &mut table, &interp) {
        Ok(c) => c,
        Err(e) => return fail(e),
    };
    let sigma = match load_state(&args.state, &ctx) {
        Ok(s) => s,
        Err(e) => return fail(e),
    };
    match states(&ctx, &interp) {
        Ok(all) if !all.contains(&sigma) => {
            return fail(format!("state {sigma} is not a state of the context"))
        }
        Err(e) => return fail(e.to_string()),
        _ => {}
    }
    autodeclare(&mut table, &args.expr);
    let expr = match parse(&args.expr, &table) {
        Ok(e) => e,
        Err(e) => return fail(e.to_string()),
    };
    if let Err(e) = is_expr_diag(&ctx, &expr, &interp) {
        return fail(e.to_string());
    }
    match meaning(&ctx, &expr, &sigma, &interp) {
        Ok(v) => {
            println!("{v}");
            ExitCode::SUCCESS
        }
        Err(e) => fail(e.to_string()),
    }
}

fn cmd_wf(args: WfArgs) -> ExitCode {
    let (mut table, interp) = match &args.model {
        Some(path) => match load_model(path) {
            Ok(x) => x,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
        },
        None => (SymbolTable::new(), Interpretation::new()),
    };
    let (context_arg, expr_arg) = match args.expr.as_slice() {
        [ctx, expr] => (ctx.as_str(), expr.as_str()),
        [expr] => (args.context.as_str(), expr.as_str()),
        _ => unreachable!("clap enforces 1..=2 positionals"),
    };
    let ctx = match load_context(context_arg, &mut table, &interp) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    autodeclare(&mut table, expr_arg);
    let expr = match parse(expr_arg, &table) {
        Ok(e) => e,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let case = match classify(&ctx, &expr) {
        Ok(c) => c.case_name().to_string(),
        Err(e) => {
            println!("not an expression: {e}");
            return ExitCode::from(1);
        }
    };
    match is_expr_diag(&ctx, &expr, &interp) {
        Ok(()) => {
            let sentence = if is_sentence(&ctx, &expr, &interp) {
                "sentence"
            } else {
                "not a sentence"
            };
            println!("case {case}, {sentence}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            println!("case {case}, not an expression: {e}");
            ExitCode::from(1)
        }
    }
}

fn cmd_roundtrip(args: RoundtripArgs) -> ExitCode {
    let seed = args.seed.unwrap_or_else(gen::env_seed);
    let mut rng = gen::rng_from_seed(seed);
    let table = gen::gen_table();
    let mut failures = 0usize;
    for case in 0..args.cases {
        let e = gen::gen_expr(&mut rng, 4);
        let text = render(&e);
        match parse(&text, &table) {
            Ok(back) if back == e => {}
            Ok(back) => {
                failures += 1;
                eprintln!(
                    "case {case}: reparse mismatch\n  rendered: {text}\n  reparsed: {}",
                    render(&back)
                );
            }
            Err(err) => {
                failures += 1;
                eprintln!("case {case}: `{text}` does not reparse: {err}");
            }
        }
        // rendered strings satisfy the three depth conditions
        let chars: Vec<char> = text.chars().collect();
        let len = chars.len();
        let last = chars[len - 1];
        let dlast = depth(&text, len).unwrap();
        if last == '(' {
            failures += 1;
            eprintln!("case {case}: `{text}` ends with `(`");
        }
        if (last == ')' && dlast != 1) || (last != ')' && dlast != 0) {
            failures += 1;
            eprintln!("case {case}: `{text}` violates the final-depth condition");
        }
        for (i, c) in chars.iter().enumerate() {
            if matches!(c, ':' | ',' | ')') && depth(&text, i + 1).unwrap() < 1 {
                failures += 1;
                eprintln!("case {case}: `{text}` has {c} at depth 0 (position {})", i + 1);
                break;
            }
        }
    }
    if failures == 0 {
        println!("{} expressions round-tripped (seed {seed})", args.cases);
        ExitCode::SUCCESS
    } else {
        eprintln!("{failures} failures out of {} cases (seed {seed})", args.cases);
        ExitCode::from(1)
    }
}
