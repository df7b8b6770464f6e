//! Proof scripts: a line-oriented format naming a model, the variables, a
//! numbered sequence of sentences with fully pinned justifications, and the
//! goal. Checking replays every justification and then re-evaluates every
//! statement as a soundness and consistency guard.

use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::calculus::{
    admit_semantic_axiom, check_instance, Instantiation, MetaVar, SchemaId,
};
use crate::model::{load_model, ModelError};
use crate::semantics::{is_sentence_diag, meaning, Context, Interpretation, State};
use crate::syntax::{parse, render, Expr, Op, SymbolTable};

#[derive(Debug, Error)]
pub enum ScriptError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("line {line}: duplicate or non-increasing step id {id}")]
    DuplicateStepId { line: usize, id: usize },
    #[error("line {line}: step {id} cites step {premise}, which is not an earlier step")]
    ForwardReference {
        line: usize,
        id: usize,
        premise: usize,
    },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// A justification is either a semantic admission or a pinned schema
/// application citing earlier steps.
#[derive(Debug, Clone)]
pub enum Justification {
    Semantic,
    Schema {
        inst: Instantiation,
        premises: Vec<usize>,
    },
}

impl Justification {
    pub fn schema_token(&self) -> &'static str {
        match self {
            Justification::Semantic => "semantic",
            Justification::Schema { inst, .. } => inst.schema.token(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Step {
    pub id: usize,
    pub line: usize,
    pub statement: Expr,
    pub justification: Justification,
}

#[derive(Debug)]
pub struct ProofScript {
    pub model_path: PathBuf,
    pub table: SymbolTable,
    pub interp: Interpretation,
    pub steps: Vec<Step>,
    pub goal: Expr,
}

/// Per-step outcome, in script order.
#[derive(Debug, Clone)]
pub struct StepReport {
    pub id: usize,
    pub schema: String,
    pub ok: bool,
    pub detail: Option<String>,
}

/// Outcome of checking a whole script.
#[derive(Debug)]
pub struct Verdict {
    pub accepted: bool,
    pub steps: Vec<StepReport>,
    /// First failing step id and its diagnostic.
    pub first_failure: Option<(usize, String)>,
    pub elapsed: Duration,
}

fn strip_comment(line: &str) -> &str {
    let chars: Vec<(usize, char)> = line.char_indices().collect();
    for (i, (byte_pos, c)) in chars.iter().enumerate() {
        if *c == '#' {
            let next_is_digit = chars.get(i + 1).is_some_and(|(_, n)| n.is_ascii_digit());
            if !next_is_digit {
                return &line[..*byte_pos];
            }
        }
    }
    line
}

/// Split `text` at top-level commas, tracking parenthesis depth.
fn split_top_level(text: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in text.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                parts.push(&text[start..i]);
                start = i + c.len_utf8();
            }
            _ => {}
        }
    }
    parts.push(&text[start..]);
    parts
}

/// Scan `word(...)` arguments with balanced parentheses; returns the
/// argument text and the position after the closing parenthesis.
fn scan_parenthesized(text: &str, open: usize) -> Option<(&str, usize)> {
    debug_assert_eq!(&text[open..open + 1], "(");
    let mut depth = 0i32;
    for (i, c) in text[open..].char_indices() {
        match c {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth == 0 {
                    let inner = &text[open + 1..open + i];
                    return Some((inner, open + i + 1));
                }
            }
            _ => {}
        }
    }
    None
}

struct ByLine {
    schema: SchemaId,
    premises: Vec<usize>,
    binders: Vec<(String, Expr)>,
    exprs: Vec<(MetaVar, Expr)>,
    index: Option<usize>,
}

fn parse_by_line(
    line: &str,
    line_no: usize,
    table: &SymbolTable,
) -> Result<ByLine, ScriptError> {
    let err = |reason: String| ScriptError::Parse {
        line: line_no,
        reason,
    };
    let rest = line.trim().strip_prefix("by").ok_or_else(|| {
        err("expected a `by <schema>` justification line".to_string())
    })?;
    let rest = rest.trim_start();
    let (schema_tok, mut rest) = match rest.find(char::is_whitespace) {
        Some(i) => (&rest[..i], rest[i..].trim_start()),
        None => (rest, ""),
    };
    let schema = SchemaId::from_token(schema_tok)
        .ok_or_else(|| err(format!("unknown schema `{schema_tok}`")))?;
    let mut by = ByLine {
        schema,
        premises: Vec::new(),
        binders: Vec::new(),
        exprs: Vec::new(),
        index: None,
    };
    while !rest.is_empty() {
        let word_end = rest
            .find(|c: char| c.is_whitespace() || c == '(')
            .unwrap_or(rest.len());
        let word = &rest[..word_end];
        if word == "from" {
            let tail = rest[word_end..].trim_start();
            let list_end = tail
                .find(|c: char| !(c.is_ascii_digit() || c == ','))
                .unwrap_or(tail.len());
            let list = &tail[..list_end];
            if list.is_empty() {
                return Err(err("`from` needs a step-id list".to_string()));
            }
            for piece in list.split(',') {
                let id: usize = piece
                    .parse()
                    .map_err(|_| err(format!("bad step id `{piece}` in `from`")))?;
                by.premises.push(id);
            }
            rest = tail[list_end..].trim_start();
            continue;
        }
        let open = rest[word_end..].starts_with('(');
        if !open {
            return Err(err(format!("unexpected token `{word}`")));
        }
        let (arg, after) = scan_parenthesized(rest, word_end)
            .ok_or_else(|| err(format!("unbalanced argument of `{word}`")))?;
        match word {
            "binders" => {
                for piece in split_top_level(arg) {
                    let piece = piece.trim();
                    let (var, dom_text) = piece.split_once(':').ok_or_else(|| {
                        err(format!("binder `{piece}` is not of the form var:expr"))
                    })?;
                    let dom = parse(dom_text.trim(), table)
                        .map_err(|e| err(format!("binder domain: {e}")))?;
                    by.binders.push((var.trim().to_string(), dom));
                }
            }
            "i" => {
                by.index = Some(
                    arg.trim()
                        .parse()
                        .map_err(|_| err(format!("bad index `{arg}`")))?,
                );
            }
            _ => match MetaVar::from_token(word) {
                Some(mv) => {
                    let e = parse(arg.trim(), table)
                        .map_err(|e| err(format!("metavariable {word}: {e}")))?;
                    by.exprs.push((mv, e));
                }
                None => return Err(err(format!("unknown metavariable `{word}`"))),
            },
        }
        rest = rest[after..].trim_start();
    }
    Ok(by)
}

/// Parse a proof script and load its model. A relative model path is
/// resolved against the script's directory.
pub fn load_script(path: &Path) -> Result<ProofScript, ScriptError> {
    let text = std::fs::read_to_string(path).map_err(|source| ScriptError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let base = path.parent().unwrap_or(Path::new("."));

    let mut model: Option<(PathBuf, SymbolTable, Interpretation)> = None;
    let mut var_names: Vec<(usize, String)> = Vec::new();
    let mut steps: Vec<Step> = Vec::new();
    let mut pending: Option<(usize, usize, Expr)> = None; // (id, line, statement)
    let mut goal_id: Option<(usize, usize)> = None;

    let err = |line: usize, reason: String| ScriptError::Parse { line, reason };

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = strip_comment(raw).trim_end();
        let trimmed = line.trim_start();
        if trimmed.is_empty() {
            continue;
        }
        if goal_id.is_some() {
            return Err(err(line_no, "content after `qed`".to_string()));
        }
        if let Some(rest) = trimmed.strip_prefix("model") {
            let rest = rest.trim();
            let unquoted = rest
                .strip_prefix('"')
                .and_then(|r| r.strip_suffix('"'))
                .ok_or_else(|| err(line_no, "model path must be quoted".to_string()))?;
            let model_path = base.join(unquoted);
            let (table, interp) = load_model(&model_path)?;
            model = Some((model_path, table, interp));
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix("vars") {
            for name in rest.split_whitespace() {
                var_names.push((line_no, name.to_string()));
            }
            continue;
        }
        let Some((_, table, _)) = &mut model else {
            return Err(err(
                line_no,
                "the `model` line must precede steps".to_string(),
            ));
        };
        for (decl_line, name) in var_names.drain(..) {
            table
                .declare_variable(&name)
                .map_err(|e| err(decl_line, e.to_string()))?;
        }
        if let Some(rest) = trimmed.strip_prefix("step") {
            if pending.is_some() {
                return Err(err(
                    line_no,
                    "previous step is missing its `by` justification".to_string(),
                ));
            }
            let (id_text, stmt_text) = rest
                .split_once(':')
                .ok_or_else(|| err(line_no, "expected `step <n>: <expr>`".to_string()))?;
            let id: usize = id_text
                .trim()
                .parse()
                .map_err(|_| err(line_no, format!("bad step id `{}`", id_text.trim())))?;
            if let Some(last) = steps.last() {
                if id <= last.id {
                    return Err(ScriptError::DuplicateStepId { line: line_no, id });
                }
            }
            let statement = parse(stmt_text.trim(), table)
                .map_err(|e| err(line_no, format!("statement: {e}")))?;
            pending = Some((id, line_no, statement));
            continue;
        }
        if trimmed.starts_with("by") {
            let (id, step_line, statement) = pending.take().ok_or_else(|| {
                err(line_no, "`by` line without a preceding `step`".to_string())
            })?;
            let by = parse_by_line(trimmed, line_no, table)?;
            for &p in &by.premises {
                if p >= id || !steps.iter().any(|s| s.id == p) {
                    // citing a later step is a structural error; citing a
                    // missing earlier id is reported by the checker instead
                    if p >= id {
                        return Err(ScriptError::ForwardReference {
                            line: line_no,
                            id,
                            premise: p,
                        });
                    }
                }
            }
            let justification = if by.schema == SchemaId::Semantic {
                if !(by.premises.is_empty()
                    && by.binders.is_empty()
                    && by.exprs.is_empty()
                    && by.index.is_none())
                {
                    return Err(err(
                        line_no,
                        "`by semantic` takes no premises or metavariables".to_string(),
                    ));
                }
                Justification::Semantic
            } else {
                let mut inst = Instantiation::new(by.schema).with_binders(by.binders);
                for (mv, e) in by.exprs {
                    inst = inst.bind(mv, e);
                }
                if let Some(i) = by.index {
                    inst = inst.with_index(i);
                }
                Justification::Schema {
                    inst,
                    premises: by.premises,
                }
            };
            steps.push(Step {
                id,
                line: step_line,
                statement,
                justification,
            });
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix("qed") {
            if pending.is_some() {
                return Err(err(
                    line_no,
                    "last step is missing its `by` justification".to_string(),
                ));
            }
            let id: usize = rest
                .trim()
                .parse()
                .map_err(|_| err(line_no, format!("bad goal id `{}`", rest.trim())))?;
            goal_id = Some((line_no, id));
            continue;
        }
        return Err(err(line_no, format!("unrecognized line `{trimmed}`")));
    }

    if pending.is_some() {
        return Err(err(0, "last step is missing its `by` justification".to_string()));
    }
    let (model_path, table, interp) =
        model.ok_or_else(|| err(0, "script has no `model` line".to_string()))?;
    let (qed_line, qed) = goal_id.ok_or_else(|| err(0, "script has no `qed` line".to_string()))?;
    let last = steps
        .last()
        .ok_or_else(|| err(0, "script has no steps".to_string()))?;
    if last.id != qed {
        return Err(err(
            qed_line,
            format!("goal step {qed} is not the final step {}", last.id),
        ));
    }
    let goal = last.statement.clone();
    Ok(ProofScript {
        model_path,
        table,
        interp,
        steps,
        goal,
    })
}

/// Verify a script step by step, then re-evaluate every accepted statement
/// (soundness) and assert that no statement is accompanied by its negation
/// (consistency).
pub fn check_proof(script: &ProofScript) -> Verdict {
    let started = Instant::now();
    let interp = &script.interp;
    let empty = Context::empty();
    let mut reports = Vec::with_capacity(script.steps.len());
    let mut first_failure: Option<(usize, String)> = None;

    for step in &script.steps {
        let mut record = |ok: bool, detail: Option<String>| {
            if !ok && first_failure.is_none() {
                first_failure = Some((step.id, detail.clone().unwrap_or_default()));
            }
            reports.push(StepReport {
                id: step.id,
                schema: step.justification.schema_token().to_string(),
                ok,
                detail,
            });
        };
        if let Err(e) = is_sentence_diag(&empty, &step.statement, interp) {
            record(false, Some(format!("statement is not a closed sentence: {e}")));
            continue;
        }
        match &step.justification {
            Justification::Semantic => match admit_semantic_axiom(&step.statement, interp) {
                Ok(()) => record(true, None),
                Err(e) => record(false, Some(e.to_string())),
            },
            Justification::Schema { inst, premises } => {
                let mut resolved: Vec<&Expr> = Vec::with_capacity(premises.len());
                let mut missing = None;
                for &p in premises {
                    match script.steps.iter().find(|s| s.id == p && s.id < step.id) {
                        Some(s) => resolved.push(&s.statement),
                        None => {
                            missing = Some(p);
                            break;
                        }
                    }
                }
                if let Some(p) = missing {
                    record(false, Some(format!("cites step {p}, which is not in the script")));
                    continue;
                }
                match check_instance(inst, &resolved, &step.statement, interp) {
                    Ok(()) => record(true, None),
                    Err(e) => record(false, Some(e.to_string())),
                }
            }
        }
    }

    let mut accepted = reports.iter().all(|r| r.ok);

    if accepted {
        // Soundness post-check: every derived statement must evaluate true.
        for step in &script.steps {
            match meaning(&empty, &step.statement, &State::empty(), interp) {
                Ok(v) if v.is_true() => {}
                Ok(v) => {
                    accepted = false;
                    let detail = format!(
                        "soundness violation: step {} evaluates to {v}",
                        step.id
                    );
                    if first_failure.is_none() {
                        first_failure = Some((step.id, detail.clone()));
                    }
                    if let Some(r) = reports.iter_mut().find(|r| r.id == step.id) {
                        r.ok = false;
                        r.detail = Some(detail);
                    }
                }
                Err(e) => {
                    accepted = false;
                    if first_failure.is_none() {
                        first_failure = Some((step.id, e.to_string()));
                    }
                }
            }
        }
        // Consistency guard: no statement together with its negation.
        for step in &script.steps {
            if let Expr::OpApply { op: Op::Not, args } = &step.statement {
                if script.steps.iter().any(|s| s.statement == args[0]) {
                    accepted = false;
                    let detail = format!(
                        "consistency violation: both `{}` and its negation are derived",
                        render(&args[0])
                    );
                    if first_failure.is_none() {
                        first_failure = Some((step.id, detail.clone()));
                    }
                }
            }
        }
    }

    Verdict {
        accepted,
        steps: reports,
        first_failure,
        elapsed: started.elapsed(),
    }
}
