//! Concrete syntax: tokenizer, parser, renderer and string-depth analysis.
//!
//! Every expression has exactly one canonical rendering and the canonical
//! grammar is unambiguous, so the tree and its rendered string are
//! interchangeable. The renderer always emits the Unicode operator
//! spellings; ASCII aliases are accepted on input only.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

/// The fixed operator alphabet. Operators are property symbols: they carry
/// an applicability predicate and a value function rather than a meaning.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Op {
    And,
    Or,
    Implies,
    Not,
    ForAll,
    Exists,
    In,
    Eq,
    Iff,
}

impl Op {
    pub const ALL: [Op; 9] = [
        Op::And,
        Op::Or,
        Op::Implies,
        Op::Not,
        Op::ForAll,
        Op::Exists,
        Op::In,
        Op::Eq,
        Op::Iff,
    ];

    /// Canonical (Unicode) spelling.
    pub fn symbol(self) -> &'static str {
        match self {
            Op::And => "∧",
            Op::Or => "∨",
            Op::Implies => "→",
            Op::Not => "¬",
            Op::ForAll => "∀",
            Op::Exists => "∃",
            Op::In => "∈",
            Op::Eq => "=",
            Op::Iff => "↔",
        }
    }

    /// ASCII alias accepted on input.
    pub fn alias(self) -> &'static str {
        match self {
            Op::And => "/\\",
            Op::Or => "\\/",
            Op::Implies => "->",
            Op::Not => "not",
            Op::ForAll => "forall",
            Op::Exists => "exists",
            Op::In => "in",
            Op::Eq => "=",
            Op::Iff => "<->",
        }
    }

    pub fn from_spelling(s: &str) -> Option<Op> {
        Op::ALL
            .iter()
            .copied()
            .find(|op| op.symbol() == s || op.alias() == s)
    }
}

impl fmt::Display for Op {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

pub const RESERVED: [char; 6] = ['(', ')', ',', ':', '{', '}'];

fn is_reserved_char(c: char) -> bool {
    RESERVED.contains(&c) || c.is_whitespace()
}

/// Declared names of a language instance. Variables, constants and the fixed
/// operators must be pairwise disjoint and free of reserved punctuation.
#[derive(Debug, Clone, Default)]
pub struct SymbolTable {
    variables: BTreeSet<String>,
    constants: BTreeSet<String>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NameError {
    #[error("name `{0}` contains a reserved character")]
    Reserved(String),
    #[error("name `{0}` collides with an operator spelling")]
    OperatorClash(String),
    #[error("name `{0}` is already declared with a different class")]
    ClassClash(String),
    #[error("empty name")]
    Empty,
}

impl SymbolTable {
    pub fn new() -> Self {
        SymbolTable::default()
    }

    fn check_name(&self, name: &str) -> Result<(), NameError> {
        if name.is_empty() {
            return Err(NameError::Empty);
        }
        if name.chars().any(is_reserved_char) {
            return Err(NameError::Reserved(name.to_string()));
        }
        if Op::from_spelling(name).is_some() {
            return Err(NameError::OperatorClash(name.to_string()));
        }
        Ok(())
    }

    pub fn declare_variable(&mut self, name: &str) -> Result<(), NameError> {
        self.check_name(name)?;
        if self.constants.contains(name) {
            return Err(NameError::ClassClash(name.to_string()));
        }
        self.variables.insert(name.to_string());
        Ok(())
    }

    pub fn declare_constant(&mut self, name: &str) -> Result<(), NameError> {
        self.check_name(name)?;
        if self.variables.contains(name) {
            return Err(NameError::ClassClash(name.to_string()));
        }
        self.constants.insert(name.to_string());
        Ok(())
    }

    pub fn is_variable(&self, name: &str) -> bool {
        self.variables.contains(name)
    }

    pub fn is_constant(&self, name: &str) -> bool {
        self.constants.contains(name)
    }

    pub fn variables(&self) -> impl Iterator<Item = &str> {
        self.variables.iter().map(|s| s.as_str())
    }

    pub fn constants(&self) -> impl Iterator<Item = &str> {
        self.constants.iter().map(|s| s.as_str())
    }

    /// Longest declared name (or alias) starting at the given character
    /// position, if any. Tokenization is longest-match, which is enough to
    /// guarantee that no symbol reads as a chain of shorter ones as long as
    /// the declared table is honored.
    fn longest_match(&self, chars: &[char], pos: usize) -> Option<(Token, usize)> {
        let mut best: Option<(Token, usize)> = None;
        let mut consider = |tok: Token, len: usize| {
            if best.as_ref().is_none_or(|(_, l)| len > *l) {
                best = Some((tok, len));
            }
        };
        let remaining = &chars[pos..];
        for op in Op::ALL {
            for spelling in [op.symbol(), op.alias()] {
                let sp: Vec<char> = spelling.chars().collect();
                if remaining.starts_with(&sp) {
                    consider(Token::Operator(op), sp.len());
                }
            }
        }
        for name in self.variables.iter() {
            let nm: Vec<char> = name.chars().collect();
            if remaining.starts_with(&nm) {
                consider(Token::Variable(name.clone()), nm.len());
            }
        }
        for name in self.constants.iter() {
            let nm: Vec<char> = name.chars().collect();
            if remaining.starts_with(&nm) {
                consider(Token::Constant(name.clone()), nm.len());
            }
        }
        best
    }
}

/// Character range into the source text, 0-based half-open.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Token {
    Variable(String),
    Constant(String),
    Operator(Op),
    LParen,
    RParen,
    Comma,
    Colon,
    /// The set-builder symbol `{}` is a single token.
    SetBuilder,
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Variable(v) => write!(f, "variable `{v}`"),
            Token::Constant(c) => write!(f, "constant `{c}`"),
            Token::Operator(op) => write!(f, "operator `{op}`"),
            Token::LParen => f.write_str("`(`"),
            Token::RParen => f.write_str("`)`"),
            Token::Comma => f.write_str("`,`"),
            Token::Colon => f.write_str("`:`"),
            Token::SetBuilder => f.write_str("`{}`"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Spanned {
    pub token: Token,
    pub span: SourceSpan,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SyntaxError {
    #[error("unknown symbol at offset {offset}")]
    UnknownSymbol { offset: usize },
    #[error("`{{` at offset {offset} is not followed by `}}`")]
    LoneBrace { offset: usize },
    #[error("unbalanced input: {0}")]
    Unbalanced(String),
    #[error("unexpected {found} at offset {offset}: expected {expected}")]
    UnexpectedToken {
        expected: String,
        found: String,
        offset: usize,
    },
    #[error("unexpected end of input: expected {expected}")]
    UnexpectedEnd { expected: String },
    #[error("empty argument list at offset {offset}")]
    EmptyArgumentList { offset: usize },
    #[error("duplicate binder `{name}` at offset {offset}")]
    DuplicateBinder { name: String, offset: usize },
    #[error("a set-builder must assign a domain to each bound variable (offset {offset})")]
    BinderShape { offset: usize },
    #[error("position {position} is out of range 1..={len}")]
    OutOfRange { position: usize, len: usize },
    #[error("trailing input at offset {offset}")]
    TrailingInput { offset: usize },
}

/// Split source text into classified tokens. Whitespace between tokens is
/// permitted and stripped; canonical renderings contain none.
pub fn tokenize(text: &str, table: &SymbolTable) -> Result<Vec<Spanned>, SyntaxError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut pos = 0;
    while pos < chars.len() {
        let c = chars[pos];
        if c.is_whitespace() {
            pos += 1;
            continue;
        }
        let start = pos;
        let token = match c {
            '(' => {
                pos += 1;
                Token::LParen
            }
            ')' => {
                pos += 1;
                Token::RParen
            }
            ',' => {
                pos += 1;
                Token::Comma
            }
            ':' => {
                pos += 1;
                Token::Colon
            }
            '{' => {
                // `{}` is one symbol; interior whitespace tolerated on input.
                let mut j = pos + 1;
                while j < chars.len() && chars[j].is_whitespace() {
                    j += 1;
                }
                if j < chars.len() && chars[j] == '}' {
                    pos = j + 1;
                    Token::SetBuilder
                } else {
                    return Err(SyntaxError::LoneBrace { offset: pos });
                }
            }
            '}' => return Err(SyntaxError::UnknownSymbol { offset: pos }),
            _ => match table.longest_match(&chars, pos) {
                Some((tok, len)) => {
                    pos += len;
                    tok
                }
                None => return Err(SyntaxError::UnknownSymbol { offset: pos }),
            },
        };
        out.push(Spanned {
            token,
            span: SourceSpan { start, end: pos },
        });
    }
    Ok(out)
}

/// Abstract syntax. The tree is the internal representation; the canonical
/// string of the fully parenthesized grammar is its serialization.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Expr {
    Const(String),
    Var(String),
    Apply {
        head: Box<Expr>,
        args: Vec<Expr>,
    },
    OpApply {
        op: Op,
        args: Vec<Expr>,
    },
    SetBuilder {
        binders: Vec<(String, Expr)>,
        body: Box<Expr>,
    },
}

impl Expr {
    pub fn apply(head: Expr, args: Vec<Expr>) -> Expr {
        debug_assert!(!args.is_empty());
        Expr::Apply {
            head: Box::new(head),
            args,
        }
    }

    pub fn op(op: Op, args: Vec<Expr>) -> Expr {
        debug_assert!(!args.is_empty());
        Expr::OpApply { op, args }
    }

    pub fn builder(binders: Vec<(String, Expr)>, body: Expr) -> Expr {
        debug_assert!(!binders.is_empty());
        Expr::SetBuilder {
            binders,
            body: Box::new(body),
        }
    }

    pub fn var(name: &str) -> Expr {
        Expr::Var(name.to_string())
    }

    pub fn constant(name: &str) -> Expr {
        Expr::Const(name.to_string())
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(self))
    }
}

/// Canonical, whitespace-free rendering; `parse(render(e)) = e`.
pub fn render(e: &Expr) -> String {
    let mut out = String::new();
    render_into(e, &mut out);
    out
}

fn render_into(e: &Expr, out: &mut String) {
    match e {
        Expr::Const(name) | Expr::Var(name) => out.push_str(name),
        Expr::Apply { head, args } => {
            out.push('(');
            render_into(head, out);
            out.push_str(")(");
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                render_into(a, out);
            }
            out.push(')');
        }
        Expr::OpApply { op, args } => {
            out.push('(');
            out.push_str(op.symbol());
            out.push_str(")(");
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                render_into(a, out);
            }
            out.push(')');
        }
        Expr::SetBuilder { binders, body } => {
            out.push_str("{}(");
            for (x, dom) in binders {
                out.push_str(x);
                out.push(':');
                render_into(dom, out);
                out.push(',');
            }
            render_into(body, out);
            out.push(')');
        }
    }
}

struct Parser<'a> {
    tokens: &'a [Spanned],
    pos: usize,
    /// Node spans in post-order, for diagnostics and the nesting invariant.
    node_spans: Vec<SourceSpan>,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&'a Spanned> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<&'a Spanned> {
        let t = self.tokens.get(self.pos);
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: &Token, what: &str) -> Result<&'a Spanned, SyntaxError> {
        match self.next() {
            Some(sp) if &sp.token == want => Ok(sp),
            Some(sp) => Err(SyntaxError::UnexpectedToken {
                expected: what.to_string(),
                found: sp.token.to_string(),
                offset: sp.span.start,
            }),
            None => Err(SyntaxError::UnexpectedEnd {
                expected: what.to_string(),
            }),
        }
    }

    fn parse_expr(&mut self) -> Result<Expr, SyntaxError> {
        let start = self.peek().map(|sp| sp.span.start);
        let expr = match self.next() {
            Some(sp) => match &sp.token {
                Token::Constant(name) => Ok(Expr::Const(name.clone())),
                Token::Variable(name) => Ok(Expr::Var(name.clone())),
                Token::LParen => self.parse_application(sp),
                Token::SetBuilder => self.parse_builder(sp),
                other => Err(SyntaxError::UnexpectedToken {
                    expected: "an expression".to_string(),
                    found: other.to_string(),
                    offset: sp.span.start,
                }),
            },
            None => Err(SyntaxError::UnexpectedEnd {
                expected: "an expression".to_string(),
            }),
        }?;
        let end = self.tokens[self.pos - 1].span.end;
        self.node_spans.push(SourceSpan {
            start: start.unwrap_or(end),
            end,
        });
        Ok(expr)
    }

    // `(` head `)` `(` arg {,arg} `)` where head is an operator or expression
    fn parse_application(&mut self, open: &Spanned) -> Result<Expr, SyntaxError> {
        let head = match self.peek() {
            Some(sp) if matches!(sp.token, Token::Operator(_)) => {
                let Token::Operator(op) = sp.token else {
                    unreachable!()
                };
                self.pos += 1;
                None.or(Some(op))
            }
            _ => None,
        };
        let head_expr = if head.is_none() {
            Some(self.parse_expr()?)
        } else {
            None
        };
        self.expect(&Token::RParen, "`)` closing the application head")
            .map_err(|e| match e {
                SyntaxError::UnexpectedEnd { .. } => SyntaxError::Unbalanced(format!(
                    "`(` at offset {} is never closed",
                    open.span.start
                )),
                other => other,
            })?;
        self.expect(&Token::LParen, "`(` opening the argument list")?;
        if let Some(sp) = self.peek() {
            if sp.token == Token::RParen {
                return Err(SyntaxError::EmptyArgumentList {
                    offset: sp.span.start,
                });
            }
        }
        let mut args = vec![self.parse_expr()?];
        loop {
            match self.next() {
                Some(sp) if sp.token == Token::Comma => args.push(self.parse_expr()?),
                Some(sp) if sp.token == Token::RParen => break,
                Some(sp) => {
                    return Err(SyntaxError::UnexpectedToken {
                        expected: "`,` or `)`".to_string(),
                        found: sp.token.to_string(),
                        offset: sp.span.start,
                    })
                }
                None => {
                    return Err(SyntaxError::Unbalanced(
                        "argument list is never closed".to_string(),
                    ))
                }
            }
        }
        Ok(match head {
            Some(op) => Expr::OpApply { op, args },
            None => Expr::Apply {
                head: Box::new(head_expr.unwrap()),
                args,
            },
        })
    }

    // `{}` `(` var `:` expr {`,` var `:` expr} `,` expr `)`
    fn parse_builder(&mut self, open: &Spanned) -> Result<Expr, SyntaxError> {
        self.expect(&Token::LParen, "`(` after `{}`")?;
        let mut binders: Vec<(String, Expr)> = Vec::new();
        loop {
            // A binder is `var : expr`; anything else must be the body,
            // which is only legal as the final component.
            let is_binder = matches!(
                (self.peek(), self.tokens.get(self.pos + 1)),
                (
                    Some(Spanned {
                        token: Token::Variable(_),
                        ..
                    }),
                    Some(Spanned {
                        token: Token::Colon,
                        ..
                    })
                )
            );
            if is_binder {
                let Some(Spanned {
                    token: Token::Variable(name),
                    span,
                }) = self.next()
                else {
                    unreachable!()
                };
                let name = name.clone();
                let colon_span = *span;
                self.expect(&Token::Colon, "`:`")?;
                let dom = self.parse_expr()?;
                if binders.iter().any(|(x, _)| x == &name) {
                    return Err(SyntaxError::DuplicateBinder {
                        name,
                        offset: colon_span.start,
                    });
                }
                binders.push((name, dom));
                self.expect(&Token::Comma, "`,` after a binder")?;
            } else {
                if binders.is_empty() {
                    return Err(SyntaxError::BinderShape {
                        offset: open.span.start,
                    });
                }
                let body = self.parse_expr()?;
                self.expect(&Token::RParen, "`)` closing the set-builder")
                    .map_err(|e| match e {
                        SyntaxError::UnexpectedEnd { .. } => SyntaxError::Unbalanced(format!(
                            "set-builder at offset {} is never closed",
                            open.span.start
                        )),
                        other => other,
                    })?;
                return Ok(Expr::SetBuilder {
                    binders,
                    body: Box::new(body),
                });
            }
        }
    }
}

/// Parse a token stream into the unique expression it denotes.
pub fn parse_tokens(tokens: &[Spanned]) -> Result<Expr, SyntaxError> {
    Ok(parse_tokens_spanned(tokens)?.0)
}

/// Like [`parse_tokens`] but also returns the source span of every parsed
/// node in post-order (children before parents); spans nest consistently
/// with the expression tree.
pub fn parse_tokens_spanned(
    tokens: &[Spanned],
) -> Result<(Expr, Vec<SourceSpan>), SyntaxError> {
    let mut p = Parser {
        tokens,
        pos: 0,
        node_spans: Vec::new(),
    };
    let e = p.parse_expr()?;
    if let Some(sp) = p.peek() {
        return Err(SyntaxError::TrailingInput {
            offset: sp.span.start,
        });
    }
    Ok((e, p.node_spans))
}

pub fn parse(text: &str, table: &SymbolTable) -> Result<Expr, SyntaxError> {
    parse_tokens(&tokenize(text, table)?)
}

/// Depth of position `alpha` (1-based) within `text`: left parentheses
/// strictly before `alpha` minus right parentheses strictly before it.
pub fn depth(text: &str, alpha: usize) -> Result<i64, SyntaxError> {
    let chars: Vec<char> = text.chars().collect();
    if alpha < 1 || alpha > chars.len() {
        return Err(SyntaxError::OutOfRange {
            position: alpha,
            len: chars.len(),
        });
    }
    let mut d = 0i64;
    for &c in &chars[..alpha - 1] {
        match c {
            '(' => d += 1,
            ')' => d -= 1,
            _ => {}
        }
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(vars: &[&str], consts: &[&str]) -> SymbolTable {
        let mut t = SymbolTable::new();
        for v in vars {
            t.declare_variable(v).unwrap();
        }
        for c in consts {
            t.declare_constant(c).unwrap();
        }
        t
    }

    #[test]
    fn tokenize_classifies_every_chunk() {
        let t = table(&[], &["a", "b"]);
        let toks = tokenize("(∧)(a,b)", &t).unwrap();
        let kinds: Vec<Token> = toks.into_iter().map(|s| s.token).collect();
        assert_eq!(
            kinds,
            vec![
                Token::LParen,
                Token::Operator(Op::And),
                Token::RParen,
                Token::LParen,
                Token::Constant("a".into()),
                Token::Comma,
                Token::Constant("b".into()),
                Token::RParen,
            ]
        );
    }

    #[test]
    fn tokenize_set_builder_surface_form() {
        let t = table(&["x"], &["A", "B"]);
        let toks = tokenize("{}(x:A,(∈)(x,B))", &t).unwrap();
        assert_eq!(toks[0].token, Token::SetBuilder);
        assert_eq!(toks[1].token, Token::LParen);
        assert_eq!(toks[2].token, Token::Variable("x".into()));
        assert_eq!(toks[3].token, Token::Colon);
        // interior whitespace in `{ }` tolerated
        let toks2 = tokenize("{ }(x:A,(∈)(x,B))", &t).unwrap();
        assert_eq!(toks2[0].token, Token::SetBuilder);
    }

    #[test]
    fn tokenize_unknown_symbol() {
        let t = SymbolTable::new();
        match tokenize("q", &t) {
            Err(SyntaxError::UnknownSymbol { offset: 0 }) => {}
            other => panic!("expected UnknownSymbol, got {other:?}"),
        }
    }

    #[test]
    fn tokenize_longest_match_on_multichar_names() {
        let mut t = table(&["x"], &[]);
        t.declare_variable("xs").unwrap();
        let toks = tokenize("xs", &t).unwrap();
        assert_eq!(toks.len(), 1);
        assert_eq!(toks[0].token, Token::Variable("xs".into()));
    }

    #[test]
    fn parse_operator_application() {
        let t = table(&[], &["a", "b"]);
        let e = parse("(∧)(a,b)", &t).unwrap();
        assert_eq!(
            e,
            Expr::op(Op::And, vec![Expr::constant("a"), Expr::constant("b")])
        );
    }

    #[test]
    fn parse_ascii_aliases_normalize() {
        let t = table(&["x"], &["A", "B"]);
        let e = parse("{}(x:A,(in)(x,B))", &t).unwrap();
        assert_eq!(render(&e), "{}(x:A,(∈)(x,B))");
        let e2 = parse("(->)(A,B)", &t).unwrap();
        assert_eq!(render(&e2), "(→)(A,B)");
        let e3 = parse("(<->)(A,B)", &t).unwrap();
        assert_eq!(render(&e3), "(↔)(A,B)");
    }

    #[test]
    fn parse_set_builder_shape() {
        let t = table(&["x"], &["A", "B"]);
        let e = parse("{}(x:A,(∈)(x,B))", &t).unwrap();
        assert_eq!(
            e,
            Expr::builder(
                vec![("x".into(), Expr::constant("A"))],
                Expr::op(Op::In, vec![Expr::var("x"), Expr::constant("B")]),
            )
        );
    }

    #[test]
    fn parse_unbalanced() {
        let t = table(&[], &["a"]);
        match parse("(a", &t) {
            Err(SyntaxError::Unbalanced(_)) | Err(SyntaxError::UnexpectedEnd { .. }) => {}
            other => panic!("expected unbalanced error, got {other:?}"),
        }
    }

    #[test]
    fn parse_empty_argument_list() {
        let t = table(&[], &["a"]);
        match parse("(a)()", &t) {
            Err(SyntaxError::EmptyArgumentList { .. }) => {}
            other => panic!("expected EmptyArgumentList, got {other:?}"),
        }
    }

    #[test]
    fn parse_duplicate_binder() {
        let t = table(&["x"], &["A", "B"]);
        match parse("{}(x:A,x:B,(∈)(x,B))", &t) {
            Err(SyntaxError::DuplicateBinder { name, .. }) => assert_eq!(name, "x"),
            other => panic!("expected DuplicateBinder, got {other:?}"),
        }
    }

    #[test]
    fn parse_rejects_binderless_builder() {
        // Russell-style string: the first component is not `var : expr`.
        let t = table(&["X"], &[]);
        match parse("{}((¬)((∈)(X,X)),X)", &t) {
            Err(SyntaxError::BinderShape { .. }) => {}
            other => panic!("expected BinderShape, got {other:?}"),
        }
    }

    #[test]
    fn render_nested_constant_head_application() {
        let t = table(&["x", "y", "c"], &["*"]);
        let e = Expr::op(
            Op::Eq,
            vec![
                Expr::var("y"),
                Expr::apply(Expr::constant("*"), vec![Expr::var("x"), Expr::var("c")]),
            ],
        );
        assert_eq!(render(&e), "(=)(y,(*)(x,c))");
        assert_eq!(parse("(=)(y,(*)(x,c))", &t).unwrap(), e);
    }

    #[test]
    fn render_atomic() {
        assert_eq!(render(&Expr::constant("a")), "a");
    }

    #[test]
    fn whitespace_is_ignored() {
        let t = table(&["x"], &["A", "B"]);
        let e1 = parse(" {} ( x : A , (∈) ( x , B ) ) ", &t).unwrap();
        let e2 = parse("{}(x:A,(∈)(x,B))", &t).unwrap();
        assert_eq!(e1, e2);
    }

    #[test]
    fn depth_basics() {
        // nothing precedes position 1
        assert_eq!(depth("(a)(b)", 1).unwrap(), 0);
        // depth before the final `)` of a rendered compound is 1
        let s = "(∧)(a,b)";
        let len = s.chars().count();
        assert_eq!(depth(s, len).unwrap(), 1);
        assert!(matches!(
            depth("abc", 4),
            Err(SyntaxError::OutOfRange { .. })
        ));
        assert!(matches!(
            depth("abc", 0),
            Err(SyntaxError::OutOfRange { .. })
        ));
    }

    #[test]
    fn depth_concatenation_law() {
        // d(t, l(th)+a) = d(t, l(th)+1) + d(phi, a)
        let th = "((a,";
        let phi = "(b))";
        let eta = ")x(";
        let t: String = format!("{th}{phi}{eta}");
        let lt = th.chars().count();
        for a in 1..=phi.chars().count() {
            assert_eq!(
                depth(&t, lt + a).unwrap(),
                depth(&t, lt + 1).unwrap() + depth(phi, a).unwrap()
            );
        }
    }
}
