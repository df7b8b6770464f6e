//! Model files: the line-oriented `const <name> = <value>` format that
//! assigns hereditarily finite values to constants.
//!
//! A `#` immediately followed by a digit is an atom literal; any other `#`
//! starts a comment running to the end of the line.

use std::collections::BTreeMap;
use std::path::Path;

use thiserror::Error;

use crate::semantics::{Interpretation, Value};
use crate::syntax::SymbolTable;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("line {line}: duplicate constant `{name}`")]
    DuplicateConstant { line: usize, name: String },
    #[error("line {line}: {source}")]
    BadName {
        line: usize,
        source: crate::syntax::NameError,
    },
}

/// Parse a model file into an interpretation plus the constant declarations
/// for the symbol table.
pub fn load_model(path: &Path) -> Result<(SymbolTable, Interpretation), ModelError> {
    let text = std::fs::read_to_string(path).map_err(|source| ModelError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_model(&text)
}

pub fn parse_model(text: &str) -> Result<(SymbolTable, Interpretation), ModelError> {
    let mut table = SymbolTable::new();
    let mut interp = Interpretation::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = strip_comment(raw).trim();
        if line.is_empty() {
            continue;
        }
        let rest = line
            .strip_prefix("const")
            .filter(|r| r.starts_with(char::is_whitespace))
            .ok_or_else(|| ModelError::Parse {
                line: line_no,
                reason: "expected `const <name> = <value>`".to_string(),
            })?;
        let (name, value_text) = rest.split_once('=').ok_or_else(|| ModelError::Parse {
            line: line_no,
            reason: "missing `=`".to_string(),
        })?;
        let name = name.trim();
        let value = parse_value_str(value_text.trim()).map_err(|reason| ModelError::Parse {
            line: line_no,
            reason,
        })?;
        if interp.constant(name).is_some() {
            return Err(ModelError::DuplicateConstant {
                line: line_no,
                name: name.to_string(),
            });
        }
        table
            .declare_constant(name)
            .map_err(|source| ModelError::BadName {
                line: line_no,
                source,
            })?;
        interp.insert(name, value);
    }
    Ok((table, interp))
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

/// Parse a value literal: `true`, `false`, `#<n>`, `{v,…}` or
/// `fun(<arity>){ (v,…)->v ; … }`.
pub fn parse_value_str(text: &str) -> Result<Value, String> {
    let chars: Vec<char> = text.chars().collect();
    let mut pos = 0;
    let v = parse_value(&chars, &mut pos)?;
    skip_ws(&chars, &mut pos);
    if pos != chars.len() {
        return Err(format!("trailing input after value at offset {pos}"));
    }
    Ok(v)
}

fn skip_ws(chars: &[char], pos: &mut usize) {
    while *pos < chars.len() && chars[*pos].is_whitespace() {
        *pos += 1;
    }
}

fn eat(chars: &[char], pos: &mut usize, want: char) -> Result<(), String> {
    skip_ws(chars, pos);
    if *pos < chars.len() && chars[*pos] == want {
        *pos += 1;
        Ok(())
    } else {
        Err(format!("expected `{want}` at offset {pos}", pos = *pos))
    }
}

fn peek(chars: &[char], pos: usize) -> Option<char> {
    let mut p = pos;
    while p < chars.len() && chars[p].is_whitespace() {
        p += 1;
    }
    chars.get(p).copied()
}

fn parse_value(chars: &[char], pos: &mut usize) -> Result<Value, String> {
    skip_ws(chars, pos);
    match chars.get(*pos) {
        None => Err("expected a value".to_string()),
        Some('t') | Some('f') => {
            let word: String = chars[*pos..]
                .iter()
                .take_while(|c| c.is_ascii_alphanumeric())
                .collect();
            match word.as_str() {
                "true" => {
                    *pos += 4;
                    Ok(Value::Truth(true))
                }
                "false" => {
                    *pos += 5;
                    Ok(Value::Truth(false))
                }
                w if w.starts_with("fun") => parse_fun(chars, pos),
                other => Err(format!("unknown value keyword `{other}`")),
            }
        }
        Some('#') => {
            *pos += 1;
            let digits: String = chars[*pos..]
                .iter()
                .take_while(|c| c.is_ascii_digit())
                .collect();
            if digits.is_empty() {
                return Err(format!("expected digits after `#` at offset {}", *pos));
            }
            *pos += digits.len();
            let n: u64 = digits
                .parse()
                .map_err(|_| format!("atom index `{digits}` out of range"))?;
            Ok(Value::Atom(n))
        }
        Some('{') => {
            *pos += 1;
            let mut elems = Vec::new();
            if peek(chars, *pos) == Some('}') {
                eat(chars, pos, '}')?;
                return Ok(Value::set(elems));
            }
            loop {
                elems.push(parse_value(chars, pos)?);
                skip_ws(chars, pos);
                match chars.get(*pos) {
                    Some(',') => {
                        *pos += 1;
                    }
                    Some('}') => {
                        *pos += 1;
                        break;
                    }
                    _ => return Err(format!("expected `,` or `}}` at offset {}", *pos)),
                }
            }
            Ok(Value::set(elems))
        }
        Some(c) => Err(format!("unexpected character `{c}` at offset {}", *pos)),
    }
}

fn parse_fun(chars: &[char], pos: &mut usize) -> Result<Value, String> {
    for expected in ['f', 'u', 'n'] {
        if chars.get(*pos) != Some(&expected) {
            return Err(format!("malformed `fun` at offset {}", *pos));
        }
        *pos += 1;
    }
    eat(chars, pos, '(')?;
    skip_ws(chars, pos);
    let digits: String = chars[*pos..]
        .iter()
        .take_while(|c| c.is_ascii_digit())
        .collect();
    if digits.is_empty() {
        return Err(format!("expected an arity at offset {}", *pos));
    }
    *pos += digits.len();
    let arity: usize = digits.parse().map_err(|_| "arity out of range".to_string())?;
    if arity == 0 {
        return Err("function arity must be at least 1".to_string());
    }
    eat(chars, pos, ')')?;
    eat(chars, pos, '{')?;
    let mut graph: BTreeMap<Vec<Value>, Value> = BTreeMap::new();
    loop {
        skip_ws(chars, pos);
        if peek(chars, *pos) == Some('}') && graph.is_empty() {
            return Err("a function needs at least one graph entry".to_string());
        }
        eat(chars, pos, '(')?;
        let mut tuple = Vec::new();
        loop {
            tuple.push(parse_value(chars, pos)?);
            skip_ws(chars, pos);
            match chars.get(*pos) {
                Some(',') => {
                    *pos += 1;
                }
                Some(')') => {
                    *pos += 1;
                    break;
                }
                _ => return Err(format!("expected `,` or `)` at offset {}", *pos)),
            }
        }
        if tuple.len() != arity {
            return Err(format!(
                "tuple of length {} does not match declared arity {arity}",
                tuple.len()
            ));
        }
        eat(chars, pos, '-')?;
        if chars.get(*pos) != Some(&'>') {
            return Err(format!("expected `->` at offset {}", *pos));
        }
        *pos += 1;
        let v = parse_value(chars, pos)?;
        if graph.insert(tuple, v).is_some() {
            return Err("duplicate function-domain tuple".to_string());
        }
        skip_ws(chars, pos);
        match chars.get(*pos) {
            Some(';') => {
                *pos += 1;
                skip_ws(chars, pos);
                if peek(chars, *pos) == Some('}') {
                    *pos += 1;
                    break;
                }
            }
            Some('}') => {
                *pos += 1;
                break;
            }
            _ => return Err(format!("expected `;` or `}}` at offset {}", *pos)),
        }
    }
    Ok(Value::func(arity, graph))
}
