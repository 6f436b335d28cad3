//! Converts a Python dict literal (the form agents usually answer in) into a
//! JSON value. Supports single/double quoted strings, `#` comments, tuples,
//! trailing commas and `True`/`False`/`None`. Arithmetic such as `32/4` is
//! rejected: designs must carry evaluated numbers.

use serde_json::{Map, Number, Value};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct LiteralError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

/// Returns the text of the configuration dictionary inside `text`.
///
/// The first fenced code block containing a `{` wins. Without fences, the
/// text from the first `{` onward is used. A leading `config =` is skipped.
pub fn extract_config_block(text: &str) -> Option<&str> {
    let mut rest = text;
    while let Some(open) = rest.find("```") {
        let after = &rest[open + 3..];
        let body_start = after.find('\n').map(|i| i + 1).unwrap_or(after.len());
        let body = &after[body_start..];
        let close = body.find("```").unwrap_or(body.len());
        let block = &body[..close];
        if let Some(brace) = block.find('{') {
            return Some(&block[brace..]);
        }
        if close == body.len() {
            break;
        }
        rest = &body[close + 3..];
    }
    text.find('{').map(|i| &text[i..])
}

/// Parses the first literal value in `text`. Only whitespace and comments
/// may follow it.
pub fn python_literal_to_json(text: &str) -> Result<Value, LiteralError> {
    let mut p = Parser {
        src: text.as_bytes(),
        text,
        pos: 0,
    };
    p.skip_trivia();
    let value = p.value()?;
    p.skip_trivia();
    if p.pos < p.src.len() {
        let c = p.src[p.pos];
        if is_operator(c) {
            return Err(p.arithmetic_error());
        }
        return Err(p.error(format!("unexpected `{}` after the dictionary", c as char)));
    }
    Ok(value)
}

fn is_operator(c: u8) -> bool {
    matches!(c, b'+' | b'-' | b'*' | b'/' | b'%' | b'(' | b'@')
}

struct Parser<'a> {
    src: &'a [u8],
    text: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: impl Into<String>) -> LiteralError {
        let consumed = &self.text[..self.pos.min(self.text.len())];
        let line = consumed.matches('\n').count() + 1;
        let column = consumed.len() - consumed.rfind('\n').map(|i| i + 1).unwrap_or(0) + 1;
        LiteralError {
            line,
            column,
            message: message.into(),
        }
    }

    fn arithmetic_error(&self) -> LiteralError {
        self.error("inline arithmetic is not supported; write the evaluated number")
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn skip_trivia(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_ascii_whitespace() {
                self.pos += 1;
            } else if c == b'#' {
                while let Some(c) = self.peek() {
                    if c == b'\n' {
                        break;
                    }
                    self.pos += 1;
                }
            } else {
                break;
            }
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), LiteralError> {
        self.skip_trivia();
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(format!("expected `{}`", c as char)))
        }
    }

    fn value(&mut self) -> Result<Value, LiteralError> {
        self.skip_trivia();
        let value = match self.peek() {
            None => return Err(self.error("unexpected end of input")),
            Some(b'{') => self.dict()?,
            Some(b'[') => self.sequence(b'[', b']')?,
            Some(b'(') => self.sequence(b'(', b')')?,
            Some(b'"') | Some(b'\'') => Value::String(self.string()?),
            Some(c) if c == b'-' || c == b'+' || c == b'.' || c.is_ascii_digit() => self.number()?,
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => self.word()?,
            Some(c) => return Err(self.error(format!("unexpected `{}`", c as char))),
        };
        // A value followed directly by an operator means an expression.
        self.skip_trivia();
        if let Some(c) = self.peek() {
            if matches!(c, b'+' | b'-' | b'*' | b'/' | b'%' | b'@') {
                return Err(self.arithmetic_error());
            }
        }
        Ok(value)
    }

    fn dict(&mut self) -> Result<Value, LiteralError> {
        self.expect(b'{')?;
        let mut map = Map::new();
        loop {
            self.skip_trivia();
            if self.peek() == Some(b'}') {
                self.pos += 1;
                return Ok(Value::Object(map));
            }
            let key = match self.peek() {
                Some(b'"') | Some(b'\'') => self.string()?,
                _ => return Err(self.error("dictionary keys must be quoted strings")),
            };
            self.expect(b':')?;
            let value = self.value()?;
            if map.insert(key.clone(), value).is_some() {
                return Err(self.error(format!("duplicate key `{key}`")));
            }
            self.skip_trivia();
            match self.peek() {
                Some(b',') => self.pos += 1,
                Some(b'}') => {}
                _ => return Err(self.error("expected `,` or `}`")),
            }
        }
    }

    fn sequence(&mut self, open: u8, close: u8) -> Result<Value, LiteralError> {
        self.expect(open)?;
        let mut items = Vec::new();
        loop {
            self.skip_trivia();
            if self.peek() == Some(close) {
                self.pos += 1;
                return Ok(Value::Array(items));
            }
            items.push(self.value()?);
            self.skip_trivia();
            match self.peek() {
                Some(b',') => self.pos += 1,
                Some(c) if c == close => {}
                _ => return Err(self.error(format!("expected `,` or `{}`", close as char))),
            }
        }
    }

    fn string(&mut self) -> Result<String, LiteralError> {
        let quote = self.src[self.pos];
        self.pos += 1;
        let mut out = String::new();
        let mut chars = self.text[self.pos..].char_indices();
        while let Some((i, c)) = chars.next() {
            match c {
                c if c as u32 == quote as u32 => {
                    self.pos += i + 1;
                    return Ok(out);
                }
                '\n' => {
                    self.pos += i;
                    return Err(self.error("unterminated string"));
                }
                '\\' => match chars.next() {
                    Some((_, 'n')) => out.push('\n'),
                    Some((_, 't')) => out.push('\t'),
                    Some((_, 'r')) => out.push('\r'),
                    Some((_, '0')) => out.push('\0'),
                    Some((_, c @ ('\\' | '\'' | '"'))) => out.push(c),
                    Some((j, c)) => {
                        self.pos += j;
                        return Err(self.error(format!("unsupported escape `\\{c}`")));
                    }
                    None => break,
                },
                c => out.push(c),
            }
        }
        self.pos = self.src.len();
        Err(self.error("unterminated string"))
    }

    fn number(&mut self) -> Result<Value, LiteralError> {
        let start = self.pos;
        if matches!(self.peek(), Some(b'-') | Some(b'+')) {
            self.pos += 1;
        }
        let mut is_float = false;
        while let Some(c) = self.peek() {
            match c {
                b'0'..=b'9' | b'_' => self.pos += 1,
                b'.' => {
                    is_float = true;
                    self.pos += 1;
                }
                b'e' | b'E' => {
                    is_float = true;
                    self.pos += 1;
                    if matches!(self.peek(), Some(b'-') | Some(b'+')) {
                        self.pos += 1;
                    }
                }
                _ => break,
            }
        }
        let raw: String = self.text[start..self.pos].chars().filter(|&c| c != '_').collect();
        let raw = raw.strip_prefix('+').unwrap_or(&raw);
        if !is_float {
            if let Ok(i) = raw.parse::<i64>() {
                return Ok(Value::Number(Number::from(i)));
            }
        }
        raw.parse::<f64>()
            .ok()
            .and_then(Number::from_f64)
            .map(Value::Number)
            .ok_or_else(|| {
                self.pos = start;
                self.error(format!("invalid number `{raw}`"))
            })
    }

    fn word(&mut self) -> Result<Value, LiteralError> {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_ascii_alphanumeric() || c == b'_' {
                self.pos += 1;
            } else {
                break;
            }
        }
        match &self.text[start..self.pos] {
            "True" | "true" => Ok(Value::Bool(true)),
            "False" | "false" => Ok(Value::Bool(false)),
            "None" | "null" => Ok(Value::Null),
            other => {
                self.pos = start;
                Err(self.error(format!(
                    "`{other}` is not a literal; names and function calls are not allowed"
                )))
            }
        }
    }
}
