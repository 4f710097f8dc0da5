//! Tokenizer shared by the polynomial, formula, series-literal and script
//! parsers.

use num_bigint::BigInt;
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(BigInt),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Semi,
    Colon,
    Lt,
    Le,
    Eq,
    Ge,
    Gt,
    Ne,
    And,
    Or,
    Bang,
}

impl std::fmt::Display for Tok {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Tok::Ident(s) => return write!(f, "identifier `{s}`"),
            Tok::Int(n) => return write!(f, "number `{n}`"),
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::Star => "*",
            Tok::Slash => "/",
            Tok::Caret => "^",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::Comma => ",",
            Tok::Semi => ";",
            Tok::Colon => ":",
            Tok::Lt => "<",
            Tok::Le => "<=",
            Tok::Eq => "=",
            Tok::Ge => ">=",
            Tok::Gt => ">",
            Tok::Ne => "!=",
            Tok::And => "&&",
            Tok::Or => "||",
            Tok::Bang => "!",
        };
        write!(f, "`{s}`")
    }
}

/// A token together with its byte offset and 1-based line/column.
#[derive(Clone, Debug)]
pub struct Spanned {
    pub tok: Tok,
    pub offset: usize,
    pub line: usize,
    pub col: usize,
}

/// Syntax error with a source position.
#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("syntax error at line {line}, column {col}: {message}")]
pub struct SyntaxError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl SyntaxError {
    pub fn at(sp: Option<&Spanned>, end: (usize, usize), message: impl Into<String>) -> Self {
        let (line, col) = sp.map(|s| (s.line, s.col)).unwrap_or(end);
        SyntaxError { line, col, message: message.into() }
    }
}

/// Identifiers may contain letters, digits, `_`, `'` and `-` when the dash is
/// directly followed by a letter (so `cone-scan` is one word, `x-1` is not).
pub fn tokenize(src: &str) -> Result<(Vec<Spanned>, (usize, usize)), SyntaxError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let (mut line, mut col) = (1usize, 1usize);
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let start = (i, line, col);
        let advance = |n: usize, i: &mut usize, col: &mut usize| {
            *i += n;
            *col += n;
        };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            advance(1, &mut i, &mut col);
            continue;
        }
        if c == '#' {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        let two = if i + 1 < bytes.len() { &src[i..i + 2] } else { "" };
        let tok = match two {
            "<=" => Some((Tok::Le, 2)),
            ">=" => Some((Tok::Ge, 2)),
            "!=" => Some((Tok::Ne, 2)),
            "&&" => Some((Tok::And, 2)),
            "||" => Some((Tok::Or, 2)),
            "==" => Some((Tok::Eq, 2)),
            _ => None,
        };
        if let Some((tok, n)) = tok {
            out.push(Spanned { tok, offset: start.0, line: start.1, col: start.2 });
            advance(n, &mut i, &mut col);
            continue;
        }
        let single = match c {
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '/' => Some(Tok::Slash),
            '^' => Some(Tok::Caret),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '{' => Some(Tok::LBrace),
            '}' => Some(Tok::RBrace),
            ',' => Some(Tok::Comma),
            ';' => Some(Tok::Semi),
            ':' => Some(Tok::Colon),
            '<' => Some(Tok::Lt),
            '>' => Some(Tok::Gt),
            '=' => Some(Tok::Eq),
            '!' => Some(Tok::Bang),
            // unicode minus, common in pasted math
            '\u{2212}' => Some(Tok::Minus),
            _ => None,
        };
        if let Some(tok) = single {
            out.push(Spanned { tok, offset: start.0, line: start.1, col: start.2 });
            let n = c.len_utf8();
            advance(n, &mut i, &mut col);
            continue;
        }
        if c.is_ascii_digit() {
            let mut j = i;
            while j < bytes.len() && bytes[j].is_ascii_digit() {
                j += 1;
            }
            let n: BigInt = src[i..j].parse().expect("digits");
            out.push(Spanned { tok: Tok::Int(n), offset: start.0, line: start.1, col: start.2 });
            let len = j - i;
            advance(len, &mut i, &mut col);
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let mut j = i;
            while j < bytes.len() {
                let b = bytes[j] as char;
                let dash_word = b == '-'
                    && j + 1 < bytes.len()
                    && (bytes[j + 1] as char).is_ascii_alphabetic()
                    && j > i
                    && (bytes[j - 1] as char).is_ascii_alphabetic()
                    && is_hyphenated_keyword(&src[i..], j - i);
                if b.is_ascii_alphanumeric() || b == '_' || b == '\'' || dash_word {
                    j += 1;
                } else {
                    break;
                }
            }
            out.push(Spanned {
                tok: Tok::Ident(src[i..j].to_string()),
                offset: start.0,
                line: start.1,
                col: start.2,
            });
            let len = j - i;
            advance(len, &mut i, &mut col);
            continue;
        }
        return Err(SyntaxError { line, col, message: format!("unexpected character `{c}`") });
    }
    Ok((out, (line, col)))
}

const HYPHENATED: &[&str] =
    &["cone-scan", "cone-exact", "induced-strata", "repro-example", "equal-cones"];

fn is_hyphenated_keyword(rest: &str, dash_at: usize) -> bool {
    HYPHENATED.iter().any(|kw| rest.starts_with(kw) && kw.as_bytes().get(dash_at) == Some(&b'-'))
}

/// Cursor over a token slice with backtracking support.
#[derive(Clone)]
pub struct Cursor<'a> {
    toks: &'a [Spanned],
    pub pos: usize,
    end: (usize, usize),
}

impl<'a> Cursor<'a> {
    pub fn new(toks: &'a [Spanned], end: (usize, usize)) -> Self {
        Cursor { toks, pos: 0, end }
    }

    pub fn peek(&self) -> Option<&'a Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    pub fn peek_at(&self, k: usize) -> Option<&'a Tok> {
        self.toks.get(self.pos + k).map(|s| &s.tok)
    }

    pub fn next(&mut self) -> Option<&'a Tok> {
        let t = self.toks.get(self.pos).map(|s| &s.tok);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    pub fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub fn is_done(&self) -> bool {
        self.pos >= self.toks.len()
    }

    pub fn error(&self, message: impl Into<String>) -> SyntaxError {
        SyntaxError::at(self.toks.get(self.pos), self.end, message)
    }

    pub fn expect(&mut self, tok: &Tok) -> Result<(), SyntaxError> {
        if self.eat(tok) {
            Ok(())
        } else {
            let found = match self.peek() {
                Some(t) => t.to_string(),
                None => "end of input".to_string(),
            };
            Err(self.error(format!("expected {tok}, found {found}")))
        }
    }

    pub fn expect_ident(&mut self) -> Result<&'a str, SyntaxError> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                self.pos += 1;
                Ok(s)
            }
            Some(t) => Err(self.error(format!("expected identifier, found {t}"))),
            None => Err(self.error("expected identifier, found end of input")),
        }
    }

    pub fn position(&self) -> (usize, usize) {
        self.toks.get(self.pos).map(|s| (s.line, s.col)).unwrap_or(self.end)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relations_and_words() {
        let (toks, _) = tokenize("x^3 - y^2 <= 0 && !(y != 1/2)").unwrap();
        let kinds: Vec<_> = toks.iter().map(|t| t.tok.clone()).collect();
        assert!(kinds.contains(&Tok::Le));
        assert!(kinds.contains(&Tok::Ne));
        assert!(kinds.contains(&Tok::And));
        assert_eq!(kinds[2], Tok::Int(3.into()));
    }

    #[test]
    fn hyphenated_commands_stay_whole() {
        let (toks, _) = tokenize("cone-scan X; x-y").unwrap();
        assert_eq!(toks[0].tok, Tok::Ident("cone-scan".into()));
        assert_eq!(toks[3].tok, Tok::Ident("x".into()));
        assert_eq!(toks[4].tok, Tok::Minus);
    }

    #[test]
    fn bad_character_reports_position() {
        let err = tokenize("x\n  @").unwrap_err();
        assert_eq!((err.line, err.col), (2, 3));
    }
}
