use super::diagnostic::{Code, Diagnostic};
use crate::theory::Span;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Number(u64),
    /// `'text'`
    Str(String),
    Quote,
    LParen,
    RParen,
    LBracket,
    RBracket,
    LAngle,
    RAngle,
    Comma,
    Colon,
    Bang,
    Tilde,
    Dollar,
    Hash,
    Slash,
    Eq,
    /// `-->`
    Arrow,
    /// `--[`
    ActOpen,
    /// `]->`
    ActClose,
    /// `==>`
    Implies,
    Amp,
    Pipe,
    Dot,
    At,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Number(n) => format!("`{n}`"),
            Tok::Str(s) => format!("'{s}'"),
            Tok::Eof => "end of input".to_string(),
            other => format!("`{}`", other.text()),
        }
    }

    fn text(&self) -> &'static str {
        match self {
            Tok::Quote => "\"",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBracket => "[",
            Tok::RBracket => "]",
            Tok::LAngle => "<",
            Tok::RAngle => ">",
            Tok::Comma => ",",
            Tok::Colon => ":",
            Tok::Bang => "!",
            Tok::Tilde => "~",
            Tok::Dollar => "$",
            Tok::Hash => "#",
            Tok::Slash => "/",
            Tok::Eq => "=",
            Tok::Arrow => "-->",
            Tok::ActOpen => "--[",
            Tok::ActClose => "]->",
            Tok::Implies => "==>",
            Tok::Amp => "&",
            Tok::Pipe => "|",
            Tok::Dot => ".",
            Tok::At => "@",
            _ => "",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

struct Cursor<'a> {
    chars: Vec<(usize, char)>,
    pos: usize,
    line: u32,
    col: u32,
    src: &'a str,
}

impl<'a> Cursor<'a> {
    fn peek(&self, k: usize) -> Option<char> {
        self.chars.get(self.pos + k).map(|(_, c)| *c)
    }

    fn offset(&self) -> usize {
        self.chars.get(self.pos).map(|(o, _)| *o).unwrap_or(self.src.len())
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek(0)?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn starts_with(&self, s: &str) -> bool {
        s.chars().enumerate().all(|(i, c)| self.peek(i) == Some(c))
    }
}

/// Split `src` into tokens. Lexical errors are reported and the offending
/// character skipped, so the token stream is always usable for recovery.
pub fn lex(src: &str) -> (Vec<Token>, Vec<Diagnostic>) {
    let mut cur = Cursor { chars: src.char_indices().collect(), pos: 0, line: 1, col: 1, src };
    let mut toks = Vec::new();
    let mut diags = Vec::new();
    loop {
        // whitespace and comments
        loop {
            match cur.peek(0) {
                Some(c) if c.is_whitespace() => {
                    cur.bump();
                }
                Some('/') if cur.peek(1) == Some('/') => {
                    while let Some(c) = cur.peek(0) {
                        if c == '\n' {
                            break;
                        }
                        cur.bump();
                    }
                }
                Some('/') if cur.peek(1) == Some('*') => {
                    let (line, col, start) = (cur.line, cur.col, cur.offset());
                    cur.bump();
                    cur.bump();
                    let mut closed = false;
                    while cur.peek(0).is_some() {
                        if cur.starts_with("*/") {
                            cur.bump();
                            cur.bump();
                            closed = true;
                            break;
                        }
                        cur.bump();
                    }
                    if !closed {
                        diags.push(Diagnostic::error(
                            Code::LexError,
                            Span { line, col, start, end: start + 2 },
                            "unterminated block comment",
                        ));
                    }
                }
                _ => break,
            }
        }
        let (line, col, start) = (cur.line, cur.col, cur.offset());
        let Some(c) = cur.peek(0) else {
            toks.push(Token { tok: Tok::Eof, span: Span { line, col, start, end: start } });
            break;
        };
        let fixed = |cur: &mut Cursor, tok: Tok, n: usize| {
            for _ in 0..n {
                cur.bump();
            }
            Some(tok)
        };
        let tok = if c.is_alphabetic() || c == '_' {
            let mut s = String::new();
            while let Some(c) = cur.peek(0) {
                if c.is_alphanumeric() || c == '_' {
                    s.push(c);
                    cur.bump();
                } else {
                    break;
                }
            }
            // lemma annotations are hyphenated keywords
            for (head, tail) in [("exists", "-trace"), ("all", "-traces")] {
                if s == head && cur.starts_with(tail) {
                    for _ in 0..tail.len() {
                        cur.bump();
                    }
                    s.push_str(tail);
                }
            }
            Some(Tok::Ident(s))
        } else if c.is_ascii_digit() {
            let mut n: u64 = 0;
            while let Some(d) = cur.peek(0).and_then(|c| c.to_digit(10)) {
                n = n.saturating_mul(10).saturating_add(d as u64);
                cur.bump();
            }
            Some(Tok::Number(n))
        } else if c == '\'' {
            cur.bump();
            let mut s = String::new();
            let mut closed = false;
            while let Some(c) = cur.peek(0) {
                if c == '\'' {
                    cur.bump();
                    closed = true;
                    break;
                }
                if c == '\n' {
                    break;
                }
                s.push(c);
                cur.bump();
            }
            if closed {
                Some(Tok::Str(s))
            } else {
                diags.push(Diagnostic::error(
                    Code::LexError,
                    Span { line, col, start, end: start + 1 },
                    "unterminated string constant",
                ));
                None
            }
        } else if cur.starts_with("-->") {
            fixed(&mut cur, Tok::Arrow, 3)
        } else if cur.starts_with("--[") {
            fixed(&mut cur, Tok::ActOpen, 3)
        } else if cur.starts_with("]->") {
            fixed(&mut cur, Tok::ActClose, 3)
        } else if cur.starts_with("==>") {
            fixed(&mut cur, Tok::Implies, 3)
        } else {
            let single = match c {
                '"' => Some(Tok::Quote),
                '(' => Some(Tok::LParen),
                ')' => Some(Tok::RParen),
                '[' => Some(Tok::LBracket),
                ']' => Some(Tok::RBracket),
                '<' => Some(Tok::LAngle),
                '>' => Some(Tok::RAngle),
                ',' => Some(Tok::Comma),
                ':' => Some(Tok::Colon),
                '!' => Some(Tok::Bang),
                '~' => Some(Tok::Tilde),
                '$' => Some(Tok::Dollar),
                '#' => Some(Tok::Hash),
                '/' => Some(Tok::Slash),
                '=' => Some(Tok::Eq),
                '&' => Some(Tok::Amp),
                '|' => Some(Tok::Pipe),
                '.' => Some(Tok::Dot),
                '@' => Some(Tok::At),
                _ => None,
            };
            cur.bump();
            if single.is_none() {
                diags.push(Diagnostic::error(
                    Code::LexError,
                    Span { line, col, start, end: start + c.len_utf8() },
                    format!("unexpected character `{c}`"),
                ));
            }
            single
        };
        if let Some(tok) = tok {
            toks.push(Token { tok, span: Span { line, col, start, end: cur.offset() } });
        }
    }
    (toks, diags)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(src: &str) -> Vec<Tok> {
        lex(src).0.into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn arrows_and_brackets() {
        assert_eq!(
            kinds("]--[ a ]->[ ] -->"),
            vec![
                Tok::RBracket,
                Tok::ActOpen,
                Tok::Ident("a".into()),
                Tok::ActClose,
                Tok::LBracket,
                Tok::RBracket,
                Tok::Arrow,
                Tok::Eof
            ]
        );
    }

    #[test]
    fn comments_are_skipped() {
        assert_eq!(kinds("a // x\n /* y \n z */ b"), vec![Tok::Ident("a".into()), Tok::Ident("b".into()), Tok::Eof]);
    }

    #[test]
    fn hyphenated_annotations() {
        assert_eq!(kinds("exists-trace all-traces"), vec![
            Tok::Ident("exists-trace".into()),
            Tok::Ident("all-traces".into()),
            Tok::Eof
        ]);
    }

    #[test]
    fn positions_are_one_based() {
        let (toks, _) = lex("theory\n  X");
        assert_eq!((toks[1].span.line, toks[1].span.col), (2, 3));
    }

    #[test]
    fn bad_character_is_reported() {
        let (_, d) = lex("rule ? x");
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].code, Code::LexError);
        assert_eq!((d[0].line, d[0].col), (1, 6));
    }
}
