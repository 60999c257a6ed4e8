//! Lexer, parser, validator and printer for `.spthy` theories.

mod diagnostic;
mod lexer;
mod parser;
mod pretty;
mod validate;

pub use diagnostic::{Code, Diagnostic, Severity};
pub use lexer::{lex, Tok, Token};
pub use pretty::{pretty_print, pretty_rule};
pub use validate::{validate, IMPLICIT_ACTIONS};

use crate::theory::Theory;

/// Result of parsing and validating a source text.
#[derive(Debug, Clone)]
pub struct Parsed {
    /// Present iff no error was reported.
    pub theory: Option<Theory>,
    /// Errors and warnings, in discovery order.
    pub diagnostics: Vec<Diagnostic>,
}

impl Parsed {
    pub fn errors(&self) -> impl Iterator<Item = &Diagnostic> {
        self.diagnostics.iter().filter(|d| d.is_error())
    }

    pub fn warnings(&self) -> impl Iterator<Item = &Diagnostic> {
        self.diagnostics.iter().filter(|d| !d.is_error())
    }
}

/// Parse and validate, keeping warnings.
pub fn parse(src: &str) -> Parsed {
    let (toks, mut diagnostics) = lex(src);
    let mut p = parser::Parser::new(toks);
    let theory = p.theory();
    diagnostics.append(&mut p.diags);
    // semantic problems are reported even for the parts that parsed after a syntax error
    if let Some(t) = &theory {
        diagnostics.extend(validate(t));
    }
    if diagnostics.is_empty() && theory.is_none() {
        diagnostics.push(Diagnostic::error(Code::SyntaxError, Default::default(), "empty input"));
    }
    let ok = !diagnostics.iter().any(Diagnostic::is_error);
    Parsed { theory: if ok { theory } else { None }, diagnostics }
}

/// Parse and validate a theory. Warnings are dropped on success.
pub fn parse_theory(src: &str) -> Result<Theory, Vec<Diagnostic>> {
    let parsed = parse(src);
    match parsed.theory {
        Some(t) => Ok(t),
        None => Err(parsed.diagnostics.into_iter().filter(Diagnostic::is_error).collect()),
    }
}
