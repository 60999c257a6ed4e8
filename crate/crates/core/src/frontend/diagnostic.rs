use std::fmt;

use serde::Serialize;

use crate::theory::Span;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

macro_rules! codes {
    ($($variant:ident => $text:literal),* $(,)?) => {
        /// Stable diagnostic codes.
        #[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub enum Code {
            $($variant),*
        }

        impl Code {
            pub fn as_str(self) -> &'static str {
                match self {
                    $(Code::$variant => $text),*
                }
            }
        }
    };
}

codes! {
    LexError => "LEX_ERROR",
    SyntaxError => "SYNTAX_ERROR",
    ArityMismatch => "ARITY_MISMATCH",
    UndeclaredFunction => "UNDECLARED_FUNCTION",
    BuiltinConflict => "BUILTIN_CONFLICT",
    BadEquation => "BAD_EQUATION",
    FactKindMismatch => "FACT_KIND_MISMATCH",
    FrInConclusion => "FR_IN_CONCLUSION",
    FrNotFreshVariable => "FR_NOT_FRESH_VARIABLE",
    InInConclusion => "IN_IN_CONCLUSION",
    OutInPremise => "OUT_IN_PREMISE",
    KInRule => "K_IN_RULE",
    ReservedInAction => "RESERVED_IN_ACTION",
    ReservedPersistent => "RESERVED_PERSISTENT",
    ReservedArity => "RESERVED_ARITY",
    NegatedNonPersistent => "NEGATED_NON_PERSISTENT",
    UnboundVariable => "UNBOUND_VARIABLE",
    DuplicateRule => "DUPLICATE_RULE",
    DuplicateLemma => "DUPLICATE_LEMMA",
    UnguardedFormula => "UNGUARDED_FORMULA",
    FreeFormulaVariable => "FREE_FORMULA_VARIABLE",
    UnusedAction => "UNUSED_ACTION",
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for Code {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: Code,
    pub message: String,
    pub line: u32,
    pub col: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hint: Option<String>,
}

impl Diagnostic {
    pub fn error(code: Code, span: Span, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Error,
            code,
            message: message.into(),
            line: span.line,
            col: span.col,
            hint: None,
        }
    }

    pub fn warning(code: Code, span: Span, message: impl Into<String>) -> Self {
        Diagnostic { severity: Severity::Warning, ..Diagnostic::error(code, span, message) }
    }

    pub fn with_hint(mut self, hint: impl Into<String>) -> Self {
        self.hint = Some(hint.into());
        self
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{sev}[{}] {}:{}: {}", self.code, self.line, self.col, self.message)?;
        if let Some(h) = &self.hint {
            write!(f, "\n  hint: {h}")?;
        }
        Ok(())
    }
}
