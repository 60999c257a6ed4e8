//! Recursive-descent parser for the theory language.
//!
//! The grammar is a subset of the `.spthy` format with two relaxations: `let`
//! blocks may precede the premise list, and consecutive premise lists are
//! merged into one.

use super::diagnostic::{Code, Diagnostic};
use super::lexer::{Tok, Token};
use crate::property::{Atom, Binders, Formula, Lemma, LemmaMode, QVar, Quantifier};
use crate::term::{Name, RewriteEquation, Signature, Sort, Term, Var};
use crate::theory::{Fact, FactSpans, Premise, ProtocolRule, RuleSpans, Span, Theory};

const DECL_KEYWORDS: &[&str] = &["rule", "lemma", "functions", "equations", "end"];

type PResult<T> = Result<T, ()>;

#[derive(Clone, Copy, PartialEq, Eq)]
enum FactPos {
    Premise,
    Action,
    Conclusion,
}

pub(crate) struct Parser {
    toks: Vec<Token>,
    pos: usize,
    pub(crate) diags: Vec<Diagnostic>,
    sig: Signature,
    // occurrence tracking for the fact currently being parsed
    vars: Vec<(Var, Span)>,
    apps: Vec<(Name, usize, Span)>,
    // timepoint variables in scope while parsing a formula
    time_scope: Vec<Name>,
    binders: Vec<(String, Span)>,
}

impl Parser {
    pub(crate) fn new(toks: Vec<Token>) -> Self {
        Parser {
            toks,
            pos: 0,
            diags: Vec::new(),
            sig: Signature::builtin(),
            vars: Vec::new(),
            apps: Vec::new(),
            time_scope: Vec::new(),
            binders: Vec::new(),
        }
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn span(&self) -> Span {
        self.toks[self.pos].span
    }

    fn prev_span(&self) -> Span {
        self.toks[self.pos.saturating_sub(1)].span
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn at_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn error<T>(&mut self, message: impl Into<String>) -> PResult<T> {
        let span = self.span();
        self.diags.push(Diagnostic::error(Code::SyntaxError, span, message));
        Err(())
    }

    fn expect(&mut self, tok: Tok) -> PResult<Span> {
        if *self.peek() == tok {
            Ok(self.bump().span)
        } else {
            let found = self.peek().describe();
            self.error(format!("expected {}, found {found}", tok.describe()))
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> PResult<Span> {
        if self.at_keyword(kw) {
            Ok(self.bump().span)
        } else {
            let found = self.peek().describe();
            self.error(format!("expected `{kw}`, found {found}"))
        }
    }

    fn ident(&mut self) -> PResult<(String, Span)> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                let sp = self.bump().span;
                Ok((s, sp))
            }
            other => self.error(format!("expected identifier, found {}", other.describe())),
        }
    }

    /// Skip to the start of the next declaration.
    fn recover(&mut self) {
        loop {
            match self.peek() {
                Tok::Eof => return,
                Tok::Ident(s) if DECL_KEYWORDS.contains(&s.as_str()) => return,
                _ => {
                    self.bump();
                }
            }
        }
    }

    pub(crate) fn theory(&mut self) -> Option<Theory> {
        if self.expect_keyword("theory").is_err() {
            return None;
        }
        let Ok((name, _)) = self.ident() else { return None };
        if self.expect_keyword("begin").is_err() {
            return None;
        }
        let mut theory = Theory::empty(&name);
        loop {
            let result = match self.peek().clone() {
                Tok::Ident(s) if s == "end" => {
                    self.bump();
                    break;
                }
                Tok::Ident(s) if s == "functions" => self.functions(),
                Tok::Ident(s) if s == "equations" => self.equations(&mut theory.equations),
                Tok::Ident(s) if s == "rule" => self.rule().map(|r| theory.rules.push(r)),
                Tok::Ident(s) if s == "lemma" => self.lemma().map(|l| theory.lemmas.push(l)),
                Tok::Eof => {
                    let _ = self.error::<()>("missing `end` of theory");
                    break;
                }
                other => self.error(format!(
                    "expected `functions:`, `equations:`, `rule`, `lemma` or `end`, found {}",
                    other.describe()
                )),
            };
            if result.is_err() {
                // make progress even if the error was on a declaration keyword
                if matches!(self.peek(), Tok::Ident(s) if DECL_KEYWORDS.contains(&s.as_str()) && s != "end")
                    && self.diags.last().map(|d| d.line) == Some(self.span().line)
                    && self.diags.last().map(|d| d.col) == Some(self.span().col)
                {
                    self.bump();
                }
                self.recover();
            }
        }
        if *self.peek() != Tok::Eof {
            let _ = self.error::<()>(format!("unexpected {} after `end`", self.peek().describe()));
        }
        theory.signature = self.sig.clone();
        Some(theory)
    }

    fn functions(&mut self) -> PResult<()> {
        self.bump();
        self.expect(Tok::Colon)?;
        loop {
            let (name, span) = self.ident()?;
            self.expect(Tok::Slash)?;
            let arity = match self.peek().clone() {
                Tok::Number(n) => {
                    self.bump();
                    n as usize
                }
                other => return self.error(format!("expected arity, found {}", other.describe())),
            };
            if crate::theory::Reserved::of(&name).is_some() {
                self.diags.push(Diagnostic::error(
                    Code::BuiltinConflict,
                    span,
                    format!("`{name}` is a reserved fact name, not a function symbol"),
                ));
            } else if let Err(e) = self.sig.declare(&name, arity) {
                let code = match e {
                    crate::term::TermError::BuiltinConflict(..) => Code::BuiltinConflict,
                    _ => Code::ArityMismatch,
                };
                self.diags.push(Diagnostic::error(code, span, e.to_string()));
            }
            if *self.peek() == Tok::Comma {
                self.bump();
            } else {
                return Ok(());
            }
        }
    }

    fn equations(&mut self, out: &mut Vec<RewriteEquation>) -> PResult<()> {
        self.bump();
        self.expect(Tok::Colon)?;
        loop {
            let span = self.span();
            self.vars.clear();
            self.apps.clear();
            let lhs = self.term()?;
            self.expect(Tok::Eq)?;
            let rhs = self.term()?;
            for (f, n, sp) in std::mem::take(&mut self.apps) {
                self.check_app(&f, n, sp);
            }
            match RewriteEquation::new(lhs, rhs) {
                Ok(e) => out.push(e),
                Err(e) => self.diags.push(Diagnostic::error(Code::BadEquation, span, e.to_string())),
            }
            if *self.peek() == Tok::Comma {
                self.bump();
            } else {
                return Ok(());
            }
        }
    }

    pub(crate) fn check_app(&mut self, f: &str, n: usize, span: Span) {
        match self.sig.arity(f) {
            None => self.diags.push(Diagnostic::error(
                Code::UndeclaredFunction,
                span,
                format!("undeclared function symbol `{f}`"),
            ).with_hint("declare it with `functions: name/arity`")),
            Some(a) if a != n => self.diags.push(Diagnostic::error(
                Code::ArityMismatch,
                span,
                format!("function `{f}` expects {a} argument(s), got {n}"),
            )),
            _ => {}
        }
    }

    fn rule(&mut self) -> PResult<ProtocolRule> {
        self.bump();
        let (name, name_span) = self.ident()?;
        self.expect(Tok::Colon)?;
        let mut spans = RuleSpans { name: name_span, ..Default::default() };
        let mut lets = Vec::new();
        let mut premises = Vec::new();
        let mut saw_premises = false;
        loop {
            if self.at_keyword("let") {
                self.let_block(&mut lets, &mut spans.lets)?;
            } else if *self.peek() == Tok::LBracket {
                saw_premises = true;
                for (p, sp) in self.fact_list(FactPos::Premise)? {
                    premises.push(p);
                    spans.premises.push(sp);
                }
            } else {
                break;
            }
        }
        if !saw_premises {
            let found = self.peek().describe();
            return self.error(format!("expected premise list `[ ... ]`, found {found}"));
        }
        let mut actions = Vec::new();
        match self.peek() {
            Tok::Arrow => {
                self.bump();
            }
            Tok::ActOpen => {
                self.bump();
                if *self.peek() != Tok::ActClose {
                    loop {
                        let (f, sp) = self.fact(FactPos::Action)?;
                        actions.push(f.fact().clone());
                        spans.actions.push(sp);
                        if *self.peek() == Tok::Comma {
                            self.bump();
                        } else {
                            break;
                        }
                    }
                }
                self.expect(Tok::ActClose)?;
            }
            other => {
                let found = other.describe();
                return self.error(format!("expected `-->` or `--[`, found {found}"));
            }
        }
        let mut conclusions = Vec::new();
        for (c, sp) in self.fact_list(FactPos::Conclusion)? {
            conclusions.push(c.fact().clone());
            spans.conclusions.push(sp);
        }
        Ok(ProtocolRule { name: Name::from(name), lets, premises, actions, conclusions, spans })
    }

    fn let_block(&mut self, lets: &mut Vec<(Var, Term)>, spans: &mut Vec<FactSpans>) -> PResult<()> {
        self.bump();
        loop {
            if self.at_keyword("in") {
                self.bump();
                return Ok(());
            }
            let start = self.span();
            let sort = match self.peek() {
                Tok::Tilde => {
                    self.bump();
                    Sort::Fresh
                }
                Tok::Dollar => {
                    self.bump();
                    Sort::Pub
                }
                _ => Sort::Msg,
            };
            let (name, _) = self.ident()?;
            self.expect(Tok::Eq)?;
            self.vars.clear();
            self.apps.clear();
            let t = self.term()?;
            let end = self.prev_span();
            spans.push(FactSpans {
                span: Span { end: end.end, ..start },
                name: start,
                vars: std::mem::take(&mut self.vars),
                apps: std::mem::take(&mut self.apps),
            });
            lets.push((Var::new(&name, sort), t));
            if *self.peek() == Tok::Comma {
                self.bump();
            }
        }
    }

    fn fact_list(&mut self, pos: FactPos) -> PResult<Vec<(Premise, FactSpans)>> {
        self.expect(Tok::LBracket)?;
        let mut out = Vec::new();
        if *self.peek() == Tok::RBracket {
            self.bump();
            return Ok(out);
        }
        loop {
            out.push(self.fact(pos)?);
            match self.peek() {
                Tok::Comma => {
                    self.bump();
                }
                Tok::RBracket => {
                    self.bump();
                    return Ok(out);
                }
                // `]->` closes an empty-action premise list in `[ .. ]->` style is not valid
                other => {
                    let found = other.describe();
                    return self.error(format!("expected `,` or `]`, found {found}"));
                }
            }
        }
    }

    fn fact(&mut self, pos: FactPos) -> PResult<(Premise, FactSpans)> {
        if self.at_keyword("not") && *self.peek_at(1) == Tok::LParen {
            let span = self.span();
            if pos != FactPos::Premise {
                return self.error("`not(...)` is only allowed in premises");
            }
            self.bump();
            self.bump();
            // the `!` is optional inside a negation
            if *self.peek() == Tok::Bang {
                self.bump();
            }
            let (inner, mut sp) = self.plain_fact(false)?;
            self.expect(Tok::RParen)?;
            sp.span = Span { end: self.prev_span().end, ..span };
            let inner = Fact { persistent: true, ..inner };
            return Ok((Premise::Absent(inner), sp));
        }
        let persistent = if *self.peek() == Tok::Bang {
            self.bump();
            true
        } else {
            false
        };
        let (f, sp) = self.plain_fact(persistent)?;
        Ok((Premise::Present(f), sp))
    }

    fn plain_fact(&mut self, persistent: bool) -> PResult<(Fact, FactSpans)> {
        let start = if persistent { self.prev_span() } else { self.span() };
        let (name, name_span) = self.ident()?;
        self.vars.clear();
        self.apps.clear();
        let args = if *self.peek() == Tok::LParen {
            self.bump();
            let args = self.term_list(Tok::RParen)?;
            self.expect(Tok::RParen)?;
            args
        } else {
            Vec::new()
        };
        let spans = FactSpans {
            span: Span { end: self.prev_span().end, ..start },
            name: name_span,
            vars: std::mem::take(&mut self.vars),
            apps: std::mem::take(&mut self.apps),
        };
        Ok((Fact { name: Name::from(name), args, persistent }, spans))
    }

    fn term_list(&mut self, close: Tok) -> PResult<Vec<Term>> {
        let mut out = Vec::new();
        if *self.peek() == close {
            return Ok(out);
        }
        loop {
            out.push(self.term()?);
            if *self.peek() == Tok::Comma {
                self.bump();
            } else {
                return Ok(out);
            }
        }
    }

    pub(crate) fn term(&mut self) -> PResult<Term> {
        let span = self.span();
        match self.peek().clone() {
            Tok::Tilde | Tok::Dollar => {
                let sort = if *self.peek() == Tok::Tilde { Sort::Fresh } else { Sort::Pub };
                self.bump();
                let (name, _) = self.ident()?;
                let v = Var::new(&name, sort);
                self.vars.push((v.clone(), span));
                Ok(Term::Var(v))
            }
            Tok::Str(s) => {
                self.bump();
                Ok(Term::constant(&s))
            }
            Tok::LAngle => {
                self.bump();
                let items = self.term_list(Tok::RAngle)?;
                self.expect(Tok::RAngle)?;
                if items.len() < 2 {
                    self.diags.push(Diagnostic::error(Code::SyntaxError, span, "tuples need at least two components"));
                    return Err(());
                }
                Ok(Term::tuple(items))
            }
            Tok::Ident(name) => {
                self.bump();
                if *self.peek() == Tok::LParen {
                    self.bump();
                    let args = self.term_list(Tok::RParen)?;
                    self.expect(Tok::RParen)?;
                    self.apps.push((Name::from(name.as_str()), args.len(), span));
                    Ok(Term::app(&name, args))
                } else if self.sig.arity(&name) == Some(0) {
                    Ok(Term::app(&name, Vec::new()))
                } else {
                    let v = Var::msg(&name);
                    self.vars.push((v.clone(), span));
                    Ok(Term::Var(v))
                }
            }
            other => self.error(format!("expected a term, found {}", other.describe())),
        }
    }

    fn lemma(&mut self) -> PResult<Lemma> {
        let span = self.bump().span;
        let (name, _) = self.ident()?;
        let mut mode = None;
        let annotation = |p: &mut Parser, mode: &mut Option<LemmaMode>| match p.peek() {
            Tok::Ident(s) if s == "exists-trace" => {
                p.bump();
                *mode = Some(LemmaMode::ExistsTrace);
            }
            Tok::Ident(s) if s == "all-traces" => {
                p.bump();
                *mode = Some(LemmaMode::AllTraces);
            }
            _ => {}
        };
        annotation(self, &mut mode);
        self.expect(Tok::Colon)?;
        annotation(self, &mut mode);
        self.expect(Tok::Quote)?;
        self.time_scope.clear();
        self.binders.clear();
        let formula = self.formula()?;
        self.expect(Tok::Quote)?;
        Ok(Lemma {
            name: Name::from(name),
            mode: mode.unwrap_or(LemmaMode::AllTraces),
            formula,
            span,
            binders: Binders(std::mem::take(&mut self.binders)),
        })
    }

    fn formula(&mut self) -> PResult<Formula> {
        if self.at_keyword("All") || self.at_keyword("Ex") {
            return self.quantified();
        }
        let lhs = self.disjunction()?;
        if *self.peek() == Tok::Implies {
            self.bump();
            let rhs = self.formula()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn quantified(&mut self) -> PResult<Formula> {
        let q = if self.at_keyword("All") { Quantifier::All } else { Quantifier::Ex };
        self.bump();
        let mut vars = Vec::new();
        loop {
            match self.peek().clone() {
                Tok::Hash => {
                    let at = self.bump().span;
                    let (n, _) = self.ident()?;
                    self.binders.push((format!("#{n}"), at));
                    vars.push(QVar::Time(Name::from(n)));
                }
                Tok::Tilde | Tok::Dollar => {
                    let sort = if *self.peek() == Tok::Tilde { Sort::Fresh } else { Sort::Pub };
                    let at = self.bump().span;
                    let (n, _) = self.ident()?;
                    let v = Var::new(&n, sort);
                    self.binders.push((v.to_string(), at));
                    vars.push(QVar::Msg(v));
                }
                Tok::Ident(n) => {
                    let at = self.bump().span;
                    self.binders.push((n.clone(), at));
                    vars.push(QVar::Msg(Var::msg(&n)));
                }
                Tok::Dot => {
                    self.bump();
                    break;
                }
                other => return self.error(format!("expected variable or `.`, found {}", other.describe())),
            }
        }
        if vars.is_empty() {
            return self.error("quantifier binds no variables");
        }
        let n = self.time_scope.len();
        for v in &vars {
            if let QVar::Time(t) = v {
                self.time_scope.push(t.clone());
            }
        }
        let body = self.formula();
        self.time_scope.truncate(n);
        Ok(Formula::Quant(q, vars, Box::new(body?)))
    }

    fn disjunction(&mut self) -> PResult<Formula> {
        let mut f = self.conjunction()?;
        while *self.peek() == Tok::Pipe {
            self.bump();
            f = Formula::or(f, self.conjunction()?);
        }
        Ok(f)
    }

    fn conjunction(&mut self) -> PResult<Formula> {
        let mut f = self.unary()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            f = Formula::and(f, self.unary()?);
        }
        Ok(f)
    }

    fn unary(&mut self) -> PResult<Formula> {
        if self.at_keyword("not") {
            self.bump();
            if *self.peek() == Tok::LParen {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                return Ok(Formula::not(f));
            }
            return Ok(Formula::not(self.unary()?));
        }
        if self.at_keyword("All") || self.at_keyword("Ex") {
            return self.quantified();
        }
        if *self.peek() == Tok::LParen {
            self.bump();
            let f = self.formula()?;
            self.expect(Tok::RParen)?;
            return Ok(f);
        }
        self.atom()
    }

    fn time_var(&mut self) -> PResult<Name> {
        if *self.peek() == Tok::Hash {
            self.bump();
        }
        let (n, _) = self.ident()?;
        Ok(Name::from(n))
    }

    fn is_time_ident(&self) -> bool {
        matches!(self.peek(), Tok::Ident(s) if self.time_scope.iter().any(|t| &**t == s))
            && matches!(self.peek_at(1), Tok::LAngle | Tok::Eq)
    }

    fn atom(&mut self) -> PResult<Formula> {
        let span = self.span();
        if *self.peek() == Tok::Hash || self.is_time_ident() {
            let i = self.time_var()?;
            let op = self.bump();
            let j = self.time_var()?;
            return match op.tok {
                Tok::LAngle => Ok(Formula::Atom(Atom::Less(i, j))),
                Tok::Eq => Ok(Formula::Atom(Atom::EqTime(i, j))),
                other => {
                    self.diags.push(Diagnostic::error(
                        Code::SyntaxError,
                        op.span,
                        format!("expected `<` or `=` between timepoints, found {}", other.describe()),
                    ));
                    Err(())
                }
            };
        }
        let persistent = if *self.peek() == Tok::Bang {
            self.bump();
            true
        } else {
            false
        };
        self.vars.clear();
        self.apps.clear();
        let t = self.term()?;
        if *self.peek() == Tok::At {
            self.bump();
            let time = self.time_var()?;
            let fact = match t {
                Term::App(name, args) => {
                    // the outermost application is the fact name, recorded last
                    if !args.is_empty() {
                        self.apps.pop();
                    }
                    Fact { name, args, persistent }
                }
                Term::Var(v) if v.sort == Sort::Msg => Fact { name: v.name, args: Vec::new(), persistent },
                _ => {
                    self.diags.push(Diagnostic::error(Code::SyntaxError, span, "expected an action fact before `@`"));
                    return Err(());
                }
            };
            let apps = std::mem::take(&mut self.apps);
            for (f, n, sp) in apps {
                self.check_app(&f, n, sp);
            }
            return Ok(Formula::Atom(Atom::Action {
                fact,
                time,
                span: Span { end: self.prev_span().end, ..span },
            }));
        }
        if *self.peek() == Tok::Eq {
            self.bump();
            let u = self.term()?;
            let apps = std::mem::take(&mut self.apps);
            for (f, n, sp) in apps {
                self.check_app(&f, n, sp);
            }
            return Ok(Formula::Atom(Atom::EqTerm(t, u)));
        }
        let found = self.peek().describe();
        self.error(format!("expected `@` or `=` in formula atom, found {found}"))
    }
}
