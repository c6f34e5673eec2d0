use std::collections::BTreeSet;

use super::lexer::{tokenize, Tok, Token};
use super::{ParseError, SourceSpan};
use crate::syntax::{CcsProc, CspProc, Interface, Label, Multiplicity, Name, RenamingMap, SyncClause, Term};

#[derive(Clone, Copy, PartialEq, Eq)]
enum Calculus {
    Ccs,
    Csp,
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    calc: Calculus,
}

fn whole(text: &str) -> SourceSpan {
    SourceSpan { line: 1, column: 1, length: text.chars().count() }
}

pub fn parse_ccs(text: &str) -> Result<CcsProc, ParseError> {
    let mut p = Parser { toks: tokenize(text)?, pos: 0, calc: Calculus::Ccs };
    let proc_ = p.ccs_par()?;
    p.expect_eof()?;
    proc_.well_formed().map_err(|e| ParseError::new(e.to_string(), whole(text)))?;
    Ok(proc_)
}

pub fn parse_cspmn(text: &str) -> Result<CspProc, ParseError> {
    let mut p = Parser { toks: tokenize(text)?, pos: 0, calc: Calculus::Csp };
    let proc_ = p.csp_par()?;
    p.expect_eof()?;
    proc_.well_formed().map_err(|e| ParseError::new(e.to_string(), whole(text)))?;
    Ok(proc_)
}

/// Parses a single label in CCS spelling (`tau` is the silent action).
pub fn parse_label(text: &str) -> Result<Label, ParseError> {
    let mut p = Parser { toks: tokenize(text)?, pos: 0, calc: Calculus::Ccs };
    let l = p.label()?;
    p.expect_eof()?;
    Ok(l)
}

/// Parses a single label in CSPmn spelling (`tau` is the visible event).
pub fn parse_event(text: &str) -> Result<Label, ParseError> {
    let mut p = Parser { toks: tokenize(text)?, pos: 0, calc: Calculus::Csp };
    let l = p.label()?;
    p.expect_eof()?;
    Ok(l)
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s, _) => format!("`{s}`"),
        Tok::Num(n) => format!("`{n}`"),
        Tok::Eof => "end of input".into(),
        other => format!("{other:?}"),
    }
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, off: usize) -> &Tok {
        let i = (self.pos + off).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn span(&self) -> SourceSpan {
        self.toks[self.pos].span
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos < self.toks.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    fn error_here(&self, what: &str) -> ParseError {
        ParseError::new(format!("expected {what}, found {}", describe(self.peek())), self.span())
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<Token, ParseError> {
        if *self.peek() == t {
            Ok(self.bump())
        } else {
            Err(self.error_here(what))
        }
    }

    fn expect_eof(&mut self) -> Result<(), ParseError> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            Err(ParseError::new(format!("unexpected {}", describe(self.peek())), self.span()))
        }
    }

    fn name(&self, text: &str, span: SourceSpan) -> Result<Name, ParseError> {
        Name::new(text).map_err(|e| ParseError::new(e.to_string(), span))
    }

    fn label(&mut self) -> Result<Label, ParseError> {
        let start = self.span();
        let co = self.eat(&Tok::Quote);
        let tok = self.bump();
        let span = SourceSpan {
            line: start.line,
            column: start.column,
            length: tok.span.column + tok.span.length - start.column,
        };
        let (text, idx) = match tok.tok {
            Tok::Ident(t, i) => (t, i),
            _ => {
                return Err(ParseError::new(format!("expected a label, found {}", describe(&tok.tok)), tok.span));
            }
        };
        if idx.is_none() && !co {
            match text.as_str() {
                "tau" if *self.peek() == Tok::LBracket => {
                    self.bump();
                    let a = self.bump();
                    let a_name = match a.tok {
                        Tok::Ident(ref t, None) => self.name(t, a.span)?,
                        _ => return Err(ParseError::new("expected a name in `tau[a|'a]`", a.span)),
                    };
                    self.expect(Tok::Pipe, "`|`")?;
                    self.expect(Tok::Quote, "`'`")?;
                    let b = self.bump();
                    match b.tok {
                        Tok::Ident(ref t, None) if *t == a_name.as_str() => {}
                        _ => return Err(ParseError::new("mismatched names in `tau[a|'a]`", b.span)),
                    }
                    self.expect(Tok::RBracket, "`]`")?;
                    return Ok(Label::TauPair(a_name));
                }
                "tau" => {
                    return Ok(match self.calc {
                        Calculus::Ccs => Label::Tau,
                        Calculus::Csp => Label::TauEvent,
                    })
                }
                "tick" => return Ok(Label::Tick),
                _ => {}
            }
        }
        let (stem, sync) = match text.strip_suffix("_S") {
            Some(s) => (s, true),
            None => (text.as_str(), false),
        };
        let base = self.name(stem, span)?;
        let check = |r: Result<Label, crate::syntax::SyntaxError>| r.map_err(|e| ParseError::new(e.to_string(), span));
        Ok(match (co, sync, idx) {
            (false, false, None) => Label::Name(base),
            (true, false, None) => Label::CoName(base),
            (false, true, None) => Label::SyncName(base),
            (true, true, None) => Label::CoSyncName(base),
            (false, false, Some(i)) => check(Label::indexed(base, i))?,
            (true, false, Some(i)) => check(Label::co_indexed(base, i))?,
            (false, true, Some(i)) => {
                let l = check(Label::indexed(base, i))?;
                match l {
                    Label::Indexed(b, i) => Label::SyncIndexed(b, i),
                    _ => unreachable!(),
                }
            }
            (true, true, Some(_)) => {
                return Err(ParseError::new("indexed co-synchronisation names do not exist", span))
            }
        })
    }

    fn label_set(&mut self) -> Result<BTreeSet<Label>, ParseError> {
        self.expect(Tok::LBrace, "`{`")?;
        let mut out = BTreeSet::new();
        if self.eat(&Tok::RBrace) {
            return Ok(out);
        }
        loop {
            out.insert(self.label()?);
            if self.eat(&Tok::RBrace) {
                return Ok(out);
            }
            self.expect(Tok::Comma, "`,` or `}`")?;
        }
    }

    fn rec_header(&mut self) -> Result<String, ParseError> {
        self.bump();
        let t = self.bump();
        let var = match t.tok {
            Tok::Ident(v, None) => v,
            _ => return Err(ParseError::new("expected a recursion variable", t.span)),
        };
        self.expect(Tok::Dot, "`.` after the recursion variable")?;
        Ok(var)
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s, None) if s == kw)
    }

    // CCS: par < sum < prefix < restriction.

    fn ccs_par(&mut self) -> Result<CcsProc, ParseError> {
        let mut lhs = self.ccs_sum()?;
        loop {
            if self.eat(&Tok::Pipe) {
                lhs = CcsProc::par(lhs, self.ccs_sum()?);
            } else if self.eat(&Tok::PipeT) {
                lhs = CcsProc::tpar(lhs, self.ccs_sum()?);
            } else {
                return Ok(lhs);
            }
        }
    }

    fn ccs_sum(&mut self) -> Result<CcsProc, ParseError> {
        let mut lhs = self.ccs_prefix()?;
        while self.eat(&Tok::Plus) {
            lhs = CcsProc::sum(lhs, self.ccs_prefix()?);
        }
        Ok(lhs)
    }

    fn ccs_prefix(&mut self) -> Result<CcsProc, ParseError> {
        if self.is_kw("rec") {
            let var = self.rec_header()?;
            return Ok(CcsProc::rec(var, self.ccs_par()?));
        }
        let starts_label = match self.peek() {
            Tok::Quote => true,
            Tok::Ident(s, _) => {
                matches!(self.peek_at(1), Tok::Dot) || (s == "tau" && matches!(self.peek_at(1), Tok::LBracket))
            }
            _ => false,
        };
        if starts_label {
            let l = self.label()?;
            let dot = self.expect(Tok::Dot, "`.` after the action")?;
            if *self.peek() == Tok::Eof {
                return Err(ParseError::new("missing process after `.`", dot.span));
            }
            return Ok(CcsProc::prefix(l, self.ccs_prefix()?));
        }
        self.ccs_postfix()
    }

    fn ccs_postfix(&mut self) -> Result<CcsProc, ParseError> {
        let mut p = self.ccs_atom()?;
        loop {
            if self.eat(&Tok::Backslash) {
                p = CcsProc::Restrict(Box::new(p), self.label_set()?);
            } else if self.eat(&Tok::BackslashT) {
                p = CcsProc::THide(Box::new(p), self.label_set()?);
            } else {
                return Ok(p);
            }
        }
    }

    fn ccs_atom(&mut self) -> Result<CcsProc, ParseError> {
        match self.peek().clone() {
            Tok::Num(0) => {
                self.bump();
                Ok(CcsProc::Nil)
            }
            Tok::LParen => {
                self.bump();
                let p = self.ccs_par()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(p)
            }
            Tok::Ident(v, None) if !matches!(v.as_str(), "rec" | "tau") => {
                self.bump();
                Ok(CcsProc::var(v))
            }
            _ => Err(self.error_here("a process")),
        }
    }

    // CSPmn: par < |~| < [] < prefix < postfix.

    fn csp_par(&mut self) -> Result<CspProc, ParseError> {
        let mut lhs = self.csp_int()?;
        loop {
            if self.eat(&Tok::Interleave) {
                lhs = CspProc::par(lhs, self.csp_int()?, Interface::new());
            } else if *self.peek() == Tok::LSync {
                self.bump();
                let iface = self.interface()?;
                self.expect(Tok::RSync, "`|]`")?;
                lhs = CspProc::par(lhs, self.csp_int()?, iface);
            } else {
                return Ok(lhs);
            }
        }
    }

    fn interface(&mut self) -> Result<Interface, ParseError> {
        self.expect(Tok::LBrace, "`{`")?;
        let mut iface = Interface::new();
        if self.eat(&Tok::RBrace) {
            return Ok(iface);
        }
        loop {
            let event = self.label()?;
            let multiplicity = if self.eat(&Tok::Hash) {
                let t = self.bump();
                match t.tok {
                    Tok::Num(m) => Multiplicity::Explicit(m),
                    _ => return Err(ParseError::new("expected a multiplicity after `#`", t.span)),
                }
            } else {
                Multiplicity::Default
            };
            let span = self.toks[self.pos - 1].span;
            iface.insert(SyncClause::new(event, multiplicity).map_err(|e| ParseError::new(e.to_string(), span))?);
            if self.eat(&Tok::RBrace) {
                return Ok(iface);
            }
            self.expect(Tok::Comma, "`,` or `}`")?;
        }
    }

    fn csp_int(&mut self) -> Result<CspProc, ParseError> {
        let mut lhs = self.csp_ext()?;
        while self.eat(&Tok::IntChoice) {
            lhs = CspProc::int(lhs, self.csp_ext()?);
        }
        Ok(lhs)
    }

    fn csp_ext(&mut self) -> Result<CspProc, ParseError> {
        let mut lhs = self.csp_prefix()?;
        while self.eat(&Tok::ExtChoice) {
            lhs = CspProc::ext(lhs, self.csp_prefix()?);
        }
        Ok(lhs)
    }

    fn csp_prefix(&mut self) -> Result<CspProc, ParseError> {
        if self.is_kw("rec") {
            let var = self.rec_header()?;
            return Ok(CspProc::rec(var, self.csp_par()?));
        }
        let starts_label = match self.peek() {
            Tok::Quote => true,
            Tok::Ident(s, _) => {
                matches!(self.peek_at(1), Tok::Arrow) || (s == "tau" && matches!(self.peek_at(1), Tok::LBracket))
            }
            _ => false,
        };
        if starts_label {
            let l = self.label()?;
            let arrow = self.expect(Tok::Arrow, "`->` after the event")?;
            if *self.peek() == Tok::Eof {
                return Err(ParseError::new("missing process after `->`", arrow.span));
            }
            return Ok(CspProc::prefix(l, self.csp_prefix()?));
        }
        self.csp_postfix()
    }

    fn csp_postfix(&mut self) -> Result<CspProc, ParseError> {
        let mut p = self.csp_atom()?;
        loop {
            if self.eat(&Tok::Backslash) {
                p = CspProc::Hide(Box::new(p), self.label_set()?);
            } else if self.eat(&Tok::RestrictOp) {
                p = CspProc::Restrict(Box::new(p), self.label_set()?);
            } else if self.eat(&Tok::LRename) {
                let mut map = RenamingMap::new();
                loop {
                    let from = self.label()?;
                    self.expect(Tok::RenameArrow, "`<-`")?;
                    let to = self.label()?;
                    map.entry(from).or_default().insert(to);
                    if self.eat(&Tok::RRename) {
                        break;
                    }
                    self.expect(Tok::Comma, "`,` or `]]`")?;
                }
                p = CspProc::Rename(Box::new(p), map);
            } else {
                return Ok(p);
            }
        }
    }

    fn csp_atom(&mut self) -> Result<CspProc, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s, None) if s == "STOP" => {
                self.bump();
                Ok(CspProc::Stop)
            }
            Tok::Ident(s, None) if s == "SKIP" => {
                self.bump();
                Ok(CspProc::Skip)
            }
            Tok::LParen => {
                self.bump();
                let p = self.csp_par()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(p)
            }
            Tok::Ident(v, None) if !matches!(v.as_str(), "rec" | "tau" | "tick") => {
                self.bump();
                Ok(CspProc::var(v))
            }
            _ => Err(self.error_here("a process")),
        }
    }
}
