//! Recursive-descent parser producing a spanned surface AST.

use std::sync::Arc;

use crate::diag::{Diagnostic, ErrorCode, Span};
use crate::surface::lexer::{lex, Kw, Prim, Tok, Token};

#[derive(Clone, Debug)]
pub struct STerm {
    pub kind: SKind,
    pub span: Span,
}

#[derive(Clone, Debug)]
pub struct Binder {
    pub names: Vec<(String, Span)>,
    pub ty: STerm,
}

#[derive(Clone, Debug)]
pub enum Arg {
    Term(STerm),
    /// `[x y. body]`
    Scope(Vec<(String, Span)>, STerm),
}

#[derive(Clone, Debug)]
pub enum SKind {
    Ident(String),
    Univ,
    Zero,
    One,
    Two,
    Bit0,
    Bit1,
    Unit,
    Pi(Vec<Binder>, Box<STerm>),
    Sig(Vec<Binder>, Box<STerm>),
    W(Box<Binder>, Box<STerm>),
    Lam(Vec<Binder>, Box<STerm>),
    Arrow(Box<STerm>, Box<STerm>),
    Prod(Box<STerm>, Box<STerm>),
    App(Box<STerm>, Box<STerm>),
    /// Two or more components, nested to the right.
    Tuple(Vec<STerm>),
    Let(String, Span, Box<STerm>, Box<STerm>),
    Prim(Prim, Vec<Arg>),
}

#[derive(Clone, Debug)]
pub struct SDecl {
    pub name: String,
    pub name_span: Span,
    pub binders: Vec<Binder>,
    pub ty: Option<STerm>,
    /// `None` for axioms.
    pub body: Option<STerm>,
    pub span: Span,
}

#[derive(Clone, Debug)]
pub struct SourceModule {
    pub path: Arc<str>,
    pub imports: Vec<(String, Span)>,
    pub decls: Vec<SDecl>,
}

pub fn parse(path: &str, text: &str) -> Result<SourceModule, Diagnostic> {
    let file: Arc<str> = path.into();
    let toks = lex(&file, text)?;
    let mut p = Parser { toks, pos: 0 };
    let mut imports = Vec::new();
    while p.peek() == &Tok::Kw(Kw::Import) {
        p.bump();
        imports.push(p.ident()?);
    }
    let mut decls = Vec::new();
    while p.peek() != &Tok::Eof {
        decls.push(p.decl()?);
    }
    Ok(SourceModule {
        path: file,
        imports,
        decls,
    })
}

/// Parse a standalone term.
pub fn parse_term(path: &str, text: &str) -> Result<STerm, Diagnostic> {
    let file: Arc<str> = path.into();
    let toks = lex(&file, text)?;
    let mut p = Parser { toks, pos: 0 };
    let t = p.term()?;
    p.expect(Tok::Eof, "end of input")?;
    Ok(t)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

type PResult<T> = Result<T, Diagnostic>;

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("identifier `{s}`"),
        Tok::Kw(k) => format!("keyword `{k:?}`"),
        Tok::Eof => "end of input".into(),
        other => format!("`{}`", symbol(other)),
    }
}

fn symbol(t: &Tok) -> &'static str {
    match t {
        Tok::LParen => "(",
        Tok::RParen => ")",
        Tok::LBrack => "[",
        Tok::RBrack => "]",
        Tok::Comma => ",",
        Tok::Colon => ":",
        Tok::Define => ":=",
        Tok::FatArrow => "=>",
        Tok::Arrow => "->",
        Tok::Star => "*",
        Tok::Dot => ".",
        _ => "?",
    }
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn span(&self) -> Span {
        self.toks[self.pos].span.clone()
    }

    fn prev_span(&self) -> Span {
        self.toks[self.pos.saturating_sub(1)].span.clone()
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &str) -> Diagnostic {
        Diagnostic::new(
            ErrorCode::Syntax,
            format!("expected {expected}, found {}", describe(self.peek())),
        )
        .at(self.span())
    }

    fn expect(&mut self, t: Tok, what: &str) -> PResult<Span> {
        if *self.peek() == t {
            Ok(self.bump().span)
        } else {
            Err(self.error(what))
        }
    }

    fn ident(&mut self) -> PResult<(String, Span)> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                let sp = self.bump().span;
                Ok((s, sp))
            }
            _ => Err(self.error("an identifier")),
        }
    }

    fn decl(&mut self) -> PResult<SDecl> {
        let start = self.span();
        let is_axiom = match self.peek() {
            Tok::Kw(Kw::Def) => false,
            Tok::Kw(Kw::Axiom) => true,
            _ => return Err(self.error("`def` or `axiom`")),
        };
        self.bump();
        let (name, name_span) = self.ident()?;
        let binders = self.binders()?;
        let ty = if *self.peek() == Tok::Colon {
            self.bump();
            Some(self.term()?)
        } else {
            None
        };
        let body = if is_axiom {
            if ty.is_none() {
                return Err(self.error("`:` and a type for the axiom"));
            }
            None
        } else {
            self.expect(Tok::Define, "`:=`")?;
            Some(self.term()?)
        };
        Ok(SDecl {
            name,
            name_span,
            binders,
            ty,
            body,
            span: start.join(&self.prev_span()),
        })
    }

    /// Zero or more `(x y : A)` groups.
    fn binders(&mut self) -> PResult<Vec<Binder>> {
        let mut out = Vec::new();
        while *self.peek() == Tok::LParen && matches!(self.peek_at(1), Tok::Ident(_)) {
            let mut k = 1;
            while matches!(self.peek_at(k), Tok::Ident(_)) {
                k += 1;
            }
            if *self.peek_at(k) != Tok::Colon {
                break;
            }
            self.bump();
            let mut names = Vec::new();
            while let Tok::Ident(_) = self.peek() {
                names.push(self.ident()?);
            }
            self.expect(Tok::Colon, "`:`")?;
            let ty = self.term()?;
            self.expect(Tok::RParen, "`)`")?;
            out.push(Binder { names, ty });
        }
        Ok(out)
    }

    fn nonempty_binders(&mut self) -> PResult<Vec<Binder>> {
        let bs = self.binders()?;
        if bs.is_empty() {
            return Err(self.error("a binder `(x : A)`"));
        }
        Ok(bs)
    }

    pub fn term(&mut self) -> PResult<STerm> {
        let start = self.span();
        match self.peek() {
            Tok::Kw(Kw::Fun) => {
                self.bump();
                let bs = self.nonempty_binders()?;
                self.expect(Tok::FatArrow, "`=>`")?;
                let body = self.term()?;
                Ok(self.mk(start, SKind::Lam(bs, Box::new(body))))
            }
            Tok::Kw(Kw::Pi) | Tok::Kw(Kw::Sig) => {
                let is_pi = *self.peek() == Tok::Kw(Kw::Pi);
                self.bump();
                let bs = self.nonempty_binders()?;
                self.expect(Tok::Comma, "`,`")?;
                let body = Box::new(self.term()?);
                Ok(self.mk(
                    start,
                    if is_pi {
                        SKind::Pi(bs, body)
                    } else {
                        SKind::Sig(bs, body)
                    },
                ))
            }
            Tok::Kw(Kw::W) => {
                self.bump();
                let mut bs = self.nonempty_binders()?;
                if bs.len() != 1 || bs[0].names.len() != 1 {
                    return Err(
                        Diagnostic::new(ErrorCode::Syntax, "a W-type binds exactly one label variable").at(start),
                    );
                }
                self.expect(Tok::Comma, "`,`")?;
                let body = self.term()?;
                Ok(self.mk(start, SKind::W(Box::new(bs.remove(0)), Box::new(body))))
            }
            Tok::Kw(Kw::Let) => {
                self.bump();
                let (name, nspan) = self.ident()?;
                self.expect(Tok::Define, "`:=`")?;
                let val = self.term()?;
                self.expect(Tok::Kw(Kw::In), "`in`")?;
                let body = self.term()?;
                Ok(self.mk(start, SKind::Let(name, nspan, Box::new(val), Box::new(body))))
            }
            _ => self.arrow(),
        }
    }

    fn mk(&self, start: Span, kind: SKind) -> STerm {
        STerm {
            kind,
            span: start.join(&self.prev_span()),
        }
    }

    fn arrow(&mut self) -> PResult<STerm> {
        let start = self.span();
        let lhs = self.prod()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.term()?;
            return Ok(self.mk(start, SKind::Arrow(Box::new(lhs), Box::new(rhs))));
        }
        Ok(lhs)
    }

    fn prod(&mut self) -> PResult<STerm> {
        let start = self.span();
        let lhs = self.app()?;
        if *self.peek() == Tok::Star {
            self.bump();
            let rhs = if matches!(self.peek(), Tok::Kw(Kw::Fun | Kw::Pi | Kw::Sig | Kw::W | Kw::Let)) {
                self.term()?
            } else {
                self.prod()?
            };
            return Ok(self.mk(start, SKind::Prod(Box::new(lhs), Box::new(rhs))));
        }
        Ok(lhs)
    }

    fn starts_atom(&self) -> bool {
        matches!(
            self.peek(),
            Tok::Ident(_)
                | Tok::LParen
                | Tok::Kw(Kw::U | Kw::Zero | Kw::One | Kw::Two | Kw::Bit0 | Kw::Bit1 | Kw::Unit)
        )
    }

    fn app(&mut self) -> PResult<STerm> {
        let start = self.span();
        let mut head = match self.peek() {
            Tok::Kw(Kw::Prim(p)) => {
                let p = *p;
                self.bump();
                let mut args = Vec::new();
                for shape in p.shape() {
                    match shape {
                        None => args.push(Arg::Term(self.atom_or_fail(p)?)),
                        Some(n) => args.push(self.scope(*n)?),
                    }
                }
                self.mk(start.clone(), SKind::Prim(p, args))
            }
            _ => self.atom()?,
        };
        while self.starts_atom() {
            let arg = self.atom()?;
            head = self.mk(start.clone(), SKind::App(Box::new(head), Box::new(arg)));
        }
        Ok(head)
    }

    fn atom_or_fail(&mut self, p: Prim) -> PResult<STerm> {
        if self.starts_atom() {
            self.atom()
        } else {
            Err(self.error(&format!("an argument for `{}`", p.keyword())))
        }
    }

    fn scope(&mut self, n: usize) -> PResult<Arg> {
        self.expect(Tok::LBrack, "`[` opening a binder scope")?;
        let mut names = Vec::new();
        while let Tok::Ident(_) = self.peek() {
            names.push(self.ident()?);
        }
        if names.len() != n {
            return Err(Diagnostic::new(
                ErrorCode::Syntax,
                format!("this scope binds {n} variable(s), found {}", names.len()),
            )
            .at(self.span()));
        }
        self.expect(Tok::Dot, "`.`")?;
        let body = self.term()?;
        self.expect(Tok::RBrack, "`]`")?;
        Ok(Arg::Scope(names, body))
    }

    fn atom(&mut self) -> PResult<STerm> {
        let start = self.span();
        let kind = match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                SKind::Ident(s)
            }
            Tok::Kw(k) => {
                let kind = match k {
                    Kw::U => SKind::Univ,
                    Kw::Zero => SKind::Zero,
                    Kw::One => SKind::One,
                    Kw::Two => SKind::Two,
                    Kw::Bit0 => SKind::Bit0,
                    Kw::Bit1 => SKind::Bit1,
                    Kw::Unit => SKind::Unit,
                    _ => return Err(self.error("a term")),
                };
                self.bump();
                kind
            }
            Tok::LParen => {
                self.bump();
                let first = self.term()?;
                if *self.peek() == Tok::Comma {
                    let mut items = vec![first];
                    while *self.peek() == Tok::Comma {
                        self.bump();
                        items.push(self.term()?);
                    }
                    self.expect(Tok::RParen, "`)`")?;
                    SKind::Tuple(items)
                } else {
                    self.expect(Tok::RParen, "`)`")?;
                    return Ok(STerm {
                        kind: first.kind,
                        span: start.join(&self.prev_span()),
                    });
                }
            }
            _ => return Err(self.error("a term")),
        };
        Ok(self.mk(start, kind))
    }
}
