//! Name resolution from the surface AST to de Bruijn kernel terms.

use std::collections::HashSet;
use std::sync::Arc;

use crate::diag::{Diagnostic, ErrorCode, Span};
use crate::rules::{DeclCandidate, SpanMap};
use crate::surface::lexer::Prim;
use crate::surface::parser::{Arg, Binder, SDecl, SKind, STerm, SourceModule};
use crate::term::{shift_up, Name, Node, Term};

enum Entry {
    /// Bound at this binder depth.
    Var(u32),
    /// Inlined value, elaborated at this depth.
    Let(Term, u32),
}

/// Elaborates terms against a fixed set of global names.
pub struct Elaborator<'g> {
    globals: &'g dyn Fn(&str) -> bool,
    scope: Vec<(String, Entry)>,
    depth: u32,
    spans: SpanMap,
}

impl<'g> Elaborator<'g> {
    pub fn new(globals: &'g dyn Fn(&str) -> bool) -> Self {
        Elaborator {
            globals,
            scope: Vec::new(),
            depth: 0,
            spans: SpanMap::new(),
        }
    }

    /// Start with local variables in scope, outermost first.
    pub fn with_locals(mut self, names: &[Name]) -> Self {
        for n in names {
            self.push_var(n);
        }
        self
    }

    pub fn take_spans(&mut self) -> SpanMap {
        std::mem::take(&mut self.spans)
    }

    fn push_var(&mut self, name: &str) {
        self.scope.push((name.to_string(), Entry::Var(self.depth)));
        self.depth += 1;
    }

    fn pop_var(&mut self) {
        self.scope.pop();
        self.depth -= 1;
    }

    fn mark(&mut self, t: Term, span: &Span) -> Term {
        self.spans.entry(t.addr()).or_insert_with(|| (t.clone(), span.clone()));
        t
    }

    fn node(&mut self, n: Node, span: &Span) -> Term {
        self.mark(Term::new(n), span)
    }

    fn hinted(&mut self, n: Node, names: Vec<String>, span: &Span) -> Term {
        let hints: Arc<[Name]> = names.into_iter().map(Name::from).collect();
        self.mark(Term::with_hints(n, Some(hints)), span)
    }

    pub fn term(&mut self, t: &STerm) -> Result<Term, Diagnostic> {
        let sp = &t.span;
        Ok(match &t.kind {
            SKind::Ident(x) => self.ident(x, sp)?,
            SKind::Univ => self.node(Node::Univ, sp),
            SKind::Zero => self.node(Node::ZeroT, sp),
            SKind::One => self.node(Node::OneT, sp),
            SKind::Two => self.node(Node::TwoT, sp),
            SKind::Bit0 => self.node(Node::Bit0, sp),
            SKind::Bit1 => self.node(Node::Bit1, sp),
            SKind::Unit => self.node(Node::Star, sp),
            SKind::Pi(bs, body) => self.telescope(bs, body, sp, Node::Pi)?,
            SKind::Sig(bs, body) => self.telescope(bs, body, sp, Node::Sigma)?,
            SKind::Lam(bs, body) => self.telescope(bs, body, sp, Node::Lam)?,
            SKind::W(b, body) => self.telescope(std::slice::from_ref(&**b), body, sp, Node::WT)?,
            SKind::Arrow(a, b) | SKind::Prod(a, b) => {
                let a = self.term(a)?;
                let b = shift_up(&self.term(b)?, 0, 1);
                let n = if matches!(t.kind, SKind::Arrow(..)) {
                    Node::Pi(a, b)
                } else {
                    Node::Sigma(a, b)
                };
                self.hinted(n, vec!["_".into()], sp)
            }
            SKind::App(f, a) => {
                let f = self.term(f)?;
                let a = self.term(a)?;
                self.node(Node::App(f, a), sp)
            }
            SKind::Tuple(items) => {
                let mut it = items.iter().rev();
                let mut acc = self.term(it.next().expect("tuple"))?;
                for x in it {
                    let x = self.term(x)?;
                    acc = self.node(Node::Pair(x, acc), sp);
                }
                acc
            }
            SKind::Let(name, _, val, body) => {
                let v = self.term(val)?;
                self.scope.push((name.clone(), Entry::Let(v, self.depth)));
                let r = self.term(body);
                self.scope.pop();
                r?
            }
            SKind::Prim(p, args) => self.prim(*p, args, sp)?,
        })
    }

    fn ident(&mut self, x: &str, sp: &Span) -> Result<Term, Diagnostic> {
        for (name, entry) in self.scope.iter().rev() {
            if name == x {
                let t = match entry {
                    Entry::Var(level) => Term::var(self.depth - 1 - level),
                    Entry::Let(v, at) => shift_up(v, 0, self.depth - at),
                };
                return Ok(self.mark(t, sp));
            }
        }
        if (self.globals)(x) {
            return Ok(self.node(Node::Const(x.into()), sp));
        }
        Err(Diagnostic::new(ErrorCode::Unbound, format!("unbound identifier `{x}`")).at(sp.clone()))
    }

    fn telescope(
        &mut self,
        bs: &[Binder],
        body: &STerm,
        sp: &Span,
        mk: fn(Term, Term) -> Node,
    ) -> Result<Term, Diagnostic> {
        let mut doms = Vec::new();
        let mut names = Vec::new();
        for b in bs {
            for (n, _) in &b.names {
                let ty = match self.term(&b.ty) {
                    Ok(t) => t,
                    Err(e) => {
                        self.unwind(doms.len());
                        return Err(e);
                    }
                };
                doms.push(ty);
                names.push(n.clone());
                self.push_var(n);
            }
        }
        let body = self.term(body);
        self.unwind(doms.len());
        let mut acc = body?;
        for (dom, name) in doms.into_iter().zip(names).rev() {
            acc = self.hinted(mk(dom, acc), vec![name], sp);
        }
        Ok(acc)
    }

    fn unwind(&mut self, n: usize) {
        for _ in 0..n {
            self.pop_var();
        }
    }

    fn scoped(&mut self, names: &[(String, Span)], body: &STerm) -> Result<Term, Diagnostic> {
        for (n, _) in names {
            self.push_var(n);
        }
        let r = self.term(body);
        self.unwind(names.len());
        r
    }

    fn prim(&mut self, p: Prim, args: &[Arg], sp: &Span) -> Result<Term, Diagnostic> {
        let mut ts = Vec::new();
        let mut hints = Vec::new();
        for a in args {
            match a {
                Arg::Term(t) => ts.push(self.term(t)?),
                Arg::Scope(names, body) => {
                    hints.extend(names.iter().map(|n| n.0.clone()));
                    ts.push(self.scoped(names, body)?);
                }
            }
        }
        let mut it = ts.into_iter();
        let mut n = || it.next().expect("arity checked by parser");
        let node = match p {
            Prim::Refl => Node::Refl(n()),
            Prim::Id => Node::IdT(n(), n(), n()),
            Prim::IdRec => Node::IdRec(n(), n(), n(), n(), n()),
            Prim::Fst => Node::Proj1(n()),
            Prim::Snd => Node::Proj2(n()),
            Prim::Split => Node::SigRec(n(), n(), n()),
            Prim::ZeroElim => Node::ZeroRec(n(), n()),
            Prim::OneElim => Node::OneRec(n(), n(), n()),
            Prim::OneComp => Node::OneComp(n(), n()),
            Prim::TwoRec => Node::TwoRec(n(), n(), n(), n()),
            Prim::TwoComp0 => Node::TwoComp0(n(), n(), n()),
            Prim::TwoComp1 => Node::TwoComp1(n(), n(), n()),
            Prim::Sup => Node::Sup(n(), n()),
            Prim::WRec => Node::WRec(n(), n(), n()),
            Prim::WComp => Node::WComp(n(), n(), n(), n()),
            Prim::FunExt => Node::AxFunExt(n(), n()),
            Prim::EtaPi => Node::AxEtaPi(n(), n()),
        };
        Ok(if hints.is_empty() {
            self.node(node, sp)
        } else {
            self.hinted(node, hints, sp)
        })
    }

    /// Wrap `body` in the declaration's parameters.
    fn decl(&mut self, d: &SDecl) -> Result<(Option<Term>, Option<Term>), Diagnostic> {
        let mut doms = Vec::new();
        let mut names = Vec::new();
        for b in &d.binders {
            for (n, _) in &b.names {
                let ty = match self.term(&b.ty) {
                    Ok(t) => t,
                    Err(e) => {
                        self.unwind(doms.len());
                        return Err(e);
                    }
                };
                doms.push(ty);
                names.push(n.clone());
                self.push_var(n);
            }
        }
        let ty = d.ty.as_ref().map(|t| self.term(t)).transpose();
        let body = d.body.as_ref().map(|t| self.term(t)).transpose();
        self.unwind(doms.len());
        let (mut ty, mut body) = (ty?, body?);
        if !doms.is_empty() && ty.is_none() && d.body.is_none() {
            return Err(Diagnostic::new(ErrorCode::Syntax, "an axiom needs a type").at(d.span.clone()));
        }
        for (dom, name) in doms.into_iter().zip(names).rev() {
            ty = ty.map(|t| self.hinted(Node::Pi(dom.clone(), t), vec![name.clone()], &d.span));
            body = body.map(|b| self.hinted(Node::Lam(dom.clone(), b), vec![name.clone()], &d.span));
        }
        Ok((ty, body))
    }
}

/// Resolve every declaration of a module.
///
/// `known` reports names already in the environment.
pub fn elaborate(m: &SourceModule, known: &dyn Fn(&str) -> bool) -> Result<Vec<DeclCandidate>, Diagnostic> {
    let mut local: HashSet<String> = HashSet::new();
    let mut out = Vec::new();
    for d in &m.decls {
        if known(&d.name) || local.contains(&d.name) {
            return Err(
                Diagnostic::new(ErrorCode::Duplicate, format!("`{}` is already defined", d.name))
                    .at(d.name_span.clone()),
            );
        }
        let (ty, body, spans) = {
            let globals = |x: &str| known(x) || local.contains(x);
            let mut el = Elaborator::new(&globals);
            let (ty, body) = el.decl(d)?;
            (ty, body, el.take_spans())
        };
        out.push(DeclCandidate {
            name: d.name.as_str().into(),
            ty,
            body,
            span: d.span.clone(),
            spans,
        });
        local.insert(d.name.clone());
    }
    Ok(out)
}

/// Elaborate a standalone term with the given locals in scope.
pub fn elaborate_term(t: &STerm, locals: &[Name], known: &dyn Fn(&str) -> bool) -> Result<Term, Diagnostic> {
    Elaborator::new(known).with_locals(locals).term(t)
}
