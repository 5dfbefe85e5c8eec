//! Bidirectional type checking for every rule of the theory.

use std::collections::HashMap;

use crate::diag::{Diagnostic, ErrorCode, Span};
use crate::env::Env;
use crate::reduce::{Fuel, Machine, Mode, ReduceError, DEFAULT_FUEL};
use crate::surface::pretty::pretty;
use crate::term::{inst1, instantiate, shift_up, unshift, Context, Name, Node, Term};

/// The checked environment: declarations plus the mode they were checked in.
pub type CheckedEnv = Env;

/// Source spans of elaborated subterms, keyed by node address.
///
/// The map keeps each term alive so addresses stay unique.
pub type SpanMap = HashMap<usize, (Term, Span)>;

/// A declaration produced by elaboration and not yet checked.
#[derive(Clone, Debug)]
pub struct DeclCandidate {
    pub name: Name,
    pub ty: Option<Term>,
    /// `None` for axioms.
    pub body: Option<Term>,
    pub span: Span,
    pub spans: SpanMap,
}

type Res<T> = Result<T, Diagnostic>;

const SHOW_LIMIT: usize = 600;

pub struct Checker<'a> {
    env: &'a Env,
    mode: Mode,
    fuel: u64,
    ctx: Context,
    spans: Option<&'a SpanMap>,
    focus: Vec<Term>,
}

impl<'a> Checker<'a> {
    pub fn new(env: &'a Env) -> Checker<'a> {
        Checker {
            env,
            mode: env.mode(),
            fuel: DEFAULT_FUEL,
            ctx: Context::new(),
            spans: None,
            focus: Vec::new(),
        }
    }

    pub fn with_fuel(mut self, fuel: u64) -> Self {
        self.fuel = fuel;
        self
    }

    pub fn with_spans(mut self, spans: &'a SpanMap) -> Self {
        self.spans = Some(spans);
        self
    }

    pub fn infer(&mut self, ctx: &Context, t: &Term) -> Res<Term> {
        self.ctx = ctx.clone();
        self.focus.clear();
        self.infer_in(t)
    }

    pub fn check(&mut self, ctx: &Context, t: &Term, ty: &Term) -> Res<()> {
        self.ctx = ctx.clone();
        self.focus.clear();
        self.check_in(t, ty)
    }

    /// `t` is a type, possibly large.
    pub fn check_type(&mut self, ctx: &Context, t: &Term) -> Res<()> {
        self.ctx = ctx.clone();
        self.focus.clear();
        self.check_type_in(t)
    }

    /// Check a closed declaration; returns its type.
    pub fn check_decl(&mut self, ty: Option<&Term>, body: Option<&Term>) -> Res<Term> {
        self.ctx = Context::new();
        self.focus.clear();
        match (ty, body) {
            (Some(ty), Some(body)) => {
                self.check_type_in(ty)?;
                self.check_in(body, ty)?;
                Ok(ty.clone())
            }
            (Some(ty), None) => {
                self.check_type_in(ty)?;
                Ok(ty.clone())
            }
            (None, Some(body)) => self.infer_in(body),
            (None, None) => Err(Diagnostic::new(ErrorCode::Internal, "declaration without type or body")),
        }
    }

    fn show(&self, t: &Term) -> String {
        let mut s = pretty(t, &self.ctx.names());
        if s.len() > SHOW_LIMIT {
            let mut cut = SHOW_LIMIT;
            while !s.is_char_boundary(cut) {
                cut -= 1;
            }
            s.truncate(cut);
            s.push_str(" ...");
        }
        s
    }

    fn error(&self, code: ErrorCode, msg: impl Into<String>) -> Diagnostic {
        let mut d = Diagnostic::new(code, msg);
        if let Some(map) = self.spans {
            if let Some((_, span)) = self.focus.iter().rev().find_map(|t| map.get(&t.addr())) {
                d.span = Some(span.clone());
            }
        }
        d
    }

    fn reduce_error(&self, e: ReduceError) -> Diagnostic {
        match e {
            ReduceError::FuelExhausted { stuck } => {
                let shown = self.show(&stuck);
                self.error(ErrorCode::FuelExhausted, "reduction budget exceeded")
                    .note(format!("stuck at: {shown}"))
            }
        }
    }

    fn whnf(&mut self, t: &Term) -> Res<Term> {
        let mut fuel = Fuel::new(self.fuel);
        let mut m = Machine::new(self.env, self.mode, &mut fuel);
        m.whnf(&mut self.ctx, t).map_err(|e| self.reduce_error(e))
    }

    fn conv(&mut self, a: &Term, b: &Term) -> Res<bool> {
        let mut fuel = Fuel::new(self.fuel);
        let mut m = Machine::new(self.env, self.mode, &mut fuel);
        m.conv(&mut self.ctx, a, b).map_err(|e| self.reduce_error(e))
    }

    fn mismatch(&self, what: &str, expected: &Term, actual: &Term) -> Diagnostic {
        self.error(ErrorCode::Mismatch, what.to_string())
            .expected_actual(self.show(expected), self.show(actual))
    }

    fn require_conv(&mut self, what: &str, expected: &Term, actual: &Term) -> Res<()> {
        if self.conv(expected, actual)? {
            Ok(())
        } else {
            Err(self.mismatch(what, expected, actual))
        }
    }

    fn expect_pi(&mut self, ty: &Term) -> Res<(Term, Term)> {
        match self.whnf(ty)?.node() {
            Node::Pi(a, b) => Ok((a.clone(), b.clone())),
            _ => Err(self
                .error(ErrorCode::ExpectedPi, "expected a function type")
                .note(format!("found: {}", self.show(ty)))),
        }
    }

    fn expect_sigma(&mut self, ty: &Term) -> Res<(Term, Term)> {
        match self.whnf(ty)?.node() {
            Node::Sigma(a, b) => Ok((a.clone(), b.clone())),
            _ => Err(self
                .error(ErrorCode::ExpectedSigma, "expected a pair type")
                .note(format!("found: {}", self.show(ty)))),
        }
    }

    fn expect_w(&mut self, ty: &Term) -> Res<(Term, Term)> {
        match self.whnf(ty)?.node() {
            Node::WT(a, b) => Ok((a.clone(), b.clone())),
            _ => Err(self
                .error(ErrorCode::ExpectedW, "expected a W-type")
                .note(format!("found: {}", self.show(ty)))),
        }
    }

    fn under<T>(&mut self, names: &[Name], tys: &[Term], f: impl FnOnce(&mut Self) -> Res<T>) -> Res<T> {
        let len = self.ctx.len();
        for (i, ty) in tys.iter().enumerate() {
            let n = names.get(i).cloned().unwrap_or_else(|| Name::from("_"));
            self.ctx.push(n, ty.clone());
        }
        let r = f(self);
        self.ctx.truncate(len);
        r
    }

    fn under1<T>(&mut self, name: &[Name], ty: &Term, f: impl FnOnce(&mut Self) -> Res<T>) -> Res<T> {
        self.under(name, std::slice::from_ref(ty), f)
    }

    fn check_small(&mut self, t: &Term) -> Res<()> {
        self.check_in(t, &Term::univ())
    }

    pub(crate) fn check_type_in(&mut self, t: &Term) -> Res<()> {
        self.focus.push(t.clone());
        match t.node() {
            Node::Univ => {}
            Node::Pi(a, b) | Node::Sigma(a, b) => {
                self.check_type_in(a)?;
                self.under1(hints(t, 0, 1), a, |s| s.check_type_in(b))?;
            }
            Node::IdT(a, x, y) => {
                self.check_type_in(a)?;
                self.check_in(x, a)?;
                self.check_in(y, a)?;
            }
            _ => {
                let ty = self.infer_in(t)?;
                if !matches!(self.whnf(&ty)?.node(), Node::Univ) {
                    return Err(self
                        .error(ErrorCode::Mismatch, "expected a type")
                        .expected_actual("U".into(), self.show(&ty)));
                }
            }
        }
        self.focus.pop();
        Ok(())
    }

    /// Motive under one binder of type `dom`.
    fn check_motive(&mut self, names: &[Name], dom: &Term, m: &Term) -> Res<()> {
        self.under1(names, dom, |s| s.check_type_in(m))
    }

    pub(crate) fn check_in(&mut self, t: &Term, ty: &Term) -> Res<()> {
        self.focus.push(t.clone());
        match t.node() {
            Node::Lam(d, body) => {
                let (a, b) = self.expect_pi(ty)?;
                self.check_type_in(d)?;
                self.require_conv("abstraction domain does not match", &a, d)?;
                self.under1(hints(t, 0, 1), d, |s| s.check_in(body, &b))?;
            }
            Node::Pair(x, y) => {
                let (a, b) = self.expect_sigma(ty)?;
                self.check_in(x, &a)?;
                self.check_in(y, &inst1(&b, x))?;
            }
            Node::Refl(x) => match self.whnf(ty)?.node() {
                Node::IdT(a, l, r) => {
                    let (a, l, r) = (a.clone(), l.clone(), r.clone());
                    self.check_in(x, &a)?;
                    if !self.conv(x, &l)? || !self.conv(x, &r)? {
                        let got = Term::id(a, x.clone(), x.clone());
                        return Err(self.mismatch("reflexivity does not prove this equation", ty, &got));
                    }
                }
                _ => {
                    return Err(self
                        .error(ErrorCode::ExpectedId, "reflexivity checked against a non-identity type")
                        .note(format!("found: {}", self.show(ty))))
                }
            },
            Node::Sup(a, u) if matches!(self.whnf(ty)?.node(), Node::WT(..)) => {
                let w = self.whnf(ty)?;
                let (la, lb) = match w.node() {
                    Node::WT(la, lb) => (la.clone(), lb.clone()),
                    _ => unreachable!(),
                };
                self.check_in(a, &la)?;
                let sub = Term::pi(inst1(&lb, a), shift_up(&w, 0, 1));
                self.check_in(u, &sub)?;
            }
            _ => {
                let got = self.infer_in(t)?;
                if !self.conv(ty, &got)? {
                    return Err(self.mismatch("type mismatch", ty, &got));
                }
            }
        }
        self.focus.pop();
        Ok(())
    }

    pub(crate) fn infer_in(&mut self, t: &Term) -> Res<Term> {
        self.focus.push(t.clone());
        let r = self.infer_node(t)?;
        self.focus.pop();
        Ok(r)
    }

    fn infer_node(&mut self, t: &Term) -> Res<Term> {
        use Node::*;
        let univ = Term::univ;
        Ok(match t.node() {
            Var(i) => match self.ctx.lookup(*i) {
                Some(ty) => ty,
                None => return Err(self.error(ErrorCode::Internal, format!("variable #{i} out of scope"))),
            },
            Const(c) => match self.env.get(c) {
                Some(d) => d.ty.clone(),
                None => return Err(self.error(ErrorCode::Unbound, format!("unknown constant `{c}`"))),
            },
            Univ => return Err(self.error(ErrorCode::Universe, "U is not an element of any type")),
            Pi(a, b) | Sigma(a, b) => {
                self.check_small(a)?;
                self.under1(hints(t, 0, 1), a, |s| s.check_small(b))?;
                univ()
            }
            Lam(d, body) => {
                self.check_type_in(d)?;
                let bt = self.under1(hints(t, 0, 1), d, |s| s.infer_in(body))?;
                Term::pi(d.clone(), bt)
            }
            App(f, x) => {
                let ft = self.infer_in(f)?;
                let (a, b) = self.expect_pi(&ft)?;
                self.check_in(x, &a)?;
                inst1(&b, x)
            }
            Pair(x, y) => {
                let a = self.infer_in(x)?;
                let b = self.infer_in(y)?;
                Term::sigma(a, shift_up(&b, 0, 1))
            }
            Proj1(p) => {
                let pt = self.infer_in(p)?;
                self.expect_sigma(&pt)?.0
            }
            Proj2(p) => {
                let pt = self.infer_in(p)?;
                let (_, b) = self.expect_sigma(&pt)?;
                inst1(&b, &Term::proj1(p.clone()))
            }
            SigRec(m, d, p) => {
                let pt = self.infer_in(p)?;
                let (a, b) = self.expect_sigma(&pt)?;
                self.check_motive(hints(t, 0, 1), &Term::sigma(a.clone(), b.clone()), m)?;
                let goal = instantiate(&shift_up(m, 1, 2), &[Term::pair(Term::var(1), Term::var(0))]);
                self.under(hints(t, 1, 2), &[a, b], |s| s.check_in(d, &goal))?;
                inst1(m, p)
            }
            IdT(a, x, y) => {
                self.check_small(a)?;
                self.check_in(x, a)?;
                self.check_in(y, a)?;
                univ()
            }
            Refl(x) => {
                let a = self.infer_in(x)?;
                Term::id(a, x.clone(), x.clone())
            }
            IdRec(m, c, a, b, p) => {
                let ty = self.infer_in(a)?;
                self.check_in(b, &ty)?;
                self.check_in(p, &Term::id(ty.clone(), a.clone(), b.clone()))?;
                let tele = [
                    ty.clone(),
                    shift_up(&ty, 0, 1),
                    Term::id(shift_up(&ty, 0, 2), Term::var(1), Term::var(0)),
                ];
                self.under(hints(t, 0, 3), &tele, |s| s.check_type_in(m))?;
                let base = instantiate(
                    &shift_up(m, 3, 1),
                    &[Term::var(0), Term::var(0), Term::refl(Term::var(0))],
                );
                self.under1(hints(t, 3, 1), &ty, |s| s.check_in(c, &base))?;
                instantiate(m, &[a.clone(), b.clone(), p.clone()])
            }
            ZeroT | OneT | TwoT => univ(),
            Star => Term::one_t(),
            Bit0 | Bit1 => Term::two_t(),
            ZeroRec(m, e) => {
                self.check_in(e, &Term::zero_t())?;
                self.check_motive(hints(t, 0, 1), &Term::zero_t(), m)?;
                inst1(m, e)
            }
            OneRec(m, c, s) => {
                self.check_motive(hints(t, 0, 1), &Term::one_t(), m)?;
                self.check_in(c, &inst1(m, &Term::star()))?;
                self.check_in(s, &Term::one_t())?;
                inst1(m, s)
            }
            OneComp(m, c) => {
                self.check_motive(hints(t, 0, 1), &Term::one_t(), m)?;
                let at = inst1(m, &Term::star());
                self.check_in(c, &at)?;
                let lhs = Term::new(OneRec(m.clone(), c.clone(), Term::star()));
                Term::id(at, lhs, c.clone())
            }
            TwoRec(m, c0, c1, s) => {
                self.check_two_methods(hints(t, 0, 1), m, c0, c1)?;
                self.check_in(s, &Term::two_t())?;
                inst1(m, s)
            }
            TwoComp0(m, c0, c1) | TwoComp1(m, c0, c1) => {
                self.check_two_methods(hints(t, 0, 1), m, c0, c1)?;
                let (bit, c) = match t.node() {
                    TwoComp0(..) => (Term::bit0(), c0),
                    _ => (Term::bit1(), c1),
                };
                let lhs = Term::new(TwoRec(m.clone(), c0.clone(), c1.clone(), bit.clone()));
                Term::id(inst1(m, &bit), lhs, c.clone())
            }
            WT(a, b) => {
                self.check_small(a)?;
                self.under1(hints(t, 0, 1), a, |s| s.check_small(b))?;
                univ()
            }
            Sup(a, u) => {
                let (w, _) = self.sup_parts(a, u)?;
                w
            }
            WRec(m, c, w) => {
                let wt = self.infer_in(w)?;
                let (la, lb) = self.expect_w(&wt)?;
                let wty = Term::w(la.clone(), lb.clone());
                self.check_step(hints(t, 0, 4), &wty, &la, &lb, m, c)?;
                inst1(m, w)
            }
            WComp(m, c, a, u) => {
                let (wty, (la, lb)) = self.sup_parts(a, u)?;
                self.check_step(hints(t, 0, 4), &wty, &la, &lb, m, c)?;
                let node = Term::sup(a.clone(), u.clone());
                let lhs = Term::new(WRec(m.clone(), c.clone(), node.clone()));
                let rec = Term::new(WRec(
                    shift_up(m, 1, 1),
                    shift_up(c, 3, 1),
                    Term::app(shift_up(u, 0, 1), Term::var(0)),
                ));
                let v = Term::lam(inst1(&lb, a), rec);
                let rhs = instantiate(c, &[a.clone(), u.clone(), v]);
                Term::id(inst1(m, &node), lhs, rhs)
            }
            AxFunExt(a, b) => {
                self.check_type_in(a)?;
                self.check_type_in(b)?;
                funext_type(a, b)
            }
            AxEtaPi(a, b) => {
                self.check_type_in(a)?;
                self.under1(hints(t, 0, 1), a, |s| s.check_type_in(b))?;
                eta_pi_type(a, b)
            }
        })
    }

    fn check_two_methods(&mut self, names: &[Name], m: &Term, c0: &Term, c1: &Term) -> Res<()> {
        self.check_motive(names, &Term::two_t(), m)?;
        self.check_in(c0, &inst1(m, &Term::bit0()))?;
        self.check_in(c1, &inst1(m, &Term::bit1()))
    }

    /// Check the pieces of `sup a u`; returns the W-type and its parts.
    fn sup_parts(&mut self, a: &Term, u: &Term) -> Res<(Term, (Term, Term))> {
        let ut = self.infer_in(u)?;
        let (dom, cod) = self.expect_pi(&ut)?;
        let cod = self.under1(&[], &dom, |s| s.whnf(&cod))?;
        let w = match unshift(&cod, 1) {
            Some(w) => w,
            None => {
                return Err(self
                    .error(ErrorCode::ExpectedW, "subtrees must land in a fixed W-type")
                    .note(format!("found: {}", self.show(&ut))))
            }
        };
        let (la, lb) = self.expect_w(&w)?;
        self.check_in(a, &la)?;
        let want = inst1(&lb, a);
        self.require_conv("subtree domain does not match the arity of the label", &want, &dom)?;
        Ok((Term::w(la.clone(), lb.clone()), (la, lb)))
    }

    /// Motive under `w : W` and step under `x : A, u : B x -> W, v : Π y, C (u y)`.
    fn check_step(&mut self, names: &[Name], wty: &Term, la: &Term, lb: &Term, m: &Term, c: &Term) -> Res<()> {
        self.check_motive(names.get(..1).unwrap_or(&[]), wty, m)?;
        let u_ty = Term::pi(lb.clone(), shift_up(wty, 0, 2));
        let v_ty = Term::pi(
            shift_up(lb, 0, 1),
            inst1(&shift_up(m, 1, 3), &Term::app(Term::var(1), Term::var(0))),
        );
        let goal = inst1(&shift_up(m, 1, 3), &Term::sup(Term::var(2), Term::var(1)));
        self.under(names.get(1..).unwrap_or(&[]), &[la.clone(), u_ty, v_ty], |s| {
            s.check_in(c, &goal)
        })
    }
}

/// Binder names `start..start + n` recorded on `t`, if any.
fn hints(t: &Term, start: usize, n: usize) -> &[Name] {
    t.hints().and_then(|h| h.get(start..start + n)).unwrap_or(&[])
}

/// `Π (f g : A -> B), (Π x, Id B (f x) (g x)) -> Id (A -> B) f g`.
pub fn funext_type(a: &Term, b: &Term) -> Term {
    let fun = Term::arrow(a.clone(), b.clone());
    let pointwise = Term::pi(
        shift_up(a, 0, 2),
        Term::id(
            shift_up(b, 0, 3),
            Term::app(Term::var(2), Term::var(0)),
            Term::app(Term::var(1), Term::var(0)),
        ),
    );
    let concl = Term::id(shift_up(&fun, 0, 3), Term::var(2), Term::var(1));
    Term::pi(fun.clone(), Term::pi(shift_up(&fun, 0, 1), Term::pi(pointwise, concl)))
}

/// `Π (f : Π x, B x), Id (Π x, B x) f (fun x => f x)`.
pub fn eta_pi_type(a: &Term, b: &Term) -> Term {
    let p = Term::pi(a.clone(), b.clone());
    let expanded = Term::lam(shift_up(a, 0, 1), Term::app(Term::var(1), Term::var(0)));
    Term::pi(p.clone(), Term::id(shift_up(&p, 0, 1), Term::var(0), expanded))
}

/// Check candidates in order and add them to `env`.
pub fn check_module(env: &mut Env, decls: &[DeclCandidate], fuel: u64) -> Result<(), Diagnostic> {
    for d in decls {
        check_declaration(env, d, fuel)?;
    }
    Ok(())
}

pub fn check_declaration(env: &mut Env, d: &DeclCandidate, fuel: u64) -> Result<(), Diagnostic> {
    if env.contains(&d.name) {
        return Err(
            Diagnostic::new(ErrorCode::Duplicate, format!("`{}` is already defined", d.name)).at(d.span.clone()),
        );
    }
    let (ty, body) = match env.mode() {
        Mode::Strict => (
            d.ty.as_ref().map(strict_witnesses),
            d.body.as_ref().map(strict_witnesses),
        ),
        Mode::Propositional => (d.ty.clone(), d.body.clone()),
    };
    let ty = {
        let mut ch = Checker::new(env).with_fuel(fuel).with_spans(&d.spans);
        ch.check_decl(ty.as_ref(), body.as_ref())
            .map_err(|e| e.or_at(&d.span).note(format!("in declaration `{}`", d.name)))?
    };
    env.insert_unchecked(d.name.clone(), ty, body);
    Ok(())
}

/// Replace propositional computation witnesses by reflexivity proofs.
pub fn strict_witnesses(t: &Term) -> Term {
    use Node::*;
    let replaced = match t.node() {
        TwoComp0(_, c0, _) => Some(Term::refl(strict_witnesses(c0))),
        TwoComp1(_, _, c1) => Some(Term::refl(strict_witnesses(c1))),
        OneComp(_, c) => Some(Term::refl(strict_witnesses(c))),
        WComp(m, c, a, u) => Some(Term::refl(Term::new(WRec(
            strict_witnesses(m),
            strict_witnesses(c),
            Term::sup(strict_witnesses(a), strict_witnesses(u)),
        )))),
        _ => None,
    };
    if let Some(r) = replaced {
        return r;
    }
    let ch = t.node().children();
    if ch.is_empty() {
        return t.clone();
    }
    let new: Vec<Term> = ch.iter().map(|c| strict_witnesses(c)).collect();
    if new.iter().zip(&ch).all(|(a, b)| a.ptr_eq(b)) {
        t.clone()
    } else {
        t.rebuild(new)
    }
}

/// A strict-mode copy of `env` with every witness constant replaced.
pub fn provide_strict_witnesses(env: &Env) -> Env {
    let mut out = Env::new(Mode::Strict);
    for d in env.iter() {
        out.insert_unchecked(
            d.name.clone(),
            strict_witnesses(&d.ty),
            d.body.as_ref().map(strict_witnesses),
        );
    }
    out
}
