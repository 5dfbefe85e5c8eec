//! Weak-head normalization and conversion, parameterized by mode.

use std::fmt;

use thiserror::Error;

use crate::env::Env;
use crate::term::{inst1, instantiate, shift_up, unshift, Context, Node, Term};

/// Which computation rules hold definitionally.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    /// 2rec, 1-elim and wrec compute on canonical forms.
    Strict,
    /// Those computations are only witnessed by identity proofs.
    Propositional,
}

impl Mode {
    pub fn parse(s: &str) -> Option<Mode> {
        match s {
            "strict" => Some(Mode::Strict),
            "prop" | "propositional" => Some(Mode::Propositional),
            _ => None,
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Strict => "strict",
            Mode::Propositional => "propositional",
        })
    }
}

pub const DEFAULT_FUEL: u64 = 1_000_000;

/// Head-step budget.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Fuel {
    pub remaining: u64,
}

impl Fuel {
    pub fn new(steps: u64) -> Fuel {
        Fuel { remaining: steps }
    }
}

impl Default for Fuel {
    fn default() -> Fuel {
        Fuel::new(DEFAULT_FUEL)
    }
}

#[derive(Debug, Error, Clone)]
pub enum ReduceError {
    #[error("reduction budget exceeded")]
    FuelExhausted { stuck: Term },
}

/// Reduce `t` until its head is not a redex.
pub fn whnf(env: &Env, mode: Mode, ctx: &Context, t: &Term, fuel: &mut Fuel) -> Result<Term, ReduceError> {
    let mut ctx = ctx.clone();
    Machine::new(env, mode, fuel).whnf(&mut ctx, t)
}

/// Definitional equality without η.
pub fn conv(env: &Env, mode: Mode, ctx: &Context, t: &Term, u: &Term, fuel: &mut Fuel) -> Result<bool, ReduceError> {
    let mut ctx = ctx.clone();
    Machine::new(env, mode, fuel).conv(&mut ctx, t, u)
}

/// Full normal form. Debug utility; may not terminate within fuel on large terms.
pub fn normalize(env: &Env, mode: Mode, ctx: &Context, t: &Term, fuel: &mut Fuel) -> Result<Term, ReduceError> {
    let mut ctx = ctx.clone();
    Machine::new(env, mode, fuel).normalize(&mut ctx, t)
}

pub(crate) struct Machine<'a> {
    env: &'a Env,
    mode: Mode,
    fuel: &'a mut Fuel,
}

type R<T> = Result<T, ReduceError>;

impl<'a> Machine<'a> {
    pub(crate) fn new(env: &'a Env, mode: Mode, fuel: &'a mut Fuel) -> Machine<'a> {
        Machine { env, mode, fuel }
    }

    fn tick(&mut self, t: &Term) -> R<()> {
        if self.fuel.remaining == 0 {
            return Err(ReduceError::FuelExhausted { stuck: t.clone() });
        }
        self.fuel.remaining -= 1;
        Ok(())
    }

    fn strict(&self) -> bool {
        self.mode == Mode::Strict
    }

    /// One head step without unfolding the head constant, if any applies.
    fn step(&mut self, ctx: &mut Context, t: &Term) -> R<Option<Term>> {
        use Node::*;
        Ok(match t.node() {
            App(f, a) => {
                let f2 = self.whnf_core(ctx, f)?;
                match f2.node() {
                    Lam(_, body) => Some(inst1(body, a)),
                    _ if f2.ptr_eq(f) => None,
                    _ => Some(Term::app(f2, a.clone())),
                }
            }
            Proj1(p) => {
                let p2 = self.whnf(ctx, p)?;
                match p2.node() {
                    Pair(a, _) => Some(a.clone()),
                    _ => return Ok(rebuilt(t, &p2, Term::proj1)),
                }
            }
            Proj2(p) => {
                let p2 = self.whnf(ctx, p)?;
                match p2.node() {
                    Pair(_, b) => Some(b.clone()),
                    _ => return Ok(rebuilt(t, &p2, Term::proj2)),
                }
            }
            SigRec(m, d, p) => {
                let p2 = self.whnf(ctx, p)?;
                match p2.node() {
                    Pair(a, b) => Some(instantiate(d, &[a.clone(), b.clone()])),
                    _ => return Ok(rebuilt(t, &p2, |p| t.rebuild(vec![m.clone(), d.clone(), p]))),
                }
            }
            IdRec(m, c, a, b, p) => {
                let p2 = self.whnf(ctx, p)?;
                match p2.node() {
                    Refl(_) => Some(inst1(c, a)),
                    _ => {
                        return Ok(rebuilt(t, &p2, |p| {
                            t.rebuild(vec![m.clone(), c.clone(), a.clone(), b.clone(), p])
                        }))
                    }
                }
            }
            TwoRec(m, c0, c1, s) if self.strict() => {
                let s2 = self.whnf(ctx, s)?;
                match s2.node() {
                    Bit0 => Some(c0.clone()),
                    Bit1 => Some(c1.clone()),
                    _ => {
                        return Ok(rebuilt(t, &s2, |s| {
                            t.rebuild(vec![m.clone(), c0.clone(), c1.clone(), s])
                        }))
                    }
                }
            }
            OneRec(m, c, s) if self.strict() => {
                let s2 = self.whnf(ctx, s)?;
                match s2.node() {
                    Star => Some(c.clone()),
                    _ => return Ok(rebuilt(t, &s2, |s| t.rebuild(vec![m.clone(), c.clone(), s]))),
                }
            }
            WRec(m, c, w) if self.strict() => {
                let w2 = self.whnf(ctx, w)?;
                match w2.node() {
                    Sup(a, u) => Some(self.wrec_reduct(ctx, m, c, a, u)?),
                    _ => return Ok(rebuilt(t, &w2, |w| t.rebuild(vec![m.clone(), c.clone(), w]))),
                }
            }
            TwoComp0(_, c0, _) if self.strict() => Some(Term::refl(c0.clone())),
            TwoComp1(_, _, c1) if self.strict() => Some(Term::refl(c1.clone())),
            OneComp(_, c) if self.strict() => Some(Term::refl(c.clone())),
            WComp(m, c, a, u) if self.strict() => Some(Term::refl(Term::new(WRec(
                m.clone(),
                c.clone(),
                Term::sup(a.clone(), u.clone()),
            )))),
            _ => None,
        })
    }

    /// `c[a, u, fun (y : D) => wrec m c (u y)]`.
    pub(crate) fn wrec_reduct(&mut self, ctx: &mut Context, m: &Term, c: &Term, a: &Term, u: &Term) -> R<Term> {
        let dom = self.subtree_domain(ctx, u)?;
        let rec = Term::new(Node::WRec(
            shift_up(m, 1, 1),
            shift_up(c, 3, 1),
            Term::app(shift_up(u, 0, 1), Term::var(0)),
        ));
        let v = Term::lam(dom, rec);
        Ok(instantiate(c, &[a.clone(), u.clone(), v]))
    }

    /// Domain annotation for the recursive-call abstraction.
    fn subtree_domain(&mut self, ctx: &mut Context, u: &Term) -> R<Term> {
        if let Node::Lam(d, _) = u.node() {
            return Ok(d.clone());
        }
        if let Some(ty) = self.synth(ctx, u)? {
            if let Node::Pi(d, _) = self.whnf(ctx, &ty)?.node() {
                return Ok(d.clone());
            }
        }
        // Only reachable under binders whose types are not tracked, where
        // conversion ignores abstraction annotations anyway.
        Ok(Term::univ())
    }

    /// Type of a well-typed term, trusted; `None` if not synthesizable.
    pub(crate) fn synth(&mut self, ctx: &mut Context, t: &Term) -> R<Option<Term>> {
        use Node::*;
        Ok(match t.node() {
            Var(i) => ctx.lookup(*i),
            Const(c) => self.env.get(c).map(|d| d.ty.clone()),
            App(f, a) => match self.synth(ctx, f)? {
                Some(ft) => match self.whnf(ctx, &ft)?.node() {
                    Pi(_, cod) => Some(inst1(cod, a)),
                    _ => None,
                },
                None => None,
            },
            Lam(d, b) => {
                ctx.push("_", d.clone());
                let bt = self.synth(ctx, b);
                ctx.pop();
                bt?.map(|bt| Term::pi(d.clone(), bt))
            }
            Proj1(p) | Proj2(p) => match self.synth(ctx, p)? {
                Some(pt) => match self.whnf(ctx, &pt)?.node() {
                    Sigma(a, b) => Some(if matches!(t.node(), Proj1(_)) {
                        a.clone()
                    } else {
                        inst1(b, &Term::proj1(p.clone()))
                    }),
                    _ => None,
                },
                None => None,
            },
            SigRec(m, _, s) | ZeroRec(m, s) | OneRec(m, _, s) | TwoRec(m, _, _, s) | WRec(m, _, s) => Some(inst1(m, s)),
            IdRec(m, _, a, b, p) => Some(instantiate(m, &[a.clone(), b.clone(), p.clone()])),
            _ => None,
        })
    }

    /// Weak-head normal form without unfolding a head constant.
    pub(crate) fn whnf_core(&mut self, ctx: &mut Context, t: &Term) -> R<Term> {
        let mut t = t.clone();
        while let Some(next) = self.step(ctx, &t)? {
            self.tick(&t)?;
            if next.ptr_eq(&t) {
                break;
            }
            t = next;
        }
        Ok(t)
    }

    pub(crate) fn whnf(&mut self, ctx: &mut Context, t: &Term) -> R<Term> {
        let mut t = self.whnf_core(ctx, t)?;
        while let Some(u) = self.unfold(&t) {
            self.tick(&t)?;
            t = self.whnf_core(ctx, &u)?;
        }
        Ok(t)
    }

    /// Head constant with a body, and its height.
    fn head_def(&self, t: &Term) -> Option<(crate::term::Name, u32)> {
        let mut h = t;
        while let Node::App(f, _) = h.node() {
            h = f;
        }
        match h.node() {
            Node::Const(c) => {
                let d = self.env.get(c)?;
                d.body.as_ref()?;
                Some((c.clone(), d.height))
            }
            _ => None,
        }
    }

    /// Replace the head constant by its definition.
    fn unfold(&self, t: &Term) -> Option<Term> {
        match t.node() {
            Node::App(f, a) => Some(Term::app(self.unfold(f)?, a.clone())),
            Node::Const(c) => self.env.get(c)?.body.clone(),
            _ => None,
        }
    }

    pub(crate) fn conv(&mut self, ctx: &mut Context, a: &Term, b: &Term) -> R<bool> {
        if a == b {
            return Ok(true);
        }
        let mut a = self.whnf_core(ctx, a)?;
        let mut b = self.whnf_core(ctx, b)?;
        loop {
            if a == b {
                return Ok(true);
            }
            let (ua, ub) = match (self.head_def(&a), self.head_def(&b)) {
                (Some((na, ha)), Some((nb, hb))) => {
                    if na == nb && self.conv_spines(ctx, &a, &b)? {
                        return Ok(true);
                    }
                    (ha >= hb, hb >= ha)
                }
                (Some(_), None) => (true, false),
                (None, Some(_)) => (false, true),
                (None, None) => break,
            };
            if ua {
                self.tick(&a)?;
                let u = self.unfold(&a).expect("head definition");
                a = self.whnf_core(ctx, &u)?;
            }
            if ub {
                self.tick(&b)?;
                let u = self.unfold(&b).expect("head definition");
                b = self.whnf_core(ctx, &u)?;
            }
        }
        self.conv_struct(ctx, &a, &b)
    }

    fn conv_spines(&mut self, ctx: &mut Context, a: &Term, b: &Term) -> R<bool> {
        match (a.node(), b.node()) {
            (Node::App(f, x), Node::App(g, y)) => Ok(self.conv_spines(ctx, f, g)? && self.conv(ctx, x, y)?),
            (Node::Const(c), Node::Const(d)) => Ok(c == d),
            _ => Ok(false),
        }
    }

    /// Compare two weak-head normal forms constructor by constructor.
    fn conv_struct(&mut self, ctx: &mut Context, a: &Term, b: &Term) -> R<bool> {
        use Node::*;
        let (na, nb) = (a.node(), b.node());
        if std::mem::discriminant(na) != std::mem::discriminant(nb) {
            return Ok(false);
        }
        match (na, nb) {
            (Var(i), Var(j)) => return Ok(i == j),
            (Const(c), Const(d)) => return Ok(c == d),
            (Lam(d, x), Lam(_, y)) => {
                ctx.push("_", d.clone());
                let r = self.conv(ctx, x, y);
                ctx.pop();
                return r;
            }
            _ => {}
        }
        let typed_binder = matches!(na, Pi(..) | Sigma(..) | WT(..) | AxEtaPi(..));
        let ca = na.children();
        let cb = nb.children();
        for (k, ((x, y), nbind)) in ca.iter().zip(cb.iter()).zip(na.binders()).enumerate() {
            let len = ctx.len();
            for _ in 0..*nbind {
                if typed_binder && k == 1 {
                    ctx.push("_", ca[0].clone());
                } else {
                    ctx.push_opaque("_");
                }
            }
            let r = self.conv(ctx, x, y);
            ctx.truncate(len);
            if !r? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub(crate) fn normalize(&mut self, ctx: &mut Context, t: &Term) -> R<Term> {
        let t = self.whnf(ctx, t)?;
        let n = t.node();
        let typed_binder = matches!(
            n,
            Node::Pi(..) | Node::Lam(..) | Node::Sigma(..) | Node::WT(..) | Node::AxEtaPi(..)
        );
        let ch = n.children();
        let mut out = Vec::with_capacity(ch.len());
        for (k, (c, nbind)) in ch.iter().zip(n.binders()).enumerate() {
            let len = ctx.len();
            for _ in 0..*nbind {
                if typed_binder && k == 1 {
                    ctx.push("_", ch[0].clone());
                } else {
                    ctx.push_opaque("_");
                }
            }
            let r = self.normalize(ctx, c);
            ctx.truncate(len);
            out.push(r?);
        }
        Ok(if out.is_empty() { t } else { t.rebuild(out) })
    }
}

/// Keep `t` itself when the scrutinee did not change, so callers can detect
/// a stuck term by pointer identity.
fn rebuilt(t: &Term, new_scrut: &Term, build: impl FnOnce(Term) -> Term) -> Option<Term> {
    let old = t.node().children().last().copied().cloned();
    match old {
        Some(o) if o.ptr_eq(new_scrut) => None,
        _ => Some(build(new_scrut.clone())),
    }
}

/// Lower a term that must not mention the innermost variable.
pub fn strengthen(t: &Term) -> Option<Term> {
    unshift(t, 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn env() -> Env {
        Env::new(Mode::Propositional)
    }

    fn two_rec(s: Term) -> Term {
        Term::new(Node::TwoRec(Term::two_t(), Term::bit1(), Term::bit0(), s))
    }

    #[test]
    fn beta() {
        let e = env();
        let t = Term::app(Term::lam(Term::two_t(), Term::var(0)), Term::bit0());
        assert_eq!(
            whnf(&e, Mode::Propositional, &Context::new(), &t, &mut Fuel::default()).unwrap(),
            Term::bit0()
        );
        assert!(conv(
            &e,
            Mode::Propositional,
            &Context::new(),
            &t,
            &Term::bit0(),
            &mut Fuel::default()
        )
        .unwrap());
    }

    #[test]
    fn idrec_on_refl_computes_in_both_modes() {
        let e = env();
        let c = Term::new(Node::IdRec(
            Term::two_t(),
            Term::var(0),
            Term::bit1(),
            Term::bit1(),
            Term::refl(Term::bit1()),
        ));
        for mode in [Mode::Strict, Mode::Propositional] {
            assert_eq!(
                whnf(&e, mode, &Context::new(), &c, &mut Fuel::default()).unwrap(),
                Term::bit1()
            );
        }
    }

    #[test]
    fn two_rec_is_neutral_in_propositional_mode() {
        let e = env();
        let t = two_rec(Term::bit0());
        assert_eq!(
            whnf(&e, Mode::Strict, &Context::new(), &t, &mut Fuel::default()).unwrap(),
            Term::bit1()
        );
        assert_eq!(
            whnf(&e, Mode::Propositional, &Context::new(), &t, &mut Fuel::default()).unwrap(),
            t
        );
    }

    #[test]
    fn wrec_on_sup_unfolds_in_strict_mode_only() {
        let e = env();
        let b = Term::new(Node::TwoRec(Term::univ(), Term::zero_t(), Term::one_t(), Term::var(0)));
        let w = Term::w(Term::two_t(), b.clone());
        let sub = Term::lam(
            Term::new(Node::TwoRec(Term::univ(), Term::zero_t(), Term::one_t(), Term::bit0())),
            Term::new(Node::ZeroRec(Term::w(Term::two_t(), b), Term::var(0))),
        );
        let _ = w;
        let step = Term::bit1();
        let rec = Term::new(Node::WRec(Term::two_t(), step.clone(), Term::sup(Term::bit0(), sub)));
        let mut f = Fuel::default();
        assert_eq!(whnf(&e, Mode::Strict, &Context::new(), &rec, &mut f).unwrap(), step);
        assert_eq!(
            whnf(&e, Mode::Propositional, &Context::new(), &rec, &mut f).unwrap(),
            rec
        );
        assert!(!conv(&e, Mode::Propositional, &Context::new(), &rec, &step, &mut f).unwrap());
    }

    #[test]
    fn no_eta_for_neutral_functions() {
        let e = env();
        let mut ctx = Context::new();
        ctx.push("f", Term::arrow(Term::two_t(), Term::two_t()));
        let f = Term::var(0);
        let expanded = Term::lam(Term::two_t(), Term::app(Term::var(1), Term::var(0)));
        assert!(!conv(&e, Mode::Strict, &ctx, &f, &expanded, &mut Fuel::default()).unwrap());
    }

    #[test]
    fn fuel_exhaustion_is_an_error() {
        let e = env();
        let t = Term::app(Term::lam(Term::two_t(), Term::var(0)), Term::bit0());
        let r = whnf(&e, Mode::Strict, &Context::new(), &t, &mut Fuel::new(0));
        assert!(matches!(r, Err(ReduceError::FuelExhausted { .. })));
    }

    #[test]
    fn delta_unfolds_definitions() {
        let mut e = env();
        e.insert_unchecked(
            "not".into(),
            Term::arrow(Term::two_t(), Term::two_t()),
            Some(Term::lam(Term::two_t(), two_rec(Term::var(0)))),
        );
        let t = Term::app(Term::cnst("not"), Term::bit0());
        assert_eq!(
            whnf(&e, Mode::Strict, &Context::new(), &t, &mut Fuel::default()).unwrap(),
            Term::bit1()
        );
        assert!(conv(
            &e,
            Mode::Propositional,
            &Context::new(),
            &t,
            &two_rec(Term::bit0()),
            &mut Fuel::default()
        )
        .unwrap());
    }
}
