//! Random well-typed terms and the kernel properties checked against them.
#![allow(dead_code)]

use std::sync::Arc;

use hw_kernel::surface::{elaborate_term, parse_term, pretty};
use hw_kernel::term::{inst1, shift_up, unshift};
use hw_kernel::{conv, normalize, syntactic_eq, whnf, Checker, Context, Env, Fuel, Mode, Name, Node, Term};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const FUEL: u64 = 500_000;

pub type Outcome = Result<(), String>;

pub type Property = (&'static str, fn(u64) -> Outcome);

/// Type-directed generator over a context of simple and identity types.
pub struct Gen {
    rng: ChaCha8Rng,
    pub mode: Mode,
}

impl Gen {
    /// Even seeds give propositional mode, odd seeds strict mode.
    pub fn new(seed: u64) -> Gen {
        let mode = if seed.is_multiple_of(2) {
            Mode::Propositional
        } else {
            Mode::Strict
        };
        Gen {
            rng: ChaCha8Rng::seed_from_u64(seed),
            mode,
        }
    }

    fn chance(&mut self, p: f64) -> bool {
        self.rng.gen_bool(p)
    }

    pub fn context(&mut self) -> Context {
        let mut ctx = Context::new();
        let n = self.rng.gen_range(0..4);
        for i in 0..n {
            let ty = self.ty(&ctx, 2, true);
            ctx.push(format!("v{i}"), ty);
        }
        ctx
    }

    /// A type valid in `ctx`; `0` only occurs when `empty` allows it.
    pub fn ty(&mut self, ctx: &Context, depth: u32, empty: bool) -> Term {
        let pick = if depth == 0 {
            self.rng.gen_range(0..2)
        } else {
            self.rng.gen_range(0..6)
        };
        match pick {
            0 => Term::one_t(),
            1 => Term::two_t(),
            2 => {
                let a = if empty && self.chance(0.15) {
                    Term::zero_t()
                } else {
                    self.ty(ctx, depth - 1, empty)
                };
                let mut inner = ctx.clone();
                inner.push("a", a.clone());
                let b = self.ty(&inner, depth - 1, false);
                Term::pi(a, b)
            }
            3 => {
                let a = self.ty(ctx, depth - 1, false);
                let mut inner = ctx.clone();
                inner.push("a", a.clone());
                let b = self.ty(&inner, depth - 1, false);
                Term::sigma(a, b)
            }
            _ => {
                let base = if self.chance(0.7) {
                    Term::two_t()
                } else {
                    self.ty(ctx, depth - 1, false)
                };
                let a = self.tm(ctx, &base, depth);
                let b = if self.chance(0.6) {
                    self.expand(ctx, &a, &base, 1)
                } else {
                    a.clone()
                };
                Term::id(base, a, b)
            }
        }
    }

    /// A term of type `ty` in `ctx`, where `ty` came from [`Gen::ty`] up to substitution.
    pub fn tm(&mut self, ctx: &Context, ty: &Term, depth: u32) -> Term {
        if self.chance(0.35) {
            if let Some(t) = self.neutral(ctx, ty, depth) {
                return t;
            }
        }
        match ty.node() {
            Node::OneT => match if depth == 0 { 0 } else { self.rng.gen_range(0..4) } {
                0 => Term::star(),
                1 => {
                    let c = self.tm(ctx, ty, depth - 1);
                    let s = self.tm(ctx, ty, depth - 1);
                    Term::new(Node::OneRec(Term::one_t(), c, s))
                }
                _ => self.redex(ctx, ty, depth),
            },
            Node::TwoT => match if depth == 0 { 0 } else { self.rng.gen_range(0..4) } {
                0 => {
                    if self.chance(0.5) {
                        Term::bit0()
                    } else {
                        Term::bit1()
                    }
                }
                1 => {
                    let c0 = self.tm(ctx, ty, depth - 1);
                    let c1 = self.tm(ctx, ty, depth - 1);
                    let b = self.tm(ctx, ty, depth - 1);
                    Term::new(Node::TwoRec(Term::two_t(), c0, c1, b))
                }
                _ => self.redex(ctx, ty, depth),
            },
            Node::Pi(a, b) => {
                let mut inner = ctx.clone();
                inner.push("x", a.clone());
                let body = self.tm(&inner, b, depth.saturating_sub(1));
                Term::lam(a.clone(), body)
            }
            Node::Sigma(a, b) => {
                let x = self.tm(ctx, a, depth.saturating_sub(1));
                let y = self.tm(ctx, &inst1(b, &ann(a, &x)), depth.saturating_sub(1));
                Term::pair(x, y)
            }
            Node::IdT(_, a, _) => Term::refl(a.clone()),
            Node::ZeroT => self.neutral(ctx, ty, depth).expect("a variable of type 0 is in scope"),
            _ => panic!("no generator for this type"),
        }
    }

    /// `(fun (s : S) => body) arg`, whose head is inferable.
    fn redex(&mut self, ctx: &Context, ty: &Term, depth: u32) -> Term {
        let s = self.ty(ctx, 1, false);
        let mut inner = ctx.clone();
        inner.push("s", s.clone());
        let body = self.tm(&inner, &shift_up(ty, 0, 1), depth - 1);
        let arg = self.tm(ctx, &s, depth - 1);
        Term::app(Term::lam(s, body), arg)
    }

    /// An eliminator applied to a variable whose type fits `ty`.
    fn neutral(&mut self, ctx: &Context, ty: &Term, depth: u32) -> Option<Term> {
        let mut options = Vec::new();
        for i in 0..ctx.len() as u32 {
            let Some(vt) = ctx.lookup(i) else { continue };
            let v = Term::var(i);
            if vt == *ty {
                options.push(v.clone());
            }
            match vt.node() {
                Node::ZeroT => options.push(Term::new(Node::ZeroRec(shift_up(ty, 0, 1), v.clone()))),
                Node::Pi(a, b) => {
                    if unshift(b, 1).as_ref() == Some(ty) && depth > 0 && *a.node() != Node::ZeroT {
                        let arg = self.tm(ctx, a, depth - 1);
                        options.push(Term::app(v.clone(), arg));
                    }
                }
                Node::Sigma(a, b) => {
                    if a == ty {
                        options.push(Term::proj1(v.clone()));
                    }
                    if inst1(b, &Term::proj1(v.clone())) == *ty {
                        options.push(Term::proj2(v.clone()));
                    }
                    if depth > 0 && matches!(ty.node(), Node::OneT | Node::TwoT) {
                        let mut inner = ctx.clone();
                        inner.push("x", a.clone());
                        inner.push("y", b.clone());
                        let d = self.tm(&inner, &shift_up(ty, 0, 2), depth - 1);
                        options.push(Term::new(Node::SigRec(shift_up(ty, 0, 1), d, v.clone())));
                    }
                }
                Node::IdT(a, l, r) if depth > 0 && matches!(ty.node(), Node::OneT | Node::TwoT) => {
                    let mut inner = ctx.clone();
                    inner.push("x", a.clone());
                    let c = self.tm(&inner, &shift_up(ty, 0, 1), depth - 1);
                    let m = shift_up(ty, 0, 3);
                    options.push(Term::new(Node::IdRec(m, c, l.clone(), r.clone(), v.clone())));
                }
                _ => {}
            }
        }
        options.choose(&mut self.rng).cloned()
    }

    /// A term convertible with `t : ty` in the current mode.
    pub fn expand(&mut self, ctx: &Context, t: &Term, ty: &Term, depth: u32) -> Term {
        let inner = if depth > 0 && self.chance(0.5) {
            self.expand(ctx, t, ty, depth - 1)
        } else {
            t.clone()
        };
        match self.rng.gen_range(0..5) {
            0 => Term::app(Term::lam(ty.clone(), Term::var(0)), inner),
            1 => {
                let s = self.ty(ctx, 1, false);
                let arg = self.tm(ctx, &s, 1);
                let k = Term::lam(ty.clone(), Term::lam(shift_up(&s, 0, 1), Term::var(1)));
                Term::apps(k, [inner, arg])
            }
            2 if self.mode == Mode::Strict => {
                let other = self.tm(ctx, ty, 1);
                if self.chance(0.5) {
                    Term::new(Node::TwoRec(shift_up(ty, 0, 1), inner, other, Term::bit0()))
                } else {
                    Term::new(Node::TwoRec(shift_up(ty, 0, 1), other, inner, Term::bit1()))
                }
            }
            3 if self.mode == Mode::Strict => Term::new(Node::OneRec(shift_up(ty, 0, 1), inner, Term::star())),
            _ => match (inner.node(), ty.node()) {
                (Node::Lam(a, body), Node::Pi(_, b)) => {
                    let mut c = ctx.clone();
                    c.push("x", a.clone());
                    Term::lam(a.clone(), self.expand(&c, body, b, depth.saturating_sub(1)))
                }
                (Node::Pair(x, y), Node::Sigma(a, b)) => {
                    let x2 = self.expand(ctx, x, a, depth.saturating_sub(1));
                    let y2 = self.expand(ctx, y, &inst1(b, &ann(a, x)), depth.saturating_sub(1));
                    Term::pair(x2, y2)
                }
                _ => Term::app(Term::lam(ty.clone(), Term::var(0)), inner),
            },
        }
    }

    /// A scope-correct term with no typing discipline, covering every node.
    pub fn raw(&mut self, scope: u32, depth: u32) -> Term {
        let leaf = depth == 0 || self.chance(0.2);
        if leaf {
            let mut leaves = vec![
                Term::new(Node::Const(Arc::from("foo"))),
                Term::new(Node::Const(Arc::from("bar"))),
                Term::univ(),
                Term::zero_t(),
                Term::one_t(),
                Term::star(),
                Term::two_t(),
                Term::bit0(),
                Term::bit1(),
            ];
            if scope > 0 {
                let v = Term::var(self.rng.gen_range(0..scope));
                leaves.push(v.clone());
                leaves.push(v);
            }
            return leaves.choose(&mut self.rng).cloned().expect("nonempty");
        }
        let d = Term::star;
        let shapes = [
            Node::Pi(d(), d()),
            Node::Lam(d(), d()),
            Node::App(d(), d()),
            Node::Sigma(d(), d()),
            Node::Pair(d(), d()),
            Node::Proj1(d()),
            Node::Proj2(d()),
            Node::SigRec(d(), d(), d()),
            Node::IdT(d(), d(), d()),
            Node::Refl(d()),
            Node::IdRec(d(), d(), d(), d(), d()),
            Node::ZeroRec(d(), d()),
            Node::OneRec(d(), d(), d()),
            Node::OneComp(d(), d()),
            Node::TwoRec(d(), d(), d(), d()),
            Node::TwoComp0(d(), d(), d()),
            Node::TwoComp1(d(), d(), d()),
            Node::WT(d(), d()),
            Node::Sup(d(), d()),
            Node::WRec(d(), d(), d()),
            Node::WComp(d(), d(), d(), d()),
            Node::AxFunExt(d(), d()),
            Node::AxEtaPi(d(), d()),
        ];
        let shape = shapes.choose(&mut self.rng).cloned().expect("nonempty");
        let children = shape.binders().iter().map(|b| self.raw(scope + b, depth - 1)).collect();
        let node = shape.with_children(children);
        let total = node.binder_total();
        if total > 0 && self.chance(0.5) {
            let pool = ["x", "y", "f", "x1", "_", "foo"];
            let hints: Vec<Name> = (0..total)
                .map(|_| Arc::from(*pool.choose(&mut self.rng).expect("nonempty")))
                .collect();
            Term::with_hints(node, Some(hints.into()))
        } else {
            Term::new(node)
        }
    }
}

/// Whether the checker can synthesize a type for `t` without a goal.
pub fn synthesizes(t: &Term) -> bool {
    match t.node() {
        Node::Pair(..) | Node::Sup(..) => false,
        Node::Lam(_, b) => synthesizes(b),
        Node::Refl(a) => synthesizes(a),
        _ => true,
    }
}

/// `t` itself if it synthesizes, else `(fun (z : ty) => z) t`.
pub fn ann(ty: &Term, t: &Term) -> Term {
    if synthesizes(t) {
        t.clone()
    } else {
        Term::app(Term::lam(ty.clone(), Term::var(0)), t.clone())
    }
}

/// A context, a type in it and a term of that type.
pub struct Sample {
    pub env: Env,
    pub ctx: Context,
    pub ty: Term,
    pub tm: Term,
}

pub fn sample(g: &mut Gen) -> Sample {
    let ctx = g.context();
    let ty = g.ty(&ctx, 2, false);
    let tm = g.tm(&ctx, &ty, 3);
    Sample {
        env: Env::new(g.mode),
        ctx,
        ty,
        tm,
    }
}

fn show(ctx: &Context, t: &Term) -> String {
    pretty(t, &ctx.names())
}

fn check(env: &Env, ctx: &Context, t: &Term, ty: &Term) -> Outcome {
    Checker::new(env)
        .with_fuel(FUEL)
        .check(ctx, t, ty)
        .map_err(|d| format!("{d}\n  term: {}\n  type: {}", show(ctx, t), show(ctx, ty)))
}

fn convertible(env: &Env, ctx: &Context, t: &Term, u: &Term) -> Result<bool, String> {
    conv(env, env.mode(), ctx, t, u, &mut Fuel::new(FUEL)).map_err(|e| e.to_string())
}

fn expect_conv(env: &Env, ctx: &Context, t: &Term, u: &Term, what: &str) -> Outcome {
    if convertible(env, ctx, t, u)? {
        Ok(())
    } else {
        Err(format!(
            "{what}: {} and {} are not convertible",
            show(ctx, t),
            show(ctx, u)
        ))
    }
}

/// Generated terms check against their generated types.
pub fn generator_sound(seed: u64) -> Outcome {
    let mut g = Gen::new(seed);
    let s = sample(&mut g);
    check(&s.env, &s.ctx, &s.ty, &Term::univ())?;
    check(&s.env, &s.ctx, &s.tm, &s.ty)
}

/// From `Γ, x : A ⊢ t : B` and `Γ ⊢ v : A` conclude `Γ ⊢ t[v] : B[v]`,
/// for `v` in synthesizing form.
pub fn substitution_lemma(seed: u64) -> Outcome {
    let mut g = Gen::new(seed);
    let ctx = g.context();
    let a = g.ty(&ctx, 2, false);
    let v = ann(&a, &g.tm(&ctx, &a, 3));
    let mut inner = ctx.clone();
    inner.push("x", a.clone());
    let b = g.ty(&inner, 2, false);
    let t = g.tm(&inner, &b, 3);
    let env = Env::new(g.mode);
    check(&env, &ctx, &v, &a)?;
    check(&env, &inner, &t, &b)?;
    check(&env, &ctx, &inst1(&t, &v), &inst1(&b, &v))
}

/// Weak head and full normal forms keep the type.
pub fn subject_reduction(seed: u64) -> Outcome {
    let mut g = Gen::new(seed);
    let s = sample(&mut g);
    check(&s.env, &s.ctx, &s.tm, &s.ty)?;
    let w = whnf(&s.env, g.mode, &s.ctx, &s.tm, &mut Fuel::new(FUEL)).map_err(|e| e.to_string())?;
    check(&s.env, &s.ctx, &w, &s.ty).map_err(|e| format!("after whnf: {e}"))?;
    let n = normalize(&s.env, g.mode, &s.ctx, &s.tm, &mut Fuel::new(FUEL)).map_err(|e| e.to_string())?;
    check(&s.env, &s.ctx, &n, &s.ty).map_err(|e| format!("after normalize: {e}"))
}

/// Conversion is reflexive, symmetric and transitive.
pub fn conv_equivalence(seed: u64) -> Outcome {
    let mut g = Gen::new(seed);
    let s = sample(&mut g);
    let (env, ctx, ty) = (&s.env, &s.ctx, &s.ty);
    expect_conv(env, ctx, &s.tm, &s.tm, "reflexivity")?;
    let e1 = g.expand(ctx, &s.tm, ty, 2);
    let e2 = g.expand(ctx, &e1, ty, 2);
    check(env, ctx, &e1, ty)?;
    check(env, ctx, &e2, ty)?;
    expect_conv(env, ctx, &s.tm, &e1, "expansion")?;
    expect_conv(env, ctx, &e1, &s.tm, "symmetry")?;
    expect_conv(env, ctx, &e1, &e2, "expansion")?;
    expect_conv(env, ctx, &s.tm, &e2, "transitivity")?;
    let others: Vec<Term> = (0..3)
        .map(|_| {
            if g.chance(0.5) {
                g.tm(ctx, ty, 2)
            } else {
                g.expand(ctx, &s.tm, ty, 1)
            }
        })
        .collect();
    let all: Vec<&Term> = [&s.tm].into_iter().chain(&others).collect();
    for x in &all {
        for y in &all {
            if convertible(env, ctx, x, y)? != convertible(env, ctx, y, x)? {
                return Err(format!("symmetry fails on {} and {}", show(ctx, x), show(ctx, y)));
            }
            for z in &all {
                if convertible(env, ctx, x, y)? && convertible(env, ctx, y, z)? && !convertible(env, ctx, x, z)? {
                    return Err(format!("transitivity fails through {}", show(ctx, y)));
                }
            }
        }
    }
    Ok(())
}

/// Plugging convertible terms into the same context gives convertible terms.
pub fn conv_congruence(seed: u64) -> Outcome {
    let mut g = Gen::new(seed);
    let s = sample(&mut g);
    let (env, ctx, ty) = (&s.env, &s.ctx, &s.ty);
    let u = g.expand(ctx, &s.tm, ty, 2);
    let mut inner = ctx.clone();
    inner.push("h", ty.clone());
    let cty = g.ty(ctx, 2, false);
    let hole = g.tm(&inner, &shift_up(&cty, 0, 1), 3);
    let (l, r) = (inst1(&hole, &ann(ty, &s.tm)), inst1(&hole, &ann(ty, &u)));
    check(env, ctx, &l, &cty)?;
    check(env, ctx, &r, &cty)?;
    expect_conv(env, ctx, &l, &r, "context congruence")?;
    let k = g.ty(ctx, 1, false);
    let pairs = [
        (Term::refl(s.tm.clone()), Term::refl(u.clone())),
        (Term::pair(s.tm.clone(), s.tm.clone()), Term::pair(u.clone(), u.clone())),
        (
            Term::lam(k.clone(), shift_up(&s.tm, 0, 1)),
            Term::lam(k, shift_up(&u, 0, 1)),
        ),
        (
            Term::id(ty.clone(), s.tm.clone(), u.clone()),
            Term::id(ty.clone(), u.clone(), s.tm.clone()),
        ),
    ];
    for (a, b) in &pairs {
        expect_conv(env, ctx, a, b, "constructor congruence")?;
    }
    Ok(())
}

/// `whnf` is a function of its input and a fixed point on its output.
pub fn whnf_laws(seed: u64) -> Outcome {
    let mut g = Gen::new(seed);
    let s = sample(&mut g);
    let t = if g.chance(0.5) {
        g.expand(&s.ctx, &s.tm, &s.ty, 2)
    } else {
        s.tm.clone()
    };
    let run = |t: &Term| whnf(&s.env, g.mode, &s.ctx, t, &mut Fuel::new(FUEL)).map_err(|e| e.to_string());
    let w1 = run(&t)?;
    let w2 = run(&t)?;
    if !syntactic_eq(&w1, &w2) {
        return Err(format!("whnf is not deterministic on {}", show(&s.ctx, &t)));
    }
    let w3 = run(&w1)?;
    if !syntactic_eq(&w1, &w3) {
        return Err(format!("whnf is not idempotent on {}", show(&s.ctx, &t)));
    }
    Ok(())
}

fn round_trip(t: &Term, names: &[Name]) -> Outcome {
    let text = pretty(t, names);
    let parsed = parse_term("round-trip", &text).map_err(|d| format!("{d}\n  text: {text}"))?;
    let known = |c: &str| c == "foo" || c == "bar";
    let back = elaborate_term(&parsed, names, &known).map_err(|d| format!("{d}\n  text: {text}"))?;
    if syntactic_eq(t, &back) {
        Ok(())
    } else {
        Err(format!(
            "round trip changed the term\n  text: {text}\n  back: {}",
            pretty(&back, names)
        ))
    }
}

/// Printing then parsing gives back the same term, typed or not.
pub fn parse_pretty(seed: u64) -> Outcome {
    let mut g = Gen::new(seed);
    let s = sample(&mut g);
    let names = s.ctx.names();
    round_trip(&s.tm, &names)?;
    round_trip(&s.ty, &names)?;
    let scope = g.rng.gen_range(0..3);
    let names: Vec<Name> = ["a", "b", "c"][..scope as usize]
        .iter()
        .map(|n| Arc::from(*n))
        .collect();
    let raw = g.raw(scope, 5);
    round_trip(&raw, &names)
}

pub const PROPERTIES: [Property; 7] = [
    ("generator soundness", generator_sound),
    ("substitution lemma", substitution_lemma),
    ("subject reduction", subject_reduction),
    ("conversion reflexivity, symmetry, transitivity", conv_equivalence),
    ("conversion congruence", conv_congruence),
    ("whnf determinism and idempotence", whnf_laws),
    ("parse after pretty is the identity", parse_pretty),
];
