//! Printing kernel terms back to surface syntax.

use std::collections::HashSet;

use crate::surface::lexer::{is_identifier, Prim};
use crate::term::{unshift, Name, Node, Term};

const BINDER: u8 = 0;
const ARROW: u8 = 1;
const PROD: u8 = 2;
const APP: u8 = 3;
const ATOM: u8 = 4;

/// Render `t` with `names` for its free variables, outermost first.
pub fn pretty(t: &Term, names: &[Name]) -> String {
    let mut avoid = HashSet::new();
    t.visit(&mut |s| {
        if let Node::Const(c) = s.node() {
            avoid.insert(c.to_string());
        }
    });
    let mut p = Printer {
        scope: Vec::new(),
        avoid,
        out: String::new(),
    };
    let mut fixed: Vec<String> = Vec::with_capacity(names.len());
    for n in names.iter().rev() {
        let base = if is_identifier(n) {
            n.to_string()
        } else {
            "x".to_string()
        };
        let name = p.fresh_among(&base, &fixed);
        fixed.push(name);
    }
    fixed.reverse();
    p.scope = fixed;
    p.term(t, BINDER);
    p.out
}

struct Printer {
    /// Names of bound and free variables, outermost first.
    scope: Vec<String>,
    avoid: HashSet<String>,
    out: String,
}

impl Printer {
    fn fresh_among(&self, base: &str, taken: &[String]) -> String {
        let ok = |n: &str| !self.avoid.contains(n) && !taken.iter().any(|t| t == n);
        if ok(base) {
            return base.to_string();
        }
        (1..).map(|i| format!("{base}{i}")).find(|n| ok(n)).expect("unbounded")
    }

    fn bind(&mut self, hint: Option<&Name>) -> String {
        let base = match hint {
            Some(h) if is_identifier(h) => h.to_string(),
            _ => "x".to_string(),
        };
        let n = self.fresh_among(&base, &self.scope);
        self.scope.push(n.clone());
        n
    }

    fn unbind(&mut self, k: usize) {
        for _ in 0..k {
            self.scope.pop();
        }
    }

    fn s(&mut self, x: &str) {
        self.out.push_str(x);
    }

    fn var(&mut self, i: u32) {
        let len = self.scope.len();
        match len.checked_sub(i as usize + 1) {
            Some(k) => {
                let n = self.scope[k].clone();
                self.s(&n);
            }
            None => self.s(&format!("v{}", i as usize - len)),
        }
    }

    fn paren(&mut self, need: bool, f: impl FnOnce(&mut Self)) {
        if need {
            self.s("(");
        }
        f(self);
        if need {
            self.s(")");
        }
    }

    fn term(&mut self, t: &Term, level: u8) {
        use Node::*;
        match t.node() {
            Var(i) => self.var(*i),
            Const(c) => self.s(c),
            Univ => self.s("U"),
            ZeroT => self.s("0"),
            OneT => self.s("1"),
            TwoT => self.s("2"),
            Bit0 => self.s("0₂"),
            Bit1 => self.s("1₂"),
            Star => self.s("star"),
            Pi(a, b) | Sigma(a, b) => {
                let is_pi = matches!(t.node(), Pi(..));
                match unshift(b, 1) {
                    Some(b) if is_pi => self.paren(level > ARROW, |p| {
                        p.term(a, PROD);
                        p.s(" -> ");
                        p.term(&b, BINDER);
                    }),
                    Some(b) => self.paren(level > PROD, |p| {
                        p.term(a, APP);
                        p.s(" * ");
                        p.term(&b, PROD);
                    }),
                    None => self.paren(level > BINDER, |p| p.binders(t, if is_pi { "Pi" } else { "Sig" }, ", ")),
                }
            }
            Lam(..) => self.paren(level > BINDER, |p| p.binders(t, "fun", " => ")),
            WT(a, b) => self.paren(level > BINDER, |p| {
                p.s("W (");
                let n = p.bind(t.hints().and_then(|h| h.first()));
                p.unbind(1);
                p.s(&n);
                p.s(" : ");
                p.term(a, BINDER);
                p.s("), ");
                p.scope.push(n);
                p.term(b, BINDER);
                p.unbind(1);
            }),
            App(f, a) => self.paren(level > APP, |p| {
                p.term(f, APP);
                p.s(" ");
                p.term(a, ATOM);
            }),
            Pair(a, b) => {
                self.s("(");
                self.term(a, BINDER);
                self.s(", ");
                self.term(b, BINDER);
                self.s(")");
            }
            Proj1(_) => self.prim(t, Prim::Fst, level),
            Proj2(_) => self.prim(t, Prim::Snd, level),
            SigRec(..) => self.prim(t, Prim::Split, level),
            IdT(..) => self.prim(t, Prim::Id, level),
            Refl(_) => self.prim(t, Prim::Refl, level),
            IdRec(..) => self.prim(t, Prim::IdRec, level),
            ZeroRec(..) => self.prim(t, Prim::ZeroElim, level),
            OneRec(..) => self.prim(t, Prim::OneElim, level),
            OneComp(..) => self.prim(t, Prim::OneComp, level),
            TwoRec(..) => self.prim(t, Prim::TwoRec, level),
            TwoComp0(..) => self.prim(t, Prim::TwoComp0, level),
            TwoComp1(..) => self.prim(t, Prim::TwoComp1, level),
            Sup(..) => self.prim(t, Prim::Sup, level),
            WRec(..) => self.prim(t, Prim::WRec, level),
            WComp(..) => self.prim(t, Prim::WComp, level),
            AxFunExt(..) => self.prim(t, Prim::FunExt, level),
            AxEtaPi(..) => self.prim(t, Prim::EtaPi, level),
        }
    }

    /// A run of same-kind binders: `fun (x : A) (y : B) => body`.
    fn binders(&mut self, t: &Term, kw: &str, sep: &str) {
        self.s(kw);
        let mut cur = t.clone();
        let mut bound = 0;
        let same_kind = |a: &Node, b: &Node| std::mem::discriminant(a) == std::mem::discriminant(b);
        loop {
            let (dom, body) = match cur.node() {
                Node::Pi(a, b) | Node::Sigma(a, b) | Node::Lam(a, b) => (a.clone(), b.clone()),
                _ => unreachable!(),
            };
            let name = self.bind(cur.hints().and_then(|h| h.first()));
            self.scope.pop();
            self.s(" (");
            self.s(&name);
            self.s(" : ");
            self.term(&dom, BINDER);
            self.s(")");
            self.scope.push(name);
            bound += 1;
            let continue_run = same_kind(body.node(), t.node())
                && (matches!(body.node(), Node::Lam(..))
                    || matches!(body.node(), Node::Pi(_, b) | Node::Sigma(_, b) if unshift(b, 1).is_none()));
            cur = body;
            if !continue_run {
                break;
            }
        }
        self.s(sep);
        self.term(&cur, BINDER);
        self.unbind(bound);
    }

    fn prim(&mut self, t: &Term, p: Prim, level: u8) {
        let hints = t.hints().map(|h| h.to_vec()).unwrap_or_default();
        let children = t.node().children().into_iter().cloned().collect::<Vec<_>>();
        let binders = t.node().binders();
        self.paren(level > APP, |pr| {
            pr.s(p.keyword());
            let mut h = 0;
            for (c, nb) in children.iter().zip(binders) {
                pr.s(" ");
                if *nb == 0 {
                    pr.term(c, ATOM);
                    continue;
                }
                pr.s("[");
                for k in 0..*nb as usize {
                    let name = pr.bind(hints.get(h + k));
                    if k > 0 {
                        pr.s(" ");
                    }
                    pr.s(&name);
                }
                h += *nb as usize;
                pr.s(". ");
                pr.term(c, BINDER);
                pr.s("]");
                pr.unbind(*nb as usize);
            }
        });
    }
}
