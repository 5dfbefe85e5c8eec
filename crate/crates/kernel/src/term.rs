//! Kernel terms with de Bruijn indices, shifting and substitution.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

pub type Name = Arc<str>;

/// Shared, immutable term handle. Cloning is a reference-count bump.
#[derive(Clone)]
pub struct Term(Arc<TermData>);

struct TermData {
    node: Node,
    /// One past the largest free index, or 0 when closed.
    fv: u32,
    /// Binder name hints, one per binder of the node in field order.
    hints: Option<Arc<[Name]>>,
}

/// One constructor per type former, introduction and elimination form.
///
/// Fields marked "under n" bind `n` variables; index 0 is the innermost.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Node {
    Var(u32),
    /// Reference to a global declaration.
    Const(Name),
    Univ,
    /// dom, cod under 1
    Pi(Term, Term),
    /// dom, body under 1
    Lam(Term, Term),
    App(Term, Term),
    Sigma(Term, Term),
    Pair(Term, Term),
    Proj1(Term),
    Proj2(Term),
    /// motive under 1, method under 2, scrutinee
    SigRec(Term, Term, Term),
    IdT(Term, Term, Term),
    Refl(Term),
    /// motive under 3, base under 1, lhs, rhs, proof
    IdRec(Term, Term, Term, Term, Term),
    ZeroT,
    ZeroRec(Term, Term),
    OneT,
    Star,
    OneRec(Term, Term, Term),
    OneComp(Term, Term),
    TwoT,
    Bit0,
    Bit1,
    TwoRec(Term, Term, Term, Term),
    TwoComp0(Term, Term, Term),
    TwoComp1(Term, Term, Term),
    WT(Term, Term),
    Sup(Term, Term),
    /// motive under 1, step under 3, scrutinee
    WRec(Term, Term, Term),
    /// motive under 1, step under 3, label, subtrees
    WComp(Term, Term, Term, Term),
    AxFunExt(Term, Term),
    /// domain, codomain family under 1
    AxEtaPi(Term, Term),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScopeError {
    #[error("shift would move free index {index} below zero")]
    Underflow { index: u32 },
}

impl Node {
    /// Binder count of each child, in field order.
    pub fn binders(&self) -> &'static [u32] {
        use Node::*;
        match self {
            Var(_) | Const(_) | Univ | ZeroT | OneT | Star | TwoT | Bit0 | Bit1 => &[],
            Pi(..) | Lam(..) | Sigma(..) | WT(..) | AxEtaPi(..) => &[0, 1],
            App(..) | Pair(..) | Sup(..) | AxFunExt(..) => &[0, 0],
            Proj1(_) | Proj2(_) | Refl(_) => &[0],
            SigRec(..) => &[1, 2, 0],
            IdT(..) => &[0, 0, 0],
            IdRec(..) => &[3, 1, 0, 0, 0],
            ZeroRec(..) => &[1, 0],
            OneRec(..) => &[1, 0, 0],
            OneComp(..) => &[1, 0],
            TwoRec(..) => &[1, 0, 0, 0],
            TwoComp0(..) | TwoComp1(..) => &[1, 0, 0],
            WRec(..) => &[1, 3, 0],
            WComp(..) => &[1, 3, 0, 0],
        }
    }

    pub fn children(&self) -> Vec<&Term> {
        use Node::*;
        match self {
            Var(_) | Const(_) | Univ | ZeroT | OneT | Star | TwoT | Bit0 | Bit1 => vec![],
            Proj1(a) | Proj2(a) | Refl(a) => vec![a],
            Pi(a, b)
            | Lam(a, b)
            | App(a, b)
            | Sigma(a, b)
            | Pair(a, b)
            | ZeroRec(a, b)
            | OneComp(a, b)
            | WT(a, b)
            | Sup(a, b)
            | AxFunExt(a, b)
            | AxEtaPi(a, b) => vec![a, b],
            SigRec(a, b, c)
            | IdT(a, b, c)
            | OneRec(a, b, c)
            | TwoComp0(a, b, c)
            | TwoComp1(a, b, c)
            | WRec(a, b, c) => vec![a, b, c],
            TwoRec(a, b, c, d) | WComp(a, b, c, d) => vec![a, b, c, d],
            IdRec(a, b, c, d, e) => vec![a, b, c, d, e],
        }
    }

    /// Rebuild this node shape from new children, given in field order.
    pub fn with_children(&self, mut ch: Vec<Term>) -> Node {
        use Node::*;
        let mut it = ch.drain(..);
        let mut n = || it.next().expect("child count");
        match self {
            Var(i) => Var(*i),
            Const(c) => Const(c.clone()),
            Univ => Univ,
            ZeroT => ZeroT,
            OneT => OneT,
            Star => Star,
            TwoT => TwoT,
            Bit0 => Bit0,
            Bit1 => Bit1,
            Proj1(_) => Proj1(n()),
            Proj2(_) => Proj2(n()),
            Refl(_) => Refl(n()),
            Pi(..) => Pi(n(), n()),
            Lam(..) => Lam(n(), n()),
            App(..) => App(n(), n()),
            Sigma(..) => Sigma(n(), n()),
            Pair(..) => Pair(n(), n()),
            ZeroRec(..) => ZeroRec(n(), n()),
            OneComp(..) => OneComp(n(), n()),
            WT(..) => WT(n(), n()),
            Sup(..) => Sup(n(), n()),
            AxFunExt(..) => AxFunExt(n(), n()),
            AxEtaPi(..) => AxEtaPi(n(), n()),
            SigRec(..) => SigRec(n(), n(), n()),
            IdT(..) => IdT(n(), n(), n()),
            OneRec(..) => OneRec(n(), n(), n()),
            TwoComp0(..) => TwoComp0(n(), n(), n()),
            TwoComp1(..) => TwoComp1(n(), n(), n()),
            WRec(..) => WRec(n(), n(), n()),
            TwoRec(..) => TwoRec(n(), n(), n(), n()),
            WComp(..) => WComp(n(), n(), n(), n()),
            IdRec(..) => IdRec(n(), n(), n(), n(), n()),
        }
    }

    /// Total number of binders introduced by this node.
    pub fn binder_total(&self) -> usize {
        self.binders().iter().map(|b| *b as usize).sum()
    }
}

impl Term {
    pub fn new(node: Node) -> Term {
        Term::with_hints(node, None)
    }

    pub fn with_hints(node: Node, hints: Option<Arc<[Name]>>) -> Term {
        let fv = match &node {
            Node::Var(i) => i + 1,
            other => other
                .binders()
                .iter()
                .zip(other.children())
                .map(|(b, c)| c.fv().saturating_sub(*b))
                .max()
                .unwrap_or(0),
        };
        let hints = hints.filter(|h| h.len() == node.binder_total());
        Term(Arc::new(TermData { node, fv, hints }))
    }

    pub fn node(&self) -> &Node {
        &self.0.node
    }

    /// One past the largest free index; 0 for closed terms.
    pub fn fv(&self) -> u32 {
        self.0.fv
    }

    pub fn is_closed(&self) -> bool {
        self.0.fv == 0
    }

    pub fn hints(&self) -> Option<&[Name]> {
        self.0.hints.as_deref()
    }

    pub fn ptr_eq(&self, other: &Term) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    pub fn addr(&self) -> usize {
        Arc::as_ptr(&self.0) as usize
    }

    /// Same shape with new children, keeping name hints.
    pub fn rebuild(&self, children: Vec<Term>) -> Term {
        Term::with_hints(self.node().with_children(children), self.0.hints.clone())
    }

    pub fn var(i: u32) -> Term {
        Term::new(Node::Var(i))
    }
    pub fn cnst(name: &str) -> Term {
        Term::new(Node::Const(name.into()))
    }
    pub fn univ() -> Term {
        Term::new(Node::Univ)
    }
    pub fn pi(a: Term, b: Term) -> Term {
        Term::new(Node::Pi(a, b))
    }
    /// Non-dependent function type; shifts the codomain under the binder.
    pub fn arrow(a: Term, b: Term) -> Term {
        Term::new(Node::Pi(a, shift_up(&b, 0, 1)))
    }
    pub fn lam(a: Term, b: Term) -> Term {
        Term::new(Node::Lam(a, b))
    }
    pub fn app(f: Term, a: Term) -> Term {
        Term::new(Node::App(f, a))
    }
    pub fn apps(f: Term, args: impl IntoIterator<Item = Term>) -> Term {
        args.into_iter().fold(f, Term::app)
    }
    pub fn sigma(a: Term, b: Term) -> Term {
        Term::new(Node::Sigma(a, b))
    }
    pub fn pair(a: Term, b: Term) -> Term {
        Term::new(Node::Pair(a, b))
    }
    pub fn proj1(p: Term) -> Term {
        Term::new(Node::Proj1(p))
    }
    pub fn proj2(p: Term) -> Term {
        Term::new(Node::Proj2(p))
    }
    pub fn id(a: Term, x: Term, y: Term) -> Term {
        Term::new(Node::IdT(a, x, y))
    }
    pub fn refl(a: Term) -> Term {
        Term::new(Node::Refl(a))
    }
    pub fn zero_t() -> Term {
        Term::new(Node::ZeroT)
    }
    pub fn one_t() -> Term {
        Term::new(Node::OneT)
    }
    pub fn star() -> Term {
        Term::new(Node::Star)
    }
    pub fn two_t() -> Term {
        Term::new(Node::TwoT)
    }
    pub fn bit0() -> Term {
        Term::new(Node::Bit0)
    }
    pub fn bit1() -> Term {
        Term::new(Node::Bit1)
    }
    pub fn w(a: Term, b: Term) -> Term {
        Term::new(Node::WT(a, b))
    }
    pub fn sup(a: Term, t: Term) -> Term {
        Term::new(Node::Sup(a, t))
    }

    /// Split an application spine into head and arguments.
    pub fn spine(&self) -> (Term, Vec<Term>) {
        let mut args = Vec::new();
        let mut t = self.clone();
        while let Node::App(f, a) = t.node() {
            args.push(a.clone());
            let f = f.clone();
            t = f;
        }
        args.reverse();
        (t, args)
    }

    /// Number of nodes, counting shared subterms once per occurrence.
    pub fn size(&self) -> usize {
        1 + self.node().children().iter().map(|c| c.size()).sum::<usize>()
    }

    /// True if the named constant occurs anywhere in the term.
    pub fn mentions_const(&self, name: &str) -> bool {
        match self.node() {
            Node::Const(c) => &**c == name,
            n => n.children().iter().any(|c| c.mentions_const(name)),
        }
    }

    /// Apply `f` to every subterm in pre-order.
    pub fn visit(&self, f: &mut impl FnMut(&Term)) {
        f(self);
        for c in self.node().children() {
            c.visit(f);
        }
    }
}

impl PartialEq for Term {
    fn eq(&self, other: &Term) -> bool {
        self.ptr_eq(other) || (self.0.fv == other.0.fv && self.0.node == other.0.node)
    }
}

impl Eq for Term {}

impl std::hash::Hash for Term {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.0.node.hash(state)
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Node::*;
        let name = match self.node() {
            Var(i) => return write!(f, "#{i}"),
            Const(c) => return write!(f, "{c}"),
            Univ => return write!(f, "U"),
            ZeroT => return write!(f, "0"),
            OneT => return write!(f, "1"),
            Star => return write!(f, "star"),
            TwoT => return write!(f, "2"),
            Bit0 => return write!(f, "0b"),
            Bit1 => return write!(f, "1b"),
            Pi(..) => "Pi",
            Lam(..) => "Lam",
            App(..) => "App",
            Sigma(..) => "Sigma",
            Pair(..) => "Pair",
            Proj1(..) => "Proj1",
            Proj2(..) => "Proj2",
            SigRec(..) => "SigRec",
            IdT(..) => "Id",
            Refl(..) => "Refl",
            IdRec(..) => "IdRec",
            ZeroRec(..) => "ZeroRec",
            OneRec(..) => "OneRec",
            OneComp(..) => "OneComp",
            TwoRec(..) => "TwoRec",
            TwoComp0(..) => "TwoComp0",
            TwoComp1(..) => "TwoComp1",
            WT(..) => "W",
            Sup(..) => "Sup",
            WRec(..) => "WRec",
            WComp(..) => "WComp",
            AxFunExt(..) => "AxFunExt",
            AxEtaPi(..) => "AxEtaPi",
        };
        let mut t = f.debug_tuple(name);
        for c in self.node().children() {
            t.field(c);
        }
        t.finish()
    }
}

/// Structural identity; α-equivalence is free with de Bruijn indices.
pub fn syntactic_eq(t: &Term, u: &Term) -> bool {
    t == u
}

/// Rebuild `t` with `f` applied to each variable; `f` gets the binder depth.
fn map_vars(t: &Term, depth: u32, f: &mut impl FnMut(u32, u32) -> Term, skip: &impl Fn(&Term, u32) -> bool) -> Term {
    if skip(t, depth) {
        return t.clone();
    }
    match t.node() {
        Node::Var(i) => f(*i, depth),
        n => {
            let children = n
                .binders()
                .iter()
                .zip(n.children())
                .map(|(b, c)| map_vars(c, depth + b, f, skip))
                .collect();
            t.rebuild(children)
        }
    }
}

/// Shift free indices `>= cutoff` up by `amount`.
pub fn shift_up(t: &Term, cutoff: u32, amount: u32) -> Term {
    if amount == 0 {
        return t.clone();
    }
    map_vars(
        t,
        cutoff,
        &mut |i, d| if i >= d { Term::var(i + amount) } else { Term::var(i) },
        &|t, d| t.fv() <= d,
    )
}

/// Shift free indices `>= cutoff` by a signed amount.
pub fn shift(t: &Term, cutoff: u32, amount: i64) -> Result<Term, ScopeError> {
    if amount >= 0 {
        return Ok(shift_up(t, cutoff, amount as u32));
    }
    let down = amount.unsigned_abs() as u32;
    let mut err = None;
    let out = map_vars(
        t,
        cutoff,
        &mut |i, d| {
            if i >= d {
                if i - d < down && err.is_none() {
                    err = Some(ScopeError::Underflow { index: i - d });
                }
                Term::var(i.saturating_sub(down))
            } else {
                Term::var(i)
            }
        },
        &|t, d| t.fv() <= d,
    );
    match err {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

/// Replace `Var j` by `v`, lowering the indices above `j` by one.
pub fn subst(t: &Term, j: u32, v: &Term) -> Term {
    map_vars(
        t,
        j,
        &mut |i, d| {
            if i < d {
                Term::var(i)
            } else if i == d {
                shift_up(v, 0, d - j)
            } else {
                Term::var(i - 1)
            }
        },
        &|t, d| t.fv() <= d,
    )
}

/// Instantiate the `args.len()` innermost binders of `body`.
///
/// `args[0]` replaces the outermost of those binders.
pub fn instantiate(body: &Term, args: &[Term]) -> Term {
    let n = args.len() as u32;
    if n == 0 {
        return body.clone();
    }
    map_vars(
        body,
        0,
        &mut |i, d| {
            if i < d {
                Term::var(i)
            } else if i - d < n {
                shift_up(&args[(n - 1 - (i - d)) as usize], 0, d)
            } else {
                Term::var(i - n)
            }
        },
        &|t, d| t.fv() <= d,
    )
}

/// Instantiate a single binder.
pub fn inst1(body: &Term, arg: &Term) -> Term {
    instantiate(body, std::slice::from_ref(arg))
}

/// Lower all free indices by `n`, if none of the `n` innermost occur.
pub fn unshift(t: &Term, n: u32) -> Option<Term> {
    shift(t, 0, -(n as i64)).ok()
}

/// A declared global: a definition or an axiom.
#[derive(Clone, Debug)]
pub struct Declaration {
    pub name: Name,
    pub ty: Term,
    pub body: Option<Term>,
    pub mode: crate::reduce::Mode,
    /// Longest chain of definitions this one unfolds through.
    pub height: u32,
}

/// Typing context: the types of the free variables, innermost last.
#[derive(Clone, Debug, Default)]
pub struct Context {
    entries: Vec<(Name, Option<Term>)>,
}

impl Context {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn push(&mut self, name: impl Into<Name>, ty: Term) {
        self.entries.push((name.into(), Some(ty)));
    }

    /// Bind a variable whose type is not tracked.
    pub fn push_opaque(&mut self, name: impl Into<Name>) {
        self.entries.push((name.into(), None));
    }

    pub fn pop(&mut self) {
        self.entries.pop();
    }

    pub fn truncate(&mut self, len: usize) {
        self.entries.truncate(len);
    }

    /// Type of `Var i`, valid in the whole context.
    pub fn lookup(&self, i: u32) -> Option<Term> {
        let k = self.entries.len().checked_sub(i as usize + 1)?;
        let ty = self.entries[k].1.as_ref()?;
        Some(shift_up(ty, 0, i + 1))
    }

    pub fn name(&self, i: u32) -> Option<&Name> {
        let k = self.entries.len().checked_sub(i as usize + 1)?;
        Some(&self.entries[k].0)
    }

    /// Names from outermost to innermost.
    pub fn names(&self) -> Vec<Name> {
        self.entries.iter().map(|e| e.0.clone()).collect()
    }
}
