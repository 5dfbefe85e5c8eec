//! Global declaration table shared by reduction and checking.

use std::collections::HashMap;

use crate::reduce::Mode;
use crate::term::{Declaration, Name, Node, Term};

/// Checked declarations in insertion order, all under one mode.
#[derive(Clone, Debug)]
pub struct Env {
    mode: Mode,
    decls: HashMap<Name, Declaration>,
    order: Vec<Name>,
}

impl Env {
    pub fn new(mode: Mode) -> Env {
        Env {
            mode,
            decls: HashMap::new(),
            order: Vec::new(),
        }
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn get(&self, name: &str) -> Option<&Declaration> {
        self.decls.get(name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.decls.contains_key(name)
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Declarations in insertion order.
    pub fn iter(&self) -> impl Iterator<Item = &Declaration> {
        self.order.iter().map(move |n| &self.decls[n])
    }

    /// Definition height used to decide which side to unfold first.
    pub fn height(&self, name: &str) -> u32 {
        self.decls.get(name).map_or(0, |d| d.height)
    }

    /// Height a new definition with this body would get.
    pub fn height_of_body(&self, body: &Term) -> u32 {
        let mut h = 0;
        body.visit(&mut |t| {
            if let Node::Const(c) = t.node() {
                h = h.max(self.height(c));
            }
        });
        h + 1
    }

    /// Insert without checking. Callers are the checker and tests.
    pub fn insert_unchecked(&mut self, name: Name, ty: Term, body: Option<Term>) -> bool {
        if self.decls.contains_key(&name) {
            return false;
        }
        let height = body.as_ref().map_or(0, |b| self.height_of_body(b));
        let decl = Declaration {
            name: name.clone(),
            ty,
            body,
            mode: self.mode,
            height,
        };
        self.order.push(name.clone());
        self.decls.insert(name, decl);
        true
    }

    /// Does the declaration depend, directly or through other
    /// declarations, on a term satisfying `pred`?
    pub fn depends_on(&self, root: &Term, pred: &impl Fn(&Term) -> bool) -> bool {
        let mut seen = std::collections::HashSet::new();
        let mut stack = vec![root.clone()];
        while let Some(t) = stack.pop() {
            let mut found = false;
            t.visit(&mut |s| {
                if pred(s) {
                    found = true;
                }
                if let Node::Const(c) = s.node() {
                    if seen.insert(c.clone()) {
                        if let Some(d) = self.decls.get(c) {
                            stack.push(d.ty.clone());
                            if let Some(b) = &d.body {
                                stack.push(b.clone());
                            }
                        }
                    }
                }
            });
            if found {
                return true;
            }
        }
        false
    }
}
