//! Shared fixtures for the integration and acceptance tests.
#![allow(dead_code)]

#[path = "../../../kernel/tests/support/mod.rs"]
pub mod support;

use std::fs;
use std::path::{Path, PathBuf};

use hw_cli::derive::{Constructor, SignatureSpec};
use hw_cli::{with_big_stack, Failure, Session};
use hw_kernel::surface::pretty;
use hw_kernel::term::unshift;
use hw_kernel::{Mode, Term};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

pub fn stdlib_dir() -> PathBuf {
    crate_dir()
        .join("../../stdlib")
        .canonicalize()
        .expect("stdlib directory")
}

pub fn manifest() -> PathBuf {
    stdlib_dir().join("manifest.txt")
}

/// A negative file and what its header comments promise.
#[derive(Clone, Debug)]
pub struct NegCase {
    pub path: PathBuf,
    pub code: String,
    pub mode: Mode,
    pub fuel: Option<u64>,
}

fn header<'a>(text: &'a str, key: &str) -> Option<&'a str> {
    text.lines()
        .take_while(|l| l.starts_with("--"))
        .find_map(|l| l.strip_prefix("--").map(str::trim).and_then(|l| l.strip_prefix(key)))
        .map(str::trim)
}

pub fn neg_cases() -> Vec<NegCase> {
    let dir = crate_dir().join("tests/neg");
    let mut paths: Vec<PathBuf> = fs::read_dir(&dir)
        .expect("negative directory")
        .map(|e| e.expect("dir entry").path())
        .filter(|p| p.extension().is_some_and(|e| e == "hw"))
        .collect();
    paths.sort();
    paths
        .into_iter()
        .map(|path| {
            let text = fs::read_to_string(&path).expect("negative file");
            let code = header(&text, "expect:").unwrap_or_else(|| panic!("{} lacks an expect header", path.display()));
            let mode = header(&text, "mode:").map_or(Mode::Propositional, |m| Mode::parse(m).expect("mode"));
            let fuel = header(&text, "fuel:").map(|f| f.parse().expect("fuel"));
            NegCase {
                code: code.to_string(),
                path,
                mode,
                fuel,
            }
        })
        .collect()
}

/// The error code the checker reports for `case`, or `None` if it accepts.
pub fn run_neg(case: &NegCase) -> Option<String> {
    let case = case.clone();
    with_big_stack(move || {
        let mut s = Session::new(case.mode);
        if let Some(f) = case.fuel {
            s = s.with_fuel(f);
        }
        match s.check_input(&case.path) {
            Ok(()) => None,
            Err(Failure::Check(d)) => Some(d.code.code().to_string()),
            Err(Failure::Config(m)) => Some(format!("config: {m}")),
        }
    })
}

/// A signature whose arities are drawn from 0, 1, 2 and the naturals.
pub fn random_spec(rng: &mut impl Rng, index: usize) -> SignatureSpec {
    let n = rng.gen_range(0..5);
    let constructors = (0..n)
        .map(|i| Constructor {
            name: format!("c{i}"),
            arity: (*["0", "1", "2", "Nat"].choose(rng).expect("nonempty")).to_string(),
        })
        .collect();
    SignatureSpec {
        name: format!("Sig{index}"),
        constructors,
    }
}

/// A standalone file of closed definitions from the term generator.
pub fn generated_file(seed: u64, defs: usize) -> String {
    let mut out = String::from("-- generated\n");
    for k in 0..defs {
        let mut g = support::Gen::new(seed.wrapping_mul(31).wrapping_add(k as u64) & !1);
        let s = support::sample(&mut g);
        let n = s.ctx.len() as u32;
        let mut ty = s.ty.clone();
        let mut tm = s.tm.clone();
        for i in 0..n {
            let dom = unshift(&s.ctx.lookup(i).expect("typed context"), i + 1).expect("prefix scope");
            ty = Term::pi(dom.clone(), ty);
            tm = Term::lam(dom, tm);
        }
        out.push_str(&format!(
            "def g{k} : {} :=\n  {}\n\n",
            pretty(&ty, &[]),
            pretty(&tm, &[])
        ));
    }
    out
}

/// Peano naturals, evaluated without the kernel.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Unary {
    Z,
    S(Box<Unary>),
}

impl Unary {
    pub fn of(n: u32) -> Unary {
        (0..n).fold(Unary::Z, |u, _| Unary::S(Box::new(u)))
    }

    /// Recursion on the second argument, as in the corpus.
    pub fn add(&self, other: &Unary) -> Unary {
        match other {
            Unary::Z => self.clone(),
            Unary::S(k) => Unary::S(Box::new(self.add(k))),
        }
    }

    /// The corpus numeral `succ (... (succ zero))`.
    pub fn to_term(&self) -> Term {
        match self {
            Unary::Z => Term::cnst("zero"),
            Unary::S(k) => Term::app(Term::cnst("succ"), k.to_term()),
        }
    }
}

pub fn write_file(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).expect("write fixture");
    p
}
