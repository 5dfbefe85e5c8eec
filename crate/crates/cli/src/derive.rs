//! Generating W-type encodings from signature specifications.
//!
//! A spec lists constructors with their arities:
//!
//! ```text
//! signature Tree
//! constructor leaf : 0
//! constructor node : 2
//! ```
//!
//! The output defines a label type, the arity family over it, the W-type,
//! one abbreviation per constructor, the algebra and hom types, and the
//! homotopy-initiality witness. It expects the stdlib to be loaded first.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use hw_kernel::surface::lexer::is_identifier;
use hw_kernel::surface::{elaborate_term, parse_term};
use hw_kernel::{Checker, Context, Mode, Term};

use crate::{Failure, Session};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constructor {
    pub name: String,
    pub arity: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignatureSpec {
    pub name: String,
    pub constructors: Vec<Constructor>,
}

#[derive(Clone, Debug, Default)]
pub struct DeriveOptions {
    /// Directory holding `manifest.txt`; found automatically when absent.
    pub stdlib: Option<PathBuf>,
}

/// Parse spec text. `default_name` names the signature when no
/// `signature` line is present.
pub fn parse_spec(default_name: &str, text: &str) -> Result<SignatureSpec, Failure> {
    let mut name = None;
    let mut constructors: Vec<Constructor> = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = strip_comment(raw).trim();
        if line.is_empty() {
            continue;
        }
        let bad = |msg: &str| Failure::Config(format!("spec line {}: {msg}", n + 1));
        if let Some(rest) = line.strip_prefix("signature ") {
            let s = rest.trim();
            if name.is_some() {
                return Err(bad("second `signature` line"));
            }
            if !is_identifier(s) {
                return Err(bad(&format!("`{s}` is not a valid name")));
            }
            name = Some(s.to_string());
        } else if let Some(rest) = line.strip_prefix("constructor ") {
            let (cname, arity) = rest
                .split_once(':')
                .ok_or_else(|| bad("expected `constructor NAME : ARITY`"))?;
            let cname = cname.trim();
            let arity = arity.trim();
            if !is_identifier(cname) {
                return Err(bad(&format!("`{cname}` is not a valid constructor name")));
            }
            if arity.is_empty() {
                return Err(bad("missing arity"));
            }
            if constructors.iter().any(|c| c.name == cname) {
                return Err(bad(&format!("constructor `{cname}` declared twice")));
            }
            constructors.push(Constructor {
                name: cname.to_string(),
                arity: arity.to_string(),
            });
        } else {
            return Err(bad("expected `constructor` or `signature`"));
        }
    }
    let name = match name {
        Some(n) => n,
        None => sanitize(default_name),
    };
    Ok(SignatureSpec { name, constructors })
}

fn strip_comment(line: &str) -> &str {
    let cut = [line.find("--"), line.find('#')].into_iter().flatten().min();
    match cut {
        Some(i) => &line[..i],
        None => line,
    }
}

fn sanitize(stem: &str) -> String {
    let mut s: String = stem
        .chars()
        .map(|c| if c.is_alphanumeric() || c == '_' { c } else { '_' })
        .collect();
    if !s.chars().next().is_some_and(|c| c.is_alphabetic() || c == '_') {
        s.insert(0, 'S');
    }
    if !is_identifier(&s) {
        s.push('_');
    }
    s
}

/// Every top-level name the output will declare.
pub fn generated_names(spec: &SignatureSpec) -> Vec<String> {
    let n = &spec.name;
    let k = spec.constructors.len();
    let mut out = Vec::new();
    for i in 1..=k {
        out.push(format!("{n}_A{i}"));
    }
    for j in 1..=k {
        out.push(format!("{n}_L{j}"));
        out.push(format!("{n}_B{j}"));
        for i in j..=k {
            out.push(format!("{n}_lab{j}_{i}"));
            out.push(format!("{n}_dom{j}_{i}"));
        }
    }
    for s in ["L", "B"] {
        out.push(format!("{n}_{s}"));
    }
    out.push(n.clone());
    for c in &spec.constructors {
        out.push(format!("{n}_{}", c.name));
    }
    for s in ["Alg", "Hom", "sup", "hinit"] {
        out.push(format!("{n}_{s}"));
    }
    out
}

/// Render the encoding as `.hw` source. Output depends only on `spec`.
pub fn render(spec: &SignatureSpec) -> String {
    let n = &spec.name;
    let k = spec.constructors.len();
    let a = |i: usize| format!("{n}_A{i}");
    let l = |j: usize| format!("{n}_L{j}");
    let b = |j: usize| format!("{n}_B{j}");
    let lab = |j: usize, i: usize| format!("{n}_lab{j}_{i}");
    let dom = |j: usize, i: usize| format!("{n}_dom{j}_{i}");

    let mut o = String::new();
    let _ = writeln!(o, "-- Signature `{n}`, generated by `hw derive`.");
    for c in &spec.constructors {
        let _ = writeln!(o, "-- {} : {}", c.name, c.arity);
    }
    o.push('\n');
    for (i, c) in spec.constructors.iter().enumerate() {
        let _ = writeln!(o, "def {} : U := {}\n", a(i + 1), c.arity);
    }

    for j in (1..=k).rev() {
        if j == k {
            let _ = writeln!(o, "def {} : U := 1\n", l(j));
        } else {
            let _ = writeln!(o, "def {} : U := Sig (b : 2), 2rec [_. U] 1 {} b\n", l(j), l(j + 1));
        }
    }

    // Case split on the outer label, shared by the family and its paths.
    let cases = |j: usize| {
        let lp = l(j + 1);
        let r0 = format!("2rec [_. U] 1 {lp} 0b");
        let r1 = format!("2rec [_. U] 1 {lp} 1b");
        let motive = format!("[b. 2rec [_. U] 1 {lp} b -> U]");
        let c0 = format!("(fun (t : {r0}) => {})", a(j));
        let c1 = format!(
            "(fun (t : {r1}) => {} (coe ({r1}) {lp} (2comp1 [_. U] 1 {lp}) t))",
            b(j + 1)
        );
        (lp, r0, r1, motive, c0, c1)
    };

    for j in (1..=k).rev() {
        if j == k {
            let _ = writeln!(o, "def {} (z : {}) : U := 1-elim [_. U] {} z\n", b(j), l(j), a(j));
        } else {
            let (_, _, _, motive, c0, c1) = cases(j);
            let _ = writeln!(
                o,
                "def {} (z : {}) : U :=\n  split [_. U] [b s. 2rec {motive}\n    {c0}\n    {c1}\n    b s] z\n",
                b(j),
                l(j)
            );
        }
    }

    for j in (1..=k).rev() {
        for i in j..=k {
            if j == k {
                let _ = writeln!(o, "def {} : {} := star\n", lab(j, i), l(j));
                let _ = writeln!(
                    o,
                    "def {} : Id U ({} {}) {} := 1comp [_. U] {}\n",
                    dom(j, i),
                    b(j),
                    lab(j, i),
                    a(i),
                    a(i)
                );
                continue;
            }
            let (lp, r0, r1, motive, c0, c1) = cases(j);
            if i == j {
                let s0 = format!("coe 1 ({r0}) (inv_u ({r0}) 1 (2comp0 [_. U] 1 {lp})) star");
                let _ = writeln!(o, "def {} : {} := (0b, {s0})\n", lab(j, i), l(j));
                let _ = writeln!(
                    o,
                    "def {} : Id U ({} {}) {} :=\n  happly_u ({r0}) (2rec {motive} {c0} {c1} 0b) {c0}\n    (2comp0 {motive} {c0} {c1})\n    ({s0})\n",
                    dom(j, i),
                    b(j),
                    lab(j, i),
                    a(i)
                );
            } else {
                let inner = lab(j + 1, i);
                let p1 = format!("(2comp1 [_. U] 1 {lp})");
                let s1 = format!("coe {lp} ({r1}) (inv_u ({r1}) {lp} {p1}) {inner}");
                let back = format!("coe ({r1}) {lp} {p1} ({s1})");
                let mid = format!("{} ({back})", b(j + 1));
                let _ = writeln!(o, "def {} : {} := (1b, {s1})\n", lab(j, i), l(j));
                let _ = writeln!(
                    o,
                    "def {} : Id U ({} {}) {} :=\n  concat_u ({} {}) ({mid}) {}\n    (happly_u ({r1}) (2rec {motive} {c0} {c1} 1b) {c1}\n       (2comp1 {motive} {c0} {c1})\n       ({s1}))\n    (concat_u ({mid}) ({} {inner}) {}\n       (ap_u {lp} {} ({back}) {inner} (coe_inv_r ({r1}) {lp} {p1} {inner}))\n       {})\n",
                    dom(j, i),
                    b(j),
                    lab(j, i),
                    a(i),
                    b(j),
                    lab(j, i),
                    a(i),
                    b(j + 1),
                    a(i),
                    b(j + 1),
                    dom(j + 1, i)
                );
            }
        }
    }

    if k == 0 {
        let _ = writeln!(o, "def {n}_L : U := 0\n");
        let _ = writeln!(o, "def {n}_B (x : {n}_L) : U := 0-elim [_. U] x\n");
    } else {
        let _ = writeln!(o, "def {n}_L : U := {}\n", l(1));
        let _ = writeln!(o, "def {n}_B (x : {n}_L) : U := {} x\n", b(1));
    }
    let _ = writeln!(o, "def {n} : U := W (x : {n}_L), {n}_B x\n");
    for (i, c) in spec.constructors.iter().enumerate() {
        let i = i + 1;
        let _ = writeln!(
            o,
            "def {n}_{} (f : {} -> {n}) : {n} :=\n  sup {} (fun (y : {n}_B {}) => f (coe ({n}_B {}) {} {} y))\n",
            c.name,
            a(i),
            lab(1, i),
            lab(1, i),
            lab(1, i),
            a(i),
            dom(1, i)
        );
    }
    let _ = writeln!(o, "def {n}_Alg (C : U) : U := PAlg {n}_L {n}_B C\n");
    let _ = writeln!(
        o,
        "def {n}_Hom (C : U) (sC : {n}_Alg C) (D : U) (sD : {n}_Alg D) : U := PHom {n}_L {n}_B C sC D sD\n"
    );
    let _ = writeln!(o, "def {n}_sup : {n}_Alg {n} := sW {n}_L {n}_B\n");
    let _ = writeln!(
        o,
        "def {n}_hinit (C : U) (sC : {n}_Alg C) : iscontr ({n}_Hom {n} {n}_sup C sC) :=\n  w_hinit_fwd {n}_L {n}_B C sC"
    );
    o
}

/// Check that every arity is a small type in the given environment and
/// that no generated name is already taken.
pub fn validate(spec: &SignatureSpec, session: &Session) -> Result<(), Failure> {
    let env = &session.env;
    let mut seen = HashSet::new();
    for name in generated_names(spec) {
        if !seen.insert(name.clone()) {
            return Err(Failure::Config(format!(
                "generated name `{name}` would be declared twice"
            )));
        }
        if env.contains(&name) {
            return Err(Failure::Config(format!(
                "generated name `{name}` clashes with the stdlib"
            )));
        }
    }
    for c in &spec.constructors {
        let bad = |why: String| Failure::Config(format!("arity of `{}` ({}): {why}", c.name, c.arity));
        let st = parse_term("<arity>", &c.arity).map_err(|d| bad(d.message.clone()))?;
        let t: Term = elaborate_term(&st, &[], &|x| env.contains(x)).map_err(|d| bad(d.message.clone()))?;
        Checker::new(env)
            .with_fuel(session.fuel)
            .check(&Context::new(), &t, &Term::univ())
            .map_err(|d| bad(d.message.clone()))?;
    }
    Ok(())
}

/// Find the stdlib: the option, `HW_STDLIB`, a `stdlib/` above the working
/// directory, then the copy next to the sources.
pub fn locate_stdlib(opts: &DeriveOptions) -> Result<PathBuf, Failure> {
    let mut candidates: Vec<PathBuf> = Vec::new();
    if let Some(p) = &opts.stdlib {
        candidates.push(p.clone());
    } else {
        if let Some(p) = std::env::var_os("HW_STDLIB") {
            candidates.push(PathBuf::from(p));
        }
        if let Ok(cwd) = std::env::current_dir() {
            candidates.extend(cwd.ancestors().map(|d| d.join("stdlib")));
        }
        candidates.push(Path::new(env!("CARGO_MANIFEST_DIR")).join("../../stdlib"));
    }
    candidates
        .into_iter()
        .find(|d| d.join("manifest.txt").is_file())
        .ok_or_else(|| Failure::Config("cannot find the stdlib (pass --stdlib DIR)".into()))
}

/// Load the stdlib in propositional mode.
pub fn stdlib_session(dir: &Path) -> Result<Session, Failure> {
    let mut s = Session::new(Mode::Propositional);
    s.check_manifest(&dir.join("manifest.txt"))?;
    Ok(s)
}

pub fn derive_file(spec_path: &Path, out: &Path, opts: &DeriveOptions) -> Result<(), Failure> {
    let text = fs::read_to_string(spec_path).map_err(|e| Failure::Config(format!("{}: {e}", spec_path.display())))?;
    let stem = spec_path.file_stem().and_then(|s| s.to_str()).unwrap_or("Sig");
    let spec = parse_spec(stem, &text)?;
    let session = stdlib_session(&locate_stdlib(opts)?)?;
    validate(&spec, &session)?;
    fs::write(out, render(&spec)).map_err(|e| Failure::Config(format!("{}: {e}", out.display())))
}
