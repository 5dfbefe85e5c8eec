//! Loading `.hw` files and manifests into one checked environment.

use std::collections::{HashMap, HashSet};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use hw_kernel::diag::{Diagnostic, ErrorCode, Span};
use hw_kernel::rules::check_declaration;
use hw_kernel::surface::{elaborate, parse, pretty};
use hw_kernel::{Env, Mode, Name, Node, DEFAULT_FUEL};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Failure {
    #[error("{0}")]
    Check(Box<Diagnostic>),
    #[error("{0}")]
    Config(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Check(_) => 1,
            Failure::Config(_) => 2,
        }
    }
}

impl From<Diagnostic> for Failure {
    fn from(d: Diagnostic) -> Self {
        Failure::Check(Box::new(d))
    }
}

/// One line of a manifest: a file and its tags.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ManifestEntry {
    pub file: PathBuf,
    pub strict_only: bool,
    /// Declarations of this file must not rely on function extensionality.
    pub no_funext: bool,
}

/// Parse manifest text; paths are taken relative to `base`.
pub fn parse_manifest(base: &Path, text: &str) -> Result<Vec<ManifestEntry>, Failure> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut words = line.split_whitespace();
        let file = words.next().unwrap_or_default();
        let mut e = ManifestEntry {
            file: base.join(file),
            strict_only: false,
            no_funext: false,
        };
        for tag in words {
            match tag {
                "both" => e.strict_only = false,
                "strict" => e.strict_only = true,
                "nofe" => e.no_funext = true,
                _ => return Err(Failure::Config(format!("manifest line {}: unknown tag `{tag}`", n + 1))),
            }
        }
        out.push(e);
    }
    Ok(out)
}

pub struct Session {
    pub env: Env,
    pub fuel: u64,
    loaded: HashSet<PathBuf>,
    stack: Vec<PathBuf>,
    names: HashMap<PathBuf, Vec<(Name, Span)>>,
    echo: Option<Box<dyn Write + Send>>,
}

impl Session {
    pub fn new(mode: Mode) -> Session {
        Session {
            env: Env::new(mode),
            fuel: DEFAULT_FUEL,
            loaded: HashSet::new(),
            stack: Vec::new(),
            names: HashMap::new(),
            echo: None,
        }
    }

    pub fn with_fuel(mut self, fuel: u64) -> Self {
        self.fuel = fuel;
        self
    }

    /// Print every declaration as it is accepted.
    pub fn echo_to(mut self, w: Box<dyn Write + Send>) -> Self {
        self.echo = Some(w);
        self
    }

    /// Check a `.hw` file or a `.txt` manifest.
    pub fn check_input(&mut self, path: &Path) -> Result<(), Failure> {
        if path.extension().is_some_and(|e| e == "txt") {
            self.check_manifest(path)
        } else {
            let canon = canonical(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
            self.load(&canon, None)
        }
    }

    pub fn check_manifest(&mut self, path: &Path) -> Result<(), Failure> {
        let text = fs::read_to_string(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        for entry in parse_manifest(base, &text)? {
            if entry.strict_only && self.env.mode() == Mode::Propositional {
                continue;
            }
            let canon =
                canonical(&entry.file).map_err(|e| Failure::Config(format!("{}: {e}", entry.file.display())))?;
            self.load(&canon, None)?;
            if entry.no_funext {
                self.lint_no_funext(&canon)?;
            }
        }
        Ok(())
    }

    /// Check `text` as if it were a file at `path`.
    pub fn check_source(&mut self, path: &Path, text: &str) -> Result<(), Failure> {
        self.check_text(path, text)
    }

    fn load(&mut self, path: &Path, from: Option<&Span>) -> Result<(), Failure> {
        if self.loaded.contains(path) {
            return Ok(());
        }
        if self.stack.iter().any(|p| p == path) {
            let chain: Vec<String> = self
                .stack
                .iter()
                .chain([&path.to_path_buf()])
                .map(|p| p.display().to_string())
                .collect();
            let d = Diagnostic::new(ErrorCode::ImportCycle, format!("import cycle: {}", chain.join(" -> ")));
            return Err(match from {
                Some(s) => d.at(s.clone()),
                None => d,
            }
            .into());
        }
        let text = match fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => {
                return Err(match from {
                    Some(s) => Diagnostic::new(
                        ErrorCode::ImportNotFound,
                        format!("cannot read `{}`: {e}", path.display()),
                    )
                    .at(s.clone())
                    .into(),
                    None => Failure::Config(format!("{}: {e}", path.display())),
                })
            }
        };
        self.stack.push(path.to_path_buf());
        let r = self.check_text(path, &text);
        self.stack.pop();
        r?;
        self.loaded.insert(path.to_path_buf());
        Ok(())
    }

    fn check_text(&mut self, path: &Path, text: &str) -> Result<(), Failure> {
        let module = parse(&path.display().to_string(), text)?;
        let dir = path.parent().unwrap_or(Path::new(".")).to_path_buf();
        for (name, span) in &module.imports {
            let target = dir.join(format!("{name}.hw"));
            let target = canonical(&target).unwrap_or(target);
            self.load(&target, Some(span))?;
        }
        let env = &self.env;
        let decls = elaborate(&module, &|x| env.contains(x))?;
        let mut mine = Vec::new();
        for d in &decls {
            check_declaration(&mut self.env, d, self.fuel)?;
            mine.push((d.name.clone(), d.span.clone()));
            if let Some(w) = self.echo.as_mut() {
                let decl = self.env.get(&d.name).expect("just inserted");
                let line = match &decl.body {
                    Some(b) => format!(
                        "def {} : {} :=\n  {}\n",
                        decl.name,
                        pretty(&decl.ty, &[]),
                        pretty(b, &[])
                    ),
                    None => format!("axiom {} : {}\n", decl.name, pretty(&decl.ty, &[])),
                };
                w.write_all(line.as_bytes())
                    .map_err(|e| Failure::Config(format!("writing output: {e}")))?;
            }
        }
        self.names.insert(path.to_path_buf(), mine);
        Ok(())
    }

    fn lint_no_funext(&self, path: &Path) -> Result<(), Failure> {
        let is_funext = |t: &hw_kernel::Term| matches!(t.node(), Node::AxFunExt(..));
        for (name, span) in self.names.get(path).into_iter().flatten() {
            if self.env.depends_on(&hw_kernel::Term::cnst(name), &is_funext) {
                return Err(Diagnostic::new(
                    ErrorCode::Lint,
                    format!("`{name}` depends on function extensionality in a file marked `nofe`"),
                )
                .at(span.clone())
                .into());
            }
        }
        Ok(())
    }

    /// Names declared by a loaded file, in order.
    pub fn declared_in(&self, path: &Path) -> Vec<Name> {
        let key = canonical(path).unwrap_or_else(|_| path.to_path_buf());
        self.names
            .get(&key)
            .map(|v| v.iter().map(|x| x.0.clone()).collect())
            .unwrap_or_default()
    }
}

fn canonical(p: &Path) -> std::io::Result<PathBuf> {
    fs::canonicalize(p)
}

/// Run `f` on a thread with a generous stack; deep terms recurse deeply.
pub fn with_big_stack<T: Send + 'static>(f: impl FnOnce() -> T + Send + 'static) -> T {
    std::thread::Builder::new()
        .stack_size(512 << 20)
        .spawn(f)
        .expect("spawn checker thread")
        .join()
        .unwrap_or_else(|e| std::panic::resume_unwind(e))
}
