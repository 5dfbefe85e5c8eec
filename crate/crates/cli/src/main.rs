use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use hw_cli::derive::{derive_file, DeriveOptions};
use hw_cli::emit::to_json_line;
use hw_cli::{with_big_stack, Failure, Session};
use hw_kernel::{Mode, DEFAULT_FUEL};

/// Proof checker for `.hw` files.
#[derive(Parser)]
#[command(name = "hw", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check `.hw` files or `.txt` manifests in order.
    Check {
        #[arg(long, default_value = "prop", value_parser = parse_mode)]
        mode: Mode,
        /// Reduction steps allowed per query.
        #[arg(long, default_value_t = DEFAULT_FUEL)]
        fuel: u64,
        #[arg(long, value_enum)]
        emit: Option<Emit>,
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Generate the W-type scaffold for a signature.
    Derive {
        spec: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
        /// Stdlib directory holding `manifest.txt`.
        #[arg(long)]
        stdlib: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Emit {
    Elaborated,
    Json,
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    Mode::parse(s).ok_or_else(|| format!("unknown mode `{s}` (expected strict or prop)"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = with_big_stack(move || run(cli));
    ExitCode::from(code as u8)
}

fn run(cli: Cli) -> i32 {
    match cli.cmd {
        Cmd::Check {
            mode,
            fuel,
            emit,
            files,
        } => {
            let mut s = Session::new(mode).with_fuel(fuel);
            if matches!(emit, Some(Emit::Elaborated)) {
                s = s.echo_to(Box::new(std::io::stdout()));
            }
            for f in &files {
                if let Err(e) = s.check_input(f) {
                    report(&e, matches!(emit, Some(Emit::Json)));
                    return e.exit_code();
                }
            }
            0
        }
        Cmd::Derive { spec, out, stdlib } => {
            let opts = DeriveOptions { stdlib };
            match derive_file(&spec, &out, &opts) {
                Ok(()) => 0,
                Err(e) => {
                    report(&e, false);
                    e.exit_code()
                }
            }
        }
    }
}

fn report(e: &Failure, json: bool) {
    match e {
        Failure::Check(d) if json => eprintln!("{}", to_json_line(d)),
        Failure::Check(d) => eprintln!("{d}"),
        Failure::Config(m) => eprintln!("error: {m}"),
    }
}
