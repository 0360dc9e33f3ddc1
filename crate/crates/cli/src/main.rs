mod commands;

use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use commands::{CliError, Output};

#[derive(Parser, Debug)]
#[command(name = "torelli", version, about = "Exact computations for the Johnson and Lagrangian filtrations")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Report wall-clock time (makes output run-dependent).
    #[arg(long, global = true)]
    timing: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Lyndon basis of L_k on 2g letters and the Witt dimension.
    Basis { g: usize, k: usize },
    /// Rank and basis of the derivation lattice D_k(H_g).
    Dk { g: usize, k: usize },
    /// Elementary divisors of D_k(H_g) / Im eta.
    EtaImage { g: usize, k: usize },
    /// Bracket decomposition of a y-decorated tree.
    Decompose {
        #[arg(long)]
        tree: String,
        #[arg(long)]
        g: usize,
    },
    /// Johnson homomorphism J_k.
    Johnson(EndoArgs),
    /// Lagrangian homomorphism J_k^L.
    Lagrangian(EndoArgs),
    /// Johnson and Lagrangian membership reports.
    Membership {
        #[command(flatten)]
        endo: EndoArgs,
        /// Which filtration to test.
        #[arg(long, value_enum, default_value_t = Which::Both)]
        filtration: Which,
    },
    /// Morita trace of J_k.
    Trace(EndoArgs),
    /// Heegaard gluing presentation and first-homology certificate.
    Heegaard {
        /// Endomorphism JSON file or catalog expression.
        #[arg(long)]
        endo: String,
        /// Genus for catalog expressions.
        #[arg(long)]
        g: Option<usize>,
    },
    /// Named automorphisms of genus g.
    Catalog { g: usize },
    /// Search compositions of catalog entries lying in the Lagrangian filtration.
    Discover {
        #[arg(long, default_value_t = 2)]
        g: usize,
        /// Comma-separated catalog names (default: every boundary-fixing entry).
        #[arg(long, value_delimiter = ',')]
        entries: Vec<String>,
        #[arg(long, default_value_t = 2)]
        max_length: usize,
        #[arg(long, default_value_t = 2)]
        k: usize,
        /// Keep only hits with a nonzero value.
        #[arg(long)]
        nonzero: bool,
    },
    /// Runs the acceptance suite.
    Selftest {
        #[arg(long, default_value_t = torelli_core::acceptance::DEFAULT_SEED)]
        seed: u64,
    },
}

#[derive(clap::Args, Debug)]
struct EndoArgs {
    /// Endomorphism JSON file or catalog expression such as `twist_x1 * sep_twist_2^-1`.
    #[arg(long)]
    endo: String,
    #[arg(long)]
    k: usize,
    /// Genus for catalog expressions.
    #[arg(long)]
    g: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Which {
    J,
    L,
    Both,
}

fn dispatch(cmd: &Command) -> Result<Output, CliError> {
    match cmd {
        Command::Basis { g, k } => commands::basis(*g, *k),
        Command::Dk { g, k } => commands::dk(*g, *k),
        Command::EtaImage { g, k } => commands::eta_image(*g, *k),
        Command::Decompose { tree, g } => commands::decompose(tree, *g),
        Command::Johnson(a) => commands::johnson(&a.endo, a.g, a.k),
        Command::Lagrangian(a) => commands::lagrangian(&a.endo, a.g, a.k),
        Command::Membership { endo, filtration } => {
            let (j, l) = match filtration {
                Which::J => (true, false),
                Which::L => (false, true),
                Which::Both => (true, true),
            };
            commands::membership(&endo.endo, endo.g, endo.k, j, l)
        }
        Command::Trace(a) => commands::trace(&a.endo, a.g, a.k),
        Command::Heegaard { endo, g } => commands::heegaard(endo, *g),
        Command::Catalog { g } => commands::catalog(*g),
        Command::Discover { g, entries, max_length, k, nonzero } => {
            commands::discover(*g, entries, *max_length, *k, *nonzero)
        }
        Command::Selftest { seed } => commands::selftest(*seed),
    }
}

fn emit(format: Format, command: &str, params: &Value, payload: &Value, text: &str, timing: Option<f64>) {
    let mut out = std::io::stdout().lock();
    match format {
        Format::Json => {
            let mut obj = json!({ "command": command, "params": params, "payload": payload });
            if let Some(ms) = timing {
                obj["timing_ms"] = json!(ms);
            }
            let _ = writeln!(out, "{}", serde_json::to_string_pretty(&obj).unwrap());
        }
        Format::Text => {
            let _ = write!(out, "{text}");
            if !text.is_empty() && !text.ends_with('\n') {
                let _ = writeln!(out);
            }
            if let Some(ms) = timing {
                let _ = writeln!(out, "time: {ms:.1} ms");
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 64,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let start = Instant::now();
    let result = dispatch(&cli.command);
    let timing = cli.timing.then(|| start.elapsed().as_secs_f64() * 1000.0);
    match result {
        Ok(o) => {
            emit(cli.format, &o.command, &o.params, &o.payload, &o.text, timing);
            ExitCode::from(o.exit)
        }
        Err(e) => {
            eprintln!("error: {}", e.message);
            if let Some(p) = &e.payload {
                let text = commands::report_text(p);
                emit(cli.format, &e.command, &e.params, p, &text, timing);
            }
            ExitCode::from(e.code)
        }
    }
}
