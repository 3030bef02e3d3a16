use std::io::{ErrorKind, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gft_core::cli::{
    parse_criteria, parse_functions, parse_scan, parse_schwarz, run, Command, RunRequest, UsageError, EXIT_USAGE,
};

#[derive(Parser)]
#[command(name = "gft", version, about = "Check sufficient conditions for analytic function classes on the unit disk")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Scan a criterion's hypothesis functional against its bound.
    Check(Inputs),
    /// Check membership in C(α), S*(α) or STS(μ).
    Conclusion(Inputs),
    /// Check hypothesis and conclusion together.
    Implication(Inputs),
    /// Probe Jack's lemma for a Schwarz function on |z| = r.
    Jack(Inputs),
    /// Sweep a function corpus (random when --function is absent).
    Corpus(Inputs),
    /// Dump a quantity on a polar grid as CSV.
    Grid(Inputs),
}

#[derive(Args)]
struct Inputs {
    /// Function document (file or inline JSON); an array for `corpus`.
    #[arg(long)]
    function: Option<String>,
    /// Criterion document, array, or bare selector name such as `reG`.
    #[arg(long)]
    criterion: Option<String>,
    /// Class document, e.g. {"kind":"memb_Sstar","alpha":0}.
    #[arg(long)]
    class: Option<String>,
    /// Schwarz function document {"coeffs":[[re,im],...]}.
    #[arg(long)]
    w: Option<String>,
    #[arg(long)]
    r: Option<f64>,
    /// Scan configuration document.
    #[arg(long)]
    scan: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    count: Option<usize>,
    #[arg(long)]
    rho: Option<f64>,
    /// Output path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn request(command: Command, i: &Inputs) -> Result<RunRequest, UsageError> {
    let mut req = RunRequest::new(command);
    if let Some(f) = &i.function {
        req.functions = parse_functions(f)?;
    }
    if let Some(c) = &i.criterion {
        req.criteria = parse_criteria(c)?;
    }
    if let Some(c) = &i.class {
        req.class = parse_criteria(c)?.into_iter().next();
    }
    if let Some(w) = &i.w {
        req.w = Some(parse_schwarz(w)?);
    }
    if let Some(s) = &i.scan {
        req.scan = parse_scan(s)?;
    }
    req.r = i.r;
    req.seed = i.seed;
    req.count = i.count;
    req.rho = i.rho;
    Ok(req)
}

fn configure_threads() -> Result<(), UsageError> {
    let Ok(v) = std::env::var("GFT_SCAN_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .map_err(|_| UsageError(format!("GFT_SCAN_THREADS={v:?} is not a thread count")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| UsageError(e.to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, inputs) = match &cli.command {
        Sub::Check(i) => (Command::Check, i),
        Sub::Conclusion(i) => (Command::Conclusion, i),
        Sub::Implication(i) => (Command::Implication, i),
        Sub::Jack(i) => (Command::Jack, i),
        Sub::Corpus(i) => (Command::Corpus, i),
        Sub::Grid(i) => (Command::Grid, i),
    };
    let result = configure_threads().and_then(|_| request(command, inputs)).and_then(|req| run(&req));
    let outcome = match result {
        Ok(o) => o,
        Err(e) => {
            eprintln!("gft: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let text = outcome.artifact.text();
    match &inputs.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text) {
                eprintln!("gft: {}: {e}", path.display());
                return ExitCode::from(EXIT_USAGE);
            }
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            if let Err(e) = writeln!(stdout, "{text}") {
                if e.kind() != ErrorKind::BrokenPipe {
                    eprintln!("gft: stdout: {e}");
                    return ExitCode::from(EXIT_USAGE);
                }
            }
        }
    }
    ExitCode::from(outcome.status)
}
