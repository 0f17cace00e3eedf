use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use bloch_scope::report::{execute, Command, RunConfig};
use bloch_scope::{Error, Result};

/// Numerical estimates of weighted Bloch norms and essential norms of
/// composition operators on the unit disk.
#[derive(Parser, Debug)]
#[command(name = "bloch-scope", version)]
struct Cli {
    #[command(subcommand)]
    command: CliCommand,
}

#[derive(Subcommand, Debug)]
enum CliCommand {
    /// ‖f‖ = |f(0)| + sup μ|f'| for the symbol read as a function.
    Norm(RunArgs),
    /// Boundary scan and essential-norm bounds for C_φ: B^α → B^μ.
    Essential(RunArgs),
    /// σ_a scan, power criterion and automorphism scan side by side.
    Compare(RunArgs),
    /// Per-cell scan values for plotting.
    ScanDump(RunArgs),
    /// Run the built-in property suite.
    Selfcheck(RunArgs),
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Flat key = value configuration file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    symbol: Option<String>,
    #[arg(long)]
    alpha: Option<String>,
    /// Shorthand for --weight valpha:<beta>.
    #[arg(long)]
    beta: Option<String>,
    /// valpha:<a>, log, custom:<path>, optionally prefixed by <c>*.
    #[arg(long)]
    weight: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv or json.
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    depth: Option<String>,
    #[arg(long)]
    eps_boundary: Option<String>,
    #[arg(long)]
    angles: Option<String>,
    #[arg(long)]
    k_max: Option<String>,
    #[arg(long)]
    j_max: Option<String>,
    /// Any configuration key, as KEY=VALUE; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

impl RunArgs {
    fn into_config(self) -> Result<RunConfig> {
        let mut config = match &self.config {
            Some(path) => RunConfig::from_file(path)?,
            None => RunConfig::default(),
        };
        let named = [
            ("symbol", self.symbol),
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("weight", self.weight),
            ("format", self.format),
            ("out", self.out.map(|p| p.display().to_string())),
            ("depth", self.depth),
            ("eps_boundary", self.eps_boundary),
            ("angles", self.angles),
            ("k_max", self.k_max),
            ("j_max", self.j_max),
        ];
        for (key, value) in named {
            if let Some(v) = value {
                config.set(key, &v)?;
            }
        }
        for pair in &self.set {
            let (k, v) = pair
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("--set expects KEY=VALUE, got '{pair}'")))?;
            config.set(k, v)?;
        }
        Ok(config)
    }
}

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var("BLOCH_SCOPE_THREADS") else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        Error::Config(format!(
            "BLOCH_SCOPE_THREADS must be a positive integer, got '{raw}'"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::Config(format!("cannot configure thread pool: {e}")))
}

fn run(cli: Cli) -> Result<bool> {
    let (command, args) = match cli.command {
        CliCommand::Norm(a) => (Command::Norm, a),
        CliCommand::Essential(a) => (Command::Essential, a),
        CliCommand::Compare(a) => (Command::Compare, a),
        CliCommand::ScanDump(a) => (Command::ScanDump, a),
        CliCommand::Selfcheck(a) => (Command::Selfcheck, a),
    };
    let config = args.into_config()?;
    let resolved = config.resolve(command)?;
    configure_threads()?;
    let report = execute(&resolved)?;
    report.emit(config.format, config.out.as_deref())?;
    Ok(!report.failed())
}

fn diagnose(err: &Error, symbol: Option<&str>) {
    eprintln!("error: {err}");
    if let (Error::Syntax { position, .. }, Some(text)) = (err, symbol) {
        eprintln!("  {text}");
        eprintln!("  {}^", " ".repeat(*position));
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let symbol = match &cli.command {
        CliCommand::Norm(a)
        | CliCommand::Essential(a)
        | CliCommand::Compare(a)
        | CliCommand::ScanDump(a)
        | CliCommand::Selfcheck(a) => a.symbol.clone(),
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("error: selfcheck reported failures");
            ExitCode::from(5)
        }
        Err(err) => {
            diagnose(&err, symbol.as_deref());
            ExitCode::from(err.exit_code())
        }
    }
}
