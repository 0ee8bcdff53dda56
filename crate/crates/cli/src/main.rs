use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use towercf_cli::{error_exit_code, run_expand, run_suite, Format, Report, RunConfig, Suite, EXIT_USAGE};

#[derive(Parser)]
#[command(name = "towercf", version, about = "Nearest-point continued fractions and circular units over the real 2-power cyclotomic tower")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalArgs {
    /// Highest tower level n to verify.
    #[arg(long, global = true, default_value_t = 6)]
    max_level: u32,
    /// Starting working precision in bits for interval enclosures.
    #[arg(long, global = true, default_value_t = 256)]
    precision: u32,
    /// Precision ceiling in bits; certification gives up as undecided above it.
    #[arg(long, global = true, env = "TOWERCF_MAX_BITS", default_value_t = 8192)]
    max_bits: u32,
    /// Maximum number of partial quotients to compute.
    #[arg(long, global = true, default_value_t = 64)]
    max_terms: usize,
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Text)]
    format: FormatArg,
    /// Write the report to this file instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Stop at the first check that does not pass.
    #[arg(long, global = true)]
    fail_fast: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Pell,
    Kernel,
    Products,
    Analytic,
    Convergence,
    All,
}

#[derive(Subcommand)]
enum Command {
    /// Expand X_n (or --alpha) as a nearest-point continued fraction.
    Expand {
        #[arg(long)]
        n: u32,
        /// Element of B_n in canonical syntax, e.g. "X2^3 - 3*X2 + 1/2".
        #[arg(long, allow_hyphen_values = true)]
        alpha: Option<String>,
    },
    /// Run a verification suite for every level up to --max-level.
    Verify {
        #[arg(long, value_enum, default_value_t = SuiteArg::All)]
        suite: SuiteArg,
    },
    /// Same as `verify --suite pell`.
    VerifyPell,
    /// Same as `verify --suite kernel`.
    VerifyKernel,
    /// Same as `verify --suite products`.
    VerifyProducts,
    /// Same as `verify --suite analytic`.
    VerifyAnalytic,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE as u8 } else { 0 });
        }
    };
    let g = cli.global;
    let cfg = RunConfig {
        max_level: g.max_level,
        precision_bits: g.precision,
        max_bits: g.max_bits,
        max_terms: g.max_terms,
        format: match g.format {
            FormatArg::Json => Format::Json,
            FormatArg::Text => Format::Text,
        },
        output: g.output,
        fail_fast: g.fail_fast,
    };
    if let Err(e) = cfg.validate() {
        eprintln!("towercf: {e}");
        return ExitCode::from(EXIT_USAGE as u8);
    }
    let suite = |s: SuiteArg| match s {
        SuiteArg::Pell => Suite::Pell,
        SuiteArg::Kernel => Suite::Kernel,
        SuiteArg::Products => Suite::Products,
        SuiteArg::Analytic => Suite::Analytic,
        SuiteArg::Convergence => Suite::Convergence,
        SuiteArg::All => Suite::All,
    };
    let report = match cli.command {
        Command::Expand { n, alpha } => match run_expand(n, alpha.as_deref(), &cfg) {
            Ok(r) => r,
            Err(e) => {
                eprintln!("towercf: {e}");
                return ExitCode::from(error_exit_code(&e) as u8);
            }
        },
        Command::Verify { suite: s } => run_suite(suite(s), &cfg),
        Command::VerifyPell => run_suite(Suite::Pell, &cfg),
        Command::VerifyKernel => run_suite(Suite::Kernel, &cfg),
        Command::VerifyProducts => run_suite(Suite::Products, &cfg),
        Command::VerifyAnalytic => run_suite(Suite::Analytic, &cfg),
    };
    emit(&report, &cfg)
}

fn emit(report: &Report, cfg: &RunConfig) -> ExitCode {
    let body = report.render(cfg.format);
    match &cfg.output {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &body) {
                eprintln!("towercf: cannot write {}: {e}", path.display());
                return ExitCode::from(EXIT_USAGE as u8);
            }
            println!("{} checks, overall {:?}; report written to {}", report.checks.len(), report.overall, path.display());
        }
        None => print!("{body}{}", if body.ends_with('\n') { "" } else { "\n" }),
    }
    ExitCode::from(report.exit_code() as u8)
}
