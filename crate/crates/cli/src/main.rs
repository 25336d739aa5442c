use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use oscavg_cli::{commands, CliError, Format, Grid, Output};
use oscavg_core::oracle::{Verdict, VerifySettings};
use oscavg_core::Rational;

/// Averaging transforms and asymptotics for linear systems with oscillatory decreasing coefficients.
#[derive(Debug, Parser)]
#[command(name = "oscavg", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Average a system read from a JSON file and predict its asymptotics.
    Analyze {
        #[arg(long, value_name = "FILE")]
        system: PathBuf,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Analyze y'' + (1 + t^-α sin λt) y = 0.
    Oscillator {
        #[command(flatten)]
        case: CaseArgs,
        /// Also integrate directly and compare with the prediction.
        #[arg(long)]
        verify: bool,
        #[command(flatten)]
        oracle: OracleArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Classify every cell of a (λ, α) grid.
    Sweep {
        /// `<λ axis>;<α axis>`, each `lo:hi:steps` or a comma list.
        #[arg(long, value_name = "SPEC", allow_hyphen_values = true)]
        grid: String,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Predict, integrate and compare; exits with 3 when the prediction is rejected.
    Verify {
        #[command(flatten)]
        case: CaseArgs,
        #[command(flatten)]
        oracle: OracleArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Debug, Args)]
struct CaseArgs {
    #[arg(long, value_name = "P/Q", allow_hyphen_values = true)]
    lambda: Rational,
    #[arg(long, value_name = "P/Q")]
    alpha: Rational,
}

#[derive(Debug, Args)]
struct OracleArgs {
    #[arg(long, default_value_t = 1e-10)]
    rtol: f64,
    #[arg(long, default_value_t = 1e-12)]
    atol: f64,
    /// End of integration; chosen from the predicted model when omitted.
    #[arg(long)]
    horizon: Option<f64>,
}

impl OracleArgs {
    fn settings(&self) -> Result<VerifySettings, CliError> {
        let d = VerifySettings::default();
        if !(self.rtol > 0.0 && self.atol > 0.0) {
            return Err(CliError::Usage("--rtol and --atol must be positive".into()));
        }
        if let Some(h) = self.horizon {
            if !(h > d.t0) {
                return Err(CliError::Usage(format!("--horizon must exceed the start time {}", d.t0)));
            }
        }
        Ok(VerifySettings { rtol: self.rtol, atol: self.atol, horizon: self.horizon, ..d })
    }
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// Directory for report files; the report goes to stdout otherwise.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    #[arg(long, value_enum, value_delimiter = ',', default_values = ["json", "csv"])]
    format: Vec<Format>,
}

impl OutputArgs {
    fn output(&self) -> Output {
        Output { dir: self.out.clone(), formats: self.format.clone() }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Analyze { system, output } => commands::analyze(&system, &output.output()).map(drop),
        Command::Oscillator { case, verify, oracle, output } => {
            let settings = verify.then(|| oracle.settings()).transpose()?;
            commands::oscillator(&case.lambda, &case.alpha, settings.as_ref(), &output.output()).map(drop)
        }
        Command::Sweep { grid, output } => {
            let grid = Grid::parse(&grid)?;
            commands::sweep(&grid, &output.output()).map(drop)
        }
        Command::Verify { case, oracle, output } => {
            let settings = oracle.settings()?;
            let report = commands::oscillator(&case.lambda, &case.alpha, Some(&settings), &output.output())?;
            if let Some(v) = report.verification.filter(|v| v.verdict == Verdict::Inconclusive) {
                eprintln!("warning: verification inconclusive over window {:?}", v.window);
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
