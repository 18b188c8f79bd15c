mod analyze;
mod grid;
mod output;
mod presets;
mod regress;
mod sweep;
mod tradeoff;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::grid::GridSpec;

/// Steady states of two-qubit thermal machines and their operational nonclassicality.
///
/// All energies and temperatures are in units of the qubit gap E = 1, with ħ = k_B = 1.
/// Couplings are given relative to γA.
#[derive(Parser, Debug)]
#[command(name = "qtm", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Full nonclassicality report of one steady state, as JSON.
    Analyze {
        /// Machine parameters as JSON.
        #[arg(long)]
        params: PathBuf,
        /// Use this closed-form model instead of the Liouvillian kernel.
        #[arg(long)]
        model: Option<String>,
        /// Largest measurement set tried by the steerability classifier.
        #[arg(long, default_value_t = 16)]
        max_settings: usize,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Verdicts and functionals on a grid of couplings, as CSV.
    Sweep {
        #[arg(long, required_unless_present = "preset")]
        model: Option<String>,
        /// Axes g, gammaB and TA, e.g. `g=0.05:1:20,gammaB=0.5:20:40`.
        #[arg(long, required_unless_present = "preset")]
        grid: Option<GridSpec>,
        /// fig2, fig3a, fig3b or fig3c; explicit --model and --grid override it.
        #[arg(long)]
        preset: Option<String>,
        /// Column groups: state, functionals, nogo, qstar, verdict.
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "state,functionals,nogo,qstar,verdict"
        )]
        outputs: Vec<String>,
        #[arg(long, default_value_t = 16)]
        max_settings: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Optimal nonclassicality against heralding efficiency, as CSV.
    Tradeoff {
        #[arg(long, required_unless_present = "preset")]
        model: Option<String>,
        /// SingletFraction, Chsh or SteeringRobustness.
        #[arg(long, required_unless_present = "preset")]
        objective: Option<String>,
        /// Efficiency axis, e.g. `p=0.001:1:20:log`.
        #[arg(long, required_unless_present = "preset")]
        pgrid: Option<GridSpec>,
        /// both or b; defaults to the model's usual scope.
        #[arg(long)]
        scope: Option<String>,
        /// fig4, fig5-left or fig5-right. With --objective only curves of that objective run.
        #[arg(long)]
        preset: Option<String>,
        #[arg(long)]
        seed: u64,
        /// Random starts before local refinement.
        #[arg(long)]
        samples: Option<usize>,
        /// Starts refined by the simplex search.
        #[arg(long)]
        restarts: Option<usize>,
        /// Evaluation budget of each simplex run.
        #[arg(long)]
        max_evals: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the acceptance checks; nonzero exit if any fails.
    Regress {
        /// Machine-readable summary.
        #[arg(long)]
        json: Option<PathBuf>,
        /// Run only these criteria.
        #[arg(long, value_delimiter = ',')]
        only: Vec<u8>,
    },
}

/// Failure classes, one per exit code.
#[derive(Debug)]
pub enum CliError {
    Regression(String),
    BadInput(String),
    Stalled(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Regression(_) => 1,
            CliError::BadInput(_) => 2,
            CliError::Stalled(_) => 3,
        }
    }
}

impl From<qtm_core::Error> for CliError {
    fn from(e: qtm_core::Error) -> Self {
        match e {
            qtm_core::Error::SolverStalled { .. } => CliError::Stalled(e.to_string()),
            _ => CliError::BadInput(e.to_string()),
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Regression(m) | CliError::BadInput(m) | CliError::Stalled(m) => {
                f.write_str(m)
            }
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Analyze {
            params,
            model,
            max_settings,
            out,
        } => analyze::run(&params, model.as_deref(), max_settings, out.as_deref()),
        Command::Sweep {
            model,
            grid,
            preset,
            outputs,
            max_settings,
            out,
        } => {
            let cfg = sweep::SweepConfig::resolve(
                preset.as_deref(),
                model.as_deref(),
                grid,
                &outputs,
                max_settings,
            )?;
            sweep::run(&cfg, &out)
        }
        Command::Tradeoff {
            model,
            objective,
            pgrid,
            scope,
            preset,
            seed,
            samples,
            restarts,
            max_evals,
            out,
        } => {
            let cfg = tradeoff::TradeoffConfig::resolve(tradeoff::Request {
                preset: preset.as_deref(),
                model: model.as_deref(),
                objective: objective.as_deref(),
                pgrid,
                scope: scope.as_deref(),
                seed,
                samples,
                restarts,
                max_evals,
            })?;
            tradeoff::run(&cfg, &out)
        }
        Command::Regress { json, only } => regress::run(&only, json.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qtm: {e}");
            ExitCode::from(e.code())
        }
    }
}
