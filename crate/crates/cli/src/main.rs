//! `dso`: solve, sweep and inspect the two-stage DSO scheduling model.

mod input;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dso_core::instance::CaseMode;
use dso_core::pricing::{run_case, sweep_cases, SweepMode};
use dso_core::solver::SolverOptions;
use dso_core::Error;

#[derive(Parser, Debug)]
#[command(name = "dso", version, about = "Two-stage DSO day-ahead scheduling and D-LMP settlement")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve one case and write solution, LMP and settlement CSVs.
    Run {
        #[command(flatten)]
        source: SourceArgs,
        #[command(flatten)]
        tol: TolArgs,
        /// Output directory, created if missing.
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Also write the model as free MPS (`model.mps`).
        #[arg(long)]
        export_lp: bool,
    },
    /// Solve one case per real-time price multiplier and write `sweep.csv`.
    Sweep {
        #[command(flatten)]
        source: SourceArgs,
        #[command(flatten)]
        tol: TolArgs,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Multipliers as an inclusive integer range `a..b` or a comma list.
        #[arg(long, default_value = "1..25")]
        sweep: String,
        #[arg(long, value_enum, default_value_t = SweepArg::RtPremium)]
        sweep_mode: SweepArg,
    },
    /// Print the scenario table, model size and parameter provenance.
    Inspect {
        #[command(flatten)]
        source: SourceArgs,
    },
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct SourceSelect {
    /// Built-in five-bus case.
    #[arg(long, value_enum)]
    builtin: Option<ModeArg>,
    /// Instance document (TOML).
    #[arg(long)]
    instance: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SourceArgs {
    #[command(flatten)]
    select: SourceSelect,
    /// Scenario set for an instance file without a `[[scenarios]]` section.
    #[arg(long, value_enum)]
    scenario_mode: Option<ModeArg>,
}

#[derive(Args, Debug)]
struct TolArgs {
    /// Primal feasibility tolerance.
    #[arg(long)]
    tol_feas: Option<f64>,
    /// Reduced-cost optimality tolerance.
    #[arg(long)]
    tol_opt: Option<f64>,
    /// Integrality tolerance.
    #[arg(long)]
    tol_int: Option<f64>,
    /// Absolute branch-and-bound gap.
    #[arg(long)]
    tol_gap: Option<f64>,
}

impl TolArgs {
    fn options(&self) -> Result<SolverOptions, Error> {
        let mut o = SolverOptions::default();
        for (name, value, slot) in [
            ("tol-feas", self.tol_feas, &mut o.feas_tol),
            ("tol-opt", self.tol_opt, &mut o.opt_tol),
            ("tol-int", self.tol_int, &mut o.int_tol),
            ("tol-gap", self.tol_gap, &mut o.gap_tol),
        ] {
            if let Some(v) = value {
                if !(v.is_finite() && v > 0.0) {
                    return Err(Error::InvalidArgument(format!("--{name} must be positive, got {v}")));
                }
                *slot = v;
            }
        }
        Ok(o)
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Deterministic,
    SingleUncertainty,
    MultiUncertainty,
}

impl From<ModeArg> for CaseMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Deterministic => CaseMode::Deterministic,
            ModeArg::SingleUncertainty => CaseMode::SingleUncertainty,
            ModeArg::MultiUncertainty => CaseMode::MultiUncertainty,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
#[value(rename_all = "snake_case")]
enum SweepArg {
    RtPremium,
    Spread,
}

impl From<SweepArg> for SweepMode {
    fn from(m: SweepArg) -> Self {
        match m {
            SweepArg::RtPremium => SweepMode::RtPremium,
            SweepArg::Spread => SweepMode::Spread,
        }
    }
}

/// Exit status for a failed command.
fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Infeasible { .. } => 2,
        Error::NumericalBreakdown(_) | Error::Unbounded => 3,
        Error::Sweep { source, .. } => exit_code(source),
        _ => 1,
    }
}

fn parse_multipliers(spec: &str) -> Result<Vec<f64>, Error> {
    let bad = || Error::InvalidArgument(format!("cannot parse sweep multipliers `{spec}`"));
    let values: Vec<f64> = if let Some((a, b)) = spec.split_once("..") {
        let a: i64 = a.trim().parse().map_err(|_| bad())?;
        let b: i64 = b.trim().parse().map_err(|_| bad())?;
        if b < a {
            return Err(bad());
        }
        (a..=b).map(|i| i as f64).collect()
    } else {
        spec.split(',')
            .map(|s| s.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<Result<_, _>>()?
    };
    if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
        return Err(Error::InvalidArgument(format!("sweep multiplier must be positive, got {v}")));
    }
    Ok(values)
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Run {
            source,
            tol,
            out,
            export_lp,
        } => {
            let opts = tol.options()?;
            let input = input::load(&source)?;
            let start = Instant::now();
            let case = run_case(&input.instance, &input.scenarios, &opts)?;
            let elapsed = start.elapsed();
            output::write_run(&out, &input, &case, &opts, export_lp)?;
            println!(
                "{}: objective {:.6}, {} scenarios, {} nodes, {:.2}s; wrote {}",
                input.label,
                case.milp.objective,
                input.scenarios.len(),
                case.milp.nodes,
                elapsed.as_secs_f64(),
                out.display()
            );
            Ok(())
        }
        Command::Sweep {
            source,
            tol,
            out,
            sweep,
            sweep_mode,
        } => {
            let opts = tol.options()?;
            let multipliers = parse_multipliers(&sweep)?;
            let input = input::load(&source)?;
            let mode = SweepMode::from(sweep_mode);
            let start = Instant::now();
            let cases = sweep_cases(&input.instance, &input.scenarios, &multipliers, mode, &opts)?;
            let elapsed = start.elapsed();
            let first_err = output::write_sweep(&out, &input, mode, &multipliers, cases, &opts)?;
            println!(
                "{}: {} sweep over {} multipliers in {:.1}s; wrote {}",
                input.label,
                mode,
                multipliers.len(),
                elapsed.as_secs_f64(),
                out.join("sweep.csv").display()
            );
            match first_err {
                Some(e) => Err(e),
                None => Ok(()),
            }
        }
        Command::Inspect { source } => {
            let input = input::load(&source)?;
            print!("{}", output::inspect(&input)?);
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
            ExitCode::from(exit_code(&e))
        }
    }
}
