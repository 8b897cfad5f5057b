mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nib_symmetry::detsys::NumericOptions;

use output::{CliError, Format, Sink};

#[derive(Parser, Debug)]
#[command(name = "nibsym", version, about = "Symmetry and classification toolkit for u_t + g(x,u) u_x = f(x,u)")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Md, global = true)]
    format: Format,
    /// Write the report to this file.
    #[arg(long, short, global = true)]
    out: Option<PathBuf>,
    /// Directory for reports when --out is not given.
    #[arg(long, env = "NIBSYM_OUT_DIR", global = true)]
    out_dir: Option<PathBuf>,
    #[arg(long, default_value_t = 100, global = true)]
    samples: usize,
    #[arg(long, default_value_t = 2024, global = true)]
    seed: u64,
    /// Numeric residual tolerance.
    #[arg(long, default_value_t = 1e-9, global = true)]
    tol: f64,
}

impl Common {
    fn numeric(&self) -> NumericOptions {
        NumericOptions {
            samples: self.samples,
            seed: self.seed,
            tol: self.tol,
        }
    }
}

/// An equation given inline or as an EquationSpec JSON file.
#[derive(Args, Debug, Clone)]
pub struct EquationArgs {
    #[arg(long, allow_hyphen_values = true)]
    f: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    g: Option<String>,
    /// EquationSpec JSON file.
    #[arg(long, conflicts_with_all = ["f", "g"])]
    spec: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Determining equations of an equation (opaque f, g by default).
    Detsys {
        #[command(flatten)]
        eq: EquationArgs,
        /// Compare the generic system with the printed equations.
        #[arg(long)]
        compare_paper: bool,
    },
    /// Checks whether a vector field is a point symmetry.
    Verify {
        #[command(flatten)]
        eq: EquationArgs,
        /// Vector field JSON, or @path to a file holding it.
        #[arg(long)]
        vf: String,
    },
    /// Lie bracket of two vector fields.
    Bracket {
        /// Vector field JSON or @path.
        #[arg(long)]
        v: String,
        /// Vector field JSON or @path.
        #[arg(long)]
        w: String,
    },
    /// Commutator and adjoint tables.
    Table {
        #[command(subcommand)]
        kind: TableCommand,
    },
    /// The optimal system of one-dimensional subalgebras.
    OptimalSystem {
        #[command(subcommand)]
        action: OptimalCommand,
    },
    /// Classification table checks.
    Classify {
        #[command(subcommand)]
        action: ClassifyCommand,
    },
    /// Numeric corroboration: derivative corpus and sampled residuals.
    Numcheck {
        #[command(flatten)]
        eq: EquationArgs,
        /// Sample the residual of this field instead of running the corpus.
        #[arg(long)]
        vf: Option<String>,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Algebra {
    L10,
    Ibe,
    Equiv,
}

#[derive(Subcommand, Debug)]
enum TableCommand {
    Commutators {
        #[arg(long, value_enum)]
        algebra: Algebra,
        #[arg(long)]
        compare_paper: bool,
    },
    Adjoint {
        #[arg(long, value_enum, default_value_t = Algebra::L10)]
        algebra: Algebra,
        #[arg(long)]
        compare_paper: bool,
    },
}

#[derive(Subcommand, Debug)]
enum OptimalCommand {
    List,
    /// Replays the bundled reduction scripts.
    Replay {
        /// Only this script.
        #[arg(long)]
        case: Option<String>,
    },
}

#[derive(Subcommand, Debug)]
enum ClassifyCommand {
    Report,
    Row { n: u32 },
}

fn run(cli: &Cli) -> Result<bool, CliError> {
    let opts = cli.common.numeric();
    let report = match &cli.command {
        Command::Detsys { eq, compare_paper } => commands::detsys(eq, *compare_paper)?,
        Command::Verify { eq, vf } => commands::verify(eq, vf, &opts)?,
        Command::Bracket { v, w } => commands::bracket(v, w)?,
        Command::Table { kind } => match kind {
            TableCommand::Commutators { algebra, compare_paper } => commands::commutators(*algebra, *compare_paper)?,
            TableCommand::Adjoint { algebra, compare_paper } => commands::adjoint(*algebra, *compare_paper)?,
        },
        Command::OptimalSystem { action } => match action {
            OptimalCommand::List => commands::optimal_list(),
            OptimalCommand::Replay { case } => commands::replay(case.as_deref())?,
        },
        Command::Classify { action } => match action {
            ClassifyCommand::Report => commands::classify_report(&opts)?,
            ClassifyCommand::Row { n } => commands::classify_row(*n, &opts)?,
        },
        Command::Numcheck { eq, vf } => commands::numcheck(eq, vf.as_deref(), &opts)?,
    };
    let sink = Sink::resolve(cli.common.out.as_deref(), cli.common.out_dir.as_deref(), &report.name, cli.common.format);
    sink.emit(&report, cli.common.format)?;
    Ok(report.pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
