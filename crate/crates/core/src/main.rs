use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

use stiffkit::report::{
    cmd_analyze, cmd_deflect, cmd_stiff, cmd_validate, parse_wrench, CliFailure, ModelSelector,
    OutputFormat, StewartFlags, DEFAULT_RANK_TOL,
};

/// Cartesian stiffness analysis of serial elastic chains and parallel
/// manipulators with passive joints.
#[derive(Parser)]
#[command(name = "stiffkit", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum, Default)]
enum FormatArg {
    #[default]
    Pretty,
    Csv,
    Json,
}

impl From<FormatArg> for OutputFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Pretty => OutputFormat::Pretty,
            FormatArg::Csv => OutputFormat::Csv,
            FormatArg::Json => OutputFormat::Json,
        }
    }
}

#[derive(Args)]
struct ModelArgs {
    /// Built-in model (stewart-a, stewart-b, demo-2d, single-beam) or a
    /// path to a JSON model file
    #[arg(long)]
    model: String,
    /// Platform joint radius for the built-in Stewart models
    #[arg(long, default_value_t = 0.2)]
    r: f64,
    /// Base joint radius for the built-in Stewart models
    #[arg(long = "R", default_value_t = 0.5)]
    big_r: f64,
    /// Platform height for the built-in Stewart models
    #[arg(long, default_value_t = 1.0)]
    h: f64,
    /// Axial leg stiffness for the built-in Stewart models
    #[arg(long, default_value_t = 1e6)]
    k11: f64,
    /// Output format
    #[arg(long, value_enum, default_value_t = FormatArg::Pretty)]
    format: FormatArg,
    /// Relative eigenvalue threshold for rank decisions
    #[arg(long, default_value_t = DEFAULT_RANK_TOL)]
    tol: f64,
}

impl ModelArgs {
    fn selector(&self) -> ModelSelector {
        ModelSelector::parse(&self.model)
    }

    fn flags(&self) -> StewartFlags {
        StewartFlags {
            platform_radius: self.r,
            base_radius: self.big_r,
            height: self.h,
            k11: self.k11,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Compute the Cartesian stiffness matrix of a model
    Stiff(ModelArgs),
    /// Solve the force-deflection relation of a model for a wrench
    Deflect {
        #[command(flatten)]
        model: ModelArgs,
        /// Applied wrench as fx,fy,fz,mx,my,mz
        #[arg(long)]
        wrench: String,
    },
    /// Spectral report (eigenvalues, rank, null space) for a matrix file
    Analyze {
        /// Path to a matrix file (JSON 2D array or comma-separated rows)
        #[arg(long)]
        matrix: PathBuf,
        /// Output format
        #[arg(long, value_enum, default_value_t = FormatArg::Pretty)]
        format: FormatArg,
        /// Relative eigenvalue threshold for rank decisions
        #[arg(long, default_value_t = DEFAULT_RANK_TOL)]
        tol: f64,
    },
    /// Cross-check the stiffness of a model through independent
    /// computation paths
    Validate(ModelArgs),
}

fn run(cli: Cli) -> Result<String, CliFailure> {
    match cli.command {
        Command::Stiff(args) => cmd_stiff(
            &args.selector(),
            &args.flags(),
            args.format.into(),
            args.tol,
        ),
        Command::Deflect { model, wrench } => {
            let w = parse_wrench(&wrench)?;
            cmd_deflect(&model.selector(), &model.flags(), &w, model.format.into())
        }
        Command::Analyze { matrix, format, tol } => {
            let text = std::fs::read_to_string(&matrix).map_err(|e| CliFailure {
                exit_code: 1,
                message: format!("cannot read {}: {e}", matrix.display()),
            })?;
            let label = matrix
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "matrix".into());
            cmd_analyze(&text, &label, format.into(), tol)
        }
        Command::Validate(args) => {
            cmd_validate(&args.selector(), &args.flags(), args.format.into())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(output) => {
            print!("{output}");
            ExitCode::SUCCESS
        }
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.exit_code.clamp(0, 255) as u8)
        }
    }
}
