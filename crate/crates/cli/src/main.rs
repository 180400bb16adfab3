//! `reflecto`: reflection matrices of priority queueing networks and their
//! tightness.

mod input;
mod render;
mod report;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use reflecto::classes::ClassOptions;
use reflecto::network::{derive, reentrant_spec, Discipline, NetworkError};
use reflecto::numerics::{parse_rational, parse_rational_list, Rational};
use reflecto::tightness::{
    build_system, check_tight_system, decide_tight_matrix, verify_assignment, Assignment,
    DecideOptions, TightnessError, DEFAULT_SAMPLES,
};
use serde::Serialize;

use crate::input::{parse_b, read_json, read_matrix};
use crate::report::{
    analysis_report, analysis_text, class_summary, class_text, tightness_or_not_applicable,
    tightness_text, TightnessSection,
};

#[derive(Parser)]
#[command(
    name = "reflecto",
    version,
    about = "Reflection matrices of priority queueing networks and their tightness"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Derive W, B, F, A, Q and R for a network, classify R and decide tightness.
    Analyze {
        spec: PathBuf,
        #[command(flatten)]
        tight: TightArgs,
        #[arg(long)]
        json: bool,
    },
    /// Report the matrix classes of a square matrix.
    Classify {
        matrix: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Check one tight system (with b) or decide whether the matrix is tight.
    Tight {
        matrix: PathBuf,
        #[command(flatten)]
        tight: TightArgs,
        #[arg(long)]
        json: bool,
    },
    /// Write the network description of a reentrant line.
    Reentrant {
        /// Station visited at each step, e.g. 1,1,2,3.
        #[arg(long)]
        route: String,
        /// Mean service time at each step.
        #[arg(long)]
        means: String,
        /// External arrival rate into the first step.
        #[arg(long)]
        arrival: String,
        #[arg(long, value_enum)]
        discipline: DisciplineArg,
        /// Output file (standard output when absent).
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
    /// Verify a candidate solution of a tight system.
    Witness {
        matrix: PathBuf,
        witness: PathBuf,
        /// Comma-separated positive rationals (default: the matrix file's b, else all ones).
        #[arg(long)]
        b: Option<String>,
        /// Drop the lower bound 0 on boundary unknowns.
        #[arg(long)]
        unbounded_aux: bool,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args)]
struct TightArgs {
    /// Check the tight system for this b only (comma-separated positive rationals).
    #[arg(long)]
    b: Option<String>,
    /// Random b vectors tried when no sufficient condition applies.
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Drop the lower bound 0 on boundary unknowns.
    #[arg(long)]
    unbounded_aux: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum DisciplineArg {
    Fbfs,
    Lbfs,
}

impl From<DisciplineArg> for Discipline {
    fn from(d: DisciplineArg) -> Self {
        match d {
            DisciplineArg::Fbfs => Discipline::Fbfs,
            DisciplineArg::Lbfs => Discipline::Lbfs,
        }
    }
}

fn class_options() -> Result<ClassOptions> {
    let mut opts = ClassOptions::default();
    if let Ok(text) = std::env::var("REFLECTO_DIM_CAP") {
        opts.dim_cap = text
            .trim()
            .parse()
            .map_err(|_| anyhow!("REFLECTO_DIM_CAP={text} is not a nonnegative integer"))?;
    }
    Ok(opts)
}

fn decide_options(args: &TightArgs) -> Result<DecideOptions> {
    Ok(DecideOptions {
        samples: args.samples,
        seed: args.seed,
        aux_bounded: !args.unbounded_aux,
        class: class_options()?,
    })
}

fn tightness_section(
    r: &reflecto::numerics::RatMatrix,
    b: Option<Vec<Rational>>,
    opts: &DecideOptions,
) -> Result<TightnessSection, TightnessError> {
    match b {
        Some(b) => Ok(TightnessSection::FixedB {
            verdict: check_tight_system(r, &b, opts.aux_bounded)?,
            b,
        }),
        None => decide_tight_matrix(r, opts).map(TightnessSection::Decision),
    }
}

fn emit<T: Serialize>(json: bool, value: &T, text: impl FnOnce() -> String) -> Result<()> {
    if json {
        println!("{}", serde_json::to_string_pretty(value)?);
    } else {
        print!("{}", text());
    }
    Ok(())
}

fn analyze(path: PathBuf, args: TightArgs, json: bool) -> Result<ExitCode> {
    let spec = read_json(&path)?;
    let derivation = derive(&spec)?;
    let opts = decide_options(&args)?;
    let (classification, tightness) = match &derivation.r {
        Some(r) => {
            let b = args
                .b
                .as_deref()
                .map(|t| parse_b(t, r.rows()))
                .transpose()?;
            let classes = class_summary(r, &opts.class)?;
            let section = tightness_or_not_applicable(tightness_section(r, b, &opts))?;
            (Some(classes), section)
        }
        None => (
            None,
            TightnessSection::NotApplicable {
                reason: "R is undefined because Q is singular".into(),
            },
        ),
    };
    let report = analysis_report(&spec, &derivation, classification, tightness);
    emit(json, &report, || analysis_text(&report, &derivation))?;
    Ok(ExitCode::SUCCESS)
}

fn classify_cmd(path: PathBuf, json: bool) -> Result<ExitCode> {
    let m = read_matrix(&path)?;
    let summary = class_summary(&m.matrix, &class_options()?)?;
    emit(json, &summary, || class_text(&summary))?;
    Ok(ExitCode::SUCCESS)
}

fn tight(path: PathBuf, args: TightArgs, json: bool) -> Result<ExitCode> {
    let m = read_matrix(&path)?;
    let d = m.matrix.rows();
    let b = match &args.b {
        Some(text) => Some(parse_b(text, d)?),
        None => m.b,
    };
    let section = tightness_section(&m.matrix, b, &decide_options(&args)?)?;
    emit(json, &section, || tightness_text(&section))?;
    Ok(ExitCode::SUCCESS)
}

fn reentrant(
    route: &str,
    means: &str,
    arrival: &str,
    discipline: DisciplineArg,
    output: Option<PathBuf>,
) -> Result<ExitCode> {
    let route: Vec<usize> = route
        .split(',')
        .map(|s| {
            s.trim()
                .parse()
                .map_err(|_| anyhow!("--route: `{}` is not a station number", s.trim()))
        })
        .collect::<Result<_>>()?;
    let means = parse_rational_list(means).context("--means")?;
    let arrival = parse_rational(arrival.trim()).context("--arrival")?;
    let spec = reentrant_spec(&route, &means, &arrival, discipline.into())?;
    let text = serde_json::to_string_pretty(&spec)? + "\n";
    match output {
        Some(path) => {
            fs::write(&path, text).with_context(|| format!("cannot write {}", path.display()))?
        }
        None => print!("{text}"),
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct WitnessOutput {
    valid: bool,
    nontrivial: bool,
    report: reflecto::tightness::VerificationReport,
}

fn witness_cmd(
    matrix: PathBuf,
    witness: PathBuf,
    b: Option<String>,
    unbounded_aux: bool,
    json: bool,
) -> Result<ExitCode> {
    let m = read_matrix(&matrix)?;
    let d = m.matrix.rows();
    let b = match b {
        Some(text) => parse_b(&text, d)?,
        None => {
            m.b.unwrap_or_else(|| vec![Rational::from_integer(1.into()); d])
        }
    };
    let assignment: Assignment = read_json(&witness)?;
    let system = build_system(&m.matrix, &b, !unbounded_aux)?;
    let report = verify_assignment(&system, &assignment)?;
    let out = WitnessOutput {
        valid: report.all_passed(),
        nontrivial: report.is_nontrivial_solution(),
        report,
    };
    emit(json, &out, || {
        let mut text = render::verification(&out.report);
        text.push_str(if out.nontrivial {
            "witness: valid, differs from all-ones (system is not tight)\n"
        } else if out.valid {
            "witness: valid but trivial (all-ones)\n"
        } else {
            "witness: invalid\n"
        });
        text
    })?;
    Ok(if out.nontrivial {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Analyze { spec, tight, json } => analyze(spec, tight, json),
        Command::Classify { matrix, json } => classify_cmd(matrix, json),
        Command::Tight {
            matrix,
            tight: args,
            json,
        } => tight(matrix, args, json),
        Command::Reentrant {
            route,
            means,
            arrival,
            discipline,
            output,
        } => reentrant(&route, &means, &arrival, discipline, output),
        Command::Witness {
            matrix,
            witness,
            b,
            unbounded_aux,
            json,
        } => witness_cmd(matrix, witness, b, unbounded_aux, json),
    }
}

/// Exit status 2 marks a broken internal invariant, 1 anything the input caused.
fn exit_code_for(err: &anyhow::Error) -> u8 {
    let internal = err.chain().any(|cause| {
        matches!(
            cause.downcast_ref::<NetworkError>(),
            Some(NetworkError::Inconsistent(_))
        ) || matches!(
            cause.downcast_ref::<TightnessError>(),
            Some(TightnessError::Internal(_))
        )
    });
    if internal {
        2
    } else {
        1
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
