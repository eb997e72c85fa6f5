//! Command-line front end for `inscribed-core`.
//!
//! Exit codes: 0 success, 1 audit failure, 2 input error, 3 computation error.

pub mod sweep;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use inscribed_core::{
    estimate_on_dual, run_audit, sig, ConstantEstimate, ConstantId, DeltaForm, EstimateParams, Estimator, NormSpec,
    SamplingParams,
};
use serde::Serialize;

pub const EXIT_OK: i32 = 0;
pub const EXIT_AUDIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_COMPUTE: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Compute(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Compute(_) => EXIT_COMPUTE,
        }
    }

    pub(crate) fn output(e: impl std::fmt::Display) -> Self {
        CliError::Compute(format!("write failed: {e}"))
    }

    pub(crate) fn parse(e: impl std::fmt::Display) -> Self {
        CliError::Input(format!("parse failed: {e}"))
    }
}

impl From<inscribed_core::Error> for CliError {
    fn from(e: inscribed_core::Error) -> Self {
        if e.is_input_error() {
            CliError::Input(e.to_string())
        } else {
            CliError::Compute(e.to_string())
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "inscribed", version, about = "Geometric constants of finite-dimensional normed spaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate one constant.
    Compute {
        #[arg(long)]
        norm: PathBuf,
        #[command(flatten)]
        constant: ConstantArgs,
        #[command(flatten)]
        sampling: SamplingArgs,
        /// Write the estimate as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the inequality ledger.
    Audit {
        #[arg(long)]
        norm: PathBuf,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[command(flatten)]
        sampling: SamplingArgs,
        /// Write the report as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweep a constant over the exponent of `ℓ_p`.
    Sweep {
        #[arg(long, default_value = "lp")]
        family: String,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long)]
        p_from: f64,
        #[arg(long)]
        p_to: f64,
        #[arg(long)]
        steps: usize,
        #[command(flatten)]
        constant: ConstantArgs,
        #[command(flatten)]
        sampling: SamplingArgs,
        #[arg(long)]
        csv: PathBuf,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Estimate a constant on the dual space.
    Dual {
        #[arg(long)]
        norm: PathBuf,
        #[command(flatten)]
        constant: ConstantArgs,
        #[command(flatten)]
        sampling: SamplingArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct ConstantArgs {
    /// H, GL, GLp, CL, J, CNJ, CZ or Delta (also `GLp(p)`, `Delta(eps)`).
    #[arg(long)]
    pub constant: String,
    /// Exponent for GLp.
    #[arg(long)]
    pub p: Option<f64>,
    /// Distance for Delta.
    #[arg(long)]
    pub eps: Option<f64>,
}

impl ConstantArgs {
    pub fn resolve(&self) -> Result<ConstantId, CliError> {
        let id = match (self.constant.as_str(), self.p, self.eps) {
            ("GLp", Some(p), None) => ConstantId::GLp(p),
            ("GLp", None, _) => return Err(CliError::Input("GLp needs --p".into())),
            ("Delta", None, Some(e)) => ConstantId::Delta(e),
            ("Delta", _, None) => return Err(CliError::Input("Delta needs --eps".into())),
            (name, None, None) => name.parse::<ConstantId>()?,
            (name, _, _) => return Err(CliError::Input(format!("--p/--eps do not apply to constant {name}"))),
        };
        id.validate()?;
        Ok(id)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DeltaFormArg {
    AtLeast,
    Exactly,
}

#[derive(Debug, Args)]
pub struct SamplingArgs {
    /// Angle grid size for both parameters.
    #[arg(long, default_value_t = 2048)]
    pub resolution: usize,
    /// Random sections in dimension > 2.
    #[arg(long, default_value_t = 64)]
    pub sections: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Radial levels of the ball sample.
    #[arg(long, default_value_t = 16)]
    pub radial_levels: usize,
    #[arg(long, value_enum, default_value_t = DeltaFormArg::AtLeast)]
    pub delta_form: DeltaFormArg,
    /// Skip the local polish after the grid scan.
    #[arg(long)]
    pub no_refine: bool,
}

impl SamplingArgs {
    pub fn params(&self) -> EstimateParams {
        EstimateParams {
            sampling: SamplingParams {
                theta_grid: self.resolution,
                phi_grid: self.resolution,
                sections: self.sections,
                seed: self.seed,
                radial_levels: self.radial_levels,
            },
            refine: !self.no_refine,
            delta_form: match self.delta_form {
                DeltaFormArg::AtLeast => DeltaForm::AtLeast,
                DeltaFormArg::Exactly => DeltaForm::Exactly,
            },
            ..EstimateParams::default()
        }
    }
}

/// Parses `args` and runs the command, writing to `out` and `err`.
/// Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                return EXIT_INPUT;
            }
            let _ = write!(out, "{}", e.render());
            return EXIT_OK;
        }
    };
    match execute(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn execute(command: Command, out: &mut dyn Write) -> Result<i32, CliError> {
    match command {
        Command::Compute { norm, constant, sampling, out: file } => {
            let spec = load_spec(&norm)?;
            let id = constant.resolve()?;
            let est = Estimator::new(&spec, &sampling.params())?.estimate(id)?;
            print_estimate(out, &est, "")?;
            if let Some(file) = file {
                write_json(&file, &est)?;
            }
            Ok(EXIT_OK)
        }
        Command::Audit { norm, tol, sampling, out: file } => {
            let spec = load_spec(&norm)?;
            if !(tol.is_finite() && tol > 0.0) {
                return Err(CliError::Input(format!("tol must be positive (got {tol})")));
            }
            let report = run_audit(&spec, tol, &sampling.params())?;
            write!(out, "{}", report.summary_table()).map_err(CliError::output)?;
            if let Some(file) = file {
                write_text(&file, &(report.to_json() + "\n"))?;
            }
            Ok(if report.passed() { EXIT_OK } else { EXIT_AUDIT_FAIL })
        }
        Command::Sweep { family, dim, p_from, p_to, steps, constant, sampling, csv, svg } => {
            if family != "lp" {
                return Err(CliError::Input(format!("family: sweeps support only lp (got {family:?})")));
            }
            let ps = sweep::exponents(p_from, p_to, steps)?;
            let id = constant.resolve()?;
            let table = sweep::run_sweep(dim, &ps, id, &sampling.params())?;
            let mut buf = Vec::new();
            table.write_csv(&mut buf)?;
            fs::write(&csv, &buf).map_err(|e| CliError::output(format!("{}: {e}", csv.display())))?;
            if let Some(svg) = svg {
                write_text(&svg, &table.to_svg())?;
            }
            out.write_all(&buf).map_err(CliError::output)?;
            Ok(EXIT_OK)
        }
        Command::Dual { norm, constant, sampling, out: file } => {
            let spec = load_spec(&norm)?;
            let id = constant.resolve()?;
            let params = sampling.params();
            let dual = estimate_on_dual(&spec, id, &params)?;
            print_estimate(out, &dual, "*")?;
            let mut bounds = None;
            if id == ConstantId::H {
                let primal = Estimator::new(&spec, &params)?.estimate(id)?;
                let (lo, hi) = (2.0 * primal.value - 2.0, primal.value / 2.0 + 1.0);
                writeln!(out, "H = {:.6}; dual bounds [2H - 2, H/2 + 1] = [{lo:.6}, {hi:.6}]", primal.value)
                    .map_err(CliError::output)?;
                bounds = Some(DualBounds { primal, lower: lo, upper: hi });
            }
            if let Some(file) = file {
                write_json(&file, &DualReport { dual, bounds })?;
            }
            Ok(EXIT_OK)
        }
    }
}

#[derive(Serialize)]
struct DualBounds {
    primal: ConstantEstimate,
    #[serde(serialize_with = "sig::serialize")]
    lower: f64,
    #[serde(serialize_with = "sig::serialize")]
    upper: f64,
}

#[derive(Serialize)]
struct DualReport {
    dual: ConstantEstimate,
    #[serde(skip_serializing_if = "Option::is_none")]
    bounds: Option<DualBounds>,
}

pub fn load_spec(path: &Path) -> Result<NormSpec, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    Ok(NormSpec::from_json(&text)?)
}

fn print_estimate(out: &mut dyn Write, est: &ConstantEstimate, suffix: &str) -> Result<(), CliError> {
    let coords = |v: &[f64]| v.iter().map(|c| sig::format(*c)).collect::<Vec<_>>().join(", ");
    let kind = match est.direction {
        inscribed_core::Direction::LowerBoundOfSup => "lower bound of sup",
        inscribed_core::Direction::UpperBoundOfInf => "upper bound of inf",
    };
    writeln!(out, "{}{suffix} = {:.6} ({kind})", est.id, est.value).map_err(CliError::output)?;
    writeln!(out, "witness x = ({}), y = ({})", coords(&est.witness.x), coords(&est.witness.y))
        .map_err(CliError::output)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).map_err(CliError::output)?;
    write_text(path, &(text + "\n"))
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::output(format!("{}: {e}", path.display())))
}
