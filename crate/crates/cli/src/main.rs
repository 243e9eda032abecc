use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use sphere_interp::datasets;
use sphere_interp::derivatives::fd_derivatives;
use sphere_interp::harness::{
    convergence_study, doubling_range, efficiency_study, timing_cells, CurveKind, GeneratingCurve,
    TIMING_HEADER,
};
use sphere_interp::io::{self as knot_io, Cell, Format, ParseError};
use sphere_interp::sider::ValidationWarning;
use sphere_interp::{
    build_interpolant, validate_knots, BuildOptions, InterpError, KnotSequence, Method, SenoCurve,
};

/// Exit status plus a message for standard error.
struct Failure {
    code: u8,
    msg: String,
}

impl Failure {
    const IO: u8 = 1;
    const PARSE: u8 = 2;
    const VALIDATION: u8 = 3;
    const NUMERICAL: u8 = 4;

    fn new(code: u8, msg: impl Into<String>) -> Self {
        Self {
            code,
            msg: msg.into(),
        }
    }
}

impl From<ParseError> for Failure {
    fn from(e: ParseError) -> Self {
        let code = match e {
            ParseError::Io(_) => Failure::IO,
            _ => Failure::PARSE,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<InterpError> for Failure {
    fn from(e: InterpError) -> Self {
        use InterpError::*;
        let code = match e {
            InvalidArgument(_) | UnsupportedMethod(_) => Failure::PARSE,
            AntipodalPoints { .. }
            | Impurity { .. }
            | DegenerateBlend { .. }
            | Domain { .. }
            | NonUnitRotation { .. }
            | ZeroNorm => Failure::NUMERICAL,
            _ => Failure::VALIDATION,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::new(Failure::IO, format!("write failed: {e}"))
    }
}

type CliResult = Result<(), Failure>;

#[derive(Parser)]
#[command(
    name = "sphinterp",
    version,
    about = "Interpolation on the unit sphere: evaluation and convergence experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate an interpolant densely through a knot file
    Eval(EvalArgs),
    /// Check a knot file for sign flips, ambiguous pairs and degenerate geometry
    Validate(ValidateArgs),
    /// Errors and convergence orders on the generating curve
    Convergence(StudyArgs),
    /// Wall time versus error on the generating curve
    Efficiency(EfficiencyArgs),
    /// Print the SENO stencil chosen on every interval
    Select(SelectArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Slerp,
    Squad,
    Sider2,
    Sider3,
    Sider4,
    Seno2,
    Seno3,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Slerp => Method::Slerp,
            MethodArg::Squad => Method::Squad,
            MethodArg::Sider2 => Method::Sider2,
            MethodArg::Sider3 => Method::Sider3,
            MethodArg::Sider4 => Method::Sider4,
            MethodArg::Seno2 => Method::Seno2,
            MethodArg::Seno3 => Method::Seno3,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum CurveArg {
    Smooth,
    Kinked,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}

#[derive(Args)]
struct Input {
    /// Knot file with rows (t, x, y, z)
    #[arg(required_unless_present = "dataset")]
    input: Option<PathBuf>,
    /// Use a bundled dataset instead of a file
    #[arg(long, conflicts_with = "input", value_parser = datasets::NAMES)]
    dataset: Option<String>,
    /// Input format; guessed from the extension when omitted
    #[arg(long, value_enum)]
    input_format: Option<FormatArg>,
}

impl Input {
    fn load(&self) -> Result<KnotSequence, Failure> {
        if let Some(name) = &self.dataset {
            return datasets::by_name(name)
                .ok_or_else(|| Failure::new(Failure::PARSE, format!("unknown dataset `{name}`")));
        }
        let path = self.input.as_ref().expect("clap requires input or dataset");
        let rows = knot_io::read_knots(path, self.input_format.map(Format::from))?;
        Ok(KnotSequence::from_timed(&rows)?)
    }
}

#[derive(Args)]
struct Output {
    /// Output file (standard output when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
}

impl Output {
    fn emit(&self, header: &[&str], rows: &[Vec<Cell>]) -> CliResult {
        let format = Format::from(self.format);
        match &self.out {
            Some(path) => {
                let file = File::create(path)
                    .map_err(|e| Failure::new(Failure::IO, format!("{}: {e}", path.display())))?;
                let mut w = BufWriter::new(file);
                knot_io::write_table(&mut w, format, header, rows)?;
                w.flush()?;
            }
            None => {
                let mut w = BufWriter::new(io::stdout().lock());
                knot_io::write_table(&mut w, format, header, rows)?;
                w.flush()?;
            }
        }
        Ok(())
    }
}

#[derive(Args)]
struct EvalArgs {
    #[command(flatten)]
    input: Input,
    #[arg(long, value_enum)]
    method: MethodArg,
    /// Number of sample intervals; `samples + 1` points are written
    #[arg(long, default_value_t = 200)]
    samples: usize,
    /// SENO variation quadrature points
    #[arg(long, default_value_t = 3)]
    k: usize,
    /// Append first and second derivative channels
    #[arg(long)]
    derivatives: bool,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct ValidateArgs {
    #[command(flatten)]
    input: Input,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct StudyArgs {
    #[arg(long, value_enum, default_value = "smooth")]
    curve: CurveArg,
    #[arg(long, default_value_t = 0.1)]
    sigma: f64,
    #[arg(long, default_value_t = 16)]
    inv_dt_min: usize,
    #[arg(long, default_value_t = 2048)]
    inv_dt_max: usize,
    /// Methods to compare (repeatable)
    #[arg(long, value_enum, num_args = 1.., default_values = ["slerp", "squad", "seno2", "seno3"])]
    method: Vec<MethodArg>,
    /// SENO variation quadrature points
    #[arg(long, default_value_t = 3)]
    k: usize,
    #[command(flatten)]
    output: Output,
}

impl StudyArgs {
    fn setup(&self) -> Result<(GeneratingCurve, Vec<Method>, Vec<usize>, BuildOptions), Failure> {
        let kind = match self.curve {
            CurveArg::Smooth => CurveKind::Smooth,
            CurveArg::Kinked => CurveKind::Kinked,
        };
        let curve = GeneratingCurve::new(kind, self.sigma)?;
        let methods = self.method.iter().map(|&m| Method::from(m)).collect();
        let grids = doubling_range(self.inv_dt_min, self.inv_dt_max)?;
        Ok((
            curve,
            methods,
            grids,
            BuildOptions {
                variation_points: self.k,
            },
        ))
    }
}

#[derive(Args)]
struct EfficiencyArgs {
    #[command(flatten)]
    study: StudyArgs,
    /// Timed repetitions per configuration; the median is reported
    #[arg(long, default_value_t = 3)]
    reps: usize,
}

#[derive(Args)]
struct SelectArgs {
    #[command(flatten)]
    input: Input,
    #[arg(long, value_enum, default_value = "seno3")]
    method: MethodArg,
    #[arg(long, default_value_t = 3)]
    k: usize,
    #[command(flatten)]
    output: Output,
}

fn eval(args: &EvalArgs) -> CliResult {
    let knots = args.input.load()?;
    report_validation(&knots)?;
    if args.samples == 0 {
        return Err(Failure::new(Failure::PARSE, "--samples must be positive"));
    }
    let opts = BuildOptions {
        variation_points: args.k,
    };
    let curve = build_interpolant(args.method.into(), &knots, &opts)?;
    let (lo, hi) = (knots.t0(), knots.end_time());
    let mut header = vec!["t", "x", "y", "z"];
    if args.derivatives {
        header.extend(["dx", "dy", "dz", "ddx", "ddy", "ddz"]);
    }
    let mut rows = Vec::with_capacity(args.samples + 1);
    for j in 0..=args.samples {
        let t = if j == args.samples {
            hi
        } else {
            lo + (hi - lo) * j as f64 / args.samples as f64
        };
        let p = curve.eval(t).vector();
        let mut row: Vec<f64> = vec![t, p.x, p.y, p.z];
        if args.derivatives {
            let d = match curve.analytic_derivatives(t) {
                Ok(d) => d,
                Err(InterpError::UnsupportedMethod(_)) => fd_derivatives(curve.as_ref(), t, 1e-5),
                Err(e) => return Err(e.into()),
            };
            row.extend([d.d1.x, d.d1.y, d.d1.z, d.d2.x, d.d2.y, d.d2.z]);
        }
        if row.iter().any(|x| !x.is_finite()) {
            return Err(Failure::new(
                Failure::NUMERICAL,
                format!("non-finite sample at t = {t}"),
            ));
        }
        rows.push(row.into_iter().map(Cell::from).collect());
    }
    args.output.emit(&header, &rows)
}

/// Prints warnings to standard error; fails on ambiguous pairs.
fn report_validation(knots: &KnotSequence) -> CliResult {
    let report = validate_knots(knots);
    for p in report.flipped() {
        eprintln!(
            "note: knot {} negated onto the hemisphere of knot {p}",
            p + 1
        );
    }
    for w in &report.warnings {
        match w {
            ValidationWarning::GreatCircle { max_triple_product } => eprintln!(
                "warning: all knots lie on one great circle (max |det| = {max_triple_product:.3e})"
            ),
            ValidationWarning::ControlSpread { index, angle } => eprintln!(
                "warning: SIDER2 control of pair {index} lies {angle:.3} rad from its anchor"
            ),
        }
    }
    match report.pairs.iter().find(|p| p.ambiguous) {
        Some(p) => Err(InterpError::AmbiguousAntipode { index: p.index }.into()),
        None => Ok(()),
    }
}

fn validate(args: &ValidateArgs) -> CliResult {
    let knots = args.input.load()?;
    let report = validate_knots(&knots);
    let rows: Vec<Vec<Cell>> = report
        .pairs
        .iter()
        .map(|p| {
            vec![
                Cell::from(p.index),
                Cell::from(p.angle),
                Cell::from(p.flipped as usize),
                Cell::from(p.ambiguous as usize),
            ]
        })
        .collect();
    args.output
        .emit(&["pair", "angle", "flipped", "ambiguous"], &rows)?;
    report_validation(&knots)
}

fn convergence(args: &StudyArgs) -> CliResult {
    let (curve, methods, grids, opts) = args.setup()?;
    let table = convergence_study(&curve, &methods, &grids, &opts)?;
    let header = table.header();
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    args.output.emit(&header, &table.cells())
}

fn efficiency(args: &EfficiencyArgs) -> CliResult {
    let (curve, methods, grids, opts) = args.study.setup()?;
    let records = efficiency_study(&curve, &methods, &grids, args.reps, &opts)?;
    args.study
        .output
        .emit(&TIMING_HEADER, &timing_cells(&records))
}

fn select(args: &SelectArgs) -> CliResult {
    let order = match Method::from(args.method) {
        Method::Seno2 => 2,
        Method::Seno3 => 3,
        m => {
            return Err(Failure::new(
                Failure::PARSE,
                format!("select needs seno2 or seno3, got {m}"),
            ))
        }
    };
    let knots = args.input.load()?;
    report_validation(&knots)?;
    let seno = SenoCurve::new(&knots, order, args.k)?;
    let mut rows = Vec::new();
    for sel in seno.selections() {
        for (&start, &variation) in sel.starts.iter().zip(&sel.variations) {
            rows.push(vec![
                Cell::from(sel.interval),
                Cell::from(knots.time(sel.interval)),
                Cell::from(knots.time(sel.interval + 1)),
                Cell::from(start + 1),
                Cell::from(start + order + 1),
                Cell::from(variation),
                Cell::from((start == sel.selected) as usize),
            ]);
        }
    }
    args.output.emit(
        &[
            "interval",
            "t_start",
            "t_end",
            "first_knot",
            "last_knot",
            "variation",
            "selected",
        ],
        &rows,
    )
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Eval(a) => eval(a),
        Command::Validate(a) => validate(a),
        Command::Convergence(a) => convergence(a),
        Command::Efficiency(a) => efficiency(a),
        Command::Select(a) => select(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
