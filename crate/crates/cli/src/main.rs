use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use c1kahler::kesolve::solve_algebraic_with;
use c1kahler::suite::{self, DUAL_TOL, ENERGY_TOL};
use c1kahler::{
    completeness, enumerate_bundles, flag_data, frac, ode_data, profile_observables,
    quadrature_profile, rk_verify, BundleSpec, DiagramJson, Error, PaintedDiagram,
    ProfileRequest, Q,
};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

mod report;

use report::{BundleList, FlagReport, ProfileReport, SolveReport};

const EXIT_INFEASIBLE: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;
const EXIT_PARSE: u8 = 4;

/// Kähler–Einstein metrics on cohomogeneity-one bundles over flag manifolds.
#[derive(Parser, Debug)]
#[command(name = "c1kahler", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Flag-manifold data for a painted diagram.
    Analyze {
        #[command(flatten)]
        diagram: DiagramArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Admissible bundles over a flag manifold.
    Bundles {
        #[command(flatten)]
        diagram: DiagramArg,
        /// Characters range over [-max-char, max-char] per black node.
        #[arg(long, default_value_t = 1)]
        max_char: i64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Algebraic feasibility and the report for one bundle.
    Solve {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sampled profile (CSV) plus report.
    Profile {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long, default_value_t = 5001)]
        samples: usize,
        #[arg(long, default_value_t = 50.0)]
        t_max: f64,
        /// Stop sampling once f exceeds this value.
        #[arg(long)]
        f_max: Option<f64>,
        #[arg(long, env = "KE_OUT_DIR", default_value = ".")]
        out_dir: PathBuf,
        /// File stem for `<name>.csv` and `<name>.json`.
        #[arg(long, default_value = "profile")]
        name: String,
    },
    /// Projective-space seed against its closed form.
    VerifyCpn {
        #[arg(long)]
        n: usize,
    },
    /// The full acceptance battery.
    Suite {
        /// Run criteria one after another.
        #[arg(long)]
        serial: bool,
    },
}

#[derive(Args, Debug)]
struct DiagramArg {
    /// Painted diagram: inline JSON or a path to a JSON file.
    #[arg(long)]
    diagram: String,
}

#[derive(Args, Debug)]
struct ProblemArgs {
    /// Base painted diagram (inline JSON or path); not needed with --su.
    #[arg(long, required_unless_present = "su")]
    diagram: Option<String>,
    /// Bundle spec (inline JSON or path).
    #[arg(long, required_unless_present = "su")]
    bundle: Option<String>,
    /// Use the SU(n) seed over CP^(n-1).
    #[arg(long, conflicts_with_all = ["diagram", "bundle"])]
    su: Option<usize>,
    /// Einstein constant, e.g. -1 or 3/2.
    #[arg(long, allow_hyphen_values = true)]
    lambda: String,
    /// Face point for lambda = 0: black pairings on the base, comma separated.
    #[arg(long, allow_hyphen_values = true)]
    z0: Option<String>,
}

#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }

    fn parse(message: impl Into<String>) -> Self {
        Failure::new(EXIT_PARSE, message)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse(_)
            | Error::InvalidDiagram(_)
            | Error::InvalidBundle(_)
            | Error::InvalidParameter(_)
            | Error::InvalidRootSystem { .. }
            | Error::DimensionMismatch { .. }
            | Error::NotInCentre { .. } => EXIT_PARSE,
            Error::DegenerateFibre(_) | Error::Chamber(_) => EXIT_INFEASIBLE,
            _ => EXIT_NUMERICAL,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        match e.downcast::<Error>() {
            Ok(e) => e.into(),
            Err(e) => Failure::new(1, format!("{e:#}")),
        }
    }
}

type CmdResult = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            let kind = match f.code {
                EXIT_INFEASIBLE => "infeasible",
                EXIT_NUMERICAL => "numerical",
                EXIT_PARSE => "parse",
                _ => "io",
            };
            eprintln!("{}", serde_json::json!({ "error": kind, "code": f.code, "message": f.message }));
            ExitCode::from(f.code)
        }
    }
}

fn run(command: Command) -> CmdResult {
    match command {
        Command::Analyze { diagram, out } => {
            let d = read_diagram(&diagram.diagram)?;
            let f = flag_data(&d)?;
            emit(&FlagReport::new(&f), out.as_deref())?;
            Ok(0)
        }
        Command::Bundles {
            diagram,
            max_char,
            out,
        } => {
            if max_char < 0 {
                return Err(Failure::parse("--max-char must be non-negative"));
            }
            let d = read_diagram(&diagram.diagram)?;
            let list = BundleList {
                diagram: d.to_json(),
                max_char,
                bundles: enumerate_bundles(&d, max_char).iter().map(BundleSpec::to_json).collect(),
            };
            emit(&list, out.as_deref())?;
            Ok(0)
        }
        Command::Solve { problem, out } => {
            let (spec, lambda, z0) = read_problem(&problem)?;
            let (report, problem) = solve(&spec, lambda, z0.as_deref())?;
            emit(&report, out.as_deref())?;
            Ok(if problem.is_some() { 0 } else { EXIT_INFEASIBLE })
        }
        Command::Profile {
            problem,
            samples,
            t_max,
            f_max,
            out_dir,
            name,
        } => {
            if samples < 7 {
                return Err(Failure::parse("--samples must be at least 7"));
            }
            if !t_max.is_finite() || t_max <= 0.0 {
                return Err(Failure::parse("--t-max must be positive"));
            }
            if f_max.is_some_and(|f| f.is_nan() || f <= 0.0) {
                return Err(Failure::parse("--f-max must be positive"));
            }
            let (spec, lambda, z0) = read_problem(&problem)?;
            profile(&spec, lambda, z0.as_deref(), ProfileRequest { t_max, samples, f_max }, &out_dir, &name)
        }
        Command::VerifyCpn { n } => {
            if n < 2 {
                return Err(Failure::parse("--n must be at least 2"));
            }
            let r = suite::verify_cpn(n)?;
            let (coeff, sqrt) = frac::sqrt_normal_form(&(r.kappa_sq * Q::from_integer((n * n) as i128)))?;
            println!("kappa^2 = {} (exact: {})", frac::to_string(&r.kappa_sq), r.kappa_exact);
            println!("Z0 = 0: {}", r.z0_zero);
            println!("lambda = {}", frac::to_string(&r.lambda));
            println!("c = {}*sqrt({sqrt}) = {:.15} (c = kappa*n: {})", frac::to_string(&coeff), r.c, r.c_exact);
            println!("max profile error = {:.3e}", r.max_err);
            println!("energy defect = {:.3e}", r.energy_max);
            let passed = r.passed();
            println!("{}", if passed { "PASS" } else { "FAIL" });
            Ok(if passed { 0 } else { EXIT_NUMERICAL })
        }
        Command::Suite { serial } => {
            let results = suite::run_all(!serial);
            for r in &results {
                println!("{r}");
            }
            let failed = results.iter().filter(|r| !r.passed).count();
            println!("{}/{} criteria passed", results.len() - failed, results.len());
            Ok(if failed == 0 { 0 } else { EXIT_NUMERICAL })
        }
    }
}

fn solve(
    spec: &BundleSpec,
    lambda: Q,
    z0: Option<&[Q]>,
) -> Result<(SolveReport, Option<c1kahler::KeProblem>), Failure> {
    let report = SolveReport::base(spec, lambda)?;
    match solve_algebraic_with(spec, lambda, z0)? {
        Ok(p) => {
            let c = completeness(&p)?;
            let mut report = report.with_problem(&p);
            report.complete = Some(c.complete);
            report.domain_end = c.domain_end;
            Ok((report, Some(p)))
        }
        Err(why) => Ok((
            SolveReport {
                reason: Some(why.to_string()),
                ..report
            },
            None,
        )),
    }
}

fn profile(
    spec: &BundleSpec,
    lambda: Q,
    z0: Option<&[Q]>,
    req: ProfileRequest,
    out_dir: &Path,
    name: &str,
) -> CmdResult {
    let (mut report, problem) = solve(spec, lambda, z0)?;
    let Some(problem) = problem else {
        emit(&report, None)?;
        return Ok(EXIT_INFEASIBLE);
    };
    let data = ode_data(&problem)?;
    let prof = quadrature_profile(&data, &req)?;
    let rk = rk_verify(&data, &prof)?;
    let obs = profile_observables(&problem, &prof)?;
    report.end_kind = Some(prof.end_kind);

    std::fs::create_dir_all(out_dir)
        .with_context(|| format!("creating {}", out_dir.display()))?;
    let csv_path = out_dir.join(format!("{name}.csv"));
    std::fs::write(&csv_path, prof.to_csv()).with_context(|| format!("writing {}", csv_path.display()))?;

    let chamber_ok = obs.chamber_ok && obs.violation.is_none();
    let passed = prof.residual_max < DUAL_TOL
        && prof.energy_max < ENERGY_TOL
        && rk.max_discrepancy < DUAL_TOL
        && chamber_ok;
    let full = ProfileReport {
        solve: report,
        csv: csv_path.display().to_string(),
        samples: prof.len(),
        t_max: *prof.t.last().unwrap_or(&0.0),
        residual_max: prof.residual_max,
        energy_max: prof.energy_max,
        rk_discrepancy: rk.max_discrepancy,
        chamber_ok,
        warnings: prof.warnings.clone(),
        passed,
    };
    let json_path = out_dir.join(format!("{name}.json"));
    emit(&full, Some(&json_path))?;
    emit(&full, None)?;
    Ok(if passed { 0 } else { EXIT_NUMERICAL })
}

/// Inline JSON if it looks like JSON, otherwise a file path.
fn read_input(arg: &str) -> Result<String, Failure> {
    let t = arg.trim_start();
    if t.starts_with('{') || t.starts_with('[') {
        Ok(arg.to_string())
    } else {
        std::fs::read_to_string(arg).map_err(|e| Failure::parse(format!("reading {arg}: {e}")))
    }
}

fn read_diagram(arg: &str) -> Result<PaintedDiagram, Failure> {
    let text = read_input(arg)?;
    let json: DiagramJson =
        serde_json::from_str(&text).map_err(|e| Failure::parse(format!("diagram: {e}")))?;
    Ok(PaintedDiagram::from_json(&json)?)
}

fn read_problem(args: &ProblemArgs) -> Result<(BundleSpec, Q, Option<Vec<Q>>), Failure> {
    let lambda = frac::parse(&args.lambda)?;
    let z0 = args
        .z0
        .as_deref()
        .map(|s| s.split(',').map(frac::parse).collect::<c1kahler::Result<Vec<_>>>())
        .transpose()?;
    let spec = match (args.su, &args.diagram, &args.bundle) {
        (Some(n), _, _) => BundleSpec::su_seed(n)?,
        (None, Some(d), Some(b)) => {
            let base = read_diagram(d)?;
            let text = read_input(b)?;
            BundleSpec::parse_json(base, &text)?
        }
        _ => return Err(Failure::parse("need --diagram and --bundle, or --su")),
    };
    Ok((spec, lambda, z0))
}

fn emit<T: Serialize>(value: &T, path: Option<&Path>) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Failure::new(1, e.to_string()))?;
    match path {
        Some(p) => std::fs::write(p, text + "\n")
            .map_err(|e| Failure::new(1, format!("writing {}: {e}", p.display()))),
        None => {
            use std::io::Write;
            let mut out = std::io::stdout().lock();
            match writeln!(out, "{text}") {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
                    Err(Failure::new(1, format!("stdout: {e}")))
                }
                _ => Ok(()),
            }
        }
    }
}
