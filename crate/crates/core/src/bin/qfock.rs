use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qfock::deformation::{parse_deformation, DeformationScheme};
use qfock::fock_matrix::{operator_dump, verify_algebra, OperatorName};
use qfock::squeezed::{squeezed_state, SqueezedSpec};
use qfock::sweep::{self, Family, OutputFormat, SweepConfig, SweepSpec, DEFAULT_TAIL_TOL};
use qfock::thermal::{thermal_state, ThermalSpec};
use qfock::Error;

const EXIT_USAGE: u8 = 1;
const EXIT_VERIFY: u8 = 2;
const EXIT_IO: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "qfock", version, about = "q-deformed doubled Fock space numerics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sweep a (q, xi) or (q, theta) grid and write one row per point.
    Sweep(SweepArgs),
    /// Check the operator algebra on truncated matrices.
    Verify(VerifyArgs),
    /// Dump a truncated operator matrix as JSON.
    Ops(OpsArgs),
    /// Parse and validate a deformation expression.
    Parse(ParseArgs),
    /// Dump the pair coefficients of a squeezed or thermal vacuum as JSON.
    State(StateArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FamilyArg {
    Squeezed,
    Thermal,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Squeezed => Family::Squeezed,
            FamilyArg::Thermal => Family::Thermal,
        }
    }
}

#[derive(Args, Debug)]
struct SweepArgs {
    family: Option<FamilyArg>,
    /// undeformed | bm | expr:<text>
    #[arg(long)]
    scheme: Option<String>,
    /// Comma-separated q values.
    #[arg(long)]
    q: Option<String>,
    /// Comma-separated squeezing parameters.
    #[arg(long)]
    xi: Option<String>,
    /// Comma-separated values of beta*omega.
    #[arg(long)]
    theta: Option<String>,
    #[arg(long)]
    tail_tol: Option<f64>,
    #[arg(long)]
    format: Option<String>,
    /// Output file; `-` means stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON file with defaults for any of the above.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, default_value = "bm")]
    scheme: String,
    #[arg(long, default_value = "1")]
    q: String,
    #[arg(long, default_value = "16,64")]
    dims: String,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
}

#[derive(Args, Debug)]
struct OpsArgs {
    /// annihilation | creation | number | identity
    operator: String,
    #[arg(long, default_value = "undeformed")]
    scheme: String,
    #[arg(long, default_value_t = 1.0)]
    q: f64,
    #[arg(long)]
    dim: usize,
}

#[derive(Args, Debug)]
struct ParseArgs {
    expression: String,
    /// Evaluate D(0..=n-max) at this q after parsing.
    #[arg(long, default_value_t = 1.0)]
    q: f64,
    #[arg(long, default_value_t = 8)]
    n_max: u32,
}

#[derive(Args, Debug)]
struct StateArgs {
    family: FamilyArg,
    /// xi for squeezed, theta for thermal.
    #[arg(long)]
    param: String,
    #[arg(long, default_value_t = DEFAULT_TAIL_TOL)]
    tail_tol: f64,
}

enum Failure {
    Usage(String),
    Io(String),
    Verify,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

/// Comma-separated numbers; an item may also be a constant expression such
/// as `ln(10/3)`.
fn parse_list(text: &str, what: &str) -> Result<Vec<f64>, Failure> {
    text.split(',')
        .map(|item| {
            let item = item.trim();
            if let Ok(v) = item.parse::<f64>() {
                return Ok(v);
            }
            let expr = parse_deformation(item)
                .map_err(|e| Failure::Usage(format!("bad {what} value '{item}': {e}")))?;
            expr.eval(f64::NAN, f64::NAN)
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Failure::Usage(format!("bad {what} value '{item}': not a finite constant")))
        })
        .collect()
}

fn write_output(text: &str, out: Option<&PathBuf>) -> Result<(), Failure> {
    match out.filter(|p| p.as_os_str() != "-") {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display()))),
        None => {
            let mut stdout = io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| Failure::Io(e.to_string()))
        }
    }
}

fn sweep_spec(args: SweepArgs) -> Result<SweepSpec, Failure> {
    let config = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
            serde_json::from_str::<SweepConfig>(&text)
                .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?
        }
        None => SweepConfig::default(),
    };
    let family = args
        .family
        .map(Family::from)
        .or(config.family)
        .ok_or_else(|| Failure::Usage("sweep family (squeezed or thermal) is required".into()))?;
    let q_values = match &args.q {
        Some(t) => parse_list(t, "q")?,
        None => config.q.unwrap_or_else(|| vec![1.0]),
    };
    let (flag, from_config, name) = match family {
        Family::Squeezed => (&args.xi, config.xi, "xi"),
        Family::Thermal => (&args.theta, config.theta, "theta"),
    };
    let params = match flag {
        Some(t) => parse_list(t, name)?,
        None => from_config.ok_or_else(|| Failure::Usage(format!("--{name} is required")))?,
    };
    let format = match &args.format {
        Some(f) => f.parse::<OutputFormat>()?,
        None => config.format.unwrap_or_default(),
    };
    Ok(SweepSpec {
        family,
        scheme: args.scheme.or(config.scheme).unwrap_or_else(|| "bm".into()),
        q_values,
        params,
        tail_tol: args.tail_tol.or(config.tail_tol).unwrap_or(DEFAULT_TAIL_TOL),
        format,
        out: args.out.or(config.out),
    })
}

fn run_sweep(args: SweepArgs) -> Result<(), Failure> {
    let spec = sweep_spec(args)?;
    let rows = sweep::run_sweep(&spec)?;
    write_output(&sweep::render(&rows, spec.format), spec.out.as_ref())
}

fn run_verify(args: VerifyArgs) -> Result<(), Failure> {
    let qs = parse_list(&args.q, "q")?;
    let dims = args
        .dims
        .split(',')
        .map(|d| {
            d.trim()
                .parse::<usize>()
                .map_err(|_| Failure::Usage(format!("bad dimension '{d}'")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut all_ok = true;
    let mut text = String::new();
    for q in qs {
        let scheme = DeformationScheme::from_descriptor(&args.scheme, q)?;
        for &dim in &dims {
            let report = verify_algebra(&scheme, dim, args.tol)?;
            all_ok &= report.passed();
            text.push_str(&format!("# {scheme}\n{report}"));
        }
    }
    text.push_str(if all_ok { "PASS\n" } else { "FAIL\n" });
    write_output(&text, None)?;
    if all_ok {
        Ok(())
    } else {
        Err(Failure::Verify)
    }
}

fn run_ops(args: OpsArgs) -> Result<(), Failure> {
    let name: OperatorName = args.operator.parse()?;
    let scheme = DeformationScheme::from_descriptor(&args.scheme, args.q)?;
    let dump = operator_dump(&scheme, args.dim, name)?;
    let mut text = serde_json::to_string(&dump).expect("dump serializes");
    text.push('\n');
    write_output(&text, None)
}

fn run_parse(args: ParseArgs) -> Result<(), Failure> {
    let tree = parse_deformation(&args.expression).map_err(|e| {
        Failure::Usage(format!(
            "{e}\n  {}\n  {}^",
            args.expression,
            " ".repeat(e.position)
        ))
    })?;
    let scheme = DeformationScheme::custom(&args.expression, args.q)?;
    let mut text = format!("{tree}\n");
    for n in 0..=args.n_max {
        text.push_str(&format!("D({n}) = {}\n", sweep::format_number(scheme.eval_d(n)?)));
    }
    write_output(&text, None)
}

fn run_state(args: StateArgs) -> Result<(), Failure> {
    let values = parse_list(&args.param, "param")?;
    let &[param] = values.as_slice() else {
        return Err(Failure::Usage("--param takes a single value".into()));
    };
    let scheme = DeformationScheme::undeformed();
    let state = match args.family {
        FamilyArg::Squeezed => squeezed_state(&SqueezedSpec::new(param, scheme, args.tail_tol)?)?,
        FamilyArg::Thermal => thermal_state(&ThermalSpec::new(param, scheme, args.tail_tol)?)?,
    };
    let mut text = serde_json::to_string(&state).expect("state serializes");
    text.push('\n');
    write_output(&text, None)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Sweep(a) => run_sweep(a),
        Command::Verify(a) => run_verify(a),
        Command::Ops(a) => run_ops(a),
        Command::Parse(a) => run_parse(a),
        Command::State(a) => run_state(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_IO)
        }
        Err(Failure::Verify) => ExitCode::from(EXIT_VERIFY),
    }
}
