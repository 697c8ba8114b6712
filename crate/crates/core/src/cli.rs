//! Command-line front end.
//!
//! Every command writes its artifact to stdout (or `--output`) and returns a
//! process exit code: 0 on success, 2 for usage, parse and synthesis errors,
//! 3 when `verify` finds a declared-robust channel that is not.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::analysis::{
    infidelity_scaling, landscape, landscape_with_threads, phase_decomposition, ScalingAxis,
    DEFAULT_LADDER, DEFAULT_RANGE, DEFAULT_RESOLUTION,
};
use crate::error::Error;
use crate::error_model::{accumulate_delta_w, distance, first_order_oracle, ErrorChannel};
use crate::sequences::{
    aj_product_reduce, alway_jones, bb1, cis_cccp, corpse, plain, scrofulous, scrofulous_in_corpse,
    Family, PulseSequence, ReducedProduct, CIS_CCCP_WINDING, CORPSE_WINDING,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;

/// Environment variable capping landscape worker threads; 0 means automatic.
pub const THREADS_ENV: &str = "PULSE_THREADS";

/// Product fidelity below this fails `verify`.
pub const PRODUCT_FIDELITY_MIN: f64 = 1.0 - 1e-11;
/// Step of the central-difference oracle used by `verify`.
pub const FD_STEP: f64 = 1e-5;
/// Allowed gap between analytic and finite-difference ΔW.
pub const FD_AGREEMENT: f64 = 1e-4;

#[derive(Debug, Parser)]
#[command(
    name = "composite-pulse",
    version,
    about = "Composite pulse synthesis and robustness analysis"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Synthesize a sequence and print it as JSON.
    Synth(SynthArgs),
    /// Check first-order robustness of a sequence.
    Verify(VerifyArgs),
    /// Fidelity over a grid of (ε, ε′).
    Landscape(LandscapeArgs),
    /// Dynamical and geometric phases of the cyclic states.
    Phase(SynthArgs),
    /// Log-log slope of infidelity against error strength.
    Scaling(ScalingArgs),
    /// Closed form of a product of xy-plane π pulses.
    Reduce(ReduceArgs),
}

#[derive(Debug, Clone, Args)]
pub struct SequenceArgs {
    #[arg(long, value_parser = parse_family)]
    pub family: Family,
    /// Target rotation angle, e.g. `pi`, `pi/2`, `2pi/3`, `1.25`.
    #[arg(long, value_parser = parse_theta, default_value = "pi", allow_hyphen_values = true)]
    pub theta: f64,
    /// Target axis azimuth.
    #[arg(long, value_parser = parse_angle, default_value = "0", allow_hyphen_values = true)]
    pub phi: f64,
    /// CORPSE winding numbers n1,n2,n3.
    #[arg(long, value_parser = parse_winding, allow_hyphen_values = true)]
    pub winding: Option<[i64; 3]>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[command(flatten)]
    pub sequence: SequenceArgs,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Sequence JSON file, or `-` for stdin.
    #[arg(long, conflicts_with_all = ["family", "theta", "phi", "winding"])]
    pub input: Option<PathBuf>,
    #[arg(long, value_parser = parse_family)]
    pub family: Option<Family>,
    #[arg(long, value_parser = parse_theta, allow_hyphen_values = true)]
    pub theta: Option<f64>,
    #[arg(long, value_parser = parse_angle, allow_hyphen_values = true)]
    pub phi: Option<f64>,
    #[arg(long, value_parser = parse_winding, allow_hyphen_values = true)]
    pub winding: Option<[i64; 3]>,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct LandscapeArgs {
    #[command(flatten)]
    pub sequence: SequenceArgs,
    #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
    pub res: usize,
    #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
    pub eps_range: Option<(f64, f64)>,
    #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
    pub eps_prime_range: Option<(f64, f64)>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ScalingArgs {
    #[command(flatten)]
    pub sequence: SequenceArgs,
    /// eps, eps-prime or diagonal.
    #[arg(long, value_parser = parse_axis, default_value = "eps")]
    pub axis: ScalingAxis,
    /// Comma-separated strengths in [1e-3, 1e-2].
    #[arg(long, value_parser = parse_list)]
    pub strengths: Option<AngleList>,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReduceArgs {
    /// Comma-separated azimuths of the π pulses, first applied first.
    #[arg(long, value_parser = parse_list, allow_hyphen_values = true)]
    pub phases: AngleList,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

/// A failure reported on stderr as `{"error": {"kind", "message"}}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Failure {
    pub kind: String,
    pub message: String,
}

impl Failure {
    fn new(kind: &str, message: impl Into<String>) -> Self {
        Failure {
            kind: kind.to_string(),
            message: message.into(),
        }
    }

    pub fn to_json(&self) -> String {
        json!({ "error": { "kind": self.kind, "message": self.message } }).to_string()
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::new(e.kind(), e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::new("io", e.to_string())
    }
}

/// Parses an angle: a float, or `[±][c[*]]pi[/d]` (`π` also accepted).
pub fn parse_angle(text: &str) -> Result<f64, String> {
    let t = text.trim();
    let (sign, body) = match t.strip_prefix('-') {
        Some(rest) => (-1.0, rest.trim()),
        None => (1.0, t.strip_prefix('+').unwrap_or(t).trim()),
    };
    let bad = || format!("cannot parse angle '{text}'");
    if body.is_empty() {
        return Err(bad());
    }
    let (num, den) = match body.split_once('/') {
        Some((n, d)) => (n.trim(), Some(d.trim())),
        None => (body, None),
    };
    let lower = num.to_ascii_lowercase();
    let numerator = if let Some(coef) = lower.strip_suffix("pi").or_else(|| lower.strip_suffix('π'))
    {
        let coef = coef.trim().trim_end_matches('*').trim();
        let c = if coef.is_empty() {
            1.0
        } else {
            coef.parse::<f64>().map_err(|_| bad())?
        };
        c * std::f64::consts::PI
    } else {
        num.parse::<f64>().map_err(|_| bad())?
    };
    let value = match den {
        Some(d) => {
            let d: f64 = d.parse().map_err(|_| bad())?;
            if d == 0.0 {
                return Err(format!("division by zero in angle '{text}'"));
            }
            numerator / d
        }
        None => numerator,
    };
    if !value.is_finite() {
        return Err(format!("angle '{text}' is not finite"));
    }
    Ok(sign * value)
}

/// Like [`parse_angle`] but rejects negative values.
pub fn parse_theta(text: &str) -> Result<f64, String> {
    let v = parse_angle(text)?;
    if v < 0.0 {
        Err(format!("theta must be non-negative, got '{text}'"))
    } else {
        Ok(v)
    }
}

pub fn parse_winding(text: &str) -> Result<[i64; 3], String> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("winding needs three integers, got '{text}'"));
    }
    let mut w = [0i64; 3];
    for (slot, p) in w.iter_mut().zip(&parts) {
        *slot = p
            .parse()
            .map_err(|_| format!("winding entry '{p}' is not an integer"))?;
    }
    Ok(w)
}

/// Comma-separated angles kept as one argument value.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleList(pub Vec<f64>);

pub fn parse_list(text: &str) -> Result<AngleList, String> {
    text.split(',')
        .map(parse_angle)
        .collect::<Result<_, _>>()
        .map(AngleList)
}

fn parse_range(text: &str) -> Result<(f64, f64), String> {
    let v = parse_list(text)?.0;
    match v.as_slice() {
        [lo, hi] if lo < hi => Ok((*lo, *hi)),
        _ => Err(format!("range must be 'lo,hi' with lo < hi, got '{text}'")),
    }
}

fn parse_family(text: &str) -> Result<Family, String> {
    text.parse::<Family>().map_err(|e| e.to_string())
}

fn parse_axis(text: &str) -> Result<ScalingAxis, String> {
    text.parse::<ScalingAxis>().map_err(|e| e.to_string())
}

/// Builds a shipped family's sequence from command-line parameters.
pub fn build_sequence(args: &SequenceArgs) -> Result<PulseSequence, Failure> {
    let SequenceArgs {
        family,
        theta,
        phi,
        winding,
    } = *args;
    let seq = match family {
        Family::Plain => plain(theta, phi),
        Family::Corpse => corpse(theta, phi, winding.unwrap_or(CORPSE_WINDING)),
        Family::Scrofulous => scrofulous(theta, phi),
        Family::CisCccp => cis_cccp(theta, phi, winding.unwrap_or(CIS_CCCP_WINDING)),
        Family::Bb1 => bb1(theta, phi),
        Family::ScrofulousInCorpse => {
            scrofulous_in_corpse(theta, phi, winding.unwrap_or(CIS_CCCP_WINDING))
        }
        Family::AlwayJones => {
            if (theta - std::f64::consts::PI).abs() > 1e-12 {
                return Err(Failure::new(
                    "invalid_argument",
                    format!("alway-jones only builds theta = pi, got {theta}"),
                ));
            }
            alway_jones(phi)
        }
        Family::Custom => {
            return Err(Failure::new(
                "invalid_argument",
                "custom sequences are read with `verify --input`",
            ))
        }
    };
    Ok(seq?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChannelCheck {
    pub norm: f64,
    pub robust: bool,
    pub declared: bool,
    pub fd_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CombinedCheck {
    pub norm: f64,
    pub robust: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub family: String,
    pub pulses: usize,
    pub product_fidelity: f64,
    pub pulse_length: ChannelCheck,
    pub off_resonance: ChannelCheck,
    pub combined: CombinedCheck,
    pub fd_agreement: bool,
    pub pass: bool,
}

/// Runs the first-order analysis and the finite-difference cross-check.
pub fn verify_sequence(seq: &PulseSequence) -> Result<VerifyReport, Failure> {
    let (declared_pl, declared_or) = seq.family().declared_robustness();
    let check = |ch: ErrorChannel, declared: bool| -> Result<ChannelCheck, Failure> {
        let report = accumulate_delta_w(seq, &ch)?;
        let fd = first_order_oracle(seq, &ch, FD_STEP)?;
        let norm = report.delta_w.norm();
        Ok(ChannelCheck {
            norm,
            robust: norm <= crate::error_model::ROBUST_TOL,
            declared,
            fd_deviation: distance(&fd, &report.delta_w),
        })
    };
    let pulse_length = check(ErrorChannel::UNIT_PULSE_LENGTH, declared_pl)?;
    let off_resonance = check(ErrorChannel::UNIT_OFF_RESONANCE, declared_or)?;
    let both = accumulate_delta_w(seq, &ErrorChannel::combined(1.0, 1.0))?;
    let combined = CombinedCheck {
        norm: both.norm(),
        robust: both.norm() <= crate::error_model::ROBUST_TOL,
    };
    let product_fidelity = seq.product_fidelity();
    let fd_agreement =
        pulse_length.fd_deviation <= FD_AGREEMENT && off_resonance.fd_deviation <= FD_AGREEMENT;
    let declared_ok = (!pulse_length.declared || pulse_length.robust)
        && (!off_resonance.declared || off_resonance.robust);
    Ok(VerifyReport {
        family: seq.family().as_str().to_string(),
        pulses: seq.len(),
        product_fidelity,
        pass: declared_ok && product_fidelity >= PRODUCT_FIDELITY_MIN,
        pulse_length,
        off_resonance,
        combined,
        fd_agreement,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ReduceOutput {
    Pulse { theta: f64, phi: f64 },
    ZRotation { m: [f64; 3] },
}

impl From<ReducedProduct> for ReduceOutput {
    fn from(r: ReducedProduct) -> Self {
        match r {
            ReducedProduct::Pulse(p) => ReduceOutput::Pulse {
                theta: p.theta,
                phi: p.phi,
            },
            ReducedProduct::ZRotation(m) => ReduceOutput::ZRotation { m: m.0 },
        }
    }
}

#[derive(Debug, Serialize)]
struct ScalingOutput<'a> {
    family: &'a str,
    #[serde(flatten)]
    fit: crate::analysis::ScalingFit,
}

fn pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serialises");
    s.push('\n');
    s
}

fn emit(output: &Option<PathBuf>, text: &str, stdout: &mut dyn Write) -> Result<(), Failure> {
    match output {
        Some(path) => fs::write(path, text)
            .map_err(|e| Failure::new("io", format!("{}: {e}", path.display()))),
        None => Ok(stdout.write_all(text.as_bytes())?),
    }
}

fn thread_cap() -> Result<usize, Failure> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => v.trim().parse::<usize>().map_err(|_| {
            Failure::new(
                "invalid_argument",
                format!("{THREADS_ENV} must be a non-negative integer, got '{v}'"),
            )
        }),
        Err(_) => Ok(0),
    }
}

fn read_input(path: &PathBuf, stdin: &mut dyn Read) -> Result<String, Failure> {
    let mut text = String::new();
    if path.as_os_str() == "-" {
        stdin.read_to_string(&mut text)?;
    } else {
        text = fs::read_to_string(path)
            .map_err(|e| Failure::new("io", format!("{}: {e}", path.display())))?;
    }
    Ok(text)
}

/// Executes one parsed command; `Ok` carries the exit code.
pub fn execute(
    command: Command,
    stdin: &mut dyn Read,
    stdout: &mut dyn Write,
) -> Result<i32, Failure> {
    match command {
        Command::Synth(a) => {
            let seq = build_sequence(&a.sequence)?;
            let mut text = seq.to_json();
            text.push('\n');
            emit(&a.output, &text, stdout)?;
            Ok(EXIT_OK)
        }
        Command::Verify(a) => {
            let seq = match &a.input {
                Some(path) => PulseSequence::from_json(&read_input(path, stdin)?)?,
                None => {
                    let family = a
                        .family
                        .ok_or_else(|| Failure::new("usage", "verify needs --input or --family"))?;
                    build_sequence(&SequenceArgs {
                        family,
                        theta: a.theta.unwrap_or(std::f64::consts::PI),
                        phi: a.phi.unwrap_or(0.0),
                        winding: a.winding,
                    })?
                }
            };
            let report = verify_sequence(&seq)?;
            emit(&a.output, &pretty(&report), stdout)?;
            Ok(if report.pass { EXIT_OK } else { EXIT_VERIFY })
        }
        Command::Landscape(a) => {
            let seq = build_sequence(&a.sequence)?;
            let er = a.eps_range.unwrap_or(DEFAULT_RANGE);
            let epr = a.eps_prime_range.unwrap_or(DEFAULT_RANGE);
            let grid = match thread_cap()? {
                0 => landscape(&seq, er, epr, a.res)?,
                n => landscape_with_threads(&seq, er, epr, a.res, n)?,
            };
            let text = match a.format {
                Format::Csv => grid.to_csv(),
                Format::Json => pretty(&grid),
            };
            emit(&a.output, &text, stdout)?;
            Ok(EXIT_OK)
        }
        Command::Phase(a) => {
            let seq = build_sequence(&a.sequence)?;
            emit(&a.output, &pretty(&phase_decomposition(&seq)?), stdout)?;
            Ok(EXIT_OK)
        }
        Command::Scaling(a) => {
            let seq = build_sequence(&a.sequence)?;
            let strengths = a.strengths.map_or_else(|| DEFAULT_LADDER.to_vec(), |l| l.0);
            let fit = infidelity_scaling(&seq, a.axis, &strengths)?;
            let out = ScalingOutput {
                family: seq.family().as_str(),
                fit,
            };
            emit(&a.output, &pretty(&out), stdout)?;
            Ok(EXIT_OK)
        }
        Command::Reduce(a) => {
            let reduced: ReduceOutput = aj_product_reduce(&a.phases.0)?.into();
            emit(&a.output, &pretty(&reduced), stdout)?;
            Ok(EXIT_OK)
        }
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(
    args: I,
    stdin: &mut dyn Read,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{e}");
                    EXIT_OK
                }
                _ => {
                    let msg = e.to_string();
                    let first = msg
                        .lines()
                        .next()
                        .unwrap_or("")
                        .trim_start_matches("error: ");
                    let _ = writeln!(stderr, "{}", Failure::new("usage", first).to_json());
                    EXIT_USAGE
                }
            };
        }
    };
    match execute(cli.command, stdin, stdout) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(stderr, "{}", f.to_json());
            EXIT_USAGE
        }
    }
}
