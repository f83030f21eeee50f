use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64 as C64;
use serde::Serialize;

use ecsent_core::measures::two_branch_spectrum;
use ecsent_core::schemes::{self, BeamsplitterInput};
use ecsent_core::two_branch::{self, FourTermDescriptor, TwoBranchDescriptor};
use ecsent_core::verify::{self, Suite};
use ecsent_core::BranchState;

mod output;
mod parse;
mod sweep;

use sweep::{SweepFamily, SweepSpec};

/// Entanglement of two-branch nonorthogonal states: closed forms, sweeps,
/// generation schemes and the verification suite.
#[derive(Debug, Parser)]
#[command(name = "ecsent", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Concurrence of a two-branch (`--mu --nu`) or four-term (`--a --b --c --d`) state.
    Concurrence(ConcurrenceArgs),
    /// Tabulate concurrence and entropy against the coherent amplitude.
    Sweep(SweepArgs),
    /// Run a generation scheme and print its report.
    Simulate(SimulateArgs),
    /// Run the acceptance checks.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct Sink {
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write to this file instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Complex values are written `re`, `imj` or `re+imj`.
#[derive(Debug, Args)]
struct ConcurrenceArgs {
    #[arg(long, allow_hyphen_values = true)]
    mu: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    nu: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    a: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    b: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    c: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    d: Option<String>,
    /// `<A|C>`.
    #[arg(long, allow_hyphen_values = true)]
    p1: String,
    /// `<D|B>`.
    #[arg(long, allow_hyphen_values = true)]
    p2: String,
    #[command(flatten)]
    sink: Sink,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(long, value_enum)]
    family: SweepFamily,
    /// Number of modes (`ecs_pm`, `cascade`) or the half-size `n` (`odd_scaled`).
    #[arg(long, default_value_t = 2)]
    n: usize,
    /// Modes on the first side of the cut, numbered from 1, comma separated.
    #[arg(long, default_value = "1")]
    cut: String,
    /// Amplitudes as `start:stop:count`, both ends included.
    #[arg(long)]
    alpha: String,
    /// Second amplitude for `antisymmetric`, `symmetric` (default 0) and
    /// `cross_kerr` (default: equal to alpha).
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<String>,
    #[command(flatten)]
    sink: Sink,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
enum SchemeName {
    Cswap,
    Beamsplitter,
    KerrUn,
    W,
    Cascade,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
enum InputKind {
    OddPlusCoherent,
    EvenPlusCoherent,
    TwoOdd,
    TwoEven,
    OddEven,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[arg(long, value_enum)]
    scheme: SchemeName,
    #[arg(long, allow_hyphen_values = true, default_value = "1")]
    alpha: String,
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<String>,
    #[arg(long, default_value_t = 3)]
    n: usize,
    /// Input of the beam-splitter scheme.
    #[arg(long, value_enum, default_value = "odd_plus_coherent")]
    input_kind: InputKind,
    /// Controlled-swap register states as JSON files; default to coherent
    /// states of `--alpha` and `--beta`.
    #[arg(long)]
    state_a: Option<PathBuf>,
    #[arg(long)]
    state_b: Option<PathBuf>,
    /// Write to this file instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// `all`, or a criterion number such as `7` or `c07`.
    #[arg(long, default_value = "all")]
    suite: String,
    /// Write to this file instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    /// Bad flags or values; exit code 2.
    Input(String),
    /// A check or cross-check disagreed; exit code 1.
    Verification(String),
}

impl From<ecsent_core::Error> for Failure {
    fn from(e: ecsent_core::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Concurrence(args) => concurrence(args),
        Command::Sweep(args) => run_sweep(args),
        Command::Simulate(args) => simulate(args),
        Command::Verify(args) => run_verify(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn complex_arg(text: &str) -> Result<C64, Failure> {
    parse::complex(text).map_err(Failure::Input)
}

fn opt_complex(text: &Option<String>) -> Result<Option<C64>, Failure> {
    text.as_deref().map(complex_arg).transpose()
}

#[derive(Serialize)]
struct ConcurrenceReport {
    form: &'static str,
    concurrence: f64,
    entropy_ebits: f64,
    /// Only meaningful for the two-branch form.
    mes_condition: Option<bool>,
}

fn concurrence(args: ConcurrenceArgs) -> Result<(), Failure> {
    let p1 = complex_arg(&args.p1)?;
    let p2 = complex_arg(&args.p2)?;
    let two = [&args.mu, &args.nu];
    let four = [&args.a, &args.b, &args.c, &args.d];
    let report = if two.iter().all(|x| x.is_some()) && four.iter().all(|x| x.is_none()) {
        let d = TwoBranchDescriptor::new(complex_arg(two[0].as_ref().unwrap())?, complex_arg(two[1].as_ref().unwrap())?, p1, p2)?;
        ConcurrenceReport {
            form: "two_branch",
            concurrence: two_branch::concurrence_closed_form(&d)?,
            entropy_ebits: two_branch::spectrum_closed_form(&d)?.entropy(),
            mes_condition: Some(two_branch::mes_condition(&d)),
        }
    } else if four.iter().all(|x| x.is_some()) && two.iter().all(|x| x.is_none()) {
        let v: Vec<C64> = four.iter().map(|x| complex_arg(x.as_ref().unwrap())).collect::<Result<_, _>>()?;
        let f = FourTermDescriptor::normalized(v[0], v[1], v[2], v[3], p1, p2)?;
        let (_, conc) = two_branch::four_term_analysis(&f)?;
        ConcurrenceReport {
            form: "four_term",
            concurrence: conc,
            entropy_ebits: two_branch_spectrum(conc / 2.0)?.entropy(),
            mes_condition: None,
        }
    } else {
        return Err(Failure::Input("give either --mu and --nu, or all of --a --b --c --d".into()));
    };
    let text = match args.sink.format {
        None => format!("{}\n", output::num(report.concurrence)),
        Some(Format::Json) => output::json_text(&report),
        Some(Format::Csv) => format!(
            "measure,value\nconcurrence,{}\nentropy,{}\n",
            output::num(report.concurrence),
            output::num(report.entropy_ebits)
        ),
    };
    output::emit(&text, args.sink.out.as_deref())?;
    Ok(())
}

fn run_sweep(args: SweepArgs) -> Result<(), Failure> {
    let alphas = parse::range(&args.alpha).map_err(Failure::Input)?;
    let cut = parse::cut(&args.cut).map_err(Failure::Input)?;
    let spec = SweepSpec { family: args.family, n: args.n, cut, beta: opt_complex(&args.beta)? };
    let result = sweep::run(&spec, &alphas)?;
    let text = match args.sink.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut s = String::from("alpha,measure,value,backend\n");
            for r in &result.rows {
                s.push_str(&format!("{},{},{},{}\n", output::num(r.alpha), r.measure, output::num(r.value), r.backend));
            }
            s
        }
        Format::Json => output::json_text(&result.rows),
    };
    output::emit(&text, args.sink.out.as_deref())?;
    if let Some(r) = result.flagged.first() {
        return Err(Failure::Verification(format!(
            "{} row(s) differ from the closed form by more than {:e}; first at alpha = {}, {} ({})",
            result.flagged.len(),
            sweep::AGREEMENT_TOL,
            output::num(r.alpha),
            r.measure,
            r.backend
        )));
    }
    Ok(())
}

fn read_state(path: &PathBuf) -> Result<BranchState, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    Ok(BranchState::from_json(&text)?)
}

fn simulate(args: SimulateArgs) -> Result<(), Failure> {
    let alpha = complex_arg(&args.alpha)?;
    let beta = opt_complex(&args.beta)?;
    let report = match args.scheme {
        SchemeName::Cswap => {
            let a = match &args.state_a {
                Some(p) => read_state(p)?,
                None => BranchState::coherent(vec![alpha])?,
            };
            let b = match &args.state_b {
                Some(p) => read_state(p)?,
                None => BranchState::coherent(vec![beta.unwrap_or(-alpha)])?,
            };
            schemes::run_cswap(&a, &b)?
        }
        SchemeName::Beamsplitter => {
            let beta = beta.unwrap_or(C64::new(0.7, 0.0));
            let input = match args.input_kind {
                InputKind::OddPlusCoherent => BeamsplitterInput::OddPlusCoherent { alpha, beta },
                InputKind::EvenPlusCoherent => BeamsplitterInput::EvenPlusCoherent { alpha, beta },
                InputKind::TwoOdd => BeamsplitterInput::TwoOdd(alpha),
                InputKind::TwoEven => BeamsplitterInput::TwoEven(alpha),
                InputKind::OddEven => BeamsplitterInput::OddEven(alpha),
            };
            schemes::run_beamsplitter_scheme(input)?
        }
        SchemeName::KerrUn => schemes::run_kerr_un(alpha, args.n)?,
        SchemeName::W => schemes::run_w_generation(args.n)?,
        SchemeName::Cascade => schemes::run_cascade(alpha, args.n)?,
    };
    output::emit(&output::json_text(&report), args.out.as_deref())?;
    Ok(())
}

fn parse_suite(text: &str) -> Result<Suite, Failure> {
    if text == "all" {
        return Ok(Suite::All);
    }
    let digits = text.strip_prefix('c').unwrap_or(text);
    match digits.parse::<u8>() {
        Ok(k) if verify::CRITERIA.contains(&k) => Ok(Suite::Criterion(k)),
        _ => Err(Failure::Input(format!("unknown suite `{text}`; use `all` or 1..=11"))),
    }
}

fn run_verify(args: VerifyArgs) -> Result<(), Failure> {
    let suite = parse_suite(&args.suite)?;
    let results = verify::run_suite(suite);
    output::emit(&output::json_text(&results), args.out.as_deref())?;
    let failed: Vec<&str> = results.iter().filter(|r| !r.pass).map(|r| r.check.as_str()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Verification(failed.join(", ")))
    }
}
