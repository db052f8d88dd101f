//! The `qcap` command line.
//!
//! ```text
//! qcap info        --problem p.json            entropies of the problem's state
//! qcap ea-capacity --problem p.json            constrained C_ea with gap certificate
//! qcap holevo      --problem p.json --m 3      heuristic constrained χ
//! qcap sweep       --problem p.json            CSV over energies (or --cutoffs)
//! qcap verify all                              invariant suites
//! ```
//!
//! Exit codes: 0 success (possibly flagged uncertified), 2 infeasible or
//! invalid input, 3 internal invariant violation.

pub mod problem;
pub mod record;
pub mod verify;

use std::fmt;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand};
use rayon::prelude::*;

use crate::capacity::{
    attainment_check, maximize_chi, maximize_mutual_info, CapacityResult, SolverOptions,
};
use crate::channel::KrausChannel;
use crate::entropy::{
    free_energy_residual, mutual_information_via_relent, ExtendedReal, MutualInformationParts,
    MI_CROSS_TOL,
};
use crate::error::Error;
use crate::observable::{solve_beta, BetaRegime};

use problem::{matrix_to_rows, ProblemFile, Units};
use record::{format_float, inputs_digest, ResultRecord};
use verify::{run_suite, suite_name, Suite};

/// Ensemble size for `holevo` and `sweep` when neither flag nor file sets one.
pub const DEFAULT_ENSEMBLE_SIZE: usize = 2;

#[derive(Debug)]
pub enum CliError {
    /// Unreadable or invalid problem, bad flags, infeasible constraint.
    Input(String),
    /// A library error, classified by [`Error::is_input_error`].
    Compute(Error),
    /// A cross-check or invariant failed.
    Invariant(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Compute(e) if e.is_input_error() => 2,
            CliError::Compute(_) | CliError::Invariant(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) => f.write_str(m),
            CliError::Compute(e) => write!(f, "{e}"),
            CliError::Invariant(m) => write!(f, "invariant violation: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Compute(e)
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "qcap",
    version,
    about = "Constrained classical and entanglement-assisted capacities of quantum channels"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Problem file (JSON, `"schema": 1`).
    #[arg(long, global = true)]
    pub problem: Option<PathBuf>,

    /// Report information quantities in bits instead of nats.
    #[arg(long, global = true)]
    pub bits: bool,

    /// Seed for randomized restarts and verification instances.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Ensemble size for the Holevo heuristic.
    #[arg(long, global = true)]
    pub m: Option<usize>,

    /// Fock cutoffs for a truncation sweep of a Gaussian problem.
    #[arg(long, global = true, value_delimiter = ',')]
    pub cutoffs: Vec<usize>,

    /// Energies for `sweep` (overrides the problem file's list).
    #[arg(long, global = true, value_delimiter = ',')]
    pub energies: Vec<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Entropies, mutual information and free-energy residual of the problem's state.
    Info,
    /// Entanglement-assisted capacity under the constraint.
    EaCapacity,
    /// Heuristic lower bound on the constrained Holevo quantity.
    Holevo,
    /// CSV of C_ea, χ and their ratio over energies, or of C_ea over cutoffs.
    Sweep,
    /// Run an invariant suite.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        /// Test-only: inject one failure chosen by the seed.
        #[arg(long, hide = true)]
        corrupt: bool,
    },
}

/// Parses `args` (including the program name), runs the command and
/// returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("qcap: error: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: &Cli) -> Result<i32, CliError> {
    if let Command::Verify { suite, corrupt } = cli.command {
        return cmd_verify(cli, suite, corrupt);
    }
    let path = cli
        .problem
        .as_ref()
        .ok_or_else(|| CliError::Input("--problem <file> is required".into()))?;
    let (problem, bytes) = ProblemFile::read(path)?;
    let ctx = Context::new(cli, problem, &bytes)?;
    match cli.command {
        Command::Info => cmd_info(&ctx),
        Command::EaCapacity => cmd_ea_capacity(&ctx),
        Command::Holevo => cmd_holevo(&ctx),
        Command::Sweep => cmd_sweep(&ctx),
        Command::Verify { .. } => unreachable!(),
    }
}

/// Problem plus the flag overrides, shared by the problem commands.
struct Context<'a> {
    cli: &'a Cli,
    problem: ProblemFile,
    opts: SolverOptions,
    units: Units,
    m: usize,
    digest: String,
}

impl<'a> Context<'a> {
    fn new(cli: &'a Cli, problem: ProblemFile, bytes: &[u8]) -> Result<Self, CliError> {
        let mut opts = problem.solver.clone();
        if let Some(seed) = cli.seed {
            opts.seed = seed;
        }
        opts.validate()
            .map_err(|e| CliError::Input(format!("problem file field `solver`: {e}")))?;
        let units = if cli.bits { Units::Bits } else { problem.units };
        let m = cli.m.or(problem.m).unwrap_or(DEFAULT_ENSEMBLE_SIZE);
        let join = |v: &[String]| v.join(",");
        let digest = inputs_digest(
            bytes,
            &[
                ("command", format!("{:?}", cli.command)),
                ("seed", opts.seed.to_string()),
                ("units", units.name().to_string()),
                ("m", m.to_string()),
                (
                    "cutoffs",
                    join(
                        &cli.cutoffs
                            .iter()
                            .map(|c| c.to_string())
                            .collect::<Vec<_>>(),
                    ),
                ),
                (
                    "energies",
                    join(
                        &cli.energies
                            .iter()
                            .map(|e| format_float(*e))
                            .collect::<Vec<_>>(),
                    ),
                ),
            ],
        );
        Ok(Self {
            cli,
            problem,
            opts,
            units,
            m,
            digest,
        })
    }

    fn record(&self, command: &str) -> ResultRecord {
        ResultRecord::new(command, self.digest.clone(), self.opts.seed, self.units)
    }

    fn channel(&self) -> Result<KrausChannel, CliError> {
        self.problem.build_channel()
    }

    fn emit(&self, text: &str) -> Result<(), CliError> {
        emit(self.cli, text)
    }
}

fn emit(cli: &Cli, text: &str) -> Result<(), CliError> {
    match &cli.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::Input(format!("cannot write to stdout: {e}")))
        }
    }
}

fn cmd_info(ctx: &Context<'_>) -> Result<i32, CliError> {
    let start = Instant::now();
    let ch = ctx.channel()?;
    let s = ctx
        .problem
        .build_state(ch.dim_in())?
        .ok_or_else(|| CliError::Input("problem file field `state`: required by `info`".into()))?;
    let c = ctx.problem.build_constraint(ch.dim_in(), None)?;
    let parts = MutualInformationParts::compute(&s, &ch)?;
    let via_relent = mutual_information_via_relent(&s, &ch)?;
    let difference = match via_relent {
        ExtendedReal::Finite(v) => (v - parts.value()).abs(),
        ExtendedReal::Infinite => f64::INFINITY,
    };
    let f = c.observable();
    let (beta, regime) = match solve_beta(f, c.energy())? {
        b if b.regime == BetaRegime::Interior => (b.beta, "interior"),
        b if b.regime == BetaRegime::Unconstrained => (1.0, "unconstrained"),
        _ => (1.0, "ground_space"),
    };
    let units = ctx.units;
    let mut rec = ctx.record("info");
    rec.info("input_entropy", parts.input_entropy, units);
    rec.info("output_entropy", parts.output_entropy, units);
    rec.info("entropy_exchange", parts.entropy_exchange, units);
    rec.info("mutual_information", parts.value(), units);
    rec.info("mutual_information_relent", via_relent.to_f64(), units);
    rec.info("route_difference", difference, units);
    rec.raw("energy", f.operator().expectation(&s));
    rec.raw("constraint_slack", c.slack(&s)?);
    rec.raw("beta", beta);
    rec.raw(
        "free_energy_residual",
        free_energy_residual(&s, f, beta)?.to_f64(),
    );
    rec.diagnostic("beta_regime", regime);
    rec.flag("certified");
    rec.wall_time_s = start.elapsed().as_secs_f64();
    ctx.emit(&rec.to_json())?;
    if difference > MI_CROSS_TOL {
        return Err(CliError::Invariant(format!(
            "mutual-information routes differ by {difference:e} (tol {MI_CROSS_TOL:e})"
        )));
    }
    Ok(0)
}

fn solver_flags(rec: &mut ResultRecord, r: &CapacityResult) {
    if r.heuristic {
        rec.flag("HEURISTIC");
    } else if r.certified {
        rec.flag("certified");
    } else {
        rec.flag("uncertified");
    }
    if r.diagnostics.tight_ground {
        rec.flag("tight_ground");
    }
}

fn cmd_ea_capacity(ctx: &Context<'_>) -> Result<i32, CliError> {
    let start = Instant::now();
    let ch = ctx.channel()?;
    let c = ctx.problem.build_constraint(ch.dim_in(), None)?;
    let r = maximize_mutual_info(&ch, &c, &ctx.opts)?;
    let units = ctx.units;
    let mut rec = ctx.record("ea-capacity");
    rec.info("capacity", r.value, units);
    rec.raw("energy", c.energy() - r.constraint_slack);
    rec.raw("constraint_slack", r.constraint_slack);
    rec.raw("iterations", r.iterations as f64);
    rec.duality_gap = r.duality_gap.map(|g| units.convert(g));
    solver_flags(&mut rec, &r);
    if !r.certified {
        eprintln!("qcap: warning: duality gap did not reach gap_tol; result is uncertified");
    }
    if ch.dim_in() == ch.dim_out() {
        rec.diagnostic("attainment", attainment_check(&ch, &c)?);
    }
    rec.diagnostic("solver", &r.diagnostics);
    if let Some(s) = r.optimizer.state() {
        rec.diagnostic("optimizer", matrix_to_rows(s.matrix()));
    }
    rec.wall_time_s = start.elapsed().as_secs_f64();
    ctx.emit(&rec.to_json())?;
    Ok(0)
}

fn cmd_holevo(ctx: &Context<'_>) -> Result<i32, CliError> {
    let start = Instant::now();
    let ch = ctx.channel()?;
    let c = ctx.problem.build_constraint(ch.dim_in(), None)?;
    let r = maximize_chi(&ch, &c, ctx.m, &ctx.opts)?;
    let units = ctx.units;
    let mut rec = ctx.record("holevo");
    rec.info("chi", r.value, units);
    rec.raw("energy", c.energy() - r.constraint_slack);
    rec.raw("constraint_slack", r.constraint_slack);
    rec.raw("m", ctx.m as f64);
    solver_flags(&mut rec, &r);
    rec.diagnostic("solver", &r.diagnostics);
    if let Some(e) = r.optimizer.ensemble() {
        rec.diagnostic("probabilities", e.probabilities());
        let states: Vec<_> = e
            .states()
            .iter()
            .map(|s| matrix_to_rows(s.matrix()))
            .collect();
        rec.diagnostic("states", states);
    }
    rec.wall_time_s = start.elapsed().as_secs_f64();
    ctx.emit(&rec.to_json())?;
    Ok(0)
}

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new())
}

fn csv_text(w: csv::Writer<Vec<u8>>) -> Result<String, CliError> {
    let bytes = w
        .into_inner()
        .map_err(|e| CliError::Invariant(format!("csv buffer: {e}")))?;
    String::from_utf8(bytes).map_err(|e| CliError::Invariant(format!("csv encoding: {e}")))
}

fn csv_row(w: &mut csv::Writer<Vec<u8>>, fields: &[String]) -> Result<(), CliError> {
    w.write_record(fields)
        .map_err(|e| CliError::Invariant(format!("csv write: {e}")))
}

fn opt_float(v: Option<f64>) -> String {
    v.map(format_float).unwrap_or_default()
}

fn cmd_sweep(ctx: &Context<'_>) -> Result<i32, CliError> {
    let section = ctx.problem.sweep.clone().unwrap_or_default();
    let cutoffs = if ctx.cli.cutoffs.is_empty() {
        section.cutoffs
    } else {
        ctx.cli.cutoffs.clone()
    };
    if !cutoffs.is_empty() {
        return sweep_cutoffs(ctx, &cutoffs);
    }
    let energies = if ctx.cli.energies.is_empty() {
        section.energies
    } else {
        ctx.cli.energies.clone()
    };
    if energies.is_empty() {
        return Err(CliError::Input(
            "sweep needs energies (--energies or problem field `sweep.energies`) or --cutoffs"
                .into(),
        ));
    }
    if energies.iter().any(|e| !(e.is_finite() && *e > 0.0))
        || energies.windows(2).any(|w| w[1] <= w[0])
    {
        return Err(CliError::Input(
            "sweep energies must be positive and strictly ascending".into(),
        ));
    }
    let ch = ctx.channel()?;
    let units = ctx.units;
    let rows: Vec<Vec<String>> = energies
        .par_iter()
        .map(|&e| {
            let row = ctx
                .problem
                .build_constraint(ch.dim_in(), Some(e))
                .and_then(|c| {
                    let cea = maximize_mutual_info(&ch, &c, &ctx.opts)?;
                    let chi = maximize_chi(&ch, &c, ctx.m, &ctx.opts)?;
                    Ok((cea, chi))
                });
            match row {
                Ok((cea, chi)) => {
                    let gain = (chi.value > 0.0).then(|| cea.value / chi.value);
                    let status = if cea.certified { "ok" } else { "uncertified" };
                    vec![
                        format_float(e),
                        format_float(units.convert(cea.value)),
                        format_float(units.convert(chi.value)),
                        opt_float(gain),
                        opt_float(cea.duality_gap.map(|g| units.convert(g))),
                        status.to_string(),
                    ]
                }
                Err(err) => vec![
                    format_float(e),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                    format!("error: {err}"),
                ],
            }
        })
        .collect();
    let mut w = csv_writer();
    let header = [
        "E",
        "C_ea",
        "chi_heuristic",
        "G_lower_bound_based",
        "gap",
        "status",
    ];
    csv_row(&mut w, &header.map(String::from))?;
    for r in &rows {
        csv_row(&mut w, r)?;
    }
    ctx.emit(&csv_text(w)?)?;
    Ok(0)
}

fn sweep_cutoffs(ctx: &Context<'_>, cutoffs: &[usize]) -> Result<i32, CliError> {
    if !ctx.problem.is_gaussian() {
        return Err(CliError::Input(
            "--cutoffs applies only to gaussian problems".into(),
        ));
    }
    if cutoffs.windows(2).any(|w| w[1] <= w[0]) {
        return Err(CliError::Input("cutoffs must be strictly ascending".into()));
    }
    let units = ctx.units;
    let results: Vec<Result<CapacityResult, CliError>> = cutoffs
        .par_iter()
        .map(|&d| {
            let ch = ctx.problem.build_gaussian(d)?;
            let c = ctx.problem.build_constraint(ch.dim_in(), None)?;
            Ok(maximize_mutual_info(&ch, &c, &ctx.opts)?)
        })
        .collect();
    let mut w = csv_writer();
    let header = ["cutoff", "E", "C_ea", "increment", "gap", "status"];
    csv_row(&mut w, &header.map(String::from))?;
    let mut prev: Option<f64> = None;
    for (&d, r) in cutoffs.iter().zip(&results) {
        let e = format_float(ctx.problem.constraint.energy);
        let row = match r {
            Ok(r) => {
                let inc = prev.map(|p| r.value - p);
                prev = Some(r.value);
                let status = match inc {
                    Some(i) if i < -2.0 * ctx.opts.gap_tol => "decreasing",
                    _ if !r.certified => "uncertified",
                    _ => "ok",
                };
                vec![
                    d.to_string(),
                    e,
                    format_float(units.convert(r.value)),
                    opt_float(inc.map(|i| units.convert(i))),
                    opt_float(r.duality_gap.map(|g| units.convert(g))),
                    status.to_string(),
                ]
            }
            Err(err) => {
                prev = None;
                vec![
                    d.to_string(),
                    e,
                    String::new(),
                    String::new(),
                    String::new(),
                    format!("error: {err}"),
                ]
            }
        };
        csv_row(&mut w, &row)?;
    }
    ctx.emit(&csv_text(w)?)?;
    Ok(0)
}

fn cmd_verify(cli: &Cli, suite: Suite, corrupt: bool) -> Result<i32, CliError> {
    let seed = cli.seed.unwrap_or(0);
    let report = run_suite(suite, seed, corrupt);
    match &cli.out {
        Some(_) => {
            let json = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
            emit(cli, &json)?;
            eprint!("{}", report.render());
        }
        None => emit(cli, &report.render())?,
    }
    if report.passed() {
        Ok(0)
    } else {
        Err(CliError::Invariant(format!(
            "suite {}: {} of {} checks failed",
            suite_name(suite),
            report.failures(),
            report.checks.len()
        )))
    }
}
