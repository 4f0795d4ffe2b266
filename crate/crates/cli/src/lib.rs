//! The `mlg` command-line tool.
//!
//! Exit codes: 0 success, 1 infeasible, 2 input error, 3 exact-search limits
//! exceeded. Diagnostics go to standard error; `MLG_LOG_LEVEL` sets the log
//! level (error, warn, info, debug).

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use mlg_core::io::{emit_report, parse_instance, render_gap_table, ReportFormat, ReportMeta};
use mlg_core::mlg::{layer_stats, validate};
use mlg_core::optimizer::{solve, SolveError, SolverConfig, SolverMode};
use mlg_core::synthesis::synthesize;
use mlg_core::{Instance, MultiLayerGraph};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INFEASIBLE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_LIMITS: i32 = 3;

pub const LOG_ENV: &str = "MLG_LOG_LEVEL";

#[derive(Debug, Parser)]
#[command(name = "mlg", version, about = "Two-level MPLS-over-transport network design")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse and check an instance file.
    Validate { file: PathBuf },
    /// Build the multilayer graph and print per-layer statistics.
    Synth { file: PathBuf },
    /// Compute a design.
    Solve {
        file: PathBuf,
        #[arg(long, value_enum)]
        mode: Option<Mode>,
        #[arg(long)]
        seed: Option<u64>,
        /// Local search move evaluations.
        #[arg(long)]
        budget: Option<u64>,
        /// Wall-clock limit in seconds; makes results timing dependent.
        #[arg(long)]
        time_limit: Option<f64>,
        /// Write the report here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Run every mode and print costs with the gap to the optimum.
    Compare { file: PathBuf },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Mode {
    Greedy,
    Ls,
    Exact,
}

impl From<Mode> for SolverMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Greedy => SolverMode::Greedy,
            Mode::Ls => SolverMode::GreedyPlusLocalSearch,
            Mode::Exact => SolverMode::ExactBruteForce,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Structured,
    Dot,
}

impl From<Format> for ReportFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Text => ReportFormat::Text,
            Format::Structured => ReportFormat::Structured,
            Format::Dot => ReportFormat::Dot,
        }
    }
}

/// A failed command: exit code plus a one-line diagnostic.
struct Failure(i32, String);

type CmdResult = Result<(), Failure>;

fn input_err(msg: impl Into<String>) -> Failure {
    Failure(EXIT_INPUT, msg.into())
}

fn solve_err(file: &Path, e: SolveError) -> Failure {
    let code = match e {
        SolveError::Infeasible(_) => EXIT_INFEASIBLE,
        SolveError::LimitsExceeded(_) => EXIT_LIMITS,
        SolveError::Model(_) | SolveError::Design(_) => EXIT_INPUT,
    };
    Failure(code, format!("{}: {e}", file.display()))
}

fn load(file: &Path) -> Result<Instance, Failure> {
    let bytes = std::fs::read(file).map_err(|e| input_err(format!("{}: {e}", file.display())))?;
    let inst: Instance = parse_instance(&bytes).map_err(|e| input_err(format!("{}: {e}", file.display())))?;
    log::info!("loaded {} from {}", inst.name, file.display());
    Ok(inst)
}

fn build(file: &Path, inst: &Instance) -> Result<MultiLayerGraph, Failure> {
    synthesize(inst).map_err(|e| input_err(format!("{}: {}", file.display(), e.to_string().replace('\n', "; "))))
}

fn write_out(out: &mut dyn Write, text: &str) -> CmdResult {
    out.write_all(text.as_bytes()).map_err(|e| input_err(format!("cannot write output: {e}")))
}

fn init_logging() {
    let env = env_logger::Env::new().filter_or(LOG_ENV, "warn");
    let _ = env_logger::Builder::from_env(env).format_timestamp(None).target(env_logger::Target::Stderr).try_init();
}

/// Runs the tool on `argv` (including the program name), writing results to
/// `out` and diagnostics to `err`. Returns the exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(rendered.as_bytes()) } else { out.write_all(rendered.as_bytes()) };
            return code;
        }
    };
    let result = match cli.command {
        Command::Validate { file } => cmd_validate(&file, out),
        Command::Synth { file } => cmd_synth(&file, out),
        Command::Solve { file, mode, seed, budget, time_limit, out: path, format } => {
            let opts = SolveOpts { mode, seed, budget, time_limit, out: path, format };
            cmd_solve(&file, &opts, out)
        }
        Command::Compare { file } => cmd_compare(&file, out),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(Failure(code, msg)) => {
            let _ = writeln!(err, "error: {msg}");
            code
        }
    }
}

/// Entry point used by the binary.
pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    init_logging();
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(argv, &mut stdout.lock(), &mut stderr.lock())
}

fn cmd_validate(file: &Path, out: &mut dyn Write) -> CmdResult {
    let inst = load(file)?;
    write_out(
        out,
        &format!(
            "{}: valid ({} nodes, {} LSR candidates, {} links, {} demands)\n",
            inst.name,
            inst.transport_nodes.len(),
            inst.lsr_candidates().count(),
            inst.transport_links.len(),
            inst.demands.len()
        ),
    )
}

fn cmd_synth(file: &Path, out: &mut dyn Write) -> CmdResult {
    let inst = load(file)?;
    let mlg = build(file, &inst)?;
    let mut text = format!("{}: {} layers\n", inst.name, mlg.layers().len());
    for s in layer_stats(&mlg) {
        text += &format!("  {:<4} {:<16} {:>4} vertices {:>5} edges\n", s.layer, s.label, s.vertices, s.edges);
    }
    text += &format!(
        "  inter-layer {} edges\n  validation: {}\n",
        mlg.inter_layer_edges().count(),
        if validate(&mlg).is_valid() { "ok" } else { "FAILED" }
    );
    write_out(out, &text)
}

struct SolveOpts {
    mode: Option<Mode>,
    seed: Option<u64>,
    budget: Option<u64>,
    time_limit: Option<f64>,
    out: Option<PathBuf>,
    format: Format,
}

fn cmd_solve(file: &Path, opts: &SolveOpts, out: &mut dyn Write) -> CmdResult {
    let inst = load(file)?;
    let mlg = build(file, &inst)?;
    let cfg = SolverConfig {
        mode: opts.mode.map_or(inst.solver.mode, SolverMode::from),
        local_search_budget: opts.budget.unwrap_or(inst.solver.local_search_budget),
        rng_seed: opts.seed.unwrap_or(inst.solver.rng_seed),
        time_limit: opts.time_limit.or(inst.solver.time_limit),
    };
    let design = solve(&mlg, &inst, &cfg).map_err(|e| solve_err(file, e))?;
    let exact_cost = (cfg.mode == SolverMode::ExactBruteForce).then_some(design.cost);
    let meta = ReportMeta { mode: cfg.mode, rng_seed: cfg.rng_seed, local_search_budget: cfg.local_search_budget, exact_cost };
    let report = emit_report(&mlg, &inst, &design, &meta, opts.format.into())
        .map_err(|e| input_err(format!("{}: {e}", file.display())))?;
    match &opts.out {
        Some(path) => std::fs::write(path, report).map_err(|e| input_err(format!("{}: {e}", path.display()))),
        None => write_out(out, &report),
    }
}

fn cmd_compare(file: &Path, out: &mut dyn Write) -> CmdResult {
    let inst = load(file)?;
    let mlg = build(file, &inst)?;
    let mut rows = BTreeMap::new();
    let mut refused = None;
    for mode in [SolverMode::Greedy, SolverMode::GreedyPlusLocalSearch, SolverMode::ExactBruteForce] {
        let cfg = SolverConfig { mode, ..inst.solver.clone() };
        match solve(&mlg, &inst, &cfg) {
            Ok(d) => {
                rows.insert(mode, Some(d.cost));
            }
            Err(SolveError::LimitsExceeded(r)) => {
                rows.insert(mode, None);
                refused = Some(r);
            }
            Err(SolveError::Infeasible(cert)) if mode == SolverMode::ExactBruteForce => {
                return Err(Failure(EXIT_INFEASIBLE, format!("{}: infeasible: {cert}", file.display())));
            }
            Err(SolveError::Infeasible(_)) => {
                rows.insert(mode, None);
            }
            Err(e) => return Err(solve_err(file, e)),
        }
    }
    write_out(out, &render_gap_table(&rows))?;
    match refused {
        Some(r) => Err(Failure(EXIT_LIMITS, format!("{}: exact search refused: {r}", file.display()))),
        None => Ok(()),
    }
}
