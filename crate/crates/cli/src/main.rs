use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

use weightlab_cli::config::parse_grid;
use weightlab_cli::{emit, run, CliError, Experiment, FileConfig, Overrides, ResolvedConfig};

#[derive(Parser)]
#[command(name = "weightlab", version, about = "Weighted eigenvalue experiments on the disk")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Radial versus full Dirichlet minima over a range of gamma.
    PdScan(Common),
    /// Mean-zero minimizers over alpha and q.
    PmSolve(Common),
    /// Antisymmetry-breaking certificates over q.
    PmQScan(Common),
    /// Weighted Neumann eigenvalue of symmetric domains against the equal-measure disk.
    SwCompare(Common),
    /// Closed-form ball spectra and root identities.
    BesselTable(Common),
    /// Two-point, foliated Schwarz and Hardy-Littlewood checks on random fields.
    RearrangeCheck(Common),
}

#[derive(Args)]
struct Common {
    /// TOML configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (default: results).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Grid size MxK (finite element mesh for sw-compare).
    #[arg(long, value_parser = grid_arg)]
    grid: Option<(usize, usize)>,
    /// Solver stopping tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Worker threads (default: one per core).
    #[arg(long)]
    jobs: Option<usize>,
}

fn grid_arg(s: &str) -> Result<(usize, usize), String> {
    parse_grid(s).map_err(|e| e.to_string())
}

fn execute(experiment: Experiment, args: Common) -> Result<ExitCode, CliError> {
    let file = match &args.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let overrides = Overrides {
        seed: args.seed,
        grid: args.grid,
        tol: args.tol,
        out: args.out,
        jobs: args.jobs,
    };
    let cfg = ResolvedConfig::resolve(experiment, &file, &overrides)?;
    let out = overrides.out.or(file.out).unwrap_or_else(|| PathBuf::from("results"));
    let jobs = overrides.jobs.or(file.jobs).unwrap_or(0);
    let rs = run(&cfg, jobs)?;
    let written = emit(&rs, &out)?;
    println!("{}", written.json.display());
    println!("{}", written.csv.display());
    for p in &written.plots {
        println!("{}", p.display());
    }
    let failed = rs.failed_rows();
    if failed > 0 {
        eprintln!("{failed} of {} rows failed", rs.rows.len());
        for r in rs.rows.iter().filter(|r| r.record.error.is_some()) {
            eprintln!("  row {}: {}", r.index, r.record.error.as_deref().unwrap_or(""));
        }
        return Ok(ExitCode::from(2));
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    // usage errors exit with 1; status 2 is reserved for failed rows
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let (experiment, args) = match cli.command {
        Command::PdScan(a) => (Experiment::PdScan, a),
        Command::PmSolve(a) => (Experiment::PmSolve, a),
        Command::PmQScan(a) => (Experiment::PmQScan, a),
        Command::SwCompare(a) => (Experiment::SwCompare, a),
        Command::BesselTable(a) => (Experiment::BesselTable, a),
        Command::RearrangeCheck(a) => (Experiment::RearrangeCheck, a),
    };
    match execute(experiment, args) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
