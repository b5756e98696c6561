//! Command-line tool for multicoloring cannonball graphs.
//!
//! Exit codes: 0 success / verified; 1 verification failed or no definitive
//! oracle answer; 2 input error; 3 internal invariant failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cannonball::lattice::StackingSequence;
use cannonball::multicolor::{self, SolveError};
use cannonball::verify::{self, OracleOutcome};
use cannonball_cli::files::{ColoringFile, InstanceFile};
use cannonball_cli::{bench, gen, render};

const EXIT_OK: u8 = 0;
const EXIT_FAILED_CHECK: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_INTERNAL: u8 = 3;

#[derive(Parser)]
#[command(name = "cannonball", version, about = "Multicoloring of cannonball graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random instance.
    Gen(GenArgs),
    /// Multicolor an instance and write the coloring.
    Solve(SolveArgs),
    /// Check a coloring against an instance.
    Verify(VerifyArgs),
    /// Exact multichromatic number by exhaustive search (tiny instances).
    Oracle(OracleArgs),
    /// Solve every instance in a directory and write a CSV report.
    Bench(BenchArgs),
    /// Render an instance and coloring as SVG.
    Render(RenderArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Number of layers; must match --stacking when given.
    #[arg(long, default_value_t = 3)]
    layers: usize,
    /// Window width (u coordinates 0..width).
    #[arg(long, default_value_t = 6)]
    width: u32,
    /// Window height (v coordinates 0..height).
    #[arg(long, default_value_t = 6)]
    height: u32,
    /// Stacking sequence over A/B/C; defaults to the periodic ABC prefix.
    #[arg(long)]
    stacking: Option<String>,
    #[arg(long, default_value_t = 10)]
    max_demand: u32,
    /// Probability that a vertex receives positive demand.
    #[arg(long, default_value_t = 0.5)]
    density: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output instance file.
    #[arg(short, long)]
    out: PathBuf,
}

#[derive(Args)]
struct SolveArgs {
    instance: PathBuf,
    /// Output coloring file.
    #[arg(short, long)]
    out: PathBuf,
    /// Run the per-palette baseline instead of the full pipeline.
    #[arg(long)]
    naive: bool,
    /// Print solve statistics.
    #[arg(long)]
    stats: bool,
}

#[derive(Args)]
struct VerifyArgs {
    instance: PathBuf,
    coloring: PathBuf,
}

#[derive(Args)]
struct OracleArgs {
    instance: PathBuf,
    /// Largest color count to try.
    #[arg(long, default_value_t = 64)]
    limit: u64,
}

#[derive(Args)]
struct BenchArgs {
    /// Directory of instance files (*.json).
    corpus: PathBuf,
    /// Output CSV report.
    #[arg(short, long)]
    out: PathBuf,
}

#[derive(Args)]
struct RenderArgs {
    instance: PathBuf,
    coloring: PathBuf,
    /// Output SVG file.
    #[arg(short, long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::Solve(args) => cmd_solve(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Oracle(args) => cmd_oracle(args),
        Command::Bench(args) => cmd_bench(args),
        Command::Render(args) => cmd_render(args),
    };
    ExitCode::from(code)
}

fn input_error(msg: impl std::fmt::Display) -> u8 {
    eprintln!("error: {msg}");
    EXIT_INPUT
}

fn solve_error(e: SolveError) -> u8 {
    eprintln!("error: {e}");
    match e {
        SolveError::Invariant { .. } | SolveError::Internal(_) => EXIT_INTERNAL,
        _ => EXIT_INPUT,
    }
}

fn cmd_gen(args: GenArgs) -> u8 {
    let stacking = match &args.stacking {
        Some(s) => match StackingSequence::parse(s) {
            Ok(s) => s,
            Err(e) => return input_error(e),
        },
        None => StackingSequence::fcc(args.layers),
    };
    let params = gen::GenParams {
        layers: args.layers,
        width: args.width,
        height: args.height,
        stacking,
        max_demand: args.max_demand,
        density: args.density,
        seed: args.seed,
    };
    let instance = match gen::generate(&params) {
        Ok(i) => i,
        Err(e) => return input_error(e),
    };
    match instance.write(&args.out) {
        Ok(()) => {
            println!(
                "wrote {} ({} vertices, {} with demand)",
                args.out.display(),
                instance.vertices.len(),
                instance.vertices.iter().filter(|&&(_, d)| d > 0).count()
            );
            EXIT_OK
        }
        Err(e) => input_error(e),
    }
}

fn cmd_solve(args: SolveArgs) -> u8 {
    let instance = match InstanceFile::read(&args.instance) {
        Ok(i) => i,
        Err(e) => return input_error(e),
    };
    let g = match instance.to_graph() {
        Ok(g) => g,
        Err(e) => return input_error(e),
    };
    let solution = if args.naive {
        multicolor::naive_solve(&g)
    } else {
        multicolor::solve(&g)
    };
    let solution = match solution {
        Ok(s) => s,
        Err(e) => return solve_error(e),
    };
    let file = ColoringFile::from_solution(&instance.stacking, &solution.assignment, &solution.stats);
    if let Err(e) = file.write(&args.out) {
        return input_error(e);
    }
    if args.stats {
        let s = &solution.stats;
        println!("colors_used       {}", s.colors_used);
        println!("omega (w1..w4)    {:?}", s.omega.as_array());
        println!("bound_value       {}", s.bound_value);
        println!("within_bound      {}", s.within_bound());
        println!("step_colors       {:?}", s.step_colors);
        println!("palette_cap       {}", s.palette_cap);
        println!("bound_risk_events {}", s.bound_risk_events);
    } else {
        println!("colors_used {}", solution.stats.colors_used);
    }
    EXIT_OK
}

fn cmd_verify(args: VerifyArgs) -> u8 {
    let instance = match InstanceFile::read(&args.instance) {
        Ok(i) => i,
        Err(e) => return input_error(e),
    };
    let coloring = match ColoringFile::read(&args.coloring) {
        Ok(c) => c,
        Err(e) => return input_error(e),
    };
    if coloring.stacking != instance.stacking {
        return input_error(format!(
            "stacking mismatch: instance {} vs coloring {}",
            instance.stacking, coloring.stacking
        ));
    }
    let g = match instance.to_graph() {
        Ok(g) => g,
        Err(e) => return input_error(e),
    };
    let report = verify::verify(&g, &coloring.to_assignment());
    if report.ok() {
        println!("ok: proper and demand-complete");
        EXIT_OK
    } else {
        for v in &report.violations {
            match v.color {
                Some(c) => println!("{:?} at {:?} color {}", v.kind, v.vertices, c),
                None => println!("{:?} at {:?}", v.kind, v.vertices),
            }
        }
        println!("{} violation(s)", report.violations.len());
        EXIT_FAILED_CHECK
    }
}

fn cmd_oracle(args: OracleArgs) -> u8 {
    let instance = match InstanceFile::read(&args.instance) {
        Ok(i) => i,
        Err(e) => return input_error(e),
    };
    let g = match instance.to_graph() {
        Ok(g) => g,
        Err(e) => return input_error(e),
    };
    match verify::exact_multichromatic(&g, args.limit) {
        OracleOutcome::Exact(chi) => {
            println!("{chi}");
            EXIT_OK
        }
        OracleOutcome::ExceedsLimit => {
            println!("exceeds limit");
            EXIT_FAILED_CHECK
        }
    }
}

fn cmd_bench(args: BenchArgs) -> u8 {
    let rows = match bench::bench_directory(&args.corpus) {
        Ok(rows) => rows,
        Err(e) => return input_error(e),
    };
    let csv = bench::to_csv(&rows);
    if let Err(e) = std::fs::write(&args.out, &csv) {
        return input_error(format!("{}: {e}", args.out.display()));
    }
    let failed = rows.iter().filter(|r| r.status != "ok").count();
    println!(
        "{} instances, {} failed, report at {}",
        rows.len(),
        failed,
        args.out.display()
    );
    EXIT_OK
}

fn cmd_render(args: RenderArgs) -> u8 {
    let instance = match InstanceFile::read(&args.instance) {
        Ok(i) => i,
        Err(e) => return input_error(e),
    };
    let coloring = match ColoringFile::read(&args.coloring) {
        Ok(c) => c,
        Err(e) => return input_error(e),
    };
    let svg = render::render_svg(&instance, Some(&coloring));
    match std::fs::write(&args.out, svg) {
        Ok(()) => {
            println!("wrote {}", args.out.display());
            EXIT_OK
        }
        Err(e) => input_error(format!("{}: {e}", args.out.display())),
    }
}
