use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};
use polyvem::StepRecord;
use polyvem_cli::{bench_spec, cmd_bench, cmd_run, BenchName, BenchOptions, RunReport};

/// Virtual element analysis of inelastic 2D solids on polygonal meshes.
#[derive(Parser)]
#[command(name = "polyvem", version)]
struct Cli {
    /// Print one line per accepted step to stderr.
    #[arg(short, long, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the analysis described by a JSON spec file.
    Run {
        spec: PathBuf,
        /// Output directory (overrides the spec's `output.dir`).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a built-in benchmark.
    Bench {
        name: BenchName,
        /// Polynomial order.
        #[arg(short, long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(1..=3))]
        k: u8,
        /// Mesh density level (benchmark-specific; default: reference density).
        #[arg(long)]
        density: Option<usize>,
        /// Displacement increments (plate only; default 400).
        #[arg(long)]
        increments: Option<usize>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Write the benchmark's run spec to this file instead of running it.
        #[arg(long)]
        emit_spec: Option<PathBuf>,
    },
}

fn progress(verbose: bool) -> impl FnMut(&StepRecord) {
    move |r: &StepRecord| {
        if verbose {
            let probes: Vec<String> = r.probes.iter().map(|u| format!("({:.6e}, {:.6e})", u[0], u[1])).collect();
            eprintln!(
                "step {:>4}  t = {:<10.4}  factor = {:<8.4}  iterations = {:>2}  probes {}",
                r.step,
                r.time,
                r.factor,
                r.iterations,
                probes.join(" ")
            );
        }
    }
}

fn report(r: &RunReport) {
    let iterations: usize = r.records.iter().map(|s| s.iterations).sum();
    println!(
        "{} steps, {} Newton iterations (mean {:.2}); wrote {} and {}",
        r.records.len(),
        iterations,
        iterations as f64 / r.records.len().max(1) as f64,
        r.curve.display(),
        r.deformed.display()
    );
}

fn main_inner(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run { spec, out } => report(&cmd_run(&spec, out.as_deref(), progress(cli.verbose))?),
        Command::Bench {
            name,
            k,
            density,
            increments,
            out,
            emit_spec,
        } => {
            let options = BenchOptions {
                order: k as usize,
                density,
                plate_increments: increments,
            };
            if let Some(path) = emit_spec {
                let spec = bench_spec(name, &options, std::path::absolute(&out)?)?;
                let mut file = std::fs::File::create(&path)?;
                writeln!(file, "{}", spec.to_json())?;
                println!("wrote {}", path.display());
            } else {
                report(&cmd_bench(name, &options, &out, progress(cli.verbose))?);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match main_inner(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
