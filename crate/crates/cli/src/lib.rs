//! Command-line front end of `polyvem`: JSON run specs, the built-in
//! benchmarks, curve CSV output and deformed-mesh export.

pub mod bench;
pub mod output;
pub mod spec;

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use polyvem::{Analysis, StepRecord};

pub use bench::{bench_spec, BenchName, BenchOptions};
pub use output::{curve_csv, export_deformed_mesh, Curve};
pub use spec::{MeshSource, OutputSpec, RunSpec};

pub const CURVE_FILE: &str = "curve.csv";
pub const DEFORMED_FILE: &str = "deformed.json";

/// Files written by a run and the accepted steps.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub records: Vec<StepRecord>,
    pub curve: PathBuf,
    pub deformed: PathBuf,
}

/// Runs `spec` (relative paths resolved against `base_dir`) and writes
/// `curve.csv` and `deformed.json` to its output directory. `progress` sees
/// every accepted step.
pub fn execute<F: FnMut(&StepRecord)>(spec: &RunSpec, base_dir: &Path, progress: F) -> Result<RunReport> {
    let run = spec.prepare(base_dir)?;
    let mut analysis = Analysis::new(&run.mesh, &run.config, &run.material).context("setting up the analysis")?;
    let records = analysis.run_with(progress).context("solving")?;
    fs::create_dir_all(&run.out_dir).with_context(|| format!("creating {}", run.out_dir.display()))?;
    let curve = run.out_dir.join(CURVE_FILE);
    fs::write(&curve, curve_csv(&run.config.probes, &records)).with_context(|| format!("writing {}", curve.display()))?;
    let deformed = run.out_dir.join(DEFORMED_FILE);
    export_deformed_mesh(&run.mesh, &analysis.vertex_displacements(), run.deformed_scale, &deformed)?;
    Ok(RunReport {
        records,
        curve,
        deformed,
    })
}

/// `run <spec.json>`; `out` overrides the spec's output directory.
pub fn cmd_run<F: FnMut(&StepRecord)>(spec_path: &Path, out: Option<&Path>, progress: F) -> Result<RunReport> {
    let mut spec = RunSpec::load(spec_path)?;
    let base = spec_path.parent().unwrap_or(Path::new("."));
    if let Some(out) = out {
        spec.output.dir = std::path::absolute(out)?;
    }
    execute(&spec, base, progress)
}

/// `bench <name>`: materializes the built-in spec and runs it.
pub fn cmd_bench<F: FnMut(&StepRecord)>(
    name: BenchName,
    options: &BenchOptions,
    out: &Path,
    progress: F,
) -> Result<RunReport> {
    let spec = bench_spec(name, options, out.to_path_buf())?;
    execute(&spec, Path::new("."), progress)
}
