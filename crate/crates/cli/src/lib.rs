//! Command-line front end: `solve`, `compare` and `validate`.
//!
//! Exit codes: 0 converged (or valid), 2 iteration cap reached, 3 breakdown,
//! 1 for unreadable, malformed or invalid input.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use scnpp::format::{fmt_f64, parse_instance, write_trace, FormatError};
use scnpp::schemes::{run, AlphaSchedule, Algorithm, Gamma, RunStatus, RunTrace, SolverConfig};
use scnpp::{ScnppInstance, Vector};

/// Directory for `compare` trace files when `--out-dir` is absent.
pub const OUT_DIR_ENV: &str = "SCNPP_OUT_DIR";

pub const EXIT_OK: u8 = 0;
pub const EXIT_INPUT: u8 = 1;
pub const EXIT_MAX_ITER: u8 = 2;
pub const EXIT_BREAKDOWN: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "scnpp", version, about = "Split common null point solvers")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one algorithm and write its trace.
    Solve {
        instance: PathBuf,
        #[arg(long, default_value = "fb")]
        algorithm: Algorithm,
        /// Trace destination; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Run several algorithms from the same start point and tabulate them.
    Compare {
        instance: PathBuf,
        /// Comma-separated list.
        #[arg(long, value_delimiter = ',', default_value = "fb,product,halpern,haugazeau")]
        algorithms: Vec<Algorithm>,
        /// Directory for per-algorithm traces; falls back to $SCNPP_OUT_DIR, then `.`.
        #[arg(long)]
        out_dir: Option<PathBuf>,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Check an instance file and list every violation.
    Validate { instance: PathBuf },
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Explicit step size; must lie in (0, 2/L_safe).
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub gamma_fraction: Option<f64>,
    /// `harmonic` or `power:q`.
    #[arg(long)]
    pub alpha: Option<AlphaSchedule>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    #[arg(long)]
    pub record_every: Option<usize>,
    /// Relaxation parameter c in (0, 1) for forward-backward.
    #[arg(long)]
    pub relaxation: Option<f64>,
    /// Start point: comma-separated coordinates, or `random` (uniform in
    /// [-1, 1], seeded by --seed). Zero vector by default.
    #[arg(long, allow_hyphen_values = true)]
    pub x0: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Omit iterate columns from traces.
    #[arg(long)]
    pub no_iterates: bool,
}

impl RunArgs {
    pub fn config(&self, algorithm: Algorithm) -> SolverConfig {
        let d = SolverConfig::new(algorithm);
        SolverConfig {
            lambda: self.lambda.unwrap_or(d.lambda),
            gamma: self.gamma.map_or(Gamma::Auto, Gamma::Explicit),
            gamma_fraction: self.gamma_fraction.unwrap_or(d.gamma_fraction),
            alpha_schedule: self.alpha.unwrap_or(d.alpha_schedule),
            relaxation_c: self.relaxation,
            tol: self.tol.unwrap_or(d.tol),
            max_iter: self.max_iter.unwrap_or(d.max_iter),
            record_every: self.record_every.or(d.record_every),
            ..d
        }
    }

    pub fn start_point(&self, n: usize) -> Result<Vector> {
        match self.x0.as_deref() {
            None => Ok(Vector::zeros(n)),
            Some("random") => {
                let mut rng = rand::rngs::StdRng::seed_from_u64(self.seed);
                Ok((0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect::<Vec<f64>>().into())
            }
            Some(list) => {
                let v = list
                    .split(',')
                    .map(|s| s.trim().parse::<f64>().with_context(|| format!("bad --x0 entry '{s}'")))
                    .collect::<Result<Vec<f64>>>()?;
                if v.len() != n {
                    bail!("--x0 has {} entries, the instance has n1 = {n}", v.len());
                }
                Ok(v.into())
            }
        }
    }
}

pub fn exit_code(status: &RunStatus) -> u8 {
    match status {
        RunStatus::Converged => EXIT_OK,
        RunStatus::MaxIterReached => EXIT_MAX_ITER,
        RunStatus::Breakdown(_) => EXIT_BREAKDOWN,
    }
}

/// Ordering used to combine exit codes: success, cap, breakdown, input error.
fn severity(code: u8) -> u8 {
    match code {
        EXIT_OK => 0,
        EXIT_MAX_ITER => 1,
        EXIT_BREAKDOWN => 2,
        _ => 3,
    }
}

pub fn worst_code(codes: impl IntoIterator<Item = u8>) -> u8 {
    codes.into_iter().max_by_key(|c| severity(*c)).unwrap_or(EXIT_OK)
}

/// Reads and parses an instance without validating it.
pub fn load_instance(path: &Path) -> Result<ScnppInstance> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    parse_instance(&text).map_err(|e| match e {
        FormatError::Parse(msg) => anyhow::anyhow!("{}: {msg}", path.display()),
        other => anyhow::anyhow!("{}: {other}", path.display()),
    })
}

/// Loads and validates, printing violations to `err`.
fn load_valid(path: &Path, err: &mut dyn Write) -> Option<ScnppInstance> {
    let inst = match load_instance(path) {
        Ok(inst) => inst,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            return None;
        }
    };
    if let Err(report) = inst.validate() {
        let _ = writeln!(err, "error: invalid instance {}", path.display());
        for v in &report.violations {
            let _ = writeln!(err, "  {v}");
        }
        return None;
    }
    Some(inst)
}

/// The instance as the algorithm needs it: single-mapping schemes get the
/// product-space lift when `(p, r) ≠ (1, 1)`.
fn prepared(inst: &ScnppInstance, algorithm: Algorithm) -> Result<ScnppInstance> {
    if algorithm.needs_two_mapping() && !inst.is_two_mapping() {
        return inst.lift_to_product().map_err(|r| anyhow::anyhow!("{r}"));
    }
    Ok(inst.clone())
}

fn solve_one(inst: &ScnppInstance, algorithm: Algorithm, args: &RunArgs, x0: &Vector) -> Result<RunTrace> {
    let inst = prepared(inst, algorithm)?;
    Ok(run(&inst, &args.config(algorithm), x0)?)
}

fn summary(trace: &RunTrace) -> String {
    let (primal, image) = trace
        .final_row()
        .map_or((f64::NAN, f64::NAN), |r| (r.primal_residual, r.image_residual));
    format!(
        "{}: {} after {} iterations (primal {:.3e}, image {:.3e})",
        trace.algorithm, trace.status, trace.iterations_used, primal, image
    )
}

pub fn cmd_solve(
    path: &Path,
    algorithm: Algorithm,
    out: Option<&Path>,
    args: &RunArgs,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> u8 {
    let Some(inst) = load_valid(path, stderr) else {
        return EXIT_INPUT;
    };
    if algorithm.needs_two_mapping() && !inst.is_two_mapping() {
        let _ = writeln!(
            stderr,
            "note: (p, r) = ({}, {}); running {algorithm} on the product-space lift",
            inst.p(),
            inst.r()
        );
    }
    let result = args
        .start_point(inst.n1)
        .and_then(|x0| solve_one(&inst, algorithm, args, &x0));
    let trace = match result {
        Ok(t) => t,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e:#}");
            return EXIT_INPUT;
        }
    };
    for w in &trace.warnings {
        let _ = writeln!(stderr, "warning: {w}");
    }
    let written = match out {
        Some(p) => File::create(p)
            .and_then(|f| {
                let mut w = BufWriter::new(f);
                write_trace(&trace, !args.no_iterates, &mut w)?;
                w.flush()
            })
            .with_context(|| format!("cannot write {}", p.display())),
        None => write_trace(&trace, !args.no_iterates, &mut *stdout).context("cannot write trace"),
    };
    if let Err(e) = written {
        let _ = writeln!(stderr, "error: {e:#}");
        return EXIT_INPUT;
    }
    let _ = writeln!(stderr, "{}", summary(&trace));
    exit_code(&trace.status)
}

/// One row of the `compare` table.
#[derive(Debug)]
pub struct CompareRow {
    pub algorithm: Algorithm,
    pub outcome: Result<RunTrace, String>,
    pub trace_file: Option<PathBuf>,
}

impl CompareRow {
    pub fn code(&self) -> u8 {
        match &self.outcome {
            Ok(t) => exit_code(&t.status),
            Err(_) => EXIT_INPUT,
        }
    }
}

pub fn trace_file_name(instance: &Path, algorithm: Algorithm) -> String {
    let stem = instance.file_stem().and_then(|s| s.to_str()).unwrap_or("instance");
    format!("{stem}.{algorithm}.csv")
}

/// Runs every algorithm on its own thread and writes its trace into
/// `out_dir`. Rows come back in the order of `algorithms`.
pub fn compare_runs(
    inst: &ScnppInstance,
    instance_path: &Path,
    algorithms: &[Algorithm],
    args: &RunArgs,
    x0: &Vector,
    out_dir: &Path,
) -> Vec<CompareRow> {
    std::thread::scope(|scope| {
        let handles: Vec<_> = algorithms
            .iter()
            .map(|&algorithm| {
                scope.spawn(move || {
                    let outcome = solve_one(inst, algorithm, args, x0).map_err(|e| format!("{e:#}"));
                    let mut row = CompareRow {
                        algorithm,
                        outcome,
                        trace_file: None,
                    };
                    if let Ok(trace) = &row.outcome {
                        let file = out_dir.join(trace_file_name(instance_path, algorithm));
                        let written = File::create(&file).and_then(|f| {
                            let mut w = BufWriter::new(f);
                            write_trace(trace, !args.no_iterates, &mut w)?;
                            w.flush()
                        });
                        match written {
                            Ok(()) => row.trace_file = Some(file),
                            Err(e) => row.outcome = Err(format!("cannot write {}: {e}", file.display())),
                        }
                    }
                    row
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("solver thread panicked"))
            .collect()
    })
}

pub fn write_compare_table(rows: &[CompareRow], w: &mut dyn Write) -> io::Result<()> {
    writeln!(
        w,
        "{:<10} {:<15} {:>10} {:>24} {:>24}  final_point",
        "algorithm", "status", "iterations", "primal_residual", "image_residual"
    )?;
    for row in rows {
        match &row.outcome {
            Ok(t) => {
                let last = t.final_row();
                let point: Vec<String> = t.final_point.iter().map(|v| fmt_f64(*v)).collect();
                writeln!(
                    w,
                    "{:<10} {:<15} {:>10} {:>24} {:>24}  {}",
                    row.algorithm.name(),
                    t.status.label(),
                    t.iterations_used,
                    fmt_f64(last.map_or(f64::NAN, |r| r.primal_residual)),
                    fmt_f64(last.map_or(f64::NAN, |r| r.image_residual)),
                    point.join(",")
                )?;
            }
            Err(e) => writeln!(w, "{:<10} {:<15} {e}", row.algorithm.name(), "Error")?,
        }
    }
    Ok(())
}

pub fn cmd_compare(
    path: &Path,
    algorithms: &[Algorithm],
    out_dir: Option<&Path>,
    args: &RunArgs,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> u8 {
    let Some(inst) = load_valid(path, stderr) else {
        return EXIT_INPUT;
    };
    let x0 = match args.start_point(inst.n1) {
        Ok(x0) => x0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e:#}");
            return EXIT_INPUT;
        }
    };
    let dir = out_dir
        .map(Path::to_path_buf)
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    if let Err(e) = fs::create_dir_all(&dir) {
        let _ = writeln!(stderr, "error: cannot create {}: {e}", dir.display());
        return EXIT_INPUT;
    }
    let rows = compare_runs(&inst, path, algorithms, args, &x0, &dir);
    if let Err(e) = write_compare_table(&rows, stdout) {
        let _ = writeln!(stderr, "error: cannot write table: {e}");
        return EXIT_INPUT;
    }
    for row in &rows {
        if let Ok(t) = &row.outcome {
            for w in &t.warnings {
                let _ = writeln!(stderr, "warning ({}): {w}", row.algorithm);
            }
        }
    }
    worst_code(rows.iter().map(CompareRow::code))
}

pub fn cmd_validate(path: &Path, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8 {
    let inst = match load_instance(path) {
        Ok(inst) => inst,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e:#}");
            return EXIT_INPUT;
        }
    };
    match inst.validate() {
        Ok(()) => {
            let _ = writeln!(
                stdout,
                "valid: n1 = {}, p = {}, r = {}",
                inst.n1,
                inst.p(),
                inst.r()
            );
            EXIT_OK
        }
        Err(report) => {
            let _ = writeln!(stdout, "invalid: {} violation(s)", report.violations.len());
            for v in &report.violations {
                let _ = writeln!(stdout, "  {v}");
            }
            EXIT_INPUT
        }
    }
}

pub fn dispatch(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8 {
    match &cli.command {
        Command::Solve {
            instance,
            algorithm,
            out,
            run,
        } => cmd_solve(instance, *algorithm, out.as_deref(), run, stdout, stderr),
        Command::Compare {
            instance,
            algorithms,
            out_dir,
            run,
        } => cmd_compare(instance, algorithms, out_dir.as_deref(), run, stdout, stderr),
        Command::Validate { instance } => cmd_validate(instance, stdout, stderr),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn severity_orders_input_errors_last() {
        assert_eq!(worst_code([0, 2, 3]), 3);
        assert_eq!(worst_code([3, 1, 2]), 1);
        assert_eq!(worst_code([0, 0]), 0);
        assert_eq!(worst_code([]), 0);
    }

    #[test]
    fn start_point_forms() {
        let mut args = RunArgs::parse_from_empty();
        assert_eq!(args.start_point(2).unwrap(), Vector::zeros(2));
        args.x0 = Some("1.5,-2".into());
        assert_eq!(args.start_point(2).unwrap(), Vector::from([1.5, -2.0]));
        assert!(args.start_point(3).is_err());
        args.x0 = Some("random".into());
        let a = args.start_point(4).unwrap();
        assert_eq!(a, args.start_point(4).unwrap());
        assert!(a.iter().all(|v| v.abs() <= 1.0));
        args.seed = 9;
        assert_ne!(a, args.start_point(4).unwrap());
    }

    impl RunArgs {
        fn parse_from_empty() -> Self {
            #[derive(Parser)]
            struct Wrap {
                #[command(flatten)]
                run: RunArgs,
            }
            Wrap::parse_from(["x"]).run
        }
    }

    #[test]
    fn flags_override_defaults() {
        let cli = Cli::parse_from([
            "scnpp", "solve", "i.toml", "--algorithm", "halpern", "--alpha", "power:0.5", "--tol", "1e-6",
            "--gamma", "0.25", "--x0", "-1,2",
        ]);
        let Command::Solve { algorithm, run, .. } = cli.command else {
            panic!("expected solve");
        };
        let cfg = run.config(algorithm);
        assert_eq!(cfg.algorithm, Algorithm::Halpern);
        assert_eq!(cfg.alpha_schedule, AlphaSchedule::PowerLaw(0.5));
        assert_eq!(cfg.tol, 1e-6);
        assert_eq!(cfg.gamma, Gamma::Explicit(0.25));
        assert_eq!(cfg.max_iter, SolverConfig::default().max_iter);
        assert_eq!(run.x0.as_deref(), Some("-1,2"));
    }

    #[test]
    fn trace_names_use_the_instance_stem() {
        assert_eq!(trace_file_name(Path::new("dir/canon.toml"), Algorithm::Halpern), "canon.halpern.csv");
    }
}
