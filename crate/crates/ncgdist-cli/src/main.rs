//! `ncgdist`: spectral distances, closed-form catalog and verification suites
//! from the command line.
//!
//! Exit codes: 0 on success (finite or infinite distance), 1 when a
//! verification suite has failing rows, 2 on input errors, 3 when the solver
//! does not converge.

use std::collections::BTreeSet;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use ncgdist::catalog;
use ncgdist::io::{parse_state, parse_triple, read_json, result_to_json};
use ncgdist::kantorovich::{sample_pure_pairs, wasserstein_upper};
use ncgdist::solver::{DistanceSolver, Outcome, SolverOptions};
use ncgdist::verify::{run_suite, Suite, VerifyOptions};
use ncgdist::Error;

#[derive(Parser)]
#[command(name = "ncgdist", version, about = "Spectral distance on finite spectral triples")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct SolverArgs {
    /// Relative gap between the certified lower and upper bounds.
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// Restart count for randomized searches.
    #[arg(long, default_value_t = 16)]
    multistarts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl SolverArgs {
    fn options(&self) -> SolverOptions {
        SolverOptions {
            rel_tolerance: self.tol,
            multistarts: self.multistarts,
            seed: self.seed,
            ..SolverOptions::default()
        }
    }
}

#[derive(Args)]
struct PairArgs {
    #[arg(long)]
    triple: PathBuf,
    #[arg(long = "state-a")]
    state_a: PathBuf,
    #[arg(long = "state-b")]
    state_b: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Distance between two states of a triple, as JSON.
    Compute {
        #[command(flatten)]
        files: PairArgs,
        #[command(flatten)]
        solver: SolverArgs,
        /// Add the wall time in milliseconds to the output.
        #[arg(long)]
        timings: bool,
    },
    /// Run a verification suite and write the report as CSV.
    Verify {
        #[arg(default_value = "all", value_parser = clap::builder::PossibleValuesParser::new(Suite::NAMES))]
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Report path; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        /// Fill the runtime_ms column.
        #[arg(long)]
        timings: bool,
    },
    /// List or evaluate closed-form formulas.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
    /// Circle-bundle distances from a parameter file.
    Bundle {
        #[command(subcommand)]
        action: BundleAction,
    },
    /// Moyal-plane closed forms from a parameter file.
    Moyal {
        #[command(subcommand)]
        action: MoyalAction,
    },
    /// Spectral distance against the sampled Monge-Kantorovich upper bound.
    Wd {
        #[command(flatten)]
        files: PairArgs,
        /// Number of sampled pure-state pairs.
        #[arg(long, default_value_t = 32)]
        pairs: usize,
        #[command(flatten)]
        solver: SolverArgs,
    },
}

#[derive(Subcommand)]
enum CatalogAction {
    List,
    Eval {
        id: String,
        /// JSON parameter record.
        params: PathBuf,
    },
}

#[derive(Args)]
struct TableArgs {
    /// JSON record or array of records.
    #[arg(long)]
    params: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum BundleAction {
    /// Fiber distance: `{r, omega, xi}` for n = 2, or arrays `{r, omega, phi, k}`.
    Fiber(TableArgs),
    /// Torus distance `{r1, r2, omega, k, tau0, phi}`.
    Torus(TableArgs),
}

#[derive(Subcommand)]
enum MoyalAction {
    /// Eigenstate distance `{theta, m, n}`.
    Eigen(TableArgs),
    /// Quantum square length and modified quantum length `{lambda_p, m, n, kappa, kappa_tilde}`.
    Qlength(TableArgs),
}

enum Failure {
    Input(Error),
    Solver(Error),
    Verification,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NonConvergence { .. } => Failure::Solver(e),
            other => Failure::Input(other),
        }
    }
}

fn io_error(path: &Path, source: io::Error) -> Failure {
    Failure::Input(Error::Io {
        path: path.display().to_string(),
        source,
    })
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| io_error(p, e))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn print_json(v: &Value) {
    let text = serde_json::to_string_pretty(v).expect("serializable");
    // a closed pipe downstream is not an error of ours
    let _ = writeln!(io::stdout().lock(), "{text}");
}

fn load_pair(files: &PairArgs) -> Result<(ncgdist::triple::SpectralTriple, ncgdist::algebra::State, ncgdist::algebra::State), Error> {
    let t = parse_triple(&read_json(&files.triple)?)?;
    let a = parse_state(&read_json(&files.state_a)?, t.algebra())?;
    let b = parse_state(&read_json(&files.state_b)?, t.algebra())?;
    Ok((t, a, b))
}

fn compute(files: &PairArgs, solver: &SolverArgs, timings: bool) -> Result<(), Failure> {
    let (t, a, b) = load_pair(files)?;
    let start = Instant::now();
    let r = DistanceSolver::new(&t, solver.options())?.distance(&a, &b)?;
    let mut v = result_to_json(&r);
    if timings {
        v["runtime_ms"] = json!(start.elapsed().as_secs_f64() * 1e3);
    }
    print_json(&v);
    Ok(())
}

fn verify(suite: &str, seed: u64, out: Option<&Path>, tol: f64, timings: bool) -> Result<(), Failure> {
    let suite: Suite = suite.parse()?;
    let opts = VerifyOptions {
        seed,
        timings,
        solver: SolverOptions::default().with_rel_tolerance(tol),
    };
    let report = run_suite(suite, &opts);
    report.write_csv(output(out)?)?;
    eprintln!("{}: {} passed, {} failed", suite, report.passed(), report.failed());
    if report.all_passed() {
        return Ok(());
    }
    for row in report.failures() {
        eprintln!(
            "FAIL {} [{}] expected {} computed {}",
            row.case_id, row.formula_ref, row.expected, row.computed
        );
    }
    Err(Failure::Verification)
}

fn catalog_cmd(action: &CatalogAction) -> Result<(), Failure> {
    match action {
        CatalogAction::List => {
            let list: Vec<Value> = catalog::entries()
                .iter()
                .map(|e| {
                    json!({
                        "id": e.id,
                        "formula_ref": e.formula_ref,
                        "params": e.params,
                        "realized_by": e.realized_by,
                    })
                })
                .collect();
            print_json(&Value::Array(list));
        }
        CatalogAction::Eval { id, params } => {
            let entry = catalog::find(id)
                .ok_or_else(|| Error::InvalidInput(format!("unknown catalog id {id:?}")))?;
            print_json(&entry.eval(&read_json(params)?)?);
        }
    }
    Ok(())
}

/// Flattens a catalog result into `(suffix, value)` cells.
fn result_cells(v: &Value) -> Vec<(String, String)> {
    let scalar = |x: &Value| match x {
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    };
    match v {
        Value::Object(m) if m.contains_key("outcome") => {
            let cell = if m["outcome"] == "infinite" {
                "infinite".to_string()
            } else {
                scalar(&m["value"])
            };
            vec![(String::new(), cell)]
        }
        Value::Object(m) if m.len() == 1 && m.contains_key("value") => vec![(String::new(), scalar(&m["value"]))],
        Value::Object(m) => m
            .iter()
            .flat_map(|(k, x)| {
                result_cells(x)
                    .into_iter()
                    .map(move |(s, c)| (if s.is_empty() { k.clone() } else { format!("{k}.{s}") }, c))
            })
            .collect(),
        other => vec![(String::new(), scalar(other))],
    }
}

/// Evaluates catalog entries over a list of records and writes the CSV
/// `id, inputs..., value, formula_ref`.
fn table(args: &TableArgs, pick: &dyn Fn(&Value) -> Vec<&'static str>) -> Result<(), Failure> {
    let doc = read_json(&args.params)?;
    let records: Vec<Value> = match doc {
        Value::Array(v) => v,
        other => vec![other],
    };
    let mut inputs = BTreeSet::new();
    for r in &records {
        let obj = r
            .as_object()
            .ok_or_else(|| Error::InvalidInput("parameter records must be JSON objects".into()))?;
        inputs.extend(obj.keys().filter(|k| k.as_str() != "id").cloned());
    }
    let mut rows = Vec::new();
    for (i, r) in records.iter().enumerate() {
        let base_id = r.get("id").map_or(i.to_string(), |v| v.as_str().map_or(v.to_string(), str::to_string));
        for cid in pick(r) {
            let entry = catalog::find(cid).expect("registered catalog id");
            let result = entry.eval(r)?;
            for (suffix, value) in result_cells(&result) {
                let mut id = base_id.clone();
                if suffix.is_empty() {
                    if pick(r).len() > 1 {
                        id = format!("{id}/{cid}");
                    }
                } else {
                    id = format!("{id}/{suffix}");
                }
                let mut row = vec![id];
                row.extend(inputs.iter().map(|k| r.get(k).map_or(String::new(), |v| match v {
                    Value::String(s) => s.clone(),
                    other => other.to_string(),
                })));
                row.push(value);
                row.push(entry.formula_ref.to_string());
                rows.push(row);
            }
        }
    }
    let mut w = csv::Writer::from_writer(output(args.out.as_deref())?);
    let mut header = vec!["id".to_string()];
    header.extend(inputs.iter().cloned());
    header.push("value".into());
    header.push("formula_ref".into());
    w.write_record(&header).map_err(Error::from)?;
    for row in rows {
        w.write_record(&row).map_err(Error::from)?;
    }
    w.flush().map_err(|e| io_error(Path::new("output"), e))?;
    Ok(())
}

fn wd(files: &PairArgs, pairs: usize, solver: &SolverArgs) -> Result<(), Failure> {
    let (t, a, b) = load_pair(files)?;
    let opts = solver.options();
    let d = DistanceSolver::new(&t, opts.clone())?.distance(&a, &b)?;
    let constraints = sample_pure_pairs(&t, pairs, solver.seed, &opts)?;
    let w = wasserstein_upper(&t, &a, &b, &constraints, None, &opts)?;
    let num = |o: Outcome| match o {
        Outcome::Finite(v) => json!(v),
        Outcome::Infinite => json!("infinite"),
    };
    let gap = match (d.outcome, w.upper) {
        (Outcome::Finite(x), Outcome::Finite(y)) => json!(y - x),
        (Outcome::Infinite, _) => Value::Null,
        (_, Outcome::Infinite) => json!("infinite"),
    };
    print_json(&json!({
        "d_D": num(d.outcome),
        "W_upper": num(w.upper),
        "gap": gap,
        "constraints": w.constraints_used,
    }));
    Ok(())
}

fn configure_threads() {
    if let Some(n) = std::env::var("NCGDIST_THREADS").ok().and_then(|s| s.trim().parse::<usize>().ok()) {
        if n > 0 {
            // fails only if a pool already exists, which cannot happen here
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Compute { files, solver, timings } => compute(files, solver, *timings),
        Command::Verify {
            suite,
            seed,
            out,
            tol,
            timings,
        } => verify(suite, *seed, out.as_deref(), *tol, *timings),
        Command::Catalog { action } => catalog_cmd(action),
        Command::Bundle { action } => match action {
            BundleAction::Fiber(args) => table(args, &|r| {
                if r.get("r").is_some_and(Value::is_array) {
                    vec!["fiber_general"]
                } else {
                    vec!["fiber_n2"]
                }
            }),
            BundleAction::Torus(args) => table(args, &|_| vec!["torus_n2"]),
        },
        Command::Moyal { action } => match action {
            MoyalAction::Eigen(args) => table(args, &|_| vec!["moyal_eigen"]),
            MoyalAction::Qlength(args) => table(args, &|_| vec!["quantum_sq_length", "modified_quantum_length"]),
        },
        Command::Wd { files, pairs, solver } => wd(files, *pairs, solver),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(1),
        Err(Failure::Input(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Solver(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}
