//! `adaptq`: batch runner for VQE and ADAPT-VQE experiments. Every data
//! product is CSV.

mod config;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use adaptq::chem::{hartree_fock_state, MolecularProblem, OrbitalOrdering, CHEMICAL_ACCURACY};
use adaptq::circuit::{compile_exponential_sum, compile_pauli_exponential, NoiseSpec};
use adaptq::engine::{adapt_run, reference_ground_energy, run_fixed_vqe, ShotBudget};
use adaptq::pauli::{PauliString, PauliSum};
use adaptq::pools::{build_pool, build_uccsd, PoolFamily};
use adaptq::simstate::expectation;
use adaptq::{Error, Result};

use config::{load, parse_f64, ExperimentConfig, Method, SweepAxis};

#[derive(Parser, Debug)]
#[command(name = "adaptq", version, about = "VQE and ADAPT-VQE experiment runner")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Experiment configuration file (key=value lines).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed; run k uses seed XOR k.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output CSV path (standard output when absent).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Repetitions per point for median statistics.
    #[arg(long, global = true)]
    runs: Option<usize>,
    /// Worker threads for parallel points.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact ground energy, Hartree-Fock energy and chemical-accuracy band.
    Diag { problem: String },
    /// Hartree-Fock reference energy.
    HfEnergy { problem: String },
    /// Pool size and strings-per-operator histogram.
    Pool {
        #[arg(long, default_value = "qubit_no_z")]
        family: String,
        /// Spin-orbital count (ignored when --problem is given).
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long)]
        problem: Option<String>,
        #[arg(long, default_value = "alternating")]
        ordering: String,
    },
    /// Gate list and CNOT count of a Pauli-string or pool-operator exponential.
    Compile {
        /// Pauli word, e.g. XXXY.
        #[arg(long, conflicts_with = "family")]
        string: Option<String>,
        #[arg(long)]
        family: Option<String>,
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        index: usize,
        #[arg(long, default_value_t = 0.1)]
        theta: f64,
        #[arg(long, default_value = "alternating")]
        ordering: String,
    },
    /// Fixed UCCSD-ansatz VQE.
    Vqe {
        #[arg(long)]
        problem: Option<String>,
    },
    /// One ADAPT-VQE run; per-iteration CSV plus a summary line.
    Adapt {
        #[arg(long)]
        problem: Option<String>,
    },
    /// Error statistics for every `problem=` entry of the configuration.
    Scan,
    /// Median and interquartile error versus one noise parameter.
    NoiseSweep,
}

/// Exit status classes.
enum Failure {
    Usage(String),
    Data(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Data(e)
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Data(e)) => {
            eprintln!("error: {e}");
            match e {
                Error::Resource(_) => ExitCode::from(4),
                _ => ExitCode::from(3),
            }
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    if let Some(t) = cli.common.threads {
        if t == 0 {
            return Err(Failure::Usage("--threads must be at least 1".into()));
        }
        // A second initialisation only fails if a pool already exists.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let common = cli.common.clone();
    match cli.command {
        Command::Diag { problem } => diag(&load(&problem)?),
        Command::HfEnergy { problem } => {
            let p = load(&problem)?;
            println!("hf_energy={:.12}", hf_energy(&p)?);
            Ok(())
        }
        Command::Pool {
            family,
            n,
            problem,
            ordering,
        } => pool_cmd(&family, n, problem.as_deref(), &ordering),
        Command::Compile {
            string,
            family,
            n,
            index,
            theta,
            ordering,
        } => compile_cmd(string.as_deref(), family.as_deref(), n, index, theta, &ordering),
        Command::Vqe { problem } => vqe_cmd(&experiment(&common, problem)?),
        Command::Adapt { problem } => adapt_cmd(&experiment(&common, problem)?),
        Command::Scan => scan_cmd(&experiment(&common, None)?),
        Command::NoiseSweep => sweep_cmd(&experiment(&common, None)?),
    }
}

/// Configuration file merged with command-line overrides.
fn experiment(common: &Common, problem: Option<String>) -> CliResult<ExperimentConfig> {
    let mut c = match &common.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(p) = problem {
        c.problems = vec![p];
    }
    if let Some(s) = common.seed {
        c.seed = s;
    }
    if let Some(o) = &common.out {
        c.out = Some(o.clone());
    }
    if let Some(r) = common.runs {
        c.runs = r;
    }
    c.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    Ok(c)
}

fn hf_energy(p: &MolecularProblem) -> Result<f64> {
    expectation(&p.hamiltonian, &hartree_fock_state(p))
}

fn diag(p: &MolecularProblem) -> CliResult<()> {
    let fci = reference_ground_energy(p)?;
    if fci.is_nan() {
        return Err(Error::Resource(format!(
            "{} qubits is beyond dense diagonalization",
            p.n_spin_orbitals
        ))
        .into());
    }
    let hf = hf_energy(p)?;
    println!("problem={} qubits={} electrons={}", p.name, p.n_spin_orbitals, p.n_electrons);
    println!("fci_energy={fci:.12}");
    println!("hf_energy={hf:.12}");
    println!("correlation_energy={:.12}", fci - hf);
    println!(
        "chemical_accuracy_band=[{:.12}, {:.12}]",
        fci - CHEMICAL_ACCURACY,
        fci + CHEMICAL_ACCURACY
    );
    Ok(())
}

fn parse_ordering(s: &str) -> CliResult<OrbitalOrdering> {
    s.parse().map_err(|e: Error| Failure::Usage(e.to_string()))
}

fn parse_family(s: &str) -> CliResult<PoolFamily> {
    s.parse().map_err(|e: Error| Failure::Usage(e.to_string()))
}

/// A synthetic problem carrying only a register description.
fn register(n: usize, ordering: OrbitalOrdering) -> MolecularProblem {
    MolecularProblem {
        name: format!("register_{n}"),
        n_spin_orbitals: n,
        n_electrons: n / 2,
        ordering,
        hamiltonian: PauliSum::zero(n),
        fermionic_hamiltonian: None,
        geometry_tag: None,
    }
}

fn pool_cmd(family: &str, n: usize, problem: Option<&str>, ordering: &str) -> CliResult<()> {
    let family = parse_family(family)?;
    let p = match problem {
        Some(path) => load(path)?,
        None => register(n, parse_ordering(ordering)?),
    };
    let pool = build_pool(family, &p)?;
    println!("family={} qubits={}", family, p.n_spin_orbitals);
    println!("{} operators", pool.len());
    for (strings, count) in pool.string_histogram() {
        println!("strings={strings} operators={count}");
    }
    Ok(())
}

fn compile_cmd(
    string: Option<&str>,
    family: Option<&str>,
    n: usize,
    index: usize,
    theta: f64,
    ordering: &str,
) -> CliResult<()> {
    let circuit = match (string, family) {
        (Some(w), _) => {
            let p: PauliString = w.parse().map_err(|e: Error| Failure::Usage(e.to_string()))?;
            compile_pauli_exponential(&p, theta)?
        }
        (None, Some(f)) => {
            let pool = build_pool(parse_family(f)?, &register(n, parse_ordering(ordering)?))?;
            let op = pool.operators.get(index).ok_or_else(|| {
                Failure::Usage(format!("index {index} out of range for {} operators", pool.len()))
            })?;
            compile_exponential_sum(&op.operator, theta)?
        }
        (None, None) => return Err(Failure::Usage("give --string or --family".into())),
    };
    print!("{circuit}");
    println!("cnots={}", circuit.cnot_count());
    Ok(())
}

fn single_problem(c: &ExperimentConfig) -> CliResult<MolecularProblem> {
    match c.problems.as_slice() {
        [p] => Ok(load(p)?),
        [] => Err(Failure::Usage("no problem given (use --problem or problem= in --config)".into())),
        _ => Err(Failure::Usage("this subcommand takes exactly one problem".into())),
    }
}

/// Output sink: the configured file or standard output.
fn sink(c: &ExperimentConfig) -> CliResult<Box<dyn Write>> {
    Ok(match &c.out {
        Some(path) => Box::new(std::io::BufWriter::new(std::fs::File::create(path).map_err(
            |source| Error::Io {
                path: path.clone(),
                source,
            },
        )?)),
        None => Box::new(std::io::stdout()),
    })
}

fn write_rows(c: &ExperimentConfig, header: &[&str], rows: &[Vec<String>]) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(sink(c)?);
    let err = |e: csv::Error| Failure::Data(Error::Invalid(format!("csv: {e}")));
    w.write_record(header).map_err(err)?;
    for r in rows {
        w.write_record(r).map_err(err)?;
    }
    w.flush()
        .map_err(|e| Failure::Data(Error::Invalid(format!("csv: {e}"))))?;
    Ok(())
}

/// Linear-interpolation quantile of sorted data.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

struct Stats {
    median: f64,
    q1: f64,
    q3: f64,
    mean: f64,
}

fn stats(values: &[f64]) -> Stats {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    Stats {
        median: quantile(&v, 0.5),
        q1: quantile(&v, 0.25),
        q3: quantile(&v, 0.75),
        mean: v.iter().sum::<f64>() / v.len().max(1) as f64,
    }
}

/// One run of the configured method; returns `(energy, error)`.
fn one_run(
    c: &ExperimentConfig,
    p: &MolecularProblem,
    noise: NoiseSpec,
    shots: ShotBudget,
    run: usize,
) -> Result<(f64, f64)> {
    let mode = c.evaluator_with(noise, shots, c.seed ^ run as u64)?;
    match c.method {
        Method::Adapt => {
            let r = adapt_run(p, &c.adapt_config(mode))?;
            Ok((r.final_energy, r.final_error()))
        }
        Method::Uccsd => {
            let pool = build_uccsd(p)?;
            let r = run_fixed_vqe(p, &pool, mode, &c.effective_optimizer())?;
            Ok((r.energy, r.error))
        }
    }
}

fn vqe_cmd(c: &ExperimentConfig) -> CliResult<()> {
    let p = single_problem(c)?;
    let pool = build_uccsd(&p)?;
    let optimizer = c.effective_optimizer();
    let results: Vec<Result<(u64, adaptq::engine::VqeRun)>> = (0..c.runs)
        .into_par_iter()
        .map(|run| {
            let seed = c.seed ^ run as u64;
            Ok((seed, run_fixed_vqe(&p, &pool, c.evaluator(seed)?, &optimizer)?))
        })
        .collect();
    let mut rows = Vec::new();
    let mut errors = Vec::new();
    for (run, r) in results.into_iter().enumerate() {
        let (seed, v) = r?;
        errors.push(v.error);
        rows.push(vec![
            run.to_string(),
            seed.to_string(),
            v.energy.to_string(),
            v.error.to_string(),
            v.evaluations.to_string(),
            v.converged.to_string(),
            v.ansatz.len().to_string(),
        ]);
    }
    write_rows(
        c,
        &["run", "seed", "energy", "error", "evaluations", "converged", "n_parameters"],
        &rows,
    )?;
    let s = stats(&errors);
    eprintln!(
        "summary: runs={} error_median={:e} error_q1={:e} error_q3={:e} chemical_accuracy={}",
        c.runs,
        s.median,
        s.q1,
        s.q3,
        s.median <= CHEMICAL_ACCURACY
    );
    Ok(())
}

fn adapt_cmd(c: &ExperimentConfig) -> CliResult<()> {
    let p = single_problem(c)?;
    let record = adapt_run(&p, &c.adapt_config(c.evaluator(c.seed)?))?;
    record.write_csv(sink(c)?)?;
    let summary = format!(
        "summary: iterations={} final_energy={:.12} error={:e} converged={} cnots={} parameters={} chemical_accuracy={}",
        record.rows.len(),
        record.final_energy,
        record.final_error(),
        record.converged,
        record.ansatz.cnot_count(),
        record.ansatz.len(),
        record.final_error() <= CHEMICAL_ACCURACY
    );
    if c.out.is_some() {
        println!("{summary}");
    } else {
        eprintln!("{summary}");
    }
    Ok(())
}

fn method_name(m: Method) -> &'static str {
    match m {
        Method::Adapt => "adapt",
        Method::Uccsd => "uccsd",
    }
}

fn scan_cmd(c: &ExperimentConfig) -> CliResult<()> {
    if c.problems.is_empty() {
        return Err(Failure::Usage("scan needs at least one problem= entry".into()));
    }
    let problems: Vec<MolecularProblem> = c.problems.iter().map(|p| load(p)).collect::<Result<_>>()?;
    let noise = c.noise()?;
    let jobs: Vec<(usize, usize)> = (0..problems.len())
        .flat_map(|i| (0..c.runs).map(move |r| (i, r)))
        .collect();
    let results: Vec<Result<(f64, f64)>> = jobs
        .par_iter()
        .map(|&(i, r)| one_run(c, &problems[i], noise, c.shots, r))
        .collect();
    let mut rows = Vec::new();
    for (i, p) in problems.iter().enumerate() {
        let mut energies = Vec::new();
        let mut errors = Vec::new();
        for (k, &(j, _)) in jobs.iter().enumerate() {
            if j == i {
                let (e, err) = results[k].as_ref().map_err(clone_error)?;
                energies.push(*e);
                errors.push(*err);
            }
        }
        let s = stats(&errors);
        rows.push(vec![
            c.problems[i].clone(),
            p.geometry_tag.clone().unwrap_or_default(),
            p.n_spin_orbitals.to_string(),
            method_name(c.method).to_string(),
            c.runs.to_string(),
            reference_ground_energy(p)?.to_string(),
            (energies.iter().sum::<f64>() / energies.len() as f64).to_string(),
            s.median.to_string(),
            s.mean.to_string(),
            s.q1.to_string(),
            s.q3.to_string(),
        ]);
    }
    write_rows(
        c,
        &[
            "problem",
            "geometry",
            "qubits",
            "method",
            "runs",
            "fci_energy",
            "energy_mean",
            "error_median",
            "error_mean",
            "error_q1",
            "error_q3",
        ],
        &rows,
    )
}

fn clone_error(e: &Error) -> Failure {
    Failure::Data(match e {
        Error::Resource(m) => Error::Resource(m.clone()),
        other => Error::Invalid(other.to_string()),
    })
}

fn sweep_cmd(c: &ExperimentConfig) -> CliResult<()> {
    let axis = c
        .sweep
        .ok_or_else(|| Failure::Usage("noise-sweep needs sweep=shots|t1t2|spam|cnot_error".into()))?;
    if c.values.is_empty() {
        return Err(Failure::Usage("noise-sweep needs values=v1,v2,…".into()));
    }
    let p = single_problem(c)?;
    let mut sampled = c.clone();
    sampled.sampled = true;
    let base = c.noise()?;
    let mut points = Vec::new();
    for v in &c.values {
        let bad = || Failure::Usage(format!("bad {} value {v:?}", axis.name()));
        let x = parse_f64(v).ok_or_else(bad)?;
        let (noise, shots) = match axis {
            SweepAxis::Shots => {
                if !(x >= 1.0) || x.fract() != 0.0 {
                    return Err(bad());
                }
                (base, ShotBudget::PerString(x as u64))
            }
            SweepAxis::T1T2 => (base.with_thermal(x, x)?, c.shots),
            SweepAxis::Spam => (base.with_spam(x)?, c.shots),
            SweepAxis::CnotError => (base.with_cnot_error(x)?, c.shots),
        };
        points.push((v.clone(), noise, shots));
    }
    let jobs: Vec<(usize, usize)> = (0..points.len())
        .flat_map(|i| (0..c.runs).map(move |r| (i, r)))
        .collect();
    let results: Vec<Result<(f64, f64)>> = jobs
        .par_iter()
        .map(|&(i, r)| one_run(&sampled, &p, points[i].1, points[i].2, r))
        .collect();
    let mut rows = Vec::new();
    for (i, (v, _, _)) in points.iter().enumerate() {
        let mut errors = Vec::new();
        for (k, &(j, _)) in jobs.iter().enumerate() {
            if j == i {
                errors.push(results[k].as_ref().map_err(clone_error)?.1);
            }
        }
        let s = stats(&errors);
        rows.push(vec![
            axis.name().to_string(),
            v.clone(),
            method_name(c.method).to_string(),
            c.runs.to_string(),
            s.median.to_string(),
            s.q1.to_string(),
            s.q3.to_string(),
            s.mean.to_string(),
        ]);
    }
    write_rows(
        c,
        &[
            "axis",
            "value",
            "method",
            "runs",
            "error_median",
            "error_q1",
            "error_q3",
            "error_mean",
        ],
        &rows,
    )
}
