//! Flat `key=value` experiment configuration. `problem=` may repeat; `#` starts
//! a comment.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use adaptq::chem::{h2_problem, load_problem, MolecularProblem};
use adaptq::circuit::NoiseSpec;
use adaptq::engine::{
    AdaptConfig, EvaluatorMode, Grouping, Growth, OptimizerConfig, OptimizerKind, ShotBudget,
    DEFAULT_CONSERVATIVE_CANDIDATES, DEFAULT_EPSILON, DEFAULT_PENALTY_WINDOW, DEFAULT_REMOVAL_RATIO,
    DEFAULT_REMOVAL_TOLERANCE,
};
use adaptq::pools::PoolFamily;
use adaptq::{Error, Result};

/// Name accepted by `problem=` for the bundled H₂ Hamiltonian.
pub const BUILTIN_H2: &str = "builtin:h2";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Adapt,
    Uccsd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepAxis {
    Shots,
    T1T2,
    Spam,
    CnotError,
}

impl FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "shots" => Ok(SweepAxis::Shots),
            "t1t2" => Ok(SweepAxis::T1T2),
            "spam" => Ok(SweepAxis::Spam),
            "cnot_error" => Ok(SweepAxis::CnotError),
            _ => Err(Error::Invalid(format!("unknown sweep axis {s:?}"))),
        }
    }
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::Shots => "shots",
            SweepAxis::T1T2 => "t1t2",
            SweepAxis::Spam => "spam",
            SweepAxis::CnotError => "cnot_error",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub problems: Vec<String>,
    pub pool: PoolFamily,
    pub method: Method,
    pub sampled: bool,
    pub shots: ShotBudget,
    pub grouping: Grouping,
    pub t1: f64,
    pub t2: f64,
    pub cnot_error: f64,
    pub spam: f64,
    pub optimizer: OptimizerConfig,
    optimizer_set: bool,
    pub epsilon: f64,
    pub max_iterations: usize,
    pub growth: Growth,
    pub runs: usize,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub sweep: Option<SweepAxis>,
    pub values: Vec<String>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            problems: Vec::new(),
            pool: PoolFamily::QubitNoZ,
            method: Method::Adapt,
            sampled: false,
            shots: ShotBudget::PerString(4096),
            grouping: Grouping::Separate,
            t1: f64::INFINITY,
            t2: f64::INFINITY,
            cnot_error: 0.0,
            spam: 0.0,
            optimizer: OptimizerConfig::default(),
            optimizer_set: false,
            epsilon: DEFAULT_EPSILON,
            max_iterations: 50,
            growth: Growth::Plain,
            runs: 1,
            seed: 0,
            out: None,
            sweep: None,
            values: Vec::new(),
        }
    }
}

fn num<T: FromStr>(key: &str, v: &str, line: usize) -> Result<T> {
    v.parse().map_err(|_| Error::Parse {
        line,
        msg: format!("{key}: cannot parse {v:?}"),
    })
}

/// `inf` and `infinity` are accepted for times.
pub fn parse_f64(v: &str) -> Option<f64> {
    match v.trim().to_ascii_lowercase().as_str() {
        "inf" | "infinity" => Some(f64::INFINITY),
        s => s.parse().ok(),
    }
}

fn float(key: &str, v: &str, line: usize) -> Result<f64> {
    parse_f64(v).ok_or_else(|| Error::Parse {
        line,
        msg: format!("{key}: cannot parse {v:?}"),
    })
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut c = ExperimentConfig::default();
        let mut removal = (DEFAULT_REMOVAL_RATIO, DEFAULT_REMOVAL_TOLERANCE, DEFAULT_PENALTY_WINDOW);
        let mut conservative_n = DEFAULT_CONSERVATIVE_CANDIDATES;
        let mut growth_name = "plain".to_string();
        let mut format: Option<String> = None;
        let mut pool_name: Option<String> = None;
        let mut opt = OptimizerConfig::default();
        let mut opt_touched = false;
        for (k, raw) in text.lines().enumerate() {
            let line = k + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (key, v) = body.split_once('=').ok_or_else(|| Error::Parse {
                line,
                msg: format!("expected key=value, got {body:?}"),
            })?;
            let (key, v) = (key.trim(), v.trim());
            match key {
                "problem" => c.problems.push(v.to_string()),
                "pool" => pool_name = Some(v.to_string()),
                "format" => format = Some(v.to_string()),
                "method" => {
                    c.method = match v {
                        "adapt" => Method::Adapt,
                        "uccsd" => Method::Uccsd,
                        _ => return Err(Error::Parse { line, msg: format!("unknown method {v:?}") }),
                    }
                }
                "mode" => {
                    c.sampled = match v {
                        "exact" => false,
                        "shots" | "sampled" => true,
                        _ => return Err(Error::Parse { line, msg: format!("unknown mode {v:?}") }),
                    }
                }
                "shots" => c.shots = ShotBudget::PerString(num(key, v, line)?),
                "shot_total" => c.shots = ShotBudget::Total(num(key, v, line)?),
                "grouping" => {
                    c.grouping = match v {
                        "separate" => Grouping::Separate,
                        "qubitwise" => Grouping::Qubitwise,
                        _ => return Err(Error::Parse { line, msg: format!("unknown grouping {v:?}") }),
                    }
                }
                "t1" => c.t1 = float(key, v, line)?,
                "t2" => c.t2 = float(key, v, line)?,
                "cnot_error" => c.cnot_error = float(key, v, line)?,
                "spam" => c.spam = float(key, v, line)?,
                "optimizer" => {
                    opt.kind = OptimizerKind::from_str(v).map_err(|e| Error::Parse { line, msg: e.to_string() })?;
                    opt_touched = true;
                }
                "max_evaluations" => {
                    opt.max_evaluations = num(key, v, line)?;
                    opt_touched = true;
                }
                "x_tolerance" => {
                    opt.x_tolerance = float(key, v, line)?;
                    opt_touched = true;
                }
                "f_tolerance" => {
                    opt.f_tolerance = float(key, v, line)?;
                    opt_touched = true;
                }
                "simplex_scale" => {
                    opt.initial_simplex_scale = float(key, v, line)?;
                    opt_touched = true;
                }
                "fd_step" => {
                    opt.fd_step = float(key, v, line)?;
                    opt_touched = true;
                }
                "epsilon" => c.epsilon = float(key, v, line)?,
                "max_iterations" => c.max_iterations = num(key, v, line)?,
                "growth" => growth_name = v.to_string(),
                "removal_r" => removal.0 = float(key, v, line)?,
                "removal_t" => removal.1 = float(key, v, line)?,
                "window" => removal.2 = num(key, v, line)?,
                "conservative_n" => conservative_n = num(key, v, line)?,
                "runs" => c.runs = num(key, v, line)?,
                "seed" => c.seed = num(key, v, line)?,
                "out" => c.out = Some(PathBuf::from(v)),
                "sweep" => c.sweep = Some(SweepAxis::from_str(v).map_err(|e| Error::Parse { line, msg: e.to_string() })?),
                "values" => {
                    c.values = v.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect()
                }
                _ => return Err(Error::Parse { line, msg: format!("unknown key {key:?}") }),
            }
        }
        if let Some(name) = pool_name {
            let family = match (&format, name.contains(':')) {
                (Some(f), false) if matches!(name.as_str(), "one" | "two" | "four") => format!("{name}:{f}"),
                _ => name,
            };
            c.pool = family.parse()?;
        }
        c.growth = match growth_name.as_str() {
            "plain" => Growth::Plain,
            "removal" => Growth::Removal {
                r: removal.0,
                t: removal.1,
                window: removal.2,
            },
            "conservative" => Growth::Conservative { n: conservative_n },
            other => return Err(Error::Invalid(format!("unknown growth {other:?}"))),
        };
        c.optimizer = opt;
        c.optimizer_set = opt_touched;
        Ok(c)
    }

    /// Optimizer to use: the configured one, or the noisy-objective preset in
    /// sampled mode when none was configured.
    pub fn effective_optimizer(&self) -> OptimizerConfig {
        if self.sampled && !self.optimizer_set {
            OptimizerConfig::sampled()
        } else {
            self.optimizer
        }
    }

    pub fn noise(&self) -> Result<NoiseSpec> {
        NoiseSpec::ideal()
            .with_thermal(self.t1, self.t2)?
            .with_cnot_error(self.cnot_error)?
            .with_spam(self.spam)
    }

    pub fn evaluator(&self, seed: u64) -> Result<EvaluatorMode> {
        self.evaluator_with(self.noise()?, self.shots, seed)
    }

    pub fn evaluator_with(&self, noise: NoiseSpec, shots: ShotBudget, seed: u64) -> Result<EvaluatorMode> {
        Ok(if self.sampled {
            EvaluatorMode::Sampled {
                shots,
                grouping: self.grouping,
                noise,
                seed,
            }
        } else {
            EvaluatorMode::Exact
        })
    }

    pub fn adapt_config(&self, evaluator: EvaluatorMode) -> AdaptConfig {
        AdaptConfig {
            pool: self.pool,
            epsilon: self.epsilon,
            max_iterations: self.max_iterations,
            growth: self.growth,
            optimizer: self.effective_optimizer(),
            evaluator,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.runs == 0 {
            return Err(Error::Contract("runs must be at least 1".into()));
        }
        self.adapt_config(EvaluatorMode::Exact).validate()?;
        self.noise()?;
        Ok(())
    }
}

/// Load a problem by path, or the bundled H₂ data for [`BUILTIN_H2`].
pub fn load(name: &str) -> Result<MolecularProblem> {
    if name == BUILTIN_H2 {
        Ok(h2_problem())
    } else {
        load_problem(name)
    }
}
