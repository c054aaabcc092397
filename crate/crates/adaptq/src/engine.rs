//! Optimizers, fixed-ansatz VQE and the ADAPT loop with its growth strategies.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::chem::{group_commuting, hartree_fock_state, hf_occupation, make_shot_plan, MolecularProblem};
use crate::circuit::{compile_exponential_sum, execute_density, expected_pauli, sample_pauli, Circuit, Gate, Measured, NoiseSpec};
use crate::error::{Error, Result};
use crate::pauli::{commutator, CommuteMode, PauliString, PauliSum};
use crate::pools::{build_pool, Pool, PoolFamily};
use crate::simstate::{apply_exponential, apply_sum, exact_ground, expectation, DensityMatrix, StateVector, MAX_DENSE_QUBITS};

/// Default gradient-norm threshold.
pub const DEFAULT_EPSILON: f64 = 0.01;
pub const DEFAULT_REMOVAL_RATIO: f64 = 0.5;
pub const DEFAULT_REMOVAL_TOLERANCE: f64 = 1.5;
pub const DEFAULT_PENALTY_WINDOW: usize = 10;
pub const DEFAULT_CONSERVATIVE_CANDIDATES: usize = 5;

/// Gradients at or below this magnitude count as zero for stall detection.
const ZERO_GRADIENT: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct AnsatzElement {
    pub pool_index: usize,
    pub operator: PauliSum,
    pub parameter: f64,
    pub added_at_iteration: usize,
    pub gradient_at_selection: f64,
    /// Energy change produced by adding this element (negative lowers energy).
    pub delta_e: f64,
    pub performance_ratio: f64,
}

impl AnsatzElement {
    pub fn new(pool_index: usize, operator: PauliSum, iteration: usize, gradient: f64) -> Self {
        AnsatzElement {
            pool_index,
            operator,
            parameter: 0.0,
            added_at_iteration: iteration,
            gradient_at_selection: gradient,
            delta_e: 0.0,
            performance_ratio: 0.0,
        }
    }

    /// Store `delta_e` and the matching `|delta_e / gradient|`.
    pub fn record_delta(&mut self, delta_e: f64) {
        self.delta_e = delta_e;
        self.performance_ratio = if self.gradient_at_selection != 0.0 {
            (delta_e / self.gradient_at_selection).abs()
        } else {
            0.0
        };
    }
}

/// Ordered product `exp(θ_n A_n)···exp(θ_1 A_1)`; element 0 acts first.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Ansatz {
    pub elements: Vec<AnsatzElement>,
}

impl Ansatz {
    pub fn new() -> Self {
        Self::default()
    }

    /// Every pool operator in pool order, all parameters zero.
    pub fn from_pool(pool: &Pool) -> Self {
        Ansatz {
            elements: pool
                .operators
                .iter()
                .enumerate()
                .map(|(i, op)| AnsatzElement::new(i, op.operator.clone(), 0, 0.0))
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn push(&mut self, e: AnsatzElement) {
        self.elements.push(e);
    }

    pub fn parameters(&self) -> Vec<f64> {
        self.elements.iter().map(|e| e.parameter).collect()
    }

    pub fn set_parameters(&mut self, params: &[f64]) -> Result<()> {
        if params.len() != self.elements.len() {
            return Err(Error::Dimension(format!(
                "{} parameters for {} elements",
                params.len(),
                self.elements.len()
            )));
        }
        for (e, p) in self.elements.iter_mut().zip(params) {
            e.parameter = *p;
        }
        Ok(())
    }

    pub fn operators(&self) -> Vec<&PauliSum> {
        self.elements.iter().map(|e| &e.operator).collect()
    }

    /// CNOTs of the ladder compilation of every element.
    pub fn cnot_count(&self) -> usize {
        self.elements.iter().map(|e| exponential_cnot_count(&e.operator)).sum()
    }
}

/// CNOTs used by the ladder compilation of `exp(θ·a)`: `2(w−1)` per string.
pub fn exponential_cnot_count(a: &PauliSum) -> usize {
    a.strings()
        .filter(|p| !p.is_identity())
        .map(|p| 2 * (p.weight() - 1))
        .sum()
}

/// Apply the ansatz to `reference` in list order.
pub fn prepare(ansatz: &Ansatz, reference: &StateVector) -> Result<StateVector> {
    prepare_with(&ansatz.operators(), &ansatz.parameters(), reference)
}

pub fn prepare_with(ops: &[&PauliSum], params: &[f64], reference: &StateVector) -> Result<StateVector> {
    if ops.len() != params.len() {
        return Err(Error::Dimension(format!(
            "{} parameters for {} operators",
            params.len(),
            ops.len()
        )));
    }
    let mut s = reference.clone();
    for (a, &t) in ops.iter().zip(params) {
        if !t.is_finite() {
            return Err(Error::Contract(format!("non-finite parameter {t}")));
        }
        if t != 0.0 {
            s = apply_exponential(a, t, &s)?;
        }
    }
    Ok(s)
}

/// Gate-level ansatz: X gates on the occupied orbitals, then each element's
/// compiled exponential.
pub fn ansatz_circuit(n_qubits: usize, occupied: &[usize], ops: &[&PauliSum], params: &[f64]) -> Result<Circuit> {
    let mut c = Circuit::new(n_qubits);
    for &q in occupied {
        c.push(Gate::X(q))?;
    }
    for (a, &t) in ops.iter().zip(params) {
        c.extend(&compile_exponential_sum(a, t)?)?;
    }
    Ok(c)
}

/// `dE/dθ` at `θ = 0` for appending `exp(θ·a)`: `2·Re⟨ψ|H·A|ψ⟩`.
pub fn exact_gradient(a: &PauliSum, state: &StateVector, h: &PauliSum) -> Result<f64> {
    let hpsi = apply_sum(h, state)?;
    gradient_from_hpsi(a, state, &hpsi)
}

fn gradient_from_hpsi(a: &PauliSum, state: &StateVector, hpsi: &[Complex64]) -> Result<f64> {
    let apsi = apply_sum(a, state)?;
    let s: Complex64 = hpsi.iter().zip(&apsi).map(|(h, x)| h.conj() * x).sum();
    Ok(2.0 * s.re)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OptimizerKind {
    NelderMead,
    QuasiNewtonFd,
}

impl std::str::FromStr for OptimizerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "nelder_mead" | "nelder-mead" | "nm" => Ok(OptimizerKind::NelderMead),
            "quasi_newton_fd" | "bfgs" => Ok(OptimizerKind::QuasiNewtonFd),
            other => Err(Error::Invalid(format!("unknown optimizer {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OptimizerConfig {
    pub kind: OptimizerKind,
    pub max_evaluations: usize,
    /// Simplex size for Nelder-Mead; step and gradient bound for quasi-Newton.
    pub x_tolerance: f64,
    pub f_tolerance: f64,
    pub initial_simplex_scale: f64,
    pub fd_step: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            kind: OptimizerKind::NelderMead,
            max_evaluations: 20_000,
            x_tolerance: 1e-7,
            f_tolerance: 1e-11,
            initial_simplex_scale: 0.1,
            fd_step: 1e-6,
        }
    }
}

impl OptimizerConfig {
    /// Settings suited to noisy objectives: loose tolerances and a small budget.
    pub fn sampled() -> Self {
        OptimizerConfig {
            max_evaluations: 400,
            x_tolerance: 1e-3,
            f_tolerance: 1e-5,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.x_tolerance > 0.0
            && self.f_tolerance > 0.0
            && self.initial_simplex_scale > 0.0
            && self.fd_step > 0.0
            && self.max_evaluations > 0;
        if ok {
            Ok(())
        } else {
            Err(Error::Contract("optimizer tolerances and steps must be positive".into()))
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OptimizeResult {
    pub x: Vec<f64>,
    pub f: f64,
    pub evaluations: usize,
    pub converged: bool,
}

/// Minimize `f` from `x0`. Exhausting the budget returns the best point seen
/// with `converged == false`.
pub fn minimize<F>(mut f: F, x0: &[f64], cfg: &OptimizerConfig) -> Result<OptimizeResult>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    cfg.validate()?;
    if x0.is_empty() {
        let v = f(&[])?;
        return Ok(OptimizeResult {
            x: vec![],
            f: v,
            evaluations: 1,
            converged: true,
        });
    }
    match cfg.kind {
        OptimizerKind::NelderMead => nelder_mead(&mut f, x0, cfg),
        OptimizerKind::QuasiNewtonFd => quasi_newton(&mut f, x0, cfg),
    }
}

fn nelder_mead<F>(f: &mut F, x0: &[f64], cfg: &OptimizerConfig) -> Result<OptimizeResult>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    const ALPHA: f64 = 1.0;
    const GAMMA: f64 = 2.0;
    const RHO: f64 = 0.5;
    const SIGMA: f64 = 0.5;
    let n = x0.len();
    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| -> Result<f64> {
        *evals += 1;
        let v = f(x)?;
        Ok(if v.is_nan() { f64::INFINITY } else { v })
    };
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((x0.to_vec(), eval(x0, &mut evals)?));
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += cfg.initial_simplex_scale;
        let v = eval(&x, &mut evals)?;
        simplex.push((x, v));
    }
    let point = |c: &[f64], d: &[f64], t: f64| -> Vec<f64> {
        c.iter().zip(d).map(|(a, b)| a + t * (b - a)).collect()
    };
    let mut converged = false;
    loop {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = &simplex[0];
        let f_spread = (simplex[n].1 - best.1).abs();
        let x_spread = simplex[1..]
            .iter()
            .flat_map(|(x, _)| x.iter().zip(&best.0).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if f_spread <= cfg.f_tolerance && x_spread <= cfg.x_tolerance {
            converged = true;
            break;
        }
        if evals >= cfg.max_evaluations {
            break;
        }
        let mut centroid = vec![0.0; n];
        for (x, _) in &simplex[..n] {
            for (c, v) in centroid.iter_mut().zip(x) {
                *c += v / n as f64;
            }
        }
        let worst = simplex[n].clone();
        let xr = point(&centroid, &worst.0, -ALPHA);
        let fr = eval(&xr, &mut evals)?;
        if fr < simplex[0].1 {
            let xe = point(&centroid, &worst.0, -GAMMA);
            let fe = eval(&xe, &mut evals)?;
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
            continue;
        }
        let (xc, fc) = if fr < worst.1 {
            let xc = point(&centroid, &xr, RHO);
            let fc = eval(&xc, &mut evals)?;
            (xc, fc)
        } else {
            let xc = point(&centroid, &worst.0, RHO);
            let fc = eval(&xc, &mut evals)?;
            (xc, fc)
        };
        if fc < fr.min(worst.1) {
            simplex[n] = (xc, fc);
            continue;
        }
        let x_best = simplex[0].0.clone();
        for vertex in simplex.iter_mut().skip(1) {
            let x = point(&x_best, &vertex.0, SIGMA);
            let v = eval(&x, &mut evals)?;
            *vertex = (x, v);
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, v) = simplex.swap_remove(0);
    Ok(OptimizeResult {
        x,
        f: v,
        evaluations: evals,
        converged,
    })
}

fn quasi_newton<F>(f: &mut F, x0: &[f64], cfg: &OptimizerConfig) -> Result<OptimizeResult>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    let n = x0.len();
    let mut evals = 0usize;
    let h = cfg.fd_step;
    let mut eval = |x: &DVector<f64>, evals: &mut usize| -> Result<f64> {
        *evals += 1;
        f(x.as_slice())
    };
    let grad = |x: &DVector<f64>, evals: &mut usize, eval: &mut dyn FnMut(&DVector<f64>, &mut usize) -> Result<f64>| -> Result<DVector<f64>> {
        let mut g = DVector::zeros(n);
        for i in 0..n {
            let mut xp = x.clone();
            xp[i] += h;
            let mut xm = x.clone();
            xm[i] -= h;
            g[i] = (eval(&xp, evals)? - eval(&xm, evals)?) / (2.0 * h);
        }
        Ok(g)
    };
    let mut x = DVector::from_column_slice(x0);
    let mut fx = eval(&x, &mut evals)?;
    let mut g = grad(&x, &mut evals, &mut eval)?;
    let mut hinv = DMatrix::<f64>::identity(n, n);
    let mut converged = false;
    while evals < cfg.max_evaluations {
        if g.amax() <= cfg.x_tolerance {
            converged = true;
            break;
        }
        let mut p = -(&hinv * &g);
        let mut slope = p.dot(&g);
        if slope >= 0.0 {
            hinv = DMatrix::identity(n, n);
            p = -g.clone();
            slope = p.dot(&g);
        }
        let mut alpha = 1.0;
        let mut accepted = None;
        for _ in 0..50 {
            let xn = &x + alpha * &p;
            let fnew = eval(&xn, &mut evals)?;
            if fnew <= fx + 1e-4 * alpha * slope {
                accepted = Some((xn, fnew));
                break;
            }
            alpha *= 0.5;
        }
        let Some((xn, fnew)) = accepted else {
            break;
        };
        let gn = grad(&xn, &mut evals, &mut eval)?;
        let s = &xn - &x;
        let y = &gn - &g;
        let sy = s.dot(&y);
        if sy > 1e-14 {
            let rho = 1.0 / sy;
            let id = DMatrix::<f64>::identity(n, n);
            let left = &id - rho * &s * y.transpose();
            let right = &id - rho * &y * s.transpose();
            hinv = &left * &hinv * &right + rho * &s * s.transpose();
        }
        let df = (fx - fnew).abs();
        let step = s.amax();
        x = xn;
        fx = fnew;
        g = gn;
        if df <= cfg.f_tolerance * fx.abs().max(1.0) && step <= cfg.x_tolerance {
            converged = true;
            break;
        }
    }
    Ok(OptimizeResult {
        x: x.as_slice().to_vec(),
        f: fx,
        evaluations: evals,
        converged,
    })
}

/// Shot budget of a sampled evaluator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ShotBudget {
    /// The same number of shots for every string.
    PerString(u64),
    /// A total split over strings by `|coefficient|`; each commuting group is
    /// measured with the largest allocation among its strings.
    Total(u64),
}

/// How strings share measurement settings.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Grouping {
    /// Every string is measured on its own shots.
    #[default]
    Separate,
    /// Qubitwise-commuting strings share one rotated measurement.
    Qubitwise,
}

#[derive(Clone, Debug, PartialEq)]
pub enum EvaluatorMode {
    Exact,
    Sampled {
        shots: ShotBudget,
        grouping: Grouping,
        noise: NoiseSpec,
        seed: u64,
    },
}

impl EvaluatorMode {
    /// Sampled mode with separate per-string measurement.
    pub fn sampled(shots: ShotBudget, noise: NoiseSpec, seed: u64) -> Self {
        EvaluatorMode::Sampled {
            shots,
            grouping: Grouping::Separate,
            noise,
            seed,
        }
    }
}

/// Prepared state: pure when gates are ideal, a density matrix otherwise.
pub enum Prepared {
    Pure(StateVector),
    Mixed(DensityMatrix),
}

impl Prepared {
    pub fn as_measured(&self) -> Measured<'_> {
        match self {
            Prepared::Pure(s) => Measured::Pure(s),
            Prepared::Mixed(r) => Measured::Mixed(r),
        }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Child seed for stream `k` of `seed`.
pub fn derive_seed(seed: u64, k: u64) -> u64 {
    splitmix64(seed ^ splitmix64(k.wrapping_add(0x632B_E59B_D9B4_E019)))
}

type Groups = Vec<(Vec<PauliString>, u64)>;

fn shot_groups(sum: &PauliSum, budget: ShotBudget, grouping: Grouping) -> Groups {
    let groups = match grouping {
        Grouping::Qubitwise => group_commuting(sum, CommuteMode::Qubitwise),
        Grouping::Separate => sum
            .strings()
            .filter(|p| !p.is_identity())
            .map(|p| vec![*p])
            .collect(),
    };
    match budget {
        ShotBudget::PerString(s) => groups.into_iter().map(|g| (g, s.max(1))).collect(),
        ShotBudget::Total(t) => {
            let plan = make_shot_plan(sum, t);
            groups
                .into_iter()
                .map(|g| {
                    let s = g.iter().map(|p| plan.per_string[p]).max().unwrap_or(1);
                    (g, s.max(1))
                })
                .collect()
        }
    }
}

/// Energy and gradient oracle for a problem: exact statevector algebra or
/// shot sampling of qubitwise-commuting groups, optionally on a noisy
/// density-matrix execution of the ansatz circuit.
pub struct EnergyEvaluator<'a> {
    problem: &'a MolecularProblem,
    mode: EvaluatorMode,
    reference: StateVector,
    occupied: Vec<usize>,
    energy_groups: Groups,
    calls: u64,
}

impl<'a> EnergyEvaluator<'a> {
    pub fn new(problem: &'a MolecularProblem, mode: EvaluatorMode) -> Result<Self> {
        if let EvaluatorMode::Sampled { shots, noise, .. } = &mode {
            noise.validate()?;
            let n = match shots {
                ShotBudget::PerString(n) | ShotBudget::Total(n) => *n,
            };
            if n == 0 {
                return Err(Error::Contract("shot budget must be positive".into()));
            }
        }
        let energy_groups = match &mode {
            EvaluatorMode::Exact => Vec::new(),
            EvaluatorMode::Sampled { shots, grouping, .. } => {
                shot_groups(&problem.hamiltonian, *shots, *grouping)
            }
        };
        Ok(EnergyEvaluator {
            problem,
            reference: hartree_fock_state(problem),
            occupied: hf_occupation(problem.n_spin_orbitals, problem.n_electrons, problem.ordering),
            mode,
            energy_groups,
            calls: 0,
        })
    }

    pub fn problem(&self) -> &MolecularProblem {
        self.problem
    }

    pub fn mode(&self) -> &EvaluatorMode {
        &self.mode
    }

    pub fn reference(&self) -> &StateVector {
        &self.reference
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.mode, EvaluatorMode::Exact)
    }

    /// State prepared by the ansatz from the Hartree-Fock reference.
    pub fn prepare(&self, ops: &[&PauliSum], params: &[f64]) -> Result<Prepared> {
        match &self.mode {
            EvaluatorMode::Sampled { noise, .. } if !noise.gates_are_ideal() => {
                let c = ansatz_circuit(self.problem.n_spin_orbitals, &self.occupied, ops, params)?;
                Ok(Prepared::Mixed(execute_density(&c, noise)?))
            }
            _ => Ok(Prepared::Pure(prepare_with(ops, params, &self.reference)?)),
        }
    }

    fn next_seed(&mut self) -> Option<(u64, NoiseSpec)> {
        match &self.mode {
            EvaluatorMode::Exact => None,
            EvaluatorMode::Sampled { seed, noise, .. } => {
                let s = derive_seed(*seed, self.calls);
                self.calls += 1;
                Some((s, *noise))
            }
        }
    }

    /// Energy of the ansatz state. Sampled calls draw fresh randomness from a
    /// stream derived from the seed and the call count.
    pub fn energy(&mut self, ops: &[&PauliSum], params: &[f64]) -> Result<f64> {
        let state = self.prepare(ops, params)?;
        match self.next_seed() {
            None => match &state {
                Prepared::Pure(s) => expectation(&self.problem.hamiltonian, s),
                Prepared::Mixed(r) => r.expectation(&self.problem.hamiltonian),
            },
            Some((seed, noise)) => measure_sum(
                &self.problem.hamiltonian,
                &self.energy_groups,
                state.as_measured(),
                &noise,
                seed,
            ),
        }
    }

    pub fn ansatz_energy(&mut self, ansatz: &Ansatz) -> Result<f64> {
        self.energy(&ansatz.operators(), &ansatz.parameters())
    }

    /// Infinite-shot limit of [`Self::energy`]: gate noise and readout bias
    /// included, shot noise removed. Equal to `energy` in exact mode.
    pub fn limit_energy(&self, ops: &[&PauliSum], params: &[f64]) -> Result<f64> {
        let state = self.prepare(ops, params)?;
        let h = &self.problem.hamiltonian;
        match &self.mode {
            EvaluatorMode::Exact => match &state {
                Prepared::Pure(s) => expectation(h, s),
                Prepared::Mixed(r) => r.expectation(h),
            },
            EvaluatorMode::Sampled { noise, .. } => {
                let mut e = h.identity_coefficient().re;
                for (g, _) in &self.energy_groups {
                    for (p, v) in expected_pauli(g, state.as_measured(), noise)? {
                        e += h.coefficient(&p).re * v;
                    }
                }
                Ok(e)
            }
        }
    }

    pub fn ansatz_limit_energy(&self, ansatz: &Ansatz) -> Result<f64> {
        self.limit_energy(&ansatz.operators(), &ansatz.parameters())
    }

    /// Gradients `⟨[H, A_k]⟩` of appending each candidate to the ansatz.
    pub fn gradients(&mut self, ops: &[&PauliSum], params: &[f64], candidates: &[&PauliSum]) -> Result<Vec<f64>> {
        let state = self.prepare(ops, params)?;
        let h = &self.problem.hamiltonian;
        match (self.next_seed(), &state) {
            (None, Prepared::Pure(s)) => {
                let hpsi = apply_sum(h, s)?;
                candidates
                    .par_iter()
                    .map(|a| gradient_from_hpsi(a, s, &hpsi))
                    .collect()
            }
            (None, Prepared::Mixed(r)) => candidates
                .iter()
                .map(|a| r.expectation(&commutator(h, a)?))
                .collect(),
            (Some((seed, noise)), _) => {
                let (budget, grouping) = match &self.mode {
                    EvaluatorMode::Sampled { shots, grouping, .. } => (*shots, *grouping),
                    EvaluatorMode::Exact => unreachable!(),
                };
                let measured = state.as_measured();
                candidates
                    .par_iter()
                    .enumerate()
                    .map(|(k, a)| {
                        let c = commutator(h, a)?;
                        if c.is_empty() {
                            return Ok(0.0);
                        }
                        let groups = shot_groups(&c, budget, grouping);
                        measure_sum(&c, &groups, measured, &noise, derive_seed(seed, k as u64))
                    })
                    .collect()
            }
        }
    }
}

fn measure_sum(sum: &PauliSum, groups: &Groups, state: Measured<'_>, noise: &NoiseSpec, seed: u64) -> Result<f64> {
    let mut e = sum.identity_coefficient().re;
    for (k, (g, shots)) in groups.iter().enumerate() {
        let est = sample_pauli(g, state, *shots, noise, derive_seed(seed, k as u64))?;
        for p in g {
            e += sum.coefficient(p).re * est[p].value;
        }
    }
    Ok(e)
}

/// Outcome of one parameter optimization.
#[derive(Clone, Debug, PartialEq)]
pub struct VqeResult {
    pub params: Vec<f64>,
    /// Best objective value seen by the optimizer.
    pub energy: f64,
    pub evaluations: usize,
    pub converged: bool,
}

/// Optimize all ansatz parameters from `initial`.
pub fn vqe_minimize(
    ansatz: &Ansatz,
    initial: &[f64],
    evaluator: &mut EnergyEvaluator<'_>,
    optimizer: &OptimizerConfig,
) -> Result<VqeResult> {
    if initial.len() != ansatz.len() {
        return Err(Error::Dimension(format!(
            "{} initial parameters for {} elements",
            initial.len(),
            ansatz.len()
        )));
    }
    let ops = ansatz.operators();
    let r = minimize(|x| evaluator.energy(&ops, x), initial, optimizer)?;
    Ok(VqeResult {
        params: r.x,
        energy: r.f,
        evaluations: r.evaluations,
        converged: r.converged,
    })
}

/// Exact ground energy when the register is small enough for dense
/// diagonalization, otherwise NaN.
pub fn reference_ground_energy(problem: &MolecularProblem) -> Result<f64> {
    if problem.n_spin_orbitals <= MAX_DENSE_QUBITS {
        Ok(exact_ground(&problem.hamiltonian)?.0)
    } else {
        Ok(f64::NAN)
    }
}

/// Fixed-ansatz VQE run summary.
#[derive(Clone, Debug, PartialEq)]
pub struct VqeRun {
    pub ansatz: Ansatz,
    /// Infinite-shot energy at the final parameters.
    pub energy: f64,
    pub exact_energy: f64,
    pub error: f64,
    pub evaluations: usize,
    pub converged: bool,
}

/// VQE with every operator of `pool` as a fixed ansatz, starting at zero.
pub fn run_fixed_vqe(
    problem: &MolecularProblem,
    pool: &Pool,
    mode: EvaluatorMode,
    optimizer: &OptimizerConfig,
) -> Result<VqeRun> {
    let exact_energy = reference_ground_energy(problem)?;
    let mut ev = EnergyEvaluator::new(problem, mode)?;
    let mut ansatz = Ansatz::from_pool(pool);
    let r = vqe_minimize(&ansatz, &vec![0.0; ansatz.len()], &mut ev, optimizer)?;
    ansatz.set_parameters(&r.params)?;
    let energy = ev.ansatz_limit_energy(&ansatz)?;
    Ok(VqeRun {
        ansatz,
        energy,
        exact_energy,
        error: (energy - exact_energy).abs(),
        evaluations: r.evaluations,
        converged: r.converged,
    })
}

/// How the ansatz grows each iteration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Growth {
    Plain,
    /// Try removing weak earlier elements after each addition.
    Removal { r: f64, t: f64, window: usize },
    /// Optimize the `n` highest-gradient candidates and keep the best.
    Conservative { n: usize },
}

impl Growth {
    pub fn removal() -> Self {
        Growth::Removal {
            r: DEFAULT_REMOVAL_RATIO,
            t: DEFAULT_REMOVAL_TOLERANCE,
            window: DEFAULT_PENALTY_WINDOW,
        }
    }

    pub fn conservative() -> Self {
        Growth::Conservative {
            n: DEFAULT_CONSERVATIVE_CANDIDATES,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Growth::Plain => Ok(()),
            Growth::Removal { r, t, window } => {
                if !(r > 0.0 && r < 1.0) || !(t > 1.0) || window == 0 {
                    Err(Error::Contract(format!(
                        "removal needs 0 < r < 1, t > 1, window ≥ 1 (got r={r}, t={t}, window={window})"
                    )))
                } else {
                    Ok(())
                }
            }
            Growth::Conservative { n } => {
                if n == 0 {
                    Err(Error::Contract("conservative growth needs N ≥ 1".into()))
                } else {
                    Ok(())
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AdaptConfig {
    pub pool: PoolFamily,
    pub epsilon: f64,
    pub max_iterations: usize,
    pub growth: Growth,
    pub optimizer: OptimizerConfig,
    pub evaluator: EvaluatorMode,
}

impl Default for AdaptConfig {
    fn default() -> Self {
        AdaptConfig {
            pool: PoolFamily::QubitNoZ,
            epsilon: DEFAULT_EPSILON,
            max_iterations: 50,
            growth: Growth::Plain,
            optimizer: OptimizerConfig::default(),
            evaluator: EvaluatorMode::Exact,
        }
    }
}

impl AdaptConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0) {
            return Err(Error::Contract("epsilon must be positive".into()));
        }
        self.growth.validate()?;
        self.optimizer.validate()
    }
}

/// One committed ADAPT iteration. `energy` is the infinite-shot energy of the
/// current ansatz; sampled runs select and optimize on shot estimates.
#[derive(Clone, Debug, PartialEq)]
pub struct IterationRow {
    pub iteration: usize,
    pub energy: f64,
    pub error: f64,
    pub gradient_norm: f64,
    pub selected: usize,
    pub selected_gradient: f64,
    pub delta_e: f64,
    /// Pool indices of elements removed by the removal hook this iteration.
    pub removals: Vec<usize>,
    pub removal_attempts: usize,
    pub evaluations: usize,
    pub cumulative_optimizations: usize,
    pub cnot_count: usize,
    pub n_parameters: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunRecord {
    pub growth: Growth,
    pub rows: Vec<IterationRow>,
    pub ansatz: Ansatz,
    pub exact_energy: f64,
    pub reference_energy: f64,
    pub final_energy: f64,
    pub final_gradient_norm: f64,
    pub converged: bool,
}

impl RunRecord {
    pub fn final_error(&self) -> f64 {
        (self.final_energy - self.exact_energy).abs()
    }

    pub fn total_optimizations(&self) -> usize {
        self.rows.last().map_or(0, |r| r.cumulative_optimizations)
    }

    /// CSV header. Removal runs append `removals` and `removal_attempts`.
    pub fn csv_header(growth: &Growth) -> Vec<&'static str> {
        let mut h = vec![
            "iteration",
            "energy",
            "error",
            "gradient_norm",
            "selected",
            "selected_gradient",
            "delta_e",
            "evaluations",
            "cumulative_optimizations",
            "cnot_count",
            "n_parameters",
        ];
        if matches!(growth, Growth::Removal { .. }) {
            h.extend(["removals", "removal_attempts"]);
        }
        h
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        let map = |e: csv::Error| Error::Invalid(format!("csv: {e}"));
        wr.write_record(Self::csv_header(&self.growth)).map_err(map)?;
        for r in &self.rows {
            let mut rec = vec![
                r.iteration.to_string(),
                r.energy.to_string(),
                r.error.to_string(),
                r.gradient_norm.to_string(),
                r.selected.to_string(),
                r.selected_gradient.to_string(),
                r.delta_e.to_string(),
                r.evaluations.to_string(),
                r.cumulative_optimizations.to_string(),
                r.cnot_count.to_string(),
                r.n_parameters.to_string(),
            ];
            if matches!(self.growth, Growth::Removal { .. }) {
                let ids: Vec<String> = r.removals.iter().map(|i| i.to_string()).collect();
                rec.push(ids.join(";"));
                rec.push(r.removal_attempts.to_string());
            }
            wr.write_record(&rec).map_err(map)?;
        }
        wr.flush().map_err(|e| Error::Invalid(format!("csv: {e}")))?;
        Ok(())
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let f = std::fs::File::create(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        self.write_csv(std::io::BufWriter::new(f))
    }
}

/// Penalty bookkeeping for removed operators.
#[derive(Clone, Debug, Default)]
pub struct PenaltyTable {
    ratios: BTreeMap<usize, f64>,
    history: Vec<f64>,
    window: usize,
}

impl PenaltyTable {
    pub fn new(window: usize) -> Self {
        PenaltyTable {
            window: window.max(1),
            ..Default::default()
        }
    }

    /// Record the performance ratio of a newly added element.
    pub fn record(&mut self, ratio: f64) {
        self.history.push(ratio);
    }

    pub fn register_removal(&mut self, pool_index: usize, ratio: f64) {
        self.ratios.insert(pool_index, ratio);
    }

    pub fn clear(&mut self, pool_index: usize) {
        self.ratios.remove(&pool_index);
    }

    /// Moving average of the last `window` recorded ratios.
    pub fn standard(&self) -> f64 {
        let k = self.history.len().min(self.window);
        if k == 0 {
            return 0.0;
        }
        self.history[self.history.len() - k..].iter().sum::<f64>() / k as f64
    }

    /// Multiplier in `[0, 1]` applied to the gradient magnitude of an operator.
    pub fn penalty(&self, pool_index: usize) -> f64 {
        match self.ratios.get(&pool_index) {
            None => 1.0,
            Some(&ratio) => {
                let s = self.standard();
                if s > 0.0 {
                    (ratio / s).min(1.0)
                } else {
                    1.0
                }
            }
        }
    }

    pub fn is_penalized(&self, pool_index: usize) -> bool {
        self.ratios.contains_key(&pool_index)
    }
}

/// Result of one removal-hook invocation.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RemovalOutcome {
    pub removed: Vec<usize>,
    pub attempts: usize,
    pub evaluations: usize,
}

fn optimize_ansatz(
    ansatz: &mut Ansatz,
    ev: &mut EnergyEvaluator<'_>,
    opt: &OptimizerConfig,
) -> Result<(f64, usize)> {
    let r = vqe_minimize(ansatz, &ansatz.parameters(), ev, opt)?;
    ansatz.set_parameters(&r.params)?;
    let e = if ev.is_exact() { r.energy } else { ev.ansatz_energy(ansatz)? };
    Ok((e, r.evaluations))
}

/// After element `j` (the last) was added with `delta_j`, try deleting each
/// earlier element `i` with `ΔE_i > r·ΔE_j`, earliest first. A deletion is kept
/// when re-optimizing without it raises the energy by at most `t·|ΔE_i|`;
/// otherwise the ansatz and parameters are restored unchanged.
pub fn removal_hook(
    ansatz: &mut Ansatz,
    energy: &mut f64,
    ev: &mut EnergyEvaluator<'_>,
    opt: &OptimizerConfig,
    r: f64,
    t: f64,
    penalties: &mut PenaltyTable,
) -> Result<RemovalOutcome> {
    let mut out = RemovalOutcome::default();
    let Some(delta_j) = ansatz.elements.last().map(|e| e.delta_e) else {
        return Ok(out);
    };
    if !(delta_j < 0.0) {
        return Ok(out);
    }
    let mut i = 0;
    while i + 1 < ansatz.len() {
        let el = ansatz.elements[i].clone();
        if el.delta_e > r * delta_j {
            out.attempts += 1;
            let mut trial = ansatz.clone();
            trial.elements.remove(i);
            let (e_new, evals) = optimize_ansatz(&mut trial, ev, opt)?;
            out.evaluations += evals;
            if e_new - *energy <= t * el.delta_e.abs() {
                penalties.register_removal(el.pool_index, el.performance_ratio);
                out.removed.push(el.pool_index);
                *ansatz = trial;
                *energy = e_new;
                continue;
            }
        }
        i += 1;
    }
    Ok(out)
}

/// Indices sorted by descending score, ties to the lowest index.
fn ranked(scores: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    idx
}

/// ADAPT-VQE with the pool family named in `config`.
pub fn adapt_run(problem: &MolecularProblem, config: &AdaptConfig) -> Result<RunRecord> {
    let pool = build_pool(config.pool, problem)?;
    adapt_run_with_pool(problem, &pool, config)
}

/// ADAPT-VQE over an explicit pool.
pub fn adapt_run_with_pool(problem: &MolecularProblem, pool: &Pool, config: &AdaptConfig) -> Result<RunRecord> {
    config.validate()?;
    if pool.n_spin_orbitals != problem.n_spin_orbitals {
        return Err(Error::Dimension(format!(
            "pool on {} qubits, problem on {}",
            pool.n_spin_orbitals, problem.n_spin_orbitals
        )));
    }
    let exact_energy = reference_ground_energy(problem)?;
    let mut ev = EnergyEvaluator::new(problem, config.evaluator.clone())?;
    let candidates: Vec<&PauliSum> = pool.operators.iter().map(|o| &o.operator).collect();
    let mut ansatz = Ansatz::new();
    let mut energy = ev.ansatz_energy(&ansatz)?;
    let reference_energy = ev.ansatz_limit_energy(&ansatz)?;
    let mut reported = reference_energy;
    let window = match config.growth {
        Growth::Removal { window, .. } => window,
        _ => DEFAULT_PENALTY_WINDOW,
    };
    let mut penalties = PenaltyTable::new(window);
    let mut rows = Vec::new();
    let mut cumulative = 0usize;
    let mut converged = false;
    let mut final_gradient_norm = f64::NAN;

    for iteration in 1..=config.max_iterations {
        let grads = ev.gradients(&ansatz.operators(), &ansatz.parameters(), &candidates)?;
        let norm = grads.iter().map(|g| g * g).sum::<f64>().sqrt();
        final_gradient_norm = norm;
        if ansatz.is_empty() && grads.iter().all(|g| g.abs() <= ZERO_GRADIENT) {
            return Err(Error::StalledPool);
        }
        if norm < config.epsilon {
            converged = true;
            break;
        }
        let effective: Vec<f64> = grads
            .iter()
            .enumerate()
            .map(|(i, g)| g.abs() * penalties.penalty(i))
            .collect();
        let order = ranked(&effective);
        let n_candidates = match config.growth {
            Growth::Conservative { n } => n.min(order.len()),
            _ => 1,
        };
        let mut best: Option<(f64, usize, Ansatz)> = None;
        let mut evaluations = 0;
        for &sel in &order[..n_candidates] {
            let mut trial = ansatz.clone();
            trial.push(AnsatzElement::new(sel, candidates[sel].clone(), iteration, grads[sel]));
            let (e, evals) = optimize_ansatz(&mut trial, &mut ev, &config.optimizer)?;
            evaluations += evals;
            cumulative += 1;
            let better = match &best {
                None => true,
                Some((be, bi, _)) => e < *be || (e == *be && sel < *bi),
            };
            if better {
                best = Some((e, sel, trial));
            }
        }
        let (e_new, sel, mut trial) = best.expect("at least one candidate");
        let delta = e_new - energy;
        let last = trial.elements.last_mut().expect("just pushed");
        last.record_delta(delta);
        penalties.record(last.performance_ratio);
        penalties.clear(sel);
        ansatz = trial;
        energy = e_new;

        let mut removal = RemovalOutcome::default();
        if let Growth::Removal { r, t, .. } = config.growth {
            removal = removal_hook(&mut ansatz, &mut energy, &mut ev, &config.optimizer, r, t, &mut penalties)?;
            cumulative += removal.attempts;
            evaluations += removal.evaluations;
        }
        reported = ev.ansatz_limit_energy(&ansatz)?;
        rows.push(IterationRow {
            iteration,
            energy: reported,
            error: (reported - exact_energy).abs(),
            gradient_norm: norm,
            selected: sel,
            selected_gradient: grads[sel],
            delta_e: delta,
            removals: removal.removed,
            removal_attempts: removal.attempts,
            evaluations,
            cumulative_optimizations: cumulative,
            cnot_count: ansatz.cnot_count(),
            n_parameters: ansatz.len(),
        });
    }
    Ok(RunRecord {
        growth: config.growth,
        rows,
        ansatz,
        exact_energy,
        reference_energy,
        final_energy: reported,
        final_gradient_norm,
        converged,
    })
}
