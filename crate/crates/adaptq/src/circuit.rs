//! Gate-level circuits: Pauli-exponential compilation with CNOT ladders, SU(2)
//! and two-qubit state-preparation synthesis, noiseless and noisy execution,
//! and shot sampling with SPAM errors.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;
use std::fmt;

use nalgebra::Matrix2;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_distr::{Binomial, Distribution};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::kernel::{self, Mat2};
use crate::pauli::{commutes_unchecked, CommuteMode, Letter, PauliString, PauliSum};
use crate::simstate::{DensityMatrix, StateVector};

/// Largest register for density-matrix execution.
pub const MAX_DENSITY_QUBITS: usize = 8;

/// Default single-qubit gate duration in seconds.
pub const GATE_TIME_1Q: f64 = 35e-9;
/// Default CNOT duration in seconds.
pub const GATE_TIME_2Q: f64 = 550e-9;
/// Default ratio `p_meas0_prep1 / p_meas1_prep0`.
pub const SPAM_RATIO: f64 = 5.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Gate {
    X(usize),
    H(usize),
    RX(usize, f64),
    RY(usize, f64),
    RZ(usize, f64),
    SDG(usize),
    CNOT(usize, usize),
}

impl Gate {
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::X(q) | Gate::H(q) | Gate::RX(q, _) | Gate::RY(q, _) | Gate::RZ(q, _) | Gate::SDG(q) => {
                vec![q]
            }
            Gate::CNOT(c, t) => vec![c, t],
        }
    }

    /// 2×2 matrix of a single-qubit gate; `None` for CNOT.
    pub(crate) fn matrix(&self) -> Option<Mat2> {
        let c = |re: f64, im: f64| Complex64::new(re, im);
        let m = match *self {
            Gate::X(_) => [[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]],
            Gate::H(_) => {
                let h = std::f64::consts::FRAC_1_SQRT_2;
                [[c(h, 0.0), c(h, 0.0)], [c(h, 0.0), c(-h, 0.0)]]
            }
            Gate::RX(_, a) => {
                let (s, co) = (a / 2.0).sin_cos();
                [[c(co, 0.0), c(0.0, -s)], [c(0.0, -s), c(co, 0.0)]]
            }
            Gate::RY(_, a) => {
                let (s, co) = (a / 2.0).sin_cos();
                [[c(co, 0.0), c(-s, 0.0)], [c(s, 0.0), c(co, 0.0)]]
            }
            Gate::RZ(_, a) => [
                [Complex64::from_polar(1.0, -a / 2.0), c(0.0, 0.0)],
                [c(0.0, 0.0), Complex64::from_polar(1.0, a / 2.0)],
            ],
            Gate::SDG(_) => [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.0, -1.0)]],
            Gate::CNOT(..) => return None,
        };
        Some(m)
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Gate::X(q) => write!(f, "X {q}"),
            Gate::H(q) => write!(f, "H {q}"),
            Gate::RX(q, a) => write!(f, "RX {q} {a:.7}"),
            Gate::RY(q, a) => write!(f, "RY {q} {a:.7}"),
            Gate::RZ(q, a) => write!(f, "RZ {q} {a:.7}"),
            Gate::SDG(q) => write!(f, "SDG {q}"),
            Gate::CNOT(c, t) => write!(f, "CNOT {c} {t}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    n: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Circuit {
            n: n_qubits,
            gates: Vec::new(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn push(&mut self, g: Gate) -> Result<()> {
        for q in g.qubits() {
            if q >= self.n {
                return Err(Error::Dimension(format!(
                    "gate {g} outside register of {}",
                    self.n
                )));
            }
        }
        if let Gate::CNOT(c, t) = g {
            if c == t {
                return Err(Error::Contract("CNOT control equals target".into()));
            }
        }
        self.gates.push(g);
        Ok(())
    }

    pub fn extend(&mut self, other: &Circuit) -> Result<()> {
        if other.n != self.n {
            return Err(Error::Dimension(format!("{} vs {} qubits", self.n, other.n)));
        }
        self.gates.extend_from_slice(&other.gates);
        Ok(())
    }

    pub fn cnot_count(&self) -> usize {
        self.gates.iter().filter(|g| matches!(g, Gate::CNOT(..))).count()
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for g in &self.gates {
            writeln!(f, "{g}")?;
        }
        Ok(())
    }
}

/// Circuit for `exp(−i·theta·P)`: basis rotations, a CNOT ladder computing the
/// support parity into the highest support qubit, `RZ(2·theta)`, and the
/// mirror image.
pub fn compile_pauli_exponential(p: &PauliString, theta: f64) -> Result<Circuit> {
    if p.is_identity() {
        return Err(Error::Contract("identity string has no support".into()));
    }
    let support = p.support();
    let mut c = Circuit::new(p.n_qubits());
    for &q in &support {
        match p.letter(q) {
            Letter::X => c.push(Gate::H(q))?,
            Letter::Y => c.push(Gate::RX(q, FRAC_PI_2))?,
            _ => {}
        }
    }
    for w in support.windows(2) {
        c.push(Gate::CNOT(w[0], w[1]))?;
    }
    c.push(Gate::RZ(*support.last().unwrap(), 2.0 * theta))?;
    for w in support.windows(2).rev() {
        c.push(Gate::CNOT(w[0], w[1]))?;
    }
    for &q in &support {
        match p.letter(q) {
            Letter::X => c.push(Gate::H(q))?,
            Letter::Y => c.push(Gate::RX(q, -FRAC_PI_2))?,
            _ => {}
        }
    }
    Ok(c)
}

/// First-order product of string exponentials for `exp(theta·a)`, strings in
/// lexicographic order. For `a = Σ i·b_k·P_k` each factor is
/// `exp(i·theta·b_k·P_k) = exp(−i·(−theta·b_k)·P_k)`.
pub fn compile_exponential_sum(a: &PauliSum, theta: f64) -> Result<Circuit> {
    if !a.is_antihermitian() {
        return Err(Error::Contract("generator must be antihermitian".into()));
    }
    let mut c = Circuit::new(a.n_qubits());
    for (p, coef) in a.iter() {
        if p.is_identity() {
            continue;
        }
        c.extend(&compile_pauli_exponential(p, -theta * coef.im)?)?;
    }
    Ok(c)
}

/// Angles `(t1, t2, t3)` with `u = e^{iφ}·RZ(t1)·RY(t2)·RZ(t3)`.
pub fn decompose_su2(u: &Matrix2<Complex64>) -> Result<(f64, f64, f64)> {
    let prod = u.adjoint() * u;
    if (prod - Matrix2::identity()).iter().any(|e| e.norm() > 1e-9) {
        return Err(Error::Contract("matrix is not unitary".into()));
    }
    let (u00, u01, u10, u11) = (u[(0, 0)], u[(0, 1)], u[(1, 0)], u[(1, 1)]);
    let t2 = 2.0 * u00.norm().clamp(0.0, 1.0).acos();
    const EPS: f64 = 1e-12;
    let (t1, t3) = if u10.norm() < EPS {
        // Diagonal: only t1 + t3 is defined.
        (u11.arg() - u00.arg(), 0.0)
    } else if u00.norm() < EPS {
        // Anti-diagonal: only t1 − t3 is defined.
        (u10.arg() - (-u01).arg(), 0.0)
    } else {
        (u10.arg() - u00.arg(), (-u01).arg() - u00.arg())
    };
    Ok((t1, t2, t3))
}

/// `RZ(t1)·RY(t2)·RZ(t3)` as a matrix.
pub fn su2_from_angles(t1: f64, t2: f64, t3: f64) -> Matrix2<Complex64> {
    let to = |m: Mat2| Matrix2::new(m[0][0], m[0][1], m[1][0], m[1][1]);
    to(Gate::RZ(0, t1).matrix().unwrap())
        * to(Gate::RY(0, t2).matrix().unwrap())
        * to(Gate::RZ(0, t3).matrix().unwrap())
}

/// Qubit carrying the row index of the coordinate matrix.
pub const QUBIT_A: usize = 1;
/// Qubit carrying the column index of the coordinate matrix.
pub const QUBIT_B: usize = 0;

/// Amplitudes of the six-parameter two-qubit state, in basis-index order.
/// Basis index `2i + j` holds the coordinate of `|i⟩_A|j⟩_B`.
pub fn two_qubit_coordinates(params: &[f64; 6]) -> [Complex64; 4] {
    let [t0, t1, t2, w0, w1, w2] = *params;
    let (s0, c0) = (t0 / 2.0).sin_cos();
    let (s1, c1) = (t1 / 2.0).sin_cos();
    let (s2, c2) = (t2 / 2.0).sin_cos();
    let e = |w: f64| Complex64::from_polar(1.0, w);
    [
        Complex64::new(c0 * c1, 0.0),
        c0 * s1 * e(w1),
        s0 * e(w0) * c2,
        s0 * e(w0) * s2 * e(w2),
    ]
}

/// Two-qubit circuit preparing the state of [`two_qubit_coordinates`] from
/// `|00⟩` via the Schmidt (singular value) decomposition.
pub fn prepare_two_qubit(params: &[f64; 6]) -> Result<Circuit> {
    let tau = 2.0 * std::f64::consts::PI;
    for (k, &v) in params.iter().enumerate() {
        let hi = if k < 3 { std::f64::consts::PI } else { tau };
        if !(0.0..=hi).contains(&v) {
            return Err(Error::Contract(format!(
                "parameter {k} = {v} outside [0, {hi}]"
            )));
        }
    }
    let a = two_qubit_coordinates(params);
    let m = Matrix2::new(a[0], a[1], a[2], a[3]);
    let svd = m.svd(true, true);
    let mut u = svd.u.unwrap();
    let mut v = svd.v_t.unwrap();
    let mut l = svd.singular_values;
    if l[0] < l[1] {
        l.swap_rows(0, 1);
        u.swap_columns(0, 1);
        v.swap_rows(0, 1);
    }
    let lambda0 = (l[0] / (l[0] * l[0] + l[1] * l[1]).sqrt()).clamp(0.0, 1.0);
    let (ua1, ua2, ua3) = decompose_su2(&u)?;
    let (ub1, ub2, ub3) = decompose_su2(&v.transpose())?;

    let mut c = Circuit::new(2);
    c.push(Gate::RY(QUBIT_A, 2.0 * lambda0.acos()))?;
    c.push(Gate::CNOT(QUBIT_A, QUBIT_B))?;
    // On λ0|00⟩ + λ1|11⟩, RZ(a)⊗RZ(b) acts as RZ(a + b) on either qubit.
    c.push(Gate::RZ(QUBIT_A, ua3 + ub3))?;
    c.push(Gate::RY(QUBIT_A, ua2))?;
    c.push(Gate::RZ(QUBIT_A, ua1))?;
    c.push(Gate::RY(QUBIT_B, ub2))?;
    c.push(Gate::RZ(QUBIT_B, ub1))?;
    Ok(c)
}

/// Apply the gates of `c` to `s` in order.
pub fn run_statevector(c: &Circuit, s: &StateVector) -> Result<StateVector> {
    if c.n != s.n_qubits() {
        return Err(Error::Dimension(format!(
            "circuit on {} qubits, state on {}",
            c.n,
            s.n_qubits()
        )));
    }
    let mut out = s.clone();
    for g in &c.gates {
        match g {
            Gate::CNOT(ctl, tgt) => kernel::apply_cnot(out.amplitudes_mut(), *ctl, *tgt),
            _ => kernel::apply_1q(out.amplitudes_mut(), g.qubits()[0], &g.matrix().unwrap()),
        }
    }
    Ok(out)
}

/// Noiseless execution from `|0…0⟩`.
pub fn execute_statevector(c: &Circuit) -> StateVector {
    run_statevector(c, &StateVector::zero_state(c.n)).expect("sizes agree")
}

/// Thermal-relaxation, depolarizing and readout noise parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseSpec {
    t1: f64,
    t2: f64,
    gate_time_1q: f64,
    gate_time_2q: f64,
    cnot_depolarizing_error: f64,
    p_meas0_prep1: f64,
    p_meas1_prep0: f64,
}

impl Default for NoiseSpec {
    fn default() -> Self {
        Self::ideal()
    }
}

impl NoiseSpec {
    /// No noise at all.
    pub fn ideal() -> Self {
        NoiseSpec {
            t1: f64::INFINITY,
            t2: f64::INFINITY,
            gate_time_1q: GATE_TIME_1Q,
            gate_time_2q: GATE_TIME_2Q,
            cnot_depolarizing_error: 0.0,
            p_meas0_prep1: 0.0,
            p_meas1_prep0: 0.0,
        }
    }

    /// Validated constructor with default gate times. `t2 ≤ 2·t1` is enforced.
    pub fn new(
        t1: f64,
        t2: f64,
        cnot_depolarizing_error: f64,
        p_meas0_prep1: f64,
        p_meas1_prep0: f64,
    ) -> Result<Self> {
        let s = NoiseSpec {
            t1,
            t2,
            cnot_depolarizing_error,
            p_meas0_prep1,
            p_meas1_prep0,
            ..Self::ideal()
        };
        s.validate()?;
        Ok(s)
    }

    pub fn with_gate_times(self, one_qubit: f64, two_qubit: f64) -> Result<Self> {
        let s = NoiseSpec {
            gate_time_1q: one_qubit,
            gate_time_2q: two_qubit,
            ..self
        };
        s.validate()?;
        Ok(s)
    }

    pub fn with_thermal(self, t1: f64, t2: f64) -> Result<Self> {
        let s = NoiseSpec { t1, t2, ..self };
        s.validate()?;
        Ok(s)
    }

    pub fn with_cnot_error(self, e: f64) -> Result<Self> {
        let s = NoiseSpec {
            cnot_depolarizing_error: e,
            ..self
        };
        s.validate()?;
        Ok(s)
    }

    /// Readout flips with `p_meas1_prep0 = p_meas0_prep1 / SPAM_RATIO`.
    pub fn with_spam(self, p_meas0_prep1: f64) -> Result<Self> {
        self.with_spam_pair(p_meas0_prep1, p_meas0_prep1 / SPAM_RATIO)
    }

    pub fn with_spam_pair(self, p_meas0_prep1: f64, p_meas1_prep0: f64) -> Result<Self> {
        let s = NoiseSpec {
            p_meas0_prep1,
            p_meas1_prep0,
            ..self
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let probs = [
            self.cnot_depolarizing_error,
            self.p_meas0_prep1,
            self.p_meas1_prep0,
        ];
        if probs.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::Contract("noise probabilities must lie in [0, 1]".into()));
        }
        if !(self.t1 > 0.0 && self.t2 > 0.0) {
            return Err(Error::Contract("T1 and T2 must be positive".into()));
        }
        if self.t2 > 2.0 * self.t1 {
            return Err(Error::Contract("T2 must not exceed 2·T1".into()));
        }
        if !(self.gate_time_1q >= 0.0 && self.gate_time_2q >= 0.0) {
            return Err(Error::Contract("gate times must be nonnegative".into()));
        }
        Ok(())
    }

    pub fn t1(&self) -> f64 {
        self.t1
    }
    pub fn t2(&self) -> f64 {
        self.t2
    }
    pub fn gate_time_1q(&self) -> f64 {
        self.gate_time_1q
    }
    pub fn gate_time_2q(&self) -> f64 {
        self.gate_time_2q
    }
    pub fn cnot_depolarizing_error(&self) -> f64 {
        self.cnot_depolarizing_error
    }
    pub fn p_meas0_prep1(&self) -> f64 {
        self.p_meas0_prep1
    }
    pub fn p_meas1_prep0(&self) -> f64 {
        self.p_meas1_prep0
    }

    /// True when gates act without error (readout may still be noisy).
    pub fn gates_are_ideal(&self) -> bool {
        self.t1.is_infinite() && self.t2.is_infinite() && self.cnot_depolarizing_error == 0.0
    }

    /// Depolarizing parameter of the CNOT channel, `e·(d+1)/d` with `d = 4`,
    /// capped at 1 (full depolarization).
    pub fn depolarizing_parameter(&self) -> f64 {
        (self.cnot_depolarizing_error * 5.0 / 4.0).min(1.0)
    }

    /// Amplitude-damping and pure-dephasing strengths `(γ, λ)` for a gate of
    /// duration `t`. Coherences decay as `e^{−t/T2}` overall.
    pub fn relaxation(&self, t: f64) -> (f64, f64) {
        let gamma = 1.0 - (-t / self.t1).exp();
        let rate = 1.0 / self.t2 - 0.5 / self.t1;
        let lambda = 1.0 - (-2.0 * t * rate.max(0.0)).exp();
        (gamma, lambda)
    }
}

fn thermal_kraus(gamma: f64, lambda: f64) -> (Vec<Mat2>, Vec<Mat2>) {
    let z = Complex64::default();
    let r = |x: f64| Complex64::new(x, 0.0);
    let damping = vec![
        [[r(1.0), z], [z, r((1.0 - gamma).sqrt())]],
        [[z, r(gamma.sqrt())], [z, z]],
    ];
    let dephasing = vec![
        [[r(1.0), z], [z, r((1.0 - lambda).sqrt())]],
        [[z, z], [z, r(lambda.sqrt())]],
    ];
    (damping, dephasing)
}

/// Apply `c` to a density matrix with per-gate noise.
pub fn run_density(c: &Circuit, rho: &DensityMatrix, noise: &NoiseSpec) -> Result<DensityMatrix> {
    if c.n != rho.n_qubits() {
        return Err(Error::Dimension(format!(
            "circuit on {} qubits, state on {}",
            c.n,
            rho.n_qubits()
        )));
    }
    if c.n > MAX_DENSITY_QUBITS {
        return Err(Error::Resource(format!(
            "density simulation of {} qubits exceeds limit of {MAX_DENSITY_QUBITS}",
            c.n
        )));
    }
    let mut out = rho.clone();
    let thermal = !(noise.t1.is_infinite() && noise.t2.is_infinite());
    let k1 = thermal_kraus_for(noise, noise.gate_time_1q);
    let k2 = thermal_kraus_for(noise, noise.gate_time_2q);
    for g in &c.gates {
        match *g {
            Gate::CNOT(ctl, tgt) => {
                out.apply_cnot(ctl, tgt);
                out.depolarize_2q(ctl, tgt, noise.depolarizing_parameter());
            }
            _ => out.apply_unitary_1q(g.qubits()[0], &g.matrix().unwrap()),
        }
        if thermal {
            let (damping, dephasing) = if matches!(g, Gate::CNOT(..)) { &k2 } else { &k1 };
            for q in g.qubits() {
                out.apply_kraus_1q(q, damping);
                out.apply_kraus_1q(q, dephasing);
            }
        }
    }
    Ok(out)
}

fn thermal_kraus_for(noise: &NoiseSpec, t: f64) -> (Vec<Mat2>, Vec<Mat2>) {
    let (g, l) = noise.relaxation(t);
    thermal_kraus(g, l)
}

/// Noisy execution from `|0…0⟩⟨0…0|`.
pub fn execute_density(c: &Circuit, noise: &NoiseSpec) -> Result<DensityMatrix> {
    if c.n > MAX_DENSITY_QUBITS {
        return Err(Error::Resource(format!(
            "density simulation of {} qubits exceeds limit of {MAX_DENSITY_QUBITS}",
            c.n
        )));
    }
    run_density(c, &DensityMatrix::from_pure(&StateVector::zero_state(c.n)), noise)
}

/// Sampled expectation of a ±1 observable.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeasurementEstimate {
    pub value: f64,
    pub shots_used: u64,
    pub standard_error: f64,
}

/// State to be measured.
#[derive(Clone, Copy, Debug)]
pub enum Measured<'a> {
    Pure(&'a StateVector),
    Mixed(&'a DensityMatrix),
}

impl Measured<'_> {
    fn n_qubits(&self) -> usize {
        match self {
            Measured::Pure(s) => s.n_qubits(),
            Measured::Mixed(r) => r.n_qubits(),
        }
    }
}

/// Measure a qubitwise-commuting group: rotate once into the shared basis,
/// draw `shots` bitstrings, apply readout flips, and average each string's
/// support parity.
pub fn sample_pauli(
    strings: &[PauliString],
    state: Measured<'_>,
    shots: u64,
    noise: &NoiseSpec,
    rng_seed: u64,
) -> Result<BTreeMap<PauliString, MeasurementEstimate>> {
    if shots == 0 {
        return Err(Error::Contract("at least one shot is required".into()));
    }
    let n = state.n_qubits();
    let (probs, measured_mask) = measurement_distribution(strings, state)?;
    let mut probs = probs;
    for q in (0..n).filter(|q| measured_mask >> q & 1 == 1) {
        apply_readout_flip(&mut probs, q, noise);
    }
    let counts = multinomial(&probs, shots, &mut ChaCha8Rng::seed_from_u64(rng_seed))?;
    let masks: Vec<u64> = strings.iter().map(|p| p.support_mask()).collect();
    let mut sums = vec![0i64; strings.len()];
    for (b, &c) in counts.iter().enumerate().filter(|(_, c)| **c > 0) {
        for (s, m) in sums.iter_mut().zip(&masks) {
            let sign = if (b as u64 & m).count_ones() % 2 == 0 { 1 } else { -1 };
            *s += sign * c as i64;
        }
    }
    Ok(strings
        .iter()
        .zip(sums)
        .map(|(p, s)| {
            let value = s as f64 / shots as f64;
            let se = ((1.0 - value * value).max(0.0) / shots as f64).sqrt();
            (
                *p,
                MeasurementEstimate {
                    value,
                    shots_used: shots,
                    standard_error: se,
                },
            )
        })
        .collect())
}

/// Fold independent readout flips on qubit `q` into an outcome distribution.
fn apply_readout_flip(probs: &mut [f64], q: usize, noise: &NoiseSpec) {
    let (p01, p10) = (noise.p_meas1_prep0, noise.p_meas0_prep1);
    if p01 == 0.0 && p10 == 0.0 {
        return;
    }
    let bit = 1usize << q;
    for b in 0..probs.len() {
        if b & bit == 0 {
            let (p0, p1) = (probs[b], probs[b | bit]);
            probs[b] = (1.0 - p01) * p0 + p10 * p1;
            probs[b | bit] = p01 * p0 + (1.0 - p10) * p1;
        }
    }
}

/// Multinomial outcome counts by sequential conditional binomials.
fn multinomial(probs: &[f64], shots: u64, rng: &mut ChaCha8Rng) -> Result<Vec<u64>> {
    let total: f64 = probs.iter().map(|p| p.max(0.0)).sum();
    if !(total > 0.0) || !total.is_finite() {
        return Err(Error::Invalid("outcome distribution has no mass".into()));
    }
    let mut counts = vec![0u64; probs.len()];
    let mut left = shots;
    let mut mass = total;
    for (k, p) in probs.iter().enumerate() {
        if left == 0 {
            break;
        }
        let p = p.max(0.0);
        if k + 1 == probs.len() || p >= mass {
            counts[k] = left;
            break;
        }
        let frac = (p / mass).clamp(0.0, 1.0);
        let c = if frac == 0.0 {
            0
        } else {
            Binomial::new(left, frac)
                .map_err(|e| Error::Invalid(format!("binomial: {e}")))?
                .sample(rng)
        };
        counts[k] = c;
        left -= c;
        mass -= p;
    }
    Ok(counts)
}

/// Check that `strings` fit the register and commute qubitwise.
fn check_group(strings: &[PauliString], n: usize) -> Result<()> {
    for (k, a) in strings.iter().enumerate() {
        if a.n_qubits() != n {
            return Err(Error::Dimension(format!(
                "string {a} on {} qubits, state on {n}",
                a.n_qubits()
            )));
        }
        for b in &strings[k + 1..] {
            if !commutes_unchecked(a, b, CommuteMode::Qubitwise) {
                return Err(Error::Contract(format!(
                    "{a} and {b} are not qubitwise commuting"
                )));
            }
        }
    }
    Ok(())
}

/// Outcome distribution after rotating every measured qubit into the group's
/// shared basis, and the mask of measured qubits.
fn measurement_distribution(strings: &[PauliString], state: Measured<'_>) -> Result<(Vec<f64>, u64)> {
    let n = state.n_qubits();
    check_group(strings, n)?;
    let mut basis = Circuit::new(n);
    let mut measured_mask = 0u64;
    for q in 0..n {
        let letter = strings
            .iter()
            .map(|p| p.letter(q))
            .find(|l| *l != Letter::I);
        match letter {
            Some(Letter::X) => basis.push(Gate::H(q))?,
            Some(Letter::Y) => basis.push(Gate::RX(q, FRAC_PI_2))?,
            _ => {}
        }
        if letter.is_some() {
            measured_mask |= 1 << q;
        }
    }
    let probs = match state {
        Measured::Pure(s) => run_statevector(&basis, s)?.probabilities(),
        Measured::Mixed(r) => run_density(&basis, r, &NoiseSpec::ideal())?
            .diagonal()
            .into_iter()
            .map(|p| p.max(0.0))
            .collect(),
    };
    Ok((probs, measured_mask))
}

/// Infinite-shot limit of [`sample_pauli`]: exact outcome probabilities with
/// the readout flips averaged analytically.
pub fn expected_pauli(
    strings: &[PauliString],
    state: Measured<'_>,
    noise: &NoiseSpec,
) -> Result<BTreeMap<PauliString, f64>> {
    let (probs, _) = measurement_distribution(strings, state)?;
    // Per qubit, E[(−1)^read | true bit b] = a + d·(−1)^b.
    let a = noise.p_meas0_prep1 - noise.p_meas1_prep0;
    let d = 1.0 - noise.p_meas0_prep1 - noise.p_meas1_prep0;
    Ok(strings
        .iter()
        .map(|p| {
            let support = p.support();
            let v: f64 = probs
                .iter()
                .enumerate()
                .filter(|(_, pr)| **pr > 0.0)
                .map(|(b, pr)| {
                    let f: f64 = support
                        .iter()
                        .map(|&q| if b >> q & 1 == 0 { a + d } else { a - d })
                        .product();
                    pr * f
                })
                .sum();
            (*p, v)
        })
        .collect())
}
