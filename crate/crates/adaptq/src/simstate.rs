//! Exact statevector and density-matrix simulation.
//!
//! Basis index `b` encodes qubit `k` as bit `k` (qubit 0 is least significant).
//! Kets are written with qubit 0 on the right: `|0011⟩` has qubits 0 and 1 set
//! and is index 3.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::chem::{OrbitalOrdering, Spin};
use crate::error::{Error, Result};
use crate::kernel;
use crate::pauli::{basis_phase, PauliString, PauliSum};

/// Largest register [`exact_ground`] will diagonalize densely.
pub const MAX_DENSE_QUBITS: usize = 14;

/// Largest register with a statevector at all.
pub const MAX_STATE_QUBITS: usize = 26;

const TAYLOR_CUTOFF: f64 = 1e-14;
const TAYLOR_MAX_TERMS: usize = 200;

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// Computational basis state `|index⟩`.
    pub fn basis(n_qubits: usize, index: usize) -> Self {
        assert!(n_qubits <= MAX_STATE_QUBITS && index < 1 << n_qubits);
        let mut amps = vec![Complex64::default(); 1 << n_qubits];
        amps[index] = Complex64::new(1.0, 0.0);
        StateVector { n: n_qubits, amps }
    }

    pub fn zero_state(n_qubits: usize) -> Self {
        Self::basis(n_qubits, 0)
    }

    /// Wrap raw amplitudes, rescaling to unit norm.
    pub fn from_amplitudes(n_qubits: usize, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != 1 << n_qubits {
            return Err(Error::Dimension(format!(
                "{} amplitudes for {n_qubits} qubits",
                amps.len()
            )));
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::Invalid("state has zero or non-finite norm".into()));
        }
        Ok(StateVector {
            n: n_qubits,
            amps: amps.into_iter().map(|a| a / norm).collect(),
        })
    }

    pub(crate) fn from_raw(n_qubits: usize, amps: Vec<Complex64>) -> Self {
        debug_assert_eq!(amps.len(), 1 << n_qubits);
        StateVector { n: n_qubits, amps }
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amps[index]
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &StateVector) -> f64 {
        self.inner(other).norm_sqr()
    }
}

fn check_n(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::Dimension(format!("{a} qubits vs {b} qubits")));
    }
    Ok(())
}

/// `P|s⟩`.
pub fn apply_string(p: &PauliString, s: &StateVector) -> Result<StateVector> {
    check_n(p.n_qubits(), s.n)?;
    let mut out = vec![Complex64::default(); s.amps.len()];
    let (x, z) = (p.x_mask(), p.z_mask());
    for (b, a) in s.amps.iter().enumerate() {
        out[b ^ x as usize] = basis_phase(x, z, b as u64) * a;
    }
    Ok(StateVector::from_raw(s.n, out))
}

/// `A·v` for a Pauli sum on a raw buffer (no normalization).
pub(crate) fn apply_sum_raw(a: &PauliSum, v: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::default(); v.len()];
    for (p, c) in a.iter() {
        let (x, z) = (p.x_mask(), p.z_mask());
        for (b, amp) in v.iter().enumerate() {
            if amp.re == 0.0 && amp.im == 0.0 {
                continue;
            }
            out[b ^ x as usize] += c * basis_phase(x, z, b as u64) * amp;
        }
    }
    out
}

/// `A|s⟩` as a raw (generally unnormalized) vector.
pub fn apply_sum(a: &PauliSum, s: &StateVector) -> Result<Vec<Complex64>> {
    check_n(a.n_qubits(), s.n)?;
    Ok(apply_sum_raw(a, &s.amps))
}

/// `exp(theta·a)|s⟩` for antihermitian `a`, by the Taylor recurrence
/// `v_{m+1} = (theta·a)·v_m/(m+1)`.
///
/// The step is split into equal substeps with `|theta|·Σ|c| ≤ 1` each so that
/// the alternating partial sums never grow large.
pub fn apply_exponential(a: &PauliSum, theta: f64, s: &StateVector) -> Result<StateVector> {
    check_n(a.n_qubits(), s.n)?;
    if !a.is_antihermitian() {
        return Err(Error::Contract(
            "exponential generator must be antihermitian".into(),
        ));
    }
    if !theta.is_finite() {
        return Err(Error::Contract("non-finite exponential angle".into()));
    }
    let scale = theta.abs() * a.one_norm(true);
    if theta == 0.0 || scale == 0.0 {
        return Ok(s.clone());
    }
    let steps = scale.ceil().max(1.0) as usize;
    let t = theta / steps as f64;
    let mut state = s.amps.clone();
    for _ in 0..steps {
        state = taylor_step(a, t, &state)?;
    }
    Ok(StateVector::from_raw(s.n, state))
}

fn taylor_step(a: &PauliSum, t: f64, v0: &[Complex64]) -> Result<Vec<Complex64>> {
    let mut acc = v0.to_vec();
    let mut v = v0.to_vec();
    for m in 0..TAYLOR_MAX_TERMS {
        let mut next = apply_sum_raw(a, &v);
        let f = t / (m as f64 + 1.0);
        let mut norm2 = 0.0;
        for (n, x) in next.iter_mut().enumerate() {
            *x *= f;
            acc[n] += *x;
            norm2 += x.norm_sqr();
        }
        if norm2.sqrt() < TAYLOR_CUTOFF {
            return Ok(acc);
        }
        v = next;
    }
    Err(Error::NoConvergence(format!(
        "Taylor series exceeded {TAYLOR_MAX_TERMS} terms"
    )))
}

/// `⟨s|h|s⟩` for hermitian `h`.
pub fn expectation(h: &PauliSum, s: &StateVector) -> Result<f64> {
    check_n(h.n_qubits(), s.n)?;
    if !h.is_hermitian() {
        return Err(Error::Contract("observable must be hermitian".into()));
    }
    let mut total = Complex64::default();
    for (p, c) in h.iter() {
        total += c * string_expectation(p, s);
    }
    debug_assert!(total.im.abs() < 1e-9);
    Ok(total.re)
}

/// `⟨s|P|s⟩`, complex in general and real for a normalized state.
pub fn string_expectation(p: &PauliString, s: &StateVector) -> Complex64 {
    let (x, z) = (p.x_mask(), p.z_mask());
    let mut acc = Complex64::default();
    for (b, a) in s.amps.iter().enumerate() {
        let m = b ^ x as usize;
        acc += s.amps[m].conj() * basis_phase(x, z, b as u64) * a;
    }
    acc
}

/// Dense matrix of a Pauli sum, column `b` holding the image of `|b⟩`.
pub fn dense_matrix(h: &PauliSum) -> Result<DMatrix<Complex64>> {
    let n = h.n_qubits();
    if n > MAX_DENSE_QUBITS {
        return Err(Error::Resource(format!(
            "dense matrix of {n} qubits exceeds limit of {MAX_DENSE_QUBITS}"
        )));
    }
    let dim = 1usize << n;
    let mut m = DMatrix::<Complex64>::zeros(dim, dim);
    for (p, c) in h.iter() {
        let (x, z) = (p.x_mask(), p.z_mask());
        for b in 0..dim {
            m[(b ^ x as usize, b)] += c * basis_phase(x, z, b as u64);
        }
    }
    Ok(m)
}

/// Lowest eigenvalue and a unit eigenvector of the dense matrix of `h`.
pub fn exact_ground(h: &PauliSum) -> Result<(f64, StateVector)> {
    if !h.is_hermitian() {
        return Err(Error::Contract("Hamiltonian must be hermitian".into()));
    }
    let m = dense_matrix(h)?;
    let eig = m.symmetric_eigen();
    let (k, &e) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("nonempty spectrum");
    let v: Vec<Complex64> = eig.eigenvectors.column(k).iter().copied().collect();
    Ok((e, StateVector::from_amplitudes(h.n_qubits(), v)?))
}

/// `(Π_k exp(−i·H_k·t/reps))^reps |s⟩`, factors applied in list order.
pub fn trotter_apply(
    terms: &[PauliSum],
    t: f64,
    reps: usize,
    s: &StateVector,
) -> Result<StateVector> {
    if reps == 0 {
        return Err(Error::Contract("Trotter repetitions must be positive".into()));
    }
    let mut gens = Vec::with_capacity(terms.len());
    for h in terms {
        if !h.is_hermitian() {
            return Err(Error::Contract("Trotter terms must be hermitian".into()));
        }
        gens.push(h.scaled(Complex64::new(0.0, -1.0)));
    }
    let dt = t / reps as f64;
    let mut state = s.clone();
    for _ in 0..reps {
        for g in &gens {
            state = apply_exponential(g, dt, &state)?;
        }
    }
    Ok(state)
}

/// Density matrix stored column-major: entry `(i, j)` lives at `i + j·2^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl DensityMatrix {
    pub fn from_pure(s: &StateVector) -> Self {
        let dim = s.amps.len();
        let mut data = vec![Complex64::default(); dim * dim];
        for j in 0..dim {
            let cj = s.amps[j].conj();
            for i in 0..dim {
                data[i + j * dim] = s.amps[i] * cj;
            }
        }
        DensityMatrix { n: s.n, data }
    }

    pub fn maximally_mixed(n_qubits: usize) -> Self {
        let dim = 1usize << n_qubits;
        let mut data = vec![Complex64::default(); dim * dim];
        for i in 0..dim {
            data[i + i * dim] = Complex64::new(1.0 / dim as f64, 0.0);
        }
        DensityMatrix { n: n_qubits, data }
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i + j * self.dim()]
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim()).map(|i| self.get(i, i)).sum()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.get(i, i).re).collect()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        let d = self.dim();
        (0..d).all(|i| (0..d).all(|j| (self.get(i, j) - self.get(j, i).conj()).norm() <= tol))
    }

    /// Apply a single-qubit unitary `U ρ U†`.
    pub(crate) fn apply_unitary_1q(&mut self, q: usize, u: &kernel::Mat2) {
        let n = self.n;
        kernel::apply_1q(&mut self.data, q, u);
        kernel::apply_1q(&mut self.data, q + n, &kernel::conj2(u));
    }

    pub(crate) fn apply_cnot(&mut self, c: usize, t: usize) {
        let n = self.n;
        kernel::apply_cnot(&mut self.data, c, t);
        kernel::apply_cnot(&mut self.data, c + n, t + n);
    }

    /// `Σ_k K_k ρ K_k†` for single-qubit Kraus operators.
    pub(crate) fn apply_kraus_1q(&mut self, q: usize, kraus: &[kernel::Mat2]) {
        let n = self.n;
        let mut out = vec![Complex64::default(); self.data.len()];
        for k in kraus {
            let mut tmp = self.data.clone();
            kernel::apply_1q(&mut tmp, q, k);
            kernel::apply_1q(&mut tmp, q + n, &kernel::conj2(k));
            for (o, t) in out.iter_mut().zip(tmp) {
                *o += t;
            }
        }
        self.data = out;
    }

    /// `(1−p)ρ + p·(Tr_{a,b} ρ) ⊗ I/4`, written as the uniform Pauli twirl.
    pub(crate) fn depolarize_2q(&mut self, a: usize, b: usize, p: f64) {
        if p == 0.0 {
            return;
        }
        let n = self.n;
        let paulis = pauli_mats();
        let mut twirl = vec![Complex64::default(); self.data.len()];
        for pa in &paulis {
            for pb in &paulis {
                let mut tmp = self.data.clone();
                kernel::apply_1q(&mut tmp, a, pa);
                kernel::apply_1q(&mut tmp, a + n, &kernel::conj2(pa));
                kernel::apply_1q(&mut tmp, b, pb);
                kernel::apply_1q(&mut tmp, b + n, &kernel::conj2(pb));
                for (o, t) in twirl.iter_mut().zip(tmp) {
                    *o += t;
                }
            }
        }
        for (d, t) in self.data.iter_mut().zip(twirl) {
            *d = *d * (1.0 - p) + t * (p / 16.0);
        }
    }

    /// `Tr(ρ H)` for hermitian `H`.
    pub fn expectation(&self, h: &PauliSum) -> Result<f64> {
        check_n(h.n_qubits(), self.n)?;
        if !h.is_hermitian() {
            return Err(Error::Contract("observable must be hermitian".into()));
        }
        let mut total = Complex64::default();
        for (p, c) in h.iter() {
            total += c * self.string_expectation(p);
        }
        Ok(total.re)
    }

    /// `Tr(ρ P) = Σ_l phase(l)·ρ[l, l⊕x]`.
    pub fn string_expectation(&self, p: &PauliString) -> Complex64 {
        let (x, z) = (p.x_mask(), p.z_mask());
        (0..self.dim())
            .map(|l| basis_phase(x, z, l as u64) * self.get(l, l ^ x as usize))
            .sum()
    }
}

fn pauli_mats() -> [kernel::Mat2; 4] {
    let o = Complex64::new(0.0, 0.0);
    let l = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    [
        [[l, o], [o, l]],
        [[o, l], [l, o]],
        [[o, -i], [i, o]],
        [[l, o], [o, -l]],
    ]
}

/// `tr(ρ²)`.
pub fn purity(rho: &DensityMatrix) -> f64 {
    rho.data.iter().map(|c| c.norm_sqr()).sum()
}

/// `⟨ψ|ρ|ψ⟩`.
pub fn fidelity_pure(rho: &DensityMatrix, psi: &StateVector) -> Result<f64> {
    check_n(rho.n, psi.n)?;
    let d = rho.dim();
    let mut acc = Complex64::default();
    for j in 0..d {
        let mut col = Complex64::default();
        for i in 0..d {
            col += psi.amps[i].conj() * rho.get(i, j);
        }
        acc += col * psi.amps[j];
    }
    Ok(acc.re)
}

/// Slater-determinant breakdown of a state relative to a target sector.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Composition {
    pub correct_count: usize,
    pub correct_probability: f64,
    pub altered_number_count: usize,
    pub altered_number_probability: f64,
    pub altered_sz_count: usize,
    pub altered_sz_probability: f64,
}

/// Amplitudes below this probability are ignored by [`determinant_composition`].
pub const COMPOSITION_THRESHOLD: f64 = 1e-8;

/// Classify basis states by particle number and S_z against the sector of the
/// Hartree-Fock reference (⌈n_e/2⌉ α and ⌊n_e/2⌋ β electrons).
pub fn determinant_composition(
    s: &StateVector,
    ordering: OrbitalOrdering,
    n_electrons: usize,
) -> Composition {
    let n = s.n;
    let target_2sz = (n_electrons % 2) as i64;
    let mut out = Composition::default();
    for (b, a) in s.amps.iter().enumerate() {
        let p = a.norm_sqr();
        if p <= COMPOSITION_THRESHOLD {
            continue;
        }
        let mut na = 0i64;
        let mut nb = 0i64;
        for q in 0..n {
            if b >> q & 1 == 1 {
                match ordering.spin(q, n) {
                    Spin::Alpha => na += 1,
                    Spin::Beta => nb += 1,
                }
            }
        }
        if (na + nb) as usize != n_electrons {
            out.altered_number_count += 1;
            out.altered_number_probability += p;
        } else if na - nb != target_2sz {
            out.altered_sz_count += 1;
            out.altered_sz_probability += p;
        } else {
            out.correct_count += 1;
            out.correct_probability += p;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ps(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn string_actions() {
        let s = apply_string(&ps("X"), &StateVector::basis(1, 0)).unwrap();
        assert_eq!(s.amplitude(1), Complex64::new(1.0, 0.0));
        let s = apply_string(&ps("Y"), &StateVector::basis(1, 0)).unwrap();
        assert_eq!(s.amplitude(1), Complex64::new(0.0, 1.0));
    }

    #[test]
    fn identity_expectation() {
        let h = PauliSum::from_real_words(&[(0.7, "II")]).unwrap();
        let e = expectation(&h, &StateVector::basis(2, 2)).unwrap();
        assert!((e - 0.7).abs() < 1e-15);
    }

    #[test]
    fn ground_of_z() {
        let h = PauliSum::from_real_words(&[(1.0, "Z")]).unwrap();
        let (e, v) = exact_ground(&h).unwrap();
        assert!((e + 1.0).abs() < 1e-12);
        assert!((v.amplitude(1).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dense_limit() {
        let h = PauliSum::identity(15, Complex64::new(1.0, 0.0));
        assert!(matches!(exact_ground(&h), Err(Error::Resource(_))));
    }

    #[test]
    fn non_antihermitian_rejected() {
        let a = PauliSum::from_real_words(&[(1.0, "X")]).unwrap();
        assert!(matches!(
            apply_exponential(&a, 0.1, &StateVector::basis(1, 0)),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn composition_of_hf() {
        let c = determinant_composition(&StateVector::basis(4, 3), OrbitalOrdering::Alternating, 2);
        assert_eq!(c.correct_count, 1);
        assert_eq!(c.altered_number_probability, 0.0);
    }
}
