//! Dense reference implementations shared by the integration tests. Nothing
//! here calls into the library's linear algebra.

#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;

use adaptq::pauli::{FermionSum, LadderOp, PauliString, PauliSum};

pub type M = DMatrix<Complex64>;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn ps(s: &str) -> PauliString {
    s.parse().unwrap()
}

pub fn letter_matrix(ch: char) -> M {
    let o = c(0.0, 0.0);
    let l = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    match ch {
        'I' => M::from_row_slice(2, 2, &[l, o, o, l]),
        'X' => M::from_row_slice(2, 2, &[o, l, l, o]),
        'Y' => M::from_row_slice(2, 2, &[o, -i, i, o]),
        'Z' => M::from_row_slice(2, 2, &[l, o, o, -l]),
        _ => panic!("bad letter {ch}"),
    }
}

pub fn kron(a: &M, b: &M) -> M {
    a.kronecker(b)
}

/// Matrix of a word where character k acts on qubit k and qubit 0 is the
/// least significant bit of the basis index.
pub fn word_matrix(word: &str) -> M {
    let mut m = M::from_element(1, 1, c(1.0, 0.0));
    for ch in word.chars().rev() {
        m = kron(&m, &letter_matrix(ch));
    }
    m
}

pub fn sum_matrix(s: &PauliSum) -> M {
    let d = 1usize << s.n_qubits();
    let mut m = M::zeros(d, d);
    for (p, coef) in s.iter() {
        m += word_matrix(&p.to_string()) * *coef;
    }
    m
}

/// Creation or annihilation operator built directly on occupation-number
/// states with the standard sign (−1)^(occupied orbitals below j).
pub fn ladder_matrix(op: LadderOp, n: usize) -> M {
    let d = 1usize << n;
    let mut m = M::zeros(d, d);
    let j = op.orbital;
    for b in 0..d {
        let occupied = b >> j & 1 == 1;
        if occupied == op.dagger {
            continue;
        }
        let sign = if (b & ((1 << j) - 1)).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
        m[(b ^ (1 << j), b)] = c(sign, 0.0);
    }
    m
}

pub fn fermion_matrix(f: &FermionSum, n: usize) -> M {
    let d = 1usize << n;
    let mut m = M::zeros(d, d);
    for (coef, ops) in &f.terms {
        let mut t = M::identity(d, d);
        for op in ops {
            t *= ladder_matrix(*op, n);
        }
        m += t * *coef;
    }
    m
}

pub fn max_abs(m: &M) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// exp(θ·A) for antihermitian A via the eigendecomposition of the hermitian iA.
pub fn expm_antihermitian(a: &M, theta: f64) -> M {
    let h = a * c(0.0, 1.0);
    let eig = h.clone().symmetric_eigen();
    let d = a.nrows();
    let mut diag = M::zeros(d, d);
    for k in 0..d {
        // θA = −iθ·(iA)
        diag[(k, k)] = c(0.0, -theta * eig.eigenvalues[k]).exp();
    }
    &eig.eigenvectors * diag * eig.eigenvectors.adjoint()
}

/// Lowest eigenvalue of a hermitian matrix.
pub fn ground(m: &M) -> f64 {
    m.clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min)
}

pub fn basis(n: usize, index: usize) -> Vec<Complex64> {
    let mut v = vec![c(0.0, 0.0); 1 << n];
    v[index] = c(1.0, 0.0);
    v
}

pub fn mat_vec(m: &M, v: &[Complex64]) -> Vec<Complex64> {
    let x = nalgebra::DVector::from_column_slice(v);
    (m * x).iter().cloned().collect()
}

pub fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Central finite difference.
pub fn central_difference(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}
