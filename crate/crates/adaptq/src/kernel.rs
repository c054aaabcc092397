//! In-place gate kernels on flat amplitude buffers, shared by the statevector
//! and density-matrix paths. A density matrix of `n` qubits is handled as a
//! `2n`-qubit buffer whose low `n` bits index the ket and high `n` bits the bra.

use num_complex::Complex64;

pub(crate) type Mat2 = [[Complex64; 2]; 2];

pub(crate) fn apply_1q(buf: &mut [Complex64], bit: usize, m: &Mat2) {
    let stride = 1usize << bit;
    let len = buf.len();
    let mut base = 0;
    while base < len {
        for i in base..base + stride {
            let a = buf[i];
            let b = buf[i + stride];
            buf[i] = m[0][0] * a + m[0][1] * b;
            buf[i + stride] = m[1][0] * a + m[1][1] * b;
        }
        base += 2 * stride;
    }
}

pub(crate) fn apply_cnot(buf: &mut [Complex64], control: usize, target: usize) {
    let c = 1usize << control;
    let t = 1usize << target;
    for i in 0..buf.len() {
        if i & c != 0 && i & t == 0 {
            buf.swap(i, i | t);
        }
    }
}

pub(crate) fn conj2(m: &Mat2) -> Mat2 {
    [
        [m[0][0].conj(), m[0][1].conj()],
        [m[1][0].conj(), m[1][1].conj()],
    ]
}
