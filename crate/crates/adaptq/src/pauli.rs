//! Pauli strings, weighted Pauli sums, fermionic ladder-operator sums and the
//! Jordan-Wigner map between them.
//!
//! Strings are stored in the two-bit symplectic form: bit `k` of `x` and `z`
//! encodes the letter on qubit `k` (I = 00, X = 10, Z = 01, Y = 11). The text
//! form has one letter per qubit, character `k` addressing qubit `k`.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Coefficients with magnitude below this are removed by every simplification.
pub const DROP_TOLERANCE: f64 = 1e-12;

/// Largest register a [`PauliString`] can address.
pub const MAX_QUBITS: usize = 64;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Letter {
    I,
    X,
    Y,
    Z,
}

impl Letter {
    fn bits(self) -> (bool, bool) {
        match self {
            Letter::I => (false, false),
            Letter::X => (true, false),
            Letter::Y => (true, true),
            Letter::Z => (false, true),
        }
    }

    fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Letter::I,
            (true, false) => Letter::X,
            (true, true) => Letter::Y,
            (false, true) => Letter::Z,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Letter::I => 'I',
            Letter::X => 'X',
            Letter::Y => 'Y',
            Letter::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'I' => Some(Letter::I),
            'X' => Some(Letter::X),
            'Y' => Some(Letter::Y),
            'Z' => Some(Letter::Z),
            _ => None,
        }
    }

    fn rank(self) -> u8 {
        match self {
            Letter::I => 0,
            Letter::X => 1,
            Letter::Y => 2,
            Letter::Z => 3,
        }
    }
}

/// Commutation test flavour used by [`commutes`] and grouping.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CommuteMode {
    Qubitwise,
    General,
}

/// Tensor product of single-qubit Paulis on `n_qubits` qubits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: usize,
    x: u64,
    z: u64,
}

impl PauliString {
    pub fn identity(n_qubits: usize) -> Self {
        assert!(
            (1..=MAX_QUBITS).contains(&n_qubits),
            "register size {n_qubits} outside 1..={MAX_QUBITS}"
        );
        PauliString {
            n: n_qubits,
            x: 0,
            z: 0,
        }
    }

    /// Build from explicit masks. Bits at or above `n_qubits` must be clear.
    pub fn from_masks(n_qubits: usize, x: u64, z: u64) -> Self {
        let p = Self::identity(n_qubits);
        let valid = p.full_mask();
        assert!(x & !valid == 0 && z & !valid == 0, "mask exceeds register");
        PauliString { x, z, ..p }
    }

    /// String with the given letters on the listed qubits and identity elsewhere.
    pub fn from_sparse(n_qubits: usize, letters: &[(usize, Letter)]) -> Result<Self> {
        let mut p = Self::identity(n_qubits);
        for &(q, l) in letters {
            if q >= n_qubits {
                return Err(Error::Dimension(format!(
                    "qubit {q} outside register of {n_qubits}"
                )));
            }
            p.set(q, l);
        }
        Ok(p)
    }

    fn full_mask(&self) -> u64 {
        if self.n == 64 {
            u64::MAX
        } else {
            (1u64 << self.n) - 1
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn x_mask(&self) -> u64 {
        self.x
    }

    pub fn z_mask(&self) -> u64 {
        self.z
    }

    pub fn letter(&self, q: usize) -> Letter {
        assert!(q < self.n);
        Letter::from_bits(self.x >> q & 1 == 1, self.z >> q & 1 == 1)
    }

    pub fn set(&mut self, q: usize, l: Letter) {
        assert!(q < self.n);
        let (x, z) = l.bits();
        let bit = 1u64 << q;
        self.x = if x { self.x | bit } else { self.x & !bit };
        self.z = if z { self.z | bit } else { self.z & !bit };
    }

    pub fn with(mut self, q: usize, l: Letter) -> Self {
        self.set(q, l);
        self
    }

    pub fn weight(&self) -> usize {
        (self.x | self.z).count_ones() as usize
    }

    pub fn support_mask(&self) -> u64 {
        self.x | self.z
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.n).filter(|&q| self.support_mask() >> q & 1 == 1).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    pub fn y_count(&self) -> usize {
        (self.x & self.z).count_ones() as usize
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        (0..self.n).map(move |q| self.letter(q))
    }

    /// Phase and basis image of `P|b⟩`: returns `(phase, b')` with `P|b⟩ = phase·|b'⟩`.
    #[inline]
    pub fn act_on_basis(&self, b: u64) -> (Complex64, u64) {
        (basis_phase(self.x, self.z, b), b ^ self.x)
    }
}

/// Phase picked up by the string `(x, z)` acting on basis state `b`:
/// `i^{#Y} · (-1)^{popcount(b & z)}`.
#[inline]
pub(crate) fn basis_phase(x: u64, z: u64, b: u64) -> Complex64 {
    let ny = (x & z).count_ones();
    let sign = (b & z).count_ones() & 1;
    let e = (ny + 2 * sign) & 3;
    POWERS_OF_I[e as usize]
}

pub(crate) const POWERS_OF_I: [Complex64; 4] = [
    Complex64::new(1.0, 0.0),
    Complex64::new(0.0, 1.0),
    Complex64::new(-1.0, 0.0),
    Complex64::new(0.0, -1.0),
];

impl PartialOrd for PauliString {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Lexicographic on the text form with `I < X < Y < Z`, qubit 0 first.
impl Ord for PauliString {
    fn cmp(&self, other: &Self) -> Ordering {
        self.n.cmp(&other.n).then_with(|| {
            let diff = (self.x ^ other.x) | (self.z ^ other.z);
            if diff == 0 {
                return Ordering::Equal;
            }
            let q = diff.trailing_zeros() as usize;
            self.letter(q).rank().cmp(&other.letter(q).rank())
        })
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in self.letters() {
            write!(f, "{}", l.as_char())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let chars: Vec<char> = s.trim().chars().collect();
        if chars.is_empty() || chars.len() > MAX_QUBITS {
            return Err(Error::Invalid(format!("bad Pauli word length in {s:?}")));
        }
        let mut p = PauliString::identity(chars.len());
        for (q, c) in chars.into_iter().enumerate() {
            let l = Letter::from_char(c)
                .ok_or_else(|| Error::Invalid(format!("unknown Pauli letter {c:?} in {s:?}")))?;
            p.set(q, l);
        }
        Ok(p)
    }
}

fn check_same_size(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::Dimension(format!("{a} qubits vs {b} qubits")));
    }
    Ok(())
}

/// Operator product `a·b = phase·product`.
pub fn multiply_strings(a: &PauliString, b: &PauliString) -> Result<(Complex64, PauliString)> {
    check_same_size(a.n, b.n)?;
    Ok(multiply_unchecked(a, b))
}

#[inline]
fn multiply_unchecked(a: &PauliString, b: &PauliString) -> (Complex64, PauliString) {
    // With P = i^{xz} X^x Z^z per qubit, the product picks up
    // i^{x1 z1 + x2 z2 - x3 z3} (-1)^{z1 x2}.
    let x = a.x ^ b.x;
    let z = a.z ^ b.z;
    let e = (a.x & a.z).count_ones() as i64 + (b.x & b.z).count_ones() as i64
        + 2 * (a.z & b.x).count_ones() as i64
        - (x & z).count_ones() as i64;
    let phase = POWERS_OF_I[e.rem_euclid(4) as usize];
    (phase, PauliString { n: a.n, x, z })
}

/// Commutation test. `General`: the number of anticommuting positions is even.
/// `Qubitwise`: every position commutes.
pub fn commutes(a: &PauliString, b: &PauliString, mode: CommuteMode) -> Result<bool> {
    check_same_size(a.n, b.n)?;
    Ok(commutes_unchecked(a, b, mode))
}

pub(crate) fn commutes_unchecked(a: &PauliString, b: &PauliString, mode: CommuteMode) -> bool {
    let anti = (a.x & b.z) ^ (a.z & b.x);
    match mode {
        CommuteMode::General => anti.count_ones() % 2 == 0,
        CommuteMode::Qubitwise => anti == 0,
    }
}

/// Complex-weighted sum of Pauli strings, kept simplified and in lexicographic order.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliSum {
    n: usize,
    terms: BTreeMap<PauliString, Complex64>,
}

impl PauliSum {
    pub fn zero(n_qubits: usize) -> Self {
        PauliSum {
            n: n_qubits,
            terms: BTreeMap::new(),
        }
    }

    pub fn identity(n_qubits: usize, c: Complex64) -> Self {
        let mut s = Self::zero(n_qubits);
        s.add_term(PauliString::identity(n_qubits), c);
        s
    }

    pub fn from_string(p: PauliString, c: Complex64) -> Self {
        let mut s = Self::zero(p.n);
        s.add_term(p, c);
        s
    }

    pub fn from_terms<I>(n_qubits: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (PauliString, Complex64)>,
    {
        let mut s = Self::zero(n_qubits);
        for (p, c) in terms {
            check_same_size(n_qubits, p.n)?;
            s.add_term(p, c);
        }
        Ok(s)
    }

    /// Parse `"c WORD"` pairs, e.g. `&[(0.5, "XZ"), (-1.0, "IY")]`, real coefficients only.
    pub fn from_real_words(words: &[(f64, &str)]) -> Result<Self> {
        let first = words
            .first()
            .ok_or_else(|| Error::Invalid("empty word list".into()))?;
        let n = first.1.len();
        let mut terms = Vec::with_capacity(words.len());
        for &(c, w) in words {
            terms.push((w.parse::<PauliString>()?, Complex64::new(c, 0.0)));
        }
        Self::from_terms(n, terms)
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&PauliString, &Complex64)> {
        self.terms.iter()
    }

    pub fn strings(&self) -> impl Iterator<Item = &PauliString> {
        self.terms.keys()
    }

    pub fn coefficient(&self, p: &PauliString) -> Complex64 {
        self.terms.get(p).copied().unwrap_or_default()
    }

    pub fn identity_coefficient(&self) -> Complex64 {
        self.coefficient(&PauliString::identity(self.n))
    }

    /// Accumulate `c·p`, dropping the entry if the total falls below the tolerance.
    pub fn add_term(&mut self, p: PauliString, c: Complex64) {
        assert_eq!(p.n, self.n, "string size differs from sum size");
        let entry = self.terms.entry(p).or_default();
        *entry += c;
        if entry.norm() < DROP_TOLERANCE {
            self.terms.remove(&p);
        }
    }

    /// Drop coefficients below [`DROP_TOLERANCE`]. Idempotent.
    pub fn simplify(&mut self) {
        self.terms.retain(|_, c| c.norm() >= DROP_TOLERANCE);
    }

    pub fn scaled(&self, f: Complex64) -> Self {
        let mut out = Self::zero(self.n);
        for (p, c) in &self.terms {
            out.add_term(*p, c * f);
        }
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_same_size(self.n, other.n)?;
        let mut out = self.clone();
        for (p, c) in &other.terms {
            out.add_term(*p, *c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scaled(Complex64::new(-1.0, 0.0)))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        check_same_size(self.n, other.n)?;
        let mut acc: BTreeMap<PauliString, Complex64> = BTreeMap::new();
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let (ph, p) = multiply_unchecked(a, b);
                *acc.entry(p).or_default() += ph * ca * cb;
            }
        }
        let mut out = PauliSum { n: self.n, terms: acc };
        out.simplify();
        Ok(out)
    }

    /// Hermitian adjoint: conjugate every coefficient.
    pub fn dagger(&self) -> Self {
        PauliSum {
            n: self.n,
            terms: self.terms.iter().map(|(p, c)| (*p, c.conj())).collect(),
        }
    }

    /// Every coefficient real (imaginary parts below the drop tolerance).
    pub fn is_hermitian(&self) -> bool {
        self.terms.values().all(|c| c.im.abs() < DROP_TOLERANCE)
    }

    /// Every coefficient purely imaginary.
    pub fn is_antihermitian(&self) -> bool {
        self.terms.values().all(|c| c.re.abs() < DROP_TOLERANCE)
    }

    /// Σ|c_i|, optionally leaving out the identity string.
    pub fn one_norm(&self, include_identity: bool) -> f64 {
        self.terms
            .iter()
            .filter(|(p, _)| include_identity || !p.is_identity())
            .map(|(_, c)| c.norm())
            .sum()
    }

    pub fn max_abs_coefficient(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Divide by the largest coefficient magnitude.
    pub fn normalized(&self) -> Self {
        let m = self.max_abs_coefficient();
        if m == 0.0 {
            return self.clone();
        }
        self.scaled(Complex64::new(1.0 / m, 0.0))
    }

    /// Replace Z letters outside `support` by identity and merge duplicates.
    pub fn strip_z_chain(&self, support: &BTreeSet<usize>) -> Self {
        let keep = support.iter().fold(0u64, |m, &q| m | 1u64 << q);
        let mut out = Self::zero(self.n);
        for (p, c) in &self.terms {
            let z_only = p.z & !p.x;
            let drop = z_only & !keep;
            let q = PauliString {
                n: p.n,
                x: p.x,
                z: p.z & !drop,
            };
            out.add_term(q, *c);
        }
        out
    }

    /// Largest coefficient difference against `other`, over the union of strings.
    pub fn max_difference(&self, other: &Self) -> f64 {
        let keys: BTreeSet<_> = self.terms.keys().chain(other.terms.keys()).collect();
        keys.into_iter()
            .map(|p| (self.coefficient(p) - other.coefficient(p)).norm())
            .fold(0.0, f64::max)
    }
}

impl fmt::Display for PauliSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (p, c) in &self.terms {
            if c.im == 0.0 {
                writeln!(f, "{} {}", c.re, p)?;
            } else {
                writeln!(f, "{} {} {}", c.re, c.im, p)?;
            }
        }
        Ok(())
    }
}

/// `h·a − a·h`.
pub fn commutator(h: &PauliSum, a: &PauliSum) -> Result<PauliSum> {
    check_same_size(h.n, a.n)?;
    let mut acc: BTreeMap<PauliString, Complex64> = BTreeMap::new();
    for (p, cp) in &h.terms {
        for (q, cq) in &a.terms {
            // PQ - QP is 0 when they commute and 2PQ when they anticommute.
            if !commutes_unchecked(p, q, CommuteMode::General) {
                let (ph, r) = multiply_unchecked(p, q);
                *acc.entry(r).or_default() += 2.0 * ph * cp * cq;
            }
        }
    }
    let mut out = PauliSum { n: h.n, terms: acc };
    out.simplify();
    Ok(out)
}

/// Replace Z letters outside `support` by I; coefficients unchanged.
pub fn strip_z_chain(p: &PauliSum, support: &BTreeSet<usize>) -> PauliSum {
    p.strip_z_chain(support)
}

/// Fermionic creation (`dagger`) or annihilation operator on one spin-orbital.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LadderOp {
    pub orbital: usize,
    pub dagger: bool,
}

impl LadderOp {
    pub fn create(orbital: usize) -> Self {
        LadderOp {
            orbital,
            dagger: true,
        }
    }

    pub fn annihilate(orbital: usize) -> Self {
        LadderOp {
            orbital,
            dagger: false,
        }
    }

    pub fn adjoint(self) -> Self {
        LadderOp {
            dagger: !self.dagger,
            ..self
        }
    }
}

impl fmt::Display for LadderOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.dagger {
            write!(f, "{}^", self.orbital)
        } else {
            write!(f, "{}", self.orbital)
        }
    }
}

/// Parse the token form `"3^ 1"` (a₃†a₁). An empty string is the empty product.
pub fn parse_ladder_ops(s: &str) -> Result<Vec<LadderOp>> {
    s.split_whitespace()
        .map(|tok| {
            let (num, dagger) = match tok.strip_suffix('^') {
                Some(n) => (n, true),
                None => (tok, false),
            };
            let orbital = num
                .parse::<usize>()
                .map_err(|_| Error::Invalid(format!("bad ladder token {tok:?}")))?;
            Ok(LadderOp { orbital, dagger })
        })
        .collect()
}

/// Sum of ordered products of ladder operators. Not normal-ordered.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FermionSum {
    pub terms: Vec<(Complex64, Vec<LadderOp>)>,
}

impl FermionSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn single(c: Complex64, ops: Vec<LadderOp>) -> Self {
        FermionSum {
            terms: vec![(c, ops)],
        }
    }

    pub fn push(&mut self, c: Complex64, ops: Vec<LadderOp>) {
        self.terms.push((c, ops));
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn extend(&mut self, other: &FermionSum) {
        self.terms.extend(other.terms.iter().cloned());
    }

    pub fn scaled(&self, f: Complex64) -> Self {
        FermionSum {
            terms: self.terms.iter().map(|(c, o)| (c * f, o.clone())).collect(),
        }
    }

    /// Hermitian conjugate: reverse each product, swap daggers, conjugate coefficients.
    pub fn dagger(&self) -> Self {
        FermionSum {
            terms: self
                .terms
                .iter()
                .map(|(c, ops)| (c.conj(), ops.iter().rev().map(|o| o.adjoint()).collect()))
                .collect(),
        }
    }

    /// `T − T†`.
    pub fn minus_dagger(&self) -> Self {
        let mut out = self.clone();
        out.extend(&self.dagger().scaled(Complex64::new(-1.0, 0.0)));
        out
    }

    pub fn max_orbital(&self) -> Option<usize> {
        self.terms
            .iter()
            .flat_map(|(_, ops)| ops.iter().map(|o| o.orbital))
            .max()
    }

    /// Distinct orbital indices touched by any term.
    pub fn orbitals(&self) -> BTreeSet<usize> {
        self.terms
            .iter()
            .flat_map(|(_, ops)| ops.iter().map(|o| o.orbital))
            .collect()
    }
}

impl fmt::Display for FermionSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (c, ops) in &self.terms {
            write!(f, "{} {}", c.re, c.im)?;
            for o in ops {
                write!(f, " {o}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Image of a single ladder operator: ½·Z_{<i}·(X_i ∓ iY_i), minus for creation.
pub fn jordan_wigner_op(op: LadderOp, n_qubits: usize) -> Result<PauliSum> {
    if op.orbital >= n_qubits {
        return Err(Error::Dimension(format!(
            "orbital {} outside register of {n_qubits}",
            op.orbital
        )));
    }
    let i = op.orbital;
    let chain = (1u64 << i) - 1;
    let px = PauliString::from_masks(n_qubits, 1 << i, chain);
    let py = PauliString::from_masks(n_qubits, 1 << i, chain | 1 << i);
    let sy = if op.dagger { -0.5 } else { 0.5 };
    let mut s = PauliSum::zero(n_qubits);
    s.add_term(px, Complex64::new(0.5, 0.0));
    s.add_term(py, I * sy);
    Ok(s)
}

/// Jordan-Wigner image of a fermionic sum, term by term.
pub fn jordan_wigner(f: &FermionSum, n_qubits: usize) -> Result<PauliSum> {
    let mut out = PauliSum::zero(n_qubits);
    for (c, ops) in &f.terms {
        let mut prod = PauliSum::identity(n_qubits, *c);
        for op in ops {
            prod = prod.mul(&jordan_wigner_op(*op, n_qubits)?)?;
            if prod.is_empty() {
                break;
            }
        }
        out = out.add(&prod)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ps(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn single_qubit_table() {
        let (ph, p) = multiply_strings(&ps("X"), &ps("Y")).unwrap();
        assert_eq!(ph, I);
        assert_eq!(p, ps("Z"));
        let (ph, p) = multiply_strings(&ps("Y"), &ps("X")).unwrap();
        assert_eq!(ph, -I);
        assert_eq!(p, ps("Z"));
        let (ph, p) = multiply_strings(&ps("Z"), &ps("Y")).unwrap();
        assert_eq!((ph, p), (-I, ps("X")));
    }

    #[test]
    fn two_qubit_product() {
        // (X·Z)⊗(Z·X) = (−iY)⊗(iY)
        let (ph, p) = multiply_strings(&ps("XZ"), &ps("ZX")).unwrap();
        assert_eq!(ph, Complex64::new(1.0, 0.0));
        assert_eq!(p, ps("YY"));
    }

    #[test]
    fn size_mismatch() {
        assert!(matches!(
            multiply_strings(&ps("X"), &ps("XX")),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn commute_modes() {
        assert!(commutes(&ps("ZZ"), &ps("XX"), CommuteMode::General).unwrap());
        assert!(!commutes(&ps("ZZ"), &ps("XX"), CommuteMode::Qubitwise).unwrap());
        assert!(commutes(&ps("ZI"), &ps("IZ"), CommuteMode::Qubitwise).unwrap());
        assert!(commutes(&ps("ZI"), &ps("IZ"), CommuteMode::General).unwrap());
    }

    #[test]
    fn lexicographic_order() {
        let mut v = vec![ps("ZI"), ps("IX"), ps("YY"), ps("XZ"), ps("II")];
        v.sort();
        let s: Vec<String> = v.iter().map(|p| p.to_string()).collect();
        assert_eq!(s, ["II", "IX", "XZ", "YY", "ZI"]);
    }

    #[test]
    fn jw_single_creators() {
        let a0 = jordan_wigner(&FermionSum::single(1.0.into(), vec![LadderOp::create(0)]), 1).unwrap();
        assert_eq!(a0.coefficient(&ps("X")), Complex64::new(0.5, 0.0));
        assert_eq!(a0.coefficient(&ps("Y")), Complex64::new(0.0, -0.5));
        let a1 = jordan_wigner(&FermionSum::single(1.0.into(), vec![LadderOp::create(1)]), 2).unwrap();
        assert_eq!(a1.len(), 2);
        assert_eq!(a1.coefficient(&ps("ZX")), Complex64::new(0.5, 0.0));
        assert_eq!(a1.coefficient(&ps("ZY")), Complex64::new(0.0, -0.5));
    }

    #[test]
    fn jw_out_of_range() {
        let f = FermionSum::single(1.0.into(), vec![LadderOp::create(3)]);
        assert!(matches!(jordan_wigner(&f, 2), Err(Error::Dimension(_))));
    }

    #[test]
    fn commutator_examples() {
        let z = PauliSum::from_real_words(&[(1.0, "Z")]).unwrap();
        assert!(commutator(&z, &z).unwrap().is_empty());
        let ix = PauliSum::from_string(ps("X"), I);
        let c = commutator(&z, &ix).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c.coefficient(&ps("Y")), Complex64::new(-2.0, 0.0));
    }

    #[test]
    fn strip_examples() {
        let p = PauliSum::from_string(ps("XZZZY"), I);
        let s = p.strip_z_chain(&[0, 4].into_iter().collect());
        assert_eq!(s.len(), 1);
        assert_eq!(s.coefficient(&ps("XIIIY")), I);

        let q = PauliSum::from_string(ps("IXZZZY"), I * 0.25);
        let s = q.strip_z_chain(&[1, 5].into_iter().collect());
        assert_eq!(s.coefficient(&ps("IXIIIY")), I * 0.25);

        let r = PauliSum::from_string(ps("XZY"), I);
        assert_eq!(r.strip_z_chain(&[0, 1, 2].into_iter().collect()), r);
    }

    #[test]
    fn parse_tokens() {
        let ops = parse_ladder_ops("3^ 1").unwrap();
        assert_eq!(ops, vec![LadderOp::create(3), LadderOp::annihilate(1)]);
        assert!(parse_ladder_ops("3^ x").is_err());
        assert!("IXQ".parse::<PauliString>().is_err());
    }
}
