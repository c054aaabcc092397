//! Molecular problems: the `.ham` file format, orbital orderings, the
//! Hartree-Fock reference, shot budgets and commuting-group partitioning.
//!
//! # File format
//!
//! UTF-8 text, one item per line, `#` starts a comment.
//!
//! ```text
//! name=h2_0.74
//! n_qubits=4
//! n_electrons=2
//! ordering=alternating        # or block
//! geometry=0.74               # optional free-form tag
//! -0.0970662681676 IIII       # <real> [<imag>] <pauli-word>
//! 0.1714128264477 ZIII
//! [fermionic]
//! 0.7151043390810812 0        # <real> <imag> <ladder tokens>, "3^ 1" = a3† a1
//! -1.2533097866459773 0 0^ 0
//! ```
//!
//! Header lines may appear anywhere before the first term. Pauli words carry
//! one letter per qubit, character `k` addressing qubit `k`. Inside the
//! `[fermionic]` section the imaginary part is mandatory so that coefficients
//! and orbital indices cannot be confused. When only the fermionic section is
//! present the qubit Hamiltonian is its Jordan-Wigner image.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pauli::{
    commutes_unchecked, jordan_wigner, parse_ladder_ops, CommuteMode, FermionSum, PauliString,
    PauliSum,
};
use crate::simstate::StateVector;

/// 1 kcal/mol in Hartree.
pub const CHEMICAL_ACCURACY: f64 = 1.59e-3;

const H2_TEXT: &str = include_str!("../data/h2_0.74.ham");

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Spin {
    Alpha,
    Beta,
}

/// How spin-orbitals map onto qubit indices.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum OrbitalOrdering {
    /// α, β, α, β, ...
    #[default]
    Alternating,
    /// All α first, then all β.
    Block,
}

impl OrbitalOrdering {
    pub fn spin(self, index: usize, n_spin_orbitals: usize) -> Spin {
        let alpha = match self {
            OrbitalOrdering::Alternating => index % 2 == 0,
            OrbitalOrdering::Block => index < n_spin_orbitals / 2,
        };
        if alpha {
            Spin::Alpha
        } else {
            Spin::Beta
        }
    }

    /// Qubit of spatial orbital `p` with the given spin.
    pub fn index(self, spatial: usize, spin: Spin, n_spin_orbitals: usize) -> usize {
        match (self, spin) {
            (OrbitalOrdering::Alternating, Spin::Alpha) => 2 * spatial,
            (OrbitalOrdering::Alternating, Spin::Beta) => 2 * spatial + 1,
            (OrbitalOrdering::Block, Spin::Alpha) => spatial,
            (OrbitalOrdering::Block, Spin::Beta) => spatial + n_spin_orbitals / 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            OrbitalOrdering::Alternating => "alternating",
            OrbitalOrdering::Block => "block",
        }
    }
}

impl std::str::FromStr for OrbitalOrdering {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "alternating" => Ok(OrbitalOrdering::Alternating),
            "block" => Ok(OrbitalOrdering::Block),
            other => Err(Error::Invalid(format!("unknown ordering {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MolecularProblem {
    pub name: String,
    pub n_spin_orbitals: usize,
    pub n_electrons: usize,
    pub ordering: OrbitalOrdering,
    pub hamiltonian: PauliSum,
    pub fermionic_hamiltonian: Option<FermionSum>,
    pub geometry_tag: Option<String>,
}

impl MolecularProblem {
    /// Check the structural invariants.
    pub fn validate(&self) -> Result<()> {
        if self.hamiltonian.n_qubits() != self.n_spin_orbitals {
            return Err(Error::Invalid(format!(
                "Hamiltonian acts on {} qubits, problem declares {}",
                self.hamiltonian.n_qubits(),
                self.n_spin_orbitals
            )));
        }
        if self.n_electrons > self.n_spin_orbitals {
            return Err(Error::Invalid(format!(
                "{} electrons exceed {} spin-orbitals",
                self.n_electrons, self.n_spin_orbitals
            )));
        }
        if !self.hamiltonian.is_hermitian() {
            return Err(Error::Invalid("Hamiltonian is not hermitian".into()));
        }
        Ok(())
    }

    /// Serialize in the `.ham` format.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "name={}", self.name);
        let _ = writeln!(s, "n_qubits={}", self.n_spin_orbitals);
        let _ = writeln!(s, "n_electrons={}", self.n_electrons);
        let _ = writeln!(s, "ordering={}", self.ordering.name());
        if let Some(g) = &self.geometry_tag {
            let _ = writeln!(s, "geometry={g}");
        }
        for (p, c) in self.hamiltonian.iter() {
            if c.im == 0.0 {
                let _ = writeln!(s, "{:e} {}", c.re, p);
            } else {
                let _ = writeln!(s, "{:e} {:e} {}", c.re, c.im, p);
            }
        }
        if let Some(f) = &self.fermionic_hamiltonian {
            s.push_str("[fermionic]\n");
            for (c, ops) in &f.terms {
                let _ = write!(s, "{:e} {:e}", c.re, c.im);
                for o in ops {
                    let _ = write!(s, " {o}");
                }
                s.push('\n');
            }
        }
        s
    }
}

/// The bundled H₂ (STO-3G, 0.74 Å) problem.
pub fn h2_problem() -> MolecularProblem {
    parse_problem(H2_TEXT).expect("bundled H2 data parses")
}

pub fn load_problem(path: impl AsRef<Path>) -> Result<MolecularProblem> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_problem(&text)
}

pub fn save_problem(p: &MolecularProblem, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, p.to_text()).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn parse_f64(tok: &str, line: usize) -> Result<f64> {
    tok.parse::<f64>()
        .map_err(|_| parse_err(line, format!("bad number {tok:?}")))
}

pub fn parse_problem(text: &str) -> Result<MolecularProblem> {
    let mut name = String::from("unnamed");
    let mut n_qubits: Option<usize> = None;
    let mut n_electrons: Option<usize> = None;
    let mut ordering = OrbitalOrdering::Alternating;
    let mut geometry = None;
    let mut qubit_terms: Vec<(usize, PauliString, Complex64)> = Vec::new();
    let mut fermion = FermionSum::new();
    let mut in_fermionic = false;

    for (k, raw) in text.lines().enumerate() {
        let line_no = k + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if line == "[fermionic]" {
            in_fermionic = true;
            continue;
        }
        if line.starts_with('[') {
            return Err(parse_err(line_no, format!("unknown section {line}")));
        }
        if let Some((key, value)) = line.split_once('=') {
            let value = value.trim();
            match key.trim() {
                "name" => name = value.to_string(),
                "n_qubits" => {
                    n_qubits = Some(
                        value
                            .parse()
                            .map_err(|_| parse_err(line_no, "bad n_qubits"))?,
                    )
                }
                "n_electrons" => {
                    n_electrons = Some(
                        value
                            .parse()
                            .map_err(|_| parse_err(line_no, "bad n_electrons"))?,
                    )
                }
                "ordering" => {
                    ordering = value
                        .parse()
                        .map_err(|e: Error| parse_err(line_no, e.to_string()))?
                }
                "geometry" => geometry = Some(value.to_string()),
                other => return Err(parse_err(line_no, format!("unknown key {other:?}"))),
            }
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        if in_fermionic {
            if toks.len() < 2 {
                return Err(parse_err(line_no, "fermionic term needs <real> <imag>"));
            }
            let c = Complex64::new(parse_f64(toks[0], line_no)?, parse_f64(toks[1], line_no)?);
            let ops = parse_ladder_ops(&toks[2..].join(" "))
                .map_err(|e| parse_err(line_no, e.to_string()))?;
            fermion.push(c, ops);
        } else {
            let (c, word) = match toks.as_slice() {
                [re, w] => (Complex64::new(parse_f64(re, line_no)?, 0.0), *w),
                [re, im, w] => (
                    Complex64::new(parse_f64(re, line_no)?, parse_f64(im, line_no)?),
                    *w,
                ),
                _ => return Err(parse_err(line_no, "expected <real> [<imag>] <pauli-word>")),
            };
            let p: PauliString = word
                .parse()
                .map_err(|e: Error| parse_err(line_no, e.to_string()))?;
            qubit_terms.push((line_no, p, c));
        }
    }

    let n = n_qubits.ok_or_else(|| parse_err(0, "missing n_qubits header"))?;
    let n_electrons = n_electrons.ok_or_else(|| parse_err(0, "missing n_electrons header"))?;
    if n == 0 || n > crate::pauli::MAX_QUBITS {
        return Err(Error::Invalid(format!("unsupported register size {n}")));
    }

    let fermionic_hamiltonian = if fermion.is_empty() {
        None
    } else {
        if let Some(m) = fermion.max_orbital() {
            if m >= n {
                return Err(Error::Invalid(format!(
                    "orbital {m} outside {n} spin-orbitals"
                )));
            }
        }
        Some(fermion)
    };

    let hamiltonian = if qubit_terms.is_empty() {
        match &fermionic_hamiltonian {
            Some(f) => jordan_wigner(f, n)?,
            None => return Err(Error::Invalid("no Hamiltonian terms".into())),
        }
    } else {
        let mut h = PauliSum::zero(n);
        for (line_no, p, c) in qubit_terms {
            if p.n_qubits() != n {
                return Err(parse_err(
                    line_no,
                    format!("word has {} letters, expected {n}", p.n_qubits()),
                ));
            }
            h.add_term(p, c);
        }
        h
    };

    let problem = MolecularProblem {
        name,
        n_spin_orbitals: n,
        n_electrons,
        ordering,
        hamiltonian,
        fermionic_hamiltonian,
        geometry_tag: geometry,
    };
    problem.validate()?;
    Ok(problem)
}

/// Occupied spin-orbitals of the Hartree-Fock determinant.
pub fn hf_occupation(n_spin_orbitals: usize, n_electrons: usize, ordering: OrbitalOrdering) -> Vec<usize> {
    match ordering {
        OrbitalOrdering::Alternating => (0..n_electrons).collect(),
        OrbitalOrdering::Block => {
            let n_alpha = n_electrons.div_ceil(2);
            let n_beta = n_electrons / 2;
            let half = n_spin_orbitals / 2;
            (0..n_alpha).chain((0..n_beta).map(|k| k + half)).collect()
        }
    }
}

/// Basis index with the Hartree-Fock orbitals set.
pub fn hf_index(n_spin_orbitals: usize, n_electrons: usize, ordering: OrbitalOrdering) -> usize {
    hf_occupation(n_spin_orbitals, n_electrons, ordering)
        .into_iter()
        .fold(0, |b, q| b | 1 << q)
}

pub fn hartree_fock_state(p: &MolecularProblem) -> StateVector {
    StateVector::basis(
        p.n_spin_orbitals,
        hf_index(p.n_spin_orbitals, p.n_electrons, p.ordering),
    )
}

/// `⌈(Σ|h_i|)²/ε²⌉` over the non-identity strings.
pub fn estimate_shots(h: &PauliSum, epsilon: f64) -> Result<u64> {
    if !(epsilon > 0.0) {
        return Err(Error::Contract("precision must be positive".into()));
    }
    let s = h.one_norm(false);
    let m = (s * s) / (epsilon * epsilon);
    // Absorb last-bit rounding so exact ratios do not round up to the next integer.
    Ok((m * (1.0 - 1e-12)).ceil() as u64)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ShotPlan {
    pub total_shots: u64,
    pub per_string: BTreeMap<PauliString, u64>,
}

/// Split `total` shots over the non-identity strings in proportion to `|h_i|`,
/// rounding by largest remainder (ties to the lexicographically first string).
pub fn make_shot_plan(h: &PauliSum, total: u64) -> ShotPlan {
    let weights: Vec<(PauliString, f64)> = h
        .iter()
        .filter(|(p, _)| !p.is_identity())
        .map(|(p, c)| (*p, c.norm()))
        .collect();
    let norm: f64 = weights.iter().map(|w| w.1).sum();
    let mut per_string = BTreeMap::new();
    if weights.is_empty() || norm == 0.0 {
        return ShotPlan {
            total_shots: 0,
            per_string,
        };
    }
    let mut assigned = 0u64;
    let mut remainders = Vec::with_capacity(weights.len());
    for (k, (p, w)) in weights.iter().enumerate() {
        let exact = total as f64 * w / norm;
        let base = exact.floor() as u64;
        assigned += base;
        per_string.insert(*p, base);
        remainders.push((exact - base as f64, k));
    }
    remainders.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    for &(_, k) in remainders.iter().take(total.saturating_sub(assigned) as usize) {
        *per_string.get_mut(&weights[k].0).unwrap() += 1;
    }
    ShotPlan {
        total_shots: per_string.values().sum(),
        per_string,
    }
}

/// Greedy first-fit partition of the non-identity strings into mutually
/// commuting groups, visiting strings by descending `|h_i|` (ties
/// lexicographic).
pub fn group_commuting(h: &PauliSum, mode: CommuteMode) -> Vec<Vec<PauliString>> {
    let mut order: Vec<(PauliString, f64)> = h
        .iter()
        .filter(|(p, _)| !p.is_identity())
        .map(|(p, c)| (*p, c.norm()))
        .collect();
    order.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    group_strings(order.into_iter().map(|(p, _)| p), mode)
}

/// First-fit grouping in the given visiting order.
pub fn group_strings(
    strings: impl IntoIterator<Item = PauliString>,
    mode: CommuteMode,
) -> Vec<Vec<PauliString>> {
    let mut groups: Vec<Vec<PauliString>> = Vec::new();
    for p in strings {
        match groups
            .iter_mut()
            .find(|g| g.iter().all(|q| commutes_unchecked(&p, q, mode)))
        {
            Some(g) => g.push(p),
            None => groups.push(vec![p]),
        }
    }
    groups
}

/// Number operator `Σ_k (I − Z_k)/2`.
pub fn number_operator(n_qubits: usize) -> PauliSum {
    let mut s = PauliSum::identity(n_qubits, Complex64::new(n_qubits as f64 / 2.0, 0.0));
    for k in 0..n_qubits {
        s.add_term(
            PauliString::identity(n_qubits).with(k, crate::pauli::Letter::Z),
            Complex64::new(-0.5, 0.0),
        );
    }
    s
}

/// Distinct non-identity strings across a collection of sums.
pub fn distinct_strings<'a>(sums: impl IntoIterator<Item = &'a PauliSum>) -> BTreeSet<PauliString> {
    sums.into_iter()
        .flat_map(|s| s.strings().copied())
        .filter(|p| !p.is_identity())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_h2() {
        let p = h2_problem();
        assert_eq!(p.n_spin_orbitals, 4);
        assert_eq!(p.n_electrons, 2);
        assert_eq!(p.hamiltonian.len(), 15);
        assert_eq!(p.hamiltonian.identity_coefficient().re, -0.09706626816762856);
        assert!(p.fermionic_hamiltonian.is_some());
    }

    #[test]
    fn bad_letter_names_line() {
        let text = "n_qubits=2\nn_electrons=1\n0.5 ZI\n0.25 QI\n";
        match parse_problem(text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn non_hermitian_rejected() {
        let text = "n_qubits=1\nn_electrons=0\n0.5 0.1 Z\n";
        assert!(matches!(parse_problem(text), Err(Error::Invalid(_))));
    }

    #[test]
    fn word_length_checked() {
        let text = "n_qubits=2\nn_electrons=0\n0.5 ZZZ\n";
        assert!(matches!(parse_problem(text), Err(Error::Parse { line: 3, .. })));
    }

    #[test]
    fn hf_indices() {
        assert_eq!(hf_index(4, 2, OrbitalOrdering::Alternating), 3);
        assert_eq!(hf_index(4, 2, OrbitalOrdering::Block), 5);
        assert_eq!(hf_index(4, 0, OrbitalOrdering::Block), 0);
        assert_eq!(hf_index(8, 3, OrbitalOrdering::Block), 0b0001_0011);
    }

    #[test]
    fn single_term_shots() {
        let h = PauliSum::from_real_words(&[(0.3, "II"), (0.2, "XZ")]).unwrap();
        assert_eq!(estimate_shots(&h, 0.02).unwrap(), 100);
        assert!(estimate_shots(&h, 0.0).is_err());
    }

    #[test]
    fn plan_sums_to_total() {
        let h = h2_problem().hamiltonian;
        let plan = make_shot_plan(&h, 10_001);
        assert_eq!(plan.total_shots, 10_001);
        assert_eq!(plan.per_string.len(), 14);
    }
}
