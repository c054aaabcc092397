//! Operator pools. Every operator is an antihermitian [`PauliSum`] scaled so
//! that its largest coefficient magnitude is 1.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::chem::{hf_occupation, MolecularProblem, OrbitalOrdering, Spin};
use crate::error::{Error, Result};
use crate::pauli::{jordan_wigner, FermionSum, LadderOp, Letter, PauliString, PauliSum};

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ExcitationKind {
    Single,
    Double,
    Other,
}

/// Four Pauli letters placed on sorted qubits `q < p < s < r` of a double.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Format(pub [Letter; 4]);

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let letters: Vec<Letter> = s.trim().chars().filter_map(Letter::from_char).collect();
        if letters.len() != 4 || s.trim().chars().count() != 4 {
            return Err(Error::Invalid(format!("format {s:?} must have four letters")));
        }
        if letters.iter().any(|l| !matches!(l, Letter::X | Letter::Y)) {
            return Err(Error::Contract(format!("format {s:?} must use only X and Y")));
        }
        let f = Format([letters[0], letters[1], letters[2], letters[3]]);
        if f.0.iter().filter(|l| **l == Letter::Y).count() % 2 == 0 {
            return Err(Error::Contract(format!(
                "format {s:?} needs an odd number of Y letters"
            )));
        }
        Ok(f)
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in self.0 {
            write!(f, "{}", l.as_char())?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PoolFamily {
    Sgsd,
    Scgsd,
    Gsd,
    Qubit,
    QubitNoZ,
    One(Format),
    Two(Format),
    Four(Format),
    Eight,
    MinG,
    Uccsd,
}

impl fmt::Display for PoolFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PoolFamily::Sgsd => write!(f, "sgsd"),
            PoolFamily::Scgsd => write!(f, "scgsd"),
            PoolFamily::Gsd => write!(f, "gsd"),
            PoolFamily::Qubit => write!(f, "qubit"),
            PoolFamily::QubitNoZ => write!(f, "qubit_no_z"),
            PoolFamily::One(x) => write!(f, "one:{x}"),
            PoolFamily::Two(x) => write!(f, "two:{x}"),
            PoolFamily::Four(x) => write!(f, "four:{x}"),
            PoolFamily::Eight => write!(f, "eight"),
            PoolFamily::MinG => write!(f, "min_g"),
            PoolFamily::Uccsd => write!(f, "uccsd"),
        }
    }
}

impl FromStr for PoolFamily {
    type Err = Error;

    /// Accepts the names printed by `Display`; format-carrying families take
    /// `one:XXYX` style suffixes.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        let (head, tail) = match s.split_once(':') {
            Some((h, t)) => (h.to_string(), Some(t.to_ascii_uppercase())),
            None => (s.clone(), None),
        };
        let fmt = || -> Result<Format> {
            tail.as_deref()
                .ok_or_else(|| Error::Invalid(format!("family {head} needs a format, e.g. {head}:XXYX")))?
                .parse()
        };
        Ok(match head.as_str() {
            "sgsd" => PoolFamily::Sgsd,
            "scgsd" => PoolFamily::Scgsd,
            "gsd" => PoolFamily::Gsd,
            "qubit" => PoolFamily::Qubit,
            "qubit_no_z" | "no_z" | "noz" => PoolFamily::QubitNoZ,
            "one" => PoolFamily::One(fmt()?),
            "two" => PoolFamily::Two(fmt()?),
            "four" => PoolFamily::Four(fmt()?),
            "eight" => PoolFamily::Eight,
            "min_g" | "ming" => PoolFamily::MinG,
            "uccsd" => PoolFamily::Uccsd,
            other => return Err(Error::Invalid(format!("unknown pool family {other:?}"))),
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PoolOperator {
    pub operator: PauliSum,
    pub source_orbitals: Vec<usize>,
    pub kind: ExcitationKind,
    pub family: PoolFamily,
    /// Fermionic excitation `T` with `operator ∝ JW(T − T†)`, for JW-derived
    /// families before any Z-chain stripping.
    pub excitation: Option<FermionSum>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Pool {
    pub family: PoolFamily,
    pub n_spin_orbitals: usize,
    pub operators: Vec<PoolOperator>,
}

impl Pool {
    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    pub fn get(&self, i: usize) -> &PauliSum {
        &self.operators[i].operator
    }

    /// Histogram of string counts per operator: `(strings, operators)`.
    pub fn string_histogram(&self) -> Vec<(usize, usize)> {
        let mut h = std::collections::BTreeMap::new();
        for op in &self.operators {
            *h.entry(op.operator.len()).or_insert(0usize) += 1;
        }
        h.into_iter().collect()
    }
}

/// Builds a pool while discarding zero and duplicate operators.
struct PoolBuilder {
    family: PoolFamily,
    n: usize,
    ops: Vec<PoolOperator>,
    seen: HashSet<Vec<(PauliString, i64, i64)>>,
    dedup: bool,
}

impl PoolBuilder {
    fn new(family: PoolFamily, n: usize) -> Self {
        PoolBuilder {
            family,
            n,
            ops: Vec::new(),
            seen: HashSet::new(),
            dedup: true,
        }
    }

    fn no_dedup(mut self) -> Self {
        self.dedup = false;
        self
    }

    fn push(
        &mut self,
        operator: PauliSum,
        source_orbitals: Vec<usize>,
        kind: ExcitationKind,
        excitation: Option<FermionSum>,
    ) -> bool {
        if operator.is_empty() {
            return false;
        }
        let operator = operator.normalized();
        debug_assert!(operator.is_antihermitian());
        if !self.seen.insert(dedup_key(&operator)) && self.dedup {
            return false;
        }
        self.ops.push(PoolOperator {
            operator,
            source_orbitals,
            kind,
            family: self.family,
            excitation,
        });
        true
    }

    fn finish(self) -> Pool {
        Pool {
            family: self.family,
            n_spin_orbitals: self.n,
            operators: self.ops,
        }
    }
}

/// Strings with coefficients divided by the unit phase of the first
/// coefficient and by the largest magnitude, rounded to a 1e-9 grid. `A` and
/// `−A` share a key.
pub fn dedup_key(op: &PauliSum) -> Vec<(PauliString, i64, i64)> {
    let max = op.max_abs_coefficient();
    let lead = op.iter().next().map(|(_, c)| *c).unwrap_or(Complex64::new(1.0, 0.0));
    let phase = lead / lead.norm();
    op.iter()
        .map(|(p, c)| {
            let q = c / phase / max;
            (*p, (q.re * 1e9).round() as i64, (q.im * 1e9).round() as i64)
        })
        .collect()
}

fn check_even(n: usize) -> Result<()> {
    if n < 2 || n % 2 != 0 || n > crate::pauli::MAX_QUBITS {
        return Err(Error::Contract(format!(
            "spin-orbital count {n} must be even and at least 2"
        )));
    }
    Ok(())
}

fn cr(q: usize) -> LadderOp {
    LadderOp::create(q)
}

fn an(q: usize) -> LadderOp {
    LadderOp::annihilate(q)
}

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// `JW(T − T†)`, or `None` when it vanishes.
fn generator(t: &FermionSum, n: usize) -> Result<Option<PauliSum>> {
    let g = jordan_wigner(&t.minus_dagger(), n)?;
    Ok(if g.is_empty() { None } else { Some(g) })
}

/// Spatial-orbital loops shared by the spin-adapted families: singles over
/// `p ≤ q`, doubles over `(p ≤ q) ≤ (r ≤ s)` in compound-index order.
struct SpatialIndex {
    n: usize,
    ordering: OrbitalOrdering,
}

impl SpatialIndex {
    fn a(&self, p: usize) -> usize {
        self.ordering.index(p, Spin::Alpha, self.n)
    }
    fn b(&self, p: usize) -> usize {
        self.ordering.index(p, Spin::Beta, self.n)
    }
    fn pairs(&self) -> Vec<(usize, usize)> {
        let m = self.n / 2;
        (0..m).flat_map(|p| (p..m).map(move |q| (p, q))).collect()
    }
}

fn spin_adapted_singles(
    ix: &SpatialIndex,
    b: &mut PoolBuilder,
    scale: f64,
) -> Result<()> {
    for (p, q) in ix.pairs() {
        let mut t = FermionSum::new();
        t.push(re(scale), vec![cr(ix.a(p)), an(ix.a(q))]);
        t.push(re(scale), vec![cr(ix.b(p)), an(ix.b(q))]);
        if let Some(g) = generator(&t, ix.n)? {
            let orbs = t.orbitals().into_iter().collect();
            b.push(g, orbs, ExcitationKind::Single, Some(t));
        }
    }
    Ok(())
}

/// `(r† p s† q)` product in spin-orbital indices.
fn quad(r: usize, p: usize, s: usize, q: usize) -> Vec<LadderOp> {
    vec![cr(r), an(p), cr(s), an(q)]
}

/// Spin-adapted generalized singles and doubles: singlet singles, and for each
/// spatial quadruple one triplet-type and one singlet-type double.
pub fn build_sgsd(n: usize, ordering: OrbitalOrdering) -> Result<Pool> {
    check_even(n)?;
    let ix = SpatialIndex { n, ordering };
    let mut b = PoolBuilder::new(PoolFamily::Sgsd, n).no_dedup();
    spin_adapted_singles(&ix, &mut b, 1.0)?;
    let pairs = ix.pairs();
    let w1 = 1.0 / 12f64.sqrt();
    let w2 = 2.0 / 12f64.sqrt();
    for (pq, &(p, q)) in pairs.iter().enumerate() {
        for &(r, s) in &pairs[pq..] {
            let (pa, pb, qa, qb) = (ix.a(p), ix.b(p), ix.a(q), ix.b(q));
            let (ra, rb, sa, sb) = (ix.a(r), ix.b(r), ix.a(s), ix.b(s));
            let mut ta = FermionSum::new();
            ta.push(re(w2), quad(ra, pa, sa, qa));
            ta.push(re(w2), quad(rb, pb, sb, qb));
            ta.push(re(w1), quad(ra, pa, sb, qb));
            ta.push(re(w1), quad(rb, pb, sa, qa));
            ta.push(re(w1), quad(ra, pb, sb, qa));
            ta.push(re(w1), quad(rb, pa, sa, qb));
            let mut tb = FermionSum::new();
            tb.push(re(0.5), quad(ra, pa, sb, qb));
            tb.push(re(0.5), quad(rb, pb, sa, qa));
            tb.push(re(-0.5), quad(ra, pb, sb, qa));
            tb.push(re(-0.5), quad(rb, pa, sa, qb));
            for t in [ta, tb] {
                if let Some(g) = generator(&t, n)? {
                    let orbs = t.orbitals().into_iter().collect();
                    b.push(g, orbs, ExcitationKind::Double, Some(t));
                }
            }
        }
    }
    Ok(b.finish())
}

/// The SCGSD excitations before mapping: each entry is one pool operator.
fn scgsd_excitations(n: usize, ordering: OrbitalOrdering) -> Vec<(ExcitationKind, FermionSum)> {
    let ix = SpatialIndex { n, ordering };
    let mut out = Vec::new();
    let pairs = ix.pairs();
    for &(p, q) in &pairs {
        let mut t = FermionSum::new();
        t.push(re(1.0), vec![cr(ix.a(p)), an(ix.a(q))]);
        t.push(re(1.0), vec![cr(ix.b(p)), an(ix.b(q))]);
        out.push((ExcitationKind::Single, t));
    }
    for (pq, &(p, q)) in pairs.iter().enumerate() {
        for &(r, s) in &pairs[pq..] {
            let (pa, pb, qa, qb) = (ix.a(p), ix.b(p), ix.a(q), ix.b(q));
            let (ra, rb, sa, sb) = (ix.a(r), ix.b(r), ix.a(s), ix.b(s));
            let classes = [
                [quad(ra, pa, sa, qa), quad(rb, pb, sb, qb)],
                [quad(ra, pa, sb, qb), quad(rb, pb, sa, qa)],
                [quad(ra, pb, sb, qa), quad(rb, pa, sa, qb)],
            ];
            for [x, y] in classes {
                let mut t = FermionSum::new();
                t.push(re(1.0), x);
                t.push(re(1.0), y);
                out.push((ExcitationKind::Double, t));
            }
        }
    }
    out
}

/// Spin-complemented generalized singles and doubles.
pub fn build_scgsd(n: usize, ordering: OrbitalOrdering) -> Result<Pool> {
    check_even(n)?;
    let mut b = PoolBuilder::new(PoolFamily::Scgsd, n).no_dedup();
    for (kind, t) in scgsd_excitations(n, ordering) {
        if let Some(g) = generator(&t, n)? {
            let orbs = t.orbitals().into_iter().collect();
            b.push(g, orbs, kind, Some(t));
        }
    }
    Ok(b.finish())
}

/// Every distinct Pauli string of the SCGSD operators as its own operator
/// `i·P`. Without the Z chain, each fermionic product is mapped on its own and
/// stripped outside the orbitals it touches.
pub fn build_qubit_pool(n: usize, ordering: OrbitalOrdering, keep_z_chain: bool) -> Result<Pool> {
    check_even(n)?;
    let family = if keep_z_chain {
        PoolFamily::Qubit
    } else {
        PoolFamily::QubitNoZ
    };
    let mut b = PoolBuilder::new(family, n);
    for (kind, t) in scgsd_excitations(n, ordering) {
        let mut pieces: Vec<(PauliSum, Vec<usize>)> = Vec::new();
        if keep_z_chain {
            if let Some(g) = generator(&t, n)? {
                pieces.push((g, t.orbitals().into_iter().collect()));
            }
        } else {
            for (c, ops) in &t.terms {
                let term = FermionSum::single(*c, ops.clone());
                if let Some(g) = generator(&term, n)? {
                    let support = term.orbitals();
                    pieces.push((g.strip_z_chain(&support), support.into_iter().collect()));
                }
            }
        }
        for (g, orbs) in pieces {
            for p in g.strings() {
                if p.is_identity() {
                    continue;
                }
                b.push(PauliSum::from_string(*p, I), orbs.clone(), kind, None);
            }
        }
    }
    Ok(b.finish())
}

fn same_spin(ordering: OrbitalOrdering, n: usize, a: usize, b: usize) -> bool {
    ordering.spin(a, n) == ordering.spin(b, n)
}

fn alpha_count(ordering: OrbitalOrdering, n: usize, qs: &[usize]) -> usize {
    qs.iter()
        .filter(|&&q| ordering.spin(q, n) == Spin::Alpha)
        .count()
}

/// GSD excitations before mapping, in enumeration order.
fn gsd_excitations(n: usize, ordering: OrbitalOrdering) -> Vec<(ExcitationKind, FermionSum)> {
    let mut out = Vec::new();
    for p in 0..n {
        for q in p + 1..n {
            if same_spin(ordering, n, p, q) {
                out.push((
                    ExcitationKind::Single,
                    FermionSum::single(re(1.0), vec![cr(p), an(q)]),
                ));
            }
        }
    }
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|p| (p + 1..n).map(move |q| (p, q))).collect();
    for (k, &(p, q)) in pairs.iter().enumerate() {
        for &(r, s) in &pairs[k + 1..] {
            if alpha_count(ordering, n, &[p, q]) != alpha_count(ordering, n, &[r, s]) {
                continue;
            }
            out.push((
                ExcitationKind::Double,
                FermionSum::single(re(1.0), vec![cr(p), cr(q), an(r), an(s)]),
            ));
        }
    }
    out
}

/// Generalized spin-conserving singles `a_p†a_q − h.c.` and doubles
/// `a_p†a_q†a_r a_s − h.c.`.
pub fn build_gsd(n: usize, ordering: OrbitalOrdering) -> Result<Pool> {
    check_even(n)?;
    let mut b = PoolBuilder::new(PoolFamily::Gsd, n);
    for (kind, t) in gsd_excitations(n, ordering) {
        if let Some(g) = generator(&t, n)? {
            let orbs = t.orbitals().into_iter().collect();
            b.push(g, orbs, kind, Some(t));
        }
    }
    Ok(b.finish())
}

/// GSD operators with every Z letter outside the excitation's orbitals removed.
pub fn build_eight_pool(n: usize, ordering: OrbitalOrdering) -> Result<Pool> {
    check_even(n)?;
    let mut b = PoolBuilder::new(PoolFamily::Eight, n);
    for (kind, t) in gsd_excitations(n, ordering) {
        if let Some(g) = generator(&t, n)? {
            let support = t.orbitals();
            let orbs = support.iter().copied().collect();
            b.push(g.strip_z_chain(&support), orbs, kind, Some(t));
        }
    }
    Ok(b.finish())
}

fn string_on(n: usize, letters: &[(usize, Letter)]) -> PauliString {
    PauliString::from_sparse(n, letters).expect("indices inside register")
}

/// `1 + sign·Z_a Z_b …` over the listed qubits.
fn z_factor(n: usize, qubits: &[usize], sign: f64) -> PauliSum {
    let mut f = PauliSum::identity(n, re(1.0));
    let zs: Vec<(usize, Letter)> = qubits.iter().map(|&q| (q, Letter::Z)).collect();
    f.add_term(string_on(n, &zs), re(sign));
    f
}

/// Same-spin pairs `q < p`.
fn single_pairs(n: usize, ordering: OrbitalOrdering) -> Vec<(usize, usize)> {
    (0..n)
        .flat_map(|q| (q + 1..n).map(move |p| (q, p)))
        .filter(|&(q, p)| same_spin(ordering, n, q, p))
        .collect()
}

/// Sorted quadruples `q < p < s < r` admitting a spin-conserving double.
fn double_quads(n: usize, ordering: OrbitalOrdering) -> Vec<[usize; 4]> {
    let mut out = Vec::new();
    for q in 0..n {
        for p in q + 1..n {
            for s in p + 1..n {
                for r in s + 1..n {
                    if alpha_count(ordering, n, &[q, p, s, r]) % 2 == 0 {
                        out.push([q, p, s, r]);
                    }
                }
            }
        }
    }
    out
}

fn one_single(n: usize, q: usize, p: usize) -> PauliSum {
    PauliSum::from_string(string_on(n, &[(q, Letter::Y), (p, Letter::X)]), I)
}

fn one_double(n: usize, quad: &[usize; 4], f: Format) -> PauliSum {
    let letters: Vec<(usize, Letter)> = quad.iter().copied().zip(f.0).collect();
    PauliSum::from_string(string_on(n, &letters), I)
}

/// One string per excitation: `i·Y_qX_p` for singles and the format letters
/// for doubles.
pub fn build_one_pool(n: usize, ordering: OrbitalOrdering, format: Format) -> Result<Pool> {
    check_even(n)?;
    let mut b = PoolBuilder::new(PoolFamily::One(format), n);
    for (q, p) in single_pairs(n, ordering) {
        b.push(one_single(n, q, p), vec![q, p], ExcitationKind::Single, None);
    }
    for quad in double_quads(n, ordering) {
        b.push(one_double(n, &quad, format), quad.to_vec(), ExcitationKind::Double, None);
    }
    Ok(b.finish())
}

fn two_single(n: usize, q: usize, p: usize) -> PauliSum {
    one_single(n, q, p).mul(&z_factor(n, &[q, p], -1.0)).unwrap()
}

fn two_double(n: usize, quad: &[usize; 4], f: Format) -> PauliSum {
    one_double(n, quad, f).mul(&z_factor(n, quad, 1.0)).unwrap()
}

/// One-pool operators times the parity checks `(1 − Z_qZ_p)` and
/// `(1 + Z_qZ_pZ_sZ_r)`.
pub fn build_two_pool(n: usize, ordering: OrbitalOrdering, format: Format) -> Result<Pool> {
    check_even(n)?;
    let mut b = PoolBuilder::new(PoolFamily::Two(format), n);
    for (q, p) in single_pairs(n, ordering) {
        b.push(two_single(n, q, p), vec![q, p], ExcitationKind::Single, None);
    }
    for quad in double_quads(n, ordering) {
        b.push(two_double(n, &quad, format), quad.to_vec(), ExcitationKind::Double, None);
    }
    Ok(b.finish())
}

/// Spin-case factors `(1 − Z_aZ_b)` for a sorted quadruple, by the spin
/// pattern of `(q, p, s, r)`.
pub fn four_pool_factors(ordering: OrbitalOrdering, n: usize, quad: &[usize; 4]) -> Vec<[usize; 2]> {
    let [q, p, s, r] = *quad;
    let sp: Vec<Spin> = quad.iter().map(|&k| ordering.spin(k, n)).collect();
    let case_a = [p, r];
    let case_b = [s, r];
    let case_c = [q, r];
    if sp.iter().all(|x| *x == sp[0]) {
        vec![case_b, case_a, case_c]
    } else if sp[0] == sp[2] && sp[1] == sp[3] {
        vec![case_a]
    } else if sp[0] == sp[1] && sp[2] == sp[3] {
        vec![case_b]
    } else {
        vec![case_c]
    }
}

/// Two-pool doubles times the spin-case factor; singles as in the Two pool.
pub fn build_four_pool(n: usize, ordering: OrbitalOrdering, format: Format) -> Result<Pool> {
    check_even(n)?;
    let mut b = PoolBuilder::new(PoolFamily::Four(format), n);
    for (q, p) in single_pairs(n, ordering) {
        b.push(two_single(n, q, p), vec![q, p], ExcitationKind::Single, None);
    }
    for quad in double_quads(n, ordering) {
        let base = two_double(n, &quad, format);
        for pair in four_pool_factors(ordering, n, &quad) {
            let op = base.mul(&z_factor(n, &pair, -1.0))?;
            b.push(op, quad.to_vec(), ExcitationKind::Double, None);
        }
    }
    Ok(b.finish())
}

/// Minimal complete pool: `i·Z_k Y_{k+1}` and `i·Y_k` for `k = 0..n−2`.
pub fn build_min_g(n: usize) -> Result<Pool> {
    if !(2..=crate::pauli::MAX_QUBITS).contains(&n) {
        return Err(Error::Contract(format!("minimal pool needs n ≥ 2, got {n}")));
    }
    let mut b = PoolBuilder::new(PoolFamily::MinG, n);
    for k in 0..n - 1 {
        let p = string_on(n, &[(k, Letter::Z), (k + 1, Letter::Y)]);
        b.push(PauliSum::from_string(p, I), vec![k, k + 1], ExcitationKind::Other, None);
    }
    for k in 0..n - 1 {
        let p = string_on(n, &[(k, Letter::Y)]);
        b.push(PauliSum::from_string(p, I), vec![k], ExcitationKind::Other, None);
    }
    Ok(b.finish())
}

/// Occupied-to-virtual spin-conserving singles and doubles relative to the
/// Hartree-Fock determinant.
pub fn build_uccsd(problem: &MolecularProblem) -> Result<Pool> {
    let n = problem.n_spin_orbitals;
    let ordering = problem.ordering;
    let occ = hf_occupation(n, problem.n_electrons, ordering);
    let occ_set: BTreeSet<usize> = occ.iter().copied().collect();
    let virt: Vec<usize> = (0..n).filter(|q| !occ_set.contains(q)).collect();
    let mut b = PoolBuilder::new(PoolFamily::Uccsd, n);
    for &i in &occ {
        for &a in &virt {
            if same_spin(ordering, n, i, a) {
                let t = FermionSum::single(re(1.0), vec![cr(a), an(i)]);
                if let Some(g) = generator(&t, n)? {
                    b.push(g, vec![i, a], ExcitationKind::Single, Some(t));
                }
            }
        }
    }
    for (k, &i) in occ.iter().enumerate() {
        for &j in &occ[k + 1..] {
            for (m, &a) in virt.iter().enumerate() {
                for &bb in &virt[m + 1..] {
                    if alpha_count(ordering, n, &[i, j]) != alpha_count(ordering, n, &[a, bb]) {
                        continue;
                    }
                    let t = FermionSum::single(re(1.0), vec![cr(a), cr(bb), an(j), an(i)]);
                    if let Some(g) = generator(&t, n)? {
                        b.push(g, vec![i, j, a, bb], ExcitationKind::Double, Some(t));
                    }
                }
            }
        }
    }
    Ok(b.finish())
}

/// Build any family for a problem.
pub fn build_pool(family: PoolFamily, problem: &MolecularProblem) -> Result<Pool> {
    let n = problem.n_spin_orbitals;
    let o = problem.ordering;
    match family {
        PoolFamily::Sgsd => build_sgsd(n, o),
        PoolFamily::Scgsd => build_scgsd(n, o),
        PoolFamily::Gsd => build_gsd(n, o),
        PoolFamily::Qubit => build_qubit_pool(n, o, true),
        PoolFamily::QubitNoZ => build_qubit_pool(n, o, false),
        PoolFamily::One(f) => build_one_pool(n, o, f),
        PoolFamily::Two(f) => build_two_pool(n, o, f),
        PoolFamily::Four(f) => build_four_pool(n, o, f),
        PoolFamily::Eight => build_eight_pool(n, o),
        PoolFamily::MinG => build_min_g(n),
        PoolFamily::Uccsd => build_uccsd(problem),
    }
}
