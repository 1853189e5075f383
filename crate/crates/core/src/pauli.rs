//! Exact symbolic algebra over N-qubit Pauli strings.
//!
//! A [`PauliString`] is a tensor product of single-qubit operators from
//! `{I, X, Y, Z}`; a [`PauliSum`] is a map from strings to complex
//! coefficients. Products, commutators, nested commutators and
//! Hilbert–Schmidt inner products are all computed exactly (phases are
//! powers of `i`), with dense-matrix export available as an oracle for
//! small registers.
//!
//! Qubit 0 is the leftmost letter of a string and the most significant bit
//! of a basis index, so `to_dense` is the Kronecker product in site order.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::{Error, Result};

/// Coefficients with magnitude below this are pruned after every operation.
/// Keeps exact cancellations recognizable in deep nested commutators.
pub const COEFF_EPS: f64 = 1e-14;

/// Default register-size guard for dense export.
pub const DENSE_LIMIT: usize = 12;

/// Single-qubit Pauli operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PauliOp {
    I,
    X,
    Y,
    Z,
}

impl PauliOp {
    pub fn from_letter(c: char) -> Result<Self> {
        match c {
            'I' => Ok(PauliOp::I),
            'X' => Ok(PauliOp::X),
            'Y' => Ok(PauliOp::Y),
            'Z' => Ok(PauliOp::Z),
            other => Err(Error::InvalidPauliLetter(other)),
        }
    }

    pub fn letter(self) -> char {
        match self {
            PauliOp::I => 'I',
            PauliOp::X => 'X',
            PauliOp::Y => 'Y',
            PauliOp::Z => 'Z',
        }
    }

    /// Single-site product `self · other` as `(k, op)` with phase `i^k`.
    fn multiply(self, other: Self) -> (u8, Self) {
        use PauliOp::*;
        match (self, other) {
            (I, p) => (0, p),
            (p, I) => (0, p),
            (X, X) | (Y, Y) | (Z, Z) => (0, I),
            (X, Y) => (1, Z),
            (Y, X) => (3, Z),
            (Y, Z) => (1, X),
            (Z, Y) => (3, X),
            (Z, X) => (1, Y),
            (X, Z) => (3, Y),
        }
    }

    /// 2×2 matrix representation.
    pub fn matrix(self) -> DMatrix<Complex64> {
        let o = Complex64::new(0.0, 0.0);
        let l = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        let rows: [Complex64; 4] = match self {
            PauliOp::I => [l, o, o, l],
            PauliOp::X => [o, l, l, o],
            PauliOp::Y => [o, -i, i, o],
            PauliOp::Z => [l, o, o, -l],
        };
        DMatrix::from_row_slice(2, 2, &rows)
    }
}

/// A tensor product of Pauli operators over a fixed-size register.
///
/// Ordering is lexicographic on the letters (with `I < X < Y < Z`), which
/// gives deterministic term order in sums and serialized output.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PauliString {
    ops: Vec<PauliOp>,
}

impl PauliString {
    /// The all-identity string (multiplicative identity).
    pub fn identity(n: usize) -> Self {
        Self {
            ops: vec![PauliOp::I; n],
        }
    }

    /// Identity string with `op` placed at `site`.
    pub fn single(n: usize, site: usize, op: PauliOp) -> Self {
        let mut s = Self::identity(n);
        s.ops[site] = op;
        s
    }

    /// Identity string with operators placed at the given sites.
    pub fn with_ops(n: usize, placed: &[(usize, PauliOp)]) -> Self {
        let mut s = Self::identity(n);
        for &(site, op) in placed {
            s.ops[site] = op;
        }
        s
    }

    /// Parse a letter string such as `"XZI"`.
    pub fn parse(text: &str) -> Result<Self> {
        let ops = text
            .chars()
            .map(PauliOp::from_letter)
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { ops })
    }

    pub fn n_qubits(&self) -> usize {
        self.ops.len()
    }

    pub fn op(&self, site: usize) -> PauliOp {
        self.ops[site]
    }

    pub fn ops(&self) -> &[PauliOp] {
        &self.ops
    }

    /// Number of non-identity sites.
    pub fn weight(&self) -> usize {
        self.ops.iter().filter(|&&p| p != PauliOp::I).count()
    }

    pub fn is_identity(&self) -> bool {
        self.ops.iter().all(|&p| p == PauliOp::I)
    }

    /// Sites carrying a non-identity operator.
    pub fn support(&self) -> impl Iterator<Item = (usize, PauliOp)> + '_ {
        self.ops
            .iter()
            .copied()
            .enumerate()
            .filter(|&(_, p)| p != PauliOp::I)
    }

    /// Matrix product `self · other = phase · result` with `phase ∈ {±1, ±i}`.
    pub fn multiply(&self, other: &Self) -> Result<(Complex64, Self)> {
        if self.n_qubits() != other.n_qubits() {
            return Err(Error::LengthMismatch(self.n_qubits(), other.n_qubits()));
        }
        let mut k = 0u8;
        let mut ops = Vec::with_capacity(self.ops.len());
        for (&a, &b) in self.ops.iter().zip(&other.ops) {
            let (dk, op) = a.multiply(b);
            k = (k + dk) % 4;
            ops.push(op);
        }
        Ok((phase_from_power(k), Self { ops }))
    }

    /// True when the two strings commute as operators.
    pub fn commutes_with(&self, other: &Self) -> bool {
        debug_assert_eq!(self.n_qubits(), other.n_qubits());
        let anticommuting_sites = self
            .ops
            .iter()
            .zip(&other.ops)
            .filter(|(&a, &b)| a != PauliOp::I && b != PauliOp::I && a != b)
            .count();
        anticommuting_sites % 2 == 0
    }

    /// Dense matrix (Kronecker product in site order).
    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::from_element(1, 1, Complex64::new(1.0, 0.0));
        for &op in &self.ops {
            m = m.kronecker(&op.matrix());
        }
        m
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &op in &self.ops {
            write!(f, "{}", op.letter())?;
        }
        Ok(())
    }
}

fn phase_from_power(k: u8) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// A weighted sum of Pauli strings over a fixed register size.
///
/// Terms with coefficient magnitude below [`COEFF_EPS`] are dropped, so an
/// operator that cancels exactly becomes the empty sum.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliSum {
    n_qubits: usize,
    terms: BTreeMap<PauliString, Complex64>,
}

impl PauliSum {
    pub fn zero(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_terms<I>(n_qubits: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (PauliString, Complex64)>,
    {
        let mut sum = Self::zero(n_qubits);
        for (string, coeff) in terms {
            sum.add_term(string, coeff)?;
        }
        Ok(sum)
    }

    /// Single-term sum `coeff · op_site`.
    pub fn single(n_qubits: usize, site: usize, op: PauliOp, coeff: f64) -> Self {
        let mut sum = Self::zero(n_qubits);
        sum.add_term(PauliString::single(n_qubits, site, op), coeff.into())
            .expect("length is consistent by construction");
        sum
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in deterministic (lexicographic) order.
    pub fn terms(&self) -> impl Iterator<Item = (&PauliString, Complex64)> {
        self.terms.iter().map(|(s, &c)| (s, c))
    }

    /// Coefficient of `string`, zero when absent.
    pub fn coefficient(&self, string: &PauliString) -> Complex64 {
        self.terms
            .get(string)
            .copied()
            .unwrap_or_else(|| Complex64::new(0.0, 0.0))
    }

    /// Accumulate `coeff · string`, pruning results below [`COEFF_EPS`].
    pub fn add_term(&mut self, string: PauliString, coeff: Complex64) -> Result<()> {
        if string.n_qubits() != self.n_qubits {
            return Err(Error::LengthMismatch(self.n_qubits, string.n_qubits()));
        }
        let updated = self.coefficient(&string) + coeff;
        if updated.norm() < COEFF_EPS {
            self.terms.remove(&string);
        } else {
            self.terms.insert(string, updated);
        }
        Ok(())
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        let mut out = Self::zero(self.n_qubits);
        for (s, c) in self.terms() {
            let v = c * factor;
            if v.norm() >= COEFF_EPS {
                out.terms.insert(s.clone(), v);
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::LengthMismatch(self.n_qubits, other.n_qubits));
        }
        let mut out = self.clone();
        for (s, c) in other.terms() {
            out.add_term(s.clone(), c)?;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scaled(Complex64::new(-1.0, 0.0)))
    }

    /// Full operator product.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::LengthMismatch(self.n_qubits, other.n_qubits));
        }
        let mut out = Self::zero(self.n_qubits);
        for (p, a) in self.terms() {
            for (q, b) in other.terms() {
                let (phase, r) = p.multiply(q)?;
                out.add_term(r, phase * a * b)?;
            }
        }
        Ok(out)
    }

    /// Commutator `[self, other] = self·other − other·self`.
    ///
    /// Exploits that string pairs either commute (no contribution) or
    /// anticommute (twice the product).
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::LengthMismatch(self.n_qubits, other.n_qubits));
        }
        let mut out = Self::zero(self.n_qubits);
        for (p, a) in self.terms() {
            for (q, b) in other.terms() {
                if p.commutes_with(q) {
                    continue;
                }
                let (phase, r) = p.multiply(q)?;
                out.add_term(r, phase * a * b * 2.0)?;
            }
        }
        Ok(out)
    }

    /// Depth-fold left-nested commutator `[h, [h, … [h, self]]]` seeded with
    /// `dh`: depth 1 is `[h, dh]`.
    pub fn nested_commutator(h: &Self, dh: &Self, depth: usize) -> Result<Self> {
        assert!(depth >= 1, "nested commutator depth must be positive");
        let mut acc = h.commutator(dh)?;
        for _ in 1..depth {
            acc = h.commutator(&acc)?;
        }
        Ok(acc)
    }

    /// Hilbert–Schmidt pairing `Tr[self† · other] = 2^N Σ_P conj(a_P)·b_P`.
    pub fn trace_inner_product(&self, other: &Self) -> Result<Complex64> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::LengthMismatch(self.n_qubits, other.n_qubits));
        }
        let dim = (1u64 << self.n_qubits) as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for (s, c) in self.terms() {
            acc += c.conj() * other.coefficient(s);
        }
        Ok(acc * dim)
    }

    /// True when every coefficient is real to within `tol`.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.terms.values().all(|c| c.im.abs() <= tol)
    }

    /// Dense 2^N × 2^N matrix, guarded at [`DENSE_LIMIT`] qubits.
    pub fn to_dense(&self) -> Result<DMatrix<Complex64>> {
        self.to_dense_with_limit(DENSE_LIMIT)
    }

    pub fn to_dense_with_limit(&self, limit: usize) -> Result<DMatrix<Complex64>> {
        if self.n_qubits > limit {
            return Err(Error::RegisterTooLarge {
                n: self.n_qubits,
                limit,
            });
        }
        let dim = 1usize << self.n_qubits;
        let mut m = DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
        for (s, c) in self.terms() {
            m += s.to_dense() * c;
        }
        Ok(m)
    }

    /// Canonical text form: one term per line, `<re> <im> <letters>`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (s, c) in self.terms() {
            out.push_str(&format!("{:.17e} {:.17e} {}\n", c.re, c.im, s));
        }
        out
    }

    pub fn from_text(n_qubits: usize, text: &str) -> Result<Self> {
        let mut sum = Self::zero(n_qubits);
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 3 {
                return Err(Error::Config(format!("malformed PauliSum line: {line}")));
            }
            let re: f64 = fields[0]
                .parse()
                .map_err(|_| Error::Config(format!("bad coefficient in: {line}")))?;
            let im: f64 = fields[1]
                .parse()
                .map_err(|_| Error::Config(format!("bad coefficient in: {line}")))?;
            sum.add_term(PauliString::parse(fields[2])?, Complex64::new(re, im))?;
        }
        Ok(sum)
    }
}
