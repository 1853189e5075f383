//! Dense state vectors and the observables reported by the experiments.
//!
//! Basis convention: qubit 0 is the leftmost character of a bitstring label
//! and the most significant bit of an amplitude index, matching the
//! Kronecker ordering of [`crate::pauli`].

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::pauli::{PauliOp, PauliString, PauliSum};
use crate::{Error, Result};

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// 2^N complex amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// The all-zeros computational basis state.
    pub fn zero_state(n_qubits: usize) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amps[0] = Complex64::new(1.0, 0.0);
        Self { n_qubits, amps }
    }

    /// Computational basis state from a label such as `"011"`.
    pub fn basis_state(n_qubits: usize, label: &str) -> Result<Self> {
        let idx = basis_index(n_qubits, label)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amps[idx] = Complex64::new(1.0, 0.0);
        Ok(Self { n_qubits, amps })
    }

    /// `|+⟩^⊗N`, the ground state of `h_x Σ X_j` for negative `h_x`.
    pub fn plus_state(n_qubits: usize) -> Self {
        let dim = 1usize << n_qubits;
        let a = Complex64::new((dim as f64).sqrt().recip(), 0.0);
        Self {
            n_qubits,
            amps: vec![a; dim],
        }
    }

    /// `|−⟩^⊗N`.
    pub fn minus_state(n_qubits: usize) -> Self {
        let dim = 1usize << n_qubits;
        let scale = (dim as f64).sqrt().recip();
        let amps = (0..dim)
            .map(|b| {
                let sign = if (b as u64).count_ones().is_multiple_of(2) {
                    1.0
                } else {
                    -1.0
                };
                Complex64::new(sign * scale, 0.0)
            })
            .collect();
        Self { n_qubits, amps }
    }

    /// Normalized uniform superposition over the given basis indices.
    pub fn uniform_over(n_qubits: usize, indices: &[usize]) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::InvalidProblem("empty basis index set".into()));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        let a = Complex64::new((indices.len() as f64).sqrt().recip(), 0.0);
        for &idx in indices {
            amps[idx] = a;
        }
        Ok(Self { n_qubits, amps })
    }

    pub fn from_amplitudes(n_qubits: usize, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != 1 << n_qubits {
            return Err(Error::LengthMismatch(1 << n_qubits, amps.len()));
        }
        Ok(Self { n_qubits, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amps[index]
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalize(&mut self) {
        let n = self.norm();
        if n > 0.0 {
            for a in &mut self.amps {
                *a /= n;
            }
        }
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `|⟨target|self⟩|²`.
    pub fn fidelity(&self, target: &Self) -> Result<f64> {
        if self.n_qubits != target.n_qubits {
            return Err(Error::LengthMismatch(self.n_qubits, target.n_qubits));
        }
        Ok(target.inner(self).norm_sqr())
    }

    /// Squared magnitude of the amplitude labeled by a bitstring.
    pub fn probability_of(&self, label: &str) -> Result<f64> {
        let idx = basis_index(self.n_qubits, label)?;
        Ok(self.amps[idx].norm_sqr())
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Rank-1 density matrix `|ψ⟩⟨ψ|`, guarded at 10 qubits.
    pub fn density_matrix(&self) -> Result<DMatrix<Complex64>> {
        if self.n_qubits > 10 {
            return Err(Error::RegisterTooLarge {
                n: self.n_qubits,
                limit: 10,
            });
        }
        let dim = self.dim();
        let v = nalgebra::DVector::from_column_slice(&self.amps);
        let mut m = DMatrix::zeros(dim, dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = v[i] * v[j].conj();
            }
        }
        Ok(m)
    }

    /// In-place `exp(−iθP)` via `cos θ · I − i sin θ · P`.
    pub fn apply_pauli_rotation(&mut self, p: &PauliString, theta: f64) -> Result<()> {
        if p.n_qubits() != self.n_qubits {
            return Err(Error::LengthMismatch(self.n_qubits, p.n_qubits()));
        }
        if theta == 0.0 {
            return Ok(());
        }
        let support: Vec<(usize, PauliOp)> = p.support().collect();
        if support.is_empty() {
            // global phase
            let phase = Complex64::new(0.0, -theta).exp();
            for a in &mut self.amps {
                *a *= phase;
            }
            return Ok(());
        }
        let mut flip_mask = 0usize;
        for &(site, op) in &support {
            if matches!(op, PauliOp::X | PauliOp::Y) {
                flip_mask |= self.bit(site);
            }
        }
        let cos = Complex64::new(theta.cos(), 0.0);
        let misin = Complex64::new(0.0, -theta.sin());
        if flip_mask == 0 {
            // diagonal string: pure Z content
            for b in 0..self.dim() {
                let s = self.string_phase(&support, b);
                self.amps[b] *= cos + misin * s;
            }
        } else {
            for b in 0..self.dim() {
                let partner = b ^ flip_mask;
                if partner < b {
                    continue;
                }
                let phase_b = self.string_phase(&support, b);
                let phase_partner = self.string_phase(&support, partner);
                let (ab, ap) = (self.amps[b], self.amps[partner]);
                // P|b⟩ = φ(b)|b⊕m⟩, so (Pψ)_b picks up φ(partner)·ψ_partner
                self.amps[b] = cos * ab + misin * phase_partner * ap;
                self.amps[partner] = cos * ap + misin * phase_b * ab;
            }
        }
        Ok(())
    }

    /// `H · |self⟩` as a new vector, for the matrix-free propagator.
    pub fn apply_pauli_sum(&self, h: &PauliSum) -> Result<Self> {
        if h.n_qubits() != self.n_qubits {
            return Err(Error::LengthMismatch(self.n_qubits, h.n_qubits()));
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim()];
        for (string, coeff) in h.terms() {
            let support: Vec<(usize, PauliOp)> = string.support().collect();
            let mut flip_mask = 0usize;
            for &(site, op) in &support {
                if matches!(op, PauliOp::X | PauliOp::Y) {
                    flip_mask |= self.bit(site);
                }
            }
            for b in 0..self.dim() {
                let a = self.amps[b];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                let phase = self.string_phase(&support, b);
                out[b ^ flip_mask] += coeff * phase * a;
            }
        }
        Ok(Self {
            n_qubits: self.n_qubits,
            amps: out,
        })
    }

    pub fn apply_hadamard(&mut self, qubit: usize) {
        let bit = self.bit(qubit);
        for b in 0..self.dim() {
            if b & bit == 0 {
                let (a0, a1) = (self.amps[b], self.amps[b | bit]);
                self.amps[b] = (a0 + a1) * FRAC_1_SQRT_2;
                self.amps[b | bit] = (a0 - a1) * FRAC_1_SQRT_2;
            }
        }
    }

    pub fn apply_cnot(&mut self, control: usize, target: usize) {
        let cbit = self.bit(control);
        let tbit = self.bit(target);
        for b in 0..self.dim() {
            if b & cbit != 0 && b & tbit == 0 {
                self.amps.swap(b, b | tbit);
            }
        }
    }

    /// `self += factor · other`.
    pub fn add_scaled(&mut self, other: &Self, factor: Complex64) {
        for (a, b) in self.amps.iter_mut().zip(&other.amps) {
            *a += factor * b;
        }
    }

    pub fn scale(&mut self, factor: Complex64) {
        for a in &mut self.amps {
            *a *= factor;
        }
    }

    /// `‖self − other‖₂`.
    pub fn distance(&self, other: &Self) -> f64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Little-endian interleaved re/im doubles.
    pub fn write_binary<W: std::io::Write>(&self, mut w: W) -> Result<()> {
        for a in &self.amps {
            w.write_all(&a.re.to_le_bytes())?;
            w.write_all(&a.im.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary<R: std::io::Read>(n_qubits: usize, mut r: R) -> Result<Self> {
        let dim = 1usize << n_qubits;
        let mut amps = Vec::with_capacity(dim);
        let mut buf = [0u8; 16];
        for _ in 0..dim {
            r.read_exact(&mut buf)?;
            let re = f64::from_le_bytes(buf[0..8].try_into().unwrap());
            let im = f64::from_le_bytes(buf[8..16].try_into().unwrap());
            amps.push(Complex64::new(re, im));
        }
        Ok(Self { n_qubits, amps })
    }

    /// Bit mask of `qubit` within an amplitude index (qubit 0 = MSB).
    fn bit(&self, qubit: usize) -> usize {
        1usize << (self.n_qubits - 1 - qubit)
    }

    /// `φ(b)` with `P|b⟩ = φ(b)|b ⊕ m⟩` for the string with given support.
    fn string_phase(&self, support: &[(usize, PauliOp)], b: usize) -> Complex64 {
        let mut phase = Complex64::new(1.0, 0.0);
        for &(site, op) in support {
            let set = b & self.bit(site) != 0;
            phase *= match (op, set) {
                (PauliOp::X, _) => Complex64::new(1.0, 0.0),
                (PauliOp::Y, false) => Complex64::new(0.0, 1.0),
                (PauliOp::Y, true) => Complex64::new(0.0, -1.0),
                (PauliOp::Z, false) => Complex64::new(1.0, 0.0),
                (PauliOp::Z, true) => Complex64::new(-1.0, 0.0),
                (PauliOp::I, _) => Complex64::new(1.0, 0.0),
            };
        }
        phase
    }
}

/// Basis index of a bitstring label (qubit 0 leftmost).
pub fn basis_index(n_qubits: usize, label: &str) -> Result<usize> {
    if label.len() != n_qubits {
        return Err(Error::InvalidLabel(format!(
            "label '{label}' has length {} but register has {n_qubits} qubits",
            label.len()
        )));
    }
    let mut idx = 0usize;
    for c in label.chars() {
        idx <<= 1;
        match c {
            '0' => {}
            '1' => idx |= 1,
            other => {
                return Err(Error::InvalidLabel(format!(
                    "label '{label}' contains '{other}'"
                )))
            }
        }
    }
    Ok(idx)
}

/// Bitstring label of a basis index (qubit 0 leftmost).
pub fn basis_label(n_qubits: usize, index: usize) -> String {
    (0..n_qubits)
        .map(|q| {
            if index & (1 << (n_qubits - 1 - q)) != 0 {
                '1'
            } else {
                '0'
            }
        })
        .collect()
}
