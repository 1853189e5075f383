//! Readout-noise modeling and matrix-inversion measurement mitigation.
//!
//! The response matrix maps true basis-state probabilities to observed
//! readout distributions; it is built analytically as a tensor product of
//! per-qubit 2×2 confusion matrices, or estimated from simulated
//! calibration runs. Sampling uses a seeded ChaCha12 generator, so every
//! stochastic output is reproducible from its recorded seed.

use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::state::basis_label;
use crate::{Error, Result};

const DENSE_NOISE_LIMIT: usize = 12;

/// Per-qubit readout error probabilities: `p10` = read 1 given true 0,
/// `p01` = read 0 given true 1.
#[derive(Debug, Clone, PartialEq)]
pub struct ReadoutModel {
    p10: Vec<f64>,
    p01: Vec<f64>,
}

impl ReadoutModel {
    pub fn new(p10: Vec<f64>, p01: Vec<f64>) -> Result<Self> {
        if p10.len() != p01.len() {
            return Err(Error::LengthMismatch(p10.len(), p01.len()));
        }
        for &p in p10.iter().chain(&p01) {
            if !(0.0..0.5).contains(&p) {
                return Err(Error::InvalidDistribution(format!(
                    "readout error probability {p} outside [0, 0.5)"
                )));
            }
        }
        Ok(Self { p10, p01 })
    }

    /// Identical symmetric error on every qubit.
    pub fn uniform(n_qubits: usize, p: f64) -> Result<Self> {
        Self::new(vec![p; n_qubits], vec![p; n_qubits])
    }

    pub fn noiseless(n_qubits: usize) -> Self {
        Self {
            p10: vec![0.0; n_qubits],
            p01: vec![0.0; n_qubits],
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.p10.len()
    }

    /// Per-qubit confusion matrix `[[1−p10, p01], [p10, 1−p01]]`.
    fn confusion(&self, qubit: usize) -> [[f64; 2]; 2] {
        [
            [1.0 - self.p10[qubit], self.p01[qubit]],
            [self.p10[qubit], 1.0 - self.p01[qubit]],
        ]
    }
}

/// Column-stochastic map from prepared to observed distributions.
#[derive(Debug, Clone, PartialEq)]
pub struct ResponseMatrix {
    n_qubits: usize,
    matrix: DMatrix<f64>,
}

impl ResponseMatrix {
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn entry(&self, observed: usize, prepared: usize) -> f64 {
        self.matrix[(observed, prepared)]
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// `M_R · probs`.
    pub fn apply(&self, probs: &[f64]) -> Result<Vec<f64>> {
        let dim = 1usize << self.n_qubits;
        if probs.len() != dim {
            return Err(Error::LengthMismatch(dim, probs.len()));
        }
        let v = nalgebra::DVector::from_column_slice(probs);
        Ok((&self.matrix * v).as_slice().to_vec())
    }
}

/// Analytic response matrix: tensor product of per-qubit confusion
/// matrices.
pub fn build_response_matrix(model: &ReadoutModel) -> Result<ResponseMatrix> {
    let n = model.n_qubits();
    if n > DENSE_NOISE_LIMIT {
        return Err(Error::RegisterTooLarge {
            n,
            limit: DENSE_NOISE_LIMIT,
        });
    }
    let dim = 1usize << n;
    let confusions: Vec<[[f64; 2]; 2]> = (0..n).map(|q| model.confusion(q)).collect();
    let mut m = DMatrix::zeros(dim, dim);
    for observed in 0..dim {
        for prepared in 0..dim {
            let mut p = 1.0;
            for (q, confusion) in confusions.iter().enumerate() {
                let bit = |idx: usize| (idx >> (n - 1 - q)) & 1;
                p *= confusion[bit(observed)][bit(prepared)];
            }
            m[(observed, prepared)] = p;
        }
    }
    Ok(ResponseMatrix {
        n_qubits: n,
        matrix: m,
    })
}

/// Shot counts over computational basis outcomes.
#[derive(Debug, Clone, PartialEq)]
pub struct CountsHistogram {
    pub n_qubits: usize,
    pub counts: Vec<u64>,
    pub shots: u64,
    pub seed: u64,
}

impl CountsHistogram {
    pub fn frequencies(&self) -> Vec<f64> {
        let total = self.shots.max(1) as f64;
        self.counts.iter().map(|&c| c as f64 / total).collect()
    }

    /// CSV body: `bitstring,count`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("bitstring,count\n");
        for (idx, &count) in self.counts.iter().enumerate() {
            out.push_str(&format!("{},{}\n", basis_label(self.n_qubits, idx), count));
        }
        out
    }
}

fn validate_distribution(probs: &[f64]) -> Result<()> {
    let sum: f64 = probs.iter().sum();
    if probs.iter().any(|&p| p < -1e-12) || (sum - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidDistribution(format!(
            "probabilities must be nonnegative and sum to 1 (sum = {sum})"
        )));
    }
    Ok(())
}

/// Sample `shots` outcomes from the readout-noised distribution
/// `M_R · probs`; deterministic for a given seed.
pub fn apply_readout_noise(
    probs: &[f64],
    model: &ReadoutModel,
    seed: u64,
    shots: u64,
) -> Result<CountsHistogram> {
    validate_distribution(probs)?;
    let noisy = noisy_distribution(probs, model)?;
    sample_counts(&noisy, model.n_qubits(), seed, shots)
}

/// Analytic (infinite-shot) readout-noised distribution.
pub fn noisy_distribution(probs: &[f64], model: &ReadoutModel) -> Result<Vec<f64>> {
    validate_distribution(probs)?;
    build_response_matrix(model)?.apply(probs)
}

/// Multinomial sampling with the crate's named generator (ChaCha12).
pub fn sample_counts(
    probs: &[f64],
    n_qubits: usize,
    seed: u64,
    shots: u64,
) -> Result<CountsHistogram> {
    validate_distribution(probs)?;
    if probs.len() != 1 << n_qubits {
        return Err(Error::LengthMismatch(1 << n_qubits, probs.len()));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut cumulative = Vec::with_capacity(probs.len());
    let mut acc = 0.0;
    for &p in probs {
        acc += p.max(0.0);
        cumulative.push(acc);
    }
    let total = acc;
    let mut counts = vec![0u64; probs.len()];
    for _ in 0..shots {
        let x: f64 = rng.random::<f64>() * total;
        let idx = cumulative.partition_point(|&c| c < x).min(probs.len() - 1);
        counts[idx] += 1;
    }
    Ok(CountsHistogram {
        n_qubits,
        counts,
        shots,
        seed,
    })
}

/// Response matrix estimated by preparing each basis state and sampling it
/// through the noisy readout, as a calibration run would.
pub fn estimate_response_matrix(
    model: &ReadoutModel,
    shots_per_state: u64,
    seed: u64,
) -> Result<ResponseMatrix> {
    let n = model.n_qubits();
    if n > DENSE_NOISE_LIMIT {
        return Err(Error::RegisterTooLarge {
            n,
            limit: DENSE_NOISE_LIMIT,
        });
    }
    let dim = 1usize << n;
    let mut m = DMatrix::zeros(dim, dim);
    for prepared in 0..dim {
        let mut probs = vec![0.0; dim];
        probs[prepared] = 1.0;
        let histogram = apply_readout_noise(
            &probs,
            model,
            seed.wrapping_add(prepared as u64),
            shots_per_state,
        )?;
        for (observed, &count) in histogram.counts.iter().enumerate() {
            m[(observed, prepared)] = count as f64 / shots_per_state as f64;
        }
    }
    Ok(ResponseMatrix {
        n_qubits: n,
        matrix: m,
    })
}

/// Result of applying `M_R⁻¹` to a noisy distribution.
#[derive(Debug, Clone)]
pub struct MitigationOutcome {
    /// Raw inverted vector (may carry small negative entries).
    pub inverted: Vec<f64>,
    /// Clipped to nonnegative and renormalized.
    pub mitigated: Vec<f64>,
    /// Total negative mass removed by clipping.
    pub clipped_mass: f64,
}

/// Matrix-inversion mitigation: solve `M_R x = p_noisy`, then clip and
/// renormalize. With the exact response matrix and exact input this
/// recovers the true distribution identically.
pub fn mitigate(noisy: &[f64], response: &ResponseMatrix) -> Result<MitigationOutcome> {
    let dim = 1usize << response.n_qubits();
    if noisy.len() != dim {
        return Err(Error::LengthMismatch(dim, noisy.len()));
    }
    let lu = response.matrix.clone().lu();
    let rhs = nalgebra::DVector::from_column_slice(noisy);
    let solution = lu
        .solve(&rhs)
        .ok_or_else(|| Error::SingularMatrix("response matrix is not invertible".into()))?;
    let inverted: Vec<f64> = solution.as_slice().to_vec();
    let clipped_mass: f64 = inverted.iter().filter(|&&x| x < 0.0).map(|x| -x).sum();
    let mut mitigated: Vec<f64> = inverted.iter().map(|&x| x.max(0.0)).collect();
    let sum: f64 = mitigated.iter().sum();
    if sum > 0.0 {
        for x in &mut mitigated {
            *x /= sum;
        }
    }
    debug_assert!(mitigated.iter().all(|x| x.is_finite()));
    Ok(MitigationOutcome {
        inverted,
        mitigated,
        clipped_mass,
    })
}

/// Total variation distance `½ Σ |a_i − b_i|`.
pub fn total_variation(a: &[f64], b: &[f64]) -> f64 {
    0.5 * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>()
}
