//! Builders for the bundled annealing problems: interpolated Hamiltonians,
//! schedules, and initial/target states.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::pauli::{PauliOp, PauliString, PauliSum};
use crate::state::{basis_label, StateVector};
use crate::{Error, Result};

/// Interpolation schedule λ(t) with λ(0) = 0 and λ(T) = 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Schedule {
    /// λ(t) = sin²(πt / 2T); the derivative vanishes at both endpoints, so
    /// any CD term switches itself off at t = 0 and t = T.
    Sin2 { total_time: f64 },
}

impl Schedule {
    pub fn sin2(total_time: f64) -> Result<Self> {
        if total_time <= 0.0 || !total_time.is_finite() {
            return Err(Error::InvalidSchedule(format!(
                "total time must be positive, got {total_time}"
            )));
        }
        Ok(Schedule::Sin2 { total_time })
    }

    pub fn total_time(&self) -> f64 {
        match *self {
            Schedule::Sin2 { total_time } => total_time,
        }
    }

    pub fn lambda(&self, t: f64) -> f64 {
        match *self {
            Schedule::Sin2 { total_time } => {
                let x = (std::f64::consts::FRAC_PI_2 * t / total_time).sin();
                x * x
            }
        }
    }

    pub fn lambda_dot(&self, t: f64) -> f64 {
        match *self {
            Schedule::Sin2 { total_time } => {
                (std::f64::consts::FRAC_PI_2 / total_time)
                    * (std::f64::consts::PI * t / total_time).sin()
            }
        }
    }
}

/// Chain boundary condition for the ZZ sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    Open,
    Periodic,
}

/// Parameters of an Ising chain in a rotating field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpinChainSpec {
    pub n: usize,
    pub h_x: f64,
    pub h_z: Vec<f64>,
    pub j0: f64,
    pub boundary: Boundary,
}

impl SpinChainSpec {
    pub fn uniform(n: usize, h_x: f64, h_z: f64, j0: f64, boundary: Boundary) -> Self {
        Self {
            n,
            h_x,
            h_z: vec![h_z; n],
            j0,
            boundary,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n < 1 {
            return Err(Error::InvalidProblem(
                "chain needs at least one spin".into(),
            ));
        }
        if self.h_z.len() != self.n {
            return Err(Error::InvalidProblem(format!(
                "h_z has {} entries for {} spins",
                self.h_z.len(),
                self.n
            )));
        }
        Ok(())
    }

    /// Bond index pairs, deduplicated. For a periodic two-site chain the
    /// wrapped bond coincides with the single bond and is dropped once,
    /// which is recorded as a warning on the built problem.
    pub fn bonds(&self) -> (Vec<(usize, usize)>, bool) {
        let mut bonds = Vec::new();
        let mut deduplicated = false;
        let upper = match self.boundary {
            Boundary::Open => self.n.saturating_sub(1),
            Boundary::Periodic => self.n,
        };
        for j in 0..upper {
            let pair = (j, (j + 1) % self.n);
            let key = (pair.0.min(pair.1), pair.0.max(pair.1));
            if bonds.contains(&key) {
                deduplicated = true;
                continue;
            }
            if key.0 == key.1 {
                continue;
            }
            bonds.push(key);
        }
        (bonds, deduplicated)
    }
}

/// One annealing experiment: `H(λ) = (1−λ)H_i + λH_f` plus schedule, step
/// width and boundary states.
#[derive(Debug, Clone)]
pub struct AnnealingProblem {
    pub n_qubits: usize,
    pub h_i: PauliSum,
    pub h_f: PauliSum,
    pub schedule: Schedule,
    pub dt: f64,
    pub initial_state: StateVector,
    pub target_state: StateVector,
    /// Basis indices of the final ground manifold when `H_f` is diagonal.
    pub ground_manifold: Vec<usize>,
    /// Chain parameters when the problem came from a chain builder.
    pub chain: Option<SpinChainSpec>,
    pub warnings: Vec<String>,
}

impl AnnealingProblem {
    /// Number of Trotter steps `n = T/Δt`; errors unless integral.
    pub fn steps(&self) -> Result<usize> {
        let ratio = self.schedule.total_time() / self.dt;
        let rounded = ratio.round();
        if rounded < 1.0 || (ratio - rounded).abs() > 1e-9 * ratio.max(1.0) {
            return Err(Error::InvalidProblem(format!(
                "T/dt = {ratio} is not a positive integer"
            )));
        }
        Ok(rounded as usize)
    }

    /// `(1−λ)H_i + λH_f`.
    pub fn interpolate(&self, lambda: f64) -> Result<PauliSum> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::InvalidProblem(format!(
                "λ = {lambda} outside [0, 1]"
            )));
        }
        self.h_i
            .scaled(Complex64::new(1.0 - lambda, 0.0))
            .add(&self.h_f.scaled(Complex64::new(lambda, 0.0)))
    }

    /// `∂_λ H = H_f − H_i`, independent of λ.
    pub fn d_lambda_h(&self) -> PauliSum {
        self.h_f.sub(&self.h_i).expect("register sizes match")
    }

    /// Probability mass on the final ground manifold (the target bitstring
    /// for a unique diagonal ground state).
    pub fn ground_probability(&self, state: &StateVector) -> f64 {
        if self.ground_manifold.is_empty() {
            return state.fidelity(&self.target_state).unwrap_or(0.0);
        }
        self.ground_manifold
            .iter()
            .map(|&idx| state.amplitude(idx).norm_sqr())
            .sum()
    }

    /// Labels of the final ground manifold.
    pub fn ground_labels(&self) -> Vec<String> {
        self.ground_manifold
            .iter()
            .map(|&idx| basis_label(self.n_qubits, idx))
            .collect()
    }

    /// Replace the target vector (degenerate problems may prefer a
    /// particular combination).
    pub fn with_target(mut self, target: StateVector) -> Self {
        self.target_state = target;
        self
    }
}

/// Single spin, `H_i = h_x X`, `H_f = h_z Z`.
pub fn build_single_spin(h_x: f64, h_z: f64, total_time: f64, dt: f64) -> Result<AnnealingProblem> {
    if h_x == 0.0 || h_z == 0.0 {
        return Err(Error::InvalidProblem(
            "single-spin fields must be nonzero for well-defined endpoint ground states".into(),
        ));
    }
    let h_i = PauliSum::single(1, 0, PauliOp::X, h_x);
    let h_f = PauliSum::single(1, 0, PauliOp::Z, h_z);
    let initial = if h_x < 0.0 {
        StateVector::plus_state(1)
    } else {
        StateVector::minus_state(1)
    };
    let ground_idx = if h_z > 0.0 { 1 } else { 0 };
    let target = StateVector::uniform_over(1, &[ground_idx])?;
    Ok(AnnealingProblem {
        n_qubits: 1,
        h_i,
        h_f,
        schedule: Schedule::sin2(total_time)?,
        dt,
        initial_state: initial,
        target_state: target,
        ground_manifold: vec![ground_idx],
        chain: Some(SpinChainSpec::uniform(1, h_x, h_z, 0.0, Boundary::Open)),
        warnings: Vec::new(),
    })
}

/// Ising chain with per-site longitudinal fields and a ZZ coupling,
/// `H_i = h_x Σ X_j`, `H_f = Σ h_z^j Z_j + J_0 Σ Z_j Z_{j+1}`.
pub fn build_ising_chain(
    spec: &SpinChainSpec,
    total_time: f64,
    dt: f64,
) -> Result<AnnealingProblem> {
    spec.validate()?;
    if spec.n < 2 {
        return Err(Error::InvalidProblem("chain builders need n ≥ 2".into()));
    }
    let n = spec.n;
    let mut h_i = PauliSum::zero(n);
    for j in 0..n {
        h_i.add_term(PauliString::single(n, j, PauliOp::X), spec.h_x.into())?;
    }
    let mut h_f = PauliSum::zero(n);
    for j in 0..n {
        if spec.h_z[j] != 0.0 {
            h_f.add_term(PauliString::single(n, j, PauliOp::Z), spec.h_z[j].into())?;
        }
    }
    let (bonds, deduplicated) = spec.bonds();
    for &(a, b) in &bonds {
        if spec.j0 != 0.0 {
            h_f.add_term(
                PauliString::with_ops(n, &[(a, PauliOp::Z), (b, PauliOp::Z)]),
                spec.j0.into(),
            )?;
        }
    }
    let mut warnings = Vec::new();
    if deduplicated {
        warnings.push(format!(
            "periodic chain of {n} sites wraps onto an existing bond; duplicate dropped"
        ));
    }

    let initial = if spec.h_x < 0.0 {
        StateVector::plus_state(n)
    } else {
        StateVector::minus_state(n)
    };
    let manifold = diagonal_ground_manifold(spec, &bonds);
    let target = StateVector::uniform_over(n, &manifold)?;

    Ok(AnnealingProblem {
        n_qubits: n,
        h_i,
        h_f,
        schedule: Schedule::sin2(total_time)?,
        dt,
        initial_state: initial,
        target_state: target,
        ground_manifold: manifold,
        chain: Some(spec.clone()),
        warnings,
    })
}

/// Pure entangler chain, `H_f = J_0 Σ Z_j Z_{j+1}` with periodic boundary;
/// for `h_x < 0` and `J_0 < 0` this prepares `(|0…0⟩ + |1…1⟩)/√2`.
pub fn build_zz_chain(
    n: usize,
    h_x: f64,
    j0: f64,
    total_time: f64,
    dt: f64,
) -> Result<AnnealingProblem> {
    let spec = SpinChainSpec::uniform(n, h_x, 0.0, j0, Boundary::Periodic);
    build_ising_chain(&spec, total_time, dt)
}

/// Ground basis indices of the diagonal `H_f`, within 1e-9 of the minimum.
fn diagonal_ground_manifold(spec: &SpinChainSpec, bonds: &[(usize, usize)]) -> Vec<usize> {
    let n = spec.n;
    let dim = 1usize << n;
    let sign = |b: usize, j: usize| -> f64 {
        if b & (1 << (n - 1 - j)) != 0 {
            -1.0
        } else {
            1.0
        }
    };
    let mut energies = Vec::with_capacity(dim);
    for b in 0..dim {
        let mut e = 0.0;
        for j in 0..n {
            e += spec.h_z[j] * sign(b, j);
        }
        for &(a, c) in bonds {
            e += spec.j0 * sign(b, a) * sign(b, c);
        }
        energies.push(e);
    }
    let e0 = energies.iter().cloned().fold(f64::INFINITY, f64::min);
    (0..dim).filter(|&b| energies[b] - e0 <= 1e-9).collect()
}
