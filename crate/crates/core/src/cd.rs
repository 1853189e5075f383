//! Counterdiabatic drivers.
//!
//! Four constructions of the CD Hamiltonian `λ̇·A(λ)` are provided:
//!
//! - the exact single-spin form from the field cross product,
//! - a per-site local approximation built from the same form with an
//!   effective longitudinal field `h̃_z = h_z + J_0`,
//! - a per-site variational form, the exact action minimizer over the
//!   single-`σ_y` ansatz,
//! - the nested-commutator ansatz `A^(l) = i Σ_k α_k C_{2k−1}` with
//!   `C_d` the depth-`d` bracket `[H, [H, … [H, ∂_λH]]]`, where the `α_k`
//!   minimize the action `S = Tr[G²]`, `G = ∂_λH + i[A, H]`.
//!
//! The action is quadratic in the coefficients, so the minimization reduces
//! to an `l × l` normal system assembled from Hilbert–Schmidt traces. An
//! eigenbasis construction of the exact gauge potential serves as a dense
//! oracle for all of the above.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::dense::hermitian_eigen;
use crate::models::{AnnealingProblem, SpinChainSpec};
use crate::pauli::{PauliOp, PauliString, PauliSum};
use crate::{Error, Result};

/// Gap below which an eigenvalue pair is treated as degenerate by the
/// exact gauge oracle.
pub const DEGENERACY_TOL: f64 = 1e-9;

/// Relative pivot cutoff for the gram-matrix solve.
pub const GRAM_PIVOT_TOL: f64 = 1e-12;

/// Selectable CD method.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CdMethod {
    None,
    Berry,
    LocalBerry,
    LocalVariational,
    NestedCommutator(usize),
}

impl std::str::FromStr for CdMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(CdMethod::None),
            "berry" => Ok(CdMethod::Berry),
            "local-berry" => Ok(CdMethod::LocalBerry),
            "local-var" => Ok(CdMethod::LocalVariational),
            other => {
                if let Some(order) = other.strip_prefix("nc:") {
                    let l: usize = order
                        .parse()
                        .map_err(|_| Error::Config(format!("bad NC order in '{other}'")))?;
                    if l == 0 {
                        return Err(Error::Config("NC order must be ≥ 1".into()));
                    }
                    Ok(CdMethod::NestedCommutator(l))
                } else {
                    Err(Error::Config(format!(
                        "unknown cd method '{other}' (expected none, berry, local-berry, local-var or nc:<l>)"
                    )))
                }
            }
        }
    }
}

impl std::fmt::Display for CdMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CdMethod::None => write!(f, "none"),
            CdMethod::Berry => write!(f, "berry"),
            CdMethod::LocalBerry => write!(f, "local-berry"),
            CdMethod::LocalVariational => write!(f, "local-var"),
            CdMethod::NestedCommutator(l) => write!(f, "nc:{l}"),
        }
    }
}

/// A rule producing the CD Hamiltonian as a `PauliSum` at each `(λ, λ̇)`.
///
/// Every evaluation is Hermitian and vanishes when `λ̇ = 0`, so under the
/// sin² schedule the driver switches off at both endpoints.
#[derive(Debug, Clone)]
pub enum CdTerm {
    None {
        n_qubits: usize,
    },
    BerrySingle {
        h_x: f64,
        h_z: f64,
    },
    LocalBerry {
        spec: SpinChainSpec,
    },
    LocalVariational {
        spec: SpinChainSpec,
    },
    NestedCommutator {
        h_i: PauliSum,
        h_f: PauliSum,
        order: usize,
    },
}

impl CdTerm {
    pub fn method(&self) -> CdMethod {
        match self {
            CdTerm::None { .. } => CdMethod::None,
            CdTerm::BerrySingle { .. } => CdMethod::Berry,
            CdTerm::LocalBerry { .. } => CdMethod::LocalBerry,
            CdTerm::LocalVariational { .. } => CdMethod::LocalVariational,
            CdTerm::NestedCommutator { order, .. } => CdMethod::NestedCommutator(*order),
        }
    }

    pub fn n_qubits(&self) -> usize {
        match self {
            CdTerm::None { n_qubits } => *n_qubits,
            CdTerm::BerrySingle { .. } => 1,
            CdTerm::LocalBerry { spec } | CdTerm::LocalVariational { spec } => spec.n,
            CdTerm::NestedCommutator { h_i, .. } => h_i.n_qubits(),
        }
    }

    /// CD Hamiltonian at `(λ, λ̇)`.
    pub fn evaluate(&self, lambda: f64, lambda_dot: f64) -> Result<PauliSum> {
        let n = self.n_qubits();
        if lambda_dot == 0.0 {
            return Ok(PauliSum::zero(n));
        }
        match self {
            CdTerm::None { .. } => Ok(PauliSum::zero(n)),
            CdTerm::BerrySingle { h_x, h_z } => {
                let f = berry_coefficient(*h_x, *h_z, lambda, lambda_dot);
                Ok(PauliSum::single(1, 0, PauliOp::Y, f))
            }
            CdTerm::LocalBerry { spec } => {
                let mut sum = PauliSum::zero(n);
                for j in 0..spec.n {
                    let eff = spec.h_z[j] + spec.j0;
                    let f = berry_coefficient(spec.h_x, eff, lambda, lambda_dot);
                    if f != 0.0 {
                        sum.add_term(PauliString::single(n, j, PauliOp::Y), f.into())?;
                    }
                }
                Ok(sum)
            }
            CdTerm::LocalVariational { spec } => {
                let mut sum = PauliSum::zero(n);
                let (bonds, _) = spec.bonds();
                for j in 0..spec.n {
                    let bond_count = bonds.iter().filter(|&&(a, b)| a == j || b == j).count();
                    let alpha =
                        local_variational_alpha(spec.h_x, spec.h_z[j], spec.j0, bond_count, lambda);
                    let f = lambda_dot * alpha;
                    if f != 0.0 {
                        sum.add_term(PauliString::single(n, j, PauliOp::Y), f.into())?;
                    }
                }
                Ok(sum)
            }
            CdTerm::NestedCommutator { h_i, h_f, order } => {
                let h = interpolate_parts(h_i, h_f, lambda)?;
                let dh = h_f.sub(h_i)?;
                let solve = solve_variational_nc(&h, &dh, *order)?;
                let gauge = solve.gauge_operator(&h, &dh)?;
                Ok(gauge.scaled(Complex64::new(lambda_dot, 0.0)))
            }
        }
    }
}

/// Exact single-spin CD coefficient of `σ_y` for the field path
/// `h(λ) = [h_x(1−λ), 0, h_z λ]`, from `(h × ḣ)/2|h|²`.
fn berry_coefficient(h_x: f64, h_z: f64, lambda: f64, lambda_dot: f64) -> f64 {
    let denom = 2.0 * (h_x * h_x * (1.0 - lambda) * (1.0 - lambda) + h_z * h_z * lambda * lambda);
    if denom == 0.0 {
        return 0.0;
    }
    -h_x * h_z * lambda_dot / denom
}

/// Per-site variational coefficient for the single-`σ_y` ansatz on the
/// interacting chain; vanishes with `h_z^j`.
///
/// The ansatz `A = Σ_j α_j Y_j` makes the action a sum of decoupled
/// quadratics, one per site, so each coefficient has the closed form
/// `α_j = −h_x h_z^j / 2[h_x²(1−λ)² + ((h_z^j)² + b_j J_0²) λ²]`
/// with `b_j` the number of bonds touching site `j`.
fn local_variational_alpha(h_x: f64, h_z_j: f64, j0: f64, bond_count: usize, lambda: f64) -> f64 {
    if h_z_j == 0.0 {
        return 0.0;
    }
    let zz = h_z_j * h_z_j + bond_count as f64 * j0 * j0;
    let denom = 2.0 * (h_x * h_x * (1.0 - lambda) * (1.0 - lambda) + zz * lambda * lambda);
    if denom == 0.0 {
        return 0.0;
    }
    -h_x * h_z_j / denom
}

/// Exact single-spin CD driver; requires at least one nonzero field.
pub fn berry_exact_single(h_x: f64, h_z: f64) -> Result<CdTerm> {
    if h_x == 0.0 && h_z == 0.0 {
        return Err(Error::InvalidProblem(
            "berry CD needs a nonzero field (denominator vanishes)".into(),
        ));
    }
    Ok(CdTerm::BerrySingle { h_x, h_z })
}

/// Per-site CD from the single-spin form with effective field `h_z^j + J_0`.
pub fn local_berry(spec: &SpinChainSpec) -> CdTerm {
    CdTerm::LocalBerry { spec: spec.clone() }
}

/// Per-site CD from the variational single-`σ_y` ansatz.
pub fn local_variational(spec: &SpinChainSpec) -> CdTerm {
    CdTerm::LocalVariational { spec: spec.clone() }
}

/// Nested-commutator CD driver of the given order.
pub fn nc_cd_term(problem: &AnnealingProblem, order: usize) -> Result<CdTerm> {
    if order == 0 {
        return Err(Error::Config("NC order must be ≥ 1".into()));
    }
    Ok(CdTerm::NestedCommutator {
        h_i: problem.h_i.clone(),
        h_f: problem.h_f.clone(),
        order,
    })
}

/// Build the CD term selected by `method` for a problem.
pub fn cd_term_for(method: CdMethod, problem: &AnnealingProblem) -> Result<CdTerm> {
    match method {
        CdMethod::None => Ok(CdTerm::None {
            n_qubits: problem.n_qubits,
        }),
        CdMethod::Berry => {
            let spec = problem.chain.as_ref().ok_or_else(|| {
                Error::InvalidProblem("berry method needs chain parameters".into())
            })?;
            if spec.n != 1 {
                return Err(Error::InvalidProblem(
                    "berry method is exact for a single spin only; use local-berry".into(),
                ));
            }
            berry_exact_single(spec.h_x, spec.h_z[0])
        }
        CdMethod::LocalBerry => {
            let spec = problem.chain.as_ref().ok_or_else(|| {
                Error::InvalidProblem("local-berry needs chain parameters".into())
            })?;
            Ok(local_berry(spec))
        }
        CdMethod::LocalVariational => {
            let spec = problem
                .chain
                .as_ref()
                .ok_or_else(|| Error::InvalidProblem("local-var needs chain parameters".into()))?;
            Ok(local_variational(spec))
        }
        CdMethod::NestedCommutator(order) => nc_cd_term(problem, order),
    }
}

fn interpolate_parts(h_i: &PauliSum, h_f: &PauliSum, lambda: f64) -> Result<PauliSum> {
    h_i.scaled(Complex64::new(1.0 - lambda, 0.0))
        .add(&h_f.scaled(Complex64::new(lambda, 0.0)))
}

/// Record of one action minimization at fixed λ.
#[derive(Debug, Clone)]
pub struct VariationalSolve {
    pub order: usize,
    /// Gram matrix `M_{kk'} = Tr[B_k B_{k'}]` with `B_k = [H, C_{2k−1}]`.
    pub gram: DMatrix<f64>,
    /// Right-hand side `v_k = Tr[∂_λH · B_k]`.
    pub rhs: DVector<f64>,
    /// Minimizing coefficients, `M α = −v`.
    pub alphas: Vec<f64>,
    /// Action value at the minimizer.
    pub action_residual: f64,
    /// True when the gram matrix had pivots below tolerance and the
    /// minimum-norm (pseudo-inverse) solution was taken.
    pub singular: bool,
}

impl VariationalSolve {
    /// Assemble `A = i Σ_k α_k C_{2k−1}` for the Hamiltonian pair the solve
    /// was computed from.
    pub fn gauge_operator(&self, h: &PauliSum, dh: &PauliSum) -> Result<PauliSum> {
        let mut gauge = PauliSum::zero(h.n_qubits());
        let mut bracket = h.commutator(dh)?; // depth 1
        for k in 0..self.order {
            gauge = gauge.add(&bracket.scaled(Complex64::new(0.0, self.alphas[k])))?;
            if k + 1 < self.order {
                // two more brackets: depth 2k−1 → depth 2k+1
                bracket = h.commutator(&h.commutator(&bracket)?)?;
            }
        }
        Ok(gauge)
    }
}

/// Minimize the action over the order-`l` nested-commutator ansatz at one
/// point of the schedule. `h` is the interpolated Hamiltonian, `dh` its
/// λ-derivative.
pub fn solve_variational_nc(h: &PauliSum, dh: &PauliSum, order: usize) -> Result<VariationalSolve> {
    if order == 0 {
        return Err(Error::Config("NC order must be ≥ 1".into()));
    }
    // B_k = [H, C_{2k−1}]: Hermitian, even-depth brackets
    let mut odd_brackets = Vec::with_capacity(order);
    let mut bracket = h.commutator(dh)?;
    for k in 0..order {
        odd_brackets.push(bracket.clone());
        if k + 1 < order {
            bracket = h.commutator(&h.commutator(&bracket)?)?;
        }
    }
    let response: Vec<PauliSum> = odd_brackets
        .iter()
        .map(|c| h.commutator(c))
        .collect::<Result<_>>()?;

    let mut gram = DMatrix::zeros(order, order);
    let mut rhs = DVector::zeros(order);
    for k in 0..order {
        rhs[k] = dh.trace_inner_product(&response[k])?.re;
        for kk in k..order {
            let m = response[k].trace_inner_product(&response[kk])?.re;
            gram[(k, kk)] = m;
            gram[(kk, k)] = m;
        }
    }

    let (alphas, singular) = solve_spd_min_norm(&gram, &rhs.map(|x| -x));
    let alpha_vec = DVector::from_column_slice(&alphas);
    let base = dh.trace_inner_product(dh)?.re;
    let action_residual =
        base + 2.0 * rhs.dot(&alpha_vec) + (&alpha_vec.transpose() * &gram * &alpha_vec)[(0, 0)];

    Ok(VariationalSolve {
        order,
        gram,
        rhs,
        alphas,
        action_residual,
        singular,
    })
}

/// Minimum-norm solution of the SPD system `M x = b` via eigendecomposition
/// with relative cutoff [`GRAM_PIVOT_TOL`]. Returns the solution and whether
/// any pivot fell below tolerance.
fn solve_spd_min_norm(m: &DMatrix<f64>, b: &DVector<f64>) -> (Vec<f64>, bool) {
    let se = nalgebra::SymmetricEigen::new(m.clone());
    let max_eig = se
        .eigenvalues
        .iter()
        .cloned()
        .fold(0.0f64, |a, x| a.max(x.abs()));
    let cutoff = GRAM_PIVOT_TOL * max_eig.max(f64::MIN_POSITIVE);
    let mut singular = false;
    let mut x = DVector::zeros(b.len());
    for i in 0..b.len() {
        let e = se.eigenvalues[i];
        if e.abs() <= cutoff {
            singular = true;
            continue;
        }
        let v = se.eigenvectors.column(i);
        x += v * (v.dot(b) / e);
    }
    (x.as_slice().to_vec(), singular)
}

/// Solve the NC coefficients for a problem at one λ.
pub fn variational_nc(
    problem: &AnnealingProblem,
    order: usize,
    lambda: f64,
) -> Result<VariationalSolve> {
    let h = problem.interpolate(lambda)?;
    let dh = problem.d_lambda_h();
    solve_variational_nc(&h, &dh, order)
}

/// CSV body `lambda,alpha_1..alpha_l,action_residual` of solve records
/// across a λ grid.
pub fn solve_records_csv(
    problem: &AnnealingProblem,
    order: usize,
    lambdas: &[f64],
) -> Result<String> {
    let mut out = String::from("lambda");
    for k in 1..=order {
        out.push_str(&format!(",alpha_{k}"));
    }
    out.push_str(",action_residual\n");
    for &lambda in lambdas {
        let solve = variational_nc(problem, order, lambda)?;
        out.push_str(&format!("{lambda:.12}"));
        for alpha in &solve.alphas {
            out.push_str(&format!(",{alpha:.12}"));
        }
        out.push_str(&format!(",{:.12}\n", solve.action_residual));
    }
    Ok(out)
}

/// Gauge operator `A(λ)` for a problem, solved at one λ.
pub fn nc_gauge_operator(
    problem: &AnnealingProblem,
    order: usize,
    lambda: f64,
) -> Result<PauliSum> {
    let h = problem.interpolate(lambda)?;
    let dh = problem.d_lambda_h();
    let solve = solve_variational_nc(&h, &dh, order)?;
    solve.gauge_operator(&h, &dh)
}

/// Exact gauge potential in the computational basis, with degenerate pairs
/// zeroed and flagged.
#[derive(Debug, Clone)]
pub struct GaugeOracle {
    pub matrix: DMatrix<Complex64>,
    /// Eigenvalue index pairs whose gap fell below [`DEGENERACY_TOL`].
    pub degenerate_pairs: Vec<(usize, usize)>,
}

/// Dense exact gauge potential `⟨m|A|n⟩ = i⟨m|∂_λH|n⟩ / (E_n − E_m)`
/// built in the instantaneous eigenbasis of `H(λ)`.
pub fn exact_gauge_oracle(problem: &AnnealingProblem, lambda: f64) -> Result<GaugeOracle> {
    if problem.n_qubits > 8 {
        return Err(Error::RegisterTooLarge {
            n: problem.n_qubits,
            limit: 8,
        });
    }
    let h = problem.interpolate(lambda)?.to_dense()?;
    let dh = problem.d_lambda_h().to_dense()?;
    let (energies, vectors) = hermitian_eigen(&h);
    let dim = energies.len();
    let in_eigenbasis = vectors.adjoint() * dh * &vectors;
    let mut a = DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
    let mut degenerate = Vec::new();
    for m in 0..dim {
        for n in 0..dim {
            if m == n {
                continue;
            }
            let gap = energies[n] - energies[m];
            if gap.abs() < DEGENERACY_TOL {
                if m < n {
                    degenerate.push((m, n));
                }
                continue;
            }
            a[(m, n)] = Complex64::new(0.0, 1.0) * in_eigenbasis[(m, n)] / gap;
        }
    }
    Ok(GaugeOracle {
        matrix: &vectors * a * vectors.adjoint(),
        degenerate_pairs: degenerate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{build_ising_chain, build_single_spin, build_zz_chain, Boundary};

    const FRAC_PI_2: f64 = std::f64::consts::FRAC_PI_2;

    fn y_coeff(sum: &PauliSum, n: usize, site: usize) -> f64 {
        sum.coefficient(&PauliString::single(n, site, PauliOp::Y))
            .re
    }

    #[test]
    fn berry_single_boundary_and_midpoint() {
        let cd = berry_exact_single(-1.0, 1.0).unwrap();
        let schedule = crate::models::Schedule::sin2(1.0).unwrap();
        // λ̇ vanishes at both endpoints
        assert!(cd
            .evaluate(schedule.lambda(0.0), schedule.lambda_dot(0.0))
            .unwrap()
            .is_zero());
        assert!(cd
            .evaluate(schedule.lambda(1.0), schedule.lambda_dot(1.0))
            .unwrap()
            .is_zero());
        // t = 0.5: λ = 1/2, λ̇ = π/2, denominator 1 → |F| = π/2.
        // The driver must rotate |+⟩ toward |1⟩, which fixes the sign to +π/2
        // for h_x = −1, h_z = 1 (cross-product form).
        let mid = cd
            .evaluate(schedule.lambda(0.5), schedule.lambda_dot(0.5))
            .unwrap();
        assert!((y_coeff(&mid, 1, 0) - FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn berry_single_rejects_zero_fields() {
        assert!(berry_exact_single(0.0, 0.0).is_err());
    }

    #[test]
    fn local_berry_reduces_to_single_at_zero_coupling() {
        let spec = SpinChainSpec::uniform(2, -1.0, 1.0, 0.0, Boundary::Open);
        let local = local_berry(&spec);
        let single = berry_exact_single(-1.0, 1.0).unwrap();
        for lambda in [0.1, 0.4, 0.8] {
            let l = local.evaluate(lambda, 1.3).unwrap();
            let s = single.evaluate(lambda, 1.3).unwrap();
            assert!((y_coeff(&l, 2, 0) - y_coeff(&s, 1, 0)).abs() < 1e-13);
            assert!((y_coeff(&l, 2, 1) - y_coeff(&s, 1, 0)).abs() < 1e-13);
        }
    }

    #[test]
    fn local_berry_effective_field_magnitude() {
        // n=2, h_x=−1, h_z=1, J0=−0.1 at t=0.5 of T=1: effective field 0.9,
        // |F_j| = (0.9·π/2)/(2[0.25 + 0.81·0.25]) ≈ 1.5621
        let spec = SpinChainSpec::uniform(2, -1.0, 1.0, -0.1, Boundary::Open);
        let cd = local_berry(&spec);
        let out = cd.evaluate(0.5, FRAC_PI_2).unwrap();
        let expected = 0.9 * FRAC_PI_2 / (2.0 * (0.25 + 0.81 * 0.25));
        for site in 0..2 {
            assert!((y_coeff(&out, 2, site) - expected).abs() < 1e-4);
        }
    }

    #[test]
    fn local_terms_vanish_without_longitudinal_field() {
        let spec = SpinChainSpec::uniform(3, -1.0, 0.0, -0.05, Boundary::Periodic);
        let var = local_variational(&spec);
        assert!(var.evaluate(0.5, 1.0).unwrap().is_zero());
        // Berry-local coefficients shrink with J0 → 0
        let small = SpinChainSpec::uniform(3, -1.0, 0.0, -1e-6, Boundary::Periodic);
        let berry = local_berry(&small);
        let out = berry.evaluate(0.5, 1.0).unwrap();
        assert!(y_coeff(&out, 3, 0).abs() < 1e-5);
    }

    #[test]
    fn local_variational_matches_local_berry_when_decoupled() {
        let spec = SpinChainSpec::uniform(2, -1.0, 1.0, 0.0, Boundary::Open);
        let var = local_variational(&spec);
        let berry = local_berry(&spec);
        for lambda in [0.0, 0.3, 0.6, 1.0] {
            let v = var.evaluate(lambda, 0.9).unwrap();
            let b = berry.evaluate(lambda, 0.9).unwrap();
            for site in 0..2 {
                assert!((y_coeff(&v, 2, site) - y_coeff(&b, 2, site)).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn local_variational_matches_numeric_action_minimizer() {
        // assemble the action for A = Σ_j α_j Y_j directly and minimize;
        // the per-site closed form must agree
        let spec = SpinChainSpec {
            n: 3,
            h_x: -1.0,
            h_z: vec![1.0, 0.7, 1.3],
            j0: -0.6,
            boundary: Boundary::Open,
        };
        let problem = crate::models::build_ising_chain(&spec, 1.0, 0.2).unwrap();
        let var = local_variational(&spec);
        for lambda in [0.15, 0.5, 0.85] {
            let h = problem.interpolate(lambda).unwrap();
            let dh = problem.d_lambda_h();
            let responses: Vec<PauliSum> = (0..3)
                .map(|j| {
                    let y = PauliSum::single(3, j, PauliOp::Y, 1.0);
                    y.commutator(&h).unwrap().scaled(Complex64::new(0.0, 1.0))
                })
                .collect();
            let mut gram = DMatrix::zeros(3, 3);
            let mut rhs = DVector::zeros(3);
            for j in 0..3 {
                rhs[j] = dh.trace_inner_product(&responses[j]).unwrap().re;
                for k in 0..3 {
                    gram[(j, k)] = responses[j].trace_inner_product(&responses[k]).unwrap().re;
                }
            }
            let alphas = gram.lu().solve(&(-&rhs)).unwrap();
            let evaluated = var.evaluate(lambda, 1.0).unwrap();
            for j in 0..3 {
                let from_formula = evaluated
                    .coefficient(&PauliString::single(3, j, PauliOp::Y))
                    .re;
                assert!(
                    (from_formula - alphas[j]).abs() < 1e-11,
                    "site {j} at λ = {lambda}: {from_formula} vs {}",
                    alphas[j]
                );
            }
        }
    }

    #[test]
    fn local_variational_zero_lambda_magnitude() {
        // |α_j(0)| = |h_z/(2h_x)| = 0.5 for h_x=−1, h_z=1; the sign follows
        // the cross-product convention (positive here).
        let spec = SpinChainSpec::uniform(2, -1.0, 1.0, -0.1, Boundary::Open);
        let var = local_variational(&spec);
        let out = var.evaluate(0.0, 1.0).unwrap();
        assert!((y_coeff(&out, 2, 0) - 0.5).abs() < 1e-13);
    }

    #[test]
    fn nc_single_spin_order_one_is_exact() {
        let problem = build_single_spin(-1.0, 1.0, 1.0, 0.2).unwrap();
        let exact = berry_exact_single(-1.0, 1.0).unwrap();
        let nc = nc_cd_term(&problem, 1).unwrap();
        for lambda in [0.0, 0.1, 0.35, 0.5, 0.77, 1.0] {
            let a = nc.evaluate(lambda, 1.0).unwrap();
            let b = exact.evaluate(lambda, 1.0).unwrap();
            assert!(
                (y_coeff(&a, 1, 0) - y_coeff(&b, 1, 0)).abs() < 1e-12,
                "λ = {lambda}"
            );
        }
    }

    #[test]
    fn nc_two_spin_zz_closed_form() {
        // Pair coefficient of the solved gauge operator for the two-spin
        // entangler: −J0·h_x / 2[J0²λ² + 4(1−λ)²h_x²] on Y₁Z₂ and Z₁Y₂.
        let (h_x, j0) = (-1.0, -1.0);
        let problem = build_zz_chain(2, h_x, j0, 1.0, 0.2).unwrap();
        for lambda in [0.0, 0.2, 0.5, 0.8, 1.0] {
            let gauge = nc_gauge_operator(&problem, 1, lambda).unwrap();
            let expected = -j0 * h_x
                / (2.0
                    * (j0 * j0 * lambda * lambda
                        + 4.0 * (1.0 - lambda) * (1.0 - lambda) * h_x * h_x));
            let yz = gauge.coefficient(&PauliString::parse("YZ").unwrap()).re;
            let zy = gauge.coefficient(&PauliString::parse("ZY").unwrap()).re;
            assert!((yz - expected).abs() < 1e-12, "λ = {lambda}");
            assert!((zy - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn nc_three_spin_open_chain_closed_form() {
        // Open three-site entangler: pair coefficient
        // −J0·h_x / [5J0²λ² + 8(1−λ)²h_x²].
        let (h_x, j0) = (-1.0, -1.0);
        let spec = SpinChainSpec::uniform(3, h_x, 0.0, j0, Boundary::Open);
        let problem = build_ising_chain(&spec, 1.0, 0.2).unwrap();
        for lambda in [0.0, 0.3, 0.6, 0.9] {
            let gauge = nc_gauge_operator(&problem, 1, lambda).unwrap();
            let expected = -j0 * h_x
                / (5.0 * j0 * j0 * lambda * lambda
                    + 8.0 * (1.0 - lambda) * (1.0 - lambda) * h_x * h_x);
            let yz = gauge.coefficient(&PauliString::parse("YZI").unwrap()).re;
            assert!((yz - expected).abs() < 1e-12, "λ = {lambda}");
        }
    }

    #[test]
    fn nc_term_content_on_nonintegrable_chain() {
        // Y₁, Y₂, Y₁Z₂, Z₁Y₂ content with the h_z : J0 coefficient ratio
        let spec = SpinChainSpec::uniform(2, -1.0, 1.0, -0.1, Boundary::Open);
        let problem = build_ising_chain(&spec, 1.0, 0.2).unwrap();
        let gauge = nc_gauge_operator(&problem, 1, 0.4).unwrap();
        let y1 = gauge.coefficient(&PauliString::parse("YI").unwrap()).re;
        let y2 = gauge.coefficient(&PauliString::parse("IY").unwrap()).re;
        let yz = gauge.coefficient(&PauliString::parse("YZ").unwrap()).re;
        let zy = gauge.coefficient(&PauliString::parse("ZY").unwrap()).re;
        assert!((y1 - y2).abs() < 1e-13);
        assert!((yz - zy).abs() < 1e-13);
        assert!((yz / y1 - (-0.1) / 1.0).abs() < 1e-12);
    }

    #[test]
    fn nc_two_spin_higher_order_collapses() {
        // For two spins the depth-3 bracket is proportional to depth-1, so
        // the order-2 gauge operator equals the order-1 operator.
        let problem = build_zz_chain(2, -1.0, -1.0, 1.0, 0.2).unwrap();
        for lambda in [0.15, 0.5, 0.85] {
            let g1 = nc_gauge_operator(&problem, 1, lambda).unwrap();
            let g2 = nc_gauge_operator(&problem, 2, lambda).unwrap();
            let diff = g1.sub(&g2).unwrap();
            let norm = diff.trace_inner_product(&diff).unwrap().re;
            assert!(norm < 1e-18, "λ = {lambda}: ‖Δ‖² = {norm}");
        }
    }

    #[test]
    fn solved_action_is_a_local_minimum() {
        let spec = SpinChainSpec::uniform(2, -1.0, 1.0, -0.1, Boundary::Open);
        let problem = build_ising_chain(&spec, 1.0, 0.2).unwrap();
        let h = problem.interpolate(0.5).unwrap();
        let dh = problem.d_lambda_h();
        let solve = solve_variational_nc(&h, &dh, 2).unwrap();
        assert!(!solve.singular);
        let action = |alphas: &[f64]| -> f64 {
            let a = DVector::from_column_slice(alphas);
            let base = dh.trace_inner_product(&dh).unwrap().re;
            base + 2.0 * solve.rhs.dot(&a) + (a.transpose() * &solve.gram * &a)[(0, 0)]
        };
        let best = action(&solve.alphas);
        assert!((best - solve.action_residual).abs() < 1e-9);
        let mut rng_state = 0x9e3779b97f4a7c15u64;
        let mut next = || {
            rng_state = rng_state.wrapping_mul(6364136223846793005).wrapping_add(1);
            ((rng_state >> 32) as f64 / u32::MAX as f64 - 0.5) * 0.2
        };
        for _ in 0..100 {
            let perturbed: Vec<f64> = solve.alphas.iter().map(|a| a + next()).collect();
            assert!(action(&perturbed) >= best - 1e-12);
        }
    }

    #[test]
    fn every_method_evaluates_hermitian() {
        let spec = SpinChainSpec::uniform(2, -1.0, 1.0, -0.1, Boundary::Open);
        let problem = build_ising_chain(&spec, 1.0, 0.2).unwrap();
        let terms = [
            cd_term_for(CdMethod::LocalBerry, &problem).unwrap(),
            cd_term_for(CdMethod::LocalVariational, &problem).unwrap(),
            cd_term_for(CdMethod::NestedCommutator(2), &problem).unwrap(),
        ];
        for cd in &terms {
            let out = cd.evaluate(0.33, 0.7).unwrap();
            assert!(out.is_hermitian(1e-12));
        }
    }

    #[test]
    fn oracle_matches_single_spin_cross_product() {
        let problem = build_single_spin(-1.0, 1.0, 1.0, 0.2).unwrap();
        let cd = berry_exact_single(-1.0, 1.0).unwrap();
        for lambda in [0.1, 0.35, 0.5, 0.9] {
            let oracle = exact_gauge_oracle(&problem, lambda).unwrap();
            assert!(oracle.degenerate_pairs.is_empty());
            // divide out λ̇ = 1
            let sym = cd.evaluate(lambda, 1.0).unwrap().to_dense().unwrap();
            assert!((oracle.matrix.clone() - sym).norm() < 1e-10, "λ = {lambda}");
        }
    }

    #[test]
    fn oracle_zero_when_derivative_commutes() {
        // h_x = 0 path: H(λ) = λ h_z Z, ∂λH ∝ Z commutes with H
        let mut problem = build_single_spin(-1.0, 1.0, 1.0, 0.2).unwrap();
        problem.h_i = PauliSum::single(1, 0, PauliOp::Z, 0.5);
        problem.h_f = PauliSum::single(1, 0, PauliOp::Z, 1.5);
        let oracle = exact_gauge_oracle(&problem, 0.4).unwrap();
        assert!(oracle.matrix.norm() < 1e-12);
    }

    #[test]
    fn oracle_matches_nc_on_two_spin_entangler() {
        let problem = build_zz_chain(2, -1.0, -1.0, 1.0, 0.2).unwrap();
        for lambda in [0.2, 0.5, 0.8] {
            let oracle = exact_gauge_oracle(&problem, lambda).unwrap();
            let gauge = nc_gauge_operator(&problem, 1, lambda)
                .unwrap()
                .to_dense()
                .unwrap();
            assert!(
                (oracle.matrix.clone() - gauge).norm() < 1e-10,
                "λ = {lambda}"
            );
        }
    }

    #[test]
    fn solve_records_csv_shape() {
        let problem = build_zz_chain(2, -1.0, -1.0, 1.0, 0.2).unwrap();
        let csv = solve_records_csv(&problem, 2, &[0.0, 0.5, 1.0]).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "lambda,alpha_1,alpha_2,action_residual");
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[1].split(',').count(), 4);
        // residual is the action value at the minimizer, hence nonnegative
        for line in &lines[1..] {
            let residual: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
            assert!(residual >= -1e-9);
        }
    }

    #[test]
    fn method_name_round_trip() {
        for text in ["none", "berry", "local-berry", "local-var", "nc:3"] {
            let m: CdMethod = text.parse().unwrap();
            assert_eq!(m.to_string(), text);
        }
        assert!("nc:0".parse::<CdMethod>().is_err());
        assert!("exact".parse::<CdMethod>().is_err());
    }
}
