//! Cyclic evolutions: stepping under time-dependent Hamiltonians,
//! eigenstates of the cycle unitary with their total phases, sampled
//! trajectories, and measurement-sequence loops.

use crate::error::{Error, Result};
use crate::linalg::{
    adjoint, eig_hermitian, max_abs, propagator, CMatrix, CVector, HermitianMatrix, UnitaryMatrix,
    C64,
};
use crate::states::{DiscreteLoop, Frame, StateVector};

/// Eigenphase spacing below which a cycle unitary is flagged degenerate.
pub const EIGENPHASE_DEGENERACY: f64 = 1e-8;
/// Per-column residual allowed on U·v = e^{iα}·v.
pub const CYCLIC_RESIDUAL_TOL: f64 = 1e-9;

/// A map t ↦ H(t). Samplers must be deterministic in t and callable from
/// multiple threads.
pub trait HamiltonianSampler: Sync {
    fn dim(&self) -> usize;
    fn sample(&self, t: f64) -> HermitianMatrix;
}

/// Time-independent Hamiltonian.
pub struct ConstantHamiltonian(pub HermitianMatrix);

impl HamiltonianSampler for ConstantHamiltonian {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn sample(&self, _t: f64) -> HermitianMatrix {
        self.0.clone()
    }
}

/// Sampler from a closure plus its dimension.
pub struct FnSampler<F: Fn(f64) -> HermitianMatrix + Sync> {
    dim: usize,
    f: F,
}

impl<F: Fn(f64) -> HermitianMatrix + Sync> FnSampler<F> {
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f }
    }
}

impl<F: Fn(f64) -> HermitianMatrix + Sync> HamiltonianSampler for FnSampler<F> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn sample(&self, t: f64) -> HermitianMatrix {
        (self.f)(t)
    }
}

fn check_step_args(duration: f64, steps: usize) -> Result<()> {
    if steps == 0 {
        return Err(Error::BadInput("steps must be at least 1".into()));
    }
    if !duration.is_finite() || duration < 0.0 {
        return Err(Error::BadInput(format!(
            "duration must be finite and non-negative, got {duration}"
        )));
    }
    Ok(())
}

/// Ordered product of midpoint-rule step propagators
/// Π_k exp(−i·H(t_k + Δ/2)·Δ), later times applied on the left.
///
/// Exact for constant Hamiltonians; second-order accurate otherwise.
pub fn evolve(h: &dyn HamiltonianSampler, duration: f64, steps: usize) -> Result<UnitaryMatrix> {
    check_step_args(duration, steps)?;
    let dt = duration / steps as f64;
    let mut u = CMatrix::eye(h.dim());
    for k in 0..steps {
        let mid = (k as f64 + 0.5) * dt;
        let step = propagator(&h.sample(mid), dt)?;
        u = step.entries().dot(&u);
    }
    UnitaryMatrix::new(u)
}

/// Eigenstates of a cycle unitary and their total phases α_j ∈ (−π, π].
#[derive(Debug, Clone)]
pub struct CyclicSet {
    /// Orthonormal eigenframe of U, ordered by ascending eigenphase.
    pub frame: Frame,
    /// Total phases: U|φ_j⟩ = e^{iα_j}|φ_j⟩.
    pub alphas: Vec<f64>,
    /// Set when two eigenphases are circularly closer than
    /// [`EIGENPHASE_DEGENERACY`]; the frame is then one arbitrary choice.
    pub degenerate: bool,
}

/// Eigendecomposition of a unitary via its commuting Hermitian parts.
///
/// Diagonalizes H₊ = (U+U†)/2, then within each eigenvalue cluster of H₊
/// diagonalizes the restriction of H₋ = (U−U†)/(2i); the eigenphase is
/// recovered per column from ⟨v|U|v⟩.
pub fn cyclic_states(u: &UnitaryMatrix) -> Result<CyclicSet> {
    let n = u.dim();
    let ua = adjoint(u.entries());
    let hplus = HermitianMatrix::new((u.entries() + &ua).mapv(|z| 0.5 * z))?;
    let hminus = HermitianMatrix::new((u.entries() - &ua).mapv(|z| z * C64::new(0.0, -0.5)))?;
    let es = eig_hermitian(&hplus)?;
    let mut vectors = es.vectors().clone();

    // Cluster nearly equal cos-values; H₋ restricted to each cluster's span
    // is Hermitian and splits the remaining sign ambiguity of the phase.
    let cluster_tol = 1e-8;
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && es.values[end] - es.values[end - 1] < cluster_tol {
            end += 1;
        }
        let width = end - start;
        if width > 1 {
            let block = vectors.slice(ndarray::s![.., start..end]).to_owned();
            let restricted = adjoint(&block).dot(hminus.entries()).dot(&block);
            let sub = eig_hermitian(&HermitianMatrix::new(restricted)?)?;
            let rotated = block.dot(sub.vectors());
            vectors
                .slice_mut(ndarray::s![.., start..end])
                .assign(&rotated);
        }
        start = end;
    }

    // Per-column phase and residual check.
    let mut entries: Vec<(f64, CVector)> = Vec::with_capacity(n);
    for j in 0..n {
        let v = vectors.column(j).to_owned();
        let uv = u.apply_vec(&v)?;
        let lambda: C64 = v.iter().zip(uv.iter()).map(|(a, b)| a.conj() * b).sum();
        let residual = max_abs(
            &CMatrix::from_shape_vec(
                (n, 1),
                uv.iter()
                    .zip(v.iter())
                    .map(|(x, y)| x - lambda * y)
                    .collect(),
            )
            .expect("column shape"),
        );
        if residual > CYCLIC_RESIDUAL_TOL {
            return Err(Error::NoConvergence {
                sweeps: 0,
                residual,
            });
        }
        entries.push((lambda.arg(), v));
    }
    entries.sort_by(|a, b| a.0.total_cmp(&b.0));

    let alphas: Vec<f64> = entries.iter().map(|(a, _)| *a).collect();
    let mut sorted = CMatrix::zeros((n, n));
    for (j, (_, v)) in entries.iter().enumerate() {
        for i in 0..n {
            sorted[(i, j)] = v[i];
        }
    }
    crate::linalg::gauge_fix(&mut sorted);

    let mut degenerate = false;
    for j in 0..n {
        let next = (j + 1) % n;
        let mut gap = (alphas[next] - alphas[j]).abs();
        if next == 0 {
            gap = (alphas[0] + 2.0 * std::f64::consts::PI - alphas[n - 1]).abs();
        }
        if n > 1 && gap < EIGENPHASE_DEGENERACY {
            degenerate = true;
        }
    }

    Ok(CyclicSet {
        frame: Frame::from_matrix_columns(&sorted)?,
        alphas,
        degenerate,
    })
}

/// Time-sampled states of one evolution plus the instantaneous energies
/// ⟨ψ(t_k)|H(t_k)|ψ(t_k)⟩.
#[derive(Debug, Clone)]
pub struct Trajectory {
    times: Vec<f64>,
    states: Vec<StateVector>,
    energies: Vec<f64>,
}

impl Trajectory {
    pub fn new(times: Vec<f64>, states: Vec<StateVector>, energies: Vec<f64>) -> Result<Self> {
        if times.len() != states.len() || times.len() != energies.len() {
            return Err(Error::BadInput(
                "times, states and energies must have equal length".into(),
            ));
        }
        if times.len() < 2 {
            return Err(Error::BadInput(
                "a trajectory needs at least two samples".into(),
            ));
        }
        if times[0] != 0.0 {
            return Err(Error::BadInput("trajectory must start at t = 0".into()));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::BadInput("times must be strictly increasing".into()));
        }
        Ok(Self {
            times,
            states,
            energies,
        })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[StateVector] {
        &self.states
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn steps(&self) -> usize {
        self.times.len() - 1
    }
}

/// Incremental evolution of `psi0`: one midpoint step propagator per sample.
pub fn trajectory(
    h: &dyn HamiltonianSampler,
    psi0: &StateVector,
    duration: f64,
    steps: usize,
) -> Result<Trajectory> {
    check_step_args(duration, steps)?;
    if psi0.dim() != h.dim() {
        return Err(Error::DimensionMismatch(h.dim(), psi0.dim()));
    }
    let dt = duration / steps as f64;
    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    let mut energies = Vec::with_capacity(steps + 1);

    let mut psi = psi0.clone();
    times.push(0.0);
    energies.push(h.sample(0.0).expectation(psi.amps())?);
    states.push(psi.clone());

    for k in 0..steps {
        let mid = (k as f64 + 0.5) * dt;
        let step = propagator(&h.sample(mid), dt)?;
        psi = step.apply(&psi)?;
        let t = (k + 1) as f64 * dt;
        times.push(t);
        energies.push(h.sample(t).expectation(psi.amps())?);
        states.push(psi.clone());
    }
    Trajectory::new(times, states, energies)
}

/// Loop of states visited by a sequence of complete projective measurements.
pub fn measurement_loop(projector_states: &[StateVector]) -> Result<DiscreteLoop> {
    DiscreteLoop::new(projector_states.to_vec())
}
