//! Built-in scenario generators: Pauli and spin operators, seeded random
//! Hermitian matrices and states, the rotating-field qubit, Bloch and
//! random frame families, radial spin fields and the octant loop.
//!
//! Randomness always flows through a caller-seeded ChaCha8 generator so a
//! scenario is reproducible from its (kind, seed) pair.

use ndarray::Array1;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::curvature::{eigenframe_family, FrameFamily};
use crate::evolution::HamiltonianSampler;
use crate::linalg::{adjoint, propagator, CMatrix, HermitianMatrix, C64};
use crate::states::{bloch_frame, DiscreteLoop, Frame, StateVector};

use std::f64::consts::{FRAC_1_SQRT_2, PI};

/// Name of the random generator echoed in reports.
pub const GENERATOR_NAME: &str = "chacha8";

pub fn pauli_x() -> HermitianMatrix {
    let m = CMatrix::from_shape_vec(
        (2, 2),
        vec![
            C64::new(0.0, 0.0),
            C64::new(1.0, 0.0),
            C64::new(1.0, 0.0),
            C64::new(0.0, 0.0),
        ],
    )
    .expect("2x2 shape");
    HermitianMatrix::new(m).expect("Hermitian")
}

pub fn pauli_y() -> HermitianMatrix {
    let m = CMatrix::from_shape_vec(
        (2, 2),
        vec![
            C64::new(0.0, 0.0),
            C64::new(0.0, -1.0),
            C64::new(0.0, 1.0),
            C64::new(0.0, 0.0),
        ],
    )
    .expect("2x2 shape");
    HermitianMatrix::new(m).expect("Hermitian")
}

pub fn pauli_z() -> HermitianMatrix {
    HermitianMatrix::diagonal(&[1.0, -1.0])
}

/// Spin operators (S_x, S_y, S_z) for spin j = (dim − 1)/2 in the usual
/// |j, m⟩ basis ordered m = j … −j.
pub fn spin_operators(dim: usize) -> [HermitianMatrix; 3] {
    assert!(dim >= 2, "spin operators need dim >= 2");
    let j = (dim as f64 - 1.0) / 2.0;
    let m_of = |idx: usize| j - idx as f64;
    let mut sx = CMatrix::zeros((dim, dim));
    let mut sy = CMatrix::zeros((dim, dim));
    let mut sz = CMatrix::zeros((dim, dim));
    for idx in 0..dim {
        let m = m_of(idx);
        sz[(idx, idx)] = C64::new(m, 0.0);
        if idx + 1 < dim {
            // ⟨j, m | S_+ | j, m−1⟩ with m−1 at row idx+1
            let amp = 0.5 * (j * (j + 1.0) - m * (m - 1.0)).sqrt();
            sx[(idx, idx + 1)] = C64::new(amp, 0.0);
            sx[(idx + 1, idx)] = C64::new(amp, 0.0);
            sy[(idx, idx + 1)] = C64::new(0.0, -amp);
            sy[(idx + 1, idx)] = C64::new(0.0, amp);
        }
    }
    [
        HermitianMatrix::new(sx).expect("Hermitian"),
        HermitianMatrix::new(sy).expect("Hermitian"),
        HermitianMatrix::new(sz).expect("Hermitian"),
    ]
}

/// Random Hermitian matrix (G + G†)/2 with independent standard complex
/// normal entries of G.
pub fn random_hermitian(dim: usize, rng: &mut ChaCha8Rng) -> HermitianMatrix {
    let g = CMatrix::from_shape_fn((dim, dim), |_| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re, im) * FRAC_1_SQRT_2
    });
    let h = (&g + &adjoint(&g)).mapv(|z| 0.5 * z);
    HermitianMatrix::new(h).expect("Hermitian by construction")
}

/// Random normalized state with complex Gaussian amplitudes.
pub fn random_state(dim: usize, rng: &mut ChaCha8Rng) -> StateVector {
    loop {
        let amps = Array1::from_shape_fn(dim, |_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            C64::new(re, im)
        });
        if let Ok(s) = StateVector::normalized(amps) {
            return s;
        }
    }
}

/// Driven qubit H(t) = (ω₀/2)(σ_x cos ωt + σ_y sin ωt).
pub struct RotatingField {
    pub omega0: f64,
    pub omega: f64,
}

impl HamiltonianSampler for RotatingField {
    fn dim(&self) -> usize {
        2
    }

    fn sample(&self, t: f64) -> HermitianMatrix {
        let (s, c) = (self.omega * t).sin_cos();
        HermitianMatrix::linear_combination(&[
            (self.omega0 / 2.0 * c, &pauli_x()),
            (self.omega0 / 2.0 * s, &pauli_y()),
        ])
        .expect("qubit combination")
    }
}

pub fn rotating_field(omega0: f64, omega: f64) -> RotatingField {
    RotatingField { omega0, omega }
}

/// Bloch frames on an open band around the sphere:
/// θ over n_theta nodes in [0.1, π − 0.1], φ seam-inclusive over [0, 2π]
/// with n_phi distinct azimuths. Periodic along φ.
pub fn bloch_family(n_theta: usize, n_phi: usize) -> FrameFamily {
    assert!(n_theta >= 2 && n_phi >= 2);
    let thetas: Vec<f64> = (0..n_theta)
        .map(|i| 0.1 + (PI - 0.2) * i as f64 / (n_theta - 1) as f64)
        .collect();
    let phis: Vec<f64> = (0..=n_phi)
        .map(|k| 2.0 * PI * k as f64 / n_phi as f64)
        .collect();
    let mut frames = Vec::with_capacity(n_theta * (n_phi + 1));
    for &theta in &thetas {
        for (k, &phi) in phis.iter().enumerate() {
            // clone the seam column so periodic links cancel exactly
            frames.push(bloch_frame(theta, if k == n_phi { 0.0 } else { phi }));
        }
    }
    FrameFamily::new(thetas, phis, frames, (false, true)).expect("valid Bloch family")
}

/// Smooth random frame family over [0, 1]²: columns of
/// exp(−i·a·G₁)·exp(−i·b·G₂) with seeded random Hermitian generators.
pub fn random_frame_family(dim: usize, seed: u64, n_a: usize, n_b: usize) -> FrameFamily {
    use rand::SeedableRng;
    assert!(n_a >= 2 && n_b >= 2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g1 = random_hermitian(dim, &mut rng).scaled(0.75);
    let g2 = random_hermitian(dim, &mut rng).scaled(0.75);
    let a: Vec<f64> = (0..n_a).map(|i| i as f64 / (n_a - 1) as f64).collect();
    let b: Vec<f64> = (0..n_b).map(|k| k as f64 / (n_b - 1) as f64).collect();
    let ua: Vec<_> = a
        .iter()
        .map(|&x| propagator(&g1, x).expect("propagator"))
        .collect();
    let ub: Vec<_> = b
        .iter()
        .map(|&y| propagator(&g2, y).expect("propagator"))
        .collect();
    let mut frames = Vec::with_capacity(n_a * n_b);
    for ua_i in &ua {
        for ub_k in &ub {
            let m = ua_i.entries().dot(ub_k.entries());
            frames.push(Frame::from_matrix_columns(&m).expect("unitary columns"));
        }
    }
    FrameFamily::new(a, b, frames, (false, false)).expect("valid random family")
}

/// Radial spin field H(R) = R·S for spin j = (dim − 1)/2, as a node map
/// for sphere meshes.
pub fn radial_spin_field(dim: usize) -> impl Fn([f64; 3]) -> HermitianMatrix + Sync {
    let [sx, sy, sz] = spin_operators(dim);
    move |r: [f64; 3]| {
        HermitianMatrix::linear_combination(&[(r[0], &sx), (r[1], &sy), (r[2], &sz)])
            .expect("spin combination")
    }
}

/// Eigenframe family of a radial spin field over a full sphere.
pub fn spin_monopole_family(
    dim: usize,
    n_theta: usize,
    n_phi: usize,
    radius: f64,
) -> crate::error::Result<FrameFamily> {
    crate::curvature::sphere_eigenframe_family(n_theta, n_phi, radius, radial_spin_field(dim))
}

/// Eigenframe family of a seeded random two-parameter Hamiltonian patch
/// H(a, b) = H₀ + cos(a)·G₁ + sin(b)·G₂.
pub fn random_eigenframe_family(
    dim: usize,
    seed: u64,
    n_a: usize,
    n_b: usize,
) -> crate::error::Result<FrameFamily> {
    use rand::SeedableRng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h0 = random_hermitian(dim, &mut rng).scaled(3.0);
    let g1 = random_hermitian(dim, &mut rng);
    let g2 = random_hermitian(dim, &mut rng);
    let a: Vec<f64> = (0..n_a).map(|i| i as f64 / (n_a - 1) as f64).collect();
    let b: Vec<f64> = (0..n_b).map(|k| k as f64 / (n_b - 1) as f64).collect();
    eigenframe_family(a, b, (false, false), move |x, y| {
        HermitianMatrix::linear_combination(&[(1.0, &h0), (x.cos(), &g1), (y.sin(), &g2)])
            .expect("combination")
    })
}

/// The octant geodesic triangle |0⟩ → |+⟩ → |+i⟩.
pub fn octant_loop() -> DiscreteLoop {
    let zero = StateVector::basis_state(2, 0);
    let plus = StateVector::new(Array1::from_vec(vec![
        C64::new(FRAC_1_SQRT_2, 0.0),
        C64::new(FRAC_1_SQRT_2, 0.0),
    ]))
    .expect("normalized");
    let plus_i = StateVector::new(Array1::from_vec(vec![
        C64::new(FRAC_1_SQRT_2, 0.0),
        C64::new(0.0, FRAC_1_SQRT_2),
    ]))
    .expect("normalized");
    DiscreteLoop::new(vec![zero, plus, plus_i]).expect("octant loop is regular")
}
