//! Quantum states, orthonormal frames, overlaps and frame completion.
//!
//! A [`Frame`] is an ordered orthonormal basis of state vectors — a
//! complete set of local section representatives. Points of projective
//! space are always represented by explicit vectors; every quantity the
//! crate reports is invariant under per-vector phase changes.

use ndarray::Array1;

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector, UnitaryMatrix, C64};

/// Normalization tolerance on Σ|amps|².
pub const NORMALIZATION_TOL: f64 = 1e-12;
/// Max Gram deviation tolerated in a frame.
pub const FRAME_ORTHONORMALITY_TOL: f64 = 1e-10;
/// Smallest link overlap magnitude a discrete loop may contain.
pub const LOOP_OVERLAP_FLOOR: f64 = 1e-9;

const GRAM_SCHMIDT_SKIP: f64 = 1e-6;

/// Normalized complex amplitude vector: one quantum state.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: CVector,
}

impl StateVector {
    /// Accepts an already-normalized vector (within [`NORMALIZATION_TOL`]).
    pub fn new(amps: CVector) -> Result<Self> {
        let norm = vec_norm(&amps);
        if (norm * norm - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self { amps })
    }

    /// Rescales to unit norm; rejects the zero vector.
    pub fn normalized(amps: CVector) -> Result<Self> {
        let norm = vec_norm(&amps);
        if norm == 0.0 {
            return Err(Error::ZeroVector);
        }
        Ok(Self {
            amps: amps.mapv(|z| z / norm),
        })
    }

    /// Canonical basis state |k⟩.
    pub fn basis_state(dim: usize, k: usize) -> Self {
        let mut amps = CVector::zeros(dim);
        amps[k] = C64::new(1.0, 0.0);
        Self { amps }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &CVector {
        &self.amps
    }

    /// Same projective point, representative multiplied by e^{iφ}.
    pub fn with_phase(&self, phase: f64) -> Self {
        let factor = C64::from_polar(1.0, phase);
        Self {
            amps: self.amps.mapv(|z| z * factor),
        }
    }

    /// Bloch vector (x, y, z) of a qubit state.
    pub fn bloch_vector(&self) -> Result<[f64; 3]> {
        if self.dim() != 2 {
            return Err(Error::DimensionMismatch(2, self.dim()));
        }
        let cross = self.amps[0].conj() * self.amps[1];
        Ok([
            2.0 * cross.re,
            2.0 * cross.im,
            self.amps[0].norm_sqr() - self.amps[1].norm_sqr(),
        ])
    }
}

fn vec_norm(v: &CVector) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Inner product ⟨a|b⟩.
pub fn overlap(a: &StateVector, b: &StateVector) -> Result<C64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(a.dim(), b.dim()));
    }
    Ok(a.amps
        .iter()
        .zip(b.amps.iter())
        .map(|(x, y)| x.conj() * y)
        .sum())
}

impl UnitaryMatrix {
    /// Apply to a state; the result is renormalized to absorb fp drift.
    pub fn apply(&self, psi: &StateVector) -> Result<StateVector> {
        StateVector::normalized(self.apply_vec(psi.amps())?)
    }
}

/// Ordered orthonormal set of d states spanning the space.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    columns: Vec<StateVector>,
}

impl Frame {
    /// Validates pairwise orthonormality within [`FRAME_ORTHONORMALITY_TOL`].
    pub fn new(columns: Vec<StateVector>) -> Result<Self> {
        let dim = columns
            .first()
            .map(StateVector::dim)
            .ok_or_else(|| Error::BadInput("empty frame".into()))?;
        if columns.len() != dim {
            return Err(Error::BadInput(format!(
                "frame must contain exactly {dim} states, got {}",
                columns.len()
            )));
        }
        let mut worst = 0.0f64;
        for (j, a) in columns.iter().enumerate() {
            if a.dim() != dim {
                return Err(Error::DimensionMismatch(dim, a.dim()));
            }
            for (k, b) in columns.iter().enumerate() {
                let g = overlap(a, b)?;
                let target = if j == k { 1.0 } else { 0.0 };
                worst = worst.max((g - target).norm());
            }
        }
        if worst > FRAME_ORTHONORMALITY_TOL {
            return Err(Error::NotOrthonormal(worst));
        }
        Ok(Self { columns })
    }

    /// Frame from the columns of a unitary-like matrix.
    pub fn from_matrix_columns(m: &CMatrix) -> Result<Self> {
        let cols = (0..m.ncols())
            .map(|k| StateVector::new(m.column(k).to_owned()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(cols)
    }

    /// Canonical basis frame.
    pub fn canonical(dim: usize) -> Self {
        Self {
            columns: (0..dim).map(|k| StateVector::basis_state(dim, k)).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[StateVector] {
        &self.columns
    }

    pub fn column(&self, j: usize) -> &StateVector {
        &self.columns[j]
    }

    /// Matrix whose k-th column is the k-th frame state.
    pub fn to_matrix(&self) -> CMatrix {
        let d = self.dim();
        let mut m = CMatrix::zeros((d, d));
        for (k, col) in self.columns.iter().enumerate() {
            for i in 0..d {
                m[(i, k)] = col.amps()[i];
            }
        }
        m
    }
}

/// Complete a normalized state to a full orthonormal frame.
///
/// For a qubit the partner is the mirror state (−x₁*, x₀*); for d > 2 the
/// remaining columns come from Gram–Schmidt over canonical basis vectors in
/// index order, skipping any that fall nearly inside the span already built.
pub fn complete_frame(seed: &StateVector) -> Frame {
    let dim = seed.dim();
    if dim == 1 {
        return Frame {
            columns: vec![seed.clone()],
        };
    }
    if dim == 2 {
        let partner = CVector::from_vec(vec![-seed.amps()[1].conj(), seed.amps()[0].conj()]);
        return Frame {
            columns: vec![seed.clone(), StateVector { amps: partner }],
        };
    }
    let mut columns: Vec<CVector> = vec![seed.amps().clone()];
    for k in 0..dim {
        if columns.len() == dim {
            break;
        }
        let mut r: CVector = Array1::zeros(dim);
        r[k] = C64::new(1.0, 0.0);
        // two orthogonalization passes keep orthonormality at fp level
        for _ in 0..2 {
            for c in &columns {
                let proj: C64 = c.iter().zip(r.iter()).map(|(x, y)| x.conj() * y).sum();
                r = r - c.mapv(|z| z * proj);
            }
        }
        let norm = vec_norm(&r);
        if norm > GRAM_SCHMIDT_SKIP {
            columns.push(r.mapv(|z| z / norm));
        }
    }
    debug_assert_eq!(columns.len(), dim);
    Frame {
        columns: columns
            .into_iter()
            .map(|amps| StateVector { amps })
            .collect(),
    }
}

/// Qubit frame at Bloch angles (θ, φ): first column
/// (cos θ/2, e^{iφ} sin θ/2), second its mirror partner.
pub fn bloch_frame(theta: f64, phi: f64) -> Frame {
    let (half_sin, half_cos) = (theta / 2.0).sin_cos();
    let seed = CVector::from_vec(vec![
        C64::new(half_cos, 0.0),
        C64::from_polar(half_sin, phi),
    ]);
    complete_frame(&StateVector { amps: seed })
}

/// Closed sequence of states visited by projective measurements; the loop
/// implicitly returns to its first point.
#[derive(Debug, Clone)]
pub struct DiscreteLoop {
    points: Vec<StateVector>,
}

impl DiscreteLoop {
    /// Requires at least two points and nonzero consecutive overlaps,
    /// wraparound included.
    pub fn new(points: Vec<StateVector>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::BadInput(
                "a discrete loop needs at least two points".into(),
            ));
        }
        let dim = points[0].dim();
        for p in &points {
            if p.dim() != dim {
                return Err(Error::DimensionMismatch(dim, p.dim()));
            }
        }
        for k in 0..points.len() {
            let next = (k + 1) % points.len();
            let ov = overlap(&points[k], &points[next])?;
            if ov.norm() <= LOOP_OVERLAP_FLOOR {
                return Err(Error::OrthogonalStates { index: k });
            }
        }
        Ok(Self { points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[StateVector] {
        &self.points
    }

    /// Loop visited in the opposite order.
    pub fn reversed(&self) -> Self {
        let mut points = self.points.clone();
        points.reverse();
        Self { points }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenarios::random_state;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn state(amps: Vec<C64>) -> StateVector {
        StateVector::new(CVector::from_vec(amps)).unwrap()
    }

    #[test]
    fn overlap_basis_states() {
        let zero = StateVector::basis_state(2, 0);
        let one = StateVector::basis_state(2, 1);
        assert_eq!(overlap(&zero, &zero).unwrap(), C64::new(1.0, 0.0));
        assert_eq!(overlap(&zero, &one).unwrap(), C64::new(0.0, 0.0));
    }

    #[test]
    fn overlap_hand_expansion() {
        let a = state(vec![
            C64::new(FRAC_1_SQRT_2, 0.0),
            C64::new(FRAC_1_SQRT_2, 0.0),
        ]);
        let b = state(vec![
            C64::new(FRAC_1_SQRT_2, 0.0),
            C64::new(0.0, FRAC_1_SQRT_2),
        ]);
        let ov = overlap(&a, &b).unwrap();
        assert!((ov - C64::new(0.5, 0.5)).norm() < 1e-15);
    }

    #[test]
    fn overlap_conjugate_symmetry_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let a = random_state(4, &mut rng);
            let b = random_state(4, &mut rng);
            assert_eq!(overlap(&a, &b).unwrap(), overlap(&b, &a).unwrap().conj());
        }
    }

    #[test]
    fn overlap_rejects_dimension_mismatch() {
        let a = StateVector::basis_state(2, 0);
        let b = StateVector::basis_state(3, 0);
        assert!(overlap(&a, &b).is_err());
    }

    #[test]
    fn complete_frame_canonical_seed() {
        let frame = complete_frame(&StateVector::basis_state(2, 0));
        assert_eq!(frame.column(0), &StateVector::basis_state(2, 0));
        assert_eq!(frame.column(1), &StateVector::basis_state(2, 1));
    }

    #[test]
    fn complete_frame_qubit_mirror_rule() {
        let theta = PI / 2.0;
        let seed = state(vec![
            C64::new((theta / 2.0).cos(), 0.0),
            C64::new((theta / 2.0).sin(), 0.0),
        ]);
        let frame = complete_frame(&seed);
        let second = frame.column(1);
        assert!((second.amps()[0] - C64::new(-FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
        assert!((second.amps()[1] - C64::new(FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn complete_frame_random_dim_four() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let seed = random_state(4, &mut rng);
        let frame = complete_frame(&seed);
        for j in 0..4 {
            for k in 0..4 {
                let g = overlap(frame.column(j), frame.column(k)).unwrap();
                let target = if j == k { 1.0 } else { 0.0 };
                assert!((g - target).norm() < 1e-12, "Gram defect at ({j},{k})");
            }
        }
    }

    #[test]
    fn complete_frame_near_canonical_seed_skips_parallel_vector() {
        // seed ≈ |1⟩ forces the Gram-Schmidt sweep to skip e_1
        let mut amps = CVector::zeros(4);
        amps[1] = C64::new(1.0, 0.0);
        amps[2] = C64::new(1e-8, 0.0);
        let seed = StateVector::normalized(amps).unwrap();
        let frame = complete_frame(&seed);
        assert!(Frame::new(frame.columns().to_vec()).is_ok());
    }

    #[test]
    fn qubit_completion_gives_antipodal_bloch_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..30 {
            let frame = complete_frame(&random_state(2, &mut rng));
            let a = frame.column(0).bloch_vector().unwrap();
            let b = frame.column(1).bloch_vector().unwrap();
            for i in 0..3 {
                assert!((a[i] + b[i]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn bloch_frame_poles() {
        let north = bloch_frame(0.0, 0.0);
        assert!((north.column(0).amps()[0] - C64::new(1.0, 0.0)).norm() < 1e-15);
        assert!((north.column(1).amps()[1] - C64::new(1.0, 0.0)).norm() < 1e-15);

        let south = bloch_frame(PI, 0.0);
        assert!((south.column(0).amps()[1] - C64::new(1.0, 0.0)).norm() < 1e-15);
        assert!((south.column(1).amps()[0] - C64::new(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn bloch_frame_equator_with_phase() {
        let frame = bloch_frame(PI / 2.0, PI / 2.0);
        let c0 = frame.column(0);
        let c1 = frame.column(1);
        assert!((c0.amps()[0] - C64::new(FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
        assert!((c0.amps()[1] - C64::new(0.0, FRAC_1_SQRT_2)).norm() < 1e-15);
        assert!((c1.amps()[0] - C64::new(0.0, FRAC_1_SQRT_2)).norm() < 1e-15);
        assert!((c1.amps()[1] - C64::new(FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn frame_constructor_rejects_non_orthonormal() {
        let a = state(vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)]);
        let b = state(vec![
            C64::new(FRAC_1_SQRT_2, 0.0),
            C64::new(FRAC_1_SQRT_2, 0.0),
        ]);
        assert!(matches!(
            Frame::new(vec![a, b]),
            Err(Error::NotOrthonormal(_))
        ));
    }

    #[test]
    fn discrete_loop_rejects_orthogonal_neighbors() {
        let zero = StateVector::basis_state(2, 0);
        let one = StateVector::basis_state(2, 1);
        assert!(matches!(
            DiscreteLoop::new(vec![zero, one]),
            Err(Error::OrthogonalStates { index: 0 })
        ));
    }

    #[test]
    fn discrete_loop_accepts_two_point_loop() {
        let zero = StateVector::basis_state(2, 0);
        let plus = state(vec![
            C64::new(FRAC_1_SQRT_2, 0.0),
            C64::new(FRAC_1_SQRT_2, 0.0),
        ]);
        let lp = DiscreteLoop::new(vec![zero, plus]).unwrap();
        assert_eq!(lp.len(), 2);
    }

    #[test]
    fn state_constructor_enforces_normalization() {
        let v = CVector::from_vec(vec![C64::new(0.9, 0.0), C64::new(0.0, 0.0)]);
        assert!(StateVector::new(v.clone()).is_err());
        assert!(StateVector::normalized(v).is_ok());
        assert!(StateVector::normalized(CVector::zeros(2)).is_err());
    }
}
