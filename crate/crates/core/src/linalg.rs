//! Dense complex linear algebra for small Hilbert-space dimensions.
//!
//! Targets d up to a few dozen: Hermitian eigendecomposition by cyclic
//! complex Jacobi rotations, unitary propagators through the spectral
//! theorem, and determinants by LU elimination with partial pivoting.

use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Double-precision complex scalar used throughout the crate.
pub type C64 = Complex64;
/// Dense complex matrix.
pub type CMatrix = Array2<C64>;
/// Dense complex vector.
pub type CVector = Array1<C64>;

/// Max-entry tolerance for accepting a matrix as Hermitian at construction.
pub const HERMITICITY_TOL: f64 = 1e-12;
/// Max-entry tolerance on U†U − 1 for accepting a matrix as unitary.
pub const UNITARITY_TOL: f64 = 1e-10;
/// Eigenvalue gap below which an eigensystem is flagged degenerate.
pub const DEGENERACY_GAP: f64 = 1e-9;

const JACOBI_MAX_SWEEPS: usize = 100;
const JACOBI_OFF_FACTOR: f64 = 1e-13;

/// Conjugate transpose.
pub fn adjoint(m: &CMatrix) -> CMatrix {
    m.t().mapv(|z| z.conj())
}

/// Largest entry magnitude.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Largest entry magnitude of the difference.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn off_diagonal_norm(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut s = 0.0;
    for p in 0..n {
        for q in 0..n {
            if p != q {
                s += m[(p, q)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Rotate each column so that its largest-magnitude component is real and
/// positive; ties break toward the lowest index. Deterministic sections.
pub(crate) fn gauge_fix(m: &mut CMatrix) {
    let (n, cols) = (m.nrows(), m.ncols());
    for j in 0..cols {
        let mut best = 0;
        let mut best_mag = -1.0;
        for i in 0..n {
            let mag = m[(i, j)].norm_sqr();
            if mag > best_mag {
                best_mag = mag;
                best = i;
            }
        }
        let z = m[(best, j)];
        let mag = z.norm();
        if mag > 0.0 {
            let phase = z.conj() / mag;
            for i in 0..n {
                m[(i, j)] *= phase;
            }
        }
    }
}

/// Hermitian matrix: entries satisfy `a[j][k] = conj(a[k][j])`.
///
/// Construction symmetrizes input whose asymmetry is below
/// [`HERMITICITY_TOL`] and rejects anything worse.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    entries: CMatrix,
}

impl HermitianMatrix {
    pub fn new(entries: CMatrix) -> Result<Self> {
        let (rows, cols) = (entries.nrows(), entries.ncols());
        if rows != cols {
            return Err(Error::NotSquare { rows, cols });
        }
        if rows == 0 {
            return Err(Error::BadInput(
                "matrix dimension must be at least 1".into(),
            ));
        }
        let adj = adjoint(&entries);
        let asym = max_abs_diff(&entries, &adj);
        if asym > HERMITICITY_TOL {
            return Err(Error::NotHermitian(asym));
        }
        let sym = (&entries + &adj).mapv(|z| 0.5 * z);
        Ok(Self { entries: sym })
    }

    /// Real diagonal matrix.
    pub fn diagonal(values: &[f64]) -> Self {
        let n = values.len();
        let mut m = CMatrix::zeros((n, n));
        for (k, &v) in values.iter().enumerate() {
            m[(k, k)] = C64::new(v, 0.0);
        }
        Self { entries: m }
    }

    /// Real linear combination of Hermitian matrices (exactly Hermitian).
    pub fn linear_combination(terms: &[(f64, &HermitianMatrix)]) -> Result<Self> {
        let dim = terms
            .first()
            .map(|(_, h)| h.dim())
            .ok_or_else(|| Error::BadInput("empty linear combination".into()))?;
        let mut m = CMatrix::zeros((dim, dim));
        for (coeff, h) in terms {
            if h.dim() != dim {
                return Err(Error::DimensionMismatch(dim, h.dim()));
            }
            m = m + h.entries().mapv(|z| z * *coeff);
        }
        Ok(Self { entries: m })
    }

    /// Multiply by a real scalar.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            entries: self.entries.mapv(|z| z * factor),
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    /// Trace (real by Hermiticity).
    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|k| self.entries[(k, k)].re).sum()
    }

    /// Expectation value ⟨v|H|v⟩ (real part; imaginary part is fp noise).
    pub fn expectation(&self, v: &CVector) -> Result<f64> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch(self.dim(), v.len()));
        }
        let hv = self.entries.dot(v);
        let e: C64 = v.iter().zip(hv.iter()).map(|(a, b)| a.conj() * b).sum();
        Ok(e.re)
    }
}

/// Unitary matrix: U†U = 1 within [`UNITARITY_TOL`] (max entry).
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix {
    entries: CMatrix,
}

impl UnitaryMatrix {
    pub fn new(entries: CMatrix) -> Result<Self> {
        let (rows, cols) = (entries.nrows(), entries.ncols());
        if rows != cols {
            return Err(Error::NotSquare { rows, cols });
        }
        if rows == 0 {
            return Err(Error::BadInput(
                "matrix dimension must be at least 1".into(),
            ));
        }
        let gram = adjoint(&entries).dot(&entries);
        let dev = max_abs_diff(&gram, &CMatrix::eye(rows));
        if dev > UNITARITY_TOL {
            return Err(Error::NotUnitary(dev));
        }
        Ok(Self { entries })
    }

    /// Internal constructor for products of validated unitaries.
    pub(crate) fn new_unchecked(entries: CMatrix) -> Self {
        Self { entries }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            entries: CMatrix::eye(dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn adjoint(&self) -> Self {
        Self {
            entries: adjoint(&self.entries),
        }
    }

    /// Matrix product `self · other`.
    pub fn compose(&self, other: &UnitaryMatrix) -> Result<UnitaryMatrix> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(self.dim(), other.dim()));
        }
        Ok(Self::new_unchecked(self.entries.dot(&other.entries)))
    }

    /// Apply to a raw vector.
    pub fn apply_vec(&self, v: &CVector) -> Result<CVector> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch(self.dim(), v.len()));
        }
        Ok(self.entries.dot(v))
    }
}

/// Eigenvalues (ascending) and orthonormal eigenvectors of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    /// Eigenvalues sorted ascending.
    pub values: Vec<f64>,
    /// Eigenvectors as columns, aligned with `values`.
    vectors: CMatrix,
    /// Set when two eigenvalues are closer than [`DEGENERACY_GAP`].
    pub degenerate: bool,
}

impl EigenSystem {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn vectors(&self) -> &CMatrix {
        &self.vectors
    }

    /// Owned copy of eigenvector `k`.
    pub fn vector(&self, k: usize) -> CVector {
        self.vectors.column(k).to_owned()
    }
}

/// Hermitian eigendecomposition by cyclic complex Jacobi rotations.
///
/// Sweeps pivot pairs in fixed row order until the off-diagonal
/// Frobenius norm drops below `1e-13 · ‖H‖_F`, capped at 100 sweeps.
/// Output is deterministic: eigenvalues ascend and each eigenvector is
/// rotated so its largest-magnitude component is real positive.
pub fn eig_hermitian(h: &HermitianMatrix) -> Result<EigenSystem> {
    let n = h.dim();
    let mut a = h.entries().clone();
    let mut v = CMatrix::eye(n);
    let scale = frobenius(&a);
    let threshold = JACOBI_OFF_FACTOR * scale;

    if n > 1 && scale > 0.0 {
        let mut sweeps = 0;
        let mut off = off_diagonal_norm(&a);
        while off > threshold {
            if sweeps == JACOBI_MAX_SWEEPS {
                return Err(Error::NoConvergence {
                    sweeps,
                    residual: off,
                });
            }
            for p in 0..n - 1 {
                for q in p + 1..n {
                    let apq = a[(p, q)];
                    let mag = apq.norm();
                    if mag == 0.0 {
                        continue;
                    }
                    // Unitary 2x2 rotation J with J[p][q] = -s·u, J[q][p] = s·conj(u)
                    // chosen so (J†AJ)[p][q] = 0; u carries the phase of a_pq.
                    let u = apq / mag;
                    let tau = (a[(q, q)].re - a[(p, p)].re) / (2.0 * mag);
                    let t = -tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = t * c;
                    let su = u * s;
                    let suc = u.conj() * s;
                    for k in 0..n {
                        let apk = a[(p, k)];
                        let aqk = a[(q, k)];
                        a[(p, k)] = apk * c + aqk * su;
                        a[(q, k)] = aqk * c - apk * suc;
                    }
                    for k in 0..n {
                        let akp = a[(k, p)];
                        let akq = a[(k, q)];
                        a[(k, p)] = akp * c + akq * suc;
                        a[(k, q)] = akq * c - akp * su;
                    }
                    for k in 0..n {
                        let vkp = v[(k, p)];
                        let vkq = v[(k, q)];
                        v[(k, p)] = vkp * c + vkq * suc;
                        v[(k, q)] = vkq * c - vkp * su;
                    }
                }
            }
            sweeps += 1;
            off = off_diagonal_norm(&a);
        }
    }

    // Sort ascending; keep columns aligned.
    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|k| a[(k, k)].re).collect();
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]));
    let values: Vec<f64> = order.iter().map(|&k| diag[k]).collect();
    let mut vectors = CMatrix::zeros((n, n));
    for (dst, &src) in order.iter().enumerate() {
        for i in 0..n {
            vectors[(i, dst)] = v[(i, src)];
        }
    }
    gauge_fix(&mut vectors);

    let degenerate = values.windows(2).any(|w| w[1] - w[0] < DEGENERACY_GAP);
    Ok(EigenSystem {
        values,
        vectors,
        degenerate,
    })
}

/// Unitary time evolution exp(−iHt) through the spectral theorem
/// (ħ = 1: energies are inverse times).
pub fn propagator(h: &HermitianMatrix, t: f64) -> Result<UnitaryMatrix> {
    if !t.is_finite() {
        return Err(Error::BadInput(format!("non-finite duration {t}")));
    }
    let es = eig_hermitian(h)?;
    let n = h.dim();
    let mut phased = es.vectors().clone();
    for (k, &e) in es.values.iter().enumerate() {
        let phase = C64::from_polar(1.0, -e * t);
        for i in 0..n {
            phased[(i, k)] *= phase;
        }
    }
    let m = phased.dot(&adjoint(es.vectors()));
    UnitaryMatrix::new(m)
}

/// Determinant by LU elimination with partial pivoting.
///
/// For unitary input the result is unimodular up to fp rounding.
pub fn determinant(u: &UnitaryMatrix) -> C64 {
    let n = u.dim();
    let mut m = u.entries().clone();
    let mut det = C64::new(1.0, 0.0);
    for col in 0..n {
        let mut piv = col;
        let mut best = m[(col, col)].norm();
        for r in col + 1..n {
            let x = m[(r, col)].norm();
            if x > best {
                best = x;
                piv = r;
            }
        }
        if best == 0.0 {
            return C64::new(0.0, 0.0);
        }
        if piv != col {
            for c in 0..n {
                let tmp = m[(col, c)];
                m[(col, c)] = m[(piv, c)];
                m[(piv, c)] = tmp;
            }
            det = -det;
        }
        let d = m[(col, col)];
        det *= d;
        for r in col + 1..n {
            let f = m[(r, col)] / d;
            for c in col + 1..n {
                let x = m[(col, c)];
                m[(r, c)] -= f * x;
            }
        }
    }
    det
}
