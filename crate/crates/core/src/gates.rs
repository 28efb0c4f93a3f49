//! Geometric phase gates, the SU(d) determinant constraint, and
//! generalized Hadamard gates.

use crate::error::{Error, Result};
use crate::linalg::{determinant, CMatrix, UnitaryMatrix, C64};
use crate::phases::wrap_phase;
use crate::states::Frame;

use std::f64::consts::PI;

/// Default tolerance on |arg det| for calling a gate geometrically feasible.
pub const FEASIBILITY_TOL: f64 = 1e-6;

/// Determinant-based feasibility verdict for a unitary gate.
///
/// A gate is implementable as a phase gate on the cyclic frame of a single
/// evolution only if its determinant phase vanishes: the geometric phases
/// of a complete cyclic set sum to 0 mod 2π. The verdict judges exactly
/// that construction; it says nothing about composite schemes or about
/// redefining the gate by an unobservable global phase.
#[derive(Debug, Clone, Copy)]
pub struct GateVerdict {
    pub det: C64,
    /// arg det, in (−π, π].
    pub det_phase: f64,
    /// |det_phase| < tolerance.
    pub geometric_feasible: bool,
    pub tolerance: f64,
}

/// Phase gate U = Σ_j e^{iγ_j} |φ_j⟩⟨φ_j| on the given frame.
pub fn phase_gate(frame: &Frame, gammas: &[f64]) -> Result<UnitaryMatrix> {
    let d = frame.dim();
    if gammas.len() != d {
        return Err(Error::DimensionMismatch(d, gammas.len()));
    }
    let mut m = CMatrix::zeros((d, d));
    for (j, gamma) in gammas.iter().enumerate() {
        let phase = C64::from_polar(1.0, *gamma);
        let col = frame.column(j).amps();
        for r in 0..d {
            for c in 0..d {
                m[(r, c)] += phase * col[r] * col[c].conj();
            }
        }
    }
    UnitaryMatrix::new(m)
}

/// Judge whether a unitary can be a purely geometric phase gate.
pub fn gate_verdict(u: &UnitaryMatrix, tolerance: f64) -> GateVerdict {
    let det = determinant(u);
    let det_phase = wrap_phase(det.arg());
    GateVerdict {
        det,
        det_phase,
        geometric_feasible: det_phase.abs() < tolerance,
        tolerance,
    }
}

/// Generalized Hadamard (discrete Fourier) gate:
/// entries (1/√d)·ω^{μν} with ω = e^{i2π/d}.
pub fn hadamard_gate(dim: usize) -> Result<UnitaryMatrix> {
    if dim < 2 {
        return Err(Error::BadInput("Hadamard gate needs dim >= 2".into()));
    }
    let scale = 1.0 / (dim as f64).sqrt();
    let m = CMatrix::from_shape_fn((dim, dim), |(mu, nu)| {
        // reduce the exponent mod d before taking the phase
        let exponent = ((mu * nu) % dim) as f64;
        C64::from_polar(scale, 2.0 * PI * exponent / dim as f64)
    });
    UnitaryMatrix::new(m)
}
