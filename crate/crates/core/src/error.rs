//! Error type shared by every module of the crate.

use thiserror::Error;

/// Errors produced by construction-time validation and numerics.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian (max asymmetry {0:.3e})")]
    NotHermitian(f64),

    #[error("matrix is not unitary (max deviation of U\u{2020}U from identity: {0:.3e})")]
    NotUnitary(f64),

    #[error("state vector is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("cannot normalize a zero vector")]
    ZeroVector,

    #[error("frame columns are not orthonormal (max Gram deviation {0:.3e})")]
    NotOrthonormal(f64),

    #[error(
        "eigensolver did not converge after {sweeps} sweeps (off-diagonal residual {residual:.3e})"
    )]
    NoConvergence { sweeps: usize, residual: f64 },

    #[error("invalid argument: {0}")]
    BadInput(String),

    #[error("trajectory is not cyclic (closure defect {defect:.3e})")]
    NonCyclic { defect: f64 },

    #[error("consecutive loop states are orthogonal at segment {index}")]
    OrthogonalStates { index: usize },

    #[error("singular plaquette at cell ({a}, {b}) for state {state}: a link overlap vanished; refine the grid")]
    SingularPlaquette { a: usize, b: usize, state: usize },

    #[error("spectral gap collapse at node ({a}, {b}): gap {gap:.3e} below threshold")]
    GapCollapse { a: usize, b: usize, gap: f64 },

    #[error("surface is not closed: {0}")]
    OpenSurface(String),

    #[error("total flux of band {band} is not an integer multiple of 2\u{3c0} (defect {defect:.3e}); refine the mesh")]
    RefineMesh { band: usize, defect: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
