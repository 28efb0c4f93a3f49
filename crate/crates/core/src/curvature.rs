//! Gauge-invariant discrete curvature 2-forms over frame families, and
//! Chern / monopole charge integration over closed surfaces.
//!
//! The discretization is the lattice flux: the argument of the product of
//! link overlaps around a plaquette. Gauge invariance is exact by
//! construction, and on a closed surface the per-band total flux is an
//! exact integer multiple of 2π because every link cancels between the
//! two plaquettes that share it.

use ndarray::Array2;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{eig_hermitian, HermitianMatrix};
use crate::phases::wrap_phase;
use crate::states::{overlap, Frame};

use std::f64::consts::PI;

/// Link overlaps at or below this magnitude make a plaquette singular.
pub const LINK_OVERLAP_FLOOR: f64 = 1e-9;
/// Spectral gap below which an eigenframe family refuses to order bands.
pub const GAP_FLOOR: f64 = 1e-8;
/// Max distance of a total band flux / 2π from an integer.
pub const CHARGE_DEFECT_TOL: f64 = 1e-3;
/// Seam mismatch tolerated on periodic axes (projective closure defect).
pub const SEAM_TOL: f64 = 1e-6;

/// Pole sections closing a (θ, φ)-style family into a sphere along axis a.
#[derive(Debug, Clone)]
pub struct CapSections {
    /// Section at the low-a pole (θ = 0).
    pub low: Frame,
    /// Section at the high-a pole (θ = π).
    pub high: Frame,
}

/// Frames over a rectangular 2-parameter grid.
///
/// Periodic axes store both seam copies: the first and last node along the
/// axis represent the same projective configuration. A family with caps
/// plus a periodic b-axis covers a sphere; both axes periodic cover a torus.
#[derive(Debug, Clone)]
pub struct FrameFamily {
    a: Vec<f64>,
    b: Vec<f64>,
    frames: Vec<Frame>, // row-major: index i * n_b + k
    periodic_a: bool,
    periodic_b: bool,
    caps: Option<CapSections>,
    gap_min: Option<f64>,
}

impl FrameFamily {
    pub fn new(
        a: Vec<f64>,
        b: Vec<f64>,
        frames: Vec<Frame>,
        periodic: (bool, bool),
    ) -> Result<Self> {
        Self::build(a, b, frames, periodic, None, None)
    }

    /// Family closed into a sphere by pole sections at both ends of axis a.
    pub fn with_caps(
        a: Vec<f64>,
        b: Vec<f64>,
        frames: Vec<Frame>,
        periodic_b: bool,
        caps: CapSections,
    ) -> Result<Self> {
        Self::build(a, b, frames, (false, periodic_b), Some(caps), None)
    }

    fn build(
        a: Vec<f64>,
        b: Vec<f64>,
        frames: Vec<Frame>,
        periodic: (bool, bool),
        caps: Option<CapSections>,
        gap_min: Option<f64>,
    ) -> Result<Self> {
        let (na, nb) = (a.len(), b.len());
        if na < 2 || nb < 2 {
            return Err(Error::BadInput(
                "grid needs at least 2 nodes per axis".into(),
            ));
        }
        if frames.len() != na * nb {
            return Err(Error::BadInput(format!(
                "expected {} frames for a {na}x{nb} grid, got {}",
                na * nb,
                frames.len()
            )));
        }
        let dim = frames[0].dim();
        if frames.iter().any(|f| f.dim() != dim) {
            return Err(Error::BadInput(
                "all frames must share one dimension".into(),
            ));
        }
        if let Some(c) = &caps {
            if c.low.dim() != dim || c.high.dim() != dim {
                return Err(Error::BadInput(
                    "cap sections must match the family dimension".into(),
                ));
            }
        }
        let family = Self {
            a,
            b,
            frames,
            periodic_a: periodic.0,
            periodic_b: periodic.1,
            caps,
            gap_min,
        };
        family.check_seams()?;
        Ok(family)
    }

    /// Periodic axes must close projectively: first and last node of the
    /// axis agree column by column up to phase.
    fn check_seams(&self) -> Result<()> {
        let (na, nb) = self.shape();
        if self.periodic_a {
            for k in 0..nb {
                self.check_projective_match(self.frame(0, k), self.frame(na - 1, k))?;
            }
        }
        if self.periodic_b {
            for i in 0..na {
                self.check_projective_match(self.frame(i, 0), self.frame(i, nb - 1))?;
            }
        }
        Ok(())
    }

    fn check_projective_match(&self, x: &Frame, y: &Frame) -> Result<()> {
        for j in 0..x.dim() {
            let ov = overlap(x.column(j), y.column(j))?;
            if 1.0 - ov.norm() > SEAM_TOL {
                return Err(Error::OpenSurface(format!(
                    "periodic seam does not close for state {j} (overlap magnitude {:.6})",
                    ov.norm()
                )));
            }
        }
        Ok(())
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.a.len(), self.b.len())
    }

    pub fn dim(&self) -> usize {
        self.frames[0].dim()
    }

    pub fn a_coords(&self) -> &[f64] {
        &self.a
    }

    pub fn b_coords(&self) -> &[f64] {
        &self.b
    }

    pub fn frame(&self, i: usize, k: usize) -> &Frame {
        &self.frames[i * self.b.len() + k]
    }

    pub fn periodic(&self) -> (bool, bool) {
        (self.periodic_a, self.periodic_b)
    }

    pub fn caps(&self) -> Option<&CapSections> {
        self.caps.as_ref()
    }

    /// Smallest spectral gap seen while building an eigenframe family.
    pub fn gap_min(&self) -> Option<f64> {
        self.gap_min
    }

    /// Both axes periodic, or one polar axis capped and the other periodic.
    pub fn is_closed_surface(&self) -> bool {
        (self.periodic_a && self.periodic_b) || (self.caps.is_some() && self.periodic_b)
    }
}

fn link(a: &Frame, b: &Frame, j: usize) -> Result<crate::linalg::C64> {
    let ov = overlap(a.column(j), b.column(j))?;
    if ov.norm() <= LINK_OVERLAP_FLOOR {
        return Err(Error::OrthogonalStates { index: j });
    }
    Ok(ov / ov.norm())
}

/// Flux of state j through one plaquette: −arg of the product of the four
/// link overlaps around 00 → 10 → 11 → 01 → 00, wrapped into (−π, π].
pub fn plaquette_flux(f00: &Frame, f10: &Frame, f11: &Frame, f01: &Frame, j: usize) -> Result<f64> {
    let dim = f00.dim();
    if f10.dim() != dim || f11.dim() != dim || f01.dim() != dim {
        return Err(Error::DimensionMismatch(
            dim,
            f10.dim().max(f11.dim()).max(f01.dim()),
        ));
    }
    if j >= dim {
        return Err(Error::BadInput(format!(
            "state index {j} out of range for dim {dim}"
        )));
    }
    let product = link(f00, f10, j)? * link(f10, f11, j)? * link(f11, f01, j)? * link(f01, f00, j)?;
    Ok(wrap_phase(-product.arg()))
}

/// Per-state plaquette fluxes of a family: the discrete curvature 2-form.
#[derive(Debug, Clone)]
pub struct FluxGrid {
    a: Vec<f64>,
    b: Vec<f64>,
    /// One (n_a−1)×(n_b−1) grid per state index.
    fluxes: Vec<Array2<f64>>,
}

impl FluxGrid {
    /// Number of states (bands).
    pub fn states(&self) -> usize {
        self.fluxes.len()
    }

    /// Plaquette count per axis.
    pub fn shape(&self) -> (usize, usize) {
        let d = self.fluxes[0].dim();
        (d.0, d.1)
    }

    /// Flux grid of state j.
    pub fn flux(&self, j: usize) -> &Array2<f64> {
        &self.fluxes[j]
    }

    /// Node coordinates of the underlying grid (plaquette (i, k) sits
    /// between nodes i..i+1 × k..k+1).
    pub fn a_coords(&self) -> &[f64] {
        &self.a
    }

    pub fn b_coords(&self) -> &[f64] {
        &self.b
    }

    /// Sum of all plaquette fluxes for state j (not wrapped).
    pub fn total_flux(&self, j: usize) -> f64 {
        self.fluxes[j].sum()
    }
}

/// Compute every plaquette flux for every state of the family.
pub fn two_form_field(family: &FrameFamily) -> Result<FluxGrid> {
    let (na, nb) = family.shape();
    let dim = family.dim();
    let cells: Vec<(usize, usize)> = (0..na - 1)
        .flat_map(|i| (0..nb - 1).map(move |k| (i, k)))
        .collect();
    let computed: Vec<Vec<f64>> = cells
        .par_iter()
        .map(|&(i, k)| {
            (0..dim)
                .map(|j| {
                    plaquette_flux(
                        family.frame(i, k),
                        family.frame(i + 1, k),
                        family.frame(i + 1, k + 1),
                        family.frame(i, k + 1),
                        j,
                    )
                    .map_err(|e| match e {
                        Error::OrthogonalStates { index } => Error::SingularPlaquette {
                            a: i,
                            b: k,
                            state: index,
                        },
                        other => other,
                    })
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    let mut fluxes = vec![Array2::zeros((na - 1, nb - 1)); dim];
    for (cell, values) in cells.iter().zip(computed.iter()) {
        for (j, &phi) in values.iter().enumerate() {
            fluxes[j][(cell.0, cell.1)] = phi;
        }
    }
    Ok(FluxGrid {
        a: family.a_coords().to_vec(),
        b: family.b_coords().to_vec(),
        fluxes,
    })
}

/// Pointwise curvature cancellation: per-plaquette |Σ_j Φ_j| and its max.
#[derive(Debug, Clone)]
pub struct ResidualMap {
    /// Worst-case plaquette residual.
    pub max: f64,
    /// Full residual map, one value per plaquette.
    pub map: Array2<f64>,
}

/// Residual of the curvature sum rule over a flux grid.
pub fn theorem1_residual(flux: &FluxGrid) -> ResidualMap {
    let (pa, pb) = flux.shape();
    let mut map = Array2::zeros((pa, pb));
    let mut max = 0.0f64;
    for i in 0..pa {
        for k in 0..pb {
            let sum: f64 = (0..flux.states()).map(|j| flux.fluxes[j][(i, k)]).sum();
            let r = sum.abs();
            map[(i, k)] = r;
            max = max.max(r);
        }
    }
    ResidualMap { max, map }
}

fn eigenframe_at(h: &HermitianMatrix) -> Result<(Frame, f64)> {
    let es = eig_hermitian(h)?;
    let gap = es
        .values
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min);
    let frame = Frame::from_matrix_columns(es.vectors())?;
    Ok((frame, gap))
}

/// Eigenbases of H over a rectangular parameter patch, bands ordered by
/// ascending eigenvalue and gauge-fixed deterministically.
///
/// Fails with the offending node when the spectral gap collapses below
/// [`GAP_FLOOR`] anywhere on the patch (a degeneracy pierces the surface).
pub fn eigenframe_family<F>(
    a: Vec<f64>,
    b: Vec<f64>,
    periodic: (bool, bool),
    h_at: F,
) -> Result<FrameFamily>
where
    F: Fn(f64, f64) -> HermitianMatrix + Sync,
{
    let (na, nb) = (a.len(), b.len());
    let nodes: Vec<(usize, usize)> = (0..na).flat_map(|i| (0..nb).map(move |k| (i, k))).collect();
    // collect per-node results first so the first failing node in grid
    // order is the one reported, regardless of scheduling
    let per_node: Vec<(Frame, f64)> = nodes
        .par_iter()
        .map(|&(i, k)| {
            let (frame, gap) = eigenframe_at(&h_at(a[i], b[k]))?;
            if gap < GAP_FLOOR {
                return Err(Error::GapCollapse { a: i, b: k, gap });
            }
            Ok((frame, gap))
        })
        .collect::<Vec<Result<_>>>()
        .into_iter()
        .collect::<Result<Vec<_>>>()?;

    let gap_min = per_node
        .iter()
        .map(|(_, g)| *g)
        .fold(f64::INFINITY, f64::min);
    let frames: Vec<Frame> = per_node.into_iter().map(|(f, _)| f).collect();
    FrameFamily::build(a, b, frames, periodic, None, Some(gap_min))
}

/// Eigenframes of H(R) over a full sphere of the given radius.
///
/// θ rows are cell-centered, θ_i = (i + 1/2)·π/n_theta, so no node sits on
/// a pole; φ runs seam-inclusive over [0, 2π] with the seam column cloned
/// from φ = 0. Pole sections come from H evaluated at R = (0, 0, ±radius)
/// and close the surface.
pub fn sphere_eigenframe_family<F>(
    n_theta: usize,
    n_phi: usize,
    radius: f64,
    h_at: F,
) -> Result<FrameFamily>
where
    F: Fn([f64; 3]) -> HermitianMatrix + Sync,
{
    if n_theta < 2 || n_phi < 3 {
        return Err(Error::BadInput(
            "sphere mesh needs at least 2 theta rows and 3 phi columns".into(),
        ));
    }
    if !(radius.is_finite() && radius > 0.0) {
        return Err(Error::BadInput(format!(
            "radius must be positive, got {radius}"
        )));
    }
    let thetas: Vec<f64> = (0..n_theta)
        .map(|i| (i as f64 + 0.5) * PI / n_theta as f64)
        .collect();
    let phis: Vec<f64> = (0..=n_phi)
        .map(|k| 2.0 * PI * k as f64 / n_phi as f64)
        .collect();

    let nodes: Vec<(usize, usize)> = (0..n_theta)
        .flat_map(|i| (0..n_phi).map(move |k| (i, k)))
        .collect();
    let per_node: Vec<(Frame, f64)> = nodes
        .par_iter()
        .map(|&(i, k)| {
            let (st, ct) = thetas[i].sin_cos();
            let (sp, cp) = phis[k].sin_cos();
            let r = [radius * st * cp, radius * st * sp, radius * ct];
            let (frame, gap) = eigenframe_at(&h_at(r))?;
            if gap < GAP_FLOOR {
                return Err(Error::GapCollapse { a: i, b: k, gap });
            }
            Ok((frame, gap))
        })
        .collect::<Vec<Result<_>>>()
        .into_iter()
        .collect::<Result<Vec<_>>>()?;

    let (north, gap_n) = eigenframe_at(&h_at([0.0, 0.0, radius]))?;
    let (south, gap_s) = eigenframe_at(&h_at([0.0, 0.0, -radius]))?;
    for (gap, name) in [(gap_n, "north"), (gap_s, "south")] {
        if gap < GAP_FLOOR {
            return Err(Error::OpenSurface(format!(
                "gap collapse at the {name} pole"
            )));
        }
    }
    let gap_min = per_node
        .iter()
        .map(|(_, g)| *g)
        .fold(gap_n.min(gap_s), f64::min);

    // seam column k = n_phi clones k = 0, so seam links cancel exactly
    let mut frames = Vec::with_capacity(n_theta * (n_phi + 1));
    for i in 0..n_theta {
        for k in 0..n_phi {
            frames.push(per_node[i * n_phi + k].0.clone());
        }
        frames.push(per_node[i * n_phi].0.clone());
    }
    FrameFamily::build(
        thetas,
        phis,
        frames,
        (false, true),
        Some(CapSections {
            low: north,
            high: south,
        }),
        Some(gap_min),
    )
}

/// Integer band charges from the flux through a closed surface.
#[derive(Debug, Clone)]
pub struct MonopoleReport {
    /// Chern number per band; the monopole charge is q_n = 2π·c_n.
    pub charges: Vec<i64>,
    /// Σ_n c_n (zero by the curvature sum rule).
    pub sum: i64,
    /// Smallest spectral gap met on the surface, when known.
    pub gap_min: Option<f64>,
    /// Worst rounding defect |total/2π − c_n| across bands.
    pub max_defect: f64,
}

/// Triangle-fan flux of one polar cap. `reversed` flips the traversal for
/// the south cap so both caps are measured with the outward normal.
fn cap_flux(
    family: &FrameFamily,
    cap: &Frame,
    row: usize,
    reversed: bool,
    j: usize,
) -> Result<f64> {
    let (_, nb) = family.shape();
    let mut total = 0.0;
    for k in 0..nb - 1 {
        let (first, second) = if reversed { (k + 1, k) } else { (k, k + 1) };
        let product = link(cap, family.frame(row, first), j)?
            * link(family.frame(row, first), family.frame(row, second), j)?
            * link(family.frame(row, second), cap, j)?;
        total += wrap_phase(-product.arg());
    }
    Ok(total)
}

/// Integrate each band's flux over a closed surface and round to charges.
///
/// Orientation: outward normal, plaquettes traversed counterclockwise seen
/// from outside; the lowest band of a radial spin field carries +2j.
pub fn chern_charges(family: &FrameFamily) -> Result<MonopoleReport> {
    if !family.is_closed_surface() {
        return Err(Error::OpenSurface(
            "chern_charges needs both axes periodic, or caps plus a periodic b-axis".into(),
        ));
    }
    let flux = two_form_field(family)?;
    let (na, _) = family.shape();
    let dim = family.dim();
    let mut charges = Vec::with_capacity(dim);
    let mut max_defect = 0.0f64;
    for j in 0..dim {
        let mut total = flux.total_flux(j);
        if let Some(caps) = family.caps() {
            total += cap_flux(family, &caps.low, 0, false, j)?;
            total += cap_flux(family, &caps.high, na - 1, true, j)?;
        }
        let c = total / (2.0 * PI);
        let rounded = c.round();
        let defect = (c - rounded).abs();
        if defect > CHARGE_DEFECT_TOL {
            return Err(Error::RefineMesh { band: j, defect });
        }
        max_defect = max_defect.max(defect);
        charges.push(rounded as i64);
    }
    let sum = charges.iter().sum();
    Ok(MonopoleReport {
        charges,
        sum,
        gap_min: family.gap_min(),
        max_defect,
    })
}
