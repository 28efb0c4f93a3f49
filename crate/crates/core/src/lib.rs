//! Geometric phases and curvature 2-forms for finite-dimensional quantum
//! systems, with numerical verifiers for their sum rules: the curvature
//! 2-forms of a complete orthonormal frame cancel pointwise, the geometric
//! phases of a complete cyclic set sum to zero mod 2π, and purely geometric
//! phase gates are therefore confined to SU(d).
//!
//! Both the adiabatic side (parametrized Hamiltonian eigenframes, Berry
//! curvature, Chern / monopole charges) and the non-adiabatic side
//! (cyclic evolutions, total / dynamical / geometric phase splits,
//! measurement-loop Bargmann phases) are covered, for dimensions up to a
//! few dozen.

pub mod curvature;
pub mod error;
pub mod evolution;
pub mod gates;
pub mod linalg;
pub mod phases;
pub mod scenarios;
pub mod states;

pub use curvature::{
    chern_charges, eigenframe_family, plaquette_flux, sphere_eigenframe_family, theorem1_residual,
    two_form_field, CapSections, FluxGrid, FrameFamily, MonopoleReport, ResidualMap,
};
pub use error::{Error, Result};
pub use evolution::{
    cyclic_states, evolve, measurement_loop, trajectory, ConstantHamiltonian, CyclicSet, FnSampler,
    HamiltonianSampler, Trajectory,
};
pub use gates::{gate_verdict, hadamard_gate, phase_gate, GateVerdict, FEASIBILITY_TOL};
pub use linalg::{
    determinant, eig_hermitian, propagator, CMatrix, CVector, EigenSystem, HermitianMatrix,
    UnitaryMatrix, C64,
};
pub use phases::{
    bargmann_phase, cyclic_phases, phase_decomposition, residual_mod_2pi, sum_rule_check,
    sum_rule_report, wrap_phase, CyclicPhases, PhaseDecomposition, SumRuleReport,
};
pub use states::{bloch_frame, complete_frame, overlap, DiscreteLoop, Frame, StateVector};
