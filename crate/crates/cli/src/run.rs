//! Map a resolved [`ScenarioConfig`] onto the library pipeline and collect
//! a [`RunOutcome`]. Everything here is deterministic given (config, seed).

use holonomy_core::scenarios::{
    bloch_family, octant_loop, pauli_z, random_frame_family, random_hermitian, rotating_field,
    spin_monopole_family, GENERATOR_NAME,
};
use holonomy_core::{
    bargmann_phase, chern_charges, complete_frame, cyclic_phases, gate_verdict, hadamard_gate,
    measurement_loop, phase_decomposition, residual_mod_2pi, theorem1_residual, trajectory,
    two_form_field, CVector, ConstantHamiltonian, CyclicPhases, FluxGrid, FrameFamily, GateVerdict,
    StateVector, UnitaryMatrix, C64,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::{FamilyChoice, GateChoice, ScenarioConfig, ScenarioKind};
use crate::report::{
    CheckLine, GridDoc, PhaseRow, RunOutcome, RunReport, VerdictReport, FLOAT_FORMAT,
};

use std::time::Instant;

/// Residual floor below which refinement is judged against fp noise
/// instead of the 4x shrink rule.
const REFINEMENT_FLOOR: f64 = 1e-12;

fn blank_report(cfg: &ScenarioConfig) -> RunReport {
    RunReport {
        scenario: cfg.clone(),
        generator: GENERATOR_NAME.into(),
        float_format: FLOAT_FORMAT.into(),
        phases: None,
        residual_theorem1: None,
        residual_theorem1_refined: None,
        refinement_ratio: None,
        residual_theorem2: None,
        mirror_residual: None,
        bargmann: None,
        charges: None,
        charge_sum: None,
        gap_min: None,
        max_charge_defect: None,
        verdict: None,
        degenerate: None,
        checks: Vec::new(),
        pass: false,
        timing_ms: 0,
    }
}

fn check(name: &str, value: f64, threshold: f64) -> CheckLine {
    CheckLine {
        name: name.into(),
        value,
        threshold,
        pass: value < threshold,
    }
}

fn phase_rows(cp: &CyclicPhases) -> Vec<PhaseRow> {
    cp.decompositions
        .iter()
        .enumerate()
        .map(|(j, d)| PhaseRow {
            j,
            alpha: d.total,
            dynamical: d.dynamical,
            geometric: d.geometric,
        })
        .collect()
}

fn sum_rule_sections(report: &mut RunReport, cp: &CyclicPhases, tolerance: f64) {
    let rows = phase_rows(cp);
    let residual = residual_mod_2pi(rows.iter().map(|r| r.geometric).sum());
    report
        .checks
        .push(check("theorem2_residual", residual, tolerance));
    report.phases = Some(rows);
    report.residual_theorem2 = Some(residual);
    report.degenerate = Some(cp.degenerate);
}

fn flux_grids(flux: &FluxGrid, residual_map: &ndarray::Array2<f64>) -> Vec<GridDoc> {
    // plaquette (i, k) is keyed by its lower-left grid node
    let (pa, pb) = flux.shape();
    let a: Vec<f64> = flux.a_coords()[..pa].to_vec();
    let b: Vec<f64> = flux.b_coords()[..pb].to_vec();
    let mut grids: Vec<GridDoc> = (0..flux.states())
        .map(|j| GridDoc {
            name: format!("flux_state_{j}"),
            value_label: format!("plaquette flux of state {j} (radians)"),
            a: a.clone(),
            b: b.clone(),
            values: flux.flux(j).iter().copied().collect(),
        })
        .collect();
    grids.push(GridDoc {
        name: "residual".into(),
        value_label: "per-plaquette |sum_j flux_j| (radians)".into(),
        a,
        b,
        values: residual_map.iter().copied().collect(),
    });
    grids
}

fn verdict_section(report: &mut RunReport, v: &GateVerdict) {
    report.verdict = Some(VerdictReport {
        det_re: v.det.re,
        det_im: v.det.im,
        det_phase: v.det_phase,
        feasible: v.geometric_feasible,
        tolerance: v.tolerance,
    });
    report
        .checks
        .push(check("det_phase_abs", v.det_phase.abs(), v.tolerance));
}

fn run_precession(cfg: &ScenarioConfig, report: &mut RunReport) -> holonomy_core::Result<()> {
    let theta = cfg.theta.expect("validated");
    let omega = cfg.omega.expect("defaulted");
    let h = ConstantHamiltonian(pauli_z().scaled(omega / 2.0));
    let seed = StateVector::normalized(CVector::from_vec(vec![
        C64::new((theta / 2.0).cos(), 0.0),
        C64::new((theta / 2.0).sin(), 0.0),
    ]))?;
    let frame = complete_frame(&seed);

    let mut rows = Vec::with_capacity(2);
    for (j, psi) in frame.columns().iter().enumerate() {
        let d = phase_decomposition(&trajectory(&h, psi, cfg.duration, cfg.steps)?)?;
        rows.push(PhaseRow {
            j,
            alpha: d.total,
            dynamical: d.dynamical,
            geometric: d.geometric,
        });
    }
    let residual = residual_mod_2pi(rows.iter().map(|r| r.geometric).sum());
    let mirror = residual_mod_2pi(rows[0].geometric + rows[1].geometric);
    report
        .checks
        .push(check("theorem2_residual", residual, cfg.tolerance));
    report
        .checks
        .push(check("mirror_residual", mirror, cfg.tolerance));
    report.phases = Some(rows);
    report.residual_theorem2 = Some(residual);
    report.mirror_residual = Some(mirror);
    report.degenerate = Some(false);
    Ok(())
}

fn run_random_hamiltonian(
    cfg: &ScenarioConfig,
    report: &mut RunReport,
) -> holonomy_core::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let h = ConstantHamiltonian(random_hermitian(cfg.dim, &mut rng));
    let cp = cyclic_phases(&h, cfg.duration, cfg.steps)?;
    sum_rule_sections(report, &cp, cfg.tolerance);
    Ok(())
}

fn run_rotating_field(cfg: &ScenarioConfig, report: &mut RunReport) -> holonomy_core::Result<()> {
    let sampler = rotating_field(
        cfg.omega0.expect("defaulted"),
        cfg.omega.expect("defaulted"),
    );
    let cp = cyclic_phases(&sampler, cfg.duration, cfg.steps)?;
    sum_rule_sections(report, &cp, cfg.tolerance);
    Ok(())
}

fn run_frame_family(
    cfg: &ScenarioConfig,
    report: &mut RunReport,
) -> holonomy_core::Result<Vec<GridDoc>> {
    let (na, nb) = cfg.grid;
    let build = |na: usize, nb: usize| -> FrameFamily {
        match cfg.family.expect("validated") {
            FamilyChoice::Bloch => bloch_family(na, nb),
            FamilyChoice::Random => random_frame_family(cfg.dim, cfg.seed, na, nb),
        }
    };

    let coarse_flux = two_form_field(&build(na, nb))?;
    let coarse = theorem1_residual(&coarse_flux);
    // halve the grid spacing on both axes
    let fine = theorem1_residual(&two_form_field(&build(2 * na - 1, 2 * nb - 1))?);

    report.residual_theorem1 = Some(coarse.max);
    report.residual_theorem1_refined = Some(fine.max);
    report.refinement_ratio = if fine.max > 0.0 {
        Some(coarse.max / fine.max)
    } else {
        None
    };
    report
        .checks
        .push(check("theorem1_residual", coarse.max, cfg.tolerance));
    report.checks.push(check(
        "theorem1_residual_refined",
        fine.max,
        (coarse.max / 4.0).max(REFINEMENT_FLOOR),
    ));
    Ok(flux_grids(&coarse_flux, &coarse.map))
}

fn run_spin_monopole(
    cfg: &ScenarioConfig,
    report: &mut RunReport,
) -> holonomy_core::Result<Vec<GridDoc>> {
    let (nt, np) = cfg.grid;
    let family = spin_monopole_family(cfg.dim, nt, np, cfg.radius.expect("defaulted"))?;
    let monopoles = chern_charges(&family)?;
    let flux = two_form_field(&family)?;
    let residual = theorem1_residual(&flux);

    report.charges = Some(monopoles.charges.clone());
    report.charge_sum = Some(monopoles.sum);
    report.gap_min = monopoles.gap_min;
    report.max_charge_defect = Some(monopoles.max_defect);
    report.residual_theorem1 = Some(residual.max);
    report.checks.push(CheckLine {
        name: "charge_sum_zero".into(),
        value: monopoles.sum as f64,
        threshold: 0.5,
        pass: monopoles.sum == 0,
    });
    report.checks.push(check(
        "charge_rounding_defect",
        monopoles.max_defect,
        holonomy_core::curvature::CHARGE_DEFECT_TOL,
    ));
    Ok(flux_grids(&flux, &residual.map))
}

fn run_measurement_loop(cfg: &ScenarioConfig, report: &mut RunReport) -> holonomy_core::Result<()> {
    let lp = match &cfg.loop_points {
        None => octant_loop(),
        Some(points) => {
            let states = points
                .iter()
                .map(|amps| {
                    StateVector::normalized(CVector::from_vec(
                        amps.iter().map(|&(re, im)| C64::new(re, im)).collect(),
                    ))
                })
                .collect::<holonomy_core::Result<Vec<_>>>()?;
            measurement_loop(&states)?
        }
    };
    let phase = bargmann_phase(&lp)?;
    report.bargmann = Some(phase);
    // a computed loop phase is the deliverable; nothing to threshold
    Ok(())
}

fn run_gate_check(cfg: &ScenarioConfig, report: &mut RunReport) -> holonomy_core::Result<()> {
    let gate = match cfg.gate.expect("validated") {
        GateChoice::Hadamard => hadamard_gate(cfg.dim)?,
        GateChoice::Identity => UnitaryMatrix::identity(cfg.dim),
    };
    let v = gate_verdict(&gate, cfg.tolerance);
    verdict_section(report, &v);
    Ok(())
}

/// Execute one scenario. Deterministic given the config; wall-clock timing
/// is the only nondeterministic report field.
pub fn run_scenario(cfg: &ScenarioConfig) -> holonomy_core::Result<RunOutcome> {
    let start = Instant::now();
    let mut report = blank_report(cfg);
    let grids = match cfg.kind {
        ScenarioKind::Precession => {
            run_precession(cfg, &mut report)?;
            Vec::new()
        }
        ScenarioKind::RandomHamiltonian => {
            run_random_hamiltonian(cfg, &mut report)?;
            Vec::new()
        }
        ScenarioKind::RotatingField => {
            run_rotating_field(cfg, &mut report)?;
            Vec::new()
        }
        ScenarioKind::FrameFamily => run_frame_family(cfg, &mut report)?,
        ScenarioKind::SpinMonopole => run_spin_monopole(cfg, &mut report)?,
        ScenarioKind::MeasurementLoop => {
            run_measurement_loop(cfg, &mut report)?;
            Vec::new()
        }
        ScenarioKind::GateCheck => {
            run_gate_check(cfg, &mut report)?;
            Vec::new()
        }
    };
    report.pass = report.checks.iter().all(|c| c.pass);
    report.timing_ms = start.elapsed().as_millis() as u64;
    Ok(RunOutcome { report, grids })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;
    use std::f64::consts::PI;

    #[test]
    fn precession_report_matches_analytic_values() {
        let cfg = parse_config("kind=precession\ntheta=1.0471975511965976\n").unwrap();
        let outcome = run_scenario(&cfg).unwrap();
        let report = outcome.report;
        assert!(report.pass);
        let rows = report.phases.unwrap();
        // theta = pi/3: gamma = -pi/2
        assert!((rows[0].geometric + PI / 2.0).abs() < 1e-6);
        assert!((rows[1].geometric - PI / 2.0).abs() < 1e-6);
        assert!(report.residual_theorem2.unwrap() < 1e-8);
        assert!(report.mirror_residual.unwrap() < 1e-6);
    }

    #[test]
    fn random_hamiltonian_is_reproducible() {
        let cfg = parse_config("kind=random-hamiltonian\ndim=5\nseed=11\nduration=1.7\nsteps=64\n")
            .unwrap();
        let a = run_scenario(&cfg).unwrap().report;
        let b = run_scenario(&cfg).unwrap().report;
        assert!(a.pass);
        assert!(a.residual_theorem2.unwrap() < 1e-8);
        assert_eq!(a.phases, b.phases);
        assert_eq!(a.residual_theorem2, b.residual_theorem2);
    }

    #[test]
    fn spin_monopole_half_spin_charges() {
        let cfg = parse_config("kind=spin-monopole\nspin=0.5\ngrid=40x40\n").unwrap();
        let outcome = run_scenario(&cfg).unwrap();
        assert_eq!(outcome.report.charges, Some(vec![1, -1]));
        assert_eq!(outcome.report.charge_sum, Some(0));
        assert!(outcome.report.pass);
        // one grid per band plus the residual map
        assert_eq!(outcome.grids.len(), 3);
    }

    #[test]
    fn frame_family_bloch_produces_three_grids() {
        let cfg = parse_config("kind=frame-family\nfamily=bloch\ngrid=16x16\n").unwrap();
        let outcome = run_scenario(&cfg).unwrap();
        assert!(outcome.report.pass);
        assert_eq!(outcome.grids.len(), 3);
        assert!(outcome.report.residual_theorem1.unwrap() < 1e-12);
    }

    #[test]
    fn frame_family_random_refines() {
        let cfg = parse_config(
            "kind=frame-family\nfamily=random\ndim=4\nseed=5\ngrid=11x11\ntolerance=1e-4\n",
        )
        .unwrap();
        let report = run_scenario(&cfg).unwrap().report;
        assert!(report.pass, "checks: {:?}", report.checks);
        assert!(report.refinement_ratio.unwrap() > 4.0);
        // d + 1 grid documents
        assert_eq!(run_scenario(&cfg).unwrap().grids.len(), 5);
    }

    #[test]
    fn measurement_loop_octant_phase() {
        let cfg = parse_config("kind=measurement-loop\nloop=octant\n").unwrap();
        let report = run_scenario(&cfg).unwrap().report;
        assert!((report.bargmann.unwrap() + PI / 4.0).abs() < 1e-12);
        assert!(report.pass);
    }

    #[test]
    fn gate_check_hadamard_fails_feasibility() {
        for (dim, feasible) in [(2usize, false), (3, false), (4, false)] {
            let cfg =
                parse_config(&format!("kind=gate-check\ngate=hadamard\ndim={dim}\n")).unwrap();
            let report = run_scenario(&cfg).unwrap().report;
            let v = report.verdict.unwrap();
            assert_eq!(v.feasible, feasible, "dim {dim}");
            assert_eq!(report.pass, feasible, "dim {dim}");
        }
        let cfg = parse_config("kind=gate-check\ngate=identity\ndim=3\n").unwrap();
        assert!(run_scenario(&cfg).unwrap().report.pass);
    }

    #[test]
    fn rotating_field_default_period_passes() {
        let cfg = parse_config("kind=rotating-field\nsteps=1024\n").unwrap();
        let report = run_scenario(&cfg).unwrap().report;
        assert!(report.pass, "residual {:?}", report.residual_theorem2);
    }
}
