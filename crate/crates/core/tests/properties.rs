//! Property tests for the crate-wide invariants that hold for arbitrary
//! inputs, not just the hand-picked cases in the unit suites.

use holonomy_core::{
    bargmann_phase, complete_frame, overlap, residual_mod_2pi, wrap_phase, CVector, DiscreteLoop,
    StateVector, C64,
};
use proptest::prelude::*;

use std::f64::consts::PI;

fn state_strategy(dim: usize) -> impl Strategy<Value = StateVector> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), dim).prop_filter_map(
        "needs nonzero norm",
        |parts| {
            let amps =
                CVector::from_vec(parts.into_iter().map(|(re, im)| C64::new(re, im)).collect());
            StateVector::normalized(amps).ok()
        },
    )
}

proptest! {
    #[test]
    fn completion_is_orthonormal_for_every_dim(
        dim in 2usize..=8,
        seed_parts in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 8),
    ) {
        let amps = CVector::from_vec(
            seed_parts[..dim].iter().map(|&(re, im)| C64::new(re, im)).collect(),
        );
        prop_assume!(amps.iter().map(|z| z.norm_sqr()).sum::<f64>() > 1e-6);
        let seed = StateVector::normalized(amps).unwrap();
        let frame = complete_frame(&seed);
        for j in 0..dim {
            for k in 0..dim {
                let g = overlap(frame.column(j), frame.column(k)).unwrap();
                let target = if j == k { 1.0 } else { 0.0 };
                prop_assert!((g - target).norm() < 1e-10);
            }
        }
        prop_assert_eq!(frame.column(0), &seed);
    }

    #[test]
    fn wrapping_lands_in_the_principal_branch(x in -1e6f64..1e6) {
        let w = wrap_phase(x);
        prop_assert!(w > -PI && w <= PI);
        prop_assert!(residual_mod_2pi(x) >= 0.0 && residual_mod_2pi(x) <= PI);
        // wrapping changes the angle by an exact multiple of 2π
        prop_assert!(residual_mod_2pi(w - x) < 1e-7);
    }

    #[test]
    fn bargmann_phase_is_gauge_invariant_and_odd(
        states in prop::collection::vec(state_strategy(3), 3..6),
        phases in prop::collection::vec(-PI..PI, 6),
    ) {
        let lp = match DiscreteLoop::new(states) {
            Ok(lp) => lp,
            Err(_) => return Ok(()), // nearly orthogonal neighbors: loop undefined
        };
        let base = bargmann_phase(&lp).unwrap();

        let regauged: Vec<StateVector> = lp
            .points()
            .iter()
            .zip(phases.iter())
            .map(|(p, &phi)| p.with_phase(phi))
            .collect();
        let re = bargmann_phase(&DiscreteLoop::new(regauged).unwrap()).unwrap();
        prop_assert!((re - base).abs() < 1e-12);

        let rev = bargmann_phase(&lp.reversed()).unwrap();
        prop_assert!(residual_mod_2pi(base + rev) < 1e-12);
    }
}
