//! Dense complex linear algebra for small qubit systems.
//!
//! States, one-angle projective measurements, density matrices, and partial
//! traces, all for at most four qubits. Values are immutable after
//! construction; the only non-pure operations are the samplers, which take a
//! caller-owned [`crate::rng::TrialRng`].

mod density;
mod measure;
mod state;

pub use density::{density_from_mixture, maximally_mixed, DensityMatrix};
pub use measure::{
    collapse_angle, measure_angle, outcome_probability, MeasurementSetting, PROJECTION_FLOOR,
};
pub use state::{StateVector, ALGEBRA_TOL, MAX_QUBITS};

pub(crate) use measure::project_qubit_raw;
pub(crate) use state::{norm_sqr_of, qubit_mask};

#[cfg(test)]
mod proptests {
    use super::*;
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn arb_state(n: usize) -> impl Strategy<Value = StateVector> {
        let dim = 1usize << n;
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), dim..=dim).prop_filter_map(
            "norm too small",
            move |pairs| {
                let amps: Vec<Complex64> =
                    pairs.into_iter().map(|(re, im)| Complex64::new(re, im)).collect();
                let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
                if norm < 1e-3 {
                    return None;
                }
                StateVector::new(amps.into_iter().map(|a| a / norm).collect()).ok()
            },
        )
    }

    proptest! {
        #[test]
        fn tensor_preserves_normalization(
            left in arb_state(2),
            right in arb_state(2),
        ) {
            let joined = left.tensor(&right).unwrap();
            prop_assert!((joined.norm_sqr() - 1.0).abs() <= ALGEBRA_TOL);
        }

        #[test]
        fn measurement_post_state_is_normalized(
            state in arb_state(3),
            qubit in 0usize..3,
            angle in 0.0f64..std::f64::consts::PI,
            seed in prop::num::u64::ANY,
        ) {
            let setting = MeasurementSetting::new(angle).unwrap();
            let mut rng = crate::rng::RandomStream::from_seed(seed).trial(0);
            let (_, post) = measure_angle(&state, qubit, setting, &mut rng).unwrap();
            prop_assert!((post.norm_sqr() - 1.0).abs() <= ALGEBRA_TOL);
        }

        #[test]
        fn outcome_probabilities_sum_to_one(
            state in arb_state(2),
            qubit in 0usize..2,
            angle in 0.0f64..std::f64::consts::PI,
        ) {
            let setting = MeasurementSetting::new(angle).unwrap();
            let p0 = outcome_probability(&state, qubit, setting, 0).unwrap();
            let p1 = outcome_probability(&state, qubit, setting, 1).unwrap();
            prop_assert!((p0 + p1 - 1.0).abs() < 1e-12);
        }

        #[test]
        fn pure_density_has_unit_purity(state in arb_state(2)) {
            let rho = density_from_mixture(&[(1.0, state)]).unwrap();
            prop_assert!((rho.purity() - 1.0).abs() <= ALGEBRA_TOL);
        }

        #[test]
        fn partial_trace_preserves_trace_and_hermiticity(
            state in arb_state(3),
            keep_mask in 1usize..7,
        ) {
            let keep: Vec<usize> = (0..3).filter(|q| keep_mask & (1 << q) != 0).collect();
            let rho = DensityMatrix::from_pure(&state);
            let reduced = rho.partial_trace(&keep).unwrap();
            prop_assert!((reduced.trace().re - 1.0).abs() < 1e-12);
            prop_assert!(reduced.trace().im.abs() < 1e-14);
            for r in 0..reduced.dim() {
                for c in 0..reduced.dim() {
                    let delta = (reduced.entry(r, c) - reduced.entry(c, r).conj()).norm();
                    prop_assert!(delta < 1e-14);
                }
            }
        }
    }
}
