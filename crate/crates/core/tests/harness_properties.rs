use proptest::prelude::*;

use qldpc_feedback::feedback::Strategy as Decoder;
use qldpc_feedback::sim::codes::load_code;
use qldpc_feedback::sim::{run_experiment, wilson_interval, ExperimentSpec, OutcomeClass};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn stats_are_consistent(seed in any::<u64>(), p in 0.0f64..0.2, which in 0usize..3) {
        let code = load_code("ea-4-1-1").unwrap();
        let spec = ExperimentSpec {
            ps: vec![p],
            strategies: vec![Decoder::ALL[which]],
            blocks: 30,
            seed,
            n_a: Some(2),
            keep_blocks: true,
            threads: Some(2),
            ..Default::default()
        };
        let r = run_experiment(&code, &spec).unwrap();
        let s = &r.stats[0];
        prop_assert_eq!(s.exact + s.degenerate + s.nonequivalent + s.detected + s.unchecked, 30);
        prop_assert_eq!(s.errors_strict(), 30 - s.exact);
        let (lo, hi) = s.ber_interval();
        prop_assert!(lo <= s.ber() && s.ber() <= hi);
        prop_assert!(s.anoi() >= 1.0);
        for b in &r.blocks {
            let e = b.error.as_ref().unwrap();
            let out = b.e_out.as_ref().unwrap();
            prop_assert_eq!(b.class == OutcomeClass::Exact, b.converged && e == out);
            prop_assert_eq!(b.class == OutcomeClass::Detected, !b.converged);
            prop_assert!(b.adjustments <= 2);
            if b.initial_converged {
                prop_assert_eq!(b.adjustments, 0);
            }
        }
        let serial = run_experiment(&code, &ExperimentSpec { threads: Some(1), ..spec.clone() }).unwrap();
        prop_assert_eq!(serial, r);
    }

    #[test]
    fn wilson_brackets_the_estimate(n in 1usize..5000, frac in 0.0f64..=1.0) {
        let k = ((n as f64) * frac).round() as usize;
        let (lo, hi) = wilson_interval(k, n, 1.96);
        let phat = k as f64 / n as f64;
        prop_assert!(0.0 <= lo && lo <= phat + 1e-12);
        prop_assert!(phat <= hi + 1e-12 && hi <= 1.0);
    }
}
