use buls::data::{uefa, BivariateDataset};
use buls::generators::GeneratorFamily;
use buls::inference::loglik;
use buls::model::{mahalanobis_sq, Buls, Margin, ModelParams, UnitPoint};
use buls::sampling::{sample_buls, RandomSource};
use proptest::prelude::*;

fn gen_strategy() -> impl Strategy<Value = GeneratorFamily> {
    prop_oneof![
        Just(GeneratorFamily::normal()),
        (1.0..30.0f64).prop_map(|v| GeneratorFamily::student_t(v).unwrap()),
        (0.5..10.0f64).prop_map(|v| GeneratorFamily::hyperbolic(v).unwrap()),
        Just(GeneratorFamily::laplace()),
        (0.5..10.0f64).prop_map(|v| GeneratorFamily::slash(v).unwrap()),
    ]
}

fn theta_strategy() -> impl Strategy<Value = ModelParams> {
    (0.1..3.0f64, 0.1..3.0f64, 0.1..2.0f64, 0.1..2.0f64, -0.95..0.95f64)
        .prop_map(|(a, b, c, d, r)| ModelParams::new(a, b, c, d, r).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn swapping_coordinates_swaps_parameters(gen in gen_strategy(), th in theta_strategy(), w1 in 0.01..0.99f64, w2 in 0.01..0.99f64) {
        let swapped = ModelParams::new(th.eta2, th.eta1, th.sigma2, th.sigma1, th.rho).unwrap();
        let a = Buls::new(gen, th).unwrap().joint_logpdf(UnitPoint::new(w1, w2).unwrap()).unwrap();
        let b = Buls::new(gen, swapped).unwrap().joint_logpdf(UnitPoint::new(w2, w1).unwrap()).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
    }

    #[test]
    fn mahalanobis_is_nonnegative_and_zero_at_centre(th in theta_strategy(), w1 in 0.001..0.999f64, w2 in 0.001..0.999f64) {
        prop_assert!(mahalanobis_sq(&th, UnitPoint::new(w1, w2).unwrap()).unwrap() >= 0.0);
        let centre = UnitPoint::new(-(-th.eta1).exp_m1(), -(-th.eta2).exp_m1()).unwrap();
        prop_assert!(mahalanobis_sq(&th, centre).unwrap() < 1e-20);
    }

    #[test]
    fn marginal_cdf_is_monotone_and_inverts(gen in gen_strategy(), th in theta_strategy(), p in 0.001..0.999f64, dp in 0.0001..0.001f64) {
        let m = Buls::new(gen, th).unwrap();
        let w = m.marginal_quantile(Margin::First, p).unwrap();
        let w_hi = m.marginal_quantile(Margin::First, (p + dp).min(0.9995)).unwrap();
        prop_assert!(w_hi >= w);
        if w > 0.0 && w < 1.0 {
            let err = (m.marginal_cdf(Margin::First, w) - p).abs();
            let lo = m.marginal_cdf(Margin::First, w.next_down());
            let hi = m.marginal_cdf(Margin::First, w.next_up());
            prop_assert!(err < 1e-8 || (lo - 1e-12 <= p && p <= hi + 1e-12), "p={} w={} cdf err {}", p, w, err);
        }
    }

    #[test]
    fn samples_stay_inside_the_square(gen in gen_strategy(), th in theta_strategy(), seed in any::<u64>()) {
        let d = sample_buls(gen, &th, 64, &mut RandomSource::new(seed)).unwrap();
        prop_assert!(d.rows.iter().all(|p| p.w1 > 0.0 && p.w1 < 1.0 && p.w2 > 0.0 && p.w2 < 1.0));
    }

    #[test]
    fn loglik_ignores_row_order(gen in gen_strategy(), th in theta_strategy(), rot in 0usize..37) {
        let data = uefa();
        let mut rows = data.rows.clone();
        rows.rotate_left(rot);
        let rotated = BivariateDataset { rows, label: None };
        let a = loglik(&gen, &th, &data).unwrap();
        let b = loglik(&gen, &th, &rotated).unwrap();
        prop_assert!((a - b).abs() <= 1e-10 * a.abs().max(1.0));
    }
}
