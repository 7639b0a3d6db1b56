use nsdamp::field::{forward_transform, inverse_transform};
use nsdamp::norms::{h01_norm, lebesgue_norm, sobolev_norm};
use nsdamp::operators::{derivative, friedrichs_cutoff, horizontal_laplacian, leray_project};
use nsdamp::random::{random_field, substream, Band};
use nsdamp::{Grid, SpectralVectorField};
use proptest::prelude::*;

fn grid() -> Grid {
    Grid::new([8, 6, 4], [1.0, 2.5, 0.75]).unwrap()
}

fn field(seed: u64) -> SpectralVectorField {
    random_field(&grid(), Band::Full, &mut substream(seed, "properties")).symmetrized()
}

fn rel(a: &SpectralVectorField, b: &SpectralVectorField) -> f64 {
    a.sub(b).max_abs() / a.max_abs().max(b.max_abs()).max(f64::MIN_POSITIVE)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn transform_round_trip(seed in any::<u64>()) {
        let f = field(seed);
        let back = forward_transform(&inverse_transform(&f).unwrap());
        prop_assert!(rel(&f, &back) < 1e-13);
    }

    #[test]
    fn parseval(seed in any::<u64>()) {
        let f = field(seed);
        let l2 = lebesgue_norm(&inverse_transform(&f).unwrap(), 2.0).unwrap();
        prop_assert!((l2 - f.l2_norm()).abs() <= 1e-13 * f.l2_norm());
    }

    #[test]
    fn norms_are_absolutely_homogeneous(seed in any::<u64>(), lambda in -1e3f64..1e3, s in -1.0f64..2.0) {
        prop_assume!(lambda.abs() > 1e-3);
        let f = field(seed);
        let g = f.scaled(lambda);
        let a = sobolev_norm(&f, s, false).unwrap();
        prop_assert!((sobolev_norm(&g, s, false).unwrap() - lambda.abs() * a).abs() <= 1e-12 * lambda.abs() * a);
        let h = h01_norm(&f);
        prop_assert!((h01_norm(&g) - lambda.abs() * h).abs() <= 1e-12 * lambda.abs() * h);
    }

    #[test]
    fn triangle_inequality(a in any::<u64>(), b in any::<u64>(), p in 1.0f64..8.0) {
        let (f, g) = (field(a), field(b));
        let lp = |x: &SpectralVectorField| lebesgue_norm(&inverse_transform(x).unwrap(), p).unwrap();
        prop_assert!(lp(&f.add(&g)) <= (lp(&f) + lp(&g)) * (1.0 + 1e-13));
    }

    #[test]
    fn leray_is_an_idempotent_contraction(seed in any::<u64>()) {
        let f = field(seed);
        let p = leray_project(&f);
        prop_assert!(p.l2_norm() <= f.l2_norm() * (1.0 + 1e-14));
        prop_assert!(rel(&leray_project(&p), &p) < 1e-13);
        prop_assert!(p.divergence_residual() <= 1e-13 * p.max_abs());
    }

    #[test]
    fn cutoff_commutes_with_multipliers(seed in any::<u64>(), radius in 1.0f64..40.0) {
        let f = field(seed);
        let c = friedrichs_cutoff(&f, radius);
        prop_assert!(rel(&friedrichs_cutoff(&c, radius), &c) == 0.0);
        prop_assert!(rel(&friedrichs_cutoff(&leray_project(&f), radius), &leray_project(&c)) < 1e-13);
        prop_assert!(rel(&friedrichs_cutoff(&derivative(&f, 0), radius), &derivative(&c, 0)) < 1e-13);
        prop_assert!(rel(&friedrichs_cutoff(&horizontal_laplacian(&f), radius), &horizontal_laplacian(&c)) < 1e-13);
    }
}
