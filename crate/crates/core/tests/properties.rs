use inscribed_core::constants::{estimate_many, Estimator};
use inscribed_core::{sample_T, ConstantId, DualVector, EstimateParams, NormSpec, SamplingParams};
use proptest::prelude::*;

const SLACK: f64 = 1e-9;

fn small() -> EstimateParams {
    EstimateParams::default().with_grid(64)
}

fn lp_spec() -> impl Strategy<Value = NormSpec> {
    (1.0f64..8.0).prop_map(|p| NormSpec::lp(2, p))
}

/// Centrally symmetric polygon from half-turn angles and radii.
fn polygon() -> impl Strategy<Value = NormSpec> {
    prop::collection::vec((0.0f64..1.0, 0.5f64..2.0), 2..6).prop_map(|pts| {
        let mut verts = Vec::new();
        let n = pts.len();
        for (i, (jitter, r)) in pts.into_iter().enumerate() {
            let a = std::f64::consts::PI * (i as f64 + 0.8 * jitter) / n as f64;
            verts.push(vec![r * a.cos(), r * a.sin()]);
            verts.push(vec![-r * a.cos(), -r * a.sin()]);
        }
        NormSpec::polyhedral(2, verts).validated().expect("symmetric polygon")
    })
}

fn any_spec() -> impl Strategy<Value = NormSpec> {
    prop_oneof![
        lp_spec(),
        polygon(),
        ((1.0f64..5.0), (0.2f64..5.0)).prop_map(|(p, w)| NormSpec::weighted_lp(p, vec![1.0, w])),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn universal_bounds_hold(spec in any_spec()) {
        let ids = [ConstantId::GL, ConstantId::H, ConstantId::CL, ConstantId::GLp(1.5), ConstantId::GLp(3.0)];
        let e = estimate_many(&spec, &ids, &small()).unwrap();
        prop_assert!(e[0].value >= 4.5 && e[0].value <= 8.0 + SLACK);
        prop_assert!(e[1].value >= 1.0 && e[1].value <= 2.0 + SLACK);
        prop_assert!(e[2].value <= 4.0 + SLACK);
        for (k, p) in [(3, 1.5f64), (4, 3.0)] {
            prop_assert!(e[k].value >= 2f64.powf(1.0 - p) * 3f64.powf(p) - SLACK);
            prop_assert!(e[k].value <= 2f64.powf(p + 1.0) + SLACK);
        }
    }

    #[test]
    fn pointwise_dominations(spec in any_spec(), p in 1.0f64..5.0) {
        let pairs = sample_T(&spec, &SamplingParams::default().with_grid(64)).unwrap();
        for pair in &pairs {
            prop_assert!(pair.max_residual() <= 1e-9);
            let h = ConstantId::H.evaluate(&spec, &pair.x, &pair.y);
            let gl = ConstantId::GL.evaluate(&spec, &pair.x, &pair.y);
            let cl = ConstantId::CL.evaluate(&spec, &pair.x, &pair.y);
            let glp = ConstantId::GLp(p).evaluate(&spec, &pair.x, &pair.y);
            prop_assert!((1.0 - 1e-9..=2.0 + 1e-9).contains(&h));
            prop_assert!(h * h <= gl / 2.0 + 1e-12);
            prop_assert!(cl <= gl / 2.0 + 1e-12);
            prop_assert!(h <= 2f64.powf(-1.0 / p) * glp.powf(1.0 / p) + 1e-12);
        }
    }

    #[test]
    fn shared_sample_estimates_are_ordered(spec in any_spec()) {
        let e = estimate_many(&spec, &[ConstantId::GL, ConstantId::H, ConstantId::CL, ConstantId::GLp(2.0)], &small())
            .unwrap();
        prop_assert!(e[1].value * e[1].value <= e[0].value / 2.0 + 1e-12);
        prop_assert!(e[2].value <= e[0].value / 2.0 + 1e-12);
        prop_assert_eq!(e[3].value, e[0].value);
    }

    #[test]
    fn modulus_is_below_every_triangle_pair(spec in any_spec()) {
        let est = Estimator::new(&spec, &small()).unwrap();
        let delta = est.estimate(ConstantId::Delta(1.0)).unwrap().value;
        prop_assert!((-SLACK..=1.0 + SLACK).contains(&delta));
        for (x, y) in est.triangle_pairs().unwrap() {
            let sum: Vec<f64> = x.iter().zip(y.iter()).map(|(a, b)| a + b).collect();
            prop_assert!(delta <= 1.0 - spec.norm(&sum) / 2.0 + 1e-12);
        }
    }

    #[test]
    fn holder_inequality(spec in any_spec(), f in prop::array::uniform2(-3.0f64..3.0), v in prop::array::uniform2(-3.0f64..3.0)) {
        let f = DualVector(f.to_vec());
        let dual = spec.eval_dual_norm(&f).unwrap();
        prop_assert!(f.apply(&v).abs() <= dual * spec.norm(&v) * (1.0 + 1e-10) + 1e-12);
    }

    #[test]
    fn double_dual_is_the_original(spec in any_spec(), v in prop::array::uniform2(-3.0f64..3.0)) {
        let back = spec.dual_spec().unwrap().dual_spec().unwrap();
        let (a, b) = (spec.norm(&v), back.norm(&v));
        prop_assert!((a - b).abs() <= 1e-9 * a.max(1.0));
    }

    #[test]
    fn deterministic(spec in any_spec(), seed in 0u64..4) {
        let mut p = small();
        p.sampling.seed = seed;
        let a = estimate_many(&spec, &[ConstantId::GL, ConstantId::J], &p).unwrap();
        let b = estimate_many(&spec, &[ConstantId::GL, ConstantId::J], &p).unwrap();
        prop_assert_eq!(a, b);
    }
}

#[test]
fn higher_dimensional_sampling_is_seeded() {
    let spec = NormSpec::lp(3, 3.0);
    let p = |seed| SamplingParams { theta_grid: 64, phi_grid: 64, sections: 3, seed, ..Default::default() };
    assert_eq!(sample_T(&spec, &p(1)).unwrap(), sample_T(&spec, &p(1)).unwrap());
    assert_ne!(sample_T(&spec, &p(1)).unwrap(), sample_T(&spec, &p(2)).unwrap());
}
