//! Estimates checked against closed-form values and brute-force oracles.
//! The oracles use their own norm code and plain angle grids, with no
//! shared sampling or refinement.

use std::f64::consts::{PI, TAU};

use approx::assert_abs_diff_eq;
use inscribed_core::constants::{estimate, estimate_on_dual, refine_convergence};
use inscribed_core::{ConstantId, DeltaForm, EstimateParams, NormSpec, SamplingParams};

fn defaults() -> EstimateParams {
    EstimateParams::default()
}

fn grid(n: usize) -> EstimateParams {
    EstimateParams::default().with_grid(n)
}

fn euclid(v: [f64; 2]) -> f64 {
    v[0].hypot(v[1])
}

fn rot(v: [f64; 2], a: f64) -> [f64; 2] {
    let (s, c) = a.sin_cos();
    [c * v[0] - s * v[1], s * v[0] + c * v[1]]
}

/// Triangle-pair oracle on the Euclidean plane: `y` is `x` rotated by
/// `±60°`, which is every solution of `|y| = |x - y| = 1`.
fn euclid_triangle_sup(n: usize, f: impl Fn(f64, f64) -> f64) -> f64 {
    let mut best = f64::NEG_INFINITY;
    for i in 0..n {
        let x = [(TAU * i as f64 / n as f64).cos(), (TAU * i as f64 / n as f64).sin()];
        for s in [1.0, -1.0] {
            let y = rot(x, s * PI / 3.0);
            let a = euclid([x[0] + y[0], x[1] + y[1]]);
            let b = euclid([2.0 * x[0] - y[0], 2.0 * x[1] - y[1]]);
            best = best.max(f(a, b));
        }
    }
    best
}

/// Brute force over a double angle grid of Euclidean unit pairs.
fn euclid_pairs(n: usize, mut visit: impl FnMut([f64; 2], [f64; 2])) {
    let pts: Vec<[f64; 2]> =
        (0..n).map(|i| [(TAU * i as f64 / n as f64).cos(), (TAU * i as f64 / n as f64).sin()]).collect();
    for x in &pts {
        for y in &pts {
            visit(*x, *y);
        }
    }
}

#[test]
fn hilbert_gl_and_h() {
    let l2 = NormSpec::lp(2, 2.0);
    let gl = estimate(&l2, ConstantId::GL, &defaults()).unwrap();
    let h = estimate(&l2, ConstantId::H, &defaults()).unwrap();
    assert_abs_diff_eq!(gl.value, 6.0, epsilon = 1e-6);
    assert_abs_diff_eq!(h.value, 3f64.sqrt(), epsilon = 1e-6);
    assert!(gl.refined);
    assert_eq!((gl.theta_grid, gl.phi_grid, gl.sections), (2048, 2048, 1));
}

#[test]
fn hilbert_cl_and_glp1_match_oracle() {
    let l2 = NormSpec::lp(2, 2.0);
    let cl_oracle = euclid_triangle_sup(4096, |a, b| a * b);
    let glp_oracle = euclid_triangle_sup(4096, |a, b| a + b);
    assert_abs_diff_eq!(cl_oracle, 3.0, epsilon = 1e-9);
    assert_abs_diff_eq!(glp_oracle, 2.0 * 3f64.sqrt(), epsilon = 1e-9);
    let cl = estimate(&l2, ConstantId::CL, &defaults()).unwrap();
    let glp = estimate(&l2, ConstantId::GLp(1.0), &defaults()).unwrap();
    assert_abs_diff_eq!(cl.value, cl_oracle, epsilon = 1e-6);
    assert_abs_diff_eq!(glp.value, glp_oracle, epsilon = 1e-6);
}

#[test]
fn hilbert_delta_matches_oracle() {
    let mut oracle = f64::INFINITY;
    euclid_pairs(720, |x, y| {
        if euclid([x[0] - y[0], x[1] - y[1]]) >= 1.0 - 1e-12 {
            oracle = oracle.min(1.0 - euclid([x[0] + y[0], x[1] + y[1]]) / 2.0);
        }
    });
    let exact = 1.0 - 3f64.sqrt() / 2.0;
    assert_abs_diff_eq!(oracle, exact, epsilon = 1e-6);
    let est = estimate(&NormSpec::lp(2, 2.0), ConstantId::Delta(1.0), &defaults()).unwrap();
    assert_abs_diff_eq!(est.value, exact, epsilon = 1e-6);
    assert!(est.value <= oracle + 1e-12);
}

#[test]
fn hilbert_modulus_at_other_distances() {
    let l2 = NormSpec::lp(2, 2.0);
    for eps in [0.5, 1.5, 2.0] {
        let est = estimate(&l2, ConstantId::Delta(eps), &grid(512)).unwrap();
        assert_abs_diff_eq!(est.value, 1.0 - (1.0 - eps * eps / 4.0).sqrt(), epsilon = 1e-8);
    }
}

#[test]
fn hilbert_james_matches_oracle() {
    let mut oracle = 0.0f64;
    euclid_pairs(1024, |x, y| {
        let s = euclid([x[0] + y[0], x[1] + y[1]]);
        let d = euclid([x[0] - y[0], x[1] - y[1]]);
        oracle = oracle.max(s.min(d));
    });
    let est = estimate(&NormSpec::lp(2, 2.0), ConstantId::J, &defaults()).unwrap();
    assert_abs_diff_eq!(oracle, 2f64.sqrt(), epsilon = 1e-9);
    assert_abs_diff_eq!(est.value, 2f64.sqrt(), epsilon = 1e-6);
}

#[test]
fn hilbert_jordan_von_neumann_and_zbaganu() {
    let l2 = NormSpec::lp(2, 2.0);
    let p = grid(256);
    assert_abs_diff_eq!(estimate(&l2, ConstantId::CNJ, &p).unwrap().value, 1.0, epsilon = 1e-12);
    let cz = estimate(&l2, ConstantId::CZ, &p).unwrap();
    assert_abs_diff_eq!(cz.value, 1.0, epsilon = 1e-12);
}

#[test]
fn square_examples() {
    let linf = NormSpec::linf(2);
    let gl = estimate(&linf, ConstantId::GL, &grid(256)).unwrap();
    assert_eq!(gl.value, 8.0);
    assert_eq!(gl.witness.x.coords(), &[1.0, 1.0]);
    assert_eq!(gl.witness.y.coords(), &[1.0, 0.0]);
    assert_eq!(gl.witness.residuals, Some([0.0; 3]));
    assert_eq!(estimate(&linf, ConstantId::CL, &grid(256)).unwrap().value, 4.0);
    let cnj = estimate(&linf, ConstantId::CNJ, &grid(64)).unwrap();
    assert_abs_diff_eq!(cnj.value, 2.0, epsilon = 1e-12);
    assert_eq!(ConstantId::CNJ.evaluate(&linf, &[1.0, 1.0], &[1.0, -1.0]), 2.0);
}

#[test]
fn diamond_reaches_eight() {
    // the 45° rotation of the square witness, scaled onto the diamond
    let l1 = NormSpec::lp(2, 1.0);
    let (x, y) = ([1.0, 0.0], [0.5, 0.5]);
    assert_eq!(l1.norm(&x), 1.0);
    assert_eq!(l1.norm(&y), 1.0);
    assert_eq!(l1.norm(&[0.5, -0.5]), 1.0);
    assert_eq!(ConstantId::GL.evaluate(&l1, &x, &y), 8.0);
    let est = estimate(&l1, ConstantId::GL, &grid(256)).unwrap();
    assert_abs_diff_eq!(est.value, 8.0, epsilon = 1e-12);
}

#[test]
fn delta_at_zero_is_zero() {
    for spec in [NormSpec::lp(2, 2.0), NormSpec::lp(2, 3.0), NormSpec::linf(2), NormSpec::hexagon()] {
        for form in [DeltaForm::AtLeast, DeltaForm::Exactly] {
            let p = EstimateParams { delta_form: form, ..grid(128) };
            assert_eq!(estimate(&spec, ConstantId::Delta(0.0), &p).unwrap().value, 0.0);
        }
    }
}

#[test]
fn flat_spheres_have_zero_modulus_at_one() {
    for spec in [NormSpec::linf(2), NormSpec::lp(2, 1.0), NormSpec::hexagon()] {
        let est = estimate(&spec, ConstantId::Delta(1.0), &grid(256)).unwrap();
        assert_abs_diff_eq!(est.value, 0.0, epsilon = 1e-12);
    }
}

#[test]
fn dual_examples() {
    let p = grid(512);
    let h = estimate_on_dual(&NormSpec::lp(2, 2.0), ConstantId::H, &p).unwrap();
    assert_abs_diff_eq!(h.value, 3f64.sqrt(), epsilon = 1e-6);
    assert!(h.dual);
    assert_eq!(h.label(), "H*");
    let h = estimate_on_dual(&NormSpec::linf(2), ConstantId::H, &p).unwrap();
    assert_abs_diff_eq!(h.value, 2.0, epsilon = 1e-12);
    let via_dual = estimate_on_dual(&NormSpec::lp(2, 3.0), ConstantId::GL, &p).unwrap();
    let direct = estimate(&NormSpec::lp(2, 1.5), ConstantId::GL, &p).unwrap();
    assert_eq!(via_dual.value, direct.value);
}

#[test]
fn convergence_sequences() {
    let l2 = NormSpec::lp(2, 2.0);
    let gl = refine_convergence(&l2, ConstantId::GL, &[64, 256, 1024], &defaults()).unwrap();
    assert!(gl.windows(2).all(|w| w[0].value <= w[1].value));
    assert_abs_diff_eq!(gl[2].value, 6.0, epsilon = 1e-6);
    assert_eq!(gl.iter().map(|e| e.theta_grid).collect::<Vec<_>>(), vec![64, 256, 1024]);

    let sq = refine_convergence(&NormSpec::linf(2), ConstantId::GL, &[8, 64], &defaults()).unwrap();
    assert_eq!(sq[0].value, 8.0);

    let d = refine_convergence(&l2, ConstantId::Delta(1.0), &[64, 1024], &defaults()).unwrap();
    assert!(d[1].value <= d[0].value);
    assert_abs_diff_eq!(d[1].value, 1.0 - 3f64.sqrt() / 2.0, epsilon = 1e-6);
}

#[test]
fn three_dimensional_euclidean_sections() {
    let l3 = NormSpec::lp(3, 2.0);
    let p = EstimateParams {
        sampling: SamplingParams { theta_grid: 512, phi_grid: 512, sections: 6, ..Default::default() },
        ..Default::default()
    };
    let gl3 = estimate(&l3, ConstantId::GL, &p).unwrap();
    let gl2 = estimate(&NormSpec::lp(2, 2.0), ConstantId::GL, &p).unwrap();
    assert_abs_diff_eq!(gl3.value, gl2.value, epsilon = 1e-6);
    assert_eq!(gl3.sections, 3 + 6);
    assert_eq!(gl3.witness.x.len(), 3);
}

#[test]
fn estimates_equal_objective_at_witness() {
    let specs = [NormSpec::lp(2, 1.5), NormSpec::hexagon(), NormSpec::weighted_lp(3.0, vec![1.0, 2.0])];
    let ids = [
        ConstantId::H,
        ConstantId::GL,
        ConstantId::GLp(2.5),
        ConstantId::CL,
        ConstantId::J,
        ConstantId::CNJ,
        ConstantId::CZ,
        ConstantId::Delta(1.2),
    ];
    for spec in &specs {
        let spec = spec.clone().validated().unwrap();
        for id in ids {
            let e = estimate(&spec, id, &grid(96)).unwrap();
            let at = id.evaluate(&spec, &e.witness.x, &e.witness.y);
            assert!((e.value - at).abs() <= 1e-12, "{id} on {spec:?}: {} vs {at}", e.value);
        }
    }
}

#[test]
fn refinement_never_hurts() {
    for spec in [NormSpec::lp(2, 3.0), NormSpec::lp(2, 1.25)] {
        for id in [ConstantId::GL, ConstantId::J, ConstantId::Delta(1.0)] {
            let raw = estimate(&spec, id, &EstimateParams { refine: false, ..grid(128) }).unwrap();
            let pol = estimate(&spec, id, &grid(128)).unwrap();
            match id {
                ConstantId::Delta(_) => assert!(pol.value <= raw.value),
                _ => assert!(pol.value >= raw.value),
            }
            assert!(!raw.refined);
        }
    }
}

#[test]
fn estimate_json_shape() {
    let e = estimate(&NormSpec::linf(2), ConstantId::GL, &grid(64)).unwrap();
    let v: serde_json::Value = serde_json::from_str(&serde_json::to_string(&e).unwrap()).unwrap();
    assert_eq!(v["id"], "GL");
    assert_eq!(v["value"], 8.0);
    assert_eq!(v["direction"], "lower-bound-of-sup");
    assert_eq!(v["witness"]["x"], serde_json::json!([1.0, 1.0]));
    let d = estimate(&NormSpec::linf(2), ConstantId::Delta(0.5), &grid(64)).unwrap();
    let v = serde_json::to_value(&d).unwrap();
    assert_eq!(v["direction"], "upper-bound-of-inf");
    assert_eq!(v["delta_form"], "at-least");
}
