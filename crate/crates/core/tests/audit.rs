use std::collections::BTreeSet;

use approx::assert_abs_diff_eq;
use inscribed_core::audit::{
    hilbert_identity_probe, identity_residuals, ledger_check_ids, run_audit, FlagKind, Verdict, LP_CHECK,
    REPORT_VERSION,
};
use inscribed_core::{Error, EstimateParams, NormSpec, SamplingParams};

fn params(n: usize) -> EstimateParams {
    EstimateParams::default().with_grid(n)
}

#[test]
fn euclidean_plane_passes_everything() {
    let r = run_audit(&NormSpec::lp(2, 2.0), 1e-6, &EstimateParams::default()).unwrap();
    for c in &r.checks {
        assert_eq!(c.verdict, Verdict::Pass, "{c:?}");
    }
    let d = r.check("delta1.vs.GL").unwrap();
    assert_abs_diff_eq!(d.lhs, 3.0, epsilon = 1e-6);
    assert_abs_diff_eq!(d.rhs, 2.0, epsilon = 1e-6);
    assert_abs_diff_eq!(d.slack, 1.0, epsilon = 1e-6);

    let lo = r.check("dual.H.lower").unwrap();
    assert_abs_diff_eq!(lo.lhs, 2.0 * 3f64.sqrt() - 2.0, epsilon = 1e-6);
    assert_abs_diff_eq!(lo.rhs, 3f64.sqrt(), epsilon = 1e-6);
    let hi = r.check("dual.H.upper").unwrap();
    assert_abs_diff_eq!(hi.rhs, 3f64.sqrt() / 2.0 + 1.0, epsilon = 1e-6);
    assert!(!r.has_flag(FlagKind::NotStrictlyConvex));
    assert!(r.has_flag(FlagKind::UniformlyNonSquareConsistent));
}

#[test]
fn euclidean_space_passes_everything() {
    let p = EstimateParams {
        sampling: SamplingParams { theta_grid: 512, phi_grid: 512, sections: 8, ..Default::default() },
        ..Default::default()
    };
    let r = run_audit(&NormSpec::lp(3, 2.0), 1e-6, &p).unwrap();
    assert!(r.checks.iter().all(|c| c.verdict == Verdict::Pass));
}

#[test]
fn square_is_flagged() {
    let r = run_audit(&NormSpec::linf(2), 1e-6, &params(256)).unwrap();
    assert!(r.passed());
    let c = r.check("GL.upper").unwrap();
    assert_eq!((c.lhs, c.slack, c.verdict), (8.0, 0.0, Verdict::Pass));
    let flag = r.flags.iter().find(|f| f.flag == FlagKind::NotStrictlyConvex).unwrap();
    let (u, v) = flag.witness.as_ref().unwrap();
    let spec = NormSpec::linf(2);
    assert_ne!(u, v);
    let mid: Vec<f64> = u.iter().zip(v.iter()).map(|(a, b)| (a + b) / 2.0).collect();
    assert!(spec.norm(&mid) >= 1.0 - 1e-6);
}

#[test]
fn lp3_curve_check() {
    let r = run_audit(&NormSpec::lp(2, 3.0), 1e-6, &params(512)).unwrap();
    let c = r.check(LP_CHECK).unwrap();
    assert_abs_diff_eq!(c.rhs, 2.0 * 7f64.powf(2.0 / 3.0), epsilon = 1e-12);
    assert_abs_diff_eq!(c.rhs, 7.3186, epsilon = 1e-4);
    assert_eq!(c.verdict, Verdict::Pass);
}

#[test]
fn check_ids_form_the_ledger() {
    let ledger: BTreeSet<String> = ledger_check_ids().into_iter().collect();
    for (spec, extra) in [(NormSpec::lp(2, 1.5), true), (NormSpec::hexagon(), false), (NormSpec::linf(2), false)] {
        let r = run_audit(&spec, 1e-6, &params(128)).unwrap();
        let mut ids: BTreeSet<String> = r.checks.iter().map(|c| c.check_id.clone()).collect();
        assert_eq!(ids.remove(LP_CHECK), extra);
        assert_eq!(ids, ledger);
        let labels: BTreeSet<String> = r.estimates.iter().map(|e| e.label()).collect();
        for c in &r.checks {
            assert!(!c.refs.is_empty());
            for l in &c.refs {
                assert!(labels.contains(l), "{} reads missing estimate {l}", c.check_id);
            }
        }
    }
}

#[test]
fn report_json_layout() {
    let r = run_audit(&NormSpec::linf(2), 1e-6, &params(64)).unwrap();
    let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
    assert_eq!(v["version"], REPORT_VERSION);
    assert_eq!(v["spec"]["family"], "linf");
    let check = v["checks"][0].as_object().unwrap();
    let keys: Vec<&str> = check.keys().map(|k| k.as_str()).collect();
    let mut expected = vec!["check_id", "lhs", "rhs", "relation", "slack", "verdict", "note"];
    expected.sort();
    let mut keys = keys;
    keys.sort();
    assert_eq!(keys, expected);
    assert_eq!(v["flags"][0]["flag"], "not-strictly-convex");
    assert_eq!(r.to_json(), run_audit(&NormSpec::linf(2), 1e-6, &params(64)).unwrap().to_json());
}

#[test]
fn verdicts_are_monotone_in_tol() {
    let spec = NormSpec::lp(2, 1.25);
    let tight = run_audit(&spec, 1e-12, &params(64)).unwrap();
    let loose = run_audit(&spec, 1e-3, &params(64)).unwrap();
    for (a, b) in tight.checks.iter().zip(&loose.checks) {
        if a.verdict == Verdict::Pass {
            assert_eq!(b.verdict, Verdict::Pass, "{}", a.check_id);
        }
    }
}

#[test]
fn bad_inputs() {
    assert!(matches!(run_audit(&NormSpec::lp(2, 2.0), 0.0, &params(64)), Err(Error::InvalidParameter(_))));
    assert!(run_audit(&NormSpec::lp(2, 0.5), 1e-6, &params(64)).unwrap_err().is_input_error());
}

#[test]
fn identity_probe() {
    let l2 = hilbert_identity_probe(&NormSpec::lp(2, 2.0), &SamplingParams::default()).unwrap();
    assert_eq!(l2.verdict, Verdict::Pass);
    assert!(l2.lhs <= 1e-8);

    let sq = hilbert_identity_probe(&NormSpec::linf(2), &SamplingParams::default().with_grid(256)).unwrap();
    assert_eq!(sq.verdict, Verdict::Inconclusive);
    assert!(sq.note.starts_with("informational"));
    assert!(sq.lhs >= 1.0);

    let p3 = SamplingParams { theta_grid: 256, phi_grid: 256, sections: 8, ..Default::default() };
    let r = identity_residuals(&NormSpec::lp(3, 2.0), &p3).unwrap();
    assert!(r.parallelogram <= 1e-8 && r.three <= 1e-8);
    assert_eq!(hilbert_identity_probe(&NormSpec::lp(3, 2.0), &p3).unwrap().verdict, Verdict::Pass);
}
