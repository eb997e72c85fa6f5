//! Inequality ledger evaluated against numeric estimates.
//!
//! Each check compares two sides built from estimates. Every side carries
//! a [`Bound`] telling which way the true value can lie, so a violated
//! check is reported as `fail` only when the estimates certify the
//! violation, and as `inconclusive` otherwise.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::constants::{ConstantEstimate, ConstantId, DeltaForm, Direction, EstimateParams, Estimator};
use crate::error::{Error, Result};
use crate::manifold::{sample_T, AdmissiblePair, SamplingParams};
use crate::norm::{Family, NormSpec, VectorF};
use crate::sig;

pub const REPORT_VERSION: &str = "ledger_v1";
pub const DEFAULT_TOL: f64 = 1e-6;
/// Exponents at which the `G_L(X,p)` checks run.
pub const LEDGER_EXPONENTS: [f64; 5] = [1.0, 1.5, 2.0, 3.0, 4.0];
/// Residual threshold of [`hilbert_identity_probe`].
pub const IDENTITY_TOL: f64 = 1e-8;

/// Ids of every check [`run_audit`] emits, in report order. The `ℓ_p`
/// family adds [`LP_CHECK`] at the end.
pub fn ledger_check_ids() -> Vec<String> {
    let mut ids: Vec<String> = [
        "GL.lower",
        "GL.upper",
        "H.upper",
        "H2.le.GL_half",
        "CL.le.GL_half",
        "CL.ge.9_minus_GL_half",
        "delta1.vs.GL",
        "delta.forms",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    for p in LEDGER_EXPONENTS {
        let p = sig::format(p);
        ids.push(format!("GLp.lower(p={p})"));
        ids.push(format!("GLp.upper(p={p})"));
        ids.push(format!("H.le.GLp_root(p={p})"));
    }
    ids.push("dual.H.lower".into());
    ids.push("dual.H.upper".into());
    ids
}

pub const LP_CHECK: &str = "GL.lp_curve";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Ge => ">=",
            Relation::Eq => "=",
        }
    }

    pub fn slack(self, lhs: f64, rhs: f64) -> f64 {
        match self {
            Relation::Le => rhs - lhs,
            Relation::Ge => lhs - rhs,
            Relation::Eq => -(lhs - rhs).abs(),
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl Serialize for Relation {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.symbol())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

/// Where the true value of a check side lies relative to its estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bound {
    Exact,
    /// true >= estimate
    Lower,
    /// true <= estimate
    Upper,
}

impl Bound {
    fn of(e: &ConstantEstimate) -> Self {
        match e.direction {
            Direction::LowerBoundOfSup => Bound::Lower,
            Direction::UpperBoundOfInf => Bound::Upper,
        }
    }

    /// The bound after applying a decreasing map.
    fn flip(self) -> Self {
        match self {
            Bound::Exact => Bound::Exact,
            Bound::Lower => Bound::Upper,
            Bound::Upper => Bound::Lower,
        }
    }

    fn at_least(self) -> bool {
        matches!(self, Bound::Exact | Bound::Lower)
    }

    fn at_most(self) -> bool {
        matches!(self, Bound::Exact | Bound::Upper)
    }
}

/// One side of a check.
#[derive(Debug, Clone, Copy)]
pub struct Side {
    pub value: f64,
    pub bound: Bound,
}

impl Side {
    pub fn exact(value: f64) -> Self {
        Self { value, bound: Bound::Exact }
    }

    fn of(e: &ConstantEstimate) -> Self {
        Self { value: e.value, bound: Bound::of(e) }
    }

    /// Applies an increasing map.
    fn map(self, f: impl Fn(f64) -> f64) -> Self {
        Self { value: f(self.value), bound: self.bound }
    }

    /// Applies a decreasing map.
    fn map_down(self, f: impl Fn(f64) -> f64) -> Self {
        Self { value: f(self.value), bound: self.bound.flip() }
    }
}

/// Verdict of `lhs rel rhs`: pass within `tol`, otherwise fail only when
/// the bound directions certify the violation.
pub fn verdict(lhs: Side, rel: Relation, rhs: Side, tol: f64) -> Verdict {
    if rel.slack(lhs.value, rhs.value) >= -tol {
        return Verdict::Pass;
    }
    let certified = match rel {
        Relation::Le => lhs.bound.at_least() && rhs.bound.at_most(),
        Relation::Ge => lhs.bound.at_most() && rhs.bound.at_least(),
        Relation::Eq => {
            if lhs.value > rhs.value {
                lhs.bound.at_least() && rhs.bound.at_most()
            } else {
                lhs.bound.at_most() && rhs.bound.at_least()
            }
        }
    };
    if certified {
        Verdict::Fail
    } else {
        Verdict::Inconclusive
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub check_id: String,
    #[serde(serialize_with = "sig::serialize")]
    pub lhs: f64,
    #[serde(serialize_with = "sig::serialize")]
    pub rhs: f64,
    pub relation: Relation,
    #[serde(serialize_with = "sig::serialize")]
    pub slack: f64,
    pub verdict: Verdict,
    pub note: String,
    /// Labels of the estimates this check reads.
    #[serde(skip)]
    pub refs: Vec<String>,
}

impl CheckResult {
    fn new(id: impl Into<String>, lhs: Side, rel: Relation, rhs: Side, tol: f64, note: impl Into<String>) -> Self {
        Self {
            check_id: id.into(),
            lhs: lhs.value,
            rhs: rhs.value,
            relation: rel,
            slack: rel.slack(lhs.value, rhs.value),
            verdict: verdict(lhs, rel, rhs, tol),
            note: note.into(),
            refs: Vec::new(),
        }
    }

    fn refs(mut self, refs: &[&ConstantEstimate]) -> Self {
        self.refs = refs.iter().map(|e| e.label()).collect();
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FlagKind {
    NotStrictlyConvex,
    UniformlyNonSquareConsistent,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Flag {
    pub flag: FlagKind,
    pub note: String,
    /// Two distinct unit vectors whose midpoint has norm `~1`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<(VectorF, VectorF)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AuditReport {
    pub version: &'static str,
    pub spec: NormSpec,
    #[serde(serialize_with = "sig::serialize")]
    pub tol: f64,
    pub estimates: Vec<ConstantEstimate>,
    pub checks: Vec<CheckResult>,
    pub flags: Vec<Flag>,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.verdict != Verdict::Fail)
    }

    pub fn check(&self, id: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.check_id == id)
    }

    pub fn has_flag(&self, kind: FlagKind) -> bool {
        self.flags.iter().any(|f| f.flag == kind)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Fixed-width table: check id, lhs, relation, rhs, slack, verdict.
    pub fn summary_table(&self) -> String {
        let width = self.checks.iter().map(|c| c.check_id.len()).max().unwrap_or(8).max(8);
        let mut out =
            format!("{:<width$}  {:>16}  {:<2}  {:>16}  {:>16}  {}\n", "check", "lhs", "", "rhs", "slack", "verdict");
        for c in &self.checks {
            out.push_str(&format!(
                "{:<width$}  {:>16}  {:<2}  {:>16}  {:>16}  {}\n",
                c.check_id,
                sig::format(c.lhs),
                c.relation.symbol(),
                sig::format(c.rhs),
                sig::format(c.slack),
                c.verdict
            ));
        }
        for f in &self.flags {
            let name = serde_json::to_value(f.flag).expect("flag name");
            out.push_str(&format!("flag: {}\n", name.as_str().unwrap_or_default()));
        }
        out
    }
}

/// Runs the full ledger on `spec`.
pub fn run_audit(spec: &NormSpec, tol: f64, params: &EstimateParams) -> Result<AuditReport> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tol must be positive (got {tol})")));
    }
    let spec = spec.clone().validated()?;
    let primal = Estimator::new(&spec, params)?;
    let gl = primal.estimate(ConstantId::GL)?;
    let h = primal.estimate(ConstantId::H)?;
    let cl = primal.estimate(ConstantId::CL)?;
    let glp = LEDGER_EXPONENTS.iter().map(|&p| primal.estimate(ConstantId::GLp(p))).collect::<Result<Vec<_>>>()?;
    let delta = primal.estimate(ConstantId::Delta(1.0))?;
    let exact_params = EstimateParams { delta_form: DeltaForm::Exactly, ..params.clone() };
    let delta_eq = Estimator::new(&spec, &exact_params)?.estimate(ConstantId::Delta(1.0))?;
    let dual_spec = spec.dual_spec()?;
    let h_dual = Estimator::new(&dual_spec, params)?.dual().estimate(ConstantId::H)?;

    let (gl_s, h_s, cl_s) = (Side::of(&gl), Side::of(&h), Side::of(&cl));
    let mut checks = vec![
        CheckResult::new("GL.lower", gl_s, Relation::Ge, Side::exact(4.5), tol, "9/2 <= G_L").refs(&[&gl]),
        CheckResult::new("GL.upper", gl_s, Relation::Le, Side::exact(8.0), tol, "G_L <= 8").refs(&[&gl]),
        CheckResult::new("H.upper", h_s, Relation::Le, Side::exact(2.0), tol, "H <= 2").refs(&[&h]),
        CheckResult::new("H2.le.GL_half", h_s.map(|v| v * v), Relation::Le, gl_s.map(|v| v / 2.0), tol, "H^2 <= G_L/2")
            .refs(&[&h, &gl]),
        CheckResult::new("CL.le.GL_half", cl_s, Relation::Le, gl_s.map(|v| v / 2.0), tol, "C_L <= G_L/2")
            .refs(&[&cl, &gl]),
        CheckResult::new(
            "CL.ge.9_minus_GL_half",
            cl_s,
            Relation::Ge,
            gl_s.map_down(|v| (9.0 - v) / 2.0),
            tol,
            "C_L >= (9 - G_L)/2",
        )
        .refs(&[&cl, &gl]),
        CheckResult::new(
            "delta1.vs.GL",
            Side::of(&delta).map_down(|d| 4.0 * (1.0 - d) * (1.0 - d)),
            Relation::Ge,
            gl_s.map(|v| v - 4.0),
            tol,
            "4(1 - delta(1))^2 >= G_L - 4",
        )
        .refs(&[&delta, &gl]),
        CheckResult::new(
            "delta.forms",
            Side::of(&delta),
            Relation::Eq,
            Side::of(&delta_eq),
            tol,
            "delta(1) with ||x-y|| >= 1 equals delta(1) with ||x-y|| = 1",
        )
        .refs(&[&delta, &delta_eq]),
    ];
    for (p, e) in LEDGER_EXPONENTS.iter().zip(&glp) {
        let ps = sig::format(*p);
        let s = Side::of(e);
        let lo = 2f64.powf(1.0 - p) * 3f64.powf(*p);
        let hi = 2f64.powf(p + 1.0);
        checks.push(
            CheckResult::new(
                format!("GLp.lower(p={ps})"),
                s,
                Relation::Ge,
                Side::exact(lo),
                tol,
                "2^(1-p) 3^p <= G_L(p)",
            )
            .refs(&[e]),
        );
        checks.push(
            CheckResult::new(format!("GLp.upper(p={ps})"), s, Relation::Le, Side::exact(hi), tol, "G_L(p) <= 2^(p+1)")
                .refs(&[e]),
        );
        checks.push(
            CheckResult::new(
                format!("H.le.GLp_root(p={ps})"),
                h_s,
                Relation::Le,
                s.map(|v| 2f64.powf(-1.0 / p) * v.powf(1.0 / p)),
                tol,
                "H <= 2^(-1/p) G_L(p)^(1/p)",
            )
            .refs(&[&h, e]),
        );
    }
    let hd_s = Side::of(&h_dual);
    checks.push(
        CheckResult::new("dual.H.lower", h_s.map(|v| 2.0 * v - 2.0), Relation::Le, hd_s, tol, "2H - 2 <= H(X*)")
            .refs(&[&h, &h_dual]),
    );
    checks.push(
        CheckResult::new("dual.H.upper", hd_s, Relation::Le, h_s.map(|v| v / 2.0 + 1.0), tol, "H(X*) <= H/2 + 1")
            .refs(&[&h_dual, &h]),
    );
    if spec.family() == Family::Lp {
        let p = spec.exponent().expect("lp exponent");
        let (bound, note) = lp_curve(p);
        checks.push(CheckResult::new(LP_CHECK, gl_s, Relation::Le, Side::exact(bound), tol, note).refs(&[&gl]));
    }

    let mut flags = Vec::new();
    if gl.value >= 8.0 - tol {
        if let Some((u, v)) = flat_segment(&primal, tol)? {
            flags.push(Flag {
                flag: FlagKind::NotStrictlyConvex,
                note: "G_L estimate reaches 8 and the unit sphere contains a segment".into(),
                witness: Some((u, v)),
            });
        }
    }
    if h.value <= (gl.value / 2.0).sqrt() + tol {
        flags.push(Flag {
            flag: FlagKind::UniformlyNonSquareConsistent,
            note: "H estimate <= sqrt(G_L/2) on a shared sample".into(),
            witness: None,
        });
    }

    let mut estimates = vec![gl, h, cl];
    estimates.extend(glp);
    estimates.extend([delta, delta_eq, h_dual]);
    Ok(AuditReport { version: REPORT_VERSION, spec, tol, estimates, checks, flags })
}

/// Upper bound for `G_L(ℓ_p)`: `2(2^p-1)^(2/p)` for `p >= 2`, else `2*3^(2/p)`.
pub fn lp_curve(p: f64) -> (f64, &'static str) {
    if p >= 2.0 {
        (2.0 * (2f64.powf(p) - 1.0).powf(2.0 / p), "G_L(l_p) <= 2(2^p - 1)^(2/p)")
    } else {
        (2.0 * 3f64.powf(2.0 / p), "G_L(l_p) <= 2*3^(2/p)")
    }
}

/// First sampled triangle pair `(x, y)` with `||x + y|| >= 2 - 2 tol`.
fn flat_segment(est: &Estimator, tol: f64) -> Result<Option<(VectorF, VectorF)>> {
    Ok(est.triangle_pairs()?.find(|(x, y)| {
        let sum: Vec<f64> = x.iter().zip(y.iter()).map(|(a, b)| a + b).collect();
        est.spec().norm(&sum) >= 2.0 - 2.0 * tol
    }))
}

/// Maxima over a `T(X)` sample of the two inner-product identities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdentityResiduals {
    /// `max |2(|x|^2 + |x-y|^2) - |2x-y|^2 - |y|^2|`
    pub parallelogram: f64,
    /// `max(|x+y|^2 - 3|, ||2x-y|^2 - 3|)`
    pub three: f64,
    pub pairs: usize,
}

/// `2(|x|^2 + |x-y|^2) - |2x-y|^2 - |y|^2` at one pair.
pub fn parallelogram_residual(spec: &NormSpec, x: &[f64], y: &[f64]) -> f64 {
    let comb = |a: f64, b: f64| -> f64 {
        let v: Vec<f64> = x.iter().zip(y).map(|(p, q)| a * p + b * q).collect();
        spec.norm(&v)
    };
    let sq = |v: f64| v * v;
    2.0 * (sq(comb(1.0, 0.0)) + sq(comb(1.0, -1.0))) - sq(comb(2.0, -1.0)) - sq(comb(0.0, 1.0))
}

pub fn identity_residuals(spec: &NormSpec, params: &SamplingParams) -> Result<IdentityResiduals> {
    let pairs: Vec<AdmissiblePair> = sample_T(spec, params)?;
    let mut out = IdentityResiduals { parallelogram: 0.0, three: 0.0, pairs: pairs.len() };
    for pair in &pairs {
        let (x, y) = (&pair.x, &pair.y);
        out.parallelogram = out.parallelogram.max(parallelogram_residual(spec, x, y).abs());
        let sum: Vec<f64> = x.iter().zip(y.iter()).map(|(a, b)| a + b).collect();
        let diff: Vec<f64> = x.iter().zip(y.iter()).map(|(a, b)| 2.0 * a - b).collect();
        let (a, b) = (spec.norm(&sum), spec.norm(&diff));
        out.three = out.three.max((a * a - 3.0).abs()).max((b * b - 3.0).abs());
    }
    Ok(out)
}

/// Checks the inner-product identities on sampled triangle pairs. Fails only
/// on a Hilbert norm; for other norms the residual is informational.
pub fn hilbert_identity_probe(spec: &NormSpec, params: &SamplingParams) -> Result<CheckResult> {
    let r = identity_residuals(spec, params)?;
    let worst = r.parallelogram.max(r.three);
    let slack = IDENTITY_TOL - worst;
    let (verdict, kind) = if !spec.is_hilbert() {
        (Verdict::Inconclusive, "informational")
    } else if slack >= 0.0 {
        (Verdict::Pass, "hilbert")
    } else {
        (Verdict::Fail, "hilbert")
    };
    Ok(CheckResult {
        check_id: "hilbert.identities".into(),
        lhs: worst,
        rhs: IDENTITY_TOL,
        relation: Relation::Le,
        slack,
        verdict,
        note: format!(
            "{kind}: parallelogram residual {}, |.|^2 = 3 residual {}, {} pairs",
            sig::format(r.parallelogram),
            sig::format(r.three),
            r.pairs
        ),
        refs: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lower(v: f64) -> Side {
        Side { value: v, bound: Bound::Lower }
    }

    fn upper(v: f64) -> Side {
        Side { value: v, bound: Bound::Upper }
    }

    #[test]
    fn verdicts_respect_directions() {
        let tol = 1e-6;
        assert_eq!(verdict(lower(8.5), Relation::Le, Side::exact(8.0), tol), Verdict::Fail);
        assert_eq!(verdict(upper(8.5), Relation::Le, Side::exact(8.0), tol), Verdict::Inconclusive);
        assert_eq!(verdict(lower(4.0), Relation::Ge, Side::exact(4.5), tol), Verdict::Inconclusive);
        assert_eq!(verdict(upper(4.0), Relation::Ge, Side::exact(4.5), tol), Verdict::Fail);
        assert_eq!(verdict(lower(8.0 + 5e-7), Relation::Le, Side::exact(8.0), tol), Verdict::Pass);
        assert_eq!(verdict(lower(1.0), Relation::Le, lower(0.5), tol), Verdict::Inconclusive);
        assert_eq!(verdict(upper(0.2), Relation::Eq, upper(0.1), tol), Verdict::Inconclusive);
        assert_eq!(verdict(Side::exact(0.2), Relation::Eq, Side::exact(0.1), tol), Verdict::Fail);
    }

    #[test]
    fn verdicts_are_monotone_in_tol() {
        let sides = [lower(1.0), upper(1.0), Side::exact(1.0), lower(1.001), upper(0.999)];
        for l in sides {
            for r in sides {
                for rel in [Relation::Le, Relation::Ge, Relation::Eq] {
                    let tight = verdict(l, rel, r, 1e-6);
                    let loose = verdict(l, rel, r, 1e-2);
                    if tight == Verdict::Pass {
                        assert_eq!(loose, Verdict::Pass);
                    }
                }
            }
        }
    }

    #[test]
    fn decreasing_maps_flip_bounds() {
        let d = upper(0.1).map_down(|v| 1.0 - v);
        assert_eq!(d.bound, Bound::Lower);
        assert_eq!(Side::exact(2.0).map_down(|v| -v).bound, Bound::Exact);
    }

    #[test]
    fn lp_curve_meets_hilbert_value() {
        assert!((lp_curve(2.0).0 - 6.0).abs() < 1e-12);
        assert!((lp_curve(3.0).0 - 2.0 * 7f64.powf(2.0 / 3.0)).abs() < 1e-12);
        assert!((lp_curve(1.0).0 - 18.0).abs() < 1e-12);
    }

    #[test]
    fn parallelogram_residual_at_square_witness() {
        assert_eq!(parallelogram_residual(&NormSpec::linf(2), &[1.0, 1.0], &[1.0, 0.0]), -1.0);
        let r = parallelogram_residual(&NormSpec::lp(2, 2.0), &[1.0, 0.0], &[0.5, 0.75f64.sqrt()]);
        assert!(r.abs() < 1e-12);
    }

    #[test]
    fn ledger_ids_are_unique() {
        let ids = ledger_check_ids();
        let mut sorted = ids.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), ids.len());
        assert_eq!(ids.len(), 8 + 3 * LEDGER_EXPONENTS.len() + 2);
    }
}
