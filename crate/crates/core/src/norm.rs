//! Finite-dimensional normed spaces: declarative norm descriptions, norm
//! and dual-norm evaluation, and sampled checks of the norm axioms.

use std::fmt;
use std::ops::Deref;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::polytope::Polytope;
use crate::sig;

/// A point of `R^n` with finite coordinates.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(try_from = "Vec<f64>")]
pub struct VectorF(Vec<f64>);

impl VectorF {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self(coords))
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub(crate) fn from_raw(coords: Vec<f64>) -> Self {
        Self(coords)
    }
}

impl Deref for VectorF {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl<const N: usize> From<[f64; N]> for VectorF {
    fn from(a: [f64; N]) -> Self {
        Self(a.to_vec())
    }
}

impl TryFrom<Vec<f64>> for VectorF {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl Serialize for VectorF {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        sig::serialize_slice(&self.0, s)
    }
}

/// Coefficients of a linear functional in the standard dual basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualVector(pub Vec<f64>);

impl DualVector {
    /// The pairing `<f, v>`.
    pub fn apply(&self, v: &[f64]) -> f64 {
        self.0.iter().zip(v).map(|(a, b)| a * b).sum()
    }
}

impl Deref for DualVector {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    #[serde(rename = "lp")]
    Lp,
    #[serde(rename = "wlp")]
    WeightedLp,
    #[serde(rename = "linf")]
    Linf,
    #[serde(rename = "polyhedral")]
    Polyhedral,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Lp => "lp",
            Family::WeightedLp => "wlp",
            Family::Linf => "linf",
            Family::Polyhedral => "polyhedral",
        })
    }
}

/// A norm on `R^dim`, one of four declarative families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "NormSpecFile", into = "NormSpecFile")]
pub enum NormSpec {
    Lp {
        dim: usize,
        p: f64,
    },
    /// `(sum_i w_i |x_i|^p)^(1/p)`.
    WeightedLp {
        dim: usize,
        p: f64,
        weights: Vec<f64>,
    },
    Linf {
        dim: usize,
    },
    /// Gauge of the convex hull of a centrally symmetric vertex set.
    Polyhedral(Polytope),
}

impl NormSpec {
    pub fn lp(dim: usize, p: f64) -> Self {
        NormSpec::Lp { dim, p }
    }

    pub fn linf(dim: usize) -> Self {
        NormSpec::Linf { dim }
    }

    pub fn weighted_lp(p: f64, weights: Vec<f64>) -> Self {
        NormSpec::WeightedLp { dim: weights.len(), p, weights }
    }

    /// An unvalidated polyhedral spec; see [`NormSpec::validated`].
    pub fn polyhedral(dim: usize, vertices: Vec<Vec<f64>>) -> Self {
        NormSpec::Polyhedral(Polytope::from_vertices(dim, vertices))
    }

    /// Regular hexagon with vertices at angles `k * pi / 3`.
    pub fn hexagon() -> Self {
        let vertices = (0..6)
            .map(|k| {
                let t = k as f64 * std::f64::consts::FRAC_PI_3;
                vec![t.cos(), t.sin()]
            })
            .collect();
        NormSpec::Polyhedral(Polytope::validated(2, vertices).expect("the regular hexagon is a valid unit ball"))
    }

    pub fn dim(&self) -> usize {
        match self {
            NormSpec::Lp { dim, .. } | NormSpec::WeightedLp { dim, .. } | NormSpec::Linf { dim } => *dim,
            NormSpec::Polyhedral(poly) => poly.dim(),
        }
    }

    pub fn family(&self) -> Family {
        match self {
            NormSpec::Lp { .. } => Family::Lp,
            NormSpec::WeightedLp { .. } => Family::WeightedLp,
            NormSpec::Linf { .. } => Family::Linf,
            NormSpec::Polyhedral(_) => Family::Polyhedral,
        }
    }

    /// The exponent for the `lp`/`wlp` families.
    pub fn exponent(&self) -> Option<f64> {
        match self {
            NormSpec::Lp { p, .. } | NormSpec::WeightedLp { p, .. } => Some(*p),
            _ => None,
        }
    }

    /// True when the norm comes from an inner product.
    pub fn is_hilbert(&self) -> bool {
        self.exponent() == Some(2.0)
    }

    /// Checks every invariant and normalizes polyhedral vertex sets.
    pub fn validated(self) -> Result<Self> {
        let dim = self.dim();
        if dim < 2 {
            return Err(Error::DimensionTooSmall(dim));
        }
        match self {
            NormSpec::Lp { p, .. } => {
                check_exponent(p)?;
                Ok(self)
            }
            NormSpec::WeightedLp { p, ref weights, .. } => {
                check_exponent(p)?;
                if weights.len() != dim {
                    return Err(Error::BadWeights(format!("expected {dim} weights, got {}", weights.len())));
                }
                if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
                    return Err(Error::BadWeights(format!("weights must be positive (got {w})")));
                }
                Ok(self)
            }
            NormSpec::Linf { .. } => Ok(self),
            NormSpec::Polyhedral(poly) => {
                Ok(NormSpec::Polyhedral(Polytope::validated(poly.dim(), poly.vertices().to_vec())?))
            }
        }
    }

    /// `||v||` without dimension checks; `v.len()` must equal `self.dim()`.
    pub fn norm(&self, v: &[f64]) -> f64 {
        match self {
            NormSpec::Lp { p, .. } => lp_norm(v, *p),
            NormSpec::WeightedLp { p, weights, .. } => weighted_lp_norm(v, *p, weights),
            NormSpec::Linf { .. } => v.iter().fold(0.0, |m, c| m.max(c.abs())),
            NormSpec::Polyhedral(poly) => poly.gauge(v),
        }
    }

    pub fn eval_norm(&self, v: &[f64]) -> Result<f64> {
        self.check_dim(v.len())?;
        if v.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(self.norm(v))
    }

    /// The norm of the dual space, under the standard pairing.
    pub fn dual_spec(&self) -> Result<NormSpec> {
        let dim = self.dim();
        Ok(match self {
            NormSpec::Lp { p, .. } if *p == 1.0 => NormSpec::Linf { dim },
            NormSpec::Lp { p, .. } => NormSpec::Lp { dim, p: conjugate(*p) },
            NormSpec::Linf { .. } => NormSpec::Lp { dim, p: 1.0 },
            NormSpec::WeightedLp { p, weights, .. } if *p == 1.0 => {
                // dual of sum w_i |x_i| is max |f_i| / w_i: the box with half-widths w_i
                let corners = (0..1usize << dim)
                    .map(|s| (0..dim).map(|i| if s >> i & 1 == 1 { weights[i] } else { -weights[i] }).collect())
                    .collect();
                NormSpec::Polyhedral(Polytope::validated(dim, corners)?)
            }
            NormSpec::WeightedLp { p, weights, .. } => {
                let q = conjugate(*p);
                NormSpec::WeightedLp { dim, p: q, weights: weights.iter().map(|w| w.powf(1.0 - q)).collect() }
            }
            NormSpec::Polyhedral(poly) => NormSpec::Polyhedral(poly.polar()?),
        })
    }

    pub fn eval_dual_norm(&self, f: &DualVector) -> Result<f64> {
        self.check_dim(f.len())?;
        self.dual_spec()?.eval_norm(f)
    }

    fn check_dim(&self, got: usize) -> Result<()> {
        if got != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got });
        }
        Ok(())
    }

    /// Samples the homogeneity, symmetry and triangle axioms on `samples`
    /// pseudorandom inputs drawn from a generator seeded with `seed`.
    pub fn check_norm_axioms(&self, samples: usize, seed: u64) -> Result<AxiomReport> {
        const TOL: f64 = 1e-10;
        fn record(
            report: &mut AxiomReport,
            axiom: &'static str,
            excess: f64,
            (u, v, alpha): (&[f64], &[f64], f64),
        ) -> Result<()> {
            if excess > report.worst_violation {
                report.worst_violation = excess;
                report.worst_axiom = Some(axiom);
            }
            if excess > TOL {
                return Err(Error::AxiomViolation { axiom, u: u.to_vec(), v: v.to_vec(), alpha, excess });
            }
            Ok(())
        }
        let dim = self.dim();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut report = AxiomReport { samples, ..AxiomReport::default() };
        for _ in 0..samples {
            let scale_u = 10f64.powf(rng.random_range(-2.0..2.0));
            let scale_v = 10f64.powf(rng.random_range(-2.0..2.0));
            let u: Vec<f64> = (0..dim).map(|_| scale_u * rng.random_range(-1.0..1.0)).collect();
            let v: Vec<f64> = (0..dim).map(|_| scale_v * rng.random_range(-1.0..1.0)).collect();
            let alpha: f64 = rng.random_range(-4.0..4.0);
            let nu = self.norm(&u);
            let nv = self.norm(&v);

            let scaled: Vec<f64> = u.iter().map(|c| alpha * c).collect();
            let expect = alpha.abs() * nu;
            let excess = (self.norm(&scaled) - expect).abs() / expect.max(f64::MIN_POSITIVE);
            record(&mut report, "homogeneity", excess, (&u, &v, alpha))?;

            let neg: Vec<f64> = u.iter().map(|c| -c).collect();
            let excess = (self.norm(&neg) - nu).abs() / nu.max(f64::MIN_POSITIVE);
            record(&mut report, "symmetry", excess, (&u, &v, alpha))?;

            let sum: Vec<f64> = u.iter().zip(&v).map(|(a, b)| a + b).collect();
            let excess = (self.norm(&sum) - nu - nv) / (nu + nv).max(f64::MIN_POSITIVE);
            record(&mut report, "triangle inequality", excess, (&u, &v, alpha))?;
            report.passed += 1;
        }
        Ok(report)
    }

    /// Parses and validates the JSON norm file format.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: NormSpecFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        NormSpec::try_from(file)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("norm specs always serialize")
    }
}

/// `sup { <f, x> : ||x|| = 1 }` over boundary points. In the plane the
/// boundary is swept by `samples` equally spaced directions; in higher
/// dimension by seeded pseudorandom directions plus the coordinate axes.
pub fn sampled_dual_norm(spec: &NormSpec, f: &DualVector, samples: usize, seed: u64) -> f64 {
    let dim = spec.dim();
    let mut best = 0.0f64;
    let mut visit = |dir: &[f64]| {
        let n = spec.norm(dir);
        if n > 0.0 {
            best = best.max(f.apply(dir).abs() / n);
        }
    };
    if dim == 2 {
        for k in 0..samples {
            let t = std::f64::consts::TAU * k as f64 / samples as f64;
            visit(&[t.cos(), t.sin()]);
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for i in 0..dim {
            let mut e = vec![0.0; dim];
            e[i] = 1.0;
            visit(&e);
        }
        for _ in 0..samples {
            let d: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
            visit(&d);
        }
    }
    if let NormSpec::Polyhedral(poly) = spec {
        for v in poly.vertices() {
            visit(v);
        }
    }
    best
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct AxiomReport {
    pub samples: usize,
    pub passed: usize,
    /// Largest relative excess seen across all three axioms.
    pub worst_violation: f64,
    pub worst_axiom: Option<&'static str>,
}

fn check_exponent(p: f64) -> Result<()> {
    if !(p.is_finite() && p >= 1.0) {
        return Err(Error::BadExponent(p));
    }
    Ok(())
}

/// Hölder conjugate of a finite `p > 1`.
pub fn conjugate(p: f64) -> f64 {
    if p == 2.0 {
        2.0
    } else {
        p / (p - 1.0)
    }
}

fn lp_norm(v: &[f64], p: f64) -> f64 {
    if p == 2.0 {
        return v.iter().map(|c| c * c).sum::<f64>().sqrt();
    }
    if p == 1.0 {
        return v.iter().map(|c| c.abs()).sum();
    }
    let m = v.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    if m == 0.0 {
        return 0.0;
    }
    m * v.iter().map(|c| (c.abs() / m).powf(p)).sum::<f64>().powf(1.0 / p)
}

fn weighted_lp_norm(v: &[f64], p: f64, w: &[f64]) -> f64 {
    if p == 1.0 {
        return v.iter().zip(w).map(|(c, w)| w * c.abs()).sum();
    }
    let m = v.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    if m == 0.0 {
        return 0.0;
    }
    m * v.iter().zip(w).map(|(c, w)| w * (c.abs() / m).powf(p)).sum::<f64>().powf(1.0 / p)
}

/// On-disk JSON form of a [`NormSpec`].
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormSpecFile {
    pub family: String,
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertices: Option<Vec<Vec<f64>>>,
}

impl From<NormSpec> for NormSpecFile {
    fn from(spec: NormSpec) -> Self {
        let family = spec.family().to_string();
        let dim = spec.dim();
        let mut file = NormSpecFile { family, dim, p: None, weights: None, vertices: None };
        match spec {
            NormSpec::Lp { p, .. } => file.p = Some(p),
            NormSpec::WeightedLp { p, weights, .. } => {
                file.p = Some(p);
                file.weights = Some(weights);
            }
            NormSpec::Linf { .. } => {}
            NormSpec::Polyhedral(poly) => file.vertices = Some(poly.vertices().to_vec()),
        }
        file
    }
}

impl TryFrom<NormSpecFile> for NormSpec {
    type Error = Error;

    fn try_from(file: NormSpecFile) -> Result<Self> {
        let field =
            |path: &str, message: &str| Error::InvalidField { path: path.to_string(), message: message.to_string() };
        let forbid = |present: bool, path: &str, family: &str| {
            if present {
                Err(field(path, &format!("not allowed for family {family}")))
            } else {
                Ok(())
            }
        };
        let dim = file.dim;
        let spec = match file.family.as_str() {
            "lp" => {
                forbid(file.weights.is_some(), "weights", "lp")?;
                forbid(file.vertices.is_some(), "vertices", "lp")?;
                let p = file.p.ok_or_else(|| field("p", "required for family lp"))?;
                NormSpec::Lp { dim, p }
            }
            "wlp" => {
                forbid(file.vertices.is_some(), "vertices", "wlp")?;
                let p = file.p.ok_or_else(|| field("p", "required for family wlp"))?;
                let weights = file.weights.ok_or_else(|| field("weights", "required for family wlp"))?;
                NormSpec::WeightedLp { dim, p, weights }
            }
            "linf" => {
                forbid(file.p.is_some(), "p", "linf")?;
                forbid(file.weights.is_some(), "weights", "linf")?;
                forbid(file.vertices.is_some(), "vertices", "linf")?;
                NormSpec::Linf { dim }
            }
            "polyhedral" => {
                forbid(file.p.is_some(), "p", "polyhedral")?;
                forbid(file.weights.is_some(), "weights", "polyhedral")?;
                let vertices = file.vertices.ok_or_else(|| field("vertices", "required for family polyhedral"))?;
                if dim < 2 {
                    return Err(Error::DimensionTooSmall(dim));
                }
                NormSpec::Polyhedral(Polytope::validated(dim, vertices)?)
            }
            other => {
                return Err(field(
                    "family",
                    &format!("unknown family {other:?} (expected lp, wlp, linf or polyhedral)"),
                ))
            }
        };
        spec.validated()
    }
}
