//! Numeric estimates of the geometric constants.
//!
//! Each constant is the sup (or, for the modulus of convexity, the inf) of
//! an objective in `||a x + b y||` over a two-point set. The estimator scans
//! the grid sample, keeps the best point (first index wins ties within
//! `1e-12`), then polishes it with derivative-free golden-section steps.
//! Values are objective evaluations at feasible points, so a sup estimate
//! is a lower bound and an inf estimate an upper bound.

use std::cell::OnceCell;
use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::manifold::{
    angle_grid, bisect, distance_roots, kink_angles, sample_triangle, sections_for, visit_sphere_pairs, Coords,
    PairConstraint, Root, SamplingParams, Section, SectionBasis, TrianglePoint, ROOT_TOL, TAU_FEAS,
};
use crate::norm::{NormSpec, VectorF};
use crate::sig;

/// Slack allowed above a proven universal bound before an estimate is
/// treated as a bug.
pub const BOUND_SLACK: f64 = 1e-9;
/// Ties within this margin keep the earlier sample.
const TIE_TOL: f64 = 1e-12;
const GOLDEN_STEPS: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConstantId {
    /// `sup min(||x+y||, ||2x-y||)` over `T(X)`.
    H,
    /// `sup ||x+y||^2 + ||2x-y||^2` over `T(X)`.
    GL,
    /// `sup ||x+y||^p + ||2x-y||^p` over `T(X)`.
    GLp(f64),
    /// `sup ||x+y|| ||2x-y||` over `T(X)`.
    CL,
    /// James constant.
    J,
    /// von Neumann-Jordan constant.
    CNJ,
    /// Zbăganu constant.
    CZ,
    /// Modulus of convexity at `eps`.
    Delta(f64),
}

impl ConstantId {
    pub fn validate(&self) -> Result<()> {
        match *self {
            ConstantId::GLp(p) if !(p.is_finite() && p >= 1.0) => {
                Err(Error::InvalidParameter(format!("GLp needs p >= 1 (got {p})")))
            }
            ConstantId::Delta(e) if !(0.0..=2.0).contains(&e) => {
                Err(Error::InvalidParameter(format!("Delta needs 0 <= eps <= 2 (got {e})")))
            }
            _ => Ok(()),
        }
    }

    pub fn direction(&self) -> Direction {
        match self {
            ConstantId::Delta(_) => Direction::UpperBoundOfInf,
            _ => Direction::LowerBoundOfSup,
        }
    }

    /// True for constants whose sup runs over `T(X)`.
    pub fn on_triangle(&self) -> bool {
        matches!(self, ConstantId::H | ConstantId::GL | ConstantId::GLp(_) | ConstantId::CL)
    }

    /// A bound every space satisfies: upper for sups, lower for the inf.
    pub fn universal_bound(&self) -> f64 {
        match *self {
            ConstantId::H | ConstantId::J | ConstantId::CNJ | ConstantId::CZ => 2.0,
            ConstantId::GL => 8.0,
            ConstantId::GLp(p) => 2f64.powf(p + 1.0),
            ConstantId::CL => 4.0,
            ConstantId::Delta(_) => 0.0,
        }
    }

    /// Objective value from `norm(a, b) = ||a x + b y||`.
    pub fn objective(&self, norm: impl Fn(f64, f64) -> f64) -> f64 {
        match *self {
            ConstantId::H => norm(1.0, 1.0).min(norm(2.0, -1.0)),
            ConstantId::GL => {
                let (a, b) = (norm(1.0, 1.0), norm(2.0, -1.0));
                a * a + b * b
            }
            ConstantId::GLp(p) => power(norm(1.0, 1.0), p) + power(norm(2.0, -1.0), p),
            ConstantId::CL => norm(1.0, 1.0) * norm(2.0, -1.0),
            ConstantId::J => norm(1.0, 1.0).min(norm(1.0, -1.0)),
            ConstantId::CNJ => {
                let (s, d) = (norm(1.0, 1.0), norm(1.0, -1.0));
                let (nx, ny) = (norm(1.0, 0.0), norm(0.0, 1.0));
                (s * s + d * d) / (2.0 * (nx * nx + ny * ny))
            }
            ConstantId::CZ => {
                let (s, d) = (norm(1.0, 1.0), norm(1.0, -1.0));
                let (nx, ny) = (norm(1.0, 0.0), norm(0.0, 1.0));
                s * d / (nx * nx + ny * ny)
            }
            ConstantId::Delta(_) => 1.0 - norm(1.0, 1.0) / 2.0,
        }
    }

    /// Objective value at an explicit pair of ambient vectors.
    pub fn evaluate(&self, spec: &NormSpec, x: &[f64], y: &[f64]) -> f64 {
        self.objective(|a, b| {
            let v: Vec<f64> = x.iter().zip(y).map(|(p, q)| a * p + b * q).collect();
            spec.norm(&v)
        })
    }

    fn score(&self, value: f64) -> f64 {
        if value.is_nan() {
            return f64::NEG_INFINITY;
        }
        match self.direction() {
            Direction::LowerBoundOfSup => value,
            Direction::UpperBoundOfInf => -value,
        }
    }
}

/// `u^p`, exact for the common integer exponents.
fn power(u: f64, p: f64) -> f64 {
    if p == 1.0 {
        u
    } else if p == 2.0 {
        u * u
    } else {
        u.powf(p)
    }
}

impl fmt::Display for ConstantId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConstantId::H => f.write_str("H"),
            ConstantId::GL => f.write_str("GL"),
            ConstantId::GLp(p) => write!(f, "GLp({})", sig::format(*p)),
            ConstantId::CL => f.write_str("CL"),
            ConstantId::J => f.write_str("J"),
            ConstantId::CNJ => f.write_str("CNJ"),
            ConstantId::CZ => f.write_str("CZ"),
            ConstantId::Delta(e) => write!(f, "Delta({})", sig::format(*e)),
        }
    }
}

impl FromStr for ConstantId {
    type Err = Error;

    /// Accepts `H`, `GL`, `CL`, `J`, `CNJ`, `CZ`, `GLp(p)` and `Delta(eps)`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("unknown constant {s:?}"));
        let arg = |prefix: &str| -> Result<Option<f64>> {
            match s.strip_prefix(prefix) {
                Some(rest) => {
                    let inner = rest.strip_prefix('(').and_then(|r| r.strip_suffix(')')).ok_or_else(bad)?;
                    Ok(Some(inner.trim().parse::<f64>().map_err(|_| bad())?))
                }
                None => Ok(None),
            }
        };
        let id = match s {
            "H" => ConstantId::H,
            "GL" => ConstantId::GL,
            "CL" => ConstantId::CL,
            "J" => ConstantId::J,
            "CNJ" => ConstantId::CNJ,
            "CZ" => ConstantId::CZ,
            _ => {
                if let Some(p) = arg("GLp")? {
                    ConstantId::GLp(p)
                } else if let Some(e) = arg("Delta")? {
                    ConstantId::Delta(e)
                } else {
                    return Err(bad());
                }
            }
        };
        id.validate()?;
        Ok(id)
    }
}

impl Serialize for ConstantId {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ConstantId {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    LowerBoundOfSup,
    UpperBoundOfInf,
}

/// Constraint used for the modulus of convexity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DeltaForm {
    /// `||x - y|| >= eps`.
    #[default]
    AtLeast,
    /// `||x - y|| = eps`.
    Exactly,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimateParams {
    pub sampling: SamplingParams,
    /// Run the golden-section polish after the grid scan.
    pub refine: bool,
    /// Cap on golden-section steps per estimate.
    pub max_refine_iters: usize,
    pub delta_form: DeltaForm,
}

impl Default for EstimateParams {
    fn default() -> Self {
        Self {
            sampling: SamplingParams::default(),
            refine: true,
            max_refine_iters: 200,
            delta_form: DeltaForm::AtLeast,
        }
    }
}

impl EstimateParams {
    pub fn with_grid(mut self, grid: usize) -> Self {
        self.sampling = self.sampling.with_grid(grid);
        self
    }
}

/// The best sampled pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub x: VectorF,
    pub y: VectorF,
    /// `|‖x‖-1|, |‖y‖-1|, |‖x-y‖-1|` for triangle constants.
    #[serde(skip_serializing_if = "Option::is_none", serialize_with = "serialize_residuals")]
    pub residuals: Option<[f64; 3]>,
}

fn serialize_residuals<S: Serializer>(r: &Option<[f64; 3]>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match r {
        Some(r) => sig::serialize_slice(r, s),
        None => s.serialize_none(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstantEstimate {
    pub id: ConstantId,
    #[serde(serialize_with = "sig::serialize")]
    pub value: f64,
    pub direction: Direction,
    pub witness: Witness,
    pub theta_grid: usize,
    pub phi_grid: usize,
    pub sections: usize,
    pub seed: u64,
    pub refined: bool,
    /// Set when the estimate was computed on the dual space.
    pub dual: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_form: Option<DeltaForm>,
    #[serde(skip)]
    pub(crate) origin: Candidate,
}

impl ConstantEstimate {
    /// Short label used by audit checks, e.g. `H`, `H*`, `Delta=(1)`.
    pub fn label(&self) -> String {
        let form = match self.delta_form {
            Some(DeltaForm::Exactly) => "=",
            _ => "",
        };
        let base = match self.id {
            ConstantId::Delta(e) => format!("Delta{form}({})", sig::format(e)),
            id => id.to_string(),
        };
        if self.dual {
            format!("{base}*")
        } else {
            base
        }
    }
}

/// Sample coordinates of a candidate pair: `x = v(theta)`, `y = radius * v(phi)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub(crate) struct Candidate {
    pub section: usize,
    pub theta: f64,
    pub phi: f64,
    pub radius: f64,
    pub x: Coords,
    pub y: Coords,
    /// The pair lies on `||x - y|| = target` and moves along it when polished.
    pub tracked: Option<f64>,
}

impl Candidate {
    fn from_triangle(t: &TrianglePoint) -> Self {
        Self { section: t.section, theta: t.theta, phi: t.phi, radius: 1.0, x: t.x, y: t.y, tracked: Some(1.0) }
    }
}

fn section_value(id: &ConstantId, sec: &Section, x: Coords, y: Coords) -> f64 {
    id.objective(|a, b| sec.norm([a * x[0] + b * y[0], a * x[1] + b * y[1]]))
}

/// Keeps the first candidate whose score beats the incumbent by more than the tie margin.
struct Best {
    score: f64,
    cand: Option<Candidate>,
}

impl Best {
    fn new() -> Self {
        Self { score: f64::NEG_INFINITY, cand: None }
    }

    fn offer(&mut self, score: f64, cand: Candidate) {
        if self.cand.is_none() || score > self.score + TIE_TOL {
            self.score = score;
            self.cand = Some(cand);
        }
    }
}

/// Estimator bound to one space and one set of sampling parameters. The
/// `T(X)` sample is computed once and shared by all triangle constants.
pub struct Estimator<'a> {
    spec: &'a NormSpec,
    params: EstimateParams,
    sections: Vec<Arc<SectionBasis>>,
    triangle: OnceCell<Vec<TrianglePoint>>,
    dual: bool,
}

impl<'a> Estimator<'a> {
    pub fn new(spec: &'a NormSpec, params: &EstimateParams) -> Result<Self> {
        params.sampling.check()?;
        if params.sampling.radial_levels == 0 {
            return Err(Error::InvalidParameter("radial levels must be positive".into()));
        }
        Ok(Self {
            spec,
            params: params.clone(),
            sections: sections_for(spec, &params.sampling)?,
            triangle: OnceCell::new(),
            dual: false,
        })
    }

    /// Marks estimates as computed on a dual space.
    pub fn dual(mut self) -> Self {
        self.dual = true;
        self
    }

    pub fn spec(&self) -> &NormSpec {
        self.spec
    }

    /// The shared `T(X)` sample lifted to ambient coordinates.
    pub fn triangle_pairs(&self) -> Result<impl Iterator<Item = (VectorF, VectorF)> + '_> {
        Ok(self.triangle()?.iter().map(move |t| {
            let sec = self.section(t.section);
            (sec.lift(t.x), sec.lift(t.y))
        }))
    }

    fn section(&self, i: usize) -> Section<'_> {
        Section::new(self.spec, &self.sections[i])
    }

    fn triangle(&self) -> Result<&[TrianglePoint]> {
        if let Some(t) = self.triangle.get() {
            return Ok(t);
        }
        let sample = sample_triangle(self.spec, &self.sections, &self.params.sampling)?;
        Ok(self.triangle.get_or_init(|| sample))
    }

    pub fn estimate(&self, id: ConstantId) -> Result<ConstantEstimate> {
        self.estimate_from(id, None)
    }

    /// Estimates `id`, also considering `warm` (a previous estimate's pair)
    /// as a starting candidate.
    pub(crate) fn estimate_from(&self, id: ConstantId, warm: Option<&ConstantEstimate>) -> Result<ConstantEstimate> {
        id.validate()?;
        let mut best = self.scan(id)?;
        let cand =
            best.cand.take().ok_or_else(|| Error::InternalInconsistency(format!("no feasible sample for {id}")))?;
        let cand = if self.params.refine { self.polish(id, cand) } else { cand };
        let mut est = self.finish(id, cand);
        if let Some(prev) = warm {
            let prev_cand = if self.params.refine { self.polish(id, prev.origin) } else { prev.origin };
            let alt = self.finish(id, prev_cand);
            if id.score(alt.value) > id.score(est.value) {
                est = alt;
            }
        }
        self.check_bound(&est)?;
        Ok(est)
    }

    fn scan(&self, id: ConstantId) -> Result<Best> {
        let mut best = Best::new();
        let sampling = &self.params.sampling;
        match id {
            _ if id.on_triangle() => {
                for t in self.triangle()? {
                    let sec = self.section(t.section);
                    best.offer(id.score(section_value(&id, &sec, t.x, t.y)), Candidate::from_triangle(t));
                }
            }
            ConstantId::J | ConstantId::CNJ | ConstantId::CZ => {
                let constraint = if id == ConstantId::J {
                    PairConstraint::BothUnit
                } else {
                    PairConstraint::UnitAndBall { levels: sampling.radial_levels }
                };
                visit_sphere_pairs(self.spec, &self.sections, constraint, sampling, |sec, p| {
                    let cand = Candidate {
                        section: p.section,
                        theta: p.theta,
                        phi: p.phi,
                        radius: p.radius,
                        x: p.x,
                        y: p.y,
                        tracked: None,
                    };
                    // x and y sit on the sampled spheres, so their norms are 1 and the radius
                    let value = id.objective(|a, b| match (a, b) {
                        (1.0, 0.0) => 1.0,
                        (0.0, 1.0) => p.radius,
                        _ => sec.norm([a * p.x[0] + b * p.y[0], a * p.x[1] + b * p.y[1]]),
                    });
                    best.offer(id.score(value), cand);
                })?;
            }
            ConstantId::Delta(eps) => self.scan_delta(id, eps, &mut best)?,
            _ => unreachable!("triangle constants handled above"),
        }
        Ok(best)
    }

    fn scan_delta(&self, id: ConstantId, eps: f64, best: &mut Best) -> Result<()> {
        let sampling = &self.params.sampling;
        let at_least = self.params.delta_form == DeltaForm::AtLeast;
        if at_least {
            visit_sphere_pairs(self.spec, &self.sections, PairConstraint::BothUnit, sampling, |sec, p| {
                let gap = sec.norm([p.x[0] - p.y[0], p.x[1] - p.y[1]]);
                if gap >= eps - ROOT_TOL {
                    let cand = Candidate {
                        section: p.section,
                        theta: p.theta,
                        phi: p.phi,
                        radius: 1.0,
                        x: p.x,
                        y: p.y,
                        tracked: None,
                    };
                    best.offer(id.score(section_value(&id, sec, p.x, p.y)), cand);
                }
            })?;
        }
        for (s, basis) in self.sections.iter().enumerate() {
            let sec = self.section(s);
            let kinks = kink_angles(self.spec, basis);
            let thetas = angle_grid(sampling.theta_grid, &kinks);
            let phis = angle_grid(sampling.phi_grid, &kinks);
            for &theta in &thetas {
                let x = sec.unit(theta);
                let mut offer = |phi: f64, y: Coords, tracked: Option<f64>| {
                    let cand = Candidate { section: s, theta, phi, radius: 1.0, x, y, tracked };
                    best.offer(id.score(section_value(&id, &sec, x, y)), cand);
                };
                // y = -x has ||x - y|| = 2 and y = x has ||x - y|| = 0
                if at_least || eps >= 2.0 - TAU_FEAS {
                    offer((theta + TAU / 2.0).rem_euclid(TAU), [-x[0], -x[1]], None);
                }
                if eps <= TAU_FEAS {
                    offer(theta, x, None);
                }
                if eps > 0.0 {
                    for r in distance_roots(&sec, x, &phis, eps) {
                        offer(r.phi, r.y, Some(eps));
                    }
                }
            }
        }
        Ok(())
    }

    /// Golden-section polish of a candidate.
    fn polish(&self, id: ConstantId, start: Candidate) -> Candidate {
        let sec = self.section(start.section);
        let theta_step = TAU / self.params.sampling.theta_grid as f64;
        let phi_step = TAU / self.params.sampling.phi_grid as f64;
        let mut cur = start;
        let mut cur_score = id.score(section_value(&id, &sec, cur.x, cur.y));
        let mut iters = 0;

        while iters < self.params.max_refine_iters {
            let before = cur_score;
            match cur.tracked {
                Some(target) => {
                    let eval = |theta: f64| -> Option<Candidate> {
                        let x = sec.unit(theta);
                        let root = track_root(&sec, x, cur.phi, 2.0 * phi_step.max(theta_step), target)?;
                        Some(Candidate { theta, phi: root.phi, x, y: root.y, ..cur })
                    };
                    let (cand, score) = golden_max(
                        |t| eval(t).map(|c| (c, id.score(section_value(&id, &sec, c.x, c.y)))),
                        cur.theta - theta_step,
                        cur.theta + theta_step,
                        GOLDEN_STEPS,
                    );
                    iters += GOLDEN_STEPS;
                    if score > cur_score {
                        cur = cand.expect("scored candidate");
                        cur_score = score;
                    }
                }
                None => {
                    let levels = self.params.sampling.radial_levels as f64;
                    let free_radius = matches!(id, ConstantId::CNJ | ConstantId::CZ);
                    let feasible = |c: &Candidate| match id {
                        ConstantId::Delta(eps) => sec.norm([c.x[0] - c.y[0], c.x[1] - c.y[1]]) >= eps - ROOT_TOL,
                        _ => true,
                    };
                    let score_of = |c: Candidate| {
                        if feasible(&c) {
                            Some((c, id.score(section_value(&id, &sec, c.x, c.y))))
                        } else {
                            None
                        }
                    };
                    // theta
                    let base = cur;
                    let (cand, score) = golden_max(
                        |t| {
                            let x = sec.unit(t);
                            score_of(Candidate { theta: t, x, ..base })
                        },
                        base.theta - theta_step,
                        base.theta + theta_step,
                        GOLDEN_STEPS,
                    );
                    if score > cur_score {
                        cur = cand.expect("scored candidate");
                        cur_score = score;
                    }
                    // phi
                    let base = cur;
                    let (cand, score) = golden_max(
                        |p| {
                            let u = sec.unit(p);
                            score_of(Candidate { phi: p, y: [base.radius * u[0], base.radius * u[1]], ..base })
                        },
                        base.phi - phi_step,
                        base.phi + phi_step,
                        GOLDEN_STEPS,
                    );
                    if score > cur_score {
                        cur = cand.expect("scored candidate");
                        cur_score = score;
                    }
                    iters += 2 * GOLDEN_STEPS;
                    if free_radius {
                        let base = cur;
                        let u = sec.unit(base.phi);
                        let lo = (base.radius - 1.0 / levels).max(0.0);
                        let hi = (base.radius + 1.0 / levels).min(1.0);
                        let (cand, score) = golden_max(
                            |r| score_of(Candidate { radius: r, y: [r * u[0], r * u[1]], ..base }),
                            lo,
                            hi,
                            GOLDEN_STEPS,
                        );
                        if score > cur_score {
                            cur = cand.expect("scored candidate");
                            cur_score = score;
                        }
                        iters += GOLDEN_STEPS;
                    }
                }
            }
            if cur_score - before < TIE_TOL {
                break;
            }
        }
        cur
    }

    fn finish(&self, id: ConstantId, cand: Candidate) -> ConstantEstimate {
        let sec = self.section(cand.section);
        let x = sec.lift(cand.x);
        let y = sec.lift(cand.y);
        let value = id.evaluate(self.spec, &x, &y);
        let residuals = id.on_triangle().then(|| {
            let diff: Vec<f64> = x.iter().zip(y.iter()).map(|(a, b)| a - b).collect();
            [(self.spec.norm(&x) - 1.0).abs(), (self.spec.norm(&y) - 1.0).abs(), (self.spec.norm(&diff) - 1.0).abs()]
        });
        let s = &self.params.sampling;
        ConstantEstimate {
            id,
            value,
            direction: id.direction(),
            witness: Witness { x, y, residuals },
            theta_grid: s.theta_grid,
            phi_grid: s.phi_grid,
            sections: self.sections.len(),
            seed: s.seed,
            refined: self.params.refine,
            dual: self.dual,
            delta_form: matches!(id, ConstantId::Delta(_)).then_some(self.params.delta_form),
            origin: cand,
        }
    }

    fn check_bound(&self, est: &ConstantEstimate) -> Result<()> {
        let bound = est.id.universal_bound();
        let broken = match est.direction {
            Direction::LowerBoundOfSup => est.value > bound + BOUND_SLACK,
            Direction::UpperBoundOfInf => est.value < bound - BOUND_SLACK,
        };
        if broken || !est.value.is_finite() {
            return Err(Error::InternalInconsistency(format!(
                "{} estimate {} violates the universal bound {}",
                est.label(),
                est.value,
                bound
            )));
        }
        Ok(())
    }
}

/// Root of `||x - v(phi)|| = target` nearest to `phi0`, searched in
/// brackets of growing width `h, 2h, 4h, ...`.
fn track_root(sec: &Section, x: Coords, phi0: f64, h: f64, target: f64) -> Option<Root> {
    let gap = |phi: f64| {
        let y = sec.unit(phi);
        sec.norm([x[0] - y[0], x[1] - y[1]]) - target
    };
    let g0 = gap(phi0);
    if g0.abs() <= ROOT_TOL {
        return Some(Root { phi: phi0, y: sec.unit(phi0) });
    }
    let mut step = h;
    for _ in 0..6 {
        let gl = gap(phi0 - step);
        let gr = gap(phi0 + step);
        let left = ((gl < 0.0) != (g0 < 0.0)).then(|| bisect(sec, x, target, phi0 - step, gl, phi0)).flatten();
        let right = ((gr < 0.0) != (g0 < 0.0)).then(|| bisect(sec, x, target, phi0, g0, phi0 + step)).flatten();
        let dist = |r: &Root| {
            let d = (r.phi - phi0).rem_euclid(TAU);
            d.min(TAU - d)
        };
        match (left, right) {
            (Some(l), Some(r)) => return Some(if dist(&l) <= dist(&r) { l } else { r }),
            (Some(r), None) | (None, Some(r)) => return Some(r),
            (None, None) => step *= 2.0,
        }
    }
    None
}

/// Golden-section search for a maximum on `[lo, hi]`, returning the best
/// point evaluated. `f` returns `None` at infeasible points.
fn golden_max<T: Copy>(f: impl Fn(f64) -> Option<(T, f64)>, lo: f64, hi: f64, steps: usize) -> (Option<T>, f64) {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let eval = |t: f64| match f(t) {
        Some((c, s)) => (Some(c), s),
        None => (None, f64::NEG_INFINITY),
    };
    let (mut a, mut b) = (lo, hi);
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let (mut fc, mut fd) = (eval(c), eval(d));
    let mut best = if fc.1 >= fd.1 { fc } else { fd };
    for _ in 0..steps {
        if fc.1 >= fd.1 {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = eval(c);
            if fc.1 > best.1 {
                best = fc;
            }
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = eval(d);
            if fd.1 > best.1 {
                best = fd;
            }
        }
    }
    best
}

/// Numeric estimate of one constant of `spec`.
pub fn estimate(spec: &NormSpec, id: ConstantId, params: &EstimateParams) -> Result<ConstantEstimate> {
    Estimator::new(spec, params)?.estimate(id)
}

/// The same constant computed on the dual space.
pub fn estimate_on_dual(spec: &NormSpec, id: ConstantId, params: &EstimateParams) -> Result<ConstantEstimate> {
    let dual = spec.dual_spec()?;
    Estimator::new(&dual, params)?.dual().estimate(id)
}

/// Estimates several constants of one space from a shared sample.
pub fn estimate_many(spec: &NormSpec, ids: &[ConstantId], params: &EstimateParams) -> Result<Vec<ConstantEstimate>> {
    let est = Estimator::new(spec, params)?;
    ids.iter().map(|id| est.estimate(*id)).collect()
}

/// Runs the estimator at each grid size in `grids`, carrying each witness
/// forward as a starting candidate for the next resolution.
pub fn refine_convergence(
    spec: &NormSpec,
    id: ConstantId,
    grids: &[usize],
    params: &EstimateParams,
) -> Result<Vec<ConstantEstimate>> {
    if grids.is_empty() || grids.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter("grids must be nonempty and strictly increasing".into()));
    }
    let mut out: Vec<ConstantEstimate> = Vec::with_capacity(grids.len());
    for &g in grids {
        let p = params.clone().with_grid(g);
        let est = Estimator::new(spec, &p)?.estimate_from(id, out.last())?;
        out.push(est);
    }
    Ok(out)
}
