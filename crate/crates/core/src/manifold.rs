//! The triangle manifold `T(X) = {(x, y) : ||x|| = ||y|| = ||x - y|| = 1}` and
//! the other two-point sets the constants are optimized over.
//!
//! Every two-vector quantity here depends only on the norm restricted to
//! `span{x, y}`, so all sampling happens on 2D sections. A section is
//! parametrized by the angle `theta` of a direction `cos(theta) e1 +
//! sin(theta) e2`, rescaled to the unit sphere. For a fixed unit `x`, the
//! admissible `y` are the zeros of `g(phi) = ||x - v(phi)|| - 1`, located by
//! a grid scan followed by bisection of every sign change.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, TAU};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::norm::{NormSpec, VectorF};

/// Feasibility tolerance on the three residuals of an admissible pair.
pub const TAU_FEAS: f64 = 1e-9;
/// Early-exit threshold for bisection and for treating a grid value as a zero.
pub const ROOT_TOL: f64 = 1e-13;
pub const BISECT_ITERS: usize = 60;
/// Interior samples emitted on each flat arc, besides its endpoints.
pub const FLAT_ARC_SAMPLES: usize = 8;
pub const MIN_PHI_GRID: usize = 64;

/// Section coordinates `(a, b)` of the point `a e1 + b e2`.
pub type Coords = [f64; 2];

/// Two independent directions spanning a plane, each of unit ambient norm.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SectionBasis {
    e1: VectorF,
    e2: VectorF,
}

impl SectionBasis {
    /// Normalizes `e1`, `e2` to the unit sphere of `spec`.
    pub fn new(spec: &NormSpec, e1: VectorF, e2: VectorF) -> Result<Self> {
        let dim = spec.dim();
        for v in [&e1, &e2] {
            if v.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: v.len() });
            }
        }
        let gram = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
        let (g11, g22, g12) = (gram(&e1, &e1), gram(&e2, &e2), gram(&e1, &e2));
        if g11 * g22 - g12 * g12 <= 1e-20 * g11 * g22 || g11 == 0.0 || g22 == 0.0 {
            return Err(Error::InvalidParameter("section directions are linearly dependent".into()));
        }
        let unit = |v: VectorF| {
            let n = spec.norm(&v);
            VectorF::from_raw(v.iter().map(|c| c / n).collect())
        };
        Ok(Self { e1: unit(e1), e2: unit(e2) })
    }

    /// The plane of coordinates `i < j`.
    pub fn coordinate(spec: &NormSpec, i: usize, j: usize) -> Result<Self> {
        let dim = spec.dim();
        if i >= dim || j >= dim || i == j {
            return Err(Error::InvalidParameter(format!("bad coordinate plane ({i}, {j})")));
        }
        let mut e1 = vec![0.0; dim];
        let mut e2 = vec![0.0; dim];
        e1[i] = 1.0;
        e2[j] = 1.0;
        Self::new(spec, VectorF::from_raw(e1), VectorF::from_raw(e2))
    }

    pub fn standard(spec: &NormSpec) -> Result<Self> {
        Self::coordinate(spec, 0, 1)
    }

    pub fn e1(&self) -> &VectorF {
        &self.e1
    }

    pub fn e2(&self) -> &VectorF {
        &self.e2
    }

    /// Section coordinates of `v`, or `None` when `v` is off the plane.
    pub fn coords_of(&self, v: &[f64]) -> Option<Coords> {
        let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
        let (g11, g22, g12) = (dot(&self.e1, &self.e1), dot(&self.e2, &self.e2), dot(&self.e1, &self.e2));
        let (r1, r2) = (dot(&self.e1, v), dot(&self.e2, v));
        let det = g11 * g22 - g12 * g12;
        let a = (r1 * g22 - r2 * g12) / det;
        let b = (r2 * g11 - r1 * g12) / det;
        let scale = v.iter().fold(1.0f64, |m, c| m.max(c.abs()));
        let off =
            self.e1.iter().zip(self.e2.iter()).zip(v).fold(0.0f64, |m, ((p, q), c)| m.max((a * p + b * q - c).abs()));
        (off <= 1e-12 * scale).then_some([a, b])
    }

    fn is_coordinate_plane(&self) -> bool {
        let axis = |v: &[f64]| v.iter().filter(|c| **c != 0.0).count() == 1;
        axis(&self.e1) && axis(&self.e2)
    }
}

/// The norm restricted to one section, evaluated in section coordinates.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Section<'a> {
    pub spec: &'a NormSpec,
    pub basis: &'a SectionBasis,
}

const STACK_DIM: usize = 16;

impl<'a> Section<'a> {
    pub fn new(spec: &'a NormSpec, basis: &'a SectionBasis) -> Self {
        Self { spec, basis }
    }

    pub fn norm(&self, c: Coords) -> f64 {
        let (e1, e2) = (self.basis.e1.coords(), self.basis.e2.coords());
        let dim = e1.len();
        if dim <= STACK_DIM {
            let mut buf = [0.0; STACK_DIM];
            for i in 0..dim {
                buf[i] = c[0] * e1[i] + c[1] * e2[i];
            }
            self.spec.norm(&buf[..dim])
        } else {
            let v: Vec<f64> = e1.iter().zip(e2).map(|(p, q)| c[0] * p + c[1] * q).collect();
            self.spec.norm(&v)
        }
    }

    /// The unit vector `v(theta)` in section coordinates.
    pub fn unit(&self, theta: f64) -> Coords {
        let d = direction(theta);
        let n = self.norm(d);
        [d[0] / n, d[1] / n]
    }

    pub fn lift(&self, c: Coords) -> VectorF {
        VectorF::from_raw(self.basis.e1.iter().zip(self.basis.e2.iter()).map(|(p, q)| c[0] * p + c[1] * q).collect())
    }

    /// Distance `||x - v(phi)||` minus `target`.
    fn gap(&self, x: Coords, phi: f64, target: f64) -> (f64, Coords) {
        let y = self.unit(phi);
        (self.norm([x[0] - y[0], x[1] - y[1]]) - target, y)
    }
}

/// `(cos theta, sin theta)`, exact at multiples of `pi / 4` so that grid
/// points land on the corners of the square and diamond balls.
pub fn direction(theta: f64) -> Coords {
    let k = theta / FRAC_PI_4;
    let r = k.round();
    if (k - r).abs() < 1e-12 {
        let h = FRAC_1_SQRT_2;
        return match (r as i64).rem_euclid(8) {
            0 => [1.0, 0.0],
            1 => [h, h],
            2 => [0.0, 1.0],
            3 => [-h, h],
            4 => [-1.0, 0.0],
            5 => [-h, -h],
            6 => [0.0, -1.0],
            _ => [h, -h],
        };
    }
    [theta.cos(), theta.sin()]
}

/// `n` equally spaced angles in `[0, 2 pi)` merged with `extra` angles.
pub fn angle_grid(n: usize, extra: &[f64]) -> Vec<f64> {
    let mut grid: Vec<f64> = (0..n).map(|k| TAU * k as f64 / n as f64).collect();
    grid.extend(extra.iter().map(|a| a.rem_euclid(TAU)));
    grid.sort_by(f64::total_cmp);
    grid.dedup_by(|b, a| (*b - *a).abs() <= 1e-14);
    if grid.len() > 1 && TAU - grid[grid.len() - 1] + grid[0] <= 1e-14 {
        grid.pop();
    }
    grid
}

/// Corner directions of the ball inside this section, added to the grids so
/// that vertex witnesses are sampled exactly.
pub(crate) fn kink_angles(spec: &NormSpec, basis: &SectionBasis) -> Vec<f64> {
    match spec {
        NormSpec::Linf { .. } if basis.is_coordinate_plane() => octants(),
        NormSpec::Lp { p, .. } if *p == 1.0 && basis.is_coordinate_plane() => octants(),
        NormSpec::Polyhedral(poly) => {
            poly.vertices().iter().filter_map(|v| basis.coords_of(v)).map(|c| c[1].atan2(c[0])).collect()
        }
        _ => Vec::new(),
    }
}

fn octants() -> Vec<f64> {
    (0..8).map(|k| k as f64 * FRAC_PI_4).collect()
}

/// Evaluates `||v(theta)||`-normalized boundary point `v(theta)` of a section.
pub fn boundary_point(spec: &NormSpec, basis: &SectionBasis, theta: f64) -> Result<VectorF> {
    let sec = Section::new(spec, basis);
    let d = direction(theta);
    let n = sec.norm(d);
    if n == 0.0 || !n.is_finite() {
        return Err(Error::DegenerateDirection(theta));
    }
    Ok(sec.lift([d[0] / n, d[1] / n]))
}

/// A pair with `||x|| = ||y|| = ||x - y|| = 1` up to the listed residuals.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdmissiblePair {
    pub x: VectorF,
    pub y: VectorF,
    #[serde(serialize_with = "crate::sig::serialize_slice")]
    pub residuals: [f64; 3],
    #[serde(skip)]
    pub origin: Option<PairOrigin>,
}

/// Where a sampled pair came from: its section and the angles of `x` and `y`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairOrigin {
    pub section: Arc<SectionBasis>,
    pub theta: f64,
    pub phi: f64,
}

impl AdmissiblePair {
    pub fn new(spec: &NormSpec, x: VectorF, y: VectorF) -> Self {
        let diff: Vec<f64> = x.iter().zip(y.iter()).map(|(a, b)| a - b).collect();
        let residuals = [(spec.norm(&x) - 1.0).abs(), (spec.norm(&y) - 1.0).abs(), (spec.norm(&diff) - 1.0).abs()];
        Self { x, y, residuals, origin: None }
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }
}

/// A root of the distance equation found in a section.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Root {
    pub phi: f64,
    pub y: Coords,
}

/// All `phi` on the cyclic grid with `||x - v(phi)|| = target`.
pub(crate) fn distance_roots(sec: &Section, x: Coords, phis: &[f64], target: f64) -> Vec<Root> {
    let m = phis.len();
    let samples: Vec<(f64, Coords)> = phis.iter().map(|&phi| sec.gap(x, phi, target)).collect();
    let zero: Vec<bool> = samples.iter().map(|(g, _)| g.abs() <= ROOT_TOL).collect();
    let mut roots = Vec::new();

    if zero.iter().all(|z| *z) {
        return phis.iter().zip(&samples).map(|(&phi, s)| Root { phi, y: s.1 }).collect();
    }

    // runs of grid zeros: isolated zeros are roots, longer runs are flat arcs
    let first_nonzero = zero.iter().position(|z| !z).expect("some nonzero sample");
    let mut k = 0;
    while k < m {
        let i = (first_nonzero + k) % m;
        if !zero[i] {
            k += 1;
            continue;
        }
        let mut len = 0;
        while len < m && zero[(i + len) % m] {
            len += 1;
        }
        let start = phis[i];
        let j = (i + len - 1) % m;
        let mut end = phis[j];
        if end < start {
            end += TAU;
        }
        roots.push(Root { phi: start, y: samples[i].1 });
        if len >= 2 {
            for s in 1..=FLAT_ARC_SAMPLES {
                let phi = start + (end - start) * s as f64 / (FLAT_ARC_SAMPLES + 1) as f64;
                let (g, y) = sec.gap(x, phi, target);
                if g.abs() <= TAU_FEAS {
                    roots.push(Root { phi: phi.rem_euclid(TAU), y });
                }
            }
            roots.push(Root { phi: phis[j], y: samples[j].1 });
        }
        k += len;
    }

    for i in 0..m {
        let j = (i + 1) % m;
        if zero[i] || zero[j] {
            continue;
        }
        let (gi, gj) = (samples[i].0, samples[j].0);
        if (gi < 0.0) == (gj < 0.0) {
            continue;
        }
        let hi = if j == 0 { phis[0] + TAU } else { phis[j] };
        if let Some(root) = bisect(sec, x, target, phis[i], gi, hi) {
            roots.push(root);
        }
    }
    roots.sort_by(|a, b| a.phi.total_cmp(&b.phi));
    roots
}

/// Bisection of `gap` on `[lo, hi]` where `gap(lo)` has sign `glo`, stopping
/// after [`BISECT_ITERS`] halvings or once `|gap| <= ROOT_TOL`.
pub(crate) fn bisect(sec: &Section, x: Coords, target: f64, mut lo: f64, glo: f64, mut hi: f64) -> Option<Root> {
    let low_negative = glo < 0.0;
    let mut best: Option<(f64, Root)> = None;
    for _ in 0..BISECT_ITERS {
        let mid = 0.5 * (lo + hi);
        let (g, y) = sec.gap(x, mid, target);
        if best.is_none_or(|(bg, _)| g.abs() < bg) {
            best = Some((g.abs(), Root { phi: mid.rem_euclid(TAU), y }));
        }
        if g.abs() <= ROOT_TOL {
            break;
        }
        if (g < 0.0) == low_negative {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    best.filter(|(g, _)| *g <= TAU_FEAS).map(|(_, r)| r)
}

/// Sampling resolution shared by every estimator.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SamplingParams {
    pub theta_grid: usize,
    pub phi_grid: usize,
    /// Pseudorandom sections used in dimension > 2, on top of the coordinate planes.
    pub sections: usize,
    pub seed: u64,
    /// Radial levels `k / R` for `||y|| <= 1` samples.
    pub radial_levels: usize,
}

impl Default for SamplingParams {
    fn default() -> Self {
        Self { theta_grid: 2048, phi_grid: 2048, sections: 64, seed: 0, radial_levels: 16 }
    }
}

impl SamplingParams {
    pub fn with_grid(mut self, grid: usize) -> Self {
        self.theta_grid = grid;
        self.phi_grid = grid.max(MIN_PHI_GRID);
        self
    }

    pub(crate) fn check(&self) -> Result<()> {
        if self.theta_grid == 0 || self.phi_grid == 0 {
            return Err(Error::InvalidParameter("sampling grids must be nonempty".into()));
        }
        if self.phi_grid < MIN_PHI_GRID {
            return Err(Error::InvalidParameter(format!(
                "phi grid must have at least {MIN_PHI_GRID} points (got {})",
                self.phi_grid
            )));
        }
        Ok(())
    }
}

/// The sections sampled for `spec`: the standard plane in 2D; otherwise
/// every coordinate plane followed by `sections` seeded random planes.
pub fn sections_for(spec: &NormSpec, params: &SamplingParams) -> Result<Vec<Arc<SectionBasis>>> {
    let dim = spec.dim();
    if dim == 2 {
        return Ok(vec![Arc::new(SectionBasis::standard(spec)?)]);
    }
    let mut out = Vec::new();
    for i in 0..dim {
        for j in i + 1..dim {
            out.push(Arc::new(SectionBasis::coordinate(spec, i, j)?));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    while out.len() < dim * (dim - 1) / 2 + params.sections {
        let mut e1: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
        let mut e2: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
        let n1 = e1.iter().map(|c| c * c).sum::<f64>().sqrt();
        e1.iter_mut().for_each(|c| *c /= n1);
        let proj: f64 = e1.iter().zip(&e2).map(|(a, b)| a * b).sum();
        e2.iter_mut().zip(&e1).for_each(|(c, a)| *c -= proj * a);
        let n2 = e2.iter().map(|c| c * c).sum::<f64>().sqrt();
        if n1 < 1e-3 || n2 < 1e-3 {
            continue;
        }
        e2.iter_mut().for_each(|c| *c /= n2);
        out.push(Arc::new(SectionBasis::new(spec, VectorF::from_raw(e1), VectorF::from_raw(e2))?));
    }
    Ok(out)
}

/// A sampled point of `T(X)` in section coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct TrianglePoint {
    pub section: usize,
    pub theta: f64,
    pub phi: f64,
    pub x: Coords,
    pub y: Coords,
}

/// Grid scan of `T(X)` over the given sections, in deterministic order.
pub(crate) fn sample_triangle(
    spec: &NormSpec,
    sections: &[Arc<SectionBasis>],
    params: &SamplingParams,
) -> Result<Vec<TrianglePoint>> {
    params.check()?;
    let mut out = Vec::new();
    for (s, basis) in sections.iter().enumerate() {
        let sec = Section::new(spec, basis);
        let kinks = kink_angles(spec, basis);
        let thetas = angle_grid(params.theta_grid, &kinks);
        let phis = angle_grid(params.phi_grid, &kinks);
        let rows: Vec<Result<Vec<TrianglePoint>>> = thetas
            .par_iter()
            .map(|&theta| {
                let x = sec.unit(theta);
                let roots = distance_roots(&sec, x, &phis, 1.0);
                if roots.is_empty() {
                    return Err(Error::NoSolution { x: sec.lift(x).into_inner(), grid: phis.len() });
                }
                Ok(roots.into_iter().map(|r| TrianglePoint { section: s, theta, phi: r.phi, x, y: r.y }).collect())
            })
            .collect();
        for row in rows {
            out.extend(row?);
        }
    }
    Ok(out)
}

fn to_pair(spec: &NormSpec, sections: &[Arc<SectionBasis>], t: &TrianglePoint) -> AdmissiblePair {
    let sec = Section::new(spec, &sections[t.section]);
    let mut pair = AdmissiblePair::new(spec, sec.lift(t.x), sec.lift(t.y));
    pair.origin = Some(PairOrigin { section: sections[t.section].clone(), theta: t.theta, phi: t.phi });
    pair
}

/// Admissible `y` for a fixed unit `x` in the given section.
pub fn third_constraint_roots(
    spec: &NormSpec,
    basis: &SectionBasis,
    x: &VectorF,
    grid: usize,
) -> Result<Vec<AdmissiblePair>> {
    if grid < MIN_PHI_GRID {
        return Err(Error::InvalidParameter(format!("grid must be at least {MIN_PHI_GRID}")));
    }
    if x.len() != spec.dim() {
        return Err(Error::DimensionMismatch { expected: spec.dim(), got: x.len() });
    }
    if (spec.norm(x) - 1.0).abs() > TAU_FEAS {
        return Err(Error::InvalidParameter("x must be a unit vector".into()));
    }
    let coords = basis.coords_of(x).ok_or_else(|| Error::InvalidParameter("x does not lie in the section".into()))?;
    let sec = Section::new(spec, basis);
    let phis = angle_grid(grid, &kink_angles(spec, basis));
    let roots = distance_roots(&sec, coords, &phis, 1.0);
    if roots.is_empty() {
        return Err(Error::NoSolution { x: x.to_vec(), grid });
    }
    let shared = Arc::new(basis.clone());
    let theta = coords[1].atan2(coords[0]).rem_euclid(TAU);
    Ok(roots
        .into_iter()
        .map(|r| {
            let mut pair = AdmissiblePair::new(spec, x.clone(), sec.lift(r.y));
            pair.origin = Some(PairOrigin { section: shared.clone(), theta, phi: r.phi });
            pair
        })
        .collect())
}

/// Deterministic sample of `T(X)`.
#[allow(non_snake_case)]
pub fn sample_T(spec: &NormSpec, params: &SamplingParams) -> Result<Vec<AdmissiblePair>> {
    let sections = sections_for(spec, params)?;
    let points = sample_triangle(spec, &sections, params)?;
    Ok(points.iter().map(|t| to_pair(spec, &sections, t)).collect())
}

/// Which two-point set [`sample_sphere_pairs`] draws from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairConstraint {
    /// `||x|| = ||y|| = 1`.
    BothUnit,
    /// `||x|| = 1`, `||y|| in {k / R : k = 0..=R}`.
    UnitAndBall { levels: usize },
}

/// A sampled two-point configuration in section coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct GridPair {
    pub section: usize,
    pub theta: f64,
    pub phi: f64,
    pub radius: f64,
    pub x: Coords,
    pub y: Coords,
}

/// Calls `visit` on every grid pair of the constraint set, section by
/// section in order. `y = 0` is visited once per `x`.
pub(crate) fn visit_sphere_pairs(
    spec: &NormSpec,
    sections: &[Arc<SectionBasis>],
    constraint: PairConstraint,
    params: &SamplingParams,
    mut visit: impl FnMut(&Section, &GridPair),
) -> Result<()> {
    if params.theta_grid == 0 || params.phi_grid == 0 {
        return Err(Error::InvalidParameter("sampling grids must be nonempty".into()));
    }
    let radii: Vec<f64> = match constraint {
        PairConstraint::BothUnit => vec![1.0],
        PairConstraint::UnitAndBall { levels: 0 } => {
            return Err(Error::InvalidParameter("radial levels must be positive".into()))
        }
        PairConstraint::UnitAndBall { levels } => (0..=levels).map(|k| k as f64 / levels as f64).collect(),
    };
    for (s, basis) in sections.iter().enumerate() {
        let sec = Section::new(spec, basis);
        let kinks = kink_angles(spec, basis);
        let thetas = angle_grid(params.theta_grid, &kinks);
        let phis = angle_grid(params.phi_grid, &kinks);
        let ys: Vec<Coords> = phis.iter().map(|&p| sec.unit(p)).collect();
        for &theta in &thetas {
            let x = sec.unit(theta);
            for &r in &radii {
                if r == 0.0 {
                    visit(&sec, &GridPair { section: s, theta, phi: 0.0, radius: 0.0, x, y: [0.0, 0.0] });
                    continue;
                }
                for (&phi, y) in phis.iter().zip(&ys) {
                    let y = [r * y[0], r * y[1]];
                    visit(&sec, &GridPair { section: s, theta, phi, radius: r, x, y });
                }
            }
        }
    }
    Ok(())
}

/// Deterministic grid sample of `S_X x S_X` or `S_X x B_X`.
pub fn sample_sphere_pairs(
    spec: &NormSpec,
    constraint: PairConstraint,
    params: &SamplingParams,
) -> Result<Vec<(VectorF, VectorF)>> {
    let sections = sections_for(spec, params)?;
    let mut out = Vec::new();
    visit_sphere_pairs(spec, &sections, constraint, params, |sec, p| {
        out.push((sec.lift(p.x), sec.lift(p.y)));
    })?;
    Ok(out)
}
