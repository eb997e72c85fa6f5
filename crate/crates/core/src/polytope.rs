//! Centrally symmetric polytopes used as unit balls, and their gauges.
//!
//! A validated polytope keeps its extreme points and the facet normals
//! `n` of its supporting hyperplanes `<n, x> = 1`. The gauge of `v` is then
//! `max_j <n_j, v>`, and the facet normals are exactly the vertices of the
//! polar polytope. In the plane the gauge is evaluated by locating the
//! angular sector containing `v` and intersecting the ray with that edge.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Relative tolerance for merging near-identical vertices and normals.
const MERGE_TOL: f64 = 1e-12;
/// Tolerance for the symmetry test `-v in V`.
const SYMMETRY_TOL: f64 = 1e-9;
/// Slack allowed when testing that a hyperplane supports the vertex set.
const SUPPORT_TOL: f64 = 1e-10;
/// Upper limit on the number of d-subsets scanned during facet enumeration.
const MAX_SUBSETS: u128 = 5_000_000;

/// One edge of the planar boundary, in angular order.
#[derive(Debug, Clone, PartialEq)]
struct Sector {
    /// Polar angle of the edge's starting vertex, in `[-pi, pi)`.
    start: f64,
    /// Normal with `<normal, a> = <normal, b> = 1` on the edge endpoints.
    normal: [f64; 2],
}

#[derive(Debug, Clone)]
pub struct Polytope {
    dim: usize,
    vertices: Vec<Vec<f64>>,
    facets: Vec<Vec<f64>>,
    ring: Vec<Sector>,
}

impl PartialEq for Polytope {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.vertices == other.vertices
    }
}

impl Polytope {
    /// Builds a polytope from a raw vertex list without validation.
    ///
    /// In the plane the gauge follows the vertices in angular order, so a
    /// non-convex star-shaped list produces a non-convex gauge. Use
    /// [`Polytope::validated`] for a proper unit ball.
    pub fn from_vertices(dim: usize, vertices: Vec<Vec<f64>>) -> Self {
        let ring = if dim == 2 { build_ring(&vertices) } else { Vec::new() };
        let facets = if dim == 2 {
            ring.iter().map(|s| s.normal.to_vec()).collect()
        } else {
            enumerate_facets(dim, &vertices).unwrap_or_default()
        };
        Self { dim, vertices, facets, ring }
    }

    /// Checks central symmetry and full dimension, then drops duplicate and
    /// non-extreme vertices.
    pub fn validated(dim: usize, vertices: Vec<Vec<f64>>) -> Result<Self> {
        if dim < 2 {
            return Err(Error::DimensionTooSmall(dim));
        }
        for (i, v) in vertices.iter().enumerate() {
            if v.len() != dim {
                return Err(Error::InvalidField {
                    path: format!("vertices[{i}]"),
                    message: format!("length {} does not match dim {dim}", v.len()),
                });
            }
            if v.iter().any(|c| !c.is_finite()) {
                return Err(Error::InvalidField {
                    path: format!("vertices[{i}]"),
                    message: "non-finite coordinate".into(),
                });
            }
        }
        let scale = vertices.iter().flat_map(|v| v.iter()).fold(0.0f64, |m, c| m.max(c.abs()));
        if scale == 0.0 {
            return Err(Error::DegeneratePolytope);
        }

        let mut unique: Vec<Vec<f64>> = Vec::with_capacity(vertices.len());
        for v in vertices {
            if !unique.iter().any(|u| max_abs_diff(u, &v) <= MERGE_TOL * scale) {
                unique.push(v);
            }
        }
        for v in &unique {
            let has_negation =
                unique.iter().any(|w| v.iter().zip(w).all(|(a, b)| (a + b).abs() <= SYMMETRY_TOL * scale));
            if !has_negation {
                return Err(Error::AsymmetricPolytope(v.clone()));
            }
        }
        if matrix_rank(dim, &unique) < dim {
            return Err(Error::DegeneratePolytope);
        }

        let facets = enumerate_facets(dim, &unique)?;
        if facets.len() < dim + 1 {
            return Err(Error::DegeneratePolytope);
        }
        let extreme: Vec<Vec<f64>> = unique
            .into_iter()
            .filter(|v| {
                let active: Vec<Vec<f64>> = facets.iter().filter(|n| dot(n, v) >= 1.0 - SUPPORT_TOL).cloned().collect();
                matrix_rank(dim, &active) == dim
            })
            .collect();

        let ring = if dim == 2 { build_ring(&extreme) } else { Vec::new() };
        let facets = if dim == 2 { ring.iter().map(|s| s.normal.to_vec()).collect() } else { facets };
        Ok(Self { dim, vertices: extreme, facets, ring })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    /// Facet normals `n` with facet inequality `<n, x> <= 1`; these are the
    /// vertices of the polar polytope.
    pub fn facet_normals(&self) -> &[Vec<f64>] {
        &self.facets
    }

    /// The Minkowski functional `min { t > 0 : v / t in hull }`.
    pub fn gauge(&self, v: &[f64]) -> f64 {
        if v.iter().all(|c| *c == 0.0) {
            return 0.0;
        }
        if self.dim == 2 && !self.ring.is_empty() {
            let angle = v[1].atan2(v[0]);
            let k = self.ring.partition_point(|s| s.start <= angle);
            let sector = if k == 0 { self.ring.len() - 1 } else { k - 1 };
            let n = self.ring[sector].normal;
            return n[0] * v[0] + n[1] * v[1];
        }
        self.facets.iter().map(|n| dot(n, v)).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Polar angles of the vertices, used to seed sampling grids with the
    /// corners of a planar ball.
    pub fn vertex_angles(&self) -> Vec<f64> {
        if self.dim != 2 {
            return Vec::new();
        }
        self.vertices.iter().map(|v| v[1].atan2(v[0])).collect()
    }

    /// The polar polytope, whose vertices are this polytope's facet normals.
    pub fn polar(&self) -> Result<Self> {
        Self::validated(self.dim, self.facets.clone())
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

fn matrix_rank(dim: usize, rows: &[Vec<f64>]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let m = DMatrix::from_fn(rows.len(), dim, |i, j| rows[i][j]);
    m.rank(1e-9)
}

/// Angularly sorted edges of a planar vertex list. Points sharing a polar
/// angle keep only the farthest one.
fn build_ring(vertices: &[Vec<f64>]) -> Vec<Sector> {
    let mut pts: Vec<(f64, [f64; 2])> =
        vertices.iter().filter(|v| v[0] != 0.0 || v[1] != 0.0).map(|v| (v[1].atan2(v[0]), [v[0], v[1]])).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then((b.1[0].hypot(b.1[1])).total_cmp(&a.1[0].hypot(a.1[1]))));
    pts.dedup_by(|b, a| (a.0 - b.0).abs() <= 1e-15);
    if pts.len() < 3 {
        return Vec::new();
    }
    (0..pts.len())
        .map(|i| {
            let (start, a) = pts[i];
            let (_, b) = pts[(i + 1) % pts.len()];
            let det = a[0] * b[1] - a[1] * b[0];
            let normal = if det.abs() > 0.0 {
                [(b[1] - a[1]) / det, (a[0] - b[0]) / det]
            } else {
                [f64::INFINITY, f64::INFINITY]
            };
            Sector { start: start.clamp(-PI, PI), normal }
        })
        .collect()
}

/// Supporting hyperplanes `<n, x> = 1` spanned by `dim` vertices, found by
/// scanning every `dim`-subset. Normals come out in symmetric pairs.
fn enumerate_facets(dim: usize, vertices: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let m = vertices.len();
    if m < dim {
        return Ok(Vec::new());
    }
    if binomial(m, dim) > MAX_SUBSETS {
        return Err(Error::InvalidParameter(format!(
            "polytope with {m} vertices in dimension {dim} is too large for facet enumeration"
        )));
    }
    let mut normals: Vec<Vec<f64>> = Vec::new();
    let mut subset: Vec<usize> = (0..dim).collect();
    loop {
        let a = DMatrix::from_fn(dim, dim, |i, j| vertices[subset[i]][j]);
        if let Some(n) = a.lu().solve(&DVector::from_element(dim, 1.0)) {
            let n: Vec<f64> = n.iter().copied().collect();
            let supports = n.iter().all(|c| c.is_finite()) && vertices.iter().all(|v| dot(&n, v) <= 1.0 + SUPPORT_TOL);
            let scale = n.iter().fold(0.0f64, |s, c| s.max(c.abs()));
            if supports && !normals.iter().any(|u| max_abs_diff(u, &n) <= 1e-9 * scale) {
                let neg: Vec<f64> = n.iter().map(|c| -c).collect();
                let has_neg = normals.iter().any(|u| max_abs_diff(u, &neg) <= 1e-9 * scale);
                normals.push(n);
                if !has_neg {
                    normals.push(neg);
                }
            }
        }
        if !next_subset(&mut subset, m) {
            break;
        }
    }
    Ok(normals)
}

fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i as u128 + 1))
}

fn next_subset(subset: &mut [usize], n: usize) -> bool {
    let k = subset.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if subset[i] < n - k + i {
            subset[i] += 1;
            for j in i + 1..k {
                subset[j] = subset[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn square() -> Vec<Vec<f64>> {
        vec![vec![1.0, 1.0], vec![-1.0, 1.0], vec![-1.0, -1.0], vec![1.0, -1.0]]
    }

    #[test]
    fn square_gauge_is_max_norm() {
        let p = Polytope::validated(2, square()).unwrap();
        assert_eq!(p.facet_normals().len(), 4);
        assert_abs_diff_eq!(p.gauge(&[1.0, 1.0]), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p.gauge(&[0.3, -2.0]), 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p.gauge(&[-0.5, 0.25]), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn drops_interior_and_edge_points() {
        let mut v = square();
        v.push(vec![1.0, 0.0]);
        v.push(vec![-1.0, 0.0]);
        v.push(vec![0.2, 0.1]);
        v.push(vec![-0.2, -0.1]);
        v.push(vec![1.0, 1.0]);
        let p = Polytope::validated(2, v).unwrap();
        assert_eq!(p.vertices().len(), 4);
    }

    #[test]
    fn cube_facets_in_three_dimensions() {
        let mut v = Vec::new();
        for s in 0..8 {
            v.push((0..3).map(|i| if s >> i & 1 == 1 { 1.0 } else { -1.0 }).collect());
        }
        let p = Polytope::validated(3, v).unwrap();
        assert_eq!(p.facet_normals().len(), 6);
        assert_abs_diff_eq!(p.gauge(&[0.5, -3.0, 1.0]), 3.0, epsilon = 1e-12);
        let polar = p.polar().unwrap();
        assert_eq!(polar.vertices().len(), 6);
        assert_abs_diff_eq!(polar.gauge(&[0.5, -3.0, 1.0]), 4.5, epsilon = 1e-12);
    }

    #[test]
    fn rejects_flat_vertex_sets() {
        let v = vec![vec![1.0, 1.0], vec![-1.0, -1.0]];
        assert_eq!(Polytope::validated(2, v), Err(Error::DegeneratePolytope));
    }

    #[test]
    fn subsets_enumerate_all_combinations() {
        let mut s = vec![0, 1];
        let mut count = 1;
        while next_subset(&mut s, 5) {
            count += 1;
        }
        assert_eq!(count, 10);
        assert_eq!(binomial(8, 3), 56);
    }
}
