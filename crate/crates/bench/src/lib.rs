//! Fixtures shared by the benchmarks in `benches/`.

use inscribed_core::{EstimateParams, NormSpec};

/// The planar test spaces: smooth, flat and polyhedral.
pub fn spaces() -> Vec<(&'static str, NormSpec)> {
    vec![
        ("l2", NormSpec::lp(2, 2.0)),
        ("l3", NormSpec::lp(2, 3.0)),
        ("linf", NormSpec::linf(2)),
        ("hexagon", NormSpec::hexagon()),
    ]
}

pub fn params(grid: usize) -> EstimateParams {
    EstimateParams::default().with_grid(grid)
}
