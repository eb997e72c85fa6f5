//! Parameter sweeps over the `ℓ_p` family, with CSV and SVG output.

use std::fmt::Write as _;
use std::io::{Read, Write};

use inscribed_core::audit::lp_curve;
use inscribed_core::{sig, ConstantId, Direction, EstimateParams, Estimator, NormSpec};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const CSV_HEADER: [&str; 4] = ["p", "value", "direction", "analytic_upper_bound"];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepMeta {
    pub family: String,
    pub dim: usize,
    pub constant: ConstantId,
    pub theta_grid: usize,
    pub phi_grid: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub param: f64,
    pub constant: ConstantId,
    pub value: f64,
    pub direction: Direction,
    /// Closed-form upper bound, when one is known for the constant.
    pub bound: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepTable {
    pub meta: SweepMeta,
    pub rows: Vec<SweepRow>,
}

/// Evenly spaced exponents `a + i (b - a) / (k - 1)`, or just `a` when `k = 1`.
pub fn exponents(from: f64, to: f64, steps: usize) -> Result<Vec<f64>, CliError> {
    if !(from.is_finite() && to.is_finite()) || from < 1.0 || to <= from {
        return Err(CliError::Input(format!("bad range [{from}, {to}]: need 1 <= p-from < p-to")));
    }
    if steps == 0 {
        return Err(CliError::Input("steps must be at least 1".into()));
    }
    if steps == 1 {
        return Ok(vec![sig::round(from)]);
    }
    let h = (to - from) / (steps - 1) as f64;
    Ok((0..steps).map(|i| sig::round(if i + 1 == steps { to } else { from + i as f64 * h })).collect())
}

/// Closed-form upper bound for `constant` on `ℓ_p`, if any.
pub fn analytic_bound(constant: ConstantId, p: f64) -> Option<f64> {
    (constant == ConstantId::GL).then(|| lp_curve(p).0)
}

pub fn run_sweep(
    dim: usize,
    ps: &[f64],
    constant: ConstantId,
    params: &EstimateParams,
) -> Result<SweepTable, CliError> {
    let mut rows = Vec::with_capacity(ps.len());
    for &p in ps {
        let spec = NormSpec::lp(dim, p).validated()?;
        let est = Estimator::new(&spec, params)?.estimate(constant)?;
        rows.push(SweepRow {
            param: p,
            constant,
            value: sig::round(est.value),
            direction: est.direction,
            bound: analytic_bound(constant, p).map(sig::round),
        });
    }
    let s = &params.sampling;
    Ok(SweepTable {
        meta: SweepMeta {
            family: "lp".into(),
            dim,
            constant,
            theta_grid: s.theta_grid,
            phi_grid: s.phi_grid,
            seed: s.seed,
        },
        rows,
    })
}

fn direction_text(d: Direction) -> &'static str {
    match d {
        Direction::LowerBoundOfSup => "lower-bound-of-sup",
        Direction::UpperBoundOfInf => "upper-bound-of-inf",
    }
}

impl SweepTable {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), CliError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(CSV_HEADER).map_err(CliError::output)?;
        for r in &self.rows {
            let bound = r.bound.map(sig::format).unwrap_or_default();
            w.write_record([sig::format(r.param), sig::format(r.value), direction_text(r.direction).into(), bound])
                .map_err(CliError::output)?;
        }
        w.flush().map_err(CliError::output)
    }

    /// Parses CSV written by [`SweepTable::write_csv`]. The metadata is not
    /// part of the file and is supplied by the caller.
    pub fn read_csv<R: Read>(input: R, meta: SweepMeta) -> Result<Self, CliError> {
        #[derive(Deserialize)]
        struct Record {
            p: f64,
            value: f64,
            direction: Direction,
            analytic_upper_bound: Option<f64>,
        }
        let mut rd = csv::Reader::from_reader(input);
        let header = rd.headers().map_err(CliError::parse)?;
        if header.iter().ne(CSV_HEADER) {
            return Err(CliError::Input(format!("unexpected CSV header {header:?}")));
        }
        let mut rows = Vec::new();
        for rec in rd.deserialize::<Record>() {
            let rec = rec.map_err(CliError::parse)?;
            rows.push(SweepRow {
                param: rec.p,
                constant: meta.constant,
                value: rec.value,
                direction: rec.direction,
                bound: rec.analytic_upper_bound,
            });
        }
        Ok(SweepTable { meta, rows })
    }

    /// Line chart of value and analytic bound against `p`.
    pub fn to_svg(&self) -> String {
        const W: f64 = 640.0;
        const H: f64 = 400.0;
        const PAD: f64 = 56.0;
        let xs: Vec<f64> = self.rows.iter().map(|r| r.param).collect();
        let ys: Vec<f64> = self.rows.iter().flat_map(|r| std::iter::once(r.value).chain(r.bound)).collect();
        let (x0, x1) = span(&xs);
        let (y0, y1) = span(&ys);
        let px = |x: f64| PAD + (x - x0) / (x1 - x0) * (W - 2.0 * PAD);
        let py = |y: f64| H - PAD - (y - y0) / (y1 - y0) * (H - 2.0 * PAD);
        let polyline = |pts: Vec<(f64, f64)>, color: &str, dash: &str| {
            let pts: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y))).collect();
            format!(
                "  <polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"2\"{dash} points=\"{}\"/>\n",
                pts.join(" ")
            )
        };

        let label = self.meta.constant.to_string();
        let mut s = String::new();
        let _ = writeln!(
            s,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">"
        );
        let _ = writeln!(s, "  <rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>");
        let _ = writeln!(
            s,
            "  <g stroke=\"black\" stroke-width=\"1\"><line x1=\"{PAD}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\"/><line x1=\"{PAD}\" y1=\"{PAD}\" x2=\"{PAD}\" y2=\"{b}\"/></g>",
            b = H - PAD,
            r = W - PAD
        );
        let _ = writeln!(s, "  <g font-family=\"sans-serif\" font-size=\"12\">");
        for (x, anchor) in [(x0, "start"), (x1, "end")] {
            let _ = writeln!(
                s,
                "    <text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"{anchor}\">{}</text>",
                px(x),
                H - PAD + 18.0,
                sig::format(x)
            );
        }
        for y in [y0, y1] {
            let _ = writeln!(
                s,
                "    <text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\">{}</text>",
                PAD - 6.0,
                py(y) + 4.0,
                sig::format(sig::round(y))
            );
        }
        let _ = writeln!(s, "    <text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\">p</text>", W / 2.0, H - 14.0);
        let _ = writeln!(s, "    <text x=\"{:.2}\" y=\"24\" fill=\"#1f77b4\">{label} estimate</text>", PAD + 10.0);
        if self.rows.iter().any(|r| r.bound.is_some()) {
            let _ =
                writeln!(s, "    <text x=\"{:.2}\" y=\"40\" fill=\"#d62728\">analytic upper bound</text>", PAD + 10.0);
        }
        s.push_str("  </g>\n");
        s.push_str(&polyline(self.rows.iter().map(|r| (r.param, r.value)).collect(), "#1f77b4", ""));
        let bound: Vec<(f64, f64)> = self.rows.iter().filter_map(|r| r.bound.map(|b| (r.param, b))).collect();
        if !bound.is_empty() {
            s.push_str(&polyline(bound, "#d62728", " stroke-dasharray=\"6 4\""));
        }
        s.push_str("</svg>\n");
        s
    }
}

/// Data range padded so a flat series still spans the plot.
fn span(v: &[f64]) -> (f64, f64) {
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-9 {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponent_grid() {
        assert_eq!(exponents(2.0, 4.0, 3).unwrap(), vec![2.0, 3.0, 4.0]);
        assert_eq!(exponents(1.5, 4.0, 1).unwrap(), vec![1.5]);
        assert!(exponents(0.5, 2.0, 3).is_err());
        assert!(exponents(2.0, 2.0, 3).is_err());
        assert!(exponents(1.0, 2.0, 0).is_err());
        let ps = exponents(1.0, 2.0, 7).unwrap();
        assert!(ps.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(*ps.last().unwrap(), 2.0);
    }

    #[test]
    fn bound_only_for_gl() {
        assert_eq!(analytic_bound(ConstantId::GL, 2.0), Some(6.0));
        assert_eq!(analytic_bound(ConstantId::H, 2.0), None);
    }

    #[test]
    fn flat_series_still_has_a_range() {
        assert_eq!(span(&[6.0, 6.0]), (5.5, 6.5));
    }
}
