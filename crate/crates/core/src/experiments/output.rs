use std::io::Write;

use super::config::Config;
use super::runs::{ScalingSeries, StabilityReport, SweepRow};
use crate::banach_scale::TrajectoryField;
use crate::error::Result;

/// Comment lines opening every CSV: config hash and seed, then units.
pub fn csv_preamble(cfg: &Config, units: &str) -> Vec<String> {
    vec![
        format!("config_sha256={} seed={}", cfg.hash(), cfg.seed),
        format!("units: {units}"),
    ]
}

fn write_preamble<W: Write>(w: &mut W, lines: &[String]) -> Result<()> {
    for l in lines {
        writeln!(w, "# {l}")?;
    }
    Ok(())
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(|v| format!("{v:.17e}")).unwrap_or_default()
}

fn write_rows<W: Write>(w: &mut W, rows: &[SweepRow], prefix: &str) -> Result<()> {
    for r in rows {
        let failure = r.failure.as_deref().unwrap_or("").replace(',', ";");
        writeln!(w, "{prefix}{:.17e},{:.17e},{},{}", r.parameter, r.eps, fmt_opt(r.error), failure)?;
    }
    Ok(())
}

pub fn write_stability_csv<W: Write>(w: &mut W, cfg: &Config, report: &StabilityReport) -> Result<()> {
    write_preamble(
        w,
        &csv_preamble(cfg, "iota dimensionless; error = sup over rescaled time of the X^0 distance, nondimensional"),
    )?;
    writeln!(w, "# fitted_slope={}", fmt_opt(report.slope))?;
    writeln!(w, "iota,eps,error,failure")?;
    write_rows(w, &report.rows, "")
}

pub fn write_scaling_csv<W: Write>(w: &mut W, cfg: &Config, series: &[ScalingSeries]) -> Result<()> {
    write_preamble(
        w,
        &csv_preamble(cfg, "mu, eps dimensionless; error = sup over rescaled time of the X^0 distance, nondimensional"),
    )?;
    for s in series {
        writeln!(w, "# regime={} fitted_exponent={}", regime_name(s), fmt_opt(s.exponent))?;
    }
    writeln!(w, "regime,mu,eps,error,failure")?;
    for s in series {
        write_rows(w, &s.rows, &format!("{},", regime_name(s)))?;
    }
    Ok(())
}

fn regime_name(s: &ScalingSeries) -> String {
    serde_json::to_value(s.regime)
        .ok()
        .and_then(|v| v.as_str().map(str::to_owned))
        .unwrap_or_default()
}

/// One row per node and output time: `t,x[,y],V...,zeta` in physical space.
pub fn write_trajectory_csv<W: Write>(w: &mut W, cfg: &Config, u: &TrajectoryField) -> Result<()> {
    write_preamble(
        w,
        &csv_preamble(cfg, "t rescaled time; x, y in units of the depth scale; V, zeta nondimensional"),
    )?;
    let grid = u.first().grid().clone();
    let d = grid.dimension();
    let header: Vec<String> = ["t".to_string()]
        .into_iter()
        .chain(["x", "y"].iter().take(d).map(|s| s.to_string()))
        .chain((0..d).map(|i| format!("V{i}")))
        .chain(["zeta".to_string()])
        .collect();
    writeln!(w, "{}", header.join(","))?;
    let nodes = grid.nodes();
    for (t, snap) in u.times().iter().zip(u.snapshots()) {
        let phys = snap.to_physical();
        for (j, x) in nodes.iter().enumerate() {
            let mut line = format!("{t:.17e}");
            for xi in x.iter().take(d) {
                line.push_str(&format!(",{xi:.17e}"));
            }
            for c in &phys {
                line.push_str(&format!(",{:.17e}", c[j]));
            }
            writeln!(w, "{line}")?;
        }
    }
    Ok(())
}
