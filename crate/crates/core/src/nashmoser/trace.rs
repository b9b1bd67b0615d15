use std::io::Write;

use serde::{Deserialize, Serialize};

use super::schedule::ScheduleParams;
use crate::error::Result;

/// One row of the iteration trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub k: usize,
    pub theta_k: f64,
    /// `|u_k|_{E^{s+D}}`
    pub norm_u_esd: f64,
    /// `|u_k|_{E^{s+P}}`
    pub norm_u_esp: f64,
    /// `|v_k|_{E^{s+D}}`; absent on the terminal record, where no correction is computed.
    pub norm_v_esd: Option<f64>,
    /// Residual in `F^{s+d1p}`.
    pub residual_f: f64,
    pub prop_i: bool,
    pub prop_ii: bool,
    pub prop_iii: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct IterationTrace {
    pub records: Vec<IterationRecord>,
    /// Bound `M` used for property (ii).
    pub big_m: f64,
}

/// Property verdicts recomputed from logged norms.
#[derive(Debug, Clone, PartialEq)]
pub struct InductionReport {
    pub per_k: Vec<[bool; 3]>,
    pub first_failure: [Option<usize>; 3],
}

impl InductionReport {
    pub fn all_hold(&self) -> bool {
        self.first_failure.iter().all(Option::is_none)
    }
}

/// `(i)` `|u_k|_{E^{s+P}} <= theta_k^alpha`, `(ii)` `|u_k|_{E^{s+D}} <= M`,
/// `(iii)` `|v_k|_{E^{s+D}} <= theta_k^{-q}`.
pub fn properties(rec: &IterationRecord, schedule: &ScheduleParams, big_m: f64) -> [bool; 3] {
    let t = rec.theta_k;
    [
        rec.norm_u_esp <= t.powf(schedule.alpha),
        rec.norm_u_esd <= big_m,
        rec.norm_v_esd.map_or(true, |v| v <= t.powf(-schedule.q)),
    ]
}

/// Evaluate the three induction properties at every recorded iteration.
pub fn check_induction(trace: &IterationTrace, schedule: &ScheduleParams) -> InductionReport {
    let big_m = schedule.big_m.unwrap_or(trace.big_m);
    let per_k: Vec<[bool; 3]> = trace.records.iter().map(|r| properties(r, schedule, big_m)).collect();
    let mut first_failure = [None; 3];
    for (i, p) in first_failure.iter_mut().enumerate() {
        *p = per_k.iter().position(|flags| !flags[i]).map(|pos| trace.records[pos].k);
    }
    InductionReport { per_k, first_failure }
}

pub const TRACE_COLUMNS: &str = "k,theta_k,norm_u_EsD,norm_u_EsP,norm_v_EsD,residual_F,prop_i,prop_ii,prop_iii";

impl IterationTrace {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn last(&self) -> Option<&IterationRecord> {
        self.records.last()
    }

    pub fn residuals(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.residual_f).collect()
    }

    /// CSV rows under [`TRACE_COLUMNS`]; `preamble` lines are written first as `#` comments.
    pub fn write_csv<W: Write>(&self, w: &mut W, preamble: &[String]) -> Result<()> {
        for line in preamble {
            writeln!(w, "# {line}")?;
        }
        writeln!(w, "{TRACE_COLUMNS}")?;
        for r in &self.records {
            let v = r.norm_v_esd.map(|v| format!("{v:.17e}")).unwrap_or_default();
            writeln!(
                w,
                "{},{:.17e},{:.17e},{:.17e},{},{:.17e},{},{},{}",
                r.k, r.theta_k, r.norm_u_esd, r.norm_u_esp, v, r.residual_f, r.prop_i, r.prop_ii, r.prop_iii
            )?;
        }
        Ok(())
    }

    /// Parse rows written by [`write_csv`](Self::write_csv).
    pub fn read_csv(text: &str, big_m: f64) -> Result<IterationTrace> {
        let bad = |l: &str| crate::Error::Config(format!("malformed trace row: {l}"));
        let mut records = Vec::new();
        for line in text.lines() {
            if line.starts_with('#') || line.starts_with("k,") || line.trim().is_empty() {
                continue;
            }
            let c: Vec<&str> = line.split(',').collect();
            if c.len() != 9 {
                return Err(bad(line));
            }
            let f = |s: &str| s.parse::<f64>().map_err(|_| bad(line));
            let b = |s: &str| s.parse::<bool>().map_err(|_| bad(line));
            records.push(IterationRecord {
                k: c[0].parse().map_err(|_| bad(line))?,
                theta_k: f(c[1])?,
                norm_u_esd: f(c[2])?,
                norm_u_esp: f(c[3])?,
                norm_v_esd: if c[4].is_empty() { None } else { Some(f(c[4])?) },
                residual_f: f(c[5])?,
                prop_i: b(c[6])?,
                prop_ii: b(c[7])?,
                prop_iii: b(c[8])?,
            });
        }
        Ok(IterationTrace { records, big_m })
    }
}
