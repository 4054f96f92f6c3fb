//! Depth-number error against ground truth, penalty sweeps and method
//! comparisons, with CSV output.

use std::fmt::Write as _;
use std::time::Duration;

use crate::energy::{CostVolume, EnergyParams, Labeling};
use crate::error::{Error, Result};
use crate::graphcut::{solve_exact, CutResult, SolverConfig};
use crate::hierarchy::{solve_level1, solve_level2, HierarchyConfig};
use crate::imaging::GroundTruthDepth;

/// `error = sum over evaluated sites of |X - X_truth|`, with the histogram of
/// differences.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ErrorReport {
    pub total_error: u64,
    /// `histogram[d]` sites differ by exactly `d`; runs to the largest
    /// observed difference.
    pub histogram: Vec<u64>,
    pub evaluated: u64,
}

impl ErrorReport {
    pub fn from_histogram(histogram: Vec<u64>) -> Self {
        let total_error = histogram.iter().enumerate().map(|(d, &c)| d as u64 * c).sum();
        let evaluated = histogram.iter().sum();
        ErrorReport {
            total_error,
            histogram,
            evaluated,
        }
    }

    pub fn exact_sites(&self) -> u64 {
        self.histogram.first().copied().unwrap_or(0)
    }

    /// Share of evaluated sites with zero difference, in percent.
    pub fn exact_percent(&self) -> f64 {
        if self.evaluated == 0 {
            return 100.0;
        }
        100.0 * self.exact_sites() as f64 / self.evaluated as f64
    }

    /// Histogram folded at `cap`: rows `0 .. cap - 1` and a final `cap~` row
    /// holding every larger difference.
    pub fn bucketed(&self, cap: usize) -> Vec<(String, u64)> {
        let mut rows: Vec<(String, u64)> = (0..cap)
            .map(|d| (d.to_string(), self.histogram.get(d).copied().unwrap_or(0)))
            .collect();
        let tail = self.histogram.iter().skip(cap).sum();
        rows.push((format!("{cap}~"), tail));
        rows
    }

    pub fn summary(&self) -> String {
        format!(
            "error={} exact={} evaluated={} exact_pct={:.2}",
            self.total_error,
            self.exact_sites(),
            self.evaluated,
            self.exact_percent()
        )
    }
}

/// Compares `labeling` with the valid sites of `gt`.
pub fn error_count(labeling: &Labeling, gt: &GroundTruthDepth) -> Result<ErrorReport> {
    if labeling.g_extent() != gt.g_extent || labeling.y_extent() != gt.y_extent {
        return Err(Error::Eval(format!(
            "labeling covers {}x{} sites but ground truth {}x{}",
            labeling.g_extent(),
            labeling.y_extent(),
            gt.g_extent,
            gt.y_extent
        )));
    }
    let mut histogram: Vec<u64> = Vec::new();
    for (&x, truth) in labeling.as_slice().iter().zip(&gt.labels) {
        if let Some(t) = truth {
            let d = x.abs_diff(*t) as usize;
            if histogram.len() <= d {
                histogram.resize(d + 1, 0);
            }
            histogram[d] += 1;
        }
    }
    Ok(ErrorReport::from_histogram(histogram))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub penalty: i64,
    pub inhibit: i64,
    pub error: u64,
    pub exact_percent: f64,
    pub energy: i64,
    pub flow: i64,
    pub time: Duration,
}

/// Runs the exact solver once per penalty, in the given order.
pub fn sweep_penalty(
    volume: &CostVolume,
    gt: &GroundTruthDepth,
    penalties: &[i64],
    base: &EnergyParams,
    solver: &SolverConfig,
) -> Result<Vec<SweepRecord>> {
    if penalties.is_empty() {
        return Err(Error::Config("empty penalty list".into()));
    }
    penalties
        .iter()
        .map(|&penalty| {
            let params = EnergyParams { penalty, ..*base };
            let r = solve_exact(volume, &params, solver)?;
            let report = error_count(&r.labeling, gt)?;
            Ok(SweepRecord {
                penalty,
                inhibit: base.inhibit,
                error: report.total_error,
                exact_percent: report.exact_percent(),
                energy: r.energy,
                flow: r.flow_value,
                time: r.stats.total_time(),
            })
        })
        .collect()
}

/// Hierarchy level (0 = exact) and block size of one compared method.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MethodConfig {
    pub level: u8,
    pub block: usize,
}

impl MethodConfig {
    pub fn id(&self) -> String {
        match self.level {
            0 => "exact".to_string(),
            l => format!("l={l} b={}", self.block),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ComparisonRow {
    pub method: MethodConfig,
    pub report: ErrorReport,
    pub energy: i64,
    pub result: CutResult,
}

/// Solves once with the given method.
pub fn run_method(
    volume: &CostVolume,
    params: &EnergyParams,
    method: MethodConfig,
    skin_radius: usize,
    solver: &SolverConfig,
) -> Result<CutResult> {
    let cfg = HierarchyConfig {
        block: method.block,
        skin_radius,
        solver: *solver,
    };
    match method.level {
        0 => solve_exact(volume, params, solver),
        1 => Ok(solve_level1(volume, params, &cfg)?.fine),
        2 => Ok(solve_level2(volume, params, &cfg)?.fine),
        l => Err(Error::Config(format!("unknown level {l}"))),
    }
}

pub fn compare_methods(
    volume: &CostVolume,
    gt: &GroundTruthDepth,
    params: &EnergyParams,
    methods: &[MethodConfig],
    skin_radius: usize,
    solver: &SolverConfig,
) -> Result<Vec<ComparisonRow>> {
    methods
        .iter()
        .map(|&method| {
            let result = run_method(volume, params, method, skin_radius, solver)?;
            Ok(ComparisonRow {
                method,
                report: error_count(&result.labeling, gt)?,
                energy: result.energy,
                result,
            })
        })
        .collect()
}

fn header(out: &mut String, comments: &[String]) {
    for c in comments {
        let _ = writeln!(out, "# {c}");
    }
}

fn ms(d: Duration) -> String {
    format!("{:.3}", d.as_secs_f64() * 1e3)
}

/// Sweep CSV. Wall times are included only when `timings` is set so that
/// repeated runs produce identical bytes by default.
pub fn sweep_csv(records: &[SweepRecord], comments: &[String], timings: bool) -> String {
    let mut out = String::new();
    header(&mut out, comments);
    out.push_str("penalty,inhibit,error,exact_pct,energy,flow");
    out.push_str(if timings { ",time_ms\n" } else { "\n" });
    for r in records {
        let _ = write!(
            out,
            "{},{},{},{:.2},{},{}",
            r.penalty, r.inhibit, r.error, r.exact_percent, r.energy, r.flow
        );
        if timings {
            let _ = write!(out, ",{}", ms(r.time));
        }
        out.push('\n');
    }
    out
}

pub fn comparison_csv(rows: &[ComparisonRow], comments: &[String], timings: bool) -> String {
    let mut out = String::new();
    header(&mut out, comments);
    out.push_str("method,level,block,error,exact_pct,evaluated,energy,flow,stop");
    out.push_str(if timings { ",build_ms,flow_ms,extract_ms,total_ms\n" } else { "\n" });
    for r in rows {
        let s = &r.result.stats;
        let _ = write!(
            out,
            "{},{},{},{},{:.2},{},{},{},{:?}",
            r.method.id(),
            r.method.level,
            r.method.block,
            r.report.total_error,
            r.report.exact_percent(),
            r.report.evaluated,
            r.energy,
            r.result.flow_value,
            s.stop
        );
        if timings {
            let _ = write!(
                out,
                ",{},{},{},{}",
                ms(s.build_time),
                ms(s.flow_time),
                ms(s.extract_time),
                ms(s.total_time())
            );
        }
        out.push('\n');
    }
    out
}

/// Histogram as a two-column CSV with the folded `10~` row.
pub fn histogram_csv(report: &ErrorReport) -> String {
    let mut out = String::from("difference,count\n");
    for (label, count) in report.bucketed(10) {
        let _ = writeln!(out, "{label},{count}");
    }
    let _ = writeln!(out, "error,{}", report.total_error);
    out
}
