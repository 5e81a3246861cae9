//! Exhaustive enumeration of SO points over all supports of a given size.
//!
//! Every support gets its SO point and a co-stationarity check. The CW check
//! runs only on co-stationary rows. That filter drops nothing, because every
//! CW-maximal point is co-stationary.

use std::io::Write;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::conditions::{is_co_stationary, is_cw_maximal, DEFAULT_TOL};
use crate::error::{input, Result, SpcaError};
use crate::exec::{self, Execution};
use crate::linalg::SymMatrix;
use crate::oracle::so_point;
use crate::solvers::{Algorithm, Flags, MoveKind, SolveResult, Status, TraceEntry};
use crate::sparsity::{support_of, Combinations};

/// Largest number of supports [`enumerate_so`] will visit.
pub const ENUMERATION_CAP: u128 = 10_000_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnumerationRow {
    /// The enumerated support, ascending, 0-based.
    pub support: Vec<usize>,
    pub value: f64,
    pub co_stationary: bool,
    pub cw_maximal: bool,
    #[serde(skip)]
    pub x: Vec<f64>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub total: usize,
    pub co_stationary: usize,
    pub cw_maximal: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnumerationReport {
    pub n: usize,
    pub s: usize,
    pub counts: Counts,
    /// Sorted by value descending, ties by support lexicographically.
    pub rows: Vec<EnumerationRow>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnumerationOptions {
    pub tol: f64,
    /// Also enumerate supports smaller than `s`.
    pub up_to: bool,
    pub exec: Execution,
}

impl Default for EnumerationOptions {
    fn default() -> Self {
        EnumerationOptions {
            tol: DEFAULT_TOL,
            up_to: false,
            exec: Execution::Parallel,
        }
    }
}

/// Number of supports visited for `(n, s, up_to)`.
pub fn support_count(n: usize, s: usize, up_to: bool) -> u128 {
    if up_to {
        (1..=s).map(|k| Combinations::count(n, k)).sum()
    } else {
        Combinations::count(n, s)
    }
}

/// All SO points on supports of size exactly `s`, classified.
pub fn enumerate_so(a: &SymMatrix, s: usize) -> Result<EnumerationReport> {
    enumerate_so_with(a, s, &EnumerationOptions::default())
}

pub fn enumerate_so_with(
    a: &SymMatrix,
    s: usize,
    opts: &EnumerationOptions,
) -> Result<EnumerationReport> {
    let n = a.dim();
    if s < 1 || s > n {
        return input(format!("sparsity level must be in 1..={n}, got {s}"));
    }
    let count = support_count(n, s, opts.up_to);
    if count > ENUMERATION_CAP {
        return Err(SpcaError::Refused {
            count,
            cap: ENUMERATION_CAP,
        });
    }
    let sizes = if opts.up_to { 1..=s } else { s..=s };
    let supports: Vec<Vec<usize>> = sizes.flat_map(|k| Combinations::new(n, k)).collect();
    let rows = exec::map(opts.exec, &supports, |t| -> Result<EnumerationRow> {
        let p = so_point(a, t)?;
        let co = is_co_stationary(a, &p.x, s, opts.tol)?.holds;
        let cw = co && is_cw_maximal(a, &p.x, s, opts.tol)?.holds;
        Ok(EnumerationRow {
            support: p.support,
            value: p.value,
            co_stationary: co,
            cw_maximal: cw,
            x: p.x,
        })
    });
    let mut rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    rows.sort_by(|p, q| {
        q.value
            .total_cmp(&p.value)
            .then_with(|| p.support.cmp(&q.support))
    });
    let counts = Counts {
        total: rows.len(),
        co_stationary: rows.iter().filter(|r| r.co_stationary).count(),
        cw_maximal: rows.iter().filter(|r| r.cw_maximal).count(),
    };
    Ok(EnumerationReport { n, s, counts, rows })
}

/// Certified global maximizer over supports of size `s`.
pub fn global_bruteforce(a: &SymMatrix, s: usize) -> Result<SolveResult> {
    let start = Instant::now();
    let report = enumerate_so_with(
        a,
        s,
        &EnumerationOptions {
            exec: Execution::Sequential,
            ..Default::default()
        },
    )?;
    let best = report
        .rows
        .into_iter()
        .next()
        .expect("at least one support");
    Ok(SolveResult {
        algorithm: Algorithm::Exhaustive,
        s,
        support: support_of(&best.x),
        value: best.value,
        iterations: 0,
        trace: vec![TraceEntry {
            iteration: 0,
            value: best.value,
            kind: MoveKind::Init,
            support: support_of(&best.x),
        }],
        x: best.x,
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
        status: Status::Converged,
        swap_evaluations: 0,
        augment_evaluations: 0,
        flags: Flags {
            co_stationary: Some(best.co_stationary),
            cw_maximal: Some(best.cw_maximal),
        },
    })
}

fn format_support(t: &[usize]) -> String {
    t.iter()
        .map(|i| (i + 1).to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

impl EnumerationReport {
    /// `rank,support,value,co_stationary,cw_maximal` with 1-based,
    /// space-separated supports.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let csv_err = |e: csv::Error| SpcaError::Io(std::io::Error::other(e));
        out.write_record(["rank", "support", "value", "co_stationary", "cw_maximal"])
            .map_err(csv_err)?;
        for (k, r) in self.rows.iter().enumerate() {
            out.write_record([
                (k + 1).to_string(),
                format_support(&r.support),
                format!("{:.12}", r.value),
                r.co_stationary.to_string(),
                r.cw_maximal.to_string(),
            ])
            .map_err(csv_err)?;
        }
        out.flush()?;
        Ok(())
    }

    /// JSON with 1-based supports.
    pub fn to_json(&self) -> serde_json::Value {
        let rows: Vec<_> = self
            .rows
            .iter()
            .enumerate()
            .map(|(k, r)| {
                serde_json::json!({
                    "rank": k + 1,
                    "support": r.support.iter().map(|i| i + 1).collect::<Vec<_>>(),
                    "value": r.value,
                    "co_stationary": r.co_stationary,
                    "cw_maximal": r.cw_maximal,
                })
            })
            .collect();
        serde_json::json!({
            "n": self.n,
            "s": self.s,
            "counts": self.counts,
            "rows": rows,
        })
    }
}
