//! Solvers for `max { xᵀAx : ‖x‖₂ ≤ 1, ‖x‖₀ ≤ s }`.
//!
//! * [`thresholding_solve`]: keep the `s` largest loadings of the principal
//!   eigenvector, then renormalize on that support.
//! * [`congradu_solve`]: conditional gradient with unit step; every iterate
//!   maximizes the linearization at the previous one.
//! * [`gcw_solve`] / [`pcw_solve`]: coordinate-wise ascent over SO points.
//!   Each round first tries to grow a deficient support, then looks for a
//!   swap `i → j` whose score `f_{i,j}` beats the current value. GCW takes
//!   the best swap overall; PCW scans removal candidates by increasing
//!   `|x_i|` and takes the best swap for the first candidate that improves.
//!   Both stop at CW-maximal points.
//!
//! All solvers return unit-norm SO points (variational renormalization).

use std::collections::HashSet;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::conditions::{is_co_stationary, is_cw_maximal, SwapEvaluator};
use crate::error::{input, Result, SpcaError};
use crate::exec::{self, Execution};
use crate::linalg::{
    dominant_eigenpair, norm2, quad_form_unchecked, submatrix_unchecked, symmetric_eigen, SymMatrix,
};
use crate::oracle::{renormalize, so_point, SoPoint};
use crate::sparsity::{nnz, sqclp_first, support_of, top_support_first};

/// Default strict-improvement threshold.
pub const DEFAULT_TOL_IMPROVE: f64 = 1e-10;

/// Default iteration cap; reaching it marks the result as not converged.
pub const DEFAULT_MAX_ITER: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Threshold,
    #[serde(rename = "congradu")]
    ConGradU,
    Gcw,
    Pcw,
    /// Exhaustive search over all supports.
    Exhaustive,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Threshold => "threshold",
            Algorithm::ConGradU => "congradu",
            Algorithm::Gcw => "gcw",
            Algorithm::Pcw => "pcw",
            Algorithm::Exhaustive => "exhaustive",
        }
    }
}

impl std::str::FromStr for Algorithm {
    type Err = SpcaError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "threshold" | "thresholding" => Ok(Algorithm::Threshold),
            "congradu" => Ok(Algorithm::ConGradU),
            "gcw" => Ok(Algorithm::Gcw),
            "pcw" => Ok(Algorithm::Pcw),
            "exhaustive" => Ok(Algorithm::Exhaustive),
            other => input(format!("unknown algorithm '{other}'")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MoveKind {
    Init,
    Add,
    Swap,
    /// A conditional-gradient step.
    Step,
    Renormalize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub iteration: usize,
    pub value: f64,
    pub kind: MoveKind,
    /// Support of the iterate, 0-based.
    pub support: Vec<usize>,
}

/// Starting point of an iterative solver.
#[derive(Clone, Debug, Default, PartialEq)]
pub enum Init {
    /// The thresholding solution.
    #[default]
    Thresholding,
    /// The SO point on this 0-based support.
    Support(Vec<usize>),
    /// A feasible vector (renormalized for the CW solvers).
    Vector(Vec<f64>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    pub s: usize,
    pub tol_improve: f64,
    pub max_iter: usize,
    pub init: Init,
}

impl SolverConfig {
    pub fn new(s: usize) -> Self {
        SolverConfig {
            s,
            tol_improve: DEFAULT_TOL_IMPROVE,
            max_iter: DEFAULT_MAX_ITER,
            init: Init::Thresholding,
        }
    }

    pub fn with_init(mut self, init: Init) -> Self {
        self.init = init;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol_improve = tol;
        self
    }

    fn validate(&self, n: usize) -> Result<()> {
        if self.s < 1 || self.s > n {
            return input(format!("sparsity level must be in 1..={n}, got {}", self.s));
        }
        if self.tol_improve.is_nan() || self.tol_improve <= 0.0 {
            return input("tol_improve must be positive");
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Converged,
    MaxIter,
    DegenerateGradient,
}

/// Post-hoc verifier results; `None` until [`SolveResult::verify`] runs.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Flags {
    pub co_stationary: Option<bool>,
    pub cw_maximal: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    pub algorithm: Algorithm,
    pub s: usize,
    pub x: Vec<f64>,
    pub value: f64,
    /// Ascending, 0-based.
    pub support: Vec<usize>,
    pub iterations: usize,
    pub trace: Vec<TraceEntry>,
    pub elapsed_ms: f64,
    pub status: Status,
    /// Number of `f_{i,j}` scores evaluated.
    pub swap_evaluations: u64,
    /// Number of candidate supports scored for augmentation.
    pub augment_evaluations: u64,
    pub flags: Flags,
}

impl SolveResult {
    pub fn support_one_based(&self) -> Vec<usize> {
        self.support.iter().map(|i| i + 1).collect()
    }

    /// Fills [`Flags`] from the co-stationarity and CW verifiers.
    pub fn verify(&mut self, a: &SymMatrix, tol: f64) {
        self.flags.co_stationary = is_co_stationary(a, &self.x, self.s, tol)
            .ok()
            .map(|r| r.holds);
        self.flags.cw_maximal = is_cw_maximal(a, &self.x, self.s, tol).ok().map(|r| r.holds);
    }
}

struct Run {
    start: Instant,
    trace: Vec<TraceEntry>,
    visited: HashSet<Vec<usize>>,
    swap_evaluations: u64,
    augment_evaluations: u64,
}

impl Run {
    fn new() -> Self {
        Run {
            start: Instant::now(),
            trace: Vec::new(),
            visited: HashSet::new(),
            swap_evaluations: 0,
            augment_evaluations: 0,
        }
    }

    fn record(&mut self, kind: MoveKind, value: f64, x: &[f64]) {
        let support = support_of(x);
        let fresh = self.visited.insert(support.clone());
        debug_assert!(
            fresh || kind == MoveKind::Init,
            "support {support:?} revisited"
        );
        self.trace.push(TraceEntry {
            iteration: self.trace.len(),
            value,
            kind,
            support,
        });
    }

    fn finish(self, algorithm: Algorithm, s: usize, point: SoPoint, status: Status) -> SolveResult {
        SolveResult {
            algorithm,
            s,
            support: support_of(&point.x),
            value: point.value,
            x: point.x,
            iterations: self.trace.len().saturating_sub(1),
            trace: self.trace,
            elapsed_ms: self.start.elapsed().as_secs_f64() * 1e3,
            status,
            swap_evaluations: self.swap_evaluations,
            augment_evaluations: self.augment_evaluations,
            flags: Flags::default(),
        }
    }
}

/// Thresholds a given principal eigenvector and renormalizes.
pub fn thresholding_from_eigenvector(a: &SymMatrix, v: &[f64], s: usize) -> Result<SolveResult> {
    SolverConfig::new(s).validate(a.dim())?;
    let mut run = Run::new();
    let support = top_support_first(v, s)?;
    if support.is_empty() {
        return input("principal eigenvector is zero");
    }
    let p = so_point(a, &support)?;
    run.record(MoveKind::Init, p.value, &p.x);
    Ok(run.finish(Algorithm::Threshold, s, p, Status::Converged))
}

/// Thresholding baseline: top-`s` loadings of the principal eigenvector,
/// renormalized on their support.
pub fn thresholding_solve(a: &SymMatrix, s: usize) -> Result<SolveResult> {
    SolverConfig::new(s).validate(a.dim())?;
    let pair = dominant_eigenpair(a)?;
    thresholding_from_eigenvector(a, &pair.vector, s)
}

fn initial_point(a: &SymMatrix, cfg: &SolverConfig) -> Result<SoPoint> {
    match &cfg.init {
        Init::Thresholding => {
            let t = thresholding_solve(a, cfg.s)?;
            Ok(SoPoint {
                support: t.support.clone(),
                value: t.value,
                x: t.x,
            })
        }
        Init::Support(t) => {
            if t.is_empty() || t.len() > cfg.s {
                return input(format!(
                    "initial support must have between 1 and {} indices, got {}",
                    cfg.s,
                    t.len()
                ));
            }
            so_point(a, t)
        }
        Init::Vector(v) => {
            if v.len() != a.dim() {
                return input("initial vector has the wrong dimension");
            }
            if nnz(v) > cfg.s {
                return Err(SpcaError::Infeasible(format!(
                    "initial vector has more than {} nonzeros",
                    cfg.s
                )));
            }
            renormalize(a, v)
        }
    }
}

/// State after conditional-gradient iterations, before renormalization.
#[derive(Clone, Debug, PartialEq)]
pub struct ConGradUState {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub status: Status,
    pub trace: Vec<(f64, Vec<usize>)>,
}

/// Iterates `x ← argmax_{v∈S} ∇f(x)ᵀv` until `f` gains at most `tol_improve`.
pub fn congradu_iterate(
    a: &SymMatrix,
    x0: &[f64],
    s: usize,
    tol_improve: f64,
    max_iter: usize,
) -> Result<ConGradUState> {
    if x0.len() != a.dim() {
        return input("initial vector has the wrong dimension");
    }
    let n0 = norm2(x0);
    if n0 == 0.0 {
        return input("initial vector must be nonzero");
    }
    if n0 > 1.0 + 1e-12 || nnz(x0) > s {
        return Err(SpcaError::Infeasible(
            "initial vector is not in the feasible set".into(),
        ));
    }
    let mut x = x0.to_vec();
    let mut fx = quad_form_unchecked(a, &x);
    let mut trace = Vec::new();
    let mut status = Status::MaxIter;
    let mut iterations = 0;
    while iterations < max_iter {
        let g = a.mul_vec(&x);
        let (_, v) = match sqclp_first(&g, s) {
            Ok(r) => r,
            Err(SpcaError::Degenerate(_)) => {
                status = Status::DegenerateGradient;
                break;
            }
            Err(e) => return Err(e),
        };
        let fv = quad_form_unchecked(a, &v);
        if fv - fx <= tol_improve {
            status = Status::Converged;
            break;
        }
        x = v;
        fx = fv;
        iterations += 1;
        trace.push((fx, support_of(&x)));
    }
    Ok(ConGradUState {
        x,
        value: fx,
        iterations,
        status,
        trace,
    })
}

/// Conditional gradient with unit step, renormalized on its final support.
pub fn congradu_solve(a: &SymMatrix, cfg: &SolverConfig) -> Result<SolveResult> {
    cfg.validate(a.dim())?;
    let mut run = Run::new();
    let x0 = match &cfg.init {
        Init::Vector(v) => v.clone(),
        _ => initial_point(a, cfg)?.x,
    };
    run.record(MoveKind::Init, quad_form_unchecked(a, &x0), &x0);
    let state = congradu_iterate(a, &x0, cfg.s, cfg.tol_improve, cfg.max_iter)?;
    for (value, support) in &state.trace {
        run.visited.insert(support.clone());
        run.trace.push(TraceEntry {
            iteration: run.trace.len(),
            value: *value,
            kind: MoveKind::Step,
            support: support.clone(),
        });
    }
    let last = run.trace.last().map_or(f64::NEG_INFINITY, |t| t.value);
    let p = renormalize(a, &state.x)?;
    if p.value > last + cfg.tol_improve {
        run.trace.push(TraceEntry {
            iteration: run.trace.len(),
            value: p.value,
            kind: MoveKind::Renormalize,
            support: support_of(&p.x),
        });
    }
    Ok(run.finish(Algorithm::ConGradU, cfg.s, p, state.status))
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum SwapRule {
    Greedy,
    Partial,
}

/// Best single-index augmentation of `support`: `(j, λ1(A over support ∪ {j}))`,
/// lowest `j` on ties. Scores come from a bordered-matrix secular equation on
/// one eigendecomposition of `A_TT`.
fn best_augmentation(
    a: &SymMatrix,
    support: &[usize],
    exec: Execution,
) -> Result<Option<(usize, f64)>> {
    let eig = symmetric_eigen(&submatrix_unchecked(a, support), 200)?;
    let off: Vec<usize> = (0..a.dim())
        .filter(|j| support.binary_search(j).is_err())
        .collect();
    let scores = exec::map(exec, &off, |&j| {
        let border: Vec<f64> = support.iter().map(|&i| a.get(i, j)).collect();
        eig.bordered_max(&border, a.get(j, j))
    });
    let mut best: Option<(usize, f64)> = None;
    for (&j, &v) in off.iter().zip(&scores) {
        if best.is_none_or(|b| v > b.1) {
            best = Some((j, v));
        }
    }
    Ok(best)
}

fn cw_solve(
    a: &SymMatrix,
    cfg: &SolverConfig,
    rule: SwapRule,
    exec: Execution,
) -> Result<SolveResult> {
    cfg.validate(a.dim())?;
    let algorithm = match rule {
        SwapRule::Greedy => Algorithm::Gcw,
        SwapRule::Partial => Algorithm::Pcw,
    };
    let mut run = Run::new();
    let mut point = initial_point(a, cfg)?;
    run.record(MoveKind::Init, point.value, &point.x);
    let tol = cfg.tol_improve;
    let mut status = Status::MaxIter;

    'outer: while run.trace.len() <= cfg.max_iter {
        let on = support_of(&point.x);

        // Step 1: grow a deficient support.
        if on.len() < cfg.s {
            run.augment_evaluations += (a.dim() - on.len()) as u64;
            if let Some((j, v)) = best_augmentation(a, &on, exec)? {
                if v > point.value + tol {
                    let mut t = on.clone();
                    t.push(j);
                    point = so_point(a, &t)?;
                    run.record(MoveKind::Add, point.value, &point.x);
                    continue 'outer;
                }
            }
        }

        // Step 2: swaps.
        let off: Vec<usize> = (0..a.dim()).filter(|&j| point.x[j] == 0.0).collect();
        let ev = SwapEvaluator::new(a, &point.x);
        let mut chosen: Option<(usize, usize)> = None;
        match rule {
            SwapRule::Greedy => {
                let mut best = point.value + tol;
                for &i in &on {
                    for &j in &off {
                        let (v, _) = ev.eval(i, j);
                        if v > best {
                            best = v;
                            chosen = Some((i, j));
                        }
                    }
                }
                run.swap_evaluations += (on.len() * off.len()) as u64;
            }
            SwapRule::Partial => {
                let mut order = on.clone();
                order.sort_by(|&p, &q| {
                    point.x[p]
                        .abs()
                        .total_cmp(&point.x[q].abs())
                        .then(p.cmp(&q))
                });
                for &i in &order {
                    let mut best = point.value + tol;
                    for &j in &off {
                        let (v, _) = ev.eval(i, j);
                        if v > best {
                            best = v;
                            chosen = Some((i, j));
                        }
                    }
                    run.swap_evaluations += off.len() as u64;
                    if chosen.is_some() {
                        break;
                    }
                }
            }
        }
        match chosen {
            Some((i, j)) => {
                let mut t: Vec<usize> = on.iter().copied().filter(|&k| k != i).collect();
                t.push(j);
                point = so_point(a, &t)?;
                run.record(MoveKind::Swap, point.value, &point.x);
            }
            None => {
                status = Status::Converged;
                break;
            }
        }
    }
    Ok(run.finish(algorithm, cfg.s, point, status))
}

/// Greedy coordinate-wise ascent.
pub fn gcw_solve(a: &SymMatrix, cfg: &SolverConfig) -> Result<SolveResult> {
    cw_solve(a, cfg, SwapRule::Greedy, Execution::Sequential)
}

/// Partial coordinate-wise ascent.
pub fn pcw_solve(a: &SymMatrix, cfg: &SolverConfig) -> Result<SolveResult> {
    cw_solve(a, cfg, SwapRule::Partial, Execution::Sequential)
}

/// GCW/PCW with the augmentation scan fanned out according to `exec`.
pub fn cw_solve_with(
    a: &SymMatrix,
    cfg: &SolverConfig,
    algorithm: Algorithm,
    exec: Execution,
) -> Result<SolveResult> {
    match algorithm {
        Algorithm::Gcw => cw_solve(a, cfg, SwapRule::Greedy, exec),
        Algorithm::Pcw => cw_solve(a, cfg, SwapRule::Partial, exec),
        other => input(format!("{} is not a coordinate-wise solver", other.name())),
    }
}

/// Runs `algorithm` with `cfg`.
pub fn solve(a: &SymMatrix, algorithm: Algorithm, cfg: &SolverConfig) -> Result<SolveResult> {
    match algorithm {
        Algorithm::Threshold => thresholding_solve(a, cfg.s),
        Algorithm::ConGradU => congradu_solve(a, cfg),
        Algorithm::Gcw => gcw_solve(a, cfg),
        Algorithm::Pcw => pcw_solve(a, cfg),
        Algorithm::Exhaustive => crate::enumeration::global_bruteforce(a, cfg.s),
    }
}

/// PCW over increasing sparsity levels.
///
/// Cold: every level starts from its own thresholding solution. Warm: each
/// level after the first starts from the previous level's support.
pub fn pcw_path(a: &SymMatrix, levels: &[usize], warm: bool) -> Result<Vec<SolveResult>> {
    pcw_path_with(a, levels, warm, Execution::Sequential)
}

pub fn pcw_path_with(
    a: &SymMatrix,
    levels: &[usize],
    warm: bool,
    exec: Execution,
) -> Result<Vec<SolveResult>> {
    if levels.windows(2).any(|w| w[0] >= w[1]) {
        return input("sparsity levels must be strictly increasing");
    }
    if levels.is_empty() {
        return Ok(Vec::new());
    }
    let pair = dominant_eigenpair(a)?;
    let threshold_support = |s: usize| -> Result<Vec<usize>> {
        SolverConfig::new(s).validate(a.dim())?;
        Ok(support_of(
            &so_point(a, &top_support_first(&pair.vector, s)?)?.x,
        ))
    };
    if !warm {
        return exec::map(exec, levels, |&s| {
            let cfg = SolverConfig::new(s).with_init(Init::Support(threshold_support(s)?));
            pcw_solve(a, &cfg)
        })
        .into_iter()
        .collect();
    }
    let mut out: Vec<SolveResult> = Vec::with_capacity(levels.len());
    for &s in levels {
        let init = match out.last() {
            Some(prev) => Init::Support(prev.support.clone()),
            None => Init::Support(threshold_support(s)?),
        };
        out.push(pcw_solve(a, &SolverConfig::new(s).with_init(init))?);
    }
    Ok(out)
}

/// `xᵀAx / λ1(A)`.
pub fn explained_variability(a: &SymMatrix, x: &[f64]) -> Result<f64> {
    if x.len() != a.dim() {
        return input("dimension mismatch");
    }
    let lambda = dominant_eigenpair(a)?.value;
    explained_variability_with(lambda, quad_form_unchecked(a, x))
}

/// `value / λ1` for a precomputed leading eigenvalue.
pub fn explained_variability_with(lambda1: f64, value: f64) -> Result<f64> {
    if lambda1.is_nan() || lambda1 <= 0.0 {
        return input(format!(
            "leading eigenvalue must be positive, got {lambda1}"
        ));
    }
    Ok(value / lambda1)
}
