use std::fs;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use serde_json::{json, Value};
use spca_core::conditions::{is_co_stationary, is_cw_maximal, is_support_optimal};
use spca_core::enumeration::{enumerate_so_with, EnumerationOptions};
use spca_core::exec::map;
use spca_core::io::{
    generate_gaussian, matrix_to_csv, parse_csv, save_csv, sha256_hex, DataKind, RandomSpec,
};
use spca_core::linalg::{dominant_eigenpair, quad_form};
use spca_core::oracle::so_point;
use spca_core::solvers::{
    explained_variability_with, pcw_path, solve as run_solver, thresholding_from_eigenvector,
    Algorithm, Init, SolverConfig,
};
use spca_core::sparsity::support_of;
use spca_core::{Execution, SymMatrix};

use crate::args::{
    Algo, Condition, EnumerateArgs, Format, GenArgs, InputArgs, Kind, SolveArgs, SweepArgs,
    VerifyArgs,
};
use crate::record::{condition, one_based, run_record, trace};
use crate::Failure;

/// A loaded problem matrix with its provenance.
pub struct Instance {
    pub a: SymMatrix,
    pub source: String,
    /// SHA-256 of the input file, or of the CSV text `gen` would write for
    /// a generated instance.
    pub fingerprint: String,
}

fn data_kind(kind: Kind) -> DataKind {
    match kind {
        Kind::Cov => DataKind::Covariance,
        Kind::Data => DataKind::DataMatrix,
    }
}

fn load_file(path: &Path, kind: Kind) -> Result<Instance, Failure> {
    let bytes = fs::read(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    let text = std::str::from_utf8(&bytes)
        .map_err(|_| Failure::Usage(format!("{} is not UTF-8 text", path.display())))?;
    let data = parse_csv(text, data_kind(kind), &path.display().to_string())
        .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let a = data
        .covariance()
        .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    Ok(Instance {
        a,
        source: data.source,
        fingerprint: sha256_hex(&bytes),
    })
}

fn generated(n: usize, m: usize, seed: u64) -> Result<Instance, Failure> {
    if n == 0 || m == 0 {
        return Err(Failure::Usage("--random and --m must be positive".into()));
    }
    let data = generate_gaussian(RandomSpec { m, n, seed })?;
    Ok(Instance {
        fingerprint: sha256_hex(matrix_to_csv(&data.matrix, None).as_bytes()),
        a: data.covariance()?,
        source: data.source,
    })
}

fn load(input: &InputArgs) -> Result<Instance, Failure> {
    match (&input.input, input.random) {
        (Some(path), _) => load_file(path, input.kind),
        (None, Some(n)) => generated(n, input.m, input.seed),
        (None, None) => Err(Failure::Usage(
            "one of --input or --random is required".into(),
        )),
    }
}

fn check_level(s: usize, n: usize) -> Result<(), Failure> {
    if s < 1 || s > n {
        return Err(Failure::Infeasible(format!(
            "--s must be in 1..={n}, got {s}"
        )));
    }
    Ok(())
}

fn zero_based(t: &[usize], n: usize) -> Result<Vec<usize>, Failure> {
    t.iter()
        .map(|&i| {
            if i < 1 || i > n {
                Err(Failure::Infeasible(format!("index {i} is outside 1..={n}")))
            } else {
                Ok(i - 1)
            }
        })
        .collect()
}

fn algorithm(algo: Algo) -> Algorithm {
    match algo {
        Algo::Gcw => Algorithm::Gcw,
        Algo::Pcw => Algorithm::Pcw,
        Algo::Congradu => Algorithm::ConGradU,
        Algo::Threshold => Algorithm::Threshold,
    }
}

fn print_json(doc: &Value) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(doc).expect("serializable");
    text.push('\n');
    write_out(None, text.as_bytes())
}

pub fn solve(args: &SolveArgs) -> Result<u8, Failure> {
    let start = Instant::now();
    if args.tol.is_nan() || args.tol <= 0.0 {
        return Err(Failure::Usage("--tol must be positive".into()));
    }
    let inst = load(&args.input)?;
    let a = &inst.a;
    check_level(args.s, a.dim())?;
    let init = match &args.init_support {
        Some(t) => Init::Support(zero_based(t, a.dim())?),
        None => Init::Thresholding,
    };
    let cfg = SolverConfig {
        s: args.s,
        tol_improve: args.tol,
        max_iter: args.max_iter,
        init,
    };
    let mut r = run_solver(a, algorithm(args.algo), &cfg)?;
    r.verify(a, spca_core::conditions::DEFAULT_TOL);
    let lambda1 = dominant_eigenpair(a)?.value;
    let config = json!({
        "algo": r.algorithm,
        "s": args.s,
        "tol": args.tol,
        "max_iter": args.max_iter,
        "init_support": args.init_support,
    });
    let payload = json!({
        "algorithm": r.algorithm,
        "s": r.s,
        "support": r.support_one_based(),
        "value": r.value,
        "explained_variability": explained_variability_with(lambda1, r.value)?,
        "iterations": r.iterations,
        "co_stationary": r.flags.co_stationary,
        "cw_maximal": r.flags.cw_maximal,
        "status": r.status,
        "swap_evaluations": r.swap_evaluations,
        "x": r.x,
        "trace": trace(&r.trace),
    });
    print_json(&run_record(
        "solve",
        &inst,
        config,
        payload,
        start.elapsed().as_secs_f64() * 1e3,
    ))?;
    Ok(0)
}

fn read_point(path: &Path, n: usize) -> Result<Vec<f64>, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    let data = parse_csv(&text, DataKind::DataMatrix, &path.display().to_string())
        .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let m = data.matrix;
    if m.rows() != 1 && m.cols() != 1 {
        return Err(Failure::Usage(format!(
            "{}: a point must be one row or one column, got {}×{}",
            path.display(),
            m.rows(),
            m.cols()
        )));
    }
    let x = m.as_slice().to_vec();
    if x.len() != n {
        return Err(Failure::Usage(format!(
            "point has {} entries, matrix dimension is {n}",
            x.len()
        )));
    }
    Ok(x)
}

pub fn verify(args: &VerifyArgs) -> Result<u8, Failure> {
    let start = Instant::now();
    let inst = load(&args.input)?;
    let a = &inst.a;
    check_level(args.s, a.dim())?;
    let x = match (&args.support, &args.point) {
        (Some(t), _) => {
            let t = zero_based(t, a.dim())?;
            so_point(a, &t)?.x
        }
        (None, Some(p)) => read_point(p, a.dim())?,
        (None, None) => {
            return Err(Failure::Usage(
                "one of --support or --point is required".into(),
            ))
        }
    };
    let report = match args.condition {
        Condition::So => is_support_optimal(a, &x, args.tol)?,
        Condition::Co => is_co_stationary(a, &x, args.s, args.tol)?,
        Condition::Cw => {
            // Feasibility first, so infeasible points are reported as such.
            is_co_stationary(a, &x, args.s, args.tol)?;
            let so = is_support_optimal(a, &x, args.tol)?;
            if so.holds {
                is_cw_maximal(a, &x, args.s, args.tol)?
            } else {
                so
            }
        }
    };
    let name = match args.condition {
        Condition::So => "so",
        Condition::Co => "co",
        Condition::Cw => "cw",
    };
    let config = json!({"condition": name, "s": args.s, "tol": args.tol});
    let mut payload = condition(&report);
    payload["condition"] = json!(name);
    payload["s"] = json!(args.s);
    payload["support"] = json!(one_based(&support_of(&x)));
    payload["value"] = json!(quad_form(a, &x)?);
    payload["x"] = json!(x);
    print_json(&run_record(
        "verify",
        &inst,
        config,
        payload,
        start.elapsed().as_secs_f64() * 1e3,
    ))?;
    Ok(if report.holds { 0 } else { 1 })
}

fn write_out(path: Option<&Path>, bytes: &[u8]) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, bytes)
            .map_err(|e| Failure::Numeric(format!("cannot write {}: {e}", p.display()))),
        None => match std::io::stdout().lock().write_all(bytes) {
            // A closed pipe (`spca ... | head`) is the reader's choice, not a failure.
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
                Err(Failure::Numeric(format!("cannot write to stdout: {e}")))
            }
            _ => Ok(()),
        },
    }
}

pub fn enumerate(args: &EnumerateArgs) -> Result<u8, Failure> {
    let start = Instant::now();
    let inst = load(&args.input)?;
    check_level(args.s, inst.a.dim())?;
    let opts = EnumerationOptions {
        tol: args.tol,
        up_to: args.up_to,
        exec: Execution::Parallel,
    };
    let report = enumerate_so_with(&inst.a, args.s, &opts)?;
    let bytes = match args.format {
        Format::Csv => {
            let mut buf = Vec::new();
            report.write_csv(&mut buf)?;
            buf
        }
        Format::Json => {
            let config = json!({"s": args.s, "up_to": args.up_to, "tol": args.tol});
            let doc = run_record(
                "enumerate",
                &inst,
                config,
                report.to_json(),
                start.elapsed().as_secs_f64() * 1e3,
            );
            let mut text = serde_json::to_string_pretty(&doc).expect("serializable");
            text.push('\n');
            text.into_bytes()
        }
    };
    write_out(args.out.as_deref(), &bytes)?;
    eprintln!("total co_stationary cw_maximal");
    eprintln!(
        "{} {} {}",
        report.counts.total, report.counts.co_stationary, report.counts.cw_maximal
    );
    Ok(0)
}

fn parse_range(text: &str) -> Result<Vec<usize>, Failure> {
    let bad = || Failure::Usage(format!("--s-range must be LO:HI:STEP, got '{text}'"));
    let parts: Vec<usize> = text
        .split(':')
        .map(|p| p.trim().parse::<usize>().map_err(|_| bad()))
        .collect::<Result<_, _>>()?;
    let (lo, hi, step) = match parts[..] {
        [s] => (s, s, 1),
        [lo, hi] => (lo, hi, 1),
        [lo, hi, step] => (lo, hi, step),
        _ => return Err(bad()),
    };
    if lo == 0 || step == 0 || hi < lo {
        return Err(bad());
    }
    Ok((lo..=hi).step_by(step).collect())
}

struct SweepRow {
    algo: &'static str,
    s: usize,
    value: f64,
    explained: f64,
    iterations: usize,
    swap_evaluations: u64,
    runtime_ms: f64,
}

fn sweep_instance(
    a: &SymMatrix,
    algos: &[Algo],
    levels: &[usize],
    warm: bool,
) -> Result<Vec<SweepRow>, Failure> {
    let t0 = Instant::now();
    let top = dominant_eigenpair(a)?;
    let eig_ms = t0.elapsed().as_secs_f64() * 1e3;
    let ev = |v: f64| explained_variability_with(top.value, v);
    let mut rows = Vec::new();
    for &algo in algos {
        if algo == Algo::Pcw {
            for r in pcw_path(a, levels, warm)? {
                rows.push(SweepRow {
                    algo: if warm { "pcw_cont" } else { "pcw" },
                    s: r.s,
                    value: r.value,
                    explained: ev(r.value)?,
                    iterations: r.iterations,
                    swap_evaluations: r.swap_evaluations,
                    runtime_ms: r.elapsed_ms,
                });
            }
            continue;
        }
        for &s in levels {
            let th = thresholding_from_eigenvector(a, &top.vector, s)?;
            let r = match algo {
                Algo::Threshold => {
                    let mut th = th;
                    // Thresholding pays for the eigenvector; the others get it as init.
                    th.elapsed_ms += eig_ms;
                    th
                }
                other => {
                    let cfg = SolverConfig::new(s).with_init(Init::Support(th.support));
                    run_solver(a, algorithm(other), &cfg)?
                }
            };
            rows.push(SweepRow {
                algo: r.algorithm.name(),
                s,
                value: r.value,
                explained: ev(r.value)?,
                iterations: r.iterations,
                swap_evaluations: r.swap_evaluations,
                runtime_ms: r.elapsed_ms,
            });
        }
    }
    Ok(rows)
}

pub fn sweep(args: &SweepArgs) -> Result<u8, Failure> {
    if args.warm && args.algos.iter().any(|&a| a != Algo::Pcw) {
        return Err(Failure::Usage("--warm applies to pcw only".into()));
    }
    let levels = parse_range(&args.s_range)?;
    let seeds: Vec<Option<u64>> = match args.random {
        Some(_) => (args.first_seed..args.first_seed + args.seeds)
            .map(Some)
            .collect(),
        None => vec![None],
    };
    let file = match &args.input {
        Some(p) => Some(load_file(p, args.kind)?),
        None => None,
    };
    let n = file
        .as_ref()
        .map_or(args.random.unwrap_or(0), |f| f.a.dim());
    if let Some(&hi) = levels.last() {
        check_level(hi, n.max(1))?;
    }
    eprintln!(
        "sweep: {} instance(s), {} level(s), {} solver(s)",
        seeds.len(),
        levels.len(),
        args.algos.len()
    );
    let results = map(
        Execution::Parallel,
        &seeds,
        |seed| -> Result<Vec<SweepRow>, Failure> {
            match (seed, &file) {
                (Some(seed), _) => {
                    let inst = generated(args.random.unwrap_or(0), args.m, *seed)?;
                    sweep_instance(&inst.a, &args.algos, &levels, args.warm)
                }
                (None, Some(f)) => sweep_instance(&f.a, &args.algos, &levels, args.warm),
                (None, None) => Err(Failure::Usage(
                    "one of --input or --random is required".into(),
                )),
            }
        },
    );
    let mut out = String::from(
        "algo,s,seed,value,explained_variability,iterations,swap_evaluations,runtime_ms,cumulative_runtime_ms\n",
    );
    for (seed, rows) in seeds.iter().zip(results) {
        let rows = rows?;
        let seed = seed.map_or(String::new(), |s| s.to_string());
        let mut cumulative: Vec<(&str, f64)> = Vec::new();
        for r in rows {
            let total = match cumulative.iter_mut().find(|(a, _)| *a == r.algo) {
                Some(entry) => {
                    entry.1 += r.runtime_ms;
                    entry.1
                }
                None => {
                    cumulative.push((r.algo, r.runtime_ms));
                    r.runtime_ms
                }
            };
            out.push_str(&format!(
                "{},{},{},{:.12},{:.12},{},{},{:.3},{:.3}\n",
                r.algo,
                r.s,
                seed,
                r.value,
                r.explained,
                r.iterations,
                r.swap_evaluations,
                r.runtime_ms,
                total
            ));
        }
    }
    write_out(None, out.as_bytes())?;
    Ok(0)
}

pub fn gen(args: &GenArgs) -> Result<u8, Failure> {
    if args.n == 0 || args.m == 0 {
        return Err(Failure::Usage("--n and --m must be positive".into()));
    }
    let data = generate_gaussian(RandomSpec {
        m: args.m,
        n: args.n,
        seed: args.seed,
    })?;
    save_csv(&args.out, &data.matrix, None)
        .map_err(|e| Failure::Numeric(format!("cannot write {}: {e}", args.out.display())))?;
    eprintln!(
        "wrote {}×{} data matrix to {}",
        args.m,
        args.n,
        args.out.display()
    );
    Ok(0)
}
