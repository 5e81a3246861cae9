mod common;

use approx::assert_abs_diff_eq;
use common::{PITPROPS_LAMBDA1, PITPROPS_TABLE, PUBLISHED_VALUES};
use spca_core::conditions::{is_co_stationary, is_cw_maximal, Move, DEFAULT_TOL};
use spca_core::enumeration::{
    enumerate_so, enumerate_so_with, global_bruteforce, EnumerationOptions,
};
use spca_core::linalg::dominant_eigenpair;
use spca_core::oracle::so_point;
use spca_core::solvers::{
    explained_variability, gcw_solve, pcw_path, pcw_solve, thresholding_solve, SolverConfig,
};
use spca_core::{io, Execution, SymMatrix};

fn pitprops() -> SymMatrix {
    io::pitprops().covariance().unwrap()
}

fn zero_based(t: &[usize]) -> Vec<usize> {
    t.iter().map(|i| i - 1).collect()
}

#[test]
fn asset_properties() {
    let a = pitprops();
    assert_eq!(a.dim(), 13);
    assert!(a.diagonal().iter().all(|&d| d == 1.0));
    let lambda = dominant_eigenpair(&a).unwrap().value;
    assert_abs_diff_eq!(lambda, PITPROPS_LAMBDA1, epsilon = 1e-10);
    assert!(lambda > 2.937);
}

#[test]
fn enumeration_reproduces_the_table() {
    let a = pitprops();
    let r = enumerate_so(&a, 4).unwrap();
    assert_eq!(
        (r.counts.total, r.counts.co_stationary, r.counts.cw_maximal),
        (715, 28, 2)
    );
    let co: Vec<_> = r.rows.iter().filter(|row| row.co_stationary).collect();
    for (k, row) in co.iter().enumerate() {
        let (support, value, cw) = PITPROPS_TABLE[k];
        assert_eq!(row.support, zero_based(&support));
        assert_abs_diff_eq!(row.value, value, epsilon = 1e-10);
        assert_abs_diff_eq!(row.value, PUBLISHED_VALUES[k], epsilon = 1e-3);
        assert_eq!(row.cw_maximal, cw, "{support:?}");
    }
    assert!(r
        .rows
        .iter()
        .all(|row| !row.cw_maximal || row.co_stationary));
}

#[test]
fn enumeration_is_independent_of_execution() {
    let a = pitprops();
    let seq = EnumerationOptions {
        exec: Execution::Sequential,
        ..Default::default()
    };
    assert_eq!(
        enumerate_so_with(&a, 4, &seq).unwrap(),
        enumerate_so(&a, 4).unwrap()
    );
}

#[test]
fn global_optimum() {
    let g = global_bruteforce(&pitprops(), 4).unwrap();
    assert_eq!(g.support_one_based(), vec![1, 2, 9, 10]);
    assert_abs_diff_eq!(g.value, 2.937478946712, epsilon = 1e-10);
}

#[test]
fn solvers_regression() {
    let a = pitprops();
    let t = thresholding_solve(&a, 4).unwrap();
    assert_eq!(t.support_one_based(), vec![1, 2, 7, 10]);
    assert_abs_diff_eq!(t.value, 2.882676720324, epsilon = 1e-10);

    for r in [
        gcw_solve(&a, &SolverConfig::new(4)).unwrap(),
        pcw_solve(&a, &SolverConfig::new(4)).unwrap(),
    ] {
        assert!(
            [2.937, 2.563].iter().any(|v| (r.value - v).abs() < 1e-3),
            "{}",
            r.value
        );
        assert!(is_cw_maximal(&a, &r.x, 4, DEFAULT_TOL).unwrap().holds);
    }

    let full = thresholding_solve(&a, 13).unwrap();
    assert_abs_diff_eq!(
        explained_variability(&a, &full.x).unwrap(),
        1.0,
        epsilon = 1e-12
    );
    let best = so_point(&a, &[0, 1, 8, 9]).unwrap();
    assert_abs_diff_eq!(
        explained_variability(&a, &best.x).unwrap(),
        2.937478946712 / PITPROPS_LAMBDA1,
        epsilon = 1e-10
    );
}

#[test]
fn verifier_examples() {
    let a = pitprops();
    let best = so_point(&a, &[0, 1, 8, 9]).unwrap();
    assert!(is_cw_maximal(&a, &best.x, 4, DEFAULT_TOL).unwrap().holds);

    let second = so_point(&a, &[0, 1, 6, 9]).unwrap();
    assert!(
        is_co_stationary(&a, &second.x, 4, DEFAULT_TOL)
            .unwrap()
            .holds
    );
    let r = is_cw_maximal(&a, &second.x, 4, DEFAULT_TOL).unwrap();
    assert!(!r.holds);
    let w = r.witness.unwrap();
    assert!(matches!(w.mv, Move::Swap { .. }));
    assert!(w.value > second.value);
    assert_abs_diff_eq!(
        w.value,
        spca_core::linalg::quad_form(&a, &w.point).unwrap(),
        epsilon = 1e-12
    );
}

#[test]
fn continuation_path_is_monotone() {
    let a = pitprops();
    let levels: Vec<usize> = (1..=13).collect();
    let warm = pcw_path(&a, &levels, true).unwrap();
    assert!(warm.windows(2).all(|w| w[1].value >= w[0].value - 1e-12));
    let single = pcw_path(&a, &[4], false).unwrap();
    assert_eq!(single[0].x, pcw_solve(&a, &SolverConfig::new(4)).unwrap().x);
}
