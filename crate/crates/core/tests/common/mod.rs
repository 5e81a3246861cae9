#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spca_core::io::{random_covariance, RandomSpec};
use spca_core::SymMatrix;

/// The 28 co-stationary supports of the pit-prop matrix at s = 4 (1-based),
/// their SO values as computed by the oracle, and the CW marks.
pub const PITPROPS_TABLE: [([usize; 4], f64, bool); 28] = [
    ([1, 2, 9, 10], 2.937478946712, true),
    ([1, 2, 7, 10], 2.882676720324, false),
    ([1, 2, 7, 9], 2.859335103883, false),
    ([1, 2, 8, 9], 2.796610504265, false),
    ([1, 2, 8, 10], 2.758707339003, false),
    ([1, 2, 6, 7], 2.696590848192, false),
    ([2, 7, 9, 10], 2.696308850769, false),
    ([2, 6, 7, 10], 2.592364041613, false),
    ([1, 6, 7, 10], 2.587479456414, false),
    ([1, 2, 3, 4], 2.563306059511, true),
    ([7, 8, 9, 10], 2.548805601488, false),
    ([6, 7, 9, 10], 2.522198338618, false),
    ([6, 7, 10, 13], 2.458547928452, false),
    ([6, 7, 8, 10], 2.444453365475, false),
    ([5, 6, 7, 10], 2.337018044839, false),
    ([7, 8, 10, 12], 2.314356760319, false),
    ([7, 8, 10, 13], 2.301585752539, false),
    ([5, 6, 7, 13], 2.280093078882, false),
    ([3, 4, 6, 7], 2.209157929933, false),
    ([4, 5, 6, 7], 2.196391397612, false),
    ([7, 10, 12, 13], 2.135743654439, false),
    ([3, 4, 8, 12], 1.994921947486, false),
    ([3, 4, 10, 12], 1.992000839967, false),
    ([3, 10, 11, 12], 1.608644041894, false),
    ([3, 5, 12, 13], 1.516128745022, false),
    ([1, 5, 12, 13], 1.413688798293, false),
    ([2, 5, 12, 13], 1.408335559369, false),
    ([3, 5, 11, 13], 1.382136358251, false),
];

/// The published three-decimal values, in the same order.
pub const PUBLISHED_VALUES: [f64; 28] = [
    2.937, 2.883, 2.859, 2.797, 2.759, 2.697, 2.696, 2.592, 2.587, 2.563, 2.549, 2.522, 2.459,
    2.444, 2.337, 2.314, 2.302, 2.28, 2.209, 2.196, 2.136, 1.995, 1.992, 1.609, 1.516, 1.414,
    1.408, 1.382,
];

/// Leading eigenvalue of the pit-prop matrix.
pub const PITPROPS_LAMBDA1: f64 = 4.218632853310;

/// A random PSD instance `DᵀD` with `D` of random height; low-rank when the
/// height is below `n`.
pub fn random_psd(rng: &mut ChaCha8Rng, n: usize) -> SymMatrix {
    let m = rng.random_range(2..=2 * n + 2);
    random_covariance(RandomSpec {
        m,
        n,
        seed: rng.random(),
    })
    .unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Largest root of `det(λI − A)` for `n ≤ 4`, from the characteristic
/// polynomial (Faddeev–LeVerrier) and a bracketing bisection.
pub fn charpoly_lambda_max(a: &SymMatrix) -> f64 {
    let n = a.dim();
    assert!(n <= 4);
    let mul = |x: &[f64], y: &[f64]| -> Vec<f64> {
        let mut z = vec![0.0; n * n];
        for i in 0..n {
            for k in 0..n {
                for j in 0..n {
                    z[i * n + j] += x[i * n + k] * y[k * n + j];
                }
            }
        }
        z
    };
    // c[k] is the coefficient of λ^(n−k).
    let mut c = vec![1.0];
    let mut m = vec![0.0; n * n];
    for k in 1..=n {
        let mut mk = mul(a.as_slice(), &m);
        for i in 0..n {
            mk[i * n + i] += c[k - 1];
        }
        let am = mul(a.as_slice(), &mk);
        let trace: f64 = (0..n).map(|i| am[i * n + i]).sum();
        c.push(-trace / k as f64);
        m = mk;
    }
    let p = |l: f64| c.iter().fold(0.0, |acc, &ck| acc * l + ck);
    let bound = 1.0 + a.as_slice().iter().map(|v| v.abs()).sum::<f64>();
    let step = bound / 1e5;
    let mut hi = bound;
    let mut lo = hi - step;
    while p(lo) > 0.0 {
        hi = lo;
        lo -= step;
        assert!(lo > -bound, "no sign change");
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if p(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}
