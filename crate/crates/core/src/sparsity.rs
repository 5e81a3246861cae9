//! Magnitude partitions, top-`s` support families, hard thresholding and
//! the closed-form maximizer of a linear function over the sparse unit ball.
//!
//! All comparisons are exact: two entries tie only if their absolute values
//! are bitwise equal.

use serde::{Deserialize, Serialize};

use crate::error::{input, Result, SpcaError};
use crate::linalg::norm2;

/// Maximum number of supports [`top_supports`] will materialize.
pub const SUPPORT_FAMILY_CAP: usize = 1_000_000;

/// Largest dimension accepted by [`sqclp_value_bruteforce`].
pub const BRUTEFORCE_MAX_DIM: usize = 20;

/// The triple `(I_>, I_=, I_<)` of a vector at sparsity level `s`, together
/// with `M_s(x)`, the `s`-th largest absolute value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndexPartition {
    pub gt: Vec<usize>,
    pub eq: Vec<usize>,
    pub lt: Vec<usize>,
    /// Zero when `‖x‖₀ < s`.
    pub ms: f64,
}

impl IndexPartition {
    /// `I_≥ = I_> ∪ I_=`, ascending.
    pub fn geq(&self) -> Vec<usize> {
        let mut v = [self.gt.as_slice(), self.eq.as_slice()].concat();
        v.sort_unstable();
        v
    }
}

/// Supports of the `s` largest nonzero entries, in lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupportFamily {
    pub supports: Vec<Vec<usize>>,
}

/// Indices of the nonzero entries of `x`.
pub fn support_of(x: &[f64]) -> Vec<usize> {
    (0..x.len()).filter(|&i| x[i] != 0.0).collect()
}

pub fn nnz(x: &[f64]) -> usize {
    x.iter().filter(|v| **v != 0.0).count()
}

fn check_level(n: usize, s: usize) -> Result<()> {
    if s < 1 {
        return input("sparsity level must be at least 1");
    }
    if s > n {
        return input(format!("sparsity level {s} exceeds dimension {n}"));
    }
    Ok(())
}

/// Partitions `{0..n}` by comparing `|x_i|` against `M_s(x)`.
///
/// `s = n` is accepted and treated like the `‖x‖₀ < s` branch.
pub fn partition(x: &[f64], s: usize) -> Result<IndexPartition> {
    check_level(x.len(), s)?;
    let n = x.len();
    let nz = nnz(x);
    if nz < s || s == n {
        let ms = if nz < s { 0.0 } else { kth_largest_abs(x, s) };
        return Ok(IndexPartition {
            gt: (0..n).filter(|&i| x[i] != 0.0).collect(),
            eq: Vec::new(),
            lt: (0..n).filter(|&i| x[i] == 0.0).collect(),
            ms,
        });
    }
    let ms = kth_largest_abs(x, s);
    let mut p = IndexPartition {
        gt: Vec::new(),
        eq: Vec::new(),
        lt: Vec::new(),
        ms,
    };
    for (i, v) in x.iter().enumerate() {
        let a = v.abs();
        if a > ms {
            p.gt.push(i);
        } else if a == ms {
            p.eq.push(i);
        } else {
            p.lt.push(i);
        }
    }
    Ok(p)
}

fn kth_largest_abs(x: &[f64], k: usize) -> f64 {
    let mut abs: Vec<f64> = x.iter().map(|v| v.abs()).collect();
    let (_, kth, _) = abs.select_nth_unstable_by(k - 1, |a, b| b.total_cmp(a));
    *kth
}

/// Target cardinality `min(s, |I_≥|)` and the partition it came from.
fn family_shape(x: &[f64], s: usize) -> Result<(IndexPartition, usize)> {
    let p = partition(x, s)?;
    let size = s.min(p.gt.len() + p.eq.len());
    Ok((p, size))
}

/// Lexicographically first member of the top-`s` support family; empty for
/// `x = 0`. This is the fast path the solvers use.
pub fn top_support_first(x: &[f64], s: usize) -> Result<Vec<usize>> {
    let (p, size) = family_shape(x, s)?;
    let need = size - p.gt.len();
    let mut t = p.gt;
    t.extend_from_slice(&p.eq[..need]);
    t.sort_unstable();
    Ok(t)
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Every `T` with `I_> ⊆ T ⊆ I_≥` and `|T| = min(s, |I_≥|)`.
pub fn top_supports(x: &[f64], s: usize) -> Result<SupportFamily> {
    let (p, size) = family_shape(x, s)?;
    if size == 0 {
        return Ok(SupportFamily {
            supports: Vec::new(),
        });
    }
    let need = size - p.gt.len();
    let count = binomial(p.eq.len(), need);
    if count > SUPPORT_FAMILY_CAP as u128 {
        return Err(SpcaError::Refused {
            count,
            cap: SUPPORT_FAMILY_CAP as u128,
        });
    }
    let mut supports: Vec<Vec<usize>> = Combinations::new(p.eq.len(), need)
        .map(|combo| {
            let mut t = p.gt.clone();
            t.extend(combo.iter().map(|&k| p.eq[k]));
            t.sort_unstable();
            t
        })
        .collect();
    supports.sort();
    Ok(SupportFamily { supports })
}

/// `x` restricted to `support`, zero elsewhere.
pub fn restrict(x: &[f64], support: &[usize]) -> Vec<f64> {
    let mut y = vec![0.0; x.len()];
    for &i in support {
        y[i] = x[i];
    }
    y
}

/// The hard-thresholding set `H_s(x)`, one vector per top support.
pub fn hard_threshold(x: &[f64], s: usize) -> Result<Vec<Vec<f64>>> {
    Ok(top_supports(x, s)?
        .supports
        .iter()
        .map(|t| restrict(x, t))
        .collect())
}

/// Optimal value and all maximizers of `max { pᵀx : ‖x‖₀ ≤ s, ‖x‖₂ ≤ 1 }`.
#[derive(Clone, Debug, PartialEq)]
pub struct SqclpSolution {
    pub value: f64,
    pub solutions: Vec<Vec<f64>>,
}

fn normalized(mut y: Vec<f64>) -> Vec<f64> {
    let ny = norm2(&y);
    y.iter_mut().for_each(|v| *v /= ny);
    y
}

/// Closed-form maximizer set: normalized members of `H_s(p)`, value `‖p_T‖₂`.
pub fn sqclp_solve(p: &[f64], s: usize) -> Result<SqclpSolution> {
    if p.iter().all(|v| *v == 0.0) {
        return Err(SpcaError::Degenerate(
            "linear objective is zero; every feasible point is optimal".into(),
        ));
    }
    let family = top_supports(p, s)?;
    let value = norm2(&restrict(p, &family.supports[0]));
    let solutions = family
        .supports
        .iter()
        .map(|t| normalized(restrict(p, t)))
        .collect();
    Ok(SqclpSolution { value, solutions })
}

/// Value and the lexicographically first maximizer, without enumerating ties.
pub fn sqclp_first(p: &[f64], s: usize) -> Result<(f64, Vec<f64>)> {
    if p.iter().all(|v| *v == 0.0) {
        return Err(SpcaError::Degenerate(
            "linear objective is zero; every feasible point is optimal".into(),
        ));
    }
    let t = top_support_first(p, s)?;
    let y = restrict(p, &t);
    let value = norm2(&y);
    Ok((value, normalized(y)))
}

/// `max_{|T| ≤ s} ‖p_T‖₂` by enumerating every support of size at most `s`.
pub fn sqclp_value_bruteforce(p: &[f64], s: usize) -> Result<f64> {
    let n = p.len();
    if n > BRUTEFORCE_MAX_DIM {
        return Err(SpcaError::Refused {
            count: 1u128 << n,
            cap: 1u128 << BRUTEFORCE_MAX_DIM,
        });
    }
    check_level(n, s)?;
    let mut best: f64 = 0.0;
    for mask in 0u32..(1u32 << n) {
        if mask.count_ones() as usize > s {
            continue;
        }
        let sq: f64 = (0..n)
            .filter(|&i| mask >> i & 1 == 1)
            .map(|i| p[i] * p[i])
            .sum();
        best = best.max(sq);
    }
    Ok(best.sqrt())
}

/// Lexicographic `k`-combinations of `0..n`.
#[derive(Clone, Debug)]
pub struct Combinations {
    n: usize,
    idx: Vec<usize>,
    done: bool,
}

impl Combinations {
    pub fn new(n: usize, k: usize) -> Self {
        Combinations {
            n,
            idx: (0..k).collect(),
            done: k > n,
        }
    }

    pub fn count(n: usize, k: usize) -> u128 {
        binomial(n, k)
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.idx.clone();
        let k = self.idx.len();
        let mut i = k;
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            if self.idx[i] < self.n - k + i {
                self.idx[i] += 1;
                for j in i + 1..k {
                    self.idx[j] = self.idx[j - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn one_based(v: &[usize]) -> Vec<usize> {
        v.iter().map(|i| i + 1).collect()
    }

    #[test]
    fn partition_worked_examples() {
        let p = partition(&[3.0, 2.0, 1.0, 1.0, 1.0, 0.0, 0.0], 3).unwrap();
        assert_eq!(one_based(&p.gt), vec![1, 2]);
        assert_eq!(one_based(&p.eq), vec![3, 4, 5]);
        assert_eq!(one_based(&p.lt), vec![6, 7]);
        assert_eq!(p.ms, 1.0);

        let p = partition(&[0.0, 0.0, 4.0, -3.0, 0.0, 0.0], 3).unwrap();
        assert_eq!(one_based(&p.gt), vec![3, 4]);
        assert!(p.eq.is_empty());
        assert_eq!(one_based(&p.lt), vec![1, 2, 5, 6]);
        assert_eq!(p.ms, 0.0);

        let p = partition(&[0.0; 4], 2).unwrap();
        assert!(p.gt.is_empty() && p.eq.is_empty());
        assert_eq!(p.lt, vec![0, 1, 2, 3]);

        assert!(partition(&[1.0], 0).is_err());
    }

    #[test]
    fn support_family_worked_examples() {
        let f = top_supports(&[3.0, 2.0, 1.0, 1.0, 1.0, 0.0, 0.0], 3).unwrap();
        let got: Vec<Vec<usize>> = f.supports.iter().map(|t| one_based(t)).collect();
        assert_eq!(got, vec![vec![1, 2, 3], vec![1, 2, 4], vec![1, 2, 5]]);

        let f = top_supports(&[0.0, -5.0, 4.0, -3.0, 2.0, 0.0], 3).unwrap();
        assert_eq!(f.supports, vec![vec![1, 2, 3]]);

        let f = top_supports(&[0.0, 0.0, 4.0, -3.0, 0.0, 0.0], 3).unwrap();
        assert_eq!(f.supports, vec![vec![2, 3]]);

        assert!(top_supports(&[0.0; 3], 2).unwrap().supports.is_empty());
    }

    #[test]
    fn hard_threshold_worked_examples() {
        let h = hard_threshold(&[3.0, 2.0, 1.0, 1.0, 1.0, 0.0, 0.0], 3).unwrap();
        assert_eq!(
            h,
            vec![
                vec![3.0, 2.0, 1.0, 0.0, 0.0, 0.0, 0.0],
                vec![3.0, 2.0, 0.0, 1.0, 0.0, 0.0, 0.0],
                vec![3.0, 2.0, 0.0, 0.0, 1.0, 0.0, 0.0],
            ]
        );
        let sparse = [0.0, 5.0, 0.0, -1.0];
        assert_eq!(hard_threshold(&sparse, 2).unwrap(), vec![sparse.to_vec()]);
        assert_eq!(
            hard_threshold(&[1.0, 1.0], 1).unwrap(),
            vec![vec![1.0, 0.0], vec![0.0, 1.0]]
        );
    }

    #[test]
    fn family_cap_refuses() {
        let x = vec![1.0; 30];
        assert!(matches!(
            top_supports(&x, 15),
            Err(SpcaError::Refused { .. })
        ));
        // the fast path is unaffected
        assert_eq!(
            top_support_first(&x, 15).unwrap(),
            (0..15).collect::<Vec<_>>()
        );
    }

    #[test]
    fn sqclp_examples() {
        let sol = sqclp_solve(&[1.0, 0.0], 1).unwrap();
        assert_eq!(sol.value, 1.0);
        assert_eq!(sol.solutions, vec![vec![1.0, 0.0]]);

        let sol = sqclp_solve(&[0.0, -5.0, 4.0, -3.0, 2.0, 0.0], 3).unwrap();
        assert_abs_diff_eq!(sol.value, 50f64.sqrt(), epsilon = 1e-15);
        let r = 50f64.sqrt();
        assert_eq!(sol.solutions.len(), 1);
        for (a, b) in sol.solutions[0]
            .iter()
            .zip([0.0, -5.0 / r, 4.0 / r, -3.0 / r, 0.0, 0.0])
        {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-15);
        }

        let sol = sqclp_solve(&[1.0; 4], 2).unwrap();
        assert_abs_diff_eq!(sol.value, 2f64.sqrt(), epsilon = 1e-15);
        assert_eq!(sol.solutions.len(), 6);

        assert!(matches!(
            sqclp_solve(&[0.0; 3], 1),
            Err(SpcaError::Degenerate(_))
        ));
    }

    #[test]
    fn bruteforce_examples() {
        assert_eq!(sqclp_value_bruteforce(&[1.0, 0.0], 1).unwrap(), 1.0);
        assert_eq!(sqclp_value_bruteforce(&[3.0, 4.0, 0.0], 2).unwrap(), 5.0);
        assert!(sqclp_value_bruteforce(&[1.0; 21], 2).is_err());
    }

    #[test]
    fn qclp_special_case() {
        let p = [3.0, -4.0, 0.0, 12.0];
        let sol = sqclp_solve(&p, 4).unwrap();
        assert_eq!(sol.value, 13.0);
        assert_eq!(sol.solutions.len(), 1);
        for (a, b) in sol.solutions[0].iter().zip(p) {
            assert_abs_diff_eq!(*a, b / 13.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn combinations_are_lexicographic() {
        let all: Vec<_> = Combinations::new(4, 2).collect();
        assert_eq!(
            all,
            vec![
                vec![0, 1],
                vec![0, 2],
                vec![0, 3],
                vec![1, 2],
                vec![1, 3],
                vec![2, 3]
            ]
        );
        assert_eq!(Combinations::new(13, 4).count(), 715);
        assert_eq!(
            Combinations::new(3, 0).collect::<Vec<_>>(),
            vec![Vec::<usize>::new()]
        );
    }

    // Small integer-valued entries so exact ties actually occur.
    fn tie_vec() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-3i32..=3, 1..12).prop_map(|v| v.into_iter().map(f64::from).collect())
    }

    proptest! {
        #[test]
        fn partition_invariants(x in tie_vec(), s_raw in 1usize..12) {
            let s = s_raw.min(x.len());
            let p = partition(&x, s).unwrap();
            let mut all = [p.gt.clone(), p.eq.clone(), p.lt.clone()].concat();
            all.sort_unstable();
            prop_assert_eq!(all, (0..x.len()).collect::<Vec<_>>());
            for &i in &p.gt { for &j in &p.eq { prop_assert!(x[i].abs() > x[j].abs()); } }
            for &j in &p.eq { for &k in &p.lt { prop_assert!(x[j].abs() > x[k].abs()); } }
            for &i in &p.gt { for &k in &p.lt { prop_assert!(x[i].abs() > x[k].abs()); } }
            if nnz(&x) < s {
                prop_assert_eq!(&p.gt, &support_of(&x));
                prop_assert!(p.eq.is_empty());
            }
            // |I_≥| < s forces zeros on I_<
            if p.gt.len() + p.eq.len() < s {
                for &k in &p.lt { prop_assert_eq!(x[k], 0.0); }
            }
        }

        #[test]
        fn family_norm_constant_and_threshold_props(x in tie_vec(), s_raw in 1usize..12) {
            let s = s_raw.min(x.len());
            prop_assume!(nnz(&x) > 0);
            let fam = top_supports(&x, s).unwrap();
            let p = partition(&x, s).unwrap();
            let mut first_abs: Option<Vec<u64>> = None;
            for t in &fam.supports {
                for i in &p.gt { prop_assert!(t.contains(i)); }
                for i in t { prop_assert!(p.gt.contains(i) || p.eq.contains(i)); }
                let mut abs: Vec<u64> = t.iter().map(|&i| x[i].abs().to_bits()).collect();
                abs.sort_unstable();
                match &first_abs {
                    None => first_abs = Some(abs),
                    Some(f) => prop_assert_eq!(f, &abs),
                }
            }
            prop_assert_eq!(&fam.supports[0], &top_support_first(&x, s).unwrap());
            let nx = norm2(&x);
            for y in hard_threshold(&x, s).unwrap() {
                prop_assert!(nnz(&y) <= s);
                prop_assert!(norm2(&y) <= nx);
                for i in support_of(&y) { prop_assert_eq!(y[i], x[i]); }
            }
        }

        #[test]
        fn sqclp_matches_bruteforce(p in prop::collection::vec(-1.0f64..1.0, 1..=10), s_raw in 1usize..=10) {
            let s = s_raw.min(p.len());
            prop_assume!(p.iter().any(|v| *v != 0.0));
            let fast = sqclp_solve(&p, s).unwrap();
            let brute = sqclp_value_bruteforce(&p, s).unwrap();
            prop_assert!((fast.value - brute).abs() <= 1e-12);
            for sol in &fast.solutions {
                prop_assert!((norm2(sol) - 1.0).abs() <= 1e-12);
                prop_assert!(nnz(sol) <= s);
            }
        }
    }
}
