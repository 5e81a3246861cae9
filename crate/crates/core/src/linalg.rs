//! Dense symmetric matrices, principal eigenpairs and quadratic forms.
//!
//! Two eigensolvers back [`principal_eigenpair`]:
//!
//! * cyclic Jacobi for matrices of dimension up to [`DIRECT_MAX`]. Every
//!   support-restricted subproblem lands here. Rotations only mix coupled
//!   coordinates, so block-diagonal structure yields exact zeros in the
//!   eigenvector.
//! * shifted power iteration above that, with a Rayleigh-quotient residual
//!   stopping test.
//!
//! Both are deterministic, and the returned vector is sign-normalized so its
//! largest-magnitude coordinate (lowest index on ties) is positive.

use serde::{Deserialize, Serialize};

use crate::error::{input, Result, SpcaError};

/// Largest dimension handled by the Jacobi path.
pub const DIRECT_MAX: usize = 64;

/// Default residual tolerance for eigenpairs.
pub const EIGEN_TOL: f64 = 1e-10;

/// Default iteration cap for power iteration on an `n × n` matrix.
pub fn default_max_iter(n: usize) -> usize {
    10 * n + 1000
}

/// Dense row-major `m × n` matrix (data matrices).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return input("matrix must have at least one row and one column");
        }
        if data.len() != rows * cols {
            return input(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                data.len()
            ));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return input("ragged rows");
        }
        Matrix::new(rows.len(), cols, rows.concat())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }
}

/// Dense symmetric matrix `A`, the problem datum.
///
/// Symmetry is checked on construction; positive semidefiniteness is not.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    /// Builds from row-major entries, rejecting non-finite or asymmetric input.
    pub fn new(n: usize, data: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return input("matrix dimension must be positive");
        }
        if data.len() != n * n {
            return input(format!("expected {} entries, got {}", n * n, data.len()));
        }
        if let Some(k) = data.iter().position(|v| !v.is_finite()) {
            return input(format!(
                "non-finite entry at ({}, {})",
                k / n + 1,
                k % n + 1
            ));
        }
        for i in 0..n {
            for j in i + 1..n {
                let (a, b) = (data[i * n + j], data[j * n + i]);
                if (a - b).abs() > 1e-12 * a.abs().max(1.0) {
                    return input(format!(
                        "matrix is not symmetric at ({}, {}): {a} vs {b}",
                        i + 1,
                        j + 1
                    ));
                }
            }
        }
        Ok(SymMatrix { n, data })
    }

    /// Builds from the upper triangle of `f(i, j)`, mirroring it exactly.
    pub fn from_upper(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let v = f(i, j);
                data[i * n + j] = v;
                data[j * n + i] = v;
            }
        }
        SymMatrix::new(n, data)
    }

    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        SymMatrix::from_upper(diag.len(), |i, j| if i == j { diag[i] } else { 0.0 })
    }

    pub fn identity(n: usize) -> Self {
        SymMatrix::from_upper(n, |i, j| if i == j { 1.0 } else { 0.0 })
            .expect("identity is symmetric")
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    /// `A·x`, skipping zero coordinates of `x`.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.n);
        let mut out = vec![0.0; self.n];
        for (k, &xk) in x.iter().enumerate() {
            if xk == 0.0 {
                continue;
            }
            // A is symmetric, so row k doubles as column k.
            for (o, a) in out.iter_mut().zip(self.row(k)) {
                *o += a * xk;
            }
        }
        out
    }

    fn check_len(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.n {
            return input(format!(
                "dimension mismatch: vector has {} entries, matrix is {}x{}",
                x.len(),
                self.n,
                self.n
            ));
        }
        Ok(())
    }
}

/// Largest eigenvalue and a unit eigenvector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenPair {
    pub value: f64,
    pub vector: Vec<f64>,
}

/// `A = Dᵀ D`.
pub fn covariance_from_data(d: &Matrix) -> Result<SymMatrix> {
    if let Some(k) = d.as_slice().iter().position(|v| !v.is_finite()) {
        return input(format!(
            "non-finite entry in data matrix at ({}, {})",
            k / d.cols() + 1,
            k % d.cols() + 1
        ));
    }
    let n = d.cols();
    let mut data = vec![0.0; n * n];
    for r in 0..d.rows() {
        let row = d.row(r);
        for i in 0..n {
            let ri = row[i];
            if ri == 0.0 {
                continue;
            }
            let out = &mut data[i * n..(i + 1) * n];
            for j in i..n {
                out[j] += ri * row[j];
            }
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            data[j * n + i] = data[i * n + j];
        }
    }
    SymMatrix::new(n, data)
}

/// `f(x) = xᵀ A x`, computed over the nonzeros of `x` only.
pub fn quad_form(a: &SymMatrix, x: &[f64]) -> Result<f64> {
    a.check_len(x)?;
    Ok(quad_form_unchecked(a, x))
}

pub(crate) fn quad_form_unchecked(a: &SymMatrix, x: &[f64]) -> f64 {
    let nz: Vec<usize> = (0..x.len()).filter(|&i| x[i] != 0.0).collect();
    let mut total = 0.0;
    for &i in &nz {
        let row = a.row(i);
        let mut acc = 0.0;
        for &j in &nz {
            acc += row[j] * x[j];
        }
        total += x[i] * acc;
    }
    total
}

/// `∇f(x) = 2 A x`.
pub fn gradient(a: &SymMatrix, x: &[f64]) -> Result<Vec<f64>> {
    a.check_len(x)?;
    let mut g = a.mul_vec(x);
    g.iter_mut().for_each(|v| *v *= 2.0);
    Ok(g)
}

/// Principal submatrix `A_TT` with indices in ascending order.
pub fn submatrix(a: &SymMatrix, support: &[usize]) -> Result<SymMatrix> {
    if support.is_empty() {
        return input("index set must be nonempty");
    }
    if let Some(&bad) = support.iter().find(|&&i| i >= a.dim()) {
        return input(format!("index {} out of range 1..={}", bad + 1, a.dim()));
    }
    let mut idx = support.to_vec();
    idx.sort_unstable();
    idx.dedup();
    Ok(submatrix_unchecked(a, &idx))
}

pub(crate) fn submatrix_unchecked(a: &SymMatrix, idx: &[usize]) -> SymMatrix {
    let k = idx.len();
    let mut data = Vec::with_capacity(k * k);
    for &i in idx {
        let row = a.row(i);
        data.extend(idx.iter().map(|&j| row[j]));
    }
    SymMatrix { n: k, data }
}

/// Flips `v` so its largest-magnitude coordinate (lowest index on ties) is positive.
pub fn canonical_sign(v: &mut [f64]) {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    if v.get(best).is_some_and(|&x| x < 0.0) {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

pub(crate) fn norm2(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub(crate) fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

fn residual(a: &SymMatrix, value: f64, v: &[f64]) -> f64 {
    let av = a.mul_vec(v);
    av.iter()
        .zip(v)
        .map(|(w, x)| (w - value * x).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Largest eigenpair with explicit tolerance and iteration cap.
///
/// `max_iter` bounds Jacobi sweeps on the direct path and matrix-vector
/// products on the power-iteration path. Fails with
/// [`SpcaError::Convergence`] if the residual test
/// `‖Av − λv‖ ≤ tol·max(1, |λ|)` is not met.
pub fn principal_eigenpair(a: &SymMatrix, tol: f64, max_iter: usize) -> Result<EigenPair> {
    if a.dim() <= DIRECT_MAX {
        let eig = symmetric_eigen(a, max_iter.max(1))?;
        let pair = eig.top();
        let r = residual(a, pair.value, &pair.vector);
        if r > tol * pair.value.abs().max(1.0) {
            return Err(SpcaError::Convergence {
                iterations: max_iter,
                residual: r,
            });
        }
        Ok(pair)
    } else {
        power_iteration(a, tol, max_iter)
    }
}

/// Largest eigenpair with default settings.
///
/// Falls back from power iteration to Jacobi when the spectral gap is too
/// small for power iteration to meet the residual test in time.
pub fn dominant_eigenpair(a: &SymMatrix) -> Result<EigenPair> {
    match principal_eigenpair(a, EIGEN_TOL, default_max_iter(a.dim())) {
        Err(SpcaError::Convergence { .. }) if a.dim() > DIRECT_MAX => {
            Ok(symmetric_eigen(a, 200)?.top())
        }
        other => other,
    }
}

/// Power iteration from the normalized all-ones vector.
///
/// Iterates on `A + cI` with `c = max(0, −n·min_i A_ii)`, which is zero for
/// covariance matrices. If the iteration still lands on a negative
/// eigenvalue `μ`, a negative eigenvalue dominates in magnitude; it reruns
/// with `c = −μ`, which makes the shifted matrix PSD with `λ1 + c` dominant.
pub fn power_iteration(a: &SymMatrix, tol: f64, max_iter: usize) -> Result<EigenPair> {
    let n = a.dim();
    let min_diag = a.diagonal().into_iter().fold(f64::INFINITY, f64::min);
    let shift = (-min_diag * n as f64).max(0.0);
    let pair = power_run(a, shift, tol, max_iter)?;
    if pair.value >= 0.0 {
        return Ok(pair);
    }
    power_run(a, -pair.value, tol, max_iter)
}

fn power_run(a: &SymMatrix, shift: f64, tol: f64, max_iter: usize) -> Result<EigenPair> {
    let n = a.dim();
    // All-ones plus a fixed irrational ripple, so structured matrices whose
    // top eigenvector is orthogonal to the ones vector are still reached.
    let mut v: Vec<f64> = (0..n)
        .map(|i| 1.0 + 0.25 * ((i as f64 + 1.0) * 0.618_033_988_749_895).fract())
        .collect();
    let nv = norm2(&v);
    v.iter_mut().for_each(|x| *x /= nv);

    let mut last = f64::INFINITY;
    for _ in 0..max_iter {
        let w = a.mul_vec(&v);
        let value = dot(&v, &w);
        let r = w
            .iter()
            .zip(&v)
            .map(|(wi, vi)| (wi - value * vi).powi(2))
            .sum::<f64>()
            .sqrt();
        last = r;
        if r <= tol * value.abs().max(1.0) {
            canonical_sign(&mut v);
            return Ok(EigenPair { value, vector: v });
        }
        let mut next: Vec<f64> = w.iter().zip(&v).map(|(wi, vi)| wi + shift * vi).collect();
        let nn = norm2(&next);
        if nn == 0.0 {
            // A + cI annihilated v, so v is an eigenvector for −c.
            canonical_sign(&mut v);
            return Ok(EigenPair { value, vector: v });
        }
        next.iter_mut().for_each(|x| *x /= nn);
        v = next;
    }
    Err(SpcaError::Convergence {
        iterations: max_iter,
        residual: last,
    })
}

/// Full eigendecomposition from cyclic Jacobi rotations.
#[derive(Clone, Debug)]
pub struct SymEigen {
    n: usize,
    values: Vec<f64>,
    /// Row-major; column `k` is the eigenvector of `values[k]`.
    vectors: Vec<f64>,
}

/// Cyclic Jacobi eigendecomposition, at most `max_sweeps` sweeps.
pub fn symmetric_eigen(a: &SymMatrix, max_sweeps: usize) -> Result<SymEigen> {
    let n = a.dim();
    let mut m = a.as_slice().to_vec();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let fro: f64 = m.iter().map(|x| x * x).sum::<f64>().sqrt();
    let target = (1e-15 * fro).powi(2);

    let off = |m: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                s += m[i * n + j] * m[i * n + j];
            }
        }
        s
    };

    let mut sweeps = 0;
    loop {
        let o = off(&m);
        if o <= target || o == 0.0 {
            break;
        }
        if sweeps >= max_sweeps {
            return Err(SpcaError::Convergence {
                iterations: sweeps,
                residual: o.sqrt(),
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = m[p * n + p];
                let aqq = m[q * n + q];
                // Negligible against both diagonals: drop it.
                if sweeps > 3 && (apq.abs() * 1e17 <= app.abs().min(aqq.abs())) {
                    m[p * n + q] = 0.0;
                    m[q * n + p] = 0.0;
                    continue;
                }
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta == 0.0 {
                    1.0
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (kp, kq) = (m[k * n + p], m[k * n + q]);
                    m[k * n + p] = c * kp - s * kq;
                    m[k * n + q] = s * kp + c * kq;
                }
                for k in 0..n {
                    let (pk, qk) = (m[p * n + k], m[q * n + k]);
                    m[p * n + k] = c * pk - s * qk;
                    m[q * n + k] = s * pk + c * qk;
                }
                m[p * n + q] = 0.0;
                m[q * n + p] = 0.0;
                for k in 0..n {
                    let (kp, kq) = (v[k * n + p], v[k * n + q]);
                    v[k * n + p] = c * kp - s * kq;
                    v[k * n + q] = s * kp + c * kq;
                }
            }
        }
    }
    Ok(SymEigen {
        n,
        values: (0..n).map(|i| m[i * n + i]).collect(),
        vectors: v,
    })
}

impl SymEigen {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn vector(&self, k: usize) -> Vec<f64> {
        (0..self.n).map(|i| self.vectors[i * self.n + k]).collect()
    }

    fn top_index(&self) -> usize {
        let mut best = 0;
        for (k, &val) in self.values.iter().enumerate() {
            if val > self.values[best] {
                best = k;
            }
        }
        best
    }

    pub fn max_value(&self) -> f64 {
        self.values[self.top_index()]
    }

    /// Largest eigenpair, lowest column on exact ties, canonical sign.
    pub fn top(&self) -> EigenPair {
        let k = self.top_index();
        let mut vector = self.vector(k);
        let nv = norm2(&vector);
        vector.iter_mut().for_each(|x| *x /= nv);
        canonical_sign(&mut vector);
        EigenPair {
            value: self.values[k],
            vector,
        }
    }

    /// Largest eigenvalue of the bordered matrix `[[M, b], [bᵀ, d]]`, where
    /// `M` is the decomposed matrix.
    ///
    /// Solves the secular equation `λ − d − Σ (u_kᵀb)² / (λ − μ_k) = 0` on
    /// the interval above the largest coupled `μ_k`. Costs `O(n²)` for the
    /// projections plus a bisection.
    pub fn bordered_max(&self, border: &[f64], corner: f64) -> f64 {
        let n = self.n;
        debug_assert_eq!(border.len(), n);
        let bnorm = norm2(border);
        let mu_max = self.max_value();
        if bnorm == 0.0 {
            return mu_max.max(corner);
        }
        let mut weights = Vec::with_capacity(n);
        for k in 0..n {
            let w: f64 = border
                .iter()
                .enumerate()
                .map(|(i, b)| self.vectors[i * n + k] * b)
                .sum();
            weights.push(w * w);
        }
        let floor = 1e-30 * bnorm * bnorm;
        let coupled: Vec<(f64, f64)> = self
            .values
            .iter()
            .zip(&weights)
            .filter(|&(_, &w)| w > floor)
            .map(|(&mu, &w)| (mu, w))
            .collect();
        if coupled.is_empty() {
            return mu_max.max(corner);
        }
        let mu_star = coupled
            .iter()
            .map(|c| c.0)
            .fold(f64::NEG_INFINITY, f64::max);
        let secular =
            |lam: f64| lam - corner - coupled.iter().map(|&(mu, w)| w / (lam - mu)).sum::<f64>();

        let mut lo = mu_star;
        let mut hi = mu_max.max(corner) + bnorm;
        // The root sits strictly above mu_star; widen hi until it brackets.
        let mut guard = 0;
        while secular(hi) < 0.0 && guard < 64 {
            hi += bnorm.max(1.0) * (1u64 << guard) as f64;
            guard += 1;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if secular(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi.max(mu_max)
    }
}
