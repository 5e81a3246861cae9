//! The support-optimal (SO) oracle: maximize `xᵀAx` over unit vectors
//! supported in a given index set.

use serde::{Deserialize, Serialize};

use crate::error::{input, Result};
use crate::linalg::{dominant_eigenpair, quad_form_unchecked, submatrix, SymMatrix};
use crate::sparsity::support_of;

/// Unit-norm maximizer of `f` over vectors supported in `support`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SoPoint {
    pub x: Vec<f64>,
    /// The index set the point was computed for, ascending, 0-based.
    pub support: Vec<usize>,
    /// `f(x)`.
    pub value: f64,
}

/// Embeds the principal eigenvector of `A_TT` into coordinates `T`.
///
/// Deterministic in `T`: the eigensolver fixes both the tie rule and the sign.
pub fn so_point(a: &SymMatrix, support: &[usize]) -> Result<SoPoint> {
    let sub = submatrix(a, support)?;
    let mut t = support.to_vec();
    t.sort_unstable();
    t.dedup();
    let pair = dominant_eigenpair(&sub)?;
    let mut x = vec![0.0; a.dim()];
    for (&i, &v) in t.iter().zip(&pair.vector) {
        x[i] = v;
    }
    let value = quad_form_unchecked(a, &x);
    Ok(SoPoint {
        x,
        support: t,
        value,
    })
}

/// Variational renormalization: the SO point on `x`'s own sparsity pattern.
pub fn renormalize(a: &SymMatrix, x: &[f64]) -> Result<SoPoint> {
    if x.len() != a.dim() {
        return input("dimension mismatch");
    }
    let t = support_of(x);
    if t.is_empty() {
        return input("cannot renormalize the zero vector");
    }
    so_point(a, &t)
}
