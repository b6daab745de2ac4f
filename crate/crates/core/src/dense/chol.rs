//! Cholesky factorization and Cholesky-QR orthogonalization.

use log::warn;
use rayon::prelude::*;

use super::DenseMatrix;
use crate::error::{Error, Result};

/// Upper-triangular `R` with `RᵀR = G` and positive diagonal.
pub fn cholesky(g: &DenseMatrix) -> Result<DenseMatrix> {
    let p = g.n_rows();
    if g.n_cols() != p {
        return Err(Error::dims("cholesky", p, g.n_cols()));
    }
    let mut r = DenseMatrix::zeros(p, p);
    for j in 0..p {
        let mut pivot = g[(j, j)];
        for k in 0..j {
            pivot -= r[(k, j)] * r[(k, j)];
        }
        if !(pivot > 0.0) || !pivot.is_finite() {
            return Err(Error::NotPositiveDefinite { pivot: j, value: pivot });
        }
        let diag = pivot.sqrt();
        r[(j, j)] = diag;
        for i in j + 1..p {
            let mut v = g[(j, i)];
            for k in 0..j {
                v -= r[(k, j)] * r[(k, i)];
            }
            r[(j, i)] = v / diag;
        }
    }
    Ok(r)
}

/// `X · R⁻¹` for upper-triangular `R`, row by row.
fn right_solve_upper(x: &DenseMatrix, r: &DenseMatrix) -> DenseMatrix {
    let p = r.n_rows();
    let mut out = x.clone();
    if p == 0 {
        return out;
    }
    out.as_mut_slice().par_chunks_mut(p).for_each(|row| {
        for j in 0..p {
            let mut v = row[j];
            for i in 0..j {
                v -= row[i] * r[(i, j)];
            }
            row[j] = v / r[(j, j)];
        }
    });
    out
}

/// How an orthonormal basis was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrthoMethod {
    CholeskyQr,
    ShiftedCholeskyQr,
    GramSchmidt,
}

/// Result of orthogonalizing a block.
#[derive(Debug, Clone)]
pub struct OrthoOutcome {
    pub q: DenseMatrix,
    /// Indices of the input columns that survived; shorter than the input
    /// width only when the block was numerically rank deficient.
    pub kept: Vec<usize>,
    pub method: OrthoMethod,
}

impl OrthoOutcome {
    pub fn width(&self) -> usize {
        self.q.n_cols()
    }
}

const ORTHO_ACCEPT: f64 = 1e-10;

/// Smallest accepted `R_jj / sqrt(G_jj)`, the sine of the angle between a
/// column and the span of the columns before it. Below this the block is
/// treated as numerically rank deficient.
const RANK_TOL: f64 = 1e-6;

enum Pass {
    Done { q: DenseMatrix, shifted: bool },
    RankDeficient,
    Failed,
}

/// One Cholesky-QR pass, retried once with a diagonal shift.
fn cholqr_pass(q: &DenseMatrix) -> Pass {
    let Ok(mut g) = q.t_matmul(q) else {
        return Pass::Failed;
    };
    let diag: Vec<f64> = (0..g.n_rows()).map(|i| g[(i, i)]).collect();
    let (r, shifted) = match cholesky(&g) {
        Ok(r) => (r, false),
        Err(_) => {
            let p = g.n_rows();
            let shift = 1e-14 * g.trace() / p as f64;
            for i in 0..p {
                g[(i, i)] += shift;
            }
            match cholesky(&g) {
                Ok(r) => (r, true),
                Err(_) => return Pass::Failed,
            }
        }
    };
    let rank_deficient = diag
        .iter()
        .enumerate()
        .any(|(j, &gjj)| r[(j, j)] < RANK_TOL * gjj.sqrt());
    if rank_deficient {
        return Pass::RankDeficient;
    }
    Pass::Done {
        q: right_solve_upper(q, &r),
        shifted,
    }
}

/// Orthonormalizes the columns of a tall block.
///
/// Runs two Cholesky-QR passes (a third when a shifted factorization was
/// needed). If factorization keeps failing or the result is not orthonormal
/// the block is handed to modified Gram-Schmidt with reorthogonalization,
/// which drops numerically dependent columns.
pub fn cholesky_qr(x: &DenseMatrix) -> Result<OrthoOutcome> {
    if !x.is_finite() {
        return Err(Error::NonFinite("cholesky_qr input"));
    }
    let width = x.n_cols();
    if width == 0 {
        return Ok(OrthoOutcome {
            q: x.clone(),
            kept: Vec::new(),
            method: OrthoMethod::CholeskyQr,
        });
    }

    let mut q = x.clone();
    let mut shifted = false;
    let mut ok = true;
    let mut passes = 0;
    while passes < 2 || (shifted && passes < 3) {
        match cholqr_pass(&q) {
            Pass::Done { q: next, shifted: s } => {
                q = next;
                shifted |= s;
            }
            Pass::RankDeficient | Pass::Failed => {
                ok = false;
                break;
            }
        }
        passes += 1;
    }
    if ok && q.is_finite() && (!shifted || q.orthogonality_error() <= ORTHO_ACCEPT) {
        let method = if shifted {
            OrthoMethod::ShiftedCholeskyQr
        } else {
            OrthoMethod::CholeskyQr
        };
        return Ok(OrthoOutcome {
            q,
            kept: (0..width).collect(),
            method,
        });
    }
    warn!("Cholesky-QR failed on a {}x{} block, falling back to Gram-Schmidt", x.n_rows(), width);
    Ok(modified_gram_schmidt(x))
}

/// Modified Gram-Schmidt with one reorthogonalization pass per column.
/// Columns whose norm collapses below `1e-12` of their original norm are dropped.
pub fn modified_gram_schmidt(x: &DenseMatrix) -> OrthoOutcome {
    let n = x.n_rows();
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(x.n_cols());
    let mut kept = Vec::new();
    for c in 0..x.n_cols() {
        let mut v = x.column(c);
        let original = norm(&v);
        if original == 0.0 {
            continue;
        }
        for _ in 0..2 {
            for b in &basis {
                let proj = dot(b, &v);
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi -= proj * bi;
                }
            }
        }
        let nv = norm(&v);
        if nv <= 1e-12 * original {
            continue;
        }
        v.iter_mut().for_each(|e| *e /= nv);
        basis.push(v);
        kept.push(c);
    }
    let q = DenseMatrix::from_columns(n, &basis).expect("columns have length n");
    OrthoOutcome {
        q,
        kept,
        method: OrthoMethod::GramSchmidt,
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
