//! Dense complex linear-algebra helpers: LU solves with a conditioning
//! estimate, Hermitian eigenvalues, singular values and numerical rank.
//!
//! Spectral quantities go through the real embedding
//! `[[Re, -Im], [Im, Re]]`, whose eigen/singular spectrum duplicates that of
//! the complex matrix; we fold the doubled spectrum back down. This keeps
//! everything on nalgebra's well-tested real decompositions.

use nalgebra::{DMatrix, DVector};

use crate::error::Error;
use crate::{Result, C64};

/// Solve `a x = b` by LU decomposition. Returns `SingularSystem` with a
/// cheap conditioning estimate (ratio of extreme |U| pivots) on failure.
pub fn solve(a: &DMatrix<C64>, b: &DVector<C64>) -> Result<DVector<C64>> {
    let lu = a.clone().lu();
    lu.solve(b).ok_or_else(|| {
        let u = lu.u();
        let n = u.nrows().min(u.ncols());
        let pivots: Vec<f64> = (0..n).map(|i| u[(i, i)].norm()).collect();
        let max = pivots.iter().copied().fold(0.0_f64, f64::max);
        let min = pivots.iter().copied().fold(f64::INFINITY, f64::min);
        let rcond = if max > 0.0 { min / max } else { 0.0 };
        Error::SingularSystem { rcond }
    })
}

/// Real embedding of a complex matrix, doubling every spectral multiplicity.
fn real_embedding(m: &DMatrix<C64>) -> DMatrix<f64> {
    let (r, c) = m.shape();
    let mut out = DMatrix::zeros(2 * r, 2 * c);
    for i in 0..r {
        for j in 0..c {
            let z = m[(i, j)];
            out[(i, j)] = z.re;
            out[(i, j + c)] = -z.im;
            out[(i + r, j)] = z.im;
            out[(i + r, j + c)] = z.re;
        }
    }
    out
}

/// Fold a doubled, sorted spectrum back to single multiplicity by taking
/// every second entry.
fn fold_doubled(mut vals: Vec<f64>) -> Vec<f64> {
    vals.sort_by(f64::total_cmp);
    vals.into_iter().step_by(2).collect()
}

/// Eigenvalues of a Hermitian matrix, ascending. The input is symmetrized
/// first, so tiny anti-Hermitian noise is tolerated.
pub fn hermitian_eigenvalues(m: &DMatrix<C64>) -> Vec<f64> {
    assert_eq!(m.nrows(), m.ncols(), "hermitian_eigenvalues: square input");
    let sym = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let embed = real_embedding(&sym);
    let eig = nalgebra::SymmetricEigen::new(embed);
    fold_doubled(eig.eigenvalues.iter().copied().collect())
}

/// Singular values, descending.
pub fn singular_values(m: &DMatrix<C64>) -> Vec<f64> {
    let embed = real_embedding(m);
    let svd = embed.svd(false, false);
    let mut vals = fold_doubled(svd.singular_values.iter().copied().collect());
    vals.reverse();
    vals
}

pub fn max_singular_value(m: &DMatrix<C64>) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// Numerical rank: singular values above `tol` relative to the largest.
pub fn rank(m: &DMatrix<C64>, tol: f64) -> usize {
    let vals = singular_values(m);
    let top = vals.first().copied().unwrap_or(0.0);
    if top == 0.0 {
        return 0;
    }
    vals.iter().filter(|&&s| s > tol * top).count()
}
