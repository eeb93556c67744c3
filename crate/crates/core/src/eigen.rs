//! Eigen-decomposition of small real non-symmetric matrices.
//!
//! The matrix is promoted to complex, reduced to upper-triangular Schur form
//! `A = Q T Q^H`, and eigenvectors of `T` are obtained by back substitution.
//! Near-degenerate diagonal entries are separated by a relative perturbation
//! and reported through the `degenerate` flag.

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{Error, Result};

pub type Complex64 = Complex<f64>;

/// Relative size of the perturbation used for coincident eigenvalues.
pub const DEGENERACY_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub values: Vec<Complex64>,
    /// Unit-norm eigenvectors, column `i` for `values[i]`.
    pub vectors: DMatrix<Complex64>,
    /// Two eigenvalues coincided to within the tolerance.
    pub degenerate: bool,
}

pub fn decompose(a: &DMatrix<f64>) -> Result<EigenDecomposition> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(Error::Numerical("eigen-decomposition needs a square matrix".into()));
    }
    let ac = a.map(|v| Complex64::new(v, 0.0));
    let norm = a.amax().max(f64::MIN_POSITIVE);
    let schur = nalgebra::linalg::Schur::try_new(ac, 1e-15 * norm, 10_000)
        .ok_or_else(|| Error::Numerical("Schur iteration did not converge".into()))?;
    let (q, t) = schur.unpack();
    let values: Vec<Complex64> = (0..n).map(|i| t[(i, i)]).collect();
    let tol = DEGENERACY_TOL * norm;
    let mut degenerate = false;
    let mut vectors = DMatrix::<Complex64>::zeros(n, n);
    for k in 0..n {
        let lambda = values[k];
        let mut y = DVector::<Complex64>::zeros(n);
        y[k] = Complex64::new(1.0, 0.0);
        for i in (0..k).rev() {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in (i + 1)..=k {
                acc += t[(i, j)] * y[j];
            }
            let mut den = t[(i, i)] - lambda;
            if den.norm() < tol {
                degenerate = true;
                den = Complex64::new(tol, 0.0);
            }
            y[i] = -acc / den;
        }
        let v = &q * y;
        let len = v.norm();
        vectors.set_column(k, &(v / Complex64::new(len, 0.0)));
    }
    Ok(EigenDecomposition {
        values,
        vectors,
        degenerate,
    })
}
