//! Dense small-matrix and scalar kernels.

pub mod dd;
pub mod linalg;
pub mod matrix;
pub mod scalar;

pub use dd::Dd;
pub use linalg::{
    dense_eigenvalues, dense_eigenvalues_dd, eigenvalues, hermitian_eigen_range, inverse, lu, matrix_exponential, poly_eval,
    polynomial_roots, roots_dd, smallest_singular_vector, solve, symmetric_eigen_range, GeneralizedSpectrum, Lu, Precision,
};
pub use matrix::{CMatrix, Matrix, RMatrix};
pub use scalar::{cabs, csqrt, fmt17, Cdd, Real, C64, U};
