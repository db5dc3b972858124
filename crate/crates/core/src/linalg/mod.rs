//! Dense linear algebra over the generic scalar types.

pub mod eig;
pub mod lu;
pub mod matrix;
pub mod qr;
pub mod random;
pub mod svd;

pub use eig::{eig_nonsymmetric, eig_nonsymmetric_with_cap, hessenberg, EigenResult, DEFAULT_EIG_CAP};
pub use lu::{solve_linear, solve_vector, Lu};
pub use matrix::{axpy, dot, norm2, scale_in_place, DenseMatrix, DenseVector, Matrix};
pub use qr::{lstsq, HouseholderQr, LstsqSolution};
pub use random::{random_matrix, random_orthogonal};
pub use svd::{condition_number_2, jacobi_svd, spectral_norm, SvdResult};
