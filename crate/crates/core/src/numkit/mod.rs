//! Small dense complex linear algebra and scalar numerics used by the model.

mod cmatrix;
mod eigen;
pub mod entropy;
pub mod gibbs_ratios;
pub mod optimize;
pub mod pauli;
pub mod roots;
mod tensor;

pub use cmatrix::{CMatrix, MAX_DIM};
pub use eigen::{hermitian_eig, EigenDecomposition, JACOBI_MAX_SWEEPS, JACOBI_OFFDIAG_TOL};
pub use gibbs_ratios::{naive_gibbs_ratios, stable_gibbs_ratios, GibbsCoefficients};
pub use optimize::{golden_section_min, refine_min_2d, Box2, Min2d, RefineOptions};
pub use roots::{bisect, scan_for_bracket, Bracket, ROOT_TOL};
pub use tensor::{kron, partial_trace, partial_transpose_b, Subsystem};

pub use num_complex::Complex64 as C64;
