//! The coefficients `f^{(k)}_{m,n}`, the `S` and `T` matrices on the
//! conformal-block basis, and the identities relating them to Macdonald
//! polynomials and to Kirillov's matrices.

mod fcoeff;
mod identity;
mod matrix;
mod smatrix;

pub use fcoeff::{admissible_m, f_coeff, f_recursion_rhs, f_reflected, first_block_m, FCoeffTable};
pub use identity::{macdonald_f_identity, macdonald_f_sides, smf_relation_rows};
pub use matrix::{ComplexMatrix, ExactMatrix};
pub use smatrix::{
    gauss_product, inv_sqrt_two_kappa, kirillov_compare, kirillov_matrices, s_matrix,
    s_matrix_float, t_matrix, verify_relations, BlockBasis, Kirillov, ModularData,
};
