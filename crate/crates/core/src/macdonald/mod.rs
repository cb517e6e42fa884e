//! A1 Macdonald polynomials `P_n^{(k)}` in `X = q^x`, the constant-term
//! inner product and the shift operator.
//!
//! Two coefficient backends share the same code: [`FormalQ`] (rational
//! functions of an indeterminate `q`) and [`QContext`](crate::QContext)
//! (`q = e^{πi/κ}` exactly).

mod formal;
mod ops;
mod poly;
mod serde_impl;

pub use formal::{FormalQScalar, ZPoly};
pub use ops::{
    evaluate, inner_product, macdonald_at_root, macdonald_family_gram_schmidt,
    macdonald_gram_schmidt, macdonald_via_shift, shift_apply, weight,
};
pub use poly::{Coeff, FormalQ, LaurentPolyX, QField, SymLaurentPoly};
