//! Modular data of sl2 conformal blocks on the torus.
//!
//! The crate has an exact side and a numerical side:
//!
//! - [`qcore`]: cyclotomic scalars and q-numbers at `q = e^{πi/κ}`;
//! - [`macdonald`]: A1 Macdonald polynomials, the constant-term inner product
//!   and the shift operator, over a formal `q` or at the root of unity;
//! - [`modular`]: the coefficients `f^{(k)}_{m,n}`, the S and T matrices on the
//!   block basis, their relations and the comparison with Kirillov's matrices;
//! - [`trace`]: `U_q(sl2)` trace functions, their renormalisation and a
//!   truncated Verma-module trace used as an oracle;
//! - [`analytic`]: theta functions, regularised elliptic hypergeometric
//!   integrals and numerical checks of the KZB heat equation;
//! - [`cli`]: the `torusblocks` command line, reports and the result cache.

pub mod analytic;
pub mod cli;
pub mod error;
pub mod macdonald;
pub mod modular;
pub mod qcore;
pub mod report;
pub mod suite;
pub mod trace;

pub use error::{Error, Result};
pub use qcore::{CycloScalar, QContext};
