//! Exact scalars: the cyclotomic field of order `8κ` and the q-number layer
//! (`[n]`, `[n]!`, Gaussian binomials, q-Pochhammer symbols).

mod context;
mod cyclo;
mod gauss;
pub(crate) mod serde_impl;

pub use context::{QContext, QRing};
pub use cyclo::{cyclotomic_polynomial, CycloField, CycloScalar};
pub use gauss::{gauss_sum, sqrt_cyclotomic};
