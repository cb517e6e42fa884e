//! Theta functions, regularised elliptic hypergeometric integrals and
//! numerical checks of the KZB heat equation.

pub mod branch;
pub mod checks;
pub mod integral;
pub mod quadrature;
pub mod selberg;
pub mod theta;

pub use branch::{phi_master, SegmentLog};
pub use checks::{kzb_residual, stokes_check, KzbResidual};
pub use integral::{j_integral, u_block, BlockValue, IntegralSpec};
pub use quadrature::Quadrature;
pub use selberg::selberg;
pub use theta::EllipticContext;
