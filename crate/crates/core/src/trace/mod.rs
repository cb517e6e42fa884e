//! Trace functions `ψ^{(k)}` and `Ψ^{(k)}` of `U_q(sl₂)` intertwiners: closed
//! forms at roots of unity and at generic complex `q`, the truncated Verma
//! trace they continue, and their relation to `f^{(k)}_{m,n}`.

mod identities;
mod psi;
mod verma;

use num_complex::Complex64;

pub use identities::{
    macdonald_trace_sides, phi21_terminating, trace_f_identity, trace_f_sides, trace_shift_sides,
};
pub use psi::{
    psi_complex, psi_exact, psi_renormalized_complex, psi_renormalized_exact,
    psi_renormalized_limit, renormalization_factor, Orientation,
};
pub use verma::{convention_exponent, verma_trace_oracle, OracleValue, VermaModel};

use crate::error::{Error, Result};
use crate::qcore::{CycloScalar, QContext};

/// The deformation parameter of a trace evaluation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TraceQ {
    /// `e^{πi/κ}` or its inverse, exact.
    Root { kappa: i64, orientation: Orientation },
    /// Any nonzero complex number.
    Generic(Complex64),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TraceArg {
    Int(i64),
    Complex(Complex64),
}

impl TraceArg {
    fn as_complex(self) -> Complex64 {
        match self {
            TraceArg::Int(n) => Complex64::from(n as f64),
            TraceArg::Complex(z) => z,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceArgs {
    pub k: i64,
    pub nu: TraceArg,
    pub mu: TraceArg,
    pub q: TraceQ,
}

#[derive(Clone, Debug, PartialEq)]
pub enum TraceValue {
    Exact(CycloScalar),
    Float(Complex64),
}

impl TraceValue {
    pub fn to_complex(&self) -> Complex64 {
        match self {
            TraceValue::Exact(x) => x.to_complex(),
            TraceValue::Float(z) => *z,
        }
    }
}

impl TraceArgs {
    fn complex_q(&self) -> Result<Complex64> {
        match self.q {
            TraceQ::Root { kappa, orientation } => {
                if kappa < 2 * self.k + 2 {
                    return Err(Error::Invalid(format!(
                        "trace functions need kappa >= 2k+2 (kappa={kappa}, k={})",
                        self.k
                    )));
                }
                let s = if orientation == Orientation::Q { 1.0 } else { -1.0 };
                Ok(Complex64::from_polar(1.0, s * std::f64::consts::PI / kappa as f64))
            }
            TraceQ::Generic(q) => Ok(q),
        }
    }

    fn exact_parts(&self) -> Option<(QContext, Orientation, i64, i64)> {
        match (self.q, self.nu, self.mu) {
            (TraceQ::Root { kappa, orientation }, TraceArg::Int(nu), TraceArg::Int(mu)) => {
                QContext::level(kappa).ok().map(|c| (c, orientation, nu, mu))
            }
            _ => None,
        }
    }
}

/// `ψ^{(k)}(q, ν, μ)`: exact for integer arguments at a root of unity,
/// complex floating point otherwise.
pub fn psi(args: &TraceArgs) -> Result<TraceValue> {
    let q = args.complex_q()?;
    if let Some((ctx, o, nu, mu)) = args.exact_parts() {
        return psi_exact(&ctx, o, args.k, nu, mu).map(TraceValue::Exact);
    }
    psi_complex(q, args.k, args.nu.as_complex(), args.mu.as_complex()).map(TraceValue::Float)
}

/// `Ψ^{(k)}(q, ν, μ)`; integer arguments at a root of unity go through the
/// pole-free form.
pub fn psi_renormalized(args: &TraceArgs) -> Result<TraceValue> {
    let q = args.complex_q()?;
    if let Some((ctx, o, nu, mu)) = args.exact_parts() {
        return psi_renormalized_exact(&ctx, o, args.k, nu, mu).map(TraceValue::Exact);
    }
    psi_renormalized_complex(q, args.k, args.nu.as_complex(), args.mu.as_complex())
        .map(TraceValue::Float)
}
