//! Trace functions: closed form against a truncated Verma-module trace at
//! generic q, and the pole-free renormalisation at a root of unity.

use num_complex::Complex64;
use torusblocks::trace::{
    psi_complex, psi_exact, psi_renormalized_exact, psi_renormalized_limit, verma_trace_oracle,
};
use torusblocks::suite::degenerate_points;
use torusblocks::QContext;

fn main() -> torusblocks::Result<()> {
    let (q, nu, mu) = (Complex64::from(0.9), Complex64::from(-2.3), Complex64::from(1.7));
    for k in 0..=3 {
        let closed = psi_complex(q, k, nu, mu)?;
        let oracle = verma_trace_oracle(k, nu, mu, q, 300)?;
        println!(
            "k={k}: psi = {closed:.12}, Verma trace = {:.12}, relative gap {:.1e}",
            oracle.value,
            (oracle.value - closed).norm() / closed.norm()
        );
    }

    let kappa = 8;
    let ctx = QContext::level(kappa)?;
    for &(o, k, nu, mu) in degenerate_points(kappa, 2)?.iter().step_by(40) {
        if let Err(e) = psi_exact(&ctx, o, k, nu, mu) {
            println!("psi^({k})({nu}, {mu}) is singular: {e}");
        }
        let exact = psi_renormalized_exact(&ctx, o, k, nu, mu)?.to_complex();
        let limit = psi_renormalized_limit(kappa, o, k, nu, mu, 1e-5)?;
        println!("  Psi^({k})({nu}, {mu}) = {exact:.10}, limit of the product formula = {limit:.10}");
    }
    Ok(())
}
