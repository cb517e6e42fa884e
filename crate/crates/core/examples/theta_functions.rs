//! Theta functions and the laws they satisfy at one point of the upper half plane.

use num_complex::Complex64;
use torusblocks::analytic::checks::theta_checks;
use torusblocks::analytic::theta::{theta1, theta_level};
use torusblocks::analytic::EllipticContext;

fn main() -> torusblocks::Result<()> {
    let ectx = EllipticContext::new(Complex64::new(0.2, 0.9), 5)?;
    let t = Complex64::new(0.3, 0.1);
    println!("theta1({t}) = {:.12}", theta1(t, &ectx));
    for n in 0..4 {
        println!("theta_(5,{n})({t}) = {:.12}", theta_level(n, t, &ectx));
    }
    for r in theta_checks(&ectx)? {
        println!("{} {:<28} {}", if r.pass { "pass" } else { "FAIL" }, r.name, r.actual);
    }
    Ok(())
}
