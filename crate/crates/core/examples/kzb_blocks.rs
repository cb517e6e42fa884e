//! Numerical checks on the integral conformal blocks: KZB residual,
//! properties of blocks, Stokes relation, vanishing labels, S and T.

use std::time::Instant;

use num_complex::Complex64;
use torusblocks::analytic::checks::{
    kzb_check, property_checks, s_transform_check, stokes_check, t_check, theta_proportionality,
    vanishing_check,
};
use torusblocks::analytic::{EllipticContext, IntegralSpec};
use torusblocks::report::CheckRecord;

fn show(r: &CheckRecord) {
    let params: Vec<String> = ["kappa", "k", "n", "tau"]
        .iter()
        .filter_map(|k| r.params.get(*k).map(|v| format!("{k}={v}")))
        .collect();
    println!(
        "{:<6} {:<28} {:<40} residual={}",
        if r.pass { "pass" } else { "FAIL" },
        r.name,
        params.join(" "),
        r.actual
    );
}

fn main() -> torusblocks::Result<()> {
    let t0 = Instant::now();
    let lam = Complex64::new(0.31, 0.07);
    for (kappa, tau) in [(4, Complex64::new(0.0, 1.0)), (5, Complex64::new(0.0, 1.0)), (5, Complex64::new(0.3, 1.0))] {
        let e = EllipticContext::new(tau, kappa)?;
        for k in 0..=1 {
            let spec = IntegralSpec::new(kappa, 1, k, 2, lam);
            show(&kzb_check(&spec, &e, 1e-3, 1e-5)?);
            for r in property_checks(&spec, &e)? {
                show(&r);
            }
        }
    }
    let e5 = EllipticContext::new(Complex64::new(0.0, 1.0), 5)?;
    let base = IntegralSpec::new(5, 1, 1, 0, lam);
    for r in vanishing_check(&base, &e5)? {
        show(&r);
    }
    for n in [-2, 0, 2, 3] {
        show(&stokes_check(&base.with_lambda(Complex64::new(0.31, 0.0)), &e5, 0, n)?);
    }
    let e4 = EllipticContext::new(Complex64::new(0.0, 1.0), 4)?;
    let base4 = IntegralSpec::new(4, 1, 1, 2, Complex64::new(0.2, 0.0));
    for r in s_transform_check(&base4, &e4, 2)? {
        show(&r);
    }
    show(&t_check(&base4, &e4, 2)?);
    show(&theta_proportionality(&base4, &e4)?);
    println!("p = 1 suite: {:.1?}", t0.elapsed());

    let t1 = Instant::now();
    let e8 = EllipticContext::new(Complex64::new(0.0, 1.0), 8)?;
    let base8 = IntegralSpec::new(8, 2, 1, 1, lam);
    show(&stokes_check(&base8, &e8, 1, 1)?);
    println!("p = 2 spot check: {:.1?}", t1.elapsed());
    Ok(())
}
