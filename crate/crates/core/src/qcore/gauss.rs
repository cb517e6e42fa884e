use super::cyclo::CycloScalar;
use crate::error::{Error, Result};

/// Quadratic Gauss sum `Σ_{j=0}^{c-1} ζ_c^{j²}` computed inside `Q(ζ_N)`.
pub fn gauss_sum(c: usize, order: usize) -> Result<CycloScalar> {
    if c == 0 || !order.is_multiple_of(c) {
        return Err(Error::OrderMismatch(format!("{c} does not divide {order}")));
    }
    let step = (order / c) as i64;
    let mut acc = CycloScalar::zero(order);
    for j in 0..c as i64 {
        acc += &CycloScalar::zeta_pow(order, step * ((j * j) % c as i64));
    }
    Ok(acc)
}

/// Exact positive square root of `m` inside `Q(ζ_N)`, for `4m | N`.
///
/// Uses `Σ_{j<4m} ζ_{4m}^{j²} = (1+i)·2√m`.
pub fn sqrt_cyclotomic(m: usize, order: usize) -> Result<CycloScalar> {
    if m == 0 || !order.is_multiple_of(4 * m) {
        return Err(Error::OrderMismatch(format!(
            "sqrt of {m} needs 4*{m} to divide the order {order}"
        )));
    }
    let g = gauss_sum(4 * m, order)?;
    let i = CycloScalar::zeta_pow(order, (order / 4) as i64);
    let two_one_plus_i = (CycloScalar::one(order) + i).scale(2);
    g.checked_div(&two_one_plus_i)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_sum_mod_eight() {
        // j² mod 8 runs through {0,1,4,1,0,1,4,1}: 2 + 4ζ + 2ζ^4 = 4ζ = (1+i)√8
        let g = gauss_sum(8, 8).unwrap();
        let expected = CycloScalar::zeta_pow(8, 1).scale(4);
        assert_eq!(g, expected);
    }

    #[test]
    fn square_roots() {
        for (m, n, val) in [(4usize, 16usize, 2.0f64), (8, 32, 8f64.sqrt()), (2, 8, 2f64.sqrt())] {
            let r = sqrt_cyclotomic(m, n).unwrap();
            assert_eq!(&r * &r, CycloScalar::from_int(n, m as i64));
            let z = r.to_complex();
            assert!((z.re - val).abs() < 1e-12 && z.im.abs() < 1e-12, "{m}: {z}");
        }
        assert!(matches!(sqrt_cyclotomic(3, 8), Err(Error::OrderMismatch(_))));
    }
}
