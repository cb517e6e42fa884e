//! Macdonald polynomials from the shift operator, checked against
//! Gram-Schmidt and specialised to a root of unity.

use torusblocks::macdonald::{
    evaluate, inner_product, macdonald_at_root, macdonald_gram_schmidt, macdonald_via_shift, FormalQ,
};
use torusblocks::QContext;

fn main() -> torusblocks::Result<()> {
    let k = 2;
    for n in 0..=4 {
        let p = macdonald_via_shift(&FormalQ, n, k)?;
        let same = p == macdonald_gram_schmidt(n, k);
        println!("P_{n}^({k}) = {p}   (Gram-Schmidt agrees: {same})");
    }
    let p2 = macdonald_via_shift(&FormalQ, 2, k)?;
    let p3 = macdonald_via_shift(&FormalQ, 3, k)?;
    println!("<P_2, P_3> = {}", inner_product(&FormalQ, &p2, &p3, k));

    let ctx = QContext::level(7)?;
    let at_root = macdonald_at_root(&ctx, 3, k)?;
    for m in 0..4 {
        println!("P_3^({k})(q^{m}) at q = e^(pi i/7): {:.6}", evaluate(&ctx, &at_root, m).to_complex());
    }
    Ok(())
}
