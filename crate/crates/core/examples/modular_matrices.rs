//! Exact S and T on the block basis for one level, with their relations.
//!
//! `cargo run --example modular_matrices -- 8 2`

use torusblocks::modular::{s_matrix, verify_relations};
use torusblocks::QContext;

fn main() -> torusblocks::Result<()> {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<i64>().expect("integer argument"));
    let kappa = args.next().unwrap_or(6);
    let p = args.next().unwrap_or(1);
    let ctx = QContext::new(kappa, p)?;
    let data = s_matrix(&ctx)?;
    let labels = data.basis.labels();
    println!("kappa = {kappa}, p = {p}, basis {labels:?}");
    for (n, t) in labels.iter().zip(&data.t) {
        println!("T[{n}] = {:.6}", t.to_complex());
    }
    let s = data.s.to_complex();
    for (i, m) in labels.iter().enumerate() {
        let row: Vec<String> = (0..labels.len()).map(|j| format!("{:.4}", s.get(i, j))).collect();
        println!("S[{m}] = {}", row.join("  "));
    }
    for r in verify_relations(&ctx, &data) {
        println!("{} {}: {}", if r.pass { "pass" } else { "FAIL" }, r.name, r.actual);
    }
    Ok(())
}
