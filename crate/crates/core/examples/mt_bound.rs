//! Geometric product-form bound for a network with batch arrivals and when it
//! is tight.

use walk_decay::network::{mt_bound, mt_residuals, NetworkSpec};

fn main() -> walk_decay::Result<()> {
    for file in ["e1_network.json", "node1_batch.json"] {
        let path = format!("{}/data/{file}", env!("CARGO_MANIFEST_DIR"));
        let ns = NetworkSpec::load(&path, true)?;
        let b = mt_bound(&ns)?;
        println!("{file}");
        println!(
            "  h = {:.9?}  residuals {:.1e}",
            b.h,
            mt_residuals(&ns, b.h).iter().fold(0.0f64, |m, r| m.max(r.abs()))
        );
        println!("  eta   = {:.9?}", b.eta);
        println!("  alpha = {:.9?}", b.alpha);
        for k in 0..2 {
            println!(
                "  node {}: tight {}  ({})",
                k + 1,
                b.tightness.tight[k],
                b.tightness.reasons[k]
            );
        }
    }
    Ok(())
}
