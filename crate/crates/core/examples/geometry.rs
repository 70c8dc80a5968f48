//! Extreme points of the level curve and the (D1)/(D2)/(D3) classification.

use walk_decay::geometry::{branch, GeometrySummary, Root};
use walk_decay::model::ModelSpec;

fn main() -> walk_decay::Result<()> {
    let model = ModelSpec::load(concat!(env!("CARGO_MANIFEST_DIR"), "/data/e1_model.json"))?;
    let surfaces = model.surfaces();
    let g = GeometrySummary::compute(&surfaces)?;
    let p = &g.points;
    for k in 0..2 {
        println!("k = {}", k + 1);
        println!("  theta(max) = {:.6?}", p.theta_max[k]);
        println!("  theta(min) = {:.6?}", p.theta_min[k]);
        println!(
            "  theta(e)   = {:.6?} (edge point exists: {})",
            p.theta_e[k], p.edge_exists[k]
        );
        println!("  gamma_k(theta(max)) = {:.6}", p.gamma_k_at_max[k]);
        println!("  theta(c)   = {:.6?}", p.theta_c[k]);
    }
    println!("classification: {:?}", g.classification);

    // Branches of the level curve: θ2 ↦ the larger and smaller θ1 with γ(θ) = 1.
    let (lo, hi) = g.branch_interval(1);
    for t in [lo, 0.5 * (lo + hi), hi] {
        let upper = branch(&surfaces.gamma, 1, t, Root::Max)?;
        let lower = branch(&surfaces.gamma, 1, t, Root::Min)?;
        println!("theta2 = {t:.4}: theta1 in [{lower:.6}, {upper:.6}]");
    }
    Ok(())
}
