//! The convergence domain: τ by the closed form and by iteration, boundary
//! samples, and membership of a few points.

use walk_decay::asymptotics::{tau_iteration, DomainDescription};
use walk_decay::geometry::GeometrySummary;
use walk_decay::network::{build_model, NetworkSpec};

fn main() -> walk_decay::Result<()> {
    let ns = NetworkSpec::load(concat!(env!("CARGO_MANIFEST_DIR"), "/data/node1_batch.json"), true)?;
    let model = build_model(&ns)?;
    let s = model.surfaces();
    let dom = DomainDescription::new(GeometrySummary::compute(&s)?)?;
    let it = tau_iteration(&s.gamma, &s.gamma1, &s.gamma2)?;
    println!("tau direct    {:.10?} ({:?})", dom.tau(), dom.tau.classification);
    println!("tau iteration {:.10?}", it.tau);
    for (i, step) in it.iteration_trace.iter().take(5).enumerate() {
        println!("  step {i}: {step:.6?}");
    }

    println!("boundary samples:");
    for p in dom.sample_boundary(8) {
        println!("  {p:.5?}");
    }
    let t = dom.tau();
    for p in [[0.0, 0.0], [0.5 * t[0], 0.5 * t[1]], [t[0] + 0.01, 0.0], [-3.0, -3.0]] {
        println!("{p:.4?} in domain: {}", dom.contains(p));
    }
    Ok(())
}
