//! Tandem Jackson network: the analytic rates against the product form.
//!
//! Run with `cargo run --example jackson_network`.

use walk_decay::asymptotics::{tau_both, DomainDescription};
use walk_decay::geometry::GeometrySummary;
use walk_decay::network::{build_model, mt_bound, utilizations, NetworkSpec};

fn main() -> walk_decay::Result<()> {
    let ns = NetworkSpec::load(concat!(env!("CARGO_MANIFEST_DIR"), "/data/e1_network.json"), false)?;
    let (r1, r2) = utilizations(&ns);
    println!("utilizations: {r1:.4}, {r2:.4}");

    let model = build_model(&ns)?;
    let geometry = GeometrySummary::compute(&model.surfaces())?;
    let (direct, iterated) = tau_both(&geometry)?;
    println!("classification {:?}", geometry.classification);
    println!("tau (direct)    = {:.9?}", direct.tau);
    println!(
        "tau (iteration) = {:.9?} after {} steps",
        iterated.tau,
        iterated.iteration_trace.len()
    );

    // Product form: P(L1 = n1, L2 = n2) ∝ ρ1^n1 ρ2^n2, so both rates are -log ρk.
    println!("-log rho        = [{:.9}, {:.9}]", -r1.ln(), -r2.ln());

    let domain = DomainDescription::new(geometry)?;
    println!(
        "alpha = [{:.9}, {:.9}]",
        domain.alpha_coordinate(1)?,
        domain.alpha_coordinate(2)?
    );

    let bound = mt_bound(&ns)?;
    println!("h = {:.6?}, tight = {:?}", bound.h, bound.tight());
    Ok(())
}
