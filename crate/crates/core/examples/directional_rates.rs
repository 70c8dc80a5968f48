//! Decay rates along a fan of directions with the binding constraint, the
//! lattice spacing of `<c, L>` and the exactness verdict.

use num_rational::Ratio;
use walk_decay::asymptotics::DomainDescription;
use walk_decay::geometry::GeometrySummary;
use walk_decay::network::{build_model, NetworkSpec};

fn main() -> walk_decay::Result<()> {
    let ns = NetworkSpec::load(concat!(env!("CARGO_MANIFEST_DIR"), "/data/node1_batch.json"), true)?;
    let dom = DomainDescription::new(GeometrySummary::compute(&build_model(&ns)?.surfaces())?)?;
    println!("tau = {:.6?}", dom.tau());
    for (a, b) in [(1, 0), (4, 1), (2, 1), (1, 1), (1, 2), (1, 4), (0, 1), (3, 7)] {
        let r = dom.alpha_rational([Ratio::from_integer(a), Ratio::from_integer(b)])?;
        println!(
            "c ∝ ({a},{b}): alpha = {:.6}  {:?}  spacing {:.6}  {:?}",
            r.alpha,
            r.active_constraint,
            r.unit_delta.unwrap_or(f64::NAN),
            r.exactness
        );
    }
    // An irrational direction has no lattice spacing.
    let r = dom.alpha_direction([1.0, std::f64::consts::SQRT_2])?;
    println!("c ∝ (1,√2): alpha = {:.6}  {:?}", r.alpha, r.periodicity);
    Ok(())
}
