//! Spreading a jump distribution without changing its mean can only lower the
//! decay rates.

use num_rational::Ratio;
use walk_decay::asymptotics::DomainDescription;
use walk_decay::geometry::GeometrySummary;
use walk_decay::model::{ModelSpec, Region};

fn rates(m: &ModelSpec) -> walk_decay::Result<([f64; 2], f64)> {
    let dom = DomainDescription::new(GeometrySummary::compute(&m.surfaces())?)?;
    let one = Ratio::from_integer(1);
    Ok((dom.tau(), dom.alpha_rational([one, one])?.alpha))
}

fn main() -> walk_decay::Result<()> {
    let base = ModelSpec::load(concat!(env!("CARGO_MANIFEST_DIR"), "/data/e1_model.json"))?;
    let (tau, alpha) = rates(&base)?;
    println!("base:   tau {tau:.6?}  alpha(1,1) {alpha:.6}");

    // Move mass of the arrival atom (1,0) to (0,0) and (2,0) in equal parts.
    for mass in [0.02, 0.05, 0.1] {
        let spread = base.interior().mean_preserving_spread((1, 0), (1, 0), mass)?;
        let face1 = base.face1().mean_preserving_spread((1, 0), (1, 0), mass)?;
        let m = base.with_kernel(spread).with_kernel(face1);
        let (t, a) = rates(&m)?;
        println!(
            "spread {mass}: tau {t:.6?}  alpha(1,1) {a:.6}  (interior atoms: {})",
            m.kernel(Region::Interior).atoms().len()
        );
    }
    Ok(())
}
