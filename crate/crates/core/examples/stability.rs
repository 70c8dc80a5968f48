//! Drift criterion for stability, with the geometric cross-check and the case
//! where a zero face drift decides the verdict.

use walk_decay::model::DriftVectors;
use walk_decay::model::{drift_vectors, JumpKernel, ModelSpec, Region};
use walk_decay::stability::{assess, drift_stability};

fn model(face1_left: f64) -> walk_decay::Result<ModelSpec> {
    ModelSpec::new(
        JumpKernel::new(Region::Interior, [(1, 0, 0.3), (-1, 0, 0.2), (0, 1, 0.1), (0, -1, 0.4)])?,
        JumpKernel::new(
            Region::Face1,
            [(1, 0, 0.3), (-1, 0, face1_left), (0, 1, 0.7 - face1_left)],
        )?,
        JumpKernel::new(Region::Face2, [(1, 0, 0.3), (0, 1, 0.2), (0, -1, 0.5)])?,
        JumpKernel::new(Region::Origin, [(1, 0, 0.5), (0, 1, 0.5)])?,
    )
}

fn main() -> walk_decay::Result<()> {
    for left in [0.3, 0.6] {
        let m = model(left)?;
        let (verdict, geo) = assess(&m)?;
        let d = drift_vectors(&m);
        println!(
            "face-1 left {left}: m = {:.3?}, m1 = {:.3?} -> stable {} ({:?}), geometric {} witnesses {:.3?}",
            d.m, d.m1, verdict.stable, verdict.case, geo.stable, geo.witnesses
        );
    }

    // With m^(2)_1 = 0 the sign of m^(2)_2 decides case II.
    for m2 in [[0.0, -0.3], [0.0, 0.3]] {
        let d = DriftVectors::from_means([0.1, -0.2], [-0.5, 0.1], m2);
        let v = drift_stability(&d)?;
        println!(
            "m2 = {m2:?}: stable {}, extra condition applied {}, decided by it {}",
            v.stable, v.extra_condition_applied, v.decided_by_extra_condition
        );
    }
    Ok(())
}
