//! Random instances for property tests, acceptance runs and examples.

use rand::Rng;

use crate::asymptotics::tau_direct;
use crate::geometry::GeometrySummary;
use crate::model::{check_conditions, JumpKernel, ModelSpec, Region};
use crate::network::{utilizations, NetworkSpec};
use crate::stability::drift_stability;

/// Attempts before a conditioned sampler gives up.
pub const MAX_ATTEMPTS: usize = 100_000;

fn random_kernel<R: Rng>(rng: &mut R, region: Region, max_jump: i64, tilt: f64) -> Option<JumpKernel> {
    let (lx, ly) = region.lower_bound();
    let mut atoms = Vec::new();
    for dx in lx..=max_jump {
        for dy in ly..=max_jump {
            if rng.gen_bool(0.6) {
                let w = rng.gen_range(0.2..1.0) * (-tilt * (dx + dy) as f64).exp();
                atoms.push((dx, dy, w));
            }
        }
    }
    let total: f64 = atoms.iter().map(|a| a.2).sum();
    if atoms.is_empty() || total <= 0.0 {
        return None;
    }
    JumpKernel::new(region, atoms.into_iter().map(|(dx, dy, w)| (dx, dy, w / total))).ok()
}

/// A model with jumps in `{-1..max_jump}` per coordinate, or `None` when the
/// draw violates the standing conditions.
pub fn random_model<R: Rng>(rng: &mut R, max_jump: i64) -> Option<ModelSpec> {
    let tilts = [
        rng.gen_range(0.0..1.2),
        rng.gen_range(-0.3..1.2),
        rng.gen_range(-0.3..1.2),
        rng.gen_range(0.0..1.0),
    ];
    let interior = random_kernel(rng, Region::Interior, max_jump, tilts[0])?;
    let face1 = random_kernel(rng, Region::Face1, max_jump, tilts[1])?;
    let face2 = random_kernel(rng, Region::Face2, max_jump, tilts[2])?;
    let origin = random_kernel(rng, Region::Origin, max_jump, tilts[3])?;
    let model = ModelSpec::new(interior, face1, face2, origin).ok()?;
    check_conditions(&model).all_hold().then_some(model)
}

/// A model satisfying the standing conditions, stable or not.
pub fn random_valid_model<R: Rng>(rng: &mut R, max_jump: i64) -> ModelSpec {
    (0..MAX_ATTEMPTS)
        .find_map(|_| random_model(rng, max_jump))
        .expect("random model sampler exhausted its attempts")
}

/// Each face kernel moves off its own axis with positive probability.
///
/// Without this, the rows `L_{3-k} = i >= 1` are fed only through the origin and
/// the interior, and their tails need not decay at `τ_k`.
pub fn faces_leave_axes(model: &ModelSpec) -> bool {
    model.face1().atoms().iter().any(|a| a.dy > 0) && model.face2().atoms().iter().any(|a| a.dx > 0)
}

/// A stable model with non-degenerate faces whose rates `τ_k` both lie in `rates`.
pub fn random_stable_model<R: Rng>(rng: &mut R, max_jump: i64, rates: (f64, f64)) -> ModelSpec {
    (0..MAX_ATTEMPTS)
        .find_map(|_| {
            let m = random_model(rng, max_jump).filter(faces_leave_axes)?;
            let v = drift_stability(&crate::model::drift_vectors(&m)).ok()?;
            if !v.stable {
                return None;
            }
            let g = GeometrySummary::compute(&m.surfaces()).ok()?;
            let tau = tau_direct(&g).ok()?.tau;
            tau.iter().all(|t| (rates.0..=rates.1).contains(t)).then_some(m)
        })
        .expect("stable model sampler exhausted its attempts")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BatchPattern {
    Single,
    Node1,
    Node2,
    Both,
}

/// A stable network with normalized rates and batches of the given pattern.
pub fn random_network<R: Rng>(rng: &mut R, pattern: BatchPattern) -> NetworkSpec {
    (0..MAX_ATTEMPTS)
        .find_map(|_| {
            let mut batch: Vec<(u32, u32, f64)> = Vec::new();
            let node1 = matches!(pattern, BatchPattern::Node1 | BatchPattern::Both);
            let node2 = matches!(pattern, BatchPattern::Node2 | BatchPattern::Both);
            if node1 {
                batch.push((rng.gen_range(2..=3), 0, rng.gen_range(0.2..1.0)));
            }
            if node2 {
                batch.push((0, rng.gen_range(2..=3), rng.gen_range(0.2..1.0)));
            }
            if !node1 {
                batch.push((1, 0, rng.gen_range(0.2..1.0)));
            }
            let total: f64 = batch.iter().map(|b| b.2).sum();
            let batch: Vec<_> = batch.into_iter().map(|(a, b, p)| (a, b, p / total)).collect();
            let ns = NetworkSpec::new(
                rng.gen_range(0.05..0.3),
                rng.gen_range(0.2..1.0),
                rng.gen_range(0.2..1.0),
                rng.gen_range(0.0..0.6),
                rng.gen_range(0.0..0.6),
                batch,
                true,
            )
            .ok()?;
            let (r1, r2) = utilizations(&ns);
            (r1 < 0.9 && r2 < 0.9).then_some(ns)
        })
        .expect("network sampler exhausted its attempts")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn samplers_respect_their_contracts() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..5 {
            let m = random_stable_model(&mut rng, 2, (0.2, 3.0));
            assert!(check_conditions(&m).all_hold());
        }
        for p in [
            BatchPattern::Single,
            BatchPattern::Node1,
            BatchPattern::Node2,
            BatchPattern::Both,
        ] {
            let ns = random_network(&mut rng, p);
            assert!(!ns.has_simultaneous_arrivals());
            assert_eq!(
                ns.node_has_batches(1),
                matches!(p, BatchPattern::Node1 | BatchPattern::Both)
            );
            assert_eq!(
                ns.node_has_batches(2),
                matches!(p, BatchPattern::Node2 | BatchPattern::Both)
            );
        }
    }
}
