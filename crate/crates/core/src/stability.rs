//! Existence of the stationary distribution.
//!
//! The primary decision uses the drift vectors. The geometric criterion (a point
//! of `Γ ∩ Γ_k` with positive `k`-th coordinate for each `k`) is evaluated
//! independently from the MGFs and reported alongside.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{drift_vectors, DriftVectors, MgfSurface, ModelSpec, Surfaces, DRIFT_TOL};
use crate::section::golden_max;

/// Directions in the fan searched by [`geometric_stability`].
pub const FAN_SIZE: usize = 720;
/// A witness must push both MGFs at least this far below 1.
pub const WITNESS_MARGIN: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StabilityCase {
    I,
    II,
    III,
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityVerdict {
    pub stable: bool,
    pub case: StabilityCase,
    /// `<m, m1_perp>` and `<m, m2_perp>`.
    pub inner_products: [f64; 2],
    /// A face drift component was zero, so the extra face condition was checked.
    pub extra_condition_applied: bool,
    /// The base inequalities of case II or III held but the extra face condition failed.
    pub decided_by_extra_condition: bool,
    /// Neither component of `m` is negative, a sign pattern none of the cases
    /// covers; the walk is reported unstable.
    pub uncovered_drift: bool,
    /// Whether the geometric criterion agrees; `None` when it was not evaluated.
    pub geometric_agreement: Option<bool>,
}

fn neg(x: f64) -> bool {
    x < -DRIFT_TOL
}

fn nonneg(x: f64) -> bool {
    x >= -DRIFT_TOL
}

fn zero(x: f64) -> bool {
    x.abs() < DRIFT_TOL
}

/// Drift criterion for stability, including the extra face conditions needed
/// when a face drift has a zero component pointing away from its own axis.
pub fn drift_stability(d: &DriftVectors) -> Result<StabilityVerdict> {
    if d.m[0].hypot(d.m[1]) < DRIFT_TOL {
        return Err(Error::UnsupportedNullDrift);
    }
    let (i1, i2) = (d.inner1(), d.inner2());
    let mut extra_applied = false;
    let mut decided_by_extra = false;
    let case = if neg(d.m[0]) && neg(d.m[1]) {
        if neg(i1) && neg(i2) {
            StabilityCase::I
        } else {
            StabilityCase::None
        }
    } else if nonneg(d.m[0]) && neg(d.m[1]) {
        let base = neg(i1);
        let extra = if zero(d.m2[0]) {
            extra_applied = true;
            neg(d.m2[1])
        } else {
            true
        };
        decided_by_extra = base && !extra;
        if base && extra {
            StabilityCase::II
        } else {
            StabilityCase::None
        }
    } else if neg(d.m[0]) && nonneg(d.m[1]) {
        let base = neg(i2);
        let extra = if zero(d.m1[1]) {
            extra_applied = true;
            neg(d.m1[0])
        } else {
            true
        };
        decided_by_extra = base && !extra;
        if base && extra {
            StabilityCase::III
        } else {
            StabilityCase::None
        }
    } else {
        StabilityCase::None
    };
    Ok(StabilityVerdict {
        stable: case != StabilityCase::None,
        case,
        inner_products: [i1, i2],
        extra_condition_applied: extra_applied,
        decided_by_extra_condition: decided_by_extra,
        uncovered_drift: nonneg(d.m[0]) && nonneg(d.m[1]),
        geometric_agreement: None,
    })
}

/// Witnesses `θ ∈ Γ ∩ Γ_k` with `θ_k > 0`, one per `k`, when they exist.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometricStability {
    pub stable: bool,
    pub witnesses: [Option<[f64; 2]>; 2],
}

/// Best point on the ray `s * u`, `s > 0`, for membership in `Γ ∩ Γ_k`.
fn ray_witness(gamma: &MgfSurface, face: &MgfSurface, u: [f64; 2]) -> Option<[f64; 2]> {
    let reach = |g: &MgfSurface| -> Option<f64> {
        let (lo, hi) = g.section([0.0, 0.0], u).sublevel(1.0)?;
        // Both sets have the origin on their boundary, so the ray starts inside
        // exactly when the sublevel interval begins at 0.
        if lo.as_f64() > 1e-9 {
            return None;
        }
        Some(hi.as_f64().min(1e6))
    };
    let r = reach(gamma)?.min(reach(face)?);
    if !(r > 0.0) {
        return None;
    }
    let worst = |s: f64| {
        let p = [s * u[0], s * u[1]];
        gamma.value(p).max(face.value(p))
    };
    let s = golden_max(|s| -worst(s), 0.0, r, r * 1e-9);
    let p = [s * u[0], s * u[1]];
    (gamma.value(p) < 1.0 - WITNESS_MARGIN && face.value(p) < 1.0 - WITNESS_MARGIN).then_some(p)
}

/// Directions to try for coordinate `k`: a uniform fan plus the middle of every
/// cell cut out by the lines orthogonal to the two drifts and the axis.
fn candidate_directions(m: [f64; 2], mk: [f64; 2]) -> Vec<[f64; 2]> {
    use std::f64::consts::{PI, TAU};
    let mut angles: Vec<f64> = (0..FAN_SIZE).map(|i| TAU * i as f64 / FAN_SIZE as f64).collect();
    let mut cuts = vec![0.0, PI * 0.5, PI, PI * 1.5];
    for v in [m, mk] {
        if v[0] != 0.0 || v[1] != 0.0 {
            let a = v[1].atan2(v[0]);
            cuts.push((a + PI * 0.5).rem_euclid(TAU));
            cuts.push((a + PI * 1.5).rem_euclid(TAU));
        }
    }
    cuts.sort_by(f64::total_cmp);
    for (i, &a) in cuts.iter().enumerate() {
        let b = if i + 1 < cuts.len() { cuts[i + 1] } else { cuts[0] + TAU };
        if b > a {
            angles.push(0.5 * (a + b));
        }
    }
    angles.into_iter().map(|a| [a.cos(), a.sin()]).collect()
}

pub fn geometric_stability(gamma: &MgfSurface, gamma1: &MgfSurface, gamma2: &MgfSurface) -> GeometricStability {
    let m = gamma.gradient([0.0, 0.0]);
    let mut witnesses = [None, None];
    for (i, face) in [gamma1, gamma2].into_iter().enumerate() {
        let mk = face.gradient([0.0, 0.0]);
        let mut best: Option<[f64; 2]> = None;
        for u in candidate_directions(m, mk) {
            if u[i] <= 0.0 {
                continue;
            }
            if let Some(p) = ray_witness(gamma, face, u) {
                // Prefer witnesses with the other coordinate non-positive.
                let better = match best {
                    None => true,
                    Some(b) => b[1 - i] > 0.0 && p[1 - i] <= 0.0,
                };
                if better {
                    best = Some(p);
                }
            }
        }
        witnesses[i] = best;
    }
    GeometricStability {
        stable: witnesses.iter().all(Option::is_some),
        witnesses,
    }
}

/// Drift verdict with the geometric cross-check filled in.
pub fn assess(model: &ModelSpec) -> Result<(StabilityVerdict, GeometricStability)> {
    let mut verdict = drift_stability(&drift_vectors(model))?;
    let Surfaces { gamma, gamma1, gamma2 } = model.surfaces();
    let geo = geometric_stability(&gamma, &gamma1, &gamma2);
    verdict.geometric_agreement = Some(geo.stable == verdict.stable);
    Ok((verdict, geo))
}
