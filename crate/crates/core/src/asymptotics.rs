//! Tail decay rates: the vector `τ`, the convergence domain
//! `𝒟 = {θ ∈ Γ_max : θ < τ}` of the stationary MGF, and directional rates
//! `α_c = sup{x ≥ 0 : x c ∈ 𝒟}`.
//!
//! `τ` is computed two ways: from the extreme points through the (D1)/(D2)/(D3)
//! formula, and as the limit of the monotone sequence obtained by repeatedly
//! taking `sup θ_k` over `Γ ∩ Γ_k` cut by a half-plane in the other coordinate.

use num_integer::Integer;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Classification, GeometrySummary};
use crate::model::{MgfSurface, Surfaces};
use crate::section::Extended;

pub const ITERATION_TOL: f64 = 1e-10;
pub const ITERATION_CAP: usize = 10_000;
/// Tolerance of the equalities tested by [`Exactness`].
pub const EXACTNESS_TOL: f64 = 1e-9;

const MAX_STEPS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Provenance {
    Direct,
    Iteration,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TauResult {
    pub tau: [f64; 2],
    /// Known for the direct formula only.
    pub classification: Option<Classification>,
    pub provenance: Provenance,
    pub iteration_trace: Vec<[f64; 2]>,
}

pub fn tau_direct(g: &GeometrySummary) -> Result<TauResult> {
    let [c1, c2] = g.points.theta_c;
    let tau = match g.classification {
        Classification::D1 => [c1[0], c2[1]],
        Classification::D2 => [g.xi_bar(1, c2[1])?, c2[1]],
        Classification::D3 => [c1[0], g.xi_bar(2, c1[0])?],
    };
    Ok(TauResult {
        tau,
        classification: Some(g.classification),
        provenance: Provenance::Direct,
        iteration_trace: Vec::new(),
    })
}

/// `sup{θ_k : θ ∈ Γ ∩ Γ_k, θ_{3-k} <= u}` for `u >= 0`, clamped below at 0.
///
/// The feasible values of `θ_k` form an interval with 0 in its closure, so the
/// supremum is found by bisection on `θ_k`, testing each value by intersecting
/// the two one-dimensional sections in the other coordinate.
pub fn cut_supremum(gamma: &MgfSurface, face: &MgfSurface, k: usize, u: f64) -> f64 {
    let a = k - 1;
    let feasible = |v: f64| -> bool {
        let interval = |g: &MgfSurface| g.axis_section(1 - a, v).sublevel(1.0);
        let (Some((l1, h1)), Some((l2, h2))) = (interval(gamma), interval(face)) else {
            return false;
        };
        let lo = l1.as_f64().max(l2.as_f64());
        let hi = h1.as_f64().min(h2.as_f64());
        lo < hi && lo <= u
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..MAX_STEPS {
        if !feasible(hi) {
            break;
        }
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..MAX_STEPS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if feasible(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

pub fn tau_iteration(gamma: &MgfSurface, gamma1: &MgfSurface, gamma2: &MgfSurface) -> Result<TauResult> {
    let step = |prev: [f64; 2]| {
        [
            cut_supremum(gamma, gamma1, 1, prev[1]),
            cut_supremum(gamma, gamma2, 2, prev[0]),
        ]
    };
    let mut theta = [cut_supremum(gamma, gamma1, 1, 0.0), cut_supremum(gamma, gamma2, 2, 0.0)];
    let mut trace = vec![theta];
    for _ in 0..ITERATION_CAP {
        let next = step(theta);
        trace.push(next);
        let change = (next[0] - theta[0]).abs().max((next[1] - theta[1]).abs());
        theta = next;
        if change < ITERATION_TOL {
            return Ok(TauResult {
                tau: theta,
                classification: None,
                provenance: Provenance::Iteration,
                iteration_trace: trace,
            });
        }
    }
    Err(Error::NonConvergence {
        iterations: ITERATION_CAP,
        detail: format!("τ iteration stalled at {theta:?}"),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ActiveConstraint {
    Tau1,
    Tau2,
    GammaBoundary,
}

/// Lattice spacing of `{<c, n> : n ∈ Z_+^2}` for a direction with rational components.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Periodicity {
    Arithmetic {
        numer: i64,
        denom: i64,
    },
    /// Irrational directions are accepted for rates, but their spacing is not computed.
    NotRepresentable,
}

impl Periodicity {
    pub fn delta(&self) -> Option<f64> {
        match *self {
            Periodicity::Arithmetic { numer, denom } => Some(numer as f64 / denom as f64),
            Periodicity::NotRepresentable => None,
        }
    }
}

/// `δ` with `{c1 a + c2 b : a, b ∈ Z_+}` eventually equal to `δ Z_+`.
///
/// Components are taken before normalization. Returns `None` for the zero vector
/// or a negative component.
pub fn periodicity(c: [Ratio<i64>; 2]) -> Option<Periodicity> {
    let zero = Ratio::from_integer(0);
    if c[0] < zero || c[1] < zero || (c[0] == zero && c[1] == zero) {
        return None;
    }
    let d = if c[0] == zero {
        c[1]
    } else if c[1] == zero {
        c[0]
    } else {
        let (p1, q1) = (*c[0].numer() as i128, *c[0].denom() as i128);
        let (p2, q2) = (*c[1].numer() as i128, *c[1].denom() as i128);
        let num = (p1 * q2).gcd(&(p2 * q1));
        let den = q1 * q2;
        let g = num.gcd(&den);
        Ratio::new((num / g) as i64, (den / g) as i64)
    };
    Some(Periodicity::Arithmetic {
        numer: *d.numer(),
        denom: *d.denom(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Exactness {
    /// `γ(α_c c) = 1`, `γ_k(α_c c) ≠ 1` and `α_c c_k ≠ τ_k` for both `k`.
    ExactlyExponential,
    /// `α_c c` is `θ^(k,max)` while `θ^(k,max) ≠ θ^(k,e)`; the tail is not exactly exponential.
    IndeterminateAtBranchPoint,
    NotGuaranteed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectionRate {
    /// Unit direction.
    pub c: [f64; 2],
    pub alpha: f64,
    pub active_constraint: ActiveConstraint,
    /// Spacing of the raw (unnormalized) direction, when given as rationals.
    pub periodicity: Periodicity,
    /// Spacing of `<c, n>` for the unit direction.
    pub unit_delta: Option<f64>,
    pub exactness: Exactness,
}

/// The convergence domain together with the data that defines it.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainDescription {
    pub geometry: GeometrySummary,
    pub tau: TauResult,
}

impl DomainDescription {
    pub fn new(geometry: GeometrySummary) -> Result<Self> {
        let tau = tau_direct(&geometry)?;
        Ok(DomainDescription { geometry, tau })
    }

    pub fn tau(&self) -> [f64; 2] {
        self.tau.tau
    }

    pub fn contains(&self, p: [f64; 2]) -> bool {
        let t = self.tau();
        p[0] < t[0] && p[1] < t[1] && self.geometry.gamma_max_contains(p)
    }

    /// `sup{x >= 0 : x dir ∈ Γ_max}`, or `None` if the ray never leaves.
    pub fn gamma_max_exit(&self, dir: [f64; 2]) -> Option<f64> {
        let inside = |x: f64| self.geometry.gamma_max_contains([x * dir[0], x * dir[1]]);
        if !inside(0.0) {
            return Some(0.0);
        }
        let (mut lo, mut hi) = (0.0, 1.0);
        let mut left = false;
        for _ in 0..MAX_STEPS {
            if !inside(hi) {
                left = true;
                break;
            }
            lo = hi;
            hi *= 2.0;
        }
        if !left {
            return None;
        }
        for _ in 0..MAX_STEPS {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if inside(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Some(lo)
    }

    /// `sup{x >= 0 : x dir ∈ 𝒟}` with the binding constraint, for any direction.
    pub fn exit(&self, dir: [f64; 2]) -> Option<(f64, ActiveConstraint)> {
        let t = self.tau();
        let mut best: Option<(f64, ActiveConstraint)> =
            self.gamma_max_exit(dir).map(|x| (x, ActiveConstraint::GammaBoundary));
        for (i, which) in [(0, ActiveConstraint::Tau1), (1, ActiveConstraint::Tau2)] {
            if dir[i] > 0.0 {
                let x = t[i] / dir[i];
                // Ties go to the τ constraint.
                if best.is_none_or(|(b, _)| x <= b) {
                    best = Some((x, which));
                }
            }
        }
        best
    }

    /// `n` points of `∂𝒟` on rays from the origin with angles in `(-π/2, π)`.
    pub fn sample_boundary(&self, n: usize) -> Vec<[f64; 2]> {
        use std::f64::consts::PI;
        (1..=n)
            .filter_map(|i| {
                let a = -PI / 2.0 + 1.5 * PI * i as f64 / (n + 1) as f64;
                let d = [a.cos(), a.sin()];
                self.exit(d).map(|(x, _)| [x * d[0], x * d[1]])
            })
            .collect()
    }

    /// `α_c` for a direction `c >= 0` (normalized internally).
    pub fn alpha_direction(&self, c: [f64; 2]) -> Result<DirectionRate> {
        self.rate(c, Periodicity::NotRepresentable)
    }

    /// `α_c` for a direction given by exact rational components.
    pub fn alpha_rational(&self, c: [Ratio<i64>; 2]) -> Result<DirectionRate> {
        let p =
            periodicity(c).ok_or_else(|| Error::InvalidModel("direction must be non-negative and non-zero".into()))?;
        let f = |r: Ratio<i64>| *r.numer() as f64 / *r.denom() as f64;
        self.rate([f(c[0]), f(c[1])], p)
    }

    fn rate(&self, raw: [f64; 2], periodicity: Periodicity) -> Result<DirectionRate> {
        let norm = raw[0].hypot(raw[1]);
        if !(raw[0] >= 0.0 && raw[1] >= 0.0 && norm > 0.0) {
            return Err(Error::InvalidModel(format!(
                "direction {raw:?} must be non-negative and non-zero"
            )));
        }
        let c = [raw[0] / norm, raw[1] / norm];
        let (alpha, active_constraint) = self
            .exit(c)
            .ok_or_else(|| Error::Numeric(format!("domain is unbounded along {c:?}")))?;
        Ok(DirectionRate {
            c,
            alpha,
            active_constraint,
            periodicity,
            unit_delta: periodicity.delta().map(|d| d / norm),
            exactness: self.exactness(c, alpha),
        })
    }

    /// `α_k` by the coordinate case split: `τ_k` if `ξ̄_{3-k}(τ_k) >= 0`,
    /// otherwise the positive root `β_k` of `γ(x e_k) = 1`.
    pub fn alpha_coordinate(&self, k: usize) -> Result<f64> {
        let t = self.tau()[k - 1];
        if self.geometry.xi_bar(3 - k, t)? >= 0.0 {
            Ok(t)
        } else {
            self.beta(k)
        }
    }

    /// Positive root of `γ(x e_k) = 1`.
    pub fn beta(&self, k: usize) -> Result<f64> {
        match self.geometry.gamma().axis_section(k - 1, 0.0).sublevel(1.0) {
            Some((_, Extended::Finite(x))) if x > 0.0 => Ok(x),
            _ => Err(Error::NoRoot(format!("γ(x e_{k}) = 1 has no positive root"))),
        }
    }

    pub fn exactness(&self, c: [f64; 2], alpha: f64) -> Exactness {
        let p = [alpha * c[0], alpha * c[1]];
        let pts = &self.geometry.points;
        let near = |a: [f64; 2], b: [f64; 2], tol: f64| (a[0] - b[0]).abs() <= tol && (a[1] - b[1]).abs() <= tol;
        for i in 0..2 {
            if near(p, pts.theta_max[i], 1e-8) && !near(pts.theta_max[i], pts.theta_e[i], 1e-8) {
                return Exactness::IndeterminateAtBranchPoint;
            }
        }
        let s = self.geometry.surfaces();
        let on_gamma = (s.gamma.value(p) - 1.0).abs() <= EXACTNESS_TOL;
        let faces_off = (0..2).all(|i| (s.face(i).value(p) - 1.0).abs() > EXACTNESS_TOL);
        let tau = self.tau();
        let off_tau = (0..2).all(|i| (p[i] - tau[i]).abs() > EXACTNESS_TOL);
        if on_gamma && faces_off && off_tau {
            Exactness::ExactlyExponential
        } else {
            Exactness::NotGuaranteed
        }
    }
}

/// Both computations of `τ` for a model's surfaces.
pub fn tau_both(g: &GeometrySummary) -> Result<(TauResult, TauResult)> {
    let Surfaces { gamma, gamma1, gamma2 } = g.surfaces();
    Ok((tau_direct(g)?, tau_iteration(gamma, gamma1, gamma2)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::e1;

    fn domain() -> DomainDescription {
        DomainDescription::new(GeometrySummary::compute(&e1().surfaces()).unwrap()).unwrap()
    }

    fn r(n: i64, d: i64) -> Ratio<i64> {
        Ratio::new(n, d)
    }

    #[test]
    fn e1_tau_both_ways() {
        let d = domain();
        let t = d.tau();
        assert!(
            (t[0] - 2.5f64.ln()).abs() < 1e-10 && (t[1] - 3f64.ln()).abs() < 1e-10,
            "{t:?}"
        );
        let (_, it) = tau_both(&d.geometry).unwrap();
        assert!(
            (it.tau[0] - t[0]).abs() < 1e-9 && (it.tau[1] - t[1]).abs() < 1e-9,
            "{:?}",
            it.tau
        );
        for w in it.iteration_trace.windows(2) {
            assert!(w[1][0] >= w[0][0] && w[1][1] >= w[0][1]);
        }
    }

    #[test]
    fn swapped_model_swaps_tau() {
        let g = GeometrySummary::compute(&e1().swapped().surfaces()).unwrap();
        let t = tau_direct(&g).unwrap().tau;
        assert!((t[1] - 2.5f64.ln()).abs() < 1e-10 && (t[0] - 3f64.ln()).abs() < 1e-10);
    }

    #[test]
    fn e1_coordinate_rates() {
        let d = domain();
        let a1 = d.alpha_direction([1.0, 0.0]).unwrap();
        assert!((a1.alpha - 2.5f64.ln()).abs() < 1e-10);
        assert_eq!(a1.active_constraint, ActiveConstraint::Tau1);
        let a2 = d.alpha_direction([0.0, 1.0]).unwrap();
        assert!((a2.alpha - 3f64.ln()).abs() < 1e-10);
        for k in 1..=2 {
            let direct = d
                .alpha_direction(if k == 1 { [1.0, 0.0] } else { [0.0, 1.0] })
                .unwrap()
                .alpha;
            assert!((d.alpha_coordinate(k).unwrap() - direct).abs() < 1e-9);
        }
    }

    #[test]
    fn e1_diagonal_rate_matches_dense_scan() {
        let d = domain();
        let rate = d.alpha_rational([r(1, 1), r(1, 1)]).unwrap();
        let c = [0.5f64.sqrt(); 2];
        let mut scan = 0.0;
        for i in 0..100_000 {
            let x = 3.0 * i as f64 / 100_000.0;
            if d.contains([x * c[0], x * c[1]]) {
                scan = x;
            } else {
                break;
            }
        }
        assert!((rate.alpha - scan).abs() < 1e-4, "{} vs {scan}", rate.alpha);
        assert!(rate.alpha <= 2f64.sqrt() * 2.5f64.ln() + 1e-12);
        assert_eq!(rate.periodicity, Periodicity::Arithmetic { numer: 1, denom: 1 });
    }

    #[test]
    fn periodicity_examples() {
        assert_eq!(
            periodicity([r(1, 1), r(0, 1)]),
            Some(Periodicity::Arithmetic { numer: 1, denom: 1 })
        );
        assert_eq!(
            periodicity([r(2, 3), r(1, 2)]),
            Some(Periodicity::Arithmetic { numer: 1, denom: 6 })
        );
        assert_eq!(
            periodicity([r(3, 1), r(3, 1)]),
            Some(Periodicity::Arithmetic { numer: 3, denom: 1 })
        );
        assert_eq!(periodicity([r(0, 1), r(0, 1)]), None);
    }

    #[test]
    fn periodicity_against_enumeration() {
        // Differences of {2a/3 + b/2} over a, b in 0..=20 generate 1/6 Z.
        let mut vals: Vec<i64> = Vec::new();
        for a in 0..=20i64 {
            for b in 0..=20i64 {
                vals.push(4 * a + 3 * b);
            }
        }
        let g = vals.iter().fold(0i64, |g, v| g.gcd(v));
        assert_eq!(Ratio::new(g, 6), r(1, 6));
    }

    #[test]
    fn boundary_samples_touch_a_constraint() {
        let d = domain();
        let t = d.tau();
        for p in d.sample_boundary(50) {
            assert!(p[0] <= t[0] + 1e-9 && p[1] <= t[1] + 1e-9);
            let on_tau = (p[0] - t[0]).abs() < 1e-9 || (p[1] - t[1]).abs() < 1e-9;
            let on_frontier = !d.geometry.gamma_max_contains([p[0] + 1e-7, p[1] + 1e-7]);
            assert!(on_tau || on_frontier, "{p:?}");
        }
    }
}
