//! Level sets of the interior and face MGFs.
//!
//! `Γ = {γ < 1}` and `Γ_k = {γ_k < 1}` are open convex sets with the origin on
//! their boundaries. Everything here is built from one-dimensional convex
//! sections (see [`crate::section`]): branch functions solve `γ = 1` along an
//! axis, the extreme points of `Γ` come from the convex profile
//! `p_k(v) = min_s γ` over lines `θ_k = v`, and the curve intersections
//! `∂Γ ∩ ∂Γ_k` are found by walking `∂Γ` in polar coordinates.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{MgfSurface, Surfaces};
use crate::section::{bisect_sign, golden_max, Extended};

/// Angular samples per half-turn used when walking `∂Γ`.
pub const BOUNDARY_SAMPLES: usize = 512;
/// A section whose minimum is within this of 1 is treated as tangent to `∂Γ`.
pub const TANGENCY_TOL: f64 = 1e-12;
/// Slack for the strict inequalities of `Γ_max` membership.
pub const MEMBERSHIP_SLACK: f64 = 1e-12;
/// Tolerance of the weak comparisons in (D2) and (D3).
pub const CLASSIFY_TOL: f64 = 1e-10;

const MAX_STEPS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Root {
    Max,
    Min,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Classification {
    D1,
    D2,
    D3,
}

fn axis(k: usize) -> usize {
    assert!(k == 1 || k == 2, "coordinate index must be 1 or 2, got {k}");
    k - 1
}

fn point(axis: usize, along: f64, other: f64) -> [f64; 2] {
    let mut p = [0.0; 2];
    p[axis] = along;
    p[1 - axis] = other;
    p
}

/// Root of `γ = 1` in coordinate `k` with the other coordinate fixed.
///
/// `Root::Max` gives `ξ̄_k(fixed)` and `Root::Min` gives `ξ̲_k(fixed)`.
pub fn branch(gamma: &MgfSurface, k: usize, fixed: f64, which: Root) -> Result<f64> {
    let sec = gamma.axis_section(axis(k), fixed);
    match sec.sublevel(1.0) {
        Some((lo, hi)) => {
            let end = if which == Root::Max { hi } else { lo };
            end.finite()
                .ok_or_else(|| Error::NoRoot(format!("section of coordinate {k} at {fixed} is unbounded")))
        }
        None => {
            let m = sec.minimize();
            match m.arg {
                Extended::Finite(x) if (m.value - 1.0).abs() <= TANGENCY_TOL => Ok(x),
                _ => Err(Error::NoRoot(format!(
                    "minimum {} of the section of coordinate {k} at {fixed} exceeds 1",
                    m.value
                ))),
            }
        }
    }
}

/// `v -> min over the other coordinate of γ` on lines where coordinate `axis` is `v`.
struct Profile<'a> {
    gamma: &'a MgfSurface,
    axis: usize,
}

impl Profile<'_> {
    /// Minimizing other coordinate and the minimum value.
    fn at(&self, v: f64) -> Result<(f64, f64)> {
        let m = self.gamma.axis_section(1 - self.axis, v).minimize();
        match m.arg {
            Extended::Finite(s) => Ok((s, m.value)),
            _ => Err(Error::Numeric(
                "level set of the interior MGF is unbounded; condition (i) fails".into(),
            )),
        }
    }

    /// Derivative of the profile (envelope theorem).
    fn slope(&self, v: f64) -> Result<f64> {
        let (s, _) = self.at(v)?;
        Ok(self.gamma.gradient(point(self.axis, v, s))[self.axis])
    }

    fn value(&self, v: f64) -> Result<f64> {
        Ok(self.at(v)?.1)
    }

    fn minimizer(&self) -> Result<f64> {
        let (mut lo, mut hi) = (0.0, 0.0);
        let mut step = 1.0;
        let d0 = self.slope(0.0)?;
        if d0 == 0.0 {
            return Ok(0.0);
        }
        let mut bracketed = false;
        for _ in 0..MAX_STEPS {
            if d0 < 0.0 {
                hi = lo + step;
                if self.slope(hi)? >= 0.0 {
                    bracketed = true;
                    break;
                }
                lo = hi;
            } else {
                lo = hi - step;
                if self.slope(lo)? <= 0.0 {
                    bracketed = true;
                    break;
                }
                hi = lo;
            }
            step *= 2.0;
        }
        if !bracketed {
            return Err(Error::Numeric("profile of the interior MGF has no minimizer".into()));
        }
        for _ in 0..MAX_STEPS {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.slope(mid)? < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(if self.value(lo)? <= self.value(hi)? { lo } else { hi })
    }

    /// Crossing of level 1 on the side `sign` of `start`, where the profile is below 1.
    fn crossing(&self, start: f64, sign: f64) -> Result<f64> {
        let mut inside = start;
        let mut step = 1.0;
        let mut outside = start + sign * step;
        let mut found = false;
        for _ in 0..MAX_STEPS {
            if self.value(outside)? >= 1.0 {
                found = true;
                break;
            }
            inside = outside;
            step *= 2.0;
            outside = start + sign * step;
        }
        if !found {
            return Err(Error::Numeric("interior level set is unbounded".into()));
        }
        for _ in 0..MAX_STEPS {
            let mid = 0.5 * (inside + outside);
            if mid == inside || mid == outside {
                break;
            }
            if self.value(mid)? < 1.0 {
                inside = mid;
            } else {
                outside = mid;
            }
        }
        let (vi, vo) = (self.value(inside)?, self.value(outside)?);
        Ok(if (vi - 1.0).abs() <= (vo - 1.0).abs() {
            inside
        } else {
            outside
        })
    }

    fn extreme(&self, which: Root) -> Result<[f64; 2]> {
        let v0 = self.minimizer()?;
        let (_, p0) = self.at(v0)?;
        if !(p0 < 1.0) {
            return Err(Error::NoRoot(format!(
                "the interior level set is empty (minimum of the MGF is {p0})"
            )));
        }
        let sign = if which == Root::Max { 1.0 } else { -1.0 };
        let v = self.crossing(v0, sign)?;
        let (s, _) = self.at(v)?;
        Ok(point(self.axis, v, s))
    }
}

/// `θ^(k,max)`: the point of `∂Γ` with the largest coordinate `k`.
pub fn extreme_point_max(gamma: &MgfSurface, k: usize) -> Result<[f64; 2]> {
    Profile { gamma, axis: axis(k) }.extreme(Root::Max)
}

/// `θ^(k,min)`: the point of `∂Γ` with the smallest coordinate `k`.
pub fn extreme_point_min(gamma: &MgfSurface, k: usize) -> Result<[f64; 2]> {
    Profile { gamma, axis: axis(k) }.extreme(Root::Min)
}

/// Point of `∂Γ` on the ray from `center` with angle `phi`.
pub fn boundary_ray(gamma: &MgfSurface, center: [f64; 2], phi: f64) -> Result<[f64; 2]> {
    let dir = [phi.cos(), phi.sin()];
    let r = match gamma.section(center, dir).sublevel(1.0) {
        Some((_, Extended::Finite(r))) if r >= 0.0 => r,
        _ => {
            return Err(Error::Numeric(format!(
                "ray from {center:?} at angle {phi} does not exit the level set"
            )))
        }
    };
    Ok([center[0] + r * dir[0], center[1] + r * dir[1]])
}

/// `n` points of `∂Γ` at equally spaced angles around `center`.
pub fn sample_boundary(gamma: &MgfSurface, center: [f64; 2], n: usize) -> Result<Vec<[f64; 2]>> {
    (0..n)
        .map(|i| boundary_ray(gamma, center, std::f64::consts::TAU * i as f64 / n as f64))
        .collect()
}

fn center_of(points: &[[f64; 2]]) -> [f64; 2] {
    let n = points.len() as f64;
    let s = points.iter().fold([0.0, 0.0], |acc, p| [acc[0] + p[0], acc[1] + p[1]]);
    [s[0] / n, s[1] / n]
}

/// A point strictly inside `Γ`: the mean of its four extreme points.
pub fn interior_point(gamma: &MgfSurface) -> Result<[f64; 2]> {
    let pts = [
        extreme_point_max(gamma, 1)?,
        extreme_point_min(gamma, 1)?,
        extreme_point_max(gamma, 2)?,
        extreme_point_min(gamma, 2)?,
    ];
    Ok(center_of(&pts))
}

/// `θ^(k,e)`: the point of `∂Γ ∩ ∂Γ_k` with the largest coordinate `k`.
///
/// The origin always belongs to both boundaries, so a point is returned
/// whenever the walk succeeds. When `γ_k = γ` along all of `∂Γ` the result is
/// `θ^(k,max)`.
pub fn edge_point(gamma: &MgfSurface, gamma_k: &MgfSurface, k: usize) -> Result<Option<[f64; 2]>> {
    let center = interior_point(gamma)?;
    let theta_max = extreme_point_max(gamma, k)?;
    edge_point_from(gamma, gamma_k, k, center, theta_max, BOUNDARY_SAMPLES)
}

fn edge_point_from(
    gamma: &MgfSurface,
    gamma_k: &MgfSurface,
    k: usize,
    center: [f64; 2],
    theta_max: [f64; 2],
    samples_per_branch: usize,
) -> Result<Option<[f64; 2]>> {
    let a = axis(k);
    let n = 2 * samples_per_branch;
    let step = std::f64::consts::TAU / n as f64;
    let g = |phi: f64| -> Result<(f64, [f64; 2])> {
        let b = boundary_ray(gamma, center, phi)?;
        Ok((gamma_k.value(b) - 1.0, b))
    };
    let mut values = Vec::with_capacity(n + 1);
    for i in 0..=n {
        values.push(g(i as f64 * step)?.0);
    }
    if values.iter().all(|v| v.abs() < TANGENCY_TOL) {
        return Ok(Some(theta_max));
    }
    let mut candidates: Vec<[f64; 2]> = vec![[0.0, 0.0]];
    let eval = |phi: f64| g(phi).map(|x| x.0).unwrap_or(f64::NAN);
    for i in 0..n {
        let (lo, hi) = (i as f64 * step, (i + 1) as f64 * step);
        let (vl, vh) = (values[i], values[i + 1]);
        if vl == 0.0 {
            candidates.push(g(lo)?.1);
        }
        if (vl < 0.0 && vh > 0.0) || (vl > 0.0 && vh < 0.0) {
            let phi = bisect_sign(eval, lo, hi);
            candidates.push(g(phi)?.1);
        }
    }
    // Tangential contacts show up as small local minima of |γ_k - 1| without a sign change.
    for i in 1..n {
        let (l, c, r) = (values[i - 1], values[i], values[i + 1]);
        if c.abs() < 1e-3 && c.abs() <= l.abs() && c.abs() <= r.abs() && l * c > 0.0 && c * r > 0.0 {
            let phi = golden_max(|t| -eval(t).abs(), (i - 1) as f64 * step, (i + 1) as f64 * step, 1e-15);
            let (v, b) = g(phi)?;
            if v.abs() < TANGENCY_TOL {
                candidates.push(b);
            }
        }
    }
    Ok(candidates.into_iter().max_by(|p, q| p[a].total_cmp(&q[a])))
}

/// `θ^(k,c)`: `θ^(k,e)` if `γ_k(θ^(k,max)) > 1`, otherwise `θ^(k,max)`.
pub fn convergence_point(gamma: &MgfSurface, gamma_k: &MgfSurface, k: usize) -> Result<[f64; 2]> {
    let theta_max = extreme_point_max(gamma, k)?;
    if gamma_k.value(theta_max) > 1.0 {
        edge_point(gamma, gamma_k, k)?
            .ok_or_else(|| Error::Internal(format!("γ_{k}(θ^({k},max)) > 1 but ∂Γ and ∂Γ_{k} do not meet")))
    } else {
        Ok(theta_max)
    }
}

/// Extreme points of `Γ`, indexed by `k - 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtremePoints {
    pub theta_max: [[f64; 2]; 2],
    pub theta_min: [[f64; 2]; 2],
    pub theta_e: [[f64; 2]; 2],
    pub edge_exists: [bool; 2],
    pub theta_c: [[f64; 2]; 2],
    /// `γ_k(θ^(k,max))`, which selects `θ^(k,c)`.
    pub gamma_k_at_max: [f64; 2],
}

/// Extreme points, branch functions and the (D1)/(D2)/(D3) classification.
#[derive(Debug, Clone, PartialEq)]
pub struct GeometrySummary {
    surfaces: Surfaces,
    pub points: ExtremePoints,
    pub classification: Classification,
    pub center: [f64; 2],
}

impl GeometrySummary {
    pub fn compute(surfaces: &Surfaces) -> Result<Self> {
        Self::compute_with(surfaces, BOUNDARY_SAMPLES)
    }

    pub fn compute_with(surfaces: &Surfaces, samples_per_branch: usize) -> Result<Self> {
        let gamma = &surfaces.gamma;
        let theta_max = [extreme_point_max(gamma, 1)?, extreme_point_max(gamma, 2)?];
        let theta_min = [extreme_point_min(gamma, 1)?, extreme_point_min(gamma, 2)?];
        let center = center_of(&[theta_max[0], theta_max[1], theta_min[0], theta_min[1]]);
        let mut theta_e = [[0.0; 2]; 2];
        let mut edge_exists = [false; 2];
        let mut theta_c = [[0.0; 2]; 2];
        let mut gamma_k_at_max = [0.0; 2];
        for k in 1..=2 {
            let i = k - 1;
            let face = surfaces.face(i);
            let e = edge_point_from(gamma, face, k, center, theta_max[i], samples_per_branch)?;
            edge_exists[i] = e.is_some();
            theta_e[i] = e.unwrap_or(theta_max[i]);
            gamma_k_at_max[i] = face.value(theta_max[i]);
            theta_c[i] = if gamma_k_at_max[i] > 1.0 {
                e.ok_or_else(|| Error::Internal(format!("γ_{k}(θ^({k},max)) > 1 but ∂Γ and ∂Γ_{k} do not meet")))?
            } else {
                theta_max[i]
            };
        }
        let classification = classify(theta_c[0], theta_c[1])?;
        Ok(GeometrySummary {
            surfaces: surfaces.clone(),
            points: ExtremePoints {
                theta_max,
                theta_min,
                theta_e,
                edge_exists,
                theta_c,
                gamma_k_at_max,
            },
            classification,
            center,
        })
    }

    pub fn surfaces(&self) -> &Surfaces {
        &self.surfaces
    }

    pub fn gamma(&self) -> &MgfSurface {
        &self.surfaces.gamma
    }

    /// `ξ̄_k(t)`
    pub fn xi_bar(&self, k: usize, t: f64) -> Result<f64> {
        branch(&self.surfaces.gamma, k, t, Root::Max)
    }

    /// `ξ̲_k(t)`
    pub fn xi_under(&self, k: usize, t: f64) -> Result<f64> {
        branch(&self.surfaces.gamma, k, t, Root::Min)
    }

    /// Admissible interval of the fixed coordinate for branch `k`.
    pub fn branch_interval(&self, k: usize) -> (f64, f64) {
        let other = 1 - axis(k);
        (self.points.theta_min[other][other], self.points.theta_max[other][other])
    }

    /// Whether some point of `Γ` strictly dominates `p` componentwise.
    pub fn gamma_max_contains(&self, p: [f64; 2]) -> bool {
        let [m1, m2] = [self.points.theta_max[0], self.points.theta_max[1]];
        if p[0] >= m1[0] - MEMBERSHIP_SLACK {
            return false;
        }
        if p[0] <= m2[0] {
            return p[1] < m2[1] - MEMBERSHIP_SLACK;
        }
        match self.xi_bar(2, p[0]) {
            Ok(bound) => p[1] < bound - MEMBERSHIP_SLACK,
            Err(_) => false,
        }
    }
}

/// Free-function form of [`GeometrySummary::gamma_max_contains`].
pub fn gamma_max_membership(g: &GeometrySummary, p: [f64; 2]) -> bool {
    g.gamma_max_contains(p)
}

pub fn classify(c1: [f64; 2], c2: [f64; 2]) -> Result<Classification> {
    if c2[0] < c1[0] && c1[1] < c2[1] {
        return Ok(Classification::D1);
    }
    let le = |a: [f64; 2], b: [f64; 2]| a[0] <= b[0] + CLASSIFY_TOL && a[1] <= b[1] + CLASSIFY_TOL;
    if le(c2, c1) {
        Ok(Classification::D2)
    } else if le(c1, c2) {
        Ok(Classification::D3)
    } else {
        Err(Error::Internal(format!(
            "excluded configuration of θ^(1,c) = {c1:?} and θ^(2,c) = {c2:?}"
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::{e1, symmetric_zero_drift};

    fn ln(x: f64) -> f64 {
        x.ln()
    }

    #[test]
    fn e1_branches() {
        let g = e1().interior().mgf();
        assert!((branch(&g, 1, 0.0, Root::Max).unwrap() - ln(2.5)).abs() < 1e-12);
        assert!(branch(&g, 1, 0.0, Root::Min).unwrap().abs() < 1e-12);
        assert!(matches!(branch(&g, 1, 50.0, Root::Max), Err(Error::NoRoot(_))));
    }

    #[test]
    fn tangent_branch_of_symmetric_walk() {
        let g = symmetric_zero_drift().interior().mgf();
        assert!(branch(&g, 1, 0.0, Root::Max).unwrap().abs() < 1e-9);
        assert!(branch(&g, 1, 0.0, Root::Min).unwrap().abs() < 1e-9);
    }

    #[test]
    fn extreme_points_satisfy_first_order_conditions() {
        let g = e1().interior().mgf();
        for k in 1..=2 {
            for p in [extreme_point_max(&g, k).unwrap(), extreme_point_min(&g, k).unwrap()] {
                assert!((g.value(p) - 1.0).abs() < 1e-10);
                assert!(g.gradient(p)[2 - k].abs() < 1e-8);
            }
        }
        let p = extreme_point_max(&g, 1).unwrap();
        assert!(p[0] >= ln(2.5) - 1e-10);
    }

    #[test]
    fn max_point_agrees_with_ternary_search_and_sampling() {
        let g = e1().interior().mgf();
        let p = extreme_point_max(&g, 1).unwrap();
        let lo = extreme_point_min(&g, 2).unwrap()[1];
        let hi = extreme_point_max(&g, 2).unwrap()[1];
        let xi = |t: f64| branch(&g, 1, t, Root::Max).unwrap_or(f64::NEG_INFINITY);
        let (mut a, mut b) = (lo, hi);
        while b - a > 1e-12 {
            let m1 = a + (b - a) / 3.0;
            let m2 = b - (b - a) / 3.0;
            if xi(m1) < xi(m2) {
                a = m1;
            } else {
                b = m2;
            }
        }
        assert!((xi(0.5 * (a + b)) - p[0]).abs() < 1e-10);
        let center = interior_point(&g).unwrap();
        for q in sample_boundary(&g, center, 10_000).unwrap() {
            assert!(q[0] <= p[0] + 1e-8);
        }
    }

    #[test]
    fn e1_edge_points() {
        let m = e1();
        let s = m.surfaces();
        let e1p = edge_point(&s.gamma, &s.gamma1, 1).unwrap().unwrap();
        assert!((e1p[0] - ln(2.5)).abs() < 1e-10 && e1p[1].abs() < 1e-10, "{e1p:?}");
        let e2p = edge_point(&s.gamma, &s.gamma2, 2).unwrap().unwrap();
        assert!(
            (e2p[0] - ln(2.0)).abs() < 1e-10 && (e2p[1] - ln(3.0)).abs() < 1e-10,
            "{e2p:?}"
        );
    }

    #[test]
    fn coincident_surfaces_return_the_max_point() {
        let g = e1().interior().mgf();
        let e = edge_point(&g, &g, 1).unwrap().unwrap();
        let p = extreme_point_max(&g, 1).unwrap();
        assert!((e[0] - p[0]).abs() < 1e-12 && (e[1] - p[1]).abs() < 1e-12);
    }

    #[test]
    fn e1_summary() {
        let m = e1();
        let g = GeometrySummary::compute(&m.surfaces()).unwrap();
        assert_eq!(g.classification, Classification::D1);
        assert!(g.points.gamma_k_at_max[0] > 1.0 && g.points.gamma_k_at_max[1] > 1.0);
        let c = g.points.theta_c;
        assert!((c[0][0] - ln(2.5)).abs() < 1e-10 && c[0][1].abs() < 1e-10);
        assert!((c[1][0] - ln(2.0)).abs() < 1e-10 && (c[1][1] - ln(3.0)).abs() < 1e-10);
    }

    #[test]
    fn convergence_point_takes_max_when_face_is_inside() {
        // A face kernel with γ_1(θ^(1,max)) < 1 selects θ^(1,max).
        let m = e1();
        let s = m.surfaces();
        let face = crate::model::JumpKernel::new(crate::model::Region::Face1, [(-1, 0, 0.9), (1, 0, 0.1)])
            .unwrap()
            .mgf();
        let p = extreme_point_max(&s.gamma, 1).unwrap();
        assert!(face.value(p) < 1.0);
        assert_eq!(convergence_point(&s.gamma, &face, 1).unwrap(), p);
    }

    #[test]
    fn membership_frontier() {
        let g = GeometrySummary::compute(&e1().surfaces()).unwrap();
        assert!(g.gamma_max_contains([0.0, 0.0]));
        assert!(g.gamma_max_contains([0.8, -5.0]));
        let p = g.points.theta_max[0];
        assert!(!g.gamma_max_contains([p[0] + 1e-6, p[1]]));
        assert!(!g.gamma_max_contains([0.0, 5.0]));
    }

    #[test]
    fn classification_rules() {
        assert_eq!(classify([2.0, 0.0], [1.0, 1.0]).unwrap(), Classification::D1);
        assert_eq!(classify([2.0, 2.0], [1.0, 1.0]).unwrap(), Classification::D2);
        assert_eq!(classify([1.0, 1.0], [2.0, 2.0]).unwrap(), Classification::D3);
        assert!(matches!(classify([1.0, 2.0], [2.0, 1.0]), Err(Error::Internal(_))));
    }
}
