//! Two-node Markovian network with batch arrivals.
//!
//! Batches `B = (B1, B2)` arrive at rate `λ`; node `k` serves at rate `μ_k`
//! and routes a departing customer to the other node with probability
//! `p12` (from 1) or `p21` (from 2). Uniformization with `λ + μ1 + μ2 = 1`
//! turns the queue-length process into a double M/G/1-type walk.
//!
//! Without simultaneous arrivals the network also admits the geometric product
//! form upper bound `P(L >= n) <= h1^-n1 h2^-n2` of Miyazawa and Taylor;
//! [`mt_bound`] computes it and compares `η_k = log h_k` with the true rates.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::asymptotics::DomainDescription;
use crate::error::{Error, Result};
use crate::geometry::{Classification, GeometrySummary};
use crate::model::{JumpKernel, ModelSpec, Region, NORMALIZATION_TOL};

pub const MT_TOL: f64 = 1e-13;
pub const MT_MAX_ITER: usize = 100_000;
/// `η_k` and `α_k` closer than this are reported as equal.
pub const TIGHT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkSpec {
    lambda: f64,
    mu: [f64; 2],
    p12: f64,
    p21: f64,
    /// `(b1, b2) -> probability`, no `(0, 0)` entry.
    batch: BTreeMap<(u32, u32), f64>,
}

/// On-disk network description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkFile {
    pub lambda: f64,
    pub mu1: f64,
    pub mu2: f64,
    pub p12: f64,
    pub p21: f64,
    pub batch: Vec<(u32, u32, f64)>,
    #[serde(default)]
    pub normalize: bool,
}

impl NetworkSpec {
    /// Validates the rates; `λ + μ1 + μ2` must equal 1 unless `normalize` is set,
    /// in which case all three are rescaled.
    pub fn new(
        lambda: f64,
        mu1: f64,
        mu2: f64,
        p12: f64,
        p21: f64,
        batch: impl IntoIterator<Item = (u32, u32, f64)>,
        normalize: bool,
    ) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidNetwork(msg));
        if !(lambda >= 0.0 && mu1 > 0.0 && mu2 > 0.0) || !(lambda + mu1 + mu2).is_finite() {
            return bad(format!(
                "rates must satisfy λ >= 0, μ1 > 0, μ2 > 0 (got {lambda}, {mu1}, {mu2})"
            ));
        }
        for (name, p) in [("p12", p12), ("p21", p21)] {
            if !(0.0..1.0).contains(&p) {
                return bad(format!("{name} = {p} must lie in [0, 1)"));
            }
        }
        let mut map = BTreeMap::new();
        for (b1, b2, p) in batch {
            if (b1, b2) == (0, 0) {
                return bad("batch size (0, 0) is not allowed".into());
            }
            if !(p > 0.0 && p <= 1.0 + NORMALIZATION_TOL) {
                return bad(format!("batch probability {p} of ({b1}, {b2}) is outside (0, 1]"));
            }
            if map.insert((b1, b2), p).is_some() {
                return bad(format!("duplicate batch size ({b1}, {b2})"));
            }
        }
        let total: f64 = map.values().sum();
        if lambda > 0.0 && (total - 1.0).abs() > NORMALIZATION_TOL {
            return bad(format!("batch probabilities sum to {total}"));
        }
        let sum = lambda + mu1 + mu2;
        let (lambda, mu1, mu2) = if (sum - 1.0).abs() > NORMALIZATION_TOL {
            if !normalize {
                return Err(Error::Normalization(sum));
            }
            (lambda / sum, mu1 / sum, mu2 / sum)
        } else {
            (lambda, mu1, mu2)
        };
        Ok(NetworkSpec {
            lambda,
            mu: [mu1, mu2],
            p12,
            p21,
            batch: map,
        })
    }

    pub fn from_file(file: NetworkFile, normalize: bool) -> Result<Self> {
        Self::new(
            file.lambda,
            file.mu1,
            file.mu2,
            file.p12,
            file.p21,
            file.batch,
            normalize || file.normalize,
        )
    }

    pub fn from_json(text: &str, normalize: bool) -> Result<Self> {
        Self::from_file(serde_json::from_str(text)?, normalize)
    }

    pub fn load(path: impl AsRef<Path>, normalize: bool) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?, normalize)
    }

    pub fn to_file(&self) -> NetworkFile {
        NetworkFile {
            lambda: self.lambda,
            mu1: self.mu[0],
            mu2: self.mu[1],
            p12: self.p12,
            p21: self.p21,
            batch: self.batch.iter().map(|(&(a, b), &p)| (a, b, p)).collect(),
            normalize: false,
        }
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn mu(&self) -> [f64; 2] {
        self.mu
    }

    pub fn routing(&self) -> (f64, f64) {
        (self.p12, self.p21)
    }

    pub fn batch(&self) -> impl Iterator<Item = (u32, u32, f64)> + '_ {
        self.batch.iter().map(|(&(a, b), &p)| (a, b, p))
    }

    /// A routing probability is zero. Such networks are still valid walks.
    pub fn boundary_routing(&self) -> bool {
        self.p12 == 0.0 || self.p21 == 0.0
    }

    /// Mean batch sizes `(b1, b2)`.
    pub fn mean_batch(&self) -> [f64; 2] {
        self.batch()
            .fold([0.0, 0.0], |m, (a, b, p)| [m[0] + p * a as f64, m[1] + p * b as f64])
    }

    pub fn has_simultaneous_arrivals(&self) -> bool {
        self.lambda > 0.0 && self.batch.keys().any(|&(a, b)| a > 0 && b > 0)
    }

    /// Node `k` (1 or 2) receives batches of more than one customer.
    pub fn node_has_batches(&self, k: usize) -> bool {
        self.lambda > 0.0 && self.batch.keys().any(|&(a, b)| if k == 1 { a >= 2 } else { b >= 2 })
    }

    /// The network with the two nodes relabelled.
    pub fn swapped(&self) -> NetworkSpec {
        NetworkSpec {
            lambda: self.lambda,
            mu: [self.mu[1], self.mu[0]],
            p12: self.p21,
            p21: self.p12,
            batch: self.batch.iter().map(|(&(a, b), &p)| ((b, a), p)).collect(),
        }
    }

    /// The same network with a different batch distribution.
    pub fn with_batch(&self, batch: impl IntoIterator<Item = (u32, u32, f64)>) -> Result<NetworkSpec> {
        NetworkSpec::new(self.lambda, self.mu[0], self.mu[1], self.p12, self.p21, batch, false)
    }
}

/// Uniformized jump kernels of the network.
pub fn build_model(ns: &NetworkSpec) -> Result<ModelSpec> {
    let [mu1, mu2] = ns.mu;
    let batches: Vec<(i64, i64, f64)> = ns
        .batch()
        .map(|(a, b, p)| (a as i64, b as i64, ns.lambda * p))
        .collect();
    let node1 = [(-1, 0, mu1 * (1.0 - ns.p12)), (-1, 1, mu1 * ns.p12)];
    let node2 = [(0, -1, mu2 * (1.0 - ns.p21)), (1, -1, mu2 * ns.p21)];
    let kernel = |region: Region, extra: &[(i64, i64, f64)]| {
        let mut acc: BTreeMap<(i64, i64), f64> = BTreeMap::new();
        for &(dx, dy, w) in batches.iter().chain(extra) {
            *acc.entry((dx, dy)).or_insert(0.0) += w;
        }
        JumpKernel::from_weights(region, acc.into_iter().map(|((dx, dy), w)| (dx, dy, w)))
    };
    let interior: Vec<_> = node1.iter().chain(&node2).copied().collect();
    let face1: Vec<_> = node1.iter().copied().chain([(0, 0, mu2)]).collect();
    let face2: Vec<_> = node2.iter().copied().chain([(0, 0, mu1)]).collect();
    ModelSpec::new(
        kernel(Region::Interior, &interior)?,
        kernel(Region::Face1, &face1)?,
        kernel(Region::Face2, &face2)?,
        kernel(Region::Origin, &[(0, 0, mu1 + mu2)])?,
    )
}

/// `(ρ1, ρ2)`; the network is stable iff both are below 1.
pub fn utilizations(ns: &NetworkSpec) -> (f64, f64) {
    let [b1, b2] = ns.mean_batch();
    let d = 1.0 - ns.p12 * ns.p21;
    (
        ns.lambda * (b1 + b2 * ns.p21) / (d * ns.mu[0]),
        ns.lambda * (b2 + b1 * ns.p12) / (d * ns.mu[1]),
    )
}

/// `<m, m1_perp>` and `<m, m2_perp>` in closed form.
pub fn drift_inner_products(ns: &NetworkSpec) -> [f64; 2] {
    let [b1, b2] = ns.mean_batch();
    let d = 1.0 - ns.p12 * ns.p21;
    let [mu1, mu2] = ns.mu;
    [
        mu2 * (ns.lambda * (b1 + b2 * ns.p21) - mu1 * d),
        mu1 * (ns.lambda * (b2 + b1 * ns.p12) - mu2 * d),
    ]
}

/// Per-node arrival rate and batch size distribution, for networks without
/// simultaneous arrivals.
struct NodeArrivals {
    rate: f64,
    /// `(size, probability)` of the node's own batch distribution.
    sizes: Vec<(u32, f64)>,
}

impl NodeArrivals {
    fn of(ns: &NetworkSpec, k: usize) -> NodeArrivals {
        let own: Vec<(u32, f64)> = ns
            .batch()
            .filter_map(|(a, b, p)| {
                let (mine, theirs) = if k == 1 { (a, b) } else { (b, a) };
                (theirs == 0 && mine > 0).then_some((mine, p))
            })
            .collect();
        let mass: f64 = own.iter().map(|x| x.1).sum();
        NodeArrivals {
            rate: ns.lambda * mass,
            sizes: own.into_iter().map(|(n, p)| (n, p / mass)).collect(),
        }
    }

    /// `(F(s) - 1) / (s - 1) = sum_b f_b (1 + s + ... + s^(b-1))`.
    fn divided(&self, s: f64) -> f64 {
        self.sizes
            .iter()
            .map(|&(b, p)| p * (0..b).map(|j| s.powi(j as i32)).sum::<f64>())
            .sum()
    }

    fn pgf(&self, s: f64) -> f64 {
        self.sizes.iter().map(|&(b, p)| p * s.powi(b as i32)).sum()
    }
}

/// Root in `s > 0` of `μ / s - λ_k G_k(s) = c`; infinite when `c = 0` and `λ_k = 0`.
fn solve_node(node: &NodeArrivals, mu: f64, c: f64) -> f64 {
    let phi = |s: f64| mu / s - node.rate * node.divided(s) - c;
    if c <= 0.0 && node.rate == 0.0 {
        return f64::INFINITY;
    }
    let (mut lo, mut hi) = (1.0, 1.0);
    while phi(lo) <= 0.0 {
        lo *= 0.5;
    }
    while phi(hi) > 0.0 {
        hi *= 2.0;
        if !hi.is_finite() {
            return f64::INFINITY;
        }
    }
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if phi(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if phi(lo).abs() <= phi(hi).abs() {
        lo
    } else {
        hi
    }
}

/// Maximal positive solution of the Miyazawa–Taylor equations.
///
/// Dividing each equation by `1 - s_k` leaves `μ1/s1 - λ1 G1(s1) = μ2 p21 / s2`
/// and its mirror, where both sides define increasing maps `s2 -> s1` and
/// `s1 -> s2`. Iterating them from `s = (∞, ∞)` decreases monotonically to the
/// greatest fixed point.
pub fn solve_mt_equations(ns: &NetworkSpec) -> Result<([f64; 2], usize)> {
    if ns.has_simultaneous_arrivals() {
        return Err(Error::SimultaneousArrivals);
    }
    let nodes = [NodeArrivals::of(ns, 1), NodeArrivals::of(ns, 2)];
    let [mu1, mu2] = ns.mu;
    let t1 = |s2: f64| solve_node(&nodes[0], mu1, mu2 * ns.p21 / s2);
    let t2 = |s1: f64| solve_node(&nodes[1], mu2, mu1 * ns.p12 / s1);
    let mut s = [f64::INFINITY, f64::INFINITY];
    for it in 1..=MT_MAX_ITER {
        let s1 = t1(s[1]);
        let s2 = t2(s1);
        let next = [s1, s2];
        if !(s1.is_finite() && s2.is_finite()) {
            if it > 2 {
                return Err(Error::NoRoot(
                    "Miyazawa–Taylor equations have no finite solution".into(),
                ));
            }
            s = next;
            continue;
        }
        let change = (0..2)
            .map(|i| {
                if s[i].is_finite() {
                    (next[i] - s[i]).abs() / next[i]
                } else {
                    f64::INFINITY
                }
            })
            .fold(0.0, f64::max);
        s = next;
        if change < MT_TOL {
            return Ok((s, it));
        }
    }
    Err(Error::NonConvergence {
        iterations: MT_MAX_ITER,
        detail: format!("Miyazawa–Taylor iteration stalled at {s:?}"),
    })
}

/// Residuals of the undivided equations at `s`.
pub fn mt_residuals(ns: &NetworkSpec, s: [f64; 2]) -> [f64; 2] {
    let n1 = NodeArrivals::of(ns, 1);
    let n2 = NodeArrivals::of(ns, 2);
    let [mu1, mu2] = ns.mu;
    let r1 = n1.rate * (n1.pgf(s[0]) - 1.0) + mu1 * (1.0 - s[0]) / s[0] - mu2 * ns.p21 * (1.0 - s[0]) / s[1];
    let r2 = n2.rate * (n2.pgf(s[1]) - 1.0) + mu2 * (1.0 - s[1]) / s[1] - mu1 * ns.p12 * (1.0 - s[1]) / s[0];
    [r1, r2]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tightness {
    /// `|η_k - α_k| < TIGHT_TOL`.
    pub tight: [bool; 2],
    /// The sufficient condition for `η_k = α_k` holds.
    pub predicted: [bool; 2],
    /// Whether the prediction settles the question: the sufficient condition
    /// holds, or node `k` itself has batch arrivals (which makes the condition
    /// necessary).
    pub conclusive: [bool; 2],
    pub reasons: [String; 2],
}

impl Tightness {
    /// The numeric verdict contradicts a conclusive prediction.
    pub fn mismatch(&self) -> bool {
        (0..2).any(|i| self.conclusive[i] && self.tight[i] != self.predicted[i])
    }
}

pub fn tightness(ns: &NetworkSpec, g: &GeometrySummary, eta: [f64; 2], alpha: [f64; 2]) -> Tightness {
    let mut out = Tightness {
        tight: [false; 2],
        predicted: [false; 2],
        conclusive: [false; 2],
        reasons: [String::new(), String::new()],
    };
    for k in 1..=2 {
        let i = k - 1;
        let other = 3 - k;
        out.tight[i] = (eta[i] - alpha[i]).abs() < TIGHT_TOL;
        let own_side = if k == 1 { Classification::D3 } else { Classification::D2 };
        let outside_face = g.points.gamma_k_at_max[i] > 1.0;
        let shape = (g.classification == Classification::D1 && outside_face) || g.classification == own_side;
        let other_batches = ns.node_has_batches(other);
        out.predicted[i] = !other_batches && shape;
        out.conclusive[i] = out.predicted[i] || ns.node_has_batches(k);
        out.reasons[i] = if other_batches {
            format!("node {other} has batch arrivals")
        } else if shape {
            match g.classification {
                Classification::D1 => format!("no batches at node {other}; D1 with γ_{k}(θ^({k},max)) > 1"),
                c => format!("no batches at node {other}; {c:?}"),
            }
        } else if g.classification == Classification::D1 {
            format!("D1 with θ^({k},max) in the closure of Γ_{k}")
        } else {
            format!("{:?} excludes tightness at node {k}", g.classification)
        };
        if !out.conclusive[i] {
            out.reasons[i].push_str(" (inconclusive: node has single arrivals)");
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MtBound {
    pub h: [f64; 2],
    pub eta: [f64; 2],
    pub solvable: bool,
    pub no_simultaneous: bool,
    pub iterations: usize,
    /// `γ(η) - 1`; zero up to rounding because the solution lies on `∂Γ`.
    pub gamma_residual: f64,
    pub alpha: [f64; 2],
    pub tightness: Tightness,
}

impl MtBound {
    pub fn tight(&self) -> [bool; 2] {
        self.tightness.tight
    }
}

/// Solves the bound and compares it with the coordinate decay rates.
pub fn mt_bound(ns: &NetworkSpec) -> Result<MtBound> {
    let (h, iterations) = solve_mt_equations(ns)?;
    let model = build_model(ns)?;
    let g = GeometrySummary::compute(&model.surfaces())?;
    let d = DomainDescription::new(g)?;
    let alpha = [
        d.alpha_direction([1.0, 0.0])?.alpha,
        d.alpha_direction([0.0, 1.0])?.alpha,
    ];
    let eta = [h[0].ln(), h[1].ln()];
    let tightness = tightness(ns, &d.geometry, eta, alpha);
    Ok(MtBound {
        h,
        eta,
        solvable: true,
        no_simultaneous: true,
        iterations,
        gamma_residual: d.geometry.gamma().value(eta) - 1.0,
        alpha,
        tightness,
    })
}
