//! Standing conditions on a model.
//!
//! (i) the free walk driven by the interior kernel is irreducible and aperiodic on
//! the whole lattice; (ii) the reflected chain is irreducible and aperiodic;
//! (iii) jumps are light tailed, which finite support guarantees; (iv) the
//! interior drift is non-zero.

use std::collections::VecDeque;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::model::{JumpKernel, ModelSpec, Region};

/// Grid side used for the reachability check of condition (ii).
pub const REACHABILITY_GRID: usize = 30;
/// States in `[0, REACHABILITY_CORE)^2` must communicate for (ii) to pass.
pub const REACHABILITY_CORE: usize = 20;
pub const DRIFT_TOL: f64 = 1e-12;

/// Lattice structure of the free walk's support.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WalkStructure {
    /// Index of the subgroup of `Z^2` generated by the support (0 if not full rank).
    pub lattice_index: u64,
    /// Period of return times to the starting point (0 if undefined).
    pub period: u64,
    /// Whether the support is contained in no closed half-plane.
    pub spans_plane: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Condition {
    WalkIrreducibleAperiodic,
    ReflectedIrreducibleAperiodic,
    LightTails,
    NonZeroDrift,
}

impl Condition {
    pub fn label(self) -> &'static str {
        match self {
            Condition::WalkIrreducibleAperiodic => "(i)",
            Condition::ReflectedIrreducibleAperiodic => "(ii)",
            Condition::LightTails => "(iii)",
            Condition::NonZeroDrift => "(iv)",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub walk_irreducible_aperiodic: bool,
    pub walk: WalkStructure,
    pub reflected_irreducible_aperiodic: bool,
    /// Condition (ii) is decided on a finite grid only.
    pub reflected_check_approximate: bool,
    pub reachability_grid: usize,
    pub light_tails: bool,
    pub nonzero_drift: bool,
}

impl ConditionReport {
    pub fn all_hold(&self) -> bool {
        self.failures().is_empty()
    }

    pub fn failures(&self) -> Vec<Condition> {
        let mut out = Vec::new();
        if !self.walk_irreducible_aperiodic {
            out.push(Condition::WalkIrreducibleAperiodic);
        }
        if !self.reflected_irreducible_aperiodic {
            out.push(Condition::ReflectedIrreducibleAperiodic);
        }
        if !self.light_tails {
            out.push(Condition::LightTails);
        }
        if !self.nonzero_drift {
            out.push(Condition::NonZeroDrift);
        }
        out
    }
}

pub fn check_conditions(model: &ModelSpec) -> ConditionReport {
    let walk = walk_structure(model.interior());
    let m = model.interior().mean();
    ConditionReport {
        walk_irreducible_aperiodic: walk.lattice_index == 1 && walk.period == 1 && walk.spans_plane,
        walk,
        reflected_irreducible_aperiodic: reflected_chain_communicates(model, REACHABILITY_GRID),
        reflected_check_approximate: true,
        reachability_grid: REACHABILITY_GRID,
        light_tails: true,
        nonzero_drift: m[0].hypot(m[1]) >= DRIFT_TOL,
    }
}

pub fn walk_structure(kernel: &JumpKernel) -> WalkStructure {
    let planar: Vec<Vec<i128>> = kernel
        .atoms()
        .iter()
        .map(|a| vec![a.dx as i128, a.dy as i128])
        .collect();
    let lifted: Vec<Vec<i128>> = kernel
        .atoms()
        .iter()
        .map(|a| vec![a.dx as i128, a.dy as i128, 1])
        .collect();
    let index2 = lattice_index(planar, 2);
    let index3 = lattice_index(lifted, 3);
    // [Z^3 : L3] = [Z^2 : proj L3] * [Z : L3 ∩ ({0}^2 x Z)], and proj L3 = L2.
    let period = if index2 == 0 || index3 == 0 {
        0
    } else {
        (index3 / index2) as u64
    };
    WalkStructure {
        lattice_index: index2 as u64,
        period,
        spans_plane: spans_plane(kernel),
    }
}

/// Index of the lattice generated by `vectors` in `Z^dim`, or 0 if it is not full rank.
fn lattice_index(mut vectors: Vec<Vec<i128>>, dim: usize) -> i128 {
    let mut index = 1i128;
    for col in 0..dim {
        let mut pivot: Option<Vec<i128>> = None;
        let mut rest = Vec::new();
        for v in vectors {
            if v[col] == 0 {
                if v.iter().any(|&x| x != 0) {
                    rest.push(v);
                }
                continue;
            }
            match pivot.take() {
                None => pivot = Some(v),
                Some(p) => {
                    let (mut a, mut b) = (p, v);
                    while b[col] != 0 {
                        let q = Integer::div_floor(&a[col], &b[col]);
                        for (x, y) in a.iter_mut().zip(&b) {
                            *x -= q * y;
                        }
                        std::mem::swap(&mut a, &mut b);
                    }
                    if b.iter().any(|&x| x != 0) {
                        rest.push(b);
                    }
                    pivot = Some(a);
                }
            }
        }
        match pivot {
            Some(p) => index *= p[col].abs(),
            None => return 0,
        }
        vectors = rest;
    }
    index
}

fn spans_plane(kernel: &JumpKernel) -> bool {
    let mut angles: Vec<f64> = kernel
        .atoms()
        .iter()
        .filter(|a| (a.dx, a.dy) != (0, 0))
        .map(|a| (a.dy as f64).atan2(a.dx as f64))
        .collect();
    if angles.len() < 3 {
        return false;
    }
    angles.sort_by(f64::total_cmp);
    let mut max_gap = angles[0] + 2.0 * std::f64::consts::PI - angles[angles.len() - 1];
    for w in angles.windows(2) {
        max_gap = max_gap.max(w[1] - w[0]);
    }
    max_gap < std::f64::consts::PI - 1e-12
}

/// Mutual reachability of the core states and aperiodicity of the reflected chain,
/// using only paths that stay inside a `grid x grid` box.
fn reflected_chain_communicates(model: &ModelSpec, grid: usize) -> bool {
    let n = grid * grid;
    let idx = |i: usize, j: usize| j * grid + i;
    let mut fwd: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut rev: Vec<Vec<usize>> = vec![Vec::new(); n];
    for j in 0..grid {
        for i in 0..grid {
            let kernel = model.kernel(Region::of_state(i, j));
            for a in kernel.atoms() {
                let (ni, nj) = (i as i64 + a.dx, j as i64 + a.dy);
                if ni < 0 || nj < 0 || ni >= grid as i64 || nj >= grid as i64 {
                    continue;
                }
                let to = idx(ni as usize, nj as usize);
                fwd[idx(i, j)].push(to);
                rev[to].push(idx(i, j));
            }
        }
    }
    let reach = |adj: &Vec<Vec<usize>>| {
        let mut level = vec![usize::MAX; n];
        let mut queue = VecDeque::from([0usize]);
        level[0] = 0;
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                if level[v] == usize::MAX {
                    level[v] = level[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        level
    };
    let down = reach(&fwd);
    let up = reach(&rev);
    let core = REACHABILITY_CORE.min(grid);
    for j in 0..core {
        for i in 0..core {
            if down[idx(i, j)] == usize::MAX || up[idx(i, j)] == usize::MAX {
                return false;
            }
        }
    }
    // Period of the class of the origin: gcd of level differences along its edges.
    let mut period = 0usize;
    for u in 0..n {
        if down[u] == usize::MAX || up[u] == usize::MAX {
            continue;
        }
        for &v in &fwd[u] {
            if down[v] != usize::MAX && up[v] != usize::MAX {
                let diff = (down[u] + 1).abs_diff(down[v]);
                period = period.gcd(&diff);
            }
        }
    }
    period == 1
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kernel(atoms: &[(i64, i64, f64)]) -> JumpKernel {
        JumpKernel::new(Region::Interior, atoms.iter().copied()).unwrap()
    }

    #[test]
    fn diagonal_support_is_a_sublattice() {
        let w = walk_structure(&kernel(&[(1, 1, 0.5), (-1, -1, 0.5)]));
        assert_eq!(w.lattice_index, 0);
        assert!(!w.spans_plane);
        let w = walk_structure(&kernel(&[(1, 1, 0.3), (-1, 1, 0.3), (0, -1, 0.4)]));
        assert_eq!(w.lattice_index, 1);
        let w = walk_structure(&kernel(&[(1, 1, 0.25), (-1, 1, 0.25), (1, -1, 0.25), (-1, -1, 0.25)]));
        assert_eq!(w.lattice_index, 2);
    }

    #[test]
    fn simple_random_walk_has_period_two() {
        let w = walk_structure(&kernel(&[(1, 0, 0.25), (-1, 0, 0.25), (0, 1, 0.25), (0, -1, 0.25)]));
        assert_eq!(w.lattice_index, 1);
        assert_eq!(w.period, 2);
        assert!(w.spans_plane);
    }

    #[test]
    fn e1_walk_is_aperiodic() {
        let w = walk_structure(&kernel(&[(1, 0, 0.2), (-1, 0, 0.25), (-1, 1, 0.25), (0, -1, 0.3)]));
        assert_eq!(
            w,
            WalkStructure {
                lattice_index: 1,
                period: 1,
                spans_plane: true
            }
        );
    }

    #[test]
    fn half_plane_support_is_not_irreducible() {
        let w = walk_structure(&kernel(&[(1, 0, 0.4), (0, 1, 0.3), (-1, 1, 0.3)]));
        assert!(!w.spans_plane);
    }
}
