use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::MgfSurface;

/// Tolerance on the total mass of a kernel.
pub const NORMALIZATION_TOL: f64 = 1e-12;

/// Which part of the quarter plane a kernel governs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Region {
    Interior,
    /// The horizontal axis `{(i, 0) : i >= 1}`.
    Face1,
    /// The vertical axis `{(0, j) : j >= 1}`.
    Face2,
    Origin,
}

impl Region {
    /// Componentwise lower bound on the increments allowed from this region.
    pub fn lower_bound(self) -> (i64, i64) {
        match self {
            Region::Interior => (-1, -1),
            Region::Face1 => (-1, 0),
            Region::Face2 => (0, -1),
            Region::Origin => (0, 0),
        }
    }

    pub fn admits(self, dx: i64, dy: i64) -> bool {
        let (lx, ly) = self.lower_bound();
        dx >= lx && dy >= ly
    }

    /// Region of a state of the quarter plane.
    pub fn of_state(i: usize, j: usize) -> Region {
        match (i, j) {
            (0, 0) => Region::Origin,
            (_, 0) => Region::Face1,
            (0, _) => Region::Face2,
            _ => Region::Interior,
        }
    }
}

/// One support point of a jump distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub dx: i64,
    pub dy: i64,
    pub p: f64,
}

/// A finite-support distribution of one-step increments on the integer lattice.
///
/// Atoms are kept sorted by `(dx, dy)`; construction rejects duplicates,
/// non-normalized weights and increments that would leave the quarter plane
/// from the kernel's region.
#[derive(Debug, Clone, PartialEq)]
pub struct JumpKernel {
    region: Region,
    atoms: Vec<Atom>,
}

impl JumpKernel {
    pub fn new<I>(region: Region, atoms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (i64, i64, f64)>,
    {
        let mut atoms: Vec<Atom> = atoms.into_iter().map(|(dx, dy, p)| Atom { dx, dy, p }).collect();
        let invalid = |reason: String| Error::InvalidKernel { region, reason };
        if atoms.is_empty() {
            return Err(invalid("empty support".into()));
        }
        for a in &atoms {
            if !(a.p > 0.0 && a.p <= 1.0 + NORMALIZATION_TOL) {
                return Err(invalid(format!(
                    "probability {} of atom ({}, {}) is outside (0, 1]",
                    a.p, a.dx, a.dy
                )));
            }
            if !region.admits(a.dx, a.dy) {
                return Err(Error::SupportViolation {
                    region,
                    dx: a.dx,
                    dy: a.dy,
                });
            }
        }
        atoms.sort_by_key(|a| (a.dx, a.dy));
        if let Some(w) = atoms.windows(2).find(|w| (w[0].dx, w[0].dy) == (w[1].dx, w[1].dy)) {
            return Err(invalid(format!("duplicate atom ({}, {})", w[0].dx, w[0].dy)));
        }
        let total: f64 = atoms.iter().map(|a| a.p).sum();
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(invalid(format!("probabilities sum to {total}")));
        }
        Ok(JumpKernel { region, atoms })
    }

    /// Like [`JumpKernel::new`] but drops atoms with zero weight first.
    pub fn from_weights<I>(region: Region, atoms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (i64, i64, f64)>,
    {
        Self::new(region, atoms.into_iter().filter(|&(_, _, p)| p != 0.0))
    }

    pub fn region(&self) -> Region {
        self.region
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn weight(&self, dx: i64, dy: i64) -> f64 {
        self.atoms
            .iter()
            .find(|a| a.dx == dx && a.dy == dy)
            .map_or(0.0, |a| a.p)
    }

    pub fn mean(&self) -> [f64; 2] {
        self.atoms.iter().fold([0.0, 0.0], |acc, a| {
            [acc[0] + a.p * a.dx as f64, acc[1] + a.p * a.dy as f64]
        })
    }

    /// Largest positive increment in each coordinate (zero if none).
    pub fn max_jump(&self) -> (i64, i64) {
        self.atoms.iter().fold((0, 0), |(x, y), a| (x.max(a.dx), y.max(a.dy)))
    }

    pub fn mgf(&self) -> MgfSurface {
        MgfSurface::from_kernel(self)
    }

    /// The same kernel with the coordinates exchanged, tagged for the mirrored region.
    pub fn swapped(&self) -> JumpKernel {
        let region = match self.region {
            Region::Face1 => Region::Face2,
            Region::Face2 => Region::Face1,
            r => r,
        };
        JumpKernel::new(region, self.atoms.iter().map(|a| (a.dy, a.dx, a.p)))
            .expect("swapping coordinates preserves validity")
    }

    /// Mixture `w * self + (1 - w) * other` of two kernels of the same region.
    pub fn mix(&self, other: &JumpKernel, w: f64) -> Result<JumpKernel> {
        if self.region != other.region {
            return Err(Error::InvalidModel("cannot mix kernels of different regions".into()));
        }
        let mut merged: Vec<(i64, i64, f64)> = Vec::new();
        for (src, scale) in [(self, w), (other, 1.0 - w)] {
            for a in &src.atoms {
                match merged.iter_mut().find(|m| m.0 == a.dx && m.1 == a.dy) {
                    Some(m) => m.2 += scale * a.p,
                    None => merged.push((a.dx, a.dy, scale * a.p)),
                }
            }
        }
        JumpKernel::from_weights(self.region, merged)
    }

    /// Splits `mass` of the atom at `atom` evenly onto `atom - direction` and
    /// `atom + direction`.
    ///
    /// The result has the same mean and dominates the input in the linear
    /// convex order, so its moment generating function is pointwise larger.
    pub fn mean_preserving_spread(&self, atom: (i64, i64), direction: (i64, i64), mass: f64) -> Result<JumpKernel> {
        let (ax, ay) = atom;
        let (ux, uy) = direction;
        let current = self.weight(ax, ay);
        if current == 0.0 {
            return Err(Error::InvalidModel(format!("atom ({ax}, {ay}) is not in the support")));
        }
        if !(mass > 0.0) || mass > current + NORMALIZATION_TOL {
            return Err(Error::InvalidModel(format!(
                "cannot move mass {mass} from atom ({ax}, {ay}) of weight {current}"
            )));
        }
        if (ux, uy) == (0, 0) {
            return Err(Error::InvalidModel("spread direction must be non-zero".into()));
        }
        for (dx, dy) in [(ax - ux, ay - uy), (ax + ux, ay + uy)] {
            if !self.region.admits(dx, dy) {
                return Err(Error::SupportViolation {
                    region: self.region,
                    dx,
                    dy,
                });
            }
        }
        let mut weights: Vec<(i64, i64, f64)> = self.atoms.iter().map(|a| (a.dx, a.dy, a.p)).collect();
        let mut add = |dx: i64, dy: i64, w: f64| match weights.iter_mut().find(|e| e.0 == dx && e.1 == dy) {
            Some(e) => e.2 += w,
            None => weights.push((dx, dy, w)),
        };
        add(ax, ay, -mass);
        add(ax - ux, ay - uy, 0.5 * mass);
        add(ax + ux, ay + uy, 0.5 * mass);
        for e in &mut weights {
            if e.2.abs() <= NORMALIZATION_TOL {
                e.2 = 0.0;
            }
        }
        JumpKernel::from_weights(self.region, weights)
    }
}
