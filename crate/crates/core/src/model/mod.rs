//! Double M/G/1-type processes: a reflecting random walk on the quarter plane that
//! is skip free towards the boundary.
//!
//! A [`ModelSpec`] holds the four one-step jump kernels (interior, the two
//! boundary faces, and the origin). Each kernel exposes its moment generating
//! function as an [`MgfSurface`].

mod conditions;
mod kernel;
mod mgf;

use std::path::Path;

use serde::{Deserialize, Serialize};

pub use conditions::{
    check_conditions, walk_structure, Condition, ConditionReport, WalkStructure, DRIFT_TOL, REACHABILITY_CORE,
    REACHABILITY_GRID,
};
pub use kernel::{Atom, JumpKernel, Region, NORMALIZATION_TOL};
pub use mgf::MgfSurface;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    interior: JumpKernel,
    face1: JumpKernel,
    face2: JumpKernel,
    origin: JumpKernel,
}

impl ModelSpec {
    pub fn new(interior: JumpKernel, face1: JumpKernel, face2: JumpKernel, origin: JumpKernel) -> Result<Self> {
        let expected = [
            (&interior, Region::Interior),
            (&face1, Region::Face1),
            (&face2, Region::Face2),
            (&origin, Region::Origin),
        ];
        for (k, region) in expected {
            if k.region() != region {
                return Err(Error::InvalidModel(format!(
                    "kernel tagged {:?} supplied for the {:?} slot",
                    k.region(),
                    region
                )));
            }
        }
        Ok(ModelSpec {
            interior,
            face1,
            face2,
            origin,
        })
    }

    pub fn interior(&self) -> &JumpKernel {
        &self.interior
    }

    pub fn face1(&self) -> &JumpKernel {
        &self.face1
    }

    pub fn face2(&self) -> &JumpKernel {
        &self.face2
    }

    pub fn origin(&self) -> &JumpKernel {
        &self.origin
    }

    pub fn kernel(&self, region: Region) -> &JumpKernel {
        match region {
            Region::Interior => &self.interior,
            Region::Face1 => &self.face1,
            Region::Face2 => &self.face2,
            Region::Origin => &self.origin,
        }
    }

    /// Replaces the kernel of the matching region.
    pub fn with_kernel(&self, kernel: JumpKernel) -> ModelSpec {
        let mut out = self.clone();
        match kernel.region() {
            Region::Interior => out.interior = kernel,
            Region::Face1 => out.face1 = kernel,
            Region::Face2 => out.face2 = kernel,
            Region::Origin => out.origin = kernel,
        }
        out
    }

    /// Interior, face-1 and face-2 MGFs, in that order.
    pub fn surfaces(&self) -> Surfaces {
        Surfaces {
            gamma: self.interior.mgf(),
            gamma1: self.face1.mgf(),
            gamma2: self.face2.mgf(),
        }
    }

    /// The model with the two coordinates exchanged.
    pub fn swapped(&self) -> ModelSpec {
        ModelSpec {
            interior: self.interior.swapped(),
            face1: self.face2.swapped(),
            face2: self.face1.swapped(),
            origin: self.origin.swapped(),
        }
    }

    /// Largest upward jump in each coordinate over all four kernels.
    pub fn max_jump(&self) -> (i64, i64) {
        [&self.interior, &self.face1, &self.face2, &self.origin]
            .iter()
            .map(|k| k.max_jump())
            .fold((0, 0), |(x, y), (a, b)| (x.max(a), y.max(b)))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ModelFile = serde_json::from_str(text)?;
        file.into_model()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_file(&self) -> ModelFile {
        let dump = |k: &JumpKernel| k.atoms().iter().map(|a| (a.dx, a.dy, a.p)).collect();
        ModelFile {
            interior: dump(&self.interior),
            face1: dump(&self.face1),
            face2: dump(&self.face2),
            origin: dump(&self.origin),
        }
    }
}

/// The three MGFs that shape the tail: `gamma` (interior), `gamma1`, `gamma2` (faces).
#[derive(Debug, Clone, PartialEq)]
pub struct Surfaces {
    pub gamma: MgfSurface,
    pub gamma1: MgfSurface,
    pub gamma2: MgfSurface,
}

impl Surfaces {
    /// Face MGF for axis index 0 (face 1) or 1 (face 2).
    pub fn face(&self, axis: usize) -> &MgfSurface {
        if axis == 0 {
            &self.gamma1
        } else {
            &self.gamma2
        }
    }
}

/// On-disk model: each kernel is a list of `[dx, dy, p]` triples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub interior: Vec<(i64, i64, f64)>,
    pub face1: Vec<(i64, i64, f64)>,
    pub face2: Vec<(i64, i64, f64)>,
    pub origin: Vec<(i64, i64, f64)>,
}

impl ModelFile {
    pub fn into_model(self) -> Result<ModelSpec> {
        ModelSpec::new(
            JumpKernel::new(Region::Interior, self.interior)?,
            JumpKernel::new(Region::Face1, self.face1)?,
            JumpKernel::new(Region::Face2, self.face2)?,
            JumpKernel::new(Region::Origin, self.origin)?,
        )
    }
}

/// Mean drifts in the interior and on the two faces, with the face normals
/// used by the stability conditions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriftVectors {
    pub m: [f64; 2],
    pub m1: [f64; 2],
    pub m2: [f64; 2],
    /// `(m1[1], -m1[0])`
    pub m1_perp: [f64; 2],
    /// `(-m2[1], m2[0])`
    pub m2_perp: [f64; 2],
}

impl DriftVectors {
    pub fn from_means(m: [f64; 2], m1: [f64; 2], m2: [f64; 2]) -> Self {
        DriftVectors {
            m,
            m1,
            m2,
            m1_perp: [m1[1], -m1[0]],
            m2_perp: [-m2[1], m2[0]],
        }
    }

    /// `<m, m1_perp>`
    pub fn inner1(&self) -> f64 {
        self.m[0] * self.m1_perp[0] + self.m[1] * self.m1_perp[1]
    }

    /// `<m, m2_perp>`
    pub fn inner2(&self) -> f64 {
        self.m[0] * self.m2_perp[0] + self.m[1] * self.m2_perp[1]
    }
}

pub fn drift_vectors(model: &ModelSpec) -> DriftVectors {
    DriftVectors::from_means(model.interior.mean(), model.face1.mean(), model.face2.mean())
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    /// Uniformized Jackson tandem: arrivals 0.2 at node 1, services 0.5 and 0.3,
    /// routing 1 -> 2 with probability 0.5, no feedback.
    pub fn e1() -> ModelSpec {
        ModelSpec::new(
            JumpKernel::new(
                Region::Interior,
                [(1, 0, 0.2), (-1, 0, 0.25), (-1, 1, 0.25), (0, -1, 0.3)],
            )
            .unwrap(),
            JumpKernel::new(Region::Face1, [(1, 0, 0.2), (-1, 0, 0.25), (-1, 1, 0.25), (0, 0, 0.3)]).unwrap(),
            JumpKernel::new(Region::Face2, [(1, 0, 0.2), (0, 0, 0.5), (0, -1, 0.3)]).unwrap(),
            JumpKernel::new(Region::Origin, [(1, 0, 0.2), (0, 0, 0.8)]).unwrap(),
        )
        .unwrap()
    }

    pub fn symmetric_zero_drift() -> ModelSpec {
        ModelSpec::new(
            JumpKernel::new(
                Region::Interior,
                [(1, 0, 0.25), (-1, 0, 0.25), (0, 1, 0.25), (0, -1, 0.25)],
            )
            .unwrap(),
            JumpKernel::new(Region::Face1, [(1, 0, 0.25), (-1, 0, 0.25), (0, 1, 0.25), (0, 0, 0.25)]).unwrap(),
            JumpKernel::new(Region::Face2, [(1, 0, 0.25), (0, 0, 0.25), (0, 1, 0.25), (0, -1, 0.25)]).unwrap(),
            JumpKernel::new(Region::Origin, [(1, 0, 0.25), (0, 1, 0.25), (0, 0, 0.5)]).unwrap(),
        )
        .unwrap()
    }
}
