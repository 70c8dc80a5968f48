use crate::model::{JumpKernel, Region};
use crate::section::ExpSum;

/// Moment generating function `theta -> E exp(<theta, X>)` of a finite-support
/// jump distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct MgfSurface {
    region: Region,
    // (dx, dy, p)
    terms: Vec<(f64, f64, f64)>,
}

impl MgfSurface {
    pub fn from_kernel(kernel: &JumpKernel) -> Self {
        MgfSurface {
            region: kernel.region(),
            terms: kernel.atoms().iter().map(|a| (a.dx as f64, a.dy as f64, a.p)).collect(),
        }
    }

    /// Region tag of the kernel this surface was built from.
    pub fn region(&self) -> Region {
        self.region
    }

    pub fn value(&self, theta: [f64; 2]) -> f64 {
        self.terms
            .iter()
            .map(|&(dx, dy, p)| p * (theta[0] * dx + theta[1] * dy).exp())
            .sum()
    }

    pub fn gradient(&self, theta: [f64; 2]) -> [f64; 2] {
        self.terms.iter().fold([0.0, 0.0], |g, &(dx, dy, p)| {
            let w = p * (theta[0] * dx + theta[1] * dy).exp();
            [g[0] + w * dx, g[1] + w * dy]
        })
    }

    /// Restriction to the line `base + s * dir`, as a function of `s`.
    pub fn section(&self, base: [f64; 2], dir: [f64; 2]) -> ExpSum {
        ExpSum::new(
            self.terms
                .iter()
                .map(|&(dx, dy, p)| (dir[0] * dx + dir[1] * dy, p * (base[0] * dx + base[1] * dy).exp())),
        )
    }

    /// Section along coordinate `axis` (0 or 1) with the other coordinate fixed.
    pub fn axis_section(&self, axis: usize, other_value: f64) -> ExpSum {
        let mut base = [0.0; 2];
        base[1 - axis] = other_value;
        let mut dir = [0.0; 2];
        dir[axis] = 1.0;
        self.section(base, dir)
    }
}
