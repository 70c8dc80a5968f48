use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ModelSpec, Region};

/// Residual `||ν P - ν||_1` accepted from either solver.
pub const RESIDUAL_TOL: f64 = 1e-10;
pub const POWER_MAX_ITER: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OverflowPolicy {
    /// Jumps leaving the grid land on the nearest grid point.
    ClampToEdge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Solver {
    /// Banded Grassmann–Taksar–Heyman elimination; exact up to rounding and
    /// accurate in relative terms even for tiny tail probabilities.
    Gth,
    /// Power iteration with periodic Aitken extrapolation.
    Power,
}

/// Stationary distribution of the walk clamped to `{0..N}^2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncatedChain {
    pub n: usize,
    /// Indexed by `j * (n + 1) + i` for state `(i, j)`.
    pub stationary: Vec<f64>,
    pub overflow_policy: OverflowPolicy,
    pub solver: Solver,
    pub residual: f64,
    pub iterations: usize,
}

struct Transitions {
    side: usize,
    /// Per state: `(target, probability)`.
    rows: Vec<Vec<(usize, f64)>>,
}

impl Transitions {
    fn build(model: &ModelSpec, n: usize) -> Transitions {
        let side = n + 1;
        let mut rows = Vec::with_capacity(side * side);
        for j in 0..side {
            for i in 0..side {
                let mut row: Vec<(usize, f64)> = Vec::new();
                for a in model.kernel(Region::of_state(i, j)).atoms() {
                    let ti = (i as i64 + a.dx).clamp(0, n as i64) as usize;
                    let tj = (j as i64 + a.dy).clamp(0, n as i64) as usize;
                    let t = tj * side + ti;
                    match row.iter_mut().find(|e| e.0 == t) {
                        Some(e) => e.1 += a.p,
                        None => row.push((t, a.p)),
                    }
                }
                rows.push(row);
            }
        }
        Transitions { side, rows }
    }

    fn len(&self) -> usize {
        self.side * self.side
    }

    /// `(lower, upper)` bandwidths: `P[i][j] != 0` only for `i - lower <= j <= i + upper`.
    fn bandwidths(&self) -> (usize, usize) {
        let mut lower = 0;
        let mut upper = 0;
        for (s, row) in self.rows.iter().enumerate() {
            for &(t, _) in row {
                if t < s {
                    lower = lower.max(s - t);
                } else {
                    upper = upper.max(t - s);
                }
            }
        }
        (lower, upper)
    }

    fn apply(&self, v: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|x| *x = 0.0);
        for (s, row) in self.rows.iter().enumerate() {
            let w = v[s];
            if w != 0.0 {
                for &(t, p) in row {
                    out[t] += w * p;
                }
            }
        }
    }

    fn residual(&self, v: &[f64]) -> f64 {
        let mut out = vec![0.0; v.len()];
        self.apply(v, &mut out);
        out.iter().zip(v).map(|(a, b)| (a - b).abs()).sum()
    }
}

/// Row-major band storage: row `i` holds columns `i - lower ..= i + upper`.
struct Band {
    lower: usize,
    width: usize,
    data: Vec<f64>,
}

impl Band {
    fn new(n: usize, lower: usize, upper: usize) -> Band {
        let width = lower + upper + 1;
        Band {
            lower,
            width,
            data: vec![0.0; n * width],
        }
    }

    #[inline]
    fn pos(&self, i: usize, j: usize) -> usize {
        i * self.width + (j + self.lower - i)
    }

    #[inline]
    fn get(&self, i: usize, j: usize) -> f64 {
        self.data[self.pos(i, j)]
    }
}

fn solve_gth(tr: &Transitions) -> Vec<f64> {
    let n = tr.len();
    let (lower, upper) = tr.bandwidths();
    let mut a = Band::new(n, lower, upper);
    for (s, row) in tr.rows.iter().enumerate() {
        for &(t, p) in row {
            if t != s {
                let k = a.pos(s, t);
                a.data[k] += p;
            }
        }
    }
    let mut pivots = vec![0.0; n];
    for k in (1..n).rev() {
        let j_lo = k.saturating_sub(lower);
        let i_lo = k.saturating_sub(upper);
        let s: f64 = (j_lo..k).map(|j| a.get(k, j)).sum();
        pivots[k] = s;
        if s <= 0.0 {
            continue;
        }
        let row_k: Vec<f64> = (j_lo..k).map(|j| a.get(k, j) / s).collect();
        for i in i_lo..k {
            let f = a.get(i, k);
            if f == 0.0 {
                continue;
            }
            let base = a.pos(i, j_lo);
            for (off, &r) in row_k.iter().enumerate() {
                a.data[base + off] += f * r;
            }
        }
    }
    let mut pi = vec![0.0; n];
    pi[0] = 1.0;
    for k in 1..n {
        if pivots[k] <= 0.0 {
            continue;
        }
        let i_lo = k.saturating_sub(upper);
        let acc: f64 = (i_lo..k).map(|i| pi[i] * a.get(i, k)).sum();
        pi[k] = acc / pivots[k];
    }
    let total: f64 = pi.iter().sum();
    pi.iter_mut().for_each(|x| *x /= total);
    pi
}

fn solve_power(tr: &Transitions) -> Result<(Vec<f64>, usize)> {
    let n = tr.len();
    let mut x = vec![1.0 / n as f64; n];
    let mut next = vec![0.0; n];
    let mut history: Vec<Vec<f64>> = Vec::new();
    for it in 1..=POWER_MAX_ITER {
        tr.apply(&x, &mut next);
        std::mem::swap(&mut x, &mut next);
        if it % 50 == 0 {
            let r = tr.residual(&x);
            if r < RESIDUAL_TOL {
                return Ok((x, it));
            }
            history.push(x.clone());
            if history.len() == 3 {
                let (x0, x1, x2) = (&history[0], &history[1], &history[2]);
                let mut cand: Vec<f64> = (0..n)
                    .map(|s| {
                        let d = x2[s] - 2.0 * x1[s] + x0[s];
                        if d.abs() > 1e-300 {
                            (x2[s] - (x2[s] - x1[s]).powi(2) / d).max(0.0)
                        } else {
                            x2[s]
                        }
                    })
                    .collect();
                let total: f64 = cand.iter().sum();
                cand.iter_mut().for_each(|v| *v /= total);
                if tr.residual(&cand) < r {
                    x = cand;
                }
                history.clear();
            }
        }
    }
    Err(Error::NonConvergence {
        iterations: POWER_MAX_ITER,
        detail: format!("power iteration residual {}", tr.residual(&x)),
    })
}

impl TruncatedChain {
    pub fn side(&self) -> usize {
        self.n + 1
    }

    pub fn prob(&self, i: usize, j: usize) -> f64 {
        self.stationary[j * self.side() + i]
    }

    /// `P(L_k >= m, L_{3-k} = i)` for `m = 0..=N`.
    pub fn coordinate_tail(&self, k: usize, fixed: usize) -> Vec<f64> {
        let side = self.side();
        let mut tail = vec![0.0; side];
        let mut acc = 0.0;
        for m in (0..side).rev() {
            acc += if k == 1 {
                self.prob(m, fixed)
            } else {
                self.prob(fixed, m)
            };
            tail[m] = acc;
        }
        tail
    }

    /// `P(L_k >= m)` for `m = 0..=N`.
    pub fn marginal_tail(&self, k: usize) -> Vec<f64> {
        let side = self.side();
        let mut mass = vec![0.0; side];
        for j in 0..side {
            for i in 0..side {
                mass[if k == 1 { i } else { j }] += self.prob(i, j);
            }
        }
        let mut acc = 0.0;
        for m in (0..side).rev() {
            acc += mass[m];
            mass[m] = acc;
        }
        mass
    }
}

/// Stationary distribution of the clamped chain on `{0..n}^2`.
pub fn solve_truncated(model: &ModelSpec, n: usize) -> Result<TruncatedChain> {
    solve_truncated_with(model, n, Solver::Gth)
}

pub fn solve_truncated_with(model: &ModelSpec, n: usize, solver: Solver) -> Result<TruncatedChain> {
    if n < 2 {
        return Err(Error::InvalidModel(format!("truncation level {n} is too small")));
    }
    let tr = Transitions::build(model, n);
    let (stationary, iterations) = match solver {
        Solver::Gth => (solve_gth(&tr), 0),
        Solver::Power => solve_power(&tr)?,
    };
    let residual = tr.residual(&stationary);
    if !(residual < RESIDUAL_TOL) {
        return Err(Error::Numeric(format!(
            "stationary residual {residual} exceeds {RESIDUAL_TOL}"
        )));
    }
    Ok(TruncatedChain {
        n,
        stationary,
        overflow_policy: OverflowPolicy::ClampToEdge,
        solver,
        residual,
        iterations,
    })
}
