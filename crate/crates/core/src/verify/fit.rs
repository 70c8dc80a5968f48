use serde::{Deserialize, Serialize};

use super::truncated::TruncatedChain;
use crate::error::{Error, Result};

pub const MIN_R_SQUARED: f64 = 0.99;
/// Fewer window points than this is treated as a noisy window regardless of `r²`.
pub const MIN_POINTS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum FitMode {
    /// `P(L_k >= n, L_{3-k} = fixed)`.
    Coordinate { k: usize, fixed: usize },
    /// `P(<c, L> >= x)` for a unit direction `c`; `delta` is the lattice spacing of `<c, n>`.
    Direction { c: [f64; 2], delta: Option<f64> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FitModel {
    /// `log P = a + s x`.
    Linear,
    /// `log P = a + s x + q log x`, absorbing a polynomial prefactor.
    PowerLaw,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    /// Window as fractions of `N`.
    pub window: [f64; 2],
    pub model: FitModel,
    /// Direction mode: largest share of a tail set allowed in the outer band `n_k > window[1] N`.
    pub edge_fraction: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            window: [0.2, 0.7],
            model: FitModel::PowerLaw,
            edge_fraction: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub mode: FitMode,
    pub model: FitModel,
    pub window: [f64; 2],
    pub points: usize,
    pub slope: f64,
    pub intercept: f64,
    /// Coefficient of `log x` for [`FitModel::PowerLaw`].
    pub log_power: Option<f64>,
    pub r_squared: f64,
    pub std_error: f64,
}

impl SlopeFit {
    /// `|slope + rate| / rate`.
    pub fn relative_error(&self, rate: f64) -> f64 {
        (self.slope + rate).abs() / rate
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Regression {
    pub slope: f64,
    pub intercept: f64,
    pub log_power: Option<f64>,
    pub r_squared: f64,
    pub std_error: f64,
}

/// Least squares of `y` on `x` (and `log x` for the power-law model).
///
/// Returns `None` with fewer than `p + 2` points or a singular design.
pub fn regress(x: &[f64], y: &[f64], model: FitModel) -> Option<Regression> {
    let n = x.len();
    let cols: Vec<Vec<f64>> = match model {
        FitModel::Linear => vec![x.to_vec()],
        FitModel::PowerLaw => vec![x.to_vec(), x.iter().map(|v| v.ln()).collect()],
    };
    let p = cols.len();
    if n < p + 2 {
        return None;
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / n as f64;
    let ym = mean(y);
    let means: Vec<f64> = cols.iter().map(|c| mean(c)).collect();
    let centered: Vec<Vec<f64>> = cols
        .iter()
        .zip(&means)
        .map(|(c, m)| c.iter().map(|v| v - m).collect())
        .collect();
    let yc: Vec<f64> = y.iter().map(|v| v - ym).collect();
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(u, v)| u * v).sum::<f64>();
    let mut xtx = vec![vec![0.0; p]; p];
    let mut xty = vec![0.0; p];
    for a in 0..p {
        for b in 0..p {
            xtx[a][b] = dot(&centered[a], &centered[b]);
        }
        xty[a] = dot(&centered[a], &yc);
    }
    let inv = invert(&xtx)?;
    let beta: Vec<f64> = (0..p).map(|a| (0..p).map(|b| inv[a][b] * xty[b]).sum()).collect();
    let intercept = ym - beta.iter().zip(&means).map(|(b, m)| b * m).sum::<f64>();
    let rss: f64 = (0..n)
        .map(|i| {
            let fit: f64 = (0..p).map(|a| beta[a] * centered[a][i]).sum();
            (yc[i] - fit).powi(2)
        })
        .sum();
    let tss = dot(&yc, &yc);
    let r_squared = if tss > 0.0 { 1.0 - rss / tss } else { 1.0 };
    let sigma2 = rss / (n - p - 1) as f64;
    Some(Regression {
        slope: beta[0],
        intercept,
        log_power: (p == 2).then(|| beta[1]),
        r_squared,
        std_error: (sigma2 * inv[0][0]).max(0.0).sqrt(),
    })
}

fn invert(m: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    match m.len() {
        1 => (m[0][0].abs() > 0.0).then(|| vec![vec![1.0 / m[0][0]]]),
        2 => {
            let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
            if !(det.abs() > 1e-14 * (m[0][0] * m[1][1]).abs()) {
                return None;
            }
            Some(vec![
                vec![m[1][1] / det, -m[0][1] / det],
                vec![-m[1][0] / det, m[0][0] / det],
            ])
        }
        _ => unreachable!(),
    }
}

/// Fits `log tail` against `x`, rejecting short or poorly explained windows.
pub fn fit_tail(mode: FitMode, x: &[f64], tail: &[f64], model: FitModel) -> Result<SlopeFit> {
    let (xs, ys): (Vec<f64>, Vec<f64>) = x
        .iter()
        .zip(tail)
        .filter(|(_, &t)| t > 0.0 && t.is_finite())
        .map(|(&x, &t)| (x, t.ln()))
        .unzip();
    let window = [
        xs.first().copied().unwrap_or(f64::NAN),
        xs.last().copied().unwrap_or(f64::NAN),
    ];
    let reg = regress(&xs, &ys, model).ok_or(Error::WindowTooNoisy { r_squared: f64::NAN })?;
    if xs.len() < MIN_POINTS || !(reg.r_squared >= MIN_R_SQUARED) {
        return Err(Error::WindowTooNoisy {
            r_squared: reg.r_squared,
        });
    }
    Ok(SlopeFit {
        mode,
        model,
        window,
        points: xs.len(),
        slope: reg.slope,
        intercept: reg.intercept,
        log_power: reg.log_power,
        r_squared: reg.r_squared,
        std_error: reg.std_error,
    })
}

/// Decay slope of a truncated-chain tail.
pub fn fit_decay(chain: &TruncatedChain, mode: FitMode) -> Result<SlopeFit> {
    fit_decay_with(chain, mode, &FitOptions::default())
}

pub fn fit_decay_with(chain: &TruncatedChain, mode: FitMode, opts: &FitOptions) -> Result<SlopeFit> {
    let (x, tail) = match mode {
        FitMode::Coordinate { k, fixed } => coordinate_points(chain, k, fixed, opts),
        FitMode::Direction { c, delta } => direction_points(chain, c, delta, opts),
    };
    fit_tail(mode, &x, &tail, opts.model)
}

fn coordinate_points(chain: &TruncatedChain, k: usize, fixed: usize, opts: &FitOptions) -> (Vec<f64>, Vec<f64>) {
    let n = chain.n as f64;
    let lo = (opts.window[0] * n).ceil().max(1.0) as usize;
    let hi = (opts.window[1] * n).floor() as usize;
    let tail = chain.coordinate_tail(k, fixed.min(chain.n));
    (lo..=hi.min(chain.n)).map(|m| (m as f64, tail[m])).unzip()
}

/// Tail sets `{<c, n> >= x}` on an x-grid whose upper end keeps the outer band of
/// the grid below `edge_fraction` of each set's mass.
fn direction_points(
    chain: &TruncatedChain,
    c: [f64; 2],
    delta: Option<f64>,
    opts: &FitOptions,
) -> (Vec<f64>, Vec<f64>) {
    let side = chain.side();
    let band = (opts.window[1] * chain.n as f64).floor() as usize;
    // (projection, mass, in outer band), sorted by decreasing projection.
    let mut pts: Vec<(f64, f64, bool)> = Vec::with_capacity(side * side);
    for j in 0..side {
        for i in 0..side {
            pts.push((
                c[0] * i as f64 + c[1] * j as f64,
                chain.prob(i, j),
                i > band || j > band,
            ));
        }
    }
    pts.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut cum = Vec::with_capacity(pts.len());
    let (mut total, mut edge) = (0.0, 0.0);
    for &(_, p, e) in &pts {
        total += p;
        if e {
            edge += p;
        }
        cum.push((total, edge));
    }
    let at = |x: f64| -> (f64, f64) {
        let tol = 1e-9 * (1.0 + x.abs());
        let idx = pts.partition_point(|q| q.0 >= x - tol);
        if idx == 0 {
            (0.0, 0.0)
        } else {
            cum[idx - 1]
        }
    };
    let x_max = pts[0].0;
    let step = delta.unwrap_or(x_max / 400.0);
    let mut x_hi = 0.0;
    let mut m = 1usize;
    loop {
        let x = m as f64 * step;
        if x > x_max {
            break;
        }
        let (t, e) = at(x);
        if t <= 0.0 || e > opts.edge_fraction * t {
            break;
        }
        x_hi = x;
        m += 1;
    }
    let x_lo = x_hi * opts.window[0] / opts.window[1];
    let first = (x_lo / step).ceil().max(1.0) as usize;
    let last = (x_hi / step).round() as usize;
    (first..=last)
        .map(|m| {
            let x = m as f64 * step;
            (x, at(x).0)
        })
        .unzip()
}
