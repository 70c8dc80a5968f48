//! One-dimensional sections of moment generating functions.
//!
//! Along any line a finite-support MGF restricts to `f(s) = sum_j c_j exp(r_j s)`
//! with `c_j > 0`. Such a function is convex and its behaviour at `±inf` is read
//! off the extreme rates, which lets every bracket below be found without
//! guessing. Minimizers are located by bisection on the (monotone) derivative
//! and level crossings by plain bisection, both run to adjacent floats.

const MAX_BISECTIONS: usize = 400;
const MAX_DOUBLINGS: usize = 80;

/// A point on the extended real line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Extended {
    NegInf,
    Finite(f64),
    PosInf,
}

impl Extended {
    pub fn finite(self) -> Option<f64> {
        match self {
            Extended::Finite(x) => Some(x),
            _ => None,
        }
    }

    pub fn as_f64(self) -> f64 {
        match self {
            Extended::NegInf => f64::NEG_INFINITY,
            Extended::Finite(x) => x,
            Extended::PosInf => f64::INFINITY,
        }
    }
}

/// Infimum of a section and where it is attained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum {
    pub arg: Extended,
    pub value: f64,
}

/// `s -> sum_j c_j exp(r_j s)` with positive coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpSum {
    // (rate, coefficient), sorted by rate, rates distinct.
    terms: Vec<(f64, f64)>,
}

impl ExpSum {
    pub fn new<I: IntoIterator<Item = (f64, f64)>>(terms: I) -> Self {
        let mut v: Vec<(f64, f64)> = terms
            .into_iter()
            .filter(|t| t.1 > 0.0)
            .map(|(r, c)| (if r.abs() < 1e-14 { 0.0 } else { r }, c))
            .collect();
        v.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(v.len());
        for (r, c) in v {
            match merged.last_mut() {
                Some(last) if (last.0 - r).abs() <= 1e-14 * r.abs().max(1.0) => last.1 += c,
                _ => merged.push((r, c)),
            }
        }
        ExpSum { terms: merged }
    }

    pub fn value(&self, s: f64) -> f64 {
        self.terms.iter().map(|&(r, c)| c * (r * s).exp()).sum()
    }

    pub fn derivative(&self, s: f64) -> f64 {
        self.terms.iter().map(|&(r, c)| c * r * (r * s).exp()).sum()
    }

    fn min_rate(&self) -> f64 {
        self.terms.first().map_or(0.0, |t| t.0)
    }

    fn max_rate(&self) -> f64 {
        self.terms.last().map_or(0.0, |t| t.0)
    }

    fn zero_rate_mass(&self) -> f64 {
        self.terms.iter().filter(|t| t.0 == 0.0).map(|t| t.1).sum()
    }

    /// Limit of `f(s)` as `s -> +inf`.
    pub fn limit_pos(&self) -> f64 {
        if self.max_rate() > 0.0 {
            f64::INFINITY
        } else {
            self.zero_rate_mass()
        }
    }

    /// Limit of `f(s)` as `s -> -inf`.
    pub fn limit_neg(&self) -> f64 {
        if self.min_rate() < 0.0 {
            f64::INFINITY
        } else {
            self.zero_rate_mass()
        }
    }

    pub fn minimize(&self) -> Minimum {
        let (lo_rate, hi_rate) = (self.min_rate(), self.max_rate());
        if lo_rate >= 0.0 && hi_rate <= 0.0 {
            return Minimum {
                arg: Extended::Finite(0.0),
                value: self.value(0.0),
            };
        }
        if lo_rate >= 0.0 {
            return Minimum {
                arg: Extended::NegInf,
                value: self.limit_neg(),
            };
        }
        if hi_rate <= 0.0 {
            return Minimum {
                arg: Extended::PosInf,
                value: self.limit_pos(),
            };
        }
        let d = |s: f64| self.derivative(s);
        let (mut lo, mut hi) = (0.0, 0.0);
        let mut step = 1.0;
        if d(0.0) < 0.0 {
            for _ in 0..MAX_DOUBLINGS {
                hi = lo + step;
                if d(hi) >= 0.0 {
                    break;
                }
                lo = hi;
                step *= 2.0;
            }
        } else {
            for _ in 0..MAX_DOUBLINGS {
                lo = hi - step;
                if d(lo) <= 0.0 {
                    break;
                }
                hi = lo;
                step *= 2.0;
            }
        }
        for _ in 0..MAX_BISECTIONS {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if d(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let arg = if self.value(lo) <= self.value(hi) { lo } else { hi };
        Minimum {
            arg: Extended::Finite(arg),
            value: self.value(arg),
        }
    }

    /// Endpoints of `{s : f(s) < level}`, or `None` when that set is empty.
    ///
    /// Finite endpoints satisfy `f = level` to rounding.
    pub fn sublevel(&self, level: f64) -> Option<(Extended, Extended)> {
        let m = self.minimize();
        if !(m.value < level) {
            return None;
        }
        let start = match m.arg {
            Extended::Finite(x) => x,
            // The infimum sits at infinity: pick any point already below the level.
            Extended::NegInf => self.walk_below(level, -1.0)?,
            Extended::PosInf => self.walk_below(level, 1.0)?,
        };
        // A convex function with a finite limit is monotone towards it, so a
        // finite limit on a side means the sublevel set is unbounded there.
        let hi = if self.limit_pos().is_finite() {
            Extended::PosInf
        } else {
            Extended::Finite(self.crossing(level, start, 1.0))
        };
        let lo = if self.limit_neg().is_finite() {
            Extended::NegInf
        } else {
            Extended::Finite(self.crossing(level, start, -1.0))
        };
        Some((lo, hi))
    }

    fn walk_below(&self, level: f64, sign: f64) -> Option<f64> {
        let mut s = 0.0;
        let mut step = 1.0;
        for _ in 0..MAX_DOUBLINGS {
            if self.value(s) < level {
                return Some(s);
            }
            s += sign * step;
            step *= 2.0;
        }
        None
    }

    /// Crossing of `level` on the side `sign` of `start`, where `f(start) < level`
    /// and `f` eventually exceeds `level` on that side.
    fn crossing(&self, level: f64, start: f64, sign: f64) -> f64 {
        let mut inside = start;
        let mut step = 1.0;
        let mut outside = start + sign * step;
        for _ in 0..MAX_DOUBLINGS {
            if self.value(outside) >= level {
                break;
            }
            inside = outside;
            step *= 2.0;
            outside = start + sign * step;
        }
        for _ in 0..MAX_BISECTIONS {
            let mid = 0.5 * (inside + outside);
            if mid == inside || mid == outside {
                break;
            }
            if self.value(mid) < level {
                inside = mid;
            } else {
                outside = mid;
            }
        }
        if (self.value(inside) - level).abs() <= (self.value(outside) - level).abs() {
            inside
        } else {
            outside
        }
    }
}

/// Bisection for a sign change of `f` on `[lo, hi]`; stops at adjacent floats.
pub(crate) fn bisect_sign<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = f(lo);
    if flo == 0.0 {
        return lo;
    }
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    let fhi = f(hi);
    if flo.abs() <= fhi.abs() {
        lo
    } else {
        hi
    }
}

/// Maximizer of a concave function on `[lo, hi]` by golden-section search.
pub(crate) fn golden_max<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut a = hi - INV_PHI * (hi - lo);
    let mut b = lo + INV_PHI * (hi - lo);
    let (mut fa, mut fb) = (f(a), f(b));
    for _ in 0..MAX_BISECTIONS {
        if hi - lo <= tol {
            break;
        }
        if fa < fb {
            lo = a;
            a = b;
            fa = fb;
            b = lo + INV_PHI * (hi - lo);
            fb = f(b);
        } else {
            hi = b;
            b = a;
            fb = fa;
            a = hi - INV_PHI * (hi - lo);
            fa = f(a);
        }
    }
    0.5 * (lo + hi)
}
