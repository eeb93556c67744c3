//! Adaptive Gauss–Kronrod (7/15) quadrature.

use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_evaluations: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            abs: 0.0,
            rel: 1e-10,
            max_evaluations: 200_000,
        }
    }
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for i in 0..7 {
        let dx = h * XGK[i];
        let s = f(c - dx) + f(c + dx);
        k += WGK[i] * s;
        if i % 2 == 1 {
            g += WG[i / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Integrate `f` over each `[edges[i], edges[i+1]]` with a shared error budget.
fn adaptive<F: Fn(f64) -> f64>(f: &F, edges: &[f64], tol: Tolerance) -> Result<Integral> {
    let mut heap = BinaryHeap::new();
    let mut evaluations = 0;
    for w in edges.windows(2) {
        if w[1] > w[0] {
            let (value, error) = kronrod(f, w[0], w[1]);
            evaluations += 15;
            heap.push(Segment {
                a: w[0],
                b: w[1],
                value,
                error,
            });
        }
    }
    loop {
        let value: f64 = heap.iter().map(|s| s.value).sum();
        let error: f64 = heap.iter().map(|s| s.error).sum();
        if !value.is_finite() {
            return Err(Error::Numerical("non-finite integrand".into()));
        }
        if error <= tol.abs.max(tol.rel * value.abs()) {
            return Ok(Integral {
                value,
                error,
                evaluations,
            });
        }
        if evaluations >= tol.max_evaluations {
            return Err(Error::NoConvergence(evaluations));
        }
        let Some(worst) = heap.pop() else {
            return Ok(Integral {
                value,
                error,
                evaluations,
            });
        };
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            // Interval cannot be split further in floating point.
            heap.push(Segment { error: 0.0, ..worst });
            continue;
        }
        for (a, b) in [(worst.a, mid), (mid, worst.b)] {
            let (value, error) = kronrod(f, a, b);
            heap.push(Segment { a, b, value, error });
        }
        evaluations += 30;
    }
}

/// Integrate over the finite interval `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<Integral> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::param("interval", "bounds must be finite"));
    }
    if b < a {
        let r = adaptive(&f, &[b, a], tol)?;
        return Ok(Integral { value: -r.value, ..r });
    }
    adaptive(&f, &[a, b], tol)
}

/// Integrate over the whole real line.
///
/// `breakpoints` mark features (peaks) that the subdivision should start
/// from; `scale` sets the width over which each tail is compressed by the map
/// `x = edge ± scale * t / (1 - t)`.
pub fn integrate_real_line<F: Fn(f64) -> f64>(
    f: F,
    breakpoints: &[f64],
    scale: f64,
    tol: Tolerance,
) -> Result<Integral> {
    if !(scale > 0.0) {
        return Err(Error::param("scale", "must be positive"));
    }
    let mut pts: Vec<f64> = breakpoints.iter().copied().filter(|x| x.is_finite()).collect();
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    if pts.is_empty() {
        pts.push(0.0);
    }
    let lo = pts[0];
    let hi = pts[pts.len() - 1];
    // Map the real line onto u in (-1, 1 + n): tails occupy (-1, 0) and (n, n+1).
    let n = (pts.len() - 1) as f64;
    let mapped = |u: f64| -> f64 {
        if u < 0.0 {
            let t = -u;
            if t >= 1.0 {
                return 0.0;
            }
            let x = lo - scale * t / (1.0 - t);
            f(x) * scale / ((1.0 - t) * (1.0 - t))
        } else if u > n {
            let t = u - n;
            if t >= 1.0 {
                return 0.0;
            }
            let x = hi + scale * t / (1.0 - t);
            f(x) * scale / ((1.0 - t) * (1.0 - t))
        } else {
            let i = (u.floor() as usize).min(pts.len().saturating_sub(2));
            if pts.len() == 1 {
                return 0.0;
            }
            let frac = u - i as f64;
            let (a, b) = (pts[i], pts[i + 1]);
            f(a + (b - a) * frac) * (b - a)
        }
    };
    let mut edges = vec![-1.0];
    for i in 0..pts.len() {
        edges.push(i as f64);
    }
    edges.push(n + 1.0);
    // Split tails so the peak side is resolved from the start.
    let mut fine = Vec::with_capacity(edges.len() * 4);
    for w in edges.windows(2) {
        for k in 0..4 {
            fine.push(w[0] + (w[1] - w[0]) * k as f64 / 4.0);
        }
    }
    fine.push(n + 1.0);
    adaptive(&mapped, &fine, tol)
}
