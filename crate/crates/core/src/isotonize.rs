//! Least concave majorants and isotonic projections.
//!
//! `U_G` is convex between consecutive atoms of `G`, so its least concave
//! majorant on `[0, ∞)` is the upper hull of the finitely many points
//! `(0, 0)` and `(z_i, U_G(z_i))`. No grid is needed.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{invalid, Result};
use crate::math::{sqrt, FRAC_2_PI};
use crate::measures::DiscreteMeasure;
use crate::transform::u_of;

/// Piecewise-linear concave function, constant after the last vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct ConcaveMajorantFn {
    xs: Vec<f64>,
    ys: Vec<f64>,
    slopes: Vec<f64>,
}

impl ConcaveMajorantFn {
    pub fn vertices(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.xs.iter().copied().zip(self.ys.iter().copied())
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn ys(&self) -> &[f64] {
        &self.ys
    }

    pub fn slopes(&self) -> &[f64] {
        &self.slopes
    }

    pub fn eval(&self, x: f64) -> f64 {
        let i = self.xs.partition_point(|v| *v <= x);
        if i == 0 {
            return self.ys[0] + self.slopes.first().map_or(0.0, |s| s * (x - self.xs[0]));
        }
        if i == self.xs.len() {
            return self.ys[i - 1];
        }
        self.ys[i - 1] + self.slopes[i - 1] * (x - self.xs[i - 1])
    }

    /// Right derivative: slope of the segment to the right, 0 after the last vertex.
    pub fn right_derivative(&self) -> StepFn {
        StepFn {
            breakpoints: self.xs.clone(),
            values: self.slopes.clone(),
            terminal: 0.0,
        }
    }
}

/// Right-continuous step function: `values[i]` on `[breakpoints[i],
/// breakpoints[i + 1])`, `terminal` from the last breakpoint on. Left of the
/// first breakpoint the first value applies.
#[derive(Debug, Clone, PartialEq)]
pub struct StepFn {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
    terminal: f64,
}

impl StepFn {
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>, terminal: f64) -> Result<Self> {
        if breakpoints.is_empty() || values.len() + 1 != breakpoints.len() {
            return Err(invalid(format!(
                "step function needs one value per interval: {} breakpoints, {} values",
                breakpoints.len(),
                values.len()
            )));
        }
        if !breakpoints.windows(2).all(|w| w[0] < w[1]) {
            return Err(invalid("step breakpoints must be strictly increasing"));
        }
        Ok(Self {
            breakpoints,
            values,
            terminal,
        })
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn terminal(&self) -> f64 {
        self.terminal
    }

    pub fn eval(&self, x: f64) -> f64 {
        let i = self.breakpoints.partition_point(|b| *b <= x);
        if i == self.breakpoints.len() {
            self.terminal
        } else {
            self.values[i.saturating_sub(1).min(self.values.len().saturating_sub(1))]
        }
    }

    pub fn is_nonincreasing(&self) -> bool {
        self.values.windows(2).all(|w| w[1] <= w[0])
            && self.values.last().is_none_or(|v| self.terminal <= *v)
    }
}

/// Indices of the upper hull of `(xs, ys)`, `xs` strictly increasing.
/// Collinear middle points are dropped.
pub(crate) fn upper_hull(xs: &[f64], ys: &[f64], out: &mut Vec<usize>) {
    out.clear();
    for i in 0..xs.len() {
        while out.len() >= 2 {
            let a = out[out.len() - 2];
            let b = out[out.len() - 1];
            // b is on or below the chord a -> i
            let lhs = (ys[b] - ys[a]) * (xs[i] - xs[a]);
            let rhs = (ys[i] - ys[a]) * (xs[b] - xs[a]);
            if lhs <= rhs {
                out.pop();
            } else {
                break;
            }
        }
        out.push(i);
    }
}

fn check_points(points: &[(f64, f64)]) -> Result<()> {
    if points.is_empty() {
        return Err(invalid("no points to hull"));
    }
    if points.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
        return Err(invalid("hull points must be finite"));
    }
    if !points.windows(2).all(|w| w[0].0 < w[1].0) {
        return Err(invalid("hull x-coordinates must be strictly increasing"));
    }
    Ok(())
}

/// Upper convex hull by monotone chain.
pub fn lcm_from_points(points: &[(f64, f64)]) -> Result<ConcaveMajorantFn> {
    check_points(points)?;
    let xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1).collect();
    let mut idx = Vec::new();
    upper_hull(&xs, &ys, &mut idx);
    let hx: Vec<f64> = idx.iter().map(|&i| xs[i]).collect();
    let hy: Vec<f64> = idx.iter().map(|&i| ys[i]).collect();
    let slopes = hx
        .windows(2)
        .zip(hy.windows(2))
        .map(|(x, y)| (y[1] - y[0]) / (x[1] - x[0]))
        .collect();
    Ok(ConcaveMajorantFn {
        xs: hx,
        ys: hy,
        slopes,
    })
}

/// The points `(0, 0)` and `(z, U_G(z))` for every atom `z > 0`.
pub fn u_points(measure: &DiscreteMeasure) -> Vec<(f64, f64)> {
    let mut pts = Vec::with_capacity(measure.len() + 1);
    pts.push((0.0, 0.0));
    for &z in measure.atoms() {
        if z > 0.0 {
            pts.push((z, u_of(measure, z)));
        }
    }
    pts
}

/// Least concave majorant of `U_G`.
pub fn concave_majorant(measure: &DiscreteMeasure) -> ConcaveMajorantFn {
    let mut hull = lcm_from_points(&u_points(measure)).expect("atoms are sorted and distinct");
    // U is nondecreasing; rounding must not produce negative slopes
    for s in &mut hull.slopes {
        *s = s.max(0.0);
    }
    hull
}

/// Isotonized `V̂_G`: right derivative of the least concave majorant of `U_G`.
pub fn isotonize_measure(measure: &DiscreteMeasure) -> StepFn {
    concave_majorant(measure).right_derivative()
}

/// Weighted least-squares projection onto nonincreasing sequences.
pub fn pava_decreasing(values: &[f64], weights: &[f64]) -> Result<Vec<f64>> {
    if values.len() != weights.len() {
        return Err(invalid(format!(
            "{} values but {} weights",
            values.len(),
            weights.len()
        )));
    }
    if weights.iter().any(|w| !(*w > 0.0)) {
        return Err(invalid("PAVA weights must be positive"));
    }
    // (mean, weight, count)
    let mut blocks: Vec<(f64, f64, usize)> = Vec::with_capacity(values.len());
    for (&v, &w) in values.iter().zip(weights) {
        let mut cur = (v, w, 1usize);
        while let Some(&(m, bw, c)) = blocks.last() {
            if m >= cur.0 {
                break;
            }
            let total = bw + cur.1;
            cur = ((m * bw + cur.0 * cur.1) / total, total, c + cur.2);
            blocks.pop();
        }
        blocks.push(cur);
    }
    let mut out = Vec::with_capacity(values.len());
    for (m, _, c) in blocks {
        out.extend(core::iter::repeat_n(m, c));
    }
    Ok(out)
}

/// `T(a) = inf{t ≥ 0 : U(t) - a·t is maximal}` over the given points.
pub fn switch_argmax(u_points: &[(f64, f64)], a: f64) -> f64 {
    let mut best = f64::NEG_INFINITY;
    let mut arg = f64::NAN;
    for &(x, u) in u_points {
        let v = u - a * x;
        if v > best {
            best = v;
            arg = x;
        }
    }
    arg
}

/// `1 - (2/π) sqrt(x) V̂(x) - (2/π) ∫_x^∞ V̂(s) / (2 sqrt(s)) ds`, exact for a
/// step function. A nonzero terminal value makes the tail integral diverge.
pub fn f_hat(vhat: &StepFn, x: f64) -> f64 {
    let b = &vhat.breakpoints;
    let mut tail = 0.0;
    let start = b.partition_point(|v| *v <= x).saturating_sub(1);
    for k in start..vhat.values.len() {
        let lo = if k == 0 { b[0].min(x) } else { b[k] };
        let hi = b[k + 1];
        if hi <= x {
            continue;
        }
        tail += vhat.values[k] * (sqrt(hi) - sqrt(lo.max(x)));
    }
    if vhat.terminal != 0.0 {
        tail += vhat.terminal * f64::INFINITY;
    }
    1.0 - FRAC_2_PI * (sqrt(x) * vhat.eval(x) + tail)
}
