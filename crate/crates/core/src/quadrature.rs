//! One-dimensional quadrature.
//!
//! The workhorse is a globally adaptive 7/15-point Gauss–Kronrod rule with the
//! QUADPACK error rescaling. Square-root endpoint singularities are removed by
//! the substitution `x = a + t²`, semi-infinite ranges by `x = a + t/(1-t)`.
//! A tanh-sinh rule is provided for pieces with stronger algebraic endpoint
//! singularities and as an independent cross-check.

use alloc::collections::BinaryHeap;
use core::cmp::Ordering;

use crate::error::{Error, Result};
use crate::math::{exp, fabs, pow, sqrt};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
// Gauss weights for nodes XGK[1], XGK[3], XGK[5] and the center.
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Quadrature settings. `abs_tol` is an absolute error target.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub abs_tol: f64,
    pub max_intervals: usize,
}

impl Default for Quadrature {
    fn default() -> Self {
        Self {
            abs_tol: 1e-9,
            max_intervals: 2000,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Piece {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.err.total_cmp(&other.err) == Ordering::Equal
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

fn kronrod15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Piece {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_k = fc * WGK[7];
    let mut res_g = fc * WG[3];
    let mut res_abs = fabs(res_k);
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (fabs(f1) + fabs(f2));
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * fabs(fc - mean);
    for j in 0..7 {
        res_asc += WGK[j] * (fabs(fv1[j] - mean) + fabs(fv2[j] - mean));
    }
    let hl = fabs(half);
    res_asc *= hl;
    res_abs *= hl;
    let mut err = fabs((res_k - res_g) * half);
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * pow(200.0 * err / res_asc, 1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    Piece {
        a,
        b,
        value: res_k * half,
        err,
    }
}

impl Quadrature {
    pub fn with_tol(abs_tol: f64) -> Self {
        Self {
            abs_tol,
            ..Self::default()
        }
    }

    /// `∫_a^b f` by adaptive Gauss–Kronrod; returns `(value, error estimate)`.
    pub fn integrate_with_error<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> Result<(f64, f64)> {
        if a == b {
            return Ok((0.0, 0.0));
        }
        let first = kronrod15(&f, a, b);
        let mut value = first.value;
        let mut err = first.err;
        let mut heap = BinaryHeap::with_capacity(64);
        heap.push(first);
        let mut count = 1;
        while err > self.abs_tol {
            if !value.is_finite() || !err.is_finite() {
                return Err(Error::QuadratureFailure {
                    achieved: err,
                    requested: self.abs_tol,
                });
            }
            let worst = heap.pop().expect("heap holds every piece");
            let mid = 0.5 * (worst.a + worst.b);
            if count >= self.max_intervals || mid <= worst.a.min(worst.b) || mid >= worst.a.max(worst.b) {
                return Err(Error::QuadratureFailure {
                    achieved: err,
                    requested: self.abs_tol,
                });
            }
            let left = kronrod15(&f, worst.a, mid);
            let right = kronrod15(&f, mid, worst.b);
            value += left.value + right.value - worst.value;
            err += left.err + right.err - worst.err;
            heap.push(left);
            heap.push(right);
            count += 1;
            // The running sums drift; refresh them now and then.
            if count % 64 == 0 {
                value = heap.iter().map(|p| p.value).sum();
                err = heap.iter().map(|p| p.err).sum();
            }
        }
        Ok((value, err))
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> Result<f64> {
        self.integrate_with_error(f, a, b).map(|r| r.0)
    }

    /// `∫_a^∞ f` through `x = a + t / (1 - t)`.
    pub fn integrate_to_infinity<F: Fn(f64) -> f64>(&self, f: F, a: f64) -> Result<f64> {
        self.integrate(
            |t| {
                let s = 1.0 - t;
                let w = f(a + t / s) / (s * s);
                if w.is_finite() {
                    w
                } else {
                    0.0
                }
            },
            0.0,
            1.0,
        )
    }

    /// `∫_a^b f` where `f` may blow up like `(x - a)^{-1/2}`, through
    /// `x = a + t²`. `f` receives both `x` and the offset `x - a = t²`, which
    /// stays exact near the endpoint. `b` may be `+∞`.
    pub fn integrate_sqrt_lower<F: Fn(f64, f64) -> f64>(&self, f: F, a: f64, b: f64) -> Result<f64> {
        let g = |t: f64| {
            let d = t * t;
            2.0 * t * f(a + d, d)
        };
        if b.is_infinite() {
            self.integrate_to_infinity(g, 0.0)
        } else {
            self.integrate(g, 0.0, sqrt(b - a))
        }
    }

    /// Tanh-sinh (double exponential) rule on a finite interval. Handles
    /// integrable algebraic singularities at either endpoint. `f` receives the
    /// abscissa and its distance to the nearest endpoint, signed negative
    /// when that endpoint is `b`.
    pub fn tanh_sinh<F: Fn(f64, f64) -> f64>(&self, f: F, a: f64, b: f64) -> Result<f64> {
        let width = b - a;
        let half_pi = core::f64::consts::FRAC_PI_2;
        let eval = |t: f64| -> f64 {
            let u = half_pi * libm::sinh(t);
            let e = exp(-2.0 * fabs(u));
            // distance to the nearer endpoint: width / (1 + e^{2|u|})
            let d = width * e / (1.0 + e);
            let weight = half_pi * libm::cosh(t) * 4.0 * e / ((1.0 + e) * (1.0 + e)) * 0.5 * width;
            if d <= 0.0 || weight == 0.0 {
                return 0.0;
            }
            // x may round onto an endpoint; f sees the exact distance
            let (x, dist) = if t < 0.0 { (a + d, d) } else { (b - d, -d) };
            let v = f(x, dist) * weight;
            if v.is_finite() {
                v
            } else {
                0.0
            }
        };
        let t_max = 6.5;
        let mut h = 0.5;
        let mut sum = eval(0.0);
        let mut k = 1;
        while (k as f64) * h <= t_max {
            sum += eval(k as f64 * h) + eval(-(k as f64) * h);
            k += 1;
        }
        let mut estimate = sum * h;
        let mut diff = f64::INFINITY;
        for level in 0..12 {
            h *= 0.5;
            let mut add = 0.0;
            let mut k = 1;
            while (k as f64) * h <= t_max {
                add += eval(k as f64 * h) + eval(-(k as f64) * h);
                k += 2;
            }
            sum += add;
            let next = sum * h;
            diff = fabs(next - estimate);
            estimate = next;
            if diff <= self.abs_tol * 0.1 || (diff <= self.abs_tol && level >= 3) {
                return Ok(estimate);
            }
        }
        Err(Error::QuadratureFailure {
            achieved: diff,
            requested: self.abs_tol,
        })
    }
}
