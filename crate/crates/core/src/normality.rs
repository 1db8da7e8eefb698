//! Normality checks for posterior draws: Anderson–Darling against the
//! fitted normal and the normal QQ-plot correlation.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::{exp, fabs, log, sort_f64, sqrt};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalityDiagnostic {
    /// Anderson–Darling statistic with the small-sample correction.
    pub anderson_darling: f64,
    pub p_value: f64,
    /// Correlation of the order statistics with Blom normal scores.
    pub qq_correlation: f64,
}

pub const MIN_SAMPLE: usize = 50;

/// Standard normal cdf.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / core::f64::consts::SQRT_2)
}

fn normal_sf(x: f64) -> f64 {
    0.5 * libm::erfc(x / core::f64::consts::SQRT_2)
}

/// Standard normal quantile: rational approximation refined by one Halley step.
pub fn normal_quantile(p: f64) -> f64 {
    if p <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if p >= 1.0 {
        return f64::INFINITY;
    }
    const A: [f64; 6] = [
        -3.969_683_028_665_376e1,
        2.209_460_984_245_205e2,
        -2.759_285_104_469_687e2,
        1.383_577_518_672_69e2,
        -3.066_479_806_614_716e1,
        2.506_628_277_459_239,
    ];
    const B: [f64; 5] = [
        -5.447_609_879_822_406e1,
        1.615_858_368_580_409e2,
        -1.556_989_798_598_866e2,
        6.680_131_188_771_972e1,
        -1.328_068_155_288_572e1,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_293e-3,
        -3.223_964_580_411_365e-1,
        -2.400_758_277_161_838,
        -2.549_732_539_343_734,
        4.374_664_141_464_968,
        2.938_163_982_698_783,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_462e-3,
        3.224_671_290_700_398e-1,
        2.445_134_137_142_996,
        3.754_408_661_907_416,
    ];
    let low = 0.024_25;
    let x = if p < low {
        let q = sqrt(-2.0 * log(p));
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - low {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = sqrt(-2.0 * log(1.0 - p));
        -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    };
    let e = normal_cdf(x) - p;
    let u = e * sqrt(2.0 * core::f64::consts::PI) * exp(0.5 * x * x);
    x - u / (1.0 + 0.5 * x * u)
}

/// Anderson–Darling p-value for the composite normal hypothesis.
fn ad_p_value(a: f64) -> f64 {
    let p = if a >= 0.6 {
        exp(1.2937 - 5.709 * a + 0.0186 * a * a)
    } else if a >= 0.34 {
        exp(0.9177 - 4.279 * a - 1.38 * a * a)
    } else if a >= 0.2 {
        1.0 - exp(-8.318 + 42.796 * a - 59.938 * a * a)
    } else {
        1.0 - exp(-13.436 + 101.14 * a - 223.73 * a * a)
    };
    p.clamp(0.0, 1.0)
}

pub fn normality_diagnostic(values: &[f64]) -> Result<NormalityDiagnostic> {
    let n = values.len();
    if n < MIN_SAMPLE {
        return Err(Error::InvalidInput(alloc::format!(
            "normality diagnostic needs at least {MIN_SAMPLE} values, got {n}"
        )));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("draws must be finite".into()));
    }
    let mut x: Vec<f64> = values.to_vec();
    sort_f64(&mut x);
    let nf = n as f64;
    let mean = x.iter().sum::<f64>() / nf;
    let var = x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (nf - 1.0);
    let sd = sqrt(var);
    if !(sd > 1e-300) || fabs(x[n - 1] - x[0]) <= 1e-14 * fabs(mean).max(1e-300) {
        return Err(Error::Degenerate("draws have zero variance".into()));
    }

    let z: Vec<f64> = x.iter().map(|v| (v - mean) / sd).collect();
    let mut s = 0.0;
    for i in 0..n {
        let lo = log(normal_cdf(z[i]).max(f64::MIN_POSITIVE));
        let hi = log(normal_sf(z[n - 1 - i]).max(f64::MIN_POSITIVE));
        s += (2.0 * i as f64 + 1.0) * (lo + hi);
    }
    let a2 = -nf - s / nf;
    let a_star = a2 * (1.0 + 0.75 / nf + 2.25 / (nf * nf));

    let scores: Vec<f64> = (1..=n)
        .map(|i| normal_quantile((i as f64 - 0.375) / (nf + 0.25)))
        .collect();
    let score_mean = scores.iter().sum::<f64>() / nf;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (v, q) in x.iter().zip(&scores) {
        let dx = v - mean;
        let dy = q - score_mean;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    Ok(NormalityDiagnostic {
        anderson_darling: a_star,
        p_value: ad_p_value(a_star),
        qq_correlation: sxy / sqrt(sxx * syy),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Seed;
    use alloc::vec;
    use rand::Rng;
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn quantile_inverts_cdf() {
        for i in 1..2000 {
            let p = i as f64 / 2000.0;
            assert!((normal_cdf(normal_quantile(p)) - p).abs() < 1e-14);
        }
        assert!((normal_quantile(0.975) - 1.959_963_984_540_054).abs() < 1e-13);
        assert!((normal_quantile(1e-10) + 6.361_340_902_404_056).abs() < 1e-9);
    }

    #[test]
    fn normal_sample_passes() {
        let mut rng = Seed(5).rng();
        let x: Vec<f64> = (0..300).map(|_| StandardNormal.sample(&mut rng)).collect();
        let d = normality_diagnostic(&x).unwrap();
        assert!(d.qq_correlation > 0.995, "{d:?}");
        assert!(d.p_value > 0.01);
    }

    #[test]
    fn skewed_sample_fails() {
        let mut rng = Seed(6).rng();
        let x: Vec<f64> = (0..300).map(|_| {
            let u: f64 = rng.random();
            -log(1.0 - u)
        }).collect();
        let d = normality_diagnostic(&x).unwrap();
        assert!(d.p_value < 1e-3, "{d:?}");
        assert!(d.qq_correlation < 0.97);
    }

    #[test]
    fn rejects_degenerate_input() {
        assert!(matches!(normality_diagnostic(&[1.5; 60]), Err(Error::Degenerate(_))));
        assert!(normality_diagnostic(&[1.0; 10]).is_err());
        let mut x = vec![0.0; 60];
        x[3] = f64::NAN;
        assert!(normality_diagnostic(&x).is_err());
    }

    #[test]
    fn p_values_are_calibrated_under_the_null() {
        // about 5% of normal samples should be rejected at the 5% level
        let mut rejected = 0;
        let reps = 2000;
        for r in 0..reps {
            let mut rng = Seed(1000 + r).rng();
            let x: Vec<f64> = (0..100).map(|_| StandardNormal.sample(&mut rng)).collect();
            if normality_diagnostic(&x).unwrap().p_value < 0.05 {
                rejected += 1;
            }
        }
        let rate = rejected as f64 / reps as f64;
        assert!((0.03..0.07).contains(&rate), "{rate}");
    }
}
