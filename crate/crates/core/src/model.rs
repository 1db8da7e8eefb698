//! Ground-truth models for `X ~ F0` and sampling of observables `Z = (1 - U²)·X`.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{invalid, Error, Result};
use crate::math::{exp, pow, sqrt, sqrt_pos};
use crate::quadrature::Quadrature;
use crate::rng::Seed;
use crate::transform::{forward_density, v0_oracle};

/// Center and half-span of the Hölder peak family on `[0, 10]`.
pub const HOLDER_CENTER: f64 = 5.0;
pub const HOLDER_SUPPORT_END: f64 = 10.0;

/// Piecewise-linear cdf through `(x_i, p_i)`.
///
/// `x` nondecreasing and nonnegative, `p` nondecreasing from 0 to 1. Equal
/// consecutive `x` values encode a jump (atom).
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedCdf {
    xs: Vec<f64>,
    ps: Vec<f64>,
}

impl TabulatedCdf {
    pub fn new(xs: Vec<f64>, ps: Vec<f64>) -> Result<Self> {
        if xs.len() < 2 || xs.len() != ps.len() {
            return Err(invalid("tabulated cdf needs at least two (x, p) pairs"));
        }
        if xs.iter().chain(&ps).any(|v| !v.is_finite()) || xs[0] < 0.0 {
            return Err(invalid("tabulated cdf values must be finite with x >= 0"));
        }
        if !xs.windows(2).all(|w| w[0] <= w[1]) || !ps.windows(2).all(|w| w[0] <= w[1]) {
            return Err(invalid("tabulated cdf must be nondecreasing in x and p"));
        }
        if ps[0] != 0.0 || *ps.last().unwrap() != 1.0 {
            return Err(invalid("tabulated cdf must start at p = 0 and end at p = 1"));
        }
        Ok(Self { xs, ps })
    }

    pub fn uniform(upper: f64) -> Result<Self> {
        Self::new(alloc::vec![0.0, upper], alloc::vec![0.0, 1.0])
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn ps(&self) -> &[f64] {
        &self.ps
    }

    pub fn has_bounded_density(&self) -> bool {
        self.xs.windows(2).all(|w| w[0] < w[1])
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x < self.xs[0] {
            return 0.0;
        }
        if x >= *self.xs.last().unwrap() {
            return 1.0;
        }
        // last index with xs[i] <= x
        let i = self.xs.partition_point(|v| *v <= x) - 1;
        let (x0, x1, p0, p1) = (self.xs[i], self.xs[i + 1], self.ps[i], self.ps[i + 1]);
        p0 + (p1 - p0) * (x - x0) / (x1 - x0)
    }

    pub fn quantile(&self, p: f64) -> f64 {
        let p = p.clamp(0.0, 1.0);
        // first segment whose upper level reaches p and that carries mass
        let mut i = self.ps.partition_point(|v| *v < p).max(1) - 1;
        while i + 1 < self.ps.len() && self.ps[i + 1] == self.ps[i] {
            i += 1;
        }
        if i + 1 >= self.ps.len() {
            return *self.xs.last().unwrap();
        }
        let (x0, x1, p0, p1) = (self.xs[i], self.xs[i + 1], self.ps[i], self.ps[i + 1]);
        x0 + (x1 - x0) * (p - p0) / (p1 - p0)
    }

    fn density(&self, x: f64) -> f64 {
        if x < self.xs[0] || x >= *self.xs.last().unwrap() {
            return 0.0;
        }
        let i = self.xs.partition_point(|v| *v <= x) - 1;
        (self.ps[i + 1] - self.ps[i]) / (self.xs[i + 1] - self.xs[i])
    }
}

/// Local smoothness of `F0` at a designated point:
/// `F0(x + δ) - F0(x) ~ sgn(δ) k |δ|^gamma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Smoothness {
    pub gamma: f64,
    pub at: f64,
    pub k: f64,
}

/// Distribution `F0` of the squared radii of the sectioned spheres.
#[derive(Debug, Clone, PartialEq)]
pub enum TrueModel {
    Exponential { rate: f64 },
    /// `F0(y) = 1/2 ∓ K |5 - y|^γ` on `[0, 10]`, `K = 1 / (2·5^γ)`.
    HolderPeak { gamma: f64 },
    Tabulated(TabulatedCdf),
}

/// Hölder constant `K = 1/(2·5^γ)` that makes `F0(0) = 0` and `F0(10) = 1`.
pub fn holder_constant(gamma: f64) -> f64 {
    0.5 / pow(HOLDER_CENTER, gamma)
}

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma > 0.5 && gamma.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidModel(format!(
            "Hölder exponent {gamma} must exceed 1/2"
        )))
    }
}

/// Hölder peak cdf on `[0, 10]`.
pub fn holder_cdf(gamma: f64, y: f64) -> Result<f64> {
    check_gamma(gamma)?;
    if !(0.0..=HOLDER_SUPPORT_END).contains(&y) {
        return Err(invalid(format!("y = {y} outside [0, 10]")));
    }
    let k = holder_constant(gamma);
    let d = y - HOLDER_CENTER;
    Ok(if d < 0.0 {
        0.5 - k * pow(-d, gamma)
    } else {
        0.5 + k * pow(d, gamma)
    })
}

/// Exact inverse of [`holder_cdf`].
pub fn holder_inverse(gamma: f64, p: f64) -> Result<f64> {
    check_gamma(gamma)?;
    if !(0.0..=1.0).contains(&p) {
        return Err(invalid(format!("probability {p} outside [0, 1]")));
    }
    let r = 1.0 / gamma;
    Ok(if p < 0.5 {
        HOLDER_CENTER - HOLDER_CENTER * pow(1.0 - 2.0 * p, r)
    } else {
        HOLDER_CENTER + HOLDER_CENTER * pow(2.0 * p - 1.0, r)
    })
}

impl TrueModel {
    pub fn exponential(rate: f64) -> Result<Self> {
        if rate > 0.0 && rate.is_finite() {
            Ok(Self::Exponential { rate })
        } else {
            Err(Error::InvalidModel(format!("exponential rate {rate} must be positive")))
        }
    }

    pub fn holder(gamma: f64) -> Result<Self> {
        check_gamma(gamma)?;
        Ok(Self::HolderPeak { gamma })
    }

    /// Parses `exp:<rate>`, `holder:<gamma>`, `uniform:<upper>` or
    /// `tab:<x>/<p>,<x>/<p>,...`.
    pub fn parse(spec: &str) -> Result<Self> {
        let (family, params) = spec
            .split_once(':')
            .ok_or_else(|| Error::InvalidModel(format!("model spec `{spec}` lacks `family:`")))?;
        let number = |s: &str| -> Result<f64> {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidModel(format!("`{s}` is not a number in `{spec}`")))
        };
        match family.trim() {
            "exp" | "exponential" => Self::exponential(number(params)?),
            "holder" => Self::holder(number(params)?),
            "uniform" => Ok(Self::Tabulated(
                TabulatedCdf::uniform(number(params)?)
                    .map_err(|e| Error::InvalidModel(e.to_string()))?,
            )),
            "tab" => {
                let mut xs = Vec::new();
                let mut ps = Vec::new();
                for pair in params.split(',') {
                    let (x, p) = pair.split_once('/').ok_or_else(|| {
                        Error::InvalidModel(format!("tabulated entry `{pair}` is not x/p"))
                    })?;
                    xs.push(number(x)?);
                    ps.push(number(p)?);
                }
                TabulatedCdf::new(xs, ps)
                    .map(Self::Tabulated)
                    .map_err(|e| Error::InvalidModel(e.to_string()))
            }
            other => Err(Error::InvalidModel(format!("unknown model family `{other}`"))),
        }
    }

    /// Inverse of [`TrueModel::parse`].
    pub fn spec(&self) -> String {
        match self {
            Self::Exponential { rate } => format!("exp:{rate}"),
            Self::HolderPeak { gamma } => format!("holder:{gamma}"),
            Self::Tabulated(t) => {
                let parts: Vec<String> = t
                    .xs
                    .iter()
                    .zip(&t.ps)
                    .map(|(x, p)| format!("{x}/{p}"))
                    .collect();
                format!("tab:{}", parts.join(","))
            }
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match self {
            Self::Exponential { rate } => {
                if x <= 0.0 {
                    0.0
                } else {
                    -libm::expm1(-rate * x)
                }
            }
            Self::HolderPeak { gamma } => {
                holder_cdf(*gamma, x.clamp(0.0, HOLDER_SUPPORT_END)).expect("validated gamma")
            }
            Self::Tabulated(t) => t.cdf(x),
        }
    }

    pub fn quantile(&self, p: f64) -> f64 {
        match self {
            Self::Exponential { rate } => -libm::log1p(-p) / rate,
            Self::HolderPeak { gamma } => {
                holder_inverse(*gamma, p.clamp(0.0, 1.0)).expect("validated gamma")
            }
            Self::Tabulated(t) => t.quantile(p),
        }
    }

    /// Density of `F0`; infinite at the Hölder center when `γ < 1`.
    pub fn density(&self, x: f64) -> f64 {
        match self {
            Self::Exponential { rate } => {
                if x < 0.0 {
                    0.0
                } else {
                    rate * exp(-rate * x)
                }
            }
            Self::HolderPeak { gamma } => {
                if !(0.0..=HOLDER_SUPPORT_END).contains(&x) {
                    return 0.0;
                }
                holder_constant(*gamma) * gamma * pow(libm::fabs(x - HOLDER_CENTER), gamma - 1.0)
            }
            Self::Tabulated(t) => t.density(x),
        }
    }

    /// Right end of the support, if bounded.
    pub fn support_end(&self) -> Option<f64> {
        match self {
            Self::Exponential { .. } => None,
            Self::HolderPeak { .. } => Some(HOLDER_SUPPORT_END),
            Self::Tabulated(t) => t.xs.last().copied(),
        }
    }

    /// Interior points where `F0` (and hence `V0`) is not smooth.
    pub fn knots(&self) -> Vec<f64> {
        match self {
            Self::Exponential { .. } => Vec::new(),
            Self::HolderPeak { .. } => alloc::vec![HOLDER_CENTER],
            Self::Tabulated(t) => {
                let mut k: Vec<f64> = t.xs[1..t.xs.len() - 1].to_vec();
                k.dedup();
                k
            }
        }
    }

    /// Probability levels where the quantile function is not smooth.
    fn breakpoint_levels(&self) -> Vec<f64> {
        match self {
            Self::Exponential { .. } => Vec::new(),
            Self::HolderPeak { .. } => alloc::vec![0.5],
            Self::Tabulated(t) => {
                let mut k: Vec<f64> = t.ps[1..t.ps.len() - 1].to_vec();
                k.dedup();
                k
            }
        }
    }

    /// Levels at which the quantile function has an algebraic singularity.
    fn is_singular_level(&self, p: f64) -> bool {
        matches!(self, Self::HolderPeak { gamma } if p == 0.5 && *gamma != 1.0)
    }

    /// `Q(F0(x) + dp) - x`, accurate for small `dp`.
    fn quantile_excess(&self, x: f64, p0: f64, dp: f64) -> f64 {
        match self {
            Self::Exponential { rate } => {
                let s = dp * exp(rate * x);
                if s >= 1.0 {
                    f64::INFINITY
                } else {
                    -libm::log1p(-s) / rate
                }
            }
            Self::HolderPeak { gamma } => {
                let r = 1.0 / gamma;
                let c = HOLDER_CENTER;
                if x >= c {
                    let a = 2.0 * p0 - 1.0;
                    if a > 0.0 {
                        c * pow(a, r) * libm::expm1(r * libm::log1p(2.0 * dp / a))
                    } else {
                        c * pow(2.0 * dp, r)
                    }
                } else {
                    let b = 1.0 - 2.0 * p0;
                    if 2.0 * dp <= b {
                        -c * pow(b, r) * libm::expm1(r * libm::log1p(-2.0 * dp / b))
                    } else {
                        (c - x) + c * pow(2.0 * dp - b, r)
                    }
                }
            }
            Self::Tabulated(t) => {
                let i = t.ps.partition_point(|v| *v <= p0);
                if i < t.ps.len() && p0 + dp <= t.ps[i] && t.ps[i] > t.ps[i - 1] {
                    dp * (t.xs[i] - t.xs[i - 1]) / (t.ps[i] - t.ps[i - 1])
                } else {
                    t.quantile(p0 + dp) - x
                }
            }
        }
    }

    /// `∫_{(x,∞)} h(s) dF0(s)`, computed in the quantile variable.
    ///
    /// `h` receives `s` and `s - x`; the latter is exact near `x`, where the
    /// first piece uses `p = F0(x) + t²` to absorb `(s - x)^{-1/2}` kernels.
    pub fn integrate_tail<H: Fn(f64, f64) -> f64>(
        &self,
        x: f64,
        h: H,
        quad: &Quadrature,
    ) -> Result<f64> {
        let p0 = self.cdf(x);
        if p0 >= 1.0 {
            return Ok(0.0);
        }
        let mut edges = alloc::vec![p0];
        edges.extend(self.breakpoint_levels().into_iter().filter(|p| *p > p0 && *p < 1.0));
        edges.push(1.0);

        let first = |t: f64| {
            let dp = t * t;
            let d = self.quantile_excess(x, p0, dp);
            if !d.is_finite() {
                return 0.0;
            }
            2.0 * t * h(x + d, d)
        };
        let upper = sqrt(edges[1] - p0);
        let mut total = if self.is_singular_level(p0) {
            quad.tanh_sinh(|t, _| first(t), 0.0, upper)?
        } else {
            quad.integrate(first, 0.0, upper)?
        };
        let body = |p: f64| {
            let s = self.quantile(p);
            if s.is_finite() {
                h(s, s - x)
            } else {
                0.0
            }
        };
        for w in edges[1..].windows(2) {
            // next to a singular level the integrand spikes when x is close
            // to the corresponding quantile; distances are then built from
            // that quantile to avoid cancellation in s - x
            total += if self.is_singular_level(w[0]) {
                let sb = self.quantile(w[0]);
                quad.tanh_sinh(
                    |p, dist| {
                        if dist > 0.0 {
                            let e = self.quantile_excess(sb, w[0], dist);
                            h(sb + e, (sb - x) + e)
                        } else {
                            body(p)
                        }
                    },
                    w[0],
                    w[1],
                )?
            } else if self.is_singular_level(w[1]) {
                quad.tanh_sinh(|p, _| body(p), w[0], w[1])?
            } else {
                quad.integrate(body, w[0], w[1])?
            };
        }
        Ok(total)
    }

    /// Cdf of the observable `Z = Y·X`, `Y ~ Beta(1, 1/2)`:
    /// `G0(z) = F0(z) + ∫_{(z,∞)} (1 - sqrt(1 - z/s)) dF0(s)`.
    pub fn observable_cdf(&self, z: f64, quad: &Quadrature) -> Result<f64> {
        if z <= 0.0 {
            return Ok(0.0);
        }
        let tail = self.integrate_tail(z, |s, d| 1.0 - sqrt_pos(d / s), quad)?;
        Ok(self.cdf(z) + tail)
    }

    pub fn smoothness(&self) -> Option<Smoothness> {
        match self {
            Self::Exponential { rate } => Some(Smoothness {
                gamma: 1.0,
                at: DEFAULT_EXPONENTIAL_POINT,
                k: rate * exp(-rate * DEFAULT_EXPONENTIAL_POINT),
            }),
            Self::HolderPeak { gamma } => Some(Smoothness {
                gamma: *gamma,
                at: HOLDER_CENTER,
                k: holder_constant(*gamma),
            }),
            Self::Tabulated(_) => None,
        }
    }

    /// One draw of `X ~ F0` by inversion.
    pub fn sample_x<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.quantile(rng.random::<f64>())
    }
}

/// Benchmark point for the exponential model.
pub const DEFAULT_EXPONENTIAL_POINT: f64 = 1.5;

/// How projected positions are centered before squaring.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CenterMode {
    Origin,
    Centroid,
}

impl CenterMode {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Origin => "origin",
            Self::Centroid => "centroid",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Provenance {
    Synthetic { seed: u64, model: String },
    Ingested { source: String, center: CenterMode },
}

/// Observations `Z_1..Z_n` with their origin.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    pub z_values: Vec<f64>,
    pub provenance: Provenance,
}

/// `n` observables `Z = (1 - U²)·X` with `X ~ F0` by inversion and
/// `U ~ Uniform(0, 1)`.
pub fn sample_observables(model: &TrueModel, n: usize, seed: Seed) -> Result<SampleSet> {
    if n == 0 {
        return Err(invalid("sample size must be at least 1"));
    }
    let mut rng = seed.rng();
    let z_values = (0..n)
        .map(|_| {
            let x = model.sample_x(&mut rng);
            let u: f64 = rng.random();
            (1.0 - u * u) * x
        })
        .collect();
    Ok(SampleSet {
        z_values,
        provenance: Provenance::Synthetic {
            seed: seed.0,
            model: model.spec(),
        },
    })
}

/// `F0(x)`, `V0(x)` and `g0(x)` (`None` at `x = 0`, where `g0` may be infinite).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelTruth {
    pub cdf: f64,
    pub v0: f64,
    pub g0: Option<f64>,
}

pub fn model_truth(model: &TrueModel, x: f64, quad: &Quadrature) -> Result<ModelTruth> {
    if !(x >= 0.0 && x.is_finite()) {
        return Err(invalid(format!("query point {x} must be a finite nonnegative real")));
    }
    let g0 = if x > 0.0 {
        Some(forward_density(model, x, quad)?)
    } else {
        None
    };
    Ok(ModelTruth {
        cdf: model.cdf(x),
        v0: v0_oracle(model, x, quad)?,
        g0,
    })
}

/// Exponential-model closed forms used by tests: `V0(0) = (π/2)·sqrt(π·λ)`.
pub fn exponential_v0_at_zero(rate: f64) -> f64 {
    crate::math::FRAC_PI_2 * sqrt(crate::math::PI * rate)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use rand::Rng;
    use proptest::prelude::*;

    #[test]
    fn holder_center_and_boundaries() {
        for g in [0.55, 0.6, 0.65, 0.7, 0.8, 1.5] {
            assert_eq!(holder_cdf(g, 5.0).unwrap(), 0.5);
        }
        assert!(holder_cdf(0.8, 0.0).unwrap().abs() < 1e-15);
        assert!((holder_cdf(0.8, 10.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((holder_constant(0.8) - 1.0 / (2.0 * pow(5.0, 0.8))).abs() < 1e-16);
    }

    #[test]
    fn holder_domain_errors() {
        assert!(holder_cdf(0.8, -0.1).is_err());
        assert!(holder_cdf(0.8, 10.5).is_err());
        assert!(holder_cdf(0.4, 1.0).is_err());
        assert!(holder_inverse(0.8, 1.2).is_err());
        assert!(TrueModel::holder(0.5).is_err());
    }

    #[test]
    fn holder_inverse_round_trip() {
        let mut rng = Seed(41).rng();
        for g in [0.55, 0.8, 1.5, 3.0] {
            for _ in 0..1000 {
                let p: f64 = rng.random();
                let y = holder_inverse(g, p).unwrap();
                assert!((holder_cdf(g, y).unwrap() - p).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn parse_round_trips() {
        for spec in ["exp:1.2", "holder:0.8", "tab:0/0,1/0.5,3/1"] {
            let m = TrueModel::parse(spec).unwrap();
            assert_eq!(TrueModel::parse(&m.spec()).unwrap(), m);
        }
        assert_eq!(
            TrueModel::parse("uniform:2").unwrap(),
            TrueModel::Tabulated(TabulatedCdf::uniform(2.0).unwrap())
        );
        assert!(matches!(
            TrueModel::parse("holder:0.4"),
            Err(Error::InvalidModel(_))
        ));
        assert!(TrueModel::parse("gauss:1").is_err());
        assert!(TrueModel::parse("exp").is_err());
        assert!(TrueModel::parse("exp:-1").is_err());
    }

    #[test]
    fn tabulated_cdf_and_quantile() {
        let t = TabulatedCdf::new(vec![0.0, 1.0, 3.0], vec![0.0, 0.5, 1.0]).unwrap();
        assert_eq!(t.cdf(0.5), 0.25);
        assert_eq!(t.cdf(2.0), 0.75);
        assert_eq!(t.cdf(5.0), 1.0);
        assert_eq!(t.quantile(0.25), 0.5);
        assert_eq!(t.quantile(0.75), 2.0);
        // point mass at 1
        let t = TabulatedCdf::new(vec![1.0, 1.0], vec![0.0, 1.0]).unwrap();
        assert_eq!(t.quantile(0.3), 1.0);
        assert!(!t.has_bounded_density());
        assert!(TabulatedCdf::new(vec![0.0, 1.0], vec![0.0, 0.9]).is_err());
    }

    #[test]
    fn quantile_excess_matches_direct_difference() {
        let models = [
            TrueModel::exponential(1.2).unwrap(),
            TrueModel::holder(0.55).unwrap(),
            TrueModel::holder(1.5).unwrap(),
            TrueModel::parse("tab:0/0,1/0.5,3/1").unwrap(),
        ];
        for m in &models {
            for x in [0.3, 2.0, 4.9, 5.0, 6.5] {
                let p0 = m.cdf(x);
                if p0 >= 0.99 {
                    continue;
                }
                for dp in [1e-3, 1e-2, 0.005] {
                    let direct = m.quantile(p0 + dp) - x;
                    let ex = m.quantile_excess(x, p0, dp);
                    assert!(
                        (direct - ex).abs() < 1e-9 * (1.0 + direct.abs()),
                        "{m:?} x={x} dp={dp}: {direct} vs {ex}"
                    );
                }
            }
        }
    }

    #[test]
    fn degenerate_x_gives_beta_one_half_observables() {
        let model = TrueModel::parse("tab:1/0,1/1").unwrap();
        let n = 100_000;
        let z = sample_observables(&model, n, Seed(43)).unwrap().z_values;
        for k in 1..=20 {
            let t = k as f64 / 21.0;
            let emp = z.iter().filter(|v| **v <= t).count() as f64 / n as f64;
            let exact = 1.0 - sqrt(1.0 - t);
            let se = sqrt(exact * (1.0 - exact) / n as f64);
            assert!((emp - exact).abs() < 3.0 * se + 1e-12, "t={t}: {emp} vs {exact}");
        }
    }

    #[test]
    fn exponential_observable_mean() {
        let model = TrueModel::exponential(1.2).unwrap();
        let n = 100_000;
        let z = sample_observables(&model, n, Seed(47)).unwrap().z_values;
        let mean = z.iter().sum::<f64>() / n as f64;
        let var = z.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n as f64 - 1.0);
        assert!((mean - 5.0 / 9.0).abs() < 3.0 * sqrt(var / n as f64));
    }

    #[test]
    fn sampling_is_deterministic_and_bounded() {
        let model = TrueModel::holder(0.8).unwrap();
        let a = sample_observables(&model, 2000, Seed(7)).unwrap();
        let b = sample_observables(&model, 2000, Seed(7)).unwrap();
        assert_eq!(a, b);
        assert!(a.z_values.iter().all(|z| (0.0..=10.0).contains(z)));
        assert!(sample_observables(&model, 0, Seed(7)).is_err());
    }

    #[test]
    fn truth_at_benchmark_points() {
        let q = Quadrature::default();
        let exp_model = TrueModel::exponential(1.2).unwrap();
        let t = model_truth(&exp_model, 1.5, &q).unwrap();
        assert!((t.cdf - (1.0 - exp(-1.8))).abs() < 1e-15);
        assert!((t.cdf - 0.83470).abs() < 1e-5);
        let t0 = model_truth(&exp_model, 0.0, &q).unwrap();
        assert!((t0.v0 - exponential_v0_at_zero(1.2)).abs() < 1e-9, "{}", t0.v0);
        assert!((t0.v0 - 3.0499).abs() < 1e-4);
        assert!(t0.g0.is_none());
        let h = model_truth(&TrueModel::holder(0.7).unwrap(), 5.0, &q).unwrap();
        assert_eq!(h.cdf, 0.5);
    }

    proptest! {
        #[test]
        fn observables_never_exceed_x(seed in any::<u64>(), g in 0.55f64..2.0) {
            let model = TrueModel::holder(g).unwrap();
            let mut rng = Seed(seed).rng();
            for _ in 0..50 {
                let x = model.sample_x(&mut rng);
                let u: f64 = rng.random();
                let z = (1.0 - u * u) * x;
                prop_assert!(z <= x && z >= 0.0);
            }
        }
    }
}
