//! Point estimates, posterior ensembles and credible bands.
//!
//! Every posterior draw `d` is generated from its own stream
//! [`draw_seed`]`(seed, d)`, so ensembles are reproducible regardless of how
//! callers split the work.
//!
//! Isotonized ensembles share the data atoms across draws: `U_G` at every
//! data atom is a kernel sum `Σ_{i>j} W_i sqrt(z_i - z_j)` whose kernel does
//! not depend on the draw, so it is evaluated for a block of draws at once.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{invalid, Result};
use crate::isotonize::{f_hat, isotonize_measure, upper_hull, StepFn};
use crate::math::{ceil, sort_f64, sqrt};
use crate::measures::{empirical_measure, validate_data, BaseMeasureSpec, DpDraw, DpPosterior, DEFAULT_TRUNCATION_TOL};
use crate::rng::{label, Seed};
use crate::transform::{f_naive, v_of, QueryGrid};

/// Draws per block in the shared-support kernel.
const BLOCK: usize = 32;

/// Which functional an ensemble holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    VNaive,
    VIso,
    FNaive,
    FIso,
}

impl Target {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::VNaive => "v_naive",
            Self::VIso => "v_iso",
            Self::FNaive => "f_naive",
            Self::FIso => "f_iso",
        }
    }
}

/// Row-major `rows × cols` matrix; one row per draw, one column per query.
#[derive(Debug, Clone, PartialEq)]
pub struct DrawMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DrawMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_rows(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(invalid(format!(
                "{} values do not fill a {rows}×{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.cols + col]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.data[row * self.cols..(row + 1) * self.cols]
    }

    fn row_mut(&mut self, row: usize) -> &mut [f64] {
        &mut self.data[row * self.cols..(row + 1) * self.cols]
    }

    pub fn column(&self, col: usize) -> Vec<f64> {
        (0..self.rows).map(|r| self.get(r, col)).collect()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleSettings {
    pub seed: Seed,
    pub prior: BaseMeasureSpec,
    pub n_draws: usize,
    pub truncation_tol: f64,
}

impl EnsembleSettings {
    pub fn new(seed: Seed, prior: BaseMeasureSpec, n_draws: usize) -> Self {
        Self {
            seed,
            prior,
            n_draws,
            truncation_tol: DEFAULT_TRUNCATION_TOL,
        }
    }

    /// Default prior for `data`; see [`BaseMeasureSpec::default_for`].
    pub fn default_for(data: &[f64], seed: Seed, n_draws: usize) -> Result<Self> {
        Ok(Self::new(seed, BaseMeasureSpec::default_for(data)?, n_draws))
    }
}

/// Draws of one functional at a fixed set of queries.
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorEnsemble {
    pub queries: QueryGrid,
    pub draws: DrawMatrix,
    pub target: Target,
    pub settings: EnsembleSettings,
}

/// The `V` and `F` surfaces computed from the same draws.
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorPair {
    pub v: PosteriorEnsemble,
    pub f: PosteriorEnsemble,
}

/// Seed of posterior draw `index`.
pub fn draw_seed(seed: Seed, index: usize) -> Seed {
    seed.path(&[label::POSTERIOR, index as u64])
}

/// Seed of bootstrap resample `index`.
pub fn resample_seed(seed: Seed, index: usize) -> Seed {
    seed.path(&[label::BOOTSTRAP, index as u64])
}

/// Isotonized inverse estimator `V̂_n` with `V̂_n` and `F̂_n` at the queries.
#[derive(Debug, Clone, PartialEq)]
pub struct Iie {
    pub vhat: StepFn,
    pub v_values: Vec<f64>,
    pub f_values: Vec<f64>,
}

pub fn iie(data: &[f64], queries: &QueryGrid) -> Result<Iie> {
    let vhat = isotonize_measure(&empirical_measure(data)?);
    let v_values = queries.points().iter().map(|&x| vhat.eval(x)).collect();
    let f_values = queries.points().iter().map(|&x| f_hat(&vhat, x)).collect();
    Ok(Iie {
        vhat,
        v_values,
        f_values,
    })
}

/// Sorted distinct data values; `group[i]` locates observation `i`.
struct Support {
    z: Vec<f64>,
    sqrt_z: Vec<f64>,
    group: Vec<usize>,
}

impl Support {
    fn new(data: &[f64]) -> Self {
        let mut z = data.to_vec();
        sort_f64(&mut z);
        z.dedup();
        let group = data
            .iter()
            .map(|x| z.partition_point(|v| v < x))
            .collect();
        let sqrt_z = z.iter().map(|v| sqrt(*v)).collect();
        Self { z, sqrt_z, group }
    }

    fn len(&self) -> usize {
        self.z.len()
    }
}

/// `out[j·lanes + c] = Σ_{i>j} w[i·lanes + c] · sqrt(z_i - z_j)`.
fn upper_kernel(z: &[f64], w: &[f64], lanes: usize, out: &mut [f64]) {
    let m = z.len();
    for j in 0..m {
        let (head, _) = out[j * lanes..].split_at_mut(lanes);
        head.fill(0.0);
        let zj = z[j];
        for i in j + 1..m {
            let k = sqrt(z[i] - zj);
            let wi = &w[i * lanes..(i + 1) * lanes];
            for (o, wv) in head.iter_mut().zip(wi) {
                *o += k * wv;
            }
        }
    }
}

/// Extra atoms of a draw that lie off the shared support, sorted.
struct ExtraAtoms {
    atoms: Vec<f64>,
    weights: Vec<f64>,
}

impl ExtraAtoms {
    fn none() -> Self {
        Self {
            atoms: Vec::new(),
            weights: Vec::new(),
        }
    }

    fn from_draw(draw: &DpDraw) -> Self {
        let mut pairs: Vec<(f64, f64)> = draw
            .prior_atoms
            .iter()
            .zip(&draw.prior_weights)
            .map(|(a, w)| (*a, draw.mixing_weight * w))
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        Self {
            atoms: pairs.iter().map(|p| p.0).collect(),
            weights: pairs.iter().map(|p| p.1).collect(),
        }
    }

    /// `U` of the extra atoms alone at `x`.
    fn u(&self, total: f64, x: f64) -> f64 {
        let start = self.atoms.partition_point(|a| *a <= x);
        let mut tail = 0.0;
        for (a, w) in self.atoms[start..].iter().zip(&self.weights[start..]) {
            tail += w * sqrt(a - x);
        }
        2.0 * (total - tail)
    }

    fn total(&self) -> f64 {
        self.atoms
            .iter()
            .zip(&self.weights)
            .map(|(a, w)| w * sqrt(*a))
            .sum()
    }
}

/// Reusable buffers for isotonizing one lane.
#[derive(Default)]
struct HullScratch {
    xs: Vec<f64>,
    ys: Vec<f64>,
    idx: Vec<usize>,
}

/// Isotonized `V̂` and `F̂` at the queries for blocks of draws sharing a
/// support. `weights` is `support × lanes`; each lane may carry extra atoms.
fn isotonize_block(
    support: &Support,
    weights: &[f64],
    lanes: usize,
    extras: &[ExtraAtoms],
    kernel: &mut Vec<f64>,
    scratch: &mut HullScratch,
    mut emit: impl FnMut(usize, &StepFn),
) {
    let m = support.len();
    kernel.resize(m * lanes, 0.0);
    upper_kernel(&support.z, weights, lanes, kernel);
    for c in 0..lanes {
        let data_total: f64 = (0..m).map(|i| weights[i * lanes + c] * support.sqrt_z[i]).sum();
        let extra = &extras[c];
        let extra_total = extra.total();
        let data_u_at = |x: f64| {
            let start = support.z.partition_point(|v| *v <= x);
            let mut tail = 0.0;
            for i in start..m {
                tail += weights[i * lanes + c] * sqrt(support.z[i] - x);
            }
            2.0 * (data_total - tail)
        };

        let HullScratch { xs, ys, idx } = scratch;
        xs.clear();
        ys.clear();
        xs.push(0.0);
        ys.push(0.0);
        let (mut i, mut k) = (0, 0);
        while i < m || k < extra.atoms.len() {
            let take_data = k >= extra.atoms.len() || (i < m && support.z[i] <= extra.atoms[k]);
            let (x, y) = if take_data {
                let x = support.z[i];
                let y = 2.0 * (data_total - kernel[i * lanes + c]) + extra.u(extra_total, x);
                if k < extra.atoms.len() && extra.atoms[k] == x {
                    k += 1;
                }
                i += 1;
                (x, y)
            } else {
                let x = extra.atoms[k];
                k += 1;
                (x, data_u_at(x) + extra.u(extra_total, x))
            };
            if x > 0.0 {
                xs.push(x);
                ys.push(y);
            }
        }
        upper_hull(xs, ys, idx);
        let breakpoints: Vec<f64> = idx.iter().map(|&j| xs[j]).collect();
        let values: Vec<f64> = idx
            .windows(2)
            .map(|w| ((ys[w[1]] - ys[w[0]]) / (xs[w[1]] - xs[w[0]])).max(0.0))
            .collect();
        let step = StepFn::new(breakpoints, values, 0.0).expect("hull abscissae are increasing");
        emit(c, &step);
    }
}

fn check_draws(n_draws: usize) -> Result<()> {
    if n_draws == 0 {
        return Err(invalid("at least one posterior draw is required"));
    }
    Ok(())
}

fn fill_rows(step: &StepFn, queries: &[f64], v_row: &mut [f64], f_row: &mut [f64]) {
    for (q, &x) in queries.iter().enumerate() {
        v_row[q] = step.eval(x);
        f_row[q] = f_hat(step, x);
    }
}

/// Isotonized inverse posterior: each DP-posterior draw mapped to `V̂_G`
/// and `F̂_G`.
pub fn iip_ensemble(
    data: &[f64],
    settings: &EnsembleSettings,
    queries: &QueryGrid,
) -> Result<PosteriorPair> {
    check_draws(settings.n_draws)?;
    let posterior = DpPosterior::new(settings.prior.clone(), data.to_vec())?;
    let support = Support::new(data);
    let m = support.len();
    let q = queries.points();
    let mut v = DrawMatrix::zeros(settings.n_draws, q.len());
    let mut f = DrawMatrix::zeros(settings.n_draws, q.len());
    let mut kernel = Vec::new();
    let mut scratch = HullScratch::default();
    let mut start = 0;
    while start < settings.n_draws {
        let lanes = BLOCK.min(settings.n_draws - start);
        let mut weights = vec![0.0; m * lanes];
        let mut extras = Vec::with_capacity(lanes);
        for c in 0..lanes {
            let mut rng = draw_seed(settings.seed, start + c).rng();
            let draw = DpDraw::sample(&posterior, settings.truncation_tol, &mut rng)?;
            let scale = 1.0 - draw.mixing_weight;
            for (obs, b) in draw.bootstrap.iter().enumerate() {
                weights[support.group[obs] * lanes + c] += scale * b;
            }
            extras.push(ExtraAtoms::from_draw(&draw));
        }
        isotonize_block(&support, &weights, lanes, &extras, &mut kernel, &mut scratch, |c, step| {
            let row = start + c;
            let mut vr = vec![0.0; q.len()];
            let mut fr = vec![0.0; q.len()];
            fill_rows(step, q, &mut vr, &mut fr);
            v.row_mut(row).copy_from_slice(&vr);
            f.row_mut(row).copy_from_slice(&fr);
        });
        start += lanes;
    }
    Ok(pair(queries, v, f, Target::VIso, Target::FIso, settings))
}

fn pair(
    queries: &QueryGrid,
    v: DrawMatrix,
    f: DrawMatrix,
    tv: Target,
    tf: Target,
    settings: &EnsembleSettings,
) -> PosteriorPair {
    PosteriorPair {
        v: PosteriorEnsemble {
            queries: queries.clone(),
            draws: v,
            target: tv,
            settings: settings.clone(),
        },
        f: PosteriorEnsemble {
            queries: queries.clone(),
            draws: f,
            target: tf,
            settings: settings.clone(),
        },
    }
}

/// Moves `x` up by whole ulps until it is not an atom.
fn jitter_off(x: f64, atoms: &[f64]) -> f64 {
    let mut y = x;
    while atoms.binary_search_by(|a| a.total_cmp(&y)).is_ok() {
        y = f64::from_bits(y.to_bits() + 1);
    }
    y
}

/// Naive Bayesian posterior: draws of `V_G` and `F_G` without isotonization.
/// Queries that hit an atom of a draw are moved off it by a few ulps.
pub fn nbp_ensemble(
    data: &[f64],
    settings: &EnsembleSettings,
    queries: &QueryGrid,
) -> Result<PosteriorPair> {
    check_draws(settings.n_draws)?;
    let posterior = DpPosterior::new(settings.prior.clone(), data.to_vec())?;
    let q = queries.points();
    let mut v = DrawMatrix::zeros(settings.n_draws, q.len());
    let mut f = DrawMatrix::zeros(settings.n_draws, q.len());
    for d in 0..settings.n_draws {
        let mut rng = draw_seed(settings.seed, d).rng();
        let measure = DpDraw::sample(&posterior, settings.truncation_tol, &mut rng)?.to_measure(data);
        for (j, &x) in q.iter().enumerate() {
            let y = jitter_off(x, measure.atoms());
            v.row_mut(d)[j] = v_of(&measure, y)?;
            f.row_mut(d)[j] = f_naive(&measure, y)?;
        }
    }
    Ok(pair(queries, v, f, Target::VNaive, Target::FNaive, settings))
}

/// Isotonized estimator on `n_boot` multinomial resamples of the data.
pub fn bootstrap_iie_ensemble(
    data: &[f64],
    n_boot: usize,
    queries: &QueryGrid,
    seed: Seed,
) -> Result<PosteriorPair> {
    validate_data(data)?;
    if n_boot == 0 {
        return Err(invalid("at least one bootstrap resample is required"));
    }
    let n = data.len();
    let support = Support::new(data);
    let m = support.len();
    let q = queries.points();
    let mut v = DrawMatrix::zeros(n_boot, q.len());
    let mut f = DrawMatrix::zeros(n_boot, q.len());
    let mut kernel = Vec::new();
    let mut scratch = HullScratch::default();
    let extras: Vec<ExtraAtoms> = (0..BLOCK).map(|_| ExtraAtoms::none()).collect();
    let unit = 1.0 / n as f64;
    let mut start = 0;
    while start < n_boot {
        let lanes = BLOCK.min(n_boot - start);
        let mut weights = vec![0.0; m * lanes];
        for c in 0..lanes {
            let mut rng = resample_seed(seed, start + c).rng();
            for _ in 0..n {
                let obs = rng.random_range(0..n);
                weights[support.group[obs] * lanes + c] += unit;
            }
        }
        isotonize_block(&support, &weights, lanes, &extras, &mut kernel, &mut scratch, |c, step| {
            let row = start + c;
            let mut vr = vec![0.0; q.len()];
            let mut fr = vec![0.0; q.len()];
            fill_rows(step, q, &mut vr, &mut fr);
            v.row_mut(row).copy_from_slice(&vr);
            f.row_mut(row).copy_from_slice(&fr);
        });
        start += lanes;
    }
    let settings = EnsembleSettings {
        seed,
        prior: BaseMeasureSpec::default_for(data)?,
        n_draws: n_boot,
        truncation_tol: DEFAULT_TRUNCATION_TOL,
    };
    Ok(pair(queries, v, f, Target::VIso, Target::FIso, &settings))
}

/// Pointwise equal-tailed band `[q_{α/2}, q_{1-α/2}]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CredibleBand {
    pub queries: QueryGrid,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub alpha: f64,
}

impl CredibleBand {
    pub fn width(&self, index: usize) -> f64 {
        self.upper[index] - self.lower[index]
    }

    pub fn contains(&self, index: usize, value: f64) -> bool {
        self.lower[index] <= value && value <= self.upper[index]
    }
}

/// Bands for `V` and `F` from the same draws.
#[derive(Debug, Clone, PartialEq)]
pub struct BandPair {
    pub v: CredibleBand,
    pub f: CredibleBand,
}

/// `inf{t : F_N(t) ≥ p}` of a sorted sample: the order statistic of rank
/// `ceil(p·N)` (1-based, at least 1).
pub fn empirical_quantile(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    let k = ceil(p * n as f64 - 1e-9).max(1.0) as usize;
    sorted[k.min(n) - 1]
}

/// Smallest number of draws for which the band is defined at level `alpha`.
pub fn min_draws(alpha: f64) -> usize {
    ceil(2.0 / alpha - 1e-9) as usize
}

pub fn credible_band(ensemble: &PosteriorEnsemble, alpha: f64) -> Result<CredibleBand> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(invalid(format!("alpha {alpha} must lie in (0, 1)")));
    }
    let n = ensemble.draws.rows();
    if n < min_draws(alpha) {
        return Err(invalid(format!(
            "{n} draws are too few for alpha = {alpha}; need at least {}",
            min_draws(alpha)
        )));
    }
    let mut lower = Vec::with_capacity(ensemble.draws.cols());
    let mut upper = Vec::with_capacity(ensemble.draws.cols());
    for j in 0..ensemble.draws.cols() {
        let mut col = ensemble.draws.column(j);
        sort_f64(&mut col);
        lower.push(empirical_quantile(&col, alpha / 2.0));
        upper.push(empirical_quantile(&col, 1.0 - alpha / 2.0));
    }
    Ok(CredibleBand {
        queries: ensemble.queries.clone(),
        lower,
        upper,
        alpha,
    })
}

/// Percentile bootstrap bands for the isotonized estimator.
pub fn bootstrap_iie_band(
    data: &[f64],
    n_boot: usize,
    queries: &QueryGrid,
    alpha: f64,
    seed: Seed,
) -> Result<BandPair> {
    if alpha > 0.0 && alpha < 1.0 && n_boot < min_draws(alpha) {
        return Err(invalid(format!(
            "{n_boot} resamples are too few for alpha = {alpha}; need at least {}",
            min_draws(alpha)
        )));
    }
    let ens = bootstrap_iie_ensemble(data, n_boot, queries, seed)?;
    Ok(BandPair {
        v: credible_band(&ens.v, alpha)?,
        f: credible_band(&ens.f, alpha)?,
    })
}
