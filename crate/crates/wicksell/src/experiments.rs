//! Monte Carlo harnesses: credible-band coverage, posterior variance against
//! the efficient variance, and credible-band widths across the Hölder family.
//!
//! Replication `r` draws its data from `seed / [REPLICATION, r, DATA]` and its
//! posterior and bootstrap streams below `seed / [REPLICATION, r]`.
//! Replications run on the rayon pool and are reduced in index order, so a
//! report depends only on its settings and seed.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use wicksell_core::rng::label;
use wicksell_core::{
    bootstrap_iie_band, credible_band, iie, iip_ensemble, min_draws, model_truth, nbp_ensemble,
    normality_diagnostic, sample_observables, BaseMeasureSpec, EnsembleSettings,
    NormalityDiagnostic, Quadrature, QueryGrid, Seed, TrueModel,
};

pub const SCHEMA: &str = "report_v1";

/// Environment variable holding the default worker count.
pub const THREADS_ENV: &str = "WICKSELL_THREADS";

/// Hölder exponents of the width table.
pub const TABLE_GAMMAS: [f64; 6] = [0.55, 0.6, 0.65, 0.7, 0.8, 1.5];

/// QQ correlation above which a replication counts as normal-looking.
pub const QQ_THRESHOLD: f64 = 0.99;

/// Bounds on the per-replication IIP variance ratio.
pub const RATIO_RANGE: (f64, f64) = (0.6, 1.5);

/// IIP/NBP variance ratio below which a replication shows the efficiency gain.
pub const EFFICIENCY_THRESHOLD: f64 = 0.7;

#[derive(Debug, thiserror::Error)]
pub enum ExperimentError {
    #[error("invalid settings: {0}")]
    Settings(String),
    #[error(transparent)]
    Core(#[from] wicksell_core::Error),
}

type Result<T> = std::result::Result<T, ExperimentError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentKind {
    Coverage,
    Bvm,
    Widths,
}

impl ExperimentKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Coverage => "coverage",
            Self::Bvm => "bvm",
            Self::Widths => "widths",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSettings {
    /// Model spec; ignored by the width table, which uses `holder:<gamma>`.
    pub model: String,
    pub n: usize,
    pub x: f64,
    pub reps: usize,
    pub draws: usize,
    pub alpha: f64,
    pub prior_mass: f64,
    /// Base family of the prior; `None` uses an exponential with the data mean.
    pub prior_family: Option<String>,
    /// Bootstrap resamples per replication; 0 skips the bootstrap.
    pub bootstrap: usize,
    pub gammas: Vec<f64>,
}

impl ExperimentSettings {
    pub fn defaults(kind: ExperimentKind) -> Self {
        let base = Self {
            model: "exp:1.2".into(),
            n: 2000,
            x: 1.5,
            reps: 50,
            draws: 300,
            alpha: 0.05,
            prior_mass: 1.0,
            prior_family: None,
            bootstrap: 0,
            gammas: Vec::new(),
        };
        match kind {
            ExperimentKind::Coverage => Self { reps: 200, ..base },
            ExperimentKind::Bvm => base,
            ExperimentKind::Widths => Self {
                model: "holder".into(),
                x: 5.0,
                reps: 30,
                bootstrap: 300,
                gammas: TABLE_GAMMAS.to_vec(),
                ..base
            },
        }
    }

    /// Defaults for `kind` overlaid with the fields present in `config`.
    pub fn from_config(kind: ExperimentKind, config: &Value) -> Result<Self> {
        let mut merged = serde_json::to_value(Self::defaults(kind)).expect("settings serialize");
        let Value::Object(overrides) = config else {
            return Err(ExperimentError::Settings("config must be a JSON object".into()));
        };
        let target = merged.as_object_mut().expect("settings are an object");
        for (k, v) in overrides {
            target.insert(k.clone(), v.clone());
        }
        serde_json::from_value(merged).map_err(|e| ExperimentError::Settings(e.to_string()))
    }

    pub fn validate(&self, kind: ExperimentKind) -> Result<()> {
        let bad = |msg: String| Err(ExperimentError::Settings(msg));
        if self.reps == 0 {
            return bad("reps must be at least 1".into());
        }
        if self.n == 0 {
            return bad("n must be at least 1".into());
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return bad(format!("alpha {} must lie in (0, 1)", self.alpha));
        }
        if self.draws < min_draws(self.alpha) {
            return bad(format!(
                "draws {} below {} required for alpha {}",
                self.draws,
                min_draws(self.alpha),
                self.alpha
            ));
        }
        if self.bootstrap != 0 && self.bootstrap < min_draws(self.alpha) {
            return bad(format!("bootstrap {} too small for alpha {}", self.bootstrap, self.alpha));
        }
        if !(self.x > 0.0 && self.x.is_finite()) {
            return bad(format!("x {} must be positive and finite", self.x));
        }
        if !(self.prior_mass > 0.0 && self.prior_mass.is_finite()) {
            return bad(format!("prior mass {} must be positive", self.prior_mass));
        }
        if kind == ExperimentKind::Bvm && self.draws < wicksell_core::normality::MIN_SAMPLE {
            return bad(format!(
                "bvm needs at least {} draws",
                wicksell_core::normality::MIN_SAMPLE
            ));
        }
        if kind == ExperimentKind::Widths {
            if self.gammas.is_empty() {
                return bad("width table needs at least one gamma".into());
            }
            for &g in &self.gammas {
                TrueModel::holder(g).map_err(ExperimentError::Core)?;
            }
        } else {
            TrueModel::parse(&self.model)?;
        }
        if let Some(f) = &self.prior_family {
            BaseMeasureSpec::parse(self.prior_mass, f)?;
        }
        Ok(())
    }

    fn prior_for(&self, data: &[f64]) -> Result<BaseMeasureSpec> {
        Ok(match &self.prior_family {
            Some(f) => BaseMeasureSpec::parse(self.prior_mass, f)?,
            None => {
                let d = BaseMeasureSpec::default_for(data)?;
                BaseMeasureSpec::new(self.prior_mass, d.family().clone())?
            }
        })
    }
}

/// `δn = sqrt(log n / n)` and `δn* = δn^(1/γ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scaling {
    pub gamma: f64,
    pub delta_n: f64,
    pub delta_n_star: f64,
}

impl Scaling {
    pub fn new(n: usize, gamma: f64) -> Self {
        let nf = n as f64;
        let delta_n = (nf.ln() / nf).sqrt();
        Self {
            gamma,
            delta_n,
            delta_n_star: delta_n.powf(1.0 / gamma),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalitySummary {
    pub anderson_darling: f64,
    pub p_value: f64,
    pub qq_correlation: f64,
}

impl From<NormalityDiagnostic> for NormalitySummary {
    fn from(d: NormalityDiagnostic) -> Self {
        Self {
            anderson_darling: d.anderson_darling,
            p_value: d.p_value,
            qq_correlation: d.qq_correlation,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageRep {
    pub covered: bool,
    pub lower: f64,
    pub upper: f64,
    pub posterior_variance: f64,
    pub qq_correlation: Option<f64>,
    pub bootstrap_lower: Option<f64>,
    pub bootstrap_upper: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageSummary {
    pub truth_cdf: f64,
    pub coverage_rate: f64,
    pub mean_ci_width: f64,
    /// Posterior variance of the `F` draws, averaged over replications.
    pub empirical_variance: f64,
    pub normality: Option<NormalitySummary>,
    pub qq_pass_fraction: Option<f64>,
    pub bootstrap_coverage_rate: Option<f64>,
    pub mean_bootstrap_width: Option<f64>,
    pub replications: Vec<CoverageRep>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarianceRep {
    pub vhat_n: f64,
    /// `(n / log n)` times the posterior variance of the isotonized `V` draws.
    pub iip_scaled_variance: f64,
    pub nbp_scaled_variance: f64,
    pub iip_ratio: f64,
    pub nbp_ratio: f64,
    pub efficiency_ratio: f64,
    pub qq_correlation_f: f64,
    pub qq_correlation_v: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarianceSummary {
    pub g0: f64,
    pub gamma: f64,
    pub iip_target: f64,
    pub nbp_target: f64,
    pub mean_iip_ratio: f64,
    pub mean_nbp_ratio: f64,
    pub iip_ratio_in_range_fraction: f64,
    pub efficiency_fraction: f64,
    pub qq_pass_fraction: f64,
    pub normality: NormalitySummary,
    pub replications: Vec<VarianceRep>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WidthRow {
    pub gamma: f64,
    pub k: f64,
    pub scaling: Scaling,
    pub truth_cdf: f64,
    pub coverage_rate: f64,
    pub mean_bayes_width: f64,
    pub mean_bootstrap_width: Option<f64>,
    pub bayes_widths: Vec<f64>,
    pub bootstrap_widths: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WidthSummary {
    pub rows: Vec<WidthRow>,
    /// Fraction of replications where the largest-γ width is below the
    /// smallest-γ width on the same seed.
    pub paired_fraction: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub schema: String,
    pub experiment: ExperimentKind,
    pub settings: ExperimentSettings,
    pub seed: u64,
    pub scaling: Vec<Scaling>,
    pub coverage: Option<CoverageSummary>,
    pub variance: Option<VarianceSummary>,
    pub widths: Option<WidthSummary>,
    pub notes: Vec<String>,
    /// Excluded from determinism comparisons.
    pub wall_time_secs: f64,
}

impl ExperimentReport {
    /// The report with its timing zeroed, for reproducibility checks.
    pub fn without_timing(&self) -> Self {
        Self {
            wall_time_secs: 0.0,
            ..self.clone()
        }
    }
}

const BOOTSTRAP_NOTE: &str =
    "bootstrap bands use multinomial resampling of the data with percentile quantiles";
const QUANTILE_NOTE: &str =
    "band endpoints are order statistics k = max(1, ceil(p * N)) of N draws at p = alpha/2 and 1 - alpha/2";

/// Builds a rayon pool sized by [`THREADS_ENV`], falling back to rayon's default.
pub fn thread_pool() -> rayon::ThreadPool {
    let threads = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .unwrap_or(0);
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("thread pool")
}

fn rep_data_seed(seed: Seed, r: usize) -> Seed {
    seed.path(&[label::REPLICATION, r as u64, label::DATA])
}

fn rep_seed(seed: Seed, r: usize) -> Seed {
    seed.path(&[label::REPLICATION, r as u64])
}

fn sample_variance(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    if values.len() < 2 {
        return 0.0;
    }
    let mean = values.iter().sum::<f64>() / n;
    values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

fn fraction(flags: impl Iterator<Item = bool>) -> f64 {
    let (hits, total) = flags.fold((0usize, 0usize), |(h, t), f| (h + f as usize, t + 1));
    hits as f64 / total as f64
}

fn quad() -> Quadrature {
    Quadrature::with_tol(1e-10)
}

fn local_gamma(model: &TrueModel, x: f64) -> f64 {
    match model.smoothness() {
        Some(s) if s.at == x => s.gamma,
        _ => 1.0,
    }
}

pub fn run(kind: ExperimentKind, settings: &ExperimentSettings, seed: Seed) -> Result<ExperimentReport> {
    match kind {
        ExperimentKind::Coverage => coverage_experiment(settings, seed),
        ExperimentKind::Bvm => variance_experiment(settings, seed),
        ExperimentKind::Widths => width_experiment(settings, seed),
    }
}

struct BandRun {
    lower: f64,
    upper: f64,
    variance: f64,
    draws: Vec<f64>,
    bootstrap: Option<(f64, f64)>,
}

fn band_run(
    model: &TrueModel,
    settings: &ExperimentSettings,
    seed: Seed,
    r: usize,
) -> Result<BandRun> {
    let data = sample_observables(model, settings.n, rep_data_seed(seed, r))?.z_values;
    let queries = QueryGrid::single(settings.x)?;
    let ens = EnsembleSettings::new(rep_seed(seed, r), settings.prior_for(&data)?, settings.draws);
    let pair = iip_ensemble(&data, &ens, &queries)?;
    let band = credible_band(&pair.f, settings.alpha)?;
    let draws = pair.f.draws.column(0);
    let bootstrap = if settings.bootstrap > 0 {
        let b = bootstrap_iie_band(
            &data,
            settings.bootstrap,
            &queries,
            settings.alpha,
            rep_seed(seed, r),
        )?;
        Some((b.f.lower[0], b.f.upper[0]))
    } else {
        None
    };
    Ok(BandRun {
        lower: band.lower[0],
        upper: band.upper[0],
        variance: sample_variance(&draws),
        draws,
        bootstrap,
    })
}

/// Frequentist coverage of the IIP credible band for `F0(x)`.
pub fn coverage_experiment(settings: &ExperimentSettings, seed: Seed) -> Result<ExperimentReport> {
    let start = Instant::now();
    settings.validate(ExperimentKind::Coverage)?;
    let model = TrueModel::parse(&settings.model)?;
    let truth = model.cdf(settings.x);
    let runs: Vec<BandRun> = (0..settings.reps)
        .into_par_iter()
        .map(|r| band_run(&model, settings, seed, r))
        .collect::<Result<_>>()?;

    let qq: Vec<Option<f64>> = runs
        .iter()
        .map(|run| normality_diagnostic(&run.draws).ok().map(|d| d.qq_correlation))
        .collect();
    let normality = runs
        .last()
        .and_then(|run| normality_diagnostic(&run.draws).ok())
        .map(NormalitySummary::from);
    let qq_pass_fraction = if settings.draws >= wicksell_core::normality::MIN_SAMPLE {
        Some(fraction(qq.iter().map(|q| q.is_some_and(|q| q > QQ_THRESHOLD))))
    } else {
        None
    };
    let replications: Vec<CoverageRep> = runs
        .iter()
        .zip(&qq)
        .map(|(run, q)| CoverageRep {
            covered: run.lower <= truth && truth <= run.upper,
            lower: run.lower,
            upper: run.upper,
            posterior_variance: run.variance,
            qq_correlation: *q,
            bootstrap_lower: run.bootstrap.map(|b| b.0),
            bootstrap_upper: run.bootstrap.map(|b| b.1),
        })
        .collect();
    let with_boot = settings.bootstrap > 0;
    let widths: Vec<f64> = runs.iter().map(|r| r.upper - r.lower).collect();
    let summary = CoverageSummary {
        truth_cdf: truth,
        coverage_rate: fraction(replications.iter().map(|r| r.covered)),
        mean_ci_width: mean(&widths),
        empirical_variance: mean(&runs.iter().map(|r| r.variance).collect::<Vec<_>>()),
        normality,
        qq_pass_fraction,
        bootstrap_coverage_rate: with_boot.then(|| {
            fraction(runs.iter().map(|r| {
                let (lo, hi) = r.bootstrap.expect("bootstrap run");
                lo <= truth && truth <= hi
            }))
        }),
        mean_bootstrap_width: with_boot.then(|| {
            mean(&runs.iter().map(|r| r.bootstrap.map_or(0.0, |b| b.1 - b.0)).collect::<Vec<_>>())
        }),
        replications,
    };
    let mut notes = vec![QUANTILE_NOTE.to_string()];
    if with_boot {
        notes.push(BOOTSTRAP_NOTE.to_string());
    }
    Ok(ExperimentReport {
        schema: SCHEMA.into(),
        experiment: ExperimentKind::Coverage,
        settings: settings.clone(),
        seed: seed.0,
        scaling: vec![Scaling::new(settings.n, local_gamma(&model, settings.x))],
        coverage: Some(summary),
        variance: None,
        widths: None,
        notes,
        wall_time_secs: start.elapsed().as_secs_f64(),
    })
}

/// Posterior variance of the isotonized and naive `V` draws, scaled by
/// `n / log n` and compared with `g0(x) / (2γ)` and `g0(x)`.
pub fn variance_experiment(settings: &ExperimentSettings, seed: Seed) -> Result<ExperimentReport> {
    let start = Instant::now();
    settings.validate(ExperimentKind::Bvm)?;
    let model = TrueModel::parse(&settings.model)?;
    let gamma = local_gamma(&model, settings.x);
    let g0 = model_truth(&model, settings.x, &quad())?
        .g0
        .expect("x is positive");
    let iip_target = g0 / (2.0 * gamma);
    let nf = settings.n as f64;
    let scale = nf / nf.ln();
    let queries = QueryGrid::single(settings.x)?;

    let per_rep = |r: usize| -> Result<(VarianceRep, Vec<f64>)> {
        let data = sample_observables(&model, settings.n, rep_data_seed(seed, r))?.z_values;
        let point = iie(&data, &queries)?;
        let ens =
            EnsembleSettings::new(rep_seed(seed, r), settings.prior_for(&data)?, settings.draws);
        let iip = iip_ensemble(&data, &ens, &queries)?;
        let nbp = nbp_ensemble(&data, &ens, &queries)?;
        let v_iso = iip.v.draws.column(0);
        let f_iso = iip.f.draws.column(0);
        let iip_var = scale * sample_variance(&v_iso);
        let nbp_var = scale * sample_variance(&nbp.v.draws.column(0));
        let rep = VarianceRep {
            vhat_n: point.v_values[0],
            iip_scaled_variance: iip_var,
            nbp_scaled_variance: nbp_var,
            iip_ratio: iip_var / iip_target,
            nbp_ratio: nbp_var / g0,
            efficiency_ratio: iip_var / nbp_var,
            qq_correlation_f: normality_diagnostic(&f_iso)?.qq_correlation,
            qq_correlation_v: normality_diagnostic(&v_iso)?.qq_correlation,
        };
        Ok((rep, f_iso))
    };
    let results: Vec<(VarianceRep, Vec<f64>)> = (0..settings.reps)
        .into_par_iter()
        .map(per_rep)
        .collect::<Result<_>>()?;
    let last_draws = &results.last().expect("reps >= 1").1;
    let normality = normality_diagnostic(last_draws)?.into();
    let reps: Vec<VarianceRep> = results.into_iter().map(|(r, _)| r).collect();
    let summary = VarianceSummary {
        g0,
        gamma,
        iip_target,
        nbp_target: g0,
        mean_iip_ratio: mean(&reps.iter().map(|r| r.iip_ratio).collect::<Vec<_>>()),
        mean_nbp_ratio: mean(&reps.iter().map(|r| r.nbp_ratio).collect::<Vec<_>>()),
        iip_ratio_in_range_fraction: fraction(
            reps.iter()
                .map(|r| RATIO_RANGE.0 <= r.iip_ratio && r.iip_ratio <= RATIO_RANGE.1),
        ),
        efficiency_fraction: fraction(reps.iter().map(|r| r.efficiency_ratio < EFFICIENCY_THRESHOLD)),
        qq_pass_fraction: fraction(reps.iter().map(|r| r.qq_correlation_f > QQ_THRESHOLD)),
        normality,
        replications: reps,
    };
    Ok(ExperimentReport {
        schema: SCHEMA.into(),
        experiment: ExperimentKind::Bvm,
        settings: settings.clone(),
        seed: seed.0,
        scaling: vec![Scaling::new(settings.n, gamma)],
        coverage: None,
        variance: Some(summary),
        widths: None,
        notes: vec![
            "variances are of draws centered at the same-data isotonized inverse estimator".into(),
        ],
        wall_time_secs: start.elapsed().as_secs_f64(),
    })
}

/// Mean Bayesian and bootstrap band widths for `F` at `x` across Hölder models.
/// Replication `r` shares its seed across exponents, so widths are paired.
pub fn width_experiment(settings: &ExperimentSettings, seed: Seed) -> Result<ExperimentReport> {
    let start = Instant::now();
    settings.validate(ExperimentKind::Widths)?;
    let mut rows = Vec::with_capacity(settings.gammas.len());
    for &gamma in &settings.gammas {
        let model = TrueModel::holder(gamma)?;
        let truth = model.cdf(settings.x);
        let runs: Vec<BandRun> = (0..settings.reps)
            .into_par_iter()
            .map(|r| band_run(&model, settings, seed, r))
            .collect::<Result<_>>()?;
        let bayes_widths: Vec<f64> = runs.iter().map(|r| r.upper - r.lower).collect();
        let bootstrap_widths: Vec<f64> =
            runs.iter().filter_map(|r| r.bootstrap.map(|b| b.1 - b.0)).collect();
        rows.push(WidthRow {
            gamma,
            k: model.smoothness().map_or(f64::NAN, |s| s.k),
            scaling: Scaling::new(settings.n, gamma),
            truth_cdf: truth,
            coverage_rate: fraction(runs.iter().map(|r| r.lower <= truth && truth <= r.upper)),
            mean_bayes_width: mean(&bayes_widths),
            mean_bootstrap_width: (!bootstrap_widths.is_empty()).then(|| mean(&bootstrap_widths)),
            bayes_widths,
            bootstrap_widths,
        });
    }
    let paired_fraction = {
        let lo = rows.iter().min_by(|a, b| a.gamma.total_cmp(&b.gamma));
        let hi = rows.iter().max_by(|a, b| a.gamma.total_cmp(&b.gamma));
        match (lo, hi) {
            (Some(lo), Some(hi)) if lo.gamma < hi.gamma => Some(fraction(
                hi.bayes_widths.iter().zip(&lo.bayes_widths).map(|(h, l)| h < l),
            )),
            _ => None,
        }
    };
    let mut notes = vec![QUANTILE_NOTE.to_string()];
    if settings.bootstrap > 0 {
        notes.push(BOOTSTRAP_NOTE.to_string());
    }
    Ok(ExperimentReport {
        schema: SCHEMA.into(),
        experiment: ExperimentKind::Widths,
        settings: settings.clone(),
        seed: seed.0,
        scaling: rows.iter().map(|r| r.scaling).collect(),
        coverage: None,
        variance: None,
        widths: Some(WidthSummary {
            rows,
            paired_fraction,
        }),
        notes,
        wall_time_secs: start.elapsed().as_secs_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn small(kind: ExperimentKind) -> ExperimentSettings {
        ExperimentSettings {
            n: 200,
            reps: 3,
            draws: 60,
            gammas: if kind == ExperimentKind::Widths { vec![0.8, 1.5] } else { vec![] },
            bootstrap: if kind == ExperimentKind::Widths { 40 } else { 0 },
            ..ExperimentSettings::defaults(kind)
        }
    }

    #[test]
    fn scaling_constants() {
        let s = Scaling::new(2000, 0.8);
        assert_eq!(s.delta_n, (2000f64.ln() / 2000.0).sqrt());
        assert_eq!(s.delta_n_star, s.delta_n.powf(1.25));
    }

    #[test]
    fn config_overlays_defaults() {
        let s = ExperimentSettings::from_config(ExperimentKind::Bvm, &json!({"n": 500, "reps": 4}))
            .unwrap();
        assert_eq!((s.n, s.reps, s.draws, s.x), (500, 4, 300, 1.5));
        assert!(ExperimentSettings::from_config(ExperimentKind::Bvm, &json!({"bogus": 1})).is_err());
        assert!(ExperimentSettings::from_config(ExperimentKind::Bvm, &json!([1])).is_err());
    }

    #[test]
    fn validation() {
        let mut s = small(ExperimentKind::Coverage);
        s.reps = 0;
        assert!(s.validate(ExperimentKind::Coverage).is_err());
        let mut s = small(ExperimentKind::Coverage);
        s.draws = 30;
        assert!(s.validate(ExperimentKind::Coverage).is_err());
        let mut s = small(ExperimentKind::Coverage);
        s.model = "holder:0.4".into();
        assert!(s.validate(ExperimentKind::Coverage).is_err());
        let mut s = small(ExperimentKind::Widths);
        s.gammas = vec![0.5];
        assert!(s.validate(ExperimentKind::Widths).is_err());
    }

    #[test]
    fn reports_are_deterministic() {
        for kind in [ExperimentKind::Coverage, ExperimentKind::Bvm, ExperimentKind::Widths] {
            let s = small(kind);
            let a = run(kind, &s, Seed(11)).unwrap();
            let b = run(kind, &s, Seed(11)).unwrap();
            assert_eq!(a.without_timing(), b.without_timing());
            let c = run(kind, &s, Seed(12)).unwrap();
            assert_ne!(a.without_timing(), c.without_timing());
        }
    }

    #[test]
    fn coverage_summary_is_consistent() {
        let r = coverage_experiment(&small(ExperimentKind::Coverage), Seed(3)).unwrap();
        let c = r.coverage.unwrap();
        assert!((0.0..=1.0).contains(&c.coverage_rate));
        let covered = c.replications.iter().filter(|r| r.covered).count();
        assert_eq!(c.coverage_rate, covered as f64 / 3.0);
        assert!(c.replications.iter().all(|r| r.lower <= r.upper));
        assert_eq!(c.truth_cdf, 1.0 - (-1.8f64).exp());
    }

    #[test]
    fn width_rows_follow_gammas() {
        let r = width_experiment(&small(ExperimentKind::Widths), Seed(5)).unwrap();
        let w = r.widths.unwrap();
        assert_eq!(w.rows.len(), 2);
        assert!(w.paired_fraction.is_some());
        for row in &w.rows {
            assert_eq!(row.bayes_widths.len(), 3);
            assert_eq!(row.bootstrap_widths.len(), 3);
            assert_eq!(row.truth_cdf, 0.5);
            assert_eq!(row.scaling.delta_n_star, row.scaling.delta_n.powf(1.0 / row.gamma));
        }
    }
}
