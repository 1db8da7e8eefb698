//! Finite discrete probability measures on `[0, ∞)` and posterior draws.
//!
//! A posterior draw from `DP(α + n·G_n)` is realized through the
//! decomposition `G = V·Q + (1 - V)·B` with `V ~ Beta(|α|, n)`,
//! `Q ~ DP(α)` (truncated stick-breaking) and `B` a Bayesian-bootstrap
//! reweighting of the data, all independent.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::Rng;
use rand_distr::{Beta, Distribution, Exp1};

use crate::error::{invalid, Error, Result};
use crate::math::{fabs, pow, sort_f64};
use crate::model::TabulatedCdf;

/// Residual stick mass at which stick-breaking stops.
pub const DEFAULT_TRUNCATION_TOL: f64 = 1e-4;

const SUM_TOL: f64 = 1e-9;

/// Probability measure with finitely many atoms.
///
/// Atoms are strictly increasing and nonnegative; weights are nonnegative and
/// sum to one. Construction canonicalizes: atoms are sorted and duplicates are
/// merged by summing their weights.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure {
    atoms: Vec<f64>,
    weights: Vec<f64>,
}

impl DiscreteMeasure {
    /// Builds a measure from atoms and weights that already sum to one
    /// (up to rounding; the weights are renormalized).
    pub fn new(atoms: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        validate_parts(&atoms, &weights)?;
        let total: f64 = weights.iter().sum();
        if fabs(total - 1.0) > SUM_TOL {
            return Err(invalid(format!("weights sum to {total}, expected 1")));
        }
        Ok(Self::canonical(atoms, weights))
    }

    /// Builds a measure from nonnegative masses, normalizing them to sum one.
    pub fn from_masses(atoms: Vec<f64>, masses: Vec<f64>) -> Result<Self> {
        validate_parts(&atoms, &masses)?;
        let total: f64 = masses.iter().sum();
        if !(total > 0.0) || !total.is_finite() {
            return Err(invalid("total mass must be positive and finite"));
        }
        Ok(Self::canonical(atoms, masses))
    }

    pub fn point_mass(atom: f64) -> Result<Self> {
        Self::new(alloc::vec![atom], alloc::vec![1.0])
    }

    fn canonical(atoms: Vec<f64>, weights: Vec<f64>) -> Self {
        let mut pairs: Vec<(f64, f64)> = atoms.into_iter().zip(weights).collect();
        if !pairs.windows(2).all(|w| w[0].0 < w[1].0) {
            pairs.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
        }
        let mut atoms = Vec::with_capacity(pairs.len());
        let mut weights: Vec<f64> = Vec::with_capacity(pairs.len());
        for (z, w) in pairs {
            match atoms.last() {
                Some(&last) if last == z => *weights.last_mut().unwrap() += w,
                _ => {
                    atoms.push(z);
                    weights.push(w);
                }
            }
        }
        // weights already normalized up to summation rounding are left
        // alone, which keeps canonicalization idempotent
        let total: f64 = weights.iter().sum();
        if fabs(total - 1.0) > 4.0 * f64::EPSILON * weights.len() as f64 {
            weights.iter_mut().for_each(|w| *w /= total);
        }
        DiscreteMeasure { atoms, weights }
    }

    /// Re-runs canonicalization. A canonical measure is returned unchanged.
    pub fn canonicalize(&self) -> Self {
        Self::canonical(self.atoms.clone(), self.weights.clone())
    }

    pub fn atoms(&self) -> &[f64] {
        &self.atoms
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn max_atom(&self) -> f64 {
        *self.atoms.last().expect("measure has at least one atom")
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.atoms.iter().copied().zip(self.weights.iter().copied())
    }

    /// `Σ w_i f(z_i)`; fails if `f` is not finite at some atom.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> Result<f64> {
        let mut acc = 0.0;
        for (z, w) in self.iter() {
            let v = f(z);
            if !v.is_finite() {
                return Err(Error::NumericDomain {
                    atom: z,
                    what: format!("integrand evaluates to {v}"),
                });
            }
            acc += w * v;
        }
        Ok(acc)
    }

    /// Mass on atoms that are not in `support` (which must be sorted).
    pub fn mass_outside(&self, support: &[f64]) -> f64 {
        self.iter()
            .filter(|(z, _)| support.binary_search_by(|s| s.total_cmp(z)).is_err())
            .map(|(_, w)| w)
            .sum()
    }
}

/// Free-function form of [`DiscreteMeasure::integrate`].
pub fn integrate(measure: &DiscreteMeasure, f: impl Fn(f64) -> f64) -> Result<f64> {
    measure.integrate(f)
}

fn validate_parts(atoms: &[f64], weights: &[f64]) -> Result<()> {
    if atoms.is_empty() {
        return Err(invalid("measure needs at least one atom"));
    }
    if atoms.len() != weights.len() {
        return Err(invalid(format!(
            "{} atoms but {} weights",
            atoms.len(),
            weights.len()
        )));
    }
    if let Some(z) = atoms.iter().find(|z| !(z.is_finite() && **z >= 0.0)) {
        return Err(invalid(format!("atom {z} is not a finite nonnegative real")));
    }
    if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
        return Err(invalid(format!("weight {w} is not a finite nonnegative real")));
    }
    Ok(())
}

pub(crate) fn validate_data(data: &[f64]) -> Result<()> {
    if data.is_empty() {
        return Err(invalid("data must be nonempty"));
    }
    if let Some((i, z)) = data
        .iter()
        .enumerate()
        .find(|(_, z)| !(z.is_finite() && **z >= 0.0))
    {
        return Err(invalid(format!(
            "observation {i} = {z} is not a finite nonnegative real"
        )));
    }
    Ok(())
}

/// Empirical measure `G_n = n^{-1} Σ δ_{Z_i}`; ties become multiplicity weights.
pub fn empirical_measure(data: &[f64]) -> Result<DiscreteMeasure> {
    validate_data(data)?;
    let mut sorted = data.to_vec();
    sort_f64(&mut sorted);
    let n = sorted.len() as f64;
    let mut atoms: Vec<f64> = Vec::new();
    let mut counts: Vec<usize> = Vec::new();
    for z in sorted {
        if atoms.last() == Some(&z) {
            *counts.last_mut().unwrap() += 1;
        } else {
            atoms.push(z);
            counts.push(1);
        }
    }
    let weights = counts.into_iter().map(|c| c as f64 / n).collect();
    Ok(DiscreteMeasure::canonical(atoms, weights))
}

/// Normalized i.i.d. standard exponentials, one per observation.
pub(crate) fn bootstrap_weights<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    let mut eps: Vec<f64> = (0..n).map(|_| Exp1.sample(rng)).collect();
    let total: f64 = eps.iter().sum();
    eps.iter_mut().for_each(|e| *e /= total);
    eps
}

/// Bayesian bootstrap: a `DP(n·G_n)` draw, i.e. the data reweighted by
/// `ε_i / Σ ε_j` with `ε_i` i.i.d. standard exponential.
pub fn draw_bayesian_bootstrap<R: Rng + ?Sized>(
    data: &[f64],
    rng: &mut R,
) -> Result<DiscreteMeasure> {
    validate_data(data)?;
    let w = bootstrap_weights(data.len(), rng);
    Ok(DiscreteMeasure::canonical(data.to_vec(), w))
}

/// Base measure family of the Dirichlet-process prior.
#[derive(Debug, Clone, PartialEq)]
pub enum BaseFamily {
    Exponential { rate: f64 },
    Uniform { upper: f64 },
    Tabulated(TabulatedCdf),
}

/// Prior `α = |α| · base`.
#[derive(Debug, Clone, PartialEq)]
pub struct BaseMeasureSpec {
    total_mass: f64,
    family: BaseFamily,
}

impl BaseMeasureSpec {
    pub fn new(total_mass: f64, family: BaseFamily) -> Result<Self> {
        if !(total_mass > 0.0 && total_mass.is_finite()) {
            return Err(invalid(format!("prior mass {total_mass} must be positive")));
        }
        match &family {
            BaseFamily::Exponential { rate } if !(*rate > 0.0 && rate.is_finite()) => {
                return Err(invalid(format!("exponential rate {rate} must be positive")))
            }
            BaseFamily::Uniform { upper } if !(*upper > 0.0 && upper.is_finite()) => {
                return Err(invalid(format!("uniform upper bound {upper} must be positive")))
            }
            BaseFamily::Tabulated(t) if !t.has_bounded_density() => {
                return Err(invalid(
                    "tabulated base cdf must be strictly increasing in x (bounded density)",
                ))
            }
            _ => {}
        }
        Ok(Self { total_mass, family })
    }

    /// `1 · Exponential(rate = 1 / mean(data))`; rate 1 when the data mean is 0.
    pub fn default_for(data: &[f64]) -> Result<Self> {
        validate_data(data)?;
        let mean = data.iter().sum::<f64>() / data.len() as f64;
        let rate = if mean > 0.0 { 1.0 / mean } else { 1.0 };
        Self::new(1.0, BaseFamily::Exponential { rate })
    }

    /// Parses a base family `exp:<rate>`, `uniform:<upper>` or
    /// `tab:<x>/<p>,...` for a prior of mass `total_mass`.
    pub fn parse(total_mass: f64, family: &str) -> Result<Self> {
        let family = match crate::model::TrueModel::parse(family)? {
            crate::model::TrueModel::Exponential { rate } => BaseFamily::Exponential { rate },
            crate::model::TrueModel::Tabulated(t) => {
                let uniform = t.xs().len() == 2 && t.xs()[0] == 0.0 && t.ps() == [0.0, 1.0];
                if uniform {
                    BaseFamily::Uniform { upper: t.xs()[1] }
                } else {
                    BaseFamily::Tabulated(t)
                }
            }
            crate::model::TrueModel::HolderPeak { .. } => {
                return Err(invalid(format!(
                    "`{family}` has an unbounded density and cannot serve as a base measure"
                )))
            }
        };
        Self::new(total_mass, family)
    }

    /// Family in the syntax accepted by [`BaseMeasureSpec::parse`].
    pub fn family_spec(&self) -> String {
        match &self.family {
            BaseFamily::Exponential { rate } => format!("exp:{rate}"),
            BaseFamily::Uniform { upper } => format!("uniform:{upper}"),
            BaseFamily::Tabulated(t) => crate::model::TrueModel::Tabulated(t.clone()).spec(),
        }
    }

    pub fn total_mass(&self) -> f64 {
        self.total_mass
    }

    pub fn family(&self) -> &BaseFamily {
        &self.family
    }

    pub fn sample_atom<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match &self.family {
            BaseFamily::Exponential { rate } => {
                let e: f64 = Exp1.sample(rng);
                e / rate
            }
            BaseFamily::Uniform { upper } => upper * rng.random::<f64>(),
            BaseFamily::Tabulated(t) => t.quantile(rng.random::<f64>()),
        }
    }
}

/// Posterior `DP(α + n·G_n)` given observations.
#[derive(Debug, Clone, PartialEq)]
pub struct DpPosterior {
    prior: BaseMeasureSpec,
    data: Vec<f64>,
}

impl DpPosterior {
    pub fn new(prior: BaseMeasureSpec, data: Vec<f64>) -> Result<Self> {
        validate_data(&data)?;
        Ok(Self { prior, data })
    }

    pub fn prior(&self) -> &BaseMeasureSpec {
        &self.prior
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn n(&self) -> usize {
        self.data.len()
    }
}

/// One posterior draw kept in decomposed form.
///
/// `bootstrap[i]` is the Bayesian-bootstrap weight of observation `i`, so the
/// full measure puts `(1 - mixing_weight) * bootstrap[i]` on data point `i`
/// and `mixing_weight * prior_weights[k]` on `prior_atoms[k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DpDraw {
    pub mixing_weight: f64,
    pub bootstrap: Vec<f64>,
    pub prior_atoms: Vec<f64>,
    pub prior_weights: Vec<f64>,
    /// Number of sticks broken before truncation (the residual atom excluded).
    pub sticks: usize,
}

impl DpDraw {
    pub fn sample<R: Rng + ?Sized>(
        posterior: &DpPosterior,
        truncation_tol: f64,
        rng: &mut R,
    ) -> Result<Self> {
        if !(truncation_tol > 0.0 && truncation_tol < 1.0) {
            return Err(invalid(format!(
                "truncation tolerance {truncation_tol} must lie in (0, 1)"
            )));
        }
        let mass = posterior.prior.total_mass;
        let n = posterior.n() as f64;
        let mixing = Beta::new(mass, n)
            .map_err(|e| invalid(format!("Beta({mass}, {n}): {e}")))?
            .sample(rng);
        let bootstrap = bootstrap_weights(posterior.n(), rng);

        let mut prior_atoms = Vec::new();
        let mut prior_weights = Vec::new();
        let mut residual = 1.0;
        let mut sticks = 0;
        while residual >= truncation_tol {
            // Beta(1, |α|) by inversion.
            let u: f64 = rng.random();
            let frac = 1.0 - pow(u, 1.0 / mass);
            let w = residual * frac;
            prior_atoms.push(posterior.prior.sample_atom(rng));
            prior_weights.push(w);
            residual -= w;
            sticks += 1;
        }
        prior_atoms.push(posterior.prior.sample_atom(rng));
        prior_weights.push(residual.max(0.0));

        Ok(Self {
            mixing_weight: if mixing.is_finite() { mixing } else { 0.0 },
            bootstrap,
            prior_atoms,
            prior_weights,
            sticks,
        })
    }

    /// The combined, canonicalized measure.
    pub fn to_measure(&self, data: &[f64]) -> DiscreteMeasure {
        let v = self.mixing_weight;
        let mut atoms = Vec::with_capacity(data.len() + self.prior_atoms.len());
        let mut weights = Vec::with_capacity(atoms.capacity());
        atoms.extend_from_slice(data);
        weights.extend(self.bootstrap.iter().map(|b| (1.0 - v) * b));
        atoms.extend_from_slice(&self.prior_atoms);
        weights.extend(self.prior_weights.iter().map(|q| v * q));
        DiscreteMeasure::canonical(atoms, weights)
    }
}

/// A draw from `DP(α + n·G_n)`, stick-breaking part truncated once the
/// residual mass drops below `truncation_tol`.
pub fn draw_dp_posterior<R: Rng + ?Sized>(
    posterior: &DpPosterior,
    rng: &mut R,
    truncation_tol: f64,
) -> Result<DiscreteMeasure> {
    Ok(DpDraw::sample(posterior, truncation_tol, rng)?.to_measure(&posterior.data))
}
