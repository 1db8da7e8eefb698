//! Bayesian nonparametric estimation for Wicksell's problem.
//!
//! Observations `Z = Y·X` are squared section radii (or squared projected
//! distances) with `Y ~ Beta(1, 1/2)` independent of the squared sphere
//! radius `X ~ F0`. A Dirichlet-process prior is placed directly on the
//! distribution `G` of the observables; posterior draws are mapped through
//! the Abel-type functional
//!
//! ```text
//! V_G(x) = ∫_{(x,∞)} (z - x)^{-1/2} dG(z)
//! ```
//!
//! and projected onto nonincreasing functions by taking the right derivative
//! of the least concave majorant of `U_G(x) = ∫_0^x V_G`. The resulting
//! isotonized draws give credible intervals for `V0(x)` and `F0(x)` without
//! estimating the local smoothness of `F0`.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, experiment
//! harnesses and the command line live in the `wicksell` crate.

#![no_std]
#![allow(clippy::excessive_precision, clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

mod error;
pub mod estimators;
pub mod isotonize;
pub(crate) mod math;
pub mod measures;
pub mod model;
pub mod normality;
pub mod quadrature;
pub mod rng;
pub mod transform;

pub use error::{Error, Result};
pub use estimators::{
    bootstrap_iie_band, bootstrap_iie_ensemble, credible_band, draw_seed, empirical_quantile,
    iie, iip_ensemble, min_draws, nbp_ensemble, resample_seed, BandPair, CredibleBand,
    DrawMatrix, EnsembleSettings, Iie, PosteriorEnsemble, PosteriorPair, Target,
};
pub use isotonize::{
    concave_majorant, f_hat, isotonize_measure, lcm_from_points, pava_decreasing, switch_argmax,
    u_points, ConcaveMajorantFn, StepFn,
};
pub use measures::{
    draw_bayesian_bootstrap, draw_dp_posterior, empirical_measure, BaseFamily, BaseMeasureSpec,
    DiscreteMeasure, DpDraw, DpPosterior, DEFAULT_TRUNCATION_TOL,
};
pub use model::{
    holder_cdf, holder_inverse, model_truth, sample_observables, ModelTruth, Provenance,
    SampleSet, Smoothness, TabulatedCdf, TrueModel,
};
pub use normality::{normality_diagnostic, NormalityDiagnostic};
pub use quadrature::Quadrature;
pub use rng::{Seed, StreamRng};
pub use transform::{
    arcsin_tail, arcsin_tail_with, f0_from_v, f_naive, forward_density, fstar_from_v, u_of, v0_oracle, v_of,
    QueryGrid,
};
