//! Float helpers routed through `libm` so the crate stays `no_std`.

pub(crate) use core::f64::consts::{FRAC_2_PI, FRAC_PI_2, PI};
pub(crate) use libm::{asin, ceil, exp, fabs, log, pow, sqrt};

/// `sqrt(max(t, 0))`.
#[inline]
pub(crate) fn sqrt_pos(t: f64) -> f64 {
    if t > 0.0 {
        sqrt(t)
    } else {
        0.0
    }
}

/// Sorts a float slice ascending. NaNs are expected to be rejected earlier.
pub(crate) fn sort_f64(v: &mut [f64]) {
    v.sort_unstable_by(|a, b| a.total_cmp(b));
}
