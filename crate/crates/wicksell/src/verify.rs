//! Identity checks run by `wicksell verify`.
//!
//! Each check compares a library routine against an independent computation:
//! quadrature for the inversion and arcsin identities, a Jarvis march over a
//! dense grid for the hull, pool-adjacent-violators for the projection, a
//! direct argmax for the switch relation and Marshall's inequality for the
//! majorant.

use std::f64::consts::FRAC_PI_2;
use std::time::Instant;

use rand::Rng;
use serde::{Deserialize, Serialize};

use wicksell_core::{
    arcsin_tail_with, concave_majorant, f0_from_v, isotonize_measure, pava_decreasing,
    switch_argmax, u_of, u_points, v0_oracle, DiscreteMeasure, Quadrature, Seed, TrueModel,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub seed: u64,
    pub roundtrip_tol: f64,
    pub roundtrip_points: usize,
    pub arcsin_tol: f64,
    pub arcsin_measures: usize,
    pub hull_tol: f64,
    pub hull_measures: usize,
    pub hull_max_atoms: usize,
    pub hull_grid: usize,
    pub switch_pairs: usize,
    pub marshall_measures: usize,
    /// Leading constant of the arcsin identity; `π/2` unless testing the suite.
    pub half_pi: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seed: 20_240_601,
            roundtrip_tol: 1e-6,
            roundtrip_points: 50,
            arcsin_tol: 1e-8,
            arcsin_measures: 100,
            hull_tol: 1e-6,
            hull_measures: 100,
            hull_max_atoms: 200,
            hull_grid: 100_000,
            switch_pairs: 1000,
            marshall_measures: 50,
            half_pi: FRAC_PI_2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    /// Largest discrepancy seen, or the violation count for counting checks.
    pub worst: f64,
    pub tolerance: f64,
    pub detail: String,
    pub seconds: f64,
}

fn finish(name: &str, start: Instant, worst: f64, tolerance: f64, detail: String) -> CheckResult {
    CheckResult {
        name: name.into(),
        passed: worst <= tolerance,
        worst,
        tolerance,
        detail,
        seconds: start.elapsed().as_secs_f64(),
    }
}

fn failed(name: &str, start: Instant, tolerance: f64, detail: String) -> CheckResult {
    CheckResult {
        name: name.into(),
        passed: false,
        worst: f64::INFINITY,
        tolerance,
        detail,
        seconds: start.elapsed().as_secs_f64(),
    }
}

/// Atoms uniform on `[0, 8)` with positive masses; `1..=max_atoms` atoms.
pub fn random_measure<R: Rng>(rng: &mut R, max_atoms: usize) -> DiscreteMeasure {
    let k = rng.random_range(1..=max_atoms);
    let atoms: Vec<f64> = (0..k).map(|_| 8.0 * rng.random::<f64>()).collect();
    let masses: Vec<f64> = (0..k).map(|_| 0.01 + rng.random::<f64>()).collect();
    DiscreteMeasure::from_masses(atoms, masses).expect("valid random measure")
}

/// `F0` recovered from the quadrature `V0` on a midpoint grid of the support.
pub fn check_round_trip(spec: &str, cfg: &VerifyConfig) -> CheckResult {
    let name = format!("f0_round_trip[{spec}]");
    let start = Instant::now();
    let model = match TrueModel::parse(spec) {
        Ok(m) => m,
        Err(e) => return failed(&name, start, cfg.roundtrip_tol, e.to_string()),
    };
    let q = Quadrature::with_tol(1e-11);
    let top = model.support_end().unwrap_or(6.0);
    let knots = model.knots();
    let mut worst: f64 = 0.0;
    let mut at = 0.0;
    let n = cfg.roundtrip_points;
    for i in 0..n {
        let x = top * (i as f64 + 0.5) / n as f64;
        match f0_from_v(|s| v0_oracle(&model, s, &q), x, &knots, model.support_end(), &q) {
            Ok(f) => {
                let err = (f - model.cdf(x)).abs();
                if err > worst {
                    worst = err;
                    at = x;
                }
            }
            Err(e) => return failed(&name, start, cfg.roundtrip_tol, format!("x = {x}: {e}")),
        }
    }
    finish(&name, start, worst, cfg.roundtrip_tol, format!("{n} points, worst at x = {at}"))
}

/// `∫_x^z ds / (2 sqrt(s (z - s)))` by quadrature, split at the midpoint so
/// each half has its singularity at the substituted endpoint.
fn arcsin_piece(q: &Quadrature, x: f64, z: f64) -> wicksell_core::Result<f64> {
    let mid = 0.5 * (x + z);
    let left = q.integrate_sqrt_lower(|s, _| 0.5 / (s.sqrt() * (z - s).sqrt()), x, mid)?;
    let right = q.integrate_sqrt_lower(|d, _| 0.5 / ((z - d).sqrt() * d.sqrt()), 0.0, z - mid)?;
    Ok(left + right)
}

pub fn check_arcsin(cfg: &VerifyConfig) -> CheckResult {
    let name = "arcsin_identity";
    let start = Instant::now();
    let mut rng = Seed(cfg.seed).child(1).rng();
    let q = Quadrature::with_tol(1e-12);
    let mut worst: f64 = 0.0;
    for _ in 0..cfg.arcsin_measures {
        let m = random_measure(&mut rng, 200);
        let x = 9.0 * rng.random::<f64>();
        let mut quad = 0.0;
        for (z, w) in m.iter() {
            if z > x {
                match arcsin_piece(&q, x, z) {
                    Ok(v) => quad += w * v,
                    Err(e) => return failed(name, start, cfg.arcsin_tol, e.to_string()),
                }
            }
        }
        match arcsin_tail_with(&m, x, cfg.half_pi) {
            Ok(closed) => worst = worst.max((closed - quad).abs()),
            Err(e) => return failed(name, start, cfg.arcsin_tol, e.to_string()),
        }
    }
    finish(name, start, worst, cfg.arcsin_tol, format!("{} measures", cfg.arcsin_measures))
}

/// Indices of the upper hull by Jarvis march: from each vertex, the farthest
/// point of maximal slope.
pub fn gift_wrap(xs: &[f64], ys: &[f64]) -> Vec<usize> {
    let mut out = vec![0];
    let mut cur = 0;
    while cur + 1 < xs.len() {
        let mut best = cur + 1;
        let mut best_slope = (ys[best] - ys[cur]) / (xs[best] - xs[cur]);
        for j in cur + 2..xs.len() {
            let s = (ys[j] - ys[cur]) / (xs[j] - xs[cur]);
            if s >= best_slope {
                best = j;
                best_slope = s;
            }
        }
        out.push(best);
        cur = best;
    }
    out
}

/// Uniform grid on `[0, max atom + 0.5]` merged with the atoms.
fn hull_grid(m: &DiscreteMeasure, points: usize) -> Vec<f64> {
    let top = m.max_atom() + 0.5;
    let mut xs: Vec<f64> = (0..=points).map(|i| top * i as f64 / points as f64).collect();
    xs.extend_from_slice(m.atoms());
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    xs
}

/// Hull and projection checks share the grid evaluation of `U`.
pub fn check_hull_and_pava(cfg: &VerifyConfig) -> (CheckResult, CheckResult) {
    let start = Instant::now();
    let mut rng = Seed(cfg.seed).child(2).rng();
    let mut hull_worst: f64 = 0.0;
    let mut pava_worst: f64 = 0.0;
    let mut pava_time = 0.0;
    for _ in 0..cfg.hull_measures {
        let m = random_measure(&mut rng, cfg.hull_max_atoms);
        let vhat = isotonize_measure(&m);
        let maj = concave_majorant(&m);
        let xs = hull_grid(&m, cfg.hull_grid);
        let ys: Vec<f64> = xs.iter().map(|&x| u_of(&m, x)).collect();
        let idx = gift_wrap(&xs, &ys);
        for w in idx.windows(2) {
            let slope = (ys[w[1]] - ys[w[0]]) / (xs[w[1]] - xs[w[0]]);
            for i in w[0]..=w[1] {
                let lcm = ys[w[0]] + slope * (xs[i] - xs[w[0]]);
                hull_worst = hull_worst.max((lcm - maj.eval(xs[i])).abs());
            }
            let mid = 0.5 * (xs[w[0]] + xs[w[1]]);
            hull_worst = hull_worst.max((slope.max(0.0) - vhat.eval(mid)).abs());
        }

        let p_start = Instant::now();
        let avg: Vec<f64> = xs
            .windows(2)
            .zip(ys.windows(2))
            .map(|(x, y)| (y[1] - y[0]) / (x[1] - x[0]))
            .collect();
        let widths: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
        match pava_decreasing(&avg, &widths) {
            Ok(proj) => {
                for (i, p) in proj.iter().enumerate() {
                    let mid = 0.5 * (xs[i] + xs[i + 1]);
                    pava_worst = pava_worst.max((p.max(0.0) - vhat.eval(mid)).abs());
                }
            }
            Err(_) => pava_worst = f64::INFINITY,
        }
        pava_time += p_start.elapsed().as_secs_f64();
    }
    let detail = format!(
        "{} measures of at most {} atoms, {}-point grid plus atoms",
        cfg.hull_measures, cfg.hull_max_atoms, cfg.hull_grid
    );
    let mut hull = finish("hull_brute_force", start, hull_worst, cfg.hull_tol, detail.clone());
    hull.seconds -= pava_time;
    let mut pava = finish("pava_projection", start, pava_worst, cfg.hull_tol, detail);
    pava.seconds = pava_time;
    (hull, pava)
}

/// `T(a) <= x` iff `V̂(x) <= a` on random pairs; `worst` counts violations.
pub fn check_switch(cfg: &VerifyConfig) -> CheckResult {
    let start = Instant::now();
    let mut rng = Seed(cfg.seed).child(3).rng();
    let per_measure = 100;
    let mut violations = 0usize;
    let mut done = 0usize;
    while done < cfg.switch_pairs {
        let m = random_measure(&mut rng, 60);
        let pts = u_points(&m);
        let vhat = isotonize_measure(&m);
        let top = vhat.values().first().copied().unwrap_or(1.0) * 1.2 + 0.1;
        for _ in 0..per_measure.min(cfg.switch_pairs - done) {
            let a = top * rng.random::<f64>();
            let x = (m.max_atom() + 1.0) * rng.random::<f64>();
            if (switch_argmax(&pts, a) <= x) != (vhat.eval(x) <= a) {
                violations += 1;
            }
            done += 1;
        }
    }
    finish(
        "switch_relation",
        start,
        violations as f64,
        0.0,
        format!("{violations} violations in {} pairs", cfg.switch_pairs),
    )
}

/// `sup |Û - H| <= sup |U - H|` for concave `H`, both sups over grid and atoms.
pub fn check_marshall(cfg: &VerifyConfig) -> CheckResult {
    let start = Instant::now();
    let mut rng = Seed(cfg.seed).child(4).rng();
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..cfg.marshall_measures {
        let m = random_measure(&mut rng, 60);
        let maj = concave_majorant(&m);
        let total = u_of(&m, m.max_atom());
        let (a, b, c) = (
            total * rng.random::<f64>(),
            0.2 + 2.0 * rng.random::<f64>(),
            total * rng.random::<f64>() / 3.0,
        );
        let h = |x: f64| a * (1.0 - (-b * x).exp()) + c * x.sqrt();
        let xs = hull_grid(&m, 5000);
        let (mut lhs, mut rhs) = (0.0f64, 0.0f64);
        for &x in &xs {
            lhs = lhs.max((maj.eval(x) - h(x)).abs());
            rhs = rhs.max((u_of(&m, x) - h(x)).abs());
        }
        worst = worst.max(lhs - rhs);
    }
    finish(
        "marshall_inequality",
        start,
        worst.max(0.0),
        1e-12,
        format!("largest excess {worst:e} over {} measures", cfg.marshall_measures),
    )
}

pub fn run_all(cfg: &VerifyConfig) -> Vec<CheckResult> {
    let mut out = vec![
        check_round_trip("exp:1.2", cfg),
        check_round_trip("holder:0.8", cfg),
        check_arcsin(cfg),
    ];
    let (hull, pava) = check_hull_and_pava(cfg);
    out.push(hull);
    out.push(pava);
    out.push(check_switch(cfg));
    out.push(check_marshall(cfg));
    out
}
