//! Acceptance run: one PASS/FAIL line per criterion at the documented sizes
//! and tolerances.
//!
//! The process exits 0 after reporting so that `cargo test` stays usable;
//! set `WICKSELL_ACCEPTANCE_STRICT=1` to exit 1 when any criterion fails.

use std::time::Instant;

use wicksell::experiments::{
    coverage_experiment, variance_experiment, width_experiment, ExperimentKind,
    ExperimentSettings, TABLE_GAMMAS,
};
use wicksell::verify::{check_arcsin, check_hull_and_pava, check_round_trip, check_switch, VerifyConfig};
use wicksell_core::Seed;

const SEED: Seed = Seed(1);
const BAYES_WIDTHS: [f64; 6] = [0.114, 0.121, 0.103, 0.101, 0.099, 0.077];
const BOOT_WIDTHS: [f64; 6] = [0.116, 0.110, 0.104, 0.108, 0.100, 0.073];
const WIDTH_TOL: f64 = 0.25;

struct Ledger {
    failures: Vec<String>,
}

impl Ledger {
    fn record(&mut self, id: &str, passed: bool, secs: f64, budget: Option<f64>, detail: String) {
        let in_time = budget.is_none_or(|b| secs < b);
        let ok = passed && in_time;
        let budget = budget.map_or(String::new(), |b| format!(" / {b:.0} s"));
        println!(
            "{} criterion {id}: {detail} [{secs:.1} s{budget}]",
            if ok { "PASS" } else { "FAIL" }
        );
        if !ok {
            self.failures.push(id.to_string());
        }
    }
}

fn within(value: f64, target: f64, rel: f64) -> bool {
    (value - target).abs() <= rel * target
}

fn main() {
    let pool = wicksell::experiments::thread_pool();
    pool.install(run);
}

fn run() {
    let mut ledger = Ledger { failures: Vec::new() };
    let cfg = VerifyConfig::default();

    // 1: inversion round trips and the arcsin identity
    let start = Instant::now();
    let checks = [
        check_round_trip("exp:1.2", &cfg),
        check_round_trip("holder:0.8", &cfg),
        check_arcsin(&cfg),
    ];
    let detail = checks
        .iter()
        .map(|c| format!("{} {:.1e} (tol {:.0e})", c.name, c.worst, c.tolerance))
        .collect::<Vec<_>>()
        .join("; ");
    ledger.record(
        "1",
        checks.iter().all(|c| c.passed),
        start.elapsed().as_secs_f64(),
        Some(60.0),
        detail,
    );

    // 2: hull against brute force, PAVA projection, switch relation
    let start = Instant::now();
    let (hull, pava) = check_hull_and_pava(&cfg);
    let switch = check_switch(&cfg);
    ledger.record(
        "2",
        hull.passed && pava.passed && switch.passed,
        start.elapsed().as_secs_f64(),
        Some(120.0),
        format!(
            "hull sup error {:.1e}, PAVA {:.1e} (tol {:.0e}); {}",
            hull.worst, pava.worst, cfg.hull_tol, switch.detail
        ),
    );

    // 3, 4, 7: posterior variance and normality, exp(1.2), n = 2000, x = 1.5
    let start = Instant::now();
    let bvm = variance_experiment(&ExperimentSettings::defaults(ExperimentKind::Bvm), SEED)
        .expect("variance experiment");
    let bvm_secs = start.elapsed().as_secs_f64();
    let v = bvm.variance.as_ref().expect("variance summary");
    ledger.record(
        "3",
        (0.85..=1.15).contains(&v.mean_iip_ratio),
        bvm_secs,
        Some(600.0),
        format!(
            "mean IIP variance ratio to g0/(2γ) = {:.4} (need [0.85, 1.15]); per-rep ratio in [0.6, 1.5] for {:.0}%",
            v.mean_iip_ratio,
            100.0 * v.iip_ratio_in_range_fraction
        ),
    );
    ledger.record(
        "4",
        (0.85..=1.15).contains(&v.mean_nbp_ratio) && v.efficiency_fraction >= 0.9,
        bvm_secs,
        Some(600.0),
        format!(
            "mean NBP variance ratio to g0 = {:.4} (need [0.85, 1.15]); IIP/NBP < 0.7 in {:.0}% of reps (need >= 90%)",
            v.mean_nbp_ratio,
            100.0 * v.efficiency_fraction
        ),
    );

    // 5: coverage, 200 replications
    let start = Instant::now();
    let cov = coverage_experiment(&ExperimentSettings::defaults(ExperimentKind::Coverage), SEED)
        .expect("coverage experiment");
    let c = cov.coverage.as_ref().expect("coverage summary");
    ledger.record(
        "5",
        (0.90..=0.99).contains(&c.coverage_rate),
        start.elapsed().as_secs_f64(),
        Some(1800.0),
        format!(
            "coverage of F0(1.5) = {:.3} over {} reps (need [0.90, 0.99]); mean width {:.4}",
            c.coverage_rate,
            c.replications.len(),
            c.mean_ci_width
        ),
    );

    // 6: width table across the Hölder family
    let start = Instant::now();
    let settings = ExperimentSettings::defaults(ExperimentKind::Widths);
    assert_eq!(settings.gammas, TABLE_GAMMAS);
    let widths = width_experiment(&settings, SEED).expect("width experiment");
    let w = widths.widths.as_ref().expect("width summary");
    let mut ok = true;
    let mut parts = Vec::new();
    for ((row, bayes), boot) in w.rows.iter().zip(BAYES_WIDTHS).zip(BOOT_WIDTHS) {
        let b = row.mean_bootstrap_width.unwrap_or(f64::NAN);
        let row_ok = within(row.mean_bayes_width, bayes, WIDTH_TOL) && within(b, boot, WIDTH_TOL);
        ok &= row_ok;
        parts.push(format!(
            "γ={}: {:.3}/{bayes} boot {:.3}/{boot}{}",
            row.gamma,
            row.mean_bayes_width,
            b,
            if row_ok { "" } else { " (out)" }
        ));
    }
    let paired = w.paired_fraction.unwrap_or(0.0);
    ok &= paired >= 0.9;
    ledger.record(
        "6",
        ok,
        start.elapsed().as_secs_f64(),
        Some(1800.0),
        format!(
            "{}; width(1.5) < width(0.55) in {:.0}% of {} paired reps (need >= 90%)",
            parts.join(", "),
            100.0 * paired,
            settings.reps
        ),
    );

    // 7: normality of the IIP draws of F at x = 1.5
    ledger.record(
        "7",
        v.qq_pass_fraction >= 0.8,
        bvm_secs,
        None,
        format!(
            "QQ correlation > 0.99 in {:.0}% of {} reps (need >= 80%)",
            100.0 * v.qq_pass_fraction,
            v.replications.len()
        ),
    );

    println!(
        "N/A  criterion 8: limits as n → ∞ are not reproducible; covered by criteria 3-7 and the invariant suites"
    );

    if ledger.failures.is_empty() {
        println!("all criteria passed");
    } else {
        println!("failed criteria: {}", ledger.failures.join(", "));
        if std::env::var_os("WICKSELL_ACCEPTANCE_STRICT").is_some() {
            std::process::exit(1);
        }
    }
}
