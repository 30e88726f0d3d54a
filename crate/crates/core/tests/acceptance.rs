//! End-to-end acceptance checks, one line per criterion.
//!
//! Runs without the libtest harness so the PASS/FAIL lines always reach the
//! output; the process exits nonzero if any criterion fails.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use hutchinf::engine::{self, convergence_table, gen_iterate_sets, invariance_residual, diagonal_iterate};
use hutchinf::interval::{interval_attractor, interval_truncated_attractor, product_factor, IntervalSet};
use hutchinf::maps::Condition;
use hutchinf::metric::{hausdorff_brute, BaseMetric, FiniteSet, TailSeq};
use hutchinf::verify::{self, Report};
use hutchinf::{cantor, systems, Result};

struct Outcome {
    passed: bool,
    detail: String,
}

impl Outcome {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Outcome { passed, detail: detail.into() }
    }
}

fn suites(names: &[&str]) -> Result<(bool, Vec<String>)> {
    let mut ok = true;
    let mut failed = Vec::new();
    for n in names {
        for Report { passed, checks, .. } in verify::run(n)? {
            ok &= passed;
            failed.extend(checks.iter().filter(|c| !c.passed).map(|c| format!("{} ({:e} > {:e})", c.name, c.value, c.limit)));
        }
    }
    Ok((ok, failed))
}

fn lipschitz_and_classes() -> Result<Outcome> {
    let sys = systems::planar()?;
    let l = sys.l_sys().unwrap_or(f64::NAN);
    let classes = sys.classify();
    let want: BTreeSet<_> = [Condition::Q, Condition::S2, Condition::S1].into_iter().collect();
    Ok(Outcome::new(l == 0.2 && classes == want, format!("L_sys = {l}, classes {classes:?}")))
}

fn invariance_and_convergence() -> Result<Outcome> {
    let sys = systems::planar()?;
    let a = engine::attractor(&sys, 0.02)?;
    let res = invariance_residual(&sys, &a)?;
    let rows = convergence_table(&sys, 6, 1e-3, 64)?;
    let within = rows.iter().all(|r| r.within);
    let worst = rows.iter().filter_map(|r| r.step.map(|s| s / r.bound)).fold(0.0, f64::max);
    Ok(Outcome::new(
        res <= 0.04 && within,
        format!("{} points, err {:.4}, residual {res:.4} <= 0.04, worst step/bound {worst:.3} for k <= 6", a.cloud.len(), a.err),
    ))
}

fn weak_condition_separation() -> Result<Outcome> {
    let sys = systems::sup_pair(64)?;
    let domain = sys.domain.clone().expect("finite space");
    let seed = TailSeq::constant(domain.clone());
    let it = gen_iterate_sets(&sys, &seed, 6, 0.0, 64)?;
    let mut b: Vec<f64> = (1..=32).map(|j| 1.0 / (2 * j) as f64).collect();
    b.extend([0.0, 1.0]);
    let b = FiniteSet::from_values(&b)?;
    let stationary = it.sets[1..].iter().all(|k| *k == b);
    let a = systems::sup_pair_attractor(64)?;
    // 1/24 is attained between 1/6 and 1/8; compare in floating point to
    // that difference and to the nearest double of 1/24
    let attained = 1.0 / 6.0 - 1.0 / 8.0;
    let mut worst: f64 = 0.0;
    let mut exact = true;
    for k in &it.sets[1..] {
        let h = hausdorff_brute(k, &a, BaseMetric::Absolute)?;
        exact &= h == attained;
        worst = worst.max((h - 1.0 / 24.0).abs());
    }
    let y = diagonal_iterate(&sys, &seed, 6, 0.0, 64)?;
    let hy = hausdorff_brute(&y.set, &a, BaseMetric::Absolute)?;
    let limit = 0.5f64.powi(6) + 1.0 / 64.0;
    Ok(Outcome::new(
        stationary && exact && worst <= f64::EPSILON / 24.0 && hy <= limit,
        format!("K^k = B for 2 <= k <= 6: {stationary}, |H(K^k, A) - 1/24| = {worst:e}, H(Y_6, A) = {hy:.5} <= {limit:.5}"),
    ))
}

fn metric_inequalities() -> Result<Outcome> {
    let (ok, failed) = suites(&["metrics", "hausdorff"])?;
    Ok(Outcome::new(ok, if ok { "comparison inequalities, product identities and interval example hold".into() } else { failed.join("; ") }))
}

fn code_space() -> Result<Outcome> {
    let (ok, failed) = suites(&["shifts", "tiles", "conjugacy"])?;
    Ok(Outcome::new(
        ok,
        if ok { "shift ratios, reconstruction, tile bounds, conjugacy budgets and the projection jump hold".into() } else { failed.join("; ") },
    ))
}

/// Truncations of the planar system against the full attractor, computed
/// exactly on the line factor of the product structure.
fn truncation() -> Result<Outcome> {
    let sys = systems::planar()?;
    let line = product_factor(&sys).expect("planar system is a product");
    let lam = line.perturbation_factor().expect("certified");
    let seed = IntervalSet::interval(0.0, 1.0)?;
    let merge = 1e-13;
    let full = interval_attractor(&line, &seed, 1e-10, merge)?;
    // dropped tail sum_{k >= m} (1/10) 4^-k = (2/15) 4^-m, acting on a set of
    // diameter at most max A (the anchor 0 lies in A), amplified by 1/(1 - lam)
    let c_bound = (2.0 / 15.0) * full.set.max() / (1.0 - lam);
    let u = 15.0 / 26.0;
    let mut dists = Vec::new();
    let mut fitted: f64 = 0.0;
    let mut within = true;
    let mut exact_gap: f64 = 0.0;
    for m in 1..=6 {
        let t = interval_truncated_attractor(&line, m, 0.0, &seed, 1e-10, merge)?;
        let h = full.set.hausdorff(&t.set);
        let err = full.err + t.err;
        let scale = 0.25f64.powi(m as i32);
        fitted = fitted.max((h - err) / scale);
        within &= h <= err + c_bound * scale;
        let u_m = 0.5 / (1.0 - (2.0 / 15.0) * (1.0 - scale));
        exact_gap = exact_gap.max((h - (u - u_m)).abs() - err);
        dists.push(h);
    }
    let decreasing = dists.windows(2).all(|w| w[1] < w[0]);
    let shown: Vec<String> = dists.iter().map(|d| format!("{d:.3e}")).collect();
    Ok(Outcome::new(
        within && decreasing && exact_gap <= 1e-12,
        format!("H = [{}], fitted C = {fitted:.4} (bound {c_bound:.4}), strictly decreasing: {decreasing}", shown.join(", ")),
    ))
}

fn cantor_lab() -> Result<Outcome> {
    let (ok, failed) = suites(&["cantor"])?;
    let ms = cantor::minimal_growth_sequence(5);
    let r = cantor::derive_params(0.5, 0.5, &ms)?.residuals()?;
    let worst = r.nesting.iter().fold(r.unit, |a, b| a.max(*b));
    // the code maps permute the corners of the depth-d squares among themselves
    let mut invariant = true;
    for depth in 1..=3 {
        let (sys, p) = systems::cantor(0.5, 0.5, &[1, 1, 2, 2], depth)?;
        let corners = cantor::corner_cloud(&p, depth)?;
        invariant &= engine::hutchinson_diagonal(&sys, &corners, 0.0, 8)?.set == corners;
    }
    let passed = ok && worst <= 1e-12 && invariant;
    let detail = if passed {
        format!("ms = {ms:?}, residual {worst:e}, certificates and sampled ratios hold, square corners invariant to depth 3")
    } else {
        format!("corners invariant: {invariant}; residual {worst:e}; {}", failed.join("; "))
    };
    Ok(Outcome::new(passed, detail))
}

fn main() {
    type Criterion = (&'static str, fn() -> Result<Outcome>, Duration);
    let criteria: [Criterion; 7] = [
        ("planar Lipschitz constant and classification", lipschitz_and_classes, Duration::from_secs(1)),
        ("planar invariance and iterate convergence", invariance_and_convergence, Duration::from_secs(60)),
        ("weak-condition iterates versus diagonal iterates", weak_condition_separation, Duration::from_secs(5)),
        ("sequence metric inequalities and product Hausdorff", metric_inequalities, Duration::from_secs(60)),
        ("code space shifts, tiles and projection", code_space, Duration::from_secs(30)),
        ("truncation distances", truncation, Duration::from_secs(120)),
        ("Cantor parameters, certificates and render", cantor_lab, Duration::from_secs(30)),
    ];
    let mut failures = 0;
    for (i, (name, run, limit)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let out = run().unwrap_or_else(|e| Outcome::new(false, format!("error: {e}")));
        let elapsed = t.elapsed();
        let in_time = elapsed <= *limit;
        let passed = out.passed && in_time;
        failures += usize::from(!passed);
        let time_note = if in_time { String::new() } else { format!(" [over time limit {limit:?}]") };
        println!(
            "{} [{}] {name}: {} ({:.2?}){time_note}",
            if passed { "PASS" } else { "FAIL" },
            i + 1,
            out.detail,
            elapsed
        );
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}

