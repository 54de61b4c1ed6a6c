//! Acceptance criteria, one line each. Exits nonzero if any criterion fails
//! or overruns its time budget.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use conc::mc::{arcsin_ks, empirical_deviation, Center, McConfig, Sides, SphereFn};
use conc::product::{case_of, documented_cases, excess_scan, sweep};
use conc::verify::{g_max, h_n, large_b_alpha, run_suite, twofifths_threshold_n3, SuiteOutcome};
use conc::{SphereDim, SuiteConfig};

type Verdict = conc::Result<(bool, String)>;

/// Name, time budget in seconds, check.
type Criterion = (&'static str, u64, fn() -> Verdict);

fn cfg() -> SuiteConfig {
    SuiteConfig::default()
}

/// Every scan and check of the named suites, with the ids of any misses.
fn suites_ok(ids: &[&str]) -> conc::Result<(bool, Vec<SuiteOutcome>, String)> {
    let mut all = Vec::new();
    let mut misses = Vec::new();
    for id in ids {
        let out = run_suite(id, &cfg())?;
        for s in out.scans.iter().filter(|s| !s.met) {
            misses.push(s.report.suite_id.clone());
        }
        for c in out.checks.iter().filter(|c| !c.passed) {
            misses.push(format!("{}: {}", out.id, c.name));
        }
        all.push(out);
    }
    let note = if misses.is_empty() {
        String::new()
    } else {
        format!("misses: {}", misses.join("; "))
    };
    Ok((misses.is_empty(), all, note))
}

fn check_value(out: &SuiteOutcome, name: &str) -> f64 {
    out.check_named(name).map_or(f64::NAN, |c| c.value)
}

fn c1_q2_interval() -> Verdict {
    let (ok, outs, note) = suites_ok(&["q2-fail"])?;
    let r = &outs[0].scans[0].report;
    let hit = r.failure_intervals.len() == 1
        && (r.failure_intervals[0].0 - 1.05858).abs() <= 1e-4
        && (r.failure_intervals[0].1 - 1.18588).abs() <= 1e-4;
    Ok((ok && hit, format!("intervals {:?} {note}", r.failure_intervals)))
}

fn c2_q34() -> Verdict {
    let (ok, outs, note) = suites_ok(&["q34"])?;
    let out = &outs[0];
    let worst = ["q34/q3", "q34/q4"]
        .iter()
        .map(|id| out.scan(id).map_or(f64::INFINITY, |r| r.max_violation))
        .fold(f64::NEG_INFINITY, f64::max);
    let d3 = check_value(out, "q_3'(0)");
    let d4 = check_value(out, "q_4'(0)");
    let pass = ok && worst <= 1e-9 && (d3 + 1.0).abs() <= 1e-6 && (d4 + 4.0 / PI).abs() <= 1e-6;
    Ok((
        pass,
        format!("max margin {worst:.3e}, q3'(0) {d3:.9}, q4'(0) {d4:.9} {note}"),
    ))
}

fn c3_g_max() -> Verdict {
    let (x0, g0) = g_max()?;
    let pass = (x0 - (2.0f64 / 3.0).asin()).abs() <= 1e-8 && (g0 + 0.046885).abs() <= 1e-5;
    Ok((pass, format!("x0 {x0:.12}, g(x0) {g0:.8}")))
}

fn c4_monotone() -> Verdict {
    let (ok, outs, note) = suites_ok(&["monotone"])?;
    let covered = (2..=40u32).all(|n| {
        [0, 1, 2, 4].iter().all(|xi| {
            outs[0]
                .scan(&format!("monotone/n={n}/xi={xi}"))
                .is_some_and(|r| r.grid_size >= 2000)
        })
    });
    Ok((
        ok && covered,
        format!(
            "{} scans, all n in 2..=40 covered: {covered} {note}",
            outs[0].scans.len()
        ),
    ))
}

fn c5_hemisphere() -> Verdict {
    let (ok, outs, note) = suites_ok(&["hemisphere"])?;
    let covered = (3..=40u32).all(|n| outs[0].scan(&format!("hemisphere/n={n}")).is_some());
    let eq = check_value(&outs[0], "equality at x = 0");
    let strict = check_value(&outs[0], "largest margin for x > 0");
    Ok((
        ok && covered,
        format!("margin at 0: {eq:.1e}, largest for x > 0: {strict:.3e} {note}"),
    ))
}

fn c6_profiles() -> Verdict {
    let (ok, outs, note) = suites_ok(&["one-sided", "two-sided"])?;
    let two = &outs[1];
    let s4 = check_value(two, "n = 3 order of 1 - F at a = -pi/2");
    let s6 = check_value(two, "n = 3 order of 1 - G at a = -pi/2");
    let one_cov = (2..=20u32).all(|n| {
        outs[0]
            .scans
            .iter()
            .any(|s| s.report.suite_id.ends_with(&format!("n={n}")))
    });
    let two_cov = (3..=20u32).all(|n| two.scan(&format!("two-sided/n={n}")).is_some());
    let pass = ok && one_cov && two_cov && (s4 - 4.0).abs() <= 0.1 && (s6 - 6.0).abs() <= 0.1;
    Ok((pass, format!("orders {s4:.4}, {s6:.4} {note}")))
}

fn c7_cap_power_suites() -> Verdict {
    let (ok, _, note) = suites_ok(&["cos-powers", "twofifths"])?;
    let u = twofifths_threshold_n3()?;
    let h_min = (5..=60u32).map(|n| h_n(n, 3.0)).fold(f64::INFINITY, f64::min);
    let rises = (7..60u32).filter(|&n| h_n(n + 1, 3.0) > h_n(n, 3.0)).count();
    let pass = ok && (0.545..=0.556).contains(&u) && h_min >= 0.0 && rises == 0;
    Ok((
        pass,
        format!("u* {u:.6}, min h_n(3) {h_min:.6}, increases for n >= 7: {rises} {note}"),
    ))
}

fn c8_large_b_constants() -> Verdict {
    let (ok, outs, note) = suites_ok(&["large-b", "two-sided"])?;
    let alpha = large_b_alpha();
    let cube = (1.0 - alpha / 3.0).powi(3);
    let ratio = check_value(&outs[1], "large-b limit: ratio of sides at u = sqrt(6)");
    let pass = ok && alpha < 0.028 && cube > 0.97 && ratio >= 23.0;
    Ok((
        pass,
        format!("alpha {alpha:.6}, (1 - alpha/3)^3 {cube:.6}, ratio {ratio:.4} {note}"),
    ))
}

fn c9_product() -> Verdict {
    let (ok, _, note) = suites_ok(&["product"])?;
    let mut pass = ok;
    let mut parts = Vec::new();
    for (n, lo, hi, t) in [(3, 0.47595, 1.45105, 0.82437), (4, 0.71556, 1.19952, 1.1314)] {
        let scan = excess_scan(&case_of(2, n)?, &cfg())?;
        let iv = scan
            .report
            .failure_intervals
            .first()
            .copied()
            .unwrap_or((f64::NAN, f64::NAN));
        let got_t = scan.t_max.unwrap_or(f64::NAN);
        pass &= scan.report.failure_intervals.len() == 1
            && (iv.0 - lo).abs() <= 1e-3
            && (iv.1 - hi).abs() <= 1e-3
            && (got_t - t).abs() <= 1e-3;
        parts.push(format!("n={n}: ({:.5}, {:.5}) t {got_t:.5}", iv.0, iv.1));
    }
    let ns: Vec<u32> = (5..=16).collect();
    let rows = sweep(&[2, 3, 4], &ns, &cfg())?;
    let geodesic_bad: Vec<(u32, u32)> = rows
        .iter()
        .filter(|r| (r.k == 2 || (r.k == 3 && r.n > 6) || (r.k == 4 && r.n > 7)) && !r.geodesic_passed)
        .map(|r| (r.k, r.n))
        .collect();
    let chordal: Vec<(u32, u32)> = documented_cases()
        .into_iter()
        .filter(|d| d.chordal == Some(true))
        .map(|d| (d.k, d.n))
        .collect();
    let chordal_rows = sweep(&[2, 3, 4], &[4, 6, 7], &cfg())?;
    let chordal_bad: Vec<(u32, u32)> = chordal
        .iter()
        .filter(|&&(k, n)| !chordal_rows.iter().any(|r| r.k == k && r.n == n && r.chordal_passed))
        .copied()
        .collect();
    pass &= geodesic_bad.is_empty() && chordal_bad.is_empty();
    Ok((
        pass,
        format!(
            "{}; geodesic misses {geodesic_bad:?}, chordal misses {chordal_bad:?} {note}",
            parts.join(", ")
        ),
    ))
}

fn c10_gaussian() -> Verdict {
    let (ok, outs, note) = suites_ok(&["gaussian"])?;
    let out = &outs[0];
    let scans = [
        "gaussian/two-sided",
        "gaussian/tail<=sampford",
        "gaussian/sampford<=komatu",
    ];
    let present = scans.iter().all(|id| out.scan(id).is_some());
    Ok((ok && present, format!("{} scans {note}", out.scans.len())))
}

fn c11_monte_carlo() -> Verdict {
    let dim = SphereDim::new(10)?;
    let cfg = McConfig {
        seed: 7,
        samples: 100_000,
        t_grid: (1..=20).map(|i| 0.05 * i as f64).collect(),
    };
    let mut misses = Vec::new();
    for (label, center, sides) in [
        ("median upper", Center::Median, Sides::Upper),
        ("mean upper", Center::Mean, Sides::Upper),
        ("mean two-sided", Center::Mean, Sides::Two),
    ] {
        for row in empirical_deviation(dim, SphereFn::Coordinate, center, sides, &cfg)? {
            if !row.within(3.0) {
                misses.push(format!("{label} t={:.2}", row.t));
            }
        }
    }
    let ks = arcsin_ks(dim, cfg.samples, cfg.seed)?;
    Ok((
        misses.is_empty() && ks.passed,
        format!("bound misses {misses:?}, KS {:.5} < {:.5}", ks.distance, ks.critical),
    ))
}

fn c12_wallis() -> Verdict {
    let (ok, outs, note) = suites_ok(&["wallis"])?;
    let out = &outs[0];
    let standard = check_value(out, "I_k I_(k+1) = pi/(2(k+1)), max rel error");
    let printed = check_value(out, "I_k I_(k+1) = pi/(2(k-1)) rejected, min rel deviation");
    Ok((
        ok,
        format!("standard form rel error {standard:.1e}, printed form off by >= {printed:.3e} {note}"),
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("n=2 failure interval", 5, c1_q2_interval),
        ("q3, q4 certification and slopes", 5, c2_q34),
        ("g maximum", 1, c3_g_max),
        ("monotone families", 60, c4_monotone),
        ("hemisphere bound", 30, c5_hemisphere),
        ("one- and two-sided profiles", 120, c6_profiles),
        ("cap power suites", 30, c7_cap_power_suites),
        ("large-b constants", 5, c8_large_b_constants),
        ("product spheres", 60, c9_product),
        ("gaussian case", 10, c10_gaussian),
        ("monte carlo", 60, c11_monte_carlo),
        ("wallis and kappa identities", 5, c12_wallis),
    ];
    let mut failed = 0;
    for (i, (name, budget, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let verdict = run();
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(*budget);
        let (ok, detail) = match verdict {
            Ok((ok, detail)) => (ok && in_time, detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !ok {
            failed += 1;
        }
        println!(
            "{} {:>2} {name}: {} [{:.2} s, budget {budget} s]",
            if ok { "PASS" } else { "FAIL" },
            i + 1,
            detail.trim_end(),
            elapsed.as_secs_f64(),
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
