//! The `conc` command-line tool.
//!
//! Exit codes: 0 on success, 1 when a certification outcome does not match
//! the manifest (or a computation fails), 2 on usage and argument errors.

use std::f64::consts::FRAC_PI_2;
use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::cap::{
    cap_bound_halfcos, cap_bound_kappa, cap_bound_twofifths, cap_tail, cap_volume, q_n_xi, twofifths_threshold,
    SphereDim,
};
use crate::error::Error;
use crate::extremal::{gaussian_profile, profile, refined_a_grid, TailProfilePoint};
use crate::mc::{empirical_deviation, empirical_gaussian, Center, EmpiricalTail, McConfig, Sides};
use crate::output::{write_csv, write_json, Document, Metadata, Table};
use crate::product::{case_of, chordal_variant, excess_scan, suite_product_case, sweep};
use crate::special_fn::{gauss_upper_tail, komatu_bound, sampford_bound};
use crate::verify::{
    run_suite, small_b_limit_sides, suite_ids, uniform_grid, Endpoints, Expectation, SuiteConfig, SuiteOutcome,
};

const TABLE_POINTS: usize = 201;
const DEFAULT_SEED: u64 = 7;

#[derive(Debug, Parser)]
#[command(
    name = "conc",
    version,
    about = "Spherical cap measures and certified concentration bounds"
)]
pub struct Cli {
    /// Grid size for scans and tables
    #[arg(long, global = true)]
    pub grid: Option<usize>,
    /// Violation tolerance for certification scans
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Emit JSON instead of CSV
    #[arg(long, global = true)]
    pub json: bool,
    /// Seed for Monte Carlo runs
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Write output to FILE instead of stdout
    #[arg(long, global = true, value_name = "FILE")]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Cap volume v_n(r) or cap tail μ(K^a) with the applicable upper bounds
    Cap(CapArgs),
    /// q_{n,ξ}(x) at a point or over [0, π/2]
    Qn {
        /// Sphere S^{n-1} in R^n
        #[arg(long)]
        n: u32,
        /// Excess added to n in the exponent
        #[arg(long, default_value_t = 0.0)]
        xi: f64,
        /// Single point; omit for a table over [0, π/2]
        #[arg(long)]
        x: Option<f64>,
    },
    /// Tail profile of the truncations min(θ, a)
    Profile {
        /// Sphere S^{n-1} in R^n
        #[arg(long, required_unless_present = "gaussian")]
        n: Option<u32>,
        /// Standard Gaussian measure instead of a sphere
        #[arg(long)]
        gaussian: bool,
    },
    /// Data behind figures 1-4
    Fig {
        /// 1: q_2, q_3, q_4; 2: F and G for n = 3; 3: small-b limit sides; 4: Gaussian profile
        #[arg(value_parser = clap::value_parser!(u8).range(1..=4))]
        which: u8,
    },
    /// Run certification suites (`all` for every suite)
    Verify {
        /// Suite ids, or `all`
        #[arg(required = true)]
        ids: Vec<String>,
        /// With `product`: number of sphere factors
        #[arg(long, requires = "n")]
        k: Option<u32>,
        /// With `product`: sphere dimension parameter
        #[arg(long, requires = "k")]
        n: Option<u32>,
    },
    /// Excess-exponent scans on (S^{n-1})^k, one row per (k, n)
    Product {
        /// Numbers of sphere factors, comma separated
        #[arg(long, value_delimiter = ',', required = true)]
        k: Vec<u32>,
        /// Sphere dimension parameters, comma separated
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<u32>,
    },
    /// Monte Carlo deviation tails against the bounds
    Mc(McArgs),
    /// Gaussian tail integral with the Komatu and Sampford bounds
    Gauss {
        /// Tabulate u over [0, u_max]
        #[arg(long, default_value_t = 10.0)]
        u_max: f64,
    },
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false, id = "point")]
pub struct CapRadius {
    /// Geodesic radius of a cap around a pole
    #[arg(long)]
    pub r: Option<f64>,
    /// Level a of the cap {θ >= a}
    #[arg(long, allow_negative_numbers = true)]
    pub a: Option<f64>,
}

#[derive(Debug, Args)]
pub struct CapArgs {
    /// Sphere S^{n-1} in R^n
    #[arg(long)]
    pub n: u32,
    #[command(flatten)]
    pub at: CapRadius,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum CenterArg {
    Median,
    Mean,
}

#[derive(Debug, Args)]
pub struct McArgs {
    /// Test function: coord, cap-dist:<a>, phi:<a>; with --gaussian: coord, norm, halfspace
    #[arg(long)]
    pub f: String,
    /// Dimension of the sphere's ambient space, or of the Gaussian
    #[arg(long, default_value_t = 10)]
    pub n: u32,
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    /// Sample the standard Gaussian in R^n instead of the sphere
    #[arg(long)]
    pub gaussian: bool,
    /// Deviations are measured from this center
    #[arg(long, value_enum, default_value_t = CenterArg::Median)]
    pub center: CenterArg,
    /// Count deviations on both sides of the center
    #[arg(long)]
    pub two_sided: bool,
    /// Tail grid is t_step, 2 t_step, ... up to t_max
    #[arg(long, default_value_t = 1.0)]
    pub t_max: f64,
    #[arg(long, default_value_t = 0.05)]
    pub t_step: f64,
}

/// Parses arguments, runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let command = std::iter::once("conc".into())
        .chain(args.iter().skip(1).map(|a| a.to_string_lossy()))
        .collect::<Vec<_>>()
        .join(" ");
    match execute(&cli, command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Domain { .. } | Error::Unknown { .. } | Error::Config(_) => 2,
                _ => 1,
            }
        }
    }
}

fn suite_config(cli: &Cli) -> crate::Result<SuiteConfig> {
    let mut cfg = SuiteConfig::default();
    if let Some(g) = cli.grid {
        cfg.grid_size = g;
    }
    if let Some(t) = cli.tol {
        cfg.violation_tol = t;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn table_points(cli: &Cli) -> crate::Result<usize> {
    match cli.grid {
        Some(g) if g < 2 => Err(Error::Config(format!("grid = {g} < 2"))),
        Some(g) => Ok(g),
        None => Ok(TABLE_POINTS),
    }
}

fn execute(cli: &Cli, command: String) -> crate::Result<i32> {
    let mut seed = None;
    let mut code = 0;
    let doc = match &cli.command {
        Command::Cap(args) => cmd_cap(args)?,
        Command::Qn { n, xi, x } => cmd_qn(*n, *xi, *x, table_points(cli)?)?,
        Command::Profile { n, gaussian } => cmd_profile(*n, *gaussian, table_points(cli)?)?,
        Command::Fig { which } => cmd_fig(*which, table_points(cli)?)?,
        Command::Verify { ids, k, n } => {
            let (doc, ok) = cmd_verify(ids, k.zip(*n), &suite_config(cli)?)?;
            code = if ok { 0 } else { 1 };
            doc
        }
        Command::Product { k, n } => cmd_product(k, n, &suite_config(cli)?)?,
        Command::Mc(args) => {
            let s = cli.seed.unwrap_or(DEFAULT_SEED);
            seed = Some(s);
            cmd_mc(args, s)?
        }
        Command::Gauss { u_max } => cmd_gauss(*u_max, table_points(cli)?)?,
    };
    let meta = Metadata::new(command, seed);
    emit(cli, &meta, &doc).map_err(|e| Error::Output(e.to_string()))?;
    Ok(code)
}

fn emit(cli: &Cli, meta: &Metadata, doc: &Document) -> io::Result<()> {
    let mut w: Box<dyn Write> = match &cli.out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    if cli.json {
        write_json(&mut w, meta, &doc.json)?;
    } else {
        write_csv(&mut w, meta, &doc.table)?;
    }
    w.flush()
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

/// `value <= bound`, blank when there is no bound. The half-exp bound is
/// listed for n = 2 too, where it fails on an interval.
fn holds(value: f64, bound: Option<f64>) -> String {
    bound.map(|b| (value <= b).to_string()).unwrap_or_default()
}

fn cmd_cap(args: &CapArgs) -> crate::Result<Document> {
    let dim = SphereDim::new(args.n)?;
    let mut table = Table::new(&["n", "quantity", "at", "value", "bound", "bound_value", "holds"]);
    let n = args.n.to_string();
    if let Some(r) = args.at.r {
        let v = cap_volume(dim, r)?;
        let mut row = |bound: &str, value: Option<f64>| {
            table.push(vec![
                n.clone(),
                "volume".into(),
                r.to_string(),
                v.to_string(),
                bound.into(),
                fmt_opt(value),
                holds(v, value),
            ]);
        };
        row("half-sin-power", Some(cap_bound_halfcos(dim, r)?));
        row("kappa", cap_bound_kappa(dim, r).ok());
    } else if let Some(a) = args.at.a {
        let v = cap_tail(dim, a)?;
        let mut bounds: Vec<(&str, Option<f64>)> = Vec::new();
        if a >= 0.0 {
            bounds.push(("half-exp", Some(0.5 * (-0.5 * args.n as f64 * a * a).exp())));
            if a < FRAC_PI_2 {
                bounds.push(("kappa", Some(cap_bound_kappa(dim, FRAC_PI_2 - a)?)));
            }
            if args.n >= 3 && a * (args.n as f64).sqrt() >= twofifths_threshold(dim) {
                bounds.push(("two-fifths", Some(cap_bound_twofifths(dim, a)?)));
            }
        }
        if bounds.is_empty() {
            bounds.push(("", None));
        }
        for (bound, value) in bounds {
            table.push(vec![
                n.clone(),
                "tail".into(),
                a.to_string(),
                v.to_string(),
                bound.into(),
                fmt_opt(value),
                holds(v, value),
            ]);
        }
    }
    Ok(Document::from_table(table))
}

fn cmd_qn(n: u32, xi: f64, x: Option<f64>, points: usize) -> crate::Result<Document> {
    let dim = SphereDim::new(n)?;
    let xs = match x {
        Some(x) => vec![x],
        None => uniform_grid(0.0, FRAC_PI_2, points, Endpoints::Closed),
    };
    let mut table = Table::new(&["x", "q"]);
    for x in xs {
        table.push_f64(&[x, q_n_xi(dim, x, xi)?]);
    }
    Ok(Document::from_table(table))
}

fn profile_table(points: &[TailProfilePoint]) -> crate::Result<Document> {
    let mut table = Table::new(&["a", "t", "mean_phi", "one_sided", "two_sided", "exp_bound"]);
    for p in points {
        table.push_f64(&[p.a, p.t, p.mean_phi, p.one_sided, p.two_sided, p.exp_bound]);
    }
    Document::with_payload(table, &points).map_err(|e| Error::Output(e.to_string()))
}

fn cmd_profile(n: Option<u32>, gaussian: bool, points: usize) -> crate::Result<Document> {
    if gaussian {
        return profile_table(&gaussian_profile(&uniform_grid(-6.0, 6.0, points, Endpoints::Closed))?);
    }
    let dim = SphereDim::new(n.expect("clap requires --n without --gaussian"))?;
    profile_table(&profile(dim, &refined_a_grid(points, (points / 10).max(10)))?)
}

fn cmd_fig(which: u8, points: usize) -> crate::Result<Document> {
    let table = match which {
        1 => {
            let mut t = Table::new(&["x", "q2", "q3", "q4"]);
            for x in uniform_grid(0.0, FRAC_PI_2, points, Endpoints::Closed) {
                let q = |n| q_n_xi(SphereDim::new(n)?, x, 0.0);
                t.push_f64(&[x, q(2)?, q(3)?, q(4)?]);
            }
            t
        }
        2 => {
            let dim = SphereDim::new(3)?;
            let mut t = Table::new(&["a", "F", "G"]);
            for p in profile(dim, &refined_a_grid(points, (points / 10).max(10)))? {
                t.push_f64(&[p.a, p.two_sided, p.exp_bound]);
            }
            t
        }
        3 => {
            let mut t = Table::new(&["u", "log_lhs", "log_rhs"]);
            for u in uniform_grid(0.0, 3.0, points, Endpoints::Closed) {
                let (lhs, rhs) = small_b_limit_sides(u);
                t.push_f64(&[u, lhs, rhs]);
            }
            t
        }
        4 => {
            let mut t = Table::new(&["a", "tail", "bound"]);
            for p in gaussian_profile(&uniform_grid(-6.0, 6.0, points, Endpoints::Closed))? {
                t.push_f64(&[p.a, p.two_sided, p.exp_bound]);
            }
            t
        }
        _ => {
            return Err(Error::Unknown {
                kind: "figure",
                id: which.to_string(),
            })
        }
    };
    Ok(Document::from_table(table))
}

fn describe(e: &Expectation) -> String {
    match e {
        Expectation::Pass => "pass".into(),
        Expectation::FailAnywhere => "fail".into(),
        Expectation::FailOn(ivs) => format!("fail on {}", intervals(ivs)),
    }
}

fn intervals(ivs: &[(f64, f64)]) -> String {
    ivs.iter()
        .map(|(lo, hi)| format!("[{lo}; {hi}]"))
        .collect::<Vec<_>>()
        .join(" ")
}

fn cmd_verify(ids: &[String], product: Option<(u32, u32)>, cfg: &SuiteConfig) -> crate::Result<(Document, bool)> {
    let mut selected: Vec<String> = Vec::new();
    for id in ids {
        if id == "all" {
            selected.extend(suite_ids().into_iter().map(String::from));
        } else if suite_ids().contains(&id.as_str()) {
            selected.push(id.clone());
        } else {
            return Err(Error::Unknown {
                kind: "suite",
                id: id.clone(),
            });
        }
    }
    if product.is_some() && !selected.iter().any(|s| s == "product") {
        return Err(Error::Config("--k/--n apply to the product suite only".into()));
    }
    let mut outcomes: Vec<SuiteOutcome> = Vec::new();
    for id in &selected {
        let outcome = match (id.as_str(), product) {
            ("product", Some((k, n))) => suite_product_case(k, n, cfg)?,
            _ => run_suite(id, cfg)?,
        };
        eprintln!("{:<16} {}", outcome.id, if outcome.ok() { "ok" } else { "MISMATCH" });
        outcomes.push(outcome);
    }
    let ok = outcomes.iter().all(SuiteOutcome::ok);

    let mut table = Table::new(&["suite", "kind", "name", "value", "expected", "observed", "ok"]);
    for o in &outcomes {
        for s in &o.scans {
            let observed = if s.report.passed {
                "pass".to_string()
            } else {
                format!("fail on {}", intervals(&s.report.failure_intervals))
            };
            table.push(vec![
                o.id.clone(),
                "scan".into(),
                s.report.suite_id.clone(),
                s.report.max_violation.to_string(),
                describe(&s.expectation),
                observed,
                s.met.to_string(),
            ]);
        }
        for c in &o.checks {
            table.push(vec![
                o.id.clone(),
                "check".into(),
                c.name.clone(),
                c.value.to_string(),
                c.expected.clone(),
                String::new(),
                c.passed.to_string(),
            ]);
        }
    }
    let doc = Document::with_payload(table, &outcomes).map_err(|e| Error::Output(e.to_string()))?;
    Ok((doc, ok))
}

fn cmd_product(ks: &[u32], ns: &[u32], cfg: &SuiteConfig) -> crate::Result<Document> {
    let mut table = Table::new(&[
        "k",
        "n",
        "m",
        "r",
        "xi",
        "geodesic",
        "failure_intervals",
        "t_max",
        "chordal",
    ]);
    let rows = sweep(ks, ns, cfg)?;
    let pass = |b: bool| if b { "pass" } else { "fail" }.to_string();
    for row in &rows {
        let case = case_of(row.k, row.n)?;
        let ivs = if row.geodesic_passed {
            String::new()
        } else {
            intervals(&excess_scan(&case, cfg)?.report.failure_intervals)
        };
        table.push(vec![
            row.k.to_string(),
            row.n.to_string(),
            case.m.to_string(),
            case.r.to_string(),
            case.xi.to_string(),
            pass(row.geodesic_passed),
            ivs,
            fmt_opt(row.t_max),
            pass(row.chordal_passed),
        ]);
    }
    // keep the chordal report reachable from JSON for single cases
    if rows.len() == 1 {
        let case = case_of(rows[0].k, rows[0].n)?;
        let payload = serde_json::json!({
            "case": case,
            "geodesic": excess_scan(&case, cfg)?,
            "chordal": chordal_variant(&case, cfg)?,
        });
        return Document::with_payload(table, &payload).map_err(|e| Error::Output(e.to_string()));
    }
    Document::with_payload(table, &rows).map_err(|e| Error::Output(e.to_string()))
}

fn tail_table(tails: &[EmpiricalTail]) -> crate::Result<Document> {
    let mut table = Table::new(&["t", "p_hat", "std_err", "bound"]);
    for t in tails {
        table.push_f64(&[t.t, t.p_hat, t.std_err, t.bound]);
    }
    Document::with_payload(table, &tails).map_err(|e| Error::Output(e.to_string()))
}

fn cmd_mc(args: &McArgs, seed: u64) -> crate::Result<Document> {
    if !(args.t_step > 0.0 && args.t_max >= 0.0) {
        return Err(Error::Config("need t_step > 0 and t_max >= 0".into()));
    }
    let steps = (args.t_max / args.t_step + 1e-9).floor() as usize;
    let cfg = McConfig {
        seed,
        samples: args.samples,
        t_grid: (1..=steps).map(|i| i as f64 * args.t_step).collect(),
    };
    let center = match args.center {
        CenterArg::Median => Center::Median,
        CenterArg::Mean => Center::Mean,
    };
    let sides = if args.two_sided { Sides::Two } else { Sides::Upper };
    let tails = if args.gaussian {
        empirical_gaussian(args.n as usize, args.f.parse()?, center, sides, &cfg)?
    } else {
        empirical_deviation(SphereDim::new(args.n)?, args.f.parse()?, center, sides, &cfg)?
    };
    tail_table(&tails)
}

fn cmd_gauss(u_max: f64, points: usize) -> crate::Result<Document> {
    if !(u_max > 0.0 && u_max.is_finite()) {
        return Err(Error::Config(format!("u_max = {u_max} must be positive")));
    }
    let mut table = Table::new(&["u", "tail", "komatu", "sampford"]);
    for u in uniform_grid(0.0, u_max, points, Endpoints::Closed) {
        table.push_f64(&[u, gauss_upper_tail(u), komatu_bound(u)?, sampford_bound(u)?]);
    }
    Ok(Document::from_table(table))
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn clap_definition() {
        Cli::command().debug_assert();
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(run(["conc", "fig", "5"]), 2);
        assert_eq!(run(["conc", "cap", "--n", "3"]), 2);
        assert_eq!(run(["conc", "cap", "--n", "3", "--r", "0.5", "--a", "0.1"]), 2);
        assert_eq!(run(["conc", "verify", "nope"]), 2);
        assert_eq!(run(["conc", "cap", "--n", "1", "--r", "0.5"]), 2);
    }
}
