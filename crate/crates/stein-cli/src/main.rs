//! `stein` — configuration-driven evaluation of explicit error bounds for
//! statistics g(W) approximating g(Z), numerical Stein-equation solving,
//! and seeded Monte Carlo distance/rate studies.
//!
//! Exit codes: 0 success, 1 runtime error (I/O, accuracy, insufficient
//! signal), 2 hypothesis or validation failure.

mod config;
mod output;
mod selftest;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{load_config, Scenario};
use output::{fmt_f64, write_csv, write_json};
use stein::montecarlo::{bound_validity, rate_fit, DistanceStudy, Reference};
use stein::solver::{SolverConfig, SteinSolver};
use stein::{Result, SteinError};

#[derive(Parser)]
#[command(
    name = "stein",
    version,
    about = "Error bounds, Stein-equation solutions, and Monte Carlo rate studies \
             for statistics g(W) near their normal-limit law g(Z)"
)]
struct Cli {
    /// Output directory for CSV/JSON artifacts.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Override every scenario seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Override every scenario sample count.
    #[arg(long, global = true)]
    samples: Option<u64>,
    /// Suppress the timestamp comment line in CSV outputs.
    #[arg(long, global = true)]
    no_timestamp: bool,
    /// Worker threads for Monte Carlo (results do not depend on this).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate the requested analytic bounds over each scenario's n grid.
    Bound {
        #[arg(long)]
        config: PathBuf,
    },
    /// Fit empirical log–log convergence rates.
    Rate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Estimate distances Δ̂(n) (and bound margins when bounds are listed).
    Distance {
        #[arg(long)]
        config: PathBuf,
    },
    /// Tabulate the Stein-equation solution and its residual on a grid.
    Solve {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run the built-in invariant battery.
    Selftest,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        // Ignore failure: the global pool may already be initialized.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global();
    }
    let outcome = run(&cli);
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                SteinError::Hypothesis(_)
                | SteinError::Invalid(_)
                | SteinError::Domain(_)
                | SteinError::Range(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}

fn run(cli: &Cli) -> Result<()> {
    std::fs::create_dir_all(&cli.out)
        .map_err(|e| SteinError::Invalid(format!("cannot create {}: {e}", cli.out.display())))?;
    match &cli.cmd {
        Cmd::Bound { config } => cmd_bound(&load(cli, config)?, cli),
        Cmd::Rate { config } => cmd_rate(&load(cli, config)?, cli),
        Cmd::Distance { config } => cmd_distance(&load(cli, config)?, cli),
        Cmd::Solve { config } => cmd_solve(&load(cli, config)?, cli),
        Cmd::Selftest => selftest::run(),
    }
}

fn load(cli: &Cli, path: &Path) -> Result<Vec<Scenario>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| SteinError::Invalid(format!("cannot read {}: {e}", path.display())))?;
    let mut scenarios = load_config(&text)?;
    for s in &mut scenarios {
        if let Some(seed) = cli.seed {
            s.seed = seed;
        }
        if let Some(samples) = cli.samples {
            s.samples = samples;
        }
    }
    Ok(scenarios)
}

/// Stream ids: disjoint per (scenario, grid point, purpose).
fn stream_id(scenario_idx: usize, n_idx: usize, purpose: u64) -> u64 {
    (scenario_idx as u64) << 16 | (n_idx as u64) << 4 | purpose
}

fn cmd_bound(scenarios: &[Scenario], cli: &Cli) -> Result<()> {
    let mut json_reports = Vec::new();
    let mut rows = Vec::new();
    for s in scenarios {
        if s.bounds.is_empty() {
            return Err(SteinError::Invalid(format!(
                "scenario `{}` lists no bounds; add a `bounds` array",
                s.id
            )));
        }
        for &n in &s.n_grid {
            for b in &s.bounds {
                let report = s.evaluate_bound(b, n)?;
                for term in &report.terms {
                    rows.push(vec![
                        s.id.clone(),
                        b.clone(),
                        n.to_string(),
                        term.name.clone(),
                        fmt_f64(term.value),
                        fmt_f64(report.total),
                        s.seed.to_string(),
                    ]);
                }
                json_reports.push(serde_json::json!({
                    "scenario": s.id,
                    "n": n,
                    "report": serde_json::to_value(&report)
                        .map_err(|e| SteinError::Invalid(e.to_string()))?,
                }));
            }
        }
    }
    write_csv(
        &cli.out.join("bounds.csv"),
        &["scenario", "bound_id", "n", "term", "value", "total", "seed"],
        &rows,
        cli.no_timestamp,
    )?;
    write_json(&cli.out.join("bounds.json"), &serde_json::Value::Array(json_reports))?;
    println!("wrote {} and {}", cli.out.join("bounds.csv").display(), cli.out.join("bounds.json").display());
    Ok(())
}

fn cmd_rate(scenarios: &[Scenario], cli: &Cli) -> Result<()> {
    let mut rows = Vec::new();
    for (si, s) in scenarios.iter().enumerate() {
        let fit = rate_fit(
            &s.g,
            &s.h,
            &s.dists,
            &s.n_grid,
            s.samples,
            s.seed,
            stream_id(si, 0, 0),
            reference_for(&s.g),
        )?;
        println!(
            "scenario {}: slope {:.4} ± {:.4} over {} significant points",
            s.id,
            fit.slope,
            fit.slope_stderr,
            fit.points.iter().filter(|p| p.included).count()
        );
        for p in &fit.points {
            rows.push(vec![
                s.id.clone(),
                p.n.to_string(),
                s.samples.to_string(),
                fmt_f64(p.delta),
                fmt_f64(p.stderr),
                p.included.to_string(),
                fmt_f64(fit.slope),
                fmt_f64(fit.slope_stderr),
                fmt_f64(fit.intercept),
                s.seed.to_string(),
            ]);
        }
    }
    write_csv(
        &cli.out.join("rate.csv"),
        &[
            "scenario",
            "n",
            "N",
            "delta_mean",
            "delta_stderr",
            "included",
            "slope",
            "slope_stderr",
            "intercept",
            "seed",
        ],
        &rows,
        cli.no_timestamp,
    )?;
    println!("wrote {}", cli.out.join("rate.csv").display());
    Ok(())
}

fn reference_for(g: &stein::gfunctions::GFunction) -> Reference {
    if g.dim() <= 2 {
        Reference::Quadrature { nodes: 64 }
    } else {
        Reference::MonteCarlo { n_samples: 10_000_000, seed: 0xD15C0, stream_id: 0xFFFF }
    }
}

fn cmd_distance(scenarios: &[Scenario], cli: &Cli) -> Result<()> {
    let mut dist_rows = Vec::new();
    let mut validity_rows = Vec::new();
    for (si, s) in scenarios.iter().enumerate() {
        let study = DistanceStudy::new(s.g.clone(), s.h.clone(), reference_for(&s.g))?;
        for (ni, &n) in s.n_grid.iter().enumerate() {
            let est = study.distance(&s.dists, n, s.samples, s.seed, stream_id(si, ni, 1))?;
            dist_rows.push(vec![
                s.id.clone(),
                n.to_string(),
                s.samples.to_string(),
                fmt_f64(est.mean),
                fmt_f64(est.stderr),
                s.seed.to_string(),
            ]);
        }
        for b in &s.bounds {
            let rows = bound_validity(
                &study,
                &s.dists,
                &s.n_grid,
                s.samples,
                s.seed,
                stream_id(si, 0, 1),
                |n| s.evaluate_bound(b, n),
            )?;
            for row in rows {
                if !row.ok {
                    println!(
                        "finding: scenario {} bound {b} violated at n={}: margin {}",
                        s.id, row.n, row.margin
                    );
                }
                validity_rows.push(vec![
                    format!("{}:{b}", s.id),
                    row.n.to_string(),
                    row.n_samples.to_string(),
                    fmt_f64(row.delta),
                    fmt_f64(row.stderr),
                    fmt_f64(row.bound_total),
                    fmt_f64(row.margin),
                    row.seed.to_string(),
                ]);
            }
        }
    }
    write_csv(
        &cli.out.join("distance.csv"),
        &["scenario", "n", "N", "delta_mean", "delta_stderr", "seed"],
        &dist_rows,
        cli.no_timestamp,
    )?;
    println!("wrote {}", cli.out.join("distance.csv").display());
    if !validity_rows.is_empty() {
        write_csv(
            &cli.out.join("validity.csv"),
            &[
                "scenario",
                "n",
                "N",
                "delta_mean",
                "delta_stderr",
                "bound_total",
                "margin",
                "seed",
            ],
            &validity_rows,
            cli.no_timestamp,
        )?;
        println!("wrote {}", cli.out.join("validity.csv").display());
    }
    Ok(())
}

fn cmd_solve(scenarios: &[Scenario], cli: &Cli) -> Result<()> {
    let mut rows = Vec::new();
    for s in scenarios {
        let Some(grid) = s.solve else {
            return Err(SteinError::Invalid(format!(
                "scenario `{}` has no `solve` section (w_min, w_max, points)",
                s.id
            )));
        };
        let solver = SteinSolver::new(&s.g, &s.h, SolverConfig::default())?;
        let axis: Vec<f64> = (0..grid.points)
            .map(|i| {
                grid.w_min + (grid.w_max - grid.w_min) * i as f64 / (grid.points - 1) as f64
            })
            .collect();
        let points: Vec<Vec<f64>> = match s.g.dim() {
            1 => axis.iter().map(|&w| vec![w]).collect(),
            2 => axis
                .iter()
                .flat_map(|&a| axis.iter().map(move |&b| vec![a, b]))
                .collect(),
            d => {
                return Err(SteinError::Range(format!(
                    "solve supports d ≤ 2, scenario `{}` has d = {d}",
                    s.id
                )))
            }
        };
        for w in points {
            let f = solver.solve_f(&w)?;
            let r = solver.stein_residual(&w)?;
            rows.push(vec![
                s.id.clone(),
                fmt_f64(w[0]),
                if w.len() > 1 { fmt_f64(w[1]) } else { String::new() },
                fmt_f64(f),
                fmt_f64(r),
                s.seed.to_string(),
            ]);
        }
    }
    write_csv(
        &cli.out.join("solve.csv"),
        &["scenario", "w1", "w2", "f", "residual", "seed"],
        &rows,
        cli.no_timestamp,
    )?;
    println!("wrote {}", cli.out.join("solve.csv").display());
    Ok(())
}
