//! Command-line interface.
//!
//! Exit codes: 0 success, 1 domain-negative (e.g. no copy found, a checked
//! inequality failed), 2 budget exceeded, 3 validation error, 4 hard
//! assertion failure (internal invariant or consistency violation).

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_rational::Ratio;

use thresholdlab::construction::{
    build_cherry_graph, check_small_subgraph_sparsity, random_regular_graph, CherryGraph,
    CherrySidecar,
};
use thresholdlab::containment::{contains_cherry_graph_with_budget, DEFAULT_CONTAINMENT_BUDGET};
use thresholdlab::experiments::{cherry_order, parse_p_grid, render_gap_table, run_experiment, ExperimentConfig};
use thresholdlab::graph::Graph;
use thresholdlab::moments::{estimate_qf, SubgraphFamilySpec};
use thresholdlab::montecarlo::{estimate_containment_probability, estimate_threshold};
use thresholdlab::verification::{
    verify_aut_copy_bounds, verify_bk_exhaustive, verify_claim_path_bounds,
    verify_extension_bound, VerificationReport,
};
use thresholdlab::{Error, Result};

#[derive(Parser)]
#[command(
    name = "thresholdlab",
    version,
    about = "Cherry-augmented graphs: construction, first-moment thresholds, Monte Carlo containment, and inequality verification"
)]
struct Cli {
    /// Worker threads (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    workers: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a 4-regular core F and emit its cherry augmentation H.
    Construct {
        #[arg(long)]
        t: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Edge-list output path; a JSON sidecar lands at <out>.json.
        #[arg(long)]
        out: PathBuf,
    },
    /// First-moment threshold estimate over a subgraph family.
    Qf {
        /// Host edge list produced by `construct` (expects <graph>.json sidecar).
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "exhaustive:6,structural")]
        family: String,
        #[arg(long)]
        out: PathBuf,
        /// Optional CSV export of the per-subgraph records.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Empirical containment threshold by confidence-gated bisection.
    Pc {
        #[arg(long)]
        t: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 20_000)]
        trials: u64,
        #[arg(long, default_value_t = 0.5)]
        target: f64,
        #[arg(long, default_value_t = 0.05)]
        tolerance: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Containment probability curve over a p grid.
    Curve {
        #[arg(long)]
        t: usize,
        #[arg(long)]
        n: usize,
        /// Grid as start:end:step, e.g. 0.05:0.5:0.025.
        #[arg(long)]
        p_grid: String,
        #[arg(long, default_value_t = 2_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Decide whether a host contains the cherry augmentation of a core.
    Contains {
        #[arg(long)]
        host: PathBuf,
        #[arg(long)]
        core: PathBuf,
        /// Write the witness JSON here when a copy exists.
        #[arg(long)]
        witness: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_CONTAINMENT_BUDGET)]
        budget: u64,
    },
    /// Run verification suites (bk, paths, aut, sparsity, extension, goal, core, all).
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 6)]
        t: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Host size; suite-specific default when omitted.
        #[arg(long)]
        n: Option<usize>,
        /// Edge probability; suite-specific default when omitted.
        #[arg(long)]
        p: Option<f64>,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a full experiment from a TOML config.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Re-render the gap table of a completed run directory.
    Report { run_dir: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.workers > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.workers)
            .build_global()
        {
            eprintln!("error: failed to size worker pool: {e}");
            return ExitCode::from(3);
        }
    }
    match dispatch(cli.command, cli.workers) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::BudgetExceeded(_) => 2u8,
                Error::InvalidInput(_) | Error::Generation(_) | Error::Io(_)
                | Error::Serialization(_) => 3u8,
                Error::Internal(_) | Error::AssertionFailed(_) => 4u8,
            })
        }
    }
}

fn read_graph(path: &Path) -> Result<Graph> {
    Graph::from_edge_list_str(&std::fs::read_to_string(path)?)
}

fn load_cherry_graph(graph_path: &Path) -> Result<CherryGraph> {
    let graph = read_graph(graph_path)?;
    let sidecar_path = sidecar_path(graph_path);
    let sidecar: CherrySidecar = serde_json::from_str(&std::fs::read_to_string(&sidecar_path)?)?;
    CherryGraph::from_parts(graph, &sidecar)
}

fn sidecar_path(graph_path: &Path) -> PathBuf {
    let mut name = graph_path.file_name().unwrap_or_default().to_os_string();
    name.push(".json");
    graph_path.with_file_name(name)
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    std::fs::write(path, bytes)?;
    Ok(())
}

fn dispatch(command: Command, cli_workers: usize) -> Result<ExitCode> {
    match command {
        Command::Construct { t, seed, out } => {
            let f = random_regular_graph(t, 4, seed)?;
            let h = build_cherry_graph(&f)?;
            h.validate()?;
            std::fs::write(&out, h.graph().to_edge_list_string())?;
            write_json(&sidecar_path(&out), &h.to_sidecar())?;
            println!(
                "t={t} seed={seed}: v_H={} e_H={} -> {}",
                h.graph().vertex_count(),
                h.graph().edge_count(),
                out.display()
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Qf {
            graph,
            n,
            family,
            out,
            csv,
        } => {
            let host = load_cherry_graph(&graph)?;
            let family: SubgraphFamilySpec = family.parse()?;
            let report = estimate_qf(&host, n, family)?;
            write_json(&out, &report)?;
            if let Some(csv_path) = csv {
                std::fs::write(&csv_path, report.to_csv())?;
            }
            println!(
                "qf_estimate={} pe_estimate={} records={}{}",
                report.qf_estimate,
                report.pe_estimate,
                report.records.len(),
                if report.complete { "" } else { " (incomplete)" }
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Pc {
            t,
            n,
            seed,
            trials,
            target,
            tolerance,
            out,
        } => {
            let f = random_regular_graph(t, 4, seed)?;
            let h = build_cherry_graph(&f)?;
            let moments = estimate_qf(&h, n, SubgraphFamilySpec::structural_default())?;
            let threshold = estimate_threshold(n, &f, target, tolerance, trials, seed)?;
            let markov_ok = threshold.bracket.0 >= moments.qf_estimate;
            let payload = serde_json::json!({
                "t": t, "n": n, "seed": seed,
                "threshold": threshold,
                "qf_estimate": moments.qf_estimate,
                "markov_ok": markov_ok,
            });
            write_json(&out, &payload)?;
            println!(
                "p_hat={} bracket=[{}, {}] qf_estimate={}",
                threshold.p_hat, threshold.bracket.0, threshold.bracket.1, moments.qf_estimate
            );
            if !markov_ok {
                return Err(Error::AssertionFailed(format!(
                    "threshold bracket {:?} fell below qf estimate {}",
                    threshold.bracket, moments.qf_estimate
                )));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Curve {
            t,
            n,
            p_grid,
            trials,
            seed,
            out,
        } => {
            let f = random_regular_graph(t, 4, seed)?;
            let grid = parse_p_grid(&p_grid)?;
            let mut csv = String::from("p,trials,successes,point,ci_lo,ci_hi\n");
            for p in grid {
                let est = estimate_containment_probability(n, p, &f, trials, seed)?;
                csv.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    est.p, est.trials, est.successes, est.point, est.ci_lo, est.ci_hi
                ));
            }
            std::fs::write(&out, csv)?;
            println!("curve written to {}", out.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Contains {
            host,
            core,
            witness,
            budget,
        } => {
            let host_graph = read_graph(&host)?;
            let core_graph = read_graph(&core)?;
            match contains_cherry_graph_with_budget(&host_graph, &core_graph, budget)? {
                Some(found) => {
                    if let Some(path) = witness {
                        write_json(&path, &found)?;
                    }
                    println!("contains: core image {:?}", found.core_image);
                    Ok(ExitCode::SUCCESS)
                }
                None => {
                    println!("does not contain");
                    Ok(ExitCode::from(1))
                }
            }
        }
        Command::Verify {
            suite,
            t,
            seed,
            n,
            p,
            trials,
            out,
        } => {
            let reports = run_verify_suites(&suite, t, seed, n, p, trials)?;
            write_json(&out, &reports)?;
            let mut failed = 0usize;
            for r in &reports {
                let status = match (&r.skipped_reason, r.passed()) {
                    (Some(reason), _) => format!("SKIP ({reason})"),
                    (None, true) => "PASS".to_string(),
                    (None, false) => {
                        failed += 1;
                        format!("FAIL ({} failures)", r.failures.len())
                    }
                };
                println!("{:<20} {:>6} instances  {status}", r.check_name, r.instances);
            }
            if failed > 0 {
                Ok(ExitCode::from(1))
            } else {
                Ok(ExitCode::SUCCESS)
            }
        }
        Command::Run { config, out } => {
            let config = ExperimentConfig::from_toml_str(&std::fs::read_to_string(&config)?)?;
            // The CLI flag wins; otherwise the config's worker count applies.
            let workers = if cli_workers > 0 { cli_workers } else { config.workers };
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(workers)
                .build()
                .map_err(|e| Error::Internal(format!("worker pool: {e}")))?;
            let summary = pool.install(|| run_experiment(&config, &out))?;
            println!(
                "cells={} cache_hits={} errors={} assertion_failures={} -> {}",
                summary.cells,
                summary.cache_hits,
                summary.errors,
                summary.assertion_failures,
                summary.run_dir.display()
            );
            if summary.assertion_failures > 0 {
                return Err(Error::AssertionFailed(format!(
                    "{} cells violated hard assertions",
                    summary.assertion_failures
                )));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Report { run_dir } => {
            let (csv, text) = render_gap_table(&run_dir)?;
            std::fs::write(run_dir.join("gap_table.csv"), &csv)?;
            std::fs::write(run_dir.join("gap_table.txt"), &text)?;
            print!("{text}");
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn run_verify_suites(
    suite: &str,
    t: usize,
    seed: u64,
    n: Option<usize>,
    p: Option<f64>,
    trials: u64,
) -> Result<Vec<VerificationReport>> {
    let wanted: Vec<&str> = if suite == "all" {
        vec!["bk", "paths", "aut", "sparsity", "extension", "goal", "core"]
    } else {
        suite.split(',').map(str::trim).collect()
    };
    let f = random_regular_graph(t, 4, seed)?;
    let h = build_cherry_graph(&f)?;
    let v_h = cherry_order(t);
    let mut reports = Vec::new();
    for name in wanted {
        let report = match name {
            "bk" => {
                let n_bk = n.unwrap_or(5).min(6);
                let x: Vec<usize> = (0..3.min(n_bk - 1)).collect();
                let ps = [Ratio::new(1, 4), Ratio::new(1, 2), Ratio::new(3, 4)];
                verify_bk_exhaustive(n_bk, &x, &ps)?
            }
            "paths" => {
                let n_paths = n.unwrap_or(4 * v_h);
                let p_paths = p.unwrap_or(8.0 / (n_paths as f64).sqrt());
                verify_claim_path_bounds(&h, n_paths, p_paths, 6, 3)?
            }
            "aut" => verify_aut_copy_bounds(&f, 5.min(t))?,
            "sparsity" => {
                let sparsity = check_small_subgraph_sparsity(&f, t.min(8))?;
                VerificationReport {
                    check_name: "core_sparsity".into(),
                    instances: 1,
                    failures: match &sparsity.violating_subgraph {
                        Some(s) => vec![format!("dense subset {s:?}")],
                        None => Vec::new(),
                    },
                    parameters: serde_json::json!({
                        "t": t, "seed": seed,
                        "max_checked_size": sparsity.max_checked_size,
                        "note": sparsity.epsilon_note,
                    }),
                    skipped_reason: None,
                }
            }
            "extension" => {
                let n_ext = n.unwrap_or(cherry_order(t));
                let grid = [p.unwrap_or(0.3)];
                verify_extension_bound(n_ext.max(t + 1), t, &grid, trials, seed)?
            }
            "goal" => {
                let n_goal = n.unwrap_or(v_h);
                let p_goal = p.unwrap_or(8.0 / (n_goal as f64).sqrt());
                thresholdlab::moments::verify_goal_inequality(&h, n_goal, p_goal, 5)?
            }
            "core" => {
                let n_core = n.unwrap_or(v_h);
                let p_core = p.unwrap_or(0.9);
                thresholdlab::moments::verify_core_inequality(&f, n_core, p_core, 5)?
            }
            other => {
                return Err(Error::InvalidInput(format!(
                    "unknown verification suite '{other}'"
                )))
            }
        };
        reports.push(report);
    }
    Ok(reports)
}

