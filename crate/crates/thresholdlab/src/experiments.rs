//! Experiment orchestration: typed configs, content-addressed cell caching,
//! run directories, and the headline gap table comparing empirical
//! thresholds against first-moment estimates.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::construction::{build_cherry_graph, check_small_subgraph_sparsity, random_regular_graph};
use crate::moments::{estimate_qf, MomentReport, SubgraphFamilySpec};
use crate::montecarlo::{estimate_threshold_with_caps, ThresholdEstimate, THRESHOLD_MAX_PROBES};
use crate::verification::VerificationReport;
use crate::{Error, Result, CODE_VERSION};

/// Environment variable naming the cache root; falls back to
/// `<run-dir>/cache` when unset.
pub const CACHE_ENV: &str = "THRESHOLDLAB_CACHE";

/// A requested host size: either an absolute `n` or a multiple of the
/// cherry-graph order `v_H = t + C(t,2)` (written `"2vH"`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NSpec {
    Absolute(usize),
    VhMultiple(usize),
}

pub fn cherry_order(t: usize) -> usize {
    t + t * (t - 1) / 2
}

impl NSpec {
    pub fn resolve(&self, t: usize) -> usize {
        match self {
            NSpec::Absolute(n) => *n,
            NSpec::VhMultiple(k) => k * cherry_order(t),
        }
    }
}

impl fmt::Display for NSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NSpec::Absolute(n) => write!(f, "{n}"),
            NSpec::VhMultiple(k) => write!(f, "{k}vH"),
        }
    }
}

impl FromStr for NSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if let Some(k) = s.strip_suffix("vH") {
            let k: usize = k
                .parse()
                .map_err(|_| Error::InvalidInput(format!("bad vH multiple '{s}'")))?;
            if k == 0 {
                return Err(Error::InvalidInput("vH multiple must be positive".into()));
            }
            Ok(NSpec::VhMultiple(k))
        } else {
            let n: usize = s
                .parse()
                .map_err(|_| Error::InvalidInput(format!("bad n value '{s}'")))?;
            Ok(NSpec::Absolute(n))
        }
    }
}

impl Serialize for NSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for NSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

fn default_target() -> f64 {
    0.5
}

fn default_trials_cap() -> u64 {
    crate::montecarlo::THRESHOLD_TRIALS_CAP
}

/// Full experiment description; serializes to TOML with explicit keys and
/// round-trips by value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub t_list: Vec<usize>,
    pub n_list: Vec<NSpec>,
    pub seeds: Vec<u64>,
    pub trials: u64,
    pub family: SubgraphFamilySpec,
    pub tolerance: f64,
    pub workers: usize,
    #[serde(default = "default_target")]
    pub target: f64,
    /// Per-probe trial ceiling for the bisection's doubling rule.
    #[serde(default = "default_trials_cap")]
    pub trials_cap: u64,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.t_list.is_empty() || self.n_list.is_empty() || self.seeds.is_empty() {
            return Err(Error::InvalidInput(
                "t_list, n_list and seeds must be nonempty".into(),
            ));
        }
        if self.trials == 0 {
            return Err(Error::InvalidInput("trials must be positive".into()));
        }
        if self.trials_cap < self.trials {
            return Err(Error::InvalidInput(
                "trials_cap must be at least trials".into(),
            ));
        }
        if self.tolerance <= 0.0 {
            return Err(Error::InvalidInput("tolerance must be positive".into()));
        }
        if !(0.0 < self.target && self.target < 1.0) {
            return Err(Error::InvalidInput("target must lie in (0,1)".into()));
        }
        self.family.validate()?;
        for &t in &self.t_list {
            if t < 5 {
                return Err(Error::InvalidInput(format!("t = {t} below the minimum 5")));
            }
            for nspec in &self.n_list {
                let n = nspec.resolve(t);
                if n < cherry_order(t) {
                    return Err(Error::InvalidInput(format!(
                        "n = {n} below v_H = {} for t = {t} (pair t={t}, n={nspec})",
                        cherry_order(t)
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Serialization(e.to_string()))
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            toml::from_str(text).map_err(|e| Error::InvalidInput(format!("config parse: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Parses a probability grid given as `start:end:step` (inclusive end).
pub fn parse_p_grid(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::InvalidInput(format!(
            "p grid '{spec}' must be start:end:step"
        )));
    }
    let start: f64 = parts[0]
        .parse()
        .map_err(|_| Error::InvalidInput("bad grid start".into()))?;
    let end: f64 = parts[1]
        .parse()
        .map_err(|_| Error::InvalidInput("bad grid end".into()))?;
    let step: f64 = parts[2]
        .parse()
        .map_err(|_| Error::InvalidInput("bad grid step".into()))?;
    if !(0.0..=1.0).contains(&start) || !(0.0..=1.0).contains(&end) || step <= 0.0 || end < start {
        return Err(Error::InvalidInput(format!("degenerate p grid '{spec}'")));
    }
    let mut grid = Vec::new();
    let mut i = 0usize;
    loop {
        let p = start + step * i as f64;
        if p > end + 1e-12 {
            break;
        }
        grid.push(p.min(1.0));
        i += 1;
    }
    Ok(grid)
}

/// Everything computed for one `(t, n, seed)` cell.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CellResult {
    pub t: usize,
    pub n: usize,
    pub seed: u64,
    pub f_edges: String,
    pub h_edges: String,
    pub moments: MomentReport,
    pub threshold: ThresholdEstimate,
    pub verification: Vec<VerificationReport>,
    /// Lower bracket end of the threshold estimate at least the family
    /// qf estimate; a hard consistency requirement.
    pub markov_ok: bool,
    pub error: Option<String>,
}

/// One row of the gap table.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GapRow {
    pub t: usize,
    pub n: usize,
    pub seed: u64,
    pub v_h: usize,
    pub qf_estimate: f64,
    pub p_hat: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub ratio: f64,
    pub sqrt_log_vh: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunSummary {
    pub cells: usize,
    pub cache_hits: usize,
    pub errors: usize,
    pub assertion_failures: usize,
    pub run_dir: PathBuf,
}

fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

fn cache_root(run_dir: &Path) -> PathBuf {
    match std::env::var_os(CACHE_ENV) {
        Some(root) if !root.is_empty() => PathBuf::from(root),
        _ => run_dir.join("cache"),
    }
}

fn cell_key(config: &ExperimentConfig, t: usize, n: usize, seed: u64) -> String {
    let payload = serde_json::json!({
        "code_version": CODE_VERSION,
        "t": t,
        "n": n,
        "seed": seed,
        "trials": config.trials,
        "tolerance": config.tolerance,
        "target": config.target,
        "trials_cap": config.trials_cap,
        "family": config.family,
    });
    let mut hasher = Sha256::new();
    hasher.update(payload.to_string().as_bytes());
    hex_string(&hasher.finalize())
}

fn hex_string(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Per-cell master seed: decorrelates cells sharing a seed but differing in
/// `(t, n)`.
fn cell_master_seed(seed: u64, t: usize, n: usize) -> u64 {
    seed ^ ((t as u64) << 40) ^ ((n as u64) << 20)
}

fn compute_cell(config: &ExperimentConfig, t: usize, n: usize, seed: u64) -> CellResult {
    let mut error = None;
    let mut verification = Vec::new();

    let outcome = (|| -> Result<(String, String, MomentReport, ThresholdEstimate)> {
        let f = random_regular_graph(t, 4, seed)?;
        let h = build_cherry_graph(&f)?;
        h.validate()?;
        let sparsity = check_small_subgraph_sparsity(&f, t.min(8))?;
        verification.push(VerificationReport {
            check_name: "core_sparsity".into(),
            instances: 1,
            failures: match &sparsity.violating_subgraph {
                Some(s) => vec![format!("dense subset {s:?}")],
                None => Vec::new(),
            },
            parameters: serde_json::json!({ "t": t, "seed": seed, "max_size": t.min(8) }),
            skipped_reason: None,
        });
        let moments = estimate_qf(&h, n, config.family)?;
        let threshold = estimate_threshold_with_caps(
            n,
            &f,
            config.target,
            config.tolerance,
            config.trials,
            cell_master_seed(seed, t, n),
            config.trials_cap,
            THRESHOLD_MAX_PROBES,
        )?;
        Ok((
            f.to_edge_list_string(),
            h.graph().to_edge_list_string(),
            moments,
            threshold,
        ))
    })();

    match outcome {
        Ok((f_edges, h_edges, moments, threshold)) => {
            let markov_ok = threshold.bracket.0 >= moments.qf_estimate;
            if !markov_ok {
                error = Some(format!(
                    "markov violation: threshold bracket [{}, {}] below qf estimate {}",
                    threshold.bracket.0, threshold.bracket.1, moments.qf_estimate
                ));
            }
            CellResult {
                t,
                n,
                seed,
                f_edges,
                h_edges,
                moments,
                threshold,
                verification,
                markov_ok,
                error,
            }
        }
        // A cell that failed to compute carries its error note; the
        // consistency flag stays vacuously true since nothing was checked.
        Err(e) => CellResult {
            t,
            n,
            seed,
            f_edges: String::new(),
            h_edges: String::new(),
            moments: empty_moment_report(n),
            threshold: empty_threshold(config.target, config.trials),
            verification,
            markov_ok: true,
            error: Some(e.to_string()),
        },
    }
}

fn empty_moment_report(n: usize) -> MomentReport {
    MomentReport {
        host: crate::graph::Graph::empty(0),
        n,
        family_description: String::new(),
        records: Vec::new(),
        qf_estimate: f64::NAN,
        pe_estimate: f64::NAN,
        argmax_subgraph: crate::graph::Graph::empty(0),
        lower_bound_note: String::new(),
        complete: false,
    }
}

fn empty_threshold(target: f64, trials: u64) -> ThresholdEstimate {
    ThresholdEstimate {
        p_hat: f64::NAN,
        bracket: (f64::NAN, f64::NAN),
        target,
        trials_per_probe: trials,
        probes: Vec::new(),
        converged: false,
        trials_capped: false,
    }
}

/// Runs (or resumes) an experiment into `run_dir`.
///
/// Cells are content-addressed by their parameters and the code version;
/// re-running an identical config recomputes nothing and reproduces the
/// same artifacts. Cells execute in parallel on the current rayon pool; all
/// aggregation is deterministic.
pub fn run_experiment(config: &ExperimentConfig, run_dir: &Path) -> Result<RunSummary> {
    config.validate()?;
    fs::create_dir_all(run_dir)?;
    let cache_dir = cache_root(run_dir);
    fs::create_dir_all(&cache_dir)?;
    atomic_write(&run_dir.join("config.toml"), config.to_toml()?.as_bytes())?;

    let mut cells: Vec<(usize, usize, u64)> = Vec::new();
    for &t in &config.t_list {
        for nspec in &config.n_list {
            for &seed in &config.seeds {
                cells.push((t, nspec.resolve(t), seed));
            }
        }
    }
    cells.sort_unstable();
    cells.dedup();

    let results: Vec<(CellResult, bool)> = cells
        .par_iter()
        .map(|&(t, n, seed)| {
            let key = cell_key(config, t, n, seed);
            let cache_path = cache_dir.join(format!("{key}.json"));
            if let Ok(bytes) = fs::read(&cache_path) {
                if let Ok(cell) = serde_json::from_slice::<CellResult>(&bytes) {
                    return Ok((cell, true));
                }
            }
            let cell = compute_cell(config, t, n, seed);
            let bytes = serde_json::to_vec_pretty(&cell)?;
            atomic_write(&cache_path, &bytes)?;
            Ok((cell, false))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut cache_hits = 0;
    let mut errors = 0;
    let mut assertion_failures = 0;
    for (cell, hit) in &results {
        if *hit {
            cache_hits += 1;
        }
        if cell.error.is_some() {
            errors += 1;
        }
        if !cell.markov_ok {
            assertion_failures += 1;
        }
        let dir = run_dir.join("cells").join(format!(
            "t{}_n{}_seed{}",
            cell.t, cell.n, cell.seed
        ));
        fs::create_dir_all(&dir)?;
        if !cell.f_edges.is_empty() {
            atomic_write(&dir.join("f.edges"), cell.f_edges.as_bytes())?;
            atomic_write(&dir.join("h.edges"), cell.h_edges.as_bytes())?;
        }
        atomic_write(&dir.join("cell.json"), &serde_json::to_vec_pretty(cell)?)?;
    }

    let rows: Vec<GapRow> = results
        .iter()
        .filter(|(c, _)| c.error.is_none() || !c.markov_ok)
        .map(|(c, _)| gap_row(c))
        .collect();
    let (csv, text) = format_gap_table(&rows);
    atomic_write(&run_dir.join("gap_table.csv"), csv.as_bytes())?;
    atomic_write(&run_dir.join("gap_table.txt"), text.as_bytes())?;

    Ok(RunSummary {
        cells: results.len(),
        cache_hits,
        errors,
        assertion_failures,
        run_dir: run_dir.to_path_buf(),
    })
}

fn gap_row(cell: &CellResult) -> GapRow {
    let v_h = cherry_order(cell.t);
    GapRow {
        t: cell.t,
        n: cell.n,
        seed: cell.seed,
        v_h,
        qf_estimate: cell.moments.qf_estimate,
        p_hat: cell.threshold.p_hat,
        ci_lo: cell.threshold.bracket.0,
        ci_hi: cell.threshold.bracket.1,
        ratio: cell.threshold.p_hat / cell.moments.qf_estimate,
        sqrt_log_vh: (v_h as f64).ln().sqrt(),
    }
}

/// Renders the gap table (CSV plus aligned text) from a completed run
/// directory. Rows are sorted by `(t, n, seed)`; per-`t` aggregates and a
/// Spearman rank coefficient of mean ratio against `t` are appended to the
/// text form as a reported trend, never a pass/fail.
pub fn render_gap_table(run_dir: &Path) -> Result<(String, String)> {
    let cells_dir = run_dir.join("cells");
    let mut rows = Vec::new();
    let mut entries: Vec<PathBuf> = fs::read_dir(&cells_dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .collect();
    entries.sort();
    for dir in entries {
        let cell_file = dir.join("cell.json");
        if cell_file.exists() {
            let cell: CellResult = serde_json::from_slice(&fs::read(&cell_file)?)?;
            // Cells that failed to compute stay out of the table; their
            // error notes live in cell.json.
            if cell.error.is_none() || !cell.markov_ok {
                rows.push(gap_row(&cell));
            }
        }
    }
    if rows.is_empty() {
        return Err(Error::InvalidInput(format!(
            "no completed cells under {}",
            cells_dir.display()
        )));
    }
    rows.sort_by_key(|r| (r.t, r.n, r.seed));
    Ok(format_gap_table(&rows))
}

fn format_gap_table(rows: &[GapRow]) -> (String, String) {
    let mut sorted: Vec<&GapRow> = rows.iter().collect();
    sorted.sort_by_key(|r| (r.t, r.n, r.seed));

    let mut csv = String::from("t,n,seed,v_H,qf_estimate,p_hat,ci_lo,ci_hi,ratio,sqrt_log_vH\n");
    for r in &sorted {
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            r.t, r.n, r.seed, r.v_h, r.qf_estimate, r.p_hat, r.ci_lo, r.ci_hi, r.ratio, r.sqrt_log_vh
        ));
    }

    let mut text = String::new();
    text.push_str(&format!(
        "{:>3} {:>5} {:>6} {:>5} {:>12} {:>12} {:>12} {:>12} {:>8} {:>10}\n",
        "t", "n", "seed", "v_H", "qf_est", "p_hat", "ci_lo", "ci_hi", "ratio", "sqrt_ln_vH"
    ));
    for r in &sorted {
        text.push_str(&format!(
            "{:>3} {:>5} {:>6} {:>5} {:>12.6} {:>12.6} {:>12.6} {:>12.6} {:>8.4} {:>10.4}\n",
            r.t, r.n, r.seed, r.v_h, r.qf_estimate, r.p_hat, r.ci_lo, r.ci_hi, r.ratio, r.sqrt_log_vh
        ));
    }

    // Per-t aggregates over seeds (and n values) with a normal-approximation
    // interval on the mean ratio.
    let mut ts: Vec<usize> = sorted.iter().map(|r| r.t).collect();
    ts.dedup();
    let mut mean_ratios = Vec::new();
    text.push_str("\nper-t aggregates:\n");
    for &t in &ts {
        let ratios: Vec<f64> = sorted
            .iter()
            .filter(|r| r.t == t)
            .map(|r| r.ratio)
            .collect();
        let k = ratios.len() as f64;
        let mean = ratios.iter().sum::<f64>() / k;
        let var = ratios.iter().map(|r| (r - mean) * (r - mean)).sum::<f64>() / k.max(1.0);
        let half = 1.959963984540054 * (var / k).sqrt();
        mean_ratios.push((t, mean));
        text.push_str(&format!(
            "  t={t}: mean ratio {:.4} (+/- {:.4}, {} rows)\n",
            mean,
            half,
            ratios.len()
        ));
    }
    if mean_ratios.len() >= 2 {
        let spearman = spearman_rank(&mean_ratios);
        text.push_str(&format!(
            "\nratio trend vs t: Spearman rho = {spearman:.4} (reported, not asserted)\n"
        ));
    }
    (csv, text)
}

fn spearman_rank(pairs: &[(usize, f64)]) -> f64 {
    let n = pairs.len() as f64;
    // t values are already strictly increasing; rank the ratios.
    let mut by_ratio: Vec<usize> = (0..pairs.len()).collect();
    by_ratio.sort_by(|&a, &b| pairs[a].1.total_cmp(&pairs[b].1));
    let mut rank = vec![0.0f64; pairs.len()];
    for (r, &idx) in by_ratio.iter().enumerate() {
        rank[idx] = r as f64;
    }
    let d2: f64 = rank
        .iter()
        .enumerate()
        .map(|(i, &r)| (i as f64 - r) * (i as f64 - r))
        .sum();
    1.0 - 6.0 * d2 / (n * (n * n - 1.0))
}
