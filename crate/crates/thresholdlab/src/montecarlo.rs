//! Seeded, reproducible Monte Carlo estimation of containment probabilities
//! and empirical thresholds.
//!
//! Every trial derives its own RNG stream from `(master_seed, stream,
//! trial_index)` through a counter-based mix, so estimates are bit-identical
//! regardless of how many worker threads execute the trials. Aggregation is
//! by integer counts and, where an error can occur, by smallest trial index.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::containment::{contains_cherry_graph_with_budget, extends, is_dangerous,
    DEFAULT_CONTAINMENT_BUDGET};
use crate::graph::Graph;
use crate::{Error, Result};

/// 95% normal quantile used by all Wilson intervals in the crate.
pub const WILSON_Z: f64 = 1.959963984540054;

const STREAM_CONTAINMENT: u64 = 0x636f_6e74;
const STREAM_EVENTS: u64 = 0x6576_656e;
const STREAM_PROBE_BASE: u64 = 0x7072_6f62_0000;

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Counter-based per-trial RNG: a hash of `(master_seed, stream, index)`
/// seeds an independent ChaCha8 stream. Reproducible under any parallel
/// schedule.
pub fn trial_rng(master_seed: u64, stream: u64, index: u64) -> ChaCha8Rng {
    let mixed = splitmix64(master_seed ^ splitmix64(stream ^ splitmix64(index)));
    ChaCha8Rng::seed_from_u64(mixed)
}

/// Samples `G_{n,p}`: each of the `C(n,2)` edges kept independently with
/// probability `p`, in fixed lexicographic order. Deterministic given the
/// seed.
pub fn sample_gnp(n: usize, p: f64, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_gnp_with(n, p, &mut rng)
}

pub fn sample_gnp_with(n: usize, p: f64, rng: &mut impl Rng) -> Graph {
    assert!((0.0..=1.0).contains(&p), "p must be a probability");
    let mut edges = Vec::new();
    for u in 0..n {
        for w in (u + 1)..n {
            if rng.random_bool(p) {
                edges.push((u, w));
            }
        }
    }
    Graph::new(n, &edges).expect("gnp edges are simple")
}

/// Wilson score interval for `successes / trials` at confidence `z`.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let phat = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = phat + z2 / (2.0 * n);
    let half = z * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt();
    let lo = if successes == 0 { 0.0 } else { ((center - half) / denom).max(0.0) };
    let hi = if successes == trials { 1.0 } else { ((center + half) / denom).min(1.0) };
    (lo, hi)
}

/// A Bernoulli estimate with its Wilson 95% interval.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProbabilityEstimate {
    pub p: f64,
    pub n: usize,
    pub t: usize,
    pub trials: u64,
    pub successes: u64,
    pub point: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub master_seed: u64,
}

impl ProbabilityEstimate {
    fn from_counts(p: f64, n: usize, t: usize, trials: u64, successes: u64, seed: u64) -> Self {
        let (ci_lo, ci_hi) = wilson_interval(successes, trials, WILSON_Z);
        ProbabilityEstimate {
            p,
            n,
            t,
            trials,
            successes,
            point: successes as f64 / trials.max(1) as f64,
            ci_lo,
            ci_hi,
            master_seed: seed,
        }
    }
}

fn cherry_vertex_count(t: usize) -> usize {
    t + t * (t - 1) / 2
}

/// Estimates `P(H(f) ⊆ G_{n,p})` over independent seeded trials.
pub fn estimate_containment_probability(
    n: usize,
    p: f64,
    f: &Graph,
    trials: u64,
    master_seed: u64,
) -> Result<ProbabilityEstimate> {
    estimate_containment_with_stream(n, p, f, trials, master_seed, STREAM_CONTAINMENT)
}

fn estimate_containment_with_stream(
    n: usize,
    p: f64,
    f: &Graph,
    trials: u64,
    master_seed: u64,
    stream: u64,
) -> Result<ProbabilityEstimate> {
    let t = f.vertex_count();
    if n < cherry_vertex_count(t) {
        return Err(Error::InvalidInput(format!(
            "n = {n} below v_H = {}",
            cherry_vertex_count(t)
        )));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidInput(format!("p = {p} is not a probability")));
    }
    let outcomes: Vec<std::result::Result<bool, String>> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(master_seed, stream, i);
            let g = sample_gnp_with(n, p, &mut rng);
            contains_cherry_graph_with_budget(&g, f, DEFAULT_CONTAINMENT_BUDGET)
                .map(|w| w.is_some())
                .map_err(|e| format!("trial {i}: {e}"))
        })
        .collect();
    // Deterministic error selection: smallest trial index wins.
    if let Some(err) = outcomes.iter().find_map(|r| r.as_ref().err()) {
        return Err(Error::BudgetExceeded(err.clone()));
    }
    let successes = outcomes.iter().filter(|r| matches!(r, Ok(true))).count() as u64;
    Ok(ProbabilityEstimate::from_counts(
        p,
        n,
        t,
        trials,
        successes,
        master_seed,
    ))
}

/// Empirical threshold estimate from confidence-gated bisection.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ThresholdEstimate {
    pub p_hat: f64,
    pub bracket: (f64, f64),
    pub target: f64,
    pub trials_per_probe: u64,
    pub probes: Vec<ProbabilityEstimate>,
    /// Bracket reached the requested relative width.
    pub converged: bool,
    /// A probe hit the trials cap while its interval still straddled the
    /// target.
    pub trials_capped: bool,
}

pub const THRESHOLD_MAX_PROBES: usize = 12;
pub const THRESHOLD_TRIALS_CAP: u64 = 100_000;

/// Bisects for the `p` with `P(H(f) ⊆ G_{n,p}) = target`.
///
/// The bracket starts at `[0, 1]`, where the containment probability is
/// exactly 0 and 1. A bracket endpoint moves only when the probe's Wilson
/// interval excludes the target; otherwise the probe reruns with doubled
/// trials (fresh streams) up to the cap.
pub fn estimate_threshold(
    n: usize,
    f: &Graph,
    target: f64,
    tolerance: f64,
    trials_per_probe: u64,
    master_seed: u64,
) -> Result<ThresholdEstimate> {
    estimate_threshold_with_caps(
        n,
        f,
        target,
        tolerance,
        trials_per_probe,
        master_seed,
        THRESHOLD_TRIALS_CAP,
        THRESHOLD_MAX_PROBES,
    )
}

/// Variant of [`estimate_threshold`] with explicit per-probe trial cap and
/// probe budget, for callers that need bounded wall time.
#[allow(clippy::too_many_arguments)]
pub fn estimate_threshold_with_caps(
    n: usize,
    f: &Graph,
    target: f64,
    tolerance: f64,
    trials_per_probe: u64,
    master_seed: u64,
    trials_cap: u64,
    max_probes: usize,
) -> Result<ThresholdEstimate> {
    if !(0.0 < target && target < 1.0) {
        return Err(Error::InvalidInput(format!("target {target} outside (0,1)")));
    }
    if tolerance <= 0.0 {
        return Err(Error::InvalidInput("tolerance must be positive".into()));
    }
    if trials_per_probe == 0 || trials_cap < trials_per_probe || max_probes == 0 {
        return Err(Error::InvalidInput("degenerate probe budget".into()));
    }
    let t = f.vertex_count();
    if n < cherry_vertex_count(t) {
        return Err(Error::InvalidInput(format!(
            "n = {n} below v_H = {}: containment is impossible and [0,1] does not bracket",
            cherry_vertex_count(t)
        )));
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut probes = Vec::new();
    let mut converged = false;
    let mut trials_capped = false;
    for probe_idx in 0..max_probes {
        let mid = 0.5 * (lo + hi);
        let mut trials = trials_per_probe;
        let mut attempt: u64 = 0;
        loop {
            let stream = STREAM_PROBE_BASE + ((probe_idx as u64) << 8) + attempt;
            let est = estimate_containment_with_stream(n, mid, f, trials, master_seed, stream)?;
            let (ci_lo, ci_hi) = (est.ci_lo, est.ci_hi);
            probes.push(est);
            if ci_hi < target {
                lo = mid;
                break;
            }
            if ci_lo > target {
                hi = mid;
                break;
            }
            if trials >= trials_cap {
                trials_capped = true;
                break;
            }
            trials = (trials * 2).min(trials_cap);
            attempt += 1;
        }
        if trials_capped {
            break;
        }
        let p_hat = 0.5 * (lo + hi);
        if hi - lo <= tolerance * p_hat {
            converged = true;
            break;
        }
    }
    Ok(ThresholdEstimate {
        p_hat: 0.5 * (lo + hi),
        bracket: (lo, hi),
        target,
        trials_per_probe,
        probes,
        converged,
        trials_capped,
    })
}

/// Monte Carlo estimates of the three events behind a fixed core-size set
/// `X = {0, .., t-1}`: dangerous, extends, and their conjunction, plus the
/// factorization gap `|P(bad) - P(dangerous) P(extends)|` with its standard
/// error under the independence null.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EventProbabilities {
    pub n: usize,
    pub t: usize,
    pub p: f64,
    pub trials: u64,
    pub p_dangerous: f64,
    pub p_extends: f64,
    pub p_bad: f64,
    pub product_gap: f64,
    pub gap_sigma: f64,
    pub within_3_sigma: bool,
    pub master_seed: u64,
}

pub fn estimate_event_probabilities(
    n: usize,
    t: usize,
    p: f64,
    f: &Graph,
    trials: u64,
    master_seed: u64,
) -> Result<EventProbabilities> {
    if f.vertex_count() != t {
        return Err(Error::InvalidInput(format!(
            "core has {} vertices, expected t = {t}",
            f.vertex_count()
        )));
    }
    if n < t + 1 {
        return Err(Error::InvalidInput("need at least one outside vertex".into()));
    }
    if trials == 0 {
        return Err(Error::InvalidInput("need at least one trial".into()));
    }
    let x: Vec<usize> = (0..t).collect();
    let cells: Vec<std::result::Result<(bool, bool), String>> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(master_seed, STREAM_EVENTS, i);
            let g = sample_gnp_with(n, p, &mut rng);
            let dangerous = is_dangerous(&g, &x, f)
                .map(|e| e.is_some())
                .map_err(|e| format!("trial {i}: {e}"))?;
            let ext = extends(&g, &x)
                .map(|a| a.is_some())
                .map_err(|e| format!("trial {i}: {e}"))?;
            Ok((dangerous, ext))
        })
        .collect();
    if let Some(err) = cells.iter().find_map(|r| r.as_ref().err()) {
        return Err(Error::Internal(err.clone()));
    }
    let mut n_a = 0u64;
    let mut n_b = 0u64;
    let mut n_ab = 0u64;
    for cell in &cells {
        let &(a, b) = cell.as_ref().expect("errors handled above");
        n_a += a as u64;
        n_b += b as u64;
        n_ab += (a && b) as u64;
    }
    let nt = trials as f64;
    let pa = n_a as f64 / nt;
    let pb = n_b as f64 / nt;
    let pab = n_ab as f64 / nt;
    let gap = (pab - pa * pb).abs();

    // Standard error of the sample covariance under the independence null:
    // Var(P_ab - P_a P_b) = pa pb (1-pa)(1-pb) / n. The null form stays
    // well-behaved when joint hits are too rare to observe (the empirical
    // plug-in variance collapses to zero there).
    let gap_sigma = (pa * pb * (1.0 - pa) * (1.0 - pb) / nt).sqrt();

    Ok(EventProbabilities {
        n,
        t,
        p,
        trials,
        p_dangerous: pa,
        p_extends: pb,
        p_bad: pab,
        product_gap: gap,
        gap_sigma,
        // Degenerate sigma (e.g. p = 1) only passes with an exactly zero gap.
        within_3_sigma: gap <= 3.0 * gap_sigma + 1e-12,
        master_seed,
    })
}

/// Monte Carlo estimate of `P(X extends)` for the fixed set `X = {0..t-1}`.
pub fn estimate_extends_probability(
    n: usize,
    t: usize,
    p: f64,
    trials: u64,
    master_seed: u64,
) -> Result<ProbabilityEstimate> {
    if n < t + 1 || t < 2 {
        return Err(Error::InvalidInput("need t >= 2 and an outside vertex".into()));
    }
    let x: Vec<usize> = (0..t).collect();
    let outcomes: Vec<std::result::Result<bool, String>> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(master_seed, STREAM_EVENTS, i);
            let g = sample_gnp_with(n, p, &mut rng);
            extends(&g, &x)
                .map(|a| a.is_some())
                .map_err(|e| format!("trial {i}: {e}"))
        })
        .collect();
    if let Some(err) = outcomes.iter().find_map(|r| r.as_ref().err()) {
        return Err(Error::Internal(err.clone()));
    }
    let successes = outcomes.iter().filter(|r| matches!(r, Ok(true))).count() as u64;
    Ok(ProbabilityEstimate::from_counts(
        p,
        n,
        t,
        trials,
        successes,
        master_seed,
    ))
}

/// Monte Carlo estimate of the single-pair event: vertices 0 and 1 have a
/// common neighbor outside `X = {0..t-1}`.
pub fn estimate_single_pair_probability(
    n: usize,
    t: usize,
    p: f64,
    trials: u64,
    master_seed: u64,
) -> Result<ProbabilityEstimate> {
    if n < t + 1 || t < 2 {
        return Err(Error::InvalidInput("need t >= 2 and an outside vertex".into()));
    }
    let outcomes: Vec<bool> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(master_seed, STREAM_EVENTS, i);
            let g = sample_gnp_with(n, p, &mut rng);
            (t..n).any(|z| g.has_edge(0, z) && g.has_edge(1, z))
        })
        .collect();
    let successes = outcomes.iter().filter(|&&b| b).count() as u64;
    Ok(ProbabilityEstimate::from_counts(
        p,
        n,
        t,
        trials,
        successes,
        master_seed,
    ))
}

#[cfg(test)]
#[allow(clippy::excessive_precision)] // frozen oracle constants keep all reference digits
mod tests {
    use super::*;

    #[test]
    fn gnp_extremes() {
        assert_eq!(sample_gnp(6, 0.0, 1).edge_count(), 0);
        assert_eq!(sample_gnp(6, 1.0, 1), Graph::complete(6));
    }

    #[test]
    fn gnp_edge_count_concentration() {
        // Binomial(C(100,2), 1/2): mean 2475, sigma ~ 35.2. Each of 100
        // fixed seeds must land within 4 sigma.
        let mean = 2475.0;
        let sigma = (4950.0f64 * 0.25).sqrt();
        for seed in 0..100 {
            let g = sample_gnp(100, 0.5, seed);
            let dev = (g.edge_count() as f64 - mean).abs();
            assert!(dev < 4.0 * sigma, "seed {seed}: edges {}", g.edge_count());
        }
    }

    #[test]
    fn wilson_sane_and_ordered() {
        let (lo, hi) = wilson_interval(50, 100, WILSON_Z);
        assert!(lo < 0.5 && 0.5 < hi);
        let (lo0, hi0) = wilson_interval(0, 100, WILSON_Z);
        assert!(lo0 == 0.0 && hi0 > 0.0 && hi0 < 0.1);
        let (lo1, hi1) = wilson_interval(100, 100, WILSON_Z);
        assert!(hi1 == 1.0 && lo1 < 1.0 && lo1 > 0.9);
    }

    #[test]
    fn wilson_coverage_on_known_bernoulli() {
        // For a known p = 0.3 stream, the 95% interval should contain p in
        // at least 93 of 100 repetitions.
        let mut covered = 0;
        for rep in 0..100u64 {
            let mut successes = 0u64;
            let trials = 400u64;
            for i in 0..trials {
                let mut rng = trial_rng(rep, 999, i);
                if rng.random_bool(0.3) {
                    successes += 1;
                }
            }
            let (lo, hi) = wilson_interval(successes, trials, WILSON_Z);
            if lo <= 0.3 && 0.3 <= hi {
                covered += 1;
            }
        }
        assert!(covered >= 93, "coverage {covered}/100");
    }

    #[test]
    fn containment_probability_extremes() {
        let f = Graph::complete(5);
        let one = estimate_containment_probability(15, 1.0, &f, 20, 7).unwrap();
        assert_eq!(one.point, 1.0);
        let zero = estimate_containment_probability(15, 0.0, &f, 20, 7).unwrap();
        assert_eq!(zero.point, 0.0);
    }

    #[test]
    fn containment_probability_monotone_in_p() {
        let f = Graph::complete(5);
        let grid = [0.35, 0.5, 0.65, 0.8];
        let est: Vec<ProbabilityEstimate> = grid
            .iter()
            .map(|&p| estimate_containment_probability(15, p, &f, 400, 11).unwrap())
            .collect();
        // Nondecreasing within CI overlap.
        for w in est.windows(2) {
            assert!(
                w[1].ci_hi >= w[0].ci_lo,
                "monotonicity violated beyond CI: {w:?}"
            );
        }
    }

    #[test]
    fn estimates_invariant_to_worker_count() {
        let f = Graph::complete(5);
        let run = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap();
            pool.install(|| estimate_containment_probability(15, 0.55, &f, 300, 99).unwrap())
        };
        let a = run(1);
        let b = run(8);
        assert_eq!(a.successes, b.successes);
        assert_eq!(a.point, b.point);
    }

    #[test]
    fn threshold_input_validation() {
        let f = Graph::complete(5);
        assert!(estimate_threshold(15, &f, 0.0, 0.1, 10, 0).is_err());
        assert!(estimate_threshold(15, &f, 1.0, 0.1, 10, 0).is_err());
        assert!(estimate_threshold(14, &f, 0.5, 0.1, 10, 0).is_err());
        assert!(estimate_threshold(15, &f, 0.5, -1.0, 10, 0).is_err());
    }

    #[test]
    fn threshold_bisection_brackets_target() {
        let f = Graph::complete(5);
        let est = estimate_threshold(15, &f, 0.5, 0.1, 400, 5).unwrap();
        assert!(est.bracket.0 < est.p_hat && est.p_hat < est.bracket.1);
        assert!(est.bracket.0 > 0.0 && est.bracket.1 < 1.0);
        assert!(!est.probes.is_empty());
        // The threshold for H(t=5) in G_15 sits well inside (0.3, 0.9).
        assert!(est.p_hat > 0.3 && est.p_hat < 0.9, "p_hat = {}", est.p_hat);
    }

    #[test]
    fn threshold_deterministic_given_seed() {
        let f = Graph::complete(5);
        let a = estimate_threshold(15, &f, 0.5, 0.15, 200, 13).unwrap();
        let b = estimate_threshold(15, &f, 0.5, 0.15, 200, 13).unwrap();
        assert_eq!(a.p_hat, b.p_hat);
        assert_eq!(a.bracket, b.bracket);
        assert_eq!(a.probes.len(), b.probes.len());
    }

    #[test]
    fn event_probabilities_at_p_one() {
        let f = Graph::complete(5);
        let ev = estimate_event_probabilities(15, 5, 1.0, &f, 50, 3).unwrap();
        assert_eq!(ev.p_dangerous, 1.0);
        assert_eq!(ev.p_extends, 1.0);
        assert_eq!(ev.p_bad, 1.0);
        assert!(ev.within_3_sigma);
    }

    #[test]
    fn expected_bad_sets_below_envelope() {
        // C(n,t) P(bad) <= n^t p^{2t} P(extends): the left side counts
        // expected bad sets; compared between estimates with CI slack.
        let f = Graph::complete(5);
        let (n, t, p) = (15usize, 5usize, 0.4f64);
        let trials = 40_000u64;
        let ev = estimate_event_probabilities(n, t, p, &f, trials, 31).unwrap();
        let choose_nt = 3003.0; // C(15,5)
        let bad_hits = (ev.p_bad * trials as f64).round() as u64;
        let ext_hits = (ev.p_extends * trials as f64).round() as u64;
        let (bad_lo, _) = wilson_interval(bad_hits, trials, WILSON_Z);
        let (_, ext_hi) = wilson_interval(ext_hits, trials, WILSON_Z);
        let lhs = choose_nt * bad_lo;
        let rhs = (n as f64).powi(t as i32) * p.powi(2 * t as i32) * ext_hi;
        assert!(lhs <= rhs, "envelope violated: {lhs} > {rhs}");
    }

    #[test]
    fn threshold_decreases_with_n() {
        // More room for copies: doubling n at fixed t lowers the threshold,
        // checked as a trend with CI slack over n in {15, 30, 60}.
        let f = Graph::complete(5);
        let estimates: Vec<ThresholdEstimate> = [15usize, 30, 60]
            .iter()
            .map(|&n| {
                estimate_threshold_with_caps(n, &f, 0.5, 0.12, 200, 77, 1600, 12).unwrap()
            })
            .collect();
        for w in estimates.windows(2) {
            assert!(
                w[1].bracket.0 < w[0].bracket.1,
                "threshold did not decrease within CI: {:?} then {:?}",
                w[0].bracket,
                w[1].bracket
            );
            assert!(w[1].p_hat < w[0].p_hat, "point estimates not decreasing");
        }
    }

    #[test]
    fn single_pair_matches_closed_form() {
        // P = 1 - (1 - p^2)^(n - t) for the pair {0,1}; frozen closed form
        // at (15, 5, 0.3) is 0.61058388188189255.
        let est = estimate_single_pair_probability(15, 5, 0.3, 20_000, 21).unwrap();
        let exact = 0.61058388188189255;
        let sigma = (exact * (1.0 - exact) / 20_000f64).sqrt();
        assert!(
            (est.point - exact).abs() <= 3.0 * sigma,
            "point {} vs exact {exact}",
            est.point
        );
    }

    #[test]
    fn extends_estimate_below_product_bound() {
        // P(extends) <= (1 - (1-p^2)^(n-t))^C(t,2); frozen bound at
        // (15, 5, 0.3) is 0.0072020039730402100.
        let est = estimate_extends_probability(15, 5, 0.3, 20_000, 17).unwrap();
        let bound = 0.0072020039730402100;
        assert!(
            est.ci_lo <= bound,
            "extends estimate {} (ci_lo {}) above product bound {bound}",
            est.point,
            est.ci_lo
        );
    }
}
