//! Construction and threshold analysis of cherry-augmented graphs.
//!
//! The library builds graphs `H` obtained from a 4-regular core `F` on `t`
//! vertices by attaching, for every pair of core vertices, one new degree-2
//! vertex ("cherry") adjacent to both. For such graphs it provides:
//!
//! * exact counting primitives (labeled embeddings, automorphisms, copies),
//! * first-moment threshold estimates over explicit subgraph families,
//! * an exact max-flow densest-subgraph solver,
//! * an exact containment decision procedure for `H` in arbitrary hosts,
//! * seeded, reproducible Monte Carlo estimation of containment
//!   probabilities and empirical thresholds,
//! * exhaustive numeric verification of the combinatorial inequalities the
//!   construction relies on (disjoint-occurrence bounds, path/cycle counting
//!   bounds, automorphism and copy-count bounds).

pub mod construction;
pub mod containment;
pub mod density;
pub mod embed;
pub mod experiments;
pub mod flow;
pub mod graph;
pub mod matching;
pub mod moments;
pub mod montecarlo;
pub mod subgraphs;
pub mod verification;

pub use construction::{build_cherry_graph, random_regular_graph, CherryGraph};
pub use containment::{contains_cherry_graph, ContainmentWitness};
pub use density::{max_subgraph_density, DensityResult};
pub use embed::{count_automorphisms, count_copies, enumerate_embeddings, Embedding};
pub use graph::Graph;
pub use moments::{estimate_qf, MomentReport, SubgraphFamilySpec};
pub use montecarlo::{estimate_threshold, sample_gnp, ProbabilityEstimate, ThresholdEstimate};
pub use verification::VerificationReport;

/// Version string baked into cache keys so stale cells are never reused
/// across incompatible releases.
pub const CODE_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Errors shared across the library.
///
/// The CLI maps these onto process exit codes: validation errors exit 3,
/// budget errors exit 2, assertion failures exit 4.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("generation failed: {0}")]
    Generation(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),

    #[error("hard assertion failed: {0}")]
    AssertionFailed(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serialization(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serialization(e.to_string())
    }
}
