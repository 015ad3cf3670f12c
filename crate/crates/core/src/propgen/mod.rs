//! Oracles, a typed term generator and the property checks built on them.

pub mod checks;
pub mod gen;
pub mod oracle;
pub mod selfapp;

pub use checks::{fuzz, fuzz_in, run_checks, CheckReport, Failure, FuzzRun, Gap};
pub use gen::{default_context, gen_typed_term, Generator};

use crate::rewrite::DEFAULT_FUEL;
use crate::syntax::Scalar;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenConfig {
    pub seed: u64,
    pub max_depth: usize,
    pub max_summands: usize,
    pub scalars: Vec<Scalar>,
    pub tyvars: Vec<String>,
    pub samples: usize,
    /// Step budget for every normalization the checks run.
    pub fuel: usize,
}

/// `{0, 1/2, 9/10, 1, 11/10, 2, 5/2}`: floors of 0, 1 and 2, each both
/// exact and rounded down.
pub fn default_scalars() -> Vec<Scalar> {
    [(0, 1), (1, 2), (9, 10), (1, 1), (11, 10), (2, 1), (5, 2)]
        .into_iter()
        .map(|(n, d)| Scalar::ratio(n, d).expect("nonnegative"))
        .collect()
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            seed: 0,
            max_depth: 4,
            max_summands: 3,
            scalars: default_scalars(),
            tyvars: vec!["X".to_string(), "Y".to_string()],
            samples: 500,
            fuel: DEFAULT_FUEL,
        }
    }
}
