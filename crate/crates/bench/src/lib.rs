//! Benchmark inputs.

use parity_forge_core::problem::random_problem_with;
use parity_forge_core::ProblemSpec;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const WORKED_EXAMPLE: &str = include_str!("../../core/tests/data/worked_example.json");
pub const SIDE_CONDITIONS: &str = include_str!("../../core/tests/data/side_conditions.json");

pub fn worked_example() -> ProblemSpec {
    ProblemSpec::parse(WORKED_EXAMPLE).expect("fixture parses")
}

pub fn side_conditions() -> ProblemSpec {
    ProblemSpec::parse(SIDE_CONDITIONS).expect("fixture parses")
}

/// Random instance with `n` logical qubits and `k` terms of up to four qubits.
pub fn random(n: usize, k: usize, seed: u64) -> ProblemSpec {
    random_problem_with(&mut ChaCha8Rng::seed_from_u64(seed), n, k, 4)
}
