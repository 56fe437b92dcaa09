use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::grover::{success_probability_formula, GroverInstance};
use crate::error::Result;
use crate::noise::trial_rng;

/// A simulated existence test gives up once its Grover iterations exceed
/// this multiple of √(subcube size).
pub const EXISTENCE_BUDGET: f64 = 9.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ExistenceTest {
    /// Counts solutions in the subcube directly.
    Exact,
    /// Grover search with an unknown number of solutions and a growing
    /// random iteration count, repeated 2j + 1 times with a majority vote at
    /// stage j.
    Simulated { seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum SearchOutcome {
    Found {
        solution: u64,
        stages: usize,
        queries: u64,
    },
    NoSolution {
        queries: u64,
    },
}

impl SearchOutcome {
    pub fn solution(&self) -> Option<u64> {
        match self {
            SearchOutcome::Found { solution, .. } => Some(*solution),
            SearchOutcome::NoSolution { .. } => None,
        }
    }

    pub fn queries(&self) -> u64 {
        match self {
            SearchOutcome::Found { queries, .. } | SearchOutcome::NoSolution { queries } => {
                *queries
            }
        }
    }
}

/// One search with unknown t on a subcube of `size` strings holding
/// `solutions` of them. Each round runs k random iterations, then checks the
/// sampled string with one more query.
fn grover_exists(size: u64, solutions: usize, rng: &mut ChaCha8Rng, queries: &mut u64) -> bool {
    let root = (size as f64).sqrt();
    let budget = EXISTENCE_BUDGET * root;
    let mut m = 1.0f64;
    let mut spent = 0.0;
    loop {
        let k = rng.random_range(0..m.floor().max(1.0) as usize);
        *queries += k as u64 + 1;
        spent += (k + 1) as f64;
        if solutions > 0 && rng.random::<f64>() < success_probability_formula(size, solutions, k) {
            return true;
        }
        if spent >= budget {
            return false;
        }
        m = (m * 6.0 / 5.0).min(root);
    }
}

/// Finds the lexicographically first solution by fixing one bit per stage.
/// Stage j asks whether the subcube with the current prefix followed by 0
/// holds a solution.
pub fn grover_binary_search(inst: &GroverInstance, test: ExistenceTest) -> Result<SearchOutcome> {
    let n = inst.n_bits;
    let mut queries = 0u64;
    let mut rng = match test {
        ExistenceTest::Simulated { seed } => Some(trial_rng(seed, 0)),
        ExistenceTest::Exact => None,
    };
    let mut exists = |prefix: u64, len: usize, reps: usize, queries: &mut u64| -> bool {
        let count = inst.count_with_prefix(prefix, len);
        match rng.as_mut() {
            None => count > 0,
            Some(rng) => {
                let size = 1u64 << (n - len);
                let yes = (0..reps)
                    .filter(|_| grover_exists(size, count, rng, queries))
                    .count();
                2 * yes > reps
            }
        }
    };
    if !exists(0, 0, 1, &mut queries) {
        return Ok(SearchOutcome::NoSolution { queries });
    }
    let mut prefix = 0u64;
    for j in 0..n {
        let zero = prefix << 1;
        prefix = if exists(zero, j + 1, 2 * (j + 1) + 1, &mut queries) {
            zero
        } else {
            zero | 1
        };
    }
    if rng.is_some() {
        queries += 1;
        if !inst.is_solution(prefix) {
            return Ok(SearchOutcome::NoSolution { queries });
        }
    }
    Ok(SearchOutcome::Found {
        solution: prefix,
        stages: n,
        queries,
    })
}

/// Least-squares c for queries ≈ c·√N, and the largest relative deviation
/// of a point from the fit.
pub fn fit_sqrt_scaling(points: &[(f64, f64)]) -> (f64, f64) {
    let num: f64 = points.iter().map(|(n, q)| q * n.sqrt()).sum();
    let den: f64 = points.iter().map(|(n, _)| n).sum();
    let c = num / den;
    let dev = points
        .iter()
        .map(|(n, q)| (q / (c * n.sqrt()) - 1.0).abs())
        .fold(0.0, f64::max);
    (c, dev)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let single = GroverInstance::from_solutions(8, &[42]).unwrap();
        assert_eq!(
            grover_binary_search(&single, ExistenceTest::Exact)
                .unwrap()
                .solution(),
            Some(42)
        );
        let all = GroverInstance::new(8, |_| true).unwrap();
        assert_eq!(
            grover_binary_search(&all, ExistenceTest::Exact)
                .unwrap()
                .solution(),
            Some(0)
        );
        let none = GroverInstance::new(8, |_| false).unwrap();
        assert!(matches!(
            grover_binary_search(&none, ExistenceTest::Exact).unwrap(),
            SearchOutcome::NoSolution { .. }
        ));
    }

    #[test]
    fn simulated_mode_finds_single_solution() {
        let inst = GroverInstance::from_solutions(8, &[42]).unwrap();
        let out = grover_binary_search(&inst, ExistenceTest::Simulated { seed: 3 }).unwrap();
        assert_eq!(out.solution(), Some(42));
        assert!(out.queries() > 0);
    }
}
