use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64 as C64;
use rand::Rng;
use serde::Serialize;

use crate::ensemble::{
    aggregate, bits_to_value, decode_bits, finish, Bit, EnsembleReadout, DEFAULT_THRESHOLD,
};
use crate::error::{Error, Result};
use crate::noise::trial_rng;
use crate::simcore::{Circuit, ClassicalOp, Gate, GateKind, StateVector};

type Oracle = Arc<dyn Fn(u64) -> bool + Send + Sync>;

/// Search over n-bit strings for x with T(x) = 1.
#[derive(Clone)]
pub struct GroverInstance {
    pub n_bits: usize,
    oracle: Oracle,
    /// Number of solutions, if known to the algorithm.
    pub t: Option<usize>,
    /// Computers per molecule.
    pub computers: usize,
}

impl fmt::Debug for GroverInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GroverInstance")
            .field("n_bits", &self.n_bits)
            .field("t", &self.t)
            .field("computers", &self.computers)
            .finish()
    }
}

impl GroverInstance {
    pub fn new<F>(n_bits: usize, oracle: F) -> Result<GroverInstance>
    where
        F: Fn(u64) -> bool + Send + Sync + 'static,
    {
        if n_bits == 0 || n_bits > 24 {
            return Err(Error::InvalidParameter(format!(
                "n_bits = {n_bits} must lie in [1, 24]"
            )));
        }
        Ok(GroverInstance {
            n_bits,
            oracle: Arc::new(oracle),
            t: None,
            computers: 1,
        })
    }

    /// Instance whose solutions are exactly `solutions`; t is known.
    pub fn from_solutions(n_bits: usize, solutions: &[u64]) -> Result<GroverInstance> {
        if let Some(&bad) = solutions.iter().find(|&&s| n_bits < 64 && s >> n_bits != 0) {
            return Err(Error::InvalidParameter(format!(
                "solution {bad} has more than {n_bits} bits"
            )));
        }
        let mut set = solutions.to_vec();
        set.sort_unstable();
        set.dedup();
        let t = set.len();
        let mut inst = GroverInstance::new(n_bits, move |x| set.binary_search(&x).is_ok())?;
        inst.t = Some(t);
        Ok(inst)
    }

    pub fn with_computers(mut self, m: usize) -> GroverInstance {
        self.computers = m;
        self
    }

    pub fn size(&self) -> u64 {
        1 << self.n_bits
    }

    pub fn is_solution(&self, x: u64) -> bool {
        (self.oracle)(x)
    }

    /// All solutions in increasing order, by scanning.
    pub fn solutions(&self) -> Vec<u64> {
        (0..self.size()).filter(|&x| self.is_solution(x)).collect()
    }

    /// Number of solutions whose leading `len` bits equal `prefix`.
    pub fn count_with_prefix(&self, prefix: u64, len: usize) -> usize {
        let free = self.n_bits - len;
        let base = prefix << free;
        (base..base + (1 << free))
            .filter(|&x| self.is_solution(x))
            .count()
    }

    fn known_t(&self) -> usize {
        self.t.unwrap_or_else(|| self.solutions().len())
    }
}

/// ⌊(π/4)√(N/t)⌋.
pub fn iterations_for(n: u64, t: usize) -> usize {
    if t == 0 {
        return 0;
    }
    (PI / 4.0 * (n as f64 / t as f64).sqrt()).floor() as usize
}

/// sin²((2k+1)θ) with θ = arcsin √(t/N).
pub fn success_probability_formula(n: u64, t: usize, k: usize) -> f64 {
    let theta = (t as f64 / n as f64).sqrt().asin();
    ((2 * k + 1) as f64 * theta).sin().powi(2)
}

/// State after k Grover iterations from the uniform superposition. Basis
/// index x holds the string x, most significant bit on qubit 0.
pub fn grover_iterate(inst: &GroverInstance, k: usize) -> Result<StateVector> {
    let n = inst.size() as usize;
    let marked: Vec<bool> = (0..n as u64).map(|x| inst.is_solution(x)).collect();
    if k > 0 && !marked.contains(&true) {
        return Err(Error::NoSolutions);
    }
    let mut amps = vec![1.0 / (n as f64).sqrt(); n];
    for _ in 0..k {
        for (a, &m) in amps.iter_mut().zip(&marked) {
            if m {
                *a = -*a;
            }
        }
        let mean = amps.iter().sum::<f64>() / n as f64;
        amps.iter_mut().for_each(|a| *a = 2.0 * mean - *a);
    }
    StateVector::from_unnormalized(amps.into_iter().map(|a| C64::new(a, 0.0)).collect())
}

pub fn success_probability(state: &StateVector, inst: &GroverInstance) -> f64 {
    state
        .amplitudes()
        .iter()
        .enumerate()
        .filter(|(x, _)| inst.is_solution(*x as u64))
        .map(|(_, a)| a.norm_sqr())
        .sum()
}

/// Outcome of one Grover run with known t: a uniformly chosen solution with
/// probability sin²((2k+1)θ), otherwise a uniformly chosen non-solution.
#[derive(Debug, Clone)]
pub struct OutputDistribution {
    pub solutions: Vec<u64>,
    pub size: u64,
    pub success: f64,
}

impl OutputDistribution {
    pub fn new(inst: &GroverInstance, k: usize) -> Result<OutputDistribution> {
        let solutions = inst.solutions();
        if solutions.is_empty() {
            return Err(Error::NoSolutions);
        }
        Ok(OutputDistribution {
            success: success_probability_formula(inst.size(), solutions.len(), k),
            size: inst.size(),
            solutions,
        })
    }

    pub fn prob(&self, x: u64) -> f64 {
        let t = self.solutions.len();
        if self.solutions.binary_search(&x).is_ok() {
            self.success / t as f64
        } else if self.size as usize > t {
            (1.0 - self.success) / (self.size as usize - t) as f64
        } else {
            0.0
        }
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> u64 {
        let t = self.solutions.len();
        if t as u64 == self.size || rng.random::<f64>() < self.success {
            return self.solutions[rng.random_range(0..t)];
        }
        loop {
            let x = rng.random_range(0..self.size);
            if self.solutions.binary_search(&x).is_err() {
                return x;
            }
        }
    }
}

/// Odd-even transposition sort of m registers of `width` bits.
///
/// Each comparator is a reversible operation on `[a][b][f]` that sets
/// f ^= (key(a) > key(b)) and swaps a and b when f is then 1. The key puts
/// verified solutions before non-solutions, each group in increasing order.
#[derive(Debug, Clone)]
pub struct SortNetwork {
    pub registers: usize,
    pub width: usize,
    /// Register pairs compared, in order.
    pub comparators: Vec<(usize, usize)>,
    op: ClassicalOp,
}

impl SortNetwork {
    pub fn new(inst: &GroverInstance, registers: usize) -> Result<SortNetwork> {
        let w = inst.n_bits;
        let oracle = inst.oracle.clone();
        let key = move |x: u64| ((!oracle(x)) as u64) << w | x;
        let mask = (1u64 << w) - 1;
        let op = ClassicalOp::new("compare-swap", 2 * w + 1, move |s| {
            let (a, b) = ((s >> (w + 1)) & mask, (s >> 1) & mask);
            let f = (s & 1) ^ (key(a) > key(b)) as u64;
            let (a, b) = if f == 1 { (b, a) } else { (a, b) };
            (a << (w + 1)) | (b << 1) | f
        })?;
        let comparators = (0..registers)
            .flat_map(|round| {
                (round % 2..registers.saturating_sub(1))
                    .step_by(2)
                    .map(|i| (i, i + 1))
            })
            .collect();
        Ok(SortNetwork {
            registers,
            width: w,
            comparators,
            op,
        })
    }

    /// Runs the network on basis values with all flags starting at 0.
    pub fn apply(&self, values: &mut [u64]) -> Vec<bool> {
        let w = self.width;
        let mask = (1u64 << w) - 1;
        self.comparators
            .iter()
            .map(|&(i, j)| {
                let out = self.op.eval((values[i] << (w + 1)) | (values[j] << 1));
                values[i] = (out >> (w + 1)) & mask;
                values[j] = (out >> 1) & mask;
                out & 1 == 1
            })
            .collect()
    }

    /// The network as a circuit: registers first, then one flag per
    /// comparator.
    pub fn circuit(&self) -> Result<Circuit> {
        let w = self.width;
        let mut c = Circuit::new(self.registers * w + self.comparators.len());
        for (k, &(i, j)) in self.comparators.iter().enumerate() {
            let targets: Vec<usize> = (i * w..(i + 1) * w)
                .chain(j * w..(j + 1) * w)
                .chain([self.registers * w + k])
                .collect();
            c.push_op(self.op.clone(), &targets)?;
        }
        Ok(c)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct MultiSolutionOptions {
    pub molecules: u64,
    pub seed: u64,
    /// Replace the first and last register by random bits when they agree.
    pub randomize: bool,
}

impl MultiSolutionOptions {
    pub fn new(molecules: u64, seed: u64) -> MultiSolutionOptions {
        MultiSolutionOptions {
            molecules,
            seed,
            randomize: true,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MultiSolutionReport {
    pub computers: usize,
    pub iterations: usize,
    /// Readout of all m sorted registers, register 0 first, each most
    /// significant bit first.
    pub readout: EnsembleReadout,
    pub min_bits: Vec<Bit>,
    pub max_bits: Vec<Bit>,
    pub min: Option<u64>,
    pub max: Option<u64>,
    /// Molecules whose first and last registers agreed.
    pub first_equals_last: u64,
    /// Molecules whose first register was not the smallest solution.
    pub min_misplaced: u64,
}

fn push_bits(out: &mut Vec<f64>, x: u64, w: usize) {
    out.extend((0..w).map(|i| {
        if (x >> (w - 1 - i)) & 1 == 1 {
            -1.0
        } else {
            1.0
        }
    }));
}

/// Sorted registers of one molecule and its readout contribution.
fn molecule_readout(values: &[u64], w: usize, randomize: bool) -> Vec<f64> {
    let m = values.len();
    let mut out = Vec::with_capacity(m * w);
    let equal = randomize && values[0] == values[m - 1];
    for (i, &v) in values.iter().enumerate() {
        if equal && (i == 0 || i == m - 1) {
            out.extend(std::iter::repeat_n(0.0, w));
        } else {
            push_bits(&mut out, v, w);
        }
    }
    out
}

/// Every molecule runs m independent Grover searches, sorts the outputs in
/// place and reads out; the smallest solution is decoded from register 0 and
/// the largest from register m − 1.
pub fn grover_multi_solution(
    inst: &GroverInstance,
    opts: &MultiSolutionOptions,
) -> Result<MultiSolutionReport> {
    let t = inst.known_t();
    if t < 2 {
        return Err(Error::InvalidParameter(format!(
            "multi-solution search needs t ≥ 2, got {t}"
        )));
    }
    let m = inst.computers;
    if m < 2 {
        return Err(Error::InvalidParameter(format!(
            "need at least 2 computers per molecule, got {m}"
        )));
    }
    let k = iterations_for(inst.size(), t);
    let dist = OutputDistribution::new(inst, k)?;
    let net = SortNetwork::new(inst, m)?;
    let w = inst.n_bits;
    let smallest = dist.solutions[0];
    let width = m * w + 2;
    let (sum, sq) = aggregate(opts.molecules, width, |trial| {
        let mut rng = trial_rng(opts.seed, trial);
        let mut values: Vec<u64> = (0..m).map(|_| dist.sample(&mut rng)).collect();
        net.apply(&mut values);
        let mut out = molecule_readout(&values, w, opts.randomize);
        out.push((values[0] == values[m - 1]) as u8 as f64);
        out.push((values[0] != smallest) as u8 as f64);
        Ok(out)
    })?;
    let first_equals_last = sum[m * w].round() as u64;
    let min_misplaced = sum[m * w + 1].round() as u64;
    let readout = finish(
        sum[..m * w].to_vec(),
        sq[..m * w].to_vec(),
        opts.molecules,
        Some(opts.seed),
    );
    let min_bits = decode_bits(&readout, &(0..w).collect::<Vec<_>>(), DEFAULT_THRESHOLD)?;
    let max_bits = decode_bits(
        &readout,
        &((m - 1) * w..m * w).collect::<Vec<_>>(),
        DEFAULT_THRESHOLD,
    )?;
    Ok(MultiSolutionReport {
        computers: m,
        iterations: k,
        min: bits_to_value(&min_bits),
        max: bits_to_value(&max_bits),
        min_bits,
        max_bits,
        readout,
        first_equals_last,
        min_misplaced,
    })
}

/// One Grover run per molecule with no sorting.
pub fn naive_readout(inst: &GroverInstance, molecules: u64, seed: u64) -> Result<EnsembleReadout> {
    let k = iterations_for(inst.size(), inst.known_t());
    let dist = OutputDistribution::new(inst, k)?;
    let w = inst.n_bits;
    let (sum, sq) = aggregate(molecules, w, |trial| {
        let mut out = Vec::with_capacity(w);
        push_bits(&mut out, dist.sample(&mut trial_rng(seed, trial)), w);
        Ok(out)
    })?;
    Ok(finish(sum, sq, molecules, Some(seed)))
}

/// Exact readout of the sorted registers, by enumerating all N^m joint
/// outcomes of the m Grover runs.
pub fn exact_multi_readout(inst: &GroverInstance, randomize: bool) -> Result<Vec<f64>> {
    let m = inst.computers;
    let w = inst.n_bits;
    if m * w > 20 {
        return Err(Error::CapExceeded {
            what: "enumerated outcome bits",
            needed: m * w,
            cap: 20,
        });
    }
    let dist = OutputDistribution::new(inst, iterations_for(inst.size(), inst.known_t()))?;
    let net = SortNetwork::new(inst, m)?;
    let mask = (1u64 << w) - 1;
    let mut means = vec![0.0; m * w];
    for joint in 0..1u64 << (m * w) {
        let mut values: Vec<u64> = (0..m).map(|i| (joint >> (i * w)) & mask).collect();
        let p: f64 = values.iter().map(|&v| dist.prob(v)).product();
        if p == 0.0 {
            continue;
        }
        net.apply(&mut values);
        for (acc, e) in means
            .iter_mut()
            .zip(molecule_readout(&values, w, randomize))
        {
            *acc += p * e;
        }
    }
    Ok(means)
}

/// Probability that the first and last sorted registers agree when every
/// computer returns a uniformly chosen solution, over all t^m outcomes.
pub fn first_equals_last_probability(inst: &GroverInstance) -> Result<f64> {
    let solutions = inst.solutions();
    let (t, m) = (solutions.len(), inst.computers);
    if t == 0 {
        return Err(Error::NoSolutions);
    }
    let total = (t as u64)
        .checked_pow(m as u32)
        .filter(|&v| v <= 1 << 24)
        .ok_or(Error::CapExceeded {
            what: "enumerated outcomes",
            needed: usize::MAX,
            cap: 1 << 24,
        })?;
    let net = SortNetwork::new(inst, m)?;
    let mut hits = 0u64;
    for code in 0..total {
        let mut k = code;
        let mut values: Vec<u64> = (0..m)
            .map(|_| {
                let v = solutions[(k % t as u64) as usize];
                k /= t as u64;
                v
            })
            .collect();
        net.apply(&mut values);
        hits += (values[0] == values[m - 1]) as u64;
    }
    Ok(hits as f64 / total as f64)
}

/// (1 − 1/t)^m: no computer returns the smallest solution.
pub fn min_misplaced_bound(t: usize, m: usize) -> f64 {
    (1.0 - 1.0 / t as f64).powi(m as i32)
}

fn diagonal(name: &str, signs: &[f64]) -> Result<Gate> {
    let d = signs.len();
    let mut m = vec![C64::new(0.0, 0.0); d * d];
    for (i, &s) in signs.iter().enumerate() {
        m[i * d + i] = C64::new(s, 0.0);
    }
    Gate::unitary(
        GateKind::Custom(name.into()),
        d.trailing_zeros() as usize,
        m,
    )
}

/// The whole protocol for one molecule as a coherent circuit: m Grover
/// registers, the sort network, an equality flag and two random registers.
/// Only for n_bits ≤ 3, where oracle and diffusion fit in one gate.
/// Returns the circuit and the qubits of each register.
pub fn multi_solution_circuit(
    inst: &GroverInstance,
    randomize: bool,
) -> Result<(Circuit, Vec<Vec<usize>>)> {
    let w = inst.n_bits;
    let m = inst.computers;
    if w > 3 {
        return Err(Error::Unsupported(format!(
            "coherent protocol needs n_bits ≤ 3, got {w}"
        )));
    }
    let n = inst.size();
    let oracle = diagonal(
        "oracle",
        &(0..n)
            .map(|x| if inst.is_solution(x) { -1.0 } else { 1.0 })
            .collect::<Vec<_>>(),
    )?;
    let reflect = diagonal(
        "reflect0",
        &(0..n)
            .map(|x| if x == 0 { 1.0 } else { -1.0 })
            .collect::<Vec<_>>(),
    )?;
    let k = iterations_for(n, inst.known_t());
    let net = SortNetwork::new(inst, m)?;
    let mut c = Circuit::new(0);
    let regs: Vec<Vec<usize>> = (0..m).map(|_| c.alloc(w)).collect();
    let flags = c.alloc(net.comparators.len());
    for r in &regs {
        for &q in r {
            c.push(Gate::h(), &[q])?;
        }
        for _ in 0..k {
            c.push(oracle.clone(), r)?;
            for &q in r {
                c.push(Gate::h(), &[q])?;
            }
            c.push(reflect.clone(), r)?;
            for &q in r {
                c.push(Gate::h(), &[q])?;
            }
        }
    }
    let map: Vec<usize> = regs.iter().flatten().copied().chain(flags).collect();
    c.append(&net.circuit()?, &map)?;
    if randomize {
        let e = c.alloc_one();
        let mask = (1u64 << w) - 1;
        let eq = ClassicalOp::new("equal", 2 * w + 1, move |s| {
            s ^ ((((s >> (w + 1)) & mask) == ((s >> 1) & mask)) as u64)
        })?;
        let (first, last) = (&regs[0], &regs[m - 1]);
        let targets: Vec<usize> = first.iter().chain(last).copied().chain([e]).collect();
        c.push_op(eq, &targets)?;
        for reg in [first, last] {
            let rnd = c.alloc(w);
            for (&a, &b) in reg.iter().zip(&rnd) {
                c.push(Gate::h(), &[b])?;
                c.push(Gate::fredkin(), &[e, a, b])?;
            }
        }
    }
    Ok((c, regs))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_success_probabilities() {
        let inst = GroverInstance::from_solutions(2, &[3]).unwrap();
        assert!(
            (success_probability(&grover_iterate(&inst, 1).unwrap(), &inst) - 1.0).abs() < 1e-12
        );
        let inst = GroverInstance::from_solutions(8, &[3, 200]).unwrap();
        assert_eq!(iterations_for(256, 2), 8);
        assert!(success_probability_formula(256, 2, 8) >= 0.99);
        let p0 = success_probability(&grover_iterate(&inst, 0).unwrap(), &inst);
        assert!((p0 - 2.0 / 256.0).abs() < 1e-12);
    }

    #[test]
    fn no_solutions_is_flagged() {
        let inst = GroverInstance::new(3, |_| false).unwrap();
        assert_eq!(grover_iterate(&inst, 1).unwrap_err(), Error::NoSolutions);
        assert!(grover_iterate(&inst, 0).is_ok());
    }

    #[test]
    fn network_sorts_solutions_first() {
        let inst = GroverInstance::from_solutions(3, &[2, 6]).unwrap();
        let net = SortNetwork::new(&inst, 4).unwrap();
        let mut v = vec![6, 1, 2, 0];
        net.apply(&mut v);
        assert_eq!(v, vec![2, 6, 0, 1]);
    }

    #[test]
    fn output_distribution_sums_to_one() {
        let inst = GroverInstance::from_solutions(4, &[1, 9, 12]).unwrap();
        let d = OutputDistribution::new(&inst, 2).unwrap();
        assert!(((0..16).map(|x| d.prob(x)).sum::<f64>() - 1.0).abs() < 1e-12);
    }
}
