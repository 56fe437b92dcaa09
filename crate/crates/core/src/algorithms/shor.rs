use std::f64::consts::PI;

use rand::Rng;
use rustc_hash::FxHashMap;
use serde::Serialize;

use super::np::{np_function_wrapper, Verifier};
use crate::ensemble::{
    aggregate, decode_bits, finish, run_exact, Bit, EnsembleReadout, DEFAULT_THRESHOLD,
};
use crate::error::{Error, Result};
use crate::noise::{trial_rng, FaultPattern};
use crate::simcore::{controlled, run_circuit, Backend, Circuit, ClassicalOp, Gate, SimState};

/// Largest modulus; the output distribution costs O(q·r) to sum.
pub const MAX_N: u64 = 256;

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn mod_pow(base: u64, mut exp: u64, m: u64) -> u64 {
    let m = m as u128;
    let mut b = base as u128 % m;
    let mut acc = 1 % m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        exp >>= 1;
    }
    acc as u64
}

/// Euler's φ by direct count.
pub fn totient(r: u64) -> u64 {
    (1..=r).filter(|&k| gcd(k, r) == 1).count() as u64
}

fn prime_factors(mut v: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= v {
        if v.is_multiple_of(p) {
            out.push(p);
            while v.is_multiple_of(p) {
                v /= p;
            }
        }
        p += 1;
    }
    if v > 1 {
        out.push(v);
    }
    out
}

/// True if `r` is the multiplicative order of x mod n: x^r ≡ 1 and no
/// proper divisor of r has that property.
pub fn is_order(x: u64, n: u64, r: u64) -> bool {
    r >= 1 && mod_pow(x, r, n) == 1 && prime_factors(r).iter().all(|&p| mod_pow(x, r / p, n) != 1)
}

fn bit_length(v: u64) -> usize {
    (64 - v.leading_zeros() as usize).max(1)
}

/// Order finding for x modulo n.
#[derive(Debug, Clone, Serialize)]
pub struct ShorInstance {
    pub n: u64,
    pub x: u64,
    /// Power of two with n² < q ≤ 2n².
    pub q: u64,
    /// Width of the result registers; wide enough for any r′ < q.
    pub width: usize,
    r: u64,
}

impl ShorInstance {
    pub fn new(n: u64, x: u64) -> Result<ShorInstance> {
        if !(2..=MAX_N).contains(&n) {
            return Err(Error::InvalidParameter(format!(
                "n = {n} must lie in [2, {MAX_N}]"
            )));
        }
        if x == 0 || x >= n || gcd(x, n) != 1 {
            return Err(Error::InvalidParameter(format!(
                "x = {x} is not a unit modulo {n}"
            )));
        }
        let q = (n * n + 1).next_power_of_two();
        let r = (1..=n)
            .find(|&k| mod_pow(x, k, n) == 1)
            .expect("units have an order");
        Ok(ShorInstance {
            n,
            x,
            q,
            width: bit_length(q - 1),
            r,
        })
    }

    pub fn with_width(mut self, width: usize) -> Result<ShorInstance> {
        if width == 0 || width > 16 {
            return Err(Error::InvalidParameter(format!("result width {width}")));
        }
        self.width = width;
        Ok(self)
    }

    /// The true order, by brute force.
    pub fn order(&self) -> u64 {
        self.r
    }

    pub fn q_bits(&self) -> usize {
        self.q.trailing_zeros() as usize
    }

    /// Prob(c) for every c ∈ [0, q), summed in closed form per residue
    /// class of the exponent.
    pub fn outcome_distribution(&self) -> Vec<f64> {
        let (q, r) = (self.q, self.r);
        let qf = q as f64;
        (0..q)
            .map(|c| {
                let f = ((r as u128 * c as u128) % q as u128) as f64 / qf;
                let s = (PI * f).sin();
                (0..r.min(q))
                    .map(|k| {
                        let j = (q - k).div_ceil(r) as f64;
                        if f == 0.0 {
                            j * j
                        } else {
                            ((PI * j * f).sin() / s).powi(2)
                        }
                    })
                    .sum::<f64>()
                    / (qf * qf)
            })
            .collect()
    }

    /// Probability that a computer's r′ passes the order check.
    pub fn pass_probability(&self) -> f64 {
        self.outcome_distribution()
            .iter()
            .enumerate()
            .filter(|&(c, _)| is_order(self.x, self.n, continued_fraction(c as u64, self.q).1))
            .map(|(_, p)| p)
            .sum()
    }
}

/// The fraction d′/r′ with the smallest denominator satisfying
/// |c/q − d′/r′| ≤ 1/(2q), found from the continued-fraction expansions of
/// the interval's endpoints. It is always in lowest terms.
pub fn continued_fraction(c: u64, q: u64) -> (u64, u64) {
    if c == 0 {
        return (0, 1);
    }
    let (lo, hi) = ((2 * c - 1) as u128, (2 * c + 1) as u128);
    let (d, r) = simplest_between(lo, 2 * q as u128, hi, 2 * q as u128);
    (d as u64, r as u64)
}

/// Smallest-denominator fraction in [a/b, c/d], for 0 < a/b < c/d.
fn simplest_between(a: u128, b: u128, c: u128, d: u128) -> (u128, u128) {
    let whole = a / b;
    if whole * b == a {
        return (whole, 1);
    }
    if (whole + 1) * d <= c {
        return (whole + 1, 1);
    }
    let (p, r) = simplest_between(d, c - whole * d, b, a - whole * b);
    (whole * p + r, p)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ShorMode {
    /// Sample c from the classically summed output distribution.
    #[default]
    Distribution,
    /// Simulate the order-finding circuit and sample from its output.
    FullCircuit,
}

/// Order-finding circuit: H on the exponent register, modular
/// exponentiation into a second register holding 1, then the QFT on the
/// exponent register. Returns the circuit and the exponent register
/// (most significant bit first).
pub fn order_finding_circuit(inst: &ShorInstance) -> Result<(Circuit, Vec<usize>)> {
    let t = inst.q_bits();
    let w = bit_length(inst.n - 1);
    let mut labels = vec![false; t + w];
    labels[t + w - 1] = true;
    let mut c = Circuit::with_labels(&labels);
    let a: Vec<usize> = (0..t).collect();
    for &q in &a {
        c.push(Gate::h(), &[q])?;
    }
    let powers: Vec<u64> = (0..inst.q).map(|e| mod_pow(inst.x, e, inst.n)).collect();
    let (n, mask) = (inst.n, (1u64 << w) - 1);
    let modexp = ClassicalOp::new("modexp", t + w, move |v| {
        let (e, y) = (v >> w, v & mask);
        if y >= n {
            return v;
        }
        let y2 = (y as u128 * powers[e as usize] as u128 % n as u128) as u64;
        (e << w) | y2
    })?;
    c.push_op(modexp, &(0..t + w).collect::<Vec<_>>())?;
    for j in 0..t {
        c.push(Gate::h(), &[a[j]])?;
        for k in j + 1..t {
            let phase = Gate::phase(2.0 * PI / (1u64 << (k - j + 1)) as f64);
            c.push(controlled(&phase)?, &[a[k], a[j]])?;
        }
    }
    for j in 0..t / 2 {
        c.push(Gate::swap(), &[a[j], a[t - 1 - j]])?;
    }
    Ok((c, a))
}

/// Output distribution of the full circuit over c.
pub fn circuit_distribution(inst: &ShorInstance) -> Result<Vec<f64>> {
    let (c, a) = order_finding_circuit(inst)?;
    let mut state = SimState::from_bits(c.input_labels(), Backend::Dense)?;
    run_circuit(&mut state, &c, &FaultPattern::none())?;
    let rest = c.num_qubits() - a.len();
    let mut dist = vec![0.0; inst.q as usize];
    for (i, amp) in state.to_dense()?.amplitudes().iter().enumerate() {
        dist[i >> rest] += amp.norm_sqr();
    }
    Ok(dist)
}

fn sample_index<R: Rng>(dist: &[f64], rng: &mut R) -> u64 {
    let u: f64 = rng.random::<f64>() * dist.iter().sum::<f64>();
    let mut acc = 0.0;
    for (i, p) in dist.iter().enumerate() {
        acc += p;
        if u < acc {
            return i as u64;
        }
    }
    dist.iter().rposition(|&p| p > 0.0).unwrap_or(0) as u64
}

/// Draws one outcome c of the quantum part.
pub fn shor_quantum_sample<R: Rng>(
    inst: &ShorInstance,
    mode: ShorMode,
    rng: &mut R,
) -> Result<u64> {
    let dist = match mode {
        ShorMode::Distribution => inst.outcome_distribution(),
        ShorMode::FullCircuit => circuit_distribution(inst)?,
    };
    Ok(sample_index(&dist, rng))
}

#[derive(Debug, Clone, Serialize)]
pub struct ShorReport {
    pub n: u64,
    pub x: u64,
    pub q: u64,
    pub true_order: u64,
    /// Exact probability that a computer's result passes verification.
    pub pass_probability: f64,
    /// Readout over the result register s₁, most significant bit first.
    pub readout: EnsembleReadout,
    pub bits: Vec<Bit>,
    pub decoded: Option<u64>,
}

/// Readout of s₁ in a computer that obtained `r_prime`, after the
/// verify-and-randomize wrapper.
fn branch_readout(inst: &ShorInstance, r_prime: u64) -> Result<Vec<f64>> {
    let w = inst.width;
    if r_prime >= 1 << w {
        return Ok(vec![0.0; w]);
    }
    let bits: Vec<bool> = (0..w).map(|i| (r_prime >> (w - 1 - i)) & 1 == 1).collect();
    let compute = Circuit::with_labels(&bits);
    let (x, n) = (inst.x, inst.n);
    let verifier = Verifier::classical(w, 0, move |v, _| is_order(x, n, v))?;
    let s1: Vec<usize> = (0..w).collect();
    let prog = np_function_wrapper(&compute, &s1, &[], &verifier)?;
    Ok(run_exact(&prog.circuit, Backend::Auto)?.means[..w].to_vec())
}

/// Ensemble order finding. Every computer samples c, reduces it to r′ by
/// continued fractions and keeps r′ in s₁ only if it is the order; otherwise
/// s₁ is swapped with random bits. `molecules = None` gives the exact
/// (infinite-ensemble) readout.
pub fn shor_ensemble(
    inst: &ShorInstance,
    molecules: Option<u64>,
    seed: u64,
    mode: ShorMode,
) -> Result<ShorReport> {
    let dist = match mode {
        ShorMode::Distribution => inst.outcome_distribution(),
        ShorMode::FullCircuit => circuit_distribution(inst)?,
    };
    let r_of: Vec<u64> = (0..inst.q)
        .map(|c| continued_fraction(c, inst.q).1)
        .collect();
    let mut cache: FxHashMap<u64, Vec<f64>> = FxHashMap::default();
    for (c, &p) in dist.iter().enumerate() {
        if p > 0.0 && !cache.contains_key(&r_of[c]) {
            cache.insert(r_of[c], branch_readout(inst, r_of[c])?);
        }
    }
    let w = inst.width;
    let readout = match molecules {
        None => {
            let mut means = vec![0.0; w];
            for (c, &p) in dist.iter().enumerate() {
                if p > 0.0 {
                    for (m, e) in means.iter_mut().zip(&cache[&r_of[c]]) {
                        *m += p * e;
                    }
                }
            }
            EnsembleReadout {
                means,
                std_errors: vec![0.0; w],
                molecules: None,
                seed: None,
            }
        }
        Some(m) => {
            let (sum, sq) = aggregate(m, w, |t| {
                let c = sample_index(&dist, &mut trial_rng(seed, t));
                Ok(cache[&r_of[c as usize]].clone())
            })?;
            finish(sum, sq, m, Some(seed))
        }
    };
    let pass_probability = dist
        .iter()
        .zip(&r_of)
        .filter(|&(_, &r)| is_order(inst.x, inst.n, r))
        .map(|(p, _)| p)
        .sum();
    let bits = decode_bits(&readout, &(0..w).collect::<Vec<_>>(), DEFAULT_THRESHOLD)?;
    Ok(ShorReport {
        n: inst.n,
        x: inst.x,
        q: inst.q,
        true_order: inst.r,
        pass_probability,
        decoded: crate::ensemble::bits_to_value(&bits),
        bits,
        readout,
    })
}

/// 4(r − φ(r))/(π² r).
pub fn divisor_failure_probability(r: u64) -> f64 {
    let r = r.max(1);
    4.0 * (r - totient(r)) as f64 / (PI * PI * r as f64)
}

/// Probability that c lies within 1/(2q) of some d/r with gcd(d, r) > 1,
/// so that the reduced fraction has a denominator smaller than r.
pub fn divisor_event_probability(inst: &ShorInstance) -> f64 {
    let (q, r) = (inst.q as i128, inst.r as i128);
    inst.outcome_distribution()
        .iter()
        .enumerate()
        .filter(|&(c, _)| {
            (0..r).any(|d| gcd(d as u64, r as u64) > 1 && 2 * (c as i128 * r - d * q).abs() <= r)
        })
        .map(|(_, p)| p)
        .sum()
}

/// Probability that continued fractions yield a proper divisor of r.
pub fn divisor_outcome_probability(inst: &ShorInstance) -> f64 {
    inst.outcome_distribution()
        .iter()
        .enumerate()
        .filter(|&(c, _)| {
            let rp = continued_fraction(c as u64, inst.q).1;
            rp < inst.r && inst.r.is_multiple_of(rp)
        })
        .map(|(_, p)| p)
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instance_parameters() {
        let s = ShorInstance::new(15, 7).unwrap();
        assert_eq!((s.q, s.order(), s.width), (256, 4, 8));
        assert!(ShorInstance::new(15, 5).is_err());
        let t = ShorInstance::new(21, 2).unwrap();
        assert_eq!((t.q, t.order()), (512, 6));
    }

    #[test]
    fn order_check() {
        assert!(is_order(7, 15, 4));
        assert!(!is_order(7, 15, 2));
        assert!(!is_order(7, 15, 8));
        assert!(is_order(1, 15, 1));
    }

    #[test]
    fn distribution_is_normalized_and_peaked() {
        let s = ShorInstance::new(15, 7).unwrap();
        let d = s.outcome_distribution();
        assert!((d.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        for c in [0, 64, 128, 192] {
            assert!((d[c] - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn fraction_examples() {
        assert_eq!(continued_fraction(0, 256), (0, 1));
        assert_eq!(continued_fraction(64, 256), (1, 4));
        assert_eq!(continued_fraction(192, 256), (3, 4));
    }

    #[test]
    fn totients() {
        assert_eq!(totient(1), 1);
        assert_eq!(totient(12), 4);
        assert!(divisor_failure_probability(1).abs() < 1e-15);
        assert!((divisor_failure_probability(5) - 4.0 / (5.0 * PI * PI)).abs() < 1e-15);
    }
}
