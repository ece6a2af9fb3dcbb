//! Exchangeable bit vectors whose number of ones has a given law.
//!
//! A bitstring of weight `w` gets probability `P(S = w) / C(n, w)`. Nothing of
//! size `2^n` is ever built; every query reduces to a sum over weights.

use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::binomial::{binomial_coefficient, BinomialSpec};
use crate::distribution::MomentDistribution;
use crate::error::{Error, Result};
use crate::rational::{floor, pow, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SymmetricJoint {
    count_dist: MomentDistribution,
}

pub fn lift_to_joint(dist: MomentDistribution) -> SymmetricJoint {
    SymmetricJoint { count_dist: dist }
}

impl SymmetricJoint {
    pub fn n(&self) -> u64 {
        self.count_dist.n()
    }

    pub fn count_dist(&self) -> &MomentDistribution {
        &self.count_dist
    }

    /// Probability of one particular bitstring of weight `w`.
    pub fn string_probability(&self, w: u64) -> Rational {
        self.count_dist.mass_at(w) / binomial_coefficient(self.n(), w)
    }

    pub fn and_probability(&self) -> Rational {
        self.count_dist.mass_at(self.n())
    }
}

/// Probability that a fixed set of `t` bits are all one:
/// `sum_w P(S = w) C(n - t, w - t) / C(n, w)`.
pub fn subset_all_ones_prob(joint: &SymmetricJoint, t: u64) -> Result<Rational> {
    let n = joint.n();
    if t > n {
        return Err(Error::OutOfRange { x: t as i64, n });
    }
    Ok(joint
        .count_dist
        .iter()
        .filter(|&(w, _)| w >= t)
        .map(|(w, m)| m * binomial_coefficient(n - t, w - t) / binomial_coefficient(n, w))
        .sum())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KwiseReport {
    /// `(t, P(t fixed bits all one), equals p^t)` for `t = 1..=k`.
    pub subsets: Vec<(u64, Rational, bool)>,
    /// `(i, E S^i equals E X^i)` for `i = 1..=k`.
    pub moments: Vec<(u64, bool)>,
}

impl KwiseReport {
    pub fn pass(&self) -> bool {
        self.subsets.iter().all(|s| s.2) && self.moments.iter().all(|m| m.1)
    }

    /// Smallest `t` at which independence breaks.
    pub fn first_failure(&self) -> Option<u64> {
        self.subsets.iter().find(|s| !s.2).map(|s| s.0)
    }
}

/// Checks that every set of at most `k` bits is independent with marginal `p`.
pub fn verify_kwise(joint: &SymmetricJoint, k: u64, p: &Rational) -> Result<KwiseReport> {
    let n = joint.n();
    if k > n {
        return Err(Error::KExceedsN { k, n });
    }
    let spec = BinomialSpec::new(n, p.clone())?;
    let subsets = (1..=k)
        .map(|t| {
            let prob = subset_all_ones_prob(joint, t)?;
            let ok = prob == pow(p, t);
            Ok((t, prob, ok))
        })
        .collect::<Result<_>>()?;
    let target = crate::binomial::raw_moments(&spec, k as usize);
    let moments = (1..=k)
        .map(|i| (i, joint.count_dist.raw_moment(i) == target[i as usize]))
        .collect();
    Ok(KwiseReport { subsets, moments })
}

/// Whether the count law is exactly `Bin(n, p)`.
pub fn is_binomial(joint: &SymmetricJoint, p: &Rational) -> bool {
    BinomialSpec::new(joint.n(), p.clone())
        .map(|spec| MomentDistribution::binomial(&spec) == joint.count_dist)
        .unwrap_or(false)
}

/// Deterministic bitstring sampler.
///
/// The weight is drawn by comparing a uniform `u64` with the cumulative
/// masses scaled by `2^64` and floored (bias at most `2^-64` per weight);
/// positions of the ones come from a partial Fisher-Yates shuffle.
#[derive(Clone, Debug)]
pub struct Sampler {
    n: u64,
    weights: Vec<u64>,
    thresholds: Vec<u128>,
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(joint: &SymmetricJoint, seed: u64) -> Self {
        let scale = Rational::from_integer(BigInt::from(BigUint::one() << 64u32));
        let mut cum = Rational::zero();
        let mut weights = Vec::new();
        let mut thresholds = Vec::new();
        for (w, m) in joint.count_dist.iter() {
            cum += m;
            weights.push(w);
            thresholds.push(floor(&(&cum * &scale)).to_u128().expect("threshold fits in u128"));
        }
        Self {
            n: joint.n(),
            weights,
            thresholds,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    fn draw_weight(&mut self) -> u64 {
        let u = self.rng.gen::<u64>() as u128;
        let i = self.thresholds.partition_point(|&t| t <= u);
        self.weights[i.min(self.weights.len() - 1)]
    }

    /// One bitstring as `b'0'`/`b'1'` bytes.
    pub fn next_bits(&mut self) -> Vec<u8> {
        let w = self.draw_weight();
        let mut positions: Vec<u64> = (0..self.n).collect();
        for i in 0..w {
            let j = self.rng.gen_range(i..self.n);
            positions.swap(i as usize, j as usize);
        }
        let mut bits = alloc::vec![b'0'; self.n as usize];
        for &pos in &positions[..w as usize] {
            bits[pos as usize] = b'1';
        }
        bits
    }
}

/// `count` samples from `joint` with the given seed.
pub fn sample(joint: &SymmetricJoint, seed: u64, count: usize) -> Vec<Vec<u8>> {
    let mut s = Sampler::new(joint, seed);
    (0..count).map(|_| s.next_bits()).collect()
}
