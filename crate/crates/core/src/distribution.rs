//! Finitely supported laws of the count `S` on `{0, ..., n}`.

use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::binomial::{binomial_pmf_table, BinomialSpec};
use crate::error::{Error, Result};
use crate::poly::Polynomial;
use crate::rational::{pow, uint, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MomentDistribution {
    n: u64,
    support: Vec<u64>,
    masses: Vec<Rational>,
}

impl MomentDistribution {
    /// Support must be strictly increasing within `0..=n`; masses positive
    /// and summing to one.
    pub fn new(n: u64, support: Vec<u64>, masses: Vec<Rational>) -> Result<Self> {
        if support.len() != masses.len() {
            return Err(Error::SupportSize {
                expected: support.len(),
                got: masses.len(),
            });
        }
        if support.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::RepeatedSupport);
        }
        if let Some(&x) = support.iter().find(|&&x| x > n) {
            return Err(Error::OutOfRange { x: x as i64, n });
        }
        let total: Rational = masses.iter().sum();
        if masses.iter().any(|m| *m <= Rational::zero()) || !total.is_one() {
            return Err(Error::InvalidMasses);
        }
        Ok(Self { n, support, masses })
    }

    /// Builds from a dense mass vector over `0..=n`, dropping zero entries.
    pub fn from_dense(masses: &[Rational]) -> Result<Self> {
        let n = masses.len() as u64 - 1;
        let (support, masses): (Vec<u64>, Vec<Rational>) = masses
            .iter()
            .enumerate()
            .filter(|(_, m)| !m.is_zero())
            .map(|(i, m)| (i as u64, m.clone()))
            .unzip();
        Self::new(n, support, masses)
    }

    pub fn binomial(spec: &BinomialSpec) -> Self {
        Self::from_dense(&binomial_pmf_table(spec)).expect("binomial pmf is a distribution")
    }

    pub fn point_mass(n: u64, x: u64) -> Result<Self> {
        Self::new(n, alloc::vec![x], alloc::vec![Rational::one()])
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn support(&self) -> &[u64] {
        &self.support
    }

    pub fn masses(&self) -> &[Rational] {
        &self.masses
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, &Rational)> {
        self.support.iter().copied().zip(&self.masses)
    }

    pub fn mass_at(&self, x: u64) -> Rational {
        self.support
            .binary_search(&x)
            .map(|i| self.masses[i].clone())
            .unwrap_or_else(|_| Rational::zero())
    }

    pub fn raw_moment(&self, j: u64) -> Rational {
        self.iter().map(|(x, m)| pow(&uint(x), j) * m).sum()
    }

    pub fn expectation(&self, poly: &Polynomial) -> Rational {
        self.iter().map(|(x, m)| poly.eval(&uint(x)) * m).sum()
    }

    /// Replaces the mass vector, keeping support and validation.
    pub fn with_masses(&self, masses: Vec<Rational>) -> Result<Self> {
        Self::new(self.n, self.support.clone(), masses)
    }
}
