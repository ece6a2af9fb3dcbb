//! The reference measure Bin(n, p) and exact expectations under it.

use alloc::string::ToString;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::poly::Polynomial;
use crate::rational::{pow, uint, Rational};

/// `C(n, j)`, zero when `j > n`.
pub fn binomial_coefficient(n: u64, j: u64) -> Rational {
    Rational::from_integer(binomial_int(n, j))
}

pub(crate) fn binomial_int(n: u64, j: u64) -> BigInt {
    if j > n {
        return BigInt::zero();
    }
    let j = j.min(n - j);
    let mut acc = BigInt::one();
    for i in 0..j {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// Parameters of Bin(n, p) with `n >= 1` and `0 < p < 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BinomialSpec {
    n: u64,
    p: Rational,
}

impl BinomialSpec {
    pub fn new(n: u64, p: Rational) -> Result<Self> {
        if n == 0 {
            return Err(Error::NoTrials);
        }
        if p <= Rational::zero() || p >= Rational::one() {
            return Err(Error::ProbabilityOutOfRange(p.to_string()));
        }
        Ok(Self { n, p })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn p(&self) -> &Rational {
        &self.p
    }

    pub fn q(&self) -> Rational {
        Rational::one() - &self.p
    }

    /// `N = n p (1 - p) - 1`, the scale parameter of the main estimates.
    pub fn scale_n(&self) -> Rational {
        uint(self.n) * &self.p * self.q() - Rational::one()
    }

    /// Same `n`, different success probability.
    pub fn with_p(&self, p: Rational) -> Result<Self> {
        Self::new(self.n, p)
    }

    /// Same `p`, different number of trials.
    pub fn with_n(&self, n: u64) -> Result<Self> {
        Self::new(n, self.p.clone())
    }

    /// Bin(n, 1 - p).
    pub fn complement(&self) -> Self {
        Self {
            n: self.n,
            p: self.q(),
        }
    }

    pub fn mean(&self) -> Rational {
        uint(self.n) * &self.p
    }
}

/// `Pr[X = x]` for `X ~ Bin(n, p)`.
pub fn binomial_pmf(spec: &BinomialSpec, x: i64) -> Result<Rational> {
    let n = spec.n();
    if x < 0 || x as u64 > n {
        return Err(Error::OutOfRange { x, n });
    }
    Ok(pmf_unchecked(spec, x as u64))
}

pub(crate) fn pmf_unchecked(spec: &BinomialSpec, x: u64) -> Rational {
    binomial_coefficient(spec.n(), x) * pow(spec.p(), x) * pow(&spec.q(), spec.n() - x)
}

/// The whole pmf vector `Pr[0..=n]`.
pub fn binomial_pmf_table(spec: &BinomialSpec) -> Vec<Rational> {
    (0..=spec.n()).map(|x| pmf_unchecked(spec, x)).collect()
}

/// `Pr[X <= x]`; zero below the support and one at or above `n`.
pub fn binomial_cdf(spec: &BinomialSpec, x: i64) -> Rational {
    if x < 0 {
        return Rational::zero();
    }
    if x as u64 >= spec.n() {
        return Rational::one();
    }
    (0..=x as u64).map(|i| pmf_unchecked(spec, i)).sum()
}

/// `E[X (X-1) ... (X-j+1)] = (n)_j p^j`.
pub fn factorial_moment(spec: &BinomialSpec, j: u64) -> Rational {
    if j > spec.n() {
        return Rational::zero();
    }
    let falling: BigInt = (0..j).map(|i| BigInt::from(spec.n() - i)).product();
    Rational::from_integer(falling) * pow(spec.p(), j)
}

/// Factorial moments `0..=max_j`, for repeated expectations under one spec.
#[derive(Clone, Debug)]
pub struct FactorialMoments {
    moments: Vec<Rational>,
}

impl FactorialMoments {
    pub fn new(spec: &BinomialSpec, max_j: usize) -> Self {
        let mut moments = Vec::with_capacity(max_j + 1);
        let mut acc = Rational::one();
        for j in 0..=max_j as u64 {
            moments.push(acc.clone());
            if j >= spec.n() {
                acc = Rational::zero();
            } else {
                acc = acc * uint(spec.n() - j) * spec.p();
            }
        }
        Self { moments }
    }

    pub fn get(&self, j: usize) -> &Rational {
        &self.moments[j]
    }

    pub fn max_order(&self) -> usize {
        self.moments.len() - 1
    }

    /// `E[P(X)]`; panics if `P` has degree above [`Self::max_order`].
    pub fn expectation(&self, poly: &Polynomial) -> Rational {
        let coeffs = poly.falling_factorial_coeffs();
        assert!(
            coeffs.len() <= self.moments.len(),
            "polynomial degree exceeds cached factorial moments"
        );
        coeffs
            .iter()
            .zip(&self.moments)
            .filter(|(c, _)| !c.is_zero())
            .map(|(c, m)| c * m)
            .sum()
    }
}

/// `E[P(X)]` for `X ~ Bin(n, p)` through the falling-factorial basis.
pub fn expectation(spec: &BinomialSpec, poly: &Polynomial) -> Rational {
    let degree = poly.degree().unwrap_or(0);
    FactorialMoments::new(spec, degree).expectation(poly)
}

/// `sum_x Pr[x] P(x)`, the direct-summation route.
pub fn expectation_by_summation(spec: &BinomialSpec, poly: &Polynomial) -> Rational {
    (0..=spec.n())
        .map(|x| pmf_unchecked(spec, x) * poly.eval(&uint(x)))
        .sum()
}

/// Raw moments `E[X^j]` for `j = 0..=k`.
pub fn raw_moments(spec: &BinomialSpec, k: usize) -> Vec<Rational> {
    let fm = FactorialMoments::new(spec, k);
    (0..=k)
        .map(|j| fm.expectation(&Polynomial::monomial(Rational::one(), j)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};
    use proptest::prelude::*;

    fn spec(n: u64, p: Rational) -> BinomialSpec {
        BinomialSpec::new(n, p).unwrap()
    }

    /// n! / (j! (n-j)!) straight from factorials.
    fn factorial_oracle(n: u64, j: u64) -> BigInt {
        let fact = |m: u64| (1..=m).map(BigInt::from).product::<BigInt>();
        fact(n) / (fact(j) * fact(n - j))
    }

    #[test]
    fn coefficients() {
        assert_eq!(binomial_coefficient(0, 0), int(1));
        assert_eq!(binomial_coefficient(4, 2), int(6));
        assert_eq!(binomial_coefficient(19, 4), int(3876));
        assert_eq!(factorial_oracle(19, 4), BigInt::from(3876));
        assert_eq!(binomial_coefficient(3, 5), int(0));
        for n in 0..30 {
            for j in 0..=n {
                assert_eq!(binomial_int(n, j), factorial_oracle(n, j));
            }
        }
    }

    #[test]
    fn spec_validation() {
        assert_eq!(BinomialSpec::new(0, rat(1, 2)), Err(Error::NoTrials));
        assert!(BinomialSpec::new(3, int(0)).is_err());
        assert!(BinomialSpec::new(3, int(1)).is_err());
        assert!(BinomialSpec::new(3, rat(3, 2)).is_err());
        assert_eq!(spec(10, rat(1, 2)).scale_n(), rat(3, 2));
    }

    #[test]
    fn pmf_values() {
        assert_eq!(binomial_pmf(&spec(2, rat(1, 2)), 1).unwrap(), rat(1, 2));
        assert_eq!(binomial_pmf(&spec(3, rat(1, 2)), 0).unwrap(), rat(1, 8));
        // C(10,5)/2^10 = 252/1024
        assert_eq!(binomial_pmf(&spec(10, rat(1, 2)), 5).unwrap(), rat(63, 256));
        assert!(binomial_pmf(&spec(3, rat(1, 2)), 4).is_err());
        assert!(binomial_pmf(&spec(3, rat(1, 2)), -1).is_err());
    }

    #[test]
    fn cdf_values() {
        assert_eq!(binomial_cdf(&spec(2, rat(1, 2)), 1), rat(3, 4));
        assert_eq!(binomial_cdf(&spec(4, rat(1, 2)), 1), rat(5, 16));
        assert_eq!(binomial_cdf(&spec(5, rat(1, 3)), 5), int(1));
        assert_eq!(binomial_cdf(&spec(5, rat(1, 3)), -1), int(0));
    }

    #[test]
    fn factorial_moment_values() {
        let s = spec(7, rat(2, 7));
        assert_eq!(factorial_moment(&s, 1), s.mean());
        assert_eq!(factorial_moment(&spec(4, rat(1, 2)), 2), int(3));
        assert_eq!(factorial_moment(&spec(3, rat(1, 3)), 5), int(0));
    }

    #[test]
    fn expectation_values() {
        let s = spec(3, rat(1, 2));
        assert_eq!(expectation(&s, &Polynomial::from_integer_roots(&[0, 1])), rat(3, 2));
        assert_eq!(expectation(&spec(9, rat(2, 9)), &Polynomial::one()), int(1));
        let p = Polynomial::from_integer_roots(&[1, 2]);
        assert_eq!(expectation(&s, &p), rat(1, 2));
        assert_eq!(expectation_by_summation(&s, &p), rat(1, 2));
        assert_eq!(expectation(&s, &Polynomial::zero()), int(0));
    }

    #[test]
    fn raw_moment_values() {
        assert_eq!(raw_moments(&spec(3, rat(1, 2)), 2), [int(1), rat(3, 2), int(3)]);
    }

    fn arb_spec() -> impl Strategy<Value = BinomialSpec> {
        (1u64..=25, 1i64..20, 0i64..20).prop_filter_map("p in (0,1)", |(n, a, b)| {
            BinomialSpec::new(n, rat(a, a + b + 1)).ok()
        })
    }

    proptest! {
        #[test]
        fn expectation_routes_agree(s in arb_spec(), c in proptest::collection::vec(-9i64..10, 0..=13)) {
            let p = Polynomial::from_ints(&c);
            prop_assert_eq!(expectation(&s, &p), expectation_by_summation(&s, &p));
        }

        #[test]
        fn pmf_sums_to_one(s in arb_spec()) {
            let total: Rational = binomial_pmf_table(&s).into_iter().sum();
            prop_assert_eq!(total, int(1));
        }

        #[test]
        fn factorial_moment_is_expectation(s in arb_spec(), j in 0u64..30) {
            let p = Polynomial::falling_factorial(j as usize);
            prop_assert_eq!(factorial_moment(&s, j), expectation_by_summation(&s, &p));
        }
    }
}
