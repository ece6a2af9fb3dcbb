//! Discrete Chebyshev polynomials for the counting measure on `{0, ..., M-1}`.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::binomial::binomial_coefficient;
use crate::error::{Error, Result};
use crate::poly::Polynomial;
use crate::rational::{pow, uint, Rational};
use crate::real::Real;

/// Relative slack granted to transcendental right-hand sides.
pub fn guard_band() -> Rational {
    Rational::new(BigInt::one(), BigInt::from(10u64).pow(12))
}

fn check_degree(m: u64, d: u64) -> Result<()> {
    if d >= m {
        return Err(Error::DegreeTooLarge { d, m, limit: m.saturating_sub(1) });
    }
    Ok(())
}

fn factorial(d: u64) -> Rational {
    (1..=d).map(uint).product()
}

/// `t_d(x) = d! * Delta^d [C(x,d) C(x-M,d)]`, with exact coefficients.
pub fn chebyshev_poly(m: u64, d: u64) -> Result<Polynomial> {
    check_degree(m, d)?;
    let d_us = d as usize;
    let product = Polynomial::choose(&Rational::zero(), d_us) * Polynomial::choose(&-uint(m), d_us);
    Ok(product.finite_difference(d_us).scale(&factorial(d)))
}

/// `t_0, ..., t_dmax` for a fixed `M`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChebyshevFamily {
    m: u64,
    polys: Vec<Polynomial>,
}

impl ChebyshevFamily {
    pub fn new(m: u64, dmax: u64) -> Result<Self> {
        check_degree(m, dmax)?;
        let polys = (0..=dmax).map(|d| chebyshev_poly(m, d)).collect::<Result<_>>()?;
        Ok(Self { m, polys })
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn polys(&self) -> &[Polynomial] {
        &self.polys
    }

    pub fn get(&self, d: usize) -> Option<&Polynomial> {
        self.polys.get(d)
    }

    /// `t_d(i)` for `i = 0..M`.
    pub fn values(&self, d: usize) -> Vec<Rational> {
        (0..self.m).map(|i| self.polys[d].eval(&uint(i))).collect()
    }

    /// Degrees `d` whose leading coefficient is not `C(2d, d)`.
    pub fn bad_leading_coefficients(&self) -> Vec<usize> {
        (0..self.polys.len())
            .filter(|&d| {
                self.polys[d].degree() != Some(d)
                    || self.polys[d].leading() != Some(&binomial_coefficient(2 * d as u64, d as u64))
            })
            .collect()
    }
}

fn inner(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrthogonalityReport {
    pub m: u64,
    pub dmax: u64,
    pub pairs_checked: usize,
    /// `(d, d', sum)` for every pair with a nonzero inner product.
    pub failures: Vec<(u64, u64, Rational)>,
}

impl OrthogonalityReport {
    pub fn pass(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Exact inner products `sum_i t_d(i) t_d'(i)` for all `d < d' <= dmax`.
pub fn verify_orthogonality(m: u64, dmax: u64) -> Result<OrthogonalityReport> {
    let family = ChebyshevFamily::new(m, dmax)?;
    Ok(orthogonality_of(&family))
}

pub fn orthogonality_of(family: &ChebyshevFamily) -> OrthogonalityReport {
    let values: Vec<Vec<Rational>> = (0..family.polys.len()).map(|d| family.values(d)).collect();
    let mut failures = Vec::new();
    let mut pairs_checked = 0;
    for d in 0..values.len() {
        for e in d + 1..values.len() {
            pairs_checked += 1;
            let s = inner(&values[d], &values[e]);
            if !s.is_zero() {
                failures.push((d as u64, e as u64, s));
            }
        }
    }
    OrthogonalityReport {
        m: family.m,
        dmax: values.len() as u64 - 1,
        pairs_checked,
        failures,
    }
}

/// `M(M^2 - 1)(M^2 - 4)...(M^2 - d^2) / (2d + 1)`.
pub fn norm_squared_closed_form(m: u64, d: u64) -> Rational {
    let m2 = uint(m) * uint(m);
    let prod: Rational = (1..=d).map(|i| &m2 - uint(i * i)).product();
    uint(m) * prod / uint(2 * d + 1)
}

/// `sum_i t_d(i)^2`, returned only after the closed form and the direct sum agree.
pub fn norm_squared(m: u64, d: u64) -> Result<Rational> {
    let t = chebyshev_poly(m, d)?;
    let direct: Rational = (0..m).map(|i| pow(&t.eval(&uint(i)), 2)).sum();
    let closed = norm_squared_closed_form(m, d);
    if direct != closed {
        return Err(Error::Disagreement(alloc::format!(
            "norm of t_{d} on {m} points: sum {direct}, formula {closed}"
        )));
    }
    Ok(closed)
}

/// `M^d / 4^(d + 1/2) * exp(-d^3 / M^2)`, valid for `d <= M/2`.
pub fn min_sup_bound(m: u64, d: u64, prec: u32) -> Result<Real> {
    if 2 * d > m {
        return Err(Error::DegreeTooLarge { d, m, limit: m / 2 });
    }
    let scale = pow(&uint(m), d) / (pow(&uint(4), d) * uint(2));
    let exponent = Real::from_rational(&-(Rational::new((d * d * d).into(), (m * m).into())), prec);
    Ok(Real::from_rational(&scale, prec).mul(&exponent.exp()))
}

/// Lower bound on `sum_i G(i)^2` over monic `G` of degree `d`: `C(2d,d)^-2 ||t_d||^2`.
pub fn monic_square_sum_bound(m: u64, d: u64) -> Result<Rational> {
    let c = binomial_coefficient(2 * d, d);
    Ok(norm_squared(m, d)? / (&c * &c))
}

/// `(M/4)^(2d+1) exp(-2 d^3 / M^2)`, the simplified form of [`monic_square_sum_bound`].
pub fn simplified_square_sum_bound(m: u64, d: u64, prec: u32) -> Real {
    let base = pow(&Rational::new(m.into(), 4u32.into()), 2 * d + 1);
    let exponent = Real::from_rational(&-(Rational::new((2 * d * d * d).into(), (m * m).into())), prec);
    Real::from_rational(&base, prec).mul(&exponent.exp())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainCheck {
    pub m: u64,
    pub d: u64,
    pub exact: Rational,
    pub simplified: Real,
    pub pass: bool,
}

/// Checks that the exact square-sum bound dominates its simplified form, `1 <= d <= M/2`.
pub fn chain_check(m: u64, d: u64, prec: u32) -> Result<ChainCheck> {
    if d == 0 || 2 * d > m {
        return Err(Error::DegreeTooLarge { d, m, limit: m / 2 });
    }
    let exact = monic_square_sum_bound(m, d)?;
    let simplified = simplified_square_sum_bound(m, d, prec);
    let pass = simplified.cmp_rational(&exact).is_le();
    Ok(ChainCheck { m, d, exact, simplified, pass })
}

/// Result of testing one monic polynomial against [`min_sup_bound`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupCheck {
    pub max_abs: Rational,
    pub square_sum: Rational,
    pub pass: bool,
}

/// Precomputed threshold for all monic polynomials of one `(M, d)`.
#[derive(Clone, Debug)]
pub struct SupChecker {
    m: u64,
    d: u64,
    bound: Real,
    threshold: Real,
    square_sum_bound: Rational,
}

impl SupChecker {
    pub fn new(m: u64, d: u64, prec: u32) -> Result<Self> {
        let bound = min_sup_bound(m, d, prec)?;
        let threshold = bound.mul_rational(&(Rational::one() - guard_band()));
        let square_sum_bound = if d < m { monic_square_sum_bound(m, d)? } else { Rational::zero() };
        Ok(Self {
            m,
            d,
            bound,
            threshold,
            square_sum_bound,
        })
    }

    pub fn bound(&self) -> &Real {
        &self.bound
    }

    /// Checks a monic `G` of degree `d`. Also confirms the exact square-sum bound.
    pub fn check(&self, g: &Polynomial) -> Result<SupCheck> {
        if g.degree().unwrap_or(0) as u64 != self.d || !g.leading().is_some_and(One::is_one) {
            return Err(Error::InvalidParameter(alloc::format!(
                "expected a monic polynomial of degree {}",
                self.d
            )));
        }
        let values: Vec<Rational> = (0..self.m).map(|i| g.eval(&uint(i))).collect();
        Ok(self.judge(values))
    }

    /// Fast path for `G(x) = prod (x - r)` with integer roots.
    pub fn check_roots(&self, roots: &[i64]) -> Result<SupCheck> {
        if roots.len() as u64 != self.d {
            return Err(Error::InvalidParameter(alloc::format!("expected {} roots", self.d)));
        }
        let values: Vec<Rational> = (0..self.m as i64)
            .map(|i| {
                let v: BigInt = roots.iter().map(|&r| BigInt::from(i - r)).product();
                Rational::from_integer(v)
            })
            .collect();
        Ok(self.judge(values))
    }

    fn judge(&self, values: Vec<Rational>) -> SupCheck {
        let max_abs = values.iter().map(Signed::abs).max().unwrap_or_else(Rational::zero);
        let square_sum: Rational = values.iter().map(|v| v * v).sum();
        let pass = self.threshold.cmp_rational(&max_abs).is_le() && square_sum >= self.square_sum_bound;
        SupCheck {
            max_abs,
            square_sum,
            pass,
        }
    }
}

/// Monic `prod (x - r)` for integer roots.
pub fn monic_from_roots(roots: &[i64]) -> Polynomial {
    Polynomial::from_integer_roots(roots)
}
