//! Dense univariate polynomials with exact rational coefficients.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::rational::{int, uint, Rational};

/// Coefficients in ascending degree order. The vector is empty for the zero
/// polynomial and otherwise ends in a nonzero coefficient.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Polynomial {
    coeffs: Vec<Rational>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// The indeterminate `x`.
    pub fn x() -> Self {
        Self::from_coeffs(vec![Rational::zero(), Rational::one()])
    }

    /// `x - root`.
    pub fn linear(root: &Rational) -> Self {
        Self::from_coeffs(vec![-root.clone(), Rational::one()])
    }

    /// `c * x^degree`.
    pub fn monomial(c: Rational, degree: usize) -> Self {
        let mut coeffs = vec![Rational::zero(); degree + 1];
        coeffs[degree] = c;
        Self::from_coeffs(coeffs)
    }

    pub fn from_coeffs(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&c| int(c)).collect())
    }

    /// Monic polynomial with the given roots (with multiplicity).
    pub fn from_roots<'a, I>(roots: I) -> Self
    where
        I: IntoIterator<Item = &'a Rational>,
    {
        roots
            .into_iter()
            .fold(Self::one(), |acc, r| &acc * &Self::linear(r))
    }

    pub fn from_integer_roots(roots: &[i64]) -> Self {
        let roots: Vec<Rational> = roots.iter().map(|&r| int(r)).collect();
        Self::from_roots(&roots)
    }

    /// Falling factorial `x (x-1) ... (x-j+1)`.
    pub fn falling_factorial(j: usize) -> Self {
        let roots: Vec<Rational> = (0..j as u64).map(uint).collect();
        Self::from_roots(&roots)
    }

    /// Generalized binomial `C(x + shift, d) = (x+shift)(x+shift-1)...(x+shift-d+1) / d!`.
    pub fn choose(shift: &Rational, d: usize) -> Self {
        let roots: Vec<Rational> = (0..d as u64).map(|i| uint(i) - shift).collect();
        let factorial: BigInt = (1..=d as u64).map(BigInt::from).product();
        Self::from_roots(&roots).scale(&Rational::new(BigInt::one(), factorial))
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Rational> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Coefficient of `x^i` (zero beyond the degree).
    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    /// Horner evaluation.
    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_int(&self, x: i64) -> Rational {
        self.eval(&int(x))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// `P(x + c)` by repeated synthetic division (Taylor shift).
    pub fn shift(&self, c: &Rational) -> Self {
        let mut a = self.coeffs.clone();
        let n = a.len();
        for i in 0..n {
            for j in (i..n.saturating_sub(1)).rev() {
                let t = &a[j + 1] * c;
                a[j] += t;
            }
        }
        Self::from_coeffs(a)
    }

    /// Forward difference `P(x+1) - P(x)` applied `order` times.
    pub fn finite_difference(&self, order: usize) -> Self {
        let mut p = self.clone();
        for _ in 0..order {
            if p.is_zero() {
                break;
            }
            p = &p.shift(&Rational::one()) - &p;
        }
        p
    }

    /// Divides by `x - root`, returning quotient and remainder `P(root)`.
    pub fn div_linear(&self, root: &Rational) -> (Self, Rational) {
        if self.coeffs.is_empty() {
            return (Self::zero(), Rational::zero());
        }
        let mut quotient = vec![Rational::zero(); self.coeffs.len() - 1];
        let mut carry = Rational::zero();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            let value = c + &carry * root;
            if i == 0 {
                return (Self::from_coeffs(quotient), value);
            }
            quotient[i - 1] = value.clone();
            carry = value;
        }
        unreachable!()
    }

    /// Coefficients `c_j` with `P(x) = sum_j c_j (x)_j` in the falling-factorial basis.
    ///
    /// Peels off one factor at a time: `P = c_0 + x Q_1`, `Q_1 = c_1 + (x-1) Q_2`, ...
    pub fn falling_factorial_coeffs(&self) -> Vec<Rational> {
        let mut out = Vec::with_capacity(self.coeffs.len());
        let mut rest = self.clone();
        let mut j = 0u64;
        while !rest.is_zero() {
            let (q, r) = rest.div_linear(&uint(j));
            out.push(r);
            rest = q;
            j += 1;
        }
        out
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})x")?,
                _ => write!(f, "({c})x^{i}")?,
            }
        }
        Ok(())
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::from_coeffs((0..len).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::from_coeffs((0..len).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::from_coeffs(out)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial::from_coeffs(self.coeffs.iter().map(|c| -c).collect())
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for Polynomial {
            type Output = Polynomial;
            fn $m(self, rhs: Polynomial) -> Polynomial { (&self).$m(&rhs) }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul);

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use proptest::prelude::*;

    #[test]
    fn evaluation() {
        assert_eq!(Polynomial::from_ints(&[-1, 0, 1]).eval_int(3), int(8));
        assert_eq!(Polynomial::zero().eval(&rat(7, 3)), int(0));
        let p = Polynomial::from_integer_roots(&[1, 2]);
        assert_eq!(p, Polynomial::from_ints(&[2, -3, 1]));
        assert_eq!(p.eval_int(4), int(6));
    }

    #[test]
    fn differences() {
        let x2 = Polynomial::from_ints(&[0, 0, 1]);
        assert_eq!(x2.finite_difference(1), Polynomial::from_ints(&[1, 2]));
        assert_eq!(x2.finite_difference(0), x2);
        let x3 = Polynomial::from_ints(&[0, 0, 0, 1]);
        assert_eq!(x3.finite_difference(2), Polynomial::from_ints(&[6, 6]));
        assert!(x3.finite_difference(4).is_zero());
        assert_eq!(x3.finite_difference(3), Polynomial::from_ints(&[6]));
    }

    #[test]
    fn zero_polynomial_shape() {
        assert_eq!(Polynomial::from_ints(&[0, 0]).degree(), None);
        assert_eq!(Polynomial::from_ints(&[1, 0, 2, 0]).degree(), Some(2));
    }

    #[test]
    fn generalized_choose() {
        // C(x - 4, 2) at x = 1 is (-3)(-4)/2 = 6
        let c = Polynomial::choose(&int(-4), 2);
        assert_eq!(c.eval_int(1), int(6));
        assert_eq!(Polynomial::choose(&int(0), 3).eval_int(5), int(10));
        assert_eq!(Polynomial::choose(&int(0), 0), Polynomial::one());
    }

    #[test]
    fn falling_basis_reconstructs() {
        let p = Polynomial::from_ints(&[3, -1, 4, 1, -5]);
        let c = p.falling_factorial_coeffs();
        let rebuilt = c
            .iter()
            .enumerate()
            .fold(Polynomial::zero(), |acc, (j, cj)| {
                &acc + &Polynomial::falling_factorial(j).scale(cj)
            });
        assert_eq!(rebuilt, p);
    }

    fn small_poly() -> impl Strategy<Value = Polynomial> {
        proptest::collection::vec(-20i64..20, 0..8).prop_map(|c| Polynomial::from_ints(&c))
    }

    proptest! {
        #[test]
        fn difference_is_linear(p in small_poly(), q in small_poly(), a in -5i64..5, b in 1i64..5, order in 0usize..4) {
            let (a, b) = (rat(a, b), rat(b, 3));
            let lhs = (&p.scale(&a) + &q.scale(&b)).finite_difference(order);
            let rhs = &p.finite_difference(order).scale(&a) + &q.finite_difference(order).scale(&b);
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn difference_lowers_degree(p in small_poly(), order in 0usize..4) {
            let d = p.finite_difference(order);
            match p.degree() {
                Some(deg) if deg >= order => prop_assert_eq!(d.degree(), Some(deg - order)),
                _ => prop_assert!(d.is_zero()),
            }
        }

        #[test]
        fn shift_matches_evaluation(p in small_poly(), c in -6i64..6, x in -6i64..6) {
            prop_assert_eq!(p.shift(&int(c)).eval_int(x), p.eval_int(x + c));
        }
    }
}
