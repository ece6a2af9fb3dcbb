//! The relaxed bound `M~(n,k,p) = p^n / P(Bin(n,1-p) <= k/2)` and how it
//! compares with the exact maximum.

use core::cmp::Ordering;

use num_traits::{One, Zero};

use crate::binomial::{binomial_cdf, BinomialSpec};
use crate::error::{Error, Result};
use crate::extremal::{compute_max, ExtremalCertificate, Method};
use crate::rational::{pow, uint, Rational};
use crate::real::Real;

/// Default slack, in natural-log units, for [`TildeEstimate::passes`].
pub const DEFAULT_ESTIMATE_SLACK: i64 = 5;

fn check_even(k: u64) -> Result<()> {
    if k % 2 == 1 {
        return Err(Error::OddK(k));
    }
    if k < 2 {
        return Err(Error::KTooSmall { k, min: 2 });
    }
    Ok(())
}

/// Exact `M~(n,k,p)` for even `k >= 2`.
pub fn tilde_m(spec: &BinomialSpec, k: u64) -> Result<Rational> {
    check_even(k)?;
    let tail = binomial_cdf(&spec.complement(), (k / 2) as i64);
    Ok(pow(spec.p(), spec.n()) / tail)
}

/// `V(a) = exp(sqrt(ln a * ln ln a))`, defined for `a > e`.
pub fn v_function(a: &Real) -> Option<Real> {
    let prec = a.precision();
    if a.cmp(&Real::from_int(1, prec).exp()) != Ordering::Greater {
        return None;
    }
    let ln_a = a.ln();
    Some(ln_a.mul(&ln_a.ln()).sqrt().exp())
}

/// How `k` sits relative to the scale `N = np(1-p) - 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Regime {
    /// `N <= 1`: no asymptotic statement applies.
    NotApplicable,
    /// `k <= (ln N)^2`.
    PolyLog,
    /// `k <= sqrt(N)`.
    Power,
    /// `k <= N`.
    Linear,
    /// `k > N`.
    Beyond,
}

impl Regime {
    pub fn classify(spec: &BinomialSpec, k: u64, prec: u32) -> Self {
        let big_n = spec.scale_n();
        if big_n <= Rational::one() {
            return Regime::NotApplicable;
        }
        let kk = uint(k);
        let ln_n = Real::from_rational(&big_n, prec).ln();
        if Real::from_rational(&kk, prec) <= ln_n.mul(&ln_n) {
            Regime::PolyLog
        } else if &kk * &kk <= big_n {
            Regime::Power
        } else if kk <= big_n {
            Regime::Linear
        } else {
            Regime::Beyond
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Regime::NotApplicable => "not-applicable",
            Regime::PolyLog => "polylog",
            Regime::Power => "power",
            Regime::Linear => "linear",
            Regime::Beyond => "beyond",
        }
    }
}

/// Log-scale comparison of `M~` with `sqrt(k) (pk / (2e(1-p)n))^(k/2)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TildeEstimate {
    /// `ln M~ - [(k/2) ln(pk / (2e(1-p)n)) + (1/2) ln k]`.
    pub l: Real,
    /// `l - k^2 / (2n)`.
    pub upper_gap: Real,
    /// Whether `k <= n(1-p)`; outside it nothing is asserted.
    pub in_regime: bool,
}

impl TildeEstimate {
    /// `-slack <= l <= k^2/(2n) + slack`, or true when out of regime.
    pub fn passes(&self, slack: &Rational) -> bool {
        if !self.in_regime {
            return true;
        }
        let prec = self.l.precision();
        let a = Real::from_rational(slack, prec);
        self.l >= a.neg() && self.upper_gap <= a
    }
}

pub fn check_tilde_estimates(spec: &BinomialSpec, k: u64, prec: u32) -> Result<TildeEstimate> {
    let tilde = tilde_m(spec, k)?;
    let n = spec.n();
    let kk = uint(k);
    let real = |r: &Rational| Real::from_rational(r, prec);
    let e = Real::from_int(1, prec).exp();
    // pk / (2e(1-p)n)
    let base = real(&(spec.p() * &kk / (uint(2) * spec.q() * uint(n)))).div(&e);
    let main = base.ln().mul_rational(&Rational::new(k.into(), 2u32.into()));
    let half_ln_k = real(&kk).ln().mul_rational(&Rational::new(1.into(), 2.into()));
    let l = real(&tilde).ln().sub(&main.add(&half_ln_k));
    let upper_gap = l.sub(&real(&(&kk * &kk / uint(2 * n))));
    Ok(TildeEstimate {
        l,
        upper_gap,
        in_regime: kk <= uint(n) * spec.q(),
    })
}

/// Exact `M`, `M~` and their ratio, with the measured size of the ratio
/// against `k exp(k / V(N/k))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SandwichReport {
    pub spec: BinomialSpec,
    pub k: u64,
    pub m: Rational,
    pub m_tilde: Rational,
    /// `M~ / M`.
    pub ratio: Rational,
    pub degenerate: bool,
    /// `V(N/k)`, when `N/k > e`.
    pub v_value: Option<Real>,
    /// `ratio / (k exp(k / V(N/k)))`.
    pub normalized: Option<Real>,
    pub regime: Regime,
}

/// Builds the report from an even-`k` certificate.
pub fn sandwich_from(cert: &ExtremalCertificate, prec: u32) -> Result<SandwichReport> {
    let spec = &cert.spec;
    let k = cert.k;
    let m_tilde = tilde_m(spec, k)?;
    if cert.value.is_zero() {
        return Err(Error::Disagreement("M is zero".into()));
    }
    let ratio = &m_tilde / &cert.value;
    let big_n = spec.scale_n();
    let v_value = if big_n.is_zero() || big_n < Rational::zero() {
        None
    } else {
        v_function(&Real::from_rational(&(big_n / uint(k)), prec))
    };
    let normalized = v_value.as_ref().map(|v| {
        let kr = Real::from_int(k, prec);
        let comparator = kr.mul(&kr.div(v).exp());
        Real::from_rational(&ratio, prec).div(&comparator)
    });
    Ok(SandwichReport {
        spec: spec.clone(),
        k,
        m: cert.value.clone(),
        m_tilde,
        ratio,
        degenerate: cert.degenerate,
        v_value,
        normalized,
        regime: Regime::classify(spec, k, prec),
    })
}

pub fn sandwich_report(spec: &BinomialSpec, k: u64, method: Method, budget: u64, prec: u32) -> Result<SandwichReport> {
    check_even(k)?;
    let cert = compute_max(spec, k, method, budget)?;
    sandwich_from(&cert, prec)
}
