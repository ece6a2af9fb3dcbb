//! Replacing each root pair `(x-a)(x-a-1)` by a double root `(x-a)^2`, and
//! measuring what that does to Binomial expectations.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::binomial::{pmf_unchecked, BinomialSpec, FactorialMoments};
use crate::chebyshev::guard_band;
use crate::error::{Error, Result};
use crate::extremal::{RootPairConfig, RootPairConfigs};
use crate::poly::Polynomial;
use crate::rational::{ceil, uint, Rational};
use crate::real::Real;
use crate::relaxed::v_function;

/// `f = prod (x-a)(x-a-1)` and `g = prod (x-a)^2` for one configuration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PerturbationPair {
    pub config: RootPairConfig,
    pub f: Polynomial,
    pub g: Polynomial,
}

pub fn build_pair(n: u64, starts: Vec<u64>) -> Result<PerturbationPair> {
    Ok(PerturbationPair::new(RootPairConfig::new(n, starts)?))
}

impl PerturbationPair {
    pub fn new(config: RootPairConfig) -> Self {
        let f = config.pair_polynomial();
        let g = config.double_root_polynomial();
        Self { config, f, g }
    }

    pub fn k(&self) -> u64 {
        self.config.k()
    }

    /// `f(x)` at an integer, without going through rationals.
    pub fn f_at(&self, x: i64) -> BigInt {
        self.config
            .starts()
            .iter()
            .map(|&a| BigInt::from((x - a as i64) * (x - a as i64 - 1)))
            .product()
    }

    pub fn g_at(&self, x: i64) -> BigInt {
        self.config
            .starts()
            .iter()
            .map(|&a| BigInt::from((x - a as i64) * (x - a as i64)))
            .product()
    }

    /// Integer zeros of `f`, increasing.
    pub fn zeros(&self) -> Vec<u64> {
        self.config.zeros()
    }
}

/// `E[g] / E[f]` with its parts and the comparator `k exp(k / V(N/k))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatioReport {
    pub expected_g: Rational,
    pub expected_f: Rational,
    pub ratio: Rational,
    pub comparator: Option<Real>,
}

impl RatioReport {
    /// `ratio / comparator`, when the comparator is defined.
    pub fn normalized(&self) -> Option<Real> {
        let c = self.comparator.as_ref()?;
        Some(Real::from_rational(&self.ratio, c.precision()).div(c))
    }
}

pub fn ratio_expectations(spec: &BinomialSpec, pair: &PerturbationPair, prec: u32) -> RatioReport {
    RatioContext::new(spec, pair.k(), prec).report(pair)
}

/// Moments and comparator shared by every configuration of one `(n, k, p)`.
#[derive(Clone, Debug)]
pub struct RatioContext {
    moments: FactorialMoments,
    comparator: Option<Real>,
}

impl RatioContext {
    pub fn new(spec: &BinomialSpec, k: u64, prec: u32) -> Self {
        let big_n = spec.scale_n();
        let comparator = if big_n.is_positive() {
            v_function(&Real::from_rational(&(big_n / uint(k)), prec)).map(|v| {
                let kr = Real::from_int(k, prec);
                kr.mul(&kr.div(&v).exp())
            })
        } else {
            None
        };
        Self {
            moments: FactorialMoments::new(spec, k as usize),
            comparator,
        }
    }

    pub fn report(&self, pair: &PerturbationPair) -> RatioReport {
        let expected_f = self.moments.expectation(&pair.f);
        let expected_g = self.moments.expectation(&pair.g);
        let ratio = &expected_g / &expected_f;
        RatioReport {
            expected_g,
            expected_f,
            ratio,
            comparator: self.comparator.clone(),
        }
    }
}

/// `g(x)/f(x)` at a point where `f` does not vanish.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointwiseRatio {
    pub x: i64,
    pub ratio: Rational,
    /// `ratio^2 <= 4k`.
    pub pass: bool,
}

pub fn pointwise_ratio_check(pair: &PerturbationPair, x: i64) -> Result<PointwiseRatio> {
    let f = pair.f_at(x);
    if f.is_zero() {
        return Err(Error::ZeroPoint(x));
    }
    let g = pair.g_at(x);
    let pass = &g * &g <= BigInt::from(4 * pair.k()) * &f * &f;
    Ok(PointwiseRatio {
        x,
        ratio: Rational::new(g, f),
        pass,
    })
}

/// Pointwise check at every non-zero integer of `{0, ..., n}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointwiseSweep {
    pub points: usize,
    pub max_ratio: Rational,
    pub failures: Vec<i64>,
}

pub fn pointwise_sweep(pair: &PerturbationPair, n: u64) -> PointwiseSweep {
    let mut sweep = PointwiseSweep {
        points: 0,
        max_ratio: Rational::zero(),
        failures: Vec::new(),
    };
    for x in 0..=n as i64 {
        let Ok(r) = pointwise_ratio_check(pair, x) else { continue };
        sweep.points += 1;
        if !r.pass {
            sweep.failures.push(x);
        }
        if r.ratio > sweep.max_ratio {
            sweep.max_ratio = r.ratio;
        }
    }
    sweep
}

/// Scales for the far-witness search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessSearchParams {
    /// `ln tau`; `tau = e^12` by default.
    pub log_tau: Rational,
    pub z: u64,
    pub k_steps: u32,
}

impl WitnessSearchParams {
    /// `Z = ceil(k / tau)` and the matching `K`.
    pub fn new(k: u64, log_tau: Rational, prec: u32) -> Result<Self> {
        let tau = Real::from_rational(&log_tau, prec).exp();
        let z_real = Real::from_int(k, prec).div(&tau);
        let z = ceil(&z_real.to_rational()).to_u64().unwrap_or(1).max(1);
        Self::with_z(k, log_tau, z)
    }

    pub fn default_for(k: u64, prec: u32) -> Self {
        Self::new(k, uint(12), prec).expect("tau = e^12 is admissible")
    }

    /// `K` is the least integer `>= 1` with `b^(K-1) >= (k/Z)^2`, `b = floor(ln tau / 6)`.
    pub fn with_z(k: u64, log_tau: Rational, z: u64) -> Result<Self> {
        if log_tau < uint(12) {
            return Err(Error::InvalidParameter("tau must be at least e^12".into()));
        }
        if z == 0 || z > k {
            return Err(Error::InvalidParameter("Z must lie in 1..=k".into()));
        }
        let b = crate::rational::floor(&(&log_tau / uint(6)));
        let target = BigInt::from(k) * BigInt::from(k);
        let z2 = BigInt::from(z) * BigInt::from(z);
        let mut power = BigInt::one();
        let mut k_steps = 1;
        while &power * &z2 < target {
            power *= &b;
            k_steps += 1;
        }
        Ok(Self { log_tau, z, k_steps })
    }

    /// `(3Z, 9 Z tau^K)`; the upper end is clamped to `cap`.
    pub fn window(&self, cap: u64, prec: u32) -> (u64, u64) {
        let lower = 3 * self.z;
        let exponent = &self.log_tau * uint(self.k_steps as u64);
        let upper = Real::from_rational(&exponent, prec)
            .exp()
            .mul(&Real::from_int(9 * self.z, prec));
        let upper = if upper.cmp_rational(&uint(cap)).is_ge() {
            cap
        } else {
            upper.floor().to_u64().unwrap_or(cap)
        };
        (lower, upper)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum WitnessMode {
    /// `3Z <= |w - x| <= 9 Z tau^K`.
    Window,
    /// Every `w` in `{0, ..., n}`.
    Exhaustive,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub w: u64,
    /// `Pr[x] g(x) / (Pr[w] f(w))`.
    pub ratio: Rational,
}

/// The `w` minimizing `Pr[x] g(x) / (Pr[w] f(w))`; ties go to the smaller `w`.
pub fn find_witness(
    spec: &BinomialSpec,
    pair: &PerturbationPair,
    x: u64,
    params: &WitnessSearchParams,
    mode: WitnessMode,
    prec: u32,
) -> Result<Witness> {
    let n = spec.n();
    if x > n {
        return Err(Error::OutOfRange { x: x as i64, n });
    }
    let in_range: alloc::boxed::Box<dyn Fn(u64) -> bool> = match mode {
        WitnessMode::Exhaustive => alloc::boxed::Box::new(|_| true),
        WitnessMode::Window => {
            let (lo, hi) = params.window(n, prec);
            alloc::boxed::Box::new(move |w: u64| {
                let d = w.abs_diff(x);
                lo <= d && d <= hi
            })
        }
    };
    let numerator = pmf_unchecked(spec, x) * Rational::from_integer(pair.g_at(x as i64));
    let mut best: Option<Witness> = None;
    for w in (0..=n).filter(|&w| in_range(w)) {
        let f = pair.f_at(w as i64);
        if f.is_zero() {
            continue;
        }
        let ratio = &numerator / (pmf_unchecked(spec, w) * Rational::from_integer(f));
        if best.as_ref().is_none_or(|b| ratio < b.ratio) {
            best = Some(Witness { w, ratio });
        }
    }
    best.ok_or(Error::NoWitness)
}

/// Integer zeros of `f` in the four intervals around `x` at scale `m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ZeroCensus {
    /// `[x + m, x + tau m)`.
    pub r_right: u64,
    /// `(x, x + m/tau)`.
    pub l_right: u64,
    /// `(x - tau m, x - m]`.
    pub r_left: u64,
    /// `(x - m/tau, x)`.
    pub l_left: u64,
}

pub fn segment_zero_census(pair: &PerturbationPair, x: i64, m: u64, tau: &Real) -> ZeroCensus {
    let prec = tau.precision();
    let tm = tau.mul(&Real::from_int(m, prec));
    let mt = Real::from_int(m, prec).div(tau);
    let mut census = ZeroCensus {
        r_right: 0,
        l_right: 0,
        r_left: 0,
        l_left: 0,
    };
    let m = m as i64;
    for z in pair.zeros() {
        let d = z as i64 - x;
        let dr = Real::from_int(d, prec);
        let ad = Real::from_int(-d, prec);
        if d >= m && dr < tm {
            census.r_right += 1;
        }
        if d > 0 && dr < mt {
            census.l_right += 1;
        }
        if -d >= m && ad < tm {
            census.r_left += 1;
        }
        if d < 0 && ad < mt {
            census.l_left += 1;
        }
    }
    census
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Right,
    Left,
}

/// Explicit far-point bound `8 exp(12k/tau + 6R - L ln tau)` at one `(x, m)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FarPointCheck {
    pub side: Side,
    pub r: u64,
    pub l: u64,
    /// Best `(w, g(x)/f(w))` over integers `w` of the target segment. On the
    /// left these may be negative: with `w >= 0` required, `a = (0, 8)`,
    /// `x = 8`, `m = 4` leaves only `w = 0`, a zero of `f`.
    pub best: Option<(i64, Rational)>,
    pub bound: Real,
    pub pass: bool,
}

/// Checks the bound with `R`, `L` taken from the census. Returns `None`
/// unless `m >= 2R` and `tau > 4`.
pub fn far_point_check(pair: &PerturbationPair, x: i64, m: u64, tau: &Real, side: Side) -> Option<FarPointCheck> {
    let prec = tau.precision();
    if tau.cmp_rational(&uint(4)).is_le() || m == 0 {
        return None;
    }
    let census = segment_zero_census(pair, x, m, tau);
    let (r, l) = match side {
        Side::Right => (census.r_right, census.l_right),
        Side::Left => (census.r_left, census.l_left),
    };
    if m < 2 * r {
        return None;
    }
    let mi = m as i64;
    let (lo, hi) = match side {
        Side::Right => (x + 2 * mi, x + 3 * mi),
        Side::Left => (x - 3 * mi, x - 2 * mi),
    };
    let k = pair.k();
    let gx = pair.g_at(x);
    let best = (lo..=hi)
        .filter_map(|w| {
            let f = pair.f_at(w);
            (!f.is_zero()).then(|| (w, Rational::new(gx.clone(), f)))
        })
        .min_by(|a, b| a.1.cmp(&b.1).then(a.0.cmp(&b.0)));
    let exponent = Real::from_int(12 * k, prec)
        .div(tau)
        .add(&Real::from_int(6 * r, prec))
        .sub(&tau.ln().mul(&Real::from_int(l, prec)));
    let bound = exponent.exp().mul(&Real::from_int(8, prec));
    let slack = bound.mul_rational(&(Rational::one() + guard_band()));
    let pass = best.as_ref().is_some_and(|(_, v)| slack.cmp_rational(v).is_ge());
    Some(FarPointCheck {
        side,
        r,
        l,
        best,
        bound,
        pass,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ShiftOutcome {
    Skipped,
    Checked {
        /// `Pr[mu] / Pr[mu +- ell]`.
        ratio: Rational,
        bound: Real,
        pass: bool,
    },
}

impl ShiftOutcome {
    pub fn passed(&self) -> bool {
        !matches!(self, ShiftOutcome::Checked { pass: false, .. })
    }

    pub fn is_checked(&self) -> bool {
        matches!(self, ShiftOutcome::Checked { .. })
    }
}

/// Binomial mass near `mu = floor(pn)` compared with mass `ell` steps away.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShiftReport {
    pub mu: u64,
    pub ell: u64,
    /// `Pr[mu] <= exp(3 ell^2 / 2N) Pr[mu + ell]`, needs `ell <= (n - mu)/2`.
    pub up: ShiftOutcome,
    /// `Pr[mu] <= exp(8 ell^2 / N) Pr[mu - ell]`, needs `ell <= mu/2`.
    pub down: ShiftOutcome,
}

impl ShiftReport {
    pub fn passed(&self) -> bool {
        self.up.passed() && self.down.passed()
    }
}

pub fn prob_shift_check(spec: &BinomialSpec, ell: u64, prec: u32) -> Result<ShiftReport> {
    if ell == 0 {
        return Err(Error::InvalidParameter("ell must be positive".into()));
    }
    let n = spec.n();
    let big_n = spec.scale_n();
    let mu = crate::rational::floor(&(spec.p() * uint(n))).to_u64().expect("mu fits");
    if !big_n.is_positive() {
        return Ok(ShiftReport {
            mu,
            ell,
            up: ShiftOutcome::Skipped,
            down: ShiftOutcome::Skipped,
        });
    }
    let at_mu = pmf_unchecked(spec, mu);
    let outcome = |other: u64, coeff: Rational| {
        let ratio = &at_mu / pmf_unchecked(spec, other);
        let exponent = coeff * uint(ell * ell) / &big_n;
        let bound = Real::from_rational(&exponent, prec).exp();
        let slack = bound.mul_rational(&(Rational::one() + guard_band()));
        let pass = slack.cmp_rational(&ratio).is_ge();
        ShiftOutcome::Checked { ratio, bound, pass }
    };
    let up = if 2 * ell <= n - mu {
        outcome(mu + ell, Rational::new(3.into(), 2.into()))
    } else {
        ShiftOutcome::Skipped
    };
    let down = if 2 * ell <= mu {
        outcome(mu - ell, uint(8))
    } else {
        ShiftOutcome::Skipped
    };
    Ok(ShiftReport { mu, ell, up, down })
}

/// SplitMix64 finalizer, used to derive independent per-cell seeds.
pub fn mix_seed(seed: u64, parts: &[u64]) -> u64 {
    let mut h = seed;
    for &p in parts {
        h = h.wrapping_add(0x9e37_79b9_7f4a_7c15).wrapping_add(p);
        let mut z = h;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        h = z ^ (z >> 31);
    }
    h
}

/// A uniformly random valid configuration: pick `k/2` distinct `b` from
/// `0..=n-1-k/2` and set `a_i = b_i + i`.
pub fn random_config(n: u64, k: u64, rng: &mut impl Rng) -> Result<RootPairConfig> {
    let h = k / 2;
    if k % 2 == 1 || h == 0 || n < 2 * h + 1 {
        return Err(Error::PairsDoNotFit { pairs: h, limit: n.saturating_sub(1) });
    }
    let pool = n - h;
    // Floyd's sampling of h distinct values from 0..pool
    let mut chosen = BTreeSet::new();
    for j in pool - h..pool {
        let t = rng.gen_range(0..=j);
        if !chosen.insert(t) {
            chosen.insert(j);
        }
    }
    let starts = chosen.into_iter().enumerate().map(|(i, b)| b + i as u64).collect();
    RootPairConfig::new(n, starts)
}

/// `count` configurations for `(n, k)`: all of them when there are at most
/// `count`, otherwise independent uniform draws seeded by `(seed, n, k)`.
pub fn sample_configs(n: u64, k: u64, count: usize, seed: u64) -> Result<Vec<RootPairConfig>> {
    let total = RootPairConfigs::count(n, k);
    if total <= num_bigint::BigUint::from(count) {
        return Ok(RootPairConfigs::new(n, k).collect());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, &[n, k]));
    (0..count).map(|_| random_config(n, k, &mut rng)).collect()
}
