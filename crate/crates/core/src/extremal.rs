//! Exact `M(n,k,p)` and `m(n,k,p)` with optimality certificates.
//!
//! Two independent routes compute the maximum: the primal moment LP, and an
//! enumeration of dual polynomials `f(x) = prod (x - a_i)(x - a_i - 1)` over
//! disjoint adjacent root pairs below `n`, minimizing `E[f(X)] / f(n)`. The
//! optimal law is then the unique solution of the moment equations on the
//! dual zeros plus `{n}`.

use alloc::string::String;
use alloc::vec::Vec;
use alloc::{format, string::ToString};

use num_bigint::BigUint;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::binomial::{binomial_int, expectation, BinomialSpec, FactorialMoments};
use crate::distribution::MomentDistribution;
use crate::error::{Error, Result};
use crate::lp::{moment_lp_unchecked, solve_lp, Direction, LpStatus};
use crate::poly::Polynomial;
use crate::rational::{pow, uint, Rational};

/// Default ceiling on dual-search candidates.
pub const DEFAULT_CANDIDATE_BUDGET: u64 = 10_000_000;

/// Which computation produced a certificate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    Primal,
    DualSearch,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Primal => "primal",
            Method::DualSearch => "dual",
        }
    }
}

/// Starts `a_1 < ... < a_{k/2}` of disjoint root pairs `{a_i, a_i + 1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RootPairConfig {
    starts: Vec<u64>,
}

impl RootPairConfig {
    /// Validates against `n`: starts increasing by at least two, all `<= n - 2`.
    pub fn new(n: u64, starts: Vec<u64>) -> Result<Self> {
        if let Some(w) = starts.windows(2).find(|w| w[1] < w[0] + 2) {
            return Err(Error::OverlappingPairs(w[0], w[1]));
        }
        let limit = n.saturating_sub(2);
        if let Some(&start) = starts.iter().find(|&&a| n < 2 || a > limit) {
            return Err(Error::PairOutOfRange { start, limit });
        }
        Ok(Self { starts })
    }

    pub(crate) fn new_unchecked(starts: Vec<u64>) -> Self {
        Self { starts }
    }

    pub fn starts(&self) -> &[u64] {
        &self.starts
    }

    /// Polynomial degree `k`.
    pub fn k(&self) -> u64 {
        2 * self.starts.len() as u64
    }

    /// The `k` integer zeros in increasing order.
    pub fn zeros(&self) -> Vec<u64> {
        self.starts.iter().flat_map(|&a| [a, a + 1]).collect()
    }

    /// `prod (x - a_i)(x - a_i - 1)`.
    pub fn pair_polynomial(&self) -> Polynomial {
        let roots: Vec<Rational> = self.zeros().into_iter().map(uint).collect();
        Polynomial::from_roots(&roots)
    }

    /// `prod (x - a_i)^2`.
    pub fn double_root_polynomial(&self) -> Polynomial {
        let roots: Vec<Rational> = self.starts.iter().flat_map(|&a| [uint(a), uint(a)]).collect();
        Polynomial::from_roots(&roots)
    }
}

/// Lexicographic enumeration of every valid [`RootPairConfig`] for `(n, k)`.
#[derive(Clone, Debug)]
pub struct RootPairConfigs {
    n: u64,
    current: Option<Vec<u64>>,
}

impl RootPairConfigs {
    pub fn new(n: u64, k: u64) -> Self {
        let pairs = k / 2;
        let first: Vec<u64> = (0..pairs).map(|i| 2 * i).collect();
        let fits = pairs == 0 || first.last().is_some_and(|&a| n >= 2 && a <= n - 2);
        Self {
            n,
            current: fits.then_some(first),
        }
    }

    /// `C(n - k/2, k/2)`, the number of configurations.
    pub fn count(n: u64, k: u64) -> BigUint {
        let pairs = k / 2;
        if n < pairs {
            return BigUint::zero();
        }
        binomial_int(n - pairs, pairs).to_biguint().unwrap_or_default()
    }
}

impl Iterator for RootPairConfigs {
    type Item = RootPairConfig;

    fn next(&mut self) -> Option<RootPairConfig> {
        let current = self.current.take()?;
        let h = current.len();
        // Advance the rightmost start that can move, then pack the rest.
        let mut next = current.clone();
        let mut advanced = false;
        for i in (0..h).rev() {
            let max_i = self.n - 2 - 2 * (h - 1 - i) as u64;
            if self.n >= 2 + 2 * (h - 1 - i) as u64 && next[i] < max_i {
                next[i] += 1;
                for j in i + 1..h {
                    next[j] = next[j - 1] + 2;
                }
                advanced = true;
                break;
            }
        }
        if advanced {
            self.current = Some(next);
        }
        Some(RootPairConfig::new_unchecked(current))
    }
}

/// Primal law, dual polynomial and the bookkeeping proving `value = M(n,k,p)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtremalCertificate {
    pub spec: BinomialSpec,
    pub k: u64,
    pub value: Rational,
    pub distribution: MomentDistribution,
    /// Normalized so that `P(n) = 1`.
    pub dual: Polynomial,
    pub dual_zeros: Vec<u64>,
    pub degenerate: bool,
    pub method: Method,
    /// Set when `value` came from `p * M(n-1, k-1, p)`.
    pub odd_reduction: bool,
    /// Number of optimal root-pair configurations (dual search only).
    pub minimizers: Option<u64>,
}

fn check_k(spec: &BinomialSpec, k: u64) -> Result<()> {
    if k < 1 {
        return Err(Error::KTooSmall { k, min: 1 });
    }
    if k > spec.n() {
        return Err(Error::KExceedsN { k, n: spec.n() });
    }
    Ok(())
}

/// Integer points in `0..n` where `poly` vanishes.
fn integer_zeros_below_n(poly: &Polynomial, n: u64) -> Vec<u64> {
    (0..n).filter(|&i| poly.eval(&uint(i)).is_zero()).collect()
}

/// Solves the max moment LP directly for any `1 <= k <= n`, odd or even.
pub fn solve_max_lp(spec: &BinomialSpec, k: u64) -> Result<ExtremalCertificate> {
    check_k(spec, k)?;
    let lp = moment_lp_unchecked(spec, k, Direction::Maximize);
    let sol = solve_lp(&lp)?;
    if sol.status != LpStatus::Optimal {
        return Err(Error::Disagreement(format!(
            "moment LP reported {:?} although Bin(n,p) is feasible",
            sol.status
        )));
    }
    let distribution = MomentDistribution::from_dense(&sol.point)?;
    let raw_dual = Polynomial::from_coeffs(sol.duals.clone());
    let at_n = raw_dual.eval(&uint(spec.n()));
    if !at_n.is_positive() {
        return Err(Error::Disagreement("dual polynomial is not positive at n".into()));
    }
    let dual = raw_dual.scale(&(Rational::one() / at_n));
    let dual_zeros = integer_zeros_below_n(&dual, spec.n());
    let degenerate = distribution.support().len() < k as usize + 1;
    Ok(ExtremalCertificate {
        spec: spec.clone(),
        k,
        value: sol.value,
        distribution,
        dual,
        dual_zeros,
        degenerate,
        method: Method::Primal,
        odd_reduction: false,
        minimizers: None,
    })
}

/// `M(n,k,p)` from the primal LP. Odd `k` goes through [`odd_reduction`].
pub fn compute_max_primal(spec: &BinomialSpec, k: u64) -> Result<ExtremalCertificate> {
    check_k(spec, k)?;
    if k % 2 == 1 {
        return odd_reduction(spec, k, Method::Primal, DEFAULT_CANDIDATE_BUDGET);
    }
    solve_max_lp(spec, k)
}

/// `M(n,k,p)` by the chosen route, with the usual reductions:
/// odd `k` through [`odd_reduction`], and `k = n` (no room for root pairs)
/// through the primal LP.
pub fn compute_max(spec: &BinomialSpec, k: u64, method: Method, budget: u64) -> Result<ExtremalCertificate> {
    check_k(spec, k)?;
    if k % 2 == 1 {
        return odd_reduction(spec, k, method, budget);
    }
    match method {
        Method::DualSearch if k < spec.n() => compute_max_dual_search(spec, k, budget),
        _ => solve_max_lp(spec, k),
    }
}

/// `M(n,k,p) = p M(n-1,k-1,p)` for odd `k`, with `M(., 0, p) = 1`.
///
/// The value comes from the even problem on `n - 1` bits via `method`; the
/// law and dual come from the direct LP on `(n, k)`, whose value must agree.
pub fn odd_reduction(spec: &BinomialSpec, k: u64, method: Method, budget: u64) -> Result<ExtremalCertificate> {
    if k % 2 == 0 {
        return Err(Error::EvenK(k));
    }
    check_k(spec, k)?;
    let inner = if k == 1 {
        Rational::one()
    } else {
        compute_max(&spec.with_n(spec.n() - 1)?, k - 1, method, budget)?.value
    };
    odd_certificate(spec, k, &inner, method)
}

/// Certificate for odd `k` given `M(n-1, k-1, p)` computed elsewhere.
pub fn odd_certificate(spec: &BinomialSpec, k: u64, inner: &Rational, method: Method) -> Result<ExtremalCertificate> {
    if k % 2 == 0 {
        return Err(Error::EvenK(k));
    }
    let value = spec.p() * inner;
    let mut cert = solve_max_lp(spec, k)?;
    if cert.value != value {
        return Err(Error::Disagreement(format!(
            "odd reduction gives {value}, direct LP gives {}",
            cert.value
        )));
    }
    cert.method = method;
    cert.odd_reduction = true;
    Ok(cert)
}

/// Whether the maximizing law is unique: with the AND mass pinned at `M`,
/// every coordinate is minimized and maximized over the optimal face, and
/// the result must be a single point, equal to `cert.distribution`.
pub fn primal_is_unique(cert: &ExtremalCertificate) -> Result<bool> {
    let spec = &cert.spec;
    let n = spec.n() as usize;
    let mut pinned = moment_lp_unchecked(spec, cert.k, Direction::Maximize);
    let mut at_n = alloc::vec![Rational::zero(); n + 1];
    at_n[n] = Rational::one();
    pinned.add_row(at_n, crate::lp::Sense::Eq, cert.value.clone());
    for i in 0..=n {
        let expected = cert.distribution.mass_at(i as u64);
        for direction in [Direction::Maximize, Direction::Minimize] {
            let mut lp = pinned.clone();
            lp.direction = direction;
            lp.objective = alloc::vec![Rational::zero(); n + 1];
            lp.objective[i] = Rational::one();
            let sol = solve_lp(&lp)?;
            if sol.status != LpStatus::Optimal || sol.value != expected {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `m(n,k,p)`, the minimal probability that all bits are one.
pub fn compute_min(spec: &BinomialSpec, k: u64) -> Result<Rational> {
    Ok(compute_min_witness(spec, k)?.mass_at(spec.n()))
}

/// A law attaining `m(n,k,p)`.
pub fn compute_min_witness(spec: &BinomialSpec, k: u64) -> Result<MomentDistribution> {
    check_k(spec, k)?;
    let lp = moment_lp_unchecked(spec, k, Direction::Minimize);
    let sol = solve_lp(&lp)?;
    if sol.status != LpStatus::Optimal {
        return Err(Error::Disagreement(format!("min moment LP reported {:?}", sol.status)));
    }
    MomentDistribution::from_dense(&sol.point)
}

/// Solution of the moment equations on a fixed support.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VandermondeOutcome {
    /// Non-negative solution; zero masses are dropped from the law and listed.
    Feasible {
        distribution: MomentDistribution,
        zero_mass_points: Vec<u64>,
    },
    /// Some mass is negative; all masses in support order.
    Infeasible { masses: Vec<Rational> },
}

/// Solves `sum_j q_j s_j^i = E[X^i]` for `i = 0..=k` on `k + 1` distinct points.
///
/// Uses the Lagrange basis `L_j` of the support: any law on it has
/// `q_j = E[L_j(S)]`, and `L_j` has degree `k`, so `q_j = E[L_j(X)]`.
pub fn vandermonde_solve(spec: &BinomialSpec, k: u64, support: &[u64]) -> Result<VandermondeOutcome> {
    if support.len() != k as usize + 1 {
        return Err(Error::SupportSize {
            expected: k as usize + 1,
            got: support.len(),
        });
    }
    let mut sorted = support.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::RepeatedSupport);
    }
    if let Some(&x) = sorted.iter().find(|&&x| x > spec.n()) {
        return Err(Error::OutOfRange { x: x as i64, n: spec.n() });
    }
    let moments = FactorialMoments::new(spec, k as usize);
    let masses: Vec<Rational> = sorted
        .iter()
        .map(|&s| {
            let others: Vec<Rational> = sorted.iter().filter(|&&t| t != s).map(|&t| uint(t)).collect();
            let basis = Polynomial::from_roots(&others);
            let scale = basis.eval(&uint(s));
            moments.expectation(&basis) / scale
        })
        .collect();
    if masses.iter().any(Signed::is_negative) {
        return Ok(VandermondeOutcome::Infeasible { masses });
    }
    let zero_mass_points = sorted
        .iter()
        .zip(&masses)
        .filter(|(_, m)| m.is_zero())
        .map(|(&s, _)| s)
        .collect();
    let dense_support: Vec<u64> = sorted.iter().zip(&masses).filter(|(_, m)| !m.is_zero()).map(|(&s, _)| s).collect();
    let dense_masses: Vec<Rational> = masses.into_iter().filter(|m| !m.is_zero()).collect();
    Ok(VandermondeOutcome::Feasible {
        distribution: MomentDistribution::new(spec.n(), dense_support, dense_masses)?,
        zero_mass_points,
    })
}

/// Best configuration seen by one shard of the dual search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShardBest {
    pub value: Option<Rational>,
    pub config: Option<RootPairConfig>,
    /// Configurations in this shard attaining `value`.
    pub ties: u64,
    pub evaluated: u64,
}

impl ShardBest {
    fn empty() -> Self {
        Self {
            value: None,
            config: None,
            ties: 0,
            evaluated: 0,
        }
    }

    /// Deterministic merge: smaller value wins, then the lexicographically
    /// smaller configuration; tie counts add up.
    pub fn merge(self, other: Self) -> Self {
        let evaluated = self.evaluated + other.evaluated;
        let mut best = match (&self.value, &other.value) {
            (None, _) => other,
            (_, None) => self,
            (Some(a), Some(b)) if b < a => other,
            (Some(a), Some(b)) if a < b => self,
            _ => {
                let ties = self.ties + other.ties;
                let mut winner = if other.config < self.config { other } else { self };
                winner.ties = ties;
                winner
            }
        };
        best.evaluated = evaluated;
        best
    }
}

/// Enumerator for the dual polynomial search, splittable into shards.
#[derive(Clone, Debug)]
pub struct DualSearch {
    spec: BinomialSpec,
    k: u64,
    moments: FactorialMoments,
}

impl DualSearch {
    /// Requires even `k` with `2 <= k <= n - 1`, and at most `budget` candidates.
    pub fn new(spec: &BinomialSpec, k: u64, budget: u64) -> Result<Self> {
        if k % 2 == 1 {
            return Err(Error::OddK(k));
        }
        if k < 2 {
            return Err(Error::KTooSmall { k, min: 2 });
        }
        let n = spec.n();
        // k/2 pairs need 2 * (k/2) = k slots in 0..=n-1
        if k > n - 1 {
            return Err(Error::PairsDoNotFit {
                pairs: k / 2,
                limit: n - 1,
            });
        }
        let count = RootPairConfigs::count(n, k);
        if count > BigUint::from(budget) {
            return Err(Error::BudgetExceeded {
                count: count.to_string(),
                budget,
            });
        }
        Ok(Self {
            spec: spec.clone(),
            k,
            moments: FactorialMoments::new(spec, k as usize),
        })
    }

    pub fn candidate_count(&self) -> u64 {
        RootPairConfigs::count(self.spec.n(), self.k).to_u64().unwrap_or(u64::MAX)
    }

    /// `E[f(X)] / f(n)` for one configuration.
    pub fn ratio(&self, config: &RootPairConfig) -> Rational {
        let f = config.pair_polynomial();
        debug_assert!(
            (0..=self.spec.n()).all(|i| !f.eval(&uint(i)).is_negative()),
            "pair polynomial must be non-negative on integers"
        );
        let at_n: u64 = config.starts().iter().map(|&a| (self.spec.n() - a) * (self.spec.n() - a - 1)).product();
        self.moments.expectation(&f) / uint(at_n)
    }

    /// Evaluates configurations whose enumeration index is `shard` mod `shards`.
    pub fn search_shard(&self, shard: usize, shards: usize) -> ShardBest {
        assert!(shards > 0 && shard < shards);
        let mut best = ShardBest::empty();
        for (i, config) in RootPairConfigs::new(self.spec.n(), self.k).enumerate() {
            if i % shards != shard {
                continue;
            }
            let value = self.ratio(&config);
            best.evaluated += 1;
            match &best.value {
                Some(v) if value > *v => {}
                Some(v) if value == *v => best.ties += 1,
                _ => {
                    best.value = Some(value);
                    best.config = Some(config);
                    best.ties = 1;
                }
            }
        }
        best
    }

    /// Turns the merged optimum into a certificate.
    pub fn finish(&self, best: ShardBest) -> Result<ExtremalCertificate> {
        let (Some(value), Some(config)) = (best.value, best.config) else {
            return Err(Error::Disagreement("dual search saw no candidates".into()));
        };
        let n = self.spec.n();
        let f = config.pair_polynomial();
        let at_n = f.eval(&uint(n));
        let dual = f.scale(&(Rational::one() / at_n));
        let dual_zeros = config.zeros();
        let mut support = dual_zeros.clone();
        support.push(n);
        let (distribution, zero_masses) = match vandermonde_solve(&self.spec, self.k, &support)? {
            VandermondeOutcome::Feasible {
                distribution,
                zero_mass_points,
            } => (distribution, zero_mass_points),
            VandermondeOutcome::Infeasible { .. } => {
                return Err(Error::Disagreement(format!(
                    "optimal configuration {:?} has no feasible law on its zeros",
                    config.starts()
                )))
            }
        };
        if distribution.mass_at(n) != value {
            return Err(Error::Disagreement(format!(
                "mass at n is {} but dual value is {value}",
                distribution.mass_at(n)
            )));
        }
        Ok(ExtremalCertificate {
            spec: self.spec.clone(),
            k: self.k,
            value,
            distribution,
            dual,
            dual_zeros,
            degenerate: best.ties > 1 || !zero_masses.is_empty(),
            method: Method::DualSearch,
            odd_reduction: false,
            minimizers: Some(best.ties),
        })
    }
}

/// `M(n,k,p)` by enumerating root-pair dual polynomials, single-threaded.
pub fn compute_max_dual_search(spec: &BinomialSpec, k: u64, budget: u64) -> Result<ExtremalCertificate> {
    let search = DualSearch::new(spec, k, budget)?;
    let best = search.search_shard(0, 1);
    search.finish(best)
}

/// One named pass/fail entry of a certificate audit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub pass: bool,
    pub detail: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertificateReport {
    pub checks: Vec<CheckOutcome>,
}

impl CertificateReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn get(&self, name: &str) -> Option<bool> {
        self.checks.iter().find(|c| c.name == name).map(|c| c.pass)
    }

    fn push(&mut self, name: &'static str, pass: bool, detail: Option<String>) {
        self.checks.push(CheckOutcome { name, pass, detail });
    }
}

/// Re-checks every claim of a certificate in exact arithmetic.
pub fn verify_certificate(cert: &ExtremalCertificate) -> CertificateReport {
    let mut report = CertificateReport { checks: Vec::new() };
    let spec = &cert.spec;
    let n = spec.n();
    let dist = &cert.distribution;

    let total: Rational = dist.masses().iter().sum();
    let masses_ok = total.is_one()
        && dist.masses().iter().all(Signed::is_positive)
        && dist.n() == n
        && dist.support().iter().all(|&x| x <= n);
    report.push("distribution", masses_ok, None);

    let moments = FactorialMoments::new(spec, cert.k as usize);
    let bad_moment = (1..=cert.k).find(|&i| {
        let mono = Polynomial::monomial(Rational::one(), i as usize);
        dist.raw_moment(i) != moments.expectation(&mono)
    });
    report.push("moments", bad_moment.is_none(), bad_moment.map(|i| format!("moment {i} differs")));

    let degree_ok = cert.dual.degree().is_none_or(|d| d as u64 <= cert.k);
    report.push("dual_degree", degree_ok, None);

    let negative_at = (0..n).find(|&i| cert.dual.eval(&uint(i)).is_negative());
    report.push(
        "dual_nonnegative",
        negative_at.is_none(),
        negative_at.map(|i| format!("P({i}) < 0")),
    );
    report.push("dual_normalized", cert.dual.eval(&uint(n)).is_one(), None);

    let dual_value = expectation(spec, &cert.dual);
    report.push("dual_value", dual_value == cert.value, None);
    report.push("primal_value", dist.mass_at(n) == cert.value, None);

    let zeros_ok = cert.dual_zeros.iter().all(|&z| z < n && cert.dual.eval(&uint(z)).is_zero());
    report.push("dual_zeros", zeros_ok, None);

    let outside = dist
        .support()
        .iter()
        .find(|&&x| x != n && cert.dual.eval(&uint(x)) != Rational::zero());
    report.push(
        "complementary_slackness",
        outside.is_none(),
        outside.map(|x| format!("support point {x} is not a dual zero")),
    );
    report
}

/// `p^n`, the AND probability under full independence.
pub fn independent_and(spec: &BinomialSpec) -> Rational {
    pow(spec.p(), spec.n())
}

/// Whether the integer zeros of `dual` below `n` form `k/2` disjoint adjacent pairs.
pub fn has_pair_structure(zeros: &[u64], k: u64) -> bool {
    zeros.len() as u64 == k && zeros.chunks(2).all(|c| c.len() == 2 && c[1] == c[0] + 1)
        && zeros.windows(2).all(|w| w[0] < w[1])
}
