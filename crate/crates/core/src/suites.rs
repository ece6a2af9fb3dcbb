//! Property sweeps, split into independent cells so callers can run them in
//! parallel and still concatenate results in a fixed order.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::binomial::{expectation, expectation_by_summation, BinomialSpec};
use crate::chebyshev::{chain_check, norm_squared, orthogonality_of, ChebyshevFamily, SupChecker};
use crate::extremal::{
    compute_max_dual_search, compute_max_primal, has_pair_structure, verify_certificate, ExtremalCertificate,
};
use crate::kwise::{lift_to_joint, verify_kwise};
use crate::perturbation::{
    far_point_check, find_witness, mix_seed, pointwise_sweep, prob_shift_check, RatioContext,
    sample_configs, PerturbationPair, Side, WitnessMode, WitnessSearchParams,
};
use crate::poly::Polynomial;
use crate::rational::{int, Rational};
use crate::real::Real;
use crate::relaxed::{check_tilde_estimates, sandwich_from, tilde_m};

/// One named pass/fail line of a suite.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckRecord {
    pub check: &'static str,
    pub params: Vec<(&'static str, String)>,
    pub pass: bool,
    /// Measured quantity worth keeping, such as a ratio.
    pub value: Option<String>,
}

impl CheckRecord {
    fn new(check: &'static str, params: Vec<(&'static str, String)>, pass: bool) -> Self {
        Self {
            check,
            params,
            pass,
            value: None,
        }
    }

    fn with_value(mut self, value: impl ToString) -> Self {
        self.value = Some(value.to_string());
        self
    }
}

pub trait Suite: Sync {
    type Cell: Send + Sync;

    fn name(&self) -> &'static str;
    fn cells(&self) -> Vec<Self::Cell>;
    fn run(&self, cell: &Self::Cell) -> Vec<CheckRecord>;
}

pub fn run_sequential<S: Suite>(suite: &S) -> Vec<CheckRecord> {
    suite.cells().iter().flat_map(|c| suite.run(c)).collect()
}

fn spec_params(spec: &BinomialSpec, k: u64) -> Vec<(&'static str, String)> {
    alloc::vec![("n", spec.n().to_string()), ("k", k.to_string()), ("p", spec.p().to_string())]
}

pub struct ChebyshevSuite {
    pub max_m: u64,
    pub max_d: u64,
    /// Largest `M` for the random monic and chain checks.
    pub max_sup_m: u64,
    pub samples: usize,
    pub seed: u64,
    pub prec: u32,
}

impl Suite for ChebyshevSuite {
    type Cell = u64;

    fn name(&self) -> &'static str {
        "chebyshev"
    }

    fn cells(&self) -> Vec<u64> {
        (1..=self.max_m).collect()
    }

    fn run(&self, &m: &u64) -> Vec<CheckRecord> {
        let mut out = Vec::new();
        let dmax = self.max_d.min(m - 1);
        let fam = ChebyshevFamily::new(m, dmax).expect("dmax < M");
        let p = || alloc::vec![("M", m.to_string()), ("dmax", dmax.to_string())];
        out.push(CheckRecord::new("orthogonality", p(), orthogonality_of(&fam).pass()));
        out.push(CheckRecord::new("leading_coefficient", p(), fam.bad_leading_coefficients().is_empty()));
        let norms_ok = (0..=dmax).all(|d| norm_squared(m, d).is_ok());
        out.push(CheckRecord::new("norm", p(), norms_ok));
        if m > self.max_sup_m {
            return out;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(self.seed, &[m]));
        for d in 0..=m / 2 {
            let params = alloc::vec![("M", m.to_string()), ("d", d.to_string())];
            if d >= 1 {
                let chain = chain_check(m, d, self.prec).expect("1 <= d <= M/2");
                out.push(CheckRecord::new("chain", params.clone(), chain.pass));
            }
            let checker = SupChecker::new(m, d, self.prec).expect("d <= M/2");
            let lo = -(m as i64);
            let hi = 2 * m as i64;
            let mut pass = true;
            let mut tightest: Option<Rational> = None;
            for _ in 0..self.samples {
                let roots: Vec<i64> = (0..d).map(|_| rng.gen_range(lo..=hi)).collect();
                let r = checker.check_roots(&roots).expect("degree matches");
                pass &= r.pass;
                if tightest.as_ref().is_none_or(|t| r.max_abs < *t) {
                    tightest = Some(r.max_abs);
                }
            }
            let mut rec = CheckRecord::new("monic_sup", params, pass);
            if let Some(t) = tightest {
                rec = rec.with_value(t);
            }
            out.push(rec);
        }
        out
    }
}

/// Certificates from both routes for `(n, k, p)`, when the dual search applies.
fn both_routes(spec: &BinomialSpec, k: u64, budget: u64) -> crate::Result<(ExtremalCertificate, ExtremalCertificate)> {
    let primal = compute_max_primal(spec, k)?;
    let dual = compute_max_dual_search(spec, k, budget)?;
    Ok((primal, dual))
}

fn grid(max_n: u64, ks: &[u64], ps: &[Rational]) -> Vec<(BinomialSpec, u64)> {
    let mut cells = Vec::new();
    for n in 1..=max_n {
        for &k in ks {
            if k % 2 == 1 || k < 2 || k > n.saturating_sub(1) {
                continue;
            }
            for p in ps {
                cells.push((BinomialSpec::new(n, p.clone()).expect("valid p"), k));
            }
        }
    }
    cells
}

/// Primal LP and dual search agree, certificates verify, duals have pair structure.
pub struct DualitySuite {
    pub max_n: u64,
    pub ks: Vec<u64>,
    pub ps: Vec<Rational>,
    pub budget: u64,
}

impl Suite for DualitySuite {
    type Cell = (BinomialSpec, u64);

    fn name(&self) -> &'static str {
        "duality"
    }

    fn cells(&self) -> Vec<Self::Cell> {
        grid(self.max_n, &self.ks, &self.ps)
    }

    fn run(&self, (spec, k): &Self::Cell) -> Vec<CheckRecord> {
        let params = spec_params(spec, *k);
        match both_routes(spec, *k, self.budget) {
            Err(e) => alloc::vec![CheckRecord::new("duality", params, false).with_value(e)],
            Ok((primal, dual)) => alloc::vec![
                CheckRecord::new("duality", params.clone(), primal.value == dual.value).with_value(&primal.value),
                CheckRecord::new(
                    "certificate",
                    params.clone(),
                    verify_certificate(&primal).all_pass() && verify_certificate(&dual).all_pass()
                ),
                CheckRecord::new("pair_structure", params, has_pair_structure(&dual.dual_zeros, *k)),
            ],
        }
    }
}

/// `M <= M~` exactly, with the measured ratio and the log estimate of `M~`.
pub struct SandwichSuite {
    pub max_n: u64,
    pub ks: Vec<u64>,
    pub ps: Vec<Rational>,
    pub budget: u64,
    pub prec: u32,
    pub slack: Rational,
}

impl Suite for SandwichSuite {
    type Cell = (BinomialSpec, u64);

    fn name(&self) -> &'static str {
        "sandwich"
    }

    fn cells(&self) -> Vec<Self::Cell> {
        grid(self.max_n, &self.ks, &self.ps)
    }

    fn run(&self, (spec, k): &Self::Cell) -> Vec<CheckRecord> {
        let params = spec_params(spec, *k);
        let mut out = Vec::new();
        match compute_max_primal(spec, *k).and_then(|c| sandwich_from(&c, self.prec)) {
            Ok(r) => {
                let ok = r.m <= r.m_tilde && r.ratio >= Rational::from_integer(1.into());
                out.push(CheckRecord::new("sandwich", params.clone(), ok).with_value(&r.ratio));
            }
            Err(e) => out.push(CheckRecord::new("sandwich", params.clone(), false).with_value(e)),
        }
        if let Ok(t) = check_tilde_estimates(spec, *k, self.prec) {
            if t.in_regime {
                out.push(CheckRecord::new("tilde_estimate", params, t.passes(&self.slack)).with_value(t.l.to_decimal(15)));
            }
        }
        out
    }
}

/// The exchangeable lift of each maximizer is `k`-wise independent with AND mass `M`.
pub struct KwiseSuite {
    pub max_n: u64,
    pub ks: Vec<u64>,
    pub ps: Vec<Rational>,
}

impl Suite for KwiseSuite {
    type Cell = (BinomialSpec, u64);

    fn name(&self) -> &'static str {
        "kwise"
    }

    fn cells(&self) -> Vec<Self::Cell> {
        grid(self.max_n, &self.ks, &self.ps)
    }

    fn run(&self, (spec, k): &Self::Cell) -> Vec<CheckRecord> {
        let params = spec_params(spec, *k);
        let cert = match compute_max_primal(spec, *k) {
            Ok(c) => c,
            Err(e) => return alloc::vec![CheckRecord::new("kwise_lift", params, false).with_value(e)],
        };
        let joint = lift_to_joint(cert.distribution.clone());
        let lift_ok = verify_kwise(&joint, *k, spec.p()).is_ok_and(|r| r.pass());
        alloc::vec![
            CheckRecord::new("kwise_lift", params.clone(), lift_ok),
            CheckRecord::new("and_probability", params, joint.and_probability() == cert.value),
        ]
    }
}

/// Pointwise ratio bound, expectation ratios, witness windows and the far-point bound.
pub struct PerturbationSuite {
    pub max_n: u64,
    pub ks: Vec<u64>,
    pub ps: Vec<Rational>,
    pub configs_per_cell: usize,
    pub seed: u64,
    pub prec: u32,
    /// Configurations per cell that also get witness and far-point checks.
    pub witness_configs: usize,
    /// Witness checks only for `n` up to this.
    pub witness_max_n: u64,
}

impl Suite for PerturbationSuite {
    type Cell = (u64, u64);

    fn name(&self) -> &'static str {
        "perturbation"
    }

    fn cells(&self) -> Vec<(u64, u64)> {
        let mut cells = Vec::new();
        for n in 1..=self.max_n {
            for &k in &self.ks {
                if k % 2 == 0 && k >= 2 && k < n {
                    cells.push((n, k));
                }
            }
        }
        cells
    }

    fn run(&self, &(n, k): &(u64, u64)) -> Vec<CheckRecord> {
        let base = || alloc::vec![("n", n.to_string()), ("k", k.to_string())];
        let configs = match sample_configs(n, k, self.configs_per_cell, self.seed) {
            Ok(c) => c,
            Err(e) => return alloc::vec![CheckRecord::new("pointwise_ratio", base(), false).with_value(e)],
        };
        let pairs: Vec<PerturbationPair> = configs.into_iter().map(PerturbationPair::new).collect();
        let mut out = Vec::new();

        let mut pointwise_ok = true;
        let mut max_pointwise = Rational::zero();
        for pair in &pairs {
            let s = pointwise_sweep(pair, n);
            pointwise_ok &= s.failures.is_empty();
            if s.max_ratio > max_pointwise {
                max_pointwise = s.max_ratio;
            }
        }
        let mut params = base();
        params.push(("configs", pairs.len().to_string()));
        out.push(CheckRecord::new("pointwise_ratio", params, pointwise_ok).with_value(&max_pointwise));

        for p in &self.ps {
            let spec = BinomialSpec::new(n, p.clone()).expect("valid p");
            let ctx = RatioContext::new(&spec, k, self.prec);
            let mut ok = true;
            let mut max_normalized: Option<Real> = None;
            for pair in &pairs {
                let r = ctx.report(pair);
                ok &= r.expected_f.is_positive() && r.expected_g.is_positive();
                if let Some(v) = r.normalized() {
                    max_normalized = Some(match max_normalized {
                        Some(m) => m.max(v),
                        None => v,
                    });
                }
            }
            let mut params = base();
            params.push(("p", p.to_string()));
            let mut rec = CheckRecord::new("expectation_ratio", params, ok);
            if let Some(m) = max_normalized {
                rec = rec.with_value(m.to_decimal(15));
            }
            out.push(rec);
        }

        if n <= self.witness_max_n {
            out.extend(self.witness_checks(n, k, &pairs));
        }
        out
    }
}

impl PerturbationSuite {
    fn witness_checks(&self, n: u64, k: u64, pairs: &[PerturbationPair]) -> Vec<CheckRecord> {
        let params = WitnessSearchParams::default_for(k, self.prec);
        let (lo, hi) = params.window(n, self.prec);
        let taus = [Real::from_int(5, self.prec), Real::from_int(12, self.prec).exp()];
        let mut window_ok = true;
        let mut far_ok = true;
        let mut far_checked = 0usize;
        for p in &self.ps {
            let spec = BinomialSpec::new(n, p.clone()).expect("valid p");
            for pair in pairs.iter().take(self.witness_configs) {
                for x in pair.zeros() {
                    let full = find_witness(&spec, pair, x, &params, WitnessMode::Exhaustive, self.prec);
                    let windowed = find_witness(&spec, pair, x, &params, WitnessMode::Window, self.prec);
                    match (full, windowed) {
                        (Ok(f), Ok(w)) => {
                            let d = f.w.abs_diff(x);
                            if lo <= d && d <= hi {
                                window_ok &= f == w;
                            } else {
                                window_ok &= w.ratio >= f.ratio;
                            }
                        }
                        (Ok(_), Err(_)) => {}
                        _ => window_ok = false,
                    }
                }
            }
        }
        for pair in pairs.iter().take(self.witness_configs) {
            for x in pair.zeros() {
                for tau in &taus {
                    for m in [1u64, 2, 3, 4, 6, 8] {
                        for side in [Side::Right, Side::Left] {
                            if let Some(c) = far_point_check(pair, x as i64, m, tau, side) {
                                far_checked += 1;
                                far_ok &= c.pass;
                            }
                        }
                    }
                }
            }
        }
        let base = || alloc::vec![("n", n.to_string()), ("k", k.to_string())];
        let mut far_params = base();
        far_params.push(("checked", far_checked.to_string()));
        alloc::vec![
            CheckRecord::new("witness_window", base(), window_ok),
            CheckRecord::new("far_point", far_params, far_ok),
        ]
    }
}

/// Binomial mass near `floor(pn)` versus mass `ell` steps away.
pub struct ProbShiftSuite {
    pub ns: Vec<u64>,
    pub ps: Vec<Rational>,
    pub prec: u32,
}

impl Suite for ProbShiftSuite {
    type Cell = BinomialSpec;

    fn name(&self) -> &'static str {
        "probshift"
    }

    fn cells(&self) -> Vec<BinomialSpec> {
        let mut cells = Vec::new();
        for &n in &self.ns {
            for p in &self.ps {
                cells.push(BinomialSpec::new(n, p.clone()).expect("valid p"));
            }
        }
        cells
    }

    fn run(&self, spec: &BinomialSpec) -> Vec<CheckRecord> {
        let mut pass = true;
        let mut checked = 0usize;
        for ell in 1..=spec.n() {
            let r = prob_shift_check(spec, ell, self.prec).expect("ell >= 1");
            checked += usize::from(r.up.is_checked()) + usize::from(r.down.is_checked());
            pass &= r.passed();
        }
        let params = alloc::vec![
            ("n", spec.n().to_string()),
            ("p", spec.p().to_string()),
            ("checked", checked.to_string()),
        ];
        alloc::vec![CheckRecord::new("prob_shift", params, pass)]
    }
}

/// Falling-factorial expectation against direct summation on random inputs.
pub struct ExpectationSuite {
    pub cases: usize,
    pub max_n: u64,
    pub max_degree: usize,
    pub seed: u64,
}

impl ExpectationSuite {
    pub fn random_case(&self, index: usize) -> (BinomialSpec, Polynomial) {
        let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(self.seed, &[index as u64]));
        let n = rng.gen_range(1..=self.max_n);
        let den: i64 = rng.gen_range(2..=30);
        let num: i64 = rng.gen_range(1..den);
        let spec = BinomialSpec::new(n, Rational::new(num.into(), den.into())).expect("0 < p < 1");
        let degree = rng.gen_range(0..=self.max_degree);
        let coeffs = (0..=degree).map(|_| int(rng.gen_range(-9..=9))).collect();
        (spec, Polynomial::from_coeffs(coeffs))
    }
}

impl Suite for ExpectationSuite {
    type Cell = usize;

    fn name(&self) -> &'static str {
        "expectation"
    }

    fn cells(&self) -> Vec<usize> {
        (0..self.cases).collect()
    }

    fn run(&self, &i: &usize) -> Vec<CheckRecord> {
        let (spec, poly) = self.random_case(i);
        let ok = expectation(&spec, &poly) == expectation_by_summation(&spec, &poly);
        let params = alloc::vec![
            ("case", i.to_string()),
            ("n", spec.n().to_string()),
            ("p", spec.p().to_string()),
            ("poly", format!("{poly}")),
        ];
        alloc::vec![CheckRecord::new("expectation", params, ok)]
    }
}

/// `M~` computed for a grid; kept for scans that need no LP.
pub fn tilde_grid(max_n: u64, ks: &[u64], ps: &[Rational]) -> Vec<(BinomialSpec, u64, Rational)> {
    grid(max_n, ks, ps)
        .into_iter()
        .map(|(s, k)| {
            let t = tilde_m(&s, k).expect("even k");
            (s, k, t)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use crate::real::DEFAULT_PRECISION as P;
    use alloc::vec;

    fn all_pass(records: &[CheckRecord]) -> bool {
        records.iter().all(|r| r.pass)
    }

    #[test]
    fn small_suites_pass() {
        let ps = vec![rat(1, 2), rat(1, 3)];
        assert!(all_pass(&run_sequential(&DualitySuite { max_n: 8, ks: vec![2, 4], ps: ps.clone(), budget: 1000 })));
        assert!(all_pass(&run_sequential(&KwiseSuite { max_n: 8, ks: vec![2, 4], ps: ps.clone() })));
        let slack = Rational::from_integer(5.into());
        assert!(all_pass(&run_sequential(&SandwichSuite { max_n: 8, ks: vec![2], ps: ps.clone(), budget: 1000, prec: P, slack })));
        assert!(all_pass(&run_sequential(&ChebyshevSuite { max_m: 8, max_d: 4, max_sup_m: 8, samples: 20, seed: 1, prec: P })));
        let suite = PerturbationSuite {
            max_n: 14,
            ks: vec![2, 4],
            ps: ps.clone(),
            configs_per_cell: 5,
            seed: 1,
            prec: P,
            witness_configs: 2,
            witness_max_n: 14,
        };
        assert!(all_pass(&run_sequential(&suite)));
        assert!(all_pass(&run_sequential(&ProbShiftSuite { ns: vec![10, 20], ps, prec: P })));
        assert!(all_pass(&run_sequential(&ExpectationSuite { cases: 30, max_n: 25, max_degree: 12, seed: 4 })));
    }

    #[test]
    fn grid_skips_invalid_k() {
        let cells = grid(4, &[2, 3, 4], &[rat(1, 2)]);
        let shapes: Vec<(u64, u64)> = cells.iter().map(|(s, k)| (s.n(), *k)).collect();
        assert_eq!(shapes, [(3, 2), (4, 2)]);
    }
}
