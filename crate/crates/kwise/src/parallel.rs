//! Rayon-backed versions of the core computations. Results never depend on
//! the number of threads.

use rayon::prelude::*;

use kwise_core::binomial::BinomialSpec;
use kwise_core::extremal::{odd_certificate, solve_max_lp, DualSearch, ExtremalCertificate, Method, ShardBest};
use kwise_core::rational::Rational;
use kwise_core::suites::{CheckRecord, Suite};
use kwise_core::{Error, Result};

use crate::error::CliError;

/// Runs `f` on a pool with `threads` workers (all cores when `None` or 0).
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Input(format!("cannot start thread pool: {e}")))?;
    Ok(pool.install(f))
}

/// The root-pair search split into shards across the current pool.
pub fn dual_search(spec: &BinomialSpec, k: u64, budget: u64) -> Result<ExtremalCertificate> {
    let search = DualSearch::new(spec, k, budget)?;
    let shards = rayon::current_num_threads().max(1) * 4;
    let best = (0..shards)
        .into_par_iter()
        .map(|i| search.search_shard(i, shards))
        .collect::<Vec<_>>()
        .into_iter()
        .reduce(ShardBest::merge)
        .expect("at least one shard");
    search.finish(best)
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

/// `M(n,k,p)` by `method`, reducing odd `k` and falling back to the LP when
/// no root pairs fit.
pub fn compute_max(spec: &BinomialSpec, k: u64, method: Method, budget: u64) -> Result<ExtremalCertificate> {
    check_k(spec, k)?;
    if k % 2 == 1 {
        let inner = if k == 1 {
            Rational::from_integer(1.into())
        } else {
            compute_max(&spec.with_n(spec.n() - 1)?, k - 1, method, budget)?.value
        };
        return odd_certificate(spec, k, &inner, method);
    }
    match method {
        Method::DualSearch if k < spec.n() => dual_search(spec, k, budget),
        _ => solve_max_lp(spec, k),
    }
}

/// The even problem a dual search actually runs on for `(n, k)`, if any.
pub fn search_target(spec: &BinomialSpec, k: u64) -> Option<(BinomialSpec, u64)> {
    let (spec, k) = if k % 2 == 1 {
        (spec.with_n(spec.n() - 1).ok()?, k - 1)
    } else {
        (spec.clone(), k)
    };
    (k >= 2 && k < spec.n()).then_some((spec, k))
}

/// All records of a suite, cells evaluated in parallel, in cell order.
pub fn run_suite<S: Suite>(suite: &S) -> Vec<CheckRecord> {
    suite
        .cells()
        .par_iter()
        .map(|cell| suite.run(cell))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}
