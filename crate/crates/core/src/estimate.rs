//! Log-domain Monte Carlo reductions and the replica runner.
//!
//! Every estimator in the crate reduces a vector of log-terms `ℓ_k` to
//! `ln((1/n) Σ e^{ℓ_k})`. Terms equal to `-inf` encode zero contributions (a
//! missed indicator). Reductions always run over the replica vector in index
//! order, so results do not depend on how replicas were scheduled.

use crate::error::{Error, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

/// A Monte Carlo point estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub std_err: f64,
    pub replicas: usize,
    pub seed: u64,
}

pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY || m == f64::INFINITY {
        return m;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

pub fn log_mean_exp(xs: &[f64]) -> f64 {
    log_sum_exp(xs) - (xs.len() as f64).ln()
}

/// `ln mean exp(ℓ)` with a jackknife standard error.
///
/// Leave-one-out sums are formed from prefix and suffix sums so a dominant
/// term never cancels against the total. When the jackknife is undefined
/// (fewer than two nonzero terms) the delta-method error of the log of the
/// sample mean is returned instead, which is infinite if every term is zero.
pub fn log_mean_exp_jackknife(xs: &[f64]) -> Result<(f64, f64)> {
    let n = xs.len();
    if n < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 samples, got {n}")));
    }
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return Ok((f64::NEG_INFINITY, f64::INFINITY));
    }
    let s: Vec<f64> = xs.iter().map(|x| (x - m).exp()).collect();
    let total: f64 = s.iter().sum();
    let value = m + (total / n as f64).ln();

    let nonzero = s.iter().filter(|&&v| v > 0.0).count();
    if nonzero >= 2 {
        let mut prefix = vec![0.0; n + 1];
        for k in 0..n {
            prefix[k + 1] = prefix[k] + s[k];
        }
        let mut suffix = vec![0.0; n + 1];
        for k in (0..n).rev() {
            suffix[k] = suffix[k + 1] + s[k];
        }
        let loo: Vec<f64> = (0..n)
            .map(|k| ((prefix[k] + suffix[k + 1]) / (n - 1) as f64).ln())
            .collect();
        if loo.iter().all(|v| v.is_finite()) {
            let mean = loo.iter().sum::<f64>() / n as f64;
            let ss: f64 = loo.iter().map(|v| (v - mean) * (v - mean)).sum();
            let se = ((n - 1) as f64 / n as f64 * ss).sqrt();
            return Ok((value, se));
        }
    }
    let mean = total / n as f64;
    let var = s.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
    Ok((value, (var / n as f64).sqrt() / mean))
}

/// Mean and standard error of plain samples.
pub fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, f64::INFINITY);
    }
    let var = xs.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// The RNG for replica `index` under `seed`: one ChaCha8 stream per replica.
pub fn replica_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Runs `n` independent replicas in parallel and returns their outputs in index order.
pub fn run_replicas<T, F>(n: usize, seed: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng, usize) -> T + Sync,
{
    (0..n)
        .into_par_iter()
        .map(|k| {
            let mut rng = replica_rng(seed, k as u64);
            f(&mut rng, k)
        })
        .collect()
}

/// Runs `f` on a dedicated pool of `threads` workers, or on the global pool for `None`.
pub fn with_threads<T: Send, F: FnOnce() -> T + Send>(threads: Option<usize>, f: F) -> T {
    match threads {
        Some(t) if t > 0 => match rayon::ThreadPoolBuilder::new().num_threads(t).build() {
            Ok(pool) => pool.install(f),
            Err(_) => f(),
        },
        _ => f(),
    }
}
