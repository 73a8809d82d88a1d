//! Segment kernels. Each segment covers `lo..lo + chunk.len()` and is filled
//! independently, so results do not depend on segment size or thread count.

use rayon::prelude::*;

use super::SieveConfig;
use crate::error::{Error, Result};

/// Primes up to and including `limit`, by a plain sieve of Eratosthenes.
pub fn base_primes(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let limit = limit as usize;
    let mut composite = vec![false; limit + 1];
    let mut primes = Vec::new();
    for i in 2..=limit {
        if composite[i] {
            continue;
        }
        primes.push(i as u64);
        let mut j = i * i;
        while j <= limit {
            composite[j] = true;
            j += i;
        }
    }
    primes
}

pub(crate) fn in_pool<T: Send>(cfg: &SieveConfig, f: impl FnOnce() -> T + Send) -> Result<T> {
    if cfg.threads == 0 {
        return Ok(f());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| Error::Usage(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

/// Fills a table of a multiplicative function from its values at prime powers.
///
/// `prime_power(acc, p, e)` folds the factor p^e into `acc`; returning `None`
/// signals overflow of the storage width.
pub fn multiplicative<T, F>(
    n_max: usize,
    cfg: &SieveConfig,
    one: T,
    prime_power: F,
) -> Result<Vec<T>>
where
    T: Copy + Send + Sync,
    F: Fn(T, u64, u32) -> Option<T> + Sync,
{
    let base = base_primes((n_max as u64).isqrt());
    let mut out = vec![one; n_max];
    let seg = cfg.segment_size.max(1);
    in_pool(cfg, || {
        out.par_chunks_mut(seg)
            .enumerate()
            .try_for_each(|(s, chunk)| {
                multiplicative_segment((s * seg + 1) as u64, chunk, &base, &prime_power)
            })
    })??;
    Ok(out)
}

fn multiplicative_segment<T, F>(
    lo: u64,
    chunk: &mut [T],
    base: &[u64],
    prime_power: &F,
) -> Result<()>
where
    T: Copy,
    F: Fn(T, u64, u32) -> Option<T>,
{
    let hi = lo + chunk.len() as u64 - 1;
    let mut rem: Vec<u64> = (lo..=hi).collect();
    for &p in base {
        if p * p > hi {
            break;
        }
        let mut m = lo.div_ceil(p) * p;
        while m <= hi {
            let i = (m - lo) as usize;
            let r = &mut rem[i];
            let mut e = 0u32;
            while (*r).is_multiple_of(p) {
                *r /= p;
                e += 1;
            }
            chunk[i] = prime_power(chunk[i], p, e).ok_or_else(|| {
                Error::Overflow(format!("value at n = {m} exceeds storage width"))
            })?;
            m += p;
        }
    }
    // What is left is 1 or a single prime above sqrt(hi).
    for (i, &r) in rem.iter().enumerate() {
        if r > 1 {
            chunk[i] = prime_power(chunk[i], r, 1).ok_or_else(|| {
                Error::Overflow(format!(
                    "value at n = {} exceeds storage width",
                    lo + i as u64
                ))
            })?;
        }
    }
    Ok(())
}

/// 1 at primes, 0 elsewhere.
pub fn prime_flags(n_max: usize, cfg: &SieveConfig) -> Result<Vec<u8>> {
    let base = base_primes((n_max as u64).isqrt());
    let mut out = vec![1u8; n_max];
    let seg = cfg.segment_size.max(1);
    in_pool(cfg, || {
        out.par_chunks_mut(seg).enumerate().for_each(|(s, chunk)| {
            let lo = (s * seg + 1) as u64;
            let hi = lo + chunk.len() as u64 - 1;
            if lo == 1 {
                chunk[0] = 0;
            }
            for &p in &base {
                if p * p > hi {
                    break;
                }
                let mut m = (p * p).max(lo.div_ceil(p) * p);
                while m <= hi {
                    chunk[(m - lo) as usize] = 0;
                    m += p;
                }
            }
        })
    })?;
    Ok(out)
}
