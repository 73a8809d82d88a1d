//! Exact tables of arithmetic functions, built by segmented sieves.

mod segmented;
mod table;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};

pub use segmented::base_primes;
pub(crate) use segmented::in_pool;
pub use table::{FunctionTable, ValueKind, Values};

/// Sieve sizing and parallelism.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SieveConfig {
    /// Entries per segment.
    pub segment_size: usize,
    /// Worker threads; 0 uses the global rayon pool.
    pub threads: usize,
    /// Upper bound on table storage in bytes.
    pub memory_budget: usize,
}

impl Default for SieveConfig {
    fn default() -> Self {
        Self {
            segment_size: 1 << 20,
            threads: 0,
            memory_budget: 4 << 30,
        }
    }
}

impl SieveConfig {
    fn check(&self, n_max: usize, min: usize, width: usize) -> Result<()> {
        if n_max < min {
            return Err(Error::Sizing(format!(
                "n_max must be at least {min}, got {n_max}"
            )));
        }
        let bytes = n_max.saturating_mul(width);
        if bytes > self.memory_budget {
            return Err(Error::Sizing(format!(
                "table of {n_max} entries needs {bytes} bytes, budget is {}",
                self.memory_budget
            )));
        }
        Ok(())
    }
}

/// μ(n) as signed bytes.
pub fn sieve_mobius(n_max: usize, cfg: &SieveConfig) -> Result<FunctionTable> {
    cfg.check(n_max, 1, 1)?;
    let v = segmented::multiplicative(n_max, cfg, 1i8, |acc, _, e| {
        Some(if e >= 2 { 0 } else { -acc })
    })?;
    FunctionTable::new("mobius", Values::Signed8(v))
}

/// τ(n), the number of divisors.
pub fn sieve_tau(n_max: usize, cfg: &SieveConfig) -> Result<FunctionTable> {
    cfg.check(n_max, 1, 4)?;
    let v = segmented::multiplicative(n_max, cfg, 1u32, |acc, _, e| acc.checked_mul(e + 1))?;
    FunctionTable::new("tau", Values::Count(v))
}

/// σ(p^e) = 1 + p + … + p^e.
fn sigma_prime_power(p: u64, e: u32) -> Option<u64> {
    let mut term = 1u64;
    let mut sum = 1u64;
    for _ in 0..e {
        term = term.checked_mul(p)?;
        sum = sum.checked_add(term)?;
    }
    Some(sum)
}

/// σ(n)^power for power 1 or 2. Overflow of 64 bits is an error.
pub fn sieve_sigma(n_max: usize, power: u32, cfg: &SieveConfig) -> Result<FunctionTable> {
    if !(1..=2).contains(&power) {
        return Err(Error::Usage(format!(
            "sigma power must be 1 or 2, got {power}"
        )));
    }
    cfg.check(n_max, 1, 8)?;
    let mut v = segmented::multiplicative(n_max, cfg, 1u64, |acc, p, e| {
        acc.checked_mul(sigma_prime_power(p, e)?)
    })?;
    if power == 2 {
        in_pool(cfg, || {
            v.par_iter_mut().enumerate().try_for_each(|(i, s)| {
                *s = s.checked_mul(*s).ok_or_else(|| {
                    Error::Overflow(format!("sigma(n)^2 at n = {} exceeds 64 bits", i + 1))
                })?;
                Ok::<_, Error>(())
            })
        })??;
    }
    let name = if power == 1 { "sigma" } else { "sigma2" };
    FunctionTable::new(name, Values::Wide(v))
}

pub fn sieve_prime_indicator(n_max: usize, cfg: &SieveConfig) -> Result<FunctionTable> {
    cfg.check(n_max, 2, 1)?;
    FunctionTable::new("prime", Values::Flag(segmented::prime_flags(n_max, cfg)?))
}

fn log_at_primes(flags: &[u8], cfg: &SieveConfig) -> Result<Vec<f64>> {
    in_pool(cfg, || {
        flags
            .par_iter()
            .enumerate()
            .map(|(i, &f)| if f != 0 { ((i + 1) as f64).ln() } else { 0.0 })
            .collect()
    })
}

/// log p at primes p, 0 elsewhere; its partial sums are θ(x).
pub fn table_theta_terms(n_max: usize, cfg: &SieveConfig) -> Result<FunctionTable> {
    cfg.check(n_max, 2, 9)?;
    let flags = segmented::prime_flags(n_max, cfg)?;
    FunctionTable::new("theta", Values::Real(log_at_primes(&flags, cfg)?))
}

/// von Mangoldt Λ(n): log p when n = p^k, 0 elsewhere; partial sums are ψ(x).
pub fn table_mangoldt(n_max: usize, cfg: &SieveConfig) -> Result<FunctionTable> {
    cfg.check(n_max, 2, 9)?;
    let flags = segmented::prime_flags(n_max, cfg)?;
    let mut v = log_at_primes(&flags, cfg)?;
    let n = n_max as u64;
    for p in base_primes(n.isqrt()) {
        let lp = (p as f64).ln();
        let mut pk = p * p;
        while pk <= n {
            v[(pk - 1) as usize] = lp;
            match pk.checked_mul(p) {
                Some(next) => pk = next,
                None => break,
            }
        }
    }
    FunctionTable::new("mangoldt", Values::Real(v))
}

/// Elementary functions of n evaluated in double precision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pointwise {
    Constant,
    /// (log n)^k
    LogPower(u32),
    /// n^m
    Power(u32),
}

pub fn table_pointwise(shape: Pointwise, n_max: usize, cfg: &SieveConfig) -> Result<FunctionTable> {
    cfg.check(n_max, 1, 8)?;
    let name = match shape {
        Pointwise::LogPower(0) | Pointwise::Power(0) => {
            return Err(Error::Usage("pointwise exponent must be at least 1".into()))
        }
        Pointwise::Constant => "one".to_string(),
        Pointwise::LogPower(k) => format!("log{k}"),
        Pointwise::Power(m) => format!("pow{m}"),
    };
    let v: Vec<f64> = in_pool(cfg, || {
        (1..=n_max)
            .into_par_iter()
            .map(|n| {
                let x = n as f64;
                match shape {
                    Pointwise::Constant => 1.0,
                    Pointwise::LogPower(k) => x.ln().powi(k as i32),
                    Pointwise::Power(m) => x.powi(m as i32),
                }
            })
            .collect()
    })?;
    FunctionTable::new(name, Values::Real(v))
}

/// A named recipe for one of the supported tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FunctionSpec {
    Mobius,
    Tau,
    Sigma,
    Sigma2,
    Prime,
    Theta,
    Mangoldt,
    Pointwise(Pointwise),
}

impl FunctionSpec {
    pub const ONE: FunctionSpec = FunctionSpec::Pointwise(Pointwise::Constant);

    pub fn build(self, n_max: usize, cfg: &SieveConfig) -> Result<FunctionTable> {
        match self {
            FunctionSpec::Mobius => sieve_mobius(n_max, cfg),
            FunctionSpec::Tau => sieve_tau(n_max, cfg),
            FunctionSpec::Sigma => sieve_sigma(n_max, 1, cfg),
            FunctionSpec::Sigma2 => sieve_sigma(n_max, 2, cfg),
            FunctionSpec::Prime => sieve_prime_indicator(n_max, cfg),
            FunctionSpec::Theta => table_theta_terms(n_max, cfg),
            FunctionSpec::Mangoldt => table_mangoldt(n_max, cfg),
            FunctionSpec::Pointwise(shape) => table_pointwise(shape, n_max, cfg),
        }
    }
}

impl fmt::Display for FunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctionSpec::Mobius => f.write_str("mobius"),
            FunctionSpec::Tau => f.write_str("tau"),
            FunctionSpec::Sigma => f.write_str("sigma"),
            FunctionSpec::Sigma2 => f.write_str("sigma2"),
            FunctionSpec::Prime => f.write_str("prime"),
            FunctionSpec::Theta => f.write_str("theta"),
            FunctionSpec::Mangoldt => f.write_str("mangoldt"),
            FunctionSpec::Pointwise(Pointwise::Constant) => f.write_str("one"),
            FunctionSpec::Pointwise(Pointwise::LogPower(k)) => write!(f, "log{k}"),
            FunctionSpec::Pointwise(Pointwise::Power(m)) => write!(f, "pow{m}"),
        }
    }
}

impl FromStr for FunctionSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let unknown = || Error::UnknownFunction(s.to_string());
        let exponent = |rest: &str| -> Result<u32> {
            if rest.is_empty() {
                return Ok(1);
            }
            match rest.parse::<u32>() {
                Ok(k) if k >= 1 => Ok(k),
                _ => Err(unknown()),
            }
        };
        Ok(match s {
            "mobius" | "mu" => FunctionSpec::Mobius,
            "tau" => FunctionSpec::Tau,
            "sigma" => FunctionSpec::Sigma,
            "sigma2" => FunctionSpec::Sigma2,
            "prime" => FunctionSpec::Prime,
            "theta" => FunctionSpec::Theta,
            "mangoldt" | "lambda" => FunctionSpec::Mangoldt,
            "one" | "constant" => FunctionSpec::ONE,
            _ => {
                if let Some(rest) = s.strip_prefix("log") {
                    FunctionSpec::Pointwise(Pointwise::LogPower(exponent(rest)?))
                } else if let Some(rest) = s.strip_prefix("pow") {
                    FunctionSpec::Pointwise(Pointwise::Power(exponent(rest)?))
                } else {
                    return Err(unknown());
                }
            }
        })
    }
}
