//! Acceptance criteria at pinned tolerances. Prints one line per criterion and
//! exits nonzero if any fails.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use absum_core::asymptotics::ClaimReport;
use absum_core::claims::{
    run_claim, scan_mobius_bound, total_variation, Runner, MOBIUS_BOUND_CONSTANT,
};
use absum_core::sieves::{sieve_mobius, sieve_prime_indicator, sieve_sigma, sieve_tau};
use absum_core::summation::{
    abel_decompose, abel_identity_error, partial_sums, prime_restricted_sums, weighted_sums,
};
use absum_core::{BigRational, CheckpointGrid, FunctionSpec, SieveConfig};
use num_traits::{ToPrimitive, Zero};

type Outcome = Result<String, String>;

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn cfg() -> SieveConfig {
    SieveConfig::default()
}

fn budget(start: Instant, limit: Duration, detail: String) -> Outcome {
    let took = start.elapsed();
    ensure(
        took <= limit,
        format!(
            "{detail}; {:.2}s of {}s",
            took.as_secs_f64(),
            limit.as_secs()
        ),
    )
}

fn abel_identity() -> Outcome {
    let start = Instant::now();
    let n_max = 1_000_000;
    let grid = CheckpointGrid::geometric(1.0, n_max as f64, 32).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for spec in ["mobius", "tau", "sigma2", "prime", "theta", "one"] {
        let t = spec
            .parse::<FunctionSpec>()
            .unwrap()
            .build(n_max, &cfg())
            .map_err(|e| e.to_string())?;
        let d = abel_decompose::<f64>(&t, &grid).map_err(|e| e.to_string())?;
        let w = weighted_sums::<f64>(&t, 1, &grid).map_err(|e| e.to_string())?;
        let err = abel_identity_error(&d, &w).map_err(|e| e.to_string())?;
        if !(err <= 1e-9) {
            return Err(format!("{spec}: relative error {err:e}"));
        }
        worst = worst.max(err);
    }
    budget(
        start,
        Duration::from_secs(30),
        format!("max relative error {worst:e} <= 1e-9"),
    )
}

fn sieve_oracles() -> Outcome {
    let n_max = 10_000;
    let mu = sieve_mobius(n_max, &cfg()).map_err(|e| e.to_string())?;
    let tau = sieve_tau(n_max, &cfg()).map_err(|e| e.to_string())?;
    let sigma = sieve_sigma(n_max, 1, &cfg()).map_err(|e| e.to_string())?;
    let prime = sieve_prime_indicator(n_max, &cfg()).map_err(|e| e.to_string())?;
    for n in 1..=n_max {
        let m = n as u64;
        let divisors = common::divisors(m);
        let expect = [
            common::mobius(m) as i128,
            divisors.len() as i128,
            divisors.iter().sum::<u64>() as i128,
            common::is_prime(m) as i128,
        ];
        let got = [
            mu.int_at(n),
            tau.int_at(n),
            sigma.int_at(n),
            prime.int_at(n),
        ]
        .map(|v| v.unwrap());
        if got != expect {
            return Err(format!("mismatch at n = {n}: {got:?} vs {expect:?}"));
        }
        let unit: i128 = divisors
            .iter()
            .map(|&d| mu.int_at(d as usize).unwrap())
            .sum();
        if unit != (n == 1) as i128 {
            return Err(format!("sum of mu over divisors of {n} is {unit}"));
        }
    }
    Ok(format!("mu, tau, sigma, prime match trial division for n <= {n_max}; divisor sums of mu are [n = 1]"))
}

fn mobius_bound() -> Outcome {
    let start = Instant::now();
    let mu = sieve_mobius(10_000_000, &cfg()).map_err(|e| e.to_string())?;
    let scan = scan_mobius_bound(&mu, MOBIUS_BOUND_CONSTANT);
    budget(
        start,
        Duration::from_secs(60),
        format!(
            "{} exceedances for x <= 1e7; max |M(x)| log^2 x / x = {:.4} at x = {}",
            scan.exceedances, scan.max_normalized, scan.max_at
        ),
    )
    .and_then(|d| ensure(scan.exceedances == 0, d))
}

fn constant(r: &ClaimReport, key: &str) -> Result<f64, String> {
    r.fitted_constants
        .get(key)
        .copied()
        .ok_or_else(|| format!("{} lacks {key}", r.claim_id))
}

fn prime_reciprocals() -> Outcome {
    let n_max = 1_000_000;
    let r = run_claim("statement1_primes", n_max, None).map_err(|e| e.to_string())?;
    let top = constant(&r, "residual_at_top")?;
    let tail: Vec<f64> = r
        .grid
        .iter()
        .zip(&r.residual)
        .filter(|(x, _)| **x >= 1e4)
        .map(|(_, v)| *v)
        .collect();
    let tv = total_variation(&tail);
    ensure(
        (top - 0.2615).abs() <= 0.02 && tv <= 0.05,
        format!("residual at 1e6 = {top:.6} (0.2615 +/- 0.02); total variation over [1e4, 1e6] = {tv:.6} <= 0.05"),
    )
}

fn divisor_count() -> Outcome {
    let r = run_claim("statement3_tau", 1_000_000, None).map_err(|e| e.to_string())?;
    let top = constant(&r, "residual_over_log_at_top")?;
    let spread = constant(&r, "top_decade_relative_spread")?;
    ensure(
        (top - 1.154).abs() <= 0.05 && spread < 0.03,
        format!(
            "residual / log x at 1e6 = {top:.6} (1.154 +/- 0.05); top-decade spread {:.3}% < 3%",
            spread * 100.0
        ),
    )
}

fn sigma_ratio() -> Outcome {
    let r = run_claim("statement2_sigma2", 1_000_000, None).map_err(|e| e.to_string())?;
    let ratio = constant(&r, "c4_over_c3")?;
    ensure(
        (ratio - 1.5).abs() <= 0.05,
        format!("c4/c3 = {ratio:.6} (1.5 +/- 0.05)"),
    )
}

fn chebyshev() -> Outcome {
    let n_max = 10_000_000;
    let grid = CheckpointGrid::new(vec![1e4, 1e5, 1e6, 1e7]).unwrap();
    let theta = FunctionSpec::Theta
        .build(n_max, &cfg())
        .map_err(|e| e.to_string())?;
    let th = partial_sums::<f64>(&theta, &grid).map_err(|e| e.to_string())?;
    drop(theta);
    let lambda = FunctionSpec::Mangoldt
        .build(n_max, &cfg())
        .map_err(|e| e.to_string())?;
    let ps = partial_sums::<f64>(&lambda, &grid).map_err(|e| e.to_string())?;
    let t: Vec<f64> = th
        .sums
        .iter()
        .zip(grid.points())
        .map(|(s, x)| s / x)
        .collect();
    let p = ps.sums.last().unwrap() / 1e7;
    let gaps: Vec<f64> = t.iter().map(|v| (v - 1.0).abs()).collect();
    let decreasing = gaps.windows(2).all(|w| w[1] < w[0]);
    let in_band = |v: f64| (0.98..=1.02).contains(&v);
    ensure(
        in_band(t[3]) && in_band(p) && decreasing,
        format!(
            "theta/x at 1e7 = {:.6}, psi/x at 1e7 = {p:.6} in [0.98, 1.02]; |theta/x - 1| at 1e4..1e7 = {:.5?} strictly decreasing",
            t[3], gaps
        ),
    )
}

fn mertens_first() -> Outcome {
    let n_max = 10_000_000;
    let grid = CheckpointGrid::geometric(1e3, n_max as f64, 32).unwrap();
    let log = FunctionSpec::Pointwise(absum_core::sieves::Pointwise::LogPower(1))
        .build(n_max, &cfg())
        .map_err(|e| e.to_string())?;
    let primes = FunctionSpec::Prime
        .build(n_max, &cfg())
        .map_err(|e| e.to_string())?;
    let s = prime_restricted_sums::<f64>(&log, &primes, 1, &grid).map_err(|e| e.to_string())?;
    let ratios: Vec<f64> = s
        .sums
        .iter()
        .zip(grid.points())
        .map(|(v, x)| v / x.ln())
        .collect();
    let resid: Vec<f64> = s
        .sums
        .iter()
        .zip(grid.points())
        .map(|(v, x)| v - x.ln())
        .collect();
    let fold = |v: &[f64]| {
        v.iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &r| {
                (a.min(r), b.max(r))
            })
    };
    let (rlo, rhi) = fold(&ratios);
    let (dlo, dhi) = fold(&resid);
    ensure(
        rlo >= 0.5 && rhi <= 1.5 && dlo >= -2.0 && dhi <= 0.0,
        format!("sum / log x in [{rlo:.4}, {rhi:.4}] within [0.5, 1.5]; sum - log x in [{dlo:.4}, {dhi:.4}] within [-2, 0]"),
    )
}

fn mobius_reciprocal() -> Outcome {
    let n_max = 1_000_000;
    let grid = CheckpointGrid::geometric(1e3, n_max as f64, 32).unwrap();
    let mu = sieve_mobius(n_max, &cfg()).map_err(|e| e.to_string())?;
    let s = weighted_sums::<f64>(&mu, 1, &grid).map_err(|e| e.to_string())?;
    let top = s.sums.last().unwrap().abs();
    let normalized: Vec<(f64, f64)> = grid
        .points()
        .iter()
        .zip(&s.sums)
        .map(|(&x, v)| (x, v.abs() * x.ln().powi(2)))
        .collect();
    // Median of each full decade [10^d, 10^(d+1)).
    let mut medians = Vec::new();
    for d in 3..6 {
        let lo = 10f64.powi(d);
        let mut bin: Vec<f64> = normalized
            .iter()
            .filter(|(x, _)| *x >= lo && *x < lo * 10.0)
            .map(|(_, v)| *v)
            .collect();
        bin.sort_by(f64::total_cmp);
        medians.push(bin[bin.len() / 2]);
    }
    let growing = medians.windows(2).all(|w| w[1] > 1.10 * w[0]);
    ensure(
        top <= 0.005 && !growing,
        format!("|sum mu(n)/n| at 1e6 = {top:.3e} <= 0.005; decade medians of |sum| log^2 x = {medians:.4?}, no sustained >10% growth"),
    )
}

fn determinism() -> Outcome {
    let n_max = 100_000;
    let json = |threads: usize| -> Result<Vec<String>, String> {
        let runner = Runner {
            sieve: SieveConfig { threads, ..cfg() },
            ..Runner::default()
        };
        Ok(runner
            .run_all(n_max, None)
            .map_err(|e| e.to_string())?
            .iter()
            .map(ClaimReport::to_json)
            .collect())
    };
    let a = json(0)?;
    let b = json(0)?;
    let one = json(1)?;
    let eight = json(8)?;
    ensure(
        a == b && one == eight && a == one,
        format!(
            "{} reports at 1e5 identical across repeat runs and 1 vs 8 threads",
            a.len()
        ),
    )
}

fn rational_oracle() -> Outcome {
    let n_max = 1000;
    let grid = CheckpointGrid::new((1..=n_max).map(|x| x as f64).collect()).unwrap();
    let mut worst = 0.0f64;
    for (name, values) in [
        (
            "mobius",
            (1..=n_max as u64).map(common::mobius).collect::<Vec<i64>>(),
        ),
        (
            "tau",
            (1..=n_max as u64).map(|n| common::tau(n) as i64).collect(),
        ),
    ] {
        let t = name
            .parse::<FunctionSpec>()
            .unwrap()
            .build(n_max, &cfg())
            .map_err(|e| e.to_string())?;
        let w = weighted_sums::<f64>(&t, 1, &grid).map_err(|e| e.to_string())?;
        let d = abel_decompose::<f64>(&t, &grid).map_err(|e| e.to_string())?;
        let mut exact = BigRational::zero();
        for (i, v) in values.iter().enumerate() {
            exact += BigRational::new((*v).into(), ((i + 1) as i64).into());
            let e = exact.to_f64().unwrap();
            for got in [w.sums[i], d.total[i]] {
                worst = worst.max((got - e).abs() / (1.0 + e.abs()));
            }
        }
    }
    ensure(worst <= 1e-12, format!("mu, tau weighted and Abel sums vs rationals for x <= 1e3: max error {worst:e} <= 1e-12"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("abel identity", abel_identity),
        ("sieve oracles", sieve_oracles),
        ("mobius bound scan", mobius_bound),
        ("prime reciprocals", prime_reciprocals),
        ("divisor count", divisor_count),
        ("sigma squared ratio", sigma_ratio),
        ("chebyshev", chebyshev),
        ("mertens first", mertens_first),
        ("mobius reciprocal", mobius_reciprocal),
        ("determinism", determinism),
        ("rational oracle", rational_oracle),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        match check() {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name}: {detail}");
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
