//! Summatory functions and the exact Abel decomposition for the weight 1/x.
//!
//! All sums run over ascending n in a single pass. Integer tables with no
//! weight accumulate exactly in `i128`; everything else uses the scalar's
//! accumulator (compensated for floats, exact for rationals).

use std::io::Write;

use crate::error::{Error, Result};
use crate::scalar::{Accumulator, Scalar};
use crate::sieves::FunctionTable;

/// Strictly increasing evaluation points x, each ≥ 1.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckpointGrid {
    points: Vec<f64>,
}

impl CheckpointGrid {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Usage("checkpoint grid is empty".into()));
        }
        for (i, &x) in points.iter().enumerate() {
            if !x.is_finite() || x < 1.0 {
                return Err(Error::Usage(format!(
                    "checkpoint {x} must be finite and >= 1"
                )));
            }
            if i > 0 && points[i - 1] >= x {
                return Err(Error::Usage(format!(
                    "checkpoints must be strictly increasing ({} then {x})",
                    points[i - 1]
                )));
            }
        }
        Ok(Self { points })
    }

    /// `count` points x_min·r^i rounded to integers and deduplicated, with the
    /// last point at `x_max`.
    pub fn geometric(x_min: f64, x_max: f64, count: usize) -> Result<Self> {
        if count == 0 || !(x_min >= 1.0) || !x_max.is_finite() || x_max < x_min {
            return Err(Error::Usage(format!(
                "geometric grid needs 1 <= x_min <= x_max and count >= 1 (got {x_min}, {x_max}, {count})"
            )));
        }
        let mut points: Vec<f64> = if count == 1 {
            vec![x_max.round()]
        } else {
            let ratio = (x_max / x_min).powf(1.0 / (count - 1) as f64);
            (0..count)
                .map(|i| {
                    if i == count - 1 {
                        x_max.round()
                    } else {
                        (x_min * ratio.powi(i as i32)).round()
                    }
                })
                .collect()
        };
        points.dedup();
        Self::new(points)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn last(&self) -> f64 {
        *self.points.last().unwrap()
    }

    fn check_within(&self, n_max: usize) -> Result<()> {
        let last = self.last();
        if last >= (n_max + 1) as f64 {
            return Err(Error::Range { x: last, n_max });
        }
        Ok(())
    }

    /// ⌊x⌋ for every point.
    fn floors(&self) -> Vec<usize> {
        self.points.iter().map(|x| x.floor() as usize).collect()
    }
}

/// Σ_{n≤x} aₙ/nᵏ sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SummatorySeries<S> {
    pub source: String,
    pub weight: u32,
    pub grid: CheckpointGrid,
    pub sums: Vec<S>,
    /// Exact integer partial sums, present when the weight is 0 and the
    /// source table is integer-valued.
    pub exact: Option<Vec<i128>>,
}

/// Boundary term A(x)/x and the step-function integral ∫₁ˣ A(t)/t² dt.
#[derive(Debug, Clone, PartialEq)]
pub struct AbelDecomposition<S> {
    pub grid: CheckpointGrid,
    pub boundary: Vec<S>,
    pub integral: Vec<S>,
    pub total: Vec<S>,
}

fn overflow(n: usize) -> Error {
    Error::Overflow(format!("128-bit accumulator overflow at n = {n}"))
}

/// The shared single pass: Σ over n ≤ x of mask(n)·aₙ/nᵏ.
fn sweep<S: Scalar>(
    table: &FunctionTable,
    mask: Option<&FunctionTable>,
    k: u32,
    grid: &CheckpointGrid,
) -> Result<SummatorySeries<S>> {
    grid.check_within(table.n_max())?;
    let floors = grid.floors();
    let mut sums = Vec::with_capacity(floors.len());
    let included = |n: usize| mask.is_none_or(|m| m.is_set(n));
    let mut at = 0;

    let exact = if k == 0 && table.int_at(1).is_some() {
        let mut exact = Vec::with_capacity(floors.len());
        let mut acc: i128 = 0;
        // floors are non-decreasing; n = 0 never occurs since x ≥ 1.
        for n in 1..=*floors.last().unwrap() {
            if included(n) {
                acc = acc
                    .checked_add(table.int_at(n).unwrap())
                    .ok_or_else(|| overflow(n))?;
            }
            while at < floors.len() && floors[at] == n {
                exact.push(acc);
                sums.push(S::from_int(acc));
                at += 1;
            }
        }
        Some(exact)
    } else {
        let mut acc = S::Sum::default();
        for n in 1..=*floors.last().unwrap() {
            if included(n) {
                let v: S = table.scalar_at(n);
                if k == 0 {
                    acc.add(v);
                } else {
                    let nk = num_traits::pow(S::from_int(n as i128), k as usize);
                    acc.add(v / nk);
                }
            }
            while at < floors.len() && floors[at] == n {
                sums.push(acc.value());
                at += 1;
            }
        }
        None
    };

    Ok(SummatorySeries {
        source: table.name().to_string(),
        weight: k,
        grid: grid.clone(),
        sums,
        exact,
    })
}

/// A(x) = Σ_{n≤x} aₙ at every checkpoint.
pub fn partial_sums<S: Scalar>(
    table: &FunctionTable,
    grid: &CheckpointGrid,
) -> Result<SummatorySeries<S>> {
    sweep(table, None, 0, grid)
}

/// Σ_{n≤x} aₙ/nᵏ for k ≥ 1.
pub fn weighted_sums<S: Scalar>(
    table: &FunctionTable,
    k: u32,
    grid: &CheckpointGrid,
) -> Result<SummatorySeries<S>> {
    if k == 0 {
        return Err(Error::Usage(
            "weighted sums need k >= 1; use partial_sums for k = 0".into(),
        ));
    }
    sweep(table, None, k, grid)
}

/// Σ_{p≤x} f(p)/pᵏ over primes, selected by a prime indicator table.
pub fn prime_restricted_sums<S: Scalar>(
    table: &FunctionTable,
    prime_indicator: &FunctionTable,
    k: u32,
    grid: &CheckpointGrid,
) -> Result<SummatorySeries<S>> {
    if table.n_max() != prime_indicator.n_max() {
        return Err(Error::Shape(format!(
            "table n_max {} differs from prime indicator n_max {}",
            table.n_max(),
            prime_indicator.n_max()
        )));
    }
    sweep(table, Some(prime_indicator), k, grid)
}

/// Splits Σ_{n≤x} aₙ/n into A(x)/x + ∫₁ˣ A(t)/t² dt with A the step function
/// A(t) = Σ_{n≤t} aₙ. The integral is exact over the steps:
///
/// ∫₁ˣ A(t)/t² dt = Σ_{n<⌊x⌋} A(n)/(n(n+1)) + A(⌊x⌋)·(x − ⌊x⌋)/(⌊x⌋·x).
pub fn abel_decompose<S: Scalar>(
    table: &FunctionTable,
    grid: &CheckpointGrid,
) -> Result<AbelDecomposition<S>> {
    grid.check_within(table.n_max())?;
    let floors = grid.floors();
    let q = floors.len();
    let mut boundary = Vec::with_capacity(q);
    let mut integral = Vec::with_capacity(q);
    let mut total = Vec::with_capacity(q);

    let integer = table.int_at(1).is_some();
    let mut exact_prefix: i128 = 0;
    let mut real_prefix = S::Sum::default();
    let mut steps = S::Sum::default();
    let mut at = 0;

    for n in 1..=floors[q - 1] {
        let prefix: S = if integer {
            exact_prefix = exact_prefix
                .checked_add(table.int_at(n).unwrap())
                .ok_or_else(|| overflow(n))?;
            S::from_int(exact_prefix)
        } else {
            real_prefix.add(table.scalar_at(n));
            real_prefix.value()
        };
        let nn = S::from_int(n as i128);
        while at < q && floors[at] == n {
            let x = S::from_real(grid.points[at]);
            let b = prefix.clone() / x.clone();
            let tail = prefix.clone() * (x.clone() - nn.clone()) / (nn.clone() * x);
            let i = steps.value() + tail;
            total.push(b.clone() + i.clone());
            boundary.push(b);
            integral.push(i);
            at += 1;
        }
        steps.add(prefix / S::from_int(n as i128 * (n as i128 + 1)));
    }

    Ok(AbelDecomposition {
        grid: grid.clone(),
        boundary,
        integral,
        total,
    })
}

/// max_i |total_i − direct_i| / (1 + |direct_i|) between a decomposition and
/// the directly weighted k = 1 sums on the same grid.
pub fn abel_identity_error<S: Scalar>(
    decomp: &AbelDecomposition<S>,
    direct: &SummatorySeries<S>,
) -> Result<f64> {
    if decomp.grid != direct.grid || direct.weight != 1 {
        return Err(Error::Shape(
            "abel check needs k = 1 sums on the same grid".into(),
        ));
    }
    Ok(decomp
        .total
        .iter()
        .zip(&direct.sums)
        .map(|(t, s)| {
            let s = s.as_f64();
            (t.as_f64() - s).abs() / (1.0 + s.abs())
        })
        .fold(0.0, f64::max))
}

/// Formats a double with 17 significant digits, in plain notation when the
/// decimal exponent lies in -5..=20.
pub fn format_sig17(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    let sci = format!("{v:.16e}");
    let (mantissa, exp) = sci.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    if !(-5..=20).contains(&exp) {
        return sci;
    }
    let (sign, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => ("-", m),
        None => ("", mantissa),
    };
    let digits: String = mantissa.chars().filter(|c| *c != '.').collect();
    if exp < 0 {
        return format!("{sign}0.{}{digits}", "0".repeat((-exp - 1) as usize));
    }
    let split = exp as usize + 1;
    if split >= digits.len() {
        format!("{sign}{digits}{}", "0".repeat(split - digits.len()))
    } else {
        format!("{sign}{}.{}", &digits[..split], &digits[split..])
    }
}

fn format_x(x: f64) -> String {
    format!("{x}")
}

/// Writes `x,sum` rows.
pub fn write_series_csv<W: Write, S: Scalar>(mut w: W, series: &SummatorySeries<S>) -> Result<()> {
    writeln!(w, "x,sum")?;
    for (x, s) in series.grid.points().iter().zip(&series.sums) {
        writeln!(w, "{},{}", format_x(*x), format_sig17(s.as_f64()))?;
    }
    Ok(())
}

/// Writes `x,boundary,integral,total` rows.
pub fn write_abel_csv<W: Write, S: Scalar>(mut w: W, decomp: &AbelDecomposition<S>) -> Result<()> {
    writeln!(w, "x,boundary,integral,total")?;
    for (i, x) in decomp.grid.points().iter().enumerate() {
        writeln!(
            w,
            "{},{},{},{}",
            format_x(*x),
            format_sig17(decomp.boundary[i].as_f64()),
            format_sig17(decomp.integral[i].as_f64()),
            format_sig17(decomp.total[i].as_f64())
        )?;
    }
    Ok(())
}
