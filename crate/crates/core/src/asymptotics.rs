//! Asymptotic models, leading-constant fits, and finite-x envelope verdicts.
//!
//! O(g) and o(g) statements are judged on |residual|/g across the grid:
//!
//! * big-O is `consistent` when the window's max ratio is at most 3× the
//!   median of the first half, or no larger than the first half's max;
//! * little-o is `consistent` when the last-decade median ratio is below half
//!   the first-decade median;
//! * either is `violated` when decade medians grow by more than 10% per
//!   decade at every step across at least 3 decades;
//! * otherwise the verdict is `inconclusive`.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::summation::SummatorySeries;

/// Minimum number of grid points for fitting and envelope checks.
pub const MIN_POINTS: usize = 8;
/// Default fraction of the grid (largest x) inspected by big-O checks.
pub const DEFAULT_WINDOW: f64 = 0.5;

const BIG_O_MEDIAN_FACTOR: f64 = 3.0;
const GROWTH_PER_DECADE: f64 = 1.10;
const GROWTH_MIN_DECADES: usize = 3;
const LITTLE_O_DECAY: f64 = 0.5;

/// x^p · (log x)^k · (loglog x)^j.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Shape<R> {
    pub x_power: R,
    pub log_power: i32,
    pub loglog_power: u32,
}

impl<R: Real> Shape<R> {
    pub fn new(x_power: R, log_power: i32, loglog_power: u32) -> Self {
        Self {
            x_power,
            log_power,
            loglog_power,
        }
    }

    pub fn constant() -> Self {
        Self::new(R::zero(), 0, 0)
    }

    /// Smallest x at which the shape is defined and nonzero-safe.
    fn domain_floor(&self) -> R {
        if self.loglog_power > 0 {
            R::from_f64(3.0).unwrap()
        } else {
            R::one()
        }
    }

    pub fn at(&self, x: R) -> R {
        let mut v = if self.x_power == R::zero() {
            R::one()
        } else {
            x.powf(self.x_power)
        };
        if self.log_power != 0 {
            v = v * x.ln().powi(self.log_power);
        }
        if self.loglog_power != 0 {
            v = v * x.ln().ln().powi(self.loglog_power as i32);
        }
        v
    }

    /// Growth ordering as x → ∞: compares (p, k, j) lexicographically.
    pub fn dominates(&self, other: &Self) -> bool {
        (self.x_power, self.log_power, self.loglog_power).partial_cmp(&(
            other.x_power,
            other.log_power,
            other.loglog_power,
        )) == Some(std::cmp::Ordering::Greater)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Coefficient<R> {
    Known(R),
    ToFit(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticTerm<R> {
    pub coefficient: Coefficient<R>,
    pub shape: Shape<R>,
}

impl<R: Real> AsymptoticTerm<R> {
    pub fn known(coefficient: R, x_power: R, log_power: i32, loglog_power: u32) -> Self {
        Self {
            coefficient: Coefficient::Known(coefficient),
            shape: Shape::new(x_power, log_power, loglog_power),
        }
    }

    pub fn to_fit(name: &str, x_power: R, log_power: i32, loglog_power: u32) -> Self {
        Self {
            coefficient: Coefficient::ToFit(name.to_string()),
            shape: Shape::new(x_power, log_power, loglog_power),
        }
    }

    pub fn value(&self, x: R) -> Result<R> {
        match &self.coefficient {
            Coefficient::Known(c) => Ok(*c * self.shape.at(x)),
            Coefficient::ToFit(name) => {
                Err(Error::Usage(format!("coefficient `{name}` is not fitted")))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnvelopeKind {
    BigO,
    LittleO,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorEnvelope<R> {
    pub kind: EnvelopeKind,
    pub shape: Shape<R>,
}

impl<R: Real> ErrorEnvelope<R> {
    pub fn big_o(shape: Shape<R>) -> Self {
        Self {
            kind: EnvelopeKind::BigO,
            shape,
        }
    }

    pub fn little_o(shape: Shape<R>) -> Self {
        Self {
            kind: EnvelopeKind::LittleO,
            shape,
        }
    }
}

/// Main terms plus an error envelope, valid for x ≥ `x_min`.
#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticModel<R> {
    pub main_terms: Vec<AsymptoticTerm<R>>,
    pub error: ErrorEnvelope<R>,
    pub x_min: R,
}

impl<R: Real> AsymptoticModel<R> {
    /// `x_min` defaults to 3 when any shape involves loglog x, else to 1
    /// (or just above 1 when a shape divides by a power of log x).
    pub fn new(main_terms: Vec<AsymptoticTerm<R>>, error: ErrorEnvelope<R>) -> Self {
        let shapes = main_terms
            .iter()
            .map(|t| &t.shape)
            .chain(Some(&error.shape));
        let mut x_min = R::one();
        for s in shapes {
            x_min = x_min.max(s.domain_floor());
            if s.log_power < 0 && x_min <= R::one() {
                x_min = R::from_f64(2.0).unwrap();
            }
        }
        Self {
            main_terms,
            error,
            x_min,
        }
    }

    pub fn with_x_min(mut self, x_min: R) -> Result<Self> {
        let has_loglog = self
            .main_terms
            .iter()
            .map(|t| &t.shape)
            .chain(Some(&self.error.shape))
            .any(|s| s.loglog_power > 0);
        if has_loglog && x_min < R::from_f64(3.0).unwrap() {
            return Err(Error::Domain(
                "models with loglog terms need x_min >= 3".into(),
            ));
        }
        self.x_min = x_min;
        Ok(self)
    }

    pub fn to_fit_names(&self) -> Vec<&str> {
        self.main_terms
            .iter()
            .filter_map(|t| match &t.coefficient {
                Coefficient::ToFit(n) => Some(n.as_str()),
                Coefficient::Known(_) => None,
            })
            .collect()
    }

    /// Replaces the named to-fit coefficient with a value.
    pub fn resolve(mut self, name: &str, value: R) -> Result<Self> {
        let term = self
            .main_terms
            .iter_mut()
            .find(|t| matches!(&t.coefficient, Coefficient::ToFit(n) if n == name))
            .ok_or_else(|| Error::Usage(format!("no coefficient `{name}` to resolve")))?;
        term.coefficient = Coefficient::Known(value);
        Ok(self)
    }

    fn check_domain(&self, x: R) -> Result<()> {
        if !(x >= self.x_min) {
            return Err(Error::Domain(format!(
                "x = {:?} is below the model's x_min = {:?}",
                x, self.x_min
            )));
        }
        Ok(())
    }
}

/// Σ of the main terms at x.
pub fn eval_model<R: Real>(model: &AsymptoticModel<R>, x: R) -> Result<R> {
    if let Some(name) = model.to_fit_names().first() {
        return Err(Error::Usage(format!("coefficient `{name}` is not fitted")));
    }
    model.check_domain(x)?;
    model
        .main_terms
        .iter()
        .try_fold(R::zero(), |acc, t| Ok(acc + t.value(x)?))
}

pub(crate) fn median<R: Real>(values: &[R]) -> R {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / R::from_f64(2.0).unwrap()
    }
}

/// Fits the single to-fit coefficient: the median over the top half of the
/// grid of (empirical − fixed terms) / shape.
pub fn fit_leading<R: Real>(
    model: &AsymptoticModel<R>,
    empirical: &SummatorySeries<R>,
) -> Result<R> {
    let fit: Vec<&AsymptoticTerm<R>> = model
        .main_terms
        .iter()
        .filter(|t| matches!(t.coefficient, Coefficient::ToFit(_)))
        .collect();
    if fit.len() != 1 {
        return Err(Error::Usage(format!(
            "fit_leading needs exactly one to-fit coefficient, model has {}",
            fit.len()
        )));
    }
    let target = fit[0];
    let fixed: Vec<&AsymptoticTerm<R>> = model
        .main_terms
        .iter()
        .filter(|t| matches!(t.coefficient, Coefficient::Known(_)))
        .collect();
    if let Some(t) = fixed.iter().find(|t| !target.shape.dominates(&t.shape)) {
        return Err(Error::Usage(format!(
            "to-fit term {:?} does not dominate fixed term {:?}",
            target.shape, t.shape
        )));
    }
    let xs = empirical.grid.points();
    if xs.len() < MIN_POINTS || empirical.sums.len() != xs.len() {
        return Err(Error::Usage(format!(
            "fitting needs at least {MIN_POINTS} aligned grid points, got {}",
            xs.len()
        )));
    }
    let half = xs.len() / 2;
    let ratios = xs[half..]
        .iter()
        .zip(&empirical.sums[half..])
        .map(|(&x, &y)| {
            let x = R::from_f64(x).unwrap();
            model.check_domain(x)?;
            let mut rest = y;
            for t in &fixed {
                rest = rest - t.value(x)?;
            }
            Ok(rest / target.shape.at(x))
        })
        .collect::<Result<Vec<R>>>()?;
    Ok(median(&ratios))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualPoint<R> {
    pub x: R,
    pub residual: R,
    pub ratio: R,
}

/// Residuals of `ys` against the model's main terms at `xs`.
pub fn residuals<R: Real>(
    xs: &[R],
    ys: &[R],
    model: &AsymptoticModel<R>,
) -> Result<Vec<ResidualPoint<R>>> {
    if xs.len() != ys.len() {
        return Err(Error::Shape(format!(
            "{} grid points but {} empirical values",
            xs.len(),
            ys.len()
        )));
    }
    xs.iter()
        .zip(ys)
        .map(|(&x, &y)| {
            let residual = y - eval_model(model, x)?;
            Ok(ResidualPoint {
                x,
                residual,
                ratio: residual.abs() / model.error.shape.at(x),
            })
        })
        .collect()
}

pub fn residual_series<R: Real>(
    empirical: &SummatorySeries<R>,
    model: &AsymptoticModel<R>,
) -> Result<Vec<ResidualPoint<R>>> {
    let xs: Vec<R> = empirical
        .grid
        .points()
        .iter()
        .map(|&x| R::from_f64(x).unwrap())
        .collect();
    residuals(&xs, &empirical.sums, model)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Consistent,
    Violated,
    Inconclusive,
}

impl Verdict {
    /// Violated beats inconclusive beats consistent.
    pub fn and(self, other: Verdict) -> Verdict {
        use Verdict::*;
        match (self, other) {
            (Violated, _) | (_, Violated) => Violated,
            (Inconclusive, _) | (_, Inconclusive) => Inconclusive,
            _ => Consistent,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Consistent => "consistent",
            Verdict::Violated => "violated",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

/// Median ratio per decade, decades counted from the first point.
/// Points beyond the last whole decade join the last bin.
fn decade_medians<R: Real>(points: &[ResidualPoint<R>]) -> Vec<R> {
    let x0 = points[0].x;
    let span = (points[points.len() - 1].x / x0).log10();
    let decades = ToPrimitive::to_f64(&span).unwrap().floor().max(1.0) as usize;
    let mut bins: Vec<Vec<R>> = vec![Vec::new(); decades];
    for p in points {
        let d = ToPrimitive::to_f64(&(p.x / x0).log10())
            .unwrap()
            .floor()
            .max(0.0) as usize;
        bins[d.min(decades - 1)].push(p.ratio);
    }
    bins.iter()
        .filter(|b| !b.is_empty())
        .map(|b| median(b))
        .collect()
}

fn grows_monotonically<R: Real>(points: &[ResidualPoint<R>]) -> bool {
    let meds = decade_medians(points);
    if meds.len() < GROWTH_MIN_DECADES {
        return false;
    }
    let growth = R::from_f64(GROWTH_PER_DECADE).unwrap();
    meds.windows(2).all(|w| w[1] > w[0] * growth)
}

/// Judges residual ratios against an O(·) or o(·) envelope. `window` is the
/// fraction of points, largest x first, that a big-O check inspects.
pub fn check_envelope<R: Real>(
    points: &[ResidualPoint<R>],
    envelope: &ErrorEnvelope<R>,
    window: R,
) -> Result<Verdict> {
    if points.len() < MIN_POINTS {
        return Err(Error::Usage(format!(
            "envelope check needs at least {MIN_POINTS} points, got {}",
            points.len()
        )));
    }
    if !(window > R::zero() && window <= R::one()) {
        return Err(Error::Usage(format!(
            "window must lie in (0, 1], got {window:?}"
        )));
    }
    if points.windows(2).any(|w| !(w[0].x < w[1].x)) {
        return Err(Error::Usage(
            "residual points must be in increasing x".into(),
        ));
    }
    let q = points.len();
    let ratios: Vec<R> = points.iter().map(|p| p.ratio).collect();

    let consistent = match envelope.kind {
        EnvelopeKind::BigO => {
            let take = (window * R::from_usize(q).unwrap())
                .ceil()
                .to_usize()
                .unwrap()
                .clamp(1, q);
            let window_max = ratios[q - take..].iter().copied().fold(R::zero(), R::max);
            let first = &ratios[..q / 2];
            let first_max = first.iter().copied().fold(R::zero(), R::max);
            let factor = R::from_f64(BIG_O_MEDIAN_FACTOR).unwrap();
            window_max <= factor * median(first) || window_max <= first_max
        }
        EnvelopeKind::LittleO => {
            let x_first = points[0].x;
            let x_last = points[q - 1].x;
            let ten = R::from_f64(10.0).unwrap();
            let head: Vec<R> = points
                .iter()
                .filter(|p| p.x <= x_first * ten)
                .map(|p| p.ratio)
                .collect();
            let tail: Vec<R> = points
                .iter()
                .filter(|p| p.x >= x_last / ten)
                .map(|p| p.ratio)
                .collect();
            let last = median(&tail);
            last == R::zero() || last < R::from_f64(LITTLE_O_DECAY).unwrap() * median(&head)
        }
    };
    Ok(if consistent {
        Verdict::Consistent
    } else if grows_monotonically(points) {
        Verdict::Violated
    } else {
        Verdict::Inconclusive
    })
}

/// Outcome of one claim, with every sequence in grid order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClaimReport {
    pub claim_id: String,
    pub n_max: usize,
    pub grid: Vec<f64>,
    pub empirical: Vec<f64>,
    pub model_value: Vec<f64>,
    pub residual: Vec<f64>,
    pub ratio: Vec<f64>,
    pub fitted_constants: BTreeMap<String, f64>,
    pub verdict: Verdict,
    pub notes: String,
}

impl ClaimReport {
    /// A report carrying only an identifier, a verdict and notes.
    pub fn empty(claim_id: &str, n_max: usize, verdict: Verdict, notes: String) -> Self {
        Self {
            claim_id: claim_id.to_string(),
            n_max,
            grid: Vec::new(),
            empirical: Vec::new(),
            model_value: Vec::new(),
            residual: Vec::new(),
            ratio: Vec::new(),
            fitted_constants: BTreeMap::new(),
            verdict,
            notes,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports hold finite numbers")
    }
}
