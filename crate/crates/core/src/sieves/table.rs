use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Storage for table entries. Integer tables keep the narrowest exact width.
#[derive(Debug, Clone, PartialEq)]
pub enum Values {
    /// Möbius values.
    Signed8(Vec<i8>),
    /// 0/1 indicators.
    Flag(Vec<u8>),
    /// Divisor counts.
    Count(Vec<u32>),
    /// Divisor sums and their squares.
    Wide(Vec<u64>),
    Real(Vec<f64>),
}

impl Values {
    pub fn len(&self) -> usize {
        match self {
            Values::Signed8(v) => v.len(),
            Values::Flag(v) => v.len(),
            Values::Count(v) => v.len(),
            Values::Wide(v) => v.len(),
            Values::Real(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn kind(&self) -> ValueKind {
        match self {
            Values::Real(_) => ValueKind::Real,
            _ => ValueKind::Integer,
        }
    }

    /// Bytes per stored entry.
    pub fn width(&self) -> usize {
        match self {
            Values::Signed8(_) | Values::Flag(_) => 1,
            Values::Count(_) => 4,
            Values::Wide(_) | Values::Real(_) => 8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValueKind {
    Integer,
    Real,
}

/// Values of an arithmetic function f(n) for 1 ≤ n ≤ n_max.
///
/// Immutable once built; index with the natural argument `n`, not `n - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionTable {
    name: String,
    values: Values,
}

impl FunctionTable {
    pub fn new(name: impl Into<String>, values: Values) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Sizing("table must hold at least one value".into()));
        }
        if let Values::Real(v) = &values {
            if let Some(n) = v.iter().position(|x| !x.is_finite()) {
                return Err(Error::Domain(format!("non-finite value at n = {}", n + 1)));
            }
        }
        Ok(Self {
            name: name.into(),
            values,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n_max(&self) -> usize {
        self.values.len()
    }

    pub fn kind(&self) -> ValueKind {
        self.values.kind()
    }

    pub fn values(&self) -> &Values {
        &self.values
    }

    /// Exact value at `n` for integer tables, `None` for real tables.
    ///
    /// Panics if `n` is outside `1..=n_max`.
    #[inline]
    pub fn int_at(&self, n: usize) -> Option<i128> {
        let i = n - 1;
        match &self.values {
            Values::Signed8(v) => Some(v[i] as i128),
            Values::Flag(v) => Some(v[i] as i128),
            Values::Count(v) => Some(v[i] as i128),
            Values::Wide(v) => Some(v[i] as i128),
            Values::Real(_) => None,
        }
    }

    /// Value at `n` as a double.
    #[inline]
    pub fn real_at(&self, n: usize) -> f64 {
        match &self.values {
            Values::Real(v) => v[n - 1],
            _ => self.int_at(n).unwrap() as f64,
        }
    }

    /// Value at `n` converted into `S`, exactly when `S` can hold it.
    #[inline]
    pub fn scalar_at<S: Scalar>(&self, n: usize) -> S {
        match &self.values {
            Values::Real(v) => S::from_real(v[n - 1]),
            _ => S::from_int(self.int_at(n).unwrap()),
        }
    }

    /// True when the entry at `n` is nonzero.
    #[inline]
    pub fn is_set(&self, n: usize) -> bool {
        let i = n - 1;
        match &self.values {
            Values::Signed8(v) => v[i] != 0,
            Values::Flag(v) => v[i] != 0,
            Values::Count(v) => v[i] != 0,
            Values::Wide(v) => v[i] != 0,
            Values::Real(v) => v[i] != 0.0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_empty_and_non_finite() {
        assert!(matches!(
            FunctionTable::new("x", Values::Flag(vec![])),
            Err(Error::Sizing(_))
        ));
        assert!(matches!(
            FunctionTable::new("x", Values::Real(vec![1.0, f64::NAN])),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn wide_values_round_trip_exactly() {
        let big = (1u64 << 62) + 1;
        let t = FunctionTable::new("w", Values::Wide(vec![1, big])).unwrap();
        assert_eq!(t.int_at(2), Some(big as i128));
        assert_eq!(t.n_max(), 2);
        assert_eq!(t.kind(), ValueKind::Integer);
    }
}
