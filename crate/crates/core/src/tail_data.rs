//! Order statistics and threshold excesses.

use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::error::{Result, TailError};

/// Ascending order statistics of a strictly positive sample (`n >= 2`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SortedSample {
    values: Vec<f64>,
}

impl SortedSample {
    /// Sorts `values` and validates them. Input order is irrelevant.
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(TailError::TooFewObservations(values.len()));
        }
        if let Some(i) = values.iter().position(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(TailError::NonPositive { line: i + 1 });
        }
        values.sort_by(f64::total_cmp);
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    /// The `(k+1)`-th largest observation `X_{n-k,n}`.
    pub fn threshold(&self, k: usize) -> Result<f64> {
        self.check_k(k)?;
        Ok(self.values[self.n() - k - 1])
    }

    fn check_k(&self, k: usize) -> Result<()> {
        if k == 0 || k >= self.n() {
            return Err(TailError::KOutOfRange {
                k,
                min: 1,
                max: self.n() - 1,
            });
        }
        Ok(())
    }

    /// The `k` relative excesses `Y_j = X_{n-j+1,n} / X_{n-k,n}`, largest first.
    pub fn excesses(&self, k: usize) -> Result<ExcessSet> {
        let threshold = self.threshold(k)?;
        let n = self.n();
        let y = (1..=k).map(|j| self.values[n - j] / threshold).collect();
        Ok(ExcessSet { y, threshold })
    }

    /// Multiplies every observation by `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(TailError::invalid(format!("scale factor must be positive, got {c}")));
        }
        Ok(Self {
            values: self.values.iter().map(|v| v * c).collect(),
        })
    }
}

/// Relative excesses over the `(k+1)`-th largest observation.
///
/// `y` is non-increasing and every entry is at least 1. Ties at the
/// threshold give `y = 1` exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExcessSet {
    y: Vec<f64>,
    threshold: f64,
}

impl ExcessSet {
    /// Builds an excess set directly from ratios (threshold recorded as 1).
    pub fn from_ratios(mut y: Vec<f64>) -> Result<Self> {
        if y.is_empty() {
            return Err(TailError::invalid("excess set must be non-empty"));
        }
        if let Some(v) = y.iter().find(|v| !(v.is_finite() && **v >= 1.0)) {
            return Err(TailError::invalid(format!("excess {v} is below 1")));
        }
        y.sort_by(|a, b| b.total_cmp(a));
        Ok(Self { y, threshold: 1.0 })
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn k(&self) -> usize {
        self.y.len()
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }
}

/// Reads a sample from CSV or plain text, one value per record.
///
/// `column` selects the field (default 0). A first line that does not parse
/// as a number is treated as a header. Nonpositive values are rejected,
/// never filtered.
pub fn load_sample<R: Read>(source: R, column: Option<usize>) -> Result<SortedSample> {
    let column = column.unwrap_or(0);
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(source);

    let mut values = Vec::new();
    let mut first = true;
    for record in reader.records() {
        let record = record.map_err(|e| TailError::Parse {
            line: e.position().map_or(0, |p| p.line() as usize),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.iter().all(str::is_empty) {
            continue;
        }
        let field = record.get(column).ok_or_else(|| TailError::Parse {
            line,
            message: format!("missing column {column}"),
        })?;
        match field.parse::<f64>() {
            Ok(v) if v.is_finite() => {
                if v <= 0.0 {
                    return Err(TailError::NonPositive { line });
                }
                values.push(v);
            }
            Ok(_) | Err(_) if first => {}
            _ => {
                return Err(TailError::Parse {
                    line,
                    message: format!("cannot parse {field:?} as a finite number"),
                })
            }
        }
        first = false;
    }
    SortedSample::new(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn load_sorts_values() {
        let s = load_sample("3\n1\n2\n".as_bytes(), None).unwrap();
        assert_eq!(s.values(), &[1.0, 2.0, 3.0]);
    }

    #[test]
    fn load_selects_column() {
        let s = load_sample("1,a\n2,b".as_bytes(), Some(0)).unwrap();
        assert_eq!(s.values(), &[1.0, 2.0]);
        let s = load_sample("a,1.5\nb,0.5".as_bytes(), Some(1)).unwrap();
        assert_eq!(s.values(), &[0.5, 1.5]);
    }

    #[test]
    fn load_rejects_nonpositive() {
        let err = load_sample("-1\n2\n".as_bytes(), None).unwrap_err();
        assert_eq!(err, TailError::NonPositive { line: 1 });
        assert_eq!(err.to_string(), "nonpositive value at line 1");
        let err = load_sample("value\n2\n0\n".as_bytes(), None).unwrap_err();
        assert_eq!(err, TailError::NonPositive { line: 3 });
    }

    #[test]
    fn load_detects_header() {
        let s = load_sample("loss\n0.2\n0.1\n".as_bytes(), None).unwrap();
        assert_eq!(s.values(), &[0.1, 0.2]);
    }

    #[test]
    fn load_reports_parse_line() {
        let err = load_sample("1\n2\nfoo\n".as_bytes(), None).unwrap_err();
        assert!(matches!(err, TailError::Parse { line: 3, .. }), "{err:?}");
    }

    #[test]
    fn load_needs_two_values() {
        let err = load_sample("5\n".as_bytes(), None).unwrap_err();
        assert_eq!(err, TailError::TooFewObservations(1));
    }

    #[test]
    fn excess_examples() {
        let s = SortedSample::new(vec![1.0, 2.0, 4.0, 8.0]).unwrap();
        let e = s.excesses(3).unwrap();
        assert_eq!(e.y(), &[8.0, 4.0, 2.0]);
        assert_eq!(e.threshold(), 1.0);
        let e = s.excesses(1).unwrap();
        assert_eq!(e.y(), &[2.0]);
        assert_eq!(e.threshold(), 4.0);

        let ties = SortedSample::new(vec![5.0, 5.0, 5.0]).unwrap();
        let e = ties.excesses(2).unwrap();
        assert_eq!(e.y(), &[1.0, 1.0]);
        assert_eq!(e.threshold(), 5.0);
    }

    #[test]
    fn excess_k_range() {
        let s = SortedSample::new(vec![1.0, 2.0, 4.0]).unwrap();
        assert!(s.excesses(0).is_err());
        assert!(s.excesses(3).is_err());
        assert!(s.excesses(2).is_ok());
    }

    fn sample_strategy() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(1e-3f64..1e3, 2..60)
    }

    proptest! {
        #[test]
        fn excesses_are_at_least_one_and_non_increasing(v in sample_strategy(), frac in 0.0f64..1.0) {
            let s = SortedSample::new(v).unwrap();
            let k = 1 + ((s.n() - 2) as f64 * frac) as usize;
            let e = s.excesses(k).unwrap();
            prop_assert_eq!(e.k(), k);
            prop_assert!(e.y().iter().all(|&y| y >= 1.0));
            prop_assert!(e.y().windows(2).all(|w| w[0] >= w[1]));
        }

        #[test]
        fn excesses_are_scale_invariant(v in sample_strategy(), c in 1e-2f64..1e2, frac in 0.0f64..1.0) {
            let s = SortedSample::new(v).unwrap();
            let k = 1 + ((s.n() - 2) as f64 * frac) as usize;
            let a = s.excesses(k).unwrap();
            let b = s.scaled(c).unwrap().excesses(k).unwrap();
            for (x, y) in a.y().iter().zip(b.y()) {
                prop_assert!((x - y).abs() <= 1e-12 * x);
            }
        }
    }
}
