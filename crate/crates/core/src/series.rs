//! Series-stopping policy, certified series values and compensated summation.

use crate::error::{Error, Result};

/// Stopping policy shared by every infinite series in the crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationControl {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_terms: usize,
}

impl Default for TruncationControl {
    fn default() -> Self {
        Self {
            rel_tol: 1e-12,
            abs_tol: 1e-300,
            max_terms: 10_000,
        }
    }
}

impl TruncationControl {
    pub fn new(rel_tol: f64, abs_tol: f64, max_terms: usize) -> Result<Self> {
        if !(rel_tol > 0.0 && rel_tol.is_finite()) {
            return Err(Error::invalid("rel_tol", format!("must be positive, got {rel_tol}")));
        }
        if !(abs_tol >= 0.0 && abs_tol.is_finite()) {
            return Err(Error::invalid("abs_tol", format!("must be nonnegative, got {abs_tol}")));
        }
        if max_terms < 8 {
            return Err(Error::invalid("max_terms", format!("must be at least 8, got {max_terms}")));
        }
        Ok(Self {
            rel_tol,
            abs_tol,
            max_terms,
        })
    }

    /// True when `tail` is small enough relative to `scale`.
    pub(crate) fn accepts(&self, tail: f64, scale: f64) -> bool {
        tail <= self.rel_tol * scale.abs() + self.abs_tol
    }
}

/// A series sum together with a certified bound on the discarded tail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    pub value: f64,
    pub terms_used: usize,
    pub tail_bound: f64,
}

/// Neumaier's variant of Kahan summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    /// Multiplies the running state by `factor`; exact when `factor` is a power of two.
    pub fn scale(&mut self, factor: f64) {
        self.sum *= factor;
        self.comp *= factor;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for NeumaierSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = NeumaierSum::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}

/// Sums `Σ_k term_k` where `term_0 = first` and `term_{k+1} = term_k · ratio(k)`.
///
/// `majorant(k)` must bound `|ratio(j)|` for every `j ≥ k`. Once it drops
/// below one, the tail after index `k` is at most `|term_k|·R/(1−R)`, and the
/// sum stops as soon as that bound satisfies `trunc`.
pub(crate) fn sum_ratio_series(
    first: f64,
    mut ratio: impl FnMut(usize) -> f64,
    mut majorant: impl FnMut(usize) -> f64,
    trunc: &TruncationControl,
) -> Result<SeriesValue> {
    let mut acc = NeumaierSum::new();
    let mut term = first;
    let mut last_tail = f64::INFINITY;
    for k in 0..trunc.max_terms {
        if !term.is_finite() {
            return Err(Error::Range(format!(
                "series term {k} overflowed the double range"
            )));
        }
        acc.add(term);
        let r = majorant(k);
        if r < 1.0 {
            let tail = if term == 0.0 { 0.0 } else { term.abs() * r / (1.0 - r) };
            last_tail = tail;
            if trunc.accepts(tail, acc.value()) {
                let value = acc.value();
                if !value.is_finite() {
                    return Err(Error::Range("series sum overflowed".into()));
                }
                return Ok(SeriesValue {
                    value,
                    terms_used: k + 1,
                    tail_bound: tail,
                });
            }
        }
        term *= ratio(k);
    }
    Err(Error::Truncation {
        partial: acc.value(),
        terms: trunc.max_terms,
        tail_bound: last_tail,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn neumaier_recovers_cancelled_terms() {
        let s: NeumaierSum = [1.0, 1e100, 1.0, -1e100].into_iter().collect();
        assert_eq!(s.value(), 2.0);
    }

    #[test]
    fn geometric_series_is_certified() {
        let trunc = TruncationControl::default();
        let s = sum_ratio_series(1.0, |_| 0.5, |_| 0.5, &trunc).unwrap();
        assert!((s.value - 2.0).abs() <= s.tail_bound + 1e-15);
        assert!(s.tail_bound <= trunc.rel_tol * 2.0 + trunc.abs_tol);
    }

    #[test]
    fn divergent_series_reports_truncation_failure() {
        let trunc = TruncationControl::new(1e-12, 0.0, 50).unwrap();
        match sum_ratio_series(1.0, |_| 1.0, |_| 1.0, &trunc) {
            Err(Error::Truncation { partial, terms, .. }) => {
                assert_eq!(terms, 50);
                assert_eq!(partial, 50.0);
            }
            other => panic!("expected truncation failure, got {other:?}"),
        }
    }

    #[test]
    fn control_validation() {
        assert!(TruncationControl::new(0.0, 0.0, 100).is_err());
        assert!(TruncationControl::new(1e-10, -1.0, 100).is_err());
        assert!(TruncationControl::new(1e-10, 0.0, 7).is_err());
        assert!(TruncationControl::new(1e-10, 0.0, 8).is_ok());
    }
}
