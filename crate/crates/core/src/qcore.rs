//! q-calculus primitives: q-integers, q-factorials, q-binomials,
//! q-Pochhammer symbols and the two classical q-exponentials.
//!
//! The deformation parameter is always a [`QParam`] strictly inside (0, 1).
//! Classical (q = 1) limits never go through a `QParam`; they are reached via
//! [`Deformation::Classical`], so no division by `1 − q` can happen there.

use crate::error::{Error, Result};
use crate::series::{sum_ratio_series, SeriesValue, TruncationControl};

/// Deformation parameter q with 0 < q < 1.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct QParam(f64);

impl QParam {
    pub fn new(q: f64) -> Result<Self> {
        if q > 0.0 && q < 1.0 {
            Ok(Self(q))
        } else {
            Err(Error::invalid("q", format!("must lie in (0, 1), got {q}")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// `1 − q`, exact in binary floating point for q ≥ 1/2.
    pub fn complement(self) -> f64 {
        1.0 - self.0
    }

    pub fn ln(self) -> f64 {
        self.0.ln()
    }

    /// q², used as the base of the explicit γ_{μ,q} products.
    pub fn squared(self) -> QParam {
        QParam(self.0 * self.0)
    }

    /// `q^a` for a real exponent.
    pub fn pow(self, a: f64) -> f64 {
        if a.fract() == 0.0 && a.abs() <= i32::MAX as f64 {
            self.0.powi(a as i32)
        } else {
            self.0.powf(a)
        }
    }
}

impl TryFrom<f64> for QParam {
    type Error = Error;

    fn try_from(q: f64) -> Result<Self> {
        QParam::new(q)
    }
}

/// Real argument of a generalized bracket `[a]_q`, e.g. `1 − 2μ`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct QRealExponent(f64);

impl QRealExponent {
    pub fn new(a: f64) -> Result<Self> {
        if a.is_finite() {
            Ok(Self(a))
        } else {
            Err(Error::invalid("a", format!("bracket argument must be finite, got {a}")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Either a genuine q-deformation or the classical q = 1 limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Deformation {
    Classical,
    Q(QParam),
}

impl Deformation {
    /// `[a]_q`, or `a` itself in the classical limit.
    pub fn bracket(self, a: f64) -> f64 {
        match self {
            Deformation::Classical => a,
            Deformation::Q(q) => bracket(a, q),
        }
    }
}

// Above this size the Horner sum for [n]_q gives way to the expm1 form.
const HORNER_LIMIT: u32 = 32;

fn horner_integer(n: u32, q: f64) -> f64 {
    (0..n).fold(0.0, |acc, _| acc * q + 1.0)
}

/// `[a]_q = (1 − q^a)/(1 − q)` for real `a`.
pub(crate) fn bracket(a: f64, q: QParam) -> f64 {
    if a.fract() == 0.0 && a.abs() <= HORNER_LIMIT as f64 {
        let m = a.abs() as u32;
        let pos = horner_integer(m, q.value());
        if a >= 0.0 {
            pos
        } else {
            // [−m]_q = −q^{−m}[m]_q
            -pos / q.value().powi(m as i32)
        }
    } else {
        -(a * q.ln()).exp_m1() / q.complement()
    }
}

/// The q-integer `[n]_q = 1 + q + … + q^{n−1}`; `[0]_q = 0`.
pub fn q_integer(n: u32, q: QParam) -> f64 {
    if n <= HORNER_LIMIT {
        horner_integer(n, q.value())
    } else {
        -(f64::from(n) * q.ln()).exp_m1() / q.complement()
    }
}

/// `[a]_q` for a real argument; negative when `a < 0`.
pub fn q_bracket_real(a: QRealExponent, q: QParam) -> f64 {
    bracket(a.value(), q)
}

/// `[n]_q! = [1]_q [2]_q ⋯ [n]_q`, with `[0]_q! = 1`.
pub fn q_factorial(n: u32, q: QParam) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * q_integer(k, q))
}

/// Gaussian binomial coefficient `[n choose k]_q`.
pub fn q_binomial(n: u32, k: u32, q: QParam) -> Result<f64> {
    if k > n {
        return Err(Error::Domain(format!("q_binomial needs k ≤ n, got n={n}, k={k}")));
    }
    // Product over the smaller side keeps the result symmetric in k ↔ n−k.
    let k = k.min(n - k);
    Ok((1..=k).fold(1.0, |acc, i| {
        acc * q_integer(n - k + i, q) / q_integer(i, q)
    }))
}

/// Length of a q-Pochhammer product.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PochhammerLength {
    Finite(u32),
    Infinite,
}

/// `(x; q)_n = Π_{j<n} (1 − q^j x)`, or the infinite product.
///
/// The infinite product stops at the first `J` where the remaining factors are
/// certified: with `y = |q^J x| < 1`, `|log Π_{j≥J}(1 − q^j x)| ≤ y/((1−q)(1−y))`,
/// so the relative error is at most `expm1` of that quantity. The returned
/// `tail_bound` is that relative bound times `|value|`.
pub fn q_pochhammer(
    x: f64,
    q: QParam,
    len: PochhammerLength,
    trunc: &TruncationControl,
) -> Result<SeriesValue> {
    match len {
        PochhammerLength::Finite(n) => {
            let mut prod = 1.0;
            let mut qjx = x;
            for _ in 0..n {
                prod *= 1.0 - qjx;
                qjx *= q.value();
            }
            Ok(SeriesValue {
                value: prod,
                terms_used: n as usize,
                tail_bound: 0.0,
            })
        }
        PochhammerLength::Infinite => {
            let mut prod = 1.0;
            let mut qjx = x;
            for j in 0..trunc.max_terms {
                let y = qjx.abs();
                if y < 1.0 {
                    let log_bound = y / (q.complement() * (1.0 - y));
                    let rel = log_bound.exp_m1();
                    if rel <= trunc.rel_tol || y < trunc.abs_tol {
                        return Ok(SeriesValue {
                            value: prod,
                            terms_used: j,
                            tail_bound: rel * prod.abs(),
                        });
                    }
                }
                prod *= 1.0 - qjx;
                qjx *= q.value();
            }
            Err(Error::Truncation {
                partial: prod,
                terms: trunc.max_terms,
                tail_bound: f64::INFINITY,
            })
        }
    }
}

/// The small q-exponential `e_q(z) = Σ z^k/[k]_q!`, valid for `|z| < 1/(1−q)`.
pub fn q_exp_small(z: f64, q: QParam, trunc: &TruncationControl) -> Result<SeriesValue> {
    if !(z.abs() * q.complement() < 1.0) {
        return Err(Error::Domain(format!(
            "e_q(z) needs |z| < 1/(1−q) = {}, got z = {z}",
            1.0 / q.complement()
        )));
    }
    sum_ratio_series(
        1.0,
        |k| z / q_integer(k as u32 + 1, q),
        |k| z.abs() / q_integer(k as u32 + 1, q),
        trunc,
    )
}

/// `e_q(z)` through its product form `1/((1−q)z; q)_∞`.
pub fn q_exp_small_product(z: f64, q: QParam, trunc: &TruncationControl) -> Result<SeriesValue> {
    if !(z.abs() * q.complement() < 1.0) {
        return Err(Error::Domain(format!("e_q(z) product needs |z| < 1/(1−q), got {z}")));
    }
    let p = q_pochhammer(q.complement() * z, q, PochhammerLength::Infinite, trunc)?;
    let value = 1.0 / p.value;
    // 1/p with relative perturbation r has relative error at most r/(1−r).
    let rel = p.tail_bound / p.value.abs();
    Ok(SeriesValue {
        value,
        terms_used: p.terms_used,
        tail_bound: value.abs() * rel / (1.0 - rel),
    })
}

/// The big q-exponential `E_q(z) = Σ q^{k(k−1)/2} z^k/[k]_q!`, entire in z.
pub fn q_exp_big(z: f64, q: QParam, trunc: &TruncationControl) -> Result<SeriesValue> {
    sum_ratio_series(
        1.0,
        |k| q.value().powi(k as i32) * z / q_integer(k as u32 + 1, q),
        |k| q.value().powi(k as i32) * z.abs() / q_integer(k as u32 + 1, q),
        trunc,
    )
}

/// `E_q(z)` through its product form `Π_{j≥0}(1 + (1−q) q^j z)`.
pub fn q_exp_big_product(z: f64, q: QParam, trunc: &TruncationControl) -> Result<SeriesValue> {
    q_pochhammer(-q.complement() * z, q, PochhammerLength::Infinite, trunc)
}
