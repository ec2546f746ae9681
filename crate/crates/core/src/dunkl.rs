//! The q-Dunkl coefficients γ_{μ,q}, the parity function θ and the two
//! q-Dunkl exponentials
//!
//! ```text
//! e_{μ,q}(x) = Σ x^k / γ_{μ,q}(k),    E_{μ,q}(x) = Σ q^{k(k−1)/2} x^k / γ_{μ,q}(k),
//! γ_{μ,q}(k+1) = [2μθ_{k+1} + k + 1]_q · γ_{μ,q}(k),   γ_{μ,q}(0) = 1.
//! ```

use crate::error::{Error, Result};
use crate::qcore::{bracket, q_pochhammer, Deformation, PochhammerLength, QParam};
use crate::series::sum_ratio_series;

pub use crate::series::{SeriesValue, TruncationControl};

/// Dunkl weight μ ≥ 0.
///
/// Values with μ ≤ 1/2 are accepted but flagged by [`DunklParam::below_half`]:
/// all formulas stay well defined for μ ≥ 0.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct DunklParam {
    mu: f64,
}

impl DunklParam {
    pub fn new(mu: f64) -> Result<Self> {
        if mu >= 0.0 && mu.is_finite() {
            Ok(Self { mu })
        } else {
            Err(Error::invalid("mu", format!("must be finite and ≥ 0, got {mu}")))
        }
    }

    pub fn value(self) -> f64 {
        self.mu
    }

    /// Warning flag: μ lies outside the μ > 1/2 regime.
    pub fn below_half(self) -> bool {
        self.mu <= 0.5
    }
}

/// Parity indicator: 0 for even `k`, 1 for odd `k`.
pub fn theta(k: u64) -> u32 {
    (k & 1) as u32
}

/// `γ(k)/γ(k−1) = [2μθ_k + k]`, the factor that advances the recursion to index `k ≥ 1`.
pub fn gamma_factor(k: u64, mu: DunklParam, deformation: Deformation) -> f64 {
    deformation.bracket(2.0 * mu.value() * f64::from(theta(k)) + k as f64)
}

/// `γ_{μ,q}(k)` by the ascending recursion.
///
/// Returns [`Error::Range`] if the product leaves the double range.
pub fn gamma_mu_q(k: u64, mu: DunklParam, q: QParam) -> Result<f64> {
    gamma_with(k, mu, Deformation::Q(q))
}

/// Sucu's classical `γ_μ(k)`, i.e. the recursion with plain integers.
pub fn gamma_mu(k: u64, mu: DunklParam) -> Result<f64> {
    gamma_with(k, mu, Deformation::Classical)
}

fn gamma_with(k: u64, mu: DunklParam, deformation: Deformation) -> Result<f64> {
    let mut g = 1.0;
    for i in 1..=k {
        g *= gamma_factor(i, mu, deformation);
        if !g.is_finite() {
            return Err(Error::Range(format!("γ({k}) overflows at index {i}")));
        }
    }
    Ok(g)
}

/// `ln γ_{μ,q}(k)`; always finite.
pub fn ln_gamma_mu_q(k: u64, mu: DunklParam, q: QParam) -> f64 {
    (1..=k)
        .map(|i| gamma_factor(i, mu, Deformation::Q(q)).ln())
        .sum()
}

/// Cross-check path for γ_{μ,q}:
///
/// ```text
/// γ_{μ,q}(k) = (q^{2μ+1}; q²)_{⌈k/2⌉} (q²; q²)_{⌊k/2⌋} / (1 − q)^k
/// ```
pub fn gamma_mu_q_explicit(k: u64, mu: DunklParam, q: QParam) -> Result<f64> {
    let q2 = q.squared();
    let trunc = TruncationControl::default();
    let odd_len = k.div_ceil(2) as u32;
    let even_len = (k / 2) as u32;
    let odd = q_pochhammer(
        q.pow(2.0 * mu.value() + 1.0),
        q2,
        PochhammerLength::Finite(odd_len),
        &trunc,
    )?;
    let even = q_pochhammer(q2.value(), q2, PochhammerLength::Finite(even_len), &trunc)?;
    let g = odd.value * even.value / q.complement().powi(k as i32);
    if g.is_finite() {
        Ok(g)
    } else {
        Err(Error::Range(format!("explicit γ({k}) overflows")))
    }
}

/// Precomputed γ_{μ,q}(0..=k_max) in both linear and log space.
///
/// The table is immutable after construction, so it can be shared freely
/// between threads. Linear entries past the double range are `None`; the log
/// entries always exist.
#[derive(Debug, Clone)]
pub struct GammaTable {
    mu: DunklParam,
    q: QParam,
    linear: Vec<Option<f64>>,
    log: Vec<f64>,
}

impl GammaTable {
    pub fn new(mu: DunklParam, q: QParam, k_max: usize) -> Self {
        let mut linear = Vec::with_capacity(k_max + 1);
        let mut log = Vec::with_capacity(k_max + 1);
        let mut lin = Some(1.0);
        let mut lg = 0.0;
        linear.push(lin);
        log.push(lg);
        for k in 1..=k_max as u64 {
            let f = gamma_factor(k, mu, Deformation::Q(q));
            lg += f.ln();
            lin = lin.map(|g| g * f).filter(|g| g.is_finite());
            linear.push(lin);
            log.push(lg);
        }
        Self { mu, q, linear, log }
    }

    pub fn mu(&self) -> DunklParam {
        self.mu
    }

    pub fn q(&self) -> QParam {
        self.q
    }

    pub fn len(&self) -> usize {
        self.log.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log.is_empty()
    }

    pub fn linear(&self, k: usize) -> Option<f64> {
        self.linear.get(k).copied().flatten()
    }

    pub fn ln(&self, k: usize) -> Option<f64> {
        self.log.get(k).copied()
    }
}

/// `e_{μ,q}(x) = Σ x^k/γ_{μ,q}(k)` for `0 ≤ x < 1/(1−q)`.
///
/// The series has radius `1/(1−q)`; arguments on or beyond it are a domain
/// error. The ratio of consecutive terms is `x/[2μθ_{k+1}+k+1]_q`, majorized
/// by `x/[k+1]_q` for every later index.
pub fn dunkl_exp_e(
    x: f64,
    mu: DunklParam,
    q: QParam,
    trunc: &TruncationControl,
) -> Result<SeriesValue> {
    if !(x >= 0.0) {
        return Err(Error::Domain(format!("e_{{μ,q}} needs x ≥ 0, got {x}")));
    }
    if !(x * q.complement() < 1.0) {
        return Err(Error::Domain(format!(
            "e_{{μ,q}}(x) diverges for x ≥ 1/(1−q) = {}, got x = {x}",
            1.0 / q.complement()
        )));
    }
    let d = Deformation::Q(q);
    sum_ratio_series(
        1.0,
        |k| x / gamma_factor(k as u64 + 1, mu, d),
        |k| x / bracket(k as f64 + 1.0, q),
        trunc,
    )
}

/// `E_{μ,q}(x) = Σ q^{k(k−1)/2} x^k/γ_{μ,q}(k)` for `x ≥ 0`.
///
/// Terms follow `term_{k+1} = term_k · q^k x / [2μθ_{k+1}+k+1]_q`, so x^k and
/// γ(k) never have to be formed separately. Values beyond the double range are
/// reported as [`Error::Range`]; use [`ln_dunkl_exp_big`] there.
pub fn dunkl_exp_big(
    x: f64,
    mu: DunklParam,
    q: QParam,
    trunc: &TruncationControl,
) -> Result<SeriesValue> {
    if !(x >= 0.0 && x.is_finite()) {
        return Err(Error::Domain(format!("E_{{μ,q}} needs finite x ≥ 0, got {x}")));
    }
    let d = Deformation::Q(q);
    sum_ratio_series(
        1.0,
        |k| q.value().powi(k as i32) * x / gamma_factor(k as u64 + 1, mu, d),
        |k| q.value().powi(k as i32) * x / bracket(k as f64 + 1.0, q),
        trunc,
    )
}

/// `ln E_{μ,q}(x)` with the same certified truncation, usable far past the
/// point where `E_{μ,q}(x)` itself overflows.
///
/// The returned `tail_bound` is relative: the true value is within a factor
/// `1 + tail_bound` of `exp(value)`.
pub fn ln_dunkl_exp_big(
    x: f64,
    mu: DunklParam,
    q: QParam,
    trunc: &TruncationControl,
) -> Result<SeriesValue> {
    use crate::operators::kernel::{Family, Kernel};
    if !(x >= 0.0 && x.is_finite()) {
        return Err(Error::Domain(format!("E_{{μ,q}} needs finite x ≥ 0, got {x}")));
    }
    let family = Family::DStar { q, mu, n: 1 };
    // n = 1 makes [n]_q x = x.
    let kernel = Kernel::build(&family, x, None, trunc)?;
    Ok(SeriesValue {
        value: kernel.ln_total(),
        terms_used: kernel.len(),
        tail_bound: kernel.weight_tail(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{q_factorial, q_exp_big, q_exp_small};

    fn mu(v: f64) -> DunklParam {
        DunklParam::new(v).unwrap()
    }
    fn q(v: f64) -> QParam {
        QParam::new(v).unwrap()
    }

    #[test]
    fn theta_examples() {
        assert_eq!(theta(0), 0);
        assert_eq!(theta(1), 1);
        assert_eq!(theta(2), 0);
    }

    #[test]
    fn dunkl_param_flags_weak_regime() {
        assert!(DunklParam::new(-0.1).is_err());
        assert!(DunklParam::new(f64::NAN).is_err());
        assert!(mu(0.5).below_half());
        assert!(mu(0.0).below_half());
        assert!(!mu(0.6).below_half());
    }

    #[test]
    fn gamma_examples() {
        assert_eq!(gamma_mu_q(0, mu(1.0), q(0.5)).unwrap(), 1.0);
        assert_eq!(gamma_mu_q(1, mu(1.0), q(0.5)).unwrap(), 1.75);
        assert_eq!(gamma_mu_q(2, mu(1.0), q(0.5)).unwrap(), 2.625);
    }

    #[test]
    fn explicit_gamma_examples() {
        assert_eq!(gamma_mu_q_explicit(0, mu(1.0), q(0.5)).unwrap(), 1.0);
        assert!((gamma_mu_q_explicit(1, mu(1.0), q(0.5)).unwrap() - 1.75).abs() < 1e-15);
        let rec = gamma_mu_q(4, mu(0.75), q(0.3)).unwrap();
        let exp = gamma_mu_q_explicit(4, mu(0.75), q(0.3)).unwrap();
        assert!((rec - exp).abs() <= 1e-10 * rec);
    }

    #[test]
    fn classical_gamma_matches_closed_forms() {
        let m = mu(0.0);
        assert_eq!(gamma_mu(5, m).unwrap(), 120.0);
        let m = mu(1.0);
        // factors 3, 2, 5, 4
        assert_eq!(gamma_mu(4, m).unwrap(), 120.0);
    }

    #[test]
    fn gamma_overflow_is_a_range_error() {
        assert!(matches!(gamma_mu_q(400, mu(1.0), q(0.1)), Ok(_)));
        assert!(matches!(gamma_mu(400, mu(1.0)), Err(Error::Range(_))));
        assert!(ln_gamma_mu_q(5000, mu(1.0), q(0.999)).is_finite());
    }

    #[test]
    fn gamma_table_switches_to_log_space() {
        let t = GammaTable::new(mu(1.0), q(0.999), 400);
        assert_eq!(t.len(), 401);
        assert!(t.linear(10).is_some());
        assert!(t.linear(400).is_none());
        let direct = ln_gamma_mu_q(400, mu(1.0), q(0.999));
        assert!((t.ln(400).unwrap() - direct).abs() <= 1e-12 * direct.abs());
        let g = gamma_mu_q(10, mu(1.0), q(0.999)).unwrap();
        assert_eq!(t.linear(10), Some(g));
    }

    #[test]
    fn mu_zero_reduces_to_q_factorial() {
        for k in 0..=40u32 {
            let g = gamma_mu_q(u64::from(k), mu(0.0), q(0.7)).unwrap();
            let f = q_factorial(k, q(0.7));
            assert!((g - f).abs() <= 1e-12 * f, "k={k}");
        }
    }

    #[test]
    fn exponentials_at_zero() {
        let t = TruncationControl::default();
        assert_eq!(dunkl_exp_e(0.0, mu(1.0), q(0.5), &t).unwrap().value, 1.0);
        assert_eq!(dunkl_exp_big(0.0, mu(1.0), q(0.5), &t).unwrap().value, 1.0);
    }

    #[test]
    fn e_rejects_radius_of_convergence() {
        let t = TruncationControl::default();
        assert!(matches!(dunkl_exp_e(2.0, mu(1.0), q(0.5), &t), Err(Error::Domain(_))));
        assert!(matches!(dunkl_exp_e(-1.0, mu(1.0), q(0.5), &t), Err(Error::Domain(_))));
    }

    #[test]
    fn mu_zero_exponentials_match_classical() {
        let t = TruncationControl::default();
        let e = dunkl_exp_e(1.0, mu(0.0), q(0.5), &t).unwrap().value;
        let c = q_exp_small(1.0, q(0.5), &t).unwrap().value;
        assert!((e - c).abs() <= 1e-10 * c);
        let big = dunkl_exp_big(5.0, mu(0.0), q(0.5), &t).unwrap().value;
        let cbig = q_exp_big(5.0, q(0.5), &t).unwrap().value;
        assert!((big - cbig).abs() <= 1e-10 * cbig);
    }

    #[test]
    fn log_exponential_matches_linear() {
        let t = TruncationControl::default();
        let lin = dunkl_exp_big(10.0, mu(1.0), q(0.9), &t).unwrap().value;
        let lg = ln_dunkl_exp_big(10.0, mu(1.0), q(0.9), &t).unwrap().value;
        assert!((lg - lin.ln()).abs() < 1e-12 * lin.ln().abs());
        // far past overflow
        let huge = ln_dunkl_exp_big(5000.0, mu(1.0), q(0.996), &t).unwrap();
        assert!(huge.value > 709.0 && huge.value.is_finite());
        assert!(matches!(dunkl_exp_big(5000.0, mu(1.0), q(0.996), &t), Err(Error::Range(_))));
    }
}
