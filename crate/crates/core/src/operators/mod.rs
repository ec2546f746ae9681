//! The operator
//!
//! ```text
//! D*_{n,q}(f; x) = 1/E_{μ,q}([n]_q x) · Σ_k ([n]_q x)^k q^{k(k−1)/2} / γ_{μ,q}(k)
//!                  · f( (1 − q^{2μθ_k+k}) / (q^{k−2}(1 − q^n)) )
//! ```
//!
//! together with its moments and the classical Szász, Sucu (Dunkl) and Içöz
//! (q-Dunkl) operators it generalizes.

pub mod function;
pub mod kernel;

use crate::dunkl::{theta, DunklParam};
use crate::error::{Error, Result};
use crate::qcore::{bracket, q_integer, QParam};
use crate::series::{NeumaierSum, TruncationControl};

pub use function::{DerivativeBounds, FunctionFlags, Growth, Lipschitz, TestFunction};
pub use kernel::{Family, Kernel};

/// Scale applied to `(K+1)·ε` in the rounding estimate; covers the few
/// roundings per step of the term recurrence.
const ROUNDING_STEPS_PER_TERM: f64 = 8.0;

/// Parameters of D*_{n,q}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatorParams {
    pub n: u32,
    pub q: QParam,
    pub mu: DunklParam,
    pub trunc: TruncationControl,
}

impl OperatorParams {
    pub fn new(n: u32, q: QParam, mu: DunklParam, trunc: TruncationControl) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("n", "operator index must be ≥ 1"));
        }
        Ok(Self { n, q, mu, trunc })
    }

    /// Shorthand taking raw numbers and the default truncation policy.
    pub fn from_values(n: u32, q: f64, mu: f64) -> Result<Self> {
        Self::new(n, QParam::new(q)?, DunklParam::new(mu)?, TruncationControl::default())
    }

    pub fn with_q(self, q: QParam) -> Self {
        Self { q, ..self }
    }

    pub fn family(&self) -> Family {
        Family::DStar {
            q: self.q,
            mu: self.mu,
            n: self.n,
        }
    }

    /// `[n]_q`.
    pub fn nq(&self) -> f64 {
        q_integer(self.n, self.q)
    }
}

/// Result of applying an operator at one point.
///
/// `tail_bound` certifies the truncation; `rounding_bound` is a first-order
/// estimate of floating-point error in the term recurrence and the sums.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatorValue {
    pub value: f64,
    pub terms_used: usize,
    pub tail_bound: f64,
    pub rounding_bound: f64,
}

impl OperatorValue {
    fn exact(value: f64) -> Self {
        Self {
            value,
            terms_used: 1,
            tail_bound: 0.0,
            rounding_bound: 0.0,
        }
    }

    /// `tail_bound + rounding_bound`.
    pub fn error_bound(&self) -> f64 {
        self.tail_bound + self.rounding_bound
    }
}

/// Node `t_k = q^{2−k} [2μθ_k + k]_q / [n]_q`.
pub fn node(k: usize, params: &OperatorParams) -> f64 {
    params.family().node(k)
}

/// Node in the literal form `(1 − q^{2μθ_k+k}) / (q^{k−2} (1 − q^n))`.
pub fn node_direct(k: usize, params: &OperatorParams) -> f64 {
    let q = params.q.value();
    let e = 2.0 * params.mu.value() * f64::from(theta(k as u64)) + k as f64;
    (1.0 - params.q.pow(e)) / (q.powi(k as i32 - 2) * (1.0 - q.powi(params.n as i32)))
}

/// Kernel weight `([n]_q x)^k q^{k(k−1)/2} / (γ_{μ,q}(k) E_{μ,q}([n]_q x))`.
pub fn weight(k: usize, x: f64, params: &OperatorParams) -> Result<f64> {
    if x == 0.0 {
        return Ok(if k == 0 { 1.0 } else { 0.0 });
    }
    let kernel = Kernel::build(&params.family(), x, None, &params.trunc)?;
    Ok(kernel.weight(k))
}

/// Applies a kernel family to `f` at `x`.
pub fn apply_family(
    family: &Family,
    f: &TestFunction,
    x: f64,
    trunc: &TruncationControl,
) -> Result<OperatorValue> {
    if x == 0.0 {
        // Only the node t_0 = 0 carries weight.
        let v = f.eval(0.0);
        if !v.is_finite() {
            return Err(Error::FunctionDomain {
                name: f.name().to_string(),
                t: 0.0,
            });
        }
        return Ok(OperatorValue::exact(v));
    }
    let kernel = Kernel::build(family, x, f.growth(), trunc)?;
    let mut acc = NeumaierSum::new();
    let mut abs_acc = NeumaierSum::new();
    let mut max_abs = 0.0_f64;
    for (&term, &t) in kernel.scaled_terms().iter().zip(kernel.nodes()) {
        if term == 0.0 {
            continue;
        }
        let v = f.eval(t);
        if !v.is_finite() {
            return Err(Error::FunctionDomain {
                name: f.name().to_string(),
                t,
            });
        }
        acc.add(term * v);
        abs_acc.add(term * v.abs());
        max_abs = max_abs.max(v.abs());
    }
    let total = kernel.scaled_total();
    let value = acc.value() / total;
    let f_tail = match f.growth() {
        Some(_) => kernel.scaled_growth_tail(),
        // Without a growth majorant the best available proxy is the largest
        // |f| seen on the summed nodes.
        None => kernel.scaled_tail() * max_abs,
    };
    let tail_bound = (f_tail + value.abs() * kernel.scaled_tail()) / total;
    let k = kernel.len() as f64;
    let rounding_bound =
        ROUNDING_STEPS_PER_TERM * (k + 1.0) * f64::EPSILON * (abs_acc.value() / total + value.abs());
    Ok(OperatorValue {
        value,
        terms_used: kernel.len(),
        tail_bound,
        rounding_bound,
    })
}

/// `D*_{n,q}(f; x)`.
pub fn apply(f: &TestFunction, x: f64, params: &OperatorParams) -> Result<OperatorValue> {
    apply_family(&params.family(), f, x, &params.trunc)
}

/// Raw moment `D*_{n,q}(e_j; x)` for `j ∈ {0, 1, 2}`.
pub fn moment(j: u32, x: f64, params: &OperatorParams) -> Result<OperatorValue> {
    if j > 2 {
        return Err(Error::invalid("j", format!("moments are provided for j ≤ 2, got {j}")));
    }
    apply(&TestFunction::monomial(j), x, params)
}

/// Central moment `D*_{n,q}((e_1 − x)^j; x)` for `j ∈ {1, 2}`, summed directly.
pub fn central_moment(j: u32, x: f64, params: &OperatorParams) -> Result<OperatorValue> {
    if !(1..=2).contains(&j) {
        return Err(Error::invalid("j", format!("central moments are provided for j ∈ {{1, 2}}, got {j}")));
    }
    apply(&TestFunction::centered_power(x, j), x, params)
}

/// `λ_n(x) = D*((e_1 − x)²; x)` assembled from raw moments: `m₂ − 2x m₁ + x²`.
pub fn central_moment_from_raw(x: f64, params: &OperatorParams) -> Result<OperatorValue> {
    let m1 = moment(1, x, params)?;
    let m2 = moment(2, x, params)?;
    let value = m2.value - 2.0 * x * m1.value + x * x;
    Ok(OperatorValue {
        value,
        terms_used: m1.terms_used.max(m2.terms_used),
        tail_bound: m2.tail_bound + 2.0 * x * m1.tail_bound,
        rounding_bound: m2.rounding_bound
            + 2.0 * x * m1.rounding_bound
            + 4.0 * f64::EPSILON * (m2.value.abs() + 2.0 * x * m1.value.abs() + x * x),
    })
}

/// Which second-moment sandwich to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentKind {
    /// `D*(e_2; x)`: `q x² + q^{2(1+μ)}/[n]_q · [1 ∓ 2μ]_q x`.
    Raw,
    /// `D*((e_1 − x)²; x)`: `(1 − q) x² + q^{2(1+μ)}/[n]_q · [1 ∓ 2μ]_q x`.
    Central,
}

/// Closed-form lower and upper endpoints of the second-moment sandwich.
pub fn moment_bounds(kind: MomentKind, x: f64, params: &OperatorParams) -> (f64, f64) {
    let q = params.q;
    let mu = params.mu.value();
    let base = match kind {
        MomentKind::Raw => q.value() * x * x,
        MomentKind::Central => q.complement() * x * x,
    };
    let c = q.pow(2.0 * (1.0 + mu)) / params.nq() * x;
    (
        base + c * bracket(1.0 - 2.0 * mu, q),
        base + c * bracket(1.0 + 2.0 * mu, q),
    )
}

/// Classical Szász-Mirakjan operator `e^{−nx} Σ (nx)^k/k! f(k/n)`.
pub fn szasz_classical(
    f: &TestFunction,
    x: f64,
    n: u32,
    trunc: &TruncationControl,
) -> Result<OperatorValue> {
    if n == 0 {
        return Err(Error::invalid("n", "operator index must be ≥ 1"));
    }
    apply_family(&Family::Szasz { n }, f, x, trunc)
}

/// Sucu's Dunkl analogue `1/e_μ(nx) Σ (nx)^k/γ_μ(k) f((k + 2μθ_k)/n)`.
pub fn dunkl_szasz_sucu(
    f: &TestFunction,
    x: f64,
    n: u32,
    mu: DunklParam,
    trunc: &TruncationControl,
) -> Result<OperatorValue> {
    if n == 0 {
        return Err(Error::invalid("n", "operator index must be ≥ 1"));
    }
    apply_family(&Family::Sucu { mu, n }, f, x, trunc)
}

/// Içöz's q-Dunkl operator
/// `1/e_{μ,q}([n]_q x) Σ ([n]_q x)^k/γ_{μ,q}(k) f((1 − q^{2μθ_k+k})/(1 − q^n))`.
///
/// The kernel only converges for `[n]_q x (1 − q) < 1`; outside that region
/// the call is a domain error.
pub fn icoz_q_dunkl(f: &TestFunction, x: f64, params: &OperatorParams) -> Result<OperatorValue> {
    let family = Family::Icoz {
        q: params.q,
        mu: params.mu,
        n: params.n,
    };
    apply_family(&family, f, x, &params.trunc)
}

/// q used by [`limit_consistency_check`].
pub const LIMIT_Q: f64 = 1.0 - 1e-4;

/// D*_{n,q} at q = 1 − 10⁻⁴ next to Sucu's operator with the same (n, μ).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitReport {
    pub q: f64,
    pub dstar: OperatorValue,
    pub sucu: OperatorValue,
    pub difference: f64,
    /// Sum of both error bounds.
    pub certificate: f64,
}

pub fn limit_consistency_check(
    f: &TestFunction,
    x: f64,
    params: &OperatorParams,
) -> Result<LimitReport> {
    let q = QParam::new(LIMIT_Q)?;
    let dstar = apply(f, x, &params.with_q(q))?;
    let sucu = dunkl_szasz_sucu(f, x, params.n, params.mu, &params.trunc)?;
    Ok(LimitReport {
        q: LIMIT_Q,
        dstar,
        sucu,
        difference: (dstar.value - sucu.value).abs(),
        certificate: dstar.error_bound() + sucu.error_bound(),
    })
}
