//! Certified, overflow-safe evaluation of the normalized Szász-type kernels.
//!
//! Every operator in this crate has the shape
//!
//! ```text
//! L(f; x) = Σ_k term_k f(t_k) / Σ_k term_k,   term_{k+1} = term_k · ratio(k),
//! ```
//!
//! with a family-specific ratio and node sequence. Terms are kept in a scaled
//! linear representation: whenever a term grows past 2^600 every stored term is
//! multiplied by 2^-600, which is exact, and the exponent is tracked separately.

use crate::dunkl::{gamma_factor, DunklParam};
use crate::error::{Error, Result};
use crate::operators::function::Growth;
use crate::qcore::{bracket, q_integer, Deformation, QParam};
use crate::series::{NeumaierSum, TruncationControl};

const RESCALE_EXP: i32 = 600;

/// Operator family: determines the kernel ratios and the nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    /// D*_{n,q}: kernel E_{μ,q}([n]_q x), nodes q^{2−k}[2μθ_k+k]_q/[n]_q.
    DStar { q: QParam, mu: DunklParam, n: u32 },
    /// Içöz's D_{n,q}: kernel e_{μ,q}([n]_q x), nodes [2μθ_k+k]_q/[n]_q.
    Icoz { q: QParam, mu: DunklParam, n: u32 },
    /// Sucu's S*_n: kernel e_μ(nx), nodes (k+2μθ_k)/n.
    Sucu { mu: DunklParam, n: u32 },
    /// Classical Szász-Mirakjan: Poisson kernel, nodes k/n.
    Szasz { n: u32 },
}

impl Family {
    /// Kernel argument: `[n]_q x` for the q-families, `n x` otherwise.
    pub fn argument(&self, x: f64) -> f64 {
        match *self {
            Family::DStar { q, n, .. } | Family::Icoz { q, n, .. } => q_integer(n, q) * x,
            Family::Sucu { n, .. } | Family::Szasz { n } => f64::from(n) * x,
        }
    }

    /// `term_{k+1}/term_k`.
    pub fn ratio(&self, k: usize, a: f64) -> f64 {
        let next = k as u64 + 1;
        match *self {
            Family::DStar { q, mu, .. } => {
                q.value().powi(k as i32) * a / gamma_factor(next, mu, Deformation::Q(q))
            }
            Family::Icoz { q, mu, .. } => a / gamma_factor(next, mu, Deformation::Q(q)),
            Family::Sucu { mu, .. } => a / gamma_factor(next, mu, Deformation::Classical),
            Family::Szasz { .. } => a / next as f64,
        }
    }

    /// An upper bound on `ratio(j)` valid for every `j ≥ k`.
    pub fn majorant(&self, k: usize, a: f64) -> f64 {
        let next = k as f64 + 1.0;
        match *self {
            Family::DStar { q, .. } => q.value().powi(k as i32) * a / bracket(next, q),
            Family::Icoz { q, .. } => a / bracket(next, q),
            Family::Sucu { .. } | Family::Szasz { .. } => a / next,
        }
    }

    /// Node `t_k` at which the test function is sampled.
    pub fn node(&self, k: usize) -> f64 {
        let kk = k as u64;
        match *self {
            Family::DStar { q, mu, n } => {
                q.value().powi(2 - k as i32) * gamma_factor_or_zero(kk, mu, q) / q_integer(n, q)
            }
            Family::Icoz { q, mu, n } => gamma_factor_or_zero(kk, mu, q) / q_integer(n, q),
            Family::Sucu { mu, n } => {
                (k as f64 + 2.0 * mu.value() * f64::from(crate::dunkl::theta(kk))) / f64::from(n)
            }
            Family::Szasz { n } => k as f64 / f64::from(n),
        }
    }

    /// `(N, g)` with `t_j ≤ N g^{j−K−1}` for every `j > K`.
    fn node_envelope(&self, last: usize) -> (f64, f64) {
        match *self {
            Family::DStar { q, n, .. } => {
                // t_j ≤ q^{2−j}/((1−q)[n]_q) = q^{2−j}/(1−q^n)
                let denom = q.complement() * q_integer(n, q);
                (q.value().powi(1 - last as i32) / denom, 1.0 / q.value())
            }
            Family::Icoz { q, n, .. } => (1.0 / (q.complement() * q_integer(n, q)), 1.0),
            Family::Sucu { mu, n } => {
                let base = last as f64 + 1.0 + 2.0 * mu.value();
                (base / f64::from(n), 1.0 + 1.0 / base)
            }
            Family::Szasz { n } => {
                let base = last as f64 + 1.0;
                (base / f64::from(n), 1.0 + 1.0 / base)
            }
        }
    }

    fn check_argument(&self, a: f64) -> Result<()> {
        if let Family::Icoz { q, .. } = *self {
            if !(a * q.complement() < 1.0) {
                return Err(Error::Domain(format!(
                    "e_{{μ,q}}([n]_q x) diverges: [n]_q x (1−q) = {} ≥ 1",
                    a * q.complement()
                )));
            }
        }
        Ok(())
    }
}

// [2μθ_k + k]_q, which is 0 at k = 0.
fn gamma_factor_or_zero(k: u64, mu: DunklParam, q: QParam) -> f64 {
    if k == 0 {
        0.0
    } else {
        gamma_factor(k, mu, Deformation::Q(q))
    }
}

/// A truncated, certified kernel at a fixed argument.
#[derive(Debug, Clone)]
pub struct Kernel {
    family: Family,
    argument: f64,
    terms: Vec<f64>,
    nodes: Vec<f64>,
    total: f64,
    tail: f64,
    growth_total: f64,
    growth_tail: f64,
    log2_scale: i32,
}

impl Kernel {
    /// Builds the kernel at `x`, summing until both the kernel tail and, when
    /// `growth` is given, the tail of `Σ term_k · (A + B t_k^p)` are certified.
    pub fn build(
        family: &Family,
        x: f64,
        growth: Option<&Growth>,
        trunc: &TruncationControl,
    ) -> Result<Self> {
        if !(x >= 0.0 && x.is_finite()) {
            return Err(Error::Domain(format!("operators need finite x ≥ 0, got {x}")));
        }
        let a = family.argument(x);
        family.check_argument(a)?;
        let (ga, gb, gp) = growth.map_or((1.0, 0.0, 0.0), |g| (g.constant, g.coeff, g.power));

        let mut terms = Vec::new();
        let mut nodes = Vec::new();
        let mut total = NeumaierSum::new();
        let mut gtotal = NeumaierSum::new();
        let mut term = 1.0_f64;
        let mut log2_scale = 0;
        let mut last_tail = f64::INFINITY;
        let rescale_hi = 2f64.powi(RESCALE_EXP);
        let rescale_factor = 2f64.powi(-RESCALE_EXP);

        for k in 0..trunc.max_terms {
            let t = family.node(k);
            terms.push(term);
            nodes.push(t);
            total.add(term);
            if term != 0.0 {
                gtotal.add(term * (ga + if gb != 0.0 { gb * t.powf(gp) } else { 0.0 }));
            }

            let r = family.majorant(k, a);
            if r < 1.0 {
                let kernel_tail = if term == 0.0 { 0.0 } else { term * r / (1.0 - r) };
                last_tail = kernel_tail;
                let (env, g) = family.node_envelope(k);
                let rho = r * g.powf(gp);
                if rho < 1.0 {
                    let poly_tail = if gb == 0.0 || term == 0.0 || r == 0.0 {
                        0.0
                    } else {
                        gb * (term.ln() + r.ln() + gp * env.ln() - (1.0 - rho).ln()).exp()
                    };
                    let growth_tail = ga * kernel_tail + poly_tail;
                    let tot = total.value();
                    let gtot = gtotal.value();
                    let kernel_ok = kernel_tail <= (trunc.rel_tol + trunc.abs_tol) * tot;
                    let growth_ok = growth_tail <= trunc.rel_tol * gtot + trunc.abs_tol * tot;
                    if kernel_ok && growth_ok {
                        return Ok(Self {
                            family: *family,
                            argument: a,
                            terms,
                            nodes,
                            total: tot,
                            tail: kernel_tail,
                            growth_total: gtot,
                            growth_tail,
                            log2_scale,
                        });
                    }
                }
            }

            term *= family.ratio(k, a);
            if !term.is_finite() {
                return Err(Error::Range(format!("kernel term {} is not finite", k + 1)));
            }
            if term > rescale_hi {
                term *= rescale_factor;
                terms.iter_mut().for_each(|v| *v *= rescale_factor);
                total.scale(rescale_factor);
                gtotal.scale(rescale_factor);
                log2_scale += RESCALE_EXP;
            }
        }
        Err(Error::Truncation {
            partial: total.value(),
            terms: trunc.max_terms,
            tail_bound: last_tail,
        })
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    /// Kernel argument (`[n]_q x` or `n x`).
    pub fn argument(&self) -> f64 {
        self.argument
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Scaled terms; divide by [`Kernel::scaled_total`] for weights.
    pub fn scaled_terms(&self) -> &[f64] {
        &self.terms
    }

    pub fn scaled_total(&self) -> f64 {
        self.total
    }

    /// Upper bound on the discarded kernel mass, in the same scale as the terms.
    pub fn scaled_tail(&self) -> f64 {
        self.tail
    }

    /// Relative bound on the discarded kernel mass: `tail / Σ_{k≤K} term_k`.
    pub fn weight_tail(&self) -> f64 {
        self.tail / self.total
    }

    /// Scaled `Σ_{k≤K} term_k (A + B t_k^p)` for the growth the kernel was built with.
    pub fn scaled_growth_total(&self) -> f64 {
        self.growth_total
    }

    /// Scaled bound on `Σ_{k>K} term_k (A + B t_k^p)`.
    pub fn scaled_growth_tail(&self) -> f64 {
        self.growth_tail
    }

    /// Natural log of the (unscaled) truncated kernel sum.
    pub fn ln_total(&self) -> f64 {
        self.total.ln() + f64::from(self.log2_scale) * std::f64::consts::LN_2
    }

    /// Normalized weight `term_k / Σ term`, continuing the recurrence past the
    /// truncation index when needed.
    pub fn weight(&self, k: usize) -> f64 {
        if let Some(t) = self.terms.get(k) {
            return t / self.total;
        }
        let last = self.terms.len() - 1;
        let mut term = self.terms[last];
        for j in last..k {
            term *= self.family.ratio(j, self.argument);
            if term == 0.0 {
                break;
            }
        }
        term / self.total
    }

    pub fn weights(&self) -> impl Iterator<Item = f64> + '_ {
        self.terms.iter().map(move |t| t / self.total)
    }
}
