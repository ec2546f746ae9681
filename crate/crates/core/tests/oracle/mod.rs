//! Reference values in 256-bit binary floating point, built straight from the
//! defining formulas with fixed-length sums.
#![allow(dead_code)]

use dashu_float::round::mode::HalfEven;
use dashu_float::FBig;

pub type F = FBig<HalfEven, 2>;

const PREC: usize = 256;

/// Terms past this fraction of the running total are treated as negligible.
const NEGLIGIBLE: f64 = 1e-40;

pub fn big(x: f64) -> F {
    F::try_from(x).expect("finite").with_precision(PREC).value()
}

pub fn small(x: &F) -> f64 {
    x.to_f64().value()
}

pub fn one() -> F {
    big(1.0)
}

pub fn powi(base: &F, k: i64) -> F {
    let mut acc = one();
    for _ in 0..k.unsigned_abs() {
        acc = acc * base.clone();
    }
    if k < 0 {
        one() / acc
    } else {
        acc
    }
}

/// `q^a` for real `a`.
pub fn pow(q: f64, a: f64) -> F {
    if a.fract() == 0.0 && a.abs() < 4096.0 {
        powi(&big(q), a as i64)
    } else {
        (big(q).ln() * big(a)).exp()
    }
}

/// `[a]_q = (1 − q^a)/(1 − q)`.
pub fn bracket(a: f64, q: f64) -> F {
    (one() - pow(q, a)) / (one() - big(q))
}

pub fn theta(k: u64) -> f64 {
    (k % 2) as f64
}

/// `γ_{μ,q}(k) = Π_{i=1}^{k} [2μθ_i + i]_q`.
pub fn gamma(k: u64, mu: f64, q: f64) -> F {
    (1..=k).fold(one(), |acc, i| acc * bracket(2.0 * mu * theta(i) + i as f64, q))
}

/// `γ_μ(k) = Π_{i=1}^{k} (i + 2μθ_i)`.
pub fn gamma_classical(k: u64, mu: f64) -> F {
    (1..=k).fold(one(), |acc, i| acc * big(i as f64 + 2.0 * mu * theta(i)))
}

fn checked_sum(terms: impl Iterator<Item = F>) -> F {
    let mut total = big(0.0);
    let mut last = big(0.0);
    for t in terms {
        total = total + t.clone();
        last = t;
    }
    let rel = small(&last).abs() / small(&total).abs().max(f64::MIN_POSITIVE);
    assert!(rel < NEGLIGIBLE, "oracle sum not converged: last/total = {rel:e}");
    total
}

/// `Σ_{k<terms} c_k x^k/γ_{μ,q}(k)` with `c_k = q^{k(k−1)/2}` when `triangular`
/// and `c_k = 1` otherwise.
fn dunkl_series(x: f64, mu: f64, q: f64, triangular: bool, terms: u64) -> F {
    let (x, qb) = (big(x), big(q));
    let (mut xk, mut qk, mut qtri, mut g) = (one(), one(), one(), one());
    checked_sum((0..terms).map(|k| {
        if k > 0 {
            xk = xk.clone() * x.clone();
            qtri = qtri.clone() * qk.clone();
            qk = qk.clone() * qb.clone();
            g = g.clone() * bracket(2.0 * mu * theta(k) + k as f64, q);
        }
        let c = if triangular { qtri.clone() } else { one() };
        c * xk.clone() / g.clone()
    }))
}

/// `e(z) = Σ z^k/[k]_q!`.
pub fn q_exp_small(z: f64, q: f64, terms: u64) -> f64 {
    small(&dunkl_series(z, 0.0, q, false, terms))
}

/// `E(z) = Σ q^{k(k−1)/2} z^k/[k]_q!`.
pub fn q_exp_big(z: f64, q: f64, terms: u64) -> f64 {
    small(&dunkl_series(z, 0.0, q, true, terms))
}

pub fn dunkl_exp_e(x: f64, mu: f64, q: f64, terms: u64) -> f64 {
    small(&dunkl_series(x, mu, q, false, terms))
}

pub fn dunkl_exp_big(x: f64, mu: f64, q: f64, terms: u64) -> f64 {
    small(&dunkl_series(x, mu, q, true, terms))
}

/// The operators whose kernels the oracle knows.
#[derive(Debug, Clone, Copy)]
pub enum Op {
    /// `D*_{n,q}` with nodes `(1 − q^{2μθ_k+k})/(q^{k−2}(1 − q^n))`.
    DStar { n: u32, q: f64, mu: f64 },
    /// Içöz's operator with nodes `(1 − q^{2μθ_k+k})/(1 − q^n)`.
    Icoz { n: u32, q: f64, mu: f64 },
    /// Sucu's operator with nodes `(k + 2μθ_k)/n`.
    Sucu { n: u32, mu: f64 },
    /// Classical Szász with nodes `k/n`.
    Szasz { n: u32 },
}

impl Op {
    /// Kernel terms `0..count`, with running products for the powers and γ.
    fn terms(&self, x: f64, count: u64) -> Vec<F> {
        let (a, q, factor): (F, F, Box<dyn Fn(u64) -> F>) = match *self {
            Op::DStar { n, q, mu } => (
                bracket(f64::from(n), q) * big(x),
                big(q),
                Box::new(move |i| bracket(2.0 * mu * theta(i) + i as f64, q)),
            ),
            Op::Icoz { n, q, mu } => (
                bracket(f64::from(n), q) * big(x),
                one(),
                Box::new(move |i| bracket(2.0 * mu * theta(i) + i as f64, q)),
            ),
            Op::Sucu { n, mu } => (
                big(f64::from(n) * x),
                one(),
                Box::new(move |i| big(i as f64 + 2.0 * mu * theta(i))),
            ),
            Op::Szasz { n } => (big(f64::from(n) * x), one(), Box::new(|i| big(i as f64))),
        };
        let mut out = Vec::with_capacity(count as usize);
        // a^k, q^{k(k−1)/2}, γ(k)
        let (mut ak, mut qk, mut qtri, mut g) = (one(), one(), one(), one());
        for k in 0..count {
            if k > 0 {
                ak = ak * a.clone();
                qtri = qtri * qk.clone();
                qk = qk * q.clone();
                g = g * factor(k);
            }
            out.push(ak.clone() * qtri.clone() / g.clone());
        }
        out
    }

    pub fn node(&self, k: u64) -> F {
        match *self {
            Op::DStar { n, q, mu } => {
                let num = one() - pow(q, 2.0 * mu * theta(k) + k as f64);
                num / (powi(&big(q), k as i64 - 2) * (one() - powi(&big(q), i64::from(n))))
            }
            Op::Icoz { n, q, mu } => {
                let num = one() - pow(q, 2.0 * mu * theta(k) + k as f64);
                num / (one() - powi(&big(q), i64::from(n)))
            }
            Op::Sucu { n, mu } => big(k as f64 + 2.0 * mu * theta(k)) / big(f64::from(n)),
            Op::Szasz { n } => big(k as f64) / big(f64::from(n)),
        }
    }

    /// `Σ_k term_k f(t_k) / Σ_k term_k` over `terms` terms.
    pub fn apply(&self, f: impl Fn(&F) -> F, x: f64, terms: u64) -> f64 {
        let ws = self.terms(x, terms);
        let total = checked_sum(ws.iter().cloned());
        let num = (0..terms)
            .zip(&ws)
            .fold(big(0.0), |acc, (k, w)| acc + w.clone() * f(&self.node(k)));
        small(&(num / total))
    }

    /// Normalized weight of index `k`.
    pub fn weight(&self, k: u64, x: f64, terms: u64) -> f64 {
        let ws = self.terms(x, terms);
        let total = checked_sum(ws.iter().cloned());
        small(&(ws[k as usize].clone() / total))
    }
}

pub fn e0(_: &F) -> F {
    one()
}

pub fn e1(t: &F) -> F {
    t.clone()
}

pub fn e2(t: &F) -> F {
    t.clone() * t.clone()
}

/// `e^{−t}`, flushed to zero once it is far below any double.
pub fn exp_neg(t: &F) -> F {
    if small(t) > 1000.0 {
        return big(0.0);
    }
    (-t.clone()).exp()
}

/// `(t − x)²`.
pub fn centered2(x: f64) -> impl Fn(&F) -> F {
    move |t: &F| {
        let d = t.clone() - big(x);
        d.clone() * d
    }
}

/// The printed second-moment bounds, `(base, base)` ± the `[1 ∓ 2μ]_q` term.
pub fn moment_bounds(central: bool, x: f64, n: u32, q: f64, mu: f64) -> (f64, f64) {
    let base = if central {
        (one() - big(q)) * big(x) * big(x)
    } else {
        big(q) * big(x) * big(x)
    };
    let c = pow(q, 2.0 * (1.0 + mu)) / bracket(f64::from(n), q) * big(x);
    (
        small(&(base.clone() + c.clone() * bracket(1.0 - 2.0 * mu, q))),
        small(&(base + c * bracket(1.0 + 2.0 * mu, q))),
    )
}

pub fn rel_err(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs().max(f64::MIN_POSITIVE)
}
