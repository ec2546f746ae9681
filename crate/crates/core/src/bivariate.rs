//! Tensor-product extension
//!
//! ```text
//! D*_{n₁,n₂}(f; x, y) = 1/(E_{μ₁,q₁}([n₁]x) E_{μ₂,q₂}([n₂]y))
//!     Σ_{k₁,k₂} ([n₁]x)^{k₁} ([n₂]y)^{k₂} q₁^{k₁(k₁−1)/2} q₂^{k₂(k₂−1)/2}
//!     / (γ_{μ₁,q₁}(k₁) γ_{μ₂,q₂}(k₂)) · f(t_{k₁}, s_{k₂})
//! ```

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::operators::{apply, Growth, Kernel, OperatorParams, OperatorValue, TestFunction};
use crate::series::NeumaierSum;

type RealFn2 = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

const FACTOR_CHECK_POINTS: usize = 10;
const FACTOR_CHECK_STEP: f64 = 0.5;
const FACTOR_CHECK_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BivariateParams {
    pub px: OperatorParams,
    pub py: OperatorParams,
}

impl BivariateParams {
    pub fn new(px: OperatorParams, py: OperatorParams) -> Self {
        Self { px, py }
    }

    pub fn swapped(&self) -> Self {
        Self {
            px: self.py,
            py: self.px,
        }
    }
}

/// Bivariate Lipschitz data `|f(u,v) − f(x,y)| ≤ M |u−x|^{ν₁} |v−y|^{ν₂}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lipschitz2 {
    pub m: f64,
    pub nu1: f64,
    pub nu2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

/// A named function on the closed quadrant.
#[derive(Clone)]
pub struct TestFunction2D {
    name: String,
    eval: RealFn2,
    factors: Option<(TestFunction, TestFunction)>,
    lipschitz: Option<Lipschitz2>,
    modulus: Option<RealFn2>,
    growth: Option<(Growth, Growth)>,
}

impl fmt::Debug for TestFunction2D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TestFunction2D")
            .field("name", &self.name)
            .field("separable", &self.factors.is_some())
            .field("lipschitz", &self.lipschitz)
            .field("exact_modulus", &self.modulus.is_some())
            .field("growth", &self.growth)
            .finish()
    }
}

impl TestFunction2D {
    pub fn new(name: impl Into<String>, eval: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            name: name.into(),
            eval: Arc::new(eval),
            factors: None,
            lipschitz: None,
            modulus: None,
            growth: None,
        }
    }

    /// `g ⊗ h`. Growth is inherited from the factors, and so is a modulus
    /// bound `‖g‖ ω(h; δ₂) + ‖h‖ ω(g; δ₁)` when both factors are bounded and
    /// carry exact moduli.
    pub fn product(g: TestFunction, h: TestFunction) -> Self {
        let (ge, he) = (g.clone(), h.clone());
        let mut f = Self::new(format!("{}*{}", g.name(), h.name()), move |u, v| ge.eval(u) * he.eval(v));
        if let (Some(a), Some(b)) = (g.growth(), h.growth()) {
            f.growth = Some((*a, *b));
            let sup = |gr: &Growth| (gr.coeff == 0.0).then_some(gr.constant);
            if let (Some(sg), Some(sh), true, true) =
                (sup(a), sup(b), g.has_exact_modulus(), h.has_exact_modulus())
            {
                let (gm, hm) = (g.clone(), h.clone());
                f.modulus = Some(Arc::new(move |d1, d2| {
                    sg * hm.exact_modulus(d2).unwrap_or(f64::NAN)
                        + sh * gm.exact_modulus(d1).unwrap_or(f64::NAN)
                }));
            }
        }
        f.factors = Some((g, h));
        f
    }

    /// `e_{i,j}(u, v) = u^i v^j`.
    pub fn monomial(i: u32, j: u32) -> Self {
        let mut f = Self::product(TestFunction::monomial(i), TestFunction::monomial(j));
        f.name = format!("e{i}{j}");
        f
    }

    /// Attaches a factorization `f = g ⊗ h` after checking it on a 10×10 grid.
    pub fn with_factorization(mut self, g: TestFunction, h: TestFunction) -> Result<Self> {
        for i in 0..FACTOR_CHECK_POINTS {
            for j in 0..FACTOR_CHECK_POINTS {
                let (u, v) = (i as f64 * FACTOR_CHECK_STEP, j as f64 * FACTOR_CHECK_STEP);
                let lhs = self.eval(u, v);
                let rhs = g.eval(u) * h.eval(v);
                if !((lhs - rhs).abs() <= FACTOR_CHECK_TOL * lhs.abs().max(1.0)) {
                    return Err(Error::invalid(
                        "factors",
                        format!("{} ≠ {}·{} at ({u}, {v}): {lhs} vs {rhs}", self.name, g.name(), h.name()),
                    ));
                }
            }
        }
        if self.growth.is_none() {
            if let (Some(a), Some(b)) = (g.growth(), h.growth()) {
                self.growth = Some((*a, *b));
            }
        }
        self.factors = Some((g, h));
        Ok(self)
    }

    pub fn with_lipschitz(mut self, m: f64, nu1: f64, nu2: f64) -> Self {
        self.lipschitz = Some(Lipschitz2 { m, nu1, nu2 });
        self
    }

    /// Exact `ω̃(f; δ₁, δ₂)` or a rigorous upper bound for it.
    pub fn with_modulus(mut self, omega: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        self.modulus = Some(Arc::new(omega));
        self
    }

    /// Growth majorant `|f(u, v)| ≤ G₁(u) G₂(v)`.
    pub fn with_growth(mut self, gx: Growth, gy: Growth) -> Self {
        self.growth = Some((gx, gy));
        self
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(l) = self.lipschitz {
            let ok = |nu: f64| nu > 0.0 && nu <= 1.0;
            if !(l.m > 0.0 && ok(l.nu1) && ok(l.nu2)) {
                return Err(Error::invalid(
                    "lipschitz",
                    format!("{}: need M > 0 and 0 < ν₁, ν₂ ≤ 1", self.name),
                ));
            }
        }
        if let Some((g, h)) = &self.factors {
            g.validate()?;
            h.validate()?;
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, u: f64, v: f64) -> f64 {
        (self.eval)(u, v)
    }

    pub fn factors(&self) -> Option<(&TestFunction, &TestFunction)> {
        self.factors.as_ref().map(|(g, h)| (g, h))
    }

    pub fn lipschitz(&self) -> Option<Lipschitz2> {
        self.lipschitz
    }

    pub fn exact_modulus(&self, d1: f64, d2: f64) -> Option<f64> {
        self.modulus.as_ref().map(|w| w(d1, d2))
    }

    pub fn growth(&self) -> Option<(Growth, Growth)> {
        self.growth
    }

    /// `(u, v) ↦ f(v, u)`, with all metadata swapped to match.
    pub fn swapped(&self) -> Self {
        let e = self.eval.clone();
        Self {
            name: format!("swap({})", self.name),
            eval: Arc::new(move |u, v| e(v, u)),
            factors: self.factors.as_ref().map(|(g, h)| (h.clone(), g.clone())),
            lipschitz: self.lipschitz.map(|l| Lipschitz2 {
                m: l.m,
                nu1: l.nu2,
                nu2: l.nu1,
            }),
            modulus: self.modulus.as_ref().map(|w| {
                let w = w.clone();
                Arc::new(move |d1, d2| w(d2, d1)) as RealFn2
            }),
            growth: self.growth.map(|(a, b)| (b, a)),
        }
    }
}

fn check_point(x: f64, y: f64) -> Result<()> {
    if !(x >= 0.0 && y >= 0.0 && x.is_finite() && y.is_finite()) {
        return Err(Error::Domain(format!("need finite x, y ≥ 0, got ({x}, {y})")));
    }
    Ok(())
}

fn product_value(a: OperatorValue, b: OperatorValue) -> OperatorValue {
    let value = a.value * b.value;
    OperatorValue {
        value,
        terms_used: a.terms_used * b.terms_used,
        tail_bound: a.value.abs() * b.tail_bound + b.value.abs() * a.tail_bound + a.tail_bound * b.tail_bound,
        rounding_bound: a.value.abs() * b.rounding_bound
            + b.value.abs() * a.rounding_bound
            + a.rounding_bound * b.rounding_bound
            + f64::EPSILON * value.abs(),
    }
}

/// `D*_{n₁,n₂}(f; x, y)`, using the product of univariate sums when `f` is
/// separable and the double sum otherwise.
pub fn apply2(f: &TestFunction2D, x: f64, y: f64, bp: &BivariateParams) -> Result<OperatorValue> {
    check_point(x, y)?;
    match f.factors() {
        Some((g, h)) => Ok(product_value(apply(g, x, &bp.px)?, apply(h, y, &bp.py)?)),
        None => apply2_double_sum(f, x, y, bp),
    }
}

/// The double sum, evaluated as an outer `k₁` loop over inner `k₂` sums.
///
/// With `a = tail/total` and `g = growth_total/total` per axis the truncation
/// certificate is
/// `gt₁(g₂ + gt₂) + g₁ gt₂ + |V| (a₁(1 + a₂) + a₂)`.
pub fn apply2_double_sum(
    f: &TestFunction2D,
    x: f64,
    y: f64,
    bp: &BivariateParams,
) -> Result<OperatorValue> {
    check_point(x, y)?;
    if x == 0.0 && y == 0.0 {
        let v = f.eval(0.0, 0.0);
        if !v.is_finite() {
            return Err(Error::FunctionDomain {
                name: f.name().to_string(),
                t: 0.0,
            });
        }
        return Ok(OperatorValue {
            value: v,
            terms_used: 1,
            tail_bound: 0.0,
            rounding_bound: 0.0,
        });
    }
    let growth = f.growth();
    let kx = Kernel::build(&bp.px.family(), x, growth.as_ref().map(|g| &g.0), &bp.px.trunc)?;
    let ky = Kernel::build(&bp.py.family(), y, growth.as_ref().map(|g| &g.1), &bp.py.trunc)?;
    let (dx, dy) = (kx.scaled_total(), ky.scaled_total());

    let mut outer = NeumaierSum::new();
    let mut outer_abs = NeumaierSum::new();
    let mut max_abs = 0.0_f64;
    for (&t1, &u) in kx.scaled_terms().iter().zip(kx.nodes()) {
        if t1 == 0.0 {
            continue;
        }
        let mut inner = NeumaierSum::new();
        let mut inner_abs = NeumaierSum::new();
        for (&t2, &v) in ky.scaled_terms().iter().zip(ky.nodes()) {
            if t2 == 0.0 {
                continue;
            }
            let fv = f.eval(u, v);
            if !fv.is_finite() {
                return Err(Error::FunctionDomain {
                    name: f.name().to_string(),
                    t: if fv.is_nan() { u } else { v },
                });
            }
            inner.add(t2 / dy * fv);
            inner_abs.add(t2 / dy * fv.abs());
            max_abs = max_abs.max(fv.abs());
        }
        outer.add(t1 / dx * inner.value());
        outer_abs.add(t1 / dx * inner_abs.value());
    }
    let value = outer.value();

    let (ax, ay) = (kx.weight_tail(), ky.weight_tail());
    let mass_tail = ax * (1.0 + ay) + ay;
    let f_tail = if growth.is_some() {
        let (gx, gtx) = (kx.scaled_growth_total() / dx, kx.scaled_growth_tail() / dx);
        let (gy, gty) = (ky.scaled_growth_total() / dy, ky.scaled_growth_tail() / dy);
        gtx * (gy + gty) + gx * gty
    } else {
        max_abs * mass_tail
    };
    let k = (kx.len() + ky.len()) as f64;
    Ok(OperatorValue {
        value,
        terms_used: kx.len() * ky.len(),
        tail_bound: f_tail + value.abs() * mass_tail,
        rounding_bound: 8.0 * (k + 2.0) * f64::EPSILON * (outer_abs.value() + value.abs()),
    })
}

/// `D*_{n₁,n₂}(e_{i,j}; x, y)` for `i, j ∈ {0, 1, 2}`.
pub fn moment2(i: u32, j: u32, x: f64, y: f64, bp: &BivariateParams) -> Result<OperatorValue> {
    if i > 2 || j > 2 {
        return Err(Error::invalid("i, j", format!("moments are provided for i, j ≤ 2, got ({i}, {j})")));
    }
    apply2(&TestFunction2D::monomial(i, j), x, y, bp)
}

/// `D*_{n₁,n₂}((e_{1,0} − x)^r; x, y)` or its `y` counterpart, `r ∈ {1, 2}`.
pub fn central_moment2(axis: Axis, order: u32, x: f64, y: f64, bp: &BivariateParams) -> Result<OperatorValue> {
    if !(1..=2).contains(&order) {
        return Err(Error::invalid("order", format!("central moments have order 1 or 2, got {order}")));
    }
    let f = match axis {
        Axis::X => TestFunction2D::product(TestFunction::centered_power(x, order), TestFunction::monomial(0)),
        Axis::Y => TestFunction2D::product(TestFunction::monomial(0), TestFunction::centered_power(y, order)),
    };
    apply2(&f, x, y, bp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{central_moment, moment};

    fn bp(n1: u32, q1: f64, mu1: f64, n2: u32, q2: f64, mu2: f64) -> BivariateParams {
        BivariateParams::new(
            OperatorParams::from_values(n1, q1, mu1).unwrap(),
            OperatorParams::from_values(n2, q2, mu2).unwrap(),
        )
    }

    fn close(a: OperatorValue, b: f64, slack: f64) -> bool {
        (a.value - b).abs() <= a.error_bound() + slack
    }

    #[test]
    fn monomial_examples() {
        let p = bp(10, 0.9, 1.0, 6, 0.7, 0.6);
        assert!(close(moment2(0, 0, 1.3, 2.1, &p).unwrap(), 1.0, 1e-12));
        assert!(close(moment2(1, 0, 2.0, 3.0, &p).unwrap(), 1.8, 1e-12));
        assert!(close(moment2(0, 1, 5.0, 2.0, &p).unwrap(), 1.4, 1e-12));
        assert_eq!(moment2(1, 0, 0.0, 9.0, &p).unwrap().value, 0.0);
        assert!(moment2(3, 0, 1.0, 1.0, &p).is_err());
    }

    #[test]
    fn reduces_to_univariate_along_axes() {
        let p = bp(4, 0.5, 1.0, 8, 0.8, 2.5);
        let m = moment2(2, 0, 1.0, 1.0, &p).unwrap();
        let u = moment(2, 1.0, &p.px).unwrap();
        assert!((m.value - u.value).abs() <= m.error_bound() + u.error_bound());
        let c = central_moment2(Axis::X, 2, 1.0, 1.0, &p).unwrap();
        let cu = central_moment(2, 1.0, &p.px).unwrap();
        assert!((c.value - cu.value).abs() <= c.error_bound() + cu.error_bound());
        let c1 = central_moment2(Axis::X, 1, 5.0, 1.0, &bp(20, 0.9, 1.0, 4, 0.5, 1.0)).unwrap();
        assert!(close(c1, -0.5, 1e-12));
        assert_eq!(central_moment2(Axis::Y, 2, 1.0, 0.0, &p).unwrap().value, 0.0);
    }

    #[test]
    fn double_sum_matches_product() {
        let p = bp(4, 0.5, 1.0, 4, 0.5, 1.0);
        let decay = || {
            TestFunction::new("exp(-t)", |t: f64| (-t).exp()).with_growth(Growth::bounded(1.0))
        };
        let f = TestFunction2D::product(decay(), decay());
        let fast = apply2(&f, 1.0, 1.0, &p).unwrap();
        let plain = TestFunction2D::new("exp(-u-v)", |u: f64, v: f64| (-u - v).exp())
            .with_growth(Growth::bounded(1.0), Growth::bounded(1.0));
        let slow = apply2(&plain, 1.0, 1.0, &p).unwrap();
        assert!((fast.value - slow.value).abs() <= fast.error_bound() + slow.error_bound());
    }

    #[test]
    fn factorization_is_checked() {
        let f = TestFunction2D::new("uv", |u, v| u * v);
        assert!(f
            .clone()
            .with_factorization(TestFunction::monomial(1), TestFunction::monomial(1))
            .is_ok());
        assert!(f
            .with_factorization(TestFunction::monomial(1), TestFunction::monomial(2))
            .is_err());
    }

    #[test]
    fn swapping_axes() {
        let p = bp(4, 0.5, 1.0, 16, 0.9, 0.6);
        let f = TestFunction2D::new("u+v^2", |u: f64, v: f64| u + v * v)
            .with_growth(Growth::polynomial(1.0, 1.0, 1.0), Growth::polynomial(1.0, 1.0, 2.0));
        let a = apply2(&f, 1.5, 0.5, &p).unwrap();
        let b = apply2(&f.swapped(), 0.5, 1.5, &p.swapped()).unwrap();
        assert!((a.value - b.value).abs() <= a.error_bound() + b.error_bound());
    }

    #[test]
    fn origin_is_exact() {
        let f = TestFunction2D::new("cos(u)cos(v)", |u: f64, v: f64| u.cos() * v.cos());
        let v = apply2(&f, 0.0, 0.0, &bp(4, 0.5, 1.0, 4, 0.5, 1.0)).unwrap();
        assert_eq!(v.value, 1.0);
    }
}
