use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Growth majorant `|f(t)| ≤ constant + coeff · t^power` on `[0, ∞)`.
///
/// With it the operator can certify the contribution of the truncated nodes
/// rigorously, even for unbounded `f`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Growth {
    pub constant: f64,
    pub coeff: f64,
    pub power: f64,
}

impl Growth {
    pub fn bounded(sup: f64) -> Self {
        Self {
            constant: sup.abs(),
            coeff: 0.0,
            power: 0.0,
        }
    }

    pub fn polynomial(constant: f64, coeff: f64, power: f64) -> Self {
        Self {
            constant,
            coeff,
            power,
        }
    }
}

/// Lipschitz data: `|f(u) − f(v)| ≤ m |u − v|^nu`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lipschitz {
    pub m: f64,
    pub nu: f64,
}

/// Sup norms of `g`, `g′` and `g″` on `[0, ∞)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivativeBounds {
    pub sup: f64,
    pub sup_d1: f64,
    pub sup_d2: f64,
}

impl DerivativeBounds {
    /// `‖g‖_{C_B²} = ‖g‖ + ‖g′‖ + ‖g″‖`.
    pub fn cb2_norm(&self) -> f64 {
        self.sup + self.sup_d1 + self.sup_d2
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct FunctionFlags {
    pub bounded: bool,
    pub uniformly_continuous: bool,
    pub weighted_space_member: bool,
}

/// A named real function on `[0, ∞)` together with what is known about it
/// analytically.
#[derive(Clone)]
pub struct TestFunction {
    name: String,
    eval: RealFn,
    modulus: Option<RealFn>,
    lipschitz: Option<Lipschitz>,
    derivatives: Option<DerivativeBounds>,
    growth: Option<Growth>,
    flags: FunctionFlags,
}

impl fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TestFunction")
            .field("name", &self.name)
            .field("exact_modulus", &self.modulus.is_some())
            .field("lipschitz", &self.lipschitz)
            .field("derivatives", &self.derivatives)
            .field("growth", &self.growth)
            .field("flags", &self.flags)
            .finish()
    }
}

impl TestFunction {
    pub fn new(name: impl Into<String>, eval: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            name: name.into(),
            eval: Arc::new(eval),
            modulus: None,
            lipschitz: None,
            derivatives: None,
            growth: None,
            flags: FunctionFlags::default(),
        }
    }

    /// The monomial `e_j(t) = t^j`.
    pub fn monomial(j: u32) -> Self {
        let growth = if j == 0 {
            Growth::bounded(1.0)
        } else {
            Growth::polynomial(0.0, 1.0, f64::from(j))
        };
        let f = TestFunction::new(format!("e{j}"), move |t| t.powi(j as i32))
            .with_growth(growth)
            .with_flags(FunctionFlags {
                bounded: j == 0,
                uniformly_continuous: j <= 1,
                weighted_space_member: j <= 2,
            });
        match j {
            0 => f.with_modulus(|_| 0.0),
            1 => f.with_modulus(|d| d).with_lipschitz(1.0, 1.0),
            _ => f,
        }
    }

    /// `(t − x)^order`, the integrand of the central moments.
    pub fn centered_power(x: f64, order: u32) -> Self {
        // |t − x|^j ≤ 2^{j−1}(x^j + t^j)
        let c = 2f64.powi(order as i32 - 1);
        TestFunction::new(format!("(e1-{x})^{order}"), move |t| (t - x).powi(order as i32))
            .with_growth(Growth::polynomial(c * x.powi(order as i32), c, f64::from(order)))
    }

    pub fn with_modulus(mut self, omega: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.modulus = Some(Arc::new(omega));
        self.flags.uniformly_continuous = true;
        self
    }

    pub fn with_lipschitz(mut self, m: f64, nu: f64) -> Self {
        self.lipschitz = Some(Lipschitz { m, nu });
        self.flags.uniformly_continuous = true;
        self
    }

    pub fn with_derivative_bounds(mut self, sup: f64, sup_d1: f64, sup_d2: f64) -> Self {
        self.derivatives = Some(DerivativeBounds { sup, sup_d1, sup_d2 });
        self.flags.bounded = true;
        self.flags.uniformly_continuous = true;
        self
    }

    pub fn with_growth(mut self, growth: Growth) -> Self {
        self.growth = Some(growth);
        self
    }

    pub fn with_flags(mut self, flags: FunctionFlags) -> Self {
        self.flags = FunctionFlags {
            bounded: flags.bounded || self.derivatives.is_some(),
            uniformly_continuous: flags.uniformly_continuous
                || self.lipschitz.is_some()
                || self.modulus.is_some(),
            weighted_space_member: flags.weighted_space_member,
        };
        self
    }

    /// Checks that the metadata does not contradict itself.
    pub fn validate(&self) -> Result<()> {
        if let Some(l) = self.lipschitz {
            if !(l.m > 0.0 && l.nu > 0.0 && l.nu <= 1.0) {
                return Err(Error::invalid(
                    "lipschitz",
                    format!("{}: need M > 0 and 0 < ν ≤ 1, got M={}, ν={}", self.name, l.m, l.nu),
                ));
            }
            if !self.flags.uniformly_continuous {
                return Err(Error::invalid("flags", "Lipschitz functions are uniformly continuous"));
            }
        }
        if let Some(d) = self.derivatives {
            if !(d.sup >= 0.0 && d.sup_d1 >= 0.0 && d.sup_d2 >= 0.0) {
                return Err(Error::invalid("derivatives", "sup norms must be nonnegative"));
            }
            if !self.flags.bounded {
                return Err(Error::invalid("flags", "C_B² functions are bounded"));
            }
        }
        if let Some(g) = self.growth {
            if !(g.constant >= 0.0 && g.coeff >= 0.0 && g.power >= 0.0) {
                return Err(Error::invalid("growth", "growth majorant must be nonnegative"));
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, t: f64) -> f64 {
        (self.eval)(t)
    }

    pub fn exact_modulus(&self, delta: f64) -> Option<f64> {
        self.modulus.as_ref().map(|w| w(delta))
    }

    pub fn has_exact_modulus(&self) -> bool {
        self.modulus.is_some()
    }

    pub fn lipschitz(&self) -> Option<Lipschitz> {
        self.lipschitz
    }

    pub fn derivative_bounds(&self) -> Option<DerivativeBounds> {
        self.derivatives
    }

    pub fn growth(&self) -> Option<&Growth> {
        self.growth.as_ref()
    }

    pub fn flags(&self) -> FunctionFlags {
        self.flags
    }

    /// `α f + β g`, keeping a growth majorant when both sides have one.
    pub fn linear_combination(alpha: f64, f: &TestFunction, beta: f64, g: &TestFunction) -> Self {
        let (ff, gg) = (f.eval.clone(), g.eval.clone());
        let mut h = TestFunction::new(format!("{alpha}*{}+{beta}*{}", f.name, g.name), move |t| {
            alpha * ff(t) + beta * gg(t)
        });
        if let (Some(a), Some(b)) = (f.growth, g.growth) {
            // |t^p| ≤ 1 + t^P for p ≤ P
            let power = a.power.max(b.power);
            let ca = alpha.abs();
            let cb = beta.abs();
            h.growth = Some(Growth {
                constant: ca * (a.constant + a.coeff) + cb * (b.constant + b.coeff),
                coeff: ca * a.coeff + cb * b.coeff,
                power,
            });
        }
        h
    }
}
