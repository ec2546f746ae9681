//! Named test functions with their known analytic data.

use crate::bivariate::TestFunction2D;
use crate::operators::{FunctionFlags, Growth, TestFunction};

pub const NAMES: [&str; 10] = [
    "const", "e0", "e1", "e2", "affine", "exp_neg", "sin", "cos", "inv1p", "sqrt",
];

pub const NAMES_2D: [&str; 10] = [
    "const", "e00", "e10", "e01", "e11", "e20", "e02", "exp_sum", "sin_exp", "sqrt_prod",
];

const ALL_FLAGS: FunctionFlags = FunctionFlags {
    bounded: true,
    uniformly_continuous: true,
    weighted_space_member: true,
};

fn trig_modulus(d: f64) -> f64 {
    if d <= std::f64::consts::PI {
        2.0 * (d / 2.0).sin()
    } else {
        2.0
    }
}

/// `t^ν` for `0 < ν ≤ 1`: Hölder with constant 1, `ω(δ) = δ^ν`.
pub fn power(nu: f64) -> TestFunction {
    TestFunction::new(format!("t^{nu}"), move |t: f64| t.powf(nu))
        .with_growth(Growth::polynomial(1.0, 1.0, 1.0))
        .with_modulus(move |d| d.powf(nu))
        .with_lipschitz(1.0, nu)
        .with_flags(FunctionFlags {
            weighted_space_member: true,
            ..FunctionFlags::default()
        })
}

pub fn get(name: &str) -> Option<TestFunction> {
    let f = match name {
        "const" => TestFunction::new("const", |_| 1.0)
            .with_growth(Growth::bounded(1.0))
            .with_modulus(|_| 0.0)
            .with_lipschitz(1.0, 1.0)
            .with_derivative_bounds(1.0, 0.0, 0.0)
            .with_flags(ALL_FLAGS),
        "e0" | "e1" | "e2" => TestFunction::monomial(u32::from(name.as_bytes()[1] - b'0')),
        "affine" => TestFunction::new("affine", |t| 2.0 * t + 1.0)
            .with_growth(Growth::polynomial(1.0, 2.0, 1.0))
            .with_modulus(|d| 2.0 * d)
            .with_lipschitz(2.0, 1.0)
            .with_flags(FunctionFlags {
                weighted_space_member: true,
                ..FunctionFlags::default()
            }),
        "exp_neg" => TestFunction::new("exp_neg", |t: f64| (-t).exp())
            .with_growth(Growth::bounded(1.0))
            .with_modulus(|d: f64| -(-d).exp_m1())
            .with_lipschitz(1.0, 1.0)
            .with_derivative_bounds(1.0, 1.0, 1.0)
            .with_flags(ALL_FLAGS),
        "sin" => TestFunction::new("sin", f64::sin)
            .with_growth(Growth::bounded(1.0))
            .with_modulus(trig_modulus)
            .with_lipschitz(1.0, 1.0)
            .with_derivative_bounds(1.0, 1.0, 1.0)
            .with_flags(ALL_FLAGS),
        "cos" => TestFunction::new("cos", f64::cos)
            .with_growth(Growth::bounded(1.0))
            .with_modulus(trig_modulus)
            .with_lipschitz(1.0, 1.0)
            .with_derivative_bounds(1.0, 1.0, 1.0)
            .with_flags(ALL_FLAGS),
        "inv1p" => TestFunction::new("inv1p", |t| 1.0 / (1.0 + t))
            .with_growth(Growth::bounded(1.0))
            .with_modulus(|d| d / (1.0 + d))
            .with_lipschitz(1.0, 1.0)
            .with_derivative_bounds(1.0, 1.0, 2.0)
            .with_flags(ALL_FLAGS),
        "sqrt" => TestFunction::new("sqrt", f64::sqrt)
            .with_growth(Growth::polynomial(1.0, 1.0, 1.0))
            .with_modulus(f64::sqrt)
            .with_lipschitz(1.0, 0.5)
            .with_flags(FunctionFlags {
                weighted_space_member: true,
                ..FunctionFlags::default()
            }),
        _ => return None,
    };
    Some(f)
}

/// Bivariate registry. `x_max` is the window end, which fixes the Lipschitz
/// constant of `prod(u, v) = u·v`.
pub fn get2(name: &str, x_max: f64) -> Option<TestFunction2D> {
    let f = match name {
        "const" => TestFunction2D::product(get("const")?, get("e0")?)
            .with_modulus(|_, _| 0.0)
            .with_lipschitz(1.0, 1.0, 1.0),
        "e00" | "e10" | "e01" | "e11" | "e20" | "e02" => {
            let b = name.as_bytes();
            TestFunction2D::monomial(u32::from(b[1] - b'0'), u32::from(b[2] - b'0'))
        }
        "exp_sum" => TestFunction2D::product(get("exp_neg")?, get("exp_neg")?)
            .with_modulus(|d1: f64, d2: f64| -(-(d1 + d2)).exp_m1()),
        "sin_exp" => TestFunction2D::product(get("sin")?, get("exp_neg")?),
        "sqrt_prod" => TestFunction2D::product(get("sqrt")?, get("sqrt")?).with_lipschitz(1.0, 0.5, 0.5),
        "prod" => TestFunction2D::product(get("e1")?, get("e1")?).with_lipschitz(x_max, 1.0, 1.0),
        _ => return None,
    };
    Some(f)
}
