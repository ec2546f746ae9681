use proptest::prelude::*;
use proptest::sample::select;

use qdunkl_core::analysis::{grid_modulus, modulus_of_continuity, registry, Window};
use qdunkl_core::bivariate::{apply2, apply2_double_sum};
use qdunkl_core::dunkl::{dunkl_exp_big, dunkl_exp_e, gamma_mu_q, gamma_mu_q_explicit};
use qdunkl_core::operators::{apply, central_moment, moment, moment_bounds, node, node_direct, MomentKind};
use qdunkl_core::qcore::{
    q_binomial, q_exp_big, q_exp_big_product, q_exp_small, q_exp_small_product, q_factorial, q_integer,
};
use qdunkl_core::*;

const SWEEP_N: [u32; 9] = [1, 2, 4, 8, 16, 32, 64, 128, 256];
const SWEEP_Q: [f64; 3] = [0.3, 0.7, 0.95];
const SWEEP_MU: [f64; 4] = [0.0, 0.6, 1.0, 2.5];

fn q(v: f64) -> QParam {
    QParam::new(v).unwrap()
}

fn params(n: u32, qv: f64, mu: f64) -> OperatorParams {
    OperatorParams::from_values(n, qv, mu).unwrap()
}

fn operator_params() -> impl Strategy<Value = OperatorParams> {
    (select(SWEEP_N.to_vec()), select(SWEEP_Q.to_vec()), select(SWEEP_MU.to_vec()))
        .prop_map(|(n, qv, mu)| params(n, qv, mu))
}

fn registry_function() -> impl Strategy<Value = TestFunction> {
    select(registry::NAMES.to_vec()).prop_map(|name| registry::get(name).unwrap())
}

fn bounded_function() -> impl Strategy<Value = TestFunction> {
    select(vec!["const", "exp_neg", "sin", "cos", "inv1p"]).prop_map(|name| registry::get(name).unwrap())
}

#[test]
fn q_integer_increasing_and_limit() {
    for qv in [0.1, 0.5, 0.9, 0.99] {
        let qp = q(qv);
        for n in 1..=64u32 {
            let (prev, cur) = (q_integer(n - 1, qp), q_integer(n, qp));
            assert!(cur >= prev, "q={qv} n={n}");
            // Strict growth is only visible while q^n is above the rounding unit of [n]_q.
            if qv.powi(n as i32) > 2.0 * f64::EPSILON * cur {
                assert!(cur > prev, "q={qv} n={n}: {prev} vs {cur}");
            }
        }
    }
}

#[test]
fn q_integer_near_one_within_1e6() {
    let near_one = q(1.0 - 1e-8);
    let far: Vec<(u32, f64)> = (0..=64u32)
        .map(|n| (n, (q_integer(n, near_one) - f64::from(n)).abs()))
        .filter(|&(_, d)| d >= 1e-6)
        .collect();
    assert!(far.is_empty(), "|[n]_q − n| ≥ 1e-6 for (n, gap) = {far:?}");
}

#[test]
fn q_integer_near_one_gap_is_second_order() {
    // n − [n]_q = Σ_{j<n} (1 − q^j) ≤ (1 − q) n(n−1)/2
    for eps in [1e-4, 1e-6, 1e-8] {
        let qp = q(1.0 - eps);
        for n in 0..=64u32 {
            let gap = f64::from(n) - q_integer(n, qp);
            let bound = eps * f64::from(n) * f64::from(n.saturating_sub(1)) / 2.0;
            assert!(gap >= -1e-12 && gap <= bound * (1.0 + 1e-6) + 1e-12, "n={n} ε={eps}: {gap} vs {bound}");
        }
    }
}

#[test]
fn q_factorial_recurrence_and_binomial_symmetry() {
    for qv in [0.1, 0.5, 0.9, 0.99] {
        let qp = q(qv);
        for n in 1..=40u32 {
            assert_eq!(q_factorial(n, qp), q_factorial(n - 1, qp) * q_integer(n, qp));
            for k in 0..=n {
                let a = q_binomial(n, k, qp).unwrap();
                let b = q_binomial(n, n - k, qp).unwrap();
                assert!((a - b).abs() <= 1e-12 * a.abs(), "n={n} k={k}");
            }
        }
    }
}

#[test]
fn q_exponential_series_match_products() {
    let t = TruncationControl::default();
    for qv in [0.3, 0.7] {
        for z in [0.1, 0.5, 1.0] {
            let (s, p) = (q_exp_small(z, q(qv), &t).unwrap(), q_exp_small_product(z, q(qv), &t).unwrap());
            assert!((s.value - p.value).abs() <= 1e-9 * s.value);
            let (s, p) = (q_exp_big(z, q(qv), &t).unwrap(), q_exp_big_product(z, q(qv), &t).unwrap());
            assert!((s.value - p.value).abs() <= 1e-9 * s.value);
        }
    }
}

#[test]
fn gamma_recursion_matches_explicit_and_reduces_at_mu_zero() {
    for qv in [0.2, 0.5, 0.9] {
        for mu in SWEEP_MU {
            let m = DunklParam::new(mu).unwrap();
            for k in 0..=40u64 {
                let rec = gamma_mu_q(k, m, q(qv)).unwrap();
                let exp = gamma_mu_q_explicit(k, m, q(qv)).unwrap();
                assert!((rec - exp).abs() < 1e-10 * rec, "k={k} μ={mu} q={qv}");
            }
        }
        let zero = DunklParam::new(0.0).unwrap();
        for k in 0..=40u32 {
            let g = gamma_mu_q(u64::from(k), zero, q(qv)).unwrap();
            let f = q_factorial(k, q(qv));
            assert!((g - f).abs() <= 1e-12 * f, "k={k} q={qv}");
        }
    }
}

#[test]
fn dunkl_exponentials_increase_in_x() {
    let t = TruncationControl::default();
    for mu in SWEEP_MU {
        let m = DunklParam::new(mu).unwrap();
        for qv in [0.3, 0.7, 0.95] {
            let grid: Vec<f64> = (0..40).map(|i| i as f64 * 0.49 / (1.0 - qv) / 40.0).collect();
            let e: Vec<f64> = grid.iter().map(|&x| dunkl_exp_e(x, m, q(qv), &t).unwrap().value).collect();
            let big: Vec<f64> = grid.iter().map(|&x| dunkl_exp_big(x, m, q(qv), &t).unwrap().value).collect();
            assert!(e.windows(2).all(|w| w[0] < w[1]), "e μ={mu} q={qv}");
            assert!(big.windows(2).all(|w| w[0] < w[1]), "E μ={mu} q={qv}");
        }
    }
}

#[test]
fn first_moment_identity_on_sweep() {
    for n in SWEEP_N {
        for qv in SWEEP_Q {
            for mu in SWEEP_MU {
                let p = params(n, qv, mu);
                for i in 0..=16 {
                    let x = i as f64 * 0.5;
                    let m1 = moment(1, x, &p).unwrap();
                    assert!((m1.value - qv * x).abs() <= m1.error_bound(), "n={n} q={qv} μ={mu} x={x}: {m1:?}");
                }
            }
        }
    }
}

#[test]
fn second_moment_sandwich_on_sweep() {
    let mut violations = Vec::new();
    for n in SWEEP_N {
        for qv in SWEEP_Q {
            for mu in SWEEP_MU {
                let p = params(n, qv, mu);
                for i in 0..=16 {
                    let x = i as f64 * 0.5;
                    let checks = [
                        (MomentKind::Raw, moment(2, x, &p).unwrap()),
                        (MomentKind::Central, central_moment(2, x, &p).unwrap()),
                    ];
                    for (kind, v) in checks {
                        let (lo, hi) = moment_bounds(kind, x, &p);
                        let c = v.error_bound();
                        if v.value < lo - c || v.value > hi + c {
                            violations.push(format!("{kind:?} n={n} q={qv} μ={mu} x={x}: {} ∉ [{lo}, {hi}]", v.value));
                        }
                    }
                }
            }
        }
    }
    let with_mu_zero = violations.iter().filter(|v| v.contains("μ=0 ")).count();
    assert!(
        violations.is_empty(),
        "{} violations ({with_mu_zero} with μ = 0), first: {}",
        violations.len(),
        violations[0]
    );
}

#[test]
fn node_forms_agree() {
    for qv in [0.1, 0.3, 0.5, 0.7, 0.9, 0.95, 0.99, 0.999] {
        for mu in SWEEP_MU {
            for n in [1, 3, 16, 256] {
                let p = params(n, qv, mu);
                for k in 0..=200 {
                    let (a, b) = (node(k, &p), node_direct(k, &p));
                    assert!((a - b).abs() <= 1e-13 * a.abs().max(b.abs()), "q={qv} μ={mu} n={n} k={k}: {a} vs {b}");
                }
            }
        }
    }
}

#[test]
fn omega_grid_never_exceeds_exact() {
    let w = Window::new(8.0, 513).unwrap();
    for name in registry::NAMES {
        let f = registry::get(name).unwrap();
        for d in [0.005, 0.02, 0.1, 0.25, 0.5, 1.0, 2.0, 3.5, 7.0] {
            if let Some(exact) = f.exact_modulus(d) {
                assert!(grid_modulus(&f, d, &w) <= exact + 1e-12, "{name} δ={d}");
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn partition_of_unity(p in operator_params(), x in 0.0..8.0f64) {
        let v = apply(&TestFunction::monomial(0), x, &p).unwrap();
        prop_assert!((v.value - 1.0).abs() <= v.error_bound(), "{v:?}");
    }

    #[test]
    fn positivity(p in operator_params(), x in 0.0..8.0f64, f in registry_function()) {
        let growth = *f.growth().unwrap();
        let g = TestFunction::new("abs", move |t| f.eval(t).abs()).with_growth(growth);
        let v = apply(&g, x, &p).unwrap();
        prop_assert!(v.value >= -v.error_bound());
    }

    #[test]
    fn linearity(
        p in operator_params(),
        x in 0.0..8.0f64,
        f in registry_function(),
        g in registry_function(),
        alpha in -2.0..2.0f64,
        beta in -2.0..2.0f64,
    ) {
        let h = TestFunction::linear_combination(alpha, &f, beta, &g);
        let (vh, vf, vg) = (apply(&h, x, &p).unwrap(), apply(&f, x, &p).unwrap(), apply(&g, x, &p).unwrap());
        let diff = (vh.value - alpha * vf.value - beta * vg.value).abs();
        let cert = vh.error_bound() + alpha.abs() * vf.error_bound() + beta.abs() * vg.error_bound();
        prop_assert!(diff <= cert, "diff {diff:e} cert {cert:e}");
    }

    #[test]
    fn monotonicity(p in operator_params(), x in 0.0..8.0f64, f in bounded_function(), shift in 0.0..1.0f64) {
        // g = f + shift ≥ f everywhere
        let g = TestFunction::linear_combination(1.0, &f, shift, &TestFunction::monomial(0));
        let (vf, vg) = (apply(&f, x, &p).unwrap(), apply(&g, x, &p).unwrap());
        prop_assert!(vf.value <= vg.value + vf.error_bound() + vg.error_bound());
    }

    #[test]
    fn origin_is_exact(p in operator_params(), f in registry_function()) {
        prop_assert_eq!(apply(&f, 0.0, &p).unwrap().value, f.eval(0.0));
    }

    #[test]
    fn separability(
        p1 in operator_params(),
        p2 in operator_params(),
        x in 0.0..4.0f64,
        y in 0.0..4.0f64,
        g in bounded_function(),
        h in bounded_function(),
    ) {
        let bp = BivariateParams::new(p1, p2);
        let f = TestFunction2D::product(g.clone(), h.clone());
        let (a, b) = (apply(&g, x, &p1).unwrap(), apply(&h, y, &p2).unwrap());
        let d = apply2_double_sum(&f, x, y, &bp).unwrap();
        let cert = d.error_bound() + a.value.abs() * b.error_bound() + b.value.abs() * a.error_bound()
            + a.error_bound() * b.error_bound();
        prop_assert!((d.value - a.value * b.value).abs() <= cert);
    }

    #[test]
    fn symmetry(
        p1 in operator_params(),
        p2 in operator_params(),
        x in 0.0..4.0f64,
        y in 0.0..4.0f64,
        g in registry_function(),
        h in registry_function(),
    ) {
        let bp = BivariateParams::new(p1, p2);
        let f = TestFunction2D::product(g, h);
        let a = apply2(&f, x, y, &bp).unwrap();
        let b = apply2(&f.swapped(), y, x, &bp.swapped()).unwrap();
        prop_assert!((a.value - b.value).abs() <= a.error_bound() + b.error_bound());
    }

    #[test]
    fn axes_reduce_to_univariate(p1 in operator_params(), p2 in operator_params(), x in 0.0..4.0f64, y in 0.0..4.0f64, g in registry_function()) {
        let bp = BivariateParams::new(p1, p2);
        let f = TestFunction2D::product(g.clone(), TestFunction::monomial(0));
        let (a, b) = (apply2(&f, x, y, &bp).unwrap(), apply(&g, x, &p1).unwrap());
        prop_assert!((a.value - b.value).abs() <= a.error_bound() + b.error_bound());
    }

    #[test]
    fn omega_monotone(f in registry_function(), d1 in 0.001..3.0f64, d2 in 0.001..3.0f64) {
        let w = Window::new(4.0, 129).unwrap();
        let (lo, hi) = if d1 <= d2 { (d1, d2) } else { (d2, d1) };
        prop_assert!(modulus_of_continuity(&f, lo, &w).value <= modulus_of_continuity(&f, hi, &w).value);
        prop_assert!(grid_modulus(&f, lo, &w) <= grid_modulus(&f, hi, &w));
    }
}
