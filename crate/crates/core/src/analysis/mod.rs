//! Moduli of continuity, norms, q_n schedules, Korovkin studies and checks of
//! the rate-of-convergence bounds.
//!
//! Suprema over `[0, ∞)` are taken over a finite [`Window`] grid.

pub mod registry;

use crate::bivariate::{central_moment2, Axis, BivariateParams, TestFunction2D};
use crate::bivariate::apply2;
use crate::error::{Error, Result};
use crate::operators::{apply, central_moment, OperatorParams, OperatorValue, TestFunction};
use crate::qcore::{bracket, QParam};
use crate::DunklParam;

/// Uniform grid on `[0, x_max]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    x_max: f64,
    grid_points: usize,
}

impl Window {
    pub const MIN_POINTS: usize = 16;

    pub fn new(x_max: f64, grid_points: usize) -> Result<Self> {
        if !(x_max > 0.0 && x_max.is_finite()) {
            return Err(Error::invalid("x_max", format!("window end must be finite and > 0, got {x_max}")));
        }
        if grid_points < Self::MIN_POINTS {
            return Err(Error::invalid(
                "grid_points",
                format!("need at least {} grid points, got {grid_points}", Self::MIN_POINTS),
            ));
        }
        Ok(Self { x_max, grid_points })
    }

    /// `[0, 4]` with 257 points, used for bound checks.
    pub fn bounds_default() -> Self {
        Self {
            x_max: 4.0,
            grid_points: 257,
        }
    }

    /// `[0, 2]` with 65 points, used for Korovkin studies.
    pub fn korovkin_default() -> Self {
        Self {
            x_max: 2.0,
            grid_points: 65,
        }
    }

    /// `[0, 32]` with 129 points, used for weighted-norm errors.
    pub fn weighted_default() -> Self {
        Self {
            x_max: 32.0,
            grid_points: 129,
        }
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn grid_points(&self) -> usize {
        self.grid_points
    }

    pub fn spacing(&self) -> f64 {
        self.x_max / (self.grid_points - 1) as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        if i + 1 == self.grid_points {
            self.x_max
        } else {
            i as f64 * self.spacing()
        }
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.grid_points).map(move |i| self.point(i))
    }
}

/// Sequences `q_n → 1` with `q_n^n` convergent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum QSchedule {
    /// `q_n = 1 − 1/(n+1)`.
    OneMinusInverse,
    /// `q_n = n/(n+1)`.
    Ratio,
}

impl QSchedule {
    pub const ALL: [QSchedule; 2] = [QSchedule::OneMinusInverse, QSchedule::Ratio];

    pub fn name(self) -> &'static str {
        match self {
            QSchedule::OneMinusInverse => "one_minus_inverse",
            QSchedule::Ratio => "ratio",
        }
    }

    pub fn q(self, n: u32) -> Result<QParam> {
        q_schedule(self, n)
    }
}

impl std::str::FromStr for QSchedule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "one_minus_inverse" => Ok(QSchedule::OneMinusInverse),
            "ratio" => Ok(QSchedule::Ratio),
            _ => Err(Error::invalid("schedule", format!("unknown schedule `{s}`"))),
        }
    }
}

pub fn q_schedule(kind: QSchedule, n: u32) -> Result<QParam> {
    if n == 0 {
        return Err(Error::invalid("n", "schedules start at n = 1"));
    }
    let n = f64::from(n);
    QParam::new(match kind {
        QSchedule::OneMinusInverse => 1.0 - 1.0 / (n + 1.0),
        QSchedule::Ratio => n / (n + 1.0),
    })
}

/// A modulus value; `exact` is false for grid estimates, which can only
/// underestimate the true supremum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Modulus {
    pub value: f64,
    pub exact: bool,
}

fn steps_within(delta: f64, h: f64) -> usize {
    // Small relative slack so that δ equal to a multiple of h keeps that offset.
    ((delta / h) * (1.0 + 1e-12)).floor() as usize
}

/// `ω(f; δ)`, exact when `f` carries a formula, otherwise the grid estimate.
pub fn modulus_of_continuity(f: &TestFunction, delta: f64, w: &Window) -> Modulus {
    if let Some(value) = f.exact_modulus(delta) {
        return Modulus { value, exact: true };
    }
    Modulus {
        value: grid_modulus(f, delta, w),
        exact: false,
    }
}

/// `sup{|f(y) − f(x)| : |y − x| ≤ δ}` over pairs of grid points.
pub fn grid_modulus(f: &TestFunction, delta: f64, w: &Window) -> f64 {
    let values: Vec<f64> = w.points().map(|t| f.eval(t)).collect();
    let m = steps_within(delta, w.spacing()).min(values.len() - 1);
    let mut best = 0.0_f64;
    for i in 0..values.len() {
        for j in i + 1..=(i + m).min(values.len() - 1) {
            best = best.max((values[j] - values[i]).abs());
        }
    }
    best
}

/// Number of step sizes sampled in `(0, √δ]` by [`second_modulus`].
pub const SECOND_MODULUS_STEPS: usize = 64;

/// Grid estimate of `sup_{0<h≤√δ} sup_x |f(x+2h) − 2f(x+h) + f(x)|`, with `x`
/// on the window grid.
pub fn second_modulus(f: &TestFunction, delta: f64, w: &Window) -> f64 {
    let root = delta.sqrt();
    let mut best = 0.0_f64;
    for j in 1..=SECOND_MODULUS_STEPS {
        let h = root * j as f64 / SECOND_MODULUS_STEPS as f64;
        for x in w.points() {
            let d = f.eval(x + 2.0 * h) - 2.0 * f.eval(x + h) + f.eval(x);
            best = best.max(d.abs());
        }
    }
    best
}

pub fn sup_norm(f: &TestFunction, w: &Window) -> f64 {
    w.points().map(|t| f.eval(t).abs()).fold(0.0, f64::max)
}

/// `sup |f(x)|/(1 + x²)` over the window.
pub fn weighted_norm_rho(f: &TestFunction, w: &Window) -> f64 {
    w.points()
        .map(|t| f.eval(t).abs() / (1.0 + t * t))
        .fold(0.0, f64::max)
}

/// One `(n, e_j)` row of a Korovkin study.
#[derive(Debug, Clone, PartialEq)]
pub struct KorovkinRow {
    pub n: u32,
    pub q_n: f64,
    pub q_n_pow_n: f64,
    pub target: u32,
    /// `sup_x |D*(e_j; x) − x^j|` over the plain window.
    pub sup_error: f64,
    /// `sup_x |D*(e_j; x) − x^j|/(1 + x²)` over the weighted window.
    pub weighted_error: f64,
    /// Largest error bound of the operator values behind `sup_error`.
    pub certificate: f64,
    pub failure: Option<String>,
}

fn korovkin_errors(
    j: u32,
    params: &OperatorParams,
    w: &Window,
    weighted: bool,
) -> Result<(f64, f64)> {
    let e = TestFunction::monomial(j);
    let mut err = 0.0_f64;
    let mut cert = 0.0_f64;
    for x in w.points() {
        let v = apply(&e, x, params)?;
        let d = (v.value - x.powi(j as i32)).abs();
        err = err.max(if weighted { d / (1.0 + x * x) } else { d });
        cert = cert.max(v.error_bound());
    }
    Ok((err, cert))
}

/// Errors of `D*_{n,q_n}` on `e_0, e_1, e_2` for each `n`, one row per
/// `(n, j)`. A failing cell is recorded in its row rather than aborting.
pub fn korovkin_study(
    schedule: QSchedule,
    mu: DunklParam,
    n_list: &[u32],
    w: &Window,
    weighted_window: &Window,
) -> Result<Vec<KorovkinRow>> {
    if n_list.is_empty() {
        return Err(Error::invalid("n_list", "need at least one n"));
    }
    if n_list.windows(2).any(|p| p[0] >= p[1]) {
        return Err(Error::invalid("n_list", "n values must be strictly ascending"));
    }
    let mut rows = Vec::with_capacity(3 * n_list.len());
    for &n in n_list {
        let q = q_schedule(schedule, n)?;
        let params = OperatorParams::new(n, q, mu, Default::default())?;
        for j in 0..=2 {
            let plain = korovkin_errors(j, &params, w, false);
            let rho = korovkin_errors(j, &params, weighted_window, true);
            let (sup_error, certificate, weighted_error, failure) = match (plain, rho) {
                (Ok((s, c)), Ok((r, _))) => (s, c, r, None),
                (Err(e), _) | (_, Err(e)) => (f64::NAN, f64::NAN, f64::NAN, Some(e.to_string())),
            };
            rows.push(KorovkinRow {
                n,
                q_n: q.value(),
                q_n_pow_n: q.value().powi(n as i32),
                target: j,
                sup_error,
                weighted_error,
                certificate,
                failure,
            });
        }
    }
    Ok(rows)
}

/// Outcome of checking one inequality `lhs ≤ rhs` at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundReport {
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub holds: bool,
    /// A printed bound term is negative, or the printed form falls below lhs.
    pub degenerate: bool,
    /// A modulus came from a grid estimate.
    pub approximate: bool,
    /// Numerical error allowance used for `holds`.
    pub certificate: f64,
    /// The bound exactly as printed, when it differs from `rhs`.
    pub literal_rhs: Option<f64>,
}

impl BoundReport {
    fn new(lhs: f64, rhs: f64, certificate: f64) -> Self {
        let slack = rhs - lhs;
        Self {
            lhs,
            rhs,
            slack,
            holds: slack >= -certificate,
            degenerate: false,
            approximate: false,
            certificate,
            literal_rhs: None,
        }
    }
}

fn deviation(f: &TestFunction, x: f64, params: &OperatorParams) -> Result<(f64, OperatorValue)> {
    let v = apply(f, x, params)?;
    Ok(((v.value - f.eval(x)).abs(), v))
}

/// `(1 − q)[n]_q x² + q^{2(1+μ)}[1 + 2μ]_q x`, the variance term of the
/// modulus-of-continuity bound.
pub fn moc_variance_term(x: f64, params: &OperatorParams) -> f64 {
    let q = params.q;
    let mu = params.mu.value();
    q.complement() * params.nq() * x * x + q.pow(2.0 * (1.0 + mu)) * bracket(1.0 + 2.0 * mu, q) * x
}

/// `|D*(f;x) − f(x)| ≤ (1 + √((1−q)[n]x² + q^{2(1+μ)}[1+2μ]x)) ω(f; 1/√[n])`.
pub fn moc_bound_check(
    f: &TestFunction,
    x: f64,
    params: &OperatorParams,
    w: &Window,
) -> Result<BoundReport> {
    if !f.flags().uniformly_continuous {
        return Err(Error::invalid("f", format!("{} is not flagged uniformly continuous", f.name())));
    }
    let (lhs, v) = deviation(f, x, params)?;
    let omega = modulus_of_continuity(f, 1.0 / params.nq().sqrt(), w);
    let rhs = (1.0 + moc_variance_term(x, params).sqrt()) * omega.value;
    let mut report = BoundReport::new(lhs, rhs, v.error_bound());
    report.approximate = !omega.exact;
    Ok(report)
}

/// `λ_n(x)` with an error allowance covering truncation and rounding.
fn lambda(x: f64, params: &OperatorParams) -> Result<(f64, f64)> {
    let c = central_moment(2, x, params)?;
    Ok((c.value.max(0.0), c.error_bound()))
}

// Spread of M·λ^{p} when λ is only known to within ±err.
fn power_allowance(m: f64, lam: f64, err: f64, p: f64) -> f64 {
    m * ((lam + err).powf(p) - (lam - err).max(0.0).powf(p))
}

/// `|D*(f;x) − f(x)| ≤ M λ_n(x)^{ν/2}`.
pub fn lipschitz_bound_check(f: &TestFunction, x: f64, params: &OperatorParams) -> Result<BoundReport> {
    let lip = f
        .lipschitz()
        .ok_or_else(|| Error::invalid("f", format!("{} carries no Lipschitz data", f.name())))?;
    f.validate()?;
    let (lhs, v) = deviation(f, x, params)?;
    let (lam, lam_err) = lambda(x, params)?;
    let p = lip.nu / 2.0;
    let rhs = lip.m * lam.powf(p);
    Ok(BoundReport::new(
        lhs,
        rhs,
        v.error_bound() + power_allowance(lip.m, lam, lam_err, p),
    ))
}

/// C_B² bound. `rhs` is `((1 − q)x + λ_n/2)‖g‖_{C_B²}`; the printed
/// `((q − 1)x + λ_n/2)‖g‖_{C_B²}` goes to `literal_rhs`, and `degenerate`
/// records whether it falls below `lhs`.
pub fn cb2_bound_check(g: &TestFunction, x: f64, params: &OperatorParams) -> Result<BoundReport> {
    let d = g
        .derivative_bounds()
        .ok_or_else(|| Error::invalid("g", format!("{} carries no derivative bounds", g.name())))?;
    let norm = d.cb2_norm();
    let (lhs, v) = deviation(g, x, params)?;
    let (lam, lam_err) = lambda(x, params)?;
    let one_minus_q = params.q.complement();
    let rhs = (one_minus_q * x + lam / 2.0) * norm;
    let literal = (-one_minus_q * x + lam / 2.0) * norm;
    let mut report = BoundReport::new(lhs, rhs, v.error_bound() + lam_err / 2.0 * norm);
    report.degenerate = literal < lhs;
    report.literal_rhs = Some(literal);
    Ok(report)
}

/// Diagnostic for the Peetre-type bound, whose constant is unspecified.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeetreReport {
    pub lhs: f64,
    /// `ω₂(f; √d) + min(1, d)‖f‖`, absent when `d < 0`.
    pub bracket: Option<f64>,
    /// `d = (2x(q − 1) + λ_n(x))/4`.
    pub d: f64,
    /// `lhs / bracket`; zero when `lhs` is.
    pub ratio: Option<f64>,
    pub degenerate: bool,
}

pub fn peetre_report(f: &TestFunction, x: f64, params: &OperatorParams, w: &Window) -> Result<PeetreReport> {
    let (lhs, _) = deviation(f, x, params)?;
    let (lam, _) = lambda(x, params)?;
    let d = (-2.0 * x * params.q.complement() + lam) / 4.0;
    let bracket = if d > 0.0 {
        Some(second_modulus(f, d, w) + d.min(1.0) * sup_norm(f, w))
    } else if d == 0.0 {
        Some(0.0)
    } else {
        None
    };
    let ratio = if lhs == 0.0 {
        Some(0.0)
    } else {
        bracket.filter(|&b| b > 0.0).map(|b| lhs / b)
    };
    Ok(PeetreReport {
        lhs,
        bracket,
        d,
        ratio,
        degenerate: d < 0.0,
    })
}

/// Largest grid size per axis used for bivariate grid moduli.
pub const BIVARIATE_GRID_POINTS: usize = 65;

/// `ω̃(f; δ₁, δ₂)`, exact when `f` carries a formula, otherwise a grid
/// estimate on the square `window × window`.
pub fn bivariate_modulus(f: &TestFunction2D, d1: f64, d2: f64, w: &Window) -> Modulus {
    if let Some(value) = f.exact_modulus(d1, d2) {
        return Modulus { value, exact: true };
    }
    let coarse = Window {
        x_max: w.x_max,
        grid_points: w.grid_points.min(BIVARIATE_GRID_POINTS),
    };
    let n = coarse.grid_points;
    let pts: Vec<f64> = coarse.points().collect();
    let values: Vec<f64> = pts
        .iter()
        .flat_map(|&u| pts.iter().map(move |&v| (u, v)))
        .map(|(u, v)| f.eval(u, v))
        .collect();
    let h = coarse.spacing();
    let (m1, m2) = (steps_within(d1, h).min(n - 1), steps_within(d2, h).min(n - 1));
    let mut best = 0.0_f64;
    for i in 0..n {
        for j in 0..n {
            let base = values[i * n + j];
            for a in i..=(i + m1).min(n - 1) {
                for b in j.saturating_sub(m2)..=(j + m2).min(n - 1) {
                    best = best.max((values[a * n + b] - base).abs());
                }
            }
        }
    }
    Modulus { value: best, exact: false }
}

/// Bivariate modulus-of-continuity bound with `δᵢ = 1/√[nᵢ]`.
pub fn bivariate_moc_bound_check(
    f: &TestFunction2D,
    x: f64,
    y: f64,
    bp: &BivariateParams,
    w: &Window,
) -> Result<BoundReport> {
    let v = apply2(f, x, y, bp)?;
    let lhs = (v.value - f.eval(x, y)).abs();
    let omega = bivariate_modulus(f, 1.0 / bp.px.nq().sqrt(), 1.0 / bp.py.nq().sqrt(), w);
    let rhs = omega.value
        * (1.0 + moc_variance_term(x, &bp.px).sqrt())
        * (1.0 + moc_variance_term(y, &bp.py).sqrt());
    let mut report = BoundReport::new(lhs, rhs, v.error_bound());
    report.approximate = !omega.exact;
    Ok(report)
}

/// `|D*(f;x,y) − f(x,y)| ≤ M λ_{n₁}(x)^{ν₁/2} λ_{n₂}(y)^{ν₂/2}`.
pub fn bivariate_lipschitz_bound_check(
    f: &TestFunction2D,
    x: f64,
    y: f64,
    bp: &BivariateParams,
) -> Result<BoundReport> {
    let lip = f
        .lipschitz()
        .ok_or_else(|| Error::invalid("f", format!("{} carries no Lipschitz data", f.name())))?;
    f.validate()?;
    let v = apply2(f, x, y, bp)?;
    let lhs = (v.value - f.eval(x, y)).abs();
    let lx = central_moment2(Axis::X, 2, x, y, bp)?;
    let ly = central_moment2(Axis::Y, 2, x, y, bp)?;
    let (p1, p2) = (lip.nu1 / 2.0, lip.nu2 / 2.0);
    let (a, b) = (lx.value.max(0.0), ly.value.max(0.0));
    let rhs = lip.m * a.powf(p1) * b.powf(p2);
    let (ea, eb) = (lx.error_bound(), ly.error_bound());
    let hi = lip.m * (a + ea).powf(p1) * (b + eb).powf(p2);
    let lo = lip.m * (a - ea).max(0.0).powf(p1) * (b - eb).max(0.0).powf(p2);
    Ok(BoundReport::new(lhs, rhs, v.error_bound() + (hi - lo)))
}

/// One parameter point of the standard sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub schedule: QSchedule,
    pub params: OperatorParams,
    pub x: f64,
}

pub const SWEEP_N: [u32; 7] = [4, 8, 16, 32, 64, 128, 256];
pub const SWEEP_MU: [f64; 3] = [0.6, 1.0, 2.5];
pub const SWEEP_X: [f64; 5] = [0.0, 1.0, 2.0, 3.0, 4.0];

/// `n ∈ {4, 8, …, 256}` × both schedules × `μ ∈ {0.6, 1, 2.5}` ×
/// `x ∈ {0, 1, 2, 3, 4}`, ordered by `(n, schedule, μ, x)`.
pub fn standard_sweep() -> Vec<SweepPoint> {
    sweep(&SWEEP_N, &SWEEP_MU, &SWEEP_X)
}

pub fn sweep(ns: &[u32], mus: &[f64], xs: &[f64]) -> Vec<SweepPoint> {
    let mut out = Vec::with_capacity(ns.len() * 2 * mus.len() * xs.len());
    for &n in ns {
        for schedule in QSchedule::ALL {
            for &mu in mus {
                for &x in xs {
                    let params = OperatorParams::new(
                        n,
                        q_schedule(schedule, n).expect("n ≥ 1"),
                        DunklParam::new(mu).expect("sweep μ ≥ 0"),
                        Default::default(),
                    )
                    .expect("n ≥ 1");
                    out.push(SweepPoint { schedule, params, x });
                }
            }
        }
    }
    out
}
