//! The five subcommands. Each validates its flags, computes all rows and
//! returns the rendered artifacts; nothing touches the file system here.

use std::path::PathBuf;

use qdunkl_core::analysis::{
    bivariate_lipschitz_bound_check, bivariate_moc_bound_check, cb2_bound_check, korovkin_study,
    lipschitz_bound_check, moc_bound_check, peetre_report, registry, sweep, BoundReport, QSchedule,
    SweepPoint, Window, SWEEP_N,
};
use qdunkl_core::bivariate::{apply2, apply2_double_sum};
use qdunkl_core::operators::{
    apply, central_moment, dunkl_szasz_sucu, icoz_q_dunkl, moment, moment_bounds, szasz_classical,
    MomentKind,
};
use qdunkl_core::{
    BivariateParams, DunklParam, OperatorParams, QParam, TestFunction, TestFunction2D,
    TruncationControl,
};

use crate::config::{
    BivariateArgs, BoundsArgs, ConvergeArgs, EvalArgs, Grid, MomentsArgs, Operator, Output,
    PlotScale, Schedule, Theorem, TruncationArgs,
};
use crate::csv::{Field, Table};
use crate::svg::{Plot, Series};
use crate::{output_stem, usage, Artifact, CliError, Outcome};

type CmdResult = Result<(Vec<Artifact>, Outcome), CliError>;

/// State shared by every command.
#[derive(Debug, Clone)]
pub struct Context {
    pub command_line: String,
    pub trunc: TruncationControl,
}

impl Context {
    pub fn new(command_line: String, t: &TruncationArgs) -> Result<Self, CliError> {
        Ok(Self {
            command_line,
            trunc: TruncationControl::new(t.rel_tol, t.abs_tol, t.max_terms)?,
        })
    }

    fn table<S: AsRef<str>>(&self, header: &[S]) -> Table {
        let mut t = Table::new(header);
        t.comment(format!("cmd: {}", self.command_line));
        t
    }

    fn params(&self, n: u32, q: f64, mu: f64) -> Result<OperatorParams, CliError> {
        Ok(OperatorParams::new(n, QParam::new(q)?, DunklParam::new(mu)?, self.trunc)?)
    }
}

fn grid(g: &Grid) -> Result<Vec<f64>, CliError> {
    if !(g.x_max > 0.0 && g.x_max.is_finite()) {
        return Err(usage(format!("--x-max must be positive and finite, got {}", g.x_max)));
    }
    if g.points < 2 {
        return Err(usage(format!("--points must be at least 2, got {}", g.points)));
    }
    let last = (g.points - 1) as f64;
    Ok((0..g.points).map(|i| g.x_max * i as f64 / last).collect())
}

fn window(x_max: f64, points: usize, flag: &str) -> Result<Window, CliError> {
    Window::new(x_max, points).map_err(|e| usage(format!("{flag}: {e}")))
}

fn function(name: &str) -> Result<TestFunction, CliError> {
    registry::get(name)
        .ok_or_else(|| usage(format!("unknown function `{name}`; known: {}", registry::NAMES.join(", "))))
}

fn function2(name: &str, x_max: f64) -> Result<TestFunction2D, CliError> {
    registry::get2(name, x_max).ok_or_else(|| {
        usage(format!(
            "unknown bivariate function `{name}`; known: {}, prod",
            registry::NAMES_2D.join(", ")
        ))
    })
}

fn mu_warnings(mus: &[f64]) -> Vec<String> {
    mus.iter()
        .filter(|&&m| DunklParam::new(m).is_ok_and(DunklParam::below_half))
        .map(|m| format!("warning: mu = {m:?} is at most 1/2, outside the positivity setting μ > 1/2"))
        .collect()
}

fn finish(
    output: &Output,
    mut table: Table,
    plot: impl FnOnce(PlotScale) -> Result<Plot, CliError>,
    default_scale: PlotScale,
    outcome: Outcome,
    warnings: Vec<String>,
) -> CmdResult {
    let stem = output_stem(&output.out);
    let with_ext = |ext: &str| {
        let mut p = stem.clone().into_os_string();
        p.push(ext);
        PathBuf::from(p)
    };
    for w in &warnings {
        eprintln!("qdunkl: {w}");
        table.comment(w.clone());
    }
    if let Some(s) = &outcome.summary {
        table.trailer(s.clone());
    }
    let mut artifacts = Vec::new();
    if output.format.svg() {
        let svg = plot(output.plot.unwrap_or(default_scale))?.render()?;
        artifacts.push(Artifact {
            path: with_ext(".svg"),
            contents: svg,
        });
    }
    if output.format.csv() {
        artifacts.insert(
            0,
            Artifact {
                path: with_ext(".csv"),
                contents: table.render(),
            },
        );
    }
    Ok((artifacts, outcome))
}

fn column_series(table: &Table, x_col: usize, y_cols: &[usize]) -> Vec<Series> {
    y_cols
        .iter()
        .map(|&c| Series {
            name: table.header()[c].clone(),
            points: table
                .rows()
                .iter()
                .filter_map(|r| match (&r[x_col], &r[c]) {
                    (Field::Float(x), Field::Float(y)) => Some((*x, *y)),
                    _ => None,
                })
                .collect(),
        })
        .collect()
}

pub fn cmd_eval(ctx: &Context, a: &EvalArgs) -> CmdResult {
    let xs = grid(&a.grid)?;
    let f = function(&a.function)?;
    f.validate()?;
    let params = ctx.params(a.n, a.q, a.mu)?;
    let warnings = match a.operator {
        Operator::Dstar | Operator::Icoz | Operator::Sucu => mu_warnings(&[a.mu]),
        Operator::Szasz => Vec::new(),
        Operator::Bivariate => {
            return Err(usage("operator `bivariate` is served by the `bivariate` subcommand"));
        }
    };
    if a.operator == Operator::Icoz {
        let reach = params.nq() * a.grid.x_max * params.q.complement();
        if reach >= 1.0 {
            return Err(usage(format!(
                "icoz needs [n]_q·x·(1 − q) < 1 on the whole grid; at x = {} it is {reach}",
                a.grid.x_max
            )));
        }
    }
    let mut table = ctx.table(&["x", "value", "terms_used", "tail_bound"]);
    table.comment(format!(
        "operator={} function={} n={} q={:?} mu={:?}",
        a.operator_name(), a.function, a.n, a.q, a.mu
    ));
    for &x in &xs {
        let v = match a.operator {
            Operator::Dstar => apply(&f, x, &params)?,
            Operator::Icoz => icoz_q_dunkl(&f, x, &params)?,
            Operator::Sucu => dunkl_szasz_sucu(&f, x, a.n, params.mu, &ctx.trunc)?,
            Operator::Szasz => szasz_classical(&f, x, a.n, &ctx.trunc)?,
            Operator::Bivariate => unreachable!("rejected above"),
        };
        table.push(vec![x.into(), v.value.into(), v.terms_used.into(), v.error_bound().into()]);
    }
    let plot = |scale| {
        Ok(Plot {
            title: format!("{} applied to {}", a.operator_name(), a.function),
            x_label: "x".into(),
            y_label: "value".into(),
            scale,
            series: column_series(&table, 0, &[1]),
            notes: vec![],
        })
    };
    finish(&a.output, table.clone(), plot, PlotScale::Linear, Outcome::default(), warnings)
}

impl EvalArgs {
    fn operator_name(&self) -> &'static str {
        match self.operator {
            Operator::Dstar => "dstar",
            Operator::Icoz => "icoz",
            Operator::Sucu => "sucu",
            Operator::Szasz => "szasz",
            Operator::Bivariate => "bivariate",
        }
    }
}

pub fn cmd_moments(ctx: &Context, a: &MomentsArgs) -> CmdResult {
    let xs = grid(&a.grid)?;
    let params = ctx.params(a.n, a.q, a.mu)?;
    let mut table = ctx.table(&["x", "m0", "m1", "m2", "c1", "c2", "lo2", "hi2", "clo2", "chi2"]);
    table.comment(format!("n={} q={:?} mu={:?}", a.n, a.q, a.mu));
    let mut violations = 0;
    for &x in &xs {
        let m: Vec<_> = (0..=2).map(|j| moment(j, x, &params)).collect::<Result<_, _>>()?;
        let c1 = central_moment(1, x, &params)?;
        let c2 = central_moment(2, x, &params)?;
        let (lo2, hi2) = moment_bounds(MomentKind::Raw, x, &params);
        let (clo2, chi2) = moment_bounds(MomentKind::Central, x, &params);
        let inside = |v: f64, eb: f64, lo: f64, hi: f64| v >= lo - eb && v <= hi + eb;
        if !inside(m[2].value, m[2].error_bound(), lo2, hi2) || !inside(c2.value, c2.error_bound(), clo2, chi2) {
            violations += 1;
        }
        table.push(vec![
            x.into(),
            m[0].value.into(),
            m[1].value.into(),
            m[2].value.into(),
            c1.value.into(),
            c2.value.into(),
            lo2.into(),
            hi2.into(),
            clo2.into(),
            chi2.into(),
        ]);
    }
    let outcome = Outcome {
        summary: Some(format!("rows inside both second-moment bounds: {}/{}", xs.len() - violations, xs.len())),
        violations,
        strict: a.strict,
        ..Outcome::default()
    };
    let plot = |scale| {
        Ok(Plot {
            title: format!("second moments, n={} q={:?} mu={:?}", a.n, a.q, a.mu),
            x_label: "x".into(),
            y_label: "m2, lo2, hi2".into(),
            scale,
            series: column_series(&table, 0, &[3, 6, 7]),
            notes: vec![],
        })
    };
    finish(&a.output, table.clone(), plot, PlotScale::Linear, outcome, mu_warnings(&[a.mu]))
}

fn schedules(s: Schedule) -> Vec<QSchedule> {
    match s {
        Schedule::OneMinusInverse => vec![QSchedule::OneMinusInverse],
        Schedule::Ratio => vec![QSchedule::Ratio],
        Schedule::Both => QSchedule::ALL.to_vec(),
    }
}

pub fn cmd_converge(ctx: &Context, a: &ConvergeArgs) -> CmdResult {
    let schedule = match a.schedule {
        Schedule::OneMinusInverse => QSchedule::OneMinusInverse,
        Schedule::Ratio => QSchedule::Ratio,
        Schedule::Both => return Err(usage("converge takes a single --schedule")),
    };
    let plain = window(a.x_max, a.points, "--x-max/--points")?;
    let weighted = window(a.weighted_x_max, a.weighted_points, "--weighted-x-max/--weighted-points")?;
    let mu = DunklParam::new(a.mu)?;
    let rows = korovkin_study(schedule, mu, &a.n_list, &plain, &weighted)?;

    let mut table = ctx.table(&["n", "q_n", "q_n_pow_n", "target", "sup_error", "weighted_error"]);
    table.comment(format!(
        "schedule={} mu={:?} window=[0,{:?}] weighted_window=[0,{:?}]",
        schedule.name(),
        a.mu,
        a.x_max,
        a.weighted_x_max
    ));
    let mut failures = 0;
    for r in &rows {
        if let Some(msg) = &r.failure {
            failures += 1;
            table.comment(format!("failure n={} target=e{}: {msg}", r.n, r.target));
        }
        table.push(vec![
            r.n.into(),
            r.q_n.into(),
            r.q_n_pow_n.into(),
            r.target.into(),
            r.sup_error.into(),
            r.weighted_error.into(),
        ]);
    }
    if failures > 0 && failures == rows.len() {
        return Err(CliError::Compute(qdunkl_core::Error::Range(format!(
            "every cell of the study failed; first: {}",
            rows[0].failure.as_deref().unwrap_or_default()
        ))));
    }
    let plot = |scale: PlotScale| {
        let mut series = Vec::new();
        let mut notes = Vec::new();
        for j in 0..=2u32 {
            let points: Vec<(f64, f64)> = rows
                .iter()
                .filter(|r| r.target == j && r.failure.is_none())
                .map(|r| (f64::from(r.n), r.sup_error))
                .collect();
            if scale == PlotScale::Loglog && points.iter().any(|p| !(p.1 > 0.0)) {
                notes.push(format!("e{j}: omitted, sup_error not positive"));
                continue;
            }
            series.push(Series {
                name: format!("e{j}"),
                points,
            });
        }
        Ok(Plot {
            title: format!("Korovkin errors, {} schedule, mu={:?}", schedule.name(), a.mu),
            x_label: "n".into(),
            y_label: "sup_error".into(),
            scale,
            series,
            notes,
        })
    };
    let outcome = Outcome {
        violations: failures,
        ..Outcome::default()
    };
    finish(&a.output, table.clone(), plot, PlotScale::Loglog, outcome, mu_warnings(&[a.mu]))
}

fn default_functions(theorem: Theorem) -> &'static [&'static str] {
    match theorem {
        Theorem::Moc => &["exp_neg", "sin", "cos", "inv1p"],
        Theorem::Lipschitz => &["e1", "sqrt"],
        Theorem::Cb2 => &["exp_neg", "inv1p", "sin", "cos"],
        Theorem::Peetre => &["const", "exp_neg", "sin", "cos", "inv1p"],
        Theorem::Moc2 => &["const", "exp_sum", "sin_exp"],
        Theorem::Lipschitz2 => &["const", "sqrt_prod", "prod"],
    }
}

fn bound_row(report: &BoundReport) -> [Field; 5] {
    [
        report.lhs.into(),
        report.rhs.into(),
        report.slack.into(),
        report.holds.into(),
        report.degenerate.into(),
    ]
}

pub fn cmd_bounds(ctx: &Context, a: &BoundsArgs) -> CmdResult {
    let names: Vec<String> = if a.functions.is_empty() {
        default_functions(a.theorem).iter().map(|s| s.to_string()).collect()
    } else {
        a.functions.clone()
    };
    let ns: Vec<u32> = match (a.n_list.is_empty(), a.theorem.is_bivariate()) {
        (false, _) => a.n_list.clone(),
        (true, false) => SWEEP_N.to_vec(),
        (true, true) => vec![4, 16, 64],
    };
    if ns.contains(&0) {
        return Err(usage("--n-list entries must be at least 1"));
    }
    for &m in &a.mu_list {
        DunklParam::new(m)?;
    }
    if let Some(x) = a.x_list.iter().find(|x| !(**x >= 0.0 && x.is_finite())) {
        return Err(usage(format!("--x-list entries must be finite and nonnegative, got {x}")));
    }
    if a.mu_list.is_empty() || a.x_list.is_empty() {
        return Err(usage("--mu-list and --x-list must not be empty"));
    }
    let w = window(a.window, a.window_points, "--window/--window-points")?;
    let keep = schedules(a.schedule);
    let points: Vec<SweepPoint> = sweep(&ns, &a.mu_list, &a.x_list)
        .into_iter()
        .filter(|p| keep.contains(&p.schedule))
        .map(|p| SweepPoint {
            params: OperatorParams { trunc: ctx.trunc, ..p.params },
            ..p
        })
        .collect();

    let (table, outcome, plot_series) = if a.theorem.is_bivariate() {
        bounds_bivariate(ctx, a, &names, &points, &w)?
    } else if a.theorem == Theorem::Peetre {
        bounds_peetre(ctx, &names, &points, &w)?
    } else {
        bounds_univariate(ctx, a.theorem, &names, &points, &w)?
    };
    let outcome = Outcome {
        strict: a.strict,
        ..outcome
    };
    let title = format!("{:?} bound check", a.theorem).to_lowercase();
    let plot = move |scale| {
        Ok(Plot {
            title,
            x_label: "row".into(),
            y_label: if a.theorem == Theorem::Peetre { "ratio".into() } else { "lhs, rhs".into() },
            scale,
            series: plot_series,
            notes: vec![],
        })
    };
    finish(&a.output, table, plot, PlotScale::Linear, outcome, mu_warnings(&a.mu_list))
}

type BoundsParts = (Table, Outcome, Vec<Series>);

fn lhs_rhs_series(name: &str, reports: &[(usize, BoundReport)]) -> [Series; 2] {
    [
        Series {
            name: format!("{name} lhs"),
            points: reports.iter().map(|(i, r)| (*i as f64, r.lhs)).collect(),
        },
        Series {
            name: format!("{name} rhs"),
            points: reports.iter().map(|(i, r)| (*i as f64, r.rhs)).collect(),
        },
    ]
}

fn bounds_univariate(
    ctx: &Context,
    theorem: Theorem,
    names: &[String],
    points: &[SweepPoint],
    w: &Window,
) -> Result<BoundsParts, CliError> {
    let fs: Vec<TestFunction> = names.iter().map(|n| function(n)).collect::<Result<_, _>>()?;
    for f in &fs {
        let missing = match theorem {
            Theorem::Moc => (!f.flags().uniformly_continuous).then_some("uniform continuity"),
            Theorem::Lipschitz => f.lipschitz().is_none().then_some("Lipschitz data"),
            Theorem::Cb2 => f.derivative_bounds().is_none().then_some("derivative bounds"),
            _ => None,
        };
        if let Some(what) = missing {
            return Err(usage(format!("function `{}` carries no {what}", f.name())));
        }
    }
    let mut table = ctx.table(&["function", "x", "n", "q", "mu", "lhs", "rhs", "slack", "holds", "degenerate"]);
    let (mut held, mut degenerate, mut row) = (0, 0, 0);
    let mut series = Vec::new();
    for (f, name) in fs.iter().zip(names) {
        let mut reports = Vec::new();
        for p in points {
            let r = match theorem {
                Theorem::Moc => moc_bound_check(f, p.x, &p.params, w)?,
                Theorem::Lipschitz => lipschitz_bound_check(f, p.x, &p.params)?,
                Theorem::Cb2 => cb2_bound_check(f, p.x, &p.params)?,
                _ => unreachable!("univariate theorems only"),
            };
            held += usize::from(r.holds);
            degenerate += usize::from(r.degenerate);
            let mut fields = vec![
                name.as_str().into(),
                p.x.into(),
                p.params.n.into(),
                p.params.q.value().into(),
                p.params.mu.value().into(),
            ];
            fields.extend(bound_row(&r));
            table.push(fields);
            reports.push((row, r));
            row += 1;
        }
        series.extend(lhs_rhs_series(name, &reports));
    }
    let total = table.rows().len();
    let mut summary = format!("holds: {held}/{total}");
    if theorem == Theorem::Cb2 {
        summary.push_str(&format!("; literal form degenerate: {degenerate}/{total}"));
    }
    let outcome = Outcome {
        summary: Some(summary),
        violations: total - held,
        ..Outcome::default()
    };
    Ok((table, outcome, series))
}

fn bounds_peetre(
    ctx: &Context,
    names: &[String],
    points: &[SweepPoint],
    w: &Window,
) -> Result<BoundsParts, CliError> {
    let fs: Vec<TestFunction> = names.iter().map(|n| function(n)).collect::<Result<_, _>>()?;
    let mut table = ctx.table(&["function", "x", "n", "q", "mu", "lhs", "bracket", "d", "ratio", "degenerate"]);
    let (mut positive, mut finite, mut row) = (0, 0, 0);
    let mut series = Vec::new();
    for (f, name) in fs.iter().zip(names) {
        let mut pts = Vec::new();
        for p in points {
            let r = peetre_report(f, p.x, &p.params, w)?;
            if r.d > 0.0 {
                positive += 1;
                finite += usize::from(r.ratio.is_some_and(f64::is_finite));
            }
            if let Some(ratio) = r.ratio {
                pts.push((row as f64, ratio));
            }
            table.push(vec![
                name.as_str().into(),
                p.x.into(),
                p.params.n.into(),
                p.params.q.value().into(),
                p.params.mu.value().into(),
                r.lhs.into(),
                r.bracket.into(),
                r.d.into(),
                r.ratio.into(),
                r.degenerate.into(),
            ]);
            row += 1;
        }
        series.push(Series {
            name: format!("{name} ratio"),
            points: pts,
        });
    }
    let outcome = Outcome {
        summary: Some(format!("finite ratios where d > 0: {finite}/{positive}")),
        ..Outcome::default()
    };
    Ok((table, outcome, series))
}

fn bounds_bivariate(
    ctx: &Context,
    a: &BoundsArgs,
    names: &[String],
    points: &[SweepPoint],
    w: &Window,
) -> Result<BoundsParts, CliError> {
    let fs: Vec<TestFunction2D> = names.iter().map(|n| function2(n, a.window)).collect::<Result<_, _>>()?;
    if a.theorem == Theorem::Lipschitz2 {
        if let Some(f) = fs.iter().find(|f| f.lipschitz().is_none()) {
            return Err(usage(format!("function `{}` carries no Lipschitz data", f.name())));
        }
    }
    let mut table = ctx.table(&[
        "function", "x", "y", "n", "q", "mu", "mu2", "lhs", "rhs", "slack", "holds", "degenerate",
    ]);
    let (mut held, mut row) = (0, 0);
    let mut series = Vec::new();
    for (f, name) in fs.iter().zip(names) {
        let mut reports = Vec::new();
        for p in points {
            for &y in &a.x_list {
                let bp = BivariateParams::new(p.params, p.params);
                let r = match a.theorem {
                    Theorem::Moc2 => bivariate_moc_bound_check(f, p.x, y, &bp, w)?,
                    _ => bivariate_lipschitz_bound_check(f, p.x, y, &bp)?,
                };
                held += usize::from(r.holds);
                let mut fields = vec![
                    name.as_str().into(),
                    p.x.into(),
                    y.into(),
                    p.params.n.into(),
                    p.params.q.value().into(),
                    p.params.mu.value().into(),
                    bp.py.mu.value().into(),
                ];
                fields.extend(bound_row(&r));
                table.push(fields);
                reports.push((row, r));
                row += 1;
            }
        }
        series.extend(lhs_rhs_series(name, &reports));
    }
    let total = table.rows().len();
    let outcome = Outcome {
        summary: Some(format!("holds: {held}/{total}")),
        violations: total - held,
        ..Outcome::default()
    };
    Ok((table, outcome, series))
}

pub fn cmd_bivariate(ctx: &Context, a: &BivariateArgs) -> CmdResult {
    let pts = grid(&a.grid)?;
    let f = function2(&a.function, a.grid.x_max)?;
    f.validate()?;
    let bp = BivariateParams::new(ctx.params(a.n, a.q, a.mu)?, ctx.params(a.n2, a.q2, a.mu2)?);
    let separable = f.factors().is_some();
    let mut header = vec!["x", "y", "value", "tail_bound"];
    if separable {
        header.push("residual");
    }
    let mut table = ctx.table(&header);
    table.comment(format!(
        "function={} n={} q={:?} mu={:?} n2={} q2={:?} mu2={:?}",
        a.function, a.n, a.q, a.mu, a.n2, a.q2, a.mu2
    ));
    let mut by_y: Vec<Series> = pts
        .iter()
        .map(|y| Series {
            name: format!("y={y:?}"),
            points: Vec::new(),
        })
        .collect();
    for &x in &pts {
        for (&y, s) in pts.iter().zip(&mut by_y) {
            let v = apply2(&f, x, y, &bp)?;
            let mut row = vec![x.into(), y.into(), v.value.into(), v.error_bound().into()];
            if separable {
                let slow = apply2_double_sum(&f, x, y, &bp)?;
                row.push((v.value - slow.value).abs().into());
            }
            table.push(row);
            s.points.push((x, v.value));
        }
    }
    let plot = |scale| {
        Ok(Plot {
            title: format!("bivariate operator applied to {}", a.function),
            x_label: "x".into(),
            y_label: "value".into(),
            scale,
            series: by_y,
            notes: vec![],
        })
    };
    finish(
        &a.output,
        table.clone(),
        plot,
        PlotScale::Linear,
        Outcome::default(),
        mu_warnings(&[a.mu, a.mu2]),
    )
}
