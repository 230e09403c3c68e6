use halfline::asymptotics::{asymptotic, boundary_curves, phase_diagram, region};
use halfline::dispersion::{
    characteristic_roots, critical_frequencies, group_velocity, Equation, ModelCoefficients, RootLocation,
};
use halfline::dnmap::{asymptotic_solution_series, dn_coefficients, dn_coefficients_with_slope, FourierBoundary};
use halfline::fokas::{bbm_exact, kdv_exact, ContourKind, QuadratureConfig};
use halfline::oracle::{solve_at, OracleGrid, RightBoundary};
use halfline::Error;
use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::table::{Cell, Table};

pub const SAMPLE_HEADER: [&str; 10] = ["model", "omega0", "x", "t", "xi", "method", "value", "err_estimate", "region", "status"];

/// Oracle runs beyond this time are refused.
pub const ORACLE_T_MAX: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Model {
    Eq(Equation),
    General(ModelCoefficients),
}

impl Model {
    pub fn name(&self) -> &'static str {
        match self {
            Model::Eq(e) => e.name(),
            Model::General(_) => "general",
        }
    }

    pub fn coefficients(&self) -> ModelCoefficients {
        match self {
            Model::Eq(e) => e.coefficients(),
            Model::General(c) => *c,
        }
    }

    /// Equations with exact and asymptotic evaluators.
    pub fn equation(&self) -> Result<Equation, Error> {
        match self {
            Model::Eq(e) => Ok(*e),
            Model::General(c) if !c.is_covered() => Err(Error::UncoveredFamily),
            Model::General(_) => Err(Error::Precondition("this command needs --model kdv or bbm".into())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Exact,
    Asym,
    Series,
    Oracle,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Exact, Method::Asym, Method::Series, Method::Oracle];

    pub fn parse(s: &str) -> Result<Self, String> {
        match s {
            "exact" => Ok(Method::Exact),
            "asym" => Ok(Method::Asym),
            "series" => Ok(Method::Series),
            "oracle" => Ok(Method::Oracle),
            _ => Err(format!("unknown method '{s}' (exact, asym, series, oracle, all)")),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::Asym => "asym",
            Method::Series => "series",
            Method::Oracle => "oracle",
        }
    }
}

pub fn parse_contour(s: &str) -> Result<ContourKind, String> {
    Ok(match s {
        "kdv-boundary" => ContourKind::KdVBoundaryDPlus,
        "kdv-half-lines" => ContourKind::KdVHalfLines,
        "kdv-saddle" => ContourKind::KdVSaddleAdapted,
        "bbm-circle" => ContourKind::BBMCircle,
        "bbm-saddle" => ContourKind::BBMSaddleAdapted,
        _ => return Err(format!("unknown contour '{s}'")),
    })
}

pub fn parse_bc(s: &str) -> Result<RightBoundary, String> {
    match s {
        "sponge" => Ok(RightBoundary::Sponge),
        "truncation" => Ok(RightBoundary::Truncation),
        _ => Err(format!("unknown right boundary '{s}' (sponge, truncation)")),
    }
}

/// Oracle grid settings; unset fields fall back to `OracleGrid::for_horizon`.
#[derive(Debug, Clone, Copy, Default)]
pub struct GridSettings {
    pub nx: Option<usize>,
    pub dt: Option<f64>,
    pub x_max: Option<f64>,
    pub bc: Option<RightBoundary>,
}

impl GridSettings {
    pub fn build(&self, eq: Equation, t_final: f64) -> Result<OracleGrid, Error> {
        let auto = OracleGrid::for_horizon(eq, t_final)?;
        if self.nx.is_none() && self.dt.is_none() && self.x_max.is_none() && self.bc.is_none() {
            return Ok(auto);
        }
        let x_max = self.x_max.unwrap_or(auto.x_max);
        let nx = self.nx.unwrap_or(auto.nx);
        let bc = self.bc.unwrap_or(RightBoundary::Sponge);
        let dt = match self.dt {
            Some(dt) => dt,
            None => {
                let probe = OracleGrid { equation: eq, x_max, nx, dt: 0.0, bc_right: bc, sponge_width: 0.15 * x_max };
                (0.95 * probe.stability_limit()).min(0.02)
            }
        };
        OracleGrid::new(eq, x_max, nx, dt, bc)
    }
}

pub struct EvalContext {
    pub eq: Equation,
    pub omega0: f64,
    pub quad: QuadratureConfig,
    pub grid: GridSettings,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub value: Option<f64>,
    pub err: Option<f64>,
    pub status: String,
}

impl Outcome {
    fn ok(value: f64, err: Option<f64>) -> Self {
        Outcome { value: Some(value), err, status: "ok".into() }
    }

    fn fail(msg: impl std::fmt::Display) -> Self {
        Outcome { value: None, err: None, status: format!("error: {msg}") }
    }

    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }
}

pub fn evaluate(ctx: &EvalContext, method: Method, points: &[(f64, f64)]) -> Vec<Outcome> {
    let (eq, w) = (ctx.eq, ctx.omega0);
    match method {
        Method::Exact => points
            .par_iter()
            .map(|&(x, t)| {
                let r = match eq {
                    Equation::Kdv => kdv_exact(x, t, w, &ctx.quad),
                    Equation::Bbm => bbm_exact(x, t, w, &ctx.quad),
                };
                r.map_or_else(Outcome::fail, |s| Outcome::ok(s.value, Some(s.err_estimate)))
            })
            .collect(),
        Method::Asym => points
            .par_iter()
            .map(|&(x, t)| asymptotic(eq, w, x, t).map_or_else(Outcome::fail, |s| Outcome::ok(s.value, Some(s.err_estimate))))
            .collect(),
        Method::Series => {
            let dn = FourierBoundary::sine(w).and_then(|b| dn_coefficients(&eq.coefficients(), &b));
            points
                .iter()
                .map(|&(x, t)| match &dn {
                    Ok(dn) => asymptotic_solution_series(dn, x, t).map_or_else(Outcome::fail, |v| Outcome::ok(v.re, None)),
                    Err(e) => Outcome::fail(e),
                })
                .collect()
        }
        Method::Oracle => oracle_values(ctx, points),
    }
}

fn oracle_values(ctx: &EvalContext, points: &[(f64, f64)]) -> Vec<Outcome> {
    let mut out = vec![Outcome::fail("not evaluated"); points.len()];
    let usable: Vec<usize> = (0..points.len())
        .filter(|&i| {
            let (x, t) = points[i];
            if !(t >= 0.0 && t <= ORACLE_T_MAX) {
                out[i] = Outcome::fail(format!("oracle runs need 0 <= t <= {ORACLE_T_MAX}"));
                false
            } else if !(x >= 0.0) {
                out[i] = Outcome::fail("x must be non-negative");
                false
            } else {
                true
            }
        })
        .collect();
    if usable.is_empty() {
        return out;
    }
    let t_max = usable.iter().map(|&i| points[i].1).fold(0.0, f64::max);
    let grid = match ctx.grid.build(ctx.eq, t_max) {
        Ok(g) => g,
        Err(e) => {
            usable.iter().for_each(|&i| out[i] = Outcome::fail(&e));
            return out;
        }
    };
    let mut times: Vec<f64> = usable.iter().map(|&i| points[i].1).collect();
    times.sort_by(f64::total_cmp);
    times.dedup();
    match solve_at(ctx.omega0, &grid, &times) {
        Ok(snaps) => {
            let limit = grid.x_max - grid.sponge_width;
            for &i in &usable {
                let (x, t) = points[i];
                let s = &snaps[times.partition_point(|v| *v < t)];
                out[i] = if x <= limit {
                    Outcome::ok(s.value_at(x), None)
                } else {
                    Outcome::fail(format!("x beyond the undamped domain [0, {limit}]"))
                };
            }
        }
        Err(e) => usable.iter().for_each(|&i| out[i] = Outcome::fail(&e)),
    }
    out
}

pub fn xi_of(x: f64, t: f64) -> Option<f64> {
    (t > 0.0).then(|| x / t)
}

pub fn region_cell(eq: Equation, omega0: f64, xi: Option<f64>) -> Cell {
    match xi {
        None => Cell::Empty,
        Some(xi) => match region(eq, omega0, xi) {
            Ok(l) => Cell::Text(l.region.as_str().into()),
            Err(Error::OnRegionBoundary { .. }) => "boundary".into(),
            Err(_) => Cell::Empty,
        },
    }
}

pub fn sample_row(model: &str, eq: Equation, w: f64, (x, t): (f64, f64), method: &str, o: &Outcome) -> Vec<Cell> {
    let xi = xi_of(x, t);
    vec![
        model.into(),
        w.into(),
        x.into(),
        t.into(),
        xi.into(),
        method.into(),
        o.value.into(),
        o.err.into(),
        region_cell(eq, w, xi),
        o.status.clone().into(),
    ]
}

/// Rows for each method in turn; with more than one method, difference rows
/// `exact-<m>` follow.
pub fn evaluate_table(ctx: &EvalContext, model: &str, methods: &[Method], points: &[(f64, f64)]) -> (Table, usize, usize) {
    let mut table = Table::new(&SAMPLE_HEADER);
    let results: Vec<(Method, Vec<Outcome>)> = methods.iter().map(|&m| (m, evaluate(ctx, m, points))).collect();
    let (mut total, mut ok) = (0, 0);
    let mut push = |table: &mut Table, p: (f64, f64), name: &str, o: &Outcome| {
        total += 1;
        ok += o.is_ok() as usize;
        table.push(sample_row(model, ctx.eq, ctx.omega0, p, name, o));
    };
    for (m, outs) in &results {
        for (p, o) in points.iter().zip(outs) {
            push(&mut table, *p, m.as_str(), o);
        }
    }
    if let Some((_, base)) = results.iter().find(|(m, _)| *m == Method::Exact).filter(|_| methods.len() > 1) {
        for (m, outs) in results.iter().filter(|(m, _)| *m != Method::Exact) {
            let name = format!("exact-{}", m.as_str());
            for ((p, a), b) in points.iter().zip(base).zip(outs) {
                let o = match (a.value, b.value) {
                    (Some(u), Some(v)) => Outcome::ok(u - v, a.err.zip(b.err).map(|(e, f)| e + f)),
                    _ => Outcome::fail("an operand failed"),
                };
                push(&mut table, *p, &name, &o);
            }
        }
    }
    (table, total, ok)
}

pub fn roots_table(model: &Model, omega0: f64, harmonics: &[i32]) -> Result<Table, Error> {
    if !(omega0 > 0.0) {
        return Err(Error::Precondition("omega0 must be positive for the wavemaker problem".into()));
    }
    let c = model.coefficients();
    let cr = critical_frequencies(&c)?;
    let mut table = Table::new(&[
        "model", "omega0", "n", "k_re", "k_im", "multiplicity", "location", "radiating", "group_velocity_re",
        "group_velocity_im", "omega_cr_minus", "omega_cr_plus",
    ]);
    for &n in harmonics {
        let set = characteristic_roots(&c, n, omega0)?;
        for (i, r) in set.roots.iter().enumerate() {
            let cg = group_velocity(&c, r.value).ok();
            let location = match r.location {
                RootLocation::OnDPlusBoundary => "dplus_boundary",
                RootLocation::OnDMinusBoundary => "dminus_boundary",
                RootLocation::Interior => "interior",
            };
            table.push(vec![
                model.name().into(),
                omega0.into(),
                Cell::Int(n as i64),
                r.value.re.into(),
                r.value.im.into(),
                Cell::Int(r.multiplicity as i64),
                location.into(),
                (if i == set.k0_index { "yes" } else { "no" }).into(),
                cg.map(|z| z.re).into(),
                cg.map(|z| z.im).into(),
                cr.omega_cr_minus.into(),
                cr.omega_cr_plus.into(),
            ]);
        }
    }
    Ok(table)
}

pub fn dnmap_table(model: &Model, omega0: f64, harmonics: &[(i32, f64, f64)], slope: Option<f64>) -> Result<Table, Error> {
    if !(omega0 > 0.0) {
        return Err(Error::Precondition("omega0 must be positive".into()));
    }
    let boundary = if harmonics.is_empty() {
        FourierBoundary::sine(omega0)?
    } else {
        FourierBoundary::new(omega0, harmonics.iter().map(|&(n, re, im)| (n, C64::new(re, im))))?
    };
    let c = model.coefficients();
    let dn = match slope {
        Some(s) => dn_coefficients_with_slope(&c, &boundary, s)?,
        None => dn_coefficients(&c, &boundary)?,
    };
    let mut table = Table::new(&["model", "omega0", "n", "a_re", "a_im", "k0_re", "k0_im", "b_re", "b_im", "c_re", "c_im"]);
    for h in &dn.harmonics {
        table.push(vec![
            model.name().into(),
            omega0.into(),
            Cell::Int(h.n as i64),
            h.a.re.into(),
            h.a.im.into(),
            h.k0.re.into(),
            h.k0.im.into(),
            h.b.re.into(),
            h.b.im.into(),
            h.c.map(|z| z.re).into(),
            h.c.map(|z| z.im).into(),
        ]);
    }
    Ok(table)
}

pub fn phase_table(eq: Equation, omega_range: (f64, f64), xi_range: (f64, f64), resolution: usize, curve_samples: usize) -> Table {
    let mut table = Table::new(&["kind", "name", "omega0", "xi", "label"]);
    for (w, xi, label) in phase_diagram(eq, omega_range, xi_range, resolution, resolution) {
        let label: Cell = match label {
            Ok(l) => l.region.as_str().into(),
            Err(Error::OnRegionBoundary { .. }) => "boundary".into(),
            Err(e) => format!("error: {e}").into(),
        };
        table.push(vec!["cell".into(), eq.name().into(), w.into(), xi.into(), label]);
    }
    for curve in boundary_curves(eq, omega_range.1, xi_range.1, curve_samples) {
        for (w, xi) in curve.points {
            table.push(vec!["curve".into(), curve.name.into(), w.into(), xi.into(), Cell::Empty]);
        }
    }
    table
}

/// Per time: max |a − b| and that maximum relative to max |a|.
pub fn compare_table(ctx: &EvalContext, model: &str, a: Method, b: Method, xs: &[f64], ts: &[f64]) -> Table {
    let points: Vec<(f64, f64)> = ts.iter().flat_map(|&t| xs.iter().map(move |&x| (x, t))).collect();
    let (ra, rb) = (evaluate(ctx, a, &points), evaluate(ctx, b, &points));
    let mut table = Table::new(&["model", "omega0", "method_a", "method_b", "t", "points", "max_abs_diff", "rel_linf", "status"]);
    for (j, &t) in ts.iter().enumerate() {
        let idx = j * xs.len()..(j + 1) * xs.len();
        let (mut diff, mut scale, mut bad): (f64, f64, usize) = (0.0, 0.0, 0);
        for i in idx {
            match (ra[i].value, rb[i].value) {
                (Some(u), Some(v)) => {
                    diff = diff.max((u - v).abs());
                    scale = scale.max(u.abs());
                }
                _ => bad += 1,
            }
        }
        let status = if bad == 0 { "ok".to_string() } else { format!("error: {bad} points failed") };
        table.push(vec![
            model.into(),
            ctx.omega0.into(),
            a.as_str().into(),
            b.as_str().into(),
            t.into(),
            Cell::Int(xs.len() as i64),
            (bad == 0).then_some(diff).into(),
            (bad == 0 && scale > 0.0).then(|| diff / scale).into(),
            status.into(),
        ]);
    }
    table
}
