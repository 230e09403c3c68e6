//! Exact solutions of the sinusoidal wavemaker problems for linear KdV and
//! linear BBM, evaluated as contour integrals in the spectral plane.
//!
//! Both problems take `u(x,0) = 0` and `u(0,t) = sin(−ω₀t)`, i.e. Fourier
//! coefficients `a_{±1} = ∓1/(2i)`.
//!
//! Five contour strategies are available:
//!
//! * [`ContourKind::KdVBoundaryDPlus`]: the combined, entire integrand on
//!   ∂D⁺ itself. Needs `x > 0` and becomes expensive when `t` is large and
//!   `x` small, because the tails oscillate like `e^{ik³t}`.
//! * [`ContourKind::KdVHalfLines`]: residues plus the two half-lines from
//!   `−i` at angles `π/3` and `2π/3`.
//! * [`ContourKind::KdVSaddleAdapted`] (default): residues plus a V with
//!   arms at `π/6` and `5π/6` whose vertex is placed so that the arms pass
//!   through the saddle points of `ikx − iΩt`. The integrand never exceeds
//!   its saddle value, so there is no cancellation at large `xt`.
//! * [`ContourKind::BBMCircle`]: the circle `|k − i| = √2` with the
//!   combined integrand and the periodic trapezoid rule.
//! * [`ContourKind::BBMSaddleAdapted`] (default): residues plus a closed
//!   loop around `k = i` made of circular arcs through the saddles.

use std::f64::consts::{FRAC_PI_3, FRAC_PI_6, PI};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::dispersion::{characteristic_roots, Equation, Root};
use crate::error::{Error, Result};
use crate::quadrature::{integrate, trapezoid_periodic, QuadResult, Tolerance};

type C64 = Complex64;

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Which contour an evaluator integrates along.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ContourKind {
    KdVBoundaryDPlus,
    KdVHalfLines,
    KdVSaddleAdapted,
    BBMCircle,
    BBMSaddleAdapted,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourSpec {
    pub kind: ContourKind,
    /// Cap on the parameter along unbounded contours; `0` picks it
    /// automatically from the integrand envelope.
    pub truncation_radius: f64,
    /// Initial node count (trapezoid) or initial panel count (adaptive).
    pub node_count: usize,
    /// Radius of the pole indentations on ∂D⁺. Only used when exporting
    /// geometry; the evaluator integrates the combined integrand, which
    /// has no poles to avoid.
    pub indentation_radius: f64,
}

impl ContourSpec {
    pub fn new(kind: ContourKind) -> Self {
        Self { kind, truncation_radius: 0.0, node_count: 64, indentation_radius: 0.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    pub contour: ContourSpec,
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Below this `|z|` the kernel `ψ(z) = (1 − e^{−iz})/z` switches to its
    /// Taylor series.
    pub removable_tol: f64,
    pub max_evals: usize,
}

impl QuadratureConfig {
    pub fn new(kind: ContourKind) -> Self {
        Self {
            contour: ContourSpec::new(kind),
            rel_tol: 1e-10,
            abs_tol: 1e-13,
            removable_tol: 0.1,
            max_evals: 20_000_000,
        }
    }

    /// Saddle-adapted KdV contour.
    pub fn kdv() -> Self {
        Self::new(ContourKind::KdVSaddleAdapted)
    }

    /// Saddle-adapted BBM contour.
    pub fn bbm() -> Self {
        Self::new(ContourKind::BBMSaddleAdapted)
    }

    pub fn with_tolerances(mut self, rel_tol: f64, abs_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self.abs_tol = abs_tol;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol >= 0.0 && self.removable_tol > 0.0) {
            return Err(Error::Precondition("tolerances must be positive".into()));
        }
        Ok(())
    }

    fn tolerance(&self) -> Tolerance {
        Tolerance { rel: self.rel_tol, abs: self.abs_tol, max_evals: self.max_evals }
    }
}

/// Provenance of a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    ExactQuadrature,
    Asymptotic,
    Series,
    Oracle,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::ExactQuadrature => "exact",
            Method::Asymptotic => "asym",
            Method::Series => "series",
            Method::Oracle => "oracle",
        }
    }
}

/// One evaluated point of a solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolutionSample {
    pub x: f64,
    pub t: f64,
    pub value: f64,
    pub method: Method,
    pub err_estimate: f64,
}

/// `ψ(z) = (1 − e^{−iz})/z`, with the removable singularity at `0`
/// handled by the series `i Σ (−iz)^m/(m+1)!` for `|z| < removable_tol`.
pub fn psi(z: C64, removable_tol: f64) -> C64 {
    if z.norm() >= removable_tol {
        return (1.0 - (-I * z).exp()) / z;
    }
    let w = -I * z;
    let mut term = C64::new(1.0, 0.0);
    let mut sum = term;
    for m in 1..40 {
        term *= w / (m + 1) as f64;
        sum += term;
        if term.norm() <= 1e-17 * sum.norm() {
            break;
        }
    }
    I * sum
}

/// `(e^{iat} − e^{−iωt})/(ω + a)` evaluated as `e^{iat}·t·ψ((ω + a)t)`.
pub fn stable_kernel(a: f64, w: C64, t: f64, removable_tol: f64) -> C64 {
    (I * a * t).exp() * t * psi((w + a) * t, removable_tol)
}

/// Fourier coefficients of `sin(−ω₀t)` for harmonics `n = 1` and `n = −1`.
fn sine_coefficients() -> [(i32, C64); 2] {
    [(1, I / 2.0), (-1, -I / 2.0)]
}

/// `(w, w')` where `w` is the exponent frequency: `Ω` for KdV, `ω` for BBM.
fn exponent_frequency(eq: Equation, k: C64) -> (C64, C64) {
    match eq {
        Equation::Kdv => (k - k * k * k, 1.0 - 3.0 * k * k),
        Equation::Bbm => {
            let d = 1.0 + k * k;
            (k / d, (1.0 - k * k) / (d * d))
        }
    }
}

/// The saddle form of the integrand, `(ω₀/2π)(ik)^j w' e^{ikx − iwt}/(w² − ω₀²)`.
#[derive(Debug, Clone, Copy)]
struct SaddleIntegrand {
    eq: Equation,
    x: f64,
    t: f64,
    omega0: f64,
    j: u32,
}

impl SaddleIntegrand {
    fn eval(&self, k: C64) -> C64 {
        let (w, wp) = exponent_frequency(self.eq, k);
        let e = (I * k * self.x - I * w * self.t).exp();
        let mut v = self.omega0 / (2.0 * PI) * wp * e / (w * w - self.omega0 * self.omega0);
        for _ in 0..self.j {
            v *= I * k;
        }
        v
    }

    fn log_mag(&self, k: C64) -> f64 {
        let (w, wp) = exponent_frequency(self.eq, k);
        let expo = (I * k * self.x - I * w * self.t).re;
        expo + (wp / (w * w - self.omega0 * self.omega0)).norm().ln() + self.j as f64 * k.norm().ln()
    }
}

/// All characteristic roots for `n = ±1`, with the harmonic coefficient.
fn harmonic_roots(eq: Equation, omega0: f64) -> Result<Vec<HarmonicRoot>> {
    let c = eq.coefficients();
    let mut out = Vec::new();
    for (n, a) in sine_coefficients() {
        for root in characteristic_roots(&c, n, omega0)?.roots {
            out.push(HarmonicRoot { n, a, root });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy)]
struct HarmonicRoot {
    n: i32,
    a: C64,
    root: Root,
}

/// `Σ a_n m_j (ik_j)^j e^{ik_j x + inω₀t}` over roots selected by `inside`.
fn residue_sum(
    roots: &[HarmonicRoot],
    omega0: f64,
    x: f64,
    t: f64,
    j: u32,
    inside: impl Fn(C64) -> bool,
) -> C64 {
    let mut s = C64::new(0.0, 0.0);
    for h in roots.iter().filter(|h| inside(h.root.value)) {
        let k = h.root.value;
        let phase = I * k * x + I * h.n as f64 * omega0 * t;
        let mut v = h.a * h.root.multiplicity as f64 * phase.exp();
        for _ in 0..j {
            v *= I * k;
        }
        s += v;
    }
    s
}

fn finish(x: f64, t: f64, total: C64, q: QuadResult) -> Result<SolutionSample> {
    if !q.converged {
        return Err(Error::NonConvergent { err_estimate: q.err, evaluations: q.evals });
    }
    Ok(SolutionSample { x, t, value: total.re, method: Method::ExactQuadrature, err_estimate: q.err })
}

fn check_inputs(x: f64, t: f64, omega0: f64) -> Result<()> {
    if !(x >= 0.0 && t >= 0.0 && x.is_finite() && t.is_finite()) {
        return Err(Error::Precondition("need finite x ≥ 0 and t ≥ 0".into()));
    }
    if !(omega0 > 0.0 && omega0.is_finite()) {
        return Err(Error::Precondition("need omega0 > 0".into()));
    }
    Ok(())
}

fn zero_sample(x: f64, t: f64) -> SolutionSample {
    SolutionSample { x, t, value: 0.0, method: Method::ExactQuadrature, err_estimate: 0.0 }
}

// ---------------------------------------------------------------- KdV

/// A V-shaped contour: vertex `ih`, arms `ih + r e^{iβ}` and `ih + r e^{i(π−β)}`,
/// oriented from the left arm to the right arm.
#[derive(Debug, Clone, Copy, PartialEq)]
struct VContour {
    h: f64,
    beta: f64,
}

impl VContour {
    fn right(&self, r: f64) -> C64 {
        C64::new(0.0, self.h) + C64::from_polar(r, self.beta)
    }

    fn left(&self, r: f64) -> C64 {
        C64::new(0.0, self.h) + C64::from_polar(r, PI - self.beta)
    }

    fn above(&self, k: C64) -> bool {
        k.im > self.h + k.re.abs() * self.beta.tan()
    }

    fn distance(&self, k: C64) -> f64 {
        let rel = k - C64::new(0.0, self.h);
        [self.beta, PI - self.beta]
            .iter()
            .map(|&a| {
                let d = C64::from_polar(1.0, a);
                let proj = (rel * d.conj()).re;
                if proj <= 0.0 {
                    rel.norm()
                } else {
                    (rel - d * proj).norm()
                }
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Parameter value where the arms cross the real axis, if they do.
    fn crossing(&self) -> Option<f64> {
        (self.h < 0.0).then(|| -self.h / self.beta.sin())
    }
}

const ROOT_CLEARANCE: f64 = 0.02;

fn clear_of_roots(dist: impl Fn(C64) -> f64, roots: &[HarmonicRoot]) -> bool {
    roots.iter().all(|h| dist(h.root.value) >= ROOT_CLEARANCE)
}

/// Vertex height for the saddle-adapted V at ray `ξ`, nudged off any root.
fn kdv_adapted_contour(xi: f64, roots: &[HarmonicRoot]) -> VContour {
    let beta = FRAC_PI_6;
    let h0 = if xi < 1.0 {
        -((1.0 - xi) / 3.0).sqrt() * beta.tan()
    } else {
        ((xi - 1.0) / 3.0).sqrt()
    };
    nudge_v(VContour { h: h0, beta }, roots)
}

fn nudge_v(v: VContour, roots: &[HarmonicRoot]) -> VContour {
    for m in 0..200 {
        let step = 0.005 * ((m + 1) / 2) as f64 * if m % 2 == 1 { 1.0 } else { -1.0 };
        let cand = VContour { h: v.h + if m == 0 { 0.0 } else { step }, ..v };
        if clear_of_roots(|k| cand.distance(k), roots) {
            return cand;
        }
    }
    v
}

/// Grows the parameter range until the integrand has dropped far below its
/// peak along the sampled points.
fn truncate(log_mag: impl Fn(f64) -> f64, start: f64, peak: f64, cap: f64) -> f64 {
    let mut r = start.max(1.0);
    while r < cap {
        if log_mag(r) < peak - 46.0 && log_mag(1.25 * r) < peak - 46.0 {
            return r;
        }
        r *= 1.25;
    }
    cap
}

fn integrate_v(
    g: &SaddleIntegrand,
    v: VContour,
    cfg: &QuadratureConfig,
    saddle_width: f64,
) -> QuadResult {
    let er = C64::from_polar(1.0, v.beta);
    let el = C64::from_polar(1.0, PI - v.beta);
    let f = |r: f64| g.eval(v.right(r)) * er - g.eval(v.left(r)) * el;
    let log_mag = |r: f64| g.log_mag(v.right(r)).max(g.log_mag(v.left(r)));

    let rc = v.crossing().unwrap_or(0.0);
    let mut pts = vec![0.0];
    for s in [-4.0, -1.0, 0.0, 1.0, 4.0] {
        let p = rc + s * saddle_width;
        if p > 0.0 {
            pts.push(p);
        }
    }
    let peak = pts.iter().map(|&r| log_mag(r)).fold(f64::NEG_INFINITY, f64::max);
    let cap = if cfg.contour.truncation_radius > 0.0 { cfg.contour.truncation_radius } else { 1e6 };
    let rmax = truncate(log_mag, 2.0 * (rc + 4.0 * saddle_width), peak, cap);
    pts.retain(|&p| p < rmax);
    let mut r = *pts.last().unwrap();
    while r * 2.0 < rmax {
        r = if r == 0.0 { saddle_width } else { r * 2.0 };
        pts.push(r);
    }
    pts.push(rmax);
    pts = refine(&pts, cfg.contour.node_count / 15);
    integrate(f, &pts, &cfg.tolerance())
}

/// Splits the widest intervals until there are at least `min_panels`.
fn refine(pts: &[f64], min_panels: usize) -> Vec<f64> {
    let mut p = pts.to_vec();
    p.dedup();
    while p.len() - 1 < min_panels {
        let (i, _) = p
            .windows(2)
            .enumerate()
            .map(|(i, w)| (i, w[1] - w[0]))
            .fold((0, f64::NEG_INFINITY), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
        let mid = 0.5 * (p[i] + p[i + 1]);
        p.insert(i + 1, mid);
    }
    p
}

fn kdv_residue_v(x: f64, t: f64, omega0: f64, cfg: &QuadratureConfig, j: u32) -> Result<SolutionSample> {
    let roots = harmonic_roots(Equation::Kdv, omega0)?;
    let g = SaddleIntegrand { eq: Equation::Kdv, x, t, omega0, j };
    let xi = x / t;
    let (v, width) = match cfg.contour.kind {
        ContourKind::KdVHalfLines => {
            if x > 0.9 * f64::MAX.ln() {
                return kdv_boundary(x, t, omega0, cfg, j);
            }
            (nudge_v(VContour { h: -1.0, beta: FRAC_PI_3 }, &roots), 1.0 / (1.0 + 3.0 * t).sqrt())
        }
        _ => {
            let v = kdv_adapted_contour(xi, &roots);
            let curv = 6.0 * ((1.0 - xi).abs() / 3.0).sqrt() * t;
            (v, 1.0 / (1.0 + curv).sqrt())
        }
    };
    let q = integrate_v(&g, v, cfg, width);
    let res = residue_sum(&roots, omega0, x, t, j, |k| v.above(k));
    finish(x, t, res + q.value, q)
}

/// Strategy A: the combined integrand on ∂D⁺ with the stable kernel.
fn kdv_boundary(x: f64, t: f64, omega0: f64, cfg: &QuadratureConfig, j: u32) -> Result<SolutionSample> {
    if x <= 0.0 {
        return Err(Error::StrategyDomain("the ∂D⁺ integral needs x > 0".into()));
    }
    let tol = cfg.removable_tol;
    let coeffs = sine_coefficients();
    let g = |k: C64| -> C64 {
        let w = k - k * k * k;
        let wp = 1.0 - 3.0 * k * k;
        let mut kern = C64::new(0.0, 0.0);
        for (n, a) in coeffs {
            kern += a * stable_kernel(n as f64 * omega0, w, t, tol);
        }
        let mut v = (I * k * x).exp() * wp * kern / (2.0 * PI * I);
        for _ in 0..j {
            v *= I * k;
        }
        v
    };
    let s3 = 1.0 / 3f64.sqrt();
    let seg = integrate(|s| g(C64::new(s, 0.0)), &refine(&[-s3, 0.0, s3], cfg.contour.node_count / 30), &cfg.tolerance());

    let branch = |tau: f64, sign: f64| -> (C64, C64) {
        let re = ((1.0 + tau * tau) / 3.0).sqrt();
        let k = C64::new(sign * re, tau);
        let dk = C64::new(sign * tau / (3.0 * re), 1.0);
        (k, dk)
    };
    // Tail beyond T is about e^{−Tx}/(Tx).
    let floor = cfg.abs_tol.max(1e-3 * cfg.rel_tol).max(1e-16);
    let mut auto = (1.0 / floor).ln() / x;
    for _ in 0..4 {
        auto = ((1.0 / floor).ln() - (auto * x).max(1.0).ln() + 1.0) / x;
    }
    let tmax = if cfg.contour.truncation_radius > 0.0 { auto.min(cfg.contour.truncation_radius) } else { auto };
    // Three local oscillations of e^{−iΩt} e^{ikx} per panel.
    let mut pts = vec![0.0];
    let mut tau = 0.0;
    while tau < tmax {
        let (k, dk) = branch(tau, 1.0);
        let rate = t * (1.0 - 3.0 * k * k).norm() * dk.norm() + x;
        tau = (tau + (6.0 * PI / rate).min(0.5)).min(tmax);
        pts.push(tau);
        if 15 * pts.len() > cfg.max_evals {
            return Err(Error::NonConvergent { err_estimate: f64::INFINITY, evaluations: 0 });
        }
    }
    let tails = integrate(
        |tau| {
            let (kr, dr) = branch(tau, 1.0);
            let (kl, dl) = branch(tau, -1.0);
            g(kr) * dr - g(kl) * dl
        },
        &pts,
        &Tolerance { max_evals: cfg.max_evals.saturating_sub(seg.evals), ..cfg.tolerance() },
    );
    let q = seg.combine(tails);
    finish(x, t, q.value, q)
}

fn kdv_dispatch(x: f64, t: f64, omega0: f64, cfg: &QuadratureConfig, j: u32) -> Result<SolutionSample> {
    check_inputs(x, t, omega0)?;
    cfg.validate()?;
    if t == 0.0 {
        return Ok(zero_sample(x, t));
    }
    match cfg.contour.kind {
        ContourKind::KdVBoundaryDPlus => kdv_boundary(x, t, omega0, cfg, j),
        ContourKind::KdVHalfLines | ContourKind::KdVSaddleAdapted => kdv_residue_v(x, t, omega0, cfg, j),
        _ => Err(Error::StrategyDomain("BBM contour requested for KdV".into())),
    }
}

/// `u(x,t)` for `u_t + u_x + u_xxx = 0`, `u(x,0) = 0`, `u(0,t) = sin(−ω₀t)`.
pub fn kdv_exact(x: f64, t: f64, omega0: f64, cfg: &QuadratureConfig) -> Result<SolutionSample> {
    kdv_dispatch(x, t, omega0, cfg, 0)
}

/// `u_x(x,t)` for the KdV wavemaker problem.
pub fn kdv_neumann_exact(x: f64, t: f64, omega0: f64, cfg: &QuadratureConfig) -> Result<SolutionSample> {
    kdv_dispatch(x, t, omega0, cfg, 1)
}

// ---------------------------------------------------------------- BBM

/// A closed loop around `k = i`: either one circle centred on the
/// imaginary axis, or an upper and a lower circular arc meeting at `±ρ`.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Loop {
    Circle { c: f64, r: f64 },
    Arcs { rho: f64, c_up: f64, r_up: f64, c_lo: f64, r_lo: f64 },
}

impl Loop {
    fn through_real(rho: f64, top: f64, depth: f64) -> Self {
        let c_up = (top * top - rho * rho) / (2.0 * top);
        let c_lo = (rho * rho - depth * depth) / (2.0 * depth);
        Loop::Arcs { rho, c_up, r_up: top - c_up, c_lo, r_lo: c_lo + depth }
    }

    fn through_imag(lo: f64, hi: f64) -> Self {
        Loop::Circle { c: 0.5 * (lo + hi), r: 0.5 * (hi - lo) }
    }

    fn inside(&self, k: C64) -> bool {
        match *self {
            Loop::Circle { c, r } => (k - C64::new(0.0, c)).norm() < r,
            Loop::Arcs { c_up, r_up, c_lo, r_lo, .. } => {
                if k.im >= 0.0 {
                    (k - C64::new(0.0, c_up)).norm() < r_up
                } else {
                    (k - C64::new(0.0, c_lo)).norm() < r_lo
                }
            }
        }
    }

    fn distance(&self, k: C64) -> f64 {
        let arc = |c: f64, r: f64, lo: f64, hi: f64| {
            let rel = k - C64::new(0.0, c);
            let mut a = rel.arg();
            while a < lo {
                a += 2.0 * PI;
            }
            while a > lo + 2.0 * PI {
                a -= 2.0 * PI;
            }
            if a <= hi {
                (rel.norm() - r).abs()
            } else {
                let p1 = C64::new(0.0, c) + C64::from_polar(r, lo);
                let p2 = C64::new(0.0, c) + C64::from_polar(r, hi);
                (k - p1).norm().min((k - p2).norm())
            }
        };
        match *self {
            Loop::Circle { c, r } => arc(c, r, -PI, PI),
            Loop::Arcs { .. } => {
                let [(cu, ru, a0, a1), (cl, rl, b0, b1)] = self.arcs();
                arc(cu, ru, a0, a1).min(arc(cl, rl, b0, b1))
            }
        }
    }

    /// `(centre, radius, θ_start, θ_end)` of the arcs, counter-clockwise.
    fn arcs(&self) -> [(f64, f64, f64, f64); 2] {
        match *self {
            Loop::Circle { c, r } => [(c, r, -PI / 2.0, PI / 2.0), (c, r, PI / 2.0, 1.5 * PI)],
            Loop::Arcs { rho, c_up, r_up, c_lo, r_lo } => {
                let tu = (-c_up).atan2(rho);
                let tl = (-c_lo).atan2(rho);
                [(c_lo, r_lo, -PI - tl, tl), (c_up, r_up, tu, PI - tu)]
            }
        }
    }
}

/// Squared moduli of the BBM saddles: `(3 − Ξ)/(Ξ + 1)` and
/// `−1 − (1 + Ξ)/(2ξ)`, written to stay finite at `ξ = 0`.
fn bbm_saddle_squares(xi: f64) -> (f64, f64) {
    let big_xi = (8.0 * xi + 1.0).sqrt();
    let inner = (3.0 - big_xi) / (big_xi + 1.0);
    let outer = if xi > 0.0 { -1.0 - (1.0 + big_xi) / (2.0 * xi) } else { f64::NEG_INFINITY };
    (inner, outer)
}

fn bbm_adapted_loop(xi: f64, roots: &[HarmonicRoot]) -> Loop {
    let (inner, outer) = bbm_saddle_squares(xi);
    let top_saddle = (-outer).sqrt();
    if xi < 1.0 {
        let rho = inner.max(0.0).sqrt().max(0.05);
        let top = top_saddle.min(4.0);
        for m in 0..200 {
            let shift = 0.005 * ((m + 1) / 2) as f64 * if m % 2 == 1 { 1.0 } else { -1.0 };
            let r = if m == 0 { rho } else { rho + shift };
            if r <= 0.02 || r >= 0.999 {
                continue;
            }
            for depth in [0.5 * r, 0.3 * r, 0.7 * r] {
                let l = Loop::through_real(r, top, depth);
                if clear_of_roots(|k| l.distance(k), roots) {
                    return l;
                }
            }
        }
        Loop::through_real(rho, top, 0.5 * rho)
    } else {
        let lo = (-inner).max(0.0).sqrt();
        for m in 0..200 {
            let shift = 0.005 * ((m + 1) / 2) as f64 * if m % 2 == 1 { 1.0 } else { -1.0 };
            let l = Loop::through_imag(if m == 0 { lo } else { lo + shift }, top_saddle);
            if clear_of_roots(|k| l.distance(k), roots) {
                return l;
            }
        }
        Loop::through_imag(lo, top_saddle)
    }
}

fn integrate_loop(g: &SaddleIntegrand, l: Loop, cfg: &QuadratureConfig) -> QuadResult {
    let per_arc = (cfg.contour.node_count / 30).max(4);
    l.arcs().iter().fold(QuadResult::zero(), |acc, &(c, r, a0, a1)| {
        let centre = C64::new(0.0, c);
        let f = |th: f64| {
            let e = C64::from_polar(1.0, th);
            g.eval(centre + r * e) * I * r * e
        };
        let pts: Vec<f64> = (0..=per_arc).map(|i| a0 + (a1 - a0) * i as f64 / per_arc as f64).collect();
        let budget = Tolerance { max_evals: cfg.max_evals.saturating_sub(acc.evals), ..cfg.tolerance() };
        acc.combine(integrate(f, &pts, &budget))
    })
}

fn bbm_residue_loop(x: f64, t: f64, omega0: f64, cfg: &QuadratureConfig, j: u32) -> Result<SolutionSample> {
    let roots = harmonic_roots(Equation::Bbm, omega0)?;
    let g = SaddleIntegrand { eq: Equation::Bbm, x, t, omega0, j };
    let l = bbm_adapted_loop(x / t, &roots);
    let q = integrate_loop(&g, l, cfg);
    let res = residue_sum(&roots, omega0, x, t, j, |k| l.inside(k));
    finish(x, t, res + q.value, q)
}

/// The circle `|k − i| = √2` with the combined integrand.
fn bbm_circle(x: f64, t: f64, omega0: f64, cfg: &QuadratureConfig, j: u32) -> Result<SolutionSample> {
    let tol = cfg.removable_tol;
    let coeffs = sine_coefficients();
    let radius = 2f64.sqrt();
    let f = |th: f64| -> C64 {
        let e = C64::from_polar(1.0, th);
        let k = I + radius * e;
        let d = 1.0 + k * k;
        let w = k / d;
        let wp = (1.0 - k * k) / (d * d);
        let mut kern = C64::new(0.0, 0.0);
        for (n, a) in coeffs {
            kern += a * stable_kernel(n as f64 * omega0, w, t, tol);
        }
        let mut v = (I * k * x).exp() * wp * kern / (2.0 * PI * I) * I * radius * e;
        for _ in 0..j {
            v *= I * k;
        }
        v
    };
    let mut n = cfg.contour.node_count.max(16);
    if (omega0 - 0.5).abs() < 0.05 {
        n = n.max(256);
    }
    let mut prev = trapezoid_periodic(f, n);
    let mut evals = n;
    loop {
        n *= 2;
        let cur = trapezoid_periodic(f, n);
        evals += n;
        let err = (cur - prev).norm();
        if err <= cfg.abs_tol.max(cfg.rel_tol * cur.norm()) {
            let correction = (-x).exp() * (omega0 * t).sin() * if j == 0 { -1.0 } else { 1.0 };
            let q = QuadResult { value: cur, err, abs_integral: 0.0, evals, converged: true };
            return finish(x, t, cur + correction, q);
        }
        if evals + 2 * n > cfg.max_evals {
            return Err(Error::NonConvergent { err_estimate: err, evaluations: evals });
        }
        prev = cur;
    }
}

fn bbm_dispatch(x: f64, t: f64, omega0: f64, cfg: &QuadratureConfig, j: u32) -> Result<SolutionSample> {
    check_inputs(x, t, omega0)?;
    cfg.validate()?;
    if t == 0.0 {
        return Ok(zero_sample(x, t));
    }
    match cfg.contour.kind {
        ContourKind::BBMCircle => bbm_circle(x, t, omega0, cfg, j),
        ContourKind::BBMSaddleAdapted => bbm_residue_loop(x, t, omega0, cfg, j),
        _ => Err(Error::StrategyDomain("KdV contour requested for BBM".into())),
    }
}

/// `u(x,t)` for `u_t + u_x − u_xxt = 0`, `u(x,0) = 0`, `u(0,t) = sin(−ω₀t)`.
pub fn bbm_exact(x: f64, t: f64, omega0: f64, cfg: &QuadratureConfig) -> Result<SolutionSample> {
    bbm_dispatch(x, t, omega0, cfg, 0)
}

/// `u_x(x,t)` for the BBM wavemaker problem.
pub fn bbm_neumann_exact(x: f64, t: f64, omega0: f64, cfg: &QuadratureConfig) -> Result<SolutionSample> {
    bbm_dispatch(x, t, omega0, cfg, 1)
}

/// Evaluates `f` at every `(x, t)` in parallel, keeping input order.
pub fn evaluate_grid<F>(points: &[(f64, f64)], f: F) -> Vec<Result<SolutionSample>>
where
    F: Fn(f64, f64) -> Result<SolutionSample> + Sync,
{
    points.par_iter().map(|&(x, t)| f(x, t)).collect()
}

// ---------------------------------------------------------------- geometry

/// A quadrature node on a contour: position and complex weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourNode {
    pub k: C64,
    pub dk: C64,
}

/// Discretises the fixed contours with `node_count` nodes.
///
/// `x` and `abs_tol` fix the truncation of ∂D⁺, cut where `e^{−Im(k)x}`
/// falls below `abs_tol`. The adapted contours depend on `(x, t, ω₀)` and
/// are not exported here.
pub fn contour_points(spec: &ContourSpec, x: f64, abs_tol: f64) -> Result<Vec<ContourNode>> {
    let n = spec.node_count;
    if n < 4 {
        return Err(Error::Precondition("node_count too small".into()));
    }
    match spec.kind {
        ContourKind::BBMCircle => {
            let r = 2f64.sqrt();
            let h = 2.0 * PI / n as f64;
            Ok((0..n)
                .map(|j| {
                    let e = C64::from_polar(1.0, j as f64 * h);
                    ContourNode { k: I + r * e, dk: I * r * e * h }
                })
                .collect())
        }
        ContourKind::KdVHalfLines => {
            let rmax = if spec.truncation_radius > 0.0 { spec.truncation_radius } else { 10.0 };
            let half = n / 2;
            let h = rmax / (half - 1) as f64;
            let left = C64::from_polar(1.0, 2.0 * PI / 3.0);
            let right = C64::from_polar(1.0, FRAC_PI_3);
            let mut out: Vec<ContourNode> = (0..half)
                .rev()
                .map(|i| {
                    let w = if i == 0 || i == half - 1 { 0.5 * h } else { h };
                    ContourNode { k: -I + left * (i as f64 * h), dk: -left * w }
                })
                .collect();
            out.extend((0..half).map(|i| {
                let w = if i == 0 || i == half - 1 { 0.5 * h } else { h };
                ContourNode { k: -I + right * (i as f64 * h), dk: right * w }
            }));
            Ok(out)
        }
        ContourKind::KdVBoundaryDPlus => {
            let tmax = if spec.truncation_radius > 0.0 {
                spec.truncation_radius
            } else if x > 0.0 && abs_tol > 0.0 {
                (1.0 / abs_tol).ln() / x
            } else {
                return Err(Error::StrategyDomain("∂D⁺ truncation needs x > 0 and abs_tol > 0".into()));
            };
            let third = n / 3;
            let s3 = 1.0 / 3f64.sqrt();
            let branch = |tau: f64, sign: f64| {
                let re = ((1.0 + tau * tau) / 3.0).sqrt();
                (C64::new(sign * re, tau), C64::new(sign * tau / (3.0 * re), 1.0))
            };
            let ht = tmax / (third - 1) as f64;
            let hs = 2.0 * s3 / (third - 1) as f64;
            let wt = |i: usize| if i == 0 || i == third - 1 { 0.5 } else { 1.0 };
            let mut out: Vec<ContourNode> = (0..third)
                .rev()
                .map(|i| {
                    let (k, dk) = branch(i as f64 * ht, -1.0);
                    ContourNode { k, dk: -dk * ht * wt(i) }
                })
                .collect();
            out.extend((0..third).map(|i| ContourNode {
                k: C64::new(-s3 + i as f64 * hs, 0.0),
                dk: C64::new(hs * wt(i), 0.0),
            }));
            out.extend((0..third).map(|i| {
                let (k, dk) = branch(i as f64 * ht, 1.0);
                ContourNode { k, dk: dk * ht * wt(i) }
            }));
            Ok(out)
        }
        ContourKind::KdVSaddleAdapted | ContourKind::BBMSaddleAdapted => Err(Error::StrategyDomain(
            "adapted contours depend on (x, t, omega0)".into(),
        )),
    }
}
