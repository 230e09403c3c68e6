//! Long-time asymptotics of the sinusoidal wavemaker problems along rays
//! `ξ = x/t`: saddle points, the region partition of the `(ω₀, ξ)` plane
//! and the leading-order formula in each region.

use std::f64::consts::{PI, SQRT_2};
use std::fmt;

use num_complex::Complex64;

use crate::dispersion::Equation;
use crate::error::{Error, Result};
use crate::fokas::{Method, SolutionSample};

type C64 = Complex64;

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Distance in `(ω₀, ξ)` within which a point counts as on a boundary curve.
pub const REGION_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Region {
    I,
    II,
    IIa,
    IIb,
    III,
    IVa,
    IVb,
    IVc,
}

impl Region {
    pub fn as_str(&self) -> &'static str {
        match self {
            Region::I => "I",
            Region::II => "II",
            Region::IIa => "IIa",
            Region::IIb => "IIb",
            Region::III => "III",
            Region::IVa => "IVa",
            Region::IVb => "IVb",
            Region::IVc => "IVc",
        }
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RegionLabel {
    pub equation: Equation,
    pub region: Region,
}

impl fmt::Display for RegionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.region.as_str())
    }
}

/// Stationary points of `φ(k) = i(kξ − ω(k))` with `φ''` at each.
#[derive(Debug, Clone, PartialEq)]
pub struct SaddleSet {
    pub xi: f64,
    pub saddles: Vec<C64>,
    pub second_derivatives: Vec<C64>,
}

fn check_xi(xi: f64) -> Result<()> {
    if !(xi > 0.0 && xi.is_finite()) {
        return Err(Error::Precondition("xi must be positive".into()));
    }
    Ok(())
}

/// `φ'(k)` for the given equation.
pub fn phase_derivative(eq: Equation, xi: f64, k: C64) -> C64 {
    let wp = match eq {
        Equation::Kdv => 1.0 - 3.0 * k * k,
        Equation::Bbm => (1.0 - k * k) / ((1.0 + k * k) * (1.0 + k * k)),
    };
    I * (xi - wp)
}

/// `±√((1−ξ)/3)`; real below `ξ = 1`, imaginary above.
pub fn kdv_saddles(xi: f64) -> Result<SaddleSet> {
    check_xi(xi)?;
    let r = C64::new((1.0 - xi) / 3.0, 0.0).sqrt();
    let saddles = vec![r, -r];
    let second_derivatives = saddles.iter().map(|&k| 6.0 * I * k).collect();
    Ok(SaddleSet { xi, saddles, second_derivatives })
}

/// The four roots of `1 − k² = ξ(1 + k²)²`, as `±√u₊` then `±√u₋` with
/// `u₊ = (3 − Ξ)/(Ξ + 1)`, `u₋ = −1 − 4/(Ξ − 1)` and `Ξ = √(8ξ + 1)`.
pub fn bbm_saddles(xi: f64) -> Result<SaddleSet> {
    check_xi(xi)?;
    let big = (8.0 * xi + 1.0).sqrt();
    let up = C64::new((3.0 - big) / (big + 1.0), 0.0).sqrt();
    let um = C64::new(-1.0 - 4.0 / (big - 1.0), 0.0).sqrt();
    let saddles = vec![up, -up, um, -um];
    let second_derivatives = saddles
        .iter()
        .map(|&k| 2.0 * I * k * (3.0 - k * k) / (1.0 + k * k).powu(3))
        .collect();
    Ok(SaddleSet { xi, saddles, second_derivatives })
}

// ------------------------------------------------------------- KdV pieces

/// Pole `k₃` in the labelling used by the KdV formulas: the trigonometric
/// form below `ω_cr`, the surd form with `Im > 0` above it.
pub fn kdv_k3(omega0: f64) -> C64 {
    let wcr = Equation::Kdv.omega_cr();
    if omega0 < wcr {
        let alpha = PI - ((12.0 - 81.0 * omega0 * omega0).sqrt() / (9.0 * omega0)).atan();
        C64::new(-(alpha / 3.0).cos() / 3f64.sqrt() + (alpha / 3.0).sin(), 0.0)
    } else if omega0 == wcr {
        C64::new(1.0 / 3f64.sqrt(), 0.0)
    } else {
        let r = kdv_r1(omega0).cbrt();
        let re = 1.0 / (2f64.powf(2.0 / 3.0) * 3f64.cbrt() * r) + r / (2f64.powf(4.0 / 3.0) * 3f64.powf(2.0 / 3.0));
        let im = 3f64.powf(1.0 / 6.0) / (2f64.powf(2.0 / 3.0) * r) - r / (2f64.powf(4.0 / 3.0) * 3f64.powf(1.0 / 6.0));
        C64::new(re, im)
    }
}

/// `r₁ = 9ω₀ − √(81ω₀² − 12)`, written without cancellation.
fn kdv_r1(omega0: f64) -> f64 {
    12.0 / (9.0 * omega0 + (81.0 * omega0 * omega0 - 12.0).sqrt())
}

/// `c_g = 1 − 3k₃²` for subcritical forcing.
pub fn kdv_group_velocity(omega0: f64) -> f64 {
    let k = kdv_k3(omega0).re;
    1.0 - 3.0 * k * k
}

/// `Re k₃ − √((2+ξ)/6) cos(φ/3)` with principal `φ`; splits IIb and III.
pub fn kdv_l1(xi: f64, omega0: f64) -> f64 {
    let phi = (3.0 * (xi * (4.0 - 2.0 * xi + xi * xi)).sqrt() / (2.0 * SQRT_2 * (xi - 1.0) * (1.0 - xi).sqrt())).atan();
    kdv_k3(omega0).re - ((2.0 + xi) / 6.0).sqrt() * (phi / 3.0).cos()
}

/// `Re k₃ − √(2+ξ)/(2√2)`; splits IVb and IVc.
pub fn kdv_l2(xi: f64, omega0: f64) -> f64 {
    kdv_k3(omega0).re - (2.0 + xi).sqrt() / (2.0 * SQRT_2)
}

fn near(a: f64, b: f64) -> bool {
    (a - b).abs() < REGION_TOL
}

fn on_boundary(omega0: f64, xi: f64) -> Error {
    Error::OnRegionBoundary { omega0, xi }
}

fn check_point(omega0: f64, xi: f64) -> Result<()> {
    if !(omega0 > 0.0 && omega0.is_finite()) {
        return Err(Error::Precondition("omega0 must be positive".into()));
    }
    if !(xi >= 0.0 && xi.is_finite()) {
        return Err(Error::Precondition("xi must be non-negative".into()));
    }
    Ok(())
}

/// Region of `(ω₀, ξ)` for KdV. `ξ = 0` belongs to I or III.
pub fn kdv_region(omega0: f64, xi: f64) -> Result<RegionLabel> {
    check_point(omega0, xi)?;
    let wcr = Equation::Kdv.omega_cr();
    if near(omega0, wcr) || near(xi, 1.0) {
        return Err(on_boundary(omega0, xi));
    }
    let sub = omega0 < wcr;
    let region = if xi < 1.0 {
        if sub {
            let cg = kdv_group_velocity(omega0);
            if near(xi, cg) {
                return Err(on_boundary(omega0, xi));
            }
            if xi < cg {
                Region::I
            } else {
                Region::IIa
            }
        } else if xi == 0.0 {
            Region::III
        } else {
            let l1 = kdv_l1(xi, omega0);
            if l1.abs() < REGION_TOL {
                return Err(on_boundary(omega0, xi));
            }
            if l1 > 0.0 {
                Region::III
            } else {
                Region::IIb
            }
        }
    } else if sub {
        Region::IVa
    } else {
        let l2 = kdv_l2(xi, omega0);
        if l2.abs() < REGION_TOL {
            return Err(on_boundary(omega0, xi));
        }
        if l2 > 0.0 {
            Region::IVc
        } else {
            Region::IVb
        }
    };
    Ok(RegionLabel { equation: Equation::Kdv, region })
}

/// Amplitude and phase of the KdV saddle term for `0 < ξ < 1`.
fn kdv_saddle_parts(omega0: f64, xi: f64, t: f64) -> (f64, f64) {
    let s = (3.0 * (1.0 - xi)).sqrt();
    let amp = 27.0 * xi * omega0 / (4.0 - (xi + 3.0) * xi * xi - 27.0 * omega0 * omega0) * (1.0 / (2.0 * PI * t * s)).sqrt();
    (amp, 2.0 / 9.0 * t * s * (1.0 - xi))
}

/// Saddle contribution for `0 < ξ < 1`, `O(t^{−1/2})`.
pub fn kdv_saddle_term_below(omega0: f64, xi: f64, t: f64) -> f64 {
    let (amp, theta) = kdv_saddle_parts(omega0, xi, t);
    amp * theta.cos()
}

/// Saddle contribution for `ξ > 1`, exponentially small.
pub fn kdv_saddle_term_above(omega0: f64, xi: f64, t: f64) -> f64 {
    27.0 * xi * omega0 * (-2.0 / 9.0 * (3.0 * xi - 3.0).sqrt() * (xi - 1.0) * t).exp()
        / (8.0 - 2.0 * (xi + 3.0) * xi * xi - 54.0 * omega0 * omega0)
        * (1.0 / (t * PI * (3.0 * (xi - 1.0)).sqrt())).sqrt()
}

/// [`kdv_saddle_term_below`] with the Jacobian `1 + i` of the local
/// steepest-descent parameterisation restored: amplitude `√2` larger and
/// phase shifted by `π/4`.
pub fn kdv_saddle_term_below_corrected(omega0: f64, xi: f64, t: f64) -> f64 {
    let (amp, theta) = kdv_saddle_parts(omega0, xi, t);
    amp * (theta.cos() + theta.sin())
}

fn kdv_pole_term(omega0: f64, xi: f64, t: f64) -> f64 {
    let k = kdv_k3(omega0);
    (-k.im * xi * t).exp() * ((k.re * xi - omega0) * t).sin()
}

/// Leading-order KdV solution at `(x, t)` from the formula of its region.
pub fn kdv_asymptotic(omega0: f64, x: f64, t: f64) -> Result<SolutionSample> {
    let xi = ray(x, t)?;
    let label = kdv_region(omega0, xi)?;
    let (value, err) = match label.region {
        Region::I => (kdv_pole_term(omega0, xi, t), t.powf(-0.5)),
        Region::IIa | Region::IIb => {
            let v = kdv_saddle_term_below(omega0, xi, t);
            (v, v.abs().max(t.powf(-0.5)) / t)
        }
        Region::III => (kdv_pole_term(omega0, xi, t) + kdv_saddle_term_below(omega0, xi, t), t.powf(-0.5)),
        Region::IVa | Region::IVb => {
            let v = kdv_saddle_term_above(omega0, xi, t);
            (v, v.abs() / t)
        }
        Region::IVc => {
            let s = kdv_saddle_term_above(omega0, xi, t);
            let p = kdv_pole_term(omega0, xi, t);
            (p + s, (p.abs() + s.abs()) / t)
        }
        _ => unreachable!(),
    };
    Ok(SolutionSample { x, t, value, method: Method::Asymptotic, err_estimate: err })
}

// ------------------------------------------------------------- BBM pieces

/// `(1 − √(1−4ω₀²))/(2ω₀)`, written without cancellation.
pub fn bbm_k0(omega0: f64) -> f64 {
    2.0 * omega0 / (1.0 + (1.0 - 4.0 * omega0 * omega0).sqrt())
}

/// `(1 − 4ω₀² + √(1 − 4ω₀²))/2` for subcritical forcing.
pub fn bbm_group_velocity(omega0: f64) -> f64 {
    let s = (1.0 - 4.0 * omega0 * omega0).sqrt();
    (s * s + s) / 2.0
}

/// `ξ/(2ω₀) − ω₀ + 2√(2ξ)(Ξ − 1 − 2ξ)^{3/2}/(Ξ − 1)²`; splits II and III.
pub fn bbm_l3(xi: f64, omega0: f64) -> f64 {
    let big = (8.0 * xi + 1.0).sqrt();
    xi / (2.0 * omega0) - omega0 + bbm_saddle_phase(xi, big)
}

/// `2√(2ξ)(Ξ − 1 − 2ξ)^{3/2}/(Ξ − 1)²`, the frequency of the saddle term.
fn bbm_saddle_phase(xi: f64, big: f64) -> f64 {
    2.0 * (2.0 * xi).sqrt() * (-2.0 * xi + big - 1.0).max(0.0).powf(1.5) / ((big - 1.0) * (big - 1.0))
}

/// `α(ξ)`, the decay rate for `ξ > 1`.
pub fn bbm_alpha(xi: f64) -> f64 {
    let big = (8.0 * xi + 1.0).sqrt();
    (2.0 * xi * xi - xi * big + xi).sqrt() * (big - 3.0) / (SQRT_2 * (big - 1.0))
}

/// Region of `(ω₀, ξ)` for BBM. `ξ = 0` belongs to I or III.
pub fn bbm_region(omega0: f64, xi: f64) -> Result<RegionLabel> {
    check_point(omega0, xi)?;
    if near(omega0, 0.5) || near(xi, 1.0) {
        return Err(on_boundary(omega0, xi));
    }
    let region = if xi < 1.0 {
        if omega0 < 0.5 {
            let cg = bbm_group_velocity(omega0);
            if near(xi, cg) {
                return Err(on_boundary(omega0, xi));
            }
            if xi < cg {
                Region::I
            } else {
                Region::II
            }
        } else if xi == 0.0 {
            Region::III
        } else {
            let l3 = bbm_l3(xi, omega0);
            if l3.abs() < REGION_TOL {
                return Err(on_boundary(omega0, xi));
            }
            if l3 > 0.0 {
                Region::III
            } else {
                Region::II
            }
        }
    } else {
        let edge = 2.0 * omega0 * omega0;
        if omega0 > 1.0 / SQRT_2 && near(xi, edge) {
            return Err(on_boundary(omega0, xi));
        }
        if omega0 > 1.0 / SQRT_2 && xi < edge {
            Region::IVb
        } else {
            Region::IVa
        }
    };
    Ok(RegionLabel { equation: Equation::Bbm, region })
}

/// Amplitude and phase of `u_s1`.
fn bbm_saddle_parts(omega0: f64, xi: f64, t: f64) -> (f64, f64) {
    let big = (8.0 * xi + 1.0).sqrt();
    let w2 = omega0 * omega0;
    let root = (xi.sqrt() * (big - 1.0).powi(3) / (t * (8.0 * xi + 1.0 - big) * (-2.0 * xi - 1.0 + big).sqrt())).sqrt();
    let amp = omega0 * (-4.0 * xi + big - 1.0) * root
        / (2f64.powf(1.25) * PI.sqrt() * ((4.0 * xi - big + 1.0) * w2 + xi * (2.0 * xi - big + 1.0)));
    (amp, bbm_saddle_phase(xi, big) * t)
}

/// `u_s1`, the saddle contribution for `0 < ξ < 1`.
pub fn bbm_saddle_term_below(omega0: f64, xi: f64, t: f64) -> f64 {
    if xi == 0.0 {
        return 0.0;
    }
    let (amp, theta) = bbm_saddle_parts(omega0, xi, t);
    amp * theta.cos()
}

/// `u_s2`, the saddle contribution for `ξ > 1`.
pub fn bbm_saddle_term_above(omega0: f64, xi: f64, t: f64) -> f64 {
    let big = (8.0 * xi + 1.0).sqrt();
    let w2 = omega0 * omega0;
    let amp = (xi.sqrt() * (big - 1.0).powi(3) / ((2.0 * xi - big + 1.0).sqrt() * (big * big - big))).sqrt();
    -(-bbm_alpha(xi) * t).exp() / t.sqrt() * omega0 * amp * (4.0 * xi + big + 8.0 * w2 - 1.0)
        / (4.0 * 2f64.powf(0.75) * PI.sqrt() * ((4.0 * xi - 1.0) * w2 + (xi - 1.0) * xi + 4.0 * w2 * w2))
}

/// [`bbm_saddle_term_below`] with the `1 + i` Jacobian restored.
pub fn bbm_saddle_term_below_corrected(omega0: f64, xi: f64, t: f64) -> f64 {
    if xi == 0.0 {
        return 0.0;
    }
    let (amp, theta) = bbm_saddle_parts(omega0, xi, t);
    amp * (theta.cos() + theta.sin())
}

fn bbm_super_pole_term(omega0: f64, xi: f64, t: f64) -> f64 {
    (-t * xi * (4.0 * omega0 * omega0 - 1.0).sqrt() / (2.0 * omega0)).exp() * ((xi / (2.0 * omega0) - omega0) * t).sin()
}

/// Leading-order BBM solution at `(x, t)` from the formula of its region.
pub fn bbm_asymptotic(omega0: f64, x: f64, t: f64) -> Result<SolutionSample> {
    let xi = ray(x, t)?;
    let label = bbm_region(omega0, xi)?;
    let (value, err) = match label.region {
        Region::I => (((bbm_k0(omega0) * xi - omega0) * t).sin(), t.powf(-0.5)),
        Region::II => {
            let v = bbm_saddle_term_below(omega0, xi, t);
            (v, v.abs().max(t.powf(-0.5)) / t)
        }
        Region::III => (bbm_super_pole_term(omega0, xi, t) + bbm_saddle_term_below(omega0, xi, t), t.powf(-0.5)),
        Region::IVa => {
            let v = bbm_saddle_term_above(omega0, xi, t);
            (v, v.abs() / t)
        }
        Region::IVb => {
            let s = bbm_saddle_term_above(omega0, xi, t);
            let p = bbm_super_pole_term(omega0, xi, t);
            (p + s, (p.abs() + s.abs()) / t)
        }
        _ => unreachable!(),
    };
    Ok(SolutionSample { x, t, value, method: Method::Asymptotic, err_estimate: err })
}

fn ray(x: f64, t: f64) -> Result<f64> {
    if !(t > 0.0 && t.is_finite() && x >= 0.0 && x.is_finite()) {
        return Err(Error::Precondition("need t > 0 and x ≥ 0".into()));
    }
    Ok(x / t)
}

pub fn region(eq: Equation, omega0: f64, xi: f64) -> Result<RegionLabel> {
    match eq {
        Equation::Kdv => kdv_region(omega0, xi),
        Equation::Bbm => bbm_region(omega0, xi),
    }
}

pub fn asymptotic(eq: Equation, omega0: f64, x: f64, t: f64) -> Result<SolutionSample> {
    match eq {
        Equation::Kdv => kdv_asymptotic(omega0, x, t),
        Equation::Bbm => bbm_asymptotic(omega0, x, t),
    }
}

// ------------------------------------------------------------- phase diagram

/// A named boundary curve, as `(ω₀, ξ)` points.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryCurve {
    pub name: &'static str,
    pub points: Vec<(f64, f64)>,
}

/// Labels on an `n_omega × n_xi` cell-centred grid, row-major in `ω₀`.
pub fn phase_diagram(
    eq: Equation,
    omega_range: (f64, f64),
    xi_range: (f64, f64),
    n_omega: usize,
    n_xi: usize,
) -> Vec<(f64, f64, Result<RegionLabel>)> {
    let mut out = Vec::with_capacity(n_omega * n_xi);
    for i in 0..n_omega {
        let w = omega_range.0 + (omega_range.1 - omega_range.0) * (i as f64 + 0.5) / n_omega as f64;
        for j in 0..n_xi {
            let xi = xi_range.0 + (xi_range.1 - xi_range.0) * (j as f64 + 0.5) / n_xi as f64;
            out.push((w, xi, region(eq, w, xi)));
        }
    }
    out
}

/// Root of `f` in `[a, b]` by bisection, given a sign change.
pub fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> Option<f64> {
    let (mut fa, fb) = (f(a), f(b));
    if fa == 0.0 {
        return Some(a);
    }
    if fb == 0.0 {
        return Some(b);
    }
    if fa.signum() == fb.signum() || !fa.is_finite() || !fb.is_finite() {
        return None;
    }
    while b - a > tol {
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fm == 0.0 {
            return Some(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Some(0.5 * (a + b))
}

/// Zeros in `ξ` of `f(ξ)` over `(lo, hi)`, scanning `n` cells.
fn zeros_in_xi(f: impl Fn(f64) -> f64, lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let h = (hi - lo) / n as f64;
    (0..n)
        .filter_map(|i| {
            let a = lo + h * i as f64;
            bisect(&f, a.max(lo + 1e-12), (a + h).min(hi - 1e-12), 1e-10)
        })
        .collect()
}

/// Boundary curves of the phase diagram, sampled at `samples` values of `ω₀`.
pub fn boundary_curves(eq: Equation, omega_max: f64, xi_max: f64, samples: usize) -> Vec<BoundaryCurve> {
    let wcr = eq.omega_cr();
    let grid = |lo: f64, hi: f64| -> Vec<f64> {
        (1..samples).map(|i| lo + (hi - lo) * i as f64 / samples as f64).collect()
    };
    let mut curves = Vec::new();
    let cg: fn(f64) -> f64 = match eq {
        Equation::Kdv => kdv_group_velocity,
        Equation::Bbm => bbm_group_velocity,
    };
    curves.push(BoundaryCurve {
        name: "group_velocity",
        points: grid(0.0, wcr.min(omega_max)).into_iter().map(|w| (w, cg(w))).collect(),
    });
    curves.push(BoundaryCurve { name: "xi_one", points: vec![(0.0, 1.0), (omega_max, 1.0)] });
    curves.push(BoundaryCurve { name: "omega_cr", points: vec![(wcr, 0.0), (wcr, xi_max)] });
    if omega_max > wcr {
        let ws = grid(wcr, omega_max);
        match eq {
            Equation::Kdv => {
                let mut l1 = Vec::new();
                let mut l2 = Vec::new();
                for &w in &ws {
                    l1.extend(zeros_in_xi(|x| kdv_l1(x, w), 0.0, 1.0, 200).into_iter().map(|x| (w, x)));
                    if xi_max > 1.0 {
                        l2.extend(zeros_in_xi(|x| kdv_l2(x, w), 1.0, xi_max, 200).into_iter().map(|x| (w, x)));
                    }
                }
                curves.push(BoundaryCurve { name: "l1", points: l1 });
                curves.push(BoundaryCurve { name: "l2", points: l2 });
            }
            Equation::Bbm => {
                let mut l3 = Vec::new();
                for &w in &ws {
                    l3.extend(zeros_in_xi(|x| bbm_l3(x, w), 0.0, 1.0, 200).into_iter().map(|x| (w, x)));
                }
                curves.push(BoundaryCurve { name: "l3", points: l3 });
                let edge: Vec<(f64, f64)> = grid(1.0 / SQRT_2, omega_max)
                    .into_iter()
                    .map(|w| (w, 2.0 * w * w))
                    .filter(|&(_, x)| x <= xi_max)
                    .collect();
                curves.push(BoundaryCurve { name: "xi_two_omega_sq", points: edge });
            }
        }
    }
    curves
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dispersion::{characteristic_roots, ModelCoefficients};
    use approx::assert_abs_diff_eq;

    #[test]
    fn kdv_saddle_values() {
        let s = kdv_saddles(0.25).unwrap();
        assert_abs_diff_eq!(s.saddles[0].re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(s.saddles[1].re, -0.5, epsilon = 1e-15);
        let s = kdv_saddles(4.0).unwrap();
        assert!((s.saddles[0] - I).norm() < 1e-15);
        assert!((s.second_derivatives[0] - C64::new(-2.0 * 9f64.sqrt(), 0.0)).norm() < 1e-14);
        let s = kdv_saddles(1.0).unwrap();
        assert_eq!(s.saddles[0], s.saddles[1]);
        assert!(kdv_saddles(0.0).is_err());
    }

    #[test]
    fn bbm_saddle_values() {
        let s = bbm_saddles(1.0).unwrap();
        assert!(s.saddles[0].norm() < 1e-15);
        assert!((s.saddles[2] - I * 3f64.sqrt()).norm() < 1e-14);
        let s = bbm_saddles(1e-6).unwrap();
        assert!(s.saddles[0].re < 1.0 && s.saddles[0].re > 0.999);
        for xi in [1e-6, 0.1, 0.5, 0.99, 1.5, 7.0] {
            for &k in &bbm_saddles(xi).unwrap().saddles {
                let r = phase_derivative(Equation::Bbm, xi, k).norm();
                assert!(r <= 1e-12 * (1.0 + k.norm()).powi(2), "xi={xi} k={k} r={r}");
            }
        }
    }

    #[test]
    fn k3_matches_roots() {
        for w in [0.05, 0.2, 0.375, 0.38, 0.4, 0.6, 1.0, 3.0] {
            let k3 = kdv_k3(w);
            let set = characteristic_roots(&ModelCoefficients::KDV, -1, w).unwrap();
            assert!(set.roots.iter().any(|r| (r.value - k3).norm() < 1e-10), "w={w} k3={k3}");
        }
        assert_abs_diff_eq!(kdv_k3(0.375).re, 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(kdv_group_velocity(0.375), 0.25, epsilon = 1e-14);
    }

    #[test]
    fn kdv_region_examples() {
        assert_eq!(kdv_region(0.375, 0.1).unwrap().region, Region::I);
        assert_eq!(kdv_region(0.375, 0.5).unwrap().region, Region::IIa);
        assert_eq!(kdv_region(0.6, 0.02).unwrap().region, Region::III);
        assert_eq!(kdv_region(0.375, 4.0).unwrap().region, Region::IVa);
        assert!(matches!(kdv_region(0.375, 0.25), Err(Error::OnRegionBoundary { .. })));
        assert!(matches!(kdv_region(0.375, 1.0), Err(Error::OnRegionBoundary { .. })));
    }

    #[test]
    fn bbm_region_examples() {
        assert_eq!(bbm_region(0.4, 0.1).unwrap().region, Region::I);
        assert_eq!(bbm_region(0.4, 0.6).unwrap().region, Region::II);
        assert_eq!(bbm_region(1.0, 1.5).unwrap().region, Region::IVb);
        assert_eq!(bbm_region(1.0, 2.5).unwrap().region, Region::IVa);
        assert_abs_diff_eq!(bbm_group_velocity(0.4), 0.48, epsilon = 1e-15);
        assert_abs_diff_eq!(bbm_k0(0.4), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn region_formulas() {
        let s = kdv_asymptotic(0.375, 10.0, 100.0).unwrap();
        assert_abs_diff_eq!(s.value, (-32.5f64).sin(), epsilon = 1e-13);
        let s = bbm_asymptotic(0.4, 20.0, 200.0).unwrap();
        assert_abs_diff_eq!(s.value, (-70f64).sin(), epsilon = 1e-12);
        for t in [3.0, 10.0] {
            assert_abs_diff_eq!(kdv_asymptotic(0.375, 0.0, t).unwrap().value, -(0.375 * t).sin(), epsilon = 1e-15);
            assert_abs_diff_eq!(bbm_asymptotic(0.4, 0.0, t).unwrap().value, -(0.4 * t).sin(), epsilon = 1e-15);
        }
    }

    #[test]
    fn region_iv_exponent_is_two_at_four() {
        let a = kdv_saddle_term_above(0.375, 4.0, 10.0);
        let b = kdv_saddle_term_above(0.375, 4.0, 20.0);
        let slope = ((b * 20f64.sqrt()) / (a * 10f64.sqrt())).ln() / 10.0;
        assert_abs_diff_eq!(slope, -2.0, epsilon = 1e-12);
    }

    #[test]
    fn anchors_on_curves() {
        let kdv = boundary_curves(Equation::Kdv, 1.2, 2.0, 400);
        let cg = &kdv.iter().find(|c| c.name == "group_velocity").unwrap().points;
        assert!(cg.iter().any(|&(w, x)| (w - 0.375).abs() < 2e-3 && (x - 0.25).abs() < 5e-3));
        let bbm = boundary_curves(Equation::Bbm, 1.2, 2.0, 400);
        let cg = &bbm.iter().find(|c| c.name == "group_velocity").unwrap().points;
        assert!(cg.iter().any(|&(w, x)| (w - 0.4).abs() < 2e-3 && (x - 0.48).abs() < 5e-3));
    }
}
