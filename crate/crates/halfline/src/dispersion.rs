//! Dispersion relation, the regions D±, characteristic roots and the
//! radiation condition.
//!
//! The model is
//!
//! ```text
//! (1 - A₋₂ ∂ₓ²) u_t = i A₀ u + A₁ u_x + i A₂ u_xx + A₃ u_xxx
//! ```
//!
//! with dispersion relation `ω(k) = Ω(k) / (1 + A₋₂ k²)` where
//! `Ω(k) = A₃k³ + A₂k² − A₁k − A₀`.

use std::cmp::Ordering;
use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

type C64 = Complex64;

/// Relative tolerance for deciding that a point sits on ∂D±.
pub const BOUNDARY_TOL: f64 = 1e-9;
/// Group velocities above `-RADIATION_TOL` count as outgoing.
pub const RADIATION_TOL: f64 = 1e-10;

const IMAG_TOL: f64 = 1e-12;

/// The five coefficients of the model equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelCoefficients {
    pub a_m2: f64,
    pub a0: f64,
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
}

/// The two equations with closed-form long-time asymptotics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Equation {
    Kdv,
    Bbm,
}

impl Equation {
    pub fn coefficients(self) -> ModelCoefficients {
        match self {
            Equation::Kdv => ModelCoefficients::KDV,
            Equation::Bbm => ModelCoefficients::BBM,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Equation::Kdv => "kdv",
            Equation::Bbm => "bbm",
        }
    }

    /// `2/(3√3)` for KdV, `1/2` for BBM.
    pub fn omega_cr(self) -> f64 {
        match self {
            Equation::Kdv => 2.0 / (3.0 * 3f64.sqrt()),
            Equation::Bbm => 0.5,
        }
    }
}

/// Which branch of the theory a coefficient set belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// `A₋₂ = 0`, `A₃ < 0`.
    LocalThirdOrder,
    /// `A₋₂ > 0`, `A₃ = 0`.
    NonlocalSecondOrder,
    /// Anything else; roots are classified numerically.
    General,
}

impl ModelCoefficients {
    /// Linear KdV, `u_t + u_x + u_xxx = 0`.
    pub const KDV: Self = Self { a_m2: 0.0, a0: 0.0, a1: -1.0, a2: 0.0, a3: -1.0 };
    /// Linear BBM, `u_t + u_x − u_xxt = 0`.
    pub const BBM: Self = Self { a_m2: 1.0, a0: 0.0, a1: -1.0, a2: 0.0, a3: 0.0 };

    /// Validated constructor: requires `a_m2 ≥ 0` and `a3 ≤ 0`.
    pub fn new(a_m2: f64, a0: f64, a1: f64, a2: f64, a3: f64) -> Result<Self> {
        let c = Self { a_m2, a0, a1, a2, a3 };
        if ![a_m2, a0, a1, a2, a3].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidCoefficients("non-finite coefficient".into()));
        }
        if a_m2 < 0.0 {
            return Err(Error::InvalidCoefficients("a_m2 must be non-negative".into()));
        }
        if a3 > 0.0 {
            return Err(Error::InvalidCoefficients("a3 must be non-positive".into()));
        }
        Ok(c)
    }

    pub fn kdv() -> Self {
        Self::KDV
    }

    pub fn bbm() -> Self {
        Self::BBM
    }

    pub fn family(&self) -> Family {
        if self.a_m2 == 0.0 && self.a3 < 0.0 {
            Family::LocalThirdOrder
        } else if self.a_m2 > 0.0 && self.a3 == 0.0 {
            Family::NonlocalSecondOrder
        } else {
            Family::General
        }
    }

    pub fn is_covered(&self) -> bool {
        self.family() != Family::General
    }

    /// Coefficients `[c3, c2, c1, c0]` of the characteristic polynomial
    /// `A₃k³ + (A₂ + nω₀A₋₂)k² − A₁k − A₀ + nω₀` for harmonic `n`.
    pub fn characteristic_polynomial(&self, n: i32, omega0: f64) -> [f64; 4] {
        let nw = n as f64 * omega0;
        [self.a3, self.a2 + nw * self.a_m2, -self.a1, -self.a0 + nw]
    }

    fn denominator(&self, k: C64) -> Result<C64> {
        let d = 1.0 + self.a_m2 * k * k;
        if d.norm() <= 1e-14 * (1.0 + self.a_m2 * k.norm_sqr()) {
            return Err(Error::PoleOfDispersion { re: k.re, im: k.im });
        }
        Ok(d)
    }
}

/// `Ω(k) = A₃k³ + A₂k² − A₁k − A₀`.
pub fn capital_omega(c: &ModelCoefficients, k: C64) -> C64 {
    ((c.a3 * k + c.a2) * k - c.a1) * k - c.a0
}

/// `Ω'(k)`.
pub fn capital_omega_prime(c: &ModelCoefficients, k: C64) -> C64 {
    (3.0 * c.a3 * k + 2.0 * c.a2) * k - c.a1
}

/// `ω(k) = Ω(k) / (1 + A₋₂k²)`.
pub fn omega(c: &ModelCoefficients, k: C64) -> Result<C64> {
    Ok(capital_omega(c, k) / c.denominator(k)?)
}

/// `dω/dk`.
pub fn group_velocity(c: &ModelCoefficients, k: C64) -> Result<C64> {
    let d = c.denominator(k)?;
    let k2 = k * k;
    let num = c.a_m2 * c.a3 * k2 * k2 + (3.0 * c.a3 + c.a_m2 * c.a1) * k2
        + 2.0 * (c.a2 + c.a_m2 * c.a0) * k
        - c.a1;
    Ok(num / (d * d))
}

/// Where a wavenumber sits relative to D±.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Membership {
    DPlus,
    DMinus,
    Boundary,
    Neither,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionIndicator {
    /// `Re(iΩ / (1 + A₋₂k²))`.
    pub indicator: f64,
    pub membership: Membership,
}

fn indicator_tol(k: C64, d: C64) -> f64 {
    BOUNDARY_TOL * (1.0 + k.norm()).powi(3) / d.norm().max(f64::MIN_POSITIVE)
}

/// Sign of `Re(iω(k))` and the resulting membership in D±.
pub fn region_indicator(c: &ModelCoefficients, k: C64) -> Result<RegionIndicator> {
    let d = c.denominator(k)?;
    let indicator = (C64::i() * capital_omega(c, k) / d).re;
    let tol = indicator_tol(k, d);
    let membership = if indicator.abs() <= tol {
        Membership::Boundary
    } else if indicator < 0.0 && k.im > tol {
        Membership::DPlus
    } else if indicator < 0.0 && k.im < -tol {
        Membership::DMinus
    } else {
        Membership::Neither
    };
    Ok(RegionIndicator { indicator, membership })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootLocation {
    OnDPlusBoundary,
    OnDMinusBoundary,
    Interior,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub value: C64,
    pub multiplicity: usize,
    pub location: RootLocation,
}

/// Classified roots of the characteristic polynomial for one harmonic.
#[derive(Debug, Clone, PartialEq)]
pub struct RootSet {
    pub harmonic: i32,
    pub omega0: f64,
    /// Sorted by `(Im, Re)`.
    pub roots: Vec<Root>,
    pub k0_index: usize,
}

impl RootSet {
    /// The radiating root.
    pub fn k0(&self) -> C64 {
        self.roots[self.k0_index].value
    }

    /// Roots repeated according to multiplicity.
    pub fn values_with_multiplicity(&self) -> Vec<C64> {
        self.roots
            .iter()
            .flat_map(|r| std::iter::repeat(r.value).take(r.multiplicity))
            .collect()
    }
}

/// Evaluates a real-coefficient polynomial, highest degree first.
pub fn poly_eval(coeffs: &[f64], k: C64) -> C64 {
    coeffs.iter().fold(C64::new(0.0, 0.0), |acc, &c| acc * k + c)
}

fn poly_deriv_eval(coeffs: &[f64], k: C64) -> C64 {
    let deg = coeffs.len().saturating_sub(1);
    coeffs[..deg]
        .iter()
        .enumerate()
        .fold(C64::new(0.0, 0.0), |acc, (i, &c)| acc * k + c * (deg - i) as f64)
}

fn polish(coeffs: &[f64], k: C64) -> C64 {
    let mut best = k;
    let mut best_res = poly_eval(coeffs, k).norm();
    let mut cur = k;
    for _ in 0..3 {
        let d = poly_deriv_eval(coeffs, cur);
        if d.norm() == 0.0 {
            break;
        }
        cur -= poly_eval(coeffs, cur) / d;
        let res = poly_eval(coeffs, cur).norm();
        if res < best_res {
            best = cur;
            best_res = res;
        } else {
            break;
        }
    }
    if k.im == 0.0 {
        C64::new(best.re, 0.0)
    } else {
        best
    }
}

/// Roots of `c3 k³ + c2 k² + c1 k + c0` (`c3 ≠ 0`) by Cardano's formula.
///
/// Three real roots come out in the trigonometric form
/// `2√(−p/3) cos((θ − 2πm)/3) − c2/(3c3)`, `m = 0, 1, 2`; one real root
/// plus a conjugate pair uses real cube roots of the conjugate surds.
/// Each entry carries its multiplicity.
pub fn cardano_roots(c3: f64, c2: f64, c1: f64, c0: f64) -> Vec<(C64, usize)> {
    let shift = -c2 / (3.0 * c3);
    let p = (3.0 * c3 * c1 - c2 * c2) / (3.0 * c3 * c3);
    let q = (2.0 * c2.powi(3) - 9.0 * c3 * c2 * c1 + 27.0 * c3 * c3 * c0) / (27.0 * c3.powi(3));
    let half_q = q / 2.0;
    let third_p = p / 3.0;
    let disc = half_q * half_q + third_p.powi(3);
    let scale = half_q * half_q + third_p.abs().powi(3);
    let poly = [c3, c2, c1, c0];
    let real = |v: f64| C64::new(v + shift, 0.0);

    if scale == 0.0 || disc.abs() <= 1e-13 * scale {
        if third_p.abs() <= 1e-12 * (1.0 + shift.abs()).powi(2) && half_q.abs() <= 1e-12 {
            return vec![(real(0.0), 3)];
        }
        let simple = 3.0 * q / p;
        let double = -1.5 * q / p;
        return vec![(polish(&poly, real(simple)), 1), (real(double), 2)];
    }
    if disc > 0.0 {
        let s = disc.sqrt();
        let w = if half_q > 0.0 { -half_q - s } else { -half_q + s };
        let u = w.cbrt();
        let v = if u == 0.0 { 0.0 } else { -third_p / u };
        let re = -(u + v) / 2.0 + shift;
        let im = 3f64.sqrt() / 2.0 * (u - v).abs();
        vec![
            (polish(&poly, real(u + v)), 1),
            (polish(&poly, C64::new(re, im)), 1),
            (polish(&poly, C64::new(re, -im)), 1),
        ]
    } else {
        let r = (-third_p).sqrt();
        let cos_theta = ((3.0 * q / (2.0 * p)) * (-3.0 / p).sqrt()).clamp(-1.0, 1.0);
        let theta = cos_theta.acos();
        (0..3)
            .map(|m| {
                let nu = 2.0 * r * ((theta - 2.0 * PI * m as f64) / 3.0).cos();
                (polish(&poly, real(nu)), 1)
            })
            .collect()
    }
}

/// Roots of `c2 k² + c1 k + c0` (`c2 ≠ 0`).
pub fn quadratic_roots(c2: f64, c1: f64, c0: f64) -> Vec<(C64, usize)> {
    let disc = c1 * c1 - 4.0 * c2 * c0;
    let scale = c1 * c1 + 4.0 * (c2 * c0).abs();
    if scale == 0.0 || disc.abs() <= 1e-13 * scale {
        return vec![(C64::new(-c1 / (2.0 * c2), 0.0), 2)];
    }
    if disc > 0.0 {
        let s = disc.sqrt();
        let q = -0.5 * (c1 + c1.signum() * s);
        let q = if q == 0.0 { -0.5 * s } else { q };
        vec![(C64::new(q / c2, 0.0), 1), (C64::new(c0 / q, 0.0), 1)]
    } else {
        let re = -c1 / (2.0 * c2);
        let im = (-disc).sqrt() / (2.0 * c2.abs());
        vec![(C64::new(re, im), 1), (C64::new(re, -im), 1)]
    }
}

/// Roots of a real polynomial (highest degree first) as eigenvalues of its
/// companion matrix. Leading zeros are stripped.
pub fn companion_roots(coeffs: &[f64]) -> Result<Vec<C64>> {
    let start = coeffs.iter().position(|&c| c != 0.0).ok_or(Error::DegeneratePolynomial)?;
    let c = &coeffs[start..];
    let deg = c.len() - 1;
    if deg == 0 {
        return Err(Error::DegeneratePolynomial);
    }
    let mut m = DMatrix::<f64>::zeros(deg, deg);
    for j in 0..deg {
        m[(0, j)] = -c[j + 1] / c[0];
    }
    for i in 1..deg {
        m[(i, i - 1)] = 1.0;
    }
    let eig = m.complex_eigenvalues();
    Ok(eig
        .iter()
        .map(|z| {
            let z = C64::new(z.re, z.im);
            let z = if z.im.abs() <= IMAG_TOL * (1.0 + z.norm()) { C64::new(z.re, 0.0) } else { z };
            polish(c, z)
        })
        .collect())
}

fn cluster(roots: Vec<C64>) -> Vec<(C64, usize)> {
    let mut out: Vec<(C64, usize)> = Vec::new();
    for r in roots {
        if let Some(slot) = out.iter_mut().find(|(v, _)| (*v - r).norm() <= 1e-6 * (1.0 + r.norm())) {
            let m = slot.1 as f64;
            slot.0 = (slot.0 * m + r) / (m + 1.0);
            slot.1 += 1;
        } else {
            out.push((r, 1));
        }
    }
    out
}

/// Roots with multiplicity, by closed form where one exists.
fn raw_roots(c: &ModelCoefficients, n: i32, omega0: f64) -> Result<Vec<(C64, usize)>> {
    let [c3, c2, c1, c0] = c.characteristic_polynomial(n, omega0);
    match c.family() {
        Family::LocalThirdOrder => Ok(cardano_roots(c3, c2, c1, c0)),
        Family::NonlocalSecondOrder if c2 != 0.0 => Ok(quadratic_roots(c2, c1, c0)),
        Family::NonlocalSecondOrder if c1 != 0.0 => Ok(vec![(C64::new(-c0 / c1, 0.0), 1)]),
        Family::NonlocalSecondOrder => Err(Error::DegeneratePolynomial),
        Family::General => Ok(cluster(companion_roots(&[c3, c2, c1, c0])?)),
    }
}

fn classify(c: &ModelCoefficients, k: C64) -> Result<RootLocation> {
    if k.im == 0.0 {
        let cg = group_velocity(c, k)?.re;
        let tol = RADIATION_TOL * (1.0 + k.norm()).powi(2);
        return Ok(if cg >= -tol {
            RootLocation::OnDPlusBoundary
        } else {
            RootLocation::OnDMinusBoundary
        });
    }
    let ind = region_indicator(c, k)?;
    Ok(match ind.membership {
        Membership::Boundary if k.im > 0.0 => RootLocation::OnDPlusBoundary,
        Membership::Boundary => RootLocation::OnDMinusBoundary,
        _ => RootLocation::Interior,
    })
}

fn root_order(a: &Root, b: &Root) -> Ordering {
    a.value
        .im
        .total_cmp(&b.value.im)
        .then(a.value.re.total_cmp(&b.value.re))
}

/// All roots of the characteristic polynomial for harmonic `n`, classified
/// against ∂D± and with the radiating root selected.
pub fn characteristic_roots(c: &ModelCoefficients, n: i32, omega0: f64) -> Result<RootSet> {
    if !omega0.is_finite() || omega0 < 0.0 {
        return Err(Error::Precondition("omega0 must be finite and non-negative".into()));
    }
    let raw = raw_roots(c, n, omega0)?;
    let mut roots = raw
        .into_iter()
        .map(|(value, multiplicity)| {
            Ok(Root { value, multiplicity, location: classify(c, value)? })
        })
        .collect::<Result<Vec<_>>>()?;
    roots.sort_by(root_order);
    let mut set = RootSet { harmonic: n, omega0, roots, k0_index: 0 };
    set.k0_index = select_radiating_root(&set, c)?;
    Ok(set)
}

/// Index of the unique root obeying the radiation condition: positive
/// imaginary part, or real with non-negative group velocity.
pub fn select_radiating_root(roots: &RootSet, c: &ModelCoefficients) -> Result<usize> {
    let scale = |k: C64| (1.0 + k.norm()).powi(2);
    let upper: Vec<usize> = roots
        .roots
        .iter()
        .enumerate()
        .filter(|(_, r)| r.value.im > IMAG_TOL * (1.0 + r.value.norm()))
        .map(|(i, _)| i)
        .collect();
    let outgoing: Vec<usize> = roots
        .roots
        .iter()
        .enumerate()
        .filter(|(_, r)| r.value.im.abs() <= IMAG_TOL * (1.0 + r.value.norm()))
        .filter(|(_, r)| {
            group_velocity(c, r.value)
                .map(|cg| cg.re >= -RADIATION_TOL * scale(r.value))
                .unwrap_or(false)
        })
        .map(|(i, _)| i)
        .collect();
    let candidates = upper.len() + outgoing.len();
    if candidates != 1 {
        return Err(Error::NoUniqueRadiatingRoot { candidates });
    }
    Ok(upper.first().or(outgoing.first()).copied().unwrap())
}

/// Endpoints of the frequency band where the radiating root changes type.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalFrequencies {
    pub omega_cr_minus: f64,
    pub omega_cr_plus: f64,
    /// Midpoint of the band for the third-order family.
    pub omega_bar: Option<f64>,
    pub degenerate: bool,
}

/// Critical frequencies of a covered family.
pub fn critical_frequencies(c: &ModelCoefficients) -> Result<CriticalFrequencies> {
    match c.family() {
        Family::LocalThirdOrder => {
            let (a0, a1, a2, a3) = (c.a0, c.a1, c.a2, c.a3);
            let p = -(3.0 * a1 * a3 + a2 * a2) / (3.0 * a3 * a3);
            let omega_bar = (-2.0 * a2.powi(3) - 9.0 * a1 * a2 * a3 + 27.0 * a3 * a3 * a0) / (27.0 * a3 * a3);
            let degenerate = p >= -1e-14 * (1.0 + a2 * a2 / (a3 * a3));
            let half_width = if degenerate { 0.0 } else { -2.0 * a3 * (-p / 3.0).powi(3).sqrt() };
            Ok(CriticalFrequencies {
                omega_cr_minus: omega_bar - half_width,
                omega_cr_plus: omega_bar + half_width,
                omega_bar: Some(omega_bar),
                degenerate,
            })
        }
        Family::NonlocalSecondOrder => {
            let (am2, a0, a1, a2) = (c.a_m2, c.a0, c.a1, c.a2);
            let s = ((a2 + a0 * am2).powi(2) + a1 * a1 * am2).sqrt();
            let mid = a0 * am2 - a2;
            Ok(CriticalFrequencies {
                omega_cr_minus: (mid - s) / (2.0 * am2),
                omega_cr_plus: (mid + s) / (2.0 * am2),
                omega_bar: None,
                degenerate: s == 0.0,
            })
        }
        Family::General => Err(Error::UncoveredFamily),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn omega_values() {
        assert_abs_diff_eq!(omega(&ModelCoefficients::KDV, c(0.5, 0.0)).unwrap().re, 0.375, epsilon = 1e-15);
        assert_abs_diff_eq!(omega(&ModelCoefficients::BBM, c(0.5, 0.0)).unwrap().re, 0.4, epsilon = 1e-15);
        let zero = ModelCoefficients::new(0.3, 0.0, 2.0, -1.0, -0.5).unwrap();
        assert_eq!(omega(&zero, c(0.0, 0.0)).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn omega_pole() {
        assert!(matches!(
            omega(&ModelCoefficients::BBM, c(0.0, 1.0)),
            Err(Error::PoleOfDispersion { .. })
        ));
    }

    #[test]
    fn capital_omega_values() {
        assert_eq!(capital_omega(&ModelCoefficients::KDV, c(1.0, 0.0)), c(0.0, 0.0));
        let v = capital_omega(&ModelCoefficients::KDV, c(0.0, 1.0));
        assert_abs_diff_eq!(v.re, 0.0);
        assert_abs_diff_eq!(v.im, 2.0);
    }

    #[test]
    fn group_velocity_values() {
        let kdv = ModelCoefficients::KDV;
        assert_abs_diff_eq!(group_velocity(&kdv, c(0.0, 0.0)).unwrap().re, 1.0);
        assert_abs_diff_eq!(group_velocity(&kdv, c(0.5, 0.0)).unwrap().re, 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(group_velocity(&ModelCoefficients::BBM, c(0.5, 0.0)).unwrap().re, 0.48, epsilon = 1e-15);
    }

    #[test]
    fn indicator_examples() {
        let kdv = ModelCoefficients::KDV;
        let up = region_indicator(&kdv, c(0.0, 1.0)).unwrap();
        assert_abs_diff_eq!(up.indicator, -2.0);
        assert_eq!(up.membership, Membership::DPlus);
        let down = region_indicator(&kdv, c(0.0, -1.0)).unwrap();
        assert_abs_diff_eq!(down.indicator, 2.0);
        assert_eq!(down.membership, Membership::Neither);
        let real = region_indicator(&kdv, c(0.3, 0.0)).unwrap();
        assert_eq!(real.indicator, 0.0);
        assert_eq!(real.membership, Membership::Boundary);
    }

    #[test]
    fn kdv_subcritical_roots() {
        let set = characteristic_roots(&ModelCoefficients::KDV, -1, 0.375).unwrap();
        let vals: Vec<f64> = set.roots.iter().map(|r| r.value.re).collect();
        let s13 = 13f64.sqrt();
        assert_abs_diff_eq!(vals[0], (-1.0 - s13) / 4.0, epsilon = 1e-14);
        assert_abs_diff_eq!(vals[1], 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(vals[2], (-1.0 + s13) / 4.0, epsilon = 1e-14);
        assert_abs_diff_eq!(set.k0().re, 0.5, epsilon = 1e-14);
        assert_eq!(set.roots[1].location, RootLocation::OnDPlusBoundary);
    }

    #[test]
    fn bbm_roots() {
        let set = characteristic_roots(&ModelCoefficients::BBM, -1, 0.4).unwrap();
        assert_eq!(set.roots.len(), 2);
        assert_abs_diff_eq!(set.k0().re, 0.5, epsilon = 1e-14);
        assert!(set.roots.iter().any(|r| (r.value.re - 2.0).abs() < 1e-14));

        let sup = characteristic_roots(&ModelCoefficients::BBM, -1, 1.0).unwrap();
        let k0 = sup.k0();
        assert_abs_diff_eq!(k0.re, 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(k0.im, 3f64.sqrt() / 2.0, epsilon = 1e-14);
    }

    #[test]
    fn double_roots_at_critical() {
        let w = 2.0 / (3.0 * 3f64.sqrt());
        let set = characteristic_roots(&ModelCoefficients::KDV, -1, w).unwrap();
        let k0 = &set.roots[set.k0_index];
        assert_eq!(k0.multiplicity, 2);
        assert_abs_diff_eq!(k0.value.re, 1.0 / 3f64.sqrt(), epsilon = 1e-7);

        let bbm = characteristic_roots(&ModelCoefficients::BBM, -1, 0.5).unwrap();
        assert_eq!(bbm.roots.len(), 1);
        assert_eq!(bbm.roots[0].multiplicity, 2);
        assert_abs_diff_eq!(bbm.k0().re, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn critical_values() {
        let k = critical_frequencies(&ModelCoefficients::KDV).unwrap();
        assert_abs_diff_eq!(k.omega_cr_plus, 2.0 / (3.0 * 3f64.sqrt()), epsilon = 1e-15);
        assert_abs_diff_eq!(k.omega_cr_minus, -2.0 / (3.0 * 3f64.sqrt()), epsilon = 1e-15);
        let b = critical_frequencies(&ModelCoefficients::BBM).unwrap();
        assert_eq!((b.omega_cr_minus, b.omega_cr_plus), (-0.5, 0.5));
        let flat = ModelCoefficients::new(0.0, 0.0, 0.0, 0.0, -1.0).unwrap();
        let f = critical_frequencies(&flat).unwrap();
        assert!(f.degenerate);
        assert_eq!((f.omega_cr_minus, f.omega_cr_plus, f.omega_bar), (0.0, 0.0, Some(0.0)));
    }

    #[test]
    fn general_family_is_numeric() {
        let g = ModelCoefficients::new(0.5, 0.1, -1.0, 0.2, -1.0).unwrap();
        assert!(critical_frequencies(&g).is_err());
        let set = characteristic_roots(&g, 1, 0.3).unwrap();
        let poly = g.characteristic_polynomial(1, 0.3);
        for r in &set.roots {
            assert!(poly_eval(&poly, r.value).norm() < 1e-10);
        }
    }

    #[test]
    fn rejects_bad_coefficients() {
        assert!(ModelCoefficients::new(-1.0, 0.0, 0.0, 0.0, 0.0).is_err());
        assert!(ModelCoefficients::new(0.0, 0.0, 0.0, 0.0, 1.0).is_err());
    }
}
