//! Dirichlet-to-Neumann map for boundary data that are asymptotically
//! time-periodic with finitely many harmonics.
//!
//! For harmonic `n` the unknown boundary values follow from the radiating
//! root `k₀(n)`: `u_x ~ Σ i k₀ a_n e^{inω₀t}` and, for third-order
//! equations, `u_xx ~ −Σ k₀² a_n e^{inω₀t}`.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::dispersion::{characteristic_roots, Family, ModelCoefficients, RootLocation};
use crate::error::{Error, Result};

type C64 = Complex64;

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// `g₀(t) ~ Σ a_n e^{inω₀t}` with finitely many nonzero `a_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierBoundary {
    pub omega0: f64,
    pub coefficients: BTreeMap<i32, C64>,
}

impl FourierBoundary {
    pub fn new(omega0: f64, coefficients: impl IntoIterator<Item = (i32, C64)>) -> Result<Self> {
        if !(omega0 >= 0.0 && omega0.is_finite()) {
            return Err(Error::Precondition("omega0 must be finite and non-negative".into()));
        }
        let coefficients = coefficients.into_iter().filter(|(_, a)| *a != C64::new(0.0, 0.0)).collect();
        Ok(Self { omega0, coefficients })
    }

    /// `sin(−ω₀t)`: `a₁ = −1/(2i)`, `a₋₁ = 1/(2i)`.
    pub fn sine(omega0: f64) -> Result<Self> {
        Self::new(omega0, [(1, -1.0 / (2.0 * I)), (-1, 1.0 / (2.0 * I))])
    }

    /// True when `a_{−n} = conj(a_n)` for every `n`, i.e. the datum is real.
    pub fn is_real(&self) -> bool {
        self.coefficients.iter().all(|(&n, a)| {
            let partner = self.coefficients.get(&-n).copied().unwrap_or_default();
            (partner - a.conj()).norm() <= 1e-14 * (1.0 + a.norm())
        })
    }

    /// `Σ a_n e^{inω₀t}`.
    pub fn value(&self, t: f64) -> C64 {
        self.coefficients.iter().map(|(&n, a)| a * (I * (n as f64 * self.omega0 * t)).exp()).sum()
    }
}

/// D-N data for one harmonic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HarmonicDN {
    pub n: i32,
    pub a: C64,
    /// Radiating root. For a harmonic closed by the compatibility hook this
    /// is `b/(ia)`.
    pub k0: C64,
    /// Coefficient of `u_x(0,t)`.
    pub b: C64,
    /// Coefficient of `u_xx(0,t)`; third-order equations only.
    pub c: Option<C64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DNMapResult {
    pub omega0: f64,
    pub real: bool,
    pub harmonics: Vec<HarmonicDN>,
}

/// The D-N map for `boundary` under `coeffs`.
pub fn dn_coefficients(coeffs: &ModelCoefficients, boundary: &FourierBoundary) -> Result<DNMapResult> {
    build(coeffs, boundary, None)
}

/// As [`dn_coefficients`], but closes the uncovered second-order harmonic
/// `n* = −A₂/(ω₀A₋₂)` with `b_{n*} = u₀'(0) − Σ_{n≠n*} b_n`.
pub fn dn_coefficients_with_slope(
    coeffs: &ModelCoefficients,
    boundary: &FourierBoundary,
    u0_slope: f64,
) -> Result<DNMapResult> {
    build(coeffs, boundary, Some(u0_slope))
}

fn build(coeffs: &ModelCoefficients, boundary: &FourierBoundary, slope: Option<f64>) -> Result<DNMapResult> {
    let family = coeffs.family();
    if family == Family::General {
        return Err(Error::UncoveredFamily);
    }
    let w0 = boundary.omega0;
    let mut harmonics = Vec::new();
    let mut pending = None;
    for (&n, &a) in &boundary.coefficients {
        let a2n = coeffs.a2 + n as f64 * w0 * coeffs.a_m2;
        let resonant = family == Family::NonlocalSecondOrder
            && a2n.abs() <= 1e-12 * (1.0 + coeffs.a2.abs() + (n as f64 * w0 * coeffs.a_m2).abs());
        if resonant {
            let covered = (coeffs.a2 == 0.0 && n == 0)
                || coeffs.a1 * (coeffs.a0 * coeffs.a_m2 + coeffs.a2) == 0.0;
            if covered && coeffs.a1 != 0.0 {
                let k = C64::new((n as f64 * w0 - coeffs.a0) / coeffs.a1, 0.0);
                harmonics.push(HarmonicDN { n, a, k0: k, b: I * k * a, c: None });
                continue;
            }
            if slope.is_none() {
                return Err(Error::UncoveredHarmonic { n });
            }
            pending = Some((n, a));
            continue;
        }
        let k0 = characteristic_roots(coeffs, n, w0)?.k0();
        let c = (family == Family::LocalThirdOrder).then(|| -k0 * k0 * a);
        harmonics.push(HarmonicDN { n, a, k0, b: I * k0 * a, c });
    }
    if let (Some((n, a)), Some(s)) = (pending, slope) {
        let b = C64::new(s, 0.0) - harmonics.iter().map(|h| h.b).sum::<C64>();
        harmonics.push(HarmonicDN { n, a, k0: b / (I * a), b, c: None });
        harmonics.sort_by_key(|h| h.n);
    }
    Ok(DNMapResult { omega0: w0, real: boundary.is_real(), harmonics })
}

/// Largest `|−A₃c − i(A₃k + A₂')b + (A₃k² + A₂'k − A₁)a|` over the roots on
/// ∂D⁻ of each harmonic, with `A₂' = A₂ + nω₀A₋₂`. Zero when the map
/// removes every pole of the global relation.
pub fn removability_residual(coeffs: &ModelCoefficients, result: &DNMapResult) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for h in &result.harmonics {
        let a2n = coeffs.a2 + h.n as f64 * result.omega0 * coeffs.a_m2;
        let roots = characteristic_roots(coeffs, h.n, result.omega0)?;
        let c = h.c.unwrap_or_default();
        for r in roots.roots.iter().filter(|r| r.location == RootLocation::OnDMinusBoundary) {
            let k = r.value;
            let lhs = -coeffs.a3 * c - I * (coeffs.a3 * k + a2n) * h.b
                + (coeffs.a3 * k * k + a2n * k - coeffs.a1) * h.a;
            worst = worst.max(lhs.norm());
        }
    }
    Ok(worst)
}

/// `∂ₓʲu(0,t) ~ Σ (ik₀)ʲ a_n e^{inω₀t}`.
pub fn boundary_derivative_series(result: &DNMapResult, j: u32, t: f64) -> C64 {
    result
        .harmonics
        .iter()
        .map(|h| (I * h.k0).powu(j) * h.a * (I * (h.n as f64 * result.omega0 * t)).exp())
        .sum()
}

/// `u(x,t) ~ Σ a_n e^{ik₀x + inω₀t}`.
pub fn asymptotic_solution_series(result: &DNMapResult, x: f64, t: f64) -> Result<C64> {
    if !(x >= 0.0) {
        return Err(Error::Precondition("x must be non-negative".into()));
    }
    Ok(result
        .harmonics
        .iter()
        .map(|h| h.a * (I * h.k0 * x + I * (h.n as f64 * result.omega0 * t)).exp())
        .sum())
}

/// Closed-form solution when `A₁ = 0` and `A₂ + A₀A₋₂ = 0`:
/// `e^{iA₀t}u₀(x) + [g₀(t) − e^{iA₀t}g₀(0)] e^{−x/√A₋₂}`.
pub fn degenerate_explicit_solution(
    coeffs: &ModelCoefficients,
    u0: impl Fn(f64) -> C64,
    g0: impl Fn(f64) -> C64,
    x: f64,
    t: f64,
) -> Result<C64> {
    if coeffs.a1 != 0.0 || coeffs.a2 + coeffs.a0 * coeffs.a_m2 != 0.0 || !(coeffs.a_m2 > 0.0) {
        return Err(Error::Precondition("needs A1 = 0, A2 + A0 A-2 = 0 and A-2 > 0".into()));
    }
    let rot = (I * coeffs.a0 * t).exp();
    Ok(rot * u0(x) + (g0(t) - rot * g0(0.0)) * (-x / coeffs.a_m2.sqrt()).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn kdv_sine_map() {
        let r = dn_coefficients(&ModelCoefficients::KDV, &FourierBoundary::sine(0.375).unwrap()).unwrap();
        let h1 = r.harmonics.iter().find(|h| h.n == 1).unwrap();
        let hm = r.harmonics.iter().find(|h| h.n == -1).unwrap();
        assert_abs_diff_eq!(h1.k0.re, -0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(hm.k0.re, 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(h1.b.re, 0.25, epsilon = 1e-14);
        assert_abs_diff_eq!(hm.b.re, 0.25, epsilon = 1e-14);
        let c1 = h1.c.unwrap();
        assert!((c1 - (-0.25) * (-1.0 / (2.0 * I))).norm() < 1e-14);
        assert!(removability_residual(&ModelCoefficients::KDV, &r).unwrap() < 1e-12);
    }

    #[test]
    fn series_reconstruct_boundary() {
        let r = dn_coefficients(&ModelCoefficients::KDV, &FourierBoundary::sine(0.375).unwrap()).unwrap();
        for t in [0.0, 1.3, 7.9] {
            let g = boundary_derivative_series(&r, 0, t);
            assert_abs_diff_eq!(g.re, -(0.375 * t).sin(), epsilon = 1e-14);
            let ux = boundary_derivative_series(&r, 1, t);
            assert_abs_diff_eq!(ux.re, 0.5 * (0.375 * t).cos(), epsilon = 1e-14);
            assert!(ux.im.abs() < 1e-14);
            // u_xxx = −u_t − u_x at x = 0
            let uxxx = boundary_derivative_series(&r, 3, t);
            let ut = -0.375 * (0.375 * t).cos();
            assert_abs_diff_eq!(uxxx.re, -ut - ux.re, epsilon = 1e-13);
        }
        let u = asymptotic_solution_series(&r, 4.0, 10.0).unwrap();
        assert_abs_diff_eq!(u.re, (-1.75f64).sin(), epsilon = 1e-14);
    }

    #[test]
    fn bbm_constant_harmonic() {
        let b = FourierBoundary::new(0.7, [(0, C64::new(1.0, 0.0))]).unwrap();
        let r = dn_coefficients(&ModelCoefficients::BBM, &b).unwrap();
        assert_eq!(r.harmonics[0].b, C64::new(0.0, 0.0));
        assert!(r.harmonics[0].c.is_none());
    }

    #[test]
    fn bbm_unit_frequency_envelope() {
        let r = dn_coefficients(&ModelCoefficients::BBM, &FourierBoundary::sine(1.0).unwrap()).unwrap();
        let h1 = r.harmonics.iter().find(|h| h.n == 1).unwrap();
        assert_abs_diff_eq!(h1.k0.im, 3f64.sqrt() / 2.0, epsilon = 1e-12);
        let u = asymptotic_solution_series(&r, 2.0, 0.0).unwrap();
        assert!(u.norm() <= (-3f64.sqrt()).exp() + 1e-12);
        assert!(removability_residual(&ModelCoefficients::BBM, &r).unwrap() < 1e-12);
    }

    #[test]
    fn uncovered_harmonic_and_slope_hook() {
        // A₂' vanishes at n = 1 when A₂ = −ω₀A₋₂.
        let c = ModelCoefficients::new(1.0, 0.3, -1.0, -0.5, 0.0).unwrap();
        let b = FourierBoundary::sine(0.5).unwrap();
        assert_eq!(dn_coefficients(&c, &b), Err(Error::UncoveredHarmonic { n: 1 }));
        let r = dn_coefficients_with_slope(&c, &b, 0.2).unwrap();
        let total: C64 = r.harmonics.iter().map(|h| h.b).sum();
        assert_abs_diff_eq!(total.re, 0.2, epsilon = 1e-14);
    }

    #[test]
    fn empty_boundary() {
        let b = FourierBoundary::new(0.4, []).unwrap();
        let r = dn_coefficients(&ModelCoefficients::KDV, &b).unwrap();
        assert!(r.harmonics.is_empty());
        assert!(r.real);
    }

    #[test]
    fn degenerate_closed_form() {
        let c = ModelCoefficients::new(1.0, 0.0, 0.0, 0.0, 0.0).unwrap();
        let v = degenerate_explicit_solution(&c, |_| C64::new(0.0, 0.0), |t| C64::new(t.sin(), 0.0), 1.0, std::f64::consts::FRAC_PI_2)
            .unwrap();
        assert_abs_diff_eq!(v.re, (-1.0f64).exp(), epsilon = 1e-15);
        let u0 = |x: f64| C64::new(x * x, 0.0);
        let at0 = degenerate_explicit_solution(&c, u0, |t| C64::new(t, 0.0), 0.7, 0.0).unwrap();
        assert_abs_diff_eq!(at0.re, 0.49, epsilon = 1e-15);
        assert!(degenerate_explicit_solution(&ModelCoefficients::KDV, u0, u0, 1.0, 1.0).is_err());
    }

    #[test]
    fn general_family_rejected() {
        let c = ModelCoefficients::new(1.0, 0.0, -1.0, 0.0, -1.0).unwrap();
        assert_eq!(dn_coefficients(&c, &FourierBoundary::sine(0.4).unwrap()), Err(Error::UncoveredFamily));
    }
}
