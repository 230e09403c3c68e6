//! Linear modulation theory for the subcritical wavemaker problems.
//!
//! Behind the boundary the wave is a plane wave `sin(k₀x − ω₀t)` out to the
//! ray `ξ = c_g`. Between `c_g` and `1` it is a rarefaction fan on which
//! `c_g(k) = ξ`, with amplitude `F(ξ)/√t` and phase `θ(x,t)`. The
//! constants `θ₀ = 0` and `F` are fixed by matching to the long-time
//! asymptotics.

use std::f64::consts::{PI, SQRT_2};

use crate::asymptotics::{bbm_group_velocity, bbm_k0, kdv_group_velocity, kdv_k3, REGION_TOL};
use crate::dispersion::Equation;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// `0 ≤ ξ ≤ c_g`: frequency and wavenumber of the forcing.
    Plateau,
    /// `c_g < ξ ≤ 1`: the self-similar fan.
    Fan,
}

/// Modulation fields on one ray.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModulationState {
    pub equation: Equation,
    pub omega0: f64,
    pub xi: f64,
    pub branch: Branch,
    pub omega: f64,
    pub k: f64,
    /// `1` on the plateau, `F(ξ)` on the fan, where the amplitude is `F/√t`.
    pub amplitude: f64,
    pub theta0: f64,
}

impl ModulationState {
    pub fn amplitude_at(&self, t: f64) -> f64 {
        match self.branch {
            Branch::Plateau => self.amplitude,
            Branch::Fan => self.amplitude / t.sqrt(),
        }
    }

    /// `θ(x, t)`, with the branch picked from `x/t`.
    pub fn phase_at(&self, x: f64, t: f64) -> f64 {
        phase(self.equation, self.omega0, self.theta0, x, t)
    }

    /// `a sin θ` on the plateau and `a cos θ` on the fan.
    pub fn reconstruct(&self, x: f64, t: f64) -> f64 {
        let th = self.phase_at(x, t);
        match self.branch {
            Branch::Plateau => self.amplitude_at(t) * th.sin(),
            Branch::Fan => self.amplitude_at(t) * th.cos(),
        }
    }
}

fn group_velocity(eq: Equation, omega0: f64) -> f64 {
    match eq {
        Equation::Kdv => kdv_group_velocity(omega0),
        Equation::Bbm => bbm_group_velocity(omega0),
    }
}

fn plateau_k(eq: Equation, omega0: f64) -> f64 {
    match eq {
        Equation::Kdv => kdv_k3(omega0).re,
        Equation::Bbm => bbm_k0(omega0),
    }
}

fn phase(eq: Equation, omega0: f64, theta0: f64, x: f64, t: f64) -> f64 {
    let xi = x / t;
    if xi <= group_velocity(eq, omega0) {
        return plateau_k(eq, omega0) * x - omega0 * t;
    }
    match eq {
        Equation::Kdv => -2.0 * 3f64.sqrt() / 9.0 * t * (1.0 - xi).powf(1.5) + theta0,
        Equation::Bbm => {
            let big = (1.0 + 8.0 * xi).sqrt();
            let inner = ((t * (t + 8.0 * x)).sqrt() - t - 2.0 * x).max(0.0);
            -2.0 * SQRT_2 * x.sqrt() * inner.powf(1.5) / (t * (big - 1.0) * (big - 1.0)) + theta0
        }
    }
}

fn check(eq: Equation, omega0: f64, xi: f64) -> Result<f64> {
    if !(omega0 > 0.0) {
        return Err(Error::Precondition("omega0 must be positive".into()));
    }
    if omega0 >= eq.omega_cr() {
        return Err(Error::SupercriticalUnsupported);
    }
    if !(0.0..=1.0).contains(&xi) {
        return Err(Error::Precondition("xi must lie in [0, 1]".into()));
    }
    if (xi - 1.0).abs() < REGION_TOL {
        return Err(Error::OnRegionBoundary { omega0, xi });
    }
    let cg = group_velocity(eq, omega0);
    if xi > cg && xi - cg < REGION_TOL {
        return Err(Error::AtGroupVelocity);
    }
    Ok(cg)
}

/// KdV fields: `ω = √(3−3ξ)(2+ξ)/9` and `k = √((1−ξ)/3)` on the fan.
pub fn kdv_modulation(omega0: f64, xi: f64) -> Result<ModulationState> {
    let cg = check(Equation::Kdv, omega0, xi)?;
    let base = ModulationState {
        equation: Equation::Kdv,
        omega0,
        xi,
        branch: Branch::Plateau,
        omega: omega0,
        k: kdv_k3(omega0).re,
        amplitude: 1.0,
        theta0: 0.0,
    };
    if xi <= cg {
        return Ok(base);
    }
    let f = 27.0 * omega0 * xi
        / ((4.0 - 27.0 * omega0 * omega0 - xi * xi * (xi + 3.0)) * (2.0 * PI * (3.0 * (1.0 - xi)).sqrt()).sqrt());
    Ok(ModulationState {
        branch: Branch::Fan,
        omega: (3.0 - 3.0 * xi).sqrt() * (2.0 + xi) / 9.0,
        k: ((1.0 - xi) / 3.0).sqrt(),
        amplitude: f,
        ..base
    })
}

/// BBM fields: `ω = √(1−4ξ+Ξ)/(2√2)` and `k = √((Ξ−1−2ξ)/(2ξ))` on the fan,
/// `Ξ = √(1+8ξ)`.
pub fn bbm_modulation(omega0: f64, xi: f64) -> Result<ModulationState> {
    let cg = check(Equation::Bbm, omega0, xi)?;
    let base = ModulationState {
        equation: Equation::Bbm,
        omega0,
        xi,
        branch: Branch::Plateau,
        omega: omega0,
        k: bbm_k0(omega0),
        amplitude: 1.0,
        theta0: 0.0,
    };
    if xi <= cg {
        return Ok(base);
    }
    let big = (1.0 + 8.0 * xi).sqrt();
    let w2 = omega0 * omega0;
    let f = omega0 * (-4.0 * xi + big - 1.0) * xi.powf(0.25) * (big - 1.0).powf(1.5)
        / (2f64.powf(1.25)
            * PI.sqrt()
            * ((4.0 * xi - big + 1.0) * w2 + xi * (2.0 * xi - big + 1.0))
            * (big * big - big).sqrt()
            * (-2.0 * xi - 1.0 + big).powf(0.25));
    Ok(ModulationState {
        branch: Branch::Fan,
        omega: (1.0 - 4.0 * xi + big).sqrt() / (2.0 * SQRT_2),
        k: ((-1.0 - 2.0 * xi + big) / (2.0 * xi)).sqrt(),
        amplitude: f,
        ..base
    })
}

pub fn modulation(eq: Equation, omega0: f64, xi: f64) -> Result<ModulationState> {
    match eq {
        Equation::Kdv => kdv_modulation(omega0, xi),
        Equation::Bbm => bbm_modulation(omega0, xi),
    }
}
