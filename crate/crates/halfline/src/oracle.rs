//! Finite-difference reference solver on a truncated half-line.
//!
//! Fourth-order stencils in space, classical RK4 in time. The right end is
//! either a smooth sponge layer or a plain truncation. The forcing is the
//! sine wavemaker `u(0, t) = −sin(ω₀t)`.

use std::f64::consts::PI;
use std::sync::OnceLock;

use nalgebra::DMatrix;

use crate::dispersion::Equation;
use crate::error::{Error, Result};

/// RK4 reaches `2.83` on the imaginary axis and `2.78` on the negative real
/// axis. The margin absorbs the boundary rows.
const RK4_REACH: f64 = 2.5;
const SPONGE_STRENGTH: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RightBoundary {
    Sponge,
    Truncation,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleGrid {
    pub equation: Equation,
    pub x_max: f64,
    pub nx: usize,
    pub dt: f64,
    pub bc_right: RightBoundary,
    pub sponge_width: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleSolution {
    pub t: f64,
    pub h: f64,
    pub u: Vec<f64>,
}

impl OracleSolution {
    pub fn x(&self) -> Vec<f64> {
        (0..self.u.len()).map(|j| j as f64 * self.h).collect()
    }

    /// Six-point Lagrange interpolation.
    pub fn value_at(&self, x: f64) -> f64 {
        let n = self.u.len();
        let j = (x / self.h).floor().max(0.0) as usize;
        let lo = j.saturating_sub(2).min(n - 6);
        let nodes: Vec<f64> = (lo..lo + 6).map(|i| i as f64 * self.h).collect();
        let w = fd_weights(x, &nodes, 0);
        w.iter().zip(&self.u[lo..lo + 6]).map(|(a, b)| a * b).sum()
    }

    /// `∫u² dx` by the trapezoid rule.
    pub fn energy(&self) -> f64 {
        let n = self.u.len();
        let s: f64 = self.u.iter().map(|v| v * v).sum();
        self.h * (s - 0.5 * (self.u[0].powi(2) + self.u[n - 1].powi(2)))
    }
}

/// Fornberg's finite-difference weights for the `m`-th derivative at `z`.
pub fn fd_weights(z: f64, xs: &[f64], m: usize) -> Vec<f64> {
    let n = xs.len();
    let mut c = vec![vec![0.0; m + 1]; n];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = xs[0] - z;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - z;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] *= c4 / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|row| row[m]).collect()
}

/// Sparse row: weights for nodes `start..start + w.len()`.
#[derive(Debug, Clone)]
struct Row {
    start: usize,
    w: Vec<f64>,
}

impl Row {
    fn apply(&self, u: &[f64]) -> f64 {
        self.w.iter().zip(&u[self.start..]).map(|(a, b)| a * b).sum()
    }

    fn at(&self, col: usize) -> f64 {
        col.checked_sub(self.start).and_then(|i| self.w.get(i)).copied().unwrap_or(0.0)
    }
}

/// Derivative row at interior node `j` of `0..=n`. One-sided at the left
/// edge, central elsewhere, with zeros assumed past node `n`.
fn stencil_row(j: usize, n: usize, h: f64, m: usize, half: usize) -> Row {
    let (lo, hi) = if j < half { (0, m + 3) } else { (j - half, j + half) };
    let nodes: Vec<f64> = (lo..=hi).map(|i| i as f64).collect();
    let mut w = fd_weights(j as f64, &nodes, m);
    let scale = h.powi(m as i32);
    w.iter_mut().for_each(|v| *v /= scale);
    w.truncate((n + 1).saturating_sub(lo).min(w.len()));
    Row { start: lo, w }
}

fn d1_row(j: usize, n: usize, h: f64) -> Row {
    stencil_row(j, n, h, 1, 2)
}

fn d2_row(j: usize, n: usize, h: f64) -> Row {
    stencil_row(j, n, h, 2, 2)
}

fn d3_row(j: usize, n: usize, h: f64) -> Row {
    stencil_row(j, n, h, 3, 3)
}

fn central_symbol(row: &Row, j: usize, theta: f64) -> (f64, f64) {
    row.w.iter().enumerate().fold((0.0, 0.0), |(re, im), (i, w)| {
        let p = (row.start + i) as f64 - j as f64;
        (re + w * (p * theta).cos(), im + w * (p * theta).sin())
    })
}

fn unit_radii() -> (f64, f64) {
    static RADII: OnceLock<(f64, f64)> = OnceLock::new();
    *RADII.get_or_init(|| {
        let n = 96;
        let radius = |row: &dyn Fn(usize) -> Row| {
            let m = DMatrix::from_fn(n - 1, n - 1, |i, c| row(i + 1).at(c + 1));
            m.complex_eigenvalues().iter().map(|e| e.norm()).fold(0.0, f64::max)
        };
        (radius(&|j| d1_row(j, n, 1.0)), radius(&|j| d3_row(j, n, 1.0)))
    })
}

impl OracleGrid {
    /// Default sponge width is `0.15·x_max`.
    pub fn new(equation: Equation, x_max: f64, nx: usize, dt: f64, bc_right: RightBoundary) -> Result<Self> {
        if nx < 64 {
            return Err(Error::Precondition("nx must be at least 64".into()));
        }
        if !(x_max > 0.0 && dt > 0.0) {
            return Err(Error::Precondition("x_max and dt must be positive".into()));
        }
        let grid = OracleGrid { equation, x_max, nx, dt, bc_right, sponge_width: 0.15 * x_max };
        let limit = grid.stability_limit();
        if dt > limit {
            return Err(Error::StabilityViolation { dt, limit });
        }
        Ok(grid)
    }

    /// A grid that resolves `t ≤ t_final` to about 1e-6: `h = 0.1` for KdV,
    /// `h = 0.05` for BBM, with the sponge clear of the front.
    pub fn for_horizon(equation: Equation, t_final: f64) -> Result<Self> {
        let x_max = (1.5 * t_final + 10.0).max(40.0);
        let h = match equation {
            Equation::Kdv => 0.1,
            Equation::Bbm => 0.05,
        };
        let nx = (x_max / h).round() as usize + 1;
        let probe = OracleGrid { equation, x_max, nx, dt: 0.0, bc_right: RightBoundary::Sponge, sponge_width: 0.15 * x_max };
        OracleGrid::new(equation, x_max, nx, (0.95 * probe.stability_limit()).min(0.02), RightBoundary::Sponge)
    }

    pub fn h(&self) -> f64 {
        self.x_max / (self.nx - 1) as f64
    }

    fn sigma_max(&self) -> f64 {
        match self.bc_right {
            RightBoundary::Sponge => SPONGE_STRENGTH,
            RightBoundary::Truncation => 0.0,
        }
    }

    /// Largest stable RK4 step. KdV uses the spectral radii of the unit-spacing
    /// derivative matrices, boundary rows included; BBM uses the interior symbol.
    pub fn stability_limit(&self) -> f64 {
        let h = self.h();
        let rho = match self.equation {
            Equation::Kdv => {
                let (r1, r3) = unit_radii();
                r1 / h + r3 / h.powi(3)
            }
            Equation::Bbm => {
                let n = self.nx - 1;
                let j = n / 2;
                let (r1, r2) = (d1_row(j, n, h), d2_row(j, n, h));
                (0..=512)
                    .map(|i| {
                        let th = PI * i as f64 / 512.0;
                        central_symbol(&r1, j, th).1.abs() / (1.0 - central_symbol(&r2, j, th).0)
                    })
                    .fold(0.0, f64::max)
            }
        };
        RK4_REACH / (rho + self.sigma_max())
    }

    /// Time the front (speed 1) needs to reach the sponge or the end.
    pub fn clean_horizon(&self) -> f64 {
        match self.bc_right {
            RightBoundary::Sponge => self.x_max - self.sponge_width,
            RightBoundary::Truncation => self.x_max,
        }
    }
}

/// Banded LU without pivoting; `a[i][c]` holds column `i + c − kl`.
struct Banded {
    kl: usize,
    ku: usize,
    a: Vec<Vec<f64>>,
}

impl Banded {
    fn new(m: usize, kl: usize, ku: usize) -> Self {
        Banded { kl, ku, a: vec![vec![0.0; kl + ku + 1]; m] }
    }

    fn set(&mut self, i: usize, j: usize, v: f64) {
        self.a[i][j + self.kl - i] = v;
    }

    fn get(&self, i: usize, j: usize) -> f64 {
        self.a[i][j + self.kl - i]
    }

    fn factor(&mut self) {
        let m = self.a.len();
        for k in 0..m {
            let p = self.get(k, k);
            for i in k + 1..(k + self.kl + 1).min(m) {
                let l = self.get(i, k) / p;
                self.set(i, k, l);
                for j in k + 1..(k + self.ku + 1).min(m) {
                    let v = self.get(i, j) - l * self.get(k, j);
                    self.set(i, j, v);
                }
            }
        }
    }

    fn solve(&self, b: &mut [f64]) {
        let m = b.len();
        for i in 0..m {
            let s: f64 = (i.saturating_sub(self.kl)..i).map(|j| self.get(i, j) * b[j]).sum();
            b[i] -= s;
        }
        for i in (0..m).rev() {
            let s: f64 = (i + 1..(i + self.ku + 1).min(m)).map(|j| self.get(i, j) * b[j]).sum();
            b[i] = (b[i] - s) / self.get(i, i);
        }
    }
}

struct Operator {
    eq: Equation,
    omega0: f64,
    n: usize,
    d1: Vec<Row>,
    d3: Vec<Row>,
    d2_left: Vec<f64>,
    lu: Option<Banded>,
    sigma: Vec<f64>,
}

impl Operator {
    fn new(eq: Equation, omega0: f64, grid: &OracleGrid) -> Self {
        let n = grid.nx - 1;
        let h = grid.h();
        let d1: Vec<Row> = (1..n).map(|j| d1_row(j, n, h)).collect();
        let d3 = match eq {
            Equation::Kdv => (1..n).map(|j| d3_row(j, n, h)).collect(),
            Equation::Bbm => Vec::new(),
        };
        let (mut d2_left, mut lu) = (Vec::new(), None);
        if eq == Equation::Bbm {
            let d2: Vec<Row> = (1..n).map(|j| d2_row(j, n, h)).collect();
            let (kl, ku) = (2, 4);
            let mut b = Banded::new(n - 1, kl, ku);
            for (i, row) in d2.iter().enumerate() {
                let j = i + 1;
                for col in j.saturating_sub(kl).max(1)..=(j + ku).min(n - 1) {
                    let id = if col == j { 1.0 } else { 0.0 };
                    b.set(i, col - 1, id - row.at(col));
                }
            }
            b.factor();
            d2_left = d2.iter().map(|r| r.at(0)).collect();
            lu = Some(b);
        }
        let start = grid.x_max - grid.sponge_width;
        let sigma = (0..=n)
            .map(|j| {
                let x = j as f64 * h;
                if grid.bc_right == RightBoundary::Sponge && x > start {
                    let s = (x - start) / grid.sponge_width;
                    SPONGE_STRENGTH * s * s
                } else {
                    0.0
                }
            })
            .collect();
        Operator { eq, omega0, n, d1, d3, d2_left, lu, sigma }
    }

    fn boundary(&self, t: f64) -> (f64, f64) {
        let w = self.omega0;
        (-(w * t).sin(), -w * (w * t).cos())
    }

    fn rhs(&self, t: f64, u: &[f64], out: &mut [f64]) {
        let n = self.n;
        let (_, gdot) = self.boundary(t);
        out[0] = gdot;
        out[n] = 0.0;
        match self.eq {
            Equation::Kdv => {
                for j in 1..n {
                    out[j] = -self.d1[j - 1].apply(u) - self.d3[j - 1].apply(u) - self.sigma[j] * u[j];
                }
            }
            Equation::Bbm => {
                let mut b: Vec<f64> =
                    (1..n).map(|j| -self.d1[j - 1].apply(u) + self.d2_left[j - 1] * gdot).collect();
                self.lu.as_ref().expect("bbm factor").solve(&mut b);
                for j in 1..n {
                    out[j] = b[j - 1] - self.sigma[j] * u[j];
                }
            }
        }
    }

    fn step(&self, t: f64, dt: f64, u: &mut [f64], work: &mut [Vec<f64>; 5]) {
        let [k1, k2, k3, k4, tmp] = work;
        let len = u.len();
        self.rhs(t, u, k1);
        for i in 0..len {
            tmp[i] = u[i] + 0.5 * dt * k1[i];
        }
        self.rhs(t + 0.5 * dt, tmp, k2);
        for i in 0..len {
            tmp[i] = u[i] + 0.5 * dt * k2[i];
        }
        self.rhs(t + 0.5 * dt, tmp, k3);
        for i in 0..len {
            tmp[i] = u[i] + dt * k3[i];
        }
        self.rhs(t + dt, tmp, k4);
        for i in 0..len {
            u[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        u[0] = self.boundary(t + dt).0;
        u[self.n] = 0.0;
    }
}

/// Snapshots at each of `times`, returned in the order given.
pub fn solve_at(omega0: f64, grid: &OracleGrid, times: &[f64]) -> Result<Vec<OracleSolution>> {
    if !(omega0 > 0.0) {
        return Err(Error::Precondition("omega0 must be positive".into()));
    }
    let t_last = times.iter().copied().fold(0.0, f64::max);
    if times.iter().any(|t| !(*t >= 0.0)) {
        return Err(Error::Precondition("times must be non-negative".into()));
    }
    if t_last > grid.clean_horizon() {
        return Err(Error::FrontExitedDomain { t_final: t_last });
    }
    let op = Operator::new(grid.equation, omega0, grid);
    let len = grid.nx;
    let mut u = vec![0.0; len];
    let mut work = std::array::from_fn(|_| vec![0.0; len]);
    let mut order: Vec<usize> = (0..times.len()).collect();
    order.sort_by(|a, b| times[*a].total_cmp(&times[*b]));
    let mut out = vec![None; times.len()];
    let mut t = 0.0;
    for idx in order {
        let target = times[idx];
        while t < target {
            let dt = grid.dt.min(target - t);
            op.step(t, dt, &mut u, &mut work);
            t = if target - t <= grid.dt { target } else { t + dt };
        }
        out[idx] = Some(OracleSolution { t, h: grid.h(), u: u.clone() });
    }
    Ok(out.into_iter().map(|s| s.expect("every time visited")).collect())
}

pub fn solve(omega0: f64, grid: &OracleGrid, t_final: f64) -> Result<OracleSolution> {
    Ok(solve_at(omega0, grid, &[t_final])?.remove(0))
}

fn run(eq: Equation, omega0: f64, grid: &OracleGrid, t_final: f64) -> Result<OracleSolution> {
    if grid.equation != eq {
        return Err(Error::Precondition(format!("grid was built for {}", grid.equation.name())));
    }
    solve(omega0, grid, t_final)
}

/// `u_t = −u_x − u_xxx` with `u(0, t) = −sin(ω₀t)`.
pub fn run_kdv(omega0: f64, grid: &OracleGrid, t_final: f64) -> Result<OracleSolution> {
    run(Equation::Kdv, omega0, grid, t_final)
}

/// `(1 − ∂ₓₓ)u_t = −u_x` with `u(0, t) = −sin(ω₀t)`.
pub fn run_bbm(omega0: f64, grid: &OracleGrid, t_final: f64) -> Result<OracleSolution> {
    run(Equation::Bbm, omega0, grid, t_final)
}

/// Evolve periodic data on `[0, length)` with the interior stencils.
pub fn evolve_periodic(eq: Equation, u0: &[f64], length: f64, dt: f64, t_final: f64) -> Vec<f64> {
    let n = u0.len();
    let h = length / n as f64;
    let wrap = |j: isize| j.rem_euclid(n as isize) as usize;
    let c1 = fd_weights(0.0, &[-2.0, -1.0, 0.0, 1.0, 2.0], 1);
    let c2 = fd_weights(0.0, &[-2.0, -1.0, 0.0, 1.0, 2.0], 2);
    let c3 = fd_weights(0.0, &[-3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0], 3);
    let apply = |c: &[f64], half: isize, p: i32, u: &[f64]| -> Vec<f64> {
        (0..n as isize)
            .map(|j| (-half..=half).map(|o| c[(o + half) as usize] * u[wrap(j + o)]).sum::<f64>() / h.powi(p))
            .collect()
    };
    let lu = (eq == Equation::Bbm).then(|| {
        let mut m = DMatrix::<f64>::identity(n, n);
        for j in 0..n as isize {
            for o in -2..=2isize {
                m[(j as usize, wrap(j + o))] -= c2[(o + 2) as usize] / (h * h);
            }
        }
        m.lu()
    });
    let rhs = |u: &[f64]| -> Vec<f64> {
        let d1 = apply(&c1, 2, 1, u);
        match &lu {
            None => {
                let d3 = apply(&c3, 3, 3, u);
                d1.iter().zip(&d3).map(|(a, b)| -a - b).collect()
            }
            Some(lu) => {
                let b = nalgebra::DVector::from_iterator(n, d1.iter().map(|v| -v));
                lu.solve(&b).expect("nonsingular").iter().copied().collect()
            }
        }
    };
    let mut u = u0.to_vec();
    let mut t = 0.0;
    while t < t_final {
        let dt = dt.min(t_final - t);
        let k1 = rhs(&u);
        let s: Vec<f64> = u.iter().zip(&k1).map(|(a, b)| a + 0.5 * dt * b).collect();
        let k2 = rhs(&s);
        let s: Vec<f64> = u.iter().zip(&k2).map(|(a, b)| a + 0.5 * dt * b).collect();
        let k3 = rhs(&s);
        let s: Vec<f64> = u.iter().zip(&k3).map(|(a, b)| a + dt * b).collect();
        let k4 = rhs(&s);
        for i in 0..n {
            u[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        t += dt;
    }
    u
}
