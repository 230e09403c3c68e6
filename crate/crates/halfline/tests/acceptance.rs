//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! The binary exits non-zero only when a criterion fails in a way that is not
//! the documented, expected outcome.

use std::f64::consts::{PI, SQRT_2};
use std::time::{Duration, Instant};

use halfline::asymptotics::{
    bbm_alpha, bbm_asymptotic, bbm_group_velocity, bbm_l3,
    boundary_curves, kdv_asymptotic, kdv_group_velocity, kdv_l1, kdv_l2, phase_diagram, Region,
};
use halfline::dispersion::{
    cardano_roots, characteristic_roots, companion_roots, critical_frequencies, group_velocity, quadratic_roots,
    Equation, Family, ModelCoefficients,
};
use halfline::dnmap::{boundary_derivative_series, dn_coefficients, FourierBoundary};
use halfline::fokas::{bbm_exact, bbm_neumann_exact, kdv_exact, kdv_neumann_exact, QuadratureConfig};
use halfline::modulation::modulation;
use halfline::oracle::{solve_at, OracleGrid};
use halfline::Error;
use num_complex::Complex64 as C64;
use rand::rngs::StdRng;
use rand::{RngExt, SeedableRng};

struct Outcome {
    pass: bool,
    detail: String,
    /// A FAIL that is documented and whose diagnosis was confirmed.
    expected_fail: bool,
}

fn ok(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail, expected_fail: false }
}

fn exact(eq: Equation, w: f64, x: f64, t: f64) -> f64 {
    match eq {
        Equation::Kdv => kdv_exact(x, t, w, &QuadratureConfig::kdv()).unwrap().value,
        Equation::Bbm => bbm_exact(x, t, w, &QuadratureConfig::bbm()).unwrap().value,
    }
}

fn asym(eq: Equation, w: f64, x: f64, t: f64) -> f64 {
    match eq {
        Equation::Kdv => kdv_asymptotic(w, x, t).unwrap().value,
        Equation::Bbm => bbm_asymptotic(w, x, t).unwrap().value,
    }
}

fn criterion_1() -> Outcome {
    let kdv = critical_frequencies(&ModelCoefficients::KDV).unwrap().omega_cr_plus;
    let bbm = critical_frequencies(&ModelCoefficients::BBM).unwrap().omega_cr_plus;
    let e1 = (kdv - 2.0 / (3.0 * 3f64.sqrt())).abs();
    let e2 = (bbm - 0.5).abs();
    ok(e1 <= 1e-12 && e2 <= 1e-12, format!("kdv {kdv} (err {e1:.1e}), bbm {bbm} (err {e2:.1e})"))
}

fn criterion_2() -> Outcome {
    let mut rng = StdRng::seed_from_u64(1_000);
    let mut worst_match: f64 = 0.0;
    let mut bad = 0usize;
    let mut skipped = 0usize;
    for family in [Family::LocalThirdOrder, Family::NonlocalSecondOrder] {
        let mut accepted = 0;
        while accepted < 1000 {
            let (r0, r1, r2) = (rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            let c = match family {
                Family::LocalThirdOrder => ModelCoefficients::new(0.0, r0, r1, r2, rng.random_range(-2.0..-0.2)),
                _ => ModelCoefficients::new(rng.random_range(0.2..2.0), r0, r1, r2, 0.0),
            }
            .unwrap();
            let n = [-3, -2, -1, 1, 2, 3][rng.random_range(0..6)];
            let w: f64 = rng.random_range(0.01..2.0);
            let [c3, c2, c1, c0] = c.characteristic_polynomial(n, w);
            let cr = critical_frequencies(&c).unwrap();
            let nw = n.unsigned_abs() as f64 * w;
            let near_cr = [cr.omega_cr_minus, cr.omega_cr_plus].iter().any(|v| (v.abs() - nw).abs() < 1e-6);
            let (closed, coeffs): (Vec<(C64, usize)>, Vec<f64>) = match family {
                Family::LocalThirdOrder => (cardano_roots(c3, c2, c1, c0), vec![c3, c2, c1, c0]),
                _ => (quadratic_roots(c2, c1, c0), vec![c2, c1, c0]),
            };
            let closed: Vec<C64> = closed.into_iter().flat_map(|(r, m)| std::iter::repeat(r).take(m)).collect();
            let sep = (0..closed.len())
                .flat_map(|i| (i + 1..closed.len()).map(move |j| (i, j)))
                .map(|(i, j)| (closed[i] - closed[j]).norm())
                .fold(f64::INFINITY, f64::min);
            if near_cr || sep < 1e-3 || (family == Family::NonlocalSecondOrder && c2.abs() < 1e-3) {
                skipped += 1;
                continue;
            }
            accepted += 1;
            let mut numeric = companion_roots(&coeffs).unwrap();
            for r in &closed {
                let (i, d) = numeric
                    .iter()
                    .enumerate()
                    .map(|(i, q)| (i, (q - r).norm() / (1.0 + r.norm())))
                    .min_by(|a, b| a.1.total_cmp(&b.1))
                    .unwrap();
                worst_match = worst_match.max(d);
                numeric.remove(i);
            }
            match characteristic_roots(&c, n, w) {
                Ok(set) => {
                    let k0 = set.k0();
                    let good = if k0.im == 0.0 { group_velocity(&c, k0).unwrap().re >= -1e-10 } else { k0.im > 0.0 };
                    if !good {
                        bad += 1;
                    }
                }
                Err(_) => bad += 1,
            }
        }
    }
    ok(
        worst_match <= 1e-8 && bad == 0,
        format!("2000 draws, worst closed-form/companion gap {worst_match:.1e}, selection failures {bad}, skipped near-degenerate {skipped}"),
    )
}

fn criterion_3() -> Outcome {
    let kdv_dn = dn_coefficients(&ModelCoefficients::KDV, &FourierBoundary::sine(0.375).unwrap()).unwrap();
    let kdv = |t: f64| {
        let q = kdv_neumann_exact(0.0, t, 0.375, &QuadratureConfig::kdv()).unwrap().value;
        let series = boundary_derivative_series(&kdv_dn, 1, t).re;
        assert!((series - 0.5 * (0.375 * t).cos()).abs() < 1e-14);
        (q - series).abs()
    };
    let bbm_dn = dn_coefficients(&ModelCoefficients::BBM, &FourierBoundary::sine(0.4).unwrap()).unwrap();
    let bbm = |t: f64| {
        let q = bbm_neumann_exact(0.0, t, 0.4, &QuadratureConfig::bbm()).unwrap().value;
        (q - boundary_derivative_series(&bbm_dn, 1, t).re).abs()
    };
    let (r100, r400, b200) = (kdv(100.0), kdv(400.0), bbm(200.0));
    ok(
        r100 <= 0.02 && r400 <= r100 / 2.0 && b200 <= 0.1,
        format!(
            "target +0.5cos(0.375t); kdv residual {r100:.2e} at t=100, {r400:.2e} at t=400 (drop {:.1}x); bbm {b200:.2e} at t=200",
            r100 / r400
        ),
    )
}

/// Max |exact − leading order| over one wavelength centred on `ξt`.
fn region_one_residual(eq: Equation, w: f64, k0: f64, xi: f64, t: f64) -> f64 {
    let lam = 2.0 * PI / k0;
    (0..32)
        .map(|i| xi * t + lam * (i as f64 / 32.0 - 0.5))
        .map(|x| (exact(eq, w, x, t) - asym(eq, w, x, t)).abs())
        .fold(0.0, f64::max)
}

fn criterion_4() -> Outcome {
    let target = 1.0 / SQRT_2;
    let mut pass = true;
    let mut detail = Vec::new();
    for (eq, w) in [(Equation::Kdv, 0.375), (Equation::Bbm, 0.4)] {
        let r: Vec<f64> = [200.0, 400.0, 800.0].iter().map(|&t| region_one_residual(eq, w, 0.5, 0.1, t)).collect();
        let ratios = [r[1] / r[0], r[2] / r[1]];
        pass &= ratios.iter().all(|q| (q - target).abs() <= 0.25 * target);
        detail.push(format!("{} ratios {:.3}, {:.3}", eq.name(), ratios[0], ratios[1]));
    }
    ok(pass, format!("{} (target 0.707 within 25%)", detail.join("; ")))
}

/// Least-squares fit `exact ≈ P(c₁cos θ + c₂sin θ)` over one local
/// wavelength; returns `√(c₁² + c₂²)`.
fn amplitude_ratio(eq: Equation, w: f64, xi0: f64, t: f64, parts: impl Fn(f64) -> (f64, f64)) -> f64 {
    let k = match eq {
        Equation::Kdv => ((1.0 - xi0) / 3.0).sqrt(),
        Equation::Bbm => {
            let big = (8.0 * xi0 + 1.0).sqrt();
            ((3.0 - big) / (big + 1.0)).sqrt()
        }
    };
    let lam = 2.0 * PI / k;
    let (mut a, mut r) = ([[0.0; 2]; 2], [0.0; 2]);
    for i in 0..64 {
        let x = xi0 * t + lam * (i as f64 / 64.0 - 0.5);
        let (p, th) = parts(x);
        let phi = [p * th.cos(), p * th.sin()];
        let e = exact(eq, w, x, t);
        for u in 0..2 {
            r[u] += phi[u] * e;
            for v in 0..2 {
                a[u][v] += phi[u] * phi[v];
            }
        }
    }
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    let c1 = (r[0] * a[1][1] - r[1] * a[0][1]) / det;
    let c2 = (a[0][0] * r[1] - a[1][0] * r[0]) / det;
    c1.hypot(c2)
}

fn criterion_5() -> Outcome {
    let t = 800.0;
    let mut printed = Vec::new();
    let mut corrected = Vec::new();
    for (eq, w, xi) in [(Equation::Kdv, 0.375, 0.5), (Equation::Bbm, 0.4, 0.6)] {
        let r = amplitude_ratio(eq, w, xi, t, |x| {
            let s = modulation(eq, w, x / t).unwrap();
            (s.amplitude_at(t), s.phase_at(x, t))
        });
        printed.push((eq, r));
        corrected.push((eq, r / SQRT_2));
    }
    let pass = printed.iter().all(|(_, r)| (r - 1.0).abs() <= 0.05);
    let diagnosed = corrected.iter().all(|(_, r)| (r - 1.0).abs() <= 0.05);
    let fmt = |v: &[(Equation, f64)]| v.iter().map(|(e, r)| format!("{} {r:.4}", e.name())).collect::<Vec<_>>().join(", ");
    Outcome {
        pass,
        detail: format!(
            "exact/printed amplitude at t=800: {} (target 1 within 5%); the printed saddle term omits the (1+i) \
             Jacobian; against the restored sqrt(2) prefactor the ratio is {}",
            fmt(&printed),
            fmt(&corrected)
        ),
        expected_fail: !pass && diagnosed,
    }
}

fn criterion_6() -> Outcome {
    let xi = 4.0;
    let slope = |f: &dyn Fn(f64) -> f64| (f(20.0).abs().ln() - f(10.0).abs().ln()) / 10.0;
    // The t^{-1/2} prefactor adds ln(1/2)/(2·10) to the raw slope.
    let prefactor = 0.5f64.ln() / 20.0;
    let mut pass = true;
    let mut detail = Vec::new();
    for (eq, w, rate) in [
        (Equation::Kdv, 0.375, 2.0 / 9.0 * (3.0 * xi - 3.0f64).sqrt() * (xi - 1.0)),
        (Equation::Bbm, 0.4, bbm_alpha(xi)),
    ] {
        let formula = slope(&|t| asym(eq, w, xi * t, t)) - prefactor;
        let identity = (formula + rate).abs();
        let ex = slope(&|t| {
            let cfg = match eq {
                Equation::Kdv => QuadratureConfig::kdv(),
                Equation::Bbm => QuadratureConfig::bbm(),
            }
            .with_tolerances(1e-10, 0.0);
            match eq {
                Equation::Kdv => kdv_exact(xi * t, t, w, &cfg).unwrap().value,
                Equation::Bbm => bbm_exact(xi * t, t, w, &cfg).unwrap().value,
            }
        });
        let rel = (ex + rate).abs() / rate;
        if eq == Equation::Kdv {
            pass &= (rate - 2.0).abs() <= 1e-12;
        }
        pass &= identity <= 1e-12 && rel <= 0.1;
        detail.push(format!(
            "{} rate {rate:.6}, formula slope error {identity:.1e}, exact slope {ex:.4} ({:.1}% off)",
            eq.name(),
            100.0 * rel
        ));
    }
    ok(pass, detail.join("; "))
}

fn criterion_7() -> Outcome {
    let (w, t0) = (1.0, 100.0);
    let period = 2.0 * PI / w;
    let n = 32;
    let xs: Vec<f64> = (0..=13).map(|i| 0.2 + 0.1 * i as f64).collect();
    let logs: Vec<f64> = xs
        .iter()
        .map(|&x| {
            let (mut c, mut s) = (0.0, 0.0);
            for i in 0..n {
                let t = t0 + period * i as f64 / n as f64;
                let u = exact(Equation::Bbm, w, x, t);
                c += u * (w * t).cos();
                s += u * (w * t).sin();
            }
            (2.0 / n as f64 * c.hypot(s)).ln()
        })
        .collect();
    let (mx, my) = (xs.iter().sum::<f64>() / xs.len() as f64, logs.iter().sum::<f64>() / logs.len() as f64);
    let slope = xs.iter().zip(&logs).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
        / xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
    let target = -(3f64.sqrt()) / 2.0;
    let rel = (slope - target).abs() / target.abs();
    ok(rel <= 0.05, format!("fitted slope {slope:.5}, target {target:.5} ({:.2}% off)", 100.0 * rel))
}

fn criterion_8() -> Outcome {
    let times = [5.0, 10.0, 20.0];
    let mut worst: f64 = 0.0;
    let mut detail = Vec::new();
    for (eq, ws) in [(Equation::Kdv, [0.375, 1.0]), (Equation::Bbm, [0.4, 1.0])] {
        let grid = OracleGrid::for_horizon(eq, 20.0).unwrap();
        for w in ws {
            let snaps = solve_at(w, &grid, &times).unwrap();
            let mut err: f64 = 0.0;
            for s in &snaps {
                let (mut e, mut m): (f64, f64) = (0.0, 0.0);
                for i in 0..=60 {
                    let x = 0.25 * i as f64;
                    let v = exact(eq, w, x, s.t);
                    e = e.max((s.value_at(x) - v).abs());
                    m = m.max(v.abs());
                }
                err = err.max(e / m);
            }
            worst = worst.max(err);
            detail.push(format!("{} {w}: {err:.1e}", eq.name()));
        }
    }
    ok(worst <= 1e-3, format!("relative Linf on x in [0,15], t in {{5,10,20}}: {}", detail.join(", ")))
}

fn adjacency(eq: Equation) -> Vec<(Region, Region, usize)> {
    let n = 100;
    let cells = phase_diagram(eq, (0.0, 1.2), (0.0, 2.0), n, n);
    let label = |i: usize, j: usize| cells[i * n + j].2.as_ref().ok().map(|l| l.region);
    let mut pairs: std::collections::BTreeMap<(Region, Region), usize> = Default::default();
    for i in 0..n {
        for j in 0..n {
            for (di, dj) in [(1, 0), (0, 1)] {
                let (a, b) = (i + di, j + dj);
                if a >= n || b >= n {
                    continue;
                }
                if let (Some(p), Some(q)) = (label(i, j), label(a, b)) {
                    if p != q {
                        *pairs.entry((p.min(q), p.max(q))).or_default() += 1;
                    }
                }
            }
        }
    }
    pairs.into_iter().map(|((a, b), c)| (a, b, c)).collect()
}

/// Whether grid interfaces between `a` and `b` straddle the zero set of `f`,
/// apart from those that straddle `ω₀ = ω_cr`; at least one must straddle `f`.
fn straddles(eq: Equation, a: Region, b: Region, f: impl Fn(f64, f64) -> f64) -> bool {
    let wcr = eq.omega_cr();
    let n = 100;
    let cells = phase_diagram(eq, (0.0, 1.2), (0.0, 2.0), n, n);
    let get = |i: usize, j: usize| &cells[i * n + j];
    let mut seen = false;
    for i in 0..n {
        for j in 0..n {
            for (di, dj) in [(1, 0), (0, 1)] {
                let (p, q) = (i + di, j + dj);
                if p >= n || q >= n {
                    continue;
                }
                let (c0, c1) = (get(i, j), get(p, q));
                let (Ok(l0), Ok(l1)) = (&c0.2, &c1.2) else { continue };
                let pair = (l0.region, l1.region);
                if pair == (a, b) || pair == (b, a) {
                    if f(c0.0, c0.1).signum() != f(c1.0, c1.1).signum() {
                        seen = true;
                    } else if (c0.0 - wcr).signum() == (c1.0 - wcr).signum() {
                        return false;
                    }
                }
            }
        }
    }
    seen
}

fn anchor_gap(eq: Equation, w0: f64, xi0: f64) -> f64 {
    let curve = boundary_curves(eq, 1.2, 2.0, 1200).into_iter().find(|c| c.name == "group_velocity").unwrap();
    curve
        .points
        .windows(2)
        .find(|p| p[0].0 <= w0 && w0 <= p[1].0)
        .map(|p| {
            let s = (w0 - p[0].0) / (p[1].0 - p[0].0);
            (p[0].1 + s * (p[1].1 - p[0].1) - xi0).abs()
        })
        .unwrap_or(f64::INFINITY)
}

fn criterion_9() -> Outcome {
    use Region::*;
    let kdv_expected = vec![
        (I, IIa), (I, IIb), (I, III), (I, IVa), (IIa, IIb), (IIa, IVa),
        (IIb, III), (IIb, IVb), (III, IVb), (III, IVc), (IVa, IVb), (IVb, IVc),
    ];
    let bbm_expected = vec![(I, II), (I, IVa), (II, III), (II, IVa), (II, IVb), (III, IVa), (IVa, IVb)];
    let kdv: Vec<(Region, Region)> = adjacency(Equation::Kdv).into_iter().map(|(a, b, _)| (a, b)).collect();
    let bbm: Vec<(Region, Region)> = adjacency(Equation::Bbm).into_iter().map(|(a, b, _)| (a, b)).collect();
    let shared = [
        straddles(Equation::Kdv, I, IIa, |w, x| x - kdv_group_velocity(w)),
        straddles(Equation::Bbm, I, II, |w, x| x - bbm_group_velocity(w)),
        straddles(Equation::Kdv, IIb, III, |w, x| kdv_l1(x, w)),
        straddles(Equation::Bbm, II, III, |w, x| bbm_l3(x, w)),
        straddles(Equation::Kdv, IVb, IVc, |w, x| kdv_l2(x, w)),
        straddles(Equation::Bbm, IVa, IVb, |w, x| x - 2.0 * w * w),
    ];
    let gaps = [anchor_gap(Equation::Kdv, 0.375, 0.25), anchor_gap(Equation::Bbm, 0.4, 0.48)];
    let pass = kdv == kdv_expected && bbm == bbm_expected && shared.iter().all(|s| *s) && gaps.iter().all(|g| *g < 1e-5);
    let show = |v: &[(Region, Region)]| v.iter().map(|(a, b)| format!("{a}/{b}")).collect::<Vec<_>>().join(" ");
    ok(
        pass,
        format!(
            "kdv adjacencies [{}], bbm [{}]; shared curves {:?}; anchor gaps {:.1e}, {:.1e}",
            show(&kdv),
            show(&bbm),
            shared,
            gaps[0],
            gaps[1]
        ),
    )
}

fn criterion_10() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for eq in [Equation::Kdv, Equation::Bbm] {
        for frac in [0.1, 0.4, 0.7, 0.95] {
            let w = frac * eq.omega_cr();
            for j in 1..40 {
                let xi = j as f64 / 40.0;
                for t in [10.0, 100.0, 1000.0] {
                    match modulation(eq, w, xi) {
                        Ok(s) => {
                            worst = worst.max((s.reconstruct(xi * t, t) - asym(eq, w, xi * t, t)).abs());
                            count += 1;
                        }
                        Err(Error::AtGroupVelocity) => {}
                        Err(e) => panic!("{e}"),
                    }
                }
            }
        }
    }
    ok(worst <= 1e-10, format!("{count} points, max difference {worst:.1e}"))
}

fn main() {
    let criteria: [(fn() -> Outcome, Duration); 10] = [
        (criterion_1, Duration::from_secs(1)),
        (criterion_2, Duration::from_secs(5)),
        (criterion_3, Duration::from_secs(60)),
        (criterion_4, Duration::from_secs(120)),
        (criterion_5, Duration::from_secs(120)),
        (criterion_6, Duration::from_secs(120)),
        (criterion_7, Duration::from_secs(60)),
        (criterion_8, Duration::from_secs(180)),
        (criterion_9, Duration::from_secs(60)),
        (criterion_10, Duration::from_secs(1)),
    ];
    let mut unexpected = 0;
    for (i, (run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = run();
        let took = start.elapsed();
        let pass = out.pass && took <= *budget;
        let note = if !pass && out.expected_fail { " [known, documented]" } else { "" };
        println!(
            "criterion {:>2} {}: {} ({:.2}s of {}s){note}",
            i + 1,
            if pass { "PASS" } else { "FAIL" },
            out.detail,
            took.as_secs_f64(),
            budget.as_secs()
        );
        if !pass && !out.expected_fail {
            unexpected += 1;
        }
    }
    if unexpected > 0 {
        eprintln!("{unexpected} criteria failed unexpectedly");
        std::process::exit(1);
    }
}
