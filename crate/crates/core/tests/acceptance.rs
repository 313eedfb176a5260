//! Acceptance criteria 1-10. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use slmaster::cfunc::{self, CMethod};
use slmaster::master::{self, SymbolFunction};
use slmaster::model::build_model;
use slmaster::quad::composite_rule;
use slmaster::sinetype::{self, build_sinetype, Branch, SineTypeData, TailLaw};
use slmaster::spectrum::{eigenfunction_values, solve_eigen};
use statrs::function::gamma::ln_gamma;
use std::f64::consts::{FRAC_PI_2, PI};
use std::process::Command;
use std::time::{Duration, Instant};

type Outcome = Result<(bool, String), Box<dyn std::error::Error>>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// max|√ν_n − (2n+1+α+β) + Θ/(4n)|·n² over 10 ≤ n ≤ 60 at the first verified
/// build was 0.15067; the frozen bound is that times 1.5.
const ASYMPTOTE_BASELINE: f64 = 0.15067 * 1.5;

fn criterion_1() -> Outcome {
    let mut worst = 0.0f64;
    let mut slowest = Duration::ZERO;
    for (a, b) in [(1.0, 1.0), (0.5, 0.5), (1.5, 0.5)] {
        let start = Instant::now();
        let m = build_model(a, b, &[], 16)?;
        let d = solve_eigen(&m, 20, 1e-13)?;
        slowest = slowest.max(start.elapsed());
        let rho = a + b + 1.0;
        for (n, nu) in d.nus.iter().enumerate() {
            let exact = (2.0 * n as f64 + rho).powi(2) - a * a - b * b + 0.5;
            worst = worst.max((nu - exact).abs() / exact.abs());
        }
    }
    let pass = worst < 1e-8 && slowest < Duration::from_secs(30);
    Ok((pass, format!("max rel err {worst:.2e}, slowest case {slowest:.2?}")))
}

/// Jacobi P_n^{(a,b)}(x), n = 0..=n_max, by the three-term recurrence.
fn jacobi(n_max: usize, a: f64, b: f64, x: f64) -> Vec<f64> {
    let mut p = vec![1.0, (a + 1.0) + (a + b + 2.0) * (x - 1.0) / 2.0];
    for n in 2..=n_max {
        let nf = n as f64;
        let s = 2.0 * nf + a + b;
        let c1 = 2.0 * nf * (nf + a + b) * (s - 2.0);
        let c2 = (s - 1.0) * (s * (s - 2.0) * x + a * a - b * b);
        let c3 = 2.0 * (nf + a - 1.0) * (nf + b - 1.0) * s;
        p.push((c2 * p[n - 1] - c3 * p[n - 2]) / c1);
    }
    p.truncate(n_max + 1);
    p
}

fn criterion_2() -> Outcome {
    let (a, b) = (1.0, 1.0);
    let m = build_model(a, b, &[], 16)?;
    let d = solve_eigen(&m, 8, 1e-13)?;
    let (xs, ws) = composite_rule(0.0, FRAC_PI_2, 16, 24, (false, false), 0);
    let weight = |t: f64| t.sin().powf(2.0 * a + 1.0) * t.cos().powf(2.0 * b + 1.0);
    let polys: Vec<Vec<f64>> = xs.iter().map(|t| jacobi(8, a, b, (2.0 * t).cos())).collect();
    let mut worst = 0.0f64;
    for n in 0..=8 {
        let nf = n as f64;
        // ∫_{-1}^{1} P_n² (1−x)^a (1+x)^b dx = 2^{a+b+2} ∫_0^{π/2} P_n(cos 2t)² Ã dt
        let h = ((a + b + 1.0) * 2f64.ln() + ln_gamma(nf + a + 1.0) + ln_gamma(nf + b + 1.0)
            - ln_gamma(nf + a + b + 1.0)
            - ln_gamma(nf + 1.0))
        .exp()
            / (2.0 * nf + a + b + 1.0);
        let norm = (h / 2f64.powf(a + b + 2.0)).sqrt();
        let psi = eigenfunction_values(&d, &m, n, &xs)?;
        let dist2: f64 = (0..xs.len())
            .map(|k| ws[k] * weight(xs[k]) * (psi[k] - polys[k][n] / norm).powi(2))
            .sum();
        worst = worst.max(dist2.sqrt());
    }
    Ok((worst < 1e-6, format!("max L2 distance {worst:.2e} for n <= 8")))
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let m = build_model(1.0, 1.0, &[2.0], 16)?;
    let d = solve_eigen(&m, 60, 1e-13)?;
    let mut worst = 0.0f64;
    for n in 10..=60 {
        let nf = n as f64;
        let r = (d.nus[n].sqrt() - (2.0 * nf + 1.0 + m.alpha + m.beta) + m.theta / (4.0 * nf)).abs() * nf * nf;
        worst = worst.max(r);
    }
    let el = start.elapsed();
    let pass = worst < ASYMPTOTE_BASELINE && el < Duration::from_secs(120);
    Ok((
        pass,
        format!("max residual*n^2 {worst:.5} (bound {ASYMPTOTE_BASELINE:.5}, Θρ0/8 = {:.5}), {el:.2?}", m.theta * m.rho0 / 8.0),
    ))
}

/// Γ_1..Γ_3 as displayed, for B'/B = Σ 2 b_j e^{−jt}.
fn closed_form_gammas(alpha: f64, beta: f64, bj: [f64; 4], rho: f64, l: Complex64) -> [Complex64; 3] {
    let i = Complex64::i();
    let il = i * l;
    let g0 = c(1.0, 0.0);
    let g1 = -2.0 * bj[1] * (il - rho) / (1.0 - 2.0 * il) * g0;
    let k2 = 2.0 * alpha - 2.0 * beta + bj[2];
    let g2 = (-2.0 * k2 * (il - rho) * g0 - 2.0 * bj[1] * (il - rho - 1.0) * g1) / (4.0 * (1.0 - il));
    let g3 = (-2.0 * k2 * (il - rho - 1.0) * g1 - 2.0 * bj[3] * (il - rho) * g0 - 2.0 * bj[1] * (il - rho - 2.0) * g2)
        / (3.0 * (3.0 - 2.0 * il));
    [g1, g2, g3]
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let m = build_model(1.0, 1.0, &[2.0], 16)?;
    let mut worst = 0.0f64;
    let rel = |x: Complex64, y: Complex64| (x - y).norm() / y.norm().max(1e-300);
    for _ in 0..20 {
        let l = c(rng.gen_range(-8.0..8.0), rng.gen_range(-3.0..3.0));
        // model coefficients (odd b_j vanish for this family)
        let series = cfunc::gamma_coeffs(&m, l, 3)?;
        let b = &m.exp_coeffs;
        let want = closed_form_gammas(m.alpha, m.beta, [b[0], b[1], b[2], b[3]], m.rho, l);
        for k in 0..3 {
            worst = worst.max(rel(series.coeffs[k + 1], want[k]));
        }
        // generic coefficients with odd terms, through the same recursion
        let (al, be) = (rng.gen_range(-0.4..2.0), rng.gen_range(-0.4..2.0));
        let bj = [rng.gen_range(0.0..2.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let rho = al + be + 1.0 + bj[0];
        let a = [2.0 * rho, 2.0 * bj[1], 2.0 * (2.0 * al - 2.0 * be + bj[2]), 2.0 * bj[3]];
        let got = cfunc::gamma_recursion(&a, rho, l, 3);
        let want = closed_form_gammas(al, be, bj, rho, l);
        for k in 0..3 {
            worst = worst.max(rel(got[k + 1], want[k]));
        }
    }
    Ok((worst < 1e-12, format!("max rel diff {worst:.2e} over 20 random λ (model and generic coefficients)")))
}

fn criterion_5() -> Outcome {
    let mut worst_methods = 0.0f64;
    let mut worst_tstar = 0.0f64;
    for roots in [vec![], vec![2.0]] {
        let m = build_model(1.0, 1.0, &roots, 16)?;
        for k in 1..=20 {
            let l = c(0.5 * k as f64, -0.2);
            let w = cfunc::eval_c(&m, l, CMethod::Wronskian)?.value;
            let lim = cfunc::eval_c(&m, l, CMethod::Limit)?.value;
            worst_methods = worst_methods.max((w - lim).norm() / w.norm());
            let vals: Vec<Complex64> = (3..=8)
                .map(|t| cfunc::eval_c_at(&m, l, t as f64, 1e-12).map(|v| v.value))
                .collect::<Result<_, _>>()?;
            for v in &vals {
                worst_tstar = worst_tstar.max((v - vals[0]).norm() / vals[0].norm());
            }
        }
    }
    let pass = worst_methods < 1e-5 && worst_tstar < 1e-8;
    Ok((pass, format!("Wronskian vs limit {worst_methods:.2e}, t* spread {worst_tstar:.2e}")))
}

/// Slope of ln y against ln x by least squares.
fn log_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0.ln(), a.1 + p.1.ln()));
    let (num, den) = pts.iter().fold((0.0, 0.0), |a, p| {
        let dx = p.0.ln() - sx / n;
        (a.0 + dx * (p.1.ln() - sy / n), a.1 + dx * dx)
    });
    num / den
}

fn criterion_6() -> Outcome {
    let mut notes = Vec::new();
    let mut pass = true;

    // Euler product against sinh
    let mus: Vec<f64> = (1..=50).map(|k| k as f64).collect();
    let synth = SineTypeData::new(&mus, 1, Branch::Generic, TailLaw { sigma: 1.0, offset: 1.0, k1: 0.0 }, 400)?;
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut euler = 0.0f64;
    for _ in 0..20 {
        let r = 2.0 * rng.gen::<f64>().sqrt();
        let th = rng.gen_range(0.0..2.0 * PI);
        let z = Complex64::from_polar(r, th);
        let exact = (PI * z).sinh();
        euler = euler.max((synth.sine_s(z) - exact).norm() / exact.norm().max(1.0));
    }
    pass &= euler < 1e-10;
    notes.push(format!("sinh {euler:.1e}"));

    // residues: dual method, growth of |d_n|/(ν_n + ρ²), and the S_1 envelope
    let mut dual = 0.0f64;
    for roots in [vec![], vec![2.0]] {
        let m = build_model(1.0, 1.0, &roots, 16)?;
        let d = solve_eigen(&m, 60, 1e-13)?;
        let s = build_sinetype(&m, &d, 400)?;
        let mut pts = Vec::new();
        for n in 0..=60 {
            let (a, b) = sinetype::residue_pair(&s, n)?;
            dual = dual.max((a - b).norm() / a.norm());
            if n >= 5 {
                pts.push((n as f64, a.norm() / (d.nus[n] + m.rho * m.rho)));
            }
        }
        // bounded ratio means no power growth in n
        let slope = log_slope(&pts);
        pass &= slope.abs() < 0.1;
        notes.push(format!(
            "roots={roots:?}: |d_n|/(ν_n+ρ²) from {:.2} (n=5) to {:.2} (n=60), growth exponent {slope:.2}",
            pts[0].1,
            pts[pts.len() - 1].1
        ));
        let env = sinetype::s1_envelope(&s, 30.0, 3.0);
        // printed envelope |z|² e^{−π|x|/2}: fitted power must be 2
        pass &= (env.fitted_exponent - 2.0).abs() < 0.25 && env.ratio_min > 0.0;
        notes.push(format!(
            "envelope power {:.2} (ρ0 = {}), printed ratio in [{:.2e}, {:.2e}]",
            env.fitted_exponent, m.rho0, env.ratio_min, env.ratio_max
        ));
    }
    pass &= dual < 1e-7;
    notes.push(format!("dual-method {dual:.1e}"));

    // the same checks where ρ0 = 2
    let m = build_model(0.5, 0.5, &[], 16)?;
    let d = solve_eigen(&m, 60, 1e-13)?;
    let s = build_sinetype(&m, &d, 400)?;
    let pts: Vec<(f64, f64)> = (5..=60)
        .map(|n| Ok((n as f64, sinetype::residue_d(&s, n)?.norm() / (d.nus[n] + m.rho * m.rho))))
        .collect::<Result<_, slmaster::error::Error>>()?;
    let env = sinetype::s1_envelope(&s, 30.0, 3.0);
    notes.push(format!(
        "(info) α=β=½: growth exponent {:.2}, envelope power {:.2}",
        log_slope(&pts),
        env.fitted_exponent
    ));
    Ok((pass, notes.join("; ")))
}

fn t_grid() -> Vec<f64> {
    (1..=9).map(|k| 0.05 * k as f64).collect()
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let ts = t_grid();
    let zs: Vec<Complex64> = ts.iter().map(|t| c(0.0, *t)).collect();
    let ls: Vec<f64> = (1..=12).map(|k| 0.5 * k as f64).collect();
    let a = SymbolFunction::exp_shift(1.0)?;
    let tol = 1e-6;
    let mut route = 0.0f64;
    let mut fwd = 0.0f64;
    for roots in [vec![], vec![2.0]] {
        let m = build_model(1.0, 1.0, &roots, 16)?;
        let d = solve_eigen(&m, 40, 1e-13)?;
        let s = build_sinetype(&m, &d, 400)?;
        let mut routes = vec![master::series_reconstruct_many(&m, &d, &s, &a, &zs, tol * 1e-2)?.values];
        for sigma in [0.0, 0.1, 0.2] {
            routes.push(master::contour_reconstruct_many(&m, &s, &a, &ts, sigma, tol)?);
        }
        routes.push(master::realline_reconstruct_many(&m, &s, &a, &ts, tol)?);
        for k in 0..ts.len() {
            for i in 0..routes.len() {
                for j in i + 1..routes.len() {
                    route = route.max((routes[i][k] - routes[j][k]).norm());
                }
            }
        }
        for f in master::forward_transform(&m, &s, &a, &ls, tol)? {
            fwd = fwd.max(f.residual / (1.0 + f.rhs.norm()));
        }
    }
    let el = start.elapsed();
    let pass = route < 2e-5 && fwd < 1e-4 && el < Duration::from_secs(600);
    Ok((pass, format!("max pairwise route diff {route:.2e}, max forward residual {fwd:.2e}, {el:.2?}")))
}

fn criterion_8() -> Outcome {
    let m = build_model(-0.25, 1.0, &[], 16)?;
    let d = solve_eigen(&m, 40, 1e-13)?;
    let s = build_sinetype(&m, &d, 400)?;
    let a = SymbolFunction::exp_shift(1.0)?;
    let r = master::reconstruct_general(&m, &d, &s, &a, &t_grid(), 0.1, 1e-6)?;
    let worst = r.route_discrepancies.iter().cloned().fold(0.0, f64::max);
    Ok((
        worst < 5e-5,
        format!("contour+corrections vs series {:.2e}, m0 = {}, n0 = {}", r.route_discrepancies[0], d.m0, d.n0),
    ))
}

fn criterion_9() -> Outcome {
    let m = build_model(1.0, 1.0, &[2.0], 16)?;
    let d = solve_eigen(&m, 60, 1e-13)?;
    let s = build_sinetype(&m, &d, 400)?;
    let a = SymbolFunction::vanishing(1.0, &s.mus[..40])?;
    let mut zs: Vec<Complex64> = t_grid().iter().map(|t| c(0.0, *t)).collect();
    zs.extend(t_grid().iter().map(|t| c(*t, 0.0)));
    let r = master::series_reconstruct_many(&m, &d, &s, &a, &zs, 1e-9)?;
    let worst = r.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    // |a| = 1 on the real line, so the contour route vanishing is not automatic
    let con = master::contour_reconstruct_many(&m, &s, &a, &t_grid(), 0.1, 1e-8)?;
    let cw = con.iter().map(|v| v.norm()).fold(0.0, f64::max);
    Ok((worst < 1e-6, format!("series max |f| {worst:.2e} over {} terms; contour route max |f| {cw:.2e}", r.terms)))
}

fn criterion_10() -> Outcome {
    let dir = tempfile::tempdir()?;
    let baseline = dir.path().join("baseline.json");
    let bin = env!("CARGO_BIN_EXE_slmaster");
    let mut lines = Vec::new();
    let mut pass = true;
    for round in ["write", "compare"] {
        let out = Command::new(bin).arg("regress").arg("--baseline").arg(&baseline).output()?;
        let stdout = String::from_utf8_lossy(&out.stdout).to_string();
        let code = out.status.code().unwrap_or(-1);
        let fails = stdout.lines().filter(|l| l.starts_with("FAIL")).count();
        let passes = stdout.lines().filter(|l| l.starts_with("PASS")).count();
        for key in ["phi_evenness", "phi_conjugation", "phi_residual", "gram_orthonormality", "b_oddness", "sigma_independence"] {
            pass &= stdout.lines().any(|l| l.starts_with("PASS") && l.contains(key));
        }
        pass &= code == 0 && fails == 0;
        lines.push(format!("{round}: exit {code}, {passes} pass, {fails} fail"));
    }
    pass &= baseline.exists();
    Ok((pass, lines.join("; ")))
}

fn main() {
    let criteria: Vec<(u32, fn() -> Outcome)> = vec![
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
        (10, criterion_10),
    ];
    let mut failed = 0;
    for (id, f) in criteria {
        let start = Instant::now();
        let (pass, detail) = match f() {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failed += 1;
        }
        println!(
            "criterion {id:>2}: {} ({detail}) [{:.1?}]",
            if pass { "PASS" } else { "FAIL" },
            start.elapsed()
        );
    }
    println!("acceptance: {} of 10 criteria pass", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
