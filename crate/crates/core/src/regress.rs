//! Headless property suite and golden values for `slmaster regress`.

use crate::error::{Error, Result};
use crate::master::{self, SymbolFunction};
use crate::model::{build_model, Model};
use crate::phi;
use crate::quad::composite_rule;
use crate::sinetype::{self, build_sinetype};
use crate::spectrum::{eigenfunction_values, solve_eigen};
use crate::cfunc::{self, CMethod};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;

#[derive(Debug, Clone, Serialize)]
pub struct PropertyOutcome {
    pub name: String,
    pub pass: bool,
    /// worst observed value of the checked quantity
    pub worst: f64,
    pub tolerance: f64,
}

fn outcome(name: &str, worst: f64, tolerance: f64) -> PropertyOutcome {
    PropertyOutcome {
        name: name.into(),
        pass: worst <= tolerance,
        worst,
        tolerance,
    }
}

fn lambdas() -> Vec<Complex64> {
    vec![
        Complex64::new(0.7, 0.0),
        Complex64::new(2.5, -0.3),
        Complex64::new(-1.2, 0.8),
        Complex64::new(0.0, 1.5),
        Complex64::new(6.0, 0.4),
    ]
}

const TS: [f64; 5] = [0.05, 0.4, 1.3, 3.0, 7.0];

/// φ_{−λ} = φ_λ and φ_{λ̄} = conj φ_λ, relative to max |φ|.
pub fn phi_symmetries(model: &Model) -> Result<(f64, f64)> {
    let mut even = 0.0f64;
    let mut conj = 0.0f64;
    for l in lambdas() {
        let a = phi::eval_phi_nodes(model, l, &TS, 1e-12)?.values;
        let b = phi::eval_phi_nodes(model, -l, &TS, 1e-12)?.values;
        let c = phi::eval_phi_nodes(model, l.conj(), &TS, 1e-12)?.values;
        for k in 0..TS.len() {
            let s = a[k].norm().max(1e-300);
            even = even.max((a[k] - b[k]).norm() / s);
            conj = conj.max((a[k].conj() - c[k]).norm() / s);
        }
    }
    Ok((even, conj))
}

/// |φ'' + (A'/A)φ' + (λ² + ρ²)φ| / (|λ² + ρ²| max|φ|), φ'' by differencing φ'.
pub fn phi_residual(model: &Model) -> Result<f64> {
    let mut worst = 0.0f64;
    for l in lambdas() {
        let kappa = l * l + model.rho * model.rho;
        for &t in &TS {
            let h = 1e-3 * t.max(0.1);
            let pts = [t - 2.0 * h, t - h, t, t + h, t + 2.0 * h];
            let e = phi::eval_phi_nodes(model, l, &pts, 1e-13)?;
            let d = &e.derivs;
            let dd = (d[0] - 8.0 * d[1] + 8.0 * d[3] - d[4]) / (12.0 * h);
            let r = dd + model.logderiv_a_real(t) * d[2] + kappa * e.values[2];
            let scale = kappa.norm() * e.values[2].norm() + d[2].norm() / t;
            worst = worst.max(r.norm() / scale);
        }
    }
    Ok(worst)
}

/// max |∫ Ψ_m Ψ_n Ã − δ_mn| over m, n ≤ n_max.
pub fn gram_error(model: &Model, n_max: usize) -> Result<f64> {
    let data = solve_eigen(model, n_max, 1e-13)?;
    let (xs, ws) = composite_rule(0.0, FRAC_PI_2, 16, 24, (true, true), 10);
    let vals: Vec<Vec<f64>> = (0..=n_max)
        .map(|n| eigenfunction_values(&data, model, n, &xs))
        .collect::<Result<_>>()?;
    let wt: Vec<f64> = xs.iter().zip(&ws).map(|(x, w)| w * model.a_tilde(*x)).collect();
    let mut worst = 0.0f64;
    for m in 0..=n_max {
        for n in m..=n_max {
            let g: f64 = (0..xs.len()).map(|k| wt[k] * vals[m][k] * vals[n][k]).sum();
            let target = if m == n { 1.0 } else { 0.0 };
            worst = worst.max((g - target).abs());
        }
    }
    Ok(worst)
}

/// |b(λ) + b(−λ)| / |b(λ)|.
pub fn b_oddness(model: &Model) -> Result<f64> {
    let data = solve_eigen(model, 30, 1e-13)?;
    let sine = build_sinetype(model, &data, 400)?;
    let mut worst = 0.0f64;
    for l in [Complex64::new(0.5, 0.0), Complex64::new(3.0, -0.2), Complex64::new(1.5, 0.3), Complex64::new(7.0, 0.1)] {
        let bp = sinetype::b_eval(model, &sine, l)?;
        let bm = sinetype::b_eval(model, &sine, -l)?;
        worst = worst.max((bp + bm).norm() / bp.norm());
    }
    Ok(worst)
}

/// Spread of the contour route over five σ in (0, δ).
pub fn sigma_spread(model: &Model, tol: f64) -> Result<f64> {
    let data = solve_eigen(model, 30, 1e-13)?;
    let sine = build_sinetype(model, &data, 400)?;
    let a = SymbolFunction::exp_shift(1.0)?;
    let ts = [0.1, 0.3, 0.45];
    let runs: Vec<Vec<Complex64>> = [0.05, 0.1, 0.15, 0.2, 0.25]
        .iter()
        .map(|s| master::contour_reconstruct_many(model, &sine, &a, &ts, *s, tol))
        .collect::<Result<_>>()?;
    let mut worst = 0.0f64;
    for r in &runs[1..] {
        for k in 0..ts.len() {
            worst = worst.max((r[k] - runs[0][k]).norm());
        }
    }
    Ok(worst)
}

/// The property suite on the α = β = 1 models with and without roots=[2].
pub fn run_properties() -> Result<Vec<PropertyOutcome>> {
    let mut out = Vec::new();
    for (label, roots) in [("jacobi", vec![]), ("roots2", vec![2.0])] {
        let m = build_model(1.0, 1.0, &roots, 16)?;
        let (even, conj) = phi_symmetries(&m)?;
        out.push(outcome(&format!("phi_evenness[{label}]"), even, 1e-9));
        out.push(outcome(&format!("phi_conjugation[{label}]"), conj, 1e-9));
        out.push(outcome(&format!("phi_residual[{label}]"), phi_residual(&m)?, 1e-6));
        out.push(outcome(&format!("gram_orthonormality[{label}]"), gram_error(&m, 15)?, 1e-7));
        out.push(outcome(&format!("b_oddness[{label}]"), b_oddness(&m)?, 1e-9));
        let tol = 1e-6;
        out.push(outcome(&format!("sigma_independence[{label}]"), sigma_spread(&m, tol)?, 3.0 * tol));
    }
    Ok(out)
}

/// Quantities frozen at the first verified run: name → (re, im).
pub fn golden_values() -> Result<BTreeMap<String, [f64; 2]>> {
    let mut g = BTreeMap::new();
    let m = build_model(1.0, 1.0, &[2.0], 16)?;
    g.insert("theta[roots2]".into(), [m.theta, 0.0]);
    let data = solve_eigen(&m, 12, 1e-13)?;
    for n in [0, 1, 5, 12] {
        g.insert(format!("nu_{n}[roots2]"), [data.nus[n], 0.0]);
        g.insert(format!("c_{n}[roots2]"), [data.norms[n], 0.0]);
    }
    let c = cfunc::eval_c(&m, Complex64::new(1.0, -0.2), CMethod::Wronskian)?.value;
    g.insert("c(1-0.2i)[roots2]".into(), [c.re, c.im]);
    let sine = build_sinetype(&m, &data, 400)?;
    let d = sinetype::residue_d(&sine, 3)?;
    g.insert("d_3[roots2]".into(), [d.re, d.im]);
    let a = SymbolFunction::exp_shift(1.0)?;
    let f = master::contour_reconstruct(&m, &sine, &a, 0.3, 0.1, 1e-8)?;
    g.insert("f(0.3i)[roots2]".into(), [f.re, f.im]);
    Ok(g)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Baseline {
    pub values: BTreeMap<String, [f64; 2]>,
}

#[derive(Debug, Clone, Serialize)]
pub struct GoldenComparison {
    pub name: String,
    pub baseline: [f64; 2],
    pub current: [f64; 2],
    pub rel_diff: f64,
    pub pass: bool,
}

pub const GOLDEN_RTOL: f64 = 1e-8;

pub fn compare(baseline: &Baseline, current: &BTreeMap<String, [f64; 2]>) -> Result<Vec<GoldenComparison>> {
    let mut out = Vec::new();
    for (k, b) in &baseline.values {
        let c = current
            .get(k)
            .ok_or_else(|| Error::Config(format!("baseline entry {k} is no longer produced")))?;
        let diff = ((b[0] - c[0]).powi(2) + (b[1] - c[1]).powi(2)).sqrt();
        let scale = (b[0].powi(2) + b[1].powi(2)).sqrt().max(1e-300);
        let rel = diff / scale;
        out.push(GoldenComparison {
            name: k.clone(),
            baseline: *b,
            current: *c,
            rel_diff: rel,
            pass: rel <= GOLDEN_RTOL,
        });
    }
    Ok(out)
}
