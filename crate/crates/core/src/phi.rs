//! The even eigenfunction φ_λ of `f'' + (A'/A) f' + (λ² + ρ²) f = 0`,
//! `f(0) = 1`, `f'(0) = 0`, on the real axis, on straight rays into the strip,
//! and its restriction to the imaginary segment.

use crate::error::{Error, Result};
use crate::model::Model;
use crate::ode::{self, OdeOptions};
use crate::series;
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::FRAC_PI_2;

/// Default Frobenius handoff radius.
pub const DEFAULT_EPS: f64 = 0.01;
const SERIES_TERMS: usize = 80;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PhiPath {
    RealAxis,
    ImaginarySegment,
}

#[derive(Debug, Clone, Serialize)]
pub struct PhiEvaluation {
    pub lambda: Complex64,
    pub path: PhiPath,
    pub nodes: Vec<f64>,
    pub values: Vec<Complex64>,
    pub derivs: Vec<Complex64>,
    pub est_error: f64,
}

fn handoff(eps: f64, kappa: Complex64) -> f64 {
    let k = kappa.norm();
    if k > 0.0 {
        eps.min(0.5 / k.sqrt())
    } else {
        eps
    }
}

/// Value and derivative at `eps` of the even power-series solution.
pub fn frobenius_start(model: &Model, lambda: Complex64, eps: f64) -> Result<(Complex64, Complex64)> {
    if !(eps > 0.0 && eps <= 0.05) {
        return Err(Error::Domain(format!("handoff radius {eps} outside (0, 0.05]")));
    }
    let kappa = lambda * lambda + model.rho * model.rho;
    let p = model.frobenius_coeffs(SERIES_TERMS, false, false);
    series::frobenius_even(&p, kappa, eps)
        .ok_or_else(|| Error::NonConvergence(format!("Frobenius series at eps = {eps} for λ = {lambda}")))
}

/// φ_λ and φ_λ' at the sorted positive nodes `ts`.
pub fn eval_phi_nodes(model: &Model, lambda: Complex64, ts: &[f64], tol: f64) -> Result<PhiEvaluation> {
    if ts.iter().any(|t| !(*t > 0.0) || !t.is_finite()) {
        return Err(Error::Domain("evaluation nodes must be positive".into()));
    }
    if ts.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Domain("evaluation nodes must be sorted".into()));
    }
    let kappa = lambda * lambda + model.rho * model.rho;
    if !kappa.re.is_finite() || !kappa.im.is_finite() {
        return Err(Error::InvalidParameter(format!("λ = {lambda}")));
    }
    let eps = handoff(DEFAULT_EPS, kappa).min(ts[0]);
    let p = model.frobenius_coeffs(SERIES_TERMS, false, false);

    let mut values = vec![Complex64::new(0.0, 0.0); ts.len()];
    let mut derivs = values.clone();
    // nodes inside the handoff radius come straight from the series
    let n_inner = ts.iter().take_while(|t| **t <= eps).count();
    for i in 0..n_inner {
        let (v, d) = series::frobenius_even(&p, kappa, ts[i])
            .ok_or_else(|| Error::NonConvergence("Frobenius series".into()))?;
        values[i] = v;
        derivs[i] = d;
    }
    let mut est_error = 1e-16;
    if n_inner < ts.len() {
        let (v0, d0) = series::frobenius_even(&p, kappa, eps)
            .ok_or_else(|| Error::NonConvergence("Frobenius series".into()))?;
        let rhs = |t: f64, y: &[f64; 4], dy: &mut [f64; 4]| {
            let l = model.logderiv_a_real(t);
            dy[0] = y[2];
            dy[1] = y[3];
            // f'' = −l f' − κ f
            dy[2] = -l * y[2] - (kappa.re * y[0] - kappa.im * y[1]);
            dy[3] = -l * y[3] - (kappa.re * y[1] + kappa.im * y[0]);
        };
        let opts = OdeOptions::with_rtol(tol);
        let stops = &ts[n_inner..];
        let (out, stats) = ode::integrate_to_points(rhs, eps, [v0.re, v0.im, d0.re, d0.im], stops, &opts)?;
        for (k, y) in out.iter().enumerate() {
            values[n_inner + k] = Complex64::new(y[0], y[1]);
            derivs[n_inner + k] = Complex64::new(y[2], y[3]);
        }
        est_error = stats.est_error.max(tol * 1e-2);
    }
    Ok(PhiEvaluation {
        lambda,
        path: PhiPath::RealAxis,
        nodes: ts.to_vec(),
        values,
        derivs,
        est_error,
    })
}

/// φ_λ(t) with derivative and error estimate.
pub fn eval_phi(model: &Model, lambda: Complex64, t: f64, tol: f64) -> Result<PhiEvaluation> {
    if !(1e-13..=1e-6).contains(&tol) {
        return Err(Error::Domain(format!("tolerance {tol} outside [1e-13, 1e-6]")));
    }
    eval_phi_nodes(model, lambda, &[t], tol)
}

/// φ_λ(ξ) and dφ/dξ at a point of the strip, integrating along the ray from 0.
pub fn eval_phi_complex(model: &Model, lambda: Complex64, xi: Complex64, tol: f64) -> Result<(Complex64, Complex64)> {
    if !(xi.im.abs() < FRAC_PI_2) || xi.re < 0.0 {
        return Err(Error::Domain(format!("{xi} is not reachable by a ray in the strip")));
    }
    let kappa = lambda * lambda + model.rho * model.rho;
    let p = model.frobenius_coeffs(SERIES_TERMS, false, false);
    let r = xi.norm();
    if r == 0.0 {
        return Ok((Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)));
    }
    let dir = xi / r;
    let eps = handoff(DEFAULT_EPS, kappa);
    if r <= eps {
        return series::frobenius_even_at(&p, kappa, xi).ok_or_else(|| Error::NonConvergence("Frobenius series".into()));
    }
    let (v0, d0) = series::frobenius_even_at(&p, kappa, dir * eps)
        .ok_or_else(|| Error::NonConvergence("Frobenius series".into()))?;
    let rhs = |s: f64, y: &[f64; 4], dy: &mut [f64; 4]| {
        let z = dir * s;
        let l = model.logderiv_a(z);
        let f = Complex64::new(y[0], y[1]);
        let fz = Complex64::new(y[2], y[3]);
        let df = dir * fz;
        let dfz = dir * (-l * fz - kappa * f);
        *dy = [df.re, df.im, dfz.re, dfz.im];
    };
    let (y, _) = ode::integrate(rhs, eps, [v0.re, v0.im, d0.re, d0.im], r, &OdeOptions::with_rtol(tol))?;
    Ok((Complex64::new(y[0], y[1]), Complex64::new(y[2], y[3])))
}

/// Solution of `u'' + (Ã'/Ã) u' + μ u = 0`, `u(0) = 1`, at sorted nodes in
/// (0, π/2). Values and derivatives.
pub fn eval_phi_imag_nodes(model: &Model, mu: f64, ts: &[f64], tol: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    if ts.iter().any(|t| !(*t > 0.0 && *t < FRAC_PI_2)) {
        return Err(Error::Domain("nodes must lie in (0, π/2)".into()));
    }
    let kappa = Complex64::new(mu, 0.0);
    let radius = model.series_radius();
    let eps = handoff(DEFAULT_EPS.min(radius / 5.0), kappa).min(ts[0]);
    let p = model.frobenius_coeffs(SERIES_TERMS, true, false);
    let mut vals = vec![0.0; ts.len()];
    let mut ders = vec![0.0; ts.len()];
    let n_inner = ts.iter().take_while(|t| **t <= eps).count();
    for i in 0..n_inner {
        let (v, d) = series::frobenius_even(&p, kappa, ts[i]).ok_or_else(|| Error::NonConvergence("Frobenius series".into()))?;
        vals[i] = v.re;
        ders[i] = d.re;
    }
    if n_inner < ts.len() {
        let (v0, d0) = series::frobenius_even(&p, kappa, eps).ok_or_else(|| Error::NonConvergence("Frobenius series".into()))?;
        let rhs = |t: f64, y: &[f64; 2], dy: &mut [f64; 2]| {
            dy[0] = y[1];
            dy[1] = -model.logderiv_a_tilde(t) * y[1] - mu * y[0];
        };
        let (out, _) = ode::integrate_to_points(rhs, eps, [v0.re, d0.re], &ts[n_inner..], &OdeOptions::with_rtol(tol))?;
        for (k, y) in out.iter().enumerate() {
            vals[n_inner + k] = y[0];
            ders[n_inner + k] = y[1];
        }
    }
    Ok((vals, ders))
}

/// w_μ(t) = φ_{i√(μ+ρ²)}(it) where −L w_μ = μ w_μ.
pub fn eval_phi_imag(model: &Model, mu: f64, t: f64, tol: f64) -> Result<f64> {
    Ok(eval_phi_imag_nodes(model, mu, &[t], tol)?.0[0])
}

#[derive(Debug, Clone, Serialize)]
pub struct EnvelopeReport {
    /// max over the grids of |φ_λ(ξ)| e^{−|Im λξ|} / (1 + |ξ|)^d for d = 0..=3
    pub max_ratio: [f64; 4],
    /// smallest d whose ratio does not grow from the inner to the outer half of the grid
    pub bounded_degree: Option<usize>,
    /// max over real ξ of |φ_λ(t)| e^{(ρ − |Im λ|) t} / (1 + t)
    pub real_axis_bound: f64,
    /// max over real ξ of |φ_λ(t)| for |Im λ| ≤ ρ
    pub max_abs_in_strip: f64,
}

pub fn check_phi_envelope(model: &Model, lambda_grid: &[Complex64], xi_grid: &[Complex64]) -> Result<EnvelopeReport> {
    let rmax = xi_grid.iter().fold(0.0f64, |m, x| m.max(x.norm()));
    let mut inner = [0.0f64; 4];
    let mut outer = [0.0f64; 4];
    let mut real_bound = 0.0f64;
    let mut max_abs = 0.0f64;
    for &l in lambda_grid {
        for &xi in xi_grid {
            let v = if xi.im == 0.0 {
                eval_phi_nodes(model, l, &[xi.re], 1e-11)?.values[0]
            } else {
                eval_phi_complex(model, l, xi, 1e-11)?.0
            };
            let base = v.norm() * (-(l * xi).im.abs()).exp();
            for d in 0..4 {
                let r = base / (1.0 + xi.norm()).powi(d as i32);
                if xi.norm() > 0.5 * rmax {
                    outer[d] = outer[d].max(r);
                } else {
                    inner[d] = inner[d].max(r);
                }
            }
            if xi.im == 0.0 {
                let t = xi.re;
                real_bound = real_bound.max(v.norm() * ((model.rho - l.im.abs()) * t).exp() / (1.0 + t));
                if l.im.abs() <= model.rho {
                    max_abs = max_abs.max(v.norm());
                }
            }
        }
    }
    let max_ratio = [0, 1, 2, 3].map(|d| inner[d].max(outer[d]));
    let bounded_degree = (0..4).find(|&d| outer[d] <= 2.0 * inner[d].max(1e-300) || inner[d] == 0.0);
    Ok(EnvelopeReport {
        max_ratio,
        bounded_degree,
        real_axis_bound: real_bound,
        max_abs_in_strip: max_abs,
    })
}
