//! Spectrum of −L = −(d² + (Ã'/Ã) d) on (0, π/2).
//!
//! Eigenvalues are reported as ν = ν_L + s where ν_L is the eigenvalue of −L
//! and s = `Model::nu_shift`, so that ν is the eigenvalue of the Liouville form
//! −v'' + q v. Spectral nodes are μ_n = √(ν_L + ρ²).
//!
//! Each side is shot from its regular endpoint series. The Prüfer angle
//! difference Δ(ν) = θ_L(π/4) − θ_R(π/4) equals nπ exactly at the n-th
//! eigenvalue, which gives the index directly.

use crate::error::{Error, Result};
use crate::model::Model;
use crate::ode::{self, OdeOptions};
use crate::phi;
use crate::quad;
use crate::roots;
use crate::series;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

const SERIES_TERMS: usize = 80;
const MID: f64 = FRAC_PI_4;

#[derive(Debug, Clone, Serialize)]
pub struct EigenDiagnostic {
    pub n: usize,
    /// shoot_mismatch at the converged ν
    pub shoot_residual: f64,
    /// interior zeros of the glued eigenfunction
    pub oscillations: usize,
    pub bracket: (f64, f64),
}

#[derive(Debug, Clone, Serialize)]
pub struct EigenData {
    pub nus: Vec<f64>,
    /// μ_n = √(ν_n − s + ρ²), real part; imaginary nodes are stored negated
    pub nodes: Vec<f64>,
    /// Ψ_n = norms[n] · u_n with u_n(0) = 1
    pub norms: Vec<f64>,
    pub matching: Vec<f64>,
    pub m0: i64,
    pub n0: i64,
    pub diagnostics: Vec<EigenDiagnostic>,
    /// eigenvalues of −L
    pub nu_l: Vec<f64>,
    /// right-shot solution times glue factor equals the left-shot one
    pub glue: Vec<f64>,
    pub tol: f64,
}

impl EigenData {
    pub fn n_max(&self) -> usize {
        self.nus.len() - 1
    }

    /// μ_n² = ν_L + ρ² for each n.
    pub fn node_squares(&self, rho: f64) -> Vec<f64> {
        self.nu_l.iter().map(|v| v + rho * rho).collect()
    }
}

#[derive(Debug, Clone, Copy)]
enum Side {
    Left,
    Right,
}

struct Shot {
    u: f64,
    du: f64,
    angle: f64,
    norm_integral: f64,
}

fn handoff(model: &Model, nu_l: f64) -> f64 {
    let r = model.series_radius();
    let mut eps = 0.02f64.min(r / 5.0);
    if nu_l.abs() > 0.0 {
        eps = eps.min(0.5 / nu_l.abs().sqrt());
    }
    eps
}

/// Logarithmic derivative of Ã in the variable of the given side.
fn side_logderiv(model: &Model, side: Side, x: f64) -> f64 {
    match side {
        Side::Left => model.logderiv_a_tilde(x),
        // s = π/2 − t: d/ds log Ã(π/2 − s) = −(Ã'/Ã)(π/2 − s)
        Side::Right => -model.logderiv_a_tilde(FRAC_PI_2 - x),
    }
}

fn side_weight(model: &Model, side: Side, x: f64) -> f64 {
    match side {
        Side::Left => model.a_tilde(x),
        Side::Right => model.a_tilde(FRAC_PI_2 - x),
    }
}

fn angle_scale(nu_l: f64) -> f64 {
    (nu_l.abs() + 1.0).sqrt()
}

/// Integrates one side from its endpoint series to `x_end` (in the side's own
/// variable), optionally stopping at `stops` (sorted, < x_end) to record values.
fn shoot_side(
    model: &Model,
    side: Side,
    nu_l: f64,
    x_end: f64,
    stops: &[f64],
    rtol: f64,
    with_norm: bool,
    mut record: impl FnMut(usize, f64, f64),
) -> Result<Shot> {
    let p = model.frobenius_coeffs(SERIES_TERMS, true, matches!(side, Side::Right));
    let kappa = Complex64::new(nu_l, 0.0);
    let eps = handoff(model, nu_l);
    let k = angle_scale(nu_l);
    let frob = |x: f64| -> Result<(f64, f64)> {
        let (v, d) = series::frobenius_even(&p, kappa, x)
            .ok_or_else(|| Error::NonConvergence(format!("endpoint series at ν_L = {nu_l}")))?;
        Ok((v.re, d.re))
    };
    let n_inner = stops.iter().take_while(|x| **x <= eps).count();
    for (i, &x) in stops[..n_inner].iter().enumerate() {
        let (v, d) = frob(x)?;
        record(i, v, d);
    }
    let (u0, d0) = frob(eps)?;
    let mut norm0 = 0.0;
    if with_norm {
        let (xs, ws) = quad::composite_rule(0.0, eps, 1, 20, (true, false), 24);
        for (x, w) in xs.iter().zip(&ws) {
            let (v, _) = frob(*x)?;
            norm0 += w * side_weight(model, side, *x) * v * v;
        }
    }

    let rhs = |x: f64, y: &[f64; 3], dy: &mut [f64; 3]| {
        dy[0] = y[1];
        dy[1] = -side_logderiv(model, side, x) * y[1] - nu_l * y[0];
        dy[2] = if with_norm { side_weight(model, side, x) * y[0] * y[0] } else { 0.0 };
    };
    let mut all_stops: Vec<f64> = stops[n_inner..].to_vec();
    all_stops.push(x_end);
    let mut opts = OdeOptions::with_rtol(rtol);
    opts.h_max = PI / (4.0 * k);
    let mut angle = (u0).atan2(d0 / k);
    let mut prev = angle;
    let (y, _) = ode::integrate_with(
        rhs,
        eps,
        [u0, d0, norm0],
        &all_stops,
        &opts,
        |i, y| {
            if n_inner + i < stops.len() {
                record(n_inner + i, y[0], y[1]);
            }
        },
        |_, y| {
            let raw = y[0].atan2(y[1] / k);
            let mut d = raw - prev;
            if d > PI {
                d -= 2.0 * PI;
            } else if d <= -PI {
                d += 2.0 * PI;
            }
            angle += d;
            prev = raw;
        },
    )?;
    Ok(Shot {
        u: y[0],
        du: y[1],
        angle,
        norm_integral: y[2],
    })
}

/// Both sides shot to π/4 for ν_L; returns (left, right) with the right
/// derivative converted to d/dt.
fn shoot_both(model: &Model, nu_l: f64, rtol: f64, with_norm: bool) -> Result<(Shot, Shot)> {
    let l = shoot_side(model, Side::Left, nu_l, MID, &[], rtol, with_norm, |_, _, _| {})?;
    let mut r = shoot_side(model, Side::Right, nu_l, FRAC_PI_2 - MID, &[], rtol, with_norm, |_, _, _| {})?;
    r.du = -r.du;
    // in t the right angle runs backwards: θ_R(t) measured with d/dt
    r.angle = PI - r.angle;
    Ok((l, r))
}

/// Wronskian of the two endpoint-normalized shots at π/4, times Ã(π/4).
/// `nu` is in the printed-potential convention.
pub fn shoot_mismatch(model: &Model, nu: f64) -> Result<f64> {
    let nu_l = nu - model.nu_shift;
    let (l, r) = shoot_both(model, nu_l, 1e-13, false)?;
    Ok(model.a_tilde(MID) * (l.u * r.du - l.du * r.u))
}

/// Δ(ν_L) = θ_L(π/4) − θ_R(π/4); equals nπ at the n-th eigenvalue.
fn angle_difference(model: &Model, nu_l: f64, rtol: f64) -> Result<f64> {
    let (l, r) = shoot_both(model, nu_l, rtol, false)?;
    Ok(l.angle - r.angle)
}

/// Number of eigenvalues of −L strictly below `nu_l`.
pub fn count_below(model: &Model, nu: f64) -> Result<usize> {
    let d = angle_difference(model, nu - model.nu_shift, 1e-12)?;
    Ok(if d <= 0.0 { 0 } else { (d / PI).ceil() as usize })
}

fn predicted_nu_l(model: &Model, n: usize) -> f64 {
    let m = 2.0 * n as f64 + model.rho0;
    (m * m - model.theta - model.nu_shift).max(0.0)
}

fn find_eigen(model: &Model, n: usize, tol: f64) -> Result<(f64, (f64, f64))> {
    let target = n as f64 * PI;
    let rtol = 1e-13;
    let f = |x: f64| -> Result<f64> { Ok(angle_difference(model, x, rtol)? - target) };
    let guess = predicted_nu_l(model, n);
    let gap = 4.0 * (2.0 * n as f64 + model.rho0).abs() + 4.0;
    let mut lo = guess - 0.5 * gap;
    let mut hi = guess + 0.5 * gap;
    let mut flo = f(lo)?;
    let mut fhi = f(hi)?;
    let floor = -model.rho * model.rho - 5.0 - model.nu_shift.abs();
    let mut tries = 0;
    while flo > 0.0 {
        lo -= gap * 2f64.powi(tries);
        if lo < floor - 1e6 {
            return Err(Error::Eigen(format!("no lower bracket for n = {n}")));
        }
        flo = f(lo)?;
        tries += 1;
    }
    tries = 0;
    while fhi < 0.0 {
        hi += gap * 2f64.powi(tries);
        fhi = f(hi)?;
        tries += 1;
        if tries > 40 {
            return Err(Error::Eigen(format!("no upper bracket for n = {n}")));
        }
    }
    let x = roots::brent(f, lo, hi, tol * (1.0 + guess.abs()), 200)?;
    Ok((x, (lo, hi)))
}

/// Eigenvalues 0..=n_max with normalized eigenfunctions.
pub fn solve_eigen(model: &Model, n_max: usize, tol: f64) -> Result<EigenData> {
    if n_max > 200 {
        return Err(Error::InvalidParameter(format!("n_max = {n_max} exceeds 200")));
    }
    if !(tol >= 1e-14) {
        return Err(Error::InvalidParameter(format!("tolerance {tol} below 1e-14")));
    }
    let found: Vec<Result<(f64, (f64, f64))>> = (0..=n_max).into_par_iter().map(|n| find_eigen(model, n, tol)).collect();
    let mut nu_l = Vec::with_capacity(n_max + 1);
    let mut brackets = Vec::with_capacity(n_max + 1);
    for r in found {
        let (x, b) = r?;
        nu_l.push(x);
        brackets.push(b);
    }
    for (n, w) in nu_l.windows(2).enumerate() {
        if !(w[1] > w[0]) {
            return Err(Error::Eigen(format!("eigenvalues {n} and {} out of order", n + 1)));
        }
    }

    let per: Vec<Result<(f64, f64, usize, f64)>> = nu_l
        .par_iter()
        .map(|&x| {
            let (l, r) = shoot_both(model, x, 1e-13, true)?;
            let glue = if r.u.abs() * angle_scale(x) > r.du.abs() { l.u / r.u } else { l.du / r.du };
            let total = l.norm_integral + glue * glue * r.norm_integral;
            let residual = model.a_tilde(MID) * (l.u * r.du - l.du * r.u);
            // zeros on each side from the accumulated angles (starting near π/2);
            // a zero sitting on π/4 belongs to the left count only
            let zl = (l.angle / PI + 1e-9).floor().max(0.0) as usize;
            let zr = (((PI - r.angle) / PI - 1e-9).ceil() - 1.0).max(0.0) as usize;
            Ok((glue, 1.0 / total.sqrt(), zl + zr, residual))
        })
        .collect();

    let mut norms = Vec::new();
    let mut glue = Vec::new();
    let mut diagnostics = Vec::new();
    for (n, r) in per.into_iter().enumerate() {
        let (g, nn, osc, res) = r?;
        if osc != n {
            return Err(Error::Eigen(format!("eigenfunction {n} has {osc} interior zeros")));
        }
        norms.push(nn);
        glue.push(g);
        diagnostics.push(EigenDiagnostic {
            n,
            shoot_residual: res,
            oscillations: osc,
            bracket: (brackets[n].0 + model.nu_shift, brackets[n].1 + model.nu_shift),
        });
    }
    let rho2 = model.rho * model.rho;
    let m0 = nu_l.iter().rposition(|v| v + rho2 < 0.0).map_or(-1, |i| i as i64);
    let n0 = nu_l.iter().position(|v| v + rho2 > 0.0).map_or(nu_l.len() as i64, |i| i as i64);
    let nodes = nu_l.iter().map(|v| (v + rho2).abs().sqrt()).collect();
    Ok(EigenData {
        nus: nu_l.iter().map(|v| v + model.nu_shift).collect(),
        nodes,
        matching: norms.clone(),
        norms,
        m0,
        n0,
        diagnostics,
        nu_l,
        glue,
        tol,
    })
}

/// Ψ_n at sorted points of (0, π/2).
pub fn eigenfunction_values(data: &EigenData, model: &Model, n: usize, ts: &[f64]) -> Result<Vec<f64>> {
    if n > data.n_max() {
        return Err(Error::Domain(format!("n = {n} exceeds n_max = {}", data.n_max())));
    }
    if ts.iter().any(|t| !(*t > 0.0 && *t < FRAC_PI_2)) {
        return Err(Error::Domain("points must lie in (0, π/2)".into()));
    }
    let x = data.nu_l[n];
    let mut out = vec![0.0; ts.len()];
    let split = ts.partition_point(|t| *t <= MID);
    let (left, right) = ts.split_at(split);
    if !left.is_empty() {
        shoot_side(model, Side::Left, x, MID, left, 1e-13, false, |i, v, _| out[i] = v)?;
    }
    if !right.is_empty() {
        let svals: Vec<f64> = right.iter().rev().map(|t| FRAC_PI_2 - t).collect();
        let m = right.len();
        shoot_side(model, Side::Right, x, FRAC_PI_2 - MID, &svals, 1e-13, false, |i, v, _| {
            out[split + m - 1 - i] = v * data.glue[n];
        })?;
    }
    Ok(out.into_iter().map(|v| v * data.norms[n]).collect())
}

pub fn eigenfunction_eval(data: &EigenData, model: &Model, n: usize, t: f64) -> Result<f64> {
    Ok(eigenfunction_values(data, model, n, &[t])?[0])
}

/// c_n with Ψ_n = c_n w_{ν_L}, checked for constancy at π/8, π/4, 3π/8.
pub fn matching_constant(data: &EigenData, model: &Model, n: usize) -> Result<f64> {
    let ts = [PI / 8.0, PI / 4.0, 3.0 * PI / 8.0];
    let psi = eigenfunction_values(data, model, n, &ts)?;
    let (w, _) = phi::eval_phi_imag_nodes(model, data.nu_l[n], &ts, 1e-13)?;
    let ratios: Vec<f64> = psi.iter().zip(&w).map(|(p, w)| p / w).collect();
    let c = ratios[1];
    let spread = ratios.iter().map(|r| (r - c).abs()).fold(0.0, f64::max) / c.abs();
    if spread > 1e-7 {
        return Err(Error::CrossCheck {
            what: format!("matching constant c_{n}"),
            discrepancy: spread,
            tolerance: 1e-7,
        });
    }
    Ok(c)
}
