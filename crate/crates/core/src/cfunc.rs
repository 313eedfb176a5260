//! The c-function: Γ_n recursion, the Φ_λ series and the connection
//! coefficient `φ_λ = c(λ) Φ_λ + c(−λ) Φ_{−λ}`.

use crate::error::{Error, Result};
use crate::model::Model;
use crate::phi;
use num_complex::Complex64;
use serde::Serialize;

pub const MAX_TERMS: usize = 200;
const POLE_GUARD: f64 = 1e-3;

#[derive(Debug, Clone, Serialize)]
pub struct GammaSeries {
    pub lambda: Complex64,
    pub coeffs: Vec<Complex64>,
    pub n: usize,
    pub a_coeffs: Vec<f64>,
}

/// Γ_0..Γ_n for `A'/A = Σ a_k e^{−kt}` (a_0 = 2ρ).
pub fn gamma_recursion(a: &[f64], rho: f64, lambda: Complex64, n: usize) -> Vec<Complex64> {
    let il = Complex64::i() * lambda;
    let mut g = Vec::with_capacity(n + 1);
    g.push(Complex64::new(1.0, 0.0));
    for m in 1..=n {
        let mut s = Complex64::new(0.0, 0.0);
        for k in 1..=m.min(a.len() - 1) {
            if a[k] != 0.0 {
                s -= a[k] * (il - rho - (m - k) as f64) * g[m - k];
            }
        }
        let mf = m as f64;
        g.push(s / (mf * (mf - 2.0 * il)));
    }
    g
}

fn check_pole(lambda: Complex64, n: usize) -> Result<()> {
    // n (n − 2iλ) vanishes at λ = −i n / 2
    if lambda.re.abs() < POLE_GUARD && lambda.im < 0.0 {
        let m = (-2.0 * lambda.im).round();
        if m >= 1.0 && m <= 2.0 * n as f64 && (lambda.im + m / 2.0).abs() < POLE_GUARD {
            return Err(Error::Pole(format!("λ = {lambda} is within {POLE_GUARD} of −i{m}/2")));
        }
    }
    Ok(())
}

pub fn gamma_coeffs(model: &Model, lambda: Complex64, n: usize) -> Result<GammaSeries> {
    if n > MAX_TERMS {
        return Err(Error::InvalidParameter(format!("N = {n} exceeds {MAX_TERMS}")));
    }
    check_pole(lambda, n)?;
    let a = model.a_coeffs(n);
    let coeffs = gamma_recursion(&a, model.rho, lambda, n);
    if coeffs.iter().any(|g| !g.re.is_finite() || !g.im.is_finite()) {
        return Err(Error::NonConvergence(format!("Γ_n overflow at λ = {lambda}")));
    }
    Ok(GammaSeries {
        lambda,
        coeffs,
        n,
        a_coeffs: a,
    })
}

impl GammaSeries {
    /// Fitted (K, t0) with |Γ_n| ≤ K e^{n t0} over the upper half of the
    /// nonzero coefficients.
    pub fn growth(&self) -> (f64, f64) {
        let pts: Vec<(f64, f64)> = self
            .coeffs
            .iter()
            .enumerate()
            .skip(self.n / 2)
            .filter(|(_, g)| g.norm() > 1e-300)
            .map(|(i, g)| (i as f64, g.norm().ln()))
            .collect();
        if pts.len() < 2 {
            return (1.0, 0.0);
        }
        let np = pts.len() as f64;
        let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), p| (a + p.0, b + p.1));
        let (mx, my) = (sx / np, sy / np);
        let (num, den) = pts
            .iter()
            .fold((0.0, 0.0), |(a, b), p| (a + (p.0 - mx) * (p.1 - my), b + (p.0 - mx).powi(2)));
        let t0 = (num / den).max(0.0);
        let k = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, g)| g.norm() * (-(i as f64) * t0).exp())
            .fold(0.0f64, f64::max);
        (k, t0)
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct PhiSeriesValue {
    pub value: Complex64,
    pub deriv: Complex64,
    pub tail_bound: f64,
    pub terms: usize,
}

/// Φ_λ(t) and Φ_λ'(t) from a precomputed series, summing until terms fall
/// below `tol` relative to the sum.
pub fn sum_phi_series(series: &GammaSeries, rho: f64, t: f64, tol: f64) -> PhiSeriesValue {
    let il = Complex64::i() * series.lambda;
    let x = (-t).exp();
    let (k, t0) = series.growth();
    let mut s = Complex64::new(0.0, 0.0);
    let mut ds = Complex64::new(0.0, 0.0);
    let mut xp = 1.0;
    let mut used = series.n;
    let mut quiet = 0;
    for (m, g) in series.coeffs.iter().enumerate() {
        let term = g * xp;
        s += term;
        ds += term * (il - rho - m as f64);
        xp *= x;
        if m >= 4 {
            if term.norm() * (1.0 + m as f64) <= tol * s.norm() {
                quiet += 1;
                if quiet >= 4 {
                    used = m;
                    break;
                }
            } else {
                quiet = 0;
            }
        }
    }
    let r = (t0 - t).exp();
    let tail = if r < 1.0 {
        k * r.powi(used as i32 + 1) / (1.0 - r)
    } else {
        f64::INFINITY
    };
    let e = ((il - rho) * t).exp();
    PhiSeriesValue {
        value: e * s,
        deriv: e * ds,
        tail_bound: tail * e.norm(),
        terms: used + 1,
    }
}

/// Φ_λ(t) with `n` series coefficients.
#[allow(non_snake_case)]
pub fn eval_Phi(model: &Model, lambda: Complex64, t: f64, n: usize) -> Result<PhiSeriesValue> {
    if !(t >= 1.0) {
        return Err(Error::Domain(format!("t = {t} < 1")));
    }
    let g = gamma_coeffs(model, lambda, n)?;
    Ok(sum_phi_series(&g, model.rho, t, 1e-17))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CMethod {
    Wronskian,
    Limit,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct CValue {
    pub lambda: Complex64,
    pub value: Complex64,
    pub est_error: f64,
    pub method: CMethod,
}

/// Point beyond which the Φ series is summed for the Wronskian method.
pub fn wronskian_point(model: &Model) -> f64 {
    let cmax = model.perturbation_roots.iter().cloned().fold(1.0f64, f64::max);
    5f64.max(0.5 * cmax.acosh() + 3.0)
}

fn check_lambda(model: &Model, lambda: Complex64) -> Result<()> {
    if lambda.norm() < 1e-12 {
        return Err(Error::Pole(format!("c has a pole at λ = 0 (ρ = {})", model.rho)));
    }
    check_pole(lambda, MAX_TERMS)?;
    check_pole(-lambda, MAX_TERMS)
}

/// Wronskian formula evaluated at `t_star`.
pub fn eval_c_at(model: &Model, lambda: Complex64, t_star: f64, tol: f64) -> Result<CValue> {
    check_lambda(model, lambda)?;
    let gp = gamma_coeffs(model, lambda, MAX_TERMS)?;
    let gm = gamma_coeffs(model, -lambda, MAX_TERMS)?;
    let pp = sum_phi_series(&gp, model.rho, t_star, 1e-17);
    let pm = sum_phi_series(&gm, model.rho, t_star, 1e-17);
    let ph = phi::eval_phi_nodes(model, lambda, &[t_star], tol)?;
    let (f, df) = (ph.values[0], ph.derivs[0]);
    let w = pp.value * pm.deriv - pp.deriv * pm.value;
    let value = (f * pm.deriv - df * pm.value) / w;
    let rel = ph.est_error / f.norm().max(1e-300) + (pp.tail_bound / pp.value.norm()).max(pm.tail_bound / pm.value.norm());
    Ok(CValue {
        lambda,
        value,
        est_error: value.norm() * rel.max(1e-15) * 10.0,
        method: CMethod::Wronskian,
    })
}

pub fn eval_c(model: &Model, lambda: Complex64, method: CMethod) -> Result<CValue> {
    match method {
        CMethod::Wronskian => eval_c_at(model, lambda, wronskian_point(model), 1e-12),
        CMethod::Limit => {
            check_lambda(model, lambda)?;
            if !(lambda.im < 0.0) {
                return Err(Error::Domain(format!("limit method needs Im λ < 0, got {lambda}")));
            }
            let big_t = 25f64.max(9.2 / -lambda.im);
            let gp = gamma_coeffs(model, lambda, MAX_TERMS)?;
            let pp = sum_phi_series(&gp, model.rho, big_t, 1e-17);
            let ph = phi::eval_phi_nodes(model, lambda, &[big_t], 1e-12)?;
            let value = ph.values[0] / pp.value;
            // the neglected c(−λ)Φ_{−λ} term is O(e^{2 Im λ T})
            let est = value.norm() * ((2.0 * lambda.im * big_t).exp() + 1e-10);
            Ok(CValue {
                lambda,
                value,
                est_error: est,
                method: CMethod::Limit,
            })
        }
    }
}

/// Cross-checked c: both methods when the limit method applies.
pub fn eval_c_checked(model: &Model, lambda: Complex64, rtol: f64) -> Result<CValue> {
    let w = eval_c(model, lambda, CMethod::Wronskian)?;
    if lambda.im < 0.0 {
        let l = eval_c(model, lambda, CMethod::Limit)?;
        let d = (w.value - l.value).norm() / w.value.norm();
        if d > rtol {
            return Err(Error::CrossCheck {
                what: format!("c({lambda})"),
                discrepancy: d,
                tolerance: rtol,
            });
        }
    }
    Ok(w)
}

/// |c(λ)|^{−2} for real λ ≠ 0.
pub fn plancherel_density(model: &Model, lambda: f64) -> Result<f64> {
    if lambda == 0.0 {
        return Err(Error::Pole("Plancherel density at λ = 0".into()));
    }
    let c = eval_c(model, Complex64::new(lambda.abs(), 0.0), CMethod::Wronskian)?.value;
    // c(−λ) = conj c(λ) on the real line
    Ok(1.0 / (c * c.conj()).re)
}
