//! Reconstruction of f from a symbol a(λ): the residue series over the
//! spectral nodes, the contour integral against φ_λ, its real-line form, and
//! the forward transform check ∫ f(it) φ_λ(t) A(t) dt against a b + a(−) b(−).
//!
//! The contour routes return half of ∫ (ab + a(−λ)b(−λ)) φ_λ dλ/(c c(−)) so that
//! all three routes represent the same f.

use crate::cfunc::{self, CMethod};
use crate::error::{Error, Result};
use crate::model::Model;
use crate::phi;
use crate::quad::composite_rule;
use crate::sinetype::{Branch, SineTypeData};
use crate::spectrum::EigenData;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::{FRAC_PI_2, PI};

const PHI_TOL: f64 = 1e-12;
const PANEL: f64 = 1.0;
const ORDER: usize = 20;
const T_OUT_CAP: f64 = 40.0;

fn c0() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SymbolForm {
    Zero,
    ExpShift,
    RationalDamped,
    /// e^{ipλ} ∏ (λ − iμ_k)/(λ + iμ_k)
    VanishingNodes,
}

/// a ∈ H(A, p, δ): holomorphic on Im λ > −δ, |a| ≤ C e^{−p Im λ + A|Re λ|}.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Certificate {
    pub a_bound: f64,
    pub p: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SymbolFunction {
    pub form: SymbolForm,
    pub params: Vec<f64>,
    pub certificate: Certificate,
}

impl SymbolFunction {
    fn checked(form: SymbolForm, params: Vec<f64>, certificate: Certificate) -> Result<Self> {
        let c = certificate;
        if !(c.p > 0.0) || !(c.a_bound >= 0.0 && c.a_bound < FRAC_PI_2) || !(c.delta > 0.0 && c.delta <= 1.0) {
            return Err(Error::InvalidParameter(format!("bad certificate {c:?}")));
        }
        Ok(SymbolFunction { form, params, certificate })
    }

    pub fn zero(p: f64) -> Result<Self> {
        Self::checked(SymbolForm::Zero, vec![p], Certificate { a_bound: 0.0, p, delta: 1.0 })
    }

    pub fn exp_shift(p: f64) -> Result<Self> {
        Self::checked(SymbolForm::ExpShift, vec![p], Certificate { a_bound: 0.0, p, delta: 1.0 })
    }

    /// e^{ipλ}/(λ + i·offset), offset > 1.
    pub fn rational_damped(p: f64, offset: f64) -> Result<Self> {
        if !(offset > 1.0) {
            return Err(Error::InvalidParameter(format!("pole offset {offset} must exceed 1")));
        }
        Self::checked(SymbolForm::RationalDamped, vec![p, offset], Certificate { a_bound: 0.0, p, delta: 1.0 })
    }

    /// Vanishes at iμ for each μ in `nodes`.
    pub fn vanishing(p: f64, nodes: &[f64]) -> Result<Self> {
        let lo = nodes.iter().cloned().fold(f64::INFINITY, f64::min);
        if !(lo > 0.0) {
            return Err(Error::InvalidParameter("nodes must be positive".into()));
        }
        let mut params = vec![p];
        params.extend_from_slice(nodes);
        Self::checked(SymbolForm::VanishingNodes, params, Certificate { a_bound: 0.0, p, delta: (lo / 2.0).min(1.0) })
    }

    pub fn eval(&self, lambda: Complex64) -> Complex64 {
        let i = Complex64::i();
        let p = self.params[0];
        match self.form {
            SymbolForm::Zero => c0(),
            SymbolForm::ExpShift => (i * p * lambda).exp(),
            SymbolForm::RationalDamped => (i * p * lambda).exp() / (lambda + i * self.params[1]),
            SymbolForm::VanishingNodes => {
                let mut v = (i * p * lambda).exp();
                for m in &self.params[1..] {
                    v *= (lambda - i * m) / (lambda + i * m);
                }
                v
            }
        }
    }

    /// max of |a(λ)| e^{p Im λ − A|Re λ|} over Im λ = −δ and the real line, |Re λ| ≤ 50.
    pub fn certificate_ratio(&self) -> f64 {
        let c = self.certificate;
        let mut m = 0.0f64;
        for k in 0..=1000 {
            let x = -50.0 + 0.1 * k as f64;
            for y in [-c.delta, 0.0] {
                let l = Complex64::new(x, y);
                m = m.max(self.eval(l).norm() * (c.p * y - c.a_bound * x.abs()).exp());
            }
        }
        m
    }

    pub fn is_zero(&self) -> bool {
        self.form == SymbolForm::Zero
    }
}

fn check_branch(sine: &SineTypeData) -> Result<()> {
    if sine.branch == Branch::ZeroAtOrigin {
        return Err(Error::Regime("reconstruction needs a zero-free spectrum at the origin".into()));
    }
    Ok(())
}

/// w_m(t) = Ψ_m(t)/c_m = φ_{iμ_m}(it) at each t (complex).
fn node_function(model: &Model, eigen: &EigenData, m: usize, mu: f64, ts: &[Complex64]) -> Result<Vec<Complex64>> {
    let mut out = vec![c0(); ts.len()];
    let lambda = Complex64::new(0.0, mu);
    let mut real: Vec<(usize, f64)> = Vec::new();
    let mut imag: Vec<(usize, f64)> = Vec::new();
    for (k, t) in ts.iter().enumerate() {
        if t.norm() == 0.0 {
            out[k] = Complex64::new(1.0, 0.0);
        } else if t.im == 0.0 {
            real.push((k, t.re.abs()));
        } else if t.re == 0.0 {
            imag.push((k, t.im.abs()));
        } else {
            // φ even: pick the sign of it with nonnegative real part
            let xi = Complex64::i() * t;
            let xi = if xi.re < 0.0 { -xi } else { xi };
            out[k] = phi::eval_phi_complex(model, lambda, xi, PHI_TOL)?.0;
        }
    }
    let sorted = |v: &mut Vec<(usize, f64)>| v.sort_by(|a, b| a.1.total_cmp(&b.1));
    sorted(&mut real);
    sorted(&mut imag);
    if !real.is_empty() {
        let xs: Vec<f64> = real.iter().map(|r| r.1).collect();
        let (v, _) = phi::eval_phi_imag_nodes(model, eigen.nu_l[m], &xs, PHI_TOL)?;
        for (r, v) in real.iter().zip(v) {
            out[r.0] = Complex64::new(v, 0.0);
        }
    }
    if !imag.is_empty() {
        let xs: Vec<f64> = imag.iter().map(|r| r.1).collect();
        let e = phi::eval_phi_nodes(model, lambda, &xs, PHI_TOL)?;
        for (r, v) in imag.iter().zip(e.values) {
            out[r.0] = v;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct SeriesResult {
    pub values: Vec<Complex64>,
    pub terms: usize,
    pub last_term: f64,
}

/// f(t) = 2πi Σ d_m a(iμ_m) Ψ_m(t)/c_m on t ∈ Ω_p.
pub fn series_reconstruct_many(
    model: &Model,
    eigen: &EigenData,
    sine: &SineTypeData,
    a: &SymbolFunction,
    ts: &[Complex64],
    tol: f64,
) -> Result<SeriesResult> {
    check_branch(sine)?;
    let p = a.certificate.p;
    for t in ts {
        if !(t.re.abs() < FRAC_PI_2 && t.im.abs() < p) {
            return Err(Error::Domain(format!("t = {t} outside Ω_p")));
        }
    }
    let mut values = vec![c0(); ts.len()];
    if a.is_zero() {
        return Ok(SeriesResult { values, terms: 0, last_term: 0.0 });
    }
    let s_max = ts.iter().map(|t| t.im.abs()).fold(0.0, f64::max);
    let first = sine.first_index;
    let count = sine.computed.min(eigen.n_max() + 1 - first);
    let chunk = rayon::current_num_threads().max(4);
    let mut small = 0;
    let mut prev = f64::INFINITY;
    let mut grew = 0;
    let mut j = 0;
    while j < count {
        let hi = (j + chunk).min(count);
        let block: Vec<Vec<Complex64>> = (j..hi)
            .into_par_iter()
            .map(|jj| {
                let mu = sine.mus[jj];
                let w = 2.0 * PI * Complex64::i() * sine.residues[jj] * a.eval(Complex64::new(0.0, mu));
                if w.norm() == 0.0 {
                    return Ok(vec![c0(); ts.len()]);
                }
                let f = node_function(model, eigen, first + jj, mu, ts)?;
                Ok(f.into_iter().map(|v| w * v).collect())
            })
            .collect::<Result<_>>()?;
        for terms in block {
            let mag = terms.iter().map(|v| v.norm()).fold(0.0, f64::max);
            for (v, t) in values.iter_mut().zip(&terms) {
                *v += t;
            }
            j += 1;
            // term bound |d_m| e^{(|Im t| − p)μ_m}, independent of zeros of a
            let jj = j - 1;
            let env = sine.residues[jj].norm() * ((s_max - p) * sine.mus[jj]).exp();
            if mag < tol * 1e-3 && env < tol * 1e-3 {
                small += 1;
            } else {
                small = 0;
            }
            grew = if mag > prev && mag > tol { grew + 1 } else { 0 };
            if grew >= 8 {
                return Err(Error::NonConvergence("series terms are not decreasing".into()));
            }
            prev = mag;
            if small >= 3 {
                return Ok(SeriesResult { values, terms: j, last_term: mag });
            }
        }
    }
    Err(Error::NonConvergence(format!("series not converged after {count} nodes (last term {prev:e})")))
}

pub fn series_reconstruct(
    model: &Model,
    eigen: &EigenData,
    sine: &SineTypeData,
    a: &SymbolFunction,
    t: Complex64,
    tol: f64,
) -> Result<Complex64> {
    Ok(series_reconstruct_many(model, eigen, sine, a, &[t], tol)?.values[0])
}

/// Half-width in Re λ beyond which the contour integrand is below tol/10.
fn lambda_cutoff(sine: &SineTypeData, a: &SymbolFunction, sigma: f64, t_max: f64, tol: f64) -> Result<f64> {
    let c = a.certificate;
    let mut x = 2.0 * PANEL;
    while x <= 80.0 {
        let l = Complex64::new(x, -sigma);
        // |φ_λ(t)| ≤ e^{σt}; the tail of e^{(A−π/2)x}·poly integrates to ≲ its value
        let env = sine.s1(l).norm() * (c.p * sigma + c.a_bound * x + sigma * t_max).exp();
        if env * 2.0 / (FRAC_PI_2 - c.a_bound) < tol / 10.0 {
            return Ok(x);
        }
        x += PANEL;
    }
    Err(Error::Integration {
        at: x,
        reason: "λ truncation bound unachievable".into(),
    })
}

/// Σ_k w_k F(λ_k) φ_{λ_k}(t) over the nodes, for all t at once.
fn integrate_lambda<F>(model: &Model, nodes: &[(Complex64, f64)], ts: &[f64], weight: F) -> Result<Vec<Complex64>>
where
    F: Fn(Complex64) -> Result<Complex64> + Sync,
{
    let pos: Vec<f64> = ts.iter().cloned().filter(|t| *t > 0.0).collect();
    let offset = ts.len() - pos.len();
    nodes
        .par_iter()
        .map(|&(l, w)| {
            let g = weight(l)? * w;
            let mut out = vec![g; ts.len()];
            if !pos.is_empty() {
                let e = phi::eval_phi_nodes(model, l, &pos, PHI_TOL)?;
                for (o, v) in out[offset..].iter_mut().zip(e.values) {
                    *o *= v;
                }
            }
            Ok(out)
        })
        .try_reduce(
            || vec![c0(); ts.len()],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                Ok(a)
            },
        )
}

fn check_ts(ts: &[f64]) -> Result<()> {
    if ts.iter().any(|t| !(*t >= 0.0 && t.is_finite())) || ts.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Domain("t nodes must be nonnegative and sorted".into()));
    }
    Ok(())
}

fn line_nodes(t_cut: f64, sigma: f64, full: bool) -> Vec<(Complex64, f64)> {
    let n = (t_cut / PANEL).round() as usize;
    let (xs, ws) = if full {
        composite_rule(-t_cut, t_cut, 2 * n, ORDER, (false, false), 0)
    } else {
        composite_rule(0.0, t_cut, n, ORDER, (false, false), 0)
    };
    xs.into_iter().zip(ws).map(|(x, w)| (Complex64::new(x, -sigma), w)).collect()
}

fn contour_unchecked(model: &Model, sine: &SineTypeData, a: &SymbolFunction, ts: &[f64], sigma: f64, tol: f64) -> Result<Vec<Complex64>> {
    check_ts(ts)?;
    if a.is_zero() {
        return Ok(vec![c0(); ts.len()]);
    }
    let t_max = ts.last().cloned().unwrap_or(0.0);
    let cut = lambda_cutoff(sine, a, sigma, t_max, tol)?;
    let nodes = line_nodes(cut, sigma, true);
    integrate_lambda(model, &nodes, ts, |l| Ok(0.5 * (a.eval(l) - a.eval(-l)) * sine.s1(l)))
}

/// f(it) as the integral over Im λ = −σ, at sorted real t.
pub fn contour_reconstruct_many(
    model: &Model,
    sine: &SineTypeData,
    a: &SymbolFunction,
    ts: &[f64],
    sigma: f64,
    tol: f64,
) -> Result<Vec<Complex64>> {
    check_branch(sine)?;
    let c = a.certificate;
    if !(sigma >= 0.0 && sigma < c.delta) {
        return Err(Error::Domain(format!("σ = {sigma} outside [0, {})", c.delta)));
    }
    if ts.iter().any(|t| t.abs() >= c.p) {
        return Err(Error::Domain(format!("t must satisfy |t| < p = {}", c.p)));
    }
    contour_unchecked(model, sine, a, ts, sigma, tol)
}

pub fn contour_reconstruct(model: &Model, sine: &SineTypeData, a: &SymbolFunction, t: f64, sigma: f64, tol: f64) -> Result<Complex64> {
    Ok(contour_reconstruct_many(model, sine, a, &[t], sigma, tol)?[0])
}

/// Below this |λ| the real-line route uses S_1 instead of b/|c|².
const NEAR_ZERO: f64 = 0.05;

/// f(it) = ∫_ℝ b(λ)(a(λ) − a(−λ)) φ_λ(t) |c(λ)|^{−2} dλ / 2, folded onto λ > 0.
pub fn realline_reconstruct_many(
    model: &Model,
    sine: &SineTypeData,
    a: &SymbolFunction,
    ts: &[f64],
    tol: f64,
) -> Result<Vec<Complex64>> {
    check_branch(sine)?;
    check_ts(ts)?;
    if ts.iter().any(|t| t.abs() >= a.certificate.p) {
        return Err(Error::Domain(format!("t must satisfy |t| < p = {}", a.certificate.p)));
    }
    if a.is_zero() {
        return Ok(vec![c0(); ts.len()]);
    }
    let t_max = ts.last().cloned().unwrap_or(0.0);
    let cut = lambda_cutoff(sine, a, 0.0, t_max, tol)?;
    let nodes = line_nodes(cut, 0.0, false);
    integrate_lambda(model, &nodes, ts, |l| {
        let odd = a.eval(l) - a.eval(-l);
        if l.re < NEAR_ZERO {
            return Ok(odd * sine.s1(l));
        }
        let cp = cfunc::eval_c(model, l, CMethod::Wronskian)?.value;
        let cm = cfunc::eval_c(model, -l, CMethod::Wronskian)?.value;
        let b = cp * cm * sine.s1(l);
        Ok(odd * b / cp.norm_sqr())
    })
}

pub fn realline_reconstruct(model: &Model, sine: &SineTypeData, a: &SymbolFunction, t: f64, tol: f64) -> Result<Complex64> {
    Ok(realline_reconstruct_many(model, sine, a, &[t], tol)?[0])
}

#[derive(Debug, Clone, Serialize)]
pub struct ForwardValue {
    pub lambda: f64,
    /// ∫_0^∞ f(it) φ_λ(t) A(t) dt / (2πκ)
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub residual: f64,
    pub t_out: f64,
}

/// Checks ∫_0^∞ f(it) φ_λ(t) A(t) dt = 2πκ (a(λ)b(λ) + a(−λ)b(−λ)) at each λ.
pub fn forward_transform(
    model: &Model,
    sine: &SineTypeData,
    a: &SymbolFunction,
    lambdas: &[f64],
    tol: f64,
) -> Result<Vec<ForwardValue>> {
    check_branch(sine)?;
    if lambdas.iter().any(|l| *l == 0.0 || !l.is_finite()) {
        return Err(Error::Domain("forward transform needs real λ ≠ 0".into()));
    }
    if a.is_zero() {
        return Ok(lambdas
            .iter()
            .map(|&l| ForwardValue { lambda: l, lhs: c0(), rhs: c0(), residual: 0.0, t_out: 0.0 })
            .collect());
    }
    let mut t_out: f64 = 10.0;
    loop {
        let panels = (t_out / 0.5).round() as usize;
        let (ts, ws) = composite_rule(0.0, t_out, panels, 16, (true, false), 6);
        let f = contour_unchecked(model, sine, a, &ts, 0.0, tol * 1e-2)?;
        let weights: Vec<Complex64> = ts.iter().zip(&ws).zip(&f).map(|((t, w), f)| f * *w * model.a_real(*t)).collect();
        let out: Vec<(Complex64, f64)> = lambdas
            .par_iter()
            .map(|&l| {
                let e = phi::eval_phi_nodes(model, Complex64::new(l.abs(), 0.0), &ts, PHI_TOL)?;
                let sum: Complex64 = weights.iter().zip(&e.values).map(|(w, v)| w * v).sum();
                // integrand size over the last unit of t
                let tail = ts
                    .iter()
                    .zip(&f)
                    .zip(&e.values)
                    .filter(|((t, _), _)| **t > t_out - 1.0)
                    .map(|((t, f), v)| (f * v).norm() * model.a_real(*t))
                    .fold(0.0, f64::max);
                Ok((sum, tail))
            })
            .collect::<Result<_>>()?;
        let worst = out.iter().map(|o| o.1).fold(0.0, f64::max);
        if worst < tol * 0.1 || t_out >= T_OUT_CAP {
            if worst >= tol * 0.1 {
                return Err(Error::Integration {
                    at: t_out,
                    reason: format!("outer integrand still {worst:e} at the cap"),
                });
            }
            let norm = 2.0 * PI * model.kappa;
            return lambdas
                .iter()
                .zip(out)
                .map(|(&l, (sum, _))| {
                    let lc = Complex64::new(l, 0.0);
                    let cp = cfunc::eval_c(model, lc, CMethod::Wronskian)?.value;
                    let cm = cfunc::eval_c(model, -lc, CMethod::Wronskian)?.value;
                    let b = cp * cm * sine.s1(lc);
                    let rhs = b * (a.eval(lc) - a.eval(-lc));
                    let lhs = sum / norm;
                    Ok(ForwardValue { lambda: l, lhs, rhs, residual: (lhs - rhs).norm(), t_out })
                })
                .collect();
        }
        t_out = (t_out * 1.5).min(T_OUT_CAP);
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ReconstructionResult {
    pub t_nodes: Vec<f64>,
    /// series route at it
    pub f_series: Vec<Complex64>,
    pub f_contour: Vec<Complex64>,
    pub f_realline: Vec<Complex64>,
    pub correction_terms: Vec<Complex64>,
    /// max over t of |series − (contour + corrections)| and |series − realline|
    pub route_discrepancies: Vec<f64>,
}

/// All routes for a model with α or β in (−½, 0], including the correction
/// sums over nodes m0+1..n0 and the imaginary ones 0..=m0.
pub fn reconstruct_general(
    model: &Model,
    eigen: &EigenData,
    sine: &SineTypeData,
    a: &SymbolFunction,
    ts: &[f64],
    sigma: f64,
    tol: f64,
) -> Result<ReconstructionResult> {
    if model.alpha > 0.0 && model.beta > 0.0 {
        return Err(Error::Regime("α, β > 0: use the direct reconstruction".into()));
    }
    if eigen.m0 >= 0 || eigen.n0 > 0 {
        return Err(Error::Regime(format!(
            "nonempty correction ranges (m0 = {}, n0 = {}) need nodes with ν + ρ² ≤ 0",
            eigen.m0, eigen.n0
        )));
    }
    let corrections = vec![c0(); ts.len()];
    let zs: Vec<Complex64> = ts.iter().map(|t| Complex64::new(0.0, *t)).collect();
    let series = series_reconstruct_many(model, eigen, sine, a, &zs, tol)?.values;
    let contour = contour_reconstruct_many(model, sine, a, ts, sigma, tol)?;
    let real = realline_reconstruct_many(model, sine, a, ts, tol)?;
    let d1 = series
        .iter()
        .zip(&contour)
        .zip(&corrections)
        .map(|((s, c), k)| (s - c - k).norm())
        .fold(0.0, f64::max);
    let d2 = series.iter().zip(&real).map(|(s, r)| (s - r).norm()).fold(0.0, f64::max);
    Ok(ReconstructionResult {
        t_nodes: ts.to_vec(),
        f_series: series,
        f_contour: contour,
        f_realline: real,
        correction_terms: corrections,
        route_discrepancies: vec![d1, d2],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::build_model;
    use crate::sinetype::build_sinetype;
    use crate::spectrum::solve_eigen;

    fn setup(alpha: f64, beta: f64, roots: &[f64]) -> (Model, EigenData, SineTypeData) {
        let m = build_model(alpha, beta, roots, 16).unwrap();
        let e = solve_eigen(&m, 40, 1e-13).unwrap();
        let s = build_sinetype(&m, &e, 400).unwrap();
        (m, e, s)
    }

    #[test]
    fn routes_agree_jacobi() {
        let (m, e, s) = setup(1.0, 1.0, &[]);
        let a = SymbolFunction::exp_shift(1.0).unwrap();
        let ts = [0.1, 0.3, 0.4];
        let zs: Vec<Complex64> = ts.iter().map(|t| Complex64::new(0.0, *t)).collect();
        let ser = series_reconstruct_many(&m, &e, &s, &a, &zs, 1e-8).unwrap().values;
        let con = contour_reconstruct_many(&m, &s, &a, &ts, 0.1, 1e-8).unwrap();
        let con0 = contour_reconstruct_many(&m, &s, &a, &ts, 0.0, 1e-8).unwrap();
        let re = realline_reconstruct_many(&m, &s, &a, &ts, 1e-8).unwrap();
        for k in 0..ts.len() {
            assert!((ser[k] - con[k]).norm() < 2e-5);
            assert!((con0[k] - con[k]).norm() < 1e-7);
            assert!((re[k] - con0[k]).norm() < 1e-7);
        }
    }

    #[test]
    fn series_at_zero_is_residue_sum() {
        let (m, e, s) = setup(1.0, 1.0, &[2.0]);
        let a = SymbolFunction::exp_shift(1.0).unwrap();
        let v = series_reconstruct(&m, &e, &s, &a, c0(), 1e-10).unwrap();
        let direct: Complex64 = (0..30)
            .map(|j| 2.0 * PI * Complex64::i() * s.residues[j] * a.eval(Complex64::new(0.0, s.mus[j])))
            .sum();
        assert!((v - direct).norm() < 1e-10);
    }

    #[test]
    fn forward_identity() {
        let (m, _, s) = setup(1.0, 1.0, &[]);
        let a = SymbolFunction::exp_shift(1.0).unwrap();
        let out = forward_transform(&m, &s, &a, &[2.0, -2.0], 1e-6).unwrap();
        for o in &out {
            assert!(o.residual < 1e-4 * (1.0 + o.rhs.norm()));
        }
        assert!((out[0].lhs - out[1].lhs).norm() < 1e-12);
    }

    #[test]
    fn zero_symbol() {
        let (m, e, s) = setup(1.0, 1.0, &[]);
        let a = SymbolFunction::zero(1.0).unwrap();
        assert_eq!(series_reconstruct(&m, &e, &s, &a, Complex64::new(0.2, 0.0), 1e-8).unwrap(), c0());
        assert_eq!(contour_reconstruct(&m, &s, &a, 0.2, 0.1, 1e-8).unwrap(), c0());
        let f = forward_transform(&m, &s, &a, &[1.0], 1e-6).unwrap();
        assert_eq!(f[0].residual, 0.0);
    }
}
